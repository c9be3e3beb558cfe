"""Propagation of states under pulse schedules, three ways.

* piecewise: the decomposition's own exact factor product (no integration
  error) followed by free evolution;
* rwa: 4th-order Runge-Kutta on the interaction-picture propagator, with
  only the slow envelope of the active pulse driving its transition;
* labframe: Runge-Kutta on the full Schroedinger equation, where the real
  field shakes every transition through the tridiagonal dipole operator.

All integrators act on the propagator matrix, not the state, so ensemble
evolution stays exactly unitary-similar and norm drift is a direct
convergence diagnostic.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .decompose import DecompositionResult, reconstruct
from .pulses import Pulse, PulseSchedule, envelope, field_value
from .system import (
    EnsembleState,
    Observable,
    SystemModel,
    free_evolution,
    kinematical_bounds,
    energy_observable,
)


@dataclass
class SimulationTrace:
    """Sampled time series of one propagation run.

    `frames` holds the full evolution operator U(t) at each sample, which
    is what `trace_metrics` needs to fill the optional series.
    """

    times: np.ndarray
    frames: np.ndarray
    initial_state: EnsembleState
    final_state: EnsembleState
    mode: str
    populations: np.ndarray = field(default=None)
    energy: np.ndarray = field(default=None)
    energy_bounds: tuple[float, float] | None = None
    observable_avg: np.ndarray | None = None
    target_overlap: np.ndarray | None = None

    def __post_init__(self):
        if self.populations is None:
            w = self.initial_state.weights
            f0 = self.initial_state.frame
            moved = np.einsum("tij,jk->tik", self.frames, f0)
            self.populations = np.einsum("tij,j->ti", np.abs(moved) ** 2, w)
        if self.energy is None:
            self.energy = None  # filled by trace_metrics against the system


def _rk4_step(u: np.ndarray, t: float, dt: float, rhs) -> np.ndarray:
    k1 = rhs(t, u)
    k2 = rhs(t + dt / 2.0, u + dt / 2.0 * k1)
    k3 = rhs(t + dt / 2.0, u + dt / 2.0 * k2)
    k4 = rhs(t + dt, u + dt * k3)
    return u + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def propagate_piecewise(
    d: DecompositionResult,
    system: SystemModel,
    s0: EnsembleState,
    total_time: float,
) -> EnsembleState:
    """Apply the exact factor product, then free evolution to `total_time`."""
    u = free_evolution(system, total_time) @ reconstruct(d, system.n)
    return s0.evolve(u)


def piecewise_trace(
    d: DecompositionResult,
    system: SystemModel,
    s0: EnsembleState,
    total_time: float,
) -> SimulationTrace:
    """Exact populations at slot boundaries (one sample per applied factor)."""
    n = system.n
    k = max(d.count, 1)
    slot = total_time / k
    u_i = np.diag(np.exp(1j * d.residual_phases)).astype(complex)
    u_i *= np.exp(1j * d.global_phase)
    times = [0.0]
    frames = [u_i.copy()]
    for idx, f in enumerate(d.factors):
        u_i = f.matrix(n) @ u_i
        t = (idx + 1) * slot
        times.append(t)
        frames.append(free_evolution(system, t) @ u_i)
    final = s0.evolve(frames[-1])
    return SimulationTrace(
        times=np.array(times),
        frames=np.array(frames),
        initial_state=s0,
        final_state=final,
        mode="piecewise",
    )


def _generator(p: Pulse, system: SystemModel) -> np.ndarray:
    """Constant part of the interaction-picture generator for one pulse."""
    n = system.n
    m = p.transition - 1
    g = np.zeros((n, n), dtype=complex)
    # sin(phi) x_m - cos(phi) y_m  on rows/cols (m, m+1)
    g[m, m + 1] = np.sin(p.phase) - 1j * np.cos(p.phase)
    g[m + 1, m] = -np.sin(p.phase) - 1j * np.cos(p.phase)
    return p.dipole * g


def propagate_rwa(
    schedule: PulseSchedule,
    system: SystemModel,
    s0: EnsembleState,
    steps_per_slot: int = 1000,
) -> SimulationTrace:
    """Integrate the interaction-picture propagator slot by slot.

    Within each slot only the active pulse's envelope drives its
    transition, so the step count scales with the pulse count rather than
    the carrier frequency.
    """
    if steps_per_slot < 100:
        raise ValueError("steps_per_slot must be at least 100")
    n = system.n
    u_i = np.eye(n, dtype=complex)
    times = [0.0]
    frames = [np.eye(n, dtype=complex)]
    for p in schedule.pulses:
        gen = _generator(p, system)
        dt = p.duration / steps_per_slot

        def rhs(t, u, gen=gen, p=p):
            return envelope(p, t) * (gen @ u)

        t = p.start
        for _ in range(steps_per_slot):
            u_i = _rk4_step(u_i, t, dt, rhs)
            t += dt
            times.append(t)
            frames.append(free_evolution(system, t) @ u_i)
    final_u = frames[-1] if len(frames) > 1 else np.eye(n, dtype=complex)
    return SimulationTrace(
        times=np.array(times),
        frames=np.array(frames),
        initial_state=s0,
        final_state=s0.evolve(_renormalize(final_u)),
        mode="rwa",
    )


def propagate_labframe(
    schedule: PulseSchedule,
    system: SystemModel,
    s0: EnsembleState,
    steps_per_period: int = 60,
) -> SimulationTrace:
    """Integrate the lab-frame Schroedinger equation with the full dipole coupling.

    The scalar field of every pulse multiplies the whole tridiagonal
    dipole operator, so off-resonant leakage is present; the step size
    resolves the fastest carrier.
    """
    if steps_per_period < 40:
        raise ValueError("steps_per_period must be at least 40")
    n = system.n
    h0 = system.hamiltonian()
    dip = np.zeros((n, n), dtype=complex)
    for m in range(n - 1):
        dip[m, m + 1] = system.dipoles[m]
        dip[m + 1, m] = system.dipoles[m]
    mu_max = float(np.max(system.transition_frequencies))
    dt_max = (2.0 * np.pi / mu_max) / steps_per_period
    u = np.eye(n, dtype=complex)
    times = [0.0]
    frames = [u.copy()]
    for p in schedule.pulses:
        steps = max(int(np.ceil(p.duration / dt_max)), 1)
        dt = p.duration / steps

        def rhs(t, v, p=p):
            return -1j * ((h0 + field_value(p, t) * dip) @ v)

        t = p.start
        for _ in range(steps):
            u = _rk4_step(u, t, dt, rhs)
            t += dt
            times.append(t)
            frames.append(u.copy())
    return SimulationTrace(
        times=np.array(times),
        frames=np.array(frames),
        initial_state=s0,
        final_state=s0.evolve(_renormalize(u)),
        mode="labframe",
    )


def _renormalize(u: np.ndarray) -> np.ndarray:
    """Project the integrated propagator back onto the unitary group.

    Only used to build the final EnsembleState (whose frame must be
    unitary); the recorded frames keep their drift as a diagnostic.
    """
    v, _, wt = np.linalg.svd(u)
    return v @ wt


def trace_metrics(
    trace: SimulationTrace,
    system: SystemModel,
    observable: Observable | None = None,
    target_state=None,
) -> SimulationTrace:
    """Fill energy, kinematical bound lines and the optional series in place.

    `target_state` is a callable t -> state vector; the overlap series is
    <psi_T(t)| rho(t) |psi_T(t)>, which for pure states is the squared
    overlap with the target.
    """
    if trace.populations.shape[1] != system.n:
        raise ValueError("trace dimension does not match system")
    trace.energy = trace.populations @ system.energies
    trace.energy_bounds = kinematical_bounds(energy_observable(system), trace.initial_state)
    w = trace.initial_state.weights
    f0 = trace.initial_state.frame
    if observable is not None or target_state is not None:
        moved = np.einsum("tij,jk->tik", trace.frames, f0)
        if observable is not None:
            vals = np.empty(len(trace.times))
            for i, t in enumerate(trace.times):
                a = observable.at_time(t)
                rho = (moved[i] * w[None, :]) @ moved[i].conj().T
                vals[i] = np.trace(a @ rho).real
            trace.observable_avg = vals
        if target_state is not None:
            vals = np.empty(len(trace.times))
            for i, t in enumerate(trace.times):
                psi_t = np.asarray(target_state(t), dtype=complex)
                amps = psi_t.conj() @ moved[i]
                vals[i] = float((np.abs(amps) ** 2) @ w)
            trace.target_overlap = vals
    return trace


def superposition_target_state(r, theta, system: SystemModel):
    """Callable t -> sum_n r_n e^{i theta_n} e^{-i E_n t} |n>."""
    r = np.asarray(r, dtype=float)
    th = np.asarray(theta, dtype=float)
    e = system.energies

    def psi(t):
        return r * np.exp(1j * (th - e * t))

    return psi


def write_trace_csv(trace: SimulationTrace, path) -> None:
    """CSV export: t, per-level populations, energy, optional series."""
    n = trace.populations.shape[1]
    cols = ["t"] + [f"p{i + 1}" for i in range(n)] + ["energy"]
    series = [trace.times] + [trace.populations[:, i] for i in range(n)] + [trace.energy]
    if trace.observable_avg is not None:
        cols.append("observable")
        series.append(trace.observable_avg)
    if trace.target_overlap is not None:
        cols.append("overlap")
        series.append(trace.target_overlap)
    out = io.StringIO()
    out.write(",".join(cols) + "\n")
    for row in zip(*series):
        out.write(",".join(f"{x:.12g}" for x in row) + "\n")
    with open(path, "w") as fh:
        fh.write(out.getvalue())
