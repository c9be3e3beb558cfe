"""Factorization of unitaries into adjacent-transition rotations.

A target unitary U on an N-level ladder is reduced column by column
(rightmost column first) with rotations acting on adjacent level pairs.
The surviving rotations, read in reverse, are the time-ordered factors
V_1, ..., V_K of

    U = e^{i g} V_K ... V_1 diag(e^{i theta_n}),

each V_k realizable as a single resonant pulse on transition sigma(k)
with pulse area 2 C_k / d_sigma(k) and carrier phase phi_k.  In
"mod_phase" mode the diagonal residue is kept (it is irrelevant for
ensembles of energy eigenstates); "exact" mode appends rotation pairs
that cancel the relative residual phases, leaving a pure global phase.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, replace

import numpy as np

from .linalg import check_unitary, embedded_rotation, gram_schmidt, hermitian_eigensystem
from .system import EnsembleState, Observable, SystemModel

ANGLE_EPS = 1e-14


def _wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = (a + np.pi) % (2.0 * np.pi) - np.pi
    return float(np.pi) if a == -np.pi else float(a)


@dataclass(frozen=True)
class FactorSpec:
    """One rotation factor: transition sigma(k), angle C_k, carrier phase phi_k."""

    transition: int
    angle: float
    phase: float

    def matrix(self, n: int) -> np.ndarray:
        return embedded_rotation(n, self.transition, self.angle, self.phase)


@dataclass(frozen=True)
class DecompositionResult:
    """Time-ordered factors (first applied first) plus the diagonal residue.

    `global_phase` is the scalar phase applied on reconstruction, so that
    e^{i global_phase} V_K ... V_1 diag(e^{i residual_phases}) recovers the
    target (exactly in "exact" mode, up to diagonal phases in "mod_phase").
    """

    factors: tuple[FactorSpec, ...]
    residual_phases: np.ndarray
    global_phase: float
    mode: str
    dim: int

    def __post_init__(self):
        object.__setattr__(
            self, "residual_phases", np.asarray(self.residual_phases, dtype=float)
        )

    @property
    def count(self) -> int:
        return len(self.factors)

    def with_phase(self, k: int, phase: float) -> "DecompositionResult":
        """Copy with the phase of factor k (1-based) replaced."""
        if not 1 <= k <= len(self.factors):
            raise IndexError(f"factor index {k} out of range 1..{len(self.factors)}")
        factors = list(self.factors)
        factors[k - 1] = replace(factors[k - 1], phase=float(phase))
        return replace(self, factors=tuple(factors))


def decompose(u, mode: str = "mod_phase") -> DecompositionResult:
    """Factor a unitary into adjacent-transition rotations.

    Column j (from the last to the second) is cleared top-down: the entry
    in row i is rotated into row i+1 by a rotation on transition i whose
    angle C = atan2(r_i, r_{i+1}) and phase phi = pi/2 + arg(u_ij) -
    arg(u_{i+1,j}) zero the pivot.  Zero pivots are skipped without
    emitting a factor, so the count is at most N(N-1)/2.
    """
    if mode not in ("mod_phase", "exact"):
        raise ValueError(f"unknown decomposition mode {mode!r}")
    u = check_unitary(u, name="target")
    n = u.shape[0]
    gamma = float(np.angle(np.linalg.det(u))) % (2.0 * np.pi)
    w = np.exp(-1j * gamma / n) * u
    reductions: list[FactorSpec] = []
    for j in range(n - 1, 0, -1):
        for i in range(j):
            r1 = abs(w[i, j])
            if r1 <= ANGLE_EPS:
                continue
            r2 = abs(w[i + 1, j])
            a1 = float(np.angle(w[i, j]))
            a2 = float(np.angle(w[i + 1, j])) if r2 > ANGLE_EPS else 0.0
            c = float(np.arctan2(r1, r2))
            phi = _wrap_angle(np.pi / 2.0 + a1 - a2)
            step = embedded_rotation(n, i + 1, -c, phi)
            w = step @ w
            reductions.append(FactorSpec(transition=i + 1, angle=c, phase=phi))
    thetas = np.angle(np.diag(w))
    factors = tuple(reversed(reductions))
    if mode == "mod_phase":
        return DecompositionResult(
            factors=factors,
            residual_phases=thetas,
            global_phase=gamma / n,
            mode="mod_phase",
            dim=n,
        )
    # Exact mode: express diag(e^{i theta_n}) as a global phase times
    # rotation pairs.  A pair on transition m,
    #   exp[-(pi/2) x_m] exp[-(pi/2)(sin(phi) x_m - cos(phi) y_m)]
    # with phi = -pi/2 - beta, equals diag(e^{i beta}, e^{-i beta}) on
    # levels (m, m+1); chaining the pairs realizes any traceless phase
    # pattern.  det considerations make sum(theta) a multiple of 2 pi, so
    # the leftover scalar is absorbed into the global phase.
    mean_theta = float(np.sum(thetas)) / n
    psi = thetas - mean_theta
    extra: list[FactorSpec] = []
    beta = 0.0
    for m in range(1, n):
        beta += psi[m - 1]
        if abs(np.sin(beta)) <= ANGLE_EPS and np.cos(beta) > 0:
            continue
        extra.append(
            FactorSpec(transition=m, angle=-np.pi / 2.0, phase=_wrap_angle(-np.pi / 2.0 - beta))
        )
        extra.append(FactorSpec(transition=m, angle=-np.pi / 2.0, phase=np.pi / 2.0))
    return DecompositionResult(
        factors=tuple(extra) + factors,
        residual_phases=np.zeros(n),
        global_phase=_wrap_angle(gamma / n + mean_theta),
        mode="exact",
        dim=n,
    )


def reconstruct(d: DecompositionResult, n: int | None = None) -> np.ndarray:
    """Multiply the factorization back together (inverse of `decompose`)."""
    n = d.dim if n is None else n
    for f in d.factors:
        if not 1 <= f.transition <= n - 1:
            raise ValueError(f"factor transition {f.transition} invalid for dimension {n}")
    u = np.diag(np.exp(1j * d.residual_phases)).astype(complex)
    if u.shape[0] != n:
        raise ValueError("residual phase count does not match dimension")
    for f in d.factors:
        u = f.matrix(n) @ u
    return np.exp(1j * d.global_phase) * u


def phase_flip_probe(d: DecompositionResult, k: int, new_phase: float) -> DecompositionResult:
    """Copy of `d` with the carrier phase of factor k (1-based) replaced."""
    return d.with_phase(k, new_phase)


# ---------------------------------------------------------------------------
# Closed-form target builders for the four control objectives.
# ---------------------------------------------------------------------------


def _phase_list(n_factors: int, phases) -> list[float]:
    if phases is None:
        return [0.0] * n_factors
    phases = [float(p) for p in phases]
    if len(phases) != n_factors:
        raise ValueError(f"need {n_factors} phases, got {len(phases)}")
    return phases


def target_population_transfer(system: SystemModel, phases=None) -> DecompositionResult:
    """Ladder climb |1> -> |N>: one half-pi rotation per transition, in order.

    Final population of level N is 1 regardless of the chosen phases.
    """
    n = system.n
    phi = _phase_list(n - 1, phases)
    factors = tuple(
        FactorSpec(transition=m, angle=np.pi / 2.0, phase=phi[m - 1]) for m in range(1, n)
    )
    return DecompositionResult(
        factors=factors,
        residual_phases=np.zeros(n),
        global_phase=0.0,
        mode="mod_phase",
        dim=n,
    )


def target_inversion(system: SystemModel, phases=None) -> DecompositionResult:
    """Full reversal of diagonal ensemble populations.

    N(N-1)/2 half-pi rotations in the nested order (1..N-1, 1..N-2, ..., 1);
    each swaps the populations of one adjacent level pair.
    """
    n = system.n
    order = [m for top in range(n - 1, 0, -1) for m in range(1, top + 1)]
    phi = _phase_list(len(order), phases)
    factors = tuple(
        FactorSpec(transition=m, angle=np.pi / 2.0, phase=p) for m, p in zip(order, phi)
    )
    return DecompositionResult(
        factors=factors,
        residual_phases=np.zeros(n),
        global_phase=0.0,
        mode="mod_phase",
        dim=n,
    )


def target_superposition(
    r, theta, total_time: float, system: SystemModel
) -> tuple[np.ndarray, DecompositionResult]:
    """Target unitary and factorization mapping |1> to sum_n r_n e^{i theta_n} |n~(t)>.

    The unitary is built by orthonormalizing the matrix whose first column
    is r against the remaining identity columns, then applying the
    requested rotating-frame phases.  The final-time dependence cancels,
    so `total_time` does not enter the target itself.
    """
    r = np.asarray(r, dtype=float)
    th = np.zeros(system.n) if theta is None else np.asarray(theta, dtype=float)
    if r.shape != (system.n,) or th.shape != (system.n,):
        raise ValueError(f"need {system.n} amplitudes and phases")
    if np.any(r < 0):
        raise ValueError("amplitudes must be non-negative")
    if abs(np.sum(r**2) - 1.0) > 1e-10:
        raise ValueError("amplitudes must satisfy sum(r^2) = 1")
    if not np.isfinite(total_time):
        raise ValueError("total time must be finite")
    seed = np.eye(system.n, dtype=complex)
    seed[:, 0] = r
    u1 = gram_schmidt(seed)
    target = np.diag(np.exp(1j * th)) @ u1
    return target, decompose(target, mode="mod_phase")


def target_observable_max(obs: Observable, state: EnsembleState) -> np.ndarray:
    """Unitary sending level n to the observable eigenvector of matching rank.

    The largest initial weight is paired with the largest eigenvalue, so
    the evolved ensemble average attains the kinematical maximum.
    Requires a diagonal initial ensemble.
    """
    if obs.n != state.n:
        raise ValueError("observable and state dimensions do not match")
    if not state.is_diagonal:
        raise ValueError("initial state must be a diagonal ensemble of energy eigenstates")
    eig = hermitian_eigensystem(obs.matrix)
    order = np.argsort(-state.weights, kind="stable")
    u1 = np.zeros((obs.n, obs.n), dtype=complex)
    for rank, level in enumerate(order):
        u1[:, level] = eig.vectors[:, rank]
    return u1


# ---------------------------------------------------------------------------
# Line-oriented text serialization.
# ---------------------------------------------------------------------------


def serialize(d: DecompositionResult) -> str:
    """Header (mode, dim, global phase, residual phases) then one factor per line."""
    out = io.StringIO()
    out.write(f"mode {d.mode}\n")
    out.write(f"dim {d.dim}\n")
    out.write(f"global_phase {d.global_phase:.17g}\n")
    out.write("theta " + " ".join(f"{t:.17g}" for t in d.residual_phases) + "\n")
    for k, f in enumerate(d.factors, start=1):
        out.write(f"{k} {f.transition} {f.angle:.17g} {f.phase:.17g}\n")
    return out.getvalue()


def deserialize(text: str) -> DecompositionResult:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = {}
    factors = []
    for ln in lines:
        parts = ln.split()
        if parts[0] in ("mode", "dim", "global_phase", "theta"):
            header[parts[0]] = parts[1:]
        else:
            factors.append(
                FactorSpec(
                    transition=int(parts[1]), angle=float(parts[2]), phase=float(parts[3])
                )
            )
    return DecompositionResult(
        factors=tuple(factors),
        residual_phases=np.array([float(x) for x in header["theta"]]),
        global_phase=float(header["global_phase"][0]),
        mode=header["mode"][0],
        dim=int(header["dim"][0]),
    )
