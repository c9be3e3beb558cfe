"""Pulse schedules: envelopes, areas and the pulse-area constraint.

Each decomposition factor becomes one resonant pulse whose envelope area
fixes the rotation angle: integral of the full envelope 2A(t) equals
2C/d_m.  Two envelope families are supported: square waves with erf
rise/decay shoulders, and Gaussian wavepackets.
"""

from __future__ import annotations

import hashlib
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .decompose import DecompositionResult
from .system import SystemModel


class ScheduleError(ValueError):
    """Raised when a schedule cannot be synthesized from its parameters."""


@dataclass(frozen=True)
class PulseShape:
    """Envelope family: erf-edged square (rise time tau0) or Gaussian (shape factor q).

    For Gaussian pulses q=None means "auto": q = 4/slot at synthesis time.
    """

    kind: str
    tau0: float | None = None
    q: float | None = None

    def __post_init__(self):
        if self.kind == "square_erf":
            if self.tau0 is None or self.tau0 <= 0:
                raise ValueError("square_erf shape needs tau0 > 0")
        elif self.kind == "gaussian":
            if self.q is not None and self.q <= 0:
                raise ValueError("gaussian shape factor q must be positive")
        else:
            raise ValueError(f"unknown pulse shape {self.kind!r}")

    @classmethod
    def square(cls, tau0: float) -> "PulseShape":
        return cls(kind="square_erf", tau0=tau0)

    @classmethod
    def gaussian(cls, q: float | None = None) -> "PulseShape":
        return cls(kind="gaussian", q=q)


@dataclass(frozen=True)
class Pulse:
    """One resonant pulse; `half_amplitude` is the peak A_k (peak field 2A_k)."""

    transition: int
    carrier: float
    phase: float
    start: float
    duration: float
    half_amplitude: float
    shape: PulseShape
    area_constant: float
    dipole: float

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass(frozen=True)
class PulseSchedule:
    """Time-ordered, gapless, non-overlapping pulses covering [0, T]."""

    pulses: tuple[Pulse, ...]
    total_time: float

    def __len__(self) -> int:
        return len(self.pulses)


def synthesize(
    d: DecompositionResult,
    system: SystemModel,
    shape: PulseShape,
    total_time: float,
) -> PulseSchedule:
    """Turn factors into equal-slot pulses with areas fixed by the angles.

    Negative angles are realized by adding pi to the carrier phase and
    using |C| (flipping the field sign equals a pi phase shift).
    """
    k = d.count
    if k == 0:
        return PulseSchedule(pulses=(), total_time=0.0)
    if total_time <= 0:
        raise ScheduleError("total time must be positive")
    slot = total_time / k
    mu = system.transition_frequencies
    pulses = []
    for idx, f in enumerate(d.factors):
        c, phi = f.angle, f.phase
        if c < 0:
            c, phi = -c, phi + np.pi
        phi = float((phi + np.pi) % (2.0 * np.pi) - np.pi)
        dm = system.dipoles[f.transition - 1]
        if shape.kind == "square_erf":
            if slot < 2.0 * shape.tau0:
                raise ScheduleError(
                    f"slot {slot:g} is shorter than twice the rise time {shape.tau0:g}"
                )
            amp = c / (dm * (slot - shape.tau0))
        else:
            q = shape.q if shape.q is not None else 4.0 / slot
            shape = PulseShape.gaussian(q)
            amp = q * c / (dm * math.sqrt(math.pi))
        pulses.append(
            Pulse(
                transition=f.transition,
                carrier=float(mu[f.transition - 1]),
                phase=phi,
                start=idx * slot,
                duration=slot,
                half_amplitude=float(amp),
                shape=shape,
                area_constant=float(c),
                dipole=float(dm),
            )
        )
    return PulseSchedule(pulses=tuple(pulses), total_time=float(total_time))


def _square_envelope(tau: float, amp: float, tau0: float, duration: float) -> float:
    """Two-term erf envelope: rise shoulder minus decay shoulder (half-amplitude).

    The difference form integrates to exactly amp * (duration - tau0)
    over the whole line, for any duration >= 2 tau0, including when the
    shoulders overlap and the flat top never fully forms.
    """
    s = 4.0 / tau0
    return 0.5 * amp * (
        math.erf(s * (tau - tau0 / 2.0)) - math.erf(s * (tau - duration + tau0 / 2.0))
    )


def envelope(p: Pulse, t: float) -> float:
    """Field half-amplitude A(t); zero outside the pulse support."""
    tau = t - p.start
    if tau < 0.0 or tau > p.duration:
        return 0.0
    if p.shape.kind == "square_erf":
        return _square_envelope(tau, p.half_amplitude, p.shape.tau0, p.duration)
    return p.half_amplitude * math.exp(-p.shape.q**2 * (tau - p.duration / 2.0) ** 2)


def field_value(p: Pulse, t: float) -> float:
    """Real control field 2 A(t) cos(mu t + phi); zero outside the support."""
    a = envelope(p, t)
    if a == 0.0:
        return 0.0
    return 2.0 * a * math.cos(p.carrier * t + p.phase)


def pulse_area(p: Pulse) -> float:
    """Rotation angle delivered by the pulse: (d_m / 2) * integral of 2 A(t).

    For erf-edged square pulses the analytic envelope is integrated with
    its (tiny) tails beyond the slot, which makes the rectangle identity
    2A(slot - tau0) exact; Gaussian pulses are integrated over the slot
    only, so the result reflects the truncated (captured) area.
    """
    if p.shape.kind == "square_erf":
        mid = p.start + p.duration / 2.0
        pad = 2.0 * p.shape.tau0

        def full(t):
            return 2.0 * _square_envelope(t - p.start, p.half_amplitude, p.shape.tau0, p.duration)

        lo, hi = p.start - pad, p.end + pad
        area = (
            quad(full, lo, mid, epsabs=1e-12, epsrel=1e-12, limit=200)[0]
            + quad(full, mid, hi, epsabs=1e-12, epsrel=1e-12, limit=200)[0]
        )
    else:
        area = quad(
            lambda t: 2.0 * envelope(p, t),
            p.start,
            p.end,
            epsabs=1e-12,
            epsrel=1e-12,
            limit=200,
        )[0]
    return 0.5 * p.dipole * area


@dataclass(frozen=True)
class GuardEntry:
    """Detuning-margin report for one pulse: margin = min detuning / peak Rabi rate."""

    index: int
    margin: float
    flagged: bool


def detuning_guard(
    schedule: PulseSchedule, system: SystemModel, threshold: float = 10.0
) -> list[GuardEntry]:
    """Check each pulse's peak Rabi rate against its off-resonant detunings.

    Pulses with margin below `threshold` are flagged: their envelope is
    strong enough to drive off-resonant transitions appreciably.
    """
    mu = system.transition_frequencies
    entries = []
    for idx, p in enumerate(schedule.pulses):
        m = p.transition - 1
        others = np.abs(mu[m] - np.delete(mu, m))
        rabi = 2.0 * p.half_amplitude * p.dipole
        margin = float(np.min(others) / rabi) if rabi > 0 and len(others) else math.inf
        entries.append(GuardEntry(index=idx, margin=margin, flagged=margin < threshold))
    return entries


def system_hash(system: SystemModel) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(system.energies).tobytes())
    h.update(np.ascontiguousarray(system.dipoles).tobytes())
    return h.hexdigest()[:12]


def serialize_schedule(schedule: PulseSchedule, system: SystemModel) -> str:
    """Header with T and system hash, then one pulse per line."""
    out = io.StringIO()
    out.write(f"T {schedule.total_time:.17g} system {system_hash(system)}\n")
    for idx, p in enumerate(schedule.pulses, start=1):
        params = f"tau0 {p.shape.tau0:.17g}" if p.shape.kind == "square_erf" else f"q {p.shape.q:.17g}"
        out.write(
            f"{idx} {p.transition} {p.carrier:.17g} {p.phase:.17g} "
            f"{p.start:.17g} {p.duration:.17g} {p.shape.kind} "
            f"{p.half_amplitude:.17g} {params}\n"
        )
    return out.getvalue()
