"""Controllable N-level ladder systems, ensemble states and observables."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import check_unitary, hermitian_eigensystem


class ModelError(ValueError):
    """Raised when system parameters produce an invalid model."""


class NumericalConsistencyError(ArithmeticError):
    """Raised when a quantity that must be real carries too much imaginary part."""


@dataclass(frozen=True)
class SystemModel:
    """N-level ladder: strictly increasing energies, positive adjacent dipoles.

    Energies are in units of hbar*omega0 and dipoles in units of p12.
    """

    energies: np.ndarray
    dipoles: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        d = np.asarray(self.dipoles, dtype=float)
        if e.ndim != 1 or len(e) < 2:
            raise ModelError("need at least two energy levels")
        if d.shape != (len(e) - 1,):
            raise ModelError(f"need {len(e) - 1} dipole moments, got {d.shape}")
        if np.any(np.diff(e) <= 0):
            raise ModelError("energies must be strictly increasing")
        if np.any(d <= 0):
            raise ModelError("dipole moments must be positive")
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "dipoles", d)
        mu = np.diff(e)
        if np.min(np.abs(mu[:, None] - mu[None, :]) + np.eye(len(mu))) < 1e-12:
            warnings.warn(
                "transition frequencies are not distinct; "
                "frequency-selective control will not discriminate transitions",
                stacklevel=2,
            )

    @property
    def n(self) -> int:
        return len(self.energies)

    @property
    def transition_frequencies(self) -> np.ndarray:
        """mu_m = E_{m+1} - E_m for m = 1..N-1."""
        return np.diff(self.energies)

    def hamiltonian(self) -> np.ndarray:
        return np.diag(self.energies.astype(complex))


def morse_system(n: int, alpha: float, omega0: float = 1.0, p12: float = 1.0) -> SystemModel:
    """Anharmonic ladder: E_n = omega0 (n - 1/2)[1 - alpha (n - 1/2)], d_m = p12 sqrt(m)."""
    if n < 2:
        raise ModelError("need at least two levels")
    levels = np.arange(1, n + 1) - 0.5
    energies = omega0 * levels * (1.0 - alpha * levels)
    dipoles = p12 * np.sqrt(np.arange(1, n))
    return SystemModel(energies=energies, dipoles=dipoles)


def free_evolution(system: SystemModel, t: float) -> np.ndarray:
    """Unperturbed propagator diag(e^{-i E_n t})."""
    if not np.isfinite(t):
        raise ValueError("time must be finite")
    return np.diag(np.exp(-1j * system.energies * t))


@dataclass(frozen=True)
class EnsembleState:
    """Diagonal ensemble weights plus the unitary frame evolved so far.

    rho = frame @ diag(weights) @ frame^dagger.  A pure state is
    weights = (1, 0, ..., 0) with the state vector as the frame's first
    column.
    """

    weights: np.ndarray
    frame: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < -1e-12) or np.any(w > 1 + 1e-12) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be probabilities summing to 1")
        f = check_unitary(self.frame, name="frame")
        if f.shape[0] != len(w):
            raise ValueError("frame dimension does not match weights")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "frame", f)

    @classmethod
    def ground(cls, n: int) -> "EnsembleState":
        w = np.zeros(n)
        w[0] = 1.0
        return cls(weights=w, frame=np.eye(n, dtype=complex))

    @classmethod
    def pure(cls, vector) -> "EnsembleState":
        v = np.asarray(vector, dtype=complex)
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError("state vector must be normalized")
        n = len(v)
        basis = np.eye(n, dtype=complex)
        basis[:, 0] = v
        from .linalg import gram_schmidt

        w = np.zeros(n)
        w[0] = 1.0
        return cls(weights=w, frame=gram_schmidt(basis))

    @classmethod
    def from_weights(cls, weights) -> "EnsembleState":
        w = np.asarray(weights, dtype=float)
        return cls(weights=w, frame=np.eye(len(w), dtype=complex))

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def is_diagonal(self) -> bool:
        return bool(np.allclose(self.frame, np.eye(self.n), atol=1e-10))

    def evolve(self, u) -> "EnsembleState":
        u = check_unitary(u, name="evolution operator")
        return EnsembleState(weights=self.weights, frame=u @ self.frame)

    def density_matrix(self) -> np.ndarray:
        return self.frame @ np.diag(self.weights.astype(complex)) @ self.frame.conj().T

    def populations(self) -> np.ndarray:
        return (np.abs(self.frame) ** 2) @ self.weights

    def state_vector(self) -> np.ndarray:
        """First frame column; only meaningful for pure states."""
        if abs(self.weights[0] - 1.0) > 1e-12:
            raise ValueError("state is not pure")
        return self.frame[:, 0]


def boltzmann_ensemble(system: SystemModel, anti_thermal: bool = False) -> EnsembleState:
    """Thermal diagonal ensemble at temperature parameter (E_N - E_1) / k.

    Default uses the thermal negative exponent (ground state most
    populated).  `anti_thermal=True` uses the positive exponent, giving
    the reversed ordering.
    """
    e = system.energies
    sign = 1.0 if anti_thermal else -1.0
    w = np.exp(sign * (e - e[0]) / (e[-1] - e[0]))
    return EnsembleState.from_weights(w / w.sum())


@dataclass(frozen=True)
class Observable:
    """Hermitian observable; `dynamic` selects A~(t) = U_0(t) A U_0(t)^dag semantics."""

    matrix: np.ndarray
    dynamic: bool = False
    energies: np.ndarray | None = field(default=None)

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=complex)
        if np.linalg.norm(a - a.conj().T) > 1e-12 * max(1.0, np.linalg.norm(a)):
            raise ValueError("observable must be Hermitian")
        object.__setattr__(self, "matrix", a)
        if self.energies is not None:
            object.__setattr__(self, "energies", np.asarray(self.energies, dtype=float))
        if self.dynamic and self.energies is None:
            raise ValueError("dynamic observable needs the system energies")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def at_time(self, t: float) -> np.ndarray:
        """A~(t) = U_0(t) A U_0(t)^dagger for dynamic observables, A otherwise."""
        if not self.dynamic:
            return self.matrix
        u0 = np.exp(-1j * self.energies * t)
        return (u0[:, None] * self.matrix) * np.conj(u0)[None, :]


def transition_dipole_observable(system: SystemModel) -> Observable:
    """Tridiagonal dipole operator sum_m d_m (|m><m+1| + |m+1><m|), dynamic."""
    n = system.n
    a = np.zeros((n, n), dtype=complex)
    for m in range(n - 1):
        a[m, m + 1] = system.dipoles[m]
        a[m + 1, m] = system.dipoles[m]
    return Observable(matrix=a, dynamic=True, energies=system.energies)


def energy_observable(system: SystemModel) -> Observable:
    return Observable(matrix=system.hamiltonian(), dynamic=False, energies=system.energies)


def kinematical_bounds(obs: Observable, state: EnsembleState) -> tuple[float, float]:
    """Extrema of <A> over the unitary orbit of the state.

    Max pairs sorted-descending eigenvalues with sorted-descending weights;
    min uses the anti-sorted pairing.  Both are attainable.
    """
    if obs.n != state.n:
        raise ValueError("observable and state dimensions do not match")
    lam = np.sort(hermitian_eigensystem(obs.matrix).values)[::-1]
    w = np.sort(state.weights)[::-1]
    upper = float(w @ lam)
    lower = float(w @ lam[::-1])
    return lower, upper


def expectation(obs: Observable, state: EnsembleState, t: float = 0.0) -> float:
    """Ensemble average Tr[A~(t) rho] with a realness consistency check."""
    if obs.n != state.n:
        raise ValueError("observable and state dimensions do not match")
    value = complex(np.trace(obs.at_time(t) @ state.density_matrix()))
    if abs(value.imag) > 1e-8:
        raise NumericalConsistencyError(
            f"expectation value has imaginary part {value.imag:.3e}"
        )
    return float(value.real)
