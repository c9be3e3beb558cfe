"""Dense complex linear algebra for small unitary/Hermitian matrices.

Everything here operates on plain numpy arrays of shape (N, N) with
N up to ~16.  Accuracy is favored over speed throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ORTHO_TOL = 1e-12
UNITARY_TOL = 1e-10


class SingularMatrixError(ValueError):
    """Raised when a matrix expected to be full rank is not."""


def _as_square(matrix) -> np.ndarray:
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def check_unitary(u, tol: float = UNITARY_TOL, name: str = "matrix") -> np.ndarray:
    u = _as_square(u)
    n = u.shape[0]
    defect = np.linalg.norm(u.conj().T @ u - np.eye(n))
    if defect > tol:
        raise ValueError(f"{name} is not unitary (defect {defect:.3e} > {tol:.1e})")
    return u


def embedded_rotation(n: int, m: int, angle: float, phase: float) -> np.ndarray:
    """Rotation exp[C (sin(phi) x_m - cos(phi) y_m)] on levels (m, m+1).

    Identity outside the 2x2 block at rows/columns (m, m+1), 1-based.
    The block is [[cos C, -i e^{i phi} sin C], [-i e^{-i phi} sin C, cos C]].
    """
    if not 1 <= m <= n - 1:
        raise ValueError(f"transition index {m} out of range 1..{n - 1}")
    u = np.eye(n, dtype=complex)
    c, s = np.cos(angle), np.sin(angle)
    i, j = m - 1, m
    u[i, i] = c
    u[j, j] = c
    u[i, j] = -1j * np.exp(1j * phase) * s
    u[j, i] = -1j * np.exp(-1j * phase) * s
    return u


def gram_schmidt(matrix) -> np.ndarray:
    """Orthonormalize the columns of a full-rank matrix.

    Modified Gram-Schmidt with one reorthogonalization pass.  The first
    column keeps its phase (it is only normalized); the R factor has a
    positive diagonal, so span(first k columns) is preserved for all k.
    """
    a = _as_square(matrix)
    n = a.shape[0]
    q = a.copy()
    for j in range(n):
        for _ in range(2):
            for i in range(j):
                q[:, j] -= (q[:, i].conj() @ q[:, j]) * q[:, i]
        norm = np.linalg.norm(q[:, j])
        if norm < 1e-12:
            raise SingularMatrixError(
                f"column {j + 1} is linearly dependent on the preceding columns"
            )
        q[:, j] /= norm
    return q


@dataclass(frozen=True)
class HermitianEigensystem:
    """Eigenvalues sorted non-increasing; column n of `vectors` belongs to values[n]."""

    values: np.ndarray
    vectors: np.ndarray


def hermitian_eigensystem(matrix, max_sweeps: int = 60) -> HermitianEigensystem:
    """Diagonalize a Hermitian matrix by the cyclic Jacobi method.

    Each pivot (p, q) is annihilated by a complex Givens rotation: a phase
    makes the pivot real, then a real Jacobi angle diagonalizes the 2x2
    block.  Sweeps repeat until the off-diagonal norm is negligible.
    """
    a = _as_square(matrix)
    n = a.shape[0]
    scale = max(np.linalg.norm(a), 1.0)
    if np.linalg.norm(a - a.conj().T) > 1e-12 * scale:
        raise ValueError("matrix is not Hermitian")
    w = a.copy()
    v = np.eye(n, dtype=complex)
    for _ in range(max_sweeps):
        off = np.linalg.norm(w - np.diag(np.diag(w)))
        if off <= 1e-14 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = w[p, q]
                if abs(apq) <= 1e-16 * scale:
                    continue
                phase = apq / abs(apq)
                theta = 0.5 * np.arctan2(2.0 * abs(apq), (w[p, p] - w[q, q]).real)
                c, s = np.cos(theta), np.sin(theta)
                jpp, jpq = phase * c, -phase * s
                jqp, jqq = s, c
                col_p = w[:, p] * jpp + w[:, q] * jqp
                col_q = w[:, p] * jpq + w[:, q] * jqq
                w[:, p], w[:, q] = col_p, col_q
                row_p = np.conj(jpp) * w[p, :] + np.conj(jqp) * w[q, :]
                row_q = np.conj(jpq) * w[p, :] + np.conj(jqq) * w[q, :]
                w[p, :], w[q, :] = row_p, row_q
                col_p = v[:, p] * jpp + v[:, q] * jqp
                col_q = v[:, p] * jpq + v[:, q] * jqq
                v[:, p], v[:, q] = col_p, col_q
    values = np.real(np.diag(w))
    order = np.argsort(-values, kind="stable")
    return HermitianEigensystem(values=values[order], vectors=v[:, order])


def unitary_distance(u1, u2, mode: str = "exact") -> float:
    """Frobenius distance between unitaries, optionally modulo phase freedom.

    mode "exact": ||U1 - U2||_F.
    mode "mod_diagonal_phases": min over diagonal phase matrices D of
    ||U1 D - U2||_F (each column of U1 is phase-aligned to the matching
    column of U2).
    mode "mod_global_phase": min over a single phase of ||e^{i t} U1 - U2||_F.
    """
    u1 = check_unitary(u1, name="first argument")
    u2 = check_unitary(u2, name="second argument")
    if u1.shape != u2.shape:
        raise ValueError(f"dimension mismatch: {u1.shape} vs {u2.shape}")
    if mode == "exact":
        return float(np.linalg.norm(u1 - u2))
    if mode == "mod_diagonal_phases":
        aligned = u1.copy()
        for j in range(u1.shape[1]):
            z = np.vdot(u2[:, j], u1[:, j])
            if abs(z) > 0:
                aligned[:, j] *= np.conj(z) / abs(z)
        return float(np.linalg.norm(aligned - u2))
    if mode == "mod_global_phase":
        z = np.trace(u2.conj().T @ u1)
        factor = np.conj(z) / abs(z) if abs(z) > 0 else 1.0
        return float(np.linalg.norm(u1 * factor - u2))
    raise ValueError(f"unknown distance mode {mode!r}")
