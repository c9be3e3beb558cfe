import numpy as np
import pytest

from pulseseq.system import morse_system

S2, S3, S6 = np.sqrt(2.0), np.sqrt(3.0), np.sqrt(6.0)
LAM1 = np.sqrt(3.0 + S6)
LAM2 = np.sqrt(3.0 - S6)

# Unitary sending |1> to the uniform four-level superposition, built by
# orthonormalizing (r | I) columns; its factorization constants are a
# golden reference.
UNIFORM_SUPERPOSITION_TARGET = np.array(
    [
        [0.5, -S3 / 6, -S6 / 6, -S2 / 2],
        [0.5, S3 / 2, 0.0, 0.0],
        [0.5, -S3 / 6, S6 / 3, 0.0],
        [0.5, -S3 / 6, -S6 / 6, S2 / 2],
    ],
    dtype=complex,
)

# Eigenvector matrix of the 4-level transition dipole operator with
# d_n = sqrt(n); columns ordered by decreasing eigenvalue.
DIPOLE_EIGENVECTOR_TARGET = np.array(
    [
        [1 / (2 * LAM1), 1 / (2 * LAM2), 1 / (2 * LAM2), 1 / (2 * LAM1)],
        [0.5, 0.5, -0.5, -0.5],
        [(S2 + S3) / (2 * LAM1), (S2 - S3) / (2 * LAM2), (S2 - S3) / (2 * LAM2), (S2 + S3) / (2 * LAM1)],
        [0.5, -0.5, 0.5, -0.5],
    ],
    dtype=complex,
)

SIGN_FLIP_DIAGONAL = np.diag([1.0, -1.0, 1.0, -1.0]).astype(complex)

DIPOLE_EIGENVALUES = np.array([LAM1, LAM2, -LAM2, -LAM1])

# Golden factor constants for the two reference decompositions.
SUPERPOSITION_ANGLES = np.array(
    [np.pi / 3, np.arctan(S2), np.pi / 4, np.pi / 2, np.pi / 2]
)
SUPERPOSITION_TRANSITIONS = (1, 2, 3, 2, 1)

MAXIMIZATION_ANGLES = np.array(
    [
        np.pi / 4,
        np.arctan(S2),
        np.arctan(3.0 / (S6 - S3 + 3.0 * S2)),
        np.pi / 3,
        np.arctan(np.sqrt(4.0 + S6) / (S2 + S3)),
        np.arctan(1.0 / np.sqrt(3.0 + S6)),
    ]
)
MAXIMIZATION_TRANSITIONS = (1, 2, 1, 3, 2, 1)


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    ACCEPTANCE_LINES.append(f"criterion {number:2d} {name}: {status}{suffix}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def morse4():
    return morse_system(4, 0.1)


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
