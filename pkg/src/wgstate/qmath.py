"""Dense complex linear algebra for one and two polarization qubits.

Conventions used throughout the package:

* computational basis |0> = |H>, |1> = |V>;
* photon 1 is always the left tensor factor, so a two-qubit amplitude
  vector is ordered |00>, |01>, |10>, |11>;
* "operators" are plain complex ndarrays of shape (2, 2) or (4, 4).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-10
EIGENVALUE_FLOOR = -1e-10
NORM_ATOL = 1e-12

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}

# single-photon polarization kets
KET_H = np.array([1, 0], dtype=complex)
KET_V = np.array([0, 1], dtype=complex)
KET_D = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_A = np.array([1, -1], dtype=complex) / np.sqrt(2)
KET_L = np.array([1, 1j], dtype=complex) / np.sqrt(2)
KET_R = np.array([1, -1j], dtype=complex) / np.sqrt(2)
POLARIZATION_KETS = {"H": KET_H, "V": KET_V, "D": KET_D, "A": KET_A,
                     "L": KET_L, "R": KET_R}


class NonPhysicalStateError(ValueError):
    """Raised when a matrix fails the density-matrix checks."""


@dataclass(frozen=True)
class PureState2Q:
    """Normalized two-qubit pure state.

    ``amplitudes`` holds the four complex coefficients in the order
    |00>, |01>, |10>, |11> with photon 1 as the left factor. The input
    is normalized on construction; a vector of zero norm is rejected.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(4)
        norm = np.linalg.norm(amps)
        if norm < 1e-12:
            raise ValueError("cannot normalize a zero-amplitude state")
        amps = amps / norm
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def density(self) -> "DensityMatrix":
        """Rank-one density matrix |psi><psi|."""
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def overlap(self, other: "PureState2Q") -> complex:
        """Inner product <self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityMatrix:
    """Physical two-qubit density matrix.

    Construction validates Hermiticity and unit trace to 1e-10 and
    requires all eigenvalues >= -1e-10; anything else raises
    :class:`NonPhysicalStateError`.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise NonPhysicalStateError(f"expected a 4x4 matrix, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_ATOL:
            raise NonPhysicalStateError("matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > TRACE_ATOL or abs(np.trace(m).imag) > TRACE_ATOL:
            raise NonPhysicalStateError("trace differs from 1")
        if np.linalg.eigvalsh(m).min() < EIGENVALUE_FLOOR:
            raise NonPhysicalStateError("matrix has a negative eigenvalue")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


def as_density(state) -> np.ndarray:
    """Return the 4x4 matrix of a PureState2Q, DensityMatrix or raw array."""
    if isinstance(state, PureState2Q):
        return np.outer(state.amplitudes, state.amplitudes.conj())
    if isinstance(state, DensityMatrix):
        return state.matrix
    arr = np.asarray(state, dtype=complex)
    if arr.shape == (4,):
        arr = arr / np.linalg.norm(arr)
        return np.outer(arr, arr.conj())
    if arr.shape == (4, 4):
        return DensityMatrix(arr).matrix
    raise ValueError(f"cannot interpret shape {arr.shape} as a two-qubit state")


def tensor(a, b) -> np.ndarray:
    """Kronecker product with qubit 1 (photon 1) leftmost."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def is_hermitian(op, atol: float = HERMITICITY_ATOL) -> bool:
    op = np.asarray(op)
    return bool(np.max(np.abs(op - op.conj().T)) <= atol)


def is_unitary(op, atol: float = HERMITICITY_ATOL) -> bool:
    op = np.asarray(op)
    return bool(np.max(np.abs(op.conj().T @ op - np.eye(op.shape[0]))) <= atol)


def fidelity(rho, target: PureState2Q) -> float:
    """Overlap <target|rho|target> (Uhlmann fidelity for a pure target)."""
    m = as_density(rho)
    psi = target.amplitudes if isinstance(target, PureState2Q) else np.asarray(target, dtype=complex)
    val = np.real(psi.conj() @ m @ psi)
    return float(np.clip(val, 0.0, 1.0))


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    The spin-flip spectrum values l1 >= l2 >= l3 >= l4 entering
    C = max(0, l1 - l2 - l3 - l4) are computed as the singular values
    of B^T (Y (x) Y) B with rho = B B^dag, which avoids squaring the
    matrix and stays accurate at the rank boundary. Eigenvalues of rho
    below numerical noise are treated as exact zeros.
    """
    m = as_density(rho)
    vals, vecs = np.linalg.eigh(m)
    vals = np.clip(vals, 0.0, None)
    vals[vals < 1e-14 * max(1.0, vals[-1])] = 0.0
    b = vecs * np.sqrt(vals)
    yy = tensor(Y, Y)
    lams = np.linalg.svd(b.T @ yy @ b, compute_uv=False)
    return float(max(0.0, lams[0] - lams[1] - lams[2] - lams[3]))


def expectation(obs, state) -> float:
    """Expectation value Tr(obs rho) of a Hermitian observable."""
    op = np.asarray(obs, dtype=complex)
    if not is_hermitian(op):
        raise ValueError("observable is not Hermitian")
    m = as_density(state)
    val = np.trace(op @ m)
    return float(val.real)


def trace_distance(rho_a, rho_b) -> float:
    """Half the trace norm of the difference of two states."""
    diff = as_density(rho_a) - as_density(rho_b)
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())
