"""Dense statevector simulation on 1-based, big-endian qubit indices.

Qubit 1 is the most significant bit of the amplitude index, so the basis
state ``|b_1 b_2 ... b_N>`` lives at ``int("b_1...b_N", 2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

UNITARY_ATOL = 1e-12


def is_unitary(matrix: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    m = np.asarray(matrix)
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= atol)


@dataclass
class LocalUnitary:
    """One- or two-qubit unitary placed at ``site`` (and ``site + 1``)."""

    matrix: np.ndarray
    site: int
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.shape not in ((2, 2), (4, 4)):
            raise ConfigurationError(f"gate matrix must be 2x2 or 4x4, got {self.matrix.shape}")
        if not is_unitary(self.matrix):
            raise ConfigurationError(f"gate {self.name or ''} at site {self.site} is not unitary")
        self.site = int(self.site)

    @property
    def arity(self) -> int:
        return 1 if self.matrix.shape[0] == 2 else 2

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.site,) if self.arity == 1 else (self.site, self.site + 1)

    def adjoint(self) -> "LocalUnitary":
        name = None if self.name is None else self.name + "^dag"
        return LocalUnitary(self.matrix.conj().T, self.site, name)


@dataclass
class Statevector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.num_qubits < 1:
            raise ConfigurationError("num_qubits must be positive")
        if self.amplitudes.shape != (2**self.num_qubits,):
            raise ConfigurationError(
                f"expected {2**self.num_qubits} amplitudes, got {self.amplitudes.shape}"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "Statevector":
        return Statevector(self.num_qubits, self.amplitudes.copy())

    def expectation_z(self, k: int) -> float:
        """<Z_k> for 1-based qubit k."""
        probs = np.abs(self.amplitudes.reshape(2 ** (k - 1), 2, -1)) ** 2
        return float(probs[:, 0, :].sum() - probs[:, 1, :].sum())


def basis_state(num_qubits: int, bits: str) -> Statevector:
    if len(bits) != num_qubits or set(bits) - {"0", "1"}:
        raise ConfigurationError(f"bit string {bits!r} does not describe {num_qubits} qubits")
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[int(bits, 2)] = 1.0
    return Statevector(num_qubits, amps)


def product_state(factors) -> Statevector:
    """Kronecker product of single-block state vectors, first factor on qubit 1."""
    amps = np.ones(1, dtype=complex)
    for f in factors:
        amps = np.kron(amps, np.asarray(f, dtype=complex))
    n = int(round(np.log2(amps.size)))
    return Statevector(n, amps)


def apply_matrix(amps: np.ndarray, num_qubits: int, matrix: np.ndarray, site: int) -> np.ndarray:
    """Apply a 2x2 or 4x4 matrix at a 1-based site; returns a new flat array."""
    d = matrix.shape[0]
    width = 1 if d == 2 else 2
    if site < 1 or site + width - 1 > num_qubits:
        raise ConfigurationError(f"site {site} out of range for {num_qubits} qubits")
    view = amps.reshape(2 ** (site - 1), d, 2 ** (num_qubits - site - width + 1))
    return np.matmul(matrix, view).reshape(-1)


def apply_local(state: Statevector, gate: LocalUnitary) -> Statevector:
    amps = apply_matrix(state.amplitudes, state.num_qubits, gate.matrix, gate.site)
    return Statevector(state.num_qubits, amps)


def half_cut(num_qubits: int) -> int:
    return num_qubits // 2


def schmidt_values(amps: np.ndarray, num_qubits: int, cut: int | None = None) -> np.ndarray:
    """Descending reduced-density eigenvalues of qubits 1..cut, via SVD."""
    if cut is None:
        cut = half_cut(num_qubits)
    if not 1 <= cut <= num_qubits - 1:
        raise ConfigurationError(f"cut {cut} out of range for {num_qubits} qubits")
    s = np.linalg.svd(amps.reshape(2**cut, -1), compute_uv=False)
    p = np.clip(s * s, 0.0, None)
    return p  # svd already returns singular values in descending order


def schmidt_spectrum(state: Statevector, cut: int | None = None, floor: float = 0.0):
    """Entanglement spectrum of the contiguous block 1..cut (default N/2).

    ``floor`` drops values below ``floor * p_max`` and renormalizes the rest;
    0 keeps the full spectrum.
    """
    from .stats import EntanglementSpectrum

    p = schmidt_values(state.amplitudes, state.num_qubits, cut)
    if floor > 0:
        p = p[p >= floor * p[0]]
        p = p / p.sum()
    return EntanglementSpectrum(p)


def reduced_density_matrix(state: Statevector, cut: int) -> np.ndarray:
    """Brute-force partial trace over qubits cut+1..N."""
    dim_a = 2**cut
    dim_b = 2 ** (state.num_qubits - cut)
    rho = np.outer(state.amplitudes, state.amplitudes.conj())
    rho = rho.reshape(dim_a, dim_b, dim_a, dim_b)
    return np.einsum("ajbj->ab", rho)


def embed(matrix: np.ndarray, site: int, num_qubits: int) -> np.ndarray:
    """Dense 2^N x 2^N operator I (x) U (x) I for a local matrix."""
    width = 1 if matrix.shape[0] == 2 else 2
    left = np.eye(2 ** (site - 1))
    right = np.eye(2 ** (num_qubits - site - width + 1))
    return np.kron(np.kron(left, matrix), right)
