"""Free-fermion oracle: Pauli/Majorana algebra and covariance-matrix evolution.

Majoranas are 1-based and follow the Jordan-Wigner layout
``c_{2k-1} = Z_1...Z_{k-1} X_k`` and ``c_{2k} = Z_1...Z_{k-1} Y_k``.
The covariance matrix is ``M_jk = <-i c_j c_k>`` (j != k), so the vacuum
block is [[0, 1], [-1, 0]] and ``<Z_k> = M_{2k-1, 2k}``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from typing import Iterable

import numpy as np
from scipy.linalg import polar

from .errors import ConfigurationError, NonCliffordError, NonGaussianError
from .gates import I2, X, Y, Z, Circuit, matchgate_matrix, MatchgateParams
from .statevector import LocalUnitary

PAULI_MATRICES = {"I": I2, "X": X, "Y": Y, "Z": Z}
PHASES = (1, 1j, -1, -1j)  # index = power of i

# (a, b) -> (power of i, letter) with a.b = i^power * letter
_MUL = {}
for _a, _b in itertools.product("IXYZ", repeat=2):
    _m = PAULI_MATRICES[_a] @ PAULI_MATRICES[_b]
    for _c in "IXYZ":
        _t = np.trace(PAULI_MATRICES[_c] @ _m) / 2
        if abs(_t) > 0.5:
            _MUL[_a, _b] = (PHASES.index(complex(np.round(_t))), _c)


@dataclass(frozen=True)
class PauliString:
    """``i^power`` times a tensor product of single-qubit Paulis (qubit 1 first)."""

    letters: str
    power: int = 0

    def __post_init__(self):
        if set(self.letters) - set("IXYZ"):
            raise ConfigurationError(f"bad Pauli letters {self.letters!r}")
        object.__setattr__(self, "power", self.power % 4)

    @property
    def phase(self) -> complex:
        return PHASES[self.power]

    @property
    def num_qubits(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if other.num_qubits != self.num_qubits:
            raise ConfigurationError("Pauli strings of different length")
        power = self.power + other.power
        out = []
        for a, b in zip(self.letters, other.letters):
            p, c = _MUL[a, b]
            power += p
            out.append(c)
        return PauliString("".join(out), power)

    def matrix(self) -> np.ndarray:
        return self.phase * reduce(np.kron, (PAULI_MATRICES[c] for c in self.letters))

    def symplectic(self) -> np.ndarray:
        """(x | z) bit vector of length 2N, phase dropped."""
        x = np.array([c in "XY" for c in self.letters], dtype=np.uint8)
        z = np.array([c in "ZY" for c in self.letters], dtype=np.uint8)
        return np.concatenate([x, z])

    def __str__(self):
        sign = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.power]
        return f"{sign}{self.letters}"


def local_pauli_decomposition(matrix: np.ndarray, atol: float = 1e-9) -> tuple[int, str] | None:
    """(power, letters) if ``matrix`` is a phase times a Pauli string, else None."""
    n = int(round(np.log2(matrix.shape[0])))
    for letters in itertools.product("IXYZ", repeat=n):
        P = reduce(np.kron, (PAULI_MATRICES[c] for c in letters))
        coeff = np.trace(P @ matrix) / matrix.shape[0]
        if abs(abs(coeff) - 1) < atol:
            if not np.allclose(coeff * P, matrix, atol=atol):
                return None
            for power, ph in enumerate(PHASES):
                if abs(coeff - ph) < atol:
                    return power, "".join(letters)
            return None
    return None


def jordan_wigner(majorana_index: int, num_qubits: int) -> PauliString:
    if not 1 <= majorana_index <= 2 * num_qubits:
        raise ConfigurationError(f"Majorana index {majorana_index} outside 1..{2 * num_qubits}")
    k = (majorana_index + 1) // 2
    last = "X" if majorana_index % 2 else "Y"
    return PauliString("Z" * (k - 1) + last + "I" * (num_qubits - k))


# -- Clifford conjugation and fermionic weight -----------------------------------------


def conjugate_pauli_by_gate(p: PauliString, gate: LocalUnitary) -> PauliString:
    """G p G^dag, computed on the gate's support only."""
    q = gate.qubits
    sub = "".join(p.letters[i - 1] for i in q)
    local = reduce(np.kron, (PAULI_MATRICES[c] for c in sub))
    dec = local_pauli_decomposition(gate.matrix @ local @ gate.matrix.conj().T)
    if dec is None:
        raise NonCliffordError(f"gate {gate.name or ''} at site {gate.site} is not Clifford")
    power, new = dec
    letters = list(p.letters)
    for i, c in zip(q, new):
        letters[i - 1] = c
    return PauliString("".join(letters), p.power + power)


def conjugate_pauli_by_clifford(p: PauliString, circuit: Circuit, adjoint: bool = False) -> PauliString:
    """U p U^dag for the circuit operator U (or U^dag p U with ``adjoint``)."""
    gates = list(circuit.gates())
    if adjoint:
        gates = [g.adjoint() for g in reversed(gates)]
    for g in gates:
        p = conjugate_pauli_by_gate(p, g)
    return p


def _gf2_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A x = b over GF(2) for invertible square A."""
    n = A.shape[0]
    aug = np.concatenate([A % 2, (b % 2)[:, None]], axis=1).astype(np.uint8)
    for col in range(n):
        pivot = col + int(np.argmax(aug[col:, col]))
        if aug[pivot, col] == 0:
            raise ConfigurationError("singular system over GF(2)")
        aug[[col, pivot]] = aug[[pivot, col]]
        rows = np.nonzero(aug[:, col])[0]
        rows = rows[rows != col]
        aug[rows] ^= aug[col]
    return aug[:, -1]


def majorana_support(p: PauliString) -> list[int]:
    """Indices j (ascending) with p proportional to the product of the c_j."""
    n = p.num_qubits
    basis = np.stack([jordan_wigner(j, n).symplectic() for j in range(1, 2 * n + 1)], axis=1)
    coeffs = _gf2_solve(basis, p.symplectic())
    return [j + 1 for j in np.nonzero(coeffs)[0]]


def majorana_weight(p: PauliString) -> int:
    return len(majorana_support(p))


def z_string(k: int, num_qubits: int) -> PauliString:
    return PauliString("I" * (k - 1) + "Z" + "I" * (num_qubits - k))


def padded_weight(d: int) -> int:
    """Operator count once an odd monomial is completed by the extra Majorana c_{2N+1}."""
    return d + (d % 2)


def fermionic_weights(circuit: Circuit) -> list[int]:
    """Per-qubit Majorana counts of C Z_k C^dag, C the circuit operator in time order.

    C Z_k C^dag is the observable the matchgate layers act on when they run on
    C|psi>; writing it as a product of Jordan-Wigner Majoranas fixes the cost
    of tracking it through free-fermion evolution.
    """
    n = circuit.num_qubits
    return [padded_weight(majorana_weight(conjugate_pauli_by_clifford(z_string(k, n), circuit)))
            for k in range(1, n + 1)]


def fermionic_weight(circuit: Circuit, num_qubits: int | None = None) -> int:
    if num_qubits is not None and num_qubits != circuit.num_qubits:
        raise ConfigurationError("num_qubits differs from the circuit width")
    return max(fermionic_weights(circuit))


# -- Gaussian covariance evolution -----------------------------------------------------

_LOCAL_MAJORANAS = [np.kron(X, I2), np.kron(Y, I2), np.kron(Z, X), np.kron(Z, Y)]


@dataclass
class MajoranaRotation:
    """Orthogonal block acting on Majoranas 2s-1 .. 2s+2; identity elsewhere."""

    block: np.ndarray
    site: int
    num_qubits: int

    @property
    def indices(self) -> np.ndarray:
        return np.arange(2 * self.site - 2, 2 * self.site + 2)  # 0-based

    def matrix(self) -> np.ndarray:
        R = np.eye(2 * self.num_qubits)
        idx = self.indices
        R[np.ix_(idx, idx)] = self.block
        return R


def _rotation_block(G: np.ndarray, atol: float = 1e-9) -> np.ndarray:
    Gd = G.conj().T
    R = np.empty((4, 4))
    for j, cj in enumerate(_LOCAL_MAJORANAS):
        conj = Gd @ cj @ G
        coeffs = np.array([np.trace(ck @ conj) / 4 for ck in _LOCAL_MAJORANAS])
        recon = sum(c * ck for c, ck in zip(coeffs, _LOCAL_MAJORANAS))
        if np.max(np.abs(recon - conj)) > atol or np.max(np.abs(coeffs.imag)) > atol:
            raise NonGaussianError("gate maps a Majorana outside the span of single Majoranas")
        R[j] = coeffs.real
    if np.max(np.abs(R.T @ R - np.eye(4))) > 1e-8:
        R = polar(R)[0]
    return R


def matchgate_rotation(gate, site: int | None = None, num_qubits: int | None = None) -> MajoranaRotation:
    """R with G^dag c_j G = sum_k R_jk c_k for a matchgate on (site, site + 1).

    ``gate`` may be :class:`MatchgateParams`, a :class:`LocalUnitary`, or a bare 4x4 matrix.
    """
    if isinstance(gate, MatchgateParams):
        G = matchgate_matrix(gate.A, gate.B)
    elif isinstance(gate, LocalUnitary):
        G = gate.matrix
        site = gate.site if site is None else site
    else:
        G = np.asarray(gate, dtype=complex)
    if G.shape != (4, 4):
        raise NonGaussianError("matchgate rotations need a two-qubit gate")
    site = 1 if site is None else site
    num_qubits = site + 1 if num_qubits is None else num_qubits
    if not 1 <= site < num_qubits:
        raise ConfigurationError(f"site {site} out of range")
    return MajoranaRotation(_rotation_block(G), site, num_qubits)


def circuit_rotations(circuit: Circuit) -> list[MajoranaRotation]:
    return [matchgate_rotation(g, num_qubits=circuit.num_qubits) for g in circuit.gates()]


def initial_covariance(bits: str) -> np.ndarray:
    n = len(bits)
    M = np.zeros((2 * n, 2 * n))
    for k, b in enumerate(bits):
        z = -1.0 if b == "1" else 1.0
        M[2 * k, 2 * k + 1] = z
        M[2 * k + 1, 2 * k] = -z
    return M


def evolve_covariance(M: np.ndarray, rotations: Iterable[MajoranaRotation],
                      check_every: int = 100, drift_tol: float = 1e-8) -> np.ndarray:
    """M <- R M R^T for each rotation in time order; returns a new matrix."""
    M = np.array(M, dtype=float)
    for count, rot in enumerate(rotations, 1):
        if M.shape != (2 * rot.num_qubits, 2 * rot.num_qubits):
            raise ConfigurationError("rotation and covariance dimensions differ")
        idx = rot.indices
        M[idx, :] = rot.block @ M[idx, :]
        M[:, idx] = M[:, idx] @ rot.block.T
        if count % check_every == 0 and np.max(np.abs(M @ M.T - np.eye(M.shape[0]))) > drift_tol:
            M = polar(M)[0]
            M = (M - M.T) / 2
    return M


def z_expectation(M: np.ndarray, k: int) -> float:
    return float(M[2 * k - 2, 2 * k - 1])
