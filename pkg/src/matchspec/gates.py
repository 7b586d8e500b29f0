"""Gate constructors, circuits, and random brickwork schedules.

Sites are 1-based; a two-qubit gate at ``site`` acts on ``(site, site + 1)``
with qubit ``site`` as the more significant bit of the 4x4 matrix index.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, InvalidMatchgateError
from .statevector import LocalUnitary, Statevector, apply_matrix, embed, is_unitary

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j]).astype(complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
CNOT_12 = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CNOT_21 = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)


class BrickworkKind(str, enum.Enum):
    MATCHGATE = "matchgate"
    CLIFFORD = "clifford"
    HAAR = "haar"


# -- matchgates ------------------------------------------------------------------


@dataclass
class MatchgateParams:
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=complex)
        self.B = np.asarray(self.B, dtype=complex)
        for name, m in (("A", self.A), ("B", self.B)):
            if m.shape != (2, 2) or not is_unitary(m):
                raise InvalidMatchgateError(f"{name} must be a 2x2 unitary")
        if abs(np.linalg.det(self.A) - np.linalg.det(self.B)) > 1e-10:
            raise InvalidMatchgateError("det(A) != det(B)")


def matchgate_matrix(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """G(A, B): A on span{|00>, |11>}, B on span{|01>, |10>}; stacks broadcast."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    G = np.zeros(A.shape[:-2] + (4, 4), dtype=complex)
    G[..., 0, 0] = A[..., 0, 0]
    G[..., 0, 3] = A[..., 0, 1]
    G[..., 3, 0] = A[..., 1, 0]
    G[..., 3, 3] = A[..., 1, 1]
    G[..., 1:3, 1:3] = B
    return G


def matchgate(params: MatchgateParams, site: int = 1) -> LocalUnitary:
    return LocalUnitary(matchgate_matrix(params.A, params.B), site, "MG")


def matchgate_blocks(G: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`matchgate_matrix`."""
    A = G[np.ix_([0, 3], [0, 3])]
    B = G[1:3, 1:3]
    return A.copy(), B.copy()


# -- Haar sampling -----------------------------------------------------------------


def haar_unitaries(rng: np.random.Generator, dim: int, size: int) -> np.ndarray:
    """``size`` Haar unitaries: Ginibre matrices, QR, phases of diag(R) folded into Q."""
    g = (rng.standard_normal((size, dim, dim)) + 1j * rng.standard_normal((size, dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


def random_su2_batch(rng: np.random.Generator, size: int) -> np.ndarray:
    u = haar_unitaries(rng, 2, size)
    det = u[:, 0, 0] * u[:, 1, 1] - u[:, 0, 1] * u[:, 1, 0]
    return u / np.sqrt(det)[:, None, None]


def random_su2(rng: np.random.Generator) -> np.ndarray:
    return random_su2_batch(rng, 1)[0]


def random_matchgate_batch(rng: np.random.Generator, size: int) -> np.ndarray:
    ab = random_su2_batch(rng, 2 * size)
    return matchgate_matrix(ab[0::2], ab[1::2])


def random_matchgate(rng: np.random.Generator, site: int = 1) -> LocalUnitary:
    return LocalUnitary(random_matchgate_batch(rng, 1)[0], site, "MG")


def random_haar_two_qubit(rng: np.random.Generator, site: int = 1) -> LocalUnitary:
    return LocalUnitary(haar_unitaries(rng, 4, 1)[0], site, "HAAR")


# -- two-qubit Cliffords in Bravyi-Maslov canonical form ----------------------------
#
# U = F1 . W . F2 (F2 acts first).  F1 = Pauli . D(Gamma1) . L(Delta1) and
# F2 = D(Gamma2) . L(Delta2) are Hadamard-free; W = H^h . Pi carries the
# Hadamard layer and qubit permutation, drawn from the quantum Mallows law.
# A parameter tuple is packed into one integer "code":
#   bits 0-3 Pauli (a1, b1, a2, b2), 4-6 Gamma1, 7 Delta1, 8-10 Gamma2,
#   11 Delta2, 12-13 Mallows index for qubit slot 1, 14 Mallows index for slot 2.

NUM_CLIFFORD_CODES = 1 << 15
NUM_TWO_QUBIT_CLIFFORDS = 11520


def _mallows_index(rng: np.random.Generator, m: int, size: int) -> np.ndarray:
    r = rng.random(size)
    x = r + (1 - r) * 4.0 ** (-m)
    return (-np.ceil(np.log2(x))).astype(np.int64)


def mallows_probability(index: int, m: int) -> float:
    """P(index) for the truncated geometric law used per Mallows slot."""
    return 2.0 ** (-index - 1) / (1 - 4.0 ** (-m))


def sample_clifford_codes(rng: np.random.Generator, size: int) -> np.ndarray:
    low = rng.integers(0, 1 << 12, size=size, dtype=np.int64)
    j0 = _mallows_index(rng, 2, size)
    j1 = _mallows_index(rng, 1, size)
    return low | (j0 << 12) | (j1 << 14)


def _phase_diag(g11: int, g22: int, g12: int) -> np.ndarray:
    d = []
    for x1 in (0, 1):
        for x2 in (0, 1):
            d.append(1j ** ((g11 * x1 + g22 * x2 + 2 * g12 * x1 * x2) % 4))
    return np.diag(d)


def _borel(g: int, delta: int) -> np.ndarray:
    D = _phase_diag(g & 1, (g >> 1) & 1, (g >> 2) & 1)
    L = CNOT_12 if delta else np.eye(4, dtype=complex)
    return D @ L


def _pauli_factor(bits: int) -> np.ndarray:
    a1, b1, a2, b2 = (bits >> 0) & 1, (bits >> 1) & 1, (bits >> 2) & 1, (bits >> 3) & 1
    p1 = np.linalg.matrix_power(X, a1) @ np.linalg.matrix_power(Z, b1)
    p2 = np.linalg.matrix_power(X, a2) @ np.linalg.matrix_power(Z, b2)
    return np.kron(p1, p2)


def _weyl_element(j0: int, j1: int) -> np.ndarray:
    """H^h . Pi from the two Mallows indices (same decoding as the sampler)."""
    inds = [0, 1]
    had = [False, False]
    perm = [0, 0]
    for slot, (j, m) in enumerate(((j0, 2), (j1, 1))):
        had[slot] = j < m
        k = j if j < m else 2 * m - j - 1
        perm[slot] = inds.pop(k)
    P = np.eye(4, dtype=complex) if perm == [0, 1] else SWAP
    Hl = np.kron(H if had[0] else I2, H if had[1] else I2)
    return Hl @ P


@lru_cache(maxsize=None)
def clifford_from_code(code: int) -> np.ndarray:
    code = int(code)
    pauli = code & 0xF
    g1, d1 = (code >> 4) & 0x7, (code >> 7) & 1
    g2, d2 = (code >> 8) & 0x7, (code >> 11) & 1
    j0, j1 = (code >> 12) & 0x3, (code >> 14) & 1
    F1 = _pauli_factor(pauli) @ _borel(g1, d1)
    F2 = _borel(g2, d2)
    U = F1 @ _weyl_element(j0, j1) @ F2
    U.setflags(write=False)
    return U


def clifford_code_probability(code: int) -> float:
    j0, j1 = (code >> 12) & 0x3, (code >> 14) & 1
    return mallows_probability(j0, 2) * mallows_probability(j1, 1) / (1 << 12)


def random_two_qubit_clifford(rng: np.random.Generator, site: int = 1) -> LocalUnitary:
    code = int(sample_clifford_codes(rng, 1)[0])
    return LocalUnitary(clifford_from_code(code), site, "CLIFFORD")


def phase_normalized_key(U: np.ndarray, decimals: int = 8) -> bytes:
    """Hashable key identifying U up to global phase."""
    flat = np.asarray(U, dtype=complex).reshape(-1)
    idx = int(np.argmax(np.abs(flat) > 1e-9))
    v = flat * (abs(flat[idx]) / flat[idx])
    v = np.round(v, decimals) + 0.0  # fold -0.0 into 0.0
    return np.concatenate([v.real, v.imag]).tobytes()


# -- named gates -------------------------------------------------------------------


def hadamard(site: int) -> LocalUnitary:
    return LocalUnitary(H, site, f"H_{site}")


def swap(site: int) -> LocalUnitary:
    return LocalUnitary(SWAP, site, f"SWAP_{site},{site + 1}")


def cnot(control: int, target: int) -> LocalUnitary:
    if abs(control - target) != 1:
        raise ConfigurationError("only nearest-neighbour CNOTs are supported")
    if control < target:
        return LocalUnitary(CNOT_12, control, f"CNOT_{control},{target}")
    return LocalUnitary(CNOT_21, target, f"CNOT_{control},{target}")


# -- circuits --------------------------------------------------------------------


@dataclass
class Circuit:
    num_qubits: int
    layers: list[list[LocalUnitary]] = field(default_factory=list)

    def __post_init__(self):
        for layer in self.layers:
            self._check_layer(layer)

    def _check_layer(self, layer):
        seen = set()
        for g in layer:
            if g.site < 1 or g.qubits[-1] > self.num_qubits:
                raise ConfigurationError(f"gate at site {g.site} outside {self.num_qubits} qubits")
            if seen.intersection(g.qubits):
                raise ConfigurationError("gates within a layer must act on disjoint qubits")
            seen.update(g.qubits)

    def append(self, layer: list[LocalUnitary]) -> None:
        self._check_layer(layer)
        self.layers.append(list(layer))

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.num_qubits != self.num_qubits:
            raise ConfigurationError("cannot concatenate circuits of different width")
        return Circuit(self.num_qubits, self.layers + other.layers)

    def __len__(self):
        return len(self.layers)

    def gates(self):
        for layer in self.layers:
            yield from layer

    def apply(self, state: Statevector) -> Statevector:
        if state.num_qubits != self.num_qubits:
            raise ConfigurationError("state and circuit widths differ")
        amps = state.amplitudes
        for g in self.gates():
            amps = apply_matrix(amps, self.num_qubits, g.matrix, g.site)
        return Statevector(self.num_qubits, amps)

    def unitary(self) -> np.ndarray:
        """Dense product of all gates; only sensible for a handful of qubits."""
        U = np.eye(2**self.num_qubits, dtype=complex)
        for g in self.gates():
            U = embed(g.matrix, g.site, self.num_qubits) @ U
        return U

    def to_json(self) -> str:
        doc = {
            "num_qubits": self.num_qubits,
            "layers": [
                [
                    {"site": g.site, "matrix": [[float(z.real), float(z.imag)] for z in g.matrix.reshape(-1)]}
                    for g in layer
                ]
                for layer in self.layers
            ],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        doc = json.loads(text)
        layers = []
        for layer in doc["layers"]:
            gates = []
            for g in layer:
                flat = np.array([complex(re, im) for re, im in g["matrix"]])
                d = int(round(np.sqrt(flat.size)))
                gates.append(LocalUnitary(flat.reshape(d, d), g["site"]))
            layers.append(gates)
        return cls(int(doc["num_qubits"]), layers)


def brickwork_sites(num_qubits: int, layer_index: int) -> list[int]:
    start = 1 if layer_index % 2 == 0 else 2
    return list(range(start, num_qubits, 2))


def random_layer(num_qubits: int, layer_index: int, kind: BrickworkKind | str,
                 rng: np.random.Generator) -> list[LocalUnitary]:
    name = {"matchgate": "MG", "haar": "HAAR", "clifford": "CLIFFORD"}[BrickworkKind(kind).value]
    return [LocalUnitary(m, s, name) for s, m in layer_matrices(num_qubits, layer_index, kind, rng)]


def layer_matrices(num_qubits: int, layer_index: int, kind: BrickworkKind | str,
                   rng: np.random.Generator) -> list[tuple[int, np.ndarray]]:
    """Unvalidated (site, matrix) pairs for the simulation hot loop.

    Draws from ``rng`` in exactly the same order as :func:`random_layer`.
    """
    kind = BrickworkKind(kind)
    sites = brickwork_sites(num_qubits, layer_index)
    if not sites:
        return []
    n = len(sites)
    if kind is BrickworkKind.MATCHGATE:
        mats = random_matchgate_batch(rng, n)
    elif kind is BrickworkKind.HAAR:
        mats = haar_unitaries(rng, 4, n)
    else:
        mats = [clifford_from_code(c) for c in sample_clifford_codes(rng, n)]
    return list(zip(sites, mats))


def brickwork(num_qubits: int, num_layers: int, kind: BrickworkKind | str,
              rng: np.random.Generator, first_layer: int = 0) -> Circuit:
    """Alternating even-pair / odd-pair layers of freshly sampled gates.

    ``first_layer`` offsets the parity so a schedule can be continued.
    """
    if num_qubits % 2:
        raise ConfigurationError("brickwork circuits need an even number of qubits")
    if num_layers < 0:
        raise ConfigurationError("num_layers must be nonnegative")
    layers = [random_layer(num_qubits, first_layer + i, kind, rng) for i in range(num_layers)]
    return Circuit(num_qubits, layers)


def swap_injection(num_qubits: int, num_swaps: int) -> Circuit:
    """SWAPs filling even pairs (1,2),(3,4),... first, overflow on odd pairs."""
    if not 1 <= num_swaps <= num_qubits - 1:
        raise ConfigurationError(f"num_swaps must lie in [1, {num_qubits - 1}]")
    even = brickwork_sites(num_qubits, 0)
    odd = brickwork_sites(num_qubits, 1)
    first = [swap(s) for s in even[:num_swaps]]
    rest = num_swaps - len(first)
    layers = [first]
    if rest:
        layers.append([swap(s) for s in odd[:rest]])
    return Circuit(num_qubits, layers)


CONJUGATION_MIN_QUBITS = {"C1": 2, "C2": 3, "C3": 2, "C4": 3}


def conjugation_circuit(name: str, num_qubits: int) -> Circuit:
    """Clifford prefixes C1-C4 as circuits (first layer acts first).

    C1 and C2 list their gates in time order.  C3 and C4 are operator
    products, so their rightmost CNOT is applied first.
    """
    name = name.upper()
    if name not in CONJUGATION_MIN_QUBITS:
        raise ConfigurationError(f"unknown conjugation circuit {name!r}")
    if num_qubits < CONJUGATION_MIN_QUBITS[name]:
        raise ConfigurationError(f"{name} needs at least {CONJUGATION_MIN_QUBITS[name]} qubits")
    N = num_qubits
    if name == "C1":
        layers = [[cnot(a, a + 1)] for a in range(1, N)]
        layers.append([hadamard(q) for q in range(1, N + 1)])
    elif name == "C2":
        layers = [
            [cnot(a, a + 1) for a in range(1, N, 2)],
            [cnot(a, a - 1) for a in range(3, N + 1, 2)],
        ]
    elif name == "C3":
        # operator product H_1 H_2 CNOT_{1,2}: the CNOT acts first
        layers = [[cnot(1, 2)], [hadamard(1), hadamard(2)]]
    else:
        # operator product H_1 H_2 H_3 CNOT_{1,2} CNOT_{2,3}
        layers = [[cnot(2, 3)], [cnot(1, 2)], [hadamard(1), hadamard(2), hadamard(3)]]
    return Circuit(N, [layer for layer in layers if layer])
