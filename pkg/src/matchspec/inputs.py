"""Input-state families: basis states, real-rotation products, Haar blocks."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .statevector import Statevector, basis_state, product_state


class InputKind(str, enum.Enum):
    COMPUTATIONAL_BASIS = "computational_basis"
    RANDOM_REAL_PRODUCT = "random_real_product"
    HAAR_BLOCKS = "haar_blocks"


@dataclass(frozen=True)
class InputSpec:
    kind: InputKind = InputKind.RANDOM_REAL_PRODUCT
    k: int = 1
    bits: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", InputKind(self.kind))
        if self.kind is InputKind.HAAR_BLOCKS and self.k not in (1, 2, 3, 4):
            raise ConfigurationError(f"block size k={self.k} not in 1..4")
        if self.kind is InputKind.COMPUTATIONAL_BASIS and self.bits is None:
            raise ConfigurationError("computational_basis input needs a bit string")

    def validate(self, num_qubits: int) -> None:
        if self.kind is InputKind.HAAR_BLOCKS and num_qubits % self.k:
            raise ConfigurationError(f"block size {self.k} does not divide N={num_qubits}")
        if self.kind is InputKind.COMPUTATIONAL_BASIS and len(self.bits) != num_qubits:
            raise ConfigurationError("bit string length differs from N")

    @property
    def label(self) -> str:
        if self.kind is InputKind.HAAR_BLOCKS:
            return f"haar_blocks_k{self.k}"
        return self.kind.value

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.kind is InputKind.HAAR_BLOCKS:
            d["k"] = self.k
        if self.kind is InputKind.COMPUTATIONAL_BASIS:
            d["bits"] = self.bits
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "InputSpec":
        unknown = set(d) - {"kind", "k", "bits"}
        if unknown:
            raise ConfigurationError(f"unknown input keys: {sorted(unknown)}")
        try:
            kind = InputKind(d.get("kind", "random_real_product"))
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None
        return cls(kind, int(d.get("k", 1)), d.get("bits"))


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]])


def random_real_product(num_qubits: int, rng: np.random.Generator) -> Statevector:
    # R_y(theta)|0> = (cos(theta/2), sin(theta/2))
    theta = rng.uniform(0.0, 2 * np.pi, size=num_qubits)
    return product_state([np.array([np.cos(t / 2), np.sin(t / 2)]) for t in theta])


def haar_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def haar_blocks(num_qubits: int, k: int, rng: np.random.Generator) -> Statevector:
    if num_qubits % k:
        raise ConfigurationError(f"block size {k} does not divide N={num_qubits}")
    return product_state([haar_state(2**k, rng) for _ in range(num_qubits // k)])


def prepare(spec: InputSpec, num_qubits: int, rng: np.random.Generator | None = None) -> Statevector:
    spec.validate(num_qubits)
    if spec.kind is InputKind.COMPUTATIONAL_BASIS:
        return basis_state(num_qubits, spec.bits)
    if rng is None:
        raise ConfigurationError("random inputs need an RNG")
    if spec.kind is InputKind.RANDOM_REAL_PRODUCT:
        return random_real_product(num_qubits, rng)
    return haar_blocks(num_qubits, spec.k, rng)
