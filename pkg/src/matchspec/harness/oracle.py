"""Cross-check statevector simulation against the free-fermion covariance oracle."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NonGaussianError
from ..fermion import circuit_rotations, evolve_covariance, initial_covariance, z_expectation
from ..gates import Circuit, brickwork, swap
from ..statevector import basis_state

ORACLE_TOL = 1e-10


@dataclass(frozen=True)
class OracleCase:
    index: int
    num_qubits: int
    num_layers: int
    bits: str
    max_error: float
    swap_rejected: bool


@dataclass
class OracleReport:
    cases: list[OracleCase]
    tolerance: float = ORACLE_TOL

    @property
    def max_error(self) -> float:
        return max(c.max_error for c in self.cases)

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance and all(c.swap_rejected for c in self.cases)


def z_profile_statevector(circuit: Circuit, bits: str) -> np.ndarray:
    state = circuit.apply(basis_state(circuit.num_qubits, bits))
    return np.array([state.expectation_z(k) for k in range(1, circuit.num_qubits + 1)])


def z_profile_covariance(circuit: Circuit, bits: str) -> np.ndarray:
    M = evolve_covariance(initial_covariance(bits), circuit_rotations(circuit))
    return np.array([z_expectation(M, k) for k in range(1, circuit.num_qubits + 1)])


def _rejects_swap(circuit: Circuit, rng: np.random.Generator) -> bool:
    n = circuit.num_qubits
    cut = int(rng.integers(0, len(circuit) + 1))
    spliced = Circuit(n, circuit.layers[:cut] + [[swap(int(rng.integers(1, n)))]] + circuit.layers[cut:])
    try:
        circuit_rotations(spliced)
    except NonGaussianError:
        return True
    return False


def run_oracle(seed: int = 0, num_circuits: int = 100, max_qubits: int = 10) -> OracleReport:
    """Random pure-matchgate brickwork circuits on random basis inputs, N <= max_qubits."""
    sizes = list(range(2, max_qubits + 1, 2))
    cases = []
    for i in range(num_circuits):
        rng = np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(i,)))
        n = int(rng.choice(sizes))
        layers = int(rng.integers(1, 3 * n + 1))
        bits = "".join(rng.choice(["0", "1"], size=n))
        circ = brickwork(n, layers, "matchgate", rng)
        err = float(np.max(np.abs(z_profile_statevector(circ, bits) - z_profile_covariance(circ, bits))))
        cases.append(OracleCase(i, n, layers, bits, err, _rejects_swap(circ, rng)))
    return OracleReport(cases)
