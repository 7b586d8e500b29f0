import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matchspec.errors import ConfigurationError, InvalidMatchgateError
from matchspec.fermion import local_pauli_decomposition
from matchspec.gates import (
    CNOT_12, H, I2, NUM_CLIFFORD_CODES, NUM_TWO_QUBIT_CLIFFORDS, SWAP, X, Z, Circuit, MatchgateParams,
    brickwork, clifford_code_probability, clifford_from_code, cnot, conjugation_circuit, hadamard,
    haar_unitaries, layer_matrices, matchgate, matchgate_blocks, phase_normalized_key, random_haar_two_qubit,
    random_layer, random_matchgate, random_su2, random_two_qubit_clifford, sample_clifford_codes,
    swap_injection,
)
from matchspec.statevector import LocalUnitary, Statevector, basis_state, embed

ZZ = np.kron(Z, Z)


def test_matchgate_identity_and_xx():
    assert np.array_equal(matchgate(MatchgateParams(I2, I2)).matrix, np.eye(4))
    assert np.allclose(matchgate(MatchgateParams(X, X)).matrix, np.kron(X, X))


def test_swap_is_not_a_matchgate():
    with pytest.raises(InvalidMatchgateError):
        MatchgateParams(I2, X)


def test_matchgate_blocks_round_trip():
    rng = np.random.default_rng(0)
    G = random_matchgate(rng).matrix
    A, B = matchgate_blocks(G)
    assert np.allclose(matchgate(MatchgateParams(A, B)).matrix, G)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_su2_properties(seed):
    U = random_su2(np.random.default_rng(seed))
    assert np.max(np.abs(U.conj().T @ U - I2)) <= 1e-12
    assert abs(np.linalg.det(U) - 1) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_matchgate_parity_and_determinant(seed):
    G = random_matchgate(np.random.default_rng(seed)).matrix
    assert np.max(np.abs(G @ ZZ @ G.conj().T - ZZ)) <= 1e-12
    A, B = matchgate_blocks(G)
    assert abs(np.linalg.det(A) - np.linalg.det(B)) <= 1e-10
    out = G @ np.array([1, 0, 0, 0])
    assert np.allclose(out[1:3], 0)


def test_random_matchgate_is_seed_deterministic():
    a = random_matchgate(np.random.default_rng(42)).matrix
    b = random_matchgate(np.random.default_rng(42)).matrix
    assert np.array_equal(a, b)


def test_haar_first_entry_moments():
    rng = np.random.default_rng(123)
    u2 = np.array([abs(random_su2(rng)[0, 0]) ** 2 for _ in range(20000)])
    assert abs(u2.mean() - 0.5) < 0.01
    u4 = np.abs(haar_unitaries(rng, 4, 100_000)[:, 0, 0]) ** 2
    assert abs(u4.mean() - 0.25) < 0.01


def test_random_haar_two_qubit():
    U = random_haar_two_qubit(np.random.default_rng(9)).matrix
    assert np.max(np.abs(U.conj().T @ U - np.eye(4))) <= 1e-11
    assert np.array_equal(U, random_haar_two_qubit(np.random.default_rng(9)).matrix)


# -- Cliffords -----------------------------------------------------------------


@pytest.fixture(scope="module")
def clifford_classes():
    """Enumeration oracle: code -> class id and per-class probability."""
    keys, class_of = {}, np.empty(NUM_CLIFFORD_CODES, dtype=np.int64)
    for code in range(NUM_CLIFFORD_CODES):
        k = phase_normalized_key(clifford_from_code(code))
        class_of[code] = keys.setdefault(k, len(keys))
    prob = np.zeros(len(keys))
    np.add.at(prob, class_of, [clifford_code_probability(c) for c in range(NUM_CLIFFORD_CODES)])
    return class_of, prob


def test_enumeration_finds_all_cliffords(clifford_classes):
    class_of, prob = clifford_classes
    assert prob.size == NUM_TWO_QUBIT_CLIFFORDS
    assert abs(prob.sum() - 1) < 1e-12
    assert np.allclose(prob, 1 / NUM_TWO_QUBIT_CLIFFORDS, rtol=1e-12, atol=0)


def test_sampler_uniform_chi_square(clifford_classes):
    class_of, _ = clifford_classes
    n = 1_000_000
    codes = sample_clifford_codes(np.random.default_rng(2024), n)
    counts = np.bincount(class_of[codes], minlength=NUM_TWO_QUBIT_CLIFFORDS)
    assert np.count_nonzero(counts) == NUM_TWO_QUBIT_CLIFFORDS
    expected = n / NUM_TWO_QUBIT_CLIFFORDS
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    df = NUM_TWO_QUBIT_CLIFFORDS - 1
    assert abs(chi2 - df) < 5 * np.sqrt(2 * df)
    assert np.max(np.abs(counts - expected)) < 5 * np.sqrt(expected)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_clifford_maps_paulis_to_paulis(seed):
    U = random_two_qubit_clifford(np.random.default_rng(seed)).matrix
    for P in (np.kron(Z, I2), np.kron(X, I2), np.kron(I2, Z), np.kron(I2, X)):
        img = U @ P @ U.conj().T
        assert local_pauli_decomposition(img, atol=1e-12) is not None


def test_clifford_matrices_are_read_only():
    with pytest.raises(ValueError):
        clifford_from_code(5)[0, 0] = 0


def test_named_gates():
    assert np.allclose(cnot(1, 2).matrix, CNOT_12)
    c21 = cnot(2, 1)
    assert c21.site == 1
    assert np.allclose(c21.matrix @ np.array([0, 1, 0, 0]), [0, 0, 0, 1])
    with pytest.raises(ConfigurationError):
        cnot(1, 3)


# -- circuits ------------------------------------------------------------------


def test_circuit_rejects_overlapping_gates():
    with pytest.raises(ConfigurationError):
        Circuit(3, [[LocalUnitary(SWAP, 1), LocalUnitary(SWAP, 2)]])
    with pytest.raises(ConfigurationError):
        Circuit(3, [[LocalUnitary(SWAP, 3)]])


def test_brickwork_schedule():
    c = brickwork(4, 2, "matchgate", np.random.default_rng(0))
    assert [g.qubits for g in c.layers[0]] == [(1, 2), (3, 4)]
    assert [g.qubits for g in c.layers[1]] == [(2, 3)]


def test_zero_layers_is_empty():
    c = brickwork(6, 0, "haar", np.random.default_rng(0))
    s = basis_state(6, "101010")
    assert len(c) == 0 and np.array_equal(c.apply(s).amplitudes, s.amplitudes)


def test_brickwork_needs_even_n():
    with pytest.raises(ConfigurationError):
        brickwork(5, 2, "matchgate", np.random.default_rng(0))


@pytest.mark.parametrize("kind", ["matchgate", "clifford", "haar"])
def test_layer_sampler_matches_circuit_sampler(kind):
    a = [m for _, m in layer_matrices(8, 3, kind, np.random.default_rng(5))]
    b = [g.matrix for g in random_layer(8, 3, kind, np.random.default_rng(5))]
    assert all(np.array_equal(x, y) for x, y in zip(a, b)) and len(a) == len(b) == 3


@pytest.mark.parametrize("n", [2, 4, 6])
def test_brickwork_matches_dense_unitary(n):
    rng = np.random.default_rng(n)
    c = brickwork(n, 5, "matchgate", rng)
    dense = np.eye(2**n, dtype=complex)
    for layer in c.layers:
        L = np.eye(1)
        q = 1
        for g in sorted(layer, key=lambda g: g.site):
            L = np.kron(L, np.eye(2 ** (g.site - q)))
            L = np.kron(L, g.matrix)
            q = g.site + 2
        L = np.kron(L, np.eye(2 ** (n + 1 - q)))
        dense = L @ dense
    psi = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    psi /= np.linalg.norm(psi)
    assert np.allclose(c.apply(Statevector(n, psi)).amplitudes, dense @ psi, atol=1e-12)
    assert np.allclose(c.unitary(), dense, atol=1e-12)


def test_circuit_json_round_trip():
    c = brickwork(4, 3, "clifford", np.random.default_rng(1)) + swap_injection(4, 2)
    back = Circuit.from_json(c.to_json())
    assert back.num_qubits == 4 and len(back) == len(c)
    assert all(a.site == b.site and np.array_equal(a.matrix, b.matrix) for a, b in zip(c.gates(), back.gates()))


def test_swap_injection_patterns():
    sites = lambda c: [[g.qubits for g in layer] for layer in c.layers]  # noqa: E731
    assert sites(swap_injection(6, 1)) == [[(1, 2)]]
    assert sites(swap_injection(6, 3)) == [[(1, 2), (3, 4), (5, 6)]]
    assert sites(swap_injection(6, 4)) == [[(1, 2), (3, 4), (5, 6)], [(2, 3)]]
    with pytest.raises(ConfigurationError):
        swap_injection(6, 6)


def test_conjugation_examples():
    plus = np.full(4, 0.5)
    for name in ("C1", "C3"):
        out = conjugation_circuit(name, 2).apply(basis_state(2, "00")).amplitudes
        assert np.allclose(out, plus)


def test_c2_is_a_permutation():
    U = conjugation_circuit("C2", 6).unitary()
    assert np.all(np.count_nonzero(np.abs(U) > 1e-12, axis=0) == 1)
    assert set(np.round(U[np.abs(U) > 1e-12].real, 12)) <= {1.0, -1.0}


def test_conjugation_minimum_sizes():
    with pytest.raises(ConfigurationError):
        conjugation_circuit("C4", 2)
    with pytest.raises(ConfigurationError):
        conjugation_circuit("C5", 4)


def test_c1_structure():
    c = conjugation_circuit("C1", 4)
    assert [g.qubits for g in c.gates()][:3] == [(1, 2), (2, 3), (3, 4)]
    assert all(np.allclose(g.matrix, H) for g in c.layers[-1])


def test_hadamard_site():
    assert hadamard(3).qubits == (3,)
    assert np.allclose(embed(H, 1, 1), H)
