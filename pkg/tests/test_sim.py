"""Statevector backend: gate algebra, noise unraveling, measurement."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcbench.sim import (Circuit, Gate, NoiseModel, StateVector, apply_gate,
                         expectation, measurement_basis_change,
                         pauli_eigenvalue, run_circuit, run_noisy)

_SQ2 = 1.0 / math.sqrt(2.0)


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("h", (0, 1))
    with pytest.raises(ValueError):
        Gate("cnot", (0,))
    with pytest.raises(ValueError):
        Gate("cnot", (1, 1))
    with pytest.raises(ValueError):
        Gate("frobnicate", (0,))
    with pytest.raises(ValueError):
        Gate("mphase", (0,), angle=1.0, m=0)
    with pytest.raises(ValueError):
        Gate("rx", (0,), angle=float("nan"))


@given(kind=st.sampled_from(["x", "y", "z", "h", "s", "rz", "rx", "mphase",
                             "cnot", "cz"]),
       angle=st.floats(-10, 10, allow_nan=False),
       m=st.integers(1, 20))
@settings(max_examples=60, deadline=None)
def test_every_gate_matrix_is_unitary(kind, angle, m):
    targets = (0, 1) if kind in ("cnot", "cz") else (0,)
    u = Gate(kind, targets, angle=angle, m=m).matrix()
    assert np.allclose(u @ u.conj().T, np.eye(u.shape[0]), atol=1e-12)


def test_hadamard_makes_plus_state():
    state = run_circuit(Circuit(1).add("h", 0))
    assert np.allclose(state.amps, [_SQ2, _SQ2])


def test_bell_state():
    circ = Circuit(2).add("h", 0).add("cnot", 0, 1)
    state = run_circuit(circ)
    assert np.allclose(state.amps, [_SQ2, 0, 0, _SQ2])
    assert expectation(state, "ZZ") == pytest.approx(1.0)
    assert expectation(state, "XX") == pytest.approx(1.0)
    assert expectation(state, "ZI") == pytest.approx(0.0)


def test_qubit_zero_is_leftmost_bit():
    # X on qubit 0 of two qubits flips the left bit
    out = run_noisy(Circuit(2).add("x", 0), NoiseModel(), seed=0)
    assert out == "10"


def test_expectation_known_values():
    plus = run_circuit(Circuit(1).add("h", 0))
    assert expectation(plus, "X") == pytest.approx(1.0)
    assert expectation(plus, "Z") == pytest.approx(0.0)
    zero = StateVector(1)
    assert expectation(zero, "Z") == pytest.approx(1.0)


def test_rx_rotation_expectation():
    theta = 0.7
    state = run_circuit(Circuit(1).add("rx", 0, angle=theta))
    assert expectation(state, "Z") == pytest.approx(math.cos(theta))


def test_mphase_matrix():
    g = Gate("mphase", (0,), angle=0.3, m=4)
    assert np.allclose(g.matrix(), np.diag([1.0, np.exp(-1.2j)]))


@st.composite
def _random_circuits(draw):
    n = draw(st.integers(1, 3))
    circ = Circuit(n)
    for _ in range(draw(st.integers(0, 12))):
        kind = draw(st.sampled_from(["x", "y", "z", "h", "s", "rz", "rx",
                                     "cnot", "cz"]))
        if kind in ("cnot", "cz") and n >= 2:
            q = draw(st.integers(0, n - 2))
            circ.add(kind, q, q + 1)
        elif kind not in ("cnot", "cz"):
            circ.add(kind, draw(st.integers(0, n - 1)),
                     angle=draw(st.floats(-math.pi, math.pi)))
    return circ


@given(_random_circuits())
@settings(max_examples=40, deadline=None)
def test_circuits_preserve_norm(circ):
    state = run_circuit(circ)
    assert np.sum(np.abs(state.amps) ** 2) == pytest.approx(1.0, abs=1e-10)


def test_basis_change_diagonalises_pauli():
    # |+> measured in the X basis is deterministically "0"
    circ = Circuit(1).add("h", 0)
    circ.extend(measurement_basis_change("X"))
    for shot in range(20):
        assert run_noisy(circ, NoiseModel(), seed=3, shot=shot) == "0"
    # (|0> + i|1>)/sqrt(2) measured in the Y basis likewise
    circ = Circuit(1).add("h", 0).add("s", 0)
    circ.extend(measurement_basis_change("Y"))
    for shot in range(20):
        assert run_noisy(circ, NoiseModel(), seed=3, shot=shot) == "0"


def test_pauli_eigenvalue_parity():
    assert pauli_eigenvalue("00", "ZZ") == 1
    assert pauli_eigenvalue("01", "ZZ") == -1
    assert pauli_eigenvalue("11", "ZZ") == 1
    assert pauli_eigenvalue("01", "ZI") == 1   # identity support ignored
    assert pauli_eigenvalue("10", "ZI") == -1


def test_run_noisy_deterministic_per_shot():
    circ = Circuit(2).add("h", 0).add("cnot", 0, 1)
    noise = NoiseModel(depolarizing_prob=0.1, measurement_flip_prob=0.05)
    a = [run_noisy(circ, noise, seed=5, shot=s) for s in range(30)]
    b = [run_noisy(circ, noise, seed=5, shot=s) for s in range(30)]
    assert a == b
    assert len(set(a)) > 1  # shots differ from each other


def test_measurement_flip_prob_one_inverts_bits():
    circ = Circuit(2).add("x", 0)
    noise = NoiseModel(measurement_flip_prob=1.0)
    assert run_noisy(circ, noise, seed=0) == "01"


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(depolarizing_prob=1.5)
    with pytest.raises(ValueError):
        NoiseModel(measurement_flip_prob=-0.1)


def test_statevector_norm_check():
    with pytest.raises(ValueError):
        StateVector(1, np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        StateVector(1, np.array([1.0, 0.0, 0.0]))


def test_apply_gate_target_range():
    with pytest.raises(ValueError):
        apply_gate(StateVector(1), Gate("x", (1,)))


def test_circuit_add_checks_targets():
    circ = Circuit(2)
    with pytest.raises(ValueError):
        circ.add("h", 2)
    assert len(circ) == 0
