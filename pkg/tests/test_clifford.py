"""Clifford tableaus: algebra, synthesis round trips, sampler uniformity."""

import numpy as np
import pytest

from qcbench import clifford
from qcbench.sim import Gate

_GROUP_SIZES = {1: 24, 2: 11520}  # |Sp(2n, 2)| * 4^n


def _enumerate_group(n):
    """BFS closure of {h, s, cnot} from the identity tableau."""
    gens = []
    for q in range(n):
        gens.append(("h", (q,)))
        gens.append(("s", (q,)))
    for a in range(n):
        for b in range(n):
            if a != b:
                gens.append(("cnot", (a, b)))
    seen = {}
    frontier = [clifford.CliffordTableau.identity(n)]
    seen[frontier[0].key()] = frontier[0]
    while frontier:
        nxt = []
        for t in frontier:
            for kind, qubits in gens:
                u = clifford.apply_gate_kind(t, kind, *qubits)
                if u.key() not in seen:
                    seen[u.key()] = u
                    nxt.append(u)
        frontier = nxt
    return seen


def test_identity_tableau():
    t = clifford.CliffordTableau.identity(2)
    assert t.is_symplectic()
    assert t.is_identity()


def test_gate_tableaus_are_symplectic():
    for kind in ("h", "s", "x", "y", "z"):
        assert clifford.apply_gate_kind(
            clifford.CliffordTableau.identity(1), kind, 0).is_symplectic()
    for kind in ("cnot", "cz"):
        assert clifford.apply_gate_kind(
            clifford.CliffordTableau.identity(2), kind, 0, 1).is_symplectic()


def test_group_sizes():
    assert len(_enumerate_group(1)) == _GROUP_SIZES[1]


def test_compose_matches_sequential_application():
    a = clifford.sample_uniform(2, seed=1, index=0)
    b = clifford.sample_uniform(2, seed=1, index=1)
    ab = clifford.compose(a, b)
    circ_a = clifford.to_circuit(a)
    both = clifford.from_circuit(circ_a)
    for g in clifford.to_circuit(b).gates:
        both = clifford.apply_gate_kind(both, g.kind, *g.targets)
    assert both == ab


@pytest.mark.parametrize("n", [1, 2, 3])
def test_synthesis_round_trip(n):
    for i in range(12):
        t = clifford.sample_uniform(n, seed=9, index=i)
        assert t.is_symplectic()
        circ = clifford.to_circuit(t)
        assert clifford.from_circuit(circ) == t


@pytest.mark.parametrize("n", [1, 2, 3])
def test_invert_round_trip(n):
    for i in range(12):
        t = clifford.sample_uniform(n, seed=5, index=i)
        inv = clifford.invert(t)
        assert clifford.compose(t, inv).is_identity()
        assert clifford.compose(inv, t).is_identity()


def _circuit_unitary(circ):
    u = np.eye(2 ** circ.n_qubits, dtype=complex)
    for g in circ.gates:
        m = g.matrix()
        if len(g.targets) == 1 and circ.n_qubits > 1:
            raise AssertionError("helper supports 1-qubit circuits only")
        u = m @ u
    return u


def _row_matrix(x, z, p):
    mat = (1j ** p) * np.eye(2, dtype=complex)
    if x[0]:
        mat = mat @ Gate("x", (0,)).matrix()
    if z[0]:
        mat = mat @ Gate("z", (0,)).matrix()
    return mat


def test_tableau_matches_unitary_conjugation_n1():
    """Every 1-qubit element: U P U^dag equals the tableau's row Pauli."""
    paulis = {0: Gate("x", (0,)).matrix(), 1: Gate("z", (0,)).matrix()}
    for t in _enumerate_group(1).values():
        u = _circuit_unitary(clifford.to_circuit(t))
        for i, base in paulis.items():
            predicted = _row_matrix(*t.row(i))
            assert np.allclose(u @ base @ u.conj().T, predicted, atol=1e-10)


def test_sampler_determinism():
    a = clifford.sample_uniform(2, seed=3, index=7)
    b = clifford.sample_uniform(2, seed=3, index=7)
    assert a == b
    assert a != clifford.sample_uniform(2, seed=3, index=8)


def test_sampler_rejects_bad_n():
    with pytest.raises(ValueError):
        clifford.sample_uniform(0, seed=0)
    with pytest.raises(ValueError):
        clifford.sample_uniform(4, seed=0)


def test_sampler_uniformity_n1():
    """Exhaustive chi-square over all 24 elements."""
    group = _enumerate_group(1)
    draws = 20000
    counts = {}
    for i in range(draws):
        key = clifford.sample_uniform(1, seed=17, index=i).key()
        assert key in group
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 24
    expected = draws / 24
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    # dof 23: mean 23, sd 6.8; 70 is far beyond any plausible quantile
    assert chi2 < 70.0, f"chi-square {chi2:.1f} too large for uniformity"


def test_sampler_uniformity_n2():
    """Chi-square over all 11520 elements of the 2-qubit group."""
    draws = 300000
    counts = {}
    for i in range(draws):
        key = clifford.sample_uniform(2, seed=23, index=i).key()
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == _GROUP_SIZES[2]
    expected = draws / _GROUP_SIZES[2]
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    dof = _GROUP_SIZES[2] - 1
    bound = dof + 6.0 * np.sqrt(2.0 * dof)   # ~6 sigma above the mean
    assert chi2 < bound, f"chi-square {chi2:.0f} exceeds {bound:.0f}"
