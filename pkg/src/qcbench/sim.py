"""Minimal seeded statevector simulator with stochastic Pauli noise.

Depolarizing noise is unraveled as random Pauli insertion after each gate
(one independent coin per involved qubit), which keeps memory at 2^n
amplitudes. Qubit 0 is the leftmost bit of the output string.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import rng as _rng

MAX_QUBITS = 12

_SQ2 = 1.0 / np.sqrt(2.0)

_H = np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_CNOT = np.array([[1, 0, 0, 0],
                  [0, 1, 0, 0],
                  [0, 0, 0, 1],
                  [0, 0, 1, 0]], dtype=complex)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)

PAULI_MATRICES = {"I": np.eye(2, dtype=complex), "X": _X, "Y": _Y, "Z": _Z}

ONE_QUBIT_KINDS = {"x", "y", "z", "h", "s", "rz", "rx", "mphase"}
TWO_QUBIT_KINDS = {"cnot", "cz"}


@dataclass(frozen=True)
class Gate:
    """A gate in a circuit.

    kind: one of x, y, z, h, s (phase gate), cnot, cz, rz, rx,
    or mphase -- the diag(1, exp(-i*M*theta)) rotation used by the phase
    estimation circuit, parameterised by integer depth m and angle theta.
    """
    kind: str
    targets: tuple
    angle: float = 0.0
    m: int = 1

    def __post_init__(self):
        if self.kind in ONE_QUBIT_KINDS:
            if len(self.targets) != 1:
                raise ValueError(f"{self.kind} takes one target")
        elif self.kind in TWO_QUBIT_KINDS:
            if len(self.targets) != 2 or self.targets[0] == self.targets[1]:
                raise ValueError(f"{self.kind} takes two distinct targets")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if not np.isfinite(self.angle):
            raise ValueError("gate angle must be finite")
        if self.kind == "mphase" and self.m < 1:
            raise ValueError("mphase depth m must be a positive integer")

    def matrix(self) -> np.ndarray:
        if self.kind == "x":
            return _X
        if self.kind == "y":
            return _Y
        if self.kind == "z":
            return _Z
        if self.kind == "h":
            return _H
        if self.kind == "s":
            return _S
        if self.kind == "cnot":
            return _CNOT
        if self.kind == "cz":
            return _CZ
        if self.kind == "rz":
            a = self.angle / 2.0
            return np.diag([np.exp(-1j * a), np.exp(1j * a)])
        if self.kind == "rx":
            c, s = np.cos(self.angle / 2.0), np.sin(self.angle / 2.0)
            return np.array([[c, -1j * s], [-1j * s, c]])
        # mphase: diag(1, e^{-i m theta})
        return np.diag([1.0, np.exp(-1j * self.m * self.angle)])

    def is_parameterised(self) -> bool:
        return self.kind in ("rz", "rx", "mphase")


@dataclass
class Circuit:
    n_qubits: int
    gates: list = field(default_factory=list)

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}]")
        for g in self.gates:
            self._check(g)

    def _check(self, gate: Gate):
        for t in gate.targets:
            if not 0 <= t < self.n_qubits:
                raise ValueError(f"gate target {t} out of range")

    def add(self, kind, *targets, angle=0.0, m=1):
        g = Gate(kind, tuple(targets), angle=angle, m=m)
        self._check(g)
        self.gates.append(g)
        return self

    def extend(self, gates):
        for g in gates:
            self._check(g)
            self.gates.append(g)
        return self

    def __len__(self):
        return len(self.gates)


@dataclass(frozen=True)
class NoiseModel:
    depolarizing_prob: float = 0.0
    measurement_flip_prob: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.depolarizing_prob <= 1.0:
            raise ValueError("depolarizing_prob must be in [0, 1]")
        if not 0.0 <= self.measurement_flip_prob <= 1.0:
            raise ValueError("measurement_flip_prob must be in [0, 1]")


NOISELESS = NoiseModel()


class StateVector:
    """2^n complex amplitudes, kept normalized to 1e-10."""

    def __init__(self, n_qubits: int, amps: np.ndarray | None = None):
        if not 1 <= n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}]")
        self.n = n_qubits
        if amps is None:
            amps = np.zeros(2 ** n_qubits, dtype=complex)
            amps[0] = 1.0
        else:
            amps = np.asarray(amps, dtype=complex)
            if amps.shape != (2 ** n_qubits,):
                raise ValueError("amplitude array has wrong length")
        self.amps = amps
        self._check_norm()

    def _check_norm(self):
        nrm = np.sum(np.abs(self.amps) ** 2)
        if abs(nrm - 1.0) > 1e-10:
            raise ValueError(f"state norm {nrm} deviates from 1")

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


def _apply_matrix(amps: np.ndarray, mat: np.ndarray, targets, n: int) -> np.ndarray:
    k = len(targets)
    if k == 1:
        if n == 1:
            return mat @ amps
        # single-qubit fast path: slice arithmetic instead of moveaxis
        t = targets[0]
        tensor = amps.reshape(1 << t, 2, -1)
        a0, a1 = tensor[:, 0, :], tensor[:, 1, :]
        out = np.empty_like(tensor)
        out[:, 0, :] = mat[0, 0] * a0 + mat[0, 1] * a1
        out[:, 1, :] = mat[1, 0] * a0 + mat[1, 1] * a1
        return out.reshape(-1)
    tensor = amps.reshape([2] * n)
    tensor = np.moveaxis(tensor, targets, range(k))
    shaped = tensor.reshape(2 ** k, -1)
    shaped = mat @ shaped
    tensor = shaped.reshape([2] * n)
    tensor = np.moveaxis(tensor, range(k), targets)
    return np.ascontiguousarray(tensor).reshape(-1)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply one gate, returning a new state."""
    for t in gate.targets:
        if not 0 <= t < state.n:
            raise ValueError(f"gate target {t} out of range")
    amps = _apply_matrix(state.amps, gate.matrix(), list(gate.targets), state.n)
    return StateVector(state.n, amps)


def run_circuit(circuit: Circuit) -> StateVector:
    """Noiseless statevector of the circuit applied to |0...0>."""
    amps = np.zeros(2 ** circuit.n_qubits, dtype=complex)
    amps[0] = 1.0
    for g in circuit.gates:
        amps = _apply_matrix(amps, g.matrix(), list(g.targets), circuit.n_qubits)
    return StateVector(circuit.n_qubits, amps)


_PAULI_CHOICES = (_X, _Y, _Z)


@lru_cache(maxsize=4096)
def _gate_matrix(gate: Gate) -> np.ndarray:
    return gate.matrix()


def run_noisy(circuit: Circuit, noise: NoiseModel, seed: int,
              shot: int = 0) -> str:
    """Execute one noisy shot and return the measured bitstring.

    After each gate, each involved qubit independently suffers a uniformly
    random non-identity Pauli with probability depolarizing_prob. Readout
    bits flip independently with measurement_flip_prob. Deterministic for a
    given (circuit, noise, seed, shot).
    """
    gen = _rng.substream(seed, shot)
    n = circuit.n_qubits
    amps = np.zeros(2 ** n, dtype=complex)
    amps[0] = 1.0
    p = noise.depolarizing_prob
    if p > 0.0:
        coins = gen.random(sum(len(g.targets) for g in circuit.gates))
    ci = 0
    for g in circuit.gates:
        amps = _apply_matrix(amps, _gate_matrix(g), g.targets, n)
        if p > 0.0:
            for q in g.targets:
                if coins[ci] < p:
                    pauli = _PAULI_CHOICES[gen.integers(3)]
                    amps = _apply_matrix(amps, pauli, (q,), n)
                ci += 1
    probs = np.abs(amps) ** 2
    probs /= probs.sum()
    idx = int(np.searchsorted(np.cumsum(probs), gen.random()))
    idx = min(idx, 2 ** n - 1)
    bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
    if noise.measurement_flip_prob > 0.0:
        flips = gen.random(n) < noise.measurement_flip_prob
        bits = [b ^ int(f) for b, f in zip(bits, flips)]
    return "".join(str(b) for b in bits)


def expectation(state: StateVector, pauli_string) -> float:
    """Exact <psi|P|psi> for a tensor product of single-qubit Paulis."""
    paulis = list(pauli_string)
    if len(paulis) != state.n:
        raise ValueError("pauli string length must equal qubit count")
    amps = state.amps
    for q, label in enumerate(paulis):
        if label == "I":
            continue
        amps = _apply_matrix(amps, PAULI_MATRICES[label], [q], state.n)
    return float(np.real(np.vdot(state.amps, amps)))


def measurement_basis_change(pauli_string) -> list:
    """Gates rotating each non-identity Pauli into the Z basis."""
    gates = []
    for q, label in enumerate(pauli_string):
        if label == "X":
            gates.append(Gate("h", (q,)))
        elif label == "Y":
            # S^dagger then H
            gates.append(Gate("s", (q,)))
            gates.append(Gate("s", (q,)))
            gates.append(Gate("s", (q,)))
            gates.append(Gate("h", (q,)))
    return gates


def pauli_eigenvalue(bitstring: str, pauli_string) -> int:
    """Eigenvalue (+/-1) of the measured outcome on the Pauli's support."""
    parity = 0
    for q, label in enumerate(pauli_string):
        if label != "I" and bitstring[q] == "1":
            parity ^= 1
    return -1 if parity else 1
