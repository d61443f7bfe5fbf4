"""Symplectic tableau representation of n-qubit Clifford elements.

A tableau stores the conjugation image of each generator X_j and Z_j as a
Pauli row (x bits, z bits, phase exponent p mod 4), where a row encodes
i^p * prod_j X_j^{x_j} * prod_j Z_j^{z_j}. Hermitian rows have sign
(-1)^{(p - #Y) / 2}. Global phase is not tracked.

Uniform sampling builds the symplectic matrix pair-by-pair with a
Gram-Schmidt construction on the symplectic complement, then draws the 2n
sign bits uniformly; this is uniform over the Clifford group mod phase
(order |Sp(2n,2)| * 4^n).
"""

import numpy as np

from . import rng as _rng
from .sim import Circuit, Gate

MAX_N = 3


def _sp(u: np.ndarray, v: np.ndarray) -> int:
    """Binary symplectic form on length-2n (x|z) vectors."""
    n = len(u) // 2
    return int((u[:n] @ v[n:] + u[n:] @ v[:n]) % 2)


class CliffordTableau:
    def __init__(self, n: int, xs: np.ndarray, zs: np.ndarray, phases: np.ndarray):
        self.n = n
        self.xs = np.asarray(xs, dtype=np.uint8) % 2     # (2n, n)
        self.zs = np.asarray(zs, dtype=np.uint8) % 2     # (2n, n)
        self.phases = np.asarray(phases, dtype=np.int64) % 4  # (2n,)

    @classmethod
    def identity(cls, n: int) -> "CliffordTableau":
        eye = np.eye(n, dtype=np.uint8)
        zero = np.zeros((n, n), dtype=np.uint8)
        xs = np.vstack([eye, zero])
        zs = np.vstack([zero, eye])
        return cls(n, xs, zs, np.zeros(2 * n, dtype=np.int64))

    def row(self, i: int):
        return self.xs[i].copy(), self.zs[i].copy(), int(self.phases[i])

    def coord_matrix(self) -> np.ndarray:
        """2n x 2n binary matrix of row coordinates, columns (x | z)."""
        return np.hstack([self.xs, self.zs]).astype(np.uint8)

    def is_symplectic(self) -> bool:
        m = self.coord_matrix()
        n = self.n
        for i in range(2 * n):
            for j in range(i, 2 * n):
                want = 1 if j == i + n else 0
                if _sp(m[i], m[j]) != want:
                    return False
        return True

    def is_identity(self) -> bool:
        ident = CliffordTableau.identity(self.n)
        return self == ident

    def __eq__(self, other):
        return (isinstance(other, CliffordTableau)
                and self.n == other.n
                and np.array_equal(self.xs, other.xs)
                and np.array_equal(self.zs, other.zs)
                and np.array_equal(self.phases, other.phases))

    def key(self) -> bytes:
        return (self.xs.tobytes() + self.zs.tobytes()
                + self.phases.astype(np.uint8).tobytes())

    def __hash__(self):
        return hash(self.key())


def _rowmul(r1, r2):
    """Product of two Pauli rows (left * right)."""
    x1, z1, p1 = r1
    x2, z2, p2 = r2
    # moving X^{x2} left past Z^{z1} costs (-1)^{z1.x2}
    p = (p1 + p2 + 2 * int(z1 @ x2)) % 4
    return (x1 ^ x2, z1 ^ z2, p)


def _push_row(row, t: CliffordTableau):
    """Image of a Pauli row under the Clifford t."""
    x, z, p = row
    n = t.n
    acc = (np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8), p)
    for j in range(n):
        if x[j]:
            acc = _rowmul(acc, t.row(j))
    for j in range(n):
        if z[j]:
            acc = _rowmul(acc, t.row(n + j))
    return acc


def compose(a: CliffordTableau, b: CliffordTableau) -> CliffordTableau:
    """Tableau of b after a (a applied first)."""
    if a.n != b.n:
        raise ValueError("tableau dimensions differ")
    n = a.n
    xs = np.zeros((2 * n, n), dtype=np.uint8)
    zs = np.zeros((2 * n, n), dtype=np.uint8)
    ph = np.zeros(2 * n, dtype=np.int64)
    for i in range(2 * n):
        x, z, p = _push_row(a.row(i), b)
        xs[i], zs[i], ph[i] = x, z, p
    return CliffordTableau(n, xs, zs, ph)


def _gate_tableau(n: int, kind: str, *qubits) -> CliffordTableau:
    t = CliffordTableau.identity(n)
    if kind == "h":
        (q,) = qubits
        t.xs[q], t.zs[q] = t.zs[q].copy(), t.xs[q].copy()
        t.xs[n + q], t.zs[n + q] = t.zs[n + q].copy(), t.xs[n + q].copy()
    elif kind == "s":
        (q,) = qubits
        t.zs[q][q] = 1          # X -> Y = i X Z
        t.phases[q] = 1
    elif kind == "x":
        (q,) = qubits
        t.phases[n + q] = 2     # Z -> -Z
    elif kind == "y":
        (q,) = qubits
        t.phases[q] = 2
        t.phases[n + q] = 2
    elif kind == "z":
        (q,) = qubits
        t.phases[q] = 2         # X -> -X
    elif kind == "cnot":
        c, tq = qubits
        t.xs[c][tq] = 1         # X_c -> X_c X_t
        t.zs[n + tq][c] = 1     # Z_t -> Z_c Z_t
    elif kind == "cz":
        c, tq = qubits
        t.zs[c][tq] = 1         # X_c -> X_c Z_t
        t.zs[tq][c] = 1         # X_t -> Z_c X_t
    else:
        raise ValueError(f"no tableau for gate kind {kind!r}")
    return t


def apply_gate_kind(t: CliffordTableau, kind: str, *qubits) -> CliffordTableau:
    """Conjugation update: gate applied after the map t."""
    return compose(t, _gate_tableau(t.n, kind, *qubits))


def from_circuit(circuit: Circuit) -> CliffordTableau:
    """Tableau of a circuit over Clifford gates (h, s, cnot, cz, x, y, z)."""
    t = CliffordTableau.identity(circuit.n_qubits)
    for g in circuit.gates:
        t = apply_gate_kind(t, g.kind, *g.targets)
    return t


def _independent_rows(vectors, want: int):
    """Select `want` GF(2)-independent vectors by row reduction."""
    basis = []
    pivot_rows = {}
    for v in vectors:
        w = v.copy()
        while True:
            nz = np.flatnonzero(w)
            if len(nz) == 0:
                break
            piv = int(nz[0])
            if piv in pivot_rows:
                w = w ^ pivot_rows[piv]
            else:
                pivot_rows[piv] = w.copy()
                basis.append(v)
                break
        if len(basis) == want:
            return basis
    raise AssertionError("projected span has unexpected dimension")


def sample_uniform(n: int, seed: int, index: int = 0) -> CliffordTableau:
    """Uniform n-qubit Clifford element (mod global phase), 1 <= n <= 3."""
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be in [1, {MAX_N}]")
    gen = _rng.substream(seed, index)
    basis = [np.eye(2 * n, dtype=np.uint8)[i] for i in range(2 * n)]
    pairs = []
    for _ in range(n):
        m = len(basis)
        while True:
            coeffs = gen.integers(0, 2, size=m).astype(np.uint8)
            if coeffs.any():
                break
        a = np.zeros(2 * n, dtype=np.uint8)
        for c, v in zip(coeffs, basis):
            if c:
                a ^= v
        # anchor vector with <a, d> = 1 (exists: form is non-degenerate here)
        d = next(v for v in basis if _sp(a, v) == 1)
        coeffs2 = gen.integers(0, 2, size=m).astype(np.uint8)
        w = np.zeros(2 * n, dtype=np.uint8)
        for c, v in zip(coeffs2, basis):
            if c:
                w ^= v
        b = w if _sp(a, w) == 1 else (w ^ d)
        pairs.append((a, b))
        if m > 2:
            projected = []
            for v in basis:
                pv = v.copy()
                if _sp(v, b):
                    pv = pv ^ a
                if _sp(v, a):
                    pv = pv ^ b
                projected.append(pv)
            basis = _independent_rows(projected, m - 2)
        else:
            basis = []
    xs = np.zeros((2 * n, n), dtype=np.uint8)
    zs = np.zeros((2 * n, n), dtype=np.uint8)
    ph = np.zeros(2 * n, dtype=np.int64)
    sign_bits = gen.integers(0, 2, size=2 * n)
    for j, (a, b) in enumerate(pairs):
        for i, vec in ((j, a), (n + j, b)):
            xs[i], zs[i] = vec[:n], vec[n:]
            n_y = int(np.sum(xs[i] & zs[i]))
            ph[i] = (n_y + 2 * int(sign_bits[i])) % 4
    return CliffordTableau(n, xs, zs, ph)


def _synthesis_ops(a: CliffordTableau):
    """Gate ops reducing a to the identity tableau (applied in order)."""
    t = CliffordTableau(a.n, a.xs.copy(), a.zs.copy(), a.phases.copy())
    n = t.n
    ops = []

    def emit(kind, *qubits):
        nonlocal t
        ops.append((kind, qubits))
        t = apply_gate_kind(t, kind, *qubits)

    for j in range(n):
        # pivot: make X_j image have an x bit on column j
        if not any(t.xs[j][k] for k in range(j, n)):
            k = next(k for k in range(j, n) if t.zs[j][k])
            emit("h", k)
        k = next(k for k in range(j, n) if t.xs[j][k])
        if k != j:
            emit("cnot", j, k)
            emit("cnot", k, j)
            emit("cnot", j, k)
        # clear remaining x bits of the X_j image
        for k in range(n):
            if k != j and t.xs[j][k]:
                emit("cnot", j, k)
        # clear z bits of the X_j image
        if t.zs[j][j]:
            emit("s", j)
        for k in range(n):
            if k != j and t.zs[j][k]:
                emit("h", k)
                emit("cnot", j, k)
                emit("h", k)
        # now fix the Z_j image (row n + j); its z_j bit is forced to 1
        r = n + j
        assert t.zs[r][j] == 1
        if t.xs[r][j]:
            emit("h", j)
            emit("s", j)
            emit("h", j)
        for k in range(j + 1, n):
            if t.xs[r][k]:
                if t.zs[r][k]:
                    emit("s", k)
                emit("h", k)
        for k in range(j + 1, n):
            if t.zs[r][k]:
                emit("cnot", k, j)
    # coordinate part is identity; clear the leftover signs with Paulis
    for j in range(n):
        if t.phases[j] % 4 == 2:
            emit("s", j)
            emit("s", j)
        if t.phases[n + j] % 4 == 2:
            emit("h", j)
            emit("s", j)
            emit("s", j)
            emit("h", j)
    assert t.is_identity()
    return ops


def _inverse_op(op):
    kind, qubits = op
    if kind == "s":
        return [("s", qubits)] * 3
    return [op]  # h and cnot are involutions


def to_circuit(a: CliffordTableau) -> Circuit:
    """Circuit over {h, s, cnot} realizing a up to global phase."""
    ops = _synthesis_ops(a)
    circ = Circuit(a.n)
    for op in reversed(ops):
        for kind, qubits in _inverse_op(op):
            circ.add(kind, *qubits)
    return circ


def invert(a: CliffordTableau) -> CliffordTableau:
    """Exact group inverse."""
    # the synthesis ops satisfy g_K o ... o g_1 o a = id, so
    # a^{-1} = g_K o ... o g_1
    t = CliffordTableau.identity(a.n)
    for kind, qubits in _synthesis_ops(a):
        t = apply_gate_kind(t, kind, *qubits)
    return t
