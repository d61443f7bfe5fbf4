"""Zero-noise extrapolation.

Noise amplification is either unitary folding (random Clifford identity
blocks U U-dagger inserted between layers, each gate being a layer) or
parameter scaling (Gaussian perturbation of rotation angles). The folding
noise level lambda is a measured circuit property: total gate applications
divided by the base gate count. For parameter scaling lambda maps to the
perturbation variance through a configurable reference sigma0^2 via
lambda = 1 + sigma^2 / sigma0^2.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng as _rng
from .sim import (Circuit, Gate, NoiseModel, measurement_basis_change,
                  pauli_eigenvalue, run_noisy)

_BLOCK_DOMAIN = 0x2E01
_PERTURB_DOMAIN = 0x2E02
_SHOT_DOMAIN = 0x2E03

UNITARY_FOLDING = "unitary_folding"
PARAMETER_SCALING = "parameter_scaling"


@dataclass
class NoiseScaledEnsemble:
    base_circuit: Circuit
    method: str = UNITARY_FOLDING
    levels: tuple = (1.0, 1.5, 2.0, 3.0, 5.0)
    shots_per_level: int = 1000
    noise: NoiseModel = field(default_factory=NoiseModel)
    seed: int = 0
    sigma0_sq: float = 0.01  # parameter-scaling reference variance

    def __post_init__(self):
        levels = tuple(float(x) for x in self.levels)
        if len(set(levels)) != len(levels) or any(x < 1.0 for x in levels):
            raise ValueError("levels must be distinct reals >= 1")
        if self.method not in (UNITARY_FOLDING, PARAMETER_SCALING):
            raise ValueError(f"unknown scaling method {self.method!r}")
        self.levels = levels


@dataclass
class LevelEstimate:
    lam: float          # realized (folding) or nominal (parameter) level
    shots: int
    e_mean: float
    e_stderr: float


@dataclass
class ExtrapolationResult:
    method: str
    e_zero: float
    table: list
    diagnostics: dict = field(default_factory=dict)
    warning: str = ""


_INVOLUTIONS = ("h", "x", "y", "z")


def _identity_block(n: int, qubits, seed: int, index: int):
    """Random single-qubit Clifford pair C C^dagger on each given qubit.

    Blocks are built from self-inverse generators so one block costs
    exactly 2 gates per qubit; this keeps the realized gate-count ratio
    close to the requested level even for short base circuits.
    """
    gen = _rng.substream(seed, _rng.fold(_BLOCK_DOMAIN, index))
    gates = []
    for q in qubits:
        kind = _INVOLUTIONS[int(gen.integers(len(_INVOLUTIONS)))]
        gates.append(Gate(kind, (q,)))
        gates.append(Gate(kind, (q,)))
    return gates


def fold_circuit(circuit: Circuit, blocks_per_layer: int, seed: int,
                 index: int = 0) -> Circuit:
    """Insert identity blocks after every layer (= gate) of the circuit."""
    if len(circuit.gates) == 0:
        raise ValueError("circuit must be nonempty")
    if blocks_per_layer < 0:
        raise ValueError("blocks_per_layer must be >= 0")
    out = Circuit(circuit.n_qubits)
    counter = 0
    for g in circuit.gates:
        out.gates.append(g)
        for _ in range(blocks_per_layer):
            out.extend(_identity_block(
                circuit.n_qubits, g.targets, seed,
                _rng.fold(_BLOCK_DOMAIN, index, counter)))
            counter += 1
    return out


def fold_to_level(circuit: Circuit, lam: float, seed: int,
                  index: int = 0) -> Circuit:
    """Grow the circuit with identity blocks until gates/base >= lam."""
    if len(circuit.gates) == 0:
        raise ValueError("circuit must be nonempty")
    base = len(circuit.gates)
    target = lam * base
    layers = [[g] for g in circuit.gates]
    total = base
    counter = 0
    pos = 0
    while total < target - 1e-9:
        g = circuit.gates[pos % base]
        block = _identity_block(circuit.n_qubits, g.targets, seed,
                                _rng.fold(_BLOCK_DOMAIN, index, counter))
        layers[pos % base].extend(block)
        total += len(block)
        counter += 1
        pos += 1
    out = Circuit(circuit.n_qubits)
    for layer in layers:
        out.extend(layer)
    return out


def perturb_parameters(circuit: Circuit, variance: float, seed: int,
                       index: int = 0) -> Circuit:
    """Add N(0, variance) noise to every rotation angle."""
    if variance < 0:
        raise ValueError("variance must be >= 0")
    if variance == 0:
        return Circuit(circuit.n_qubits, list(circuit.gates))
    gen = _rng.substream(seed, _rng.fold(_PERTURB_DOMAIN, index))
    sigma = math.sqrt(variance)
    out = Circuit(circuit.n_qubits)
    for g in circuit.gates:
        if g.is_parameterised():
            out.gates.append(Gate(g.kind, g.targets,
                                  angle=g.angle + sigma * gen.standard_normal(),
                                  m=g.m))
        else:
            out.gates.append(g)
    return out


def collect(ensemble: NoiseScaledEnsemble, observable) -> list:
    """Empirical expectation per noise level; fresh circuit per shot."""
    observable = list(observable)
    basis = measurement_basis_change(observable)
    base = ensemble.base_circuit
    table = []
    for li, lam in enumerate(ensemble.levels):
        vals = []
        lam_real = []
        for shot in range(ensemble.shots_per_level):
            idx = _rng.fold(li, shot)
            if ensemble.method == UNITARY_FOLDING:
                circ = fold_to_level(base, lam, ensemble.seed, index=idx)
                lam_real.append(len(circ.gates) / len(base.gates))
            else:
                var = (lam - 1.0) * ensemble.sigma0_sq
                circ = perturb_parameters(base, var, ensemble.seed, index=idx)
                lam_real.append(lam)
            run = Circuit(circ.n_qubits, list(circ.gates) + basis)
            out = run_noisy(run, ensemble.noise, ensemble.seed,
                            shot=_rng.fold(_SHOT_DOMAIN, li, shot))
            vals.append(pauli_eigenvalue(out, observable))
        vals = np.asarray(vals, dtype=float)
        stderr = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
        table.append(LevelEstimate(float(np.mean(lam_real)), len(vals),
                                   float(vals.mean()), stderr))
    return table


def _lagrange_at_zero(xs: np.ndarray, ys: np.ndarray) -> float:
    total = 0.0
    for i in range(len(xs)):
        term = ys[i]
        for j in range(len(xs)):
            if j != i:
                term *= (0.0 - xs[j]) / (xs[i] - xs[j])
        total += term
    return float(total)


def _golden_section(f, lo, hi, tol=1e-10):
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2


def _exp_fit(xs: np.ndarray, ys: np.ndarray, c: float):
    basis = np.vstack([np.ones_like(xs), c ** xs]).T
    coef, _, _, _ = np.linalg.lstsq(basis, ys, rcond=None)
    resid = float(np.sum((basis @ coef - ys) ** 2))
    return coef, resid


def extrapolate(table, method: str = "richardson", degree: int = 1) -> ExtrapolationResult:
    """Extrapolate the level table to lambda = 0.

    richardson: exact Lagrange interpolation evaluated at 0.
    linear / polynomial: least squares of the given degree.
    exponential: E_inf + b c^lambda via 1-D search over c in (0, 1) with
    the linear subproblem solved in closed form; falls back to linear with
    a warning when no interior optimum exists.
    """
    xs = np.asarray([pt.lam for pt in table], dtype=float)
    ys = np.asarray([pt.e_mean for pt in table], dtype=float)
    if method == "richardson":
        if len(xs) < 2:
            raise ValueError("richardson needs at least 2 levels")
        return ExtrapolationResult("richardson", _lagrange_at_zero(xs, ys),
                                   list(table))
    if method in ("linear", "polynomial"):
        k = 1 if method == "linear" else degree
        if len(xs) < k + 1:
            raise ValueError(f"need at least {k + 1} levels for degree {k}")
        coeffs = np.polyfit(xs, ys, k)
        resid = float(np.sum((np.polyval(coeffs, xs) - ys) ** 2))
        return ExtrapolationResult(method, float(np.polyval(coeffs, 0.0)),
                                   list(table),
                                   {"degree": k, "residual": resid})
    if method == "exponential":
        if len(xs) < 3:
            raise ValueError("exponential needs at least 3 levels")
        grid = np.exp(np.linspace(math.log(1e-4), math.log(0.9999), 200))
        resids = [_exp_fit(xs, ys, c)[1] for c in grid]
        i = int(np.argmin(resids))
        if i in (0, len(grid) - 1):
            lin = extrapolate(table, "linear")
            lin.method = "exponential"
            lin.warning = "no interior optimum for decay base; linear fallback"
            return lin
        c = _golden_section(lambda cc: _exp_fit(xs, ys, cc)[1],
                            grid[i - 1], grid[i + 1])
        coef, resid = _exp_fit(xs, ys, c)
        e_zero = float(coef[0] + coef[1])  # c^0 = 1
        return ExtrapolationResult("exponential", e_zero, list(table),
                                   {"e_inf": float(coef[0]),
                                    "amplitude": float(coef[1]),
                                    "decay_base": float(c),
                                    "residual": resid})
    raise ValueError(f"unknown extrapolation method {method!r}")
