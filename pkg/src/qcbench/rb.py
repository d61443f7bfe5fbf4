"""Randomised benchmarking: sequence generation, survival estimation and
decay fitting of the 0th-order model A + B p^m.

The primary fit is separable least squares (grid + golden-section over p,
closed-form A, B per candidate); the log-linear recipe is exposed as an
alternative estimator since it is only valid when A is near zero.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import clifford, rng as _rng
from .sim import Circuit, NoiseModel, run_noisy

DEFAULT_DEPTHS = (1, 2, 5, 10, 20, 50, 100)

# stream domains keep Clifford draws and shot noise on disjoint substreams
_GATE_DOMAIN = 0x5B01
_SHOT_DOMAIN = 0x5B02


@dataclass
class RbConfig:
    n_qubits: int = 1
    depths: tuple = DEFAULT_DEPTHS
    sequences_per_depth: int = 30
    reuse_factor: int = 1
    noise: NoiseModel = field(default_factory=NoiseModel)
    seed: int = 0

    def __post_init__(self):
        depths = tuple(self.depths)
        if any(m < 1 for m in depths) or list(depths) != sorted(set(depths)):
            raise ValueError("depths must be strictly increasing positive ints")
        if self.sequences_per_depth < 1 or self.reuse_factor < 1:
            raise ValueError("sequences_per_depth and reuse_factor must be >= 1")
        self.depths = depths


@dataclass
class SurvivalPoint:
    m: int
    n_circuits: int
    shots_per_circuit: int
    survival_mean: float
    survival_stderr: float


@dataclass
class RbFit:
    A: float
    B: float
    p: float
    residual: float
    method: str = "separable_lsq"
    identifiable: bool = True


def generate_sequence(n: int, m: int, seed: int, index: int = 0) -> Circuit:
    """m random Cliffords followed by their cumulative inverse.

    Noiseless execution acts as the identity, so measurement returns the
    all-zero string with probability 1.
    """
    if m < 1:
        raise ValueError("sequence length m must be >= 1")
    circ = Circuit(n)
    chain = None
    for i in range(m):
        t = clifford.sample_uniform(n, seed, _rng.fold(_GATE_DOMAIN, index, i))
        circ.extend(clifford.to_circuit(t).gates)
        chain = t if chain is None else clifford.compose(chain, t)
    inverse = clifford.invert(chain)
    circ.extend(clifford.to_circuit(inverse).gates)
    return circ


def estimate_survival(config: RbConfig):
    """Per-depth survival table (fraction of all-zero outcomes)."""
    zero = "0" * config.n_qubits
    table = []
    for di, m in enumerate(config.depths):
        seq_means = []
        for s in range(config.sequences_per_depth):
            circ = generate_sequence(config.n_qubits, m, config.seed,
                                     index=_rng.fold(di, s))
            hits = 0
            for shot in range(config.reuse_factor):
                out = run_noisy(circ, config.noise, config.seed,
                                shot=_rng.fold(_SHOT_DOMAIN, di, s, shot))
                hits += int(out == zero)
            seq_means.append(hits / config.reuse_factor)
        seq_means = np.asarray(seq_means, dtype=float)
        mean = float(seq_means.mean())
        if len(seq_means) > 1:
            stderr = float(seq_means.std(ddof=1) / math.sqrt(len(seq_means)))
        else:
            total = config.reuse_factor
            stderr = math.sqrt(max(mean * (1 - mean), 1e-12) / total)
        table.append(SurvivalPoint(m, config.sequences_per_depth,
                                   config.reuse_factor, mean, stderr))
    return table


def _linear_ab(ms: np.ndarray, ys: np.ndarray, p: float):
    """Closed-form least-squares (A, B) for fixed p, plus the residual."""
    basis = np.vstack([np.ones_like(ms, dtype=float), p ** ms]).T
    coef, _, _, _ = np.linalg.lstsq(basis, ys, rcond=None)
    resid = float(np.sum((basis @ coef - ys) ** 2))
    return float(coef[0]), float(coef[1]), resid


def _golden_section(f, lo: float, hi: float, tol: float = 1e-8) -> float:
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


def fit_decay(table, method: str = "separable_lsq") -> RbFit:
    """Fit A + B p^m to the survival table.

    method "separable_lsq" scans p over a grid in (0, 1) and refines by
    golden-section with (A, B) solved in closed form. method "log_linear"
    is the straight-line fit to log survival (assumes A ~ 0).
    """
    if len(table) < 3:
        raise ValueError("need at least 3 distinct depths to fit")
    ms = np.asarray([pt.m for pt in table], dtype=float)
    ys = np.asarray([pt.survival_mean for pt in table], dtype=float)
    if float(np.ptp(ys)) < 1e-12:
        return RbFit(A=float(ys[0]), B=0.0, p=1.0, residual=0.0,
                     method=method, identifiable=False)

    if method == "log_linear":
        mask = ys > 0
        if mask.sum() < 2:
            return RbFit(A=0.0, B=0.0, p=1.0, residual=float("inf"),
                         method=method, identifiable=False)
        slope, intercept = np.polyfit(ms[mask], np.log(ys[mask]), 1)
        p = float(np.exp(slope))
        B = float(np.exp(intercept))
        resid = float(np.sum((B * p ** ms - ys) ** 2))
        return RbFit(A=0.0, B=B, p=p, residual=resid, method=method)

    grid = np.linspace(0.001, 0.999, 999)
    resids = [_linear_ab(ms, ys, p)[2] for p in grid]
    i = int(np.argmin(resids))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    p = _golden_section(lambda q: _linear_ab(ms, ys, q)[2], lo, hi)
    A, B, resid = _linear_ab(ms, ys, p)
    return RbFit(A=A, B=B, p=p, residual=resid, method="separable_lsq")


def compiled_decay_oracle(q: float, seed: int = 1234, n_samples: int = 4000):
    """Analytic 1-qubit prediction of the per-depth decay parameter.

    Per-gate depolarizing with probability q contracts the Bloch vector by
    lam = 1 - 4q/3 per physical gate; a compiled random Clifford of g gates
    contributes lam^g, so the fitted p equals E[lam^g] over the sampler's
    compiled-gate-count distribution. Independent of the simulator: uses
    only the channel composition rule and synthesized gate counts.
    """
    lam = 1.0 - 4.0 * q / 3.0
    vals = []
    for i in range(n_samples):
        t = clifford.sample_uniform(1, seed, index=i)
        g = len(clifford.to_circuit(t))
        vals.append(lam ** g)
    return float(np.mean(vals))
