"""Closed-form CPU<->QPU bottleneck models.

Hardware timing profiles, while-loop utilisation, gate-stream bandwidth,
the per-iteration phase-estimation cost T(M) and its weighted total,
decoder-backlog latency, and QEC instruction bandwidth. Everything here
is a small deterministic formula except simulate_while_loop, which is a
discrete-event rendering of the same feedback loop.
"""

import math
from dataclasses import dataclass, replace

from . import rng as _rng
from .avqe import circuit_gates


@dataclass(frozen=True)
class HardwareProfile:
    name: str
    t_gate: float
    t_meas: float
    t_reset: float
    t_lat_one_way: float
    t_bayes: float

    def __post_init__(self):
        for f in ("t_gate", "t_meas", "t_reset", "t_lat_one_way", "t_bayes"):
            if getattr(self, f) < 0:
                raise ValueError(f"{f} must be >= 0")

    def with_latency(self, t_lat_one_way: float) -> "HardwareProfile":
        return replace(self, t_lat_one_way=t_lat_one_way)


def builtin_profiles() -> dict:
    """Timing profiles for the two platforms considered throughout."""
    return {
        "superconducting": HardwareProfile(
            "superconducting", t_gate=120e-9, t_meas=120e-9, t_reset=120e-9,
            t_lat_one_way=100e-6, t_bayes=5e-6),
        "trapped_ion": HardwareProfile(
            "trapped_ion", t_gate=10e-6, t_meas=750e-6, t_reset=750e-6,
            t_lat_one_way=100e-6, t_bayes=5e-6),
    }


def while_loop_utilisation(profile: HardwareProfile,
                           circuit_time: float) -> float:
    """Idle fraction of a remotely-controlled measure-and-branch loop.

    Each iteration runs the circuit (busy) and then waits one round trip
    to the classical controller (idle): idle = 2 t_lat / (2 t_lat + t_c).
    """
    if circuit_time < 0:
        raise ValueError("circuit_time must be >= 0")
    round_trip = 2.0 * profile.t_lat_one_way
    if round_trip == 0.0:
        return 0.0
    return round_trip / (round_trip + circuit_time)


@dataclass(frozen=True)
class BandwidthSpec:
    n_qubits: int
    utilisation: float
    t_gate: float
    bytes_per_gate: int = 2   # 2 B for 1-qubit gates, 4 B for 2-qubit

    def __post_init__(self):
        if self.n_qubits < 0:
            raise ValueError("n_qubits must be >= 0")
        if not 0.0 <= self.utilisation <= 1.0:
            raise ValueError("utilisation must be in [0, 1]")
        if self.t_gate <= 0:
            raise ValueError("t_gate must be > 0")
        if self.bytes_per_gate < 1:
            raise ValueError("bytes_per_gate must be >= 1")


def gate_stream_bandwidth(spec: BandwidthSpec) -> float:
    """Bytes/second needed to stream gate instructions to the QPU."""
    return spec.n_qubits * spec.utilisation * spec.bytes_per_gate / spec.t_gate


class DepthOnly:
    """Circuit time = M * t_gate (depth-M circuit of uniform gates)."""

    def circuit_time(self, m: int, t_gate: float) -> float:
        return m * t_gate


class GateCount:
    """Circuit time from the full phase-estimation gate count at depth M."""

    def __init__(self, n_p: int):
        if n_p < 0:
            raise ValueError("n_p must be >= 0")
        self.n_p = n_p

    def circuit_time(self, m: int, t_gate: float) -> float:
        return circuit_gates(m, self.n_p) * t_gate


def aqpe_iteration_time(profile: HardwareProfile, m: int, circuit_model,
                        local: bool = False) -> float:
    """One iteration of the adaptive phase-estimation loop, in seconds.

    T(M) = 2 t_lat + t_c(M) + max(t_reset, t_meas) + t_B. With local=True
    the Bayesian update runs next to the QPU and the round trip vanishes,
    which is exactly the T(M) - 2 t_lat identity.
    """
    if m < 0:
        raise ValueError("depth m must be >= 0")
    t_c = circuit_model.circuit_time(m, profile.t_gate) if m > 0 else 0.0
    t = t_c + max(profile.t_reset, profile.t_meas) + profile.t_bayes
    if not local:
        t += 2.0 * profile.t_lat_one_way
    return t


def aqpe_total_time(profile: HardwareProfile, a_m: dict, circuit_model,
                    local: bool = False) -> float:
    """tau = sum_M a_M T(M) over a depth->evaluation-count table."""
    return float(sum(count * aqpe_iteration_time(profile, m, circuit_model,
                                                 local=local)
                     for m, count in a_m.items()))


@dataclass(frozen=True)
class BacklogSpec:
    r_gen: float      # syndrome generation rate, 1/s
    r_proc: float     # syndrome processing rate, 1/s
    k: int            # non-Clifford gate count
    t_cycle: float    # seconds

    def __post_init__(self):
        if self.r_gen <= 0 or self.r_proc <= 0:
            raise ValueError("rates must be > 0")
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if self.t_cycle <= 0:
            raise ValueError("t_cycle must be > 0")

    @property
    def f(self) -> float:
        return self.r_gen / self.r_proc


def backlog_execution_time(spec: BacklogSpec):
    """Decoder-backlog execution time t_cycle * f^k.

    Returns (seconds, log10_seconds); seconds is inf when the value
    overflows a double (the log10 channel is always finite).
    """
    log10_t = math.log10(spec.t_cycle) + spec.k * math.log10(spec.f)
    seconds = 10.0 ** log10_t if log10_t < 308 else math.inf
    return seconds, log10_t


def qec_instruction_bandwidth(n_qubits: int, op_rate: float,
                              bytes_per_instruction: float) -> float:
    """Bytes/second of QEC instruction traffic."""
    if n_qubits < 0 or op_rate < 0 or bytes_per_instruction < 0:
        raise ValueError("inputs must be >= 0")
    return n_qubits * op_rate * bytes_per_instruction


@dataclass
class WhileLoopRun:
    iterations: int
    busy_time: float
    idle_time: float

    @property
    def wall_time(self) -> float:
        return self.busy_time + self.idle_time

    @property
    def idle_fraction(self) -> float:
        return self.idle_time / self.wall_time if self.wall_time > 0 else 0.0

    @property
    def utilisation(self) -> float:
        return 1.0 - self.idle_fraction


def simulate_while_loop(profile: HardwareProfile, n: int, bias: float,
                        seed: int = 0, circuit_time: float = 2e-6,
                        local: bool = False) -> WhileLoopRun:
    """Event simulation of the repeat-until-n-zeros feedback loop.

    Per iteration: circuit execution + measurement (busy), then one round
    trip to the controller for the branch decision (idle; zero in local
    mode). Stops once n zero outcomes have accumulated.
    """
    if n < 1:
        raise ValueError("target zero count must be >= 1")
    if not 0.0 < bias <= 1.0:
        raise ValueError("bias must be in (0, 1]")
    gen = _rng.substream(seed, 0x10C0)
    round_trip = 0.0 if local else 2.0 * profile.t_lat_one_way
    zeros = 0
    iterations = 0
    busy = 0.0
    idle = 0.0
    while zeros < n:
        iterations += 1
        busy += circuit_time
        idle += round_trip
        if gen.random() < bias:
            zeros += 1
    return WhileLoopRun(iterations, busy, idle)
