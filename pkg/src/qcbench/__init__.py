"""Desk-scale models of the quantum computing control stack.

Modules: sim (seeded statevector backend), clifford (tableaus and
uniform sampling), rb (randomised benchmarking), zne (zero-noise
extrapolation), sampling_stats (circuit-reuse variance), avqe (adaptive
phase estimation and resource formulas), stack_model (CPU<->QPU
bottleneck arithmetic), qec (surface-code union-find decoding), plots
and cli (reporting).
"""

__version__ = "0.1.0"
