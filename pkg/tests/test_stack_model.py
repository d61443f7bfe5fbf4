"""Latency, bandwidth and backlog formulas for the control stack."""

import math

import pytest

from qcbench import stack_model as sm


def _profiles():
    return sm.builtin_profiles()


def test_builtin_profiles():
    profs = _profiles()
    assert set(profs) == {"superconducting", "trapped_ion"}
    sc, ti = profs["superconducting"], profs["trapped_ion"]
    assert sc.t_gate == 120e-9 and sc.t_meas == 120e-9
    assert ti.t_gate == 10e-6 and ti.t_meas == 750e-6
    assert sc.t_lat_one_way == ti.t_lat_one_way == 100e-6


def test_with_latency_is_nondestructive():
    sc = _profiles()["superconducting"]
    near = sc.with_latency(1e-6)
    assert near.t_lat_one_way == 1e-6
    assert sc.t_lat_one_way == 100e-6
    with pytest.raises(ValueError):
        sm.HardwareProfile("x", -1e-9, 0, 0, 0, 0)


def test_while_loop_idle_fractions():
    sc, ti = _profiles()["superconducting"], _profiles()["trapped_ion"]
    assert sm.while_loop_utilisation(sc, 2e-6) == pytest.approx(200 / 202)
    assert sm.while_loop_utilisation(sc, 2e-6) >= 0.98
    assert sm.while_loop_utilisation(ti, 800e-6) == pytest.approx(0.2)
    assert sm.while_loop_utilisation(sc.with_latency(0.0), 2e-6) == 0.0
    with pytest.raises(ValueError):
        sm.while_loop_utilisation(sc, -1.0)


def test_simulation_matches_closed_form_exactly():
    # constant circuit time makes the idle fraction ratio-exact
    for name, t_c in (("superconducting", 2e-6), ("trapped_ion", 800e-6)):
        prof = _profiles()[name]
        run = sm.simulate_while_loop(prof, n=500, bias=0.5, seed=1,
                                     circuit_time=t_c)
        assert run.idle_fraction \
            == pytest.approx(sm.while_loop_utilisation(prof, t_c), abs=1e-12)
        assert run.iterations >= 500
        assert run.utilisation == pytest.approx(1.0 - run.idle_fraction)


def test_simulation_local_mode_and_determinism():
    prof = _profiles()["superconducting"]
    run = sm.simulate_while_loop(prof, n=50, bias=0.3, seed=2, local=True)
    assert run.idle_time == 0.0 and run.idle_fraction == 0.0
    again = sm.simulate_while_loop(prof, n=50, bias=0.3, seed=2, local=True)
    assert run.iterations == again.iterations
    with pytest.raises(ValueError):
        sm.simulate_while_loop(prof, n=0, bias=0.5)
    with pytest.raises(ValueError):
        sm.simulate_while_loop(prof, n=1, bias=0.0)


def test_gate_stream_bandwidth_headline_number():
    spec = sm.BandwidthSpec(n_qubits=150, utilisation=0.5, t_gate=120e-9,
                            bytes_per_gate=2)
    assert sm.gate_stream_bandwidth(spec) == 1.25e9
    with pytest.raises(ValueError):
        sm.BandwidthSpec(10, 1.5, 120e-9)
    with pytest.raises(ValueError):
        sm.BandwidthSpec(10, 0.5, 0.0)


def test_iteration_time_components():
    sc = _profiles()["superconducting"]
    t = sm.aqpe_iteration_time(sc, 1, sm.DepthOnly())
    assert t == pytest.approx(2 * 100e-6 + 120e-9 + 120e-9 + 5e-6)
    # local mode removes exactly one round trip
    t_local = sm.aqpe_iteration_time(sc, 1, sm.DepthOnly(), local=True)
    assert t - t_local == pytest.approx(2 * sc.t_lat_one_way)
    with pytest.raises(ValueError):
        sm.aqpe_iteration_time(sc, -1, sm.DepthOnly())


def test_gate_count_circuit_model():
    sc = _profiles()["superconducting"]
    model = sm.GateCount(10)
    assert model.circuit_time(1, sc.t_gate) == pytest.approx(57 * 120e-9)
    with pytest.raises(ValueError):
        sm.GateCount(-1)


def test_latency_improvement_ratios():
    sc, ti = _profiles()["superconducting"], _profiles()["trapped_ion"]
    model = sm.DepthOnly()

    def ratio(prof):
        far = sm.aqpe_iteration_time(prof.with_latency(100e-6), 1, model)
        near = sm.aqpe_iteration_time(prof.with_latency(1e-6), 1, model)
        return far / near

    assert ratio(sc) >= 20.0          # latency dominates fast hardware
    assert ratio(ti) <= 1.5           # slow hardware hides the link


def test_total_time_is_linear_in_counts():
    sc = _profiles()["superconducting"]
    model = sm.DepthOnly()
    a_m = {1: 10, 4: 3}
    total = sm.aqpe_total_time(sc, a_m, model)
    expected = sum(c * sm.aqpe_iteration_time(sc, m, model)
                   for m, c in a_m.items())
    assert total == pytest.approx(expected)


def test_backlog_growth():
    spec = sm.BacklogSpec(r_gen=2.0, r_proc=1.0, k=686, t_cycle=400e-9)
    assert spec.f == 2.0
    seconds, log10_s = sm.backlog_execution_time(spec)
    assert log10_s == pytest.approx(math.log10(400e-9) + 686 * math.log10(2))
    assert seconds == pytest.approx(10.0 ** log10_s)
    # past the double range only the log channel stays finite
    huge = sm.BacklogSpec(r_gen=2.0, r_proc=1.0, k=2000, t_cycle=400e-9)
    seconds, log10_s = sm.backlog_execution_time(huge)
    assert seconds == math.inf and math.isfinite(log10_s)
    # balanced rates: no backlog amplification at any k
    flat = sm.BacklogSpec(r_gen=3.0, r_proc=3.0, k=686, t_cycle=400e-9)
    seconds, _ = sm.backlog_execution_time(flat)
    assert seconds == pytest.approx(400e-9)
    with pytest.raises(ValueError):
        sm.BacklogSpec(0.0, 1.0, 1, 1e-9)


def test_qec_instruction_bandwidth():
    assert sm.qec_instruction_bandwidth(1, 100e6, 1.0) == 100e6
    assert sm.qec_instruction_bandwidth(100000, 100e6, 1.0) == 1e13
    with pytest.raises(ValueError):
        sm.qec_instruction_bandwidth(-1, 1.0, 1.0)
