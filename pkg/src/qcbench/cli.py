"""Command-line harness: every experiment as a seeded subcommand.

Output contract: the first line is always a CSV header, floats are
serialized with 17 significant digits (round-trip exact), and re-running
the same command with the same seed yields byte-identical output. When
--out is a file a key=value manifest is written next to it; --plot
renders the matching figure alongside the delimited output.

Exit codes: 0 ok, 1 validation/usage error, 2 internal error.
"""

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, avqe, qec, rb, sampling_stats, stack_model, zne
from . import rng as _rng
from .sim import Circuit, NoiseModel


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage failures exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def _float_list(text: str):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad numeric list {text!r}") from exc


def _int_list(text: str):
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from exc


def _ordered_map(fn, items, threads: int):
    """Map preserving input order; results independent of thread count."""
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _write_output(ns, header, rows, plot_fn=None):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(row[h]) for h in header))
    text = "\n".join(lines) + "\n"
    if ns.out == "-":
        sys.stdout.write(text)
    else:
        with open(ns.out, "w") as fh:
            fh.write(text)
        _write_manifest(ns)
    if ns.plot:
        if plot_fn is None:
            raise ValueError(f"subcommand {ns.command!r} has no plot output")
        plot_fn(ns.plot)


def _write_manifest(ns):
    skip = {"func", "config"}
    entries = {k: v for k, v in sorted(vars(ns).items()) if k not in skip}
    lines = [f"version={__version__}"]
    for key, value in entries.items():
        if isinstance(value, list):
            value = ",".join(_fmt(v) for v in value)
        else:
            value = _fmt(value) if isinstance(value, (int, float, bool)) \
                else str(value)
        lines.append(f"{key}={value}")
    with open(ns.out + ".manifest", "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _load_config(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"config line {line!r} is not key=value")
            key, _, val = line.partition("=")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _demo_circuit(n_qubits: int, layers: int) -> Circuit:
    """Deterministic layered benchmark circuit (rotations + CNOT chain)."""
    circ = Circuit(n_qubits)
    for layer in range(layers):
        for q in range(n_qubits):
            circ.add("rx", q, angle=0.3 * (q + 1) + 0.15 * layer)
        for q in range(n_qubits - 1):
            circ.add("cnot", q, q + 1)
    return circ


def _profile(ns) -> stack_model.HardwareProfile:
    profiles = stack_model.builtin_profiles()
    if ns.profile not in profiles:
        raise ValueError(f"unknown profile {ns.profile!r}; "
                         f"choose from {sorted(profiles)}")
    prof = profiles[ns.profile]
    if getattr(ns, "latency", None) is not None:
        prof = prof.with_latency(ns.latency)
    return prof


# ---------------------------------------------------------------- subcommands

def cmd_rb(ns):
    noise = NoiseModel(depolarizing_prob=ns.depolarizing,
                       measurement_flip_prob=ns.flip)
    config = rb.RbConfig(n_qubits=ns.qubits, depths=tuple(ns.depths),
                         sequences_per_depth=ns.sequences,
                         reuse_factor=ns.reuse, noise=noise, seed=ns.seed)
    table = rb.estimate_survival(config)
    fit = rb.fit_decay(table, method=ns.fit_method)
    header = ["m", "n_circuits", "shots_per_circuit", "survival_mean",
              "survival_stderr", "fit_A", "fit_B", "fit_p"]
    rows = [{"m": pt.m, "n_circuits": pt.n_circuits,
             "shots_per_circuit": pt.shots_per_circuit,
             "survival_mean": pt.survival_mean,
             "survival_stderr": pt.survival_stderr,
             "fit_A": fit.A, "fit_B": fit.B, "fit_p": fit.p}
            for pt in table]

    def plot(path):
        from . import plots
        plots.rb_decay(table, fit, path)

    _write_output(ns, header, rows, plot)


def cmd_zne(ns):
    base = _demo_circuit(ns.qubits, ns.layers)
    noise = NoiseModel(depolarizing_prob=ns.depolarizing,
                       measurement_flip_prob=ns.flip)
    observable = ns.observable or "Z" * ns.qubits
    if len(observable) != ns.qubits:
        raise ValueError("observable length must equal qubit count")
    ensemble = zne.NoiseScaledEnsemble(
        base_circuit=base, method=ns.method, levels=tuple(ns.levels),
        shots_per_level=ns.shots, noise=noise, seed=ns.seed)
    table = zne.collect(ensemble, observable)
    result = zne.extrapolate(table, method=ns.extrapolation, degree=ns.degree)
    header = ["lambda", "shots", "e_mean", "e_stderr", "e_zero",
              "extrapolation"]
    rows = [{"lambda": pt.lam, "shots": pt.shots, "e_mean": pt.e_mean,
             "e_stderr": pt.e_stderr, "e_zero": result.e_zero,
             "extrapolation": result.method} for pt in table]

    def plot(path):
        from . import plots
        plots.zne_extrapolation(table, result, path)

    _write_output(ns, header, rows, plot)


def cmd_variance(ns):
    header = ["mu", "sigma_sq", "k", "l", "var1", "var2",
              "target_accuracy", "n_required"]
    rows = []
    for l in ns.reuse_list:
        if ns.total % l:
            raise ValueError(f"total shots {ns.total} not divisible by l={l}")
        model = sampling_stats.TwoLevelModel(mu=ns.mu, sigma_sq=ns.sigma_sq,
                                             k=ns.total // l, l=l)
        rows.append({
            "mu": ns.mu, "sigma_sq": ns.sigma_sq, "k": model.k, "l": l,
            "var1": sampling_stats.var_scheme1(model),
            "var2": sampling_stats.var_scheme2(model),
            "target_accuracy": ns.target,
            "n_required": sampling_stats.samples_required(
                ns.mu, ns.sigma_sq, l, ns.target)})

    def plot(path):
        from . import plots
        plots.variance_sweep(rows, path)

    _write_output(ns, header, rows, plot)


def cmd_avqe_measurements(ns):
    def one(alpha):
        meas = []
        for s in range(ns.n_seeds):
            gen = _rng.substream(ns.seed, _rng.fold(0xC11, s))
            phi = float(gen.uniform(-math.pi, math.pi))
            cfg = avqe.AqpeConfig(alpha=alpha, precision=ns.precision,
                                  seed=ns.seed)
            run = avqe.estimate_phase(cfg, avqe.AnalyticOracle(phi),
                                      run_index=s)
            meas.append(run.iterations)
        return {"alpha": alpha, "p": ns.precision,
                "n_formula": avqe.n_measurements(ns.precision, alpha),
                "n_empirical_median": float(np.median(meas))}

    rows = _ordered_map(one, ns.alphas, ns.threads)
    header = ["alpha", "p", "n_formula", "n_empirical_median"]

    def plot(path):
        from . import plots
        plots.measurement_scaling(rows, path)

    _write_output(ns, header, rows, plot)


def cmd_avqe_nmin(ns):
    header = ["p", "d", "alpha_max", "n_min"]
    rows = [{"p": ns.precision, "d": d,
             "alpha_max": avqe.alpha_max(ns.precision, d),
             "n_min": avqe.n_min(ns.precision, d)}
            for d in ns.depths]
    _write_output(ns, header, rows)


def cmd_avqe_gates(ns):
    alpha_star, triples = avqe.crossover_alpha(
        ns.precision, ns.n_pauli, ns.alphas, n_seeds=ns.n_seeds,
        seed=ns.seed)
    header = ["alpha", "vqe_gates", "avqe_gates", "n_P", "alpha_star"]
    star = float("nan") if alpha_star is None else alpha_star
    rows = [{"alpha": a, "vqe_gates": v, "avqe_gates": q,
             "n_P": ns.n_pauli, "alpha_star": star}
            for a, v, q in triples]

    def plot(path):
        from . import plots
        plots.gate_crossover(rows, path)

    _write_output(ns, header, rows, plot)


def cmd_avqe_run(ns):
    cfg = avqe.AqpeConfig(alpha=ns.alpha, precision=ns.precision,
                          seed=ns.seed)
    run = avqe.estimate_phase(cfg, avqe.AnalyticOracle(ns.phi, sign=1))
    header = ["iter", "M", "theta", "E", "accepted", "mu", "sigma"]
    rows = [{"iter": i + 1, "M": rec.m, "theta": rec.theta,
             "E": rec.outcome, "accepted": rec.accepted, "mu": rec.mu,
             "sigma": rec.sigma}
            for i, rec in enumerate(run.history)]

    def plot(path):
        from . import plots
        plots.phase_trace(run.history, path)

    _write_output(ns, header, rows, plot)


def cmd_runtime(ns):
    prof = _profile(ns)
    model = (stack_model.DepthOnly() if ns.circuit_model == "depth"
             else stack_model.GateCount(ns.n_pauli))
    header = ["latency_s", "M", "T_s", "profile"]
    rows = [{"latency_s": lat, "M": m,
             "T_s": stack_model.aqpe_iteration_time(
                 prof.with_latency(lat), m, model, local=ns.local),
             "profile": prof.name}
            for m in ns.depths for lat in ns.latencies]

    def plot(path):
        from . import plots
        plots.runtime_sweep(rows, path)

    _write_output(ns, header, rows, plot)


def cmd_bandwidth(ns):
    header = ["gate_time_s", "n_qubits", "bandwidth_Bps"]
    rows = [{"gate_time_s": ns.gate_time, "n_qubits": n,
             "bandwidth_Bps": stack_model.gate_stream_bandwidth(
                 stack_model.BandwidthSpec(n, ns.utilisation, ns.gate_time,
                                           bytes_per_gate=ns.bytes_per_gate))}
            for n in ns.qubits]

    def plot(path):
        from . import plots
        plots.bandwidth_sweep(rows, path)

    _write_output(ns, header, rows, plot)


def cmd_utilization(ns):
    prof = _profile(ns)
    closed = stack_model.while_loop_utilisation(prof, ns.circuit_time)
    run = stack_model.simulate_while_loop(
        prof, ns.zeros, ns.bias, seed=ns.seed,
        circuit_time=ns.circuit_time, local=ns.local)
    header = ["profile", "circuit_time_s", "idle_closed_form",
              "idle_simulated", "iterations"]
    rows = [{"profile": prof.name, "circuit_time_s": ns.circuit_time,
             "idle_closed_form": 0.0 if ns.local else closed,
             "idle_simulated": run.idle_fraction,
             "iterations": run.iterations}]
    _write_output(ns, header, rows)


def cmd_backlog(ns):
    header = ["f", "k", "log10_seconds", "seconds"]
    rows = []
    for k in ns.k_list:
        spec = stack_model.BacklogSpec(ns.r_gen, ns.r_proc, k, ns.t_cycle)
        seconds, log10_s = stack_model.backlog_execution_time(spec)
        rows.append({"f": spec.f, "k": k, "log10_seconds": log10_s,
                     "seconds": seconds})

    def plot(path):
        from . import plots
        plots.backlog_curve(rows, path)

    _write_output(ns, header, rows, plot)


def cmd_qec_bandwidth(ns):
    header = ["n_qubits", "op_rate_hz", "bytes_per_instruction",
              "bandwidth_Bps"]
    rows = [{"n_qubits": n, "op_rate_hz": ns.op_rate,
             "bytes_per_instruction": ns.bytes_per_instruction,
             "bandwidth_Bps": stack_model.qec_instruction_bandwidth(
                 n, ns.op_rate, ns.bytes_per_instruction)}
            for n in ns.qubits]
    _write_output(ns, header, rows)


def cmd_qec_decode(ns):
    graph = qec.build_graph(ns.distance, ns.rounds)
    header = ["shot", "d", "rounds", "hot_count", "correction_weight",
              "work_units", "syndrome_ok", "logical_failure"]
    rows = []
    for shot in range(ns.shots):
        hist = qec.sample_errors(graph, ns.p_data, ns.p_meas, ns.seed,
                                 shot=shot)
        correction, work = qec.decode(graph, hist.hot)
        flags = qec.correction_flags(graph, correction)
        ok = bool(np.array_equal(qec.syndrome_of(graph, flags), hist.hot))
        rows.append({"shot": shot, "d": ns.distance, "rounds": ns.rounds,
                     "hot_count": int(hist.hot.sum()),
                     "correction_weight": len(correction),
                     "work_units": work, "syndrome_ok": ok,
                     "logical_failure": qec.logical_failure(
                         graph, hist.error_edges, correction)})
    _write_output(ns, header, rows)


def cmd_qec_logical(ns):
    def one(args):
        d, p = args
        res = qec.logical_failure_rate(d, p, ns.shots, seed=ns.seed)
        return {"d": d, "p": p, "shots": ns.shots, "p_log": res.p_log,
                "p_log_stderr": res.stderr}

    grid = [(d, p) for d in ns.distances for p in ns.p_list]
    rows = _ordered_map(one, grid, ns.threads)
    header = ["d", "p", "shots", "p_log", "p_log_stderr"]

    def plot(path):
        from . import plots
        plots.logical_rates(rows, path)

    _write_output(ns, header, rows, plot)


def cmd_qec_timeout(ns):
    header = ["d", "p", "W_max", "p_toe", "p_log", "inequality_holds"]
    rows = []
    for w_max in ns.w_max_list:
        res = qec.timeout_stats(ns.distance, ns.p, w_max, ns.shots,
                                seed=ns.seed)
        rows.append({"d": res.d, "p": res.p, "W_max": w_max,
                     "p_toe": res.p_toe, "p_log": res.p_log,
                     "inequality_holds": res.inequality_holds})
    _write_output(ns, header, rows)


def cmd_sqv(ns):
    header = ["n_logical", "p_l", "sqv"]
    rows = [{"n_logical": ns.n_logical, "p_l": p,
             "sqv": qec.sqv(ns.n_logical, p)} for p in ns.p_l_list]
    _write_output(ns, header, rows)


# -------------------------------------------------------------------- parser

def build_parser():
    parser = _Parser(prog="qcbench",
                     description="Desk-scale models of the quantum "
                                 "computing control stack.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers = {}

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--seed", type=int, default=0,
                       help="master seed (default 0)")
        p.add_argument("--out", default="-",
                       help="output CSV path, '-' for stdout")
        p.add_argument("--plot", default=None,
                       help="also render a figure to this path")
        p.add_argument("--config", default=None,
                       help="key=value defaults file; flags override")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for sweeps (results "
                            "independent of N)")
        p.set_defaults(func=fn)
        subparsers[name] = p
        return p

    p = add("rb", cmd_rb, "randomised benchmarking decay")
    p.add_argument("--qubits", type=int, default=1)
    p.add_argument("--depths", type=_int_list, default=list(rb.DEFAULT_DEPTHS))
    p.add_argument("--sequences", type=int, default=30)
    p.add_argument("--reuse", type=int, default=1)
    p.add_argument("--depolarizing", type=float, default=0.01)
    p.add_argument("--flip", type=float, default=0.0)
    p.add_argument("--fit-method", default="separable_lsq",
                   choices=["separable_lsq", "log_linear"])

    p = add("zne", cmd_zne, "zero-noise extrapolation")
    p.add_argument("--qubits", type=int, default=2)
    p.add_argument("--layers", type=int, default=3)
    p.add_argument("--method", default=zne.UNITARY_FOLDING,
                   choices=[zne.UNITARY_FOLDING, zne.PARAMETER_SCALING])
    p.add_argument("--levels", type=_float_list, default=[1.0, 1.5, 2.0, 3.0])
    p.add_argument("--shots", type=int, default=500)
    p.add_argument("--depolarizing", type=float, default=0.005)
    p.add_argument("--flip", type=float, default=0.0)
    p.add_argument("--observable", default=None)
    p.add_argument("--extrapolation", default="richardson",
                   choices=["richardson", "linear", "polynomial",
                            "exponential"])
    p.add_argument("--degree", type=int, default=2)

    p = add("variance", cmd_variance, "circuit-reuse estimator variance")
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--sigma-sq", type=float, default=0.01)
    p.add_argument("--total", type=int, default=10000,
                   help="total shots n = l*k")
    p.add_argument("--reuse-list", type=_int_list,
                   default=[1, 2, 5, 10, 50, 100])
    p.add_argument("--target", type=float, default=0.01)

    p = add("avqe-measurements", cmd_avqe_measurements,
            "measurement count: closed form vs empirical")
    p.add_argument("--precision", type=float, default=0.01)
    p.add_argument("--alphas", type=_float_list,
                   default=[0.0, 0.25, 0.5, 0.75, 1.0])
    p.add_argument("--n-seeds", type=int, default=25)

    p = add("avqe-nmin", cmd_avqe_nmin, "depth-constrained minimum "
                                        "measurement count")
    p.add_argument("--precision", type=float, default=0.01)
    p.add_argument("--depths", type=_int_list,
                   default=[1, 2, 5, 10, 20, 50, 100])

    p = add("avqe-gates", cmd_avqe_gates, "gate-count crossover scan")
    p.add_argument("--precision", type=float, default=1e-3)
    p.add_argument("--n-pauli", type=int, default=10)
    p.add_argument("--alphas", type=_float_list,
                   default=[round(0.05 * i, 2) for i in range(11)])
    p.add_argument("--n-seeds", type=int, default=25)

    p = add("avqe-run", cmd_avqe_run, "single adaptive phase estimation "
                                      "trace")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--precision", type=float, default=0.01)
    p.add_argument("--phi", type=float, default=1.0)

    p = add("runtime", cmd_runtime, "per-iteration cost T(M) sweep")
    p.add_argument("--profile", default="superconducting")
    p.add_argument("--circuit-model", default="depth",
                   choices=["depth", "gates"])
    p.add_argument("--n-pauli", type=int, default=10)
    p.add_argument("--depths", type=_int_list, default=[1, 10, 100])
    p.add_argument("--latencies", type=_float_list,
                   default=[1e-6, 1e-5, 1e-4, 1e-3])
    p.add_argument("--local", action="store_true")

    p = add("bandwidth", cmd_bandwidth, "gate-stream bandwidth")
    p.add_argument("--qubits", type=_int_list, default=[150])
    p.add_argument("--gate-time", type=float, default=120e-9)
    p.add_argument("--utilisation", type=float, default=0.5)
    p.add_argument("--bytes-per-gate", type=int, default=2)

    p = add("utilization", cmd_utilization, "while-loop idle fraction")
    p.add_argument("--profile", default="superconducting")
    p.add_argument("--circuit-time", type=float, default=2e-6)
    p.add_argument("--latency", type=float, default=None)
    p.add_argument("--zeros", type=int, default=100)
    p.add_argument("--bias", type=float, default=0.5)
    p.add_argument("--local", action="store_true")

    p = add("backlog", cmd_backlog, "decoder backlog execution time")
    p.add_argument("--r-gen", type=float, default=2.0)
    p.add_argument("--r-proc", type=float, default=1.0)
    p.add_argument("--k-list", type=_int_list, default=[1, 10, 100, 686])
    p.add_argument("--t-cycle", type=float, default=400e-9)

    p = add("qec-bandwidth", cmd_qec_bandwidth, "QEC instruction bandwidth")
    p.add_argument("--qubits", type=_int_list, default=[1, 100000])
    p.add_argument("--op-rate", type=float, default=100e6)
    p.add_argument("--bytes-per-instruction", type=float, default=1.0)

    p = add("qec-decode", cmd_qec_decode, "per-shot decoder debug dump")
    p.add_argument("--distance", type=int, default=3)
    p.add_argument("--rounds", type=int, default=3)
    p.add_argument("--p-data", type=float, default=0.01)
    p.add_argument("--p-meas", type=float, default=0.01)
    p.add_argument("--shots", type=int, default=10)

    p = add("qec-logical", cmd_qec_logical, "logical failure rate Monte "
                                            "Carlo")
    p.add_argument("--distances", type=_int_list, default=[3, 5])
    p.add_argument("--p-list", type=_float_list, default=[0.005, 0.01, 0.02])
    p.add_argument("--shots", type=int, default=2000)

    p = add("qec-timeout", cmd_qec_timeout, "timeout failure accounting")
    p.add_argument("--distance", type=int, default=3)
    p.add_argument("--p", type=float, default=0.01)
    p.add_argument("--w-max-list", type=_float_list,
                   default=[0.0, 50.0, 200.0, math.inf])
    p.add_argument("--shots", type=int, default=2000)

    p = add("sqv", cmd_sqv, "simple quantum volume metric")
    p.add_argument("--n-logical", type=int, default=78)
    p.add_argument("--p-l-list", type=_float_list, default=[1.0, 1e-3, 1e-6])

    return parser, subparsers


def _apply_config(subparser, ns):
    """Re-parse with the config file's values as defaults."""
    values = _load_config(ns.config)
    converted = {}
    actions = {a.dest: a for a in subparser._actions}
    for key, raw in values.items():
        if key not in actions:
            raise ValueError(f"config key {key!r} is not a flag of this "
                             f"subcommand")
        action = actions[key]
        if isinstance(action, argparse._StoreTrueAction):
            converted[key] = raw.lower() in ("1", "true", "yes")
        elif action.type is not None:
            converted[key] = action.type(raw)
        else:
            converted[key] = raw
    return converted


def main(argv=None) -> int:
    parser, subparsers = build_parser()
    ns = parser.parse_args(argv)
    try:
        if ns.config:
            # re-parse with the file's values as defaults so that flags
            # given explicitly on the command line still win
            defaults = _apply_config(subparsers[ns.command], ns)
            parser2, subparsers2 = build_parser()
            subparsers2[ns.command].set_defaults(**defaults)
            ns = parser2.parse_args(argv)
        ns.func(ns)
        return 0
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal failure
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
