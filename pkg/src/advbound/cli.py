"""Command-line front end: bound / verify / optimize / export-schedule.

Exit codes: 0 pass, 2 verification failure, 3 degenerate input (constant
function or all-zero weights), 4 I/O or validation error.

Times are printed in both raw units (unit oracle rate) and query units;
1 query unit = pi raw time, the duration that reproduces one discrete
phase query.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import adversary, boolfn, jsonio, oracle
from .casestudies import CASE_STUDY_NAMES, get_case_study
from .errors import DegenerateMatrixError, IntegrationError, ValidationError
from .evolve import (
    DEFAULT_SAMPLES_PER_UNIT,
    check_derivative_bound,
    check_final_distinguishability,
    evolve,
    pair_inner_to_csv,
    progress_trace,
    segment_sample_counts,
    trace_to_csv,
)

_MODES = {"nonneg": adversary.Mode.NONNEGATIVE, "general": adversary.Mode.GENERAL}


def _add_function_flags(p):
    p.add_argument("--function", help="named family: or, and, parity, majority, constant0")
    p.add_argument("--n", type=int, help="number of input bits for --function")
    p.add_argument("--function-file", help="truth-table JSON {n_bits, table}")


def _add_gamma_flags(p):
    p.add_argument("--gamma", choices=[adversary.RULE_MIN_HAMMING, adversary.RULE_ALL_DIFFERING],
                   help="built-in weight rule (default min-hamming)")
    p.add_argument("--gamma-file", help="weight matrix JSON {n_bits, mode, entries}")
    p.add_argument("--mode", choices=sorted(_MODES), default="nonneg")


def _add_schedule_flags(p):
    p.add_argument("--schedule", help="built-in case study: " + ", ".join(CASE_STUDY_NAMES))
    p.add_argument("--program-file", help="program JSON (list of query/unitary items)")
    p.add_argument("--schedule-file", help="precompiled schedule JSON")
    p.add_argument("--fractional-m", type=int, default=1,
                   help="split each query into M equal sub-segments")


def _add_common_flags(p):
    p.add_argument("--epsilon", type=float, default=1.0 / 3.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="advbound",
        description="Adversary lower bounds and their Hamiltonian-oracle verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="spectral report and minimum-time bound")
    _add_function_flags(p)
    _add_gamma_flags(p)
    _add_common_flags(p)
    p.set_defaults(handler=cmd_bound)

    p = sub.add_parser("verify", help="evolve all inputs and check the bound machinery")
    _add_function_flags(p)
    _add_gamma_flags(p)
    _add_schedule_flags(p)
    _add_common_flags(p)
    p.add_argument("--samples-per-unit", type=int, default=DEFAULT_SAMPLES_PER_UNIT)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--pairs-csv", action="store_true",
                   help="also write the wide per-pair inner-product CSV")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("optimize", help="heuristic weight search maximizing the ratio")
    _add_function_flags(p)
    p.add_argument("--mode", choices=sorted(_MODES), default="nonneg")
    p.add_argument("--iterations", type=int, default=200)
    p.add_argument("--step", type=float, default=0.05)
    _add_common_flags(p)
    p.set_defaults(handler=cmd_optimize)

    p = sub.add_parser("export-schedule", help="write a compiled schedule as JSON")
    _add_function_flags(p)
    _add_schedule_flags(p)
    _add_common_flags(p)
    p.add_argument("--out", help="output file (default <out-dir>/schedule.json)")
    p.set_defaults(handler=cmd_export_schedule)

    return parser


def _resolve_function(args) -> boolfn.BooleanFunction:
    if args.function_file and args.function:
        raise ValidationError("give either --function or --function-file, not both")
    if args.function_file:
        return boolfn.load_function(args.function_file)
    if args.function:
        if args.n is None:
            raise ValidationError("--function requires --n")
        return boolfn.make_named(args.function, args.n)
    raise ValidationError("no function specified (--function/--n or --function-file)")


def _resolve_gamma(args, f) -> adversary.AdversaryMatrix:
    mode = _MODES[args.mode]
    if args.gamma_file and args.gamma:
        raise ValidationError("give either --gamma or --gamma-file, not both")
    if args.gamma_file:
        return adversary.load_gamma(args.gamma_file, f)
    rule = args.gamma or adversary.RULE_MIN_HAMMING
    return adversary.build_uniform_gamma(f, rule, mode=mode)


def _resolve_experiment(args):
    """Pick exactly one schedule source; returns (f, oracle, schedule, label)."""
    chosen = [s for s in (args.schedule, args.program_file, args.schedule_file) if s]
    if len(chosen) != 1:
        raise ValidationError(
            "exactly one of --schedule, --program-file, --schedule-file is required"
        )
    if args.fractional_m < 1:
        raise ValidationError("--fractional-m must be >= 1")
    if args.schedule:
        cs = get_case_study(args.schedule)
        f, orc = cs.f, cs.oracle
        if args.function or args.function_file:
            given = _resolve_function(args)
            if given.table != f.table:
                raise ValidationError(
                    f"case study {cs.name} is defined for {f.name}, not {given.name}"
                )
        schedule = cs.schedule(args.fractional_m)
        label = cs.name if args.fractional_m == 1 else f"{cs.name}-m{args.fractional_m}"
        return f, orc, schedule, label
    f = _resolve_function(args)
    orc = oracle.standard_query_oracle(f.n_bits)
    if args.program_file:
        program = oracle.load_program(args.program_file)
        schedule = oracle.compile_fractional(program, args.fractional_m, orc)
        return f, orc, schedule, os.path.basename(args.program_file)
    schedule = oracle.load_schedule(args.schedule_file)
    if schedule.dim != orc.dim:
        raise ValidationError(
            f"schedule dim {schedule.dim} != oracle dim {orc.dim} for {f.name}"
        )
    return f, orc, schedule, os.path.basename(args.schedule_file)


def _out_path(args, name: str) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _function_doc(f: boolfn.BooleanFunction) -> dict:
    return {"name": f.name, "n_bits": f.n_bits, "table": list(f.table)}


def cmd_bound(args) -> int:
    f = _resolve_function(args)
    G = _resolve_gamma(args, f)
    report = adversary.spectral_report(G)
    tmin = adversary.min_time_bound(report, args.epsilon)
    config = {
        "command": "bound",
        "function": _function_doc(f),
        "gamma": args.gamma_file or (args.gamma or adversary.RULE_MIN_HAMMING),
        "mode": G.mode.value,
        "epsilon": args.epsilon,
        "seed": args.seed,
    }
    doc = {
        "config_hash": jsonio.config_hash(config),
        "config": config,
        "spectral": adversary.report_to_json(report),
        "epsilon": args.epsilon,
        "min_time_bound": tmin,
        "min_time_bound_query_units": tmin / oracle.QUERY_UNIT,
        "time_unit_note": "1 query unit = pi raw time at unit oracle rate",
    }
    path = _out_path(args, "bound_report.json")
    jsonio.dump_canonical(doc, path)
    if not args.no_figures:
        from . import plots

        plots.spectral_figure(report, _out_path(args, "bound_spectrum.png"))
    print(
        f"bound {f.name}: ratio={report.bound_ratio:.9g} lambda={report.lambda_gamma:.9g}"
        f" min_time={tmin:.9g} ({tmin / oracle.QUERY_UNIT:.9g} query units,"
        f" 1 query unit = pi) -> {path}"
    )
    return 0


def _evolve_all(orc, schedule, counts, threads: int):
    inputs = list(range(2 ** orc.n_bits))

    def run(x):
        return evolve(orc, x, schedule, samples_per_segment=counts)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, inputs))
    else:
        results = [run(x) for x in inputs]
    return {t.input: t for t in results}


def cmd_verify(args) -> int:
    f, orc, schedule, label = _resolve_experiment(args)
    G = _resolve_gamma(args, f)
    report = adversary.spectral_report(G)
    counts = segment_sample_counts(schedule, args.samples_per_unit)
    trajectories = _evolve_all(orc, schedule, counts, args.threads)
    trace = progress_trace(G, report, trajectories)
    deriv = check_derivative_bound(trace, report)
    supported = [
        (x, y) for x, y in G.supported_pairs() if f.table[x] != f.table[y]
    ]
    dist = check_final_distinguishability(
        trajectories, f, args.epsilon, pairs=supported
    )
    tmin = adversary.min_time_bound(report, args.epsilon)
    total = schedule.total_time
    time_consistent = (not dist.passed) or total >= tmin - 1e-12
    passed = deriv.passed and dist.passed and time_consistent

    config = {
        "command": "verify",
        "function": _function_doc(f),
        "schedule": label,
        "fractional_m": args.fractional_m,
        "gamma": args.gamma_file or (args.gamma or adversary.RULE_MIN_HAMMING),
        "mode": G.mode.value,
        "epsilon": args.epsilon,
        "samples_per_unit": args.samples_per_unit,
        "seed": args.seed,
    }
    doc = {
        "config_hash": jsonio.config_hash(config),
        "config": config,
        "schedule_total_time": total,
        "schedule_query_units": schedule.query_units,
        "time_unit_note": "1 query unit = pi raw time at unit oracle rate",
        "spectral": adversary.report_to_json(report),
        "derivative_bound": deriv.to_dict(),
        "distinguishability": dist.to_dict(),
        "min_time_bound": tmin,
        "time_consistent": time_consistent,
        "passed": passed,
    }
    report_path = _out_path(args, "verify_report.json")
    jsonio.dump_canonical(doc, report_path)
    trace_to_csv(trace, _out_path(args, "progress_trace.csv"))
    if args.pairs_csv:
        pair_inner_to_csv(trace, _out_path(args, "pair_inner.csv"))
    if not args.no_figures:
        from . import plots

        plots.progress_figure(
            trace, deriv, _out_path(args, "progress.png"), eps_prime=dist.eps_prime
        )
    print(
        f"verify {label} on {f.name}: derivative "
        f"{'pass' if deriv.passed else 'FAIL'} (max slope {deriv.measured_max_slope:.6g}"
        f" vs cap {deriv.cap:.6g}), distinguishability "
        f"{'pass' if dist.passed else 'FAIL'}, total_time={total:.9g}"
        f" ({schedule.query_units:.9g} query units) vs bound {tmin:.9g} -> {report_path}"
    )
    return 0 if passed else 2


def cmd_optimize(args) -> int:
    f = _resolve_function(args)
    mode = _MODES[args.mode]
    G = adversary.optimize_weights(
        f, mode=mode, iterations=args.iterations, step=args.step, seed=args.seed
    )
    report = adversary.spectral_report(G)
    named = {}
    for rule in (adversary.RULE_MIN_HAMMING, adversary.RULE_ALL_DIFFERING):
        ref = adversary.build_uniform_gamma(f, rule)
        named[rule] = adversary.spectral_report(ref).bound_ratio
    config = {
        "command": "optimize",
        "function": _function_doc(f),
        "mode": mode.value,
        "iterations": args.iterations,
        "step": args.step,
        "seed": args.seed,
    }
    doc = {
        "config_hash": jsonio.config_hash(config),
        "config": config,
        "best_ratio": report.bound_ratio,
        "named_construction_ratios": named,
        "gap_to_best_named": report.bound_ratio - max(named.values()),
        "spectral": adversary.report_to_json(report),
    }
    report_path = _out_path(args, "optimize_report.json")
    jsonio.dump_canonical(doc, report_path)
    jsonio.dump_canonical(adversary.gamma_to_json(G), _out_path(args, "optimized_gamma.json"))
    print(
        f"optimize {f.name} ({mode.value}): best ratio {report.bound_ratio:.9g},"
        f" best named {max(named.values()):.9g} -> {report_path}"
    )
    return 0


def cmd_export_schedule(args) -> int:
    _, _, schedule, label = _resolve_experiment(args)
    path = args.out or _out_path(args, "schedule.json")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    jsonio.dump_canonical(oracle.schedule_to_json(schedule), path)
    print(
        f"export {label}: {len(schedule.segments)} segments,"
        f" total_time={schedule.total_time:.9g}"
        f" ({schedule.query_units:.9g} query units) -> {path}"
    )
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except DegenerateMatrixError as exc:
        print(f"degenerate input: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, IntegrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (OSError, json.JSONDecodeError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
