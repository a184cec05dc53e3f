import json
import math

import numpy as np
import pytest

from advbound.adversary import build_uniform_gamma, spectral_report
from advbound.boolfn import make_named
from advbound.cli import main
from advbound.oracle import schedule_from_json


def run(args):
    return main([str(a) for a in args])


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# bound
# ---------------------------------------------------------------------------

def test_bound_parity6(tmp_path):
    assert run(["bound", "--function", "parity", "--n", 6, "--gamma", "min-hamming",
                "--out-dir", tmp_path, "--no-figures"]) == 0
    doc = read_json(tmp_path / "bound_report.json")
    assert abs(doc["spectral"]["bound_ratio"] - 6.0) < 1e-9
    assert doc["config_hash"]


def test_bound_or9(tmp_path):
    assert run(["bound", "--function", "or", "--n", 9,
                "--out-dir", tmp_path, "--no-figures"]) == 0
    doc = read_json(tmp_path / "bound_report.json")
    assert abs(doc["spectral"]["bound_ratio"] - 3.0) < 1e-9


def test_bound_constant_function_exit_3(tmp_path):
    assert run(["bound", "--function", "constant0", "--n", 3,
                "--out-dir", tmp_path, "--no-figures"]) == 3


def test_bound_function_file_and_gamma_file(tmp_path):
    fn = tmp_path / "fn.json"
    fn.write_text(json.dumps({"n_bits": 2, "table": [0, 1, 1, 0]}))
    gm = tmp_path / "gamma.json"
    gm.write_text(json.dumps({
        "n_bits": 2, "mode": "nonnegative",
        "entries": [[0, 1, 1.0], [0, 2, 1.0], [1, 3, 1.0], [2, 3, 1.0]],
    }))
    assert run(["bound", "--function-file", fn, "--gamma-file", gm,
                "--out-dir", tmp_path, "--no-figures"]) == 0
    doc = read_json(tmp_path / "bound_report.json")
    assert abs(doc["spectral"]["bound_ratio"] - 2.0) < 1e-9


def test_bound_conflicting_gamma_sources_exit_4(tmp_path):
    gm = tmp_path / "gamma.json"
    gm.write_text("{}")
    assert run(["bound", "--function", "or", "--n", 2, "--gamma", "min-hamming",
                "--gamma-file", gm, "--out-dir", tmp_path, "--no-figures"]) == 4


def test_bound_missing_function_exit_4(tmp_path):
    assert run(["bound", "--out-dir", tmp_path, "--no-figures"]) == 4


def test_bound_figures_rendered(tmp_path):
    assert run(["bound", "--function", "parity", "--n", 2, "--out-dir", tmp_path]) == 0
    assert (tmp_path / "bound_spectrum.png").exists()


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def test_verify_grover_case_study(tmp_path):
    assert run(["verify", "--schedule", "grover-or4", "--epsilon", 1 / 3,
                "--out-dir", tmp_path, "--no-figures"]) == 0
    doc = read_json(tmp_path / "verify_report.json")
    assert doc["derivative_bound"]["passed"]
    assert doc["distinguishability"]["passed"]
    assert doc["schedule_total_time"] >= doc["min_time_bound"]
    assert (tmp_path / "progress_trace.csv").exists()


def test_verify_driver_only_fails_distinguishability(tmp_path):
    assert run(["verify", "--schedule", "driver-only-null",
                "--out-dir", tmp_path, "--no-figures"]) == 2
    doc = read_json(tmp_path / "verify_report.json")
    assert doc["derivative_bound"]["passed"]
    assert doc["derivative_bound"]["measured_max_slope"] < 1e-9
    assert not doc["distinguishability"]["passed"]


def test_verify_fractional_matches_discrete(tmp_path):
    d1 = tmp_path / "m1"
    d50 = tmp_path / "m50"
    assert run(["verify", "--schedule", "grover-or4", "--out-dir", d1,
                "--no-figures"]) == 0
    assert run(["verify", "--schedule", "grover-or4", "--fractional-m", 50,
                "--out-dir", d50, "--no-figures"]) == 0
    a = read_json(d1 / "verify_report.json")
    b = read_json(d50 / "verify_report.json")
    assert b["distinguishability"]["passed"]
    for key, val in a["distinguishability"]["overlaps"].items():
        assert abs(b["distinguishability"]["overlaps"][key] - val) < 1e-9
    assert abs(a["schedule_total_time"] - b["schedule_total_time"]) < 1e-9


def test_verify_program_file(tmp_path):
    # a single phase query already makes the two parity classes orthogonal
    # (inner products are unitarily invariant, so no decode step is needed)
    program = [{"type": "query"}]
    pf = tmp_path / "prog.json"
    pf.write_text(json.dumps(program))
    assert run(["verify", "--program-file", pf, "--function", "parity", "--n", 2,
                "--out-dir", tmp_path, "--no-figures"]) == 0
    doc = read_json(tmp_path / "verify_report.json")
    assert doc["derivative_bound"]["passed"]
    assert doc["distinguishability"]["passed"]
    assert doc["schedule_query_units"] == 1.0


def test_verify_case_study_function_mismatch_exit_4(tmp_path):
    assert run(["verify", "--schedule", "grover-or4", "--function", "parity",
                "--n", 2, "--out-dir", tmp_path, "--no-figures"]) == 4


def test_verify_needs_exactly_one_schedule_source(tmp_path):
    assert run(["verify", "--function", "or", "--n", 2,
                "--out-dir", tmp_path, "--no-figures"]) == 4


def test_verify_threads_match_serial(tmp_path):
    d1 = tmp_path / "serial"
    d2 = tmp_path / "threads"
    assert run(["verify", "--schedule", "parity-2-discrete", "--out-dir", d1,
                "--no-figures"]) == 0
    assert run(["verify", "--schedule", "parity-2-discrete", "--out-dir", d2,
                "--threads", 4, "--no-figures"]) == 0
    assert (d1 / "verify_report.json").read_bytes() == (d2 / "verify_report.json").read_bytes()


def test_verify_pairs_csv_and_figure(tmp_path):
    assert run(["verify", "--schedule", "parity-2-discrete", "--out-dir", tmp_path,
                "--pairs-csv", "--samples-per-unit", 50]) == 0
    assert (tmp_path / "pair_inner.csv").exists()
    assert (tmp_path / "progress.png").exists()
    header = (tmp_path / "pair_inner.csv").read_text().splitlines()[0]
    assert header.startswith("t,re_0_1,im_0_1")


# ---------------------------------------------------------------------------
# optimize
# ---------------------------------------------------------------------------

def test_optimize_parity3(tmp_path):
    assert run(["optimize", "--function", "parity", "--n", 3, "--iterations", 40,
                "--out-dir", tmp_path, "--no-figures"]) == 0
    doc = read_json(tmp_path / "optimize_report.json")
    assert doc["best_ratio"] >= 3.0 - 1e-6
    assert (tmp_path / "optimized_gamma.json").exists()


def test_optimize_majority3_beats_star_bruteforce(tmp_path):
    # independent benchmark: brute force over two-parameter weightings
    # (distance-1 weight a, distance-3 weight b) of MAJORITY_3
    f = make_named("MAJORITY", 3)
    best = 0.0
    for a in np.linspace(0.0, 2.0, 9):
        for b in np.linspace(0.0, 2.0, 9):
            if a == 0.0 and b == 0.0:
                continue
            weights = []
            for x in range(8):
                for y in range(x + 1, 8):
                    if f.table[x] != f.table[y]:
                        d = bin(x ^ y).count("1")
                        w = a if d == 1 else b
                        if w:
                            weights.append((x, y, float(w)))
            if not weights:
                continue
            from advbound.adversary import RULE_CUSTOM

            G = build_uniform_gamma(f, RULE_CUSTOM, weights=weights)
            best = max(best, spectral_report(G).bound_ratio)
    assert best >= 2.0 - 1e-9  # achievability certificate

    assert run(["optimize", "--function", "majority", "--n", 3, "--iterations", 30,
                "--seed", 0, "--out-dir", tmp_path, "--no-figures"]) == 0
    doc = read_json(tmp_path / "optimize_report.json")
    assert doc["best_ratio"] >= 2.0 - 1e-6


def test_optimize_or2_general_superset(tmp_path):
    assert run(["optimize", "--function", "or", "--n", 2, "--mode", "general",
                "--iterations", 60, "--out-dir", tmp_path, "--no-figures"]) == 0
    doc = read_json(tmp_path / "optimize_report.json")
    assert doc["best_ratio"] >= math.sqrt(2.0) - 1e-6


def test_optimize_constant_exit_3(tmp_path):
    assert run(["optimize", "--function", "constant0", "--n", 2,
                "--out-dir", tmp_path, "--no-figures"]) == 3


# ---------------------------------------------------------------------------
# export-schedule
# ---------------------------------------------------------------------------

def test_export_schedule_round_trip(tmp_path):
    out = tmp_path / "parity2.json"
    assert run(["export-schedule", "--schedule", "parity-2-discrete",
                "--out", out, "--out-dir", tmp_path]) == 0
    sched = schedule_from_json(read_json(out))
    assert len(sched.segments) == 5
    assert sched.query_units == pytest.approx(5.0)


def test_exported_schedule_runs_through_verify(tmp_path):
    out = tmp_path / "sched.json"
    assert run(["export-schedule", "--schedule", "parity-2-discrete",
                "--out", out, "--out-dir", tmp_path]) == 0
    assert run(["verify", "--schedule-file", out, "--function", "parity", "--n", 2,
                "--out-dir", tmp_path, "--no-figures"]) == 0


# ---------------------------------------------------------------------------
# determinism
# ---------------------------------------------------------------------------

def test_bound_reports_byte_identical(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    for d in (d1, d2):
        assert run(["bound", "--function", "majority", "--n", 3, "--epsilon", 0.25,
                    "--out-dir", d, "--no-figures"]) == 0
    assert (d1 / "bound_report.json").read_bytes() == (d2 / "bound_report.json").read_bytes()


def test_verify_reports_byte_identical(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    for d in (d1, d2):
        assert run(["verify", "--schedule", "grover-or4", "--seed", 11,
                    "--samples-per-unit", 60, "--out-dir", d, "--no-figures"]) == 0
    assert (d1 / "verify_report.json").read_bytes() == (d2 / "verify_report.json").read_bytes()
    assert (d1 / "progress_trace.csv").read_bytes() == (d2 / "progress_trace.csv").read_bytes()


def test_optimize_reports_byte_identical(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    for d in (d1, d2):
        assert run(["optimize", "--function", "or", "--n", 2, "--iterations", 25,
                    "--seed", 5, "--out-dir", d, "--no-figures"]) == 0
    assert (d1 / "optimize_report.json").read_bytes() == (d2 / "optimize_report.json").read_bytes()
    assert (d1 / "optimized_gamma.json").read_bytes() == (d2 / "optimized_gamma.json").read_bytes()
