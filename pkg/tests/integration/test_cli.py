"""
End-to-end tests of the command-line front door through dispatch().
"""

import json

import pytest

from src import main as cli
from src.config import settings
from src.harness.output import from_csv
from src.schemas import AuditReport, TailEstimate


def run(capsys, *argv):
    code = cli.dispatch(list(argv))
    out = capsys.readouterr().out
    return code, out


# ---------------------------------------------------------------------------
# Exit codes
# ---------------------------------------------------------------------------


def test_missing_subcommand_is_usage_error(capsys):
    code, _ = run(capsys)
    assert code == cli.EXIT_USAGE


def test_p_and_lambda_are_exclusive(capsys):
    code, _ = run(capsys, "tail", "--n", "100", "--d", "3", "--p", "0.5", "--lambda", "0", "--A", "1")
    assert code == cli.EXIT_USAGE


def test_unknown_audit_is_usage_error(capsys):
    code, _ = run(capsys, "verify", "audit", "nope", "--n", "100", "--d", "3", "--p", "0.5")
    assert code == cli.EXIT_USAGE


def test_odd_stub_count_is_infeasible(capsys):
    code, _ = run(capsys, "tail", "--n", "101", "--d", "3", "--p", "0.5", "--A", "1", "--seed", "1")
    assert code == cli.EXIT_INFEASIBLE


def test_threshold_at_n_is_infeasible(capsys):
    code, _ = run(
        capsys, "tail", "--n", "50", "--d", "3", "--p", "0.5", "--threshold", "50",
        "--seed", "1", "--threads", "1",
    )
    assert code == cli.EXIT_INFEASIBLE


def test_bound_outside_hypotheses_is_infeasible(capsys):
    code, _ = run(capsys, "theory", "binomial-point", "--N", "10", "--P", "0.05", "--x", "5")
    assert code == cli.EXIT_INFEASIBLE



def test_zero_threads_is_usage_error(capsys):
    code, _ = run(
        capsys, "tail", "--n", "50", "--d", "3", "--p", "0.5", "--A", "1", "--seed", "1",
        "--threads", "0",
    )
    assert code == cli.EXIT_USAGE


def test_negative_seed_is_usage_error(capsys):
    code, _ = run(
        capsys, "tail", "--n", "50", "--d", "3", "--p", "0.5", "--A", "1", "--seed", "-1",
        "--threads", "1",
    )
    assert code == cli.EXIT_USAGE


def test_start_vertex_out_of_range_is_infeasible(capsys):
    code, _ = run(
        capsys, "simulate", "--n", "4", "--d", "3", "--p", "0.5", "--start", "99", "--seed", "1",
    )
    assert code == cli.EXIT_INFEASIBLE


def test_binomial_probability_above_one_is_infeasible(capsys):
    code, _ = run(capsys, "oracle", "binomial", "--N", "4", "--P", "2", "--j", "1")
    assert code == cli.EXIT_INFEASIBLE


def test_zero_denominator_is_usage_error(capsys):
    code, _ = run(capsys, "oracle", "binomial", "--N", "4", "--P", "1/0", "--j", "1")
    assert code == cli.EXIT_USAGE


def test_ballot_generic_length_mismatch_is_usage_error(capsys):
    code, _ = run(
        capsys, "theory", "ballot-generic", "--t", "4", "--k", "2", "--h", "1",
        "--values=-1,1", "--probs", "1/2",
    )
    assert code == cli.EXIT_USAGE


def test_plain_value_error_is_usage_error(capsys):
    code, out = run(capsys, "theory", "a-n", "--i", "-1", "--n", "100")
    assert code == cli.EXIT_USAGE
    assert out == ""


def test_failed_audit_exits_two(capsys, monkeypatch):
    failing = AuditReport(
        audit="fresh-excess", status="FAIL", trials=10, exceedances=9, frequency=0.9,
        standard_error=0.09, rhs=0.01, horizon=10, seed=0,
    )
    monkeypatch.setattr(cli, "lemma_audit", lambda *a, **k: failing)
    code, out = run(
        capsys, "verify", "audit", "fresh-excess", "--n", "100", "--d", "3", "--p", "0.5",
        "--seed", "0", "--threads", "1",
    )
    assert code == cli.EXIT_FAILED_CHECK
    assert json.loads(out)["status"] == "FAIL"


# ---------------------------------------------------------------------------
# theory / oracle
# ---------------------------------------------------------------------------


def test_theory_g_exponent(capsys):
    code, out = run(capsys, "theory", "g-exponent", "--A", "2", "--lambda", "0", "--d", "3")
    assert code == cli.EXIT_OK
    data = json.loads(out)
    assert data["op"] == "g-exponent"
    assert data["value"] == pytest.approx(2 / 9)


def test_theory_ballot_regular_in_rationals(capsys):
    code, out = run(capsys, "theory", "ballot-regular", "--t", "1", "--k", "4", "--d", "3", "--p", "1/2")
    assert code == cli.EXIT_OK
    assert json.loads(out)["value"] == "1/2"


def test_oracle_walk_example(capsys):
    code, out = run(
        capsys, "oracle", "walk", "--t", "3", "--start", "1", "--values=-1,1",
        "--probs", "1/2,1/2", "--end-at", "2",
    )
    assert code == cli.EXIT_OK
    data = json.loads(out)
    assert data["value"] == "1/4"
    assert data["exact"] is True


def test_oracle_exhaustive_two_vertices(capsys):
    code, out = run(capsys, "oracle", "exhaustive", "--n", "2", "--d", "3", "--p", "1/2")
    assert code == cli.EXIT_OK
    data = json.loads(out)
    assert data["p_simple"] == "0"
    assert data["max_component"]["total_mass"] == "1"


def test_oracle_binomial_tail(capsys):
    code, out = run(capsys, "oracle", "binomial", "--N", "4", "--P", "1/2", "--j", "4", "--tail")
    assert code == cli.EXIT_OK
    assert json.loads(out)["value"] == "1/16"


# ---------------------------------------------------------------------------
# tail / simulate / verify
# ---------------------------------------------------------------------------


def test_tail_csv_round_trip(capsys):
    code, out = run(
        capsys, "tail", "--n", "200", "--d", "3", "--lambda", "0", "--A", "1",
        "--mode", "MAX", "--trials", "100", "--seed", "9", "--threads", "1",
    )
    assert code == cli.EXIT_OK
    config, (est,) = from_csv(out, TailEstimate)
    assert config["seed"] == 9
    assert config["lambda"] == 0.0
    assert est.trials == 100
    assert est.mode == "MAX"
    assert est.A == 1.0



def _tail_csv(capsys, threads, *extra):
    code, out = run(
        capsys, "tail", "--n", "100", "--d", "3", "--p", "0.5", "--A", "1",
        "--trials", "40", "--seed", "11", "--threads", threads, *extra,
    )
    assert code == cli.EXIT_OK
    return out


def test_tail_csv_is_identical_across_thread_counts(capsys):
    one = _tail_csv(capsys, "1")
    two = _tail_csv(capsys, "2")
    assert one == two
    config, (est,) = from_csv(one, TailEstimate)
    assert "threads" not in config
    assert est.elapsed_s is None


def test_timing_flag_fills_elapsed(capsys):
    _, (est,) = from_csv(_tail_csv(capsys, "1", "--timing"), TailEstimate)
    assert est.elapsed_s is not None and est.elapsed_s >= 0.0


def test_seed_falls_back_to_environment_setting(capsys, monkeypatch):
    monkeypatch.setattr(settings, "REGULUS_SEED", 5)
    code, out = run(
        capsys, "tail", "--n", "50", "--d", "3", "--p", "0.5", "--A", "1",
        "--trials", "10", "--threads", "1",
    )
    assert code == cli.EXIT_OK
    config, (est,) = from_csv(out, TailEstimate)
    assert config["seed"] == 5 and est.seed == 5


def test_simulate_dump_and_reload(capsys, tmp_path):
    matching = tmp_path / "m.txt"
    trace = tmp_path / "trace.csv"
    code, out = run(
        capsys, "simulate", "--n", "40", "--d", "3", "--p", "0.6", "--stop", "full_graph",
        "--dump-matching", str(matching), "--dump-trace", str(trace), "--seed", "3",
    )
    assert code == cli.EXIT_OK
    first = json.loads(out)
    assert first["checks"]["passed"]
    assert matching.exists() and trace.exists()

    code, out = run(
        capsys, "simulate", "--load-matching", str(matching), "--stop", "full_graph", "--seed", "4",
    )
    assert code == cli.EXIT_OK
    second = json.loads(out)
    assert second["mode"] == "fixed"
    assert second["component_sizes"] == first["component_sizes"]


def test_simulate_needs_a_regime(capsys):
    code, _ = run(capsys, "simulate", "--seed", "1")
    assert code == cli.EXIT_USAGE


def test_verify_counters_alias(capsys):
    code, out = run(
        capsys, "verify", "lemma21", "--n", "60", "--d", "4", "--p", "0.4",
        "--trials", "20", "--seed", "1", "--threads", "1",
    )
    assert code == cli.EXIT_OK
    assert json.loads(out)["passed"] is True


def test_metrics_textfile_is_written(capsys, monkeypatch, tmp_path):
    path = tmp_path / "regulus.prom"
    monkeypatch.setattr(settings, "METRICS_TEXTFILE", str(path))
    code, _ = run(capsys, "theory", "t-upper", "--A", "1", "--n", "10000", "--d", "3")
    assert code == cli.EXIT_OK
    assert "regulus_trials_total" in path.read_text()


def test_output_file(capsys, tmp_path):
    path = tmp_path / "g.json"
    code, out = run(capsys, "theory", "a-n", "--i", "10", "--n", "100", "--out", str(path))
    assert code == cli.EXIT_OK
    assert out == ""
    assert json.loads(path.read_text())["value"] == pytest.approx(89.5)
