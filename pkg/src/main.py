"""
Command-line front door.

    regulus simulate | tail | theory <op> | oracle <kind> | verify <suite> | scaling

Machine-readable output goes to stdout (or --out); the human summary goes
to the stderr logger. Exit codes: 0 success, 2 failed audit or identity
suite, 64 usage error, 65 infeasible parameters or violated hypotheses.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np
from pydantic import ValidationError

from src.config import settings
from src.errors import RegulusError
from src.exploration.checks import check_counter_identities
from src.exploration.export import dump_trace
from src.exploration.process import (
    ActivePolicy,
    Start,
    StopRule,
    component_size_of_start,
    explore,
    phase_sizes,
)
from src.graph.config_graph import (
    dump_matching,
    load_matching,
    sample_mask,
    sample_matching,
)
from src.harness.audits import AUDITS, barrier_walk_probability, lemma_audit, sandwich_diagnostic, second_moment_diagnostic
from src.harness.mc_harness import estimate_simple_prob, run_tail, scaling_diagnostic
from src.harness.output import to_csv, to_json
from src.harness.runner import resolve_threads
from src.harness.verification import verify_counters, verify_coupling
from src.oracles import binomial, enumeration, lattice
from src.schemas import TAIL_CSV_FIELDS, Params, TheoryResult
from src.shared.streams import RandomStream
from src.theory import bounds, brownian, exponent, horizons
from src.utils.audit import record_run
from src.utils.logger import bind_run, logger
from src.utils.metrics import export_textfile
from src.utils.tracing import flush_tracing
from src.walks.coupled_walks import a_n

EXIT_OK = 0
EXIT_FAILED_CHECK = 2
EXIT_USAGE = 64
EXIT_INFEASIBLE = 65

_TRACE_TAG = 7  # child stream for a simulated FIXED graph's walk


class UsageError(Exception):
    pass


class RegulusParser(argparse.ArgumentParser):
    """argparse with usage errors raised as UsageError (exit 64 instead of 2)."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# Argument types
# ---------------------------------------------------------------------------


def number(text: str) -> float | Fraction:
    """'0.5' -> float, '1/2' -> exact Fraction."""
    if "/" in text:
        try:
            return Fraction(text)
        except ZeroDivisionError:
            raise argparse.ArgumentTypeError(f"zero denominator in {text!r}") from None
    return float(text)


def _bounded_int(minimum: int) -> Callable[[str], int]:
    def parse(text: str) -> int:
        value = int(text)
        if value < minimum:
            raise argparse.ArgumentTypeError(f"expected an integer >= {minimum}, got {value}")
        return value

    parse.__name__ = f"int>={minimum}"
    return parse


non_negative_int = _bounded_int(0)
positive_int = _bounded_int(1)


def number_list(text: str) -> list:
    return [number(t) for t in text.split(",") if t.strip()]


def int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def tunable(text: str) -> tuple[str, float]:
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    return key.strip(), float(value)


# ---------------------------------------------------------------------------
# Shared flags
# ---------------------------------------------------------------------------


def _output_flags(parser: argparse.ArgumentParser, default_format: str = "json") -> None:
    parser.add_argument("--out", type=Path, default=None, help="Write output here instead of stdout")
    parser.add_argument("--format", choices=["csv", "json"], default=default_format)


def _run_flags(parser: argparse.ArgumentParser, trials: int | None = None) -> None:
    parser.add_argument("--seed", type=non_negative_int, default=None, help="Master seed (falls back to REGULUS_SEED)")
    parser.add_argument("--threads", type=positive_int, default=None, help="Worker processes (default: all cores)")
    if trials is not None:
        parser.add_argument("--trials", type=positive_int, default=trials)
    parser.add_argument(
        "--timing", action="store_true", help="Fill elapsed_s (outputs then differ run to run)"
    )


def _regime_flags(
    parser: argparse.ArgumentParser, need_A: bool = False, required: bool = True
) -> None:
    parser.add_argument("--n", type=int, required=required)
    parser.add_argument("--d", type=int, required=required)
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--p", type=float, default=None)
    group.add_argument("--lambda", dest="lam", type=float, default=None)
    parser.add_argument("--A", type=float, default=None, required=need_A)


def _params(args: argparse.Namespace) -> Params:
    return Params(n=args.n, d=args.d, p=args.p, lambda_=args.lam, A=args.A)


def _seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    if settings.REGULUS_SEED is not None:
        return settings.REGULUS_SEED
    return int(np.random.SeedSequence().entropy)


def _config(args: argparse.Namespace, **resolved: Any) -> dict[str, Any]:
    config = {k: v for k, v in vars(args).items() if k not in ("handler", "threads")}
    config.update(resolved)
    if "lam" in config:
        config["lambda"] = config.pop("lam")
    if isinstance(config.get("out"), Path):
        config["out"] = str(config["out"])
    return config


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
        logger.info(f"Output written to {args.out}")
    else:
        sys.stdout.write(text)


def _emit_record(args, record, config, csv_fields: list[str] | None = None) -> None:
    if not getattr(args, "timing", False) and "elapsed_s" in type(record).model_fields:
        record = record.model_copy(update={"elapsed_s": None})
    if args.format == "csv" and csv_fields is not None:
        _emit(args, to_csv([record], csv_fields, config))
    elif args.format == "csv":
        fields = list(record.model_dump(by_alias=True))
        _emit(args, to_csv([record], fields, config))
    else:
        _emit(args, to_json(record, config))


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> tuple[int, dict]:
    seed = _seed(args)
    stream = RandomStream(seed, 0)
    start = Start.UNIFORM if args.start is None else args.start
    p = None
    if args.load_matching is not None:
        source, p, _ = load_matching(args.load_matching)
    else:
        if args.n is None or args.d is None or (args.p is None and args.lam is None):
            raise UsageError("simulate needs --n, --d and --p or --lambda, or --load-matching")
        params = _params(args)
        p = params.p
        source = params
        if args.fixed or args.dump_matching is not None:
            source = sample_mask(sample_matching(params, stream.child(0)), p, stream.child(1))
            stream = stream.child(_TRACE_TAG)
    if args.dump_matching is not None:
        dump_matching(source, args.dump_matching, p, seed)

    trace = explore(
        source,
        start=start,
        stop=StopRule(args.stop),
        policy=ActivePolicy(args.policy),
        stream=stream,
        max_steps=args.max_steps,
    )
    if args.dump_trace is not None:
        dump_trace(trace, args.dump_trace)

    complete = trace.phases[0].complete
    report = check_counter_identities(trace) if complete else None
    passed = report is None or report.passed
    summary = {
        "mode": trace.mode,
        "start_vertex": trace.start_vertex,
        "steps": trace.steps,
        "tau": trace.tau,
        "start_component": component_size_of_start(trace) if complete else None,
        "phase_sizes": phase_sizes(trace),
        "uniforms_used": trace.uniforms_used,
        "checks": report,
    }
    if trace.stop is StopRule.FULL_GRAPH and trace.finished:
        summary["component_sizes"] = trace.component_sizes()
    config = _config(args, seed=seed, p=p)
    _emit(args, to_json(summary, config))
    logger.info(f"simulate: {trace.steps} steps, tau={trace.tau}, checks passed={passed}")
    return (EXIT_OK if passed else EXIT_FAILED_CHECK), {"steps": trace.steps, "tau": trace.tau}


# ---------------------------------------------------------------------------
# tail / scaling
# ---------------------------------------------------------------------------


def cmd_tail(args) -> tuple[int, dict]:
    params = _params(args)
    seed = _seed(args)
    threads = args.threads = resolve_threads(args.threads)
    est = run_tail(
        params, args.mode.upper(), args.simple, args.trials, seed, args.threshold, threads
    )
    config = _config(args, seed=seed, p=params.p, ci_method=settings.CI_METHOD)
    _emit_record(args, est, config, TAIL_CSV_FIELDS)
    logger.info(f"p_hat={est.p_hat:.6g} [{est.ci_lo:.6g}, {est.ci_hi:.6g}]")
    return EXIT_OK, {"successes": est.successes, "p_hat": est.p_hat}


def cmd_scaling(args) -> tuple[int, dict]:
    seed = _seed(args)
    threads = args.threads = resolve_threads(args.threads)
    report = scaling_diagnostic(
        args.d, args.n, args.lam, args.A_grid, args.trials, seed, args.variant, threads
    )
    config = _config(args, seed=seed)
    if args.format == "csv":
        fields = list(report.points[0].model_dump())
        _emit(args, to_csv(report.points, fields, config))
    else:
        _emit(args, to_json(report, config))
    logger.info(f"slope={report.slope} decreasing={report.decreasing}")
    return EXIT_OK, {"slope": report.slope, "decreasing": report.decreasing}


# ---------------------------------------------------------------------------
# theory
# ---------------------------------------------------------------------------

THEORY_OPS: dict[str, tuple[Callable, list[tuple[str, Callable, Any]]]] = {
    "g-exponent": (
        lambda a: exponent.g_exponent(a.A, a.lam, a.d, a.variant),
        [("--A", float, None), ("--lambda", float, 0.0), ("--d", int, None), ("--variant", str, "theorem11")],
    ),
    "envelope": (
        lambda a: exponent.envelope(a.A, a.n, a.d, a.lam, a.mode, a.c, a.variant),
        [
            ("--A", float, None), ("--n", int, None), ("--d", int, None),
            ("--lambda", float, 0.0), ("--mode", str, "max"), ("--c", float, 1.0),
            ("--variant", str, "theorem11"),
        ],
    ),
    "q-upper": (
        lambda a: bounds.q_upper(a.T, a.p, a.d, a.n),
        [("--T", float, None), ("--p", float, None), ("--d", int, None), ("--n", int, None)],
    ),
    "q-lower": (
        lambda a: bounds.q_lower_curve(a.t, a.p, a.d, a.n, a.A),
        [("--t", float, None), ("--p", float, None), ("--d", int, None), ("--n", int, None), ("--A", float, None)],
    ),
    "a-n": (lambda a: a_n(a.i, a.n), [("--i", float, None), ("--n", int, None)]),
    "t-upper": (lambda a: horizons.t_upper(a.A, a.n, a.d), [("--A", float, None), ("--n", int, None), ("--d", int, None)]),
    "t-lower": (lambda a: horizons.t_lower(a.A, a.n, a.d), [("--A", float, None), ("--n", int, None), ("--d", int, None)]),
    "ballot-regular": (
        lambda a: bounds.ballot_bound_regular(a.t, a.k, a.d, a.p),
        [("--t", int, None), ("--k", int, None), ("--d", int, None), ("--p", number, None)],
    ),
    "ballot-generic": (
        lambda a: bounds.ballot_bound_generic(a.t, a.k, a.h, a.values, a.probs),
        [
            ("--t", int, None), ("--k", int, None), ("--h", int, None),
            ("--values", int_list, None), ("--probs", number_list, None),
        ],
    ),
    "ballot-tail": (
        lambda a: bounds.ballot_tail_sum(a.T, a.d, a.p, a.k_min),
        [("--T", int, None), ("--d", int, None), ("--p", number, None), ("--k-min", int, 1)],
    ),
    "binomial-point": (
        lambda a: bounds.binomial_point_bound(a.N, a.P, a.x),
        [("--N", int, None), ("--P", float, None), ("--x", float, None)],
    ),
    "chernoff": (
        lambda a: bounds.chernoff_bound(a.N, a.P, a.x),
        [("--N", int, None), ("--P", float, None), ("--x", float, None)],
    ),
    "tilt-nu": (
        lambda a: bounds.tilt_nu(a.T_prime, a.n, a.p, a.d),
        [("--T-prime", float, None), ("--n", int, None), ("--p", float, None), ("--d", int, None)],
    ),
    "tilt-gamma": (lambda a: bounds.tilt_gamma(a.p, a.d), [("--p", float, None), ("--d", int, None)]),
    "reflection-density": (
        lambda a: brownian.reflection_density(a.x, a.y, a.mu, a.t, a.z),
        [("--x", float, None), ("--y", float, None), ("--mu", float, None), ("--t", float, None), ("--z", float, None)],
    ),
    "reflection-mass": (
        lambda a: brownian.reflection_mass(a.x, a.y, a.mu, a.t, a.z_lo, a.z_hi),
        [
            ("--x", float, None), ("--y", float, None), ("--mu", float, None), ("--t", float, None),
            ("--z-lo", float, None), ("--z-hi", float, float("inf")),
        ],
    ),
    "two-line": (
        lambda a: _two_line(a),
        [("--A", float, None), ("--n", int, None), ("--d", int, None), ("--epsilon", float, None), ("--lambda", float, 0.0)],
    ),
}


def _two_line(a) -> dict[str, Any]:
    geometry = brownian.brownian_geometry(a.A, a.n, a.d, a.epsilon, a.lam)
    return {
        "T": geometry.T,
        "T_prime": geometry.T_prime,
        "T_second": geometry.T_second,
        "slope1": geometry.slope1,
        "slope2": geometry.slope2,
        "I1": list(geometry.I1),
        "I2": list(geometry.I2),
        "Phi": geometry.Phi,
        "probability": brownian.two_line_probability(geometry),
    }


def cmd_theory(args) -> tuple[int, dict]:
    fn, flags = THEORY_OPS[args.op]
    if args.op == "ballot-generic" and len(args.values) != len(args.probs):
        raise UsageError("--values and --probs differ in length")
    value = fn(args)
    op_args = {
        flag.lstrip("-").replace("-", "_"): getattr(args, _dest(flag)) for flag, _, _ in flags
    }
    result = TheoryResult(op=args.op, args=op_args, value=value)
    config = _config(args)
    _emit(args, to_json(result, config))
    return EXIT_OK, {"value": str(value)}


def _dest(flag: str) -> str:
    name = flag.lstrip("-").replace("-", "_")
    return "lam" if name == "lambda" else name


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------


def cmd_oracle(args) -> tuple[int, dict]:
    config = _config(args)
    if args.kind == "walk":
        if len(args.values) != len(args.probs):
            raise UsageError("--values and --probs differ in length")
        result = lattice.walk_stay_positive_exact(
            args.t, args.start, list(zip(args.values, args.probs)), args.end_at, args.barrier
        )
        payload = {"value": result.value, "exact": result.exact}
    elif args.kind == "binomial":
        payload = {"value": binomial.binomial_exact(args.N, args.P, args.j, args.tail)}
    elif args.kind == "exhaustive":
        result = enumeration.exhaustive_small_graph(
            args.n, args.d, args.p, args.simple, workers=args.threads
        )
        payload = result.to_record()
    else:
        payload = {"value": enumeration.multigraph_connectivity_probability(args.n, args.d)}
    _emit(args, to_json(payload, config))
    return EXIT_OK, {"kind": args.kind}


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(args) -> tuple[int, dict]:
    seed = _seed(args)
    threads = args.threads = resolve_threads(args.threads)
    config = _config(args, seed=seed)
    suite = args.suite

    if suite == "simple-prob":
        est = estimate_simple_prob(args.n, args.d, args.trials, seed, threads)
        _emit_record(args, est, config, TAIL_CSV_FIELDS)
        return EXIT_OK, {"p_hat": est.p_hat}

    if suite == "barrier":
        est = barrier_walk_probability(
            args.x, args.y, args.mu, args.t, args.z_lo, args.z_hi, args.paths, args.steps, seed
        )
        _emit_record(args, est, config)
        return (EXIT_OK if est.within_3se else EXIT_FAILED_CHECK), {"estimate": est.estimate}

    params = _params(args)
    config["p"] = params.p
    if suite in ("counters", "lemma21"):
        report = verify_counters(params, args.trials, seed, args.stop, args.policy, threads)
    elif suite == "coupling":
        report = verify_coupling(params, args.trials, seed, args.policy, threads)
    elif suite == "audit":
        report = lemma_audit(args.audit, params, args.trials, dict(args.tunable), seed, threads)
        _emit_record(args, report, config)
        return (EXIT_FAILED_CHECK if report.status == "FAIL" else EXIT_OK), {"status": report.status}
    elif suite == "sandwich":
        report = sandwich_diagnostic(params, args.k, args.trials, seed, threads)
        _emit_record(args, report, config)
        return (EXIT_OK if report.pathwise_ok else EXIT_FAILED_CHECK), {"middle": report.middle}
    else:
        report = second_moment_diagnostic(params, args.trials, seed, threads)
        _emit_record(args, report, config)
        return EXIT_OK, {"ratio": report.ratio, "p_hat": report.p_hat}

    _emit(args, to_json(report, config))
    status = "PASS" if report.passed else "FAIL"
    logger.info(f"verify {suite}: {status} ({report.checks} checks)")
    return (EXIT_OK if report.passed else EXIT_FAILED_CHECK), {"status": status}


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> RegulusParser:
    parser = RegulusParser(
        prog="regulus",
        description="Bond percolation on random regular graphs near criticality",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=RegulusParser)

    sim = sub.add_parser("simulate", help="One traced exploration")
    _regime_flags(sim, required=False)
    sim.add_argument("--start", type=non_negative_int, default=None, help="Start vertex (default uniform)")
    sim.add_argument("--stop", choices=[s.value for s in StopRule], default=StopRule.FIRST_COMPONENT.value)
    sim.add_argument("--policy", choices=[p.value for p in ActivePolicy], default=ActivePolicy.FIFO.value)
    sim.add_argument("--fixed", action="store_true", help="Sample the whole matching first (FIXED mode)")
    sim.add_argument("--max-steps", type=non_negative_int, default=None)
    sim.add_argument("--dump-trace", type=Path, default=None)
    sim.add_argument("--dump-matching", type=Path, default=None)
    sim.add_argument("--load-matching", type=Path, default=None)
    _run_flags(sim)
    _output_flags(sim)
    sim.set_defaults(handler=cmd_simulate)

    tail = sub.add_parser("tail", help="Estimate a component-size tail probability")
    _regime_flags(tail)
    tail.add_argument("--mode", choices=["vertex", "max"], type=str.lower, default="max")
    tail.add_argument("--simple", action="store_true", help="Condition on a simple graph")
    tail.add_argument("--threshold", type=float, default=None, help="Default A n^{2/3}")
    _run_flags(tail, trials=10_000)
    _output_flags(tail, "csv")
    tail.set_defaults(handler=cmd_tail)

    theory = sub.add_parser("theory", help="Evaluate a closed-form quantity")
    ops = theory.add_subparsers(dest="op", required=True, parser_class=RegulusParser)
    for name, (_, flags) in THEORY_OPS.items():
        op = ops.add_parser(name)
        for flag, kind, default in flags:
            op.add_argument(flag, dest=_dest(flag), type=kind, default=default, required=default is None)
        _output_flags(op)
        op.set_defaults(handler=cmd_theory)

    oracle = sub.add_parser("oracle", help="Exact small-scale computations")
    kinds = oracle.add_subparsers(dest="kind", required=True, parser_class=RegulusParser)
    walk = kinds.add_parser("walk")
    walk.add_argument("--t", type=int, required=True)
    walk.add_argument("--start", type=int, required=True)
    walk.add_argument("--values", type=int_list, required=True)
    walk.add_argument("--probs", type=number_list, required=True)
    walk.add_argument("--end-at", type=int, default=lattice.ANY)
    walk.add_argument("--barrier", type=float, default=0.0)
    binom = kinds.add_parser("binomial")
    binom.add_argument("--N", type=int, required=True)
    binom.add_argument("--P", type=number, required=True)
    binom.add_argument("--j", type=int, required=True)
    binom.add_argument("--tail", action="store_true", help="P(Bin >= j) instead of P(Bin = j)")
    exhaustive = kinds.add_parser("exhaustive")
    exhaustive.add_argument("--n", type=int, required=True)
    exhaustive.add_argument("--d", type=int, required=True)
    exhaustive.add_argument("--p", type=number, required=True)
    exhaustive.add_argument("--simple", action="store_true")
    exhaustive.add_argument("--threads", type=positive_int, default=1)
    connectivity = kinds.add_parser("connectivity")
    connectivity.add_argument("--n", type=int, required=True)
    connectivity.add_argument("--d", type=int, required=True)
    for p in (walk, binom, exhaustive, connectivity):
        _output_flags(p)
        p.set_defaults(handler=cmd_oracle)

    verify = sub.add_parser("verify", help="Identity suites, audits and diagnostics")
    suites = verify.add_subparsers(dest="suite", required=True, parser_class=RegulusParser)
    for name, aliases in (("counters", ["lemma21"]), ("coupling", [])):
        s = suites.add_parser(name, aliases=aliases)
        _regime_flags(s)
        s.add_argument("--policy", choices=[p.value for p in ActivePolicy], default=ActivePolicy.FIFO.value)
        if name == "counters":
            s.add_argument("--stop", choices=[x.value for x in StopRule], default=StopRule.FULL_GRAPH.value)
        _run_flags(s, trials=1_000)
        _output_flags(s)
    simple = suites.add_parser("simple-prob")
    simple.add_argument("--n", type=int, required=True)
    simple.add_argument("--d", type=int, required=True)
    _run_flags(simple, trials=100_000)
    _output_flags(simple, "csv")
    audit = suites.add_parser("audit")
    audit.add_argument("audit", choices=sorted(AUDITS))
    _regime_flags(audit)
    audit.add_argument("--tunable", type=tunable, action="append", default=[], metavar="KEY=VALUE")
    _run_flags(audit, trials=1_000)
    _output_flags(audit)
    sandwich = suites.add_parser("sandwich")
    _regime_flags(sandwich)
    sandwich.add_argument("--k", type=int, required=True)
    _run_flags(sandwich, trials=10_000)
    _output_flags(sandwich)
    moment = suites.add_parser("second-moment")
    _regime_flags(moment, need_A=True)
    _run_flags(moment, trials=1_000)
    _output_flags(moment)
    barrier = suites.add_parser("barrier")
    for flag in ("--x", "--y", "--mu", "--t", "--z-lo"):
        barrier.add_argument(flag, type=float, required=True)
    barrier.add_argument("--z-hi", type=float, default=float("inf"))
    barrier.add_argument("--paths", type=int, default=100_000)
    barrier.add_argument("--steps", type=int, default=100)
    _run_flags(barrier)
    _output_flags(barrier)
    for s in suites.choices.values():
        s.set_defaults(handler=cmd_verify)

    scaling = sub.add_parser("scaling", help="Fit estimated tails against the exponent")
    scaling.add_argument("--n", type=int, required=True)
    scaling.add_argument("--d", type=int, required=True)
    scaling.add_argument("--lambda", dest="lam", type=float, default=0.0)
    scaling.add_argument("--A-grid", dest="A_grid", type=number_list, required=True)
    scaling.add_argument(
        "--variant", choices=[v.value for v in exponent.ExponentVariant], default="theorem11"
    )
    _run_flags(scaling, trials=10_000)
    _output_flags(scaling)
    scaling.set_defaults(handler=cmd_scaling)
    return parser


def dispatch(argv: Sequence[str] | None = None) -> int:
    """Parse argv, run the subcommand, return the exit code."""
    started = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_USAGE

    command = " ".join(filter(None, [args.command, getattr(args, "op", None), getattr(args, "kind", None), getattr(args, "suite", None)]))
    with bind_run(command=command, seed=getattr(args, "seed", None)):
        try:
            code, outcome = args.handler(args)
        except UsageError as e:
            sys.stderr.write(f"{e}\n")
            return EXIT_USAGE
        except (RegulusError, ValidationError) as e:
            logger.error(f"{command}: {e}")
            record_run(command, _config(args), {"error": str(e)})
            return EXIT_INFEASIBLE
        except ValueError as e:
            logger.error(f"{command}: invalid argument: {e}")
            record_run(command, _config(args), {"error": str(e)})
            sys.stderr.write(f"regulus: {e}\n")
            return EXIT_USAGE
        finally:
            flush_tracing()

        outcome["exit_code"] = code
        outcome["elapsed_s"] = time.perf_counter() - started
        outcome["threads"] = getattr(args, "threads", None)
        record_run(command, json.loads(json.dumps(_config(args), default=str)), outcome)
    if settings.METRICS_TEXTFILE:
        export_textfile(settings.METRICS_TEXTFILE)
    return code


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
