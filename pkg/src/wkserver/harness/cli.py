"""Command-line entry point: ``wks <subcommand> ...``.

Exit codes: 0 success, 1 a verification or statistical check failed,
2 usage error, 3 resource guard tripped.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from fractions import Fraction

from ..adversary import (
    DEFAULT_MAX_REQUESTS,
    adversary_serve,
    c_closed_form,
    c_seq,
    choose_beta,
    expected_calls,
    generate_trace,
)
from ..core import (
    Configuration,
    ConsistencyError,
    DomainError,
    RangeLimitError,
    VerificationError,
)
from ..offline import opt_cost_dp
from ..setsys import build_set_system, n_seq, verify_set_system
from .experiments import (
    OPT_MODES,
    ExperimentConfig,
    conditioned_strategy_experiment,
    coupon_call_stats,
    run_trials,
    summarize_trials,
)
from .formats import read_trace, write_results, write_trace
from .stats import StatsConfig, check_mean_at_least, check_mean_equals

log = logging.getLogger("wkserver")

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from e


def _stats(args) -> StatsConfig:
    if getattr(args, "stats_config", None):
        return StatsConfig.load(args.stats_config)
    return StatsConfig(confidence=args.confidence)


def _beta(args) -> int:
    if args.beta is not None:
        return args.beta
    if args.epsilon is not None:
        return choose_beta(args.k, args.epsilon)
    raise DomainError("give --beta or --epsilon")


def cmd_gen(args) -> int:
    beta = _beta(args)
    trace = generate_trace(args.k, beta, args.seed, args.max_requests)
    if args.out:
        write_trace(trace, args.out)
    print(f"k={trace.k} beta={beta} seed={trace.seed} points={trace.space.size} "
          f"calls={len(trace.calls)} requests={len(trace.requests)}")
    return EXIT_OK


def cmd_verify_setsys(args) -> int:
    ok = True
    for level in range(args.lmin, args.lmax + 1):
        t0 = time.perf_counter()
        report = verify_set_system(build_set_system(range(n_seq(level)), level), level)
        dt = time.perf_counter() - t0
        for c in report.checks:
            tag = "PASS" if c.passed else "FAIL"
            extra = f" at p={c.counterexample}" if c.counterexample is not None else ""
            print(f"[{tag}] level {level} ({n_seq(level)} points) {c.name}{extra} {c.detail}".rstrip())
        log.info("level %d verified in %.3fs", level, dt)
        ok &= report.ok
    return EXIT_OK if ok else EXIT_CHECK


def cmd_coupon(args) -> int:
    stats = coupon_call_stats(args.k, args.beta or 2, args.trials, args.seed, _stats(args))
    target = expected_calls(args.k)
    check = check_mean_equals(f"mean calls (k={args.k}) vs {target}", stats["calls"], target)
    print(check.line())
    return EXIT_OK if check.passed else EXIT_CHECK


def cmd_lemma_alg(args) -> int:
    stats = conditioned_strategy_experiment(
        args.level, args.beta, args.algorithm, args.trials, args.seed, args.servers, _stats(args)
    )
    bound = args.beta**args.level
    check = check_mean_at_least(f"{args.algorithm} cost on level-{args.level} call >= {bound}",
                                stats["alg"], bound)
    print(check.line())
    return EXIT_OK if check.passed else EXIT_CHECK


def cmd_ratio(args) -> int:
    cfg = ExperimentConfig(
        k=args.k, trials=args.trials, seed=args.seed, beta=args.beta, epsilon=args.epsilon,
        algorithm=args.algorithm, opt_mode=args.opt_mode, alpha=args.alpha, jobs=args.jobs,
        max_requests=args.max_requests, stats=_stats(args),
    )
    records = run_trials(cfg)
    stats = summarize_trials(cfg, records)
    if args.out:
        write_results(args.out, cfg.echo(), records, stats, args.format)
    for name, q in stats.quantities.items():
        print(f"{name:>6}: mean {q.mean:.6g} +/- {q.half_width:.3g} (n={q.count})")
    g = stats.gap
    print(f"ratio alg/opt = {stats['alg'].mean / stats['opt'].mean:.6g}")
    tag = "PASS" if g.value > 0 else "FAIL"
    print(f"[{tag}] yao gap at alpha={g.alpha:.6g}: {g.value:.6g} +/- {g.half_width:.3g}")
    return EXIT_OK if g.value > 0 else EXIT_CHECK


def cmd_opt(args) -> int:
    trace = read_trace(args.trace)
    initial = Configuration.at(trace.space, trace.k, args.start)
    opt = opt_cost_dp(trace.space, trace.weights, trace.requests, initial)
    _, ledger = adversary_serve(trace, initial)
    print(json.dumps({"opt": opt, "adversary": ledger.total, "requests": len(trace.requests)}))
    return EXIT_OK


def cmd_beta(args) -> int:
    out = {"k": args.k}
    if args.epsilon is not None:
        out["epsilon"] = str(args.epsilon)
        out["beta"] = choose_beta(args.k, args.epsilon)
    beta = args.beta if args.beta is not None else out.get("beta")
    if beta is None:
        raise DomainError("give --beta or --epsilon")
    out["c"] = [c_seq(beta, level) for level in range(args.k)]
    if args.k >= 2:
        out["c_closed_form"] = c_closed_form(beta, args.k)
    out["expected_calls"] = str(expected_calls(args.k))
    print(json.dumps(out))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wks", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, beta=True, trials=None):
        sp.add_argument("--k", type=int, required=True)
        if beta:
            g = sp.add_mutually_exclusive_group()
            g.add_argument("--beta", type=int)
            g.add_argument("--epsilon", type=_fraction)
        sp.add_argument("--seed", type=int, default=0)
        if trials is not None:
            sp.add_argument("--trials", type=int, default=trials)
            sp.add_argument("--confidence", type=float, default=0.99)
            sp.add_argument("--stats-config", help="JSON file with statistical thresholds")

    sp = sub.add_parser("gen", help="emit one adversarial trace")
    common(sp)
    sp.add_argument("--out")
    sp.add_argument("--max-requests", type=int, default=DEFAULT_MAX_REQUESTS)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("verify-setsys", help="check set-system properties for a range of levels")
    sp.add_argument("--lmin", type=int, default=1)
    sp.add_argument("--lmax", type=int, default=5)
    sp.set_defaults(func=cmd_verify_setsys)

    sp = sub.add_parser("coupon", help="mean number of strategy calls vs its exact expectation")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--beta", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=10**5)
    sp.add_argument("--confidence", type=float, default=0.99)
    sp.add_argument("--stats-config")
    sp.set_defaults(func=cmd_coupon)

    sp = sub.add_parser("lemma-alg", help="online cost of one conditioned strategy call")
    sp.add_argument("--level", type=int, required=True)
    sp.add_argument("--beta", type=int, default=4)
    sp.add_argument("--servers", type=int, help="server count (default level + 1)")
    sp.add_argument("--algorithm", default="cheapest")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=10**4)
    sp.add_argument("--confidence", type=float, default=0.99)
    sp.add_argument("--stats-config")
    sp.set_defaults(func=cmd_lemma_alg)

    sp = sub.add_parser("ratio", help="estimate E[ALG], E[OPT] and the Yao gap")
    common(sp, trials=1000)
    sp.add_argument("--algorithm", default="cheapest")
    sp.add_argument("--opt-mode", choices=OPT_MODES, default="auto")
    sp.add_argument("--alpha", type=_fraction)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--max-requests", type=int, default=DEFAULT_MAX_REQUESTS)
    sp.set_defaults(func=cmd_ratio)

    sp = sub.add_parser("opt", help="offline optimum of a trace file")
    sp.add_argument("--trace", required=True)
    sp.add_argument("--start", type=int, default=0, help="initial point of every server")
    sp.set_defaults(func=cmd_opt)

    sp = sub.add_parser("beta", help="print choose_beta and the c-sequence")
    common(sp)
    sp.set_defaults(func=cmd_beta)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except RangeLimitError as e:
        print(f"resource guard: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except DomainError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ConsistencyError, VerificationError) as e:
        print(f"check failed: {e}", file=sys.stderr)
        return EXIT_CHECK
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
