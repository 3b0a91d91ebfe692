"""Command-line entry point: gen, solve, predict, bench."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .actions import Infeasible, Push, make_push_spec
from .bench import (
    PUBLISHED_SPEEDUP_PCT,
    BenchConfig,
    ConfigError,
    GenerationFailure,
    generate_instance,
    load_config,
    results_csv,
    run_experiment,
    summarize,
    summary_csv,
)
from .planner import Method, Termination, count_actions, run_sorter, write_trace
from .push_physics import InfeasibleStart, predict_push, swept_band
from .world import ScenarioError, dumps_world, heuristic, load_world, round_point, validate

EXIT_OK, EXIT_BAD_INPUT, EXIT_INFEASIBLE = 0, 1, 2

METHODS = {"pickplace": Method.PICK_PLACE_ONLY, "mixed": Method.PUSH_PLUS_PICK_PLACE}


def _config(args) -> BenchConfig:
    return load_config(args.config) if args.config else BenchConfig()


def _scenario(path):
    w = load_world(path)
    problems = validate(w)
    if problems:
        raise ScenarioError("; ".join(v.message for v in problems))
    return w


def cmd_gen(args) -> int:
    w = generate_instance(args.n, args.seed, _config(args))
    text = dumps_world(w)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = _config(args)
    w = _scenario(args.scenario)
    trace = run_sorter(w, args.seed, METHODS[args.method], cfg.params)
    if args.trace:
        write_trace(trace, args.trace)
    pushes, picks = count_actions(trace)
    print(
        f"total_time_s={trace.total_time:.6f} steps={len(trace.steps)} "
        f"pushes={pushes} picks={picks} terminated={trace.terminated.value}"
    )
    for rej in trace.final_rejected:
        print(f"  rejected object={rej.object_id} action={rej.action} reason={rej.reason.value}")
    for c in trace.final_non_improving:
        kind = "push" if isinstance(c.action, Push) else "pick_place"
        print(f"  non_improving object={c.action.object_id} action={kind} h={heuristic(c.predicted):.6f}")
    return EXIT_OK if trace.terminated == Termination.SOLVED else EXIT_INFEASIBLE


def cmd_predict(args) -> int:
    cfg = _config(args)
    w = _scenario(args.scenario)
    try:
        obj = w.object(args.object)
    except KeyError as e:
        raise ScenarioError(str(e)) from None
    spec = make_push_spec(obj, w, cfg.action, cfg.sim.penetration_eps)
    out = predict_push(w, spec, cfg.sim)
    band = swept_band(spec)
    report = {
        "push_spec": {
            "start": round_point(spec.start),
            "end": round_point(spec.end),
            "axis_angle": round(spec.axis_angle, 6),
            "pusher_length": spec.pusher_length,
            "pusher_radius": spec.pusher_radius,
            "length": round(spec.length, 6),
        },
        "band_contacts": sorted(o.id for o in w.objects if band.touches_disc(o.center, o.radius)),
        "outcome": {
            "displaced_ids": sorted(out.displaced_ids),
            "any_off_table": out.any_off_table,
            "max_residual_penetration": out.max_residual_penetration,
            "final_positions": {str(o.id): round_point(o.center) for o in out.final.objects},
        },
    }
    print(json.dumps(report, indent=2))
    return EXIT_INFEASIBLE if out.any_off_table else EXIT_OK


def cmd_bench(args) -> int:
    cfg = _config(args)
    failures: list = []
    rows = run_experiment(cfg, failures)
    Path(args.out).write_text(results_csv(rows))
    s = summarize(rows)
    if args.summary:
        Path(args.summary).write_text(summary_csv(s))
    print("n  mean_pickplace_s  mean_mixed_s")
    for n, b, m in s.per_n:
        print(f"{n:<2d} {b:16.2f} {m:13.2f}")
    print(
        f"overall_speedup_pct={s.speedup_pct:.2f} (published reference {PUBLISHED_SPEEDUP_PCT}) "
        f"pairs={s.pairs} excluded={s.excluded}"
    )
    return EXIT_INFEASIBLE if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pushsort", description=__doc__)
    p.add_argument("--config", help="JSON config mirroring BenchConfig")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a random scenario")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run one sorting episode")
    s.add_argument("--scenario", required=True)
    s.add_argument("--method", choices=sorted(METHODS), required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--trace", help="JSON-lines trace output")
    s.set_defaults(func=cmd_solve)

    d = sub.add_parser("predict", help="show the push of one object")
    d.add_argument("--scenario", required=True)
    d.add_argument("--object", type=int, required=True)
    d.set_defaults(func=cmd_predict)

    b = sub.add_parser("bench", help="compare both methods on seeded instances")
    b.add_argument("--config", default=argparse.SUPPRESS)
    b.add_argument("--out", default="results.csv")
    b.add_argument("--summary")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_BAD_INPUT
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (GenerationFailure, Infeasible, InfeasibleStart) as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ScenarioError, ConfigError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
