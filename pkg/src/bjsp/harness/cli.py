"""Command line entry point.

Exit codes: 0 success, 1 infeasible or unproven result, 2 usage or
input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from ..exact import (DeadlineInfeasible, SearchConfig, branch_and_bound_opt, exact_lex)
from ..greedy import LsmConfig, lpt, lsm, lspt
from ..milp import emit_bjsp_model, emit_lexopt_model, lp_text
from ..model import Instance, InstanceError, bounds, check_feasible, makespan
from ..robust import (load_scenarios, metrics_csv, normalized_metrics, sample_scenarios,
                      solution_pool)
from .generator import GeneratorConfig, generate_batch
from .io import dump_instance, dump_schedule, read_instance
from .studies import KINDS, ExperimentSpec, lex_theta, run_study


class UsageError(Exception):
    pass


def _seed_default() -> int:
    raw = os.environ.get("BJSP_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"BJSP_SEED must be an integer, got {raw!r}") from None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _glist(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers: {text!r}") from None
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("g values must be >= 1")
    return vals


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load(args) -> Instance:
    if args.instance is None:
        raise UsageError("--instance is required")
    try:
        inst = read_instance(args.instance)
    except (OSError, ValueError, InstanceError) as exc:
        raise UsageError(f"cannot read instance {args.instance}: {exc}") from None
    if getattr(args, "g", None) is not None:
        if len(args.g) != 1:
            raise UsageError("--g takes a single value here")
        inst = Instance(inst.m, args.g[0], inst.p)
    return inst


def _stem(path: str) -> str:
    name = Path(path).name
    return name[:-5] if name.endswith(".json") else Path(path).stem


def cmd_solve(args) -> int:
    inst = _load(args)
    status, extra = "heuristic", {}
    if args.algo == "exact":
        if args.deadline is not None:
            try:
                sched = exact_lex(inst, args.deadline)
            except DeadlineInfeasible as exc:
                print(f"error: {exc}", file=sys.stderr)
                return 1
            status = "optimal"
            extra = {"v": sched.info["v"], "W": str(sched.info["W"])}
        else:
            res = branch_and_bound_opt(inst, SearchConfig(node_limit=args.node_limit))
            if res.schedule is None:
                print("error: search gave up without a schedule", file=sys.stderr)
                return 1
            sched, status = res.schedule, res.status
    elif args.algo == "lsm":
        sched = lsm(inst, LsmConfig(allow_augmentation=args.augment))
        extra = {"machine_budget": sched.info["machine_budget"]}
    else:
        sched = {"lpt": lpt, "lspt": lspt}[args.algo](inst)
    budget = extra.get("machine_budget", inst.m)
    if not check_feasible(inst, sched, m=budget).feasible:  # pragma: no cover - defensive
        print("error: produced an infeasible schedule", file=sys.stderr)
        return 1
    extra.update(makespan=makespan(sched), algo=args.algo)
    _emit(dump_schedule(sched, status, extra), args.out)
    return 0 if status in ("optimal", "heuristic") else 1


def cmd_bound(args) -> int:
    b = bounds(_load(args))
    data = {"basic_lb": b.basic_lb, "long_lb": None if b.long_lb is None else str(b.long_lb),
            "classification": b.classification, "best": b.best}
    _emit(json.dumps(data, sort_keys=True) + "\n", args.out)
    return 0


def cmd_emit_lp(args) -> int:
    inst = _load(args)
    name = _stem(args.instance)
    try:
        if args.form == "bjsp":
            model = emit_bjsp_model(inst, args.horizon, name)
        else:
            if args.deadline is None:
                raise UsageError("--deadline is required for the lexopt form")
            model = emit_lexopt_model(inst, args.deadline, args.theta, args.periods, name)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = lp_text(model)
    if args.out and Path(args.out).is_dir():
        (Path(args.out) / f"{model.name}.{model.form}.lp").write_text(text, encoding="ascii")
    else:
        _emit(text, args.out)
    return 0


def cmd_robust_run(args) -> int:
    inst = _load(args)
    if args.deadline is None:
        raise UsageError("--deadline is required")
    if args.scenario_file:
        try:
            scs = load_scenarios(args.scenario_file)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read scenarios: {exc}") from None
    else:
        scs = sample_scenarios(inst, args.F, args.scenarios, seed=(args.seed, 1))
    pool = solution_pool(inst, args.deadline, args.pool, seed=(args.seed, 0))
    if not pool:
        print(f"error: no schedule meets deadline {args.deadline}", file=sys.stderr)
        return 1
    theta = lex_theta(inst.n, args.deadline) if args.theta is None else args.theta
    _emit(metrics_csv(normalized_metrics(pool, scs, theta, args.deadline)), args.out)
    return 0


def cmd_gen(args) -> int:
    if args.out is None:
        raise UsageError("--out directory is required")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, gen in enumerate(generate_batch(GeneratorConfig(seed=args.seed), args.count)):
        ident = f"inst{i:03d}"
        data = json.loads(dump_instance(gen.instance, ident))
        data["deadline"] = gen.deadline
        (out / f"{ident}.json").write_text(json.dumps(data, sort_keys=True) + "\n")
        (out / f"{ident}.baseline.json").write_text(dump_schedule(gen.baseline, "baseline"))
    return 0


def cmd_bench(args) -> int:
    kw = dict(kind=args.study, seed=args.seed, count=args.count, theta=args.theta,
              F=args.F, pool_size=args.pool, scenarios=args.scenarios,
              node_limit=args.node_limit)
    if args.g is not None:
        kw["g_values"] = args.g
    _emit(run_study(ExperimentSpec(**kw)), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bjsp", description="bounded job start scheduling toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("--instance", help="instance JSON file")
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--seed", type=int, default=None, help="random seed (default $BJSP_SEED or 0)")
        p.add_argument("--theta", type=_fraction, default=None,
                       help="weight on the completion term (default tiny enough for lex order)")
        p.add_argument("--deadline", type=int, default=None, help="makespan deadline D")
        p.add_argument("--periods", type=int, default=8, help="periods in the lexopt model")
        p.add_argument("--F", type=_fraction, default=Fraction(2),
                       help="perturbation spread; factors lie in [1/F, F]")
        p.add_argument("--g", type=_glist, default=None,
                       help="start limit, or a comma list for bench g-sweep")
        p.add_argument("--node-limit", type=int, default=2_000_000,
                       help="memo size at which exact search gives up")
        return p

    p = common(sub.add_parser("solve", help="schedule an instance"))
    p.add_argument("--algo", choices=("lpt", "lspt", "lsm", "exact"), default="lpt")
    p.add_argument("--augment", action="store_true", help="let LSM use extra machines")
    p.set_defaults(fn=cmd_solve)

    p = common(sub.add_parser("bound", help="lower bounds and classification"))
    p.set_defaults(fn=cmd_bound)

    p = common(sub.add_parser("emit-lp", help="write a time-indexed model"))
    p.add_argument("--form", choices=("bjsp", "lexopt"), default="bjsp")
    p.add_argument("--horizon", type=int, default=None, help="time-index horizon")
    p.set_defaults(fn=cmd_emit_lp)

    p = common(sub.add_parser("robust-run", help="pool, scenarios and normalized metrics"))
    p.add_argument("--pool", type=int, default=20)
    p.add_argument("--scenarios", type=int, default=50)
    p.add_argument("--scenario-file", default=None, help="JSON scenario to use instead of sampling")
    p.set_defaults(fn=cmd_robust_run)

    p = common(sub.add_parser("gen", help="write synthetic instances"), instance=False)
    p.add_argument("--count", type=int, default=10)
    p.set_defaults(fn=cmd_gen)

    p = common(sub.add_parser("bench", help="run a study and write CSV"), instance=False)
    p.add_argument("study", choices=KINDS)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--pool", type=int, default=20)
    p.add_argument("--scenarios", type=int, default=50)
    p.set_defaults(fn=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.seed is None:
            args.seed = _seed_default()
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
