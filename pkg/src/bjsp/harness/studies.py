"""Desk-scale experiment studies producing CSV text.

Every study is a deterministic function of its spec.  Rows come out in
instance order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from ..exact import SearchConfig, SearchLimitExceeded, branch_and_bound_opt, min_machines
from ..greedy import lpt, lsm, lspt
from ..model import Instance, classify, makespan
from ..robust import (metrics_csv, normalized_metrics, perturb, sample_scenarios,
                      solution_pool, Scenario)
from .generator import Generated, GeneratorConfig, generate_batch

KINDS = ("machine-count", "halving", "g-sweep", "robustness-scatter", "ratio-study")


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    seed: int = 0
    count: int = 10
    generator: GeneratorConfig | None = None
    theta: Fraction | None = None
    periods: int = 8
    F: Fraction = Fraction(2)
    pool_size: int = 20
    scenarios: int = 50
    g_values: tuple[int, ...] = (1, 2, 3, 4)
    node_limit: int = 2_000_000
    # ratio-study box
    n_max: int = 6
    p_max: int = 4
    m_max: int = 3
    box_g: tuple[int, ...] = (1, 2)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown study {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.count < 0 or self.pool_size < 1 or self.scenarios < 1:
            raise ValueError("count must be >= 0, pool and scenario sizes >= 1")

    def batch(self) -> list[Generated]:
        cfg = self.generator or GeneratorConfig(seed=self.seed)
        return generate_batch(cfg, self.count)


def iid(i: int) -> str:
    return f"inst{i:03d}"


def _csv(header: str, rows: Iterable[Sequence]) -> str:
    return "\n".join([header, *(",".join(map(str, r)) for r in rows)]) + "\n"


def _vopt(inst: Instance, deadline: int, spec: ExperimentSpec) -> str | int:
    try:
        v = min_machines(inst, deadline, spec.node_limit)
    except SearchLimitExceeded:
        return "limit"
    return "infeasible" if v is None else v


def run_machine_count_study(spec: ExperimentSpec) -> str:
    rows = []
    for i, gen in enumerate(spec.batch()):
        rows.append((iid(i), gen.baseline.machine_count, _vopt(gen.instance, gen.deadline, spec)))
    return _csv("instance_id,V_hist,V_opt", rows)


def halve(inst: Instance) -> Instance:
    return perturb(inst, Scenario((Fraction(1, 2),) * inst.n, Fraction(2)))


def run_halving_study(spec: ExperimentSpec) -> str:
    rows = []
    for i, gen in enumerate(spec.batch()):
        inst, d = gen.instance, gen.deadline
        rows.append((iid(i), _vopt(inst, d, spec), _vopt(halve(inst), d, spec)))
    return _csv("instance_id,V_opt,V_opt_halved", rows)


def run_g_sweep(spec: ExperimentSpec) -> str:
    rows = []
    for i, gen in enumerate(spec.batch()):
        inst, d = gen.instance, gen.deadline
        for g in spec.g_values:
            rows.append((iid(i), g, _vopt(Instance(inst.m, g, inst.p), d, spec)))
    return _csv("instance_id,g,V_opt", rows)


def lex_theta(n: int, deadline: int) -> Fraction:
    """Small enough that theta * sum 2**C_j < 1 for any schedule meeting D."""
    return Fraction(1, max(n, 1) * 2 ** (deadline + 1))


def run_robustness_scatter(spec: ExperimentSpec) -> str:
    lines = []
    for i, gen in enumerate(spec.batch()):
        inst, d = gen.instance, gen.deadline
        theta = lex_theta(inst.n, d) if spec.theta is None else spec.theta
        pool = solution_pool(inst, d, spec.pool_size, seed=(spec.seed, i, 0))
        scs = sample_scenarios(inst, spec.F, spec.scenarios, seed=(spec.seed, i, 1))
        ids = [f"{iid(i)}:s{k:02d}" for k in range(len(pool))]
        rows = normalized_metrics(pool, scs, theta, d, ids)
        lines.extend(metrics_csv(rows).splitlines()[1:])
    return "\n".join(["schedule_id,F_norm,V_norm,price,deadline_violations", *lines]) + "\n"


def enumerate_box(n_max: int, p_max: int, m_max: int, g_values: Sequence[int],
                  n_min: int = 1) -> Iterator[Instance]:
    """Every instance with n_min <= n <= n_max, p_j <= p_max, m <= m_max.

    Processing times are listed in non-increasing order, one instance per
    multiset.
    """
    for m in range(1, m_max + 1):
        for g in g_values:
            for n in range(n_min, n_max + 1):
                for p in itertools.combinations_with_replacement(range(p_max, 0, -1), n):
                    yield Instance(m, g, p)


def witness(inst: Instance) -> str:
    return f"m={inst.m};g={inst.g};p={'-'.join(map(str, inst.p))}"


ALGOS: dict[str, Callable] = {"lpt": lpt, "lspt": lspt, "lsm": lsm}


def ratio_table(instances: Iterable[Instance], algos: dict[str, Callable] = ALGOS,
                cfg: SearchConfig = SearchConfig()) -> dict[tuple[str, str], tuple[Fraction, Instance]]:
    """Largest makespan / OPT per (algorithm, class); classes include
    ``all``, ``long-g1`` and ``short-g1``."""
    best: dict[tuple[str, str], tuple[Fraction, Instance]] = {}
    for inst in instances:
        res = branch_and_bound_opt(inst, cfg)
        if res.status != "optimal":
            continue
        cls = classify(inst)
        tags = ["all", cls] + ([f"{cls}-g1"] if inst.g == 1 and cls != "mixed" else [])
        for name, algo in algos.items():
            r = Fraction(makespan(algo(inst)), res.value)
            for tag in tags:
                key = (name, tag)
                if key not in best or r > best[key][0]:
                    best[key] = (r, inst)
    return best


def run_ratio_study(spec: ExperimentSpec) -> str:
    box = enumerate_box(spec.n_max, spec.p_max, spec.m_max, spec.box_g)
    table = ratio_table(box, cfg=SearchConfig(node_limit=spec.node_limit))
    rows = [(a, c, r, witness(w)) for (a, c), (r, w) in sorted(table.items())]
    return _csv("algo,class,max_ratio,witness_instance", rows)


STUDIES: dict[str, Callable[[ExperimentSpec], str]] = {
    "machine-count": run_machine_count_study,
    "halving": run_halving_study,
    "g-sweep": run_g_sweep,
    "robustness-scatter": run_robustness_scatter,
    "ratio-study": run_ratio_study,
}


def run_study(spec: ExperimentSpec) -> str:
    return STUDIES[spec.kind](spec)
