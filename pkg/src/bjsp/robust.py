"""Two-stage robust scheduling under duration uncertainty.

Stage 1 fixes start times on the nominal instance.  Stage 2 sees the
realised durations, keeps every start, and re-assigns machines greedily;
the number of machines it needs against the best possible for the
realised instance is the price of robustness.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .exact import branch_and_bound_opt, exact_lex, min_machines
from .greedy import lpt
from .milp import emit_lexopt_model, write_lp_file
from .model import (Instance, Schedule, assign_machines, check_feasible, compactify,
                    makespan)


@dataclass(frozen=True)
class Scenario:
    factors: tuple[Fraction, ...]
    F: Fraction = Fraction(1)

    def __post_init__(self):
        F = Fraction(self.F)
        fs = tuple(Fraction(f) for f in self.factors)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "factors", fs)
        if F < 1:
            raise ValueError("F must be >= 1")
        bad = [j for j, f in enumerate(fs, 1) if not (1 / F <= f <= F)]
        if bad:
            raise ValueError(f"factors of jobs {bad} lie outside [1/F, F]")

    @classmethod
    def identity(cls, n: int) -> "Scenario":
        return cls((Fraction(1),) * n)

    def to_json(self) -> str:
        data = {"F": str(self.F),
                "factors": {str(j): str(f) for j, f in enumerate(self.factors, 1)}}
        return json.dumps(data, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        data = json.loads(text)
        fac = data["factors"]
        n = len(fac)
        if sorted(map(int, fac)) != list(range(1, n + 1)):
            raise ValueError("factors must be keyed by jobs 1..n")
        return cls(tuple(Fraction(fac[str(j)]) for j in range(1, n + 1)), Fraction(data["F"]))


def perturb(instance: Instance, sc: Scenario) -> Instance:
    """p_j -> max(1, ceil(f_j p_j))."""
    if len(sc.factors) != instance.n:
        raise ValueError(f"scenario has {len(sc.factors)} factors for {instance.n} jobs")
    p = tuple(max(1, math.ceil(f * pj)) for f, pj in zip(sc.factors, instance.p))
    return Instance(instance.m, instance.g, p)


def sample_scenarios(instance: Instance, F, k: int, seed=None,
                     max_denominator: int = 1000) -> list[Scenario]:
    """``k`` scenarios with factors log-uniform on [1/F, F]."""
    F = Fraction(F)
    if F < 1 or k < 1:
        raise ValueError("need F >= 1 and k >= 1")
    rng = np.random.default_rng(seed)
    span = math.log(F)
    out = []
    for _ in range(k):
        raw = np.exp(rng.uniform(-span, span, instance.n)) if span else np.ones(instance.n)
        fs = tuple(min(max(Fraction(float(x)).limit_denominator(max_denominator), 1 / F), F)
                   for x in raw)
        out.append(Scenario(fs, F))
    return out


@dataclass(frozen=True, order=True)
class CharacteristicValue:
    """Ordered by machine count, then by W = sum 2**C_j."""

    v: int
    weight: int = field(repr=False)
    profile: tuple[int, ...] = field(compare=False)
    theta: Fraction = field(compare=False, default=Fraction(0))

    @property
    def value(self) -> Fraction:
        return self.v + self.theta * self.weight


def characteristic_value(schedule: Schedule, theta=0) -> CharacteristicValue:
    if schedule.machines is None:
        schedule = assign_machines(schedule.instance, schedule.starts)
    cs = tuple(sorted(schedule.completions.values(), reverse=True))
    return CharacteristicValue(schedule.machine_count, sum(1 << c for c in cs), cs,
                               Fraction(theta))


def stage1(instance: Instance, deadline: int, theta=None, backend: str = "exact",
           periods: int = 8, out=None, name: str = "instance"):
    """Exact lexicographic schedule, or (``backend="emit"``) the LP file path."""
    if backend == "exact":
        return exact_lex(instance, deadline)
    if backend == "emit":
        model = emit_lexopt_model(instance, deadline, theta, periods, name)
        return write_lp_file(model, "." if out is None else out)
    raise ValueError(f"unknown backend {backend!r}")


def stage2_recover(schedule: Schedule, realised: Instance, deadline: int | None = None) -> Schedule:
    """Keep every start; give each job the lowest machine free over its new
    occupancy."""
    if realised.n != schedule.instance.n:
        raise ValueError("realised instance must have the same jobs")
    out = assign_machines(realised, schedule.starts)
    late = []
    if deadline is not None:
        late = sorted(j for j, c in out.completions.items() if c > deadline)
    return Schedule(realised, out.starts, out.machines,
                    {"deadline": deadline, "deadline_violations": late})


def nominal_machines(realised: Instance, deadline: int) -> tuple[int, bool]:
    """Fewest machines any schedule of ``realised`` needs to meet the deadline.

    The count is not capped by ``realised.m``.  When no machine count
    meets the deadline, the machine count of a minimum-makespan schedule
    with unlimited machines is returned and the flag is False.
    """
    n = realised.n
    v = min_machines(realised, deadline, cap=max(n, 1))
    if v is not None:
        return v, True
    wide = Instance(max(n, 1), realised.g, realised.p)
    # with a machine per job LPT meets the start bound, so this returns at the root
    best = branch_and_bound_opt(wide).value
    return min_machines(wide, best, cap=max(n, 1)), False


def price_of_robustness(recovered: Schedule, realised: Instance, deadline: int) -> Fraction:
    v, _ = nominal_machines(realised, deadline)
    return Fraction(recovered.machine_count, v)


class TwoStageResult(NamedTuple):
    initial: Schedule
    scenario: Scenario
    recovered: Schedule
    nominal_v: int
    price: Fraction
    at_deadline: bool


def two_stage(instance: Instance, scenario: Scenario, deadline: int,
              initial: Schedule | None = None) -> TwoStageResult:
    initial = stage1(instance, deadline) if initial is None else initial
    realised = perturb(instance, scenario)
    rec = stage2_recover(initial, realised, deadline)
    v, flag = nominal_machines(realised, deadline)
    return TwoStageResult(initial, scenario, rec, v, Fraction(rec.machine_count, v), flag)


# ---------------------------------------------------------------------------
# solution pools


def _jittered(instance: Instance, order: Sequence[int], cap: int, rng, jitter: float) -> dict[int, int]:
    """Greedy with cap machines where each job may skip a few available slots."""
    alive: dict[int, int] = {}
    begin: dict[int, int] = {}
    starts = {}

    def free(t, p):
        return begin.get(t, 0) < instance.g and all(alive.get(u, 0) < cap for u in range(t, t + p))

    for j in order:
        p = instance.proc(j)
        t = 1
        while not free(t, p):
            t += 1
        skips = int(rng.geometric(1 - jitter)) - 1 if jitter > 0 else 0
        for _ in range(skips):
            t += 1
            while not free(t, p):
                t += 1
        starts[j] = t
        begin[t] = begin.get(t, 0) + 1
        for u in range(t, t + p):
            alive[u] = alive.get(u, 0) + 1
    return starts


def solution_pool(instance: Instance, deadline: int, k: int, seed=None,
                  jitter: float = 0.3, attempts: int | None = None) -> list[Schedule]:
    """Up to ``k`` distinct feasible schedules finishing by ``deadline``.

    The first candidate is LPT.  Later ones draw a machine budget, a random
    job order and random start delays, then compact the result against that
    budget.  Fewer than ``k`` come back if the attempts run out.
    """
    rng = np.random.default_rng(seed)
    attempts = 200 * k if attempts is None else attempts
    seen: set[tuple[int, ...]] = set()
    pool: list[Schedule] = []

    def offer(starts):
        s = assign_machines(instance, starts)
        key = s.start_vector()
        if key in seen or makespan(s) > deadline or not check_feasible(instance, s).feasible:
            return
        seen.add(key)
        pool.append(Schedule(instance, s.starts, s.machines, {"pool_index": len(pool)}))

    if instance.n == 0:
        return [Schedule(instance, {}, {})]
    offer(lpt(instance).starts)
    for _ in range(attempts):
        if len(pool) >= k:
            break
        cap = int(rng.integers(1, instance.m + 1))
        order = [int(j) for j in rng.permutation(np.arange(1, instance.n + 1))]
        starts = _jittered(instance, order, cap, rng, jitter)
        tight = Instance(cap, instance.g, instance.p)
        if rng.random() < 0.5:
            starts = compactify(tight, Schedule(tight, starts)).starts
        offer(starts)
    return pool[:k]


class MetricRow(NamedTuple):
    schedule_id: str
    F_norm: Fraction
    V_norm: Fraction
    price: Fraction
    deadline_violations: int


CSV_HEADER = "schedule_id,F_norm,V_norm,price,deadline_violations"


def normalized_metrics(pool: Sequence[Schedule], scenarios: Sequence[Scenario], theta,
                       deadline: int, ids: Sequence[str] | None = None) -> list[MetricRow]:
    """F^N = F / min F over the pool; V^N = mean over scenarios of the
    recovered machine count divided by the pool's best for that scenario.

    ``price`` is the mean recovered count over the nominal optimum of each
    realised instance, and ``deadline_violations`` counts late jobs over
    all scenarios.
    """
    if not pool:
        raise ValueError("empty pool")
    ids = [f"s{i:03d}" for i in range(len(pool))] if ids is None else list(ids)
    base = pool[0].instance
    fv = [characteristic_value(s, theta).value for s in pool]
    fmin = min(fv)
    vsum = [Fraction(0)] * len(pool)
    psum = [Fraction(0)] * len(pool)
    late = [0] * len(pool)
    for sc in scenarios:
        realised = perturb(base, sc)
        rec = [stage2_recover(s, realised, deadline) for s in pool]
        counts = [r.machine_count for r in rec]
        best = min(counts)
        v_star, _ = nominal_machines(realised, deadline)
        for i, r in enumerate(rec):
            vsum[i] += Fraction(counts[i], best)
            psum[i] += Fraction(counts[i], v_star)
            late[i] += len(r.info["deadline_violations"])
    k = max(len(scenarios), 1)
    rows = []
    for i in range(len(pool)):
        fn = fv[i] / fmin if fmin else Fraction(1)
        vn = vsum[i] / k if scenarios else Fraction(1)
        pr = psum[i] / k if scenarios else Fraction(1)
        rows.append(MetricRow(ids[i], fn, vn, pr, late[i]))
    return rows


def metrics_csv(rows: Sequence[MetricRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(f"{r.schedule_id},{float(r.F_norm):.6f},{float(r.V_norm):.6f},"
                     f"{float(r.price):.6f},{r.deadline_violations}")
    return "\n".join(lines) + "\n"


def save_scenarios(scenarios: Sequence[Scenario], path) -> None:
    Path(path).write_text("[" + ",\n".join(s.to_json() for s in scenarios) + "]\n")


def load_scenarios(path) -> list[Scenario]:
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = [data]
    return [Scenario.from_json(json.dumps(d)) for d in data]


def rank_correlation(rows: Sequence[MetricRow]) -> float:
    """Spearman correlation between F^N and V^N (nan when either is constant)."""
    from scipy.stats import spearmanr

    if len(rows) < 2:
        return float("nan")
    fs = [float(r.F_norm) for r in rows]
    vs = [float(r.V_norm) for r in rows]
    if len(set(fs)) < 2 or len(set(vs)) < 2:
        return float("nan")
    return float(spearmanr(fs, vs).statistic)
