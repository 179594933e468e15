"""Core data types and schedule semantics for bounded job start scheduling.

Time is slotted and 1-based.  A job started at slot ``s`` occupies slots
``s, ..., s + p - 1`` and has completion value ``C = s + p``.  Jobs are
identified by 1-based indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence


class InstanceError(ValueError):
    """Raised for malformed instance data; ``errors`` maps field -> message."""

    def __init__(self, errors: Mapping[str, str]):
        self.errors = dict(errors)
        super().__init__("; ".join(f"{k}: {v}" for k, v in self.errors.items()))


class ScheduleError(ValueError):
    """Structural problem with a schedule (missing or unknown jobs)."""


class BoundNotApplicable(ValueError):
    pass


@dataclass(frozen=True)
class Instance:
    m: int
    g: int
    p: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(self.p))
        errors = _instance_errors(self.m, self.g, self.p)
        if errors:
            raise InstanceError(errors)

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def jobs(self) -> range:
        return range(1, self.n + 1)

    def proc(self, j: int) -> int:
        return self.p[j - 1]

    @property
    def long_jobs(self) -> list[int]:
        return [j for j in self.jobs if self.p[j - 1] >= self.m]

    @property
    def short_jobs(self) -> list[int]:
        return [j for j in self.jobs if self.p[j - 1] < self.m]

    @property
    def p_max(self) -> int:
        return max(self.p, default=0)

    @property
    def p_min(self) -> int:
        return min(self.p, default=0)

    def horizon(self) -> int:
        """Slots that always suffice for a greedy completion: sum(p) + ceil(n/g)."""
        return sum(self.p) + -(-self.n // self.g)


def _instance_errors(m, g, p) -> dict[str, str]:
    errors = {}
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        errors["m"] = "m must be >=1"
    if not isinstance(g, int) or isinstance(g, bool) or g < 1:
        errors["g"] = "g must be >=1"
    bad = [i + 1 for i, pj in enumerate(p)
           if not isinstance(pj, int) or isinstance(pj, bool) or pj < 1]
    if bad:
        errors["p"] = f"processing times must be integers >=1 (jobs {bad})"
    return errors


def validate_instance(raw: Mapping[str, Any]) -> Instance:
    """Build an :class:`Instance` from a mapping with keys ``m``, ``g``, ``p``."""
    missing = {k: "missing" for k in ("m", "g", "p") if k not in raw}
    if missing:
        raise InstanceError(missing)
    p = raw["p"]
    if not isinstance(p, (list, tuple)):
        raise InstanceError({"p": "p must be a list of integers"})
    return Instance(raw["m"], raw["g"], tuple(p))


@dataclass(frozen=True)
class Schedule:
    """Start slots (and optionally machine ids) for every job of ``instance``.

    ``info`` carries algorithm metadata such as certificates or flags; it does
    not take part in equality.
    """

    instance: Instance
    starts: Mapping[int, int]
    machines: Mapping[int, int] | None = None
    info: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "starts", dict(sorted(self.starts.items())))
        if self.machines is not None:
            object.__setattr__(self, "machines", dict(sorted(self.machines.items())))

    def completion(self, j: int) -> int:
        return self.starts[j] + self.instance.proc(j)

    @property
    def completions(self) -> dict[int, int]:
        return {j: s + self.instance.proc(j) for j, s in self.starts.items()}

    @property
    def last_start(self) -> int:
        return max(self.starts.values(), default=0)

    @property
    def machine_count(self) -> int:
        """Distinct machines used, or peak concurrency when unassigned."""
        if self.machines is not None:
            return len(set(self.machines.values()))
        return max(alive_counts(self.instance, self), default=0)

    def start_vector(self) -> tuple[int, ...]:
        return tuple(self.starts[j] for j in self.instance.jobs)

    def with_instance(self, instance: Instance) -> "Schedule":
        return Schedule(instance, self.starts, None, dict(self.info))


def _require_cover(instance: Instance, schedule: Schedule) -> None:
    jobs = set(instance.jobs)
    have = set(schedule.starts)
    if have != jobs:
        raise ScheduleError(
            f"schedule must cover jobs 1..{instance.n}: "
            f"missing {sorted(jobs - have)}, unknown {sorted(have - jobs)}")
    bad = [j for j, s in schedule.starts.items() if not isinstance(s, int) or s < 1]
    if bad:
        raise ScheduleError(f"start slots must be positive integers (jobs {bad})")


def alive_counts(instance: Instance, schedule: Schedule) -> list[int]:
    """``counts[t]`` = |A_t| for t = 0..T; index 0 is unused and always 0."""
    hi = max((schedule.starts[j] + instance.proc(j) for j in schedule.starts), default=1)
    diff = [0] * (hi + 1)
    for j, s in schedule.starts.items():
        diff[s] += 1
        diff[s + instance.proc(j)] -= 1
    counts, run = [0] * (hi + 1), 0
    for t in range(hi + 1):
        run += diff[t]
        counts[t] = run
    return counts


def begin_counts(instance: Instance, schedule: Schedule) -> list[int]:
    """``counts[t]`` = |B_t|, with the same indexing as :func:`alive_counts`."""
    hi = max((schedule.starts[j] + instance.proc(j) for j in schedule.starts), default=1)
    counts = [0] * (hi + 1)
    for s in schedule.starts.values():
        counts[s] += 1
    return counts


@dataclass(frozen=True)
class Violation:
    kind: str  # "capacity", "bjsp" or "overlap"
    slot: int
    count: int
    limit: int
    jobs: tuple[int, ...] = ()

    def __str__(self):
        if self.kind == "capacity":
            return f"|A_{self.slot}|={self.count}>m={self.limit}"
        if self.kind == "bjsp":
            return f"|B_{self.slot}|={self.count}>g={self.limit}"
        return f"machine {self.limit} runs jobs {list(self.jobs)} at slot {self.slot}"


@dataclass(frozen=True)
class FeasibilityReport:
    violations: tuple[Violation, ...]

    @property
    def feasible(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.feasible


def check_feasible(instance: Instance, schedule: Schedule, m: int | None = None) -> FeasibilityReport:
    """List capacity, job-start and machine-overlap violations.

    ``m`` overrides the machine budget (used for augmented schedules).
    """
    _require_cover(instance, schedule)
    cap = instance.m if m is None else m
    out = []
    alive = alive_counts(instance, schedule)
    begin = begin_counts(instance, schedule)
    for t in range(1, len(alive)):
        if alive[t] > cap:
            out.append(Violation("capacity", t, alive[t], cap))
        if begin[t] > instance.g:
            out.append(Violation("bjsp", t, begin[t], instance.g))
    if schedule.machines is not None:
        by_machine: dict[int, list[int]] = {}
        for j, i in schedule.machines.items():
            by_machine.setdefault(i, []).append(j)
        for i, js in sorted(by_machine.items()):
            js.sort(key=lambda j: (schedule.starts[j], j))
            for a, b in zip(js, js[1:]):
                if schedule.starts[b] < schedule.completion(a):
                    out.append(Violation("overlap", schedule.starts[b], 2, i, (a, b)))
    return FeasibilityReport(tuple(out))


def makespan(schedule: Schedule) -> int:
    return max(schedule.completions.values(), default=0)


def assign_machines(instance: Instance, starts: Mapping[int, int]) -> Schedule:
    """Interval-colour jobs by increasing start, lowest free machine first.

    The number of machines used equals the peak of |A_t|.
    """
    free_at: list[int] = []  # free_at[i-1]: first slot machine i is idle again
    machines = {}
    for j in sorted(starts, key=lambda j: (starts[j], j)):
        s = starts[j]
        for i, f in enumerate(free_at):
            if f <= s:
                break
        else:
            i = len(free_at)
            free_at.append(0)
        free_at[i] = s + instance.proc(j)
        machines[j] = i + 1
    return Schedule(instance, starts, machines)


def is_compact(instance: Instance, schedule: Schedule) -> bool:
    """Every slot before the last start is machine- or start-saturated.

    The last start slot itself is exempt: with g = 1 it is saturated by
    that start anyway, and for g > 1 no later job is left to fill it.
    """
    alive = alive_counts(instance, schedule)
    begin = begin_counts(instance, schedule)
    return all(alive[t] == instance.m or begin[t] == instance.g
               for t in range(1, schedule.last_start))


def compactify(instance: Instance, schedule: Schedule) -> Schedule:
    """Shift starts left until the schedule is compact.

    Each round takes the earliest slot ``t`` before the last start that is
    neither machine- nor start-saturated and moves the earliest later start
    (smallest job index on ties) to ``t``.  Moving it one slot at a time
    lands on the same slot, since ``t`` stays available throughout.
    """
    _require_cover(instance, schedule)
    starts = dict(schedule.starts)
    m, g = instance.m, instance.g
    while True:
        cur = Schedule(instance, starts)
        alive = alive_counts(instance, cur)
        begin = begin_counts(instance, cur)
        r = cur.last_start
        t = next((u for u in range(1, r) if alive[u] < m and begin[u] < g), None)
        if t is None:
            break
        later = min((s, j) for j, s in starts.items() if s > t)
        starts[later[1]] = t
    out = Schedule(instance, starts)
    if schedule.machines is not None:
        out = assign_machines(instance, starts)
    return out


def lower_bound_basic(instance: Instance) -> int:
    """max(ceil(sum p / m), max_j ceil(j/g) + p_j) over jobs sorted by p desc."""
    if instance.n == 0:
        return 0
    load = -(-sum(instance.p) // instance.m)
    ps = sorted(instance.p, reverse=True)
    starts = max(-(-j // instance.g) + pj for j, pj in enumerate(ps, 1))
    return max(load, starts)


def lower_bound_long(instance: Instance) -> Fraction:
    """Packing bound with the forced initial idle time m(m-1)/2.

    Requires at least m jobs with p_j >= m.
    """
    m = instance.m
    if len(instance.long_jobs) < m:
        raise BoundNotApplicable(
            f"needs at least m={m} jobs with p_j >= m, found {len(instance.long_jobs)}")
    return Fraction(m * (m - 1) // 2 + sum(instance.p), m)


def classify(instance: Instance) -> str:
    if all(pj < instance.m for pj in instance.p):
        return "short"
    if all(pj >= instance.m for pj in instance.p):
        return "long"
    return "mixed"


@dataclass(frozen=True)
class Bounds:
    basic_lb: int
    long_lb: Fraction | None
    classification: str

    @property
    def best(self) -> int:
        """Strongest integral lower bound on the optimal makespan."""
        if self.long_lb is None:
            return self.basic_lb
        return max(self.basic_lb, math.ceil(self.long_lb))


def bounds(instance: Instance) -> Bounds:
    try:
        long_lb = lower_bound_long(instance)
    except BoundNotApplicable:
        long_lb = None
    return Bounds(lower_bound_basic(instance), long_lb, classify(instance))


@dataclass(frozen=True)
class Period:
    kind: str  # "slack" or "full"
    start: int
    end: int
    idle: int

    @property
    def length(self) -> int:
        return self.end - self.start + 1


@dataclass(frozen=True)
class PeriodDecomposition:
    periods: tuple[Period, ...]

    def __iter__(self):
        return iter(self.periods)

    def __len__(self):
        return len(self.periods)

    @property
    def slack(self) -> list[Period]:
        return [q for q in self.periods if q.kind == "slack"]

    @property
    def total_idle(self) -> int:
        return sum(q.idle for q in self.periods)


def decompose_periods(instance: Instance, schedule: Schedule) -> PeriodDecomposition:
    """Split [1, r] into maximal alternating slack (|A_t| < m) and full runs."""
    alive = alive_counts(instance, schedule)
    m = instance.m
    periods: list[Period] = []
    for t in range(1, schedule.last_start + 1):
        kind = "full" if alive[t] >= m else "slack"
        idle = m - alive[t] if kind == "slack" else 0
        if periods and periods[-1].kind == kind:
            q = periods[-1]
            periods[-1] = Period(kind, q.start, t, q.idle + idle)
        else:
            periods.append(Period(kind, t, t, idle))
    return PeriodDecomposition(tuple(periods))


def idle_upper_bound(n: int, m: int) -> Fraction:
    """Optimum of max sum l(l-1)/2 over integer lengths 0 <= l <= m, sum l <= n.

    By convexity the optimum packs as many full-length periods as possible.
    """
    if n < 0 or m < 1:
        raise ValueError("need n >= 0 and m >= 1")
    full, rho = divmod(n, m)
    value = Fraction(full * m * (m - 1) + rho * (rho - 1), 2)
    return min(value, Fraction(n * m, 2))


def job_order_key(instance: Instance, descending: bool = True):
    """Sort key by processing time with ties broken by ascending job index."""
    if descending:
        return lambda j: (-instance.proc(j), j)
    return lambda j: (instance.proc(j), j)


def sorted_jobs(instance: Instance, jobs: Sequence[int] | None = None,
                descending: bool = True) -> list[int]:
    jobs = instance.jobs if jobs is None else jobs
    return sorted(jobs, key=job_order_key(instance, descending))
