"""Exact oracles and the hard instance families used to probe them.

Two independent makespan oracles live here.  :func:`brute_force_opt`
enumerates start vectors job by job.  :func:`branch_and_bound_opt` sweeps
slots and decides which job type starts next, memoising on the remaining
job multiset and the residual occupancy of running jobs.  With compact
dominance a job must start whenever a slot has both a free machine and a
free start; shifting such a job left never hurts, so no optimum is lost.
By default dominance is applied only when g = 1, where that argument is
settled; pass ``True`` to use it for any g.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field
from typing import NamedTuple

from .greedy import greedy_schedule, lpt
from .model import (Instance, Schedule, assign_machines, bounds, check_feasible,
                    makespan)

OPTIMAL, INCUMBENT, UNKNOWN = "optimal", "incumbent", "unknown"


class SearchLimitExceeded(RuntimeError):
    pass


class DeadlineInfeasible(ValueError):
    """No schedule with the instance's machines meets the deadline."""

    def __init__(self, deadline: int, min_makespan: int | None):
        self.deadline = deadline
        self.min_makespan = min_makespan
        super().__init__(f"deadline {deadline} is infeasible; minimum makespan is {min_makespan}")


@dataclass(frozen=True)
class SearchConfig:
    horizon: int | None = None
    node_limit: int = 2_000_000
    use_compact_dominance: bool | None = None  # None: only when g = 1
    objective: str = "makespan"

    def __post_init__(self):
        if self.node_limit <= 0:
            raise ValueError("node_limit must be positive")
        if self.objective not in ("makespan", "lex"):
            raise ValueError("objective must be 'makespan' or 'lex'")

    def tau(self, instance: Instance) -> int:
        tau = instance.horizon() if self.horizon is None else self.horizon
        if tau < instance.horizon():
            raise ValueError(f"horizon {tau} is below sum(p)+ceil(n/g)={instance.horizon()}")
        return tau


def _dominance(flag: bool | None, g: int) -> bool:
    return g == 1 if flag is None else flag


class SearchResult(NamedTuple):
    schedule: Schedule | None
    value: int | None
    status: str


@dataclass(frozen=True, order=True)
class LexObjective:
    """Machine count, then the completion profile.

    Ordering compares ``v`` first and then the exact integer
    W = sum(2**C_j).  For distinct completion values this coincides with
    comparing the descending-sorted profile lexicographically.
    """

    v: int
    weight: int = field(repr=False)
    profile: tuple[int, ...] = field(compare=False)

    @classmethod
    def of(cls, schedule: Schedule, v: int | None = None) -> "LexObjective":
        cs = sorted(schedule.completions.values(), reverse=True)
        v = schedule.machine_count if v is None else v
        return cls(v, sum(1 << c for c in cs), tuple(cs))


def profile_weight(profile) -> int:
    return sum(1 << c for c in profile)


# ---------------------------------------------------------------------------
# slot-driven memoised search


class _Types:
    """Distinct processing times (descending) and the jobs carrying each."""

    def __init__(self, instance: Instance):
        vals = sorted(set(instance.p), reverse=True)
        self.vals = tuple(vals)
        self.jobs = [[j for j in instance.jobs if instance.proc(j) == v] for v in vals]
        self.counts = tuple(len(js) for js in self.jobs)


def _insert(res: tuple[int, ...], r: int) -> tuple[int, ...]:
    return tuple(sorted(res + (r,), reverse=True))


def _shift(res: tuple[int, ...], d: int) -> tuple[int, ...]:
    return tuple(r - d for r in res if r > d)


class _Search:
    """Shared move generator for the makespan and lexicographic searches.

    A state is (t, remaining counts, residual occupancies, starts at t, last
    type started at t).  Types started within one slot are taken in
    non-decreasing type index so each multiset of starts is visited once.
    """

    def __init__(self, types: _Types, cap: int, g: int, dominance: bool,
                 node_limit: int, deadline: int | None = None):
        self.vals = types.vals
        self.cap, self.g = cap, g
        self.dominance = dominance
        self.node_limit = node_limit
        self.deadline = deadline
        self.memo: dict = {}

    def moves(self, t, cnt, res, b, last):
        """Yield (kind, payload, next_state, delay) for each successor."""
        can_start = len(res) < self.cap and b < self.g
        if can_start:
            for k in range(last, len(cnt)):
                if cnt[k] == 0:
                    continue
                if self.deadline is not None and t + self.vals[k] > self.deadline:
                    continue
                nc = cnt[:k] + (cnt[k] - 1,) + cnt[k + 1:]
                yield "start", k, (t, nc, _insert(res, self.vals[k]), b + 1, k), 0
        if not res:
            return  # idling with nothing alive is a pure shift
        if can_start and self.dominance and any(cnt):
            return
        d = min(res) if len(res) >= self.cap else 1
        yield "advance", d, (t + d, cnt, _shift(res, d), 0, 0), d

    def dead(self, t, cnt, res, b) -> bool:
        """True when the deadline can no longer be met from this state.

        Work left must fit in the remaining machine-slots, and the jobs of
        length at least q must all start by D - q at g per slot.
        """
        D = self.deadline
        if D is None:
            return False
        work = sum(c * v for c, v in zip(cnt, self.vals)) + sum(res)
        if work > self.cap * (D - t):
            return True
        need = 0
        for c, v in zip(cnt, self.vals):
            need += c
            room = (self.g - b) + self.g * (D - v - t) if D - v >= t else 0
            if need > room:
                return True
        return False

    def _count(self):
        if len(self.memo) > self.node_limit:
            raise SearchLimitExceeded(f"node limit {self.node_limit} exceeded")


class _MakespanSearch(_Search):
    """Value = (makespan - t); independent of t, so t is dropped from keys."""

    def solve(self, state):
        t, cnt, res, b, last = state
        key = (cnt, res, b, last)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if not any(cnt):
            val = max(res, default=0)
        else:
            val = None
            for _, _, nxt, d in self.moves(t, cnt, res, b, last):
                sub = self.solve(nxt)
                if sub is not None and (val is None or sub + d < val):
                    val = sub + d
        self._count()
        self.memo[key] = val
        return val

    def value_of(self, nxt, d):
        sub = self.solve(nxt)
        return None if sub is None else sub + d


class _LexSearch(_Search):
    """Value = min sum of 2**C over jobs not yet started (deadline in force)."""

    def solve(self, state):
        t, cnt, res, b, last = state
        key = state
        if key in self.memo:
            return self.memo[key]
        if not any(cnt):
            val = 0
        elif self.dead(t, cnt, res, b):
            val = None
        else:
            val = None
            for kind, k, nxt, _ in self.moves(t, cnt, res, b, last):
                sub = self.solve(nxt)
                if sub is None:
                    continue
                if kind == "start":
                    sub += 1 << (t + self.vals[k])
                if val is None or sub < val:
                    val = sub
        self._count()
        self.memo[key] = val
        return val

    def value_of(self, nxt, d, kind=None, k=None, t=None):
        sub = self.solve(nxt)
        if sub is None:
            return None
        if kind == "start":
            sub += 1 << (t + self.vals[k])
        return sub


class _FeasibleSearch(_Search):
    """Value = can every job still complete by the deadline."""

    def solve(self, state):
        t, cnt, res, b, last = state
        hit = self.memo.get(state)
        if hit is not None:
            return hit
        if not any(cnt):
            val = True
        elif self.dead(t, cnt, res, b):
            val = False
        else:
            val = any(self.solve(nxt) for _, _, nxt, _ in self.moves(t, cnt, res, b, last))
        self._count()
        self.memo[state] = val
        return val


def _with_recursion(fn, *args):
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20000))
    try:
        return fn(*args)
    finally:
        sys.setrecursionlimit(old)


def min_makespan(instance: Instance, m: int | None = None, dominance: bool | None = None,
                 node_limit: int = 2_000_000) -> tuple[int, dict[int, int]]:
    """Exact minimum makespan with ``m`` machines (default ``instance.m``)."""
    types = _Types(instance)
    if instance.n == 0:
        return 0, {}
    cap = instance.m if m is None else m
    search = _MakespanSearch(types, cap, instance.g, _dominance(dominance, instance.g),
                             node_limit)
    root = (1, types.counts, (), 0, 0)
    best = _with_recursion(search.solve, root)
    # values are measured from slot 1, so the makespan is one more
    pools = [list(js) for js in types.jobs]
    state, remaining, starts = root, best, {}
    while any(state[1]):
        for kind, k, nxt, d in search.moves(*state):
            if search.value_of(nxt, d) == remaining:
                break
        else:  # pragma: no cover - memo is exhaustive
            raise AssertionError("replay lost the optimal path")
        if kind == "start":
            starts[pools[k].pop(0)] = state[0]
        remaining -= d
        state = nxt
    return best + 1, starts


def branch_and_bound_opt(instance: Instance, cfg: SearchConfig = SearchConfig()) -> SearchResult:
    """Minimum makespan; LPT is the incumbent and the root bound test.

    If the LPT makespan meets the best lower bound it is returned at once.
    Otherwise the memoised slot search runs; on hitting the node limit the
    LPT incumbent comes back flagged ``incumbent``.
    """
    if instance.n == 0:
        return SearchResult(Schedule(instance, {}, {}), 0, OPTIMAL)
    inc = lpt(instance)
    if makespan(inc) == bounds(instance).best:
        return SearchResult(inc, makespan(inc), OPTIMAL)
    try:
        opt, starts = min_makespan(instance, dominance=cfg.use_compact_dominance,
                                   node_limit=cfg.node_limit)
    except SearchLimitExceeded:
        return SearchResult(inc, makespan(inc), INCUMBENT)
    if opt >= makespan(inc):
        return SearchResult(inc, makespan(inc), OPTIMAL)
    return SearchResult(assign_machines(instance, starts), opt, OPTIMAL)


def brute_force_opt(instance: Instance, cfg: SearchConfig = SearchConfig()) -> SearchResult:
    """Exhaustive enumeration of start vectors within the horizon.

    Jobs are placed one at a time (longest first) at every start slot
    1..tau-p_j+1 that keeps the slot counters within m and g.  Identical
    jobs take non-decreasing starts, partial vectors that cannot beat the
    incumbent are cut, and so is any branch whose remaining load no longer
    fits below it.  None of this excludes an improving solution.
    """
    n, m, g = instance.n, instance.m, instance.g
    if n == 0:
        return SearchResult(Schedule(instance, {}, {}), 0, OPTIMAL)
    tau = cfg.tau(instance)
    order = sorted(instance.jobs, key=lambda j: (-instance.proc(j), j))
    ps = [instance.proc(j) for j in order]
    suffix = list(itertools.accumulate(reversed(ps)))[::-1] + [0]
    alive = [0] * (tau + 2)
    begin = [0] * (tau + 2)
    best = [tau + 2, None]
    cur = [0] * n
    nodes = [0]

    def rec(i, cmax, load):
        nodes[0] += 1
        if nodes[0] > cfg.node_limit:
            raise SearchLimitExceeded
        if i == n:
            if cmax < best[0]:
                best[0], best[1] = cmax, list(cur)
            return
        # slots 1..best-2 are all that can host work in an improving schedule
        if load + suffix[i] > m * (best[0] - 2):
            return
        p = ps[i]
        lo = cur[i - 1] if i and ps[i - 1] == p else 1
        for s in range(lo, tau - p + 2):
            if s + p >= best[0]:
                break
            if begin[s] >= g:
                continue
            if any(alive[u] >= m for u in range(s, s + p)):
                continue
            begin[s] += 1
            for u in range(s, s + p):
                alive[u] += 1
            cur[i] = s
            rec(i + 1, max(cmax, s + p), load + p)
            begin[s] -= 1
            for u in range(s, s + p):
                alive[u] -= 1

    try:
        rec(0, 0, 0)
    except SearchLimitExceeded:
        return SearchResult(None, None, UNKNOWN)
    if best[1] is None:
        return SearchResult(None, None, UNKNOWN)
    starts = {j: s for j, s in zip(order, best[1])}
    return SearchResult(assign_machines(instance, starts), best[0], OPTIMAL)


# ---------------------------------------------------------------------------
# lexicographic stage-1 objective


def min_machines(instance: Instance, deadline: int, node_limit: int = 2_000_000,
                 cap: int | None = None) -> int | None:
    """Fewest machines (at most ``cap``, default ``instance.m``) meeting
    ``deadline``, or None."""
    if instance.n == 0:
        return 0
    # slots 1..D-1 can be occupied
    slots = deadline - 1
    if slots < instance.p_max:
        return None
    lo = max(1, -(-sum(instance.p) // slots))
    types = _Types(instance)
    dom = _dominance(None, instance.g)
    for v in range(lo, (instance.m if cap is None else cap) + 1):
        search = _FeasibleSearch(types, v, instance.g, dom, node_limit, deadline)
        if _with_recursion(search.solve, (1, types.counts, (), 0, 0)):
            return v
    return None


def exact_lex(instance: Instance, deadline: int, cfg: SearchConfig = SearchConfig(objective="lex"),
              machines_only: bool = False) -> Schedule:
    """Fewest machines under the deadline, then the smallest sum of 2**C_j.

    Raises :class:`DeadlineInfeasible` carrying the true minimum makespan
    when even ``instance.m`` machines cannot meet ``deadline``.  With
    ``machines_only`` the completion profile is not optimised and the
    compact schedule found by the machine search is returned.
    """
    if instance.n == 0:
        return Schedule(instance, {}, {}, {"v": 0, "W": 0, "profile": ()})
    v = min_machines(instance, deadline, cfg.node_limit)
    if v is None:
        res = branch_and_bound_opt(instance, SearchConfig(node_limit=cfg.node_limit))
        raise DeadlineInfeasible(deadline, res.value)
    if machines_only:
        _, starts = min_makespan(instance, m=v, node_limit=cfg.node_limit)
    else:
        starts = _lex_starts(instance, v, deadline, cfg)
    out = assign_machines(instance, starts)
    obj = LexObjective.of(out, v)
    info = {"v": v, "W": obj.weight, "profile": obj.profile, "deadline": deadline}
    return Schedule(instance, out.starts, out.machines, info)


def _lex_starts(instance: Instance, v: int, deadline: int, cfg: SearchConfig) -> dict[int, int]:
    types = _Types(instance)
    search = _LexSearch(types, v, instance.g, _dominance(cfg.use_compact_dominance, instance.g),
                        cfg.node_limit, deadline)
    root = (1, types.counts, (), 0, 0)
    best = _with_recursion(search.solve, root)
    if best is None:  # pragma: no cover - v was certified feasible
        raise DeadlineInfeasible(deadline, None)

    # replay with the lex accounting: a start pays 2**(t+p) up front
    pools = [list(js) for js in types.jobs]
    state = root
    remaining = best
    starts = {}
    while any(state[1]):
        for kind, k, nxt, d in search.moves(*state):
            val = search.value_of(nxt, d, kind, k, state[0])
            if val is not None and val == remaining:
                break
        else:  # pragma: no cover
            raise AssertionError("replay lost the optimal path")
        if kind == "start":
            starts[pools[k].pop(0)] = state[0]
            remaining -= 1 << (state[0] + types.vals[k])
        state = nxt
    return starts


# ---------------------------------------------------------------------------
# instance families from the hardness and tightness constructions


def from_three_partition(a, B: int) -> tuple[Instance, int]:
    """BJSP instance with p_j = n^2 a_j, g = 1, m = |a|/3 and its threshold.

    A 3-partition exists iff the optimal makespan is below n^2 B + n^2.
    """
    a = list(a)
    if not a or len(a) % 3:
        raise ValueError("need 3m numbers")
    m = len(a) // 3
    n = len(a)
    if sum(a) != m * B:
        raise ValueError(f"numbers must sum to m*B={m * B}, got {sum(a)}")
    if any(not (B <= 4 * x and 2 * x <= B) for x in a):
        raise ValueError("every number must lie in [B/4, B/2]")
    if n * n <= 3 * n:
        raise ValueError("construction needs n^2 > 3n")
    return Instance(m, 1, tuple(n * n * x for x in a)), n * n * B + n * n


def tight_instance_lpt(m: int, p: int) -> Instance:
    """m(m-1) jobs of length p plus m(p-m) unit jobs, g = 1."""
    if not (m >= 2 and p > m):
        raise ValueError("need p > m >= 2")
    return Instance(m, 1, (p,) * (m * (m - 1)) + (1,) * (m * (p - m)))


def tight_comparison_schedule(m: int, p: int) -> Schedule:
    """Makespan-mp schedule for :func:`tight_instance_lpt`.

    Greedy earliest-slot placement over m rounds, each of m - 1 long jobs
    followed by p - m unit jobs.  Every machine then runs back to back from
    its first slot, and the result is checked before it is returned.
    """
    inst = tight_instance_lpt(m, p)
    longs = [j for j in inst.jobs if inst.proc(j) == p]
    units = [j for j in inst.jobs if inst.proc(j) == 1]
    order = []
    for k in range(m):
        order += longs[k * (m - 1):(k + 1) * (m - 1)]
        order += units[k * (p - m):(k + 1) * (p - m)]
    s = greedy_schedule(inst, order)
    verified_makespan(s)
    return s


def lpt_long_gap_instance(m: int) -> Instance:
    """m+1 jobs with p_j = 2m - j (j <= m) and p_{m+1} = m, g = 1."""
    if m < 2:
        raise ValueError("need m >= 2")
    return Instance(m, 1, tuple(2 * m - j for j in range(1, m + 1)) + (m,))


def gap_comparison_schedule(m: int) -> Schedule:
    """Job j < m on machine j+1 from slot j+1; jobs m and m+1 back to back on
    machine 1 from slot 1."""
    inst = lpt_long_gap_instance(m)
    starts = {j: j + 1 for j in range(1, m)}
    machines = {j: j + 1 for j in range(1, m)}
    starts[m], machines[m] = 1, 1
    starts[m + 1], machines[m + 1] = 1 + inst.proc(m), 1
    return Schedule(inst, starts, machines)


def verified_makespan(schedule: Schedule) -> int:
    """Makespan of a schedule after asserting it is feasible."""
    rep = check_feasible(schedule.instance, schedule)
    if not rep.feasible:
        raise ValueError(f"infeasible schedule: {[str(v) for v in rep.violations]}")
    return makespan(schedule)
