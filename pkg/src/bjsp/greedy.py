"""Greedy list scheduling: LPT, LSPT and Long-Short Mixing."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .model import (Instance, Schedule, assign_machines, bounds, makespan,
                    sorted_jobs)


@dataclass(frozen=True)
class JobOrder:
    jobs: tuple[int, ...]
    policy: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))

    def __iter__(self):
        return iter(self.jobs)

    def __len__(self):
        return len(self.jobs)

    def check(self, instance: Instance) -> None:
        if sorted(self.jobs) != list(instance.jobs):
            raise ValueError(f"order must be a permutation of 1..{instance.n}")


def lpt_order(instance: Instance) -> JobOrder:
    return JobOrder(sorted_jobs(instance), "LPT")


def spt_order(instance: Instance) -> JobOrder:
    return JobOrder(sorted_jobs(instance, descending=False), "SPT")


def lspt_order(instance: Instance) -> JobOrder:
    """Long jobs (p_j >= m) shortest first, then short jobs longest first."""
    longs = sorted_jobs(instance, instance.long_jobs, descending=False)
    shorts = sorted_jobs(instance, instance.short_jobs, descending=True)
    return JobOrder(longs + shorts, "LSPT")


class _Timeline:
    """Alive and start counters over a growing slot horizon."""

    def __init__(self, size: int):
        self.alive = [0] * (size + 2)
        self.begin = [0] * (size + 2)

    def _grow(self, upto: int):
        if upto >= len(self.alive):
            extra = upto + 1 - len(self.alive)
            self.alive.extend([0] * extra)
            self.begin.extend([0] * extra)

    def place(self, s: int, p: int):
        self._grow(s + p)
        self.begin[s] += 1
        for u in range(s, s + p):
            self.alive[u] += 1


def greedy_schedule(instance: Instance, order: JobOrder | Sequence[int],
                    m: int | None = None) -> Schedule:
    """Start each job, in ``order``, at the earliest slot with a free machine
    and a free start.

    The earliest available slot never moves backwards as jobs are added, so a
    single forward pointer suffices and every placement stays feasible.
    ``m`` overrides the machine budget.
    """
    if not isinstance(order, JobOrder):
        order = JobOrder(tuple(order))
    order.check(instance)
    cap = instance.m if m is None else m
    g = instance.g
    tl = _Timeline(instance.horizon())
    starts = {}
    t = 1
    for j in order:
        tl._grow(t)
        while tl.alive[t] >= cap or tl.begin[t] >= g:
            t += 1
            tl._grow(t)
        starts[j] = t
        tl.place(t, instance.proc(j))
    out = assign_machines(instance, starts)
    return Schedule(instance, out.starts, out.machines, {"policy": order.policy})


def _certify(instance: Instance, schedule: Schedule, algo: str) -> Schedule:
    lb = bounds(instance).best
    info = dict(schedule.info, algorithm=algo, lower_bound=lb)
    return Schedule(instance, schedule.starts, schedule.machines, info)


def lpt(instance: Instance) -> Schedule:
    """Longest Processing Time first; makespan <= 2 * lower bound."""
    return _certify(instance, greedy_schedule(instance, lpt_order(instance)), "lpt")


def lspt(instance: Instance) -> Schedule:
    return _certify(instance, greedy_schedule(instance, lspt_order(instance)), "lspt")


@dataclass(frozen=True)
class LsmConfig:
    """``mL`` machines are reserved for long jobs; ``None`` means ceil(5m/6)."""

    mL: int | None = None
    allow_augmentation: bool = False
    augmentation: Fraction = Fraction(6, 5)

    def long_machines(self, m: int) -> int:
        return math.ceil(Fraction(5 * m, 6)) if self.mL is None else self.mL


def lsm(instance: Instance, cfg: LsmConfig = LsmConfig()) -> Schedule:
    """Long-Short Mixing.

    Long jobs are those with p_j >= mL.  Slots are swept in increasing order;
    while a machine is free, a long job starts if fewer than mL long jobs are
    alive, otherwise a short job starts.  For g > 1 the test repeats up to g
    times per slot.

    With ``allow_augmentation``, when more than mL jobs exceed half the best
    lower bound the machine budget grows to ceil(6m/5) (and a default mL is
    recomputed for it).
    """
    m = instance.m
    mL = cfg.long_machines(m)
    if not 1 <= mL <= m:
        raise ValueError(f"mL must lie in [1, m={m}], got {mL}")
    lb = bounds(instance).best
    budget = m
    n_very_long = sum(1 for pj in instance.p if 2 * pj > lb)
    augmented = cfg.allow_augmentation and n_very_long > mL
    if augmented:
        budget = math.ceil(cfg.augmentation * m)
        if cfg.mL is None:
            mL = math.ceil(Fraction(5 * budget, 6))
    # the 1.985 analysis needs m >= 7; smaller m runs but is flagged
    certified = m >= 7

    longs = sorted_jobs(instance, [j for j in instance.jobs if instance.proc(j) >= mL])
    shorts = sorted_jobs(instance, [j for j in instance.jobs if instance.proc(j) < mL])
    li = si = 0
    size = instance.horizon() + 2
    alive = [0] * (size + 1)
    alive_long = [0] * (size + 1)
    starts = {}
    t = 0
    while li < len(longs) or si < len(shorts):
        t += 1
        if t + 1 >= len(alive):
            alive.extend([0] * size)
            alive_long.extend([0] * size)
        for _ in range(instance.g):
            if alive[t] >= budget:
                break
            if alive_long[t] < mL and li < len(longs):
                j, li = longs[li], li + 1
                is_long = True
            elif si < len(shorts):
                j, si = shorts[si], si + 1
                is_long = False
            else:
                break
            starts[j] = t
            p = instance.proc(j)
            if t + p >= len(alive):
                alive.extend([0] * (t + p + 1 - len(alive)))
                alive_long.extend([0] * (t + p + 1 - len(alive_long)))
            for u in range(t, t + p):
                alive[u] += 1
                if is_long:
                    alive_long[u] += 1
    out = assign_machines(instance, starts)
    info = {"algorithm": "lsm", "policy": "LSM", "mL": mL, "machine_budget": budget,
            "augmented": augmented, "ratio_certified": certified, "lower_bound": lb}
    return Schedule(instance, out.starts, out.machines, info)


def alpha(instance: Instance) -> Fraction:
    """Average machine load divided by the largest processing time."""
    if instance.n == 0:
        raise ValueError("alpha is undefined for an empty instance")
    return Fraction(sum(instance.p), instance.m) / instance.p_max


def ratio_certificate(instance: Instance, schedule: Schedule) -> Fraction:
    """makespan / best lower bound: an upper bound on makespan / OPT."""
    lb = bounds(instance).best
    if lb == 0:
        return Fraction(1)
    return Fraction(makespan(schedule), lb)
