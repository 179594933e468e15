"""Synthetic delivery-office style instances.

Durations follow a two-part mixture (a body of 30 to 120 minutes and a
tail up to several hours) discretised into ``delta``-minute slots with a
floor of two slots.  Desired departures cluster in a morning wave.  The
"historical" baseline dispatches jobs at their desired slot, pushed later
only when the slot's start budget is spent, and uses as many vehicles as
it ends up needing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..model import Instance, Schedule, assign_machines, begin_counts, makespan


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int | None = 0
    n_min: int = 6
    n_max: int = 9
    delta: int = 15
    span: int = 90  # minutes over which desired departures spread
    body: tuple[int, int] = (30, 120)
    tail: tuple[int, int] = (120, 300)
    tail_prob: float = 0.15
    g: int | None = None  # fixed start budget; None derives it from the wave
    g_percentile: float = 95.0

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if not 1 <= self.n_min <= self.n_max:
            raise ValueError("need 1 <= n_min <= n_max")
        if self.span < 0 or not 0 < self.body[0] <= self.body[1]:
            raise ValueError("bad span or duration range")
        if self.g is not None and self.g < 1:
            raise ValueError("g must be >= 1")


class Generated(NamedTuple):
    instance: Instance
    baseline: Schedule
    deadline: int


def generate(cfg: GeneratorConfig, rng: np.random.Generator | None = None) -> Generated:
    """Instance with m = baseline vehicles and the baseline makespan as deadline."""
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    n = int(rng.integers(cfg.n_min, cfg.n_max + 1))
    tail = rng.random(n) < cfg.tail_prob
    minutes = np.where(tail, rng.uniform(*cfg.tail, n), rng.uniform(*cfg.body, n))
    p = tuple(max(2, math.ceil(x / cfg.delta)) for x in minutes)
    # desired departures: triangular wave peaking early, rounded down to a slot
    begin = rng.triangular(0, cfg.span * 0.25, cfg.span, n)
    want = [1 + int(b // cfg.delta) for b in begin]
    if cfg.g is None:
        per_slot = np.bincount(want)
        g = max(1, math.ceil(np.percentile(per_slot[per_slot > 0], cfg.g_percentile)))
    else:
        g = cfg.g
    used: dict[int, int] = {}
    starts = {}
    for j in sorted(range(1, n + 1), key=lambda j: (want[j - 1], j)):
        t = want[j - 1]
        while used.get(t, 0) >= g:
            t += 1
        used[t] = used.get(t, 0) + 1
        starts[j] = t
    probe = Instance(n, g, p)
    base = assign_machines(probe, starts)
    inst = Instance(base.machine_count, g, p)
    base = base.with_instance(inst)
    assert max(begin_counts(inst, base)) <= g
    return Generated(inst, base, makespan(base))


def generate_batch(cfg: GeneratorConfig, count: int) -> list[Generated]:
    rng = np.random.default_rng(cfg.seed)
    return [generate(cfg, rng) for _ in range(count)]
