"""End-to-end acceptance checks.

Each test prints one PASS/FAIL line (collected in the terminal summary
by conftest.py).  Run ``python tests/test_acceptance.py`` to get just the
lines without pytest.

Criteria are checked as stated, at their stated tolerance.  A failing
line here means the literal target is not met by this implementation;
the measured values are printed next to the target.
"""

from __future__ import annotations

import functools
import itertools
import math
import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from bjsp.exact import (branch_and_bound_opt, brute_force_opt, from_three_partition,
                        gap_comparison_schedule, lpt_long_gap_instance, min_makespan,
                        tight_comparison_schedule, tight_instance_lpt, verified_makespan)
from bjsp.greedy import lpt, lsm
from bjsp.harness.io import dump_instance
from bjsp.harness.studies import ExperimentSpec, enumerate_box, run_robustness_scatter
from bjsp.milp import gap_instance, harmonic, verify_fractional
from bjsp.model import (Instance, bounds, classify, decompose_periods,
                        idle_upper_bound, makespan)
from bjsp.robust import (MetricRow, Scenario, perturb, price_of_robustness, rank_correlation,
                         stage1, stage2_recover)

sys.path.insert(0, str(Path(__file__).parent))
from oracles import program2_max, three_partition_exists  # noqa: E402

RESULTS: dict[str, str] = {}


def record(key: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {key}: {detail}"
    RESULTS[key] = line
    print(line, flush=True)
    assert ok, line


@functools.cache
def oracle_box():
    """(instance, B&B value, brute-force value, LPT makespan) over the box, plus timings."""
    insts = list(enumerate_box(7, 5, 3, (1, 2)))
    t0 = time.perf_counter()
    bb = [branch_and_bound_opt(i).value for i in insts]
    t1 = time.perf_counter()
    bf = [brute_force_opt(i).value for i in insts]
    t2 = time.perf_counter()
    lp = [makespan(lpt(i)) for i in insts]
    t3 = time.perf_counter()
    return insts, bb, bf, lp, (t1 - t0, t2 - t1, t3 - t2)


def test_oracle_equivalence():
    insts, bb, bf, _, (tb, tf, _) = oracle_box()
    bad = sum(a != b for a, b in zip(bb, bf))
    record("oracle-equivalence", bad == 0 and tb + tf < 600,
           f"{len(insts)} instances, {bad} mismatches, {tb + tf:.1f}s (limit 600s)")


def test_lpt_ratio_two():
    insts, bb, _, lp, (_, _, tl) = oracle_box()
    worst = max(Fraction(t, o) for t, o in zip(lp, bb))
    t0 = time.perf_counter()
    m, p = 10, 200
    t_lpt = makespan(lpt(tight_instance_lpt(m, p)))
    t_cmp = verified_makespan(tight_comparison_schedule(m, p))
    elapsed = tl + time.perf_counter() - t0
    ok = worst <= 2 and t_lpt == 3700 and t_cmp == 2000 and elapsed < 60
    record("lpt-ratio-two", ok,
           f"box max LPT/OPT {worst}; tight family LPT {t_lpt} (target 3700), "
           f"comparison {t_cmp} (target 2000), ratio {float(Fraction(t_lpt, t_cmp)):.4f}; "
           f"{elapsed:.1f}s")


def test_lpt_short_closed_form():
    rng = random.Random(2024)
    bad = 0
    for _ in range(1000):
        m = rng.randint(2, 12)
        p = tuple(rng.randint(1, m - 1) for _ in range(rng.randint(1, 40)))
        inst = Instance(m, 1, p)
        closed = max(j + q for j, q in enumerate(sorted(p, reverse=True), 1))
        bad += makespan(lpt(inst)) != closed
    record("lpt-short-closed-form", bad == 0, f"1000 random short g=1 instances, {bad} mismatches")


def test_lpt_long_five_thirds():
    insts, bb, _, lp, _ = oracle_box()
    worst = max((Fraction(t, o) for i, t, o in zip(insts, lp, bb)
                 if i.g == 1 and classify(i) == "long"), default=Fraction(0))
    m = 4
    t_lpt = makespan(lpt(lpt_long_gap_instance(m)))
    t_cmp = verified_makespan(gap_comparison_schedule(m))
    ok = worst <= Fraction(5, 3) and t_lpt == 3 * m - 1 and t_cmp == 2 * m
    record("lpt-long-five-thirds", ok,
           f"box long g=1 max LPT/OPT {worst} (limit 5/3); gap family m=4 LPT {t_lpt} "
           f"(target 11), comparison {t_cmp} (target 8)")


def test_slack_periods():
    rng = random.Random(7)
    counts = {"length": 0, "idle": 0, "total": 0}
    done = 0
    while done < 500:
        m = rng.randint(2, 8)
        p = tuple(rng.randint(m, 4 * m) for _ in range(rng.randint(1, 4 * m)))
        inst = Instance(m, 1, p)
        s = lpt(inst)
        nonfinal = [q for q in decompose_periods(inst, s).slack if q.end < s.last_start]
        for q in nonfinal:
            counts["length"] += q.length > m - 1
            counts["idle"] += q.idle > q.length * (q.length - 1) // 2
        counts["total"] += 2 * sum(q.idle for q in nonfinal) > inst.n * m
        done += 1
    ok = not any(counts.values())
    record("slack-periods", ok,
           f"500 long g=1 LPT schedules; violations: length>m-1 {counts['length']}, "
           f"idle>l(l-1)/2 {counts['idle']}, total>nm/2 {counts['total']}")


def test_idle_bound():
    bad = [(n, m) for n in range(13) for m in range(1, 5) if idle_upper_bound(n, m) != program2_max(n, m)]
    record("idle-bound", not bad, f"n<=12, m<=4: {len(bad)} mismatches {bad[:3]}")


def test_lsm_mixed():
    t0 = time.perf_counter()
    checked = opt_calls = out_of_scope = bad = 0
    worst = worst_lb = Fraction(0)
    for m in (7, 8):
        cap = math.ceil(Fraction(5 * m, 6))
        for n in range(1, 10):
            for p in itertools.combinations_with_replacement(range(10, 0, -1), n):
                inst = Instance(m, 1, p)
                if classify(inst) != "mixed":
                    continue
                checked += 1
                t = makespan(lsm(inst))
                # T / LB <= 1.985 already bounds T / OPT
                to_lb = Fraction(t, bounds(inst).best)
                worst_lb = max(worst_lb, to_lb)
                if to_lb <= Fraction(1985, 1000):
                    continue
                opt_calls += 1
                opt = branch_and_bound_opt(inst).value
                if sum(2 * q > opt for q in p) > cap:
                    out_of_scope += 1
                    continue
                r = Fraction(t, opt)
                worst = max(worst, r)
                bad += r > Fraction(1985, 1000)
    record("lsm-mixed", bad == 0,
           f"{checked} mixed instances (m in 7,8; n<=9; p<=10), {opt_calls} solved exactly, "
           f"{out_of_scope} outside the very-long hypothesis, "
           f"{bad} violations, worst LSM/LB {worst_lb} = {float(worst_lb):.4f} "
           f"(an upper bound on LSM/OPT), worst exact LSM/OPT {worst if opt_calls else 'n/a'}, {time.perf_counter() - t0:.0f}s")


def test_lp_gap():
    notes, ok = [], True
    for m in (4, 8, 16, 32, 64):
        inst, sol = gap_instance(m)
        rep = verify_fractional(inst, sol, integral_optimum=2)
        good = rep.ok and rep.gap == harmonic(m)
        ok &= good
        notes.append(f"m={m} gap {float(rep.gap):.4f}{'' if good else ' BAD'}")
    h64 = harmonic(64)
    ok &= h64 > Fraction(47, 10) and float(h64) > math.log(64)
    record("lp-gap", ok, "; ".join(notes) + f"; H_64={float(h64):.4f} > 4.7 > ln 64")


def test_three_partition():
    tested = disagree = yes = 0
    for B in range(1, 7):
        vals = [x for x in range(1, B + 1) if B <= 4 * x and 2 * x <= B]
        for a in itertools.combinations_with_replacement(vals, 6):
            if sum(a) != 2 * B:
                continue
            inst, thr = from_three_partition(a, B)
            exists = three_partition_exists(a, B)
            tested += 1
            yes += exists
            disagree += (branch_and_bound_opt(inst).value < thr) != exists
    record("three-partition", disagree == 0,
           f"{tested} valid instances with B<=6 ({yes} yes), {disagree} disagreements")


def test_recovery():
    rng = random.Random(99)
    bad = {"starts": 0, "overlap": 0, "shrink": 0, "price": 0}
    for k in range(1000):
        m, g = rng.randint(1, 4), rng.randint(1, 2)
        p = tuple(rng.randint(1, 5) for _ in range(rng.randint(1, 6)))
        inst = Instance(m, g, p)
        d = min_makespan(inst)[0] + rng.randint(0, 2)
        s = stage1(inst, d)
        kind = k % 3
        if kind == 0:
            sc = Scenario.identity(inst.n)
        elif kind == 1:
            sc = Scenario(tuple(Fraction(rng.randint(1, 4), 4) for _ in p), 4)
        else:
            sc = Scenario(tuple(Fraction(rng.randint(2, 8), 4) for _ in p), 2)
        real = perturb(inst, sc)
        rec = stage2_recover(s, real, d)
        bad["starts"] += rec.starts != s.starts
        used = set()
        for j, t in rec.starts.items():
            for u in range(t, t + real.proc(j)):
                bad["overlap"] += (rec.machines[j], u) in used
                used.add((rec.machines[j], u))
        if all(f <= 1 for f in sc.factors):
            bad["shrink"] += rec.machine_count > s.machine_count
        if kind == 0:
            bad["price"] += price_of_robustness(rec, real, d) != 1
    record("recovery", not any(bad.values()), f"1000 pairs; violations {bad}")


def test_robust_trend():
    t0 = time.perf_counter()
    spec = ExperimentSpec("robustness-scatter", seed=0, count=20, pool_size=20, scenarios=50,
                          F=Fraction(2))
    by: dict[str, list[MetricRow]] = {}
    for line in run_robustness_scatter(spec).splitlines()[1:]:
        sid, f, v, pr, late = line.split(",")
        by.setdefault(sid.split(":")[0], []).append(
            MetricRow(sid, Fraction(f), Fraction(v), Fraction(pr), int(late)))
    rhos = [rank_correlation(rows) for rows in by.values()]
    sizes = sorted({len(rows) for rows in by.values()})
    positive = sum(r > 0 for r in rhos)
    record("robust-trend", positive >= 16 and len(by) == 20,
           f"{positive}/20 instances with positive Spearman rho (need 16); pool sizes {sizes}; "
           f"median rho {sorted(rhos)[len(rhos) // 2]:.3f}; {time.perf_counter() - t0:.0f}s")


def _cli(args, cwd):
    proc = subprocess.run([sys.executable, "-m", "bjsp", *args], cwd=cwd,
                          capture_output=True)
    return proc.returncode, proc.stdout


def _snapshot(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_cli_determinism(tmp_path):
    inst = tmp_path / "in.json"
    inst.write_text(dump_instance(Instance(3, 2, (5, 3, 3, 2, 2, 1, 4))))
    commands = [
        ["solve", "--algo", "lpt", "--instance", inst],
        ["solve", "--algo", "lspt", "--instance", inst],
        ["solve", "--algo", "lsm", "--instance", inst],
        ["solve", "--algo", "exact", "--instance", inst],
        ["solve", "--algo", "exact", "--instance", inst, "--deadline", "9"],
        ["bound", "--instance", inst],
        ["emit-lp", "--instance", inst],
        ["emit-lp", "--instance", inst, "--form", "lexopt", "--deadline", "9", "--periods", "3"],
        ["robust-run", "--instance", inst, "--deadline", "9", "--pool", "6", "--scenarios", "10",
         "--seed", "3"],
        ["gen", "--count", "3", "--seed", "5", "--out", "{dir}/gen"],
        ["bench", "machine-count", "--count", "3", "--seed", "1"],
        ["bench", "halving", "--count", "3", "--seed", "1"],
        ["bench", "g-sweep", "--count", "2", "--seed", "1", "--g", "1,2"],
        ["bench", "robustness-scatter", "--count", "1", "--pool", "10", "--scenarios", "20"],
        ["bench", "ratio-study", "--out", "{dir}/ratio.csv"],
    ]
    differ = []
    for cmd in commands:
        outs = []
        for rep in ("a", "b"):
            work = tmp_path / rep / str(commands.index(cmd))
            work.mkdir(parents=True)
            args = [str(a).replace("{dir}", str(work)) for a in cmd]
            code, out = _cli(args, work)
            outs.append((code, out, _snapshot(work)))
        if outs[0] != outs[1] or outs[0][0] != 0:
            differ.append(" ".join(map(str, cmd[:2])))
    record("cli-determinism", not differ,
           f"{len(commands)} commands run twice; differing or failing: {differ or 'none'}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
