"""
Greedy schedules and lower bounds
=================================

A job of length p started at slot s occupies slots s..s+p-1 and
completes at s+p.  At most m jobs run at once and at most g jobs start
in any single slot.
"""

from fractions import Fraction

from bjsp import Instance, bounds, check_feasible, lpt, lsm, lspt, makespan
from bjsp.exact import min_makespan, tight_comparison_schedule, tight_instance_lpt

# a small mixed instance: two machines, one start per slot
inst = Instance(m=2, g=1, p=(5, 3, 3, 2, 1))
for algo in (lpt, lspt, lsm):
    s = algo(inst)
    print(f"{algo.__name__:5s} starts={s.starts} makespan={makespan(s)}")

# the lower bounds the certificate is measured against
b = bounds(inst)
opt, _ = min_makespan(inst)
print("basic bound", b.basic_lb, "long bound", b.long_lb, "exact optimum", opt)

# %%
# Short instances (every p < m) with g = 1 have a closed form for LPT:
# the j-th longest job starts at slot j.
short = Instance(m=6, g=1, p=(5, 4, 4, 2, 1, 1, 1))
q = sorted(short.p, reverse=True)
print("LPT", makespan(lpt(short)), "closed form", max(j + x for j, x in enumerate(q, 1)))

# %%
# A bad family for LPT: m(m-1) long jobs and a pile of unit jobs.  LPT
# stacks the long jobs first and the comparison schedule interleaves them.
for m, p in [(3, 30), (10, 200)]:
    fam = tight_instance_lpt(m, p)
    ours, theirs = lpt(fam), tight_comparison_schedule(m, p)
    assert check_feasible(fam, theirs)
    print(f"m={m} p={p}: LPT {makespan(ours)} vs {makespan(theirs)}",
          f"ratio {float(Fraction(makespan(ours), makespan(theirs))):.3f}")
