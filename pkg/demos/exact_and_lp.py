"""
Exact search and the time-indexed model
=======================================

The exact solver is a memoised search over slots.  The same instances
can be written out as CPLEX-LP files for an external MILP solver, and
the fractional relaxation of the model can be far from integral.
"""

import tempfile
from pathlib import Path

from bjsp import Instance
from bjsp.exact import branch_and_bound_opt, brute_force_opt, exact_lex
from bjsp.milp import (emit_bjsp_model, emit_lexopt_model, enumerate_optimum, gap_instance,
                       lp_text, verify_fractional, write_lp_file)

inst = Instance(m=2, g=1, p=(3, 3, 3))
fast, slow = branch_and_bound_opt(inst), brute_force_opt(inst)
print("search", fast.value, fast.status, "| enumeration", slow.value, slow.schedule.starts)

# %%
# Fewest machines for a deadline, then the earliest completions.
lex = exact_lex(Instance(m=3, g=1, p=(2, 2, 2)), deadline=7)
print("machines", lex.info["v"], "completion profile", lex.info["profile"])

# %%
# The makespan model for a tiny instance, and its optimum by enumeration.
model = emit_bjsp_model(Instance(m=2, g=1, p=(2, 1)), tau=3, name="tiny")
print(lp_text(model))
print("enumerated optimum", enumerate_optimum(model)[0])

out = Path(tempfile.mkdtemp())
path = write_lp_file(emit_lexopt_model(inst, deadline=8, periods=2, name="three"), out)
print("wrote", path.name, path.stat().st_size, "bytes")

# %%
# Spreading each job evenly over the horizon is feasible for the
# relaxation.  Its value sits a harmonic factor below the integral one.
for m in (4, 16, 64):
    gi, sol = gap_instance(m)
    rep = verify_fractional(gi, sol, integral_optimum=2)
    print(f"m={m:2d} residual-free={rep.ok} gap={float(rep.gap):.4f}")
