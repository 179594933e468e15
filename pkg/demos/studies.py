"""
Synthetic office studies
========================

Instances mimic a depot: departures cluster in a morning wave in 15
minute slots and each route takes at least two slots.  The baseline
dispatch stands in for historical records.
"""

import csv
import io

from bjsp.harness import GeneratorConfig, generate
from bjsp.harness.studies import ExperimentSpec, run_study

gen = generate(GeneratorConfig(seed=3))
print("p =", gen.instance.p, "g =", gen.instance.g, "baseline vehicles =",
      gen.baseline.machine_count, "deadline =", gen.deadline)

for kind in ("machine-count", "halving", "g-sweep"):
    text = run_study(ExperimentSpec(kind, seed=0, count=6, g_values=(1, 2, 3)))
    rows = list(csv.DictReader(io.StringIO(text)))
    print(f"\n{kind}: {len(rows)} rows")
    print(text.strip())
