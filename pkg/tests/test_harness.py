import csv
import io
import random
from fractions import Fraction

import pytest

from bjsp.exact import min_machines
from bjsp.harness import GeneratorConfig, generate
from bjsp.harness.generator import generate_batch
from bjsp.harness.io import (dump_instance, dump_schedule, load_instance, load_schedule,
                             read_instance)
from bjsp.harness.studies import (ExperimentSpec, enumerate_box, halve, run_g_sweep,
                                  run_halving_study, run_machine_count_study,
                                  run_ratio_study, run_robustness_scatter, run_study, witness)
from bjsp.greedy import lpt
from bjsp.model import Instance, InstanceError, check_feasible, makespan

from oracles import feasible_start_vectors, peak


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestIo:
    def test_instance_round_trip(self):
        inst = Instance(3, 2, (4, 1, 2))
        text = dump_instance(inst, "x")
        assert load_instance(text) == inst
        assert text == '{"format": "bjsp-v1", "g": 2, "id": "x", "m": 3, "p": [4, 1, 2]}\n'

    def test_schedule_round_trip(self):
        inst = Instance(2, 1, (2, 2, 1))
        s = lpt(inst)
        back = load_schedule(dump_schedule(s, "heuristic"), inst)
        assert back.starts == s.starts and back.machines == s.machines

    def test_rejects_other_format(self):
        with pytest.raises(ValueError):
            load_instance('{"format": "v0", "m": 1, "g": 1, "p": [1]}')

    def test_rejects_bad_values(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"m": 0, "g": 1, "p": [1]}')
        with pytest.raises(InstanceError):
            read_instance(path)
        with pytest.raises(ValueError):
            load_instance("[1, 2]")


class TestGenerator:
    def test_deterministic(self):
        a, b = generate(GeneratorConfig(seed=3)), generate(GeneratorConfig(seed=3))
        assert dump_instance(a.instance) == dump_instance(b.instance)
        assert a.baseline.starts == b.baseline.starts

    def test_invariants(self):
        cfg = GeneratorConfig(seed=1)
        for gen in generate_batch(cfg, 40):
            inst = gen.instance
            assert min(inst.p) >= 2
            assert cfg.n_min <= inst.n <= cfg.n_max
            assert max(inst.p) <= -(-cfg.tail[1] // cfg.delta)
            assert check_feasible(inst, gen.baseline)
            assert gen.baseline.machine_count == inst.m
            assert makespan(gen.baseline) == gen.deadline

    def test_baseline_not_better_than_optimum(self):
        for gen in generate_batch(GeneratorConfig(seed=2), 15):
            assert min_machines(gen.instance, gen.deadline) <= gen.baseline.machine_count

    def test_fixed_g(self):
        for gen in generate_batch(GeneratorConfig(seed=4, g=1), 5):
            assert gen.instance.g == 1

    def test_bad_config(self):
        with pytest.raises(ValueError):
            GeneratorConfig(delta=0)
        with pytest.raises(ValueError):
            GeneratorConfig(n_min=5, n_max=3)


class TestStudies:
    def test_machine_count(self):
        table = rows(run_machine_count_study(ExperimentSpec("machine-count", seed=0, count=30,
                                                            generator=GeneratorConfig(
                                                                seed=0, n_min=8, n_max=12))))
        assert len(table) == 30
        saving = [int(r["V_hist"]) - int(r["V_opt"]) for r in table]
        assert min(saving) >= 0 and sum(saving) > 0

    def test_empty_batch(self):
        for kind in ("machine-count", "halving", "g-sweep", "robustness-scatter"):
            text = run_study(ExperimentSpec(kind, count=0))
            assert text.count("\n") == 1

    def test_halving(self):
        for r in rows(run_halving_study(ExperimentSpec("halving", count=10, seed=5))):
            assert int(r["V_opt_halved"]) <= int(r["V_opt"])

    def test_halving_example(self):
        inst = Instance(2, 2, (2, 2))
        assert min_machines(inst, 3) == 2 and min_machines(halve(inst), 3) == 1

    def test_g_sweep_monotone(self):
        spec = ExperimentSpec("g-sweep", count=6, seed=2, g_values=(1, 2, 3, 4))
        by = {}
        for r in rows(run_g_sweep(spec)):
            by.setdefault(r["instance_id"], []).append(r["V_opt"])
        for vals in by.values():
            nums = [int(v) for v in vals if v.isdigit()]
            assert nums == sorted(nums, reverse=True)
            # once feasible, stays feasible
            flags = [v.isdigit() for v in vals]
            assert flags == sorted(flags)

    def test_g_at_least_n_is_interval_colouring(self):
        rng = random.Random(6)
        for _ in range(25):
            p = tuple(rng.randint(1, 3) for _ in range(rng.randint(1, 4)))
            d = rng.randint(max(p) + 1, sum(p) + 2)
            best = min(peak(p, s) for s in feasible_start_vectors(len(p), len(p), p, d - 1))
            assert min_machines(Instance(len(p), len(p), p), d) == best

    def test_unit_chain(self):
        assert min_machines(Instance(3, 1, (1,) * 5), 6) == 1

    def test_robustness_scatter(self):
        spec = ExperimentSpec("robustness-scatter", count=2, seed=1, pool_size=10, scenarios=20)
        text = run_robustness_scatter(spec)
        table = rows(text)
        assert {r["schedule_id"].split(":")[0] for r in table} == {"inst000", "inst001"}
        for inst in ("inst000", "inst001"):
            part = [r for r in table if r["schedule_id"].startswith(inst)]
            assert min(float(r["F_norm"]) for r in part) == 1.0
            assert min(float(r["V_norm"]) for r in part) >= 1.0
        assert run_robustness_scatter(spec) == text

    def test_ratio_study(self):
        spec = ExperimentSpec("ratio-study", n_max=4, p_max=3, m_max=2)
        table = {(r["algo"], r["class"]): r for r in rows(run_ratio_study(spec))}
        assert Fraction(table["lpt", "all"]["max_ratio"]) <= 2
        assert Fraction(table["lpt", "long-g1"]["max_ratio"]) <= Fraction(5, 3)
        assert Fraction(table["lpt", "short-g1"]["max_ratio"]) == 1
        assert table["lpt", "all"]["witness_instance"].startswith("m=")

    def test_bad_spec(self):
        with pytest.raises(ValueError):
            ExperimentSpec("plots")
        with pytest.raises(ValueError):
            ExperimentSpec("halving", count=-1)


class TestBox:
    def test_counts(self):
        # multisets of size n from {1..p}: C(p + n - 1, n)
        assert sum(1 for _ in enumerate_box(3, 2, 1, (1,))) == 2 + 3 + 4
        assert sum(1 for _ in enumerate_box(2, 2, 2, (1, 2))) == 4 * 5

    def test_witness(self):
        assert witness(Instance(2, 1, (3, 1))) == "m=2;g=1;p=3-1"
