"""Time-indexed integer programs, an LP-format writer and the harmonic
integrality-gap instance.

Models keep exact coefficients (``int`` or ``Fraction``); floats appear
only when a model is written out.  Variables are ``x_j_s`` (job ``j``
starts at slot ``s``) plus one auxiliary: ``T`` for makespan or ``v`` for
the machine count.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

from .model import Instance, lower_bound_basic

Number = int | Fraction


def xname(j: int, s: int) -> str:
    return f"x_{j}_{s}"


@dataclass(frozen=True)
class Row:
    family: str
    index: tuple[int, ...]
    terms: tuple[tuple[Number, str], ...]
    sense: str  # "<=", ">=", "="
    rhs: Number = 0

    @property
    def name(self) -> str:
        return "_".join([self.family, *map(str, self.index)])

    def lhs(self, values: Mapping[str, Number]) -> Number:
        return sum((c * values.get(var, 0) for c, var in self.terms), 0)

    def residual(self, values: Mapping[str, Number]) -> Number:
        """Amount by which the row is violated (0 when satisfied)."""
        gap = self.lhs(values) - self.rhs
        if self.sense == "<=":
            return max(gap, 0)
        if self.sense == ">=":
            return max(-gap, 0)
        return abs(gap)


@dataclass
class TimeIndexedModel:
    name: str
    form: str  # "bjsp" or "lexopt"
    horizon: int
    starts: dict[int, tuple[int, ...]]  # F_j
    objective: list[tuple[Number, str]]
    rows: list[Row] = field(default_factory=list)
    bounds: dict[str, tuple[Number, Number | None]] = field(default_factory=dict)
    objective_constant: Number = 0

    @property
    def binaries(self) -> list[str]:
        return [xname(j, s) for j in sorted(self.starts) for s in self.starts[j]]

    @property
    def aux(self) -> list[str]:
        return sorted(self.bounds)

    def sorted_rows(self) -> list[Row]:
        return sorted(self.rows, key=lambda r: (r.family, r.index))

    def family_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.rows:
            out[r.family] = out.get(r.family, 0) + 1
        return out

    def objective_value(self, values: Mapping[str, Number]) -> Number:
        return self.objective_constant + sum((c * values.get(v, 0) for c, v in self.objective), 0)


def _start_sets(instance: Instance, tau: int, deadline: int | None = None):
    out = {}
    for j in instance.jobs:
        p = instance.proc(j)
        last = tau - p + 1
        if deadline is not None:
            last = min(last, deadline - p)
        out[j] = tuple(range(1, last + 1))
    return out


def _shared_rows(instance: Instance, F, tau: int, cap_terms, cap_rhs) -> list[Row]:
    rows = []
    for j, Fj in F.items():
        rows.append(Row("assign", (j,), tuple((1, xname(j, s)) for s in Fj), "=", 1))
    for t in range(1, tau + 1):
        terms = tuple((1, xname(j, s)) for j, Fj in F.items()
                      for s in Fj if s <= t <= s + instance.proc(j) - 1)
        if terms:
            rows.append(Row("capacity", (t,), terms + cap_terms, "<=", cap_rhs))
    for s in range(1, tau + 1):
        terms = tuple((1, xname(j, s)) for j, Fj in F.items() if s in Fj)
        if terms:
            rows.append(Row("bjsp", (s,), terms, "<=", instance.g))
    return rows


def emit_bjsp_model(instance: Instance, tau: int | None = None, name: str = "instance") -> TimeIndexedModel:
    """Makespan model over start slots 1..tau.

    The product row T >= (s + p_j) x_{j,s} is kept per pair as
    T - (s + p_j) x_{j,s} >= 0, exact for binary x.
    """
    tau = instance.horizon() if tau is None else tau
    if instance.n and (tau < instance.p_max or tau + 1 < lower_bound_basic(instance)
                       or instance.m * tau < sum(instance.p)):
        raise ValueError(f"horizon {tau} admits no feasible schedule")
    F = _start_sets(instance, tau)
    rows = [Row("makespan", (j, s), ((1, "T"), (-(s + instance.proc(j)), xname(j, s))), ">=", 0)
            for j, Fj in F.items() for s in Fj]
    rows += _shared_rows(instance, F, tau, (), instance.m)
    return TimeIndexedModel(name, "bjsp", tau, F, [(1, "T")], rows, {"T": (0, None)})


def period_weight(completion: int, deadline: int, periods: int) -> int:
    """2**q where q = ceil(C * l / D) is the period containing C."""
    return 2 ** math.ceil(Fraction(completion * periods, deadline))


def default_theta(n: int, periods: int) -> Fraction:
    return Fraction(1, max(n, 1) * 2 ** (periods + 1))


def emit_lexopt_model(instance: Instance, deadline: int, theta: Number | None = None,
                      periods: int = 8, name: str = "instance") -> TimeIndexedModel:
    """Machine count plus theta times period-rounded completion weights.

    Start sets are pruned to s + p_j <= D, which enforces the deadline, and
    capacity rows read sum x - v <= 0.
    """
    if periods < 1:
        raise ValueError("periods must be >= 1")
    theta = default_theta(instance.n, periods) if theta is None else Fraction(theta)
    if theta < 0:
        raise ValueError("theta must be non-negative")
    tau = deadline - 1
    F = _start_sets(instance, tau, deadline)
    if any(not Fj for Fj in F.values()) or (instance.n and lower_bound_basic(instance) > deadline):
        warnings.warn(f"deadline {deadline} is below the minimum makespan; model is infeasible",
                      stacklevel=2)
    obj: list[tuple[Number, str]] = [(1, "v")]
    for j, Fj in F.items():
        for s in Fj:
            w = period_weight(s + instance.proc(j), deadline, periods)
            if theta:
                obj.append((theta * w, xname(j, s)))
    rows = _shared_rows(instance, F, max(tau, 0), ((-1, "v"),), 0)
    return TimeIndexedModel(name, "lexopt", max(tau, 0), F, obj, rows, {"v": (0, instance.m)})


# ---------------------------------------------------------------------------
# LP text


def _num(c: Number) -> str:
    if isinstance(c, int) or (isinstance(c, Fraction) and c.denominator == 1):
        return str(int(c))
    return format(float(c), ".17g")


def _expr(terms: Iterable[tuple[Number, str]]) -> list[str]:
    tokens = []
    for c, var in terms:
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = var if mag == 1 else f"{_num(mag)} {var}"
        tokens.append(f"{sign} {body}")
    if tokens and tokens[0].startswith("+ "):
        tokens[0] = tokens[0][2:]
    return tokens or ["0"]


def _wrap(head: str, tokens: list[str], width: int = 78) -> list[str]:
    lines, cur = [], head
    for tok in tokens:
        if len(cur) + 1 + len(tok) > width and cur.strip():
            lines.append(cur)
            cur = "   " + tok
        else:
            cur = f"{cur} {tok}" if cur else tok
    lines.append(cur)
    return lines


def lp_text(model: TimeIndexedModel) -> str:
    out = [f"\\ {model.name} {model.form} horizon={model.horizon}", "Minimize"]
    obj = _expr(model.objective)
    if model.objective_constant:
        obj.append(f"+ {_num(model.objective_constant)}")
    out += _wrap(" obj:", obj)
    out.append("Subject To")
    for r in model.sorted_rows():
        out += _wrap(f" {r.name}:", _expr(r.terms) + [r.sense, _num(r.rhs)])
    out.append("Bounds")
    for var in model.aux:
        lo, hi = model.bounds[var]
        out.append(f" {_num(lo)} <= {var}" + ("" if hi is None else f" <= {_num(hi)}"))
    out.append("Binaries")
    out += _wrap("", model.binaries) if model.binaries else []
    out.append("End")
    return "\n".join(out) + "\n"


def write_lp_file(model: TimeIndexedModel, path: str | os.PathLike) -> Path:
    """Write ``model``; a directory path gets ``<name>.<form>.lp`` inside it."""
    path = Path(path)
    if path.is_dir():
        path = path / f"{model.name}.{model.form}.lp"
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(lp_text(model))
    return path


# ---------------------------------------------------------------------------
# exhaustive integer evaluation, independent of the exact module


def enumerate_optimum(model: TimeIndexedModel) -> tuple[Number, dict[int, int]] | None:
    """Best objective over binary x with one start per job.

    Jobs are fixed one at a time over their start sets.  Every row is read
    as written from the model: rows without the auxiliary variable are
    checked (exactly once the assignment is complete), and rows with it
    set the least value the auxiliary can take.  Branches are cut only
    when a ``<=`` row with non-negative x coefficients is already exceeded
    or the objective, whose x coefficients are non-negative, can no
    longer improve.
    """
    jobs = sorted(model.starts)
    (aux,) = model.aux
    lo, hi = model.bounds[aux]
    obj = {v: c for c, v in model.objective}
    if any(c < 0 for v, c in obj.items() if v != aux) or obj.get(aux, 0) < 0:
        raise ValueError("enumeration needs a non-negative objective")
    # per variable: (row index, coefficient) pairs
    touches: dict[str, list[tuple[int, Number]]] = {}
    aux_coef, monotone = [], []
    for i, r in enumerate(model.rows):
        a = sum((c for c, v in r.terms if v == aux), 0)
        aux_coef.append(a)
        if a and not ((r.sense == ">=" and a > 0) or (r.sense == "<=" and a < 0)):
            raise ValueError(f"row {r.name} bounds the auxiliary from above")
        monotone.append(a == 0 and r.sense == "<=" and all(c >= 0 for c, v in r.terms))
        for c, v in r.terms:
            if v != aux:
                touches.setdefault(v, []).append((i, c))
    lhs = [0] * len(model.rows)
    choice: dict[int, int] = {}
    best: list = [None]

    def need_of():
        need = lo
        for i, r in enumerate(model.rows):
            a = aux_coef[i]
            if a:
                need = max(need, Fraction(r.rhs - lhs[i], a))
        return need

    def rec(k, partial):
        if best[0] is not None and obj.get(aux, 0) * need_of() + partial >= best[0][0]:
            return
        if k == len(jobs):
            for i, r in enumerate(model.rows):
                if not aux_coef[i]:
                    gap = lhs[i] - r.rhs
                    if (r.sense == "<=" and gap > 0) or (r.sense == ">=" and gap < 0) \
                            or (r.sense == "=" and gap != 0):
                        return
            need = need_of()
            if hi is not None and need > hi:
                return
            val = model.objective_constant + obj.get(aux, 0) * need + partial
            if best[0] is None or val < best[0][0]:
                best[0] = (val, dict(choice))
            return
        j = jobs[k]
        for s in model.starts[j]:
            name = xname(j, s)
            row_hits = touches.get(name, ())
            for i, c in row_hits:
                lhs[i] += c
            if all(not monotone[i] or lhs[i] <= model.rows[i].rhs for i, _ in row_hits):
                choice[j] = s
                rec(k + 1, partial + obj.get(name, 0))
            for i, c in row_hits:
                lhs[i] -= c
        choice.pop(j, None)

    rec(0, 0)
    return best[0]


# ---------------------------------------------------------------------------
# integrality gap


def harmonic(k: int) -> Fraction:
    return sum((Fraction(1, t) for t in range(1, k + 1)), Fraction(0))


@dataclass(frozen=True)
class FractionalSolution:
    x: dict[tuple[int, int], Fraction]
    objective: Fraction
    horizon: int


def gap_instance(m: int, tau: int | None = None) -> tuple[Instance, FractionalSolution]:
    """m unit jobs, g = m, with x_{j,s} = 1 / (s * H_tau) for s = 1..tau."""
    if m < 2:
        raise ValueError("need m >= 2")
    tau = m if tau is None else tau
    if tau < 1:
        raise ValueError("tau must be >= 1")
    inst = Instance(m, m, (1,) * m)
    h = harmonic(tau)
    x = {(j, s): 1 / (s * h) for j in inst.jobs for s in range(1, tau + 1)}
    obj = max((s + 1) * v for (j, s), v in x.items())
    return inst, FractionalSolution(x, obj, tau)


@dataclass
class FractionalReport:
    violations: list[tuple[str, Fraction]]
    objective: Fraction
    start_weighted: Fraction
    integral_optimum: int | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def gap(self) -> Fraction | None:
        if self.integral_optimum is None:
            return None
        return Fraction(self.integral_optimum) / self.objective


def verify_fractional(instance: Instance, sol: FractionalSolution,
                      integral_optimum: int | None = None) -> FractionalReport:
    """Check the relaxed makespan model exactly at ``sol``.

    ``objective`` is the makespan-row value max (s + p_j) x_{j,s};
    ``start_weighted`` is max s * x_{j,s}, kept for comparison.
    """
    model = emit_bjsp_model(instance, sol.horizon)
    vals: dict[str, Number] = {xname(j, s): v for (j, s), v in sol.x.items()}
    known = set(model.binaries)
    viol = [(f"unknown_{k}", Fraction(v)) for k, v in vals.items() if k not in known and v]
    vals["T"] = sol.objective
    for name in model.binaries:
        v = vals.get(name, 0)
        if v < 0 or v > 1:
            viol.append((f"bound_{name}", Fraction(v if v < 0 else v - 1)))
    for r in model.sorted_rows():
        res = r.residual(vals)
        if res:
            viol.append((r.name, Fraction(res)))
    sw = max((s * v for (j, s), v in sol.x.items()), default=Fraction(0))
    return FractionalReport(viol, Fraction(sol.objective), Fraction(sw), integral_optimum)
