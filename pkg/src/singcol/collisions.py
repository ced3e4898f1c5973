"""Closed-form collision rules, kept as a table of guarded data entries."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .algebra import Polynomial
from .catalog import TypeName, free_branches, normal_form, parse_type_name, recognize
from .errors import (
    NotTabulatedError,
    OrderConventionError,
    ParseError,
    PreconditionError,
    UnsupportedCaseError,
)
from .invariants import InvariantRecord, invariant_record
from .newton import NewtonDiagram, diagram_of, poly_diagram


@dataclass(frozen=True)
class CollisionData:
    l_eq_lx: bool = False
    l_eq_ly: bool = False
    lx_eq_ly: bool = False
    trajectory_order: int = 1

    def __post_init__(self):
        if self.l_eq_lx and self.l_eq_ly and not self.lx_eq_ly:
            raise PreconditionError("l = l_x and l = l_y force l_x = l_y")
        if self.trajectory_order < 1:
            raise PreconditionError("trajectory order starts at 1")

    @classmethod
    def parse(cls, text: str | None) -> "CollisionData":
        flags = {"l_eq_lx": False, "l_eq_ly": False, "lx_eq_ly": False}
        for item in (text or "").split(","):
            item = item.strip().replace(" ", "")
            if not item:
                continue
            key = {"l=lx": ("l_eq_lx", True), "l!=lx": ("l_eq_lx", False),
                   "l=ly": ("l_eq_ly", True), "l!=ly": ("l_eq_ly", False),
                   "lx=ly": ("lx_eq_ly", True), "lx!=ly": ("lx_eq_ly", False)}.get(item)
            if key is None:
                raise ParseError(f"unknown collision flag {item!r}", (text or "").find(item))
            flags[key[0]] = key[1]
        if flags["l_eq_lx"] and flags["l_eq_ly"]:
            flags["lx_eq_ly"] = True
        return cls(**flags)

    def to_json(self) -> dict:
        return {"l_eq_lx": self.l_eq_lx, "l_eq_ly": self.l_eq_ly,
                "lx_eq_ly": self.lx_eq_ly, "trajectory_order": self.trajectory_order}


# --- bounds -----------------------------------------------------------------


@dataclass
class BoundReport:
    items: dict[str, tuple[bool, str]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(passed for passed, _ in self.items.values())

    def failures(self) -> list[str]:
        return [f"{k}: {msg}" for k, (passed, msg) in self.items.items() if not passed]

    def to_json(self) -> dict:
        return {k: {"pass": p, "detail": d} for k, (p, d) in self.items.items()}


def bound_check(x_inv: InvariantRecord, x_free: int, y_inv: InvariantRecord, y_free: int,
                result: InvariantRecord) -> BoundReport:
    mx, my, mf = x_inv.mult, y_inv.mult, result.mult
    rep = BoundReport()
    if x_free + y_free >= my:
        ok = mf == mx
        rep.items["multiplicity"] = (ok, f"r_x+r_y={x_free + y_free} >= m_y={my}: need m_f={mf} == m_x={mx}")
    else:
        cap = mx + my - x_free - y_free
        rep.items["multiplicity"] = (mf <= cap, f"need m_f={mf} <= {cap}")
    low = x_inv.mu + y_inv.mu + 1
    rep.items["le-ramanujam"] = (result.mu >= low, f"mu_f={result.mu} >= {low}")
    low = x_inv.mu + y_inv.mu + (mx + my - mf) - 1
    rep.items["kappa"] = (result.mu >= low, f"mu_f={result.mu} >= {low}")
    return rep


# --- results ----------------------------------------------------------------


@dataclass
class CollisionResult:
    result_diagram: NewtonDiagram
    result_names: tuple[TypeName, ...]
    invariants: InvariantRecord
    rule_id: str
    primitive_claimed: bool
    x_type: TypeName | None = None
    y_type: TypeName | None = None
    data: CollisionData = field(default_factory=CollisionData)
    # formula name -> (tabulated value, value recomputed from the diagram)
    formula_checks: dict[str, tuple[int, int]] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)
    bounds: BoundReport | None = None

    @property
    def mismatches(self) -> dict[str, tuple[int, int]]:
        return {k: v for k, v in self.formula_checks.items() if v[0] != v[1]}

    def to_json(self) -> dict:
        out = {
            "diagram": self.result_diagram.to_json(),
            "names": [str(n) for n in self.result_names],
            "invariants": self.invariants.to_json(),
            "rule_id": self.rule_id,
            "primitive": self.primitive_claimed,
        }
        if self.x_type is not None:
            out["x"] = str(self.x_type)
        if self.y_type is not None:
            out["y"] = str(self.y_type)
        out["data"] = self.data.to_json()
        if self.formula_checks:
            out["formula_checks"] = {k: {"table": a, "diagram": b}
                                     for k, (a, b) in self.formula_checks.items()}
        if self.flags:
            out["flags"] = list(self.flags)
        if self.bounds is not None:
            out["bounds"] = self.bounds.to_json()
        return out


# --- rule table ---------------------------------------------------------------

Params = dict[str, int]


@dataclass(frozen=True)
class Rule:
    rule_id: str
    family: str
    guard: Callable[[Params, CollisionData], bool]
    # either binomial factors x^a + y^b, or explicit monomials summed
    factors: Callable[[Params], Sequence[tuple[int, int]]] | None = None
    monomials: Callable[[Params], Sequence[tuple[int, int]]] | None = None
    mu: Callable[[Params], int] | None = None
    delta: Callable[[Params], Fraction] | None = None
    kappa: Callable[[Params], int] | None = None
    primitive: bool = True

    def diagram(self, k: Params) -> NewtonDiagram:
        if self.factors is not None:
            facs = list(self.factors(k))
            if any(a < 0 or b < 0 for a, b in facs):
                raise UnsupportedCaseError(f"rule {self.rule_id} has a negative exponent at {k}")
            f = Polynomial.constant(1)
            for a, b in facs:
                f = f * (Polynomial.monomial(a, 0) + Polynomial.monomial(0, b))
            return poly_diagram(f)
        return diagram_of(self.monomials(k))


def _h(n) -> Fraction:
    return Fraction(n, 2)


RULES: tuple[Rule, ...] = (
    Rule("omp-omp", "omp-omp",
         guard=lambda k, d: 1 <= k["q"] <= k["p"],
         factors=lambda k: [(k["p"] - k["q"], k["p"] - k["q"]), (k["q"] + 1, 2 * k["q"] + 2)],
         mu=lambda k: k["p"] ** 2 + k["q"] ** 2 + k["q"],
         delta=lambda k: _h(k["p"] * (k["p"] + 1) + k["q"] * (k["q"] + 1)),
         kappa=lambda k: k["p"] ** 2 + k["p"] + k["q"] ** 2 + k["q"]),
    # S_x = x^p + y^(p+1)
    Rule("cusp-omp/l=lx/p>=q+2", "cusp-omp",
         guard=lambda k, d: d.l_eq_lx and k["p"] >= k["q"] + 2,
         factors=lambda k: [(k["p"] - 1 - k["q"], k["p"] - k["q"]), (k["q"] + 1, 2 * k["q"] + 2)],
         mu=lambda k: k["p"] ** 2 - k["p"] + (k["q"] + 1) ** 2,
         delta=lambda k: _h(k["p"] * (k["p"] - 1) + (k["q"] + 1) * (k["q"] + 2)),
         kappa=lambda k: k["p"] ** 2 + k["q"] * (k["q"] + 2)),
    Rule("cusp-omp/l=lx/p=q+1", "cusp-omp",
         guard=lambda k, d: d.l_eq_lx and k["p"] == k["q"] + 1,
         factors=lambda k: [(k["p"], 2 * k["p"] + 1)],
         mu=lambda k: 2 * k["p"] * (k["p"] - 1),
         delta=lambda k: Fraction(k["p"] * (k["p"] - 1)),
         kappa=lambda k: 2 * k["p"] ** 2 - k["p"] - 1),
    Rule("cusp-omp/l!=lx", "cusp-omp",
         guard=lambda k, d: not d.l_eq_lx and 1 <= k["q"] <= k["p"] - 1,
         factors=lambda k: [(k["p"] - k["q"], k["p"] - k["q"]), (k["q"] + 1, 2 * k["q"] + 1)],
         mu=lambda k: k["p"] ** 2 + k["q"] ** 2,
         delta=lambda k: _h(k["p"] * (k["p"] + 1) + k["q"] * (k["q"] - 1)),
         kappa=lambda k: k["p"] ** 2 + k["q"] ** 2 + k["q"]),
    # S_x = x^(p+1) + y^(p+2); the tabulated values are those of the first variant at p+1
    Rule("cusp2-omp/l!=lx", "cusp2-omp",
         guard=lambda k, d: not d.l_eq_lx and 1 <= k["q"] <= k["p"],
         monomials=lambda k: [(k["p"] + 2, 0), (k["q"] + 1, k["p"] + 1 - k["q"]),
                              (0, k["p"] + k["q"] + 2)],
         mu=lambda k: (k["p"] + 1) ** 2 + k["q"] ** 2,
         delta=lambda k: _h((k["p"] + 1) * (k["p"] + 2) + k["q"] * (k["q"] - 1)),
         kappa=lambda k: (k["p"] + 1) ** 2 + k["q"] ** 2 + k["q"]),
    Rule("cusp2-omp/l=lx", "cusp2-omp",
         guard=lambda k, d: d.l_eq_lx and 1 <= k["q"] <= k["p"],
         monomials=lambda k: [(k["p"] + 1, 0), (k["q"] + 1, k["p"] + 1 - k["q"]),
                              (0, k["p"] + k["q"] + 3)],
         mu=lambda k: (k["p"] * (k["p"] + 1) + (k["q"] + 1) ** 2 if k["p"] >= k["q"] + 1
                       else 2 * (k["p"] + 1) * k["p"]),
         delta=lambda k: (_h(k["p"] * (k["p"] + 1) + (k["q"] + 1) * (k["q"] + 2))
                          if k["p"] >= k["q"] + 1 else Fraction((k["p"] + 1) * k["p"])),
         kappa=lambda k: ((k["p"] + 1) ** 2 + k["q"] * (k["q"] + 2) if k["p"] >= k["q"] + 1
                          else 2 * (k["p"] + 1) ** 2 - k["p"] - 2)),
    # S_x = r free lines through a cusp x^p + y^(p+1)
    Rule("cuspfree-omp/l=lx/p>=q+2", "cuspfree-omp",
         guard=lambda k, d: d.l_eq_lx and k["p"] >= k["q"] + 2,
         factors=lambda k: [(k["r"], k["r"]), (k["p"] - k["q"] - 1, k["p"] - k["q"]),
                            (k["q"] + 1, 2 * k["q"] + 2)],
         mu=lambda k: (k["p"] + k["r"] - 1) ** 2 + k["p"] - 1 + (k["q"] + 1) ** 2,
         delta=lambda k: _h((k["p"] + k["r"]) * (k["p"] + k["r"] - 1) + (k["q"] + 1) * (k["q"] + 2)),
         kappa=lambda k: (k["p"] + k["r"]) * (k["p"] + k["r"] - 1) + k["p"] - 1 + (k["q"] + 1) ** 2),
    Rule("cuspfree-omp/l=lx/p<=q+1", "cuspfree-omp",
         guard=lambda k, d: d.l_eq_lx and k["p"] <= k["q"] + 1,
         factors=lambda k: [(k["r"] + k["p"] - k["q"] - 1,) * 2,
                            (k["q"] + 1 - k["p"], 2 * (k["q"] + 1 - k["p"])),
                            (k["p"], 2 * k["p"] + 1)],
         mu=lambda k: (k["p"] + k["r"] - 1) ** 2 + k["p"] - 1 + k["q"] ** 2 + k["q"],
         delta=lambda k: _h((k["p"] + k["r"]) * (k["p"] + k["r"] - 1) + k["q"] * (k["q"] + 1)),
         kappa=lambda k: (k["p"] + k["r"]) * (k["p"] + k["r"] - 1) + k["p"] - 1 + k["q"] * (k["q"] + 1)),
    Rule("cuspfree-omp/l!=lx/q>=r", "cuspfree-omp",
         guard=lambda k, d: not d.l_eq_lx and k["q"] >= k["r"],
         factors=lambda k: [(k["p"] + k["r"] - k["q"],) * 2,
                            (k["q"] - k["r"] + 1, 2 * k["q"] - 2 * k["r"] + 1),
                            (k["r"], 2 * k["r"])],
         mu=lambda k: (k["p"] + k["r"]) ** 2 + k["q"] ** 2 - k["r"],
         delta=lambda k: _h((k["p"] + k["r"]) * (k["p"] + k["r"] + 1) + k["q"] * (k["q"] - 1)),
         kappa=lambda k: (k["p"] + k["r"]) ** 2 + k["p"] + k["q"] ** 2),
    Rule("cuspfree-omp/l!=lx/q<r", "cuspfree-omp",
         guard=lambda k, d: not d.l_eq_lx and k["q"] < k["r"],
         factors=lambda k: [(k["r"] - k["q"] - 1,) * 2, (k["p"], k["p"] + 1),
                            (k["q"] + 1, 2 * (k["q"] + 1))],
         mu=lambda k: (k["p"] + k["r"]) ** 2 - k["p"] + k["q"] * (k["q"] + 1),
         delta=lambda k: _h((k["p"] + k["r"]) * (k["p"] + k["r"] - 1) + k["q"] * (k["q"] + 1)
                            + 2 * k["r"]),
         kappa=lambda k: (k["p"] + k["r"]) ** 2 + k["r"] + k["q"] * (k["q"] + 1)),
)


def _select(family: str, params: Params, data: CollisionData) -> Rule:
    hits = [r for r in RULES if r.family == family and r.guard(params, data)]
    if not hits:
        near = [r.rule_id for r in RULES if r.family == family]
        raise UnsupportedCaseError(
            f"no {family} rule covers {params} with {data}; supported cases: {', '.join(near)}"
        )
    return hits[0]


def _finish(rule: Rule, params: Params, data: CollisionData,
            x: TypeName, y: TypeName) -> CollisionResult:
    d = rule.diagram(params)
    inv = invariant_record(d)
    checks = {}
    if rule.mu is not None:
        checks["mu"] = (rule.mu(params), inv.mu)
    if rule.delta is not None:
        tab = rule.delta(params)
        checks["delta"] = (int(tab) if tab.denominator == 1 else float(tab), inv.delta)
    if rule.kappa is not None:
        checks["kappa"] = (rule.kappa(params), inv.kappa)
    res = CollisionResult(d, tuple(recognize(d)), inv, rule.rule_id, rule.primitive,
                          x, y, data, checks)
    for key, (tab, got) in res.mismatches.items():
        res.flags.append(f"formula mismatch: tabulated {key}={tab}, diagram gives {got}")
    res.bounds = bounds_for(res)
    return res


def input_record(name: TypeName) -> InvariantRecord:
    return invariant_record(normal_form(name).diagram.convenient_form())


def bounds_for(res: CollisionResult) -> BoundReport | None:
    if res.x_type is None or res.y_type is None:
        return None
    return bound_check(input_record(res.x_type), free_branches(res.x_type),
                       input_record(res.y_type), free_branches(res.y_type), res.invariants)


def collide_omp_omp(p: int, q: int) -> CollisionResult:
    if q > p:
        raise OrderConventionError(
            f"mult(S_x)={p + 1} must be >= mult(S_y)={q + 1}; swap the inputs"
        )
    if q < 1:
        raise PreconditionError("q must be at least 1")
    params = {"p": p, "q": q}
    res = _finish(_select("omp-omp", params, CollisionData()), params, CollisionData(),
                  TypeName("OMP", (p + 1,)), TypeName("OMP", (q + 1,)))
    if (p, q) == (3, 2):
        listed = TypeName("Z", (13,))
        if listed not in res.result_names:
            res.flags.append(
                f"paper-suspect: X9+D4 is listed as Z13 (mu 13) but the rule diagram "
                f"{res.result_diagram} has mu {res.invariants.mu}"
            )
    return res


SQH_VARIANTS = ("x^p+y^(p+1)", "x^(p+1)+y^(p+2)")


def collide_sqh_omp(variant: str | int, p: int, q: int, data: CollisionData) -> CollisionResult:
    if variant in (0, 1, SQH_VARIANTS[0]):
        family, x = "cusp-omp", TypeName("SQH", (p, p + 1))
    elif variant in (2, SQH_VARIANTS[1]):
        family, x = "cusp2-omp", TypeName("SQH", (p + 1, p + 2))
    else:
        raise UnsupportedCaseError(f"unknown variant {variant!r}; use one of {SQH_VARIANTS}")
    if q < 1:
        raise PreconditionError("q must be at least 1")
    if q + 1 > x.indices[0]:
        raise OrderConventionError(
            f"mult(S_y)={q + 1} exceeds mult(S_x)={x.indices[0]}; the inputs are ordered by multiplicity"
        )
    params = {"p": p, "q": q}
    return _finish(_select(family, params, data), params, data, x, TypeName("OMP", (q + 1,)))


def collide_cuspfree_omp(p: int, r: int, q: int, data: CollisionData) -> CollisionResult:
    if q < 1 or q > p + r:
        raise UnsupportedCaseError(f"need 1 <= q <= p + r, got p={p}, r={r}, q={q}")
    params = {"p": p, "r": r, "q": q}
    return _finish(_select("cuspfree-omp", params, data), params, data,
                   TypeName("CUSPFREE", (p, r)), TypeName("OMP", (q + 1,)))


# --- ADE arrows ---------------------------------------------------------------


@dataclass(frozen=True)
class Arrow:
    pattern: str
    source: tuple[TypeName, TypeName]
    target: TypeName
    generic: bool
    note: str = ""


def _t(s: str, *ix: int) -> TypeName | None:
    try:
        return TypeName(s, ix)
    except Exception:
        return None


def _ade_arrows(x: TypeName, y: TypeName) -> list[Arrow]:
    """Every tabulated arrow whose source is the unordered pair {x, y}."""
    out: list[Arrow] = []

    def add(pattern, target, generic=True, note=""):
        if target is None:
            return
        if target.series == "E" and not 6 <= target.indices[0] <= 8:
            return
        if any(a.target == target for a in out):
            return
        out.append(Arrow(pattern, (x, y), target, generic, note))

    for a, b in ((x, y), (y, x)):
        sa, sb = a.series, b.series
        ka, kb = a.indices[0], b.indices[0]
        if sa == "A" and sb == "A":
            k, l = ka, kb
            if (k, l) == (3, 2):
                add("A3+A2", _t("A", 6))
                add("A3+A2", _t("D", 6))
                add("A3+A2", _t("E", 7), generic=False)
            if (k, l) == (4, 2):
                add("A4+A2", _t("A", 7))
                add("A4+A2", _t("E", 7))
                add("A4+A2", _t("D", 8), generic=False)
            add("Ak+Al", _t("A", k + l + 1))
            add("Ak+Al", _t("D", k + l + 2))
            if l == 3:
                add("Ak+A3", _t("A", k + 4))
                add("Ak+A3", _t("D", k + 4))
                add("Ak+A3", _t("E", k + 4))
            if l == 1:
                add("Ak+A1", _t("A", k + 2))
                add("Ak+A1", _t("E", k + 2))
        if sa == "D" and sb == "A":
            if ka == 5:
                add("D5+Ak", _t("D", 5 + kb + 1))
                add("D5+Ak", _t("E", 5 + kb + 1))
            add("Dk+Al", _t("D", ka + kb + 1))
        if sa == "E" and sb == "A" and (ka, kb) == (6, 1):
            add("E6+A1", _t("E", 8))
        if sa == "D" and sb == "D" and ka == 4:
            if kb == 4:
                add("D4+D4", _t("J", 2, 0))
            if kb == 5:
                add("D4+D5", _t("X", 1, 2), note="mu=11")
                add("D4+D5", _t("J", 2, 1), note="mu=11")
            if kb == 6:
                add("D4+D6", _t("X", 1, 2), note="mu=11")
                add("D4+D6", _t("J", 2, 2), note="mu=12")
    return out


# wavy arrows between results: degenerations, not collisions
ADE_DEGENERATIONS = (
    ("A_{k+l+1}", "D_{k+l+2}"),
    ("A6", "E7"), ("D6", "E7"),
    ("A7", "D8"), ("E7", "D8"),
)


def collide_ade(x: TypeName | str, y: TypeName | str) -> list[CollisionResult]:
    x = parse_type_name(x) if isinstance(x, str) else x
    y = parse_type_name(y) if isinstance(y, str) else y
    for n in (x, y):
        if n.series not in ("A", "D", "E"):
            raise NotTabulatedError(f"{n} is not an ADE type")
    arrows = _ade_arrows(x, y)
    if not arrows:
        raise NotTabulatedError(f"no tabulated collision for {x} + {y}")
    results = []
    for arr in arrows:
        d = normal_form(arr.target).diagram.convenient_form()
        res = CollisionResult(d, tuple(recognize(d)), invariant_record(d),
                              f"ade:{arr.pattern}", arr.generic, x, y)
        if not arr.generic:
            res.flags.append("non-generic (wavy) arrow")
        if arr.note:
            res.flags.append(arr.note)
        res.bounds = bounds_for(res)
        results.append(res)
    return results


# --- composition --------------------------------------------------------------


def _minkowski(d1: NewtonDiagram, d2: NewtonDiagram) -> NewtonDiagram:
    return diagram_of((a1 + a2, b1 + b2) for a1, b1 in d1.vertices for a2, b2 in d2.vertices)


def _cone(f: Polynomial) -> Polynomial:
    m = f.min_degree()
    return Polynomial({k: c for k, c in f.terms.items() if sum(k) == m})


def branchwise_collide(line_slopes: Sequence, inner: CollisionResult,
                       x_inner: TypeName | None = None) -> CollisionResult:
    """Add smooth branches y = c*x, transverse to everything in inner, to a collision result.

    The extra lines join the inner germ's Newton polygon by Minkowski sum.
    The composite is primitive only when inner is and inner keeps the
    multiplicity of its own S_x.
    """
    slopes = [Fraction(c) for c in line_slopes]
    if len(set(slopes)) != len(slopes):
        raise PreconditionError("the free part has a repeated tangent")
    if not slopes:
        raise PreconditionError("the free part is empty")
    d = inner.result_diagram.convenient_form()
    # a representative with axis-adapted tangents; generic coefficients on the vertices
    rep = Polynomial({(a, b, 0): i + 2 for i, (a, b) in enumerate(d.vertices)})
    cone = _cone(rep)
    for c in slopes:
        if c == 0 or cone.evaluate((1, c)) == 0:
            raise PreconditionError(f"line y = {c}*x is tangent to the inner result")
    lines = diagram_of([(0, len(slopes)), (len(slopes), 0)])
    joined = _minkowski(d, lines)
    x_mult = (x_inner.indices[0] if x_inner is not None and x_inner.series == "OMP"
              else inner.x_type and input_record(inner.x_type).mult)
    y_mult = inner.y_type and input_record(inner.y_type).mult
    keeps = x_mult is not None and inner.invariants.mult == x_mult and (y_mult or 0) <= x_mult
    return CollisionResult(joined, tuple(recognize(joined)), invariant_record(joined),
                           f"branchwise({inner.rule_id})", inner.primitive_claimed and keeps,
                           None, inner.y_type, inner.data,
                           flags=[f"{len(slopes)} transverse lines joined to {inner.rule_id}"])
