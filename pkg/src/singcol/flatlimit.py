"""Flat limits of linear singularity conditions at a fixed and a moving point.

Jet coefficients c_{ab} of f = sum c_{ab} x^a y^b (a + b <= N) are the unknowns.
A linear type imposes "every coefficient strictly below its diagram vanishes"
in coordinates adapted to the point; re-centred at (eps, 0) those are linear
functionals with entries in Q[eps].  The limit eps -> 0 of the row space is
computed by repeatedly dividing eps-divisible combinations by eps.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .algebra import Polynomial, SparseEchelon
from .catalog import TypeName, normal_form, parse_type_name
from .collisions import CollisionData, CollisionResult
from .errors import (
    GenericityError,
    NonTerminationError,
    PreconditionError,
    StructuralBugError,
    UnsupportedCaseError,
)
from .invariants import milnor_local
from .newton import (
    NewtonDiagram,
    diagram_of,
    is_linear_type,
    newton_number,
    nnd_check,
    poly_diagram,
    same_diagram,
)

Monomial = tuple[int, int]
EpsPoly = dict[int, Fraction]  # power of eps -> coefficient
Vector = tuple  # two entries, each a number or an EpsPoly


# --- jet space ----------------------------------------------------------------


@dataclass(frozen=True)
class JetSpace:
    degree_bound: int
    basis: tuple[Monomial, ...] = field(init=False)
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.degree_bound < 1:
            raise PreconditionError("jet degree must be positive")
        n = self.degree_bound
        basis = tuple((d - b, b) for d in range(n + 1) for b in range(d + 1))
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "index", {m: i for i, m in enumerate(basis)})

    def __len__(self) -> int:
        return len(self.basis)

    def column_labels(self) -> list[str]:
        return [f"x^{a}*y^{b}" for a, b in self.basis]


# --- eps polynomials ---------------------------------------------------------------


def _eps(value) -> EpsPoly:
    if isinstance(value, Mapping):
        return {int(k): Fraction(v) for k, v in value.items() if v}
    value = Fraction(value)
    return {0: value} if value else {}


def _eps_poly(p: EpsPoly) -> Polynomial:
    out = Polynomial()
    for k, c in p.items():
        out = out + Polynomial.monomial(0, 0, k, c)
    return out


def _low(row: Mapping[int, EpsPoly]) -> int:
    return min(min(p) for p in row.values())


def _shift(row: Mapping[int, EpsPoly], k: int) -> dict[int, EpsPoly]:
    if k == 0:
        return {c: dict(p) for c, p in row.items()}
    return {c: {e - k: v for e, v in p.items()} for c, p in row.items()}


def _normalize(row: Mapping[int, EpsPoly]) -> dict[int, EpsPoly]:
    return _shift(row, _low(row)) if row else {}


def _eps_degree(row: Mapping[int, EpsPoly]) -> int:
    return max(max(p) for p in row.values()) if row else 0


def _evaluate_row(row: Mapping[int, EpsPoly], eps: Fraction) -> dict[int, Fraction]:
    out = {}
    for c, p in row.items():
        v = sum((coef * eps ** e for e, coef in p.items()), Fraction(0))
        if v:
            out[c] = v
    return out


# --- condition systems ---------------------------------------------------------


@dataclass(frozen=True)
class PointFrame:
    """Where a type sits and which axes its diagram is written in.

    e1, e2 are the directions of the local u and w axes; entries may be
    eps-polynomials so that a tangent can drift towards its limit.
    """

    diagram: NewtonDiagram
    position: tuple[EpsPoly, EpsPoly]
    e1: tuple[EpsPoly, EpsPoly]
    e2: tuple[EpsPoly, EpsPoly]
    label: str = ""

    def to_json(self) -> dict:
        def enc(v):
            return [{str(k): str(c) for k, c in sorted(p.items())} for p in v]
        return {"label": self.label, "diagram": self.diagram.to_json(),
                "position": enc(self.position), "e1": enc(self.e1), "e2": enc(self.e2)}


def make_frame(diagram: NewtonDiagram, position: Vector = (0, 0), e1: Vector = (1, 0),
               e2: Vector = (0, 1), label: str = "") -> PointFrame:
    return PointFrame(diagram, tuple(_eps(v) for v in position),
                      tuple(_eps(v) for v in e1), tuple(_eps(v) for v in e2), label)


def killed_monomials(d: NewtonDiagram) -> list[Monomial]:
    """Lattice points strictly below a convenient diagram."""
    if not d.is_convenient():
        raise PreconditionError(f"diagram {d} is not convenient")
    top = d.vertices[0][1]
    right = d.vertices[-1][0]
    return [(a, b) for a in range(right + 1) for b in range(top + 1)
            if not d.contains((a, b))]


@dataclass
class LinearConditionSystem:
    jet: JetSpace
    rows: list[dict[int, EpsPoly]]
    frames: tuple[PointFrame, ...] = ()

    def __add__(self, other: "LinearConditionSystem") -> "LinearConditionSystem":
        if other.jet != self.jet:
            raise PreconditionError("systems live on different jet spaces")
        return LinearConditionSystem(self.jet, self.rows + other.rows, self.frames + other.frames)

    def at(self, eps) -> list[dict[int, Fraction]]:
        eps = Fraction(eps)
        return [_evaluate_row(r, eps) for r in self.rows]

    def rank_at(self, eps) -> int:
        ech = SparseEchelon()
        for r in self.at(eps):
            ech.add(r)
        return ech.rank

    def generic_rank(self) -> int:
        """Rank over Q(eps), read off at a few unrelated nonzero values."""
        return max(self.rank_at(e) for e in (Fraction(1, 7), Fraction(13, 3), Fraction(-5, 11)))

    def permuted(self, order: Sequence[int]) -> "LinearConditionSystem":
        return LinearConditionSystem(self.jet, [self.rows[i] for i in order], self.frames)


def conditions_at_point(frame: PointFrame, jet: JetSpace) -> LinearConditionSystem:
    """Rows "coefficient of u^a w^b in f(P + u e1 + w e2) is zero" below the diagram."""
    d = frame.diagram
    if not is_linear_type(d):
        raise UnsupportedCaseError(
            f"diagram {d} has a face of slope outside [1/2, 2]; only linear types are encoded"
        )
    killed = killed_monomials(d)
    top = max(a + b for a, b in killed) if killed else 0
    row_of = {m: i for i, m in enumerate(killed)}
    rows: list[dict[int, EpsPoly]] = [{} for _ in killed]

    u, w = Polynomial.var("x"), Polynomial.var("y")
    xs = _eps_poly(frame.position[0]) + u * _eps_poly(frame.e1[0]) + w * _eps_poly(frame.e2[0])
    ys = _eps_poly(frame.position[1]) + u * _eps_poly(frame.e1[1]) + w * _eps_poly(frame.e2[1])

    def powers(p: Polynomial) -> list[Polynomial]:
        out = [Polynomial.constant(1)]
        for _ in range(jet.degree_bound):
            out.append((out[-1] * p).truncate(top))
        return out

    xp, yp = powers(xs), powers(ys)
    for col, (a, b) in enumerate(jet.basis):
        if xp[a].is_zero() or yp[b].is_zero():
            continue
        prod = (xp[a] * yp[b]).truncate(top)
        for (i, j, k), c in prod.terms.items():
            r = row_of.get((i, j))
            if r is None:
                continue
            entry = rows[r].setdefault(col, {})
            entry[k] = entry.get(k, 0) + c
    cleaned = []
    for r in rows:
        r = {c: {k: v for k, v in p.items() if v} for c, p in r.items()}
        r = {c: p for c, p in r.items() if p}
        if r:
            cleaned.append(r)
    return LinearConditionSystem(jet, cleaned, (frame,))


conditions_at_moving_point = conditions_at_point


def omp_conditions(m: int, position: Vector, jet: JetSpace) -> LinearConditionSystem:
    """All partial derivatives of order < m vanish at the position."""
    d = NewtonDiagram(((0, m), (m, 0)))
    return conditions_at_point(make_frame(d, position, label=f"omp({m})"), jet)


# --- flat limit ------------------------------------------------------------------


@dataclass
class LimitSystem:
    """A row space over Q kept in reduced row echelon form (pivot column -> row)."""

    jet: JetSpace
    echelon: SparseEchelon

    @classmethod
    def from_rows(cls, jet: JetSpace, rows: Iterable[Mapping[int, Fraction]]) -> "LimitSystem":
        ech = SparseEchelon()
        for r in rows:
            ech.add(r)
        return cls(jet, ech)

    @classmethod
    def killing(cls, jet: JetSpace, monomials: Iterable[Monomial]) -> "LimitSystem":
        return cls.from_rows(jet, ({jet.index[m]: Fraction(1)} for m in monomials
                                   if m in jet.index))

    @property
    def rank(self) -> int:
        return self.echelon.rank

    @property
    def rows(self) -> list[dict[int, Fraction]]:
        return [self.echelon.rows[c] for c in sorted(self.echelon.rows)]

    def forced(self) -> set[Monomial]:
        """Monomials whose coefficient functional lies in the row space."""
        return {self.jet.basis[c] for c, row in self.echelon.rows.items() if len(row) == 1}

    vanishing_monomials = forced

    def is_monomial(self) -> bool:
        """True when the row space is spanned by coordinate functionals."""
        return all(len(row) == 1 for row in self.echelon.rows.values())

    def survivors(self) -> list[Monomial]:
        f = self.forced()
        return [m for m in self.jet.basis if m not in f]

    def staircase(self) -> NewtonDiagram:
        return diagram_of(self.survivors())

    def same_row_space(self, other: "LimitSystem") -> bool:
        return (self.rank == other.rank
                and all(other.echelon.contains(r) for r in self.rows))

    def to_json(self) -> dict:
        n = len(self.jet)
        dense = []
        for r in self.rows:
            line = ["0"] * n
            for c, v in r.items():
                line[c] = str(v)
            dense.append(line)
        return {"columns": self.jet.column_labels(), "rows": dense}


def flat_limit(system: LinearConditionSystem) -> LimitSystem:
    rows = [_normalize(r) for r in system.rows if r]
    guard = sum(_eps_degree(r) for r in rows) + len(rows)
    for _ in range(guard + 1):
        # eliminate the eps = 0 parts, remembering which rows were combined
        pivots: dict[int, tuple[dict[int, Fraction], dict[int, Fraction]]] = {}
        dependent: list[dict[int, Fraction]] = []
        for i, row in enumerate(rows):
            vec = {c: p[0] for c, p in row.items() if p.get(0)}
            combo = {i: Fraction(1)}
            while True:
                hits = [c for c in vec if c in pivots]
                if not hits:
                    break
                c = min(hits)
                lam = vec[c]
                pvec, pcombo = pivots[c]
                for k, v in pvec.items():
                    nv = vec.get(k, 0) - lam * v
                    if nv:
                        vec[k] = nv
                    else:
                        vec.pop(k, None)
                for k, v in pcombo.items():
                    nv = combo.get(k, 0) - lam * v
                    if nv:
                        combo[k] = nv
                    else:
                        combo.pop(k, None)
            if vec:
                c = min(vec)
                inv = 1 / vec[c]
                pivots[c] = ({k: v * inv for k, v in vec.items()},
                             {k: v * inv for k, v in combo.items()})
            else:
                dependent.append(combo)
        if not dependent:
            return LimitSystem.from_rows(system.jet, (v for v, _ in pivots.values()))
        replaced: dict[int, dict[int, EpsPoly]] = {}
        for combo in dependent:
            target = max(combo)  # the dependent row itself enters with coefficient 1
            acc: dict[int, EpsPoly] = {}
            for j, lam in combo.items():
                for c, p in rows[j].items():
                    entry = acc.setdefault(c, {})
                    for e, v in p.items():
                        entry[e] = entry.get(e, 0) + lam * v
            acc = {c: {e: v for e, v in p.items() if v} for c, p in acc.items()}
            acc = {c: p for c, p in acc.items() if p}
            if acc and _low(acc) < 1:
                raise StructuralBugError("combination of dependent rows is not divisible by eps")
            replaced[target] = _normalize(acc)
        rows = [replaced.get(i, r) for i, r in enumerate(rows)]
        rows = [r for r in rows if r]
    raise NonTerminationError(
        f"flat limit did not stabilise within {guard} passes; the system drops rank at generic eps"
    )


# --- the triangular system for OMP + OMP ------------------------------------------------


def triangular_kills(p: int, q: int) -> list[Monomial]:
    """Monomials killed by the limit of OMP(p+1) at 0 and OMP(q+1) moving along the x-axis."""
    out = [(d - b, b) for d in range(p + 1) for b in range(d + 1)]
    for k in range(1, q + 2):
        lo = p + 2 * k - 1 - q
        out += [(a, p + k - a) for a in range(max(lo, 0), p + k + 1)]
    return out


def triangular_system(p: int, q: int, N: int | None = None, check: bool = True) -> LimitSystem:
    """Limit rows written down directly; checked against the flat limit unless check=False."""
    if not (p >= q >= 1):
        raise PreconditionError(f"need p >= q >= 1, got p={p}, q={q}")
    jet = JetSpace(N or 2 * (p + q + 3))
    direct = LimitSystem.killing(jet, triangular_kills(p, q))
    if check:
        system = omp_conditions(p + 1, (0, 0), jet) + omp_conditions(q + 1, ({1: 1}, 0), jet)
        computed = flat_limit(system)
        if not direct.same_row_space(computed):
            raise StructuralBugError(
                f"triangular rows for (p,q)=({p},{q}) differ from the computed flat limit: "
                f"forced {sorted(direct.forced())} vs {sorted(computed.forced())}"
            )
    return direct


# --- generic members --------------------------------------------------------------------


def generic_member(limit: LimitSystem, seed: int = 0, R: int = 9, retries: int = 8,
                   require_nnd: bool = True) -> Polynomial:
    """Random solution of the limit system with nonzero free coefficients, NND on its diagram."""
    if (0, 0) not in limit.forced():
        raise PreconditionError("the system must contain the row f(0) = 0")
    if R < 1:
        raise PreconditionError("coefficient range must be at least 1")
    pivots = limit.echelon.rows
    free = [c for c in range(len(limit.jet)) if c not in pivots]
    rng = random.Random(seed)
    for _ in range(retries):
        values = {c: Fraction(rng.choice([k for k in range(-R, R + 1) if k])) for c in free}
        for c, row in pivots.items():
            values[c] = -sum((v * values[k] for k, v in row.items() if k != c), Fraction(0))
        terms = {limit.jet.basis[c] + (0,): v for c, v in values.items() if v}
        f = Polynomial(terms)
        if not require_nnd or nnd_check(f, poly_diagram(f)):
            return f
    raise GenericityError(f"no NND member after {retries} draws with R={R}; widen the range")


def sample_on_diagram(d: NewtonDiagram, seed: int = 0, R: int = 9, N: int | None = None) -> Polynomial:
    """Generic polynomial supported on and above a convenient diagram."""
    top = max(d.vertices[0][1], d.vertices[-1][0])
    jet = JetSpace(N or top)
    return generic_member(LimitSystem.killing(jet, killed_monomials(d)), seed, R)


# --- adapted frames for a collision ---------------------------------------------------------


def _type_diagram(name: TypeName) -> NewtonDiagram:
    return normal_form(name).diagram.convenient_form()


def special_axis(d: NewtonDiagram) -> str | None:
    """Which local axis carries the repeated tangent line, if any: "e1", "e2" or None."""
    m = d.multiplicity()
    on_cone = [a for a, b in d.vertices if a + b == m]
    along_e1 = m - max(on_cone) >= 2  # w^2 divides the tangent cone
    along_e2 = min(on_cone) >= 2
    if along_e1 and along_e2:
        raise UnsupportedCaseError(f"diagram {d} has two repeated tangent lines")
    return "e1" if along_e1 else "e2" if along_e2 else None


def _axes(d: NewtonDiagram, tangent: tuple) -> tuple[tuple, tuple]:
    other = (0, 1) if tangent == (1, 0) else (1, 0)
    if special_axis(d) == "e1":
        return tangent, other
    return other, tangent


def _drifted(v: tuple, drift: Sequence[Vector]) -> tuple[EpsPoly, EpsPoly]:
    out = [_eps(v[0]), _eps(v[1])]
    for i, w in enumerate(drift, start=1):
        for j in (0, 1):
            c = Fraction(w[j])
            if c:
                out[j][i] = out[j].get(i, 0) + c
    return tuple(out)


def collision_frames(x_type: TypeName, y_type: TypeName, data: CollisionData,
                     trajectory: Sequence[Vector] = (),
                     drift: Sequence[Vector] = ()) -> tuple[PointFrame, PointFrame]:
    """S_x at the origin, S_y at (eps, 0) plus optional higher trajectory terms.

    trajectory[i] is the coefficient vector of eps^(i+2); drift[i] is added to
    the tangent direction of S_y at order eps^(i+1).
    """
    dx, dy = _type_diagram(x_type), _type_diagram(y_type)
    tx = (1, 0) if data.l_eq_lx else (0, 1)
    if special_axis(dx) is None:
        tx_dir = None
        e1x, e2x = (1, 0), (0, 1)
    else:
        tx_dir = tx
        e1x, e2x = _axes(dx, tx)
    fx = make_frame(dx, (0, 0), e1x, e2x, label=str(x_type))

    if data.l_eq_ly:
        ty = (1, 0)
    elif data.lx_eq_ly:
        if tx_dir is None:
            raise PreconditionError(f"{x_type} has no distinguished tangent to share")
        ty = tx_dir
    else:
        ty = (1, 1) if tx_dir == (0, 1) else (0, 1)
    position = [{1: Fraction(1)}, {}]
    for i, t in enumerate(trajectory, start=2):
        for j in (0, 1):
            c = Fraction(t[j])
            if c:
                position[j][i] = position[j].get(i, 0) + c
    if special_axis(dy) is None:
        e1y, e2y = _drifted((1, 0), ()), _drifted((0, 1), ())
    else:
        a1, a2 = _axes(dy, ty)
        if special_axis(dy) == "e1":
            e1y, e2y = _drifted(a1, drift), _drifted(a2, ())
        else:
            e1y, e2y = _drifted(a1, ()), _drifted(a2, drift)
    fy = PointFrame(dy, tuple(position), e1y, e2y, label=str(y_type))
    return fx, fy


def collision_system(x_type: TypeName | str, y_type: TypeName | str, data: CollisionData,
                     N: int, trajectory: Sequence[Vector] = (),
                     drift: Sequence[Vector] = ()) -> LinearConditionSystem:
    x_type = parse_type_name(x_type) if isinstance(x_type, str) else x_type
    y_type = parse_type_name(y_type) if isinstance(y_type, str) else y_type
    jet = JetSpace(N)
    fx, fy = collision_frames(x_type, y_type, data, trajectory, drift)
    return conditions_at_point(fx, jet) + conditions_at_point(fy, jet)


# --- verification ------------------------------------------------------------------------


@dataclass
class VerificationReport:
    x_type: TypeName
    y_type: TypeName
    data: CollisionData
    jet_degree: int
    seed: int
    staircase: NewtonDiagram
    member: Polynomial
    member_mu: int
    expected_diagram: NewtonDiagram
    expected_mu: int
    checks: dict[str, tuple[bool, str]]
    limit: LimitSystem
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(ok for ok, _ in self.checks.values())

    def to_json(self, with_limit: bool = False) -> dict:
        out = {
            "x": str(self.x_type), "y": str(self.y_type), "data": self.data.to_json(),
            "jet_degree": self.jet_degree, "seed": self.seed,
            "staircase": self.staircase.to_json(),
            "expected_diagram": self.expected_diagram.to_json(),
            "expected_mu": self.expected_mu, "member_mu": self.member_mu,
            "checks": {k: {"ok": ok, "detail": s} for k, (ok, s) in self.checks.items()},
            "ok": self.ok,
        }
        if self.notes:
            out["notes"] = list(self.notes)
        if with_limit or not self.ok:
            out["limit_system"] = self.limit.to_json()
        return out


def default_jet_degree(x_type: TypeName, y_type: TypeName) -> int:
    mx = _type_diagram(x_type).multiplicity()
    my = _type_diagram(y_type).multiplicity()
    return 2 * (mx + my + 1)


def verify_collision(prediction: CollisionResult, x_type: TypeName | str | None = None,
                     y_type: TypeName | str | None = None, data: CollisionData | None = None,
                     N: int | None = None, seed: int = 0, R: int = 9,
                     trajectory: Sequence[Vector] = (),
                     drift: Sequence[Vector] = ()) -> VerificationReport:
    x_type = x_type or prediction.x_type
    y_type = y_type or prediction.y_type
    if x_type is None or y_type is None:
        raise PreconditionError("the collision inputs are needed to set up the conditions")
    x_type = parse_type_name(x_type) if isinstance(x_type, str) else x_type
    y_type = parse_type_name(y_type) if isinstance(y_type, str) else y_type
    data = data if data is not None else prediction.data
    expected_mu = prediction.invariants.mu
    n = N or default_jet_degree(x_type, y_type)
    while True:
        limit = flat_limit(collision_system(x_type, y_type, data, n, trajectory, drift))
        stair = limit.staircase()
        needed = max(expected_mu, newton_number(stair)) + 2
        if n >= needed:
            break
        n *= 2
    notes = []
    if not limit.is_monomial():
        notes.append("limit rows are not all monomial in this frame; the staircase only "
                     "records the forced coefficients")
    try:
        member = generic_member(limit, seed, R)
    except GenericityError:
        member = generic_member(limit, seed, R, require_nnd=False)
        notes.append("no member is non-degenerate on its own diagram; mu taken from an ungated sample")
    member_mu = milnor_local(member, n_max=max(40, n))
    stair_mu = newton_number(stair)
    want = prediction.result_diagram
    checks = {
        "staircase": (same_diagram(stair, want), f"limit {stair}, predicted {want}"),
        "milnor": (member_mu == expected_mu, f"generic member mu {member_mu}, predicted {expected_mu}"),
        "newton": (stair_mu == expected_mu, f"staircase mu {stair_mu}, predicted {expected_mu}"),
    }
    return VerificationReport(x_type, y_type, data, n, seed, stair, member, member_mu,
                              want, expected_mu, checks, limit, notes)
