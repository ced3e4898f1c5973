"""Newton diagrams of plane curve germs.

A diagram is the lower-left boundary of conv(support + R_+^2), stored as its
vertex list ordered by increasing x exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .algebra import Polynomial
from .errors import NonIsolatedError, NonReducedError

Point = tuple[int, int]


def _cross(o: Point, a: Point, b: Point) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class Face:
    start: Point
    end: Point

    @property
    def lattice_length(self) -> int:
        return math.gcd(self.end[0] - self.start[0], self.start[1] - self.end[1])

    @property
    def slope(self) -> Fraction:
        return Fraction(self.start[1] - self.end[1], self.end[0] - self.start[0])

    def lattice_points(self) -> list[Point]:
        g = self.lattice_length
        da = (self.end[0] - self.start[0]) // g
        db = (self.start[1] - self.end[1]) // g
        return [(self.start[0] + k * da, self.start[1] - k * db) for k in range(g + 1)]


@dataclass(frozen=True)
class NewtonDiagram:
    vertices: tuple[Point, ...]

    def __post_init__(self):
        vs = tuple((int(a), int(b)) for a, b in self.vertices)
        if not vs:
            raise ValueError("a diagram needs at least one vertex")
        for (a1, b1), (a2, b2) in zip(vs, vs[1:]):
            if not (a2 > a1 and b2 < b1):
                raise ValueError(f"vertices must increase in a and decrease in b: {vs}")
        for o, a, b in zip(vs, vs[1:], vs[2:]):
            if _cross(o, a, b) <= 0:
                raise ValueError(f"vertex {a} is not a strict corner of {vs}")
        object.__setattr__(self, "vertices", vs)

    @classmethod
    def from_vertices(cls, points: Iterable[Sequence[int]]) -> "NewtonDiagram":
        """Build from a vertex list, silently dropping points that are not strict corners."""
        return diagram_of(points)

    @property
    def x_offset(self) -> int:
        return self.vertices[0][0]

    @property
    def y_offset(self) -> int:
        return self.vertices[-1][1]

    def is_convenient(self) -> bool:
        return self.x_offset == 0 and self.y_offset == 0

    def faces(self) -> list[Face]:
        return [Face(s, e) for s, e in zip(self.vertices, self.vertices[1:])]

    def swap(self) -> "NewtonDiagram":
        return NewtonDiagram(tuple((b, a) for a, b in reversed(self.vertices)))

    def multiplicity(self) -> int:
        return min(a + b for a, b in self.vertices)

    def contains(self, point: Sequence[int]) -> bool:
        """True when the point lies on or above the staircase."""
        a, b = point
        vs = self.vertices
        if a < vs[0][0] or b < vs[-1][1]:
            return False
        for s, e in zip(vs, vs[1:]):
            if s[0] <= a <= e[0]:
                return _cross(s, e, (a, b)) >= 0
        return True

    def convenient_form(self) -> "NewtonDiagram":
        """Replace a lone axis branch by a transverse line where that keeps the type.

        x * g with every face of g no steeper than 1 is the same topological
        type as the curve whose line branch is moved off the axis, which
        adds the vertex (0, b + 1).  The mirror rule applies to y * g.
        """
        vs = list(self.vertices)
        faces = self.faces()
        if vs[0][0] == 1 and (not faces or faces[0].slope <= 1):
            vs.insert(0, (0, vs[0][1] + 1))
        if vs[-1][1] == 1 and (not faces or faces[-1].slope >= 1):
            vs.append((vs[-1][0] + 1, 0))
        return diagram_of(vs)

    def to_json(self) -> dict:
        return {"vertices": [[a, b] for a, b in self.vertices]}

    @classmethod
    def from_json(cls, data) -> "NewtonDiagram":
        if isinstance(data, dict):
            data = data["vertices"]
        return diagram_of(tuple(v) for v in data)

    def __str__(self) -> str:
        return "[" + ", ".join(f"({a},{b})" for a, b in self.vertices) + "]"


def diagram_of(support: Iterable[Sequence[int]]) -> NewtonDiagram:
    """Staircase of conv(support + R_+^2)."""
    lowest: dict[int, int] = {}
    for a, b in support:
        if a < 0 or b < 0:
            raise ValueError(f"negative exponent in {(a, b)}")
        if a not in lowest or b < lowest[a]:
            lowest[a] = b
    if not lowest:
        raise ValueError("empty support")
    hull: list[Point] = []
    for a in sorted(lowest):
        p = (a, lowest[a])
        if hull and p[1] >= hull[-1][1]:
            continue
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return NewtonDiagram(tuple(hull))


def poly_diagram(f: Polynomial) -> NewtonDiagram:
    return diagram_of(f.support())


def same_diagram(d1: NewtonDiagram, d2: NewtonDiagram) -> bool:
    """Equal vertex lists up to exchanging the axes."""
    return d1.vertices == d2.vertices or d1.vertices == d2.swap().vertices


def same_type(d1: NewtonDiagram, d2: NewtonDiagram) -> bool:
    """Diagram equality up to swap, after moving lone axis branches off the axes."""
    return same_diagram(d1.convenient_form(), d2.convenient_form())


def is_linear_type(d: NewtonDiagram) -> bool:
    return all(Fraction(1, 2) <= f.slope <= 2 for f in d.faces())


def _check_offsets(d: NewtonDiagram) -> None:
    if d.x_offset >= 2 or d.y_offset >= 2:
        raise NonReducedError(
            f"diagram {d} has offset ({d.x_offset}, {d.y_offset}); the germ is not reduced"
        )


def _milnor_with_corners(d: NewtonDiagram, big: int) -> int:
    vs = list(d.vertices)
    if vs[0][0] > 0:
        vs.insert(0, (0, big))
    if vs[-1][1] > 0:
        vs.append((big, 0))
    twice_area = sum((b1 + b2) * (a2 - a1) for (a1, b1), (a2, b2) in zip(vs, vs[1:]))
    return twice_area - vs[-1][0] - vs[0][1] + 1


def newton_number(d: NewtonDiagram) -> int:
    """Kouchnirenko number 2V - a - b + 1 of the (extended) diagram."""
    _check_offsets(d)
    if d.is_convenient():
        return _milnor_with_corners(d, 0)
    # the virtual corner sits at height/width M; evaluate at three values of M
    # so that any leftover linear or quadratic dependence is caught
    base = max(max(v) for v in d.vertices) + 2
    values = {_milnor_with_corners(d, base + k) for k in range(3)}
    if len(values) != 1:
        raise NonIsolatedError(f"diagram {d}: the virtual corner does not cancel")
    mu = values.pop()
    if mu < 0:
        raise NonIsolatedError(f"diagram {d} gives negative Milnor number")
    return mu


def generic_branch_count(d: NewtonDiagram) -> int:
    _check_offsets(d)
    return sum(f.lattice_length for f in d.faces()) + d.x_offset + d.y_offset


# --- univariate helpers for the non-degeneracy test ------------------------


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_mod(a: list, b: list) -> list:
    a = list(a)
    lead = b[-1]
    while len(a) >= len(b):
        q = a[-1] / lead
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] -= q * c
        a.pop()
        _trim(a)
    return a


def _derivative(p: list) -> list:
    return _trim([p[i] * i for i in range(1, len(p))])


def univariate_gcd(p: Sequence, q: Sequence) -> list[Fraction]:
    """gcd of two coefficient lists (constant term first), up to a scalar."""
    a, b = _trim([Fraction(c) for c in p]), _trim([Fraction(c) for c in q])
    while b:
        a, b = b, _poly_mod(a, b)
    return a


def univariate_gcd_degree(p: Sequence[Fraction]) -> int:
    """Degree of gcd(p, p')."""
    a = _trim([Fraction(c) for c in p])
    if len(a) <= 1:
        return 0
    return len(univariate_gcd(a, _derivative(a))) - 1


def simple_root_count(p: Sequence[Fraction]) -> int:
    """Number of roots of multiplicity exactly one."""
    a = _trim([Fraction(c) for c in p])
    if len(a) <= 1:
        return 0
    g = univariate_gcd(a, _derivative(a))
    distinct = len(a) - len(g)
    repeated = len(g) - 1 - univariate_gcd_degree(g)
    return distinct - repeated


def face_polynomial(f: Polynomial, face: Face) -> list[Fraction]:
    """Coefficients of f along a face, as a polynomial in one variable."""
    return [f.coefficient((a, b, 0)) for a, b in face.lattice_points()]


def nnd_check(f: Polynomial, d: NewtonDiagram | None = None) -> bool:
    """Every compact face polynomial of f is square-free."""
    if d is None:
        d = poly_diagram(f)
    for face in d.faces():
        if univariate_gcd_degree(face_polynomial(f, face)) > 0:
            return False
    return True
