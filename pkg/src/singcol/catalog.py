"""Named singularity types, their normal forms and recognition from a diagram."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .algebra import Polynomial, X, Y
from .errors import DomainError, ParseError
from .invariants import InvariantRecord, invariant_record
from .newton import (
    NewtonDiagram,
    newton_number,
    poly_diagram,
    same_type,
    simple_root_count,
)

SERIES = ("A", "D", "E", "J", "Z", "X", "W", "OMP", "SQH", "CUSPFREE", "COMPOSITE")
_RECOGNITION_ORDER = SERIES[:-1]


class InvalidTypeError(DomainError):
    pass


@dataclass(frozen=True)
class TypeName:
    series: str
    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        _validate(self)

    @classmethod
    def parse(cls, text: str) -> "TypeName":
        return parse_type_name(text)

    def __str__(self) -> str:
        s, ix = self.series, self.indices
        if s in ("OMP", "SQH", "CUSPFREE"):
            return f"{s.lower()}({','.join(map(str, ix))})"
        if s in ("J", "X"):
            return f"{s}{ix[0]}_{ix[1]}"
        if s == "COMPOSITE":
            return "composite"
        return f"{s}{ix[0]}"

    def to_json(self) -> str:
        return str(self)


def _validate(n: TypeName) -> None:
    s, ix = n.series, n.indices
    arity = {"A": 1, "D": 1, "E": 1, "Z": 1, "W": 1, "OMP": 1,
             "J": 2, "X": 2, "SQH": 2, "CUSPFREE": 2, "COMPOSITE": 0}
    if s not in arity:
        raise InvalidTypeError(f"unknown series {s!r}")
    if len(ix) != arity[s]:
        raise InvalidTypeError(f"{s} takes {arity[s]} indices, got {list(ix)}")
    ok = {
        "A": lambda: ix[0] >= 1,
        "D": lambda: ix[0] >= 4,
        "E": lambda: ix[0] >= 6 and ix[0] % 6 in (0, 1, 2),
        "J": lambda: ix[0] >= 1 and ix[1] >= 0,
        "X": lambda: ix[0] >= 1 and ix[1] >= 0,
        "Z": lambda: ix[0] >= 11 and ix[0] % 6 in (5, 0, 1),
        "W": lambda: ix[0] >= 12 and ix[0] % 12 in (0, 1),
        "OMP": lambda: ix[0] >= 2,
        "SQH": lambda: 2 <= ix[0] <= ix[1],
        "CUSPFREE": lambda: ix[0] >= 2 and ix[1] >= 1,
        "COMPOSITE": lambda: True,
    }[s]()
    if not ok:
        raise InvalidTypeError(f"index out of range for {s}: {list(ix)}")


_ALIASES = {"J10": ("J", (2, 0)), "X9": ("X", (1, 0))}
_NAME_RE = re.compile(
    r"^\s*(?:(?P<fn>omp|sqh|cuspfree)\s*\(\s*(?P<args>[\d\s,]*)\)"
    r"|(?P<ser>[ADEJZXW])(?P<i>\d+)(?:_(?P<j>\d+))?)\s*$",
    re.IGNORECASE,
)


def parse_type_name(text: str) -> TypeName:
    key = text.strip().upper()
    if key in _ALIASES:
        return TypeName(*_ALIASES[key])
    m = _NAME_RE.match(text)
    if not m:
        raise ParseError(f"cannot parse type name {text!r}", 0)
    if m.group("fn"):
        args = [a for a in m.group("args").replace(" ", "").split(",") if a]
        return TypeName(m.group("fn").upper(), tuple(int(a) for a in args))
    ser, i, j = m.group("ser").upper(), int(m.group("i")), m.group("j")
    if j is not None:
        return TypeName(ser, (i, int(j)))
    return TypeName(ser, (i,))


# --- normal forms -----------------------------------------------------------


def _xy(a: int, b: int) -> Polynomial:
    return Polynomial.monomial(a, b)


@lru_cache(maxsize=None)
def normal_form_poly(name: TypeName) -> Polynomial:
    s, ix = name.series, name.indices
    if s == "A":
        return _xy(0, 2) + _xy(ix[0] + 1, 0)
    if s == "D":
        return _xy(1, 2) + _xy(ix[0] - 1, 0)
    if s == "E":
        k, rem = divmod(ix[0], 6)
        if rem == 0:
            return _xy(0, 3) + _xy(3 * k + 1, 0)
        if rem == 1:
            return _xy(0, 3) + _xy(2 * k + 1, 1)
        return _xy(0, 3) + _xy(3 * k + 2, 0)
    if s == "J":
        k, i = ix
        return _xy(0, 3) + _xy(k, 2) + _xy(3 * k + i, 0)
    if s == "Z":
        k, rem = divmod(ix[0] + 1, 6)
        if rem == 0:
            return _xy(1, 3) + _xy(3 * k - 1, 0)
        k, rem = divmod(ix[0], 6)
        if rem == 0:
            return _xy(1, 3) + _xy(2 * k, 1)
        if rem == 1:
            return _xy(1, 3) + _xy(3 * k, 0)
        raise InvalidTypeError(f"no Z type with index {ix[0]}")
    if s == "X":
        k, i = ix
        return _xy(0, 4) + _xy(k, 3) + _xy(2 * k, 2) + _xy(4 * k + i, 0)
    if s == "W":
        k, rem = divmod(ix[0], 12)
        if rem == 0:
            return _xy(0, 4) + _xy(4 * k + 1, 0)
        return _xy(0, 4) + _xy(3 * k + 1, 1)
    if s == "OMP":
        m = ix[0]
        return _xy(m, 0) + _xy(0, m)
    if s == "SQH":
        p, q = ix
        return _xy(p, 0) + _xy(0, q)
    if s == "CUSPFREE":
        p, r = ix
        f = _xy(p, 0) + _xy(0, p + 1)
        for i in range(1, r + 1):
            f = f * (Y - X.scale(i))
        return f
    raise InvalidTypeError(f"{name} has no normal form")


@dataclass(frozen=True)
class NormalForm:
    poly: Polynomial
    diagram: NewtonDiagram


def normal_form(name: TypeName | str) -> NormalForm:
    if isinstance(name, str):
        name = parse_type_name(name)
    f = normal_form_poly(name)
    return NormalForm(f, poly_diagram(f))


def catalog_mu(name: TypeName) -> int:
    return newton_number(normal_form(name).diagram.convenient_form())


# --- recognition ------------------------------------------------------------


def _candidates(mu: int) -> Iterator[TypeName]:
    """Every catalog name whose Milnor number can equal mu."""
    if mu >= 1:
        yield TypeName("A", (mu,))
    if mu >= 4:
        yield TypeName("D", (mu,))
    if mu >= 6 and mu % 6 in (0, 1, 2):
        yield TypeName("E", (mu,))
    for k in range(1, mu // 6 + 2):
        i = mu - (6 * k - 2)
        if i >= 0:
            yield TypeName("J", (k, i))
    if mu >= 11 and mu % 6 in (5, 0, 1):
        yield TypeName("Z", (mu,))
    for k in range(1, mu // 12 + 2):
        i = mu - (12 * k - 3)
        if i >= 0:
            yield TypeName("X", (k, i))
    if mu >= 12 and mu % 12 in (0, 1):
        yield TypeName("W", (mu,))
    m = round(mu ** 0.5) + 1
    if m >= 2 and (m - 1) ** 2 == mu:
        yield TypeName("OMP", (m,))
    for p in range(2, mu + 2):
        if mu % (p - 1) == 0:
            q = mu // (p - 1) + 1
            if q >= p:
                yield TypeName("SQH", (p, q))
    for s in range(3, mu + 3):
        for p in range(2, s):
            r = s - p
            if s * s - p - 2 * r == mu:
                yield TypeName("CUSPFREE", (p, r))


def recognize(d: NewtonDiagram) -> list[TypeName]:
    """Catalog names whose normal-form diagram has the same type as d."""
    target = d.convenient_form()
    mu = newton_number(target)
    hits = [n for n in _candidates(mu) if same_type(normal_form(n).diagram, target)]
    return sorted(hits, key=lambda n: _RECOGNITION_ORDER.index(n.series))


@dataclass(frozen=True)
class TypeDescriptor:
    """Recognition result: the names found, or just the diagram and invariants."""

    diagram: NewtonDiagram
    names: tuple[TypeName, ...]
    invariants: InvariantRecord

    def to_json(self) -> dict:
        return {"diagram": self.diagram.to_json(),
                "names": [str(n) for n in self.names],
                "invariants": self.invariants.to_json()}


def describe(d: NewtonDiagram) -> TypeDescriptor:
    return TypeDescriptor(d, tuple(recognize(d)), invariant_record(d))


# --- tangent cone -----------------------------------------------------------


def free_branch_count(f: Polynomial) -> int:
    """Simple lines of the tangent cone, i.e. smooth branches tangent to nothing else."""
    m = f.min_degree()
    cone = {k[:2]: c for k, c in f.terms.items() if sum(k) == m}
    coeffs = [Fraction(cone.get((m - b, b), 0)) for b in range(m + 1)]
    low_b = next(b for b, c in enumerate(coeffs) if c != 0)
    high_b = max(b for b, c in enumerate(coeffs) if c != 0)
    count = simple_root_count(coeffs[low_b:high_b + 1])
    if low_b == 1:  # y divides the cone once: the x-axis line
        count += 1
    if high_b == m - 1:  # x divides the cone once: the y-axis line
        count += 1
    return count


def free_branches(name: TypeName) -> int:
    return free_branch_count(normal_form_poly(name))
