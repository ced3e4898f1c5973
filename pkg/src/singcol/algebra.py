"""Exact polynomials over Q in the variables x, y, e (e plays the role of epsilon).

Coefficients are ``fractions.Fraction``; monomials are exponent triples
``(a, b, c)`` meaning ``x^a * y^b * e^c``.
"""

from __future__ import annotations

import heapq
import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Sequence

from .errors import ArityError, ParseError

VARS = ("x", "y", "e")
VAR_INDEX = {v: i for i, v in enumerate(VARS)}
ZERO_EXP = (0, 0, 0)
INFINITE = math.inf

Exp = tuple[int, int, int]


def _mul_exp(s: Exp, t: Exp) -> Exp:
    return (s[0] + t[0], s[1] + t[1], s[2] + t[2])


def _divides(s: Exp, t: Exp) -> bool:
    return s[0] <= t[0] and s[1] <= t[1] and s[2] <= t[2]


def _div_exp(t: Exp, s: Exp) -> Exp:
    return (t[0] - s[0], t[1] - s[1], t[2] - s[2])


def _lcm_exp(s: Exp, t: Exp) -> Exp:
    return (max(s[0], t[0]), max(s[1], t[1]), max(s[2], t[2]))


def monomial_str(m: Exp) -> str:
    parts = []
    for v, k in zip(VARS, m):
        if k == 1:
            parts.append(v)
        elif k > 1:
            parts.append(f"{v}^{k}")
    return "*".join(parts) or "1"


class Polynomial:
    """Immutable sparse polynomial; zero coefficients are never stored."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Sequence[int], object] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Exp, Fraction] = {}
        for m, c in items:
            m = tuple(m) + (0,) * (3 - len(m))
            if len(m) != 3 or min(m) < 0:
                raise ValueError(f"bad exponent {m}")
            c = Fraction(c)
            if c:
                clean[m] = clean.get(m, 0) + c
                if not clean[m]:
                    del clean[m]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Polynomial":
        # trusted constructor: caller guarantees no zero coefficients
        p = object.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls({ZERO_EXP: c})

    @classmethod
    def var(cls, name: str) -> "Polynomial":
        m = [0, 0, 0]
        m[VAR_INDEX[name]] = 1
        return cls({tuple(m): 1})

    @classmethod
    def monomial(cls, a: int = 0, b: int = 0, c: int = 0, coeff=1) -> "Polynomial":
        return cls({(a, b, c): coeff})

    @classmethod
    def parse(cls, text: str) -> "Polynomial":
        return parse_polynomial(text)

    @property
    def terms(self) -> Mapping[Exp, Fraction]:
        return MappingProxyType(self._terms)

    def support(self) -> set[tuple[int, int]]:
        """Lattice points (a, b) of the x, y exponents."""
        return {(m[0], m[1]) for m in self._terms}

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def total_degree(self) -> int:
        return max((sum(m) for m in self._terms), default=-1)

    def min_degree(self) -> int:
        return min((sum(m) for m in self._terms), default=-1)

    def variables(self) -> set[str]:
        return {VARS[i] for m in self._terms for i in range(3) if m[i]}

    def coefficient(self, m: Sequence[int]) -> Fraction:
        m = tuple(m) + (0,) * (3 - len(m))
        return self._terms.get(m, Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(other)
        return NotImplemented

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = Fraction(c)
        if not c:
            return Polynomial()
        return Polynomial._raw({m: c * v for m, v in self._terms.items()})

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        out: dict[Exp, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2])
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial._raw({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def diff(self, var: str) -> "Polynomial":
        i = VAR_INDEX[var]
        out = {}
        for m, c in self._terms.items():
            if m[i]:
                n = list(m)
                n[i] -= 1
                out[tuple(n)] = c * m[i]
        return Polynomial._raw(out)

    def truncate(self, max_degree: int) -> "Polynomial":
        """Drop terms whose x, y degree exceeds max_degree."""
        return Polynomial._raw(
            {m: c for m, c in self._terms.items() if m[0] + m[1] <= max_degree}
        )

    def subs(self, mapping: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Simultaneous substitution of variables by polynomials."""
        images = [mapping.get(v, Polynomial.var(v)) for v in VARS]
        images = [p if isinstance(p, Polynomial) else Polynomial.constant(p) for p in images]
        powers: list[dict[int, Polynomial]] = [{0: Polynomial.constant(1)} for _ in VARS]

        def power(i: int, k: int) -> Polynomial:
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * images[i]
            return cache[k]

        out = Polynomial()
        for m, c in self._terms.items():
            out = out + (power(0, m[0]) * power(1, m[1]) * power(2, m[2])).scale(c)
        return out

    def evaluate(self, point: Sequence) -> Fraction:
        """Evaluate at a point of arity 2 (x, y) or 3 (x, y, e)."""
        if len(point) not in (2, 3):
            raise ArityError(f"expected 2 or 3 coordinates, got {len(point)}")
        pt = [Fraction(v) for v in point]
        if len(pt) == 2:
            if any(m[2] for m in self._terms):
                raise ArityError("polynomial involves e; give 3 coordinates")
            pt.append(Fraction(0))
        total = Fraction(0)
        for m, c in self._terms.items():
            total += c * pt[0] ** m[0] * pt[1] ** m[1] * pt[2] ** m[2]
        return total

    def leading(self, order: "MonomialOrder") -> tuple[Exp, Fraction]:
        m = max(self._terms, key=order.key)
        return m, self._terms[m]

    def monic(self, order: "MonomialOrder") -> "Polynomial":
        _, c = self.leading(order)
        return self.scale(1 / c)

    def sorted_terms(self, order: "MonomialOrder | None" = None) -> list[tuple[Exp, Fraction]]:
        order = order or DEGREVLEX
        return sorted(self._terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for m, c in self.sorted_terms():
            sign = "-" if c < 0 else "+"
            a = abs(c)
            mono = monomial_str(m)
            if mono == "1":
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            out.append((sign, body))
        first_sign, first = out[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in out[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r})"


def poly_arith(op: str, *operands):
    """Dispatch for the basic operations by name."""
    if op == "add":
        a, b = operands
        return a + b
    if op == "mul":
        a, b = operands
        return a * b
    if op == "scale":
        a, c = operands
        return a.scale(c)
    if op == "partial_derivative":
        a, v = operands
        return a.diff(v)
    if op == "substitute":
        a, mapping = operands
        return a.subs(mapping)
    if op == "evaluate":
        a, point = operands
        return a.evaluate(point)
    raise ValueError(f"unknown operation {op!r}")


# --- monomial orders -------------------------------------------------------


@dataclass(frozen=True)
class MonomialOrder:
    kind: str
    key: Callable[[Exp], tuple]

    def __repr__(self) -> str:
        return f"MonomialOrder({self.kind})"


def _degrevlex_key(m: Exp) -> tuple:
    return (m[0] + m[1] + m[2], -m[2], -m[1], -m[0])


def _lex_key(m: Exp) -> tuple:
    return m


def _elim_key(m: Exp) -> tuple:
    # e is eliminated: any power of e beats everything else
    return (m[2], m[0] + m[1], -m[1], -m[0])


def _local_key(m: Exp) -> tuple:
    # lower degree is larger; only a valid choice when the ideal contains a
    # power of (x, y), which makes every reduction finite
    return (-(m[0] + m[1] + m[2]), -m[2], -m[1], -m[0])


DEGREVLEX = MonomialOrder("degrevlex", _degrevlex_key)
LEX = MonomialOrder("lex", _lex_key)
ELIMINATION = MonomialOrder("elimination", _elim_key)
LOCAL_DEGREVLEX = MonomialOrder("local-degrevlex", _local_key)
ORDERS = {o.kind: o for o in (DEGREVLEX, LEX, ELIMINATION, LOCAL_DEGREVLEX)}


# --- Groebner bases --------------------------------------------------------


class _GBPoly:
    """Mutable working copy used inside Buchberger."""

    __slots__ = ("terms", "lm", "sugar")

    def __init__(self, terms: dict, order: MonomialOrder, sugar: int):
        self.terms = terms
        self.lm = max(terms, key=order.key)
        self.sugar = sugar


def _reduce(terms: dict, basis: list[_GBPoly], order: MonomialOrder, full: bool = True) -> dict:
    """Normal form of ``terms`` modulo monic ``basis``."""
    key = order.key
    p = dict(terms)
    rem: dict[Exp, Fraction] = {}
    while p:
        m = max(p, key=key)
        c = p[m]
        for g in basis:
            if _divides(g.lm, m):
                q = _div_exp(m, g.lm)
                for gm, gc in g.terms.items():
                    t = (gm[0] + q[0], gm[1] + q[1], gm[2] + q[2])
                    v = p.get(t, 0) - c * gc
                    if v:
                        p[t] = v
                    else:
                        p.pop(t, None)
                break
        else:
            rem[m] = c
            del p[m]
            if not full:
                rem.update(p)
                break
    return rem


def _reducers(basis: list) -> list:
    # shortest reducers first: cheaper steps and slower coefficient growth
    return sorted((b for b in basis if b is not None), key=lambda b: len(b.terms))


def _monic(terms: dict, order: MonomialOrder) -> dict:
    lm = max(terms, key=order.key)
    c = terms[lm]
    if c == 1:
        return terms
    return {m: v / c for m, v in terms.items()}


def reduce(f: Polynomial, basis: Sequence[Polynomial], order: MonomialOrder = DEGREVLEX) -> Polynomial:
    """Full normal form of f modulo a list of polynomials (divided in order)."""
    work = [_GBPoly(_monic(dict(g.terms), order), order, 0) for g in basis if g]
    return Polynomial._raw(_reduce(dict(f.terms), work, order))


def buchberger(generators: Sequence[Polynomial], order: MonomialOrder = DEGREVLEX) -> list[Polynomial]:
    """Reduced Groebner basis, using sugar pair selection.

    The result is monic and sorted by increasing leading monomial.
    """
    key = order.key
    basis: list[_GBPoly] = []
    gens = [g for g in generators if g]
    if not gens:
        return []
    if order is LOCAL_DEGREVLEX:
        pure = [g.leading(DEGREVLEX)[0] for g in gens if len(g.terms) == 1]
        if not (any(m[0] and not m[1] and not m[2] for m in pure)
                and any(m[1] and not m[0] and not m[2] for m in pure)):
            raise ValueError("local order needs pure powers of x and y among the generators")
    counter = itertools.count()
    pairs: list = []

    def push_pairs(j: int) -> None:
        gj = basis[j]
        for i in range(j):
            gi = basis[i]
            if gi is None:
                continue
            lcm = _lcm_exp(gi.lm, gj.lm)
            sugar = max(
                gi.sugar + sum(lcm) - sum(gi.lm),
                gj.sugar + sum(lcm) - sum(gj.lm),
            )
            heapq.heappush(pairs, (sugar, key(lcm), next(counter), i, j, lcm))

    def add(terms: dict, sugar: int) -> None:
        g = _GBPoly(_monic(terms, order), order, sugar)
        basis.append(g)
        # keep every tail reduced against the whole basis; without this the
        # coefficients grow geometrically on dense inputs
        reducers = _reducers(basis)
        for h in basis:
            if h is None or h is g:
                continue
            if any(_divides(g.lm, m) for m in h.terms if m != h.lm):
                tail = dict(h.terms)
                lc = tail.pop(h.lm)
                tail = _reduce(tail, reducers, order)
                tail[h.lm] = lc
                h.terms = tail
        push_pairs(len(basis) - 1)

    # sparse inputs first, so monomials never get rewritten by dense generators
    for g in sorted(gens, key=lambda g: (len(g.terms), g.total_degree(), key(g.leading(order)[0]))):
        live = _reducers(basis)
        r = _reduce(dict(g.terms), live, order)
        if r:
            add(r, g.total_degree())

    done: set[tuple[int, int]] = set()
    while pairs:
        sugar, _, _, i, j, lcm = heapq.heappop(pairs)
        gi, gj = basis[i], basis[j]
        done.add((i, j))
        # product criterion
        if _lcm_exp(gi.lm, gj.lm) == _mul_exp(gi.lm, gj.lm):
            continue
        # chain criterion
        skip = False
        for k, gk in enumerate(basis):
            if k in (i, j) or gk is None:
                continue
            if _divides(gk.lm, lcm):
                a, b = (min(i, k), max(i, k)), (min(j, k), max(j, k))
                if a in done and b in done:
                    skip = True
                    break
        if skip:
            continue
        qi, qj = _div_exp(lcm, gi.lm), _div_exp(lcm, gj.lm)
        s: dict[Exp, Fraction] = {}
        for m, c in gi.terms.items():
            s[_mul_exp(m, qi)] = c
        for m, c in gj.terms.items():
            t = _mul_exp(m, qj)
            v = s.get(t, 0) - c
            if v:
                s[t] = v
            else:
                s.pop(t, None)
        if not s:
            continue
        r = _reduce(s, _reducers(basis), order)
        if r:
            add(r, sugar)

    # minimalize and inter-reduce
    live = [b for b in basis if b is not None]
    live.sort(key=lambda g: key(g.lm))
    minimal: list[_GBPoly] = []
    for g in live:
        if not any(_divides(h.lm, g.lm) for h in minimal):
            minimal = [h for h in minimal if not _divides(g.lm, h.lm)]
            minimal.append(g)
    reduced = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1:]
        tail = dict(g.terms)
        lc = tail.pop(g.lm)
        r = _reduce(tail, others, order)
        r[g.lm] = lc
        reduced.append(Polynomial._raw(_monic(r, order)))
    reduced.sort(key=lambda p: key(p.leading(order)[0]))
    return reduced


def standard_monomial_count(basis: Sequence[Polynomial], order: MonomialOrder = DEGREVLEX):
    """Number of monomials outside the leading-term ideal, or INFINITE."""
    if not basis:
        return INFINITE
    lms = [p.leading(order)[0] for p in basis]
    if any(m == ZERO_EXP for m in lms):
        return 0
    active = sorted({i for p in basis for m in p.terms for i in range(3) if m[i]} | {0, 1})
    bounds = {}
    for i in active:
        pure = [m[i] for m in lms if m[i] and all(m[j] == 0 for j in range(3) if j != i)]
        if not pure:
            return INFINITE
        bounds[i] = min(pure)
    count = 0
    ranges = [range(bounds[i]) if i in active else range(1) for i in range(3)]
    for m in itertools.product(*ranges):
        if not any(_divides(l, m) for l in lms):
            count += 1
    return count


# --- exact linear algebra --------------------------------------------------


def rref(matrix: Sequence[Sequence]) -> tuple[list[list[Fraction]], int, list[int]]:
    """Reduced row echelon form; zero rows are kept at the bottom."""
    rows = [[Fraction(v) for v in row] for row in matrix]
    if not rows:
        return [], 0, []
    ncols = len(rows[0])
    if any(len(r) != ncols for r in rows):
        raise ValueError("ragged matrix")
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        if r == len(rows):
            break
        pivot = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [v * inv for v in rows[r]]
        prow = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], prow)]
        pivots.append(col)
        r += 1
    return rows, r, pivots


# --- sparse row reduction, used by the flat-limit code ---------------------


class SparseEchelon:
    """Incremental echelon basis of sparse rational vectors.

    Vectors are dicts column -> Fraction.  Each stored row has a pivot
    column that no other stored row touches (fully reduced form).
    """

    def __init__(self):
        self.rows: dict[int, dict[int, Fraction]] = {}

    def reduce(self, vec: Mapping[int, Fraction]) -> dict[int, Fraction]:
        v = dict(vec)
        for col in [c for c in v if c in self.rows]:
            c = v.get(col)
            if not c:
                continue
            for k, val in self.rows[col].items():
                nv = v.get(k, 0) - c * val
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
        return v

    def add(self, vec: Mapping[int, Fraction]) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        col = min(v)
        inv = 1 / v[col]
        v = {k: val * inv for k, val in v.items()}
        for other_col, row in self.rows.items():
            c = row.get(col)
            if c:
                for k, val in v.items():
                    nv = row.get(k, 0) - c * val
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
        self.rows[col] = v
        return True

    def contains(self, vec: Mapping[int, Fraction]) -> bool:
        return not self.reduce(vec)

    @property
    def rank(self) -> int:
        return len(self.rows)


# --- literal parser --------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([xye])|(\*\*|[-+*/^()]))")


def parse_polynomial(text: str) -> Polynomial:
    """Parse literals like ``y^2*x + x^5`` or ``3/2*x^2 - y``.

    Parentheses and integer powers of sub-expressions are accepted too.
    """
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    stripped = text.rstrip()
    while pos < len(stripped):
        m = _TOKEN.match(stripped, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {stripped[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("var", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            tokens.append(("op", op, start))
        pos = m.end()
    tokens.append(("end", "", len(stripped)))
    i = 0

    def peek():
        return tokens[i]

    def take(kind=None, value=None):
        nonlocal i
        tok = tokens[i]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            raise ParseError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", tok[2])
        i += 1
        return tok

    def expr() -> Polynomial:
        sign = 1
        if peek()[0] == "op" and peek()[1] in ("+", "-"):
            sign = -1 if take()[1] == "-" else 1
        acc = term().scale(sign)
        while peek()[0] == "op" and peek()[1] in ("+", "-"):
            op = take()[1]
            t = term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term() -> Polynomial:
        acc = factor()
        while peek()[0] == "op" and peek()[1] == "*":
            take()
            acc = acc * factor()
        return acc

    def factor() -> Polynomial:
        base = atom()
        if peek()[0] == "op" and peek()[1] == "^":
            take()
            k = int(take("num")[1])
            base = base ** k
        return base

    def atom() -> Polynomial:
        tok = peek()
        if tok[0] == "num":
            take()
            value = Fraction(int(tok[1]))
            if peek()[0] == "op" and peek()[1] == "/":
                take()
                den = int(take("num")[1])
                if den == 0:
                    raise ParseError("zero denominator", tok[2])
                value /= den
            return Polynomial.constant(value)
        if tok[0] == "var":
            take()
            return Polynomial.var(tok[1])
        if tok[0] == "op" and tok[1] == "(":
            take()
            inner = expr()
            take("op", ")")
            return inner
        if tok[0] == "op" and tok[1] == "-":
            take()
            return -factor()
        raise ParseError(f"unexpected {tok[1] or 'end of input'!r}", tok[2])

    result = expr()
    if peek()[0] != "end":
        tok = peek()
        raise ParseError(f"unexpected {tok[1]!r}", tok[2])
    return result


X = Polynomial.var("x")
Y = Polynomial.var("y")
E = Polynomial.var("e")
