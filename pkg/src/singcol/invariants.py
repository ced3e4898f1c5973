"""Multiplicity, Milnor number and the derived invariants of a plane curve germ."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, ClassVar

from .algebra import (
    INFINITE,
    LOCAL_DEGREVLEX,
    Polynomial,
    buchberger,
    standard_monomial_count,
)
from .errors import (
    DegenerateInputError,
    InconsistencyError,
    NonIsolatedError,
    NotAGermError,
)
from .newton import (
    NewtonDiagram,
    generic_branch_count,
    newton_number,
    nnd_check,
    poly_diagram,
)

DEFAULT_N_MAX = 40


@dataclass(frozen=True)
class InvariantRecord:
    mult: int
    mu: int
    r: int
    delta: int
    kappa: int

    # callbacks run on every constructed record; used by test harnesses
    observers: ClassVar[list[Callable[["InvariantRecord"], None]]] = []

    def __post_init__(self):
        if self.mult < 1 or self.mu < 0 or self.r < 1 or self.delta < 0 or self.kappa < 0:
            raise InconsistencyError(f"invariant out of range: {self}")
        if self.mu != 2 * self.delta - self.r + 1:
            raise InconsistencyError(f"mu != 2*delta - r + 1 in {self}")
        if self.kappa != self.mu + self.mult - 1:
            raise InconsistencyError(f"kappa != mu + mult - 1 in {self}")
        if self.mult > self.mu + 1:
            raise InconsistencyError(f"mult > mu + 1 in {self}")
        for hook in list(self.observers):
            hook(self)

    @classmethod
    def from_mu(cls, mult: int, mu: int, r: int) -> "InvariantRecord":
        if (mu + r - 1) % 2:
            raise InconsistencyError(f"mu + r - 1 is odd (mu={mu}, r={r})")
        return cls(mult, mu, r, (mu + r - 1) // 2, mu + mult - 1)

    def to_json(self) -> dict:
        return {"mult": self.mult, "mu": self.mu, "r": self.r,
                "delta": self.delta, "kappa": self.kappa}

    @classmethod
    def from_json(cls, data: dict) -> "InvariantRecord":
        return cls(**{k: int(data[k]) for k in ("mult", "mu", "r", "delta", "kappa")})


def multiplicity(f: Polynomial) -> int:
    if f.is_zero():
        raise NotAGermError("the zero polynomial is not a curve germ")
    if f.coefficient((0, 0, 0)) != 0:
        raise NotAGermError(f"{f} does not vanish at the origin")
    return f.min_degree()


def _local_count(fx: Polynomial, fy: Polynomial, n: int) -> int:
    gens = [g for g in (fx.truncate(n - 1), fy.truncate(n - 1)) if not g.is_zero()]
    gens += [Polynomial.monomial(a, n - a) for a in range(n + 1)]
    return standard_monomial_count(buchberger(gens, LOCAL_DEGREVLEX), LOCAL_DEGREVLEX)


def milnor_local(f: Polynomial, n_max: int = DEFAULT_N_MAX) -> int:
    """Milnor number at the origin.

    Uses dim Q[x,y]/(J + m^N) in a local order, raising N until two
    consecutive values agree (then m^N is already inside J locally).
    """
    if "e" in f.variables():
        raise ValueError("milnor_local expects a polynomial in x and y only")
    m = multiplicity(f)
    if m == 1:
        return 0
    fx, fy = f.diff("x"), f.diff("y")
    n, step = m + 2, 1
    previous = _local_count(fx, fy, n)
    while True:
        nxt = n + step
        if nxt > n_max:
            raise NonIsolatedError(
                f"Milnor number of {f} did not stabilise up to N={n_max} (last value {previous})"
            )
        value = _local_count(fx, fy, nxt)
        if value == previous:
            return int(value)
        previous, n, step = value, nxt, step * 2


def invariant_record(source: Polynomial | NewtonDiagram, n_max: int = DEFAULT_N_MAX) -> InvariantRecord:
    if isinstance(source, NewtonDiagram):
        return InvariantRecord.from_mu(
            source.multiplicity(), newton_number(source), generic_branch_count(source)
        )
    f = source
    mult = multiplicity(f)
    d = poly_diagram(f)
    if not nnd_check(f, d):
        raise DegenerateInputError(
            f"{f} is degenerate on its Newton diagram {d}; resample the coefficients"
        )
    mu = milnor_local(f, n_max)
    if mu == INFINITE:
        raise NonIsolatedError(f"{f} has a non-isolated singularity")
    return InvariantRecord.from_mu(mult, mu, generic_branch_count(d))
