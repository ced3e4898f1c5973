import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singcol.algebra import Polynomial
from singcol.catalog import normal_form, parse_type_name
from singcol.collisions import ADE_DEGENERATIONS
from singcol.errors import (
    DegenerateInputError,
    InconsistencyError,
    NonIsolatedError,
    NotAGermError,
)
from singcol.invariants import InvariantRecord, invariant_record, milnor_local, multiplicity
from singcol.newton import NewtonDiagram

P = Polynomial.parse


def test_multiplicity():
    assert multiplicity(P("y^2 - x^3")) == 2
    assert multiplicity(P("x*(y^2 + x^4)")) == 3
    assert multiplicity(P("x^4 + y^4")) == 4
    with pytest.raises(NotAGermError):
        multiplicity(P("1 + x"))
    with pytest.raises(NotAGermError):
        multiplicity(Polynomial())


@pytest.mark.parametrize("text,mu", [
    ("x^2 + y^2", 1),
    ("x^2 + y^3", 2),
    ("x^4 + y^4 + x^3*y", 9),
    ("y^2*x + x^5", 6),
    ("y^3 + x^2*y^2 + x^6", 10),
])
def test_milnor_examples(text, mu):
    assert milnor_local(P(text)) == mu


def test_milnor_non_isolated():
    # the form listed as a generic OMP(4) has the square of x + y as a factor
    with pytest.raises(NonIsolatedError):
        milnor_local(P("x^4 + y^4 + x^3*y + x*y^3"))
    with pytest.raises(NonIsolatedError):
        milnor_local(P("x^2*y^2"), n_max=12)


def test_milnor_ignores_points_away_from_origin():
    # y^2 - x^2 (x - 1): node at the origin, smooth elsewhere on the curve
    assert milnor_local(P("y^2 - x^2 + x^3")) == 1


def test_records_from_diagrams():
    a3 = invariant_record(NewtonDiagram(((0, 2), (4, 0))))
    assert a3.to_json() == {"mult": 2, "mu": 3, "r": 2, "delta": 2, "kappa": 4}
    j10 = invariant_record(NewtonDiagram.from_vertices([(0, 3), (2, 2), (6, 0)]))
    assert (j10.mult, j10.mu, j10.r, j10.delta, j10.kappa) == (3, 10, 3, 6, 12)


@pytest.mark.parametrize("m", range(2, 9))
def test_omp_record(m):
    rec = invariant_record(NewtonDiagram(((0, m), (m, 0))))
    assert rec == InvariantRecord(m, (m - 1) ** 2, m, m * (m - 1) // 2, m * (m - 1))


def test_record_from_polynomial_and_degenerate_input():
    rec = invariant_record(P("y^2*x + x^5"))
    assert (rec.mult, rec.mu, rec.r) == (3, 6, 3)
    with pytest.raises(DegenerateInputError):
        invariant_record(P("(x + y)^2 + x^3"))


def test_record_identities_enforced():
    with pytest.raises(InconsistencyError):
        InvariantRecord(2, 3, 2, 1, 4)
    with pytest.raises(InconsistencyError):
        InvariantRecord(2, 3, 2, 2, 5)
    with pytest.raises(InconsistencyError):
        InvariantRecord.from_mu(2, 3, 1)  # mu + r - 1 odd


@given(st.integers(1, 8), st.integers(0, 60), st.integers(1, 8))
@settings(max_examples=80, deadline=None)
def test_from_mu_round_trip(mult, mu, r):
    if (mu + r - 1) % 2 or mult > mu + 1 or mu + r - 1 < 0:
        return
    rec = InvariantRecord.from_mu(mult, mu, r)
    assert InvariantRecord.from_json(rec.to_json()) == rec
    assert rec.mu == 2 * rec.delta - rec.r + 1


def _mu(name: str) -> int:
    return invariant_record(normal_form(parse_type_name(name)).diagram.convenient_form()).mu


def test_degeneration_arrows_raise_mu():
    for src, dst in ADE_DEGENERATIONS:
        if "{" in src:
            for k in range(1, 5):
                for l in range(1, k + 1):
                    assert _mu(f"D{k + l + 2}") >= _mu(f"A{k + l + 1}")
            continue
        assert _mu(dst) >= _mu(src)
