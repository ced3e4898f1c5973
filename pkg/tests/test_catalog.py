import pytest

from singcol.algebra import Polynomial
from singcol.catalog import (
    InvalidTypeError,
    TypeName,
    catalog_mu,
    describe,
    free_branches,
    normal_form,
    parse_type_name,
    recognize,
)
from singcol.errors import ParseError
from singcol.invariants import milnor_local
from singcol.newton import NewtonDiagram, nnd_check, poly_diagram

P = Polynomial.parse
T = parse_type_name


def _names(d):
    return [str(n) for n in recognize(d)]


def test_parse_and_print():
    for text in ["A3", "D4", "E7", "J2_0", "X1_2", "Z13", "W12", "omp(4)", "sqh(3,4)", "cuspfree(2,1)"]:
        assert str(T(text)) == text
    assert T("J10") == TypeName("J", (2, 0))
    assert T("X9") == TypeName("X", (1, 0))
    assert T(" omp( 5 ) ") == TypeName("OMP", (5,))


@pytest.mark.parametrize("bad", ["A0", "D3", "E9", "Z14", "W14", "omp(1)", "sqh(4,3)", "cuspfree(1,1)"])
def test_invalid_indices(bad):
    with pytest.raises(InvalidTypeError):
        T(bad)


def test_unparseable_name():
    with pytest.raises(ParseError):
        T("Q7")


def test_normal_form_examples():
    a3 = normal_form("A3")
    assert a3.poly == P("y^2 + x^4")
    assert a3.diagram.vertices == ((0, 2), (4, 0))
    assert normal_form("Z13").poly == P("y^3*x + x^6")
    assert normal_form("X1_2").poly == P("y^4 + y^3*x + y^2*x^2 + x^6")
    assert normal_form("omp(3)").poly == P("x^3 + y^3")


def test_recognize_examples():
    assert _names(NewtonDiagram(((0, 2), (4, 0))))[0] == "A3"
    assert "J2_0" in _names(NewtonDiagram.from_vertices([(0, 3), (2, 2), (6, 0)]))
    d6 = poly_diagram(P("(x + y)*(x^2 + y^4)"))
    assert d6.vertices == ((0, 5), (2, 1), (3, 0))
    assert "D6" in _names(d6)


def test_distinct_types_with_equal_mu_not_conflated():
    x12 = normal_form("X1_2").diagram
    j21 = normal_form("J2_1").diagram
    assert catalog_mu(T("X1_2")) == catalog_mu(T("J2_1")) == 11
    assert "J2_1" not in _names(x12)
    assert "X1_2" not in _names(j21)


def _catalog():
    names = [f"A{k}" for k in range(1, 14)] + [f"D{k}" for k in range(4, 14)]
    names += [f"E{k}" for k in (6, 7, 8, 12, 13, 14, 18, 19, 20)]
    names += [f"J{k}_{i}" for k in range(1, 4) for i in range(4)]
    names += [f"X{k}_{i}" for k in range(1, 4) for i in range(4)]
    names += [f"Z{k}" for k in (11, 12, 13, 17, 18, 19)]
    names += ["W12", "W13"] + [f"omp({m})" for m in range(2, 9)]
    return names


@pytest.mark.parametrize("name", _catalog())
def test_round_trip(name):
    n = T(name)
    nf = normal_form(n)
    assert n in recognize(nf.diagram)
    assert nnd_check(nf.poly, nf.diagram)


@pytest.mark.parametrize("name,mu", [
    ("A5", 5), ("D7", 7), ("E6", 6), ("E7", 7), ("E8", 8), ("J10", 10), ("X9", 9), ("Z13", 13), ("W12", 12),
])
def test_catalog_mu_two_ways(name, mu):
    assert catalog_mu(T(name)) == mu
    assert milnor_local(normal_form(name).poly) == mu


def test_describe_anonymous():
    d = NewtonDiagram(((0, 7), (3, 1), (4, 0)))
    desc = describe(d)
    assert desc.names == ()
    assert desc.invariants.mu == 15
    assert desc.to_json()["names"] == []


def test_free_branches():
    assert free_branches(T("omp(4)")) == 4
    assert free_branches(T("A2")) == 0
    assert free_branches(T("D5")) == 1
    assert free_branches(T("cuspfree(3,2)")) == 2
    assert free_branches(T("A3")) == 0
