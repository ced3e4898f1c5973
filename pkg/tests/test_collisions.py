import pytest

from singcol.algebra import Polynomial
from singcol.catalog import TypeName, parse_type_name
from singcol.collisions import (
    CollisionData,
    bound_check,
    branchwise_collide,
    collide_ade,
    collide_cuspfree_omp,
    collide_omp_omp,
    collide_sqh_omp,
    input_record,
)
from singcol.errors import (
    NotTabulatedError,
    OrderConventionError,
    ParseError,
    PreconditionError,
    UnsupportedCaseError,
)
from singcol.invariants import invariant_record, milnor_local
from singcol.newton import NewtonDiagram, poly_diagram, same_diagram

P = Polynomial.parse
T = parse_type_name
LX = CollisionData.parse("l=lx")
NLX = CollisionData.parse("l!=lx")


def names(res):
    return [str(n) for n in res.result_names]


def test_collision_data_parsing():
    d = CollisionData.parse("l=lx, l=ly")
    assert d.l_eq_lx and d.l_eq_ly and d.lx_eq_ly
    assert CollisionData.parse("") == CollisionData()
    with pytest.raises(ParseError):
        CollisionData.parse("l=lz")
    with pytest.raises(PreconditionError):
        CollisionData(l_eq_lx=True, l_eq_ly=True, lx_eq_ly=False)


@pytest.mark.parametrize("p,q,name,mu", [(1, 1, "A3", 3), (2, 1, "D6", 6), (3, 1, "X1_2", 11)])
def test_omp_omp_examples(p, q, name, mu):
    res = collide_omp_omp(p, q)
    assert name in names(res)
    assert res.invariants.mu == mu
    assert res.primitive_claimed


def test_omp_omp_order():
    with pytest.raises(OrderConventionError):
        collide_omp_omp(1, 2)


@pytest.mark.parametrize("p,q", [(p, q) for p in range(1, 7) for q in range(1, p + 1)])
def test_omp_omp_formulas(p, q):
    res = collide_omp_omp(p, q)
    inv = res.invariants
    assert inv.mu == p * p + q * q + q
    assert 2 * inv.delta == p * (p + 1) + q * (q + 1)
    assert inv.kappa == p * p + p + q * q + q
    assert not res.mismatches
    # normal form x^(p+1) + x^(q+1) y^(p-q) + y^(p+q+2)
    nf = P(f"x^{p + 1} + x^{q + 1}*y^{p - q} + y^{p + q + 2}")
    assert same_diagram(res.result_diagram, poly_diagram(nf).convenient_form())
    if p == q:
        assert res.result_diagram.vertices in (((0, 2 * p + 2), (p + 1, 0)), ((0, p + 1), (2 * p + 2, 0)))


def test_x9_plus_d4_is_flagged():
    res = collide_omp_omp(3, 2)
    assert res.invariants.mu == 15
    assert res.result_diagram.vertices == ((0, 7), (3, 1), (4, 0))
    assert any("paper-suspect" in f for f in res.flags)


def test_cusp_examples():
    res = collide_sqh_omp(1, 2, 1, NLX)
    assert res.invariants.mu == 5 and "D5" in names(res)
    res = collide_sqh_omp(1, 3, 2, LX)
    assert res.result_diagram.vertices in (((0, 7), (3, 0)), ((0, 3), (7, 0)))
    assert res.invariants.mu == 12
    res = collide_sqh_omp(2, 2, 1, LX)
    assert same_diagram(res.result_diagram, NewtonDiagram.from_vertices([(0, 6), (2, 2), (3, 0)]))
    assert res.invariants.mu == 10


def test_cusp_order_convention():
    with pytest.raises(OrderConventionError):
        collide_sqh_omp(1, 2, 2, LX)


def test_cusp_kappa_column_is_flagged():
    # the tabulated l != l_x kappa assumes the multiplicity stays p
    res = collide_sqh_omp(1, 2, 1, NLX)
    assert res.formula_checks["kappa"] == (6, 7)
    assert any("kappa" in f for f in res.flags)


def test_cuspfree_examples():
    assert collide_cuspfree_omp(2, 1, 1, NLX).invariants.mu == 9
    assert collide_cuspfree_omp(3, 2, 1, NLX).invariants.mu == 24
    assert collide_cuspfree_omp(4, 1, 1, LX).invariants.mu == 23
    with pytest.raises(UnsupportedCaseError):
        collide_cuspfree_omp(2, 1, 4, NLX)
    with pytest.raises(UnsupportedCaseError):
        collide_cuspfree_omp(2, 1, 3, LX)  # q = p + r makes an exponent negative


def test_cuspfree_delta_mismatch_surfaces():
    res = collide_cuspfree_omp(2, 3, 1, NLX)
    assert set(res.mismatches) == {"mu", "delta", "kappa"}
    assert res.formula_checks["delta"] == (14, 13)


def test_ade_examples():
    a2a1 = collide_ade("A2", "A1")
    assert {n for r in a2a1 for n in names(r)} >= {"A4", "D5"}
    assert "J2_0" in names(collide_ade("D4", "D4")[0])
    d4d6 = {str(r.result_names[0]): r.invariants.mu for r in collide_ade("D4", "D6")}
    assert d4d6 == {"X1_2": 11, "J2_2": 12}
    d4d5 = collide_ade("D4", "D5")
    assert sorted(r.invariants.mu for r in d4d5) == [11, 11]
    with pytest.raises(NotTabulatedError):
        collide_ade("E8", "E8")


def test_ade_wavy_arrows_non_generic():
    res = collide_ade("A3", "A2")
    flags = {str(r.result_names[0]): r.primitive_claimed for r in res}
    assert flags["E7"] is False
    assert flags["A6"] is True


def test_cross_rule_consistency():
    omp = collide_omp_omp(1, 1)
    assert any(set(names(r)) & set(names(omp)) for r in collide_ade("A1", "A1"))


def test_rule_invariants_are_recomputed():
    for res in [collide_omp_omp(4, 2), collide_sqh_omp(1, 5, 3, LX), collide_cuspfree_omp(3, 1, 2, NLX)]:
        assert res.invariants == invariant_record(res.result_diagram)


def test_bound_examples():
    a1 = input_record(T("A1"))
    a3 = collide_omp_omp(1, 1).invariants
    rep = bound_check(a1, 2, a1, 2, a3)
    assert rep.ok
    res = collide_omp_omp(3, 2)
    assert res.bounds.items["multiplicity"][0]
    d4 = input_record(T("D4"))
    rep = bound_check(d4, 3, d4, 3, collide_omp_omp(2, 2).invariants)
    assert rep.items["kappa"][0] and "10 >= 10" in rep.items["kappa"][1]


def test_multiplicity_clause_as_stated_rejects_d5():
    # A2 + A1 -> D5 raises the multiplicity although one free branch is available
    res = collide_sqh_omp(1, 2, 1, NLX)
    assert not res.bounds.items["multiplicity"][0]
    assert res.bounds.items["le-ramanujam"][0]


def test_branchwise_lines_plus_omp():
    d4 = [r for r in collide_ade("A1", "A1") if "D4" in names(r)][0]
    res = branchwise_collide([5, 7], d4)
    assert res.result_diagram.vertices == ((0, 5), (5, 0))
    assert TypeName("OMP", (5,)) in res.result_names


def test_branchwise_line_plus_a3_matches_explicit_product():
    inner = collide_omp_omp(1, 1)
    res = branchwise_collide([2], inner)
    explicit = P("(y - 2*x)*(y^2 + x^4)")
    assert res.invariants.mu == milnor_local(explicit) == 6
    assert res.primitive_claimed


def test_branchwise_rejects_shared_tangent():
    inner = collide_omp_omp(1, 1)
    with pytest.raises(PreconditionError):
        branchwise_collide([0], inner)
    with pytest.raises(PreconditionError):
        branchwise_collide([3, 3], inner)


def test_branchwise_primitivity_needs_kept_multiplicity():
    inner = collide_sqh_omp(1, 2, 1, NLX)  # D5, multiplicity grows from 2 to 3
    assert not branchwise_collide([5], inner).primitive_claimed
