import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import FIXTURE_24, TANGO
from raynaud.algebra import FpPoly, FpRational, parse_rational
from raynaud.certificate import Certificate, InconclusiveError, Status
from raynaud.curve import PROJECTIVE, U2_VARS, Chart, DivisorOnC, PlaneCurveFamily, chart
from raynaud.tango import (
    TangoDatum,
    build_custom_datum,
    build_quotient_bundle,
    build_standard_datum,
    certify_condition1,
    certify_condition2,
    certify_tango,
    differential_residual,
    extract_transition,
    failure_depth,
    fixture_datum,
    fn_field_pth_root,
    reduces_to_zero,
    root_of_gamma,
    transition_with_beta,
)


@pytest.mark.parametrize("pne", sorted(TANGO))
def test_standard_family_is_tango(pne):
    deg, g, v_dz1, beta = TANGO[pne]
    datum = build_standard_datum(*pne)
    c1 = certify_condition1(datum)
    assert c1.status == Status.PASS
    assert c1["v_inf_dz1"].witness["expected"] == v_dz1 == 2 * g - 2
    c2 = certify_condition2(datum)
    assert c2.status == Status.PASS
    assert parse_rational(c2.family["beta"], datum.p, U2_VARS) == parse_rational(beta, datum.p, U2_VARS)
    cert = certify_tango(datum)
    assert cert.status == Status.PASS and cert.is_consistent()


def test_beta_is_inverse_shape():
    # beta = Q(x, y)^(-1) dehomogenized; for Q = Y^e this is y^(-e)
    datum = build_standard_datum(3, 1, 2)
    y = FpPoly.gen(3, U2_VARS, "y")
    assert root_of_gamma(datum) == FpRational(FpPoly.constant(3, U2_VARS, 1), y ** 2)


def test_transition_identity_holds_on_curve():
    datum = build_standard_datum(2, 1, 3)
    tr = extract_transition(datum)
    f = chart(datum.curve, "U2").equation
    q = datum.p ** datum.n
    diff = datum.f - tr.alpha ** q * tr.z2 - tr.gamma
    assert reduces_to_zero(diff.num, f)


def test_declared_transition_accepted_and_wrong_one_rejected():
    C = PlaneCurveFamily.standard(2, 1, 3)
    tr = extract_transition(build_standard_datum(2, 1, 3))
    declared = (str(tr.z2), str(tr.alpha), str(tr.gamma))
    datum = build_custom_datum(C, declared=declared)
    assert certify_condition2(datum).status == Status.PASS
    bad = build_custom_datum(C, declared=(declared[0], declared[1], "(1)/(1*y^1)"))
    with pytest.raises(ValueError, match="transition identity"):
        extract_transition(bad)


def test_example_24_fails_at_depth_2():
    datum = fixture_datum("2.4", 2)
    assert datum.D == DivisorOnC.from_json(FIXTURE_24["D"])
    assert certify_condition1(datum).status == Status.PASS
    c2 = certify_condition2(datum)
    assert c2.status == Status.FAIL
    assert failure_depth(c2) == 2
    assert c2["root_depth_1"].witness["root"] == FIXTURE_24["depth1_root"]
    assert c2["root_depth_2"].witness["residual"] == FIXTURE_24["depth2_residual"]
    # the depth-1 root squares to gamma on the curve
    f = chart(datum.curve, "U2").equation
    r = parse_rational(FIXTURE_24["depth1_root"], 2, U2_VARS)
    gamma = parse_rational(FIXTURE_24["gamma"], 2, U2_VARS)
    assert reduces_to_zero((r ** 2 - gamma).num, f)
    assert c2.is_consistent()
    with pytest.raises(ValueError, match="condition"):
        transition_with_beta(datum)


def test_tango_datum_validation():
    with pytest.raises(ValueError, match="p\\^n e <= 3"):
        build_standard_datum(3, 1, 1)
    C = PlaneCurveFamily.standard(2, 1, 3)
    f = FpRational(FpPoly.constant(2, U2_VARS, 1), FpPoly.gen(2, U2_VARS, "x"))
    with pytest.raises(ValueError, match="2g-2"):
        TangoDatum(C, f, 1, DivisorOnC.at_infinity(8))


def test_quotient_bundle_for_213():
    datum = build_standard_datum(2, 1, 3)
    qb = build_quotient_bundle(datum, transition_with_beta(datum))
    assert qb.D0 == DivisorOnC.at_infinity(3)
    assert qb.deg_L0 == 12
    assert qb.saturated and qb.h0_lower_bound >= 2
    with pytest.raises(ValueError, match="beta"):
        build_quotient_bundle(datum, extract_transition(datum))


def test_certificate_json_roundtrip_and_tamper():
    cert = certify_tango(build_standard_datum(2, 2, 1))
    text = cert.to_json()
    again = Certificate.from_json(text)
    assert again.to_json() == text
    assert again.recheck_status() == Status.PASS
    tampered = text.replace('"expected": 4', '"expected": 5')
    assert tampered != text
    assert Certificate.from_json(tampered).recheck_status() == Status.FAIL


def test_root_requires_irreducible_chart():
    x, y = FpPoly.gens(5, U2_VARS)
    nodal = y ** 2 - x ** 3 - x ** 2
    ch = Chart("U2", nodal, U2_VARS, {}, "Z")
    g = FpRational(x ** 5 + x * y)
    with pytest.raises(ValueError, match="singular"):
        fn_field_pth_root(g, ch)


def test_differential_residual_detects_non_roots():
    C = PlaneCurveFamily.standard(2, 2, 1)
    f = chart(C, "U2").equation
    x, y = FpPoly.gens(2, U2_VARS)
    assert differential_residual(FpRational(x ** 2), f).is_zero()
    assert not differential_residual(FpRational(x), f).is_zero()


# ---------------------------------------------------------------------------
# p-th root roundtrip on constructed p-th powers

CURVE = PlaneCurveFamily.standard(2, 2, 1)
CH = chart(CURVE, "U2")
F = CH.equation

small = st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2)), st.integers(0, 1), max_size=6)


@settings(max_examples=1000)
@given(small, small, small)
def test_fn_field_pth_root_roundtrip(hterms, kterms, dterms):
    h = FpPoly(2, U2_VARS, hterms)
    k = FpPoly(2, U2_VARS, kterms)
    d = FpPoly(2, U2_VARS, dterms)
    if h.is_zero() or d.is_zero() or reduces_to_zero(d, F):
        return
    # hide the square by adding a multiple of f to the numerator
    g = FpRational(h ** 2 + F * k, d ** 2)
    r = fn_field_pth_root(g, CH)
    assert r is not None
    assert reduces_to_zero((r ** 2 - g).num, F)
    assert reduces_to_zero((r - FpRational(h, d)).num, F)


@settings(max_examples=200)
@given(small)
def test_non_squares_rejected(hterms):
    h = FpPoly(2, U2_VARS, hterms)
    x = FpPoly.gen(2, U2_VARS, "x")
    g = FpRational(h ** 2 * x)
    if h.is_zero() or reduces_to_zero(h, F):
        return
    # x is a uniformizer-like non-square: dx != 0 on the curve
    assert fn_field_pth_root(g, CH) is None


def test_inconclusive_is_an_error_type():
    assert issubclass(InconclusiveError, RuntimeError)
    X, Y, Z = FpPoly.gens(2, PROJECTIVE)
    assert PlaneCurveFamily.custom(2, 2, 1, X ** 3 * Y + Y ** 4 + X * Z ** 3).degree == 4
