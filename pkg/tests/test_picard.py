from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import CANONICAL, NONVANISHING, PUSH_NEG_4
from raynaud.curve import DivisorOnC, Point
from raynaud.picard import (
    PicPE,
    PicX,
    RaynaudParams,
    S_class,
    S_tilde,
    T_class,
    T_tilde,
    adjoint_decomposition,
    canonical_class,
    fibre,
    intersection,
    intersection_PE,
    module_action_table,
    psi_pullback,
    push_H_neg,
    push_psi_neg,
    push_psi_pos,
    r1_decomposition,
    r1_dual_decomposition,
    r1_sub_bundle,
    relative_canonical_class,
    valid_grid,
)

GRID = list(valid_grid(64))
BY_L = {2: RaynaudParams(3, 1, 2, 2), 3: RaynaudParams(2, 1, 3, 3), 5: RaynaudParams(2, 2, 5, 5)}
INF = DivisorOnC.at_infinity


def test_grid_size_and_validation():
    assert len(GRID) == 220
    with pytest.raises(ValueError, match="does not divide p\\^n \\+ 1"):
        RaynaudParams(2, 1, 3, 2)
    with pytest.raises(ValueError, match="does not divide D"):
        RaynaudParams(2, 2, 1, 5)


def test_example_213():
    P = BY_L[3]
    assert (P.d, P.N, P.genus) == (1, INF(3), 10)
    assert intersection(S_tilde(), S_tilde(), P) == 3
    assert intersection(S_tilde(), T_tilde(P), P) == 0
    assert [c.to_json() for c in push_psi_neg(4, P)] == [[h, b] for h, b in PUSH_NEG_4]


@pytest.mark.parametrize("key", sorted(CANONICAL))
def test_canonical_class(key):
    a, base = CANONICAL[key]
    assert canonical_class(RaynaudParams(*key)) == PicX(a, DivisorOnC.from_json(base))


def test_relations_on_whole_grid():
    for P in GRID:
        S, T = S_tilde(), T_tilde(P)
        assert intersection(S, S, P) == P.deg_N
        assert intersection(S, T, P) == 0
        assert intersection(T, T, P) == -P.P * P.P * P.deg_N
        # T pulls back to l T~ and S to l S~
        assert psi_pullback(T_class(P), P) == T * P.l
        assert psi_pullback(S_class(), P) == S * P.l
        # adjunction on the two sections, both isomorphic to C
        K = canonical_class(P)
        assert intersection(K + S, S, P) == 2 * P.genus - 2
        assert intersection(K + T, T, P) == 2 * P.genus - 2
        assert relative_canonical_class(P) + PicX(0, P.D * P.P) == K
        # S and T are disjoint on P(E) as well
        assert intersection_PE(S_class(), T_class(P), P) == 0


def test_inconsistent_parameters_detected():
    P = RaynaudParams(2, 1, 3, 3, D=INF(6))
    with pytest.raises(ValueError, match="inconsistent Raynaud parameters"):
        intersection(S_tilde(), S_tilde(), P)


@pytest.mark.parametrize("l", [2, 3, 5])
def test_twist_compatibility(l):
    P = BY_L[l]
    S = PicPE(1)
    for m in range(0, 3 * l + 1):
        assert push_psi_pos(m + l, P) == [c + S for c in push_psi_pos(m, P)]
        assert push_psi_neg(m + l, P) == [c - S for c in push_psi_neg(m, P)]
        assert len(push_psi_pos(m, P)) == l


@pytest.mark.parametrize("l", [2, 3, 5])
def test_adjoint_decomposition_matches(l):
    P = BY_L[l]
    Q = DivisorOnC.point(Point("Q"), 2) + INF(1)
    for m in range(1, 13):
        assert adjoint_decomposition(m, Q, P) == [c.twist(Q) for c in push_psi_pos(m, P)]


def test_module_action_table():
    P = BY_L[3]
    assert [(r.i, r.twist) for r in module_action_table(1, P)] == [(1, "-S-T"), (2, "-T")]
    assert all(r.vanishes_on_T for m in range(1, 10) for r in module_action_table(m, P))


def test_r1_for_m1_p2():
    P = RaynaudParams(2, 1, 3, 3)
    dual = r1_dual_decomposition(2, INF(1), P)
    assert str(dual) == "O(-1*inf) + O(5*inf)"
    assert str(r1_decomposition(2, INF(1), P)) == NONVANISHING[(1, 2)]
    assert r1_sub_bundle(2, INF(1), P) == INF(1)
    pushed = push_H_neg(2, INF(1), P)
    assert pushed.is_zero() and len(pushed.dropped) == 3


def test_sheaf_rank_and_degree_duality():
    P = RaynaudParams(2, 2, 5, 5)
    dual = r1_dual_decomposition(4, INF(1), P)
    assert dual.dual().rank() == dual.rank()
    assert dual.dual().degree() == -dual.degree()


# ---------------------------------------------------------------------------
# bilinearity of the intersection form

classes = st.tuples(st.integers(-6, 6), st.integers(-30, 30)).map(lambda t: PicX(t[0], INF(t[1])))


@settings(max_examples=1000)
@given(st.sampled_from(GRID), classes, classes, classes, st.integers(-4, 4))
def test_intersection_bilinear_symmetric(P, A, B, C, k):
    assert intersection(A, B, P) == intersection(B, A, P)
    assert intersection(A + B, C, P) == intersection(A, C, P) + intersection(B, C, P)
    assert intersection(A * k, B, P) == k * intersection(A, B, P)
    assert intersection(fibre(), fibre(), P) == 0
    assert intersection(S_tilde(), fibre(), P) == 1
    assert isinstance(intersection(A, B, P), Fraction)
