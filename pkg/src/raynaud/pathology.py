"""Surface-level certifiers for base points of adjoint bundles and for strong non-vanishing.

Naming: ``twist_q`` is the integer q of ``m = l q + r``; ``frobenius_P`` is
``p^n``, the quantity written q in the closed-form obstruction degree.
"""

from __future__ import annotations

import functools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .algebra import is_prime
from .certificate import Certificate, Check, Status, evaluate_claim, jnum
from .curve import DivisorOnC, Point
from .picard import (
    PicX,
    RaynaudParams,
    S_tilde,
    T_tilde,
    fibre,
    intersection,
    module_action_table,
    push_H_neg,
    r1_decomposition,
    r1_dual_decomposition,
    r1_sub_bundle,
)
from .tango import build_quotient_bundle, build_standard_datum, certify_tango, transition_with_beta

DEFAULT_BUDGET = 64
GENERIC_POINT = Point("P")


# ---------------------------------------------------------------------------
# obstruction degree


def obstruction_degree_ledger(p: int, n: int, k: int) -> int:
    """deg omega_C - (p^n - 2) deg L0 - (2p^n + 1) deg N with e = k(p^n + 1), l = p^n + 1, d = 1."""
    P = p ** n
    e = k * (P + 1)
    delta = P * e
    deg_omega = delta * (delta - 3)
    deg_L0 = e * (delta - 3) + e
    deg_N = k * (delta - 3)
    return deg_omega - (P - 1 - 1) * deg_L0 - (P + P + 1) * deg_N


def obstruction_degree_closed(p: int, n: int, k: int) -> int:
    """k(P(P+1)k - 3 - (P-2)(P+1)) with P = p^n."""
    P = p ** n
    return k * (P * (P + 1) * k - 3 - (P - 2) * (P + 1))


def obstruction_degree(p: int, n: int, k: int) -> int:
    """deg of omega_C (x) L0^{-(p^n-1-d)}(-(p^n+l)N), computed by two routes that must agree."""
    if k < 1 or n < 1:
        raise ValueError("n and k must be positive")
    if p ** n * k * (p ** n + 1) <= 3:
        raise ValueError("p^n e must exceed 3")
    a = obstruction_degree_ledger(p, n, k)
    b = obstruction_degree_closed(p, n, k)
    if a != b:
        raise ArithmeticError(f"obstruction degree routes disagree at {(p, n, k)}: ledger {a}, closed form {b}")
    return a


# ---------------------------------------------------------------------------
# base points


@functools.lru_cache(maxsize=64)
def _tango_bundle(p: int, n: int, e: int):
    datum = build_standard_datum(p, n, e)
    tango = certify_tango(datum)
    qb = None
    if tango.status == Status.PASS:
        qb = build_quotient_bundle(datum, transition_with_beta(datum))
    return datum, tango, qb


def _status_check(id: str, cert: Certificate, anchor: str) -> Check:
    return Check(id, cert.status, {"claim": "status", "status": cert.status.value,
                                   "certificate": cert.to_dict()}, anchor)


def certify_base_point(P: RaynaudParams, m: int, Qdiv: DivisorOnC, mode: str = "adjoint") -> Certificate:
    """Verify the hypotheses giving a base point on phi^{-1}(P) and T~.

    ``mode="ample"``: the bundle is ``m S~ + phi^*(Qdiv + P)`` with ``m = lq + r``.
    ``mode="adjoint"``: ``m`` is the adjoint multiple r, the bundle is
    ``K_X + r S~ + phi^*(Qdiv + P)``, so the S~-coefficient is
    ``l(p^n - 1 - d) + r`` and the twist becomes ``(p^n + l)N + Qdiv``.
    """
    if mode not in ("ample", "adjoint"):
        raise ValueError("mode must be 'ample' or 'adjoint'")
    if m < 1:
        raise ValueError("m must be positive")
    if Qdiv.degree < 1:
        raise ValueError("Qdiv must have positive degree")
    Pn = P.P
    if mode == "adjoint":
        if m >= P.l:
            raise ValueError(f"adjoint multiple r = {m} must be < l = {P.l}")
        twist_q = Pn - 1 - P.d
        total_m = P.l * twist_q + m
        Qtot = P.N * (Pn + P.l) + Qdiv
    else:
        total_m = m
        twist_q = m // P.l
        Qtot = Qdiv
    family = dict(P.describe(), mode=mode, m=m, total_m=total_m, twist_q=twist_q, Qdiv=Qdiv.to_json())
    cert = Certificate(family)

    datum, tango, qb = _tango_bundle(P.p, P.n, P.e)
    cert.add(_status_check("i_tango", tango, "base curve is n-Tango data: conditions (1) and (2)"))
    if qb is None:
        cert.add(Check("ii_L0", Status.FAIL, {"claim": "status", "status": "FAIL", "reason": "beta unavailable"},
                       "L0 = L(D0) with h0(E^dual (x) L0) >= 2"))
        return cert.conclude("hypotheses not met: the base curve is not certified as n-Tango")
    deg_L = datum.D.degree
    deg_L0 = qb.deg_L0
    cert.add(Check.evaluated("ii_L0", {
        "claim": "all", "statuses": [
            "PASS" if qb.D0.is_effective() else "FAIL",
            "PASS" if qb.saturated else "FAIL",
            "PASS" if qb.h0_lower_bound >= 2 else "FAIL"],
        "D0": qb.D0.to_json(), "a_inf": qb.a_inf, "b_inf": qb.b_inf, "deg_L0": deg_L0,
        "saturation": qb.saturation, "h0_lower_bound": qb.h0_lower_bound},
        "D0 = -min(v(beta), v(alpha), 0) inf effective, (gamma alpha, gamma beta) = 1 at inf, "
        "h0(E(D0)) >= h0(O(D0)) + 1 >= 2"))

    KC = DivisorOnC.at_infinity(2 * P.genus - 2)
    L0 = datum.D + qb.D0
    W = KC - L0 * twist_q - Qtot
    deg_w = KC.degree
    # q deg L0 <= deg omega - deg Q < p^n deg L <= p^n deg L0 forces q < p^n
    chain = [
        {"claim": "le", "lhs": twist_q * deg_L0, "rhs": deg_w - Qtot.degree, "step": "q deg L0 <= deg W_0 - deg Q"},
        {"claim": "lt", "lhs": deg_w - Qtot.degree, "rhs": Pn * deg_L, "step": "deg omega - deg Q < p^n deg L"},
        {"claim": "le", "lhs": Pn * deg_L, "rhs": Pn * deg_L0, "step": "deg L <= deg L0"},
        {"claim": "lt", "lhs": twist_q, "rhs": Pn, "step": "q < p^n"},
    ]
    statuses = [evaluate_claim(c).value for c in chain]
    cert.add(Check.evaluated("iii_q_lt_pn", {"claim": "all", "statuses": statuses, "chain": chain},
                             "q < p^n from deg L0 >= deg L and the degree of condition (2)"))

    label = "omega_C (x) L0^-(p^n-1-d)(-(p^n+l)N - Q)" if mode == "adjoint" \
        else "omega_C (x) L0^-q(-Q)"
    cert.add(Check.evaluated("iv_effective", {"claim": "effective", "divisor": W.to_json(), "min": 0,
                                              "degree": W.degree},
                             f"{label} is effective, so it has a nonzero section"))

    table = module_action_table(total_m, P)
    rows = [{"i": row.i, "twist": row.twist, "class": row.twist_class.to_json()} for row in table]
    cert.add(Check.evaluated("v_module_action", {
        "claim": "all", "statuses": ["PASS" if row.vanishes_on_T else "FAIL" for row in table], "rows": rows},
        "summands M_i, i >= 1, reach M_0 only through O(-S-T) or O(-T)"))

    notes = []
    if mode == "adjoint":
        notes.append(f"K_X + {m} S~ = {total_m} S~ + phi^*({(P.N * (Pn + P.l))}); twist q = p^n - 1 - d = {twist_q}")
    bundle = (f"K_X + {m} S~ + phi^*(Q + P)" if mode == "adjoint" else f"{m} S~ + phi^*(Q + P)")
    stmt = (f"phi^-1(P) meets T~ in a base point of {bundle} for generic P"
            if cert.status == Status.PASS else f"base point on T~ for {bundle} not certified")
    return cert.conclude(stmt, notes)


# ---------------------------------------------------------------------------
# Fujita search


@dataclass(frozen=True)
class FujitaParams:
    r: int
    p: int
    n: int
    k: int
    obstruction: int
    Qdiv: DivisorOnC
    P: Point = GENERIC_POINT

    @property
    def frobenius_P(self) -> int:
        return self.p ** self.n

    @property
    def l(self) -> int:
        return self.frobenius_P + 1

    @property
    def e(self) -> int:
        return self.k * self.l

    @property
    def d(self) -> int:
        return 1

    @property
    def delta(self) -> int:
        return self.frobenius_P * self.e

    @property
    def twist_q(self) -> int:
        return self.frobenius_P - 1 - self.d

    @property
    def raynaud(self) -> RaynaudParams:
        return RaynaudParams(self.p, self.n, self.e, self.l)

    @property
    def rQ0(self) -> DivisorOnC:
        """Q + P = r Q0."""
        return self.Qdiv + DivisorOnC.point(self.P)

    def describe(self) -> dict:
        return {"r": self.r, "p": self.p, "n": self.n, "k": self.k, "l": self.l, "e": self.e, "d": self.d,
                "degree": self.delta, "obstruction": self.obstruction, "twist_q": self.twist_q,
                "frobenius_P": self.frobenius_P, "Qdiv": self.Qdiv.to_json(), "rQ0": self.rQ0.to_json()}


def _primes(limit: int) -> List[int]:
    return [p for p in range(2, limit + 1) if is_prime(p)]


def fujita_candidates(budget: int = DEFAULT_BUDGET):
    """(degree, p, n, k) with curve degree p^n (p^n + 1) k <= budget, cheapest first."""
    out = []
    for p in _primes(budget):
        n = 1
        while p ** n * (p ** n + 1) <= budget:
            P = p ** n
            k = 1
            while P * (P + 1) * k <= budget:
                out.append((P * (P + 1) * k, p, n, k))
                k += 1
            n += 1
    return sorted(out)


def choose_fujita(r: int, budget: int = DEFAULT_BUDGET) -> FujitaParams:
    if r < 1:
        raise ValueError("r must be positive")
    for _, p, n, k in fujita_candidates(budget):
        if p ** n + 1 <= r:
            continue
        ob = obstruction_degree(p, n, k)
        if ob <= r:
            continue
        Qdiv = DivisorOnC.at_infinity(r - 1 if r >= 2 else 1)
        return FujitaParams(r, p, n, k, ob, Qdiv)
    raise ValueError(f"no desk-scale witness for r = {r} within curve-degree budget {budget}: "
                     f"l = p^n + 1 > {r} forces p^n >= {r} and curve degree p^n(p^n + 1)k")


def positivity_witness(F: FujitaParams) -> dict:
    """Numerical positivity of A = S~ + phi^* Q0, computed from the integral class rA."""
    P = F.raynaud
    rA = PicX(F.r, F.rQ0)
    r2 = Fraction(F.r * F.r)
    vals = {
        "A.A": intersection(rA, rA, P) / r2,
        "A.S~": intersection(rA, S_tilde(), P) / F.r,
        "A.T~": intersection(rA, T_tilde(P), P) / F.r,
        "A.F": intersection(rA, fibre(), P) / F.r,
    }
    return {"claim": "all", "statuses": ["PASS" if v > 0 else "FAIL" for v in vals.values()],
            "values": {k: jnum(v) for k, v in vals.items()}, "rA": rA.to_json()}


def fujita_search(r: int, budget: int = DEFAULT_BUDGET) -> Tuple[FujitaParams, Certificate]:
    """Smallest-degree surface whose adjoint system |K_X + r A| has a base point."""
    F = choose_fujita(r, budget)
    cert = certify_base_point(F.raynaud, r, F.Qdiv, mode="adjoint")
    cert.family.update({"search": F.describe(), "budget": budget})
    cert.add(Check.evaluated("l_gt_r", {"claim": "gt", "lhs": F.l, "rhs": r}, "l = p^n + 1 > r"))
    cert.add(Check.evaluated("obstruction_gt_r", {
        "claim": "gt", "lhs": F.obstruction, "rhs": r,
        "ledger": obstruction_degree_ledger(F.p, F.n, F.k), "closed": obstruction_degree_closed(F.p, F.n, F.k)},
        "k(P(P+1)k - 3 - (P-2)(P+1)) > r with P = p^n"))
    cert.add(Check.evaluated("A_numerically_positive", positivity_witness(F),
                             "A^2, A.S~, A.T~, A.F > 0 (supporting; ampleness itself is cited)"))
    notes = list(cert.conclusion.get("notes", []))
    if r == 1:
        notes.append("Q = (r-1) inf has degree 0 at r = 1; Q = inf is used so that deg Q > 0")
    notes.append(f"Q + P = {F.rQ0} = r Q0 with deg Q0 = {Fraction(F.rQ0.degree, r)}; A = S~ + phi^* Q0")
    stmt = (f"|K_X + {r} A| has a base point on phi^-1(P) and T~ for generic P "
            f"(p, n, k) = ({F.p}, {F.n}, {F.k}), curve degree {F.delta}"
            if cert.status == Status.PASS else f"Fujita counterexample for r = {r} not certified")
    cert.conclude(stmt, notes)
    return F, cert


def fujita_many(rs: Sequence[int], budget: int = DEFAULT_BUDGET, jobs: int = 1):
    """Run several searches; results keep the input order.  Failures are returned as exceptions."""
    def one(r):
        try:
            return fujita_search(r, budget)
        except ValueError as exc:
            return exc
    if jobs <= 1:
        return [one(r) for r in rs]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, rs))


# ---------------------------------------------------------------------------
# strong non-vanishing


def nonvanishing_params(m: int, p: int, k: Optional[int] = None, k_max: int = 64) -> RaynaudParams:
    """n = m, l = p^m + 1, e = kl with the smallest k giving deg N = k(p^n e - 3) > p^m."""
    if m < 1:
        raise ValueError("m must be positive")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    n, l, pm = m, p ** m + 1, p ** m
    if (p ** n + 1) % l:
        raise ValueError("l does not divide p^n + 1")
    candidates = [k] if k is not None else range(1, k_max + 1)
    for kk in candidates:
        P = RaynaudParams(p, n, kk * l, l)
        if P.deg_N > pm:
            return P
    raise ValueError(f"no k <= {k_max} gives deg N > p^m" if k is None else f"k = {k} gives deg N <= p^m")


def certify_nonvanishing(m: int, p: int, k: Optional[int] = None) -> Certificate:
    """H^1(X, H^{-p^m}) != 0 for H = O(S~ + phi^* inf) on an m-Raynaud surface."""
    P = nonvanishing_params(m, p, k)
    pm = p ** m
    Q = DivisorOnC.at_infinity(1)
    cert = Certificate(dict(P.describe(), m=m, k=P.k, **{"p^m": pm}, Q=Q.to_json()))

    _, tango, _ = _tango_bundle(P.p, P.n, P.e)
    cert.add(_status_check("tango_base", tango, "base curve is n-Tango data"))
    cert.add(Check.evaluated("l_divides", {"claim": "divides", "divisor": P.l, "dividend": P.P + 1,
                                           "also": {"divisor": P.l, "dividend": P.D.degree}},
                             "l = p^m + 1 divides p^n + 1 (n = m)"))

    pushed = push_H_neg(pm, Q, P)
    cert.add(Check.evaluated("phi_push_vanishes", {
        "claim": "all_negative", "values": [t.j for t in pushed.terms],
        "terms": [t.to_json() for t in pushed.terms]},
        "phi_* H^-p^m = 0: every Sym exponent is negative"))

    dual = r1_dual_decomposition(pm, Q, P)
    r1 = dual.dual()
    sub = r1_sub_bundle(pm, Q, P)
    cert.add(Check.evaluated("r1_sub_bundle", {
        "claim": "effective", "divisor": sub.to_json(), "min": 1,
        "dual_terms": [t.to_json() for t in dual.terms], "r1_terms": [t.to_json() for t in r1.terms],
        "quotient_of_dual": (-sub).to_json()},
        "R^1 phi_* H^-p^m contains O((1 - lq)N - p^m Q) with N - p^m Q > 0"))

    H = PicX(1, Q)
    vals = {"H.H": intersection(H, H, P), "H.S~": intersection(H, S_tilde(), P),
            "H.T~": intersection(H, T_tilde(P), P), "H.F": intersection(H, fibre(), P)}
    cert.add(Check.evaluated("H_numerically_positive", {
        "claim": "all", "statuses": ["PASS" if v > 0 else "FAIL" for v in vals.values()],
        "values": {k2: jnum(v) for k2, v in vals.items()}},
        "H = S~ + phi^* Q is numerically positive (supporting; ampleness is cited)"))
    notes = [
        "Leray: 0 -> H^1(C, phi_* H^-p^m) -> H^1(X, H^-p^m) -> H^0(C, R^1) -> 0 with the left term zero",
        "the statement certified is H^1 != 0; the theorem as printed says H^0, which its proof does not compute",
        f"R^1 phi_* H^-{pm} = {r1}",
    ]
    stmt = (f"H^1(X, H^-{pm}) = H^0(C, R^1 phi_* H^-{pm}) != 0"
            if cert.status == Status.PASS else "strong non-vanishing not certified")
    return cert.conclude(stmt, notes)


def r1_for(m: int, p: int, k: Optional[int] = None):
    """The R^1 decomposition used by :func:`certify_nonvanishing`."""
    P = nonvanishing_params(m, p, k)
    return r1_decomposition(p ** m, DivisorOnC.at_infinity(1), P)
