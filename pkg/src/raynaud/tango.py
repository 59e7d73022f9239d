"""n-Tango data: the two Tango conditions, transition data and the quotient bundle.

A triple ``(C, f, D)`` is n-Tango data when ``(df) = p^n D`` with ``deg D > 0``
(condition 1) and the transition constant ``gamma`` of the relation
``z1 = alpha^(p^n) z2 + gamma`` has a ``p^n``-th root ``beta`` regular on the
overlap of the two charts (condition 2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .algebra import FpPoly, FpRational, iter_monomials, p_th_root, parse_poly, parse_rational, solve_linear_fp
from .certificate import Certificate, Check, InconclusiveError, Status, claim
from .curve import (
    INFINITY,
    PROJECTIVE,
    U2_VARS,
    Chart,
    DivisorOnC,
    PlaneCurveFamily,
    chart,
    curve_witness,
    differential_valuation_at_infinity,
    generates_omega_on_chart,
    genus,
    line_intersection_at_X0,
    smoothness_certify,
    valuation_at_infinity,
    with_precision,
)


@dataclass(frozen=True)
class TangoDatum:
    """The triple ``(C, f, D)`` at level n, with ``L = O(D)``."""

    curve: PlaneCurveFamily
    f: FpRational
    n: int
    D: DivisorOnC
    declared: Optional[Tuple[str, str, str]] = None  # (z2, alpha, gamma) for custom families

    def __post_init__(self):
        if self.D.degree <= 0:
            raise ValueError("deg D <= 0, not a Tango datum")
        g = genus(self.curve)
        if self.curve.p ** self.n * self.D.degree != 2 * g - 2:
            raise ValueError(f"p^n deg D = {self.curve.p ** self.n * self.D.degree} != 2g-2 = {2 * g - 2}")

    @property
    def p(self) -> int:
        return self.curve.p

    @property
    def L(self) -> str:
        return f"O({self.D})"

    def describe(self) -> dict:
        return dict(self.curve.describe(), f=str(self.f), D=self.D.to_json(), level=self.n)


@dataclass(frozen=True)
class TransitionData:
    alpha: FpRational
    gamma: FpRational
    z2: FpRational
    residual: FpPoly
    beta: Optional[FpRational] = None

    def to_json(self) -> dict:
        d = {"alpha": str(self.alpha), "gamma": str(self.gamma), "z2": str(self.z2),
             "residual": str(self.residual)}
        if self.beta is not None:
            d["beta"] = str(self.beta)
        return d


@dataclass(frozen=True)
class QuotientBundleData:
    D0: DivisorOnC
    deg_L0: int
    h0_lower_bound: int
    a_inf: int
    b_inf: int
    saturation: Dict[str, int] = field(default_factory=dict)

    @property
    def L0(self) -> str:
        return f"L(D0) = O(D + {self.D0})"

    @property
    def saturated(self) -> bool:
        return self.saturation.get("min", 1) == 0


# ---------------------------------------------------------------------------
# construction


def build_standard_datum(p: int, n: int, e: int, shape: Optional[FpPoly] = None) -> TangoDatum:
    """The standard family with ``f = z1`` and ``D = e(p^n e - 3) inf``."""
    if p ** n * e <= 3:
        raise ValueError("deg D <= 0, not a Tango datum (p^n e <= 3)")
    C = PlaneCurveFamily.standard(p, n, e, shape)
    return _datum(C, n, DivisorOnC.at_infinity(e * (C.degree - 3)))


def build_custom_datum(C: PlaneCurveFamily, D: Optional[DivisorOnC] = None,
                       declared: Optional[Tuple[str, str, str]] = None) -> TangoDatum:
    """A datum on a custom curve; the transition is either declared or derived for Tango-shaped F."""
    if D is None:
        if C.degree <= 3:
            raise ValueError("deg D <= 0, not a Tango datum (p^n e <= 3)")
        D = DivisorOnC.at_infinity(C.e * (C.degree - 3))
    return _datum(C, C.n, D, declared)


def _datum(C, n, D, declared=None) -> TangoDatum:
    x = FpPoly.gen(C.p, U2_VARS, "x")
    return TangoDatum(C, FpRational(FpPoly.constant(C.p, U2_VARS, 1), x), n, D, declared)


def non_tango_fixture(p: int = 2) -> PlaneCurveFamily:
    """The degree-p^2 curve X^(p^2-p) Y^p + Y^(p^2) - X^(p^2-1) Y = Z^(p^2-1) X."""
    q = p * p
    X, Y, Z = FpPoly.gens(p, PROJECTIVE)
    F = X ** (q - p) * Y ** p + Y ** q - X ** (q - 1) * Y - Z ** (q - 1) * X
    return PlaneCurveFamily.custom(p, 2, 1, F, label=f"non-Tango fixture p={p}")


def fixture_datum(name: str, p: int) -> TangoDatum:
    """Named fixtures: ``2.3`` is the standard family at (p, 1, 3); ``2.4`` is the non-Tango curve."""
    if name == "2.3":
        return build_standard_datum(p, 1, 3)
    if name == "2.4":
        return build_custom_datum(non_tango_fixture(p))
    raise ValueError(f"unknown fixture {name!r}; expected 2.3 or 2.4")


# ---------------------------------------------------------------------------
# transition data


def tango_shape(C: PlaneCurveFamily) -> Optional[FpPoly]:
    """G(x, y) when F = G(X, Y) - X^(d-1) Y - Z^(d-1) X, else None."""
    d = C.degree
    X, Y, Z = FpPoly.gens(C.p, PROJECTIVE)
    G = C.F + X ** (d - 1) * Y + Z ** (d - 1) * X
    if G.involves("Z"):
        return None
    return FpPoly(C.p, U2_VARS, {(a, b): c for (a, b, _), c in G.terms.items()})


def reduces_to_zero(h: FpPoly, f: FpPoly) -> bool:
    """h vanishes on the irreducible curve f = 0."""
    var = "x" if f.degree("x") > 0 else "y"
    return h.prem(f, var).is_zero()


def _residual(datum: TangoDatum, alpha: FpRational, gamma: FpRational, z2: FpRational) -> FpPoly:
    q = datum.p ** datum.n
    diff = datum.f - alpha ** q * z2 - gamma
    f = chart(datum.curve, "U2").equation
    return diff.num.prem(f, "x" if f.degree("x") > 0 else "y")


def extract_transition(datum: TangoDatum) -> TransitionData:
    """Transition data ``(alpha, gamma)`` with ``z1 = alpha^(p^n) z2 + gamma`` on the curve."""
    C = datum.curve
    p, d = C.p, C.degree
    if datum.declared is not None:
        z2, alpha, gamma = (parse_rational(s, p, U2_VARS) for s in datum.declared)
    else:
        G = tango_shape(C)
        if G is None:
            raise ValueError("custom curve is not Tango-shaped; declare z2, alpha and gamma")
        x, y = FpPoly.gens(p, U2_VARS)
        one = FpPoly.constant(p, U2_VARS, 1)
        # alpha^q = y^(d(d-3)) so alpha = y^(e(d-3)) = y^(deg D)
        alpha = FpRational(y ** datum.D.degree)
        z2 = FpRational(x ** (d - 2) * y, G * y ** (d * (d - 3)))
        gamma = FpRational(one, G)
    res = _residual(datum, alpha, gamma, z2)
    if not res.is_zero():
        raise ValueError(f"transition identity fails; residual modulo the chart equation: {res}")
    return TransitionData(alpha, gamma, z2, res)


# ---------------------------------------------------------------------------
# p-th roots in the function field


def _homogenize(ch: Chart) -> FpPoly:
    f = ch.equation
    d = f.degree()
    i = PROJECTIVE.index(ch.unit)
    terms = {}
    for (a, b), c in f.terms.items():
        e = [0, 0, 0]
        others = [j for j in range(3) if j != i]
        e[others[0]], e[others[1]] = a, b
        e[i] = d - a - b
        terms[tuple(e)] = c
    return FpPoly(f.p, PROJECTIVE, terms)


def _require_irreducible(ch: Chart):
    cert = smoothness_certify(_homogenize(ch))
    if cert.status == Status.INCONCLUSIVE:
        raise InconclusiveError("irreducibility of the chart equation could not be certified")
    if cert.status == Status.FAIL:
        raise ValueError("chart equation defines a singular curve; smooth-implies-irreducible does not apply")


def differential_residual(g: FpRational, f: FpPoly) -> FpPoly:
    """Numerator of dg / d(param) reduced modulo f; zero iff dg = 0 on the curve."""
    u, v = f.variables
    fu, fv = f.derivative(u), f.derivative(v)
    nu = g.num.derivative(u) * g.den - g.num * g.den.derivative(u)
    nv = g.num.derivative(v) * g.den - g.num * g.den.derivative(v)
    if not fu.is_zero():
        P = nv * fu - nu * fv
    elif not fv.is_zero():
        P = nu * fv - nv * fu
    else:
        raise ValueError("both partials of the chart equation vanish; it is a p-th power")
    return P.prem(f, u if f.degree(u) > 0 else v)


def fn_field_pth_root(g: FpRational, ch: Chart) -> Optional[FpRational]:
    """A p-th root of g in the function field of the chart curve, or None if g is not a p-th power.

    The test is ``dg = 0`` on the curve.  When it passes the root ``h/v`` with
    ``v = den(g)`` is found by solving ``h^p = num(g) v^(p-1) mod f``, which is
    F_p-linear in the coefficients of h.
    """
    f = ch.equation
    p = f.p
    if g.variables != f.variables:
        raise ValueError(f"g must be in the chart variables {f.variables}")
    a, b = p_th_root(g.num), p_th_root(g.den)
    if a is not None and b is not None:
        return FpRational(a, b)
    _require_irreducible(ch)
    if not differential_residual(g, f).is_zero():
        return None
    # h = root * v is regular on the smooth affine chart, hence a polynomial
    w = g.num * g.den ** (p - 1)
    base = -(-w.degree() // p)
    cap = base + 2 * f.degree()
    for dh in range(base, cap + 1):
        h = _solve_pth_power(w, f, dh)
        if h is not None:
            break
    else:
        raise ValueError(f"root extraction overflowed the degree bound deg h <= {cap}")
    root = FpRational(h, g.den)
    assert reduces_to_zero((root ** p - g).num, f), "p-th root roundtrip failed"
    return root


def _solve_pth_power(w: FpPoly, f: FpPoly, dh: int) -> Optional[FpPoly]:
    """h with deg h <= dh and h^p = w mod f, by linear algebra over F_p, or None."""
    p = f.p
    h_basis = list(iter_monomials(2, dh))
    dk = max(p * dh, w.degree()) - f.degree()
    k_basis = list(iter_monomials(2, max(dk, 0)))
    columns: List[Dict[tuple, int]] = [{(a * p, b * p): 1} for a, b in h_basis]
    for e in k_basis:
        columns.append({(e[0] + fe[0], e[1] + fe[1]): (-c) % p for fe, c in f.terms.items()})
    rows = sorted({m for col in columns for m in col} | set(w.terms))
    index = {m: i for i, m in enumerate(rows)}
    A = [[0] * len(columns) for _ in rows]
    for j, col in enumerate(columns):
        for m, c in col.items():
            A[index[m]][j] = c
    rhs = [0] * len(rows)
    for m, c in w.terms.items():
        rhs[index[m]] = c
    sol = solve_linear_fp(A, rhs, p)
    if sol is None:
        return None
    return FpPoly(p, f.variables, {e: c for e, c in zip(h_basis, sol) if c})


@claim("pth_root")
def _claim_pth_root(w):
    f = parse_poly(w["f"], w["p"], w["variables"])
    g = parse_rational(w["g"], w["p"], w["variables"])
    r = parse_rational(w["root"], w["p"], w["variables"])
    return Status.PASS if reduces_to_zero((r ** w["p"] - g).num, f) else Status.FAIL


@claim("dg_vanishes")
def _claim_dg_vanishes(w):
    """PASS iff dg = 0 on the curve, the necessary condition for a p-th root."""
    f = parse_poly(w["f"], w["p"], w["variables"])
    g = parse_rational(w["g"], w["p"], w["variables"])
    return Status.PASS if differential_residual(g, f).is_zero() else Status.FAIL


@claim("identity_mod")
def _claim_identity_mod(w):
    """lhs - rhs vanishes on the curve f = 0."""
    vs = w["variables"]
    f = parse_poly(w["f"], w["p"], vs)
    lhs = parse_rational(w["lhs"], w["p"], vs)
    rhs = FpRational(FpPoly.zero(w["p"], vs))
    for part in w["rhs"]:
        term = FpRational(FpPoly.constant(w["p"], vs, 1))
        for factor in part:
            if isinstance(factor, list):
                term = term * parse_rational(factor[0], w["p"], vs) ** int(factor[1])
            else:
                term = term * parse_rational(factor, w["p"], vs)
        rhs = rhs + term
    return Status.PASS if reduces_to_zero((lhs - rhs).num, f) else Status.FAIL


@claim("finite_locus")
def _claim_finite_locus(w):
    f = parse_poly(w["f"], w["p"], U2_VARS)
    h = parse_poly(w["poly"], w["p"], U2_VARS)
    return Status.FAIL if h.is_zero() or reduces_to_zero(h, f) else Status.PASS


# ---------------------------------------------------------------------------
# certificates


def _valuation_check(id, datum, g, expected, anchor, differential=False):
    fn = differential_valuation_at_infinity if differential else valuation_at_infinity
    v, T = with_precision(datum.curve, lambda s: fn(g, s))
    w = {"claim": "valuation_at_infinity", **curve_witness(datum.curve), "g": str(g), "T": T,
         "differential": differential, "expected": expected, "value": v}
    if v is None:
        return Check(id, Status.INCONCLUSIVE, dict(w, claim="inconclusive", reason="precision cap reached"), anchor), None
    return Check(id, Status.PASS if v == expected else Status.FAIL, w, anchor), v


def certify_condition1(datum: TangoDatum) -> Certificate:
    """Certify ``(df) = p^n D`` for ``f = z1`` with D supported at infinity."""
    C = datum.curve
    q = datum.p ** datum.n
    cert = Certificate(datum.describe())
    smooth = smoothness_certify(C)
    cert.add(Check("smooth", smooth.status, {"claim": "status", "status": smooth.status.value,
                                             "certificate": smooth.to_dict()}, "C is a smooth plane curve"))
    meet = line_intersection_at_X0(C)
    only_inf = [[str(pt), m] for pt, m in meet]
    cert.add(Check.evaluated("line_X0_meets_only_inf",
                             {"claim": "eq", "lhs": only_inf, "rhs": [[str(INFINITY), C.degree]]},
                             "C meets X = 0 only at inf, with multiplicity p^n e"))
    gen = generates_omega_on_chart(C, chart(C, "U1"), "z1")
    cert.add(Check("dz1_generates_on_U1", gen.status, {"claim": "status", "status": gen.status.value,
                                                       "certificate": gen.to_dict()},
                   "dz1 has no zeros or poles on U1 = C minus inf"))
    g = genus(C) if smooth.status == Status.PASS else None
    chk, v = _valuation_check("v_inf_dz1", datum, datum.f, q * datum.D.coefficient(INFINITY),
                              "v_inf(dz1) = p^n * coeff_inf(D)", differential=True)
    cert.add(chk)
    cert.add(Check.evaluated("deg_D_positive", {"claim": "gt", "lhs": datum.D.degree, "rhs": 0}, "deg D > 0"))
    if g is not None:
        cert.add(Check.evaluated("degree_identity", {"claim": "eq", "lhs": q * datum.D.degree, "rhs": 2 * g - 2,
                                                     "genus": g}, "p^n deg D = 2g - 2 = deg omega_C"))
    return cert.conclude(f"(dz1) = {q}*({datum.D}) = {q * datum.D.degree}*inf: condition (1) holds"
                         if cert.status == Status.PASS else "condition (1) not certified")


def _excluded_loci(datum: TangoDatum, tr: TransitionData, beta: Optional[FpRational]) -> List[dict]:
    """Loci removed from U2 (each minus inf): zeros of f_x, of alpha and of the poles of beta."""
    f = chart(datum.curve, "U2").equation
    loci = [("f_x", f.derivative("x"))]
    loci += [("alpha_num", tr.alpha.num), ("alpha_den", tr.alpha.den)]
    if beta is not None:
        loci.append(("beta_den", beta.den))
    out = []
    for name, h in loci:
        if h.is_constant() and not h.is_zero():
            continue
        out.append({"claim": "finite_locus", "p": datum.p, "f": str(f), "poly": str(h), "role": name,
                    "contains_inf": h.evaluate({"x": 0, "y": 0}) == 0})
    return out


def certify_condition2(datum: TangoDatum, transition: Optional[TransitionData] = None) -> Certificate:
    """Certify that gamma has a ``p^n``-th root beta regular on the chart overlap.

    Each extraction depth is a check; a failure records the depth at which
    the root stopped existing together with the nonzero differential residual.
    """
    tr = transition or extract_transition(datum)
    C = datum.curve
    ch = chart(C, "U2")
    f = ch.equation
    p = C.p
    cert = Certificate(datum.describe())
    cert.add(Check.evaluated("transition_identity", {
        "claim": "identity_mod", "p": p, "variables": list(U2_VARS), "f": str(f), "lhs": str(datum.f),
        "rhs": [[[str(tr.alpha), p ** datum.n], str(tr.z2)], [str(tr.gamma)]]},
        "z1 = alpha^(p^n) z2 + gamma"))
    current = tr.gamma
    beta = None
    notes = []
    for depth in range(1, datum.n + 1):
        try:
            root = fn_field_pth_root(current, ch)
        except InconclusiveError as exc:
            cert.add(Check(f"root_depth_{depth}", Status.INCONCLUSIVE,
                           {"claim": "inconclusive", "reason": str(exc)}, "p-th root of the transition constant"))
            break
        base = {"p": p, "variables": list(U2_VARS), "f": str(f), "g": str(current), "depth": depth}
        if root is None:
            res = differential_residual(current, f)
            cert.add(Check.evaluated(f"root_depth_{depth}", dict(base, claim="dg_vanishes", residual=str(res)),
                                     "d(g) = 0 on C is necessary for a p-th root"))
            notes.append(f"root extraction stopped at depth {depth}: {current} is not a p-th power in K(C)")
            break
        cert.add(Check.evaluated(f"root_depth_{depth}", dict(base, claim="pth_root", root=str(root)),
                                 "root^p = g on C"))
        current = root
    else:
        beta = current
    if beta is not None:
        beta_val = beta.reduced() if beta.num.is_constant() or beta.den.is_constant() else beta
        for w in _excluded_loci(datum, tr, beta_val):
            cert.add(Check.evaluated(f"excluded_locus_{w['role']}", w,
                                     "shrinking U2 removes finitely many points other than inf"))
        notes.append("U2 is shrunk by the recorded loci minus inf; beta and alpha are regular "
                     "and alpha is a unit on the overlap")
        beta = beta_val
    cert.conclude(f"gamma has the {p ** datum.n}-th root beta = {beta}: condition (2) holds"
                  if beta is not None and cert.status == Status.PASS
                  else "condition (2) fails or is not certified", notes)
    cert.family["beta"] = str(beta) if beta is not None else None
    return cert


def root_of_gamma(datum: TangoDatum, transition: Optional[TransitionData] = None) -> Optional[FpRational]:
    cert = certify_condition2(datum, transition)
    if cert.status != Status.PASS:
        return None
    return parse_rational(cert.family["beta"], datum.p, U2_VARS)


def failure_depth(cert: Certificate) -> Optional[int]:
    """Depth at which root extraction failed in a condition (2) certificate."""
    for c in cert.checks:
        if c.id.startswith("root_depth_") and c.status == Status.FAIL:
            return int(c.id.rsplit("_", 1)[1])
    return None


def certify_tango(datum: TangoDatum) -> Certificate:
    """Both conditions as one certificate with nested sub-certificates."""
    c1 = certify_condition1(datum)
    c2 = certify_condition2(datum)
    cert = Certificate(datum.describe())
    cert.add(Check("condition_1", c1.status, {"claim": "status", "status": c1.status.value,
                                              "certificate": c1.to_dict()}, "(df) = p^n D"))
    cert.add(Check("condition_2", c2.status, {"claim": "status", "status": c2.status.value,
                                              "certificate": c2.to_dict()}, "gamma has a p^n-th root"))
    notes = list(c2.conclusion.get("notes", []))
    stmt = (f"(C, z1, {datum.D}) is {datum.n}-Tango data" if cert.status == Status.PASS
            else f"(C, z1, {datum.D}) is not certified as {datum.n}-Tango data")
    return cert.conclude(stmt, notes)


def build_quotient_bundle(datum: TangoDatum, transition: TransitionData) -> QuotientBundleData:
    """D0 = -min(v(beta), v(alpha), 0) inf and the line bundle L0 = O(D + D0)."""
    beta = transition.beta
    if beta is None:
        raise ValueError("beta absent: condition (2) must hold before building the quotient bundle")
    C = datum.curve
    a, _ = with_precision(C, lambda s: valuation_at_infinity(beta, s))
    b, _ = with_precision(C, lambda s: valuation_at_infinity(transition.alpha, s))
    if a is None or b is None:
        raise InconclusiveError("valuation at infinity unresolved at the precision cap")
    d0 = -min(a, b, 0)
    D0 = DivisorOnC.at_infinity(d0)
    sat = {"v_gamma_alpha": d0 + b, "v_gamma_beta": d0 + a, "min": min(d0 + b, d0 + a)}
    return QuotientBundleData(D0, datum.D.degree + D0.degree, 2, a, b, sat)


def transition_with_beta(datum: TangoDatum) -> TransitionData:
    """Transition data with beta filled in (error when condition 2 fails)."""
    tr = extract_transition(datum)
    beta = root_of_gamma(datum, tr)
    if beta is None:
        raise ValueError("condition (2) fails: gamma has no p^n-th root")
    return TransitionData(tr.alpha, tr.gamma, tr.z2, tr.residual, beta)
