"""Plane projective curves over F_p with distinguished charts and the point at infinity.

The point at infinity is ``[0:0:1]``.  Chart ``U1`` is ``X != 0`` with affine
coordinates ``y1 = Y/X, z1 = Z/X``; chart ``U2`` is ``Z != 0`` with
``x = X/Z, y = Y/Z``.  Local analysis at infinity expands ``x`` as a power
series in the local parameter ``y`` by fixed-point iteration on the ``U2``
chart equation.
"""

from __future__ import annotations

import functools
import os
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .algebra import (
    FpPoly,
    FpRational,
    format_upoly,
    parse_poly,
    parse_rational,
    resultant,
    to_univariate,
    u_divmod,
    u_factor,
    u_gcd,
    u_mul,
    u_trim,
    u_xgcd,
)
from .certificate import Certificate, Check, Status, claim

PROJECTIVE = ("X", "Y", "Z")
SHAPE_VARS = ("X", "Y")
U1_VARS = ("y1", "z1")
U2_VARS = ("x", "y")

T_MAX = 6
PRECISION_CAP = 2**16
PRECISION_ENV = "RAYNAUD_PRECISION"


# ---------------------------------------------------------------------------
# points and divisors


@dataclass(frozen=True, order=True)
class Point:
    """A closed point: a rational point or a conjugate cluster of residue degree > 1."""

    name: str
    degree: int = 1

    def __str__(self):
        return self.name if self.degree == 1 else f"{self.name}@{self.degree}"

    @classmethod
    def parse(cls, text: str) -> "Point":
        if "@" in text:
            name, deg = text.rsplit("@", 1)
            return cls(name, int(deg))
        return cls(text)


INFINITY = Point("inf")


class DivisorOnC:
    """Finite formal sum of closed points with integer coefficients."""

    __slots__ = ("support",)

    def __init__(self, support: Optional[Mapping[Point, int]] = None):
        self.support = {pt: int(c) for pt, c in (support or {}).items() if c}

    @classmethod
    def point(cls, pt: Point = INFINITY, coeff: int = 1) -> "DivisorOnC":
        return cls({pt: coeff})

    @classmethod
    def at_infinity(cls, coeff: int) -> "DivisorOnC":
        return cls({INFINITY: coeff})

    @property
    def degree(self) -> int:
        return sum(c * pt.degree for pt, c in self.support.items())

    def coefficient(self, pt: Point = INFINITY) -> int:
        return self.support.get(pt, 0)

    def is_effective(self) -> bool:
        return all(c >= 0 for c in self.support.values())

    def __add__(self, other: "DivisorOnC") -> "DivisorOnC":
        out = dict(self.support)
        for pt, c in other.support.items():
            out[pt] = out.get(pt, 0) + c
        return DivisorOnC(out)

    def __neg__(self):
        return DivisorOnC({pt: -c for pt, c in self.support.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k: int) -> "DivisorOnC":
        return DivisorOnC({pt: k * c for pt, c in self.support.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, DivisorOnC) and self.support == other.support

    def __hash__(self):
        return hash(frozenset(self.support.items()))

    def to_json(self) -> Dict[str, int]:
        return {str(pt): c for pt, c in sorted(self.support.items())}

    @classmethod
    def from_json(cls, d: Mapping[str, int]) -> "DivisorOnC":
        return cls({Point.parse(k): v for k, v in d.items()})

    def __repr__(self):
        return f"DivisorOnC({self})"

    def __str__(self):
        if not self.support:
            return "0"
        return " + ".join(f"{c}*{pt}" for pt, c in sorted(self.support.items()))


# ---------------------------------------------------------------------------
# curves and charts


@dataclass(frozen=True)
class PlaneCurveFamily:
    """A plane curve ``F(X,Y,Z) = 0`` of degree ``p^n * e``.

    The standard family is ``Q(X^q, Y^q) - X^(qe-1) Y - Z^(qe-1) X`` with
    ``q = p^n`` and a binary form ``Q`` of degree ``e`` whose ``Y^e``
    coefficient is nonzero.  Custom curves supply ``F`` directly.
    """

    p: int
    n: int
    e: int
    F: FpPoly
    shape: Optional[FpPoly] = None
    variant: str = "standard"
    label: str = ""

    def __post_init__(self):
        if self.n < 1 or self.e < 1:
            raise ValueError("level n and e must be positive")
        if self.F.variables != PROJECTIVE:
            raise ValueError(f"F must be a polynomial in {PROJECTIVE}")
        if self.F.is_zero():
            raise ValueError("zero polynomial does not define a curve")
        if not self.F.is_homogeneous() or self.F.degree() != self.degree:
            raise ValueError(f"F must be homogeneous of degree p^n*e = {self.degree}")

    @classmethod
    def standard(cls, p: int, n: int, e: int, shape: Optional[FpPoly] = None) -> "PlaneCurveFamily":
        X, Y, Z = FpPoly.gens(p, PROJECTIVE)
        if shape is None:
            shape = FpPoly.monomial(p, SHAPE_VARS, {"Y": e})
        shape = shape.with_variables(SHAPE_VARS) if shape.variables != SHAPE_VARS else shape
        if shape.is_zero() or not shape.is_homogeneous() or shape.degree() != e:
            raise ValueError(f"shape Q must be a nonzero binary form of degree e = {e}")
        if shape.terms.get((0, e), 0) == 0:
            raise ValueError("shape Q must have a nonzero Y^e coefficient")
        q = p ** n
        delta = q * e
        lifted = FpPoly(p, PROJECTIVE, {(a * q, b * q, 0): c for (a, b), c in shape.terms.items()})
        F = lifted - X ** (delta - 1) * Y - Z ** (delta - 1) * X
        return cls(p, n, e, F, shape, "standard", f"standard(p={p},n={n},e={e},Q={shape})")

    @classmethod
    def custom(cls, p: int, n: int, e: int, F: FpPoly, label: str = "custom") -> "PlaneCurveFamily":
        if F.variables != PROJECTIVE:
            F = F.with_variables(PROJECTIVE)
        return cls(p, n, e, F, None, "custom", label)

    @property
    def q(self) -> int:
        return self.p ** self.n

    @property
    def degree(self) -> int:
        return self.p ** self.n * self.e

    def describe(self) -> dict:
        d = {"p": self.p, "n": self.n, "e": self.e, "degree": self.degree, "variant": self.variant,
             "F": str(self.F)}
        if self.shape is not None:
            d["shape"] = str(self.shape)
        return d

    def chart(self, id: str) -> "Chart":
        return chart(self, id)


def dehomogenize(F: FpPoly, unit: str, names: Sequence[str]) -> FpPoly:
    """Set the ``unit`` coordinate to 1; the other two become ``names`` (in order)."""
    i = PROJECTIVE.index(unit)
    keep = [j for j in range(3) if j != i]
    terms = {}
    for e, c in F.terms.items():
        key = (e[keep[0]], e[keep[1]])
        terms[key] = (terms.get(key, 0) + c) % F.p
    return FpPoly(F.p, tuple(names), terms)


@dataclass(frozen=True)
class Chart:
    id: str
    equation: FpPoly
    variables: Tuple[str, str]
    definitions: Tuple[str, str]
    unit: str

    def describe(self) -> dict:
        return {"id": self.id, "unit": self.unit, "variables": list(self.variables),
                "definitions": list(self.definitions), "equation": str(self.equation)}


_CHARTS = {
    "U1": ("X", U1_VARS, ("Y/X", "Z/X")),
    "U2": ("Z", U2_VARS, ("X/Z", "Y/Z")),
    "V": ("Y", ("xv", "zv"), ("X/Y", "Z/Y")),
}


def chart(C: PlaneCurveFamily, id: str) -> Chart:
    if id not in _CHARTS:
        raise ValueError(f"unknown chart {id!r}")
    unit, names, defs = _CHARTS[id]
    return Chart(id, dehomogenize(C.F, unit, names), names, defs, unit)


# ---------------------------------------------------------------------------
# common zeros of bivariate systems


class _ResidueField:
    """F_p[u]/(m) for irreducible m, elements as dense residue lists."""

    def __init__(self, modulus: List[int], p: int):
        self.m = modulus
        self.p = p

    def red(self, a):
        return u_divmod(a, self.m, self.p)[1] if len(a) >= len(self.m) else u_trim(a)

    def mul(self, a, b):
        return self.red(u_mul(a, b, self.p))

    def sub(self, a, b):
        n = max(len(a), len(b))
        return u_trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % self.p for i in range(n)])

    def inv(self, a):
        g, s, _ = u_xgcd(a, self.m, self.p)
        if g != [1]:
            raise ZeroDivisionError("non-invertible residue")
        return self.red(s)


def _rf_poly_gcd(A, B, K: _ResidueField):
    """Monic gcd of two polynomials (lists of residues, low degree first)."""

    def trim(P):
        P = list(P)
        while P and not P[-1]:
            P.pop()
        return P

    A, B = trim(A), trim(B)
    while B:
        inv = K.inv(B[-1])
        R = list(A)
        while len(R) >= len(B) and R:
            c = K.mul(R[-1], inv)
            shift = len(R) - len(B)
            for j, b in enumerate(B):
                R[shift + j] = K.sub(R[shift + j], K.mul(c, b))
            R = trim(R)
        A, B = B, R
    if not A:
        return A
    inv = K.inv(A[-1])
    return [K.mul(c, inv) for c in A]


def _specialize(P: FpPoly, u: str, v: str, K: _ResidueField):
    """P(u = root of K.m, v) as a list of residues indexed by the power of v."""
    i, j = P.index(u), P.index(v)
    dv = P.degree(v)
    out = [dict() for _ in range(max(dv + 1, 0))]
    for e, c in P.terms.items():
        out[e[j]][e[i]] = c
    res = []
    for d in out:
        dense = [0] * (max(d) + 1) if d else []
        for k, c in d.items():
            dense[k] = c
        res.append(K.red(u_trim(dense)))
    return res


@dataclass
class ZeroSearch:
    """Outcome of a common-zero search: ``none``, ``found`` or ``unknown``."""

    outcome: str
    witnesses: List[dict] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)


def common_zeros(polys: Sequence[FpPoly], u: str, v: str, t_max: int = T_MAX) -> ZeroSearch:
    """Decide whether bivariate polynomials share a zero over the algebraic closure.

    Candidates in ``u`` are the roots of the gcd of resultants in ``v``; each
    irreducible candidate factor of degree <= t_max is confirmed or refuted by
    a gcd over the residue field F_p[u]/(factor).  Larger factors leave the
    outcome ``unknown``.
    """
    nz = [f for f in polys if not f.is_zero()]
    if not nz:
        return ZeroSearch("found", [{"locus": "entire plane"}])
    if any(f.is_constant() for f in nz):
        return ZeroSearch("none", notes=["a nonzero constant lies in the system"])
    if len(nz) == 1:
        return ZeroSearch("found", [{"locus": f"curve {nz[0]}"}])
    p = nz[0].p
    for a, b in ((u, v), (v, u)):
        base = next((f for f in nz if f.involves(b)), None)
        if base is None:
            continue
        R: List[int] = []
        for g in nz:
            if g is base:
                continue
            r = resultant(base, g, b)
            if r.is_zero():
                continue
            R = u_gcd(R, to_univariate(r, a), p) if R else to_univariate(r, a)
        if not R:
            continue
        if len(R) == 1:
            return ZeroSearch("none", notes=[f"gcd of resultants in {b} is a nonzero constant"])
        result = ZeroSearch("none")
        for factor, _mult in u_factor(R, p):
            t = len(factor) - 1
            if t > t_max:
                result.notes.append(f"candidate factor of degree {t} > t_max={t_max} in {a}: "
                                    f"{format_upoly(factor, a)}")
                if result.outcome == "none":
                    result.outcome = "unknown"
                continue
            K = _ResidueField(factor, p)
            spec = [_specialize(P, a, b, K) for P in nz]
            g: List = []
            for s in spec:
                g = _rf_poly_gcd(g, s, K) if g else _rf_poly_gcd(s, [], K)
            if not g and all(not any(s) for s in spec):
                result.outcome = "found"
                result.witnesses.append({a: format_upoly(factor, a), b: "any"})
            elif len(g) > 1:
                result.outcome = "found"
                w = {a: format_upoly(factor, a), f"{b}_factor_degree": len(g) - 1}
                if t == 1 and len(g) == 2:
                    w = {a: (-factor[0]) % p, b: (-(g[0][0] if g[0] else 0)) % p}
                elif t == 1:
                    w[b] = format_upoly([c[0] if c else 0 for c in g], b)
                w["residue_degree"] = t
                result.witnesses.append(w)
        return result
    return ZeroSearch("unknown", notes=["all resultants vanish identically in both variable orders"])


# ---------------------------------------------------------------------------
# smoothness


def _chart_partials(f: FpPoly) -> Tuple[FpPoly, FpPoly]:
    u, v = f.variables
    return f.derivative(u), f.derivative(v)


def _constant_partial(f: FpPoly) -> Optional[str]:
    for var, d in zip(f.variables, _chart_partials(f)):
        if d.is_constant() and not d.is_zero():
            return var
    return None


def _analyse_chart(F: FpPoly, unit: str, t_max: int) -> Tuple[Status, dict]:
    C_unit_chart = {u: (names, defs) for u, names, defs in _CHARTS.values()}
    names, _ = C_unit_chart[unit]
    f = dehomogenize(F, unit, names)
    var = _constant_partial(f)
    if var is not None:
        d = f.derivative(var)
        return Status.PASS, {"method": "shortcut", "partial": var, "value": d.constant_value()}
    fu, fv = _chart_partials(f)
    search = common_zeros([f, fu, fv], names[0], names[1], t_max)
    status = {"none": Status.PASS, "found": Status.FAIL, "unknown": Status.INCONCLUSIVE}[search.outcome]
    return status, {"method": "resultant", "singular_points": search.witnesses, "notes": search.notes}


def _analyse_line(F: FpPoly, unit: str) -> Tuple[Status, dict]:
    """Singular points of the curve on the line ``unit = 0`` (decided over F_p)."""
    p = F.p
    i = PROJECTIVE.index(unit)
    a_idx, b_idx = [j for j in range(3) if j != i]
    a_name = PROJECTIVE[a_idx]
    system = [F] + [F.derivative(v) for v in PROJECTIVE]
    # points [.. a : 1 ..] with b = 1
    restricted = []
    for P in system:
        coeffs: Dict[int, int] = {}
        for e, c in P.terms.items():
            if e[i] == 0:
                coeffs[e[a_idx]] = (coeffs.get(e[a_idx], 0) + c) % p
        dense = [0] * (max(coeffs) + 1) if coeffs else []
        for k, c in coeffs.items():
            dense[k] = c
        restricted.append(u_trim(dense))
    g: List[int] = []
    for r in restricted:
        g = u_gcd(g, r, p) if (g or r) else []
    singular = []
    if not any(restricted):
        singular.append({"locus": f"entire line {unit}=0"})
    elif len(g) > 1:
        for factor, _ in u_factor(g, p):
            coords = ["0", "0", "0"]
            coords[b_idx] = "1"
            coords[a_idx] = str((-factor[0]) % p) if len(factor) == 2 else f"root of {format_upoly(factor, 't')}"
            singular.append({"point": "[" + ":".join(coords) + "]", "residue_degree": len(factor) - 1})
    # the remaining point of the line: a = 1, b = 0
    pt = {v: 0 for v in PROJECTIVE}
    pt[a_name] = 1
    if all(P.evaluate(pt) == 0 for P in system):
        coords = ["0", "0", "0"]
        coords[a_idx] = "1"
        singular.append({"point": "[" + ":".join(coords) + "]", "residue_degree": 1})
    status = Status.FAIL if singular else Status.PASS
    return status, {"line": f"{unit}=0", "singular_points": singular}


@claim("chart_smooth")
def _claim_chart_smooth(w):
    F = parse_poly(w["F"], w["p"], PROJECTIVE)
    return _analyse_chart(F, w["unit"], w.get("t_max", T_MAX))[0]


@claim("line_smooth")
def _claim_line_smooth(w):
    F = parse_poly(w["F"], w["p"], PROJECTIVE)
    return _analyse_line(F, w["unit"])[0]


def smoothness_certify(C, t_max: int = T_MAX) -> Certificate:
    """Smoothness certificate for a family or a bare homogeneous F(X, Y, Z)."""
    if isinstance(C, FpPoly):
        F = C if C.variables == PROJECTIVE else C.with_variables(PROJECTIVE)
        if F.is_zero():
            raise ValueError("zero polynomial")
        if not F.is_homogeneous():
            raise ValueError("F must be homogeneous")
        return _smoothness(F, t_max, (("p", F.p), ("degree", F.degree()), ("F", str(F))))
    return _smoothness(C.F, t_max, tuple(C.describe().items()))


@functools.lru_cache(maxsize=256)
def _smoothness(F: FpPoly, t_max: int, family: tuple) -> Certificate:
    """Certify that the projective curve has no singular point over the algebraic closure.

    One affine chart ``W = 1`` is analysed completely (a constant nonzero
    partial settles it; otherwise resultants with extension search up to
    ``t_max``), and the complementary line ``W = 0`` is decided by univariate
    gcds over F_p.
    """
    cert = Certificate(dict(family))
    unit = "Z"
    for candidate in ("X", "Z", "Y"):
        if _constant_partial(dehomogenize(F, candidate, ("a", "b"))) is not None:
            unit = candidate
            break
    ch = next(id for id, (u, _, _) in _CHARTS.items() if u == unit)
    names = _CHARTS[ch][1]
    status, info = _analyse_chart(F, unit, t_max)
    w = {"claim": "chart_smooth", "p": F.p, "F": str(F), "unit": unit, "t_max": t_max,
         "chart": ch, "variables": list(names)}
    w.update(info)
    cert.add(Check(f"smooth.chart_{ch}", status, w, f"f = f_u = f_v = 0 has no solution on {unit} != 0"))
    status, info = _analyse_line(F, unit)
    w = {"claim": "line_smooth", "p": F.p, "F": str(F), "unit": unit}
    w.update(info)
    cert.add(Check(f"smooth.line_{unit}0", status, w, f"F and its partials have no common zero on {unit} = 0"))
    return cert.conclude("curve is smooth" if cert.status == Status.PASS else "smoothness not certified")


def genus(C: PlaneCurveFamily) -> int:
    """Genus of a certified smooth plane curve, (d-1)(d-2)/2."""
    cert = smoothness_certify(C)
    if cert.status != Status.PASS:
        raise ValueError(f"smoothness not certified ({cert.status.value}); genus formula does not apply")
    d = C.F.degree()
    g = (d - 1) * (d - 2) // 2
    assert 2 * g - 2 == d * (d - 3)
    return g


def line_intersection_at_X0(C: PlaneCurveFamily) -> List[Tuple[Point, int]]:
    """Intersection of the curve with the line X = 0, with multiplicities."""
    p = C.p
    coeffs: Dict[int, int] = {}
    for (a, b, c), v in C.F.terms.items():
        if a == 0:
            coeffs[b] = v
    if not coeffs:
        raise ValueError("the curve contains the line X = 0")
    delta = C.F.degree()
    # F(0, y, 1) as a polynomial in y; missing top degree means roots at [0:1:0]
    dense = [0] * (max(coeffs) + 1)
    for k, v in coeffs.items():
        dense[k] = v
    dense = u_trim(dense)
    out: List[Tuple[Point, int]] = []
    for factor, mult in u_factor(dense, p):
        if len(factor) == 2:
            root = (-factor[0]) % p
            pt = INFINITY if root == 0 else Point(f"[0:{root}:1]")
        else:
            pt = Point(f"[0:root of {format_upoly(factor, 'y')}:1]", len(factor) - 1)
        out.append((pt, mult))
    top = delta - (len(dense) - 1)
    if top:
        out.append((Point("[0:1:0]"), top))
    assert sum(m * pt.degree for pt, m in out) == delta
    return out


# ---------------------------------------------------------------------------
# truncated power series


def _conv(a: np.ndarray, b: np.ndarray, p: int, n: int) -> np.ndarray:
    a, b = a[:n], b[:n]
    if len(a) == 0 or len(b) == 0 or n <= 0:
        return np.zeros(max(n, 0), dtype=np.int64)
    if p * p * min(len(a), len(b)) < 2**62:
        r = np.convolve(a.astype(np.int64), b.astype(np.int64))[:n] % p
    else:
        r = np.array([int(c) % p for c in np.convolve(a.astype(object), b.astype(object))[:n]], dtype=object)
    if len(r) < n:
        r = np.concatenate([r, np.zeros(n - len(r), dtype=r.dtype)])
    return r


def _series_inverse(u: np.ndarray, p: int, n: int) -> np.ndarray:
    """Inverse of a unit power series modulo y^n (Newton iteration)."""
    if n <= 0:
        return np.zeros(0, dtype=np.int64)
    g = np.array([pow(int(u[0]), -1, p)], dtype=np.int64)
    k = 1
    while k < n:
        k = min(2 * k, n)
        e = _conv(u, g, p, k)
        e = (-e) % p
        e[0] = (e[0] + 2) % p
        g = _conv(g, e, p, k)
    return g[:n]


class LaurentSeries:
    """Truncated Laurent series in ``parameter``; exponents below ``precision`` are exact."""

    __slots__ = ("p", "parameter", "variable", "start", "coeffs", "precision")

    def __init__(self, p: int, parameter: str, coeffs, start: int = 0, precision: Optional[int] = None,
                 variable: Optional[str] = None):
        c = np.asarray(coeffs if len(coeffs) else np.zeros(0), dtype=np.int64 if p < 2**31 else object) % p
        if precision is None:
            precision = start + len(c)
        c = c[:max(precision - start, 0)]
        nz = np.nonzero(c)[0]
        if len(nz):
            c = c[nz[0]:]
            start += int(nz[0])
        else:
            c = c[:0]
            start = precision
        self.p = p
        self.parameter = parameter
        self.variable = variable
        self.start = start
        self.coeffs = c
        self.precision = precision

    @property
    def valuation(self) -> Optional[int]:
        """Smallest exponent with nonzero coefficient; None if zero to precision."""
        return self.start if len(self.coeffs) else None

    def is_zero(self) -> bool:
        return not len(self.coeffs)

    @property
    def coefficients(self) -> Dict[int, int]:
        return {self.start + i: int(c) for i, c in enumerate(self.coeffs) if c}

    def coefficient(self, k: int) -> int:
        if k >= self.precision:
            raise ValueError(f"coefficient y^{k} is beyond precision {self.precision}")
        i = k - self.start
        return int(self.coeffs[i]) if 0 <= i < len(self.coeffs) else 0

    def _unit(self) -> Tuple[int, np.ndarray]:
        return self.start, self.coeffs

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        prec = min(self.precision, other.precision)
        lo = min(self.start, other.start, prec)
        out = np.zeros(prec - lo, dtype=np.int64)
        for s in (self, other):
            part = s.coeffs[:max(prec - s.start, 0)]
            out[s.start - lo:s.start - lo + len(part)] += part
        return LaurentSeries(self.p, self.parameter, out % self.p, lo, prec)

    def __neg__(self):
        return LaurentSeries(self.p, self.parameter, (-self.coeffs) % self.p, self.start, self.precision)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "LaurentSeries") -> "LaurentSeries":
        va = self.start
        vb = other.start
        prec = min(self.precision + vb, other.precision + va)
        if self.is_zero() or other.is_zero():
            return LaurentSeries(self.p, self.parameter, [], prec, prec)
        n = prec - va - vb
        return LaurentSeries(self.p, self.parameter, _conv(self.coeffs, other.coeffs, self.p, n), va + vb, prec)

    def inverse(self) -> "LaurentSeries":
        v = self.valuation
        if v is None:
            raise ZeroDivisionError("series is zero to the available precision")
        rel = self.precision - v
        inv = _series_inverse(self.coeffs, self.p, rel)
        return LaurentSeries(self.p, self.parameter, inv, -v, -v + rel)

    def __truediv__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self * other.inverse()

    def derivative(self) -> "LaurentSeries":
        k = np.arange(self.start, self.start + len(self.coeffs), dtype=np.int64) % self.p
        return LaurentSeries(self.p, self.parameter, (self.coeffs * k) % self.p, self.start - 1,
                             self.precision - 1)

    def truncate(self, T: int) -> "LaurentSeries":
        return LaurentSeries(self.p, self.parameter, self.coeffs, self.start, min(T, self.precision),
                             self.variable)

    def __eq__(self, other):
        return (isinstance(other, LaurentSeries) and self.precision == other.precision
                and self.coefficients == other.coefficients)

    def __repr__(self):
        terms = list(self.coefficients.items())[:6]
        body = " + ".join(f"{c}*{self.parameter}^{k}" for k, c in terms) or "0"
        more = " + ..." if len(self.coefficients) > 6 else ""
        lhs = f"{self.variable} = " if self.variable else ""
        return f"<{lhs}{body}{more} + O({self.parameter}^{self.precision})>"


class _PowerCache:
    """Powers x^a of a power series truncated at y^T, using valuation shifts and Frobenius."""

    def __init__(self, xs: np.ndarray, p: int, T: int):
        self.p, self.T = p, T
        nz = np.nonzero(xs[:T])[0]
        self.zero = len(nz) == 0
        self.v = int(nz[0]) if len(nz) else T
        self.unit = xs[self.v:T] if len(nz) else xs[:0]
        self.memo: Dict[int, np.ndarray] = {0: np.ones(1, dtype=np.int64)}

    def _upow(self, a: int, length: int) -> np.ndarray:
        if length <= 0:
            return np.zeros(0, dtype=np.int64)
        hit = self.memo.get(a)
        if hit is not None and (len(hit) >= length or a == 0):
            return hit[:length]
        p = self.p
        if a % p == 0:
            base = self._upow(a // p, -(-length // p))
            out = np.zeros(length, dtype=np.int64)
            out[::p][:len(base)] = base[:len(out[::p])]
        elif a == 1:
            out = _pad(self.unit, length)
        else:
            half = self._upow(a // 2, length)
            out = _conv(half, half, p, length)
            if a % 2:
                out = _conv(out, self.unit, p, length)
        self.memo[a] = out
        return out

    def power(self, a: int) -> np.ndarray:
        T = self.T
        out = np.zeros(T, dtype=np.int64)
        if a == 0:
            out[0] = 1
            return out
        if self.zero:
            return out
        shift = self.v * a
        if shift >= T:
            return out
        part = self._upow(a, T - shift)
        out[shift:shift + len(part)] = part
        return out


def _pad(a: np.ndarray, n: int) -> np.ndarray:
    if len(a) >= n:
        return a[:n].astype(np.int64)
    return np.concatenate([a.astype(np.int64), np.zeros(n - len(a), dtype=np.int64)])


def _poly_to_series(g: FpPoly, x_var: str, y_var: str, cache: _PowerCache) -> np.ndarray:
    """g(x(y), y) mod y^T."""
    T, p = cache.T, cache.p
    ix, iy = g.index(x_var), g.index(y_var)
    by_x: Dict[int, Dict[int, int]] = {}
    for e, c in g.terms.items():
        if any(a for k, a in enumerate(e) if k not in (ix, iy)):
            raise ValueError(f"{g} involves variables other than {x_var}, {y_var}")
        by_x.setdefault(e[ix], {})[e[iy]] = c
    total = np.zeros(T, dtype=np.int64)
    for a, ycoeffs in by_x.items():
        ypoly = np.zeros(T, dtype=np.int64)
        for b, c in ycoeffs.items():
            if b < T:
                ypoly[b] = c
        if not ypoly.any():
            continue
        total = (total + _conv(cache.power(a), ypoly, p, T)) % p
    return total


def default_precision(C: PlaneCurveFamily) -> int:
    env = os.environ.get(PRECISION_ENV)
    if env:
        return int(env)
    d = C.degree
    return max(3 * d * (d - 3) + 10, d + 2)


def _fixed_point_form(C: PlaneCurveFamily) -> Tuple[FpPoly, int]:
    f = chart(C, "U2").equation
    if f.constant_term() != 0:
        raise ValueError("bad fixed-point form: infinity [0:0:1] is not on the curve")
    L = f.terms.get((1, 0), 0)
    if L == 0:
        raise ValueError("bad fixed-point form: the U2 equation has no linear x term")
    x = FpPoly.gen(C.p, U2_VARS, "x")
    return f - x * L, L


def expand_at_infinity(C: PlaneCurveFamily, T: Optional[int] = None) -> LaurentSeries:
    """Power series x(y) with x(0) = 0 solving the U2 chart equation modulo y^T.

    The chart equation ``L*x + R(x, y) = 0`` is iterated in the contraction
    form ``x = -R(x, y)/L``; every monomial of R either lacks x or raises the
    valuation of a perturbation, so each pass fixes at least one more
    coefficient.
    """
    # resolve T first so the cache sees environment overrides
    return _expand_at_infinity(C, default_precision(C) if T is None else T)


@functools.lru_cache(maxsize=64)
def _expand_at_infinity(C: PlaneCurveFamily, T: int) -> LaurentSeries:
    if T < C.degree + 1:
        raise ValueError(f"precision T={T} < p^n*e+1={C.degree + 1}; series would be indistinguishable from 0")
    p = C.p
    R, L = _fixed_point_form(C)
    scale = (-pow(L, -1, p)) % p
    xs = np.zeros(T, dtype=np.int64)
    agree = 0
    for _ in range(T + 1):
        new = (_poly_to_series(R, "x", "y", _PowerCache(xs, p, T)) * scale) % p
        diff = np.nonzero(new != xs)[0]
        if not len(diff):
            break
        first = int(diff[0])
        if first < agree:
            raise ValueError("bad fixed-point form: iteration does not contract")
        agree = first + 1
        xs = new
    else:
        raise ValueError("bad fixed-point form: no convergence")
    f = chart(C, "U2").equation
    assert not _poly_to_series(f, "x", "y", _PowerCache(xs, p, T)).any(), "f(x(y), y) != 0 mod y^T"
    return LaurentSeries(p, "y", xs, 0, T, variable="x")


def substitute(g, series: LaurentSeries) -> Tuple[LaurentSeries, LaurentSeries]:
    """Series of numerator and denominator of g(x(y), y)."""
    if isinstance(g, FpPoly):
        g = FpRational(g)
    xs = np.zeros(series.precision, dtype=np.int64)
    xs[series.start:series.start + len(series.coeffs)] = series.coeffs
    cache = _PowerCache(xs, series.p, series.precision)
    out = []
    for part in (g.num, g.den):
        arr = _poly_to_series(part, series.variable or "x", series.parameter, cache)
        out.append(LaurentSeries(series.p, series.parameter, arr, 0, series.precision))
    return out[0], out[1]


def valuation_at_infinity(g, series: LaurentSeries) -> Optional[int]:
    """v_inf(g) for g in the U2 variables; None when the precision is insufficient."""
    if isinstance(g, FpPoly):
        g = FpRational(g)
    if g.den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if g.num.is_zero():
        raise ValueError("the zero function has no valuation")
    ns, ds = substitute(g, series)
    if ns.valuation is None or ds.valuation is None:
        return None
    return ns.valuation - ds.valuation


def laurent_expansion(g, series: LaurentSeries) -> Optional[LaurentSeries]:
    """g(x(y), y) as a Laurent series, or None if the denominator vanishes to precision."""
    if isinstance(g, FpPoly):
        g = FpRational(g)
    if g.den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    ns, ds = substitute(g, series)
    if ds.valuation is None:
        return None
    return ns / ds


def differential_valuation_at_infinity(g, series: LaurentSeries) -> Optional[int]:
    """v_inf(dg) measured against dy; None when cancellation exhausts the precision."""
    s = laurent_expansion(g, series)
    if s is None:
        return None
    return s.derivative().valuation


def with_precision(C: PlaneCurveFamily, fn, T: Optional[int] = None):
    """Run ``fn(series)``, doubling the precision while it returns None.

    Returns (value, T used); value is None once the cap 2^16 is exceeded.
    """
    T = T or default_precision(C)
    while T <= PRECISION_CAP:
        value = fn(expand_at_infinity(C, T))
        if value is not None:
            return value, T
        T *= 2
    return None, T


@claim("valuation_at_infinity")
def _claim_valuation(w):
    C = curve_from_witness(w)
    g = parse_rational(w["g"], C.p, U2_VARS)
    fn = differential_valuation_at_infinity if w.get("differential") else valuation_at_infinity
    v = fn(g, expand_at_infinity(C, int(w["T"])))
    if v is None:
        return Status.INCONCLUSIVE
    return Status.PASS if v == int(w["expected"]) else Status.FAIL


def curve_from_witness(w: Mapping) -> PlaneCurveFamily:
    F = parse_poly(w["F"], w["p"], PROJECTIVE)
    return PlaneCurveFamily.custom(w["p"], w["n"], w["e"], F)


def curve_witness(C: PlaneCurveFamily) -> dict:
    return {"p": C.p, "n": C.n, "e": C.e, "F": str(C.F)}


# ---------------------------------------------------------------------------
# differentials on charts


def _divides_product(d: FpPoly, excluded: Sequence[FpPoly]) -> bool:
    if not excluded:
        return False
    prod = excluded[0]
    for h in excluded[1:]:
        prod = prod * h
    return d.divides(prod)


def generates_omega_on_chart(C: PlaneCurveFamily, ch: Chart, var: str,
                             excluded: Sequence[FpPoly] = (), t_max: int = T_MAX) -> Certificate:
    """Certify that d(var) generates the differentials on the chart.

    This holds iff the partial of the chart equation in the other variable
    has no zero on the chart.  ``excluded`` lists functions whose zero loci
    are removed from the chart (a shrunk chart); they must not vanish at
    infinity when the chart contains it.
    """
    if var not in ch.variables:
        raise ValueError(f"{var!r} is not a coordinate of chart {ch.id}")
    smooth = smoothness_certify(C)
    cert = Certificate(dict(C.describe(), chart=ch.id, var=var))
    cert.add(Check("smooth", smooth.status, {"claim": "status", "status": smooth.status.value},
                   "curve is smooth"))
    f = ch.equation
    other = ch.variables[1] if ch.variables[0] == var else ch.variables[0]
    d = f.derivative(other)
    w = {"claim": "generates_omega", **curve_witness(C), "chart": ch.id, "var": var,
         "partial": str(d), "excluded": [str(h) for h in excluded], "t_max": t_max}
    status, info = _generates(C, ch, var, excluded, t_max)
    w.update(info)
    cert.add(Check(f"d{var}_generates_on_{ch.id}", status, w, f"f_{other} is a unit on {ch.id}"))
    if excluded and ch.unit == "Z":
        vals = {str(h): h.evaluate({"x": 0, "y": 0}) for h in excluded}
        cert.add(Check.evaluated("infinity_kept", {"claim": "all", "statuses": [
            "PASS" if v else "FAIL" for v in vals.values()], "values": vals},
            "shrinking functions do not vanish at infinity"))
    return cert.conclude(f"d{var} generates omega_C on {ch.id}" + (" (shrunk)" if excluded else ""))


def _generates(C, ch, var, excluded, t_max):
    f = ch.equation
    other = ch.variables[1] if ch.variables[0] == var else ch.variables[0]
    d = f.derivative(other)
    if d.is_constant() and not d.is_zero():
        return Status.PASS, {"method": "shortcut", "value": d.constant_value()}
    if d.is_zero():
        return Status.FAIL, {"method": "identically zero partial", "witness_locus": "entire chart"}
    if excluded and _divides_product(d, excluded):
        return Status.PASS, {"method": "partial divides excluded locus", "excluded_locus": [str(h) for h in excluded]}
    search = common_zeros([f, d], var, other, t_max)
    if search.outcome == "none":
        return Status.PASS, {"method": "resultant"}
    if search.outcome == "found":
        return Status.FAIL, {"method": "resultant", "witness_locus": search.witnesses}
    return Status.INCONCLUSIVE, {"method": "resultant", "notes": search.notes}


@claim("generates_omega")
def _claim_generates(w):
    C = curve_from_witness(w)
    ch = chart(C, w["chart"])
    excluded = [parse_poly(h, C.p, ch.variables) for h in w.get("excluded", [])]
    return _generates(C, ch, w["var"], excluded, w.get("t_max", T_MAX))[0]


@claim("nonzero_constant")
def _claim_nonzero_constant(w):
    f = parse_poly(w["poly"], w["p"], w["variables"])
    return Status.PASS if f.is_constant() and not f.is_zero() else Status.FAIL


def parse_curve_fixture(text: str) -> PlaneCurveFamily:
    """Read a curve fixture.

    Line 1 is ``p n e``.  Line 2 is either the shape polynomial in X, Y or
    the word ``custom``, in which case line 3 is the full F in X, Y, Z.
    Blank lines and ``#`` comments are ignored.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if len(lines) < 2:
        raise ValueError("fixture needs a header 'p n e' and a polynomial line")
    try:
        p, n, e = (int(t) for t in lines[0].split())
    except ValueError:
        raise ValueError(f"bad fixture header {lines[0]!r}; expected 'p n e'") from None
    if lines[1].startswith("custom"):
        rest = lines[1][len("custom"):].strip() or (lines[2] if len(lines) > 2 else "")
        if not rest:
            raise ValueError("custom fixture needs the polynomial F")
        return PlaneCurveFamily.custom(p, n, e, parse_poly(rest, p, PROJECTIVE))
    return PlaneCurveFamily.standard(p, n, e, parse_poly(lines[1], p, SHAPE_VARS))


def format_curve_fixture(C: PlaneCurveFamily) -> str:
    head = f"{C.p} {C.n} {C.e}\n"
    if C.variant == "standard":
        return head + f"{C.shape}\n"
    return head + f"custom\n{C.F}\n"


def iter_standard_grid(max_degree: int, primes: Iterable[int] = (2, 3, 5, 7)):
    """(p, n, e) with 3 < p^n e <= max_degree."""
    for p in primes:
        n = 1
        while p ** n <= max_degree:
            for e in range(1, max_degree // p ** n + 1):
                if p ** n * e > 3:
                    yield p, n, e
            n += 1
