"""Class ledgers on C, on the ruled surface P(E) and on the n-Raynaud surface X.

Pic(P(E)) is modelled by pairs ``(h, B)`` meaning ``O(h) (x) pi^* O(B)`` with
``O(S) = O(1)``; Pic(X) by pairs ``(a, B)`` meaning ``O(a S~) (x) phi^* O(B)``.
Every sheaf in the construction is built from O(1), S, T and pullbacks, so
these ledgers are closed under all operations used here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

from .curve import INFINITY, DivisorOnC


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class RaynaudParams:
    """Parameters of an n-Raynaud surface over the standard n-Tango curve.

    ``D = e(p^n e - 3) inf`` unless given; ``l`` divides both ``p^n + 1`` and
    ``deg D``; ``d = (p^n + 1)/l`` and ``N = D/l``.
    """

    p: int
    n: int
    e: int
    l: int
    D: Optional[DivisorOnC] = None

    def __post_init__(self):
        if self.p < 2 or self.n < 1 or self.e < 1 or self.l < 1:
            raise ValueError("p >= 2, n >= 1, e >= 1 and l >= 1 are required")
        if self.D is None:
            object.__setattr__(self, "D", DivisorOnC.at_infinity(self.e * (self.delta - 3)))
        if self.D.degree <= 0:
            raise ValueError("deg D must be positive")
        if (self.P + 1) % self.l:
            raise ValueError(f"l = {self.l} does not divide p^n + 1 = {self.P + 1}")
        if any(c % self.l for c in self.D.support.values()):
            raise ValueError(f"l = {self.l} does not divide D = {self.D}")

    @property
    def P(self) -> int:
        """p^n (the Frobenius power; called frobenius_P to keep it apart from twist integers)."""
        return self.p ** self.n

    frobenius_P = P

    @property
    def delta(self) -> int:
        return self.P * self.e

    @property
    def d(self) -> int:
        return (self.P + 1) // self.l

    @property
    def N(self) -> DivisorOnC:
        return DivisorOnC({pt: c // self.l for pt, c in self.D.support.items()})

    @property
    def deg_N(self) -> int:
        return self.N.degree

    @property
    def k(self) -> Optional[int]:
        return self.e // self.l if self.e % self.l == 0 else None

    @property
    def genus(self) -> int:
        return (self.delta - 1) * (self.delta - 2) // 2

    def describe(self) -> dict:
        return {"p": self.p, "n": self.n, "e": self.e, "l": self.l, "d": self.d, "p^n": self.P,
                "D": self.D.to_json(), "N": self.N.to_json(), "genus": self.genus}


def valid_grid(max_delta: int = 64, primes: Sequence[int] = (2, 3, 5, 7)):
    """All valid (p, n, e, l) for the standard family with 3 < p^n e <= max_delta."""
    for p in primes:
        n = 1
        while p ** n * 1 <= max_delta:
            P = p ** n
            for e in range(1, max_delta // P + 1):
                if P * e <= 3:
                    continue
                degD = e * (P * e - 3)
                for l in range(1, P + 2):
                    if (P + 1) % l == 0 and degD % l == 0:
                        yield RaynaudParams(p, n, e, l)
            n += 1


# ---------------------------------------------------------------------------
# class ledgers


class _Ledger:
    __slots__ = ("coeff", "base")
    _name = "?"

    def __init__(self, coeff: int, base: Optional[DivisorOnC] = None):
        self.coeff = int(coeff)
        self.base = base if base is not None else DivisorOnC()

    def __add__(self, other):
        self._same(other)
        return type(self)(self.coeff + other.coeff, self.base + other.base)

    def __sub__(self, other):
        self._same(other)
        return type(self)(self.coeff - other.coeff, self.base - other.base)

    def __neg__(self):
        return type(self)(-self.coeff, -self.base)

    def __mul__(self, k: int):
        return type(self)(k * self.coeff, self.base * k)

    __rmul__ = __mul__

    def twist(self, B: DivisorOnC):
        """Tensor with the pullback of O(B)."""
        return type(self)(self.coeff, self.base + B)

    def _same(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")

    def __eq__(self, other):
        return type(other) is type(self) and self.coeff == other.coeff and self.base == other.base

    def __hash__(self):
        return hash((type(self).__name__, self.coeff, self.base))

    def to_json(self):
        return [self.coeff, self.base.to_json()]

    def __repr__(self):
        return f"{type(self).__name__}({self.coeff}, {self.base})"


class PicPE(_Ledger):
    """``O(h) (x) pi^* O(B)`` on P(E)."""

    @property
    def h(self) -> int:
        return self.coeff


class PicX(_Ledger):
    """``O(a S~) (x) phi^* O(B)`` on X."""

    @property
    def a(self) -> int:
        return self.coeff


def S_class() -> PicPE:
    return PicPE(1)


def T_class(P: RaynaudParams) -> PicPE:
    return PicPE(P.P, -P.D * P.P)


def M_class(P: RaynaudParams) -> PicPE:
    return PicPE(P.d, -P.N * P.P)


def S_tilde() -> PicX:
    return PicX(1)


def T_tilde(P: RaynaudParams) -> PicX:
    return PicX(P.P, -P.N * P.P)


def fibre() -> PicX:
    """Class of a fibre phi^*(point)."""
    return PicX(0, DivisorOnC.point(INFINITY))


def psi_pullback(c: PicPE, P: RaynaudParams) -> PicX:
    """psi^*: S pulls back to l S~ and pi^* B to phi^* B."""
    return PicX(P.l * c.h, c.base)


def canonical_class(P: RaynaudParams) -> PicX:
    return PicX(P.P * P.l - P.l - P.P - 1, P.N * (P.P + P.l))


def relative_canonical_class(P: RaynaudParams) -> PicX:
    """omega_{X/C} = K_X - phi^* K_C with K_C = p^n D = p^n l N."""
    return PicX(P.P * P.l - P.l - P.P - 1, P.N * (P.P + P.l - P.P * P.l))


def intersection(A: PicX, B: PicX, P: RaynaudParams) -> Fraction:
    """Intersection number on X: S~^2 = (2g-2)/(p^n l), S~ . phi^*B = deg B, phi^* . phi^* = 0."""
    s2 = Fraction(2 * P.genus - 2, P.P * P.l)
    if s2 != P.deg_N:
        raise ValueError(f"inconsistent Raynaud parameters: (2g-2)/(p^n l) = {s2} but deg N = {P.deg_N}")
    return A.a * B.a * s2 + A.a * B.base.degree + B.a * A.base.degree


def intersection_PE(A: PicPE, B: PicPE, P: RaynaudParams) -> int:
    """Intersection on P(E): S^2 = deg E = deg D, S . pi^*B = deg B."""
    return A.h * B.h * P.D.degree + A.h * B.base.degree + B.h * A.base.degree


# ---------------------------------------------------------------------------
# pushforwards


def _M_power(i: int, P: RaynaudParams) -> PicPE:
    """Class of M^{-i}."""
    return PicPE(-i * P.d, P.N * (i * P.P))


def push_psi_neg(m: int, P: RaynaudParams) -> List[PicPE]:
    """psi_* O(-m S~) as l summands M^{-i}(-(q+1)S), i < r, and M^{-i}(-qS), i >= r."""
    if m < 0:
        raise ValueError("m must be non-negative")
    q, r = divmod(m, P.l)
    return [_M_power(i, P) + PicPE(-(q + 1) if i < r else -q) for i in range(P.l)]


def push_psi_pos(m: int, P: RaynaudParams, allow_negative: bool = False) -> List[PicPE]:
    """psi_* O(m S~) as l summands M^{-i}(qS), i < l-r, and M^{-i}((q+1)S), i >= l-r."""
    if m < 0 and not allow_negative:
        raise ValueError("m must be non-negative")
    q, r = divmod(m, P.l)
    return [_M_power(i, P) + PicPE(q if i < P.l - r else q + 1) for i in range(P.l)]


def adjoint_decomposition(m: int, Qdiv: DivisorOnC, P: RaynaudParams) -> List[PicPE]:
    """M_i = M^{-i}((q + floor((i+r)/l)) S) (x) pi^* Qdiv, cross-checked against push_psi_pos."""
    if m < 1:
        raise ValueError("m must be positive")
    q, r = divmod(m, P.l)
    out = [_M_power(i, P) + PicPE(q + (i + r) // P.l, Qdiv) for i in range(P.l)]
    assert out == [c.twist(Qdiv) for c in push_psi_pos(m, P)], "adjoint decomposition disagrees with push_psi_pos"
    return out


@dataclass(frozen=True)
class ActionRow:
    i: int
    twist: str
    twist_class: PicPE
    vanishes_on_T: bool


def module_action_table(m: int, P: RaynaudParams) -> List[ActionRow]:
    """How M_i maps into M_0 under multiplication by M^{i-l}, for i = 1..l-1.

    The twist class ``M_i + M^{i-l} - M_0`` is computed in the ledger and
    identified with ``-(S+T)`` or ``-T``; both vanish along T, so no section
    from a summand i >= 1 generates along T.
    """
    if m < 1:
        raise ValueError("m must be positive")
    q, r = divmod(m, P.l)
    Z = DivisorOnC()
    summands = adjoint_decomposition(m, Z, P)
    S, T = S_class(), T_class(P)
    rows = []
    for i in range(1, P.l):
        cls = summands[i] + _M_power(P.l - i, P) - summands[0]
        if i <= P.l - r - 1:
            expected, name = -(S + T), "-S-T"
        else:
            expected, name = -T, "-T"
        if cls != expected:
            raise AssertionError(f"module action twist for i={i} is {cls}, expected {name}")
        rows.append(ActionRow(i, name, cls, True))
    return rows


# ---------------------------------------------------------------------------
# sheaves on C


@dataclass(frozen=True)
class SymTerm:
    """``Sym^j(E) (x) O(B)``; a negative j is the zero sheaf, kept with ``dropped``."""

    j: int
    B: DivisorOnC
    index: Optional[int] = None

    @property
    def dropped(self) -> bool:
        return self.j < 0

    def rank(self) -> int:
        return 0 if self.dropped else self.j + 1

    def degree(self, D: DivisorOnC) -> int:
        if self.dropped:
            return 0
        return self.j * (self.j + 1) // 2 * D.degree + (self.j + 1) * self.B.degree

    def top_quotient(self, D: DivisorOnC) -> DivisorOnC:
        """Sym^j(E) (x) O(B) surjects onto L^j (x) O(B) = O(B + jD)."""
        if self.dropped:
            raise ValueError("zero sheaf has no quotient")
        return self.B + D * self.j

    def dual(self, D: DivisorOnC) -> "SymTerm":
        """(Sym^j E (x) O(B))^dual = Sym^j E (x) O(-B - jD), since E^dual = E (x) L^-1."""
        return SymTerm(self.j, -self.B - D * self.j, self.index)

    def to_json(self) -> dict:
        return {"i": self.index, "sym": self.j, "B": self.B.to_json(), "dropped": self.dropped}

    def __str__(self):
        if self.dropped:
            return "0"
        if self.j == 0:
            return f"O({self.B})"
        return f"Sym^{self.j}(E)(x)O({self.B})"


@dataclass
class SheafOnC:
    terms: List[SymTerm]
    D: DivisorOnC
    notes: List[str] = field(default_factory=list)

    @property
    def surviving(self) -> List[SymTerm]:
        return [t for t in self.terms if not t.dropped]

    @property
    def dropped(self) -> List[SymTerm]:
        return [t for t in self.terms if t.dropped]

    def rank(self) -> int:
        return sum(t.rank() for t in self.terms)

    def degree(self) -> int:
        return sum(t.degree(self.D) for t in self.terms)

    def is_zero(self) -> bool:
        return not self.surviving

    def dual(self) -> "SheafOnC":
        return SheafOnC([t.dual(self.D) if not t.dropped else t for t in self.terms], self.D, list(self.notes))

    def to_json(self) -> dict:
        return {"terms": [t.to_json() for t in self.terms], "rank": self.rank(), "degree": self.degree()}

    def __str__(self):
        parts = [str(t) for t in self.surviving]
        return " + ".join(parts) if parts else "0"


def pi_pushforward(c: PicPE, D: DivisorOnC, index: Optional[int] = None) -> SymTerm:
    """pi_* (O(j) (x) pi^* O(B)) = Sym^j(E) (x) O(B), zero for j < 0."""
    return SymTerm(c.h, c.base, index)


def phi_pushforward(classes: Sequence[PicPE], P: RaynaudParams) -> SheafOnC:
    terms = [pi_pushforward(c, P.D, i) for i, c in enumerate(classes)]
    sheaf = SheafOnC(terms, P.D)
    for t in sheaf.dropped:
        sheaf.notes.append(f"summand i={t.index} has Sym exponent {t.j} < 0: zero sheaf")
    return sheaf


def push_H_neg(pm: int, Qdiv: DivisorOnC, P: RaynaudParams) -> SheafOnC:
    """phi_* H^{-pm} for H = O(S~ + phi^* Qdiv)."""
    return phi_pushforward([c.twist(-Qdiv * pm) for c in push_psi_neg(pm, P)], P)


def r1_dual_decomposition(pm: int, Qdiv: DivisorOnC, P: RaynaudParams) -> SheafOnC:
    """(R^1 phi_* H^{-pm})^dual = phi_*(H^{pm} (x) omega_{X/C}) for H = O(S~ + phi^* Qdiv).

    ``pm`` is the exponent p^m itself.  The summands have Sym exponents
    ``-id + p^n - d + q - 1`` (i < l-r) and ``-id + p^n - d + q`` (i >= l-r)
    where ``pm = ql + r``.
    """
    if pm < 1:
        raise ValueError("the exponent must be positive")
    w = relative_canonical_class(P)
    total = PicX(pm, Qdiv * pm) + w
    classes = [c.twist(total.base) for c in push_psi_pos(total.a, P, allow_negative=True)]
    q, r = divmod(pm, P.l)
    for i, c in enumerate(classes):
        expected = -i * P.d + P.P - P.d + q - (1 if i < P.l - r else 0)
        assert c.h == expected, f"Sym exponent of summand {i} is {c.h}, expected {expected}"
    return phi_pushforward(classes, P)


def r1_decomposition(pm: int, Qdiv: DivisorOnC, P: RaynaudParams) -> SheafOnC:
    """R^1 phi_* H^{-pm} itself, dual of :func:`r1_dual_decomposition`."""
    return r1_dual_decomposition(pm, Qdiv, P).dual()


def r1_sub_bundle(pm: int, Qdiv: DivisorOnC, P: RaynaudParams) -> DivisorOnC:
    """The line sub-bundle O((1 - lq)N - pm Qdiv) of R^1, dual to the top quotient of summand 0."""
    dual = r1_dual_decomposition(pm, Qdiv, P)
    t0 = dual.terms[0]
    if t0.dropped:
        raise ValueError("summand 0 vanishes; no quotient line bundle")
    quotient = t0.top_quotient(P.D)
    q = pm // P.l
    assert quotient == Qdiv * pm + P.N * (P.l * q - 1), "top quotient disagrees with O(p^m Q + (lq-1)N)"
    return -quotient
