"""Exact arithmetic over a prime field F_p.

Sparse multivariate polynomials (:class:`FpPoly`), rational functions
(:class:`FpRational`), characteristic-p calculus (derivatives, Frobenius
powers, p-th roots), resultants by the subresultant PRS, dense univariate
helpers and Gaussian elimination over F_p.

Polynomials are immutable.  A polynomial knows its prime ``p`` and its
ordered tuple of variable names; terms map exponent tuples to residues in
``[1, p)``.  Binary operations require both operands to live in the same
ring (same ``p``, same variables).

Text format::

    1*X^2*Y^2+1*Y^4+3*Z^1

Terms are printed in descending lexicographic order of exponent vectors,
every coefficient is printed, and every variable with positive exponent is
printed as ``V^a``.  The parser also accepts bare variables (``X``),
omitted coefficients, ``-`` signs and whitespace.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

Exponent = Tuple[int, ...]

MAX_PRIME = 2**31


@functools.lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    """Trial division; adequate for machine-width moduli."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or isinstance(p, bool):
        raise TypeError(f"modulus must be an int, got {type(p).__name__}")
    if p >= MAX_PRIME:
        raise ValueError(f"modulus {p} exceeds machine width 2^31")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return p


@dataclass(frozen=True)
class FpElem:
    """An element of F_p."""

    value: int
    p: int

    def __post_init__(self):
        check_prime(self.p)
        object.__setattr__(self, "value", self.value % self.p)

    def _other(self, other) -> int:
        if isinstance(other, FpElem):
            if other.p != self.p:
                raise ValueError("elements of different prime fields")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else FpElem(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else FpElem(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else FpElem(o - self.value, self.p)

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else FpElem(self.value * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElem(-self.value, self.p)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return FpElem(pow(self.value, k, self.p), self.p)

    def inverse(self) -> "FpElem":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse in F_p")
        return FpElem(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return self * FpElem(o, self.p).inverse()

    def __int__(self):
        return self.value

    def __str__(self):
        return str(self.value)


def _as_int(c) -> int:
    return c.value if isinstance(c, FpElem) else int(c)


# ---------------------------------------------------------------------------
# sparse multivariate polynomials


class FpPoly:
    """Sparse multivariate polynomial over F_p."""

    __slots__ = ("p", "variables", "terms", "_hash")

    def __init__(self, p: int, variables: Sequence[str], terms: Optional[Mapping[Exponent, int]] = None,
                 *, _trusted: bool = False):
        self.p = p
        self.variables = tuple(variables)
        if _trusted:
            self.terms = terms
        else:
            check_prime(p)
            if len(set(self.variables)) != len(self.variables):
                raise ValueError(f"repeated variable in {self.variables}")
            nv = len(self.variables)
            clean: Dict[Exponent, int] = {}
            for exp, c in (terms or {}).items():
                exp = tuple(int(a) for a in exp)
                if len(exp) != nv or any(a < 0 for a in exp):
                    raise ValueError(f"bad exponent vector {exp} for variables {self.variables}")
                c = _as_int(c) % p
                if c:
                    clean[exp] = (clean.get(exp, 0) + c) % p
                    if not clean[exp]:
                        del clean[exp]
            self.terms = clean
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def _make(cls, p, variables, terms) -> "FpPoly":
        return cls(p, variables, terms, _trusted=True)

    @classmethod
    def zero(cls, p: int, variables: Sequence[str]) -> "FpPoly":
        return cls(p, variables, {})

    @classmethod
    def constant(cls, p: int, variables: Sequence[str], c: int) -> "FpPoly":
        return cls(p, variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def gen(cls, p: int, variables: Sequence[str], name: str) -> "FpPoly":
        variables = tuple(variables)
        if name not in variables:
            raise ValueError(f"unknown variable {name!r}; ring has {variables}")
        exp = tuple(1 if v == name else 0 for v in variables)
        return cls(p, variables, {exp: 1})

    @classmethod
    def gens(cls, p: int, variables: Sequence[str]) -> Tuple["FpPoly", ...]:
        return tuple(cls.gen(p, variables, v) for v in variables)

    @classmethod
    def monomial(cls, p: int, variables: Sequence[str], exponents: Mapping[str, int], c: int = 1) -> "FpPoly":
        variables = tuple(variables)
        for v in exponents:
            if v not in variables:
                raise ValueError(f"unknown variable {v!r}")
        exp = tuple(exponents.get(v, 0) for v in variables)
        return cls(p, variables, {exp: c})

    @classmethod
    def parse(cls, text: str, p: int, variables: Sequence[str]) -> "FpPoly":
        return parse_poly(text, p, variables)

    # basic protocol -----------------------------------------------------

    def _coerce(self, other) -> "FpPoly":
        if isinstance(other, FpPoly):
            if other.p != self.p or other.variables != self.variables:
                raise ValueError(
                    f"ring mismatch: F_{self.p}{list(self.variables)} vs F_{other.p}{list(other.variables)}")
            return other
        if isinstance(other, (int, FpElem)):
            return FpPoly.constant(self.p, self.variables, _as_int(other))
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, FpPoly):
            return self.p == other.p and self.variables == other.variables and self.terms == other.terms
        if isinstance(other, (int, FpElem)):
            c = _as_int(other) % self.p
            if c == 0:
                return not self.terms
            return self.terms == {(0,) * len(self.variables): c}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.variables, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"FpPoly(p={self.p}, vars={self.variables}, {self})"

    def __str__(self):
        return format_poly(self)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise ValueError(f"unknown variable {var!r}; ring has {self.variables}") from None

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> int:
        """Value of a constant polynomial (error if not constant)."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return next(iter(self.terms.values()), 0)

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.nvars, 0)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    # ring operations ----------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.p
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = (out.get(e, 0) + c) % p
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return FpPoly._make(p, self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.p
        return FpPoly._make(p, self.variables, {e: p - c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.p
        if other.is_constant():
            c = other.constant_value()
            if c == 0:
                return FpPoly._make(p, self.variables, {})
            return FpPoly._make(p, self.variables, {e: a * c % p for e, a in self.terms.items()})
        if self.is_constant():
            return other * self
        out: Dict[Exponent, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = (out.get(e, 0) + c1 * c2) % p
        return FpPoly._make(p, self.variables, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers need a non-negative integer exponent")
        result = FpPoly.constant(self.p, self.variables, 1)
        base = self
        # strip p-power factors of k with Frobenius (exact over F_p)
        while k and k % self.p == 0:
            base = base.frobenius_power(1)
            k //= self.p
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c: int) -> "FpPoly":
        return self * (c % self.p)

    def monic(self, var: Optional[str] = None) -> "FpPoly":
        """Scale so that the leading coefficient (lex or in ``var``) is 1."""
        if self.is_zero():
            return self
        if var is None:
            c = self.terms[self.leading_exponent()]
        else:
            lc = self.leading_coefficient(var)
            c = lc.terms[lc.leading_exponent()]
        return self * pow(c, -1, self.p)

    # structure ----------------------------------------------------------

    def degree(self, var: Optional[str] = None) -> int:
        """Degree in ``var`` (total degree when ``var`` is None); -1 for zero."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        i = self.index(var)
        return max(e[i] for e in self.terms)

    total_degree = degree

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def involves(self, var: str) -> bool:
        i = self.index(var)
        return any(e[i] for e in self.terms)

    def used_variables(self) -> Tuple[str, ...]:
        return tuple(v for i, v in enumerate(self.variables) if any(e[i] for e in self.terms))

    def leading_exponent(self) -> Exponent:
        return max(self.terms)

    def coefficients(self, var: str) -> Dict[int, "FpPoly"]:
        """Collect in powers of ``var``; coefficients no longer involve ``var``."""
        i = self.index(var)
        buckets: Dict[int, Dict[Exponent, int]] = {}
        for e, c in self.terms.items():
            k = e[i]
            buckets.setdefault(k, {})[e[:i] + (0,) + e[i + 1:]] = c
        return {k: FpPoly._make(self.p, self.variables, t) for k, t in buckets.items()}

    def coefficient_list(self, var: str) -> List["FpPoly"]:
        """Dense list (low to high) of coefficients in ``var``."""
        d = self.degree(var)
        if d < 0:
            return []
        coeffs = self.coefficients(var)
        zero = FpPoly._make(self.p, self.variables, {})
        return [coeffs.get(k, zero) for k in range(d + 1)]

    @classmethod
    def from_coefficient_list(cls, coeffs: Sequence["FpPoly"], var: str, like: "FpPoly") -> "FpPoly":
        out = FpPoly.zero(like.p, like.variables)
        i = like.index(var)
        for k, c in enumerate(coeffs):
            if c:
                out = out + FpPoly._make(like.p, like.variables,
                                         {e[:i] + (e[i] + k,) + e[i + 1:]: v for e, v in c.terms.items()})
        return out

    def leading_coefficient(self, var: str) -> "FpPoly":
        if self.is_zero():
            return self
        return self.coefficients(var)[self.degree(var)]

    def derivative(self, var: str) -> "FpPoly":
        return poly_derivative(self, var)

    def frobenius_power(self, k: int = 1) -> "FpPoly":
        return frobenius_power(self, k)

    def pth_root(self) -> Optional["FpPoly"]:
        return p_th_root(self)

    # substitution -------------------------------------------------------

    def evaluate(self, point: Mapping[str, int]) -> int:
        """Evaluate at an F_p point given for every variable that occurs."""
        p = self.p
        vals = []
        for v in self.variables:
            if v in point:
                vals.append(_as_int(point[v]) % p)
            else:
                vals.append(None)
        total = 0
        for e, c in self.terms.items():
            t = c
            for a, x in zip(e, vals):
                if a:
                    if x is None:
                        raise ValueError("evaluation point misses a variable that occurs")
                    t = t * pow(x, a, p) % p
            total += t
        return total % p

    def subs(self, assignment: Mapping[str, Union[int, "FpPoly"]]) -> "FpPoly":
        """Substitute constants or polynomials (of the same ring) for variables."""
        p = self.p
        idx = {self.index(v): val for v, val in assignment.items()}
        poly_vals = {i: (v if isinstance(v, FpPoly) else FpPoly.constant(p, self.variables, _as_int(v)))
                     for i, v in idx.items()}
        for v in poly_vals.values():
            self._coerce(v)
        cache: Dict[Tuple[int, int], FpPoly] = {}

        def power(i, a):
            key = (i, a)
            if key not in cache:
                cache[key] = poly_vals[i] ** a
            return cache[key]

        out = FpPoly._make(p, self.variables, {})
        for e, c in self.terms.items():
            rest = tuple(0 if i in poly_vals else a for i, a in enumerate(e))
            t = FpPoly._make(p, self.variables, {rest: c})
            for i in poly_vals:
                if e[i]:
                    t = t * power(i, e[i])
            out = out + t
        return out

    def with_variables(self, variables: Sequence[str]) -> "FpPoly":
        """Re-express in another variable tuple (dropped variables must not occur)."""
        variables = tuple(variables)
        mapping = []
        for i, v in enumerate(self.variables):
            if v in variables:
                mapping.append(variables.index(v))
            else:
                if any(e[i] for e in self.terms):
                    raise ValueError(f"variable {v!r} occurs and cannot be dropped")
                mapping.append(None)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(variables)
            for i, a in enumerate(e):
                if mapping[i] is not None:
                    ne[mapping[i]] = a
            out[tuple(ne)] = c
        return FpPoly(self.p, variables, out)

    def rename(self, mapping: Mapping[str, str]) -> "FpPoly":
        return FpPoly._make(self.p, tuple(mapping.get(v, v) for v in self.variables), self.terms)

    # division -----------------------------------------------------------

    def divide_exact(self, other: "FpPoly") -> "FpPoly":
        """Exact quotient ``self / other``; ArithmeticError if not divisible."""
        q, r = self.divmod_lex(other)
        if r:
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def divmod_lex(self, other: "FpPoly") -> Tuple["FpPoly", "FpPoly"]:
        """Lex-order division stopping at the first non-divisible leading term.

        The remainder is zero exactly when ``other`` divides ``self``.
        """
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        p = self.p
        lt_e = other.leading_exponent()
        lt_inv = pow(other.terms[lt_e], -1, p)
        rem = dict(self.terms)
        quo: Dict[Exponent, int] = {}
        while rem:
            e = max(rem)
            if any(a < b for a, b in zip(e, lt_e)):
                break
            shift = tuple(a - b for a, b in zip(e, lt_e))
            c = rem[e] * lt_inv % p
            quo[shift] = c
            for oe, oc in other.terms.items():
                te = tuple(a + b for a, b in zip(oe, shift))
                v = (rem.get(te, 0) - c * oc) % p
                if v:
                    rem[te] = v
                else:
                    rem.pop(te, None)
        return FpPoly._make(p, self.variables, quo), FpPoly._make(p, self.variables, rem)

    def divides(self, other: "FpPoly") -> bool:
        """True when ``self`` divides ``other``."""
        return not other.divmod_lex(self)[1]

    def prem(self, other: "FpPoly", var: str) -> "FpPoly":
        """Sparse pseudo-remainder of ``self`` by ``other`` in ``var``.

        Vanishes iff ``other`` divides ``lc^k * self`` for some k.
        """
        other = self._coerce(other)
        dg = other.degree(var)
        if dg < 0:
            raise ZeroDivisionError("pseudo-division by zero")
        lc = other.leading_coefficient(var)
        x = FpPoly.gen(self.p, self.variables, var)
        r = self
        while r and r.degree(var) >= dg:
            dr = r.degree(var)
            r = lc * r - r.leading_coefficient(var) * (x ** (dr - dg)) * other
        return r


# ---------------------------------------------------------------------------
# module-level operations


def poly_derivative(f: FpPoly, var: str) -> FpPoly:
    """Formal partial derivative; exponents divisible by p differentiate to 0."""
    i = f.index(var)
    p = f.p
    out = {}
    for e, c in f.terms.items():
        a = e[i]
        if a % p == 0:
            continue
        out[e[:i] + (a - 1,) + e[i + 1:]] = c * a % p
    return FpPoly._make(p, f.variables, out)


def frobenius_power(f: FpPoly, k: int = 1) -> FpPoly:
    """``f ** (p**k)``: multiply every exponent by p^k (coefficients are fixed)."""
    if k < 0:
        raise ValueError("Frobenius power must be non-negative")
    q = f.p ** k
    return FpPoly._make(f.p, f.variables, {tuple(a * q for a in e): c for e, c in f.terms.items()})


def p_th_root(f: FpPoly) -> Optional[FpPoly]:
    """The g with g^p = f, or None when some exponent is not divisible by p."""
    p = f.p
    out = {}
    for e, c in f.terms.items():
        if any(a % p for a in e):
            return None
        out[tuple(a // p for a in e)] = c
    return FpPoly._make(p, f.variables, out)


def _prem_exact(A: List[FpPoly], B: List[FpPoly]) -> List[FpPoly]:
    """lc(B)^(deg A - deg B + 1) * A mod B for dense coefficient lists."""
    da, db = len(A) - 1, len(B) - 1
    lc = B[-1]
    r = list(A)
    steps = da - db + 1
    for k in range(da, db - 1, -1):
        top = r[k] if k < len(r) else None
        r = [lc * c for c in r]
        steps -= 1
        if top is not None and top:
            shift = k - db
            for j in range(db + 1):
                r[shift + j] = r[shift + j] - top * B[j]
        r = r[:k]
    if steps:
        f = lc ** steps
        r = [f * c for c in r]
    while r and not r[-1]:
        r.pop()
    return r


def resultant(f: FpPoly, g: FpPoly, var: str) -> FpPoly:
    """Res_var(f, g) by the subresultant PRS (fraction free, exact divisions).

    Both arguments live in the same ring; the result no longer involves ``var``.
    """
    if f.is_zero() and g.is_zero():
        raise ValueError("resultant of two zero polynomials")
    f._coerce(g)
    zero = FpPoly.zero(f.p, f.variables)
    one = FpPoly.constant(f.p, f.variables, 1)
    if f.is_zero() or g.is_zero():
        return zero
    A = f.coefficient_list(var)
    B = g.coefficient_list(var)
    s = 1
    if len(A) < len(B):
        A, B = B, A
        if (len(A) - 1) % 2 and (len(B) - 1) % 2:
            s = -s
    if len(B) == 1:
        return B[0] ** (len(A) - 1) * s
    gg = h = one
    while True:
        da, db = len(A) - 1, len(B) - 1
        delta = da - db
        if da % 2 and db % 2:
            s = -s
        R = _prem_exact(A, B)
        if not R:
            return zero
        A = B
        div = gg * h ** delta
        B = [c.divide_exact(div) for c in R]
        gg = A[-1]
        if delta == 0:
            pass
        elif delta == 1:
            h = gg
        else:
            h = (gg ** delta).divide_exact(h ** (delta - 1))
        if len(B) == 1:
            break
    da = len(A) - 1
    last = B[0] ** da
    if da > 1:
        last = last.divide_exact(h ** (da - 1))
    return last * s


def solve_linear_fp(A, b, p: int) -> Optional[List[int]]:
    """Solve A x = b over F_p by Gaussian elimination.

    Returns one solution (free variables set to 0) or None when the system is
    inconsistent.  Raises ValueError on a dimension mismatch.
    """
    check_prime(p)
    rows = [[_as_int(c) % p for c in row] for row in A]
    rhs = [_as_int(c) % p for c in b]
    m = len(rows)
    if m != len(rhs):
        raise ValueError(f"matrix has {m} rows but right-hand side has {len(rhs)} entries")
    ncols = len(rows[0]) if rows else 0
    if any(len(r) != ncols for r in rows):
        raise ValueError("ragged matrix")
    if m == 0:
        return [0] * ncols
    M = np.array([r + [v] for r, v in zip(rows, rhs)], dtype=object if p > 3037000499 else np.int64)
    pivots = []
    row = 0
    for col in range(ncols):
        if row >= m:
            break
        nz = np.nonzero(M[row:, col] % p)[0]
        if len(nz) == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            M[[row, piv]] = M[[piv, row]]
        inv = pow(int(M[row, col]), -1, p)
        M[row] = (M[row] * inv) % p
        col_vals = M[:, col].copy()
        col_vals[row] = 0
        others = np.nonzero(col_vals)[0]
        if len(others):
            M[others] = (M[others] - np.outer(col_vals[others], M[row])) % p
        pivots.append(col)
        row += 1
    if row < m and np.any(M[row:, ncols] % p):
        return None
    x = [0] * ncols
    for r, col in enumerate(pivots):
        x[col] = int(M[r, ncols]) % p
    return x


# ---------------------------------------------------------------------------
# dense univariate helpers (lists of residues, low degree first)


def u_trim(a: List[int]) -> List[int]:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def u_add(a, b, p):
    n = max(len(a), len(b))
    return u_trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)])


def u_sub(a, b, p):
    return u_add(a, [(-c) % p for c in b], p)


def u_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return u_trim([c % p for c in out])


def u_divmod(a, b, p):
    b = u_trim(b)
    if not b:
        raise ZeroDivisionError("univariate division by zero")
    a = u_trim(a)
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    for k in range(len(a) - len(b), -1, -1):
        c = r[k + len(b) - 1] * inv % p
        q[k] = c
        if c:
            for j, y in enumerate(b):
                r[k + j] = (r[k + j] - c * y) % p
    return u_trim(q), u_trim(r[:len(b) - 1])


def u_monic(a, p):
    a = u_trim(a)
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def u_gcd(a, b, p):
    a, b = u_trim(a), u_trim(b)
    while b:
        a, b = b, u_divmod(a, b, p)[1]
    return u_monic(a, p)


def u_xgcd(a, b, p):
    """(g, s, t) with s*a + t*b = g monic."""
    r0, r1 = u_trim(a), u_trim(b)
    s0, s1, t0, t1 = [1], [], [], [1]
    while r1:
        q, r = u_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, u_sub(s0, u_mul(q, s1, p), p)
        t0, t1 = t1, u_sub(t0, u_mul(q, t1, p), p)
    if not r0:
        return [], [], []
    inv = pow(r0[-1], -1, p)
    return ([c * inv % p for c in r0], [c * inv % p for c in s0], [c * inv % p for c in t0])


def u_deriv(a, p):
    return u_trim([(i * c) % p for i, c in enumerate(a)][1:])


def u_eval(a, x, p):
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


def u_factor(a, p) -> List[Tuple[List[int], int]]:
    """Monic irreducible factors with multiplicities (constant factor dropped)."""
    from sympy.polys.domains import ZZ
    from sympy.polys.galoistools import gf_factor

    a = u_trim([c % p for c in a])
    if len(a) <= 1:
        return []
    _, factors = gf_factor([ZZ(c) for c in reversed(a)], p, ZZ)
    out = [([int(c) for c in reversed(f)], m) for f, m in factors]
    out.sort(key=lambda fm: (len(fm[0]), fm[0]))
    return out


def to_univariate(f: FpPoly, var: str) -> List[int]:
    """Dense list of a polynomial that only involves ``var``."""
    i = f.index(var)
    if any(a for e in f.terms for j, a in enumerate(e) if j != i):
        raise ValueError(f"{f} involves variables other than {var}")
    d = f.degree(var)
    out = [0] * (d + 1)
    for e, c in f.terms.items():
        out[e[i]] = c
    return u_trim(out)


def from_univariate(a: Sequence[int], var: str, like: FpPoly) -> FpPoly:
    i = like.index(var)
    n = like.nvars
    terms = {}
    for k, c in enumerate(a):
        if c % like.p:
            e = [0] * n
            e[i] = k
            terms[tuple(e)] = c
    return FpPoly(like.p, like.variables, terms)


def format_upoly(a: Sequence[int], var: str) -> str:
    terms = [f"{c}*{var}^{k}" if k else f"{c}" for k, c in reversed(list(enumerate(a))) if c]
    return "+".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# rational functions


class FpRational:
    """A quotient num/den of polynomials; equality by cross multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num: FpPoly, den: Optional[FpPoly] = None):
        if den is None:
            den = FpPoly.constant(num.p, num.variables, 1)
        num._coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        self.num = num
        self.den = den

    @classmethod
    def from_poly(cls, f: FpPoly) -> "FpRational":
        return cls(f)

    @property
    def p(self) -> int:
        return self.num.p

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.num.variables

    def _coerce(self, other) -> "FpRational":
        if isinstance(other, FpRational):
            self.num._coerce(other.num)
            return other
        if isinstance(other, (FpPoly, int, FpElem)):
            return FpRational(self.num._coerce(other))
        return NotImplemented

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        r = self.reduced()
        return hash((r.num, r.den))

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return FpRational(self.num + other.num, self.den)
        return FpRational(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return FpRational(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FpRational(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "FpRational":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return FpRational(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return FpRational(self.num ** k, self.den ** k)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def derivative(self, var: str) -> "FpRational":
        n, d = self.num, self.den
        return FpRational(n.derivative(var) * d - n * d.derivative(var), d * d)

    def frobenius_power(self, k: int = 1) -> "FpRational":
        return FpRational(self.num.frobenius_power(k), self.den.frobenius_power(k))

    def reduced(self) -> "FpRational":
        """Best-effort normal form.

        Exact gcd when both parts are univariate in the same variable;
        otherwise cancels common monomial factors and exact divisions between
        numerator and denominator.  The denominator is made monic.
        """
        num, den = self.num, self.den
        if num.is_zero():
            return FpRational(num, FpPoly.constant(num.p, num.variables, 1))
        used = set(num.used_variables()) | set(den.used_variables())
        if len(used) == 1:
            (v,) = used
            a, b = to_univariate(num, v), to_univariate(den, v)
            g = u_gcd(a, b, num.p)
            if len(g) > 1:
                a = u_divmod(a, g, num.p)[0]
                b = u_divmod(b, g, num.p)[0]
            num, den = from_univariate(a, v, num), from_univariate(b, v, den)
        else:
            shift = tuple(min(e[i] for e in list(num.terms) + list(den.terms)) for i in range(num.nvars))
            if any(shift):
                num = FpPoly._make(num.p, num.variables,
                                   {tuple(a - s for a, s in zip(e, shift)): c for e, c in num.terms.items()})
                den = FpPoly._make(den.p, den.variables,
                                   {tuple(a - s for a, s in zip(e, shift)): c for e, c in den.terms.items()})
            if not den.is_constant():
                q, r = num.divmod_lex(den)
                if not r:
                    num, den = q, FpPoly.constant(num.p, num.variables, 1)
            if not num.is_constant() and not den.is_constant():
                q, r = den.divmod_lex(num)
                if not r:
                    num, den = FpPoly.constant(num.p, num.variables, 1), q
        c = den.terms[den.leading_exponent()]
        inv = pow(c, -1, num.p)
        return FpRational(num * inv, den * inv)

    def __repr__(self):
        return f"FpRational({self})"

    def __str__(self):
        if self.den == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"


def parse_rational(text: str, p: int, variables: Sequence[str]) -> FpRational:
    """Parse ``num`` or ``(num)/(den)``."""
    text = text.strip()
    m = re.fullmatch(r"\((.*)\)\s*/\s*\((.*)\)", text)
    if m:
        return FpRational(parse_poly(m.group(1), p, variables), parse_poly(m.group(2), p, variables))
    return FpRational(parse_poly(text, p, variables))


# ---------------------------------------------------------------------------
# text format

_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?$")


def format_poly(f: FpPoly) -> str:
    if not f.terms:
        return "0"
    parts = []
    for e in sorted(f.terms, reverse=True):
        s = str(f.terms[e])
        for v, a in zip(f.variables, e):
            if a:
                s += f"*{v}^{a}"
        parts.append(s)
    return "+".join(parts)


def parse_poly(text: str, p: int, variables: Sequence[str]) -> FpPoly:
    variables = tuple(variables)
    check_prime(p)
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ValueError("empty polynomial text")
    s = s.replace("-", "+-")
    terms: Dict[Exponent, int] = {}
    for raw in s.split("+"):
        if raw == "":
            continue
        sign = 1
        while raw.startswith("-"):
            sign = -sign
            raw = raw[1:]
        if not raw:
            raise ValueError(f"dangling sign in {text!r}")
        coeff = sign
        exp = [0] * len(variables)
        for factor in raw.split("*"):
            if factor.isdigit():
                coeff *= int(factor)
                continue
            m = _TOKEN.match(factor)
            if not m:
                raise ValueError(f"cannot parse factor {factor!r} in {text!r}")
            name, power = m.group(1), int(m.group(2) or 1)
            if name not in variables:
                raise ValueError(f"unknown variable {name!r}; expected one of {variables}")
            exp[variables.index(name)] += power
        key = tuple(exp)
        terms[key] = (terms.get(key, 0) + coeff) % p
    return FpPoly(p, variables, terms)


def polys_from_strings(p: int, variables: Sequence[str], *texts: str) -> Tuple[FpPoly, ...]:
    return tuple(parse_poly(t, p, variables) for t in texts)


def iter_monomials(nvars: int, max_degree: int) -> Iterable[Exponent]:
    """All exponent vectors of total degree <= max_degree."""
    if nvars == 0:
        yield ()
        return
    for a in range(max_degree + 1):
        for rest in iter_monomials(nvars - 1, max_degree - a):
            yield (a,) + rest
