"""Structured verdicts emitted by every certifier.

A :class:`Certificate` is an ordered list of :class:`Check` records plus a
conclusion.  Each check carries a *witness*: a JSON-native dict whose
``claim`` key names a registered re-checker.  Re-running the claim on the
stored witness reproduces the check's status, so certificates can be
audited without trusting the code path that produced them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional


class Status(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"

    def __str__(self):
        return self.value


EXIT_CODES = {Status.PASS: 0, Status.FAIL: 1, Status.INCONCLUSIVE: 2}


def combine(statuses) -> Status:
    """FAIL dominates INCONCLUSIVE, which dominates PASS."""
    statuses = [Status(s) for s in statuses]
    if Status.FAIL in statuses:
        return Status.FAIL
    if Status.INCONCLUSIVE in statuses:
        return Status.INCONCLUSIVE
    return Status.PASS


class InconclusiveError(RuntimeError):
    """A computation could not be decided within its configured bounds."""


# ---------------------------------------------------------------------------
# claims

CLAIMS: Dict[str, Callable[[dict], Status]] = {}


def claim(name: str):
    def deco(fn):
        CLAIMS[name] = fn
        return fn
    return deco


def num(v) -> Fraction:
    """Numbers in witnesses are ints or 'a/b' strings."""
    return Fraction(v)


def jnum(v):
    """JSON-native form of an exact rational."""
    v = Fraction(v)
    return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _ok(flag: bool) -> Status:
    return Status.PASS if flag else Status.FAIL


@claim("eq")
def _claim_eq(w):
    a, b = w["lhs"], w["rhs"]
    if isinstance(a, (int, str)) and isinstance(b, (int, str)):
        try:
            return _ok(num(a) == num(b))
        except (ValueError, ZeroDivisionError):
            pass
    return _ok(a == b)


@claim("lt")
def _claim_lt(w):
    return _ok(num(w["lhs"]) < num(w["rhs"]))


@claim("le")
def _claim_le(w):
    return _ok(num(w["lhs"]) <= num(w["rhs"]))


@claim("gt")
def _claim_gt(w):
    return _ok(num(w["lhs"]) > num(w["rhs"]))


@claim("ge")
def _claim_ge(w):
    return _ok(num(w["lhs"]) >= num(w["rhs"]))


@claim("divides")
def _claim_divides(w):
    return _ok(int(w["divisor"]) != 0 and int(w["dividend"]) % int(w["divisor"]) == 0)


@claim("all_negative")
def _claim_all_negative(w):
    return _ok(all(int(v) < 0 for v in w["values"]))


@claim("effective")
def _claim_effective(w):
    """Every coefficient of a point-supported divisor is >= ``min`` (default 0)."""
    lo = int(w.get("min", 0))
    coeffs = [int(c) for c in w["divisor"].values()]
    if lo > 0 and not coeffs:
        return Status.FAIL
    return _ok(all(c >= lo for c in coeffs))


@claim("all")
def _claim_all(w):
    return combine(w["statuses"]) if w["statuses"] else Status.PASS


@claim("inconclusive")
def _claim_inconclusive(w):
    return Status.INCONCLUSIVE


@claim("status")
def _claim_status(w):
    """A status propagated from a nested certificate (re-checked recursively)."""
    nested = w.get("certificate")
    if nested is not None:
        return Certificate.from_dict(nested).recheck_status()
    return Status(w["status"])


def evaluate_claim(witness: dict) -> Status:
    kind = witness.get("claim")
    if kind not in CLAIMS:
        _load_claim_modules()
    if kind not in CLAIMS:
        raise KeyError(f"no re-checker registered for claim {kind!r}")
    return CLAIMS[kind](witness)


def _load_claim_modules():
    from . import curve, tango  # noqa: F401  (registers polynomial-level claims)


# ---------------------------------------------------------------------------
# records


@dataclass
class Check:
    id: str
    status: Status
    witness: Dict[str, Any]
    anchor: str

    @classmethod
    def evaluated(cls, id: str, witness: Dict[str, Any], anchor: str) -> "Check":
        """Build a check whose status is computed from its own witness."""
        return cls(id, evaluate_claim(witness), witness, anchor)

    def to_dict(self) -> dict:
        return {"id": self.id, "status": self.status.value, "witness": self.witness, "anchor": self.anchor}

    @classmethod
    def from_dict(cls, d: dict) -> "Check":
        return cls(d["id"], Status(d["status"]), d["witness"], d["anchor"])


@dataclass
class Certificate:
    family: Dict[str, Any]
    checks: List[Check] = field(default_factory=list)
    conclusion: Dict[str, Any] = field(default_factory=dict)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def get(self, id: str) -> Optional[Check]:
        for c in self.checks:
            if c.id == id:
                return c
        return None

    def __getitem__(self, id: str) -> Check:
        c = self.get(id)
        if c is None:
            raise KeyError(id)
        return c

    @property
    def status(self) -> Status:
        if "status" in self.conclusion:
            return Status(self.conclusion["status"])
        return combine(c.status for c in self.checks)

    def conclude(self, statement: str, notes: Optional[List[str]] = None) -> "Certificate":
        self.conclusion = {
            "statement": statement,
            "status": combine(c.status for c in self.checks).value,
            "notes": list(notes or []),
        }
        return self

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "checks": [c.to_dict() for c in self.checks],
            "conclusion": self.conclusion,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        return cls(dict(d["family"]), [Check.from_dict(c) for c in d["checks"]], dict(d["conclusion"]))

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        return cls.from_dict(json.loads(text))

    def recheck(self) -> List[tuple]:
        """(id, stored status, recomputed status) for every check."""
        return [(c.id, c.status, evaluate_claim(c.witness)) for c in self.checks]

    def recheck_status(self) -> Status:
        return combine(s for _, _, s in self.recheck())

    def is_consistent(self) -> bool:
        return all(a == b for _, a, b in self.recheck()) and \
            Status(self.conclusion.get("status", self.status)) == combine(c.status for c in self.checks)

    def report(self) -> str:
        lines = []
        fam = ", ".join(f"{k}={v}" for k, v in self.family.items())
        lines.append(f"family: {fam}")
        for c in self.checks:
            lines.append(f"  [{c.status.value:<12}] {c.id}: {c.anchor}")
        if self.conclusion:
            lines.append(f"conclusion [{self.conclusion['status']}]: {self.conclusion['statement']}")
            for n in self.conclusion.get("notes", []):
                lines.append(f"  note: {n}")
        return "\n".join(lines)
