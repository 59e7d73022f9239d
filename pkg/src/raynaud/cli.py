"""Command-line front end.

Each subcommand builds a :class:`Certificate`, prints its report (or JSON with
``--json``), optionally writes it to ``--out``, and exits with the status code
of its conclusion.  Usage and parameter errors exit with 3.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from .algebra import is_prime
from .certificate import EXIT_CODES, Certificate, Check, InconclusiveError, Status, combine
from .curve import PRECISION_ENV, parse_curve_fixture
from .pathology import DEFAULT_BUDGET, certify_nonvanishing, fujita_many
from .picard import (
    RaynaudParams,
    S_tilde,
    T_tilde,
    canonical_class,
    fibre,
    intersection,
    push_psi_neg,
    push_psi_pos,
)
from .tango import (
    build_custom_datum,
    build_standard_datum,
    certify_condition1,
    certify_condition2,
    certify_tango,
    failure_depth,
    fixture_datum,
)

USAGE_EXIT = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so run() can map errors to exit 3."""

    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


@dataclass
class RunConfig:
    subcommand: str
    params: Dict[str, object] = field(default_factory=dict)
    precision: Optional[int] = None
    out: Optional[str] = None
    structured: bool = False

    def validate(self):
        p = self.params.get("p")
        if p is not None and not is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        for name in ("n", "e", "m", "l", "k"):
            v = self.params.get(name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be positive")
        if self.precision is not None and self.precision < 1:
            raise ValueError("precision must be positive")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    # SUPPRESS keeps a subcommand's unset flag from overwriting one given before it
    common.add_argument("--precision", type=int, metavar="T", default=argparse.SUPPRESS,
                        help="Laurent truncation order")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="print the certificate as JSON")
    common.add_argument("--out", metavar="PATH", default=argparse.SUPPRESS, help="write the certificate JSON here")
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS,
                        help=f"curve-degree budget for searches (default {DEFAULT_BUDGET})")

    parser = _Parser(prog="raynaud", description="Certify n-Tango curves and n-Raynaud surfaces.",
                     parents=[common])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    s = sub.add_parser("certify-tango", parents=[common], help="conditions (1) and (2) for a curve")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--e", type=int, required=True)
    s.add_argument("--shape", metavar="FILE", help="curve fixture file")

    s = sub.add_parser("check-lift", parents=[common], help="built-in fixtures 2.3 and 2.4")
    s.add_argument("--fixture", choices=["2.3", "2.4"], required=True)
    s.add_argument("--p", type=int, default=2)

    s = sub.add_parser("surface-info", parents=[common], help="numerics and canonical class of X")
    for name in ("p", "n", "e", "l"):
        s.add_argument(f"--{name}", type=int, required=True)

    s = sub.add_parser("pushforward", parents=[common], help="psi_* O(+-m S~) as l summands")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--sign", choices=["pos", "neg"], required=True)
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--p", type=int, default=2)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--e", type=int, default=3)

    s = sub.add_parser("fujita", parents=[common], help="adjoint base-point counterexample for r")
    s.add_argument("--r", type=int, action="append", required=True, help="repeatable")
    s.add_argument("--jobs", type=int, default=1)

    s = sub.add_parser("nonvanish", parents=[common], help="H^1(X, H^-p^m) != 0")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--k", type=int)
    return parser


# ---------------------------------------------------------------------------
# subcommands


def _certify_tango(cfg: RunConfig) -> Certificate:
    p, n, e = (cfg.params[k] for k in ("p", "n", "e"))
    shape = cfg.params.get("shape")
    if shape:
        C = parse_curve_fixture(Path(shape).read_text())
        if (C.p, C.n, C.e) != (p, n, e):
            raise ValueError(f"fixture header {(C.p, C.n, C.e)} does not match --p --n --e {(p, n, e)}")
        datum = build_custom_datum(C) if C.variant == "custom" else build_standard_datum(p, n, e, C.shape)
    else:
        datum = build_standard_datum(p, n, e)
    return certify_tango(datum)


def _check_lift(cfg: RunConfig) -> Certificate:
    name, p = cfg.params["fixture"], cfg.params["p"]
    datum = fixture_datum(name, p)
    c1 = certify_condition1(datum)
    c2 = certify_condition2(datum)
    cert = Certificate(dict(datum.describe(), fixture=name))
    cert.add(Check("condition_1", c1.status, {"claim": "status", "status": c1.status.value,
                                              "certificate": c1.to_dict()}, "(df) = p^n D"))
    cert.add(Check("condition_2", c2.status, {"claim": "status", "status": c2.status.value,
                                              "certificate": c2.to_dict()}, "gamma has a p^n-th root"))
    depth = failure_depth(c2)
    if cert.status == Status.PASS:
        stmt = f"fixture {name}: (C, z1, {datum.D}) is {datum.n}-Tango data"
    elif depth is not None:
        stmt = f"fixture {name}: condition (2) FAIL at depth {depth}"
    else:
        failed = [c.id for c in cert.checks if c.status != Status.PASS]
        stmt = f"fixture {name}: {', '.join(failed)} not certified"
    return cert.conclude(stmt, list(c2.conclusion.get("notes", [])))


def _surface_info(cfg: RunConfig) -> Certificate:
    P = RaynaudParams(*(cfg.params[k] for k in ("p", "n", "e", "l")))
    cert = Certificate(P.describe())
    s2 = (2 * P.genus - 2, P.P * P.l)
    cert.add(Check.evaluated("S2_equals_deg_N", {"claim": "eq", "lhs": f"{s2[0]}/{s2[1]}", "rhs": P.deg_N,
                                                  "numerator": s2[0], "denominator": s2[1]},
                             "(S~^2) = (2g-2)/(p^n l) = deg N"))
    S, T, F, K = S_tilde(), T_tilde(P), fibre(), canonical_class(P)
    cert.add(Check.evaluated("S_dot_T", {"claim": "eq", "lhs": int(intersection(S, T, P)), "rhs": 0},
                             "S~ and T~ are disjoint"))
    g2 = 2 * P.genus - 2
    cert.add(Check.evaluated("adjunction_S", {"claim": "eq", "lhs": int(intersection(K + S, S, P)), "rhs": g2},
                             "(K_X + S~).S~ = 2g - 2"))
    cert.add(Check.evaluated("adjunction_T", {"claim": "eq", "lhs": int(intersection(K + T, T, P)), "rhs": g2},
                             "(K_X + T~).T~ = 2g - 2"))
    a = K.a
    numbers = {"K.K": intersection(K, K, P), "K.S~": intersection(K, S, P),
               "K.T~": intersection(K, T, P), "K.F": intersection(K, F, P)}
    notes = [f"K_X = {K}", "K_X numbers: " + ", ".join(f"{k}={v}" for k, v in numbers.items())]
    if a == 0:
        notes.append("K_X is a pullback from C: phi is a quasi-elliptic fibration")
    elif a > 0:
        notes.append("K_X is numerically positive on S~, T~ and fibres")
    else:
        notes.append("S~-coefficient of K_X is negative")
    return cert.conclude(f"K_X = ({a}) S~ + phi^*({K.base}); (S~^2) = {P.deg_N}", notes)


def _pushforward(cfg: RunConfig) -> Certificate:
    m, sign = cfg.params["m"], cfg.params["sign"]
    P = RaynaudParams(*(cfg.params[k] for k in ("p", "n", "e", "l")))
    push = push_psi_pos if sign == "pos" else push_psi_neg
    rows = push(m, P)
    cert = Certificate(dict(P.describe(), m=m, sign=sign))
    cert.add(Check.evaluated("rank_l", {"claim": "eq", "lhs": len(rows), "rhs": P.l}, "psi is finite of degree l"))
    # projection formula: O(+-(m + l) S~) = O(+-m S~) (x) psi^* O(+-S)
    shift = 1 if sign == "pos" else -1
    shifted = [c.__class__(c.h + shift, c.base) for c in rows]
    cert.add(Check.evaluated("projection_formula", {"claim": "eq", "lhs": [c.to_json() for c in push(m + P.l, P)],
                                                    "rhs": [c.to_json() for c in shifted]},
                             "psi^* O(S) = O(l S~)"))
    table = [f"i={i}: {c}" for i, c in enumerate(rows)]
    label = "" if sign == "pos" else "-"
    return cert.conclude(f"psi_* O({label}{m} S~) = " + " + ".join(str(c) for c in rows), table)


def _nonvanish(cfg: RunConfig) -> Certificate:
    return certify_nonvanishing(cfg.params["m"], cfg.params["p"], cfg.params.get("k"))


SUBCOMMANDS = {
    "certify-tango": _certify_tango,
    "check-lift": _check_lift,
    "surface-info": _surface_info,
    "pushforward": _pushforward,
    "nonvanish": _nonvanish,
}


# ---------------------------------------------------------------------------
# output


def _emit(cert: Certificate, cfg: RunConfig, out: Optional[str], stream) -> None:
    if cfg.structured:
        stream.write(cert.to_json() + "\n")
    else:
        stream.write(cert.report() + "\n")
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(cert.to_json() + "\n")
        if not cfg.structured:
            stream.write(f"certificate written to {out}\n")


def _fujita_out(cfg: RunConfig, r: int, multiple: bool) -> str:
    if cfg.out is None:
        return f"fujita_r{r}.json"
    if not multiple:
        return cfg.out
    path = Path(cfg.out)
    return str(path.with_name(f"{path.stem}_r{r}{path.suffix or '.json'}"))


def _run_fujita(cfg: RunConfig, stream) -> int:
    rs = cfg.params["r"]
    results = fujita_many(rs, cfg.params["budget"], cfg.params.get("jobs", 1))
    statuses = []
    for r, res in zip(rs, results):
        if isinstance(res, Exception):
            sys.stderr.write(f"r={r}: {res}\n")
            statuses.append(None)
            continue
        _, cert = res
        _emit(cert, cfg, _fujita_out(cfg, r, len(rs) > 1), stream)
        statuses.append(cert.status)
    if any(s is None for s in statuses):
        return USAGE_EXIT
    return EXIT_CODES[combine(statuses)]


def parse_config(argv: List[str]) -> RunConfig:
    args = build_parser().parse_args(argv)
    ns = vars(args)
    params = {k: v for k, v in ns.items() if k not in ("command", "precision", "json", "out")}
    params.setdefault("budget", DEFAULT_BUDGET)
    cfg = RunConfig(args.command, params, ns.get("precision"), ns.get("out"), bool(ns.get("json")))
    cfg.validate()
    if cfg.params.get("jobs", 1) < 1:
        raise ValueError("jobs must be positive")
    for r in cfg.params.get("r") or []:
        if r < 1:
            raise ValueError("r must be positive")
    if cfg.params["budget"] < 1:
        raise ValueError("budget must be positive")
    return cfg


def run(argv: Optional[List[str]] = None, stream=None) -> int:
    """Run one subcommand and return its exit code."""
    stream = stream or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return USAGE_EXIT
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_EXIT
    previous = os.environ.get(PRECISION_ENV)
    if cfg.precision is not None:
        os.environ[PRECISION_ENV] = str(cfg.precision)
    try:
        if cfg.subcommand == "fujita":
            return _run_fujita(cfg, stream)
        cert = SUBCOMMANDS[cfg.subcommand](cfg)
        _emit(cert, cfg, cfg.out, stream)
        return EXIT_CODES[cert.status]
    except InconclusiveError as exc:
        sys.stderr.write(f"inconclusive: {exc}\n")
        return EXIT_CODES[Status.INCONCLUSIVE]
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_EXIT
    finally:
        if cfg.precision is not None:
            if previous is None:
                os.environ.pop(PRECISION_ENV, None)
            else:
                os.environ[PRECISION_ENV] = previous


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
