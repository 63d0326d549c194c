"""Command line front-end.

Reports go to stdout as JSON (sorted keys, schema-versioned) or CSV; the
wall-clock time goes to stderr so that stdout is reproducible.

Exit codes: 0 pass, 1 negative verdict, 2 error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

from . import kernels
from .duality import annihilator, dual_endo, duality_expansivity_check, verify_identities
from .dynamics import (DEFAULT_NCAP, DEFAULT_WINDOW, FORWARD, TWO_SIDED, absorbing_witness, certify,
                       check_generator_family, conjecture_harness, entropy_report,
                       entropy_with_generator, epi_audit)
from .errors import GrexpandError
from .subgroup import FiniteSubgroup, all_subgroups, enumeration_cap, full_subgroup
from .suites import ALIASES, SUITES, resolve, run_suites
from .systemfile import load_system

SCHEMA_VERSION = 1

EXIT_PASS, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


class Outcome:
    """Result payload plus the verdict that decides the exit code."""

    def __init__(self, results, negative: bool = False, csv_rows=None, csv_header=None):
        self.results = results
        self.negative = negative
        self.csv_rows = csv_rows
        self.csv_header = csv_header


def _side(args, phi) -> str:
    if args.side != "auto":
        return args.side
    return TWO_SIDED if phi.is_automorphism and not phi.domain.is_finite else FORWARD


def _system(args):
    if not args.system:
        raise GrexpandError(f"{args.command} needs --system PATH")
    return load_system(args.system)


def cmd_entropy(args):
    sys_ = _system(args)
    rep = entropy_report(sys_.phi, sys_.subgroup(args.subgroup), args.nmax)
    return Outcome(rep.to_json(), csv_rows=rep.rows(), csv_header=["n", "order", "log_order", "ratio"])


def cmd_check_generator(args):
    sys_ = _system(args)
    S = sys_.subgroup(args.subgroup)
    cert = certify(sys_.phi, S, _side(args, sys_.phi), args.window, args.ncap)
    return Outcome(cert.to_json(), negative=not cert.positive)


def cmd_certify(args):
    """Certificate plus, when positive, the total entropy it determines."""
    sys_ = _system(args)
    S = sys_.subgroup(args.subgroup)
    cert = certify(sys_.phi, S, _side(args, sys_.phi), args.window, args.ncap)
    out = {"certificate": cert.to_json()}
    if cert.positive:
        out["entropy"] = entropy_with_generator(sys_.phi, S, cert, args.nmax).to_json()
    return Outcome(out, negative=not cert.positive)


def cmd_dualize(args):
    sys_ = _system(args)
    psi = dual_endo(sys_.phi)
    side = _side(args, sys_.phi)
    per = {}
    ok = True
    for name, S in sys_.subgroups.items():
        rep = duality_expansivity_check(sys_.phi, S, side)
        ok = ok and rep.holds
        per[name] = {"annihilator": annihilator(S).to_json(), "dual_chain": rep.to_json()}
    return Outcome({"dual_matrix": [list(r) for r in psi.A], "subgroups": per}, negative=not ok)


def cmd_annihilator(args):
    sys_ = _system(args)
    H = sys_.subgroup(args.subgroup)
    ann = annihilator(H)
    rep = verify_identities(sys_.spec, sys_.phi, [H])
    return Outcome({"subgroup": H.to_json(), "annihilator": ann.to_json(),
                    "identities": rep.to_json()}, negative=not rep.holds)


def cmd_audit_epi(args):
    sys_ = _system(args)
    finding = epi_audit(sys_.phi, sys_.subgroup(args.subgroup), args.window, args.ncap)
    return Outcome(finding.to_json(), negative=finding.is_violation)


def cmd_lemma41(args):
    sys_ = _system(args)
    K, rep = absorbing_witness(sys_.phi, sys_.subgroup(args.subgroup))
    return Outcome({"K": K.to_json(), "report": rep.to_json()}, negative=not rep.holds)


def cmd_verify(args):
    results = run_suites(args.suite, seed=args.seed, max_order=args.max_order)
    failed = [r.name for r in results if not r.passed]
    rows = [(r.name, int(r.passed), r.cases, r.failure_count) for r in results]
    return Outcome({"suites": [r.to_json() for r in results], "failed": failed},
                   negative=bool(failed), csv_rows=rows,
                   csv_header=["suite", "passed", "cases", "failures"])


def cmd_scan(args):
    """Search candidate generators: every subgroup (finite) or coordinate windows (families)."""
    sys_ = _system(args)
    phi, spec = sys_.phi, sys_.spec
    side = _side(args, phi)
    found = []
    if spec.is_finite:
        for S in all_subgroups(spec):
            cert = certify(phi, S, side)
            if cert.positive:
                found.append({"generator": S.to_json(), "order": S.order, "n_star": cert.n_star})
        least = min((f["order"] for f in found), default=None)
        out = {"side": side, "generators": len(found),
               "minimal": [f for f in found if f["order"] == least]}
    else:
        windows = []
        for w in range(args.window + 1):
            lo = -w if spec.pattern.index == "integers" and side == TWO_SIDED else 0
            S = full_subgroup(spec, lo, w)
            cert = check_generator_family(phi, S, args.window, args.ncap, side)
            windows.append({"support": [S.support[0], S.support[-1]] if S.support else [],
                            "positive": cert.positive, "failures": list(cert.failures)})
            if cert.positive:
                found.append(S)
                break
        out = {"side": side, "windows": windows}
        named = [(n, S) for n, S in sys_.subgroups.items()]
        if sys_.patterns and named:
            S = found[0] if found else named[0][1]
            rep = conjecture_harness(phi, S, list(sys_.patterns.values()), args.window, args.ncap, side)
            out["restriction"] = rep.to_json()
            out["restriction"]["names"] = sorted(sys_.patterns)
    return Outcome(out, negative=not found)


COMMANDS = {
    "entropy": (cmd_entropy, "forward trajectory orders and the entropy relative to a subgroup"),
    "check-generator": (cmd_check_generator, "(windowed) generator certificate for a subgroup"),
    "certify": (cmd_certify, "generator certificate plus the total entropy it yields"),
    "dualize": (cmd_dualize, "dual endomorphism, annihilators and dual chains"),
    "annihilator": (cmd_annihilator, "annihilator of a subgroup with identity checks"),
    "audit-epi": (cmd_audit_epi, "audit a would-be positively expansive epimorphism"),
    "lemma41": (cmd_lemma41, "absorbing witness subgroup for a surjective finite system"),
    "verify": (cmd_verify, "run property suites"),
    "scan": (cmd_scan, "search for generators"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="grexpand", description="Algebraic expansivity and entropy toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s (backend: {kernels.BACKEND})")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        c = sub.add_parser(name, help=help_text)
        c.add_argument("--system", metavar="PATH")
        c.add_argument("--subgroup", metavar="NAME")
        c.add_argument("--nmax", metavar="N", type=int, default=12)
        c.add_argument("--window", metavar="J", type=int, default=DEFAULT_WINDOW)
        c.add_argument("--ncap", metavar="N", type=int, default=DEFAULT_NCAP)
        c.add_argument("--max-order", metavar="N", type=int, default=None)
        c.add_argument("--seed", metavar="N", type=int, default=0)
        c.add_argument("--format", choices=("json", "csv"), default="json")
        c.add_argument("--side", choices=("auto", FORWARD, TWO_SIDED), default="auto")
        if name == "verify":
            names = ", ".join(list(SUITES) + sorted(ALIASES))
            c.add_argument("--suite", default="all", help=f"comma-separated suites or 'all': {names}")
    return p


def _parameters(args) -> dict:
    keys = ("system", "subgroup", "nmax", "window", "ncap", "max_order", "seed", "side")
    out = {k: getattr(args, k) for k in keys}
    if args.command == "verify":
        out["suite"] = resolve(args.suite)
    out["cap"] = enumeration_cap()
    return out


def render(args, outcome: Outcome) -> str:
    if args.format == "csv":
        if outcome.csv_rows is None:
            raise GrexpandError(f"csv output is not available for {args.command}")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(outcome.csv_header)
        w.writerows(outcome.csv_rows)
        return buf.getvalue()
    report = {"schema_version": SCHEMA_VERSION, "command": args.command,
              "parameters": _parameters(args), "results": outcome.results,
              "verdict": "negative" if outcome.negative else "pass"}
    return json.dumps(report, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, FiniteSubgroup):
        return obj.to_json()
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_PASS
    start = time.perf_counter()
    try:
        outcome = COMMANDS[args.command][0](args)
        text = render(args, outcome)
    except (GrexpandError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(json.dumps({"schema_version": SCHEMA_VERSION, "command": args.command,
                          "error": type(exc).__name__, "message": str(msg)}, sort_keys=True),
              file=sys.stderr)
        return EXIT_ERROR
    sys.stdout.write(text)
    print(json.dumps({"timing_seconds": round(time.perf_counter() - start, 6)}), file=sys.stderr)
    return EXIT_NEGATIVE if outcome.negative else EXIT_PASS


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
