"""Command-line front end.

Exit codes: 0 when everything ran and every asserted containment holds, 2
when an asserted containment fails, 1 for usage, I/O and numerical
integrity errors.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .adcalc import centralizer, double_centralizer
from .certify import certify_smiley, matrix_digest
from .decomp import jordan_chevalley
from .errors import CentralabError, PreconditionError
from .experiments import BatchConfig, batch_run
from .hulls import pol_hull, vn_hull
from .io import emit_report, matrix_document, parse_matrix, subspace_document
from .numlin import ToleranceConfig
from .shiftlab import (
    c2_structure_check,
    diag_progression_check,
    nilpotent_lift_vanishes,
    shift_truncation,
    truncated_smiley,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ASSERTION = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _add_common(p, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    p.add_argument("--tol-rank", type=float, default=default, dest="tol_rank",
                   help="relative singular-value cutoff for kernels and spans")
    p.add_argument("--tol-contain", type=float, default=default, dest="tol_contain",
                   help="residual cutoff for subspace containment")
    p.add_argument("--tol-zero", type=float, default=default, dest="tol_zero",
                   help="cutoff for treating a matrix as zero")
    p.add_argument("--tol-cluster", type=float, default=default, dest="tol_cluster",
                   help="relative eigenvalue clustering distance")
    p.add_argument("--seed", type=int, default=default, help="seed recorded in outputs")
    p.add_argument("--threads", type=int, default=default,
                   help="worker threads for batch (default: $CENTRALAB_THREADS or 1)")
    p.add_argument("--output", "-o", default=default, help="write JSON here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="centralab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"centralab {__version__}")
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        _add_common(p, suppress=True)
        return p

    p = add("centralizer", "basis of C_s(A)")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--s", type=int, required=True)

    p = add("double", "basis of C_k(C_l(A))")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)

    p = add("decompose", "canonical S + N decomposition")
    p.add_argument("--input", "-i", required=True)

    p = add("hulls", "Pol(A) and VN(A)")
    p.add_argument("--input", "-i", required=True)

    p = add("certify", "Smiley containment certificate")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)

    p = add("shift", "truncated shift structure report")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--l", type=int, default=2)

    p = add("batch", "run a batch experiment from a JSON config")
    p.add_argument("--config", "-c", required=True)
    return parser


def _tolerances(args) -> ToleranceConfig:
    base = ToleranceConfig()
    try:
        return ToleranceConfig(
            rank_rel_tol=args.tol_rank if args.tol_rank is not None else base.rank_rel_tol,
            containment_tol=args.tol_contain if args.tol_contain is not None else base.containment_tol,
            zero_tol=args.tol_zero if args.tol_zero is not None else base.zero_tol,
            cluster_tol=args.tol_cluster if args.tol_cluster is not None else base.cluster_tol,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _threads(args) -> int:
    if args.threads is not None:
        value = args.threads
    else:
        env = os.environ.get("CENTRALAB_THREADS")
        if env is None or env == "":
            return 1
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"CENTRALAB_THREADS must be an integer, got {env!r}") from None
    if value < 1:
        raise UsageError(f"threads must be ≥ 1, got {value}")
    return value


def _complex_list(values) -> dict:
    values = np.asarray(values, dtype=np.complex128)
    return {"re": values.real.tolist(), "im": values.imag.tolist()}


def cmd_centralizer(args, tol):
    A = parse_matrix(args.input)
    C = centralizer(A, args.s, tol)
    return {"s": args.s, "digest": matrix_digest(A), "centralizer": subspace_document(C),
            "tolerances": tol.as_dict()}, EXIT_OK


def cmd_double(args, tol):
    A = parse_matrix(args.input)
    if args.k < 1:
        raise PreconditionError(f"k must be ≥ 1, got {args.k}")
    if args.l < 1:
        raise PreconditionError(f"l must be ≥ 1, got {args.l}")
    D = double_centralizer(A, args.k, args.l, tol)
    return {"k": args.k, "l": args.l, "digest": matrix_digest(A),
            "double_centralizer": subspace_document(D), "tolerances": tol.as_dict()}, EXIT_OK


def cmd_decompose(args, tol):
    A = parse_matrix(args.input)
    dec = jordan_chevalley(A, tol)
    return {
        "digest": matrix_digest(A),
        "S": matrix_document(dec.S),
        "N": matrix_document(dec.N),
        "m": dec.m,
        "eigenvalues": _complex_list(dec.eigenvalues),
        "projectors": [{"eigenvalue": _complex_list([lam]), "P": matrix_document(P)}
                       for lam, P in dec.projectors],
        "warnings": list(dec.warnings),
        "tolerances": tol.as_dict(),
    }, EXIT_OK


def cmd_hulls(args, tol):
    A = parse_matrix(args.input)
    return {"digest": matrix_digest(A), "pol": subspace_document(pol_hull(A, tol)),
            "vn": subspace_document(vn_hull(A, tol)), "tolerances": tol.as_dict()}, EXIT_OK


def cmd_certify(args, tol):
    A = parse_matrix(args.input)
    if args.k < 1 or args.l < 1:
        raise PreconditionError(f"k and l must be ≥ 1, got k={args.k}, l={args.l}")
    cert = certify_smiley(A, args.k, args.l, tol, seed=args.seed)
    doc = cert.to_dict()
    asserted = args.k <= args.l
    doc["asserted"] = asserted
    code = EXIT_ASSERTION if asserted and not (cert.is_proper and cert.is_smiley) else EXIT_OK
    return doc, code


def cmd_shift(args, tol):
    n = args.n
    J = shift_truncation(n)
    doc = {"n": n, "matrix": matrix_document(J), "nilpotent_lift_vanishes": nilpotent_lift_vanishes(n, tol),
           "c2_structure": None, "diag_progression": None, "tolerances": tol.as_dict()}
    ok = doc["nilpotent_lift_vanishes"]
    if n >= 6:
        rep = c2_structure_check(n, tol)
        doc["c2_structure"] = rep.to_dict()
        ok = ok and rep.passed
    if n >= 4:
        cases = {"identity": np.ones(n), "linear": np.arange(1.0, n + 1),
                 "squares": np.arange(1.0, n + 1) ** 2}
        doc["diag_progression"] = {name: diag_progression_check(n, beta, tol).to_dict()
                                   for name, beta in cases.items()}
        ok = ok and all(c["consistent"] for c in doc["diag_progression"].values())
    cert = truncated_smiley(n, args.k, args.l, tol, seed=args.seed)
    doc["certificate"] = cert.to_dict()
    ok = ok and cert.is_proper
    return doc, EXIT_OK if ok else EXIT_ASSERTION


def cmd_batch(args, tol):
    cfg = BatchConfig.load(args.config)
    report = batch_run(cfg, threads=_threads(args))
    agg = report.aggregate
    if args.output is None and cfg.output_path is not None:
        args.output = cfg.output_path
    if agg["errors"]:
        code = EXIT_ERROR
    elif agg["asserted_failed"]:
        code = EXIT_ASSERTION
    else:
        code = EXIT_OK
    return report, code


COMMANDS = {
    "centralizer": cmd_centralizer,
    "double": cmd_double,
    "decompose": cmd_decompose,
    "hulls": cmd_hulls,
    "certify": cmd_certify,
    "shift": cmd_shift,
    "batch": cmd_batch,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        tol = _tolerances(args)
        _threads(args)
        doc, code = COMMANDS[args.command](args, tol)
        if args.output is not None:
            emit_report(doc, path=args.output)
        else:
            emit_report(doc, stream=sys.stdout)
        return code
    except UsageError as exc:
        print(f"centralab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:
        # --help and --version
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    except (CentralabError, OSError) as exc:
        print(f"centralab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
