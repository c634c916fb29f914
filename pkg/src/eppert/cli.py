"""Command-line front end: JSON for structured results, CSV for sweeps."""

import argparse
import dataclasses
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, bosehubbard, jordan, l1, lgeq2, partitions
from .config import DEFAULT
from .errors import NumericalError
from .numkit import eig_oracle, match_distance, load_matrix, matrix_to_json

EXIT_INPUT, EXIT_NUMERICAL = 2, 3


class InputError(Exception):
    pass


class PartialResult(NumericalError):
    """Numerical failure that still carries the roots that did converge."""

    def __init__(self, payload, msg):
        super().__init__(msg)
        self.payload = payload


def _tol(args):
    return DEFAULT.with_overrides(reality=args.tol_reality, rank=args.tol_rank)


def _complex_list(z):
    return [[float(v.real), float(v.imag)] for v in np.asarray(z, dtype=complex).ravel()]


def _load(path, name):
    try:
        return load_matrix(path)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read {name} from {path}: {exc}") from exc


def _partition(text):
    try:
        return jordan.PartitionSpec.parse(text)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad partition {text!r}: {exc}") from exc


def cmd_partitions(args):
    try:
        return partitions.enumerate_ep_partitions(args.K).to_json()
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def cmd_jordan(args):
    h = _load(args.matrix, "matrix")
    part = jordan.detect_jordan_structure(h, args.eta, args.tol_rank, _tol(args))
    spec = jordan.JordanSpec(part, args.eta)
    q = jordan.transition_matrix(h, spec, args.tol_rank, _tol(args))
    return {"partition": part.to_json(), "L": part.L, "eta": args.eta,
            "transition_matrix": matrix_to_json(q),
            "transition_residual": jordan.transition_residual(h, q, spec)}


def cmd_bose_hubbard(args):
    try:
        p = bosehubbard.BHParams(args.K, args.gamma, args.v, args.c)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    h = bosehubbard.build_hamiltonian(p)
    oracle = eig_oracle(h, _tol(args))
    out = {"matrix": matrix_to_json(h), "oracle": oracle.to_json()}
    if args.c == 0 and args.v == 1:
        values, real = bosehubbard.closed_form_spectrum(args.K, args.gamma)
        out["closed_form"] = {"values": [float(x) for x in values], "is_real": real}
        out["max_deviation"] = match_distance(oracle.roots, values) if real else None
    return out


def cmd_l1_solve(args):
    v = _load(args.matrix, "matrix")
    try:
        problem = l1.L1Problem(v, args.lam)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    order = l1.default_order(problem.K) if args.order is None else args.order
    rep = l1.solve_secular(problem, order, _tol(args)).smallest(problem.K).sorted()
    oracle = eig_oracle(problem.hamiltonian(), _tol(args))
    series = l1.series_solution(problem, order)
    residuals = [l1.schrodinger_residual(problem, e, l1.reconstruct_psi(series, e))
                 for e in rep.roots]
    return {"order": order, "secular": rep.to_json(), "oracle": oracle.to_json(),
            "max_deviation": match_distance(rep.roots, oracle.roots),
            "schrodinger_residuals": residuals}


def _l2_problem(args, lam):
    part = _partition(args.partition)
    try:
        if args.rescaled:
            return lgeq2.rescaled_problem(_load(args.rescaled, "W"), part, lam)
        if not args.matrix:
            raise InputError("--matrix or --rescaled is required")
        return lgeq2.LProblem(part, _load(args.matrix, "matrix"), lam)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _l2_roots(problem, order, tol):
    if problem.lam == 0:
        return lgeq2.CompatResult([lgeq2.CompatRoot(0j, lgeq2.normalize_omega(np.eye(problem.L)[0]), 0.0)
                                   for _ in range(problem.K)])
    return lgeq2.solve_compat_system(problem, order, tol=tol)


def cmd_l2_solve(args):
    tol = _tol(args)
    problem = _l2_problem(args, args.lam)
    order = 4 if args.order is None else args.order
    oracle = eig_oracle(problem.hamiltonian(), tol)
    out = {"order": order, "oracle": oracle.to_json()}
    if problem.lam == 0:
        out["leading_order"] = {"roots": _complex_list(np.zeros(problem.K))}
    else:
        lo = lgeq2.solve_leading_order(problem, tol=tol)
        out["leading_order"] = lo.to_json()
    res = _l2_roots(problem, order, tol)
    refined = [{"eps": [r.eps.real, r.eps.imag], "omega": _complex_list(r.omega),
                "residual": r.residual} for r in res]
    out["refined"] = refined
    out["failed_seeds"] = len(res.failed)
    out["max_deviation"] = match_distance(res.eps, oracle.roots)
    out["all_real"] = bool(np.all(np.abs(res.eps.imag) <= tol.reality * np.maximum(1, np.abs(res.eps))))
    if args.rescaled:
        W = _load(args.rescaled, "W")
        E = lgeq2.solve_rescaled_leading_order(W, problem.partition, args.lam, tol)
        out["rescaled"] = {"E": E.to_json(), "in_domain": lgeq2.in_domain(E, tol)}
    if len(res) < problem.K:
        out["partial"] = True
        raise PartialResult(out, f"only {len(res)} of {problem.K} roots converged")
    return out


def _sweep_point(args, lam, tol):
    if args.partition and _partition(args.partition).L >= 2:
        problem = _l2_problem(args, lam)
        eps = _l2_roots(problem, 4 if args.order is None else args.order, tol).eps
    else:
        problem = l1.L1Problem(_load(args.matrix, "matrix"), lam)
        eps = l1.solve_secular(problem, args.order, tol).smallest(problem.K).sorted().roots
    return lam, eps


def cmd_sweep(args):
    tol = _tol(args)
    if args.points < 1 or not 0 < args.lambda_min <= args.lambda_max:
        raise InputError("need points >= 1 and 0 < lambda-min <= lambda-max")
    grid = np.geomspace(args.lambda_min, args.lambda_max, args.points)
    with ThreadPoolExecutor() as pool:
        results = list(pool.map(lambda lam: _sweep_point(args, float(lam), tol), grid))
    rows = []
    for lam, eps in sorted(results, key=lambda r: r[0]):
        for i, z in enumerate(eps):
            real = abs(z.imag) <= tol.reality * max(1.0, abs(z))
            rows.append((repr(lam), i, repr(float(z.real)), repr(float(z.imag)), int(real)))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lambda", "root_index", "re", "im", "is_real"])
    w.writerows(rows)
    return buf.getvalue()


def cmd_classify(args):
    tol = _tol(args)
    part = _partition(args.partition)
    if args.search:
        if args.seed is None:
            raise InputError("--search requires --seed")
        W, rep, tries = lgeq2.search_domain(part, args.seed, args.max_tries, tol=tol)
        out = {"W": matrix_to_json(W), "tries": tries}
    elif args.matrix:
        W = _load(args.matrix, "W")
        try:
            rep = lgeq2.solve_rescaled_leading_order(W, part, 1.0, tol)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        out = {}
    else:
        raise InputError("classify needs --matrix W.json or --search")
    out.update({"E": rep.to_json(), "all_real": rep.all_real,
                "distinct": rep.is_distinct(tol), "in_domain": lgeq2.in_domain(rep, tol)})
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-reality", type=float, default=None)
    common.add_argument("--tol-rank", type=float, default=None)
    common.add_argument("--order", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--output", "-o", default=None, help="write to file instead of stdout")

    parser = argparse.ArgumentParser(prog="eppert", description=__doc__)
    parser.add_argument("--version", action="version", version=f"eppert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partitions", parents=[common], help="EP partition catalog")
    p.add_argument("--K", type=int, required=True)
    p.set_defaults(func=cmd_partitions)

    p = sub.add_parser("jordan", parents=[common], help="Jordan structure of a matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--eta", type=float, default=0.0)
    p.set_defaults(func=cmd_jordan)

    p = sub.add_parser("bose-hubbard", parents=[common], help="PT-symmetric Bose-Hubbard spectrum")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--v", type=float, default=1.0)
    p.add_argument("--c", type=float, default=0.0)
    p.set_defaults(func=cmd_bose_hubbard)

    p = sub.add_parser("l1-solve", parents=[common], help="secular equation near an EPK")
    p.add_argument("--matrix", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.set_defaults(func=cmd_l1_solve)

    p = sub.add_parser("l2-solve", parents=[common], help="compatibility system for L >= 2")
    p.add_argument("--partition", required=True)
    p.add_argument("--matrix")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--rescaled", metavar="W.json", help="build V from W with lambda scaling")
    p.set_defaults(func=cmd_l2_solve)

    p = sub.add_parser("sweep", parents=[common], help="roots over a log grid of lambda (CSV)")
    p.add_argument("--partition", help="omit for a single Jordan block")
    p.add_argument("--matrix")
    p.add_argument("--rescaled", metavar="W.json")
    p.add_argument("--lambda-min", type=float, required=True)
    p.add_argument("--lambda-max", type=float, required=True)
    p.add_argument("--points", type=int, default=9)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("classify", parents=[common], help="reality of the rescaled leading order")
    p.add_argument("--partition", required=True)
    p.add_argument("--matrix", help="W.json")
    p.add_argument("--search", action="store_true", help="randomized search for an all-real W")
    p.add_argument("--max-tries", type=int, default=20000)
    p.set_defaults(func=cmd_classify)
    return parser


def _config_echo(args):
    echo = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output")}
    echo["tolerances"] = dataclasses.asdict(_tol(args))
    return echo


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(payload, args):
    body = {"config": _config_echo(args), "version": __version__, "result": payload}
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep" and not (args.matrix or args.rescaled):
        parser.error("sweep needs --matrix or --rescaled")
    try:
        DEFAULT.with_overrides(reality=args.tol_reality, rank=args.tol_rank)
        result = args.func(args)
    except InputError as exc:
        print(f"eppert: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"eppert: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PartialResult as exc:
        _emit(_dump(exc.payload, args), args.output)
        print(f"eppert: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NumericalError as exc:
        print(f"eppert: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if isinstance(result, str):
        _emit(result, args.output)
        if args.output:
            _emit(_dump({"csv": args.output}, args), args.output + ".json")
    else:
        _emit(_dump(result, args), args.output)
    return 0
