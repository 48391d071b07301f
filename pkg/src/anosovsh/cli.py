"""Command-line driver.

Exit status: 0 on success, 2 when an analyzer reports an obstruction or a
verification fails, 1 on any error (the diagnostic names the bad field).
"""

from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal, InvalidOperation

from . import __version__
from ._parallel import default_workers
from .bundles import CONVERGENCE_TOL, attach_suspension_holonomy, homology_naturality_check
from .census import count_series, entropy_estimate, gamma_estimate, squeeze_rate
from .errors import AnosovSHError, ConfigError, ValidationError
from .homology import (
    bounded_homology_analyzer,
    build_e2_page,
    degeneration_check,
    sphere_obstruction_analyzer,
)
from .models import (
    EllipsoidModel,
    ToralSuspension,
    build_census,
    ellipsoid_truncation_for_degree,
    model_from_spec,
)
from .serialize import counts_csv, dump_census, dumps, read_census
from .symplin import DEGENERACY_TOL, DET_REL_TOL, Parity
from .verify import verify_blockform, verify_cz, verify_parity

EXIT_OK, EXIT_ERROR, EXIT_FINDING = 0, 1, 2
SQUEEZE_TOL = 0.1
DEFAULT_TRIALS = {"blockform": 1000, "cz": 20, "parity": 500}


# --- configuration ---------------------------------------------------------

def parse_grid(text):
    """``A:B:STEP`` -> ``[A, A + STEP, ..., <= B]`` computed in decimal."""
    try:
        a, b, step = (Decimal(x) for x in text.split(":"))
    except (ValueError, InvalidOperation):
        raise ConfigError("grid", f"expected A:B:STEP, got {text!r}") from None
    if step <= 0 or b < a or a <= 0:
        raise ConfigError("grid", "need 0 < A <= B and STEP > 0")
    n = int((b - a) / step) + 1
    if n < 2:
        raise ConfigError("grid", "grid needs at least two points")
    return [float(a + i * step) for i in range(n)]


def load_model(path):
    if path is None:
        raise ConfigError("model", "--model is required")
    try:
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
    except OSError as exc:
        raise ConfigError("model", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("model", f"{path} is not valid JSON: {exc.msg}") from None
    return model_from_spec(spec)


def workers_from(args):
    if args.workers is None:
        return default_workers()
    if args.workers < 1:
        raise ConfigError("workers", "must be at least 1")
    return args.workers


def require(args, name):
    value = getattr(args, name)
    if value is None:
        raise ConfigError(name.replace("_", "-"), "required for this subcommand")
    return value


def tmax_from(args):
    T = require(args, "tmax")
    if not T > 0:
        raise ConfigError("tmax", "must be positive")
    return T


def emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _build(model, T, workers, holonomy):
    try:
        table = build_census(model, T, workers=workers)
    except ValidationError as exc:
        raise ConfigError("model", str(exc)) from None
    if holonomy and isinstance(model, ToralSuspension):
        table = attach_suspension_holonomy(table, workers)
    return table


def load_table(args, workers):
    """Census from ``--census``, or built from ``--model`` at ``--tmax``.

    For an ellipsoid without ``--tmax`` the truncation covering
    ``--max-degree`` is used.
    """
    if args.census is not None:
        try:
            return read_census(args.census)
        except OSError as exc:
            raise ConfigError("census", f"cannot read {args.census}: {exc.strerror}") from None
    model = load_model(args.model)
    if args.tmax is None and isinstance(model, EllipsoidModel) and args.max_degree is not None:
        T = ellipsoid_truncation_for_degree(model, args.max_degree)
    else:
        T = tmax_from(args)
    return _build(model, T, workers, args.holonomy)


# --- subcommands -----------------------------------------------------------

def cmd_census(args, workers):
    model = load_model(args.model)
    table = _build(model, tmax_from(args), workers, args.holonomy)
    emit(dump_census(table), args.out)
    if args.out is not None:
        P, Pg = table.counts
        print(f"P={P} Pg={Pg}")
    return EXIT_OK


def _estimate(args, workers, kind):
    model = load_model(args.model)
    grid = parse_grid(require(args, "grid"))
    series = count_series(model, grid, workers=workers)
    if kind == "entropy":
        counts = {T: P for T, P, _ in series}
        est = entropy_estimate(counts.__getitem__, grid)
    else:
        counts = {T: Pg for T, _, Pg in series}
        est = gamma_estimate(counts.__getitem__, grid)
    if args.out is not None:
        emit(counts_csv(series), args.out)
    summary = {
        "estimator": kind,
        "rate": est.rate,
        "rate_stderr": est.rate_stderr,
        "slope": est.slope,
        "slope_stderr": est.slope_stderr,
        "exp_residual": est.exp_residual,
        "poly_residual": est.poly_residual,
        "flag": est.flag,
    }
    print(dumps(summary))
    return EXIT_OK


def cmd_entropy(args, workers):
    return _estimate(args, workers, "entropy")


def cmd_gamma(args, workers):
    return _estimate(args, workers, "gamma")


def cmd_e2page(args, workers):
    table = load_table(args, workers)
    page = build_e2_page(table)
    signs = [r.holonomy_sign for r in table.records]
    orientable = True if signs and all(s == 1 for s in signs) else None
    verdicts = degeneration_check(page, all_orientable=orientable)
    emit(page.to_csv(), args.out)
    if args.out is not None:
        report = {
            "truncation": page.truncation,
            "grading": page.grading,
            "label_coarsened": page.label_coarsened,
            "total_rank": page.total,
            "classes": [
                {
                    "class_label": v.class_label,
                    "coherent": v.coherent,
                    "parity": None if v.parity is None else str(v.parity),
                    "orientability_violation": v.orientability_violation,
                }
                for v in verdicts.values()
            ],
        }
        print(dumps(report))
    return EXIT_OK


def _verify_census_parity(args, workers):
    model = load_model(args.model)
    if not isinstance(model, ToralSuspension):
        raise ConfigError("model", "per-orbit parity needs a cat-suspension model")
    table = _build(model, tmax_from(args), workers, True)
    lines = ["simple_id,iterate,class_label,cz_parity,holonomy_sign,agree"]
    agree = 0
    for r in table.records:
        ok = (r.cz_parity == Parity.EVEN) == (r.holonomy_sign == 1)
        agree += ok
        lines.append(f"{r.simple_id},{r.iterate},{r.class_label},{r.cz_parity},"
                     f"{r.holonomy_sign:+d},{'yes' if ok else 'NO'}")
    emit("\n".join(lines) + "\n", args.out)
    n = len(table.records)
    natural = homology_naturality_check(table)
    print(f"verdict: {'pass' if agree == n else 'FAIL'} ({agree}/{n} records agree); "
          f"sign constant per label: {'yes' if natural else 'no'}")
    return EXIT_OK if agree == n and natural else EXIT_FINDING


def cmd_verify(args, workers):
    if args.target == "parity" and args.model is not None:
        return _verify_census_parity(args, workers)
    trials = args.trials if args.trials is not None else DEFAULT_TRIALS[args.target]
    if trials < 1:
        raise ConfigError("trials", "must be at least 1")
    if args.target == "blockform":
        rows = verify_blockform(trials, args.seed, workers, args.tol_det, args.tol_degeneracy)
    elif args.target == "cz":
        rows = verify_cz(trials, args.seed, workers, args.tol_degeneracy)
    else:
        rows = verify_parity(trials, args.seed, workers, args.tol_convergence)
    lines = ["check,trials,passed,worst,status"]
    for r in rows:
        lines.append(f"{r.check},{r.trials},{r.passed},{format(r.worst, '.17g')},"
                     f"{'pass' if r.ok else 'FAIL'}")
    emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if all(r.ok for r in rows) else EXIT_FINDING


def cmd_obstruct(args, workers):
    table = load_table(args, workers)
    if args.target == "sphere":
        max_degree = require(args, "max_degree")
        report = sphere_obstruction_analyzer(build_e2_page(table), max_degree, census=table)
    else:
        report = bounded_homology_analyzer(table, require(args, "bound"))
    emit(report.to_json(), args.out)
    if args.out is not None:
        print(" ".join(report.codes))
    return EXIT_FINDING if report.obstruction else EXIT_OK


def cmd_squeeze(args, workers):
    model = load_model(args.model)
    if not isinstance(model, ToralSuspension):
        raise ConfigError("model", "squeeze needs a cat-suspension model")
    grid = parse_grid(require(args, "grid"))
    est = squeeze_rate(model, grid, workers=workers)
    h = model.entropy
    lower, upper = est.rate - h / model.roof.max, h / model.roof.min - est.rate
    ok = lower >= -args.tol_squeeze and upper >= -args.tol_squeeze
    if args.out is not None:
        emit(counts_csv([(T, P, P) for T, P in est.points]), args.out)
    print(dumps({
        "rate": est.rate,
        "entropy": h,
        "roof_min": model.roof.min,
        "roof_max": model.roof.max,
        "lower_defect": lower,
        "upper_defect": upper,
        "tolerance": args.tol_squeeze,
        "status": "pass" if ok else "fail",
    }))
    return EXIT_OK if ok else EXIT_FINDING


COMMANDS = {
    "census": cmd_census,
    "entropy": cmd_entropy,
    "gamma": cmd_gamma,
    "e2page": cmd_e2page,
    "verify": cmd_verify,
    "obstruct": cmd_obstruct,
    "squeeze": cmd_squeeze,
}


# --- parser ----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors: exit 1, not argparse's 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _common():
    p = _Parser(add_help=False)
    p.add_argument("--model", metavar="PATH", help="model description (JSON)")
    p.add_argument("--census", metavar="PATH", help="census file written by 'census'")
    p.add_argument("--tmax", type=float, metavar="REAL", help="period truncation")
    p.add_argument("--grid", metavar="A:B:STEP", help="truncation grid, B inclusive")
    p.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    p.add_argument("--seed", type=int, default=0, metavar="INT", help="seed for random corpora")
    p.add_argument("--trials", type=int, metavar="INT", help="corpus size for verify")
    p.add_argument("--bound", type=int, metavar="INT", help="rank bound C for obstruct bounded")
    p.add_argument("--max-degree", type=int, metavar="INT", help="top degree for obstruct sphere")
    p.add_argument("--workers", type=int, metavar="INT",
                   help="worker processes (overrides ANOSOVSH_WORKERS)")
    p.add_argument("--holonomy", action="store_true",
                   help="attach holonomy signs to suspension censuses")
    tol = p.add_argument_group("tolerance overrides")
    tol.add_argument("--tol-det", type=float, default=DET_REL_TOL, metavar="REAL",
                     help=f"determinant-chain defect bound (verify blockform; default {DET_REL_TOL})")
    tol.add_argument("--tol-degeneracy", type=float, default=DEGENERACY_TOL, metavar="REAL",
                     help=f"|det(I-P)| below this is degenerate (verify; default {DEGENERACY_TOL})")
    tol.add_argument("--tol-convergence", type=float, default=CONVERGENCE_TOL, metavar="REAL",
                     help=f"unstable-frame convergence (verify parity; default {CONVERGENCE_TOL})")
    tol.add_argument("--tol-squeeze", type=float, default=SQUEEZE_TOL, metavar="REAL",
                     help=f"allowed negative squeeze defect (squeeze; default {SQUEEZE_TOL})")
    return p


def build_parser():
    parser = _Parser(
        prog="anosovsh",
        description="Orbit censuses, CZ parity and degenerate symplectic homology ranks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()
    sub.add_parser("census", parents=[common], help="enumerate orbits up to --tmax")
    sub.add_parser("entropy", parents=[common], help="exponential growth rate of P_T over --grid")
    sub.add_parser("gamma", parents=[common], help="polynomial growth exponent of Pg_T over --grid")
    sub.add_parser("e2page", parents=[common], help="E2 ranks as CSV (class_label, degree, rank)")
    v = sub.add_parser("verify", parents=[common], help="run a seeded verification corpus")
    v.add_argument("target", choices=("blockform", "cz", "parity"))
    o = sub.add_parser("obstruct", parents=[common], help="run an obstruction analyzer")
    o.add_argument("target", choices=("sphere", "bounded"))
    sub.add_parser("squeeze", parents=[common], help="entropy squeeze for a roof suspension")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        workers = workers_from(args)
        return COMMANDS[args.command](args, workers)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (AnosovSHError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


run = main


if __name__ == "__main__":
    sys.exit(main())
