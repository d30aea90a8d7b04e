"""``opspec`` command line: check, spectrum, normality, counterexample.

Exit codes: 0 success, 1 a mathematical property failed, 2 invalid input,
3 a resource cap was hit.

Examples::

    opspec check --preset non_admissible
    opspec spectrum --config problem.json --engine both --format json --out spectrum.json
    opspec normality --preset mixed_three --seed 3
    opspec counterexample --N 20 --alpha-power 2 --plot sums.dat
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from structflo.opspec import __version__
from structflo.opspec._errors import (
    BoundaryEncodingError,
    ConfigError,
    EigenSolverError,
    MatrixValidationError,
    ResourceCapError,
    ShapeError,
)
from structflo.opspec._report import (
    admissibility_table,
    bound_table,
    counterexample_text,
    normality_table,
    plot_data,
)
from structflo.opspec.config import ProblemConfig, list_presets, load_config, load_preset
from structflo.opspec.directsum import (
    ENGINES,
    CounterexampleSpec,
    bounded_coefficient_check,
    counterexample_norms,
    direct_sum_membership,
    solve_problem,
)
from structflo.opspec.discrete import (
    commutator_defect,
    discretize,
    normality_identity_on_domain,
    normality_residual,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_INPUT = 2
EXIT_CAP = 3


# --------------------------------------------------------------------------- #
# Commands
# --------------------------------------------------------------------------- #


def cmd_check(config: ProblemConfig) -> tuple[int, str]:
    """Admissibility table for every block; exit 0 iff all are admissible.

    With ``tolerances.bound`` set, a second table reports sup_n ||A_n||
    against that bound and an exceeded bound also fails the check.
    """
    reports = config.problem.admissibility
    ok = all(r.admissible for r in reports)
    text = admissibility_table(reports)
    bound = config.tolerances.bound
    if bound is not None:
        sup, bounded = bounded_coefficient_check(config.problem, bound)
        logger.debug("sup_n ||A_n|| = %.3e against bound %.3e", sup, bound)
        text += "\n" + bound_table(sup, bound, bounded)
        ok = ok and bounded
    return (EXIT_OK if ok else EXIT_PROPERTY), text


def cmd_spectrum(
    config: ProblemConfig, engine: str = "analytic", fmt: str = "csv", m: int | None = None
) -> tuple[int, str, str | None]:
    """Per-block and union spectra.

    Returns the exit code, the report text, and (CSV output with both
    engines only) the pairing table as separate CSV text.
    """
    report = solve_problem(
        config.problem,
        engine=engine,
        region=config.search,
        m=m or config.grid_m,
        tol=config.tolerances.root,
        cap=config.tolerances.eigen_cap,
    )
    if fmt == "json":
        return EXIT_OK, report.to_json(), None
    pairing = report.pairings_to_csv() if engine == "both" else None
    return EXIT_OK, report.to_csv(), pairing


def cmd_normality(
    config: ProblemConfig, m: int | None = None, seed: int = 0, samples: int = 8
) -> tuple[int, str]:
    """Matrix normality residuals and domain norm identities per block."""
    m = m or config.grid_m
    tol = config.tolerances
    rows = []
    for block, boundary in zip(config.blocks, config.boundaries, strict=True):
        op = discretize(block, boundary, m)
        residual = normality_residual(op)
        defect = commutator_defect(op)
        gap = normality_identity_on_domain(block, boundary, samples, m, seed=seed + block.index)
        passed = residual <= tol.normality and defect <= tol.normality and gap <= tol.identity
        rows.append((block.index, residual, defect, gap, passed))
    code = EXIT_OK if all(r[-1] for r in rows) else EXIT_PROPERTY
    return code, normality_table(rows)


def cmd_counterexample(
    count: int, alpha_power: float = 1.0, length: float = 1.0
) -> tuple[int, str, str]:
    """Per-block norms, partial sums, growth verdict, and plot data."""
    spec = CounterexampleSpec.with_alpha_power(count, alpha_power, length=length)
    norms = counterexample_norms(spec)
    membership = direct_sum_membership(norms.norms, list(range(1, count + 1)))
    return EXIT_OK, counterexample_text(norms, membership), plot_data(norms.partial_sums)


# --------------------------------------------------------------------------- #
# Argument handling
# --------------------------------------------------------------------------- #


def _load(args: argparse.Namespace) -> ProblemConfig:
    if args.preset and args.config:
        msg = "Use either --config or --preset, not both"
        raise ConfigError(msg)
    if args.preset:
        return load_preset(args.preset)
    if args.config:
        return load_config(args.config)
    msg = f"A problem is required: --config FILE or --preset NAME ({', '.join(list_presets())})"
    raise ConfigError(msg)


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _run_check(args: argparse.Namespace) -> int:
    code, text = cmd_check(_load(args))
    _write(text, args.out)
    return code


def _run_spectrum(args: argparse.Namespace) -> int:
    code, text, pairing = cmd_spectrum(_load(args), args.engine, args.format, args.m)
    _write(text, args.out)
    if pairing is not None:
        if args.out:
            out = Path(args.out)
            out.with_name(out.stem + ".pairing.csv").write_text(pairing)
        else:
            sys.stderr.write(pairing)
    return code


def _run_normality(args: argparse.Namespace) -> int:
    code, text = cmd_normality(_load(args), args.m, args.seed, args.samples)
    _write(text, args.out)
    return code


def _run_counterexample(args: argparse.Namespace) -> int:
    if args.N < 1:
        msg = f"--N must be at least 1, got {args.N}"
        raise ConfigError(msg)
    if args.length <= 0:
        msg = f"--length must be positive, got {args.length}"
        raise ConfigError(msg)
    code, text, data = cmd_counterexample(args.N, args.alpha_power, args.length)
    _write(text, args.out)
    if args.plot:
        Path(args.plot).write_text(data)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opspec",
        description="Normal extensions and spectra of multipoint operators -u'' + iAu.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="Write the report here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")

    problem = argparse.ArgumentParser(add_help=False)
    problem.add_argument("--config", default=None, help="Problem config (.json, .yml, .yaml)")
    problem.add_argument("--preset", default=None, help="Bundled problem name")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common, problem], help="Admissibility of each block")
    p.set_defaults(func=_run_check)

    p = sub.add_parser("spectrum", parents=[common, problem], help="Per-block and union spectra")
    p.add_argument("--engine", choices=ENGINES, default="analytic")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--m", type=int, default=None, help="Grid nodes for the discrete engine")
    p.set_defaults(func=_run_spectrum)

    p = sub.add_parser("normality", parents=[common, problem], help="Grid-level normality checks")
    p.add_argument("--m", type=int, default=None, help="Grid nodes")
    p.add_argument("--seed", type=int, default=0, help="Seed for sampled domain functions")
    p.add_argument("--samples", type=int, default=8, help="Domain functions per block")
    p.set_defaults(func=_run_normality)

    p = sub.add_parser("counterexample", parents=[common], help="Unbounded-coefficient example")
    p.add_argument("--N", type=int, default=20, help="Number of blocks")
    p.add_argument("--alpha-power", type=float, default=1.0, help="alpha_n = n^(-p)")
    p.add_argument("--length", type=float, default=1.0, help="Block length")
    p.add_argument("--plot", default=None, help="Write (N, partial_sum) plot data here")
    p.set_defaults(func=_run_counterexample)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (ConfigError, MatrixValidationError, ShapeError, BoundaryEncodingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except EigenSolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROPERTY


if __name__ == "__main__":
    sys.exit(main())
