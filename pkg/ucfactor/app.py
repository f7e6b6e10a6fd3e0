"""Command-line entry point for ucfactor."""

import argparse
import logging
import sys
import time
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import scipy.linalg

from . import __version__
from .core.errors import (
    CertificationError,
    DegenerateMeasureError,
    EnumerationCapError,
    ProblemFileError,
    UCFactorError,
    WitnessMarginError,
    ZeroVectorError,
)
from .core.hilbert import (
    bessel_bound,
    c0_operator_norm_witness,
    gram,
    orlicz_sum,
    weak_l1_sum,
)
from .core.models import PietschSolution, VectorSequence
from .core.multiplier import absolute_profile, adjoint_spec, assemble, from_operator, orlicz_condition, uc_constant
from .core.oracle import brute_pietsch, brute_sign_norm, dual_value
from .core.pietsch import factorize, min_dominating_diagonal
from .core.settings import ENUM_KEYS, apply_env_overrides, load_settings
from .core.splitting import hs_bessel_probe, split_absolute, split_measure, split_weak, verify_witness
from .util.jsonio import decode_complex_array, digest, dump_json
from .util.problem import ProblemFile, load_problem
from .util.report import Report, csv_rows, write_csv

logger = logging.getLogger("ucfactor")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_VERIFY = 4

# numeric preconditions and non-certification: exit 3 with a partial report
NUMERIC_ERRORS = (CertificationError, WitnessMarginError, DegenerateMeasureError, ZeroVectorError, EnumerationCapError)

RECONSTRUCTION_TOL = 1e-10
BOUND_TOL = 1e-8
RESIDUAL_TOL = 1e-10
BRUTE_SIGN_LIMIT = 12
TEST_PAIRS = 100
# reports whose certificate belongs to gram(phi)
VERIFIABLE_REPORTS = ("factorize", "verify", "diagnose")


def solver_options(settings: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "max_iter": settings["max_iter"],
        "backend": settings["backend"],
        "psd_tol": settings["psd_tol"],
        "hermitian_tol": settings["hermitian_tol"],
    }


def enum_options(settings: Dict[str, Any], cap_key: str) -> Dict[str, Any]:
    return {
        "mode": settings["mode"],
        "trials": settings["trials"],
        "seed": settings["seed"],
        "max_enum": settings[cap_key],
        "parallel": settings["parallel"],
        "chunk_size": settings["chunk_size"],
    }


def _fallback_to_sampled(run: Callable[[Dict[str, Any]], Any], options: Dict[str, Any], what: str):
    """Run an enumeration; above the exact cap, warn and sample instead."""
    try:
        return run(options)
    except EnumerationCapError as e:
        logger.warning("%s: %s; using sampled mode with %d trials", what, e, options["trials"])
        return run(dict(options, mode="sampled"))


def _pi2(report: Report, seq: VectorSequence, settings: Dict[str, Any]) -> PietschSolution:
    solution = min_dominating_diagonal(gram(seq), tol=settings["tol"], **solver_options(settings))
    report.certificate = solution.to_dict()
    return solution


def _sandwich(report: Report, bessel: float, c0: float, pi2_sq: float, n: int) -> None:
    chain = [bessel, c0**2, pi2_sq, n * bessel]
    report.results["sandwich"] = chain
    scale = max(1.0, pi2_sq)
    worst = min(upper - lower for lower, upper in zip(chain, chain[1:]))
    report.flag("sandwich", worst >= -BOUND_TOL * scale, worst, "bessel <= c0^2 <= pi2^2 <= N * bessel")


def cmd_factorize(problem: ProblemFile, settings: Dict[str, Any], report: Report) -> None:
    """Optimal factorization Phi_n = alpha_n f_n with its certificate."""
    seq = problem.require("phi")
    fact = factorize(seq, tol=settings["tol"], **solver_options(settings))
    solution = fact.solution
    report.certificate = solution.to_dict()
    report.results.update(fact.to_dict())
    report.results["pi2_sq"] = solution.pi2_sq
    report.results["orlicz_sum"] = orlicz_sum(seq)

    scale = float(np.max(seq.norms()))
    report.check("reconstruction", fact.residual, RECONSTRUCTION_TOL * scale)
    report.check("bessel_bound", fact.bessel, 1.0 + BOUND_TOL)
    report.check("optimal_cost", abs(fact.cost - solution.pi2_sq), BOUND_TOL * max(1.0, solution.pi2_sq))
    report.check("orlicz", report.results["orlicz_sum"], solution.pi2_sq + BOUND_TOL * max(1.0, solution.pi2_sq))
    report.table = csv_rows(alpha=fact.alpha)


def _split_checks(report: Report, spec, split) -> None:
    report.check("residual", split.max_residual, RESIDUAL_TOL * max(1.0, float(np.max(np.abs(spec.m)))))


def cmd_split(problem: ProblemFile, settings: Dict[str, Any], report: Report, kind: str, side: str = "psi") -> None:
    """Symbol splitting m_n = a_n conj(b_n) of the given kind; weak splits take the witness side."""
    spec = problem.spec()
    options = solver_options(settings)
    tol = settings["tol"]

    if kind == "weak":
        witness = problem.require("witness")
        bounded = spec.psi if side == "psi" else spec.phi
        margin = verify_witness(bounded, witness)
        report.results["witness"] = margin.to_dict()
        report.results["margin"] = margin.margin
        report.results["margin_index"] = margin.worst_index
        split = split_weak(spec, witness, tol=tol, side=side, **options)
        report.certificate = split.solution.to_dict()
        report.results.update(split.to_dict())
        _split_checks(report, spec, split)
        # the other side is the Bessel frame; the witness side is capped by the weights
        lone = (split.weights == 0) & (spec.m != 0)
        ceiling = float(np.sum(split.weights**2)) + float(np.sum(bounded.norms()[lone] ** 2))
        frame_bound, weight_bound = ("bessel_a_phi", "bessel_b_psi") if side == "psi" else ("bessel_b_psi", "bessel_a_phi")
        report.check(frame_bound, getattr(split, frame_bound), 1.0 + BOUND_TOL)
        report.check(weight_bound, getattr(split, weight_bound), ceiling + BOUND_TOL)
        report.table = csv_rows(alpha=split.weights, a=split.a, b=split.b)

    elif kind == "absolute":
        split = split_absolute(spec, tol=tol, **options)
        report.certificate = split.solution.to_dict()
        report.results.update(split.to_dict())
        report.results["absolute_profile"] = absolute_profile(spec, np.eye(spec.dim))
        _split_checks(report, spec, split)
        report.check("bessel_b_psi", split.bessel_b_psi, 1.0 + BOUND_TOL)
        report.check("bessel_a_phi", split.bessel_a_phi, float(np.sum(split.weights**2)) + BOUND_TOL)
        report.table = csv_rows(alpha=split.weights, a=split.a, b=split.b)

    elif kind == "measure":
        mu = problem.require("measure")
        result = split_measure(spec, mu, tol=tol, **options)
        split = result.split
        report.certificate = split.solution.to_dict()
        report.results.update(result.to_dict())
        _split_checks(report, spec, split)
        report.check("frobenius_bessel", result.frobenius_bessel, 1.0 + BOUND_TOL)
        report.check("bessel_a_psi", result.bessel_a_psi, result.frobenius_bessel + BOUND_TOL)
        report.check(
            "measure_identity",
            abs(result.measure_identity - result.alpha_sq_sum),
            BOUND_TOL * max(1.0, result.alpha_sq_sum),
        )
        rng = np.random.default_rng(settings["seed"])
        worst = 0.0
        for _ in range(TEST_PAIRS):
            f, g = rng.standard_normal((2, spec.dim)) + 1j * rng.standard_normal((2, spec.dim))
            f /= np.linalg.norm(f)
            g /= np.linalg.norm(g)
            worst = max(worst, hs_bessel_probe(spec, result.alpha, f, g))
        report.results["hs_probe_max"] = worst
        report.check("hs_bessel_probe", worst, (1.0 + BOUND_TOL) * result.frobenius_bessel)
        report.table = csv_rows(alpha=result.alpha, a=split.a, b=split.b)

    else:
        raise ValueError(f"unknown split kind {kind!r}")


def _certificate_from(problem: ProblemFile, n: int) -> Optional[PietschSolution]:
    if problem.certificate is None:
        return None
    try:
        solution = PietschSolution.from_dict(problem.certificate)
    except (KeyError, TypeError, ValueError) as e:
        raise ProblemFileError(f"malformed certificate: {e}") from e
    if solution.v.shape != (n,) or solution.dualX.shape != (n, n):
        raise ProblemFileError(f"certificate shapes {solution.v.shape}, {solution.dualX.shape} do not match N = {n}")
    return solution


def cmd_verify(problem: ProblemFile, settings: Dict[str, Any], report: Report) -> None:
    """Cross-check a certificate (given or computed) against the oracles."""
    if problem.report_command is not None and problem.report_command not in VERIFIABLE_REPORTS:
        raise ProblemFileError(
            f"a {problem.report_command!r} report carries no Pietsch certificate of phi; verify takes"
            f" factorize, verify or diagnose reports"
        )
    seq = problem.require("phi")
    n = seq.length
    G = gram(seq)
    tol = settings["tol"]

    solution = _certificate_from(problem, n)
    if solution is None:
        solution = _pi2(report, seq, settings)
        report.results["certificate_source"] = "computed"
    else:
        report.certificate = problem.certificate
        report.results["certificate_source"] = "file"
    v, X = solution.v, solution.dualX
    total = float(np.sum(v))
    scale = max(1.0, total)
    report.results["pi2_sq"] = total

    dual = dual_value(G, X, psd_tol=settings["psd_tol"], hermitian_tol=settings["hermitian_tol"])
    report.results["dual_value"] = dual.value
    report.results["dual_check"] = dual.to_dict()
    report.flag(
        "dual_feasibility",
        dual.feasible,
        dual.min_eigenvalue,
        f"min eigenvalue {dual.min_eigenvalue:.3e}, max |X_ii - 1| {dual.max_diagonal_error:.3e}",
    )

    g_norm = max(float(scipy.linalg.eigvalsh(G)[-1]), 0.0)
    primal_slack = float(scipy.linalg.eigvalsh(np.diag(v) - G)[0])
    report.flag(
        "primal_feasibility",
        primal_slack >= -settings["psd_tol"] * g_norm and bool(np.all(v >= 0)),
        primal_slack,
        "diag(v) - G >= 0, v >= 0",
    )
    gap = total - dual.value
    report.results["gap"] = gap
    report.flag("duality_gap", -tol * scale <= gap <= tol * scale, tol * scale - gap)

    active = int(np.count_nonzero(np.real(np.diag(G)) > 0))
    if active <= 3:
        resolution = settings["resolution"]
        brute = brute_pietsch(G, resolution)
        report.results["brute_pietsch"] = brute
        report.flag(
            "brute_pietsch",
            -tol * scale <= brute - total <= 3.0 / resolution * scale,
            3.0 / resolution * scale - (brute - total),
            f"resolution {resolution}",
        )
    else:
        report.skip("brute_pietsch", f"N = {active} > 3")

    c0_options = enum_options(settings, "c0_max_enum")
    if n <= min(BRUTE_SIGN_LIMIT, settings["brute_max_enum"]):
        exact = c0_operator_norm_witness(seq, **dict(c0_options, mode="exact", max_enum=n))
        brute = brute_sign_norm(seq, max_enum=settings["brute_max_enum"])
        report.results["brute_sign_norm"] = brute
        report.flag("brute_sign_norm", abs(exact.value - brute) <= 1e-12 * max(1.0, brute), brute - exact.value)
        c0 = exact.value
    else:
        report.skip("brute_sign_norm", f"N = {n} > {min(BRUTE_SIGN_LIMIT, settings['brute_max_enum'])}")
        c0 = _fallback_to_sampled(lambda o: c0_operator_norm_witness(seq, **o), c0_options, "c0 norm").value
    report.results["c0_operator_norm"] = c0

    bessel = bessel_bound(seq)
    report.results["bessel_bound"] = bessel
    _sandwich(report, bessel, c0, total, n)
    report.check("orlicz", orlicz_sum(seq), total + BOUND_TOL * scale)

    results = problem.results or {}
    if "alpha" in results and "frame" in results:
        alpha = np.asarray(results["alpha"], dtype=np.float64)
        try:
            frame = VectorSequence(decode_complex_array(results["frame"]))
        except ValueError as e:
            raise ProblemFileError(f"malformed frame in results: {e}") from e
        if alpha.shape != (n,) or frame.length != n:
            report.flag("reconstruction", False, None, "alpha/frame length does not match phi")
        else:
            residual = float(np.max(np.linalg.norm(alpha[:, None] * frame.vectors - seq.vectors, axis=1)))
            report.check("reconstruction", residual, RECONSTRUCTION_TOL * float(np.max(seq.norms())))
            report.check("bessel_bound", bessel_bound(frame), 1.0 + BOUND_TOL)
    else:
        report.skip("reconstruction", "no factorization in input")


def cmd_diagnose(problem: ProblemFile, settings: Dict[str, Any], report: Report) -> None:
    """Bessel bound, Orlicz sum, c0 norm, pi2^2 and multiplier diagnostics."""
    seq = problem.require("phi")
    n = seq.length
    bessel = bessel_bound(seq)
    solution = _pi2(report, seq, settings)
    found = _fallback_to_sampled(
        lambda o: c0_operator_norm_witness(seq, **o), enum_options(settings, "c0_max_enum"), "c0 norm"
    )
    report.results.update(
        {
            "length": n,
            "dim": seq.dim,
            "bessel_bound": bessel,
            "orlicz_sum": orlicz_sum(seq),
            "c0_operator_norm": found.value,
            "c0_witness_signs": [int(s) for s in found.signs],
            "pi2_sq": solution.pi2_sq,
            "weak_l1_standard_basis": [weak_l1_sum(seq, e) for e in np.eye(seq.dim)],
        }
    )
    _sandwich(report, bessel, found.value, solution.pi2_sq, n)
    report.check("orlicz", report.results["orlicz_sum"], solution.pi2_sq + BOUND_TOL * max(1.0, solution.pi2_sq))

    if problem.psi is not None:
        spec = problem.spec()
        M = assemble(spec)
        norm = float(scipy.linalg.svdvals(M)[0])
        uc = _fallback_to_sampled(lambda o: uc_constant(spec, **o), enum_options(settings, "uc_max_enum"), "uc constant")
        adjoint_error = float(np.max(np.abs(assemble(adjoint_spec(spec)) - M.conj().T)))
        report.results.update(
            {
                "multiplier_norm": norm,
                "uc": uc.to_dict(),
                "adjoint_error": adjoint_error,
                "absolute_profile": absolute_profile(spec, np.eye(spec.dim)),
            }
        )
        report.check("uc_constant", norm, uc.constant * (1.0 + 1e-12))
        report.check("adjoint", adjoint_error, 1e-12 * max(1.0, float(np.max(np.abs(M)))))
        if np.all(spec.psi.vectors == spec.psi.vectors[0]):
            lhs, rhs = orlicz_condition(spec, tol=settings["tol"], **solver_options(settings))
            report.results["orlicz_condition"] = [lhs, rhs]
            report.check("orlicz_condition", lhs, rhs + BOUND_TOL * max(1.0, rhs))
        else:
            report.skip("orlicz_condition", "psi is not constant")

    if problem.operator is not None and problem.basis is not None:
        rebuilt = assemble(from_operator(problem.operator, problem.basis))
        error = float(np.max(np.abs(rebuilt - problem.operator)))
        report.results["operator_roundtrip_error"] = error
        report.check("operator_roundtrip", error, 1e-10 * max(1.0, float(np.max(np.abs(problem.operator)))))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help="duality-gap tolerance (default 1e-8)")
    common.add_argument("--mode", choices=("exact", "sampled"), help="sign enumeration mode")
    common.add_argument("--trials", type=int, help="random sign patterns in sampled mode")
    common.add_argument("--seed", type=int, help="seed for sampled mode and random probes")
    common.add_argument("--max-enum", type=int, dest="max_enum", help="cap for exact enumeration (all caps)")
    common.add_argument("--backend", choices=("interior-point", "cvxpy"), help="SDP backend")
    common.add_argument("--resolution", type=int, help="grid resolution for the brute-force SDP oracle")
    common.add_argument("--csv", metavar="PATH", help="write (n, alpha_n, |a_n|, |b_n|) as CSV")
    common.add_argument("--timing", action="store_true", help="include wall-clock time in the JSON report")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="errors only, no summary")

    parser = argparse.ArgumentParser(
        prog="ucfactor",
        description="Factorize unconditionally summable sequences and split multiplier symbols.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("factorize", "optimal factorization Phi_n = alpha_n f_n"),
        ("verify", "cross-check a certificate against brute-force oracles"),
        ("diagnose", "Bessel bound, c0 norm, pi2^2 and multiplier diagnostics"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("path", help="problem file (JSON)")
    p = sub.add_parser("split", parents=[common], help="symbol splitting m_n = a_n conj(b_n)")
    p.add_argument("path", help="problem file (JSON)")
    p.add_argument("--kind", choices=("weak", "absolute", "measure"), required=True)
    p.add_argument("--side", choices=("psi", "phi"), default="psi", help="sequence the weak witness bounds below")
    return parser


def resolve_settings(args: argparse.Namespace, environ: Optional[Dict[str, str]] = None) -> Dict[str, Any]:
    """CLI flags over environment over settings.json over defaults."""
    settings = apply_env_overrides(load_settings(), environ)
    for key in ("tol", "mode", "trials", "seed", "backend", "resolution"):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if args.max_enum is not None:
        for key in ENUM_KEYS:
            settings[key] = args.max_enum
    return settings


def _echo_flags(args: argparse.Namespace, settings: Dict[str, Any]) -> Dict[str, Any]:
    flags = {key: settings[key] for key in ("tol", "mode", "trials", "seed", "backend", "resolution")}
    flags.update({key: settings[key] for key in ENUM_KEYS})
    if args.command == "split":
        flags["kind"] = args.kind
        if args.kind == "weak":
            flags["side"] = args.side
    return flags


def _error(e: BaseException) -> Dict[str, Any]:
    data: Dict[str, Any] = {"type": type(e).__name__, "message": str(e)}
    index = getattr(e, "index", None)
    if index is not None:
        data["index"] = int(index)
    return data


def configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.ERROR if quiet else logging.WARNING
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    settings = resolve_settings(args)
    flags = _echo_flags(args, settings)

    start = time.perf_counter()
    try:
        problem = load_problem(args.path)
    except UCFactorError as e:
        logger.error("%s", e)
        report = Report(command=args.command, flags=flags, digest="", error=_error(e))
        return _emit(report, args, EXIT_INPUT, start)

    report = Report(command=args.command, flags=flags, digest=digest(problem.source), problem=problem.source)
    try:
        if args.command == "split":
            cmd_split(problem, settings, report, args.kind, args.side)
        else:
            COMMANDS[args.command](problem, settings, report)
        code = EXIT_VERIFY if report.failed else EXIT_OK
    except NUMERIC_ERRORS as e:
        logger.error("%s", e)
        report.error = _error(e)
        solution = getattr(e, "solution", None)
        if solution is not None:
            report.certificate = solution.to_dict()
        code = EXIT_NUMERIC
    except (UCFactorError, ValueError, ImportError) as e:
        logger.error("%s", e)
        report.error = _error(e)
        code = EXIT_INPUT
    return _emit(report, args, code, start)


def _emit(report: Report, args: argparse.Namespace, code: int, start: float) -> int:
    report.timing = time.perf_counter() - start
    sys.stdout.write(dump_json(report.to_dict(include_timing=args.timing)))
    sys.stdout.write("\n")
    if args.csv and report.table:
        write_csv(args.csv, report.table)
    if not args.quiet:
        print(report.summary(), file=sys.stderr)
    return code


COMMANDS: Dict[str, Callable[[ProblemFile, Dict[str, Any], Report], None]] = {
    "factorize": cmd_factorize,
    "verify": cmd_verify,
    "diagnose": cmd_diagnose,
}


if __name__ == "__main__":
    sys.exit(main())
