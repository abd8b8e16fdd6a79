"""Command-line entry point: ``crjets <command> ...``.

Exit codes: 0 success, 1 ``check`` found a mismatch, 2 invalid input,
3 computation failure, 4 file I/O failure.  Failures print one JSON object
``{"error": ..., "kind": ..., "message": ...}`` on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import documents, errors
from .dimension import crossover_order, dimension_report
from .experiments import (
    ExperimentConfig,
    jacobian_rank,
    key_observation_check,
    key_observation_plan,
)
from .jets import GraphGerm, is_jet_preimage, pullback
from .series import SeriesError, to_fraction, weighted_norm

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_VALIDATION = 2
EXIT_COMPUTATION = 3
EXIT_IO = 4


class CommandIOError(errors.CRJetError, OSError):
    pass


def _print_json(data) -> None:
    print(json.dumps(data, indent=2, sort_keys=True))


def _read_json(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CommandIOError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise errors.ValidationError(f"{path}: invalid JSON: {exc}") from exc


def _fraction_text(x) -> str:
    x = to_fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# commands


def cmd_pullback(args) -> int:
    doc = documents.load(args.input)
    F, model = doc.require_map_and_model()
    result = pullback(F, model)
    out = documents.JetDocument(doc.signature, F, model, result.germ)
    if args.out:
        documents.dump(out, args.out)
    if args.json:
        _print_json({
            "germ": [c.to_text() for c in result.germ.r],
            "iterations_used": result.iterations_used,
        })
    else:
        for comp in result.germ.r:
            print(comp.to_text())
    return EXIT_OK


def cmd_check(args) -> int:
    doc = documents.load(args.input)
    F, model = doc.require_map_and_model()
    germ = doc.require_germ()
    ok = is_jet_preimage(F, model, germ)
    print("true" if ok else "false")
    return EXIT_OK if ok else EXIT_FALSE


def cmd_dims(args) -> int:
    report = dimension_report(args.m, args.d, args.mprime, args.nu, args.k)
    if args.json:
        _print_json(report.to_dict())
    else:
        print(report.to_table())
    return EXIT_OK


def cmd_crossover(args) -> int:
    report = crossover_order(args.m, args.d, args.mprime, args.nu, args.kmax)
    if args.json:
        _print_json({"k_star": None if report is None else report.k,
                     "report": None if report is None else report.to_dict()})
    elif report is None:
        print(f"no crossover for k <= {args.kmax}")
    else:
        print(f"k* = {report.k}")
        print(report.to_table())
    return EXIT_OK


def _configs(data: dict) -> list[ExperimentConfig]:
    """A single config, or a grid when the file has ``"plan": {"total": N}``."""
    if not isinstance(data, dict):
        raise errors.ValidationError("config must be a JSON object")
    if "plan" in data:
        data = dict(data)
        plan = data.pop("plan")
        if not isinstance(plan, dict) or set(plan) != {"total"}:
            raise errors.ValidationError("'plan' must be {\"total\": <trials>}")
        return key_observation_plan(plan["total"], **data)
    try:
        return [ExperimentConfig.from_dict(data)]
    except TypeError as exc:
        raise errors.ValidationError(f"bad experiment config: {exc}") from exc


def cmd_keyobs(args) -> int:
    reports = []
    failures = 0
    for config in _configs(_read_json(args.config)):
        report = key_observation_check(config, strict=False)
        failures += report.failures
        reports.append(report)
        sig = config.signature
        print(
            f"m={sig.m} d={sig.d} m'={sig.mprime} nu={sig.nu} k={sig.k}  "
            f"trials={report.trials} failures={report.failures} "
            f"converse_changed={report.converse_changed}",
            file=sys.stderr if args.json else sys.stdout,
        )
    total = sum(r.trials for r in reports)
    if args.json:
        _print_json({"trials": total, "failures": failures,
                     "reports": [_report_json(r) for r in reports]})
    else:
        print(f"total trials={total} failures={failures}")
    if failures:
        raise errors.StabilityViolation(f"{failures} of {total} trials changed the order-k germ")
    return EXIT_OK


def _report_json(report) -> dict:
    out = report.to_dict()
    sig = out.pop("signature")
    out["signature"] = {key: sig[key] for key in ("m", "d", "mprime", "nu", "k")}
    return out


def cmd_rank(args) -> int:
    (config,) = _configs(_read_json(args.config))
    reports = []
    for trial in range(config.trials):
        report = jacobian_rank(config, trial=trial)
        reports.append(report)
        if not args.json:
            print(
                f"trial {trial}: rows={report.jacobian_rows} cols={report.jacobian_cols} "
                f"rank={report.numerical_rank} sigma_max={report.sigma_max:.6e} "
                f"deficient={'yes' if report.rank_deficient else 'no'}"
            )
    if args.json:
        _print_json([_report_json(r) for r in reports])
    return EXIT_OK


def cmd_norm(args) -> int:
    doc = documents.load(args.input)
    germ: GraphGerm = doc.require_germ()
    try:
        t = Fraction(args.t)
    except (ValueError, ZeroDivisionError) as exc:
        raise errors.ValidationError(f"--t must be a rational like 1/2, got {args.t!r}") from exc
    print(_fraction_text(weighted_norm(germ.r, t)))
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crjets", description="Jets of CR preimages of algebraic models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pullback", help="graph germ of the preimage of the model under the map jet")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_pullback)

    p = sub.add_parser("check", help="exit 0 iff the document's germ is the pullback")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("dims", help="jet-space dimension report")
    for name in ("m", "d", "mprime", "nu", "k"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("crossover", help="smallest k where the target outgrows the source")
    for name in ("m", "d", "mprime", "nu", "kmax"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_crossover)

    p = sub.add_parser("keyobs", help="high-order perturbations leave the order-k germ fixed")
    p.add_argument("--config", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_keyobs)

    p = sub.add_parser("rank", help="finite-difference Jacobian rank of P_k")
    p.add_argument("--config", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("norm", help="weighted norm of the document's germ")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--t", required=True)
    p.set_defaults(func=cmd_norm)
    return parser


def _fail(exc: Exception, kind: str, code: int) -> int:
    payload = {"error": type(exc).__name__, "kind": kind, "message": str(exc)}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CommandIOError, documents.DocumentIOError) as exc:
        return _fail(exc, "io", EXIT_IO)
    except (errors.ValidationError, SeriesError) as exc:
        return _fail(exc, "validation", EXIT_VALIDATION)
    except errors.ComputationError as exc:
        return _fail(exc, "computation", EXIT_COMPUTATION)


if __name__ == "__main__":
    sys.exit(main())
