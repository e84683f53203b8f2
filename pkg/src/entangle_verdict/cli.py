"""Command-line interface.

Subcommands::

    entangle-verdict analyze  [--input PATH | --batch DIR]   matrix JSON or counts CSV -> report JSON
    entangle-verdict decompose [--input PATH]                 X parameters JSON -> decomposition JSON
    entangle-verdict tomo     [--input PATH] [--raw]         counts CSV -> matrix JSON
    entangle-verdict simulate [--input PATH] -n N [--seed S] matrix JSON -> counts CSV

Input defaults to stdin and output to stdout. Exit status: 0 when the
analysis ran (whatever the verdict), 1 for bad input, 2 when the Peres
test and the closed-form condition contradict each other.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .entanglement import (
    DEFAULT_BOUNDARY_TOL,
    NotSeparableByConstructionError,
    NotSymmetricError,
    separable_decomposition,
    verify_decomposition,
)
from .fileio import (
    InputError,
    counts_to_csv,
    matrix_to_json,
    parse_counts_text,
    parse_input_text,
    parse_matrix_text,
    parse_settings_file,
    read_text,
)
from .report import (
    AnalysisOptions,
    InternalInconsistencyError,
    analyze,
    analyze_batch,
    decomposition_to_dict,
    report_to_dict,
)
from .simulate import SimulationPlan, ideal_counts, sample_counts
from .states import (
    DEFAULT_NOISE_FLOOR,
    InvalidStateError,
    XStateParams,
    validate_density,
    x_state_to_density,
)
from .tomography import (
    TomographyError,
    linear_reconstruct,
    project_to_physical,
    standard_settings_16,
)

SEED_ENV = "ENTANGLE_VERDICT_SEED"

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INCONSISTENT = 2

log = logging.getLogger("entangle_verdict")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="input file (default: stdin)")
    common.add_argument("--output", "-o", help="output file (default: stdout)")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="pretty", action="store_false", help="compact JSON (default)")
    fmt.add_argument("--pretty", dest="pretty", action="store_true", help="indented JSON")
    common.set_defaults(pretty=False)

    settings = argparse.ArgumentParser(add_help=False)
    settings.add_argument(
        "--settings",
        default="standard16",
        help="'standard16' or a CSV file of first,second setting pairs",
    )

    parser = _Parser(
        prog="entangle-verdict",
        description="Entanglement verdicts for two-qubit polarization tomography data.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common, settings], help="entanglement verdict report")
    p.add_argument("--batch", metavar="DIR", help="analyze every .json/.csv file in DIR")
    p.add_argument("--noise-floor", type=float, default=DEFAULT_NOISE_FLOOR)
    p.add_argument("--boundary-tol", type=float, default=DEFAULT_BOUNDARY_TOL)

    sub.add_parser("decompose", parents=[common], help="product-state decomposition of X parameters")

    p = sub.add_parser("tomo", parents=[common, settings], help="reconstruct a density matrix from counts")
    p.add_argument("--raw", action="store_true", help="skip projection onto physical states")

    p = sub.add_parser("simulate", parents=[common, settings], help="synthetic coincidence counts")
    p.add_argument("-n", "--counts-per-setting", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--ideal", action="store_true", help="expected counts instead of Poisson samples")
    return parser


def _settings(value: str):
    if value == "standard16":
        return None
    return tuple(parse_settings_file(value))


def _read_input(args) -> tuple[str, str]:
    if args.input:
        return read_text(args.input), args.input
    return sys.stdin.read(), "<stdin>"


def _write(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(message: str) -> None:
    print(f"entangle-verdict: error: {message}", file=sys.stderr)


def _dump(args, obj) -> None:
    _write(args, json.dumps(obj, indent=2 if args.pretty else None))


def _resolve_seed(seed) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError("bad-seed", f"{SEED_ENV}={env!r} is not an integer") from None
    return 0


def _log_report(report) -> None:
    log.info(
        "%s: %s, min PT eigenvalue %.3e, flags [%s]",
        report.input_id, report.verdict.value, report.ppt.min_eigenvalue, ", ".join(report.flags),
    )


def _cmd_analyze(args) -> int:
    options = AnalysisOptions(args.noise_floor, args.boundary_tol, _settings(args.settings))
    if args.batch:
        status = EXIT_OK
        out = []
        for path, result in analyze_batch(args.batch, options):
            if isinstance(result, Exception):
                code = EXIT_INCONSISTENT if isinstance(result, InternalInconsistencyError) else EXIT_INPUT
                status = max(status, code)
                _fail(f"{path}: {result}")
                out.append({"input_id": str(path), "error": str(result)})
            else:
                _log_report(result)
                out.append(report_to_dict(result))
        _dump(args, out)
        return status
    text, source = _read_input(args)
    report = analyze(parse_input_text(text, source), options)
    _log_report(report)
    _dump(args, report_to_dict(report))
    return EXIT_OK


def _cmd_decompose(args) -> int:
    text, _ = _read_input(args)
    try:
        data = json.loads(text)
        params = XStateParams(
            data["alpha"], data["beta"], data["beta_prime"], data["gamma"], data["alpha_prime"]
        )
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError("malformed-json", f"expected X parameters: {exc}") from exc
    try:
        d = separable_decomposition(params)
    except (NotSymmetricError, NotSeparableByConstructionError) as exc:
        _dump(args, {"decomposition": None, "reason": str(exc)})
        return EXIT_OK
    ok, err = verify_decomposition(d, x_state_to_density(params))
    _dump(args, {"decomposition": {"terms": decomposition_to_dict(d), "verified": ok, "max_error": err}})
    return EXIT_OK


def _cmd_tomo(args) -> int:
    text, source = _read_input(args)
    doc = parse_counts_text(text, source)
    raw = linear_reconstruct(doc.payload, _settings(args.settings))
    m = raw if args.raw else project_to_physical(raw).m
    _dump(args, matrix_to_json(m))
    return EXIT_OK


def _cmd_simulate(args) -> int:
    text, source = _read_input(args)
    doc = parse_matrix_text(text, source)
    settings = _settings(args.settings) or tuple(standard_settings_16())
    plan = SimulationPlan(
        validate_density(doc.payload), settings, args.counts_per_setting, _resolve_seed(args.seed)
    )
    records = ideal_counts(plan) if args.ideal else sample_counts(plan)
    _write(args, counts_to_csv(records))
    return EXIT_OK


_COMMANDS = {
    "analyze": _cmd_analyze,
    "decompose": _cmd_decompose,
    "tomo": _cmd_tomo,
    "simulate": _cmd_simulate,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        return _COMMANDS[args.command](args)
    except InternalInconsistencyError as exc:
        _fail(f"internal inconsistency: {exc}")
        return EXIT_INCONSISTENT
    except (InputError, InvalidStateError, TomographyError, ValueError) as exc:
        _fail(str(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
