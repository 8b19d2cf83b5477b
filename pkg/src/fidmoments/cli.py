"""Command-line front end.

Exit codes: 0 success, 1 check failed, 2 input error, 3 moment budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .bounds import bound_report, scaling_sweep
from .channel_io import ChannelFormatError, InvalidChannelError, load_channel, load_unitary
from .channels import (
    KrausChannel,
    amplitude_damping,
    dephasing,
    depolarizing,
    deviation_channel,
    identity_channel,
    random_cptp,
    unitary_channel,
    validate_cptp,
)
from .moments import MomentBudgetError, analyze
from .montecarlo import SampleConfig, compare, estimate_moments

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
FIXTURES = ("identity", "depolarizing", "dephasing", "amplitude-damping", "pauli-x", "random")
VALIDATION_TOL = 1e-8


class InputError(Exception):
    pass


def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(f"{x:.15g}") if math.isfinite(x) else None
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


def dumps(obj) -> str:
    return json.dumps(_num(obj), indent=2)


def fixture_channel(name: str, dim: int, p: float, gamma: float, rank: int, seed: int) -> KrausChannel:
    if name == "identity":
        return identity_channel(dim)
    if name == "depolarizing":
        return depolarizing(dim, p)
    if name == "dephasing":
        return dephasing(p)
    if name == "amplitude-damping":
        return amplitude_damping(gamma)
    if name == "pauli-x":
        return unitary_channel(np.array([[0, 1], [1, 0]]))
    if name == "random":
        return random_cptp(dim, rank, seed)
    raise InputError(f"unknown fixture {name!r}")


def _channel(args) -> tuple[KrausChannel, np.ndarray]:
    try:
        if args.file:
            channel, ideal = load_channel(args.file)
        elif args.fixture:
            channel = fixture_channel(args.fixture, args.dim, args.p, args.gamma, args.rank, args.seed)
            ideal = np.eye(channel.d, dtype=complex)
        else:
            raise InputError("give --fixture NAME or --file PATH")
        if args.ideal:
            ideal = load_unitary(args.ideal, channel.d)
    except (ChannelFormatError, ValueError) as exc:
        if isinstance(exc, InvalidChannelError):
            raise
        raise InputError(str(exc)) from exc
    return channel, ideal


def _deviation(args) -> tuple[KrausChannel, dict]:
    channel, ideal = _channel(args)
    report = validate_cptp(channel, VALIDATION_TOL)
    info = {"tp_residual": report.tp_residual, "min_choi_eig": report.min_choi_eig, "verdict": report.verdict}
    if not report.verdict:
        raise InvalidChannelError(f"channel is not CPTP: {info}")
    try:
        lam = deviation_channel(channel, ideal)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return lam, info


def cmd_validate(args, out) -> int:
    try:
        channel, _ = _channel(args)
    except InvalidChannelError as exc:
        out.write(dumps({"verdict": False, "error": str(exc)}) + "\n")
        return EXIT_CHECK
    r = validate_cptp(channel, args.tol)
    out.write(dumps({"dim": channel.d, "tp_residual": r.tp_residual, "min_choi_eig": r.min_choi_eig,
                     "verdict": r.verdict}) + "\n")
    return EXIT_OK if r.verdict else EXIT_CHECK


def cmd_analyze(args, out) -> int:
    lam, info = _deviation(args)
    report = analyze(lam, args.moments)
    doc = report.to_dict()
    doc["validation"] = info
    out.write(dumps(doc) + "\n")
    return EXIT_OK


def cmd_sample(args, out) -> int:
    lam, _ = _deviation(args)
    try:
        cfg = SampleConfig(args.samples, args.seed, args.shards)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    report = analyze(lam, args.moments)
    emp = estimate_moments(lam, args.moments, cfg)
    rows = compare(report, emp)
    passed = all(r.passed for r in rows)
    out.write(dumps({
        "analytic": report.to_dict(),
        "empirical": emp.to_dict(),
        "comparison": [r.to_dict() for r in rows],
        "passed": passed,
    }) + "\n")
    return EXIT_OK if passed else EXIT_CHECK


def _parse_dims(text: str) -> list[int]:
    try:
        dims = [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"--dims must be a comma-separated list of integers: {text!r}") from exc
    if not dims or any(d < 2 or d > 64 for d in dims):
        raise InputError("--dims entries must lie in [2, 64]")
    return dims


def cmd_sweep(args, out) -> int:
    dims = _parse_dims(args.dims)
    factory = None
    if args.fixture and args.fixture != "random":
        name = args.fixture

        def factory(d, _trial):
            return fixture_channel(name, d, args.p, args.gamma, args.rank, args.seed)

    try:
        result = scaling_sweep(dims, args.rank, args.trials, args.seed, factory)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    fmt = args.format or "csv"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["d", "mean_var", "max_var", "d_times_max_var"])
        for r in result.rows:
            w.writerow([r.d] + [f"{v:.15g}" for v in (r.mean_var, r.max_var, r.d_times_max_var)])
        out.write(buf.getvalue())
    else:
        out.write(dumps({
            "rows": [{"d": r.d, "mean_var": r.mean_var, "max_var": r.max_var,
                      "d_times_max_var": r.d_times_max_var, "control_var": r.control_var} for r in result.rows],
            "passed": result.passed,
        }) + "\n")
    return EXIT_OK if result.passed else EXIT_CHECK


def cmd_bounds(args, out) -> int:
    if args.fixture == "random" and not args.file and args.trials > 1:
        reports = []
        for i in range(args.trials):
            ch = random_cptp(args.dim, args.rank, args.seed + i)
            reports.append(bound_report(ch))
        holds = all(r.holds for r in reports)
        out.write(dumps({"reports": [r.to_dict() for r in reports], "holds": holds}) + "\n")
        return EXIT_OK if holds else EXIT_CHECK
    lam, _ = _deviation(args)
    report = bound_report(lam)
    out.write(dumps(report.to_dict()) + "\n")
    return EXIT_OK if report.holds else EXIT_CHECK


COMMANDS = {
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "sample": cmd_sample,
    "sweep": cmd_sweep,
    "bounds": cmd_bounds,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fixture", choices=FIXTURES)
    common.add_argument("--dim", type=int, default=2)
    common.add_argument("--p", type=float, default=0.1)
    common.add_argument("--gamma", type=float, default=0.1)
    common.add_argument("--file", help="channel JSON document")
    common.add_argument("--ideal", help="JSON file holding the ideal unitary")
    common.add_argument("--moments", type=int, default=2)
    common.add_argument("--samples", type=int, default=100_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--shards", type=int, default=1)
    common.add_argument("--dims", default="2,4,8,16")
    common.add_argument("--rank", type=int, default=2)
    common.add_argument("--trials", type=int, default=20)
    common.add_argument("--tol", type=float, default=VALIDATION_TOL)
    common.add_argument("--out", help="write output to this path instead of stdout")
    common.add_argument("--format", choices=("json", "csv"))

    parser = argparse.ArgumentParser(prog="fidmoments", description="Gate fidelity moments of quantum channels.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "validate": "check trace preservation and complete positivity",
        "analyze": "exact mean, second moment, variance and higher moments",
        "sample": "Monte Carlo estimates compared against the exact values",
        "sweep": "variance versus dimension for random channels",
        "bounds": "large-dimension coefficient bounds",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format == "csv" and args.command != "sweep":
        print("error: --format csv is only available for sweep", file=sys.stderr)
        return EXIT_INPUT
    if args.moments < 1:
        print("error: --moments must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    out = io.StringIO()
    try:
        code = COMMANDS[args.command](args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvalidChannelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except MomentBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out.getvalue())
    else:
        sys.stdout.write(out.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
