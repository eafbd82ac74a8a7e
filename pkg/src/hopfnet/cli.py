"""``hopfnet`` command line: matrices, rays, criterion1, criterion2, simulate, verify.

Exit codes: 0 certified / success, 1 verification or runtime failure,
2 hypotheses failed (or trivial flux cone), 3 inconclusive, 64 usage
error, 65 bad input data (parse errors, digest mismatch).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .criteria import (
    CERT_TOL,
    CriterionOutcome,
    NotSteadyStateError,
    TrivialConeError,
    Verdict,
    criterion1,
    criterion2_search,
    verify_outcome,
)
from .dynamics import (
    OpenParameters,
    SteadyStateError,
    rate_constants_from_mapping,
    residual_norm,
    solve_steady_state,
)
from .fluxcone import extreme_rays
from .network import (
    Network,
    NetworkSyntaxError,
    conservation_basis,
    kinetic_matrix,
    parse_network,
    stoich_rank,
    stoichiometric_matrix,
)
from .simulate import IntegrationError, TrajectoryTooShortError, detect_oscillation, hopf_demo, integrate

SCHEMA = "hopfnet.report/1"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_HYPOTHESES = 2
EXIT_INCONCLUSIVE = 3
EXIT_USAGE = 64
EXIT_DATA = 65

_VERDICT_EXIT = {
    Verdict.CERTIFIED: EXIT_OK,
    Verdict.HYPOTHESES_FAILED: EXIT_HYPOTHESES,
    Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


# ---------------------------------------------------------------- helpers


def _load_network(path: str) -> tuple[Network, str]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read network file: {exc}") from exc
    try:
        net = parse_network(raw.decode("utf-8"))
    except (NetworkSyntaxError, UnicodeDecodeError) as exc:
        raise DataError(f"{path}: {exc}") from exc
    return net, hashlib.sha256(raw).hexdigest()


def _load_json(path: str, what: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read {what} {path}: {exc}") from exc


def _species_vector(net: Network, data, what: str) -> np.ndarray:
    if isinstance(data, dict):
        missing = [n for n in net.species_names if n not in data]
        extra = sorted(set(data) - set(net.species_names))
        if missing or extra:
            raise DataError(f"{what}: missing species {missing}, unknown species {extra}")
        vals = [data[n] for n in net.species_names]
    else:
        vals = list(data)
        if len(vals) != net.n_species:
            raise DataError(f"{what}: expected {net.n_species} values, got {len(vals)}")
    x = np.array(vals, dtype=float)
    if np.any(x <= 0):
        raise DataError(f"{what} must be strictly positive")
    return x


def _rates(net: Network, path: str) -> np.ndarray:
    data = _load_json(path, "rate constants")
    if not isinstance(data, dict):
        raise DataError("rate-constant config must be a JSON object mapping reaction label to rate")
    try:
        return rate_constants_from_mapping(net, data)
    except ValueError as exc:
        raise DataError(str(exc)) from exc


def _network_block(net: Network, path: str, digest: str) -> dict:
    return {
        "path": path,
        "sha256": digest,
        "species": net.species_names,
        "reactions": net.reaction_labels,
    }


def _matrices_block(net: Network) -> dict:
    N = stoichiometric_matrix(net)
    return {
        "N": N.tolist(),
        "Y": kinetic_matrix(net).tolist(),
        "rank": stoich_rank(N),
        "conservation": [[str(v) for v in row] for row in conservation_basis(N)],
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def _emit(args, report: dict, timings: dict | None = None) -> None:
    if args.timings and timings is not None:
        report["timings_s"] = {k: round(v, 6) for k, v in timings.items()}
    text = dumps(report)
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _base_report(args, command: str) -> dict:
    return {
        "schema": SCHEMA,
        "tool": {"name": "hopfnet", "version": __version__},
        "command": command,
        "seed": args.seed,
        "tolerances": {"certification": args.tol},
    }


class _Clock:
    def __init__(self):
        self.stages: dict[str, float] = {}

    def __call__(self, name):
        clock = self

        class _Stage:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                clock.stages[name] = time.perf_counter() - self.t0

        return _Stage()


# ---------------------------------------------------------------- commands


def _matrix_csv(matrix, row_labels, col_labels) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["", *col_labels])
    for label, row in zip(row_labels, matrix):
        w.writerow([label, *row])
    return buf.getvalue()


def cmd_matrices(args) -> int:
    net, digest = _load_network(args.file)
    N = stoichiometric_matrix(net)
    Y = kinetic_matrix(net)
    basis = conservation_basis(N)
    if args.format == "json":
        sys.stdout.write(dumps({"network": _network_block(net, args.file, digest), **_matrices_block(net)}))
        return EXIT_OK
    out = ["# N (stoichiometric matrix)", _matrix_csv(N.tolist(), net.species_names, net.reaction_labels)]
    out += ["# Y (kinetic matrix)", _matrix_csv(Y.tolist(), net.species_names, net.reaction_labels)]
    out.append(f"# conservation basis (rank N = {stoich_rank(N)})")
    rows = [[str(v) for v in row] for row in basis]
    out.append(_matrix_csv(rows, [f"c{k + 1}" for k in range(len(rows))], net.species_names))
    sys.stdout.write("\n".join(out))
    return EXIT_OK


def cmd_rays(args) -> int:
    net, digest = _load_network(args.file)
    E = extreme_rays(stoichiometric_matrix(net))
    if args.format == "json":
        sys.stdout.write(dumps({
            "network": _network_block(net, args.file, digest),
            "p": E.p,
            "rays": [[str(v) for v in col] for col in E.columns],
        }))
        return EXIT_OK
    rows = [[str(col[i]) for col in E.columns] for i in range(net.n_reactions)]
    sys.stdout.write(_matrix_csv(rows, net.reaction_labels, [f"E{k + 1}" for k in range(E.p)]))
    if E.is_empty:
        print("flux cone is {0}: no extreme rays", file=sys.stderr)
    return EXIT_OK


def _demo_block(args, net, outcome: CriterionOutcome) -> dict:
    try:
        demo = hopf_demo(net, outcome, delta=args.delta, t_end=args.t_end)
    except (ValueError, IntegrationError, TrajectoryTooShortError) as exc:
        return {"error": str(exc)}
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "trajectory.csv", "w", encoding="utf-8", newline="") as fh:
            demo.trajectory.write_csv(fh)
    block = demo.to_dict()
    if not demo.metrics.oscillating:
        block["note"] = ("no sustained oscillation detected; the crossing may be subcritical, "
                         "which the criterion does not exclude")
    return block


def cmd_criterion1(args) -> int:
    if not args.rates:
        raise UsageError("criterion1 requires --rates")
    clock = _Clock()
    with clock("parse"):
        net, digest = _load_network(args.file)
        a = _rates(net, args.rates)
    report = _base_report(args, "criterion1")
    report["network"] = _network_block(net, args.file, digest)
    with clock("steady_state"):
        if args.steady_state:
            x_bar = _species_vector(net, _load_json(args.steady_state, "steady state"), "steady state")
            ss_source = "supplied"
        elif args.guess:
            guess = _species_vector(net, _load_json(args.guess, "initial guess"), "initial guess")
            try:
                x_bar = solve_steady_state(net, a, guess).x
            except SteadyStateError as exc:
                raise DataError(f"steady-state solve failed: {exc}") from exc
            ss_source = "newton"
        else:
            raise UsageError("criterion1 requires --steady-state or --guess")
    report["steady_state"] = {"source": ss_source, "x": x_bar.tolist(), "residual": residual_norm(net, a, x_bar)}
    with clock("criterion"):
        try:
            outcome = criterion1(net, a, x_bar, tol=args.tol)
        except NotSteadyStateError as exc:
            raise DataError(str(exc)) from exc
    report["outcome"] = outcome.to_dict()
    if args.demo and outcome.certified:
        with clock("demo"):
            report["demo"] = _demo_block(args, net, outcome)
    _emit(args, report, clock.stages)
    _summary(outcome)
    return _VERDICT_EXIT[outcome.verdict]


def cmd_criterion2(args) -> int:
    clock = _Clock()
    with clock("parse"):
        net, digest = _load_network(args.file)
    report = _base_report(args, "criterion2")
    report["network"] = _network_block(net, args.file, digest)
    report["search"] = {"samples": args.samples, "budget": args.budget, "grid": args.grid}
    with clock("matrices"):
        report["matrices"] = _matrices_block(net)
    with clock("rays"):
        E = extreme_rays(stoichiometric_matrix(net))
    report["rays"] = {"p": E.p}
    rank = report["matrices"]["rank"]
    if rank < net.n_species:
        report["mode"] = f"rank-aware mode, r = {rank}"
    else:
        report["mode"] = "full rank"
    with clock("criterion"):
        try:
            outcome = criterion2_search(net, samples=args.samples, budget=args.budget, seed=args.seed,
                                        grid=args.grid, tol=args.tol, E=E)
        except TrivialConeError as exc:
            report["outcome"] = {"criterion": "II", "verdict": Verdict.HYPOTHESES_FAILED.value,
                                 "witness": None, "diagnostics": [str(exc)]}
            _emit(args, report, clock.stages)
            print(f"hypotheses-failed: {exc}", file=sys.stderr)
            return EXIT_HYPOTHESES
    report["outcome"] = outcome.to_dict()
    if args.demo and outcome.certified:
        with clock("demo"):
            report["demo"] = _demo_block(args, net, outcome)
    _emit(args, report, clock.stages)
    _summary(outcome)
    return _VERDICT_EXIT[outcome.verdict]


def _summary(outcome: CriterionOutcome) -> None:
    line = f"criterion {outcome.criterion}: {outcome.verdict.value}"
    w = outcome.witness
    if w is not None and outcome.criterion == "I":
        line += f" (beta* = {w.beta_star:.10g})"
    elif w is not None:
        line += f" (beta_c = {w.beta_c:.10g})"
    print(line, file=sys.stderr)


def cmd_simulate(args) -> int:
    net, digest = _load_network(args.file)
    if not args.rates:
        raise UsageError("simulate requires --rates")
    a = _rates(net, args.rates)
    x0 = _species_vector(net, _load_json(args.x0, "initial state"), "initial state")
    open_params = None
    if args.beta is not None:
        if not args.steady_state:
            raise UsageError("--beta requires --steady-state (inflow is beta * x_bar)")
        x_bar = _species_vector(net, _load_json(args.steady_state, "steady state"), "steady state")
        open_params = OpenParameters.uniform(args.beta, x_bar)
    t_eval = np.linspace(0.0, args.t_end, args.points)
    try:
        traj = integrate(net, a, open_params, x0, args.t_end, rtol=args.rtol, atol=args.atol, t_eval=t_eval)
    except IntegrationError as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    try:
        metrics = detect_oscillation(traj).to_dict()
    except TrajectoryTooShortError as exc:
        metrics = {"error": str(exc)}
    report = _base_report(args, "simulate")
    report["network"] = _network_block(net, args.file, digest)
    report["integrator"] = traj.metadata
    report["metrics"] = metrics
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "trajectory.csv", "w", encoding="utf-8", newline="") as fh:
            traj.write_csv(fh)
        (out / "report.json").write_text(dumps(report), encoding="utf-8")
    else:
        traj.write_csv(sys.stdout)
        print(json.dumps(metrics), file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = _load_json(args.report, "report")
    if report.get("schema") != SCHEMA:
        raise DataError(f"unsupported report schema {report.get('schema')!r}")
    net_path = args.network or report["network"]["path"]
    if not args.network and not Path(net_path).exists():
        net_path = str(Path(args.report).parent / net_path)
    net, digest = _load_network(net_path)
    if digest != report["network"]["sha256"]:
        print(f"digest mismatch: report was made from {report['network']['sha256']}, "
              f"{net_path} has {digest}", file=sys.stderr)
        return EXIT_DATA
    outcome = report.get("outcome") or {}
    tol = args.tol if args.tol_given else report.get("tolerances", {}).get("certification", CERT_TOL)
    checks = verify_outcome(net, outcome, tol=tol)
    ok = True
    for name, passed, detail in checks:
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}" + (f"  [{detail}]" if detail else ""))
    print("verified" if ok else "verification FAILED", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAILED


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=None,
                        help=f"certification tolerance on |Re mu| (default {CERT_TOL:g})")
    common.add_argument("--seed", type=int, default=0, help="random seed for searches (default 0)")
    common.add_argument("--output", metavar="DIR", help="write report.json (and trajectory.csv) into DIR")
    common.add_argument("--format", choices=("json", "csv"), default="csv",
                        help="output format for matrices/rays (reports are always JSON)")
    common.add_argument("--timings", action="store_true",
                        help="add wall-clock per stage to the report (breaks byte-identical reruns)")

    p = _Parser(prog="hopfnet", description="Hopf bifurcation criteria for mass action networks.")
    p.add_argument("--version", action="version", version=f"hopfnet {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("matrices", parents=[common], help="print N, Y and the conservation basis")
    s.add_argument("file")
    s.set_defaults(func=cmd_matrices)

    s = sub.add_parser("rays", parents=[common], help="extreme rays of the flux cone as CSV")
    s.add_argument("file")
    s.set_defaults(func=cmd_rays)

    demo = _Parser(add_help=False)
    demo.add_argument("--demo", action="store_true", help="simulate past the certified crossing")
    demo.add_argument("--delta", type=_positive_float, default=None, help="distance past the crossing")
    demo.add_argument("--t-end", type=_positive_float, default=None, help="demo integration horizon")

    s = sub.add_parser("criterion1", parents=[common, demo], help="fully-open spectrum-shift criterion")
    s.add_argument("file")
    s.add_argument("--rates", help="JSON object: reaction label -> rate constant")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--steady-state", help="JSON steady state (species -> value, or list)")
    g.add_argument("--guess", help="JSON initial guess for a damped Newton solve")
    s.set_defaults(func=cmd_criterion1)

    s = sub.add_parser("criterion2", parents=[common, demo], help="convex-coordinate D-instability criterion")
    s.add_argument("file")
    s.add_argument("--samples", type=_positive_int, default=200, help="number of random ray weightings")
    s.add_argument("--budget", type=_positive_int, default=1000, help="eigenvalue evaluations per D-search")
    s.add_argument("--grid", type=_positive_int, default=64, help="curve samples before bisection")
    s.add_argument("--rank-aware", choices=("auto",), default="auto",
                   help="conserved-quantity variant, selected automatically when rank N < |S|")
    s.set_defaults(func=cmd_criterion2)

    s = sub.add_parser("simulate", parents=[common], help="integrate the mass action system")
    s.add_argument("file")
    s.add_argument("--rates", help="JSON object: reaction label -> rate constant")
    s.add_argument("--x0", required=True, help="JSON initial state")
    s.add_argument("--t-end", type=_positive_float, required=True)
    s.add_argument("--points", type=_positive_int, default=1001, help="number of output samples")
    s.add_argument("--rtol", type=_positive_float, default=1e-8)
    s.add_argument("--atol", type=_positive_float, default=1e-10)
    s.add_argument("--beta", type=_positive_float, default=None,
                   help="simulate the fully-open system with D = beta, F = beta * x_bar")
    s.add_argument("--steady-state", help="JSON steady state used with --beta")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("verify", parents=[common], help="re-verify a certified report from scratch")
    s.add_argument("report")
    s.add_argument("--network", help="network file (default: path recorded in the report)")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.tol_given = args.tol is not None
    if args.tol is None:
        args.tol = CERT_TOL
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hopfnet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"hopfnet: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
