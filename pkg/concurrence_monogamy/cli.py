"""Command-line front end: measure, check, scan, fuzz and reproduce."""

import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Tuple, TypeVar

import numpy as np
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from concurrence_monogamy.config import OptimizerSettings, Tolerances, default_log_level, default_seed
from concurrence_monogamy.utils.errors import MonogamyError, UsageError
from concurrence_monogamy.utils.measures import (
    coa_upper_bound,
    concurrence_4partite_pure,
    concurrence_assistance,
    concurrence_pure,
    concurrence_two_qubit,
    convex_roof_4partite,
    convex_roof_concurrence,
)
from concurrence_monogamy.utils.monogamy import (
    BoundReport,
    PairEvaluator,
    check_coa_cap,
    check_corollary,
    check_dual_coa,
    check_qubit_ckw,
    check_theorem1,
    check_theorem2,
    ckw_sum,
    optimize_weights,
    theorem3_rhs,
    theorem4_lower_bound,
)
from concurrence_monogamy.utils.reporting import (
    MEASURE_COLUMNS,
    REPORT_COLUMNS,
    REPRODUCE_COLUMNS,
    OutputFormat,
    decode_state,
    emit,
    provenance_lines,
    read_replay,
    render,
    replay_document,
    report_row,
)
from concurrence_monogamy.utils.states import (
    StateSpec,
    antisymmetric_qutrit,
    haar_random_pure,
    paper_family_2223,
    paper_state_223,
    parse_profile,
    random_density,
)
from concurrence_monogamy.utils.tensor_core import (
    Partition,
    PureState,
    StateLike,
    as_density,
    partial_trace,
)
from concurrence_monogamy.utils.weights import WeightPoint, paper_weights_2223, uniform_theorem3, uniform_theorem4

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

Command = Literal["measure", "check", "scan", "fuzz", "reproduce"]
INEQUALITIES = ("theorem1", "theorem2", "corollary", "theorem3", "theorem4", "qubit-ckw", "dual-coa", "ckw-sum")
OPTIMIZABLE = ("theorem1", "theorem2", "corollary", "theorem3", "theorem4")
QUANTITIES = ("concurrence", "roof", "assistance", "coa-upper", "two-qubit", "four-partite")
FUZZ_SUITES = ("theorem2", "lemma1", "qubit-ckw", "dual-coa")
LEMMA1_PROFILES = ("2x2", "2x3", "3x3")
EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class RunConfig(BaseModel):
    """Everything a run depends on; serializing it is enough to repeat the run."""

    command: Command
    state: Optional[StateSpec] = None
    """State to evaluate, by catalog name and parameters"""
    cut: Optional[str] = None
    """Cut in '0,2|1,3' syntax"""
    quantity: str = "concurrence"
    """measure: which quantity to compute"""
    inequality: Optional[str] = None
    """check: which inequality"""
    x: List[float] = Field(default_factory=list)
    """Theorem 1/2 weights, one report row each"""
    p: Optional[List[float]] = None
    """Corollary weights"""
    weights: Optional[str] = None
    """Theorem 3/4 weights: 'uniform', 'paper' or a JSON WeightPoint"""
    optimize: bool = False
    """Pick the best weight vertex instead of the given weights"""
    estimate_lhs: bool = False
    """Theorem 4: estimate the mixed-state left-hand side"""
    grid: List[float] = Field(default_factory=list)
    """scan: values of t"""
    suite: Optional[str] = None
    """fuzz: which property suite"""
    dims: Optional[str] = None
    """fuzz: local dimensions of the random states"""
    count: int = Field(default=100, ge=1)
    """fuzz: number of random states"""
    rank: Optional[int] = None
    """fuzz: rank of random mixed states; None draws pure states"""
    replay: Optional[str] = None
    """fuzz: replay file to re-run instead of drawing states"""
    failures_dir: str = "fuzz-failures"
    """fuzz: where replay files for failing cases go"""
    seed: int = Field(default_factory=default_seed, ge=0)
    restarts: Optional[int] = Field(default=None, ge=1)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    workers: int = Field(default=4, ge=1)
    output: Optional[str] = None
    format: OutputFormat = "csv"

    def optimizer(self) -> OptimizerSettings:
        return OptimizerSettings(seed=self.seed, restarts=self.restarts)

    def build_state(self) -> StateLike:
        if self.state is None:
            raise UsageError(f"{self.command} needs --state")
        spec = self.state
        if spec.name in ("haar", "random-density") and "seed" not in spec.parameters:
            spec = spec.model_copy(update={"parameters": {**spec.parameters, "seed": self.seed}})
        return spec.build()


async def run_concurrently(items: Sequence[T], work: Callable[[T], R], workers: int) -> List[R]:
    """Run ``work`` over ``items`` in worker threads; results come back in input order."""
    semaphore = asyncio.Semaphore(workers)

    async def one(item: T) -> R:
        async with semaphore:
            return await asyncio.to_thread(work, item)

    return await asyncio.gather(*(one(item) for item in items))


def case_seed(seed: int, case: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(case,)).generate_state(1)[0])


def _default_cut(state: StateLike) -> Partition:
    parties = state.profile.parties
    if parties < 2:
        raise UsageError(f"state on {state.profile} has no cut")
    return Partition.of((0,), tuple(range(1, parties)))


def _measure_row(config: RunConfig, state: StateLike, cut: Partition, opts: OptimizerSettings) -> Dict[str, Any]:
    quantity = config.quantity
    row: Dict[str, Any] = {"state": config.state.label(), "quantity": quantity, "cut": str(cut), "restarts": 0}
    tol = config.tolerances
    if quantity == "concurrence" and isinstance(state, PureState) and cut.covers(state.profile):
        row.update(value=concurrence_pure(state, cut, tol), direction="exact", converged=True)
        return row
    if quantity in ("concurrence", "roof", "assistance"):
        rho = as_density(state)
        if quantity == "assistance":
            estimate = concurrence_assistance(rho, cut, opts, tol)
        else:
            estimate = convex_roof_concurrence(rho, cut, opts, tol)
        direction = "exact" if estimate.exact else estimate.direction
        row.update(value=estimate.value, direction=direction, restarts=estimate.restarts_used, converged=estimate.converged)
        return row
    if quantity == "coa-upper":
        row.update(value=coa_upper_bound(as_density(state), cut, tol), direction="upper-bound-of-max", converged=True)
        return row
    if quantity == "two-qubit":
        rho = as_density(state)
        if not cut.covers(rho.profile):
            rho = partial_trace(rho, cut.parties)
        row.update(value=concurrence_two_qubit(rho, tol), direction="exact", converged=True)
        return row
    if quantity == "four-partite":
        row["cut"] = "1|2|3|4"
        if isinstance(state, PureState):
            row.update(value=concurrence_4partite_pure(state, tol), direction="exact", converged=True)
        else:
            estimate = convex_roof_4partite(state, opts, tol)
            direction = "exact" if estimate.exact else estimate.direction
            row.update(value=estimate.value, direction=direction, restarts=estimate.restarts_used, converged=estimate.converged)
        return row
    raise UsageError(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}")


def cmd_measure(config: RunConfig) -> Tuple[str, int]:
    state = config.build_state()
    cut = Partition.parse(config.cut) if config.cut else _default_cut(state)
    row = _measure_row(config, state, cut, config.optimizer())
    logger.info(f"[CLI] measure {config.quantity} at {cut}: {row['value']:.9g}")
    return render([row], MEASURE_COLUMNS, config.format), EXIT_OK


def _weight_point(config: RunConfig, inequality: str) -> WeightPoint:
    raw = config.weights or "uniform"
    if raw == "uniform":
        return uniform_theorem3() if inequality == "theorem3" else uniform_theorem4()
    if raw == "paper":
        if inequality != "theorem4":
            raise UsageError("--weights paper applies to theorem4 only")
        return paper_weights_2223()
    try:
        return WeightPoint.model_validate_json(raw)
    except ValidationError as exc:
        raise UsageError(f"--weights is neither 'uniform', 'paper' nor a valid weight point: {exc}") from exc


def evaluate_check(config: RunConfig, state: StateLike) -> List[BoundReport]:
    """Reports for ``config.inequality`` on ``state``, one per weight point."""
    inequality = config.inequality
    opts, tol = config.optimizer(), config.tolerances
    if inequality not in INEQUALITIES:
        raise UsageError(f"unknown inequality {inequality!r}; choose from {', '.join(INEQUALITIES)}")
    if config.optimize:
        if inequality not in OPTIMIZABLE:
            raise UsageError(f"--optimize applies to {', '.join(OPTIMIZABLE)}")
        _, report = optimize_weights(inequality, state, opts, tol, estimate_lhs=config.estimate_lhs)
        return [report]
    if inequality in ("theorem1", "theorem2"):
        if inequality == "theorem1" and not isinstance(state, PureState):
            raise UsageError("theorem1 needs a pure state")
        check = check_theorem1 if inequality == "theorem1" else check_theorem2
        return [check(state, x, opts, tol) for x in (config.x or [1.0])]
    if inequality == "corollary":
        parties = state.profile.parties
        p = config.p or [1.0 / (parties - 1)] * (parties - 1)
        return [check_corollary(state, p, opts, tol)]
    if inequality == "theorem3":
        return [theorem3_rhs(state, _weight_point(config, inequality), opts, tol)]
    if inequality == "theorem4":
        return [theorem4_lower_bound(state, _weight_point(config, inequality), opts, tol, config.estimate_lhs)]
    if inequality == "qubit-ckw":
        return [check_qubit_ckw(state, opts, tol)]
    if inequality == "dual-coa":
        if not isinstance(state, PureState):
            raise UsageError("dual-coa needs a pure state")
        return [check_dual_coa(state, opts, tol)]
    return [ckw_sum(state, opts, tol)]


def _verdict(reports: Sequence[BoundReport]) -> int:
    return EXIT_VIOLATION if any(report.satisfied is False for report in reports) else EXIT_OK


def cmd_check(config: RunConfig) -> Tuple[str, int]:
    # catalog and parameter errors surface as they are
    state = config.build_state()
    try:
        reports = evaluate_check(config, state)
    except MonogamyError as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"{config.inequality} does not fit {config.state.label()}: {exc}") from exc
    label = config.state.label()
    rows = [report_row(report, label) for report in reports]
    annotations = [provenance_lines(report) for report in reports]
    return render(rows, REPORT_COLUMNS, config.format, annotations), _verdict(reports)


def default_grid() -> List[float]:
    """t = 0.33, 0.34, ..., 1.00."""
    return [round(0.33 + 0.01 * i, 2) for i in range(68)]


def scan_point(config: RunConfig, t: float) -> Dict[str, Any]:
    rho = paper_family_2223(t)
    opts, tol = config.optimizer(), config.tolerances
    report = theorem4_lower_bound(rho, paper_weights_2223(), opts, tol)
    row = {
        "t": t,
        "lower_bound": float(np.sqrt(max(report.rhs, 0.0))),
        "exact_pair_concurrence": concurrence_two_qubit(partial_trace(rho, (0, 1)), tol),
    }
    if config.optimize:
        _, optimized = optimize_weights("theorem4", rho, opts, tol)
        row["optimized_lower_bound"] = float(np.sqrt(max(optimized.rhs, 0.0)))
    logger.debug(f"[Scan] t={t}: lower bound {row['lower_bound']:.9g}")
    return row


def cmd_scan(config: RunConfig) -> Tuple[str, int]:
    grid = config.grid or default_grid()
    rows = asyncio.run(run_concurrently(grid, lambda t: scan_point(config, t), config.workers))
    columns = ["t", "lower_bound", "exact_pair_concurrence"] + (["optimized_lower_bound"] if config.optimize else [])
    logger.info(f"[Scan] {len(rows)} grid points")
    return render(rows, columns, config.format), EXIT_OK


def fuzz_state(config: RunConfig, case: int) -> StateLike:
    seed = case_seed(config.seed, case)
    if config.suite == "lemma1":
        profile = parse_profile(config.dims or LEMMA1_PROFILES[case % len(LEMMA1_PROFILES)])
        rank = config.rank or 1 + case % profile.total
        return random_density(profile, min(rank, profile.total), seed)
    profile = parse_profile(config.dims or "2x2x2")
    if config.rank is not None:
        return random_density(profile, config.rank, seed)
    return haar_random_pure(profile, seed)


def fuzz_reports(config: RunConfig, state: StateLike) -> List[BoundReport]:
    opts, tol = config.optimizer(), config.tolerances
    if config.suite == "theorem2":
        # both endpoints reuse the same two pair roofs
        evaluator = PairEvaluator(state, opts, tol)
        return [check_theorem2(state, x, opts, tol, evaluator=evaluator) for x in (0.0, 1.0)]
    if config.suite == "lemma1":
        return [check_coa_cap(state, Partition.of((0,), (1,)), opts, tol)]
    if config.suite == "qubit-ckw":
        return [check_qubit_ckw(state, opts, tol)]
    return [check_dual_coa(state, opts, tol)]


def cmd_fuzz(config: RunConfig) -> Tuple[str, int]:
    if config.suite not in FUZZ_SUITES:
        raise UsageError(f"unknown fuzz suite {config.suite!r}; choose from {', '.join(FUZZ_SUITES)}")
    if config.replay:
        document = read_replay(Path(config.replay))
        state = decode_state(document["state"])
        reports = fuzz_reports(config, state)
        rows = [report_row(report, f"replay:{document.get('case')}") for report in reports]
        annotations = [provenance_lines(report) for report in reports]
        return render(rows, REPORT_COLUMNS, config.format, annotations), _verdict(reports)

    def run_case(case: int) -> Tuple[int, StateLike, List[BoundReport]]:
        state = fuzz_state(config, case)
        return case, state, fuzz_reports(config, state)

    outcomes = asyncio.run(run_concurrently(range(config.count), run_case, config.workers))
    failed = 0
    run_config = config.model_dump(mode="json")
    for case, state, reports in outcomes:
        bad = [report for report in reports if report.satisfied is False]
        if not bad:
            continue
        failed += 1
        path = Path(config.failures_dir) / f"replay-{config.suite}-{case:05d}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(replay_document(run_config, case, state, bad[0]), encoding="utf-8")
        logger.warning(f"[Fuzz] case {case} failed ({bad[0].inequality} margin {bad[0].margin:.3e}); wrote {path}")
    row = {"suite": config.suite, "cases": config.count, "passed": config.count - failed, "failed": failed}
    logger.info(f"[Fuzz] {config.suite}: {row['passed']}/{config.count} passed")
    text = render([row], ["suite", "cases", "passed", "failed"], config.format)
    return text, EXIT_VIOLATION if failed else EXIT_OK


def reproduce_rows(config: RunConfig) -> List[Dict[str, Any]]:
    """Every published value beside the computed one."""
    opts, tol = config.optimizer(), config.tolerances
    rows: List[Dict[str, Any]] = []

    def add(quantity: str, expected: float, computed: float, tolerance: float) -> None:
        delta = abs(computed - expected)
        rows.append(
            {"quantity": quantity, "expected": expected, "computed": computed, "delta": delta, "tolerance": tolerance, "ok": bool(delta <= tolerance)}
        )

    psi = paper_state_223()
    rho = psi.projector()
    add("C(psi_223 A|BC)", 1.0, concurrence_pure(psi, Partition.of((0,), (1, 2)), tol), 1e-12)
    add("Ca(rho_AB) psi_223", 1.0, concurrence_assistance(rho, Partition.of((0,), (1,)), opts, tol).value, 1e-3)
    add("Ca(rho_AC) psi_223", 2 * np.sqrt(2) / 3, concurrence_assistance(rho, Partition.of((0,), (2,)), opts, tol).value, 1e-3)
    add("theorem1 margin psi_223 x=1", 0.0, check_theorem1(psi, 1.0, opts, tol).margin, 1e-3)

    anti = antisymmetric_qutrit()
    anti_rho = anti.projector()
    add("C(psi_anti 1|23)", 2 / np.sqrt(3), concurrence_pure(anti, Partition.of((0,), (1, 2)), tol), 1e-12)
    add("C^2(psi_anti 1|23)", 4 / 3, concurrence_pure(anti, Partition.of((0,), (1, 2)), tol) ** 2, 1e-9)
    for j in (1, 2):
        value = convex_roof_concurrence(anti_rho, Partition.of((0,), (j,)), opts, tol).value
        add(f"C(rho_1{j + 1}) psi_anti", 1.0, value, 5e-3)
    add("CKW sum psi_anti", 2.0, ckw_sum(anti, opts, tol).rhs, 2e-2)

    for t, expected in ((1.0, 1.0), (0.7, 0.55), (1 / 3, 0.0)):
        family = paper_family_2223(t)
        add(f"C(rho_12) t={t:.4g}", expected, concurrence_two_qubit(partial_trace(family, (0, 1)), tol), 1e-12)
    for t, expected in ((1.0, 1.0), (0.7, 0.55)):
        report = theorem4_lower_bound(paper_family_2223(t), paper_weights_2223(), opts, tol)
        add(f"theorem4 bound t={t:.4g}", expected, float(np.sqrt(report.rhs)), 1e-9)
    return rows


def cmd_reproduce(config: RunConfig) -> Tuple[str, int]:
    rows = reproduce_rows(config)
    failures = [row["quantity"] for row in rows if not row["ok"]]
    if failures:
        logger.error(f"[CLI] reproduce: {len(failures)} values outside tolerance: {', '.join(failures)}")
    return render(rows, REPRODUCE_COLUMNS, config.format), EXIT_VIOLATION if failures else EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig], Tuple[str, int]]] = {
    "measure": cmd_measure,
    "check": cmd_check,
    "scan": cmd_scan,
    "fuzz": cmd_fuzz,
    "reproduce": cmd_reproduce,
}


def _key_values(items: Sequence[str], what: str) -> Dict[str, str]:
    parsed = {}
    for item in items:
        if "=" not in item:
            raise UsageError(f"{what} expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        parsed[key.strip()] = value.strip()
    return parsed


def _grid(args: argparse.Namespace) -> List[float]:
    if args.t_values:
        return list(args.t_values)
    if args.start is None and args.stop is None and args.step is None:
        return []
    start, stop, step = args.start or 0.33, args.stop if args.stop is not None else 1.0, args.step or 0.01
    if step <= 0 or stop < start:
        raise UsageError(f"empty grid: start={start}, stop={stop}, step={step}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="root seed (default: $MONOGAMY_SEED or built-in)")
    common.add_argument("--restarts", type=int, default=None, help="random decompositions per roof estimate")
    common.add_argument("--tolerance", action="append", default=[], metavar="NAME=VALUE", help="override a tolerance")
    common.add_argument("--format", choices=("csv", "jsonl", "human"), default="csv")
    common.add_argument("--output", default=None, help="write output here instead of stdout")
    common.add_argument("--workers", type=int, default=4, help="concurrent scan points or fuzz cases")
    common.add_argument("--log-level", default=None, help="logging level (default: $MONOGAMY_LOG_LEVEL or WARNING)")

    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("--state", default=None, help="catalog name, e.g. paper-223 or antisymmetric-qutrit")
    state.add_argument("--param", action="append", default=[], metavar="KEY=VALUE", help="state parameter")
    state.add_argument("--t", type=float, default=None, help="shortcut for --param t=VALUE")
    state.add_argument("--dims", default=None, help="local dimensions, e.g. 2x2x3")
    state.add_argument("--rank", type=int, default=None, help="rank of random mixed states")

    parser = argparse.ArgumentParser(
        prog="concurrence-monogamy",
        description="Concurrence, concurrence of assistance and weighted monogamy bounds.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    measure = commands.add_parser("measure", parents=[common, state], help="compute one quantity")
    measure.add_argument("--cut", default=None, help="cut such as 0|1,2 (default 0|rest)")
    measure.add_argument("--quantity", choices=QUANTITIES, default="concurrence")

    check = commands.add_parser("check", parents=[common, state], help="evaluate a monogamy inequality")
    check.add_argument("inequality", choices=INEQUALITIES)
    check.add_argument("--x", type=float, nargs="+", default=[], help="theorem1/theorem2 weights")
    check.add_argument("--p", type=float, nargs="+", default=None, help="corollary weights")
    check.add_argument("--weights", default=None, help="theorem3/theorem4: uniform, paper or JSON")
    check.add_argument("--optimize", action="store_true", help="best weight vertex")
    check.add_argument("--estimate-lhs", action="store_true", help="theorem4: estimate the mixed-state lhs")

    scan = commands.add_parser("scan", parents=[common], help="lower bound along the 2x2x2x3 family")
    scan.add_argument("--t-values", type=float, nargs="+", default=None, help="explicit grid")
    scan.add_argument("--start", type=float, default=None)
    scan.add_argument("--stop", type=float, default=None)
    scan.add_argument("--step", type=float, default=None)
    scan.add_argument("--optimize", action="store_true", help="add the optimized-weight column")

    fuzz = commands.add_parser("fuzz", parents=[common], help="property suite over random states")
    fuzz.add_argument("suite", choices=FUZZ_SUITES)
    fuzz.add_argument("--count", type=int, default=100)
    fuzz.add_argument("--dims", default=None, help="local dimensions, e.g. 2x2x2")
    fuzz.add_argument("--rank", type=int, default=None, help="draw mixed states of this rank")
    fuzz.add_argument("--replay", default=None, help="re-run a replay file")
    fuzz.add_argument("--failures-dir", default="fuzz-failures")

    commands.add_parser("reproduce", parents=[common], help="published values beside computed ones")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values: Dict[str, Any] = {"command": args.command, "format": args.format, "workers": args.workers}
    if args.seed is not None:
        values["seed"] = args.seed
    if args.restarts is not None:
        values["restarts"] = args.restarts
    if args.output:
        values["output"] = args.output
    if args.tolerance:
        values["tolerances"] = Tolerances(**{k: float(v) for k, v in _key_values(args.tolerance, "--tolerance").items()})
    if getattr(args, "state", None):
        parameters: Dict[str, Any] = _key_values(args.param, "--param")
        if args.t is not None:
            parameters["t"] = args.t
        if args.dims:
            parameters["dims"] = args.dims
        if args.rank is not None:
            parameters["rank"] = args.rank
        values["state"] = StateSpec(name=args.state, parameters=parameters)
    if args.command == "measure":
        values.update(cut=args.cut, quantity=args.quantity)
    elif args.command == "check":
        values.update(
            inequality=args.inequality, x=args.x, p=args.p, weights=args.weights,
            optimize=args.optimize, estimate_lhs=args.estimate_lhs,
        )
    elif args.command == "scan":
        values.update(grid=_grid(args), optimize=args.optimize)
    elif args.command == "fuzz":
        values.update(
            suite=args.suite, count=args.count, dims=args.dims, rank=args.rank,
            replay=args.replay, failures_dir=args.failures_dir,
        )
    return RunConfig(**values)


def run(config: RunConfig) -> Tuple[str, int]:
    """Execute a configured run and return its rendered output and exit status."""
    logger.info(f"[CLI] {config.command} seed={config.seed} restarts={config.restarts}")
    return COMMANDS[config.command](config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=(args.log_level or default_log_level()).upper(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )
    try:
        config = config_from_args(args)
        text, status = run(config)
    except (MonogamyError, ValueError) as exc:
        message = " ".join(str(exc).split())
        logger.error(f"[CLI] {message}")
        print(f"error: {message}", file=sys.stderr)
        return EXIT_USAGE
    emit(text, Path(config.output) if config.output else None, sys.stdout)
    return status


if __name__ == "__main__":
    sys.exit(main())

