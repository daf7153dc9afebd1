"""
Command-line front end

    python -m corank solve MODEL [--state X] [--iter N]
    python -m corank check MODEL CERT [--horizon N] [--reference]
    python -m corank synthesize MODEL --kind rank|drank|ncrank|trank [--cap C] [--gamma G] [--horizon N]
    python -m corank strategy MODEL CERT
    python -m corank sweep MODEL [--gammas G1,G2,...] [--workers N]
    python -m corank simulate MODEL --state X [--trials N] [--max-steps N] [--seed N]

Every subcommand takes ``--format json|text`` and ``--log-file PATH``.
Exit codes: 0 pass (or verified up to the horizon), 1 certificate failure,
2 usage, parse or I/O errors.
"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from .config import ToolkitSettings, load_settings
from .errors import CorankError, UsageError
from .fixpoint import IterationConfig, ValueTable, kleene_lfp
from .game import OMEGA, Fin, OrdinalValue, extract_strategy, reach_step as game_reach_step, synthesize_game_rank
from .model_io import (
    CERT_SYSTEM,
    ModelDocument,
    document_for,
    parse_certificate,
    parse_model,
    render_report,
    render_value,
    serialize_certificate,
)
from .pts import DistCert, NonCountingCert, gamma_sweep, pts_reach_iter, solve_discounted, sweep_to_csv
from .pts.distributions import synthesize_hitting_distribution
from .reports import Verdict
from .run_logger import RunLogger, RunStage
from .testkit import monte_carlo_reach
from .tree import reach_step as tree_reach_step, synthesize_tree_rank
from .workflow import CertificationWorkflow, lfp_values

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_ERROR = 2

COMMANDS = ("solve", "check", "synthesize", "strategy", "sweep", "simulate")
SYNTHESIS_KINDS = ("rank", "drank", "ncrank", "trank")


def _parse_ordinal(text: str) -> OrdinalValue:
    if text == "omega":
        return OMEGA
    if not text.isdigit():
        raise ValueError(f"cap must be a natural number or omega, got {text!r}")
    return Fin(int(text))


class Invocation(BaseModel):
    """One validated command line; flag combinations are checked before any work"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    command: str
    model: str
    certificate: Optional[str] = None
    state: Optional[str] = None
    iterations: Optional[int] = None
    horizon: Optional[int] = None
    reference: bool = False
    kind: Optional[str] = None
    cap: Optional[str] = None
    gamma: Optional[Fraction] = None
    gammas: Optional[List[Fraction]] = None
    workers: Optional[int] = None
    trials: int = 100_000
    max_steps: int = 200
    seed: Optional[int] = None
    output: Optional[str] = None
    format: str = "text"
    log_file: Optional[str] = None

    @field_validator("format")
    @classmethod
    def _known_format(cls, value: str) -> str:
        if value not in ("json", "text"):
            raise ValueError(f"unknown format {value}")
        return value

    @field_validator("gamma")
    @classmethod
    def _gamma_in_range(cls, value: Optional[Fraction]) -> Optional[Fraction]:
        if value is not None and not 0 <= value < 1:
            raise ValueError(f"gamma {value} outside [0, 1)")
        return value

    @model_validator(mode="after")
    def _flag_combinations(self) -> "Invocation":
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command}")
        if self.command in ("check", "strategy") and not self.certificate:
            raise ValueError(f"{self.command} needs a certificate file")
        if self.horizon is not None and self.horizon < 1:
            raise ValueError("--horizon must be at least 1")
        if self.iterations is not None and self.iterations < 0:
            raise ValueError("--iter must be nonnegative")
        if self.command == "synthesize":
            if self.kind not in SYNTHESIS_KINDS:
                raise ValueError(f"--kind must be one of {', '.join(SYNTHESIS_KINDS)}")
            if self.kind == "ncrank" and self.gamma is None:
                raise ValueError("--kind ncrank needs --gamma")
            if self.gamma is not None and self.kind != "ncrank":
                raise ValueError("--gamma only applies to --kind ncrank")
            if self.cap is not None:
                if self.kind != "rank":
                    raise ValueError("--cap only applies to --kind rank")
                _parse_ordinal(self.cap)
        if self.command == "simulate":
            if not self.state:
                raise ValueError("simulate needs --state")
            if self.trials < 1 or self.max_steps < 0:
                raise ValueError("--trials must be positive and --max-steps nonnegative")
        if self.workers is not None and self.workers < 1:
            raise ValueError("--workers must be positive")
        return self


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corank", description="Liveness certificates for games, PTSs and tree automata")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", default="text", choices=("json", "text"))
    common.add_argument("--log-file", dest="log_file")

    subparsers = parser.add_subparsers(dest="command", required=True)

    solve = subparsers.add_parser("solve", parents=[common], help="least-fixed-point semantics")
    solve.add_argument("model")
    solve.add_argument("--state")
    solve.add_argument("--iter", dest="iterations", type=int)

    check = subparsers.add_parser("check", parents=[common], help="check a certificate")
    check.add_argument("model")
    check.add_argument("certificate")
    check.add_argument("--horizon", type=int)
    check.add_argument("--reference", action="store_true")

    synthesize = subparsers.add_parser("synthesize", parents=[common], help="build the optimal certificate")
    synthesize.add_argument("model")
    synthesize.add_argument("--kind", required=True, choices=SYNTHESIS_KINDS)
    synthesize.add_argument("--cap")
    synthesize.add_argument("--gamma")
    synthesize.add_argument("--horizon", type=int)
    synthesize.add_argument("--output")

    strategy = subparsers.add_parser("strategy", parents=[common], help="positional strategy from a rank certificate")
    strategy.add_argument("model")
    strategy.add_argument("certificate")
    strategy.add_argument("--output")

    sweep = subparsers.add_parser("sweep", parents=[common], help="discounted values over a gamma schedule (CSV)")
    sweep.add_argument("model")
    sweep.add_argument("--gammas", help="comma-separated rationals")
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--output")

    simulate = subparsers.add_parser("simulate", parents=[common], help="Monte Carlo reachability estimate")
    simulate.add_argument("model")
    simulate.add_argument("--state", required=True)
    simulate.add_argument("--trials", type=int, default=100_000)
    simulate.add_argument("--max-steps", dest="max_steps", type=int, default=200)
    simulate.add_argument("--seed", type=int)

    return parser


def _invocation(args: argparse.Namespace) -> Invocation:
    fields = {k: v for k, v in vars(args).items() if v is not None}
    if "gammas" in fields:
        fields["gammas"] = [Fraction(g.strip()) for g in fields["gammas"].split(",") if g.strip()]
    if "gamma" in fields:
        fields["gamma"] = Fraction(fields["gamma"])
    return Invocation(**fields)


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _emit(text: str, output: Optional[str] = None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _header_lines(settings: ToolkitSettings) -> List[str]:
    return [f"# {key}: {value}" for key, value in sorted(settings.header().items())]


def _require_kind(document: ModelDocument, *kinds: str) -> None:
    if document.kind not in kinds:
        raise UsageError(f"this command needs a {' or '.join(kinds)} model, got {document.kind}")


def _values_output(values: Dict[str, Any], kind: str, settings: ToolkitSettings, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"header": settings.header(), "kind": kind, "values": render_value(values)},
                          sort_keys=True, separators=(",", ":"))
    lines = _header_lines(settings)
    lines.extend(f"{state} {render_value(value)}" for state, value in values.items())
    return "\n".join(lines)


def cmd_solve(inv: Invocation, settings: ToolkitSettings, run_logger: RunLogger) -> int:
    document = parse_model(_read(inv.model))
    run_logger.log_stage(RunStage.SOLVE, f"Solving {document.kind} model", {"states": len(document.body.states)})
    body = document.body
    if inv.iterations is None:
        values = lfp_values(document)
    elif document.kind == "pts":
        values = dict(pts_reach_iter(body, inv.iterations))
    else:
        step = game_reach_step(body) if document.kind == "game" else tree_reach_step(body)
        if inv.iterations == 0:
            table = ValueTable.constant(body.states, False)
        else:
            table = kleene_lfp(step, ValueTable.constant(body.states, False),
                               IterationConfig(max_iterations=inv.iterations)).table
        values = {s: int(v) for s, v in table.items()}
    if inv.state is not None:
        if inv.state not in values:
            raise UsageError(f"unknown state {inv.state}")
        values = {inv.state: values[inv.state]}
    _emit(_values_output(values, document.kind, settings, inv.format))
    return EXIT_PASS


def cmd_check(inv: Invocation, settings: ToolkitSettings, run_logger: RunLogger) -> int:
    workflow = CertificationWorkflow(settings, run_logger)
    report = workflow.run_check(_read(inv.model), _read(inv.certificate), horizon=inv.horizon,
                                with_reference=inv.reference)
    _emit(render_report(report, inv.format))
    return EXIT_FAIL if report.verdict == Verdict.FAIL.value else EXIT_PASS


def cmd_synthesize(inv: Invocation, settings: ToolkitSettings, run_logger: RunLogger) -> int:
    document = parse_model(_read(inv.model))
    _require_kind(document, CERT_SYSTEM[inv.kind])
    run_logger.log_stage(RunStage.SYNTHESIZE, f"Synthesizing {inv.kind} certificate")
    body = document.body
    if inv.kind == "rank":
        certificate = synthesize_game_rank(body, _parse_ordinal(inv.cap) if inv.cap else OMEGA)
    elif inv.kind == "drank":
        horizon = inv.horizon or settings.default_horizon
        certificate = DistCert(synthesize_hitting_distribution(body, horizon), horizon)
    elif inv.kind == "ncrank":
        certificate = NonCountingCert(inv.gamma, dict(solve_discounted(body, inv.gamma)))
    else:
        certificate = synthesize_tree_rank(body)
    text = serialize_certificate(document_for(inv.kind, certificate))
    _emit("\n".join(_header_lines(settings)) + "\n" + text, inv.output)
    return EXIT_PASS


def cmd_strategy(inv: Invocation, settings: ToolkitSettings, run_logger: RunLogger) -> int:
    document = parse_model(_read(inv.model))
    _require_kind(document, "game")
    cert_doc = parse_certificate(_read(inv.certificate), settings.default_horizon)
    if cert_doc.kind != "rank":
        raise UsageError("strategies are extracted from rank certificates")
    run_logger.log_stage(RunStage.STRATEGY, "Extracting positional strategy")
    game = document.body
    strategy = extract_strategy(game, cert_doc.certificate)
    order = {s: i for i, s in enumerate(game.states)}
    choices = {
        state: "{" + " ".join(sorted(strategy.option_for(game, state), key=order.get)) + "}"
        for state in game.states if state in strategy.choice
    }
    if inv.format == "json":
        text = json.dumps({"header": settings.header(), "strategy": choices}, sort_keys=True, separators=(",", ":"))
    else:
        text = "\n".join(_header_lines(settings) + [f"choose {s} : {option}" for s, option in choices.items()])
    _emit(text, inv.output)
    return EXIT_PASS


def cmd_sweep(inv: Invocation, settings: ToolkitSettings, run_logger: RunLogger) -> int:
    document = parse_model(_read(inv.model))
    _require_kind(document, "pts")
    schedule = inv.gammas or settings.default_gamma_schedule
    workers = inv.workers or settings.sweep_workers
    run_logger.log_stage(RunStage.SWEEP, f"Sweeping {len(schedule)} discount factors", {"workers": workers})
    result = gamma_sweep(document.body, schedule, workers=workers)
    if inv.format == "json":
        text = json.dumps({
            "header": settings.header(),
            "rows": [{"gamma": str(g), "values": render_value(row)} for g, row in result.rows],
            "supremum": render_value(result.supremum),
        }, sort_keys=True, separators=(",", ":"))
    else:
        text = sweep_to_csv(result)
    _emit(text, inv.output)
    return EXIT_PASS


def cmd_simulate(inv: Invocation, settings: ToolkitSettings, run_logger: RunLogger) -> int:
    document = parse_model(_read(inv.model))
    _require_kind(document, "pts")
    if inv.state not in document.body.states:
        raise UsageError(f"unknown state {inv.state}")
    seed = settings.seed if settings.seed is not None else (inv.seed if inv.seed is not None else 0)
    run_logger.log_stage(RunStage.SIMULATE, f"Simulating {inv.trials} runs from {inv.state}", {"seed": seed})
    estimate, std_error = monte_carlo_reach(document.body, inv.state, inv.trials, inv.max_steps, seed)
    result = {
        "state": inv.state,
        "estimate": repr(estimate),
        "std_error": repr(std_error),
        "trials": inv.trials,
        "max_steps": inv.max_steps,
        "seed": seed,
    }
    if inv.format == "json":
        text = json.dumps({"header": settings.header(), **result}, sort_keys=True, separators=(",", ":"))
    else:
        text = "\n".join(_header_lines(settings) + [f"{key}: {value}" for key, value in result.items()])
    _emit(text)
    return EXIT_PASS


HANDLERS = {
    "solve": cmd_solve,
    "check": cmd_check,
    "synthesize": cmd_synthesize,
    "strategy": cmd_strategy,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_PASS

    run_logger = None
    try:
        settings = load_settings()
        invocation = _invocation(args)
        log_file = invocation.log_file or settings.log_file
        settings = settings.model_copy(update={"log_file": log_file})
        run_logger = RunLogger(log_file)
        run_logger.start_run(invocation.command, {k: str(v) for k, v in vars(args).items() if v is not None})
        code = HANDLERS[invocation.command](invocation, settings, run_logger)
    except (CorankError, OSError, ValidationError, ValueError, ZeroDivisionError) as exc:
        message = exc.message if isinstance(exc, CorankError) else str(exc).splitlines()[0]
        sys.stderr.write(f"corank: error: {message}\n")
        if run_logger is not None:
            run_logger.log_error(RunStage.REPORT, type(exc).__name__, message)
            run_logger.end_run(EXIT_ERROR)
        return EXIT_ERROR
    run_logger.end_run(code)
    return code
