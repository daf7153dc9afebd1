"""
Certificate Check Pipeline using LangGraph

Orchestrates one ``check`` run:
- Parsing of the model and the certificate
- Routing on the certificate kind to the matching checker
- Attaching the independently computed least fixed point
- Building the wire report
"""

import logging
from typing import Any, Dict, Optional, TypedDict

from langgraph.graph import END, StateGraph

from .config import ToolkitSettings
from .errors import CorankError, UsageError
from .game import check_game_ranking, game_lfp_reach
from .model_io import CERT_SYSTEM, CertificateDocument, ModelDocument, Report, parse_certificate, parse_model
from .pts import (
    check_additive,
    check_distribution_ranking,
    check_multiplicative,
    check_noncounting,
    pts_reach_exact,
)
from .reports import CheckReport
from .run_logger import RunLogger, RunStage
from .tree import check_tree_ranking, tree_lfp_reach

logger = logging.getLogger(__name__)


class CheckState(TypedDict, total=False):
    model_text: str
    certificate_text: str
    horizon: Optional[int]
    with_reference: bool
    model: ModelDocument
    certificate: CertificateDocument
    check: CheckReport
    report: Report
    error: CorankError


def lfp_values(document: ModelDocument) -> Dict[str, Any]:
    """Least-fixed-point semantics per state: 0/1 for games and trees, exact Reach for PTSs"""
    body = document.body
    if document.kind == "game":
        reach = game_lfp_reach(body)
        return {s: int(s in reach) for s in body.states}
    if document.kind == "tree":
        reach = tree_lfp_reach(body)
        return {s: int(s in reach) for s in body.states}
    return dict(pts_reach_exact(body))


class CertificationWorkflow:
    def __init__(self, settings: Optional[ToolkitSettings] = None, run_logger: Optional[RunLogger] = None):
        """
        Initialize the check pipeline

        Args:
            settings: effective toolkit settings (defaults when omitted)
            run_logger: structured run log; a console-only logger when omitted
        """
        self.settings = settings or ToolkitSettings()
        self.run_logger = run_logger or RunLogger()
        self.workflow = self._create_workflow()

    def _create_workflow(self):
        """Create the check graph"""
        workflow = StateGraph(CheckState)

        workflow.add_node("parse", self._parse_node)
        workflow.add_node("rank", self._rank_node)
        workflow.add_node("arank", self._arank_node)
        workflow.add_node("mrank", self._mrank_node)
        workflow.add_node("drank", self._drank_node)
        workflow.add_node("ncrank", self._ncrank_node)
        workflow.add_node("trank", self._trank_node)
        workflow.add_node("reference", self._reference_node)
        workflow.add_node("finalize", self._finalize_node)

        workflow.add_conditional_edges(
            "parse",
            self._route_decision,
            {
                "rank": "rank",
                "arank": "arank",
                "mrank": "mrank",
                "drank": "drank",
                "ncrank": "ncrank",
                "trank": "trank",
                "finalize": "finalize",
            },
        )
        for kind in CERT_SYSTEM:
            workflow.add_edge(kind, "reference")
        workflow.add_edge("reference", "finalize")
        workflow.add_edge("finalize", END)

        workflow.set_entry_point("parse")
        return workflow.compile()

    def _parse_node(self, state: CheckState) -> CheckState:
        self.run_logger.log_stage(RunStage.PARSE, "Parsing model and certificate")
        try:
            state["model"] = parse_model(state["model_text"])
            state["certificate"] = parse_certificate(state["certificate_text"], self.settings.default_horizon)
        except CorankError as exc:
            state["error"] = exc
            return state
        expected = state["certificate"].system_kind
        if expected != state["model"].kind:
            state["error"] = UsageError(
                f"{state['certificate'].kind} certificates apply to {expected} models, "
                f"not {state['model'].kind}"
            )
        return state

    def _route_decision(self, state: CheckState) -> str:
        """Route on the certificate kind; any earlier error goes straight to finalize"""
        if state.get("error") is not None:
            return "finalize"
        return state["certificate"].kind

    def _run_checker(self, state: CheckState, checker) -> CheckState:
        kind = state["certificate"].kind
        self.run_logger.log_stage(RunStage.CHECK, f"Checking {kind} certificate",
                                  {"states": len(state["model"].body.states)})
        try:
            state["check"] = checker(state["model"].body, state["certificate"].certificate)
        except CorankError as exc:
            state["error"] = exc
        return state

    def _rank_node(self, state: CheckState) -> CheckState:
        return self._run_checker(state, check_game_ranking)

    def _arank_node(self, state: CheckState) -> CheckState:
        return self._run_checker(state, check_additive)

    def _mrank_node(self, state: CheckState) -> CheckState:
        return self._run_checker(state, check_multiplicative)

    def _drank_node(self, state: CheckState) -> CheckState:
        horizon = state.get("horizon")
        return self._run_checker(
            state, lambda pts, cert: check_distribution_ranking(pts, cert, horizon=horizon)
        )

    def _ncrank_node(self, state: CheckState) -> CheckState:
        return self._run_checker(state, check_noncounting)

    def _trank_node(self, state: CheckState) -> CheckState:
        return self._run_checker(state, check_tree_ranking)

    def _reference_node(self, state: CheckState) -> CheckState:
        if state.get("error") is None and state.get("with_reference"):
            self.run_logger.log_stage(RunStage.SOLVE, "Computing reference least fixed point")
            state["check"].reference = lfp_values(state["model"])
        return state

    def _finalize_node(self, state: CheckState) -> CheckState:
        if state.get("error") is not None:
            self.run_logger.log_error(RunStage.CHECK, type(state["error"]).__name__, state["error"].message)
            return state
        check = state["check"]
        self.run_logger.log_verdict(check.kind, check.verdict.value, len(check.violations))
        state["report"] = Report.from_check(check, self.settings.header())
        return state

    def run_check(self, model_text: str, certificate_text: str, horizon: Optional[int] = None,
                  with_reference: bool = False) -> Report:
        """
        Check a certificate against a model

        Args:
            model_text: ``.lvs`` source
            certificate_text: ``.crt`` source
            horizon: overrides the distribution certificate's horizon
            with_reference: attach the least fixed point to the report

        Returns:
            The wire report

        Raises:
            CorankError: parse, validation, coverage or usage failures
        """
        initial_state: CheckState = {
            "model_text": model_text,
            "certificate_text": certificate_text,
            "horizon": horizon,
            "with_reference": with_reference,
        }
        result = self.workflow.invoke(initial_state)
        if result.get("error") is not None:
            raise result["error"]
        return result["report"]

    def get_workflow_info(self) -> Dict[str, Any]:
        """Describe the check graph"""
        return {
            "workflow_type": "Certificate check pipeline",
            "nodes": ["parse", *CERT_SYSTEM, "reference", "finalize"],
            "routes": {kind: system for kind, system in CERT_SYSTEM.items()},
            "edges": [("parse", "<kind>"), *((kind, "reference") for kind in CERT_SYSTEM),
                      ("reference", "finalize"), ("finalize", "END")],
        }
