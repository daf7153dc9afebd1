"""
corank: liveness certificates for games, probabilistic systems and tree automata

This package contains:
- fixpoint: least-fixed-point engine shared by every instance
- game: two-player reachability games and ordinal ranking functions
- pts: probabilistic transition systems and supermartingale certificates
- tree: tree automata and finite-depth tree certificates
- model_io: model, certificate and report formats
- workflow: the certificate check pipeline
- cli: the command-line front end
- testkit: independent oracles and random instances
"""

from .config import ToolkitSettings, load_settings
from .errors import CorankError
from .fixpoint import IterationConfig, IterationResult, OrderDomain, ValueTable, check_postfixed, kleene_lfp
from .game import OMEGA, Fin, GameCoalgebra, OrdinalValue, RankCertificate
from .model_io import parse_certificate, parse_model, render_report
from .reports import CheckReport, Verdict, Violation
from .tree import BOTTOM, TreeAutomaton, TreeCert
from .workflow import CertificationWorkflow

__version__ = "0.1.0"

__all__ = [
    "ToolkitSettings",
    "load_settings",
    "CorankError",
    "IterationConfig",
    "IterationResult",
    "OrderDomain",
    "ValueTable",
    "check_postfixed",
    "kleene_lfp",
    "OMEGA",
    "Fin",
    "GameCoalgebra",
    "OrdinalValue",
    "RankCertificate",
    "parse_certificate",
    "parse_model",
    "render_report",
    "CheckReport",
    "Verdict",
    "Violation",
    "BOTTOM",
    "TreeAutomaton",
    "TreeCert",
    "CertificationWorkflow",
]
