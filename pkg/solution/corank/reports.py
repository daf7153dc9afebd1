"""
Check reports shared by every certificate flavor

A ``CheckReport`` is what each ``check_*`` operation returns: the verdict,
the per-state violations, the certified bound q∘b and, when requested, the
independently computed least fixed point for comparison.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional


class Verdict(Enum):
    PASS = "pass"
    FAIL = "fail"
    VERIFIED_UP_TO_HORIZON = "verified-up-to-horizon"


@dataclass(frozen=True)
class Violation:
    """One state where a certificate is not post-fixed"""
    state: str
    expected: Any
    actual: Any
    reason: str = "not-postfixed"


@dataclass
class CheckReport:
    """Structured result of a certificate check"""
    kind: str
    verdict: Verdict
    violations: List[Violation]
    bound: Dict[str, Any]
    reference: Optional[Dict[str, Any]] = None
    horizon: Optional[int] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict == Verdict.FAIL and not self.violations:
            raise ValueError("a failing report must list at least one violation")

    @property
    def passed(self) -> bool:
        """True for pass and verified-up-to-horizon"""
        return self.verdict != Verdict.FAIL

    @classmethod
    def from_violations(cls, kind: str, violations: List[Violation], bound: Dict[str, Any],
                        bounded: bool = False, **extra: Any) -> "CheckReport":
        if violations:
            verdict = Verdict.FAIL
        elif bounded:
            verdict = Verdict.VERIFIED_UP_TO_HORIZON
        else:
            verdict = Verdict.PASS
        return cls(kind=kind, verdict=verdict, violations=list(violations), bound=bound, **extra)

    def violated_states(self) -> List[str]:
        return sorted({violation.state for violation in self.violations})
