"""
Distribution-valued ranking functions

A certificate assigns every state a distribution over ℕ ∪ {∞}; the
condition at a non-accepting x reads

    Σ_{x'} τ(x)(x')·b(x')([0, a-1]) ≥ b(x)([0, a])   for every a ≥ 0.

Indices up to the horizon are checked exactly. Beyond it, closed-form tails
are compared analytically; a residual mass of unknown location yields the
verified-up-to-horizon verdict.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from ..errors import HorizonError
from ..fixpoint import require_total
from ..reports import CheckReport, Violation
from .model import PtsCoalgebra
from .reach import pts_reach_exact
from .tails import TailSpec

logger = logging.getLogger(__name__)

# how far past the horizon the analytic phase may scan before giving up
ANALYTIC_SCAN_LIMIT = 4096


@dataclass(frozen=True)
class DistCert:
    values: Mapping[str, TailSpec]
    horizon: int

    def __post_init__(self):
        if self.horizon < 1:
            raise HorizonError(f"horizon must be at least 1, got {self.horizon}")
        object.__setattr__(self, "values", dict(self.values))


def _slack(pts: PtsCoalgebra, values: Mapping[str, TailSpec], state: str, a: int) -> Tuple[Fraction, Fraction]:
    """(left side, right side) of the condition at index a"""
    lhs = sum((w * values[t].cdf(a - 1) for t, w in pts.next[state].items()), Fraction(0))
    return lhs, values[state].cdf(a)


def _known(spec: TailSpec, a: int) -> bool:
    return spec.known_until is None or a <= spec.known_until


def _log(value: Fraction) -> float:
    return math.log(value.numerator) - math.log(value.denominator)


def _first_index(scale: Fraction, ratio: Fraction, target: Fraction, start: int) -> int:
    """Smallest a ≥ start with scale·ratio^a < target (scale, target > 0, 0 < ratio < 1)"""
    estimate = (_log(target) - _log(scale)) / _log(ratio)
    if estimate > start + ANALYTIC_SCAN_LIMIT + 2:
        return int(math.ceil(estimate)) + 2
    a = max(start, int(math.floor(estimate)) - 1)
    while a > start and scale * ratio ** (a - 1) < target:
        a -= 1
    while scale * ratio ** a >= target:
        a += 1
    return a


def _tail_decision(pts: PtsCoalgebra, values: Mapping[str, TailSpec], state: str,
                   after: int) -> Tuple[Optional[Violation], bool]:
    """
    Decide the condition for every a > ``after``.

    Returns (violation or None, decided). Undecided means the scan needed to
    separate the geometric terms exceeds ANALYTIC_SCAN_LIMIT.
    """
    own = values[state].closed_form()
    start = max(after + 1, own[0])
    constant = -own[1]
    coefficients: Dict[Fraction, Fraction] = {}
    if own[3] is not None:
        coefficients[own[3]] = coefficients.get(own[3], Fraction(0)) + own[2]
    for target, weight in pts.next[state].items():
        threshold, total, geo_weight, ratio = values[target].closed_form()
        start = max(start, threshold + 1)
        constant += weight * total
        if ratio is not None:
            coefficients[ratio] = coefficients.get(ratio, Fraction(0)) - weight * geo_weight / ratio
    coefficients = {r: c for r, c in coefficients.items() if c != 0}

    def violation_at(a: int) -> Optional[Violation]:
        lhs, rhs = _slack(pts, values, state, a)
        if lhs < rhs:
            return Violation(state, lhs, rhs, reason=f"a={a}")
        return None

    for a in range(after + 1, start):
        found = violation_at(a)
        if found:
            return found, True

    # for a ≥ start: lhs - rhs = constant + Σ c_r·r^a
    if not coefficients:
        return (violation_at(start), True) if constant < 0 else (None, True)

    top = max(coefficients)
    if constant != 0:
        scale = sum(abs(c) for c in coefficients.values())
        settle = _first_index(scale, top, abs(constant), start)
    else:
        rest = {r: c for r, c in coefficients.items() if r != top}
        if not rest:
            return (violation_at(start), True) if coefficients[top] < 0 else (None, True)
        rho = max(rest) / top
        settle = _first_index(sum(abs(c) for c in rest.values()), rho, abs(coefficients[top]), start)
    # from `settle` on the sign is that of the dominant term
    dominant_negative = constant < 0 if constant != 0 else coefficients[top] < 0
    if settle - start > ANALYTIC_SCAN_LIMIT:
        if dominant_negative:
            return violation_at(settle), True
        return None, False
    for a in range(start, settle):
        found = violation_at(a)
        if found:
            return found, True
    return (violation_at(settle), True) if dominant_negative else (None, True)


def check_distribution_ranking(pts: PtsCoalgebra, cert: DistCert, horizon: Optional[int] = None,
                               with_reference: bool = False) -> CheckReport:
    """
    Check a distribution-valued ranking function.

    Args:
        pts: the system
        cert: one TailSpec per state
        horizon: overrides the certificate's horizon for the exact phase
        with_reference: attach exact reachability probabilities

    Returns:
        CheckReport with bound q∘b(x) = 1 - inf_mass(x); the verdict is
        verified-up-to-horizon when some index beyond the horizon could not
        be decided
    """
    horizon = cert.horizon if horizon is None else horizon
    if horizon < 1:
        raise HorizonError(f"horizon must be at least 1, got {horizon}")
    require_total(cert.values, pts.states, "distribution certificate")
    values = cert.values
    violations: List[Violation] = []
    bounded = False

    for state in pts.non_accepting:
        relevant = [values[state]] + [values[t] for t in pts.next[state]]
        found = None
        for a in range(horizon + 1):
            if not _known(values[state], a) or not all(_known(values[t], a - 1) for t in pts.next[state]):
                bounded = True
                break
            lhs, rhs = _slack(pts, values, state, a)
            if lhs < rhs:
                found = Violation(state, lhs, rhs, reason=f"a={a}")
                break
        if found:
            violations.append(found)
            continue
        if any(spec.known_until is not None for spec in relevant):
            bounded = True
            continue
        found, decided = _tail_decision(pts, values, state, horizon)
        if found:
            violations.append(found)
        elif not decided:
            bounded = True

    bound = {s: values[s].finite_mass for s in pts.states}
    reference = dict(pts_reach_exact(pts)) if with_reference else None
    return CheckReport.from_violations("drank", violations, bound, bounded=bounded, reference=reference,
                                       horizon=horizon)


def synthesize_hitting_distribution(pts: PtsCoalgebra, horizon: int) -> Dict[str, TailSpec]:
    """
    First-hitting-time distributions up to the horizon.

    Atom a carries the exact probability of first entering Acc at step a; the
    atom at ∞ is 1 - Reach(x); the remaining finite mass is kept as a
    residual beyond the horizon, so totals stay exact.
    """
    if horizon < 1:
        raise HorizonError(f"horizon must be at least 1, got {horizon}")
    reach = pts_reach_exact(pts)
    hits = {s: [Fraction(1) if pts.is_accepting(s) else Fraction(0)] for s in pts.states}
    for a in range(1, horizon + 1):
        for state in pts.states:
            if pts.is_accepting(state):
                hits[state].append(Fraction(0))
            else:
                hits[state].append(sum((w * hits[t][a - 1] for t, w in pts.next[state].items()), Fraction(0)))
    result = {}
    for state in pts.states:
        atoms = {a: m for a, m in enumerate(hits[state]) if m > 0}
        residual = reach[state] - sum(atoms.values(), Fraction(0))
        result[state] = TailSpec(atoms=atoms, inf_mass=1 - reach[state], residual=residual,
                                 residual_after=horizon if residual > 0 else None)
    logger.debug("synthesized hitting distributions up to horizon %d", horizon)
    return result
