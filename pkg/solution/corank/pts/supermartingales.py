"""
Real-valued ranking supermartingales

- epsilon-additive: expected value drops by at least epsilon off Acc
- alpha-multiplicative: expected value contracts by alpha off Acc, floor delta
- gamma-scaled non-counting: gamma·E[b(next)] ≥ b(x), values in [0, 1]
- dominance of epsilon times the expected hitting time under any additive
  certificate, and the logarithmic multiplicative-to-additive conversion
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping

from mpmath import mp

from ..errors import CertificateInvalidError, ValueBelowFloorError
from ..fixpoint import OrderDomain, ValueTable, check_postfixed, require_total
from ..reports import CheckReport, Violation
from .model import INF, Extended, PtsCoalgebra, ext_weighted_sum, is_inf
from .reach import UNIT_DOMAIN, discounted_step, expected_hitting_time, pts_reach_exact

logger = logging.getLogger(__name__)

# larger values are lower in the certificate order; ∞ is bottom
EXTENDED_DOMAIN = OrderDomain("extended-reals-reversed", leq=lambda a, b: a >= b, bottom=INF, join=min)


def _extended(value) -> Extended:
    return INF if is_inf(value) else Fraction(value)


@dataclass(frozen=True)
class AdditiveCert:
    epsilon: Fraction
    values: Mapping[str, Extended]

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if self.epsilon <= 0:
            raise CertificateInvalidError("epsilon must be positive")
        values = {s: _extended(v) for s, v in self.values.items()}
        negative = sorted(s for s, v in values.items() if v < 0)
        if negative:
            raise CertificateInvalidError(f"negative values at {negative}", {"states": negative})
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class MultiplicativeCert:
    alpha: Fraction
    delta: Fraction
    values: Mapping[str, Extended]

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "delta", Fraction(self.delta))
        if not 0 < self.alpha < 1:
            raise CertificateInvalidError(f"alpha {self.alpha} outside (0, 1)")
        if self.delta <= 0:
            raise CertificateInvalidError("delta must be positive")
        values = {s: _extended(v) for s, v in self.values.items()}
        negative = sorted(s for s, v in values.items() if v < 0)
        if negative:
            raise CertificateInvalidError(f"negative values at {negative}", {"states": negative})
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class NonCountingCert:
    gamma: Fraction
    values: Mapping[str, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        if not 0 <= self.gamma < 1:
            raise CertificateInvalidError(f"gamma {self.gamma} outside [0, 1)")
        values = {s: Fraction(v) for s, v in self.values.items()}
        outside = sorted(s for s, v in values.items() if not 0 <= v <= 1)
        if outside:
            raise CertificateInvalidError(f"values outside [0, 1] at {outside}", {"states": outside})
        object.__setattr__(self, "values", values)


def _table(values: Mapping[str, object], pts: PtsCoalgebra, what: str) -> ValueTable:
    require_total(values, pts.states, what)
    return ValueTable((s, values[s]) for s in pts.states)


def _finite_indicator(table: ValueTable) -> Dict[str, int]:
    return {s: int(not is_inf(v)) for s, v in table.items()}


def additive_step(pts: PtsCoalgebra, epsilon: Fraction):
    """Φ for the additive triple: 0 on Acc, Σ τ·b + ε elsewhere"""
    epsilon = Fraction(epsilon)

    def step(table: ValueTable) -> ValueTable:
        result = []
        for state in pts.states:
            if pts.is_accepting(state):
                result.append((state, Fraction(0)))
                continue
            expected = ext_weighted_sum((w, table[t]) for t, w in pts.next[state].items())
            result.append((state, INF if is_inf(expected) else expected + epsilon))
        return ValueTable(result)
    return step


def multiplicative_step(pts: PtsCoalgebra, alpha: Fraction, delta: Fraction):
    """Φ for the multiplicative triple: αδ on Acc, (1/α)·Σ τ·b elsewhere"""
    alpha, delta = Fraction(alpha), Fraction(delta)

    def step(table: ValueTable) -> ValueTable:
        result = []
        for state in pts.states:
            if pts.is_accepting(state):
                result.append((state, alpha * delta))
                continue
            expected = ext_weighted_sum((w, table[t]) for t, w in pts.next[state].items())
            result.append((state, INF if is_inf(expected) else expected / alpha))
        return ValueTable(result)
    return step


def check_additive(pts: PtsCoalgebra, cert: AdditiveCert, with_reference: bool = False) -> CheckReport:
    """
    (Σ τ(x)(x')·b(x')) + ε ≤ b(x) at every non-accepting x.

    The bound is q'∘b: 1 where the certificate is finite.
    """
    table = _table(cert.values, pts, "additive certificate")
    violations = check_postfixed(additive_step(pts, cert.epsilon), table, EXTENDED_DOMAIN)
    reference = dict(pts_reach_exact(pts)) if with_reference else None
    return CheckReport.from_violations("arank", violations, _finite_indicator(table), reference=reference,
                                       metadata={"epsilon": cert.epsilon})


def check_multiplicative(pts: PtsCoalgebra, cert: MultiplicativeCert,
                         with_reference: bool = False) -> CheckReport:
    """Σ τ(x)(x')·b(x') ≤ α·b(x) and b(x) ≥ δ at every non-accepting x"""
    table = _table(cert.values, pts, "multiplicative certificate")
    violations: List[Violation] = []
    for state in pts.non_accepting:
        value = table[state]
        expected = ext_weighted_sum((w, table[t]) for t, w in pts.next[state].items())
        if not is_inf(value) and value < cert.delta:
            violations.append(Violation(state, cert.delta, value, reason="below-delta"))
        if is_inf(value):
            continue
        if is_inf(expected) or expected > cert.alpha * value:
            violations.append(Violation(state, expected, cert.alpha * value, reason="not-contracting"))
    reference = dict(pts_reach_exact(pts)) if with_reference else None
    return CheckReport.from_violations("mrank", violations, _finite_indicator(table), reference=reference,
                                       metadata={"alpha": cert.alpha, "delta": cert.delta})


def check_noncounting(pts: PtsCoalgebra, cert: NonCountingCert, with_reference: bool = False) -> CheckReport:
    """γ·Σ τ(x)(x')·b(x') ≥ b(x) at every non-accepting x; the bound is b itself"""
    table = _table(cert.values, pts, "non-counting certificate")
    violations = check_postfixed(discounted_step(pts, cert.gamma), table, UNIT_DOMAIN)
    reference = dict(pts_reach_exact(pts)) if with_reference else None
    return CheckReport.from_violations("ncrank", violations, table.to_dict(), reference=reference,
                                       metadata={"gamma": cert.gamma})


def verify_additive_dominates(pts: PtsCoalgebra, cert: AdditiveCert) -> CheckReport:
    """
    ε·E(x) ≤ b'(x) everywhere, E the expected hitting time of Acc.

    Raises CertificateInvalidError unless the certificate passes the additive
    check first.
    """
    report = check_additive(pts, cert)
    if not report.passed:
        raise CertificateInvalidError(
            f"additive certificate fails at {report.violated_states()}",
            {"states": report.violated_states()},
        )
    hitting = expected_hitting_time(pts)
    violations = []
    scaled = {}
    for state in pts.states:
        bound = INF if is_inf(hitting[state]) else cert.epsilon * hitting[state]
        scaled[state] = bound
        if bound > cert.values[state]:
            violations.append(Violation(state, bound, cert.values[state], reason="below-expected-time"))
    return CheckReport.from_violations("arank-dominance", violations, report.bound,
                                       metadata={"epsilon": cert.epsilon, "scaled_hitting_time": scaled})


@dataclass(frozen=True)
class ConversionResult:
    """Additive image of a multiplicative certificate plus its tolerance check"""
    additive: AdditiveCert
    report: CheckReport
    precision_bits: int
    tolerance: float


def _to_fraction(value, digits: int) -> Extended:
    if value == mp.inf:
        return INF
    return Fraction(mp.nstr(value, digits, strip_zeros=False))


def convert_multiplicative(pts: PtsCoalgebra, cert: MultiplicativeCert, epsilon: Fraction,
                           precision_bits: int = 128, tolerance: float = 1e-9) -> ConversionResult:
    """
    Map a multiplicative certificate to an approximately additive one.

    Non-accepting values go through p'(a) = ε·(log_{1/α}(a/δ) + 1), accepting
    states to 0 (the image of αδ), ∞ to ∞. The multiplicative conditions are
    checked exactly first; the additive condition of the image is re-checked
    in ``precision_bits``-bit arithmetic with the given tolerance.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise CertificateInvalidError("epsilon must be positive")
    require_total(cert.values, pts.states, "multiplicative certificate")
    below = sorted(s for s in pts.non_accepting
                   if not is_inf(cert.values[s]) and cert.values[s] < cert.delta)
    if below:
        raise ValueBelowFloorError(f"values below delta={cert.delta} at {below}", {"states": below})
    exact = check_multiplicative(pts, cert)
    if not exact.passed:
        raise CertificateInvalidError(f"multiplicative certificate fails at {exact.violated_states()}",
                                      {"states": exact.violated_states()})

    digits = int(precision_bits * 0.30103) + 2
    with mp.workprec(precision_bits):
        eps = mp.mpf(epsilon.numerator) / epsilon.denominator
        delta = mp.mpf(cert.delta.numerator) / cert.delta.denominator
        log_base = mp.log(mp.mpf(cert.alpha.denominator) / cert.alpha.numerator)
        mapped = {}
        for state in pts.states:
            value = cert.values[state]
            if pts.is_accepting(state):
                mapped[state] = mp.mpf(0)
            elif is_inf(value):
                mapped[state] = mp.inf
            else:
                ratio = mp.mpf(value.numerator) / (value.denominator * delta)
                mapped[state] = eps * (mp.log(ratio) / log_base + 1)

        violations = []
        for state in pts.non_accepting:
            if mapped[state] == mp.inf:
                continue
            lhs = eps + mp.fsum(
                mp.mpf(w.numerator) / w.denominator * mapped[t] for t, w in pts.next[state].items()
            )
            if lhs > mapped[state] + tolerance:
                violations.append(Violation(state, _to_fraction(lhs, digits),
                                            _to_fraction(mapped[state], digits), reason="tolerance"))
        values = {s: _to_fraction(v, digits) for s, v in mapped.items()}

    logger.debug("converted multiplicative certificate with %d violations", len(violations))
    additive = AdditiveCert(epsilon, values)
    report = CheckReport.from_violations(
        "mrank-to-arank", violations, {s: int(not is_inf(v)) for s, v in values.items()},
        metadata={"precision_bits": precision_bits, "tolerance": tolerance},
    )
    return ConversionResult(additive, report, precision_bits, tolerance)
