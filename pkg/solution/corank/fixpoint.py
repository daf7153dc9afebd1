"""
Monotone Iteration Engine

Least-fixed-point computation over finite value tables, shared by the game,
probabilistic and tree instances:
- Kleene iteration from a bottom table
- Iteration upwards from a post-fixed point
- Post-fixed-point certification (candidate ⊑ step(candidate) statewise)
- Monotonicity spot checks for property tests

Each instance supplies its own ``OrderDomain`` (order test, bottom element,
join for reporting). Tables are immutable, so every operation is a pure
function of its inputs.
"""

import logging
from dataclasses import dataclass
from types import MappingProxyType
from typing import Any, Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from .errors import CoverageError, NonMonotoneStepError, NotPostfixedError
from .reports import Violation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OrderDomain:
    """Lattice contract of one instance"""
    name: str
    leq: Callable[[Any, Any], bool]
    bottom: Any
    join: Optional[Callable[[Any, Any], Any]] = None


class ValueTable(Mapping):
    """Immutable map from state id to a lattice value, in state order"""

    __slots__ = ("_entries",)

    def __init__(self, entries: Iterable[Tuple[str, Any]]):
        data: Dict[str, Any] = {}
        for state, value in (entries.items() if isinstance(entries, Mapping) else entries):
            if state in data:
                raise CoverageError(f"state {state!r} appears twice in a value table", {"state": state})
            data[state] = value
        self._entries = MappingProxyType(data)

    @classmethod
    def constant(cls, states: Iterable[str], value: Any) -> "ValueTable":
        return cls((state, value) for state in states)

    def __getitem__(self, state: str) -> Any:
        return self._entries[state]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ValueTable):
            return NotImplemented
        return dict(self._entries) == dict(other._entries)

    __hash__ = None

    def __repr__(self) -> str:
        inner = ", ".join(f"{state}: {value!r}" for state, value in self._entries.items())
        return f"ValueTable({{{inner}}})"

    @property
    def states(self) -> Tuple[str, ...]:
        return tuple(self._entries)

    def replace(self, state: str, value: Any) -> "ValueTable":
        if state not in self._entries:
            raise CoverageError(f"unknown state {state!r}", {"state": state})
        return ValueTable((s, value if s == state else v) for s, v in self._entries.items())

    def to_dict(self) -> Dict[str, Any]:
        return dict(self._entries)


@dataclass(frozen=True)
class IterationConfig:
    """Iteration budget; stabilization is exact table equality"""
    max_iterations: int = 10_000

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass(frozen=True)
class IterationResult:
    table: ValueTable
    iterations_used: int
    stabilized: bool


StepMap = Callable[[ValueTable], ValueTable]


def require_total(table: Mapping[str, Any], states: Iterable[str], what: str = "table") -> None:
    """Raise CoverageError unless the table covers exactly the given states"""
    expected = list(states)
    missing = [s for s in expected if s not in table]
    extra = sorted(set(table) - set(expected))
    if missing or extra:
        raise CoverageError(
            f"{what} does not cover the system: missing {missing}, unknown {extra}",
            {"missing": missing, "unknown": extra},
        )


def table_leq(lower: ValueTable, upper: ValueTable, domain: OrderDomain) -> bool:
    return all(domain.leq(lower[state], upper[state]) for state in lower)


def _advance(step: StepMap, start: ValueTable, cfg: IterationConfig,
             domain: Optional[OrderDomain]) -> IterationResult:
    current = start
    for iteration in range(1, cfg.max_iterations + 1):
        following = step(current)
        if following == current:
            logger.debug("stabilized after %d iterations", iteration)
            return IterationResult(current, iteration, True)
        if domain is not None and not table_leq(current, following, domain):
            offenders = [s for s in current if not domain.leq(current[s], following[s])]
            raise NonMonotoneStepError(
                f"iteration chain decreased in the {domain.name} order at {offenders}",
                {"iteration": iteration, "states": offenders},
            )
        current = following
    logger.debug("iteration budget of %d exhausted", cfg.max_iterations)
    return IterationResult(current, cfg.max_iterations, False)


def kleene_lfp(step: StepMap, bottom: ValueTable, cfg: IterationConfig = IterationConfig(),
               domain: Optional[OrderDomain] = None) -> IterationResult:
    """
    Iterate ``step`` from ``bottom`` until two consecutive tables coincide.

    Args:
        step: monotone table-to-table map
        bottom: the all-bottom table of the instance
        cfg: iteration budget
        domain: when given, the chain is verified to be nondecreasing

    Returns:
        IterationResult; ``stabilized`` is False when the budget ran out
    """
    return _advance(step, bottom, cfg, domain)


def check_postfixed(step: StepMap, candidate: ValueTable, domain: OrderDomain) -> List[Violation]:
    """States where candidate(x) ⊑ step(candidate)(x) fails, in state order"""
    image = step(candidate)
    require_total(image, candidate.states, "step image")
    return [
        Violation(state=state, expected=image[state], actual=candidate[state])
        for state in candidate
        if not domain.leq(candidate[state], image[state])
    ]


def iterate_from_postfix(step: StepMap, start: ValueTable, domain: OrderDomain,
                         cfg: IterationConfig = IterationConfig()) -> IterationResult:
    """Iterate upwards from a post-fixed point; the result is a fixed point above it"""
    violations = check_postfixed(step, start, domain)
    if violations:
        raise NotPostfixedError(
            f"start table is not post-fixed at {[v.state for v in violations]}",
            {"states": [v.state for v in violations]},
        )
    return _advance(step, start, cfg, domain)


def check_monotone(step: StepMap, lower: ValueTable, upper: ValueTable,
                   domain: OrderDomain) -> List[str]:
    """
    Check monotonicity on one comparable pair.

    Returns the states where step(lower) ⋢ step(upper); empty when the pair is
    not comparable or the check passes.
    """
    if not table_leq(lower, upper, domain):
        return []
    image_lower, image_upper = step(lower), step(upper)
    return [s for s in image_lower if not domain.leq(image_lower[s], image_upper[s])]


def join_tables(first: ValueTable, second: ValueTable, domain: OrderDomain) -> ValueTable:
    """Pointwise join, used when reporting"""
    if domain.join is None:
        raise ValueError(f"domain {domain.name} has no join")
    return ValueTable((s, domain.join(first[s], second[s])) for s in first)
