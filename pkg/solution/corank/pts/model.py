"""
Probabilistic transition systems and exact arithmetic helpers

Values in [0, ∞] are ``Fraction`` or ``INF`` (``math.inf``). Probabilities
are always strictly positive, so ``0 · ∞`` never arises.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Tuple, Union

import networkx as nx

from ..errors import ModelValidationError
from ..fixpoint import ValueTable

INF = math.inf

Extended = Union[Fraction, float]


def is_inf(value: Extended) -> bool:
    return value == INF


def ext_weighted_sum(terms: Iterable[Tuple[Fraction, Extended]]) -> Extended:
    """Σ p·v with p > 0; any infinite summand makes the sum infinite"""
    total = Fraction(0)
    for weight, value in terms:
        if is_inf(value):
            return INF
        total += weight * value
    return total


@dataclass(frozen=True)
class PtsCoalgebra:
    """States, per-state distributions over successors, and the accepting set"""
    states: Tuple[str, ...]
    next: Mapping[str, Mapping[str, Fraction]]
    accepting: FrozenSet[str]

    def __post_init__(self):
        declared = set(self.states)
        if len(declared) != len(self.states):
            raise ModelValidationError("duplicate state declaration")
        normalized: Dict[str, Dict[str, Fraction]] = {}
        for state in self.states:
            distribution = self.next.get(state)
            if not distribution:
                raise ModelValidationError(f"state {state} has no outgoing distribution", state=state)
            row: Dict[str, Fraction] = {}
            for target, weight in distribution.items():
                if target not in declared:
                    raise ModelValidationError(f"{state} moves to undeclared state {target}", state=state)
                weight = Fraction(weight)
                if weight <= 0:
                    raise ModelValidationError(f"non-positive probability {weight} in {state}", state=state)
                row[target] = row.get(target, Fraction(0)) + weight
            if sum(row.values()) != 1:
                raise ModelValidationError(
                    f"probabilities of {state} sum to {sum(row.values())}, not 1", state=state
                )
            normalized[state] = row
        unknown = sorted(set(self.next) - declared)
        if unknown:
            raise ModelValidationError(f"moves given for undeclared states {unknown}")
        if not set(self.accepting) <= declared:
            raise ModelValidationError(f"undeclared accepting states {sorted(set(self.accepting) - declared)}")
        object.__setattr__(self, "next", normalized)
        object.__setattr__(self, "accepting", frozenset(self.accepting))

    @classmethod
    def build(cls, states: Iterable[str], moves: Mapping[str, Mapping[str, Union[Fraction, int, str]]],
              accepting: Iterable[str]) -> "PtsCoalgebra":
        return cls(tuple(states),
                   {s: {t: Fraction(w) for t, w in row.items()} for s, row in moves.items()},
                   frozenset(accepting))

    def is_accepting(self, state: str) -> bool:
        return state in self.accepting

    def successors(self, state: str) -> Mapping[str, Fraction]:
        return self.next[state]

    @property
    def non_accepting(self) -> List[str]:
        return [s for s in self.states if s not in self.accepting]


class ReachVector(ValueTable):
    """Per-state probabilities in [0, 1]"""

    __slots__ = ()

    def __init__(self, entries):
        super().__init__(entries)
        for state, value in self.items():
            if not 0 <= value <= 1:
                raise ValueError(f"reach value {value} of {state} outside [0, 1]")


def support_graph(pts: PtsCoalgebra) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(pts.states)
    for state in pts.states:
        for target in pts.next[state]:
            graph.add_edge(state, target)
    return graph


def states_reaching(pts: PtsCoalgebra, targets: Iterable[str]) -> FrozenSet[str]:
    """States with a path (possibly empty) into ``targets`` in the support graph"""
    graph = support_graph(pts)
    found = set(targets)
    for target in list(found):
        found |= nx.ancestors(graph, target)
    return frozenset(found)


def solve_exact(matrix: List[List[Fraction]], rhs: List[Fraction]) -> List[Fraction]:
    """Gauss-Jordan elimination over the rationals; raises on a singular system"""
    size = len(rhs)
    rows = [list(row) + [value] for row, value in zip(matrix, rhs)]
    for column in range(size):
        pivot = next((r for r in range(column, size) if rows[r][column] != 0), None)
        if pivot is None:
            raise ArithmeticError("singular linear system")
        rows[column], rows[pivot] = rows[pivot], rows[column]
        pivot_value = rows[column][column]
        rows[column] = [entry / pivot_value for entry in rows[column]]
        for r in range(size):
            factor = rows[r][column]
            if r != column and factor != 0:
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[column])]
    return [rows[r][size] for r in range(size)]


def solve_on(pts: PtsCoalgebra, unknowns: List[str], scale: Fraction,
             constant: Mapping[str, Fraction], known: Mapping[str, Fraction]) -> Dict[str, Fraction]:
    """
    Solve v(x) = constant(x) + scale · Σ_y τ(x)(y)·v(y) for x in ``unknowns``,
    reading v(y) from ``known`` for every other successor.
    """
    index = {state: i for i, state in enumerate(unknowns)}
    matrix = [[Fraction(0)] * len(unknowns) for _ in unknowns]
    rhs = [Fraction(0)] * len(unknowns)
    for state, i in index.items():
        matrix[i][i] += 1
        rhs[i] += constant.get(state, Fraction(0))
        for target, weight in pts.next[state].items():
            if target in index:
                matrix[i][index[target]] -= scale * weight
            else:
                rhs[i] += scale * weight * known[target]
    solution = solve_exact(matrix, rhs) if unknowns else []
    return dict(zip(unknowns, solution))
