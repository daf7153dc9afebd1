"""
Reachability probabilities and discounted values

- Exact least solution of the reachability equations
- Bounded-step approximants f_n
- Expected hitting times
- Discounted (gamma-scaled) values and gamma sweeps
"""

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from ..fixpoint import OrderDomain, ValueTable
from .model import INF, PtsCoalgebra, ReachVector, Extended, solve_on, states_reaching

logger = logging.getLogger(__name__)

UNIT_DOMAIN = OrderDomain("unit-interval", leq=lambda a, b: a <= b, bottom=Fraction(0), join=max)


def reach_step(pts: PtsCoalgebra):
    """Φ for the probabilistic modality: 1 on Acc, expected value elsewhere"""
    def step(table: ValueTable) -> ValueTable:
        return ValueTable(
            (s, Fraction(1) if pts.is_accepting(s)
             else sum((w * table[t] for t, w in pts.next[s].items()), Fraction(0)))
            for s in pts.states
        )
    return step


def pts_reach_exact(pts: PtsCoalgebra) -> ReachVector:
    """
    Exact reachability probabilities.

    States without a support path to Acc are fixed to 0 before solving, which
    selects the least solution of the linear equations.
    """
    reaching = states_reaching(pts, pts.accepting)
    known: Dict[str, Fraction] = {}
    for state in pts.states:
        if pts.is_accepting(state):
            known[state] = Fraction(1)
        elif state not in reaching:
            known[state] = Fraction(0)
    unknowns = [s for s in pts.states if s not in known]
    try:
        solved = solve_on(pts, unknowns, Fraction(1), {}, known)
    except ArithmeticError as e:
        raise AssertionError(f"reachability system singular after zero-state elimination: {e}")
    logger.debug("reach solve: %d unknowns, %d fixed", len(unknowns), len(known))
    return ReachVector((s, known[s] if s in known else solved[s]) for s in pts.states)


def pts_reach_iter(pts: PtsCoalgebra, n: int) -> ReachVector:
    """f_n: probability of entering Acc within n-1 transitions (f_0 = 0)"""
    if n < 0:
        raise ValueError("n must be nonnegative")
    values = {s: Fraction(0) for s in pts.states}
    for _ in range(n):
        values = {
            s: Fraction(1) if pts.is_accepting(s)
            else sum((w * values[t] for t, w in pts.next[s].items()), Fraction(0))
            for s in pts.states
        }
    return ReachVector((s, values[s]) for s in pts.states)


def expected_hitting_time(pts: PtsCoalgebra) -> ValueTable:
    """Expected number of steps to Acc; INF wherever Reach < 1"""
    reach = pts_reach_exact(pts)
    known: Dict[str, Fraction] = {s: Fraction(0) for s in pts.accepting}
    unknowns = [s for s in pts.non_accepting if reach[s] == 1]
    solved = solve_on(pts, unknowns, Fraction(1), {s: Fraction(1) for s in unknowns}, known)
    values: List[Tuple[str, Extended]] = []
    for state in pts.states:
        if state in known:
            values.append((state, known[state]))
        elif state in solved:
            values.append((state, solved[state]))
        else:
            values.append((state, INF))
    return ValueTable(values)


def discounted_step(pts: PtsCoalgebra, gamma: Fraction):
    """Φ for the gamma-scaled algebra: 1 on Acc, γ·Σ τ·b elsewhere"""
    def step(table: ValueTable) -> ValueTable:
        return ValueTable(
            (s, Fraction(1) if pts.is_accepting(s)
             else gamma * sum((w * table[t] for t, w in pts.next[s].items()), Fraction(0)))
            for s in pts.states
        )
    return step


def solve_discounted(pts: PtsCoalgebra, gamma: Fraction) -> ReachVector:
    """Unique fixed point of the gamma-scaled step, by exact linear solve"""
    gamma = Fraction(gamma)
    if not 0 <= gamma < 1:
        raise ValueError(f"gamma {gamma} outside [0, 1)")
    known = {s: Fraction(1) for s in pts.accepting}
    solved = solve_on(pts, pts.non_accepting, gamma, {}, known)
    return ReachVector((s, known[s] if s in known else solved[s]) for s in pts.states)


@dataclass(frozen=True)
class SweepResult:
    """Discounted values along a gamma schedule, plus the per-state supremum"""
    rows: Tuple[Tuple[Fraction, ReachVector], ...]
    supremum: Dict[str, Fraction]

    @property
    def states(self) -> Tuple[str, ...]:
        return self.rows[0][1].states


def gamma_sweep(pts: PtsCoalgebra, schedule: Sequence[Fraction], workers: int = 1) -> SweepResult:
    """
    Solve the discounted system at every gamma of the schedule.

    Rows keep the schedule's order whatever the number of workers.
    """
    schedule = [Fraction(g) for g in schedule]
    if not schedule:
        raise ValueError("gamma schedule must be nonempty")
    for gamma in schedule:
        if not 0 <= gamma < 1:
            raise ValueError(f"gamma {gamma} outside [0, 1)")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            vectors = list(pool.map(lambda g: solve_discounted(pts, g), schedule))
    else:
        vectors = [solve_discounted(pts, g) for g in schedule]
    supremum = {s: max(v[s] for v in vectors) for s in pts.states}
    return SweepResult(tuple(zip(schedule, vectors)), supremum)


def sweep_to_csv(result: SweepResult) -> str:
    """CSV with a gamma column then one column per state; exact rationals"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["gamma", *result.states])
    for gamma, vector in result.rows:
        writer.writerow([str(gamma), *(str(vector[s]) for s in result.states)])
    writer.writerow(["sup", *(str(result.supremum[s]) for s in result.states)])
    return buffer.getvalue()
