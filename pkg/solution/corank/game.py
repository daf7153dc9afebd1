"""
Two-Player Reachability Games

Games in coalgebra form: every state carries a set of options (the max
player's choices), each option is a set of successors (the min player's
responses), plus an accepting bit. This module provides:
- Reachability of the accepting set as the least fixed point of the
  max-min modality
- Ordinal ranking functions capped at a finite ordinal or omega: checking,
  optimal synthesis (attractor layers) and positional strategy extraction
- The finite incompleteness chain
- Conversion to and from explicit max/min arenas
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

import networkx as nx

from .errors import CertificateInvalidError, ModelValidationError
from .fixpoint import (
    IterationConfig,
    OrderDomain,
    ValueTable,
    check_postfixed,
    kleene_lfp,
    require_total,
)
from .reports import CheckReport

logger = logging.getLogger(__name__)


@total_ordering
@dataclass(frozen=True)
class OrdinalValue:
    """An ordinal ≤ omega; ``finite`` is None for omega"""
    finite: Optional[int]

    def __post_init__(self):
        if self.finite is not None and self.finite < 0:
            raise ValueError("ordinals are nonnegative")

    @property
    def is_omega(self) -> bool:
        return self.finite is None

    def __lt__(self, other: "OrdinalValue") -> bool:
        if not isinstance(other, OrdinalValue):
            return NotImplemented
        if self.is_omega:
            return False
        return other.is_omega or self.finite < other.finite

    def successor_capped(self, cap: "OrdinalValue") -> "OrdinalValue":
        """The truncated successor: min(self + 1, cap)"""
        if self.is_omega:
            return cap
        return min(OrdinalValue(self.finite + 1), cap)

    def __str__(self) -> str:
        return "omega" if self.is_omega else str(self.finite)

    def __repr__(self) -> str:
        return "OMEGA" if self.is_omega else f"Fin({self.finite})"


def Fin(n: int) -> OrdinalValue:
    return OrdinalValue(n)


OMEGA = OrdinalValue(None)
ZERO = Fin(0)


@dataclass(frozen=True, eq=True)
class GameCoalgebra:
    """States, per-state option sets, and the accepting set"""
    states: Tuple[str, ...]
    options: Mapping[str, Tuple[FrozenSet[str], ...]]
    accepting: FrozenSet[str]

    def __post_init__(self):
        declared = set(self.states)
        if len(declared) != len(self.states):
            raise ModelValidationError("duplicate state declaration")
        normalized: Dict[str, Tuple[FrozenSet[str], ...]] = {}
        for state in self.states:
            seen: List[FrozenSet[str]] = []
            for option in self.options.get(state, ()):
                members = frozenset(option)
                undeclared = sorted(members - declared)
                if undeclared:
                    raise ModelValidationError(
                        f"option of {state} mentions undeclared states {undeclared}", state=state
                    )
                if members not in seen:
                    seen.append(members)
            normalized[state] = tuple(seen)
        unknown = sorted(set(self.options) - declared)
        if unknown:
            raise ModelValidationError(f"moves given for undeclared states {unknown}")
        if not set(self.accepting) <= declared:
            raise ModelValidationError(f"undeclared accepting states {sorted(set(self.accepting) - declared)}")
        object.__setattr__(self, "options", normalized)
        object.__setattr__(self, "accepting", frozenset(self.accepting))

    @classmethod
    def build(cls, states: Iterable[str], options: Mapping[str, Iterable[Iterable[str]]],
              accepting: Iterable[str]) -> "GameCoalgebra":
        return cls(tuple(states), {s: tuple(frozenset(o) for o in opts) for s, opts in options.items()},
                   frozenset(accepting))

    def is_accepting(self, state: str) -> bool:
        return state in self.accepting


@dataclass(frozen=True)
class RankCertificate:
    """Ordinal ranking function with cap"""
    cap: OrdinalValue
    values: Mapping[str, OrdinalValue]

    def __post_init__(self):
        above = sorted(s for s, v in self.values.items() if self.cap < v)
        if above:
            raise CertificateInvalidError(f"values above cap {self.cap} at {above}", {"states": above})
        object.__setattr__(self, "values", dict(self.values))

    def as_table(self, states: Iterable[str]) -> ValueTable:
        return ValueTable((s, self.values[s]) for s in states)


@dataclass(frozen=True)
class Strategy:
    """Positional strategy of the max player: state -> option index"""
    choice: Mapping[str, int] = field(default_factory=dict)

    def option_for(self, game: GameCoalgebra, state: str) -> Optional[FrozenSet[str]]:
        index = self.choice.get(state)
        return None if index is None else game.options[state][index]


TRUTH_DOMAIN = OrderDomain("truth", leq=lambda a, b: (not a) or b, bottom=False,
                           join=lambda a, b: a or b)


def ordinal_domain(cap: OrdinalValue) -> OrderDomain:
    """⊑_Ord: reverse numeric order, bottom = cap"""
    return OrderDomain("ordinal", leq=lambda a, b: a >= b, bottom=cap, join=min)


def reach_step(game: GameCoalgebra):
    """Φ for the max-min modality over truth values"""
    def step(table: ValueTable) -> ValueTable:
        return ValueTable(
            (state, game.is_accepting(state) or any(
                all(table[member] for member in option) for option in game.options[state]
            ))
            for state in game.states
        )
    return step


def rank_step(game: GameCoalgebra, cap: OrdinalValue):
    """
    Φ for the ranking algebra with cap.

    min over an empty option list is the cap (max is stuck); sup over an
    empty option is 0 (min is stuck), so such an option is worth 1.
    """
    def step(table: ValueTable) -> ValueTable:
        result = []
        for state in game.states:
            if game.is_accepting(state):
                result.append((state, ZERO))
                continue
            best = cap
            for option in game.options[state]:
                worst = max((table[member] for member in option), default=ZERO)
                best = min(best, worst.successor_capped(cap))
            result.append((state, best))
        return ValueTable(result)
    return step


def game_lfp_reach(game: GameCoalgebra, cfg: Optional[IterationConfig] = None) -> FrozenSet[str]:
    """States from which the max player can force a visit to an accepting state"""
    cfg = cfg or IterationConfig(max_iterations=len(game.states) + 1)
    result = kleene_lfp(reach_step(game), ValueTable.constant(game.states, False), cfg, TRUTH_DOMAIN)
    if not result.stabilized:
        raise RuntimeError("reachability iteration did not stabilize within |X|+1 steps")
    logger.debug("game reach stabilized in %d iterations", result.iterations_used)
    return frozenset(s for s, v in result.table.items() if v)


def check_game_ranking(game: GameCoalgebra, cert: RankCertificate,
                       with_reference: bool = False) -> CheckReport:
    """
    Check a capped ordinal ranking function.

    Args:
        game: the game coalgebra
        cert: ranking function, total over the game's states
        with_reference: attach the reachability indicator for comparison

    Returns:
        CheckReport whose bound is q∘b (1 iff the value is below the cap)
    """
    require_total(cert.values, game.states, "ranking certificate")
    table = cert.as_table(game.states)
    violations = check_postfixed(rank_step(game, cert.cap), table, ordinal_domain(cert.cap))
    bound = {s: int(table[s] < cert.cap) for s in game.states}
    reference = None
    if with_reference:
        reach = game_lfp_reach(game)
        reference = {s: int(s in reach) for s in game.states}
    return CheckReport.from_violations("rank", violations, bound, reference=reference,
                                       metadata={"cap": str(cert.cap)})


def attractor_layers(game: GameCoalgebra) -> Dict[str, int]:
    """
    Backward induction: the least number of rounds in which max forces Acc.

    States outside the attractor are absent from the result.
    """
    containing: Dict[str, List[Tuple[str, int]]] = {s: [] for s in game.states}
    pending: Dict[Tuple[str, int], int] = {}
    for state in game.states:
        for index, option in enumerate(game.options[state]):
            pending[(state, index)] = len(option)
            for member in option:
                containing[member].append((state, index))

    layer: Dict[str, int] = {}
    queue: deque = deque()
    for state in game.states:
        if game.is_accepting(state):
            layer[state] = 0
            queue.append(state)
    for state in game.states:
        if state not in layer and any(len(option) == 0 for option in game.options[state]):
            layer[state] = 1
            queue.append(state)

    while queue:
        member = queue.popleft()
        for state, index in containing[member]:
            pending[(state, index)] -= 1
            if pending[(state, index)] == 0 and state not in layer:
                layer[state] = layer[member] + 1
                queue.append(state)
    return layer


def synthesize_game_rank(game: GameCoalgebra, cap: OrdinalValue = OMEGA) -> RankCertificate:
    """The optimal ranking function: the unique fixed point of the capped rank step"""
    layers = attractor_layers(game)
    values = {}
    for state in game.states:
        if state in layers:
            values[state] = min(Fin(layers[state]), cap)
        else:
            values[state] = cap
    return RankCertificate(cap, values)


def game_rank_by_iteration(game: GameCoalgebra, cap: OrdinalValue,
                           cfg: Optional[IterationConfig] = None) -> ValueTable:
    """Kleene iteration of the capped rank step from the all-cap table"""
    cfg = cfg or IterationConfig(max_iterations=len(game.states) + 2)
    result = kleene_lfp(rank_step(game, cap), ValueTable.constant(game.states, cap), cfg, ordinal_domain(cap))
    if not result.stabilized:
        raise RuntimeError("rank iteration did not stabilize")
    return result.table


def extract_strategy(game: GameCoalgebra, cert: RankCertificate) -> Strategy:
    """
    Positional strategy choosing, at each ranked state, an option whose worst
    successor has the least certificate value (lowest index on ties).
    """
    report = check_game_ranking(game, cert)
    if not report.passed:
        raise CertificateInvalidError(
            f"certificate fails at {report.violated_states()}", {"states": report.violated_states()}
        )
    choice: Dict[str, int] = {}
    for state in game.states:
        if game.is_accepting(state) or not game.options[state] or not cert.values[state] < cert.cap:
            continue
        worst = [max((cert.values[m] for m in option), default=ZERO) for option in game.options[state]]
        choice[state] = min(range(len(worst)), key=lambda i: (worst[i], i))
    return Strategy(choice)


def incompleteness_chain(n: int) -> GameCoalgebra:
    """x0 accepting; x_a has the single option {x_b | b < a}, for a = 1..n"""
    if n < 1:
        raise ValueError("the chain needs n >= 1")
    states = [f"x{i}" for i in range(n + 1)]
    options = {f"x{a}": [[f"x{b}" for b in range(a)]] for a in range(1, n + 1)}
    return GameCoalgebra.build(states, options, ["x0"])


def to_bipartite(game: GameCoalgebra) -> nx.DiGraph:
    """
    Explicit arena: max nodes are the game states, min node ``x.i`` stands
    for option i of x. Node attributes: ``player`` and ``accept``.
    """
    arena = nx.DiGraph()
    for state in game.states:
        arena.add_node(state, player="max", accept=game.is_accepting(state))
    for state in game.states:
        for index, option in enumerate(game.options[state]):
            chooser = f"{state}.{index}"
            arena.add_node(chooser, player="min", accept=False)
            arena.add_edge(state, chooser)
            for member in sorted(option):
                arena.add_edge(chooser, member)
    return arena


def game_from_bipartite(arena: nx.DiGraph) -> GameCoalgebra:
    """
    Collapse an explicit arena into coalgebra form.

    Min-node identities are not kept: two min nodes with equal successor
    sets become one option.
    """
    max_nodes = [n for n, data in arena.nodes(data=True) if data.get("player", "max") == "max"]
    for source, target in arena.edges():
        source_player = arena.nodes[source].get("player", "max")
        target_player = arena.nodes[target].get("player", "max")
        if source_player == target_player:
            raise ModelValidationError(f"edge {source} -> {target} does not alternate players",
                                       state=str(source))
    options = {
        x: [frozenset(arena.successors(y)) for y in arena.successors(x)]
        for x in max_nodes
    }
    accepting = [n for n in max_nodes if arena.nodes[n].get("accept", False)]
    return GameCoalgebra.build(max_nodes, options, accepting)
