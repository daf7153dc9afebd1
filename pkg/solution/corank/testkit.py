"""
Independent Oracles and Random Instances

Oracles in this module share no solver code with the modules they check:
- Bounded minimax over game plays (coalgebra and explicit arena form)
- Exhaustive play of a positional strategy against every min response
- Vectorized Monte Carlo estimation of bounded-horizon reachability
- Path enumeration for tree automata

Random instances come from a splittable ``numpy.random.SeedSequence`` so a
failing property case can be replayed from its seed alone.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, Field, model_validator

from .game import GameCoalgebra, Strategy
from .pts.model import PtsCoalgebra
from .tree import TreeAutomaton, TreeFactory, TreeNode

logger = logging.getLogger(__name__)


class RandomInstanceSpec(BaseModel):
    """Shape of randomly generated systems"""

    kind: str = "game"
    min_states: int = Field(default=1, ge=1)
    max_states: int = Field(default=6, ge=1)
    max_branching: int = Field(default=3, ge=1)
    accept_density: float = Field(default=0.3, ge=0.0, le=1.0)
    seed: int = 0

    @model_validator(mode="after")
    def _bounds_ordered(self) -> "RandomInstanceSpec":
        if self.kind not in ("game", "pts", "tree"):
            raise ValueError(f"unknown instance kind {self.kind}")
        if self.min_states > self.max_states:
            raise ValueError("min_states exceeds max_states")
        return self


def instance_rngs(seed: int, count: int) -> List[np.random.Generator]:
    """``count`` independent generators derived from one seed"""
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(count)]


def _state_names(rng: np.random.Generator, spec: RandomInstanceSpec) -> List[str]:
    count = int(rng.integers(spec.min_states, spec.max_states + 1))
    return [f"s{i}" for i in range(count)]


def _accepting(rng: np.random.Generator, states: List[str], density: float) -> List[str]:
    return [s for s in states if rng.random() < density]


def random_game(rng: np.random.Generator, spec: RandomInstanceSpec) -> GameCoalgebra:
    states = _state_names(rng, spec)
    options = {}
    for state in states:
        count = int(rng.integers(0, spec.max_branching + 1))
        options[state] = []
        for _ in range(count):
            size = int(rng.integers(0, min(spec.max_branching, len(states)) + 1))
            members = rng.choice(len(states), size=size, replace=False)
            options[state].append([states[int(i)] for i in members])
    return GameCoalgebra.build(states, options, _accepting(rng, states, spec.accept_density))


def _random_distribution(rng: np.random.Generator, targets: List[str]) -> Dict[str, Fraction]:
    weights = [int(w) for w in rng.integers(1, 5, size=len(targets))]
    total = sum(weights)
    return {t: Fraction(w, total) for t, w in zip(targets, weights)}


def random_pts(rng: np.random.Generator, spec: RandomInstanceSpec) -> PtsCoalgebra:
    states = _state_names(rng, spec)
    moves = {}
    for state in states:
        size = int(rng.integers(1, min(spec.max_branching, len(states)) + 1))
        targets = [states[int(i)] for i in rng.choice(len(states), size=size, replace=False)]
        moves[state] = _random_distribution(rng, targets)
    return PtsCoalgebra.build(states, moves, _accepting(rng, states, spec.accept_density))


def random_pts_reach_one(rng: np.random.Generator, spec: RandomInstanceSpec) -> PtsCoalgebra:
    """Random PTS with Reach ≡ 1: s0 is accepting and every other state can step down"""
    states = _state_names(rng, spec)
    moves = {states[0]: {states[0]: Fraction(1)}}
    for index, state in enumerate(states[1:], start=1):
        lower = states[int(rng.integers(0, index))]
        size = int(rng.integers(0, min(spec.max_branching, len(states))))
        others = [states[int(i)] for i in rng.choice(len(states), size=size, replace=False)]
        targets = [lower] + [t for t in others if t != lower]
        moves[state] = _random_distribution(rng, targets)
    accepting = [states[0]] + [s for s in _accepting(rng, states[1:], spec.accept_density)]
    return PtsCoalgebra.build(states, moves, accepting)


def random_tree_automaton(rng: np.random.Generator, spec: RandomInstanceSpec) -> TreeAutomaton:
    states = _state_names(rng, spec)
    alphabet = {f"f{arity}": arity for arity in range(spec.max_branching + 1)}
    trans = {}
    for state in states:
        arity = int(rng.integers(0, spec.max_branching + 1))
        trans[state] = (f"f{arity}", [states[int(i)] for i in rng.integers(0, len(states), size=arity)])
    return TreeAutomaton.build(alphabet, states, trans, _accepting(rng, states, spec.accept_density))


def random_tree(rng: np.random.Generator, max_depth: int, max_arity: int,
                factory: Optional[TreeFactory] = None) -> TreeNode:
    """Random finite tree; children counts are drawn per node"""
    factory = factory or TreeFactory()

    def grow(depth: int) -> TreeNode:
        if depth == 0:
            return factory.node(())
        arity = int(rng.integers(0, max_arity + 1))
        return factory.node([grow(depth - 1) for _ in range(arity)])

    return grow(max_depth)


def brute_force_game_reach(game: GameCoalgebra, depth: int) -> FrozenSet[str]:
    """
    States where max wins every play of at most ``depth`` rounds.

    Plays are explored by bounded minimax: max picks an option, min answers
    with any member; an empty option leaves min stuck, which max wins.
    """
    if depth < len(game.states):
        raise ValueError(f"depth {depth} is below the state count {len(game.states)}")

    @lru_cache(maxsize=None)
    def wins(state: str, remaining: int) -> bool:
        if state in game.accepting:
            return True
        if remaining == 0:
            return False
        for option in game.options[state]:
            if all(wins(member, remaining - 1) for member in option):
                return True
        return False

    return frozenset(s for s in game.states if wins(s, depth))


def brute_force_bipartite_reach(arena: nx.DiGraph, depth: int) -> FrozenSet[str]:
    """Bounded minimax on an explicit arena; returns the winning max nodes"""

    @lru_cache(maxsize=None)
    def wins(node: str, remaining: int) -> bool:
        data = arena.nodes[node]
        if data.get("accept", False):
            return True
        if data.get("player", "max") == "min":
            return all(wins(nxt, remaining) for nxt in arena.successors(node))
        if remaining == 0:
            return False
        return any(wins(nxt, remaining - 1) for nxt in arena.successors(node))

    return frozenset(
        n for n, data in arena.nodes(data=True) if data.get("player", "max") == "max" and wins(n, depth)
    )


def play_strategy_exhaustively(game: GameCoalgebra, strategy: Strategy, start: str,
                               max_steps: int) -> Optional[int]:
    """
    Worst case over all min responses of the number of rounds until an
    accepting state is visited while max follows ``strategy``.

    Returns None if some play avoids acceptance for ``max_steps`` rounds.
    """
    @lru_cache(maxsize=None)
    def worst(state: str, remaining: int) -> Optional[int]:
        if state in game.accepting:
            return 0
        option = strategy.option_for(game, state)
        if option is None or remaining == 0:
            return None
        longest = 0
        for member in option:
            steps = worst(member, remaining - 1)
            if steps is None:
                return None
            longest = max(longest, steps)
        return longest + 1

    return worst(start, max_steps)


def _simulate_batch(successors: np.ndarray, cumulative: np.ndarray, accepting: np.ndarray,
                    start: int, trials: int, max_steps: int, seed: np.random.SeedSequence) -> int:
    rng = np.random.default_rng(seed)
    position = np.full(trials, start, dtype=np.int64)
    hit = accepting[position].copy()
    for _ in range(max_steps):
        active = ~hit
        if not active.any():
            break
        draws = rng.random(trials)
        column = (draws[:, None] >= cumulative[position]).sum(axis=1)
        position = np.where(active, successors[position, column], position)
        hit |= accepting[position]
    return int(hit.sum())


def monte_carlo_reach(pts: PtsCoalgebra, state: str, trials: int, max_steps: int, seed: int,
                      batch_size: int = 10_000, workers: int = 1) -> Tuple[float, float]:
    """
    Estimate the probability of visiting Acc within ``max_steps`` steps.

    Trials run in batches, each with its own child seed; batch results are
    merged in batch order, so the estimate only depends on the seed.

    Returns:
        (estimate, standard error sqrt(p(1-p)/trials))
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    index = {s: i for i, s in enumerate(pts.states)}
    width = max(len(row) for row in pts.next.values())
    successors = np.zeros((len(pts.states), width), dtype=np.int64)
    cumulative = np.ones((len(pts.states), width), dtype=np.float64)
    for s, row in pts.next.items():
        running = Fraction(0)
        for column, (target, weight) in enumerate(row.items()):
            running += weight
            successors[index[s], column] = index[target]
            cumulative[index[s], column] = float(running)
        successors[index[s], len(row):] = successors[index[s], len(row) - 1]
        cumulative[index[s], len(row) - 1:] = 2.0  # never below a uniform draw
    accepting = np.array([s in pts.accepting for s in pts.states], dtype=bool)

    sizes = [batch_size] * (trials // batch_size)
    if trials % batch_size:
        sizes.append(trials % batch_size)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(successors, cumulative, accepting, index[state], size, max_steps, child)
            for size, child in zip(sizes, seeds)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = list(pool.map(lambda job: _simulate_batch(*job), jobs))
    else:
        hits = [_simulate_batch(*job) for job in jobs]

    estimate = sum(hits) / trials
    std_error = math.sqrt(estimate * (1 - estimate) / trials)
    logger.debug("monte carlo from %s: %d/%d hits", state, sum(hits), trials)
    return estimate, std_error


def enumerate_tree_paths(automaton: TreeAutomaton, depth: int) -> Dict[str, bool]:
    """
    Per state: does the run tree have a branch of ``depth`` steps through
    non-accepting states only (depth + 1 states, the root included)?
    """
    if depth < len(automaton.states) + 1:
        raise ValueError(f"depth {depth} is below |X|+1 = {len(automaton.states) + 1}")

    @lru_cache(maxsize=None)
    def deep(state: str, remaining: int) -> bool:
        if state in automaton.accepting:
            return False
        if remaining == 0:
            return True
        return any(deep(child, remaining - 1) for child in automaton.trans[state][1])

    return {s: deep(s, depth) for s in automaton.states}
