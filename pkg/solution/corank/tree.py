"""
Tree Automata and Finite-Depth Tree Certificates

Deterministic tree automata (one symbol and one child tuple per state) with
the universal liveness property "every branch of the run tree meets an
accepting state". This module provides:
- The least fixed point of the all-children modality
- Finite trees with shared nodes, the prefix order and the certificate order
- Certificate checking and optimal synthesis by memoized unfolding
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple, Union

import networkx as nx

from .errors import ModelSyntaxError, ModelValidationError
from .fixpoint import IterationConfig, OrderDomain, ValueTable, check_postfixed, kleene_lfp, require_total
from .game import TRUTH_DOMAIN
from .reports import CheckReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TreeAutomaton:
    alphabet: Mapping[str, int]
    states: Tuple[str, ...]
    trans: Mapping[str, Tuple[str, Tuple[str, ...]]]
    accepting: FrozenSet[str]

    def __post_init__(self):
        declared = set(self.states)
        if len(declared) != len(self.states):
            raise ModelValidationError("duplicate state declaration")
        for symbol, arity in self.alphabet.items():
            if arity < 0:
                raise ModelValidationError(f"symbol {symbol} has negative arity")
        normalized = {}
        for state in self.states:
            if state not in self.trans:
                raise ModelValidationError(f"state {state} has no transition", state=state)
            symbol, children = self.trans[state]
            if symbol not in self.alphabet:
                raise ModelValidationError(f"undeclared symbol {symbol} at {state}", state=state)
            children = tuple(children)
            if len(children) != self.alphabet[symbol]:
                raise ModelValidationError(
                    f"{state}: {symbol} has arity {self.alphabet[symbol]} but {len(children)} children",
                    state=state,
                )
            undeclared = sorted(set(children) - declared)
            if undeclared:
                raise ModelValidationError(f"{state} has undeclared children {undeclared}", state=state)
            normalized[state] = (symbol, children)
        unknown = sorted(set(self.trans) - declared)
        if unknown:
            raise ModelValidationError(f"transitions given for undeclared states {unknown}")
        if not set(self.accepting) <= declared:
            raise ModelValidationError(f"undeclared accepting states {sorted(set(self.accepting) - declared)}")
        object.__setattr__(self, "alphabet", dict(self.alphabet))
        object.__setattr__(self, "trans", normalized)
        object.__setattr__(self, "accepting", frozenset(self.accepting))

    @classmethod
    def build(cls, alphabet: Mapping[str, int], states: Iterable[str],
              trans: Mapping[str, Tuple[str, Iterable[str]]], accepting: Iterable[str]) -> "TreeAutomaton":
        return cls(dict(alphabet), tuple(states), {s: (f, tuple(ch)) for s, (f, ch) in trans.items()},
                   frozenset(accepting))

    def children(self, state: str) -> Tuple[str, ...]:
        return self.trans[state][1]

    def is_accepting(self, state: str) -> bool:
        return state in self.accepting


class TreeNode:
    """
    Unlabeled finite tree node. Nodes are immutable; equality is structural
    with an identity shortcut, so shared subtrees compare in one step.
    """

    __slots__ = ("children", "depth", "_hash")

    def __init__(self, children: Iterable["TreeNode"] = ()):
        self.children: Tuple[TreeNode, ...] = tuple(children)
        self.depth = 1 + max((c.depth for c in self.children), default=-1)
        self._hash = hash(("node", tuple(c._hash for c in self.children)))

    @property
    def arity(self) -> int:
        return len(self.children)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TreeNode):
            return NotImplemented
        return _structurally_equal(self, other, set())

    def __repr__(self) -> str:
        return f"TreeNode({render_tree(self)})"


class _Bottom:
    """The extra least element of the certificate domain"""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "BOTTOM"

    def __reduce__(self):
        return (_Bottom, ())


BOTTOM = _Bottom()
LEAF = TreeNode()

TreeOrBottom = Union[TreeNode, _Bottom]


def _structurally_equal(a: TreeNode, b: TreeNode, seen: Set[Tuple[int, int]]) -> bool:
    if a is b:
        return True
    if a._hash != b._hash or a.arity != b.arity or a.depth != b.depth:
        return False
    key = (id(a), id(b))
    if key in seen:
        return True
    if all(_structurally_equal(x, y, seen) for x, y in zip(a.children, b.children)):
        seen.add(key)
        return True
    return False


class TreeFactory:
    """Interns nodes so identical subtrees share one identity (one per invocation)"""

    def __init__(self):
        self._nodes: Dict[Tuple[int, ...], TreeNode] = {}
        self._owned: Set[int] = set()

    def node(self, children: Iterable[TreeNode]) -> TreeNode:
        children = tuple(self.intern(c) for c in children)
        key = tuple(id(c) for c in children)
        found = self._nodes.get(key)
        if found is None:
            found = TreeNode(children)
            self._nodes[key] = found
            self._owned.add(id(found))
        return found

    def intern(self, tree: TreeNode) -> TreeNode:
        if id(tree) in self._owned:
            return tree
        return self.node(tree.children)

    def __len__(self) -> int:
        return len(self._nodes)


def combine(children: Iterable[TreeNode], factory: Optional[TreeFactory] = None) -> TreeNode:
    """A new root whose subtrees are the given trees, in order"""
    return factory.node(children) if factory is not None else TreeNode(children)


def count_nodes(tree: TreeNode) -> int:
    """Distinct node identities reachable from the root"""
    seen: Set[int] = set()
    stack = [tree]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.extend(node.children)
    return len(seen)


def prefix_leq(smaller: TreeNode, larger: TreeNode) -> bool:
    """
    smaller ⪯ larger: smaller is obtained from larger by cutting off all
    children of some nodes, i.e. every node keeps either none or all of its
    children.
    """
    seen: Set[Tuple[int, int]] = set()

    def walk(a: TreeNode, b: TreeNode) -> bool:
        if a.arity == 0:
            return True
        if a.arity != b.arity or a.depth > b.depth:
            return False
        key = (id(a), id(b))
        if key in seen:
            return True
        if all(walk(x, y) for x, y in zip(a.children, b.children)):
            seen.add(key)
            return True
        return False

    return walk(smaller, larger)


def rank_leq(first: TreeOrBottom, second: TreeOrBottom) -> bool:
    """Certificate order: first is ⊥, or first extends second in the prefix order"""
    if first is BOTTOM:
        return True
    if second is BOTTOM:
        return False
    return prefix_leq(second, first)


TREE_DOMAIN = OrderDomain("finite-trees", leq=rank_leq, bottom=BOTTOM)


@dataclass(frozen=True)
class TreeCert:
    values: Mapping[str, TreeOrBottom]

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))


def reach_step(automaton: TreeAutomaton):
    """Φ for the all-children modality: 1 if accepting or every child is 1"""
    def step(table: ValueTable) -> ValueTable:
        return ValueTable(
            (s, automaton.is_accepting(s) or all(table[c] for c in automaton.children(s)))
            for s in automaton.states
        )
    return step


def rank_step(automaton: TreeAutomaton, factory: Optional[TreeFactory] = None):
    """Φ for the tree algebra: ⟨⟩ when accepting, ⊥ if a child is ⊥, else combine"""
    def step(table: ValueTable) -> ValueTable:
        result = []
        for state in automaton.states:
            if automaton.is_accepting(state):
                result.append((state, LEAF))
                continue
            subtrees = [table[c] for c in automaton.children(state)]
            if any(t is BOTTOM for t in subtrees):
                result.append((state, BOTTOM))
            else:
                result.append((state, combine(subtrees, factory)))
        return ValueTable(result)
    return step


def tree_lfp_reach(automaton: TreeAutomaton, cfg: Optional[IterationConfig] = None) -> FrozenSet[str]:
    """States whose run tree has no infinite branch of non-accepting states"""
    cfg = cfg or IterationConfig(max_iterations=len(automaton.states) + 1)
    result = kleene_lfp(reach_step(automaton), ValueTable.constant(automaton.states, False), cfg, TRUTH_DOMAIN)
    if not result.stabilized:
        raise RuntimeError("tree reachability did not stabilize within |X|+1 steps")
    return frozenset(s for s, v in result.table.items() if v)


def non_accepting_cycle_states(automaton: TreeAutomaton) -> FrozenSet[str]:
    """States that reach a cycle of non-accepting states through non-accepting states"""
    graph = nx.DiGraph()
    rejecting = [s for s in automaton.states if not automaton.is_accepting(s)]
    graph.add_nodes_from(rejecting)
    for state in rejecting:
        for child in automaton.children(state):
            if not automaton.is_accepting(child):
                graph.add_edge(state, child)
    on_cycle: Set[str] = set()
    for component in nx.strongly_connected_components(graph):
        member = next(iter(component))
        if len(component) > 1 or graph.has_edge(member, member):
            on_cycle |= component
    found = set(on_cycle)
    for state in on_cycle:
        found |= nx.ancestors(graph, state)
    return frozenset(found)


def check_tree_ranking(automaton: TreeAutomaton, cert: TreeCert, with_reference: bool = False) -> CheckReport:
    """
    Per state: accepting states accept any value; a non-accepting state must
    be ⊥, or have no ⊥ child and a tree extending the combination of its
    children's trees.
    """
    require_total(cert.values, automaton.states, "tree certificate")
    table = ValueTable((s, cert.values[s]) for s in automaton.states)
    violations = check_postfixed(rank_step(automaton), table, TREE_DOMAIN)
    bound = {s: int(table[s] is not BOTTOM) for s in automaton.states}
    reference = None
    if with_reference:
        reach = tree_lfp_reach(automaton)
        reference = {s: int(s in reach) for s in automaton.states}
    return CheckReport.from_violations("trank", violations, bound, reference=reference)


def synthesize_tree_rank(automaton: TreeAutomaton) -> TreeCert:
    """The optimal certificate: ⊥ off the reach set, the memoized unfolding on it"""
    reach = tree_lfp_reach(automaton)
    factory = TreeFactory()
    built: Dict[str, TreeNode] = {}

    def unfold(state: str) -> TreeNode:
        if state in built:
            return built[state]
        if automaton.is_accepting(state):
            tree = factory.node(())
        else:
            tree = factory.node([unfold(c) for c in automaton.children(state)])
        built[state] = tree
        return tree

    values = {s: unfold(s) if s in reach else BOTTOM for s in automaton.states}
    logger.debug("synthesized tree certificate with %d shared nodes", len(factory))
    return TreeCert(values)


def render_tree(value: TreeOrBottom) -> str:
    """Nested parentheses; ⊥ renders as ``bot``"""
    if value is BOTTOM:
        return "bot"
    cache: Dict[int, str] = {}

    def walk(node: TreeNode) -> str:
        if id(node) not in cache:
            cache[id(node)] = "(" + " ".join(walk(c) for c in node.children) + ")"
        return cache[id(node)]

    return walk(value)


def parse_tree(text: str) -> TreeOrBottom:
    """Inverse of render_tree"""
    text = text.strip()
    if text == "bot":
        return BOTTOM
    factory = TreeFactory()
    stack: List[List[TreeNode]] = []
    result: Optional[TreeNode] = None
    for column, char in enumerate(text, start=1):
        if char.isspace():
            continue
        if result is not None:
            raise ModelSyntaxError("trailing text after tree", 1, column)
        if char == "(":
            stack.append([])
        elif char == ")":
            if not stack:
                raise ModelSyntaxError("unbalanced ')'", 1, column)
            node = factory.node(stack.pop())
            if stack:
                stack[-1].append(node)
            else:
                result = node
        else:
            raise ModelSyntaxError(f"unexpected {char!r} in tree", 1, column)
    if result is None:
        raise ModelSyntaxError("incomplete tree", 1, len(text) + 1)
    return result
