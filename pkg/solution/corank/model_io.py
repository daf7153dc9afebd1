"""
Model, Certificate and Report Formats

Line-oriented text formats for systems (``.lvs``) and certificates (``.crt``),
parsed with lark grammars, plus the JSON/text report wire format.

Model files::

    system pts
    state x0
    state x3 accept
    move x0 : 1/2 x1, 1/2 x3

Certificate files::

    certificate drank horizon=32
    x0 = { geo(1, 1/3, 1/3), inf: 1/2 }

Only exact rationals are accepted; decimal literals are rejected.
"""

import json
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import networkx as nx
from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken
from pydantic import BaseModel, Field

from .errors import ModelSyntaxError, ModelValidationError
from .game import OMEGA, Fin, GameCoalgebra, OrdinalValue, RankCertificate, game_from_bipartite
from .pts.distributions import DistCert
from .pts.model import INF, PtsCoalgebra, is_inf
from .pts.supermartingales import AdditiveCert, MultiplicativeCert, NonCountingCert
from .pts.tails import GeoTail, TailSpec
from .reports import CheckReport
from .tree import BOTTOM, TreeAutomaton, TreeCert, TreeFactory, TreeNode, render_tree

logger = logging.getLogger(__name__)


MODEL_GRAMMAR = r"""
    start: system statement*

    system: "system" SYSTEM_KIND
    SYSTEM_KIND: "game" | "bgame" | "pts" | "tree"

    ?statement: state_decl | symbol_decl | move | edge

    state_decl: "state" ID flag*
    flag: ACCEPT | MIN
    ACCEPT: "accept"
    MIN: "min"

    symbol_decl: "symbol" ID "/" INT

    move: "move" ID ":" move_body
    ?move_body: game_body | pts_body | tree_body
    game_body: option+
    option: "{" ID* "}"
    pts_body: weighted ("," weighted)*
    weighted: RATIONAL ID
    tree_body: ID "(" (ID ("," ID)*)? ")"

    edge: "edge" ID "->" ID

    RATIONAL: /\d+(\/\d+)?/
    INT: /\d+/
    ID: /[A-Za-z_][A-Za-z0-9_.]*/
    COMMENT: /#[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

CERTIFICATE_GRAMMAR = r"""
    start: "certificate" CERT_KIND assignment*
    CERT_KIND: "rank" | "arank" | "mrank" | "drank" | "ncrank" | "trank"

    assignment: ID "=" value

    ?value: RATIONAL -> rational
          | OMEGA -> omega
          | INF -> infinity
          | BOT -> bottom
          | tail
          | tree

    tail: "{" tail_item ("," tail_item)* "}"
    ?tail_item: atom | geo | inf_atom | rest
    atom: INT ":" RATIONAL
    geo: "geo" "(" INT "," RATIONAL "," RATIONAL ")"
    inf_atom: INF ":" RATIONAL
    rest: "rest" "(" INT ")" ":" RATIONAL

    tree: "(" tree* ")"

    OMEGA: "omega"
    INF: "inf"
    BOT: "bot"
    RATIONAL: /\d+(\/\d+)?/
    INT: /\d+/
    ID: /[A-Za-z_][A-Za-z0-9_.]*/
    COMMENT: /#[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

_model_parser = Lark(MODEL_GRAMMAR, parser="lalr")
_certificate_parser = Lark(CERTIFICATE_GRAMMAR, parser="lalr")

_DECIMAL = re.compile(r"(?<![\w.])\d+\.\d+")

# certificate kind -> system kind it applies to
CERT_SYSTEM = {
    "rank": "game",
    "arank": "pts",
    "mrank": "pts",
    "drank": "pts",
    "ncrank": "pts",
    "trank": "tree",
}

Certificate = Union[RankCertificate, AdditiveCert, MultiplicativeCert, DistCert, NonCountingCert, TreeCert]
System = Union[GameCoalgebra, PtsCoalgebra, TreeAutomaton]


@dataclass(frozen=True)
class ModelDocument:
    """A parsed system; ``kind`` is game, pts or tree (bgame files import as game)"""
    kind: str
    body: System


@dataclass(frozen=True)
class CertificateDocument:
    """A parsed certificate with its kind-specific parameters"""
    kind: str
    certificate: Certificate
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def values(self) -> Mapping[str, Any]:
        return self.certificate.values

    @property
    def system_kind(self) -> str:
        return CERT_SYSTEM[self.kind]


# ---------------------------------------------------------------------------
# parsing helpers


def _reject_decimals(text: str) -> None:
    for number, line in enumerate(text.splitlines(), start=1):
        match = _DECIMAL.search(line.split("#", 1)[0])
        if match:
            raise ModelValidationError(
                f"decimal literal {match.group(0)} is not allowed; write an exact rational p/q",
                line=number, column=match.start() + 1,
            )


def _syntax_error(exc: UnexpectedInput) -> ModelSyntaxError:
    if isinstance(exc, UnexpectedToken):
        if exc.token.type == "$END":
            message = "unexpected end of input"
        else:
            message = f"unexpected token {exc.token.value!r}"
    elif isinstance(exc, UnexpectedCharacters):
        message = f"unexpected character {exc.char!r}"
    elif isinstance(exc, UnexpectedEOF):
        message = "unexpected end of input"
    else:
        message = str(exc).splitlines()[0]
    line = exc.line if getattr(exc, "line", -1) and exc.line > 0 else None
    column = exc.column if getattr(exc, "column", -1) and exc.column > 0 else None
    return ModelSyntaxError(message, line, column)


def _parse(parser: Lark, text: str):
    _reject_decimals(text)
    try:
        return parser.parse(text)
    except UnexpectedInput as exc:
        raise _syntax_error(exc) from exc


def _located(exc: ModelValidationError, lines: Mapping[str, int]) -> ModelValidationError:
    """Attach the source line of the offending state, when known"""
    if exc.line is not None or exc.state not in lines:
        return exc
    message = exc.message
    return ModelValidationError(message, line=lines[exc.state], column=1, state=exc.state)


# ---------------------------------------------------------------------------
# models


@v_args(inline=True)
class _ModelTransformer(Transformer):
    def start(self, system, *statements):
        return system, list(statements)

    def system(self, kind):
        return str(kind)

    def state_decl(self, name, *flags):
        return ("state", name, {str(f) for f in flags})

    def flag(self, token):
        return token

    def symbol_decl(self, name, arity):
        return ("symbol", name, int(arity))

    def move(self, name, body):
        return ("move", name, body)

    def game_body(self, *options):
        return ("game", list(options))

    def option(self, *members):
        return [str(m) for m in members]

    def pts_body(self, *weighted):
        return ("pts", list(weighted))

    def weighted(self, weight, target):
        return Fraction(str(weight)), str(target)

    def tree_body(self, symbol, *children):
        return ("tree", (str(symbol), [str(c) for c in children]))

    def edge(self, source, target):
        return ("edge", source, target)


def parse_model(text: str) -> ModelDocument:
    """
    Parse a ``.lvs`` model.

    Raises:
        ModelSyntaxError: malformed text (with line and column)
        ModelValidationError: undeclared states, probability sums other than
            1, arity mismatches, decimal literals, moves of the wrong kind
    """
    kind, statements = _ModelTransformer().transform(_parse(_model_parser, text))
    states: List[str] = []
    accepting: List[str] = []
    min_nodes: List[str] = []
    alphabet: Dict[str, int] = {}
    moves: Dict[str, Any] = {}
    edges: List[Tuple[str, str]] = []
    lines: Dict[str, int] = {}

    for statement in statements:
        tag, name = statement[0], statement[1]
        where = dict(line=name.line, column=name.column)
        if tag == "state":
            if str(name) in states:
                raise ModelValidationError(f"state {name} declared twice", state=str(name), **where)
            if "min" in statement[2] and kind != "bgame":
                raise ModelValidationError("only bgame models have min states", state=str(name), **where)
            states.append(str(name))
            lines.setdefault(str(name), name.line)
            if "accept" in statement[2]:
                accepting.append(str(name))
            if "min" in statement[2]:
                min_nodes.append(str(name))
        elif tag == "symbol":
            if kind != "tree":
                raise ModelValidationError("symbol declarations belong to tree models", **where)
            if str(name) in alphabet:
                raise ModelValidationError(f"symbol {name} declared twice", **where)
            alphabet[str(name)] = statement[2]
        elif tag == "edge":
            if kind != "bgame":
                raise ModelValidationError("edges belong to bgame models", **where)
            edges.append((str(name), str(statement[2])))
        else:
            body_kind, body = statement[2]
            if kind != body_kind:
                raise ModelValidationError(f"{body_kind} move in a {kind} model", state=str(name), **where)
            if str(name) in moves:
                raise ModelValidationError(f"state {name} has two move lines", state=str(name), **where)
            moves[str(name)] = body
            lines[str(name)] = name.line

    try:
        if kind == "game":
            body = GameCoalgebra.build(states, moves, accepting)
        elif kind == "pts":
            rows = {}
            for state, weighted in moves.items():
                row: Dict[str, Fraction] = {}
                for weight, target in weighted:
                    if target in row:
                        raise ModelValidationError(f"{state} lists {target} twice", state=state)
                    row[target] = weight
                rows[state] = row
            body = PtsCoalgebra.build(states, rows, accepting)
        elif kind == "tree":
            body = TreeAutomaton.build(alphabet, states, moves, accepting)
        else:
            body = game_from_bipartite(_arena(states, accepting, min_nodes, edges))
            kind = "game"
    except ModelValidationError as exc:
        raise _located(exc, lines) from exc
    logger.debug("parsed %s model with %d states", kind, len(states))
    return ModelDocument(kind, body)


def _arena(states: List[str], accepting: List[str], min_nodes: List[str],
           edges: List[Tuple[str, str]]) -> nx.DiGraph:
    arena = nx.DiGraph()
    for state in states:
        arena.add_node(state, player="min" if state in min_nodes else "max", accept=state in accepting)
    for source, target in edges:
        for end in (source, target):
            if end not in arena:
                raise ModelValidationError(f"edge mentions undeclared state {end}", state=source)
        arena.add_edge(source, target)
    return arena


def _members(option, order: Mapping[str, int]) -> str:
    return "{" + " ".join(sorted(option, key=order.get)) + "}"


def serialize_model(document: ModelDocument) -> str:
    """Inverse of parse_model (bgame sources serialize in game form)"""
    body = document.body
    lines = [f"system {document.kind}"]
    if document.kind == "tree":
        lines.extend(f"symbol {symbol}/{arity}" for symbol, arity in body.alphabet.items())
    for state in body.states:
        lines.append(f"state {state} accept" if state in body.accepting else f"state {state}")
    if document.kind == "game":
        order = {s: i for i, s in enumerate(body.states)}
        for state in body.states:
            if body.options[state]:
                lines.append(f"move {state} : " + " ".join(_members(o, order) for o in body.options[state]))
    elif document.kind == "pts":
        for state in body.states:
            lines.append(f"move {state} : " + ", ".join(f"{w} {t}" for t, w in body.next[state].items()))
    else:
        for state in body.states:
            symbol, children = body.trans[state]
            lines.append(f"move {state} : {symbol}(" + ", ".join(children) + ")")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# certificates


@v_args(inline=True)
class _CertificateTransformer(Transformer):
    def __init__(self):
        super().__init__()
        self.factory = TreeFactory()

    def start(self, kind, *assignments):
        return kind, list(assignments)

    def assignment(self, name, value):
        return name, value

    def rational(self, token):
        return ("rational", Fraction(str(token)))

    def omega(self, _):
        return ("omega", OMEGA)

    def infinity(self, _):
        return ("inf", INF)

    def bottom(self, _):
        return ("bot", BOTTOM)

    def tail(self, *items):
        return ("tail", list(items))

    def atom(self, index, mass):
        return ("atom", int(index), Fraction(str(mass)))

    def geo(self, start, coeff, ratio):
        return ("geo", int(start), Fraction(str(coeff)), Fraction(str(ratio)))

    def inf_atom(self, _, mass):
        return ("inf", Fraction(str(mass)))

    def rest(self, after, mass):
        return ("rest", int(after), Fraction(str(mass)))

    def tree(self, *children):
        return ("tree", self.factory.node(child[1] for child in children))


def _tail_from_items(items: List[tuple]) -> TailSpec:
    atoms: Dict[int, Fraction] = {}
    geo = None
    inf_mass = Fraction(0)
    residual, residual_after = Fraction(0), None
    for item in items:
        if item[0] == "atom":
            if item[1] in atoms:
                raise ValueError(f"index {item[1]} given twice")
            atoms[item[1]] = item[2]
        elif item[0] == "geo":
            if geo is not None:
                raise ValueError("at most one geometric tail")
            geo = GeoTail(item[1], item[2], item[3])
        elif item[0] == "inf":
            inf_mass += item[1]
        else:
            if residual_after is not None:
                raise ValueError("at most one residual")
            residual_after, residual = item[1], item[2]
    return TailSpec(atoms=atoms, geo=geo, inf_mass=inf_mass, residual=residual, residual_after=residual_after)


def _as_ordinal(value: tuple) -> OrdinalValue:
    if value[0] == "omega":
        return OMEGA
    if value[0] == "rational" and value[1].denominator == 1:
        return Fin(int(value[1]))
    raise ValueError("expected a natural number or omega")


def _as_extended(value: tuple):
    if value[0] in ("inf", "rational"):
        return value[1]
    raise ValueError("expected a rational or inf")


def _as_rational(value: tuple) -> Fraction:
    if value[0] == "rational":
        return value[1]
    raise ValueError("expected a rational")


def _as_natural(value: tuple) -> int:
    rational = _as_rational(value)
    if rational.denominator != 1:
        raise ValueError("expected a natural number")
    return int(rational)


def _as_tail(value: tuple) -> TailSpec:
    if value[0] != "tail":
        raise ValueError("expected a distribution { ... }")
    return _tail_from_items(value[1])


def _as_tree(value: tuple):
    if value[0] in ("tree", "bot"):
        return value[1]
    raise ValueError("expected a tree ( ... ) or bot")


# kind -> (required parameters, optional parameters, value converter)
_CERT_SHAPES = {
    "rank": (("cap",), (), _as_ordinal),
    "arank": (("epsilon",), (), _as_extended),
    "mrank": (("alpha", "delta"), (), _as_extended),
    "drank": ((), ("horizon",), _as_tail),
    "ncrank": (("gamma",), (), _as_rational),
    "trank": ((), (), _as_tree),
}

_PARAM_CONVERTERS = {
    "cap": _as_ordinal,
    "epsilon": _as_rational,
    "alpha": _as_rational,
    "delta": _as_rational,
    "horizon": _as_natural,
    "gamma": _as_rational,
}


def parse_certificate(text: str, default_horizon: int = 64) -> CertificateDocument:
    """
    Parse a ``.crt`` certificate.

    Parameters sit on the ``certificate`` line; every later ``id = value``
    line is a state entry. ``omega``, ``inf`` and ``bot`` are reserved value
    tokens.
    """
    tree = _parse(_certificate_parser, text)
    kind_token, assignments = _CertificateTransformer().transform(tree)
    kind, header_line = str(kind_token), kind_token.line
    required, optional, convert = _CERT_SHAPES[kind]

    params: Dict[str, Any] = {}
    values: Dict[str, Any] = {}
    for name, raw in assignments:
        where = dict(line=name.line, column=name.column)
        key = str(name)
        if name.line == header_line:
            if key not in required and key not in optional:
                raise ModelValidationError(f"unknown parameter {key} for {kind} certificates", **where)
            target, converter = params, _PARAM_CONVERTERS[key]
        else:
            target, converter = values, convert
        if key in target:
            raise ModelValidationError(f"{key} assigned twice", state=key, **where)
        try:
            target[key] = converter(raw)
        except ValueError as exc:
            raise ModelValidationError(f"{key}: {exc}", state=key, **where) from exc

    missing = [p for p in required if p not in params]
    if missing:
        raise ModelValidationError(f"{kind} certificates need parameters {missing}", line=header_line, column=1)

    if kind == "rank":
        certificate = RankCertificate(params["cap"], values)
    elif kind == "arank":
        certificate = AdditiveCert(params["epsilon"], values)
    elif kind == "mrank":
        certificate = MultiplicativeCert(params["alpha"], params["delta"], values)
    elif kind == "drank":
        certificate = DistCert(values, params.get("horizon", default_horizon))
    elif kind == "ncrank":
        certificate = NonCountingCert(params["gamma"], values)
    else:
        certificate = TreeCert(values)
    return CertificateDocument(kind, certificate, params)


def certificate_params(kind: str, certificate: Certificate) -> Dict[str, Any]:
    """Header parameters of a certificate object"""
    if kind == "rank":
        return {"cap": certificate.cap}
    if kind == "arank":
        return {"epsilon": certificate.epsilon}
    if kind == "mrank":
        return {"alpha": certificate.alpha, "delta": certificate.delta}
    if kind == "drank":
        return {"horizon": certificate.horizon}
    if kind == "ncrank":
        return {"gamma": certificate.gamma}
    return {}


def document_for(kind: str, certificate: Certificate) -> CertificateDocument:
    return CertificateDocument(kind, certificate, certificate_params(kind, certificate))


def serialize_certificate(document: CertificateDocument) -> str:
    """Inverse of parse_certificate"""
    header = " ".join([f"certificate {document.kind}"] +
                      [f"{k}={render_value(v)}" for k, v in certificate_params(document.kind, document.certificate).items()])
    lines = [header]
    lines.extend(f"{state} = {render_value(value)}" for state, value in document.values.items())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# rendering and reports


def format_tail(spec: TailSpec) -> str:
    parts = [f"{i}: {m}" for i, m in spec.atoms.items()]
    if spec.geo is not None:
        parts.append(f"geo({spec.geo.start}, {spec.geo.coeff}, {spec.geo.ratio})")
    if spec.inf_mass:
        parts.append(f"inf: {spec.inf_mass}")
    if spec.residual:
        parts.append(f"rest({spec.residual_after}): {spec.residual}")
    return "{ " + ", ".join(parts) + " }"


def render_value(value: Any) -> Any:
    """Wire form of a lattice value: "p/q", "inf", "omega", "bot", trees in parentheses"""
    if value is None:
        return None
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, TreeNode) or value is BOTTOM:
        return render_tree(value)
    if isinstance(value, OrdinalValue):
        return str(value)
    if isinstance(value, TailSpec):
        return format_tail(value)
    if isinstance(value, float):
        return "inf" if is_inf(value) else repr(value)
    if isinstance(value, (int, Fraction)):
        return str(value)
    if isinstance(value, Mapping):
        return {str(k): render_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [render_value(v) for v in value]
    return str(value)


class ViolationEntry(BaseModel):
    state: str
    expected: str
    actual: str
    reason: str = "not-postfixed"


class Report(BaseModel):
    """Stable wire form of a CheckReport"""
    kind: str
    verdict: str
    violations: List[ViolationEntry] = Field(default_factory=list)
    bound: Dict[str, str] = Field(default_factory=dict)
    reference: Optional[Dict[str, str]] = None
    horizon: Optional[int] = None
    parameters: Dict[str, Any] = Field(default_factory=dict)
    header: Dict[str, str] = Field(default_factory=dict)

    @classmethod
    def from_check(cls, report: CheckReport, header: Optional[Dict[str, str]] = None) -> "Report":
        return cls(
            kind=report.kind,
            verdict=report.verdict.value,
            violations=[
                ViolationEntry(state=v.state, expected=_text(v.expected), actual=_text(v.actual), reason=v.reason)
                for v in report.violations
            ],
            bound={s: _text(v) for s, v in report.bound.items()},
            reference=None if report.reference is None else {s: _text(v) for s, v in report.reference.items()},
            horizon=report.horizon,
            parameters={k: render_value(v) for k, v in report.metadata.items()},
            header=dict(header or {}),
        )


def _text(value: Any) -> str:
    rendered = render_value(value)
    return rendered if isinstance(rendered, str) else json.dumps(rendered, sort_keys=True)


def render_report(report: Union[Report, CheckReport], fmt: str = "json",
                  header: Optional[Dict[str, str]] = None) -> str:
    """
    Render a report as stable JSON (sorted keys, compact separators) or as
    human-readable text.
    """
    if isinstance(report, CheckReport):
        report = Report.from_check(report, header)
    if fmt == "json":
        return json.dumps(report.model_dump(exclude_none=True), sort_keys=True, separators=(",", ":"))
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt}")
    lines = [f"# {key}: {value}" for key, value in sorted(report.header.items())]
    lines.append(f"kind: {report.kind}")
    lines.append(f"verdict: {report.verdict}")
    if report.horizon is not None:
        lines.append(f"horizon: {report.horizon}")
    for key, value in sorted(report.parameters.items()):
        if not isinstance(value, dict):
            lines.append(f"{key}: {value}")
    for violation in report.violations:
        lines.append(f"violation {violation.state} ({violation.reason}): "
                     f"expected {violation.expected}, actual {violation.actual}")
    lines.append("bound:")
    lines.extend(f"  {state} {value}" for state, value in report.bound.items())
    if report.reference is not None:
        lines.append("reference:")
        lines.extend(f"  {state} {value}" for state, value in report.reference.items())
    return "\n".join(lines)
