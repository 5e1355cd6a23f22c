"""Line-oriented ``.qpn`` and ``.bn`` text formats.

Both formats hold one directive per line. ``#`` starts a comment, blank lines
are ignored, and tokens are separated by whitespace. Every rejected input
raises exactly one :class:`ParseError` that points at the first offending
token.

.qpn::

    qpn 1
    delta 0.3
    node A
    influence A T --
    reverse A T -?
    synergy T F D=true -?

.bn::

    bn 1
    node D T F
    cpt D | T=true F=false : 0.9
"""

from __future__ import annotations

import re
from typing import Iterator, NamedTuple, Optional

from eqpn.network import NAME_RE, Bn, Qpn, QpnArc, SynergyEntry, parent_rows
from eqpn.signs import EnhancedSign, SignParseError

__all__ = [
    "ParseError",
    "parse_qpn",
    "parse_bn",
    "serialize_qpn",
    "serialize_bn",
    "canonical_qpn",
    "format_probability",
]

_DECIMAL_RE = re.compile(r"^(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?$")
END = "end of input"


class ParseError(ValueError):
    def __init__(self, line: int, column: int, expected: str, found: str):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        super().__init__(f"line {line}, column {column}: expected {expected}, found {found!r}")


class Token(NamedTuple):
    text: str
    line: int
    column: int


class _Line(NamedTuple):
    number: int
    tokens: list[Token]
    end_column: int


def _lines(text: str) -> Iterator[_Line]:
    for number, raw in enumerate(text.split("\n"), start=1):
        raw = raw.rstrip("\r")
        body = raw.split("#", 1)[0]
        tokens = [Token(m.group(), number, m.start() + 1) for m in re.finditer(r"\S+", body)]
        if tokens:
            yield _Line(number, tokens, len(body.rstrip()) + 1)


class _Cursor:
    """Sequential access to the tokens of one line."""

    def __init__(self, line: _Line):
        self.line = line
        self.pos = 0

    def next(self, expected: str) -> Token:
        if self.pos >= len(self.line.tokens):
            raise ParseError(self.line.number, self.line.end_column, expected, "end of line")
        tok = self.line.tokens[self.pos]
        self.pos += 1
        return tok

    def peek(self) -> Optional[Token]:
        return self.line.tokens[self.pos] if self.pos < len(self.line.tokens) else None

    def end(self) -> None:
        tok = self.peek()
        if tok is not None:
            raise ParseError(tok.line, tok.column, "end of line", tok.text)


def _fail(tok: Token, expected: str) -> ParseError:
    return ParseError(tok.line, tok.column, expected, tok.text)


def _name(cur: _Cursor, what: str = "node name") -> Token:
    tok = cur.next(what)
    if not NAME_RE.match(tok.text):
        raise _fail(tok, what)
    return tok


def _decimal(tok: Token, what: str) -> float:
    if not _DECIMAL_RE.match(tok.text):
        raise _fail(tok, what)
    return float(tok.text)


def _bool(tok: Token, text: str) -> bool:
    if text == "true":
        return True
    if text == "false":
        return False
    raise ParseError(tok.line, tok.column, "true or false", tok.text)


def _header(lines: list[_Line], keyword: str) -> None:
    if not lines:
        raise ParseError(1, 1, f"'{keyword} 1' header", END)
    cur = _Cursor(lines[0])
    tok = cur.next(f"'{keyword} 1' header")
    if tok.text != keyword:
        raise _fail(tok, f"'{keyword} 1' header")
    version = cur.next("format version 1")
    if version.text != "1":
        raise _fail(version, "format version 1")
    cur.end()


def _declared_names(lines: list[_Line]) -> set[str]:
    return {ln.tokens[1].text for ln in lines if len(ln.tokens) >= 2 and ln.tokens[0].text == "node"}


def _known(tok: Token, names: set[str]) -> Token:
    if tok.text not in names:
        raise _fail(tok, "declared node name")
    return tok


def _arc_sign(tok: Token) -> EnhancedSign:
    try:
        sign = EnhancedSign.parse(tok.text)
    except SignParseError:
        raise _fail(tok, "sign token (++, +, +?, 0, -?, -, --, ?)") from None
    if sign.kind.indexed and sign.index != 1:
        raise _fail(tok, "sign with multiplication index 1")
    return sign


def parse_qpn(text: str) -> Qpn:
    lines = list(_lines(text))
    _header(lines, "qpn")
    names = _declared_names(lines)
    nodes: list[str] = []
    delta: Optional[float] = None
    arcs: dict[tuple[str, str], QpnArc] = {}
    synergies: list[SynergyEntry] = []
    syn_keys = set()
    for line in lines[1:]:
        cur = _Cursor(line)
        directive = cur.next("directive")
        kw = directive.text
        if kw == "delta":
            tok = cur.next("cut-off value")
            if delta is not None:
                raise _fail(directive, "at most one delta line")
            value = _decimal(tok, "decimal cut-off value")
            if not 0.0 < value <= 1.0:
                raise _fail(tok, "cut-off value in (0, 1]")
            delta = value
        elif kw == "node":
            tok = _name(cur)
            if tok.text in nodes:
                raise _fail(tok, "node name not declared before")
            nodes.append(tok.text)
        elif kw in ("influence", "reverse"):
            src = _known(_name(cur), names)
            dst = _known(_name(cur), names)
            if dst.text == src.text:
                raise _fail(dst, "a node other than the source")
            sign_tok = cur.next("sign token")
            sign = _arc_sign(sign_tok)
            key = (src.text, dst.text)
            if kw == "influence":
                if key in arcs:
                    raise _fail(directive, f"a single influence line for {src.text} {dst.text}")
                arcs[key] = QpnArc(src.text, dst.text, sign)
            else:
                if key not in arcs:
                    raise _fail(directive, f"an influence line for {src.text} {dst.text} before its reverse")
                if arcs[key].reverse_sign is not None:
                    raise _fail(directive, f"a single reverse line for {src.text} {dst.text}")
                arcs[key] = QpnArc(src.text, dst.text, arcs[key].sign, sign)
        elif kw == "synergy":
            a = _known(_name(cur), names)
            b = _known(_name(cur), names)
            if a.text == b.text:
                raise _fail(b, "a second, distinct node")
            spec = cur.next("CHILD=true|false")
            child, sep, value = spec.text.partition("=")
            if not sep or child not in names:
                raise _fail(spec, "CHILD=true|false with a declared child")
            child_value = _bool(spec, value)
            sign = _arc_sign(cur.next("sign token"))
            entry = SynergyEntry((a.text, b.text), child, child_value, sign)
            if entry.key in syn_keys:
                raise _fail(directive, "a single synergy line per pair, child and value")
            syn_keys.add(entry.key)
            synergies.append(entry)
        else:
            raise _fail(directive, "directive (delta, node, influence, reverse, synergy)")
        cur.end()
    return Qpn(tuple(nodes), tuple(arcs.values()), tuple(synergies), delta)


def parse_bn(text: str) -> Bn:
    lines = list(_lines(text))
    _header(lines, "bn")
    names = _declared_names(lines)
    nodes: list[str] = []
    decl_line: dict[str, Token] = {}
    parents: dict[str, tuple[str, ...]] = {}
    cpt: dict[str, dict[tuple[bool, ...], float]] = {}
    for line in lines[1:]:
        cur = _Cursor(line)
        directive = cur.next("directive")
        if directive.text == "node":
            tok = _name(cur)
            if tok.text in parents:
                raise _fail(tok, "node name not declared before")
            ps: list[str] = []
            while cur.peek() is not None:
                p = _known(_name(cur, "parent name"), names)
                if p.text in ps:
                    raise _fail(p, "each parent listed once")
                ps.append(p.text)
            nodes.append(tok.text)
            decl_line[tok.text] = tok
            parents[tok.text] = tuple(ps)
            cpt[tok.text] = {}
        elif directive.text == "cpt":
            tok = _name(cur)
            if tok.text not in parents:
                raise _fail(tok, "node declared before its cpt rows")
            ps = parents[tok.text]
            values: dict[str, bool] = {}
            sep = cur.next("'|' or ':'")
            if sep.text == "|":
                while True:
                    item = cur.next("PARENT=true|false or ':'")
                    if item.text == ":":
                        sep = item
                        break
                    name, eq, value = item.text.partition("=")
                    if not eq or name not in ps:
                        raise _fail(item, f"PARENT=true|false with PARENT one of {' '.join(ps) or '(none)'}")
                    if name in values:
                        raise _fail(item, f"a single value for parent {name}")
                    values[name] = _bool(item, value)
            if sep.text != ":":
                raise _fail(sep, "':'")
            missing = [p for p in ps if p not in values]
            if missing:
                raise _fail(sep, f"a value for parent {missing[0]}")
            prob_tok = cur.next("probability")
            p = _decimal(prob_tok, "decimal probability")
            if not 0.0 <= p <= 1.0:
                raise _fail(prob_tok, "probability in [0, 1]")
            key = tuple(values[q] for q in ps)
            if key in cpt[tok.text]:
                raise _fail(tok, "a single cpt line per parent assignment")
            cpt[tok.text][key] = p
        else:
            raise _fail(directive, "directive (node, cpt)")
        cur.end()
    for node in nodes:
        for key in parent_rows(len(parents[node])):
            if key not in cpt[node]:
                tok = decl_line[node]
                raise ParseError(tok.line, tok.column, f"cpt row {_row_text(node, parents[node], key)}", END)
    return Bn(tuple(nodes), parents, cpt)


def format_probability(p: float) -> str:
    """Up to 9 significant digits, trailing zeros trimmed."""
    return format(p, ".9g")


def _value(v: bool) -> str:
    return "true" if v else "false"


def _row_text(node: str, ps: tuple[str, ...], key: tuple[bool, ...]) -> str:
    if not ps:
        return node
    return f"{node} | " + " ".join(f"{p}={_value(v)}" for p, v in zip(ps, key))


def canonical_qpn(q: Qpn) -> Qpn:
    """Same network with arcs and synergies in canonical order."""
    position = {n: i for i, n in enumerate(q.nodes)}

    def ordered(pair):
        return tuple(sorted(pair, key=lambda n: (position.get(n, len(position)), n)))

    synergies = [SynergyEntry(ordered(s.pair), s.child, s.child_value, s.sign) for s in q.synergies]
    synergies.sort(key=lambda s: (s.child, not s.child_value, [position.get(n, len(position)) for n in s.pair], s.pair))
    arcs = sorted(q.arcs, key=lambda a: (a.src, a.dst))
    return Qpn(q.nodes, arcs, synergies, q.delta)


def serialize_qpn(q: Qpn) -> str:
    q = canonical_qpn(q)
    out = ["qpn 1"]
    if q.delta is not None:
        out.append(f"delta {format_probability(q.delta)}")
    out.extend(f"node {n}" for n in q.nodes)
    for a in q.arcs:
        out.append(f"influence {a.src} {a.dst} {a.sign}")
        if a.reverse_sign is not None:
            out.append(f"reverse {a.src} {a.dst} {a.reverse_sign}")
    for s in q.synergies:
        out.append(f"synergy {s.pair[0]} {s.pair[1]} {s.child}={_value(s.child_value)} {s.sign}")
    return "\n".join(out) + "\n"


def serialize_bn(b: Bn) -> str:
    out = ["bn 1"]
    for n in b.nodes:
        out.append(" ".join(["node", n, *b.parents[n]]))
    for n in b.nodes:
        ps = b.parents[n]
        for key in parent_rows(len(ps)):
            out.append(f"cpt {_row_text(n, ps, key)} : {format_probability(b.cpt[n][key])}")
    return "\n".join(out) + "\n"
