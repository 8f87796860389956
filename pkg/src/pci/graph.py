"""Conceptual graphs: typed concept nodes, ordered relation edges, nested graphs."""

from __future__ import annotations

import copy
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Iterator, Mapping, Sequence

from pci._text import content_lines, nfc, quote, read_quoted
from pci.errors import ParseError, PCIError
from pci.report import ValidationReport, error, warning
from pci.vocabulary import Kind, RelationType, TypeId, Vocabulary

if TYPE_CHECKING:
    from pci.annotation import ControlledVocabulary

# Labels the well-formedness rules hinge on.
DISCOURSE_TYPE = "Discourse Type"
DISCOURSE_TOPIC = "Discourse Topic"


class GraphError(PCIError):
    pass


class GraphKind(Enum):
    TOPICAL = "topical"
    NARRATIVE = "narrative"
    PRAGMATIC = "pragmatic"
    UNSPECIFIED = "unspecified"


_LANG_RE = re.compile(r"^[A-Za-z]{2,8}(-[A-Za-z0-9]{1,8})*$")
_SOURCE_RE = re.compile(r"^[A-Za-z0-9_.-]+$")


@dataclass(frozen=True)
class Referent:
    """``keyword=None`` is the generic referent ``*``; otherwise an individual."""

    keyword: str | None = None
    language: str | None = None
    source: str | None = None  # controlled vocabulary name; None for a free keyword

    def __post_init__(self) -> None:
        if self.keyword is None:
            if self.language is not None or self.source is not None:
                raise ValueError("a generic referent carries no language or source")
            return
        object.__setattr__(self, "keyword", nfc(self.keyword))
        if not self.keyword.strip():
            raise ValueError("individual keyword must not be empty")
        if self.language is not None and not _LANG_RE.match(self.language):
            raise ValueError(f"bad language code {self.language!r}")
        if self.source is not None and not _SOURCE_RE.match(self.source):
            raise ValueError(f"bad controlled vocabulary name {self.source!r}")

    @classmethod
    def individual(cls, keyword: str, language: str | None = None, source: str | None = None) -> Referent:
        return cls(keyword, language, source)

    @property
    def is_generic(self) -> bool:
        return self.keyword is None

    def __str__(self) -> str:
        if self.keyword is None:
            return "*"
        out = quote(self.keyword)
        if self.language:
            out += f"@{self.language}"
        if self.source:
            out += f"!{self.source}"
        return out


GENERIC = Referent()


@dataclass
class ConceptNode:
    node_id: int
    type: TypeId
    referent: Referent = GENERIC
    nestings: dict[TypeId, ConceptualGraph] = field(default_factory=dict)


@dataclass(frozen=True)
class RelationEdge:
    type: TypeId
    args: tuple[int, ...]


@dataclass
class ConceptualGraph:
    kind: GraphKind = GraphKind.UNSPECIFIED
    nodes: dict[int, ConceptNode] = field(default_factory=dict)
    edges: list[RelationEdge] = field(default_factory=list)
    # Bound vocabulary enables the arity check in add_relation.
    vocab: Vocabulary | None = field(default=None, compare=False, repr=False)

    def add_concept(self, type: TypeId, referent: Referent = GENERIC) -> int:
        if not isinstance(type, TypeId) or type.kind is not Kind.THEME:
            raise GraphError(f"concept nodes need a theme identifier, got {type}")
        nid = max(self.nodes, default=0) + 1
        self.nodes[nid] = ConceptNode(nid, type, referent)
        return nid

    def add_relation(self, type: TypeId, args: Sequence[int]) -> int:
        if not isinstance(type, TypeId) or type.kind is not Kind.RELATION:
            raise GraphError(f"relation edges need a relation identifier, got {type}")
        args = tuple(args)
        if not args:
            raise GraphError("a relation needs at least one argument")
        for a in args:
            if a not in self.nodes:
                raise GraphError(f"unknown node {a}")
        if self.vocab is not None:
            rec = self.vocab.get(type)
            if isinstance(rec, RelationType) and rec.arity is not None and rec.arity != len(args):
                raise GraphError(f"{type} has arity {rec.arity}, got {len(args)} arguments")
        self.edges.append(RelationEdge(type, args))
        return len(self.edges) - 1

    def attach_nesting(self, node_id: int, nesting: TypeId, inner: ConceptualGraph) -> ConceptualGraph:
        if node_id not in self.nodes:
            raise GraphError(f"unknown node {node_id}")
        if not isinstance(nesting, TypeId) or nesting.kind is not Kind.NESTING:
            raise GraphError(f"nestings need a nesting identifier, got {nesting}")
        node = self.nodes[node_id]
        if nesting in node.nestings:
            raise GraphError(f"node {node_id} already has a {nesting} nesting")
        node.nestings[nesting] = inner
        return self

    def copy(self) -> ConceptualGraph:
        memo: dict = {}
        for g in self.levels():
            if g.vocab is not None:
                memo[id(g.vocab)] = g.vocab
        return copy.deepcopy(self, memo)

    def levels(self) -> Iterator[ConceptualGraph]:
        """This graph and every nested graph, depth first."""
        yield self
        for nid in sorted(self.nodes):
            for inner in self.nodes[nid].nestings.values():
                yield from inner.levels()


# -- well-formedness ----------------------------------------------------------


def _signatures(v: Vocabulary, rid: TypeId) -> list[tuple[TypeId, tuple[TypeId | None, ...]]]:
    """Signatures that constrain an edge of type ``rid``: its own and its ancestors'."""
    out = []
    for rec in v.ancestors(rid):
        assert isinstance(rec, RelationType)
        if rec.signature is None:
            continue
        slots = []
        for ref in rec.signature:
            slot = v.get(ref, Kind.THEME)
            slots.append(slot.id if slot is not None else None)
        out.append((rec.id, tuple(slots)))
    out.sort(key=lambda item: (item[0] != rid, item[0]))
    return out


def check_well_formed(
    g: ConceptualGraph,
    v: Vocabulary,
    controlled: Mapping[str, ControlledVocabulary] | None = None,
) -> ValidationReport:
    """Check ``g`` and all nested graphs against ``v``.

    Controlled referents are only checked when ``controlled`` (name to
    vocabulary) is given.
    """
    report = ValidationReport()
    dtype = v.find(DISCOURSE_TYPE, Kind.THEME)
    dtopic = v.find(DISCOURSE_TOPIC, Kind.NESTING)
    _check_level(g, v, controlled, dtype, dtopic, "", report)
    return report


def _check_level(g, v, controlled, dtype, dtopic, prefix, report) -> None:
    known: dict[int, TypeId] = {}
    for nid in sorted(g.nodes):
        node = g.nodes[nid]
        subj = f"{prefix}n{nid}"
        if not v.has(node.type):
            report.append(error(subj, f"unknown theme {node.type}"))
        else:
            known[nid] = node.type
        ref = node.referent
        if controlled is not None and ref.source is not None:
            cv = controlled.get(ref.source)
            if cv is None:
                report.append(error(subj, f"unknown controlled vocabulary {ref.source!r}"))
            elif not cv.lookup(ref.keyword, ref.language):
                report.append(error(subj, f"keyword {quote(ref.keyword)} not in controlled vocabulary {ref.source!r}"))

        is_discourse = dtype is not None and nid in known and v.subsumes(dtype, node.type)
        has_topic = False
        for nest, inner in node.nestings.items():
            nsubj = f"{subj}/{nest}"
            if not v.has(nest):
                report.append(error(nsubj, f"unknown nesting type {nest}"))
            elif dtopic is not None and v.subsumes(dtopic, nest):
                has_topic = True
                if dtype is not None and nid in known and not is_discourse:
                    report.append(error(nsubj, f"{DISCOURSE_TOPIC} nesting on a node that is not a {DISCOURSE_TYPE}"))
            if not inner.nodes:
                report.append(warning(nsubj, "empty nested graph"))
            _check_level(inner, v, controlled, dtype, dtopic, nsubj + "/", report)
        if is_discourse and dtopic is not None and not has_topic:
            msg = f"{DISCOURSE_TYPE} node lacks a {DISCOURSE_TOPIC} nesting"
            if g.kind is GraphKind.NARRATIVE:
                report.append(error(subj, msg))
            else:
                report.append(warning(subj, msg))

    for i, edge in enumerate(g.edges):
        subj = f"{prefix}e{i}"
        dangling = [a for a in edge.args if a not in g.nodes]
        if dangling:
            report.append(error(subj, "dangling argument " + ",".join(map(str, dangling))))
        rec = v.get(edge.type)
        if rec is None:
            report.append(error(subj, f"unknown relation {edge.type}"))
            continue
        assert isinstance(rec, RelationType)
        if rec.arity is not None and rec.arity != len(edge.args):
            report.append(error(subj, f"{edge.type} has arity {rec.arity}, got {len(edge.args)} arguments"))
            continue
        sigs = _signatures(v, edge.type)
        for pos, arg in enumerate(edge.args):
            if arg not in known:
                continue
            for rid, slots in sigs:
                if pos >= len(slots) or slots[pos] is None:
                    continue
                if not v.subsumes(slots[pos], known[arg]):
                    report.append(error(
                        subj,
                        f"argument {pos + 1} (node {arg}, {known[arg]}) violates signature of {rid}: expected {slots[pos]}",
                    ))
                    break


# -- text format --------------------------------------------------------------


def _graph_lines(g: ConceptualGraph, depth: int) -> Iterator[str]:
    ind = "  " * depth
    yield f"{ind}graph {g.kind.value}"
    for nid in sorted(g.nodes):
        node = g.nodes[nid]
        yield f"{ind}node {nid} [{node.type}: {node.referent}]"
    for e in g.edges:
        yield f"{ind}rel ({e.type}: {','.join(map(str, e.args))})"
    for nid in sorted(g.nodes):
        for nest, inner in g.nodes[nid].nestings.items():
            yield f"{ind}nest {nid} {nest} {{"
            yield from _graph_lines(inner, depth + 1)
            yield f"{ind}}}"


def serialize_graph(g: ConceptualGraph, indent: int = 0) -> str:
    return "".join(line + "\n" for line in _graph_lines(g, indent))


_HEADER_RE = re.compile(r"^graph\s+(\S+)\s*$")
_NODE_RE = re.compile(r"^node\s+(\d+)\s+\[\s*([A-Z]-\d+)\s*:\s*(.*?)\s*\]$")
_REL_RE = re.compile(r"^rel\s+\(\s*([A-Z]-\d+)\s*:\s*([^)]*)\)$")
_NEST_RE = re.compile(r"^nest\s+(\d+)\s+([A-Z]-\d+)\s*\{$")


def _type_id(text: str, kind: Kind, lineno: int, col: int) -> TypeId:
    try:
        tid = TypeId.parse(text)
    except ValueError:
        raise ParseError(f"bad type identifier {text!r}", lineno, col) from None
    if tid.kind is not kind:
        raise ParseError(f"expected a {kind.value}- identifier, got {text}", lineno, col)
    return tid


def _parse_referent(text: str, lineno: int, col: int) -> Referent:
    if text == "*":
        return GENERIC
    keyword, i = read_quoted(text, 0, lineno)
    rest = text[i:]
    m = re.fullmatch(r"(?:@([^!\s]+))?(?:!(\S+))?", rest)
    if not m:
        raise ParseError(f"unexpected {rest!r} after keyword", lineno, col + i)
    try:
        return Referent(keyword, m.group(1), m.group(2))
    except ValueError as exc:
        raise ParseError(str(exc), lineno, col) from None


class _Lines:
    def __init__(self, lines: list[tuple[int, str]]):
        self.lines = lines
        self.pos = 0

    def peek(self) -> tuple[int, str, int] | None:
        if self.pos >= len(self.lines):
            return None
        lineno, raw = self.lines[self.pos]
        stripped = raw.strip()
        return lineno, stripped, len(raw) - len(raw.lstrip()) + 1


def _parse_level(src: _Lines, nested: bool) -> ConceptualGraph:
    head = src.peek()
    if head is None:
        raise ParseError("expected 'graph <kind>' header")
    lineno, text, col = head
    m = _HEADER_RE.match(text)
    if not m:
        raise ParseError("expected 'graph <kind>' header", lineno, col)
    try:
        kind = GraphKind(m.group(1))
    except ValueError:
        raise ParseError(f"unknown graph kind {m.group(1)!r}", lineno, col + 6) from None
    g = ConceptualGraph(kind)
    src.pos += 1
    edges: list[tuple[RelationEdge, int, int]] = []
    nests: list[tuple[int, TypeId, ConceptualGraph, int, int]] = []
    while True:
        cur = src.peek()
        if cur is None:
            if nested:
                raise ParseError("unclosed nest block", lineno)
            break
        lineno, text, col = cur
        if text == "}":
            if not nested:
                raise ParseError("unmatched '}'", lineno, col)
            src.pos += 1
            break
        if m := _NODE_RE.match(text):
            nid = int(m.group(1))
            if nid in g.nodes:
                raise ParseError(f"duplicate node id {nid}", lineno, col + m.start(1))
            tid = _type_id(m.group(2), Kind.THEME, lineno, col + m.start(2))
            g.nodes[nid] = ConceptNode(nid, tid, _parse_referent(m.group(3), lineno, col + m.start(3)))
            src.pos += 1
        elif m := _REL_RE.match(text):
            tid = _type_id(m.group(1), Kind.RELATION, lineno, col + m.start(1))
            raw_args = [a.strip() for a in m.group(2).split(",")]
            if not all(a.isdigit() for a in raw_args):
                raise ParseError("relation arguments must be node ids", lineno, col + m.start(2))
            edges.append((RelationEdge(tid, tuple(int(a) for a in raw_args)), lineno, col))
            src.pos += 1
        elif m := _NEST_RE.match(text):
            nid = int(m.group(1))
            tid = _type_id(m.group(2), Kind.NESTING, lineno, col + m.start(2))
            src.pos += 1
            nests.append((nid, tid, _parse_level(src, nested=True), lineno, col))
        else:
            raise ParseError(f"unrecognised line {text!r}", lineno, col)
    for edge, eline, ecol in edges:
        for a in edge.args:
            if a not in g.nodes:
                raise ParseError(f"dangling argument {a}", eline, ecol)
        g.edges.append(edge)
    for nid, tid, inner, nline, ncol in nests:
        if nid not in g.nodes:
            raise ParseError(f"nest block for unknown node {nid}", nline, ncol)
        if tid in g.nodes[nid].nestings:
            raise ParseError(f"node {nid} already has a {tid} nesting", nline, ncol)
        g.nodes[nid].nestings[tid] = inner
    return g


def parse_graph_lines(lines: list[tuple[int, str]]) -> ConceptualGraph:
    src = _Lines(lines)
    g = _parse_level(src, nested=False)
    if src.pos != len(lines):
        lineno, text, col = src.peek()  # type: ignore[misc]
        raise ParseError(f"unexpected {text!r} after graph", lineno, col)
    return g


def parse_graph(text: str) -> ConceptualGraph:
    return parse_graph_lines(list(content_lines(text)))


# -- normalisation ------------------------------------------------------------


def merge_coreferent(g: ConceptualGraph) -> ConceptualGraph:
    """Merge same-level individual nodes sharing type, keyword and language.

    Generic nodes are never merged.  Nodes whose nested graphs differ are
    kept apart so that no topic is lost.  The lowest node id survives.
    """
    out = ConceptualGraph(g.kind, vocab=g.vocab)
    survivor: dict[int, int] = {}
    for nid in sorted(g.nodes):
        node = g.nodes[nid]
        nestings = {n: merge_coreferent(inner) for n, inner in node.nestings.items()}
        ref = node.referent
        if not ref.is_generic:
            for other in out.nodes.values():
                oref = other.referent
                if (
                    other.type == node.type
                    and not oref.is_generic
                    and (oref.keyword, oref.language) == (ref.keyword, ref.language)
                    and other.nestings == nestings
                ):
                    survivor[nid] = other.node_id
                    break
        if nid not in survivor:
            survivor[nid] = nid
            out.nodes[nid] = ConceptNode(nid, node.type, ref, nestings)
    seen: set[RelationEdge] = set()
    for e in g.edges:
        moved = RelationEdge(e.type, tuple(survivor[a] for a in e.args))
        if moved not in seen:
            seen.add(moved)
            out.edges.append(moved)
    return out
