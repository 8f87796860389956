"""Time-coded segment annotations, templates, controlled vocabularies and the store."""

from __future__ import annotations

import os
import re
import tempfile
import threading
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from pci._text import content_lines, nfc, quote, read_quoted, tokenize
from pci.errors import ParseError, PCIError
from pci.graph import (
    ConceptualGraph,
    GraphKind,
    Referent,
    check_well_formed,
    parse_graph_lines,
    serialize_graph,
)
from pci.report import Finding, error
from pci.vocabulary import Kind, TypeId, Vocabulary

PRAGMATIC_DESCRIPTION = "Pragmatic Description"
STORE_HEADER = "pci-store v1"


class AnnotationError(PCIError):
    def __init__(self, message: str, findings: Iterable[Finding] = ()):
        self.findings = list(findings)
        super().__init__(message)


class TemplateGroup(Enum):
    ESSENTIALS = "essentials"
    INTANGIBLE_HERITAGE = "intangible-heritage"
    PRACTICAL_KNOWLEDGE = "practical-knowledge"
    CULTURAL_IDENTITY = "cultural-identity"

    @property
    def title(self) -> str:
        return _GROUP_TITLES[self]


_GROUP_TITLES = {
    TemplateGroup.ESSENTIALS: "Essentials of the culture and life world of a social group",
    TemplateGroup.INTANGIBLE_HERITAGE: "The intangible heritage of a social group",
    TemplateGroup.PRACTICAL_KNOWLEDGE: "The practical knowledge and traditional know how of a social group",
    TemplateGroup.CULTURAL_IDENTITY: "Investigations in the cultural identity of a social group",
}


class KeywordKind(Enum):
    EXTRACTED = "extracted"
    PARAPHRASE = "paraphrase"


@dataclass(frozen=True)
class MediaAsset:
    asset_id: str
    uri: str
    duration_ms: int
    languages: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not _TOKEN_RE.match(self.asset_id):
            raise ValueError(f"bad asset id {self.asset_id!r}")
        if self.duration_ms <= 0:
            raise ValueError("asset duration must be positive")


@dataclass(frozen=True)
class Segment:
    asset_id: str
    start_ms: int
    end_ms: int


@dataclass(frozen=True)
class Keyword:
    text: str
    language: str
    kind: KeywordKind = KeywordKind.EXTRACTED
    source: str | None = None  # controlled vocabulary name; None for free

    def __post_init__(self) -> None:
        object.__setattr__(self, "text", nfc(self.text))
        if not self.text.strip():
            raise ValueError("empty keyword")


@dataclass
class SegmentAnnotation:
    annotation_id: str | None
    segment: Segment
    graph: ConceptualGraph
    fields: dict[str, dict[str, str]] = field(default_factory=dict)  # lang -> {"title"|"summary": text}
    keywords: list[Keyword] = field(default_factory=list)
    marks: list[TypeId] = field(default_factory=list)
    template: tuple[str, str] | None = None  # (template id, group name)


# -- controlled vocabularies ------------------------------------------------------


@dataclass(frozen=True)
class ControlledVocabulary:
    name: str
    entries: frozenset[tuple[str, str]]
    source_note: str = ""

    def lookup(self, term: str, language: str | None) -> bool:
        term = nfc(term)
        if language is None:
            return any(t == term for t, _ in self.entries)
        return (term, language) in self.entries


def lookup_keyword(cv: ControlledVocabulary, term: str, language: str | None) -> bool:
    return cv.lookup(term, language)


def parse_controlled_vocabulary(text: str) -> ControlledVocabulary:
    name = None
    note = ""
    entries: list[tuple[str, str]] = []
    for lineno, line in content_lines(text):
        toks = tokenize(line, lineno)
        head = toks[0].value
        if name is None:
            if head != "cv" or len(toks) != 2 or toks[1].kind != "string":
                raise ParseError('expected cv "<name>" header', lineno, 1)
            name = toks[1].value
        elif head == "note" and len(toks) == 2 and toks[1].kind == "string":
            note = toks[1].value
        elif head == "term" and len(toks) == 3 and toks[1].kind == "word" and toks[2].kind == "string":
            if not toks[2].value.strip():
                raise ParseError("empty term", lineno, toks[2].column)
            entry = (toks[2].value, toks[1].value)
            if entry in entries:
                raise ParseError(f"duplicate term {quote(entry[0])}@{entry[1]}", lineno, toks[2].column)
            entries.append(entry)
        else:
            raise ParseError(f"unrecognised line {line.strip()!r}", lineno, 1)
    if name is None:
        raise ParseError("missing cv header")
    return ControlledVocabulary(name, frozenset(entries), note)


def serialize_controlled_vocabulary(cv: ControlledVocabulary) -> str:
    lines = [f"cv {quote(cv.name)}"]
    if cv.source_note:
        lines.append(f"note {quote(cv.source_note)}")
    for term, lang in sorted(cv.entries, key=lambda e: (e[1], e[0])):
        lines.append(f"term {lang} {quote(term)}")
    return "\n".join(lines) + "\n"


# -- templates --------------------------------------------------------------------


def _resolve_path(g: ConceptualGraph, path: str):
    """Follow a slot path ``n/C-k/m/...`` to (graph, node id)."""
    parts = path.split("/")
    if len(parts) % 2 != 1:
        raise ValueError(f"bad slot path {path!r}")
    for i in range(0, len(parts) - 1, 2):
        node = g.nodes.get(int(parts[i]))
        if node is None:
            raise KeyError(path)
        g = node.nestings.get(TypeId.parse(parts[i + 1]))
        if g is None:
            raise KeyError(path)
    nid = int(parts[-1])
    if nid not in g.nodes:
        raise KeyError(path)
    return g, nid


@dataclass
class Template:
    template_id: str
    name: str
    group: TemplateGroup
    graph: ConceptualGraph
    slots: dict[str, str]  # slot name -> node path, e.g. "1/C-1/2"

    def __post_init__(self) -> None:
        for slot, path in self.slots.items():
            try:
                g, nid = _resolve_path(self.graph, path)
            except (KeyError, ValueError):
                raise AnnotationError(f"slot {slot!r} points at missing node {path}") from None
            if not g.nodes[nid].referent.is_generic:
                raise AnnotationError(f"slot {slot!r} node {path} is not generic")


@dataclass(frozen=True)
class Filler:
    keyword: str
    language: str | None = None
    source: str | None = None


def instantiate_template(
    t: Template,
    fillers: Mapping[str, Filler | str],
    controlled: Mapping[str, ControlledVocabulary] | None = None,
) -> ConceptualGraph:
    """Copy the template graph, turning filled slots into individuals."""
    g = t.graph.copy()
    for slot, filler in fillers.items():
        if slot not in t.slots:
            raise AnnotationError(f"unknown slot {slot!r} in template {t.template_id}")
        if isinstance(filler, str):
            filler = Filler(filler)
        if filler.source is not None:
            cv = (controlled or {}).get(filler.source)
            if cv is None:
                raise AnnotationError(f"unknown controlled vocabulary {filler.source!r}")
            if not cv.lookup(filler.keyword, filler.language):
                raise AnnotationError(f"{quote(filler.keyword)} is not in controlled vocabulary {filler.source!r}")
        level, nid = _resolve_path(g, t.slots[slot])
        level.nodes[nid].referent = Referent(filler.keyword, filler.language, filler.source)
    return g


def parse_template(text: str) -> Template:
    lines = list(content_lines(text))
    head: dict[str, object] = {}
    slots: dict[str, str] = {}
    i = 0
    while i < len(lines) and not lines[i][1].strip().startswith("graph"):
        lineno, line = lines[i]
        toks = tokenize(line, lineno)
        key = toks[0].value
        if key == "template" and len(toks) == 3 and toks[2].kind == "string" and "id" not in head:
            head["id"], head["name"] = toks[1].value, toks[2].value
        elif key == "group" and len(toks) == 2 and "group" not in head:
            try:
                head["group"] = TemplateGroup(toks[1].value)
            except ValueError:
                raise ParseError(f"unknown template group {toks[1].value!r}", lineno, toks[1].column) from None
        elif key == "slot" and len(toks) == 3 and toks[1].kind == "word" and toks[2].kind == "word":
            if toks[1].value in slots:
                raise ParseError(f"duplicate slot {toks[1].value!r}", lineno, toks[1].column)
            slots[toks[1].value] = toks[2].value
        else:
            raise ParseError(f"unrecognised line {line.strip()!r}", lineno, 1)
        i += 1
    for required in ("id", "group"):
        if required not in head:
            raise ParseError(f"template is missing its {required} line")
    graph = parse_graph_lines(lines[i:])
    return Template(head["id"], head["name"], head["group"], graph, slots)  # type: ignore[arg-type]


def serialize_template(t: Template) -> str:
    lines = [f"template {t.template_id} {quote(t.name)}", f"group {t.group.value}"]
    lines += [f"slot {name} {path}" for name, path in t.slots.items()]
    return "\n".join(lines) + "\n" + serialize_graph(t.graph)


# -- the store --------------------------------------------------------------------


_TOKEN_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.:-]*$")


class AnnotationStore:
    """Assets and annotations.  Appends take an exclusive lock."""

    def __init__(self) -> None:
        self.assets: dict[str, MediaAsset] = {}
        self.annotations: dict[str, SegmentAnnotation] = {}
        self._lock = threading.RLock()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AnnotationStore):
            return NotImplemented
        return self.assets == other.assets and self.annotations == other.annotations

    def add_asset(self, asset: MediaAsset) -> None:
        with self._lock:
            if asset.asset_id in self.assets:
                raise AnnotationError(f"duplicate asset {asset.asset_id}")
            self.assets[asset.asset_id] = asset

    def next_id(self) -> str:
        n = len(self.annotations) + 1
        while f"a{n:04d}" in self.annotations:
            n += 1
        return f"a{n:04d}"


def check_annotation(
    store: AnnotationStore,
    a: SegmentAnnotation,
    v: Vocabulary,
    controlled: Mapping[str, ControlledVocabulary] | None = None,
) -> list[Finding]:
    """Everything that would make :func:`add_annotation` reject ``a``."""
    subj = a.annotation_id or "annotation"
    problems: list[Finding] = []
    asset = store.assets.get(a.segment.asset_id)
    if asset is None:
        problems.append(error(subj, f"unknown asset {a.segment.asset_id}"))
    elif not 0 <= a.segment.start_ms < a.segment.end_ms <= asset.duration_ms:
        problems.append(error(
            subj,
            f"segment {a.segment.start_ms}-{a.segment.end_ms} outside 0-{asset.duration_ms} or empty",
        ))
    if a.graph.kind is not GraphKind.NARRATIVE:
        problems.append(error(subj, f"annotation graph must be narrative, got {a.graph.kind.value}"))
    problems.extend(
        Finding(f.severity, f"{subj}:{f.subject}", f.message)
        for f in check_well_formed(a.graph, v, controlled).errors
    )
    pragmatic = v.find(PRAGMATIC_DESCRIPTION, Kind.THEME)
    for mark in a.marks:
        if pragmatic is None or not v.has(mark) or not v.subsumes(pragmatic, mark):
            problems.append(error(subj, f"mark {mark} is not a {PRAGMATIC_DESCRIPTION} theme"))
    for kw in a.keywords:
        if kw.source is not None and controlled is not None:
            cv = controlled.get(kw.source)
            if cv is None or not cv.lookup(kw.text, kw.language):
                problems.append(error(subj, f"keyword {quote(kw.text)} not in controlled vocabulary {kw.source!r}"))
    return problems


def add_annotation(
    store: AnnotationStore,
    a: SegmentAnnotation,
    v: Vocabulary,
    controlled: Mapping[str, ControlledVocabulary] | None = None,
) -> str:
    """Validate and append ``a``; assigns an id when it has none."""
    with store._lock:
        if a.annotation_id is not None:
            if not _TOKEN_RE.match(a.annotation_id):
                raise AnnotationError(f"bad annotation id {a.annotation_id!r}")
            if a.annotation_id in store.annotations:
                raise AnnotationError(f"duplicate annotation {a.annotation_id}")
        problems = check_annotation(store, a, v, controlled)
        if problems:
            raise AnnotationError(f"annotation {a.annotation_id or '(new)'} rejected", problems)
        if a.annotation_id is None:
            a.annotation_id = store.next_id()
        store.annotations[a.annotation_id] = a
        return a.annotation_id


def _annotation_lines(a: SegmentAnnotation) -> list[str]:
    seg = a.segment
    out = [f"annotation {a.annotation_id} {seg.asset_id} {seg.start_ms} {seg.end_ms}"]
    if a.template is not None:
        out.append(f"  template {a.template[0]} {a.template[1]}")
    for lang in sorted(a.fields):
        for name in ("title", "summary"):
            if name in a.fields[lang]:
                out.append(f"  field {lang} {name} {quote(a.fields[lang][name])}")
    for kw in a.keywords:
        src = "free" if kw.source is None else f"ctrl:{kw.source}"
        out.append(f"  keyword {kw.language} {kw.kind.value} {src} {quote(kw.text)}")
    out.extend(f"  mark {m}" for m in a.marks)
    out.extend(serialize_graph(a.graph, indent=1).splitlines())
    out.append("  endgraph")
    return out


def serialize_store(store: AnnotationStore) -> str:
    lines = [STORE_HEADER]
    for aid in sorted(store.assets):
        asset = store.assets[aid]
        line = f"asset {asset.asset_id} {asset.duration_ms} {quote(asset.uri)}"
        if asset.languages:
            line += " langs=" + ",".join(asset.languages)
        lines.append(line)
    for aid in sorted(store.annotations):
        lines.extend(_annotation_lines(store.annotations[aid]))
    return "\n".join(lines) + "\n"


_ASSET_RE = re.compile(r'^asset\s+(\S+)\s+(\d+)\s+(".*")(?:\s+langs=([A-Za-z0-9,-]+))?$')
_ANNOT_RE = re.compile(r"^annotation\s+(\S+)\s+(\S+)\s+(\d+)\s+(\d+)$")
_FIELD_RE = re.compile(r'^field\s+(\S+)\s+(title|summary)\s+(".*")$')
_KEYWORD_RE = re.compile(r'^keyword\s+(\S+)\s+(extracted|paraphrase)\s+(free|ctrl:[A-Za-z0-9_.-]+)\s+(".*")$')
_MARK_RE = re.compile(r"^mark\s+(T-\d+)$")
_TEMPLATE_RE = re.compile(r"^template\s+(\S+)\s+(\S+)$")


def _string(text: str, lineno: int, col: int) -> str:
    value, end = read_quoted(text, 0, lineno)
    if end != len(text):
        raise ParseError("unexpected text after string", lineno, col + end)
    return value


def parse_store(text: str, *, strict_refs: bool = True) -> AnnotationStore:
    """Parse a store document.

    With ``strict_refs=False`` annotations may reference assets defined
    elsewhere (used for annotation files merged into an existing store).
    """
    lines = list(content_lines(text))
    if not lines or lines[0][1].strip() != STORE_HEADER:
        raise ParseError(f"expected header {STORE_HEADER!r}", lines[0][0] if lines else 1, 1)
    store = AnnotationStore()
    i = 1
    while i < len(lines):
        lineno, raw = lines[i]
        text_ = raw.strip()
        col = len(raw) - len(raw.lstrip()) + 1
        if m := _ASSET_RE.match(text_):
            langs = tuple(m.group(4).split(",")) if m.group(4) else ()
            try:
                asset = MediaAsset(m.group(1), _string(m.group(3), lineno, col + m.start(3)), int(m.group(2)), langs)
            except ValueError as exc:
                raise ParseError(str(exc), lineno, col) from None
            if asset.asset_id in store.assets:
                raise ParseError(f"duplicate asset {asset.asset_id}", lineno, col)
            store.assets[asset.asset_id] = asset
            i += 1
        elif m := _ANNOT_RE.match(text_):
            aid = m.group(1)
            if aid in store.annotations:
                raise ParseError(f"duplicate annotation id {aid}", lineno, col)
            seg = Segment(m.group(2), int(m.group(3)), int(m.group(4)))
            i, ann = _parse_annotation_body(lines, i + 1, aid, seg)
            store.annotations[aid] = ann
        else:
            raise ParseError(f"unrecognised line {text_!r}", lineno, col)
    for ann in store.annotations.values():
        asset = store.assets.get(ann.segment.asset_id)
        if asset is None:
            if strict_refs:
                raise ParseError(f"annotation {ann.annotation_id} references unknown asset {ann.segment.asset_id}")
            continue
        seg = ann.segment
        if not 0 <= seg.start_ms < seg.end_ms <= asset.duration_ms:
            raise ParseError(f"annotation {ann.annotation_id} segment {seg.start_ms}-{seg.end_ms} out of bounds")
    return store


def _parse_annotation_body(lines, i, aid, seg) -> tuple[int, SegmentAnnotation]:
    ann = SegmentAnnotation(aid, seg, ConceptualGraph())
    graph_seen = False
    while i < len(lines):
        lineno, raw = lines[i]
        text = raw.strip()
        col = len(raw) - len(raw.lstrip()) + 1
        if raw[:1] not in (" ", "\t"):
            break
        if m := _TEMPLATE_RE.match(text):
            ann.template = (m.group(1), m.group(2))
        elif m := _FIELD_RE.match(text):
            ann.fields.setdefault(m.group(1), {})[m.group(2)] = _string(m.group(3), lineno, col + m.start(3))
        elif m := _KEYWORD_RE.match(text):
            src = None if m.group(3) == "free" else m.group(3)[5:]
            kw_text = _string(m.group(4), lineno, col + m.start(4))
            try:
                ann.keywords.append(Keyword(kw_text, m.group(1), KeywordKind(m.group(2)), src))
            except ValueError as exc:
                raise ParseError(str(exc), lineno, col) from None
        elif m := _MARK_RE.match(text):
            ann.marks.append(TypeId.parse(m.group(1)))
        elif text.startswith("graph"):
            if graph_seen:
                raise ParseError("second graph block", lineno, col)
            end = i
            while end < len(lines) and lines[end][1].strip() != "endgraph":
                end += 1
            if end == len(lines):
                raise ParseError("graph block without endgraph", lineno, col)
            ann.graph = parse_graph_lines(lines[i:end])
            graph_seen = True
            i = end
        else:
            raise ParseError(f"unrecognised line {text!r}", lineno, col)
        i += 1
    if not graph_seen:
        raise ParseError(f"annotation {aid} has no graph block")
    return i, ann


def load_store(path: str | os.PathLike) -> AnnotationStore:
    return parse_store(Path(path).read_text(encoding="utf-8"))


def save_store(store: AnnotationStore, path: str | os.PathLike) -> None:
    """Write atomically: readers never observe a half-written store."""
    path = Path(path)
    text = serialize_store(store)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- catalogue --------------------------------------------------------------------

WORLD_PCI = "World_PCI"


@dataclass
class Catalog:
    total: int
    groups: dict[str, int]
    themes: dict[TypeId, tuple[str, int]]  # basic World_PCI theme -> (label, annotations)

    def render(self) -> str:
        lines = [f"total {self.total}"]
        lines += [f"group {g} {n}" for g, n in self.groups.items()]
        lines += [f"theme {tid} {quote(label)} {n}" for tid, (label, n) in self.themes.items()]
        return "\n".join(lines) + "\n"


def catalog(store: AnnotationStore, v: Vocabulary) -> Catalog:
    """Annotations per template group and per basic World_PCI theme in their topics."""
    groups = {g.value: 0 for g in TemplateGroup}
    extra: dict[str, int] = {}
    world = v.find(WORLD_PCI, Kind.THEME)
    basics = [] if world is None else sorted(r.id for r in v.children(world) if r.id is not None)
    counts = {tid: 0 for tid in basics}
    for ann in store.annotations.values():
        if ann.template is not None:
            name = ann.template[1]
            if name in groups:
                groups[name] += 1
            else:
                extra[name] = extra.get(name, 0) + 1
        seen: set[TypeId] = set()
        for node in ann.graph.nodes.values():
            for inner in node.nestings.values():
                for level in inner.levels():
                    for n in level.nodes.values():
                        if v.has(n.type):
                            seen.update(b for b in basics if v.subsumes(b, n.type))
        for b in seen:
            counts[b] += 1
    groups.update(sorted(extra.items()))
    return Catalog(len(store.annotations), groups, {b: (v.label(b), counts[b]) for b in basics})
