"""Typed hierarchies of themes, relations and nesting contexts.

A vocabulary holds three rooted DAGs that share one root label (the
proprietor and update date of the ontology).  Each root carries the
reserved number 0 (``T-0``, ``R-0``, ``C-0``); declared types are numbered
from 1.  Types may be declared without identifiers and numbered later
with :func:`assign_identifiers`; inside the vocabulary they are keyed by
their (NFC, case-sensitive) label, which is unique within a kind.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from enum import Enum
from functools import total_ordering
from typing import ClassVar, Iterable, Iterator, Union

from pci._text import Token, content_lines, nfc, quote, tokenize
from pci.errors import ParseError, PCIError, UnknownTypeError
from pci.report import Finding, ValidationReport, error, warning


class Kind(Enum):
    THEME = "T"
    RELATION = "R"
    NESTING = "C"

    @property
    def rank(self) -> int:
        return "TRC".index(self.value)

    @property
    def keyword(self) -> str:
        return {"T": "concept", "R": "relation", "C": "nesting"}[self.value]


_ID_RE = re.compile(r"^([TRC])-(0|[1-9][0-9]*)$")


@total_ordering
@dataclass(frozen=True)
class TypeId:
    kind: Kind
    number: int

    def __post_init__(self) -> None:
        if not isinstance(self.number, int) or self.number < 0:
            raise ValueError(f"type number must be a non-negative integer, got {self.number!r}")

    def __str__(self) -> str:
        return f"{self.kind.value}-{self.number}"

    def __lt__(self, other: TypeId) -> bool:
        if not isinstance(other, TypeId):
            return NotImplemented
        return (self.kind.rank, self.number) < (other.kind.rank, other.number)

    @classmethod
    def parse(cls, text: str) -> TypeId:
        m = _ID_RE.match(text)
        if not m:
            raise ValueError(f"not a type identifier: {text!r}")
        return cls(Kind(m.group(1)), int(m.group(2)))

    @property
    def is_root(self) -> bool:
        return self.number == 0


# A reference to another type: its identifier, or its label when unnumbered.
Ref = Union[TypeId, str]


def _ref_key(ref: Ref) -> tuple:
    if isinstance(ref, TypeId):
        return (0, ref.kind.rank, ref.number, "")
    return (1, 0, 0, ref)


def _norm_refs(refs: Iterable[Ref]) -> tuple[Ref, ...]:
    cleaned = {r if isinstance(r, TypeId) else nfc(r) for r in refs}
    return tuple(sorted(cleaned, key=_ref_key))


def format_ref(ref: Ref) -> str:
    return str(ref) if isinstance(ref, TypeId) else quote(ref)


@dataclass(frozen=True)
class ConceptType:
    kind: ClassVar[Kind] = Kind.THEME
    label: str
    id: TypeId | None = None
    parents: tuple[Ref, ...] = ()
    note: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "label", nfc(self.label))
        object.__setattr__(self, "parents", _norm_refs(self.parents))


@dataclass(frozen=True)
class RelationType:
    kind: ClassVar[Kind] = Kind.RELATION
    label: str
    id: TypeId | None = None
    arity: int | None = None
    signature: tuple[Ref, ...] | None = None
    parents: tuple[Ref, ...] = ()
    note: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "label", nfc(self.label))
        object.__setattr__(self, "parents", _norm_refs(self.parents))
        if self.signature is not None:
            sig = tuple(r if isinstance(r, TypeId) else nfc(r) for r in self.signature)
            object.__setattr__(self, "signature", sig)


@dataclass(frozen=True)
class NestingType:
    kind: ClassVar[Kind] = Kind.NESTING
    label: str
    id: TypeId | None = None
    parents: tuple[Ref, ...] = ()
    note: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "label", nfc(self.label))
        object.__setattr__(self, "parents", _norm_refs(self.parents))


TypeRecord = Union[ConceptType, RelationType, NestingType]


class VocabularyError(PCIError):
    """Structural or validation failure; carries the findings."""

    def __init__(self, findings: list[Finding]):
        self.findings = list(findings)
        super().__init__("; ".join(f"{f.subject}: {f.message}" for f in self.findings))


def _subject(record: TypeRecord) -> str:
    return str(record.id) if record.id is not None else quote(record.label)


class _Hierarchy:
    """One rooted DAG, keyed by label."""

    def __init__(self, kind: Kind, root: TypeRecord, records: Iterable[TypeRecord]):
        self.kind = kind
        self.root = root.label
        self.types: dict[str, TypeRecord] = {root.label: root}
        self.by_id: dict[TypeId, str] = {root.id: root.label}  # type: ignore[dict-item]
        problems: list[Finding] = []

        for rec in records:
            if rec.kind is not kind:
                raise TypeError(f"{type(rec).__name__} given where {kind.keyword} expected")
            subj = _subject(rec)
            if not rec.label.strip():
                problems.append(error(subj, "empty label"))
                continue
            if rec.label in self.types:
                problems.append(error(subj, f"duplicate {kind.keyword} label {quote(rec.label)}"))
                continue
            if rec.id is not None:
                if rec.id.kind is not kind:
                    problems.append(error(subj, f"identifier kind does not match {kind.keyword}"))
                    continue
                if rec.id.number == 0:
                    problems.append(error(subj, f"{rec.id} is reserved for the root"))
                    continue
                if rec.id in self.by_id:
                    problems.append(error(subj, f"duplicate identifier {rec.id}"))
                    continue
                self.by_id[rec.id] = rec.label
            self.types[rec.label] = rec

        self.parents: dict[str, tuple[str, ...]] = {self.root: ()}
        for label, rec in self.types.items():
            if label == self.root:
                continue
            if not rec.parents:
                problems.append(error(_subject(rec), "non-root type without parent"))
            resolved = []
            for ref in rec.parents:
                p = self.resolve(ref)
                if p is None:
                    problems.append(error(_subject(rec), f"unknown parent {format_ref(ref)}"))
                else:
                    resolved.append(p)
            self.parents[label] = tuple(sorted(set(resolved)))

        if not problems:
            problems.extend(self._cycles())
        if problems:
            raise VocabularyError(problems)

        self.children: dict[str, list[str]] = {label: [] for label in self.types}
        for label, ps in self.parents.items():
            for p in ps:
                self.children[p].append(label)
        for kids in self.children.values():
            kids.sort()
        self.ancestors = self._closure()

    def resolve(self, ref: Ref) -> str | None:
        if isinstance(ref, TypeId):
            return self.by_id.get(ref)
        ref = nfc(ref)
        return ref if ref in self.types else None

    def _cycles(self) -> list[Finding]:
        # Tarjan's SCC over parent links; one finding per cycle.
        index: dict[str, int] = {}
        low: dict[str, int] = {}
        stack: list[str] = []
        on_stack: set[str] = set()
        found: list[Finding] = []
        counter = 0

        def visit(v: str) -> None:
            nonlocal counter
            index[v] = low[v] = counter
            counter += 1
            stack.append(v)
            on_stack.add(v)
            for w in self.parents[v]:
                if w not in index:
                    visit(w)
                    low[v] = min(low[v], low[w])
                elif w in on_stack:
                    low[v] = min(low[v], index[w])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                if len(comp) > 1 or v in self.parents[v]:
                    members = sorted(comp, key=lambda lab: _ref_key(self.types[lab].id or lab))
                    names = [_subject(self.types[m]) for m in members]
                    found.append(error(names[0], "cycle detected: " + " -> ".join(names + names[:1])))

        for label in self.types:
            if label not in index:
                visit(label)
        return found

    def _closure(self) -> dict[str, frozenset[str]]:
        anc: dict[str, frozenset[str]] = {}
        pending = {label: len(ps) for label, ps in self.parents.items()}
        ready = [label for label, n in pending.items() if n == 0]
        while ready:
            label = ready.pop()
            acc = {label}
            for p in self.parents[label]:
                acc |= anc[p]
            anc[label] = frozenset(acc)
            for c in self.children[label]:
                pending[c] -= 1
                if pending[c] == 0:
                    ready.append(c)
        return anc

    def subsumes(self, general: str, specific: str) -> bool:
        return general in self.ancestors[specific]

    def dfs(self) -> Iterator[str]:
        """Preorder from the root, children in ascending label order, each type once."""
        seen: set[str] = set()
        stack = [self.root]
        while stack:
            label = stack.pop()
            if label in seen:
                continue
            seen.add(label)
            yield label
            stack.extend(reversed(self.children[label]))


class Vocabulary:
    """Immutable vocabulary; construction checks the structural invariants."""

    def __init__(
        self,
        root_label: str,
        concepts: Iterable[ConceptType] = (),
        relations: Iterable[RelationType] = (),
        nestings: Iterable[NestingType] = (),
    ):
        root_label = nfc(root_label)
        if not root_label.strip():
            raise VocabularyError([error("root", "empty root label")])
        self.root_label = root_label
        roots = {
            Kind.THEME: ConceptType(root_label, TypeId(Kind.THEME, 0)),
            Kind.RELATION: RelationType(root_label, TypeId(Kind.RELATION, 0)),
            Kind.NESTING: NestingType(root_label, TypeId(Kind.NESTING, 0)),
        }
        given = {Kind.THEME: concepts, Kind.RELATION: relations, Kind.NESTING: nestings}
        self._h: dict[Kind, _Hierarchy] = {}
        problems: list[Finding] = []
        for kind in Kind:
            try:
                self._h[kind] = _Hierarchy(kind, roots[kind], given[kind])
            except VocabularyError as exc:
                problems.extend(exc.findings)
        if problems:
            raise VocabularyError(problems)

    # -- collections -------------------------------------------------------

    def types(self, kind: Kind) -> list[TypeRecord]:
        return list(self._h[kind].types.values())

    @property
    def concepts(self) -> list[ConceptType]:
        return self.types(Kind.THEME)  # type: ignore[return-value]

    @property
    def relations(self) -> list[RelationType]:
        return self.types(Kind.RELATION)  # type: ignore[return-value]

    @property
    def nestings(self) -> list[NestingType]:
        return self.types(Kind.NESTING)  # type: ignore[return-value]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return self.root_label == other.root_label and all(
            self._h[k].types == other._h[k].types for k in Kind
        )

    def __repr__(self) -> str:
        sizes = ", ".join(f"{k.keyword}s={len(self._h[k].types)}" for k in Kind)
        return f"Vocabulary({self.root_label!r}, {sizes})"

    # -- lookup ------------------------------------------------------------

    def root(self, kind: Kind = Kind.THEME) -> TypeId:
        return TypeId(kind, 0)

    def get(self, ref: Ref, kind: Kind = Kind.THEME) -> TypeRecord | None:
        if isinstance(ref, TypeId):
            kind = ref.kind
        h = self._h[kind]
        label = h.resolve(ref)
        return None if label is None else h.types[label]

    def lookup(self, ref: Ref, kind: Kind = Kind.THEME) -> TypeRecord:
        rec = self.get(ref, kind)
        if rec is None:
            raise UnknownTypeError(f"unknown {kind.keyword if not isinstance(ref, TypeId) else ref.kind.keyword} {format_ref(ref)}")
        return rec

    def has(self, ref: Ref, kind: Kind = Kind.THEME) -> bool:
        return self.get(ref, kind) is not None

    def id_of(self, label: str, kind: Kind = Kind.THEME) -> TypeId:
        rec = self.lookup(label, kind)
        if rec.id is None:
            raise UnknownTypeError(f"{kind.keyword} {quote(rec.label)} has no identifier")
        return rec.id

    def theme(self, label: str) -> TypeId:
        return self.id_of(label, Kind.THEME)

    def relation(self, label: str) -> TypeId:
        return self.id_of(label, Kind.RELATION)

    def nesting(self, label: str) -> TypeId:
        return self.id_of(label, Kind.NESTING)

    def find(self, label: str, kind: Kind = Kind.THEME) -> TypeId | None:
        rec = self.get(label, kind)
        return None if rec is None else rec.id

    def label(self, tid: TypeId) -> str:
        return self.lookup(tid).label

    def parents(self, ref: Ref, kind: Kind = Kind.THEME) -> list[TypeRecord]:
        rec = self.lookup(ref, kind)
        h = self._h[rec.kind]
        return [h.types[p] for p in h.parents[rec.label]]

    def children(self, ref: Ref, kind: Kind = Kind.THEME) -> list[TypeRecord]:
        """Direct specialisations, in ascending label order."""
        rec = self.lookup(ref, kind)
        h = self._h[rec.kind]
        return [h.types[c] for c in h.children[rec.label]]

    def ancestors(self, ref: Ref, kind: Kind = Kind.THEME) -> list[TypeRecord]:
        """All subsumers of ``ref`` including itself."""
        rec = self.lookup(ref, kind)
        h = self._h[rec.kind]
        return [h.types[a] for a in sorted(h.ancestors[rec.label])]

    def descendants(self, ref: Ref, kind: Kind = Kind.THEME) -> list[TypeRecord]:
        rec = self.lookup(ref, kind)
        h = self._h[rec.kind]
        return [h.types[lab] for lab, anc in h.ancestors.items() if rec.label in anc]

    def subsumes(self, general: TypeId, specific: TypeId) -> bool:
        return subsumes(self, general, specific)

    def _pair(self, a: Ref, b: Ref, kind: Kind) -> tuple[_Hierarchy, str, str]:
        ra, rb = self.lookup(a, kind), self.lookup(b, kind)
        if ra.kind is not rb.kind:
            raise ValueError(f"kind mismatch: {format_ref(a)} is a {ra.kind.keyword}, {format_ref(b)} is a {rb.kind.keyword}")
        return self._h[ra.kind], ra.label, rb.label

    def _hierarchy(self, kind: Kind) -> _Hierarchy:
        return self._h[kind]


# -- reasoning ------------------------------------------------------------


def subsumes(v: Vocabulary, general: Ref, specific: Ref, kind: Kind = Kind.THEME) -> bool:
    """True iff ``general`` is ``specific`` or reachable from it via parent links."""
    h, g, s = v._pair(general, specific, kind)
    return h.subsumes(g, s)


def least_common_subsumers(v: Vocabulary, a: Ref, b: Ref, kind: Kind = Kind.THEME) -> set[TypeId]:
    """Minimal types subsuming both ``a`` and ``b``.  Never empty."""
    h, la, lb = v._pair(a, b, kind)
    common = h.ancestors[la] & h.ancestors[lb]
    minimal = {c for c in common if not any(d != c and c in h.ancestors[d] for d in common)}
    out = set()
    for label in minimal:
        rec = h.types[label]
        if rec.id is None:
            raise UnknownTypeError(f"{quote(label)} has no identifier; run assign_identifiers first")
        out.add(rec.id)
    return out


# -- validation -----------------------------------------------------------


def validate_vocabulary(v: Vocabulary, *, strict_signatures: bool = True) -> ValidationReport:
    """Check relation arities and signatures.

    Structural invariants (unique ids and labels, rooted DAGs) are enforced
    when the :class:`Vocabulary` is built, so they never show up here.
    ``strict_signatures=False`` skips the covariance rule (child slots must
    specialise the parent's slots).
    """
    report = ValidationReport()
    themes = v._hierarchy(Kind.THEME)
    rels = v._hierarchy(Kind.RELATION)
    for label, rec in rels.types.items():
        if label == rels.root:
            continue
        assert isinstance(rec, RelationType)
        subj = _subject(rec)
        if rec.arity is None or rec.arity < 1:
            report.append(error(subj, "relation arity must be a positive integer"))
            continue
        slots: list[str | None] = []
        if rec.signature is not None:
            if len(rec.signature) != rec.arity:
                report.append(error(subj, f"signature length {len(rec.signature)} does not match arity {rec.arity}"))
            for i, ref in enumerate(rec.signature, start=1):
                slot = themes.resolve(ref)
                if slot is None:
                    report.append(error(subj, f"signature slot {i} names unknown theme {format_ref(ref)}"))
                slots.append(slot)
        for plabel in rels.parents[label]:
            parent = rels.types[plabel]
            assert isinstance(parent, RelationType)
            if plabel == rels.root or parent.arity is None:
                continue
            if parent.arity != rec.arity:
                report.append(error(subj, f"arity {rec.arity} differs from parent {_subject(parent)} arity {parent.arity}"))
                continue
            if not strict_signatures or rec.signature is None or parent.signature is None:
                continue
            for i, (mine, ref) in enumerate(zip(slots, parent.signature), start=1):
                theirs = themes.resolve(ref)
                if mine is None or theirs is None:
                    continue
                if not themes.subsumes(theirs, mine):
                    report.append(error(
                        subj,
                        f"signature slot {i} {format_ref(rec.signature[i - 1])} is not subsumed by "
                        f"parent {_subject(parent)} slot {format_ref(ref)}",
                    ))
    return report


_STOP_WORDS = frozenset({"a", "an", "the", "of", "and", "or", "for", "in", "with"})
_VERB_ALLOWLIST = frozenset({"Is", "Are", "Has", "Have", "Do", "Does", "Can", "May", "Must", "Shall", "Will"})
_WORD_RE = re.compile(r"[^\W\d_]+")


def lint_labels(v: Vocabulary) -> list[Finding]:
    """Mechanical naming checks; every finding is a warning."""
    found: list[Finding] = []
    for kind in (Kind.THEME, Kind.RELATION, Kind.NESTING):
        h = v._hierarchy(kind)
        for label, rec in h.types.items():
            if label == h.root:
                continue
            subj = _subject(rec)
            words = _WORD_RE.findall(label)
            if kind is Kind.RELATION:
                first = label.split()[0] if label.split() else ""
                if not (first[:1].isupper() and (first.endswith("s") or first in _VERB_ALLOWLIST)):
                    found.append(warning(subj, f"relation label {quote(label)} should start with a present-tense verb"))
                continue
            lower = [w for w in words if not w[0].isupper() and w not in _STOP_WORDS]
            if lower:
                found.append(warning(subj, f"label {quote(label)} is not in title case ({', '.join(lower)})"))
            if kind is Kind.THEME and words:
                last = words[-1]
                if len(last) > 1 and last.endswith("s") and last[-2] != "s":
                    found.append(warning(subj, f"label {quote(label)} may be plural"))
    return found


# -- numbering ------------------------------------------------------------


def assign_identifiers(v: Vocabulary) -> Vocabulary:
    """Number every unnumbered type; existing identifiers are kept.

    Types are visited depth-first from the root with children in ascending
    label order, and each unnumbered type takes the smallest positive number
    not yet used in its kind.  All references are rewritten to identifiers.
    """
    assigned: dict[Kind, dict[str, TypeId]] = {}
    for kind in Kind:
        h = v._hierarchy(kind)
        ids = {label: rec.id for label, rec in h.types.items() if rec.id is not None}
        used = {tid.number for tid in ids.values()}
        candidate = 1
        for label in h.dfs():
            if label in ids:
                continue
            while candidate in used:
                candidate += 1
            ids[label] = TypeId(kind, candidate)
            used.add(candidate)
        assigned[kind] = ids  # type: ignore[assignment]

    def rewrite(kind: Kind, refs: tuple[Ref, ...]) -> tuple[Ref, ...]:
        h = v._hierarchy(kind)
        return tuple(assigned[kind][h.resolve(r)] for r in refs)  # type: ignore[index]

    out: dict[Kind, list[TypeRecord]] = {k: [] for k in Kind}
    for kind in Kind:
        h = v._hierarchy(kind)
        for label, rec in h.types.items():
            if label == h.root:
                continue
            changes: dict = {"id": assigned[kind][label], "parents": rewrite(kind, rec.parents)}
            if isinstance(rec, RelationType) and rec.signature is not None:
                th = v._hierarchy(Kind.THEME)
                # Unresolvable slots are left for validate_vocabulary to report.
                changes["signature"] = tuple(
                    assigned[Kind.THEME][th.resolve(r)] if th.resolve(r) is not None else r  # type: ignore[index]
                    for r in rec.signature
                )
            out[kind].append(dataclasses.replace(rec, **changes))
    return Vocabulary(v.root_label, out[Kind.THEME], out[Kind.RELATION], out[Kind.NESTING])  # type: ignore[arg-type]


# -- text format ------------------------------------------------------------


def _decl_order(rec: TypeRecord) -> tuple:
    return (0, rec.id.number, "") if rec.id is not None else (1, 0, rec.label)


def serialize_vocabulary(v: Vocabulary) -> str:
    lines = [f"root {quote(v.root_label)}"]
    for kind in Kind:
        recs = [r for r in v.types(kind) if r.id is None or not r.id.is_root]
        for rec in sorted(recs, key=_decl_order):
            parts = [kind.keyword]
            if rec.id is not None:
                parts.append(str(rec.id))
            parts.append(quote(rec.label))
            if isinstance(rec, RelationType):
                parts.append(f"arity={rec.arity}")
                if rec.signature is not None:
                    parts.append("signature=" + ",".join(format_ref(r) for r in rec.signature))
            parts.append("parent=" + ",".join(format_ref(r) for r in rec.parents))
            if rec.note is not None:
                parts.append(f"note={quote(rec.note)}")
            lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


_ALLOWED_OPTIONS = {
    "concept": ("parent", "note"),
    "relation": ("arity", "signature", "parent", "note"),
    "nesting": ("parent", "note"),
}
_KIND_OF = {"concept": Kind.THEME, "relation": Kind.RELATION, "nesting": Kind.NESTING}


def _parse_refs(tokens: list[Token], kind: Kind, lineno: int) -> list[Ref]:
    refs: list[Ref] = []
    expect_item = True
    for tok in tokens:
        if expect_item:
            if tok.kind == "string":
                refs.append(tok.value)
            elif tok.kind == "word" and _ID_RE.match(tok.value):
                tid = TypeId.parse(tok.value)
                if tid.kind is not kind:
                    raise ParseError(f"expected a {kind.value}- identifier, got {tok.value}", lineno, tok.column)
                refs.append(tid)
            else:
                raise ParseError(f"expected identifier or quoted label, got {tok.value!r}", lineno, tok.column)
        elif tok.kind != ",":
            raise ParseError(f"expected ',' got {tok.value!r}", lineno, tok.column)
        expect_item = not expect_item
    if expect_item:
        col = tokens[-1].column if tokens else None
        raise ParseError("expected identifier or quoted label", lineno, col)
    return refs


def _parse_options(tokens: list[Token], decl: str, lineno: int) -> dict[str, list[Token]]:
    options: dict[str, list[Token]] = {}
    i = 0
    while i < len(tokens):
        key = tokens[i]
        if key.kind != "word" or key.value not in _ALLOWED_OPTIONS[decl]:
            raise ParseError(f"unexpected {key.value!r} in {decl} declaration", lineno, key.column)
        if key.value in options:
            raise ParseError(f"duplicate option {key.value!r}", lineno, key.column)
        if i + 1 >= len(tokens) or tokens[i + 1].kind != "=":
            raise ParseError(f"expected '=' after {key.value!r}", lineno, key.column + len(key.value))
        j = i + 2
        value: list[Token] = []
        # A value runs until the next "<word> =" pair.
        while j < len(tokens) and not (tokens[j].kind == "word" and j + 1 < len(tokens) and tokens[j + 1].kind == "="):
            value.append(tokens[j])
            j += 1
        if not value:
            raise ParseError(f"missing value for {key.value!r}", lineno, key.column)
        options[key.value] = value
        i = j
    return options


def parse_vocabulary(text: str, *, check: bool = True, strict_signatures: bool = True) -> Vocabulary:
    """Parse a vocabulary document.

    Raises :class:`ParseError` on grammar violations and
    :class:`VocabularyError` on structural problems (duplicates, unknown
    parents, cycles) or, when ``check`` is set, on validation errors.
    """
    root_label: str | None = None
    records: dict[Kind, list[TypeRecord]] = {k: [] for k in Kind}
    for lineno, line in content_lines(text):
        tokens = tokenize(line, lineno)
        head = tokens[0]
        if head.kind != "word":
            raise ParseError("expected a declaration keyword", lineno, head.column)
        if head.value == "root":
            if root_label is not None:
                raise ParseError("root declared more than once", lineno, head.column)
            if len(tokens) != 2 or tokens[1].kind != "string":
                raise ParseError('expected root "<label>"', lineno, head.column)
            root_label = tokens[1].value
            continue
        if head.value not in _KIND_OF:
            raise ParseError(f"unknown declaration {head.value!r}", lineno, head.column)
        if root_label is None:
            raise ParseError("the root declaration must come first", lineno, head.column)
        decl, kind = head.value, _KIND_OF[head.value]
        i = 1
        tid = None
        if i < len(tokens) and tokens[i].kind == "word" and _ID_RE.match(tokens[i].value):
            tid = TypeId.parse(tokens[i].value)
            if tid.kind is not kind:
                raise ParseError(f"{decl} identifier must start with {kind.value}-", lineno, tokens[i].column)
            i += 1
        if i >= len(tokens) or tokens[i].kind != "string":
            col = tokens[i].column if i < len(tokens) else len(line) + 1
            raise ParseError("expected quoted label", lineno, col)
        label = tokens[i].value
        opts = _parse_options(tokens[i + 1:], decl, lineno)
        note = None
        if "note" in opts:
            if len(opts["note"]) != 1 or opts["note"][0].kind != "string":
                raise ParseError("note must be a quoted string", lineno, opts["note"][0].column)
            note = opts["note"][0].value
        if "parent" in opts:
            parents = _parse_refs(opts["parent"], kind, lineno)
        elif kind is Kind.NESTING:
            parents = [TypeId(Kind.NESTING, 0)]
        else:
            raise ParseError(f"{decl} requires parent=", lineno, len(line) + 1)
        if kind is Kind.RELATION:
            if "arity" not in opts:
                raise ParseError("relation requires arity=", lineno, len(line) + 1)
            atoks = opts["arity"]
            if len(atoks) != 1 or not atoks[0].value.isdigit():
                raise ParseError("arity must be an integer", lineno, atoks[0].column)
            sig = _parse_refs(opts["signature"], Kind.THEME, lineno) if "signature" in opts else None
            records[kind].append(RelationType(label, tid, int(atoks[0].value), None if sig is None else tuple(sig), tuple(parents), note))
        elif kind is Kind.THEME:
            records[kind].append(ConceptType(label, tid, tuple(parents), note))
        else:
            records[kind].append(NestingType(label, tid, tuple(parents), note))
    if root_label is None:
        raise ParseError("missing root declaration")
    v = Vocabulary(root_label, records[Kind.THEME], records[Kind.RELATION], records[Kind.NESTING])  # type: ignore[arg-type]
    if check:
        report = validate_vocabulary(v, strict_signatures=strict_signatures)
        if report.errors:
            raise VocabularyError(report.errors)
    return v
