"""Bundled PCI v4 vocabulary skeleton, template catalogue and controlled-vocabulary excerpts."""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from pathlib import Path

from pci.annotation import (
    ControlledVocabulary,
    Template,
    TemplateGroup,
    parse_controlled_vocabulary,
    parse_template,
)
from pci.errors import PCIError
from pci.graph import DISCOURSE_TOPIC, DISCOURSE_TYPE, check_well_formed
from pci.report import ValidationReport, error, warning
from pci.vocabulary import Kind, Vocabulary, parse_vocabulary

DATA_ENV = "PCI_DATA_DIR"
VOCAB_FILE = "pci_v4.vocab"
MANIFEST_FILE = "MANIFEST"


class BundleError(PCIError):
    pass


@dataclass(frozen=True)
class Bundle:
    vocabulary: Vocabulary
    templates: list[Template]
    controlled: list[ControlledVocabulary]

    def __iter__(self):
        return iter((self.vocabulary, self.templates, self.controlled))

    def controlled_map(self) -> dict[str, ControlledVocabulary]:
        return {cv.name: cv for cv in self.controlled}

    def template(self, template_id: str) -> Template:
        for t in self.templates:
            if t.template_id == template_id:
                return t
        raise KeyError(template_id)


def data_dir(override: str | os.PathLike | None = None) -> Path:
    if override is not None:
        return Path(override)
    env = os.environ.get(DATA_ENV)
    if env:
        return Path(env)
    return Path(__file__).with_name("data")


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def read_manifest(root: Path) -> dict[str, str]:
    """``relative path -> sha256`` from a ``sha256sum``-style manifest."""
    entries: dict[str, str] = {}
    for line in (root / MANIFEST_FILE).read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        digest, _, rel = line.partition("  ")
        entries[rel.strip()] = digest.strip()
    return entries


def write_manifest(root: Path) -> str:
    files = sorted(
        p.relative_to(root).as_posix()
        for p in root.rglob("*")
        if p.is_file() and p.name != MANIFEST_FILE and p.suffix in (".vocab", ".tpl", ".cv", ".store")
    )
    text = "".join(f"{sha256(root / rel)}  {rel}\n" for rel in files)
    (root / MANIFEST_FILE).write_text(text, encoding="utf-8")
    return text


def verify_checksums(root: Path) -> None:
    try:
        manifest = read_manifest(root)
    except OSError as exc:
        raise BundleError(f"cannot read manifest in {root}: {exc}") from None
    for rel, digest in manifest.items():
        path = root / rel
        if not path.is_file():
            raise BundleError(f"bundled file missing: {rel}")
        if sha256(path) != digest:
            raise BundleError(f"checksum mismatch for {rel}")


def load_bundled(root: str | os.PathLike | None = None) -> Bundle:
    """Load and check the bundled data (checksums, then structure)."""
    base = data_dir(root)
    verify_checksums(base)
    manifest = read_manifest(base)
    v = parse_vocabulary((base / VOCAB_FILE).read_text(encoding="utf-8"))
    templates = [
        parse_template((base / rel).read_text(encoding="utf-8"))
        for rel in sorted(manifest)
        if rel.endswith(".tpl")
    ]
    controlled = [
        parse_controlled_vocabulary((base / rel).read_text(encoding="utf-8"))
        for rel in sorted(manifest)
        if rel.endswith(".cv")
    ]
    report = verify_structure(v, templates)
    for t in templates:
        for f in check_well_formed(t.graph, v).errors:
            report.append(error(f"{t.template_id}:{f.subject}", f.message))
    if report.errors:
        raise BundleError("bundled data failed its structural checks:\n" + report.render())
    return Bundle(v, templates, controlled)


def sample_corpus_path(root: str | os.PathLike | None = None) -> Path:
    return data_dir(root) / "corpus" / "sample.store"


# Structural expectations for the bundled vocabulary: (parent label, kind, expected child count).
_CHILD_COUNTS = [
    (None, Kind.THEME, 3),
    ("Discourse Description", Kind.THEME, 5),
    ("World_PCI", Kind.THEME, 13),
    (None, Kind.RELATION, 3),
    ("Situating Relation", Kind.RELATION, 10),
    ("Narrative Relation", Kind.RELATION, 2),
]

_REQUIRED_CHILDREN = [
    ("Actor", {"Social Group"}),
    ("Social Group", {"Minority", "Indigenous People"}),
    (DISCOURSE_TYPE, {"Discourse Act", "Discourse Genre"}),
    ("Discourse Genre", {"Summary", "Interview", "Chronology", "Portrait"}),
]


def verify_structure(v: Vocabulary, templates: list[Template] | None = None) -> ValidationReport:
    """Report every drift from the expected shape of the PCI vocabulary."""
    report = ValidationReport()
    for parent, kind, expected in _CHILD_COUNTS:
        ref = v.root(kind) if parent is None else parent
        subj = str(ref) if parent is None else parent
        if not v.has(ref, kind):
            report.append(error(subj, "missing"))
            continue
        n = len(v.children(ref, kind))
        if n != expected:
            report.append(error(subj, f"has {n} children, expected {expected}"))
    nestings = [r for r in v.nestings if not r.id or not r.id.is_root]
    if not any(r.label == DISCOURSE_TOPIC for r in nestings):
        report.append(error(DISCOURSE_TOPIC, "missing nesting type"))
    extra = sorted(r.label for r in nestings if r.label != DISCOURSE_TOPIC)
    if extra:
        report.append(warning("nestings", f"{len(nestings)} nesting types, expected 1 (extra: {', '.join(extra)})"))
    for parent, required in _REQUIRED_CHILDREN:
        if not v.has(parent):
            report.append(error(parent, "missing"))
            continue
        present = {r.label for r in v.children(parent)}
        missing = sorted(required - present)
        if missing:
            report.append(error(parent, f"missing children: {', '.join(missing)}"))
    if templates is not None:
        groups = [t.group for t in templates]
        if len(set(groups)) != len(groups):
            report.append(error("templates", "two templates share a group"))
        if set(groups) != set(TemplateGroup):
            missing = sorted(g.value for g in set(TemplateGroup) - set(groups))
            report.append(error("templates", f"groups not covered: {', '.join(missing)}"))
        dtype = v.find(DISCOURSE_TYPE)
        dtopic = v.find(DISCOURSE_TOPIC, Kind.NESTING)
        for t in templates:
            framed = any(
                dtype is not None and v.has(n.type) and v.subsumes(dtype, n.type) and dtopic in n.nestings
                for n in t.graph.nodes.values()
            )
            if not framed:
                report.append(error(t.template_id, f"no {DISCOURSE_TYPE} node carries a {DISCOURSE_TOPIC}"))
    return report
