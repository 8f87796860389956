"""Regenerate the synthetic sample corpus shipped in src/pci/data/corpus/.

Every annotation is built through the public API (template instantiation and
add_annotation), so the file is valid by construction.  Run
scripts/update_manifest.py afterwards.
"""

from __future__ import annotations

from pci.annotation import (
    AnnotationStore,
    Filler,
    Keyword,
    KeywordKind,
    MediaAsset,
    Segment,
    SegmentAnnotation,
    add_annotation,
    instantiate_template,
    save_store,
)
from pci.graph import ConceptualGraph, GraphKind, Referent
from pci.pci_data import load_bundled, sample_corpus_path

ASSETS = [
    MediaAsset("walachia-01", "https://example.org/pci/walachia-01.mp4", 1_800_000, ("ron", "fra")),
    MediaAsset("mendoza-01", "https://example.org/pci/mendoza-01.mp4", 2_400_000, ("spa", "fra")),
    MediaAsset("nordic-01", "https://example.org/pci/nordic-01.mp4", 1_200_000, ("eng",)),
    MediaAsset("steppe-01", "https://example.org/pci/steppe-01.mp4", 3_000_000, ("eng", "fra")),
]

# (template id, asset, fillers, title, pragmatic marks by label)
TEMPLATED = [
    ("tpl-essentials", "walachia-01", {"group": ("walachians", "eng")}, "Walachian village life", ["Thematic Folder"]),
    ("tpl-essentials", "walachia-01", {"group": ("walachians", "fra")}, "La vie des Valaques", ["Multilingual Version"]),
    ("tpl-essentials", "walachia-01", {"group": ("aromanians", "eng")}, "Aromanian shepherds", []),
    ("tpl-essentials", "nordic-01", {}, "A minority in its landscape", []),
    ("tpl-essentials", "steppe-01", {"group": ("walachians", "eng")}, "Walachians of the plain", ["Education"]),
    ("tpl-intangible", "mendoza-01", {"group": ("huarpe", "eng")}, "Huarpe songs", ["Video Lexicon"]),
    ("tpl-intangible", "nordic-01", {"group": ("sami", "eng")}, "Joik", []),
    ("tpl-intangible", "mendoza-01", {"group": ("mapuche", "eng")}, "Mapuche weaving motifs", []),
    ("tpl-intangible", "steppe-01", {}, "Oral epics", ["Research"]),
    ("tpl-intangible", "nordic-01", {"group": ("ainu", "eng")}, "Ainu storytelling", []),
    ("tpl-practical", "mendoza-01", {"group": ("huarpe", "eng")}, "Lagoon fishing", ["Pedagogical Folder"]),
    ("tpl-practical", "walachia-01", {"group": ("roma", "eng")}, "Coppersmiths at work", []),
    ("tpl-practical", "mendoza-01", {"group": ("quechua", "eng")}, "Terrace farming", []),
    ("tpl-practical", "steppe-01", {}, "Felt making", []),
    ("tpl-practical", "nordic-01", {"group": ("sami", "eng")}, "Reindeer herding", ["Video Clip"]),
    ("tpl-identity", "steppe-01", {"group": ("kurds", "eng"), "other": ("turks", None)}, "Contested pastures", []),
    ("tpl-identity", "walachia-01", {"group": ("roma", "eng")}, "Roma and their neighbours", ["Cultural Policy Making"]),
    ("tpl-identity", "nordic-01", {"group": ("sami", "eng"), "other": ("settlers", None)}, "Land rights", []),
    ("tpl-identity", "mendoza-01", {"group": ("huarpe", "eng"), "territory": ("Guanacache", None)}, "Guanacache lagoons", []),
    ("tpl-identity", "steppe-01", {}, "Two communities", ["Scientific Journalism"]),
]

SEGMENT_MS = 60_000


def _untemplated(v) -> list[tuple[str, ConceptualGraph, str, list[Keyword]]]:
    # A summary whose topic is an indigenous people with no template frame.
    g1 = ConceptualGraph(GraphKind.NARRATIVE)
    n = g1.add_concept(v.theme("Summary"))
    topic = ConceptualGraph(GraphKind.TOPICAL)
    topic.add_concept(v.theme("Indigenous People"), Referent("huarpe", "eng", "peoples"))
    g1.attach_nesting(n, v.nesting("Discourse Topic"), topic)
    # A chronology of a landscape: no actor at all.
    g2 = ConceptualGraph(GraphKind.NARRATIVE)
    n = g2.add_concept(v.theme("Chronology"))
    topic = ConceptualGraph(GraphKind.TOPICAL)
    flora = topic.add_concept(v.theme("Flora"))
    env = topic.add_concept(v.theme("Natural Environment"), Referent("Mendoza desert", "eng"))
    topic.add_relation(v.relation("Spatial Relation"), (flora, env))
    g2.attach_nesting(n, v.nesting("Discourse Topic"), topic)
    return [
        ("mendoza-01", g1, "Who are the Huarpe", [Keyword("huarpe", "eng", KeywordKind.EXTRACTED, "peoples")]),
        ("mendoza-01", g2, "Desert vegetation over the seasons", [Keyword("desert plants", "eng", KeywordKind.PARAPHRASE)]),
    ]


def build() -> AnnotationStore:
    v, templates, controlled = load_bundled()
    cvs = {cv.name: cv for cv in controlled}
    by_id = {t.template_id: t for t in templates}
    store = AnnotationStore()
    for asset in ASSETS:
        store.add_asset(asset)
    cursor = {a.asset_id: 0 for a in ASSETS}

    def segment(asset_id: str) -> Segment:
        start = cursor[asset_id]
        cursor[asset_id] = start + SEGMENT_MS
        return Segment(asset_id, start, start + SEGMENT_MS)

    for tid, asset_id, fills, title, marks in TEMPLATED:
        t = by_id[tid]
        fillers = {}
        keywords = []
        for slot, (text, lang) in fills.items():
            source = "peoples" if slot in ("group", "other") and lang is not None else None
            fillers[slot] = Filler(text, lang, source)
            keywords.append(Keyword(text, lang or "eng", KeywordKind.EXTRACTED, source))
        ann = SegmentAnnotation(
            None,
            segment(asset_id),
            instantiate_template(t, fillers, cvs),
            fields={"eng": {"title": title}},
            keywords=keywords,
            marks=[v.theme(m) for m in marks],
            template=(tid, t.group.value),
        )
        add_annotation(store, ann, v, cvs)
    for asset_id, g, title, keywords in _untemplated(v):
        ann = SegmentAnnotation(None, segment(asset_id), g, fields={"eng": {"title": title}}, keywords=keywords)
        add_annotation(store, ann, v, cvs)
    return store


if __name__ == "__main__":
    path = sample_corpus_path()
    save_store(build(), path)
    print(f"wrote {path}")
