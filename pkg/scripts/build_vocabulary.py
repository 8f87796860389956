"""Regenerate src/pci/data/pci_v4.vocab from the label-level source below.

Identifiers are assigned by a depth-first walk (children in label order), so
the output is deterministic.  Run scripts/update_manifest.py afterwards.
"""

from __future__ import annotations

from pathlib import Path

from pci.vocabulary import assign_identifiers, parse_vocabulary, serialize_vocabulary, validate_vocabulary

OUT = Path(__file__).resolve().parents[1] / "src" / "pci" / "data" / "pci_v4.vocab"

HEADER = """\
# PCI ontology, version 4: prose-attested skeleton.
#
# Only types named in running text are encoded.  Figure-only content is left
# out rather than guessed:
#   - deeper Activity and Actor hierarchies (fig 9)
#   - Animate Matter, Inanimate Matter and support hierarchies (fig 10)
#   - Natural and Social Environment detail below the two attested children (fig 11)
#   - Symbolic Model and Process, System of Expression detail (fig 12)
#   - Temporality and Object, Product detail below the attested children (fig 13)
#   - full relation hierarchy below the basic relational themes (figs 14-16)
#   - speech act classes below Discourse Act beyond the attested examples (fig 8)
# Situating Relation signatures are provisional: every slot is the root theme
# except the actantial relations, whose first slot is Actor.
# The temporal "Chronology" is labelled "Temporal Chronology" because labels
# are unique per hierarchy and the discourse genre "Chronology" came first.
"""

SOURCE = """\
root "ESCoM_PCI_201206"
concept "Discourse Description" parent=T-0
concept "World_PCI" parent=T-0
concept "Pragmatic Description" parent=T-0

concept "Contextual Setting" parent="Discourse Description"
concept "Discourse Generalities" parent="Discourse Description"
concept "Discourse Participant" parent="Discourse Description"
concept "Discourse Type" parent="Discourse Description"
concept "Discourse Unit" parent="Discourse Description"
concept "Author" parent="Discourse Participant"
concept "Destinee" parent="Discourse Participant"
concept "Discourse Act" parent="Discourse Type"
concept "Discourse Genre" parent="Discourse Type"
concept "Appreciation" parent="Discourse Act"
concept "Description" parent="Discourse Act"
concept "Narration" parent="Discourse Act"
concept "Chronology" parent="Discourse Genre"
concept "Interview" parent="Discourse Genre"
concept "Portrait" parent="Discourse Genre"
concept "Summary" parent="Discourse Genre"

concept "Activity" parent="World_PCI"
concept "Actor" parent="World_PCI"
concept "Animate Matter" parent="World_PCI"
concept "Attribute and Feature" parent="World_PCI"
concept "Symbolic Model and Process" parent="World_PCI"
concept "Fauna" parent="World_PCI"
concept "Flora" parent="World_PCI"
concept "Inanimate Matter" parent="World_PCI"
concept "Natural Environment" parent="World_PCI"
concept "Object, Product" parent="World_PCI"
concept "Social Environment" parent="World_PCI"
concept "System of Expression and Communication" parent="World_PCI"
concept "Temporality and History" parent="World_PCI"
concept "Social Group" parent="Actor"
concept "Minority" parent="Social Group"
concept "Indigenous People" parent="Social Group"
concept "Art Work" parent="Object, Product"
concept "Tool and Instrument" parent="Object, Product"
concept "Equipment" parent="Object, Product"
concept "Decoration" parent="Object, Product"
concept "Container" parent="Object, Product"
concept "Information and Knowledge Support" parent="Object, Product"
concept "Social Organisation" parent="Social Environment"
concept "Social Territory" parent="Social Environment"
concept "Verbal System" parent="System of Expression and Communication"
concept "Linguistic Structure" parent="System of Expression and Communication"
concept "Temporal Chronology" parent="Temporality and History"
concept "Period" parent="Temporality and History"
concept "Rhythm and Cycle" parent="Temporality and History"
concept "Evolution" parent="Temporality and History"

concept "Publishing Genre" parent="Pragmatic Description"
concept "Context of Use" parent="Pragmatic Description"
concept "Thematic Folder" parent="Publishing Genre"
concept "Video Lexicon" parent="Publishing Genre"
concept "Pedagogical Folder" parent="Publishing Genre"
concept "Multilingual Version" parent="Publishing Genre"
concept "Video Clip" parent="Publishing Genre"
concept "Education" parent="Context of Use"
concept "Research" parent="Context of Use"
concept "Cultural Policy Making" parent="Context of Use"
concept "Scientific Journalism" parent="Context of Use"

relation "Situating Relation" arity=2 signature=T-0,T-0 parent=R-0
relation "Narrative Relation" arity=2 signature=T-0,"Discourse Description" parent=R-0
relation "Linguistic Relation" arity=2 signature=T-0,T-0 parent=R-0

relation "Actantial Relation" arity=2 signature="Actor",T-0 parent="Situating Relation"
relation "Ant/Agonist Relation" arity=2 signature=T-0,T-0 parent="Situating Relation"
relation "Causality Relation" arity=2 signature=T-0,T-0 parent="Situating Relation"
relation "Counterfactual Relation" arity=2 signature=T-0,T-0 parent="Situating Relation"
relation "Intentional Relation" arity=2 signature=T-0,T-0 parent="Situating Relation"
relation "Manifestation Relation" arity=2 signature=T-0,T-0 parent="Situating Relation"
relation "Partonymic Relation" arity=2 signature=T-0,T-0 parent="Situating Relation"
relation "Spatial Relation" arity=2 signature=T-0,T-0 parent="Situating Relation"
relation "Temporal Relation" arity=2 signature=T-0,T-0 parent="Situating Relation"
relation "Taxonomic Relation" arity=2 signature=T-0,T-0 parent="Situating Relation"
relation "Is Subject Of" arity=2 signature="Actor","Activity" parent="Actantial Relation"
relation "Is Beneficiary Of" arity=2 signature="Actor","Activity" parent="Actantial Relation"

relation "Discourse Relational" arity=2 signature=T-0,"Discourse Description" parent="Narrative Relation"
relation "Rhetorical Relational" arity=2 signature=T-0,"Discourse Description" parent="Narrative Relation"

relation "Lexical Relation" arity=2 signature=T-0,T-0 parent="Linguistic Relation"

nesting "Discourse Topic"
"""


def build() -> str:
    v = assign_identifiers(parse_vocabulary(SOURCE))
    report = validate_vocabulary(v)
    if report.errors:
        raise SystemExit(report.render())
    return HEADER + "\n" + serialize_vocabulary(v)


if __name__ == "__main__":
    OUT.write_text(build(), encoding="utf-8")
    print(f"wrote {OUT}")
