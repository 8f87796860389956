import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_dag_vocabulary, random_graph
from pci.annotation import ControlledVocabulary
from pci.errors import ParseError
from pci.graph import (
    GENERIC,
    ConceptualGraph,
    GraphError,
    GraphKind,
    Referent,
    check_well_formed,
    merge_coreferent,
    parse_graph,
    serialize_graph,
)
from pci.pci_data import load_bundled
from pci.projection import project

BUNDLE = load_bundled()
V = BUNDLE.vocabulary
TOPIC = V.nesting("Discourse Topic")


def portrait_of(keyword: str | None = "walachians") -> ConceptualGraph:
    g = ConceptualGraph(GraphKind.NARRATIVE, vocab=V)
    d = g.add_concept(V.theme("Portrait"))
    topic = ConceptualGraph(GraphKind.TOPICAL, vocab=V)
    m = topic.add_concept(V.theme("Minority"), GENERIC if keyword is None else Referent(keyword, "eng"))
    a = topic.add_concept(V.theme("Activity"))
    topic.add_relation(V.relation("Is Subject Of"), (m, a))
    g.attach_nesting(d, TOPIC, topic)
    return g


def test_referent_rendering_and_validation():
    assert str(GENERIC) == "*"
    assert str(Referent("walachians", "eng", "peoples")) == '"walachians"@eng!peoples'
    assert str(Referent('say "hi"')) == '"say \\"hi\\""'
    with pytest.raises(ValueError):
        Referent("  ")
    with pytest.raises(ValueError):
        Referent(None, "eng")
    with pytest.raises(ValueError):
        Referent("x", "e n")


def test_builder_checks():
    g = ConceptualGraph(vocab=V)
    n = g.add_concept(V.theme("Actor"))
    with pytest.raises(GraphError):
        g.add_relation(V.relation("Is Subject Of"), (n, 99))
    with pytest.raises(GraphError):
        g.add_relation(V.relation("Is Subject Of"), (n,))
    with pytest.raises(GraphError):
        g.add_concept(V.relation("Is Subject Of"))
    g.attach_nesting(n, TOPIC, ConceptualGraph())
    with pytest.raises(GraphError):
        g.attach_nesting(n, TOPIC, ConceptualGraph())


def test_well_formed_portrait():
    report = check_well_formed(portrait_of(), V)
    assert report.ok and not report.warnings


def test_missing_topic_is_error_only_in_narrative_graphs():
    g = ConceptualGraph(GraphKind.NARRATIVE)
    g.add_concept(V.theme("Interview"))
    report = check_well_formed(g, V)
    assert [f.subject for f in report.errors] == ["n1"]
    g.kind = GraphKind.UNSPECIFIED
    report = check_well_formed(g, V)
    assert report.ok and len(report.warnings) == 1


def test_topic_on_non_discourse_node_is_error():
    g = ConceptualGraph(GraphKind.NARRATIVE)
    n = g.add_concept(V.theme("Flora"))
    inner = ConceptualGraph(GraphKind.TOPICAL)
    inner.add_concept(V.theme("Fauna"))
    g.attach_nesting(n, TOPIC, inner)
    assert [f.subject for f in check_well_formed(g, V).errors] == ["n1/C-1"]


def test_signature_violation_reports_slot():
    g = portrait_of()
    topic = g.nodes[1].nestings[TOPIC]
    topic.edges.clear()
    # Flora is not an Actor: first slot of an actantial relation is violated.
    f = topic.add_concept(V.theme("Flora"))
    topic.add_relation(V.relation("Is Subject Of"), (f, 2))
    errors = check_well_formed(g, V).errors
    assert len(errors) == 1 and errors[0].subject == "n1/C-1/e0" and "argument 1" in errors[0].message


def test_unknown_types_and_arity():
    g = parse_graph("graph unspecified\nnode 1 [T-999: *]\nnode 2 [T-31: *]\nrel (R-999: 1,2)\nrel (R-9: 2)\n")
    messages = [f.message for f in check_well_formed(g, V).errors]
    assert any("unknown theme T-999" in m for m in messages)
    assert any("unknown relation R-999" in m for m in messages)
    assert any("arity 2, got 1" in m for m in messages)


def test_controlled_referents_checked_when_vocabularies_given():
    g = portrait_of(None)
    topic = g.nodes[1].nestings[TOPIC]
    topic.nodes[1].referent = Referent("klingons", "eng", "peoples")
    assert check_well_formed(g, V).ok
    cvs = BUNDLE.controlled_map()
    assert len(check_well_formed(g, V, cvs).errors) == 1
    topic.nodes[1].referent = Referent("walachians", "eng", "peoples")
    assert check_well_formed(g, V, cvs).ok
    topic.nodes[1].referent = Referent("walachians", "eng", "nope")
    assert len(check_well_formed(g, V, {"x": ControlledVocabulary("x", frozenset())}).errors) == 1


def test_serialize_format():
    text = serialize_graph(portrait_of())
    assert text == (
        "graph narrative\n"
        "node 1 [T-15: *]\n"
        "nest 1 C-1 {\n"
        "  graph topical\n"
        '  node 1 [T-35: "walachians"@eng]\n'
        "  node 2 [T-31: *]\n"
        "  rel (R-9: 1,2)\n"
        "}\n"
    )
    assert parse_graph(text) == portrait_of()


def test_parse_errors():
    bad = [
        "node 1 [T-1: *]\n",
        "graph weird\n",
        "graph topical\nnode 1 [T-1: *]\nnode 1 [T-2: *]\n",
        "graph topical\nnode 1 [T-1: *]\nrel (R-1: 1,2)\n",
        "graph topical\nnode 1 [R-1: *]\n",
        "graph topical\nnode 1 [T-1: walachians]\n",
        "graph topical\nnode 1 [T-1: *]\nnest 1 C-1 {\n  graph topical\n",
        "graph topical\n}\n",
        "graph topical\nnode 1 [T-1: *]\nnest 2 C-1 {\ngraph topical\n}\n",
    ]
    for text in bad:
        with pytest.raises(ParseError):
            parse_graph(text)


def test_parse_error_position():
    with pytest.raises(ParseError) as exc:
        parse_graph("graph topical\nnode 1 [T-1: *]\n  bogus line\n")
    assert (exc.value.line, exc.value.column) == (3, 3)


def test_merge_coreferent():
    g = parse_graph(
        "graph topical\n"
        'node 1 [T-35: "walachians"@eng]\n'
        'node 2 [T-35: "walachians"@eng]\n'
        'node 3 [T-35: "walachians"@fra]\n'
        "node 4 [T-31: *]\n"
        "node 5 [T-31: *]\n"
        "rel (R-9: 1,4)\n"
        "rel (R-9: 2,4)\n"
        "rel (R-9: 3,5)\n"
    )
    m = merge_coreferent(g)
    assert sorted(m.nodes) == [1, 3, 4, 5]
    assert [e.args for e in m.edges] == [(1, 4), (3, 5)]
    assert merge_coreferent(m) == m
    # Merging keeps the existence of a projection.
    for q in (g, m):
        assert project(q, m, V) and project(m, g, V)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_graphs_round_trip(seed):
    rng = random.Random(seed)
    v = random_dag_vocabulary(rng, 8, 4, 2)
    g = random_graph(rng, v, 6, 2, kind=rng.choice(list(GraphKind)))
    text = serialize_graph(g)
    assert parse_graph(text) == g
    assert serialize_graph(parse_graph(text)) == text


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_merge_preserves_projection_existence(seed):
    rng = random.Random(seed)
    v = random_dag_vocabulary(rng, 6, 3, 1)
    g = random_graph(rng, v, 6, 1)
    m = merge_coreferent(g)
    assert len(m.nodes) <= len(g.nodes)
    assert bool(project(g, m, v))
    assert bool(project(m, g, v))
