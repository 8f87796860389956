import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from pci.annotation import catalog, load_store, serialize_template
from pci.cli import main
from pci.graph import parse_graph, serialize_graph
from pci.pci_data import data_dir, load_bundled, sample_corpus_path

BUNDLE = load_bundled()
GOLDEN = Path(__file__).parent / "golden"

GOOD_ANNOTATION = """\
pci-store v1
asset new-01 100000 "file:///new.mp4"
annotation b0001 new-01 0 10000
  keyword eng extracted ctrl:peoples "walachians"
  graph narrative
  node 1 [T-15: *]
  nest 1 C-1 {
    graph topical
    node 1 [T-35: "walachians"@eng]
  }
  endgraph
annotation b0002 new-01 10000 20000
  graph narrative
  node 1 [T-10: *]
  nest 1 C-1 {
    graph topical
    node 1 [T-39: *]
  }
  endgraph
"""

MISSING_TOPIC = """\
pci-store v1
annotation b0003 walachia-01 600000 660000
  graph narrative
  node 1 [T-14: *]
  endgraph
"""


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def store(tmp_path):
    path = tmp_path / "corpus.store"
    shutil.copy(sample_corpus_path(), path)
    return path


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


def test_validate(capsys, tmp_path):
    assert run(capsys, "validate")[0] == 0
    assert run(capsys, "validate", str(GOLDEN / "small.vocab"))[0] == 0
    cyclic = write(tmp_path, "c.vocab", 'root "r"\nconcept T-1 "A" parent=T-2\nconcept T-2 "B" parent=T-1\n')
    code, out, _ = run(capsys, "validate", cyclic)
    assert code == 1 and len(out.splitlines()) == 1 and out.startswith("error ")
    assert run(capsys, "validate", str(tmp_path / "missing.vocab"))[0] == 2
    syntax = write(tmp_path, "s.vocab", 'root "r"\nconcept T-1 "A parent=T-0\n')
    code, _, err = run(capsys, "validate", syntax)
    assert code == 2 and "line 2" in err
    bad_sig = write(tmp_path, "b.vocab", 'root "r"\nrelation R-1 "Links" arity=2 signature=T-0 parent=R-0\n')
    code, out, _ = run(capsys, "--vocab", bad_sig, "validate")
    assert code == 1 and out.startswith("error R-1 ")


def test_lint(capsys):
    code, out, _ = run(capsys, "lint")
    assert code == 0
    assert all(line.startswith("warning ") for line in out.splitlines())


def test_graph_check(capsys, tmp_path):
    assert run(capsys, "graph-check", str(GOLDEN / "portrait.cg"))[0] == 0
    bad = write(tmp_path, "g.cg", "graph narrative\nnode 1 [T-14: *]\n")
    code, out, _ = run(capsys, "graph-check", bad)
    assert code == 1 and out == "error n1 Discourse Type node lacks a Discourse Topic nesting\n"
    assert run(capsys, "graph-check", write(tmp_path, "x.cg", "graph narrative\nnode one\n"))[0] == 2


def test_ingest_valid_file_grows_store(capsys, tmp_path, store):
    before = len(load_store(store).annotations)
    code, out, _ = run(capsys, "--store", str(store), "ingest", write(tmp_path, "a.ann", GOOD_ANNOTATION))
    assert code == 0
    assert len(load_store(store).annotations) == before + 2


def test_ingest_topic_violation_is_rejected_whole(capsys, tmp_path, store):
    original = store.read_bytes()
    text = GOOD_ANNOTATION + MISSING_TOPIC.split("\n", 1)[1]
    code, out, _ = run(capsys, "ingest", write(tmp_path, "a.ann", text), "--store", str(store))
    assert code == 1
    assert "b0003:n1 Discourse Type node lacks a Discourse Topic nesting" in out
    assert store.read_bytes() == original


def test_ingest_malformed_and_missing(capsys, tmp_path, store):
    assert run(capsys, "ingest", write(tmp_path, "a.ann", "pci-store v1\nannotation x\n"), "--store", str(store))[0] == 2
    assert run(capsys, "ingest", str(tmp_path / "nope.ann"), "--store", str(store))[0] == 2
    assert run(capsys, "ingest", write(tmp_path, "b.ann", GOOD_ANNOTATION))[0] == 2
    new_store = tmp_path / "fresh.store"
    assert run(capsys, "ingest", str(tmp_path / "b.ann"), "--store", str(new_store))[0] == 2
    assert run(capsys, "ingest", str(tmp_path / "b.ann"), "--store", str(new_store), "--create")[0] == 0
    assert len(load_store(new_store).annotations) == 2


def test_truncated_store_is_usage_error(capsys, tmp_path, store):
    text = store.read_text()
    truncated = write(tmp_path, "t.store", text[: len(text) // 2])
    q = write(tmp_path, "q.cg", "graph topical\n")
    assert run(capsys, "query", q, "--store", truncated)[0] == 2
    assert run(capsys, "catalog", "--store", truncated)[0] == 2


def test_empty_query_lists_every_segment(capsys, tmp_path, store):
    code, out, _ = run(capsys, "query", write(tmp_path, "q.cg", "graph narrative\n"), "--store", str(store))
    lines = out.splitlines()
    assert code == 0 and len(lines) == 22 and all(line.endswith("count=1") for line in lines)


def test_query_without_matches_prints_nothing(capsys, tmp_path):
    empty = write(tmp_path, "e.store", "pci-store v1\n")
    q = write(tmp_path, "q.cg", 'graph topical\nnode 1 [T-35: "walachians"]\n')
    assert run(capsys, "query", q, "--store", empty) == (0, "", "")


def test_group_two_template_as_query(capsys, tmp_path, store):
    q = write(tmp_path, "q.cg", serialize_graph(BUNDLE.template("tpl-intangible").graph))
    code, out, _ = run(capsys, "query", q, "--store", str(store))
    assert code == 0
    # Hand enumeration: a0006-a0010 are the five intangible-heritage annotations.
    assert sorted(line.split()[1] for line in out.splitlines()) == ["a0006", "a0007", "a0008", "a0009", "a0010"]


def test_query_explain_and_determinism(capsys, tmp_path, store):
    q = write(tmp_path, "q.cg", "graph topical\nnode 1 [T-33: *]\n")
    first = run(capsys, "query", q, "--store", str(store), "--explain")
    second = run(capsys, "query", q, "--store", str(store), "--explain", "--workers", "3")
    assert first == second and first[0] == 0
    assert "  mapping 1\n" in first[1]


def test_unknown_query_type_is_usage_error(capsys, tmp_path, store):
    q = write(tmp_path, "q.cg", "graph topical\nnode 1 [T-999: *]\n")
    assert run(capsys, "query", q, "--store", str(store))[0] == 2


def test_instantiate(capsys):
    code, out, _ = run(capsys, "instantiate", "tpl-essentials", "--fill", "group=walachians")
    assert code == 0
    topic = parse_graph(out).nodes[1].nestings
    assert '[T-35: "walachians"]' in out and topic
    code, out, _ = run(capsys, "instantiate", "tpl-essentials")
    assert code == 0 and out == serialize_graph(BUNDLE.template("tpl-essentials").graph)
    assert run(capsys, "instantiate", "tpl-essentials", "--fill", "nope=x")[0] == 2
    assert run(capsys, "instantiate", "tpl-missing")[0] == 2
    assert run(capsys, "instantiate", "tpl-essentials", "--fill", "group")[0] == 2
    code, out, _ = run(capsys, "instantiate", "tpl-essentials", "--fill", "group=walachians@eng!peoples")
    assert code == 0 and '"walachians"@eng!peoples' in out
    assert run(capsys, "instantiate", "tpl-essentials", "--fill", "group=klingons@eng!peoples")[0] == 1


def test_catalog(capsys, tmp_path, store):
    empty = write(tmp_path, "e.store", "pci-store v1\n")
    code, out, _ = run(capsys, "catalog", "--store", empty)
    assert code == 0 and out.splitlines()[0] == "total 0"
    assert all(line.endswith(" 0") for line in out.splitlines())
    code, out, _ = run(capsys, "--store", str(store), "catalog")
    assert code == 0
    assert out == catalog(load_store(store), BUNDLE.vocabulary).render()
    assert out == run(capsys, "catalog", "--store", str(store))[1]


def test_templates_listing(capsys):
    code, out, _ = run(capsys, "templates")
    assert code == 0 and len(out.splitlines()) == 4
    code, out, _ = run(capsys, "templates", "--full")
    assert out == "".join(serialize_template(t) for t in BUNDLE.templates)


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "catalog")[0] == 2


def test_data_dir_environment(capsys, tmp_path, monkeypatch):
    root = tmp_path / "data"
    shutil.copytree(data_dir(), root)
    (root / "pci_v4.vocab").write_text("corrupted\n")
    monkeypatch.setenv("PCI_DATA_DIR", str(root))
    code, _, err = run(capsys, "validate")
    assert code == 2 and "checksum" in err


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pci", "validate"], capture_output=True, text=True)
    assert proc.returncode == 0
