"""Projection of query graphs into target graphs under type specialisation.

A projection maps every query concept node to a target node whose type is
subsumed by the query node's type, with compatible referents; every query
edge must be witnessed by a target edge of a subsumed relation type over
the mapped arguments; and every query nesting must be matched by a nesting
of a subsumed type on the image node, recursively.  Several query nodes may
share an image (homomorphism, not isomorphism).

Two mappings are the same projection when their concept maps (including
nested ones) coincide; the edge map records the first witnessing edge.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

from pci.errors import PCIError, UnknownTypeError
from pci.graph import GENERIC, ConceptualGraph, ConceptNode, GraphKind, Referent, RelationEdge
from pci.vocabulary import Kind, TypeId, Vocabulary

if TYPE_CHECKING:
    from pci.annotation import AnnotationStore, Segment

ORACLE_MAX_NODES = 8


class OracleLimitError(PCIError, ValueError):
    pass


@dataclass(frozen=True)
class NestedMatch:
    node: int  # query node carrying the nesting
    query_nesting: TypeId
    target_nesting: TypeId
    mapping: ProjectionMapping


@dataclass(frozen=True)
class ProjectionMapping:
    concepts: tuple[tuple[int, int], ...]  # (query node, target node), by query node
    edges: tuple[tuple[int, int], ...]  # (query edge index, target edge index)
    nested: tuple[NestedMatch, ...] = ()

    @property
    def concept_map(self) -> dict[int, int]:
        return dict(self.concepts)

    @property
    def edge_map(self) -> dict[int, int]:
        return dict(self.edges)

    def sort_key(self) -> tuple:
        return (
            self.concepts,
            tuple((n.node, n.query_nesting, n.target_nesting, n.mapping.sort_key()) for n in self.nested),
        )


def referent_matches(query: Referent, target: Referent) -> bool:
    if query.is_generic:
        return True
    if target.is_generic or query.keyword != target.keyword:
        return False
    return query.language is None or query.language == target.language


def _require_known(g: ConceptualGraph, v: Vocabulary) -> None:
    for level in g.levels():
        for node in level.nodes.values():
            if not v.has(node.type):
                raise UnknownTypeError(f"unknown theme {node.type}")
            for nest in node.nestings:
                if not v.has(nest):
                    raise UnknownTypeError(f"unknown nesting type {nest}")
        for e in level.edges:
            if not v.has(e.type):
                raise UnknownTypeError(f"unknown relation {e.type}")


def project(query: ConceptualGraph, target: ConceptualGraph, v: Vocabulary) -> list[ProjectionMapping]:
    """All projections of ``query`` into ``target``, in a deterministic order."""
    _require_known(query, v)
    _require_known(target, v)
    return _Search(v).level(query, target)


class _Search:
    def __init__(self, v: Vocabulary):
        self.v = v
        self.memo: dict[tuple[int, int], list[ProjectionMapping]] = {}

    def level(self, q: ConceptualGraph, t: ConceptualGraph) -> list[ProjectionMapping]:
        key = (id(q), id(t))
        if key not in self.memo:
            self.memo[key] = self._level(q, t)
        return self.memo[key]

    def _nested_options(self, qn: ConceptNode, tn: ConceptNode) -> list[tuple[NestedMatch, ...]]:
        if not qn.nestings:
            return [()]
        per_nesting = []
        for qnest, qinner in qn.nestings.items():
            opts = []
            for tnest, tinner in tn.nestings.items():
                if self.v.subsumes(qnest, tnest):
                    for m in self.level(qinner, tinner):
                        opts.append(NestedMatch(qn.node_id, qnest, tnest, m))
            if not opts:
                return []
            per_nesting.append(opts)
        return list(itertools.product(*per_nesting))

    def _level(self, q: ConceptualGraph, t: ConceptualGraph) -> list[ProjectionMapping]:
        v = self.v
        qids = sorted(q.nodes)
        if not qids:
            return [ProjectionMapping((), ())]
        tids = sorted(t.nodes)

        # Unary constraints: type, referent, and eagerly resolved nestings.
        domains: dict[int, list[int]] = {}
        nested: dict[tuple[int, int], list[tuple[NestedMatch, ...]]] = {}
        for qid in qids:
            qn = q.nodes[qid]
            cands = []
            for tid in tids:
                tn = t.nodes[tid]
                if not v.subsumes(qn.type, tn.type) or not referent_matches(qn.referent, tn.referent):
                    continue
                opts = self._nested_options(qn, tn)
                if opts:
                    nested[(qid, tid)] = opts
                    cands.append(tid)
            if not cands:
                return []
            domains[qid] = cands

        witnesses: list[list[int]] = []
        for qe in q.edges:
            ws = [
                i for i, te in enumerate(t.edges)
                if len(te.args) == len(qe.args) and v.subsumes(qe.type, te.type)
            ]
            if not ws:
                return []
            witnesses.append(ws)
        incident: dict[int, list[int]] = {qid: [] for qid in qids}
        for i, qe in enumerate(q.edges):
            for a in set(qe.args):
                incident[a].append(i)

        def supported(ei: int, assign: dict[int, int]) -> bool:
            args = q.edges[ei].args
            for w in witnesses[ei]:
                targs = t.edges[w].args
                if all(a not in assign or assign[a] == b for a, b in zip(args, targs)):
                    return True
            return False

        solutions: list[dict[int, int]] = []

        def search(assign: dict[int, int], doms: dict[int, list[int]]) -> None:
            if len(assign) == len(qids):
                solutions.append(dict(assign))
                return
            # Most constrained variable first; ties go to the lowest node id.
            var = min((x for x in qids if x not in assign), key=lambda x: (len(doms[x]), x))
            for val in doms[var]:
                assign[var] = val
                pruned = dict(doms)
                ok = True
                for ei in incident[var]:
                    args = q.edges[ei].args
                    open_vars = {a for a in args if a not in assign}
                    if not open_vars:
                        if not supported(ei, assign):
                            ok = False
                            break
                        continue
                    # Forward checking: every open argument keeps only supported values.
                    for u in open_vars:
                        keep = []
                        for y in pruned[u]:
                            assign[u] = y
                            if supported(ei, assign):
                                keep.append(y)
                            del assign[u]
                        if not keep:
                            ok = False
                            break
                        pruned[u] = keep
                    if not ok:
                        break
                if ok:
                    search(assign, pruned)
                del assign[var]

        search({}, domains)

        results = []
        for sol in solutions:
            edge_map = []
            for ei, qe in enumerate(q.edges):
                image = tuple(sol[a] for a in qe.args)
                edge_map.append((ei, next(w for w in witnesses[ei] if t.edges[w].args == image)))
            concepts = tuple((qid, sol[qid]) for qid in qids)
            combos = [nested[(qid, sol[qid])] for qid in qids]
            for combo in itertools.product(*combos):
                flat = tuple(m for part in combo for m in part)
                results.append(ProjectionMapping(concepts, tuple(edge_map), flat))
        results.sort(key=ProjectionMapping.sort_key)
        deduped: list[ProjectionMapping] = []
        for m in results:
            if not deduped or deduped[-1].sort_key() != m.sort_key():
                deduped.append(m)
        return deduped


# -- independent checks ---------------------------------------------------------


def count_projections_oracle(query: ConceptualGraph, target: ConceptualGraph, v: Vocabulary) -> int:
    """Count projections by enumerating every node map and filtering.

    Test oracle only: shares no code with :func:`project`.
    """
    if len(target.nodes) > ORACLE_MAX_NODES:
        raise OracleLimitError(f"target level has {len(target.nodes)} nodes (limit {ORACLE_MAX_NODES})")
    qids = sorted(query.nodes)
    tids = sorted(target.nodes)

    def node_ok(qn: ConceptNode, tn: ConceptNode) -> bool:
        if not v.subsumes(qn.type, tn.type):
            return False
        qr, tr = qn.referent, tn.referent
        if qr.keyword is None:
            return True
        if tr.keyword != qr.keyword:
            return False
        return qr.language is None or tr.language == qr.language

    def edge_ok(qe: RelationEdge, phi: dict[int, int]) -> bool:
        image = [phi[a] for a in qe.args]
        return any(
            list(te.args) == image and v.subsumes(qe.type, te.type) for te in target.edges
        )

    total = 0
    for combo in itertools.product(tids, repeat=len(qids)):
        phi = dict(zip(qids, combo))
        if not all(node_ok(query.nodes[a], target.nodes[b]) for a, b in phi.items()):
            continue
        if not all(edge_ok(qe, phi) for qe in query.edges):
            continue
        weight = 1
        for a, b in phi.items():
            for qnest, qinner in query.nodes[a].nestings.items():
                weight *= sum(
                    count_projections_oracle(qinner, tinner, v)
                    for tnest, tinner in target.nodes[b].nestings.items()
                    if v.subsumes(qnest, tnest)
                )
        total += weight
    return total


def verify_mapping(
    query: ConceptualGraph, target: ConceptualGraph, mapping: ProjectionMapping, v: Vocabulary
) -> list[str]:
    """Re-check a mapping against the projection rules; returns the violations."""
    problems: list[str] = []
    cmap = mapping.concept_map
    if sorted(cmap) != sorted(query.nodes):
        problems.append("concept map does not cover exactly the query nodes")
        return problems
    for qid, tid in cmap.items():
        if tid not in target.nodes:
            problems.append(f"node {qid} maps to missing target node {tid}")
            continue
        qn, tn = query.nodes[qid], target.nodes[tid]
        if not v.subsumes(qn.type, tn.type):
            problems.append(f"node {qid}: {qn.type} does not subsume {tn.type}")
        if not qn.referent.is_generic:
            if tn.referent.is_generic or tn.referent.keyword != qn.referent.keyword:
                problems.append(f"node {qid}: individual referent not preserved")
            elif qn.referent.language is not None and qn.referent.language != tn.referent.language:
                problems.append(f"node {qid}: language differs")
    emap = mapping.edge_map
    if sorted(emap) != list(range(len(query.edges))):
        problems.append("edge map does not cover exactly the query edges")
    for qi, ti in emap.items():
        if not 0 <= ti < len(target.edges) or qi >= len(query.edges):
            problems.append(f"edge {qi} maps to missing target edge {ti}")
            continue
        qe, te = query.edges[qi], target.edges[ti]
        if not v.subsumes(qe.type, te.type):
            problems.append(f"edge {qi}: {qe.type} does not subsume {te.type}")
        if tuple(cmap.get(a) for a in qe.args) != te.args:
            problems.append(f"edge {qi}: arguments do not map pointwise")
    covered = set()
    for nm in mapping.nested:
        covered.add((nm.node, nm.query_nesting))
        qn = query.nodes.get(nm.node)
        tn = target.nodes.get(cmap.get(nm.node, -1))
        if qn is None or tn is None or nm.query_nesting not in qn.nestings or nm.target_nesting not in tn.nestings:
            problems.append(f"node {nm.node}: nested match refers to missing nesting")
            continue
        if not v.subsumes(nm.query_nesting, nm.target_nesting):
            problems.append(f"node {nm.node}: {nm.query_nesting} does not subsume {nm.target_nesting}")
        problems.extend(
            f"node {nm.node}/{nm.query_nesting}: {p}"
            for p in verify_mapping(qn.nestings[nm.query_nesting], tn.nestings[nm.target_nesting], nm.mapping, v)
        )
    required = {(qid, n) for qid, qn in query.nodes.items() for n in qn.nestings}
    if covered != required or len(mapping.nested) != len(required):
        problems.append("nested matches do not cover exactly the query nestings")
    return problems


# -- store queries --------------------------------------------------------------


@dataclass(frozen=True)
class QueryResult:
    annotation_id: str
    segment: Segment
    mappings: tuple[ProjectionMapping, ...]

    @property
    def match_count(self) -> int:
        return len(self.mappings)


def lift_topical(query: ConceptualGraph) -> ConceptualGraph:
    """Wrap a topical query as the nested graph of a generic root node.

    Topical queries describe discourse topics, which live one level below
    the narrative graph of an annotation.
    """
    outer = ConceptualGraph(GraphKind.UNSPECIFIED)
    host = outer.add_concept(TypeId(Kind.THEME, 0), GENERIC)
    outer.attach_nesting(host, TypeId(Kind.NESTING, 0), query)
    return outer


def answer_query(
    query: ConceptualGraph, store: AnnotationStore, v: Vocabulary, *, workers: int = 1
) -> list[QueryResult]:
    """Annotations admitting at least one projection, best match first.

    Ordered by match count (descending) then annotation id.  A query of
    kind ``topical`` is matched against the discourse topics nested in each
    annotation graph; any other kind against the annotation graph itself.
    """
    # The empty query matches every annotation once, whatever its kind.
    lifted = query.kind is GraphKind.TOPICAL and query.nodes
    effective = lift_topical(query) if lifted else query
    _require_known(effective, v)
    annotations = [store.annotations[k] for k in sorted(store.annotations)]

    def run(a) -> list[ProjectionMapping]:
        _require_known(a.graph, v)
        return _Search(v).level(effective, a.graph)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            found = list(pool.map(run, annotations))
    else:
        found = [run(a) for a in annotations]
    results = [
        QueryResult(a.annotation_id, a.segment, tuple(ms))
        for a, ms in zip(annotations, found)
        if ms
    ]
    results.sort(key=lambda r: (-r.match_count, r.annotation_id))
    return results


def _mapping_lines(m: ProjectionMapping, depth: int) -> Iterable[str]:
    ind = "  " * depth
    for q, t in m.concepts:
        yield f"{ind}node {q} -> {t}"
    for q, t in m.edges:
        yield f"{ind}edge {q} -> {t}"
    for nm in m.nested:
        yield f"{ind}nest {nm.node} {nm.query_nesting} -> {nm.target_nesting}"
        yield from _mapping_lines(nm.mapping, depth + 1)


def format_results(results: Iterable[QueryResult], explain: bool = False) -> str:
    lines = []
    for r in results:
        seg = r.segment
        lines.append(f"match {r.annotation_id} {seg.asset_id} {seg.start_ms}-{seg.end_ms} count={r.match_count}")
        if explain:
            for i, m in enumerate(r.mappings, start=1):
                lines.append(f"  mapping {i}")
                lines.extend(_mapping_lines(m, 2))
    return "".join(line + "\n" for line in lines)
