"""
Double-pushout rewriting of monogamous acyclic graphs.

A rewrite finds a convex occurrence of the pattern, splits the host into
C1 ; (id_k * L) ; C2 and only proceeds if that split is certified by an
isomorphism back to the host. Soundness rests on the certificate, not on
the matcher or the splitter.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import networkx as nx

from aprop import Term, term_to_graph
from config import get_config
from errors import ShapeError
from hypergraph import (EXACT_LABELS, EmbeddingSearch, InterfacedGraph, Isomorphism,
                        LabelEquivalence, compose, compose_with_renaming, find_isomorphism,
                        flow_graph, id_graph, is_acyclic, is_monogamous, stack,
                        stack_with_renaming)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Rule:
    name: str
    lhs: Term
    rhs: Term

    def sides(self, reverse: bool = False) -> Tuple[Term, Term]:
        return (self.rhs, self.lhs) if reverse else (self.lhs, self.rhs)


@dataclass(frozen=True)
class Match:
    vertex_map: Dict[int, int]
    edge_map: Dict[int, int]

    @property
    def image_edges(self) -> Tuple[int, ...]:
        return tuple(sorted(self.edge_map.values()))

    @property
    def image_vertices(self) -> frozenset:
        return frozenset(self.vertex_map.values())

    def sort_key(self) -> Tuple:
        return self.image_edges, tuple(self.vertex_map[v] for v in sorted(self.vertex_map))


@dataclass(frozen=True)
class Decomposition:
    c1: InterfacedGraph
    c2: InterfacedGraph
    k: int
    v_i: Tuple[int, ...]
    v_j: Tuple[int, ...]


@dataclass(frozen=True)
class RewriteResult:
    graph: InterfacedGraph
    certificate: Isomorphism
    decomposition: Decomposition
    match: Match
    inserted: Match


def _closure(flow, sources, forward: bool) -> set:
    seen = set()
    todo = list(sources)
    step = flow.successors if forward else flow.predecessors
    while todo:
        node = todo.pop()
        for nxt in step(node):
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return seen


def _image_nodes(match: Match) -> set:
    return ({('e', e) for e in match.edge_map.values()}
            | {('v', v) for v in match.vertex_map.values()})


class ConvexityCheck:
    """
    Convexity of partial images in one host, with reachability computed once
    per flow node. Usable as the admissible test of an EmbeddingSearch.
    """

    def __init__(self, host: InterfacedGraph):
        self.flow = flow_graph(host)
        self._down: Dict = {}
        self._up: Dict = {}

    def _reach(self, cache: Dict, node, forward: bool) -> set:
        if node not in cache:
            cache[node] = nx.descendants(self.flow, node) if forward else nx.ancestors(self.flow, node)
        return cache[node]

    def __call__(self, vertex_map: Dict[int, int], edge_map: Dict[int, int]) -> bool:
        image = _image_nodes(Match(vertex_map, edge_map))
        down, up = set(), set()
        for node in image:
            down |= self._reach(self._down, node, True)
            up |= self._reach(self._up, node, False)
        return not ((down & up) - image)


def is_convex(host: InterfacedGraph, match: Match) -> bool:
    """No path leaves the image and comes back into it."""
    return ConvexityCheck(host)(match.vertex_map, match.edge_map)


def find_matches(pattern: InterfacedGraph, host: InterfacedGraph,
                 equivalence: LabelEquivalence = EXACT_LABELS,
                 limit: int = None) -> List[Match]:
    """
    Convex occurrences of pattern in host, ordered by edge image then vertex
    image; the first limit of that order are returned.
    """
    limit = limit or get_config().MAX_MATCHES
    search = EmbeddingSearch(pattern, host, equivalence, admissible=ConvexityCheck(host))
    found = [Match(emb.vertex_map, emb.edge_map) for emb in search.embeddings(per_edge_map=limit)]
    found.sort(key=Match.sort_key)
    if len(found) > limit:
        logger.warning(f"{len(found)} occurrences found, keeping the first {limit}")
        del found[limit:]
    logger.debug(f"{len(found)} convex matches of a {len(pattern.edges)}-edge pattern")
    return found


def decompose(host: InterfacedGraph, pattern: InterfacedGraph, match: Match,
              equivalence: LabelEquivalence = EXACT_LABELS) -> Optional[Decomposition]:
    """
    Split host around a convex match. Edges downstream of the image form C2,
    the rest C1; wires crossing from the C1 side to the C2 side become the
    k pass-through wires, in ascending vertex order.
    """
    v_i = tuple(match.vertex_map[v] for v in pattern.inputs)
    v_j = tuple(match.vertex_map[v] for v in pattern.outputs)
    image_edges = set(match.edge_map.values())
    image_vertices = match.image_vertices
    flow = flow_graph(host)
    downstream = _closure(flow, _image_nodes(match), True)
    e2 = {eid for eid in host.edges if eid not in image_edges and ('e', eid) in downstream}
    e1 = {eid for eid in host.edges if eid not in image_edges and eid not in e2}

    produced_left = set(host.inputs)
    consumed_right = set(host.outputs)
    for eid in e1:
        produced_left.update(host.edges[eid].outputs)
    for eid in e2:
        consumed_right.update(host.edges[eid].inputs)
    v_k = tuple(sorted(v for v in host.vertices()
                       if v not in image_vertices and v in produced_left and v in consumed_right))

    c1 = InterfacedGraph.build({eid: host.edges[eid] for eid in e1}, host.inputs, v_k + v_i)
    c2 = InterfacedGraph.build({eid: host.edges[eid] for eid in e2}, v_k + v_j, host.outputs)
    decomposition = Decomposition(c1, c2, len(v_k), v_i, v_j)
    if certify(host, decomposition, pattern, equivalence) is None:
        return None
    logger.debug(f"decomposition: |C1|={len(e1)} |C2|={len(e2)} k={len(v_k)}")
    return decomposition


def recompose(decomposition: Decomposition, middle: InterfacedGraph) -> InterfacedGraph:
    inner = compose(stack(id_graph(decomposition.k), middle), decomposition.c2)
    return compose(decomposition.c1, inner)


def certify(host: InterfacedGraph, decomposition: Decomposition, pattern: InterfacedGraph,
            equivalence: LabelEquivalence = EXACT_LABELS) -> Optional[Isomorphism]:
    try:
        rebuilt = recompose(decomposition, pattern)
    except ShapeError as e:
        logger.warning(f"decomposition does not recompose: {e}")
        return None
    return find_isomorphism(host, rebuilt, equivalence)


def _replace(decomposition: Decomposition, replacement: InterfacedGraph
             ) -> Tuple[InterfacedGraph, Match]:
    middle, _, r_ren = stack_with_renaming(id_graph(decomposition.k), replacement)
    inner, mid_ren, _ = compose_with_renaming(middle, decomposition.c2)
    result, _, inner_ren = compose_with_renaming(decomposition.c1, inner)
    where_v = lambda v: inner_ren.vertices[mid_ren.vertices[r_ren.vertices[v]]]
    where_e = lambda e: inner_ren.edges[mid_ren.edges[r_ren.edges[e]]]
    inserted = Match({v: where_v(v) for v in replacement.vertices()},
                     {e: where_e(e) for e in replacement.edges})
    return result, inserted


Decomposer = Callable[[InterfacedGraph, InterfacedGraph, Match, LabelEquivalence],
                      Optional[Decomposition]]


def rewrite_graphs(host: InterfacedGraph, pattern: InterfacedGraph,
                   replacement: InterfacedGraph, occurrence: int = 1,
                   equivalence: LabelEquivalence = EXACT_LABELS,
                   decomposer: Decomposer = decompose) -> Optional[RewriteResult]:
    matches = find_matches(pattern, host, equivalence)
    if not 1 <= occurrence <= len(matches):
        logger.info(f"occurrence {occurrence} requested, {len(matches)} available")
        return None
    match = matches[occurrence - 1]
    decomposition = decomposer(host, pattern, match, equivalence)
    if decomposition is None:
        logger.warning(f"no certified decomposition for occurrence {occurrence}")
        return None
    certificate = certify(host, decomposition, pattern, equivalence)
    if certificate is None:
        logger.warning(f"decomposition for occurrence {occurrence} failed certification")
        return None
    graph, inserted = _replace(decomposition, replacement)
    if not (is_monogamous(graph) and is_acyclic(graph)):
        raise ShapeError(f"rewriting occurrence {occurrence} left the monogamous acyclic graphs")
    return RewriteResult(graph, certificate, decomposition, match, inserted)


def rewrite_once(host: InterfacedGraph, rule: Rule, reverse: bool = False, occurrence: int = 1,
                 equivalence: LabelEquivalence = EXACT_LABELS,
                 decomposer: Decomposer = decompose) -> Optional[RewriteResult]:
    """Apply rule (right-to-left when reverse) at the given 1-based occurrence."""
    pattern_term, replacement_term = rule.sides(reverse)
    result = rewrite_graphs(host, term_to_graph(pattern_term), term_to_graph(replacement_term),
                            occurrence, equivalence, decomposer)
    if result is not None:
        logger.info(f"rewrote with {'-' if reverse else ''}{rule.name} @{occurrence}")
    return result


def terms_iso(t1: Term, t2: Term,
              equivalence: LabelEquivalence = EXACT_LABELS) -> Optional[Isomorphism]:
    """Isomorphism of the two terms' graphs; terms of different types raise ShapeError."""
    if (t1.dom, t1.cod) != (t2.dom, t2.cod):
        raise ShapeError(f"cannot compare a {t1.dom}->{t1.cod} term with a {t2.dom}->{t2.cod} term")
    return find_isomorphism(term_to_graph(t1), term_to_graph(t2), equivalence)
