"""
Interfaced hypergraphs: the combinatorial form of string diagrams.

Vertices stand for wires, hyperedges for generator boxes. An interfaced
graph carries an ordered list of input and output vertices; repetition in
the interface is allowed, which is how cups, caps and shared wires appear.
"""
import itertools
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Hashable, Iterator, List, Mapping, Optional, Tuple

import networkx as nx
import numpy as np

from errors import InterpretationError, ShapeError
from tensor import IndexSet, Semiring, Tensor, contract_network

logger = logging.getLogger(__name__)

VertexId = int
EdgeId = int


@dataclass(frozen=True)
class Edge:
    label: Hashable
    inputs: Tuple[VertexId, ...]
    outputs: Tuple[VertexId, ...]

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.inputs), len(self.outputs)

    @property
    def endpoints(self) -> Tuple[VertexId, ...]:
        return self.inputs + self.outputs


@dataclass(frozen=True, eq=False)
class Hypergraph:
    edges: Mapping[EdgeId, Edge] = field(default_factory=dict)
    hypervertices: FrozenSet[VertexId] = frozenset()

    def incident_vertices(self) -> set:
        return {v for e in self.edges.values() for v in e.endpoints}

    def vertices(self) -> FrozenSet[VertexId]:
        return frozenset(self.incident_vertices() | set(self.hypervertices))


@dataclass(frozen=True, eq=False)
class InterfacedGraph:
    graph: Hypergraph
    inputs: Tuple[VertexId, ...]
    outputs: Tuple[VertexId, ...]

    @classmethod
    def build(cls, edges: Mapping[EdgeId, Edge], inputs, outputs,
              extra_vertices=()) -> 'InterfacedGraph':
        """Assemble a graph, registering interface-only vertices as hypervertices."""
        edges = dict(edges)
        inputs, outputs, extra_vertices = tuple(inputs), tuple(outputs), tuple(extra_vertices)
        incident = {v for e in edges.values() for v in e.endpoints}
        loose = (set(inputs) | set(outputs) | set(extra_vertices)) - incident
        return cls(Hypergraph(edges, frozenset(loose)), inputs, outputs)

    @property
    def edges(self) -> Mapping[EdgeId, Edge]:
        return self.graph.edges

    @property
    def arity(self) -> Tuple[int, int]:
        return len(self.inputs), len(self.outputs)

    def vertices(self) -> FrozenSet[VertexId]:
        return self.graph.vertices()

    def isolated_vertices(self) -> FrozenSet[VertexId]:
        """Vertices touching neither an edge nor the interface."""
        interface = set(self.inputs) | set(self.outputs)
        return frozenset(v for v in self.graph.hypervertices if v not in interface)

    def __repr__(self):
        return (f"InterfacedGraph({len(self.inputs)}->{len(self.outputs)}, "
                f"{len(self.edges)} edges, {len(self.vertices())} vertices)")


def vertices(g: InterfacedGraph) -> FrozenSet[VertexId]:
    return g.vertices()


@dataclass(frozen=True)
class Renaming:
    vertices: Dict[VertexId, VertexId]
    edges: Dict[EdgeId, EdgeId]


def relabel(g: InterfacedGraph, vertex_map: Mapping[VertexId, VertexId],
            edge_map: Mapping[EdgeId, EdgeId] = None) -> InterfacedGraph:
    """Rename ids; vertex_map must be injective on vertices(g), edge_map on edge ids."""
    edge_map = edge_map or {eid: eid for eid in g.edges}
    vm = lambda v: vertex_map.get(v, v)
    edges = {edge_map[eid]: Edge(e.label, tuple(map(vm, e.inputs)), tuple(map(vm, e.outputs)))
             for eid, e in g.edges.items()}
    return InterfacedGraph.build(edges, map(vm, g.inputs), map(vm, g.outputs),
                                 map(vm, g.graph.hypervertices))


def freshen(g: InterfacedGraph, reserved_vertices=frozenset(),
            reserved_edges=frozenset()) -> Tuple[InterfacedGraph, Renaming]:
    """Rename the ids of g that clash with the reserved ones, in ascending order."""
    own_v, own_e = g.vertices(), set(g.edges)
    next_v = max(set(reserved_vertices) | own_v, default=0) + 1
    next_e = max(set(reserved_edges) | own_e, default=0) + 1
    vmap, emap = {}, {}
    for v in sorted(own_v):
        if v in reserved_vertices:
            vmap[v], next_v = next_v, next_v + 1
        else:
            vmap[v] = v
    for eid in sorted(own_e):
        if eid in reserved_edges:
            emap[eid], next_e = next_e, next_e + 1
        else:
            emap[eid] = eid
    return relabel(g, vmap, emap), Renaming(vmap, emap)


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def compose_with_renaming(g: InterfacedGraph, h: InterfacedGraph
                          ) -> Tuple[InterfacedGraph, Renaming, Renaming]:
    """
    Glue g's outputs to h's inputs pointwise.

    Returns the composite and where each operand's ids went. Every glued
    class is represented by its smallest vertex from g.
    """
    if len(g.outputs) != len(h.inputs):
        raise ShapeError(f"cannot compose {g.arity[0]}->{g.arity[1]} with "
                         f"{h.arity[0]}->{h.arity[1]}")
    h_fresh, h_ren = freshen(h, g.vertices(), set(g.edges))
    uf = _UnionFind()
    for a, b in zip(g.outputs, h_fresh.inputs):
        uf.union(a, b)
    left_vertices = g.vertices()
    rep = {}
    for v in sorted(left_vertices | h_fresh.vertices()):
        root = uf.find(v)
        if v in left_vertices and (root not in rep or v < rep[root]):
            rep[root] = v
    sub = lambda v: rep.get(uf.find(v), v)

    edges = {}
    for eid, e in itertools.chain(g.edges.items(), h_fresh.edges.items()):
        edges[eid] = Edge(e.label, tuple(map(sub, e.inputs)), tuple(map(sub, e.outputs)))
    extra = [sub(v) for v in itertools.chain(g.graph.hypervertices, h_fresh.graph.hypervertices)]
    result = InterfacedGraph.build(edges, map(sub, g.inputs), map(sub, h_fresh.outputs), extra)
    left = Renaming({v: sub(v) for v in left_vertices}, {eid: eid for eid in g.edges})
    right = Renaming({v: sub(h_ren.vertices[v]) for v in h.vertices()}, dict(h_ren.edges))
    return result, left, right


def compose(g: InterfacedGraph, h: InterfacedGraph) -> InterfacedGraph:
    return compose_with_renaming(g, h)[0]


def stack_with_renaming(g: InterfacedGraph, h: InterfacedGraph
                        ) -> Tuple[InterfacedGraph, Renaming, Renaming]:
    h_fresh, h_ren = freshen(h, g.vertices(), set(g.edges))
    edges = dict(g.edges)
    edges.update(h_fresh.edges)
    result = InterfacedGraph.build(edges, g.inputs + h_fresh.inputs, g.outputs + h_fresh.outputs,
                                   set(g.graph.hypervertices) | set(h_fresh.graph.hypervertices))
    left = Renaming({v: v for v in g.vertices()}, {eid: eid for eid in g.edges})
    return result, left, h_ren


def stack(g: InterfacedGraph, h: InterfacedGraph) -> InterfacedGraph:
    return stack_with_renaming(g, h)[0]


# -- elementary graphs -----------------------------------------------------

def id_graph(n: int) -> InterfacedGraph:
    wires = tuple(range(1, n + 1))
    return InterfacedGraph.build({}, wires, wires)


def swap_graph(n: int, m: int) -> InterfacedGraph:
    xs = tuple(range(1, n + 1))
    ys = tuple(range(n + 1, n + m + 1))
    return InterfacedGraph.build({}, xs + ys, ys + xs)


def cup_graph(n: int) -> InterfacedGraph:
    xs = tuple(range(1, n + 1))
    return InterfacedGraph.build({}, (), xs + xs)


def cap_graph(n: int) -> InterfacedGraph:
    xs = tuple(range(1, n + 1))
    return InterfacedGraph.build({}, xs + xs, ())


def generator_graph(label: Hashable, n_in: int, n_out: int) -> InterfacedGraph:
    ins = tuple(range(1, n_in + 1))
    outs = tuple(range(n_in + 1, n_in + n_out + 1))
    return InterfacedGraph.build({1: Edge(label, ins, outs)}, ins, outs)


# -- semantics --------------------------------------------------------------

def graph_semantics(g: InterfacedGraph, interp, index_set: IndexSet,
                    semiring: Semiring) -> Tensor:
    """Sum over all vertex labellings of the product of edge entries."""
    factors = []
    for eid in sorted(g.edges):
        e = g.edges[eid]
        t = interp(e.label).at(len(e.inputs), len(e.outputs))
        if t.index_set != index_set or t.semiring != semiring:
            raise InterpretationError(f"tensor for {e.label!r} lives over "
                                      f"{t.semiring.name}/d={t.index_set.size}")
        factors.append((t.data, e.inputs + e.outputs))
    for v in sorted(g.isolated_vertices()):
        factors.append((np.full(index_set.size, semiring.one, dtype=semiring.dtype), (v,)))
    data = contract_network(factors, g.inputs + g.outputs, index_set, semiring)
    return Tensor(len(g.inputs), len(g.outputs), data, index_set, semiring)


# -- label equivalence ------------------------------------------------------

class LabelEquivalence:
    """Equivalence on edge labels used by matching and isomorphism."""
    exact = True

    def equivalent(self, a, b) -> bool:
        return a == b

    def __call__(self, a, b) -> bool:
        return self.equivalent(a, b)


EXACT_LABELS = LabelEquivalence()


# -- isomorphism and matching -----------------------------------------------

@dataclass(frozen=True)
class Isomorphism:
    vertex_map: Dict[VertexId, VertexId]
    edge_map: Dict[EdgeId, EdgeId]

    def verify(self, g: InterfacedGraph, h: InterfacedGraph,
               equivalence: LabelEquivalence = EXACT_LABELS) -> bool:
        f = self.vertex_map
        if set(f) != set(g.vertices()) or set(f.values()) != set(h.vertices()):
            return False
        if len(set(f.values())) != len(f) or sorted(self.edge_map.values()) != sorted(h.edges):
            return False
        if set(self.edge_map) != set(g.edges):
            return False
        if tuple(f[v] for v in g.inputs) != h.inputs or tuple(f[v] for v in g.outputs) != h.outputs:
            return False
        for eid, e in g.edges.items():
            target = h.edges[self.edge_map[eid]]
            if not equivalence(e.label, target.label):
                return False
            if tuple(f[v] for v in e.inputs) != target.inputs:
                return False
            if tuple(f[v] for v in e.outputs) != target.outputs:
                return False
        return True

    def inverse(self) -> 'Isomorphism':
        return Isomorphism({b: a for a, b in self.vertex_map.items()},
                           {b: a for a, b in self.edge_map.items()})

    def then(self, other: 'Isomorphism') -> 'Isomorphism':
        return Isomorphism({a: other.vertex_map[b] for a, b in self.vertex_map.items()},
                           {a: other.edge_map[b] for a, b in self.edge_map.items()})


class EmbeddingSearch:
    """
    Backtracking search for label-respecting, injective maps of a pattern
    graph into a host graph. Edges are extended along already-mapped
    vertices; candidates are always tried in ascending host id order.

    admissible, when given, is asked about partial maps once every pattern
    edge is placed and again after each interface-only vertex; it must be
    monotone (a rejected partial map has no accepted extension).
    """

    def __init__(self, pattern: InterfacedGraph, host: InterfacedGraph,
                 equivalence: LabelEquivalence = EXACT_LABELS,
                 pinned: Mapping[VertexId, VertexId] = None,
                 admissible: Callable[[Dict, Dict], bool] = None):
        self.pattern = pattern
        self.host = host
        self.equivalence = equivalence
        self.pinned = dict(pinned or {})
        self.admissible = admissible
        self.consumers = defaultdict(list)
        self.producers = defaultdict(list)
        self.by_shape = defaultdict(list)
        for eid in sorted(host.edges):
            e = host.edges[eid]
            self.by_shape[e.shape].append(eid)
            for port, v in enumerate(e.inputs):
                self.consumers[v].append((eid, port))
            for port, v in enumerate(e.outputs):
                self.producers[v].append((eid, port))
        self.order = self._edge_order()

    def _edge_order(self) -> List[EdgeId]:
        known = set(self.pinned)
        remaining = sorted(self.pattern.edges)
        order = []
        while remaining:
            best = max(remaining, key=lambda eid: (
                sum(v in known for v in self.pattern.edges[eid].endpoints), -eid))
            order.append(best)
            remaining.remove(best)
            known.update(self.pattern.edges[best].endpoints)
        return order

    def _candidates(self, pe: Edge, vmap) -> List[EdgeId]:
        for port, v in enumerate(pe.inputs):
            if v in vmap:
                return [eid for eid, p in self.consumers[vmap[v]] if p == port]
        for port, v in enumerate(pe.outputs):
            if v in vmap:
                return [eid for eid, p in self.producers[vmap[v]] if p == port]
        return self.by_shape[pe.shape]

    def embeddings(self, bijective: bool = False,
                   per_edge_map: Optional[int] = None) -> Iterator[Isomorphism]:
        """
        Yield embeddings. For a fixed edge map the placements of interface-only
        pattern vertices come in ascending order of their host ids, at most
        per_edge_map of them.
        """
        vmap = dict(self.pinned)
        used_v = set(vmap.values())
        if len(used_v) != len(vmap):
            return
        emap: Dict[EdgeId, EdgeId] = {}
        used_e = set()
        yield from self._extend(0, vmap, used_v, emap, used_e, bijective, per_edge_map)

    def _extend(self, k, vmap, used_v, emap, used_e, bijective, per_edge_map):
        if k == len(self.order):
            placements = self._place_loose_vertices(vmap, used_v, emap, bijective)
            yield from itertools.islice(placements, per_edge_map)
            return
        pid = self.order[k]
        pe = self.pattern.edges[pid]
        for hid in self._candidates(pe, vmap):
            if hid in used_e:
                continue
            he = self.host.edges[hid]
            if he.shape != pe.shape or not self.equivalence(pe.label, he.label):
                continue
            added = []
            ok = True
            for pv, hv in zip(pe.endpoints, he.endpoints):
                if pv in vmap:
                    if vmap[pv] != hv:
                        ok = False
                        break
                elif hv in used_v:
                    ok = False
                    break
                else:
                    vmap[pv] = hv
                    used_v.add(hv)
                    added.append(pv)
            if ok:
                emap[pid] = hid
                used_e.add(hid)
                yield from self._extend(k + 1, vmap, used_v, emap, used_e, bijective, per_edge_map)
                del emap[pid]
                used_e.discard(hid)
            for pv in added:
                used_v.discard(vmap.pop(pv))

    def _place_loose_vertices(self, vmap, used_v, emap, bijective):
        loose = sorted(v for v in self.pattern.vertices() if v not in vmap)
        free = sorted(v for v in self.host.vertices() if v not in used_v)
        if bijective:
            if len(loose) == len(free):
                full = dict(vmap)
                full.update(zip(loose, free))
                yield Isomorphism(full, dict(emap))
            return
        if len(loose) > len(free) or not self._admits(vmap, emap):
            return
        yield from self._place(loose, 0, free, dict(vmap), set(used_v), emap)

    def _place(self, loose, i, free, vmap, used_v, emap):
        if i == len(loose):
            yield Isomorphism(dict(vmap), dict(emap))
            return
        pv = loose[i]
        for hv in free:
            if hv in used_v:
                continue
            vmap[pv] = hv
            used_v.add(hv)
            if self._admits(vmap, emap):
                yield from self._place(loose, i + 1, free, vmap, used_v, emap)
            del vmap[pv]
            used_v.discard(hv)

    def _admits(self, vmap, emap) -> bool:
        return self.admissible is None or self.admissible(vmap, emap)


def _shape_profile(g: InterfacedGraph) -> Counter:
    return Counter(e.shape for e in g.edges.values())


def find_isomorphism(g: InterfacedGraph, h: InterfacedGraph,
                     equivalence: LabelEquivalence = EXACT_LABELS) -> Optional[Isomorphism]:
    """Interface-preserving isomorphism g -> h, or None."""
    if g.arity != h.arity or len(g.edges) != len(h.edges):
        return None
    if len(g.vertices()) != len(h.vertices()) or _shape_profile(g) != _shape_profile(h):
        return None
    if equivalence.exact and Counter(e.label for e in g.edges.values()) != \
            Counter(e.label for e in h.edges.values()):
        return None
    pinned = {}
    for gv, hv in zip(g.inputs + g.outputs, h.inputs + h.outputs):
        if pinned.setdefault(gv, hv) != hv:
            return None
    search = EmbeddingSearch(g, h, equivalence, pinned)
    return next(search.embeddings(bijective=True), None)


# -- structural predicates --------------------------------------------------

def degree_profile(g: InterfacedGraph) -> Tuple[Counter, Counter]:
    """Producer and consumer counts per vertex, interface included."""
    produced, consumed = Counter(), Counter()
    for e in g.edges.values():
        produced.update(e.outputs)
        consumed.update(e.inputs)
    produced.update(g.inputs)
    consumed.update(g.outputs)
    return produced, consumed


def is_monogamous(g: InterfacedGraph) -> bool:
    produced, consumed = degree_profile(g)
    return all(produced[v] == 1 and consumed[v] == 1 for v in g.vertices())


def precedence_graph(g: InterfacedGraph) -> nx.DiGraph:
    """Edge e1 -> e2 whenever an output vertex of e1 is an input vertex of e2."""
    dag = nx.DiGraph()
    dag.add_nodes_from(g.edges)
    readers = defaultdict(set)
    for eid, e in g.edges.items():
        for v in e.inputs:
            readers[v].add(eid)
    for eid, e in g.edges.items():
        for v in e.outputs:
            for target in readers[v]:
                dag.add_edge(eid, target)
    return dag


def flow_graph(g: InterfacedGraph) -> nx.DiGraph:
    """Bipartite flow over ('e', id) and ('v', id) nodes."""
    flow = nx.DiGraph()
    flow.add_nodes_from(('v', v) for v in g.vertices())
    for eid, e in g.edges.items():
        flow.add_node(('e', eid))
        for v in e.inputs:
            flow.add_edge(('v', v), ('e', eid))
        for v in e.outputs:
            flow.add_edge(('e', eid), ('v', v))
    return flow


def is_acyclic(g: InterfacedGraph) -> bool:
    return nx.is_directed_acyclic_graph(precedence_graph(g))


# -- dumps ------------------------------------------------------------------

def to_json_dict(g: InterfacedGraph) -> dict:
    return {
        'edges': {str(eid): {'label': str(e.label), 'inputs': list(e.inputs),
                             'outputs': list(e.outputs)}
                  for eid, e in sorted(g.edges.items())},
        'extra_vertices': sorted(g.graph.hypervertices),
        'inputs': list(g.inputs),
        'outputs': list(g.outputs),
    }


def from_json_dict(data: dict) -> InterfacedGraph:
    edges = {int(eid): Edge(e['label'], tuple(e['inputs']), tuple(e['outputs']))
             for eid, e in data.get('edges', {}).items()}
    return InterfacedGraph.build(edges, data.get('inputs', []), data.get('outputs', []),
                                 data.get('extra_vertices', []))


def to_dot(g: InterfacedGraph, name: str = 'diagram') -> str:
    lines = [f'digraph "{name}" {{', '  rankdir=LR;']
    for v in sorted(g.vertices()):
        lines.append(f'  v{v} [shape=point, xlabel="{v}"];')
    for k, v in enumerate(g.inputs):
        lines.append(f'  in{k} [shape=plaintext, label="in {k}"];')
        lines.append(f'  in{k} -> v{v};')
    for k, v in enumerate(g.outputs):
        lines.append(f'  out{k} [shape=plaintext, label="out {k}"];')
        lines.append(f'  v{v} -> out{k};')
    for eid, e in sorted(g.edges.items()):
        lines.append(f'  e{eid} [shape=box, label="{e.label}"];')
        for port, v in enumerate(e.inputs):
            lines.append(f'  v{v} -> e{eid} [headlabel="{port}"];')
        for port, v in enumerate(e.outputs):
            lines.append(f'  e{eid} -> v{v} [taillabel="{port}"];')
    lines.append('}')
    return '\n'.join(lines) + '\n'
