"""
Seeded generators of random terms and graphs shared by the test modules
"""
import random
from typing import Sequence, Tuple

from aprop import Cap, Compose, Cup, Gen, Id, Swap, Term, stack_all
from hypergraph import Edge, InterfacedGraph, relabel
from theory import GeneratorDecl, Signature

TEST_GENERATORS: Tuple[Tuple[str, int, int], ...] = (
    ('a', 1, 1), ('b', 2, 1), ('c', 1, 2), ('d', 0, 1), ('e', 1, 0), ('f', 2, 2),
)
FROBENIUS_GENERATORS: Tuple[Tuple[str, int, int], ...] = (
    ('m', 2, 1), ('u', 0, 1), ('n', 1, 2), ('v', 1, 0),
)


def make_signature(generators: Sequence[Tuple[str, int, int]] = TEST_GENERATORS) -> Signature:
    return Signature(GeneratorDecl(name, n_in, n_out) for name, n_in, n_out in generators)


def random_layer(rng: random.Random, width: int, generators=TEST_GENERATORS,
                 cups: bool = False, max_width: int = 4) -> Term:
    """One generator, swap, cup or cap placed somewhere among width wires."""
    roll = rng.random()
    if cups and roll < 0.1 and width + 2 <= max_width:
        k = rng.randint(0, width)
        return stack_all([Id(k), Cup(1), Id(width - k)])
    if cups and roll < 0.2 and width >= 2:
        k = rng.randint(0, width - 2)
        return stack_all([Id(k), Cap(1), Id(width - k - 2)])
    if roll < 0.35 and width >= 2:
        n = rng.randint(1, width - 1)
        m = rng.randint(1, width - n)
        k = rng.randint(0, width - n - m)
        return stack_all([Id(k), Swap(n, m), Id(width - k - n - m)])
    options = [g for g in generators
               if g[1] <= width and width - g[1] + g[2] <= max_width]
    if not options:
        options = [g for g in generators if 1 <= g[1] <= width and g[2] <= g[1]]
    name, n_in, n_out = rng.choice(options)
    k = rng.randint(0, width - n_in)
    return stack_all([Id(k), Gen(name, n_in, n_out), Id(width - k - n_in)])


def random_term(rng: random.Random, n_layers: int, width: int = None,
                generators=TEST_GENERATORS, cups: bool = False, max_width: int = 4) -> Term:
    """A random composite of n_layers layers, nested as a random binary tree."""
    if width is None:
        width = rng.randint(0, 2)
    if n_layers <= 0:
        return Id(width)
    if n_layers == 1:
        return random_layer(rng, width, generators, cups, max_width)
    split = rng.randint(1, n_layers - 1)
    first = random_term(rng, split, width, generators, cups, max_width)
    second = random_term(rng, n_layers - split, first.cod, generators, cups, max_width)
    return Compose(first, second)


def random_graph(rng: random.Random, n_in: int, n_out: int, n_edges: int = 3,
                 n_vertices: int = 5, generators=TEST_GENERATORS) -> InterfacedGraph:
    """An arbitrary (usually not monogamous) graph with repeated and isolated vertices."""
    pool = list(range(1, n_vertices + 1))
    edges = {}
    for eid in range(1, n_edges + 1):
        name, a, b = rng.choice(generators)
        edges[eid] = Edge(name, tuple(rng.choice(pool) for _ in range(a)),
                          tuple(rng.choice(pool) for _ in range(b)))
    return InterfacedGraph.build(edges, [rng.choice(pool) for _ in range(n_in)],
                                 [rng.choice(pool) for _ in range(n_out)], pool)


def shuffled_copy(rng: random.Random, g: InterfacedGraph, offset: int = 1000) -> InterfacedGraph:
    """The same graph under random vertex and edge ids."""
    vertex_ids = sorted(g.vertices())
    targets = [offset + k for k in range(len(vertex_ids))]
    rng.shuffle(targets)
    edge_ids = sorted(g.edges)
    edge_targets = [offset + k for k in range(len(edge_ids))]
    rng.shuffle(edge_targets)
    return relabel(g, dict(zip(vertex_ids, targets)), dict(zip(edge_ids, edge_targets)))


def planted_host(rng: random.Random, pattern: Term, generators=FROBENIUS_GENERATORS) -> Term:
    """
    prefix ; (id * pattern * id) ; suffix, where the prefix always starts
    with a 'u' box so the part before the pattern is never empty.
    """
    body = random_term(rng, rng.randint(0, 3), rng.randint(0, 2), generators)
    prefix = Compose(stack_all([Gen('u', 0, 1), Id(body.dom)]), stack_all([Id(1), body]))
    width = prefix.cod
    if width < pattern.dom:
        prefix = stack_all([prefix, Id(pattern.dom - width)])
        width = pattern.dom
    k = rng.randint(0, width - pattern.dom)
    planted = stack_all([Id(k), pattern, Id(width - k - pattern.dom)])
    suffix = random_term(rng, rng.randint(0, 3), planted.cod, generators)
    return Compose(Compose(prefix, planted), suffix)