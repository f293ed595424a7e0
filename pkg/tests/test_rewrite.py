"""
Tests for matching, convexity and certified double-pushout rewriting
"""
import functools
import random
import time

import pytest

from aprop import Compose, Gen, Id, Stack, stack_all, term_to_graph
from errors import ShapeError
from hypergraph import (EXACT_LABELS, Edge, InterfacedGraph, find_isomorphism, graph_semantics,
                        is_acyclic, is_monogamous)
from rewrite import (Decomposition, Match, Rule, certify, decompose, find_matches, is_convex,
                     recompose, rewrite_graphs, rewrite_once, terms_iso)
from tensor import tensor_equiv
from theory import frobenius_spider_model
from helpers import planted_host

a = Gen('a', 1, 1)
m, u, n, v = Gen('m', 2, 1), Gen('u', 0, 1), Gen('n', 1, 2), Gen('v', 1, 0)

FROBENIUS_RULES = [
    Rule('assoc', Compose(Stack(m, Id(1)), m), Compose(Stack(Id(1), m), m)),
    Rule('unitL', Compose(Stack(u, Id(1)), m), Id(1)),
    Rule('unitR', Compose(Stack(Id(1), u), m), Id(1)),
    Rule('coassoc', Compose(n, Stack(n, Id(1))), Compose(n, Stack(Id(1), n))),
    Rule('counitL', Compose(n, Stack(v, Id(1))), Id(1)),
    Rule('counitR', Compose(n, Stack(Id(1), v)), Id(1)),
    Rule('frob', Compose(Stack(n, Id(1)), Stack(Id(1), m)),
         Compose(Stack(Id(1), n), Stack(m, Id(1)))),
]
SPIDERS = frobenius_spider_model()


def spider_value(g: InterfacedGraph):
    return graph_semantics(g, SPIDERS, SPIDERS.index_set, SPIDERS.semiring)


def random_instance(seed: int):
    rng = random.Random(seed)
    rule = rng.choice(FROBENIUS_RULES)
    reverse = rng.random() < 0.5
    pattern, replacement = rule.sides(reverse)
    host = term_to_graph(planted_host(rng, pattern))
    return host, term_to_graph(pattern), term_to_graph(replacement)


def drop_one_edge(host, pattern, match, equivalence):
    """A decomposer that loses an edge of the context."""
    good = decompose(host, pattern, match, equivalence)
    if good is None:
        return None
    if not good.c1.edges and not good.c2.edges:
        return good
    part = 'c1' if good.c1.edges else 'c2'
    context = getattr(good, part)
    edges = dict(context.edges)
    del edges[min(edges)]
    broken = InterfacedGraph.build(edges, context.inputs, context.outputs, context.vertices())
    return Decomposition(broken if part == 'c1' else good.c1, broken if part == 'c2' else good.c2,
                         good.k, good.v_i, good.v_j)


class TestMatching:

    def test_matches_are_ordered(self):
        host = term_to_graph(Compose(Compose(a, a), a))
        found = find_matches(term_to_graph(a), host)
        assert [match.image_edges for match in found] == [(1,), (2,), (3,)]

    def test_non_convex_occurrence_rejected(self):
        host = term_to_graph(Compose(Compose(a, a), a))
        pattern = term_to_graph(Stack(a, a))
        assert find_matches(pattern, host) == []

    def test_is_convex(self):
        host = term_to_graph(Compose(Compose(a, a), a))
        ends = Match({1: 1, 2: 2, 3: 4, 4: 6}, {1: 1, 2: 3})
        middle = Match({1: 2, 2: 4}, {1: 2})
        assert not is_convex(host, ends)
        assert is_convex(host, middle)

    def test_identity_pattern_matches_every_wire(self):
        host = term_to_graph(Compose(n, m))
        found = find_matches(term_to_graph(Id(1)), host)
        assert len(found) == len(host.vertices())

    def test_limit(self):
        host = term_to_graph(Compose(Compose(a, a), a))
        assert len(find_matches(term_to_graph(a), host, limit=2)) == 2

    def test_limit_keeps_the_first_matches_in_order(self):
        host = term_to_graph(Stack(Compose(a, a), Compose(a, a)))
        pattern = term_to_graph(Id(2))
        everything = find_matches(pattern, host, limit=1000)
        assert everything == sorted(everything, key=Match.sort_key)
        assert all(is_convex(host, match) for match in everything)
        assert find_matches(pattern, host, limit=3) == everything[:3]

    def test_wire_pattern_in_a_large_host(self):
        chain = functools.reduce(Compose, [a] * 16)
        host = term_to_graph(stack_all([chain, chain, chain]))
        started = time.perf_counter()
        found = find_matches(term_to_graph(Id(3)), host, limit=20)
        assert time.perf_counter() - started < 2.0
        assert len(found) == 20
        assert found == sorted(found, key=Match.sort_key)
        assert all(is_convex(host, match) for match in found)


class TestDecomposition:

    @pytest.mark.parametrize('seed', range(20))
    def test_certificate_rebuilds_host(self, seed):
        host, pattern, _ = random_instance(seed)
        match = find_matches(pattern, host)[0]
        decomposition = decompose(host, pattern, match)
        assert decomposition is not None
        rebuilt = recompose(decomposition, pattern)
        iso = find_isomorphism(host, rebuilt)
        assert iso is not None and iso.verify(host, rebuilt)
        assert decomposition.c1.arity[1] == decomposition.k + len(pattern.inputs)
        assert decomposition.c2.arity[0] == decomposition.k + len(pattern.outputs)


class TestRewriting:

    @pytest.mark.parametrize('seed', range(100))
    def test_rewrite_then_rewrite_back(self, seed):
        host, pattern, replacement = random_instance(seed)
        forward = rewrite_graphs(host, pattern, replacement)
        assert forward is not None
        assert is_monogamous(forward.graph) and is_acyclic(forward.graph)

        occurrences = find_matches(replacement, forward.graph)
        assert forward.inserted in occurrences
        back = rewrite_graphs(forward.graph, replacement, pattern,
                              occurrences.index(forward.inserted) + 1)
        assert back is not None
        assert is_monogamous(back.graph) and is_acyclic(back.graph)
        assert find_isomorphism(back.graph, host) is not None

    @pytest.mark.parametrize('seed', range(30))
    def test_rewriting_preserves_meaning_in_a_model(self, seed):
        host, pattern, replacement = random_instance(seed)
        result = rewrite_graphs(host, pattern, replacement)
        assert tensor_equiv(spider_value(result.graph), spider_value(host))

    @pytest.mark.parametrize('seed', range(100))
    def test_corrupted_decomposer_is_caught(self, seed):
        host, pattern, replacement = random_instance(seed)
        match = find_matches(pattern, host)[0]
        good = decompose(host, pattern, match)
        if not (good.c1.edges or good.c2.edges):
            pytest.skip("the occurrence has no context edge to drop")
        broken = drop_one_edge(host, pattern, match, EXACT_LABELS)
        assert certify(host, good, pattern) is not None
        assert certify(host, broken, pattern) is None
        assert rewrite_graphs(host, pattern, replacement, decomposer=drop_one_edge) is None

    def test_missing_occurrence(self):
        host = term_to_graph(Compose(Stack(u, Id(1)), m))
        assert rewrite_once(host, FROBENIUS_RULES[1], occurrence=2) is None
        assert rewrite_once(host, FROBENIUS_RULES[0]) is None

    def test_unit_law(self):
        host = term_to_graph(Compose(Stack(u, Id(1)), m))
        result = rewrite_once(host, FROBENIUS_RULES[1])
        assert find_isomorphism(result.graph, term_to_graph(Id(1))) is not None
        assert result.match.image_edges == (1, 2)

    def test_reverse_direction(self):
        host = term_to_graph(Compose(Stack(Id(1), m), m))
        result = rewrite_once(host, FROBENIUS_RULES[0], reverse=True)
        expected = term_to_graph(Compose(Stack(m, Id(1)), m))
        assert find_isomorphism(result.graph, expected) is not None

    def test_terms_iso(self):
        assert terms_iso(Compose(Id(2), m), m) is not None
        assert terms_iso(FROBENIUS_RULES[0].lhs, FROBENIUS_RULES[0].rhs) is None

    def test_terms_iso_rejects_different_types(self):
        with pytest.raises(ShapeError):
            terms_iso(m, n)

    def test_replacement_outside_the_fragment_is_refused(self):
        host = term_to_graph(Compose(Stack(u, Id(1)), m))
        pattern = term_to_graph(FROBENIUS_RULES[1].lhs)
        loop = InterfacedGraph.build({1: Edge('a', (1,), (1,))}, [1], [1])
        with pytest.raises(ShapeError):
            rewrite_graphs(host, pattern, loop)
