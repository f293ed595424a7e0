"""
Terms of the free symmetric monoidal category over a signature, with
optional cups and caps, and the translations between terms and graphs.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Hashable, Iterator, List, Optional, Sequence, Tuple

from errors import GeneratorArityError, ShapeError, UnknownGeneratorError
from hypergraph import (InterfacedGraph, cap_graph, compose, cup_graph, generator_graph,
                        id_graph, is_acyclic, is_monogamous, stack, swap_graph)
from tensor import (IndexSet, Semiring, Tensor, cap_tensor, contract, cup_tensor,
                    identity_tensor, swap_tensor, tensor_product)

logger = logging.getLogger(__name__)


class Term:
    """Base class; every term knows its domain and codomain."""

    @property
    def dom(self) -> int:
        raise NotImplementedError

    @property
    def cod(self) -> int:
        raise NotImplementedError

    def children(self) -> Tuple['Term', ...]:
        return ()

    def __str__(self):
        return to_source(self)


@dataclass(frozen=True)
class Id(Term):
    n: int

    @property
    def dom(self):
        return self.n

    @property
    def cod(self):
        return self.n


@dataclass(frozen=True)
class Swap(Term):
    n: int
    m: int

    @property
    def dom(self):
        return self.n + self.m

    @property
    def cod(self):
        return self.n + self.m


@dataclass(frozen=True)
class Cup(Term):
    n: int

    @property
    def dom(self):
        return 0

    @property
    def cod(self):
        return 2 * self.n


@dataclass(frozen=True)
class Cap(Term):
    n: int

    @property
    def dom(self):
        return 2 * self.n

    @property
    def cod(self):
        return 0


@dataclass(frozen=True)
class Gen(Term):
    label: Hashable
    n_in: int
    n_out: int

    @property
    def dom(self):
        return self.n_in

    @property
    def cod(self):
        return self.n_out


@dataclass(frozen=True)
class Compose(Term):
    first: Term
    second: Term

    def __post_init__(self):
        if self.first.cod != self.second.dom:
            raise ShapeError(f"cannot compose a term with codomain {self.first.cod} "
                             f"with a term of domain {self.second.dom}")

    @property
    def dom(self):
        return self.first.dom

    @property
    def cod(self):
        return self.second.cod

    def children(self):
        return self.first, self.second


@dataclass(frozen=True)
class Stack(Term):
    top: Term
    bottom: Term

    @property
    def dom(self):
        return self.top.dom + self.bottom.dom

    @property
    def cod(self):
        return self.top.cod + self.bottom.cod

    def children(self):
        return self.top, self.bottom


def subterms(t: Term, position: Tuple[int, ...] = ()) -> Iterator[Tuple[Tuple[int, ...], Term]]:
    yield position, t
    for k, child in enumerate(t.children()):
        yield from subterms(child, position + (k,))


def is_cup_cap_free(t: Term) -> bool:
    return not any(isinstance(s, (Cup, Cap)) for _, s in subterms(t))


def term_size(t: Term) -> int:
    return sum(1 for _, s in subterms(t) if isinstance(s, Gen))


def typecheck(t: Term, signature) -> None:
    """Raise a TermTypeError naming the position of the first bad generator."""
    for position, s in subterms(t):
        if not isinstance(s, Gen):
            continue
        arity = signature.arity(s.label)
        if arity is None:
            raise UnknownGeneratorError(f"unknown generator {s.label!r} at {position}", position)
        if arity != (s.n_in, s.n_out):
            raise GeneratorArityError(
                f"generator {s.label!r} at {position} used as {s.n_in}->{s.n_out}, "
                f"declared {arity[0]}->{arity[1]}", position)


def term_semantics(t: Term, interp, index_set: IndexSet, semiring: Semiring) -> Tensor:
    if isinstance(t, Id):
        return identity_tensor(t.n, index_set, semiring)
    if isinstance(t, Swap):
        return swap_tensor(t.n, t.m, index_set, semiring)
    if isinstance(t, Cup):
        return cup_tensor(t.n, index_set, semiring)
    if isinstance(t, Cap):
        return cap_tensor(t.n, index_set, semiring)
    if isinstance(t, Gen):
        return interp(t.label).at(t.n_in, t.n_out)
    if isinstance(t, Compose):
        return contract(term_semantics(t.first, interp, index_set, semiring),
                        term_semantics(t.second, interp, index_set, semiring))
    if isinstance(t, Stack):
        return tensor_product(term_semantics(t.top, interp, index_set, semiring),
                              term_semantics(t.bottom, interp, index_set, semiring))
    raise TypeError(f"not a term: {t!r}")


def term_to_graph(t: Term) -> InterfacedGraph:
    if isinstance(t, Id):
        return id_graph(t.n)
    if isinstance(t, Swap):
        return swap_graph(t.n, t.m)
    if isinstance(t, Cup):
        return cup_graph(t.n)
    if isinstance(t, Cap):
        return cap_graph(t.n)
    if isinstance(t, Gen):
        return generator_graph(t.label, t.n_in, t.n_out)
    if isinstance(t, Compose):
        return compose(term_to_graph(t.first), term_to_graph(t.second))
    if isinstance(t, Stack):
        return stack(term_to_graph(t.top), term_to_graph(t.bottom))
    raise TypeError(f"not a term: {t!r}")


# -- building terms -----------------------------------------------------------

def stack_all(parts: Sequence[Term]) -> Term:
    parts = [p for p in parts if p != Id(0)]
    if not parts:
        return Id(0)
    result = parts[0]
    for p in parts[1:]:
        result = Stack(result, p)
    return result


def compose_all(parts: Sequence[Term], width: int) -> Term:
    if not parts:
        return Id(width)
    result = parts[0]
    for p in parts[1:]:
        result = Compose(result, p)
    return result


def _transposition(k: int, n: int) -> Term:
    return stack_all([Id(k), Swap(1, 1), Id(n - k - 2)])


def permutation_term(p: Sequence[int]) -> Term:
    """
    Term whose output k carries input p[k] (1-based), built from adjacent
    transpositions by bubble sort.
    """
    n = len(p)
    if sorted(p) != list(range(1, n + 1)):
        raise ValueError(f"not a permutation: {list(p)}")
    current = list(range(1, n + 1))
    layers = []
    for i in range(n):
        j = current.index(p[i])
        while j > i:
            current[j - 1], current[j] = current[j], current[j - 1]
            layers.append(_transposition(j - 1, n))
            j -= 1
    return compose_all(layers, n)


def _arrangement(source: Sequence, target: Sequence) -> Term:
    return permutation_term([source.index(v) + 1 for v in target])


def graph_to_term(g: InterfacedGraph) -> Optional[Term]:
    """
    Read a cup/cap-free term off a monogamous acyclic graph, one edge at a
    time: the smallest ready edge id is fired next, anchored at the leftmost
    of its input wires (input-less edges at the end of the frontier).
    """
    if not is_monogamous(g) or not is_acyclic(g):
        return None
    frontier = list(g.inputs)
    layers: List[Term] = []
    remaining = sorted(g.edges)
    while remaining:
        ready = [eid for eid in remaining if all(v in frontier for v in g.edges[eid].inputs)]
        if not ready:
            return None
        eid = ready[0]
        edge = g.edges[eid]
        anchor = min((frontier.index(v) for v in edge.inputs), default=len(frontier))
        rest = [v for v in frontier if v not in edge.inputs]
        arranged = rest[:anchor] + list(edge.inputs) + rest[anchor:]
        if arranged != frontier:
            layers.append(_arrangement(frontier, arranged))
        gen = Gen(edge.label, len(edge.inputs), len(edge.outputs))
        layers.append(stack_all([Id(anchor), gen, Id(len(rest) - anchor)]))
        frontier = rest[:anchor] + list(edge.outputs) + rest[anchor:]
        remaining.remove(eid)
    if sorted(frontier) != sorted(g.outputs):
        return None
    if frontier != list(g.outputs):
        layers.append(_arrangement(frontier, list(g.outputs)))
    return compose_all(layers, len(g.inputs))


# -- presentation -------------------------------------------------------------

def to_source(t: Term, name_of: Callable[[Hashable], str] = str) -> str:
    """Render t in theory-file syntax; ';' binds looser than '*', both left-associative."""
    def render(s: Term) -> str:
        if isinstance(s, Id):
            return f"id {s.n}"
        if isinstance(s, Swap):
            return f"sw {s.n} {s.m}"
        if isinstance(s, Cup):
            return f"cup {s.n}"
        if isinstance(s, Cap):
            return f"cap {s.n}"
        if isinstance(s, Gen):
            return name_of(s.label)
        if isinstance(s, Compose):
            right = render(s.second)
            if isinstance(s.second, Compose):
                right = f"({right})"
            return f"{render(s.first)} ; {right}"
        left = render(s.top)
        if isinstance(s.top, Compose):
            left = f"({left})"
        right = render(s.bottom)
        if isinstance(s.bottom, (Compose, Stack)):
            right = f"({right})"
        return f"{left} * {right}"
    return render(t)


def _is_identity(t: Term) -> bool:
    return isinstance(t, Id) or (isinstance(t, Stack) and _is_identity(t.top)
                                 and _is_identity(t.bottom))


def _is_transposition_layer(t: Term) -> bool:
    parts = []

    def flatten(s):
        if isinstance(s, Stack):
            flatten(s.top)
            flatten(s.bottom)
        else:
            parts.append(s)
    flatten(t)
    swaps = [s for s in parts if isinstance(s, Swap)]
    return (len(swaps) == 1 and swaps[0] == Swap(1, 1)
            and all(isinstance(s, Id) or s is swaps[0] for s in parts))


def clean(t: Term) -> Term:
    """Drop identities and cancel repeated adjacent transpositions."""
    if isinstance(t, Stack):
        top, bottom = clean(t.top), clean(t.bottom)
        if top == Id(0):
            return bottom
        if bottom == Id(0):
            return top
        if isinstance(top, Id) and isinstance(bottom, Id):
            return Id(top.n + bottom.n)
        return Stack(top, bottom)
    if isinstance(t, Compose):
        chain = []

        def flatten(s):
            if isinstance(s, Compose):
                flatten(s.first)
                flatten(s.second)
            else:
                chain.append(clean(s))
        flatten(t)
        kept: List[Term] = []
        for s in chain:
            if _is_identity(s):
                continue
            if kept and s == kept[-1] and _is_transposition_layer(s):
                kept.pop()
                continue
            kept.append(s)
        return compose_all(kept, t.dom)
    return t
