"""
Dense tensors over a finite index set, valued in a commutative semiring.

A tensor of arity (n_in, n_out) is stored as a numpy array with
n_in + n_out axes of length d, input axes first. Every product and every
single-axis sum is followed by the semiring's normalize step, so integers
modulo p never leave int64 range.
"""
import hashlib
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import gmpy2
import numpy as np

from config import get_config
from errors import ArityError, InterpretationError

logger = logging.getLogger(__name__)


def _identity(x):
    return x


@dataclass(frozen=True)
class Semiring:
    """Commutative semiring given by a numpy dtype and a normalize map"""
    name: str
    dtype: Any
    zero: Any
    one: Any
    normalize: Callable[[np.ndarray], np.ndarray] = field(default=_identity, compare=False)
    tolerance: Optional[float] = None
    modulus: Optional[int] = None

    def asarray(self, values) -> np.ndarray:
        return self.normalize(np.asarray(values, dtype=self.dtype))

    def add(self, a, b):
        return self.normalize(np.add(a, b))

    def mul(self, a, b):
        return self.normalize(np.multiply(a, b))

    def sum_axis(self, a: np.ndarray, axis: int) -> np.ndarray:
        return self.normalize(np.asarray(a.sum(axis=axis), dtype=self.dtype))

    def equal(self, a: np.ndarray, b: np.ndarray, tolerance: Optional[float] = None) -> bool:
        if a.shape != b.shape:
            return False
        tol = self.tolerance if tolerance is None else tolerance
        if tol is None or self.dtype == object:
            return bool(np.array_equal(a, b))
        return bool(np.all(np.abs(a - b) <= tol))


def integers_mod(p: int) -> Semiring:
    """The field Z/p; p must be a prime below 2**31."""
    if not gmpy2.is_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    if p >= 2 ** 31:
        raise ValueError(f"modulus {p} would overflow int64 products")
    return Semiring(name=f"Z/{p}", dtype=np.int64, zero=0, one=1,
                    normalize=lambda x: np.mod(x, p), modulus=p)


def complex_field(tolerance: float = None) -> Semiring:
    tolerance = get_config().TOLERANCE if tolerance is None else tolerance
    return Semiring(name="C", dtype=np.complex128, zero=0j, one=1 + 0j, tolerance=tolerance)


BOOLEAN = Semiring(name="B", dtype=np.int64, zero=0, one=1,
                   normalize=lambda x: (np.asarray(x) != 0).astype(np.int64))
NATURALS = Semiring(name="N", dtype=object, zero=0, one=1)
COMPLEX = complex_field()


@dataclass(frozen=True)
class IndexSet:
    size: int = field(default_factory=lambda: get_config().INDEX_SIZE)

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("index set must be non-empty")


@dataclass(frozen=True, eq=False)
class Tensor:
    n_in: int
    n_out: int
    data: np.ndarray
    index_set: IndexSet
    semiring: Semiring

    def __post_init__(self):
        d = self.index_set.size
        expected = (d,) * (self.n_in + self.n_out)
        data = np.array(self.data, dtype=self.semiring.dtype)
        if data.shape != expected:
            raise ArityError(f"tensor data has shape {data.shape}, expected {expected}")
        data.setflags(write=False)
        object.__setattr__(self, 'data', data)

    @property
    def arity(self) -> Tuple[int, int]:
        return self.n_in, self.n_out

    def entry(self, inputs: Sequence[int], outputs: Sequence[int]):
        if len(inputs) != self.n_in or len(outputs) != self.n_out:
            raise ArityError(f"entry of a {self.n_in}->{self.n_out} tensor needs "
                             f"{self.n_in} inputs and {self.n_out} outputs")
        return self.data[tuple(inputs) + tuple(outputs)]

    def to_matrix(self) -> np.ndarray:
        d = self.index_set.size
        return self.data.reshape(d ** self.n_in, d ** self.n_out)

    @classmethod
    def zeros(cls, n_in: int, n_out: int, index_set: IndexSet, semiring: Semiring) -> 'Tensor':
        shape = (index_set.size,) * (n_in + n_out)
        return cls(n_in, n_out, np.full(shape, semiring.zero, dtype=semiring.dtype),
                   index_set, semiring)

    def __repr__(self):
        return f"Tensor({self.n_in}->{self.n_out}, d={self.index_set.size}, {self.semiring.name})"


# -- labelled contraction ---------------------------------------------------

Factor = Tuple[np.ndarray, Tuple[Hashable, ...]]


def _merge_repeated(arr: np.ndarray, labels: Tuple) -> Factor:
    labels = list(labels)
    while len(set(labels)) != len(labels):
        seen = {}
        for j, lab in enumerate(labels):
            if lab in seen:
                i = seen[lab]
                break
            seen[lab] = j
        arr = np.diagonal(arr, axis1=i, axis2=j)
        labels = [lab for k, lab in enumerate(labels) if k not in (i, j)] + [labels[i]]
    return arr, tuple(labels)


def _multiply(a: Factor, b: Factor, semiring: Semiring) -> Factor:
    arr_a, lab_a = a
    arr_b, lab_b = b
    union = lab_a + tuple(lab for lab in lab_b if lab not in lab_a)
    # line both operands up on the union axes, size-1 where a label is absent
    shape_a = arr_a.shape + (1,) * (len(union) - len(lab_a))
    present_b = [lab for lab in union if lab in lab_b]
    arr_b = np.transpose(arr_b, [lab_b.index(lab) for lab in present_b])
    shape_b = tuple(arr_b.shape[present_b.index(lab)] if lab in lab_b else 1 for lab in union)
    product = semiring.mul(arr_a.reshape(shape_a), arr_b.reshape(shape_b))
    return product, union


def _sum_out(factor: Factor, keep: set, semiring: Semiring) -> Factor:
    arr, labels = factor
    labels = list(labels)
    for lab in [lab for lab in labels if lab not in keep]:
        axis = labels.index(lab)
        arr = semiring.sum_axis(arr, axis)
        labels.pop(axis)
    return arr, tuple(labels)


def contract_network(factors: Iterable[Factor], output_labels: Sequence[Hashable],
                     index_set: IndexSet, semiring: Semiring) -> np.ndarray:
    """
    Evaluate a labelled tensor network.

    Each factor is an array with one label per axis. The result has one axis
    per entry of output_labels and sums over every label not in the output.
    Repeated labels within a factor or in the output denote equal indices;
    an output label carried by no factor ranges freely.
    """
    d = index_set.size
    output_labels = tuple(output_labels)
    pending: List[Factor] = [_merge_repeated(np.asarray(arr, dtype=semiring.dtype), tuple(labels))
                             for arr, labels in factors]
    scalar = np.asarray(semiring.one, dtype=semiring.dtype)
    keep_always = set(output_labels)

    def still_needed(exclude: int) -> set:
        needed = set(keep_always)
        for k, (_, labels) in enumerate(pending):
            if k != exclude:
                needed.update(labels)
        return needed

    for k in range(len(pending)):
        pending[k] = _sum_out(pending[k], still_needed(k), semiring)

    while len(pending) > 1:
        best = None
        for i in range(len(pending)):
            for j in range(i + 1, len(pending)):
                li, lj = set(pending[i][1]), set(pending[j][1])
                score = (0 if li & lj else 1, len(li | lj))
                if best is None or score < best[0]:
                    best = (score, i, j)
        _, i, j = best
        merged = _multiply(pending[i], pending[j], semiring)
        pending = [f for k, f in enumerate(pending) if k not in (i, j)] + [merged]
        pending[-1] = _sum_out(merged, still_needed(len(pending) - 1), semiring)

    if pending:
        arr, labels = pending[0]
        arr = semiring.mul(arr, scalar)
    else:
        arr, labels = scalar, ()

    unique = tuple(dict.fromkeys(output_labels))
    missing = [lab for lab in unique if lab not in labels]
    if missing:
        arr = np.broadcast_to(arr.reshape(arr.shape + (1,) * len(missing)),
                              arr.shape + (d,) * len(missing))
        labels = labels + tuple(missing)
    arr = np.transpose(arr, [labels.index(lab) for lab in unique]) if unique else arr

    if len(unique) == len(output_labels):
        return np.array(arr, dtype=semiring.dtype)
    result = np.full((d,) * len(output_labels), semiring.zero, dtype=semiring.dtype)
    grid = np.indices((d,) * len(unique))
    target = tuple(grid[unique.index(lab)] for lab in output_labels)
    result[target] = arr
    return result


# -- structural tensors -----------------------------------------------------

def delta(n_in: int, n_out: int, index_set: IndexSet, semiring: Semiring) -> Tensor:
    """One on the all-equal diagonal, zero elsewhere."""
    data = contract_network([], ('x',) * (n_in + n_out), index_set, semiring)
    return Tensor(n_in, n_out, data, index_set, semiring)


def _wires(prefix: str, n: int) -> Tuple:
    return tuple((prefix, k) for k in range(n))


def identity_tensor(n: int, index_set: IndexSet, semiring: Semiring) -> Tensor:
    xs = _wires('x', n)
    return Tensor(n, n, contract_network([], xs + xs, index_set, semiring), index_set, semiring)


def swap_tensor(n: int, m: int, index_set: IndexSet, semiring: Semiring) -> Tensor:
    xs, ys = _wires('x', n), _wires('y', m)
    data = contract_network([], xs + ys + ys + xs, index_set, semiring)
    return Tensor(n + m, n + m, data, index_set, semiring)


def cup_tensor(n: int, index_set: IndexSet, semiring: Semiring) -> Tensor:
    xs = _wires('x', n)
    return Tensor(0, 2 * n, contract_network([], xs + xs, index_set, semiring), index_set, semiring)


def cap_tensor(n: int, index_set: IndexSet, semiring: Semiring) -> Tensor:
    xs = _wires('x', n)
    return Tensor(2 * n, 0, contract_network([], xs + xs, index_set, semiring), index_set, semiring)


def _check_compatible(t: Tensor, g: Tensor):
    if t.index_set != g.index_set:
        raise ArityError(f"index sets differ: {t.index_set.size} vs {g.index_set.size}")
    if t.semiring != g.semiring:
        raise ArityError(f"semirings differ: {t.semiring.name} vs {g.semiring.name}")


def contract(t: Tensor, g: Tensor) -> Tensor:
    """Sequential composition: t's outputs are summed against g's inputs."""
    _check_compatible(t, g)
    if t.n_out != g.n_in:
        raise ArityError(f"cannot contract {t.n_in}->{t.n_out} with {g.n_in}->{g.n_out}")
    ins, mids, outs = _wires('a', t.n_in), _wires('m', t.n_out), _wires('b', g.n_out)
    data = contract_network([(t.data, ins + mids), (g.data, mids + outs)], ins + outs,
                            t.index_set, t.semiring)
    return Tensor(t.n_in, g.n_out, data, t.index_set, t.semiring)


def tensor_product(t: Tensor, g: Tensor) -> Tensor:
    _check_compatible(t, g)
    outer = t.semiring.normalize(np.multiply.outer(t.data, g.data))
    a, b, c = t.n_in, t.n_out, g.n_in
    t_in = list(range(a))
    t_out = list(range(a, a + b))
    g_in = list(range(a + b, a + b + c))
    g_out = list(range(a + b + c, outer.ndim))
    data = np.transpose(outer, t_in + g_in + t_out + g_out)
    return Tensor(a + c, b + g.n_out, data, t.index_set, t.semiring)


def tensor_equiv(t: Tensor, g: Tensor, tolerance: Optional[float] = None) -> bool:
    if t.arity != g.arity or t.index_set != g.index_set or t.semiring != g.semiring:
        return False
    return t.semiring.equal(t.data, g.data, tolerance)


# -- dimensionless tensors and interpretations -------------------------------

class DimensionlessTensor:
    """A family of tensors indexed by arity (n_in, n_out)."""

    def __init__(self, index_set: IndexSet, semiring: Semiring):
        self.index_set = index_set
        self.semiring = semiring
        self._cache: Dict[Tuple[int, int], Tensor] = {}

    def at(self, n_in: int, n_out: int) -> Tensor:
        key = (n_in, n_out)
        if key not in self._cache:
            self._cache[key] = self._build(n_in, n_out)
        return self._cache[key]

    def _build(self, n_in: int, n_out: int) -> Tensor:
        raise NotImplementedError


class FixedTensor(DimensionlessTensor):
    """A single tensor; other sizes are zero, or an error when strict."""

    def __init__(self, tensor: Tensor, strict: bool = False):
        super().__init__(tensor.index_set, tensor.semiring)
        self.tensor = tensor
        self.strict = strict

    def _build(self, n_in: int, n_out: int) -> Tensor:
        if (n_in, n_out) == self.tensor.arity:
            return self.tensor
        if self.strict:
            raise InterpretationError(f"tensor defined only at {self.tensor.n_in}->"
                                      f"{self.tensor.n_out}, requested {n_in}->{n_out}")
        return Tensor.zeros(n_in, n_out, self.index_set, self.semiring)


class FormulaTensor(DimensionlessTensor):
    """Entries computed by formula(n_in, n_out, index_set, semiring) -> array."""

    def __init__(self, formula: Callable[[int, int, IndexSet, Semiring], np.ndarray],
                 index_set: IndexSet, semiring: Semiring):
        super().__init__(index_set, semiring)
        self.formula = formula

    def _build(self, n_in: int, n_out: int) -> Tensor:
        data = self.semiring.asarray(self.formula(n_in, n_out, self.index_set, self.semiring))
        return Tensor(n_in, n_out, data, self.index_set, self.semiring)


class HashedTensor(DimensionlessTensor):
    """Pseudo-random entries in Z/p derived from (seed, key, arity, position)."""

    def __init__(self, key: str, seed: int, index_set: IndexSet, semiring: Semiring):
        if semiring.modulus is None:
            raise ValueError("hashed tensors need a modular semiring")
        super().__init__(index_set, semiring)
        self.key = key
        self.seed = seed

    def _build(self, n_in: int, n_out: int) -> Tensor:
        shape = (self.index_set.size,) * (n_in + n_out)
        p = self.semiring.modulus
        values = []
        for flat in range(int(np.prod(shape, dtype=np.int64))):
            digest = hashlib.blake2b(f"{self.seed}|{self.key}|{n_in}|{n_out}|{flat}".encode(),
                                     digest_size=8).digest()
            values.append(int.from_bytes(digest, 'little') % p)
        data = np.asarray(values, dtype=np.int64).reshape(shape)
        return Tensor(n_in, n_out, data, self.index_set, self.semiring)


class TensorModel:
    """Interpretation of generator labels, with the index set and semiring it lives over."""

    def __init__(self, tensors: Dict[Hashable, DimensionlessTensor], index_set: IndexSet,
                 semiring: Semiring):
        self.tensors = dict(tensors)
        self.index_set = index_set
        self.semiring = semiring

    def __call__(self, label) -> DimensionlessTensor:
        try:
            return self.tensors[label]
        except (KeyError, TypeError):
            raise InterpretationError(f"no tensor for generator label {label!r}") from None

    def __contains__(self, label) -> bool:
        return label in self.tensors


def randomized_interpretation(labels: Iterable[Hashable], seed: int, prime: int = None,
                              index_set: IndexSet = None) -> TensorModel:
    """Seeded generic interpretation of every label over Z/prime."""
    settings = get_config()
    semiring = integers_mod(prime or settings.PRIME)
    index_set = index_set or IndexSet(settings.INDEX_SIZE)
    tensors = {label: HashedTensor(repr(label), seed, index_set, semiring) for label in labels}
    logger.debug(f"randomized interpretation of {len(tensors)} labels, seed {seed}")
    return TensorModel(tensors, index_set, semiring)
