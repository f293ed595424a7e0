"""
ZX-calculus generators and their complex qubit semantics.

Z spiders are 1 on the all-zero legs and e^{i alpha} on the all-one legs;
X spiders are Z spiders with a Hadamard on every leg. The bundled
theories/zx.thy states spider fusion, Hopf, bialgebra and unit rules at
phase zero, and every rule there is checked against these tensors when
the theory is loaded.
"""
import cmath
import functools
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np

from aprop import Compose, Gen, Id, Stack, Term, term_semantics
from errors import InterpretationError, ModelCheckError
from hypergraph import LabelEquivalence
from tensor import (COMPLEX, DimensionlessTensor, FixedTensor, FormulaTensor, IndexSet, Semiring,
                    Tensor, TensorModel)
from theory import GeneratorDecl, Signature, Theory, concrete_model_check
from theory_parser import load_theory

logger = logging.getLogger(__name__)

ZX_INDEX_SET = IndexSet(2)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
THEORY_PATH = Path(__file__).parent / 'theories' / 'zx.thy'
MANIFEST_PATH = Path(__file__).parent / 'theories' / 'zx.json'
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class Spider:
    color: str
    phase: float = 0.0

    def __post_init__(self):
        if self.color not in ('Z', 'X'):
            raise ValueError(f"spider colour must be 'Z' or 'X', not {self.color!r}")

    def __str__(self):
        return f"{self.color}({self.phase:g})"


@dataclass(frozen=True)
class HBox:
    def __str__(self):
        return "H"


@dataclass(frozen=True)
class Const:
    value: complex

    def __str__(self):
        return f"const({self.value})"


ZXLabel = Union[Spider, HBox, Const]


def _z_spider_data(n_in: int, n_out: int, phase: float) -> np.ndarray:
    legs = n_in + n_out
    data = np.zeros((2,) * legs, dtype=np.complex128)
    data[(0,) * legs] += 1
    data[(1,) * legs] += cmath.exp(1j * phase)
    return data


def _with_hadamards(data: np.ndarray) -> np.ndarray:
    for axis in range(data.ndim):
        data = np.moveaxis(np.tensordot(HADAMARD, data, axes=([1], [axis])), 0, axis)
    return data


def _spider_formula(label: Spider):
    def formula(n_in: int, n_out: int, index_set: IndexSet, semiring: Semiring) -> np.ndarray:
        if index_set.size != 2:
            raise InterpretationError("spiders are defined on qubits only")
        data = _z_spider_data(n_in, n_out, label.phase)
        return _with_hadamards(data) if label.color == 'X' else data
    return formula


@functools.lru_cache(maxsize=None)
def zx_interp(label: ZXLabel) -> DimensionlessTensor:
    """Complex tensor family of a ZX label; HBox and Const exist at one arity only."""
    if isinstance(label, Spider):
        return FormulaTensor(_spider_formula(label), ZX_INDEX_SET, COMPLEX)
    if isinstance(label, HBox):
        return FixedTensor(Tensor(1, 1, HADAMARD, ZX_INDEX_SET, COMPLEX), strict=True)
    if isinstance(label, Const):
        value = np.asarray(complex(label.value), dtype=np.complex128)
        return FixedTensor(Tensor(0, 0, value, ZX_INDEX_SET, COMPLEX), strict=True)
    raise InterpretationError(f"not a ZX label: {label!r}")


class ZXInterpretation:
    """zx_interp together with the index set and semiring it lives over."""
    index_set = ZX_INDEX_SET
    semiring = COMPLEX

    def __call__(self, label: ZXLabel) -> DimensionlessTensor:
        return zx_interp(label)


zx_model = ZXInterpretation()


def zx_semantics(term: Term) -> Tensor:
    return term_semantics(term, zx_interp, ZX_INDEX_SET, COMPLEX)


class ZXLabelEquivalence(LabelEquivalence):
    """Spider phases compared modulo 2*pi, constants up to a tolerance."""
    exact = False

    def __init__(self, tolerance: float = 1e-9):
        self.tolerance = tolerance

    def equivalent(self, a, b) -> bool:
        if isinstance(a, Spider) and isinstance(b, Spider):
            if a.color != b.color:
                return False
            delta = (a.phase - b.phase) % TWO_PI
            return min(delta, TWO_PI - delta) <= self.tolerance
        if isinstance(a, Const) and isinstance(b, Const):
            return abs(complex(a.value) - complex(b.value)) <= self.tolerance
        return a == b


zx_label_equivalence = ZXLabelEquivalence()


# -- builders ---------------------------------------------------------------------

def z_spider(n_in: int, n_out: int, phase: float = 0.0) -> Gen:
    return Gen(Spider('Z', phase), n_in, n_out)


def x_spider(n_in: int, n_out: int, phase: float = 0.0) -> Gen:
    return Gen(Spider('X', phase), n_in, n_out)


def hadamard() -> Gen:
    return Gen(HBox(), 1, 1)


def scalar(value: complex) -> Gen:
    return Gen(Const(value), 0, 0)


def n_wire(n: int) -> Term:
    return Id(n)


def cnot() -> Term:
    """Control on the top wire; equals CNOT / sqrt(2)."""
    return Compose(Stack(z_spider(1, 2), Id(1)), Stack(Id(1), x_spider(2, 1)))


def notc() -> Term:
    """Control on the bottom wire."""
    return Compose(Stack(Id(1), z_spider(1, 2)), Stack(x_spider(2, 1), Id(1)))


def three_cnot() -> Term:
    return Compose(Compose(cnot(), notc()), cnot())


# -- named generators used by theory files ----------------------------------------

ZX_GENERATORS: Dict[str, Tuple[ZXLabel, int, int]] = {
    'z01': (Spider('Z'), 0, 1),
    'z10': (Spider('Z'), 1, 0),
    'z11': (Spider('Z'), 1, 1),
    'z12': (Spider('Z'), 1, 2),
    'z21': (Spider('Z'), 2, 1),
    'z13': (Spider('Z'), 1, 3),
    'x01': (Spider('X'), 0, 1),
    'x10': (Spider('X'), 1, 0),
    'x11': (Spider('X'), 1, 1),
    'x12': (Spider('X'), 1, 2),
    'x21': (Spider('X'), 2, 1),
    'x31': (Spider('X'), 3, 1),
    'h': (HBox(), 1, 1),
    'half': (Const(0.5), 0, 0),
    'inv_sqrt2': (Const(1 / math.sqrt(2)), 0, 0),
    'sqrt2': (Const(math.sqrt(2)), 0, 0),
}


def zx_signature() -> Signature:
    decls = [GeneratorDecl(name, n_in, n_out) for name, (_, n_in, n_out) in ZX_GENERATORS.items()]
    return Signature(decls, equivalence=zx_label_equivalence)


def zx_named_interpretation() -> TensorModel:
    tensors = {name: FixedTensor(zx_interp(label).at(n_in, n_out), strict=True)
               for name, (label, n_in, n_out) in ZX_GENERATORS.items()}
    return TensorModel(tensors, ZX_INDEX_SET, COMPLEX)


def _json_number(z: complex):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def zx_manifest() -> dict:
    """Content of theories/zx.json, the model loadable by check --model."""
    model = zx_named_interpretation()
    generators = {}
    for name, (_, n_in, n_out) in ZX_GENERATORS.items():
        data = model(name).at(n_in, n_out).data
        generators[name] = {'inputs': n_in, 'outputs': n_out,
                            'entries': [_json_number(z) for z in data.ravel()]}
    return {'index_size': 2, 'semiring': 'complex', 'tolerance': 1e-9, 'generators': generators}


def zx_theory(path=None) -> Theory:
    """Load the bundled ZX theory and confirm each rule in the qubit model."""
    _, theory = load_theory(path or THEORY_PATH, zx_signature())
    model = zx_named_interpretation()
    for rule in theory.signature.rules.values():
        if not concrete_model_check(theory.signature, model, rule.lhs, rule.rhs):
            raise ModelCheckError(f"ZX rule {rule.name!r} does not hold in the qubit model")
    logger.info(f"ZX theory: {len(theory.signature.rules)} rules confirmed in the qubit model")
    return theory
