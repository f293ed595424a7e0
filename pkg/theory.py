"""
Signatures, lemmas and the proof-script checker, plus semantic oracles.

Lemmas are checked in file order; a lemma that checks becomes available as
a rule to the lemmas after it.
"""
import json
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Tuple, Union

from aprop import Gen, Term, clean, graph_to_term, is_cup_cap_free, term_semantics, \
    term_to_graph, to_source
from config import get_config
from errors import InterpretationError, ResolutionError
from hypergraph import (EXACT_LABELS, InterfacedGraph, LabelEquivalence, find_isomorphism,
                        is_acyclic, is_monogamous)
from models import (STATUS_FAILED, STATUS_OK, VERDICT_CONSISTENT, VERDICT_COUNTEREXAMPLE_FREE,
                    VERDICT_REFUTED, CheckReport, LemmaResult, ModelVerdict, OracleVerdict)
from rewrite import Rule, find_matches, rewrite_once
from tensor import (BOOLEAN, NATURALS, FixedTensor, IndexSet, TensorModel, Tensor,
                    complex_field, delta, integers_mod, randomized_interpretation, tensor_equiv)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneratorDecl:
    name: str
    n_in: int
    n_out: int
    label: Hashable = None

    def __post_init__(self):
        if self.label is None:
            object.__setattr__(self, 'label', self.name)

    def term(self) -> Gen:
        return Gen(self.label, self.n_in, self.n_out)


class Signature:
    """Generators, axioms and the label equivalence used when matching."""

    def __init__(self, generators: Iterable[GeneratorDecl] = (), rules: Iterable[Rule] = (),
                 equivalence: LabelEquivalence = EXACT_LABELS):
        self.generators: Dict[str, GeneratorDecl] = {}
        self.by_label: Dict[Hashable, GeneratorDecl] = {}
        for decl in generators:
            self.add_generator(decl)
        self.rules: Dict[str, Rule] = {}
        for rule in rules:
            self.rules[rule.name] = rule
        self.equivalence = equivalence

    def add_generator(self, decl: GeneratorDecl):
        self.generators[decl.name] = decl
        self.by_label[decl.label] = decl

    def arity(self, label) -> Optional[Tuple[int, int]]:
        decl = self.by_label.get(label)
        return None if decl is None else (decl.n_in, decl.n_out)

    def labels(self) -> List[Hashable]:
        return [decl.label for decl in self.generators.values()]

    def gen(self, name: str) -> Gen:
        return self.generators[name].term()

    def name_of(self, label) -> str:
        decl = self.by_label.get(label)
        return decl.name if decl else str(label)

    def render(self, term: Term) -> str:
        return to_source(term, self.name_of)


@dataclass(frozen=True)
class RewriteStep:
    rule: str
    reverse: bool = False
    occurrence: int = 1
    side: str = 'lhs'

    def __str__(self):
        text = f"rw {'-' if self.reverse else ''}{self.rule}"
        if self.occurrence != 1:
            text += f" @{self.occurrence}"
        if self.side != 'lhs':
            text += f" in {self.side}"
        return text


@dataclass(frozen=True)
class IsoStep:
    def __str__(self):
        return "iso"


ProofStep = Union[RewriteStep, IsoStep]


@dataclass(frozen=True)
class Lemma:
    name: str
    lhs: Term
    rhs: Term
    proof: Tuple[ProofStep, ...] = ()

    def as_rule(self) -> Rule:
        return Rule(self.name, self.lhs, self.rhs)


@dataclass
class Theory:
    signature: Signature
    lemmas: List[Lemma] = field(default_factory=list)
    name: Optional[str] = None

    def lemma(self, name: str) -> Lemma:
        for lemma in self.lemmas:
            if lemma.name == name:
                return lemma
        raise ResolutionError(f"no lemma named {name!r}")


# -- proof checking -----------------------------------------------------------

class StepFailure(Exception):
    def __init__(self, step: Optional[int], reason: str):
        super().__init__(reason)
        self.step = step
        self.reason = reason


def _describe(graph: InterfacedGraph, signature: Signature) -> str:
    term = graph_to_term(graph)
    if term is None:
        return repr(graph)
    return signature.render(clean(term))


def _apply_step(goals: Dict[str, InterfacedGraph], step: RewriteStep, k: int,
                available: Mapping[str, Rule], signature: Signature):
    rule = available.get(step.rule)
    if rule is None:
        raise StepFailure(k, f"rule {step.rule!r} is not available")
    if not (is_cup_cap_free(rule.lhs) and is_cup_cap_free(rule.rhs)):
        raise StepFailure(k, f"rule {step.rule!r} uses cups or caps and cannot be applied")
    host = goals[step.side]
    if not (is_monogamous(host) and is_acyclic(host)):
        raise StepFailure(k, f"the {step.side} is not a monogamous acyclic graph")
    result = rewrite_once(host, rule, step.reverse, step.occurrence, signature.equivalence)
    if result is None:
        pattern = term_to_graph(rule.sides(step.reverse)[0])
        available_count = len(find_matches(pattern, host, signature.equivalence))
        raise StepFailure(k, f"'{step}' does not apply to the {step.side} "
                              f"{_describe(host, signature)} ({available_count} occurrences available)")
    goals[step.side] = result.graph


def replay(lemma: Lemma, available: Mapping[str, Rule], signature: Signature,
           upto_step: Optional[int] = None) -> Dict[str, InterfacedGraph]:
    """Goal graphs after the steps before upto_step (1-based); raises StepFailure."""
    goals = {'lhs': term_to_graph(lemma.lhs), 'rhs': term_to_graph(lemma.rhs)}
    steps = lemma.proof if upto_step is None else lemma.proof[:upto_step - 1]
    for k, step in enumerate(steps, 1):
        if isinstance(step, RewriteStep):
            _apply_step(goals, step, k, available, signature)
    return goals


def check_lemma(lemma: Lemma, available: Mapping[str, Rule], signature: Signature) -> LemmaResult:
    started = time.perf_counter()
    result = LemmaResult(lemma.name, STATUS_FAILED)
    try:
        if lemma.lhs.dom != lemma.rhs.dom or lemma.lhs.cod != lemma.rhs.cod:
            raise StepFailure(None, f"sides have different arities: {lemma.lhs.dom}->"
                                     f"{lemma.lhs.cod} and {lemma.rhs.dom}->{lemma.rhs.cod}")
        goals = {'lhs': term_to_graph(lemma.lhs), 'rhs': term_to_graph(lemma.rhs)}
        closed = False
        for k, step in enumerate(lemma.proof, 1):
            if closed:
                raise StepFailure(k, "the goal was already closed by iso")
            if isinstance(step, IsoStep):
                if find_isomorphism(goals['lhs'], goals['rhs'], signature.equivalence) is None:
                    raise StepFailure(k, f"sides are not isomorphic: "
                                          f"{_describe(goals['lhs'], signature)} vs "
                                          f"{_describe(goals['rhs'], signature)}")
                closed = True
            else:
                _apply_step(goals, step, k, available, signature)
            result.steps_applied = k
        if not closed:
            raise StepFailure(None, "proof does not end with iso")
        result.status = STATUS_OK
    except StepFailure as failure:
        result.failed_step = failure.step
        result.reason = failure.reason
    result.millis = (time.perf_counter() - started) * 1000
    return result


def check_theory(theory: Theory, file: str = '<theory>', oracle_trials: int = 0,
                 seed: Optional[int] = None, model: Optional[TensorModel] = None) -> CheckReport:
    """Replay every lemma in order; optionally run the oracle and a concrete model."""
    signature = theory.signature
    available: Dict[str, Rule] = dict(signature.rules)
    report = CheckReport(file=file, theory=theory.name, rules=list(signature.rules))
    for lemma in theory.lemmas:
        result = check_lemma(lemma, available, signature)
        report.lemmas.append(result)
        if result.ok:
            available[lemma.name] = lemma.as_rule()
            logger.info(f"{lemma.name}: ok ({result.millis:.1f} ms)")
        else:
            logger.info(f"{lemma.name}: failed at step {result.failed_step}: {result.reason}")

    if oracle_trials:
        seed = get_config().SEED if seed is None else seed
        report.oracle = []
        for name, lhs, rhs in _equations(theory):
            verdict = oracle_check(signature, lhs, rhs, oracle_trials, seed)
            verdict.subject = name
            report.oracle.append(verdict)

    if model is not None:
        report.model = []
        for rule in signature.rules.values():
            report.model.append(ModelVerdict(rule.name, 'rule',
                                             concrete_model_check(signature, model, rule.lhs, rule.rhs)))
        rules_hold = all(v.holds for v in report.model)
        if not rules_hold:
            logger.warning("the supplied model does not satisfy every rule")
        for lemma, result in zip(theory.lemmas, report.lemmas):
            holds = concrete_model_check(signature, model, lemma.lhs, lemma.rhs)
            report.model.append(ModelVerdict(lemma.name, 'lemma', holds))
            if rules_hold and result.ok and not holds:
                report.soundness_violations.append(lemma.name)
    return report


def _equations(theory: Theory):
    for rule in theory.signature.rules.values():
        yield rule.name, rule.lhs, rule.rhs
    for lemma in theory.lemmas:
        yield lemma.name, lemma.lhs, lemma.rhs


# -- semantic oracles -----------------------------------------------------------

def oracle_check(signature: Signature, lhs: Term, rhs: Term, trials: int = None,
                 seed: int = None, prime: int = None,
                 index_set: IndexSet = None) -> OracleVerdict:
    """
    Compare both sides under seeded generic interpretations over Z/p.
    Disagreement refutes; agreement plus a graph isomorphism is reported
    consistent, agreement alone counterexample-free.
    """
    oracle = get_config().get_oracle_config()
    trials = oracle['trials'] if trials is None else trials
    seed = oracle['seed'] if seed is None else seed
    prime = prime or oracle['prime']
    index_set = index_set or IndexSet(oracle['index_size'])
    if lhs.dom != rhs.dom or lhs.cod != rhs.cod:
        return OracleVerdict('', VERDICT_REFUTED, 0)
    labels = signature.labels()
    for trial in range(trials):
        trial_seed = seed + trial
        interp = randomized_interpretation(labels, trial_seed, prime, index_set)
        left = term_semantics(lhs, interp, interp.index_set, interp.semiring)
        right = term_semantics(rhs, interp, interp.index_set, interp.semiring)
        if not tensor_equiv(left, right):
            return OracleVerdict('', VERDICT_REFUTED, trial + 1, trial_seed)
    iso = find_isomorphism(term_to_graph(lhs), term_to_graph(rhs), signature.equivalence)
    return OracleVerdict('', VERDICT_CONSISTENT if iso else VERDICT_COUNTEREXAMPLE_FREE, trials)


def concrete_model_check(signature: Signature, model: TensorModel, lhs: Term, rhs: Term,
                         tolerance: float = None) -> bool:
    if lhs.dom != rhs.dom or lhs.cod != rhs.cod:
        return False
    try:
        left = term_semantics(lhs, model, model.index_set, model.semiring)
        right = term_semantics(rhs, model, model.index_set, model.semiring)
    except InterpretationError as e:
        logger.warning(f"model cannot interpret equation: {e}")
        return False
    return tensor_equiv(left, right, tolerance)


# -- concrete models ------------------------------------------------------------

def _manifest_entry(value):
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    return value


def model_from_manifest(data: dict) -> TensorModel:
    """Build a model from {"index_size", "semiring", "generators": {name: {...}}}."""
    settings = get_config()
    index_set = IndexSet(int(data.get('index_size', settings.INDEX_SIZE)))
    kind = data.get('semiring', 'complex')
    if kind == 'complex':
        semiring = complex_field(float(data.get('tolerance', settings.TOLERANCE)))
    elif kind == 'boolean':
        semiring = BOOLEAN
    elif kind == 'naturals':
        semiring = NATURALS
    elif kind == 'integers_mod':
        semiring = integers_mod(int(data['modulus']))
    else:
        raise ValueError(f"unknown semiring {kind!r} in manifest")
    tensors = {}
    for name, decl in data.get('generators', {}).items():
        n_in, n_out = int(decl['inputs']), int(decl['outputs'])
        entries = [_manifest_entry(v) for v in decl['entries']]
        shape = (index_set.size,) * (n_in + n_out)
        array = semiring.asarray(entries).reshape(shape)
        tensors[name] = FixedTensor(Tensor(n_in, n_out, array, index_set, semiring), strict=True)
    return TensorModel(tensors, index_set, semiring)


def load_model_manifest(path) -> TensorModel:
    with open(path, 'r', encoding='utf-8') as f:
        data = json.load(f)
    model = model_from_manifest(data)
    logger.info(f"loaded model with {len(model.tensors)} generators from {path}")
    return model


def frobenius_spider_model(index_size: int = 2) -> TensorModel:
    """Copy/delete and merge/create on a finite set: a special commutative Frobenius algebra."""
    index_set = IndexSet(index_size)
    shapes = {'m': (2, 1), 'u': (0, 1), 'n': (1, 2), 'v': (1, 0)}
    return TensorModel({name: FixedTensor(delta(a, b, index_set, NATURALS), strict=True)
                        for name, (a, b) in shapes.items()}, index_set, NATURALS)
