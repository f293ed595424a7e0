"""
Lexer and parser for theory files.

    file   := ("theory" NAME)? decl*
    decl   := "gen" NAME ":" INT "->" INT
            | "rule" NAME ":" term "=" term
            | "lemma" NAME ":" term "=" term "proof" step* "qed"
    term   := factor (";" factor)*
    factor := atom ("*" atom)*
    atom   := "id" INT | "sw" INT INT | "cup" INT | "cap" INT | NAME | "(" term ")"
    step   := "rw" "-"? NAME ("@" INT)? ("in" ("lhs" | "rhs"))? | "iso"

'#' starts a comment that runs to the end of the line. Problems are
collected as diagnostics and reported together; parsing never gives up on
the first error.
"""
import logging
import os
import string
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from aprop import Cap, Compose, Cup, Gen, Id, Stack, Swap, Term, to_source
from errors import ResolutionError, ShapeError, TheorySyntaxError
from rewrite import Rule
from theory import GeneratorDecl, IsoStep, Lemma, ProofStep, RewriteStep, Signature, Theory

logger = logging.getLogger(__name__)

KEYWORDS = frozenset(['theory', 'gen', 'rule', 'lemma', 'proof', 'qed', 'rw', 'iso',
                      'id', 'sw', 'cup', 'cap', 'in'])
DECL_KEYWORDS = frozenset(['gen', 'rule', 'lemma', 'theory'])
PUNCTUATION = {':': 'COLON', '=': 'EQUALS', ';': 'SEMI', '*': 'STAR', '(': 'LPAREN',
               ')': 'RPAREN', '@': 'AT', '-': 'MINUS'}
NAME_START = frozenset(string.ascii_letters)
NAME_CHARS = frozenset(string.ascii_letters + string.digits + '_')
DIGITS = frozenset(string.digits)


@dataclass(frozen=True)
class Location:
    file: str
    line: int
    col: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.col}"


@dataclass(frozen=True)
class Diagnostic:
    location: Location
    message: str
    severity: str = 'error'

    def __str__(self):
        return f"{self.location}: {self.severity}: {self.message}"


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    location: Location

    def __str__(self):
        return 'end of file' if self.kind == 'EOF' else repr(self.value)


class Lexer:
    def __init__(self, source: str, filename: str, diagnostics: List[Diagnostic]):
        self.source = source
        self.filename = filename
        self.diagnostics = diagnostics
        self.pos = 0
        self.line = 1
        self.col = 1

    def _advance(self, n: int = 1):
        for _ in range(n):
            if self.source[self.pos] == '\n':
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def tokens(self) -> List[Token]:
        result = []
        src = self.source
        while True:
            while self.pos < len(src) and (src[self.pos].isspace() or src[self.pos] == '#'):
                if src[self.pos] == '#':
                    while self.pos < len(src) and src[self.pos] != '\n':
                        self._advance()
                else:
                    self._advance()
            loc = Location(self.filename, self.line, self.col)
            if self.pos >= len(src):
                result.append(Token('EOF', '', loc))
                return result
            c = src[self.pos]
            if c in NAME_START:
                start = self.pos
                while self.pos < len(src) and src[self.pos] in NAME_CHARS:
                    self._advance()
                word = src[start:self.pos]
                result.append(Token('KEYWORD' if word in KEYWORDS else 'NAME', word, loc))
            elif c in DIGITS:
                start = self.pos
                while self.pos < len(src) and src[self.pos] in DIGITS:
                    self._advance()
                result.append(Token('INT', src[start:self.pos], loc))
            elif src.startswith('->', self.pos):
                self._advance(2)
                result.append(Token('ARROW', '->', loc))
            elif c in PUNCTUATION:
                self._advance()
                result.append(Token(PUNCTUATION[c], c, loc))
            else:
                self.diagnostics.append(Diagnostic(loc, f"unexpected character {c!r}"))
                self._advance()


# -- AST ------------------------------------------------------------------------

@dataclass(frozen=True)
class GenDecl:
    name: str
    n_in: int
    n_out: int
    location: Optional[Location] = field(default=None, compare=False)


@dataclass(frozen=True)
class RuleDecl:
    name: str
    lhs: Term
    rhs: Term
    location: Optional[Location] = field(default=None, compare=False)


@dataclass(frozen=True)
class StepDecl:
    step: ProofStep
    location: Optional[Location] = field(default=None, compare=False)


@dataclass(frozen=True)
class LemmaDecl:
    name: str
    lhs: Term
    rhs: Term
    steps: Tuple[StepDecl, ...]
    location: Optional[Location] = field(default=None, compare=False)


@dataclass(frozen=True)
class TheoryFileAST:
    name: Optional[str]
    generators: Tuple[GenDecl, ...]
    rules: Tuple[RuleDecl, ...]
    lemmas: Tuple[LemmaDecl, ...]
    file: str = field(default='<string>', compare=False)

    def to_source(self) -> str:
        """Render back to theory-file text; parsing the result gives an equal AST."""
        lines = []
        if self.name:
            lines += [f"theory {self.name}", ""]
        for g in self.generators:
            lines.append(f"gen {g.name} : {g.n_in} -> {g.n_out}")
        if self.rules:
            lines.append("")
        for r in self.rules:
            lines.append(f"rule {r.name} : {to_source(r.lhs)} = {to_source(r.rhs)}")
        for lemma in self.lemmas:
            lines += ["", f"lemma {lemma.name} : {to_source(lemma.lhs)} = {to_source(lemma.rhs)}",
                      "proof"]
            lines += [f"  {s.step}" for s in lemma.steps]
            lines.append("qed")
        return '\n'.join(lines) + '\n'


class _Abandon(Exception):
    """Unwinds to the next declaration after a syntax error."""


class Parser:
    def __init__(self, source: str, filename: str = '<string>'):
        self.filename = filename
        self.diagnostics: List[Diagnostic] = []
        self.toks = Lexer(source, filename, self.diagnostics).tokens()
        self.i = 0
        self.generators = {}

    # token helpers

    @property
    def current(self) -> Token:
        return self.toks[self.i]

    def _error(self, message: str, token: Token = None):
        token = token or self.current
        self.diagnostics.append(Diagnostic(token.location, message))
        raise _Abandon()

    def _peek(self, kind: str, value: str = None) -> bool:
        tok = self.current
        return tok.kind == kind and (value is None or tok.value == value)

    def _accept(self, kind: str, value: str = None) -> Optional[Token]:
        if self._peek(kind, value):
            tok = self.current
            self.i += 1
            return tok
        return None

    def _expect(self, kind: str, value: str = None, what: str = None) -> Token:
        tok = self._accept(kind, value)
        if tok is None:
            self._error(f"expected {what or value or kind.lower()}, found {self.current}")
        return tok

    def _expect_int(self, what: str) -> int:
        return int(self._expect('INT', what=what).value)

    def _skip_to_declaration(self):
        while not self._peek('EOF') and not (self.current.kind == 'KEYWORD'
                                             and self.current.value in DECL_KEYWORDS):
            self.i += 1

    # grammar

    def parse(self) -> TheoryFileAST:
        name = None
        gens, rules, lemmas = [], [], []
        if self._accept('KEYWORD', 'theory'):
            tok = self._accept('NAME')
            if tok is None:
                self.diagnostics.append(Diagnostic(self.current.location, "expected theory name"))
            else:
                name = tok.value
        seen_lemma = False
        while not self._peek('EOF'):
            start = self.current
            try:
                if self._accept('KEYWORD', 'gen'):
                    decl = self._gen_decl(start)
                    gens.append(decl)
                elif self._accept('KEYWORD', 'rule'):
                    rules.append(self._rule_decl(start))
                elif self._accept('KEYWORD', 'lemma'):
                    lemmas.append(self._lemma_decl(start))
                    seen_lemma = True
                    continue
                else:
                    self._error(f"expected 'gen', 'rule' or 'lemma', found {start}")
                if seen_lemma:
                    self.diagnostics.append(Diagnostic(
                        start.location, "generators and rules must be declared before the first lemma"))
            except _Abandon:
                if self.current is start:
                    self.i += 1
                self._skip_to_declaration()
        self._check_duplicates(gens, rules, lemmas)
        ast = TheoryFileAST(name, tuple(gens), tuple(rules), tuple(lemmas), self.filename)
        if self.diagnostics:
            raise TheorySyntaxError(self.diagnostics)
        return ast

    def _declared_name(self) -> Token:
        tok = self._accept('NAME')
        if tok is None:
            if self.current.kind == 'KEYWORD':
                self._error(f"{self.current} is a reserved word")
            self._error(f"expected a name, found {self.current}")
        return tok

    def _gen_decl(self, start: Token) -> GenDecl:
        name = self._declared_name()
        self._expect('COLON', what="':'")
        n_in = self._expect_int('an input count')
        self._expect('ARROW', what="'->'")
        n_out = self._expect_int('an output count')
        decl = GenDecl(name.value, n_in, n_out, start.location)
        self.generators[decl.name] = decl
        return decl

    def _equation(self) -> Tuple[Term, Term]:
        self._expect('COLON', what="':'")
        lhs = self._term()
        eq = self._expect('EQUALS', what="'='")
        rhs = self._term()
        if (lhs.dom, lhs.cod) != (rhs.dom, rhs.cod):
            self._error(f"sides have different arities {lhs.dom}->{lhs.cod} and "
                        f"{rhs.dom}->{rhs.cod}", eq)
        return lhs, rhs

    def _rule_decl(self, start: Token) -> RuleDecl:
        name = self._declared_name()
        lhs, rhs = self._equation()
        return RuleDecl(name.value, lhs, rhs, start.location)

    def _lemma_decl(self, start: Token) -> LemmaDecl:
        name = self._declared_name()
        lhs, rhs = self._equation()
        self._expect('KEYWORD', 'proof', "'proof'")
        steps = []
        while not self._accept('KEYWORD', 'qed'):
            if self._peek('EOF') or (self.current.kind == 'KEYWORD'
                                     and self.current.value in DECL_KEYWORDS):
                self._error(f"expected 'qed' to close lemma {name.value}")
            steps.append(self._step())
        return LemmaDecl(name.value, lhs, rhs, tuple(steps), start.location)

    def _step(self) -> StepDecl:
        start = self.current
        if self._accept('KEYWORD', 'iso'):
            return StepDecl(IsoStep(), start.location)
        self._expect('KEYWORD', 'rw', "'rw' or 'iso'")
        reverse = self._accept('MINUS') is not None
        rule = self._expect('NAME', what='a rule name').value
        occurrence = 1
        if self._accept('AT'):
            tok = self.current
            occurrence = self._expect_int('an occurrence number')
            if occurrence < 1:
                self._error("occurrences are numbered from 1", tok)
        side = 'lhs'
        if self._accept('KEYWORD', 'in'):
            tok = self._expect('NAME', what="'lhs' or 'rhs'")
            if tok.value not in ('lhs', 'rhs'):
                self._error(f"expected 'lhs' or 'rhs', found {tok}", tok)
            side = tok.value
        return StepDecl(RewriteStep(rule, reverse, occurrence, side), start.location)

    def _term(self) -> Term:
        term = self._factor()
        while True:
            tok = self._accept('SEMI')
            if tok is None:
                return term
            right = self._factor()
            try:
                term = Compose(term, right)
            except ShapeError as e:
                self._error(str(e), tok)

    def _factor(self) -> Term:
        term = self._atom()
        while self._accept('STAR'):
            term = Stack(term, self._atom())
        return term

    def _atom(self) -> Term:
        tok = self.current
        if self._accept('LPAREN'):
            term = self._term()
            self._expect('RPAREN', what="')'")
            return term
        if self._accept('KEYWORD', 'id'):
            return Id(self._expect_int('a wire count'))
        if self._accept('KEYWORD', 'sw'):
            n = self._expect_int('a wire count')
            return Swap(n, self._expect_int('a wire count'))
        if self._accept('KEYWORD', 'cup'):
            return Cup(self._expect_int('a wire count'))
        if self._accept('KEYWORD', 'cap'):
            return Cap(self._expect_int('a wire count'))
        if self._accept('NAME'):
            decl = self.generators.get(tok.value)
            if decl is None:
                self._error(f"unknown generator {tok.value!r}", tok)
            return Gen(decl.name, decl.n_in, decl.n_out)
        self._error(f"expected a term, found {tok}")

    def _check_duplicates(self, gens, rules, lemmas):
        seen = {}
        for decl in list(gens) + list(rules) + list(lemmas):
            kind = type(decl).__name__
            key = (kind == 'GenDecl', decl.name)
            if key in seen:
                self.diagnostics.append(Diagnostic(decl.location, f"{decl.name!r} is declared twice"))
            seen[key] = decl


def parse_theory(source: str, filename: str = '<string>') -> TheoryFileAST:
    return Parser(source, filename).parse()


def parse_term(text: str, signature: Signature) -> Term:
    """Parse a single term against the generators of signature."""
    parser = Parser(text, '<term>')
    parser.generators = {d.name: GenDecl(d.name, d.n_in, d.n_out)
                         for d in signature.generators.values()}
    try:
        term = parser._term()
        parser._expect('EOF', what='end of term')
    except _Abandon:
        raise TheorySyntaxError(parser.diagnostics) from None
    if parser.diagnostics:
        raise TheorySyntaxError(parser.diagnostics)
    return term


def build_theory(ast: TheoryFileAST, signature: Signature = None) -> Theory:
    """
    Resolve rule citations: a step may cite any rule or an earlier lemma.
    A supplied signature is extended rather than replaced, which lets a
    domain supply its own label equivalence.
    """
    signature = signature or Signature()
    for g in ast.generators:
        if g.name not in signature.generators:
            signature.add_generator(GeneratorDecl(g.name, g.n_in, g.n_out))
    for r in ast.rules:
        signature.rules[r.name] = Rule(r.name, r.lhs, r.rhs)
    lemmas = []
    citable = set(signature.rules)
    problems = []
    for decl in ast.lemmas:
        for step_decl in decl.steps:
            step = step_decl.step
            if isinstance(step, RewriteStep) and step.rule not in citable:
                if step.rule == decl.name or any(l.name == step.rule for l in ast.lemmas):
                    reason = f"lemma {step.rule!r} is not checked before {decl.name!r}"
                else:
                    reason = f"unknown rule {step.rule!r}"
                problems.append(f"{step_decl.location}: error: {reason}")
        lemmas.append(Lemma(decl.name, decl.lhs, decl.rhs, tuple(s.step for s in decl.steps)))
        citable.add(decl.name)
    if problems:
        raise ResolutionError('\n'.join(problems))
    logger.info(f"theory {ast.name or ast.file}: {len(ast.generators)} generators, "
                f"{len(ast.rules)} rules, {len(ast.lemmas)} lemmas")
    return Theory(signature, lemmas, ast.name)


def load_theory(path: str, signature: Signature = None) -> Tuple[TheoryFileAST, Theory]:
    with open(path, 'r', encoding='utf-8') as f:
        source = f.read()
    ast = parse_theory(source, os.fspath(path))
    return ast, build_theory(ast, signature)
