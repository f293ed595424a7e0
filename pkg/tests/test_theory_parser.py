"""
Tests for the theory-file lexer and parser
"""
import pytest

from aprop import Compose, Gen, Id, Stack
from errors import TheorySyntaxError
from theory import IsoStep, RewriteStep
from theory_parser import load_theory, parse_term, parse_theory
from helpers import make_signature


def diagnostics_of(source: str):
    with pytest.raises(TheorySyntaxError) as info:
        parse_theory(source)
    return info.value.diagnostics


class TestParsing:

    def test_frobenius_file(self, frobenius_source):
        ast = parse_theory(frobenius_source, 'frobenius.thy')
        assert ast.name == 'frobenius'
        assert [g.name for g in ast.generators] == ['m', 'u', 'n', 'v']
        assert len(ast.rules) == 7
        assert [lemma.name for lemma in ast.lemmas] == ['frobL', 'frobR']
        steps = [s.step for s in ast.lemmas[0].steps]
        assert steps[0] == RewriteStep('unitL', reverse=True, occurrence=2)
        assert steps[-1] == IsoStep()

    def test_precedence(self):
        ast = parse_theory("gen m : 2 -> 1\nrule r : m * id 1 ; m = id 1 * m ; m\n")
        rule = ast.rules[0]
        m = Gen('m', 2, 1)
        assert rule.lhs == Compose(Stack(m, Id(1)), m)
        assert rule.rhs == Compose(Stack(Id(1), m), m)

    def test_parentheses_and_keywords(self):
        ast = parse_theory("gen a : 1 -> 1\nrule r : (a ; a) * sw 1 1 * cup 1 = a * (sw 1 1 * cup 1)\n")
        assert ast.rules[0].lhs.cod == 5

    def test_step_side(self):
        ast = parse_theory("gen a : 1 -> 1\nrule r : a = a\n"
                           "lemma l : a = a\nproof\n  rw -r @3 in rhs\n  iso\nqed\n")
        step = ast.lemmas[0].steps[0].step
        assert step == RewriteStep('r', True, 3, 'rhs')
        assert str(step) == "rw -r @3 in rhs"

    def test_comments_are_ignored(self):
        ast = parse_theory("# header\ngen a : 1 -> 1  # trailing\n")
        assert ast.generators[0].name == 'a'

    def test_round_trip(self, frobenius_source):
        ast = parse_theory(frobenius_source)
        assert parse_theory(ast.to_source()) == ast

    def test_zx_round_trip(self, theories_dir):
        ast = parse_theory((theories_dir / 'zx.thy').read_text(encoding='utf-8'))
        assert parse_theory(ast.to_source()) == ast

    def test_locations(self, frobenius_source):
        ast = parse_theory(frobenius_source, 'frobenius.thy')
        assert ast.generators[0].location.line == 4
        assert ast.generators[0].location.col == 1
        assert str(ast.generators[0].location) == 'frobenius.thy:4:1'

    def test_parse_term(self):
        term = parse_term("c ; b", make_signature())
        assert term == Compose(Gen('c', 1, 2), Gen('b', 2, 1))
        with pytest.raises(TheorySyntaxError):
            parse_term("c ;", make_signature())
        with pytest.raises(TheorySyntaxError):
            parse_term("zz", make_signature())

    def test_load_theory(self, frobenius_path):
        ast, theory = load_theory(frobenius_path)
        assert theory.name == 'frobenius'
        assert set(theory.signature.rules) == {r.name for r in ast.rules}
        assert theory.signature.arity('m') == (2, 1)


class TestDiagnostics:

    def test_missing_output_count(self):
        [diag] = diagnostics_of("gen m : 2 ->\n")
        assert "expected an output count" in diag.message

    def test_all_errors_are_reported(self):
        diags = diagnostics_of("gen a : 1 -> 1\n"
                               "rule r : a ; zz = a\n"
                               "rule s : a ; a * a = a\n")
        assert [(d.location.line, d.location.col) for d in diags] == [(2, 14), (3, 12)]
        assert "unknown generator 'zz'" in diags[0].message
        assert "cannot compose" in diags[1].message

    def test_error_text_has_positions(self):
        with pytest.raises(TheorySyntaxError) as info:
            parse_theory("gen a : 1 -> 1\nrule r : a ; zz = a\n", 'bad.thy')
        assert str(info.value).startswith("bad.thy:2:14: error:")

    def test_sides_with_different_arities(self):
        [diag] = diagnostics_of("gen a : 1 -> 1\nrule r : a = id 2\n")
        assert "different arities" in diag.message

    def test_declaration_after_lemma(self):
        diags = diagnostics_of("gen a : 1 -> 1\nlemma l : a = a proof iso qed\ngen b : 1 -> 1\n")
        assert diags[0].location.line == 3
        assert "before the first lemma" in diags[0].message

    def test_duplicate_declaration(self):
        [diag] = diagnostics_of("gen a : 1 -> 1\ngen a : 1 -> 1\n")
        assert "declared twice" in diag.message

    def test_occurrence_zero(self):
        [diag] = diagnostics_of("gen a : 1 -> 1\nrule r : a = a\n"
                                "lemma l : a = a proof rw r @0 iso qed\n")
        assert "numbered from 1" in diag.message

    def test_unexpected_character(self):
        [diag] = diagnostics_of("gen a : 1 -> 1 $\n")
        assert diag.message == "unexpected character '$'"
        assert (diag.location.line, diag.location.col) == (1, 16)

    @pytest.mark.parametrize('source, bad, col', [
        ("gen a' : 1 -> 1\n", "'", 6),
        ("gen _a : 1 -> 1\n", "_", 5),
        ("gen é : 1 -> 1\n", "é", 5),
    ])
    def test_names_are_ascii_identifiers(self, source, bad, col):
        diags = diagnostics_of(source)
        assert diags[0].message == f"unexpected character {bad!r}"
        assert (diags[0].location.line, diags[0].location.col) == (1, col)

    def test_underscore_and_digits_inside_names(self):
        ast = parse_theory("gen z_12 : 1 -> 2\n")
        assert [g.name for g in ast.generators] == ['z_12']

    def test_missing_qed(self):
        [diag] = diagnostics_of("gen a : 1 -> 1\nlemma l : a = a\nproof\n  iso\n")
        assert "expected 'qed'" in diag.message

    def test_reserved_word(self):
        [diag] = diagnostics_of("gen id : 1 -> 1\n")
        assert "reserved word" in diag.message

    def test_bad_side(self):
        [diag] = diagnostics_of("gen a : 1 -> 1\nrule r : a = a\n"
                                "lemma l : a = a proof rw r in middle iso qed\n")
        assert "'lhs' or 'rhs'" in diag.message
