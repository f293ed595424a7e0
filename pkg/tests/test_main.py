"""
Tests for the diagcheck command line
"""
import json

import pytest

from batch import EXIT_FAILED, EXIT_OK, EXIT_USAGE, collect_theory_files
from config import get_config
from main import main


@pytest.fixture
def broken_frobenius(frobenius_source, write_theory):
    # frobR's first step reversed
    source = frobenius_source.replace("  rw -frob\n  rw frobL", "  rw frob\n  rw frobL")
    assert source != frobenius_source
    return write_theory(source, 'broken.thy')


class TestCheckCommand:

    def test_all_lemmas_check(self, frobenius_path, capsys):
        assert main(['check', str(frobenius_path)]) == EXIT_OK
        out = capsys.readouterr().out
        assert 'ok      frobL' in out
        assert '2/2 lemmas checked' in out
        assert 'rules   assoc, unitL, unitR, coassoc, counitL, counitR, frob' in out

    def test_failing_lemma(self, broken_frobenius, capsys):
        assert main(['check', '--json', str(broken_frobenius)]) == EXIT_FAILED
        report = json.loads(capsys.readouterr().out)[0]
        assert report['lemmas'][0]['status'] == 'ok'
        assert report['lemmas'][1]['status'] == 'failed'
        assert report['lemmas'][1]['failed_step'] == 1

    def test_json_report(self, frobenius_path, capsys):
        main(['check', '--json', str(frobenius_path)])
        reports = json.loads(capsys.readouterr().out)
        assert isinstance(reports, list) and len(reports) == 1
        report = reports[0]
        assert report['theory'] == 'frobenius'
        assert report['rules'] == ['assoc', 'unitL', 'unitR', 'coassoc', 'counitL', 'counitR', 'frob']
        assert report['file'] == str(frobenius_path)
        assert [lemma['name'] for lemma in report['lemmas']] == ['frobL', 'frobR']
        assert 'oracle' not in report

    def test_syntax_error(self, write_theory, capsys):
        path = write_theory("gen a : 1 -> 1\nrule r : a ; zz = a\n", 'bad.thy')
        assert main(['check', str(path)]) == EXIT_USAGE
        assert ':2:14: error: unknown generator' in capsys.readouterr().err

    def test_resolution_error(self, write_theory, capsys):
        path = write_theory("gen a : 1 -> 1\nlemma l : a = a\nproof\n  rw nowhere\n  iso\nqed\n")
        assert main(['check', str(path)]) == EXIT_USAGE
        assert "unknown rule 'nowhere'" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert main(['check', str(tmp_path / 'absent.thy')]) == EXIT_USAGE
        assert 'no such file' in capsys.readouterr().err

    def test_bad_arguments(self, capsys):
        assert main(['check', '--bogus']) == EXIT_USAGE
        assert main([]) == EXIT_USAGE
        assert main(['--help']) == EXIT_OK

    def test_oracle(self, frobenius_path, capsys):
        assert main(['check', '--json', '--oracle', '2', '--seed', '7', str(frobenius_path)]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)[0]
        verdicts = {v['subject']: v['verdict'] for v in report['oracle']}
        assert len(verdicts) == 9
        assert verdicts['assoc'] == 'refuted'

    def test_model(self, theories_dir, capsys):
        args = ['check', '--json', '--model', str(theories_dir / 'zx.json'), str(theories_dir / 'zx.thy')]
        assert main(args) == EXIT_OK
        report = json.loads(capsys.readouterr().out)[0]
        assert report['model'] and all(v['holds'] for v in report['model'])

    def test_unreadable_model(self, frobenius_path, write_theory, capsys):
        broken = write_theory('{', 'model.json')
        assert main(['check', '--model', str(broken), str(frobenius_path)]) == EXIT_USAGE
        assert 'cannot load model' in capsys.readouterr().err

    def test_graph_dumps(self, frobenius_path, tmp_path):
        dot_dir, json_dir = tmp_path / 'dot', tmp_path / 'json'
        main(['check', '--dump-dot', str(dot_dir), '--dump-json', str(json_dir), str(frobenius_path)])
        assert (dot_dir / 'frobenius' / 'frobL.lhs.dot').read_text().startswith('digraph')
        dumped = json.loads((json_dir / 'frobenius' / 'assoc.rhs.json').read_text())
        assert set(dumped) == {'edges', 'extra_vertices', 'inputs', 'outputs'}

    def test_directory_on_a_pool(self, theories_dir, capsys):
        assert main(['check', '--json', '--workers', '2', str(theories_dir)]) == EXIT_OK
        reports = json.loads(capsys.readouterr().out)
        assert [r['theory'] for r in reports] == ['frobenius', 'zx']

    def test_composite_prime_is_a_usage_error(self, frobenius_path, monkeypatch, capsys):
        monkeypatch.setattr(get_config(), 'PRIME', 1_000_000)
        assert main(['check', '--oracle', '2', str(frobenius_path)]) == EXIT_USAGE
        assert 'invalid configuration: prime' in capsys.readouterr().err

    def test_failure_and_usage_error_together(self, broken_frobenius, tmp_path):
        assert main(['check', str(broken_frobenius), str(tmp_path / 'absent.thy')]) == EXIT_USAGE

    def test_collect_theory_files(self, theories_dir, tmp_path):
        files, missing = collect_theory_files([str(theories_dir), str(tmp_path / 'nope.thy')])
        assert [f.rsplit('/', 1)[-1] for f in files] == ['frobenius.thy', 'zx.thy']
        assert missing == [str(tmp_path / 'nope.thy')]


class TestOtherCommands:

    def test_matches(self, frobenius_path, capsys):
        assert main(['matches', str(frobenius_path), 'frobL', '1']) == EXIT_OK
        out = capsys.readouterr().out
        assert 'frobL step 1 (rw -unitL @2): 5 occurrences in the lhs' in out

    def test_matches_later_step(self, frobenius_path, capsys):
        assert main(['matches', str(frobenius_path), 'frobL', '3']) == EXIT_OK
        assert '(rw assoc): 1 occurrences' in capsys.readouterr().out

    def test_matches_rejects_iso_step(self, frobenius_path, capsys):
        assert main(['matches', str(frobenius_path), 'frobL', '6']) == EXIT_USAGE
        assert 'not a rewrite step' in capsys.readouterr().err

    def test_matches_unknown_lemma(self, frobenius_path):
        assert main(['matches', str(frobenius_path), 'nope', '1']) == EXIT_USAGE

    def test_show_rule_as_dot(self, frobenius_path, capsys):
        assert main(['show', str(frobenius_path), 'frob', '--format', 'dot']) == EXIT_OK
        out = capsys.readouterr().out
        assert 'digraph "frob.lhs"' in out and 'digraph "frob.rhs"' in out

    def test_show_generator(self, frobenius_path, capsys):
        assert main(['show', str(frobenius_path), 'm']) == EXIT_OK
        shown = json.loads(capsys.readouterr().out)
        assert shown['m']['inputs'] == [1, 2]

    def test_show_lemma(self, frobenius_path, capsys):
        assert main(['show', str(frobenius_path), 'frobR', '--lemma']) == EXIT_OK
        assert set(json.loads(capsys.readouterr().out)) == {'frobR.lhs', 'frobR.rhs'}

    def test_show_unknown(self, frobenius_path):
        assert main(['show', str(frobenius_path), 'nothing']) == EXIT_USAGE
