import os
import random
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))
sys.path.insert(0, str(Path(__file__).resolve().parent))

os.environ.setdefault('DIAGCHECK_ENV', 'testing')

THEORIES = ROOT / 'theories'


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def theories_dir() -> Path:
    return THEORIES


@pytest.fixture
def frobenius_path() -> Path:
    return THEORIES / 'frobenius.thy'


@pytest.fixture
def frobenius_source(frobenius_path) -> str:
    return frobenius_path.read_text(encoding='utf-8')


@pytest.fixture
def frobenius_theory(frobenius_path):
    from theory_parser import load_theory
    _, theory = load_theory(frobenius_path)
    return theory


@pytest.fixture
def write_theory(tmp_path):
    """Write a theory source to a temporary .thy file and return its path."""
    def _write(source: str, name: str = 'scratch.thy') -> Path:
        path = tmp_path / name
        path.write_text(source, encoding='utf-8')
        return path
    return _write
