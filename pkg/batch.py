"""
Batch checking of theory files
"""
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

from config import get_config
from errors import DiagCheckError, ResolutionError, TheorySyntaxError
from models import CheckReport
from tensor import TensorModel
from theory import check_theory
from theory_parser import load_theory
from utils import write_graph_dumps

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


@dataclass
class CheckOptions:
    oracle_trials: int = 0
    seed: Optional[int] = None
    model: Optional[TensorModel] = None
    dump_dot: Optional[str] = None
    dump_json: Optional[str] = None


@dataclass
class FileOutcome:
    path: str
    report: Optional[CheckReport] = None
    error: Optional[str] = None

    @property
    def exit_code(self) -> int:
        if self.report is None:
            return EXIT_USAGE
        return self.report.exit_code


def collect_theory_files(paths: List[str]) -> Tuple[List[str], List[str]]:
    """
    Expand directories into the theory files below them.

    Returns:
        (files found, paths that do not exist)
    """
    files, missing = [], []
    for path in paths:
        if os.path.isdir(path):
            for root, dirs, names in os.walk(path):
                dirs.sort()
                for name in sorted(names):
                    if Path(name).suffix.lower() in get_config().THEORY_EXTENSIONS:
                        files.append(os.path.join(root, name))
        elif os.path.isfile(path):
            files.append(path)
        else:
            logger.warning(f"No such theory file: {path}")
            missing.append(path)
    return files, missing


def check_file(path: str, options: CheckOptions) -> FileOutcome:
    """Parse, resolve and check one file; errors are captured, never raised."""
    try:
        _, theory = load_theory(path)
    except (TheorySyntaxError, ResolutionError) as e:
        return FileOutcome(path, error=str(e))
    except OSError as e:
        logger.error(f"Error reading {path}: {e}")
        return FileOutcome(path, error=f"{path}: {e.strerror or e}")

    try:
        report = check_theory(theory, file=path, oracle_trials=options.oracle_trials,
                              seed=options.seed, model=options.model)
    except DiagCheckError as e:
        logger.error(f"Error checking {path}: {e}")
        return FileOutcome(path, error=f"{path}: {e}")

    stem = Path(path).stem
    if options.dump_dot:
        write_graph_dumps(theory, os.path.join(options.dump_dot, stem), 'dot')
    if options.dump_json:
        write_graph_dumps(theory, os.path.join(options.dump_json, stem), 'json')
    return FileOutcome(path, report=report)


def run_check_batch(paths: List[str], options: CheckOptions,
                    workers: int = None) -> List[FileOutcome]:
    """Check every file on a thread pool; outcomes keep the input order."""
    workers = workers or get_config().CHECK_PARALLEL_WORKERS
    if workers <= 1 or len(paths) <= 1:
        return [check_file(p, options) for p in paths]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda p: check_file(p, options), paths))


def batch_exit_code(outcomes: List[FileOutcome], missing: List[str]) -> int:
    if missing or any(o.exit_code == EXIT_USAGE for o in outcomes):
        return EXIT_USAGE
    return max((o.exit_code for o in outcomes), default=EXIT_OK)
