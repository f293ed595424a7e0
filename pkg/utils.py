"""
Utility functions for rendering check reports and dumping graphs
"""
import json
import logging
import os
from typing import Dict, List

from aprop import term_to_graph
from hypergraph import InterfacedGraph, to_dot, to_json_dict
from models import CheckReport
from theory import Theory

logger = logging.getLogger(__name__)


def render_report_text(report: CheckReport) -> str:
    """Human-readable summary, one line per lemma"""
    lines = [f"{report.file}" + (f" (theory {report.theory})" if report.theory else "")]
    if report.rules:
        lines.append(f"  rules   {', '.join(report.rules)}")
    for result in report.lemmas:
        if result.ok:
            lines.append(f"  ok      {result.name}  [{result.millis:.1f} ms]")
        else:
            where = f"step {result.failed_step}" if result.failed_step else "proof"
            lines.append(f"  FAILED  {result.name} at {where}: {result.reason}")
    for verdict in report.oracle or []:
        seed = f" (seed {verdict.seed})" if verdict.seed is not None else ""
        lines.append(f"  oracle  {verdict.subject}: {verdict.verdict}{seed}")
    for verdict in report.model or []:
        lines.append(f"  model   {verdict.kind} {verdict.subject}: "
                     f"{'holds' if verdict.holds else 'does not hold'}")
    for name in report.soundness_violations:
        lines.append(f"  UNSOUND {name} checked but fails in a model of every rule")
    passed = sum(1 for r in report.lemmas if r.ok)
    lines.append(f"  {passed}/{len(report.lemmas)} lemmas checked")
    return '\n'.join(lines)


def render_report_json(reports: List[CheckReport]) -> str:
    """One JSON array with a report object per checked file, even for a single file"""
    return json.dumps([r.to_dict() for r in reports], indent=2)


def statement_graphs(theory: Theory) -> Dict[str, InterfacedGraph]:
    """Graphs of every rule and lemma side, keyed '<name>.lhs' / '<name>.rhs'"""
    graphs = {}
    equations = [(r.name, r.lhs, r.rhs) for r in theory.signature.rules.values()]
    equations += [(l.name, l.lhs, l.rhs) for l in theory.lemmas]
    for name, lhs, rhs in equations:
        graphs[f"{name}.lhs"] = term_to_graph(lhs)
        graphs[f"{name}.rhs"] = term_to_graph(rhs)
    return graphs


def write_graph_dumps(theory: Theory, directory: str, fmt: str) -> List[str]:
    """Write one file per statement side in DOT or JSON format"""
    os.makedirs(directory, exist_ok=True)
    written = []
    for key, graph in statement_graphs(theory).items():
        path = os.path.join(directory, f"{key}.{fmt}")
        try:
            with open(path, 'w', encoding='utf-8') as f:
                if fmt == 'dot':
                    f.write(to_dot(graph, key))
                else:
                    json.dump(to_json_dict(graph), f, indent=2)
            written.append(path)
        except OSError as e:
            logger.error(f"Error writing graph dump {path}: {e}")
    logger.info(f"wrote {len(written)} {fmt} dumps to {directory}")
    return written
