"""
Command-line entry point: diagcheck check | matches | show
"""
import argparse
import json
import logging
import sys
from typing import List, Optional

from aprop import term_to_graph
from batch import (EXIT_FAILED, EXIT_OK, EXIT_USAGE, CheckOptions, batch_exit_code,
                   collect_theory_files, run_check_batch)
from config import get_config
from errors import DiagCheckError, ResolutionError, TheorySyntaxError
from hypergraph import to_dot, to_json_dict
from rewrite import find_matches
from theory import RewriteStep, StepFailure, load_model_manifest, replay
from theory_parser import load_theory
from utils import render_report_json, render_report_text, statement_graphs

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='diagcheck',
                                     description='Check equational proofs about string diagrams.')
    parser.add_argument('-v', '--verbose', action='count', default=0)
    sub = parser.add_subparsers(dest='command', required=True)

    check = sub.add_parser('check', help='replay every lemma proof in theory files')
    check.add_argument('files', nargs='+', metavar='FILE')
    check.add_argument('--oracle', type=int, default=0, metavar='TRIALS',
                       help='compare every equation under random interpretations')
    check.add_argument('--seed', type=int, default=None)
    check.add_argument('--json', action='store_true', help='emit the report as JSON')
    check.add_argument('--dump-dot', metavar='DIR')
    check.add_argument('--dump-json', metavar='DIR')
    check.add_argument('--model', metavar='MANIFEST', help='JSON tensor model of the generators')
    check.add_argument('--workers', type=int, default=None)

    matches = sub.add_parser('matches', help='list the occurrences a proof step can use')
    matches.add_argument('file', metavar='FILE')
    matches.add_argument('lemma', metavar='LEMMA')
    matches.add_argument('step', type=int, metavar='STEP')

    show = sub.add_parser('show', help='dump the graphs of a rule, lemma or generator')
    show.add_argument('file', metavar='FILE')
    show.add_argument('name', metavar='NAME')
    show.add_argument('--lemma', action='store_true', help='NAME is a lemma')
    show.add_argument('--format', choices=['json', 'dot'], default='json')
    return parser


def _configure_logging(verbosity: int):
    settings = get_config()
    level = settings.LOG_LEVEL
    if verbosity == 1:
        level = 'INFO'
    elif verbosity >= 2:
        level = 'DEBUG'
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format=settings.LOG_FORMAT)


def _load(path: str):
    try:
        return load_theory(path)
    except (TheorySyntaxError, ResolutionError) as e:
        print(str(e), file=sys.stderr)
    except OSError as e:
        print(f"{path}: {e.strerror or e}", file=sys.stderr)
    return None, None


def cmd_check(args) -> int:
    files, missing = collect_theory_files(args.files)
    for path in missing:
        print(f"{path}: no such file", file=sys.stderr)
    options = CheckOptions(oracle_trials=args.oracle, seed=args.seed,
                           dump_dot=args.dump_dot, dump_json=args.dump_json)
    if args.model:
        try:
            options.model = load_model_manifest(args.model)
        except (OSError, ValueError, KeyError) as e:
            print(f"{args.model}: cannot load model: {e}", file=sys.stderr)
            return EXIT_USAGE
    outcomes = run_check_batch(files, options, args.workers)
    for outcome in outcomes:
        if outcome.error:
            print(outcome.error, file=sys.stderr)
    reports = [o.report for o in outcomes if o.report is not None]
    if args.json:
        if reports:
            print(render_report_json(reports))
    else:
        for report in reports:
            print(render_report_text(report))
    return batch_exit_code(outcomes, missing)


def cmd_matches(args) -> int:
    _, theory = _load(args.file)
    if theory is None:
        return EXIT_USAGE
    names = [lemma.name for lemma in theory.lemmas]
    if args.lemma not in names:
        print(f"no lemma named {args.lemma!r}", file=sys.stderr)
        return EXIT_USAGE
    position = names.index(args.lemma)
    lemma = theory.lemmas[position]
    if not 1 <= args.step <= len(lemma.proof) or not isinstance(lemma.proof[args.step - 1], RewriteStep):
        print(f"step {args.step} of {lemma.name} is not a rewrite step", file=sys.stderr)
        return EXIT_USAGE
    step = lemma.proof[args.step - 1]
    available = dict(theory.signature.rules)
    available.update((l.name, l.as_rule()) for l in theory.lemmas[:position])
    if step.rule not in available:
        print(f"rule {step.rule!r} is not available", file=sys.stderr)
        return EXIT_USAGE
    try:
        goals = replay(lemma, available, theory.signature, args.step)
    except StepFailure as failure:
        print(f"cannot reach step {args.step}: step {failure.step}: {failure.reason}", file=sys.stderr)
        return EXIT_FAILED
    pattern = term_to_graph(available[step.rule].sides(step.reverse)[0])
    found = find_matches(pattern, goals[step.side], theory.signature.equivalence)
    print(f"{lemma.name} step {args.step} ({step}): {len(found)} occurrences in the {step.side}")
    for k, match in enumerate(found, 1):
        print(f"  @{k}: edges {list(match.image_edges)} vertices "
              f"{[match.vertex_map[v] for v in sorted(match.vertex_map)]}")
    return EXIT_OK


def cmd_show(args) -> int:
    _, theory = _load(args.file)
    if theory is None:
        return EXIT_USAGE
    graphs = statement_graphs(theory)
    if args.lemma:
        if args.name not in [l.name for l in theory.lemmas]:
            print(f"no lemma named {args.name!r}", file=sys.stderr)
            return EXIT_USAGE
        selected = {k: graphs[k] for k in (f"{args.name}.lhs", f"{args.name}.rhs")}
    elif args.name in theory.signature.rules:
        selected = {k: graphs[k] for k in (f"{args.name}.lhs", f"{args.name}.rhs")}
    elif args.name in theory.signature.generators:
        selected = {args.name: term_to_graph(theory.signature.gen(args.name))}
    else:
        print(f"no rule or generator named {args.name!r}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == 'dot':
        for key, graph in selected.items():
            sys.stdout.write(to_dot(graph, key))
    else:
        print(json.dumps({key: to_json_dict(g) for key, g in selected.items()}, indent=2))
    return EXIT_OK


COMMANDS = {'check': cmd_check, 'matches': cmd_matches, 'show': cmd_show}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    _configure_logging(args.verbose)
    invalid = [knob for knob, ok in get_config().validate_config().items() if not ok]
    if invalid:
        print(f"invalid configuration: {', '.join(invalid)}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except DiagCheckError as e:
        logger.error(f"{args.command} failed: {e}")
        print(str(e), file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
