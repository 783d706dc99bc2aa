"""Command-line pipeline driver.

Runs the pipeline up to a requested stage (``chart``, ``spec``, ``if``,
``solutions``) and writes the stage artifact to stdout or a file;
diagnostics and statistics go to stderr.  Exit codes: 0 success, 1 no
parse or zero solutions, 2 usage or input error, 3 cyclic specialization
refused.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .chart import build_backbone_chart, specialize_chart, string_to_fsa
from .errors import (
    CyclicGrammarError,
    CyclicSpecializationError,
    FsaSyntaxError,
    GrammarSyntaxError,
    GrammarValidationError,
    NoParseError,
)
from .formats import emit, parse_fsa_file, parse_grammar_file
from .grammar import GrammarKind
from .solutions import EnumerationStats, enumerate_solutions
from .transform import TransformStats, to_interaction_free

STAGES = ("chart", "spec", "if", "solutions")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ifg",
        description="Parse input with a unification grammar and enumerate "
        "feature-structure solutions via an interaction-free grammar.",
    )
    p.add_argument("--grammar", "-g", required=True, help="grammar file")
    p.add_argument("--input", "-i", help="input tokens, whitespace-separated")
    p.add_argument("--fsa", help="input word lattice file")
    p.add_argument("--emit", choices=STAGES, default="solutions", help="stage to emit")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("-o", metavar="PATH", dest="output", help="write the artifact here")
    p.add_argument("--stats", action="store_true", help="print per-stage statistics to stderr")
    p.add_argument(
        "--keep-unreachable",
        action="store_true",
        help="skip the unreachable-rule sweep after the transformation",
    )
    return p


def _fail(message: str, code: int) -> int:
    print(f"ifg: {message}", file=sys.stderr)
    return code


def _write(artifact, args) -> None:
    data = emit(artifact, args.format)
    if args.output:
        Path(args.output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2

    try:
        text = Path(args.grammar).read_text("utf-8")
    except OSError as e:
        return _fail(f"cannot read grammar: {e}", 2)
    try:
        grammar = parse_grammar_file(text)
    except GrammarSyntaxError as e:
        return _fail(f"{args.grammar}:{e}", 2)
    except GrammarValidationError as e:
        for v in e.report:
            print(f"ifg: {args.grammar}: {v}", file=sys.stderr)
        return 2

    if args.input is not None and args.fsa is not None:
        return _fail("--input and --fsa are mutually exclusive", 2)
    fsa = None
    if args.input is not None:
        tokens = args.input.split()
        fsa = string_to_fsa(tokens)
    elif args.fsa is not None:
        try:
            fsa = parse_fsa_file(Path(args.fsa).read_text("utf-8"))
        except OSError as e:
            return _fail(f"cannot read lattice: {e}", 2)
        except FsaSyntaxError as e:
            return _fail(f"{args.fsa}: {e}", 2)
        if not fsa.is_acyclic():
            print("ifg: note: the input lattice contains cycles", file=sys.stderr)

    stats_lines: list[str] = []

    if grammar.kind is GrammarKind.REFERENCE:
        if fsa is None:
            return _fail("a reference grammar needs --input or --fsa", 2)
        chart = build_backbone_chart(grammar, fsa)
        if args.emit == "chart":
            _write(chart, args)
            _emit_stats(args, [f"chart edges={len(chart)}"])
            return 0
        try:
            spec = specialize_chart(chart)
        except NoParseError as e:
            return _fail(str(e), 1)
        except CyclicSpecializationError as e:
            if args.emit == "spec" and e.grammar is not None:
                _write(e.grammar, args)
            return _fail(str(e), 3)
        stats_lines.append(f"spec rules={len(spec.rules)}")
    elif fsa is not None:
        return _fail(f"a {grammar.kind.value} grammar does not take input", 2)
    elif args.emit == "chart":
        return _fail("the chart stage needs a reference grammar", 2)
    else:
        spec = grammar

    if args.emit == "spec":
        _write(spec, args)
        _emit_stats(args, stats_lines)
        return 0

    if spec.kind is GrammarKind.INTERACTION_FREE:
        ifg = spec
    else:
        tstats = TransformStats()
        try:
            ifg = to_interaction_free(spec, sweep=not args.keep_unreachable, stats=tstats)
        except CyclicGrammarError as e:
            return _fail(str(e), 3)
        stats_lines.append(
            "if rules={} expansions={} produced={} eliminated={} "
            "dropped={} pruned={} swept={}".format(
                len(ifg.rules),
                tstats.expansions,
                tstats.produced,
                tstats.eliminated,
                tstats.dropped_input_rules,
                tstats.pruned_dead,
                tstats.swept,
            )
        )

    if args.emit == "if":
        _write(ifg, args)
        _emit_stats(args, stats_lines)
        return 0

    estats = EnumerationStats()
    solutions = list(enumerate_solutions(ifg, estats))
    _write(solutions, args)
    stats_lines.append(f"solutions count={estats.solutions} failures={estats.failures}")
    _emit_stats(args, stats_lines)
    return 0 if solutions else 1


def _emit_stats(args, lines: list[str]) -> None:
    if args.stats:
        for line in lines:
            print(f"ifg: stats: {line}", file=sys.stderr)


def main() -> None:
    sys.exit(run(sys.argv[1:]))
