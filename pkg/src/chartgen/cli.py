"""Command-line entry point.

Exit codes: 0 ok, 1 usage, 2 parse/read error, 3 iteration cap exceeded,
4 soundness failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from typing import Optional

from . import bench
from .domains import (
    DEFAULT_MAX_ITER,
    FixedPointError,
    TableError,
    compile_inner,
    compile_outer,
    load_table,
    serialize_table,
)
from .generator import MODES, generate
from .grammar import GrammarError, parse_grammar, parse_sem
from .oracle import check_soundness

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_CAP, EXIT_UNSOUND = 0, 1, 2, 3, 4

log = logging.getLogger('chartgen')


@dataclass
class RunConfig:
    grammar: Optional[str] = None
    domains: Optional[str] = None
    semantics: Optional[str] = None
    prune: str = 'none'
    max_iter: int = DEFAULT_MAX_ITER
    trace: bool = False
    stats: Optional[str] = None
    depth: int = 4
    out: Optional[str] = None
    inner_out: Optional[str] = None
    corpus: Optional[str] = None


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f'{self.prog}: error: {message}\n')


def _read(path, what):
    try:
        with open(path, encoding='utf-8') as f:
            return f.read()
    except OSError as e:
        raise _Fail(EXIT_PARSE, f'cannot read {what} {path!r}: {e.strerror}') from None


def _grammar(cfg):
    try:
        return parse_grammar(_read(cfg.grammar, 'grammar'))
    except GrammarError as e:
        raise _Fail(EXIT_PARSE, f'{cfg.grammar}: {e}') from None


def _table(cfg):
    try:
        return load_table(_read(cfg.domains, 'domain table'))
    except TableError as e:
        raise _Fail(EXIT_PARSE, f'{cfg.domains}: {e}') from None


def _write(path, text):
    try:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
    except OSError as e:
        raise _Fail(EXIT_PARSE, f'cannot write {path!r}: {e.strerror}') from None


def cmd_compile(cfg: RunConfig) -> int:
    g = _grammar(cfg)
    try:
        inner = compile_inner(g, cfg.max_iter)
        outer = compile_outer(g, cfg.max_iter, inner=inner)
    except FixedPointError as e:
        raise _Fail(EXIT_CAP, str(e)) from None
    _write(cfg.out, serialize_table(outer))
    if cfg.inner_out:
        _write(cfg.inner_out, serialize_table(inner))
    print(f'inner: {len(inner)} triples, {inner.iterations} iterations')
    print(f'outer: {len(outer)} triples, {outer.iterations} iterations')
    return EXIT_OK


def cmd_generate(cfg: RunConfig) -> int:
    g = _grammar(cfg)
    table = _table(cfg) if cfg.prune != 'none' or cfg.domains else None
    text = _read(cfg.semantics, 'semantics')
    try:
        sem = parse_sem(text)
    except GrammarError as e:
        raise _Fail(EXIT_PARSE, f'{cfg.semantics}: {e}') from None
    trace = (lambda line: print(line, file=sys.stderr)) if cfg.trace else None
    result = generate(g, table, sem, cfg.prune, trace=trace)
    for msg in result.diagnostics:
        print(f'warning: {msg}', file=sys.stderr)
    for s in sorted(result.strings):
        print(s)
    if cfg.stats:
        bench.write_rows(cfg.stats, [bench.row_for(str(sem), cfg.prune, result)], append=True)
    return EXIT_OK


def cmd_oracle(cfg: RunConfig) -> int:
    if cfg.depth < 1:
        raise _Fail(EXIT_USAGE, 'depth must be >= 1')
    g = _grammar(cfg)
    outer = _table(cfg)
    try:
        inner = compile_inner(g, cfg.max_iter)
    except FixedPointError as e:
        raise _Fail(EXIT_CAP, str(e)) from None
    report = check_soundness(g, inner, outer, cfg.depth)
    for line in report.lines():
        print(line)
    total = report.inner_facts + report.outer_facts
    print(f'licensed: {"100%" if report.sound else "INCOMPLETE"} of {total} binding facts')
    return EXIT_OK if report.sound else EXIT_UNSOUND


def cmd_bench(cfg: RunConfig) -> int:
    g = _grammar(cfg)
    table = _table(cfg)
    corpus = bench.read_corpus(_read(cfg.corpus, 'corpus'))
    try:
        result = bench.run_bench(g, table, corpus)
    except GrammarError as e:
        raise _Fail(EXIT_PARSE, f'{cfg.corpus}: {e}') from None
    agg = result.aggregate()
    bench.write_rows(cfg.stats, result.rows + [agg])
    for text, red in result.edge_reductions():
        print(f'{red:6.1f}% fewer edges  {text}')
    print(f'mean edge reduction {agg.edges_created:.1f}%, mean time reduction {agg.time_ms:.1f}%')
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog='chartgen', description='Index-domain compiler and pruning chart generator.')
    p.add_argument('-v', '--verbose', action='store_true')
    sub = p.add_subparsers(dest='command', parser_class=_Parser)

    c = sub.add_parser('compile', help='compile outer (and inner) domain tables')
    c.add_argument('--grammar', required=True)
    c.add_argument('--out', required=True)
    c.add_argument('--inner-out')
    c.add_argument('--max-iter', type=int, default=DEFAULT_MAX_ITER)

    g = sub.add_parser('generate', help='generate sentences from a semantics file')
    g.add_argument('--grammar', required=True)
    g.add_argument('--domains')
    g.add_argument('--sem', required=True, dest='semantics')
    g.add_argument('--prune', choices=MODES, default='none')
    g.add_argument('--trace', action='store_true')
    g.add_argument('--stats')

    o = sub.add_parser('oracle', help='check tables against enumerated derivations')
    o.add_argument('--grammar', required=True)
    o.add_argument('--domains', required=True)
    o.add_argument('--depth', type=int, default=4)
    o.add_argument('--max-iter', type=int, default=DEFAULT_MAX_ITER)

    b = sub.add_parser('bench', help='run a corpus under every prune mode')
    b.add_argument('--grammar', required=True)
    b.add_argument('--domains', required=True)
    b.add_argument('--corpus', required=True)
    b.add_argument('--stats', required=True)
    return p


COMMANDS = {'compile': cmd_compile, 'generate': cmd_generate,
            'oracle': cmd_oracle, 'bench': cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(name)s: %(message)s')
    fields = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    cfg = RunConfig(**fields)
    if args.command == 'generate' and cfg.prune != 'none' and not cfg.domains:
        parser.error('--domains is required when --prune is not none')
    try:
        return COMMANDS[args.command](cfg)
    except _Fail as e:
        print(f'chartgen: {e}', file=sys.stderr)
        return e.code


if __name__ == '__main__':
    sys.exit(main())
