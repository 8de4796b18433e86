"""Corpus benchmarking and the stats CSV format."""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from statistics import mean

from .generator import MODES, generate
from .grammar import parse_sem

FIELDS = ('input', 'mode', 'edges_created', 'edges_pruned_internal',
          'edges_pruned_external', 'outputs', 'time_ms')

AGGREGATE = 'AGGREGATE'


@dataclass
class StatsRow:
    input: str
    mode: str
    edges_created: float
    edges_pruned_internal: int | None
    edges_pruned_external: int | None
    outputs: int | None
    time_ms: float

    def as_dict(self):
        return {f: ('' if getattr(self, f) is None else getattr(self, f)) for f in FIELDS}


def row_for(sem_text: str, mode: str, result) -> StatsRow:
    s = result.stats
    return StatsRow(sem_text, mode, s.edges_created, s.pruned_internal,
                    s.pruned_external, s.outputs, round(s.time_ms, 3))


def read_corpus(text: str) -> list:
    out = []
    for line in text.splitlines():
        line = line.split('#', 1)[0].strip()
        if line:
            out.append(line)
    return out


def reduction(before: float, after: float) -> float:
    return 0.0 if before == 0 else 100.0 * (before - after) / before


@dataclass
class BenchResult:
    rows: list
    strings: dict        # (input, mode) -> set of strings

    def rows_for(self, mode):
        return [r for r in self.rows if r.mode == mode]

    def edge_reductions(self) -> list:
        none = {r.input: r for r in self.rows_for('none')}
        return [(r.input, reduction(none[r.input].edges_created, r.edges_created))
                for r in self.rows_for('both')]

    def aggregate(self) -> StatsRow:
        none = {r.input: r for r in self.rows_for('none')}
        both = self.rows_for('both')
        edges = mean(reduction(none[r.input].edges_created, r.edges_created) for r in both)
        times = mean(reduction(none[r.input].time_ms, r.time_ms) for r in both)
        return StatsRow(AGGREGATE, 'both-vs-none', round(edges, 3), None, None, None, round(times, 3))


def run_bench(grammar, table, corpus: list, modes=MODES) -> BenchResult:
    rows = []
    strings = {}
    for text in corpus:
        sem = parse_sem(text)
        for mode in modes:
            res = generate(grammar, table, sem, mode)
            rows.append(row_for(text, mode, res))
            strings[(text, mode)] = res.strings
    return BenchResult(rows, strings)


def write_rows(path, rows, append=False):
    new = not (append and os.path.exists(path) and os.path.getsize(path) > 0)
    with open(path, 'a' if append else 'w', newline='', encoding='utf-8') as f:
        w = csv.DictWriter(f, fieldnames=FIELDS)
        if new:
            w.writeheader()
        for r in rows:
            w.writerow(r.as_dict())


def parse_rows(text: str) -> list:
    rows = []
    for d in csv.DictReader(io.StringIO(text)):
        def num(key, kind):
            return None if d[key] == '' else kind(d[key])
        rows.append(StatsRow(d['input'], d['mode'], num('edges_created', float),
                             num('edges_pruned_internal', int), num('edges_pruned_external', int),
                             num('outputs', int), num('time_ms', float)))
    return rows
