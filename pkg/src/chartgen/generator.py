"""
Lexicalist chart generation from flat semantics.

The input bag of literals is looked up in the lexicon, the resulting
inactive edges seed an agenda, and edges are combined bottom-up with
dotted rules.  Two edges combine only when their covered literals are
disjoint, so the chart behaves like a parser for a language with free word
order.  Optionally every newly built inactive edge must pass the internal
and/or external validation tests against a compiled outer-domain table.
"""

from __future__ import annotations

import itertools
import random
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .domains import DomainTable, expand
from .fs import FeatureStructure, prefixes, unify, unify_at
from .grammar import Grammar, LexEntry, Literal, Rule, SemInput, validate_coherence

MODES = ('none', 'internal', 'external', 'both')


class GenerationImpossible(ValueError):
    def __init__(self, uncovered):
        self.uncovered = list(uncovered)
        super().__init__('no lexical entry covers: ' + ', '.join(str(l) for l in self.uncovered))


@dataclass(eq=False)
class Edge:
    id: int
    structure: FeatureStructure     # rule structure, or the sign itself for lexical edges
    rule: Optional[Rule]
    dot: int
    covered: frozenset               # positions in the input bag
    indices: frozenset
    derivations: list = field(default_factory=list)
    rule_no: int = -1

    @property
    def active(self) -> bool:
        return self.rule is not None and self.dot < self.rule.arity

    @property
    def sign(self) -> FeatureStructure:
        if self.rule is None:
            return self.structure
        return self.structure.at(('0',))

    @property
    def cat(self) -> Optional[str]:
        if self.rule is None:
            return self.structure.atom_at(('cat',))
        return self.structure.atom_at(('0', 'cat'))

    @property
    def next_cat(self) -> Optional[str]:
        return self.structure.atom_at((str(self.dot + 1), 'cat'))

    def key(self):
        if self.active:
            return ('A', self.rule_no, self.dot, self.structure, self.covered)
        return ('I', self.sign, self.covered)

    @property
    def words(self) -> tuple:
        """Surface string of the first derivation."""
        d = self.derivations[0]
        if isinstance(d, str):
            return (d,)
        prev, child, _ = d
        return (prev.words if prev is not None else ()) + child.words

    def realizations(self, _memo=None) -> set:
        """Every word sequence this (packed) edge stands for."""
        memo = {} if _memo is None else _memo
        if self.id in memo:
            return memo[self.id]
        memo[self.id] = set()   # guards against cyclic packing
        out = set()
        for d in self.derivations:
            if isinstance(d, str):
                out.add((d,))
                continue
            prev, child, _ = d
            left = prev.realizations(memo) if prev is not None else {()}
            for a, b in itertools.product(left, child.realizations(memo)):
                out.add(a + b)
        memo[self.id] = out
        return out

    def trees(self, limit: int = 50):
        """Yield derivation trees: ``('lex', edge)`` or ``('rule', edge, kids, rule)``.

        Inactive edges are packed by sign and coverage alone, so the
        derivations of one edge may come from different rules.
        """
        for d in itertools.islice(self._trees(), limit):
            yield d

    def _trees(self):
        for d in self.derivations:
            if isinstance(d, str):
                yield ('lex', self)
                continue
            for kids in self._kid_lists(d):
                yield ('rule', self, kids, d[2])

    @staticmethod
    def _kid_lists(d):
        prev, child, _ = d
        heads = prev._daughter_lists() if prev is not None else [()]
        for h in heads:
            for t in child._trees():
                yield h + (t,)

    def _daughter_lists(self):
        # active edges: every derivation shares this edge's rule
        for d in self.derivations:
            yield from self._kid_lists(d)

    def __repr__(self):
        kind = 'active' if self.active else 'inactive'
        return f'<Edge {self.id} {kind} cat={self.cat} covered={sorted(self.covered)} "{" ".join(self.words)}">'


@dataclass
class GenStats:
    edges_created: int = 0
    inactive_created: int = 0
    active_created: int = 0
    pruned_internal: int = 0
    pruned_external: int = 0
    agenda_pops: int = 0
    outputs: int = 0
    time_ms: float = 0.0


@dataclass
class GenResult:
    strings: set
    stats: GenStats
    outputs: list = field(default_factory=list)
    chart: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# lexical lookup
# ---------------------------------------------------------------------------

def _matchings(entry: LexEntry, literals):
    """Injective assignments of templates to bag positions with var bindings."""
    templates = entry.templates

    def extend(i, used, binding):
        if i == len(templates):
            yield tuple(used), dict(binding)
            return
        t = templates[i]
        for pos, lit in enumerate(literals):
            if pos in used or lit.pred != t.pred or len(lit.args) != len(t.args):
                continue
            b = dict(binding)
            for targ, arg in zip(t.args, lit.args):
                if isinstance(targ, str):
                    if targ != arg:
                        break
                elif not arg[:1].islower():
                    break          # variables only bind indices
                elif b.setdefault(targ.name, arg) != arg:
                    break
            else:
                yield from extend(i + 1, used + [pos], b)

    yield from extend(0, [], {})


def lex_lookup(sem: SemInput, g: Grammar, _ids=None) -> list:
    """Inactive lexical edges for every way an entry matches the input bag."""
    ids = _ids if _ids is not None else itertools.count()
    literals = sem.literals
    edges = {}
    for entry in g.lexicon:
        for positions, binding in _matchings(entry, literals):
            assignments = [(entry.slot_path(v), idx) for v, idx in binding.items()
                           if entry.slot_path(v) is not None]
            sign = unify(entry.sign, FeatureStructure.from_assignments(assignments))
            if sign is None:
                continue
            covered = frozenset(positions)
            key = (sign, covered)
            if key in edges:
                if entry.word not in edges[key].derivations:
                    edges[key].derivations.append(entry.word)
                continue
            indices = frozenset(i for p in covered for i in literals[p].indices)
            edges[key] = Edge(next(ids), sign, None, 0, covered, indices, [entry.word])
    out = list(edges.values())
    covered = set().union(*(e.covered for e in out)) if out else set()
    missing = [literals[i] for i in range(len(literals)) if i not in covered]
    if missing:
        raise GenerationImpossible(missing)
    return out


# ---------------------------------------------------------------------------
# combination and validation
# ---------------------------------------------------------------------------

def combine(active: Edge, inactive: Edge, new_id: int = -1) -> Optional[Edge]:
    """Advance ``active`` over ``inactive`` if coverage is disjoint and signs unify."""
    if active.covered & inactive.covered:
        return None
    k = active.dot + 1
    structure = unify_at(active.structure, (str(k),), inactive.sign)
    if structure is None:
        return None
    return Edge(new_id, structure, active.rule, k,
                active.covered | inactive.covered,
                active.indices | inactive.indices,
                [(active if active.dot else None, inactive, active.rule)],
                active.rule_no)


def seed(rule: Rule, rule_no: int) -> Edge:
    return Edge(-1, rule.structure, rule, 0, frozenset(), frozenset(), [], rule_no)


class Pruner:
    """Internal/external validation for one input against one outer table."""

    def __init__(self, table: DomainTable, sem: SemInput, lexical: Iterable[Edge]):
        self.table = table
        self.sem = sem
        self.lexical = list(lexical)
        self.valid = prefixes(table.paths)
        self.input_indices = sem.indices
        self._ext_paths = {}
        self._licence = {}

    def _expanded(self, bindings):
        return [x for b in bindings for x in expand(b, self.valid)]

    def external_paths(self, sign) -> set:
        paths = self._ext_paths.get(sign)
        if paths is None:
            paths = set()
            for t in self.table.triples:
                if unify(t.left, sign) is not None:
                    paths.update(x.left for x in self._expanded(t.bindings))
            self._ext_paths[sign] = paths
        return paths

    def external_indices(self, edge: Edge) -> set:
        sign = edge.sign
        out = set()
        for p in self.external_paths(sign):
            a = sign.atom_at(p)
            if a is not None and a in self.input_indices:
                out.add(a)
        return out

    def internal_ok(self, edge: Edge, remaining=None) -> bool:
        internal = edge.indices - self.external_indices(edge)
        if not internal:
            return True
        lits = self.sem.literals
        if remaining is None:
            remaining = (lits[i] for i in range(len(lits)) if i not in edge.covered)
        return not any(x in internal for lit in remaining for x in lit.indices)

    def licensed(self, sign, lex_sign) -> bool:
        key = (sign, lex_sign)
        ok = self._licence.get(key)
        if ok is None:
            ok = False
            for t in self.table.triples:
                if unify(t.left, sign) is None or unify(t.right, lex_sign) is None:
                    continue
                for b in self._expanded(t.bindings):
                    x = sign.atom_at(b.left)
                    if x is not None and x == lex_sign.atom_at(b.right):
                        ok = True
                        break
                if ok:
                    break
            self._licence[key] = ok
        return ok

    def external_ok(self, edge: Edge, remaining=None) -> bool:
        ext = self.external_indices(edge)
        if not ext:
            return True
        if remaining is None:
            remaining = frozenset(range(len(self.sem.literals))) - edge.covered
        sign = edge.sign
        for lex in self.lexical:
            if lex.covered <= remaining and lex.indices & ext:
                if not self.licensed(sign, lex.sign):
                    return False
        return True


def external_indices(edge: Edge, table: DomainTable, sem: SemInput) -> set:
    return Pruner(table, sem, ()).external_indices(edge)


def internal_validation(edge: Edge, remaining: Iterable[Literal], table: DomainTable,
                        sem: SemInput) -> bool:
    return Pruner(table, sem, ()).internal_ok(edge, list(remaining))


def external_validation(edge: Edge, remaining: frozenset, table: DomainTable,
                        sem: SemInput, lexical: Iterable[Edge]) -> bool:
    return Pruner(table, sem, lexical).external_ok(edge, frozenset(remaining))


# ---------------------------------------------------------------------------
# the agenda loop
# ---------------------------------------------------------------------------

def _trace_line(event, edge, n):
    return (f'{event} {edge.id} cat={edge.cat} covered={len(edge.covered)}/{n} '
            f'words="{" ".join(edge.words)}"')


def generate(g: Grammar, table: Optional[DomainTable], sem: SemInput, mode: str = 'none',
             trace: Optional[Callable[[str], None]] = None,
             rng: Optional[random.Random] = None, check: bool = False) -> GenResult:
    """Generate every sentence whose semantics is exactly ``sem``.

    ``rng`` picks agenda items at random instead of first-in first-out;
    ``check`` re-derives each edge's index set from its coverage.
    """
    if mode not in MODES:
        raise ValueError(f'unknown prune mode {mode!r}')
    if mode != 'none' and table is None:
        raise ValueError(f'prune mode {mode!r} needs an outer-domain table')
    t0 = time.perf_counter()
    stats = GenStats()
    n = len(sem.literals)
    full = frozenset(range(n))
    ids = itertools.count()
    diagnostics = []
    if not validate_coherence(sem):
        diagnostics.append('input is not coherent')
    try:
        lexical = lex_lookup(sem, g, ids)
    except GenerationImpossible as e:
        stats.time_ms = (time.perf_counter() - t0) * 1000
        return GenResult(set(), stats, diagnostics=diagnostics + [str(e)])

    pruner = Pruner(table, sem, lexical) if mode != 'none' else None
    check_int = mode in ('internal', 'both')
    check_ext = mode in ('external', 'both')
    by_first = {}
    for no, r in enumerate(g.rules):
        by_first.setdefault(r.sign(1).atom_at(('cat',)), []).append((no, r))

    known = {}
    rejected = {}
    agenda = deque()
    actives = {}       # next daughter cat -> edges
    inactives = {}     # cat -> edges
    chart = []

    def admit(edge):
        key = edge.key()
        old = known.get(key)
        if old is not None:
            for d in edge.derivations:
                if d not in old.derivations:
                    old.derivations.append(d)
            return
        if key in rejected:
            return
        edge.id = next(ids)
        if not edge.active and pruner is not None:
            event = None
            if check_int and not pruner.internal_ok(edge):
                event = 'PRUNE-INT'
                stats.pruned_internal += 1
            elif check_ext and not pruner.external_ok(edge):
                event = 'PRUNE-EXT'
                stats.pruned_external += 1
            if event:
                rejected[key] = edge
                if trace:
                    trace(_trace_line(event, edge, n))
                return
        known[key] = edge
        stats.edges_created += 1
        if edge.active:
            stats.active_created += 1
        else:
            stats.inactive_created += 1
        if trace:
            trace(_trace_line('COMBINE', edge, n))
        agenda.append(edge)

    for e in lexical:
        known[e.key()] = e
        stats.edges_created += 1
        stats.inactive_created += 1
        agenda.append(e)

    while agenda:
        if rng is not None:
            i = rng.randrange(len(agenda))
            agenda[i], agenda[-1] = agenda[-1], agenda[i]
            item = agenda.pop()
        else:
            item = agenda.popleft()
        stats.agenda_pops += 1
        chart.append(item)
        if trace:
            trace(_trace_line('ADD', item, n))
        if check:
            recomputed = frozenset(x for p in item.covered for x in sem.literals[p].indices)
            assert recomputed == item.indices, item
            assert item.covered <= full
        if item.active:
            actives.setdefault(item.next_cat, []).append(item)
            for other in list(inactives.get(item.next_cat, ())):
                e = combine(item, other)
                if e is not None:
                    admit(e)
        else:
            inactives.setdefault(item.cat, []).append(item)
            for other in list(actives.get(item.cat, ())):
                e = combine(other, item)
                if e is not None:
                    admit(e)
            for no, rule in by_first.get(item.cat, ()):
                e = combine(seed(rule, no), item)
                if e is not None:
                    admit(e)

    outputs = []
    for e in chart:
        if e.active or e.covered != full:
            continue
        if unify(e.sign, g.start) is None or e.sign.atom_at(g.index_path) != sem.distinguished:
            continue
        outputs.append(e)
    strings = set()
    for e in outputs:
        strings.update(' '.join(w) for w in e.realizations())
    stats.outputs = len(strings)
    stats.time_ms = (time.perf_counter() - t0) * 1000
    return GenResult(strings, stats, outputs, chart, diagnostics)
