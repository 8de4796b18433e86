"""
Inner and outer index-binding domains.

A domain fact is a :class:`Triple` ``(left, right, bindings)``: in some
derivation the node at ``left:p`` can be the very node at ``right:q`` for
each binding ``p~q``.  Inner domains relate a phrase to signs inside its
subtree; outer domains relate a sign to signs outside it.  Both are computed
as the least fixed point of triple equations read off the grammar rules.

Signs stored in triples are restricted to their cat value plus the declared
index paths, so the set of possible triples is finite and the iteration
terminates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional

from .fs import (
    FeatureStructure,
    Path,
    as_path,
    format_avm,
    is_prefix,
    parse_avm,
    path_str,
    prefixes,
    restrict,
    subsumes,
    unify,
    AVMSyntaxError,
)
from .grammar import Grammar, category_skeletons

log = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 100


class Binding(NamedTuple):
    left: Path
    right: Path

    def __str__(self):
        return f'{path_str(self.left)}~{path_str(self.right)}'


@dataclass(frozen=True)
class Triple:
    left: FeatureStructure
    right: FeatureStructure
    bindings: frozenset

    def __str__(self):
        pairs = ' ; '.join(sorted(str(b) for b in self.bindings))
        return f'{format_avm(self.left)} | {format_avm(self.right)} | {pairs}'


def make_triple(left, right, bindings) -> Optional[Triple]:
    bindings = reduce_bindings(bindings)
    if not bindings:
        return None
    return Triple(left, right, bindings)


@dataclass
class DomainTable:
    triples: frozenset
    kind: str = 'outer'
    iterations: int = 0
    paths: tuple = ()

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)


class FixedPointError(RuntimeError):
    """The iteration cap was reached before the equations closed."""


class TableError(ValueError):
    pass


# ---------------------------------------------------------------------------
# binding pairs
# ---------------------------------------------------------------------------

def absorbs(a: Binding, b: Binding) -> bool:
    """``a`` implies ``b``: b extends both of a's paths by one common suffix."""
    n, m = len(a.left), len(a.right)
    return (is_prefix(a.left, b.left) and is_prefix(a.right, b.right)
            and b.left[n:] == b.right[m:])


def reduce_bindings(pairs: Iterable[Binding]) -> frozenset:
    """Drop every pair implied by a shorter one (subsume-union on pairs)."""
    pairs = set(pairs)
    return frozenset(p for p in pairs
                     if not any(q != p and absorbs(q, p) for q in pairs))


def expand(b: Binding, valid: frozenset) -> list:
    """All pairs implied by ``b`` whose paths lie in ``valid``."""
    out = []
    for p in valid:
        if is_prefix(b.left, p):
            q = b.right + p[len(b.left):]
            if q in valid:
                out.append(Binding(p, q))
    return out


def cross_pathpair(a: Binding, b: Binding) -> Optional[Binding]:
    """Chain ``<x,y>`` and ``<y,z>`` into ``<x,z>``.

    When one middle path merely extends the other, the shorter pair shares
    the whole node, so the suffix is carried over to the outer path.
    """
    if a.right == b.left:
        return Binding(a.left, b.right)
    if is_prefix(a.right, b.left):
        return Binding(a.left + b.left[len(a.right):], b.right)
    if is_prefix(b.left, a.right):
        return Binding(a.left, b.right + a.right[len(b.left):])
    return None


def shared_indices(structure: FeatureStructure, left, right, paths) -> set:
    """Pairs ``<p1,p2>`` with ``structure:left+p1`` the same node as ``:right+p2``.

    ``left`` and ``right`` locate two signs inside one structure (a rule);
    ``p1`` and ``p2`` range over non-empty prefixes of ``paths``.
    """
    left, right = as_path(left), as_path(right)
    cand = sorted(prefixes(paths))
    left_nodes = {}
    for p in cand:
        n = structure.node_at(left + p)
        if n is not None:
            left_nodes.setdefault(n, []).append(p)
    out = set()
    for q in cand:
        n = structure.node_at(right + q)
        for p in left_nodes.get(n, ()):
            out.add(Binding(p, q))
    return out


# ---------------------------------------------------------------------------
# triple operators
# ---------------------------------------------------------------------------

def cross_triple(a: Triple, b: Triple, valid: Optional[frozenset] = None) -> Optional[Triple]:
    """``(La, Rb, Ba x Bb)`` when ``Ra`` and ``Lb`` unify, else ``None``."""
    if unify(a.right, b.left) is None:
        return None
    pairs = set()
    for x in a.bindings:
        for y in b.bindings:
            c = cross_pathpair(x, y)
            if c is not None and (valid is None or (c.left in valid and c.right in valid)):
                pairs.add(c)
    if not pairs:
        return None
    left = _with_paths(a.left, [p.left for p in pairs])
    right = _with_paths(b.right, [p.right for p in pairs])
    if left is None or right is None:
        return None
    if valid is not None:
        left, right = restrict(left, valid), restrict(right, valid)
    return make_triple(left, right, pairs)


def _with_paths(sign, paths):
    missing = [p for p in paths if not sign.has_path(p)]
    if not missing:
        return sign
    extra = FeatureStructure.from_assignments([(p, None) for p in missing])
    return unify(sign, extra)


def cross_sets(A: Iterable[Triple], B: Iterable[Triple], valid=None) -> frozenset:
    B = list(B)
    out = set()
    for a in A:
        for b in B:
            t = cross_triple(a, b, valid)
            if t is not None:
                out.add(t)
    return frozenset(out)


def union_t(a: Triple, b: Triple) -> set:
    """Merge two triples if one pair of signs is more general than the other."""
    if subsumes(a.left, b.left) and subsumes(a.right, b.right):
        return {Triple(a.left, a.right, reduce_bindings(a.bindings | b.bindings))}
    if subsumes(b.left, a.left) and subsumes(b.right, a.right):
        return {Triple(b.left, b.right, reduce_bindings(a.bindings | b.bindings))}
    return {a, b}


def _comparable(a: Triple, b: Triple) -> bool:
    return ((subsumes(a.left, b.left) and subsumes(a.right, b.right))
            or (subsumes(b.left, a.left) and subsumes(b.right, a.right)))


def _bucket(t: Triple):
    # triples whose cat atoms differ can never be comparable
    key = (t.left.atom_at(('cat',)), t.right.atom_at(('cat',)))
    return None if None in key else key


def _insert(group: list, t: Triple):
    while True:
        for i, r in enumerate(group):
            if r == t or _comparable(r, t):
                del group[i]
                if r != t:
                    (t,) = union_t(r, t)
                break
        else:
            group.append(t)
            return


def subsume_union(A: Iterable[Triple], B: Iterable[Triple]) -> frozenset:
    """Union of two triple sets, merged until no two triples are comparable."""
    buckets = {}
    for t in (*A, *B):
        _insert(buckets.setdefault(_bucket(t), []), t)
    if None in buckets and len(buckets) > 1:
        merged = []
        for group in buckets.values():
            for t in group:
                _insert(merged, t)
        return frozenset(merged)
    return frozenset(t for group in buckets.values() for t in group)


def covers(big: Triple, small: Triple) -> bool:
    """``big`` licenses everything ``small`` does."""
    return (subsumes(big.left, small.left) and subsumes(big.right, small.right)
            and all(any(absorbs(p, q) for p in big.bindings) for q in small.bindings))


def fixed_point(function, argument, max_iter: int = DEFAULT_MAX_ITER,
                valid=None, kind: str = '') -> DomainTable:
    """Iterate ``Result := Result U<= (function X new)`` until nothing is new.

    ``new`` starts as the argument and is afterwards whatever the last round
    changed (compared up to variable renaming).
    """
    function = list(function)
    result = subsume_union((), argument)
    new = result
    rounds = 0
    while new:
        rounds += 1
        if rounds > max_iter:
            raise FixedPointError(f'{kind or "fixed point"}: no closure after {max_iter} iterations')
        temp = subsume_union((), cross_sets(function, new, valid))
        updated = subsume_union(result, temp)
        new = updated - result
        log.debug('%s round %d: %d triples, %d new', kind, rounds, len(updated), len(new))
        result = updated
    return DomainTable(result, kind, rounds)


def is_closed(function, table: DomainTable, valid=None) -> bool:
    """One more round of the equations adds nothing."""
    extra = cross_sets(function, table.triples, valid)
    return subsume_union(table.triples, extra) == table.triples


# ---------------------------------------------------------------------------
# grammar-derived equations
# ---------------------------------------------------------------------------

def _rule_triples(g: Grammar, pairs_of):
    valid = prefixes(g.paths)
    out = set()
    for rule in g.rules:
        for i, j in pairs_of(rule):
            pairs = shared_indices(rule.structure, rule.sign_path(i), rule.sign_path(j), g.paths)
            t = make_triple(restrict(rule.sign(i), valid), restrict(rule.sign(j), valid), pairs)
            if t is not None:
                out.add(t)
    return frozenset(out)


def inner_equations(g: Grammar) -> frozenset:
    return _rule_triples(g, lambda r: [(0, k) for k in range(1, r.arity + 1)])


def outer_equations(g: Grammar) -> frozenset:
    return _rule_triples(g, lambda r: [(k, 0) for k in range(1, r.arity + 1)])


def sister_triples(g: Grammar) -> frozenset:
    return _rule_triples(g, lambda r: [(j, k) for j in range(1, r.arity + 1)
                                       for k in range(1, r.arity + 1) if j != k])


def reflexive_triples(g: Grammar) -> frozenset:
    out = set()
    for s in category_skeletons(g):
        pairs = [Binding(p, p) for p in g.paths if s.has_path(p)]
        t = make_triple(s, s, pairs)
        if t is not None:
            out.add(t)
    return frozenset(out)


def compile_inner(g: Grammar, max_iter: int = DEFAULT_MAX_ITER) -> DomainTable:
    eqs = inner_equations(g)
    table = fixed_point(eqs, eqs, max_iter, prefixes(g.paths), 'inner')
    triples = subsume_union(table.triples, reflexive_triples(g))
    return DomainTable(triples, 'inner', table.iterations, g.paths)


def initialise_outer(g: Grammar, inner: DomainTable) -> frozenset:
    """Each daughter sees the inner domain of each of its sisters."""
    return subsume_union((), cross_sets(sister_triples(g), inner.triples, prefixes(g.paths)))


def compile_outer(g: Grammar, max_iter: int = DEFAULT_MAX_ITER,
                  inner: Optional[DomainTable] = None) -> DomainTable:
    if inner is None:
        inner = compile_inner(g, max_iter)
    start = initialise_outer(g, inner)
    table = fixed_point(outer_equations(g), start, max_iter, prefixes(g.paths), 'outer')
    table.paths = g.paths
    return table


# ---------------------------------------------------------------------------
# table files
# ---------------------------------------------------------------------------

FORMAT_VERSION = 'v1'


def serialize_table(t: DomainTable) -> str:
    lines = [f'domaintable {FORMAT_VERSION} kind={t.kind or "outer"} iterations={t.iterations}',
             'paths: ' + ', '.join(path_str(p) for p in t.paths)]
    lines.extend(sorted(str(tr) for tr in t.triples))
    return '\n'.join(lines) + '\n'


def load_table(text: str) -> DomainTable:
    lines = [l for l in (x.split('#', 1)[0].strip() for x in text.splitlines()) if l]
    if not lines:
        raise TableError('empty table file')
    head = lines[0].split()
    if len(head) < 2 or head[0] != 'domaintable':
        raise TableError('missing domaintable header')
    if head[1] != FORMAT_VERSION:
        raise TableError(f'unsupported table version {head[1]!r}')
    meta = dict(h.split('=', 1) for h in head[2:] if '=' in h)
    try:
        iterations = int(meta.get('iterations', 0))
    except ValueError:
        raise TableError('bad iterations count') from None
    if len(lines) < 2 or not lines[1].startswith('paths:'):
        raise TableError('missing paths line')
    paths = tuple(as_path(p.strip()) for p in lines[1][6:].split(',') if p.strip())
    valid = prefixes(paths)
    triples = set()
    for n, line in enumerate(lines[2:], 3):
        parts = line.split('|')
        if len(parts) != 3:
            raise TableError(f'triple {n}: expected three "|"-separated fields')
        try:
            left, right = parse_avm(parts[0]), parse_avm(parts[1])
        except AVMSyntaxError as e:
            raise TableError(f'triple {n}: {e}') from None
        pairs = set()
        for item in parts[2].split(';'):
            lp, sep, rp = item.strip().partition('~')
            if not sep:
                raise TableError(f'triple {n}: bad binding {item.strip()!r}')
            b = Binding(as_path(lp.strip()), as_path(rp.strip()))
            for p in b:
                if p not in valid:
                    raise TableError(f'triple {n}: binding path {path_str(p)!r} not under declared paths')
            pairs.add(b)
        t = make_triple(left, right, pairs)
        if t is None:
            raise TableError(f'triple {n}: no bindings')
        triples.add(t)
    return DomainTable(frozenset(triples), meta.get('kind', 'outer'), iterations, paths)
