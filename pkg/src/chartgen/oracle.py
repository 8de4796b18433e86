"""
Brute-force soundness check for compiled domain tables.

Every derivation tree from the start sign up to a depth bound is built by
plain unification, with lexical skeletons at the leaves.  Each pair of a
tree node and a leaf whose signs share one node at declared index paths is
a binding fact; facts inside the node's subtree must be licensed by the
inner table, facts outside it by the outer table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .domains import DomainTable, expand
from .fs import prefixes, relabel, restrict, unify, unify_at, path_str
from .grammar import Grammar


@dataclass
class OracleReport:
    trees: int = 0
    inner_facts: int = 0
    outer_facts: int = 0
    unlicensed: list = field(default_factory=list)   # (kind, node, leaf, p, q)

    @property
    def sound(self) -> bool:
        return not self.unlicensed

    def lines(self):
        yield f'trees={self.trees} inner_facts={self.inner_facts} outer_facts={self.outer_facts}'
        for kind, node, leaf, p, q in self.unlicensed:
            yield (f'UNLICENSED {kind}: {node!r} ~ {leaf!r} '
                   f'binding {path_str(p)}~{path_str(q)}')


def _templates(g: Grammar):
    out = []
    for r in g.rules:
        parts = [(('sign',), r.structure, ('0',))]
        parts += [((f'd{k}', 'sign'), r.structure, (str(k),)) for k in range(1, r.arity + 1)]
        out.append((r, relabel(parts)))
    return out


def derivation_trees(g: Grammar, depth: int):
    """Instantiated trees rooted at the start sign, at most ``depth`` rules deep.

    A tree is a structure with the node's sign under ``sign`` and its
    daughters under ``d1``, ``d2``, ...; a leaf has no daughters.
    """
    leaves = {restrict(e.sign, g.paths) for e in g.lexicon}
    templates = _templates(g)
    memo = {}

    def trees(constraint, d):
        key = (constraint, d)
        if key in memo:
            return memo[key]
        out = [leaf.embed(('sign',)) for leaf in leaves if unify(leaf, constraint) is not None]
        if d >= 1:
            for rule, template in templates:
                if unify(rule.mother, constraint) is None:
                    continue
                options = [trees(rule.sign(k), d - 1) for k in range(1, rule.arity + 1)]
                for kids in itertools.product(*options):
                    fs = template
                    for k, kid in enumerate(kids, 1):
                        fs = unify_at(fs, (f'd{k}',), kid)
                        if fs is None:
                            break
                    if fs is not None:
                        out.append(fs)
        memo[key] = out
        return out

    result = []
    for t in trees(g.start, depth):
        full = unify_at(t, ('sign',), g.start)
        if full is not None:
            result.append(full)
    return result


def _nodes(tree):
    """``(tree_path, is_leaf)`` for each node of a derivation tree."""
    out = []

    def visit(path):
        kids = [f for f, _ in tree.arcs(tree.node_at(path)) if f.startswith('d')]
        out.append((path, not kids))
        for f in sorted(kids):
            visit(path + (f,))

    visit(())
    return out


def binding_facts(tree, paths):
    """Yield ``(kind, node_sign, leaf_sign, p, q)`` for one tree."""
    nodes = _nodes(tree)
    signs = {path: restrict(tree.at(path + ('sign',)), paths) for path, _ in nodes}
    for rpath, _ in nodes:
        for lpath, is_leaf in nodes:
            if not is_leaf or lpath == rpath:
                continue
            inside = lpath[:len(rpath)] == rpath
            if not inside and rpath[:len(lpath)] == lpath:
                continue   # the leaf dominates the node: impossible, leaves have no daughters
            for p in paths:
                for q in paths:
                    if tree.token_identical(rpath + ('sign',) + p, lpath + ('sign',) + q):
                        yield ('inner' if inside else 'outer', signs[rpath], signs[lpath], p, q)


def licensed(table: DomainTable, node, leaf, p, q, valid) -> bool:
    for t in table.triples:
        if unify(t.left, node) is None or unify(t.right, leaf) is None:
            continue
        for b in t.bindings:
            if (p, q) in expand(b, valid):
                return True
    return False


def check_soundness(g: Grammar, inner: DomainTable, outer: DomainTable, depth: int) -> OracleReport:
    report = OracleReport()
    valid = prefixes(g.paths)
    seen = {}
    trees = derivation_trees(g, depth)
    report.trees = len(trees)
    for tree in trees:
        for fact in binding_facts(tree, g.paths):
            kind = fact[0]
            if kind == 'inner':
                report.inner_facts += 1
            else:
                report.outer_facts += 1
            if fact in seen:
                continue
            table = inner if kind == 'inner' else outer
            ok = seen[fact] = licensed(table, *fact[1:], valid)
            if not ok:
                report.unlicensed.append(fact)
    return report
