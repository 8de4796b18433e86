import pathlib

from chartgen.domains import DomainTable, compile_inner, compile_outer
from chartgen.grammar import parse_grammar
from chartgen.oracle import binding_facts, check_soundness, derivation_trees


def test_toy_trees(toy):
    trees = derivation_trees(toy, 2)
    # s -> np vp, and s -> np (vp -> vp adv)
    assert len(trees) == 2
    assert all(t.atom_at(('sign', 'cat')) == 's' for t in trees)


def test_depth_bounds_tree_count(english):
    counts = [len(derivation_trees(english, d)) for d in (1, 2, 3)]
    assert counts == sorted(counts)


def test_binding_facts_in_toy(toy):
    (tree,) = [t for t in derivation_trees(toy, 1)]
    facts = set((k, n.atom_at(('cat',)), l.atom_at(('cat',)), p, q)
                for k, n, l, p, q in binding_facts(tree, toy.paths))
    arg1, arg2 = ('sem', 'arg1'), ('sem', 'arg2')
    assert ('inner', 's', 'vp', arg1, arg1) in facts
    assert ('outer', 'np', 'vp', arg1, arg2) in facts
    assert ('outer', 'vp', 'np', arg2, arg1) in facts


def test_toy_sound(toy, toy_tables):
    report = check_soundness(toy, *toy_tables, depth=3)
    assert report.sound and report.trees > 0


def test_tampered_table_is_caught(english, english_tables):
    inner, outer = english_tables
    kept = frozenset(t for t in outer
                     if (t.left.atom_at(('cat',)), t.right.atom_at(('cat',))) != ('np', 'vtra'))
    report = check_soundness(english, inner, DomainTable(kept, 'outer', 0, outer.paths), 3)
    assert not report.sound
    assert all(k == 'outer' for k, *_ in report.unlicensed)
    assert any('UNLICENSED' in line for line in report.lines())


def test_prefix_sharing_grammar_is_sound():
    g = parse_grammar((pathlib.Path(__file__).parent / 'data' / 'semshare.gram').read_text())
    inner = compile_inner(g)
    report = check_soundness(g, inner, compile_outer(g, inner=inner), 4)
    assert report.sound
