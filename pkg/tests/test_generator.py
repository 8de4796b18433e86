import random

import pytest

from chartgen.fs import unify, unify_at
from chartgen.generator import (
    GenerationImpossible,
    MODES,
    external_indices,
    external_validation,
    generate,
    internal_validation,
    lex_lookup,
)
from chartgen.grammar import parse_sem

LF3 = 's : def(d), dog(d), see(s,d,c), past(s), def(c), cat(c), white(c)'
JOHN = 'r : run(r), past(r), fast(r), arg1(r,j), name(j,John)'


def test_lex_lookup_packs_and_covers(english):
    sem = parse_sem(LF3)
    edges = lex_lookup(sem, english)
    dets = [e for e in edges if e.cat == 'det']
    assert len(dets) == 2      # one per def() literal
    saw = [e for e in edges if e.cat == 'vtra']
    assert len(saw) == 1 and saw[0].covered == {2, 3}
    assert saw[0].indices == {'s', 'd', 'c'}


def test_lex_lookup_missing_word(english):
    with pytest.raises(GenerationImpossible) as info:
        lex_lookup(parse_sem('s : frobnicate(s)'), english)
    assert 'frobnicate' in str(info.value)


def test_generate_reports_impossible(english):
    res = generate(english, None, parse_sem('s : frobnicate(s)'))
    assert res.strings == set()
    assert any('frobnicate' in d for d in res.diagnostics)


def test_mode_checks(english):
    sem = parse_sem(JOHN)
    with pytest.raises(ValueError):
        generate(english, None, sem, 'both')
    with pytest.raises(ValueError):
        generate(english, None, sem, 'sideways')


def test_incoherent_input_is_flagged(english, english_tables):
    res = generate(english, english_tables[1], parse_sem('r : run(r), past(r), name(j,John)'), 'both')
    assert res.strings == set()
    assert 'input is not coherent' in res.diagnostics


def test_distinguished_index_selects_output(english):
    # same bag, but asking for the dog as the root: no sentence has it there
    bag = 'def(d), dog(d), see(s,d,c), past(s), def(c), cat(c), white(c)'
    assert generate(english, None, parse_sem('s : ' + bag)).strings
    assert generate(english, None, parse_sem('d : ' + bag)).strings == set()


def _rebuild(tree):
    """Instantiate a derivation tree bottom-up; returns (sign, positions)."""
    if tree[0] == 'lex':
        edge = tree[1]
        return edge.sign, [edge.covered]
    _, edge, kids, rule = tree
    fs = rule.structure
    covered = []
    for k, kid in enumerate(kids, 1):
        sign, cov = _rebuild(kid)
        fs = unify_at(fs, (str(k),), sign)
        assert fs is not None
        covered.extend(cov)
    return fs.at(('0',)), covered


@pytest.mark.parametrize('mode', MODES)
def test_outputs_are_valid_derivations(english, english_tables, corpus, mode):
    outer = english_tables[1]
    for text in corpus[:5]:
        sem = parse_sem(text)
        res = generate(english, outer, sem, mode, check=True)
        assert res.outputs
        for edge in res.outputs:
            for tree in edge.trees():
                sign, parts = _rebuild(tree)
                assert unify(sign, english.start) is not None
                assert sign.atom_at(english.index_path) == sem.distinguished
                flat = [p for part in parts for p in part]
                assert sorted(flat) == list(range(len(sem.literals)))


def test_pruned_chart_is_subset(english, english_tables, corpus):
    outer = english_tables[1]
    for text in corpus:
        sem = parse_sem(text)
        keys = {m: {e.key() for e in generate(english, outer, sem, m).chart} for m in MODES}
        assert keys['both'] <= keys['internal'] <= keys['none']
        assert keys['both'] <= keys['external'] <= keys['none']


def test_trace_format(toy, toy_tables):
    lines = []
    generate(toy, toy_tables[1], parse_sem(JOHN), 'both', trace=lines.append)
    kinds = {l.split()[0] for l in lines}
    assert kinds <= {'ADD', 'COMBINE', 'PRUNE-INT', 'PRUNE-EXT'}
    assert any(l.startswith('PRUNE-INT') and 'words="john ran"' in l for l in lines)
    assert all('covered=' in l and 'cat=' in l for l in lines)


def test_validation_wrappers(english, english_tables):
    outer = english_tables[1]
    sem = parse_sem(LF3)
    res = generate(english, None, sem)
    lexical = lex_lookup(sem, english)
    by_words = {' '.join(e.words): e for e in res.chart if not e.active}
    saw_cat = by_words['saw the cat']
    rest = [sem.literals[i] for i in range(len(sem.literals)) if i not in saw_cat.covered]
    assert 'c' not in external_indices(saw_cat, outer, sem)
    assert not internal_validation(saw_cat, rest, outer, sem)
    the_cat = next(e for e in res.chart if not e.active and e.cat == 'np' and e.words == ('the', 'cat'))
    remaining = frozenset(range(len(sem.literals))) - the_cat.covered
    assert 'c' in external_indices(the_cat, outer, sem)
    assert not external_validation(the_cat, remaining, outer, sem, lexical)
    whole = by_words['the dog saw the white cat']
    assert internal_validation(whole, [], outer, sem)


def test_random_agenda_order_is_stable(english, english_tables):
    sem = parse_sem(LF3)
    base = generate(english, english_tables[1], sem, 'none')
    for seed in range(5):
        res = generate(english, english_tables[1], sem, 'none', rng=random.Random(seed))
        assert res.strings == base.strings
        assert res.stats.edges_created == base.stats.edges_created


def test_ambiguous_attachment(english, english_tables):
    # a PP that can attach to the verb phrase or the object noun
    text = 'e : def(m), man(m), see(e,m,w), past(e), def(w), woman(w), with(w,k), def(k), collar(k)'
    for mode in MODES:
        assert generate(english, english_tables[1], parse_sem(text), mode).strings == \
            {'the man saw the woman with the collar'}
