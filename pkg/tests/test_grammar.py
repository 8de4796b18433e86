import random

import pytest

from chartgen.grammar import (
    GrammarError,
    category_skeletons,
    parse_grammar,
    parse_sem,
    serialize_grammar,
    validate_coherence,
)

from conftest import load_bundled

MINI = '''
paths: sem.arg1
start: [cat=s]
rule s_np_vp: [cat=s, sem.arg1=$E] -> [cat=np, sem.arg1=$X] [cat=vp, sem.arg1=$E]
lex "john": [cat=np, sem.arg1=$J] : name($J, John)
'''


def test_parse_mini():
    g = parse_grammar(MINI)
    assert [r.name for r in g.rules] == ['s_np_vp']
    assert g.index_path == ('sem', 'arg1')
    assert {n.atom_at(('cat',)) for n in g.nonterminals} == {'s'}
    entry = g.lexicon[0]
    assert entry.word == 'john'
    assert entry.slot_path('J') == ('sem', 'arg1')
    assert str(entry.templates[0]) == 'name($J, John)'


def test_rule_signs_share_variables():
    g = load_bundled('toy.gram')
    r = g.rules[0]
    assert r.arity == 2
    assert r.structure.token_identical(('0', 'sem', 'arg1'), ('2', 'sem', 'arg1'))
    assert r.mother.atom_at(('cat',)) == 's'
    assert [d.atom_at(('cat',)) for d in r.daughters] == ['np', 'vp']


@pytest.mark.parametrize('name', ['toy.gram', 'english.gram'])
def test_serialize_round_trip(name):
    g = load_bundled(name)
    again = parse_grammar(serialize_grammar(g))
    assert again.paths == g.paths and again.start == g.start
    assert [(r.name, r.structure) for r in again.rules] == [(r.name, r.structure) for r in g.rules]
    assert [(e.word, e.sign, [str(t) for t in e.templates]) for e in again.lexicon] == \
        [(e.word, e.sign, [str(t) for t in e.templates]) for e in g.lexicon]


def test_serialize_round_trip_shuffled():
    # the parser does not care where lexical entries appear
    g = load_bundled('english.gram')
    lines = serialize_grammar(g).splitlines()
    lex = [l for l in lines if l.startswith('lex ')]
    other = [l for l in lines if not l.startswith('lex ')]
    random.Random(3).shuffle(lex)
    again = parse_grammar('\n'.join(other + lex))
    assert {e.word for e in again.lexicon} == {e.word for e in g.lexicon}


@pytest.mark.parametrize('text, fragment', [
    ('start: [cat=s]\nrule r: [cat=s] -> [cat=np]', 'no paths'),
    ('paths: sem.arg1\nrule r: [cat=s] -> [cat=np]', 'start sign missing'),
    ('paths: sem.arg1\nstart: [cat=s]', 'no rules'),
    ('paths: sem.arg1\nstart: [cat=s]\nrule r: [cat=s, agr=sg] -> [cat=np]', "undeclared feature 'agr'"),
    ('paths: sem.arg1\nstart: [cat=s]\nrule r: [cat=s] -> [cat=np]\nrule r: [cat=s] -> [cat=vp]', 'duplicate'),
    ('paths: sem.arg1\nstart: [cat=s]\nrule r: [cat=s] -> [sem.arg1=$X]', 'no cat'),
    ('paths: sem.arg1\nstart: [cat=s]\nrule r: [cat=vp] -> [cat=np]', 'no rule mother'),
    ('paths: sem.arg1\nstart: [cat=s]\nrule r: [cat=s] -> [cat=np]\nbogus', 'unknown declaration'),
])
def test_grammar_errors(text, fragment):
    with pytest.raises(GrammarError) as info:
        parse_grammar(text)
    assert fragment in str(info.value)


def test_grammar_error_position():
    with pytest.raises(GrammarError) as info:
        parse_grammar('paths: sem.arg1\nstart: [cat=s]\nrule r: [cat=s -> [cat=np]')
    assert info.value.line == 3


def test_feature_declaration_extends_alphabet():
    g = parse_grammar('paths: sem.arg1\nfeatures: agr\nstart: [cat=s]\nrule r: [cat=s, agr=sg] -> [cat=np]')
    assert 'agr' in g.features


def test_category_skeletons_are_restricted():
    g = load_bundled('english.gram')
    skels = category_skeletons(g)
    assert all(s.atom_at(('cat',)) for s in skels)
    assert {s.atom_at(('cat',)) for s in skels} >= {'np', 'vp', 'n1', 'det', 'vtra'}
    allowed = {'cat', 'sem', 'arg1', 'arg2', 'arg3'}
    assert all(s.features() <= allowed for s in skels)


def test_parse_sem():
    sem = parse_sem('r : run(r), past(r), fast(r), arg1(r,j), name(j,John)')
    assert sem.distinguished == 'r'
    assert len(sem.literals) == 5
    assert sem.indices == {'r', 'j'}
    assert sem.literals[4].indices == ('j',)


@pytest.mark.parametrize('text', ['run(r)', 'r : run(r', 'r : run(r) past(r)', 'q : run(r)', 'R : run(r)'])
def test_parse_sem_errors(text):
    with pytest.raises(GrammarError):
        parse_sem(text)


def test_coherence():
    assert validate_coherence(parse_sem('r : run(r), arg1(r,j), name(j,John)'))
    assert not validate_coherence(parse_sem('r : run(r), name(j,John)'))


def _uf_coherent(sem):
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            x = parent[x]
        return x

    for i, lit in enumerate(sem.literals):
        for x in lit.indices:
            parent[find(('lit', i))] = find(('idx', x))
        find(('lit', i))
    return len({find(('lit', i)) for i in range(len(sem.literals))}) == 1


def test_coherence_matches_union_find():
    rng = random.Random(11)
    for _ in range(500):
        idx = 'abcde'
        lits = []
        for _ in range(rng.randint(1, 6)):
            args = ','.join(rng.choice(idx) for _ in range(rng.randint(1, 2)))
            lits.append(f'p({args})')
        first = lits[0][2]
        sem = parse_sem(f'{first} : ' + ', '.join(lits))
        assert validate_coherence(sem) == _uf_coherent(sem)
