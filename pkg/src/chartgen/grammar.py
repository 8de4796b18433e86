"""Grammar, lexicon and flat-semantics input."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .fs import (
    AVMSyntaxError,
    FeatureStructure,
    Path,
    Var,
    as_path,
    format_avm,
    format_signs,
    path_str,
    read_avm,
    restrict,
    unify,
)


class GrammarError(ValueError):
    """Raised for malformed grammar or semantics text; carries a location."""

    def __init__(self, message, line=None, col=None):
        where = f'line {line}, col {col}: ' if line is not None else ''
        super().__init__(where + message)
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Rule:
    """``mother -> daughters`` held in one structure so variables are shared.

    Feature ``'0'`` of :attr:`structure` is the mother, ``'1'``..``'n'``
    the daughters.
    """
    name: str
    structure: FeatureStructure
    arity: int

    def sign_path(self, k: int) -> Path:
        return (str(k),)

    def sign(self, k: int) -> FeatureStructure:
        return self.structure.at(self.sign_path(k))

    @property
    def mother(self) -> FeatureStructure:
        return self.sign(0)

    @property
    def daughters(self) -> list:
        return [self.sign(k) for k in range(1, self.arity + 1)]


@dataclass(frozen=True)
class Template:
    """A predicate pattern in a lexical entry; args are ``Var`` or constants."""
    pred: str
    args: tuple

    def __str__(self):
        return f"{self.pred}({', '.join('$' + a.name if isinstance(a, Var) else a for a in self.args)})"


@dataclass(frozen=True)
class LexEntry:
    word: str
    sign: FeatureStructure
    templates: tuple
    # variable name -> path in sign where it occurs (first occurrence)
    slots: tuple = ()

    def slot_path(self, var: str) -> Optional[Path]:
        for name, path in self.slots:
            if name == var:
                return path
        return None


@dataclass
class Grammar:
    rules: list
    start: FeatureStructure
    paths: tuple
    lexicon: list = field(default_factory=list)
    features: frozenset = frozenset()

    @property
    def nonterminals(self) -> set:
        return {r.mother for r in self.rules}

    @property
    def terminals(self) -> set:
        """Daughter signs that unify with at least one lexical sign."""
        out = set()
        lex = {e.sign for e in self.lexicon}
        for r in self.rules:
            for d in r.daughters:
                if any(unify(d, s) is not None for s in lex):
                    out.add(d)
        return out

    @property
    def index_path(self) -> Path:
        """Where a sentence sign carries the distinguished index."""
        return self.paths[0]


# ---------------------------------------------------------------------------
# grammar files
# ---------------------------------------------------------------------------

_NAME = re.compile(r'\s*([A-Za-z_][A-Za-z0-9_]*)\s*')
_WORD = re.compile(r'\s*"([^"]+)"\s*')
_TEMPLATE = re.compile(r'\s*([a-z][A-Za-z0-9_]*)\s*\(([^()]*)\)\s*')


def _strip_comment(line: str) -> str:
    quoted = False
    for i, ch in enumerate(line):
        if ch == '"':
            quoted = not quoted
        elif ch == '#' and not quoted:
            return line[:i]
    return line


def parse_grammar(text: str) -> Grammar:
    paths = None
    features = set()
    start = None
    rules = []
    lexicon = []
    names = set()
    pending_features = []   # (feature, line, col) checked once paths are known

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).rstrip()
        if not line.strip():
            continue
        head, _, rest = line.strip().partition(' ')
        col0 = len(line) - len(line.lstrip()) + 1
        offset = line.index(head) + len(head) + 1
        if head == 'paths:':
            paths = tuple(as_path(p.strip()) for p in rest.split(',') if p.strip())
            if not paths:
                raise GrammarError('empty paths declaration', lineno, col0)
            for p in paths:
                features.update(p)
        elif head == 'features:':
            features.update(f.strip() for f in rest.split(',') if f.strip())
        elif head == 'start:':
            avms, _ = _read_signs(line, offset, lineno, 1)
            start = _build(avms, lineno, col0).at(('0',))
            pending_features.extend(_features_of(avms, lineno, col0))
        elif head == 'rule':
            m = _NAME.match(line, offset)
            if not m or line[m.end():m.end() + 1] != ':':
                raise GrammarError('expected "rule NAME:"', lineno, offset + 1)
            name = m.group(1)
            if name in names:
                raise GrammarError(f'duplicate rule name {name!r}', lineno, m.start(1) + 1)
            names.add(name)
            pos = m.end() + 1
            mother, pos = _read_one(line, pos, lineno)
            arrow = line.find('->', pos)
            if arrow < 0 or line[pos:arrow].strip():
                raise GrammarError("expected '->'", lineno, pos + 1)
            daughters, pos = _read_signs(line, arrow + 2, lineno, None)
            if not daughters:
                raise GrammarError('rule has no daughters', lineno, arrow + 3)
            avms = [mother] + daughters
            structure = _build(avms, lineno, col0)
            pending_features.extend(_features_of(avms, lineno, col0))
            rule = Rule(name, structure, len(daughters))
            for k in range(len(avms)):
                if rule.sign(k).atom_at(('cat',)) is None:
                    raise GrammarError(f'rule {name}: sign {k} has no cat value', lineno, col0)
            rules.append(rule)
        elif head == 'lex':
            m = _WORD.match(line, offset)
            if not m:
                raise GrammarError('expected a quoted word', lineno, offset + 1)
            word = m.group(1)
            pos = m.end()
            if line[pos:pos + 1] != ':':
                raise GrammarError("expected ':' after word", lineno, pos + 1)
            sign_avm, pos = _read_one(line, pos + 1, lineno)
            pending_features.extend(_features_of([sign_avm], lineno, col0))
            rest = line[pos:].strip()
            if not rest.startswith(':'):
                raise GrammarError("expected ':' before predicate templates", lineno, pos + 1)
            templates = _parse_templates(rest[1:], lineno, line.index(rest) + 2)
            lexicon.append(_make_entry(word, sign_avm, templates, paths, lineno, col0))
        else:
            raise GrammarError(f'unknown declaration {head!r}', lineno, col0)

    if paths is None:
        raise GrammarError('no paths declaration')
    if start is None:
        raise GrammarError('start sign missing')
    if not rules:
        raise GrammarError('no rules')
    features.add('cat')
    for feat, lineno, col in pending_features:
        if feat not in features:
            raise GrammarError(f'undeclared feature {feat!r}', lineno, col)
    if not any(unify(start, r.mother) is not None for r in rules):
        raise GrammarError('start sign unifies with no rule mother')
    for e in lexicon:
        if not any(path in _prefix_set(paths) for _, path in e.slots):
            raise GrammarError(f'lexical entry {e.word!r}: no template variable at a declared path')
    return Grammar(rules, start, paths, lexicon, frozenset(features))


def _read_one(line, pos, lineno):
    try:
        return read_avm(line, pos)
    except AVMSyntaxError as e:
        raise GrammarError(str(e), lineno, e.pos + 1) from None


def _read_signs(line, pos, lineno, limit):
    avms = []
    while True:
        while pos < len(line) and line[pos].isspace():
            pos += 1
        if pos >= len(line) or line[pos] != '[' or (limit and len(avms) == limit):
            break
        avm, pos = _read_one(line, pos, lineno)
        avms.append(avm)
    if limit and len(avms) != limit:
        raise GrammarError('expected an AVM', lineno, pos + 1)
    if pos < len(line) and line[pos:].strip() and limit is None:
        raise GrammarError('unexpected text after signs', lineno, pos + 1)
    return avms, pos


def _build(avms, lineno, col):
    assignments = []
    for i, avm in enumerate(avms):
        assignments.append(((str(i),), None))
        assignments.extend(((str(i),) + p, v) for p, v in avm)
    fs = FeatureStructure.from_assignments(assignments)
    if fs is None:
        raise GrammarError('inconsistent signs (clash or cycle)', lineno, col)
    return fs


def _features_of(avms, lineno, col):
    return [(f, lineno, col) for avm in avms for p, _ in avm for f in p]


def _parse_templates(text, lineno, col):
    templates = []
    pos = 0
    while pos < len(text):
        m = _TEMPLATE.match(text, pos)
        if not m:
            raise GrammarError('malformed predicate template', lineno, col + pos)
        args = []
        for a in m.group(2).split(','):
            a = a.strip()
            if not a:
                raise GrammarError('empty template argument', lineno, col + m.start(2))
            args.append(Var(a[1:]) if a.startswith('$') else a)
        templates.append(Template(m.group(1), tuple(args)))
        pos = m.end()
        if pos < len(text):
            if text[pos] != ',':
                raise GrammarError("expected ',' between templates", lineno, col + pos)
            pos += 1
    if not templates:
        raise GrammarError('lexical entry without predicate templates', lineno, col)
    return tuple(templates)


def _make_entry(word, avm, templates, paths, lineno, col):
    fs = FeatureStructure.from_assignments(avm)
    if fs is None:
        raise GrammarError(f'lexical entry {word!r}: inconsistent sign', lineno, col)
    slots = []
    for p, v in avm:
        if isinstance(v, Var) and all(v.name != n for n, _ in slots):
            slots.append((v.name, p))
    template_vars = {a.name for t in templates for a in t.args if isinstance(a, Var)}
    sign_vars = {n for n, _ in slots}
    counts = {}
    for t in templates:
        for a in t.args:
            if isinstance(a, Var):
                counts[a.name] = counts.get(a.name, 0) + 1
    for name in template_vars - sign_vars:
        if counts[name] < 2:
            raise GrammarError(f'lexical entry {word!r}: ${name} occurs only once', lineno, col)
    return LexEntry(word, fs, templates, tuple(slots))


def _prefix_set(paths):
    out = set()
    for p in paths:
        for i in range(1, len(p) + 1):
            out.add(p[:i])
    return out


def serialize_grammar(g: Grammar) -> str:
    lines = ['paths: ' + ', '.join(path_str(p) for p in g.paths)]
    extra = sorted(g.features - {f for p in g.paths for f in p} - {'cat'})
    if extra:
        lines.append('features: ' + ', '.join(extra))
    lines.append('start: ' + format_avm(g.start))
    for r in g.rules:
        signs = format_signs(r.structure, r.arity + 1)
        lines.append(f'rule {r.name}: {signs[0]} -> {" ".join(signs[1:])}')
    for e in g.lexicon:
        names = {e.sign.node_at(path): name for name, path in e.slots}
        lines.append(f'lex "{e.word}": {format_avm(e.sign, names)} : '
                     + ', '.join(str(t) for t in e.templates))
    return '\n'.join(lines) + '\n'


def category_skeletons(g: Grammar) -> set:
    """Restricted signs of every mother, daughter and lexical entry."""
    out = set()
    for r in g.rules:
        for k in range(r.arity + 1):
            out.add(restrict(r.sign(k), g.paths))
    for e in g.lexicon:
        out.add(restrict(e.sign, g.paths))
    return out


# ---------------------------------------------------------------------------
# flat semantics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    pred: str
    args: tuple

    @property
    def indices(self) -> tuple:
        return tuple(a for a in self.args if is_index(a))

    def __str__(self):
        return f"{self.pred}({','.join(self.args)})"


def is_index(symbol: str) -> bool:
    return symbol[:1].islower()


@dataclass(frozen=True)
class SemInput:
    distinguished: str
    literals: tuple

    def __str__(self):
        return f"{self.distinguished} : {', '.join(str(l) for l in self.literals)}"

    @property
    def indices(self) -> set:
        return {i for lit in self.literals for i in lit.indices}


_SYMBOL = r'[A-Za-z][A-Za-z0-9_]*'
_LITERAL = re.compile(rf'\s*([a-z][A-Za-z0-9_]*)\s*\(\s*({_SYMBOL}(?:\s*,\s*{_SYMBOL})*)\s*\)\s*')


def parse_sem(text: str) -> SemInput:
    """Parse ``index : pred(args), ...``; lowercase args are indices."""
    text = _strip_comment(text).strip()
    head, colon, body = text.partition(':')
    if not colon:
        raise GrammarError("expected 'index : literals'", 1, 1)
    dist = head.strip()
    if not re.fullmatch(r'[a-z][A-Za-z0-9_]*', dist):
        raise GrammarError(f'bad distinguished index {dist!r}', 1, 1)
    literals = []
    pos = 0
    base = len(head) + 2
    while True:
        m = _LITERAL.match(body, pos)
        if not m:
            raise GrammarError('malformed literal', 1, base + pos)
        args = tuple(a.strip() for a in m.group(2).split(','))
        literals.append(Literal(m.group(1), args))
        pos = m.end()
        if pos >= len(body):
            break
        if body[pos] != ',':
            raise GrammarError("expected ','", 1, base + pos)
        pos += 1
    sem = SemInput(dist, tuple(literals))
    if dist not in sem.indices:
        raise GrammarError(f'distinguished index {dist!r} occurs in no literal', 1, 1)
    return sem


def validate_coherence(sem: SemInput) -> bool:
    """Literals form one connected component under index sharing."""
    lits = sem.literals
    if not lits:
        return False
    by_index = {}
    for i, lit in enumerate(lits):
        for x in lit.indices:
            by_index.setdefault(x, []).append(i)
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for x in lits[i].indices:
            for j in by_index[x]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
    return len(seen) == len(lits)
