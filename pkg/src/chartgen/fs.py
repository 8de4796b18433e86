"""
Untyped feature structures with reentrancy.

A structure is a rooted, acyclic graph.  Every node is either an atom
(a constant such as ``np`` or ``j``) or a non-atomic node carrying zero or
more labelled arcs; a non-atomic node without arcs is an unbound variable.
Two paths may lead to the same node, which is how token identity
(structure sharing) is expressed.

Structures are immutable and always kept in a canonical form: nodes are
numbered in the order a depth-first walk with sorted features first
reaches them.  Two structures therefore compare equal (and hash equal)
exactly when they are alphabetic variants of each other, which is what
every set operation in the domain compiler needs.

The textual form is a bracketed list of dotted path assignments::

    [cat=np, sem.arg1=$X, sem.arg2=j]

``$NAME`` introduces a variable (shared wherever the name recurs within one
parse), bare lowercase tokens are atoms and ``[]`` is the empty structure.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence, Tuple

Path = Tuple[str, ...]

ROOT: Path = ()


def as_path(p) -> Path:
    """Accept ``'sem.arg1'``, ``('sem', 'arg1')`` or ``()``."""
    if isinstance(p, str):
        return tuple(p.split('.')) if p else ()
    return tuple(p)


def path_str(p: Path) -> str:
    return '.'.join(p)


def is_prefix(short: Path, long: Path) -> bool:
    return long[:len(short)] == short


class Value(NamedTuple):
    """What sits at the end of a path: see :meth:`FeatureStructure.value_at`."""
    node: int
    kind: str            # 'atom', 'variable' or 'complex'
    atom: Optional[str]


class FeatureStructure:
    """Immutable feature structure in canonical form.

    ``_nodes[i]`` is either a ``str`` (an atom) or a tuple of
    ``(feature, child_index)`` pairs sorted by feature.  Node 0 is the root.
    """

    __slots__ = ('_nodes', '_hash')

    def __init__(self, nodes):
        self._nodes = tuple(nodes)
        self._hash = hash(self._nodes)

    @classmethod
    def empty(cls) -> 'FeatureStructure':
        return _EMPTY

    @classmethod
    def from_assignments(cls, assignments) -> Optional['FeatureStructure']:
        """Build from ``(path, value)`` pairs; ``None`` if they clash.

        A value is an atom string, ``None`` for a fresh unbound node, or a
        ``Var(name)``; equal variable names denote the same node.
        """
        g = _Graph()
        root = g.new()
        names = {}
        for path, value in assignments:
            node = g.walk(root, as_path(path))
            if node is None:
                return None
            if isinstance(value, Var):
                if value.name in names:
                    if not g.union(names[value.name], node):
                        return None
                else:
                    names[value.name] = node
            elif value is not None:
                if not g.union(node, g.new(value)):
                    return None
        return g.freeze(root)

    # -- access ---------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, FeatureStructure) and self._nodes == other._nodes

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return format_avm(self)

    def __len__(self):
        return len(self._nodes)

    def is_atom(self, node: int) -> bool:
        return isinstance(self._nodes[node], str)

    def atom(self, node: int) -> Optional[str]:
        v = self._nodes[node]
        return v if isinstance(v, str) else None

    def arcs(self, node: int) -> tuple:
        v = self._nodes[node]
        return () if isinstance(v, str) else v

    def child(self, node: int, feature: str) -> Optional[int]:
        for f, c in self.arcs(node):
            if f == feature:
                return c
        return None

    def node_at(self, path) -> Optional[int]:
        node = 0
        for f in as_path(path):
            node = self.child(node, f)
            if node is None:
                return None
        return node

    def value_at(self, path) -> Optional[Value]:
        """Describe the node at ``path``; ``None`` when the path is absent."""
        node = self.node_at(path)
        if node is None:
            return None
        v = self._nodes[node]
        if isinstance(v, str):
            return Value(node, 'atom', v)
        return Value(node, 'complex' if v else 'variable', None)

    def atom_at(self, path) -> Optional[str]:
        node = self.node_at(path)
        return None if node is None else self.atom(node)

    def at(self, path) -> Optional['FeatureStructure']:
        """The substructure rooted at ``path`` (a fresh canonical structure)."""
        node = self.node_at(path)
        if node is None:
            return None
        if node == 0:
            return self
        return _canonical(self._nodes, node)

    def has_path(self, path) -> bool:
        return self.node_at(path) is not None

    def token_identical(self, p1, p2) -> bool:
        n1 = self.node_at(p1)
        return n1 is not None and n1 == self.node_at(p2)

    def walk(self, node: int = 0, prefix: Path = ()) -> Iterator[Tuple[Path, int]]:
        """Yield every ``(path, node)`` pair reachable from ``node``."""
        yield prefix, node
        for f, c in self.arcs(node):
            yield from self.walk(c, prefix + (f,))

    def features(self) -> set:
        return {f for v in self._nodes if not isinstance(v, str) for f, _ in v}

    def embed(self, path) -> 'FeatureStructure':
        """Return a structure holding this one at ``path``."""
        path = as_path(path)
        if not path:
            return self
        g = _Graph()
        root = g.new()
        g.union(g.walk(root, path), g.load(self))
        return g.freeze(root)


class Var(NamedTuple):
    name: str


class _Graph:
    """Mutable union-find graph used to build and unify structures."""

    def __init__(self):
        self.parent = []
        self.atoms = []
        self.arcs = []

    def new(self, atom=None) -> int:
        self.parent.append(len(self.parent))
        self.atoms.append(atom)
        self.arcs.append({})
        return len(self.parent) - 1

    def find(self, n: int) -> int:
        parent = self.parent
        while parent[n] != n:
            parent[n] = parent[parent[n]]
            n = parent[n]
        return n

    def load(self, fs: FeatureStructure) -> int:
        base = len(self.parent)
        for v in fs._nodes:
            if isinstance(v, str):
                self.new(v)
            else:
                i = self.new()
                self.arcs[i] = {f: base + c for f, c in v}
        return base

    def walk(self, node: int, path: Path) -> Optional[int]:
        """Follow ``path``, creating missing arcs; ``None`` through an atom."""
        for f in path:
            node = self.find(node)
            if self.atoms[node] is not None:
                return None
            arcs = self.arcs[node]
            if f not in arcs:
                arcs[f] = self.new()
            node = arcs[f]
        return self.find(node)

    def union(self, a: int, b: int) -> bool:
        todo = [(a, b)]
        while todo:
            a, b = todo.pop()
            a, b = self.find(a), self.find(b)
            if a == b:
                continue
            aa, ba = self.atoms[a], self.atoms[b]
            if aa is not None and ba is not None:
                if aa != ba:
                    return False
            elif aa is not None and self.arcs[b] or ba is not None and self.arcs[a]:
                return False
            self.parent[b] = a
            if ba is not None:
                self.atoms[a] = ba
            arcs_a = self.arcs[a]
            for f, c in self.arcs[b].items():
                if f in arcs_a:
                    todo.append((arcs_a[f], c))
                else:
                    arcs_a[f] = c
            self.arcs[b] = {}
        return True

    def freeze(self, root: int) -> Optional[FeatureStructure]:
        """Canonicalise the structure under ``root``; ``None`` if cyclic."""
        order = {}
        nodes = []
        on_path = set()

        def visit(n):
            n = self.find(n)
            if n in on_path:
                raise _Cycle
            if n in order:
                return order[n]
            idx = order[n] = len(nodes)
            nodes.append(None)
            if self.atoms[n] is not None:
                nodes[idx] = self.atoms[n]
            else:
                on_path.add(n)
                nodes[idx] = tuple((f, visit(c)) for f, c in sorted(self.arcs[n].items()))
                on_path.discard(n)
            return idx

        try:
            visit(root)
        except _Cycle:
            return None
        return FeatureStructure(nodes)


class _Cycle(Exception):
    pass


def _canonical(nodes, start: int) -> FeatureStructure:
    order = {}
    out = []

    def visit(n):
        if n in order:
            return order[n]
        idx = order[n] = len(out)
        out.append(None)
        v = nodes[n]
        out[idx] = v if isinstance(v, str) else tuple((f, visit(c)) for f, c in v)
        return idx

    visit(start)
    return FeatureStructure(out)


_EMPTY = FeatureStructure([()])


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def unify(a: FeatureStructure, b: FeatureStructure) -> Optional[FeatureStructure]:
    """Most general structure subsumed by both, or ``None`` on a clash.

    Clashes are distinct atoms at one node, an atom meeting a node with
    arcs, or a result that would be cyclic.
    """
    if a is b or a == b:
        return a
    if a is _EMPTY:
        return b
    if b is _EMPTY:
        return a
    g = _Graph()
    ra = g.load(a)
    rb = g.load(b)
    if not g.union(ra, rb):
        return None
    return g.freeze(ra)


def unifiable(a: FeatureStructure, b: FeatureStructure) -> bool:
    return unify(a, b) is not None


def unify_at(host: FeatureStructure, path, guest: FeatureStructure) -> Optional[FeatureStructure]:
    """Unify ``guest`` with the substructure of ``host`` at ``path``."""
    g = _Graph()
    root = g.load(host)
    target = g.walk(root, as_path(path))
    if target is None or not g.union(target, g.load(guest)):
        return None
    return g.freeze(root)


def subsumes(a: FeatureStructure, b: FeatureStructure) -> bool:
    """True iff ``a`` is at least as general as ``b``.

    Every path of ``a`` exists in ``b``, atoms agree, and paths sharing a
    node in ``a`` share a node in ``b``.
    """
    if a == b:
        return True
    image = {}
    todo = [(0, 0)]
    while todo:
        na, nb = todo.pop()
        seen = image.get(na)
        if seen is not None:
            if seen != nb:
                return False
            continue
        image[na] = nb
        va = a._nodes[na]
        vb = b._nodes[nb]
        if isinstance(va, str):
            if va != vb:
                return False
        elif va:
            if isinstance(vb, str):
                return False
            arcs_b = dict(vb)
            for f, c in va:
                if f not in arcs_b:
                    return False
                todo.append((c, arcs_b[f]))
    return True


def variant_equal(a: FeatureStructure, b: FeatureStructure) -> bool:
    # canonical form makes alphabetic variants identical
    return a == b


def token_identical(f: FeatureStructure, p1, p2) -> bool:
    return f.token_identical(p1, p2)


def value_at(f: FeatureStructure, p) -> Optional[Value]:
    return f.value_at(p)


def prefixes(paths: Iterable) -> frozenset:
    """All non-empty prefixes of the given paths."""
    out = set()
    for p in paths:
        p = as_path(p)
        for i in range(1, len(p) + 1):
            out.add(p[:i])
    return frozenset(out)


def restrict(f: FeatureStructure, paths: Iterable, keep_cat: bool = True) -> FeatureStructure:
    """Keep only the nodes lying on prefixes of ``paths`` (plus ``cat``).

    Nodes reached at the end of a kept path lose any arcs not themselves on
    a kept path; reentrancies among kept nodes survive.
    """
    keep = set(prefixes(paths))
    if keep_cat:
        keep.add(('cat',))
    g = _Graph()
    mapped = {0: g.new()}
    frontier = [((), 0)]
    while frontier:
        path, node = frontier.pop()
        src = mapped[node]
        if f.is_atom(node):
            g.atoms[src] = f.atom(node)
            continue
        for feat, child in f.arcs(node):
            sub = path + (feat,)
            if sub not in keep:
                continue
            if child not in mapped:
                mapped[child] = g.new()
                frontier.append((sub, child))
            else:
                frontier.append((sub, child))
            g.arcs[src][feat] = mapped[child]
    return g.freeze(mapped[0])


def relabel(parts: Sequence[Tuple[Path, FeatureStructure, Path]]) -> Optional[FeatureStructure]:
    """Assemble a structure from ``(target, source, source_path)`` triples.

    The node of each ``source`` at ``source_path`` is placed at ``target``
    in a fresh structure; sources that are the same object are loaded once,
    so token identity inside a source is kept.
    """
    g = _Graph()
    root = g.new()
    loaded = {}
    for target, source, spath in parts:
        base = loaded.get(id(source))
        if base is None:
            base = loaded[id(source)] = g.load(source)
        node = source.node_at(spath)
        if node is None:
            continue
        dest = g.walk(root, as_path(target))
        if dest is None or not g.union(dest, base + node):
            return None
    return g.freeze(root)


# ---------------------------------------------------------------------------
# Text syntax
# ---------------------------------------------------------------------------

class AVMSyntaxError(ValueError):
    def __init__(self, message, pos=0):
        super().__init__(message)
        self.pos = pos


_TOKEN = re.compile(r'\s*(?:(\[)|(\])|(,)|(=)|\$([A-Za-z0-9_]+)|([a-z][a-z0-9_]*(?:\.[a-z0-9_]+)*)|(\S))')


def read_avm(text: str, pos: int = 0):
    """Read one bracketed AVM starting at ``pos``.

    Returns ``(assignments, end)`` where assignments are ``(path, value)``
    pairs with values as accepted by :meth:`FeatureStructure.from_assignments`.
    """
    def token(p):
        m = _TOKEN.match(text, p)
        if not m or m.end() == p:
            return None, None, len(text)
        kinds = ('[', ']', ',', '=', 'var', 'name', 'junk')
        for i, kind in enumerate(kinds, 1):
            if m.group(i) is not None:
                return kind, m.group(i), m.end()
        return None, None, len(text)

    kind, val, p = token(pos)
    if kind != '[':
        raise AVMSyntaxError("expected '['", _skip_ws(text, pos))
    assignments = []
    kind, val, q = token(p)
    if kind == ']':
        return assignments, q
    while True:
        start = _skip_ws(text, p)
        kind, val, p = token(p)
        if kind != 'name':
            raise AVMSyntaxError('expected a feature path', start)
        path = tuple(val.split('.'))
        kind, _, p2 = token(p)
        if kind != '=':
            raise AVMSyntaxError("expected '='", _skip_ws(text, p))
        start = _skip_ws(text, p2)
        kind, v, p = token(p2)
        if kind == 'var':
            value = Var(v)
        elif kind == 'name' and '.' not in v:
            value = v
        elif kind == '[':
            kind2, _, p3 = token(p)
            if kind2 != ']':
                raise AVMSyntaxError("only the empty structure '[]' may be nested", start)
            value, p = None, p3
        else:
            raise AVMSyntaxError('expected an atom, $variable or []', start)
        assignments.append((path, value))
        start = _skip_ws(text, p)
        kind, _, p = token(p)
        if kind == ']':
            return assignments, p
        if kind != ',':
            raise AVMSyntaxError("expected ',' or ']'", start)


def _skip_ws(text, pos):
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def parse_avm(text: str) -> FeatureStructure:
    assignments, end = read_avm(text)
    if text[end:].strip():
        raise AVMSyntaxError('trailing text after AVM', _skip_ws(text, end))
    fs = FeatureStructure.from_assignments(assignments)
    if fs is None:
        raise AVMSyntaxError('inconsistent AVM (clash or cycle)')
    return fs


def parse_signs(*texts: str) -> FeatureStructure:
    """Parse several AVMs sharing one variable scope.

    Sign ``i`` ends up under feature ``str(i)`` of the result, the same
    layout rules use (mother at ``'0'``).
    """
    assignments = []
    for i, text in enumerate(texts):
        avm, end = read_avm(text)
        if text[end:].strip():
            raise AVMSyntaxError('trailing text after AVM', _skip_ws(text, end))
        assignments.extend(((str(i),) + p, v) for p, v in avm)
        assignments.append(((str(i),), None))
    fs = FeatureStructure.from_assignments(assignments)
    if fs is None:
        raise AVMSyntaxError('inconsistent AVMs (clash or cycle)')
    return fs


def _var_names():
    i = 0
    while True:
        q, r = divmod(i, 26)
        yield chr(ord('A') + r) + (str(q) if q else '')
        i += 1


def assignments_of(fs: FeatureStructure, names: Optional[dict] = None) -> list:
    """List ``(path, text_value)`` pairs that rebuild ``fs`` exactly.

    ``names`` optionally fixes variable names for given node numbers.
    """
    refs = {}
    for v in fs._nodes:
        if not isinstance(v, str):
            for _, c in v:
                refs[c] = refs.get(c, 0) + 1
    names = dict(names or {})
    taken = set(names.values())
    fresh = (n for n in _var_names() if n not in taken)
    out = []
    expanded = set()

    def visit(node, path):
        v = fs._nodes[node]
        shared = refs.get(node, 0) > 1
        if shared or (not isinstance(v, str) and not v):
            if node not in names:
                names[node] = next(fresh)
            if path:
                out.append((path, '$' + names[node]))
        if node in expanded:
            return
        expanded.add(node)
        if isinstance(v, str):
            out.append((path, v))
        else:
            for f, c in v:
                visit(c, path + (f,))

    visit(0, ())
    return [(p, v) for p, v in out if p]


def format_avm(fs: FeatureStructure, names: Optional[dict] = None) -> str:
    return '[' + ', '.join(f'{path_str(p)}={v}' for p, v in assignments_of(fs, names)) + ']'


def format_signs(fs: FeatureStructure, count: int) -> list:
    """Inverse of :func:`parse_signs`: one AVM string per top-level sign."""
    groups = [[] for _ in range(count)]
    for p, v in assignments_of(fs):
        if len(p) > 1:
            groups[int(p[0])].append(f'{path_str(p[1:])}={v}')
    return ['[' + ', '.join(g) + ']' for g in groups]
