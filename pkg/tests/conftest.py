import pytest

from chartgen import data_path
from chartgen.domains import compile_inner, compile_outer
from chartgen.grammar import parse_grammar

_criteria = {}


def load_bundled(name):
    return parse_grammar(data_path(name).read_text(encoding='utf-8'))


@pytest.fixture(scope='session')
def toy():
    return load_bundled('toy.gram')


@pytest.fixture(scope='session')
def english():
    return load_bundled('english.gram')


@pytest.fixture(scope='session')
def english_tables(english):
    inner = compile_inner(english)
    return inner, compile_outer(english, inner=inner)


@pytest.fixture(scope='session')
def toy_tables(toy):
    inner = compile_inner(toy)
    return inner, compile_outer(toy, inner=inner)


@pytest.fixture(scope='session')
def corpus():
    from chartgen.bench import read_corpus
    return read_corpus(data_path('corpus.sem').read_text(encoding='utf-8'))


def pytest_runtest_logreport(report):
    # acceptance tests are named test_criterion_<n>_<what>
    name = report.nodeid.rsplit('::', 1)[-1]
    if not name.startswith('test_criterion_'):
        return
    if report.when == 'call' or (report.when == 'setup' and report.outcome != 'passed'):
        _criteria[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section('acceptance criteria')
    for name in sorted(_criteria, key=lambda n: int(n.split('_')[2])):
        status = 'PASS' if _criteria[name] == 'passed' else 'FAIL'
        terminalreporter.write_line(f'{status}  {name}')
