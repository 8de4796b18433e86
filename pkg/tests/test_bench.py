from chartgen import bench
from chartgen.bench import StatsRow


def test_round_trip(tmp_path):
    rows = [StatsRow('e : dog(e), with(e,k)', 'none', 20, 0, 0, 1, 1.5),
            StatsRow('r : a(r)', 'both', 12, 3, 2, 1, 0.75),
            StatsRow(bench.AGGREGATE, 'both-vs-none', 26.6, None, None, None, -3.0)]
    path = tmp_path / 's.csv'
    bench.write_rows(path, rows[:1])
    bench.write_rows(path, rows[1:], append=True)
    text = path.read_text()
    assert text.count('input,mode') == 1
    assert bench.parse_rows(text) == rows


def test_reduction():
    assert bench.reduction(117, 56) == 100 * 61 / 117
    assert bench.reduction(0, 0) == 0.0


def test_read_corpus():
    assert bench.read_corpus('# header\n\nr : a(r)  # note\ns : b(s)\n') == ['r : a(r)', 's : b(s)']


def test_run_bench_aggregate(english, english_tables, corpus):
    res = bench.run_bench(english, english_tables[1], corpus[:3])
    assert len(res.rows) == 12
    reds = dict(res.edge_reductions())
    agg = res.aggregate()
    assert abs(agg.edges_created - round(sum(reds.values()) / 3, 3)) < 1e-9
    for text in corpus[:3]:
        assert len({frozenset(res.strings[(text, m)]) for m in ('none', 'internal', 'external', 'both')}) == 1
