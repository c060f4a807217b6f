from fractions import Fraction

import pytest

from arbest.bench import (
    CSV_COLUMNS,
    InsufficientGroups,
    RunRecord,
    emit_csv,
    query_scaling_report,
    read_csv,
    reference_arboricity,
    run_grid,
    run_record,
)
from arbest.exact import degeneracy
from arbest.generators import GraphFamilySpec, generate
from arbest.peeling import PeelConfig

HEADER = "family,n,m,seed,mode,arb_ref,alpha_hat,queries,passes,wall_ms,verdict_trace\n"


def rec(arb=2, queries=100, n=64, passes=None, mode="in-memory", digest="x"):
    return RunRecord("forest", n, n - 1, 3, mode, arb, 1, queries, passes, 1.23456, "32:Y|16:N", digest)


def test_header_only(tmp_path):
    p = tmp_path / "r.csv"
    emit_csv([], p)
    assert p.read_text() == HEADER
    assert ",".join(CSV_COLUMNS) + "\n" == HEADER


def test_one_record_two_lines(tmp_path):
    p = tmp_path / "r.csv"
    emit_csv([rec()], p)
    data = p.read_bytes()
    assert data.count(b"\n") == 2 and b"\r" not in data
    assert data.decode().splitlines()[1] == "forest,64,63,3,in-memory,2,1,100,,1.235,32:Y|16:N"


def test_roundtrip_and_append(tmp_path):
    p = tmp_path / "r.csv"
    records = [rec(), rec(arb=4, passes=7, mode="streaming")]
    emit_csv(records[:1], p, append=True)
    emit_csv(records[1:], p, append=True)
    assert read_csv(p) == records
    assert p.read_text().count("family,") == 1


def test_read_rejects_foreign_header(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_csv(p)


def test_bad_mode():
    with pytest.raises(ValueError):
        rec(mode="batch")


def test_single_group_is_insufficient():
    with pytest.raises(InsufficientGroups):
        query_scaling_report([rec(arb=2), rec(arb=2)])


def test_all_forest_grid():
    rep = query_scaling_report([rec(arb=1, queries=q) for q in (10, 20, 30)], min_groups=1)
    assert len(rep.rows) == 1 and rep.rows[0].median_queries == 20
    assert rep.band == 1 and not rep.flagged
    assert rep.rows[0].ratio == 20 / (64 * 6 ** 3)


def test_flagging_and_monotonicity():
    recs = [rec(arb=8, queries=8000), rec(arb=32, queries=2000), rec(arb=128, queries=2100)]
    rep = query_scaling_report(recs)
    assert [r.flagged for r in rep.rows] == [False, False, True]
    assert rep.band == pytest.approx(4.2)
    assert not rep.medians_decreasing()
    assert "median_queries" in rep.table()
    with pytest.raises(ValueError):
        query_scaling_report([rec(digest="a"), rec(arb=4, digest="b"), rec(arb=8, digest="a")])


def test_reference_arboricity():
    k = generate(GraphFamilySpec("clique-plus-isolated", {"n": 12, "s": 5}))
    assert reference_arboricity(k) == 3
    big = GraphFamilySpec("clique-plus-isolated", {"n": 100, "s": 40})
    assert reference_arboricity(generate(big), big) == 20
    f = GraphFamilySpec("forest", {"n": 100}, 1)
    assert reference_arboricity(generate(f), f) == 1
    pc = GraphFamilySpec("planted-core", {"n": 200, "beta": 15}, 1)
    assert reference_arboricity(generate(pc), pc) == 8
    ur = GraphFamilySpec("uniform-random", {"n": 60, "m": 200}, 1)
    g = generate(ur)
    assert reference_arboricity(g, ur) == degeneracy(g)


def test_run_record_modes_reproducible():
    spec = GraphFamilySpec("planted-core", {"n": 256, "beta": 31}, 4)
    tmpl = PeelConfig.scaled(256, L=2, ell=3, c0=Fraction(1, 2), cs=Fraction(1, 4), cb=2)
    a = run_record(spec, tmpl)
    b = run_record(spec, tmpl)
    assert a.row()[:9] == b.row()[:9] and a.verdict_trace == b.verdict_trace
    assert a.passes is None and a.config_digest == tmpl.digest()
    s = run_record(spec, tmpl, mode="streaming")
    assert s.passes is not None and s.passes <= 2 * tmpl.ell + 2


def test_run_grid_seeds():
    recs = run_grid([GraphFamilySpec("forest", {"n": 64})], trials=3, base_seed=10)
    assert [r.seed for r in recs] == [10, 11, 12]
    assert all(r.alpha_hat == 1 and r.arb_ref == 1 for r in recs)
