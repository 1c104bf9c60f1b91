import math
import pathlib

import pytest

import dtapb

DATA = pathlib.Path(__file__).resolve().parents[2] / "data" / "example.csv"


def test_lndor_matches_closed_form():
    e = dtapb.estimate(45, 5, 10, 90)
    assert e.value == pytest.approx(math.log(45 * 90 / (5 * 10)))
    assert e.se == pytest.approx(math.sqrt(1 / 45 + 1 / 5 + 1 / 10 + 1 / 90))
    assert e.n == 150


def test_zero_cell_is_corrected():
    e = dtapb.estimate(40, 0, 7, 53)
    assert e.value == pytest.approx(math.log(40.5 * 53.5 / (0.5 * 7.5)))
    with pytest.raises(dtapb.DtapbError) as info:
        dtapb.estimate(40, 0, 7, 53, correction="never")
    assert info.value.code == "ZeroCell"


def test_youden_and_ess():
    e = dtapb.estimate(45, 5, 10, 90, measure="youden")
    assert e.value == pytest.approx(45 / 50 - 10 / 100)
    assert dtapb.effective_sample_size(45, 5, 10, 90) == pytest.approx(4 * 50 * 100 / 150)


def test_read_and_analyze_example():
    rows = dtapb.read_dataset(str(DATA))
    assert len(rows) == 10
    assert rows[8]["study_id"] == "S09"
    for name in ["E(lnDOR,SE)", "M(lnDOR,N)", "B(lnDOR,Var)", "T(lnDOR,SE,R)", "T(lnDOR,N,L)"]:
        r = dtapb.analyze(rows, name)
        assert r.test_id == name
        assert 0.0 <= r.p_value <= 1.0
        assert r.reject == (r.p_value <= 0.1)
        assert (r.k0 is not None) == name.startswith("T(")


def test_statistical_error_is_flagged():
    with pytest.raises(dtapb.DtapbError) as info:
        dtapb.analyze([(5, 2, 3, 4), (1, 2, 3, 4)])
    assert info.value.code == "TooFewStudies"
    assert info.value.statistical
    with pytest.raises(dtapb.DtapbError) as info:
        dtapb.analyze([(-1, 2, 3, 4)] * 3)
    assert not info.value.statistical


def test_kendall_against_scipy():
    stats = pytest.importorskip("scipy.stats")
    x = [0.3, 1.2, -0.5, 2.2, 0.9, 1.1, 0.0, 3.1, 1.2]
    y = [1.0, 2.0, 0.5, 2.5, 2.0, 1.5, 0.2, 3.0, 2.8]
    r = dtapb.kendall_tau(x, y)
    assert r.tau == pytest.approx(stats.kendalltau(x, y).statistic)


def test_wilson_against_closed_form():
    lo, hi = dtapb.wilson_interval(10, 100)
    z = 1.959963984540054
    p, n = 0.1, 100
    centre = (p + z * z / (2 * n)) / (1 + z * z / n)
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / (1 + z * z / n)
    assert lo == pytest.approx(centre - half)
    assert hi == pytest.approx(centre + half)


def test_variants_round_trip():
    for v in dtapb.default_battery():
        assert dtapb.TestVariant(v.name) == v
    with pytest.raises(dtapb.DtapbError):
        dtapb.TestVariant("X(lnDOR)")


def test_trim_fill_state():
    ests = [dtapb.EffectEstimate(v, 0.2 + 0.05 * i, 100 + 10 * i) for i, v in
            enumerate([0.1, -0.2, 0.3, 0.05, -0.1, 0.25, 0.0, -0.3])]
    s = dtapb.trim_fill(ests, axis="se", estimator="l")
    assert len(s.centered) == len(ests)
    assert sum(s.ranks) == pytest.approx(len(ests) * (len(ests) + 1) / 2)
    assert 0 <= s.k0 < len(ests)
    assert s.converged


def test_simulation_is_reproducible_across_threads():
    cond = dtapb.default_grid()[2]
    a = dtapb.run_condition(cond, ["E(lnDOR,SE)", "B(Y,Var)"], reps=60, seed=4, parallelism=1)
    b = dtapb.run_condition(cond, ["E(lnDOR,SE)", "B(Y,Var)"], reps=60, seed=4, parallelism=3)
    assert [r.rejections for r in a] == [r.rejections for r in b]
    tables = dtapb.generate(cond, seed=4, replicate=0)
    assert tables == dtapb.generate(cond, seed=4, replicate=0)
    assert all(t.tp + t.fn >= 1 and t.fp + t.tn >= 1 for t in tables)


def test_grid_from_json():
    grid = dtapb.grid_from_json(
        '{"mu": [[0, 0]], "sigma": [[0, 0, 0]], "k": [10, 30], "pi": [0.5],'
        ' "bias": [{"mechanism": "none"}]}'
    )
    assert [c.k for c in grid] == [10, 30]
    with pytest.raises(dtapb.DtapbError):
        dtapb.grid_from_json("{}")
