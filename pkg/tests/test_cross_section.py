import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsmom import (
    Ar1Spec,
    Factor,
    FactorPanel,
    GridResult,
    GridSpec,
    MonthStamp,
    ReturnSeries,
    Sector,
    SectorMap,
    StrategyStats,
    build_regression_dataset,
    form_quintiles,
    gen_panel,
    group_grids,
    group_returns,
    quintile_assignment,
    run_grid,
    sector_index_grid,
    sector_within_grid,
    strategy_stream,
)
from tsmom.cross_section import QUINTILES, GroupAssignment, RegressionDataset
from tsmom.errors import EmptyGroupMonth, EmptySector, MissingGroup, SpecMismatch, TooFewAssets
from tsmom.stats import Significance

T0 = MonthStamp(2000, 1)
SMALL = GridSpec((1, 3, 6), (1, 3, 6))


def panel(values, month=T0, factor=Factor.MarketValueAll):
    return FactorPanel(factor, {(a, month): v for a, v in values.items()})


def sizes(assignment):
    return [sum(1 for g in assignment.values() if g == q) for q in QUINTILES]


class TestFormQuintiles:
    def test_ten_distinct(self):
        vals = {f"A{i}": float(i + 1) for i in range(10)}
        q = form_quintiles(panel(vals), T0)
        assert sizes(q) == [2] * 5
        assert {a for a, g in q.items() if g == "G1"} == {"A9", "A8"}
        assert {a for a, g in q.items() if g == "G5"} == {"A0", "A1"}

    def test_all_equal_uses_identifier_order(self):
        vals = {a: 1.0 for a in ["E", "B", "J", "A", "C", "D", "I", "F", "H", "G"]}
        q = form_quintiles(panel(vals), T0)
        assert [a for a in sorted(q) if q[a] == "G1"] == ["A", "B"]
        assert [a for a in sorted(q) if q[a] == "G5"] == ["I", "J"]

    def test_seven_assets(self):
        q = form_quintiles(panel({f"A{i}": float(i + 1) for i in range(7)}), T0)
        assert sizes(q) == [2, 2, 1, 1, 1]

    def test_too_few(self):
        with pytest.raises(TooFewAssets):
            form_quintiles(panel({f"A{i}": 1.0 for i in range(4)}), T0)

    def test_latest_value_used(self):
        cells = {(f"A{i}", T0): float(i + 1) for i in range(5)}
        cells[("A0", T0 + 2)] = 100.0  # A0 becomes the largest later on
        p = FactorPanel(Factor.ClosingPrice, cells)
        assert form_quintiles(p, T0 + 1)["A0"] == "G5"
        assert form_quintiles(p, T0 + 2)["A0"] == "G1"

    def test_assignment_uses_prior_month(self):
        cells = {(f"A{i}", T0): float(i + 1) for i in range(5)}
        cells[("A0", T0 + 2)] = 100.0
        a = quintile_assignment(FactorPanel(Factor.ClosingPrice, cells), [T0, T0 + 2, T0 + 3])
        assert T0 not in a.memberships  # nothing known before the first month
        assert a.memberships[T0 + 2]["A0"] == "G5"
        assert a.memberships[T0 + 3]["A0"] == "G1"


values_maps = st.dictionaries(
    st.text("ABCDEFGH", min_size=1, max_size=3), st.floats(0.01, 1e6), min_size=5, max_size=40
)


@given(values_maps)
def test_quintiles_partition(vals):
    q = form_quintiles(panel(vals), T0)
    assert set(q) == set(vals)
    s = sizes(q)
    assert max(s) - min(s) <= 1
    assert s == sorted(s, reverse=True)
    # every G_k value is >= every G_{k+1} value
    for hi, lo in zip(QUINTILES, QUINTILES[1:]):
        assert min(vals[a] for a in q if q[a] == hi) >= max(vals[a] for a in q if q[a] == lo)


@given(st.dictionaries(st.text("ABCDEFGH", min_size=1, max_size=3), st.integers(1, 10**6), min_size=5, max_size=40))
def test_quintiles_rank_based(vals):
    base = form_quintiles(panel(vals), T0)
    rooted = form_quintiles(panel({a: float(np.sqrt(v)) for a, v in vals.items()}), T0)
    cubed = form_quintiles(panel({a: 3 * v**3 + 1 for a, v in vals.items()}), T0)
    assert base == rooted == cubed


def fixed(members, months):
    return GroupAssignment("test", tuple(sorted(set(members.values()))), {m: members for m in months})


class TestGroupReturns:
    def test_mean_of_two(self):
        rs = [ReturnSeries("a", T0, [0.02]), ReturnSeries("b", T0, [0.04])]
        g = group_returns(fixed({"a": "G1", "b": "G1"}, [T0]), rs)
        assert g["G1"].values[0] == pytest.approx(0.03, abs=1e-15)

    def test_single_member(self):
        r = ReturnSeries("a", T0, [0.01, -0.02, 0.03])
        g = group_returns(fixed({"a": "G1"}, r.months), [r])
        assert np.array_equal(g["G1"].values, r.values)

    def test_missing_member_dropped(self):
        rs = [
            ReturnSeries("a", T0, [0.01, 0.02]),
            ReturnSeries("b", T0, [0.03, 0.04]),
            ReturnSeries("c", T0, [0.05]),
        ]
        g = group_returns(fixed({"a": "X", "b": "X", "c": "X"}, [T0, T0 + 1]), rs)
        assert g["X"].values.tolist() == pytest.approx([0.03, 0.03], abs=1e-15)

    def test_shared_series(self, rng):
        v = rng.normal(0, 0.05, 24)
        rs = [ReturnSeries(a, T0, v) for a in "abc"]
        g = group_returns(fixed({"a": "S", "b": "S", "c": "S"}, rs[0].months), rs)
        np.testing.assert_allclose(g["S"].values, v, rtol=0, atol=1e-15)

    def test_leading_months_trimmed(self):
        r = ReturnSeries("a", T0 + 2, [0.01, 0.02])
        g = group_returns(fixed({"a": "S"}, [T0 + i for i in range(4)]), [r])
        assert g["S"].start == T0 + 2 and len(g["S"]) == 2

    def test_interior_gap(self):
        rs = [ReturnSeries("a", T0, [0.01]), ReturnSeries("b", T0 + 2, [0.02])]
        with pytest.raises(EmptyGroupMonth):
            group_returns(fixed({"a": "S", "b": "S"}, [T0, T0 + 1, T0 + 2]), rs)


def planted_grids(coef, noise=0.0, rng=None):
    """Group grids whose annualized ERs follow the dummy-variable model."""
    spec = GridSpec()
    grids = {}
    for k, g in enumerate(QUINTILES):
        cells = {}
        for J, K in spec.cells():
            er = coef[0] + coef[1] * J + coef[2] * K + (coef[2 + k] if k else 0.0)
            if noise:
                er += rng.normal(0, noise)
            cells[(J, K)] = StrategyStats(J, K, er / 12, er, 1.0, 100, K - 1, Significance.NONE)
        grids[g] = GridResult(spec, cells, g)
    return grids


class TestRegressionDataset:
    def test_rows_and_dummies(self):
        ds = build_regression_dataset(planted_grids([0.1, 0, 0, 0, 0, 0, 0]))
        assert len(ds) == 405
        X = ds.design()
        g1 = np.array([g == "G1" for g in ds.group])
        assert np.all(X[g1, 3:] == 0)
        assert np.all(X[:, 3:].sum(axis=1) == (~g1).astype(float))
        assert np.linalg.matrix_rank(X) == 7

    def test_planted_recovery(self):
        coef = [0.1, -0.001, -0.002, 0.0, 0.0, 0.0, -0.05]
        fit = build_regression_dataset(planted_grids(coef)).fit()
        np.testing.assert_allclose(fit.coef, coef, rtol=0, atol=1e-9)

    def test_missing_group(self):
        grids = planted_grids([0.1] + [0] * 6)
        del grids["G3"]
        with pytest.raises(MissingGroup):
            build_regression_dataset(grids)

    def test_spec_mismatch(self):
        grids = planted_grids([0.1] + [0] * 6)
        grids["G2"] = GridResult(SMALL, {jk: grids["G2"][jk] for jk in SMALL.cells()})
        with pytest.raises(SpecMismatch):
            build_regression_dataset(grids)

    def test_from_real_grids(self):
        rs = gen_panel(Ar1Spec(phi=0.05, sigma=0.05, T=120, seed=3), 15)
        cells = {(r.asset, m): float(i + 1 + (m - T0) % 3) for i, r in enumerate(rs) for m in r.months}
        assignment = quintile_assignment(FactorPanel(Factor.TradingVolume, cells), rs[0].months)
        gs = group_grids(assignment, rs, None, SMALL)
        ds = build_regression_dataset(gs)
        assert len(ds) + len(ds.dropped) == 45
        assert isinstance(ds, RegressionDataset)


def sector_inputs(rng, n_sectors=10, per=1, T=150):
    sectors = list(Sector)[:n_sectors]
    entries, rs = {}, []
    for i, s in enumerate(sectors):
        for j in range(per):
            a = f"{s.name[:4]}{j}"
            entries[a] = s
            rs.append(ReturnSeries(a, T0, rng.normal(0.003, 0.05, T)))
    return SectorMap(entries), rs


class TestSectors:
    def test_single_stock_index_equals_run_grid(self, rng):
        sm, rs = sector_inputs(rng, n_sectors=2)
        out = sector_index_grid(sm, rs, None, SMALL)
        for r in rs:
            assert out[sm.entries[r.asset].value].cells == run_grid(r, None, SMALL).cells

    def test_duplicated_stock_equals_single(self, rng):
        v = rng.normal(0, 0.05, 120)
        sm = SectorMap({"a": Sector.Energy, "b": Sector.Energy})
        rs = [ReturnSeries("a", T0, v), ReturnSeries("b", T0, v)]
        single = run_grid(rs[0], None, SMALL)
        for fn in (sector_index_grid, sector_within_grid):
            g = fn(sm, rs, None, SMALL)["Energy"]
            for jk in SMALL.cells():
                assert g[jk].mean_monthly == pytest.approx(single[jk].mean_monthly, abs=1e-15)
                assert g[jk].t_stat == pytest.approx(single[jk].t_stat, rel=1e-9)

    def test_single_member_protocols_coincide(self, rng):
        sm, rs = sector_inputs(rng, n_sectors=3)
        a = sector_index_grid(sm, rs, None, SMALL)
        b = sector_within_grid(sm, rs, None, SMALL)
        assert a.keys() == b.keys()
        for k in a:
            assert a[k].cells == b[k].cells

    def test_long_short_cancel(self):
        # J = K = 1: "up" is always long and earns +0.02; "flip" alternates, so
        # its signal always opposes the next return and it earns -0.02
        sm = SectorMap({"up": Sector.FinanceAndEstate, "flip": Sector.FinanceAndEstate})
        rs = [
            ReturnSeries("up", T0, np.full(30, 0.02)),
            ReturnSeries("flip", T0, np.tile([0.02, -0.02], 15)),
        ]
        spec = GridSpec((1,), (1,))
        for r, sign in zip(rs, (1.0, -1.0)):
            assert np.all(strategy_stream(r, None, 1, 1, spec.method).values == sign * 0.02)
        cell = sector_within_grid(sm, rs, None, spec)["Finance and Estate"][(1, 1)]
        assert cell.stats.mean_monthly == 0.0
        assert cell.stats.significance is Significance.NONE

    def test_ten_sectors_default_spec(self, rng):
        sm, rs = sector_inputs(rng, per=2, T=60)
        out = sector_index_grid(sm, rs, None, GridSpec())
        assert len(out) == 10
        assert all(len(g) == 81 for g in out.values())

    def test_empty_sector(self, rng):
        sm = SectorMap({"a": Sector.Energy, "ghost": Sector.Technology})
        with pytest.raises(EmptySector):
            sector_index_grid(sm, [ReturnSeries("a", T0, rng.normal(size=40))], None, SMALL)

    def test_within_ragged_members(self, rng):
        # b starts later; early months average over a alone
        a = ReturnSeries("a", T0, rng.normal(0, 0.05, 80))
        b = ReturnSeries("b", T0 + 20, rng.normal(0, 0.05, 60))
        sm = SectorMap({"a": Sector.Energy, "b": Sector.Energy})
        g = sector_within_grid(sm, [a, b], None, GridSpec((1,), (1,)))["Energy"]
        assert g[(1, 1)].n_months == 79
