import io
import json
from fractions import Fraction

import pytest

from tollshare import pipeline as P
from tollshare import values as V

HEADER = "section,adi_light,adi_heavy1,adi_heavy2,fare_light,fare_heavy1,fare_heavy2\n"


@pytest.fixture(scope="module")
def table():
    return P.load_ap9()


@pytest.fixture(scope="module")
def levels(table):
    return P.build_level_costs(table)


def test_first_row(table):
    row = table.row("AC-Ma")
    assert row.adi == (22661, 1032, 1032)
    assert row.fare == (Fraction("1.90"), Fraction("3.30"), Fraction("4.05"))
    assert table.classes == P.DEFAULT_CLASSES and len(table.rows) == 12


def test_non_monotone_fares_rejected():
    with pytest.raises(P.TariffError, match="non-monotone fares"):
        P.parse_tariff_csv(io.StringIO(HEADER + "X,1,1,1,2.00,1.00,3.00\n"))


def test_empty_file_rejected():
    with pytest.raises(P.TariffError, match="no data rows"):
        P.parse_tariff_csv(io.StringIO(HEADER))


def test_negative_adi_names_row_and_column():
    with pytest.raises(P.TariffError, match="adi_heavy1"):
        P.parse_tariff_csv(io.StringIO(HEADER + "X,1,-1,1,1.00,2.00,3.00\n"))


def test_level_costs(levels):
    assert tuple(levels[("AC-Ma", l)] for l in range(3)) == (Fraction("46977.50"), Fraction("2889.60"), Fraction("774.00"))
    assert tuple(levels[("Mo-Vg", l)] for l in range(3)) == (Fraction("72144.60"), Fraction("4098.60"), Fraction("1821.60"))


def test_single_class_table():
    t = P.parse_tariff_csv(io.StringIO("section,adi_car,fare_car\nA,10,2.50\n"))
    lv = P.build_level_costs(t)
    assert lv.levels == 1 and lv[("A", 0)] == 25


def test_scale_level(levels):
    assert P.scale_level(levels, 2, 1).costs == levels.costs
    assert P.scale_level(levels, 2, 4)[("AC-Ma", 2)] == 3096
    with pytest.raises(ValueError):
        P.scale_level(levels, 3, 2)
    with pytest.raises(ValueError):
        P.scale_level(levels, 1, 0)


def test_build_problem_counts(table, levels):
    prob = P.build_problem(levels, table)
    assert len(prob.profiles) == 36 and len(prob.sections) == 36
    assert all(p.union is None for p in prob.profiles)
    block = P.build_problem(levels, table, P.UnionSpec.class_block("heavy2"))
    assert {p.union for p in block.profiles if p.label.endswith("heavy2")} == {"class-block:heavy2"}
    assert all(p.union is None for p in block.profiles if not p.label.endswith("heavy2"))


def test_zero_adi_profile_omitted():
    t = P.parse_tariff_csv(io.StringIO(HEADER + "A,10,0,5,1.00,2.00,3.00\n"))
    prob = P.build_problem(P.build_level_costs(t), t)
    assert {p.label for p in prob.profiles} == {"A:light", "A:heavy2"}


def test_unknown_class_in_unions(table, levels):
    with pytest.raises(P.TariffError):
        P.build_problem(levels, table, P.UnionSpec.class_block("bus"))


def test_union_file_format(table, levels):
    spec = P.parse_union_spec("# fleets\nfleetA: AC-Ma:heavy1, Ma-Or:heavy1\nclass-block:heavy2\n")
    assert spec.labels == ("class-block:heavy2", "fleetA")
    prob = P.build_problem(levels, table, spec)
    assert {p.label for p in prob.profiles if p.union == "fleetA"} == {"AC-Ma:heavy1", "Ma-Or:heavy1"}
    with pytest.raises(P.TariffError):
        P.parse_union_spec("broken line without cells")


def test_shapley_reproduces_fares_exactly(table):
    toll = P.solve(table, "shapley")
    for r in table.rows:
        for c, name in enumerate(table.classes):
            assert toll.exact[(r.section, name)] == r.fare[c]


@pytest.mark.parametrize("value", V.VALUE_NAMES)
def test_exact_revenue_equals_cost(table, value):
    toll = P.solve(table, value, P.UnionSpec.class_block("heavy2"))
    assert toll.revenue(rounded=False) == toll.total_cost


@pytest.mark.parametrize("value", V.VALUE_NAMES)
def test_ceiling_recovers_cost(table, value):
    toll = P.solve(table, value, P.UnionSpec.class_block("heavy2"), "ceil2")
    assert toll.revenue() >= toll.total_cost


def test_shapley_class_monotone(table):
    toll = P.solve(table, "shapley")
    for s in toll.sections:
        fares = [toll.exact[(s, c)] for c in table.classes]
        assert fares == sorted(fares)


def test_rounding_modes():
    assert P.round_money(Fraction("1.005"), "nearest2") == Fraction("1.01")
    assert P.round_money(Fraction("1.001"), "ceil2") == Fraction("1.01")
    assert P.round_money(Fraction(1, 3), "none") == Fraction(1, 3)
    assert P.normalize_rounding("nearest-2dp") == "nearest2"
    with pytest.raises(ValueError):
        P.normalize_rounding("banker")


def test_renderings(table):
    toll = P.solve(table, "tijs", rounding="nearest2")
    assert toll.to_csv().splitlines()[1] == "AC-Ma,1.68,1.79,1.82"
    assert "| AC-Ma | 1.68 | 1.79 | 1.82 |" in toll.to_markdown()
    data = json.loads(toll.to_json())
    first = data["rows"][0]
    assert first["fare"] == "1.68" and len(first["exact"]) == 2
    assert "revenue" in toll.to_markdown()
