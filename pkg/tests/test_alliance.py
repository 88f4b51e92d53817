from fractions import Fraction

import pytest

from tollshare import alliance as A
from tollshare import pipeline as P
from tollshare import values as V
from tollshare.model import CoalitionStructure, HighwayProblem, merge_unions

FIRST_FOUR = ["1", "2", "3", "4"]


def test_owen_three_way_shared_section(FIX_C):
    r = A.owen_alliance(FIX_C, CoalitionStructure.singletons(FIX_C), ["1", "2"])
    assert r.pre_sum == 4 and r.post_total == 3
    assert r.strict_condition and r.witnesses == ("t",)
    assert r.theorem_holds


def test_owen_disjoint_merge_is_neutral():
    p = HighwayProblem.build({"x": 4, "y": 5}, {"1": ["x"], "2": ["y"]})
    r = A.owen_alliance(p, CoalitionStructure.singletons(p), ["1", "2"])
    assert r.delta == 0 and not r.strict_condition and r.theorem_holds


def test_owen_fix_d(FIX_D):
    r = A.owen_alliance(FIX_D, CoalitionStructure.singletons(FIX_D), FIRST_FOUR)
    assert r.pre_sum == 1 + Fraction(2, 102)
    assert r.post_total == 1 + Fraction(1, 101)
    assert r.delta < 0 and r.theorem_holds


def test_coalitional_tijs_fix_d_is_harmful(FIX_D):
    r = A.coalitional_tijs_alliance(FIX_D, CoalitionStructure.singletons(FIX_D), FIRST_FOUR)
    assert r.pre_sum == Fraction(1, 13)
    assert r.post_total == Fraction(102, 101)
    assert not r.applicable and r.se_sections == {"t1"}
    assert r.theorem_holds is None
    assert r.delta == Fraction(102, 101) - Fraction(1, 13) > 0


def test_coalitional_tijs_applicable_and_strict():
    # unions 1 and 2 both use t1, which union 3 also uses
    p = HighwayProblem.build({"t1": 6, "t2": 4}, {"1": ["t1"], "2": ["t1", "t2"], "3": ["t1", "t2"]})
    r = A.coalitional_tijs_alliance(p, CoalitionStructure.singletons(p), ["1", "2"])
    assert r.applicable and r.strict_condition
    assert r.delta < 0 and r.theorem_holds


def test_coalitional_tijs_disjoint_exclusive():
    p = HighwayProblem.build({"x": 4, "y": 5, "z": 1}, {"1": ["x"], "2": ["y"], "3": ["z"]})
    r = A.coalitional_tijs_alliance(p, CoalitionStructure.singletons(p), ["1", "2"])
    assert r.delta == 0 and r.applicable


def test_shapley_tijs_totals_follow_owen(FIX_D):
    S = CoalitionStructure.singletons(FIX_D)
    st = A.shapley_tijs_alliance(FIX_D, S, FIRST_FOUR)
    ow = A.owen_alliance(FIX_D, S, FIRST_FOUR)
    assert (st.pre_sum, st.post_total) == (ow.pre_sum, ow.post_total)


def test_report_matches_recomputation(FIX_D):
    S = CoalitionStructure.singletons(FIX_D)
    merged = merge_unions(S, FIRST_FOUR, "ally")
    r = A.coalitional_tijs_alliance(FIX_D, S, FIRST_FOUR, "ally")
    after = V.union_totals(V.allocate("coalitional-tijs", FIX_D, merged), merged)
    before = V.union_totals(V.allocate("coalitional-tijs", FIX_D, S), S)
    assert r.post_total == after["ally"]
    assert r.pre_sum == sum(before[a] for a in FIRST_FOUR)


def test_invalid_merge(FIX_C):
    with pytest.raises(ValueError):
        A.owen_alliance(FIX_C, CoalitionStructure.singletons(FIX_C), ["1"])
    with pytest.raises(ValueError):
        A.alliance("shapley", FIX_C, CoalitionStructure.singletons(FIX_C), ["1", "2"])


def test_report_serialization(FIX_D):
    d = A.coalitional_tijs_alliance(FIX_D, CoalitionStructure.singletons(FIX_D), FIRST_FOUR).to_dict()
    assert d["post_total"] == [102, 101] and d["pre_sum"] == [1, 13]
    assert d["applicable"] is False


def test_heavy2_fleet_alliance_flips_with_top_level_cost():
    table = P.load_ap9()
    base = P.build_level_costs(table)
    outcomes = []
    for levels in (base, P.scale_level(base, 2, 4)):
        before = P.build_problem(levels, table)
        after = P.build_problem(levels, table, P.UnionSpec.class_block("heavy2"))
        r = A.aggregated_alliance("coalitional-tijs", before, after, "class-block:heavy2")
        assert not r.applicable
        outcomes.append(r.beneficial)
        owen = A.aggregated_alliance("owen", before, after, "class-block:heavy2")
        assert owen.theorem_holds
    assert outcomes == [True, False]
