from fractions import Fraction

import pytest

from conftest import fix_a, fix_d
from tollshare.model import (
    CoalitionStructure,
    HighwayProblem,
    InvalidProblemError,
    classify_alliance,
    classify_sections,
    coalition_cost,
    merge_unions,
    quotient,
    restrict,
    to_money,
)


def test_valid_problem(FIX_A):
    assert FIX_A.validate() == []
    assert FIX_A.total_cost == 21


def test_empty_usage_is_invalid():
    p = HighwayProblem.build({"t1": 6, "t2": 12, "t3": 3}, {"1": [], "2": ["t1", "t2"], "3": ["t2", "t3"]})
    assert any("empty usage set" in v for v in p.validate())
    with pytest.raises(InvalidProblemError):
        p.check()


def test_uncovered_section_is_invalid():
    p = HighwayProblem.build({"t1": 6, "t2": 12, "t3": 3, "t4": 1}, fix_a().usage)
    assert any("uncovered section" in v for v in p.validate())


def test_negative_cost_and_unknown_section():
    p = HighwayProblem.build({"t1": -1}, {"1": ["t1", "zz"]})
    msgs = " ".join(p.validate())
    assert "negative cost" in msgs and "unknown section" in msgs


def test_float_costs_are_exact():
    assert to_money(1.9) == Fraction(19, 10)


@pytest.mark.parametrize(
    "coalition, cost",
    [([], 0), (["1"], 6), (["2"], 18), (["3"], 15), (["1", "2"], 18), (["1", "3"], 21), (["2", "3"], 21), (["1", "2", "3"], 21)],
)
def test_coalition_cost(FIX_A, coalition, cost):
    assert coalition_cost(FIX_A, coalition) == cost


def test_coalition_cost_unknown_agent(FIX_A):
    with pytest.raises(KeyError):
        coalition_cost(FIX_A, ["9"])


def test_classification(FIX_A, FIX_B):
    cls = classify_sections(FIX_A)
    assert cls.exclusive == {"t3"} and cls.shared == {"t1", "t2"}
    assert [cls.c_e[i] for i in "123"] == [0, 0, 3]
    assert [cls.c_s[i] for i in "123"] == [6, 18, 12]
    assert cls.shared_cost == 18
    cls_b = classify_sections(FIX_B)
    assert cls_b.exclusive == frozenset() and cls_b.shared == {"t1", "t2"}


def test_restrict(FIX_A):
    sub, _ = restrict(FIX_A, None, ["t1"])
    assert sub.agents == ("1", "2")
    assert sub.usage == {"1": {"t1"}, "2": {"t1"}}
    assert sub.total_cost == 6
    same, _ = restrict(FIX_A, None, FIX_A.sections)
    assert same == FIX_A


def test_restrict_drops_unions(FIX_A):
    P = CoalitionStructure.from_mapping({"a": ["1", "2"], "b": ["3"]})
    sub, sub_p = restrict(FIX_A, P, ["t3"])
    assert sub.agents == ("3",)
    assert sub_p.as_set() == {frozenset({"3"})}
    assert sub_p.labels == ("b",)


def test_restrict_rejects_empty(FIX_A):
    with pytest.raises(ValueError):
        restrict(FIX_A, None, [])


def test_quotient_counts(FIX_C, FIX_C_UNIONS):
    q = quotient(FIX_C, FIX_C_UNIONS)
    assert q.using_unions["t"] == {0, 1}
    assert len(q.members_using["t"][0]) == 2 and len(q.members_using["t"][1]) == 1
    assert q.shared == {"t"}


def test_quotient_of_singletons_matches_agents(FIX_A):
    q = quotient(FIX_A, CoalitionStructure.singletons(FIX_A))
    cls = classify_sections(FIX_A)
    assert q.exclusive == cls.exclusive
    assert list(q.c_s) == [cls.c_s[i] for i in FIX_A.agents]


def test_quotient_union_level(FIX_A):
    q = quotient(FIX_A, CoalitionStructure.from_mapping({"a": ["1", "2"], "b": ["3"]}))
    assert q.exclusive == {"t1", "t3"} and q.shared == {"t2"}
    assert q.cost([0]) == 18 and q.cost([0, 1]) == 21


def test_merge_unions():
    P = CoalitionStructure((frozenset("1"), frozenset("2"), frozenset("3")))
    merged = merge_unions(P, [0, 1])
    assert merged.as_set() == {frozenset({"1", "2"}), frozenset({"3"})}
    assert len(merge_unions(P, [0, 1, 2])) == 1
    with pytest.raises(ValueError):
        merge_unions(P, [0])
    with pytest.raises(IndexError):
        merge_unions(P, [0, 7])


def test_merge_fix_d(FIX_D):
    P = CoalitionStructure.singletons(FIX_D)
    merged = merge_unions(P, ["1", "2", "3", "4"])
    assert len(merged) == 101
    assert sorted(len(b) for b in merged.blocks)[-1] == 4


def test_classify_alliance_fix_d(FIX_D):
    P = CoalitionStructure.singletons(FIX_D)
    view = classify_alliance(FIX_D, P, merge_unions(P, ["1", "2", "3", "4"]))
    assert view.se == {"t1"} and view.ss == {"t2"} and view.ee == frozenset()
    assert view.alliance_count == {"t1": 2, "t2": 2}


def test_classify_alliance_shared_stays_shared(FIX_C):
    P = CoalitionStructure.singletons(FIX_C)
    view = classify_alliance(FIX_C, P, merge_unions(P, ["1", "2"]))
    assert view.ss == {"t"}
    assert len(view.after.using_unions["t"]) == 2


def test_classify_alliance_disjoint_exclusive():
    p = HighwayProblem.build({"x": 1, "y": 2, "z": 3}, {"1": ["x"], "2": ["y"], "3": ["z"]})
    P = CoalitionStructure.singletons(p)
    view = classify_alliance(p, P, merge_unions(P, ["1", "2"]))
    assert view.ee == {"x", "y", "z"} and not view.se and not view.ss


def test_classify_alliance_rejects_unrelated(FIX_C):
    P = CoalitionStructure.singletons(FIX_C)
    with pytest.raises(ValueError):
        classify_alliance(FIX_C, P, P)


def test_structure_validation():
    with pytest.raises(ValueError):
        CoalitionStructure((frozenset("1"), frozenset("1")))
    p = fix_a()
    with pytest.raises(InvalidProblemError):
        CoalitionStructure((frozenset("12"),)).check(p)
    assert fix_d().agents[:2] == ("1", "2")
