from fractions import Fraction

import pytest

from tollshare import oracle as O
from tollshare.model import CoalitionStructure, HighwayProblem


def vals(alloc, keys="123"):
    return tuple(alloc[k] for k in keys)


def test_game_table(FIX_A, FIX_B):
    g = O.to_tu_game(FIX_A)
    assert [g(s) for s in (["1"], ["2"], ["3"], ["1", "2"], ["1", "3"], ["2", "3"], ["1", "2", "3"])] == [6, 18, 15, 18, 21, 21, 21]
    h = O.to_tu_game(FIX_B)
    assert (h(["1"]), h(["2"]), h(["3"]), h(["1", "2", "3"])) == (6, 12, 12, 12)


def test_highway_games_are_concave_and_monotone(FIX_A):
    g = O.to_tu_game(FIX_A)
    assert O.is_concave(g) and O.is_monotone(g)


def test_non_concave_game_detected():
    g = O.TUGame.from_function("12", lambda s: {1: 1, 2: 3}[len(s)])
    assert not O.is_concave(g)
    with pytest.raises(O.NotConcaveError):
        O.tijs(g)


def test_shapley(FIX_A, FIX_B):
    assert vals(O.shapley(O.to_tu_game(FIX_A))) == (3, 9, 9)
    assert vals(O.shapley(O.to_tu_game(FIX_B))) == (2, 5, 5)


def test_tijs(FIX_A, FIX_B):
    assert vals(O.tijs(O.to_tu_game(FIX_B))) == (Fraction(12, 5), Fraction(24, 5), Fraction(24, 5))
    assert vals(O.tijs(O.to_tu_game(FIX_A))) == (3, 9, 9)


def test_owen(FIX_C, FIX_C_UNIONS, FIX_A):
    assert vals(O.owen(O.to_tu_game(FIX_C), FIX_C_UNIONS)) == (Fraction(3, 2), Fraction(3, 2), 3)
    grand = CoalitionStructure.grand(FIX_A)
    assert vals(O.owen(O.to_tu_game(FIX_A), grand)) == (3, 9, 9)


def test_coalitional_tijs_small_all_shared():
    usage = {"1": ["t1"], "2": ["t1"], "3": ["t2"], "4": ["t2"], "5": ["t2"], "6": ["t2"]}
    p = HighwayProblem.build({"t1": 1, "t2": 1}, usage)
    alloc = O.coalitional_tijs(O.to_tu_game(p), CoalitionStructure.singletons(p))
    assert set(alloc.union_totals.values()) == {Fraction(1, 3)}


def test_coalitional_tijs_grand_union(FIX_B):
    alloc = O.coalitional_tijs(O.to_tu_game(FIX_B), CoalitionStructure.grand(FIX_B))
    assert vals(alloc) == (Fraction(12, 5), Fraction(24, 5), Fraction(24, 5))


def test_shapley_tijs_reference(FIX_C, FIX_C_UNIONS):
    assert vals(O.shapley_tijs_ref(FIX_C, FIX_C_UNIONS)) == (Fraction(3, 2), Fraction(3, 2), 3)


def test_null_and_symmetric_players(FIX_B):
    p = HighwayProblem.build({"t1": 6, "t2": 12, "t3": 3, "t4": 0}, {"1": ["t1"], "2": ["t1", "t2"], "3": ["t2", "t3"], "4": ["t4"]})
    assert O.null_players(O.to_tu_game(p)) == {"4"}
    assert ("2", "3") in O.symmetric_pairs(O.to_tu_game(FIX_B))


def test_cap(FIX_A):
    with pytest.raises(ValueError):
        O.to_tu_game(FIX_A, cap=2)


def test_game_requires_zero_empty_coalition():
    with pytest.raises(ValueError):
        O.TUGame(("1",), (Fraction(1), Fraction(2)))
