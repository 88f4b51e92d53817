import sys
from fractions import Fraction
from pathlib import Path

import pytest

from tollshare.model import CoalitionStructure, HighwayProblem

sys.path.insert(0, str(Path(__file__).parent))


def fix_a() -> HighwayProblem:
    return HighwayProblem.build({"t1": 6, "t2": 12, "t3": 3}, {"1": ["t1"], "2": ["t1", "t2"], "3": ["t2", "t3"]})


def fix_b() -> HighwayProblem:
    return HighwayProblem.build({"t1": 6, "t2": 6}, {"1": ["t1"], "2": ["t1", "t2"], "3": ["t1", "t2"]})


def fix_c() -> HighwayProblem:
    return HighwayProblem.build({"t": 6}, {"1": ["t"], "2": ["t"], "3": ["t"]})


def fix_d() -> HighwayProblem:
    usage = {str(a): ["t1"] if a <= 2 else ["t2"] for a in range(1, 105)}
    return HighwayProblem.build({"t1": 1, "t2": 1}, usage)


@pytest.fixture
def FIX_A():
    return fix_a()


@pytest.fixture
def FIX_B():
    return fix_b()


@pytest.fixture
def FIX_C():
    return fix_c()


@pytest.fixture
def FIX_C_UNIONS():
    return CoalitionStructure.from_mapping({"a": ["1", "2"], "b": ["3"]})


@pytest.fixture
def FIX_D():
    return fix_d()


def F(x) -> Fraction:
    return Fraction(x)
