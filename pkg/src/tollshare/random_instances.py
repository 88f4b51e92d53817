"""Seeded generators of small problems and coalition structures.

Used by the verification suites and the axiom harness.  All randomness flows
through an explicit :class:`random.Random`, so a seed pins every instance.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .model import CoalitionStructure, HighwayProblem

COST_DENOMINATORS = (1, 2, 3, 4, 5, 7)


def random_cost(rng: random.Random, high: int = 20, zero_rate: float = 0.1) -> Fraction:
    """A rational in [0, high]; exact zeros show up with probability ``zero_rate``."""
    if rng.random() < zero_rate:
        return Fraction(0)
    d = rng.choice(COST_DENOMINATORS)
    return Fraction(rng.randint(1, high * d), d)


def random_problem(
    rng: random.Random,
    max_agents: int = 6,
    max_sections: int = 6,
    min_agents: int = 1,
    high: int = 20,
    zero_rate: float = 0.1,
) -> HighwayProblem:
    n = rng.randint(min_agents, max_agents)
    k = rng.randint(1, max_sections)
    sections = [f"t{j + 1}" for j in range(k)]
    agents = [str(i + 1) for i in range(n)]
    usage = {i: {t for t in sections if rng.random() < 0.4} for i in agents}
    for i in agents:
        if not usage[i]:
            usage[i].add(rng.choice(sections))
    for t in sections:
        if not any(t in ts for ts in usage.values()):
            usage[rng.choice(agents)].add(t)
    costs = {t: random_cost(rng, high, zero_rate) for t in sections}
    return HighwayProblem.build(costs, usage)


def random_partition(rng: random.Random, agents) -> CoalitionStructure:
    agents = list(agents)
    rng.shuffle(agents)
    blocks: list[list[str]] = []
    for i in agents:
        k = rng.randint(0, len(blocks))
        if k == len(blocks):
            blocks.append([i])
        else:
            blocks[k].append(i)
    blocks.sort(key=lambda b: min(b))
    return CoalitionStructure(tuple(frozenset(b) for b in blocks), tuple(f"U{a + 1}" for a in range(len(blocks))))


def random_instance(
    rng: random.Random, max_agents: int = 6, max_sections: int = 6, **kwargs
) -> tuple[HighwayProblem, CoalitionStructure]:
    problem = random_problem(rng, max_agents, max_sections, **kwargs)
    return problem, random_partition(rng, problem.agents)


def random_merge(rng: random.Random, structure: CoalitionStructure) -> list[str] | None:
    """Labels of two or more unions to ally, or None if there is only one."""
    if len(structure) < 2:
        return None
    size = rng.randint(2, len(structure))
    return sorted(rng.sample(list(structure.labels), size))
