"""Closed-form allocation rules on generalized highway problems.

All five rules run on an :class:`AggregatedProblem`, where a *profile* stands
for ``multiplicity`` identical vehicles.  An explicit :class:`HighwayProblem`
(with an optional coalition structure) is lifted to profiles of multiplicity
one, so both inputs share a single code path.

Union semantics of a profile:

* ``union="<label>"`` puts every vehicle of the profile in the named union;
  several profiles may share a label.
* ``union=None`` makes each vehicle of the profile its own union.  Such
  vehicles are symmetric, so one group key (the profile label) describes all
  of them.

Every rule returns an :class:`~tollshare.oracle.Allocation` keyed by profile
label (per-vehicle amounts, weighted by multiplicity) together with a
:class:`TollDecomposition`: the per-section charges that add up to each
vehicle's payment.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .model import CoalitionStructure, HighwayProblem, InvalidProblemError, to_money
from .oracle import Allocation

ZERO = Fraction(0)


@dataclass(frozen=True)
class Profile:
    label: str
    usage: frozenset[str]
    multiplicity: int = 1
    union: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "usage", frozenset(self.usage))

    @property
    def group(self) -> str:
        """Key of the union this profile's vehicles belong to."""
        return self.label if self.union is None else self.union


@dataclass(frozen=True)
class AggregatedProblem:
    sections: tuple[str, ...]
    cost: dict[str, Fraction]
    profiles: tuple[Profile, ...]

    def __post_init__(self):
        object.__setattr__(self, "sections", tuple(self.sections))
        object.__setattr__(self, "cost", {t: to_money(c) for t, c in self.cost.items()})
        object.__setattr__(self, "profiles", tuple(self.profiles))

    @classmethod
    def from_problem(
        cls, problem: HighwayProblem, structure: CoalitionStructure | None = None
    ) -> "AggregatedProblem":
        problem.check()
        if structure is None:
            structure = CoalitionStructure.singletons(problem)
        structure.check(problem)
        union = {i: lab for lab, blk in zip(structure.labels, structure.blocks) for i in blk}
        return cls(
            problem.sections,
            dict(problem.cost),
            tuple(Profile(i, problem.usage[i], 1, union[i]) for i in problem.agents),
        )

    @property
    def total_cost(self) -> Fraction:
        return sum((self.cost[t] for t in self.sections), ZERO)

    @property
    def weights(self) -> dict[str, int]:
        return {p.label: p.multiplicity for p in self.profiles}

    def validate(self) -> list[str]:
        problems = []
        known = set(self.sections)
        labels = [p.label for p in self.profiles]
        if len(set(labels)) != len(labels):
            problems.append("duplicate profile labels")
        named = {p.union for p in self.profiles if p.union is not None}
        clash = named & {p.label for p in self.profiles if p.union is None}
        if clash:
            problems.append(f"union labels collide with singleton profile labels: {sorted(clash)}")
        for t in self.sections:
            if self.cost.get(t, ZERO) < 0:
                problems.append(f"negative cost on section {t!r}")
            if t not in self.cost:
                problems.append(f"section {t!r} has no cost")
        covered = set()
        for p in self.profiles:
            if p.multiplicity < 1 or int(p.multiplicity) != p.multiplicity:
                problems.append(f"profile {p.label!r} needs a positive integer multiplicity")
            if not p.usage:
                problems.append(f"empty usage set for profile {p.label!r}")
            for t in sorted(p.usage - known):
                problems.append(f"profile {p.label!r} uses unknown section {t!r}")
            covered |= p.usage
        for t in self.sections:
            if t not in covered:
                problems.append(f"uncovered section {t!r}")
        return problems

    def check(self) -> "AggregatedProblem":
        problems = self.validate()
        if problems:
            raise InvalidProblemError(problems)
        return self

    def expand(self) -> tuple[HighwayProblem, CoalitionStructure]:
        """Explicit problem with one agent per vehicle (``label#k``)."""
        usage, blocks = {}, defaultdict(set)
        for p in self.profiles:
            for k in range(p.multiplicity):
                agent = f"{p.label}#{k}"
                usage[agent] = p.usage
                blocks[p.union if p.union is not None else agent].add(agent)
        structure = CoalitionStructure(tuple(frozenset(b) for b in blocks.values()), tuple(blocks))
        return HighwayProblem(self.sections, dict(self.cost), usage), structure


@dataclass(frozen=True)
class TollDecomposition:
    """Per-section charges.

    Keys are section ids when ``by_union`` is false, otherwise
    ``(section, group)`` pairs where ``group`` is a union label (or the
    profile label for each-vehicle-its-own-union profiles).
    """

    entries: dict
    by_union: bool = False

    def charge(self, profile: Profile) -> Fraction:
        if self.by_union:
            return sum((self.entries[(t, profile.group)] for t in profile.usage), ZERO)
        return sum((self.entries[t] for t in profile.usage), ZERO)


class _Counts:
    """Multiplicity-weighted user and union counts for an aggregated problem."""

    def __init__(self, problem: AggregatedProblem):
        problem.check()
        self.problem = problem
        cost = problem.cost
        self.users = {t: 0 for t in problem.sections}
        for p in problem.profiles:
            for t in p.usage:
                self.users[t] += p.multiplicity

        self.groups: dict[str, list[Profile]] = defaultdict(list)
        for p in problem.profiles:
            self.groups[p.group].append(p)
        # a group key for each-vehicle-its-own-union profiles stands for
        # ``multiplicity`` unions of one vehicle each
        self.group_copies = {
            g: (ps[0].multiplicity if ps[0].union is None else 1) for g, ps in self.groups.items()
        }
        self.group_usage = {g: frozenset().union(*(p.usage for p in ps)) for g, ps in self.groups.items()}
        self.unions_using = {t: 0 for t in problem.sections}
        for g, ts in self.group_usage.items():
            for t in ts:
                self.unions_using[t] += self.group_copies[g]

        self.exclusive = frozenset(t for t in problem.sections if self.users[t] == 1)
        self.c_e = {p.label: sum((cost[t] for t in p.usage & self.exclusive), ZERO) for p in problem.profiles}
        self.c_s = {p.label: sum((cost[t] for t in p.usage - self.exclusive), ZERO) for p in problem.profiles}
        self.shared_cost = sum((cost[t] for t in problem.sections if t not in self.exclusive), ZERO)
        self.shared_claims = sum((p.multiplicity * self.c_s[p.label] for p in problem.profiles), ZERO)

        self.q_exclusive = frozenset(t for t in problem.sections if self.unions_using[t] == 1)
        self.q_c_e = {g: sum((cost[t] for t in ts & self.q_exclusive), ZERO) for g, ts in self.group_usage.items()}
        self.q_c_s = {g: sum((cost[t] for t in ts - self.q_exclusive), ZERO) for g, ts in self.group_usage.items()}
        self.q_shared_cost = sum((cost[t] for t in problem.sections if t not in self.q_exclusive), ZERO)
        self.q_shared_claims = sum((self.group_copies[g] * v for g, v in self.q_c_s.items()), ZERO)

    def members_using(self, t: str, group: str) -> int:
        """Vehicles of one union of ``group`` that use section ``t``."""
        ps = self.groups[group]
        if ps[0].union is None:
            return 1 if t in ps[0].usage else 0
        return sum(p.multiplicity for p in ps if t in p.usage)

    def group_exclusive_cost(self, group: str) -> Fraction:
        """Agent-exclusive cost summed over one union of ``group``."""
        ps = self.groups[group]
        if ps[0].union is None:
            return self.c_e[ps[0].label]
        return sum((p.multiplicity * self.c_e[p.label] for p in ps), ZERO)

    def group_shared_claims(self, group: str) -> Fraction:
        ps = self.groups[group]
        if ps[0].union is None:
            return self.c_s[ps[0].label]
        return sum((p.multiplicity * self.c_s[p.label] for p in ps), ZERO)


def _ratio(num: Fraction, den: Fraction) -> Fraction:
    # 0/0 happens only when every shared section in play costs nothing
    return num / den if den else ZERO


def _as_aggregated(problem, structure=None) -> AggregatedProblem:
    if isinstance(problem, AggregatedProblem):
        if structure is not None:
            raise TypeError("aggregated problems carry their unions on the profiles")
        return problem
    return AggregatedProblem.from_problem(problem, structure)


def _allocation(agg: AggregatedProblem, values: dict[str, Fraction], totals=None) -> Allocation:
    return Allocation(values, union_totals=totals, weights=agg.weights)


def shapley_closed(problem) -> tuple[Allocation, TollDecomposition]:
    """Each section's cost split equally among its users."""
    agg = _as_aggregated(problem)
    counts = _Counts(agg)
    tolls = TollDecomposition({t: agg.cost[t] / counts.users[t] for t in agg.sections})
    return _allocation(agg, {p.label: tolls.charge(p) for p in agg.profiles}), tolls


def tijs_ratio(problem) -> Fraction:
    """The uniform multiplier applied to every shared section's cost."""
    counts = _Counts(_as_aggregated(problem))
    return _ratio(counts.shared_cost, counts.shared_claims)


def tijs_closed(problem) -> tuple[Allocation, TollDecomposition]:
    agg = _as_aggregated(problem)
    counts = _Counts(agg)
    k = _ratio(counts.shared_cost, counts.shared_claims)
    tolls = TollDecomposition(
        {t: agg.cost[t] if t in counts.exclusive else k * agg.cost[t] for t in agg.sections}
    )
    return _allocation(agg, {p.label: tolls.charge(p) for p in agg.profiles}), tolls


def _group_totals(agg: AggregatedProblem, values: dict[str, Fraction], counts: _Counts) -> dict[str, Fraction]:
    totals = {}
    for g, ps in counts.groups.items():
        if ps[0].union is None:
            totals[g] = values[ps[0].label]
        else:
            totals[g] = sum((p.multiplicity * values[p.label] for p in ps), ZERO)
    return totals


def owen_closed(problem, structure: CoalitionStructure | None = None) -> tuple[Allocation, TollDecomposition]:
    """Section cost split equally among using unions, then among the union's users."""
    agg = _as_aggregated(problem, structure)
    counts = _Counts(agg)
    entries = {}
    for g, ts in counts.group_usage.items():
        for t in ts:
            entries[(t, g)] = agg.cost[t] / (counts.unions_using[t] * counts.members_using(t, g))
    tolls = TollDecomposition(entries, by_union=True)
    values = {p.label: tolls.charge(p) for p in agg.profiles}
    return _allocation(agg, values, _group_totals(agg, values, counts)), tolls


def _split_within_unions(
    agg: AggregatedProblem, counts: _Counts, union_totals: dict[str, Fraction]
) -> tuple[Allocation, TollDecomposition]:
    """Exclusive sections at face value, the rest of each union's total in
    proportion to members' shared-section costs."""
    entries = {}
    for g, ts in counts.group_usage.items():
        rate = _ratio(union_totals[g] - counts.group_exclusive_cost(g), counts.group_shared_claims(g))
        for t in ts:
            entries[(t, g)] = agg.cost[t] if t in counts.exclusive else rate * agg.cost[t]
    tolls = TollDecomposition(entries, by_union=True)
    values = {p.label: tolls.charge(p) for p in agg.profiles}
    return _allocation(agg, values, dict(union_totals)), tolls


def quotient_tijs_totals(problem, structure: CoalitionStructure | None = None) -> dict[str, Fraction]:
    """Tijs value of the game played by the unions (one union per group copy)."""
    counts = _Counts(_as_aggregated(problem, structure))
    r = _ratio(counts.q_shared_cost, counts.q_shared_claims)
    return {g: counts.q_c_e[g] + r * counts.q_c_s[g] for g in counts.groups}


def owen_union_totals(problem, structure: CoalitionStructure | None = None) -> dict[str, Fraction]:
    counts = _Counts(_as_aggregated(problem, structure))
    return {
        g: sum((counts.problem.cost[t] / counts.unions_using[t] for t in ts), ZERO)
        for g, ts in counts.group_usage.items()
    }


def coalitional_tijs_closed(
    problem, structure: CoalitionStructure | None = None
) -> tuple[Allocation, TollDecomposition]:
    agg = _as_aggregated(problem, structure)
    return _split_within_unions(agg, _Counts(agg), quotient_tijs_totals(agg))


def shapley_tijs_closed(
    problem, structure: CoalitionStructure | None = None
) -> tuple[Allocation, TollDecomposition]:
    agg = _as_aggregated(problem, structure)
    return _split_within_unions(agg, _Counts(agg), owen_union_totals(agg))


VALUE_NAMES = ("shapley", "tijs", "owen", "coalitional-tijs", "shapley-tijs")

_RULES = {
    "shapley": lambda p, s: shapley_closed(_as_aggregated(p, s)),
    "tijs": lambda p, s: tijs_closed(_as_aggregated(p, s)),
    "owen": owen_closed,
    "coalitional-tijs": coalitional_tijs_closed,
    "shapley-tijs": shapley_tijs_closed,
}


def compute(name: str, problem, structure: CoalitionStructure | None = None) -> tuple[Allocation, TollDecomposition]:
    """Dispatch by value name; see :data:`VALUE_NAMES`."""
    try:
        rule = _RULES[name]
    except KeyError:
        raise ValueError(f"unknown value {name!r}; choose from {', '.join(VALUE_NAMES)}") from None
    return rule(problem, structure)


def allocate(name: str, problem: HighwayProblem, structure: CoalitionStructure | None = None) -> dict[str, Fraction]:
    """Per-agent payments of an explicit problem as a plain dict."""
    return dict(compute(name, problem, structure)[0].values)


def union_totals(values: dict[str, Fraction], structure: CoalitionStructure) -> dict[str, Fraction]:
    return {lab: sum((values[i] for i in blk), ZERO) for lab, blk in zip(structure.labels, structure.blocks)}
