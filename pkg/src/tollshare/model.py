"""Generalized highway problems, coalition structures and their derived views.

Everything here is exact: costs are :class:`fractions.Fraction` and every
derived scalar is a plain sum of section costs.  Agents, sections and unions
are opaque string identifiers; their input order is kept for deterministic
output only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping


class InvalidProblemError(ValueError):
    """Raised when a problem or structure violates its invariants."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def to_money(value) -> Fraction:
    """Convert ``value`` to an exact rational.

    Floats go through their shortest repr so that ``1.9`` becomes ``19/10``
    rather than its binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def section_cost(cost: Mapping[str, Fraction], sections: Iterable[str]) -> Fraction:
    return sum((cost[t] for t in sections), Fraction(0))


@dataclass(frozen=True)
class HighwayProblem:
    """Agents, ordered costed sections and per-agent usage sets.

    Construction never raises on semantic problems; call :meth:`validate` for
    a report or :meth:`check` to raise.  Operations that need a valid problem
    call :meth:`check` themselves.
    """

    sections: tuple[str, ...]
    cost: dict[str, Fraction]
    usage: dict[str, frozenset[str]]

    def __post_init__(self):
        object.__setattr__(self, "sections", tuple(str(t) for t in self.sections))
        object.__setattr__(self, "cost", {str(t): to_money(c) for t, c in self.cost.items()})
        object.__setattr__(
            self, "usage", {str(i): frozenset(str(t) for t in ts) for i, ts in self.usage.items()}
        )

    @classmethod
    def build(cls, costs: Mapping, usage: Mapping[str, Iterable[str]]) -> "HighwayProblem":
        """Build from an ordered ``section -> cost`` mapping and ``agent -> sections``."""
        return cls(tuple(costs), dict(costs), {i: frozenset(ts) for i, ts in usage.items()})

    @property
    def agents(self) -> tuple[str, ...]:
        return tuple(self.usage)

    @property
    def total_cost(self) -> Fraction:
        return section_cost(self.cost, self.sections)

    def validate(self) -> list[str]:
        """Return the list of invariant violations (empty when valid)."""
        problems = []
        known = set(self.sections)
        if not self.sections:
            problems.append("no sections")
        if len(known) != len(self.sections):
            problems.append("duplicate section ids")
        for t in self.sections:
            if t not in self.cost:
                problems.append(f"section {t!r} has no cost")
            elif self.cost[t] < 0:
                problems.append(f"negative cost on section {t!r}")
        for t in self.cost:
            if t not in known:
                problems.append(f"cost given for unknown section {t!r}")
        covered = set()
        for i, ts in self.usage.items():
            if not ts:
                problems.append(f"empty usage set for agent {i!r}")
            for t in sorted(ts - known):
                problems.append(f"agent {i!r} uses unknown section {t!r}")
            covered |= ts
        for t in self.sections:
            if t not in covered:
                problems.append(f"uncovered section {t!r}")
        return problems

    def check(self) -> "HighwayProblem":
        problems = self.validate()
        if problems:
            raise InvalidProblemError(problems)
        return self

    def users(self, section: str) -> frozenset[str]:
        return frozenset(i for i, ts in self.usage.items() if section in ts)

    def sections_of(self, coalition: Iterable[str]) -> frozenset[str]:
        out: set[str] = set()
        for i in coalition:
            out |= self.usage[i]
        return frozenset(out)


def validate(problem: HighwayProblem) -> list[str]:
    return problem.validate()


def coalition_cost(problem: HighwayProblem, coalition: Iterable[str]) -> Fraction:
    """Cost of the sections used by at least one member of ``coalition``."""
    coalition = list(coalition)
    unknown = [i for i in coalition if i not in problem.usage]
    if unknown:
        raise KeyError(f"unknown agent(s): {unknown}")
    return section_cost(problem.cost, problem.sections_of(coalition))


@dataclass(frozen=True)
class CoalitionStructure:
    """An ordered partition of the agents into labelled a priori unions."""

    blocks: tuple[frozenset[str], ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        blocks = tuple(frozenset(str(i) for i in b) for b in self.blocks)
        labels = tuple(str(x) for x in self.labels) or tuple(f"P{k + 1}" for k in range(len(blocks)))
        if len(labels) != len(blocks):
            raise ValueError("one label per block is required")
        if len(set(labels)) != len(labels):
            raise ValueError("union labels must be distinct")
        if any(not b for b in blocks):
            raise ValueError("empty block in coalition structure")
        seen: set[str] = set()
        for b in blocks:
            if seen & b:
                raise ValueError("blocks of a coalition structure must be disjoint")
            seen |= b
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def singletons(cls, problem: HighwayProblem) -> "CoalitionStructure":
        return cls(tuple(frozenset([i]) for i in problem.agents), problem.agents)

    @classmethod
    def grand(cls, problem: HighwayProblem, label: str = "N") -> "CoalitionStructure":
        return cls((frozenset(problem.agents),), (label,))

    @classmethod
    def from_mapping(cls, unions: Mapping[str, Iterable[str]]) -> "CoalitionStructure":
        return cls(tuple(frozenset(b) for b in unions.values()), tuple(unions))

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def agents(self) -> frozenset[str]:
        return frozenset().union(*self.blocks)

    def union_of(self, agent: str) -> int:
        for a, b in enumerate(self.blocks):
            if agent in b:
                return a
        raise KeyError(agent)

    def index(self, key) -> int:
        """Resolve a union given by label or by 0-based index."""
        if isinstance(key, int):
            if not 0 <= key < len(self.blocks):
                raise IndexError(f"union index {key} out of range")
            return key
        try:
            return self.labels.index(str(key))
        except ValueError:
            raise KeyError(f"unknown union {key!r}") from None

    def check(self, problem: HighwayProblem) -> "CoalitionStructure":
        if self.agents != frozenset(problem.agents):
            missing = sorted(frozenset(problem.agents) - self.agents)
            extra = sorted(self.agents - frozenset(problem.agents))
            raise InvalidProblemError(
                [f"structure does not partition the agents (missing={missing}, extra={extra})"]
            )
        return self

    def as_set(self) -> frozenset[frozenset[str]]:
        return frozenset(self.blocks)


@dataclass(frozen=True)
class SectionClassification:
    exclusive: frozenset[str]
    shared: frozenset[str]
    users: dict[str, frozenset[str]]
    exclusive_usage: dict[str, frozenset[str]]
    shared_usage: dict[str, frozenset[str]]
    c_e: dict[str, Fraction]
    c_s: dict[str, Fraction]
    shared_cost: Fraction  # C(K^s), the cost of the shared sections taken once


def classify_sections(problem: HighwayProblem) -> SectionClassification:
    problem.check()
    users = {t: problem.users(t) for t in problem.sections}
    exclusive = frozenset(t for t in problem.sections if len(users[t]) == 1)
    shared = frozenset(problem.sections) - exclusive
    t_e = {i: ts & exclusive for i, ts in problem.usage.items()}
    t_s = {i: ts - exclusive for i, ts in problem.usage.items()}
    return SectionClassification(
        exclusive=exclusive,
        shared=shared,
        users=users,
        exclusive_usage=t_e,
        shared_usage=t_s,
        c_e={i: section_cost(problem.cost, ts) for i, ts in t_e.items()},
        c_s={i: section_cost(problem.cost, ts) for i, ts in t_s.items()},
        shared_cost=section_cost(problem.cost, shared),
    )


def restrict(
    problem: HighwayProblem, structure: CoalitionStructure | None, keep: Iterable[str]
) -> tuple[HighwayProblem, CoalitionStructure | None]:
    """Restrict a problem (and optionally its unions) to the sections ``keep``.

    Agents that use nothing in ``keep`` disappear, as do unions none of whose
    members survive.  Surviving unions keep their labels.
    """
    keep = frozenset(str(t) for t in keep)
    if not keep:
        raise ValueError("cannot restrict to an empty set of sections")
    unknown = keep - set(problem.sections)
    if unknown:
        raise ValueError(f"unknown sections in restriction: {sorted(unknown)}")
    usage = {i: ts & keep for i, ts in problem.usage.items() if ts & keep}
    sections = tuple(t for t in problem.sections if t in keep)
    restricted = HighwayProblem(sections, {t: problem.cost[t] for t in sections}, usage)
    if structure is None:
        return restricted, None
    blocks, labels = [], []
    for label, block in zip(structure.labels, structure.blocks):
        alive = frozenset(i for i in block if i in usage)
        if alive:
            blocks.append(alive)
            labels.append(label)
    return restricted, CoalitionStructure(tuple(blocks), tuple(labels))


@dataclass(frozen=True)
class QuotientView:
    """Union-level view of a problem under a coalition structure."""

    problem: HighwayProblem
    structure: CoalitionStructure
    union_usage: tuple[frozenset[str], ...]
    using_unions: dict[str, frozenset[int]]
    members_using: dict[str, dict[int, frozenset[str]]]
    exclusive: frozenset[str]
    shared: frozenset[str]
    exclusive_usage: tuple[frozenset[str], ...]
    shared_usage: tuple[frozenset[str], ...]
    c_e: tuple[Fraction, ...]
    c_s: tuple[Fraction, ...]
    shared_cost: Fraction

    def cost(self, unions: Iterable[int]) -> Fraction:
        """The quotient characteristic function on a set of union indices."""
        used: set[str] = set()
        for a in unions:
            used |= self.union_usage[a]
        return section_cost(self.problem.cost, used)


def quotient(problem: HighwayProblem, structure: CoalitionStructure) -> QuotientView:
    problem.check()
    structure.check(problem)
    union_usage = tuple(problem.sections_of(b) for b in structure.blocks)
    using = {
        t: frozenset(a for a, ts in enumerate(union_usage) if t in ts) for t in problem.sections
    }
    members = {
        t: {a: frozenset(i for i in structure.blocks[a] if t in problem.usage[i]) for a in using[t]}
        for t in problem.sections
    }
    exclusive = frozenset(t for t in problem.sections if len(using[t]) == 1)
    shared = frozenset(problem.sections) - exclusive
    t_e = tuple(ts & exclusive for ts in union_usage)
    t_s = tuple(ts - exclusive for ts in union_usage)
    return QuotientView(
        problem=problem,
        structure=structure,
        union_usage=union_usage,
        using_unions=using,
        members_using=members,
        exclusive=exclusive,
        shared=shared,
        exclusive_usage=t_e,
        shared_usage=t_s,
        c_e=tuple(section_cost(problem.cost, ts) for ts in t_e),
        c_s=tuple(section_cost(problem.cost, ts) for ts in t_s),
        shared_cost=section_cost(problem.cost, shared),
    )


def merge_unions(structure: CoalitionStructure, merge: Iterable, label: str | None = None) -> CoalitionStructure:
    """Merge the selected unions (labels or 0-based indices) into one block.

    The merged block takes the position of the first selected union; all
    other blocks keep their order and labels.
    """
    idx = sorted({structure.index(k) for k in merge})
    if len(idx) < 2:
        raise ValueError("an alliance needs at least two distinct unions")
    merged = frozenset().union(*(structure.blocks[a] for a in idx))
    merged_label = label if label is not None else "+".join(structure.labels[a] for a in idx)
    blocks, labels = [], []
    for a, (b, lab) in enumerate(zip(structure.blocks, structure.labels)):
        if a == idx[0]:
            blocks.append(merged)
            labels.append(merged_label)
        elif a not in idx:
            blocks.append(b)
            labels.append(lab)
    return CoalitionStructure(tuple(blocks), tuple(labels))


@dataclass(frozen=True)
class AllianceView:
    before: QuotientView
    after: QuotientView
    merged: tuple[int, ...]  # indices in the original structure
    merged_index: int  # index of the alliance in the merged structure
    alliance_count: dict[str, int]  # sections used by the alliance -> number of allied unions using them
    ee: frozenset[str]
    se: frozenset[str]
    ss: frozenset[str]
    union_ee: tuple[frozenset[str], ...] = field(default=())
    union_se: tuple[frozenset[str], ...] = field(default=())
    union_ss: tuple[frozenset[str], ...] = field(default=())

    @property
    def alliance_sections(self) -> frozenset[str]:
        return self.after.union_usage[self.merged_index]


def _find_merge(structure: CoalitionStructure, merged: CoalitionStructure) -> tuple[tuple[int, ...], int]:
    old = {b: a for a, b in enumerate(structure.blocks)}
    new_blocks = [k for k, b in enumerate(merged.blocks) if b not in old]
    if len(new_blocks) != 1:
        raise ValueError("structures are not related by a single merge")
    k = new_blocks[0]
    parts = tuple(a for a, b in enumerate(structure.blocks) if b <= merged.blocks[k])
    if len(parts) < 2 or frozenset().union(*(structure.blocks[a] for a in parts)) != merged.blocks[k]:
        raise ValueError("structures are not related by a single merge")
    if len(merged.blocks) != len(structure.blocks) - len(parts) + 1:
        raise ValueError("structures are not related by a single merge")
    return parts, k


def classify_alliance(
    problem: HighwayProblem, structure: CoalitionStructure, merged_structure: CoalitionStructure
) -> AllianceView:
    parts, k = _find_merge(structure, merged_structure)
    before = quotient(problem, structure)
    after = quotient(problem, merged_structure)
    count = {
        t: sum(1 for a in parts if t in before.union_usage[a]) for t in after.union_usage[k]
    }
    ee = before.exclusive & after.exclusive
    se = before.shared & after.exclusive
    ss = before.shared & after.shared
    if before.exclusive & after.shared:
        raise AssertionError("merging cannot turn an exclusive section into a shared one")
    return AllianceView(
        before=before,
        after=after,
        merged=parts,
        merged_index=k,
        alliance_count=count,
        ee=ee,
        se=se,
        ss=ss,
        union_ee=tuple(ts & ee for ts in before.union_usage),
        union_se=tuple(ts & se for ts in before.union_usage),
        union_ss=tuple(ts & ss for ts in before.union_usage),
    )
