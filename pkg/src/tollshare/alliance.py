"""What happens to a group of unions when they merge into one.

A report compares the merged union's payment with what its parts paid
before, and evaluates the sufficient conditions under which merging is known
to help.  Everything is exact.

Both explicit problems (agents plus a coalition structure) and aggregated
problems (profiles with multiplicities) are supported; the latter is how the
tariff pipeline asks, e.g., what the heavy-2 fleet gains by negotiating as a
block.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import CoalitionStructure, HighwayProblem, merge_unions
from .values import AggregatedProblem, _Counts, compute

ZERO = Fraction(0)

COALITIONAL_VALUES = ("owen", "coalitional-tijs", "shapley-tijs")


@dataclass(frozen=True)
class AllianceReport:
    value: str
    merged: tuple[str, ...]  # labels of the unions that ally
    label: str  # label of the resulting union
    pre_totals: dict[str, Fraction]
    post_total: Fraction
    alliance_count: dict[str, int]  # section -> allied unions using it
    unions_using: dict[str, int]  # section -> unions using it before the merge
    se_sections: frozenset[str]
    witnesses: tuple[str, ...]

    @property
    def pre_sum(self) -> Fraction:
        return sum(self.pre_totals.values(), ZERO)

    @property
    def delta(self) -> Fraction:
        return self.post_total - self.pre_sum

    @property
    def applicable(self) -> bool:
        """Whether the benefit guarantee covers this merge.

        The guarantee is unconditional for Owen and Shapley-Tijs union totals.
        For coalitional Tijs it needs every section the allies shared only
        among themselves to stay out of the picture.
        """
        if self.value == "coalitional-tijs":
            return not self.se_sections
        return True

    @property
    def strict_condition(self) -> bool:
        return bool(self.witnesses)

    @property
    def beneficial(self) -> bool:
        return self.delta < 0

    @property
    def theorem_holds(self) -> bool | None:
        """None when not applicable; otherwise whether post <= pre and the
        strictness condition matches the sign of delta exactly."""
        if not self.applicable:
            return None
        return self.delta <= 0 and (self.delta < 0) == self.strict_condition

    def to_dict(self) -> dict:
        def frac(x: Fraction) -> list[int]:
            return [x.numerator, x.denominator]

        return {
            "value": self.value,
            "merged": list(self.merged),
            "label": self.label,
            "pre_totals": {k: frac(v) for k, v in self.pre_totals.items()},
            "pre_sum": frac(self.pre_sum),
            "post_total": frac(self.post_total),
            "delta": frac(self.delta),
            "beneficial": self.beneficial,
            "applicable": self.applicable,
            "strict_condition": self.strict_condition,
            "witnesses": list(self.witnesses),
            "se_sections": sorted(self.se_sections),
            "theorem_holds": self.theorem_holds,
        }

    def summary(self) -> str:
        lines = [
            f"value: {self.value}",
            f"alliance: {' + '.join(self.merged)} -> {self.label}",
            f"before: {self.pre_sum} ({float(self.pre_sum):.6f})",
            f"after:  {self.post_total} ({float(self.post_total):.6f})",
            f"delta:  {self.delta} ({float(self.delta):+.6f}, {'beneficial' if self.beneficial else 'not beneficial'})",
            f"guarantee applies: {'yes' if self.applicable else 'no (sections ' + ', '.join(sorted(self.se_sections)) + ' become exclusive)'}",
            f"strictness condition: {'yes' if self.strict_condition else 'no'}"
            + (f" (witnesses: {', '.join(self.witnesses)})" if self.witnesses else ""),
        ]
        return "\n".join(lines)


def _union_totals(value: str, agg: AggregatedProblem) -> dict[str, Fraction]:
    allocation, _ = compute(value, agg)
    return allocation.union_totals


def aggregated_alliance(
    value: str, before: AggregatedProblem, after: AggregatedProblem, label: str
) -> AllianceReport:
    """Compare ``before`` with ``after``, where union ``label`` of ``after``
    is the merge of several unions of ``before`` and nothing else changed."""
    if value not in COALITIONAL_VALUES:
        raise ValueError(f"alliances are measured under {', '.join(COALITIONAL_VALUES)}, not {value!r}")
    if before.sections != after.sections or before.cost != after.cost:
        raise ValueError("both scenarios must share sections and costs")
    cb, ca = _Counts(before), _Counts(after)
    if label not in ca.groups or ca.groups[label][0].union is None:
        raise ValueError(f"{label!r} is not a union of the merged scenario")

    allied = {p.label for p in ca.groups[label]}
    parts = [g for g, ps in cb.groups.items() if {p.label for p in ps} <= allied]
    covered = {p.label for g in parts for p in cb.groups[g]}
    n_parts = sum(cb.group_copies[g] for g in parts)
    if covered != allied or n_parts < 2:
        raise ValueError("the merged union is not a union of at least two former unions")
    if sum(ca.group_copies.values()) != sum(cb.group_copies.values()) - n_parts + 1:
        raise ValueError("scenarios differ by more than a single merge")

    pre = _union_totals(value, before)
    post = _union_totals(value, after)[label]
    pre_totals = {g: pre[g] * cb.group_copies[g] for g in parts}

    count: dict[str, int] = {}
    for g in parts:
        for t in cb.group_usage[g]:
            count[t] = count.get(t, 0) + cb.group_copies[g]
    using = {t: cb.unions_using[t] for t in count}
    se = frozenset(t for t in count if using[t] > 1 and ca.unions_using[t] == 1)
    # zero-cost sections cannot move any money, so they never witness strictness
    witnesses = tuple(
        t for t in before.sections
        if t in count and count[t] >= 2 and using[t] > count[t] and before.cost[t] > 0
    )
    return AllianceReport(
        value=value,
        merged=tuple(parts),
        label=label,
        pre_totals=pre_totals,
        post_total=post,
        alliance_count=count,
        unions_using=using,
        se_sections=se,
        witnesses=witnesses,
    )


def alliance(
    value: str, problem: HighwayProblem, structure: CoalitionStructure, merge, label: str | None = None
) -> AllianceReport:
    """Merge the unions ``merge`` (labels or 0-based indices) and report."""
    merged = merge_unions(structure, merge, label)
    new_label = next(lab for lab, b in zip(merged.labels, merged.blocks) if b not in structure.blocks)
    if new_label in structure.labels:
        raise ValueError(f"label {new_label!r} is already used by another union")
    return aggregated_alliance(
        value,
        AggregatedProblem.from_problem(problem, structure),
        AggregatedProblem.from_problem(problem, merged),
        new_label,
    )


def owen_alliance(problem, structure, merge, label=None) -> AllianceReport:
    return alliance("owen", problem, structure, merge, label)


def coalitional_tijs_alliance(problem, structure, merge, label=None) -> AllianceReport:
    return alliance("coalitional-tijs", problem, structure, merge, label)


def shapley_tijs_alliance(problem, structure, merge, label=None) -> AllianceReport:
    return alliance("shapley-tijs", problem, structure, merge, label)
