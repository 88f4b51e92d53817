"""Executable versions of the nine properties used to characterize the
coalitional values, plus a randomized harness that measures which value
satisfies which property.

A value function is any callable ``(problem, structure) -> {agent: payment}``.
Single-instance properties (PO, ETPA, ETPU, PSSA, PSSU) look at one problem;
the others compare two problems whose relation is checked when the
:class:`AxiomInstance` is built, so a failed check always means the value
broke the property, never that the pair was malformed.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable

from .model import CoalitionStructure, HighwayProblem, classify_sections, quotient, restrict
from .random_instances import random_cost, random_instance
from .values import VALUE_NAMES, allocate

ZERO = Fraction(0)

AXIOMS = ("PO", "ETPA", "ETPU", "IIOC", "CIOC", "PSSA", "PSSU", "CPEA", "CPEU")
PAIR_AXIOMS = frozenset({"IIOC", "CIOC", "CPEA", "CPEU"})

# properties each value is known to satisfy; every other cell has a frozen counterexample
EXPECTED: dict[str, frozenset[str]] = {
    "shapley": frozenset({"PO", "ETPA", "IIOC", "CIOC", "CPEA", "CPEU"}),
    "tijs": frozenset({"PO", "ETPA", "PSSA", "CPEA"}),
    "owen": frozenset({"PO", "ETPA", "ETPU", "IIOC", "CIOC", "CPEA", "CPEU"}),
    "coalitional-tijs": frozenset({"PO", "ETPA", "ETPU", "PSSA", "PSSU", "CPEA", "CPEU"}),
    "shapley-tijs": frozenset({"PO", "ETPA", "ETPU", "CIOC", "PSSA", "CPEA", "CPEU"}),
}

ValueFunction = Callable[[HighwayProblem, CoalitionStructure], dict[str, Fraction]]


class HypothesisError(ValueError):
    """The two problems of a pair do not stand in the relation the property needs."""


def value_function(name: str) -> ValueFunction:
    if name not in VALUE_NAMES:
        raise ValueError(f"unknown value {name!r}")
    return lambda problem, structure: allocate(name, problem, structure)


def _same_problem(p: HighwayProblem, q: HighwayProblem) -> bool:
    return (
        set(p.sections) == set(q.sections)
        and p.cost == q.cost
        and dict(p.usage) == dict(q.usage)
    )


def _block(structure: CoalitionStructure, label: str) -> frozenset[str]:
    return structure.blocks[structure.index(label)]


def _totals(values: dict[str, Fraction], structure: CoalitionStructure) -> dict[str, Fraction]:
    return {lab: sum((values[i] for i in b), ZERO) for lab, b in zip(structure.labels, structure.blocks)}


@dataclass(frozen=True)
class AxiomInstance:
    axiom: str
    problem: HighwayProblem
    structure: CoalitionStructure
    other: HighwayProblem | None = None
    other_structure: CoalitionStructure | None = None
    focus: str | None = None  # agent for IIOC/CPEA, union label for CIOC/CPEU

    def __post_init__(self):
        if self.axiom not in AXIOMS:
            raise ValueError(f"unknown axiom {self.axiom!r}")
        self.problem.check()
        self.structure.check(self.problem)
        if self.axiom in PAIR_AXIOMS:
            if self.other is None or self.other_structure is None or self.focus is None:
                raise HypothesisError(f"{self.axiom} needs a second problem and a focus")
            self.other.check()
            self.other_structure.check(self.other)
            getattr(self, f"_hypothesis_{self.axiom.lower()}")()

    def _restrictions_match(self, region, region_other):
        lhs, lp = restrict(self.problem, self.structure, region)
        rhs, rp = restrict(self.other, self.other_structure, region_other)
        return _same_problem(lhs, rhs) and lp.as_set() == rp.as_set()

    def _hypothesis_iioc(self):
        i = self.focus
        if i not in self.problem.usage or i not in self.other.usage:
            raise HypothesisError(f"agent {i!r} must appear in both problems")
        if not self._restrictions_match(self.problem.usage[i], self.other.usage[i]):
            raise HypothesisError(f"the problems differ on the sections agent {i!r} uses")

    def _hypothesis_cioc(self):
        a = self.focus
        if a not in self.structure.labels or a not in self.other_structure.labels:
            raise HypothesisError(f"union {a!r} must appear in both structures")
        region = self.problem.sections_of(_block(self.structure, a))
        region_other = self.other.sections_of(_block(self.other_structure, a))
        if not self._restrictions_match(region, region_other):
            raise HypothesisError(f"the problems differ on the sections union {a!r} uses")

    def _prolongation(self) -> str:
        extra = set(self.other.sections) - set(self.problem.sections)
        if len(extra) != 1 or not set(self.problem.sections) <= set(self.other.sections):
            raise HypothesisError("the second problem must add exactly one section")
        (t,) = extra
        base, base_structure = restrict(self.other, self.other_structure, self.problem.sections)
        if not _same_problem(base, self.problem) or base_structure.as_set() != self.structure.as_set():
            raise HypothesisError("the first problem must be the second one without the new section")
        return t

    def _hypothesis_cpea(self):
        t = self._prolongation()
        if self.other.users(t) != frozenset({self.focus}):
            raise HypothesisError(f"the new section must be used by agent {self.focus!r} alone")

    def _hypothesis_cpeu(self):
        t = self._prolongation()
        a = self.focus
        if a not in self.structure.labels or a not in self.other_structure.labels:
            raise HypothesisError(f"union {a!r} must appear in both structures")
        if _block(self.structure, a) != _block(self.other_structure, a):
            raise HypothesisError(f"union {a!r} must keep its members")
        if any(t in self.other.sections_of(b) for lab, b in zip(self.other_structure.labels, self.other_structure.blocks) if lab != a):
            raise HypothesisError(f"the new section must be used by union {a!r} alone")
        if t not in self.other.sections_of(_block(self.other_structure, a)):
            raise HypothesisError(f"union {a!r} must use the new section")

    @property
    def new_section(self) -> str | None:
        if self.axiom not in ("CPEA", "CPEU"):
            return None
        return next(t for t in self.other.sections if t not in set(self.problem.sections))


@dataclass(frozen=True)
class Verdict:
    axiom: str
    passed: bool
    vacuous: bool = False
    witness: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed


def _fail(axiom: str, **witness) -> Verdict:
    return Verdict(axiom, False, witness={k: _plain(v) for k, v in witness.items()})


def _plain(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (set, frozenset, tuple)):
        return sorted(v) if isinstance(v, (set, frozenset)) else list(v)
    return v


def _proportional(pays: dict[str, Fraction], base: dict[str, Fraction]):
    """Return (constant, offender): a non-negative c with pays == c*base, or
    the first key that rules every such constant out."""
    c = None
    for k in pays:
        if base[k] != 0:
            c = pays[k] / base[k]
            break
    c = ZERO if c is None else c
    if c < 0:
        return c, next(k for k in pays if base[k] != 0)
    for k in pays:
        if pays[k] != c * base[k]:
            return c, k
    return c, None


def check(instance: AxiomInstance, value: ValueFunction | str) -> Verdict:
    if isinstance(value, str):
        value = value_function(value)
    return _CHECKS[instance.axiom](instance, value)


def _check_po(inst, sigma):
    pay = sigma(inst.problem, inst.structure)
    total = sum(pay.values(), ZERO)
    if total != inst.problem.total_cost:
        return _fail("PO", paid=total, cost=inst.problem.total_cost)
    return Verdict("PO", True)


def _check_etpa(inst, sigma):
    pay = sigma(inst.problem, inst.structure)
    usage = inst.problem.usage
    tested = False
    for label, block in zip(inst.structure.labels, inst.structure.blocks):
        members = sorted(block)
        for x, i in enumerate(members):
            for j in members[x + 1:]:
                if usage[i] == usage[j]:
                    tested = True
                    if pay[i] != pay[j]:
                        return _fail("ETPA", union=label, agents=(i, j), payments=(str(pay[i]), str(pay[j])))
    return Verdict("ETPA", True, vacuous=not tested)


def _check_etpu(inst, sigma):
    pay = sigma(inst.problem, inst.structure)
    totals = _totals(pay, inst.structure)
    reach = {lab: inst.problem.sections_of(b) for lab, b in zip(inst.structure.labels, inst.structure.blocks)}
    labels = inst.structure.labels
    tested = False
    for x, a in enumerate(labels):
        for b in labels[x + 1:]:
            if reach[a] == reach[b]:
                tested = True
                if totals[a] != totals[b]:
                    return _fail("ETPU", unions=(a, b), totals=(str(totals[a]), str(totals[b])))
    return Verdict("ETPU", True, vacuous=not tested)


def _check_iioc(inst, sigma):
    i = inst.focus
    before = sigma(inst.problem, inst.structure)[i]
    after = sigma(inst.other, inst.other_structure)[i]
    if before != after:
        return _fail("IIOC", agent=i, payments=(str(before), str(after)))
    return Verdict("IIOC", True)


def _check_cioc(inst, sigma):
    a = inst.focus
    before = _totals(sigma(inst.problem, inst.structure), inst.structure)[a]
    after = _totals(sigma(inst.other, inst.other_structure), inst.other_structure)[a]
    if before != after:
        return _fail("CIOC", union=a, totals=(str(before), str(after)))
    return Verdict("CIOC", True)


def _check_pssa(inst, sigma):
    cls = classify_sections(inst.problem)
    pay = sigma(inst.problem, inst.structure)
    tested = False
    for label, block in zip(inst.structure.labels, inst.structure.blocks):
        if inst.problem.sections_of(block) & cls.exclusive:
            continue
        tested = True
        c, bad = _proportional({i: pay[i] for i in sorted(block)}, cls.c_s)
        if bad is not None:
            return _fail("PSSA", union=label, agent=bad, constant=c, payment=pay[bad], shared_cost=cls.c_s[bad])
    return Verdict("PSSA", True, vacuous=not tested)


def _check_pssu(inst, sigma):
    q = quotient(inst.problem, inst.structure)
    if q.exclusive:
        return Verdict("PSSU", True, vacuous=True)
    totals = _totals(sigma(inst.problem, inst.structure), inst.structure)
    claims = dict(zip(inst.structure.labels, q.c_s))
    c, bad = _proportional(totals, claims)
    if bad is not None:
        return _fail("PSSU", union=bad, constant=c, total=totals[bad], shared_cost=claims[bad])
    return Verdict("PSSU", True)


def _check_cpea(inst, sigma):
    t = inst.new_section
    before = sigma(inst.problem, inst.structure)
    after = sigma(inst.other, inst.other_structure)
    for j in inst.other.agents:
        expected = before.get(j, ZERO) + (inst.other.cost[t] if j == inst.focus else ZERO)
        if after[j] != expected:
            return _fail("CPEA", agent=j, expected=expected, got=after[j], section=t)
    return Verdict("CPEA", True)


def _check_cpeu(inst, sigma):
    t = inst.new_section
    before = _totals(sigma(inst.problem, inst.structure), inst.structure)
    after = _totals(sigma(inst.other, inst.other_structure), inst.other_structure)
    for b in inst.other_structure.labels:
        expected = before.get(b, ZERO) + (inst.other.cost[t] if b == inst.focus else ZERO)
        if after[b] != expected:
            return _fail("CPEU", union=b, expected=expected, got=after[b], section=t)
    return Verdict("CPEU", True)


_CHECKS = {
    "PO": _check_po,
    "ETPA": _check_etpa,
    "ETPU": _check_etpu,
    "IIOC": _check_iioc,
    "CIOC": _check_cioc,
    "PSSA": _check_pssa,
    "PSSU": _check_pssu,
    "CPEA": _check_cpea,
    "CPEU": _check_cpeu,
}


# --- instance generators -------------------------------------------------


def _rebuild(costs, usage, blocks: dict[str, set[str]]):
    problem = HighwayProblem.build(costs, usage)
    structure = CoalitionStructure.from_mapping({lab: b for lab, b in blocks.items() if b})
    return problem, structure


def _fresh(prefix: str, taken) -> Iterable[str]:
    k = 1
    while True:
        name = f"{prefix}{k}"
        if name not in taken:
            yield name
        k += 1


def _blocks(structure: CoalitionStructure) -> dict[str, set[str]]:
    return {lab: set(b) for lab, b in zip(structure.labels, structure.blocks)}


def _gen_plain(axiom):
    def gen(rng, max_agents, max_sections):
        problem, structure = random_instance(rng, max_agents, max_sections)
        return AxiomInstance(axiom, problem, structure)

    return gen


def _gen_etpa(rng, max_agents, max_sections):
    problem, structure = random_instance(rng, max_agents, max_sections)
    usage = {i: set(ts) for i, ts in problem.usage.items()}
    blocks = _blocks(structure)
    names = _fresh("d", usage)
    for _ in range(rng.randint(1, 2)):
        twin = rng.choice(sorted(usage))
        new = next(names)
        usage[new] = set(usage[twin])
        blocks[_label_of(blocks, twin)].add(new)
    p, s = _rebuild(problem.cost, usage, blocks)
    return AxiomInstance("ETPA", p, s)


def _label_of(blocks, agent):
    return next(lab for lab, b in blocks.items() if agent in b)


def _gen_etpu(rng, max_agents, max_sections):
    problem, structure = random_instance(rng, max_agents, max_sections)
    usage = {i: set(ts) for i, ts in problem.usage.items()}
    blocks = _blocks(structure)
    source = rng.choice(structure.labels)
    reach = sorted(problem.sections_of(blocks[source]))
    names = _fresh("e", usage)
    members = [next(names) for _ in range(rng.randint(1, 3))]
    for m in members:
        usage[m] = {t for t in reach if rng.random() < 0.5} or {rng.choice(reach)}
    for t in reach:
        if not any(t in usage[m] for m in members):
            usage[rng.choice(members)].add(t)
    blocks[next(_fresh("V", blocks))] = set(members)
    p, s = _rebuild(problem.cost, usage, blocks)
    return AxiomInstance("ETPU", p, s)


def _outside_change(rng, problem, structure, fixed_region, frozen_agents, max_sections):
    """A second problem that agrees with the first on ``fixed_region``.

    Agents touching the region keep their usage there; ``frozen_agents`` may
    not touch anything else.  Outside sections, outside agents and the way
    outside agents join unions are redrawn.
    """
    region = set(fixed_region)
    insiders = {i for i, ts in problem.usage.items() if ts & region}
    outside = [f"o{k + 1}" for k in range(rng.randint(0, max(0, max_sections - len(region))))]
    usage = {i: set(problem.usage[i] & region) for i in insiders}
    free = sorted(insiders - set(frozen_agents))
    names = _fresh("x", set(problem.usage))
    newcomers = [next(names) for _ in range(rng.randint(0, 2) if outside else 0)]
    for j in newcomers:
        usage[j] = {t for t in outside if rng.random() < 0.5} or {rng.choice(outside)}
    for i in free:
        usage[i] |= {t for t in outside if rng.random() < 0.3}
    movers = newcomers + free
    for t in outside:
        if not any(t in usage[i] for i in movers):
            if not movers:
                newcomers.append(next(names))
                usage[newcomers[-1]] = set()
                movers.append(newcomers[-1])
            usage[rng.choice(movers)].add(t)
    costs = {t: problem.cost[t] for t in region}
    costs.update({t: random_cost(rng) for t in outside})

    blocks: dict[str, set[str]] = {}
    for lab, b in zip(structure.labels, structure.blocks):
        kept = set(b) & insiders
        if kept:
            blocks[lab] = kept
    open_labels = [lab for lab, b in blocks.items() if not b & set(frozen_agents)]
    fresh_labels = _fresh("W", set(structure.labels))
    for j in newcomers:
        if open_labels and rng.random() < 0.5:
            blocks[rng.choice(open_labels)].add(j)
        else:
            lab = next(fresh_labels)
            blocks[lab] = {j}
            open_labels.append(lab)
    return _rebuild(costs, usage, blocks)


def _gen_iioc(rng, max_agents, max_sections):
    problem, structure = random_instance(rng, max_agents, max_sections)
    i = rng.choice(problem.agents)
    other, other_structure = _outside_change(rng, problem, structure, problem.usage[i], {i}, max_sections)
    return AxiomInstance("IIOC", problem, structure, other, other_structure, i)


def _gen_cioc(rng, max_agents, max_sections):
    problem, structure = random_instance(rng, max_agents, max_sections)
    a = rng.choice(structure.labels)
    block = _block(structure, a)
    other, other_structure = _outside_change(rng, problem, structure, problem.sections_of(block), block, max_sections)
    return AxiomInstance("CIOC", problem, structure, other, other_structure, a)


def _repair(rng, problem, structure, by_union: bool):
    """Give every section a second user (from another union if ``by_union``)."""
    usage = {i: set(ts) for i, ts in problem.usage.items()}
    owner = {i: structure.union_of(i) for i in problem.agents}
    for t in problem.sections:
        users = [i for i in problem.agents if t in usage[i]]
        if by_union:
            taken = {owner[i] for i in users}
            candidates = [i for i in problem.agents if owner[i] not in taken]
            needed = len(taken) < 2
        else:
            candidates = [i for i in problem.agents if i not in users]
            needed = len(users) < 2
        if needed and candidates:
            usage[rng.choice(candidates)].add(t)
    return HighwayProblem.build(problem.cost, usage)


def _gen_pssa(rng, max_agents, max_sections):
    problem, structure = random_instance(rng, max_agents, max_sections, min_agents=2)
    return AxiomInstance("PSSA", _repair(rng, problem, structure, by_union=False), structure)


def _gen_pssu(rng, max_agents, max_sections):
    problem, structure = random_instance(rng, max_agents, max_sections, min_agents=2)
    while len(structure) < 2:
        problem, structure = random_instance(rng, max_agents, max_sections, min_agents=2)
    return AxiomInstance("PSSU", _repair(rng, problem, structure, by_union=True), structure)


def _prolong(problem, cost, users):
    t = next(_fresh("new", set(problem.sections)))
    usage = {i: set(ts) for i, ts in problem.usage.items()}
    for i in users:
        usage.setdefault(i, set()).add(t)
    costs = dict(problem.cost)
    costs[t] = cost
    return HighwayProblem.build(costs, usage)


def _gen_cpea(rng, max_agents, max_sections):
    problem, structure = random_instance(rng, max_agents, max_sections)
    blocks = _blocks(structure)
    if rng.random() < 0.2:
        # the prolongation brings in a brand-new agent
        i = next(_fresh("n", set(problem.usage)))
        if rng.random() < 0.5:
            blocks[rng.choice(structure.labels)].add(i)
        else:
            blocks[next(_fresh("W", blocks))] = {i}
    else:
        i = rng.choice(problem.agents)
    other = _prolong(problem, random_cost(rng, zero_rate=0.05), [i])
    other_structure = CoalitionStructure.from_mapping(blocks)
    return AxiomInstance("CPEA", problem, structure, other, other_structure, i)


def _gen_cpeu(rng, max_agents, max_sections):
    problem, structure = random_instance(rng, max_agents, max_sections)
    a = rng.choice(structure.labels)
    members = sorted(_block(structure, a))
    users = rng.sample(members, rng.randint(1, len(members)))
    other = _prolong(problem, random_cost(rng, zero_rate=0.05), users)
    return AxiomInstance("CPEU", problem, structure, other, structure, a)


GENERATORS = {
    "PO": _gen_plain("PO"),
    "ETPA": _gen_etpa,
    "ETPU": _gen_etpu,
    "IIOC": _gen_iioc,
    "CIOC": _gen_cioc,
    "PSSA": _gen_pssa,
    "PSSU": _gen_pssu,
    "CPEA": _gen_cpea,
    "CPEU": _gen_cpeu,
}


def generate(axiom: str, rng: random.Random, max_agents: int = 6, max_sections: int = 6) -> AxiomInstance:
    return GENERATORS[axiom](rng, max_agents, max_sections)


# --- satisfaction matrix --------------------------------------------------


@dataclass
class Cell:
    value: str
    axiom: str
    trials: int = 0
    vacuous: int = 0
    violations: int = 0
    counterexample: tuple[AxiomInstance, Verdict] | None = None

    @property
    def satisfied(self) -> bool:
        return self.violations == 0

    @property
    def expected(self) -> bool:
        return self.axiom in EXPECTED.get(self.value, frozenset())

    def describe(self) -> str:
        if self.satisfied:
            return f"no violation found in {self.trials} trials"
        return f"{self.violations}/{self.trials} violations"


@dataclass
class SatisfactionMatrix:
    values: tuple[str, ...]
    trials: int
    seed: int
    cells: dict[tuple[str, str], Cell]

    def cell(self, value: str, axiom: str) -> Cell:
        return self.cells[(value, axiom)]

    def unexpected_violations(self) -> list[Cell]:
        return [c for c in self.cells.values() if c.expected and not c.satisfied]

    def render(self) -> str:
        width = max(len(v) for v in self.values)
        head = " " * width + "  " + " ".join(f"{a:>5}" for a in AXIOMS)
        rows = [head]
        for v in self.values:
            marks = []
            for a in AXIOMS:
                c = self.cells[(v, a)]
                mark = "ok" if c.satisfied else "FAIL"
                if c.expected != c.satisfied and v in EXPECTED:
                    mark += "!"
                marks.append(f"{mark:>5}")
            rows.append(f"{v:<{width}}  " + " ".join(marks))
        rows.append(f"({self.trials} trials per axiom, seed {self.seed}; '!' marks a result that contradicts the expected table)")
        return "\n".join(rows)


def satisfaction_matrix(
    values: Iterable[str] = VALUE_NAMES,
    trials: int = 500,
    seed: int = 0,
    max_agents: int = 6,
    max_sections: int = 6,
    functions: dict[str, ValueFunction] | None = None,
) -> SatisfactionMatrix:
    """Check every axiom on ``trials`` random instances for every value.

    The same instances are shared by all values.  ``functions`` may supply
    value functions for names outside the built-in five.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    values = tuple(values)
    functions = dict(functions or {})
    for v in values:
        functions.setdefault(v, value_function(v) if v in VALUE_NAMES else None)
        if functions[v] is None:
            raise ValueError(f"no function for value {v!r}")
    cells = {(v, a): Cell(v, a) for v in values for a in AXIOMS}
    for axiom in AXIOMS:
        rng = random.Random(f"{seed}:{axiom}")
        for _ in range(trials):
            inst = generate(axiom, rng, max_agents, max_sections)
            for v in values:
                verdict = check(inst, functions[v])
                c = cells[(v, axiom)]
                c.trials += 1
                c.vacuous += verdict.vacuous
                if not verdict.passed:
                    c.violations += 1
                    if c.counterexample is None:
                        c.counterexample = (inst, verdict)
    return SatisfactionMatrix(values, trials, seed, cells)


def find_counterexample(
    value: str, axiom: str, seed: int = 0, trials: int = 5000, max_agents: int = 6, max_sections: int = 6
) -> tuple[AxiomInstance, Verdict] | None:
    """Random search that tries small instances first."""
    rng = random.Random(f"search:{seed}:{value}:{axiom}")
    sigma = value_function(value)
    for k in range(trials):
        size = 2 + k * (max_agents - 1) // trials
        inst = generate(axiom, rng, min(size, max_agents), min(size + 1, max_sections))
        verdict = check(inst, sigma)
        if not verdict.passed:
            return inst, verdict
    return None


# --- frozen counterexamples ------------------------------------------------


def _problem_to_json(p: HighwayProblem) -> dict:
    return {
        "sections": list(p.sections),
        "costs": {t: str(p.cost[t]) for t in p.sections},
        "usage": {i: sorted(p.usage[i]) for i in p.agents},
    }


def _problem_from_json(d: dict) -> HighwayProblem:
    return HighwayProblem.build({t: Fraction(d["costs"][t]) for t in d["sections"]}, d["usage"])


def _structure_to_json(s: CoalitionStructure) -> dict:
    return {lab: sorted(b) for lab, b in zip(s.labels, s.blocks)}


def instance_to_json(inst: AxiomInstance) -> dict:
    out = {
        "axiom": inst.axiom,
        "problem": _problem_to_json(inst.problem),
        "structure": _structure_to_json(inst.structure),
    }
    if inst.other is not None:
        out["other"] = _problem_to_json(inst.other)
        out["other_structure"] = _structure_to_json(inst.other_structure)
        out["focus"] = inst.focus
    return out


def instance_from_json(d: dict) -> AxiomInstance:
    other = _problem_from_json(d["other"]) if "other" in d else None
    other_structure = CoalitionStructure.from_mapping(d["other_structure"]) if "other_structure" in d else None
    return AxiomInstance(
        d["axiom"],
        _problem_from_json(d["problem"]),
        CoalitionStructure.from_mapping(d["structure"]),
        other,
        other_structure,
        d.get("focus"),
    )


def fixture_dir() -> Path:
    return Path(str(resources.files("tollshare") / "data" / "counterexamples"))


def freeze_counterexamples(directory: Path | None = None, seed: int = 0, trials: int = 5000) -> list[Path]:
    """Search and store one counterexample for every cell outside :data:`EXPECTED`."""
    directory = Path(directory) if directory is not None else fixture_dir()
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for value in VALUE_NAMES:
        for axiom in AXIOMS:
            if axiom in EXPECTED[value]:
                continue
            found = find_counterexample(value, axiom, seed, trials)
            if found is None:
                raise RuntimeError(f"no counterexample for {value} / {axiom} in {trials} trials")
            inst, verdict = found
            record = {"value": value, "instance": instance_to_json(inst), "witness": verdict.witness}
            path = directory / f"{value}__{axiom}.json"
            path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8")
            written.append(path)
    return written


def load_counterexamples(directory: Path | None = None) -> list[dict]:
    directory = Path(directory) if directory is not None else fixture_dir()
    return [json.loads(p.read_text(encoding="utf-8")) for p in sorted(directory.glob("*.json"))]


def replay(record: dict) -> Verdict:
    """Re-run a frozen counterexample; a faithful fixture yields a failed verdict."""
    return check(instance_from_json(record["instance"]), record["value"])
