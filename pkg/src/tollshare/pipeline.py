"""Traffic/fare tables to per-class tolls.

Each physical section is split into stacked levels, one per vehicle class; a
vehicle of class ``c`` uses levels ``0..c`` of every section it drives.  Level
costs are rebuilt from the published fares so that the equal-split rule
returns those fares unchanged.  One profile is created per (section, class)
with the class's daily traffic as multiplicity.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterable

from . import values as V
from .model import to_money
from .values import AggregatedProblem, Profile

DEFAULT_CLASSES = ("light", "heavy1", "heavy2")
ROUNDING_MODES = ("none", "nearest2", "ceil2")
_ROUNDING_ALIASES = {"nearest-2dp": "nearest2", "ceil-2dp": "ceil2", "nearest": "nearest2", "ceil": "ceil2"}
AP9_PATH = Path(__file__).with_name("data") / "ap9.csv"


class TariffError(ValueError):
    """Malformed or inconsistent tariff/union input."""


@dataclass(frozen=True)
class TariffRow:
    section: str
    adi: tuple[int, ...]
    fare: tuple[Fraction, ...]


@dataclass(frozen=True)
class ClassTariffTable:
    classes: tuple[str, ...]
    rows: tuple[TariffRow, ...]

    @property
    def sections(self) -> tuple[str, ...]:
        return tuple(r.section for r in self.rows)

    def row(self, section: str) -> TariffRow:
        for r in self.rows:
            if r.section == section:
                return r
        raise KeyError(section)

    def class_index(self, name: str) -> int:
        try:
            return self.classes.index(name)
        except ValueError:
            raise TariffError(f"unknown vehicle class {name!r} (known: {', '.join(self.classes)})") from None


def parse_tariff_csv(source) -> ClassTariffTable:
    """Read a ``section,adi_<class>...,fare_<class>...`` CSV.

    ``source`` may be a path or an open text stream.
    """
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as fh:
            return _parse_tariff(fh)
    return _parse_tariff(source)


def _parse_tariff(fh: IO[str]) -> ClassTariffTable:
    reader = csv.reader(fh)
    header = next(reader, None)
    if not header:
        raise TariffError("empty file: no header")
    header = [h.strip() for h in header]
    if header[0] != "section":
        raise TariffError("first column must be 'section'")
    adi_cols = [h for h in header[1:] if h.startswith("adi_")]
    fare_cols = [h for h in header[1:] if h.startswith("fare_")]
    classes = tuple(h[4:] for h in adi_cols)
    if not classes or tuple(h[5:] for h in fare_cols) != classes:
        raise TariffError("header must list adi_<class> and fare_<class> columns for the same classes, in the same order")
    if header[1:] != adi_cols + fare_cols or len(set(classes)) != len(classes):
        raise TariffError("header must be section, then every adi_<class>, then every fare_<class>")
    n = len(classes)
    rows, seen = [], set()
    for lineno, rec in enumerate(reader, start=2):
        if not rec or all(not x.strip() for x in rec):
            continue
        if len(rec) != len(header):
            raise TariffError(f"row {lineno}: expected {len(header)} fields, got {len(rec)}")
        section = rec[0].strip()
        if not section or section in seen:
            raise TariffError(f"row {lineno}: missing or duplicate section id {section!r}")
        seen.add(section)
        adi = []
        for col, raw in zip(adi_cols, rec[1 : n + 1]):
            try:
                v = int(raw.strip())
            except ValueError:
                raise TariffError(f"row {lineno}, column {col}: not an integer: {raw!r}") from None
            if v < 0:
                raise TariffError(f"row {lineno}, column {col}: negative ADI")
            adi.append(v)
        if not any(adi):
            raise TariffError(f"row {lineno}: every ADI is zero")
        fare = []
        for col, raw in zip(fare_cols, rec[n + 1 :]):
            try:
                v = Fraction(raw.strip())
            except (ValueError, ZeroDivisionError):
                raise TariffError(f"row {lineno}, column {col}: not a number: {raw!r}") from None
            if v < 0:
                raise TariffError(f"row {lineno}, column {col}: negative fare")
            if fare and v < fare[-1]:
                raise TariffError(f"row {lineno}, column {col}: non-monotone fares")
            fare.append(v)
        rows.append(TariffRow(section, tuple(adi), tuple(fare)))
    if not rows:
        raise TariffError("no data rows")
    return ClassTariffTable(classes, tuple(rows))


def load_ap9() -> ClassTariffTable:
    return parse_tariff_csv(AP9_PATH)


@dataclass(frozen=True)
class LevelCostMatrix:
    sections: tuple[str, ...]
    levels: int
    costs: dict[tuple[str, int], Fraction]

    def __getitem__(self, key: tuple[str, int]) -> Fraction:
        return self.costs[key]

    @property
    def total(self) -> Fraction:
        return sum(self.costs.values(), Fraction(0))


def build_level_costs(table: ClassTariffTable) -> LevelCostMatrix:
    """Level ``l`` of a section costs the fare step into class ``l`` times
    the traffic of every class at or above ``l``."""
    costs = {}
    for r in table.rows:
        for level in range(len(table.classes)):
            step = r.fare[level] - (r.fare[level - 1] if level else 0)
            costs[(r.section, level)] = step * sum(r.adi[level:])
    return LevelCostMatrix(table.sections, len(table.classes), costs)


def scale_level(levels: LevelCostMatrix, level: int, factor) -> LevelCostMatrix:
    factor = to_money(factor)
    if not 0 <= level < levels.levels:
        raise ValueError(f"level {level} out of range 0..{levels.levels - 1}")
    if factor <= 0:
        raise ValueError("scaling factor must be positive")
    costs = {k: v * factor if k[1] == level else v for k, v in levels.costs.items()}
    return LevelCostMatrix(levels.sections, levels.levels, costs)


@dataclass(frozen=True)
class UnionSpec:
    """Which (section, class) cells form named unions.

    Cells not mentioned are vehicles that act alone.  ``class_blocks`` maps a
    union label to a class whose vehicles, on every section, all join it.
    """

    class_blocks: dict[str, str] = field(default_factory=dict)
    cells: dict[str, tuple[tuple[str, str], ...]] = field(default_factory=dict)

    @classmethod
    def none(cls) -> "UnionSpec":
        return cls()

    @classmethod
    def class_block(cls, vehicle_class: str) -> "UnionSpec":
        return cls(class_blocks={f"class-block:{vehicle_class}": vehicle_class})

    @property
    def is_empty(self) -> bool:
        return not self.class_blocks and not self.cells

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.class_blocks) + tuple(self.cells)

    def resolve(self, table: ClassTariffTable) -> dict[tuple[str, str], str]:
        out: dict[tuple[str, str], str] = {}

        def put(cell, label):
            if cell in out and out[cell] != label:
                raise TariffError(f"cell {cell[0]}:{cell[1]} assigned to two unions")
            out[cell] = label

        for label, cls_name in self.class_blocks.items():
            table.class_index(cls_name)
            for section in table.sections:
                put((section, cls_name), label)
        for label, cells in self.cells.items():
            for section, cls_name in cells:
                table.class_index(cls_name)
                if section not in table.sections:
                    raise TariffError(f"union {label!r}: unknown section {section!r}")
                put((section, cls_name), label)
        return out


def parse_union_spec(text: str) -> UnionSpec:
    """Parse ``none``, ``class-block:<class>``, or union-file contents.

    A union file has one union per line, either ``id: section:class,...`` or
    the shorthand ``class-block:<class>``; ``#`` starts a comment.
    """
    text = text.strip()
    if text in ("", "none"):
        return UnionSpec.none()
    blocks: dict[str, str] = {}
    cells: dict[str, tuple[tuple[str, str], ...]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("class-block:"):
            cls_name = line.split(":", 1)[1].strip()
            if not cls_name:
                raise TariffError(f"union line {lineno}: class-block needs a class")
            blocks[line] = cls_name
            continue
        label, sep, rest = line.partition(":")
        label = label.strip()
        if not sep or not label:
            raise TariffError(f"union line {lineno}: expected 'id: section:class[,section:class...]'")
        pairs = []
        for item in rest.split(","):
            section, sep2, cls_name = item.strip().rpartition(":")
            if not sep2 or not section or not cls_name:
                raise TariffError(f"union line {lineno}: bad cell {item.strip()!r}")
            pairs.append((section, cls_name))
        if label in cells or label in blocks:
            raise TariffError(f"union line {lineno}: duplicate union id {label!r}")
        cells[label] = tuple(pairs)
    return UnionSpec(blocks, cells)


def load_union_spec(arg: str) -> UnionSpec:
    """CLI helper: a literal scenario, or a path to a union file."""
    if arg in ("none",) or arg.startswith("class-block:"):
        return parse_union_spec(arg)
    path = Path(arg)
    if not path.exists():
        raise TariffError(f"union scenario {arg!r} is neither 'none', 'class-block:<class>' nor an existing file")
    return parse_union_spec(path.read_text(encoding="utf-8"))


def subsection_id(section: str, level: int) -> str:
    return f"{section}/L{level}"


@dataclass(frozen=True)
class TariffProblem(AggregatedProblem):
    """Aggregated problem that remembers which (section, class) each profile is."""

    cells: dict[str, tuple[str, str]] = field(default_factory=dict)
    classes: tuple[str, ...] = ()


def build_problem(
    levels: LevelCostMatrix, table: ClassTariffTable, unions: UnionSpec | None = None
) -> TariffProblem:
    unions = unions or UnionSpec.none()
    membership = unions.resolve(table)
    profiles, cells = [], {}
    used: set[str] = set()
    for r in table.rows:
        for c, cls_name in enumerate(table.classes):
            if r.adi[c] == 0:
                continue
            label = f"{r.section}:{cls_name}"
            usage = frozenset(subsection_id(r.section, l) for l in range(c + 1))
            used |= usage
            profiles.append(Profile(label, usage, r.adi[c], membership.get((r.section, cls_name))))
            cells[label] = (r.section, cls_name)
    sections, cost = [], {}
    for section in levels.sections:
        for level in range(levels.levels):
            sid = subsection_id(section, level)
            c = levels[(section, level)]
            if sid not in used:
                # a level nobody drives on: its cost is the fare step times zero traffic
                if c != 0:
                    raise TariffError(f"level {level} of {section} has cost {c} but no vehicles")
                continue
            sections.append(sid)
            cost[sid] = c
    problem = TariffProblem(tuple(sections), cost, tuple(profiles), cells, table.classes)
    problem.check()
    return problem


def normalize_rounding(mode: str) -> str:
    mode = _ROUNDING_ALIASES.get(mode, mode)
    if mode not in ROUNDING_MODES:
        raise ValueError(f"unknown rounding mode {mode!r}; choose from {', '.join(ROUNDING_MODES)}")
    return mode


def round_money(x: Fraction, mode: str) -> Fraction:
    mode = normalize_rounding(mode)
    if mode == "none":
        return x
    if mode == "ceil2":
        return Fraction(math.ceil(x * 100), 100)
    return Fraction(math.floor(x * 100 + Fraction(1, 2)), 100)


def decimal_str(x: Fraction, places: int = 2) -> str:
    q = Decimal(1).scaleb(-places)
    return str((Decimal(x.numerator) / Decimal(x.denominator)).quantize(q, rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class TollTable:
    value: str
    rounding: str
    sections: tuple[str, ...]
    classes: tuple[str, ...]
    exact: dict[tuple[str, str], Fraction]
    fares: dict[tuple[str, str], Fraction]
    multiplicity: dict[tuple[str, str], int]
    total_cost: Fraction

    def fare(self, section: str, cls_name: str) -> Fraction | None:
        return self.fares.get((section, cls_name))

    def revenue(self, rounded: bool = True) -> Fraction:
        src = self.fares if rounded else self.exact
        return sum((src[k] * self.multiplicity[k] for k in src), Fraction(0))

    def _cell(self, key, places):
        return decimal_str(self.fares[key], places) if key in self.fares else ""

    @property
    def _places(self) -> int:
        return 6 if self.rounding == "none" else 2

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["section", *self.classes])
        for s in self.sections:
            w.writerow([s, *(self._cell((s, c), self._places) for c in self.classes)])
        return buf.getvalue()

    def to_markdown(self) -> str:
        lines = [
            f"**{self.value}** (rounding: {self.rounding})",
            "",
            "| section | " + " | ".join(self.classes) + " |",
            "|---|" + "---:|" * len(self.classes),
        ]
        for s in self.sections:
            lines.append(f"| {s} | " + " | ".join(self._cell((s, c), self._places) or "-" for c in self.classes) + " |")
        lines += ["", self.revenue_note()]
        return "\n".join(lines) + "\n"

    def revenue_note(self) -> str:
        gap = self.revenue() - self.total_cost
        return (
            f"revenue {decimal_str(self.revenue())} vs cost {decimal_str(self.total_cost)} "
            f"(difference {decimal_str(gap)})"
        )

    def to_dict(self) -> dict:
        rows = []
        for s in self.sections:
            for c in self.classes:
                k = (s, c)
                if k not in self.fares:
                    continue
                rows.append(
                    {
                        "section": s,
                        "class": c,
                        "vehicles": self.multiplicity[k],
                        "exact": [self.exact[k].numerator, self.exact[k].denominator],
                        "exact_decimal": decimal_str(self.exact[k], 6),
                        "fare": decimal_str(self.fares[k], self._places),
                    }
                )
        rev = self.revenue()
        return {
            "value": self.value,
            "rounding": self.rounding,
            "classes": list(self.classes),
            "total_cost": [self.total_cost.numerator, self.total_cost.denominator],
            "revenue": [rev.numerator, rev.denominator],
            "revenue_minus_cost": decimal_str(rev - self.total_cost, 6),
            "rows": rows,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json() + "\n"
        if fmt == "md":
            return self.to_markdown()
        raise ValueError(f"unknown format {fmt!r}")


def toll_table(problem: TariffProblem, value: str, rounding: str = "none") -> TollTable:
    rounding = normalize_rounding(rounding)
    alloc, _ = V.compute(value, problem)
    exact, mult = {}, {}
    for p in problem.profiles:
        key = problem.cells[p.label]
        exact[key] = alloc[p.label]
        mult[key] = p.multiplicity
    sections = tuple(dict.fromkeys(s for s, _ in problem.cells.values()))
    return TollTable(
        value=value,
        rounding=rounding,
        sections=sections,
        classes=problem.classes,
        exact=exact,
        fares={k: round_money(v, rounding) for k, v in exact.items()},
        multiplicity=mult,
        total_cost=problem.total_cost,
    )


def solve(
    table: ClassTariffTable,
    value: str,
    unions: UnionSpec | None = None,
    rounding: str = "none",
    multipliers: Iterable[tuple[int, Fraction]] = (),
) -> TollTable:
    levels = build_level_costs(table)
    for level, factor in multipliers:
        levels = scale_level(levels, level, factor)
    return toll_table(build_problem(levels, table, unions), value, rounding)
