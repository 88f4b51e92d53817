"""Brute-force TU-game values used as ground truth for the closed forms.

Coalitions are bitmasks over the ordered player list.  Everything is exact and
exponential; the agent cap keeps accidental use on large problems from
hanging.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Iterable

from .model import CoalitionStructure, HighwayProblem, classify_sections, coalition_cost

DEFAULT_CAP = 12


class NotConcaveError(ValueError):
    pass


@dataclass(frozen=True)
class Allocation:
    """Money per player (or per profile), with optional union totals.

    ``weights`` holds multiplicities when a key stands for several identical
    vehicles; :meth:`total` is the weighted sum.
    """

    values: dict[str, Fraction]
    union_totals: dict[str, Fraction] | None = None
    weights: dict[str, int] | None = None
    degenerate: bool = False

    def __getitem__(self, key: str) -> Fraction:
        return self.values[key]

    def __iter__(self):
        return iter(self.values)

    def total(self) -> Fraction:
        w = self.weights or {}
        return sum((v * w.get(k, 1) for k, v in self.values.items()), Fraction(0))

    def as_tuple(self, keys: Iterable[str] | None = None) -> tuple[Fraction, ...]:
        keys = self.values if keys is None else keys
        return tuple(self.values[k] for k in keys)


@dataclass(frozen=True)
class TUGame:
    players: tuple[str, ...]
    table: tuple[Fraction, ...] = field(repr=False)

    def __post_init__(self):
        if len(self.table) != 1 << len(self.players):
            raise ValueError("characteristic function must cover every coalition")
        if self.table[0] != 0:
            raise ValueError("the empty coalition must cost 0")

    @classmethod
    def from_function(cls, players: Iterable[str], fn) -> "TUGame":
        players = tuple(players)
        table = []
        for mask in range(1 << len(players)):
            members = [p for k, p in enumerate(players) if mask >> k & 1]
            table.append(Fraction(fn(members)) if members else Fraction(0))
        return cls(players, tuple(table))

    @property
    def n(self) -> int:
        return len(self.players)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def mask(self, coalition: Iterable[str]) -> int:
        pos = {p: k for k, p in enumerate(self.players)}
        m = 0
        for p in coalition:
            m |= 1 << pos[p]
        return m

    def __call__(self, coalition) -> Fraction:
        if isinstance(coalition, int):
            return self.table[coalition]
        return self.table[self.mask(coalition)]


def _bits(mask: int) -> list[int]:
    return [k for k in range(mask.bit_length()) if mask >> k & 1]


def _submasks(mask: int):
    """All submasks of ``mask``, including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def to_tu_game(problem: HighwayProblem, cap: int = DEFAULT_CAP) -> TUGame:
    problem.check()
    if len(problem.agents) > cap:
        raise ValueError(f"{len(problem.agents)} agents exceed the oracle cap of {cap}")
    return TUGame.from_function(problem.agents, lambda s: coalition_cost(problem, s))


def is_concave(game: TUGame) -> bool:
    n, full = game.n, game.full
    for i in range(n):
        bit = 1 << i
        rest = full & ~bit
        for t in _submasks(rest):
            margin_t = game(t | bit) - game(t)
            for s in _submasks(t):
                if margin_t > game(s | bit) - game(s):
                    return False
    return True


def is_monotone(game: TUGame) -> bool:
    # single-player steps suffice: chains of them reach every superset
    for s in range(game.full + 1):
        for i in range(game.n):
            if not s >> i & 1 and game(s) > game(s | 1 << i):
                return False
    return True


def null_players(game: TUGame) -> set[str]:
    out = set()
    for i, p in enumerate(game.players):
        bit = 1 << i
        if all(game(s | bit) == game(s) for s in range(game.full + 1)):
            out.add(p)
    return out


def symmetric_pairs(game: TUGame) -> set[tuple[str, str]]:
    out = set()
    for i in range(game.n):
        for j in range(i + 1, game.n):
            bi, bj = 1 << i, 1 << j
            rest = game.full & ~bi & ~bj
            if all(game(s | bi) == game(s | bj) for s in _submasks(rest)):
                out.add((game.players[i], game.players[j]))
    return out


def shapley(game: TUGame) -> Allocation:
    n = game.n
    weight = [Fraction(factorial(s) * factorial(n - s - 1), factorial(n)) for s in range(n)]
    values = {}
    for i, p in enumerate(game.players):
        bit = 1 << i
        total = Fraction(0)
        for s in _submasks(game.full & ~bit):
            total += weight[_popcount(s)] * (game(s | bit) - game(s))
        values[p] = total
    return Allocation(values)


def _popcount(m: int) -> int:
    return bin(m).count("1")


def _compromise(lower: list[Fraction], upper: list[Fraction], target: Fraction):
    """Efficient point on the segment from ``lower`` to ``upper``.

    Returns (payoffs, degenerate).  When the segment is a point the lower
    payoff is returned unchanged.
    """
    gap = sum(u - m for u, m in zip(upper, lower))
    if gap == 0:
        return list(lower), True
    alpha = (target - sum(lower)) / gap
    return [m + alpha * (u - m) for u, m in zip(upper, lower)], False


def tijs(game: TUGame) -> Allocation:
    if not is_concave(game):
        raise NotConcaveError("the Tijs value is only defined for concave cost games")
    full = game.full
    utopia = [game(full) - game(full & ~(1 << i)) for i in range(game.n)]
    lower = []
    for i in range(game.n):
        bit = 1 << i
        best = None
        for s in _submasks(full & ~bit):
            val = game(s | bit) - sum((utopia[j] for j in _bits(s)), Fraction(0))
            best = val if best is None or val < best else best
        lower.append(best)
    pay, degenerate = _compromise(lower, utopia, game(full))
    return Allocation(dict(zip(game.players, pay)), degenerate=degenerate)


def _structure_masks(game: TUGame, structure: CoalitionStructure) -> list[int]:
    if structure.agents != frozenset(game.players):
        raise ValueError("coalition structure does not partition the game's players")
    return [game.mask(b) for b in structure.blocks]


def _quotient_game(game: TUGame, masks: list[int], labels) -> TUGame:
    def union_cost(hs):
        m = 0
        for h in hs:
            m |= masks[labels.index(h)]
        return game(m)

    return TUGame.from_function(labels, union_cost)


def owen(game: TUGame, structure: CoalitionStructure) -> Allocation:
    masks = _structure_masks(game, structure)
    n_unions = len(masks)
    values = {}
    for a, pa in enumerate(masks):
        others = [b for b in range(n_unions) if b != a]
        size_a = _popcount(pa)
        for i in _bits(pa):
            bit = 1 << i
            total = Fraction(0)
            for h in range(1 << len(others)):
                r = 0
                for k, b in enumerate(others):
                    if h >> k & 1:
                        r |= masks[b]
                w_h = Fraction(1, n_unions * comb(n_unions - 1, _popcount(h)))
                for s in _submasks(pa & ~bit):
                    w_s = Fraction(1, size_a * comb(size_a - 1, _popcount(s)))
                    total += w_h * w_s * (game(r | s | bit) - game(r | s))
            values[game.players[i]] = total
    totals = {lab: sum((values[p] for p in blk), Fraction(0)) for lab, blk in zip(structure.labels, structure.blocks)}
    return Allocation(values, union_totals=totals)


def coalitional_tijs(game: TUGame, structure: CoalitionStructure) -> Allocation:
    if not is_concave(game):
        raise NotConcaveError("the coalitional Tijs value needs a concave cost game")
    masks = _structure_masks(game, structure)
    labels = list(structure.labels)
    union_totals = tijs(_quotient_game(game, masks, labels)).values
    full = game.full
    utopia = {i: game(full) - game(full & ~(1 << i)) for i in range(game.n)}
    values = {}
    degenerate = False
    for a, pa in enumerate(masks):
        others = [b for b in range(len(masks)) if b != a]
        members = _bits(pa)
        lower = []
        for i in members:
            bit = 1 << i
            best = None
            for h in range(1 << len(others)):
                r = 0
                for k, b in enumerate(others):
                    if h >> k & 1:
                        r |= masks[b]
                for s in _submasks(pa & ~bit):
                    coalition = r | s | bit
                    val = game(coalition) - sum((utopia[j] for j in _bits(coalition & ~bit)), Fraction(0))
                    best = val if best is None or val < best else best
            lower.append(best)
        pay, deg = _compromise(lower, [utopia[i] for i in members], union_totals[labels[a]])
        degenerate |= deg
        for i, v in zip(members, pay):
            values[game.players[i]] = v
    return Allocation(values, union_totals=dict(union_totals), degenerate=degenerate)


def shapley_tijs_ref(
    problem: HighwayProblem, structure: CoalitionStructure, cap: int = DEFAULT_CAP
) -> Allocation:
    """Union totals from the brute-force Owen value, split inside each union
    in proportion to the members' shared-section costs."""
    game = to_tu_game(problem, cap)
    structure.check(problem)
    totals = owen(game, structure).union_totals
    cls = classify_sections(problem)
    values = {}
    for label, block in zip(structure.labels, structure.blocks):
        excl = sum((cls.c_e[i] for i in block), Fraction(0))
        shared = sum((cls.c_s[i] for i in block), Fraction(0))
        for i in block:
            share = (totals[label] - excl) * cls.c_s[i] / shared if shared else Fraction(0)
            values[i] = cls.c_e[i] + share
    return Allocation({i: values[i] for i in problem.agents}, union_totals=totals)
