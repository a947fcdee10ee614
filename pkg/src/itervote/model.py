"""Core domain types for iterative Plurality games.

Scores, masses, radii and utilities are all :class:`fractions.Fraction`
so that threshold comparisons are exact and runs are reproducible.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Rat = Fraction


class StructureError(ValueError):
    """Raised when inputs do not have the shape an operation expects."""


def as_rat(x) -> Fraction:
    """Parse an exact rational from an int, Fraction or string.

    Strings may be ``"p/q"``, an integer, or a finite decimal such as
    ``"1.5"``. Floats are rejected because they are not exact.
    """
    if isinstance(x, bool):
        raise StructureError(f"not a rational: {x!r}")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise StructureError(f"malformed rational {x!r}") from exc
    raise StructureError(f"not an exact rational: {x!r}")


@dataclass(frozen=True)
class PreferenceOrder:
    """A strict order over candidates ``0..m-1``, best first."""

    order: tuple[int, ...]
    ranks: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        order = tuple(int(c) for c in self.order)
        if sorted(order) != list(range(len(order))) or not order:
            raise StructureError(f"not a permutation: {self.order!r}")
        object.__setattr__(self, "order", order)
        ranks = [0] * len(order)
        for k, c in enumerate(order):
            ranks[c] = k + 1
        object.__setattr__(self, "ranks", tuple(ranks))

    @property
    def m(self) -> int:
        return len(self.order)

    def rank(self, c: int) -> int:
        return self.ranks[c]

    def at_rank(self, k: int) -> int:
        return self.order[k - 1]

    def top(self) -> int:
        return self.order[0]

    def prefers(self, a: int, b: int) -> bool:
        return self.ranks[a] < self.ranks[b]

    def best_of(self, cands: Iterable[int]) -> int:
        return min(cands, key=self.ranks.__getitem__)

    def worst_of(self, cands: Iterable[int]) -> int:
        return max(cands, key=self.ranks.__getitem__)


@dataclass(frozen=True)
class UtilityScale:
    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(as_rat(v) for v in self.values)
        if len(set(vals)) != len(vals):
            raise StructureError("utility values must be distinct")
        object.__setattr__(self, "values", vals)

    def __getitem__(self, c: int) -> Fraction:
        return self.values[c]

    def fits(self, prefs: PreferenceOrder) -> bool:
        if len(self.values) != prefs.m:
            return False
        return all(
            self.values[a] > self.values[b]
            for a, b in zip(prefs.order, prefs.order[1:])
        )

    @classmethod
    def default_for(cls, prefs: PreferenceOrder) -> "UtilityScale":
        # u(c) = m - rank(c)
        return cls(tuple(Fraction(prefs.m - prefs.rank(c)) for c in range(prefs.m)))


class Behavior(enum.Enum):
    WEAK_LD = "weak_ld"
    STRICT_LD = "strict_ld"
    WCR = "wcr"

    @property
    def is_ld(self) -> bool:
        return self is not Behavior.WCR


@dataclass(frozen=True)
class VoterType:
    prefs: PreferenceOrder
    r: Fraction = Fraction(0)
    behavior: Behavior = Behavior.STRICT_LD
    utilities: UtilityScale | None = None
    r_schedule: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "r", as_rat(self.r))
        if self.r < 0:
            raise StructureError("uncertainty radius must be nonnegative")
        if self.utilities is not None and not self.utilities.fits(self.prefs):
            raise StructureError("utility scale does not fit the preference order")
        if self.r_schedule is not None:
            sched = tuple(as_rat(x) for x in self.r_schedule)
            if not sched:
                raise StructureError("empty r_schedule")
            if any(b > a for a, b in zip(sched, sched[1:])) or sched[-1] < 0:
                raise StructureError("r_schedule must be nonincreasing and nonnegative")
            object.__setattr__(self, "r_schedule", sched)

    def radius_at(self, t: int) -> Fraction:
        if self.r_schedule is None:
            return self.r
        return self.r_schedule[min(t, len(self.r_schedule) - 1)]

    def utility(self) -> UtilityScale:
        if self.utilities is not None:
            return self.utilities
        return UtilityScale.default_for(self.prefs)


@dataclass(frozen=True)
class ScoreVector:
    """Per-candidate totals plus the realized tie-breaker (best first)."""

    s: tuple[Fraction, ...]
    tiebreak: tuple[int, ...] | None = None

    def __post_init__(self):
        s = tuple(as_rat(x) for x in self.s)
        if any(x < 0 for x in s):
            raise StructureError("scores must be nonnegative")
        object.__setattr__(self, "s", s)
        tb = tuple(range(len(s))) if self.tiebreak is None else tuple(self.tiebreak)
        if sorted(tb) != list(range(len(s))):
            raise StructureError(f"tiebreak is not a permutation: {tb!r}")
        object.__setattr__(self, "tiebreak", tb)

    @property
    def m(self) -> int:
        return len(self.s)

    def __getitem__(self, c: int) -> Fraction:
        return self.s[c]

    def argmax(self) -> frozenset[int]:
        top = max(self.s)
        return frozenset(c for c, x in enumerate(self.s) if x == top)

    def scaled(self, alpha) -> "ScoreVector":
        alpha = as_rat(alpha)
        return ScoreVector(tuple(x * alpha for x in self.s), self.tiebreak)


def winner(s: ScoreVector) -> int:
    """Plurality winner: max score, ties resolved by ``s.tiebreak``."""
    tied = s.argmax()
    for c in s.tiebreak:
        if c in tied:
            return c
    raise AssertionError("unreachable")


def winner_fractional(s: ScoreVector) -> int:
    # tie-breaker as a small fractional bonus; exact only for integer scores
    m = s.m
    pos = {c: k + 1 for k, c in enumerate(s.tiebreak)}
    return max(range(m), key=lambda c: s.s[c] + Fraction(m + 1 - pos[c], m + 1))


@dataclass(frozen=True)
class Population:
    """Strategic voters of a game plus the fixed non-strategic scores.

    Nonatomic populations are stored already split into ε-blocks, so both
    modes share one representation: ``unit_type[k]`` is the type index of
    voter (atomic) or block (nonatomic) ``k``.
    """

    m: int
    types: tuple[VoterType, ...]
    unit_type: tuple[int, ...]
    base_scores: tuple[Fraction, ...]
    epsilon: Fraction | None = None
    tiebreak: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.m < 1:
            raise StructureError("need at least one candidate")
        base = tuple(as_rat(x) for x in self.base_scores)
        if len(base) != self.m or any(x < 0 for x in base):
            raise StructureError("base_scores must be m nonnegative values")
        object.__setattr__(self, "base_scores", base)
        tb = tuple(range(self.m)) if self.tiebreak is None else tuple(self.tiebreak)
        if sorted(tb) != list(range(self.m)):
            raise StructureError("tiebreak is not a permutation")
        object.__setattr__(self, "tiebreak", tb)
        for vt in self.types:
            if vt.prefs.m != self.m:
                raise StructureError("preference order size differs from m")
        if any(not 0 <= k < len(self.types) for k in self.unit_type):
            raise StructureError("unit refers to an unknown type")
        if self.epsilon is not None:
            object.__setattr__(self, "epsilon", as_rat(self.epsilon))
            if self.epsilon <= 0:
                raise StructureError("epsilon must be positive")

    @classmethod
    def atomic(cls, voters: Sequence[VoterType], base_scores=None, tiebreak=None):
        voters = tuple(voters)
        types: list[VoterType] = []
        unit_type = []
        for v in voters:
            if v not in types:
                types.append(v)
            unit_type.append(types.index(v))
        m = voters[0].prefs.m if voters else len(base_scores)
        if base_scores is None:
            base_scores = (0,) * m
        return cls(m, tuple(types), tuple(unit_type), tuple(base_scores), None, tiebreak)

    @classmethod
    def nonatomic(cls, blocks: Sequence[tuple[VoterType, object]], epsilon,
                  base_scores=None, tiebreak=None):
        epsilon = as_rat(epsilon)
        types = []
        unit_type: list[int] = []
        for k, (vt, mass) in enumerate(blocks):
            n = as_rat(mass) / epsilon
            if n.denominator != 1 or n <= 0:
                raise StructureError(
                    f"mass {mass} of block {k} is not a positive multiple of epsilon {epsilon}")
            types.append(vt)
            unit_type.extend([k] * int(n))
        m = types[0].prefs.m if types else len(base_scores)
        if base_scores is None:
            base_scores = (0,) * m
        return cls(m, tuple(types), tuple(unit_type), tuple(base_scores), epsilon, tiebreak)

    @property
    def is_atomic(self) -> bool:
        return self.epsilon is None

    @property
    def n_units(self) -> int:
        return len(self.unit_type)

    @property
    def unit_weight(self) -> Fraction:
        return Fraction(1) if self.epsilon is None else self.epsilon

    def type_of(self, unit: int) -> VoterType:
        return self.types[self.unit_type[unit]]

    def mass_of_type(self, k: int) -> Fraction:
        return self.unit_weight * sum(1 for t in self.unit_type if t == k)


Profile = tuple  # one candidate index per voter (atomic) or ε-block (nonatomic)


def _check_shape(profile: Sequence[int], population: Population):
    if len(profile) != population.n_units:
        raise StructureError(
            f"profile has {len(profile)} votes, population has {population.n_units} units")
    if any(not 0 <= c < population.m for c in profile):
        raise StructureError("profile votes for an unknown candidate")


def scores_of(profile: Sequence[int], population: Population) -> ScoreVector:
    _check_shape(profile, population)
    s = list(population.base_scores)
    w = population.unit_weight
    for c in profile:
        s[c] += w
    return ScoreVector(tuple(s), population.tiebreak)


def truthful_profile(population: Population) -> Profile:
    return tuple(population.type_of(k).prefs.top() for k in range(population.n_units))


def mass_table(profile: Sequence[int], population: Population) -> dict[tuple[int, int], Fraction]:
    """Mass (or head count) per (type index, candidate), zero entries omitted."""
    _check_shape(profile, population)
    counts = Counter(zip(population.unit_type, profile))
    w = population.unit_weight
    return {key: w * n for key, n in sorted(counts.items())}


def is_eps_valid(profile, population: Population) -> bool:
    """Whether every per-(type, candidate) mass is a multiple of epsilon.

    ``profile`` is either a per-block vote tuple or an explicit mass table
    mapping ``(type, candidate)`` to mass.
    """
    if population.is_atomic:
        raise StructureError("epsilon-validity is defined for nonatomic populations only")
    if isinstance(profile, Mapping):
        table = {k: as_rat(v) for k, v in profile.items()}
    else:
        table = mass_table(profile, population)
    return all((mass / population.epsilon).denominator == 1 for mass in table.values())
