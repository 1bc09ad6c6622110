"""Transferable-belief engine over small integer frames.

Frames are the score levels 1..n (n <= 16 so subsets stay exactly enumerable).
Mass functions are immutable maps from frozensets to floats; the empty set may
carry mass under the unnormalized convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

MAX_FRAME = 16
MASS_TOL = 1e-9


class BeliefError(ValueError):
    """Invalid mass function construction or operation."""


class TotalConflictError(BeliefError):
    """Combination or transformation attempted on a fully conflicting mass."""


def _canon(subsets: Iterable[frozenset[int]]) -> list[frozenset[int]]:
    # deterministic iteration order everywhere: by size, then lexicographic
    return sorted(subsets, key=lambda s: (len(s), sorted(s)))


@dataclass(frozen=True)
class MassFunction:
    """Basic belief assignment over subsets of {1..size}."""

    size: int
    masses: Mapping[frozenset[int], float]

    def __post_init__(self) -> None:
        if not 2 <= self.size <= MAX_FRAME:
            raise BeliefError(f"frame size {self.size} outside 2..{MAX_FRAME}")
        clean: dict[frozenset[int], float] = {}
        for subset, v in self.masses.items():
            fs = frozenset(subset)
            if any(not isinstance(x, int) or not 1 <= x <= self.size for x in fs):
                raise BeliefError(f"subset {sorted(fs)} outside the frame")
            if v < 0:
                raise BeliefError(f"negative mass {v} on {sorted(fs)}")
            if v > 0:
                clean[fs] = clean.get(fs, 0.0) + v
        total = sum(clean.values())
        if abs(total - 1.0) > MASS_TOL:
            raise BeliefError(f"masses sum to {total}, not 1")
        object.__setattr__(self, "masses", clean)

    @classmethod
    def vacuous(cls, size: int) -> "MassFunction":
        return cls(size, {frozenset(range(1, size + 1)): 1.0})

    @property
    def frame(self) -> frozenset[int]:
        return frozenset(range(1, self.size + 1))

    def mass(self, subset: Iterable[int]) -> float:
        return self.masses.get(frozenset(subset), 0.0)

    def conflict(self) -> float:
        return self.masses.get(frozenset(), 0.0)

    def focal_sets(self) -> list[frozenset[int]]:
        return _canon(self.masses)

    def is_vacuous(self) -> bool:
        return self.masses.get(self.frame, 0.0) > 1.0 - MASS_TOL


@dataclass(frozen=True)
class ObservationKernel:
    """Possibility of a stated value as a function of distance to the truth."""

    weights: tuple[float, ...] = (1.0, 0.5)

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(self.weights))
        if not self.weights or self.weights[0] != 1.0:
            raise BeliefError("kernel must assign possibility 1 at distance 0")
        for w in self.weights:
            if not 0.0 <= w <= 1.0:
                raise BeliefError("kernel weights must lie in [0, 1]")
        if any(a < b for a, b in zip(self.weights, self.weights[1:])):
            raise BeliefError("kernel weights must be non-increasing")

    def at(self, distance: int) -> float:
        return self.weights[distance] if distance < len(self.weights) else 0.0


def kernel_possibility(lo: int, hi: int, kernel: ObservationKernel,
                       size: int) -> tuple[float, ...]:
    """Numeric possibility contour of the true value given a stated interval."""
    if not 1 <= lo <= hi <= size:
        raise BeliefError(f"interval [{lo}, {hi}] invalid on a frame of {size}")
    return tuple(kernel.at(max(lo - x, x - hi, 0)) for x in range(1, size + 1))


def consonant_bba(pi: Sequence[float]) -> MassFunction:
    """Nested mass function whose contour reproduces the given possibility.

    Focal sets are the distinct upper level cuts; each carries the gap between
    consecutive cut levels.
    """
    size = len(pi)
    if max(pi) != 1.0:
        raise BeliefError("consonant construction requires a normalized contour")
    levels = sorted({v for v in pi if v > 0}, reverse=True)
    masses: dict[frozenset[int], float] = {}
    for idx, t in enumerate(levels):
        cut = frozenset(x for x, v in zip(range(1, size + 1), pi) if v >= t)
        nxt = levels[idx + 1] if idx + 1 < len(levels) else 0.0
        masses[cut] = t - nxt
    return MassFunction(size, masses)


def contour(m: MassFunction) -> tuple[float, ...]:
    """Singleton plausibilities, i.e. pl({x}) for each frame element."""
    return tuple(pl(m, {x}) for x in range(1, m.size + 1))


def discount_factor(g: int, s: int,
                    coefficients: tuple[float, float, float] = (0.95, 0.75, 0.25)) -> float:
    """Discount from rescaled self-confidence g (0..3) and reliability s (1..3).

    The reliability term reaches 1 at the top level, so a fully confident
    statement from a fully trusted source keeps the residual doubt 1 - a.
    Evaluated in exact rationals so spot values like d(3, 3) = 0.05 hold
    exactly in the returned float.
    """
    if not 0 <= g <= 3:
        raise BeliefError(f"rescaled confidence {g} outside 0..3")
    if not 1 <= s <= 3:
        raise BeliefError(f"rescaled reliability {s} outside 1..3")
    a, b, c = (Fraction(str(x)) for x in coefficients)
    t = Fraction(1) if s == 3 else Fraction(s - 1, 3)
    return float(1 - a * Fraction(g, 3) * (b + c * t))


def discount(m: MassFunction, d: float) -> MassFunction:
    """Move a fraction d of every focal mass to the whole frame."""
    if not 0.0 <= d <= 1.0:
        raise BeliefError(f"discount factor {d} outside [0, 1]")
    masses: dict[frozenset[int], float] = {}
    for subset, v in m.masses.items():
        masses[subset] = masses.get(subset, 0.0) + (1.0 - d) * v
    masses[m.frame] = masses.get(m.frame, 0.0) + d
    return MassFunction(m.size, masses)


def combine_conjunctive(m1: MassFunction, m2: MassFunction,
                        mode: str = "unnormalized") -> MassFunction:
    """Product-of-masses over set intersections; Dempster mode renormalizes."""
    if m1.size != m2.size:
        raise BeliefError("mass functions live on different frames")
    if mode not in ("unnormalized", "dempster"):
        raise BeliefError(f"unknown combination mode {mode!r}")
    out: dict[frozenset[int], float] = {}
    for a, va in m1.masses.items():
        for b, vb in m2.masses.items():
            c = a & b
            out[c] = out.get(c, 0.0) + va * vb
    if mode == "dempster":
        k = out.pop(frozenset(), 0.0)
        if k >= 1.0 - MASS_TOL:
            raise TotalConflictError("total conflict: nothing to renormalize")
        out = {subset: v / (1.0 - k) for subset, v in out.items()}
    return MassFunction(m1.size, out)


def goodness_transfer(m: MassFunction, row: Sequence[int],
                      mode: str = "image") -> MassFunction:
    """Push criterion-level masses onto the goodness frame through a score map.

    row[x-1] is the goodness score for criterion score x. "image" transfers a
    set to its elementwise image; "hull" widens the image to the enclosing
    interval, so ignorance about the criterion stays ignorance about goodness.
    """
    if len(row) != m.size:
        raise BeliefError("transfer row must cover the whole frame")
    for y in row:
        if not 1 <= y <= m.size:
            raise BeliefError("transfer row leaves the frame")
    if mode not in ("image", "hull"):
        raise BeliefError(f"unknown transfer mode {mode!r}")
    out: dict[frozenset[int], float] = {}
    for subset, v in m.masses.items():
        img = [row[x - 1] for x in subset]
        if not img:
            target = frozenset()
        elif mode == "image":
            target = frozenset(img)
        else:
            target = frozenset(range(min(img), max(img) + 1))
        out[target] = out.get(target, 0.0) + v
    return MassFunction(m.size, out)


def bel(m: MassFunction, subset: Iterable[int]) -> float:
    a = frozenset(subset)
    return sum(v for b, v in m.masses.items() if b and b <= a)


def pl(m: MassFunction, subset: Iterable[int]) -> float:
    a = frozenset(subset)
    return sum(v for b, v in m.masses.items() if b & a)


def pignistic(m: MassFunction) -> tuple[float, ...]:
    """Split each focal mass evenly over its elements, renormalizing conflict."""
    k = m.conflict()
    if k >= 1.0 - MASS_TOL:
        raise TotalConflictError("total conflict: pignistic probability undefined")
    betp = [0.0] * m.size
    for subset, v in m.masses.items():
        if not subset:
            continue
        share = v / (len(subset) * (1.0 - k))
        for x in subset:
            betp[x - 1] += share
    return tuple(betp)


def expected_score(betp: Sequence[float]) -> float:
    total = sum(betp)
    if abs(total - 1.0) > 1e-6:
        raise BeliefError(f"probabilities sum to {total}, not 1")
    return sum(x * p for x, p in zip(range(1, len(betp) + 1), betp))
