"""Qualitative possibility engine: ordinal distributions over scores.

Distributions map a score scale into a possibility scale. Fusion of sources,
renormalization, importance-weighted aggregation, profile matching and
dominance ranking all stay inside the ordinal algebra of `scales`.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .scales import (ConnectiveTable, Level, OrdinalScale, ScaleMap,
                     ScaleMismatchError, neg)


class DistributionError(ValueError):
    """Invalid distribution construction or operation."""


@dataclass(frozen=True)
class PossibilityDistribution:
    """One possibility level per score level; immutable."""

    domain: OrdinalScale
    codomain: OrdinalScale
    values: tuple[int, ...]  # codomain indices, one per domain level

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) != len(self.domain):
            raise DistributionError("exactly one value per domain level required")
        for v in self.values:
            if not 0 <= v < len(self.codomain):
                raise DistributionError("possibility value out of codomain range")

    @classmethod
    def from_labels(cls, domain: OrdinalScale, codomain: OrdinalScale,
                    labels: Sequence[str]) -> "PossibilityDistribution":
        return cls(domain, codomain,
                   tuple(codomain.level(lab).index for lab in labels))

    def value(self, score: Level) -> Level:
        if score.scale != self.domain:
            raise ScaleMismatchError("score is not on the distribution domain")
        return Level(self.codomain, self.values[score.index])

    def labels(self) -> tuple[str, ...]:
        return tuple(self.codomain.labels[v] for v in self.values)

    def is_normalized(self) -> bool:
        return max(self.values) == len(self.codomain) - 1

    def _same_shape(self, other: "PossibilityDistribution") -> None:
        if self.domain != other.domain or self.codomain != other.codomain:
            raise ScaleMismatchError("distributions live on different scales")


def from_interval(lo: Level, hi: Level, codomain: OrdinalScale) -> PossibilityDistribution:
    """Crisp distribution: top inside [lo, hi], bottom outside.

    A blank opinion is the full interval, i.e. the vacuous distribution.
    """
    lo._check(hi)
    if lo.index > hi.index:
        raise DistributionError(
            f"empty interval [{lo.label}, {hi.label}] on {lo.scale.name!r}")
    top = len(codomain) - 1
    return PossibilityDistribution(
        lo.scale, codomain,
        tuple(top if lo.index <= k <= hi.index else 0 for k in range(len(lo.scale))))


def vacuous(domain: OrdinalScale, codomain: OrdinalScale) -> PossibilityDistribution:
    return PossibilityDistribution(domain, codomain,
                                   (len(codomain) - 1,) * len(domain))


def discount_self_confidence(pi: PossibilityDistribution, gamma: Level,
                             gamma_to_possibility: ScaleMap) -> PossibilityDistribution:
    """Open the distribution up to the complement of the source's confidence."""
    floor = gamma_to_possibility.apply(neg(gamma))
    if floor.scale != pi.codomain:
        raise ScaleMismatchError("confidence map must land on the possibility scale")
    return PossibilityDistribution(
        pi.domain, pi.codomain, tuple(max(v, floor.index) for v in pi.values))


def source_weight(gamma: Level, alpha: Level, otimes: ConnectiveTable) -> Level:
    return otimes.apply(gamma, alpha)


def fuse_disjunctive(
        sources: Sequence[tuple[PossibilityDistribution, Level]]) -> PossibilityDistribution:
    """Weighted disjunction: pointwise max of weight-capped sources."""
    if not sources:
        raise DistributionError("cannot fuse an empty source list")
    first = sources[0][0]
    for pi, w in sources:
        first._same_shape(pi)
        if w.scale != pi.codomain:
            raise ScaleMismatchError("fusion weight must be on the possibility scale")
    return PossibilityDistribution(
        first.domain, first.codomain,
        tuple(max(min(w.index, pi.values[k]) for pi, w in sources)
              for k in range(len(first.domain))))


def fuse_conjunctive_min(
        sources: Sequence[tuple[PossibilityDistribution, Level]]) -> PossibilityDistribution:
    """Prioritized conjunction: pointwise min of (complemented weight or source)."""
    if not sources:
        raise DistributionError("cannot fuse an empty source list")
    first = sources[0][0]
    for pi, w in sources:
        first._same_shape(pi)
        if w.scale != pi.codomain:
            raise ScaleMismatchError("fusion weight must be on the possibility scale")
    top = len(first.codomain) - 1
    return PossibilityDistribution(
        first.domain, first.codomain,
        tuple(min(max(top - w.index, pi.values[k]) for pi, w in sources)
              for k in range(len(first.domain))))


def height(pi: PossibilityDistribution) -> Level:
    return Level(pi.codomain, max(pi.values))


def normalize(pi: PossibilityDistribution, mode: str = "shift") -> PossibilityDistribution:
    """Restore height to the top by bounded addition of the height deficit.

    "shift" moves the whole profile up; "preserve-bottom" keeps impossible
    scores impossible (and rejects the all-bottom distribution, which has no
    possible score left to promote).
    """
    if mode not in ("shift", "preserve-bottom"):
        raise DistributionError(f"unknown normalization mode {mode!r}")
    h = max(pi.values)
    deficit = (len(pi.codomain) - 1) - h
    top = len(pi.codomain) - 1
    if mode == "preserve-bottom" and h == 0:
        raise DistributionError(
            "all-bottom distribution cannot be normalized while preserving bottoms")
    out = []
    for v in pi.values:
        if mode == "preserve-bottom" and v == 0:
            out.append(0)
        else:
            out.append(min(top, v + deficit))
    return PossibilityDistribution(pi.domain, pi.codomain, tuple(out))


def _lift_rank(beta: Level, importance_to_score: ScaleMap) -> int:
    return importance_to_score.apply(neg(beta)).index


def aggregate_crisp(scores: Sequence[Level], importances: Sequence[Level],
                    variant: str, vtilde: ConnectiveTable,
                    importance_to_score: ScaleMap) -> Level:
    """Conjunctive multi-criteria aggregation of precise scores.

    "lift" raises each score by the tabulated connective before taking the
    minimum; "threshold" treats the importance as a score level to reach for
    full satisfaction.
    """
    if len(scores) != len(importances):
        raise DistributionError("scores and importances must align")
    if not scores:
        raise DistributionError("cannot aggregate an empty criteria list")
    score_scale = scores[0].scale
    out = len(score_scale) - 1
    for c, b in zip(scores, importances):
        if c.scale != score_scale:
            raise ScaleMismatchError("scores must share one scale")
        if variant == "lift":
            term = vtilde.apply(neg(b), c).index
        elif variant == "threshold":
            thr = importance_to_score.apply(b).index
            term = len(score_scale) - 1 if c.index >= thr else c.index
        else:
            raise DistributionError(f"unknown aggregation variant {variant!r}")
        out = min(out, term)
    return Level(score_scale, out)


def aggregate_extension(pis: Sequence[PossibilityDistribution],
                        importances: Sequence[Level], variant: str,
                        vtilde: ConnectiveTable,
                        importance_to_score: ScaleMap) -> PossibilityDistribution:
    """Extension-principle image of the crisp aggregation.

    Reference algorithm: exhaustive enumeration of all score tuples.
    """
    if not pis:
        raise DistributionError("cannot aggregate an empty criteria list")
    first = pis[0]
    for pi in pis:
        first._same_shape(pi)
    if len(pis) != len(importances):
        raise DistributionError("distributions and importances must align")
    domain = first.domain
    out = [0] * len(domain)
    for tup in product(range(len(domain)), repeat=len(pis)):
        poss = min(pi.values[k] for pi, k in zip(pis, tup))
        if poss == 0:
            continue
        s = aggregate_crisp([Level(domain, k) for k in tup], importances,
                            variant, vtilde, importance_to_score)
        if poss > out[s.index]:
            out[s.index] = poss
    return PossibilityDistribution(domain, first.codomain, tuple(out))


def aggregate_pointwise_min(pis: Sequence[PossibilityDistribution],
                            floors: Sequence[Level]) -> PossibilityDistribution:
    """Importance-weighted min acting on possibility values, not on scores.

    Each criterion contributes max(floor_i, pi_i(s)) and the criteria are
    intersected pointwise. This is the aggregation under which conjunctive
    fusion and aggregation commute; the floors live on the possibility scale.
    """
    if not pis:
        raise DistributionError("cannot aggregate an empty criteria list")
    first = pis[0]
    for pi in pis:
        first._same_shape(pi)
    for f in floors:
        if f.scale != first.codomain:
            raise ScaleMismatchError("floors must be on the possibility scale")
    return PossibilityDistribution(
        first.domain, first.codomain,
        tuple(min(max(f.index, pi.values[k]) for pi, f in zip(pis, floors))
              for k in range(len(first.domain))))


@dataclass(frozen=True)
class SatisfactionProfile:
    """How satisfied the decision maker is with each score of one criterion."""

    domain: OrdinalScale
    values: tuple[int, ...]  # satisfaction expressed on the score scale itself

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) != len(self.domain):
            raise DistributionError("exactly one value per score required")
        for v in self.values:
            if not 0 <= v < len(self.domain):
                raise DistributionError("profile value out of range")
        if any(a > b for a, b in zip(self.values, self.values[1:])):
            raise DistributionError("profile must be monotone non-decreasing")


def build_profile(beta: Level, score_scale: OrdinalScale,
                  importance_to_score: ScaleMap) -> SatisfactionProfile:
    """Profile floor-bounded by the complemented importance: higher is better."""
    floor = importance_to_score.apply(neg(beta)).index
    return SatisfactionProfile(
        score_scale, tuple(max(k, floor) for k in range(len(score_scale))))


def match_certainty(profiles: Sequence[SatisfactionProfile],
                    pis: Sequence[PossibilityDistribution],
                    score_to_possibility: ScaleMap) -> Level:
    """Degree to which the candidate certainly satisfies all profiles."""
    if len(profiles) != len(pis) or not pis:
        raise DistributionError("profiles and distributions must align")
    codomain = pis[0].codomain
    top = len(codomain) - 1
    out = top
    for mu, pi in zip(profiles, pis):
        if not pi.is_normalized():
            raise DistributionError(
                "certainty of match requires normalized distributions")
        for k in range(len(pi.domain)):
            sat = score_to_possibility.apply(Level(mu.domain, mu.values[k])).index
            out = min(out, max(sat, top - pi.values[k]))
    return Level(codomain, out)


def match_possibility(profiles: Sequence[SatisfactionProfile],
                      pis: Sequence[PossibilityDistribution],
                      score_to_possibility: ScaleMap) -> Level:
    """Degree to which the candidate possibly satisfies all profiles."""
    if len(profiles) != len(pis) or not pis:
        raise DistributionError("profiles and distributions must align")
    codomain = pis[0].codomain
    out = len(codomain) - 1
    for mu, pi in zip(profiles, pis):
        best = 0
        for k in range(len(pi.domain)):
            sat = score_to_possibility.apply(Level(mu.domain, mu.values[k])).index
            best = max(best, min(sat, pi.values[k]))
        out = min(out, best)
    return Level(codomain, out)


def rank(pi1: PossibilityDistribution,
         pi2: PossibilityDistribution) -> tuple[Level, Level]:
    """Possibility and necessity that the first score is at least the second."""
    pi1._same_shape(pi2)
    top = len(pi1.codomain) - 1
    poss = 0
    against = 0
    for i in range(len(pi1.domain)):
        for j in range(len(pi2.domain)):
            v = min(pi1.values[i], pi2.values[j])
            if i >= j:
                poss = max(poss, v)
            else:
                against = max(against, v)
    return Level(pi1.codomain, poss), Level(pi1.codomain, top - against)
