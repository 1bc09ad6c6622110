"""Finite ordinal scales and the exact algebra defined on them.

Everything here is label-based and immutable: a level never carries numeric
semantics beyond its position in its own scale, and values from different
scales only meet through an explicit ScaleMap or a tabulated connective.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Union


class ScaleError(ValueError):
    """Invalid scale, level or map construction."""


class ScaleMismatchError(ScaleError):
    """Operation between levels of different scales without a declared ScaleMap."""


@dataclass(frozen=True)
class OrdinalScale:
    """A named, linearly ordered set of labels, bottom first."""

    name: str
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) < 2:
            raise ScaleError(f"scale {self.name!r} needs at least 2 labels")
        if len(set(self.labels)) != len(self.labels):
            raise ScaleError(f"scale {self.name!r} has duplicate labels")

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator["Level"]:
        return (Level(self, i) for i in range(len(self.labels)))

    def level(self, ref: Union[str, int]) -> "Level":
        """Resolve a label or a 0-based index to a Level."""
        if isinstance(ref, bool):
            raise ScaleError(f"invalid level reference {ref!r}")
        if isinstance(ref, int):
            if not 0 <= ref < len(self.labels):
                raise ScaleError(f"index {ref} out of range for scale {self.name!r}")
            return Level(self, ref)
        try:
            return Level(self, self.labels.index(ref))
        except ValueError:
            raise ScaleError(f"label {ref!r} not on scale {self.name!r}") from None

    @property
    def bottom(self) -> "Level":
        return Level(self, 0)

    @property
    def top(self) -> "Level":
        return Level(self, len(self.labels) - 1)


@dataclass(frozen=True)
class Level:
    """A position on an OrdinalScale."""

    scale: OrdinalScale
    index: int

    def __post_init__(self) -> None:
        if not 0 <= self.index < len(self.scale):
            raise ScaleError(
                f"index {self.index} out of range for scale {self.scale.name!r}")

    @property
    def label(self) -> str:
        return self.scale.labels[self.index]

    def _check(self, other: "Level") -> None:
        if not isinstance(other, Level):
            raise TypeError(f"expected Level, got {type(other).__name__}")
        if other.scale != self.scale:
            raise ScaleMismatchError(
                f"levels on {self.scale.name!r} and {other.scale.name!r} are not "
                f"comparable; declare a ScaleMap between them")

    def __lt__(self, other: "Level") -> bool:
        self._check(other)
        return self.index < other.index

    def __le__(self, other: "Level") -> bool:
        self._check(other)
        return self.index <= other.index

    def __gt__(self, other: "Level") -> bool:
        self._check(other)
        return self.index > other.index

    def __ge__(self, other: "Level") -> bool:
        self._check(other)
        return self.index >= other.index

    def __repr__(self) -> str:
        return f"<{self.label} on {self.scale.name}>"


def neg(x: Level) -> Level:
    """Reversed-scale complement: index k maps to len-1-k."""
    return Level(x.scale, len(x.scale) - 1 - x.index)


def join(x: Level, y: Level) -> Level:
    """Max of two levels of the same scale."""
    x._check(y)
    return x if x.index >= y.index else y


def meet(x: Level, y: Level) -> Level:
    """Min of two levels of the same scale."""
    x._check(y)
    return x if x.index <= y.index else y


def bounded_add(x: Level, y: Level) -> Level:
    """Index addition truncated at the top of the scale."""
    x._check(y)
    return Level(x.scale, min(len(x.scale) - 1, x.index + y.index))


@dataclass(frozen=True)
class ScaleMap:
    """A total, monotone, endpoint-preserving map between two scales.

    Stored as one target index per source index; built from label tables so
    problem files stay index-free.
    """

    source: OrdinalScale
    target: OrdinalScale
    targets: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        if len(self.targets) != len(self.source):
            raise ScaleError(
                f"map {self.source.name!r}->{self.target.name!r} must be total")
        for t in self.targets:
            if not 0 <= t < len(self.target):
                raise ScaleError(
                    f"map {self.source.name!r}->{self.target.name!r} has target "
                    f"index {t} out of range")
        if any(a > b for a, b in zip(self.targets, self.targets[1:])):
            raise ScaleError(
                f"map {self.source.name!r}->{self.target.name!r} is not monotone")
        if self.targets[0] != 0 or self.targets[-1] != len(self.target) - 1:
            raise ScaleError(
                f"map {self.source.name!r}->{self.target.name!r} must send bottom "
                f"to bottom and top to top")

    @classmethod
    def from_labels(cls, source: OrdinalScale, target: OrdinalScale,
                    table: Mapping[str, str]) -> "ScaleMap":
        missing = [lab for lab in source.labels if lab not in table]
        if missing:
            raise ScaleError(
                f"map {source.name!r}->{target.name!r} missing entries for {missing}")
        extra = [lab for lab in table if lab not in source.labels]
        if extra:
            raise ScaleError(
                f"map {source.name!r}->{target.name!r} has unknown source labels {extra}")
        return cls(source, target,
                   tuple(target.level(table[lab]).index for lab in source.labels))

    def apply(self, x: Level) -> Level:
        if x.scale != self.source:
            raise ScaleMismatchError(
                f"map {self.source.name!r}->{self.target.name!r} cannot be applied "
                f"to a level of {x.scale.name!r}")
        return Level(self.target, self.targets[x.index])

    def as_label_table(self) -> dict[str, str]:
        return {lab: self.target.labels[t]
                for lab, t in zip(self.source.labels, self.targets)}


def apply_map(m: ScaleMap, x: Level) -> Level:
    return m.apply(x)


def label_identity_map(source: OrdinalScale, target: OrdinalScale) -> ScaleMap:
    """Map levels by identical labels; requires both scales to share them."""
    return ScaleMap.from_labels(source, target,
                                {lab: lab for lab in source.labels})


@dataclass(frozen=True)
class ConnectiveTable:
    """An explicitly tabulated binary connective between (possibly) distinct scales.

    entries[i][j] is the output index for left index i and right index j.
    """

    name: str
    left: OrdinalScale
    right: OrdinalScale
    output: OrdinalScale
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(tuple(r) for r in self.entries))
        if len(self.entries) != len(self.left):
            raise ScaleError(f"table {self.name!r} must have one row per left label")
        for row in self.entries:
            if len(row) != len(self.right):
                raise ScaleError(
                    f"table {self.name!r} must have one column per right label")
            for v in row:
                if not 0 <= v < len(self.output):
                    raise ScaleError(f"table {self.name!r} entry out of range")

    @classmethod
    def from_labels(cls, name: str, left: OrdinalScale, right: OrdinalScale,
                    output: OrdinalScale,
                    table: Mapping[str, Mapping[str, str]]) -> "ConnectiveTable":
        rows = []
        for llab in left.labels:
            if llab not in table:
                raise ScaleError(f"table {name!r} missing row {llab!r}")
            row = table[llab]
            rows.append(tuple(output.level(row[rlab]).index if rlab in row
                              else _missing(name, llab, rlab)
                              for rlab in right.labels))
        return cls(name, left, right, output, tuple(rows))

    def apply(self, x: Level, y: Level) -> Level:
        if x.scale != self.left or y.scale != self.right:
            raise ScaleMismatchError(
                f"table {self.name!r} expects ({self.left.name!r}, "
                f"{self.right.name!r}), got ({x.scale.name!r}, {y.scale.name!r})")
        return Level(self.output, self.entries[x.index][y.index])

    def as_label_table(self) -> dict[str, dict[str, str]]:
        return {llab: {rlab: self.output.labels[self.entries[i][j]]
                       for j, rlab in enumerate(self.right.labels)}
                for i, llab in enumerate(self.left.labels)}


def _missing(name: str, llab: str, rlab: str) -> int:
    raise ScaleError(f"table {name!r} missing entry ({llab!r}, {rlab!r})")


# The five scales of the worked hiring example, as named fixtures. Users may
# declare scales of any length in their problem files; nothing below is
# special-cased by the engines.
SATISFACTION = OrdinalScale("satisfaction", ("1", "2", "3", "4", "5"))
POSSIBILITY = OrdinalScale("possibility", ("0", "a", "b", "1"))
SELF_CONFIDENCE = OrdinalScale("self_confidence", ("0", "a", "b", "1"))
RELIABILITY = OrdinalScale("reliability", ("0", "r", "s", "1"))
IMPORTANCE = OrdinalScale("importance", ("0", "e", "f", "g", "1"))

_OTIMES_ROWS = {
    "0": {"0": "0", "r": "0", "s": "0", "1": "0"},
    "a": {"0": "0", "r": "a", "s": "a", "1": "a"},
    "b": {"0": "0", "r": "a", "s": "b", "1": "b"},
    "1": {"0": "0", "r": "a", "s": "b", "1": "1"},
}

# Rows are the complemented importance label, columns the raw score; the entry
# is the score the criterion effectively reports under a conjunctive reading.
_VTILDE_ROWS = {
    "0": {"1": "1", "2": "2", "3": "3", "4": "4", "5": "5"},
    "e": {"1": "2", "2": "2", "3": "3", "4": "4", "5": "5"},
    "f": {"1": "3", "2": "3", "3": "3", "4": "4", "5": "5"},
    "g": {"1": "4", "2": "4", "3": "4", "4": "4", "5": "5"},
    "1": {"1": "5", "2": "5", "3": "5", "4": "5", "5": "5"},
}


def standard_otimes(confidence: OrdinalScale = SELF_CONFIDENCE,
                    reliability: OrdinalScale = RELIABILITY) -> ConnectiveTable:
    """Tabulated conjunction of self-confidence and reliability."""
    return ConnectiveTable.from_labels(
        "otimes", confidence, reliability, confidence, _OTIMES_ROWS)


def standard_vtilde(importance: OrdinalScale = IMPORTANCE,
                    score: OrdinalScale = SATISFACTION) -> ConnectiveTable:
    """Tabulated importance lift of a score, keyed by the complemented importance."""
    return ConnectiveTable.from_labels(
        "vtilde", importance, score, score, _VTILDE_ROWS)


def standard_importance_to_score(importance: OrdinalScale = IMPORTANCE,
                                 score: OrdinalScale = SATISFACTION) -> ScaleMap:
    """Rank embedding of the importance scale into the score scale."""
    if len(importance) != len(score):
        raise ScaleError("rank embedding needs scales of equal length")
    return ScaleMap(importance, score, tuple(range(len(score))))
