"""Heuristic-gated sampling of the item universe.

A confidence score per item splits the universe into auto-dirty,
auto-clean, and an ambiguous middle band that is worth showing to
workers. Tasks are filled mostly from the ambiguous band, with an
epsilon-randomized escape hatch into the rest of the universe so that
heuristic mistakes can still surface.
"""

import csv
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .core import MalformedInputError

__all__ = [
    "HeuristicPartition",
    "EpsilonPolicy",
    "partition",
    "draw_task",
    "total_with_perfect_heuristic",
    "total_with_imperfect_heuristic",
    "load_scores_csv",
]

DEFAULT_EPSILON = 0.1


@dataclass(frozen=True)
class HeuristicPartition:
    """Item universe split by confidence score against [alpha, beta].

    Scores inside the closed band are ambiguous; above beta the item is
    auto-dirty, below alpha auto-clean.
    """

    scores: np.ndarray
    alpha: float
    beta: float
    ambiguous: tuple[int, ...]
    auto_dirty: tuple[int, ...]
    auto_clean: tuple[int, ...]

    @property
    def universe_size(self) -> int:
        return len(self.scores)

    @cached_property
    def complement(self) -> tuple[int, ...]:
        """Everything outside the ambiguous band, in item order."""
        return tuple(sorted(self.auto_dirty + self.auto_clean))


def partition(scores: Sequence[float], alpha: float, beta: float) -> HeuristicPartition:
    """Split items by score into auto-clean / ambiguous / auto-dirty."""
    if not 0.0 <= alpha <= beta <= 1.0:
        raise ValueError(f"need 0 <= alpha <= beta <= 1, got {alpha}, {beta}")
    arr = np.asarray(scores, dtype=float)
    if arr.ndim != 1:
        raise ValueError("scores must be one-dimensional")
    if len(arr) and (arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError("scores must lie in [0, 1]")
    ambiguous = tuple(int(i) for i in np.flatnonzero((arr >= alpha) & (arr <= beta)))
    auto_dirty = tuple(int(i) for i in np.flatnonzero(arr > beta))
    auto_clean = tuple(int(i) for i in np.flatnonzero(arr < alpha))
    return HeuristicPartition(
        scores=arr,
        alpha=alpha,
        beta=beta,
        ambiguous=ambiguous,
        auto_dirty=auto_dirty,
        auto_clean=auto_clean,
    )


@dataclass
class EpsilonPolicy:
    """Randomized stratum selection: ambiguous with probability 1 - epsilon.

    Owns its PRNG stream; one policy instance per simulation run.
    """

    epsilon: float = DEFAULT_EPSILON
    seed: int = 0
    _rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")
        self._rng = np.random.default_rng(self.seed)

    @property
    def rng(self) -> np.random.Generator:
        return self._rng


def _draw_from(stratum: tuple[int, ...], chosen: set[int], rng) -> int:
    # Rejection sampling; callers guarantee the stratum is not exhausted.
    while True:
        item = stratum[int(rng.integers(len(stratum)))]
        if item not in chosen:
            return item


def draw_task(
    p: HeuristicPartition, policy: EpsilonPolicy, size: int
) -> tuple[int, ...]:
    """Fill one task of `size` distinct items under the epsilon policy.

    Each slot independently targets the ambiguous band with probability
    1 - epsilon (the complement otherwise), then draws uniformly among
    that stratum's items not already in the task. A stratum that is
    empty or exhausted falls back to the other one with a warning.
    """
    if size < 0 or size > p.universe_size:
        raise ValueError(f"task size {size} outside [0, {p.universe_size}]")
    chosen: set[int] = set()
    taken = {True: 0, False: 0}  # draws taken per stratum (True = ambiguous)
    strata = {True: p.ambiguous, False: p.complement}
    warned = False
    picks = []
    for _ in range(size):
        want_ambiguous = policy.rng.random() < 1.0 - policy.epsilon
        if taken[want_ambiguous] >= len(strata[want_ambiguous]):
            if not warned:
                warnings.warn(
                    "requested stratum empty or exhausted; falling back to the other",
                    RuntimeWarning,
                    stacklevel=2,
                )
                warned = True
            want_ambiguous = not want_ambiguous
        item = _draw_from(strata[want_ambiguous], chosen, policy.rng)
        chosen.add(item)
        taken[want_ambiguous] += 1
        picks.append(item)
    return tuple(picks)


def total_with_perfect_heuristic(d_hat_on_rh: float, p: HeuristicPartition) -> float:
    """Total errors when the heuristic is trusted outside the band.

    The estimate over the ambiguous band plus everything auto-dirty.
    """
    return float(d_hat_on_rh) + len(p.auto_dirty)


def total_with_imperfect_heuristic(d_hat_on_r: float) -> float:
    """Total errors when estimation already spanned the whole universe.

    A pass-through; named so result tables record which regime produced
    the figure.
    """
    return float(d_hat_on_r)


def load_scores_csv(path, item_count: int) -> np.ndarray:
    """Load per-item heuristic scores from CSV (header item_id,score)."""
    scores = np.full(item_count, np.nan)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedInputError("missing header row", 1) from None
        if [h.strip() for h in header] != ["item_id", "score"]:
            raise MalformedInputError("header must be item_id,score", 1)
        for line_no, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != 2:
                raise MalformedInputError(f"expected 2 columns, got {len(row)}", line_no)
            try:
                item_id, score = int(row[0]), float(row[1])
            except ValueError:
                raise MalformedInputError(f"bad row {row!r}", line_no) from None
            if not 0 <= item_id < item_count:
                raise MalformedInputError(
                    f"item_id {item_id} outside universe [0, {item_count})", line_no
                )
            scores[item_id] = score
    missing = np.flatnonzero(np.isnan(scores))
    if len(missing):
        raise MalformedInputError(f"missing score for item {int(missing[0])}")
    return scores
