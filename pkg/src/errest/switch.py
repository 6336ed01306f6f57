"""Consensus-switch counting and the switch-based total-error estimate.

Instead of counting discovered errors, this module counts changes of
the running majority consensus. Each item starts with a clean label;
the label flips when the item's first vote is dirty, and again at every
vote that ties the item's dirty/clean counts (the tie anticipates the
majority crossing). Between flips the label holds, so flips are exactly
the switch events, they strictly alternate per item, and the first one
is always positive (clean to dirty).

Every switch event is a species. A later vote on the same item that
does not flip the label rediscovers the item's latest switch and raises
that event's multiplicity. Votes on an item before its first switch are
no-ops and are excluded from the effective sample size. The resulting
fingerprint feeds the same coverage-based estimate as the discovery
path, and the gap between the estimate and the observed event count is
the number of consensus flips still expected.
"""

from collections import Counter
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import FStatistics, Label, TallyState, VoteLog
from .estimators import EstimatorOutput, InsufficientDataError, chao92, majority

__all__ = [
    "Direction",
    "Trend",
    "SwitchEvent",
    "SwitchStats",
    "ConsensusState",
    "SwitchReplay",
    "TotalErrorEstimate",
    "FALLBACK_MAJORITY",
    "replay_switches",
    "switch_count",
    "switch_fstats",
    "d_switch",
    "remaining_switches",
    "switch_total_errors",
]

FALLBACK_MAJORITY = "fallback-majority"


class Direction(Enum):
    """Sense of a consensus flip: positive is clean-to-dirty."""

    POSITIVE = "positive"
    NEGATIVE = "negative"


class Trend(Enum):
    """Recent movement of the strict-majority count."""

    INCREASING = "increasing"
    DECREASING = "decreasing"
    FLAT = "flat"


@dataclass(frozen=True)
class SwitchEvent:
    """One consensus flip and the votes that re-confirmed it.

    multiplicity counts the flipping vote itself plus every later vote
    on the item before its next flip (or the end of the log).
    """

    item_id: int
    seq: int
    direction: Direction
    multiplicity: int


@dataclass(frozen=True)
class SwitchStats:
    """All switch events of a log prefix plus the adjusted sample size."""

    events: tuple[SwitchEvent, ...]
    c_switch: int
    f_prime: dict[int, int]
    n_switch: int


@dataclass(frozen=True)
class ConsensusState:
    """Per-item snapshot of the running consensus and its vote counts."""

    pos: np.ndarray
    neg: np.ndarray
    dirty: np.ndarray


class SwitchReplay:
    """Incremental single-pass switch detector over an arriving vote stream."""

    def __init__(self, item_count: int):
        self.item_count = item_count
        self._pos = np.zeros(item_count, dtype=np.int64)
        self._neg = np.zeros(item_count, dtype=np.int64)
        self._dirty = np.zeros(item_count, dtype=bool)
        self._latest = np.full(item_count, -1, dtype=np.int64)
        self._ev_item: list[int] = []
        self._ev_seq: list[int] = []
        self._ev_dir: list[Direction] = []
        self._ev_mult: list[int] = []
        self._total_votes = 0
        self._noops = 0

    def apply(self, item_id: int, label: Label, seq: int) -> bool:
        """Fold in one vote; returns True when it flips the consensus."""
        if label is Label.DIRTY:
            self._pos[item_id] += 1
        else:
            self._neg[item_id] += 1
        self._total_votes += 1
        pos, neg = self._pos[item_id], self._neg[item_id]
        flips = (pos + neg == 1 and label is Label.DIRTY) or (pos == neg)
        if flips:
            self._dirty[item_id] = not self._dirty[item_id]
            self._ev_item.append(item_id)
            self._ev_seq.append(seq)
            self._ev_dir.append(
                Direction.POSITIVE if self._dirty[item_id] else Direction.NEGATIVE
            )
            self._ev_mult.append(1)
            self._latest[item_id] = len(self._ev_item) - 1
        elif self._latest[item_id] >= 0:
            self._ev_mult[self._latest[item_id]] += 1
        else:
            self._noops += 1
        return flips

    def snapshot(self) -> SwitchStats:
        events = tuple(
            SwitchEvent(item_id=i, seq=s, direction=d, multiplicity=m)
            for i, s, d, m in zip(self._ev_item, self._ev_seq, self._ev_dir, self._ev_mult)
        )
        return SwitchStats(
            events=events,
            c_switch=len(events),
            f_prime=dict(Counter(self._ev_mult)),
            n_switch=self._total_votes - self._noops,
        )

    def state(self) -> ConsensusState:
        return ConsensusState(self._pos.copy(), self._neg.copy(), self._dirty.copy())

    @property
    def pos(self) -> np.ndarray:
        """Per-item dirty-vote counts so far; treat as read-only."""
        return self._pos

    @property
    def neg(self) -> np.ndarray:
        """Per-item clean-vote counts so far; treat as read-only."""
        return self._neg

    @property
    def consensus_dirty(self) -> np.ndarray:
        return self._dirty


def replay_switches(log: VoteLog, upto_seq: int | None = None) -> SwitchStats:
    """Detect all switch events in the prefix votes[0:upto_seq)."""
    upto = len(log) if upto_seq is None else upto_seq
    replay = SwitchReplay(log.item_count)
    for v in log.votes[:upto]:
        replay.apply(v.item_id, v.label, v.seq)
    return replay.snapshot()


def switch_count(stats: SwitchStats) -> int:
    """Number of consensus flips observed so far."""
    return stats.c_switch


def switch_fstats(stats: SwitchStats, direction: Direction | None = None) -> FStatistics:
    """Fingerprint of switch-event multiplicities, optionally one-sided.

    The sample size stays the global adjusted vote count regardless of
    the direction filter: confirming votes back the current consensus
    whichever way it last flipped.
    """
    if direction is None:
        freq = dict(stats.f_prime)
    else:
        freq = dict(
            Counter(e.multiplicity for e in stats.events if e.direction is direction)
        )
    return FStatistics(freq=freq, n=stats.n_switch, c=sum(freq.values()))


def d_switch(f: FStatistics, universe: int | None = None) -> EstimatorOutput:
    """Total-switch estimate: the coverage form applied to switch statistics."""
    if f.n == 0 and f.c > 0:
        raise InsufficientDataError("switch fingerprint has events but no sample")
    return chao92(f, universe=universe)


def remaining_switches(
    stats: SwitchStats,
    direction: Direction | None = None,
    universe: int | None = None,
) -> float:
    """Expected consensus flips not yet observed, clamped at zero."""
    f = switch_fstats(stats, direction)
    if f.c == 0:
        return 0.0
    est = d_switch(f, universe=universe)
    return max(est.total_errors_hat - f.c, 0.0)


@dataclass(frozen=True)
class TotalErrorEstimate:
    """A switch-corrected total-error figure with degeneracy markers."""

    value: float
    flags: tuple[str, ...] = ()


def switch_total_errors(
    t: TallyState, stats: SwitchStats, trend: Trend
) -> TotalErrorEstimate:
    """Adjust the strict-majority count by the expected remaining flips.

    A rising majority count means undiscovered errors dominate, so only
    the positive-flip estimate is added; a falling one subtracts the
    negative-flip estimate; a flat majority applies both. If a needed
    one-sided estimate is unavailable the majority count stands, flagged
    FALLBACK_MAJORITY. The result is clamped to [0, item_count].
    """
    m = majority(t)
    universe = t.item_count
    try:
        if trend is Trend.INCREASING:
            value = m + remaining_switches(stats, Direction.POSITIVE, universe)
        elif trend is Trend.DECREASING:
            value = m - remaining_switches(stats, Direction.NEGATIVE, universe)
        else:
            value = (
                m
                + remaining_switches(stats, Direction.POSITIVE, universe)
                - remaining_switches(stats, Direction.NEGATIVE, universe)
            )
    except InsufficientDataError:
        return TotalErrorEstimate(float(m), flags=(FALLBACK_MAJORITY,))
    return TotalErrorEstimate(min(max(value, 0.0), float(universe)))
