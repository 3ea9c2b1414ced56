"""Weekly training labels: boom, bust, play-with-hidden-injury, meaningful.

Boom and bust thresholds are one population standard deviation above the
mean of ownership- and projection-weighted score differences, computed over
season-wide qualifying samples. Injury/meaningful labels gate on the 15%
scoring rule and the weekly injury report status.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

POSITIONS = ("QB", "RB", "WR", "TE", "K", "DST")
INJURY_STATUSES = ("questionable", "probable", "out", "not_listed")

AS_PRINTED = "as_printed"
INVERTED = "inverted"

MEANINGFUL_FRACTION = 0.15
DEFAULT_MIN_OWNED = 10.0


class LabelingError(ValueError):
    pass


class EmptySampleError(LabelingError):
    pass


@dataclass(frozen=True)
class WeeklyStat:
    player_id: str
    week: int
    position: str
    actual: float
    projected: float
    perowned: float

    def __post_init__(self) -> None:
        if self.position not in POSITIONS:
            raise LabelingError(f"unknown position {self.position!r}")
        if not self.projected > 0:
            raise LabelingError(f"projected must be > 0, got {self.projected}")
        if not (0.0 <= self.perowned <= 100.0):
            raise LabelingError(f"perowned must be in [0, 100], got {self.perowned}")
        if not math.isfinite(self.actual):
            raise LabelingError("actual must be finite")


@dataclass(frozen=True)
class PlayerSigma:
    player_id: str
    sigma: float
    insufficient: bool = False


@dataclass(frozen=True)
class InjuryReport:
    player_id: str
    week: int
    status: str

    def __post_init__(self) -> None:
        if self.status not in INJURY_STATUSES:
            raise LabelingError(f"unknown injury status {self.status!r}")


@dataclass(frozen=True)
class Threshold:
    mu: float
    sigma: float
    sample_size: int


@dataclass(frozen=True)
class LabelSet:
    player_id: str
    week: int
    boom: bool
    bust: bool
    play_with_injury: bool
    meaningful: bool


def boom_statistic(stat: WeeklyStat) -> float:
    """Score over-performance weighted down by ownership popularity."""
    if stat.perowned <= 0:
        raise LabelingError("perowned must be > 0 for the boom statistic")
    return (stat.actual - stat.projected) / stat.perowned**0.1


def bust_statistic(stat: WeeklyStat) -> float:
    """Relative under-performance scaled by the square root of the projection."""
    if stat.projected <= 0:
        raise LabelingError("projected must be > 0 for the bust statistic")
    return (stat.actual - stat.projected) / stat.projected * math.sqrt(stat.projected)


def compute_player_sigmas(stats: Iterable[WeeklyStat]) -> dict[str, PlayerSigma]:
    """Population standard deviation of each player's actual scores.

    Players with fewer than 2 observations are flagged insufficient and are
    excluded from threshold samples.
    """
    by_player: dict[str, list[float]] = {}
    for s in stats:
        by_player.setdefault(s.player_id, []).append(s.actual)
    out = {}
    for pid in sorted(by_player):
        values = by_player[pid]
        if len(values) < 2:
            out[pid] = PlayerSigma(pid, 0.0, insufficient=True)
        else:
            mean = sum(values) / len(values)
            var = sum((v - mean) ** 2 for v in values) / len(values)
            out[pid] = PlayerSigma(pid, math.sqrt(var))
    return out


def _population_moments(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    mu = sum(values) / n
    var = sum((v - mu) ** 2 for v in values) / n
    return mu, math.sqrt(var)


def boom_threshold(
    stats: Sequence[WeeklyStat],
    sigmas: Mapping[str, PlayerSigma],
    min_owned: float = DEFAULT_MIN_OWNED,
) -> Threshold:
    """Mean and population std of the boom statistic over qualifying weeks:
    actual more than one player-sigma above projection, ownership >= 10%."""
    sample = []
    for s in stats:
        ps = sigmas.get(s.player_id)
        if ps is None or ps.insufficient:
            continue
        if s.actual > s.projected + ps.sigma and s.perowned >= min_owned:
            sample.append(boom_statistic(s))
    if not sample:
        raise EmptySampleError("no qualifying boom samples")
    mu, sigma = _population_moments(sample)
    return Threshold(mu, sigma, len(sample))


def bust_threshold(
    stats: Sequence[WeeklyStat],
    sigmas: Mapping[str, PlayerSigma],
) -> Threshold:
    """Mean and population std of the bust statistic over weeks where the
    actual fell more than one player-sigma below projection."""
    sample = []
    for s in stats:
        ps = sigmas.get(s.player_id)
        if ps is None or ps.insufficient:
            continue
        if s.actual < s.projected - ps.sigma:
            sample.append(bust_statistic(s))
    if not sample:
        raise EmptySampleError("no qualifying bust samples")
    mu, sigma = _population_moments(sample)
    return Threshold(mu, sigma, len(sample))


def label_boom(x: float, t: Threshold) -> bool:
    return x >= t.mu + t.sigma


def label_bust(x: float, t: Threshold, direction: str = AS_PRINTED) -> bool:
    """Bust decision; ``as_printed`` flags the upper tail exactly as the
    source formula reads, ``inverted`` flags the lower tail."""
    if direction == AS_PRINTED:
        return x >= t.mu + t.sigma
    if direction == INVERTED:
        return x <= t.mu - t.sigma
    raise LabelingError(f"unknown direction {direction!r}")


def label_injury(stat: WeeklyStat, report: InjuryReport | None) -> bool:
    if report is None or report.status not in ("questionable", "probable"):
        return False
    return stat.actual > MEANINGFUL_FRACTION * stat.projected


def label_meaningful(stat: WeeklyStat, report: InjuryReport | None) -> bool:
    status = report.status if report is not None else "not_listed"
    if status not in ("probable", "not_listed"):
        return False
    return stat.actual > MEANINGFUL_FRACTION * stat.projected


def generate_labels(
    stats: Sequence[WeeklyStat],
    reports: Iterable[InjuryReport] = (),
    sigmas: Mapping[str, PlayerSigma] | None = None,
    min_owned: float = DEFAULT_MIN_OWNED,
    bust_direction: str = AS_PRINTED,
) -> list[LabelSet]:
    """Label every player-week against season-wide thresholds."""
    if sigmas is None:
        sigmas = compute_player_sigmas(stats)
    t_boom = boom_threshold(stats, sigmas, min_owned)
    t_bust = bust_threshold(stats, sigmas)
    report_map = {(r.player_id, r.week): r for r in reports}
    labels = []
    for s in sorted(stats, key=lambda s: (s.player_id, s.week)):
        report = report_map.get((s.player_id, s.week))
        labels.append(
            LabelSet(
                player_id=s.player_id,
                week=s.week,
                boom=label_boom(boom_statistic(s), t_boom),
                bust=label_bust(bust_statistic(s), t_bust, bust_direction),
                play_with_injury=label_injury(s, report),
                meaningful=label_meaningful(s, report),
            )
        )
    return labels


# --- file formats ---

def load_stats(path: str | Path) -> list[WeeklyStat]:
    """``player_id,week,position,actual,projected,perowned`` rows."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "player_id":
                continue
            pid, week, pos, actual, projected, perowned = row
            out.append(WeeklyStat(pid, int(week), pos, float(actual), float(projected), float(perowned)))
    return out


def save_stats(stats: Iterable[WeeklyStat], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["player_id", "week", "position", "actual", "projected", "perowned"])
        for s in sorted(stats, key=lambda s: (s.player_id, s.week)):
            writer.writerow([s.player_id, s.week, s.position, repr(s.actual), repr(s.projected), repr(s.perowned)])


def load_injuries(path: str | Path) -> list[InjuryReport]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "player_id":
                continue
            pid, week, status = row
            out.append(InjuryReport(pid, int(week), status))
    return out


def save_injuries(reports: Iterable[InjuryReport], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["player_id", "week", "status"])
        for r in sorted(reports, key=lambda r: (r.player_id, r.week)):
            writer.writerow([r.player_id, r.week, r.status])


def save_labels(labels: Iterable[LabelSet], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["player_id", "week", "boom", "bust", "injury", "meaningful"])
        for l in sorted(labels, key=lambda l: (l.player_id, l.week)):
            writer.writerow(
                [l.player_id, l.week, int(l.boom), int(l.bust), int(l.play_with_injury), int(l.meaningful)]
            )


def load_labels(path: str | Path) -> list[LabelSet]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "player_id":
                continue
            pid, week, boom, bust, injury, meaningful = row
            out.append(LabelSet(pid, int(week), bool(int(boom)), bool(int(bust)), bool(int(injury)), bool(int(meaningful))))
    return out
