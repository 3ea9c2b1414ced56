"""Deterministic synthetic-world generator.

Builds a roster, a news corpus with planted entity mentions and tone words,
gold annotations with exact character offsets, and weekly stats calibrated by
grid search so the labeling rules reproduce configured boom/bust rates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path
from typing import Sequence

import numpy as np

from .annotation import (
    Dictionary,
    EntitySpan,
    EntityType,
    save_dictionaries,
    save_gold_corpus,
)
from .corpus import Document, DocumentStore, week_window
from .insights import PlayerBio
from .labeling import (
    AS_PRINTED,
    POSITIONS,
    EmptySampleError,
    InjuryReport,
    LabelSet,
    WeeklyStat,
    generate_labels,
    save_injuries,
    save_labels,
    save_stats,
)

DEFAULT_SEASON_START = date(2018, 9, 4)

# knob grids for the calibration search
_BIAS_GRID = [round(c, 2) for c in np.arange(1.5, 5.51, 0.1)]
_BIG_DIP_GRID = [float(d) for d in np.arange(20.0, 100.1, 2.0)]

_NOISE_SIGMA = 1.5
_MODERATE_DIP = 12.0
_DIP_PROB = 0.10
_BIG_DIP_SHARE = 0.1
_RATE_TOLERANCE = 0.02
_MIN_CALIBRATION_ROWS = 200

_SURNAME_HEADS = ("bar", "cal", "dor", "fen", "gar", "hol", "jur", "kel", "mor", "nor")
_SURNAME_TAILS = ("beck", "dane", "ford", "gate", "lock", "mund", "rick", "son", "ton", "wick")
_MASCOT_HEADS = ("griz", "tal", "rap", "storm", "iron", "thun", "vor", "wol", "crag", "pyre")
_MASCOT_TAILS = ("hawks", "jackals", "lynxes", "bisons", "herons", "vipers", "drakes", "owls", "stags", "moles")

_FILLER = ("the", "week", "matchup", "report", "start", "sit", "points", "update", "outlook", "analysis")

_POSITIVE_TONE = ("stellar", "dominant", "explosive", "clutch", "blazing")
_NEGATIVE_TONE = ("dismal", "sputtering", "listless", "woeful", "shaky")

_EXTRA_PHRASES = (
    (EntityType.injury, "sprain"),
    (EntityType.body_part, "hamstring"),
    (EntityType.treatment, "rehab"),
    (EntityType.performance_metric, "touchdowns"),
    (EntityType.location, "foxborough"),
    (EntityType.coach, "head coach"),
    (EntityType.fans, "faithful"),
    (EntityType.gear, "cleats"),
    (EntityType.injury, "strain"),
    (EntityType.body_part, "ankle"),
    (EntityType.treatment, "surgery"),
    (EntityType.performance_metric, "yardage"),
)

_DICTIONARY_TERMS = {
    EntityType.body_part: ("hamstring", "ankle", "shoulder", "knee"),
    EntityType.coach: ("head coach",),
    EntityType.fans: ("faithful", "crowd"),
    EntityType.gear: ("cleats", "helmet"),
    EntityType.injury: ("sprain", "strain", "contusion"),
    EntityType.location: ("foxborough", "lambeau", "arrowhead"),
    EntityType.player_status: ("questionable", "probable", "out", "doubtful"),
    EntityType.treatment: ("surgery", "rehab", "mri"),
    EntityType.positive_tone: _POSITIVE_TONE,
    EntityType.negative_tone: _NEGATIVE_TONE,
    EntityType.performance_metric: ("touchdowns", "yardage", "receptions"),
}


class SynthError(ValueError):
    pass


class InfeasibleTargets(SynthError):
    pass


@dataclass(frozen=True)
class WorldConfig:
    player_count: int = 50
    team_count: int = 10
    weeks: int = 10
    docs_per_player_week: int = 4
    boom_rate: float = 0.14
    bust_rate: float = 0.30
    tone_accuracy: float = 0.8
    seed: int = 0
    season_start: date = DEFAULT_SEASON_START

    def __post_init__(self) -> None:
        if min(self.player_count, self.team_count, self.weeks, self.docs_per_player_week) < 1:
            raise SynthError("counts must be positive")
        for name in ("boom_rate", "bust_rate", "tone_accuracy"):
            if not (0.0 < getattr(self, name) < 1.0):
                raise SynthError(f"{name} must be in (0, 1)")
        if self.player_count > len(_SURNAME_HEADS) * len(_SURNAME_TAILS):
            raise SynthError("player_count exceeds the unique-surname pool")
        if self.team_count > len(_MASCOT_HEADS) * len(_MASCOT_TAILS):
            raise SynthError("team_count exceeds the unique-mascot pool")


@dataclass
class World:
    config: WorldConfig
    players: list[PlayerBio]
    teams: list[str]
    documents: list[Document]
    gold: dict[str, list[EntitySpan]]
    dictionaries: list[Dictionary]
    stats: list[WeeklyStat]
    injuries: list[InjuryReport]
    labels: list[LabelSet]
    realized_boom_rate: float
    realized_bust_rate: float
    projection_bias: float
    big_dip: float


def _surname(i: int) -> str:
    return _SURNAME_HEADS[i % len(_SURNAME_HEADS)] + _SURNAME_TAILS[i // len(_SURNAME_HEADS)]


def _mascot(i: int) -> str:
    return _MASCOT_HEADS[i % len(_MASCOT_HEADS)] + _MASCOT_TAILS[i // len(_MASCOT_HEADS)]


@dataclass
class _Draws:
    """Pre-drawn randomness so calibration knobs can be swept deterministically."""

    base: np.ndarray  # per player
    z: np.ndarray  # per player-week
    dip: np.ndarray  # bool, per player-week
    big: np.ndarray  # bool, per player-week (applies on dip weeks)
    perowned: np.ndarray  # per player-week


def _draw_randomness(config: WorldConfig, rng: np.random.Generator) -> _Draws:
    shape = (config.player_count, config.weeks)
    draws = _Draws(
        base=rng.uniform(10.0, 20.0, size=config.player_count),
        z=rng.standard_normal(shape),
        dip=rng.random(shape) < _DIP_PROB,
        big=rng.random(shape) < _BIG_DIP_SHARE,
        perowned=rng.uniform(15.0, 95.0, size=shape),
    )
    if not draws.dip.any():
        # tiny worlds can miss dips entirely; force one so the bust
        # threshold sample is never empty
        draws.dip[-1, -1] = True
        draws.big[-1, -1] = True
    return draws


def _stats_for(
    config: WorldConfig, players: Sequence[PlayerBio], draws: _Draws, bias: float, big_dip: float
) -> list[WeeklyStat]:
    stats = []
    for i, player in enumerate(players):
        base = float(draws.base[i])
        projected = base - bias * _NOISE_SIGMA
        for w in range(config.weeks):
            if draws.dip[i, w]:
                dip = big_dip if draws.big[i, w] else _MODERATE_DIP
                actual = base - dip
            else:
                actual = base + _NOISE_SIGMA * float(draws.z[i, w])
            stats.append(
                WeeklyStat(
                    player_id=player.player_id,
                    week=w + 1,
                    position=player.position,
                    actual=float(actual),
                    projected=float(projected),
                    perowned=float(draws.perowned[i, w]),
                )
            )
    return stats


def _label_rates(labels: Sequence[LabelSet]) -> tuple[float, float]:
    n = len(labels)
    return (
        sum(l.boom for l in labels) / n,
        sum(l.bust for l in labels) / n,
    )


def _calibrate(
    config: WorldConfig, players: Sequence[PlayerBio], draws: _Draws, reports: Sequence[InjuryReport]
) -> tuple[list[WeeklyStat], list[LabelSet], float, float, float, float]:
    """Sweep the projection-bias and big-dip knobs against the real labeling
    rules and keep the pair whose realized rates come closest to target."""
    best = None
    for bias in _BIAS_GRID:
        for big_dip in _BIG_DIP_GRID:
            stats = _stats_for(config, players, draws, bias, big_dip)
            try:
                labels = generate_labels(stats, reports, bust_direction=AS_PRINTED)
            except EmptySampleError:
                continue
            boom, bust = _label_rates(labels)
            score = max(abs(boom - config.boom_rate), abs(bust - config.bust_rate))
            key = (score, bias, big_dip)
            if best is None or key < best[0]:
                best = (key, stats, labels, boom, bust, bias, big_dip)
    if best is None:
        raise InfeasibleTargets("no calibration point produced labelable stats")
    _, stats, labels, boom, bust, bias, big_dip = best
    if len(stats) >= _MIN_CALIBRATION_ROWS:
        if abs(boom - config.boom_rate) > _RATE_TOLERANCE:
            raise InfeasibleTargets(
                f"boom rate {boom:.3f} outside target {config.boom_rate}±{_RATE_TOLERANCE}"
            )
        if abs(bust - config.bust_rate) > _RATE_TOLERANCE:
            raise InfeasibleTargets(
                f"bust rate {bust:.3f} outside target {config.bust_rate}±{_RATE_TOLERANCE}"
            )
    return stats, labels, boom, bust, bias, big_dip


def _draw_injuries(config: WorldConfig, players: Sequence[PlayerBio], rng: np.random.Generator) -> list[InjuryReport]:
    reports = []
    statuses = ("questionable", "probable", "out", "not_listed")
    probs = (0.12, 0.08, 0.05, 0.75)
    for player in players:
        for w in range(1, config.weeks + 1):
            status = str(rng.choice(statuses, p=probs))
            if status != "not_listed":
                reports.append(InjuryReport(player.player_id, w, status))
    return reports


def _build_dictionaries(players: Sequence[PlayerBio], teams: Sequence[str]) -> list[Dictionary]:
    terms = {etype: frozenset(words) for etype, words in _DICTIONARY_TERMS.items()}
    terms[EntityType.player] = frozenset(p.name.lower() for p in players)
    terms[EntityType.team] = frozenset(t.lower() for t in teams)
    return [Dictionary(etype, words) for etype, words in sorted(terms.items(), key=lambda kv: kv[0].value)]


def _compose_doc(
    doc_id: str,
    title: str,
    published_at,
    items: Sequence[tuple[str, EntityType | None]],
) -> tuple[Document, list[EntitySpan]]:
    """Join tokens into a body, recording exact offsets for entity items."""
    parts = []
    spans = []
    offset = 0
    for text, etype in items:
        if parts:
            offset += 1  # joining space
        if etype is not None:
            spans.append(EntitySpan(doc_id, offset, offset + len(text), etype, text))
        parts.append(text)
        offset += len(text)
    body = " ".join(parts)
    doc = Document(
        id=doc_id,
        source_kind="article",
        source_name="synthwire",
        published_at=published_at,
        title=title,
        body=body,
    )
    return doc, spans


def _build_corpus(
    config: WorldConfig,
    players: Sequence[PlayerBio],
    labels_by_key: dict[tuple[str, int], LabelSet],
    reports_by_key: dict[tuple[str, int], str],
    rng: np.random.Generator,
) -> tuple[list[Document], dict[str, list[EntitySpan]]]:
    documents = []
    gold: dict[str, list[EntitySpan]] = {}
    extra_cursor = 0
    for p_idx, player in enumerate(players):
        surname = player.name.lower()
        mascot = player.team.lower()
        for week in range(1, config.weeks + 1):
            window = week_window(config.season_start, week)
            label = labels_by_key[(player.player_id, week)]
            status = reports_by_key.get((player.player_id, week))
            for j in range(config.docs_per_player_week):
                doc_id = f"doc-{player.player_id}-w{week:02d}-{j}"
                items: list[tuple[str, EntityType | None]] = []
                items.append((str(_FILLER[(p_idx + week + j) % len(_FILLER)]), None))
                items.append((surname, EntityType.player))
                if rng.random() < 0.9:
                    items.append((mascot, EntityType.team))
                items.append(("nfl", None))
                for _ in range(3):
                    correct = rng.random() < config.tone_accuracy
                    positive = label.boom if correct else not label.boom
                    pool = _POSITIVE_TONE if positive else _NEGATIVE_TONE
                    word = str(pool[int(rng.integers(len(pool)))])
                    etype = EntityType.positive_tone if positive else EntityType.negative_tone
                    items.append((word, etype))
                if status is not None:
                    items.append((status, EntityType.player_status))
                extra_type, extra_phrase = _EXTRA_PHRASES[extra_cursor % len(_EXTRA_PHRASES)]
                extra_cursor += 1
                items.append((extra_phrase, extra_type))
                items.append((str(_FILLER[(p_idx + 2 * week + j) % len(_FILLER)]), None))
                published = window.start + timedelta(hours=6 + 3 * j, minutes=p_idx)
                title = f"{player.name} week {week} outlook"
                doc, spans = _compose_doc(doc_id, title, published, items)
                documents.append(doc)
                gold[doc_id] = spans
    return documents, gold


def generate_world(config: WorldConfig) -> World:
    """Build the full deterministic world for one seed."""
    rng = np.random.default_rng(config.seed)

    teams = [_mascot(i).capitalize() for i in range(config.team_count)]
    players = []
    for i in range(config.player_count):
        players.append(
            PlayerBio(
                player_id=f"p{i:03d}",
                name=_surname(i).capitalize(),
                team=teams[i % config.team_count],
                position=POSITIONS[i % len(POSITIONS)],
                age=float(np.round(rng.uniform(22.0, 34.0), 1)),
                seasons_pro=float(rng.integers(1, 13)),
                height_cm=float(np.round(rng.uniform(170.0, 200.0), 1)),
                weight_kg=float(np.round(rng.uniform(80.0, 120.0), 1)),
            )
        )

    draws = _draw_randomness(config, rng)
    injuries = _draw_injuries(config, players, rng)
    stats, labels, boom, bust, bias, big_dip = _calibrate(config, players, draws, injuries)

    labels_by_key = {(l.player_id, l.week): l for l in labels}
    reports_by_key = {(r.player_id, r.week): r.status for r in injuries}
    documents, gold = _build_corpus(config, players, labels_by_key, reports_by_key, rng)
    dictionaries = _build_dictionaries(players, teams)

    return World(
        config=config,
        players=players,
        teams=teams,
        documents=documents,
        gold=gold,
        dictionaries=dictionaries,
        stats=stats,
        injuries=injuries,
        labels=labels,
        realized_boom_rate=boom,
        realized_bust_rate=bust,
        projection_bias=bias,
        big_dip=big_dip,
    )


def save_roster(players: Sequence[PlayerBio], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("player_id,name,team,position,age,seasons_pro,height_cm,weight_kg\n")
        for p in sorted(players, key=lambda p: p.player_id):
            fh.write(
                f"{p.player_id},{p.name},{p.team},{p.position},"
                f"{repr(p.age)},{repr(p.seasons_pro)},{repr(p.height_cm)},{repr(p.weight_kg)}\n"
            )


def load_roster(path: str | Path) -> list[PlayerBio]:
    players = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("player_id,"):
                continue
            pid, name, team, pos, age, seasons, height, weight = line.split(",")
            players.append(
                PlayerBio(pid, name, team, pos, float(age), float(seasons), float(height), float(weight))
            )
    return players


def write_world(world: World, out_dir: str | Path) -> None:
    """Emit the world in the file formats the pipeline modules consume."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    store = DocumentStore()
    store.ingest(world.documents)
    store.save(out / "corpus.jsonl")

    save_dictionaries(world.dictionaries, out / "dictionaries.tsv")
    save_gold_corpus([s for spans in world.gold.values() for s in spans], out / "gold.tsv")
    save_stats(world.stats, out / "stats.csv")
    save_injuries(world.injuries, out / "injuries.csv")
    save_labels(world.labels, out / "labels.csv")
    save_roster(world.players, out / "roster.csv")

    meta = {
        "player_count": world.config.player_count,
        "team_count": world.config.team_count,
        "weeks": world.config.weeks,
        "docs_per_player_week": world.config.docs_per_player_week,
        "boom_rate_target": world.config.boom_rate,
        "bust_rate_target": world.config.bust_rate,
        "tone_accuracy": world.config.tone_accuracy,
        "seed": world.config.seed,
        "season_start": world.config.season_start.isoformat(),
        "realized_boom_rate": world.realized_boom_rate,
        "realized_bust_rate": world.realized_bust_rate,
        "projection_bias": world.projection_bias,
        "big_dip": world.big_dip,
        "teams": world.teams,
    }
    with open(out / "world.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, sort_keys=True, indent=2)
        fh.write("\n")
