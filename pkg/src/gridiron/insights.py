"""Per-player-week pipeline orchestration: documents in, a deliverable
insight out — four state probabilities, a combined projection, a best-fit
score distribution with its 15th/85th percentile band, and up to ten
supporting or refuting evidence documents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .annotation import ENTITY_ORDER, Dictionary, EntitySpan, EntityType, annotate
from .corpus import Document, DocumentStore, build_query_plan, week_window
from .distribution import (
    DistributionError,
    FitResult,
    ScoreSample,
    fit_best,
    percentiles,
    similar_players,
    simulate,
)
from .embedding import (
    EmbeddingTable,
    TfIdfIndex,
    UnembeddableSummary,
    cosine,
    embed_summary,
    player_vector,
    summarize_document,
)
from .labeling import POSITIONS
from .network import STATES, FeatureScaler, TrainedNetwork
from .projection import POOLED, ProjectionInput, RegressionModel, predict

DEFAULT_SIMULATIONS = 1000
MAX_EVIDENCE = 10
MIN_HISTORY = 4

SUPPORT = "support"
REFUTE = "refute"
# boom and meaningful are good news for the player; bust and injury are bad
POSITIVE_VALENCE_STATES = ("boom", "meaningful")


class InsightError(ValueError):
    pass


class StageError(InsightError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PlayerBio:
    player_id: str
    name: str
    team: str
    position: str
    age: float
    seasons_pro: float
    height_cm: float
    weight_kg: float

    def __post_init__(self) -> None:
        if self.position not in POSITIONS:
            raise InsightError(f"unknown position {self.position!r}")
        for label in ("age", "seasons_pro", "height_cm", "weight_kg"):
            if not getattr(self, label) > 0:
                raise InsightError(f"{label} must be positive")


@dataclass
class BioStandardization:
    """Training-set mean/std for the numeric bio fields, stored with models."""

    mean: np.ndarray  # age, seasons_pro, height_cm, weight_kg
    std: np.ndarray

    @classmethod
    def fit(cls, bios: Sequence[PlayerBio]) -> "BioStandardization":
        if not bios:
            raise InsightError("cannot standardize an empty roster")
        rows = np.array(
            [[b.age, b.seasons_pro, b.height_cm, b.weight_kg] for b in bios], dtype=float
        )
        std = rows.std(axis=0)
        return cls(rows.mean(axis=0), np.where(std > 0, std, 1.0))

    def to_dict(self) -> dict:
        return {"mean": [float(v) for v in self.mean], "std": [float(v) for v in self.std]}

    @classmethod
    def from_dict(cls, data: dict) -> "BioStandardization":
        return cls(np.array(data["mean"], dtype=float), np.array(data["std"], dtype=float))


def bio_vector(bio: PlayerBio, standardization: BioStandardization) -> np.ndarray:
    """Position one-hot followed by standardized age/seasons/height/weight."""
    one_hot = np.zeros(len(POSITIONS))
    one_hot[POSITIONS.index(bio.position)] = 1.0
    numeric = np.array([bio.age, bio.seasons_pro, bio.height_cm, bio.weight_kg])
    return np.concatenate([one_hot, (numeric - standardization.mean) / standardization.std])


@dataclass
class SentimentVector:
    """Mean span counts per entity type per document, plus tone shares."""

    rates: dict[str, float]
    positive_tone_share: float
    negative_tone_share: float
    no_tone: bool

    def values(self) -> np.ndarray:
        ordered = [self.rates[e.value] for e in ENTITY_ORDER]
        return np.array(ordered + [self.positive_tone_share, self.negative_tone_share])


def sentiment_vector(
    docs: Sequence[Document], spans_by_doc: Mapping[str, Sequence[EntitySpan]]
) -> SentimentVector:
    if not docs:
        raise InsightError("sentiment needs at least one document")
    counts = {e.value: 0 for e in ENTITY_ORDER}
    for doc in docs:
        for span in spans_by_doc.get(doc.id, ()):
            counts[span.entity_type.value] += 1
    rates = {name: count / len(docs) for name, count in counts.items()}
    positive = counts[EntityType.positive_tone.value]
    negative = counts[EntityType.negative_tone.value]
    total_tone = positive + negative
    if total_tone == 0:
        return SentimentVector(rates, 0.0, 0.0, no_tone=True)
    return SentimentVector(rates, positive / total_tone, negative / total_tone, no_tone=False)


@dataclass
class EvidenceItem:
    doc_id: str
    title: str
    source_kind: str
    relevance: float
    stance: str
    neutral_tone: bool = False

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "title": self.title,
            "source_kind": self.source_kind,
            "relevance": self.relevance,
            "stance": self.stance,
            "neutral_tone": self.neutral_tone,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvidenceItem":
        return cls(**data)


def dominant_state(probabilities: Mapping[str, float]) -> str:
    """Highest-probability state; ties resolve in the fixed STATES order."""
    return max(STATES, key=lambda s: (probabilities[s], -STATES.index(s)))


def select_evidence(
    docs: Sequence[Document],
    doc_embeddings: Mapping[str, np.ndarray],
    spans_by_doc: Mapping[str, Sequence[EntitySpan]],
    player_vec: np.ndarray,
    state: str,
    limit: int = MAX_EVIDENCE,
) -> list[EvidenceItem]:
    """Top documents by |cosine| to the player vector; stance from tone
    polarity versus the assessed state's valence."""
    positive_valence = state in POSITIVE_VALENCE_STATES
    items = []
    for doc in docs:
        embedding = doc_embeddings.get(doc.id)
        if embedding is None:
            continue
        relevance = cosine(embedding, player_vec)
        positive = sum(
            1 for s in spans_by_doc.get(doc.id, ()) if s.entity_type == EntityType.positive_tone
        )
        negative = sum(
            1 for s in spans_by_doc.get(doc.id, ()) if s.entity_type == EntityType.negative_tone
        )
        polarity = positive - negative
        neutral = polarity == 0
        doc_is_positive = polarity >= 0
        stance = SUPPORT if doc_is_positive == positive_valence else REFUTE
        items.append(
            EvidenceItem(doc.id, doc.title, doc.source_kind, relevance, stance, neutral_tone=neutral)
        )
    items.sort(key=lambda item: (-abs(item.relevance), item.doc_id))
    return items[:limit]


@dataclass
class PlayerInsight:
    player_id: str
    week: int
    probabilities: dict[str, float] | None
    combined_projection: float
    fit: FitResult | None
    p15: float | None
    p85: float | None
    evidence: list[EvidenceItem]
    doc_count: int
    document_free: bool = False
    donors: tuple[str, ...] = ()
    sample_min: float | None = None
    sample_max: float | None = None
    sample_std: float | None = None

    def __post_init__(self) -> None:
        if self.p15 is not None and self.p85 is not None and self.p15 > self.p85:
            raise InsightError("p15 must not exceed p85")
        if len(self.evidence) > MAX_EVIDENCE:
            raise InsightError("evidence list too long")

    def to_dict(self) -> dict:
        return {
            "player_id": self.player_id,
            "week": self.week,
            "probabilities": self.probabilities,
            "combined_projection": self.combined_projection,
            "fit": None
            if self.fit is None
            else {
                "family": self.fit.family,
                "params": list(self.fit.params),
                "loss": self.fit.loss,
                "converged": self.fit.converged,
                "n": self.fit.n,
            },
            "p15": self.p15,
            "p85": self.p85,
            "evidence": [e.to_dict() for e in self.evidence],
            "doc_count": self.doc_count,
            "document_free": self.document_free,
            "donors": list(self.donors),
            "sample_min": self.sample_min,
            "sample_max": self.sample_max,
            "sample_std": self.sample_std,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PlayerInsight":
        fit = data["fit"]
        return cls(
            player_id=data["player_id"],
            week=data["week"],
            probabilities=data["probabilities"],
            combined_projection=data["combined_projection"],
            fit=None
            if fit is None
            else FitResult(fit["family"], tuple(fit["params"]), fit["loss"], fit["converged"], fit["n"]),
            p15=data["p15"],
            p85=data["p85"],
            evidence=[EvidenceItem.from_dict(e) for e in data["evidence"]],
            doc_count=data["doc_count"],
            document_free=data["document_free"],
            donors=tuple(data["donors"]),
            sample_min=data["sample_min"],
            sample_max=data["sample_max"],
            sample_std=data["sample_std"],
        )


def save_insights(insights: Sequence[PlayerInsight], path: str | Path) -> None:
    ordered = sorted(insights, key=lambda i: (i.player_id, i.week))
    with open(path, "w", encoding="utf-8") as fh:
        for insight in ordered:
            fh.write(json.dumps(insight.to_dict(), sort_keys=True) + "\n")


def load_insights(path: str | Path) -> list[PlayerInsight]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(PlayerInsight.from_dict(json.loads(line)))
    return out


@dataclass
class PipelineStores:
    """Everything build_insight reads; immutable during insight generation."""

    store: DocumentStore
    dictionaries: Sequence[Dictionary]
    index: TfIdfIndex
    encyclopedia: EmbeddingTable
    broad: EmbeddingTable
    classifiers: Mapping[str, tuple[TrainedNetwork, FeatureScaler | None]]
    projections: Mapping[str, RegressionModel]
    bios: Mapping[str, PlayerBio]
    bio_standardization: BioStandardization
    baselines: Mapping[tuple[str, int], float]
    histories: Mapping[str, Sequence[float]]
    season_start: date
    league_terms: Sequence[str] = ("NFL",)
    team_names: Mapping[str, str] = field(default_factory=dict)
    min_results: int = 50
    keywords_k: int = 20


def _stage(name: str):
    def wrap(fn):
        def run(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except StageError:
                raise
            except Exception as exc:  # surfaced with the stage name attached
                raise StageError(name, exc) from exc

        return run

    return wrap


@_stage("documents")
def _gather_documents(stores: PipelineStores, bio: PlayerBio, week: int) -> list[Document]:
    window = week_window(stores.season_start, week)
    team = stores.team_names.get(bio.team, bio.team)
    plan = build_query_plan(
        bio.name,
        team,
        list(stores.league_terms),
        min_results=stores.min_results,
        time_range=(window.start, window.end),
    )
    return list(stores.store.execute_with_broadening(plan).documents)


@_stage("distribution")
def _fit_distribution(
    stores: PipelineStores, bio: PlayerBio, combined: float, seed: int, simulations: int
):
    history = [float(v) for v in stores.histories.get(bio.player_id, ())]
    projections = [
        value for (pid, _), value in sorted(stores.baselines.items()) if pid == bio.player_id
    ]
    values = history + projections + [combined]
    donors: tuple[str, ...] = ()
    if len(history) < MIN_HISTORY:
        pool = {}
        for pid, hist in stores.histories.items():
            other = stores.bios.get(pid)
            if other is None or pid == bio.player_id:
                continue
            own = [v for (p, _), v in stores.baselines.items() if p == pid]
            mean_proj = float(np.mean(own)) if own else float(np.mean(hist)) if len(hist) else 0.0
            pool[pid] = (other.position, mean_proj, list(hist))
        if pool:
            own = [v for (p, _), v in stores.baselines.items() if p == bio.player_id]
            mean_proj = float(np.mean(own)) if own else combined
            donor_sample = similar_players(bio.player_id, bio.position, mean_proj, pool)
            values = list(donor_sample.values) + values
            donors = donor_sample.donors
    sample = ScoreSample(bio.player_id, tuple(values), donors=donors)
    fit, _ = fit_best(sample)
    draws = simulate(fit, n=simulations, seed=seed)
    p15, p85 = percentiles(draws, (0.15, 0.85))
    arr = np.asarray(sample.values)
    stats = (float(arr.min()), float(arr.max()), float(arr.std()))
    return fit, p15, p85, donors, stats


def feature_vector(stores: PipelineStores, player_id: str, week: int) -> np.ndarray | None:
    """The classifier input row for one player-week, or None when the week
    has no documents or none of them embed."""
    bio = stores.bios.get(player_id)
    if bio is None:
        raise StageError("bio", KeyError(f"unknown player {player_id!r}"))
    docs = _gather_documents(stores, bio, week)
    if not docs:
        return None
    try:
        spans_by_doc = {doc.id: annotate(doc, stores.dictionaries) for doc in docs}
        summaries = [
            summarize_document(doc, spans_by_doc[doc.id], stores.index, k=stores.keywords_k)
            for doc in docs
        ]
        pv = player_vector(player_id, summaries, stores.encyclopedia, stores.broad)
        sentiment = sentiment_vector(docs, spans_by_doc)
    except UnembeddableSummary:
        return None
    except Exception as exc:
        raise StageError("embedding", exc) from exc
    return np.concatenate(
        [pv.vector, bio_vector(bio, stores.bio_standardization), sentiment.values()]
    )


def build_insight(
    stores: PipelineStores,
    player_id: str,
    week: int,
    seed: int = 0,
    simulations: int = DEFAULT_SIMULATIONS,
) -> PlayerInsight:
    """Run the full pipeline for one player-week. Deterministic per seed."""
    bio = stores.bios.get(player_id)
    if bio is None:
        raise StageError("bio", KeyError(f"unknown player {player_id!r}"))
    baseline = stores.baselines.get((player_id, week))
    if baseline is None:
        raise StageError("baseline", KeyError(f"no baseline projection for week {week}"))

    docs = _gather_documents(stores, bio, week)

    if not docs:
        # degradation path: no documents means no embedding and no
        # classifier probabilities; the projection passes the baseline through
        fit, p15, p85, donors, stats = _fit_distribution(
            stores, bio, float(baseline), seed, simulations
        )
        return PlayerInsight(
            player_id=player_id,
            week=week,
            probabilities=None,
            combined_projection=float(baseline),
            fit=fit,
            p15=p15,
            p85=p85,
            evidence=[],
            doc_count=0,
            document_free=True,
            donors=donors,
            sample_min=stats[0],
            sample_max=stats[1],
            sample_std=stats[2],
        )

    try:
        spans_by_doc = {doc.id: annotate(doc, stores.dictionaries) for doc in docs}
        summaries = [
            summarize_document(doc, spans_by_doc[doc.id], stores.index, k=stores.keywords_k)
            for doc in docs
        ]
    except Exception as exc:
        raise StageError("annotation", exc) from exc

    try:
        doc_embeddings = {}
        for doc, summary in zip(docs, summaries):
            try:
                doc_embeddings[doc.id] = embed_summary(summary, stores.encyclopedia, stores.broad)
            except UnembeddableSummary:
                continue
        pv = player_vector(player_id, summaries, stores.encyclopedia, stores.broad)
        sentiment = sentiment_vector(docs, spans_by_doc)
        features = np.concatenate(
            [pv.vector, bio_vector(bio, stores.bio_standardization), sentiment.values()]
        )
    except StageError:
        raise
    except Exception as exc:
        raise StageError("embedding", exc) from exc

    try:
        probabilities = {}
        for state in STATES:
            net, scaler = stores.classifiers[state]
            x = features[None, :]
            if scaler is not None:
                x = scaler.transform(x)
            probabilities[state] = float(net.forward(x, mode="infer")[0])
    except Exception as exc:
        raise StageError("classifier", exc) from exc

    try:
        projection_input = ProjectionInput(
            player_id=player_id,
            week=week,
            position=bio.position,
            baseline_projection=float(baseline),
            p_boom=probabilities["boom"],
            p_bust=probabilities["bust"],
            p_injury=probabilities["injury"],
            p_meaningful=probabilities["meaningful"],
        )
        combined = predict(stores.projections, projection_input)
    except Exception as exc:
        raise StageError("projection", exc) from exc

    fit, p15, p85, donors, stats = _fit_distribution(stores, bio, combined, seed, simulations)

    state = dominant_state(probabilities)
    evidence = select_evidence(docs, doc_embeddings, spans_by_doc, pv.vector, state)

    return PlayerInsight(
        player_id=player_id,
        week=week,
        probabilities=probabilities,
        combined_projection=float(combined),
        fit=fit,
        p15=p15,
        p85=p85,
        evidence=evidence,
        doc_count=len(docs),
        document_free=False,
        donors=donors,
        sample_min=stats[0],
        sample_max=stats[1],
        sample_std=stats[2],
    )
