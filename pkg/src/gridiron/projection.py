"""Per-position linear regression ensemble for combined score projections."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

DEFAULT_FEATURES = ("baseline_projection", "p_boom", "p_bust", "p_injury", "p_meaningful")
CLASSIFIER_ONLY_FEATURES = ("p_boom", "p_bust", "p_injury", "p_meaningful")
POOLED = "ALL"


class ProjectionError(ValueError):
    pass


@dataclass(frozen=True)
class ProjectionInput:
    player_id: str
    week: int
    position: str
    baseline_projection: float
    p_boom: float
    p_bust: float
    p_injury: float
    p_meaningful: float

    def features(self, names: Sequence[str] = DEFAULT_FEATURES) -> np.ndarray:
        return np.array([getattr(self, n) for n in names], dtype=float)


@dataclass
class RegressionModel:
    position: str
    coefficients: np.ndarray  # intercept first
    feature_names: tuple[str, ...]
    rank_deficient: bool = False
    pooled_fallback: bool = False

    def predict(self, x: ProjectionInput | np.ndarray) -> float:
        if isinstance(x, ProjectionInput):
            x = x.features(self.feature_names)
        x = np.asarray(x, dtype=float)
        if x.shape != (len(self.feature_names),):
            raise ProjectionError(
                f"expected {len(self.feature_names)} features, got {x.shape}"
            )
        return float(self.coefficients[0] + self.coefficients[1:] @ x)


def fit_least_squares(design: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, bool]:
    """Minimum-norm least-squares solution via orthogonal factorization.

    Returns the coefficient vector and a rank-deficiency flag. The design
    matrix must already carry its intercept column.
    """
    design = np.asarray(design, dtype=float)
    y = np.asarray(y, dtype=float)
    if design.size == 0 or len(y) == 0:
        raise ProjectionError("empty design matrix")
    if design.shape[0] < design.shape[1]:
        raise ProjectionError("need at least as many rows as columns")
    if not (np.all(np.isfinite(design)) and np.all(np.isfinite(y))):
        raise ProjectionError("design and targets must be finite")
    beta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    return beta, rank < design.shape[1]


@dataclass(frozen=True)
class TrainingRow:
    position: str
    features: tuple[float, ...]
    actual: float


def fit_ensemble(
    rows: Sequence[TrainingRow],
    feature_names: Sequence[str] = DEFAULT_FEATURES,
) -> dict[str, RegressionModel]:
    """One model per position; positions with too few rows fall back to the
    pooled all-positions model, flagged. The pooled model is stored under
    the key ``ALL``."""
    if not rows:
        raise ProjectionError("no training rows")
    k = len(feature_names)
    by_pos: dict[str, list[TrainingRow]] = {}
    for row in rows:
        if len(row.features) != k:
            raise ProjectionError("row feature length mismatch")
        by_pos.setdefault(row.position, []).append(row)

    def design_of(group: Sequence[TrainingRow]) -> tuple[np.ndarray, np.ndarray]:
        x = np.array([r.features for r in group], dtype=float)
        return np.hstack([np.ones((len(group), 1)), x]), np.array([r.actual for r in group])

    models: dict[str, RegressionModel] = {}
    pooled_model: RegressionModel | None = None
    if len(rows) >= k + 1:
        design, y = design_of(rows)
        beta, deficient = fit_least_squares(design, y)
        pooled_model = RegressionModel(POOLED, beta, tuple(feature_names), deficient)
        models[POOLED] = pooled_model
    for pos in sorted(by_pos):
        group = by_pos[pos]
        if len(group) >= k + 1:
            design, y = design_of(group)
            beta, deficient = fit_least_squares(design, y)
            models[pos] = RegressionModel(pos, beta, tuple(feature_names), deficient)
        elif pooled_model is not None:
            models[pos] = RegressionModel(
                pos, pooled_model.coefficients.copy(), tuple(feature_names),
                pooled_model.rank_deficient, pooled_fallback=True,
            )
    if not any(not m.pooled_fallback for m in models.values()):
        raise ProjectionError("no position group (or pool) has enough rows to fit")
    return models


def predict(models: Mapping[str, RegressionModel], x: ProjectionInput) -> float:
    model = models.get(x.position) or models.get(POOLED)
    if model is None:
        raise ProjectionError(f"no model for position {x.position!r}")
    return model.predict(x)


def rmse(predictions: Sequence[float], actuals: Sequence[float]) -> float:
    p = np.asarray(predictions, dtype=float)
    a = np.asarray(actuals, dtype=float)
    if p.shape != a.shape or len(p) == 0:
        raise ProjectionError("predictions and actuals must have equal nonzero length")
    return float(np.sqrt(np.mean((p - a) ** 2)))


def save_models(models: Mapping[str, RegressionModel], path: str | Path) -> None:
    """Text coefficient table ``position,feature,beta`` (intercept included)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["position", "feature", "beta"])
        for pos in sorted(models):
            m = models[pos]
            writer.writerow([pos, "intercept", repr(float(m.coefficients[0]))])
            for name, beta in zip(m.feature_names, m.coefficients[1:]):
                writer.writerow([pos, name, repr(float(beta))])
            if m.pooled_fallback:
                writer.writerow([pos, "_pooled_fallback", "1"])


def load_models(path: str | Path) -> dict[str, RegressionModel]:
    rows_by_pos: dict[str, list[tuple[str, str]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "position":
                continue
            pos, feature, beta = row
            rows_by_pos.setdefault(pos, []).append((feature, beta))
    models = {}
    for pos, entries in rows_by_pos.items():
        fallback = any(f == "_pooled_fallback" for f, _ in entries)
        entries = [(f, b) for f, b in entries if f != "_pooled_fallback"]
        names = tuple(f for f, _ in entries if f != "intercept")
        coeffs = np.array([float(b) for _, b in entries])
        models[pos] = RegressionModel(pos, coeffs, names, pooled_fallback=fallback)
    return models
