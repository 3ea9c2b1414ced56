"""Read-only HTTP interface over a published snapshot of pipeline artifacts.

A snapshot is an immutable bundle of roster and insight records stamped with a
version id; every response is served from exactly one snapshot and carries its
version so clients can detect a swap.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .distribution import curve_export
from .insights import PlayerBio, PlayerInsight, load_insights


class ServiceError(ValueError):
    pass


@dataclass(frozen=True)
class Snapshot:
    version: str
    players: tuple[PlayerBio, ...]
    insights: Mapping[tuple[str, int], PlayerInsight]

    def __post_init__(self) -> None:
        if not self.version:
            raise ServiceError("snapshot version must be non-empty")
        ids = {p.player_id for p in self.players}
        for pid, _ in self.insights:
            if pid not in ids:
                raise ServiceError(f"insight for unknown player {pid!r}")

    def player(self, player_id: str) -> PlayerBio | None:
        for p in self.players:
            if p.player_id == player_id:
                return p
        return None


def load_snapshot(directory: str | Path) -> Snapshot:
    """Build a snapshot from ``roster.csv`` and ``insights.jsonl``; the
    version id is a digest of both files, so identical artifacts always
    publish under the same version."""
    from .synth import load_roster

    directory = Path(directory)
    roster_path = directory / "roster.csv"
    insights_path = directory / "insights.jsonl"
    for path in (roster_path, insights_path):
        if not path.exists():
            raise ServiceError(f"snapshot is missing {path.name}")
    digest = hashlib.sha256(roster_path.read_bytes() + insights_path.read_bytes())
    players = tuple(load_roster(roster_path))
    insights = {(i.player_id, i.week): i for i in load_insights(insights_path)}
    return Snapshot(version=digest.hexdigest()[:12], players=players, insights=insights)


def _bio_record(bio: PlayerBio) -> dict:
    return {
        "player_id": bio.player_id,
        "name": bio.name,
        "team": bio.team,
        "position": bio.position,
        "age": bio.age,
        "seasons_pro": bio.seasons_pro,
        "height_cm": bio.height_cm,
        "weight_kg": bio.weight_kg,
    }


def _curve_for(insight: PlayerInsight, lo: float, hi: float, points: int = 200) -> list[list[float]]:
    if insight.fit is None:
        return []
    # sample_std of zero keeps the export range exactly [lo, hi] so both
    # panels of a comparison share one x grid
    curve = curve_export(insight.fit, sample_min=lo, sample_max=hi, sample_std=0.0, points=points)
    return [[x, y] for x, y in curve]


def _panel(insight: PlayerInsight, version: str, lo: float, hi: float) -> dict:
    return {
        "snapshot_version": version,
        "insight": insight.to_dict(),
        "curve": _curve_for(insight, lo, hi),
        "p15": insight.p15,
        "p85": insight.p85,
    }


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def _parse_week(raw: str | None) -> int:
    if raw is None:
        raise ServiceError("week query parameter is required")
    try:
        week = int(raw)
    except ValueError:
        raise ServiceError(f"week must be an integer, got {raw!r}")
    if week < 1:
        raise ServiceError("week must be >= 1")
    return week


def _insight_range(insight: PlayerInsight) -> tuple[float, float]:
    if insight.sample_min is None or insight.sample_max is None:
        return (0.0, 1.0)
    pad = insight.sample_std or 0.0
    return (insight.sample_min - pad, insight.sample_max + pad)


def create_app(snapshot: Snapshot) -> FastAPI:
    """A read-only app over ``snapshot``; publish_snapshot swaps it whole."""
    app = FastAPI(title="gridiron", docs_url=None, redoc_url=None)
    app.state.snapshot = snapshot

    def current(request: Request) -> Snapshot:
        # one reference read per request: the handler below only ever sees
        # artifacts from this snapshot even if a publish races it
        return request.app.state.snapshot

    @app.get("/v1/health")
    def health(request: Request):
        snap = current(request)
        return {"status": "ok", "snapshot_version": snap.version}

    @app.get("/v1/players")
    def players(request: Request):
        snap = current(request)
        roster = sorted(snap.players, key=lambda p: p.player_id)
        return {"snapshot_version": snap.version, "players": [_bio_record(p) for p in roster]}

    @app.get("/v1/players/{player_id}/insight")
    def insight(player_id: str, request: Request, week: str | None = None):
        snap = current(request)
        try:
            week_number = _parse_week(week)
        except ServiceError as exc:
            return _error(400, str(exc))
        if snap.player(player_id) is None:
            return _error(404, f"unknown player {player_id!r}")
        record = snap.insights.get((player_id, week_number))
        if record is None:
            return _error(404, f"no insight for {player_id!r} week {week_number}")
        return {"snapshot_version": snap.version, "insight": record.to_dict()}

    @app.get("/v1/players/{player_id}/evidence")
    def evidence(player_id: str, request: Request, week: str | None = None):
        snap = current(request)
        try:
            week_number = _parse_week(week)
        except ServiceError as exc:
            return _error(400, str(exc))
        if snap.player(player_id) is None:
            return _error(404, f"unknown player {player_id!r}")
        record = snap.insights.get((player_id, week_number))
        if record is None:
            return _error(404, f"no insight for {player_id!r} week {week_number}")
        return {
            "snapshot_version": snap.version,
            "player_id": player_id,
            "week": week_number,
            "evidence": [item.to_dict() for item in record.evidence],
        }

    @app.get("/v1/compare")
    def compare(request: Request, a: str | None = None, b: str | None = None, week: str | None = None):
        snap = current(request)
        if not a or not b:
            return _error(400, "query parameters a and b are required")
        try:
            week_number = _parse_week(week)
        except ServiceError as exc:
            return _error(400, str(exc))
        records = []
        for pid in (a, b):
            if snap.player(pid) is None:
                return _error(404, f"unknown player {pid!r}")
            record = snap.insights.get((pid, week_number))
            if record is None:
                return _error(404, f"no insight for {pid!r} week {week_number}")
            records.append(record)
        ranges = [_insight_range(r) for r in records]
        lo = min(r[0] for r in ranges)
        hi = max(r[1] for r in ranges)
        return {
            "snapshot_version": snap.version,
            "week": week_number,
            "a": _panel(records[0], snap.version, lo, hi),
            "b": _panel(records[1], snap.version, lo, hi),
        }

    @app.post("/v1/lineup/project")
    def lineup(request: Request, body: dict):
        snap = current(request)
        player_ids = body.get("player_ids")
        if not isinstance(player_ids, list) or not player_ids:
            return _error(400, "body must contain a non-empty player_ids list")
        try:
            week_number = _parse_week(str(body["week"]) if "week" in body else None)
        except ServiceError as exc:
            return _error(400, str(exc))
        breakdown = []
        for pid in player_ids:
            if snap.player(pid) is None:
                return _error(404, f"unknown player {pid!r}")
            record = snap.insights.get((pid, week_number))
            if record is None:
                return _error(404, f"no insight for {pid!r} week {week_number}")
            breakdown.append(
                {"player_id": pid, "combined_projection": record.combined_projection}
            )
        total = sum(item["combined_projection"] for item in breakdown)
        return {
            "snapshot_version": snap.version,
            "week": week_number,
            "total": total,
            "players": breakdown,
        }

    return app


def publish_snapshot(app: FastAPI, snapshot: Snapshot) -> None:
    """Atomic whole-reference swap; in-flight requests keep the old one."""
    app.state.snapshot = snapshot


def serve(snapshot: Snapshot, host: str = "127.0.0.1", port: int = 8000) -> None:
    import uvicorn

    uvicorn.run(create_app(snapshot), host=host, port=port)
