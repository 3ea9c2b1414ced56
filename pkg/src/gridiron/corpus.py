"""Document store with time-windowed, query-broadening retrieval.

Documents (articles, blogs, transcripts) live in an in-memory store keyed by
id and persisted as newline-delimited JSON. Queries are conjunctions of terms
evaluated over title+body with case-insensitive whole-token phrase matching,
broadened level by level until enough documents come back.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Iterator, Sequence

SOURCE_KINDS = ("article", "blog", "video_transcript", "podcast_transcript")

DEFAULT_MIN_RESULTS = 50

_TOKEN_RE = re.compile(r"\w+")


class CorpusError(ValueError):
    pass


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens of ``text``."""
    return [m.group(0).lower() for m in _TOKEN_RE.finditer(text)]


def token_spans(text: str) -> list[tuple[str, int, int]]:
    """Lowercased tokens with their (start, end) character offsets."""
    return [(m.group(0).lower(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def contains_phrase(tokens: Sequence[str], phrase_tokens: Sequence[str]) -> bool:
    """Whether ``phrase_tokens`` occurs as a contiguous run inside ``tokens``."""
    n, m = len(tokens), len(phrase_tokens)
    if m == 0 or m > n:
        return False
    first = phrase_tokens[0]
    for i in range(n - m + 1):
        if tokens[i] == first and list(tokens[i : i + m]) == list(phrase_tokens):
            return True
    return False


@dataclass(frozen=True)
class Document:
    id: str
    source_kind: str
    source_name: str
    published_at: datetime
    title: str
    body: str

    def __post_init__(self) -> None:
        if not self.id:
            raise CorpusError("document id must be non-empty")
        if self.source_kind not in SOURCE_KINDS:
            raise CorpusError(f"unknown source_kind {self.source_kind!r}")
        if not self.body:
            raise CorpusError("document body must be non-empty")
        if not isinstance(self.published_at, datetime):
            raise CorpusError("published_at must be a datetime")
        if self.published_at.tzinfo is None:
            object.__setattr__(
                self, "published_at", self.published_at.replace(tzinfo=timezone.utc)
            )

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "source_kind": self.source_kind,
            "source_name": self.source_name,
            "published_at": self.published_at.astimezone(timezone.utc).isoformat(),
            "title": self.title,
            "body": self.body,
        }

    @classmethod
    def from_record(cls, record: dict) -> "Document":
        try:
            published = datetime.fromisoformat(record["published_at"])
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusError(f"bad published_at: {exc}") from exc
        try:
            return cls(
                id=record["id"],
                source_kind=record["source_kind"],
                source_name=record.get("source_name", ""),
                published_at=published,
                title=record.get("title", ""),
                body=record["body"],
            )
        except KeyError as exc:
            raise CorpusError(f"missing field {exc}") from exc


@dataclass
class IngestReport:
    stored: int = 0
    rejected: list[tuple[str, str]] = field(default_factory=list)


@dataclass(frozen=True)
class WeekWindow:
    season_week: int
    start: datetime
    end: datetime


def week_window(season_start: date, week: int) -> WeekWindow:
    """The Tuesday-to-Monday window for ``week`` of a season starting on
    ``season_start`` (the Tuesday of week 1)."""
    if week < 1:
        raise CorpusError(f"week must be >= 1, got {week}")
    if season_start.weekday() != 1:
        raise CorpusError(f"season_start {season_start} is not a Tuesday")
    start_day = season_start + timedelta(days=7 * (week - 1))
    start = datetime(start_day.year, start_day.month, start_day.day, tzinfo=timezone.utc)
    end = start + timedelta(days=6, hours=23, minutes=59, seconds=59)
    return WeekWindow(season_week=week, start=start, end=end)


@dataclass(frozen=True)
class QueryPlan:
    levels: tuple[tuple[str, ...], ...]
    min_results: int
    time_range: tuple[datetime, datetime] | None = None

    def __post_init__(self) -> None:
        if not self.levels:
            raise CorpusError("query plan needs at least one level")
        if self.min_results < 1:
            raise CorpusError("min_results must be >= 1")
        sets = [frozenset(t.lower() for t in level) for level in self.levels]
        for i in range(1, len(sets)):
            if not any(sets[i] < sets[j] for j in range(i)):
                raise CorpusError(
                    f"level {i} is not a strict subset of any earlier level"
                )


def build_query_plan(
    player_name: str,
    team_name: str,
    league_terms: Sequence[str],
    min_results: int = DEFAULT_MIN_RESULTS,
    time_range: tuple[datetime, datetime] | None = None,
) -> QueryPlan:
    """Most-specific-first conjunction levels for a player query.

    Starts from player+team+all league terms, drops league terms from the
    back one at a time, and finally drops the team, keeping the first league
    term.
    """
    if not player_name:
        raise CorpusError("player_name must be non-empty")
    league = [t for t in league_terms if t]
    levels: list[tuple[str, ...]] = []
    base = [player_name] + ([team_name] if team_name else [])
    for keep in range(len(league), 0, -1):
        levels.append(tuple(base + league[:keep]))
    if not levels:
        levels.append(tuple(base))
    elif team_name:
        levels.append((player_name, league[0]))
    return QueryPlan(levels=tuple(levels), min_results=min_results, time_range=time_range)


@dataclass
class QueryResult:
    documents: list[Document]
    level_index: int
    level_terms: tuple[str, ...]


class DocumentStore:
    """Append/replace document collection, idempotent by document id."""

    def __init__(self) -> None:
        self._docs: dict[str, Document] = {}
        # tokenization is the dominant cost of repeated queries, so token
        # lists are cached per document and dropped when the doc is replaced
        self._token_cache: dict[str, tuple[list[str], list[str]]] = {}

    def __len__(self) -> int:
        return len(self._docs)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._docs

    def get(self, doc_id: str) -> Document:
        return self._docs[doc_id]

    def documents(self) -> list[Document]:
        return [self._docs[k] for k in sorted(self._docs)]

    def ingest(self, records: Iterable[Document | dict]) -> IngestReport:
        """Store each record once, last-wins on duplicate ids; malformed
        records are rejected with a reason and ingestion continues."""
        report = IngestReport()
        batch: dict[str, Document] = {}
        for i, record in enumerate(records):
            try:
                doc = record if isinstance(record, Document) else Document.from_record(record)
            except CorpusError as exc:
                rid = record.get("id", f"<record {i}>") if isinstance(record, dict) else f"<record {i}>"
                report.rejected.append((str(rid), str(exc)))
                continue
            batch[doc.id] = doc
        for doc_id, doc in batch.items():
            self._docs[doc_id] = doc
            self._token_cache.pop(doc_id, None)
        report.stored = len(batch)
        return report

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for doc in self.documents():
                fh.write(json.dumps(doc.to_record(), sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "DocumentStore":
        store = cls()
        with open(path, encoding="utf-8") as fh:
            records = (json.loads(line) for line in fh if line.strip())
            store.ingest(records)
        return store

    def _matches(self, doc: Document, terms: Sequence[str], window: tuple[datetime, datetime] | None) -> bool:
        if window is not None:
            start, end = window
            if not (start <= doc.published_at <= end):
                return False
        cached = self._token_cache.get(doc.id)
        if cached is None:
            cached = (tokenize(doc.title), tokenize(doc.body))
            self._token_cache[doc.id] = cached
        title_toks, body_toks = cached
        for term in terms:
            phrase = tokenize(term)
            if not (contains_phrase(title_toks, phrase) or contains_phrase(body_toks, phrase)):
                return False
        return True

    def execute_with_broadening(self, plan: QueryPlan) -> QueryResult:
        """Evaluate levels most-specific-first; return the first level with at
        least ``min_results`` matches, else the largest result set (broadest
        level on ties). Results sort by recency."""
        per_level: list[list[Document]] = []
        for level in plan.levels:
            matched = [d for d in self.documents() if self._matches(d, level, plan.time_range)]
            matched.sort(key=lambda d: (d.published_at, d.id), reverse=True)
            if len(matched) >= plan.min_results:
                idx = len(per_level)
                return QueryResult(matched, idx, plan.levels[idx])
            per_level.append(matched)
        best = 0
        for i, docs in enumerate(per_level):
            if len(docs) >= len(per_level[best]):
                best = i
        return QueryResult(per_level[best], best, plan.levels[best])
