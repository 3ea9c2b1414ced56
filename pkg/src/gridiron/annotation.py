"""Dictionary entity annotation plus agreement and P/R/F1 scoring.

A fixed ontology of 13 entity types is detected by greedy longest-match
dictionary lookup over token boundaries. Annotation quality is measured with
token-level Cohen kappa and span-level precision/recall/F1 in exact or
overlap mode.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Document, token_spans


class EntityType(Enum):
    body_part = "body_part"
    coach = "coach"
    fans = "fans"
    gear = "gear"
    injury = "injury"
    location = "location"
    player = "player"
    player_status = "player_status"
    treatment = "treatment"
    positive_tone = "positive_tone"
    negative_tone = "negative_tone"
    team = "team"
    performance_metric = "performance_metric"


ENTITY_ORDER = {etype: i for i, etype in enumerate(EntityType)}

CONCEPT_TYPES = frozenset(
    {EntityType.performance_metric, EntityType.injury, EntityType.player_status, EntityType.treatment}
)

NONE_CATEGORY = "none"


class AnnotationError(ValueError):
    pass


class DegenerateMarginals(AnnotationError):
    pass


@dataclass(frozen=True, order=True)
class EntitySpan:
    doc_id: str
    start: int
    end: int
    entity_type: EntityType
    surface: str = field(compare=False, default="")

    def __post_init__(self) -> None:
        if self.start < 0 or self.end <= self.start:
            raise AnnotationError(f"bad span offsets [{self.start}, {self.end})")

    def overlaps(self, other: "EntitySpan") -> bool:
        return self.doc_id == other.doc_id and self.start < other.end and other.start < self.end


@dataclass
class Dictionary:
    entity_type: EntityType
    terms: frozenset[str]

    def __post_init__(self) -> None:
        normalized = frozenset(t.strip().lower() for t in self.terms)
        if "" in normalized:
            raise AnnotationError("dictionary contains an empty phrase")
        object.__setattr__(self, "terms", normalized)


def load_dictionaries(path: str | Path) -> list[Dictionary]:
    """Read ``entity_type<TAB>phrase`` lines into one Dictionary per type."""
    terms: dict[EntityType, set[str]] = defaultdict(set)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                type_name, phrase = line.split("\t", 1)
                etype = EntityType(type_name)
            except ValueError as exc:
                raise AnnotationError(f"{path}:{lineno}: {exc}") from exc
            terms[etype].add(phrase)
    return [Dictionary(etype, frozenset(phrases)) for etype, phrases in sorted(terms.items(), key=lambda kv: ENTITY_ORDER[kv[0]])]


def save_dictionaries(dictionaries: Sequence[Dictionary], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for d in sorted(dictionaries, key=lambda d: ENTITY_ORDER[d.entity_type]):
            for phrase in sorted(d.terms):
                fh.write(f"{d.entity_type.value}\t{phrase}\n")


def load_gold_corpus(path: str | Path, bodies: Mapping[str, str] | None = None) -> list[EntitySpan]:
    """Read ``doc_id<TAB>start<TAB>end<TAB>entity_type`` span records."""
    spans = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            doc_id, start, end, type_name = line.split("\t")
            start, end = int(start), int(end)
            surface = bodies[doc_id][start:end] if bodies else ""
            spans.append(EntitySpan(doc_id, start, end, EntityType(type_name), surface))
    return spans


def save_gold_corpus(spans: Iterable[EntitySpan], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in sorted(spans):
            fh.write(f"{s.doc_id}\t{s.start}\t{s.end}\t{s.entity_type.value}\n")


def _phrase_index(dictionaries: Sequence[Dictionary]) -> tuple[dict[tuple[str, ...], EntityType], int]:
    index: dict[tuple[str, ...], EntityType] = {}
    max_len = 0
    for d in sorted(dictionaries, key=lambda d: ENTITY_ORDER[d.entity_type]):
        for phrase in d.terms:
            toks = tuple(phrase.split())
            if not toks:
                continue
            max_len = max(max_len, len(toks))
            # ties between types on the same phrase resolve to the earliest
            # declared entity type
            index.setdefault(toks, d.entity_type)
    return index, max_len


def annotate(doc: Document, dictionaries: Sequence[Dictionary]) -> list[EntitySpan]:
    """Greedy left-to-right longest-match dictionary annotation of the body.

    Spans never overlap: once text is claimed the scan resumes after it.
    """
    index, max_len = _phrase_index(dictionaries)
    if not index:
        return []
    toks = token_spans(doc.body)
    spans: list[EntitySpan] = []
    i = 0
    n = len(toks)
    while i < n:
        matched = False
        for length in range(min(max_len, n - i), 0, -1):
            key = tuple(t[0] for t in toks[i : i + length])
            etype = index.get(key)
            if etype is not None:
                start = toks[i][1]
                end = toks[i + length - 1][2]
                spans.append(EntitySpan(doc.id, start, end, etype, doc.body[start:end]))
                i += length
                matched = True
                break
        if not matched:
            i += 1
    return spans


def annotate_corpus(docs: Iterable[Document], dictionaries: Sequence[Dictionary]) -> dict[str, list[EntitySpan]]:
    return {doc.id: annotate(doc, dictionaries) for doc in docs}


def kappa_from_confusion(table: np.ndarray) -> float:
    """Cohen kappa from a square agreement contingency table."""
    table = np.asarray(table, dtype=float)
    n = table.sum()
    if n == 0:
        raise AnnotationError("empty contingency table")
    p_o = np.trace(table) / n
    row = table.sum(axis=1) / n
    col = table.sum(axis=0) / n
    p_e = float(row @ col)
    if p_e >= 1.0 - 1e-15:
        if p_o >= 1.0 - 1e-15:
            return 1.0
        raise DegenerateMarginals("chance agreement is 1 with non-identical annotations")
    return float((p_o - p_e) / (1.0 - p_e))


def _token_categories(body: str, spans: Sequence[EntitySpan]) -> list[str]:
    cats = []
    ordered = sorted(spans)
    for _, tok_start, tok_end in token_spans(body):
        cat = NONE_CATEGORY
        for s in ordered:
            if s.start <= tok_start and tok_end <= s.end:
                cat = s.entity_type.value
                break
        cats.append(cat)
    return cats


@dataclass
class KappaResult:
    overall: float
    per_type: dict[str, float]


def cohen_kappa(
    a: Sequence[EntitySpan],
    b: Sequence[EntitySpan],
    docs: Iterable[Document],
) -> KappaResult:
    """Token-level agreement between two annotation passes over ``docs``.

    Each token gets one of the 13 entity categories or "none"; per-type kappa
    uses the binary type-vs-rest reduction.
    """
    a_by_doc: dict[str, list[EntitySpan]] = defaultdict(list)
    b_by_doc: dict[str, list[EntitySpan]] = defaultdict(list)
    for s in a:
        a_by_doc[s.doc_id].append(s)
    for s in b:
        b_by_doc[s.doc_id].append(s)
    cats = [NONE_CATEGORY] + [e.value for e in EntityType]
    cat_idx = {c: i for i, c in enumerate(cats)}
    table = np.zeros((len(cats), len(cats)))
    pairs: list[tuple[str, str]] = []
    for doc in docs:
        ca = _token_categories(doc.body, a_by_doc.get(doc.id, []))
        cb = _token_categories(doc.body, b_by_doc.get(doc.id, []))
        pairs.extend(zip(ca, cb))
    if not pairs:
        raise AnnotationError("no tokens to compare")
    for x, y in pairs:
        table[cat_idx[x], cat_idx[y]] += 1
    overall = kappa_from_confusion(table)
    per_type = {}
    for etype in EntityType:
        binary = np.zeros((2, 2))
        for x, y in pairs:
            binary[int(x == etype.value), int(y == etype.value)] += 1
        try:
            per_type[etype.value] = kappa_from_confusion(binary)
        except DegenerateMarginals:
            per_type[etype.value] = float("nan")
    return KappaResult(overall=overall, per_type=per_type)


@dataclass
class PRF:
    precision: float
    recall: float
    f1: float
    true_positives: int = 0
    predicted: int = 0
    gold: int = 0


@dataclass
class EvaluationResult:
    overall: PRF
    per_type: dict[str, PRF]


def _prf(tp: int, n_pred: int, n_gold: int) -> PRF:
    p = tp / n_pred if n_pred else 0.0
    r = tp / n_gold if n_gold else 0.0
    f1 = 2 * p * r / (p + r) if (p + r) > 0 else 0.0
    return PRF(p, r, f1, tp, n_pred, n_gold)


def evaluate(
    pred: Sequence[EntitySpan],
    gold: Sequence[EntitySpan],
    mode: str = "exact",
) -> EvaluationResult:
    """Span-level precision/recall/F1 of predictions against a gold corpus.

    ``exact`` requires identical (doc, start, end, type); ``overlap`` accepts
    a >=1 character overlap with a same-type gold span, each gold span
    consumed at most once in pred-span order.
    """
    if mode not in ("exact", "overlap"):
        raise AnnotationError(f"unknown mode {mode!r}")
    tp_by_type: Counter[EntityType] = Counter()
    pred_sorted = sorted(pred)
    if mode == "exact":
        gold_keys = Counter((g.doc_id, g.start, g.end, g.entity_type) for g in gold)
        for s in pred_sorted:
            key = (s.doc_id, s.start, s.end, s.entity_type)
            if gold_keys[key] > 0:
                gold_keys[key] -= 1
                tp_by_type[s.entity_type] += 1
    else:
        unmatched: dict[str, list[EntitySpan]] = defaultdict(list)
        for g in sorted(gold):
            unmatched[g.doc_id].append(g)
        for s in pred_sorted:
            pool = unmatched.get(s.doc_id, [])
            for j, g in enumerate(pool):
                if g.entity_type == s.entity_type and s.overlaps(g):
                    pool.pop(j)
                    tp_by_type[s.entity_type] += 1
                    break
    pred_by_type: Counter[EntityType] = Counter(s.entity_type for s in pred)
    gold_by_type: Counter[EntityType] = Counter(s.entity_type for s in gold)
    per_type = {
        e.value: _prf(tp_by_type[e], pred_by_type[e], gold_by_type[e])
        for e in EntityType
        if pred_by_type[e] or gold_by_type[e]
    }
    overall = _prf(sum(tp_by_type.values()), len(pred), len(gold))
    return EvaluationResult(overall=overall, per_type=per_type)
