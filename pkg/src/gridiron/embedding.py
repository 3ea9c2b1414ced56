"""Word embeddings and document summarization into player vectors.

Two skip-gram tables (a broad one from the open corpus, a narrow
encyclopedia one from the dictionary corpus) embed per-document summaries of
keywords, concepts and entity surfaces; the per-table halves are concatenated
and averaged across a player's documents.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.special import expit

from .annotation import CONCEPT_TYPES, EntitySpan
from .corpus import Document, tokenize

BROAD = "broad"
ENCYCLOPEDIA = "encyclopedia"

DEFAULT_KEYWORDS = 20


class EmbeddingError(ValueError):
    pass


class UnembeddableSummary(EmbeddingError):
    pass


@dataclass
class EmbeddingTable:
    role: str
    dimension: int
    vectors: dict[str, np.ndarray]

    def __post_init__(self) -> None:
        if self.role not in (BROAD, ENCYCLOPEDIA):
            raise EmbeddingError(f"unknown role {self.role!r}")
        for term, vec in self.vectors.items():
            if vec.shape != (self.dimension,):
                raise EmbeddingError(f"vector for {term!r} has wrong shape {vec.shape}")
            if not np.all(np.isfinite(vec)):
                raise EmbeddingError(f"vector for {term!r} is not finite")

    def __contains__(self, term: str) -> bool:
        return term in self.vectors

    def __getitem__(self, term: str) -> np.ndarray:
        return self.vectors[term]

    def terms(self) -> list[str]:
        return sorted(self.vectors)

    def save(self, path: str | Path) -> None:
        """Header ``dimension<TAB>role`` then ``term<TAB>v1 v2 ...`` lines."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{self.dimension}\t{self.role}\n")
            for term in self.terms():
                values = " ".join(repr(float(v)) for v in self.vectors[term])
                fh.write(f"{term}\t{values}\n")

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingTable":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            dim_s, role = header.split("\t")
            dimension = int(dim_s)
            vectors = {}
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                term, values = line.split("\t")
                vectors[term] = np.array([float(v) for v in values.split(" ")])
        return cls(role=role, dimension=dimension, vectors=vectors)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def train_skipgram(
    corpus: Sequence[Sequence[str]],
    dimension: int,
    window: int = 4,
    negative_samples: int = 5,
    epochs: int = 3,
    seed: int = 0,
    learning_rate: float = 0.05,
    role: str = BROAD,
    min_count: int = 1,
) -> EmbeddingTable:
    """Skip-gram with negative sampling; deterministic given the seed.

    The negative-sampling table uses unigram counts raised to 0.75. The input
    vectors become the published table.
    """
    if not corpus or all(len(s) == 0 for s in corpus):
        raise EmbeddingError("corpus must be non-empty")
    if dimension < 2:
        raise EmbeddingError("dimension must be >= 2")
    counts = Counter(tok for sentence in corpus for tok in sentence)
    vocab = [t for t, c in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])) if c >= min_count]
    if not vocab:
        raise EmbeddingError("no vocabulary after applying min_count")
    index = {t: i for i, t in enumerate(vocab)}
    v = len(vocab)

    rng = np.random.default_rng(seed)
    w_in = (rng.random((v, dimension)) - 0.5) / dimension
    w_out = np.zeros((v, dimension))

    freq = np.array([counts[t] for t in vocab], dtype=float) ** 0.75
    neg_cdf = np.cumsum(freq / freq.sum())

    encoded = [[index[t] for t in sentence if t in index] for sentence in corpus]
    for _ in range(epochs):
        for sentence in encoded:
            n = len(sentence)
            for pos, center in enumerate(sentence):
                lo = max(0, pos - window)
                hi = min(n, pos + window + 1)
                for j in range(lo, hi):
                    if j == pos:
                        continue
                    context = sentence[j]
                    negs = np.searchsorted(neg_cdf, rng.random(negative_samples))
                    targets = np.concatenate(([context], negs))
                    labels = np.zeros(len(targets))
                    labels[0] = 1.0
                    h = w_in[center]
                    z = w_out[targets] @ h
                    g = (expit(z) - labels) * learning_rate
                    grad_h = g @ w_out[targets]
                    w_out[targets] -= np.outer(g, h)
                    w_in[center] -= grad_h
    vectors = {t: w_in[index[t]].copy() for t in vocab}
    return EmbeddingTable(role=role, dimension=dimension, vectors=vectors)


class TfIdfIndex:
    """Document-frequency index over a corpus for keyword scoring.

    score(term, doc) = tf * ln(N / df); terms present in every document score
    zero and terms outside the corpus are unknown.
    """

    def __init__(self, docs: Iterable[Document]):
        self.df: Counter[str] = Counter()
        self.n_docs = 0
        for doc in docs:
            self.n_docs += 1
            for term in set(tokenize(doc.title) + tokenize(doc.body)):
                self.df[term] += 1
        if self.n_docs == 0:
            raise EmbeddingError("tf-idf index needs at least one document")

    def idf(self, term: str) -> float:
        df = self.df.get(term, 0)
        if df == 0:
            return math.log(self.n_docs + 1.0)
        return math.log(self.n_docs / df)

    def top_keywords(self, doc: Document, k: int) -> list[str]:
        if k <= 0:
            return []
        tf = Counter(tokenize(doc.title) + tokenize(doc.body))
        scored = sorted(tf.items(), key=lambda kv: (-kv[1] * self.idf(kv[0]), kv[0]))
        return [t for t, _ in scored[:k]]


@dataclass
class FeatureSummary:
    doc_id: str
    keywords: frozenset[str]
    concepts: frozenset[str]
    entities: frozenset[str]

    def terms(self) -> list[str]:
        """Canonically ordered union of the three summary sets."""
        return sorted(self.keywords | self.concepts | self.entities)


def summarize_document(
    doc: Document,
    spans: Sequence[EntitySpan],
    index: TfIdfIndex,
    k: int = DEFAULT_KEYWORDS,
) -> FeatureSummary:
    """Entity surfaces, top-k tf-idf keywords, and concept-type surfaces."""
    if not doc.body:
        raise EmbeddingError("cannot summarize a document with an empty body")
    for s in spans:
        if s.doc_id != doc.id:
            raise EmbeddingError(f"span for {s.doc_id!r} does not belong to {doc.id!r}")
    entities = frozenset(s.surface.lower() for s in spans)
    concepts = frozenset(s.surface.lower() for s in spans if s.entity_type in CONCEPT_TYPES)
    keywords = frozenset(index.top_keywords(doc, k))
    return FeatureSummary(doc_id=doc.id, keywords=keywords, concepts=concepts, entities=entities)


def _embed_term(term: str, table: EmbeddingTable) -> np.ndarray | None:
    toks = [t for t in tokenize(term) if t in table]
    if not toks:
        return None
    return np.mean([table[t] for t in toks], axis=0)


def embed_summary(
    summary: FeatureSummary,
    encyclopedia: EmbeddingTable,
    broad: EmbeddingTable,
) -> np.ndarray:
    """Encyclopedia-half concatenated with broad-half; each half is the mean
    over the summary's embeddable terms, terms embed as mean token vectors."""
    if encyclopedia.dimension != broad.dimension:
        raise EmbeddingError("tables must share a dimension")
    halves = []
    any_term = False
    for table in (encyclopedia, broad):
        vecs = []
        for term in summary.terms():
            vec = _embed_term(term, table)
            if vec is not None:
                vecs.append(vec)
        if vecs:
            any_term = True
            halves.append(np.mean(vecs, axis=0))
        else:
            halves.append(np.zeros(table.dimension))
    if not any_term:
        raise UnembeddableSummary(f"no embeddable term in summary for {summary.doc_id!r}")
    return np.concatenate(halves)


@dataclass
class PlayerVector:
    player_id: str
    vector: np.ndarray
    doc_count: int


def player_vector(
    player_id: str,
    summaries: Sequence[FeatureSummary],
    encyclopedia: EmbeddingTable,
    broad: EmbeddingTable,
) -> PlayerVector:
    """Arithmetic mean of the embeddable summaries' embeddings."""
    embedded = []
    for summary in summaries:
        try:
            embedded.append(embed_summary(summary, encyclopedia, broad))
        except UnembeddableSummary:
            continue
    if not embedded:
        raise UnembeddableSummary(f"no embeddable summary for player {player_id!r}")
    return PlayerVector(player_id=player_id, vector=np.mean(embedded, axis=0), doc_count=len(embedded))


def _ranked_by_cosine(query: np.ndarray, table: EmbeddingTable, exclude: set[str], top_n: int) -> list[tuple[str, float]]:
    if top_n <= 0:
        return []
    scored = []
    for term in table.terms():
        if term in exclude:
            continue
        scored.append((term, cosine(query, table[term])))
    scored.sort(key=lambda kv: (-kv[1], kv[0]))
    return scored[:top_n]


def analogy(a: str, b: str, c: str, table: EmbeddingTable, top_n: int = 5) -> list[tuple[str, float]]:
    """Terms nearest to vector(b) - vector(a) + vector(c), excluding the
    relation pair; with a == b the query degenerates to c itself."""
    missing = [t for t in (a, b, c) if t not in table]
    if missing:
        raise EmbeddingError(f"terms not in vocabulary: {missing}")
    query = table[b] - table[a] + table[c]
    exclude = {a, b} if a == b else {a, b, c}
    return _ranked_by_cosine(query, table, exclude, top_n)


def keyword_neighbors(term: str, table: EmbeddingTable, top_n: int = 5) -> list[tuple[str, float]]:
    """Cosine-nearest vocabulary terms to ``term``, excluding the query."""
    if term not in table:
        raise EmbeddingError(f"terms not in vocabulary: [{term!r}]")
    return _ranked_by_cosine(table[term], table, {term}, top_n)
