"""In-memory fielded inverted index with BM25 ranking.

Documents carry one token list per field plus scalar attributes that query
filters can test. An index is built once and then only queried.

On-disk format: a single UTF-8 JSON object ``{"format": "buglocate-index",
"version": 1, "schema": [...], "docs": [...], "postings": {...}}`` with
sorted keys, so rebuilding from the same corpus gives identical bytes.
"""

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence

from .corpus import format_timestamp, parse_timestamp

INDEX_FORMAT = "buglocate-index"
INDEX_VERSION = 1
K1 = 1.2
B = 0.75


@dataclass(frozen=True)
class FieldedDocument:
    doc_id: str
    fields: Mapping[str, Sequence[str]]
    attributes: Mapping[str, object] = field(default_factory=dict)


def idf(doc_count: int, doc_freq: int) -> float:
    return math.log(1.0 + (doc_count - doc_freq + 0.5) / (doc_freq + 0.5))


class InvertedIndex:
    def __init__(self, schema, doc_ids, postings, doc_lengths, attributes, k1=K1, b=B):
        self.schema = tuple(schema)
        self.doc_ids = tuple(doc_ids)
        self.postings = postings  # field -> term -> list[(doc_id, tf)]
        self.doc_lengths = doc_lengths  # field -> doc_id -> length
        self.attributes = attributes  # doc_id -> {name: value}
        self.k1 = k1
        self.b = b
        self.avg_length = {
            f: (sum(doc_lengths[f].values()) / len(self.doc_ids) if self.doc_ids else 0.0)
            for f in self.schema
        }

    @property
    def doc_count(self) -> int:
        return len(self.doc_ids)

    def doc_freq(self, field_name, term) -> int:
        return len(self.postings[field_name].get(term, ()))

    def _check_field(self, field_name):
        if field_name not in self.schema:
            raise KeyError(f"unknown field {field_name!r}; schema is {list(self.schema)}")

    def _passing(self, filter):
        if filter is None:
            return None
        return {d for d in self.doc_ids if filter(self.attributes.get(d, {}))}

    def field_scores(self, field_name, terms, filter=None, passing=None) -> dict:
        """BM25 score per matching document for one field (unsorted, unlimited).

        A filter removes documents as if they had never been indexed: the
        document count, document frequencies and average length are taken
        over the passing documents only.
        """
        self._check_field(field_name)
        if passing is None:
            passing = self._passing(filter)
        postings = self.postings[field_name]
        lengths = self.doc_lengths[field_name]
        if passing is None:
            n = self.doc_count
            avg = self.avg_length[field_name]
        else:
            n = len(passing)
            avg = sum(lengths[d] for d in passing) / n if n else 0.0
        avg = avg or 1.0
        k1, b = self.k1, self.b
        scores = {}
        for term in terms:
            plist = postings.get(term)
            if plist and passing is not None:
                plist = [(d, tf) for d, tf in plist if d in passing]
            if not plist:
                continue
            w = idf(n, len(plist))
            for doc_id, tf in plist:
                norm = k1 * (1.0 - b + b * lengths[doc_id] / avg)
                scores[doc_id] = scores.get(doc_id, 0.0) + w * tf * (k1 + 1.0) / (tf + norm)
        return scores

    def query(self, field_name, terms, filter=None, limit=None) -> list:
        """Documents matching ``terms`` in one field as (doc_id, score), best first."""
        return _ranked(self.field_scores(field_name, terms, filter), limit)

    def multi_field_query(self, weights: Mapping[str, float], terms, filter=None, limit=None) -> list:
        """Weighted sum of per-field BM25 scores."""
        passing = self._passing(filter)
        total = {}
        for field_name, weight in weights.items():
            if weight < 0:
                raise ValueError("field weights must be non-negative")
            self._check_field(field_name)
            if weight == 0:
                continue
            for doc_id, s in self.field_scores(field_name, terms, filter, passing).items():
                total[doc_id] = total.get(doc_id, 0.0) + weight * s
        return _ranked(total, limit)

    # -- persistence ---------------------------------------------------------

    def to_dict(self) -> dict:
        docs = []
        for doc_id in self.doc_ids:
            attrs = {
                k: ({"$ts": format_timestamp(v)} if isinstance(v, datetime) else v)
                for k, v in self.attributes.get(doc_id, {}).items()
            }
            docs.append(
                {"id": doc_id, "lengths": {f: self.doc_lengths[f][doc_id] for f in self.schema}, "attrs": attrs}
            )
        return {
            "format": INDEX_FORMAT,
            "version": INDEX_VERSION,
            "bm25": {"k1": self.k1, "b": self.b},
            "schema": list(self.schema),
            "docs": docs,
            "postings": {
                f: {t: [[d, tf] for d, tf in plist] for t, plist in sorted(self.postings[f].items())}
                for f in self.schema
            },
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")), encoding="utf-8")

    @classmethod
    def from_dict(cls, data) -> "InvertedIndex":
        if data.get("format") != INDEX_FORMAT:
            raise ValueError("not an index file")
        if data.get("version") != INDEX_VERSION:
            raise ValueError(f"unsupported index version {data.get('version')}")
        schema = data["schema"]
        doc_ids = [d["id"] for d in data["docs"]]
        lengths = {f: {d["id"]: d["lengths"][f] for d in data["docs"]} for f in schema}
        attributes = {
            d["id"]: {
                k: (parse_timestamp(v["$ts"]) if isinstance(v, dict) and "$ts" in v else v)
                for k, v in d["attrs"].items()
            }
            for d in data["docs"]
        }
        postings = {
            f: {t: [(d, tf) for d, tf in plist] for t, plist in data["postings"][f].items()} for f in schema
        }
        return cls(schema, doc_ids, postings, lengths, attributes, data["bm25"]["k1"], data["bm25"]["b"])

    @classmethod
    def load(cls, path) -> "InvertedIndex":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _ranked(scores, limit):
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked if limit is None else ranked[:limit]


def build_index(docs: Sequence[FieldedDocument], schema: Sequence[str], k1=K1, b=B) -> InvertedIndex:
    schema = tuple(schema)
    seen = set()
    postings = {f: {} for f in schema}
    lengths = {f: {} for f in schema}
    attributes = {}
    doc_ids = []
    for doc in docs:
        if doc.doc_id in seen:
            raise ValueError(f"duplicate doc_id {doc.doc_id!r}")
        unknown = set(doc.fields) - set(schema)
        if unknown:
            raise KeyError(f"document {doc.doc_id!r} has fields outside the schema: {sorted(unknown)}")
        seen.add(doc.doc_id)
        doc_ids.append(doc.doc_id)
        attributes[doc.doc_id] = dict(doc.attributes)
        for f in schema:
            tokens = doc.fields.get(f, ())
            lengths[f][doc.doc_id] = len(tokens)
            for term, tf in Counter(tokens).items():
                postings[f].setdefault(term, []).append((doc.doc_id, tf))
    return InvertedIndex(schema, doc_ids, postings, lengths, attributes, k1, b)


def query(index: InvertedIndex, field_name, terms, filter: Optional[Callable] = None, limit=None) -> list:
    return index.query(field_name, terms, filter, limit)


def multi_field_query(index: InvertedIndex, weights, terms, filter=None, limit=None) -> list:
    return index.multi_field_query(weights, terms, filter, limit)


def max_normalize(results) -> dict:
    """Map (doc_id, score) pairs to doc_id -> score / max score."""
    results = list(results)
    if not results:
        return {}
    top = max(s for _, s in results)
    if top <= 0:
        return {d: 0.0 for d, _ in results}
    return {d: s / top for d, s in results}
