"""Straight-line reference implementations used to check the library.

Each function evaluates its formula directly, one item at a time, with no
caching, sorting tricks or shared helpers from the package under test.
"""

import math
from datetime import datetime


def average_precision(ranked, relevant):
    present = [p for p in ranked if p in relevant]
    if not present:
        return 0.0
    total = 0.0
    for k in range(1, len(ranked) + 1):
        if ranked[k - 1] in relevant:
            hits_in_top_k = 0
            for p in ranked[:k]:
                if p in relevant:
                    hits_in_top_k += 1
            total += hits_in_top_k / k
    return total / len(set(present))


def reciprocal_rank(ranked, relevant):
    for k in range(1, len(ranked) + 1):
        if ranked[k - 1] in relevant:
            return 1.0 / k
    return 0.0


def mean(values):
    values = list(values)
    return sum(values) / len(values)


def bm25(doc_id, docs, terms, k1=1.2, b=0.75):
    """BM25 of one document; ``docs`` maps doc id -> token list."""
    n = len(docs)
    avglen = sum(len(toks) for toks in docs.values()) / n
    if avglen == 0:
        avglen = 1.0
    tokens = docs[doc_id]
    score = 0.0
    for t in terms:
        tf = tokens.count(t)
        if tf == 0:
            continue
        n_t = sum(1 for toks in docs.values() if t in toks)
        w = math.log(1 + (n - n_t + 0.5) / (n_t + 0.5))
        score += w * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len(tokens) / avglen))
    return score


def stacktrace_score(path, direct_ranks, context):
    if path in direct_ranks:
        rank = direct_ranks[path]
        if rank <= 10:
            return 1 / rank
        return 0.1
    if path in context:
        return 0.1
    return 0.0


def days_between(earlier: datetime, later: datetime) -> float:
    return (later - earlier).total_seconds() / 86400


def history_k(created, commit_times):
    """The literal window search: grow k by one day at a time."""
    prior = [t for t in commit_times if t < created]
    k = 15
    while True:
        inside = [t for t in prior if days_between(t, created) <= k]
        older = [t for t in prior if days_between(t, created) > k]
        if len(inside) >= 15 or not older:
            return k
        k += 1


def version_history(path, created, commits):
    """``commits`` is a list of (timestamp, message, files)."""
    k = history_k(created, [c[0] for c in commits])
    score = 0.0
    for when, message, files in commits:
        if when >= created:
            continue
        age = days_between(when, created)
        lowered = message.lower()
        is_fix = "fix" in lowered or "bug" in lowered or "fail" in lowered or "error" in lowered
        if not (is_fix or age <= k):
            continue
        if path in files:
            score += 1 / (1 + math.exp(12 * (1 - (k - age) / k)))
    return score


def cosine(a_tokens, b_tokens):
    vocab = sorted(set(a_tokens) | set(b_tokens))
    va = [a_tokens.count(t) for t in vocab]
    vb = [b_tokens.count(t) for t in vocab]
    na = math.sqrt(sum(x * x for x in va))
    nb = math.sqrt(sum(x * x for x in vb))
    if na == 0 or nb == 0:
        return 0.0
    return sum(x * y for x, y in zip(va, vb)) / (na * nb)


def similar_reports(path, report, priors, sim):
    """sum over priors fixed before ``report`` of sim / |fix| for files they fixed."""
    score = 0.0
    for prior in priors:
        if prior.id == report.id or prior.resolved_at is None:
            continue
        if not prior.resolved_at < report.created_at:
            continue
        fix = set(prior.fixed_files)
        if path in fix:
            score += sim(report, prior) / len(fix)
    return score


def cohens_d(a, b):
    ma, mb = mean(a), mean(b)
    va = sum((x - ma) ** 2 for x in a) / (len(a) - 1)
    vb = sum((x - mb) ** 2 for x in b) / (len(b) - 1)
    s = math.sqrt(((len(a) - 1) * va + (len(b) - 1) * vb) / (len(a) + len(b) - 2))
    return (ma - mb) / s
