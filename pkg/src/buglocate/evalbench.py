"""Ranking metrics, effect size and the three benchmark protocols.

Phase 1 is leave-one-project-out on one dataset, phase 2 trains on one
dataset and evaluates on another, phase 3 compares release matching with
time-aware matching on the same reports.
"""

import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from statistics import mean

from . import corpus
from .corpus import DetectabilityStats, detectability_report, matched_snapshots, precedes_all_releases
from .fusion import (
    DEFAULT_NEGATIVES,
    DEFAULT_TREES,
    RankedList,
    TrainingSet,
    build_training_set,
    rank_files,
    train_forest,
)
from .scoring import FeatureExtractor
from .searchengine import B, K1

logger = logging.getLogger(__name__)

__all__ = [
    "RankedList", "EvalConfig", "EvalResult", "QueryResult", "average_precision",
    "reciprocal_rank", "mean_average_precision", "mean_reciprocal_rank",
    "effect_size", "run_phase1", "run_phase2", "run_phase3",
]


# -- metrics -----------------------------------------------------------------


def average_precision(ranked, relevant) -> float:
    """AP over the relevant files that appear in the ranking.

    Relevant files missing from the ranking do not count in the
    denominator; if none appears the AP is 0.
    """
    relevant = set(relevant)
    if not relevant:
        raise ValueError("average precision is undefined for an empty relevant set")
    hits = 0
    total = 0.0
    for k, path in enumerate(ranked, start=1):
        if path in relevant:
            hits += 1
            total += hits / k
    return total / hits if hits else 0.0


def reciprocal_rank(ranked, relevant) -> float:
    relevant = set(relevant)
    for k, path in enumerate(ranked, start=1):
        if path in relevant:
            return 1.0 / k
    return 0.0


def mean_average_precision(queries) -> float:
    """Mean AP over (ranked, relevant) pairs."""
    aps = [average_precision(r, rel) for r, rel in queries]
    return mean(aps) if aps else 0.0


def mean_reciprocal_rank(queries) -> float:
    rrs = [reciprocal_rank(r, rel) for r, rel in queries]
    return mean(rrs) if rrs else 0.0


def effect_size(a, b) -> tuple:
    """Cohen's d of ``a`` against ``b`` and the pooled standard deviation."""
    a, b = list(a), list(b)
    if len(a) < 2 or len(b) < 2:
        raise ValueError("effect size needs at least two samples per group")

    def var(xs):
        m = mean(xs)
        return sum((x - m) ** 2 for x in xs) / (len(xs) - 1)

    pooled = math.sqrt(((len(a) - 1) * var(a) + (len(b) - 1) * var(b)) / (len(a) + len(b) - 2))
    if pooled == 0:
        raise ValueError("degenerate variance: pooled standard deviation is zero")
    return (mean(a) - mean(b)) / pooled, pooled


# -- protocol plumbing ----------------------------------------------------------


@dataclass
class EvalConfig:
    tree_count: int = DEFAULT_TREES
    negatives_per_positive: int = DEFAULT_NEGATIVES
    seed: int = 0
    k1: float = K1
    b: float = B
    exclude_undetectable: bool = False

    def config_hash(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class QueryResult:
    project: str
    report_id: str
    strategy: str
    ap: float
    rr: float
    snapshots: list = field(default_factory=list)
    detectable: bool = True
    fallback: bool = False


@dataclass
class EvalResult:
    strategy: str
    queries: list = field(default_factory=list)
    undetectable: DetectabilityStats = None
    seed: int = 0
    config_hash: str = ""
    training_projects: dict = field(default_factory=dict)  # eval project -> training projects

    @property
    def per_project(self) -> dict:
        out = {}
        for name in sorted({q.project for q in self.queries}):
            qs = [q for q in self.queries if q.project == name and q.ap is not None]
            if qs:
                out[name] = (mean(q.ap for q in qs), mean(q.rr for q in qs), len(qs))
        return out

    @property
    def overall(self) -> tuple:
        rows = list(self.per_project.values())
        if not rows:
            return 0.0, 0.0
        return mean(r[0] for r in rows), mean(r[1] for r in rows)

    def table(self) -> str:
        lines = [f"strategy={self.strategy} seed={self.seed} config={self.config_hash}"]
        lines.append(f"{'project':<24}{'MAP':>8}{'MRR':>8}{'queries':>9}")
        for name, (m, r, n) in self.per_project.items():
            lines.append(f"{name:<24}{m:>8.4f}{r:>8.4f}{n:>9d}")
        m, r = self.overall
        lines.append(f"{'mean':<24}{m:>8.4f}{r:>8.4f}")
        if self.undetectable is not None:
            u = self.undetectable
            lines.append(
                f"undetectable files {u.undetectable_files}/{u.total_files} ({u.undetectable_file_pct:.1f}%), "
                f"bugs {u.undetectable_bugs}/{u.total_bugs} ({u.undetectable_bug_pct:.1f}%)"
            )
        return "\n".join(lines)

    def to_record(self) -> dict:
        m, r = self.overall
        return {
            "strategy": self.strategy,
            "seed": self.seed,
            "config_hash": self.config_hash,
            "overall": {"map": m, "mrr": r},
            "per_project": {
                name: {"map": a, "mrr": b, "n_queries": n} for name, (a, b, n) in self.per_project.items()
            },
            "queries": [asdict(q) for q in self.queries],
            "undetectable": self.undetectable.to_record() if self.undetectable else None,
            "training_projects": self.training_projects,
        }


class Workspace:
    """Feature extractors shared across a protocol run, one per project."""

    def __init__(self, config: EvalConfig, pre=None):
        self.config = config
        self.pre = pre
        self._extractors = {}

    def extractor(self, project) -> FeatureExtractor:
        ext = self._extractors.get(project.name)
        if ext is None:
            kwargs = {"k1": self.config.k1, "b": self.config.b}
            if self.pre is not None:
                kwargs["pre"] = self.pre
            ext = self._extractors[project.name] = FeatureExtractor.for_project(project, **kwargs)
        return ext

    def training_set(self, projects) -> TrainingSet:
        parts = []
        for project in projects:
            if not project.snapshots:
                continue
            ext = self.extractor(project)
            parts.append(
                build_training_set(
                    project,
                    ext,
                    lambda r, p=project: corpus.resolve_release_snapshot(r, p.snapshots),
                    self.config.negatives_per_positive,
                    self.config.seed,
                )
            )
        return TrainingSet.concat(parts)

    def train(self, projects):
        ts = self.training_set(projects)
        if len(ts) == 0:
            raise ValueError("no training rows")
        return train_forest(ts, self.config.tree_count, self.config.seed), ts


def evaluate_project(model, project, strategy, workspace) -> list:
    """One QueryResult per report with ground truth.

    Time-aware matching averages AP and RR over all matched snapshots.
    """
    ext = workspace.extractor(project)
    results = []
    for report in project.reports:
        if not report.fixed_files:
            logger.info("report %s/%s has no ground truth; skipped", project.name, report.id)
            continue
        snaps = matched_snapshots(report, strategy, project.snapshots, project.version_index)
        fixed = set(report.fixed_files)
        detectable = any(fixed & s.paths for s in snaps)
        aps, rrs = [], []
        for snap in snaps:
            ranking = rank_files(model, report, snap, ext, strategy)
            aps.append(average_precision(ranking.paths, fixed))
            rrs.append(reciprocal_rank(ranking.paths, fixed))
        q = QueryResult(
            project.name,
            report.id,
            strategy,
            mean(aps) if aps else 0.0,
            mean(rrs) if rrs else 0.0,
            [s.label for s in snaps],
            detectable,
            strategy == "release" and precedes_all_releases(report, project.snapshots),
        )
        if not detectable and workspace.config.exclude_undetectable:
            q.ap = q.rr = None
        results.append(q)
    return results


def _detectability(projects, strategy) -> DetectabilityStats:
    stats = DetectabilityStats(strategy)
    for p in projects:
        if p.snapshots:
            stats = stats + detectability_report(p.reports, strategy, p.snapshots, p.version_index)
    return stats


def _evaluable(project) -> bool:
    if not project.snapshots or not any(r.fixed_files for r in project.reports):
        logger.warning("project %s has no evaluable reports; skipped", project.name)
        return False
    return True


def run_phase1(dataset, config: EvalConfig = None, strategy="release", pre=None) -> EvalResult:
    """Leave-one-project-out: each project is ranked by a model trained on the others."""
    config = config or EvalConfig()
    if len(dataset) < 2:
        raise ValueError("leave-one-project-out needs at least two projects")
    ws = Workspace(config, pre)
    result = EvalResult(strategy, seed=config.seed, config_hash=config.config_hash())
    evaluated = []
    for project in dataset:
        if not _evaluable(project):
            continue
        others = [p for p in dataset if p.name != project.name]
        try:
            model, ts = ws.train(others)
        except ValueError as exc:
            logger.warning("project %s: cannot train on the other projects (%s)", project.name, exc)
            continue
        result.training_projects[project.name] = sorted(ts.projects)
        result.queries.extend(evaluate_project(model, project, strategy, ws))
        evaluated.append(project)
    result.undetectable = _detectability(evaluated, strategy)
    return result


def run_phase2(train_dataset, eval_dataset, config: EvalConfig = None, strategy="release", pre=None) -> EvalResult:
    """Train once on ``train_dataset``; rank every project of ``eval_dataset``.

    Evaluation projects whose name also appears in the training data are
    excluded.
    """
    config = config or EvalConfig()
    ws = Workspace(config, pre)
    model, ts = ws.train(train_dataset)
    train_names = {p.name for p in train_dataset}
    result = EvalResult(strategy, seed=config.seed, config_hash=config.config_hash())
    evaluated = []
    for project in eval_dataset:
        if project.name in train_names:
            logger.warning("project %s is part of the training data; excluded from evaluation", project.name)
            continue
        if not _evaluable(project):
            continue
        result.training_projects[project.name] = sorted(ts.projects)
        result.queries.extend(evaluate_project(model, project, strategy, ws))
        evaluated.append(project)
    result.undetectable = _detectability(evaluated, strategy)
    return result


@dataclass
class Phase3Result:
    release: EvalResult
    timeaware: EvalResult
    map_effect: tuple = None  # (d, pooled s) of time-aware vs. release per-project MAP
    mrr_effect: tuple = None

    def to_record(self) -> dict:
        return {
            "release": self.release.to_record(),
            "timeaware": self.timeaware.to_record(),
            "effect_size": {"map": self.map_effect, "mrr": self.mrr_effect},
        }


def run_phase3(dataset, config: EvalConfig = None, train_dataset=None, pre=None) -> Phase3Result:
    """Release vs. time-aware evaluation of the same models on the same reports.

    With ``train_dataset`` one model is trained on it; otherwise each
    project's model is trained on the other projects of ``dataset``.
    """
    config = config or EvalConfig()
    ws = Workspace(config, pre)
    chash = config.config_hash()
    release = EvalResult("release", seed=config.seed, config_hash=chash)
    timeaware = EvalResult("timeaware", seed=config.seed, config_hash=chash)
    shared = ws.train(train_dataset) if train_dataset is not None else None
    if shared is None and len(dataset) < 2:
        raise ValueError("phase 3 needs a training dataset or at least two projects")
    evaluated = []
    for project in dataset:
        if not _evaluable(project):
            continue
        if shared is not None:
            model, ts = shared
        else:
            try:
                model, ts = ws.train([p for p in dataset if p.name != project.name])
            except ValueError as exc:
                logger.warning("project %s: cannot train on the other projects (%s)", project.name, exc)
                continue
        for res in (release, timeaware):
            res.training_projects[project.name] = sorted(ts.projects)
            res.queries.extend(evaluate_project(model, project, res.strategy, ws))
        evaluated.append(project)
    release.undetectable = _detectability(evaluated, "release")
    timeaware.undetectable = _detectability(evaluated, "timeaware")
    out = Phase3Result(release, timeaware)
    rel, ta = release.per_project, timeaware.per_project
    names = sorted(set(rel) & set(ta))
    if len(names) >= 2:
        for attr, idx in (("map_effect", 0), ("mrr_effect", 1)):
            try:
                setattr(out, attr, effect_size([ta[n][idx] for n in names], [rel[n][idx] for n in names]))
            except ValueError as exc:
                logger.info("effect size unavailable: %s", exc)
    return out
