"""Random-forest fusion of the component scores into one ranking score.

Trees are grown with scikit-learn and then copied into flat arrays; all
prediction, ranking and persistence runs on those arrays, so a model file
can be read back without scikit-learn.

Model file layout (text, UTF-8)::

    buglocate-forest 1
    seed <int>
    features <name> <name> ...
    trees <count>
    tree <nodes>                  # one header per tree, then its nodes
    <feature> <threshold> <value> # preorder; leaves have feature -1

A node goes left when ``x <= threshold``.
"""

import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import seeding
from .scoring import FEATURE_NAMES, FeatureVector

logger = logging.getLogger(__name__)

MODEL_FORMAT = "buglocate-forest"
MODEL_VERSION = 1
DEFAULT_TREES = 1000
DEFAULT_NEGATIVES = 50
MAX_FEATURES = 5
MIN_SAMPLES_LEAF = 5


@dataclass
class TrainingSet:
    X: np.ndarray = field(default_factory=lambda: np.zeros((0, len(FEATURE_NAMES))))
    y: np.ndarray = field(default_factory=lambda: np.zeros(0))
    provenance: list = field(default_factory=list)  # (project, report id, path)

    def __len__(self):
        return len(self.y)

    @property
    def projects(self) -> set:
        return {p for p, _, _ in self.provenance}

    @classmethod
    def concat(cls, parts):
        parts = [p for p in parts if len(p)]
        if not parts:
            return cls()
        return cls(
            np.vstack([p.X for p in parts]),
            np.concatenate([p.y for p in parts]),
            [row for p in parts for row in p.provenance],
        )


def sample_rows(paths, fixed, negatives_per_positive, rng) -> tuple:
    """Indices of positive rows and of sampled negative rows."""
    positives = [i for i, p in enumerate(paths) if p in fixed]
    if not positives:
        return [], []
    negatives = [i for i, p in enumerate(paths) if p not in fixed]
    wanted = min(len(negatives), negatives_per_positive * len(positives))
    chosen = rng.choice(len(negatives), size=wanted, replace=False) if wanted else []
    return positives, sorted(negatives[j] for j in chosen)


def build_training_set(
    project, extractor, snapshot_for, negatives_per_positive=DEFAULT_NEGATIVES, seed=0
) -> TrainingSet:
    """Rows for every report of ``project`` that has a fixed file in its snapshot.

    ``snapshot_for(report)`` picks the snapshot a report is scored against.
    Label 1 marks a fixed file; negatives are drawn uniformly without
    replacement from the other files, ``negatives_per_positive`` per positive.
    """
    parts = []
    for report in project.reports:
        if not report.fixed_files:
            continue
        snapshot = snapshot_for(report)
        fixed = set(report.fixed_files)
        paths = [f.path for f in snapshot.files]
        rng = seeding.rng(seed, "negatives", project.name, report.id)
        pos, neg = sample_rows(paths, fixed, negatives_per_positive, rng)
        if not pos:
            logger.info("report %s/%s: no fixed file in snapshot %s", project.name, report.id, snapshot.label)
            continue
        _, _, norm = extractor.matrix(report, snapshot)
        idx = pos + neg
        parts.append(
            TrainingSet(
                norm[idx],
                np.array([1.0] * len(pos) + [0.0] * len(neg)),
                [(project.name, report.id, paths[i]) for i in idx],
            )
        )
    return TrainingSet.concat(parts)


class ForestModel:
    """A regression forest stored as flat, concatenated node arrays."""

    def __init__(self, feature, threshold, left, right, value, roots, seed=0, feature_names=FEATURE_NAMES):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=np.float64)
        self.roots = np.asarray(roots, dtype=np.int64)
        self.seed = seed
        self.feature_names = tuple(feature_names)

    @property
    def tree_count(self) -> int:
        return len(self.roots)

    def predict(self, X) -> np.ndarray:
        """Mean leaf value over all trees for each row of ``X``."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        # Split thresholds were learned on float32 features.
        X = X.astype(np.float32).astype(np.float64)
        n = X.shape[0]
        if n == 0:
            return np.zeros(0)
        node = np.broadcast_to(self.roots, (n, self.tree_count)).copy()
        rows = np.arange(n)[:, None]
        while True:
            feat = self.feature[node]
            inner = feat >= 0
            if not inner.any():
                break
            go_left = X[rows, np.where(inner, feat, 0)] <= self.threshold[node]
            step = np.where(go_left, self.left[node], self.right[node])
            node = np.where(inner, step, node)
        return self.value[node].mean(axis=1)

    def split_frequency(self) -> dict:
        """Share of internal nodes splitting on each feature (sums to 1)."""
        inner = self.feature[self.feature >= 0]
        counts = np.bincount(inner, minlength=len(self.feature_names)).astype(float)
        total = counts.sum()
        if total:
            counts /= total
        return dict(zip(self.feature_names, counts.tolist()))

    # -- persistence ---------------------------------------------------------

    def _preorder(self, node, out):
        stack = [node]
        while stack:
            i = stack.pop()
            f = int(self.feature[i])
            if f < 0:
                out.append(f"-1 0 {float(self.value[i])!r}")
            else:
                out.append(f"{f} {float(self.threshold[i])!r} {float(self.value[i])!r}")
                stack.append(int(self.right[i]))
                stack.append(int(self.left[i]))

    def dumps(self) -> str:
        lines = [
            f"{MODEL_FORMAT} {MODEL_VERSION}",
            f"seed {self.seed}",
            "features " + " ".join(self.feature_names),
            f"trees {self.tree_count}",
        ]
        for t in range(self.tree_count):
            nodes = []
            self._preorder(int(self.roots[t]), nodes)
            lines.append(f"tree {len(nodes)}")
            lines.extend(nodes)
        return "\n".join(lines) + "\n"

    def save(self, path) -> str:
        """Write the model file; returns its SHA-256."""
        text = self.dumps()
        Path(path).write_text(text, encoding="utf-8")
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    @classmethod
    def loads(cls, text: str) -> "ForestModel":
        lines = iter(text.splitlines())
        magic, version = next(lines).split()
        if magic != MODEL_FORMAT:
            raise ValueError("not a forest model file")
        if int(version) != MODEL_VERSION:
            raise ValueError(f"unsupported model version {version}")
        seed = int(next(lines).split()[1])
        names = next(lines).split()[1:]
        count = int(next(lines).split()[1])
        feature, threshold, left, right, value, roots = [], [], [], [], [], []
        for _ in range(count):
            n_nodes = int(next(lines).split()[1])
            base = len(feature)
            roots.append(base)
            rows = [next(lines).split() for _ in range(n_nodes)]
            for f, thr, val in rows:
                feature.append(int(f))
                threshold.append(float(thr))
                value.append(float(val))
                left.append(-1)
                right.append(-1)
            # Rebuild child links from the preorder sequence.
            pending = []
            for k in range(n_nodes):
                i = base + k
                if pending:
                    parent = pending[-1]
                    if left[parent] < 0:
                        left[parent] = i
                    else:
                        right[parent] = i
                        pending.pop()
                if feature[i] >= 0:
                    pending.append(i)
        return cls(feature, threshold, left, right, value, roots, seed, names)

    @classmethod
    def load(cls, path) -> "ForestModel":
        return cls.loads(Path(path).read_text(encoding="utf-8"))


def train_forest(
    ts: TrainingSet,
    tree_count=DEFAULT_TREES,
    seed=0,
    max_features=MAX_FEATURES,
    min_samples_leaf=MIN_SAMPLES_LEAF,
) -> ForestModel:
    """Bootstrap-aggregated regression trees with variance-reduction splits."""
    from sklearn.ensemble import RandomForestRegressor

    if len(ts) == 0:
        raise ValueError("no training rows")
    if len(np.unique(ts.y)) < 2:
        raise ValueError("degenerate labels: training set holds a single label")
    forest = RandomForestRegressor(
        n_estimators=tree_count,
        max_features=min(max_features, ts.X.shape[1]),
        min_samples_leaf=min_samples_leaf,
        bootstrap=True,
        random_state=seeding.derive_seed(seed, "forest"),
    )
    forest.fit(ts.X, ts.y)
    feature, threshold, left, right, value, roots = [], [], [], [], [], []
    for est in forest.estimators_:
        tree = est.tree_
        base = len(feature)
        roots.append(base)
        leaf = tree.children_left < 0
        feature.extend(np.where(leaf, -1, tree.feature).tolist())
        threshold.extend(np.where(leaf, 0.0, tree.threshold).tolist())
        left.extend(np.where(leaf, -1, tree.children_left + base).tolist())
        right.extend(np.where(leaf, -1, tree.children_right + base).tolist())
        value.extend(tree.value[:, 0, 0].tolist())
    return ForestModel(feature, threshold, left, right, value, roots, seed, FEATURE_NAMES[: ts.X.shape[1]])


def predict(model: ForestModel, fv) -> float:
    x = fv.as_array() if isinstance(fv, FeatureVector) else np.asarray(fv, dtype=float)
    return float(model.predict(x[None, :])[0])


@dataclass
class RankedList:
    report_id: str
    entries: list  # (path, score, FeatureVector of raw component scores)
    strategy: str = "release"
    snapshot: str = ""

    @property
    def paths(self) -> list:
        return [e[0] for e in self.entries]

    def top(self, n) -> "RankedList":
        return RankedList(self.report_id, self.entries[:n], self.strategy, self.snapshot)

    def to_records(self) -> list:
        return [
            {
                "report_id": self.report_id,
                "snapshot": self.snapshot,
                "strategy": self.strategy,
                "rank": rank,
                "path": path,
                "score": score,
                "components": dict(zip(FEATURE_NAMES, fv.as_array().tolist())),
            }
            for rank, (path, score, fv) in enumerate(self.entries, start=1)
        ]


def order_by_score(paths, scores) -> np.ndarray:
    """Indices sorting by descending score, ties by ascending path."""
    path_rank = np.argsort(np.argsort(np.asarray(paths, dtype=object)))
    return np.lexsort((path_rank, -np.asarray(scores, dtype=float)))


def rank_files(model: ForestModel, report, snapshot, extractor, strategy="release") -> RankedList:
    paths, raw, norm = extractor.matrix(report, snapshot)
    scores = model.predict(norm) if len(paths) else np.zeros(0)
    order = order_by_score(paths, scores)
    entries = [(paths[i], float(scores[i]), FeatureVector(*raw[i])) for i in order]
    return RankedList(report.id, entries, strategy, snapshot.label)


def permutation_importance(model: ForestModel, X, y, seed=0, repeats=5) -> dict:
    """Mean increase in squared error when one feature column is shuffled."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(y) == 0:
        raise ValueError("permutation importance needs validation rows")
    baseline = np.mean((model.predict(X) - y) ** 2)
    result = {}
    for j, name in enumerate(model.feature_names):
        rng = seeding.rng(seed, "importance", name)
        deltas = []
        for _ in range(repeats):
            shuffled = X.copy()
            shuffled[:, j] = rng.permutation(shuffled[:, j])
            deltas.append(np.mean((model.predict(shuffled) - y) ** 2) - baseline)
        result[name] = float(np.mean(deltas))
    return result


def feature_importance(model: ForestModel, X, y, seed=0, repeats=5) -> dict:
    """{"permutation": name -> MSE increase, "split_frequency": name -> share}."""
    return {
        "permutation": permutation_importance(model, X, y, seed, repeats),
        "split_frequency": model.split_frequency(),
    }
