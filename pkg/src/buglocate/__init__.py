"""Bug localization by fusing information-retrieval scores with a random forest."""

from .corpus import BugReport, CommitRecord, Project, Snapshot, SnapshotFile
from .evalbench import EvalConfig, run_phase1, run_phase2, run_phase3
from .fusion import ForestModel, RankedList, rank_files, train_forest
from .scoring import FEATURE_NAMES, FeatureExtractor, FeatureVector
from .textprep import tokenize

__version__ = "0.1.0"
