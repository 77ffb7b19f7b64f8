"""Train the forest on one project and rank files for another.

Run: python demos/04_train_and_rank.py
"""

from buglocate.fusion import build_training_set, feature_importance, rank_files, train_forest
from buglocate.scoring import FeatureExtractor
from buglocate.synthetic import make_project

train_project = make_project("beta", seed=2, topic_offset=40)
test_project = make_project("alpha", seed=1)

extractor = FeatureExtractor.for_project(train_project)
rows = build_training_set(train_project, extractor, lambda r: train_project.snapshots[0], seed=0)
print(f"{len(rows)} training rows, {int(rows.y.sum())} positive")

model = train_forest(rows, tree_count=300, seed=0)
importance = feature_importance(model, rows.X, rows.y, seed=0)["permutation"]
print("most useful features:", sorted(importance, key=importance.get, reverse=True)[:4])
print()

extractor = FeatureExtractor.for_project(test_project)
for report in test_project.reports:
    ranking = rank_files(model, report, test_project.snapshots[0], extractor)
    rank = ranking.paths.index(report.fixed_files[0]) + 1
    print(f"{report.id:<10} rank {rank:>2}  {report.summary}")
