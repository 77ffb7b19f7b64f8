"""The thirteen component scores of one report against one snapshot.

Run: python demos/03_component_scores.py
"""

from buglocate.scoring import FEATURE_NAMES, FeatureExtractor
from buglocate.synthetic import make_project

project = make_project("alpha", seed=1)
report = project.reports[0]  # a report with a stack trace
snapshot = project.snapshots[0]
print(report.summary)
print(report.description)
print()

extractor = FeatureExtractor.for_project(project)
paths, raw, normalized = extractor.matrix(report, snapshot)

# Show the files with any stack-trace evidence and the fixed file.
stack = FEATURE_NAMES.index("stacktrace")
shown = [i for i, p in enumerate(paths) if raw[i, stack] > 0 or p in report.fixed_files]
print(f"{'file':<26}" + "".join(f"{n[:9]:>10}" for n in FEATURE_NAMES))
for i in shown:
    mark = "*" if paths[i] in report.fixed_files else " "
    print(f"{mark}{paths[i].rsplit('/', 1)[1]:<25}" + "".join(f"{v:>10.3f}" for v in normalized[i]))
print("\n* = fixed file. Everything except the stack-trace score is max-normalized per report.")
