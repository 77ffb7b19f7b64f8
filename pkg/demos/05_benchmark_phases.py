"""The three benchmark phases on small synthetic projects.

Run: python demos/05_benchmark_phases.py
"""

from buglocate.evalbench import EvalConfig, run_phase1, run_phase2, run_phase3
from buglocate.synthetic import make_project, make_rename_project

config = EvalConfig(tree_count=200, seed=0)
projects = [
    make_project("alpha", seed=1),
    make_project("beta", seed=2, topic_offset=40),
    make_project("gamma", seed=3, topic_offset=20),
]

# Phase 1: leave one project out.
print(run_phase1(projects, config).table())
print()

# Phase 2: train on one dataset, evaluate on another. Projects present in
# both are skipped.
print(run_phase2(projects[:2], [projects[2], make_project("delta", seed=4, topic_offset=60)], config).table())
print()

# Phase 3: the same model under release and time-aware matching. In the
# rename fixture one file moves after release 1.0, so release matching
# cannot see it while time-aware matching can.
result = run_phase3([make_rename_project("moved", seed=0)], config, train_dataset=projects)
print(result.release.table())
print()
print(result.timeaware.table())
