"""Write synthetic datasets in the on-disk layout the command line reads.

Run: python demos/make_dataset.py data
Creates data/train (two projects), data/eval (one project) and data/moved
(the rename fixture for comparing release and time-aware matching).
"""

import sys
from pathlib import Path

from buglocate.corpus import write_project
from buglocate.synthetic import make_project, make_rename_project

root = Path(sys.argv[1] if len(sys.argv) > 1 else "data")
write_project(make_project("beta", seed=2, topic_offset=40), root / "train" / "beta")
write_project(make_project("gamma", seed=5, topic_offset=60), root / "train" / "gamma")
write_project(make_project("alpha", seed=1), root / "eval" / "alpha")
write_project(make_rename_project("moved", seed=0), root / "moved" / "moved")
print(f"wrote datasets under {root}/")
