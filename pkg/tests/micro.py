"""Random micro-corpora with stack traces whose D and C sets are known."""

import random
from datetime import datetime, timedelta, timezone

from buglocate.corpus import BugReport, CommitRecord, Snapshot, SnapshotFile

CREATED = datetime(2022, 6, 1, tzinfo=timezone.utc)
PACKAGES = ["org.demo.core", "org.demo.io", "org.demo.ui"]
WORDS = "crash null parser render socket cache timeout login buffer widget token export".split()
MESSAGES = ["Fix crash", "Refactor", "Update docs", "bug in parser", "Failing test", "Cleanup", "ERROR handling"]
REPORTERS = ["ann", "ben", "cid"]


class MicroCorpus:
    def __init__(self, seed):
        rng = random.Random(seed)
        n_files = rng.randint(3, 10)
        self.files = []
        for i in range(n_files):
            pkg = rng.choice(PACKAGES)
            self.files.append((f"src/{pkg.replace('.', '/')}/C{i}.java", pkg, f"C{i}"))
        self.package_of = {p: pkg for p, pkg, _ in self.files}
        self.imports = {}
        sources = []
        for path, pkg, cls in self.files:
            others = [f for f in self.files if f[0] != path]
            imported = rng.sample(others, rng.randint(0, min(2, len(others))))
            self.imports[path] = {f[0] for f in imported}
            lines = [f"package {pkg};", ""]
            lines += [f"import {f[1]}.{f[2]};" for f in imported]
            lines += [f"public class {cls} {{", f"    void run{cls}() {{ }}", "}"]
            sources.append(SnapshotFile(path, "\n".join(lines) + "\n"))
        self.snapshot = Snapshot("1.0", CREATED - timedelta(days=365), tuple(sources))

        # The stack trace: known frames in random order, plus frames of deleted files.
        frames = [rng.choice(self.files) for _ in range(rng.randint(0, 8))]
        trace = []
        for path, pkg, cls in frames:
            if rng.random() < 0.2:
                trace.append(f"\tat org.gone.Removed.call(Removed.java:{rng.randint(1, 99)})")
            trace.append(f"\tat {pkg}.{cls}.run{cls}({cls}.java:{rng.randint(1, 99)})")
        self.direct_order = []
        for path, _, _ in frames:
            if path not in self.direct_order:
                self.direct_order.append(path)

        words = rng.sample(WORDS, 4)
        self.report = BugReport(
            id="Q-1",
            summary=" ".join(words[:2]),
            description=" ".join(words[2:]) + "\n" + "\n".join(trace),
            reporter=rng.choice(REPORTERS),
            created_at=CREATED,
            resolved_at=CREATED + timedelta(days=2),
            comments=("the query's own comment is never used",),
            fixed_files=(self.files[0][0],),
        )

        self.priors = []
        for j in range(rng.randint(0, 5)):
            created = CREATED - timedelta(days=rng.uniform(1, 100))
            resolved = created + timedelta(days=rng.uniform(0, 120))
            self.priors.append(
                BugReport(
                    id=f"P-{j}",
                    summary=" ".join(rng.sample(WORDS, 2)),
                    description=" ".join(rng.sample(WORDS, 3)),
                    reporter=rng.choice(REPORTERS),
                    created_at=created,
                    resolved_at=resolved,
                    comments=(" ".join(rng.sample(WORDS, 2)),),
                    fixed_files=tuple(f[0] for f in rng.sample(self.files, rng.randint(0, 3))),
                )
            )

        self.commits = []
        for j in range(rng.randint(0, 30)):
            when = CREATED - timedelta(days=rng.uniform(-10, 80))
            touched = rng.sample(self.files, rng.randint(1, 3))
            self.commits.append(CommitRecord(f"h{j}", when, rng.choice(MESSAGES), tuple(f[0] for f in touched)))

    @property
    def paths(self):
        return [p for p, _, _ in self.files]

    @property
    def reports(self):
        return [self.report] + self.priors

    def context(self):
        """Set C: package siblings and imports of every directly named file."""
        out = set()
        for d in self.direct_order:
            out |= {p for p in self.paths if self.package_of[p] == self.package_of[d]}
            out |= self.imports[d]
        return out
