"""Small planted Java projects with known answers.

Each generated file revolves around two topic words that appear in its
class name, methods and comments. Reports come in three kinds, each with
one fixed file:

* ``trace``: a stack trace whose first frame is the fixed file,
* ``named``: the summary quotes the fixed file or its class,
* ``text``: prose that uses only the fixed file's topic words.
"""

from datetime import datetime, timedelta, timezone

import numpy as np

from .corpus import BugReport, CommitRecord, Project, Snapshot, SnapshotFile

EPOCH = datetime(2020, 1, 1, tzinfo=timezone.utc)

TOPICS = (
    "invoice ledger render socket parser cache scheduler payment thumbnail cipher "
    "compressor mailbox router session printer calendar gradient histogram spreadsheet "
    "bookmark playlist firmware telemetry checkout inventory shipment warehouse tariff "
    "voucher subscription avatar captcha geocoder weather forecast satellite orbit turbine "
    "glacier harbor lantern meadow orchard quarry saddle tunnel violin walrus yacht zephyr "
    "beacon canyon dolphin ember falcon grotto hamlet igloo jasper kettle lagoon magnet"
).split()
VERBS = "load save apply merge build check compute update resolve format".split()
REPORTERS = "alice bob carol dave erin frank".split()
MODULES = "core io net ui util model".split()


def _camel(*words):
    return "".join(w.capitalize() for w in words)


def day(n: float) -> datetime:
    return EPOCH + timedelta(days=n)


class _Planted:
    def __init__(self, name, path, package, cls, words, methods):
        self.name = name
        self.path = path
        self.package = package
        self.cls = cls
        self.words = words
        self.methods = methods


def _java_source(f, imports, rng):
    a, b = f.words
    lines = [f"package {f.package};", ""]
    lines += [f"import {imp};" for imp in imports]
    lines += ["import java.util.ArrayList;", "import java.util.List;", ""]
    lines += ["/**", f" * Keeps track of {a} and {b} entries.", " */"]
    lines += [f"public class {f.cls} {{", ""]
    lines += [f"    private final List<String> {a}Entries = new ArrayList<>();", ""]
    lines += [f"    public {f.cls}() {{", "    }", ""]
    for i, m in enumerate(f.methods):
        lines += [
            f"    public int {m}(String {b}Name) {{",
            f"        // {a} {b} handling",
            f"        if ({b}Name == null) {{",
            f'            throw new IllegalArgumentException("missing {b}");',
            "        }",
            f"        {a}Entries.add({b}Name);",
            f"        return {a}Entries.size() + {i};",
            "    }",
            "",
        ]
    for k in range(int(rng.integers(0, 6))):
        lines += [f"    int helper{k}() {{", f"        return {k};", "    }", ""]
    lines.append("}")
    return "\n".join(lines) + "\n"


def _plant_files(prefix, topics, n_files, rng):
    files = []
    for i in range(n_files):
        a, b = topics[2 * i], topics[2 * i + 1]
        module = MODULES[i % len(MODULES)]
        package = f"org.{prefix}.{module}"
        cls = _camel(a, b)
        verbs = rng.choice(VERBS, size=2, replace=False)
        methods = [f"{verbs[0]}{a.capitalize()}", f"{verbs[1]}{b.capitalize()}"]
        path = f"src/main/java/org/{prefix}/{module}/{cls}.java"
        files.append(_Planted(cls, path, package, cls, (a, b), methods))
    return files


def _trace_text(chain, line_numbers):
    frames = [
        f"\tat {f.package}.{f.cls}.{f.methods[0]}({f.cls}.java:{ln})" for f, ln in zip(chain, line_numbers)
    ]
    return "java.lang.IllegalStateException: unexpected state\n" + "\n".join(frames)


def make_project(
    name="alpha",
    seed=0,
    n_files=20,
    kinds=("trace",) * 4 + ("named",) * 3 + ("text",) * 3,
    topic_offset=0,
    n_commits=40,
):
    """A Project with one release snapshot preceding all planted reports.

    ``topic_offset`` selects which topic words the files use, so projects
    built with offsets far apart share no vocabulary.
    """
    rng = np.random.default_rng(seed)
    topics = [TOPICS[(topic_offset + i) % len(TOPICS)] for i in range(2 * n_files)]
    planted = _plant_files(name, topics, n_files, rng)
    sources = {}
    for i, f in enumerate(planted):
        other = planted[(i + 1) % n_files]
        sources[f.path] = _java_source(f, [f"{other.package}.{other.cls}"], rng)
    release = Snapshot("1.0", day(0), tuple(SnapshotFile(p, c) for p, c in sources.items()))

    commits = []
    for j in range(n_commits):
        touched = rng.choice(n_files, size=int(rng.integers(1, 4)), replace=False)
        msg = str(rng.choice(["Refactor", "Tidy up", "Fix typo in", "Improve", "Fix failing"]))
        commits.append(
            CommitRecord(
                f"{name}-c{j:03d}",
                day(float(rng.uniform(-60, 5 + 10 * len(kinds)))),
                f"{msg} {planted[touched[0]].cls}",
                tuple(planted[t].path for t in touched),
            )
        )

    reports = []
    targets = rng.permutation(n_files)
    for r, kind in enumerate(kinds):
        f = planted[targets[r % n_files]]
        a, b = f.words
        created = day(10 + 10 * r)
        if kind == "trace":
            others = [planted[t] for t in rng.choice(
                [t for t in range(n_files) if planted[t] is not f], size=2, replace=False)]
            summary = f"IllegalStateException while trying to {f.methods[0]}"
            description = "Stack trace:\n" + _trace_text([f] + others, rng.integers(10, 90, size=3))
        elif kind == "named":
            if r % 2:
                summary = f"{f.cls} drops entries"
                description = f"Calling {f.methods[1]} on {f.cls} loses the last entry."
            else:
                summary = f"Wrong count returned in {f.cls}.java"
                description = f"The class {f.cls} returns a stale size after an update."
        else:
            summary = f"The {a} total is wrong"
            description = f"After adding a {b} the {a} {b} list shows an outdated {a} value for every {b}."
        reports.append(
            BugReport(
                id=f"{name.upper()}-{r + 1}",
                project=name,
                summary=summary,
                description=description,
                reporter=str(rng.choice(REPORTERS)),
                created_at=created,
                resolved_at=created + timedelta(days=3),
                comments=(f"Confirmed, the {a} code path is affected.",),
                fixed_files=(f.path,),
            )
        )
        commits.append(
            CommitRecord(f"{name}-fix{r + 1}", created + timedelta(days=2), f"Fix {name.upper()}-{r + 1}", (f.path,))
        )
    return Project(name, reports, commits, [release])


def make_rename_project(name="moved", seed=0, n_files=12):
    """A project where one file moves to another package after release 1.0.

    Report ``<NAME>-MOVED`` is filed after the move, names the new location
    in its stack trace and lists release 1.1 as its fixed version, so release
    matching cannot see the fixed file while time-aware matching can.
    """
    base = make_project(name, seed, n_files=n_files, kinds=("trace", "named", "text", "trace"), topic_offset=40)
    r10 = base.snapshots[0]
    moved = r10.files[0]
    module_dir, file_name = moved.path.rsplit("/", 1)
    new_path = module_dir.rsplit("/", 1)[0] + "/relocated/" + file_name
    old_pkg = moved.path.rsplit("/", 1)[0].split("src/main/java/")[1].replace("/", ".")
    new_pkg = new_path.rsplit("/", 1)[0].split("src/main/java/")[1].replace("/", ".")
    moved_content = moved.content.replace(f"package {old_pkg};", f"package {new_pkg};")
    later_files = [f for f in r10.files if f.path != moved.path] + [SnapshotFile(new_path, moved_content)]
    r11 = Snapshot("1.1", day(200), tuple(later_files))
    cls = new_path.rsplit("/", 1)[1][: -len(".java")]
    report = BugReport(
        id=f"{name.upper()}-MOVED",
        project=name,
        summary=f"IllegalStateException in {cls} after the package move",
        description=f"java.lang.IllegalStateException\n\tat {new_pkg}.{cls}.run({cls}.java:12)",
        reporter="alice",
        created_at=day(150),
        resolved_at=day(160),
        fixed_files=(new_path,),
        fixed_versions=("1.1",),
    )
    move_commit = CommitRecord(f"{name}-move", day(120), f"Move {cls} to {new_pkg}", (new_path,))
    return Project(name, base.reports + [report], base.commits + [move_commit], [r10, r11])
