"""Bug reports, commit logs, code snapshots and snapshot matching.

Reports and commits are read from line-delimited JSON files; snapshots are
materialized directory trees listed in a tab-separated manifest.
"""

import bisect
import csv
import json
import logging
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

logger = logging.getLogger(__name__)

REQUIRED_REPORT_FIELDS = ("id", "summary", "created_at")
REQUIRED_COMMIT_FIELDS = ("hash", "timestamp", "files")


class CorpusError(ValueError):
    """Raised when a corpus file is unreadable or contains invalid records."""

    def __init__(self, message, diagnostics=()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)


def parse_timestamp(value) -> datetime:
    """Parse an RFC 3339 string (or epoch seconds) into an aware UTC datetime."""
    if isinstance(value, datetime):
        dt = value
    elif isinstance(value, (int, float)):
        return datetime.fromtimestamp(value, tz=timezone.utc)
    else:
        text = str(value).strip()
        if text.endswith(("Z", "z")):
            text = text[:-1] + "+00:00"
        dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def normalize_path(path: str) -> str:
    return str(path).replace("\\", "/").lstrip("/")


@dataclass(frozen=True)
class BugReport:
    id: str
    summary: str
    created_at: datetime
    description: str = ""
    reporter: str = ""
    project: str = ""
    resolved_at: Optional[datetime] = None
    comments: tuple = ()
    fixed_files: tuple = ()
    fixed_versions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "created_at", parse_timestamp(self.created_at))
        if self.resolved_at is not None:
            object.__setattr__(self, "resolved_at", parse_timestamp(self.resolved_at))
            if self.resolved_at < self.created_at:
                raise ValueError(
                    f"report {self.id}: resolved_at {self.resolved_at} precedes "
                    f"created_at {self.created_at}"
                )
        object.__setattr__(self, "comments", tuple(self.comments))
        object.__setattr__(self, "fixed_files", tuple(normalize_path(p) for p in self.fixed_files))
        object.__setattr__(self, "fixed_versions", tuple(str(v) for v in self.fixed_versions))

    @property
    def text(self) -> str:
        """Summary and description, the text every query is built from."""
        return f"{self.summary}\n{self.description}"

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "project": self.project,
            "summary": self.summary,
            "description": self.description,
            "reporter": self.reporter,
            "created_at": format_timestamp(self.created_at),
            "resolved_at": format_timestamp(self.resolved_at) if self.resolved_at else None,
            "comments": list(self.comments),
            "fixed_files": list(self.fixed_files),
            "fixed_versions": list(self.fixed_versions),
        }


@dataclass(frozen=True)
class CommitRecord:
    hash: str
    timestamp: datetime
    message: str
    files: tuple

    def __post_init__(self):
        object.__setattr__(self, "timestamp", parse_timestamp(self.timestamp))
        object.__setattr__(self, "files", tuple(normalize_path(p) for p in self.files))
        if not self.files:
            raise ValueError(f"commit {self.hash} touches no files")

    def to_record(self) -> dict:
        return {
            "hash": self.hash,
            "timestamp": format_timestamp(self.timestamp),
            "message": self.message,
            "files": list(self.files),
        }


def count_loc(content: str) -> int:
    """Number of lines holding at least one non-whitespace character."""
    return sum(1 for line in content.splitlines() if line.strip())


@dataclass(frozen=True)
class SnapshotFile:
    path: str
    content: str

    def __post_init__(self):
        object.__setattr__(self, "path", normalize_path(self.path))

    @cached_property
    def loc(self) -> int:
        return count_loc(self.content)


@dataclass(frozen=True)
class Snapshot:
    label: str
    timestamp: datetime
    files: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "timestamp", parse_timestamp(self.timestamp))
        kept = tuple(f for f in self.files if f.path.endswith(".java"))
        paths = [f.path for f in kept]
        if len(set(paths)) != len(paths):
            raise ValueError(f"snapshot {self.label}: duplicate file paths")
        object.__setattr__(self, "files", tuple(sorted(kept, key=lambda f: f.path)))

    @cached_property
    def paths(self) -> frozenset:
        return frozenset(f.path for f in self.files)

    @cached_property
    def by_path(self) -> dict:
        return {f.path: f for f in self.files}

    def __contains__(self, path) -> bool:
        return path in self.paths

    def __len__(self) -> int:
        return len(self.files)


@dataclass
class Project:
    """All inputs for one project: reports, commit history and snapshots."""

    name: str
    reports: list = field(default_factory=list)
    commits: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)

    def __post_init__(self):
        ids = [r.id for r in self.reports]
        if len(set(ids)) != len(ids):
            raise ValueError(f"project {self.name}: duplicate report ids")
        self.reports = sorted(self.reports, key=lambda r: (r.created_at, r.id))
        self.commits = sorted(self.commits, key=lambda c: (c.timestamp, c.hash))
        self.snapshots = sorted(self.snapshots, key=lambda s: (s.timestamp, s.label))

    @property
    def version_index(self) -> dict:
        return {s.label: s for s in self.snapshots}

    def report(self, report_id: str) -> BugReport:
        for r in self.reports:
            if r.id == report_id:
                return r
        raise KeyError(report_id)


def _read_jsonl(path):
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if line.strip():
            yield lineno, line


def _load_records(path, required, build, strict):
    items, diagnostics = [], []
    for lineno, line in _read_jsonl(path):
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            diagnostics.append(f"{path}:{lineno}: malformed JSON ({exc.msg})")
            continue
        if not isinstance(record, dict):
            diagnostics.append(f"{path}:{lineno}: record is not an object")
            continue
        missing = [k for k in required if record.get(k) in (None, "")]
        if missing:
            diagnostics.append(f"{path}:{lineno}: missing required field(s) {', '.join(missing)}")
            continue
        try:
            items.append(build(record))
        except (ValueError, TypeError) as exc:
            diagnostics.append(f"{path}:{lineno}: {exc}")
    if diagnostics:
        if strict:
            raise CorpusError(f"{len(diagnostics)} invalid record(s) in {path}", diagnostics)
        for d in diagnostics:
            logger.warning(d)
    return items


def _report_from_record(record, project=""):
    return BugReport(
        id=str(record["id"]),
        project=record.get("project") or project,
        summary=record["summary"],
        description=record.get("description") or "",
        reporter=record.get("reporter") or "",
        created_at=record["created_at"],
        resolved_at=record.get("resolved_at"),
        comments=record.get("comments") or (),
        fixed_files=record.get("fixed_files") or (),
        fixed_versions=record.get("fixed_versions") or (),
    )


def load_bug_reports(source, project="", strict=True) -> list:
    """Read one BugReport per line of a JSON-lines file.

    With ``strict`` any invalid record raises CorpusError whose
    ``diagnostics`` name the offending line numbers; otherwise invalid
    records are logged and skipped.
    """
    return _load_records(
        source, REQUIRED_REPORT_FIELDS, lambda r: _report_from_record(r, project), strict
    )


def load_commits(source, strict=True) -> list:
    def build(r):
        return CommitRecord(str(r["hash"]), r["timestamp"], r.get("message") or "", r["files"])

    commits = _load_records(source, REQUIRED_COMMIT_FIELDS, build, strict)
    hashes = [c.hash for c in commits]
    if len(set(hashes)) != len(hashes):
        raise CorpusError(f"duplicate commit hashes in {source}")
    return commits


def write_jsonl(path, records: Iterable) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_record() if hasattr(rec, "to_record") else rec, sort_keys=True))
            fh.write("\n")


def load_snapshot(root, label, timestamp) -> Snapshot:
    """Collect every .java file below ``root`` into a Snapshot."""
    root = Path(root)
    if not root.is_dir():
        raise CorpusError(f"snapshot root {root} is not a directory")
    files = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for name in sorted(filenames):
            if name.endswith(".java"):
                full = Path(dirpath) / name
                text = full.read_text(encoding="utf-8", errors="replace")
                files.append(SnapshotFile(full.relative_to(root).as_posix(), text))
    return Snapshot(label, timestamp, tuple(files))


def load_snapshot_manifest(manifest) -> list:
    """Load snapshots from a manifest of ``label<TAB>timestamp<TAB>root`` rows.

    Relative roots are resolved against the manifest's directory. Lines
    starting with ``#`` are ignored. Returned snapshots are sorted by time.
    """
    manifest = Path(manifest)
    if not manifest.is_file():
        raise CorpusError(f"snapshot manifest not found: {manifest}")
    snapshots = []
    with manifest.open(encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), start=1):
            if not row or not row[0].strip() or row[0].startswith("#"):
                continue
            if len(row) != 3:
                raise CorpusError(f"{manifest}:{lineno}: expected label, timestamp, root")
            label, ts, root = (c.strip() for c in row)
            snapshots.append(load_snapshot(manifest.parent / root, label, ts))
    return sorted(snapshots, key=lambda s: (s.timestamp, s.label))


def write_snapshot(snapshot: Snapshot, root) -> None:
    root = Path(root)
    for f in snapshot.files:
        target = root / f.path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(f.content, encoding="utf-8")


def load_project(directory, name=None, strict=True) -> Project:
    """Load ``reports.jsonl``, ``commits.jsonl`` and ``snapshots.tsv`` from a directory."""
    directory = Path(directory)
    name = name or directory.name
    reports = load_bug_reports(directory / "reports.jsonl", project=name, strict=strict)
    commits_path = directory / "commits.jsonl"
    commits = load_commits(commits_path, strict=strict) if commits_path.exists() else []
    snapshots = load_snapshot_manifest(directory / "snapshots.tsv")
    return Project(name, reports, commits, snapshots)


def load_dataset(directory, strict=True) -> list:
    """Load every project subdirectory (one holding a reports.jsonl) of ``directory``."""
    directory = Path(directory)
    if not directory.is_dir():
        raise CorpusError(f"dataset directory not found: {directory}")
    return [
        load_project(p, strict=strict)
        for p in sorted(directory.iterdir())
        if (p / "reports.jsonl").is_file()
    ]


def write_project(project: Project, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_jsonl(directory / "reports.jsonl", project.reports)
    write_jsonl(directory / "commits.jsonl", project.commits)
    rows = []
    for snap in project.snapshots:
        rel = f"snapshots/{snap.label}"
        write_snapshot(snap, directory / rel)
        (directory / rel).mkdir(parents=True, exist_ok=True)
        rows.append(f"{snap.label}\t{format_timestamp(snap.timestamp)}\t{rel}\n")
    (directory / "snapshots.tsv").write_text("".join(rows), encoding="utf-8")


# -- snapshot matching -------------------------------------------------------


def resolve_release_snapshot(report: BugReport, releases: Sequence[Snapshot]) -> Snapshot:
    """Latest release strictly before the report; the earliest one if none precedes it."""
    if not releases:
        raise ValueError("no releases to match against")
    ordered = sorted(releases, key=lambda s: (s.timestamp, s.label))
    times = [s.timestamp for s in ordered]
    idx = bisect.bisect_left(times, report.created_at)
    if idx == 0:
        return ordered[0]
    # Equal timestamps among earlier releases: take the earliest of the group.
    best = times[idx - 1]
    return ordered[bisect.bisect_left(times, best)]


def precedes_all_releases(report: BugReport, releases: Sequence[Snapshot]) -> bool:
    """True when the release matcher had to fall back to the earliest release."""
    return all(s.timestamp >= report.created_at for s in releases)


def resolve_timeaware_snapshots(
    report: BugReport,
    releases: Sequence[Snapshot],
    version_index: Optional[Mapping[str, Snapshot]] = None,
) -> list:
    """Snapshots a report is localized against under time-aware matching.

    Fixed-version snapshots when the report names resolvable fixed versions;
    otherwise every earlier snapshot containing at least one fixed file.
    An empty list marks the report undetectable.
    """
    version_index = version_index if version_index is not None else {s.label: s for s in releases}
    if report.fixed_versions:
        found = [version_index[v] for v in report.fixed_versions if v in version_index]
        missing = [v for v in report.fixed_versions if v not in version_index]
        if missing:
            logger.warning("report %s: unknown fixed version(s) %s", report.id, ", ".join(missing))
        if found:
            unique = {id(s): s for s in found}.values()
            return sorted(unique, key=lambda s: (s.timestamp, s.label))
    fixed = set(report.fixed_files)
    return sorted(
        (s for s in releases if s.timestamp < report.created_at and fixed & s.paths),
        key=lambda s: (s.timestamp, s.label),
    )


@dataclass
class DetectabilityStats:
    strategy: str
    total_files: int = 0
    undetectable_files: int = 0
    total_bugs: int = 0
    undetectable_bugs: int = 0
    undetectable_report_ids: list = field(default_factory=list)

    @property
    def undetectable_file_pct(self) -> float:
        return 100.0 * self.undetectable_files / self.total_files if self.total_files else 0.0

    @property
    def undetectable_bug_pct(self) -> float:
        return 100.0 * self.undetectable_bugs / self.total_bugs if self.total_bugs else 0.0

    def __add__(self, other):
        if self.strategy != other.strategy:
            raise ValueError("cannot combine stats of different strategies")
        return DetectabilityStats(
            self.strategy,
            self.total_files + other.total_files,
            self.undetectable_files + other.undetectable_files,
            self.total_bugs + other.total_bugs,
            self.undetectable_bugs + other.undetectable_bugs,
            self.undetectable_report_ids + other.undetectable_report_ids,
        )

    def to_record(self) -> dict:
        return {
            "strategy": self.strategy,
            "total_files": self.total_files,
            "undetectable_files": self.undetectable_files,
            "undetectable_file_pct": self.undetectable_file_pct,
            "total_bugs": self.total_bugs,
            "undetectable_bugs": self.undetectable_bugs,
            "undetectable_bug_pct": self.undetectable_bug_pct,
            "undetectable_report_ids": list(self.undetectable_report_ids),
        }


def matched_snapshots(report, strategy, snapshots, version_index=None) -> list:
    if strategy == "release":
        return [resolve_release_snapshot(report, snapshots)]
    if strategy == "timeaware":
        return resolve_timeaware_snapshots(report, snapshots, version_index)
    raise ValueError(f"unknown strategy {strategy!r}")


def detectability_report(reports, strategy, snapshots, version_index=None) -> DetectabilityStats:
    """Count fixed files and bugs that cannot be found in the matched snapshot(s)."""
    stats = DetectabilityStats(strategy)
    for report in reports:
        if not report.fixed_files:
            continue
        matched = matched_snapshots(report, strategy, snapshots, version_index)
        present = set().union(*(s.paths for s in matched)) if matched else set()
        missing = [p for p in report.fixed_files if p not in present]
        stats.total_files += len(report.fixed_files)
        stats.undetectable_files += len(missing)
        stats.total_bugs += 1
        if len(missing) == len(report.fixed_files):
            stats.undetectable_bugs += 1
            stats.undetectable_report_ids.append(report.id)
    return stats
