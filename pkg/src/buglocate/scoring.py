"""Per-(report, file) component scores.

Thirteen scores per candidate file: file size, three structure matches,
stack trace, version history, three bug-report similarities (cosine,
reporter, search engine on summary and on description) and three search
engine scores over the file index.
"""

import math
import re
from collections import Counter
from dataclasses import astuple, dataclass, fields
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .codestruct import FileStructure, parse_structure
from .corpus import BugReport, CommitRecord, Snapshot
from .searchengine import B, K1, FieldedDocument, build_index, max_normalize
from .textprep import DEFAULT, REPORT_TEXT, SOURCE_CODE

SECONDS_PER_DAY = 86400.0
STACK_FRAME_LIMIT = 10
MIN_HISTORY_COMMITS = 15
INITIAL_HISTORY_DAYS = 15
FIX_MESSAGE = re.compile(r"fix|bug|fail|error", re.IGNORECASE)

FILE_FIELDS = ("content", "methods", "path")
REPORT_FIELDS = ("summary", "content")


@dataclass(frozen=True)
class FeatureVector:
    size: float = 0.0
    file_match: float = 0.0
    class_match: float = 0.0
    method_match: float = 0.0
    stacktrace: float = 0.0
    version_history: float = 0.0
    sim_cos: float = 0.0
    sim_reporter: float = 0.0
    se_content: float = 0.0
    se_method: float = 0.0
    se_path: float = 0.0
    br_summary: float = 0.0
    br_description: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)


FEATURE_NAMES = tuple(f.name for f in fields(FeatureVector))
# Bounded in [0, 1] by construction; every other column is max-normalized per query.
_UNSCALED = {"stacktrace"}


def normalize_matrix(raw: np.ndarray) -> np.ndarray:
    """Per-query max-normalization of the count- and sum-valued columns."""
    out = np.array(raw, dtype=float, copy=True)
    if out.size == 0:
        return out
    for j, name in enumerate(FEATURE_NAMES):
        if name in _UNSCALED:
            continue
        top = out[:, j].max()
        if top > 0:
            out[:, j] /= top
    return out


# -- file size and structure ---------------------------------------------------


def score_size(file) -> float:
    return float(file.loc)


def _count_identifier(name: str, text: str, exclude_suffix: str = "") -> int:
    if not name:
        return 0
    tail = r"(?![\w$])"
    if exclude_suffix:
        tail += f"(?!{re.escape(exclude_suffix)}{tail})"
    return len(re.findall(rf"(?<![\w$]){re.escape(name)}{tail}", text))


def score_structure(report: BugReport, fs: FileStructure) -> tuple:
    """Occurrences of the file name, class names and method names in the report.

    Matching is case-sensitive on identifier boundaries. ``Foo.java`` counts
    once for the file name; a bare ``Foo`` counts once more, but the ``Foo``
    inside ``Foo.java`` is not counted twice.
    """
    text = report.text
    file_match = _count_identifier(fs.file_name, text)
    if fs.base_name != fs.file_name:
        file_match += _count_identifier(fs.base_name, text, exclude_suffix=".java")
    class_match = sum(_count_identifier(c, text) for c in fs.classes)
    method_match = sum(_count_identifier(m, text) for m in fs.methods)
    return float(file_match), float(class_match), float(method_match)


# -- stack traces ----------------------------------------------------------------


@dataclass(frozen=True)
class StackTraceSets:
    direct: tuple = ()  # (path, rank), rank 1-based in order of appearance
    context: frozenset = frozenset()

    @property
    def ranks(self) -> dict:
        return dict(self.direct)


_JAVA_MENTION = re.compile(
    r"(?P<qual>[A-Za-z_$][\w$]*(?:\.[A-Za-z_$][\w$]*)+)\s*\(\s*(?P<file>[\w$-]+\.java)(?::\d+)?\s*\)"
    r"|(?P<phrase>[\w$./\\-]*[\w$]\.java)(?![\w$])"
)


def _suffix_matches(suffix: str, known: Iterable[str]) -> list:
    return sorted(p for p in known if p == suffix or p.endswith("/" + suffix))


def _resolve_mention(match, known) -> list:
    if match.group("qual"):
        parts = match.group("qual").split(".")
        package = parts[:-2]  # drop Class and method
        if package:
            found = _suffix_matches("/".join(package + [match.group("file")]), known)
            if found:
                return found
        return _suffix_matches(match.group("file"), known)
    phrase = match.group("phrase").replace("\\", "/").lstrip("./")
    stem = phrase[: -len(".java")]
    if "/" not in stem and "." in stem:
        found = _suffix_matches(stem.replace(".", "/") + ".java", known)
        if found:
            return found
        phrase = stem.rsplit(".", 1)[-1] + ".java"
    return _suffix_matches(phrase, known)


def _resolve_import(name: str, structures: Mapping[str, FileStructure], by_package) -> set:
    if name.endswith(".*"):
        pkg = name[:-2]
        hits = set(by_package.get(pkg, ()))
        if hits:
            return hits
        # ``import static a.b.Cls.*`` names a class, not a package.
        name = pkg
    parts = name.split(".")
    while len(parts) > 1:
        found = _suffix_matches("/".join(parts) + ".java", structures)
        if found:
            return set(found)
        parts = parts[:-1]
    return set()


def _package_key(path, fs):
    if fs.package:
        return fs.package
    return "/dir:" + (path.rsplit("/", 1)[0] if "/" in path else "")


def package_index(structures: Mapping[str, FileStructure]) -> dict:
    """Package name -> paths; files without a package are grouped by directory."""
    index = {}
    for path, fs in structures.items():
        index.setdefault(_package_key(path, fs), []).append(path)
    return index


def extract_stacktrace(
    report: BugReport,
    known_files: Iterable[str],
    structures: Optional[Mapping[str, FileStructure]] = None,
    by_package=None,
) -> StackTraceSets:
    """Files named in ``.java`` mentions (D) and files related to them (C).

    Mentions are resolved against ``known_files`` by path suffix; mentions of
    files outside the code base are dropped. C holds the imports and package
    siblings of every file in D.
    """
    known = known_files if isinstance(known_files, (set, frozenset, dict)) else set(known_files)
    direct = {}
    for match in _JAVA_MENTION.finditer(report.text):
        for path in _resolve_mention(match, known):
            if path not in direct:
                direct[path] = len(direct) + 1
    context = set()
    if structures and direct:
        if by_package is None:
            by_package = package_index(structures)
        for path in direct:
            fs = structures.get(path)
            if fs is None:
                continue
            context.update(by_package.get(_package_key(path, fs), ()))
            for name in fs.imports:
                context.update(_resolve_import(name, structures, by_package))
    context &= set(known)
    return StackTraceSets(tuple(direct.items()), frozenset(context))


def score_stacktrace(path: str, sets: StackTraceSets) -> float:
    rank = sets.ranks.get(path)
    if rank is not None and rank <= STACK_FRAME_LIMIT:
        return 1.0 / rank
    if rank is not None or path in sets.context:
        return 0.1
    return 0.0


# -- version history ---------------------------------------------------------


def elapsed_days(earlier, later) -> float:
    return (later - earlier).total_seconds() / SECONDS_PER_DAY


def history_window(report: BugReport, commits: Sequence[CommitRecord]) -> tuple:
    """Relevant commits and the window length k (days) for one report.

    k starts at 15 and grows one day at a time while the window holds fewer
    than 15 commits and older commits remain. A commit is relevant when its
    message looks like a fix or it falls inside the window.
    """
    prior = [c for c in commits if c.timestamp < report.created_at]
    if not prior:
        return [], INITIAL_HISTORY_DAYS
    ages = sorted(elapsed_days(c.timestamp, report.created_at) for c in prior)
    if len(ages) >= MIN_HISTORY_COMMITS:
        needed = ages[MIN_HISTORY_COMMITS - 1]
    else:
        needed = ages[-1]
    k = max(INITIAL_HISTORY_DAYS, math.ceil(needed))
    relevant = [
        c
        for c in prior
        if FIX_MESSAGE.search(c.message) or elapsed_days(c.timestamp, report.created_at) <= k
    ]
    return relevant, k


def history_weight(age_days: float, k: float) -> float:
    x = 12.0 * (1.0 - (k - age_days) / k)
    if x > 700:
        return 0.0
    return 1.0 / (1.0 + math.exp(x))


def version_history_scores(report: BugReport, commits: Sequence[CommitRecord]) -> dict:
    """Version-history score for every file touched by a relevant commit."""
    relevant, k = history_window(report, commits)
    scores = {}
    for c in relevant:
        w = history_weight(elapsed_days(c.timestamp, report.created_at), k)
        for path in set(c.files):
            scores[path] = scores.get(path, 0.0) + w
    return scores


def score_version_history(path: str, report: BugReport, commits: Sequence[CommitRecord]) -> float:
    return version_history_scores(report, commits).get(path, 0.0)


# -- bug report similarity -----------------------------------------------------


def cosine_similarity(a, b) -> float:
    """Cosine of two term-frequency vectors given as token lists or Counters."""
    ca = a if isinstance(a, Counter) else Counter(a)
    cb = b if isinstance(b, Counter) else Counter(b)
    if not ca or not cb:
        return 0.0
    if len(ca) > len(cb):
        ca, cb = cb, ca
    dot = sum(v * cb.get(t, 0) for t, v in ca.items())
    if dot == 0:
        return 0.0
    na = math.sqrt(sum(v * v for v in ca.values()))
    nb = math.sqrt(sum(v * v for v in cb.values()))
    return min(1.0, dot / (na * nb))


def reporter_similarity(a: BugReport, b: BugReport) -> float:
    return 1.0 if a.reporter and a.reporter == b.reporter else 0.0


def is_prior(candidate: BugReport, report: BugReport) -> bool:
    """True for reports resolved strictly before ``report`` was created."""
    return (
        candidate.id != report.id
        and candidate.resolved_at is not None
        and candidate.resolved_at < report.created_at
    )


def score_similar_reports(report: BugReport, history: Iterable[BugReport], sim: Callable) -> dict:
    """Spread sim(report, prior) evenly over each prior report's fixed files."""
    scores = {}
    for prior in history:
        if not is_prior(prior, report) or not prior.fixed_files:
            continue
        fixed = set(prior.fixed_files)
        share = sim(report, prior) / len(fixed)
        if share == 0:
            continue
        for path in fixed:
            scores[path] = scores.get(path, 0.0) + share
    return scores


# -- search engine over source files --------------------------------------------


def mentions_paths(report: BugReport) -> bool:
    return any(".java" in t or "/" in t for t in (report.summary, report.description))


def build_file_index(snapshot: Snapshot, structures: Mapping[str, FileStructure], pre=DEFAULT, k1=K1, b=B):
    docs = [
        FieldedDocument(
            f.path,
            {
                "content": pre.tokenize(f.content, SOURCE_CODE),
                "methods": pre.tokenize(" ".join(structures[f.path].methods), SOURCE_CODE),
                "path": pre.tokenize(f.path, SOURCE_CODE),
            },
        )
        for f in snapshot.files
    ]
    return build_index(docs, FILE_FIELDS, k1, b)


def score_search_engine(report: BugReport, file_index, pre=DEFAULT) -> dict:
    """path -> (se_content, se_method, se_path), each max-normalized per query."""
    terms = pre.tokenize(report.text, REPORT_TEXT)
    content = max_normalize(file_index.query("content", terms))
    method = max_normalize(file_index.query("methods", terms))
    path = max_normalize(file_index.query("path", terms)) if mentions_paths(report) else {}
    return {
        d: (content.get(d, 0.0), method.get(d, 0.0), path.get(d, 0.0))
        for d in set(content) | set(method) | set(path)
    }


def build_report_index(reports: Iterable[BugReport], pre=DEFAULT, k1=K1, b=B):
    docs = [
        FieldedDocument(
            r.id,
            {
                "summary": pre.tokenize(r.summary, REPORT_TEXT),
                "content": pre.tokenize("\n".join((r.description, *r.comments)), REPORT_TEXT),
            },
            {"closing_date": r.resolved_at},
        )
        for r in reports
    ]
    return build_index(docs, REPORT_FIELDS, k1, b)


def closed_before(report: BugReport) -> Callable:
    created = report.created_at

    def predicate(attrs):
        closed = attrs.get("closing_date")
        return closed is not None and closed < created

    return predicate


# -- extraction over a whole snapshot -----------------------------------------


class SnapshotData:
    """Parsed structures and the file index of one snapshot."""

    def __init__(self, snapshot: Snapshot, pre=DEFAULT, k1=K1, b=B):
        self.snapshot = snapshot
        self.paths = [f.path for f in snapshot.files]
        self.structures = {f.path: parse_structure(f) for f in snapshot.files}
        self.by_package = package_index(self.structures)
        self.index = build_file_index(snapshot, self.structures, pre, k1, b)


class FeatureExtractor:
    """Computes FeatureVectors for one project's reports.

    History (prior reports, commits) is read only through ``prior_reports``
    and ``prior_commits``; ``audit``, when given, is called as
    ``audit(kind, item, report)`` for every history item that influences a
    score, so tests can check nothing from the report's future leaks in.
    """

    def __init__(self, reports=(), commits=(), pre=DEFAULT, k1=K1, b=B, audit=None):
        self.reports = sorted(reports, key=lambda r: (r.created_at, r.id))
        self.commits = sorted(commits, key=lambda c: (c.timestamp, c.hash))
        self.pre = pre
        self.k1 = k1
        self.b = b
        self.audit = audit
        self._snapshots = {}
        self._report_index = None
        self._by_id = {r.id: r for r in self.reports}
        self._history_tokens = {}

    @classmethod
    def for_project(cls, project, **kwargs):
        return cls(project.reports, project.commits, **kwargs)

    def snapshot_data(self, snapshot: Snapshot) -> SnapshotData:
        key = (snapshot.label, snapshot.timestamp)
        data = self._snapshots.get(key)
        if data is None:
            data = self._snapshots[key] = SnapshotData(snapshot, self.pre, self.k1, self.b)
        return data

    @property
    def report_index(self):
        if self._report_index is None:
            self._report_index = build_report_index(self.reports, self.pre, self.k1, self.b)
        return self._report_index

    def _note(self, kind, item, report):
        if self.audit is not None:
            self.audit(kind, item, report)

    def prior_reports(self, report):
        for r in self.reports:
            if is_prior(r, report):
                self._note("report", r, report)
                yield r

    def prior_commits(self, report):
        for c in self.commits:
            if c.timestamp < report.created_at:
                self._note("commit", c, report)
                yield c

    def _history_counter(self, prior):
        counts = self._history_tokens.get(prior.id)
        if counts is None:
            text = "\n".join((prior.summary, prior.description, *prior.comments))
            counts = self._history_tokens[prior.id] = Counter(self.pre.tokenize(text, REPORT_TEXT))
        return counts

    def _search_similarity(self, report, text) -> Callable:
        terms = self.pre.tokenize(text, REPORT_TEXT)
        hits = self.report_index.multi_field_query(
            {"summary": 1.0, "content": 1.0}, terms, filter=closed_before(report)
        )
        sims = max_normalize(hits)
        for doc_id in sims:
            self._note("report", self._by_id[doc_id], report)
        return lambda _report, prior: sims.get(prior.id, 0.0)

    def raw_matrix(self, report: BugReport, snapshot: Snapshot) -> tuple:
        """(paths, array of shape (n_files, 13)) of unnormalized scores."""
        data = self.snapshot_data(snapshot)
        paths = data.paths
        n = len(paths)
        col = {name: j for j, name in enumerate(FEATURE_NAMES)}
        out = np.zeros((n, len(FEATURE_NAMES)))
        if n == 0:
            return paths, out
        row = {p: i for i, p in enumerate(paths)}

        for i, f in enumerate(snapshot.files):
            out[i, col["size"]] = score_size(f)
            out[i, col["file_match"] : col["method_match"] + 1] = score_structure(report, data.structures[f.path])

        sets = extract_stacktrace(report, data.structures, data.structures, data.by_package)
        for p in set(sets.ranks) | sets.context:
            out[row[p], col["stacktrace"]] = score_stacktrace(p, sets)

        history = list(self.prior_commits(report))
        for p, s in version_history_scores(report, history).items():
            if p in row:
                out[row[p], col["version_history"]] = s

        priors = list(self.prior_reports(report))
        query_counts = Counter(self.pre.tokenize(report.text, REPORT_TEXT))
        sims = {
            "sim_cos": lambda _r, prior: cosine_similarity(query_counts, self._history_counter(prior)),
            "sim_reporter": reporter_similarity,
            "br_summary": self._search_similarity(report, report.summary),
            "br_description": self._search_similarity(report, report.description),
        }
        for name, sim in sims.items():
            for p, s in score_similar_reports(report, priors, sim).items():
                if p in row:
                    out[row[p], col[name]] = s

        for p, (content, method, path) in score_search_engine(report, data.index, self.pre).items():
            out[row[p], col["se_content"]] = content
            out[row[p], col["se_method"]] = method
            out[row[p], col["se_path"]] = path
        return paths, out

    def features(self, report: BugReport, snapshot: Snapshot) -> dict:
        paths, raw = self.raw_matrix(report, snapshot)
        return {p: FeatureVector(*raw[i]) for i, p in enumerate(paths)}

    def matrix(self, report: BugReport, snapshot: Snapshot) -> tuple:
        """(paths, raw scores, normalized scores) for every file of the snapshot."""
        paths, raw = self.raw_matrix(report, snapshot)
        return paths, raw, normalize_matrix(raw)
