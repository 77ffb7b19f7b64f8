"""Command-line entry point: ``buglocate {index,train,localize,evaluate}``.

Settings come from built-in defaults, then an optional flat ``key = value``
config file (``--config``), then command-line flags, later sources winning.
A dataset is a directory with one subdirectory per project, each holding
``reports.jsonl``, ``commits.jsonl`` and ``snapshots.tsv``.
"""

import argparse
import configparser
import hashlib
import json
import logging
import os
import sys
from contextlib import contextmanager
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import corpus
from .corpus import CorpusError
from .evalbench import EvalConfig, run_phase1, run_phase2, run_phase3
from .fusion import ForestModel, feature_importance, rank_files
from .scoring import FEATURE_NAMES, FeatureExtractor, build_report_index
from .textprep import TextPreprocessor

logger = logging.getLogger("buglocate")

MODEL_FILE = "model.forest"
LOCK_FILE = ".buglocate.lock"


@dataclass
class RunConfig:
    dataset: str = ""
    train_dataset: str = ""
    strategy: str = "release"
    trees: int = 1000
    neg_ratio: int = 50
    seed: int = 0
    k1: float = 1.2
    b: float = 0.75
    top: int = 10
    stopwords: str = ""
    keywords: str = ""
    output: str = "out"

    def validate(self):
        if self.strategy not in ("release", "timeaware"):
            raise ValueError(f"strategy must be release or timeaware, not {self.strategy!r}")
        for name in ("trees", "neg_ratio", "top", "k1"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.b <= 1:
            raise ValueError("b must lie in [0, 1]")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        return self

    def config_hash(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]

    def eval_config(self) -> EvalConfig:
        return EvalConfig(self.trees, self.neg_ratio, self.seed, self.k1, self.b)

    def preprocessor(self) -> TextPreprocessor:
        return TextPreprocessor.from_files(self.stopwords or None, self.keywords or None)


_FLAG_KEYS = {
    "dataset": "dataset", "train_dataset": "train_dataset", "strategy": "strategy",
    "trees": "trees", "neg_ratio": "neg_ratio", "seed": "seed", "top": "top",
    "output": "output", "stopwords": "stopwords", "keywords": "keywords",
}


def read_config_file(path) -> dict:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read config {path}: {exc}") from exc
    parser.read_string("[run]\n" + text)
    known = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    for key, value in parser["run"].items():
        key = key.replace("-", "_")
        if key not in known:
            raise ValueError(f"{path}: unknown config key {key!r}")
        out[key] = value
    return out


def resolve_config(args) -> RunConfig:
    values = {}
    if args.config:
        values.update(read_config_file(args.config))
    for flag, key in _FLAG_KEYS.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[key] = v
    cfg = RunConfig()
    for f in fields(RunConfig):
        if f.name in values:
            caster = type(getattr(cfg, f.name))
            setattr(cfg, f.name, caster(values[f.name]))
    return cfg.validate()


@contextmanager
def output_lock(directory: Path):
    directory.mkdir(parents=True, exist_ok=True)
    lock = directory / LOCK_FILE
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise RuntimeError(f"output directory {directory} is locked by another run ({lock})") from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        lock.unlink(missing_ok=True)


def _dataset(path, what="dataset"):
    if not path:
        raise ValueError(f"no {what} given (use --{what.replace('_', '-')} or the config file)")
    projects = corpus.load_dataset(path)
    if not projects:
        raise CorpusError(f"{what} {path} contains no projects")
    return projects


def _write_json(path, data):
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")


# -- commands ------------------------------------------------------------------


def cmd_index(cfg: RunConfig, args) -> int:
    projects = _dataset(cfg.dataset)
    pre = cfg.preprocessor()
    out = Path(cfg.output) / "index"
    n_files = n_reports = n_snapshots = 0
    for project in projects:
        target = out / project.name
        target.mkdir(parents=True, exist_ok=True)
        ext = FeatureExtractor.for_project(project, pre=pre, k1=cfg.k1, b=cfg.b)
        for snap in project.snapshots:
            ext.snapshot_data(snap).index.save(target / f"files-{snap.label}.json")
            n_files += len(snap)
        build_report_index(project.reports, pre, cfg.k1, cfg.b).save(target / "reports.json")
        n_reports += len(project.reports)
        n_snapshots += len(project.snapshots)
        print(f"{project.name}: {len(project.reports)} reports, {len(project.commits)} commits, "
              f"{len(project.snapshots)} snapshots")
    print(f"total: {len(projects)} projects, {n_reports} reports, {n_snapshots} snapshots, {n_files} files")
    return 0


def cmd_train(cfg: RunConfig, args) -> int:
    from .evalbench import Workspace

    projects = _dataset(cfg.train_dataset or cfg.dataset)
    ws = Workspace(cfg.eval_config(), cfg.preprocessor())
    ts = ws.training_set(projects)
    if len(ts) == 0:
        raise ValueError("no training rows: no report has a fixed file present in its snapshot")
    model, _ = ws.train(projects)
    out = Path(cfg.output)
    digest = model.save(out / MODEL_FILE)
    imp = feature_importance(model, ts.X, ts.y, cfg.seed)
    with (out / "importance.tsv").open("w", encoding="utf-8") as fh:
        fh.write("feature\tpermutation_importance\n")
        for name in FEATURE_NAMES:
            fh.write(f"{name}\t{imp['permutation'][name]:.6g}\n")
    with (out / "split_frequency.tsv").open("w", encoding="utf-8") as fh:
        fh.write("feature\tsplit_frequency\n")
        for name in FEATURE_NAMES:
            fh.write(f"{name}\t{imp['split_frequency'][name]:.6g}\n")
    _write_json(out / "train.json", {
        "seed": cfg.seed, "config_hash": cfg.config_hash(), "config": asdict(cfg),
        "model_sha256": digest, "rows": len(ts), "positives": int(ts.y.sum()),
        "projects": sorted(ts.projects),
    })
    print(f"trained {model.tree_count} trees on {len(ts)} rows; model sha256 {digest}")
    return 0


def _find_report(projects, report_id):
    for p in projects:
        for r in p.reports:
            if r.id == report_id:
                return p, r
    raise KeyError(f"unknown report id {report_id!r}")


def cmd_localize(cfg: RunConfig, args) -> int:
    projects = _dataset(cfg.dataset)
    model_path = Path(args.model) if args.model else Path(cfg.output) / MODEL_FILE
    if not model_path.is_file():
        raise CorpusError(f"model file not found: {model_path} (run 'train' first)")
    model = ForestModel.load(model_path)
    if args.report_file:
        reports = corpus.load_bug_reports(args.report_file)
        if len(reports) != 1:
            raise CorpusError(f"{args.report_file} must hold exactly one report")
        report = reports[0]
        name = args.project or report.project
        matches = [p for p in projects if p.name == name] if name else projects[:1]
        if len(matches) != 1:
            raise KeyError(f"unknown project {name!r}")
        project = matches[0]
    else:
        project, report = _find_report(projects, args.report)
    ext = FeatureExtractor.for_project(project, pre=cfg.preprocessor(), k1=cfg.k1, b=cfg.b)
    if cfg.strategy == "timeaware" and report.fixed_files:
        snaps = corpus.resolve_timeaware_snapshots(report, project.snapshots, project.version_index)
    else:
        snaps = [corpus.resolve_release_snapshot(report, project.snapshots)]
    for snap in snaps:
        ranking = rank_files(model, report, snap, ext, cfg.strategy).top(cfg.top)
        for rec in ranking.to_records():
            rec["seed"] = cfg.seed
            rec["config_hash"] = cfg.config_hash()
            print(json.dumps(rec, sort_keys=True))
    return 0


def cmd_evaluate(cfg: RunConfig, args) -> int:
    projects = _dataset(cfg.dataset)
    econf = cfg.eval_config()
    econf.exclude_undetectable = args.exclude_undetectable
    pre = cfg.preprocessor()
    out = Path(cfg.output)
    if args.phase == 1:
        result = run_phase1(projects, econf, cfg.strategy, pre)
        tables, record = [result], result.to_record()
    elif args.phase == 2:
        train = _dataset(cfg.train_dataset, "train_dataset")
        result = run_phase2(train, projects, econf, cfg.strategy, pre)
        tables, record = [result], result.to_record()
    else:
        train = _dataset(cfg.train_dataset, "train_dataset") if cfg.train_dataset else None
        result = run_phase3(projects, econf, train, pre)
        tables, record = [result.release, result.timeaware], result.to_record()
    record["config"] = asdict(cfg)
    record["run_config_hash"] = cfg.config_hash()
    text = "\n\n".join(t.table() for t in tables)
    if args.phase == 3:
        for label, eff in (("MAP", result.map_effect), ("MRR", result.mrr_effect)):
            if eff is not None:
                text += f"\neffect size (time-aware vs. release) {label}: d={eff[0]:.4f} s={eff[1]:.4f}"
    _write_json(out / f"phase{args.phase}.json", record)
    (out / f"phase{args.phase}.txt").write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


COMMANDS = {"index": cmd_index, "train": cmd_train, "localize": cmd_localize, "evaluate": cmd_evaluate}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--dataset", help="dataset directory (one subdirectory per project)")
    common.add_argument("--train-dataset", dest="train_dataset", help="training dataset for phase 2/3")
    common.add_argument("--seed", type=int)
    common.add_argument("--strategy", choices=("release", "timeaware"))
    common.add_argument("--trees", type=int)
    common.add_argument("--neg-ratio", dest="neg_ratio", type=int)
    common.add_argument("--top", type=int)
    common.add_argument("--output", help="output directory")
    common.add_argument("--stopwords", help="stop-word list file")
    common.add_argument("--keywords", help="Java keyword list file")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="buglocate", description="Rank source files for bug reports.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("index", parents=[common], help="build search indices for every snapshot")
    sub.add_parser("train", parents=[common], help="train the ranking forest")
    loc = sub.add_parser("localize", parents=[common], help="rank files for one report")
    which = loc.add_mutually_exclusive_group(required=True)
    which.add_argument("--report", help="report id from the dataset")
    which.add_argument("--report-file", help="JSON-lines file holding one ad-hoc report")
    loc.add_argument("--project", help="project of an ad-hoc report")
    loc.add_argument("--model", help="model file (default: <output>/model.forest)")
    ev = sub.add_parser("evaluate", parents=[common], help="run a benchmark protocol")
    ev.add_argument("--phase", type=int, choices=(1, 2, 3), required=True)
    ev.add_argument("--exclude-undetectable", action="store_true",
                    help="drop undetectable reports instead of scoring them 0")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = resolve_config(args)
        with output_lock(Path(cfg.output)):
            return COMMANDS[args.command](cfg, args)
    except CorpusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for d in exc.diagnostics:
            print(f"  {d}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
