"""Experiment orchestration: ratings -> graphs -> walks -> embeddings ->
classifier -> metrics, with every stage writing its artifacts to an output
directory and recording them in ``manifest.json``.

Stages cache on a hash of their configuration and input files; a stage whose
key and outputs are unchanged is skipped unless ``force`` is set.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
import os
import re
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from . import diversity as dv
from .edgeops import OPERATORS, edge_features, write_edge_features_csv
from .embed import SkipGramConfig, read_embeddings_text, train_embeddings, write_embeddings_text
from .graph import (
    IdMap,
    LabeledEdgeSet,
    binarize_ratings,
    build_graph,
    filter_records,
    read_edgelist,
    read_item_features,
    read_ratings,
    split_edges,
    write_edgelist,
    ITEM,
)
from .predictor import _ACTIVATIONS, TrainConfig, auc, load_model, mlp_forward, save_model, train_classifier, write_scores_csv
from .walker import WalkCorpus, WalkStrategy, frequency_profile, generate_corpus
from .datasets import preferential_attachment_graph

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"stage {stage!r} failed: {message}")
        self.stage = stage


# --------------------------------------------------------------------------
# configuration


@dataclass
class DataConfig:
    ratings: str = "ratings.csv"
    item_features: Optional[str] = None
    pos_threshold: float = 4.0
    neg_threshold: float = 3.0
    strict_thresholds: bool = False
    min_item_records: int = 10
    min_user_records: int = 10
    max_user_records: int = 1000
    single_pass_filter: bool = False
    test_fraction: float = 0.2


@dataclass
class SeedConfig:
    split: int = 0
    walk: int = 0
    embed: int = 0
    classifier: int = 0


@dataclass
class WalkConfig:
    walk_length: int = 80
    walks_per_node: int = 10


@dataclass
class MethodConfig:
    name: str
    kind: str = "uniform"
    p: float = 1.0
    q: float = 1.0
    f: str = "constant"

    def strategy(self) -> WalkStrategy:
        return WalkStrategy(self.kind, self.p, self.q, self.f)


def default_methods() -> list[MethodConfig]:
    return [
        MethodConfig("deepwalk", "uniform"),
        MethodConfig("n2v-(1,2)", "second_order", p=1.0, q=2.0),
        MethodConfig("n2v-(2,1)", "second_order", p=2.0, q=1.0),
        MethodConfig("div2vec", "degree_biased", f="inverse"),
        MethodConfig("rooted_div2vec", "degree_biased", f="inverse_sqrt"),
    ]


@dataclass
class SkipGramSection:
    dimension: int = 64
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    initial_learning_rate: float = 0.025
    min_learning_rate: float = 1e-4
    unigram_power: float = 0.75
    shuffle: bool = True
    threads: int = 1


@dataclass
class ClassifierSection:
    epochs: int = 30
    batch_size: int = 256
    learning_rate: float = 0.5
    activation: str = "relu"


@dataclass
class EvaluationConfig:
    operators: list = field(default_factory=lambda: ["weighted_l1", "weighted_l2", "hadamard", "average"])
    ks: list = field(default_factory=lambda: [1, 10, 50])
    # "test": users appearing in the test split; "all": every user node
    users: str = "test"
    # limit candidates to items that have feature vectors
    featured_items_only: bool = False


@dataclass
class Figure2Config:
    # "ingest": the training graph of positive edges; "preferential_attachment": synthetic
    source: str = "ingest"
    nodes: int = 1000
    m: int = 3
    graph_seed: int = 0
    strategies: list = field(
        default_factory=lambda: ["uniform", "degree_biased(f=inverse_sqrt)", "degree_biased(f=inverse)"]
    )


@dataclass
class OutputConfig:
    # also dump per-edge feature CSVs from the pipeline run (large)
    edge_feature_csv: bool = False


@dataclass
class ExperimentConfig:
    data: DataConfig = field(default_factory=DataConfig)
    seeds: SeedConfig = field(default_factory=SeedConfig)
    walk: WalkConfig = field(default_factory=WalkConfig)
    methods: list = field(default_factory=default_methods)
    skipgram: SkipGramSection = field(default_factory=SkipGramSection)
    classifier: ClassifierSection = field(default_factory=ClassifierSection)
    evaluation: EvaluationConfig = field(default_factory=EvaluationConfig)
    figure2: Figure2Config = field(default_factory=Figure2Config)
    output: OutputConfig = field(default_factory=OutputConfig)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        raw = dict(raw or {})
        sections = {f.name: f for f in dataclasses.fields(cls)}
        unknown = set(raw) - set(sections)
        if unknown:
            raise ConfigError(f"unknown config sections: {sorted(unknown)}")
        kwargs = {}
        for name, value in raw.items():
            if name == "methods":
                kwargs[name] = [_build(MethodConfig, m, f"methods[{i}]") for i, m in enumerate(value or [])]
            else:
                kwargs[name] = _build(type(getattr(cls(), name)), value, name)
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    def save(self, path) -> None:
        Path(path).write_text(self.dump())

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            raw = yaml.safe_load(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except yaml.YAMLError as exc:
            raise ConfigError(f"config {path} is not valid YAML: {exc}") from None
        return cls.from_dict(raw)

    def hash(self) -> str:
        return _digest(json.dumps(self.to_dict(), sort_keys=True))

    def with_seed(self, seed: int) -> "ExperimentConfig":
        cfg = ExperimentConfig.from_dict(self.to_dict())
        cfg.seeds = SeedConfig(seed, seed, seed, seed)
        return cfg

    def skipgram_config(self) -> SkipGramConfig:
        s = self.skipgram
        return SkipGramConfig(
            dimension=s.dimension, window=s.window, negatives=s.negatives, epochs=s.epochs,
            initial_learning_rate=s.initial_learning_rate, min_learning_rate=s.min_learning_rate,
            seed=self.seeds.embed, unigram_power=s.unigram_power, shuffle=s.shuffle, threads=s.threads,
        )

    def train_config(self) -> TrainConfig:
        c = self.classifier
        return TrainConfig(c.epochs, c.batch_size, c.learning_rate, self.seeds.classifier, c.activation)

    def validate(self) -> None:
        """Check every module precondition up front."""
        d = self.data
        try:
            if d.pos_threshold <= d.neg_threshold:
                raise ValueError("data.pos_threshold must exceed data.neg_threshold")
            if min(d.min_item_records, d.min_user_records, d.max_user_records) <= 0:
                raise ValueError("record filter bounds must be positive")
            if d.min_user_records > d.max_user_records:
                raise ValueError("data.min_user_records exceeds data.max_user_records")
            if not 0 < d.test_fraction < 1:
                raise ValueError("data.test_fraction must lie in (0, 1)")
            if min(dataclasses.astuple(self.seeds)) < 0:
                raise ValueError("seeds must be nonnegative")
            if self.walk.walk_length < 2 or self.walk.walks_per_node < 1:
                raise ValueError("walk.walk_length >= 2 and walk.walks_per_node >= 1 required")
            if not self.methods:
                raise ValueError("at least one method is required")
            names = [m.name for m in self.methods]
            if len(set(names)) != len(names):
                raise ValueError("method names must be unique")
            if len({_slug(n) for n in names}) != len(names):
                raise ValueError("method names collide after filename sanitising")
            for m in self.methods:
                m.strategy()
            self.skipgram_config()
            self.train_config()
            if self.classifier.activation not in _ACTIVATIONS:
                raise ValueError(f"classifier.activation must be one of {_ACTIVATIONS}")
            ev = self.evaluation
            bad = [op for op in ev.operators if op not in OPERATORS]
            if bad or not ev.operators:
                raise ValueError(f"unknown or missing operators {bad}; choose from {sorted(OPERATORS)}")
            if not ev.ks or any(int(k) != k or k < 1 for k in ev.ks):
                raise ValueError("evaluation.ks must be positive integers")
            if ev.users not in ("test", "all"):
                raise ValueError("evaluation.users must be 'test' or 'all'")
            fg = self.figure2
            if fg.source not in ("ingest", "preferential_attachment"):
                raise ValueError("figure2.source must be 'ingest' or 'preferential_attachment'")
            if not 1 <= fg.m < fg.nodes:
                raise ValueError("figure2 needs 1 <= m < nodes")
            for s in fg.strategies:
                WalkStrategy.parse(s)
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(str(exc)) from None


def _build(kind, value, where):
    if isinstance(value, kind):
        return value
    if not isinstance(value, dict):
        raise ConfigError(f"config section {where!r} must be a mapping")
    names = {f.name for f in dataclasses.fields(kind)}
    unknown = set(value) - names
    if unknown:
        raise ConfigError(f"unknown keys in {where!r}: {sorted(unknown)}")
    try:
        return kind(**value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {where!r}: {exc}") from None


# --------------------------------------------------------------------------
# manifest


def _digest(data) -> str:
    if isinstance(data, str):
        data = data.encode()
    return hashlib.sha256(data).hexdigest()


def file_hash(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_")


class Manifest:
    """``manifest.json``: config, config hash, seeds and per-stage artifacts."""

    def __init__(self, out_dir: Path, config: ExperimentConfig):
        self.out_dir = out_dir
        self.path = out_dir / "manifest.json"
        self.data = {"stages": {}}
        if self.path.exists():
            self.data = json.loads(self.path.read_text())
        self.data["config"] = config.to_dict()
        self.data["config_hash"] = config.hash()
        self.data["seeds"] = dataclasses.asdict(config.seeds)

    def up_to_date(self, stage: str, key: str) -> bool:
        entry = self.data["stages"].get(stage)
        if not entry or entry["key"] != key:
            return False
        return all(
            (self.out_dir / rel).exists() and file_hash(self.out_dir / rel) == digest
            for rel, digest in entry["outputs"].items()
        )

    def record(self, stage: str, key: str, outputs: list[Path]) -> None:
        self.data["stages"][stage] = {
            "key": key,
            "outputs": {str(p.relative_to(self.out_dir)): file_hash(p) for p in sorted(outputs)},
        }
        self.save()

    def outputs(self, stage: str) -> list[str]:
        return list(self.data["stages"].get(stage, {}).get("outputs", {}))

    def save(self) -> None:
        self.path.write_text(json.dumps(self.data, indent=2, sort_keys=True) + "\n")


@contextmanager
def _locked(out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    lock = out_dir / ".lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise StageError("setup", f"{out_dir} is locked by another run (remove {lock} if stale)") from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        lock.unlink(missing_ok=True)


# --------------------------------------------------------------------------
# stages


class Experiment:
    """Runs pipeline stages for one config and output directory."""

    def __init__(self, config: ExperimentConfig, out_dir, force: bool = False, base_dir=None):
        config.validate()
        self.config = config
        self.out = Path(out_dir)
        self.force = force
        self.base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
        self.manifest: Optional[Manifest] = None

    # paths -------------------------------------------------------------

    def _input(self, p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else self.base_dir / p

    def _p(self, *parts) -> Path:
        path = self.out.joinpath(*parts)
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def _hashes(self, stage: str) -> dict:
        return {rel: self.manifest.data["stages"][stage]["outputs"][rel] for rel in self.manifest.outputs(stage)}

    def _require(self, stage: str) -> dict:
        if stage not in self.manifest.data["stages"]:
            raise FileNotFoundError(f"run the {stage!r} stage first")
        return self._hashes(stage)

    def _run(self, stage: str, key_parts: dict, body) -> None:
        key = _digest(json.dumps({"stage": stage, **key_parts}, sort_keys=True, default=str))
        if not self.force and self.manifest.up_to_date(stage, key):
            log.info("stage %s up to date", stage)
            return
        log.info("running stage %s", stage)
        try:
            outputs = body()
        except StageError:
            raise
        except Exception as exc:
            raise StageError(stage, f"{type(exc).__name__}: {exc}") from exc
        self.manifest.record(stage, key, outputs)

    @contextmanager
    def session(self):
        with _locked(self.out):
            self.manifest = Manifest(self.out, self.config)
            self.manifest.save()
            try:
                yield self
            finally:
                self.manifest.save()

    # ingest ------------------------------------------------------------

    def ingest(self) -> None:
        d = self.config.data
        ratings_path = self._input(d.ratings)
        if not ratings_path.exists():
            raise StageError("ingest", f"ratings file not found: {ratings_path}")
        key = {"data": dataclasses.asdict(d), "seed": self.config.seeds.split,
               "ratings": file_hash(ratings_path)}

        def body():
            records = read_ratings(ratings_path)
            pos, neg = binarize_ratings(records, d.pos_threshold, d.neg_threshold, d.strict_thresholds)
            labeled = [(u, i, 1) for u, i in pos] + [(u, i, 0) for u, i in neg]
            labeled = filter_records(labeled, d.min_item_records, d.min_user_records,
                                     d.max_user_records, d.single_pass_filter)
            if not labeled:
                raise ValueError("no records survive binarization and filtering")
            idmap = IdMap.from_pairs((u, i) for u, i, _ in labeled)
            pairs = [(idmap.user(u), idmap.item(i)) for u, i, _ in labeled]
            edges = split_edges(pairs, d.test_fraction, self.config.seeds.split, [l for *_, l in labeled])
            part = idmap.partition()
            train = edges.train()
            gpos = build_graph(train.pairs()[train.label == 1], len(idmap), part)
            gneg = build_graph(train.pairs()[train.label == 0], len(idmap), part)
            outs = [self._p("ingest", "idmap.tsv"), self._p("ingest", "edges.csv"),
                    self._p("ingest", "pos_graph.tsv"), self._p("ingest", "neg_graph.tsv"),
                    self._p("ingest", "summary.json")]
            idmap.write(outs[0])
            edges.write_csv(outs[1])
            write_edgelist(gpos, outs[2])
            write_edgelist(gneg, outs[3])
            summary = {
                "ratings": len(records), "positive": len(pos), "negative": len(neg),
                "kept": len(labeled), "users": int((part != ITEM).sum()), "items": int((part == ITEM).sum()),
                "train_edges": int((~edges.test).sum()), "test_edges": int(edges.test.sum()),
                "pos_graph_edges": gpos.edge_count, "neg_graph_edges": gneg.edge_count,
            }
            outs[4].write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
            return outs

        self._run("ingest", key, body)

    # walks / embeddings -----------------------------------------------

    def _graphs(self):
        return {pol: read_edgelist(self.out / "ingest" / f"{pol}_graph.tsv") for pol in ("pos", "neg")}

    def walk(self) -> None:
        cfg = self.config

        def body():
            self._require("ingest")
            outs = []
            for pol, g in self._graphs().items():
                for m in cfg.methods:
                    corpus = generate_corpus(g, m.strategy(), cfg.walk.walk_length,
                                             cfg.walk.walks_per_node, cfg.seeds.walk)
                    path = self._p("walks", f"{_slug(m.name)}.{pol}.txt")
                    corpus.write(path)
                    outs.append(path)
            return outs

        key = {"walk": dataclasses.asdict(cfg.walk), "methods": [dataclasses.asdict(m) for m in cfg.methods],
               "seed": cfg.seeds.walk, "inputs": self._hashes("ingest")}
        self._run("walk", key, body)

    def embed(self) -> None:
        cfg = self.config

        def body():
            self._require("walk")
            n = len(IdMap.read(self.out / "ingest" / "idmap.tsv"))
            outs = []
            for m in cfg.methods:
                for pol in ("pos", "neg"):
                    corpus = WalkCorpus.read(self.out / "walks" / f"{_slug(m.name)}.{pol}.txt")
                    mat = train_embeddings(corpus, cfg.skipgram_config(), n)
                    path = self._p("embeddings", f"{_slug(m.name)}.{pol}.emb")
                    write_embeddings_text(mat, path)
                    outs.append(path)
            return outs

        key = {"skipgram": dataclasses.asdict(cfg.skipgram), "seed": cfg.seeds.embed,
               "inputs": self._hashes("walk") if "walk" in self.manifest.data["stages"] else {}}
        self._run("embed", key, body)

    def _embeddings(self, method: MethodConfig, n: int):
        return tuple(
            read_embeddings_text(self.out / "embeddings" / f"{_slug(method.name)}.{pol}.emb", n)
            for pol in ("pos", "neg")
        )

    def _context(self):
        idmap = IdMap.read(self.out / "ingest" / "idmap.tsv")
        edges = LabeledEdgeSet.read_csv(self.out / "ingest" / "edges.csv")
        return idmap, edges

    # edge features / classifier ---------------------------------------

    def edges(self) -> None:
        cfg = self.config

        def body():
            self._require("embed")
            idmap, edges = self._context()
            outs = []
            for m in cfg.methods:
                pos, neg = self._embeddings(m, len(idmap))
                for op in cfg.evaluation.operators:
                    for split, part in (("train", edges.train()), ("test", edges.testing())):
                        feats = edge_features(op, part.u, part.v, pos, neg)
                        path = self._p("edges", f"{_slug(m.name)}.{op}.{split}.csv")
                        write_edge_features_csv(path, part.u, part.v, part.label, feats)
                        outs.append(path)
            return outs

        key = {"operators": cfg.evaluation.operators, "inputs": self._hashes("embed")}
        self._run("edges", key, body)

    def fit(self) -> None:
        cfg = self.config

        def body():
            self._require("embed")
            idmap, edges = self._context()
            train = edges.train()
            outs = []
            for m in cfg.methods:
                pos, neg = self._embeddings(m, len(idmap))
                for op in cfg.evaluation.operators:
                    X = edge_features(op, train.u, train.v, pos, neg)
                    model = train_classifier(X, train.label, cfg.train_config())
                    path = self._p("models", f"{_slug(m.name)}.{op}.mlp")
                    save_model(model, path)
                    outs.append(path)
            return outs

        key = {"classifier": dataclasses.asdict(cfg.classifier), "seed": cfg.seeds.classifier,
               "operators": cfg.evaluation.operators,
               "inputs": {**self._hashes("embed"), **self._hashes("ingest")}}
        self._run("fit", key, body)

    # evaluation ---------------------------------------------------------

    def evaluate(self) -> None:
        cfg = self.config
        ev = cfg.evaluation
        feat_path = self._input(cfg.data.item_features) if cfg.data.item_features else None

        def body():
            self._require("fit")
            idmap, edges = self._context()
            n = len(idmap)
            features = None
            if feat_path is not None:
                raw = read_item_features(feat_path)
                features = raw.reindex({k[2:]: v for k, v in idmap.index.items() if k.startswith("i:")})
            part = idmap.partition()
            items = np.flatnonzero(part == ITEM)
            if ev.featured_items_only and features is not None:
                items = np.array([i for i in items if i in features], dtype=np.int64)
            train, test = edges.train(), edges.testing()
            users = np.unique(test.u) if ev.users == "test" else np.flatnonzero(part != ITEM)
            exclude: dict = {}
            for u, v in train.pairs()[train.label == 1]:
                exclude.setdefault(int(u), []).append(int(v))
            kmax = max(ev.ks)
            outs = []
            for m in cfg.methods:
                pos, neg = self._embeddings(m, n)
                for op in ev.operators:
                    slug = f"{_slug(m.name)}.{op}"
                    model = load_model(self.out / "models" / f"{slug}.mlp")
                    scores = mlp_forward(model, edge_features(op, test.u, test.v, pos, neg))
                    path = self._p("scores", f"{slug}.scores.csv")
                    write_scores_csv(path, test.u, test.v, test.label, scores)
                    outs.append(path)
                    table = dv.recommend_topk(model, op, pos, neg, users, items, kmax, exclude)
                    path = self._p("recommendations", f"{slug}.csv")
                    table.write_csv(path)
                    outs.append(path)
                    metrics = {"method": m.name, "operator": op, "auc": auc(scores, test.label),
                               "flagged_users": [int(u) for u in table.flagged], "k": {}}
                    for k in sorted(ev.ks):
                        sub = table.truncate(k)
                        sub.lists = {u: l for u, l in sub.lists.items() if len(l) == k}
                        row = {"coverage": dv.coverage(sub),
                               "entropy_diversity": dv.entropy_diversity(sub, len(sub), k),
                               "short_lists": len(table.lists) - len(sub.lists)}
                        if k >= 2:
                            if features is not None:
                                ils = dv.average_ils(sub, features)
                                row.update(ils=ils.value, ils_excluded_users=ils.excluded)
                            else:
                                row["ils"] = float("nan")
                        metrics["k"][str(k)] = row
                    path = self._p("metrics", f"{slug}.json")
                    path.write_text(json.dumps(metrics, indent=2, sort_keys=True) + "\n")
                    outs.append(path)
            return outs

        key = {"evaluation": dataclasses.asdict(ev),
               "features": file_hash(feat_path) if feat_path and feat_path.exists() else None,
               "inputs": {**self._hashes("fit"), **self._hashes("embed")}
               if "fit" in self.manifest.data["stages"] else {}}
        self._run("evaluate", key, body)

    def report(self) -> list[dv.MetricReport]:
        cfg = self.config
        reports = []

        def body():
            self._require("evaluate")
            reports.clear()
            for m in cfg.methods:
                for op in cfg.evaluation.operators:
                    raw = json.loads((self.out / "metrics" / f"{_slug(m.name)}.{op}.json").read_text())
                    r = dv.MetricReport(m.name, op, raw["auc"])
                    for k in cfg.evaluation.ks:
                        row = raw["k"][str(k)]
                        r.coverage[k] = row["coverage"]
                        r.entropy_diversity[k] = row["entropy_diversity"]
                        if k >= 2:
                            r.ils[k] = row["ils"]
                    reports.append(r)
            path = self._p("reports", "metrics.csv")
            dv.write_reports_csv(reports, cfg.evaluation.ks, path)
            return [path]

        key = {"ks": cfg.evaluation.ks, "inputs": self._hashes("evaluate")
               if "evaluate" in self.manifest.data["stages"] else {}}
        self._run("report", key, body)
        if not reports:
            reports = read_metric_report(self.out / "reports" / "metrics.csv", cfg.evaluation.ks)
        return reports

    # figure 2 -----------------------------------------------------------

    def figure2(self) -> dict:
        cfg = self.config
        fg = cfg.figure2
        results = {}

        def body():
            if fg.source == "ingest":
                self._require("ingest")
                graph = self._graphs()["pos"]
            else:
                graph = preferential_attachment_graph(fg.nodes, fg.m, fg.graph_seed)
            outs = []
            rows = []
            for text in fg.strategies:
                strategy = WalkStrategy.parse(text)
                corpus = generate_corpus(graph, strategy, cfg.walk.walk_length,
                                         cfg.walk.walks_per_node, cfg.seeds.walk)
                prof = frequency_profile(corpus, graph)
                path = self._p("figure2", f"{_slug(strategy.describe())}.csv")
                prof.write_csv(path)
                outs.append(path)
                rows.append((strategy.describe(), prof.spearman))
            path = self._p("figure2", "summary.csv")
            with open(path, "w") as fh:
                fh.write("strategy,spearman\n")
                for name, rho in rows:
                    fh.write(f"\"{name}\",{rho!r}\n")
            outs.append(path)
            return outs

        key = {"figure2": dataclasses.asdict(fg), "walk": dataclasses.asdict(cfg.walk),
               "seed": cfg.seeds.walk,
               "inputs": self._hashes("ingest") if fg.source == "ingest" and "ingest" in self.manifest.data["stages"] else {}}
        self._run("figure2", key, body)
        with open(self.out / "figure2" / "summary.csv", newline="") as fh:
            for row in csv.DictReader(fh):
                results[row["strategy"]] = float(row["spearman"])
        return results


STAGES = ("ingest", "walk", "embed", "fit", "evaluate", "report")


def read_metric_report(path, ks) -> list[dv.MetricReport]:
    out = []
    for row in dv.read_reports_csv(path):
        r = dv.MetricReport(row["method"], row["operator"], float(row["auc"]))
        for k in ks:
            r.coverage[k] = int(row[f"co_{k}"])
            r.entropy_diversity[k] = float(row[f"ed_{k}"])
            if k >= 2:
                r.ils[k] = float(row[f"ils_{k}"])
        out.append(r)
    return out


def run_pipeline(config: ExperimentConfig, out_dir, force: bool = False, base_dir=None) -> list[dv.MetricReport]:
    """Run every stage in order and return the metric report rows."""
    exp = Experiment(config, out_dir, force, base_dir)
    with exp.session():
        exp.ingest()
        exp.walk()
        exp.embed()
        if config.output.edge_feature_csv:
            exp.edges()
        exp.fit()
        exp.evaluate()
        return exp.report()


def run_figure2(config: ExperimentConfig, out_dir, force: bool = False, base_dir=None) -> dict:
    """Frequency profiles per configured strategy; returns strategy -> Spearman correlation."""
    exp = Experiment(config, out_dir, force, base_dir)
    with exp.session():
        if config.figure2.source == "ingest":
            exp.ingest()
        return exp.figure2()
