"""Command line pipeline driver.

Subcommands run one stage each and cache their outputs under the output
directory; a manifest per stage records a hash of the relevant configuration
and input files, so re-running with unchanged inputs is a no-op and any
config change invalidates the cache. ``run-all`` chains every stage.

Exit codes: 0 success (including probe runs skipped for data sparsity),
1 internal error, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import glob
import hashlib
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

from typoprobe import align as align_mod
from typoprobe import corpus as corpus_mod
from typoprobe import features as features_mod
from typoprobe import lexsim as lexsim_mod
from typoprobe import probe as probe_mod
from typoprobe import project as project_mod
from typoprobe import subword as subword_mod
from typoprobe import typodb as typodb_mod
from typoprobe.errors import DataError

logger = logging.getLogger("typoprobe")

EQ1_MODES = {"full": "full_independence", "paper": "paper_literal"}


@dataclass
class PipelineConfig:
    texts: list[str] = field(default_factory=list)
    metadata: str = ""
    annotations: str = ""  # directory of <source_doculect>.tsv (+ .emb.tsv)
    lexicon: str = ""
    wordlists: str = ""
    database: str = ""
    groups: str = ""
    representations: list[str] = field(default_factory=list)
    probe_features: list[str] = field(default_factory=list)
    train_source: str = "database"
    out: str = "out"
    seed: int = 0
    jobs: int = 1
    mode: str = "sound"
    eq1: str = "full"
    canonical_threshold: float = 0.8
    coverage: float = 0.8
    max_subword_len: int = 0  # 0 = uncapped
    min_joint: int = 2
    projection_threshold: float = 0.2
    paradigm_max_distance: float = 0.3
    min_paradigms: int = 50
    pairs_per_pos: int = 1000
    svd_k: int = 100
    min_concepts: int = 30
    cross_pair_sample: int = 10000
    C: float = 1e-3
    n_samples: int = 401
    min_families: int = 50

    def validate(self) -> None:
        for name in ("canonical_threshold", "coverage", "projection_threshold"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise DataError(f"{name} must be in (0, 1], got {value}")
        if not 0.0 < self.paradigm_max_distance <= 1.0:
            raise DataError("paradigm_max_distance must be in (0, 1]")
        if self.mode not in ("sound", "naive"):
            raise DataError(f"mode must be sound or naive, got {self.mode!r}")
        if self.eq1 not in EQ1_MODES:
            raise DataError(f"eq1 must be one of {sorted(EQ1_MODES)}, got {self.eq1!r}")
        if self.train_source not in ("database", "projected"):
            raise DataError("train_source must be database or projected")
        for name in ("jobs", "n_samples", "min_families", "pairs_per_pos", "svd_k"):
            if getattr(self, name) < 1:
                raise DataError(f"{name} must be >= 1")
        if self.C <= 0:
            raise DataError("C must be positive")


_LIST_KEYS = {"texts", "representations", "probe_features"}


def load_config(path: str | None) -> PipelineConfig:
    """Flat key=value file; '#' comments; list values comma-separated."""
    config = PipelineConfig()
    if path is None:
        return config
    valid = {f.name: f.type for f in fields(PipelineConfig)}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DataError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in valid:
                raise DataError(f"{path}:{lineno}: unknown config key {key!r}")
            current = getattr(config, key)
            if key in _LIST_KEYS:
                setattr(config, key, [v.strip() for v in value.split(",") if v.strip()])
            elif isinstance(current, bool):
                setattr(config, key, value.lower() in ("1", "true", "yes"))
            elif isinstance(current, int):
                setattr(config, key, int(value))
            elif isinstance(current, float):
                setattr(config, key, float(value))
            else:
                setattr(config, key, value)
    return config


def expand_texts(patterns: list[str]) -> list[str]:
    paths: list[str] = []
    for pattern in patterns:
        hits = sorted(glob.glob(pattern))
        if hits:
            paths.extend(hits)
        else:
            paths.append(pattern)
    return paths


# ---------------------------------------------------------------------------
# Caching helpers


def atomic_write(path: str, content: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        f.write(content)
    os.replace(tmp, path)


def file_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def config_hash(payload: dict) -> str:
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    ).hexdigest()


def manifest_path(out: str, stage: str) -> str:
    return os.path.join(out, f"{stage}.manifest.json")


def stage_cached(out: str, stage: str, digest: str) -> bool:
    path = manifest_path(out, stage)
    if not os.path.exists(path):
        return False
    try:
        with open(path, encoding="utf-8") as f:
            manifest = json.load(f)
    except (OSError, json.JSONDecodeError):
        return False
    if manifest.get("config_hash") != digest:
        return False
    return all(os.path.exists(os.path.join(out, p)) for p in manifest.get("outputs", []))


def write_manifest(out: str, stage: str, digest: str, outputs: list[str]) -> None:
    atomic_write(
        manifest_path(out, stage),
        json.dumps(
            {"stage": stage, "config_hash": digest, "outputs": sorted(outputs)},
            sort_keys=True,
            separators=(",", ":"),
        )
        + "\n",
    )


# ---------------------------------------------------------------------------
# Stage implementations


def load_retained_corpus(config: PipelineConfig) -> corpus_mod.Corpus:
    texts = expand_texts(config.texts)
    if not texts:
        raise DataError("no input texts configured")
    if not config.metadata:
        raise DataError("no metadata file configured")
    corpus = corpus_mod.load_corpus(texts, config.metadata)
    canonical = corpus_mod.canonical_verses(corpus, config.canonical_threshold)
    corpus.canonical = canonical
    return corpus_mod.filter_translations(corpus, config.coverage)


def _ingest_digest(config: PipelineConfig) -> str:
    texts = expand_texts(config.texts)
    return config_hash(
        {
            "stage": "ingest",
            "texts": {p: file_digest(p) for p in texts},
            "metadata": file_digest(config.metadata) if config.metadata else "",
            "canonical_threshold": config.canonical_threshold,
            "coverage": config.coverage,
        }
    )


def cmd_ingest(config: PipelineConfig) -> int:
    os.makedirs(config.out, exist_ok=True)
    digest = _ingest_digest(config)
    if stage_cached(config.out, "ingest", digest):
        print("ingest: cached")
        return 0
    corpus = load_retained_corpus(config)
    canonical = sorted(corpus.canonical)
    atomic_write(os.path.join(config.out, "canonical.txt"), "".join(v + "\n" for v in canonical))
    doc_rows = [
        {
            "doculect_id": d.doculect_id,
            "iso639_3": d.iso639_3,
            "family": d.family,
            "macroarea": d.macroarea,
            "contacts": sorted(d.contacts),
            "role": d.role,
            "preferred": d.preferred,
            "n_verses": len(d.verses),
            "coverage": corpus_mod.coverage_of(d, corpus.canonical),
        }
        for d in corpus.doculects
    ]
    atomic_write(
        os.path.join(config.out, "corpus.json"),
        json.dumps(
            {"doculects": doc_rows, "n_canonical": len(canonical)},
            sort_keys=True,
            separators=(",", ":"),
        )
        + "\n",
    )
    write_manifest(config.out, "ingest", digest, ["canonical.txt", "corpus.json"])
    print(f"ingest: {len(corpus.doculects)} doculects retained, {len(canonical)} canonical verses")
    return 0


def cmd_subwords(config: PipelineConfig) -> int:
    digest = config_hash({"stage": "subwords", "ingest": _ingest_digest(config),
                          "max_subword_len": config.max_subword_len})
    if stage_cached(config.out, "subwords", digest):
        print("subwords: cached")
        return 0
    corpus = load_retained_corpus(config)
    subdir = os.path.join(config.out, "subwords")
    os.makedirs(subdir, exist_ok=True)
    outputs = []
    max_len = config.max_subword_len or None
    for doc in corpus.doculects:
        vocab = subword_mod.build_vocab(doc, corpus.canonical, max_len=max_len)
        rel = os.path.join("subwords", f"{doc.doculect_id}.tsv")
        subword_mod.write_vocab_tsv(vocab, os.path.join(config.out, rel))
        outputs.append(rel)
    write_manifest(config.out, "subwords", digest, outputs)
    print(f"subwords: vocabularies for {len(outputs)} doculects")
    return 0


def _align_one(args) -> str:
    config, src_id, tgt_id = args
    corpus = load_retained_corpus(config)
    src = corpus.doculect(src_id)
    tgt = corpus.doculect(tgt_id)
    max_len = config.max_subword_len or None
    src_vocab = subword_mod.build_vocab(src, corpus.canonical, max_len=max_len)
    tgt_vocab = subword_mod.build_vocab(tgt, corpus.canonical, max_len=max_len)
    alignment = align_mod.align_pair(
        src, src_vocab, tgt, tgt_vocab, corpus.canonical,
        mode=EQ1_MODES[config.eq1], min_joint=config.min_joint,
    )
    rel = os.path.join("alignments", f"{src_id}__{tgt_id}.tsv")
    align_mod.write_alignment_tsv(alignment, os.path.join(config.out, rel))
    return rel


def cmd_align(config: PipelineConfig) -> int:
    digest = config_hash({"stage": "align", "ingest": _ingest_digest(config),
                          "eq1": config.eq1, "min_joint": config.min_joint,
                          "max_subword_len": config.max_subword_len})
    if stage_cached(config.out, "align", digest):
        print("align: cached")
        return 0
    corpus = load_retained_corpus(config)
    sources = corpus.sources
    targets = corpus.targets
    if not sources:
        raise DataError("align: corpus has no source doculects")
    os.makedirs(os.path.join(config.out, "alignments"), exist_ok=True)
    jobs = []
    outputs = []
    for src in sources:
        for tgt in targets:
            rel = os.path.join("alignments", f"{src.doculect_id}__{tgt.doculect_id}.tsv")
            outputs.append(rel)
            if os.path.exists(os.path.join(config.out, rel)):
                continue  # resumable: completed pairs are skipped
            jobs.append((config, src.doculect_id, tgt.doculect_id))
    if config.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            list(pool.map(_align_one, jobs))
    else:
        for job in jobs:
            _align_one(job)
    write_manifest(config.out, "align", digest, outputs)
    print(f"align: {len(outputs)} pairs ({len(jobs)} newly aligned)")
    return 0


def _load_annotations(config: PipelineConfig, corpus: corpus_mod.Corpus):
    if not config.annotations:
        raise DataError("project: no annotations directory configured")
    annotations = {}
    for doc in corpus.sources:
        path = os.path.join(config.annotations, f"{doc.doculect_id}.tsv")
        if not os.path.exists(path):
            raise DataError(f"project: missing annotation file {path}")
        ann = project_mod.read_annotations(doc.doculect_id, doc.iso639_3, path)
        emb_path = os.path.join(config.annotations, f"{doc.doculect_id}.emb.tsv")
        if os.path.exists(emb_path):
            ann = project_mod.attach_embeddings(ann, project_mod.read_embedding_dump(emb_path))
        annotations[doc.doculect_id] = ann
    return annotations


def cmd_project(config: PipelineConfig) -> int:
    digest = config_hash({"stage": "project", "ingest": _ingest_digest(config),
                          "annotations": config.annotations, "lexicon": config.lexicon,
                          "threshold": config.projection_threshold})
    if stage_cached(config.out, "project", digest):
        print("project: cached")
        return 0
    corpus = load_retained_corpus(config)
    annotations = _load_annotations(config, corpus)
    lexicon = project_mod.read_concept_lexicon(config.lexicon) if config.lexicon else None
    any_embeddings = any(
        tok.embedding is not None
        for ann in annotations.values()
        for toks in ann.verses.values()
        for tok in toks
    )
    os.makedirs(os.path.join(config.out, "projected"), exist_ok=True)
    outputs = []
    for target in corpus.targets:
        alignments = {}
        for src_id in annotations:
            rel = os.path.join("alignments", f"{src_id}__{target.doculect_id}.tsv")
            path = os.path.join(config.out, rel)
            if not os.path.exists(path):
                raise DataError(f"project: missing alignment cache {path}; run align first")
            alignments[src_id] = align_mod.read_alignment_tsv(src_id, target.doculect_id, path)
        projected = project_mod.project_doculect(
            target, alignments, annotations, lexicon,
            threshold=config.projection_threshold, with_embeddings=any_embeddings,
        )
        rel = os.path.join("projected", f"{target.doculect_id}.tsv")
        project_mod.write_projection(projected, os.path.join(config.out, rel))
        outputs.append(rel)
        if any_embeddings:
            emb = {
                verse: [tok.embedding for tok in toks]
                for verse, toks in projected.verses.items()
            }
            emb_rel = os.path.join("projected", f"{target.doculect_id}.emb.tsv")
            project_mod.write_embedding_dump(emb, os.path.join(config.out, emb_rel))
            outputs.append(emb_rel)
    write_manifest(config.out, "project", digest, outputs)
    print(f"project: {len(corpus.targets)} targets projected")
    return 0


def cmd_features(config: PipelineConfig) -> int:
    digest = config_hash({"stage": "features", "ingest": _ingest_digest(config),
                          "paradigm_max_distance": config.paradigm_max_distance,
                          "min_paradigms": config.min_paradigms,
                          "pairs_per_pos": config.pairs_per_pos, "seed": config.seed})
    if stage_cached(config.out, "features", digest):
        print("features: cached")
        return 0
    corpus = load_retained_corpus(config)
    projections = {}
    profiles = {}
    for target in corpus.targets:
        path = os.path.join(config.out, "projected", f"{target.doculect_id}.tsv")
        if not os.path.exists(path):
            raise DataError(f"features: missing projection cache {path}; run project first")
        projected = project_mod.read_projection(target.doculect_id, path)
        projections[target.doculect_id] = projected
        paradigms = features_mod.extract_paradigms(
            projected, max_distance=config.paradigm_max_distance
        )
        # a PoS below the paradigm-count floor is treated as non-inflecting
        inflecting = [
            p for p in paradigms
            if features_mod.has_inflection(paradigms, p.pos, config.min_paradigms)
        ]
        if inflecting:
            profiles[target.doculect_id] = features_mod.affixation_profile(
                inflecting, pairs_per_pos=config.pairs_per_pos, rng_seed=config.seed
            )
    matrix = features_mod.build_feature_matrix(projections, profiles)
    features_mod.write_feature_matrix(matrix, os.path.join(config.out, "features.tsv"))
    write_manifest(config.out, "features", digest, ["features.tsv"])
    print(f"features: matrix for {len(matrix.doculects)} doculects")
    return 0


def cmd_lexsim(config: PipelineConfig) -> int:
    digest = config_hash({"stage": "lexsim", "ingest": _ingest_digest(config),
                          "wordlists": config.wordlists, "svd_k": config.svd_k,
                          "min_concepts": config.min_concepts,
                          "cross_pair_sample": config.cross_pair_sample})
    if stage_cached(config.out, "lexsim", digest):
        print("lexsim: cached")
        return 0
    outputs = []
    if config.wordlists:
        lists = lexsim_mod.read_word_lists(config.wordlists, config.min_concepts)
        ordered = [lists[k] for k in sorted(lists)]
        if len(ordered) < 2:
            raise DataError("lexsim: fewer than 2 usable word lists")
        dm = lexsim_mod.distance_matrix(ordered, config.cross_pair_sample)
        reps = lexsim_mod.truncated_svd(dm, k=min(config.svd_k, len(ordered)))
        reps.id = "asjp"
        lexsim_mod.write_representations(reps, os.path.join(config.out, "asjp_reps.tsv"))
        outputs.append("asjp_reps.tsv")

    projected_dir = os.path.join(config.out, "projected")
    if os.path.isdir(projected_dir):
        corpus = load_retained_corpus(config)
        lists = []
        for target in corpus.targets:
            path = os.path.join(projected_dir, f"{target.doculect_id}.tsv")
            if not os.path.exists(path):
                continue
            projected = project_mod.read_projection(target.doculect_id, path)
            wl = lexsim_mod.projected_word_list(target, projected)
            if wl.entries:
                lists.append(wl)
        if len(lists) >= 2:
            dm = lexsim_mod.distance_matrix(lists, config.cross_pair_sample)
            reps = lexsim_mod.truncated_svd(dm, k=min(config.svd_k, len(lists)))
            reps.id = "lexical"
            lexsim_mod.write_representations(reps, os.path.join(config.out, "lexical_reps.tsv"))
            outputs.append("lexical_reps.tsv")
    if not outputs:
        raise DataError("lexsim: neither word lists nor projected concepts available")
    write_manifest(config.out, "lexsim", digest, outputs)
    print(f"lexsim: wrote {', '.join(outputs)}")
    return 0


def doculects_from_metadata(path: str) -> list[corpus_mod.Doculect]:
    rows = corpus_mod.load_metadata(path)
    return [
        corpus_mod.Doculect(
            doculect_id=row["doculect_id"],
            iso639_3=row["iso639_3"],
            family=row["glottolog_family"],
            macroarea=row["macroarea"],
            contacts=frozenset(c.strip() for c in row["contacts"].split(",") if c.strip()),
            role=row["role"],
        )
        for row in rows.values()
    ]


def _probe_label_sources(config: PipelineConfig):
    if not config.database:
        raise DataError("probe: no database file configured")
    sources = typodb_mod.load_database(config.database)
    if config.groups:
        for group in typodb_mod.read_feature_groups(config.groups):
            sources = typodb_mod.filter_mutually_exclusive(sources, group)
    projected_sources = {}
    matrix_path = os.path.join(config.out, "features.tsv")
    if os.path.exists(matrix_path):
        matrix = features_mod.read_feature_matrix(matrix_path)
        projected_sources = typodb_mod.attach_projected_labels(matrix)
    return sources, projected_sources


def cmd_probe(config: PipelineConfig, representations_path: str, feature: str) -> int:
    if not os.path.exists(representations_path):
        raise DataError(f"probe: representations file {representations_path} not found")
    rep_id = os.path.splitext(os.path.basename(representations_path))[0]
    representations = lexsim_mod.read_representations(representations_path, rep_id=rep_id)
    doculects = doculects_from_metadata(config.metadata)
    database_sources, projected_sources = _probe_label_sources(config)
    if feature not in database_sources:
        raise DataError(f"probe: feature {feature!r} not in database")
    eval_labels = database_sources[feature]
    if config.train_source == "projected":
        if feature not in projected_sources:
            raise DataError(f"probe: no projected labels for feature {feature!r}")
        train_labels = projected_sources[feature]
    else:
        train_labels = eval_labels

    policy = probe_mod.IndependencePolicy.from_mode(config.mode)
    result = probe_mod.run_probe(
        representations, train_labels, eval_labels, doculects, policy,
        n_samples=config.n_samples, min_families=config.min_families,
        rng_seed=config.seed, C=config.C, jobs=config.jobs,
    )

    extra = {}
    projection_f1 = None
    if result.status == "ok" and len(database_sources) > 1:
        ranked = probe_mod.best_explained_by(result, database_sources, doculects)
        extra["best_explained_by"] = [[name, f1] for name, f1 in ranked]
    if result.status == "ok" and feature in projected_sources:
        projected = projected_sources[feature]
        eligible = {}
        gold_map = {}
        for d in doculects:
            g = eval_labels.label_for(d.doculect_id, d.iso639_3)
            p = projected.label_for(d.doculect_id, d.iso639_3)
            if g is not None and p is not None:
                eligible[d.doculect_id] = p
                gold_map[d.doculect_id] = g
        if eligible:
            family_of = {d.doculect_id: d.family for d in doculects}
            projection_f1 = probe_mod.family_weighted_f1(eligible, gold_map, family_of)
            extra["projection_f1"] = projection_f1
        try:
            M = probe_mod.confusion3(eval_labels, projected, result.mode_predictions, doculects)
            extra["confusion3"] = M.tolist()
            f1_all, f1_agree = probe_mod.agreement_subset_f1(
                eval_labels, projected, result.mode_predictions, doculects
            )
            extra["agreement_f1"] = {"all": f1_all, "agreeing": f1_agree}
        except DataError:
            pass

    os.makedirs(config.out, exist_ok=True)
    stem = f"probe_{feature}__{rep_id}"
    atomic_write(
        os.path.join(config.out, f"{stem}.json"),
        probe_mod.probe_result_to_json(result, extra),
    )
    if result.status == "ok":
        metrics = probe_mod.weighted_metrics(result, probe_mod.FAMILY)
        plot_row = [
            feature, rep_id,
            repr(metrics.mean_f1), repr(metrics.baseline_mean_f1_p99),
            "NA" if projection_f1 is None else repr(projection_f1),
        ]
        print(f"probe: {feature} x {rep_id}: family mean F1 {metrics.mean_f1:.4f} "
              f"(baseline p99 {metrics.baseline_mean_f1_p99:.4f})")
    else:
        plot_row = [feature, rep_id, "NA", "NA", "NA"]
        print(f"probe: {feature} x {rep_id}: {result.status}")
    header = "feature\trepresentation\tfamily_mean_f1\tbaseline_f1_p99\tprojection_f1\n"
    atomic_write(
        os.path.join(config.out, f"{stem}.plot.tsv"), header + "\t".join(plot_row) + "\n"
    )
    return 0


def cmd_run_all(config: PipelineConfig) -> int:
    for step in (cmd_ingest, cmd_subwords, cmd_align, cmd_project, cmd_features):
        code = step(config)
        if code != 0:
            return code
    if config.wordlists or os.path.isdir(os.path.join(config.out, "projected")):
        code = cmd_lexsim(config)
        if code != 0:
            return code
    rep_paths = list(config.representations)
    for name in ("asjp_reps.tsv", "lexical_reps.tsv"):
        path = os.path.join(config.out, name)
        if os.path.exists(path) and path not in rep_paths:
            rep_paths.append(path)
    if config.database and config.probe_features:
        for feature in config.probe_features:
            for rep_path in rep_paths:
                code = cmd_probe(config, rep_path, feature)
                if code != 0:
                    return code
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="typoprobe",
        description="Typological features from parallel text and probing of language representations",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value config file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="master random seed")
    common.add_argument("--jobs", type=int, help="parallel worker count")
    common.add_argument("--mode", choices=["sound", "naive"], help="cross-validation policy")
    common.add_argument("--eq1", choices=["paper", "full"],
                        help="independence model in the alignment score")
    common.add_argument("--texts", help="comma-separated verse files or globs")
    common.add_argument("--metadata", help="doculect metadata TSV")
    common.add_argument("--annotations", help="directory with source annotations")
    common.add_argument("--lexicon", help="concept lexicon TSV")
    common.add_argument("--wordlists", help="word list TSV for lexical baselines")
    common.add_argument("--database", help="typological database TSV")
    common.add_argument("--groups", help="mutually-exclusive feature groups file")
    common.add_argument("--n-samples", type=int, dest="n_samples")
    common.add_argument("--min-families", type=int, dest="min_families")

    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("ingest", "subwords", "align", "project", "features", "lexsim"):
        sub.add_parser(name, parents=[common])
    probe = sub.add_parser("probe", parents=[common])
    probe.add_argument("--representations", required=True, help="representation file to probe")
    probe.add_argument("--feature", required=True, help="database feature name")
    probe.add_argument("--train-source", choices=["database", "projected"], dest="train_source")
    runall = sub.add_parser("run-all", parents=[common])
    runall.add_argument("--representations", help="comma-separated representation files")
    runall.add_argument("--probe-features", dest="probe_features",
                        help="comma-separated database features to probe")
    return parser


def apply_overrides(config: PipelineConfig, args: argparse.Namespace) -> None:
    simple = ("out", "seed", "jobs", "mode", "eq1", "metadata", "annotations",
              "lexicon", "wordlists", "database", "groups", "train_source",
              "n_samples", "min_families")
    for name in simple:
        value = getattr(args, name, None)
        if value is not None:
            setattr(config, name, value)
    if getattr(args, "texts", None):
        config.texts = [p.strip() for p in args.texts.split(",") if p.strip()]
    if getattr(args, "command", "") == "run-all":
        if getattr(args, "representations", None):
            config.representations = [
                p.strip() for p in args.representations.split(",") if p.strip()
            ]
        if getattr(args, "probe_features", None):
            config.probe_features = [
                p.strip() for p in args.probe_features.split(",") if p.strip()
            ]


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        apply_overrides(config, args)
        config.validate()
        if args.command == "ingest":
            return cmd_ingest(config)
        if args.command == "subwords":
            return cmd_subwords(config)
        if args.command == "align":
            return cmd_align(config)
        if args.command == "project":
            return cmd_project(config)
        if args.command == "features":
            return cmd_features(config)
        if args.command == "lexsim":
            return cmd_lexsim(config)
        if args.command == "probe":
            return cmd_probe(config, args.representations, args.feature)
        if args.command == "run-all":
            return cmd_run_all(config)
        parser.error(f"unknown command {args.command}")
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # internal error
        logger.exception("internal error: %s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
