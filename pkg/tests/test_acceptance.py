"""End-to-end acceptance suite.

Each test prints one PASS/FAIL line for its criterion; all thresholds and
runtime budgets are fixed here, not tuned at runtime. The probe-based
criteria share two full 401-sample runs (positive and negative control).
"""

import math
import time

import numpy as np
import pytest

from typoprobe.align import align_pair, dm_log_likelihood, passes_thresholds
from typoprobe.corpus import Doculect
from typoprobe.features import (
    NEITHER,
    PREFIX,
    SUFFIX,
    affixation_profile,
    build_feature_matrix,
    classify_pair,
    head_initial_ratio,
    Paradigm,
    WORD_ORDER_SPECS,
)
from typoprobe.lexsim import (
    DistanceMatrix,
    RepresentationSet,
    distance_matrix,
    svd_reconstruction,
    truncated_svd,
)
from typoprobe.probe import (
    FAMILY,
    IndependencePolicy,
    ProbeResult,
    SampleOutcome,
    agreement_subset_f1,
    baseline_binomial_coverage,
    confusion3,
    independent,
    mode_predictions,
    probe_result_to_json,
    run_probe,
    weighted_metrics,
)
from typoprobe.project import project_doculect
from typoprobe.subword import build_vocab
from typoprobe.typodb import DATABASE, LabelSource, PROJECTED

from synthdata import (
    alignment_precision_recall,
    bijective_corpus,
    grammar_corpus,
    lexical_population,
    probe_population,
)


def report(criterion: str, ok: bool, detail: str) -> None:
    print(f"[{criterion}] {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"{criterion}: {detail}"


# --- A1: Dirichlet-multinomial correctness ---------------------------------


def count_vectors(total, outcomes):
    if outcomes == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in count_vectors(total - first, outcomes - 1):
            yield (first,) + rest


def test_a1_dirichlet_multinomial():
    start = time.time()
    worst_norm = 0.0
    for n in range(7):
        total = 0.0
        for x in count_vectors(n, 4):
            coeff = math.factorial(n)
            for c in x:
                coeff //= math.factorial(c)
            total += coeff * math.exp(dm_log_likelihood(x, (1.0,) * 4))
        worst_norm = max(worst_norm, abs(total - 1.0))
    worst_bb = 0.0
    for n in range(21):
        for k in range(n + 1):
            pmf = math.comb(n, k) * math.exp(dm_log_likelihood((k, n - k), (1.0, 1.0)))
            worst_bb = max(worst_bb, abs(pmf - 1.0 / (n + 1)))
    elapsed = time.time() - start
    ok = worst_norm < 1e-9 and worst_bb < 1e-12 and elapsed < 1.0
    report(
        "A1",
        ok,
        f"normalization err {worst_norm:.2e} (<1e-9), beta-binomial err "
        f"{worst_bb:.2e} (<1e-12), {elapsed:.2f}s (<1s)",
    )


# --- A2: alignment on a synthetic bijective corpus -------------------------


def test_a2_alignment_bijective_corpus():
    start = time.time()
    corpus = bijective_corpus(n_verses=500, lexicon_size=200, seed=13)
    src_vocab = build_vocab(corpus.source)
    tgt_vocab = build_vocab(corpus.target)
    alignment = align_pair(corpus.source, src_vocab, corpus.target, tgt_vocab)
    precision, recall = alignment_precision_recall(alignment, corpus)
    violations = sum(
        1
        for links in alignment.links.values()
        for link in links
        if link.pair is None or not passes_thresholds(link.pair)
    )
    elapsed = time.time() - start
    ok = precision >= 0.90 and recall >= 0.80 and violations == 0 and elapsed < 30.0
    report(
        "A2",
        ok,
        f"precision {precision:.4f} (>=0.90), type recall {recall:.4f} (>=0.80), "
        f"{violations} threshold violations (=0), {elapsed:.1f}s (<30s)",
    )


# --- A3: word-order projection round trip -----------------------------------


def test_a3_word_order_round_trip():
    start = time.time()
    gc = grammar_corpus(n_targets=20, n_verses=120, n_sources=3, seed=7)
    projections = {}
    for target in gc.targets:
        projections[target.doculect_id] = project_doculect(
            target, gc.alignments[target.doculect_id], gc.annotations
        )

    # strict head-initial doculect: every instantiated ratio must be >= 0.9
    strict = projections[gc.targets[0].doculect_id]
    min_ratio = 1.0
    for spec in WORD_ORDER_SPECS:
        ratio = head_initial_ratio(strict, spec)
        assert ratio is not None, f"spec {spec.name} not instantiated"
        min_ratio = min(min_ratio, ratio)

    matrix = build_feature_matrix(projections, profiles={})
    mismatches = 0
    checked = 0
    for target in gc.targets:
        grammar = gc.grammars[target.doculect_id]
        for spec in WORD_ORDER_SPECS:
            value = matrix.binary.get((target.doculect_id, spec.name))
            assert value is not None, f"{target.doculect_id}/{spec.name} missing"
            checked += 1
            if value != int(grammar[spec.name]):
                mismatches += 1
    elapsed = time.time() - start
    ok = min_ratio >= 0.9 and mismatches == 0 and elapsed < 60.0
    report(
        "A3",
        ok,
        f"min strict-grammar ratio {min_ratio:.3f} (>=0.9), {mismatches}/{checked} "
        f"binarized mismatches (=0), {elapsed:.1f}s (<60s)",
    )


# --- A4: affixation heuristic ------------------------------------------------


def test_a4_affixation_heuristic():
    start = time.time()
    suffixing = [
        Paradigm("d", f"S{i}", "VERB", (stem, stem + "ke", stem + "zi"))
        for i, stem in enumerate(["mutalo", "rizeva", "dofnak", "selopu"])
    ]
    profile = affixation_profile(suffixing, pairs_per_pos=1000, rng_seed=3)
    suffix_share = profile.proportions("VERB")[SUFFIX]

    prefixing = [
        Paradigm("d", f"P{i}", "NOUN", (stem, "ke" + stem, "zi" + stem))
        for i, stem in enumerate(["mutalo", "rizeva", "dofnak", "selopu"])
    ]
    profile = affixation_profile(prefixing, pairs_per_pos=1000, rng_seed=3)
    prefix_share = profile.proportions("NOUN")[PREFIX]

    mixed_ok = classify_pair("abXc", "aYbc") == NEITHER
    elapsed = time.time() - start
    ok = suffix_share == 1.0 and prefix_share == 1.0 and mixed_ok and elapsed < 10.0
    report(
        "A4",
        ok,
        f"suffix share {suffix_share} (=1.0), prefix share {prefix_share} (=1.0), "
        f"mixed-edit pair neither: {mixed_ok}, {elapsed:.1f}s (<10s)",
    )


# --- A5-A7: probe controls ----------------------------------------------------


@pytest.fixture(scope="module")
def positive_probe():
    pop = probe_population(signal=True, seed=101)
    reps = RepresentationSet(id="signal", dim=pop.dim, vectors=pop.vectors)
    start = time.time()
    result = run_probe(
        reps, pop.labels, pop.labels, pop.doculects, IndependencePolicy.sound(),
        n_samples=401, min_families=50, rng_seed=1, store_folds=True,
    )
    return pop, result, time.time() - start


@pytest.fixture(scope="module")
def negative_probe():
    pop = probe_population(signal=False, seed=78, label_by_family="random")
    reps = RepresentationSet(id="noise", dim=pop.dim, vectors=pop.vectors)
    start = time.time()
    result = run_probe(
        reps, pop.labels, pop.labels, pop.doculects, IndependencePolicy.sound(),
        n_samples=401, min_families=50, rng_seed=2, store_folds=True,
    )
    return pop, result, time.time() - start


def test_a5_probe_positive_control(positive_probe):
    _, result, elapsed = positive_probe
    metrics = weighted_metrics(result, FAMILY)
    ok = metrics.mean_f1 >= 0.95 and elapsed < 300.0
    report(
        "A5",
        ok,
        f"family-weighted mean F1 {metrics.mean_f1:.4f} (>=0.95) over "
        f"{len(result.samples)} samples, {elapsed:.0f}s (<300s)",
    )


def test_a6_probe_negative_control(negative_probe):
    _, result, elapsed = negative_probe
    metrics = weighted_metrics(result, FAMILY)
    coverage = baseline_binomial_coverage(result)
    ok = 0.4 <= metrics.accuracy <= 0.6 and coverage >= 0.95 and elapsed < 300.0
    report(
        "A6",
        ok,
        f"mean accuracy {metrics.accuracy:.4f} (in [0.4,0.6]), baseline binomial-99% "
        f"coverage {coverage:.4f} (>=0.95), {elapsed:.0f}s (<300s)",
    )


def audit_folds(pop, result):
    by_id = {d.doculect_id: d for d in pop.doculects}
    policy = IndependencePolicy.sound()
    violations = 0
    pairs = 0
    for fold in result.folds:
        for test_id in fold.test:
            t = by_id[test_id]
            for train_id in fold.train[test_id]:
                pairs += 1
                if not independent(t, by_id[train_id], policy):
                    violations += 1
    return violations, pairs


def test_a7_fold_soundness_and_naive_gap(positive_probe, negative_probe):
    start = time.time()
    v1, n1 = audit_folds(positive_probe[0], positive_probe[1])
    v2, n2 = audit_folds(negative_probe[0], negative_probe[1])

    pop = lexical_population(n_families=24, docs_per_family=3, n_concepts=40, seed=77)
    dm = distance_matrix(pop.word_lists, sample_size=400)
    reps = truncated_svd(dm, k=50)
    reps.id = "family-lexical"
    scores = {}
    for mode in ("sound", "naive"):
        result = run_probe(
            reps, pop.labels, pop.labels, pop.doculects,
            IndependencePolicy.from_mode(mode),
            n_samples=401, min_families=20, rng_seed=5,
        )
        scores[mode] = weighted_metrics(result, FAMILY).mean_f1
    gap = scores["naive"] - scores["sound"]
    elapsed = time.time() - start
    budget = elapsed + positive_probe[2] + negative_probe[2]
    ok = v1 == 0 and v2 == 0 and gap >= 0.15 and budget < 600.0
    report(
        "A7",
        ok,
        f"fold violations {v1}+{v2} of {n1}+{n2} pairs (=0); naive F1 "
        f"{scores['naive']:.4f} vs sound {scores['sound']:.4f}, gap {gap:.4f} "
        f"(>=0.15), {budget:.0f}s (<600s)",
    )


# --- A8: metric hand-checks and determinism ----------------------------------


def handmade_result(samples, gold, families):
    return ProbeResult(
        feature="f", representation_id="r", status="ok", config={},
        n_families=len(set(families.values())), gold=gold, families=families,
        isos={k: k for k in families},
        samples=[SampleOutcome(predictions=dict(s)) for s in samples],
        baseline_samples=[SampleOutcome(predictions=dict(s)) for s in samples],
    )


def test_a8_metric_hand_checks_and_determinism():
    # 1) all-positive predictions on a balanced set: acc 1/2, mean F1 1/3
    gold = {"a": 1, "b": 1, "c": 0, "d": 0}
    families = {k: f"fam_{k}" for k in gold}
    result = handmade_result([{k: 1 for k in gold}], gold, families)
    m = weighted_metrics(result, FAMILY)
    check1 = abs(m.accuracy - 0.5) < 1e-12 and abs(m.mean_f1 - 1 / 3) < 1e-12

    # 2) family weighting equalizes a 3-doculect family against a singleton
    gold = {"a": 1, "b": 1, "c": 1, "d": 0}
    preds = {"a": 1, "b": 0, "c": 0, "d": 0}
    families = {"a": "f1", "b": "f1", "c": "f1", "d": "f2"}
    result = handmade_result([preds], gold, families)
    m = weighted_metrics(result, FAMILY)
    # weights 1/3 per f1 member, 1 for d: tp=1/3 fn=2/3 tn=1
    expected_acc = (1 / 3 + 1) / 2
    expected_f1 = ((2 / 3) / (2 / 3 + 2 / 3) + 2 / (2 + 2 / 3)) / 2
    check2 = abs(m.accuracy - expected_acc) < 1e-12 and abs(m.mean_f1 - expected_f1) < 1e-12

    # 3) confusion3 and agreement F1 on a hand-weighted 3-family example
    docs = [
        Doculect(doculect_id="a", iso639_3="aaa", family="fam1", macroarea="A1"),
        Doculect(doculect_id="b", iso639_3="bbb", family="fam1", macroarea="A1"),
        Doculect(doculect_id="c", iso639_3="ccc", family="fam2", macroarea="A2"),
        Doculect(doculect_id="d", iso639_3="ddd", family="fam3", macroarea="A3"),
    ]
    gold_src = LabelSource(kind=DATABASE, feature="g", labels={"a": 1, "b": 0, "c": 0, "d": 1})
    proj_src = LabelSource(kind=PROJECTED, feature="g", labels={"a": 1, "b": 1, "c": 0, "d": 0})
    predicted = {"a": 1, "b": 0, "c": 1, "d": 0}
    M = confusion3(gold_src, proj_src, predicted, docs)
    check3 = (
        abs(M.sum() - 100.0) < 1e-9
        and abs(M[1, 1, 1] - 100 / 6) < 1e-9
        and abs(M[0, 1, 0] - 100 / 6) < 1e-9
        and abs(M[0, 0, 1] - 100 / 3) < 1e-9
        and abs(M[1, 0, 0] - 100 / 3) < 1e-9
    )
    # agreement subset = {a (match, correct), d (match, wrong)}; hand F1:
    # weights 1 each; tp=1 fn=0 fp=0... d: pred 0 gold 1 -> fn=1
    # f1_pos = 2*1/(2*1+0+1) = 2/3, f1_neg = 0/(0+1) = 0 -> mean 1/3
    f1_all, f1_agree = agreement_subset_f1(gold_src, proj_src, predicted, docs)
    check4 = abs(f1_agree - 1 / 3) < 1e-12

    # 4) byte-identical serialized results under a fixed seed
    pop = probe_population(n_families=12, n_areas=4, docs_per_family=2, dim=8, seed=11)
    reps = RepresentationSet(id="s", dim=pop.dim, vectors=pop.vectors)

    def run_once():
        return probe_result_to_json(
            run_probe(
                reps, pop.labels, pop.labels, pop.doculects, IndependencePolicy.sound(),
                n_samples=12, min_families=10, rng_seed=99,
            )
        )

    check5 = run_once() == run_once()
    ok = check1 and check2 and check3 and check4 and check5
    report(
        "A8",
        ok,
        f"hand-check all-positive {check1}, family-equalize {check2}, confusion3 "
        f"{check3}, agreement-F1 {check4}, byte-identical JSON {check5}",
    )


# --- A9: SVD optimality -------------------------------------------------------


def test_a9_svd_matches_eigendecomposition_oracle():
    worst = 0.0
    for k in (1, 3, 10):
        rng = np.random.default_rng(1000 + k)
        b = rng.normal(size=(10, 10))
        values = (b + b.T) / 2
        np.fill_diagonal(values, 0.0)
        matrix = DistanceMatrix(languages=[f"l{i}" for i in range(10)], values=values)
        err = float(np.linalg.norm(values - svd_reconstruction(matrix, k)))
        eigenvalues = np.linalg.eigh(values)[0]
        tail = sorted(np.abs(eigenvalues), reverse=True)[k:]
        oracle = float(np.sqrt(sum(x * x for x in tail)))
        worst = max(worst, abs(err - oracle))
    ok = worst < 1e-6
    report("A9", ok, f"max |reconstruction err - eigen oracle| {worst:.2e} (<1e-6)")
