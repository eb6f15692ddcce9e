"""Family-aware cross-validated probing of language representations.

The probe asks whether a binary typological feature can be predicted from
per-language representation vectors by an L2-regularized logistic regression
with k+1 parameters. Naive cross-validation is confounded by genealogy and
areality, so folds are sampled under an independence policy: a training
doculect is excluded when it shares the test doculect's top-level family, its
macro-area, or a listed contact relation.

One Monte-Carlo sample draws one labeled doculect per family as the test
set; every test doculect then gets its own training fold with one labeled,
independent doculect per family. A fixed number of samples (401) yields the
metric distribution; each sample is paired with a shuffled-label baseline fit
on the same folds, whose accuracy should follow a binomial(0.5) model.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from typoprobe.corpus import Doculect
from typoprobe.errors import DataError
from typoprobe.lexsim import RepresentationSet
from typoprobe.typodb import DATABASE, LabelSource

logger = logging.getLogger(__name__)

SOUND = "sound"
NAIVE = "naive"

DEFAULT_N_SAMPLES = 401
DEFAULT_MIN_FAMILIES = 50
DEFAULT_C = 1e-3

POSITIVE = 1  # deterministic tie-break label


@dataclass(frozen=True)
class IndependencePolicy:
    """Which non-independence criteria are active.

    ``sound`` activates all three (family, macro-area, contact); ``naive``
    none of them. The doculect itself is never independent of itself.
    """

    use_family: bool
    use_macroarea: bool
    use_contact: bool
    mode: str

    def __post_init__(self) -> None:
        if self.mode == SOUND and not (self.use_family and self.use_macroarea and self.use_contact):
            raise DataError("sound mode requires all three independence criteria")
        if self.mode == NAIVE and (self.use_family or self.use_macroarea or self.use_contact):
            raise DataError("naive mode must disable all independence criteria")
        if self.mode not in (SOUND, NAIVE):
            raise DataError(f"unknown policy mode {self.mode!r}")

    @classmethod
    def sound(cls) -> "IndependencePolicy":
        return cls(use_family=True, use_macroarea=True, use_contact=True, mode=SOUND)

    @classmethod
    def naive(cls) -> "IndependencePolicy":
        return cls(use_family=False, use_macroarea=False, use_contact=False, mode=NAIVE)

    @classmethod
    def from_mode(cls, mode: str) -> "IndependencePolicy":
        if mode == SOUND:
            return cls.sound()
        if mode == NAIVE:
            return cls.naive()
        raise DataError(f"unknown policy mode {mode!r}")


def independent(a: Doculect, b: Doculect, policy: IndependencePolicy) -> bool:
    """Is b an admissible training doculect when a is under test?"""
    if a.doculect_id == b.doculect_id:
        return False
    if policy.use_family:
        if not a.family or not b.family:
            raise DataError("family metadata required under the family criterion")
        if a.family == b.family or a.iso639_3 == b.iso639_3:
            return False
    if policy.use_macroarea:
        if not a.macroarea or not b.macroarea:
            raise DataError("macroarea metadata required under the areal criterion")
        if a.macroarea == b.macroarea:
            return False
    if policy.use_contact:
        if b.iso639_3 in a.contacts or a.iso639_3 in b.contacts:
            return False
    return True


@dataclass
class FoldSample:
    test: tuple[str, ...]
    train: dict[str, tuple[str, ...]]
    skipped: tuple[tuple[str, str], ...] = ()


def _by_id(doculects: Iterable[Doculect]) -> dict[str, Doculect]:
    return {d.doculect_id: d for d in doculects}


def sample_fold(
    labels: LabelSource,
    doculects: Sequence[Doculect],
    policy: IndependencePolicy,
    rng: np.random.Generator,
    train_labels: Optional[LabelSource] = None,
) -> FoldSample:
    """Draw one Monte-Carlo fold.

    Test: one labeled doculect per family, sampled uniformly. Training (per
    test doculect): one doculect per family, sampled uniformly among those
    carrying a training label and independent of the test doculect. Families
    without independent labeled candidates contribute nothing; test doculects
    with no training family at all are recorded as skipped.
    """
    if train_labels is None:
        train_labels = labels

    eval_docs = [d for d in doculects if labels.label_for(d.doculect_id, d.iso639_3) is not None]
    train_docs = [
        d for d in doculects if train_labels.label_for(d.doculect_id, d.iso639_3) is not None
    ]
    eval_families: dict[str, list[Doculect]] = {}
    for d in sorted(eval_docs, key=lambda d: d.doculect_id):
        eval_families.setdefault(d.family, []).append(d)
    if len(eval_families) < 2:
        raise DataError("need labeled doculects from at least 2 families")
    train_families: dict[str, list[Doculect]] = {}
    for d in sorted(train_docs, key=lambda d: d.doculect_id):
        train_families.setdefault(d.family, []).append(d)

    test: list[str] = []
    for family in sorted(eval_families):
        members = eval_families[family]
        test.append(members[int(rng.integers(len(members)))].doculect_id)

    by_id = _by_id(doculects)
    train: dict[str, tuple[str, ...]] = {}
    skipped: list[tuple[str, str]] = []
    for test_id in test:
        t = by_id[test_id]
        chosen: list[str] = []
        for family in sorted(train_families):
            candidates = [d for d in train_families[family] if independent(t, d, policy)]
            if not candidates:
                continue
            chosen.append(candidates[int(rng.integers(len(candidates)))].doculect_id)
        if chosen:
            train[test_id] = tuple(chosen)
        else:
            skipped.append((test_id, "no_independent_training_families"))
    kept = tuple(t for t in test if t in train)
    return FoldSample(test=kept, train=train, skipped=tuple(skipped))


# ---------------------------------------------------------------------------
# Logistic regression (Newton iterations with Armijo backtracking)


@dataclass
class Classifier:
    weights: np.ndarray
    bias: float
    mean: np.ndarray
    scale: np.ndarray
    n_iter: int = 0
    grad_max: float = 0.0
    objective_trace: tuple[float, ...] = ()  # value after each accepted step

    def decision(self, X: np.ndarray) -> np.ndarray:
        Xs = (np.atleast_2d(X) - self.mean) / self.scale
        return Xs @ self.weights + self.bias

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(self.decision(X))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.decision(X) >= 0.0).astype(int)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def fit_logreg(
    X: np.ndarray,
    y: np.ndarray,
    C: float = DEFAULT_C,
    max_iter: int = 1000,
    tol: float = 1e-6,
) -> Classifier:
    """Minimize 0.5*||w||^2 + C * sum_i c_i * logloss_i with unpenalized bias.

    Columns are standardized to zero mean and unit variance on the training
    fold (constant columns become all-zero). Class weights c_i give each
    class half the total weight. Newton steps with backtracking line search
    guarantee a monotone objective; iteration stops when the gradient
    max-norm reaches ``tol``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError("X must be (n, k) with matching labels")
    if not np.all(np.isfinite(X)):
        raise DataError("representations contain non-finite values")
    n, k = X.shape
    n1 = int(y.sum())
    n0 = n - n1
    if n1 == 0 or n0 == 0:
        raise DataError("training fold contains a single class")

    mean = X.mean(axis=0)
    sd = X.std(axis=0)
    scale = np.where(sd > 0, sd, 1.0)
    Xs = (X - mean) / scale
    cw = np.where(y == 1, n / (2.0 * n1), n / (2.0 * n0))

    w = np.zeros(k)
    b = 0.0

    def objective(w: np.ndarray, b: float) -> float:
        z = Xs @ w + b
        losses = np.logaddexp(0.0, z) - y * z
        return 0.5 * float(w @ w) + C * float(cw @ losses)

    obj = objective(w, b)
    trace = [obj]
    n_iter = 0
    grad_max = np.inf
    for n_iter in range(1, max_iter + 1):
        z = Xs @ w + b
        p = _sigmoid(z)
        r = cw * (p - y)
        grad = np.concatenate([w + C * (Xs.T @ r), [C * float(r.sum())]])
        grad_max = float(np.max(np.abs(grad)))
        if grad_max <= tol:
            n_iter -= 1
            break
        d = C * cw * p * (1.0 - p)
        H = np.empty((k + 1, k + 1))
        H[:k, :k] = Xs.T @ (Xs * d[:, None])
        H[:k, :k] += np.eye(k)
        H[:k, k] = Xs.T @ d
        H[k, :k] = H[:k, k]
        H[k, k] = float(d.sum()) + 1e-12
        try:
            step = np.linalg.solve(H, -grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, -grad, rcond=None)[0]
        descent = float(grad @ step)
        if descent >= 0:  # numerically not a descent direction; fall back
            step = -grad
            descent = -float(grad @ grad)
        t = 1.0
        accepted = False
        while t > 1e-12:
            w_new = w + t * step[:k]
            b_new = b + t * step[k]
            obj_new = objective(w_new, b_new)
            if obj_new <= obj + 1e-4 * t * descent:
                accepted = True
                break
            t *= 0.5
        if not accepted:  # at numerical precision; no further progress possible
            break
        w, b, obj = w_new, b_new, obj_new
        trace.append(obj)
    return Classifier(
        weights=w, bias=b, mean=mean, scale=scale, n_iter=n_iter, grad_max=grad_max,
        objective_trace=tuple(trace),
    )


# ---------------------------------------------------------------------------
# Probe runs


@dataclass
class SampleOutcome:
    predictions: dict[str, int] = field(default_factory=dict)
    skipped: dict[str, str] = field(default_factory=dict)


@dataclass
class ProbeResult:
    feature: str
    representation_id: str
    status: str  # "ok" or "skipped_min_families"
    config: dict
    n_families: int
    gold: dict[str, int] = field(default_factory=dict)
    families: dict[str, str] = field(default_factory=dict)
    isos: dict[str, str] = field(default_factory=dict)
    excluded: tuple[str, ...] = ()
    samples: list[SampleOutcome] = field(default_factory=list)
    baseline_samples: list[SampleOutcome] = field(default_factory=list)
    folds: Optional[list[FoldSample]] = None
    mode_predictions: dict[str, int] = field(default_factory=dict)


@dataclass
class _ProbeContext:
    doculects: list[Doculect]
    vectors: dict[str, np.ndarray]
    train_label_of: dict[str, int]
    eval_label_of: dict[str, int]
    policy: IndependencePolicy
    seed: int
    C: float
    train_source: LabelSource
    eval_source: LabelSource


_WORKER_CTX: Optional[_ProbeContext] = None


def _init_worker(ctx: _ProbeContext) -> None:
    global _WORKER_CTX
    _WORKER_CTX = ctx


def _probe_sample(args) -> tuple[int, SampleOutcome, SampleOutcome, FoldSample]:
    if isinstance(args, tuple):
        ctx, index = args
    else:  # worker-pool path: context lives in the process global
        ctx, index = _WORKER_CTX, args
    assert ctx is not None
    rng = np.random.default_rng([ctx.seed, index])
    fold = sample_fold(ctx.eval_source, ctx.doculects, ctx.policy, rng, ctx.train_source)
    real = SampleOutcome()
    base = SampleOutcome()
    for test_id in fold.test:
        train_ids = fold.train[test_id]
        y = np.array([ctx.train_label_of[i] for i in train_ids])
        if y.min() == y.max():
            real.skipped[test_id] = "single_class_training_fold"
            base.skipped[test_id] = "single_class_training_fold"
            continue
        X = np.stack([ctx.vectors[i] for i in train_ids])
        x_test = ctx.vectors[test_id][None, :]
        clf = fit_logreg(X, y, C=ctx.C)
        real.predictions[test_id] = int(clf.predict(x_test)[0])
        y_shuffled = rng.permutation(y)
        bclf = fit_logreg(X, y_shuffled, C=ctx.C)
        base.predictions[test_id] = int(bclf.predict(x_test)[0])
    for test_id, reason in fold.skipped:
        real.skipped[test_id] = reason
        base.skipped[test_id] = reason
    return index, real, base, fold


def run_probe(
    representations: RepresentationSet,
    train_labels: LabelSource,
    eval_labels: LabelSource,
    doculects: Sequence[Doculect],
    policy: IndependencePolicy,
    n_samples: int = DEFAULT_N_SAMPLES,
    min_families: int = DEFAULT_MIN_FAMILIES,
    rng_seed: int = 0,
    C: float = DEFAULT_C,
    store_folds: bool = False,
    jobs: int = 1,
) -> ProbeResult:
    """Run the full Monte-Carlo probe for one feature and representation set.

    Training labels may come from a projected source, but evaluation gold
    must be a database source. Returns a skipped result when fewer than
    ``min_families`` families carry evaluation labels and representations.
    """
    if eval_labels.kind != DATABASE:
        raise DataError("projected labels must never be used as evaluation gold")

    def rep_for(d: Doculect) -> Optional[np.ndarray]:
        vec = representations.vectors.get(d.doculect_id)
        if vec is None:
            vec = representations.vectors.get(d.iso639_3)
        return vec

    excluded = []
    usable: list[Doculect] = []
    vectors: dict[str, np.ndarray] = {}
    for d in doculects:
        has_label = (
            eval_labels.label_for(d.doculect_id, d.iso639_3) is not None
            or train_labels.label_for(d.doculect_id, d.iso639_3) is not None
        )
        if not has_label:
            continue
        vec = rep_for(d)
        if vec is None:
            excluded.append(d.doculect_id)
            continue
        usable.append(d)
        vectors[d.doculect_id] = vec
    if excluded:
        logger.info(
            "feature %s: %d labeled doculects lack representations: %s",
            eval_labels.feature,
            len(excluded),
            ", ".join(sorted(excluded)[:10]),
        )

    gold = {
        d.doculect_id: eval_labels.label_for(d.doculect_id, d.iso639_3)
        for d in usable
        if eval_labels.label_for(d.doculect_id, d.iso639_3) is not None
    }
    train_label_of = {
        d.doculect_id: train_labels.label_for(d.doculect_id, d.iso639_3)
        for d in usable
        if train_labels.label_for(d.doculect_id, d.iso639_3) is not None
    }
    eval_families = {d.family for d in usable if d.doculect_id in gold}

    config = {
        "C": C,
        "decision_threshold": 0.5,
        "min_families": min_families,
        "n_samples": n_samples,
        "policy": {
            "mode": policy.mode,
            "use_contact": policy.use_contact,
            "use_family": policy.use_family,
            "use_macroarea": policy.use_macroarea,
        },
        "seed": rng_seed,
        "train_kind": train_labels.kind,
        "train_feature": train_labels.feature,
    }
    result = ProbeResult(
        feature=eval_labels.feature,
        representation_id=representations.id,
        status="ok",
        config=config,
        n_families=len(eval_families),
        gold=gold,
        families={d.doculect_id: d.family for d in usable},
        isos={d.doculect_id: d.iso639_3 for d in usable},
        excluded=tuple(sorted(excluded)),
    )
    if len(eval_families) < min_families:
        result.status = "skipped_min_families"
        return result

    ctx = _ProbeContext(
        doculects=usable,
        vectors=vectors,
        train_label_of=train_label_of,
        eval_label_of=gold,
        policy=policy,
        seed=rng_seed,
        C=C,
        train_source=train_labels,
        eval_source=eval_labels,
    )
    outcomes: list[tuple[int, SampleOutcome, SampleOutcome, FoldSample]] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(ctx,)) as pool:
            outcomes = list(pool.map(_probe_sample, range(n_samples), chunksize=8))
    else:
        outcomes = [_probe_sample((ctx, i)) for i in range(n_samples)]
    outcomes.sort(key=lambda item: item[0])

    folds = [] if store_folds else None
    for _, real, base, fold in outcomes:
        result.samples.append(real)
        result.baseline_samples.append(base)
        if folds is not None:
            folds.append(fold)
    result.folds = folds
    result.mode_predictions = mode_predictions(result)
    return result


# ---------------------------------------------------------------------------
# Metrics


FAMILY = "family"
LANGUAGE = "language"


def _group_of(result: ProbeResult, weighting: str) -> Mapping[str, str]:
    if weighting == FAMILY:
        return result.families
    if weighting == LANGUAGE:
        return result.isos
    raise ValueError(f"unknown weighting {weighting!r}")


def _sample_weights(ids: Sequence[str], group_of: Mapping[str, str]) -> dict[str, float]:
    counts: dict[str, int] = {}
    for i in ids:
        g = group_of[i]
        counts[g] = counts.get(g, 0) + 1
    return {i: 1.0 / counts[group_of[i]] for i in ids}


def weighted_scores(
    predictions: Mapping[str, int],
    gold: Mapping[str, int],
    weights: Mapping[str, float],
) -> tuple[float, float]:
    """Weighted accuracy and mean-of-two-class F1 (empty classes score 0)."""
    tp = fp = fn = tn = 0.0
    for i, pred in predictions.items():
        w = weights[i]
        g = gold[i]
        if pred == 1 and g == 1:
            tp += w
        elif pred == 1 and g == 0:
            fp += w
        elif pred == 0 and g == 1:
            fn += w
        else:
            tn += w
    total = tp + fp + fn + tn
    accuracy = (tp + tn) / total
    f1_pos = 2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) > 0 else 0.0
    f1_neg = 2 * tn / (2 * tn + fn + fp) if (2 * tn + fn + fp) > 0 else 0.0
    return accuracy, (f1_pos + f1_neg) / 2.0


@dataclass
class WeightedMetrics:
    weighting: str
    per_sample_accuracy: list[float]
    per_sample_mean_f1: list[float]
    baseline_per_sample_accuracy: list[float]
    baseline_per_sample_mean_f1: list[float]
    accuracy: float
    mean_f1: float
    baseline_accuracy: float
    baseline_mean_f1: float
    baseline_accuracy_p99: float
    baseline_mean_f1_p99: float


def weighted_metrics(result: ProbeResult, weighting: str = FAMILY) -> WeightedMetrics:
    """Per-sample and aggregate weighted metrics, plus the baseline's 99th
    percentile. Samples without predictions are excluded (pairwise)."""
    group_of = _group_of(result, weighting)
    acc: list[float] = []
    f1: list[float] = []
    bacc: list[float] = []
    bf1: list[float] = []
    for real, base in zip(result.samples, result.baseline_samples):
        if not real.predictions:
            continue
        ids = sorted(real.predictions)
        weights = _sample_weights(ids, group_of)
        a, f = weighted_scores(real.predictions, result.gold, weights)
        acc.append(a)
        f1.append(f)
        a, f = weighted_scores(base.predictions, result.gold, weights)
        bacc.append(a)
        bf1.append(f)
    if not acc:
        raise DataError("no samples with predictions to aggregate")
    return WeightedMetrics(
        weighting=weighting,
        per_sample_accuracy=acc,
        per_sample_mean_f1=f1,
        baseline_per_sample_accuracy=bacc,
        baseline_per_sample_mean_f1=bf1,
        accuracy=float(np.mean(acc)),
        mean_f1=float(np.mean(f1)),
        baseline_accuracy=float(np.mean(bacc)),
        baseline_mean_f1=float(np.mean(bf1)),
        baseline_accuracy_p99=float(np.percentile(bacc, 99)),
        baseline_mean_f1_p99=float(np.percentile(bf1, 99)),
    )


def mode_predictions(result: ProbeResult) -> dict[str, int]:
    """Most frequent predicted label per doculect across samples; ties go to
    the positive label."""
    counts: dict[str, dict[int, int]] = {}
    for sample in result.samples:
        for doc_id, pred in sample.predictions.items():
            counts.setdefault(doc_id, {0: 0, 1: 0})[pred] += 1
    return {
        doc_id: (POSITIVE if c[1] >= c[0] else 0) for doc_id, c in sorted(counts.items())
    }


def binomial_central_interval(n: int, tail_num: int = 1, tail_den: int = 200) -> tuple[int, int]:
    """Exact central interval of Binomial(n, 1/2) at tail mass tail_num/tail_den.

    Returns count bounds (lo, hi), each the usual quantile: the smallest k
    whose CDF reaches the requested probability. Defaults give the 99%
    interval (0.5% per tail).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    total = 1 << n
    lower_target = tail_num * total  # CDF(k) >= tail_num/tail_den
    upper_target = (tail_den - tail_num) * total
    cum = 0
    lo = hi = None
    for k in range(n + 1):
        cum += comb(n, k)
        scaled = tail_den * cum
        if lo is None and scaled >= lower_target:
            lo = k
        if hi is None and scaled >= upper_target:
            hi = k
            break
    assert lo is not None and hi is not None
    return lo, hi


def baseline_binomial_coverage(result: ProbeResult) -> float:
    """Fraction of baseline samples whose correct-count falls inside the
    binomial(0.5) 99% interval at the realized test size."""
    inside = 0
    considered = 0
    for base in result.baseline_samples:
        m = len(base.predictions)
        if m == 0:
            continue
        considered += 1
        correct = sum(1 for i, p in base.predictions.items() if p == result.gold[i])
        lo, hi = binomial_central_interval(m)
        if lo <= correct <= hi:
            inside += 1
    if considered == 0:
        raise DataError("no baseline samples with predictions")
    return inside / considered


# ---------------------------------------------------------------------------
# Prediction analysis against multiple label sources


def family_weighted_f1(
    predictions: Mapping[str, int],
    gold: Mapping[str, int],
    family_of: Mapping[str, str],
) -> float:
    ids = sorted(predictions)
    weights = _sample_weights(ids, family_of)
    _, f1 = weighted_scores(predictions, gold, weights)
    return f1


def confusion3(
    gold: LabelSource,
    projected: LabelSource,
    predicted: Mapping[str, int],
    doculects: Sequence[Doculect],
    weighting: str = FAMILY,
) -> np.ndarray:
    """Family-weighted percentage mass M[gold][projected][predicted].

    Only doculects carrying all three labels contribute; entries sum to 100,
    with every family (or language) given equal total weight.
    """
    rows = []
    for d in doculects:
        g = gold.label_for(d.doculect_id, d.iso639_3)
        j = projected.label_for(d.doculect_id, d.iso639_3)
        k = predicted.get(d.doculect_id)
        if g is None or j is None or k is None:
            continue
        group = d.family if weighting == FAMILY else d.iso639_3
        rows.append((group, g, j, k))
    if not rows:
        raise DataError("no doculects with gold, projected and predicted labels")
    group_counts: dict[str, int] = {}
    for group, *_ in rows:
        group_counts[group] = group_counts.get(group, 0) + 1
    n_groups = len(group_counts)
    M = np.zeros((2, 2, 2))
    for group, g, j, k in rows:
        M[g, j, k] += 100.0 / (n_groups * group_counts[group])
    return M


def agreement_subset_f1(
    gold: LabelSource,
    projected: LabelSource,
    predicted: Mapping[str, int],
    doculects: Sequence[Doculect],
) -> tuple[float, float]:
    """Family-weighted mean F1 against gold on all triple-labeled doculects,
    and on the subset where projection and prediction agree."""
    family_of = {d.doculect_id: d.family for d in doculects}
    all_preds: dict[str, int] = {}
    all_gold: dict[str, int] = {}
    agreeing: dict[str, int] = {}
    for d in doculects:
        g = gold.label_for(d.doculect_id, d.iso639_3)
        j = projected.label_for(d.doculect_id, d.iso639_3)
        k = predicted.get(d.doculect_id)
        if g is None or j is None or k is None:
            continue
        all_preds[d.doculect_id] = k
        all_gold[d.doculect_id] = g
        if j == k:
            agreeing[d.doculect_id] = k
    if not all_preds:
        raise DataError("no doculects with gold, projected and predicted labels")
    f1_all = family_weighted_f1(all_preds, all_gold, family_of)
    if not agreeing:
        raise DataError("projection and prediction never agree")
    f1_agree = family_weighted_f1(agreeing, all_gold, family_of)
    return f1_all, f1_agree


def best_explained_by(
    result: ProbeResult,
    all_label_sources: Mapping[str, LabelSource],
    doculects: Sequence[Doculect],
) -> list[tuple[str, float]]:
    """Rank candidate features by how well the probe's mode predictions match
    their gold labels; each comparison uses the overlap of languages having
    both the probed and the candidate feature."""
    if len(all_label_sources) < 1:
        raise DataError("need at least one candidate feature")
    family_of = {d.doculect_id: d.family for d in doculects}
    by_id = _by_id(doculects)
    preds = result.mode_predictions
    ranked: list[tuple[str, float]] = []
    for name in sorted(all_label_sources):
        source = all_label_sources[name]
        overlap_preds: dict[str, int] = {}
        overlap_gold: dict[str, int] = {}
        for doc_id, pred in preds.items():
            if doc_id not in result.gold or doc_id not in by_id:
                continue
            d = by_id[doc_id]
            label = source.label_for(d.doculect_id, d.iso639_3)
            if label is None:
                continue
            overlap_preds[doc_id] = pred
            overlap_gold[doc_id] = label
        if not overlap_preds:
            logger.info("candidate feature %s skipped: no label overlap", name)
            continue
        ranked.append((name, family_weighted_f1(overlap_preds, overlap_gold, family_of)))
    ranked.sort(key=lambda item: (-item[1], item[0]))
    return ranked


# ---------------------------------------------------------------------------
# Serialization


def probe_result_to_json(result: ProbeResult, extra: Optional[dict] = None) -> str:
    """Canonical JSON rendering: sorted keys, no whitespace variation, so
    identical runs serialize byte-identically."""
    doc: dict = {
        "feature": result.feature,
        "representation_id": result.representation_id,
        "status": result.status,
        "config": result.config,
        "n_families": result.n_families,
        "excluded": list(result.excluded),
    }
    if result.status == "ok":
        per_sample: dict = {
            "test_sizes": [len(s.predictions) for s in result.samples],
            "skipped": [len(s.skipped) for s in result.samples],
        }
        aggregate: dict = {}
        for weighting in (FAMILY, LANGUAGE):
            m = weighted_metrics(result, weighting)
            per_sample[weighting] = {
                "accuracy": m.per_sample_accuracy,
                "mean_f1": m.per_sample_mean_f1,
                "baseline_accuracy": m.baseline_per_sample_accuracy,
                "baseline_mean_f1": m.baseline_per_sample_mean_f1,
            }
            aggregate[weighting] = {
                "accuracy": m.accuracy,
                "mean_f1": m.mean_f1,
                "baseline_accuracy": m.baseline_accuracy,
                "baseline_mean_f1": m.baseline_mean_f1,
                "baseline_accuracy_p99": m.baseline_accuracy_p99,
                "baseline_mean_f1_p99": m.baseline_mean_f1_p99,
            }
        doc["per_sample"] = per_sample
        doc["aggregate"] = aggregate
        doc["mode_predictions"] = result.mode_predictions
        doc["gold"] = result.gold
        if result.folds is not None:
            doc["folds"] = [
                {"test": list(f.test), "train": {t: list(tr) for t, tr in f.train.items()}}
                for f in result.folds
            ]
    if extra:
        doc.update(extra)
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
