"""Quantitative typological features from projected annotations.

Three families of features are derived per doculect:

* word-order ratios: the proportion of head-initial instances of a
  dependency pattern (e.g. NOUN <-obj- VERB), binarized at a majority;
* partial inflectional paradigms: clusters of word forms sharing a projected
  concept and PoS with low mean pairwise normalized Levenshtein distance;
* affixation type: whether minimal edit scripts between within-paradigm word
  pairs fall in the first or second half of the words.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from typoprobe.editdist import edit_script, levenshtein
from typoprobe.errors import DataError
from typoprobe.project import ProjectedDoculect, ProjectedToken

CORE_ADJ_CONCEPTS = frozenset(
    ["STRONG", "HIGH", "GOOD", "BAD", "SMALL", "BIG", "NEW", "YOUNG", "OLD", "BEAUTIFUL"]
)

# 2..9 only: atomic in nearly all base-10 systems, and the word for 1 tends
# to double as an article or pronoun.
NUMERAL_2_9_CONCEPTS = frozenset(
    ["TWO", "THREE", "FOUR", "FIVE", "SIX", "SEVEN", "EIGHT", "NINE"]
)

ADJ_CORE = "adj_core"
NUM_2_9 = "num_2_9"

PARADIGM_POS = ("NOUN", "VERB")

DEFAULT_MAX_PARADIGM_DISTANCE = 0.3
DEFAULT_MIN_PARADIGMS = 50
DEFAULT_PAIRS_PER_POS = 1000


@dataclass(frozen=True)
class WordOrderSpec:
    """One head-initial-ratio feature: dependent <-relation- head."""

    name: str
    dependent_pos: frozenset[str]
    relation: str
    head_pos: frozenset[str]
    dependent_class: Optional[str] = None  # ADJ_CORE or NUM_2_9


WORD_ORDER_SPECS: tuple[WordOrderSpec, ...] = (
    WordOrderSpec("object_verb", frozenset({"NOUN", "PROPN"}), "obj", frozenset({"VERB"})),
    WordOrderSpec("oblique_verb", frozenset({"NOUN", "PROPN"}), "obl", frozenset({"VERB"})),
    WordOrderSpec("subject_verb", frozenset({"NOUN", "PROPN"}), "nsubj", frozenset({"VERB"})),
    WordOrderSpec("adjective_noun", frozenset({"ADJ"}), "amod", frozenset({"NOUN"}), ADJ_CORE),
    WordOrderSpec("relative_noun", frozenset({"VERB"}), "acl", frozenset({"NOUN"})),
    WordOrderSpec("numeral_noun", frozenset({"NUM"}), "nummod", frozenset({"NOUN"}), NUM_2_9),
    WordOrderSpec("adposition_noun", frozenset({"ADP"}), "case", frozenset({"NOUN"})),
)

AFFIX_FEATURES = ("prefixing", "suffixing")

FEATURE_NAMES = tuple(s.name for s in WORD_ORDER_SPECS) + AFFIX_FEATURES


def restricted_class_filter(token: ProjectedToken, cls: str) -> bool:
    """Membership of a projected token in a narrowed dependent class."""
    if cls == ADJ_CORE:
        return token.concept in CORE_ADJ_CONCEPTS
    if cls == NUM_2_9:
        return token.concept in NUMERAL_2_9_CONCEPTS
    raise ValueError(f"unknown restricted class {cls!r}")


def head_initial_ratio(projected: ProjectedDoculect, spec: WordOrderSpec) -> Optional[float]:
    """Fraction of matching dependency instances where the head comes first.

    An instance matches when the dependent's projected relation, its PoS
    (and restricted class, if any) and the head's projected PoS all fit the
    spec. Returns None when nothing matches.
    """
    head_initial = 0
    total = 0
    for tokens in projected.verses.values():
        for dep_idx, tok in enumerate(tokens):
            if tok.head is None or tok.deprel != spec.relation:
                continue
            if tok.upos not in spec.dependent_pos:
                continue
            if spec.dependent_class and not restricted_class_filter(tok, spec.dependent_class):
                continue
            head_idx = tok.head - 1
            if head_idx < 0 or head_idx >= len(tokens) or head_idx == dep_idx:
                continue
            if tokens[head_idx].upos not in spec.head_pos:
                continue
            total += 1
            if head_idx < dep_idx:
                head_initial += 1
    if total == 0:
        return None
    return head_initial / total


def binarize_ratio(ratio: float) -> int:
    """1 for a head-initial majority; exactly one half binarizes to 0."""
    return 1 if ratio > 0.5 else 0


@dataclass(frozen=True)
class Paradigm:
    doculect_id: str
    concept: str
    pos: str
    forms: tuple[str, ...]


def paradigm_nld(s1: str, s2: str) -> float:
    """Levenshtein distance normalized by the summed lengths."""
    if not s1 or not s2:
        raise DataError("cannot compare empty word forms")
    return levenshtein(s1, s2) / (len(s1) + len(s2))


def _mean_pairwise(forms: Sequence[str], dist: dict[tuple[int, int], float], members: Sequence[int]) -> float:
    pairs = [(a, b) for i, a in enumerate(members) for b in members[i + 1 :]]
    return sum(dist[min(a, b), max(a, b)] for a, b in pairs) / len(pairs)


def cluster_forms(forms: Sequence[str], max_distance: float = DEFAULT_MAX_PARADIGM_DISTANCE) -> list[tuple[str, ...]]:
    """Average-linkage agglomeration of word forms under the summed-length NLD.

    Merging continues while the closest pair of clusters can be joined
    without the merged cluster's mean pairwise distance reaching
    ``max_distance``. Deterministic: input order breaks ties.
    """
    n = len(forms)
    if n == 0:
        return []
    dist = {
        (i, j): paradigm_nld(forms[i], forms[j]) for i in range(n) for j in range(i + 1, n)
    }
    clusters: list[list[int]] = [[i] for i in range(n)]
    while len(clusters) > 1:
        best: Optional[tuple[float, int, int]] = None
        for a in range(len(clusters)):
            for b in range(a + 1, len(clusters)):
                link = sum(
                    dist[min(i, j), max(i, j)] for i in clusters[a] for j in clusters[b]
                ) / (len(clusters[a]) * len(clusters[b]))
                if best is None or link < best[0]:
                    best = (link, a, b)
        assert best is not None
        _, a, b = best
        merged = clusters[a] + clusters[b]
        if _mean_pairwise(forms, dist, merged) >= max_distance:
            break
        clusters = [c for k, c in enumerate(clusters) if k not in (a, b)] + [merged]
    return [tuple(forms[i] for i in sorted(c)) for c in clusters]


def extract_paradigms(
    projected: ProjectedDoculect,
    max_distance: float = DEFAULT_MAX_PARADIGM_DISTANCE,
    allowed_pos: Sequence[str] = PARADIGM_POS,
) -> list[Paradigm]:
    """Partial paradigms: per concept, cluster the forms of its dominant PoS.

    Keeps clusters with at least two members, at least one form longer than
    4 characters, and mean pairwise distance below ``max_distance``.
    """
    by_concept: dict[str, list[ProjectedToken]] = {}
    for tokens in projected.verses.values():
        for tok in tokens:
            if tok.concept is not None and tok.upos is not None:
                by_concept.setdefault(tok.concept, []).append(tok)

    paradigms: list[Paradigm] = []
    for concept in sorted(by_concept):
        tokens = by_concept[concept]
        pos_counts: dict[str, int] = {}
        for tok in tokens:
            pos_counts[tok.upos] = pos_counts.get(tok.upos, 0) + 1
        # Dominant PoS for the concept; lexicographic tie-break for determinism.
        pos = max(sorted(pos_counts), key=lambda p: pos_counts[p])
        if pos not in allowed_pos:
            continue
        forms = sorted({tok.form for tok in tokens if tok.upos == pos})
        for cluster in cluster_forms(forms, max_distance):
            if len(cluster) < 2:
                continue
            if not any(len(f) > 4 for f in cluster):
                continue
            paradigms.append(
                Paradigm(
                    doculect_id=projected.doculect_id,
                    concept=concept,
                    pos=pos,
                    forms=cluster,
                )
            )
    return paradigms


def has_inflection(
    paradigms: Iterable[Paradigm], pos: str, min_count: int = DEFAULT_MIN_PARADIGMS
) -> bool:
    """A PoS with too few partial paradigms is treated as non-inflecting."""
    return sum(1 for p in paradigms if p.pos == pos) >= min_count


PREFIX = "prefix"
SUFFIX = "suffix"
NEITHER = "neither"


def classify_pair(form1: str, form2: str) -> str:
    """Classify a word pair by where its canonical edit script operates.

    Prefixing when every edit falls in the first half of each word (char
    index < len/2, each word by its own length), suffixing when every edit
    falls in the second half, otherwise neither. Identical forms have an
    empty script and count as neither.
    """
    ops = edit_script(form1, form2)
    if not ops:
        return NEITHER
    half1 = len(form1) / 2
    half2 = len(form2) / 2
    all_first = all(op.pos1 < half1 and op.pos2 < half2 for op in ops)
    all_second = all(op.pos1 >= half1 and op.pos2 >= half2 for op in ops)
    if all_first:
        return PREFIX
    if all_second:
        return SUFFIX
    return NEITHER


@dataclass
class AffixProfile:
    doculect_id: str
    counts: dict[str, dict[str, int]] = field(default_factory=dict)  # pos -> kind -> n

    def totals(self) -> dict[str, int]:
        out = {PREFIX: 0, SUFFIX: 0, NEITHER: 0}
        for per_pos in self.counts.values():
            for kind, n in per_pos.items():
                out[kind] += n
        return out

    def proportions(self, pos: str) -> dict[str, float]:
        per_pos = self.counts.get(pos, {})
        total = sum(per_pos.values())
        if total == 0:
            return {PREFIX: 0.0, SUFFIX: 0.0, NEITHER: 0.0}
        return {k: per_pos.get(k, 0) / total for k in (PREFIX, SUFFIX, NEITHER)}


def affixation_profile(
    paradigms: Sequence[Paradigm],
    pairs_per_pos: int = DEFAULT_PAIRS_PER_POS,
    rng_seed: int = 0,
) -> AffixProfile:
    """Sample within-paradigm pairs per PoS and classify their edit scripts.

    Pairs are pooled over all paradigms of a PoS and sampled without
    replacement when enough exist, with replacement otherwise. The RNG is
    seeded per (doculect, pos) so per-doculect jobs can run in parallel
    reproducibly.
    """
    if not paradigms:
        return AffixProfile(doculect_id="", counts={})
    doculect_id = paradigms[0].doculect_id
    by_pos: dict[str, list[tuple[str, str]]] = {}
    for p in paradigms:
        pool = by_pos.setdefault(p.pos, [])
        for i in range(len(p.forms)):
            for j in range(i + 1, len(p.forms)):
                pool.append((p.forms[i], p.forms[j]))

    counts: dict[str, dict[str, int]] = {}
    for pos in sorted(by_pos):
        pool = by_pos[pos]
        rng = random.Random(f"{rng_seed}:{doculect_id}:{pos}")
        if len(pool) >= pairs_per_pos:
            sampled = rng.sample(pool, pairs_per_pos)
        else:
            sampled = [pool[rng.randrange(len(pool))] for _ in range(pairs_per_pos)]
        tally = {PREFIX: 0, SUFFIX: 0, NEITHER: 0}
        for f1, f2 in sampled:
            tally[classify_pair(f1, f2)] += 1
        counts[pos] = tally
    return AffixProfile(doculect_id=doculect_id, counts=counts)


def affixation_label(profile: AffixProfile) -> Optional[str]:
    """Majority affix position; prefixing wins exact ties, None when nothing
    was affixed at all."""
    totals = profile.totals()
    affixed = totals[PREFIX] + totals[SUFFIX]
    if affixed == 0:
        return None
    return "prefixing" if totals[PREFIX] >= totals[SUFFIX] else "suffixing"


@dataclass
class FeatureMatrix:
    doculects: list[str]
    features: list[str]
    binary: dict[tuple[str, str], int] = field(default_factory=dict)
    ratio: dict[tuple[str, str], float] = field(default_factory=dict)

    def value(self, doculect_id: str, feature: str) -> Optional[int]:
        return self.binary.get((doculect_id, feature))


def build_feature_matrix(
    projections: Mapping[str, ProjectedDoculect],
    profiles: Mapping[str, AffixProfile],
    specs: Sequence[WordOrderSpec] = WORD_ORDER_SPECS,
) -> FeatureMatrix:
    """Assemble the doculect x feature table from projections and profiles."""
    features = [s.name for s in specs] + list(AFFIX_FEATURES)
    matrix = FeatureMatrix(doculects=sorted(projections), features=features)
    for doculect_id in matrix.doculects:
        projected = projections[doculect_id]
        for spec in specs:
            ratio = head_initial_ratio(projected, spec)
            if ratio is None:
                continue
            matrix.ratio[(doculect_id, spec.name)] = ratio
            matrix.binary[(doculect_id, spec.name)] = binarize_ratio(ratio)
        profile = profiles.get(doculect_id)
        if profile is None:
            continue
        label = affixation_label(profile)
        if label is None:
            continue
        totals = profile.totals()
        affixed = totals[PREFIX] + totals[SUFFIX]
        matrix.binary[(doculect_id, "prefixing")] = 1 if label == "prefixing" else 0
        matrix.binary[(doculect_id, "suffixing")] = 1 if label == "suffixing" else 0
        matrix.ratio[(doculect_id, "prefixing")] = totals[PREFIX] / affixed
        matrix.ratio[(doculect_id, "suffixing")] = totals[SUFFIX] / affixed
    return matrix


def write_feature_matrix(matrix: FeatureMatrix, path: str) -> None:
    """TSV with one binary column and one .ratio column per feature."""
    with open(path, "w", encoding="utf-8") as f:
        header = ["doculect_id"]
        for feat in matrix.features:
            header += [feat, f"{feat}.ratio"]
        f.write("\t".join(header) + "\n")
        for doc in matrix.doculects:
            row = [doc]
            for feat in matrix.features:
                b = matrix.binary.get((doc, feat))
                r = matrix.ratio.get((doc, feat))
                row.append("NA" if b is None else str(b))
                row.append("NA" if r is None else repr(r))
            f.write("\t".join(row) + "\n")


def read_feature_matrix(path: str) -> FeatureMatrix:
    with open(path, encoding="utf-8") as f:
        header = f.readline().rstrip("\r\n").split("\t")
        if not header or header[0] != "doculect_id":
            raise DataError(f"{path}: bad feature matrix header")
        features = [c for c in header[1:] if not c.endswith(".ratio")]
        matrix = FeatureMatrix(doculects=[], features=features)
        for lineno, line in enumerate(f, start=2):
            line = line.rstrip("\r\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != len(header):
                raise DataError(f"{path}:{lineno}: wrong column count")
            doc = fields[0]
            matrix.doculects.append(doc)
            for col, value in zip(header[1:], fields[1:]):
                if value == "NA":
                    continue
                if col.endswith(".ratio"):
                    matrix.ratio[(doc, col[: -len(".ratio")])] = float(value)
                else:
                    matrix.binary[(doc, col)] = int(value)
    return matrix
