"""Lexical-similarity baseline representations.

These representations are built purely from word forms grouped by concept,
so by construction they encode lexical similarity and nothing structural;
the probe uses them as negative controls. Distances follow the classic
ratio: mean normalized Levenshtein distance between same-concept forms,
divided by the mean distance between different-concept forms. A pairwise
distance matrix over languages is reduced with truncated SVD.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from typoprobe.corpus import Doculect
from typoprobe.editdist import levenshtein
from typoprobe.errors import DataError
from typoprobe.project import ProjectedDoculect

MAX_LEN = "max_len"
SUM_LEN = "sum_len"

CROSS_PAIR_SAMPLE = 10000


def nld(s1: str, s2: str, norm: str = MAX_LEN) -> float:
    """Normalized Levenshtein distance; by max length (word lists) or summed
    lengths (paradigms)."""
    if not s1 or not s2:
        raise DataError("cannot compare empty strings")
    d = levenshtein(s1, s2)
    if norm == MAX_LEN:
        return d / max(len(s1), len(s2))
    if norm == SUM_LEN:
        return d / (len(s1) + len(s2))
    raise ValueError(f"unknown norm {norm!r}")


@dataclass
class WordList:
    language: str
    entries: dict[str, frozenset[str]] = field(default_factory=dict)  # concept -> forms

    def n_concepts(self) -> int:
        return len(self.entries)


def read_word_lists(path: str, min_concepts: int = 0) -> dict[str, WordList]:
    """TSV ``iso639_3<TAB>concept<TAB>form``; varieties of one language merge.

    Languages with fewer than ``min_concepts`` concepts are dropped.
    """
    raw: dict[str, dict[str, set[str]]] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 columns")
            language, concept, form = parts
            if not form:
                raise DataError(f"{path}:{lineno}: empty form")
            raw.setdefault(language, {}).setdefault(concept, set()).add(form)
    lists = {
        lang: WordList(language=lang, entries={c: frozenset(v) for c, v in entries.items()})
        for lang, entries in raw.items()
    }
    return {lang: wl for lang, wl in lists.items() if wl.n_concepts() >= min_concepts}


def _pair_seed(id_a: str, id_b: str) -> int:
    digest = hashlib.sha256(f"{id_a}\x00{id_b}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _concept_forms(wl: WordList) -> list[tuple[str, str]]:
    return [(c, f) for c in sorted(wl.entries) for f in sorted(wl.entries[c])]


def _ratio_distance(a: WordList, b: WordList, sample_size: int = CROSS_PAIR_SAMPLE) -> float:
    shared = sorted(set(a.entries) & set(b.entries))
    if not shared:
        raise DataError(
            f"word lists {a.language!r} and {b.language!r} share no concepts"
        )
    # Same-concept numerator: every cross-language form pair per concept.
    per_concept = []
    for concept in shared:
        dists = [nld(x, y) for x in sorted(a.entries[concept]) for y in sorted(b.entries[concept])]
        per_concept.append(sum(dists) / len(dists))
    numerator = sum(per_concept) / len(per_concept)

    # Different-concept denominator, exhaustive when small enough, otherwise
    # a fixed seeded sample (canonical language order keeps this symmetric).
    if a.language > b.language:
        a, b = b, a
    forms_a = _concept_forms(a)
    forms_b = _concept_forms(b)
    total_cross = sum(
        len(a.entries[ca]) * len(b.entries[cb])
        for ca in a.entries
        for cb in b.entries
        if ca != cb
    )
    if total_cross == 0:
        raise DataError(
            f"word lists {a.language!r} and {b.language!r} have no different-concept pairs"
        )
    if total_cross <= sample_size:
        dists = [
            nld(x, y)
            for ca, x in forms_a
            for cb, y in forms_b
            if ca != cb
        ]
    else:
        rng = np.random.default_rng(_pair_seed(a.language, b.language))
        dists = []
        while len(dists) < sample_size:
            ca, x = forms_a[rng.integers(len(forms_a))]
            cb, y = forms_b[rng.integers(len(forms_b))]
            if ca == cb:
                continue
            dists.append(nld(x, y))
    denominator = sum(dists) / len(dists)

    if numerator == 0:
        return 0.0
    if denominator == 0:
        raise DataError(
            f"degenerate word lists {a.language!r}/{b.language!r}: "
            "all different-concept forms identical"
        )
    return numerator / denominator


def asjp_distance(a: WordList, b: WordList, sample_size: int = CROSS_PAIR_SAMPLE) -> float:
    """Lexical distance between two word lists (same-concept over
    different-concept mean NLD)."""
    return _ratio_distance(a, b, sample_size)


@dataclass
class DistanceMatrix:
    languages: list[str]
    values: np.ndarray

    def validate(self) -> None:
        n = len(self.languages)
        if self.values.shape != (n, n):
            raise DataError("distance matrix shape does not match language count")
        if not np.allclose(self.values, self.values.T):
            raise DataError("distance matrix must be symmetric")
        if not np.allclose(np.diag(self.values), 0.0):
            raise DataError("distance matrix must have zero diagonal")


def distance_matrix(lists: Sequence[WordList], sample_size: int = CROSS_PAIR_SAMPLE) -> DistanceMatrix:
    """All pairwise lexical distances; pairs are independent jobs but runtime
    here is fine single-threaded at toolkit scale."""
    n = len(lists)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = _ratio_distance(lists[i], lists[j], sample_size)
            values[i, j] = values[j, i] = d
    return DistanceMatrix(languages=[wl.language for wl in lists], values=values)


@dataclass
class RepresentationSet:
    id: str
    dim: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def validate(self) -> None:
        for key, vec in self.vectors.items():
            if vec.shape != (self.dim,):
                raise DataError(f"vector {key!r} has dimension {vec.shape}, expected {self.dim}")
            if not np.all(np.isfinite(vec)):
                raise DataError(f"vector {key!r} has non-finite entries")


def truncated_svd(matrix: DistanceMatrix, k: int = 100) -> RepresentationSet:
    """Rank-k SVD representations: row i gets U_i * Sigma_k.

    The factorization sign is fixed by making the largest-magnitude entry of
    each left singular vector positive, so output is deterministic.
    """
    matrix.validate()
    n = len(matrix.languages)
    if k > n:
        raise DataError(f"k={k} exceeds matrix size {n}")
    u, s, vt = np.linalg.svd(matrix.values, full_matrices=False)
    for col in range(n):
        pivot = np.argmax(np.abs(u[:, col]))
        if u[pivot, col] < 0:
            u[:, col] = -u[:, col]
            vt[col, :] = -vt[col, :]
    rows = u[:, :k] * s[:k]
    return RepresentationSet(
        id=f"svd{k}",
        dim=k,
        vectors={lang: rows[i].copy() for i, lang in enumerate(matrix.languages)},
    )


def svd_reconstruction(matrix: DistanceMatrix, k: int) -> np.ndarray:
    """The rank-k approximation itself (for error checks)."""
    matrix.validate()
    u, s, vt = np.linalg.svd(matrix.values, full_matrices=False)
    return (u[:, :k] * s[:k]) @ vt[:k, :]


def projected_word_list(doculect: Doculect, projected: ProjectedDoculect) -> WordList:
    """Group a doculect's word forms by their projected concept labels."""
    entries: dict[str, set[str]] = {}
    for verse, tokens in projected.verses.items():
        for tok in tokens:
            if tok.concept is not None:
                entries.setdefault(tok.concept, set()).add(tok.form)
    return WordList(
        language=doculect.doculect_id,
        entries={c: frozenset(v) for c, v in entries.items()},
    )


def corpus_lexical_distance(
    a: tuple[Doculect, ProjectedDoculect],
    b: tuple[Doculect, ProjectedDoculect],
    sample_size: int = CROSS_PAIR_SAMPLE,
) -> float:
    """Lexical distance over corpus forms grouped by projected concepts.

    Stand-in construction for a corpus-internal lexical baseline; same ratio
    statistic as ``asjp_distance``.
    """
    wl_a = projected_word_list(*a)
    wl_b = projected_word_list(*b)
    if not wl_a.entries or not wl_b.entries:
        raise DataError("both doculects need concept projections")
    return _ratio_distance(wl_a, wl_b, sample_size)


def write_representations(reps: RepresentationSet, path: str) -> None:
    """Header ``#dim k`` then one ``id<TAB>float...`` row per language."""
    reps.validate()
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"#dim {reps.dim}\n")
        for key in sorted(reps.vectors):
            values = "\t".join(repr(float(x)) for x in reps.vectors[key])
            f.write(f"{key}\t{values}\n")


def read_representations(path: str, rep_id: Optional[str] = None) -> RepresentationSet:
    with open(path, encoding="utf-8") as f:
        header = f.readline().rstrip("\r\n")
        if not header.startswith("#dim "):
            raise DataError(f"{path}: missing '#dim k' header")
        dim = int(header.split()[1])
        vectors: dict[str, np.ndarray] = {}
        for lineno, line in enumerate(f, start=2):
            line = line.rstrip("\r\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != dim + 1:
                raise DataError(f"{path}:{lineno}: expected id and {dim} floats")
            vectors[parts[0]] = np.array([float(x) for x in parts[1:]])
    reps = RepresentationSet(id=rep_id or path, dim=dim, vectors=vectors)
    reps.validate()
    return reps
