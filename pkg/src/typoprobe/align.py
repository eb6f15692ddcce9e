"""Subword co-occurrence scoring and greedy token alignment.

A subword pair (w from the source doculect, u from the target) is scored by
the log Bayes factor of a dependent-occurrence model over an
independent-occurrence model, computed from verse-level co-occurrence counts
with uniform Dirichlet/Beta priors, plus a log(1/V) prior where V is the
number of source subwords.

The dependent model draws each shared verse from a categorical distribution
over four outcomes (w only, u only, both, neither). Two variants of the
independent model are supported:

* ``full_independence`` (default): two independent Bernoulli draws, one per
  subword — the likelihood is the product of both marginal terms;
* ``paper_literal``: only the w marginal is subtracted.

Both likelihoods are sequence probabilities of the observed verse outcomes;
no multinomial coefficient is included (it would not cancel between the two
models).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from math import lgamma, log
from typing import Iterable, Sequence

from typoprobe.corpus import Doculect, VerseId
from typoprobe.errors import DataError
from typoprobe.subword import SubwordVocab, token_subword_index

MODES = ("full_independence", "paper_literal")

DEFAULT_MIN_JOINT = 2


@dataclass(frozen=True)
class CooccurrenceStats:
    """Verse counts for one subword pair over the shared verse set.

    n: shared verses; n_w / n_u: verses containing each subword;
    n_wu: verses containing both.
    """

    n: int
    n_w: int
    n_u: int
    n_wu: int

    def validate(self) -> None:
        ok = (
            0 <= self.n_wu <= min(self.n_w, self.n_u)
            and max(self.n_w, self.n_u) <= self.n
            and self.n_w + self.n_u - self.n_wu <= self.n
        )
        if not ok:
            raise DataError(f"inconsistent co-occurrence counts: {self}")


@dataclass(frozen=True)
class PairScore:
    w: str
    u: str
    stats: CooccurrenceStats
    log_bf: float
    score: float


def dm_log_likelihood(counts: Sequence[int], alphas: Sequence[float]) -> float:
    """Log probability of one outcome sequence under a Dirichlet-categorical.

    This is the marginal likelihood of a particular sequence whose per-outcome
    totals are ``counts``; the multinomial coefficient is deliberately not
    included. With two outcomes it reduces to the Beta-Bernoulli sequence
    probability.
    """
    if len(counts) != len(alphas) or len(counts) < 2:
        raise ValueError("counts and alphas must have equal length >= 2")
    if any(a <= 0 for a in alphas):
        raise ValueError("all alphas must be positive")
    if any(c < 0 for c in counts):
        raise ValueError("counts must be non-negative")
    total_alpha = sum(alphas)
    total = sum(counts) + total_alpha
    result = lgamma(total_alpha) - lgamma(total)
    for c, a in zip(counts, alphas):
        result += lgamma(c + a) - lgamma(a)
    return result


def alignment_score(
    stats: CooccurrenceStats,
    V: int,
    mode: str = "full_independence",
    w: str = "",
    u: str = "",
) -> PairScore:
    """Combine the log(1/V) prior with the log Bayes factor for one pair."""
    if V < 1:
        raise ValueError("V must be >= 1")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    stats.validate()
    ones4 = (1.0, 1.0, 1.0, 1.0)
    ones2 = (1.0, 1.0)
    joint = dm_log_likelihood(
        (
            stats.n_w - stats.n_wu,
            stats.n_u - stats.n_wu,
            stats.n_wu,
            stats.n - (stats.n_w + stats.n_u - stats.n_wu),
        ),
        ones4,
    )
    marginal = dm_log_likelihood((stats.n_w, stats.n - stats.n_w), ones2)
    if mode == "full_independence":
        marginal += dm_log_likelihood((stats.n_u, stats.n - stats.n_u), ones2)
    log_bf = joint - marginal
    return PairScore(w=w, u=u, stats=stats, log_bf=log_bf, score=log(1.0 / V) + log_bf)


def passes_thresholds(p: PairScore) -> bool:
    """Empirical filtering: prior-weighted score and two Bayes-factor floors."""
    n_wu = p.stats.n_wu
    return p.score >= 0 and p.log_bf > 0.2 * n_wu and p.log_bf > min(100.0, 0.7 * n_wu)


@dataclass(frozen=True)
class Link:
    src_idx: int
    tgt_idx: int
    score: float
    pair: PairScore | None = None


@dataclass
class Alignment:
    source_doculect: str
    target_doculect: str
    links: dict[VerseId, tuple[Link, ...]] = field(default_factory=dict)

    def n_links(self) -> int:
        return sum(len(ls) for ls in self.links.values())


def shared_verses(
    src: Doculect, tgt: Doculect, canonical: frozenset[VerseId] | None = None
) -> list[VerseId]:
    verses = [v for v in src.verses if v in tgt.verses]
    if canonical is not None:
        verses = [v for v in verses if v in canonical]
    return sorted(verses)


def score_subword_pairs(
    src: Doculect,
    src_vocab: SubwordVocab,
    tgt: Doculect,
    tgt_vocab: SubwordVocab,
    canonical: frozenset[VerseId] | None = None,
    mode: str = "full_independence",
    min_joint: int = DEFAULT_MIN_JOINT,
) -> tuple[dict[tuple[str, str], PairScore], dict[str, frozenset[str]], dict[str, frozenset[str]]]:
    """Score all subword pairs co-occurring in >= min_joint shared verses.

    Returns the score table together with the per-token subword indexes of
    both doculects (reused by the greedy aligner). Pairs below ``min_joint``
    cannot realistically clear the score thresholds and are skipped to bound
    the candidate set.
    """
    verses = shared_verses(src, tgt, canonical)
    if not verses:
        raise DataError(
            f"doculects {src.doculect_id!r} and {tgt.doculect_id!r} share no verses"
        )
    n = len(verses)

    src_tokens = {t for v in verses for t in src.verses[v]}
    tgt_tokens = {t for v in verses for t in tgt.verses[v]}
    src_index = token_subword_index(src_vocab, src_tokens)
    tgt_index = token_subword_index(tgt_vocab, tgt_tokens)

    n_w: Counter = Counter()
    n_u: Counter = Counter()
    joint: Counter = Counter()
    for verse in verses:
        ws: set[str] = set()
        for token in set(src.verses[verse]):
            ws.update(src_index[token])
        us: set[str] = set()
        for token in set(tgt.verses[verse]):
            us.update(tgt_index[token])
        n_w.update(ws)
        n_u.update(us)
        for w in ws:
            for u in us:
                joint[(w, u)] += 1

    V = len(src_vocab.subwords)
    scores: dict[tuple[str, str], PairScore] = {}
    for (w, u), n_wu in joint.items():
        if n_wu < min_joint:
            continue
        stats = CooccurrenceStats(n=n, n_w=n_w[w], n_u=n_u[u], n_wu=n_wu)
        scores[(w, u)] = alignment_score(stats, V, mode=mode, w=w, u=u)
    return scores, src_index, tgt_index


def align_pair(
    src: Doculect,
    src_vocab: SubwordVocab,
    tgt: Doculect,
    tgt_vocab: SubwordVocab,
    canonical: frozenset[VerseId] | None = None,
    mode: str = "full_independence",
    min_joint: int = DEFAULT_MIN_JOINT,
) -> Alignment:
    """Greedy token alignment over all shared (canonical) verses.

    Each source token links to the target token with the best subword pair
    score in the same verse (leftmost target wins ties); links whose best
    pair fails the score thresholds are dropped, leaving the token
    unaligned.
    """
    scores, src_index, tgt_index = score_subword_pairs(
        src, src_vocab, tgt, tgt_vocab, canonical, mode=mode, min_joint=min_joint
    )
    verses = shared_verses(src, tgt, canonical)

    # Best scored pair per (source token type, target token type).
    best_cache: dict[tuple[str, str], PairScore | None] = {}

    def best_pair(src_token: str, tgt_token: str) -> PairScore | None:
        key = (src_token, tgt_token)
        try:
            return best_cache[key]
        except KeyError:
            pass
        best: PairScore | None = None
        for w in src_index[src_token]:
            for u in tgt_index[tgt_token]:
                p = scores.get((w, u))
                if p is None:
                    continue
                if best is None or (p.score, p.log_bf, p.w, p.u) > (
                    best.score,
                    best.log_bf,
                    best.w,
                    best.u,
                ):
                    best = p
        best_cache[key] = best
        return best

    links: dict[VerseId, tuple[Link, ...]] = {}
    for verse in verses:
        src_toks = src.verses[verse]
        tgt_toks = tgt.verses[verse]
        verse_links: list[Link] = []
        for i, s_tok in enumerate(src_toks):
            chosen: PairScore | None = None
            chosen_j = -1
            for j, t_tok in enumerate(tgt_toks):
                p = best_pair(s_tok, t_tok)
                if p is None:
                    continue
                if chosen is None or p.score > chosen.score:
                    chosen = p
                    chosen_j = j
            if chosen is not None and passes_thresholds(chosen):
                verse_links.append(Link(src_idx=i, tgt_idx=chosen_j, score=chosen.score, pair=chosen))
        if verse_links:
            links[verse] = tuple(verse_links)
    return Alignment(
        source_doculect=src.doculect_id, target_doculect=tgt.doculect_id, links=links
    )


def write_alignment_tsv(alignment: Alignment, path: str) -> None:
    """One line per link: verse_id, source index, target index, score."""
    with open(path, "w", encoding="utf-8") as f:
        for verse in sorted(alignment.links):
            for link in alignment.links[verse]:
                f.write(f"{verse}\t{link.src_idx}\t{link.tgt_idx}\t{link.score!r}\n")


def read_alignment_tsv(source_doculect: str, target_doculect: str, path: str) -> Alignment:
    links: dict[VerseId, list[Link]] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 columns")
            verse, src_idx, tgt_idx, score = parts
            links.setdefault(verse, []).append(
                Link(src_idx=int(src_idx), tgt_idx=int(tgt_idx), score=float(score))
            )
    return Alignment(
        source_doculect=source_doculect,
        target_doculect=target_doculect,
        links={v: tuple(ls) for v, ls in links.items()},
    )
