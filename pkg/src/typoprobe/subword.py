"""Subword vocabulary extraction and verse-level occurrence statistics.

A *subword* is any token substring whose corpus frequency is strictly higher
than the frequency of every longer substring containing it; full token forms
always satisfy this. Frequency here counts token occurrences with
multiplicity (a substring appearing twice inside one token counts twice),
while the occurrence sets feeding the alignment scores are verse-level and
therefore computed separately.

Frequency is monotone under containment, so checking the two
single-character extensions of each candidate suffices for strict
maximality.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from typoprobe.corpus import Doculect, VerseId
from typoprobe.errors import DataError


@dataclass
class SubwordVocab:
    doculect_id: str
    subwords: frozenset[str]
    occurrence: dict[str, frozenset[VerseId]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.subwords)


def _substring_frequencies(token_counts: Counter, max_len: int | None) -> Counter:
    freq: Counter = Counter()
    limit = max_len + 1 if max_len is not None else None
    for token, count in token_counts.items():
        n = len(token)
        top = n if limit is None else min(n, limit)
        for length in range(1, top + 1):
            for start in range(0, n - length + 1):
                freq[token[start : start + length]] += count
    return freq


def extract_subwords(doculect: Doculect, max_len: int | None = None) -> SubwordVocab:
    """Extract the strictly-frequency-maximal substrings of a doculect.

    ``max_len`` caps the subword length (off by default); maximality of
    strings at the cap is still checked against their one-longer extensions.
    """
    if not doculect.verses:
        raise DataError(f"doculect {doculect.doculect_id!r} has no verses")
    token_counts: Counter = Counter()
    for tokens in doculect.verses.values():
        token_counts.update(tokens)

    freq = _substring_frequencies(token_counts, max_len)
    max_superstring: dict[str, int] = {}
    for s, count in freq.items():
        if len(s) < 2:
            continue
        for child in (s[:-1], s[1:]):
            prev = max_superstring.get(child, 0)
            if count > prev:
                max_superstring[child] = count

    subwords = frozenset(
        s
        for s, count in freq.items()
        if (max_len is None or len(s) <= max_len) and count > max_superstring.get(s, 0)
    )
    return SubwordVocab(doculect_id=doculect.doculect_id, subwords=subwords)


def token_subword_index(vocab: SubwordVocab, tokens: set[str]) -> dict[str, frozenset[str]]:
    """Map each distinct token to the vocabulary subwords it contains."""
    index: dict[str, frozenset[str]] = {}
    members = vocab.subwords
    for token in tokens:
        found: set[str] = set()
        n = len(token)
        for length in range(1, n + 1):
            for start in range(0, n - length + 1):
                s = token[start : start + length]
                if s in members:
                    found.add(s)
        index[token] = frozenset(found)
    return index


def occurrence_sets(
    doculect: Doculect,
    vocab: SubwordVocab,
    canonical: frozenset[VerseId] | None = None,
) -> dict[str, frozenset[VerseId]]:
    """Verse sets per subword, restricted to the canonical verses when given.

    A subword occurring several times within one verse is counted once;
    subwords absent from every eligible verse map to the empty set.
    """
    verse_ids = doculect.verses.keys()
    if canonical is not None:
        verse_ids = [v for v in verse_ids if v in canonical]
    distinct_tokens = {t for v in verse_ids for t in doculect.verses[v]}
    index = token_subword_index(vocab, distinct_tokens)

    hits: dict[str, set[VerseId]] = {s: set() for s in vocab.subwords}
    for verse_id in verse_ids:
        for token in set(doculect.verses[verse_id]):
            for s in index[token]:
                hits[s].add(verse_id)
    return {s: frozenset(vs) for s, vs in hits.items()}


def build_vocab(
    doculect: Doculect,
    canonical: frozenset[VerseId] | None = None,
    max_len: int | None = None,
) -> SubwordVocab:
    """Extract subwords and fill in their occurrence sets in one go."""
    vocab = extract_subwords(doculect, max_len=max_len)
    vocab.occurrence = occurrence_sets(doculect, vocab, canonical)
    return vocab


def write_vocab_tsv(vocab: SubwordVocab, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for s in sorted(vocab.subwords):
            f.write(f"{s}\t{len(vocab.occurrence.get(s, ()))}\n")


def read_vocab_tsv(doculect_id: str, path: str) -> SubwordVocab:
    subwords = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 columns")
            subwords.add(parts[0])
    return SubwordVocab(doculect_id=doculect_id, subwords=frozenset(subwords))
