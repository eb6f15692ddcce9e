"""Multi-source projection of annotations onto target doculects.

Given word alignments from several annotated source doculects, each target
token receives PoS tags, dependency links, semantic concepts and word
embeddings by voting: a label is projected when it is the unique plurality
candidate and is supported by at least 20% of the source texts available for
the verse (sources whose translation contains the verse, aligned or not).
Embeddings skip the vote and are averaged over all aligned source tokens.

Dependency links are projected individually per source: if the target token
aligns to source token x, x has head y, and y aligns to target token t',
then (t', x's label) is one vote. Head and label are voted as a joint pair;
no tree consistency is enforced.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from typoprobe.align import Alignment
from typoprobe.corpus import Doculect, VerseId
from typoprobe.errors import DataError

UD_UPOS = frozenset(
    "ADJ ADP ADV AUX CCONJ DET INTJ NOUN NUM PART PRON PROPN PUNCT SCONJ SYM VERB X".split()
)

DEFAULT_THRESHOLD = 0.2


def min_votes(n_sources_available: int, threshold: float) -> int:
    """Smallest vote count satisfying count >= threshold * available."""
    return max(1, math.ceil(threshold * n_sources_available - 1e-9))


@dataclass
class AnnotatedToken:
    form: str
    lemma: str
    upos: str
    head: int  # 1-based within the verse, 0 = root
    deprel: str
    concepts: tuple[str, ...] = ()
    embedding: Optional[np.ndarray] = None


@dataclass
class SourceAnnotation:
    doculect_id: str
    language: str
    verses: dict[VerseId, tuple[AnnotatedToken, ...]] = field(default_factory=dict)


@dataclass
class ProjectedToken:
    form: str
    upos: Optional[str] = None
    head: Optional[int] = None  # 1-based target token index, like source heads
    deprel: Optional[str] = None
    concept: Optional[str] = None
    embedding: Optional[np.ndarray] = None


@dataclass
class ProjectedDoculect:
    doculect_id: str
    verses: dict[VerseId, tuple[ProjectedToken, ...]] = field(default_factory=dict)


ConceptLexicon = Mapping[tuple[str, str], frozenset[str]]  # (language, lemma) -> concepts


def project_label(candidates: Iterable, n_sources_available: int, threshold: float = DEFAULT_THRESHOLD):
    """Unique plurality vote with a minimum-support gate; ties project nothing."""
    if n_sources_available < 1:
        raise ValueError("n_sources_available must be >= 1")
    counts = Counter(candidates)
    if not counts:
        return None
    top = max(counts.values())
    if top < min_votes(n_sources_available, threshold):
        return None
    winners = [label for label, c in counts.items() if c == top]
    if len(winners) != 1:
        return None
    return winners[0]


def _aligned_source_tokens(
    verse: VerseId, tgt_idx: int, alignment: Alignment
) -> list[int]:
    """Source token indices linked to one target token in one verse."""
    return [l.src_idx for l in alignment.links.get(verse, ()) if l.tgt_idx == tgt_idx]


def _target_of(verse: VerseId, src_idx: int, alignment: Alignment) -> Optional[int]:
    for l in alignment.links.get(verse, ()):
        if l.src_idx == src_idx:
            return l.tgt_idx
    return None


def _availability(
    verse: VerseId, annotations: Mapping[str, SourceAnnotation]
) -> int:
    return sum(1 for ann in annotations.values() if verse in ann.verses)


def project_pos_and_deps(
    target: Doculect,
    alignments: Mapping[str, Alignment],
    annotations: Mapping[str, SourceAnnotation],
    threshold: float = DEFAULT_THRESHOLD,
) -> dict[VerseId, tuple[ProjectedToken, ...]]:
    """Project upos and (head, deprel) pairs onto every target verse.

    The vote denominator for a verse is the number of sources whose
    annotation contains it. A source voting through several of its tokens
    contributes several candidates.
    """
    if not alignments:
        raise DataError("need alignments from at least one source")
    projected: dict[VerseId, tuple[ProjectedToken, ...]] = {}
    for verse, tokens in target.verses.items():
        available = _availability(verse, annotations)
        out: list[ProjectedToken] = [ProjectedToken(form=t) for t in tokens]
        if available == 0:
            projected[verse] = tuple(out)
            continue
        for t_idx, ptok in enumerate(out):
            upos_votes: list[str] = []
            head_votes: list[tuple[int, str]] = []
            for source_id, alignment in alignments.items():
                ann = annotations.get(source_id)
                if ann is None or verse not in ann.verses:
                    continue
                src_tokens = ann.verses[verse]
                for x in _aligned_source_tokens(verse, t_idx, alignment):
                    if x >= len(src_tokens):
                        raise DataError(
                            f"alignment {source_id}->{target.doculect_id} {verse}: "
                            f"source index {x} outside annotated verse"
                        )
                    tok = src_tokens[x]
                    upos_votes.append(tok.upos)
                    if tok.head > 0:
                        t_head = _target_of(verse, tok.head - 1, alignment)
                        if t_head is not None:
                            head_votes.append((t_head + 1, tok.deprel))
            ptok.upos = project_label(upos_votes, available, threshold)
            joint = project_label(head_votes, available, threshold)
            if joint is not None:
                ptok.head, ptok.deprel = joint
        projected[verse] = tuple(out)
    return projected


def token_concepts(
    token: AnnotatedToken, language: str, lexicon: Optional[ConceptLexicon]
) -> tuple[str, ...]:
    """Concepts of a source token: lexicon lookup by lemma, else inline labels."""
    if lexicon is not None:
        return tuple(sorted(lexicon.get((language, token.lemma), ())))
    return token.concepts


def project_concepts(
    target: Doculect,
    alignments: Mapping[str, Alignment],
    annotations: Mapping[str, SourceAnnotation],
    lexicon: Optional[ConceptLexicon] = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> dict[VerseId, tuple[Optional[str], ...]]:
    """Vote concepts onto target tokens.

    Only concept-bearing sources count toward the availability denominator.
    A lemma with several concepts casts one candidate per concept.
    """
    def has_concepts(ann: SourceAnnotation) -> bool:
        if lexicon is not None:
            return any(lang == ann.language for lang, _ in lexicon)
        return any(tok.concepts for toks in ann.verses.values() for tok in toks)

    concept_sources = {sid: ann for sid, ann in annotations.items() if has_concepts(ann)}
    if not concept_sources:
        raise DataError("no source carries concept labels")

    result: dict[VerseId, tuple[Optional[str], ...]] = {}
    for verse, tokens in target.verses.items():
        available = _availability(verse, concept_sources)
        row: list[Optional[str]] = [None] * len(tokens)
        if available == 0:
            result[verse] = tuple(row)
            continue
        for t_idx in range(len(tokens)):
            votes: list[str] = []
            for source_id, ann in concept_sources.items():
                alignment = alignments.get(source_id)
                if alignment is None or verse not in ann.verses:
                    continue
                src_tokens = ann.verses[verse]
                for x in _aligned_source_tokens(verse, t_idx, alignment):
                    votes.extend(token_concepts(src_tokens[x], ann.language, lexicon))
            row[t_idx] = project_label(votes, available, threshold)
        result[verse] = tuple(row)
    return result


def project_embeddings(
    target: Doculect,
    alignments: Mapping[str, Alignment],
    annotations: Mapping[str, SourceAnnotation],
) -> dict[VerseId, tuple[Optional[np.ndarray], ...]]:
    """Average the embeddings of all aligned source tokens, all sources pooled."""
    dim: Optional[int] = None
    result: dict[VerseId, tuple[Optional[np.ndarray], ...]] = {}
    for verse, tokens in target.verses.items():
        row: list[Optional[np.ndarray]] = [None] * len(tokens)
        for t_idx in range(len(tokens)):
            vectors: list[np.ndarray] = []
            for source_id, alignment in alignments.items():
                ann = annotations.get(source_id)
                if ann is None or verse not in ann.verses:
                    continue
                src_tokens = ann.verses[verse]
                for x in _aligned_source_tokens(verse, t_idx, alignment):
                    emb = src_tokens[x].embedding
                    if emb is None:
                        continue
                    if dim is None:
                        dim = emb.shape[0]
                    elif emb.shape[0] != dim:
                        raise DataError(
                            f"embedding dimension mismatch: {emb.shape[0]} vs {dim}"
                        )
                    vectors.append(emb)
            if vectors:
                row[t_idx] = np.mean(np.stack(vectors), axis=0)
        result[verse] = tuple(row)
    return result


def project_doculect(
    target: Doculect,
    alignments: Mapping[str, Alignment],
    annotations: Mapping[str, SourceAnnotation],
    lexicon: Optional[ConceptLexicon] = None,
    threshold: float = DEFAULT_THRESHOLD,
    with_embeddings: bool = False,
) -> ProjectedDoculect:
    """Run all projections for one target and merge them per token."""
    pos_deps = project_pos_and_deps(target, alignments, annotations, threshold)
    try:
        concepts = project_concepts(target, alignments, annotations, lexicon, threshold)
    except DataError:
        concepts = None
    embeddings = (
        project_embeddings(target, alignments, annotations) if with_embeddings else None
    )
    verses: dict[VerseId, tuple[ProjectedToken, ...]] = {}
    for verse, toks in pos_deps.items():
        merged = []
        for i, tok in enumerate(toks):
            if concepts is not None:
                tok = replace(tok, concept=concepts[verse][i])
            if embeddings is not None:
                tok = replace(tok, embedding=embeddings[verse][i])
            merged.append(tok)
        verses[verse] = tuple(merged)
    return ProjectedDoculect(doculect_id=target.doculect_id, verses=verses)


# ---------------------------------------------------------------------------
# File formats


def read_annotations(doculect_id: str, language: str, path: str) -> SourceAnnotation:
    """Read verse-block annotation TSV.

    Blocks start with ``# verse = <id>``; token lines have 7 columns
    (index, form, lemma, upos, head, deprel, concepts), with ``_`` for empty
    and concepts separated by ``|``.
    """
    verses: dict[VerseId, list[AnnotatedToken]] = {}
    current: Optional[str] = None
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line:
                current = None
                continue
            if line.startswith("# verse = "):
                current = line[len("# verse = ") :].strip()
                if current in verses:
                    raise DataError(f"{path}:{lineno}: duplicate verse block {current!r}")
                verses[current] = []
                continue
            if line.startswith("#"):
                continue
            if current is None:
                raise DataError(f"{path}:{lineno}: token line outside a verse block")
            parts = line.split("\t")
            if len(parts) != 7:
                raise DataError(f"{path}:{lineno}: expected 7 columns, got {len(parts)}")
            idx, form, lemma, upos, head, deprel, concepts = parts
            if int(idx) != len(verses[current]) + 1:
                raise DataError(f"{path}:{lineno}: token indices must be 1,2,...")
            if upos not in UD_UPOS:
                raise DataError(f"{path}:{lineno}: unknown upos {upos!r}")
            verses[current].append(
                AnnotatedToken(
                    form=form,
                    lemma=lemma,
                    upos=upos,
                    head=int(head),
                    deprel=deprel,
                    concepts=tuple(c for c in concepts.split("|") if c and c != "_"),
                )
            )
    for verse, toks in verses.items():
        for tok in toks:
            if tok.head < 0 or tok.head > len(toks):
                raise DataError(f"{path}: verse {verse}: head {tok.head} out of range")
    return SourceAnnotation(
        doculect_id=doculect_id,
        language=language,
        verses={v: tuple(toks) for v, toks in verses.items()},
    )


def write_projection(projected: ProjectedDoculect, path: str) -> None:
    """Write projected annotations in the verse-block TSV shape."""
    with open(path, "w", encoding="utf-8") as f:
        for verse in sorted(projected.verses):
            f.write(f"# verse = {verse}\n")
            for i, tok in enumerate(projected.verses[verse], start=1):
                f.write(
                    "\t".join(
                        [
                            str(i),
                            tok.form,
                            "_",
                            tok.upos or "_",
                            "_" if tok.head is None else str(tok.head),
                            tok.deprel or "_",
                            tok.concept or "_",
                        ]
                    )
                    + "\n"
                )
            f.write("\n")


def read_projection(doculect_id: str, path: str) -> ProjectedDoculect:
    verses: dict[VerseId, list[ProjectedToken]] = {}
    current: Optional[str] = None
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line:
                current = None
                continue
            if line.startswith("# verse = "):
                current = line[len("# verse = ") :].strip()
                verses[current] = []
                continue
            if line.startswith("#"):
                continue
            if current is None:
                raise DataError(f"{path}:{lineno}: token line outside a verse block")
            parts = line.split("\t")
            if len(parts) != 7:
                raise DataError(f"{path}:{lineno}: expected 7 columns, got {len(parts)}")
            _, form, _, upos, head, deprel, concept = parts
            verses[current].append(
                ProjectedToken(
                    form=form,
                    upos=None if upos == "_" else upos,
                    head=None if head == "_" else int(head),
                    deprel=None if deprel == "_" else deprel,
                    concept=None if concept == "_" else concept,
                )
            )
    return ProjectedDoculect(
        doculect_id=doculect_id, verses={v: tuple(t) for v, t in verses.items()}
    )


def write_embedding_dump(
    embeddings: Mapping[VerseId, Sequence[Optional[np.ndarray]]], path: str
) -> None:
    """One line per embedded token: verse_id, token index, vector components."""
    with open(path, "w", encoding="utf-8") as f:
        for verse in sorted(embeddings):
            for idx, vec in enumerate(embeddings[verse]):
                if vec is None:
                    continue
                values = "\t".join(repr(float(x)) for x in vec)
                f.write(f"{verse}\t{idx}\t{values}\n")


def read_embedding_dump(path: str) -> dict[tuple[VerseId, int], np.ndarray]:
    result: dict[tuple[VerseId, int], np.ndarray] = {}
    dim: Optional[int] = None
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) < 3:
                raise DataError(f"{path}:{lineno}: expected verse, index and vector")
            vec = np.array([float(x) for x in parts[2:]])
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise DataError(f"{path}:{lineno}: inconsistent embedding dimension")
            result[(parts[0], int(parts[1]))] = vec
    return result


def attach_embeddings(
    annotation: SourceAnnotation, dump: Mapping[tuple[VerseId, int], np.ndarray]
) -> SourceAnnotation:
    verses = {}
    for verse, toks in annotation.verses.items():
        verses[verse] = tuple(
            replace(tok, embedding=dump.get((verse, i))) for i, tok in enumerate(toks)
        )
    return SourceAnnotation(
        doculect_id=annotation.doculect_id, language=annotation.language, verses=verses
    )


def read_concept_lexicon(path: str) -> dict[tuple[str, str], frozenset[str]]:
    """TSV ``language<TAB>lemma<TAB>concept_id`` -> (language, lemma) -> concepts."""
    raw: dict[tuple[str, str], set[str]] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 columns")
            language, lemma, concept = parts
            raw.setdefault((language, lemma), set()).add(concept)
    return {k: frozenset(v) for k, v in raw.items()}
