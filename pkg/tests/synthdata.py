"""Synthetic data generators that double as test oracles.

Each generator knows its own ground truth (lexicon mapping, grammar flags,
label assignment), so tests can measure precision/recall or exact agreement
against something the code under test never sees.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from typoprobe.align import Alignment, Link
from typoprobe.corpus import Corpus, Doculect
from typoprobe.features import CORE_ADJ_CONCEPTS, NUMERAL_2_9_CONCEPTS, WORD_ORDER_SPECS
from typoprobe.lexsim import WordList
from typoprobe.project import AnnotatedToken, SourceAnnotation
from typoprobe.typodb import DATABASE, LabelSource

CONSONANTS = "bdfgklmnprstvz"
VOWELS = "aeiou"


def random_word(rng: random.Random, min_len: int = 5, max_len: int = 9) -> str:
    length = rng.randint(min_len, max_len)
    return "".join(
        rng.choice(CONSONANTS if i % 2 == 0 else VOWELS) for i in range(length)
    )


def distinct_words(rng: random.Random, count: int, **kwargs) -> list[str]:
    words: set[str] = set()
    while len(words) < count:
        words.add(random_word(rng, **kwargs))
    return sorted(words)


# ---------------------------------------------------------------------------
# Bijective-lexicon parallel corpus (alignment oracle)


@dataclass
class BijectiveCorpus:
    source: Doculect
    target: Doculect
    lexicon: dict[str, str]  # source word -> target word


def bijective_corpus(
    n_verses: int = 500,
    lexicon_size: int = 200,
    min_tokens: int = 5,
    max_tokens: int = 9,
    seed: int = 13,
) -> BijectiveCorpus:
    """Every source word is always co-translated by exactly one target word;
    target token order is shuffled per verse."""
    rng = random.Random(seed)
    words = distinct_words(rng, 2 * lexicon_size)
    rng.shuffle(words)
    src_words = words[:lexicon_size]
    tgt_words = words[lexicon_size:]
    lexicon = dict(zip(src_words, tgt_words))

    src_verses = {}
    tgt_verses = {}
    for i in range(n_verses):
        k = rng.randint(min_tokens, max_tokens)
        chosen = rng.sample(src_words, k)
        translated = [lexicon[w] for w in chosen]
        rng.shuffle(translated)
        src_verses[f"v{i:04d}"] = tuple(chosen)
        tgt_verses[f"v{i:04d}"] = tuple(translated)

    source = Doculect(
        doculect_id="synth_src", iso639_3="sss", family="famS", macroarea="AreaS",
        verses=src_verses, role="source",
    )
    target = Doculect(
        doculect_id="synth_tgt", iso639_3="ttt", family="famT", macroarea="AreaT",
        verses=tgt_verses,
    )
    return BijectiveCorpus(source=source, target=target, lexicon=lexicon)


def alignment_precision_recall(result, corpus: BijectiveCorpus) -> tuple[float, float]:
    """Link precision against the lexicon and type-level lexicon recall."""
    correct = 0
    total = 0
    found_pairs: set[tuple[str, str]] = set()
    for verse, links in result.links.items():
        src_toks = corpus.source.verses[verse]
        tgt_toks = corpus.target.verses[verse]
        for link in links:
            total += 1
            s_word = src_toks[link.src_idx]
            t_word = tgt_toks[link.tgt_idx]
            if corpus.lexicon[s_word] == t_word:
                correct += 1
                found_pairs.add((s_word, t_word))
    precision = correct / total if total else 0.0
    recall = len(found_pairs) / len(corpus.lexicon)
    return precision, recall


# ---------------------------------------------------------------------------
# Word-order grammar corpus (projection oracle)

GRAMMAR_SPECS = tuple(s.name for s in WORD_ORDER_SPECS)

CORE_ADJ = sorted(CORE_ADJ_CONCEPTS)
NUM_CONCEPTS = sorted(NUMERAL_2_9_CONCEPTS)


@dataclass
class SlotToken:
    slot: str  # lexicon slot, stable across doculects
    upos: str
    deprel: str  # relation to head, "root" for the root
    head: int  # index into the clause's token list, -1 for root
    concept: str | None


def _make_clause(rng: random.Random, lexicon_sizes: dict[str, int]) -> list[SlotToken]:
    """One verb-rooted clause; which optional dependents appear is random."""

    def slot(kind: str) -> str:
        return f"{kind}{rng.randrange(lexicon_sizes[kind])}"

    tokens: list[SlotToken] = []
    verb = SlotToken(slot("verb"), "VERB", "root", -1, None)
    tokens.append(verb)
    verb_idx = 0

    def add(tok: SlotToken) -> int:
        tokens.append(tok)
        return len(tokens) - 1

    obj_idx = add(SlotToken(slot("noun"), "NOUN", "obj", verb_idx, None))
    if rng.random() < 0.8:
        subj_idx = add(SlotToken(slot("noun"), "NOUN", "nsubj", verb_idx, None))
        if rng.random() < 0.5:
            add(SlotToken(slot("verb"), "VERB", "acl", subj_idx, None))
    if rng.random() < 0.8:
        obl_idx = add(SlotToken(slot("noun"), "NOUN", "obl", verb_idx, None))
        if rng.random() < 0.8:
            add(SlotToken(slot("adp"), "ADP", "case", obl_idx, None))
    if rng.random() < 0.7:
        i = rng.randrange(len(CORE_ADJ))
        add(SlotToken(f"adj{i}", "ADJ", "amod", obj_idx, CORE_ADJ[i]))
    if rng.random() < 0.7:
        i = rng.randrange(len(NUM_CONCEPTS))
        add(SlotToken(f"num{i}", "NUM", "nummod", obj_idx, NUM_CONCEPTS[i]))
    return tokens


def _linearize(clause: list[SlotToken], head_initial: dict[str, bool]) -> list[int]:
    """Order clause tokens so each dependent lands on the configured side of
    its head; returns original indices in surface order."""
    spec_of_rel = {
        "obj": "object_verb",
        "obl": "oblique_verb",
        "nsubj": "subject_verb",
        "amod": "adjective_noun",
        "acl": "relative_noun",
        "nummod": "numeral_noun",
        "case": "adposition_noun",
    }
    children: dict[int, list[int]] = {i: [] for i in range(len(clause))}
    root = 0
    for i, tok in enumerate(clause):
        if tok.head >= 0:
            children[tok.head].append(i)
        else:
            root = i

    def emit(idx: int) -> list[int]:
        before: list[int] = []
        after: list[int] = []
        for child in children[idx]:
            rel = clause[child].deprel
            if head_initial[spec_of_rel[rel]]:
                after.extend(emit(child))
            else:
                before.extend(emit(child))
        return before + [idx] + after

    return emit(root)


@dataclass
class GrammarCorpus:
    sources: list[Doculect]
    annotations: dict[str, SourceAnnotation]
    targets: list[Doculect]
    alignments: dict[str, dict[str, Alignment]]  # target -> source -> alignment
    grammars: dict[str, dict[str, bool]]  # target -> spec name -> head-initial


def grammar_corpus(
    n_targets: int = 20,
    n_verses: int = 120,
    n_sources: int = 3,
    seed: int = 7,
) -> GrammarCorpus:
    """Targets realize per-feature word orders drawn from known grammars.

    Target 0 is strictly head-initial on every feature; the rest get random
    per-feature orders. Sources share one clause structure per verse and are
    linearized head-initially; gold alignments come from the generator's own
    token correspondence.
    """
    rng = random.Random(seed)
    lexicon_sizes = {"verb": 20, "noun": 30, "adp": 6}
    # per-doculect word forms per slot kind
    slot_names = (
        [f"verb{i}" for i in range(lexicon_sizes["verb"])]
        + [f"noun{i}" for i in range(lexicon_sizes["noun"])]
        + [f"adp{i}" for i in range(lexicon_sizes["adp"])]
        + [f"adj{i}" for i in range(len(CORE_ADJ))]
        + [f"num{i}" for i in range(len(NUM_CONCEPTS))]
    )

    def make_forms(doc_rng: random.Random) -> dict[str, str]:
        forms = distinct_words(doc_rng, len(slot_names))
        return dict(zip(slot_names, forms))

    clauses = [_make_clause(rng, lexicon_sizes) for _ in range(n_verses)]
    verse_ids = [f"v{i:04d}" for i in range(n_verses)]
    src_order = {  # all sources share head-initial surface order
        vid: _linearize(clause, {name: True for name in GRAMMAR_SPECS})
        for vid, clause in zip(verse_ids, clauses)
    }

    sources = []
    annotations = {}
    for s in range(n_sources):
        doc_rng = random.Random(seed * 1000 + s)
        forms = make_forms(doc_rng)
        verses = {}
        ann_verses = {}
        for vid, clause in zip(verse_ids, clauses):
            order = src_order[vid]
            pos_of = {orig: surface for surface, orig in enumerate(order)}
            verses[vid] = tuple(forms[clause[i].slot] for i in order)
            ann_verses[vid] = tuple(
                AnnotatedToken(
                    form=forms[clause[orig].slot],
                    lemma=clause[orig].slot,
                    upos=clause[orig].upos,
                    head=0 if clause[orig].head < 0 else pos_of[clause[orig].head] + 1,
                    deprel=clause[orig].deprel,
                    concepts=(clause[orig].concept,) if clause[orig].concept else (),
                )
                for orig in order
            )
        doc_id = f"gsrc{s}"
        sources.append(
            Doculect(
                doculect_id=doc_id, iso639_3=f"s{s:02d}", family=f"sfam{s}",
                macroarea="SrcArea", verses=verses, role="source", preferred=True,
            )
        )
        annotations[doc_id] = SourceAnnotation(
            doculect_id=doc_id, language=f"s{s:02d}", verses=ann_verses
        )

    targets = []
    alignments: dict[str, dict[str, Alignment]] = {}
    grammars: dict[str, dict[str, bool]] = {}
    for t in range(n_targets):
        doc_rng = random.Random(seed * 2000 + t)
        if t == 0:
            grammar = {name: True for name in GRAMMAR_SPECS}
        else:
            grammar = {name: doc_rng.random() < 0.5 for name in GRAMMAR_SPECS}
        forms = make_forms(doc_rng)
        doc_id = f"gtgt{t:02d}"
        verses = {}
        links_per_source: dict[str, dict[str, tuple[Link, ...]]] = {
            src.doculect_id: {} for src in sources
        }
        for vid, clause in zip(verse_ids, clauses):
            tgt_order = _linearize(clause, grammar)
            verses[vid] = tuple(forms[clause[i].slot] for i in tgt_order)
            tgt_pos_of = {orig: surface for surface, orig in enumerate(tgt_order)}
            src_pos_of = {orig: surface for surface, orig in enumerate(src_order[vid])}
            verse_links = tuple(
                Link(src_idx=src_pos_of[orig], tgt_idx=tgt_pos_of[orig], score=1.0)
                for orig in range(len(clause))
            )
            for src in sources:
                links_per_source[src.doculect_id][vid] = verse_links
        targets.append(
            Doculect(
                doculect_id=doc_id, iso639_3=f"t{t:03d}", family=f"tfam{t}",
                macroarea=f"TgtArea{t % 6}", verses=verses,
            )
        )
        grammars[doc_id] = grammar
        alignments[doc_id] = {
            src.doculect_id: Alignment(
                source_doculect=src.doculect_id,
                target_doculect=doc_id,
                links=links_per_source[src.doculect_id],
            )
            for src in sources
        }
    return GrammarCorpus(
        sources=sources,
        annotations=annotations,
        targets=targets,
        alignments=alignments,
        grammars=grammars,
    )


# ---------------------------------------------------------------------------
# Probe populations


@dataclass
class ProbePopulation:
    doculects: list[Doculect]
    vectors: dict[str, np.ndarray]
    labels: LabelSource
    dim: int


def probe_population(
    n_families: int = 60,
    n_areas: int = 6,
    docs_per_family: int = 2,
    dim: int = 100,
    signal: bool = True,
    margin: float = 2.0,
    n_noise_dims: int = 0,
    seed: int = 101,
    label_by_family: str = "alternate",  # or "random"
) -> ProbePopulation:
    """Doculects over synthetic families/areas with separable representations.

    With ``signal`` the binary feature sits in dimension 0 at ``margin``
    (within-class) standard deviations from the decision boundary, followed
    by ``n_noise_dims`` unit gaussian dimensions and constant padding up to
    ``dim``. The padding must be constant: under per-fold standardization
    every varying dimension contributes chance label correlation of order
    sqrt(4/n_train) to the heavily regularized classifier, so at realistic
    fold sizes a single signal dimension (whose standardized class
    separation is bounded by 2) cannot survive ~100 honest noise dimensions.
    Without ``signal`` all dimensions are iid noise.
    """
    rng = np.random.default_rng(seed)
    family_labels = {}
    if label_by_family == "alternate":
        for i in range(n_families):
            family_labels[f"fam{i:03d}"] = i % 2
    else:
        half = n_families // 2
        values = [1] * half + [0] * (n_families - half)
        rng.shuffle(values)
        for i in range(n_families):
            family_labels[f"fam{i:03d}"] = values[i]

    doculects = []
    vectors = {}
    labels = {}
    for i in range(n_families):
        family = f"fam{i:03d}"
        area = f"area{i % n_areas}"
        for j in range(docs_per_family):
            doc_id = f"doc{i:03d}_{j}"
            doculects.append(
                Doculect(
                    doculect_id=doc_id, iso639_3=f"x{i:03d}{j}", family=family,
                    macroarea=area,
                )
            )
            label = family_labels[family]
            if signal:
                vec = np.zeros(dim)
                vec[0] = (2 * label - 1) * margin + rng.normal()
                n_noise = min(n_noise_dims, dim - 1)
                vec[1 : 1 + n_noise] = rng.normal(size=n_noise)
            else:
                vec = rng.normal(size=dim)
            vectors[doc_id] = vec
            labels[doc_id] = label
    return ProbePopulation(
        doculects=doculects,
        vectors=vectors,
        labels=LabelSource(kind=DATABASE, feature="synthetic_feature", labels=labels),
        dim=dim,
    )


@dataclass
class LexicalPopulation:
    doculects: list[Doculect]
    word_lists: list[WordList]
    labels: LabelSource


def lexical_population(
    n_families: int = 24,
    docs_per_family: int = 3,
    n_concepts: int = 40,
    n_areas: int = 6,
    seed: int = 77,
) -> LexicalPopulation:
    """Families share word stems; doculects mutate one character per word.

    The binary feature is assigned per family at random (balanced), so it
    correlates with lexical similarity only within families: sound
    cross-validation should be at chance while naive cross-validation can
    exploit same-family training doculects.
    """
    rng = random.Random(seed)
    labels_by_family = [1] * (n_families // 2) + [0] * (n_families - n_families // 2)
    rng.shuffle(labels_by_family)

    doculects = []
    word_lists = []
    labels = {}
    concepts = [f"c{k:02d}" for k in range(n_concepts)]
    for i in range(n_families):
        family = f"lfam{i:03d}"
        stems = distinct_words(rng, n_concepts, min_len=6, max_len=9)
        for j in range(docs_per_family):
            doc_id = f"lex{i:03d}_{j}"
            entries = {}
            for concept, stem in zip(concepts, stems):
                word = list(stem)
                pos = rng.randrange(len(word))
                word[pos] = rng.choice(CONSONANTS)
                entries[concept] = frozenset({"".join(word)})
            word_lists.append(WordList(language=doc_id, entries=entries))
            doculects.append(
                Doculect(
                    doculect_id=doc_id, iso639_3=f"y{i:03d}{j}", family=family,
                    macroarea=f"larea{i % n_areas}",
                )
            )
            labels[doc_id] = labels_by_family[i]
    return LexicalPopulation(
        doculects=doculects,
        word_lists=word_lists,
        labels=LabelSource(kind=DATABASE, feature="family_correlated_feature", labels=labels),
    )
