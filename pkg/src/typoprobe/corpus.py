"""Verse-aligned corpus ingestion.

A corpus is a collection of *doculects*: one translation each, holding a
token sequence per verse plus the genealogical/areal metadata needed by the
probing stage. Verse ids are opaque strings shared across translations.

File formats:

* verse text: UTF-8, one ``<verse_id>\\t<space-separated tokens>`` line per
  verse, ``#`` starts a comment line;
* metadata TSV with header columns ``doculect_id, iso639_3,
  glottolog_family, macroarea, contacts, role, preferred`` (contacts is a
  comma-separated list of ISO 639-3 codes, possibly empty).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Iterable

from typoprobe.errors import DataError

VerseId = str

METADATA_COLUMNS = (
    "doculect_id",
    "iso639_3",
    "glottolog_family",
    "macroarea",
    "contacts",
    "role",
    "preferred",
)

ROLES = ("source", "target")

_TRUE = {"1", "true", "yes"}
_FALSE = {"0", "false", "no", ""}


def meets_fraction(count: int, total: int, fraction: float) -> bool:
    """count >= fraction * total, robust to float rounding of the product."""
    return count >= fraction * total - 1e-9


@dataclass
class Doculect:
    """One translation: token streams per verse plus probe metadata."""

    doculect_id: str
    iso639_3: str
    family: str
    macroarea: str
    contacts: frozenset[str] = frozenset()
    verses: dict[VerseId, tuple[str, ...]] = field(default_factory=dict)
    role: str = "target"
    preferred: bool = False

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise DataError(
                f"doculect {self.doculect_id!r}: role must be one of {ROLES}, got {self.role!r}"
            )


@dataclass
class Corpus:
    doculects: list[Doculect]
    canonical: frozenset[VerseId] = frozenset()

    def doculect(self, doculect_id: str) -> Doculect:
        for d in self.doculects:
            if d.doculect_id == doculect_id:
                return d
        raise KeyError(doculect_id)

    @property
    def sources(self) -> list[Doculect]:
        return [d for d in self.doculects if d.role == "source"]

    @property
    def targets(self) -> list[Doculect]:
        return [d for d in self.doculects if d.role == "target"]


def parse_verse_file(path: str) -> dict[VerseId, tuple[str, ...]]:
    """Read one verse-text file; raises DataError naming file and line."""
    verses: dict[VerseId, tuple[str, ...]] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            if "\t" not in line:
                raise DataError(f"{path}:{lineno}: missing verse-id separator (TAB)")
            verse_id, text = line.split("\t", 1)
            if not verse_id:
                raise DataError(f"{path}:{lineno}: empty verse id")
            if verse_id in verses:
                raise DataError(f"{path}:{lineno}: duplicate verse id {verse_id!r}")
            tokens = tuple(text.split())
            if not tokens:
                raise DataError(f"{path}:{lineno}: verse {verse_id!r} has no tokens")
            verses[verse_id] = tokens
    return verses


def _parse_bool(value: str, where: str) -> bool:
    v = value.strip().lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise DataError(f"{where}: cannot parse boolean {value!r}")


def load_metadata(path: str) -> dict[str, dict[str, str]]:
    rows: dict[str, dict[str, str]] = {}
    with open(path, encoding="utf-8") as f:
        header_line = f.readline().rstrip("\r\n")
        header = header_line.split("\t")
        if header != list(METADATA_COLUMNS):
            raise DataError(
                f"{path}: metadata header must be {list(METADATA_COLUMNS)}, got {header}"
            )
        for lineno, line in enumerate(f, start=2):
            line = line.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != len(METADATA_COLUMNS):
                raise DataError(
                    f"{path}:{lineno}: expected {len(METADATA_COLUMNS)} columns, got {len(fields)}"
                )
            row = dict(zip(METADATA_COLUMNS, fields))
            if row["doculect_id"] in rows:
                raise DataError(f"{path}:{lineno}: duplicate doculect_id {row['doculect_id']!r}")
            rows[row["doculect_id"]] = row
    return rows


def load_corpus(text_paths: Iterable[str], metadata_path: str) -> Corpus:
    """Load verse files and metadata into a Corpus (canonical set left empty).

    The doculect id of each text file is its base name without extension;
    every doculect must have a metadata row.
    """
    metadata = load_metadata(metadata_path)
    doculects: list[Doculect] = []
    seen: set[str] = set()
    for path in text_paths:
        doculect_id = os.path.splitext(os.path.basename(path))[0]
        if doculect_id in seen:
            raise DataError(f"duplicate doculect id {doculect_id!r} among input files")
        seen.add(doculect_id)
        if doculect_id not in metadata:
            raise DataError(f"{metadata_path}: no metadata row for doculect {doculect_id!r}")
        row = metadata[doculect_id]
        contacts = frozenset(c.strip() for c in row["contacts"].split(",") if c.strip())
        doculects.append(
            Doculect(
                doculect_id=doculect_id,
                iso639_3=row["iso639_3"],
                family=row["glottolog_family"],
                macroarea=row["macroarea"],
                contacts=contacts,
                verses=parse_verse_file(path),
                role=row["role"],
                preferred=_parse_bool(row["preferred"], f"{metadata_path} ({doculect_id})"),
            )
        )
    return Corpus(doculects=doculects)


def canonical_verses(corpus: Corpus, threshold: float = 0.8) -> frozenset[VerseId]:
    """Verse ids present in at least ``threshold`` of all doculects."""
    if not corpus.doculects:
        raise DataError("cannot compute canonical verses of an empty corpus")
    counts: dict[VerseId, int] = {}
    for d in corpus.doculects:
        for v in d.verses:
            counts[v] = counts.get(v, 0) + 1
    total = len(corpus.doculects)
    return frozenset(v for v, c in counts.items() if meets_fraction(c, total, threshold))


def coverage_of(doculect: Doculect, canonical: frozenset[VerseId]) -> float:
    if not canonical:
        return 0.0
    return sum(1 for v in canonical if v in doculect.verses) / len(canonical)


def filter_translations(corpus: Corpus, coverage: float = 0.8) -> Corpus:
    """Drop doculects covering less than ``coverage`` of the canonical verses.

    The boundary is inclusive: a doculect at exactly the threshold is kept.
    """
    canon = corpus.canonical
    kept = [
        d
        for d in corpus.doculects
        if meets_fraction(sum(1 for v in canon if v in d.verses), len(canon), coverage)
    ]
    return replace(corpus, doculects=kept)
