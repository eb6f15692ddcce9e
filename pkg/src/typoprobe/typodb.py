"""Typological database ingestion and label sources.

Binarized database features (one column per feature, values 0/1/NA, keyed by
ISO 639-3 code) serve as gold-standard evaluation labels. Features encoding
mutually incompatible options (e.g. prefixing vs suffixing) are filtered so
that only languages with exactly one option marked true remain. Projected
features from the corpus pipeline become a second kind of label source that
may train classifiers but is never evaluation gold.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional

from typoprobe.errors import DataError
from typoprobe.features import FeatureMatrix

DATABASE = "database"
PROJECTED = "projected"


@dataclass
class LabelSource:
    kind: str  # DATABASE or PROJECTED
    feature: str
    labels: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in (DATABASE, PROJECTED):
            raise DataError(f"unknown label source kind {self.kind!r}")

    def label_for(self, doculect_id: str, iso639_3: str) -> Optional[int]:
        """Doculect-level lookup; language-level sources cover all doculects
        of the language."""
        if doculect_id in self.labels:
            return self.labels[doculect_id]
        return self.labels.get(iso639_3)


@dataclass(frozen=True)
class FeatureGroup:
    name: str
    members: frozenset[str]

    def __post_init__(self) -> None:
        if len(self.members) < 2:
            raise DataError(f"feature group {self.name!r} needs at least 2 members")


def load_database(path: str) -> dict[str, LabelSource]:
    """Read the feature table; values must be 0, 1 or NA."""
    with open(path, encoding="utf-8") as f:
        header = f.readline().rstrip("\r\n").split("\t")
        if not header or header[0] != "iso639_3":
            raise DataError(f"{path}: first column must be iso639_3")
        features = header[1:]
        if not features:
            raise DataError(f"{path}: no feature columns")
        sources = {feat: LabelSource(kind=DATABASE, feature=feat) for feat in features}
        for lineno, line in enumerate(f, start=2):
            line = line.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != len(header):
                raise DataError(
                    f"{path}:{lineno}: expected {len(header)} columns, got {len(fields)}"
                )
            iso = fields[0]
            for feat, value in zip(features, fields[1:]):
                if value == "NA" or value == "":
                    continue
                if value not in ("0", "1"):
                    raise DataError(
                        f"{path}:{lineno}: non-binary value {value!r} for {feat}"
                    )
                sources[feat].labels[iso] = int(value)
    return sources


def read_feature_groups(path: str) -> list[FeatureGroup]:
    """One group per line: ``name<TAB>member<TAB>member...``."""
    groups = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 3:
                raise DataError(f"{path}:{lineno}: group needs a name and >= 2 members")
            groups.append(FeatureGroup(name=parts[0], members=frozenset(parts[1:])))
    return groups


def filter_mutually_exclusive(
    sources: Mapping[str, LabelSource], group: FeatureGroup
) -> dict[str, LabelSource]:
    """Keep a language's labels for the group only when exactly one member is
    true; languages missing a member only need the present values to qualify."""
    for member in group.members:
        if member not in sources:
            raise DataError(f"group {group.name!r}: feature {member!r} not in sources")
    keys = set()
    for member in group.members:
        keys.update(sources[member].labels)
    drop = {
        key
        for key in keys
        if sum(sources[member].labels.get(key, 0) for member in group.members) != 1
    }
    filtered = {}
    for feat, src in sources.items():
        if feat in group.members:
            labels = {k: v for k, v in src.labels.items() if k not in drop}
            filtered[feat] = replace(src, labels=labels)
        else:
            filtered[feat] = src
    return filtered


def attach_projected_labels(matrix: FeatureMatrix) -> dict[str, LabelSource]:
    """Projected label sources (training-only), one per feature column."""
    sources = {
        feat: LabelSource(kind=PROJECTED, feature=feat) for feat in matrix.features
    }
    for (doculect_id, feat), value in matrix.binary.items():
        sources[feat].labels[doculect_id] = value
    return sources
