import pytest

from typoprobe.errors import DataError
from typoprobe.features import (
    ADJ_CORE,
    NEITHER,
    NUM_2_9,
    PREFIX,
    SUFFIX,
    AffixProfile,
    Paradigm,
    WordOrderSpec,
    affixation_label,
    affixation_profile,
    binarize_ratio,
    build_feature_matrix,
    classify_pair,
    cluster_forms,
    extract_paradigms,
    has_inflection,
    head_initial_ratio,
    paradigm_nld,
    read_feature_matrix,
    restricted_class_filter,
    write_feature_matrix,
    WORD_ORDER_SPECS,
)
from typoprobe.project import ProjectedDoculect, ProjectedToken


def ptok(form, upos=None, head=None, deprel=None, concept=None):
    return ProjectedToken(form=form, upos=upos, head=head, deprel=deprel, concept=concept)


def projected(verses):
    return ProjectedDoculect(doculect_id="d", verses={v: tuple(t) for v, t in verses.items()})


OBJ_SPEC = WordOrderSpec("object_verb", frozenset({"NOUN", "PROPN"}), "obj", frozenset({"VERB"}))


def vo_verse():
    return [ptok("eats", upos="VERB"), ptok("bread", upos="NOUN", head=1, deprel="obj")]


def ov_verse():
    return [ptok("bread", upos="NOUN", head=2, deprel="obj"), ptok("eats", upos="VERB")]


def test_ratio_all_head_initial():
    doc = projected({f"v{i}": vo_verse() for i in range(5)})
    assert head_initial_ratio(doc, OBJ_SPEC) == 1.0


def test_ratio_all_head_final():
    doc = projected({f"v{i}": ov_verse() for i in range(5)})
    assert head_initial_ratio(doc, OBJ_SPEC) == 0.0


def test_ratio_mixed_counts():
    verses = {f"v{i}": vo_verse() for i in range(3)}
    verses["v3"] = ov_verse()
    assert head_initial_ratio(projected(verses), OBJ_SPEC) == 0.75


def test_ratio_absent_without_instances():
    doc = projected({"v0": [ptok("word", upos="NOUN")]})
    assert head_initial_ratio(doc, OBJ_SPEC) is None


def test_ratio_requires_head_pos_match():
    # head is a NOUN, not a VERB: not an object/verb instance
    doc = projected({"v0": [ptok("x", upos="NOUN"), ptok("y", upos="NOUN", head=1, deprel="obj")]})
    assert head_initial_ratio(doc, OBJ_SPEC) is None


def test_restricted_class_gates_ratio():
    spec = next(s for s in WORD_ORDER_SPECS if s.name == "adjective_noun")
    good = [ptok("haus", upos="NOUN"), ptok("gross", upos="ADJ", head=1, deprel="amod", concept="BIG")]
    bad = [ptok("haus", upos="NOUN"), ptok("nass", upos="ADJ", head=1, deprel="amod", concept="WET")]
    assert head_initial_ratio(projected({"v0": good}), spec) == 1.0
    assert head_initial_ratio(projected({"v0": bad}), spec) is None


@pytest.mark.parametrize("ratio,expected", [(0.51, 1), (0.5, 0), (0.0, 0), (1.0, 1)])
def test_binarize(ratio, expected):
    assert binarize_ratio(ratio) == expected


def test_restricted_classes():
    assert restricted_class_filter(ptok("big", concept="BIG"), ADJ_CORE)
    assert not restricted_class_filter(ptok("water", concept="WATER"), ADJ_CORE)
    assert restricted_class_filter(ptok("two", concept="TWO"), NUM_2_9)
    assert not restricted_class_filter(ptok("one", concept="ONE"), NUM_2_9)
    assert not restricted_class_filter(ptok("water", concept="WATER"), NUM_2_9)


# --- paradigms --------------------------------------------------------------


def test_paradigm_nld_hand_values():
    assert paradigm_nld("annotate", "annotating") == pytest.approx(3 / 18)
    assert paradigm_nld("cat", "dog") == pytest.approx(0.5)


def test_cluster_inflected_family_coheres():
    clusters = cluster_forms(["annotate", "annotating", "annotated"])
    assert sorted(map(len, clusters)) == [3]


def test_cluster_unrelated_forms_stay_apart():
    clusters = cluster_forms(["cat", "dog"])
    assert sorted(map(len, clusters)) == [1, 1]


def concept_tokens(concept, pos, forms):
    return [ptok(f, upos=pos, concept=concept) for f in forms]


def test_extract_paradigms_end_to_end():
    verses = {
        "v0": concept_tokens("WRITE", "VERB", ["annotate", "annotating"]),
        "v1": concept_tokens("WRITE", "VERB", ["annotated"]),
        "v2": concept_tokens("PET", "NOUN", ["cat"]),
        "v3": concept_tokens("PET", "NOUN", ["dog"]),
    }
    paradigms = extract_paradigms(projected(verses))
    assert len(paradigms) == 1
    p = paradigms[0]
    assert p.pos == "VERB" and p.concept == "WRITE"
    assert set(p.forms) == {"annotate", "annotating", "annotated"}


def test_extract_paradigms_needs_long_form():
    verses = {"v0": concept_tokens("GO", "VERB", ["goes", "goed"])}  # all <= 4 chars
    assert extract_paradigms(projected(verses)) == []


def test_single_form_never_a_paradigm():
    verses = {"v0": concept_tokens("RUN", "VERB", ["running"])}
    assert extract_paradigms(projected(verses)) == []


def test_paradigms_never_mix_pos_or_concept():
    verses = {
        "v0": concept_tokens("WALK", "VERB", ["walking", "walked"]),
        "v1": concept_tokens("TALK", "NOUN", ["talking", "talked"]),
    }
    for p in extract_paradigms(projected(verses)):
        assert len({p.pos}) == 1 and len({p.concept}) == 1
        assert (p.concept, p.pos) in {("WALK", "VERB"), ("TALK", "NOUN")}


def test_has_inflection_boundary():
    def make(n):
        return [Paradigm("d", f"c{i}", "NOUN", ("walking", "walked")) for i in range(n)]

    assert has_inflection(make(50), "NOUN")
    assert not has_inflection(make(49), "NOUN")
    assert not has_inflection([], "NOUN")


# --- affixation -------------------------------------------------------------


def test_classify_suffix_pair():
    assert classify_pair("annotate", "annotating") == SUFFIX


def test_classify_prefix_pair():
    assert classify_pair("nagenda", "bagenda") == PREFIX


def test_classify_straddling_pair():
    assert classify_pair("abXc", "aYbc") == NEITHER


def test_classify_swap_invariant():
    pairs = [("annotate", "annotating"), ("nagenda", "bagenda"), ("abXc", "aYbc")]
    for a, b in pairs:
        assert classify_pair(a, b) == classify_pair(b, a)


def test_affixation_profile_counts_sum():
    paradigms = [
        Paradigm("d", "WALK", "VERB", ("mutalo", "mutaloke", "mutalozi")),
        Paradigm("d", "SING", "VERB", ("ripeda", "ripedake")),
        Paradigm("d", "DOG", "NOUN", ("boginer", "kaboginer")),
    ]
    profile = affixation_profile(paradigms, pairs_per_pos=100, rng_seed=5)
    for pos, tally in profile.counts.items():
        assert sum(tally.values()) == 100
    assert profile.counts["VERB"][SUFFIX] == 100  # pure suffix pools
    assert profile.counts["NOUN"][PREFIX] == 100


def test_affixation_profile_deterministic():
    paradigms = [Paradigm("d", "X", "VERB", ("mutalo", "mutaloke", "semuta"))]
    p1 = affixation_profile(paradigms, pairs_per_pos=50, rng_seed=9)
    p2 = affixation_profile(paradigms, pairs_per_pos=50, rng_seed=9)
    assert p1.counts == p2.counts


def test_affixation_label_rules():
    def profile(prefix, suffix, neither=0):
        return AffixProfile(doculect_id="d", counts={"VERB": {PREFIX: prefix, SUFFIX: suffix, NEITHER: neither}})

    assert affixation_label(profile(100, 900)) == "suffixing"
    assert affixation_label(profile(500, 500)) == "prefixing"  # >= 50% rule
    assert affixation_label(profile(0, 0, 10)) is None


def test_empty_affixation_profile():
    profile = affixation_profile([], pairs_per_pos=10, rng_seed=0)
    assert profile.counts == {}
    assert affixation_label(profile) is None


# --- feature matrix ---------------------------------------------------------


def test_build_matrix_and_round_trip(tmp_path):
    vo = projected({f"v{i}": vo_verse() for i in range(4)})
    vo.doculect_id = "docVO"
    ov = projected({f"v{i}": ov_verse() for i in range(4)})
    ov.doculect_id = "docOV"
    profiles = {
        "docVO": AffixProfile("docVO", {"VERB": {PREFIX: 10, SUFFIX: 90, NEITHER: 0}}),
    }
    matrix = build_feature_matrix({"docVO": vo, "docOV": ov}, profiles)
    assert matrix.binary[("docVO", "object_verb")] == 1
    assert matrix.binary[("docOV", "object_verb")] == 0
    assert matrix.ratio[("docVO", "object_verb")] == 1.0
    assert ("docVO", "adjective_noun") not in matrix.binary  # no amod instances
    assert matrix.binary[("docVO", "suffixing")] == 1
    assert matrix.binary[("docVO", "prefixing")] == 0
    assert ("docOV", "prefixing") not in matrix.binary  # no profile

    path = tmp_path / "features.tsv"
    write_feature_matrix(matrix, str(path))
    back = read_feature_matrix(str(path))
    assert back.binary == matrix.binary
    assert back.ratio == matrix.ratio
    assert back.features == matrix.features
