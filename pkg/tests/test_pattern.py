import itertools

import numpy as np
import pytest

from ternok import pattern as P


def brute_canonical(L):
    """Independent enumerator: filter all 3^L words, dedup by the 2L images."""
    seen = set()
    for word in itertools.product("ABC", repeat=L):
        s = "".join(word)
        if any(s[k] == s[k - 1] for k in range(L)) or set(s) != set("ABC"):
            continue
        seen.add(min(P.images(s)))
    return sorted(seen)


def raw_valid_count(L):
    return sum(
        1 for w in itertools.product("ABC", repeat=L)
        if all(w[k] != w[k - 1] for k in range(L)) and set(w) == set("ABC")
    )


# -- validate ---------------------------------------------------------------

def test_validate_accepts_abc():
    assert P.validate(["A", "B", "C"]) == "ABC"
    assert P.validate([0, 1, 2]) == "ABC"
    assert P.validate(" abac ") == "ABAC"


@pytest.mark.parametrize("layers,reason", [
    (["A", "B", "B", "C"], "adjacent-duplicate"),
    ("ABCA", "adjacent-duplicate"),
    (["A", "B", "A", "B"], "missing-species"),
    ("AB", "too-short"),
    ("ABD", "bad-label"),
    ([0, 1, 3], "bad-label"),
])
def test_validate_rejects(layers, reason):
    with pytest.raises(P.InvalidPattern) as exc:
        P.validate(layers)
    assert exc.value.reason == reason


# -- canonicalize -----------------------------------------------------------

@pytest.mark.parametrize("raw,canon", [
    ("BCA", "ABC"), ("CBA", "ABC"), ("BABC", "ABCB"), ("CACB", "ACBC"),
])
def test_canonicalize_examples(raw, canon):
    assert P.canonicalize(raw) == canon


def test_canonicalize_matches_image_minimum():
    rng = np.random.default_rng(0)
    for _ in range(300):
        L = int(rng.integers(3, 14))
        s = "".join(rng.choice(list("ABC"), size=L))
        assert P.canonicalize(s) == min(P.images(s))
        assert P.canonicalize(P.canonicalize(s)) == P.canonicalize(s)


def test_labels_not_permuted():
    assert P.canonicalize("BABC") != P.canonicalize("CACB")


# -- enumeration ------------------------------------------------------------

def test_enumerate_three():
    assert P.enumerate_patterns(3) == ["ABC"]


def test_enumerate_four_adds_three():
    assert P.enumerate_patterns(4) == ["ABC", "ABAC", "ABCB", "ACBC"]


@pytest.mark.parametrize("L", range(3, 9))
def test_enumeration_matches_brute_force(L):
    assert P.patterns_of_length(L) == brute_canonical(L)


@pytest.mark.parametrize("L", range(3, 9))
def test_orbits_partition_raw_words(L):
    total = sum(len(set(P.images(p))) for p in P.patterns_of_length(L))
    assert total == raw_valid_count(L)


def test_enumeration_monotone_and_canonical():
    prev = 0
    for L in range(3, 11):
        pats = P.enumerate_patterns(L)
        assert len(pats) > prev
        prev = len(pats)
        assert all(P.is_canonical(p) for p in pats)
    assert len(set(pats)) == len(pats)


@pytest.mark.parametrize("bad", [2, 25])
def test_enumeration_cap(bad):
    with pytest.raises(P.InvalidPattern) as exc:
        P.enumerate_patterns(bad)
    assert exc.value.reason == "cap-exceeded"


# -- repeat -----------------------------------------------------------------

def test_repeat():
    assert P.repeat("ABC", 2) == "ABCABC"
    assert len(P.repeat("ABAC", 3)) == 12


def test_repeat_seam_rejected():
    with pytest.raises(P.InvalidPattern):
        P.repeat("ABA", 2)
    with pytest.raises(ValueError):
        P.repeat("ABC", 0)


# -- orbits and merging -----------------------------------------------------

def test_orbits_abac():
    # the two A layers are mirror images of each other
    assert P.symmetry_orbits("ABAC") == [[0, 2], [1], [3]]


def test_orbits_repeat_collapse_to_species():
    assert P.symmetry_orbits("ABCABC") == [[0, 3], [1, 4], [2, 5]]


def test_orbits_asymmetric_pattern():
    p = "ABACBC"
    orbits = P.symmetry_orbits(p)
    for orb in orbits:
        assert len({p[k] for k in orb}) == 1


def test_merge_degenerate_fuses_neighbours():
    pat, w = P.merge_degenerate("ABCACB", [0.2, 0.1, 0.1, 1e-14, 0.2, 0.4], 1e-10)
    assert pat == "ABCB"
    assert np.allclose(w, [0.2, 0.1, 0.3, 0.4])


def test_merge_degenerate_wraps_around():
    pat, w = P.merge_degenerate("ABCBAC", [0.2, 0.2, 0.3, 0.1, 0.2, 0.0], 1e-10)
    # dropping the final C joins the last A with the first A
    assert pat == "ABCB"
    assert np.allclose(w, [0.4, 0.2, 0.3, 0.1])
