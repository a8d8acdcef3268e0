import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prefvote.profiles import (
    AnonymousProfile,
    Ranking,
    check_total_preorder,
    marginalize_profile,
    restrict_ranking,
    swap_dominates,
    swap_ranking,
)


def test_ranking_basics():
    r = Ranking.from_string("b > a > c")
    assert r.order == ("b", "a", "c")
    assert r.position("b") == 1
    assert r.position("c") == 3
    assert r.prefers("b", "c")
    assert not r.prefers("c", "a")
    assert r.to_string() == "b>a>c"
    assert len(r) == 3


def test_ranking_rejects_duplicates_and_empty():
    with pytest.raises(ValueError):
        Ranking(("a", "b", "a"))
    with pytest.raises(ValueError):
        Ranking(())
    with pytest.raises(KeyError):
        Ranking(("a", "b")).position("z")


def test_profile_validation():
    r1 = Ranking.from_string("a>b")
    r2 = Ranking.from_string("b>a")
    with pytest.raises(ValueError, match="sum"):
        AnonymousProfile({r1: 0.6, r2: 0.6})
    with pytest.raises(ValueError, match="negative"):
        AnonymousProfile({r1: 1.5, r2: -0.5})
    with pytest.raises(ValueError, match="cover"):
        AnonymousProfile({r1: 0.5, Ranking.from_string("a>c"): 0.5})
    with pytest.raises(ValueError):
        AnonymousProfile({})


def test_profile_normalizes_and_drops_zeros():
    r1 = Ranking.from_string("a>b")
    r2 = Ranking.from_string("b>a")
    p = AnonymousProfile({r1: 1.0 - 4e-10, r2: 0.0})
    assert p.weight(r1) == 1.0
    assert r2 not in p.support
    assert p.alternatives == frozenset({"a", "b"})


def test_restrict_ranking():
    r = Ranking.from_string("x>u>v>y>w")
    assert restrict_ranking(r, {"w", "x", "y"}).order == ("x", "y", "w")
    with pytest.raises(ValueError):
        restrict_ranking(r, {"x", "zz"})
    with pytest.raises(ValueError):
        restrict_ranking(r, set())


def test_swap_ranking_identity_and_swap():
    r = Ranking.from_string("a>b>c")
    assert swap_ranking(r, "a", "a") == r
    assert swap_ranking(r, "a", "c").order == ("c", "b", "a")
    assert swap_ranking(swap_ranking(r, "a", "b"), "a", "b") == r
    with pytest.raises(ValueError):
        swap_ranking(r, "a", "z")


def test_marginalize_bloc_profile(bloc_profile):
    marg = marginalize_profile(bloc_profile, {"w", "x", "y"})
    assert marg.weight(Ranking.from_string("x>y>w")) == 0.5
    assert marg.weight(Ranking.from_string("y>w>x")) == 0.5
    # marginalizing to the full set is the identity
    assert marginalize_profile(bloc_profile, bloc_profile.alternatives) == bloc_profile


def test_marginalize_merges_rankings(split_majority_profile):
    marg = marginalize_profile(split_majority_profile, {"a", "b"})
    assert marg.weight(Ranking.from_string("a>b")) == pytest.approx(0.55, abs=1e-12)
    assert marg.weight(Ranking.from_string("b>a")) == pytest.approx(0.45, abs=1e-12)


def test_swap_dominance_golden(split_majority_profile):
    p = split_majority_profile
    assert swap_dominates(p, "a", "b")
    assert swap_dominates(p, "b", "c")
    assert swap_dominates(p, "a", "c")
    assert not swap_dominates(p, "b", "a")
    assert not swap_dominates(p, "c", "b")
    assert not swap_dominates(p, "c", "a")
    with pytest.raises(ValueError):
        swap_dominates(p, "a", "a")
    with pytest.raises(ValueError):
        swap_dominates(p, "a", "zz")


def test_preorder_report_golden(split_majority_profile):
    report = check_total_preorder(split_majority_profile)
    assert report.is_total_preorder
    assert report.is_total and report.is_transitive
    strict = {(a, b) for a, b in report.relation if a != b}
    assert strict == {("a", "b"), ("b", "c"), ("a", "c")}


def test_preorder_incomparable_pair(bloc_profile):
    # the two bloc leaders x and y do not dominate each other
    report = check_total_preorder(bloc_profile)
    assert not report.is_total
    assert not report.is_total_preorder
    assert ("x", "y") not in report.relation
    assert ("y", "x") not in report.relation


def test_preorder_single_ranking_is_chain():
    p = AnonymousProfile({Ranking.from_string("c>a>b"): 1.0})
    report = check_total_preorder(p)
    assert report.is_total_preorder
    assert ("c", "a") in report.relation and ("a", "b") in report.relation
    assert ("b", "c") not in report.relation


def brute_force_swap_dominates(profile, a, b):
    """Oracle: scan every ranking of the alternative set."""
    for perm in itertools.permutations(sorted(profile.alternatives)):
        ranking = Ranking(perm)
        if ranking.prefers(a, b):
            swapped = swap_ranking(ranking, a, b)
            if profile.weight(ranking) < profile.weight(swapped):
                return False
    return True


@st.composite
def profiles(draw, min_m=2, max_m=4, symmetrize_in=None):
    m = draw(st.integers(min_m, max_m))
    ids = tuple("abcde"[:m])
    perms = draw(
        st.lists(
            st.permutations(ids), min_size=1, max_size=6, unique_by=tuple
        )
    )
    weights = draw(
        st.lists(
            st.floats(0.05, 1.0, allow_nan=False),
            min_size=len(perms),
            max_size=len(perms),
        )
    )
    support = {}
    for perm, w in zip(perms, weights):
        support[Ranking(tuple(perm))] = support.get(Ranking(tuple(perm)), 0.0) + w
    if symmetrize_in is not None and draw(st.booleans()):
        a, b = draw(st.sampled_from(list(itertools.combinations(ids, 2))))
        halved = {}
        for ranking, w in support.items():
            halved[ranking] = halved.get(ranking, 0.0) + w / 2
            image = swap_ranking(ranking, a, b)
            halved[image] = halved.get(image, 0.0) + w / 2
        support = halved
    total = sum(support.values())
    return AnonymousProfile({r: w / total for r, w in support.items()})


@given(profiles())
@settings(max_examples=150, deadline=None)
def test_swap_dominance_matches_brute_force(profile):
    for a, b in itertools.permutations(sorted(profile.alternatives), 2):
        assert swap_dominates(profile, a, b) == brute_force_swap_dominates(
            profile, a, b
        )


def test_swap_dominance_brute_force_five_alternatives(bloc_profile):
    for a, b in itertools.permutations(sorted(bloc_profile.alternatives), 2):
        assert swap_dominates(bloc_profile, a, b) == brute_force_swap_dominates(
            bloc_profile, a, b
        )


@given(profiles(min_m=3, max_m=4), st.data())
@settings(max_examples=100, deadline=None)
def test_marginalization_tower(profile, data):
    alts = sorted(profile.alternatives)
    mid = data.draw(
        st.sets(st.sampled_from(alts), min_size=2, max_size=len(alts))
    )
    inner = data.draw(st.sets(st.sampled_from(sorted(mid)), min_size=1, max_size=2))
    direct = marginalize_profile(profile, inner)
    staged = marginalize_profile(marginalize_profile(profile, mid), inner)
    assert direct.alternatives == staged.alternatives
    for ranking in set(direct.support) | set(staged.support):
        assert abs(direct.weight(ranking) - staged.weight(ranking)) <= 1e-12


@given(profiles(symmetrize_in=True))
@settings(max_examples=100, deadline=None)
def test_mutual_dominance_iff_swap_invariant(profile):
    for a, b in itertools.combinations(sorted(profile.alternatives), 2):
        mutual = swap_dominates(profile, a, b) and swap_dominates(profile, b, a)
        invariant = all(
            profile.weight(r) == profile.weight(swap_ranking(r, a, b))
            for r in profile.support
        )
        assert mutual == invariant


@given(st.permutations("abcde"), st.data())
@settings(max_examples=100, deadline=None)
def test_restrict_commutes_with_swap(perm, data):
    ranking = Ranking(tuple(perm))
    subset = data.draw(st.sets(st.sampled_from(perm), min_size=2, max_size=4))
    a, b = data.draw(st.sampled_from(list(itertools.permutations(sorted(subset), 2))))
    assert restrict_ranking(swap_ranking(ranking, a, b), subset) == swap_ranking(
        restrict_ranking(ranking, subset), a, b
    )
