import pytest

from prefvote.profiles import AnonymousProfile, Ranking


@pytest.fixture
def bloc_profile():
    """Two equal voter blocs over five alternatives.

    Borda picks x on the full set but y on the restriction to {w, x, y},
    which makes this the standard counterexample for stability of
    positional rules on fixed profiles.
    """
    return AnonymousProfile(
        {
            Ranking.from_string("x>u>v>y>w"): 0.5,
            Ranking.from_string("y>w>x>u>v"): 0.5,
        }
    )


@pytest.fixture
def split_majority_profile():
    """Three alternatives, near-tied plurality between a and b.

    a swap-dominates b and c, b swap-dominates c, yet plurality declares
    {a, b} tied on the full set while the marginal on {a, b} elects a
    alone.
    """
    return AnonymousProfile(
        {
            Ranking.from_string("a>b>c"): 0.35,
            Ranking.from_string("b>a>c"): 0.35,
            Ranking.from_string("c>a>b"): 0.10,
            Ranking.from_string("a>c>b"): 0.10,
            Ranking.from_string("b>c>a"): 0.10,
        }
    )
