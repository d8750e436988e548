import pytest

from quivertilt.census import (
    Census,
    CensusCapExceeded,
    basic_candidates,
    census,
    check_inclusion,
    hunt_class_gap,
)
from quivertilt.modules import (
    in_gen,
    is_indecomposable,
    iso_modules,
    simple_module,
)


def test_a2_census(a2_census):
    assert len(a2_census) == 3
    assert sorted(m.dims for m in a2_census.modules) == [(0, 1), (1, 0), (1, 1)]


def test_zero_bound_gives_empty_census(a2):
    assert len(census(a2, (0, 0))) == 0


def test_bound_validation(a2):
    with pytest.raises(ValueError):
        census(a2, (1,))
    with pytest.raises(ValueError):
        census(a2, (-1, 1))


def test_cap_refusal(strands):
    with pytest.raises(CensusCapExceeded):
        census(strands, (2, 2, 2), max_size=1000)


def test_census_members_are_pairwise_noniso_indecomposables(triangle_census):
    mods = triangle_census.modules
    for M in mods:
        assert is_indecomposable(M)
    for i, M in enumerate(mods):
        for N in mods[i + 1 :]:
            assert not iso_modules(M, N)


def test_triangle_census_count_regression(triangle):
    # all seven interval modules of the cyclic Nakayama quotient
    assert len(census(triangle, (1, 1, 1))) == 7
    # the algebra has finite representation type: no new classes at bound 2
    assert len(census(triangle, (2, 2, 2))) == 7


def test_strands_census_count_regression(strands_census):
    assert len(strands_census) == 34


def test_strands_census_contains_projectives_and_injectives(strands, strands_census):
    from quivertilt.modules import projective_module
    from test_homology import make_opposite, opposite_dual

    opp = make_opposite(strands)
    expected = [projective_module(strands, v).module for v in range(3)]
    expected += [opposite_dual(strands, opp, v) for v in range(3)]
    for E in expected:
        assert any(iso_modules(E, M) for M in strands_census.modules), E.dims


def test_census_idempotent(a2, a2_census):
    again = census(a2, (2, 2))
    assert len(again) == len(a2_census)
    for M, N in zip(again.modules, a2_census.modules):
        assert iso_modules(M, N)


def test_counterexample_stable_under_larger_bound(strands, strands_T):
    """A certified counterexample at a small bound persists at larger ones."""
    small = census(strands, (1, 1, 1))
    pred_a = lambda M: True
    pred_b = lambda M: in_gen(strands_T, M)
    bad_small = check_inclusion(pred_a, pred_b, small.modules)
    assert bad_small is not None
    bigger = census(strands, (2, 2, 1))
    bad_big = check_inclusion(pred_a, pred_b, bigger.modules)
    assert bad_big is not None


def test_check_inclusion_reflexive(strands_T, strands_census):
    pred = lambda M: in_gen(strands_T, M)
    assert check_inclusion(pred, pred, strands_census.modules) is None


def test_basic_candidates_count(a2_census):
    cands = basic_candidates(a2_census)
    assert len(cands) == 8  # zero + 7 nonempty subsets of 3 indecomposables


def test_hunt_a2_empty(a2_census):
    assert hunt_class_gap(a2_census, 1) == []


def test_kronecker_census_matches_classification():
    """Two parallel arrows, no relations: the count at bound (2,2) over F_2
    is forced by the known classification — preprojectives (1,0), (0,1),
    (1,2), (2,1); three one-parameter classes at (1,1); at (2,2) three
    length-two tube modules plus one class whose endomorphism ring is the
    quadratic field extension."""
    from collections import Counter

    from quivertilt.algebra import Quiver, build_algebra
    from quivertilt.modules import hom_dim

    q = Quiver(["1", "2"], [("u", "1", "2"), ("v", "1", "2")])
    alg = build_algebra(q, [], p=2)
    cens = census(alg, (2, 2))
    assert len(cens) == 11
    counts = Counter(m.dims for m in cens.modules)
    assert counts == {(1, 0): 1, (0, 1): 1, (1, 1): 3, (1, 2): 1, (2, 1): 1, (2, 2): 4}
    for M in cens.modules:
        if M.dims == (2, 2):
            assert hom_dim(M, M) == 2


def test_hunt_strands_small_bound_regression(strands):
    """Exhaustive level-2 sweep at bound (1,1,1): 11 indecomposables, four
    qualifying candidates among the 2048 basic modules, none separating the
    definitional notion from the class-equality one."""
    from quivertilt.classify import is_n_air

    cens = census(strands, (1, 1, 1))
    assert len(cens) == 11
    air_count = sum(
        1 for T in basic_candidates(cens) if is_n_air(T, 2)[0]
    )
    assert air_count == 4
    assert hunt_class_gap(cens, 2) == []
