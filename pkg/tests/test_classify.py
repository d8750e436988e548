import numpy as np
import pytest

from quivertilt.census import basic_candidates
from quivertilt.classify import (
    Ideal,
    InternalInconsistencyError,
    PhiRefusal,
    QuotientContext,
    annihilator,
    classify,
    crosscheck_equivalences,
    is_faithful,
    is_n_air,
    is_n_pre_air,
    is_n_quasi_tilting,
    is_n_silting,
    is_n_tilting,
    is_pretilting,
    is_strongly_n_air,
    is_strongly_n_quasi_tilting,
    phi_map,
    psi_map,
    quotient_algebra,
)
from quivertilt.complexes import (
    complex_iso,
    stalk_complex,
    strip_contractibles,
    truncated_complex,
)
from quivertilt.homology import min_presentation
from quivertilt.modules import (
    add_equivalent,
    direct_sum,
    hom_dim,
    in_gen,
    iso_modules,
    projective_module,
    regular_module,
    simple_module,
    zero_module,
)
from quivertilt.tri import Tri


# -- exact predicates ---------------------------------------------------------


def test_pretilting(strands, strands_T, triangle, triangle_T):
    assert is_pretilting(strands_T, 2)
    assert is_pretilting(regular_module(strands).module, 1)
    assert not is_pretilting(triangle_T, 2)  # projective dimension 3
    assert is_pretilting(triangle_T, 3)


def test_n_tilting(strands, strands_T, a2):
    assert is_n_tilting(regular_module(strands).module, 2)
    assert not is_n_tilting(strands_T, 2)
    S1 = simple_module(a2, 0)
    P1 = projective_module(a2, 0).module
    apr = direct_sum([P1, S1])[0]
    assert is_n_tilting(apr, 1)
    assert not is_n_tilting(S1, 1)


def test_pre_air_levels(strands_T):
    assert is_n_pre_air(strands_T, 2)
    assert is_n_pre_air(strands_T, 3)
    assert not is_n_pre_air(strands_T, 1)


def test_pre_air_projective(strands):
    assert is_n_pre_air(regular_module(strands).module, 1)


def test_pre_air_matches_presentation_class(strands_census, strands_T):
    """The complex-side test agrees with the Hom-exactness definition."""
    from quivertilt.classify import in_presentation_class

    for M in list(strands_census.modules[:10]) + [strands_T]:
        for n in (1, 2):
            assert is_n_pre_air(M, n) == in_presentation_class(M, n), (M.dims, n)


def test_air_strands_negative(strands_T):
    for n in (1, 2, 3):
        air, _ = is_n_air(strands_T, n)
        assert not air


def test_air_regular_and_zero(strands):
    air, _ = is_n_air(regular_module(strands).module, 2)
    assert air
    air, _ = is_n_air(zero_module(strands), 2)
    assert air


def test_a2_air_census_count(a2, a2_census):
    found = [T for T in basic_candidates(a2_census) if is_n_air(T, 1)[0]]
    assert len(found) == 5
    dims = sorted(t.dims for t in found)
    assert dims == [(0, 0), (0, 1), (1, 0), (1, 2), (2, 1)]


def test_a2_air_equals_strongly_air(a2, a2_census):
    universe = a2_census.with_zero()
    for T in basic_candidates(a2_census):
        air, _ = is_n_air(T, 1)
        sair = is_strongly_n_air(T, 1, universe)
        assert sair.value is (Tri.YES if air else Tri.NO), T.dims


def test_simple_projective_strongly_air(a2, a2_census):
    """A pretilting simple module is strongly AIR at every level."""
    S2 = simple_module(a2, 1)
    assert is_pretilting(S2, 1)
    universe = a2_census.with_zero()
    for n in (1, 2):
        assert is_strongly_n_air(S2, n, universe).value is Tri.YES


# -- census-bounded predicates ---------------------------------------------


def test_silting_strands_negative_with_injective_witness(strands, strands_T, strands_census):
    universe = strands_census.with_zero()
    verdict = is_n_silting(strands_T, 2, universe)
    assert verdict.value is Tri.NO
    assert "outside_gen" in verdict.witness
    # the canonical witness: an injective module in the class but not in Gen(T)
    from test_homology import make_opposite, opposite_dual

    opp = make_opposite(strands)
    inj3 = opposite_dual(strands, opp, 2)
    pres = min_presentation(strands_T, 2)
    assert pres.hom_sequence_exact(inj3)
    assert not in_gen(strands_T, inj3)


def test_silting_regular(strands, strands_census):
    verdict = is_n_silting(regular_module(strands).module, 2, strands_census.with_zero())
    assert verdict.value is Tri.YES


def test_quasi_tilting_paper_values(strands_T, strands_census, triangle_T, triangle_census):
    assert is_n_quasi_tilting(strands_T, 2, strands_census.with_zero()).value is Tri.YES
    assert (
        is_strongly_n_quasi_tilting(strands_T, 2, strands_census.with_zero()).value
        is Tri.YES
    )
    assert is_n_quasi_tilting(triangle_T, 2, triangle_census.with_zero()).value is Tri.YES
    sq = is_strongly_n_quasi_tilting(triangle_T, 2, triangle_census.with_zero())
    assert sq.value is Tri.NO
    assert sq.witness["graded_witness"]["dims"] == [1, 0, 0]
    assert sq.witness["k"] == 1 and sq.witness["ext_degree"] == 2


def test_quasi_tilting_regular(strands, strands_census):
    R = regular_module(strands).module
    assert is_n_quasi_tilting(R, 2, strands_census.with_zero()).value is Tri.YES
    assert is_strongly_n_quasi_tilting(R, 2, strands_census.with_zero()).value is Tri.YES


# -- annihilators and quotients ----------------------------------------------


def test_annihilator_regular_is_zero(strands):
    R = regular_module(strands).module
    assert annihilator(R).dim == 0
    assert is_faithful(R)


def test_annihilator_simple_a2(a2):
    S2 = simple_module(a2, 1)
    ann = annihilator(S2)
    assert ann.dim == 2  # e_1 and the arrow
    assert ann.is_two_sided()
    assert not is_faithful(S2)
    qalg, vmap = quotient_algebra(a2, ann)
    assert qalg.dim == 1
    assert qalg.quiver.num_vertices == 1


def test_annihilator_strands_T(strands, strands_T):
    ann = annihilator(strands_T)
    assert ann.dim > 0
    assert ann.is_two_sided()
    ctx = QuotientContext(strands, ann, validate=False)
    assert ctx.kills(strands_T)
    assert ctx.dim == strands.dim - ann.dim
    qalg, _ = quotient_algebra(strands, ann)
    assert qalg.dim == ctx.dim


def test_quotient_by_non_ideal_rejected(strands):
    bad = Ideal(strands, [strands.basis_element(strands.trivial_index[0])])
    # e_1 alone does not span a two-sided ideal here (e_1 * x1 = x1 escapes)
    with pytest.raises(ValueError):
        quotient_algebra(strands, bad)


def test_air_modules_tilt_over_quotient_a2(a2, a2_census):
    """Every AIR module found in the small sweep is tilting over its
    annihilator quotient."""
    for T in basic_candidates(a2_census):
        if T.total_dim == 0:
            continue
        air, _ = is_n_air(T, 1)
        if not air:
            continue
        ctx = QuotientContext(a2, annihilator(T), validate=False)
        assert ctx.is_n_tilting_here(T, 1), T.dims


def test_quotient_context_regular(strands, strands_T):
    ctx = QuotientContext(strands, annihilator(strands_T), validate=False)
    reg = ctx.regular()
    assert reg.total_dim == ctx.dim
    assert ctx.kills(reg)


def test_strands_T_not_tilting_over_quotient(strands, strands_T):
    """The counterexample module fails tilting over its annihilator quotient
    as well (it is not AIR, so this is consistent both ways)."""
    ctx = QuotientContext(strands, annihilator(strands_T), validate=False)
    assert not ctx.is_n_tilting_here(strands_T, 2)


def test_strands_discovered_air_modules_tilt_over_quotient(strands):
    """Positive instances discovered by the bounded sweep are tilting over
    their annihilator quotients."""
    from quivertilt.census import basic_candidates, census

    cens = census(strands, (1, 1, 1))
    hits = 0
    for T in basic_candidates(cens):
        if T.total_dim == 0:
            continue
        air, _ = is_n_air(T, 2)
        if not air:
            continue
        ctx = QuotientContext(strands, annihilator(T), validate=False)
        assert ctx.is_n_tilting_here(T, 2), T.dims
        hits += 1
    assert hits >= 2


# -- the two translations ------------------------------------------------------


def test_phi_on_regular_stalk(strands, strands_census):
    C = stalk_complex(strands, tuple(range(3)))
    T, partial = phi_map(C, 2)
    assert iso_modules(T, regular_module(strands).module)
    assert partial["generation"] == "yes"


def test_phi_refuses_strands_complex(strands_T):
    C = truncated_complex(min_presentation(strands_T, 2))
    with pytest.raises(PhiRefusal) as exc:
        phi_map(C, 2)
    assert exc.value.partial["presilting"] is True
    assert exc.value.partial["rank_condition"] is False


def test_phi_window_enforced(strands):
    C = stalk_complex(strands, (0,), degree=-3)
    with pytest.raises(PhiRefusal):
        phi_map(C, 2)


def test_psi_regular(strands):
    R = regular_module(strands).module
    C, report = psi_map(R, 2)
    assert complex_iso(strip_contractibles(C), stalk_complex(strands, tuple(range(3))))
    assert report["presilting"] and report["rank_condition"]
    assert report["generation"] == "yes"


def test_psi_refuses_non_air(strands_T):
    with pytest.raises(ValueError):
        psi_map(strands_T, 2)


def test_psi_phi_round_trip_a2(a2, a2_census):
    for T in basic_candidates(a2_census):
        air, _ = is_n_air(T, 1)
        if not air:
            continue
        C, report = psi_map(T, 1)
        if report["generation"] != "yes":
            continue
        back, _ = phi_map(C, 1)
        assert add_equivalent(back, T), T.dims


def test_psi_padding_vertices(a2):
    S1 = simple_module(a2, 0)
    C, report = psi_map(S1, 1)
    assert report["padding_vertices"] == ["2"]
    assert report["rank_condition"]


def test_psi_zero_module(a2):
    Z = zero_module(a2)
    C, report = psi_map(Z, 1)
    assert complex_iso(
        strip_contractibles(C), stalk_complex(a2, (0, 1), degree=-1)
    )
    T, _ = phi_map(C, 1)
    assert T.total_dim == 0


# -- cross-validation -----------------------------------------------------------


def test_crosscheck_full_a2(a2, a2_census):
    universe = a2_census.with_zero()
    for T in basic_candidates(a2_census):
        crosscheck_equivalences(T, 1, universe)  # must not raise


def test_crosscheck_strands(strands_T, strands_census):
    report = crosscheck_equivalences(strands_T, 2, strands_census.with_zero())
    assert report["n_air"] is Tri.NO
    assert report["strongly_n_quasi_tilting"] is Tri.YES
    assert report["ann_faith_dim_ge_n"] is Tri.NO


def test_air_plus_cogen_implies_tilting(a2, a2_census):
    """Candidates meeting the definition that also cogenerate the regular
    module are honest tilting modules (checked over the sweep)."""
    from quivertilt.modules import in_cogen

    R = regular_module(a2).module
    hit = 0
    for T in basic_candidates(a2_census):
        air, _ = is_n_air(T, 1)
        if air and in_cogen(T, R):
            assert is_n_tilting(T, 1), T.dims
            hit += 1
    assert hit >= 2  # the regular module and the reflection tilt


def test_predicates_are_add_invariant(a2, a2_census, strands, strands_T, strands_census):
    """Doubling the module changes no verdict (multiplicities are invisible
    to every predicate in scope)."""
    from quivertilt.homology import ann_faithful_dim_at_least

    cases = [
        (a2, a2_census.with_zero(), 1, simple_module(a2, 0)),
        (a2, a2_census.with_zero(), 1, projective_module(a2, 0).module),
        (strands, strands_census.with_zero(), 2, strands_T),
    ]
    for alg, universe, n, T in cases:
        TT = direct_sum([T, T])[0]
        assert is_pretilting(T, n) == is_pretilting(TT, n)
        assert is_n_tilting(T, n) == is_n_tilting(TT, n)
        assert is_n_pre_air(T, n) == is_n_pre_air(TT, n)
        assert is_n_air(T, n)[0] == is_n_air(TT, n)[0]
        assert ann_faithful_dim_at_least(T, n) == ann_faithful_dim_at_least(TT, n)
        assert (
            is_strongly_n_air(T, n, universe).value
            is is_strongly_n_air(TT, n, universe).value
        )
        assert is_n_silting(T, n, universe).value is is_n_silting(TT, n, universe).value
        assert (
            is_n_quasi_tilting(T, n, universe).value
            is is_n_quasi_tilting(TT, n, universe).value
        )


def test_kronecker_verdicts():
    """Spot checks over the two-arrow quiver (infinite representation type):
    the regular module is tilting, a single non-simple projective is rigid
    but not qualifying (wrong summand count), the simple projective is
    strongly qualifying, and the rank-two regular classes are not rigid."""
    from quivertilt.algebra import Quiver, build_algebra
    from quivertilt.census import census
    from quivertilt.homology import ext_dim

    q = Quiver(["1", "2"], [("u", "1", "2"), ("v", "1", "2")])
    alg = build_algebra(q, [], p=2)
    universe = census(alg, (2, 2)).with_zero()
    A = regular_module(alg).module
    P1 = projective_module(alg, 0).module
    P2 = projective_module(alg, 1).module
    assert is_n_tilting(A, 1)
    assert is_pretilting(P1, 1)
    assert not is_n_air(P1, 1)[0]
    assert is_strongly_n_air(P2, 1, universe).value is Tri.YES
    for M in universe:
        if M.dims == (2, 2):
            assert ext_dim(M, M, 1) != 0
            assert not is_n_air(M, 1)[0]


def test_commuting_square_pipeline_f5():
    """Four vertices, a non-monomial relation, odd characteristic: the whole
    pipeline runs and the regular module classifies as expected."""
    from quivertilt.algebra import Quiver, build_algebra, make_path
    from quivertilt.census import census

    q = Quiver(
        ["1", "2", "3", "4"],
        [("a", "1", "2"), ("b", "1", "3"), ("c", "2", "4"), ("d", "3", "4")],
    )
    rel = [(1, make_path(q, ["a", "c"])), (-1, make_path(q, ["b", "d"]))]
    alg = build_algebra(q, [rel], p=5)
    cens = census(alg, (1, 1, 1, 1))
    universe = cens.with_zero()
    R = regular_module(alg).module
    rep = classify(R, 1, universe, universe_bound=(1, 1, 1, 1))
    vals = {k: v.value for k, v in rep.verdicts.items()}
    assert vals["n_tilting"] is Tri.YES
    assert vals["strongly_n_air"] is Tri.YES
    assert vals["faithful"] is Tri.YES
    S4 = simple_module(alg, 3)  # the sink simple is projective
    assert is_pretilting(S4, 1)
    assert is_strongly_n_air(S4, 1, universe).value is Tri.YES


def test_sweep_over_f3():
    """The two-vertex sweep has the same shape over F_3: five qualifying
    candidates, the notions coincide, all cross-checks clean, and every
    certified complex round-trips (signs matter in odd characteristic)."""
    from quivertilt.algebra import Quiver, build_algebra
    from quivertilt.census import census

    q = Quiver(["1", "2"], [("al", "1", "2")])
    alg = build_algebra(q, [], p=3)
    cens = census(alg, (1, 1))
    universe = cens.with_zero()
    air = []
    for T in basic_candidates(cens):
        crosscheck_equivalences(T, 1, universe)
        got, _ = is_n_air(T, 1)
        if got:
            air.append(T)
            assert is_strongly_n_air(T, 1, universe).value is Tri.YES
    assert len(air) == 5
    round_trips = 0
    for T in air:
        C, report = psi_map(T, 1)
        assert report["presilting"] and report["rank_condition"]
        assert report["generation"] == "yes", T.dims
        back, _ = phi_map(C, 1)
        assert add_equivalent(back, T), T.dims
        round_trips += 1
    assert round_trips == 5


def test_classify_report_shapes(a2, a2_census):
    P1 = projective_module(a2, 0).module
    S1 = simple_module(a2, 0)
    T = direct_sum([P1, S1])[0]
    rep = classify(T, 1, a2_census.with_zero(), universe_bound=(2, 2), seed=7)
    js = rep.as_json()
    assert js["schema"] == 1
    assert js["verdicts"]["n_tilting"]["value"] == "yes"
    assert js["seed"] == 7
    assert "n = 1" in rep.as_text()
