"""Stiefel pipeline: structure, rotation map, family checks, scans."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from go_metric_lab import go, lie_core, linalg, metric, stiefel
from go_metric_lab.stiefel import (NotPositiveDefiniteError, build_stiefel,
                                   center_coefficient, metric_at, tilde_map,
                                   verify_family)


def test_build_examples(space):
    sp = space(3, 1)
    assert sp.dim_m == 5 and sp.decomp.s0.dim == 1
    assert [m.dim for m in sp.s1.members] == [4]
    sp = space(4, 2)
    assert sp.dim_m == 12 and sp.decomp.s0.dim == 4
    assert [m.dim for m in sp.s1.members] == [4, 4]
    sp = space(2, 1)
    assert sp.dim_m == 3


def test_build_rejects_bad_range():
    with pytest.raises(lie_core.InvalidDimensionError):
        build_stiefel(3, 3)
    with pytest.raises(lie_core.InvalidDimensionError):
        build_stiefel(3, 0)


def test_modules_match_coordinate_spans(space):
    # each module is spanned by unit coordinates e_ij, eb_im with j, m > k
    sp = space(5, 3)
    m_labels = []
    for v in sp.split.m_basis:
        nz = [j for j, c in enumerate(v) if c != 0]
        m_labels.append(sp.algebra.labels[nz[0]])
    for i, module in enumerate(sp.modules, start=1):
        assert module.dim == 2 * (5 - 3)
        got = set()
        for v in module.basis:
            nz = [j for j, c in enumerate(v) if c != 0]
            assert len(nz) == 1
            got.add(m_labels[nz[0]])
        expect = {f"e_{i}_{j}" for j in range(4, 6)}
        expect |= {f"eb_{i}_{j}" for j in range(4, 6)}
        assert got == expect


def test_tilde_examples(space):
    sp = space(3, 1)
    m_labels = []
    for v in sp.split.m_basis:
        nz = [j for j, c in enumerate(v) if c != 0]
        m_labels.append(sp.algebra.labels[nz[0]])
    x = linalg.zero_vec(sp.dim_m)
    x[m_labels.index("e_1_3")] = Fraction(1)
    out = tilde_map(sp, x)
    named = {m_labels[i]: c for i, c in enumerate(out) if c != 0}
    assert named == {"eb_1_3": Fraction(-1)}
    assert tilde_map(sp, linalg.zero_vec(sp.dim_m)) == linalg.zero_vec(sp.dim_m)


def test_tilde_rejects_outside_s1(space):
    sp = space(3, 2)
    with pytest.raises(ValueError):
        tilde_map(sp, sp.z0_m)


@given(st.integers(0, 10 ** 6))
def test_tilde_is_a_complex_structure(seed):
    sp = _cached_space()
    rng = random.Random(seed)
    coeffs = [Fraction(rng.randint(-5, 5)) for _ in range(sp.s1.space.dim)]
    x = linalg.zero_vec(sp.dim_m)
    for c, b in zip(coeffs, sp.s1.space.basis):
        x = linalg.vec_add(x, linalg.vec_scale(c, b))
    assert tilde_map(sp, tilde_map(sp, x)) == linalg.vec_scale(Fraction(-1), x)


_SPACE = None


def _cached_space():
    global _SPACE
    if _SPACE is None:
        _SPACE = build_stiefel(3, 2)
    return _SPACE


def test_center_coefficient(space):
    sp = space(3, 2)
    x = linalg.vec_scale(Fraction(5, 2), sp.z0_m)
    assert center_coefficient(sp, x) == Fraction(5, 2)
    assert center_coefficient(sp, sp.s1.space.basis[0]) == 0


def test_metric_at_pd_iff_positive(space):
    sp = space(3, 1)
    assert metric_at(sp, Fraction(1, 4)).is_pd
    assert metric_at(sp, 1).matrix == linalg.identity(sp.dim_m)
    a_neg = metric.from_matrix(
        sp.decomp,
        linalg.mat_add(linalg.identity(sp.dim_m),
                       linalg.mat_scale(Fraction(-2), metric.projector(
                           sp.ideals.center, sp.action.gram, sp.dim_m))))
    assert not a_neg.is_pd                      # this is A_t at t = -1


def test_witness_identities_all_spaces(space):
    for nk in [(2, 1), (3, 2), (4, 2)]:
        ids = stiefel.check_witness_identities(space(*nk))
        assert all(ids.values()), (nk, ids)


def test_module_bracket_lands_in_s0(space):
    # [e_{i,k+1}, e_{j,k+1}] = -e_ij for i != j <= k
    sp = space(4, 2)
    g = sp.algebra
    k = sp.k
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            if i == j:
                continue
            x = g.vector((f"e_{i}_{k + 1}", 1))
            y = g.vector((f"e_{j}_{k + 1}", 1))
            br = lie_core.bracket(g, x, y)
            lo, hi = min(i, j), max(i, j)
            sign = -1 if i < j else 1            # e_ji = -e_ij
            assert br == g.vector((f"e_{lo}_{hi}", sign))
            br_m = sp.split.coords_in_m(br)
            assert sp.decomp.s0.space.coords_of(br_m, sp.split.gram_m) is not None


def test_verify_family_rejects_nonpositive_t(space):
    with pytest.raises(NotPositiveDefiniteError):
        verify_family(space(2, 1), [0])
    with pytest.raises(NotPositiveDefiniteError):
        verify_family(space(2, 1), [Fraction(-1)])


def test_verify_family_t1_reduces_to_zero_witness(space):
    sp = space(3, 1)
    w = stiefel.witness_map(sp, 1)
    rng = random.Random(0)
    x = lie_core.random_vector_of_len(sp.dim_m, rng)
    assert linalg.vec_is_zero(w(x))             # a_1 = 0: [X, X] = 0


@pytest.mark.parametrize("n,k", [(2, 1), (3, 2)])
def test_verify_family_exact_zeros(n, k, space):
    rep = verify_family(space(n, k), [Fraction(1, 2), 1, 2, 3],
                        n_samples=25, seed=1)
    assert all(ids for ids in rep["identities"].values())
    for cert in rep["certificates"].values():
        assert cert.verdict == "verified-on-family"
        assert all(w.residual_sq == 0 for w in cert.witnesses)


def test_deformation_point_classifier(space):
    sp = space(3, 2)
    assert stiefel.is_deformation_point(sp, metric_at(sp, Fraction(7, 3)))
    assert stiefel.is_deformation_point(
        sp, metric.from_matrix(sp.decomp, linalg.mat_scale(
            Fraction(3), metric_at(sp, Fraction(1, 2)).matrix)))
    p1 = metric.projector(sp.s1.members[0].space, sp.action.gram, sp.dim_m)
    a = metric.from_matrix(sp.decomp,
                           linalg.mat_add(linalg.identity(sp.dim_m), p1))
    assert not stiefel.is_deformation_point(sp, a)


def test_grassmannian_cross_check(space):
    assert stiefel.grassmannian_cross_check(space(3, 2))
    assert stiefel.grassmannian_cross_check(space(4, 2))


def test_uniqueness_scan_coarse(space):
    sp = space(3, 2)
    spec = go.ScanSpec(grid=[Fraction(1), Fraction(2), Fraction(3)], seed=2,
                       survivor_random_probes=3)
    rep = stiefel.uniqueness_scan(sp, spec, offdiagonal_samples=25)
    grid = rep["grid"]
    assert grid["n_points"] == 81
    assert grid["n_survivors"] == 9              # equal scalars, free center
    assert grid["survivors_all_in_family"]
    assert grid["n_falsified"] == 72
    assert rep["off_diagonal"]["n_falsified"] == rep["off_diagonal"]["n_points"] > 0
    assert rep["grassmannian_cross_check"]


def test_uniqueness_scan_berger_note(space):
    sp = space(2, 1)
    spec = go.ScanSpec(grid=[Fraction(1), Fraction(2)], seed=0,
                       survivor_random_probes=2)
    rep = stiefel.uniqueness_scan(sp, spec, offdiagonal_samples=0)
    assert rep["grid"]["n_survivors"] == rep["grid"]["n_points"] == 4
    assert "note" in rep                        # k = n-1 fiber deformations


def test_reproduce_report_shape(space):
    rep = stiefel.reproduce_report(2, 1, resolution=Fraction(1), seed=3,
                                   offdiagonal_samples=0, n_samples=10)
    assert rep["space"]["dim_m"] == 3
    assert all(c["verdict"] == "verified-on-family"
               for c in rep["family_certificates"].values())
    assert rep["uniqueness"]["grid"]["survivors_all_in_family"]


def test_reproduce_report_range_check():
    with pytest.raises(lie_core.InvalidDimensionError):
        stiefel.reproduce_report(6, 6)
    with pytest.raises(lie_core.InvalidDimensionError):
        stiefel.reproduce_report(7, 1)


def test_uniqueness_scan_k1_all_grid_points_survive(space):
    # k = 1: the diagonal cone and the deformation cone coincide
    sp = space(3, 1)
    spec = go.ScanSpec(grid=[Fraction(1), Fraction(2)], seed=0,
                       survivor_random_probes=2)
    rep = stiefel.uniqueness_scan(sp, spec, offdiagonal_samples=0)
    assert rep["grid"]["n_survivors"] == rep["grid"]["n_points"] == 4
    assert rep["grid"]["survivors_all_in_family"]


def test_uniqueness_scan_53_coarse(space):
    # three equivalent modules: five diagonal parameters before merging
    sp = space(5, 3)
    spec = go.ScanSpec(grid=[Fraction(1), Fraction(2)], seed=4,
                       survivor_random_probes=2)
    rep = stiefel.uniqueness_scan(sp, spec, offdiagonal_samples=10)
    grid = rep["grid"]
    assert grid["n_points"] == 2 ** 5
    assert grid["n_survivors"] == 4            # all four scalars tied, z free
    assert grid["survivors_all_in_family"]
    assert rep["off_diagonal"]["n_falsified"] == 10
