"""Subspace family, bracket space and character tests.

Independent oracles: bracket dimensions come from weight counting (a
circle-equivariant map can only connect basis strings of equal weight,
so the dimension is the sum over weights of products of weight-space
dimensions); the balanced family must pass every condition because the
diagram arrows preserve weight; character values are solved from word
coefficient targets by linear least squares and validated against the
product structure afterwards, never assumed.
"""
import numpy as np
import pytest

from tlspectral.numerics import dagger
from tlspectral.qfunctor import EmbeddingFunctor, WeightZeroFunctor
from tlspectral.repcat import (
    AntilinearMap,
    ConjugateSolution,
    ObjectWord,
    rep_category,
)
from tlspectral.spectral import build_algebra, multiplicity_map
from tlspectral.subgroup import (
    SubspaceFamily,
    bracket_space,
    character_from_values,
    character_to_transformation,
    check_family,
    full_family,
    weight_zero_family,
)

MU = 0.5
WZ_FAM = weight_zero_family(6)
CAT = rep_category(MU)


def solve_character(algebra, target, max_word):
    """Per-label character values solved linearly from word coefficient
    targets: chi(c_r[t][x]) = target(r)[t, x]."""
    labs = [(n, k, a)
            for n in range(max_word + 1) if algebra.dim(n) > 0
            for k in range(algebra.dim(n)) for a in range(n + 1)]
    idx = {lab: c for c, lab in enumerate(labs)}
    rows, rhs = [], []
    row = np.zeros(len(labs), dtype=np.complex128)
    row[idx[(0, 0, 0)]] = 1.0
    rows.append(row)
    rhs.append(1.0)
    for r in range(1, max_word + 1):
        mm = multiplicity_map(algebra, ObjectWord(r))
        tg = target(r)
        for t in range(algebra.functor.dim(r)):
            for x in range(2 ** r):
                row = np.zeros(len(labs), dtype=np.complex128)
                for lab, c in mm.entries[t][x].items():
                    row[idx[(lab.n, lab.i, lab.a)]] += c
                rows.append(row)
                rhs.append(tg[t, x])
    a = np.stack(rows)
    b = np.array(rhs)
    v, *_ = np.linalg.lstsq(a, b, rcond=None)
    assert np.linalg.norm(a @ v - b) <= 1e-9
    return {lab: v[i] for lab, i in idx.items()}


# ----------------------------------------------------------------- family


def test_weight_zero_family_passes_all_conditions():
    rep = check_family(WZ_FAM, MU, max_len=5)
    assert rep.ok()
    for key in ("unit", "equivariance", "projection_tensor",
                "projection_tensor_mirror", "right_contraction",
                "tensor_product", "conjugation", "middle_insertion",
                "invariant_vectors"):
        assert rep.residuals[key] <= 1e-9


def test_weight_zero_family_across_mu():
    assert check_family(WZ_FAM, 1.0, max_len=4).ok()
    assert check_family(WZ_FAM, 0.3, max_len=4).ok()


def test_full_family_passes():
    assert check_family(full_family(4), MU, max_len=4).ok()


def test_family_validation():
    with pytest.raises(ValueError, match="orthonormal"):
        SubspaceFamily({0: np.eye(1), 1: np.full((2, 1), 1.0)})
    with pytest.raises(ValueError, match="rows"):
        SubspaceFamily({0: np.eye(1), 2: np.eye(2)})
    with pytest.raises(ValueError, match="empty word"):
        SubspaceFamily({1: np.eye(2)})
    with pytest.raises(ValueError, match="no data"):
        WZ_FAM.isometry(9)


def test_check_family_range_guard():
    with pytest.raises(ValueError, match="only covers"):
        check_family(full_family(2), MU, max_len=5)


def _drop_balanced_column(family, r, string):
    iso = dict(family.isometries)
    s = iso[r]
    iso[r] = s[:, [c for c in range(s.shape[1]) if s[string, c] == 0]]
    return SubspaceFamily(iso)


def test_corrupted_family_fails_tensor_condition():
    bad = _drop_balanced_column(weight_zero_family(5), 4, 0b0101)
    rep = check_family(bad, MU, max_len=5)
    assert not rep.ok()
    assert rep.residuals["tensor_product"] >= 0.1
    assert rep.residuals["projection_tensor"] >= 0.1


# --------------------------------------------------------- bracket spaces


def test_bracket_dimensions():
    # circle-equivariant maps pair equal-weight strings: dimensions are
    # sums of products of weight multiplicities
    assert bracket_space(WZ_FAM, 1, 1, MU).dimension == 2
    assert bracket_space(WZ_FAM, 2, 2, MU).dimension == 6
    assert bracket_space(WZ_FAM, 1, 3, MU).dimension == 6
    assert bracket_space(WZ_FAM, 3, 3, MU).dimension == 20
    assert bracket_space(WZ_FAM, 1, 2, MU).dimension == 0
    assert bracket_space(full_family(4), 2, 2, MU).dimension == 16


def test_bracket_contains_hom():
    for p, q in [(1, 1), (2, 2), (1, 3), (0, 2)]:
        bb = bracket_space(WZ_FAM, p, q, MU)
        for t in CAT.hom_space(p, q):
            assert bb.span_residual(t) <= 1e-8
            assert bb.contains(t)


def test_bracket_rejects_outside_arrow():
    bb = bracket_space(WZ_FAM, 1, 1, MU)
    off = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert bb.span_residual(off) >= 0.5
    assert not bb.contains(off)


def test_bracket_closed_under_composition():
    b11 = bracket_space(WZ_FAM, 1, 1, MU)
    b13 = bracket_space(WZ_FAM, 1, 3, MU)
    for t in b11.basis:
        for s in b13.basis:
            assert b13.span_residual(s @ t) <= 1e-8


def test_bracket_closed_under_adjoint():
    b13 = bracket_space(WZ_FAM, 1, 3, MU)
    b31 = bracket_space(WZ_FAM, 3, 1, MU)
    for s in b13.basis:
        assert b31.span_residual(dagger(s)) <= 1e-8


def test_bracket_closed_under_tensor():
    b11 = bracket_space(WZ_FAM, 1, 1, MU)
    b22 = bracket_space(WZ_FAM, 2, 2, MU)
    b33 = bracket_space(WZ_FAM, 3, 3, MU)
    for t in b11.basis:
        for s in b22.basis:
            assert b33.span_residual(np.kron(t, s)) <= 1e-8


def test_bracket_solution_gauge_freedom():
    # rescaling (R, Rbar) -> (cR, Rbar/c) spans the same space
    sol = CAT.conjugate_word(1)
    scaled = ConjugateSolution(sol.object, 2.0 * sol.R, sol.Rbar / 2.0,
                               AntilinearMap(2.0 * sol.j.mat))
    b1 = bracket_space(WZ_FAM, 1, 1, MU)
    b2 = bracket_space(WZ_FAM, 1, 1, MU, solution=scaled)
    p1 = sum(np.outer(b.reshape(-1), np.conj(b.reshape(-1)))
             for b in b1.basis)
    p2 = sum(np.outer(b.reshape(-1), np.conj(b.reshape(-1)))
             for b in b2.basis)
    assert np.abs(p1 - p2).max() <= 1e-8


# ------------------------------------------------------------- characters


def test_character_embedding_torus():
    # the diagonal-circle evaluation: word coefficients go to entries
    # of powers of diag(z, z~)
    alg = build_algebra(EmbeddingFunctor(MU), 2)
    z = np.exp(0.9j)
    g = np.diag([z, np.conj(z)])

    def target(r):
        m = np.eye(1, dtype=np.complex128)
        for _ in range(r):
            m = np.kron(m, g)
        return m

    chi = character_from_values(solve_character(alg, target, 4))
    tr = character_to_transformation(chi, alg, max_word=3)
    assert tr.character_residual <= 1e-8
    assert tr.isometry_residual <= 1e-8
    assert tr.naturality_residual <= 1e-8
    fam = tr.induced_family()
    assert [fam.dim(r) for r in range(4)] == [1, 2, 4, 8]
    assert check_family(fam, MU, max_len=3).ok()


def test_character_weight_zero_sphere():
    # at the classical point the balanced algebra is the sphere; the
    # identity-coset evaluation reads the selection isometry entries
    alg = build_algebra(WeightZeroFunctor(1.0), 2)
    f = alg.functor
    chi = character_from_values(
        solve_character(alg, lambda r: dagger(f.selection(r)), 4))
    tr = character_to_transformation(chi, alg, max_word=3)
    assert tr.isometry_residual <= 1e-8
    assert tr.naturality_residual <= 1e-8
    fam = tr.induced_family()
    assert [fam.dim(r) for r in range(4)] == [1, 0, 2, 0]
    want = weight_zero_family(3)
    for r in range(4):
        assert np.abs(fam.projection(r) - want.projection(r)).max() <= 1e-9
    assert check_family(fam, 1.0, max_len=3).ok()


def test_character_validation_rejects_point_mass():
    alg = build_algebra(WeightZeroFunctor(1.0), 2)
    vals = {(n, k, a): 0.0
            for n in alg.grades for k in range(alg.dim(n))
            for a in range(n + 1)}
    vals[(0, 0, 0)] = 1.0
    vals.update({(4, 0, a): 0.0 for a in range(5)})
    with pytest.raises(ValueError, match="not a \\*-character"):
        character_to_transformation(character_from_values(vals), alg)


def test_character_missing_value_errors():
    alg = build_algebra(WeightZeroFunctor(1.0), 2)
    chi = character_from_values({(0, 0, 0): 1.0})
    with pytest.raises(ValueError, match="no value at"):
        chi(alg.basis_element(2, 0, 0))
