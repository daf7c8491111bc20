import warnings

import numpy as np
import pytest
from hypothesis import given

from cstar_hodge import (
    AlgebraElement,
    AlgebraShape,
    ModuleSpace,
    Morphism,
    ShapeMismatch,
    Submodule,
    Tolerance,
    alg_norm,
    image_projector,
    kernel_projector,
    mod_action,
    mod_norm,
    mod_product,
    morph_adjoint,
    morph_apply,
    morph_compose,
    morph_op_norm,
    orthogonal_complement,
    spectral_parts,
)
from cstar_hodge.operators import NotSelfAdjoint, SpectralGapWarning
from conftest import E, seeds, spaces

M1, M2 = AlgebraShape([1]), AlgebraShape([2])
A2 = ModuleSpace(M1, 2)
SHIFT = Morphism.from_scalar_matrix(A2, A2, [[0, 1], [0, 0]])


def random_morphism(source, target, rng):
    return Morphism(source, target, [
        rng.standard_normal((target.block_size(b), source.block_size(b)))
        + 1j * rng.standard_normal((target.block_size(b), source.block_size(b)))
        for b in range(source.shape.num_blocks)])


def scalar_vec(*values):
    return A2.basis(0) * values[0] + A2.basis(1) * values[1]


def test_apply_examples(rng):
    space = ModuleSpace(AlgebraShape([2, 1]), 3)
    u = space.random(rng)
    assert morph_apply(Morphism.identity(space), u) == u
    assert morph_apply(Morphism.zero(space), u) == space.zero()
    assert morph_apply(SHIFT, scalar_vec(0, 1)) == scalar_vec(1, 0)


def test_apply_space_mismatch(rng):
    with pytest.raises(ShapeMismatch):
        morph_apply(SHIFT, ModuleSpace(M1, 3).random(rng))


def test_entries_roundtrip(rng):
    s, t = ModuleSpace(AlgebraShape([2, 1]), 2), ModuleSpace(AlgebraShape([2, 1]), 3)
    L = random_morphism(s, t, rng)
    assert Morphism.from_entries(s, t, L.entries).blocks[0].tolist() == L.blocks[0].tolist()


def test_action_is_matrix_vector_over_algebra(rng):
    shape = AlgebraShape([2, 1])
    s, t = ModuleSpace(shape, 2), ModuleSpace(shape, 3)
    L, u = random_morphism(s, t, rng), s.random(rng)
    want = [sum((L.entries[j][k] * u.coords[k] for k in range(2)),
                AlgebraElement.zero(shape)) for j in range(3)]
    got = (L @ u).coords
    for w, g in zip(want, got):
        assert g.allclose(w, atol=1e-12)


@given(spaces(), spaces(), seeds)
def test_a_linearity_and_adjoint(s, t, seed):
    if s.shape != t.shape:
        t = ModuleSpace(s.shape, t.rank)
    rng = np.random.default_rng(seed)
    L = random_morphism(s, t, rng)
    u, v = s.random(rng), t.random(rng)
    a = AlgebraElement.random(s.shape, rng)
    scale = (1 + L.op_norm()) * (1 + mod_norm(u)) * (1 + mod_norm(v)) * (1 + alg_norm(a))
    assert mod_norm(L @ mod_action(u, a) - mod_action(L @ u, a)) <= 1e-12 * scale
    lhs, rhs = mod_product(L @ u, v), mod_product(u, morph_adjoint(L) @ v)
    assert alg_norm(lhs - rhs) <= 1e-12 * scale
    assert morph_adjoint(morph_adjoint(L)).blocks[0].tolist() == L.blocks[0].tolist()


def test_adjoint_examples():
    space = ModuleSpace(M2, 1)
    one = Morphism.identity(space)
    assert (morph_adjoint(one) - one).op_norm() == 0
    L = Morphism.from_entries(space, space, [[E(2, 1, 2)]])
    assert morph_adjoint(L).entries[0][0] == E(2, 2, 1)
    assert np.array_equal(morph_adjoint(SHIFT).blocks[0], np.array([[0, 0], [1, 0]]))


def test_compose_examples(rng):
    space = ModuleSpace(AlgebraShape([2]), 2)
    L = random_morphism(space, space, rng)
    one, zero = Morphism.identity(space), Morphism.zero(space)
    assert (morph_compose(L, one) - L).op_norm() == 0
    assert morph_compose(L, zero).op_norm() == 0
    assert morph_compose(SHIFT, SHIFT).op_norm() == 0
    K = random_morphism(space, space, rng)
    assert ((L @ K).H - K.H @ L.H).op_norm() <= 1e-12 * L.op_norm() * K.op_norm()


def test_compose_mismatch():
    with pytest.raises(ShapeMismatch):
        morph_compose(SHIFT, Morphism.zero(ModuleSpace(M1, 3)))


def test_op_norm_examples(rng):
    assert morph_op_norm(Morphism.identity(A2)) == pytest.approx(1)
    assert morph_op_norm(Morphism.zero(A2)) == 0
    assert morph_op_norm(SHIFT) == pytest.approx(1)
    space = ModuleSpace(AlgebraShape([2, 1]), 2)
    L, K = random_morphism(space, space, rng), random_morphism(space, space, rng)
    assert (L @ K).op_norm() <= L.op_norm() * K.op_norm() * (1 + 1e-12)
    assert L.H.op_norm() == pytest.approx(L.op_norm())


# spectral calculus ------------------------------------------------------------

def test_spectral_parts_examples():
    space = ModuleSpace(AlgebraShape([2, 1]), 2)
    zero = spectral_parts(Morphism.zero(space))
    assert (zero.projector - Morphism.identity(space)).op_norm() == 0
    assert zero.green.op_norm() == 0
    one = spectral_parts(Morphism.identity(space))
    assert one.projector.op_norm() == 0
    assert (one.green - Morphism.identity(space)).op_norm() <= 1e-15
    diag = spectral_parts(Morphism.from_scalar_matrix(A2, A2, np.diag([0.0, 2.0])))
    np.testing.assert_allclose(diag.projector.blocks[0], np.diag([1, 0]), atol=1e-15)
    np.testing.assert_allclose(diag.green.blocks[0], np.diag([0, 0.5]), atol=1e-15)


def test_spectral_parts_rank_zero():
    space = ModuleSpace(M2, 0)
    par = spectral_parts(Morphism.zero(space))
    assert par.projector.blocks[0].shape == (0, 0)
    assert par.max_residual() == 0


def test_spectral_parts_rejects():
    with pytest.raises(ShapeMismatch):
        spectral_parts(Morphism.zero(A2, ModuleSpace(M1, 3)))
    with pytest.raises(NotSelfAdjoint):
        spectral_parts(SHIFT)


def test_spectral_gap_warning():
    L = Morphism.from_scalar_matrix(A2, A2, np.diag([1.0, 5e-9]))
    with pytest.warns(SpectralGapWarning):
        par = spectral_parts(L)
    assert par.ill_separated
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        par = spectral_parts(Morphism.from_scalar_matrix(A2, A2, np.diag([1.0, 0.0])))
    assert not par.ill_separated
    assert par.spectral_gap == pytest.approx(1.0)


@given(spaces(max_rank=4), seeds)
def test_parametrix_properties(space, seed):
    rng = np.random.default_rng(seed)
    K = random_morphism(space, ModuleSpace(space.shape, max(space.rank - 1, 0)), rng)
    L = K.H @ K  # self-adjoint with a kernel
    tol = Tolerance()
    par = spectral_parts(L, tol)
    tau = 1e-9 * (1 + L.op_norm())
    assert par.max_residual() <= tau
    p, g = par.projector, par.green
    assert (g @ L - L @ g).op_norm() <= tau * (1 + g.op_norm())
    assert (p @ L - L @ p).op_norm() <= tau
    u, a = space.random(rng), AlgebraElement.random(space.shape, rng)
    for op in (p, g):
        err = mod_norm(op @ mod_action(u, a) - mod_action(op @ u, a))
        assert err <= 1e-9 * (1 + op.op_norm()) * (1 + mod_norm(u)) * (1 + alg_norm(a))


@given(spaces(max_rank=4), seeds)
def test_kernel_image_resolution(space, seed):
    rng = np.random.default_rng(seed)
    K = random_morphism(space, ModuleSpace(space.shape, max(space.rank - 2, 0)), rng)
    L = K.H @ K
    Pk = kernel_projector(L).projector
    Pi = image_projector(L).projector
    one = Morphism.identity(space)
    assert (Pk + Pi - one).op_norm() <= 1e-8
    assert (Pk @ Pi).op_norm() <= 1e-8


def test_kernel_image_examples(rng):
    space = ModuleSpace(AlgebraShape([2]), 2)
    zero = Morphism.zero(space)
    assert (kernel_projector(zero).projector - Morphism.identity(space)).op_norm() == 0
    assert image_projector(zero).projector.op_norm() == 0
    L = random_morphism(space, space, rng)
    assert kernel_projector(L).projector.op_norm() <= 1e-12
    assert (image_projector(L).projector - Morphism.identity(space)).op_norm() <= 1e-12
    # oracle by hand: Ker shift = Im shift = span (1, 0)
    want = np.diag([1.0, 0.0])
    np.testing.assert_allclose(kernel_projector(SHIFT).projector.blocks[0], want, atol=1e-15)
    np.testing.assert_allclose(image_projector(SHIFT).projector.blocks[0], want, atol=1e-15)
    assert kernel_projector(SHIFT).same_as(image_projector(SHIFT))


def test_rectangular_kernel_and_image(rng):
    s, t = ModuleSpace(AlgebraShape([1, 2]), 4), ModuleSpace(AlgebraShape([1, 2]), 2)
    L = random_morphism(s, t, rng)
    Pk = kernel_projector(L).projector
    Pi = image_projector(L).projector
    assert (L @ Pk).op_norm() <= 1e-9 * L.op_norm()
    assert (Pi @ L - L).op_norm() <= 1e-9 * L.op_norm()
    assert Pk.source == s and Pi.source == t


def test_orthogonal_complement_examples():
    space = ModuleSpace(M2, 2)
    whole = Submodule(Morphism.identity(space))
    zero = Submodule(Morphism.zero(space))
    assert orthogonal_complement(zero).same_as(whole)
    assert orthogonal_complement(whole).same_as(zero)
    S = Submodule(Morphism.from_scalar_matrix(A2, A2, np.full((2, 2), 0.5)))
    want = Submodule(Morphism.from_scalar_matrix(A2, A2, np.array([[0.5, -0.5], [-0.5, 0.5]])))
    assert orthogonal_complement(S).same_as(want)
    assert orthogonal_complement(orthogonal_complement(S)).same_as(S)


@given(spaces(max_rank=4), seeds)
def test_complement_reverses_inclusion(space, seed):
    rng = np.random.default_rng(seed)
    K = random_morphism(space, space, rng)
    W = image_projector(K @ Morphism(space, space, [
        np.diag((np.arange(space.block_size(b)) % 3 != 0).astype(float))
        for b in range(space.shape.num_blocks)]))
    V = image_projector(W.projector @ random_morphism(space, space, rng) @ Morphism(space, space, [
        np.diag((np.arange(space.block_size(b)) % 3 == 1).astype(float))
        for b in range(space.shape.num_blocks)]))
    PV, PW = V.projector, W.projector
    assert (PV @ PW - PV).op_norm() <= 1e-8  # V inside W
    Wc, Vc = orthogonal_complement(W).projector, orthogonal_complement(V).projector
    assert (Wc @ Vc - Wc).op_norm() <= 1e-8
