"""Adjointable morphisms between free modules and their spectral calculus.

A morphism ``A^n -> A^m`` is an ``m x n`` matrix over ``A``. In algebra block
``b`` it is realized as a complex ``(m n_b) x (n n_b)`` matrix whose
``(j, k)`` sub-block is the ``b``-component of entry ``L_jk``. Every such
matrix commutes with the right action, so composition, adjoints and spectral
functions are computed on the realizations directly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import DEFAULT_TOL, AlgebraElement, ShapeMismatch, Tolerance
from .hilbert import ModuleElement, ModuleSpace, Submodule


class NotSelfAdjoint(ValueError):
    pass


class SpectralGapWarning(UserWarning):
    """An eigenvalue sits within a factor 10 of the kernel cut."""


class Morphism:
    __slots__ = ("source", "target", "blocks")

    def __init__(self, source: ModuleSpace, target: ModuleSpace, blocks: Sequence[np.ndarray]):
        if source.shape != target.shape:
            raise ShapeMismatch(f"{source.shape} vs {target.shape}")
        if len(blocks) != source.shape.num_blocks:
            raise ShapeMismatch("block count does not match the algebra")
        frozen = []
        for b, m in enumerate(blocks):
            m = np.array(m, dtype=complex)
            want = (target.block_size(b), source.block_size(b))
            if m.shape != want:
                raise ShapeMismatch(f"block {b} has shape {m.shape}, expected {want}")
            m.setflags(write=False)
            frozen.append(m)
        self.source = source
        self.target = target
        self.blocks = tuple(frozen)

    @classmethod
    def zero(cls, source: ModuleSpace, target: ModuleSpace | None = None) -> "Morphism":
        target = source if target is None else target
        return cls(source, target, [np.zeros((target.block_size(b), source.block_size(b)))
                                    for b in range(source.shape.num_blocks)])

    @classmethod
    def identity(cls, space: ModuleSpace) -> "Morphism":
        return cls(space, space, [np.eye(space.block_size(b))
                                  for b in range(space.shape.num_blocks)])

    @classmethod
    def from_entries(cls, source: ModuleSpace, target: ModuleSpace,
                     entries: Sequence[Sequence[AlgebraElement]]) -> "Morphism":
        m, n = target.rank, source.rank
        if len(entries) != m or any(len(row) != n for row in entries):
            raise ShapeMismatch(f"expected a {m}x{n} matrix of algebra elements")
        blocks = []
        for b, nb in enumerate(source.shape.block_dims):
            M = np.zeros((m * nb, n * nb), dtype=complex)
            for j, row in enumerate(entries):
                for k, a in enumerate(row):
                    if a.shape != source.shape:
                        raise ShapeMismatch(f"entry in {a.shape}, expected {source.shape}")
                    M[j * nb:(j + 1) * nb, k * nb:(k + 1) * nb] = a.blocks[b]
            blocks.append(M)
        return cls(source, target, blocks)

    @classmethod
    def from_scalar_matrix(cls, source: ModuleSpace, target: ModuleSpace,
                           matrix: np.ndarray) -> "Morphism":
        """Morphism whose entries are ``matrix[j, k] * 1``."""
        matrix = np.asarray(matrix)
        if matrix.shape != (target.rank, source.rank):
            raise ShapeMismatch(f"matrix {matrix.shape} vs {(target.rank, source.rank)}")
        return cls(source, target, [np.kron(matrix, np.eye(nb)) for nb in source.shape.block_dims])

    @property
    def entries(self) -> list[list[AlgebraElement]]:
        dims = self.source.shape.block_dims
        return [[AlgebraElement(self.source.shape,
                                [M[j * nb:(j + 1) * nb, k * nb:(k + 1) * nb]
                                 for nb, M in zip(dims, self.blocks)])
                 for k in range(self.source.rank)]
                for j in range(self.target.rank)]

    @property
    def is_endomorphism(self) -> bool:
        return self.source == self.target

    def identity_like(self) -> "Morphism":
        if not self.is_endomorphism:
            raise ShapeMismatch("identity_like needs an endomorphism")
        return Morphism.identity(self.source)

    def apply(self, u: ModuleElement) -> ModuleElement:
        return morph_apply(self, u)

    def adjoint(self) -> "Morphism":
        return morph_adjoint(self)

    H = property(adjoint)

    def op_norm(self) -> float:
        return morph_op_norm(self)

    def __matmul__(self, other):
        if isinstance(other, ModuleElement):
            return morph_apply(self, other)
        return morph_compose(self, other)

    def __add__(self, other):
        return morph_add(self, other)

    def __sub__(self, other):
        return morph_sub(self, other)

    def __neg__(self):
        return morph_scale(self, -1)

    def __mul__(self, c):
        return morph_scale(self, c)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Morphism(A^{self.source.rank} -> A^{self.target.rank}, {self.source.shape!r})"

    def to_json(self) -> dict:
        return {
            "source_rank": self.source.rank,
            "target_rank": self.target.rank,
            "entries": [[a.to_json() for a in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, data: dict, source: ModuleSpace, target: ModuleSpace) -> "Morphism":
        if int(data["source_rank"]) != source.rank or int(data["target_rank"]) != target.rank:
            raise ShapeMismatch(
                f"morphism A^{data['source_rank']} -> A^{data['target_rank']} "
                f"does not fit A^{source.rank} -> A^{target.rank}")
        entries = [[AlgebraElement.from_json(a, source.shape) for a in row]
                   for row in data["entries"]]
        return cls.from_entries(source, target, entries)


def _spectral_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2)) if m.size else 0.0


def morph_apply(L: Morphism, u: ModuleElement) -> ModuleElement:
    if u.space != L.source:
        raise ShapeMismatch(f"element of {u.space} fed to morphism from {L.source}")
    return ModuleElement(L.target, [M @ x for M, x in zip(L.blocks, u.blocks)])


def morph_adjoint(L: Morphism) -> Morphism:
    return Morphism(L.target, L.source, [M.conj().T for M in L.blocks])


def morph_compose(L: Morphism, K: Morphism) -> Morphism:
    """``L o K`` (apply ``K`` first)."""
    if K.target != L.source:
        raise ShapeMismatch(f"cannot compose {L} after {K}")
    return Morphism(K.source, L.target, [x @ y for x, y in zip(L.blocks, K.blocks)])


def _same_spaces(L: Morphism, K: Morphism):
    if L.source != K.source or L.target != K.target:
        raise ShapeMismatch(f"{L} vs {K}")


def morph_add(L: Morphism, K: Morphism) -> Morphism:
    _same_spaces(L, K)
    return Morphism(L.source, L.target, [x + y for x, y in zip(L.blocks, K.blocks)])


def morph_sub(L: Morphism, K: Morphism) -> Morphism:
    _same_spaces(L, K)
    return Morphism(L.source, L.target, [x - y for x, y in zip(L.blocks, K.blocks)])


def morph_scale(L: Morphism, c: complex) -> Morphism:
    return Morphism(L.source, L.target, [c * x for x in L.blocks])


def morph_op_norm(L: Morphism) -> float:
    return max(_spectral_norm(M) for M in L.blocks)


@dataclass(frozen=True)
class Parametrix:
    """Green operator ``g`` and kernel projector ``p`` of a self-adjoint ``L``.

    ``residuals`` holds operator norms of ``gL + p - 1``, ``Lg + p - 1``,
    ``Lp`` and ``p - p*``; ``idempotency`` is ``|p^2 - p|``.
    """

    operator: Morphism
    green: Morphism
    projector: Morphism
    residuals: dict[str, float]
    idempotency: float
    cut: float
    spectral_gap: float | None
    ill_separated: bool
    kernel_dims: tuple[int, ...]
    eigenvalues: tuple[np.ndarray, ...] = field(repr=False)

    def max_residual(self) -> float:
        return max(max(self.residuals.values()), self.idempotency)


def _hermitian_eig(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if M.size == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    return np.linalg.eigh((M + M.conj().T) / 2)


def spectral_parts(L: Morphism, tol: Tolerance = DEFAULT_TOL) -> Parametrix:
    """Split a self-adjoint endomorphism into kernel projector and Green operator.

    Eigenvalues with ``|lambda| <= max(tol.abs, tol.rel * |L|)`` count as kernel.
    ``p`` is the spectral projector onto them and ``g`` inverts ``L`` on the
    rest, so both are functions of ``L`` and inherit A-linearity.
    """
    if not L.is_endomorphism:
        raise ShapeMismatch(f"{L} is not an endomorphism")
    norm = L.op_norm()
    asym = (L - L.adjoint()).op_norm()
    if asym > tol.threshold(norm):
        raise NotSelfAdjoint(f"|L - L*| = {asym:.3e} exceeds {tol.threshold(norm):.3e}")

    eigs = [_hermitian_eig(M) for M in L.blocks]
    lam_max = max((float(np.abs(w).max()) for w, _ in eigs if w.size), default=0.0)
    cut = tol.threshold(lam_max)

    p_blocks, g_blocks, kernel_dims, nonzero = [], [], [], []
    for w, Q in eigs:
        ker = np.abs(w) <= cut
        Qk, Qn = Q[:, ker], Q[:, ~ker]
        p_blocks.append(Qk @ Qk.conj().T)
        g_blocks.append((Qn / w[~ker]) @ Qn.conj().T)
        kernel_dims.append(int(ker.sum()))
        nonzero.extend(np.abs(w[~ker]).tolist())

    gap = min(nonzero) if nonzero else None
    all_abs = np.abs(np.concatenate([w for w, _ in eigs])) if eigs else np.zeros(0)
    near = (all_abs > cut / 10) & (all_abs < cut * 10)
    ill = bool(near.any())
    if ill:
        warnings.warn(
            f"eigenvalue within a factor 10 of the kernel cut {cut:.3e}; "
            "kernel dimension may be unreliable", SpectralGapWarning, stacklevel=2)

    space = L.source
    p = Morphism(space, space, p_blocks)
    g = Morphism(space, space, g_blocks)
    one = Morphism.identity(space)
    residuals = {
        "gL+p-1": (g @ L + p - one).op_norm(),
        "Lg+p-1": (L @ g + p - one).op_norm(),
        "Lp": (L @ p).op_norm(),
        "p-p*": (p - p.adjoint()).op_norm(),
    }
    return Parametrix(
        operator=L, green=g, projector=p, residuals=residuals,
        idempotency=(p @ p - p).op_norm(), cut=cut, spectral_gap=gap,
        ill_separated=ill, kernel_dims=tuple(kernel_dims),
        eigenvalues=tuple(w for w, _ in eigs),
    )


def kernel_projector(L: Morphism, tol: Tolerance = DEFAULT_TOL) -> Submodule:
    """Projector onto ``Ker L``, computed from the spectrum of ``L* L``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SpectralGapWarning)
        parts = spectral_parts(L.adjoint() @ L, tol)
    return Submodule(parts.projector, tol)


def image_projector(L: Morphism, tol: Tolerance = DEFAULT_TOL) -> Submodule:
    """Projector onto ``Im L = (Ker L*)^perp``, computed from ``L L*``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SpectralGapWarning)
        parts = spectral_parts(L @ L.adjoint(), tol)
    P = parts.projector
    return Submodule(P.identity_like() - P, tol)


def orthogonal_complement(S: Submodule) -> Submodule:
    P = S.projector
    return Submodule(P.identity_like() - P, S.tol)
