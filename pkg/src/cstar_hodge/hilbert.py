"""Free Hilbert A-modules ``A^n`` and their submodules and quotients.

An element ``u = (u_1, ..., u_n)`` is stored blockwise: for algebra block ``b``
the coordinates are stacked into a ``(n * n_b, n_b)`` complex array ``U_b``.
With this layout the right action is ``U_b a_b``, the A-valued product is
``U_b^* V_b`` and every A-linear map is a plain matrix acting on the left.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    AlgebraElement,
    AlgebraShape,
    ShapeMismatch,
    Tolerance,
)

if TYPE_CHECKING:
    from .operators import Morphism


class InvalidProjector(ValueError):
    """A projector failed ``P = P* = P^2`` within tolerance."""


@dataclass(frozen=True)
class ModuleSpace:
    shape: AlgebraShape
    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError(f"rank must be nonnegative, got {self.rank}")

    def block_size(self, b: int) -> int:
        """Row count of the blockwise realization in block ``b``."""
        return self.rank * self.shape.block_dims[b]

    def zero(self) -> "ModuleElement":
        return ModuleElement(self, [np.zeros((self.block_size(b), n))
                                    for b, n in enumerate(self.shape.block_dims)])

    def random(self, rng: np.random.Generator) -> "ModuleElement":
        return ModuleElement(self, [
            rng.standard_normal((self.block_size(b), n))
            + 1j * rng.standard_normal((self.block_size(b), n))
            for b, n in enumerate(self.shape.block_dims)])

    def basis(self, i: int) -> "ModuleElement":
        """The standard generator ``e_i`` (unit in coordinate ``i``)."""
        coords = [AlgebraElement.zero(self.shape)] * self.rank
        coords[i] = AlgebraElement.one(self.shape)
        return ModuleElement.from_coords(self, coords)

    def to_json(self) -> dict:
        return {"block_dims": list(self.shape.block_dims), "rank": self.rank}

    @classmethod
    def from_json(cls, data: dict) -> "ModuleSpace":
        return cls(AlgebraShape(data["block_dims"]), int(data["rank"]))


class ModuleElement:
    __slots__ = ("space", "blocks")

    def __init__(self, space: ModuleSpace, blocks: Sequence[np.ndarray]):
        if len(blocks) != space.shape.num_blocks:
            raise ShapeMismatch("block count does not match the algebra")
        frozen = []
        for b, (n, x) in enumerate(zip(space.shape.block_dims, blocks)):
            x = np.array(x, dtype=complex)
            if x.shape != (space.block_size(b), n):
                raise ShapeMismatch(
                    f"block {b} has shape {x.shape}, expected {(space.block_size(b), n)}")
            x.setflags(write=False)
            frozen.append(x)
        self.space = space
        self.blocks = tuple(frozen)

    @classmethod
    def from_coords(cls, space: ModuleSpace,
                    coords: Sequence[AlgebraElement]) -> "ModuleElement":
        if len(coords) != space.rank:
            raise ShapeMismatch(f"expected {space.rank} coordinates, got {len(coords)}")
        for c in coords:
            if c.shape != space.shape:
                raise ShapeMismatch(f"coordinate in {c.shape}, expected {space.shape}")
        blocks = []
        for b, n in enumerate(space.shape.block_dims):
            if coords:
                blocks.append(np.vstack([c.blocks[b] for c in coords]))
            else:
                blocks.append(np.zeros((0, n)))
        return cls(space, blocks)

    @property
    def coords(self) -> list[AlgebraElement]:
        dims = self.space.shape.block_dims
        return [AlgebraElement(self.space.shape,
                               [x[i * n:(i + 1) * n] for n, x in zip(dims, self.blocks)])
                for i in range(self.space.rank)]

    def _check(self, other: "ModuleElement"):
        if not isinstance(other, ModuleElement) or other.space != self.space:
            raise ShapeMismatch(f"{self.space} vs {getattr(other, 'space', other)}")

    def __add__(self, other):
        self._check(other)
        return ModuleElement(self.space, [x + y for x, y in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return ModuleElement(self.space, [x - y for x, y in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return ModuleElement(self.space, [-x for x in self.blocks])

    def __mul__(self, a):
        if isinstance(a, AlgebraElement):
            return mod_action(self, a)
        return ModuleElement(self.space, [a * x for x in self.blocks])

    def __rmul__(self, c):
        if isinstance(c, AlgebraElement):
            return NotImplemented
        return ModuleElement(self.space, [c * x for x in self.blocks])

    def norm(self) -> float:
        return mod_norm(self)

    def __eq__(self, other):
        if not isinstance(other, ModuleElement) or other.space != self.space:
            return NotImplemented
        return all(np.array_equal(x, y) for x, y in zip(self.blocks, other.blocks))

    __hash__ = None

    def __repr__(self):
        return f"ModuleElement(rank={self.space.rank}, {self.space.shape!r})"

    def to_json(self) -> dict:
        return {"coords": [c.to_json() for c in self.coords]}

    @classmethod
    def from_json(cls, data: dict, space: ModuleSpace | None = None) -> "ModuleElement":
        coords = [AlgebraElement.from_json(c) for c in data["coords"]]
        if space is None:
            if not coords:
                raise ValueError("cannot infer the algebra of an empty element")
            space = ModuleSpace(coords[0].shape, len(coords))
        return cls.from_coords(space, coords)


def mod_action(u: ModuleElement, a: AlgebraElement) -> ModuleElement:
    """Right action ``(u.a)_i = u_i a``."""
    if a.shape != u.space.shape:
        raise ShapeMismatch(f"{a.shape} acting on module over {u.space.shape}")
    return ModuleElement(u.space, [x @ y for x, y in zip(u.blocks, a.blocks)])


def mod_product(u: ModuleElement, v: ModuleElement) -> AlgebraElement:
    """A-valued product ``(u, v) = sum_i u_i^* v_i``."""
    u._check(v)
    return AlgebraElement(u.space.shape, [x.conj().T @ y for x, y in zip(u.blocks, v.blocks)])


def mod_norm(u: ModuleElement) -> float:
    # |(u,u)|_A is the largest eigenvalue of U_b^* U_b, i.e. sigma_max(U_b)^2
    return max((float(np.linalg.norm(x, 2)) if x.size else 0.0) for x in u.blocks)


class Submodule:
    """Image of a self-adjoint idempotent ``P`` on a free module."""

    def __init__(self, projector: "Morphism", tol: Tolerance = DEFAULT_TOL,
                 check: bool = True):
        if projector.source != projector.target:
            raise InvalidProjector("a projector must be an endomorphism")
        self.ambient = projector.source
        self.projector = projector
        self.tol = tol
        if check:
            sa, idem = self.residuals()
            tau = tol.threshold(1.0)
            if sa > tau or idem > tau:
                raise InvalidProjector(
                    f"|P - P*| = {sa:.3e}, |P^2 - P| = {idem:.3e} exceed {tau:.3e}")

    def residuals(self) -> tuple[float, float]:
        P = self.projector
        return (P - P.adjoint()).op_norm(), (P @ P - P).op_norm()

    def contains(self, v: ModuleElement) -> bool:
        return mod_norm(v - self.projector.apply(v)) <= self.tol.threshold(mod_norm(v))

    def multiplicities(self) -> list[int]:
        """Per-block complex rank of the projector realization (trace of ``P_b``)."""
        return [int(round(np.trace(m).real)) for m in self.projector.blocks]

    def same_as(self, other: "Submodule") -> bool:
        return (self.projector - other.projector).op_norm() <= self.tol.threshold(1.0)

    def __repr__(self):
        return f"Submodule(rank={self.ambient.rank}, dims={self.multiplicities()})"


class QuotientModule:
    """``V / U`` for a complementable ``U``; classes are represented by ``(1 - P_U) v``."""

    def __init__(self, divisor: Submodule):
        self.ambient = divisor.ambient
        self.divisor = divisor
        self.complement_projector = divisor.projector.identity_like() - divisor.projector
        self.tol = divisor.tol

    def representative(self, v: ModuleElement) -> ModuleElement:
        return self.complement_projector.apply(v)

    def norm(self, v: ModuleElement) -> float:
        return mod_norm(self.representative(v))


def quotient_product(q: QuotientModule, u: ModuleElement, v: ModuleElement) -> AlgebraElement:
    if u.space != q.ambient or v.space != q.ambient:
        raise ShapeMismatch("elements are not in the ambient module of the quotient")
    return mod_product(q.representative(u), q.representative(v))


@dataclass(frozen=True)
class QuotientNormReport:
    quotient_norm: float
    min_gap: float
    witness: ModuleElement
    witness_residual: float
    samples: int

    def ok(self, tau: float) -> bool:
        return self.min_gap >= -tau and self.witness_residual <= tau


def quotient_norm_check(q: QuotientModule, v: ModuleElement, samples: int = 100,
                        rng: np.random.Generator | None = None) -> QuotientNormReport:
    """Compare the induced quotient norm of ``[v]`` with ``inf_{u in U} |v - u|``.

    Random divisor elements ``u = P w`` give upper bounds for the infimum;
    ``min_gap`` is the smallest observed ``|v - u| - |[v]|``. The infimum is
    attained at ``u = P v``, whose distance from ``|[v]|`` is ``witness_residual``.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    P = q.divisor.projector
    qn = q.norm(v)
    scale = max(1.0, mod_norm(v))
    gap = np.inf
    for _ in range(samples):
        u = P.apply(q.ambient.random(rng) * (scale * rng.uniform(0, 2)))
        gap = min(gap, mod_norm(v - u) - qn)
    witness = P.apply(v)
    return QuotientNormReport(
        quotient_norm=qn,
        min_gap=float(gap),
        witness=witness,
        witness_residual=abs(mod_norm(v - witness) - qn),
        samples=samples,
    )

