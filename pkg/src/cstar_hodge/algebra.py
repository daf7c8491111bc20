"""Finite-dimensional C*-algebras realized as direct sums of matrix blocks.

An algebra ``A = M_{n_1}(C) + ... + M_{n_B}(C)`` is described by an
:class:`AlgebraShape`; its elements carry one complex square matrix per block.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class ShapeMismatch(ValueError):
    """Operands live in different algebras or modules."""


@dataclass(frozen=True)
class Tolerance:
    """Relative threshold with an absolute floor.

    ``threshold(scale)`` is ``max(abs, rel * scale)``; every approximate
    comparison in the package goes through it.
    """

    rel: float = 1e-9
    abs: float = 1e-12

    def __post_init__(self):
        if not self.rel > 0:
            raise ValueError(f"relative tolerance must be positive, got {self.rel}")
        if not self.abs >= 0:
            raise ValueError(f"absolute tolerance must be nonnegative, got {self.abs}")

    def threshold(self, scale: float = 1.0) -> float:
        return max(self.abs, self.rel * scale)

    def to_json(self) -> dict:
        return {"rel": self.rel, "abs": self.abs}


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class AlgebraShape:
    block_dims: tuple[int, ...]

    def __init__(self, block_dims: Sequence[int]):
        dims = tuple(int(n) for n in block_dims)
        if not dims:
            raise ValueError("an algebra needs at least one block")
        if any(n < 1 for n in dims):
            raise ValueError(f"block dimensions must be positive, got {dims}")
        object.__setattr__(self, "block_dims", dims)

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def dim(self) -> int:
        """Complex dimension of the algebra."""
        return sum(n * n for n in self.block_dims)

    def __repr__(self):
        return "AlgebraShape(" + " + ".join(f"M{n}" for n in self.block_dims) + ")"


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=complex)
    m.setflags(write=False)
    return m


class AlgebraElement:
    """An element of ``A``: one complex ``n_b x n_b`` matrix per block."""

    __slots__ = ("shape", "blocks")

    def __init__(self, shape: AlgebraShape, blocks: Sequence[np.ndarray]):
        if len(blocks) != shape.num_blocks:
            raise ShapeMismatch(
                f"expected {shape.num_blocks} blocks, got {len(blocks)}")
        frozen = []
        for n, m in zip(shape.block_dims, blocks):
            m = _frozen(m)
            if m.shape != (n, n):
                raise ShapeMismatch(f"block of shape {m.shape}, expected {(n, n)}")
            frozen.append(m)
        self.shape = shape
        self.blocks = tuple(frozen)

    @classmethod
    def zero(cls, shape: AlgebraShape) -> "AlgebraElement":
        return cls(shape, [np.zeros((n, n)) for n in shape.block_dims])

    @classmethod
    def one(cls, shape: AlgebraShape) -> "AlgebraElement":
        return cls(shape, [np.eye(n) for n in shape.block_dims])

    @classmethod
    def scalar(cls, shape: AlgebraShape, c: complex) -> "AlgebraElement":
        return cls(shape, [c * np.eye(n) for n in shape.block_dims])

    @classmethod
    def random(cls, shape: AlgebraShape, rng: np.random.Generator) -> "AlgebraElement":
        return cls(shape, [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                           for n in shape.block_dims])

    def _check(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement) or other.shape != self.shape:
            raise ShapeMismatch(f"{self.shape} vs {getattr(other, 'shape', other)}")

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.shape, [x + y for x, y in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.shape, [x - y for x, y in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AlgebraElement(self.shape, [-x for x in self.blocks])

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return alg_mul(self, other)
        return AlgebraElement(self.shape, [other * x for x in self.blocks])

    def __rmul__(self, c):
        return AlgebraElement(self.shape, [c * x for x in self.blocks])

    @property
    def H(self) -> "AlgebraElement":
        return alg_star(self)

    def norm(self) -> float:
        return alg_norm(self)

    def allclose(self, other: "AlgebraElement", atol: float = 1e-12) -> bool:
        self._check(other)
        return all(np.allclose(x, y, rtol=0, atol=atol) for x, y in zip(self.blocks, other.blocks))

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement) or other.shape != self.shape:
            return NotImplemented
        return all(np.array_equal(x, y) for x, y in zip(self.blocks, other.blocks))

    __hash__ = None

    def __repr__(self):
        return f"AlgebraElement({self.shape!r}, {[b.tolist() for b in self.blocks]})"

    def to_json(self) -> dict:
        return {"blocks": [[[[z.real, z.imag] for z in row] for row in b] for b in self.blocks]}

    @classmethod
    def from_json(cls, data: dict, shape: AlgebraShape | None = None) -> "AlgebraElement":
        blocks = [_complex_matrix(b) for b in data["blocks"]]
        inferred = AlgebraShape([b.shape[0] for b in blocks])
        for b in blocks:
            if b.shape[0] != b.shape[1]:
                raise ShapeMismatch(f"non-square block of shape {b.shape}")
        if shape is not None and shape != inferred:
            raise ShapeMismatch(f"element has {inferred}, expected {shape}")
        return cls(inferred, blocks)


def _complex_matrix(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError("matrices are encoded as rows of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def alg_mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a._check(b)
    return AlgebraElement(a.shape, [x @ y for x, y in zip(a.blocks, b.blocks)])


def alg_star(a: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(a.shape, [x.conj().T for x in a.blocks])


def alg_norm(a: AlgebraElement) -> float:
    """The C*-norm: largest singular value over all blocks."""
    return max(float(np.linalg.norm(x, 2)) for x in a.blocks)


def alg_is_positive(a: AlgebraElement, tol: Tolerance = DEFAULT_TOL) -> bool:
    tau = tol.threshold(alg_norm(a))
    if alg_norm(a - alg_star(a)) > tau:
        return False
    lowest = min(float(np.linalg.eigvalsh((x + x.conj().T) / 2)[0]) for x in a.blocks)
    return lowest >= -tau


def alg_leq(a: AlgebraElement, b: AlgebraElement, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``a <= b`` in the order of hermitian elements."""
    return alg_is_positive(b - a, tol)
