"""Cochain complexes of free Hilbert A-modules and their Hodge theory.

Degrees outside ``0..N`` read as the zero module, and the differentials into
and out of them as zero maps.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import DEFAULT_TOL, AlgebraShape, ShapeMismatch, Tolerance, alg_norm
from .hilbert import (
    ModuleElement,
    ModuleSpace,
    QuotientModule,
    Submodule,
    mod_norm,
    mod_product,
    quotient_product,
)
from .operators import (
    Morphism,
    Parametrix,
    SpectralGapWarning,
    image_projector,
    kernel_projector,
    spectral_parts,
)


class InvalidComplex(ValueError):
    """``d_{k+1} d_k`` is not zero within tolerance, or spaces do not chain."""

    def __init__(self, message: str, degree: int | None = None):
        super().__init__(message)
        self.degree = degree


class DecompositionError(RuntimeError):
    """Residuals of the Hodge decomposition exceed tolerance."""


class MultiplicityError(RuntimeError):
    """A block kernel dimension is not a multiple of the block size."""


class CochainComplex:
    """``0 -> C^0 -> C^1 -> ... -> C^N -> 0`` with ``C^k = A^{r_k}``."""

    def __init__(self, shape: AlgebraShape, ranks: Sequence[int],
                 differentials: Sequence[Morphism], tol: Tolerance = DEFAULT_TOL,
                 validate: bool = True):
        ranks = [int(r) for r in ranks]
        if not ranks:
            raise InvalidComplex("a complex needs at least one space")
        if len(differentials) != len(ranks) - 1:
            raise InvalidComplex(
                f"{len(ranks)} spaces need {len(ranks) - 1} differentials, "
                f"got {len(differentials)}")
        self.shape = shape
        self.spaces = tuple(ModuleSpace(shape, r) for r in ranks)
        for k, d in enumerate(differentials):
            if d.source != self.spaces[k] or d.target != self.spaces[k + 1]:
                raise InvalidComplex(f"d_{k} does not map C^{k} -> C^{k + 1}", degree=k)
        self.differentials = tuple(differentials)
        self.tol = tol
        if validate:
            self.validate()

    @classmethod
    def zero(cls, shape: AlgebraShape, ranks: Sequence[int],
             tol: Tolerance = DEFAULT_TOL) -> "CochainComplex":
        spaces = [ModuleSpace(shape, r) for r in ranks]
        return cls(shape, ranks, [Morphism.zero(s, t) for s, t in zip(spaces, spaces[1:])], tol)

    @property
    def length(self) -> int:
        return len(self.spaces) - 1

    @property
    def ranks(self) -> list[int]:
        return [s.rank for s in self.spaces]

    def space(self, k: int) -> ModuleSpace:
        if 0 <= k <= self.length:
            return self.spaces[k]
        return ModuleSpace(self.shape, 0)

    def d(self, k: int) -> Morphism:
        """``d_k : C^k -> C^{k+1}``; zero outside the stored range."""
        if 0 <= k < self.length:
            return self.differentials[k]
        return Morphism.zero(self.space(k), self.space(k + 1))

    def square_residuals(self) -> list[float]:
        """Per ``k``, ``|d_{k+1} d_k| / (1 + |d_{k+1}| |d_k|)``."""
        out = []
        for k in range(self.length - 1):
            d0, d1 = self.differentials[k], self.differentials[k + 1]
            out.append((d1 @ d0).op_norm() / (1.0 + d1.op_norm() * d0.op_norm()))
        return out

    def validate(self) -> list[float]:
        res = self.square_residuals()
        tau = self.tol.threshold(1.0)
        for k, r in enumerate(res):
            if r > tau:
                raise InvalidComplex(
                    f"d_{k + 1} d_{k} != 0: relative residual {r:.3e} exceeds {tau:.3e}",
                    degree=k)
        return res

    def with_tolerance(self, tol: Tolerance) -> "CochainComplex":
        return CochainComplex(self.shape, self.ranks, self.differentials, tol)

    def to_json(self) -> dict:
        return {
            "block_dims": list(self.shape.block_dims),
            "ranks": self.ranks,
            "differentials": [d.to_json() for d in self.differentials],
        }

    @classmethod
    def from_json(cls, data: dict, tol: Tolerance = DEFAULT_TOL,
                  validate: bool = True) -> "CochainComplex":
        shape = AlgebraShape(data["block_dims"])
        ranks = [int(r) for r in data["ranks"]]
        spaces = [ModuleSpace(shape, r) for r in ranks]
        raw = data["differentials"]
        if len(raw) != len(ranks) - 1:
            raise ShapeMismatch(f"{len(ranks)} ranks need {len(ranks) - 1} differentials")
        ds = [Morphism.from_json(m, spaces[k], spaces[k + 1]) for k, m in enumerate(raw)]
        return cls(shape, ranks, ds, tol, validate=validate)


def build_laplacians(c: CochainComplex) -> list[Morphism]:
    """``L_k = d_k^* d_k + d_{k-1} d_{k-1}^*`` for ``k = 0..N``."""
    out = []
    for k in range(c.length + 1):
        up, down = c.d(k), c.d(k - 1)
        out.append(up.adjoint() @ up + down @ down.adjoint())
    return out


@dataclass(frozen=True)
class DegreeResult:
    degree: int
    laplacian: Morphism
    parametrix: Parametrix
    harmonic: Morphism
    exact: Morphism
    coexact: Morphism
    kernel_dims: tuple[int, ...]
    multiplicities: tuple[int, ...] | None
    residuals: dict[str, float]


@dataclass(frozen=True)
class HodgeResult:
    complex: CochainComplex
    degrees: tuple[DegreeResult, ...]
    tol: Tolerance

    def __getitem__(self, k: int) -> DegreeResult:
        return self.degrees[k]

    @property
    def multiplicities(self) -> list[tuple[int, ...] | None]:
        return [r.multiplicities for r in self.degrees]

    def max_residual(self) -> float:
        return max(max(r.residuals.values()) for r in self.degrees)

    def to_json(self) -> dict:
        return {
            "tolerance": self.tol.to_json(),
            "block_dims": list(self.complex.shape.block_dims),
            "ranks": self.complex.ranks,
            "complex_residuals": self.complex.square_residuals(),
            "degrees": [
                {
                    "degree": r.degree,
                    "multiplicities": None if r.multiplicities is None else list(r.multiplicities),
                    "kernel_dims": list(r.kernel_dims),
                    "parametrix_residuals": dict(r.parametrix.residuals),
                    "spectral_gap": r.parametrix.spectral_gap,
                    "kernel_cut": r.parametrix.cut,
                    "ill_separated": r.parametrix.ill_separated,
                    "decomposition_residuals": dict(r.residuals),
                }
                for r in self.degrees
            ],
        }


def _multiplicities(kernel_dims: Sequence[int], shape: AlgebraShape,
                    strict: bool) -> tuple[int, ...] | None:
    out = []
    for dim, nb in zip(kernel_dims, shape.block_dims):
        q = dim / nb
        if abs(q - round(q)) > 0.01:
            if strict:
                raise MultiplicityError(
                    f"kernel dimension {dim} in a block of size {nb} is not a whole "
                    "number of free summands")
            return None
        out.append(int(round(q)))
    return tuple(out)


def hodge_decompose(c: CochainComplex, strict: bool = True) -> HodgeResult:
    """Harmonic, exact and coexact projectors for every degree of ``c``.

    Raises :class:`DecompositionError` when any degree misses the tolerance
    and, with ``strict``, :class:`MultiplicityError` when a kernel is not a
    whole number of free summands in some block.
    """
    tol = c.tol
    laps = build_laplacians(c)
    degrees = []
    for k, L in enumerate(laps):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", SpectralGapWarning)
            par = spectral_parts(L, tol)
        for w in caught:
            warnings.warn(f"degree {k}: {w.message}", SpectralGapWarning, stacklevel=2)
        P_h = par.projector
        P_e = image_projector(c.d(k - 1), tol).projector
        P_c = image_projector(c.d(k).adjoint(), tol).projector
        one = Morphism.identity(c.space(k))
        scale = 1.0 + L.op_norm()
        residuals = {
            **{f"{name} rel": val / scale for name, val in par.residuals.items()},
            "p^2-p rel": par.idempotency / scale,
            "resolution": (P_h + P_e + P_c - one).op_norm(),
            "harm*exact": (P_h @ P_e).op_norm(),
            "harm*coexact": (P_h @ P_c).op_norm(),
            "exact*coexact": (P_e @ P_c).op_norm(),
            "image_split": ((one - P_h) - P_e - P_c).op_norm(),
        }
        degrees.append(DegreeResult(
            degree=k, laplacian=L, parametrix=par, harmonic=P_h, exact=P_e, coexact=P_c,
            kernel_dims=par.kernel_dims,
            multiplicities=_multiplicities(par.kernel_dims, c.shape, strict),
            residuals=residuals,
        ))
    result = HodgeResult(c, tuple(degrees), tol)
    worst = result.max_residual()
    if worst > tol.threshold(1.0):
        raise DecompositionError(f"Hodge residual {worst:.3e} exceeds tolerance")
    return result


@dataclass(frozen=True)
class ElementDecomposition:
    harmonic: ModuleElement
    exact: ModuleElement
    coexact: ModuleElement
    exact_witness: ModuleElement
    coexact_witness: ModuleElement
    reconstruction_error: float
    orthogonality: dict[str, float]


def _check_degree(h: HodgeResult, k: int):
    if not 0 <= k <= h.complex.length:
        raise IndexError(f"degree {k} outside 0..{h.complex.length}")


def decompose_element(h: HodgeResult, k: int, x: ModuleElement) -> ElementDecomposition:
    """``x = p x + d_{k-1} a + d_k^* b`` with ``a = d_{k-1}^* g x``, ``b = d_k g x``."""
    _check_degree(h, k)
    c = h.complex
    if x.space != c.space(k):
        raise ShapeMismatch(f"element of {x.space} is not in C^{k} = {c.space(k)}")
    r = h[k]
    gx = r.parametrix.green @ x
    harmonic = r.harmonic @ x
    a = c.d(k - 1).adjoint() @ gx
    b = c.d(k) @ gx
    exact = c.d(k - 1) @ a
    coexact = c.d(k).adjoint() @ b
    err = mod_norm(x - harmonic - exact - coexact)
    orth = {
        "harm,exact": alg_norm(mod_product(harmonic, exact)),
        "harm,coexact": alg_norm(mod_product(harmonic, coexact)),
        "exact,coexact": alg_norm(mod_product(exact, coexact)),
    }
    return ElementDecomposition(harmonic, exact, coexact, a, b, err, orth)


@dataclass(frozen=True)
class SplittingReport:
    degree: int
    residuals: dict[str, float]
    tau: float

    @property
    def ok(self) -> bool:
        return all(v <= self.tau for v in self.residuals.values())


def kernel_splittings(h: HodgeResult, k: int) -> SplittingReport:
    """Projector identities for the kernels of ``d_k`` and ``d_k^*``.

    ``Ker d_k = Ker L_k + Im d_{k-1}``, ``Ker d_k^* = Ker L_{k+1} + Im d_{k+1}^*``
    and ``Ker L_k = Ker d_k  intersect  Ker d_{k-1}^*``, the last one through the
    product of the two (commuting) kernel projectors.
    """
    _check_degree(h, k)
    c, tol = h.complex, h.tol
    r = h[k]
    K_d = kernel_projector(c.d(k), tol).projector
    K_dstar = kernel_projector(c.d(k).adjoint(), tol).projector
    K_prev_star = kernel_projector(c.d(k - 1).adjoint(), tol).projector
    if k + 1 <= c.length:
        nxt = h[k + 1]
        upper = (K_dstar - nxt.harmonic - nxt.coexact).op_norm()
    else:
        upper = K_dstar.op_norm()  # C^{k+1} = 0
    residuals = {
        "ker_d=harm+exact": (K_d - r.harmonic - r.exact).op_norm(),
        "ker_d*=harm'+coexact'": upper,
        "ker_d,ker_d*_prev commute": (K_d @ K_prev_star - K_prev_star @ K_d).op_norm(),
        "harm=ker_d.ker_d*_prev": (r.harmonic - K_d @ K_prev_star).op_norm(),
    }
    return SplittingReport(k, residuals, tol.threshold(1.0))


@dataclass(frozen=True)
class Cohomology:
    """``H^k`` realized as ``Ker L_k`` with the map ``[x] -> p_k x``."""

    degree: int
    harmonic: Submodule
    multiplicities: tuple[int, ...] | None
    kernel_dims: tuple[int, ...]
    quotient: QuotientModule
    cocycles: Submodule
    isometry_residual: float

    def represent(self, x: ModuleElement) -> ModuleElement:
        """Harmonic representative of the class of the cocycle ``x``."""
        return self.harmonic.projector @ x


def cohomology(h: HodgeResult, k: int, samples: int = 8,
               rng: np.random.Generator | None = None) -> Cohomology:
    """Cohomology at degree ``k`` with a sampled isometry check.

    The quotient ``Ker d_k / Im d_{k-1}`` carries the product
    ``([x], [y]) = ((1 - P_exact) x, (1 - P_exact) y)``; for cocycles this must
    agree with ``(p_k x, p_k y)``. ``isometry_residual`` is the worst
    disagreement over ``samples`` random cocycle pairs, relative to ``|x||y|``.
    """
    _check_degree(h, k)
    if rng is None:
        rng = np.random.default_rng(k)
    r = h[k]
    tol = h.tol
    space = h.complex.space(k)
    harmonic = Submodule(r.harmonic, tol)
    quotient = QuotientModule(Submodule(r.exact, tol))
    cocycles = kernel_projector(h.complex.d(k), tol)
    worst = 0.0
    for _ in range(samples):
        x = cocycles.projector @ space.random(rng)
        y = cocycles.projector @ space.random(rng)
        lhs = quotient_product(quotient, x, y)
        rhs = mod_product(r.harmonic @ x, r.harmonic @ y)
        scale = max(1.0, mod_norm(x) * mod_norm(y))
        worst = max(worst, alg_norm(lhs - rhs) / scale)
    return Cohomology(k, harmonic, r.multiplicities, r.kernel_dims, quotient, cocycles, worst)


def euler_characteristics(c: CochainComplex, multiplicities: Sequence[Sequence[int]]) -> tuple[list[int], list[int]]:
    """Per block, ``sum (-1)^k r_k n_b`` from the ranks and from the cohomology."""
    chain, homology = [], []
    for b, nb in enumerate(c.shape.block_dims):
        chain.append(sum((-1) ** k * r * nb for k, r in enumerate(c.ranks)))
        homology.append(sum((-1) ** k * m[b] * nb for k, m in enumerate(multiplicities)))
    return chain, homology
