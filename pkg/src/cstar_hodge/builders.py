"""Test complexes: simplicial coboundaries, planted-cohomology complexes, group shapes."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .algebra import DEFAULT_TOL, AlgebraShape, Tolerance
from .hilbert import ModuleSpace
from .hodge import CochainComplex
from .operators import Morphism


class InconsistentPlant(ValueError):
    pass


class SimplicialComplex:
    """Abstract simplicial complex on vertices ``0..n-1``, closed under faces.

    Simplices are stored as sorted tuples, grouped by dimension and listed in
    lexicographic order; that order fixes the cochain bases.
    """

    def __init__(self, num_vertices: int, simplices: Iterable[Sequence[int]]):
        if num_vertices < 0:
            raise ValueError("vertex count must be nonnegative")
        closed: set[tuple[int, ...]] = {(v,) for v in range(num_vertices)}
        for s in simplices:
            t = tuple(sorted(int(v) for v in s))
            if not t:
                continue
            if len(set(t)) != len(t):
                raise ValueError(f"simplex {s} repeats a vertex")
            if t[0] < 0 or t[-1] >= num_vertices:
                raise ValueError(f"simplex {s} uses a vertex outside 0..{num_vertices - 1}")
            for r in range(1, len(t) + 1):
                closed.update(combinations(t, r))
        top = max((len(s) for s in closed), default=0)
        self.num_vertices = num_vertices
        self.simplices = tuple(sorted(s for s in closed if len(s) == k + 1)
                               for k in range(top))

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def counts(self) -> list[int]:
        return [len(s) for s in self.simplices]

    def coboundary_matrix(self, k: int) -> np.ndarray:
        """Integer matrix of ``delta_k`` from ``k``- to ``(k+1)``-cochains.

        ``(delta f)(v_0..v_{k+1}) = sum_i (-1)^i f(v_0..^v_i..v_{k+1})``.
        """
        lower, upper = self.simplices[k], self.simplices[k + 1]
        index = {s: i for i, s in enumerate(lower)}
        D = np.zeros((len(upper), len(lower)), dtype=int)
        for row, s in enumerate(upper):
            for i in range(len(s)):
                D[row, index[s[:i] + s[i + 1:]]] = (-1) ** i
        return D

    @classmethod
    def cycle(cls, n: int) -> "SimplicialComplex":
        if n < 3:
            raise ValueError("a cycle graph needs at least 3 vertices")
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def simplex_boundary(cls, d: int) -> "SimplicialComplex":
        """Boundary of the ``d``-simplex, a triangulated ``(d-1)``-sphere."""
        return cls(d + 1, combinations(range(d + 1), d))

    @classmethod
    def tetrahedron_boundary(cls) -> "SimplicialComplex":
        return cls.simplex_boundary(3)

    def to_json(self) -> dict:
        return {"vertices": self.num_vertices,
                "simplices": [list(s) for dim in self.simplices for s in dim]}

    @classmethod
    def from_json(cls, data: dict) -> "SimplicialComplex":
        return cls(int(data["vertices"]), data["simplices"])


def coboundary_complex(K: SimplicialComplex, shape: AlgebraShape, coeff_rank: int = 1,
                       tol: Tolerance = DEFAULT_TOL) -> CochainComplex:
    """Simplicial cochains with coefficients in ``A^m``.

    ``C^k = A^(m * #k-simplices)``, coordinate ``s * m + j`` carrying simplex
    ``s`` and coefficient ``j``; ``d_k`` is ``delta_k`` tensored with the
    identity of ``A^m``.
    """
    if coeff_rank < 1:
        raise ValueError("coefficient rank must be at least 1")
    ranks = [c * coeff_rank for c in K.counts()]
    spaces = [ModuleSpace(shape, r) for r in ranks]
    ds = [Morphism.from_scalar_matrix(spaces[k], spaces[k + 1],
                                      np.kron(K.coboundary_matrix(k), np.eye(coeff_rank)))
          for k in range(K.dim)]
    return CochainComplex(shape, ranks, ds, tol)


def group_algebra_shape(factors: Sequence[int]) -> AlgebraShape:
    """``C*(G)`` for ``G = Z/n_1 x ... x Z/n_k``: one 1x1 block per character."""
    factors = [int(n) for n in factors]
    if not factors:
        raise ValueError("need at least one cyclic factor")
    if any(n < 1 for n in factors):
        raise ValueError(f"cyclic factor orders must be positive, got {factors}")
    return AlgebraShape([1] * prod(factors))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def staircase_ranks(ranks: Sequence[int], planted: Sequence[int]) -> list[int]:
    """Per-degree ranks ``s_k`` of the differentials in one block.

    ``r_k = h_k + s_{k-1} + s_k`` with ``s_{-1} = s_N = 0``.
    """
    if len(ranks) != len(planted):
        raise InconsistentPlant(f"{len(ranks)} ranks but {len(planted)} planted values")
    s, prev = [], 0
    for k, (r, h) in enumerate(zip(ranks, planted)):
        if h < 0:
            raise InconsistentPlant(f"negative multiplicity {h} at degree {k}")
        out = r - h - prev
        if out < 0:
            raise InconsistentPlant(
                f"degree {k}: rank {r} cannot hold {h} harmonic plus {prev} exact summands")
        s.append(out)
        prev = out
    if s[-1] != 0:
        raise InconsistentPlant(
            f"top degree leaves {s[-1]} summands unmatched; the plant violates the "
            "Euler characteristic")
    return s[:-1]


@dataclass(frozen=True)
class PlantedComplex:
    complex: CochainComplex
    planted: tuple[tuple[int, ...], ...]
    unitaries: tuple[tuple[np.ndarray, ...], ...]


def planted_random_complex(shape: AlgebraShape, ranks: Sequence[int],
                           planted: Sequence[Sequence[int]] | None = None,
                           seed: int = 0, spread: float = 1.0,
                           tol: Tolerance = DEFAULT_TOL) -> PlantedComplex:
    """Random complex with prescribed cohomology multiplicities.

    ``planted[k][b]`` is the number of free summands of ``H^k`` in block ``b``.
    Each block gets a staircase of paired coordinates, scaled by weights drawn
    log-uniformly from ``[1/spread, spread]`` (``spread=1`` gives identities),
    conjugated by seeded random unitaries ``d'_k = U_{k+1} d_k U_k^*``.
    When ``planted`` is omitted, every block has zero differentials.
    """
    ranks = [int(r) for r in ranks]
    if any(r < 0 for r in ranks):
        raise InconsistentPlant("ranks must be nonnegative")
    if planted is None:
        planted = [[r] * shape.num_blocks for r in ranks]
    planted = tuple(tuple(int(x) for x in row) for row in planted)
    if len(planted) != len(ranks) or any(len(row) != shape.num_blocks for row in planted):
        raise InconsistentPlant("plant must list one multiplicity per block for every degree")
    if spread < 1:
        raise ValueError("spread must be at least 1")

    rng = np.random.default_rng(seed)
    N = len(ranks)
    spaces = [ModuleSpace(shape, r) for r in ranks]
    d_blocks: list[list[np.ndarray]] = [[] for _ in range(N - 1)]
    unitaries: list[list[np.ndarray]] = [[] for _ in range(N)]
    for b, nb in enumerate(shape.block_dims):
        steps = staircase_ranks(ranks, [planted[k][b] for k in range(N)])
        U = [random_unitary(r * nb, rng) for r in ranks]
        for k in range(N):
            unitaries[k].append(U[k])
        for k, s in enumerate(steps):
            # C^k: [harmonic | paired with C^{k-1} | paired with C^{k+1}]
            src_off = planted[k][b] + (steps[k - 1] if k > 0 else 0)
            tgt_off = planted[k + 1][b]
            S = np.zeros((ranks[k + 1], ranks[k]))
            w = np.exp(rng.uniform(-np.log(spread), np.log(spread), size=s))
            S[tgt_off + np.arange(s), src_off + np.arange(s)] = w
            D = np.kron(S, np.eye(nb))
            d_blocks[k].append(U[k + 1] @ D @ U[k].conj().T)
    ds = [Morphism(spaces[k], spaces[k + 1], d_blocks[k]) for k in range(N - 1)]
    return PlantedComplex(
        CochainComplex(shape, ranks, ds, tol),
        planted,
        tuple(tuple(u) for u in unitaries),
    )


def random_plant(shape: AlgebraShape, ranks: Sequence[int],
                 rng: np.random.Generator) -> list[list[int]]:
    """A consistent plant for ``ranks``, drawn independently per block."""
    N = len(ranks)
    per_block = []
    for _ in shape.block_dims:
        s_prev, h = 0, []
        for k in range(N):
            free = ranks[k] - s_prev
            cap = min(free, ranks[k + 1]) if k + 1 < N else 0
            s = int(rng.integers(0, cap + 1))
            h.append(free - s)
            s_prev = s
        per_block.append(h)
    return [[per_block[b][k] for b in range(shape.num_blocks)] for k in range(N)]


def random_corpus_complex(seed: int, max_block: int = 3, max_blocks: int = 3,
                          max_rank: int = 6, max_length: int = 5,
                          spread: float = 4.0,
                          tol: Tolerance = DEFAULT_TOL) -> PlantedComplex:
    """Random shape, ranks and plant, then :func:`planted_random_complex`."""
    rng = np.random.default_rng([seed, 0xC0C4A1])
    shape = AlgebraShape(rng.integers(1, max_block + 1, size=rng.integers(1, max_blocks + 1)))
    length = int(rng.integers(1, max_length + 1))
    ranks = [int(r) for r in rng.integers(0, max_rank + 1, size=length + 1)]
    plant = random_plant(shape, ranks, rng)
    return planted_random_complex(shape, ranks, plant, seed=seed, spread=spread, tol=tol)
