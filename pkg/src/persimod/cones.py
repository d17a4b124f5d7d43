"""Finite-sample tangent cones, a cone-level coisotropy test, and
Cantor-cube families with their displacement-energy bound.

Unlike the rest of the package this module works in double precision:
secant directions of a sampled set are approximate by nature, so the
scale list, angular resolution, and singular-value threshold are explicit
parameters rather than hidden constants.  Cube corners and the
displacement bound stay exact (Fractions); only point clouds are floats.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "PointCloud",
    "DirectionSet",
    "Hyperplane",
    "ConeParams",
    "Verdict",
    "CubeFamily",
    "standard_symplectic_matrix",
    "contingent",
    "paratingent",
    "cone_coisotropy_test",
    "cantor_cubes",
    "corner_cloud",
    "displacement_bound",
]

CUBE_BUDGET = 10 ** 6

# Direction sets are deduplicated on a rounding grid of this cell size
# (about 1.2 degrees) before any angular test; together with the per-scale
# cap on pair secants this keeps the quadratic paratingent sets small.
# The induced error is far below the default 5-degree resolution.
_QUANT = 0.02
_PAIR_CAP = 200


class PointCloud:
    """Deduplicated finite sample of R^{2n}, coordinates (q_1..q_n, p_1..p_n)."""

    __slots__ = ("points", "dimension")

    def __init__(self, points):
        arr = np.asarray(points, dtype=float)
        if arr.ndim != 2:
            raise ValueError("points must be a 2-D array-like")
        if arr.shape[1] % 2 != 0 or arr.shape[1] < 2:
            raise ValueError("ambient dimension must be even and >= 2")
        if not np.all(np.isfinite(arr)):
            raise ValueError("points must be finite")
        arr = np.unique(arr, axis=0)
        arr.setflags(write=False)
        self.points = arr
        self.dimension = arr.shape[1]

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class DirectionSet:
    """Unit vectors recorded at angular resolution theta_res (degrees)."""

    vectors: np.ndarray
    theta_res: float

    def contains(self, v, theta_deg: Optional[float] = None) -> bool:
        if len(self.vectors) == 0:
            return False
        theta = self.theta_res if theta_deg is None else theta_deg
        v = np.asarray(v, dtype=float)
        v = v / np.linalg.norm(v)
        return bool(np.max(self.vectors @ v) >= math.cos(math.radians(theta)) - 1e-12)


@dataclass(frozen=True)
class Hyperplane:
    """ker <normal, .> for a unit normal."""

    normal: np.ndarray


@dataclass(frozen=True)
class ConeParams:
    scales: Optional[Tuple[float, ...]] = None
    theta_res: float = 5.0
    sv_rel_tol: float = 1e-3
    grid_deg: float = 10.0
    n_scales: int = 9


@dataclass(frozen=True)
class Verdict:
    kind: str  # CoisotropicVacuous | Coisotropic | NotCoisotropic
    witness: Optional[Hyperplane] = None


def standard_symplectic_matrix(n: int) -> np.ndarray:
    """The complex-structure matrix J with J(q, p) = (-p, q)."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def _default_scales(cloud: PointCloud, x: np.ndarray, params: ConeParams) -> List[float]:
    dists = np.linalg.norm(cloud.points - x, axis=1)
    r0 = float(np.max(dists))
    if r0 == 0.0:
        raise ValueError("no secants: the cloud has no point distinct from x")
    return [r0 * 2.0 ** (-j) for j in range(params.n_scales)]


def _quantize(vecs: np.ndarray) -> np.ndarray:
    """Collapse unit vectors onto a rounding grid and renormalize."""
    if len(vecs) == 0:
        return vecs
    cells = np.unique(np.round(vecs / _QUANT), axis=0) * _QUANT
    norms = np.linalg.norm(cells, axis=1)
    keep = norms > 1e-9
    return cells[keep] / norms[keep][:, None]


def _max_dot(candidates: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Row-wise max of candidates @ vecs.T, chunked to bound memory."""
    out = np.full(len(candidates), -1.0)
    for lo in range(0, len(candidates), 2048):
        out[lo:lo + 2048] = (candidates[lo:lo + 2048] @ vecs.T).max(axis=1)
    return out


def _dedupe(vecs: np.ndarray, theta_deg: float) -> np.ndarray:
    cos_t = math.cos(math.radians(theta_deg))
    kept = np.empty_like(vecs)
    k = 0
    for v in vecs:
        if k == 0 or np.max(kept[:k] @ v) < cos_t:
            kept[k] = v
            k += 1
    return kept[:k].copy()


def _persisting(per_scale: List[np.ndarray], theta_deg: float) -> np.ndarray:
    """Directions present (within theta) at every one of the finest
    ceil(half) scales.  per_scale is ordered coarse -> fine."""
    half = (len(per_scale) + 1) // 2
    fine = per_scale[-half:]
    if len(fine[-1]) == 0:
        raise ValueError("empty neighborhood at the finest scale")
    candidates = _quantize(np.concatenate([s for s in fine if len(s)], axis=0))
    cos_t = math.cos(math.radians(theta_deg)) - 1e-12
    keep = np.ones(len(candidates), dtype=bool)
    for s in fine:
        if len(s) == 0:
            return candidates[:0]
        keep &= _max_dot(candidates, s) >= cos_t
    return _dedupe(candidates[keep], theta_deg)


def _cone(cloud: PointCloud, x, params: ConeParams, pairs: bool) -> DirectionSet:
    x = np.asarray(x, dtype=float)
    if x.shape != (cloud.dimension,):
        raise ValueError(f"base point must have dimension {cloud.dimension}")
    scales = list(params.scales) if params.scales is not None else _default_scales(cloud, x, params)
    if any(b >= a for a, b in zip(scales, scales[1:])):
        raise ValueError("scales must be strictly decreasing")
    dists = np.linalg.norm(cloud.points - x, axis=1)
    per_scale = []
    for r in scales:
        pts = cloud.points[(dists > 0) & (dists <= r)]
        if pairs:
            near = cloud.points[dists <= r]
            if len(near) > _PAIR_CAP:
                near = near[np.linspace(0, len(near) - 1, _PAIR_CAP).astype(int)]
            if len(near) >= 2:
                diff = near[:, None, :] - near[None, :, :]
                diff = diff.reshape(-1, cloud.dimension)
                norms = np.linalg.norm(diff, axis=1)
                diff = diff[norms > 0] / norms[norms > 0][:, None]
                secants = np.concatenate([diff, -diff], axis=0)
            else:
                secants = np.zeros((0, cloud.dimension))
        else:
            if len(pts):
                diff = pts - x
                secants = diff / np.linalg.norm(diff, axis=1)[:, None]
            else:
                secants = np.zeros((0, cloud.dimension))
        per_scale.append(_quantize(secants))
    return DirectionSet(_persisting(per_scale, params.theta_res), params.theta_res)


def contingent(cloud: PointCloud, x, scales=None, *, params: Optional[ConeParams] = None) -> DirectionSet:
    """Directions of secants from x into the cloud that persist across the
    finest half of the scale list."""
    params = params or ConeParams()
    if scales is not None:
        params = ConeParams(tuple(float(s) for s in scales), params.theta_res,
                            params.sv_rel_tol, params.grid_deg, params.n_scales)
    return _cone(cloud, x, params, pairs=False)


def paratingent(cloud: PointCloud, x, scales=None, *, params: Optional[ConeParams] = None) -> DirectionSet:
    """Directions of secants between pairs of cloud points near x; closed
    under v -> -v by construction."""
    params = params or ConeParams()
    if scales is not None:
        params = ConeParams(tuple(float(s) for s in scales), params.theta_res,
                            params.sv_rel_tol, params.grid_deg, params.n_scales)
    return _cone(cloud, x, params, pairs=True)


def _sphere_grid(dim: int, step_deg: float, cap: int = 20000) -> List[np.ndarray]:
    """Unit vectors on S^{dim-1}, one per grid cell of step_deg, with
    antipodes identified (a hyperplane normal is a sign-free datum)."""
    if dim == 1:
        return [np.array([1.0])]
    angle_grids = [np.radians(np.arange(0, 180 + step_deg, step_deg))] * (dim - 2)
    last = np.radians(np.arange(0, 180, step_deg))
    out, seen = [], set()
    for combo in itertools.product(*angle_grids, last):
        v = np.zeros(dim)
        sin_prod = 1.0
        for i, a in enumerate(combo):
            v[i] = sin_prod * math.cos(a)
            sin_prod *= math.sin(a)
        v[dim - 1] = sin_prod
        nv = np.linalg.norm(v)
        if nv < 1e-12:
            continue
        v = v / nv
        # canonical sign: first coordinate with |.| > tol is positive
        for c in v:
            if abs(c) > 1e-9:
                if c < 0:
                    v = -v
                break
        key = tuple(np.round(v, 6))
        if key in seen:
            continue
        seen.add(key)
        out.append(v)
        if len(out) >= cap:
            break
    return out


def cone_coisotropy_test(cloud: PointCloud, x, params: Optional[ConeParams] = None) -> Verdict:
    """Decide cone-level coisotropy of the sampled set at x.

    The paratingent span is estimated by singular values; full rank means
    no hyperplane contains the big cone (vacuously coisotropic).  Otherwise
    every unit normal nu orthogonal to the span (axis-aligned candidates
    first, then a grid of the orthogonal sphere) defines a hyperplane
    containing the big cone; its symplectic orthogonal is the line through
    J nu, and coisotropy demands both signs of J nu lie in the small cone.
    A failing normal is re-confirmed against a cone recomputed at halved
    angular resolution before being returned as a witness.
    """
    params = params or ConeParams()
    x = np.asarray(x, dtype=float)
    n2 = cloud.dimension
    big = paratingent(cloud, x, params=params)
    small = contingent(cloud, x, params=params)
    if len(big.vectors) == 0:
        raise ValueError("empty paratingent cone")
    svals = np.linalg.svd(big.vectors, compute_uv=False)
    rank = int(np.sum(svals > params.sv_rel_tol * svals[0]))
    if rank == n2:
        return Verdict("CoisotropicVacuous")
    _, _, vt = np.linalg.svd(big.vectors)
    null_basis = vt[rank:]  # rows span the orthogonal complement
    j_mat = standard_symplectic_matrix(n2 // 2)

    candidates: List[np.ndarray] = []
    for i in range(n2):
        e = np.zeros(n2)
        e[i] = 1.0
        if np.linalg.norm(vt[:rank] @ e) <= 1e-8:
            candidates.append(e)
    for u in _sphere_grid(n2 - rank, params.grid_deg):
        candidates.append(u @ null_basis)

    finer = ConeParams(params.scales, params.theta_res / 2.0,
                       params.sv_rel_tol, params.grid_deg, params.n_scales)
    small_fine = None
    for nu in candidates:
        w = j_mat @ nu
        if small.contains(w) and small.contains(-w):
            continue
        if small_fine is None:
            small_fine = contingent(cloud, x, params=finer)
        if small_fine.contains(w, params.theta_res) and small_fine.contains(-w, params.theta_res):
            continue
        return Verdict("NotCoisotropic", Hyperplane(nu))
    return Verdict("Coisotropic")


@dataclass(frozen=True)
class CubeFamily:
    """Level-k cubes of the 2n-fold product of a middle-excluded Cantor set."""

    cubes: Tuple[Tuple[Tuple[Fraction, ...], Fraction], ...]
    ratio: Fraction
    level: int
    half_dim: int


def _cantor_left_endpoints(a: Fraction, k: int) -> List[Fraction]:
    """Left endpoints of the 2^k level-k intervals of the Cantor set that
    keeps the outer a-fraction at each step."""
    ends = [Fraction(0)]
    for i in range(k):
        step = a ** i * (1 - a)
        ends = ends + [e + step for e in ends]
    return sorted(ends)


def cantor_cubes(a, k: int, n: int) -> CubeFamily:
    """All 2^{2nk} products of level-k Cantor intervals, edge a^k."""
    a = Fraction(a)
    if not 0 < a < Fraction(1, 2):
        raise ValueError("ratio must satisfy 0 < a < 1/2 (disjointness)")
    if k < 1 or n < 1:
        raise ValueError("level and half-dimension must be >= 1")
    count = 2 ** (2 * n * k)
    if count > CUBE_BUDGET:
        raise ValueError(f"cube count {count} exceeds budget {CUBE_BUDGET}")
    ends = _cantor_left_endpoints(a, k)
    edge = a ** k
    cubes = tuple(
        (corner, edge) for corner in itertools.product(ends, repeat=2 * n)
    )
    return CubeFamily(cubes, a, k, n)


def corner_cloud(family: CubeFamily) -> PointCloud:
    """Every corner of every cube in the family, as a float point cloud."""
    dim = 2 * family.half_dim
    total = len(family.cubes) * 2 ** dim
    if total > CUBE_BUDGET:
        raise ValueError(f"corner count {total} exceeds budget {CUBE_BUDGET}")
    pts = []
    for corner, edge in family.cubes:
        for bits in itertools.product((0, 1), repeat=dim):
            pts.append([float(c + b * edge) for c, b in zip(corner, bits)])
    return PointCloud(pts)


def displacement_bound(a, k: int, n: int) -> Fraction:
    """The level-k displacement-energy bound 2^{2nk} * a^k: decreasing in k
    exactly when 2^{2n} a < 1, constant at equality, increasing above."""
    a = Fraction(a)
    if not 0 < a < 1:
        raise ValueError("ratio must lie in (0, 1)")
    if k < 1 or n < 1:
        raise ValueError("level and half-dimension must be >= 1")
    return Fraction(2) ** (2 * n * k) * a ** k
