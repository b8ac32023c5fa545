"""Semi-parametric estimation of hidden angular measures.

The angular (spectral) measure at level ``l`` lives on the compact set
``{x : x^(l) = 1}`` — points whose l-th largest component is one.  Two
estimators are provided: a *standard* one that thresholds the per-row l-th
largest raw value, and a *rank* one that first standardizes margins through
anti-ranks.  A change of coordinates maps the atoms onto the unit simplex
of dimension ``d - 1``, where densities can actually be plotted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .data import SampleMatrix, rank_transform, inverse_rank_matrix
from .errors import (
    AllZeroLevelError,
    BadBandwidthError,
    KTooLargeError,
    LevelOutOfRangeError,
    NoAtomsError,
    NoMassError,
    NotInSimplexError,
)

__all__ = [
    "SpectralAtoms",
    "TransformedAtoms",
    "DensityCurve",
    "estimate_spectral_standard",
    "estimate_spectral_rank",
    "phi",
    "transform_T",
    "transform_T_inverse",
    "transform_measure",
    "density_estimate",
]

_WEIGHT_TOL = 1e-12
_POINT_TOL = 1e-9


def _lth_largest_rows(points: np.ndarray, level: int) -> np.ndarray:
    idx = points.shape[1] - level
    return np.partition(points, idx, axis=1)[:, idx]


@dataclass(frozen=True)
class SpectralAtoms:
    """Weighted atoms on ``{x : x^(l) = 1}`` estimating an angular measure.

    ``points`` is ``(m, d)`` with the l-th largest entry of every row equal
    to one (entries may be ``inf`` for measures with mass on lines through
    infinity); ``weights`` sum to one.
    """

    level: int
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise NoAtomsError("need a non-empty (m, d) point array")
        m, d = pts.shape
        if not 1 <= self.level <= d:
            raise LevelOutOfRangeError(f"level {self.level} outside [1, {d}]")
        if w.shape != (m,):
            raise NoAtomsError(f"weights shape {w.shape} does not match {m} atoms")
        if (w <= 0).any():
            raise NoAtomsError("weights must be strictly positive")
        if abs(w.sum() - 1.0) > 1e-9:
            raise NoAtomsError(f"weights sum to {w.sum()!r}, expected 1")
        if np.isnan(pts).any() or (pts < 0).any():
            raise NoAtomsError("atom components must be in [0, inf]")
        lth = _lth_largest_rows(pts, self.level)  # np.partition orders inf correctly
        if not np.all(np.abs(lth - 1.0) <= _POINT_TOL):
            raise NoAtomsError("every atom must have l-th largest component equal to 1")
        pts = pts.copy()
        w = w.copy()
        pts.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def count(self) -> int:
        return self.points.shape[0]

    def has_infinite_atom(self) -> bool:
        return bool(np.isinf(self.points).any())

    def to_records(self) -> list[dict]:
        return [
            {"weight": float(w), "point": [float(v) for v in p]}
            for w, p in zip(self.weights, self.points)
        ]


@dataclass(frozen=True)
class TransformedAtoms:
    """Pushforward of :class:`SpectralAtoms` onto the simplex ``Delta_{d-1}``.

    ``sentinel`` marks atoms that came from points with an infinite
    component; those map to the origin by convention and carry no usable
    direction.
    """

    level: int
    dim: int
    points: np.ndarray
    weights: np.ndarray
    sentinel: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        w = np.asarray(self.weights, dtype=np.float64)
        s = np.asarray(self.sentinel, dtype=bool)
        if pts.ndim != 2 or pts.shape[1] != self.dim - 1:
            raise NoAtomsError(f"expected (m, {self.dim - 1}) points, got {pts.shape}")
        if abs(w.sum() - 1.0) > 1e-9:
            raise NoAtomsError(f"weights sum to {w.sum()!r}, expected 1")
        if (pts < -_POINT_TOL).any() or (pts.sum(axis=1) > 1.0 + _POINT_TOL).any():
            raise NotInSimplexError("transformed atoms must lie in the unit simplex")
        pts, w, s = pts.copy(), w.copy(), s.copy()
        for arr in (pts, w, s):
            arr.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "sentinel", s)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def sentinel_mass(self) -> float:
        return float(self.weights[self.sentinel].sum())

    def to_records(self) -> list[dict]:
        return [
            {"weight": float(w), "point": [float(v) for v in p], "sentinel": bool(s)}
            for w, p, s in zip(self.weights, self.points, self.sentinel)
        ]


@dataclass(frozen=True)
class DensityCurve:
    """Kernel density values on a plotting grid.

    For two-component samples the grid is an ascending vector in [0, 1];
    for three components it is an ``(g, 2)`` lattice over the triangle
    ``{s1, s2 >= 0, s1 + s2 <= 1}``.
    """

    grid: np.ndarray
    values: np.ndarray
    bandwidth: float

    def integral(self) -> float:
        """Quadrature of the curve over its domain (trapezoid / P1 lattice)."""
        if self.grid.ndim == 1:
            return float(np.trapezoid(self.values, self.grid))
        return _simplex_lattice_integral(self.grid, self.values)


def estimate_spectral_standard(sample: SampleMatrix, level: int, k: int) -> SpectralAtoms:
    """Equal-weight atoms ``Z_i / Z_i^(l)`` over rows with ``Z_i^(l)`` in the top k.

    The threshold is the k-th largest of the per-row l-th largest values;
    ties above it are all kept, so the atom count (and the weight
    denominator) can exceed ``k``.
    """
    if not 1 <= level <= sample.d:
        raise LevelOutOfRangeError(f"level {level} outside [1, {sample.d}]")
    if not 1 <= k <= sample.n:
        raise KTooLargeError(f"need 1 <= k <= n, got k={k}, n={sample.n}")
    row_levels = sample.level_values(level)
    order = np.sort(row_levels)[::-1]
    threshold = order[k - 1]
    if threshold <= 0.0:
        raise AllZeroLevelError(
            f"k-th largest level-{level} value is 0; no usable threshold"
        )
    mask = row_levels >= threshold
    kept = sample.values[mask]
    atoms = kept / row_levels[mask][:, None]
    weights = np.full(atoms.shape[0], 1.0 / atoms.shape[0])
    return SpectralAtoms(level=level, points=atoms, weights=weights)


def estimate_spectral_rank(sample: SampleMatrix, level: int, k: int) -> SpectralAtoms:
    """Rank-based analogue of :func:`estimate_spectral_standard`.

    Margins are standardized to ``1/r_i^j`` through anti-ranks first, which
    makes the estimate invariant under strictly increasing componentwise
    transformations of the sample.
    """
    if not 1 <= k <= sample.n:
        raise KTooLargeError(f"need 1 <= k <= n, got k={k}, n={sample.n}")
    rt = rank_transform(sample, level)
    threshold = rt.order_stats[k - 1]
    inverse = inverse_rank_matrix(sample)
    mask = rt.values >= threshold
    atoms = inverse[mask] / rt.values[mask][:, None]
    weights = np.full(atoms.shape[0], 1.0 / atoms.shape[0])
    return SpectralAtoms(level=level, points=atoms, weights=weights)


def _check_simplex(s: np.ndarray) -> None:
    if (s < -_POINT_TOL).any() or s.sum() > 1.0 + _POINT_TOL:
        raise NotInSimplexError(f"point {s!r} is outside the unit simplex")


def phi(s: Iterable[float] | float, level: int) -> float:
    """l-th largest of ``(1 - sum(s), s^1, ..., s^{d-1})`` for simplex point s."""
    arr = np.atleast_1d(np.asarray(s, dtype=np.float64))
    _check_simplex(arr)
    full = np.concatenate([[1.0 - arr.sum()], arr])
    if not 1 <= level <= full.size:
        raise LevelOutOfRangeError(f"level {level} outside [1, {full.size}]")
    return float(np.partition(full, full.size - level)[full.size - level])


def transform_T(theta: Iterable[float], level: int) -> np.ndarray:
    """Map a point with ``x^(l) = 1`` to the simplex: ``(x^2..x^d) / sum(x)``.

    Points with an infinite component map to the origin sentinel.
    """
    arr = np.asarray(theta, dtype=np.float64)
    lth = _lth_largest_rows(arr[None, :], level)[0]
    if abs(lth - 1.0) > _POINT_TOL:
        raise LevelOutOfRangeError(f"point must satisfy x^({level}) = 1, got {lth}")
    if not np.isfinite(arr).all():
        return np.zeros(arr.size - 1)
    return arr[1:] / arr.sum()


def transform_T_inverse(s: Iterable[float] | float, level: int) -> np.ndarray:
    """Inverse simplex map: ``(1 - sum(s), s) / phi(s)``; all-ones sentinel when phi = 0."""
    arr = np.atleast_1d(np.asarray(s, dtype=np.float64))
    _check_simplex(arr)
    value = phi(arr, level)
    full = np.concatenate([[1.0 - arr.sum()], arr])
    if value <= 0.0:
        return np.ones(full.size)
    return full / value


def transform_measure(atoms: SpectralAtoms) -> TransformedAtoms:
    """Push every atom through the simplex map, preserving weights.

    Atoms with infinite components land on the origin and are flagged as
    sentinels; their count is reported rather than hidden.
    """
    pts = atoms.points
    finite = np.isfinite(pts).all(axis=1)
    out = np.zeros((atoms.count, atoms.dim - 1))
    if finite.any():
        out[finite] = pts[finite, 1:] / pts[finite].sum(axis=1)[:, None]
    return TransformedAtoms(
        level=atoms.level,
        dim=atoms.dim,
        points=out,
        weights=atoms.weights.copy(),
        sentinel=~finite,
    )


def _silverman_bandwidth(points: np.ndarray, weights: np.ndarray) -> float:
    n_eff = 1.0 / float((weights**2).sum())
    mean = np.average(points, axis=0, weights=weights)
    var = np.average((points - mean) ** 2, axis=0, weights=weights)
    sigma = float(np.sqrt(var.mean()))
    if sigma <= 0.0:
        sigma = 0.05  # point masses: fall back to a small plotting scale
    return 1.06 * sigma * n_eff ** (-0.2)


def _gaussian_1d(grid: np.ndarray, centers: np.ndarray, weights: np.ndarray, h: float) -> np.ndarray:
    out = np.zeros_like(grid)
    norm = 1.0 / (h * np.sqrt(2.0 * np.pi))
    # chunk the atom axis to bound memory on large atom sets
    step = max(1, int(2_000_000 / max(grid.size, 1)))
    for start in range(0, centers.size, step):
        c = centers[start : start + step]
        w = weights[start : start + step]
        z = (grid[:, None] - c[None, :]) / h
        out += (np.exp(-0.5 * z**2) * w[None, :]).sum(axis=1)
    return out * norm


def _reflected_images_1d(centers: np.ndarray, weights: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    folds = 1 + int(np.ceil(3.0 * h))
    cs, ws = [], []
    for m in range(-folds, folds + 1):
        cs.append(2.0 * m + centers)
        ws.append(weights)
        cs.append(2.0 * m - centers)
        ws.append(weights)
    return np.concatenate(cs), np.concatenate(ws)


def _density_1d(points: np.ndarray, weights: np.ndarray, h: float, grid_size: int) -> DensityCurve:
    # resolve the kernel: at least ~8 grid points per bandwidth
    grid_size = int(max(grid_size, min(int(np.ceil(8.0 / h)) + 1, 200_001)))
    if (grid_size - 1) > 0 and 1.0 / (grid_size - 1) > h:
        raise BadBandwidthError(f"bandwidth {h} too small to resolve on a bounded grid")
    grid = np.linspace(0.0, 1.0, grid_size)
    centers, ws = _reflected_images_1d(points, weights, h)
    values = _gaussian_1d(grid, centers, ws, h)
    return DensityCurve(grid=grid, values=values, bandwidth=h)


def _simplex_lattice(grid_size: int) -> tuple[np.ndarray, np.ndarray]:
    """Lattice points of the triangle plus P1 quadrature weights."""
    g = grid_size
    ij = [(i, j) for i in range(g + 1) for j in range(g + 1 - i)]
    pts = np.array([(i / g, j / g) for i, j in ij])
    index = {pair: p for p, pair in enumerate(ij)}
    cell = 0.5 / (g * g)
    quad = np.zeros(len(ij))
    for i in range(g):
        for j in range(g - i):
            up = (index[(i, j)], index[(i + 1, j)], index[(i, j + 1)])
            for p in up:
                quad[p] += cell / 3.0
            if i + j < g - 1:
                down = (index[(i + 1, j)], index[(i, j + 1)], index[(i + 1, j + 1)])
                for p in down:
                    quad[p] += cell / 3.0
    return pts, quad


def _simplex_lattice_integral(grid: np.ndarray, values: np.ndarray) -> float:
    g = int(round(1.0 / np.min(np.diff(np.unique(grid[:, 0])))))
    _, quad = _simplex_lattice(g)
    return float((values * quad).sum())


def _reflect_triangle(points: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s1, s2 = points[:, 0], points[:, 1]
    hyp = np.column_stack([1.0 - s2, 1.0 - s1])  # reflection across s1 + s2 = 1
    images = [
        points,
        np.column_stack([-s1, s2]),                   # edge s1 = 0
        np.column_stack([s1, -s2]),                   # edge s2 = 0
        hyp,                                          # hypotenuse
        np.column_stack([-s1, -s2]),                  # corner (0, 0)
        np.column_stack([hyp[:, 0], -hyp[:, 1]]),     # corner (1, 0)
        np.column_stack([-hyp[:, 0], hyp[:, 1]]),     # corner (0, 1)
    ]
    pts = np.concatenate(images)
    ws = np.concatenate([weights] * len(images))
    return pts, ws


def _density_2d(points: np.ndarray, weights: np.ndarray, h: float, grid_size: int) -> DensityCurve:
    g = int(min(max(grid_size, 16), 256))
    grid, quad = _simplex_lattice(g)
    centers, ws = _reflect_triangle(points, weights)
    norm = 1.0 / (2.0 * np.pi * h * h)
    values = np.zeros(grid.shape[0])
    step = max(1, int(2_000_000 / max(grid.shape[0], 1)))
    for start in range(0, centers.shape[0], step):
        c = centers[start : start + step]
        w = ws[start : start + step]
        d2 = ((grid[:, None, :] - c[None, :, :]) ** 2).sum(axis=2) / (h * h)
        values += (np.exp(-0.5 * d2) * w[None, :]).sum(axis=1)
    values *= norm
    # corner reflections only approximate the fold-back; rescale any small leak
    total = float((values * quad).sum())
    if total > 0.0 and abs(total - 1.0) > 5e-3:
        values = values / total
    return DensityCurve(grid=grid, values=values, bandwidth=h)


def density_estimate(
    atoms: TransformedAtoms,
    bandwidth: float | str = "auto",
    grid_size: int = 512,
) -> DensityCurve:
    """Boundary-reflected Gaussian KDE of the transformed angular measure.

    Sentinel atoms are excluded and the remaining weights renormalized, so
    the curve integrates to ~1 over its domain.  Supports two components
    (density on [0, 1]) and three (density on the triangle lattice).

    Bandwidth ``"auto"`` uses ``1.06 * sigma * n_eff**(-1/5)`` with the
    weighted standard deviation ``sigma`` and Kish effective atom count.
    """
    if atoms.dim not in (2, 3):
        raise LevelOutOfRangeError(f"density plotting supports d in (2, 3), got d={atoms.dim}")
    keep = ~atoms.sentinel
    if not keep.any():
        raise NoMassError("all atoms are infinite-direction sentinels")
    pts = atoms.points[keep]
    w = atoms.weights[keep]
    w = w / w.sum()

    if bandwidth == "auto":
        h = _silverman_bandwidth(pts, w)
    else:
        h = float(bandwidth)
    if not np.isfinite(h) or h <= 0.0:
        raise BadBandwidthError(f"bandwidth must be a positive number, got {bandwidth!r}")

    if atoms.dim == 2:
        return _density_1d(pts[:, 0], w, h, grid_size)
    return _density_2d(pts, w, h, grid_size)
