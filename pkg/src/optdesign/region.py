"""Experimental regions: hyperrectangles and explicit finite candidate sets."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import InvalidSpec, NonAxisAlignedImage, OutOfRegion

BOUND_TOL = 1e-12


@dataclass(frozen=True)
class Region:
    """Either a box given by per-coordinate bounds or a finite point set.

    Exactly one of (``lower``/``upper``) and ``points`` is set.  Boxes are
    the native region type; finite sets cover restricted experimental
    regions such as a pair of treatment groups.
    """

    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    points: np.ndarray | None = None

    def __post_init__(self):
        if self.points is not None:
            pts = np.atleast_2d(np.asarray(self.points, float))
            if pts.size == 0:
                raise InvalidSpec("finite region needs at least one point")
            object.__setattr__(self, "points", pts)
            object.__setattr__(self, "lower", None)
            object.__setattr__(self, "upper", None)
            return
        lo = np.atleast_1d(np.asarray(self.lower, float))
        hi = np.atleast_1d(np.asarray(self.upper, float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise InvalidSpec("region bounds must be equal-length vectors")
        if np.any(hi <= lo):
            raise InvalidSpec("region upper bounds must exceed lower bounds")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def box(cls, lower, upper) -> "Region":
        return cls(lower=lower, upper=upper)

    @classmethod
    def finite(cls, points) -> "Region":
        return cls(points=points)

    @property
    def is_box(self) -> bool:
        return self.points is None

    @property
    def dim(self) -> int:
        if self.is_box:
            return self.lower.shape[0]
        return self.points.shape[1]

    def contains(self, x, tol: float = BOUND_TOL) -> np.ndarray:
        """Boolean membership for a single point or an (n, dim) array."""
        X = np.atleast_2d(np.asarray(x, float))
        if self.is_box:
            ok = np.all(X >= self.lower - tol, axis=1) & np.all(X <= self.upper + tol, axis=1)
        else:
            d = np.abs(X[:, None, :] - self.points[None, :, :]).max(axis=2)
            ok = d.min(axis=1) <= max(tol, 1e-9)
        return ok if np.asarray(x).ndim > 1 else bool(ok[0])

    def require_inside(self, X, what: str = "point", tol: float = BOUND_TOL) -> None:
        X = np.atleast_2d(np.asarray(X, float))
        ok = self.contains(X, tol=tol)
        if not np.all(ok):
            bad = X[~np.atleast_1d(ok)]
            raise OutOfRegion(f"{what} outside region: {bad.tolist()}")

    def extremal_points(self) -> np.ndarray:
        """Vertices of a box; every point of a finite set."""
        if not self.is_box:
            return self.points.copy()
        corners = list(product(*zip(self.lower, self.upper)))
        return np.array(corners, float)

    def grid(self, per_dim: int, cap: int | None = None) -> np.ndarray:
        """Uniform tensor grid with at most ``cap`` points (finite sets return themselves)."""
        if not self.is_box:
            return self.points.copy()
        n = per_dim
        if cap is not None:
            while n > 2 and n**self.dim > cap:
                n -= 1
        axes = [np.linspace(lo, hi, n) for lo, hi in zip(self.lower, self.upper)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.column_stack([m.ravel() for m in mesh])

    @property
    def volume(self) -> float:
        if not self.is_box:
            raise InvalidSpec("finite region has no volume")
        return float(np.prod(self.upper - self.lower))

    def sample_interior(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.is_box:
            u = rng.random((n, self.dim))
            return self.lower + u * (self.upper - self.lower)
        idx = rng.integers(0, len(self.points), size=n)
        return self.points[idx]

    def map_affine(self, a: np.ndarray, b: np.ndarray) -> "Region":
        """Image region under x -> b + A x.

        Finite sets map pointwise.  Boxes require A to be a generalized
        permutation matrix (one nonzero per row and column) so the image
        stays a box; anything else raises ``NonAxisAlignedImage``.
        """
        a = np.asarray(a, float)
        b = np.asarray(b, float)
        if not self.is_box:
            return Region.finite(self.points @ a.T + b)
        if not _is_generalized_permutation(a):
            raise NonAxisAlignedImage(
                "box region image under a non-coordinatewise-affine map is not a box"
            )
        v1 = self.lower @ a.T + b
        v2 = self.upper @ a.T + b
        return Region.box(np.minimum(v1, v2), np.maximum(v1, v2))


def _is_generalized_permutation(a: np.ndarray, tol: float = 1e-12) -> bool:
    nz = np.abs(a) > tol
    return bool(np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1))
