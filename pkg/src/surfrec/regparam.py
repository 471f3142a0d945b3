"""SVD diagonalization of the standard-form penalized problem.

Computing the SVDs of the two differentiation matrices once turns every
subsequent regularized solve into an elementwise formula over transformed
gradient coefficients, so a whole sweep of regularization parameters (an
L-curve) costs little more than the two decompositions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffops import DiffMatrix, GradientField, Surface
from .errors import DimensionError

_NULL_REL = 1e-10


@dataclass(frozen=True)
class SpectralCache:
    """SVD-derived quantities enabling cheap per-parameter evaluation.

    ``svals_x``/``svals_y`` are the singular values of the x and y operators
    (descending, exactly one numerically zero each); ``right_x``/``right_y``
    the corresponding right singular vectors; ``grad_x_t``/``grad_y_t`` the
    measured gradient components expressed in the transformed coordinates.
    """

    svals_x: np.ndarray
    svals_y: np.ndarray
    right_x: np.ndarray
    right_y: np.ndarray
    grad_x_t: np.ndarray
    grad_y_t: np.ndarray
    hx: float = 1.0
    hy: float = 1.0

    @property
    def shape(self) -> tuple[int, int]:
        return self.grad_x_t.shape

    def _null_pair(self) -> tuple[int | None, int | None]:
        """Indices of the numerically zero singular values, if any."""
        i = int(np.argmin(self.svals_y))
        j = int(np.argmin(self.svals_x))
        i0 = i if self.svals_y[i] <= _NULL_REL * np.max(self.svals_y) else None
        j0 = j if self.svals_x[j] <= _NULL_REL * np.max(self.svals_x) else None
        return i0, j0

    def operator_eigenvalues(self) -> np.ndarray:
        """mu_ij^2 = alpha_j^2 + beta_i^2, the Sylvester operator spectrum."""
        return self.svals_x[None, :] ** 2 + self.svals_y[:, None] ** 2


def build_cache(g: GradientField, dx: DiffMatrix, dy: DiffMatrix) -> SpectralCache:
    """Decompose the operators and transform the measured gradient.

    Cost is dominated by the two SVDs; everything downstream of the cache is
    O(mn) per regularization parameter.
    """
    if dx.n != g.n:
        raise DimensionError(f"x operator has {dx.n} nodes but gradient has {g.n} columns")
    if dy.n != g.m:
        raise DimensionError(f"y operator has {dy.n} nodes but gradient has {g.m} rows")
    ux, sx, vxt = np.linalg.svd(dx.entries)
    uy, sy, vyt = np.linalg.svd(dy.entries)
    return SpectralCache(
        svals_x=sx,
        svals_y=sy,
        right_x=vxt.T,
        right_y=vyt.T,
        grad_x_t=vyt @ g.zx @ ux,
        grad_y_t=uy.T @ g.zy @ vxt.T,
        hx=g.hx,
        hy=g.hy,
    )


def tikhonov_coefficients(cache: SpectralCache, lam: float) -> np.ndarray:
    """Transformed solution coefficients for regularization parameter lam.

    Entrywise m_ij = (beta_i p_ij + alpha_j q_ij) / (alpha_j^2 + beta_i^2 +
    2 lam^2).  The entry where both singular values vanish is the free
    constant of integration; it is pinned to zero, matching the deflated
    solver's convention, so the two solution paths agree.
    """
    if lam < 0:
        raise ValueError("regularization parameter must be non-negative")
    alpha, beta = cache.svals_x, cache.svals_y
    denom = alpha[None, :] ** 2 + beta[:, None] ** 2 + 2.0 * lam * lam
    numer = beta[:, None] * cache.grad_y_t + alpha[None, :] * cache.grad_x_t
    i0, j0 = cache._null_pair()
    if i0 is not None and j0 is not None:
        denom = denom.copy()
        denom[i0, j0] = 1.0
        coeffs = numer / denom
        coeffs[i0, j0] = 0.0
        return coeffs
    return numer / denom


def filter_factors(cache: SpectralCache, lam: float) -> np.ndarray:
    """Spectral attenuation factors f_ij = mu_ij^2 / (mu_ij^2 + 2 lam^2).

    All factors lie in [0, 1]; they are 1 at lam = 0 (plain least squares)
    and fall toward 0 as lam grows.  The doubly-null entry is reported as 0,
    consistent with its coefficient being pinned.
    """
    if lam < 0:
        raise ValueError("regularization parameter must be non-negative")
    mu_sq = cache.operator_eigenvalues()
    denom = mu_sq + 2.0 * lam * lam
    i0, j0 = cache._null_pair()
    if i0 is not None and j0 is not None:
        denom = denom.copy()
        denom[i0, j0] = 1.0
        factors = mu_sq / denom
        factors[i0, j0] = 0.0
        return factors
    return mu_sq / denom


def reconstruct_from_cache(cache: SpectralCache, lam: float) -> Surface:
    """Surface for the given parameter: a weighted sum of rank-one terms."""
    coeffs = tikhonov_coefficients(cache, lam)
    return Surface(
        heights=cache.right_y @ coeffs @ cache.right_x.T,
        hx=cache.hx,
        hy=cache.hy,
    )


def l_curve(cache: SpectralCache, lam_grid) -> list[tuple[float, float, float]]:
    """Points (lam, rho, eta) of the residual/penalty trade-off curve.

    rho is the root of the gradient misfit and eta the solution norm, both
    evaluated in transformed coordinates (the Frobenius norm is invariant
    under the orthonormal change of basis), so each point costs O(mn).
    """
    lams = [float(v) for v in lam_grid]
    if not lams:
        raise ValueError("the parameter grid must not be empty")
    if any(v <= 0 for v in lams) or any(b <= a for a, b in zip(lams, lams[1:])):
        raise ValueError("the parameter grid must be positive and strictly ascending")
    alpha, beta = cache.svals_x, cache.svals_y
    points = []
    for lam in lams:
        coeffs = tikhonov_coefficients(cache, lam)
        rho_sq = (
            np.linalg.norm(coeffs * alpha[None, :] - cache.grad_x_t) ** 2
            + np.linalg.norm(beta[:, None] * coeffs - cache.grad_y_t) ** 2
        )
        eta_sq = np.linalg.norm(coeffs) ** 2
        points.append((lam, float(np.sqrt(rho_sq)), float(np.sqrt(eta_sq))))
    return points


def default_lambda_grid(cache: SpectralCache, count: int = 20) -> np.ndarray:
    """Logarithmic grid spanning [1e-4, 1e+1] times the median operator scale.

    The span brackets the filter-factor transition region for typical
    operators; it is a practical default, not a tuned constant.
    """
    if count < 2:
        raise ValueError("grid needs at least two points")
    scale = float(np.median(np.sqrt(cache.operator_eigenvalues())))
    return np.geomspace(1e-4 * scale, 1e1 * scale, count)


def corner(points) -> float:
    """Parameter at the corner of an L-curve, by discrete curvature.

    Takes the (lam, rho, eta) triples of :func:`l_curve` and returns the grid
    parameter whose log-log point has the largest three-point Menger
    curvature, ties broken toward smaller parameters.  A degenerate curve
    with no curvature anywhere (a straight line in log-log) yields the
    smallest parameter.
    """
    pts = list(points)
    if len(pts) < 5:
        raise ValueError(f"corner detection needs at least 5 points, got {len(pts)}")
    lams = np.array([p[0] for p in pts])
    x = np.log(np.array([p[1] for p in pts]))
    y = np.log(np.array([p[2] for p in pts]))
    curv = np.zeros(len(pts))
    for i in range(1, len(pts) - 1):
        ax, ay = x[i] - x[i - 1], y[i] - y[i - 1]
        bx, by = x[i + 1] - x[i], y[i + 1] - y[i]
        cx, cy = x[i + 1] - x[i - 1], y[i + 1] - y[i - 1]
        area2 = abs(ax * by - ay * bx)
        sides = np.hypot(ax, ay) * np.hypot(bx, by) * np.hypot(cx, cy)
        if sides > 0:
            curv[i] = 2.0 * area2 / sides
    # a curve without curvature at the scale of its own diameter is a
    # straight line up to rounding; fall back to the least damping
    diameter = np.hypot(x.max() - x.min(), y.max() - y.min())
    if np.max(curv) * max(diameter, 1e-300) <= 1e-8:
        return float(lams[0])
    return float(lams[int(np.argmax(curv))])
