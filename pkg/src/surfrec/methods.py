"""Assembly and solution of the reconstruction methods.

Five variants are supported, all reducing to the same symmetric Sylvester
normal equations and differing only in their coefficient blocks and in the
map from the solved parameter matrix back to a height grid:

  gls        unregularized global least squares; mean-free solution
  spectral   truncated generalized Fourier series in an orthonormal basis
  tikhonov   penalized least squares (degree 0, 1, or 2 smoothing operators)
  dirichlet  prescribed heights on the boundary frame; interior solved
  weighted   Mahalanobis-weighted least squares via symmetric square roots
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisSet
from .diffops import DiffMatrix, GradientField, Surface, apply_dx, apply_dy
from .errors import DimensionError
from .sylvester import SylvesterSystem, solve, sym_sqrt


@dataclass(frozen=True)
class Gls:
    """Plain global least squares (no regularization)."""


@dataclass(frozen=True)
class Spectral:
    """Expand the surface in orthonormal bases along y and x.

    Pass complete bases for an exact re-parameterization of the least-squares
    problem, truncated bases for low-pass regularization, or column-sliced
    bases (see ``BasisSet.subset``) for band-pass behaviour.  The
    conventional truncation keeps the lowest half of the functions per axis.
    """

    basis_y: BasisSet
    basis_x: BasisSet


@dataclass(frozen=True)
class Tikhonov:
    """Penalized least squares with parameter lam (and mu for the y-penalty).

    degree 0 penalizes the solution's magnitude (standard form), degree 1 its
    steepness, degree 2 its curvature; the smoothing operators are the
    corresponding powers of the differentiation matrices.  ``reference`` is
    an a-priori surface; omitted, it defaults to the zero surface.  ``mu``
    defaults to ``lam``.
    """

    lam: float
    mu: float | None = None
    degree: int = 0
    reference: np.ndarray | None = None

    def __post_init__(self):
        if self.lam < 0 or (self.mu is not None and self.mu < 0):
            raise ValueError("regularization parameters must be non-negative")
        if self.degree not in (0, 1, 2):
            raise ValueError(f"degree must be 0, 1, or 2, got {self.degree!r}")

    @property
    def mu_value(self) -> float:
        return self.lam if self.mu is None else self.mu


@dataclass(frozen=True)
class Dirichlet:
    """Prescribed boundary heights.

    ``boundary`` is a full m-by-n grid; its frame fixes the surface on the
    boundary, and any nonzero interior entries act as an a-priori offset
    surface from which the solved interior is the deviation.
    """

    boundary: np.ndarray


@dataclass(frozen=True)
class CovarianceSet:
    """Row and column covariances of the gradient noise, all SPD.

    ``xy`` (m-by-m) and ``xx`` (n-by-n) are the covariances of the
    x-derivative down columns and along rows; ``yy`` (m-by-m) and ``yx``
    (n-by-n) the same for the y-derivative.
    """

    xx: np.ndarray
    xy: np.ndarray
    yx: np.ndarray
    yy: np.ndarray

    def __post_init__(self):
        for name in ("xx", "xy", "yx", "yy"):
            mat = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, mat)
            if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
                raise DimensionError(f"covariance {name} must be square, got {mat.shape}")
            scale = max(1.0, np.max(np.abs(mat)))
            if np.max(np.abs(mat - mat.T)) > 1e-10 * scale:
                raise ValueError(f"covariance {name} is not symmetric")
            evals = np.linalg.eigvalsh(mat)
            if evals[0] <= 1e-12 * max(evals[-1], 0.0):
                raise ValueError(f"covariance {name} is not full-rank SPD")

    @classmethod
    def identity(cls, m: int, n: int) -> "CovarianceSet":
        return cls(xx=np.eye(n), xy=np.eye(m), yx=np.eye(n), yy=np.eye(m))


@dataclass(frozen=True)
class Weighted:
    """Covariance-weighted (Mahalanobis) least squares."""

    covariance: CovarianceSet


MethodSpec = Gls | Spectral | Tikhonov | Dirichlet | Weighted


def gradient_misfit(z, g: GradientField, dx: DiffMatrix, dy: DiffMatrix) -> float:
    """Squared Frobenius distance between a surface's gradient and g."""
    zxr = apply_dx(z, dx) - g.zx
    zyr = apply_dy(z, dy) - g.zy
    return float(np.linalg.norm(zxr) ** 2 + np.linalg.norm(zyr) ** 2)


def _check_operators(g: GradientField, dx: DiffMatrix, dy: DiffMatrix):
    if dx.n != g.n:
        raise DimensionError(f"x operator has {dx.n} nodes but gradient has {g.n} columns")
    if dy.n != g.m:
        raise DimensionError(f"y operator has {dy.n} nodes but gradient has {g.m} rows")


def _build_gls(g, dx, dy):
    system = SylvesterSystem(
        a=dy.entries, b=dx.entries, f=g.zy, g=g.zx,
        u=np.ones(g.m), v=np.ones(g.n),
    )
    return system, lambda phi: phi


def _build_spectral(g, dx, dy, spec: Spectral):
    by, bx = spec.basis_y, spec.basis_x
    if by.n != g.m:
        raise DimensionError(f"y basis sampled on {by.n} nodes but grid has {g.m} rows")
    if bx.n != g.n:
        raise DimensionError(f"x basis sampled on {bx.n} nodes but grid has {g.n} columns")
    u = v = None
    if 0 in by.columns and 0 in bx.columns:
        u = np.zeros(by.p)
        u[by.columns.index(0)] = 1.0
        v = np.zeros(bx.p)
        v[bx.columns.index(0)] = 1.0
    system = SylvesterSystem(
        a=dy.left_product(by.entries),
        b=dx.left_product(bx.entries),
        f=g.zy @ bx.entries,
        g=by.entries.T @ g.zx,
        u=u, v=v,
    )
    return system, lambda coeff: by.entries @ coeff @ bx.entries.T


def _build_tikhonov(g, dx, dy, spec: Tikhonov):
    lam, mu, k = spec.lam, spec.mu_value, spec.degree
    if spec.reference is None:
        z0 = np.zeros((g.m, g.n))
    else:
        z0 = np.asarray(spec.reference, dtype=float)
        if z0.shape != (g.m, g.n):
            raise DimensionError(f"reference surface must be {g.m}x{g.n}, got {z0.shape}")
    if k == 0:
        ly, lx = np.eye(g.m), np.eye(g.n)
    else:
        ly = np.linalg.matrix_power(dy.entries, k)
        lx = np.linalg.matrix_power(dx.entries, k)
    # each stacked operator annihilates constants unless it carries a
    # degree-0 penalty with a positive parameter; the Sylvester operator is
    # rank deficient only when both sides do
    deficient = (k >= 1 or mu == 0.0) and (k >= 1 or lam == 0.0)
    system = SylvesterSystem(
        a=np.vstack([dy.entries, mu * ly]),
        b=np.vstack([dx.entries, lam * lx]),
        f=np.vstack([g.zy, mu * (ly @ z0)]),
        g=np.hstack([g.zx, lam * (z0 @ lx.T)]),
        u=np.ones(g.m) if deficient else None,
        v=np.ones(g.n) if deficient else None,
    )
    return system, lambda phi: phi


def _build_dirichlet(g, dx, dy, spec: Dirichlet):
    zb = np.asarray(spec.boundary, dtype=float)
    if zb.shape != (g.m, g.n):
        raise DimensionError(f"boundary grid must be {g.m}x{g.n}, got {zb.shape}")
    if g.m < 3 or g.n < 3:
        raise DimensionError("Dirichlet reconstruction needs an interior, so m, n >= 3")
    # interior selection realized by index slicing rather than explicit
    # permutation matrices
    system = SylvesterSystem(
        a=dy.entries[:, 1:-1],
        b=dx.entries[:, 1:-1],
        f=(g.zy - dy.entries @ zb)[:, 1:-1],
        g=(g.zx - zb @ dx.entries.T)[1:-1, :],
    )

    def embed(interior):
        z = zb.copy()
        z[1:-1, 1:-1] += interior
        return z

    return system, embed


def _build_weighted(g, dx, dy, spec: Weighted):
    cov = spec.covariance
    if cov.xy.shape[0] != g.m or cov.yy.shape[0] != g.m:
        raise DimensionError("row covariances must be m-by-m")
    if cov.xx.shape[0] != g.n or cov.yx.shape[0] != g.n:
        raise DimensionError("column covariances must be n-by-n")
    sqrt_xy, isqrt_xy = sym_sqrt(cov.xy)
    sqrt_yx, isqrt_yx = sym_sqrt(cov.yx)
    _, isqrt_yy = sym_sqrt(cov.yy)
    _, isqrt_xx = sym_sqrt(cov.xx)
    system = SylvesterSystem(
        a=isqrt_yy @ dy.entries @ sqrt_xy,
        b=isqrt_xx @ dx.entries @ sqrt_yx,
        f=isqrt_yy @ g.zy @ isqrt_yx,
        g=isqrt_xy @ g.zx @ isqrt_xx,
        u=isqrt_xy @ np.ones(g.m),
        v=isqrt_yx @ np.ones(g.n),
    )
    return system, lambda phi: sqrt_xy @ phi @ sqrt_yx


def _build(g: GradientField, dx: DiffMatrix, dy: DiffMatrix, spec: MethodSpec):
    _check_operators(g, dx, dy)
    if isinstance(spec, Gls):
        return _build_gls(g, dx, dy)
    if isinstance(spec, Spectral):
        return _build_spectral(g, dx, dy, spec)
    if isinstance(spec, Tikhonov):
        return _build_tikhonov(g, dx, dy, spec)
    if isinstance(spec, Dirichlet):
        return _build_dirichlet(g, dx, dy, spec)
    if isinstance(spec, Weighted):
        return _build_weighted(g, dx, dy, spec)
    raise TypeError(f"unknown method spec {spec!r}")


def assemble(g: GradientField, dx: DiffMatrix, dy: DiffMatrix, spec: MethodSpec) -> SylvesterSystem:
    """Coefficient blocks and null vectors of the method's normal equations."""
    return _build(g, dx, dy, spec)[0]


def reconstruct(g: GradientField, dx: DiffMatrix, dy: DiffMatrix, spec: MethodSpec) -> Surface:
    """Reconstruct a surface from a measured gradient field.

    Solves the method's Sylvester equation (deflated path when the operator
    has its rank-one null space, full-rank path otherwise) and maps the
    parameter matrix back to a height grid.
    """
    system, to_surface = _build(g, dx, dy, spec)
    return Surface(heights=to_surface(solve(system)), hx=g.hx, hy=g.hy)
