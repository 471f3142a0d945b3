"""Synthetic ground truth, noise models, metrics, and Monte-Carlo driver.

The test surface is a sum of anisotropic Gaussian bumps whose gradient is
available in closed form, so reconstructions can be scored against exact
samples.  Three noise models corrupt the gradient: i.i.d. Gaussian,
heteroscedastic Gaussian with radially growing amplitude, and gross outliers
that saturate random pixels at the component maximum.

All randomness flows through numpy's PCG64 generator seeded from explicit
integers, so every table is reproducible bit for bit from its base seed.
"""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass

import numpy as np
import scipy.stats

from . import regparam
from .diffops import DiffMatrix, GradientField, Surface
from .errors import DimensionError, SizeGuardError
from .methods import CovarianceSet, MethodSpec, gradient_misfit, reconstruct

ORACLE_MAX_CELLS = 4096


@dataclass(frozen=True)
class GaussianBump:
    amplitude: float
    center: tuple[float, float]
    shape: np.ndarray  # 2x2 SPD spread matrix

    def __post_init__(self):
        mat = np.asarray(self.shape, dtype=float)
        if mat.shape != (2, 2) or abs(mat[0, 1] - mat[1, 0]) > 1e-12 * max(1.0, np.max(np.abs(mat))):
            raise ValueError("bump shape must be a symmetric 2x2 matrix")
        if mat[0, 0] <= 0 or np.linalg.det(mat) <= 0:
            raise ValueError("bump shape matrix must be positive definite")
        if not np.all(np.isfinite(mat)) or not np.isfinite(self.amplitude):
            raise ValueError("bump parameters must be finite")
        object.__setattr__(self, "shape", mat)


@dataclass(frozen=True)
class BumpSurfaceSpec:
    bumps: tuple[GaussianBump, ...]
    rows: int = 150
    cols: int = 150
    extent: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)  # x0, x1, y0, y1

    def __post_init__(self):
        if self.rows < 2 or self.cols < 2:
            raise DimensionError("bump surface needs at least a 2x2 grid")
        x0, x1, y0, y1 = self.extent
        if not (x1 > x0 and y1 > y0):
            raise ValueError("extent must be increasing in both directions")


def default_bump_spec(rows: int = 150, cols: int = 150) -> BumpSurfaceSpec:
    """Three-bump configuration used throughout the harness.

    The amplitudes, centers, and spreads are fixed documented constants; the
    bumps are wide enough that fourth-order numerical differentiation of the
    sampled surface tracks the analytic gradient to about 1e-4 relative on
    grids of 64 nodes per side and finer.
    """
    bumps = (
        GaussianBump(1.0, (-0.35, -0.30), np.array([[0.120, 0.030], [0.030, 0.080]])),
        GaussianBump(-0.8, (0.40, -0.20), np.array([[0.090, -0.025], [-0.025, 0.070]])),
        GaussianBump(0.6, (0.00, 0.45), np.array([[0.070, 0.015], [0.015, 0.110]])),
    )
    return BumpSurfaceSpec(bumps=bumps, rows=rows, cols=cols)


def bump_surface(spec: BumpSurfaceSpec) -> tuple[Surface, GradientField]:
    """Sample the bump surface and its closed-form gradient on the grid."""
    x0, x1, y0, y1 = spec.extent
    x = np.linspace(x0, x1, spec.cols)
    y = np.linspace(y0, y1, spec.rows)
    xg, yg = np.meshgrid(x, y)
    z = np.zeros_like(xg)
    gx = np.zeros_like(xg)
    gy = np.zeros_like(xg)
    for bump in spec.bumps:
        a, b, c = bump.shape[0, 0], bump.shape[0, 1], bump.shape[1, 1]
        det = a * c - b * b
        ia, ib, ic = c / det, -b / det, a / det
        dxc = xg - bump.center[0]
        dyc = yg - bump.center[1]
        quad = ia * dxc * dxc + 2.0 * ib * dxc * dyc + ic * dyc * dyc
        e = bump.amplitude * np.exp(-0.5 * quad)
        z += e
        gx -= e * (ia * dxc + ib * dyc)
        gy -= e * (ib * dxc + ic * dyc)
    hx = (x1 - x0) / (spec.cols - 1)
    hy = (y1 - y0) / (spec.rows - 1)
    return Surface(z, hx, hy), GradientField(gx, gy, hx, hy)


_NOISE_KINDS = ("iid", "heteroscedastic_radial", "outliers")


@dataclass(frozen=True)
class NoiseSpec:
    """Noise model: kind, level (sigma fraction or outlier fraction), seed."""

    kind: str
    level: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in _NOISE_KINDS:
            raise ValueError(f"noise kind must be one of {_NOISE_KINDS}, got {self.kind!r}")
        if self.level < 0:
            raise ValueError("noise level must be non-negative")
        if self.kind == "outliers" and self.level > 1:
            raise ValueError("outlier fraction cannot exceed 1")


def _radial_profile(m: int, n: int) -> np.ndarray:
    """Distance from the grid center in index units, normalized to 1 at the corners."""
    dy = np.arange(m) - (m - 1) / 2.0
    dx = np.arange(n) - (n - 1) / 2.0
    r = np.sqrt(dy[:, None] ** 2 + dx[None, :] ** 2)
    rmax = r.max()
    return r / rmax if rmax > 0 else r


def add_noise(g: GradientField, spec: NoiseSpec) -> GradientField:
    """Corrupt a gradient field; deterministic given the spec's seed.

    iid: adds zero-mean Gaussian noise with sigma = level * max|component|,
    per component.  heteroscedastic_radial: the same but with sigma ramping
    linearly from 0 at the grid center to its full value at the farthest
    corner.  outliers: overwrites floor(level * m * n) pixel positions per
    component (sampled without replacement, independently per component)
    with that component's maximum value.
    """
    if spec.level == 0:
        return g
    rng = np.random.default_rng(spec.seed)
    amp_x = float(np.max(np.abs(g.zx)))
    amp_y = float(np.max(np.abs(g.zy)))
    if spec.kind == "iid":
        zx = g.zx + rng.normal(0.0, spec.level * amp_x, g.zx.shape)
        zy = g.zy + rng.normal(0.0, spec.level * amp_y, g.zy.shape)
    elif spec.kind == "heteroscedastic_radial":
        ramp = _radial_profile(g.m, g.n)
        zx = g.zx + rng.normal(size=g.zx.shape) * (spec.level * amp_x * ramp)
        zy = g.zy + rng.normal(size=g.zy.shape) * (spec.level * amp_y * ramp)
    else:
        count = int(spec.level * g.m * g.n)
        zx = g.zx.copy()
        zy = g.zy.copy()
        flat_x = rng.choice(g.m * g.n, size=count, replace=False)
        flat_y = rng.choice(g.m * g.n, size=count, replace=False)
        zx.flat[flat_x] = np.max(g.zx)
        zy.flat[flat_y] = np.max(g.zy)
    return GradientField(zx, zy, g.hx, g.hy)


def radial_covariance_set(g: GradientField) -> CovarianceSet:
    """Diagonal covariances approximating the radial noise ramp.

    The radial variance field v_ij = (dy_i^2 + dx_j^2) / r_max^2 is not
    separable; its best rank-one surrogate (row means times column means over
    the grand mean) gives per-row and per-column diagonal factors whose
    product matches the marginal profiles.  The overall scale is irrelevant
    to the weighted solution, so only the x/y component amplitudes enter.
    """
    dy = np.arange(g.m) - (g.m - 1) / 2.0
    dx = np.arange(g.n) - (g.n - 1) / 2.0
    r_sq_max = dy.max() ** 2 + dx.max() ** 2
    row = (dy**2 + np.mean(dx**2)) / r_sq_max
    col = (np.mean(dy**2) + dx**2) / r_sq_max
    grand = np.sqrt((np.mean(dy**2) + np.mean(dx**2)) / r_sq_max)
    amp_x = float(np.max(np.abs(g.zx))) or 1.0
    amp_y = float(np.max(np.abs(g.zy))) or 1.0
    return CovarianceSet(
        xy=np.diag(amp_x * row / grand),
        xx=np.diag(amp_x * col / grand),
        yy=np.diag(amp_y * row / grand),
        yx=np.diag(amp_y * col / grand),
    )


def boundary_frame(z) -> np.ndarray:
    """Grid holding z's boundary frame with a zero interior.

    The usual input for a boundary-constrained reconstruction when the true
    edge heights are known.
    """
    heights = z.heights if isinstance(z, Surface) else np.asarray(z, dtype=float)
    frame = np.zeros_like(heights)
    frame[0, :] = heights[0, :]
    frame[-1, :] = heights[-1, :]
    frame[:, 0] = heights[:, 0]
    frame[:, -1] = heights[:, -1]
    return frame


def oracle_gls(g: GradientField, dx: DiffMatrix, dy: DiffMatrix) -> Surface:
    """Brute-force least-squares reconstruction via the stacked dense system.

    Builds the full 2mn-by-mn Kronecker coefficient matrix and returns the
    minimum-norm solution, mean-aligned.  This is the O((mn)^3) reference
    implementation; it refuses grids beyond the size guard rather than grind
    for hours.
    """
    if g.m * g.n > ORACLE_MAX_CELLS:
        raise SizeGuardError(
            f"oracle limited to {ORACLE_MAX_CELLS} cells, got {g.m}x{g.n}"
        )
    if dx.n != g.n or dy.n != g.m:
        raise DimensionError("operator sizes must match the gradient grid")
    eye_m = np.eye(g.m)
    eye_n = np.eye(g.n)
    coeff = np.vstack([np.kron(dx.entries, eye_m), np.kron(eye_n, dy.entries)])
    rhs = np.concatenate([g.zx.ravel(order="F"), g.zy.ravel(order="F")])
    sol, _, _, _ = np.linalg.lstsq(coeff, rhs, rcond=None)
    z = sol.reshape((g.m, g.n), order="F")
    return Surface(z - z.mean(), g.hx, g.hy)


@dataclass(frozen=True)
class TrialMetrics:
    """Scores of one reconstruction against truth and measured data."""

    cost_residual: float
    rel_error: float
    ks_statistic: float


def evaluate(z: Surface, z_true: Surface, g_meas: GradientField,
             dx: DiffMatrix, dy: DiffMatrix) -> TrialMetrics:
    """Cost residual, mean-aligned relative error, and residual normality.

    The KS statistic is the distance between the empirical distribution of
    the standardized gradient residuals (both components pooled) and the
    standard normal.
    """
    if z.heights.shape != z_true.heights.shape or z.heights.shape != (g_meas.m, g_meas.n):
        raise DimensionError("surface, truth, and gradient dimensions must agree")
    cost = gradient_misfit(z, g_meas, dx, dy)
    za = z.heights - z.heights.mean()
    ta = z_true.heights - z_true.heights.mean()
    denom = np.linalg.norm(ta)
    rel = float(np.linalg.norm(za - ta) / (denom if denom > 0 else 1.0))
    res = np.concatenate([
        (z.heights @ dx.entries.T - g_meas.zx).ravel(),
        (dy.entries @ z.heights - g_meas.zy).ravel(),
    ])
    sd = res.std()
    if sd > 0:
        ks = float(scipy.stats.kstest((res - res.mean()) / sd, "norm").statistic)
    else:
        ks = 0.0
    return TrialMetrics(cost_residual=float(cost), rel_error=rel, ks_statistic=ks)


@dataclass(frozen=True)
class LCurveTikhonov:
    """Standard-form penalty with the parameter chosen per trial at the
    corner of an L-curve sweep."""

    points: int = 20


def run_method(g: GradientField, dx: DiffMatrix, dy: DiffMatrix,
               spec: MethodSpec | LCurveTikhonov) -> Surface:
    """Reconstruct with a static method spec or a per-trial L-curve sweep."""
    if isinstance(spec, LCurveTikhonov):
        cache = regparam.build_cache(g, dx, dy)
        grid = regparam.default_lambda_grid(cache, spec.points)
        lam = regparam.corner(regparam.l_curve(cache, grid))
        return regparam.reconstruct_from_cache(cache, lam)
    return reconstruct(g, dx, dy, spec)


@dataclass(frozen=True)
class TrialRecord:
    method: str
    level: float
    trial: int
    metrics: TrialMetrics


@dataclass(frozen=True)
class CellStats:
    """Per-(method, level) aggregate over trials."""

    method: str
    level: float
    cost_mean: float
    cost_std: float
    rel_error_mean: float
    rel_error_std: float
    ks_mean: float
    ks_std: float


@dataclass(frozen=True)
class MonteCarloResult:
    cells: tuple[CellStats, ...]
    trials: tuple[TrialRecord, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([
            "method", "level", "cost_mean", "cost_std",
            "rel_error_mean", "rel_error_std", "ks_mean", "ks_std",
        ])
        for cell in self.cells:
            writer.writerow([
                cell.method, repr(cell.level),
                repr(cell.cost_mean), repr(cell.cost_std),
                repr(cell.rel_error_mean), repr(cell.rel_error_std),
                repr(cell.ks_mean), repr(cell.ks_std),
            ])
        return buf.getvalue()


def trial_seed(base_seed: int, level_index: int, trial_index: int) -> int:
    """Derived 64-bit seed for one (level, trial) cell, shared by all methods."""
    seq = np.random.SeedSequence([int(base_seed), int(level_index), int(trial_index)])
    return int(seq.generate_state(1, np.uint64)[0])


def monte_carlo(methods, noise: NoiseSpec, levels, trials: int, base_seed: int,
                surface_spec: BumpSurfaceSpec | None = None,
                order: int = 4) -> MonteCarloResult:
    """Run the full (method, level, trial) grid and aggregate metrics.

    ``methods`` is a sequence of (label, spec) pairs; ``noise`` supplies the
    model kind (its level and seed are overridden per cell).  All methods in
    a cell see the same noisy data, drawn from a seed derived from
    (base_seed, level index, trial index), so runs are reproducible and
    methods directly comparable.  The default fourth-order operators keep the
    discretization error of the non-polynomial test surface well below the
    injected noise.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    spec = surface_spec if surface_spec is not None else default_bump_spec()
    z_true, g_true = bump_surface(spec)
    dx, dy = g_true.operators(order)
    records: list[TrialRecord] = []
    for li, level in enumerate(levels):
        for ti in range(trials):
            cell_noise = NoiseSpec(noise.kind, float(level), trial_seed(base_seed, li, ti))
            g_noisy = add_noise(g_true, cell_noise)
            for label, method in methods:
                z = run_method(g_noisy, dx, dy, method)
                records.append(TrialRecord(
                    method=label, level=float(level), trial=ti,
                    metrics=evaluate(z, z_true, g_noisy, dx, dy),
                ))
    cells = []
    for label, _ in methods:
        for level in levels:
            sample = [r.metrics for r in records
                      if r.method == label and r.level == float(level)]
            cells.append(CellStats(
                method=label, level=float(level),
                cost_mean=statistics.fmean(m.cost_residual for m in sample),
                cost_std=_std([m.cost_residual for m in sample]),
                rel_error_mean=statistics.fmean(m.rel_error for m in sample),
                rel_error_std=_std([m.rel_error for m in sample]),
                ks_mean=statistics.fmean(m.ks_statistic for m in sample),
                ks_std=_std([m.ks_statistic for m in sample]),
            ))
    return MonteCarloResult(cells=tuple(cells), trials=tuple(records))


def _std(values) -> float:
    return float(np.std(np.asarray(values)))
