"""Command-line front end.

Subcommands: one per reconstruction method (gls, spectral, tikhonov,
dirichlet, wls), an L-curve sweep (lcurve), the Monte-Carlo driver
(simulate), and a timing benchmark (bench).  Gradient grids are read from
binary or CSV files (see gridio); surfaces and CSV tables are written
atomically.  Every failure class exits nonzero with a one-line diagnostic.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import time

import numpy as np

from . import regparam, simulate
from .basis import make_basis
from .diffops import GradientField, Surface, diff_matrix
from .errors import DimensionError, FormatError, SingularSystemError, SizeGuardError
from .gridio import atomic_write, read_grid, write_grid
from .methods import (
    CovarianceSet, Dirichlet, Gls, Spectral, Tikhonov, Weighted,
    gradient_misfit, reconstruct,
)

_NOISE_FLAGS = {"iid": "iid", "radial": "heteroscedastic_radial", "outliers": "outliers"}


def _load_gradient(args) -> GradientField:
    gx = read_grid(args.zx)
    gy = read_grid(args.zy)
    if gx.values.shape != gy.values.shape:
        raise DimensionError(
            f"gradient grids disagree: {gx.values.shape} vs {gy.values.shape}"
        )
    hx = gx.hx if gx.hx is not None else args.hx
    hy = gx.hy if gx.hy is not None else args.hy
    if gy.hx is not None and (gy.hx != hx or gy.hy != hy):
        raise DimensionError("gradient grids carry different node spacings")
    return GradientField(gx.values, gy.values, hx, hy)


def _write_surface(args, z: Surface) -> None:
    write_grid(args.out, z.heights, z.hx, z.hy)


def _print_cost(g, dx, dy, z) -> None:
    print(f"cost {gradient_misfit(z, g, dx, dy):.17e}")


def _reconstruct_and_report(args, spec) -> int:
    g = _load_gradient(args)
    dx, dy = g.operators(args.order)
    z = reconstruct(g, dx, dy, spec)
    _write_surface(args, z)
    _print_cost(g, dx, dy, z)
    return 0


def _cmd_gls(args) -> int:
    return _reconstruct_and_report(args, Gls())


def _parse_int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip() != ""]


def _cmd_spectral(args) -> int:
    g = _load_gradient(args)
    dx, dy = g.operators(args.order)
    p = args.p if args.p is not None else math.ceil(g.m / 2)
    q = args.q if args.q is not None else math.ceil(g.n / 2)
    by = make_basis(args.basis, g.m, p)
    bx = make_basis(args.basis, g.n, q)
    if args.drop_cols:
        dropped = _parse_int_list(args.drop_cols)
        by = by.drop([c for c in dropped if c < by.p])
        bx = bx.drop([c for c in dropped if c < bx.p])
    z = reconstruct(g, dx, dy, Spectral(basis_y=by, basis_x=bx))
    _write_surface(args, z)
    _print_cost(g, dx, dy, z)
    return 0


def _cmd_tikhonov(args) -> int:
    if args.lcurve == (args.lam is not None):
        raise ValueError("give exactly one of --lambda or --lcurve")
    g = _load_gradient(args)
    dx, dy = g.operators(args.order)
    if args.lcurve:
        cache = regparam.build_cache(g, dx, dy)
        grid = regparam.default_lambda_grid(cache, args.points)
        lam = regparam.corner(regparam.l_curve(cache, grid))
        z = regparam.reconstruct_from_cache(cache, lam)
        print(f"lambda {lam:.17e}")
    else:
        z = reconstruct(g, dx, dy, Tikhonov(lam=args.lam, mu=args.mu, degree=args.degree))
    _write_surface(args, z)
    _print_cost(g, dx, dy, z)
    return 0


def _cmd_dirichlet(args) -> int:
    boundary = read_grid(args.boundary).values
    return _reconstruct_and_report(args, Dirichlet(boundary=boundary))


def _cmd_wls(args) -> int:
    cov = CovarianceSet(
        xx=read_grid(args.cov_xx).values,
        xy=read_grid(args.cov_xy).values,
        yx=read_grid(args.cov_yx).values,
        yy=read_grid(args.cov_yy).values,
    )
    return _reconstruct_and_report(args, Weighted(covariance=cov))


def _write_csv_atomic(path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    atomic_write(path, buf.getvalue().encode())


def _cmd_lcurve(args) -> int:
    g = _load_gradient(args)
    dx, dy = g.operators(args.order)
    cache = regparam.build_cache(g, dx, dy)
    grid = regparam.default_lambda_grid(cache, args.points)
    points = regparam.l_curve(cache, grid)
    _write_csv_atomic(args.out, ["lambda", "rho", "eta"],
                      [[repr(l), repr(r), repr(e)] for l, r, e in points])
    return 0


def _parse_float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip() != ""]


def _cmd_simulate(args) -> int:
    spec = simulate.default_bump_spec(args.rows, args.cols)
    z_true, g_true = simulate.bump_surface(spec)
    m, n = g_true.m, g_true.n
    methods = [
        ("gls", Gls()),
        ("spectral_half", Spectral(
            basis_y=make_basis(args.basis, m, math.ceil(m / 2)),
            basis_x=make_basis(args.basis, n, math.ceil(n / 2)),
        )),
        ("tikhonov_lcurve", simulate.LCurveTikhonov()),
        ("dirichlet_true", Dirichlet(boundary=simulate.boundary_frame(z_true))),
        ("weighted_radial", Weighted(covariance=simulate.radial_covariance_set(g_true))),
    ]
    levels = _parse_float_list(args.levels)
    noise = simulate.NoiseSpec(_NOISE_FLAGS[args.noise], max(levels), args.seed)
    result = simulate.monte_carlo(
        methods, noise, levels, args.trials, args.seed,
        surface_spec=spec, order=args.order,
    )
    atomic_write(args.out, result.to_csv().encode())
    if args.dump:
        g0 = simulate.add_noise(g_true, simulate.NoiseSpec(
            _NOISE_FLAGS[args.noise], levels[0], simulate.trial_seed(args.seed, 0, 0)))
        write_grid(f"{args.dump}_zx.g2s", g0.zx, g0.hx, g0.hy)
        write_grid(f"{args.dump}_zy.g2s", g0.zy, g0.hx, g0.hy)
        write_grid(f"{args.dump}_ztrue.g2s", z_true.heights, z_true.hx, z_true.hy)
    return 0


_BENCH_METHODS = ("gls", "spectral", "tikhonov", "dirichlet", "weighted", "tikhonov_lcurve")


def _bench_spec(name: str, g: GradientField):
    m, n = g.m, g.n
    if name == "gls":
        return Gls()
    if name == "spectral":
        return Spectral(basis_y=make_basis("cosine", m, math.ceil(m / 2)),
                        basis_x=make_basis("cosine", n, math.ceil(n / 2)))
    if name == "tikhonov":
        return Tikhonov(lam=1.0)
    if name == "dirichlet":
        return Dirichlet(boundary=np.zeros((m, n)))
    if name == "weighted":
        return Weighted(covariance=CovarianceSet.identity(m, n))
    if name == "tikhonov_lcurve":
        return simulate.LCurveTikhonov()
    raise ValueError(f"unknown bench method {name!r}")


def run_bench(sizes, repeats: int = 10, seed: int = 0, methods=_BENCH_METHODS,
              order: int = 2) -> list[dict]:
    """Time each method on square random gradients; returns one row per cell.

    Direct solvers run in data-independent time, so random input is as good
    as any.  Each cell reports the mean of `repeats` runs after a warm-up.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for size in sizes:
        g = GradientField(rng.standard_normal((size, size)),
                          rng.standard_normal((size, size)))
        dx = diff_matrix(size, 1.0, order)
        dy = diff_matrix(size, 1.0, order)
        for name in methods:
            spec = _bench_spec(name, g)
            simulate.run_method(g, dx, dy, spec)  # warm-up, untimed
            times = []
            for _ in range(repeats):
                start = time.perf_counter()
                simulate.run_method(g, dx, dy, spec)
                times.append(time.perf_counter() - start)
            # the min is the cleanest single-run estimate on a noisy machine;
            # the mean is what long-run throughput sees
            rows.append({"method": name, "size": size,
                         "seconds": sum(times) / repeats,
                         "seconds_min": min(times), "repeats": repeats})
    return rows


def _cmd_bench(args) -> int:
    sizes = _parse_int_list(args.sizes)
    rows = run_bench(sizes, repeats=args.repeats, seed=args.seed, order=args.order)
    _write_csv_atomic(
        args.out, ["method", "size", "seconds", "seconds_min", "repeats"],
        [[r["method"], r["size"], repr(r["seconds"]), repr(r["seconds_min"]), r["repeats"]]
         for r in rows],
    )
    return 0


def _add_grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("zx", help="x-derivative grid file")
    p.add_argument("zy", help="y-derivative grid file")
    p.add_argument("--out", required=True, help="output surface grid file")
    p.add_argument("--order", type=int, choices=(2, 4), default=2,
                   help="derivative accuracy order (default 2)")
    p.add_argument("--hx", type=float, default=1.0,
                   help="x node spacing for CSV inputs (binary files carry their own)")
    p.add_argument("--hy", type=float, default=1.0,
                   help="y node spacing for CSV inputs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surfrec",
        description="Reconstruct a surface height grid from a measured gradient field.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gls", help="global least-squares reconstruction")
    _add_grid_args(p)
    p.set_defaults(func=_cmd_gls)

    p = sub.add_parser("spectral", help="truncated orthonormal-basis reconstruction")
    _add_grid_args(p)
    p.add_argument("--basis", choices=("cosine", "gram", "haar"), default="cosine")
    p.add_argument("--p", type=int, default=None, help="basis count along y (default half)")
    p.add_argument("--q", type=int, default=None, help="basis count along x (default half)")
    p.add_argument("--drop-cols", default="", help="comma-separated basis columns to remove")
    p.set_defaults(func=_cmd_spectral)

    p = sub.add_parser("tikhonov", help="penalized least-squares reconstruction")
    _add_grid_args(p)
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="regularization parameter")
    p.add_argument("--mu", type=float, default=None, help="y-penalty parameter (default: lambda)")
    p.add_argument("--degree", type=int, choices=(0, 1, 2), default=0)
    p.add_argument("--lcurve", action="store_true",
                   help="pick the parameter at the corner of an L-curve sweep")
    p.add_argument("--points", type=int, default=20, help="L-curve sweep size")
    p.set_defaults(func=_cmd_tikhonov)

    p = sub.add_parser("dirichlet", help="reconstruction with prescribed boundary heights")
    _add_grid_args(p)
    p.add_argument("--boundary", required=True, help="boundary-value grid file")
    p.set_defaults(func=_cmd_dirichlet)

    p = sub.add_parser("wls", help="covariance-weighted reconstruction")
    _add_grid_args(p)
    p.add_argument("--cov-xx", required=True, help="x-derivative column covariance (n x n)")
    p.add_argument("--cov-xy", required=True, help="x-derivative row covariance (m x m)")
    p.add_argument("--cov-yx", required=True, help="y-derivative column covariance (n x n)")
    p.add_argument("--cov-yy", required=True, help="y-derivative row covariance (m x m)")
    p.set_defaults(func=_cmd_wls)

    p = sub.add_parser("lcurve", help="emit an L-curve sweep as CSV")
    _add_grid_args(p)
    p.add_argument("--points", type=int, default=20)
    p.set_defaults(func=_cmd_lcurve)

    p = sub.add_parser("simulate", help="Monte-Carlo noise study; writes a metrics CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--noise", choices=tuple(_NOISE_FLAGS), default="iid")
    p.add_argument("--levels", default="0.1", help="comma-separated noise levels")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rows", type=int, default=150)
    p.add_argument("--cols", type=int, default=150)
    p.add_argument("--order", type=int, choices=(2, 4), default=4)
    p.add_argument("--basis", choices=("cosine", "gram", "haar"), default="cosine")
    p.add_argument("--dump", default="",
                   help="prefix: also write the first cell's gradient and the true surface")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("bench", help="time the solvers across grid sizes; writes CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--sizes", default="128,256,512", help="comma-separated square sizes")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--order", type=int, choices=(2, 4), default=2)
    p.set_defaults(func=_cmd_bench)

    return parser


_FAILURE_CLASSES = (
    (FormatError, "format error"),
    (DimensionError, "dimension error"),
    (SingularSystemError, "singular system"),
    (SizeGuardError, "size guard"),
    (OSError, "i/o error"),
    (ValueError, "invalid argument"),
)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except tuple(cls for cls, _ in _FAILURE_CLASSES) as exc:
        for cls, label in _FAILURE_CLASSES:
            if isinstance(exc, cls):
                print(f"surfrec: {label}: {exc}", file=sys.stderr)
                break
        return 1


if __name__ == "__main__":
    sys.exit(main())
