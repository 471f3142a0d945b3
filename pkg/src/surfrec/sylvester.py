"""Symmetric-coefficient Sylvester equation solvers.

Every reconstruction method in this package reduces to normal equations of
the form

    A.T A Phi + Phi B.T B - A.T F - G B = 0,

a Sylvester equation with symmetric positive semi-definite coefficients.
When A and B each annihilate a known vector (u and v), the operator has the
rank-one null space u v.T; :func:`solve_deflated` removes that direction with
implicit Householder reflections, solves the two deflated vector subproblems
by orthogonal factorization, solves the remaining full-rank Sylvester block,
and pins the free constant of integration to zero, which makes the returned
solution satisfy u.T Phi v = 0 (mean free in the unweighted case).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, SingularSystemError

_SYM_TOL = 1e-10
_PENCIL_TOL = 1e-12
_NULL_TOL = 1e-8


@dataclass(frozen=True)
class Reflector:
    """Implicit Householder reflection P = I - beta * w w.T.

    Only the vector is stored; the reflection is applied as a rank-one
    update, never materialized (forming P explicitly raises the cost of
    every application by an order of magnitude).
    """

    w: np.ndarray
    beta: float

    def matrix(self) -> np.ndarray:
        """Dense P, for small-scale verification only."""
        k = self.w.shape[0]
        return np.eye(k) - self.beta * np.outer(self.w, self.w)

    def apply_left(self, mat: np.ndarray) -> np.ndarray:
        """P @ mat."""
        return mat - np.outer(self.w, self.beta * (self.w @ mat))

    def apply_right(self, mat: np.ndarray) -> np.ndarray:
        """mat @ P."""
        return mat - np.outer(mat @ self.w, self.beta * self.w)

    def apply_vec(self, vec: np.ndarray) -> np.ndarray:
        return vec - self.w * (self.beta * (self.w @ vec))


def householder_vector(u: np.ndarray) -> Reflector:
    """Reflector sending u to -[norm(u), 0, ..., 0].

    Stores w = u + norm(u) * e1.  The construction degenerates only when u is
    numerically antiparallel to the first coordinate axis, which cannot occur
    for the null vectors arising here (all-ones, a leading unit vector, or an
    SPD weighting of the all-ones vector whose leading entry stays bounded
    away from -norm(u)).
    """
    u = np.asarray(u, dtype=float).ravel()
    norm = np.linalg.norm(u)
    if norm == 0.0:
        raise ValueError("cannot build a reflector from the zero vector")
    w = u.copy()
    w[0] += norm
    wsq = w @ w
    if wsq <= 1e-24 * norm * norm:
        raise ValueError("null vector is numerically antiparallel to the first axis")
    return Reflector(w=w, beta=2.0 / wsq)


def _require_symmetric(name: str, mat: np.ndarray) -> np.ndarray:
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {mat.shape}")
    scale = max(1.0, np.max(np.abs(mat))) if mat.size else 1.0
    if np.max(np.abs(mat - mat.T), initial=0.0) > _SYM_TOL * scale:
        raise ValueError(f"{name} is not symmetric to within {_SYM_TOL:g} (relative)")
    return 0.5 * (mat + mat.T)


def sym_sqrt(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric square root and inverse square root of an SPD matrix.

    Returns (mat^(1/2), mat^(-1/2)), both symmetric, computed from the
    eigendecomposition.  Raises if the matrix is not symmetric positive
    definite (smallest eigenvalue must exceed 1e-12 of the largest).
    """
    mat = _require_symmetric("matrix", mat)
    evals, evecs = np.linalg.eigh(mat)
    if evals[0] <= 1e-12 * max(evals[-1], 0.0):
        raise SingularSystemError(
            f"matrix is not positive definite (eigenvalue range [{evals[0]:.3e}, {evals[-1]:.3e}])"
        )
    root = (evecs * np.sqrt(evals)) @ evecs.T
    inv_root = (evecs / np.sqrt(evals)) @ evecs.T
    return 0.5 * (root + root.T), 0.5 * (inv_root + inv_root.T)


def solve_full_rank(p: np.ndarray, q: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Solve P X + X Q = C for symmetric PSD P, Q with a nonsingular pencil.

    Both coefficient matrices are diagonalized by symmetric eigendecomposition
    and the transformed system is solved elementwise as
    X'_ij = C'_ij / (lambda_i + mu_j); this costs the same order of work as
    the Hessenberg-Schur route but the symmetric eigenbasis is reused by the
    regularization analysis elsewhere in the package.
    """
    p = _require_symmetric("P", p)
    q = _require_symmetric("Q", q)
    c = np.asarray(c, dtype=float)
    if c.shape != (p.shape[0], q.shape[0]):
        raise DimensionError(
            f"right-hand side must be {p.shape[0]}x{q.shape[0]}, got {c.shape}"
        )
    lp, up = np.linalg.eigh(p)
    lq, uq = np.linalg.eigh(q)
    tol = _PENCIL_TOL * (np.max(np.abs(lp), initial=0.0) + np.max(np.abs(lq), initial=0.0))
    if lp[0] + lq[0] <= tol:
        raise SingularSystemError(
            f"singular pencil: smallest eigenvalue pair sums to {lp[0] + lq[0]:.3e}"
        )
    ct = up.T @ c @ uq
    return up @ (ct / (lp[:, None] + lq[None, :])) @ uq.T


@dataclass(frozen=True)
class SylvesterSystem:
    """Coefficient blocks of normal equations A.T A Phi + Phi B.T B = A.T F + G B.

    ``a`` is r-by-m (left operator, possibly stacked), ``b`` is s-by-n,
    ``f`` is r-by-n, ``g`` is m-by-s, and the unknown Phi is m-by-n.
    ``u`` and ``v`` are the null vectors of ``a`` and ``b`` (both present or
    both absent); when present the operator's null space is span{u v.T}.
    """

    a: np.ndarray
    b: np.ndarray
    f: np.ndarray
    g: np.ndarray
    u: np.ndarray | None = None
    v: np.ndarray | None = None

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        f = np.asarray(self.f, dtype=float)
        g = np.asarray(self.g, dtype=float)
        if a.ndim != 2 or b.ndim != 2 or f.ndim != 2 or g.ndim != 2:
            raise DimensionError("all system blocks must be 2-d arrays")
        m, n = a.shape[1], b.shape[1]
        if f.shape != (a.shape[0], n):
            raise DimensionError(f"data block F must be {a.shape[0]}x{n}, got {f.shape}")
        if g.shape != (m, b.shape[0]):
            raise DimensionError(f"data block G must be {m}x{b.shape[0]}, got {g.shape}")
        if (self.u is None) != (self.v is None):
            raise DimensionError("null vectors u and v must both be given or both omitted")
        for blk, name in ((a, "a"), (b, "b"), (f, "f"), (g, "g")):
            object.__setattr__(self, name, blk)
        if self.u is not None:
            u = np.asarray(self.u, dtype=float).ravel()
            v = np.asarray(self.v, dtype=float).ravel()
            if u.shape[0] != m or v.shape[0] != n:
                raise DimensionError("null vector lengths must match the unknown's shape")
            for op, vec, name in ((a, u, "u"), (b, v, "v")):
                bound = _NULL_TOL * np.linalg.norm(op) * np.linalg.norm(vec)
                if np.linalg.norm(op @ vec) > bound:
                    raise ValueError(f"{name} is not a null vector of its operator")
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)

    @property
    def phi_shape(self) -> tuple[int, int]:
        return self.a.shape[1], self.b.shape[1]

    def rhs(self) -> np.ndarray:
        """A.T F + G B."""
        return self.a.T @ self.f + self.g @ self.b

    def residual(self, phi: np.ndarray) -> float:
        """Frobenius norm of the normal-equation residual at phi."""
        return float(np.linalg.norm(
            self.a.T @ (self.a @ phi) + (phi @ self.b.T) @ self.b - self.rhs()
        ))

    def cost(self, phi: np.ndarray) -> float:
        """The least-squares functional |A phi - F|_F^2 + |phi B.T - G|_F^2."""
        return float(
            np.linalg.norm(self.a @ phi - self.f) ** 2
            + np.linalg.norm(phi @ self.b.T - self.g) ** 2
        )


def _deflated_lstsq(block: np.ndarray, rhs: np.ndarray, side: str) -> np.ndarray:
    """Least squares by QR factorization (never via the normal equations).

    Factoring the augmented matrix [block | rhs] and reading the transformed
    right-hand side off the last column avoids forming Q explicitly.
    """
    cols = block.shape[1]
    aug = np.concatenate([block, rhs[:, None]], axis=1)
    r_aug = np.linalg.qr(aug, mode="r")
    r_tri = r_aug[:cols, :cols]
    diag = np.abs(np.diag(r_tri))
    if diag.min(initial=np.inf) <= 1e-12 * diag.max(initial=0.0):
        raise SingularSystemError(
            f"deflated {side} block is rank deficient; "
            "the operator's null space is larger than one"
        )
    try:
        return np.linalg.solve(r_tri, r_aug[:cols, cols])
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"deflated {side} block is singular: {exc}") from None


def solve_deflated(system: SylvesterSystem) -> np.ndarray:
    """Solve a rank-one-deficient system by Householder null-space deflation.

    The unknown is re-parameterized as Phi = P_a Psi P_b.T with reflections
    built from the null vectors.  The transformed system decouples into a
    trivially free scalar (the constant of integration, pinned to zero), two
    overdetermined vector problems solved by orthogonal factorization, and a
    full-rank Sylvester block.  The result is the unique solution with
    u.T Phi v = 0.
    """
    if system.u is None or system.v is None:
        raise ValueError("deflated solve requires both null vectors; use solve_full_rank instead")
    m, n = system.phi_shape
    refl_u = householder_vector(system.u)
    refl_v = householder_vector(system.v)
    a_h = refl_u.apply_right(system.a)
    b_h = refl_v.apply_right(system.b)
    f_h = refl_v.apply_right(system.f)
    g_h = refl_u.apply_left(system.g)

    r_blk = a_h[:, 1:]
    s_blk = b_h[:, 1:]
    psi = np.zeros((m, n))
    if n > 1:
        psi[0, 1:] = _deflated_lstsq(s_blk, g_h[0, :], "right")
    if m > 1:
        psi[1:, 0] = _deflated_lstsq(r_blk, f_h[:, 0], "left")
    if m > 1 and n > 1:
        rhs = r_blk.T @ f_h[:, 1:] + g_h[1:, :] @ s_blk
        psi[1:, 1:] = solve_full_rank(r_blk.T @ r_blk, s_blk.T @ s_blk, rhs)
    return refl_v.apply_right(refl_u.apply_left(psi))


def solve(system: SylvesterSystem) -> np.ndarray:
    """Dispatch to the deflated or full-rank path based on the null vectors."""
    if system.u is not None:
        return solve_deflated(system)
    return solve_full_rank(
        system.a.T @ system.a, system.b.T @ system.b, system.rhs()
    )


def work_estimate(m: int, n: int, method: str = "sylvester", truncation_level: int = 0) -> float:
    """Documented flop-count models for the solver families.

    ``sylvester``  : (5/3) m^3 + 10 n^3 + 5 m^2 n + (5/2) m n^2, the classic
                     Hessenberg-Schur operation count (quoted as written; the
                     eigendecomposition route used here has the same cubic
                     order with a different constant).
    ``vectorized`` : 41 m^3 n^3, a dense least-squares solve of the stacked
                     2mn-by-mn system.
    ``spectral``   : the sylvester count for a basis truncated by a factor
                     2^k per axis, i.e. exactly 2^(-3k) of the full count.
    """
    if m < 1 or n < 1:
        raise ValueError("grid dimensions must be at least 1")
    if method == "sylvester":
        return (5.0 * m**3) / 3.0 + 10.0 * n**3 + 5.0 * m**2 * n + (5.0 * m * n**2) / 2.0
    if method == "vectorized":
        return 41.0 * m**3 * n**3
    if method == "spectral":
        if truncation_level < 0:
            raise ValueError("truncation level must be non-negative")
        return work_estimate(m, n, "sylvester") / 8.0**truncation_level
    raise ValueError(f"unknown method tag {method!r}")
