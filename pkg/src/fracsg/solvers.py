"""Per-step linear solvers for the Schur-reduced midpoint system.

Each time step requires one solve with I + (tau^2/4) * Dh^alpha + diag(d),
d >= 0: identity plus SPD plus nonnegative diagonal, hence SPD for every
tau > 0.  The fast path runs conjugate gradients with FFT mat-vecs and an
optional circulant preconditioner; the direct path factorizes the dense
matrix (refactored per step since d changes with the extrapolated midpoint).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .operator import FracOperator

log = logging.getLogger(__name__)


class NumericalFailure(RuntimeError):
    """Base for runtime numerical breakdowns (mapped to CLI exit code 2)."""


class SolveFailure(NumericalFailure):
    pass


@dataclass
class StepMatrix:
    """Action of M_sys = I + (tau^2/4) * Dh^alpha + diag(d); never formed
    densely on the fast path."""

    op: FracOperator
    tau: float
    diag: np.ndarray  # nonnegative, length M-1

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return v + (0.25 * self.tau * self.tau) * self.op.apply(v) + self.diag * v

    def toeplitz_column(self) -> np.ndarray:
        """First column of the Toeplitz part (tau^2/4) h^{-alpha} C."""
        return (0.25 * self.tau * self.tau) * self.op.toeplitz_column()

    def dense(self) -> np.ndarray:
        m = (0.25 * self.tau * self.tau) * self.op.dense_matrix()
        m = m + np.eye(len(self.diag))
        m[np.diag_indices_from(m)] += self.diag
        return m


@dataclass
class SolveConfig:
    method: str = "cg"  # "cg" | "direct"
    cg_rel_tol: float = 1e-12
    cg_max_iter: int | None = None  # None -> 10 * M
    precond: str = "none"  # "none" | "circulant"

    def __post_init__(self) -> None:
        if self.method not in ("cg", "direct"):
            raise ValueError(f"unknown solve method {self.method!r}")
        if self.precond not in ("none", "circulant"):
            raise ValueError(f"unknown preconditioner {self.precond!r}")
        if self.cg_rel_tol <= 0:
            raise ValueError("cg_rel_tol must be positive")
        if self.cg_max_iter is not None and self.cg_max_iter < 1:
            raise ValueError("cg_max_iter must be >= 1")


@dataclass
class SolveStats:
    iterations: int
    residual: float  # true relative residual, recomputed a posteriori


def build_circulant_preconditioner(mat: StepMatrix):
    """Approximate inverse of M_sys from the symmetric circulant wrap of its
    Toeplitz part plus the mean of the diagonal term.

    Returns a callable r -> approx M_sys^{-1} r, or None when any circulant
    eigenvalue is nonpositive (identity fallback, logged).  When the Toeplitz
    part is itself circulant the approximation is exact.
    """
    col = mat.toeplitz_column()
    m = len(col)
    wrap = col.copy()
    half = m // 2
    if half + 1 < m:
        ks = np.arange(half + 1, m)
        wrap[ks] = col[m - ks]
    base = 1.0 + float(np.mean(mat.diag))
    eigs = np.fft.rfft(wrap).real + base
    if np.any(eigs <= 0.0):
        log.warning("circulant preconditioner has nonpositive eigenvalues; falling back to identity")
        return None

    def apply(r: np.ndarray) -> np.ndarray:
        return np.fft.irfft(np.fft.rfft(r, n=m) / eigs, n=m)

    return apply


def solve(mat: StepMatrix, rhs: np.ndarray, cfg: SolveConfig,
          x0: np.ndarray | None = None) -> tuple[np.ndarray, SolveStats]:
    """Solve M_sys x = rhs to the configured tolerance contract.

    CG terminates when the recursive residual satisfies ||r||_2 <=
    cg_rel_tol * ||rhs||_2; the returned stats carry the recomputed true
    residual.  Non-convergence raises SolveFailure.
    """
    rhs = np.asarray(rhs, dtype=np.float64)
    m = len(mat.diag)
    if rhs.shape != (m,):
        raise ValueError(f"rhs length {rhs.shape} does not match system size {m}")
    bnorm = float(np.linalg.norm(rhs))
    if bnorm == 0.0:
        return np.zeros(m), SolveStats(iterations=0, residual=0.0)

    if cfg.method == "direct":
        x = cho_solve(cho_factor(mat.dense()), rhs)
        res = float(np.linalg.norm(rhs - mat.matvec(x))) / bnorm
        return x, SolveStats(iterations=0, residual=res)

    pre = None
    if cfg.precond == "circulant":
        pre = build_circulant_preconditioner(mat)

    max_iter = cfg.cg_max_iter if cfg.cg_max_iter is not None else 10 * (m + 1)
    x = np.zeros(m) if x0 is None else np.array(x0, dtype=np.float64)
    r = rhs - mat.matvec(x)
    z = pre(r) if pre is not None else r
    p = z.copy()
    rz = float(np.dot(r, z))
    iterations = 0
    tol = cfg.cg_rel_tol * bnorm
    while float(np.linalg.norm(r)) > tol:
        if iterations >= max_iter:
            res = float(np.linalg.norm(r)) / bnorm
            raise SolveFailure(
                f"CG failed to reach rel tol {cfg.cg_rel_tol:g} within "
                f"{max_iter} iterations (residual {res:.3e})")
        Ap = mat.matvec(p)
        alpha = rz / float(np.dot(p, Ap))
        x = x + alpha * p
        r = r - alpha * Ap
        z = pre(r) if pre is not None else r
        rz_new = float(np.dot(r, z))
        p = z + (rz_new / rz) * p
        rz = rz_new
        iterations += 1
    res = float(np.linalg.norm(rhs - mat.matvec(x))) / bnorm
    return x, SolveStats(iterations=iterations, residual=res)


def assemble_block_system(op: FracOperator, tau: float, bvec: np.ndarray,
                          U_n: np.ndarray, V_n: np.ndarray, W_n: np.ndarray,
                          size_guard: int = 128) -> tuple[np.ndarray, np.ndarray]:
    """Dense 3(M-1) block system for the midpoint unknowns (U, V, W)^{n+1/2}.

    Built directly from the three stepping equations, so solving it is an
    independent oracle for the Schur-reduced step:

        U_mid - (tau/2) V_mid                          = U^n
        (tau/2) A U_mid + V_mid + (tau/2) diag(b) W_mid = V^n
        -(tau/2) diag(b) V_mid + 2 W_mid                = 2 W^n

    with A the dense fractional operator.  Small sizes only (dense O(M^2)).
    """
    m = op.size
    if m > size_guard:
        raise ValueError(f"block assembly limited to {size_guard} interior nodes, got {m}")
    I = np.eye(m)
    A = op.dense_matrix()
    B = np.diag(bvec)
    half = 0.5 * tau
    top = np.hstack((I, -half * I, np.zeros((m, m))))
    mid = np.hstack((half * A, I, half * B))
    bot = np.hstack((np.zeros((m, m)), -half * B, 2.0 * I))
    block = np.vstack((top, mid, bot))
    rhs = np.concatenate((U_n, V_n, 2.0 * W_n))
    return block, rhs
