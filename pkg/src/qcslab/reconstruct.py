"""Sparse reconstruction algorithms and recovery metrics.

Provides oracle-assisted least squares on a known support, an l1
minimizer subject to an l2 data-fidelity ball (solved with a primal-dual
splitting method plus a final feasibility polish), and binary iterative
hard thresholding in its one-sided l1 and l2 variants for sign
measurements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import (
    DegenerateSupportError,
    DimensionMismatchError,
    InvalidParameterError,
)
from .quantize import sign_quantize
from .signal_model import SensingMatrix

RSNR_CAP_DB = 300.0


class BihtVariant(Enum):
    ONE_SIDED_L1 = "one_sided_l1"
    ONE_SIDED_L2 = "one_sided_l2"


@dataclass
class SolverOptions:
    """Iteration controls shared by the solvers.

    max_iter of None picks the per-solver default (2000 for the l1
    solver, 100 for the 1-bit solvers). k is the sparsity level required
    by the hard-thresholding solvers.
    """

    max_iter: Optional[int] = None
    step_tau: float = 1.0
    tol: float = 1e-6
    k: Optional[int] = None

    def __post_init__(self):
        if self.max_iter is not None and self.max_iter < 1:
            raise InvalidParameterError("max_iter must be >= 1")
        if self.step_tau <= 0 or self.tol <= 0:
            raise InvalidParameterError("step_tau and tol must be positive")
        if self.k is not None and self.k < 1:
            raise InvalidParameterError("k must be >= 1")


@dataclass
class ReconResult:
    """Solver output: the estimate plus convergence diagnostics."""

    estimate: np.ndarray
    iterations: int
    converged: bool
    consistency_hamming: Optional[float] = None
    zero_estimate: bool = False


def oracle_ls(phi: SensingMatrix, y: np.ndarray, support) -> np.ndarray:
    """Least-squares coefficients on the true support, zero elsewhere."""
    y = np.asarray(y, dtype=float)
    if y.shape != (phi.rows,):
        raise DimensionMismatchError("measurement length != matrix rows")
    idx = np.unique(np.asarray(support, dtype=int))
    if idx.size == 0 or idx.size > phi.rows:
        raise InvalidParameterError("support size must be in [1, rows]")
    if idx.min() < 0 or idx.max() >= phi.cols:
        raise InvalidParameterError("support indices out of range")
    sub = phi.entries[:, idx]
    sol, _, rank, _ = np.linalg.lstsq(sub, y, rcond=None)
    if rank < idx.size:
        raise DegenerateSupportError("support submatrix is rank deficient")
    x_hat = np.zeros(phi.cols)
    x_hat[idx] = sol
    return x_hat


def hard_threshold(v: np.ndarray, k: int) -> np.ndarray:
    """Keep the k largest-magnitude entries (ties go to lower indices)."""
    v = np.asarray(v, dtype=float)
    if k < 1 or k > v.size:
        raise InvalidParameterError("k must satisfy 1 <= k <= len(v)")
    if k == v.size:
        return v.copy()
    order = np.argsort(-np.abs(v), kind="stable")
    out = np.zeros_like(v)
    keep = order[:k]
    out[keep] = v[keep]
    return out


def _operator_norm(a: np.ndarray, iters: int = 60) -> float:
    # Deterministic power iteration on A^T A.
    v = np.ones(a.shape[1]) / math.sqrt(a.shape[1])
    est = 0.0
    for _ in range(iters):
        w = a.T @ (a @ v)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        est = nw
        v = w / nw
    return math.sqrt(est)


def _feasibility_polish(a: np.ndarray, y: np.ndarray, x: np.ndarray, eps: float):
    """Minimal l2 correction moving x onto the fidelity ball, if reachable."""
    r = y - a @ x
    rn = float(np.linalg.norm(r))
    if rn <= eps:
        return x, True
    d, _, _, _ = np.linalg.lstsq(a, r, rcond=None)
    ad = a @ d
    proj_sq = float(ad @ ad)
    out_sq = max(rn * rn - proj_sq, 0.0)
    if proj_sq == 0.0:
        return x, rn <= eps
    if eps * eps < out_sq:
        # Fidelity ball does not intersect the affine slice along d.
        return x + d, False
    t = 1.0 - math.sqrt(max(eps * eps - out_sq, 0.0) / proj_sq)
    t = min(max(t, 0.0), 1.0)
    x_new = x + t * d
    feasible = float(np.linalg.norm(y - a @ x_new)) <= eps * (1.0 + 1e-9) + 1e-12
    return x_new, feasible


def bpdn(
    phi: SensingMatrix,
    y: np.ndarray,
    eps: float,
    opts: Optional[SolverOptions] = None,
) -> ReconResult:
    """Minimize ||x||_1 subject to ||y - Phi x||_2 <= eps.

    Uses a primal-dual splitting iteration on the constrained form. A
    converged result is feasible to relative tolerance 1e-6 and has a
    stationary l1 objective; a final least-squares polish removes any
    residual constraint violation before the feasibility check.
    """
    opts = opts or SolverOptions()
    if eps < 0:
        raise InvalidParameterError("eps must be nonnegative")
    a = phi.entries
    y = np.asarray(y, dtype=float)
    if y.shape != (phi.rows,):
        raise DimensionMismatchError("measurement length != matrix rows")
    max_iter = opts.max_iter if opts.max_iter is not None else 2000

    if np.linalg.norm(y) <= eps:
        return ReconResult(
            estimate=np.zeros(phi.cols), iterations=0, converged=True
        )

    lip = _operator_norm(a)
    if lip == 0.0:
        return ReconResult(
            estimate=np.zeros(phi.cols), iterations=0, converged=False
        )
    tau = 0.99 / lip
    sigma = 0.99 / lip

    x = np.zeros(phi.cols)
    x_bar = x.copy()
    p = np.zeros(phi.rows)
    obj_prev = math.inf
    stationary = False
    it = 0
    for it in range(1, max_iter + 1):
        q = p + sigma * (a @ x_bar)
        u = q / sigma
        dev = u - y
        dn = np.linalg.norm(dev)
        proj = y + dev * (eps / dn) if dn > eps else u
        p = q - sigma * proj
        grad = a.T @ p
        x_new = x - tau * grad
        x_new = np.sign(x_new) * np.maximum(np.abs(x_new) - tau, 0.0)
        x_bar = 2.0 * x_new - x
        x = x_new
        if it % 10 == 0:
            obj = float(np.sum(np.abs(x)))
            resid = float(np.linalg.norm(y - a @ x))
            obj_gap = abs(obj - obj_prev) <= opts.tol * max(obj, 1e-12)
            feas_gap = resid <= eps * (1.0 + 1e-3) + opts.tol * 1e-3
            if obj_gap and feas_gap:
                stationary = True
                break
            obj_prev = obj

    x, feasible = _feasibility_polish(a, y, x, eps)
    resid = float(np.linalg.norm(y - a @ x))
    feasible = feasible and resid <= eps * (1.0 + 1e-6) + 1e-12
    return ReconResult(estimate=x, iterations=it, converged=stationary and feasible)


def debias_on_support(
    phi: SensingMatrix, y: np.ndarray, x_hat: np.ndarray, k: Optional[int] = None
) -> np.ndarray:
    """Least-squares refit on the detected (or top-k) support of x_hat."""
    if k is not None:
        x_hat = hard_threshold(x_hat, k)
    idx = np.flatnonzero(np.abs(x_hat) > 1e-10 * max(np.max(np.abs(x_hat)), 1e-300))
    if idx.size == 0 or idx.size > phi.rows:
        return x_hat.copy()
    return oracle_ls(phi, y, idx)


def biht(
    phi: SensingMatrix,
    y_sign: np.ndarray,
    variant: BihtVariant = BihtVariant.ONE_SIDED_L1,
    opts: Optional[SolverOptions] = None,
) -> ReconResult:
    """Binary iterative hard thresholding on sign measurements.

    Runs projected (sub)gradient steps x <- H_k(x - tau * g) on the
    one-sided sign-consistency objective, keeping iterates unit-norm.
    Returns the iterate with the lowest sign-disagreement fraction seen,
    which is never worse than the starting proxy; stops early once the
    signs match exactly. The scale of the signal is unrecoverable, so the
    estimate is reported with unit l2 norm.
    """
    opts = opts or SolverOptions()
    if opts.k is None:
        raise InvalidParameterError("BIHT requires opts.k")
    y_sign = np.asarray(y_sign, dtype=float)
    if y_sign.shape != (phi.rows,):
        raise DimensionMismatchError("sign vector length != matrix rows")
    if not np.all(np.abs(y_sign) == 1.0):
        raise InvalidParameterError("y_sign entries must be +-1")
    a = phi.entries
    max_iter = opts.max_iter if opts.max_iter is not None else 100
    tau = opts.step_tau

    x = hard_threshold(a.T @ y_sign, opts.k)
    nx = np.linalg.norm(x)
    if nx == 0.0:
        return ReconResult(
            estimate=np.zeros(phi.cols),
            iterations=0,
            converged=False,
            consistency_hamming=1.0,
            zero_estimate=True,
        )
    x = x / nx

    best_x = x.copy()
    best_ham = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        ax = a @ x
        ham = float(np.mean(sign_quantize(ax) != y_sign))
        if ham < best_ham:
            best_ham = ham
            best_x = x.copy()
        if ham == 0.0:
            break
        r = y_sign * ax
        r_neg = np.minimum(r, 0.0)
        if variant is BihtVariant.ONE_SIDED_L1:
            g = a.T @ (y_sign * np.sign(r_neg))
        else:
            g = a.T @ (y_sign * r_neg)
        x_next = hard_threshold(x - tau * g, opts.k)
        if not np.any(x_next):
            if not np.any(g):
                return ReconResult(
                    estimate=np.zeros(phi.cols),
                    iterations=it,
                    converged=False,
                    consistency_hamming=best_ham,
                    zero_estimate=True,
                )
            # Thresholded to zero with a live gradient: restart from the step.
            x_next = hard_threshold(-tau * g, opts.k)
        x = x_next

    nb = np.linalg.norm(best_x)
    return ReconResult(
        estimate=best_x / nb if nb > 0 else best_x,
        iterations=it,
        converged=best_ham == 0.0,
        consistency_hamming=best_ham,
    )


def rsnr_db(x_true: np.ndarray, x_hat: np.ndarray, rescale_1bit: bool = False) -> float:
    """Reconstruction SNR 10 log10(|x|^2 / |x - x_hat|^2) in dB.

    With rescale_1bit the estimate is first scaled to the true norm,
    since sign measurements lose the signal scale. Exact recovery is
    capped at 300 dB.
    """
    x_true = np.asarray(x_true, dtype=float)
    x_hat = np.asarray(x_hat, dtype=float)
    if x_true.shape != x_hat.shape:
        raise DimensionMismatchError("length mismatch")
    nt = float(np.linalg.norm(x_true))
    if nt == 0.0:
        raise InvalidParameterError("x_true must be nonzero")
    if rescale_1bit:
        nh = float(np.linalg.norm(x_hat))
        if nh > 0:
            x_hat = x_hat * (nt / nh)
    err = float(np.sum((x_true - x_hat) ** 2))
    if err == 0.0:
        return RSNR_CAP_DB
    return min(10.0 * math.log10(nt * nt / err), RSNR_CAP_DB)


def hamming_consistency(
    y_sign: np.ndarray, phi: SensingMatrix, x_hat: np.ndarray
) -> float:
    """Fraction of measurements whose re-measured sign disagrees."""
    y_sign = np.asarray(y_sign, dtype=float)
    x_hat = np.asarray(x_hat, dtype=float)
    if y_sign.shape != (phi.rows,) or x_hat.shape != (phi.cols,):
        raise DimensionMismatchError("shape mismatch")
    return float(np.mean(sign_quantize(phi.entries @ x_hat) != y_sign))
