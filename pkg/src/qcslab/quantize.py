"""Scalar quantizers: uniform midpoint, Lloyd-Max, and 1-bit sign.

The uniform quantizer partitions [-T, T] into 2^B equal cells of width
Delta = T * 2^(1-B) and maps to cell midpoints, so any input inside the
range incurs error at most Delta/2. The Lloyd-Max design alternates
centroid and nearest-neighbor conditions for a zero-mean Gaussian source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.integrate import quad
from scipy.stats import norm

from .errors import (
    DegenerateRangeError,
    DimensionMismatchError,
    InvalidParameterError,
)

MAX_BITS = 32


@dataclass(frozen=True)
class UniformSpec:
    """Midpoint (midrise) uniform quantizer on [-T, T] with 2^B cells."""

    t: float
    b: int

    def __post_init__(self):
        if not (self.t > 0 and math.isfinite(self.t)):
            raise InvalidParameterError("range T must be positive and finite")
        if not (1 <= self.b <= MAX_BITS):
            raise InvalidParameterError(f"bits must be in [1, {MAX_BITS}]")

    @property
    def delta(self) -> float:
        return self.t * 2.0 ** (1 - self.b)


@dataclass(frozen=True)
class LloydMaxSpec:
    """Codebook of an MSE-optimal scalar quantizer (levels and thresholds)."""

    levels: np.ndarray
    thresholds: np.ndarray
    converged: bool = True
    iterations: int = 0
    mse: float = float("nan")

    def __post_init__(self):
        levels = np.asarray(self.levels, dtype=float)
        thresholds = np.asarray(self.thresholds, dtype=float)
        if levels.ndim != 1 or thresholds.ndim != 1:
            raise InvalidParameterError("levels and thresholds must be vectors")
        if thresholds.shape[0] != levels.shape[0] - 1:
            raise InvalidParameterError("need exactly len(levels)-1 thresholds")
        if np.any(np.diff(thresholds) <= 0) or np.any(np.diff(levels) <= 0):
            raise InvalidParameterError("levels/thresholds must be strictly increasing")
        levels.flags.writeable = False
        thresholds.flags.writeable = False
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "thresholds", thresholds)


@dataclass(frozen=True)
class SignSpec:
    """1-bit quantizer onto {-1, +1} with sign(0) = +1."""


QuantizerSpec = Union[UniformSpec, LloydMaxSpec, SignSpec]


def dynamic_range(y: np.ndarray) -> float:
    """Peak magnitude T = max |y_i| used to span the quantizer range."""
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise InvalidParameterError("dynamic_range needs a nonempty vector")
    if not np.all(np.isfinite(y)):
        raise InvalidParameterError("dynamic_range needs finite values")
    t = float(np.max(np.abs(y)))
    if t == 0.0:
        raise DegenerateRangeError("all-zero input has no usable range")
    return t


def uniform_quantize(v: np.ndarray, t: float, b: int) -> np.ndarray:
    """Quantize to cell midpoints of a 2^b uniform partition of [-t, t].

    Inputs are clamped to the range first, so outputs saturate at
    +-(t - delta/2).
    """
    spec = UniformSpec(t=t, b=b)
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise InvalidParameterError("uniform_quantize needs finite values")
    delta = spec.delta
    idx = np.floor((v + t) / delta)
    idx = np.clip(idx, 0, 2.0**b - 1)
    return -t + delta * (idx + 0.5)


def sign_quantize(v: np.ndarray) -> np.ndarray:
    """Map to {-1, +1} elementwise with sign(0) = +1."""
    v = np.asarray(v, dtype=float)
    return np.where(v >= 0, 1.0, -1.0)


def _gauss_pdf(sigma: float):
    scale = 1.0 / (sigma * math.sqrt(2.0 * math.pi))
    inv2v = 1.0 / (2.0 * sigma * sigma)

    def pdf(u: float) -> float:
        return scale * math.exp(-u * u * inv2v)

    return pdf


def _cell_mass(a: float, b: float, pdf) -> float:
    val, _ = quad(pdf, a, b)
    return val


def _cell_first_moment(a: float, b: float, pdf) -> float:
    val, _ = quad(lambda u: u * pdf(u), a, b)
    return val


def lloyd_max(
    b: int,
    sigma2: float,
    tol: float = 1e-10,
    max_iter: int = 500,
) -> LloydMaxSpec:
    """Design the MSE-optimal 2^b-level quantizer for N(0, sigma2).

    Runs Lloyd iterations (cell centroids, then midpoint thresholds) from
    equal-probability initial thresholds until the largest level movement
    falls below tol * sigma. Moment integrals use adaptive quadrature of
    the Gaussian density. On non-convergence the best iterate is returned
    with converged=False.
    """
    if b < 1:
        raise InvalidParameterError("bits must be >= 1")
    if b > 16:
        raise InvalidParameterError("lloyd_max supports at most 16 bits")
    if sigma2 <= 0:
        raise InvalidParameterError("sigma2 must be positive")
    sigma = math.sqrt(sigma2)
    pdf = _gauss_pdf(sigma)
    n_levels = 2**b
    # Equal-mass starting cells; interior thresholds only.
    bounds = sigma * norm.ppf(np.linspace(0.0, 1.0, n_levels + 1))
    thresholds = bounds[1:-1].copy()
    levels = np.zeros(n_levels)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        edges = np.concatenate(([-np.inf], thresholds, [np.inf]))
        new_levels = np.empty(n_levels)
        for i in range(n_levels):
            mass = _cell_mass(edges[i], edges[i + 1], pdf)
            if mass <= 0.0:
                # Empty tail cell: park the level at the inner edge.
                new_levels[i] = edges[i] if np.isfinite(edges[i]) else edges[i + 1]
                continue
            new_levels[i] = _cell_first_moment(edges[i], edges[i + 1], pdf) / mass
        move = float(np.max(np.abs(new_levels - levels))) if iterations > 1 else math.inf
        levels = new_levels
        thresholds = 0.5 * (levels[:-1] + levels[1:])
        if move <= tol * sigma:
            converged = True
            break
    edges = np.concatenate(([-np.inf], thresholds, [np.inf]))
    mse = 0.0
    for i in range(n_levels):
        val, _ = quad(
            lambda u, li=levels[i]: (u - li) ** 2 * pdf(u),
            edges[i],
            edges[i + 1],
        )
        mse += val
    return LloydMaxSpec(
        levels=levels,
        thresholds=thresholds,
        converged=converged,
        iterations=iterations,
        mse=mse,
    )


def apply_codebook(v: np.ndarray, spec: QuantizerSpec) -> np.ndarray:
    """Quantize elementwise according to the given codebook description."""
    v = np.asarray(v, dtype=float)
    if isinstance(spec, UniformSpec):
        return uniform_quantize(v, spec.t, spec.b)
    if isinstance(spec, LloydMaxSpec):
        idx = np.searchsorted(spec.thresholds, v, side="right")
        return spec.levels[idx]
    if isinstance(spec, SignSpec):
        return sign_quantize(v)
    raise InvalidParameterError(f"unknown quantizer spec {type(spec)!r}")


def distortion(v: np.ndarray, q: np.ndarray) -> float:
    """Mean squared difference between a vector and its quantized version."""
    v = np.asarray(v, dtype=float)
    q = np.asarray(q, dtype=float)
    if v.shape != q.shape:
        raise DimensionMismatchError(f"shape mismatch {v.shape} vs {q.shape}")
    return float(np.mean((v - q) ** 2))
