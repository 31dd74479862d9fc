"""Synthetic data generation from variable metadata and a target correlation.

A dataset is drawn as x = mean + sd * (L @ g) with L the Cholesky factor of
the target correlation and g i.i.d. standard normal, so the sample moments
converge to the metadata targets as n grows. Generation is deterministic for
a fixed (spec, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, VariableMeta
from .errors import CommunalityExceedsOne, NotPositiveDefinite, ResampleExhausted

_PIVOT_FLOOR = 1e-12

CLIP_POLICIES = ("none", "clip_to_bounds", "resample_violations")


def cholesky_pd(r: np.ndarray) -> np.ndarray:
    """Lower-triangular L with L @ L.T = r.

    Raises NotPositiveDefinite(leading_minor_index) when a pivot falls at or
    below 1e-12; the index is the order of the offending leading minor.
    """
    r = np.asarray(r, dtype=float)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(r, r.T, atol=1e-8):
        raise ValueError("matrix must be symmetric")
    p = r.shape[0]
    lower = np.zeros((p, p))
    for j in range(p):
        d = r[j, j] - lower[j, :j] @ lower[j, :j]
        if d <= _PIVOT_FLOOR:
            raise NotPositiveDefinite(j + 1)
        lower[j, j] = math.sqrt(d)
        if j + 1 < p:
            lower[j + 1 :, j] = (r[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / lower[j, j]
    return lower


def nearest_pd_repair(r: np.ndarray, floor: float = 1e-8) -> np.ndarray:
    """Clip eigenvalues below `floor`, reassemble, rescale to unit diagonal.

    Already-PD input passes through unchanged up to floating noise. The
    result always factors through cholesky_pd.
    """
    r = np.asarray(r, dtype=float)
    sym = (r + r.T) / 2.0
    vals, vecs = np.linalg.eigh(sym)
    if vals.min() > floor:
        return sym
    clipped = np.maximum(vals, floor)
    out = (vecs * clipped) @ vecs.T
    scale = np.sqrt(np.diag(out))
    out = out / np.outer(scale, scale)
    out = (out + out.T) / 2.0
    np.fill_diagonal(out, 1.0)
    return out


def reconstruct_correlation(loadings: np.ndarray) -> np.ndarray:
    """Correlation matrix consistent with a loading pattern.

    Off-diagonal entries are (loadings @ loadings.T); the diagonal is set to
    one, which amounts to adding each row's uniqueness. Every row communality
    must be strictly below one, otherwise the implied uniqueness would be
    nonpositive and the result could lose positive definiteness.
    """
    lam = np.asarray(loadings, dtype=float)
    if lam.ndim != 2:
        raise ValueError("loadings must be a p x k matrix")
    communality = (lam**2).sum(axis=1)
    for i, h2 in enumerate(communality):
        if h2 >= 1.0:
            raise CommunalityExceedsOne(i)
    r = lam @ lam.T
    np.fill_diagonal(r, 1.0)
    return r


@dataclass(frozen=True)
class SynthesisSpec:
    """Everything needed to draw a dataset: metadata, correlation, size, seed.

    clip_policy is one of "none", "clip_to_bounds", or "resample_violations";
    max_attempts only applies to the last.
    """

    meta: tuple[VariableMeta, ...]
    target_correlation: np.ndarray
    n: int
    seed: int
    clip_policy: str = "clip_to_bounds"
    max_attempts: int = 100

    def __post_init__(self):
        r = np.asarray(self.target_correlation, dtype=float)
        p = len(self.meta)
        if r.shape != (p, p):
            raise ValueError(f"correlation must be {p} x {p}, got {r.shape}")
        if not np.allclose(r, r.T, atol=1e-8):
            raise ValueError("target correlation must be symmetric")
        if not np.allclose(np.diag(r), 1.0, atol=1e-8):
            raise ValueError("target correlation must have a unit diagonal")
        if np.abs(r).max() > 1.0 + 1e-8:
            raise ValueError("correlation entries must lie in [-1, 1]")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.clip_policy not in CLIP_POLICIES:
            raise ValueError(f"unknown clip policy {self.clip_policy!r}")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be at least 1")
        object.__setattr__(self, "target_correlation", r)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(m.name for m in self.meta)


def synthesize(spec: SynthesisSpec) -> Dataset:
    """Draw the dataset described by `spec`.

    Under clip_to_bounds every value is clamped into [min, max] from the
    metadata. Under resample_violations whole rows are redrawn until they
    respect the bounds, up to max_attempts passes; exhaustion raises
    ResampleExhausted. Policy "none" returns the raw draw.
    """
    for m in spec.meta:
        if m.sd <= 0:
            raise ValueError(f"{m.name}: synthesis needs sd > 0")
    lower = cholesky_pd(spec.target_correlation)
    mean = np.array([m.mean for m in spec.meta])
    sd = np.array([m.sd for m in spec.meta])
    lo = np.array([m.min for m in spec.meta])
    hi = np.array([m.max for m in spec.meta])

    rng = np.random.default_rng(spec.seed)
    g = rng.standard_normal((spec.n, len(spec.meta)))
    rows = mean + sd * (g @ lower.T)

    if spec.clip_policy == "clip_to_bounds":
        rows = np.clip(rows, lo, hi)
    elif spec.clip_policy == "resample_violations":
        for _ in range(spec.max_attempts):
            bad = np.any((rows < lo) | (rows > hi), axis=1)
            if not bad.any():
                break
            g = rng.standard_normal((int(bad.sum()), len(spec.meta)))
            rows[bad] = mean + sd * (g @ lower.T)
        else:
            bad = np.any((rows < lo) | (rows > hi), axis=1)
            if bad.any():
                raise ResampleExhausted(
                    f"{int(bad.sum())} rows still out of bounds after "
                    f"{spec.max_attempts} attempts"
                )
    return Dataset(spec.meta, rows)
