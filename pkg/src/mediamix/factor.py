"""Principal-component extraction, quartimax rotation, and factor scoring.

The eigensolver is a cyclic Jacobi sweep; at p <= 50 it is accurate and
keeps the whole factor path free of opaque dependencies. Rotation works on
column pairs with the closed-form quartimax angle, optionally under Kaiser
row normalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, ZeroComponents
from .synth import cholesky_pd

_JACOBI_MAX_SWEEPS = 100


def eigen_sym(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvectors of a symmetric matrix.

    Cyclic Jacobi: sweep the upper triangle, rotating each (p, q) plane to
    zero that entry, until the off-diagonal mass is negligible relative to
    the input norm. Each eigenvector's largest-magnitude entry is made
    positive so the decomposition is reproducible.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(a, a.T, atol=1e-8):
        raise ValueError("matrix must be symmetric")
    p = a.shape[0]
    work = (a + a.T) / 2.0
    vecs = np.eye(p)
    if p == 1:
        return work.diagonal().copy(), vecs

    norm = np.linalg.norm(work)
    stop = 1e-12 * max(norm, 1.0)
    for _ in range(_JACOBI_MAX_SWEEPS):
        # summing the strict upper triangle avoids the cancellation that a
        # full-norm-minus-diagonal computation hits near convergence
        off = math.sqrt(2.0 * (np.triu(work, 1) ** 2).sum())
        if off <= stop:
            break
        for i in range(p - 1):
            for j in range(i + 1, p):
                if abs(work[i, j]) <= stop / max(p, 1) * 1e-2:
                    continue
                phi = 0.5 * math.atan2(2.0 * work[i, j], work[j, j] - work[i, i])
                c, s = math.cos(phi), math.sin(phi)
                wi = work[:, i].copy()
                wj = work[:, j].copy()
                work[:, i] = c * wi - s * wj
                work[:, j] = s * wi + c * wj
                wi = work[i, :].copy()
                wj = work[j, :].copy()
                work[i, :] = c * wi - s * wj
                work[j, :] = s * wi + c * wj
                work[i, j] = work[j, i] = 0.0
                vi = vecs[:, i].copy()
                vj = vecs[:, j].copy()
                vecs[:, i] = c * vi - s * vj
                vecs[:, j] = s * vi + c * vj
    else:
        raise ConvergenceFailure("Jacobi sweeps did not reduce the off-diagonal mass")

    vals = work.diagonal().copy()
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    for k in range(p):
        lead = int(np.argmax(np.abs(vecs[:, k])))
        if vecs[lead, k] < 0:
            vecs[:, k] = -vecs[:, k]
    return vals, vecs


@dataclass(frozen=True)
class FactorSolution:
    """Extraction plus rotation output for k retained components."""

    names: tuple[str, ...]
    eigenvalues: np.ndarray
    loadings_unrotated: np.ndarray
    loadings_rotated: np.ndarray
    rotation: np.ndarray
    score_coefficients: np.ndarray
    variance_table: tuple[dict, ...]
    k: int
    rotation_sweeps: int
    rotation_converged: bool

    def communalities(self) -> np.ndarray:
        return (self.loadings_rotated**2).sum(axis=1)


def _variance_table(eigenvalues: np.ndarray, rotated: np.ndarray, k: int) -> tuple[dict, ...]:
    """Nine-column variance breakdown: initial, extraction, rotation sums."""
    p = eigenvalues.shape[0]
    rot_ss = (rotated**2).sum(axis=0)
    rows = []
    cum_i = cum_e = cum_r = 0.0
    for i in range(p):
        lam = float(eigenvalues[i])
        pct = 100.0 * lam / p
        cum_i += pct
        row = {
            "component": i + 1,
            "initial_eigenvalue": lam,
            "initial_pct_variance": pct,
            "initial_cum_pct": cum_i,
            "extraction_ssl": None,
            "extraction_pct_variance": None,
            "extraction_cum_pct": None,
            "rotation_ssl": None,
            "rotation_pct_variance": None,
            "rotation_cum_pct": None,
        }
        if i < k:
            epct = 100.0 * lam / p
            cum_e += epct
            row["extraction_ssl"] = lam
            row["extraction_pct_variance"] = epct
            row["extraction_cum_pct"] = cum_e
            rss = float(rot_ss[i])
            rpct = 100.0 * rss / p
            cum_r += rpct
            row["rotation_ssl"] = rss
            row["rotation_pct_variance"] = rpct
            row["rotation_cum_pct"] = cum_r
        rows.append(row)
    return tuple(rows)


def pca_extract(
    r: np.ndarray,
    k: int | None = None,
    names: tuple[str, ...] | None = None,
) -> FactorSolution:
    """Unrotated principal-component solution of a correlation matrix.

    k=None applies the Kaiser rule (retain eigenvalues > 1); ZeroComponents
    is raised if nothing qualifies. Loading column i is sqrt(lambda_i) * v_i.
    """
    r = np.asarray(r, dtype=float)
    p = r.shape[0]
    if names is None:
        names = tuple(f"v{j + 1}" for j in range(p))
    vals, vecs = eigen_sym(r)
    if k is None:
        k = int((vals > 1.0).sum())
        if k == 0:
            raise ZeroComponents("no eigenvalue exceeds 1")
    if not 1 <= k <= p:
        raise ValueError(f"k must be in [1, {p}], got {k}")
    loadings = vecs[:, :k] * np.sqrt(np.maximum(vals[:k], 0.0))
    return FactorSolution(
        names=tuple(names),
        eigenvalues=vals,
        loadings_unrotated=loadings,
        loadings_rotated=loadings.copy(),
        rotation=np.eye(k),
        score_coefficients=np.zeros((p, k)),
        variance_table=_variance_table(vals, loadings, k),
        k=k,
        rotation_sweeps=0,
        rotation_converged=True,
    )


@dataclass(frozen=True)
class RotationResult:
    loadings: np.ndarray
    rotation: np.ndarray
    sweeps: int
    converged: bool
    # criterion value before any sweep and after each one, in the working
    # (possibly Kaiser-normalized) space; never decreasing
    q_history: tuple[float, ...] = ()


def quartimax_rotate(
    loadings: np.ndarray,
    kaiser_normalize: bool = True,
    tol: float = 1e-6,
    max_sweeps: int = 100,
) -> RotationResult:
    """Orthogonal rotation maximizing the sum of fourth powers of loadings.

    Rows are divided by their root communality first when kaiser_normalize is
    set, and restored afterwards. Each sweep visits column pairs in order and
    applies the closed-form optimal planar angle; the criterion never
    decreases. Iteration stops when a sweep gains less than tol.

    After convergence columns are ordered by descending sum of squares and
    signed so each column sums positive; both conventions are folded into the
    returned rotation matrix, so rotated = loadings @ rotation throughout.
    """
    lam = np.asarray(loadings, dtype=float)
    if lam.ndim != 2:
        raise ValueError("loadings must be a p x k matrix")
    p, k = lam.shape
    if k < 2:
        q0 = float((lam**4).sum())
        return RotationResult(lam.copy(), np.eye(k), 0, True, (q0,))

    if kaiser_normalize:
        h = np.sqrt((lam**2).sum(axis=1))
        if np.any(h <= 0):
            raise ValueError("Kaiser normalization requires positive communalities")
        b = lam / h[:, None]
    else:
        h = None
        b = lam.copy()

    rot = np.eye(k)
    sweeps = 0
    converged = False
    q_prev = float((b**4).sum())
    history = [q_prev]
    while sweeps < max_sweeps:
        for i in range(k - 1):
            for j in range(i + 1, k):
                u = b[:, i] ** 2 - b[:, j] ** 2
                v = 2.0 * b[:, i] * b[:, j]
                num = 2.0 * float(u @ v)
                den = float(u @ u - v @ v)
                theta = 0.25 * math.atan2(num, den)
                if abs(theta) < 1e-14:
                    continue
                c, s = math.cos(theta), math.sin(theta)
                bi = b[:, i].copy()
                bj = b[:, j].copy()
                b[:, i] = c * bi + s * bj
                b[:, j] = -s * bi + c * bj
                ri = rot[:, i].copy()
                rj = rot[:, j].copy()
                rot[:, i] = c * ri + s * rj
                rot[:, j] = -s * ri + c * rj
        sweeps += 1
        q = float((b**4).sum())
        history.append(q)
        if q - q_prev < tol:
            converged = True
            q_prev = q
            break
        q_prev = q

    if h is not None:
        b = b * h[:, None]

    # Column conventions: descending variance, positive column sums.
    order = np.argsort(-(b**2).sum(axis=0), kind="stable")
    b = b[:, order]
    rot = rot[:, order]
    signs = np.where(b.sum(axis=0) < 0, -1.0, 1.0)
    b = b * signs
    rot = rot * signs
    return RotationResult(b, rot, sweeps, converged, tuple(history))


def score_coefficients(r: np.ndarray, rotated: np.ndarray) -> np.ndarray:
    """Regression-method component score weights W = R^-1 @ rotated."""
    r = np.asarray(r, dtype=float)
    rotated = np.asarray(rotated, dtype=float)
    if r.shape[0] != rotated.shape[0]:
        raise ValueError("loading rows must match correlation order")
    lower = cholesky_pd(r)
    y = rotated.copy()
    p = r.shape[0]
    for i in range(p):
        y[i] = (y[i] - lower[i, :i] @ y[:i]) / lower[i, i]
    for i in reversed(range(p)):
        y[i] = (y[i] - lower[i + 1 :, i] @ y[i + 1 :]) / lower[i, i]
    return y


def factor_scores(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Scores = Z @ W; columns inherit Z's zero mean."""
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    if z.shape[1] != w.shape[0]:
        raise ValueError(f"Z has {z.shape[1]} columns but W has {w.shape[0]} rows")
    return z @ w


def analyze(
    r: np.ndarray,
    k: int | None = None,
    names: tuple[str, ...] | None = None,
    kaiser_normalize: bool = True,
    tol: float = 1e-6,
    max_sweeps: int = 100,
) -> FactorSolution:
    """Extraction, rotation, and score coefficients in one pass."""
    base = pca_extract(r, k=k, names=names)
    rotated = quartimax_rotate(
        base.loadings_unrotated,
        kaiser_normalize=kaiser_normalize,
        tol=tol,
        max_sweeps=max_sweeps,
    )
    w = score_coefficients(np.asarray(r, dtype=float), rotated.loadings)
    return FactorSolution(
        names=base.names,
        eigenvalues=base.eigenvalues,
        loadings_unrotated=base.loadings_unrotated,
        loadings_rotated=rotated.loadings,
        rotation=rotated.rotation,
        score_coefficients=w,
        variance_table=_variance_table(base.eigenvalues, rotated.loadings, base.k),
        k=base.k,
        rotation_sweeps=rotated.sweeps,
        rotation_converged=rotated.converged,
    )
