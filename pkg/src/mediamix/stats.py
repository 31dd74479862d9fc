"""Standardization, correlation, ordinary least squares, and stepwise selection.

The regression path is deliberately plain: normal equations solved through a
symmetric positive-definite factorization. Problem sizes here stay at p <= 12,
so numerical refinement beyond a condition guard buys nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from .dataset import Dataset
from .errors import ConstantColumn, ConvergenceFailure, RankDeficient

_SD_FLOOR = 1e-12
_RCOND = 1e-12


def standardize(data: Dataset) -> np.ndarray:
    """Column-wise z-scores using the sample mean and SD (n-1 denominator).

    The sample moments are used, not the metadata values, so the output is
    exactly zero-mean unit-SD even when the sample drifts from its targets.
    """
    rows = data.rows
    if rows.shape[0] < 2:
        raise ValueError("standardize needs at least 2 observations")
    mean = rows.mean(axis=0)
    sd = rows.std(axis=0, ddof=1)
    for j, name in enumerate(data.names):
        if sd[j] < _SD_FLOOR:
            raise ConstantColumn(name)
    return (rows - mean) / sd


def correlation(z: np.ndarray) -> np.ndarray:
    """Pearson correlation of standardized columns, (1/(n-1)) * Z'Z."""
    z = np.asarray(z, dtype=float)
    n = z.shape[0]
    if n < 3:
        raise ValueError("correlation needs n >= 3")
    r = (z.T @ z) / (n - 1)
    r = (r + r.T) / 2.0
    np.fill_diagonal(r, 1.0)
    return np.clip(r, -1.0, 1.0)


def student_t_two_sided_p(t: float, df: int) -> float:
    """Two-sided Student-t tail probability 2*P(T_df > |t|).

    Computed through the regularized incomplete beta function
    I_x(df/2, 1/2) with x = df/(df + t^2).
    """
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    t = float(t)
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return float(betainc(df / 2.0, 0.5, x))


def _cholesky_spd(g: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of a cross-product matrix.

    The guard is per column: a pivot that retains less than _RCOND of its
    own diagonal entry means that column is (numerically) a linear
    combination of the earlier ones. Columns of wildly different natural
    scales are fine; only relative collapse counts.
    """
    m = g.shape[0]
    lower = np.zeros((m, m))
    for j in range(m):
        d = g[j, j] - lower[j, :j] @ lower[j, :j]
        if d <= _RCOND * max(g[j, j], _RCOND):
            raise RankDeficient(
                f"cross-product matrix singular at column {j} (pivot {d:.3e})"
            )
        lower[j, j] = math.sqrt(d)
        if j + 1 < m:
            lower[j + 1 :, j] = (g[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / lower[j, j]
    return lower


def _spd_solve(g: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve g @ x = b for SPD g by forward/back substitution."""
    lower = _cholesky_spd(g)
    m = g.shape[0]
    y = np.array(b, dtype=float)
    squeeze = y.ndim == 1
    if squeeze:
        y = y[:, None]
    for i in range(m):
        y[i] = (y[i] - lower[i, :i] @ y[:i]) / lower[i, i]
    for i in reversed(range(m)):
        y[i] = (y[i] - lower[i + 1 :, i] @ y[i + 1 :]) / lower[i, i]
    return y[:, 0] if squeeze else y


@dataclass(frozen=True)
class RegressionFit:
    """A fitted linear model.

    Per-term arrays (std_errors, t_stats, p_values) list the intercept first
    when one was fit; coefficients and std_betas cover predictors only.
    """

    names: tuple[str, ...]
    include_intercept: bool
    intercept: float
    coefficients: np.ndarray
    std_errors: np.ndarray
    t_stats: np.ndarray
    p_values: np.ndarray
    std_betas: np.ndarray
    r_squared: float
    adj_r_squared: float
    residual_se: float
    df_resid: int
    n: int
    residuals: np.ndarray

    def term_names(self) -> tuple[str, ...]:
        return (("(intercept)",) if self.include_intercept else ()) + self.names


def ols_fit(
    y: np.ndarray,
    x: np.ndarray,
    include_intercept: bool = True,
    names: tuple[str, ...] | None = None,
) -> RegressionFit:
    """Least squares via the normal equations.

    Raises RankDeficient when the cross-product matrix has reciprocal
    condition below 1e-12.
    """
    y = np.asarray(y, dtype=float).ravel()
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError("x must be a matrix of predictor columns")
    n, p = x.shape
    if n != y.shape[0]:
        raise ValueError(f"y has {y.shape[0]} rows but x has {n}")
    if names is None:
        names = tuple(f"x{j + 1}" for j in range(p))
    if len(names) != p:
        raise ValueError("names length does not match predictor count")
    terms = p + (1 if include_intercept else 0)
    if terms < 1:
        raise ValueError("model has no terms")
    if n <= terms:
        raise ValueError(f"need n > {terms} observations, got {n}")

    design = np.column_stack([np.ones(n), x]) if include_intercept else x
    g = design.T @ design
    ginv = _spd_solve(g, np.eye(terms))
    beta = ginv @ (design.T @ y)

    fitted = design @ beta
    resid = y - fitted
    df = n - terms
    sse = float(resid @ resid)
    sigma2 = sse / df
    se = np.sqrt(np.maximum(sigma2 * np.diag(ginv), 0.0))

    t_stats = np.empty(terms)
    for i in range(terms):
        if se[i] > 0:
            t_stats[i] = beta[i] / se[i]
        else:
            t_stats[i] = 0.0 if beta[i] == 0 else math.copysign(math.inf, beta[i])
    p_values = np.array([student_t_two_sided_p(t, df) for t in t_stats])

    if include_intercept:
        sst = float(((y - y.mean()) ** 2).sum())
    else:
        sst = float((y**2).sum())
    r2 = 1.0 - sse / sst if sst > 0 else 1.0
    if include_intercept:
        adj = 1.0 - (1.0 - r2) * (n - 1) / df
    else:
        adj = 1.0 - (1.0 - r2) * n / df

    sd_y = float(y.std(ddof=1))
    if p > 0:
        sd_x = x.std(axis=0, ddof=1)
        coef = beta[1:] if include_intercept else beta
        std_betas = coef * sd_x / sd_y if sd_y > 0 else np.zeros(p)
    else:
        coef = np.empty(0)
        std_betas = np.empty(0)

    return RegressionFit(
        names=tuple(names),
        include_intercept=include_intercept,
        intercept=float(beta[0]) if include_intercept else 0.0,
        coefficients=np.asarray(coef, dtype=float),
        std_errors=se,
        t_stats=t_stats,
        p_values=p_values,
        std_betas=np.asarray(std_betas, dtype=float),
        r_squared=float(r2),
        adj_r_squared=float(adj),
        residual_se=math.sqrt(sigma2),
        df_resid=df,
        n=n,
        residuals=resid,
    )


@dataclass(frozen=True)
class StepwiseStep:
    action: str  # "enter" | "remove"
    variable: str
    p_value_at_decision: float
    model_r_squared_after: float


@dataclass(frozen=True)
class StepwiseTrace:
    steps: tuple[StepwiseStep, ...]

    def selected(self) -> tuple[str, ...]:
        """Entered-minus-removed set, in entry order."""
        current: list[str] = []
        for step in self.steps:
            if step.action == "enter":
                current.append(step.variable)
            else:
                current.remove(step.variable)
        return tuple(current)


def stepwise_fit(
    y: np.ndarray,
    x: np.ndarray,
    p_enter: float = 0.05,
    p_remove: float = 0.10,
    names: tuple[str, ...] | None = None,
) -> tuple[RegressionFit, StepwiseTrace]:
    """Forward entry with backward removal.

    Each round enters the excluded predictor with the smallest p-value if it
    clears p_enter, then removes included predictors whose p-value exceeds
    p_remove, worst first. Ties go to the earlier column. p_enter < p_remove
    is required so a variable cannot oscillate.
    """
    if not p_enter < p_remove:
        raise ValueError("p_enter must be strictly below p_remove")
    y = np.asarray(y, dtype=float).ravel()
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    p = x.shape[1]
    if names is None:
        names = tuple(f"x{j + 1}" for j in range(p))

    def fit_on(idx: list[int]) -> RegressionFit:
        return ols_fit(y, x[:, idx], True, tuple(names[i] for i in idx))

    included: list[int] = []
    steps: list[StepwiseStep] = []
    cap = 2 * p * (p + 1)

    while True:
        best: tuple[int, float, RegressionFit] | None = None
        for j in range(p):
            if j in included:
                continue
            cand = sorted(included + [j])
            try:
                fit = fit_on(cand)
            except RankDeficient:
                continue
            pval = float(fit.p_values[cand.index(j) + 1])
            if best is None or pval < best[1]:
                best = (j, pval, fit)
        if best is None or not best[1] < p_enter:
            break
        j, pval, fit = best
        included = sorted(included + [j])
        steps.append(StepwiseStep("enter", names[j], pval, fit.r_squared))

        while True:
            fit = fit_on(included)
            pvals = fit.p_values[1:]
            worst = int(np.argmax(pvals))
            if not pvals[worst] > p_remove:
                break
            gone = included.pop(worst)
            after = fit_on(included)
            steps.append(StepwiseStep("remove", names[gone], float(pvals[worst]), after.r_squared))
            if len(steps) > cap:
                raise ConvergenceFailure("stepwise selection exceeded its action budget")
        if len(steps) > cap:
            raise ConvergenceFailure("stepwise selection exceeded its action budget")

    final = fit_on(included)
    return final, StepwiseTrace(tuple(steps))
