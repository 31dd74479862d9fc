"""Z-score objective composition and bounded linear programming.

The solver is a two-phase primal simplex over bounded variables with Bland's
anti-cycling rule. Vertex solutions are what we want here: the published
optimum sits at integer bounds and a greedy knapsack argument, and a vertex
solver reproduces that pattern exactly instead of approaching it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import VariableMeta
from .errors import ConvergenceFailure, InfeasibleBounds

_TOL = 1e-9
SENSES = ("<=", ">=", "=")


@dataclass(frozen=True)
class ObjectiveSpec:
    """Objective-units-per-Z coefficients for the promotional variables."""

    names: tuple[str, ...]
    coefficients: np.ndarray
    intercept: float

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=float).ravel()
        if coef.shape[0] != len(self.names):
            raise ValueError("one coefficient per variable required")
        object.__setattr__(self, "coefficients", coef)
        object.__setattr__(self, "names", tuple(self.names))


@dataclass(frozen=True)
class LinearConstraint:
    """sum_j weights_j * z_j  (sense)  bound, weights aligned with the objective."""

    weights: np.ndarray
    bound: float
    sense: str = "<="
    label: str = ""

    def __post_init__(self):
        if self.sense not in SENSES:
            raise ValueError(f"sense must be one of {SENSES}, got {self.sense!r}")
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float).ravel())


@dataclass(frozen=True)
class LPProblem:
    objective: ObjectiveSpec
    lower: np.ndarray
    upper: np.ndarray
    constraints: tuple[LinearConstraint, ...] = ()

    def __post_init__(self):
        n = len(self.objective.names)
        lower = np.asarray(self.lower, dtype=float).ravel()
        upper = np.asarray(self.upper, dtype=float).ravel()
        if lower.shape[0] != n or upper.shape[0] != n:
            raise ValueError("bounds must align with the objective variables")
        for con in self.constraints:
            if con.weights.shape[0] != n:
                raise ValueError("constraint weights must align with the objective variables")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "constraints", tuple(self.constraints))


@dataclass(frozen=True)
class LPSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    z_star: np.ndarray | None
    objective_value: float | None
    contributions: np.ndarray | None
    binding: dict | None
    reason: str | None = None


def compose_objective(
    betas: np.ndarray,
    w: np.ndarray,
    intercept: float,
    names: tuple[str, ...],
) -> ObjectiveSpec:
    """Collapse a k-factor regression into per-variable Z coefficients.

    coefficient_j = sum_k beta_k * W[j, k]; the intercept passes through.
    """
    betas = np.asarray(betas, dtype=float).ravel()
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[1] != betas.shape[0]:
        raise ValueError(f"W must be p x {betas.shape[0]} to match the betas")
    if w.shape[0] != len(names):
        raise ValueError("W rows must align with the variable names")
    return ObjectiveSpec(tuple(names), w @ betas, float(intercept))


class _Tableau:
    """Bounded-variable simplex state shared by the two phases.

    Columns: n decision variables, m slacks, then any artificials. Nonbasic
    variables sit at a bound (or zero when free); basic values are recomputed
    from the nonbasic ones each pivot so drift cannot accumulate.
    """

    def __init__(self, a, b, lo, up, basis, at_upper, free):
        self.a = a
        self.b = b
        self.lo = lo
        self.up = up
        self.basis = list(basis)
        self.at_upper = at_upper  # boolean per column, meaningful when nonbasic
        self.free = free
        self.x = np.zeros(a.shape[1])
        self._set_nonbasic_values()
        self.refresh_basics()

    def _set_nonbasic_values(self):
        in_basis = set(self.basis)
        for j in range(self.a.shape[1]):
            if j in in_basis:
                continue
            if self.free[j]:
                self.x[j] = 0.0
            else:
                self.x[j] = self.up[j] if self.at_upper[j] else self.lo[j]

    def refresh_basics(self):
        bmat = self.a[:, self.basis]
        nonbasis = [j for j in range(self.a.shape[1]) if j not in set(self.basis)]
        rhs = self.b - self.a[:, nonbasis] @ self.x[nonbasis]
        vals = np.linalg.solve(bmat, rhs)
        self.x[self.basis] = vals

    def run(self, c, max_iter):
        """Pivot until no improving nonbasic remains. Returns 'optimal' or 'unbounded'."""
        ncols = self.a.shape[1]
        for _ in range(max_iter):
            bmat = self.a[:, self.basis]
            y = np.linalg.solve(bmat.T, c[self.basis])
            in_basis = set(self.basis)

            enter = -1
            direction = 0.0
            for j in range(ncols):
                if j in in_basis:
                    continue
                if not self.free[j] and self.up[j] - self.lo[j] <= _TOL:
                    continue  # fixed column can never move
                d = c[j] - y @ self.a[:, j]
                if self.free[j]:
                    if abs(d) > _TOL:
                        enter, direction = j, math.copysign(1.0, d)
                        break
                elif self.at_upper[j]:
                    if d < -_TOL:
                        enter, direction = j, -1.0
                        break
                else:
                    if d > _TOL:
                        enter, direction = j, 1.0
                        break
            if enter < 0:
                return "optimal"

            w = np.linalg.solve(bmat, self.a[:, enter])
            limit = math.inf
            leaving = -1
            leaving_to_upper = False
            for i, bi in enumerate(self.basis):
                rate = -direction * w[i]  # change in x[bi] per unit step
                if rate > _TOL:
                    if math.isinf(self.up[bi]):
                        continue
                    ratio = max((self.up[bi] - self.x[bi]) / rate, 0.0)
                    hits_upper = True
                elif rate < -_TOL:
                    if math.isinf(self.lo[bi]):
                        continue
                    ratio = max((self.x[bi] - self.lo[bi]) / -rate, 0.0)
                    hits_upper = False
                else:
                    continue
                # Bland: strict improvement, ties to the smaller variable index
                if ratio < limit - _TOL or (
                    ratio < limit + _TOL and (leaving < 0 or bi < self.basis[leaving])
                ):
                    limit = ratio
                    leaving = i
                    leaving_to_upper = hits_upper

            flip_range = math.inf
            if not self.free[enter] and not math.isinf(self.lo[enter]) and not math.isinf(self.up[enter]):
                flip_range = self.up[enter] - self.lo[enter]

            if leaving < 0 and math.isinf(flip_range):
                return "unbounded"

            if flip_range < limit:
                # entering variable runs to its other bound, basis unchanged
                self.at_upper[enter] = not self.at_upper[enter]
                self.x[enter] = self.up[enter] if self.at_upper[enter] else self.lo[enter]
            else:
                out = self.basis[leaving]
                self.x[enter] = self.x[enter] + direction * limit
                self.basis[leaving] = enter
                self.at_upper[out] = leaving_to_upper
                self.x[out] = self.up[out] if leaving_to_upper else self.lo[out]
            self.refresh_basics()
        raise ConvergenceFailure("simplex exceeded its iteration budget")


def solve_lp(problem: LPProblem) -> LPSolution:
    """Maximize the objective over box bounds and linear constraints.

    Phase 1 drives artificial variables out of the rows whose slack starts
    outside its range; phase 2 optimizes the real objective. Statuses
    "infeasible" and "unbounded" are returned rather than raised;
    inconsistent per-variable bounds raise InfeasibleBounds.
    """
    obj = problem.objective
    n = len(obj.names)
    m = len(problem.constraints)
    for j, name in enumerate(obj.names):
        if problem.lower[j] > problem.upper[j]:
            raise InfeasibleBounds(name)

    ncols = n + m
    a = np.zeros((m, ncols))
    b = np.zeros(m)
    lo = np.full(ncols, -math.inf)
    up = np.full(ncols, math.inf)
    lo[:n] = problem.lower
    up[:n] = problem.upper
    for i, con in enumerate(problem.constraints):
        a[i, :n] = con.weights
        a[i, n + i] = 1.0
        b[i] = con.bound
        if con.sense == "<=":
            lo[n + i], up[n + i] = 0.0, math.inf
        elif con.sense == ">=":
            lo[n + i], up[n + i] = -math.inf, 0.0
        else:
            lo[n + i], up[n + i] = 0.0, 0.0

    free = np.isinf(lo) & np.isinf(up)
    at_upper = np.zeros(ncols, dtype=bool)
    for j in range(ncols):
        if not free[j] and math.isinf(lo[j]):
            at_upper[j] = True  # only the upper bound exists to rest on

    x0 = np.where(free, 0.0, np.where(at_upper, up, lo))
    slack_val = b - a[:, :n] @ x0[:n]

    need_artificial = []
    for i in range(m):
        s = n + i
        if lo[s] - _TOL <= slack_val[i] <= up[s] + _TOL:
            continue
        need_artificial.append(i)

    if m == 0:
        # pure box problem: each variable goes to the bound its sign prefers
        z = np.empty(n)
        for j, c in enumerate(obj.coefficients):
            if c > 0:
                z[j] = problem.upper[j]
            elif c < 0:
                z[j] = problem.lower[j]
            elif not math.isinf(problem.lower[j]):
                z[j] = problem.lower[j]
            elif not math.isinf(problem.upper[j]):
                z[j] = problem.upper[j]
            else:
                z[j] = 0.0
            if math.isinf(z[j]):
                return LPSolution(
                    "unbounded", None, None, None, None, "objective grows without bound"
                )
        return _finish(problem, z)

    if need_artificial:
        art_cols = len(need_artificial)
        a = np.hstack([a, np.zeros((m, art_cols))])
        lo = np.concatenate([lo, np.zeros(art_cols)])
        up = np.concatenate([up, np.full(art_cols, math.inf)])
        free = np.concatenate([free, np.zeros(art_cols, dtype=bool)])
        at_upper = np.concatenate([at_upper, np.zeros(art_cols, dtype=bool)])
        art_at = {}
        for k, i in enumerate(need_artificial):
            col = ncols + k
            s = n + i
            resid = slack_val[i]
            if resid > up[s]:
                clamped = up[s]
                at_upper[s] = True
            else:
                clamped = lo[s]
                at_upper[s] = False
            a[i, col] = 1.0 if resid - clamped > 0 else -1.0
            art_at[i] = col
        # one basic column per row: the artificial where added, the slack elsewhere
        basis = [art_at.get(i, n + i) for i in range(m)]
        tab = _Tableau(a, b, lo, up, basis, at_upper, free)
        c1 = np.zeros(a.shape[1])
        c1[ncols:] = -1.0
        status = tab.run(c1, max_iter=2000 + 50 * a.shape[1])
        if status != "optimal":
            raise ConvergenceFailure("phase 1 did not terminate cleanly")
        art_total = float(tab.x[ncols:].sum())
        if art_total > 1e-7:
            return LPSolution(
                "infeasible", None, None, None, None,
                "constraints admit no point within the variable bounds",
            )
        # freeze artificials at zero for phase 2
        tab.up[ncols:] = 0.0
        tab.lo[ncols:] = 0.0
        c2 = np.zeros(a.shape[1])
        c2[:n] = obj.coefficients
    else:
        basis = [n + i for i in range(m)]
        tab = _Tableau(a, b, lo, up, basis, at_upper, free)
        c2 = np.zeros(ncols)
        c2[:n] = obj.coefficients

    status = tab.run(c2, max_iter=2000 + 50 * tab.a.shape[1])
    if status == "unbounded":
        return LPSolution("unbounded", None, None, None, None, "objective grows without bound")

    z = tab.x[:n].copy()
    # snap values sitting on a bound within tolerance
    z = np.where(np.abs(z - problem.lower) <= _TOL, problem.lower, z)
    z = np.where(np.abs(z - problem.upper) <= _TOL, problem.upper, z)
    return _finish(problem, z)


def _finish(problem: LPProblem, z: np.ndarray) -> LPSolution:
    obj = problem.objective
    contributions = obj.coefficients * z
    bounds_binding = {}
    for j, name in enumerate(obj.names):
        if not math.isinf(problem.lower[j]) and abs(z[j] - problem.lower[j]) <= _TOL:
            bounds_binding[name] = "lower"
        elif not math.isinf(problem.upper[j]) and abs(z[j] - problem.upper[j]) <= _TOL:
            bounds_binding[name] = "upper"
    con_binding = []
    for i, con in enumerate(problem.constraints):
        if abs(float(con.weights @ z) - con.bound) <= max(_TOL, 1e-12 * abs(con.bound)):
            con_binding.append(con.label or i)
    return LPSolution(
        status="optimal",
        z_star=z,
        objective_value=float(contributions.sum()),
        contributions=contributions,
        binding={"bounds": bounds_binding, "constraints": con_binding},
    )


@dataclass(frozen=True)
class AllocationRow:
    variable: str
    z: float
    level: float
    coefficient: float
    contribution: float
    lower: float
    upper: float


@dataclass(frozen=True)
class AllocationReport:
    rows: tuple[AllocationRow, ...]
    objective_value: float
    intercept: float
    predicted_volume: float


def allocation_report(
    solution: LPSolution,
    objective: ObjectiveSpec,
    meta: tuple[VariableMeta, ...],
    lower: np.ndarray,
    upper: np.ndarray,
) -> AllocationReport:
    """Natural-unit view of an optimal solution.

    Each variable's level is mean + z * sd from its metadata; predicted
    volume is intercept plus the Z-space objective value.
    """
    if solution.status != "optimal":
        raise ValueError(f"allocation needs an optimal solution, got {solution.status}")
    by_name = {m.name: m for m in meta}
    rows = []
    for j, name in enumerate(objective.names):
        vm = by_name[name]
        z = float(solution.z_star[j])
        rows.append(
            AllocationRow(
                variable=name,
                z=z,
                level=vm.mean + z * vm.sd,
                coefficient=float(objective.coefficients[j]),
                contribution=float(solution.contributions[j]),
                lower=float(lower[j]),
                upper=float(upper[j]),
            )
        )
    return AllocationReport(
        rows=tuple(rows),
        objective_value=float(solution.objective_value),
        intercept=objective.intercept,
        predicted_volume=objective.intercept + float(solution.objective_value),
    )
