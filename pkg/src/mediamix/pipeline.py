"""Configuration, orchestration, report emission, and model persistence.

The pipeline runs a fixed stage sequence. Every stage is wrapped so a
failure surfaces as PipelineStageError tagged with the stage name, carrying
the tables that were already finished; run_pipeline turns those into a
partial report before re-raising.

Report and bundle files are JSON with sorted keys, so a fixed seed yields
byte-identical output across runs. The bundle additionally records a wall
clock timestamp, which is why determinism is promised for the report and the
DOT graph, not for the bundle file.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import causal as causal_mod
from . import factor as factor_mod
from . import mixopt, stats, synth
from .dataset import Dataset, VariableMeta
from .errors import ConfigError, DataError, PipelineStageError

STAGES = (
    "data",
    "summary",
    "standardize",
    "correlation",
    "regression_full",
    "regression_stepwise",
    "factor",
    "scores",
    "regression_factors",
    "objective",
    "optimize",
    "allocation",
    "causal",
)


@dataclass(frozen=True)
class PipelineConfig:
    seed: int
    csv_path: str | None = None
    synthesis: synth.SynthesisSpec | None = None
    response: str = "nrx"
    p_enter: float = 0.05
    p_remove: float = 0.10
    factor_k: int | None = 2
    kaiser_normalize: bool = True
    rotation_tol: float = 1e-6
    rotation_max_sweeps: int = 100
    lp_lower: float | dict[str, float] = -2.0
    lp_upper: float | dict[str, float] = 4.0
    lp_constraints: tuple[dict, ...] = ()
    causal: causal_mod.CausalConfig = causal_mod.CausalConfig()
    repair_correlation: bool = False
    output_dir: str = "out"

    def __post_init__(self):
        if (self.csv_path is None) == (self.synthesis is None):
            raise ConfigError("exactly one data source (csv or synthesis) is required")
        if not self.p_enter < self.p_remove:
            raise ConfigError("stepwise p_enter must be strictly below p_remove")
        if self.synthesis is not None:
            if self.response not in self.synthesis.names:
                raise ConfigError(
                    f"response {self.response!r} is not among the declared variables"
                )
            # the top-level seed is the one source of truth
            if self.synthesis.seed != self.seed:
                object.__setattr__(
                    self, "synthesis", dataclasses.replace(self.synthesis, seed=self.seed)
                )
        for con in self.lp_constraints:
            if con.get("sense", "<=") not in mixopt.SENSES:
                raise ConfigError(f"constraint sense must be one of {mixopt.SENSES}")
            if ("total" in con) == ("weights" in con):
                raise ConfigError("constraint needs exactly one of 'total' or 'weights'")

    def with_overrides(self, seed: int | None = None, output_dir: str | None = None) -> "PipelineConfig":
        cfg = self
        if seed is not None:
            cfg = dataclasses.replace(cfg, seed=seed)
        if output_dir is not None:
            cfg = dataclasses.replace(cfg, output_dir=output_dir)
        return cfg


def _meta_to_dict(m: VariableMeta) -> dict:
    return {
        "name": m.name,
        "mean": m.mean,
        "sd": m.sd,
        "min": m.min,
        "max": m.max,
        "nonnegative": m.nonnegative,
    }


def _meta_from_dict(d: dict) -> VariableMeta:
    return VariableMeta(
        name=str(d["name"]),
        mean=float(d["mean"]),
        sd=float(d["sd"]),
        min=float(d["min"]),
        max=float(d["max"]),
        nonnegative=bool(d.get("nonnegative", False)),
    )


def config_to_dict(config: PipelineConfig) -> dict:
    """JSON form of a config; the inverse of parse_config."""
    if config.synthesis is not None:
        data = {
            "synthesis": {
                "n": config.synthesis.n,
                "clip_policy": config.synthesis.clip_policy,
                "max_attempts": config.synthesis.max_attempts,
                "variables": [_meta_to_dict(m) for m in config.synthesis.meta],
                "correlation": config.synthesis.target_correlation.tolist(),
            }
        }
    else:
        data = {"csv": config.csv_path}
    return {
        "seed": config.seed,
        "output_dir": config.output_dir,
        "response": config.response,
        "data": data,
        "stepwise": {"p_enter": config.p_enter, "p_remove": config.p_remove},
        "factor": {
            "k": config.factor_k,
            "kaiser_normalize": config.kaiser_normalize,
            "tol": config.rotation_tol,
            "max_sweeps": config.rotation_max_sweeps,
        },
        "lp": {
            "lower": config.lp_lower,
            "upper": config.lp_upper,
            "constraints": list(config.lp_constraints),
        },
        "causal": {
            "alpha": config.causal.alpha,
            "max_cond_size": config.causal.max_cond_size,
            "stable": config.causal.stable,
        },
        "repair_correlation": config.repair_correlation,
    }


def parse_config(source: dict | str | Path) -> PipelineConfig:
    """Build a PipelineConfig from a dict, a JSON string, or a file path."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        try:
            raw = json.loads(path.read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    else:
        raw = source
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")

    try:
        seed = int(raw.get("seed", 0))
        data = raw.get("data")
        if not isinstance(data, dict):
            raise ConfigError("config needs a 'data' section with 'csv' or 'synthesis'")
        csv_path = None
        synthesis = None
        repair = bool(raw.get("repair_correlation", False))
        if "csv" in data and "synthesis" in data:
            raise ConfigError("data section must name 'csv' or 'synthesis', not both")
        if "csv" in data:
            csv_path = str(data["csv"])
        elif "synthesis" in data:
            sd = data["synthesis"]
            meta = tuple(_meta_from_dict(v) for v in sd["variables"])
            corr = np.asarray(sd["correlation"], dtype=float)
            if repair:
                corr = synth.nearest_pd_repair(corr)
            synthesis = synth.SynthesisSpec(
                meta=meta,
                target_correlation=corr,
                n=int(sd["n"]),
                seed=seed,
                clip_policy=str(sd.get("clip_policy", "clip_to_bounds")),
                max_attempts=int(sd.get("max_attempts", 100)),
            )
        else:
            raise ConfigError("data section needs 'csv' or 'synthesis'")

        stepwise = raw.get("stepwise", {})
        fac = raw.get("factor", {})
        lp = raw.get("lp", {})
        ca = raw.get("causal", {})
        constraints = []
        for con in lp.get("constraints", []):
            parsed = {"sense": str(con.get("sense", "<="))}
            if "total" in con:
                parsed["total"] = float(con["total"])
            if "weights" in con:
                parsed["weights"] = {str(k): float(v) for k, v in con["weights"].items()}
                parsed["bound"] = float(con["bound"])
            constraints.append(parsed)

        def bound_of(value, default):
            if value is None:
                return default
            if isinstance(value, dict):
                return {str(k): float(v) for k, v in value.items()}
            return float(value)

        return PipelineConfig(
            seed=seed,
            csv_path=csv_path,
            synthesis=synthesis,
            response=str(raw.get("response", "nrx")),
            p_enter=float(stepwise.get("p_enter", 0.05)),
            p_remove=float(stepwise.get("p_remove", 0.10)),
            factor_k=None if fac.get("k") is None else int(fac.get("k")),
            kaiser_normalize=bool(fac.get("kaiser_normalize", True)),
            rotation_tol=float(fac.get("tol", 1e-6)),
            rotation_max_sweeps=int(fac.get("max_sweeps", 100)),
            lp_lower=bound_of(lp.get("lower"), -2.0),
            lp_upper=bound_of(lp.get("upper"), 4.0),
            lp_constraints=tuple(constraints),
            causal=causal_mod.CausalConfig(
                alpha=float(ca.get("alpha", 0.05)),
                max_cond_size=None if ca.get("max_cond_size") is None else int(ca["max_cond_size"]),
                stable=bool(ca.get("stable", False)),
            ),
            repair_correlation=repair,
            output_dir=str(raw.get("output_dir", "out")),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def config_hash(config: PipelineConfig) -> str:
    """Hash of every semantically meaningful field; output_dir is cosmetic."""
    payload = config_to_dict(config)
    payload.pop("output_dir")
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


@dataclass(frozen=True)
class ModelBundle:
    meta: tuple[VariableMeta, ...]
    correlation: np.ndarray
    correlation_names: tuple[str, ...]
    fit_full: stats.RegressionFit
    fit_stepwise: stats.RegressionFit
    stepwise_trace: stats.StepwiseTrace
    factor: factor_mod.FactorSolution
    fit_factors: stats.RegressionFit
    objective: mixopt.ObjectiveSpec
    lp_lower: np.ndarray
    lp_upper: np.ndarray
    lp_constraints: tuple[mixopt.LinearConstraint, ...]
    solution: mixopt.LPSolution
    graph: causal_mod.CPDAG
    seed: int
    config_hash: str
    created_at: str


class PipelineRun:
    """Mutable scratch state while stages execute; exposed for the CLI."""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.dataset: Dataset | None = None
        self.z_all: np.ndarray | None = None
        self.corr_all: np.ndarray | None = None
        self.corr_x: np.ndarray | None = None
        self.predictors: tuple[str, ...] = ()
        self.fit_full: stats.RegressionFit | None = None
        self.fit_stepwise: stats.RegressionFit | None = None
        self.trace: stats.StepwiseTrace | None = None
        self.factor: factor_mod.FactorSolution | None = None
        self.scores: np.ndarray | None = None
        self.fit_factors: stats.RegressionFit | None = None
        self.objective: mixopt.ObjectiveSpec | None = None
        self.lp_problem: mixopt.LPProblem | None = None
        self.solution: mixopt.LPSolution | None = None
        self.allocation: mixopt.AllocationReport | None = None
        self.graph: causal_mod.CPDAG | None = None
        self.tables: dict[str, dict] = {}
        self.bundle: ModelBundle | None = None


def _fmt(value, digits: int) -> str:
    return f"{value:.{digits}f}"


def _fit_table(fit: stats.RegressionFit) -> dict:
    terms = []
    names = fit.term_names()
    offset = 1 if fit.include_intercept else 0
    for i, term in enumerate(names):
        is_intercept = fit.include_intercept and i == 0
        coef = fit.intercept if is_intercept else float(fit.coefficients[i - offset])
        std_beta = None if is_intercept else float(fit.std_betas[i - offset])
        terms.append(
            {
                "term": term,
                "coefficient": coef,
                "std_error": float(fit.std_errors[i]),
                "t": float(fit.t_stats[i]),
                "p": float(fit.p_values[i]),
                "std_beta": std_beta,
                "display": {
                    "coefficient": _fmt(coef, 3),
                    "std_error": _fmt(float(fit.std_errors[i]), 3),
                    "t": _fmt(float(fit.t_stats[i]), 3),
                    "p": _fmt(float(fit.p_values[i]), 3),
                    "std_beta": None if std_beta is None else _fmt(std_beta, 3),
                },
            }
        )
    return {
        "terms": terms,
        "r_squared": fit.r_squared,
        "adj_r_squared": fit.adj_r_squared,
        "residual_se": fit.residual_se,
        "n": fit.n,
        "df_resid": fit.df_resid,
    }


def _loading_table(names, matrix, digits=3) -> dict:
    rows = []
    for i, name in enumerate(names):
        vals = [float(v) for v in matrix[i]]
        rows.append(
            {"variable": name, "values": vals, "display": [_fmt(v, digits) for v in vals]}
        )
    return {"rows": rows, "components": int(matrix.shape[1])}


def execute(config: PipelineConfig, through: str | None = None) -> PipelineRun:
    """Run the stage sequence, optionally stopping after `through`."""
    if through is not None and through not in STAGES:
        raise ConfigError(f"unknown stage {through!r}")
    run = PipelineRun(config)
    tables = run.tables

    def stage_guard(name):
        class _Guard:
            def __enter__(self):
                return None

            def __exit__(self, exc_type, exc, tb):
                if exc is not None and not isinstance(exc, PipelineStageError):
                    raise PipelineStageError(name, exc, dict(tables)) from exc
                return False

        return _Guard()

    def done(name) -> bool:
        return through == name

    with stage_guard("data"):
        if config.synthesis is not None:
            run.dataset = synth.synthesize(config.synthesis)
        else:
            run.dataset = Dataset.from_csv(config.csv_path)
        if config.response not in run.dataset.names:
            raise DataError(f"response {config.response!r} not found in the data")
        if run.dataset.n < run.dataset.p + 2:
            raise DataError(
                f"need at least p + 2 = {run.dataset.p + 2} rows, got {run.dataset.n}"
            )
        run.predictors = tuple(n for n in run.dataset.names if n != config.response)
    if done("data"):
        return run

    with stage_guard("summary"):
        rows = run.dataset.summary()
        for r in rows:
            r["display"] = {
                "min": _fmt(r["min"], 2),
                "max": _fmt(r["max"], 2),
                "mean": _fmt(r["mean"], 2),
                "sd": _fmt(r["sd"], 2),
            }
        tables["summary_statistics"] = {"rows": rows}
    if done("summary"):
        return run

    with stage_guard("standardize"):
        run.z_all = stats.standardize(run.dataset)
    if done("standardize"):
        return run

    with stage_guard("correlation"):
        run.corr_all = stats.correlation(run.z_all)
        keep = [i for i, n in enumerate(run.dataset.names) if n != config.response]
        run.corr_x = run.corr_all[np.ix_(keep, keep)]
    if done("correlation"):
        return run

    y = run.dataset.column(config.response)
    x_cols = np.column_stack([run.dataset.column(n) for n in run.predictors])

    with stage_guard("regression_full"):
        run.fit_full = stats.ols_fit(y, x_cols, True, run.predictors)
        tables["regression_full"] = _fit_table(run.fit_full)
    if done("regression_full"):
        return run

    with stage_guard("regression_stepwise"):
        run.fit_stepwise, run.trace = stats.stepwise_fit(
            y, x_cols, config.p_enter, config.p_remove, run.predictors
        )
        table = _fit_table(run.fit_stepwise)
        table["steps"] = [
            {
                "action": s.action,
                "variable": s.variable,
                "p_value": s.p_value_at_decision,
                "r_squared_after": s.model_r_squared_after,
            }
            for s in run.trace.steps
        ]
        tables["regression_stepwise"] = table
    if done("regression_stepwise"):
        return run

    with stage_guard("factor"):
        run.factor = factor_mod.analyze(
            run.corr_x,
            k=config.factor_k,
            names=run.predictors,
            kaiser_normalize=config.kaiser_normalize,
            tol=config.rotation_tol,
            max_sweeps=config.rotation_max_sweeps,
        )
        vt = []
        for row in run.factor.variance_table:
            d = dict(row)
            d["display"] = {
                k: (None if d[k] is None else _fmt(d[k], 3))
                for k in (
                    "initial_eigenvalue",
                    "initial_pct_variance",
                    "initial_cum_pct",
                    "extraction_ssl",
                    "extraction_pct_variance",
                    "extraction_cum_pct",
                    "rotation_ssl",
                    "rotation_pct_variance",
                    "rotation_cum_pct",
                )
            }
            vt.append(d)
        tables["variance_explained"] = {"rows": vt}
        loadings = _loading_table(run.predictors, run.factor.loadings_rotated)
        loadings["sweeps"] = run.factor.rotation_sweeps
        loadings["converged"] = run.factor.rotation_converged
        tables["rotated_loadings"] = loadings
        tables["score_coefficients"] = _loading_table(
            run.predictors, run.factor.score_coefficients
        )
    if done("factor"):
        return run

    with stage_guard("scores"):
        keep = [i for i, n in enumerate(run.dataset.names) if n != config.response]
        run.scores = factor_mod.factor_scores(
            run.z_all[:, keep], run.factor.score_coefficients
        )
    if done("scores"):
        return run

    with stage_guard("regression_factors"):
        factor_names = tuple(f"factor{i + 1}" for i in range(run.factor.k))
        run.fit_factors = stats.ols_fit(y, run.scores, True, factor_names)
        tables["regression_factors"] = _fit_table(run.fit_factors)
    if done("regression_factors"):
        return run

    with stage_guard("objective"):
        run.objective = mixopt.compose_objective(
            run.fit_factors.coefficients,
            run.factor.score_coefficients,
            run.fit_factors.intercept,
            run.predictors,
        )
    if done("objective"):
        return run

    with stage_guard("optimize"):
        lower = _resolve_bound(config.lp_lower, run.predictors)
        upper = _resolve_bound(config.lp_upper, run.predictors)
        constraints = tuple(
            _build_constraint(c, run.predictors) for c in config.lp_constraints
        )
        run.lp_problem = mixopt.LPProblem(run.objective, lower, upper, constraints)
        run.solution = mixopt.solve_lp(run.lp_problem)
    if done("optimize"):
        return run

    with stage_guard("allocation"):
        table = {"status": run.solution.status}
        if run.solution.status == "optimal":
            run.allocation = mixopt.allocation_report(
                run.solution,
                run.objective,
                run.dataset.meta,
                run.lp_problem.lower,
                run.lp_problem.upper,
            )
            table["rows"] = [
                {
                    "variable": r.variable,
                    "coefficient": r.coefficient,
                    "z": r.z,
                    "contribution": r.contribution,
                    "level": r.level,
                    "lower": r.lower,
                    "upper": r.upper,
                    "display": {
                        "coefficient": _fmt(r.coefficient, 2),
                        "z": _fmt(r.z, 2),
                        "contribution": _fmt(r.contribution, 2),
                        "level": _fmt(r.level, 2),
                        "lower": _fmt(r.lower, 2),
                        "upper": _fmt(r.upper, 2),
                    },
                }
                for r in run.allocation.rows
            ]
            table["objective_value"] = run.allocation.objective_value
            table["intercept"] = run.allocation.intercept
            table["predicted_volume"] = run.allocation.predicted_volume
            table["binding"] = run.solution.binding
            table["display"] = {
                "objective_value": _fmt(run.allocation.objective_value, 2),
                "predicted_volume": _fmt(run.allocation.predicted_volume, 2),
            }
        else:
            table["reason"] = run.solution.reason
        tables["optimization"] = table
    if done("allocation"):
        return run

    with stage_guard("causal"):
        run.graph = causal_mod.pc_pattern(
            run.corr_all, run.dataset.n, config.causal, run.dataset.names
        )
    if done("causal"):
        return run

    run.bundle = ModelBundle(
        meta=run.dataset.meta,
        correlation=run.corr_all,
        correlation_names=run.dataset.names,
        fit_full=run.fit_full,
        fit_stepwise=run.fit_stepwise,
        stepwise_trace=run.trace,
        factor=run.factor,
        fit_factors=run.fit_factors,
        objective=run.objective,
        lp_lower=run.lp_problem.lower,
        lp_upper=run.lp_problem.upper,
        lp_constraints=run.lp_problem.constraints,
        solution=run.solution,
        graph=run.graph,
        seed=config.seed,
        config_hash=config_hash(config),
        created_at=datetime.now(timezone.utc).isoformat(),
    )
    return run


def _resolve_bound(spec: float | dict, names: tuple[str, ...]) -> np.ndarray:
    if isinstance(spec, dict):
        missing = [n for n in names if n not in spec]
        if missing:
            raise ConfigError(f"bounds missing for variables: {missing}")
        return np.array([float(spec[n]) for n in names])
    return np.full(len(names), float(spec))


def _build_constraint(con: dict, names: tuple[str, ...]) -> mixopt.LinearConstraint:
    sense = con.get("sense", "<=")
    if "total" in con:
        return mixopt.LinearConstraint(
            np.ones(len(names)), float(con["total"]), sense, label="total"
        )
    weights = con["weights"]
    unknown = [k for k in weights if k not in names]
    if unknown:
        raise ConfigError(f"constraint names not in the model: {unknown}")
    w = np.array([float(weights.get(n, 0.0)) for n in names])
    return mixopt.LinearConstraint(w, float(con["bound"]), sense, label=con.get("label", ""))


def _report_dict(run: PipelineRun) -> dict:
    report = {
        "provenance": {
            "seed": run.config.seed,
            "config_hash": config_hash(run.config),
        },
        "tables": run.tables,
    }
    if run.graph is not None:
        report["causal"] = _graph_to_dict(run.graph)
    return report


def _graph_to_dict(graph: causal_mod.CPDAG) -> dict:
    edges = sorted(
        ({"a": e.a, "b": e.b, "mark": e.mark} for e in graph.edges),
        key=lambda d: (d["a"], d["b"], d["mark"]),
    )
    sepsets = sorted(
        ({"pair": list(pair), "sepset": list(s)} for pair, s in graph.sepsets.items()),
        key=lambda d: d["pair"],
    )
    return {"nodes": list(graph.nodes), "edges": edges, "sepsets": sepsets}


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _fit_to_dict(fit: stats.RegressionFit) -> dict:
    return {
        "names": list(fit.names),
        "include_intercept": fit.include_intercept,
        "intercept": fit.intercept,
        "coefficients": fit.coefficients.tolist(),
        "std_errors": fit.std_errors.tolist(),
        "t_stats": fit.t_stats.tolist(),
        "p_values": fit.p_values.tolist(),
        "std_betas": fit.std_betas.tolist(),
        "r_squared": fit.r_squared,
        "adj_r_squared": fit.adj_r_squared,
        "residual_se": fit.residual_se,
        "df_resid": fit.df_resid,
        "n": fit.n,
        "residuals": fit.residuals.tolist(),
    }


def _fit_from_dict(d: dict) -> stats.RegressionFit:
    return stats.RegressionFit(
        names=tuple(d["names"]),
        include_intercept=bool(d["include_intercept"]),
        intercept=float(d["intercept"]),
        coefficients=np.asarray(d["coefficients"], dtype=float),
        std_errors=np.asarray(d["std_errors"], dtype=float),
        t_stats=np.asarray(d["t_stats"], dtype=float),
        p_values=np.asarray(d["p_values"], dtype=float),
        std_betas=np.asarray(d["std_betas"], dtype=float),
        r_squared=float(d["r_squared"]),
        adj_r_squared=float(d["adj_r_squared"]),
        residual_se=float(d["residual_se"]),
        df_resid=int(d["df_resid"]),
        n=int(d["n"]),
        residuals=np.asarray(d["residuals"], dtype=float),
    )


def bundle_to_dict(bundle: ModelBundle) -> dict:
    sol = bundle.solution
    return {
        "variables": [_meta_to_dict(m) for m in bundle.meta],
        "correlation": {
            "names": list(bundle.correlation_names),
            "matrix": bundle.correlation.tolist(),
        },
        "regression_full": _fit_to_dict(bundle.fit_full),
        "regression_stepwise": _fit_to_dict(bundle.fit_stepwise),
        "stepwise_trace": [
            {
                "action": s.action,
                "variable": s.variable,
                "p_value": s.p_value_at_decision,
                "r_squared_after": s.model_r_squared_after,
            }
            for s in bundle.stepwise_trace.steps
        ],
        "factor": {
            "names": list(bundle.factor.names),
            "eigenvalues": bundle.factor.eigenvalues.tolist(),
            "loadings_unrotated": bundle.factor.loadings_unrotated.tolist(),
            "loadings_rotated": bundle.factor.loadings_rotated.tolist(),
            "rotation": bundle.factor.rotation.tolist(),
            "score_coefficients": bundle.factor.score_coefficients.tolist(),
            "variance_table": [dict(r) for r in bundle.factor.variance_table],
            "k": bundle.factor.k,
            "rotation_sweeps": bundle.factor.rotation_sweeps,
            "rotation_converged": bundle.factor.rotation_converged,
        },
        "regression_factors": _fit_to_dict(bundle.fit_factors),
        "objective": {
            "names": list(bundle.objective.names),
            "coefficients": bundle.objective.coefficients.tolist(),
            "intercept": bundle.objective.intercept,
        },
        "lp": {
            "lower": bundle.lp_lower.tolist(),
            "upper": bundle.lp_upper.tolist(),
            "constraints": [
                {
                    "weights": c.weights.tolist(),
                    "bound": c.bound,
                    "sense": c.sense,
                    "label": c.label,
                }
                for c in bundle.lp_constraints
            ],
        },
        "solution": {
            "status": sol.status,
            "z_star": None if sol.z_star is None else sol.z_star.tolist(),
            "objective_value": sol.objective_value,
            "contributions": None if sol.contributions is None else sol.contributions.tolist(),
            "binding": sol.binding,
            "reason": sol.reason,
        },
        "causal": _graph_to_dict(bundle.graph),
        "provenance": {
            "seed": bundle.seed,
            "config_hash": bundle.config_hash,
            "created_at": bundle.created_at,
        },
    }


def bundle_from_dict(d: dict) -> ModelBundle:
    factor = d["factor"]
    sol = d["solution"]
    graph = causal_mod.CPDAG(
        nodes=tuple(d["causal"]["nodes"]),
        edges=tuple(
            causal_mod.Edge(e["a"], e["b"], e["mark"]) for e in d["causal"]["edges"]
        ),
        sepsets={
            (s["pair"][0], s["pair"][1]): tuple(s["sepset"]) for s in d["causal"]["sepsets"]
        },
    )
    return ModelBundle(
        meta=tuple(_meta_from_dict(v) for v in d["variables"]),
        correlation=np.asarray(d["correlation"]["matrix"], dtype=float),
        correlation_names=tuple(d["correlation"]["names"]),
        fit_full=_fit_from_dict(d["regression_full"]),
        fit_stepwise=_fit_from_dict(d["regression_stepwise"]),
        stepwise_trace=stats.StepwiseTrace(
            tuple(
                stats.StepwiseStep(
                    s["action"], s["variable"], float(s["p_value"]), float(s["r_squared_after"])
                )
                for s in d["stepwise_trace"]
            )
        ),
        factor=factor_mod.FactorSolution(
            names=tuple(factor["names"]),
            eigenvalues=np.asarray(factor["eigenvalues"], dtype=float),
            loadings_unrotated=np.asarray(factor["loadings_unrotated"], dtype=float),
            loadings_rotated=np.asarray(factor["loadings_rotated"], dtype=float),
            rotation=np.asarray(factor["rotation"], dtype=float),
            score_coefficients=np.asarray(factor["score_coefficients"], dtype=float),
            variance_table=tuple(factor["variance_table"]),
            k=int(factor["k"]),
            rotation_sweeps=int(factor["rotation_sweeps"]),
            rotation_converged=bool(factor["rotation_converged"]),
        ),
        fit_factors=_fit_from_dict(d["regression_factors"]),
        objective=mixopt.ObjectiveSpec(
            tuple(d["objective"]["names"]),
            np.asarray(d["objective"]["coefficients"], dtype=float),
            float(d["objective"]["intercept"]),
        ),
        lp_lower=np.asarray(d["lp"]["lower"], dtype=float),
        lp_upper=np.asarray(d["lp"]["upper"], dtype=float),
        lp_constraints=tuple(
            mixopt.LinearConstraint(
                np.asarray(c["weights"], dtype=float),
                float(c["bound"]),
                str(c["sense"]),
                str(c.get("label", "")),
            )
            for c in d["lp"]["constraints"]
        ),
        solution=mixopt.LPSolution(
            status=str(sol["status"]),
            z_star=None if sol["z_star"] is None else np.asarray(sol["z_star"], dtype=float),
            objective_value=sol["objective_value"],
            contributions=None
            if sol["contributions"] is None
            else np.asarray(sol["contributions"], dtype=float),
            binding=sol["binding"],
            reason=sol.get("reason"),
        ),
        graph=graph,
        seed=int(d["provenance"]["seed"]),
        config_hash=str(d["provenance"]["config_hash"]),
        created_at=str(d["provenance"]["created_at"]),
    )


def save_bundle(bundle: ModelBundle, path: str | Path) -> None:
    _write_json(Path(path), bundle_to_dict(bundle))


def load_bundle(path: str | Path) -> ModelBundle:
    return bundle_from_dict(json.loads(Path(path).read_text()))


def run_pipeline(config: PipelineConfig) -> tuple[ModelBundle, dict[str, Path]]:
    """Execute every stage and write report.json, graph.dot, bundle.json.

    Synthesized data is also written as dataset.csv. On a stage failure a
    partial report (completed tables plus the failing stage) is still
    written before the PipelineStageError propagates.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        run = execute(config)
    except PipelineStageError as err:
        partial = {
            "provenance": {"seed": config.seed, "config_hash": config_hash(config)},
            "tables": err.tables,
            "failed_stage": err.stage,
            "error": str(err.original),
        }
        _write_json(out / "report.json", partial)
        raise

    paths: dict[str, Path] = {}
    paths["report"] = out / "report.json"
    _write_json(paths["report"], _report_dict(run))
    paths["graph"] = out / "graph.dot"
    paths["graph"].write_text(causal_mod.export_dot(run.graph))
    paths["bundle"] = out / "bundle.json"
    save_bundle(run.bundle, paths["bundle"])
    if config.synthesis is not None:
        paths["dataset"] = out / "dataset.csv"
        run.dataset.to_csv(paths["dataset"])
    return run.bundle, paths
