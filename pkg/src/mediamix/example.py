"""Bundled example: a pharmaceutical marketing dataset description.

Twelve monthly series: eleven promotional-activity variables and the new
prescription volume nrx they drive. The metadata (means, SDs, observed
ranges over 71 months) is shipped directly; the correlation matrix is NOT a
sample correlation. It is reconstructed from a published two-component
loading pattern via reconstruct_correlation, which makes it consistent with
that factor structure but deliberately labeled as derived.
"""

from __future__ import annotations

import numpy as np

from .dataset import VariableMeta
from .pipeline import PipelineConfig
from .synth import SynthesisSpec, reconstruct_correlation

RESPONSE = "nrx"

EXAMPLE_SEED = 20240

# name, mean, sd, min, max over 71 monthly observations
_VARIABLES = (
    ("con", 54113.88, 21606.72, 7657.0, 99188.0),
    ("cal", 38964.52, 17162.88, 5361.0, 77657.0),
    ("coc", 4357317.52, 1740648.34, 737297.0, 8041793.0),
    ("cpc", 87.92, 10.67, 62.0, 114.0),
    ("min", 182602.33, 72862.46, 32682.0, 334945.0),
    ("jas", 217926.80, 112177.79, 0.0, 486943.0),
    ("ads", 14.12, 6.57, 0.0, 30.0),
    ("adp", 39.16, 20.22, 0.0, 82.0),
    ("sam", 1094355.12, 627396.75, 615.0, 2614948.0),
    ("eus", 3556610.79, 1743431.60, 1230.0, 8204439.0),
    ("rvs", 8582259.60, 3820827.20, 6660.0, 18502700.0),
    ("nrx", 1080544.09, 512578.60, 84895.0, 2466777.0),
)

# Two-component loading pattern behind the example correlation matrix. The
# first eleven rows are the promotional variables; the last row ties the
# response in with its standardized regression weights on the two components.
_LOADINGS = (
    ("con", 0.988, 0.046),
    ("cal", 0.984, 0.053),
    ("coc", 0.964, 0.066),
    ("cpc", -0.768, 0.098),
    ("min", 0.979, 0.031),
    ("jas", 0.437, 0.873),
    ("ads", 0.594, 0.787),
    ("adp", 0.539, 0.828),
    ("sam", 0.958, 0.169),
    ("eus", 0.921, 0.193),
    ("rvs", 0.951, 0.137),
    ("nrx", 0.918, 0.208),
)


def example_metadata() -> tuple[VariableMeta, ...]:
    return tuple(
        VariableMeta(name=n, mean=mean, sd=sd, min=lo, max=hi, nonnegative=lo >= 0)
        for n, mean, sd, lo, hi in _VARIABLES
    )


def example_loadings(include_response: bool = True) -> np.ndarray:
    rows = _LOADINGS if include_response else _LOADINGS[:-1]
    return np.array([[r[1], r[2]] for r in rows])


def example_correlation(include_response: bool = True) -> np.ndarray:
    """Derived 12 x 12 (or 11 x 11) correlation matrix, positive definite."""
    return reconstruct_correlation(example_loadings(include_response))


def example_synthesis(
    n: int = 71,
    seed: int = EXAMPLE_SEED,
    clip_policy: str = "clip_to_bounds",
) -> SynthesisSpec:
    return SynthesisSpec(
        meta=example_metadata(),
        target_correlation=example_correlation(),
        n=n,
        seed=seed,
        clip_policy=clip_policy,
    )


def example_config(output_dir: str = "out", seed: int = EXAMPLE_SEED) -> PipelineConfig:
    """Pipeline configuration for the bundled example.

    Synthesizes 71 months, fixes a two-component extraction, bounds every
    Z-score to [-2, 4], and caps the summed Z-scores at 30.
    """
    return PipelineConfig(
        seed=seed,
        synthesis=example_synthesis(seed=seed),
        response=RESPONSE,
        factor_k=2,
        lp_lower=-2.0,
        lp_upper=4.0,
        lp_constraints=({"total": 30.0, "sense": "<="},),
        output_dir=output_dir,
    )
