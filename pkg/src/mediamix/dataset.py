"""Observation matrices with per-variable metadata, plus CSV ingestion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import DataError


@dataclass(frozen=True)
class VariableMeta:
    """Name and summary statistics for one variable, in natural units.

    ``sd`` may be zero for ingested data (e.g. a constant CSV column); the
    operations that require a positive SD (synthesis, standardization) enforce
    that at the point of use so the failure can name the offending column.
    """

    name: str
    mean: float
    sd: float
    min: float
    max: float
    nonnegative: bool = False

    def __post_init__(self):
        if self.sd < 0:
            raise ValueError(f"{self.name}: sd must be nonnegative, got {self.sd}")
        if not (self.min <= self.mean <= self.max):
            raise ValueError(
                f"{self.name}: need min <= mean <= max, got "
                f"{self.min} / {self.mean} / {self.max}"
            )
        if self.nonnegative and self.min < 0:
            raise ValueError(f"{self.name}: flagged nonnegative but min < 0")


@dataclass(frozen=True)
class Dataset:
    """An n x p observation matrix and the metadata for its p columns."""

    meta: tuple[VariableMeta, ...]
    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2:
            raise ValueError("rows must be a 2-d matrix")
        if rows.shape[1] != len(self.meta):
            raise ValueError(
                f"rows have {rows.shape[1]} columns but meta lists {len(self.meta)}"
            )
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def p(self) -> int:
        return self.rows.shape[1]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(m.name for m in self.meta)

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.names.index(name)]

    def drop(self, name: str) -> "Dataset":
        """Return a copy without the named column."""
        keep = [i for i, m in enumerate(self.meta) if m.name != name]
        if len(keep) == len(self.meta):
            raise KeyError(name)
        return Dataset(tuple(self.meta[i] for i in keep), self.rows[:, keep])

    def summary(self) -> list[dict]:
        """Per-column sample statistics (n, min, max, mean, sd with n-1)."""
        out = []
        for j, m in enumerate(self.meta):
            col = self.rows[:, j]
            out.append(
                {
                    "variable": m.name,
                    "n": self.n,
                    "min": float(col.min()),
                    "max": float(col.max()),
                    "mean": float(col.mean()),
                    "sd": float(col.std(ddof=1)) if self.n > 1 else 0.0,
                }
            )
        return out

    def to_csv(self, path) -> None:
        pd.DataFrame(self.rows, columns=list(self.names)).to_csv(path, index=False)

    @classmethod
    def from_csv(cls, path) -> "Dataset":
        """Read an all-numeric CSV with a header row of variable names.

        Metadata is rebuilt from the sample itself.
        """
        try:
            frame = pd.read_csv(path)
        except Exception as exc:
            raise DataError(f"cannot read CSV {path}: {exc}") from exc
        if frame.shape[0] < 1 or frame.shape[1] < 1:
            raise DataError(f"CSV {path} is empty")
        bad = [c for c in frame.columns if not np.issubdtype(frame[c].dtype, np.number)]
        if bad:
            raise DataError(f"non-numeric columns in {path}: {bad}")
        if frame.isna().any().any():
            raise DataError(f"missing values in {path}")
        rows = frame.to_numpy(dtype=float)
        meta = []
        for j, name in enumerate(frame.columns):
            col = rows[:, j]
            sd = float(col.std(ddof=1)) if rows.shape[0] > 1 else 0.0
            meta.append(
                VariableMeta(
                    name=str(name),
                    mean=float(col.mean()),
                    sd=sd,
                    min=float(col.min()),
                    max=float(col.max()),
                    nonnegative=bool(col.min() >= 0),
                )
            )
        return cls(tuple(meta), rows)
