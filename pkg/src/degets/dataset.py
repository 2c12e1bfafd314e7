"""Observational dataset container and CSV ingestion.

A dataset bundles covariates, a binary treatment indicator and the factual
outcome, plus (when the source provides them) both potential outcomes and
an experimental-subset flag. Arrays are copied to float64/int64 on
construction and frozen, so fitted models can safely share them.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np


class OutcomeKind(str, Enum):
    CONTINUOUS = "continuous"
    BINARY = "binary"


class SchemaError(ValueError):
    """A required column is missing from the CSV header."""


class CsvParseError(ValueError):
    """A CSV cell could not be parsed as a number."""


class ValidationError(ValueError):
    """Data violates a dataset invariant."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Dataset:
    """Rows of (x, t, y) with optional ground truth.

    potential_outcomes is (y0, y1) for every row or None; factual
    consistency (y[i] == y_{t[i]}[i]) is enforced when present.
    """

    covariates: np.ndarray
    treatment: np.ndarray
    outcome: np.ndarray
    potential_outcomes: tuple[np.ndarray, np.ndarray] | None = None
    experimental_flag: np.ndarray | None = None
    outcome_kind: OutcomeKind = OutcomeKind.CONTINUOUS

    def __post_init__(self):
        X = np.array(self.covariates, dtype=np.float64)
        if X.ndim != 2:
            raise ValidationError("covariates must be a 2-D matrix")
        t = np.array(self.treatment, dtype=np.int64)
        y = np.array(self.outcome, dtype=np.float64)
        n = X.shape[0]
        if n == 0:
            raise ValidationError("empty dataset")
        if t.shape != (n,) or y.shape != (n,):
            raise ValidationError("treatment/outcome length does not match covariate rows")
        if not np.isin(t, (0, 1)).all():
            bad = t[~np.isin(t, (0, 1))][0]
            raise ValidationError(f"treatment values must be 0 or 1, found {bad}")
        if self.outcome_kind is OutcomeKind.BINARY and not np.isin(y, (0.0, 1.0)).all():
            raise ValidationError("binary outcome contains values outside {0, 1}")
        object.__setattr__(self, "covariates", _frozen(X))
        object.__setattr__(self, "treatment", _frozen(t))
        object.__setattr__(self, "outcome", _frozen(y))
        if self.potential_outcomes is not None:
            y0 = np.array(self.potential_outcomes[0], dtype=np.float64)
            y1 = np.array(self.potential_outcomes[1], dtype=np.float64)
            if y0.shape != (n,) or y1.shape != (n,):
                raise ValidationError("potential-outcome length does not match covariate rows")
            factual = np.where(t == 1, y1, y0)
            if not np.array_equal(factual, y):
                i = int(np.nonzero(factual != y)[0][0])
                raise ValidationError(
                    f"factual outcome at row {i} does not equal the potential outcome "
                    f"selected by its treatment"
                )
            object.__setattr__(self, "potential_outcomes", (_frozen(y0), _frozen(y1)))
        if self.experimental_flag is not None:
            e = np.array(self.experimental_flag, dtype=np.int64)
            if e.shape != (n,):
                raise ValidationError("experimental-flag length does not match covariate rows")
            if not np.isin(e, (0, 1)).all():
                raise ValidationError("experimental flag values must be 0 or 1")
            object.__setattr__(self, "experimental_flag", _frozen(e))

    @property
    def n(self) -> int:
        return self.covariates.shape[0]

    @property
    def d(self) -> int:
        return self.covariates.shape[1]

    def subset(self, idx: np.ndarray) -> "Dataset":
        """Dataset restricted to the given row indices (order preserved)."""
        idx = np.asarray(idx, dtype=np.int64)
        po = self.potential_outcomes
        return Dataset(
            covariates=self.covariates[idx],
            treatment=self.treatment[idx],
            outcome=self.outcome[idx],
            potential_outcomes=None if po is None else (po[0][idx], po[1][idx]),
            experimental_flag=None
            if self.experimental_flag is None
            else self.experimental_flag[idx],
            outcome_kind=self.outcome_kind,
        )


@dataclass(frozen=True)
class DatasetSplit:
    train: Dataset
    test: Dataset
    train_index: np.ndarray
    test_index: np.ndarray


def split_by_treatment(data: Dataset) -> tuple[Dataset, Dataset]:
    """(treated, control) sub-datasets; errors on a one-group dataset."""
    treated_idx = np.nonzero(data.treatment == 1)[0]
    control_idx = np.nonzero(data.treatment == 0)[0]
    if len(treated_idx) == 0 or len(control_idx) == 0:
        raise ValidationError("degenerate treatment assignment: one group is empty")
    return data.subset(treated_idx), data.subset(control_idx)


def train_test_split(data: Dataset, test_fraction: float, seed: int) -> DatasetSplit:
    """Seeded uniform row partition; the train side must keep both groups.

    The test side is round(n * test_fraction) rows. Draws that leave the
    train side without one of the treatment groups are retried on the same
    stream (bounded), so small minority groups survive the split.
    """
    if not 0.0 <= test_fraction < 1.0:
        raise ValidationError(f"test_fraction must be in [0, 1), got {test_fraction}")
    n = data.n
    if n < 2:
        raise ValidationError("need at least 2 rows to split")
    n_test = int(round(n * test_fraction))
    if n_test >= n:
        n_test = n - 1
    rng = np.random.default_rng(seed)
    for _ in range(100):
        perm = rng.permutation(n)
        test_idx = np.sort(perm[:n_test])
        train_idx = np.sort(perm[n_test:])
        t_train = data.treatment[train_idx]
        if (t_train == 1).any() and (t_train == 0).any():
            return DatasetSplit(
                train=data.subset(train_idx),
                test=data.subset(test_idx),
                train_index=train_idx,
                test_index=test_idx,
            )
    raise ValidationError(
        "could not draw a train split containing both treatment groups"
    )


@dataclass(frozen=True)
class CsvSchema:
    """Column roles for CSV ingestion.

    covariates=None selects every header column named x<integer>, ordered
    by the integer. The optional ground-truth columns are used when the
    header contains them. outcome_kind=None infers binary when every
    observed outcome is 0 or 1.
    """

    treatment: str = "t"
    outcome: str = "y"
    covariates: tuple[str, ...] | None = None
    y0: str = "y0"
    y1: str = "y1"
    experimental: str = "e"
    outcome_kind: OutcomeKind | None = None


def _parse_cell(raw: str, row: int, column: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise CsvParseError(
            f"row {row}, column '{column}': cannot parse {raw!r} as a number"
        ) from None


def load_csv(path: str | Path, schema: CsvSchema | None = None) -> Dataset:
    """Read a delimiter-separated file into a Dataset.

    The header row is required. Cells are parsed with float() (decimal
    point, comma delimiter), so the format is locale independent.
    """
    schema = schema or CsvSchema()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError("empty dataset") from None
        header = [h.strip() for h in header]
        rows = [r for r in reader if r]

    positions = {name: i for i, name in enumerate(header)}
    if schema.covariates is not None:
        cov_names = list(schema.covariates)
    else:
        indexed = []
        for name in header:
            if name.startswith("x") and name[1:].isdigit():
                indexed.append((int(name[1:]), name))
        cov_names = [name for _, name in sorted(indexed)]
        if not cov_names:
            raise SchemaError("no covariate columns (x0, x1, ...) in header")
    for name in [*cov_names, schema.treatment, schema.outcome]:
        if name not in positions:
            raise SchemaError(f"required column '{name}' missing from header")

    if not rows:
        raise ValidationError("empty dataset")

    def column(name: str) -> np.ndarray:
        j = positions[name]
        return np.array(
            [_parse_cell(r[j], i + 1, name) for i, r in enumerate(rows)],
            dtype=np.float64,
        )

    X = np.column_stack([column(name) for name in cov_names])
    t_raw = column(schema.treatment)
    if not np.isin(t_raw, (0.0, 1.0)).all():
        bad = t_raw[~np.isin(t_raw, (0.0, 1.0))][0]
        raise ValidationError(f"treatment values must be 0 or 1, found {bad}")
    y = column(schema.outcome)

    po = None
    if schema.y0 in positions and schema.y1 in positions:
        po = (column(schema.y0), column(schema.y1))
    e = column(schema.experimental) if schema.experimental in positions else None
    if e is not None and not np.isin(e, (0.0, 1.0)).all():
        raise ValidationError("experimental flag values must be 0 or 1")

    kind = schema.outcome_kind
    if kind is None:
        kind = OutcomeKind.BINARY if np.isin(y, (0.0, 1.0)).all() else OutcomeKind.CONTINUOUS
    return Dataset(
        covariates=X,
        treatment=t_raw.astype(np.int64),
        outcome=y,
        potential_outcomes=po,
        experimental_flag=None if e is None else e.astype(np.int64),
        outcome_kind=kind,
    )


def save_csv(data: Dataset, path: str | Path, extra: dict[str, np.ndarray] | None = None) -> None:
    """Write the dataset in the ingestion format (full float precision)."""
    header = [f"x{j}" for j in range(data.d)] + ["t", "y"]
    cols: list[np.ndarray] = [data.covariates[:, j] for j in range(data.d)]
    cols += [data.treatment, data.outcome]
    if data.potential_outcomes is not None:
        header += ["y0", "y1"]
        cols += [data.potential_outcomes[0], data.potential_outcomes[1]]
    if data.experimental_flag is not None:
        header.append("e")
        cols.append(data.experimental_flag)
    for name, values in (extra or {}).items():
        header.append(name)
        cols.append(np.asarray(values))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(data.n):
            writer.writerow(
                [repr(float(col[i])) if col.dtype.kind == "f" else int(col[i]) for col in cols]
            )


def remerge(treated: Dataset, control: Dataset, treatment: np.ndarray) -> Dataset:
    """Interleave two group datasets back into original row order.

    treatment is the original assignment vector; treated/control rows are
    consumed in order. Inverse of split_by_treatment.
    """
    t = np.asarray(treatment)
    n = len(t)
    d = treated.d
    X = np.empty((n, d))
    y = np.empty(n)
    X[t == 1] = treated.covariates
    X[t == 0] = control.covariates
    y[t == 1] = treated.outcome
    y[t == 0] = control.outcome
    po = None
    if treated.potential_outcomes is not None and control.potential_outcomes is not None:
        y0 = np.empty(n)
        y1 = np.empty(n)
        y0[t == 1], y1[t == 1] = treated.potential_outcomes
        y0[t == 0], y1[t == 0] = control.potential_outcomes
        po = (y0, y1)
    return Dataset(
        covariates=X,
        treatment=t,
        outcome=y,
        potential_outcomes=po,
        outcome_kind=treated.outcome_kind,
    )


__all__ = [
    "CsvParseError",
    "CsvSchema",
    "Dataset",
    "DatasetSplit",
    "OutcomeKind",
    "SchemaError",
    "ValidationError",
    "load_csv",
    "remerge",
    "save_csv",
    "split_by_treatment",
    "train_test_split",
]
