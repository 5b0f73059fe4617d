"""Input checks shared by the estimators."""

from __future__ import annotations

import numpy as np

from .exceptions import DataError


def feature_names(estimator, n_features: int) -> list[str]:
    names = getattr(estimator, "feature_names_in_", None)
    if names is not None:
        return [str(c) for c in names]
    return [f"x{j}" for j in range(n_features)]


def check_zero_one(X: np.ndarray) -> np.ndarray:
    """Boolean view of a numeric matrix that may only contain 0 and 1."""
    if X.size and not np.isin(X, (0, 1)).all():
        raise DataError("expected a binary feature matrix with entries 0 and 1; binarize numeric data first")
    return X.astype(bool)


def as_columns(X) -> tuple[list[str] | None, list[list]]:
    """Split a DataFrame or 2-d array-like into named columns of Python values."""
    if hasattr(X, "columns") and hasattr(X, "iloc"):
        names = [str(c) for c in X.columns]
        return names, [X.iloc[:, j].tolist() for j in range(X.shape[1])]
    arr = np.asarray(X, dtype=object)
    if arr.ndim != 2:
        raise DataError(f"expected a 2-d array, got {arr.ndim} dimension(s)")
    if arr.shape[0] == 0:
        raise DataError("no rows")
    return None, [arr[:, j].tolist() for j in range(arr.shape[1])]


def missing_to_marker(column: list, marker: str) -> list:
    out = []
    for v in column:
        if v is None or (isinstance(v, float) and np.isnan(v)):
            out.append(marker)
        else:
            out.append(v)
    return out
