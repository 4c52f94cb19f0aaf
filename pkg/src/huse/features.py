"""Feature maps for the discriminator and componentwise unit-variance scaling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import EvalDataset, EvaluatedExample, hj

VARIANTS = ("huse", "hj", "opt")

# Denominator of the log-probability feature.  "tokens" divides by sentence
# length; "hj" divides by the aggregated human judgment instead (sensitivity
# switch, not the default).
DENOMINATORS = ("tokens", "hj")


def huse_features(example: EvaluatedExample, denominator: str = "tokens") -> np.ndarray:
    """Two-dimensional feature: length-normalized model log-probability and HJ."""
    judgment = hj(example)
    if denominator == "tokens":
        norm = example.log_p_model / example.token_count
    elif denominator == "hj":
        if judgment == 0.0:
            raise ValueError("hj denominator is zero")
        norm = example.log_p_model / judgment
    else:
        raise ValueError(f"unknown denominator {denominator!r}")
    return np.array([norm, judgment], dtype=np.float64)


def hj_features(example: EvaluatedExample) -> np.ndarray:
    """One-dimensional feature: the aggregated human judgment alone."""
    return np.array([hj(example)], dtype=np.float64)


def opt_features(p_human: float, p_model: float) -> np.ndarray:
    """Identity embedding of the two true probabilities."""
    if p_human < 0 or p_model < 0:
        raise ValueError("probabilities must be non-negative")
    if not (np.isfinite(p_human) and np.isfinite(p_model)):
        raise ValueError("probabilities must be finite")
    return np.array([p_human, p_model], dtype=np.float64)


@dataclass(frozen=True)
class ScalingProfile:
    """Per-dimension multipliers bringing population variance to 1."""

    factors: np.ndarray  # positive, shape (d,)

    def apply(self, matrix: np.ndarray) -> np.ndarray:
        return np.asarray(matrix, dtype=np.float64) * self.factors


def fit_scaling(matrix: np.ndarray) -> ScalingProfile:
    """Fit 1/std multipliers per dimension (population variance).

    Dimensions with zero variance keep factor 1 so feature dimensionality
    stays stable; a constant dimension shifts all distances equally.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] < 2:
        raise ValueError("scaling requires a matrix with at least 2 rows")
    var = matrix.var(axis=0)  # population variance
    factors = np.where(var > 0, 1.0 / np.sqrt(np.where(var > 0, var, 1.0)), 1.0)
    return ScalingProfile(factors=factors)


def featurize(
    dataset: EvalDataset, variant: str = "huse", denominator: str = "tokens"
) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Build the (2n, d) feature matrix, 0/1 labels and example ids.

    Labels: 1 = reference, 0 = model.  Row order follows the dataset.
    """
    if variant == "huse":
        rows = [huse_features(e, denominator) for e in dataset.examples]
    elif variant == "hj":
        rows = [hj_features(e) for e in dataset.examples]
    else:
        raise ValueError(f"variant {variant!r} cannot be computed from an EvalDataset")
    labels = np.array([1 if e.origin == "reference" else 0 for e in dataset.examples], dtype=np.int64)
    ids = [e.example_id for e in dataset.examples]
    matrix = np.stack(rows)
    if not np.all(np.isfinite(matrix)):
        raise ValueError("non-finite feature values")
    return matrix, labels, ids
