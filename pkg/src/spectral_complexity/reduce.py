"""Dimensionality reduction: PCA via SVD, or passthrough.

The PCA basis is computed from the singular-value decomposition of the
centered data matrix, which matches covariance eigendecomposition but
conditions better. Component signs follow a fixed convention (first
coordinate with magnitude above 1e-9 is positive) so results do not
depend on the eigensolver's arbitrary sign choices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericError
from .ingest import HyperParams, LabeledDataset, ReductionSpec

# Entries at or below this magnitude are treated as zero when picking
# the sign-defining coordinate of a component.
_SIGN_EPS = 1e-9


@dataclass(frozen=True)
class ReductionMeta:
    """How the embedding was produced, for provenance reporting."""

    method: str
    d: int
    explained_variance_ratio: tuple[float, ...] = ()


@dataclass(frozen=True)
class EmbeddedDataset:
    """Reduced feature matrix with labels carried over unchanged."""

    features: np.ndarray
    labels: np.ndarray
    class_names: tuple[str, ...]
    meta: ReductionMeta

    def __post_init__(self) -> None:
        feats = np.ascontiguousarray(np.asarray(self.features, dtype=np.float64))
        if feats.ndim != 2 or feats.shape[1] < 1:
            raise DataError(f"embedded features must be (N, d>=1), got {feats.shape}")
        if not np.all(np.isfinite(feats)):
            raise NumericError("reduction produced non-finite values")
        feats.setflags(write=False)
        object.__setattr__(self, "features", feats)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)


@dataclass(frozen=True)
class PCAModel:
    """Fitted PCA basis: mean vector, component rows, variance ratios."""

    mean: np.ndarray
    components: np.ndarray
    explained_variance_ratio: np.ndarray

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) @ self.components.T


def _enforce_sign(components: np.ndarray) -> np.ndarray:
    """Flip rows so each component's first non-negligible entry is positive."""
    out = components.copy()
    for i in range(out.shape[0]):
        nz = np.flatnonzero(np.abs(out[i]) > _SIGN_EPS)
        if nz.size and out[i, nz[0]] < 0:
            out[i] = -out[i]
    return out


def fit_pca(ds: LabeledDataset, spec: ReductionSpec) -> PCAModel:
    """Fit a PCA basis sized by spec (fixed dimension or contribution rate).

    Components are orthonormal rows ordered by decreasing explained
    variance. In rate mode the retained count is the smallest d whose
    cumulative explained-variance ratio reaches the rate. All samples
    identical is a numeric failure; a fixed dimension above
    min(N-1, D) is an input error.
    """
    if spec.mode == "passthrough":
        raise DataError("fit_pca requires a pca reduction mode")
    X = ds.features
    n, dim = X.shape
    limit = min(n - 1, dim)
    mean = X.mean(axis=0)
    centered = X - mean
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    variance = svals ** 2 / (n - 1)
    total = variance.sum()
    if total <= 0.0:
        raise NumericError("zero total variance: all samples are identical")
    ratios = variance / total
    if spec.mode == "fixed":
        d = int(spec.n_components)
        if d > limit:
            raise DataError(
                f"requested dimension {d} exceeds min(N-1, D) = {limit}"
            )
    else:
        cumulative = np.cumsum(ratios)
        # Tiny slack keeps rates like 0.90 from missing an exact hit to
        # floating-point rounding.
        d = int(np.searchsorted(cumulative, spec.rate - 1e-12, side="left")) + 1
        d = min(d, limit)
    components = _enforce_sign(vt[:d])
    return PCAModel(mean=mean, components=components,
                    explained_variance_ratio=ratios[:d].copy())


def apply_reduction(ds: LabeledDataset, params: HyperParams) -> EmbeddedDataset:
    """Produce the embedding the similarity stage consumes.

    Passthrough keeps the feature matrix bit-identical with d = D; PCA
    modes center the data and project it onto the retained components.
    """
    spec = params.reduction
    if spec.mode == "passthrough":
        meta = ReductionMeta(method="passthrough", d=ds.n_features)
        return EmbeddedDataset(features=ds.features, labels=ds.labels,
                               class_names=ds.class_names, meta=meta)
    model = fit_pca(ds, spec)
    projected = model.transform(ds.features)
    meta = ReductionMeta(
        method="pca",
        d=projected.shape[1],
        explained_variance_ratio=tuple(float(r)
                                       for r in model.explained_variance_ratio),
    )
    return EmbeddedDataset(features=projected, labels=ds.labels,
                           class_names=ds.class_names, meta=meta)
