"""Evaluation machinery: correlation, 2-D class maps, synthetic benchmark.

The benchmark generates Gaussian class clouds at controlled separations,
scores them with the spectral metrics, and correlates the scores with a
Monte-Carlo Bayes-error oracle computed from the true densities. The
oracle is the ground truth here: a good complexity metric must track
the error an ideal classifier would attain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular
from scipy.spatial.distance import pdist, squareform
from scipy.special import betainc
from scipy.stats import rankdata

from .errors import DataError, NumericError
from .ingest import HyperParams, LabeledDataset
from .reduce import apply_reduction
from .descriptors import compute_descriptors
from .similarity import build_similarity_matrix, bray_curtis_symmetrize
from .spectral import build_laplacian, compute_scores, spectrum


@dataclass(frozen=True)
class CorrelationResult:
    """Sample Pearson r with its two-tailed p-value and sample count."""

    r: float
    p_value: float
    sample_count: int

    def __post_init__(self) -> None:
        if not -1.0 <= self.r <= 1.0:
            raise DataError(f"r must lie in [-1, 1], got {self.r}")
        if not 0.0 <= self.p_value <= 1.0:
            raise DataError(f"p-value must lie in [0, 1], got {self.p_value}")
        if self.sample_count < 3:
            raise DataError(f"sample count must be >= 3, got {self.sample_count}")


@dataclass(frozen=True)
class InterClassMap:
    """2-D class coordinates from classical MDS, plus the residual stress."""

    coordinates: np.ndarray
    stress: float

    def __post_init__(self) -> None:
        coords = np.asarray(self.coordinates, dtype=np.float64)
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise DataError(f"coordinates must be (n, 2), got {coords.shape}")
        if np.abs(coords.mean(axis=0)).max() > 1e-9:
            raise DataError("coordinates must be centered at the origin")
        if self.stress < 0:
            raise DataError(f"stress must be >= 0, got {self.stress}")
        coords.setflags(write=False)
        object.__setattr__(self, "coordinates", coords)


@dataclass(frozen=True)
class SyntheticSuite:
    """Gaussian datasets at decreasing separations with oracle error rates."""

    datasets: tuple[LabeledDataset, ...]
    separations: tuple[float, ...]
    oracle_errors: tuple[float, ...]
    oracle_stderrs: tuple[float, ...]

    def __post_init__(self) -> None:
        lengths = {len(self.datasets), len(self.separations),
                   len(self.oracle_errors), len(self.oracle_stderrs)}
        if len(lengths) != 1:
            raise DataError("suite lists must share one length")
        if len(self.datasets) < 3:
            raise DataError("suite needs at least 3 datasets")


def pearson(x, y) -> CorrelationResult:
    """Sample Pearson correlation with an exact two-tailed t-test p-value.

    p comes from the regularized incomplete beta form of the t
    distribution with m-2 degrees of freedom; |r| = 1 maps to p = 0.
    """
    xv = np.asarray(x, dtype=np.float64).ravel()
    yv = np.asarray(y, dtype=np.float64).ravel()
    if xv.size != yv.size:
        raise DataError(f"length mismatch: {xv.size} vs {yv.size}")
    m = xv.size
    if m < 3:
        raise DataError(f"need at least 3 points, got {m}")
    xm = xv - xv.mean()
    ym = yv - yv.mean()
    sx = float(np.sqrt((xm ** 2).sum()))
    sy = float(np.sqrt((ym ** 2).sum()))
    if sx == 0.0 or sy == 0.0:
        raise NumericError("zero variance: correlation undefined")
    r = float((xm * ym).sum() / (sx * sy))
    r = max(-1.0, min(1.0, r))
    df = m - 2
    if 1.0 - r * r <= 0.0:
        p = 0.0
    else:
        t_sq = r * r * df / (1.0 - r * r)
        p = float(betainc(0.5 * df, 0.5, df / (df + t_sq)))
    return CorrelationResult(r=r, p_value=p, sample_count=m)


def rank_correlation(x, y) -> float:
    """Spearman rho: Pearson correlation of the rank transforms."""
    return pearson(rankdata(x), rankdata(y)).r


def classical_mds(U: np.ndarray) -> InterClassMap:
    """Embed a dissimilarity matrix into 2-D by double centering.

    B = -1/2 C (U*U) C with C the centering matrix; coordinates come
    from the top-2 eigenpairs of B with negative eigenvalues clamped.
    Each axis is flipped so its largest-magnitude coordinate is
    positive. Stress is the sum of squared distance residuals over
    unordered pairs.
    """
    U = np.asarray(U, dtype=np.float64)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise DataError(f"dissimilarity matrix must be square, got {U.shape}")
    if np.abs(U - U.T).max() > 1e-12:
        raise DataError("dissimilarity matrix must be symmetric")
    if np.any(U < 0):
        raise DataError("dissimilarities must be nonnegative")
    if np.any(np.diag(U) != 0):
        raise DataError("dissimilarity diagonal must be zero")
    n = U.shape[0]
    C = np.eye(n) - 1.0 / n
    B = -0.5 * C @ (U * U) @ C
    evals, evecs = np.linalg.eigh(B)
    top = np.clip(evals[[-1, -2]], 0.0, None)
    # Eigenvalue noise around 0 rides on near-constant eigenvectors and
    # would leak an uncentered axis; rank-deficient inputs get a true 0.
    top[top < 1e-10 * max(1.0, float(top[0]))] = 0.0
    coords = evecs[:, [-1, -2]] * np.sqrt(top)
    for axis in range(2):
        col = coords[:, axis]
        peak = int(np.argmax(np.abs(col)))
        if col[peak] < 0:
            coords[:, axis] = -col
    dist = squareform(pdist(coords))
    iu, ju = np.triu_indices(n, k=1)
    stress = float(((U[iu, ju] - dist[iu, ju]) ** 2).sum())
    return InterClassMap(coordinates=coords, stress=stress)


def _simplex_vertices(n: int, dim: int) -> np.ndarray:
    """Regular simplex with unit edge, centered at the origin, in R^dim.

    A regular n-simplex needs n-1 dimensions; when dim is smaller the
    extra simplex axes fold onto existing ones (axis j contributes to
    coordinate j mod dim) and the result is rescaled so the minimum
    pairwise vertex distance is 1 again.
    """
    basis = np.zeros((n - 1, n))
    for k in range(1, n):
        basis[k - 1, :k] = 1.0 / np.sqrt(k * (k + 1))
        basis[k - 1, k] = -k / np.sqrt(k * (k + 1))
    centered = (np.eye(n) - 1.0 / n) / np.sqrt(2.0)
    verts = centered @ basis.T
    if n - 1 <= dim:
        out = np.zeros((n, dim))
        out[:, : n - 1] = verts
        return out
    folded = np.zeros((n, dim))
    for j in range(n - 1):
        folded[:, j % dim] += verts[:, j]
    spacing = pdist(folded).min()
    if spacing <= 0:
        raise NumericError(
            f"mean placement collapsed for {n} classes in {dim} dimensions"
        )
    return folded / spacing


def bayes_error_oracle(means, covariances, priors, trials: int,
                       seed) -> tuple[float, float]:
    """Monte-Carlo estimate of the minimum achievable error of a mixture.

    Draws `trials` labeled samples from the mixture and classifies each
    by the true prior-weighted densities (ties go to the lowest class
    index). Returns (error rate, standard error).
    """
    mu = np.atleast_2d(np.asarray(means, dtype=np.float64))
    n, dim = mu.shape
    covs = np.asarray(covariances, dtype=np.float64)
    if covs.shape != (n, dim, dim):
        raise DataError(
            f"covariances must have shape {(n, dim, dim)}, got {covs.shape}"
        )
    pri = np.asarray(priors, dtype=np.float64).ravel()
    if pri.size != n or np.any(pri < 0) or abs(pri.sum() - 1.0) > 1e-9:
        raise DataError("priors must be nonnegative and sum to 1")
    if trials < 10_000:
        raise DataError(f"need at least 10000 trials, got {trials}")
    chol = []
    for c in range(n):
        try:
            chol.append(np.linalg.cholesky(covs[c]))
        except np.linalg.LinAlgError:
            raise NumericError(f"covariance of class {c} is singular") from None
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(trials, pri)
    blocks = [mu[c] + rng.standard_normal((counts[c], dim)) @ chol[c].T
              for c in range(n)]
    X = np.vstack(blocks)
    truth = np.repeat(np.arange(n), counts)
    scores = np.empty((trials, n))
    with np.errstate(divide="ignore"):
        log_priors = np.log(pri)
    for c in range(n):
        diff = X - mu[c]
        z = solve_triangular(chol[c], diff.T, lower=True)
        log_det = float(np.log(np.diag(chol[c])).sum())
        scores[:, c] = (log_priors[c] - 0.5 * (z ** 2).sum(axis=0)
                        - log_det - 0.5 * dim * np.log(2.0 * np.pi))
    predicted = np.argmax(scores, axis=1)
    error = float(np.mean(predicted != truth))
    stderr = float(np.sqrt(error * (1.0 - error) / trials))
    return error, stderr


def gen_gaussian_suite(n_classes: int, dim: int, per_class: int,
                       separations, seed: int,
                       trials: int = 100_000) -> SyntheticSuite:
    """Isotropic Gaussian classes on a shrinking simplex of means.

    For each separation s, class means sit at s times the unit-edge
    simplex vertices, with identity covariance and per_class samples
    per class. Dataset and oracle RNG streams derive from (seed, index)
    so the suite is reproducible regardless of evaluation order.
    """
    if n_classes < 2:
        raise DataError(f"need at least 2 classes, got {n_classes}")
    if dim < 1:
        raise DataError(f"dim must be >= 1, got {dim}")
    if per_class < 10:
        raise DataError(f"per_class must be >= 10, got {per_class}")
    seps = tuple(float(s) for s in separations)
    if len(seps) < 3:
        raise DataError(f"need at least 3 separations, got {len(seps)}")
    if any(s < 0 for s in seps):
        raise DataError("separations must be nonnegative")
    verts = _simplex_vertices(n_classes, dim)
    covs = np.broadcast_to(np.eye(dim), (n_classes, dim, dim))
    priors = np.full(n_classes, 1.0 / n_classes)
    labels = np.repeat(np.arange(n_classes), per_class)
    datasets, errors, stderrs = [], [], []
    for idx, s in enumerate(seps):
        means = s * verts
        rng = np.random.default_rng(np.random.SeedSequence([seed, idx, 0]))
        feats = np.vstack([
            means[c] + rng.standard_normal((per_class, dim))
            for c in range(n_classes)
        ])
        datasets.append(LabeledDataset(features=feats, labels=labels))
        err, se = bayes_error_oracle(
            means, covs, priors, trials, np.random.SeedSequence([seed, idx, 1])
        )
        errors.append(err)
        stderrs.append(se)
    return SyntheticSuite(datasets=tuple(datasets), separations=seps,
                          oracle_errors=tuple(errors),
                          oracle_stderrs=tuple(stderrs))


@dataclass(frozen=True)
class BenchmarkResult:
    """Per-dataset metric values and their correlations with the oracle."""

    separations: tuple[float, ...]
    oracle_errors: tuple[float, ...]
    oracle_stderrs: tuple[float, ...]
    metric_values: dict[str, tuple[float, ...]]
    correlations: dict[str, CorrelationResult]
    skipped_metrics: tuple[str, ...] = ()


def run_benchmark(suite: SyntheticSuite, params: HyperParams,
                  include_descriptors: bool = False,
                  threads: int = 1) -> BenchmarkResult:
    """Score every suite dataset and correlate each metric with the oracle.

    Metrics with any non-finite value (f1 can be +inf) are excluded
    from correlation and listed in skipped_metrics.
    """
    columns: dict[str, list[float]] = {"cmsauls": [], "csg": [], "auls": []}
    if include_descriptors:
        for name in ("f1", "f2", "f3", "n1", "n2", "n3", "t2"):
            columns[name] = []
    for ds in suite.datasets:
        emb = apply_reduction(ds, params)
        X = build_similarity_matrix(emb, params, threads=threads)
        W = bray_curtis_symmetrize(X)
        scores = compute_scores(spectrum(build_laplacian(W)))
        columns["cmsauls"].append(scores.cmsauls)
        columns["csg"].append(scores.csg)
        columns["auls"].append(scores.auls)
        if include_descriptors:
            desc = compute_descriptors(emb)
            for name in ("f1", "f2", "f3", "n1", "n2", "n3", "t2"):
                columns[name].append(getattr(desc, name))
    correlations: dict[str, CorrelationResult] = {}
    skipped: list[str] = []
    for name, values in columns.items():
        if not all(np.isfinite(values)):
            skipped.append(name)
            continue
        try:
            correlations[name] = pearson(values, suite.oracle_errors)
        except NumericError:
            skipped.append(name)
    return BenchmarkResult(
        separations=suite.separations,
        oracle_errors=suite.oracle_errors,
        oracle_stderrs=suite.oracle_stderrs,
        metric_values={k: tuple(v) for k, v in columns.items()},
        correlations=correlations,
        skipped_metrics=tuple(skipped),
    )
