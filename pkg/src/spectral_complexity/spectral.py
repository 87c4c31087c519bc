"""Graph Laplacian, its spectrum, and the complexity scores.

The affinity W becomes L = D - W with D the diagonal degree matrix.
Three scores summarize the sorted eigenvalues: a cumulative-maximum sum
of scaled squared-eigenvalue increments (the headline score), the same
construction on plain gradients (baseline), and the trapezoidal area
under the spectrum (baseline).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericError
from .similarity import SymmetricAffinity


@dataclass(frozen=True)
class Laplacian:
    """L = D - W. Symmetric, zero row sums, nonpositive off-diagonal."""

    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise DataError(f"Laplacian must be square, got {vals.shape}")
        if np.abs(vals - vals.T).max() > 1e-12:
            raise DataError("Laplacian must be symmetric")
        tol = 1e-9 * max(1.0, float(np.abs(vals).max()))
        if np.abs(vals.sum(axis=1)).max() > tol:
            raise DataError("Laplacian rows must sum to 0")
        off = vals - np.diag(np.diag(vals))
        if np.any(off > 0):
            raise DataError("Laplacian off-diagonal entries must be <= 0")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n_classes(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class Spectrum:
    """Nondecreasing nonnegative eigenvalues with a zero smallest value."""

    eigenvalues: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.eigenvalues, dtype=np.float64).ravel()
        if vals.size == 0:
            raise DataError("spectrum is empty")
        if np.any(np.diff(vals) < 0):
            raise DataError("eigenvalues must be nondecreasing")
        if np.any(vals < 0):
            raise DataError("eigenvalues must be nonnegative")
        tol = 1e-8 * max(1.0, float(vals[-1]))
        if vals[0] > tol:
            raise DataError("smallest eigenvalue must be 0 for a Laplacian spectrum")
        vals.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)

    @property
    def n(self) -> int:
        return self.eigenvalues.size


@dataclass(frozen=True)
class ComplexityScores:
    """The headline score plus the two spectral baselines."""

    cmsauls: float
    csg: float
    auls: float


def build_laplacian(W: SymmetricAffinity) -> Laplacian:
    """L = D - W with D_ii the i-th row sum of W.

    W's diagonal cancels: L_ii ends up as the sum of off-diagonal
    affinities in row i.
    """
    vals = W.values
    degree = np.diag(vals.sum(axis=1))
    return Laplacian(values=degree - vals)


def spectrum(L: Laplacian) -> Spectrum:
    """Eigenvalues of L, ascending, with float noise clamped at zero.

    Values inside [-tau, 0) with tau = 1e-8 * max(1, largest eigenvalue)
    are rounding artifacts and clamp to 0; anything below -tau means the
    affinity upstream was broken and raises NumericError.
    """
    try:
        vals = np.linalg.eigvalsh(L.values)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed: {exc}") from None
    tau = 1e-8 * max(1.0, float(vals[-1]))
    if vals[0] < -tau:
        raise NumericError(
            f"eigenvalue {vals[0]:.3e} below -{tau:.3e}; affinity is not PSD"
        )
    return Spectrum(eigenvalues=np.clip(vals, 0.0, None))


def scaled_area_increments(s: Spectrum) -> np.ndarray:
    """Increments (lam[i+1]^2 - lam[i]^2) / (2 (n - i)) for i = 0..n-2."""
    lam = s.eigenvalues
    n = s.n
    if n < 2:
        raise DataError(f"need at least 2 eigenvalues, got {n}")
    denom = 2.0 * (n - np.arange(n - 1))
    return (lam[1:] ** 2 - lam[:-1] ** 2) / denom


def cmsauls(s: Spectrum) -> float:
    """Sum of the cumulative maximum of the scaled area increments."""
    return float(np.maximum.accumulate(scaled_area_increments(s)).sum())


def csg(s: Spectrum) -> float:
    """Cumulative-maximum sum of plain eigenvalue gradients (baseline)."""
    lam = s.eigenvalues
    n = s.n
    if n < 2:
        raise DataError(f"need at least 2 eigenvalues, got {n}")
    grad = (lam[1:] - lam[:-1]) / (n - np.arange(n - 1))
    return float(np.maximum.accumulate(grad).sum())


def auls(s: Spectrum) -> float:
    """Trapezoidal area under the sorted eigenvalue curve (baseline)."""
    lam = s.eigenvalues
    if s.n < 2:
        raise DataError(f"need at least 2 eigenvalues, got {s.n}")
    return float(((lam[:-1] + lam[1:]) / 2.0).sum())


def compute_scores(s: Spectrum) -> ComplexityScores:
    return ComplexityScores(cmsauls=cmsauls(s), csg=csg(s), auls=auls(s))


def spectrum_svg(s: Spectrum, width: int = 480, height: int = 320) -> str:
    """Line plot of eigenvalue index vs value as a standalone SVG string."""
    lam = s.eigenvalues
    n = lam.size
    left, right, top, bottom = 50, 15, 15, 35
    plot_w = width - left - right
    plot_h = height - top - bottom
    y_max = float(lam[-1]) if lam[-1] > 0 else 1.0

    def px(i: int) -> float:
        return left + (plot_w * i / max(1, n - 1))

    def py(v: float) -> float:
        return top + plot_h * (1.0 - v / y_max)

    points = " ".join(f"{px(i):.2f},{py(float(v)):.2f}" for i, v in enumerate(lam))
    marks = "".join(
        f'<circle cx="{px(i):.2f}" cy="{py(float(v)):.2f}" r="3" fill="#1f77b4"/>'
        for i, v in enumerate(lam)
    )
    ticks = []
    for frac in (0.0, 0.5, 1.0):
        v = y_max * frac
        y = py(v)
        ticks.append(
            f'<line x1="{left - 4}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" '
            f'stroke="#333"/>'
            f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-size="11">{v:.3g}</text>'
        )
    x_labels = "".join(
        f'<text x="{px(i):.2f}" y="{height - bottom + 16}" text-anchor="middle" '
        f'font-size="11">{i}</text>'
        for i in range(n)
    ) if n <= 20 else (
        f'<text x="{px(0):.2f}" y="{height - bottom + 16}" text-anchor="middle" '
        f'font-size="11">0</text>'
        f'<text x="{px(n - 1):.2f}" y="{height - bottom + 16}" '
        f'text-anchor="middle" font-size="11">{n - 1}</text>'
    )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">'
        f'<rect width="{width}" height="{height}" fill="white"/>'
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{height - bottom}" '
        f'stroke="#333"/>'
        f'<line x1="{left}" y1="{height - bottom}" x2="{width - right}" '
        f'y2="{height - bottom}" stroke="#333"/>'
        f"{''.join(ticks)}{x_labels}"
        f'<polyline points="{points}" fill="none" stroke="#1f77b4" '
        f'stroke-width="1.5"/>'
        f"{marks}"
        f'<text x="{left + plot_w / 2:.0f}" y="{height - 6}" '
        f'text-anchor="middle" font-size="12">eigenvalue index</text>'
        f"</svg>"
    )
