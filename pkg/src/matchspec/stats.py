"""Gap ratios, reference level-spacing densities, KL divergence and entropies."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError

ZERO_GAP = 1e-15
POISSON_R_TILDE = 2 * math.log(2) - 1
GUE_R_TILDE = 0.603
GUE_BETA = 2
GUE_Z = 4 * math.pi / (81 * math.sqrt(3))
KL_EPS = 1e-12


@dataclass
class EntanglementSpectrum:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ConfigurationError("spectrum must be a non-empty 1-D sequence")
        if np.any(v < 0) or np.any(np.diff(v) > 0):
            raise ConfigurationError("spectrum must be descending and nonnegative")
        if abs(v.sum() - 1.0) > 1e-9:
            raise ConfigurationError(f"spectrum sums to {v.sum()!r}, not 1")
        self.values = v

    def __len__(self):
        return self.values.size


@dataclass
class GapRatioSeries:
    gaps: np.ndarray
    ratios: np.ndarray  # r_k = delta_{k-1} / delta_k, NaN where excluded
    r_tilde: np.ndarray  # excluded entries already dropped
    excluded: int = 0
    empty: bool = False

    @property
    def r(self) -> np.ndarray:
        return self.ratios[np.isfinite(self.ratios)]


def modified_ratios(values: np.ndarray) -> np.ndarray:
    """r~ for descending sequences along the last axis; NaN marks zero-gap pairs.

    Works on a single spectrum or a stack of equal-length spectra.
    """
    gaps = -np.diff(np.asarray(values, dtype=float), axis=-1)
    lo = np.minimum(gaps[..., :-1], gaps[..., 1:])
    hi = np.maximum(gaps[..., :-1], gaps[..., 1:])
    with np.errstate(divide="ignore", invalid="ignore"):
        out = lo / hi
    out[lo <= ZERO_GAP] = np.nan
    return out


def plain_ratios(values: np.ndarray) -> np.ndarray:
    """r_k = delta_{k-1} / delta_k along the last axis; NaN marks zero-gap pairs."""
    gaps = -np.diff(np.asarray(values, dtype=float), axis=-1)
    num, den = gaps[..., :-1], gaps[..., 1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / den
    out[(num <= ZERO_GAP) | (den <= ZERO_GAP)] = np.nan
    return out


def gap_ratios(spec: EntanglementSpectrum | Sequence[float], floor: float = 0.0) -> GapRatioSeries:
    """Gaps and gap ratios of a spectrum, skipping (and counting) zero gaps.

    Only values strictly above ``floor`` take part.  Fewer than three retained
    values leave nothing to compare and the series comes back flagged empty.
    """
    if not isinstance(spec, EntanglementSpectrum):
        spec = EntanglementSpectrum(spec)
    if floor < 0:
        raise ConfigurationError("floor must be nonnegative")
    v = spec.values[spec.values > floor] if floor > 0 else spec.values
    if v.size < 3:
        return GapRatioSeries(np.clip(-np.diff(v), 0, None), np.empty(0), np.empty(0), 0, True)
    gaps = np.clip(-np.diff(v), 0.0, None)
    rt = modified_ratios(v)
    r = plain_ratios(v)
    keep = np.isfinite(rt)
    return GapRatioSeries(gaps, r, rt[keep], int((~keep).sum()), False)


def mean_r_tilde(series) -> float:
    """Pooled mean of r~ over every index and every series given."""
    if isinstance(series, GapRatioSeries):
        series = [series]
    pooled = [np.asarray(s.r_tilde if isinstance(s, GapRatioSeries) else s, dtype=float) for s in series]
    pooled = np.concatenate(pooled) if pooled else np.empty(0)
    pooled = pooled[np.isfinite(pooled)]
    if pooled.size == 0:
        raise ConfigurationError("no defined r~ values to average")
    return float(pooled.mean())


# -- reference densities ---------------------------------------------------


def poisson_pdf(r):
    r = np.asarray(r, dtype=float)
    return 1.0 / (1.0 + r) ** 2


def wigner_dyson_pdf(r, beta: int = GUE_BETA, z: float = GUE_Z):
    r = np.asarray(r, dtype=float)
    return (r + r * r) ** beta / (z * (1.0 + r + r * r) ** (1 + 1.5 * beta))


@dataclass(frozen=True)
class ReferenceDistribution:
    kind: str  # "poisson" or "wigner_dyson"

    def __post_init__(self):
        if self.kind not in ("poisson", "wigner_dyson"):
            raise ConfigurationError(f"unknown reference distribution {self.kind!r}")

    def pdf(self, r):
        return poisson_pdf(r) if self.kind == "poisson" else wigner_dyson_pdf(r)


POISSON = ReferenceDistribution("poisson")
WIGNER_DYSON = ReferenceDistribution("wigner_dyson")


def reference_pdf(dist: ReferenceDistribution | str, r: float) -> float:
    if isinstance(dist, str):
        dist = ReferenceDistribution(dist)
    if np.any(np.asarray(r) < 0):
        raise ConfigurationError("reference densities are defined for r >= 0")
    out = dist.pdf(r)
    return float(out) if np.ndim(out) == 0 else out


# -- histograms and KL ---------------------------------------------------------


@dataclass
class Histogram:
    """Probability mass per bin; the last bin is [edges[-1], inf) when ``overflow``."""

    edges: np.ndarray
    mass: np.ndarray
    overflow: bool = True
    count: int = field(default=0, compare=False)

    @property
    def lefts(self) -> np.ndarray:
        return self.edges if self.overflow else self.edges[:-1]

    @property
    def rights(self) -> np.ndarray:
        r = self.edges[1:]
        return np.append(r, np.inf) if self.overflow else r

    def density(self) -> np.ndarray:
        """Mass per unit width; the overflow bin reports its mass unscaled."""
        widths = self.rights - self.lefts
        out = self.mass.copy()
        finite = np.isfinite(widths)
        out[finite] = self.mass[finite] / widths[finite]
        return out


def default_edges(bins: int = 50, r_max: float = 3.0) -> np.ndarray:
    return np.linspace(0.0, r_max, bins + 1)


def histogram(samples: Iterable[float], edges: np.ndarray | None = None, overflow: bool = True) -> Histogram:
    x = np.asarray(list(samples) if not isinstance(samples, np.ndarray) else samples, dtype=float)
    x = x[np.isfinite(x)]
    if edges is None:
        edges = default_edges()
    edges = np.asarray(edges, dtype=float)
    counts, _ = np.histogram(x, bins=edges)
    if overflow:
        counts = np.append(counts, np.count_nonzero(x > edges[-1]))
    total = counts.sum()
    if total == 0:
        raise ConfigurationError("cannot histogram an empty sample")
    return Histogram(edges, counts / total, overflow, int(x.size))


def reference_histogram(dist: ReferenceDistribution, edges: np.ndarray, overflow: bool = True,
                        subsamples: int = 64) -> Histogram:
    """Analytic bin masses by midpoint quadrature on each bin."""
    if subsamples < 16:
        raise ConfigurationError("use at least 16 quadrature points per bin")
    edges = np.asarray(edges, dtype=float)
    left, right = edges[:-1], edges[1:]
    w = (right - left) / subsamples
    pts = left[:, None] + w[:, None] * (np.arange(subsamples) + 0.5)
    mass = (dist.pdf(pts) * w[:, None]).sum(axis=1)
    if overflow:
        mass = np.append(mass, max(1.0 - mass.sum(), 0.0))
    return Histogram(edges, mass, overflow)


def kl_divergence(p: Histogram, q: Histogram | ReferenceDistribution, eps: float = KL_EPS) -> float:
    """sum_i P_i ln(P_i / Q_i) over bins with P_i > 0; Q is floored at ``eps``."""
    if isinstance(q, ReferenceDistribution):
        q = reference_histogram(q, p.edges, p.overflow)
    if p.overflow != q.overflow or p.edges.shape != q.edges.shape or not np.allclose(p.edges, q.edges):
        raise ConfigurationError("histograms use different bins")
    for h in (p, q):
        if abs(h.mass.sum() - 1.0) > 1e-6:
            raise ConfigurationError("histogram mass is not normalized")
    mask = p.mass > 0
    qm = np.maximum(q.mass[mask], eps)
    return float(np.sum(p.mass[mask] * np.log(p.mass[mask] / qm)))


def write_histogram_csv(hist: Histogram, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_left", "bin_right", "density"])
        for a, b, d in zip(hist.lefts, hist.rights, hist.density()):
            w.writerow([repr(float(a)), repr(float(b)), repr(float(d))])


def read_histogram_csv(path) -> Histogram:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    lefts = np.array([float(r["bin_left"]) for r in rows])
    rights = np.array([float(r["bin_right"]) for r in rows])
    dens = np.array([float(r["density"]) for r in rows])
    overflow = bool(rights.size and np.isinf(rights[-1]))
    widths = rights - lefts
    mass = np.where(np.isfinite(widths), dens * np.where(np.isfinite(widths), widths, 0), dens)
    edges = lefts if overflow else np.append(lefts, rights[-1])
    return Histogram(edges, mass, overflow)


# -- entropies -----------------------------------------------------------------


def _values(spec) -> np.ndarray:
    return spec.values if isinstance(spec, EntanglementSpectrum) else np.asarray(spec, dtype=float)


def von_neumann_entropy(spec) -> float:
    p = _values(spec)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def trace_power(spec, alpha: float) -> float:
    if alpha <= 0:
        raise ConfigurationError("alpha must be positive")
    p = _values(spec)
    p = p[p > 0]
    return float(np.sum(p**alpha))


def renyi_entropy(spec, alpha: float) -> float:
    if alpha <= 0:
        raise ConfigurationError("alpha must be positive")
    if alpha == 1:
        raise ConfigurationError("alpha = 1 is the von Neumann entropy")
    return float(math.log(trace_power(spec, alpha)) / (1.0 - alpha))


def page_entropy(m: int, n: int) -> float:
    """Mean entanglement entropy of a Haar-random state on C^m (x) C^n, m <= n."""
    if m < 1 or m > n:
        raise ConfigurationError("page_entropy needs 1 <= m <= n")
    k = np.arange(n + 1, m * n + 1, dtype=float)
    return float(np.sum(1.0 / k) - (m - 1) / (2 * n))


# -- fits ------------------------------------------------------------------------


@dataclass
class FitResult:
    r0: float
    gamma: float
    residual: float


def fit_exponential(points: Sequence[tuple[float, float]]) -> FitResult:
    """Least-squares fit of delta = r0 * exp(-gamma * N) on (N, ln delta)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ConfigurationError("need at least two (N, delta) points")
    if np.any(pts[:, 1] <= 0):
        raise ConfigurationError("deviations must be positive to take logs")
    x, y = pts[:, 0], np.log(pts[:, 1])
    design = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.sum((design @ coef - y) ** 2))
    return FitResult(float(np.exp(coef[0])), float(-coef[1]), resid)


def fit_linear(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """(slope, intercept) of an ordinary least-squares line."""
    slope, intercept = np.polyfit(np.asarray(x, float), np.asarray(y, float), 1)
    return float(slope), float(intercept)


# -- reference ensembles used for calibration --------------------------------


def sample_gue(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2


def gue_levels(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    """Descending eigenvalues of ``count`` independent GUE matrices, one row each."""
    out = np.empty((count, dim))
    for i in range(count):
        out[i] = np.linalg.eigvalsh(sample_gue(rng, dim))[::-1]
    return out


def poisson_levels(rng: np.random.Generator, length: int, count: int) -> np.ndarray:
    """Descending spectra summing to 1 built from i.i.d. exponential gaps."""
    gaps = rng.exponential(size=(count, length))
    levels = np.cumsum(gaps, axis=1)[:, ::-1]
    return levels / levels.sum(axis=1, keepdims=True)
