"""Eigenphases, level spacings, reference spacing laws, and distances.

Unitary matrices are normal, so the complex Schur form is diagonal and the
Schur vectors are an orthonormal eigenbasis; that is what eigendecompose
relies on. Phases live in [0, 2pi) and spacings are scaled by N/(2pi) so
the mean spacing is one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.integrate
import scipy.linalg
import scipy.stats

TWO_PI = 2.0 * np.pi

#: spacing variance of the Wigner surmise, 3*pi/8 - 1
WIGNER_VARIANCE = 3.0 * np.pi / 8.0 - 1.0
#: spacing variance of the Poissonian (exponential) law
POISSON_VARIANCE = 1.0


class ConvergenceFailure(ArithmeticError):
    pass


class FewerThanTwoPhases(ValueError):
    pass


class NegativeArgument(ValueError):
    pass


class EmptySample(ValueError):
    pass


class InsufficientData(ValueError):
    pass


@dataclass
class SpectralData:
    """Sorted eigenphases in [0, 2pi) with matching eigenvector columns."""

    phases: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.phases)


def eigendecompose(u: np.ndarray, residual_tol: float = 1e-9) -> SpectralData:
    """Full eigensystem of a unitary matrix via the complex Schur form.

    Raises ConvergenceFailure if the solver fails or the residual
    ||U v_j - e^{i theta_j} v_j|| exceeds residual_tol * N for any column.
    """
    dim = u.shape[0]
    try:
        t, z = scipy.linalg.schur(u, output="complex")
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceFailure(str(exc)) from exc
    eigvals = np.diagonal(t)
    phases = np.mod(np.angle(eigvals), TWO_PI)
    order = np.argsort(phases, kind="stable")
    phases = phases[order]
    vectors = z[:, order]

    residual = np.linalg.norm(u @ vectors - vectors * np.exp(1j * phases)[None, :], axis=0)
    if residual.max() > residual_tol * dim:
        raise ConvergenceFailure(
            f"eigenpair residual {residual.max():.3e} exceeds {residual_tol * dim:.3e}")
    norm_defect = np.abs(np.linalg.norm(vectors, axis=0) - 1.0).max()
    if norm_defect > 1e-12:
        raise ConvergenceFailure(f"eigenvector norm defect {norm_defect:.3e}")
    return SpectralData(phases, vectors)


def spacings(phases: np.ndarray, include_wrap: bool = True) -> np.ndarray:
    """Nearest-neighbour spacings of sorted phases, scaled by N/(2pi).

    With include_wrap (default) the circular gap from the last phase back to
    the first is appended, giving N spacings with mean exactly 1. Without it
    only the N-1 interior gaps are returned (strict-paper mode).
    """
    phases = np.asarray(phases, dtype=float)
    n = len(phases)
    if n < 2:
        raise FewerThanTwoPhases(f"need at least two phases, got {n}")
    gaps = np.diff(phases)
    if include_wrap:
        gaps = np.append(gaps, phases[0] + TWO_PI - phases[-1])
    return gaps * (n / TWO_PI)


def _check_nonnegative(s) -> np.ndarray:
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0):
        raise NegativeArgument("spacing arguments must be >= 0")
    return arr


def wigner_pdf(s):
    """Wigner surmise for CUE spacings: (32/pi^2) s^2 exp(-4 s^2 / pi)."""
    arr = _check_nonnegative(s)
    out = (32.0 / np.pi**2) * arr**2 * np.exp(-4.0 * arr**2 / np.pi)
    return out if out.ndim else float(out)


def poisson_pdf(s):
    """Exponential spacing law of uncorrelated levels: exp(-s)."""
    arr = _check_nonnegative(s)
    out = np.exp(-arr)
    return out if out.ndim else float(out)


_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(12)


def reference_cdf(which: str, s):
    """Cumulative spacing distribution, 'wigner' or 'poisson'.

    The Poisson branch is the closed form 1 - exp(-s); the Wigner branch is
    integrated by quadrature with absolute error <= 1e-10. Accepts a scalar
    or an array.
    """
    arr = _check_nonnegative(s)
    if which == "poisson":
        out = 1.0 - np.exp(-arr)
        return out if out.ndim else float(out)
    if which != "wigner":
        raise ValueError(f"unknown reference law {which!r}")

    if arr.ndim == 0:
        value, _ = scipy.integrate.quad(wigner_pdf, 0.0, float(arr), epsabs=1e-12)
        return min(value, 1.0)

    # adaptive quadrature over uniform panels, then a fixed Gauss-Legendre
    # remainder inside each panel; panel widths keep both error terms far
    # below the 1e-10 budget even for 1e5-point samples
    flat = arr.ravel()
    top = float(flat.max(initial=0.0))
    if top == 0.0:
        return np.zeros_like(arr)
    panels = 1024
    knots = np.linspace(0.0, top, panels + 1)
    prefix = np.zeros(panels + 1)
    for i in range(panels):
        piece, _ = scipy.integrate.quad(wigner_pdf, knots[i], knots[i + 1],
                                        epsabs=1e-14)
        prefix[i + 1] = prefix[i] + piece
    idx = np.clip(np.searchsorted(knots, flat, side="right") - 1, 0, panels - 1)
    half = (flat - knots[idx]) / 2.0
    points = knots[idx][:, None] + half[:, None] * (_GAUSS_NODES[None, :] + 1.0)
    remainder = half * (wigner_pdf(points) * _GAUSS_WEIGHTS[None, :]).sum(axis=1)
    cdf = np.minimum(prefix[idx] + remainder, 1.0)
    return cdf.reshape(arr.shape)


def ks_statistic(sample: np.ndarray, cdf) -> float:
    """Sup-norm distance between the sample's empirical CDF and ``cdf``."""
    sample = np.sort(np.asarray(sample, dtype=float))
    n = len(sample)
    if n == 0:
        raise EmptySample("cannot compute a KS distance of an empty sample")
    ref = np.asarray(cdf(sample), dtype=float)
    steps = np.arange(n + 1) / n
    return float(max((steps[1:] - ref).max(), (ref - steps[:-1]).max()))


def phase_uniformity(phases: np.ndarray, bins: int = 32) -> tuple[float, float]:
    """Chi-square test of pooled eigenphases against the uniform density on
    [0, 2pi). Returns (statistic, p_value)."""
    phases = np.asarray(phases, dtype=float)
    n = len(phases)
    if n < 10 * bins:
        raise InsufficientData(f"need at least {10 * bins} phases for {bins} bins, got {n}")
    counts, _ = np.histogram(phases, bins=bins, range=(0.0, TWO_PI))
    expected = n / bins
    statistic = float(((counts - expected) ** 2 / expected).sum())
    p_value = float(scipy.stats.chi2.sf(statistic, bins - 1))
    return statistic, p_value


# ---------------------------------------------------------------------------
# Histograms
# ---------------------------------------------------------------------------

DEFAULT_SPACING_EDGES = np.linspace(0.0, 4.0, 51)


@dataclass
class Histogram:
    """Fixed-edge histogram with an out-of-range overflow tally.

    density integrates to (in-range count)/(total count), so it is directly
    comparable to a reference pdf when overflow is negligible.
    """

    edges: np.ndarray
    counts: np.ndarray = field(default=None)
    overflow: int = 0

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=float)
        if self.counts is None:
            self.counts = np.zeros(len(self.edges) - 1, dtype=np.int64)
        else:
            self.counts = np.asarray(self.counts, dtype=np.int64)

    @classmethod
    def from_samples(cls, values: np.ndarray, edges: np.ndarray) -> "Histogram":
        hist = cls(edges)
        hist.add(values)
        return hist

    def add(self, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=float)
        in_range = (values >= self.edges[0]) & (values <= self.edges[-1])
        counts, _ = np.histogram(values[in_range], bins=self.edges)
        self.counts += counts
        self.overflow += int((~in_range).sum())

    def merge(self, other: "Histogram") -> "Histogram":
        if not np.array_equal(self.edges, other.edges):
            raise ValueError("cannot merge histograms with different edges")
        return Histogram(self.edges, self.counts + other.counts,
                         self.overflow + other.overflow)

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.overflow

    @property
    def density(self) -> np.ndarray:
        total = self.total
        if total == 0:
            return np.zeros_like(self.counts, dtype=float)
        widths = np.diff(self.edges)
        return self.counts / (total * widths)

    def to_csv(self) -> str:
        """CSV per the histogram schema: bin rows then a final overflow row."""
        lines = ["bin_left,bin_right,count,density"]
        density = self.density
        for left, right, count, dens in zip(self.edges[:-1], self.edges[1:],
                                            self.counts, density):
            lines.append(f"{left:.12g},{right:.12g},{count},{dens:.12g}")
        lines.append(f"overflow,,{self.overflow},")
        return "\n".join(lines) + "\n"
