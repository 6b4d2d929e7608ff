"""Jump detection from Fourier coefficients.

The detector field is

    Y_n(x) = -1 / (log(n) G(n)) * sum_{k=1}^{n} ~S_k(x) |c_k|,

with ``G(n) = sum_{i=0}^{n} |c_i|``.  Exchanging the two sums gives a single
trigonometric polynomial whose ``nu``-th term carries the tail weight
``W_nu = sum_{k=|nu|}^{n} |c_k|``; every routine below evaluates that form,
so a field on ``M`` points costs O(n M) directly or O(M log M) by FFT.

Sign convention: conjugate partial sums at a jump of size ``J`` grow like
``-(J/pi) log n``.  The leading minus sign above therefore makes ``Y_n``
positive at upward jumps.  Calibrated magnitudes invert the limit
``Y_n(x) -> K J(x) / (2 pi)`` with ``K`` measured on a unit-jump pulse.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .corpus import TWO_PI, make_pulse
from .errors import GridTooCoarseError, OrderError
from .spectral import (
    CoefficientSet,
    check_order,
    coefficient_mass,
    coefficients_analytic,
    conjugate_multiplier,
    conjugate_partial_sum,
    real_on_grid,
    trig_sum,
)

log = logging.getLogger(__name__)

# unit-jump reference for calibration: pulse on (2pi/3, 4pi/3)
REFERENCE_LOCATION = TWO_PI / 3
REFERENCE_ID = "pulse(1/3*2pi,2/3*2pi,1)"
MIN_POINTS_PER_ORDER = 16
EMPTY_FIELD_TOL = 1e-10


@dataclass(frozen=True)
class YnField:
    n: int
    grid: np.ndarray
    values: np.ndarray
    normalizer: float

    @property
    def size(self) -> int:
        return self.grid.size

    @property
    def spacing(self) -> float:
        return TWO_PI / self.grid.size

    @property
    def degenerate(self) -> bool:
        return self.normalizer == 0.0

    def inside(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        mask = (self.grid > a) & (self.grid < b)
        return self.grid[mask], self.values[mask]

    def total_variation(self) -> float:
        """Variation over one full period, wrap-around step included."""
        v = self.values
        return float(np.abs(np.diff(v)).sum() + abs(v[0] - v[-1]))


@dataclass(frozen=True)
class CalibrationResult:
    K: float
    n: int
    reference: str = REFERENCE_ID
    kind: str = "point"

    def __post_init__(self):
        if not (math.isfinite(self.K) and self.K > 0):
            raise ValueError(f"calibration constant must be finite and positive, got {self.K}")


@dataclass(frozen=True)
class JumpEntry:
    location: float
    magnitude: float
    score: float


@dataclass(frozen=True)
class JumpReport:
    entries: tuple[JumpEntry, ...]
    estimator: str
    n: int
    K_used: float
    threshold: float
    normalizer: float

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def locations(self) -> np.ndarray:
        return np.array([e.location for e in self.entries])

    @property
    def magnitudes(self) -> np.ndarray:
        return np.array([e.magnitude for e in self.entries])


@dataclass(frozen=True)
class VariationEstimate:
    a: float
    b: float
    n: int
    value: float
    grid_size: int
    normalizer: float
    refinement_change: float | None = None
    true_mass: float | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def mass_estimate(self, calibration: CalibrationResult) -> float:
        """Invert ``V -> K/pi * sum |J|``."""
        return math.pi * self.value / calibration.K


# --------------------------------------------------------------------------
# the field
# --------------------------------------------------------------------------


def _check_detector_order(coeffs: CoefficientSet, n: int) -> None:
    if n < 2:
        raise OrderError(f"order n={n} is invalid; need n >= 2 because log(1) = 0")
    check_order(coeffs, n)


def detector_terms(coeffs: CoefficientSet, n: int) -> tuple[np.ndarray, float]:
    """Coefficients ``a_nu`` (``-n..n``) of ``Y_n`` and the normalizer ``log(n) G(n)``.

    ``G(n) == 0`` yields all-zero terms and a normalizer of 0.
    """
    _check_detector_order(coeffs, n)
    mods = np.abs(coeffs.nonnegative(n))
    G = float(mods.sum())
    if G == 0.0:
        return np.zeros(2 * n + 1, dtype=complex), 0.0
    tail = np.cumsum(mods[::-1])[::-1]  # tail[k] = sum_{i>=k} |c_i|
    weights = np.concatenate([tail[1:][::-1], [0.0], tail[1:]])
    normalizer = math.log(n) * G
    a = -conjugate_multiplier(n) * coeffs.window(n) * weights / normalizer
    return a, normalizer


def y_n(coeffs: CoefficientSet, n: int, x):
    """Detector value ``Y_n(x)``; 0 when ``G(n) == 0``."""
    a, normalizer = detector_terms(coeffs, n)
    if normalizer == 0.0:
        return 0.0 if np.ndim(x) == 0 else np.zeros(np.shape(x))
    return trig_sum(a, x, hermitian=coeffs.is_real_signal())


def default_grid_size(n: int) -> int:
    """Smallest power of two with at least 16 points per order."""
    return 1 << max(4, math.ceil(math.log2(MIN_POINTS_PER_ORDER * n)))


def y_n_field(
    coeffs: CoefficientSet,
    n: int,
    grid_size: int | None = None,
    method: str = "auto",
    workers: int = 1,
) -> YnField:
    """``Y_n`` on ``x_i = 2 pi i / grid_size``."""
    if grid_size is None:
        grid_size = default_grid_size(n)
    if grid_size < MIN_POINTS_PER_ORDER * n:
        raise GridTooCoarseError(f"grid of {grid_size} points is below {MIN_POINTS_PER_ORDER}*n = {MIN_POINTS_PER_ORDER * n}")
    a, normalizer = detector_terms(coeffs, n)
    grid = TWO_PI * np.arange(grid_size) / grid_size
    if normalizer == 0.0:
        values = np.zeros(grid_size)
    else:
        values = real_on_grid(a, grid_size, method=method, workers=workers)
    return YnField(n, grid, values, normalizer)


def lukacs_jump_estimate(coeffs: CoefficientSet, n: int, x) -> float:
    """Direct magnitude estimate ``-pi ~S_n(x) / log n``.

    Tends to ``J(x)`` at a jump and to 0 elsewhere, both at rate 1/log n.
    """
    if n < 2:
        raise OrderError("order n must be >= 2")
    return -math.pi * conjugate_partial_sum(coeffs, n, x) / math.log(n)


def log_slope(coeffs: CoefficientSet, x: float, orders) -> float:
    """Least-squares slope of ``~S_n(x)`` against ``log n``."""
    orders = np.asarray(list(orders))
    s = np.array([conjugate_partial_sum(coeffs, int(k), x) for k in orders])
    return float(np.polyfit(np.log(orders), s, 1)[0])


# --------------------------------------------------------------------------
# calibration and detection
# --------------------------------------------------------------------------


def reference_coefficients(n: int) -> CoefficientSet:
    return coefficients_analytic(make_pulse(TWO_PI / 3, 2 * TWO_PI / 3, 1.0), n)


def calibrate_K(n: int) -> CalibrationResult:
    """``K = 2 pi Y_n(2pi/3) / J`` on the unit pulse, ``J = 1``."""
    if n < 2**10:
        log.info("calibrating at n=%d; n >= 1024 is recommended", n)
    K = TWO_PI * y_n(reference_coefficients(n), n, REFERENCE_LOCATION)
    return CalibrationResult(K, n)


def calibrate_K_variation(n: int, grid_density: int | None = None) -> CalibrationResult:
    """``K_var = pi V / J`` over ``(pi/3, pi)``, which holds only the unit jump."""
    est = interval_variation(reference_coefficients(n), n, math.pi / 3, math.pi, grid_density, check_refinement=False)
    return CalibrationResult(math.pi * est.value, n, kind="variation")


def _local_peaks(v: np.ndarray, floor: float) -> np.ndarray:
    left = np.roll(v, 1)
    right = np.roll(v, -1)
    return np.flatnonzero((v >= left) & (v > right) & (v >= floor))


def _parabolic_offset(ym: float, y0: float, yp: float) -> float:
    denom = ym - 2.0 * y0 + yp
    if denom >= 0.0:
        return 0.0
    return float(np.clip(0.5 * (ym - yp) / denom, -0.5, 0.5))


def detect_jumps(
    coeffs: CoefficientSet,
    n: int,
    threshold_ratio: float = 0.25,
    K: CalibrationResult | None = None,
    grid_size: int | None = None,
    estimator: str = "yn-calibrated",
    field: YnField | None = None,
) -> JumpReport:
    """Peak-pick ``|Y_n|`` and report refined locations and magnitudes.

    Local maxima above ``threshold_ratio * max|Y_n|`` are kept, located to
    sub-grid accuracy by a 3-point parabola, and converted to magnitudes
    either by the calibrated inverse ``2 pi Y_n(x) / K`` (``yn-calibrated``)
    or by :func:`lukacs_jump_estimate` (``lukacs``).
    """
    if not 0.0 < threshold_ratio < 1.0:
        raise ValueError("threshold_ratio must lie in (0, 1)")
    if estimator not in ("yn-calibrated", "lukacs"):
        raise ValueError(f"unknown estimator {estimator!r}")
    if field is None:
        field = y_n_field(coeffs, n, grid_size)
    if estimator == "yn-calibrated" and K is None:
        K = calibrate_K(n)
    K_used = K.K if (K is not None and estimator == "yn-calibrated") else float("nan")

    mag = np.abs(field.values)
    vmax = float(mag.max(initial=0.0))
    if vmax < EMPTY_FIELD_TOL:
        return JumpReport((), estimator, n, K_used, threshold_ratio, field.normalizer)

    h = field.spacing
    entries = []
    for i in _local_peaks(mag, threshold_ratio * vmax):
        m = mag.size
        offset = _parabolic_offset(mag[(i - 1) % m], mag[i], mag[(i + 1) % m])
        x_hat = float(np.mod(field.grid[i] + offset * h, TWO_PI))
        if estimator == "lukacs":
            magnitude = lukacs_jump_estimate(coeffs, n, x_hat)
        else:
            magnitude = TWO_PI * float(y_n(coeffs, n, x_hat)) / K.K
        entries.append(JumpEntry(x_hat, magnitude, float(mag[i] / vmax)))
    entries.sort(key=lambda e: e.location)
    return JumpReport(tuple(entries), estimator, n, K_used, threshold_ratio, field.normalizer)


# --------------------------------------------------------------------------
# variation
# --------------------------------------------------------------------------


def variation_grid_size(n: int, a: float, b: float) -> int:
    """Smallest power-of-two period grid with ``16 n`` points inside ``(a, b)``."""
    need = MIN_POINTS_PER_ORDER * n * TWO_PI / (b - a)
    return max(default_grid_size(n), 1 << math.ceil(math.log2(need)))


def _variation_on(coeffs: CoefficientSet, n: int, a: float, b: float, grid_size: int) -> tuple[float, float]:
    fld = y_n_field(coeffs, n, grid_size)
    _, inner = fld.inside(a, b)
    ends = np.atleast_1d(y_n(coeffs, n, np.array([a, b])))
    values = np.concatenate([[ends[0]], inner, [ends[1]]])
    return float(np.abs(np.diff(values)).sum()), fld.normalizer


def interval_variation(
    coeffs: CoefficientSet,
    n: int,
    a: float,
    b: float,
    grid_density: int | None = None,
    check_refinement: bool = True,
) -> VariationEstimate:
    """Discrete total variation of ``Y_n`` over ``(a, b)``.

    ``grid_density`` is the number of points per full period; at least
    ``16 n`` of them must fall inside the interval.  With
    ``check_refinement`` the grid is doubled once and the relative change is
    recorded (a warning is logged above 1%).
    """
    if not 0.0 < a < b < TWO_PI:
        raise ValueError(f"interval ({a}, {b}) must satisfy 0 < a < b < 2pi")
    if grid_density is None:
        grid_density = variation_grid_size(n, a, b)
    if grid_density * (b - a) / TWO_PI < MIN_POINTS_PER_ORDER * n:
        raise GridTooCoarseError(f"grid density {grid_density} leaves fewer than {MIN_POINTS_PER_ORDER}*n points in ({a}, {b})")
    value, normalizer = _variation_on(coeffs, n, a, b, grid_density)
    change = None
    if check_refinement:
        fine, _ = _variation_on(coeffs, n, a, b, 2 * grid_density)
        change = abs(fine - value) / value if value > 0 else abs(fine - value)
        if change > 0.01:
            log.warning("variation over (%g, %g) moved %.2f%% under grid refinement", a, b, 100 * change)
    return VariationEstimate(a, b, n, value, grid_density, normalizer, change)
