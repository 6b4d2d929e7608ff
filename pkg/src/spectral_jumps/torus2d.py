"""Directional jump detection on the 2-torus.

Coefficients ``c_nu``, ``nu = (nu1, nu2)``, use the ``(2pi)^-2`` convention.
For a direction ``j`` the conjugate multiplier is ``-1j * sign(nu_j)`` with
``sign(0) == 0`` and partial sums run over the square ``max|nu_k| <= n``.

The directional detector

    Y_{j,n}(x) = -1/(log(n) G(n)) * sum_{|nu_k| <= n} ~S_{j, ||nu||_inf}(x) |c_nu|

sums over every lattice point of the square (so each order ``m`` appears
once per lattice point on the shell ``||nu||_inf = m``).  Here ``G(n)`` is
the full-square mass ``sum_{|nu_k| <= n} |c_nu|``, negative indices
included, which differs from the one-sided 1-D normalizer.

Grouping lattice points by shell gives weights ``w_m = sum_{||nu||=m} |c_nu|``
and the tail form used for evaluation, ``a_nu ~ T_{||nu||}``,
``T_r = sum_{m>=r} w_m``.  The literal lattice accumulation is kept as
``route="lattice"`` for cross-checking.

Variation over a rectangle is measured on transverse slices: the mean of
the 1-D discrete variation along direction ``j`` over 8 fixed values of the
other coordinate.  This stands in for the Hardy-Krause variation and
carries the same jump mass for fields whose jumps lie on coordinate lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import TWO_PI, SignalSpec, evaluate, make_constant, make_pulse
from .detector import (
    EMPTY_FIELD_TOL,
    MIN_POINTS_PER_ORDER,
    CalibrationResult,
    _local_peaks,
    _parabolic_offset,
    default_grid_size,
)
from .errors import GridTooCoarseError, IndexRangeError, OrderError
from .spectral import coefficients_analytic, conjugate_dirichlet_kernel, dirichlet_kernel, real_on_grid

N_SLICES = 8
REFERENCE_ID_2D = "pulse(1/3*2pi,2/3*2pi,1) along direction j"


@dataclass(frozen=True, eq=False)
class CoefficientGrid2D:
    """``values[nu1 + N, nu2 + N] = c_(nu1, nu2)``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] % 2 != 1:
            raise ValueError("coefficient grid must be square with odd side 2N+1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def max_index(self) -> int:
        return (self.values.shape[0] - 1) // 2

    def __getitem__(self, nu: tuple[int, int]) -> complex:
        N = self.max_index
        if max(abs(nu[0]), abs(nu[1])) > N:
            raise IndexRangeError(f"index {nu} outside the square of half-width {N}")
        return complex(self.values[nu[0] + N, nu[1] + N])

    def window(self, n: int) -> np.ndarray:
        N = self.max_index
        if n < 0 or n > N:
            raise IndexRangeError(f"order {n} outside [0, {N}]")
        return self.values[N - n : N + n + 1, N - n : N + n + 1]

    def is_real_signal(self, tol: float = 1e-12) -> bool:
        v = self.values
        scale = max(1.0, float(np.abs(v).max(initial=0.0)))
        return bool(np.all(np.abs(v - np.conj(v[::-1, ::-1])) <= tol * scale))


@dataclass(frozen=True)
class SeparableField:
    """``f(x1, x2) = sum_t g_t(x1) h_t(x2)``; ``None`` stands for the constant 1."""

    terms: tuple[tuple[SignalSpec | None, SignalSpec | None], ...]
    name: str = "separable"

    def __call__(self, x1, x2):
        total = 0.0
        for g, h in self.terms:
            gx = 1.0 if g is None else evaluate(g, x1)
            hy = 1.0 if h is None else evaluate(h, x2)
            total = total + np.multiply(gx, hy)
        return total

    def hyperplanes(self, j: int) -> list[tuple[float, float]]:
        """Ground-truth ``(offset, jump)`` pairs for lines ``x_j = offset``.

        Only meaningful when every term varies in one coordinate at most.
        """
        from .corpus import true_jumps

        _check_direction(j)
        out: dict[float, float] = {}
        for g, h in self.terms:
            spec, other = (g, h) if j == 1 else (h, g)
            if spec is None:
                continue
            if other is not None:
                raise ValueError("hyperplane ground truth needs terms that vary in one coordinate")
            for loc, mag in true_jumps(spec):
                out[loc] = out.get(loc, 0.0) + mag
        return sorted(out.items())


@dataclass(frozen=True)
class HyperplaneEntry:
    offset: float
    magnitude: float
    score: float


@dataclass(frozen=True)
class HyperplaneReport:
    direction: int
    entries: tuple[HyperplaneEntry, ...]
    n: int
    K_used: float
    threshold: float
    normalizer: float

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def offsets(self) -> np.ndarray:
        return np.array([e.offset for e in self.entries])


def _check_direction(j: int) -> None:
    if j not in (1, 2):
        raise ValueError(f"direction must be 1 or 2, got {j!r}")


# --------------------------------------------------------------------------
# coefficients
# --------------------------------------------------------------------------


def _coeffs_1d(spec: SignalSpec | None, N: int) -> np.ndarray:
    if spec is None:
        spec = make_constant(1.0)
    return coefficients_analytic(spec, N).values


def coefficients_2d(field, N: int) -> CoefficientGrid2D:
    """Analytic coefficients of a :class:`SeparableField` (sums of outer products),
    or discrete coefficients of a uniform ``M1 x M2`` sample grid."""
    if isinstance(field, SeparableField):
        total = np.zeros((2 * N + 1, 2 * N + 1), dtype=complex)
        for g, h in field.terms:
            total += np.multiply.outer(_coeffs_1d(g, N), _coeffs_1d(h, N))
        return CoefficientGrid2D(total)
    if isinstance(field, np.ndarray) and field.ndim == 2:
        return coefficients_2d_from_samples(field, N)
    raise TypeError("only separable fields or 2-D sample grids are supported")


def coefficients_2d_from_samples(samples: np.ndarray, N: int) -> CoefficientGrid2D:
    f = np.asarray(samples, dtype=float)
    M1, M2 = f.shape
    if min(M1, M2) <= 2 * N:
        from .errors import AliasingError

        raise AliasingError(f"grid {M1}x{M2} cannot resolve half-width {N}")
    F = np.fft.fft2(f) / (M1 * M2)
    i1 = np.arange(-N, N + 1) % M1
    i2 = np.arange(-N, N + 1) % M2
    return CoefficientGrid2D(F[np.ix_(i1, i2)])


def pulse_x(a: float = TWO_PI / 3, b: float = 2 * TWO_PI / 3, h: float = 1.0) -> SeparableField:
    return SeparableField(((make_pulse(a, b, h), None),), name="pulse-x")


def pulse_y(a: float = TWO_PI / 5, b: float = 3 * TWO_PI / 5, h: float = 1.0) -> SeparableField:
    return SeparableField(((None, make_pulse(a, b, h)),), name="pulse-y")


def cross_field() -> SeparableField:
    return SeparableField(pulse_x().terms + pulse_y().terms, name="cross")


BUILTIN_FIELDS = {
    "constant2d": lambda: SeparableField(((None, None),), name="constant2d"),
    "pulse-x": pulse_x,
    "pulse-y": pulse_y,
    "cross": cross_field,
}


# --------------------------------------------------------------------------
# kernels and partial sums
# --------------------------------------------------------------------------


def _sign_matrix(n: int, j: int) -> np.ndarray:
    s = np.sign(np.arange(-n, n + 1)).astype(float)
    return np.multiply.outer(s, np.ones(2 * n + 1)) if j == 1 else np.multiply.outer(np.ones(2 * n + 1), s)


def conjugate_dirichlet_2d(j: int, n: int, x: Sequence[float]) -> float:
    """``~D_n(x_j) * D_n(x_other)``."""
    _check_direction(j)
    xj, xo = (x[0], x[1]) if j == 1 else (x[1], x[0])
    return float(conjugate_dirichlet_kernel(n, xj) * dirichlet_kernel(n, xo))


def _bilinear(a: np.ndarray, x1, x2) -> np.ndarray:
    """``sum a[nu1, nu2] exp(i nu1 x1 + i nu2 x2)`` for paired point arrays."""
    n = (a.shape[0] - 1) // 2
    nu = np.arange(-n, n + 1)
    e1 = np.exp(1j * np.multiply.outer(np.atleast_1d(x1), nu))
    e2 = np.exp(1j * np.multiply.outer(np.atleast_1d(x2), nu))
    return np.einsum("pi,ij,pj->p", e1, a, e2)


def _real_checked(z: np.ndarray, a: np.ndarray) -> np.ndarray:
    resid = float(np.abs(z.imag).max(initial=0.0))
    if resid > 1e-9 * max(1.0, float(np.abs(a).sum())):
        raise FloatingPointError(f"imaginary residue {resid:.3e} for a real field")
    return z.real


def conjugate_partial_sum_2d(coeffs: CoefficientGrid2D, j: int, n: int, x: Sequence[float]) -> float:
    """``-1j sum_{|nu_k| <= n} sign_j(nu) c_nu exp(1j nu.x)`` (real part)."""
    _check_direction(j)
    a = -1j * _sign_matrix(n, j) * coeffs.window(n)
    return float(_real_checked(_bilinear(a, x[0], x[1]), a)[0])


# --------------------------------------------------------------------------
# the directional detector
# --------------------------------------------------------------------------


def _linf_orders(n: int) -> np.ndarray:
    k = np.abs(np.arange(-n, n + 1))
    return np.maximum.outer(k, k)


def detector_terms_2d(coeffs: CoefficientGrid2D, j: int, n: int) -> tuple[np.ndarray, float]:
    """Coefficient matrix of ``Y_{j,n}`` and the normalizer ``log(n) G(n)``."""
    _check_direction(j)
    if n < 2:
        raise OrderError(f"order n={n} is invalid; need n >= 2")
    c = coeffs.window(n)
    mods = np.abs(c)
    G = float(mods.sum())
    if G == 0.0:
        return np.zeros_like(c), 0.0
    orders = _linf_orders(n)
    shell = np.bincount(orders.ravel(), weights=mods.ravel(), minlength=n + 1)
    tail = np.cumsum(shell[::-1])[::-1]
    normalizer = math.log(n) * G
    a = 1j * _sign_matrix(n, j) * c * tail[orders] / normalizer
    return a, normalizer


def _y_jn_lattice(coeffs: CoefficientGrid2D, j: int, n: int, x: Sequence[float]) -> float:
    """Literal lattice accumulation; O(n^4) and only meant for small orders."""
    c = coeffs.window(n)
    mods = np.abs(c)
    G = float(mods.sum())
    if G == 0.0:
        return 0.0
    partial = [conjugate_partial_sum_2d(coeffs, j, m, x) for m in range(n + 1)]
    total = 0.0
    for i1 in range(2 * n + 1):
        for i2 in range(2 * n + 1):
            total += partial[max(abs(i1 - n), abs(i2 - n))] * mods[i1, i2]
    return -total / (math.log(n) * G)


def y_jn(coeffs: CoefficientGrid2D, j: int, n: int, x: Sequence[float], route: str = "shell") -> float:
    """``Y_{j,n}`` at one point ``x = (x1, x2)``; 0 when ``G(n) == 0``."""
    if route == "lattice":
        _check_direction(j)
        if n < 2:
            raise OrderError("order n must be >= 2")
        return _y_jn_lattice(coeffs, j, n, x)
    if route != "shell":
        raise ValueError(f"unknown route {route!r}")
    a, normalizer = detector_terms_2d(coeffs, j, n)
    if normalizer == 0.0:
        return 0.0
    return float(_real_checked(_bilinear(a, x[0], x[1]), a)[0])


def y_jn_points(coeffs: CoefficientGrid2D, j: int, n: int, x1, x2) -> np.ndarray:
    a, normalizer = detector_terms_2d(coeffs, j, n)
    if normalizer == 0.0:
        return np.zeros(np.broadcast(np.atleast_1d(x1), np.atleast_1d(x2)).shape)
    x1, x2 = np.broadcast_arrays(np.atleast_1d(x1), np.atleast_1d(x2))
    return _real_checked(_bilinear(a, x1.ravel(), x2.ravel()), a)


def y_jn_slices(
    coeffs: CoefficientGrid2D,
    j: int,
    n: int,
    transverse: Sequence[float],
    grid_size: int | None = None,
) -> tuple[np.ndarray, np.ndarray, float]:
    """``Y_{j,n}`` along direction ``j`` on a uniform grid, one row per transverse value.

    Returns ``(grid, values[len(transverse), grid_size], normalizer)``.
    """
    if grid_size is None:
        grid_size = default_grid_size(n)
    if grid_size < MIN_POINTS_PER_ORDER * n:
        raise GridTooCoarseError(f"grid of {grid_size} points is below {MIN_POINTS_PER_ORDER}*n")
    a, normalizer = detector_terms_2d(coeffs, j, n)
    grid = TWO_PI * np.arange(grid_size) / grid_size
    t = np.asarray(transverse, dtype=float)
    if normalizer == 0.0:
        return grid, np.zeros((t.size, grid_size)), 0.0
    if j == 2:
        a = a.T  # axis 0 now runs along the detection direction
    nu = np.arange(-n, n + 1)
    collapsed = a @ np.exp(1j * np.multiply.outer(nu, t))
    rows = np.stack([real_on_grid(collapsed[:, s], grid_size) for s in range(t.size)])
    return grid, rows, normalizer


def default_slices(lo: float = 0.0, hi: float = TWO_PI, count: int = N_SLICES) -> np.ndarray:
    """Midpoints of ``count`` equal cells of ``(lo, hi)``."""
    return lo + (np.arange(count) + 0.5) * (hi - lo) / count


def calibrate_K_2d(n: int, j: int = 1) -> CalibrationResult:
    """``K_2 = (2pi)^2 * mean-slice Y_{j,n}`` on the unit jump line ``x_j = 2pi/3``."""
    _check_direction(j)
    ref = pulse_x() if j == 1 else SeparableField(((None, make_pulse(TWO_PI / 3, 2 * TWO_PI / 3, 1.0)),))
    coeffs = coefficients_2d(ref, n)
    t = default_slices()
    x1, x2 = (np.full(t.size, TWO_PI / 3), t) if j == 1 else (t, np.full(t.size, TWO_PI / 3))
    val = float(np.mean(y_jn_points(coeffs, j, n, x1, x2)))
    return CalibrationResult(TWO_PI**2 * val, n, reference=REFERENCE_ID_2D, kind=f"point-2d-j{j}")


def detect_hyperplanes(
    coeffs: CoefficientGrid2D,
    j: int,
    n: int,
    threshold_ratio: float = 0.25,
    K: CalibrationResult | None = None,
    grid_size: int | None = None,
) -> HyperplaneReport:
    """Peak-pick the slice-averaged ``|Y_{j,n}|`` along direction ``j``."""
    _check_direction(j)
    if not 0.0 < threshold_ratio < 1.0:
        raise ValueError("threshold_ratio must lie in (0, 1)")
    t = default_slices()
    grid, rows, normalizer = y_jn_slices(coeffs, j, n, t, grid_size)
    mean = rows.mean(axis=0)
    mag = np.abs(mean)
    vmax = float(mag.max(initial=0.0))
    if vmax < EMPTY_FIELD_TOL:
        return HyperplaneReport(j, (), n, float("nan") if K is None else K.K, threshold_ratio, normalizer)
    if K is None:
        K = calibrate_K_2d(n, j)
    h = TWO_PI / grid.size
    m = grid.size
    entries = []
    for i in _local_peaks(mag, threshold_ratio * vmax):
        off = _parabolic_offset(mag[(i - 1) % m], mag[i], mag[(i + 1) % m])
        alpha = float(np.mod(grid[i] + off * h, TWO_PI))
        along = np.full(t.size, alpha)
        x1, x2 = (along, t) if j == 1 else (t, along)
        val = float(np.mean(y_jn_points(coeffs, j, n, x1, x2)))
        entries.append(HyperplaneEntry(alpha, TWO_PI**2 * val / K.K, float(mag[i] / vmax)))
    entries.sort(key=lambda e: e.offset)
    return HyperplaneReport(j, tuple(entries), n, K.K, threshold_ratio, normalizer)


def rectangle_slice_variation(
    coeffs: CoefficientGrid2D,
    j: int,
    R: tuple[tuple[float, float], tuple[float, float]],
    n: int,
    grid_density: int | None = None,
) -> float:
    """Mean over 8 transverse slices of the variation of ``Y_{j,n}`` across ``R`` along ``j``."""
    _check_direction(j)
    (a1, b1), (a2, b2) = R
    if not (0 <= a1 < b1 <= TWO_PI and 0 <= a2 < b2 <= TWO_PI):
        raise ValueError(f"degenerate or out-of-range rectangle {R!r}")
    (a, b), (lo, hi) = ((a1, b1), (a2, b2)) if j == 1 else ((a2, b2), (a1, b1))
    if grid_density is None:
        need = MIN_POINTS_PER_ORDER * n * TWO_PI / (b - a)
        grid_density = max(default_grid_size(n), 1 << math.ceil(math.log2(need)))
    if grid_density * (b - a) / TWO_PI < MIN_POINTS_PER_ORDER * n:
        raise GridTooCoarseError("grid leaves fewer than 16*n points across the rectangle")
    t = default_slices(lo, hi)
    grid, rows, normalizer = y_jn_slices(coeffs, j, n, t, grid_density)
    if normalizer == 0.0:
        return 0.0
    mask = (grid > a) & (grid < b)
    ends_a = np.full(t.size, a)
    ends_b = np.full(t.size, b)
    if j == 1:
        ya, yb = y_jn_points(coeffs, j, n, ends_a, t), y_jn_points(coeffs, j, n, ends_b, t)
    else:
        ya, yb = y_jn_points(coeffs, j, n, t, ends_a), y_jn_points(coeffs, j, n, t, ends_b)
    tvs = []
    for s in range(t.size):
        v = np.concatenate([[ya[s]], rows[s, mask], [yb[s]]])
        tvs.append(np.abs(np.diff(v)).sum())
    return float(np.mean(tvs))
