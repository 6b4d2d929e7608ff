"""Fourier primitives: coefficient sets, Dirichlet kernels and partial sums.

Coefficients follow ``c_nu = (1/2pi) int_0^{2pi} f(x) exp(-1j*nu*x) dx`` so
that ``f ~ sum_nu c_nu exp(1j*nu*x)``.  The conjugate partial sum uses the
multiplier ``-1j*sign(nu)`` with ``sign(0) == 0``; with this convention the
conjugate of ``cos`` is ``sin``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from numpy.polynomial import polynomial as P

from .corpus import TWO_PI, SignalSpec
from .errors import AliasingError, IndexRangeError

CONVENTION = "c_nu = (1/2pi) int f exp(-i nu x) dx"

# below this |sin(x/2)| the kernels are summed term by term
_SINGULAR_TOL = 1e-8
# points per block for direct grid summation; fixed so that threaded and
# sequential evaluation perform identical floating point operations
_GRID_CHUNK = 512


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    """Complex coefficients ``c_nu`` for ``-N <= nu <= N``.

    ``values[nu + N]`` holds ``c_nu``.  The array is copied and frozen on
    construction.
    """

    values: np.ndarray
    convention: str = CONVENTION

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.ndim != 1 or v.size % 2 != 1:
            raise ValueError("coefficient vector must have odd length 2N+1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def max_index(self) -> int:
        return (self.values.size - 1) // 2

    def __getitem__(self, nu: int) -> complex:
        N = self.max_index
        if abs(nu) > N:
            raise IndexRangeError(f"|nu|={abs(nu)} exceeds max_index {N}")
        return complex(self.values[nu + N])

    def window(self, n: int) -> np.ndarray:
        """``c_nu`` for ``-n <= nu <= n``."""
        check_order(self, n)
        N = self.max_index
        return self.values[N - n : N + n + 1]

    def nonnegative(self, n: int) -> np.ndarray:
        """``c_0, ..., c_n``."""
        check_order(self, n)
        N = self.max_index
        return self.values[N : N + n + 1]

    def is_real_signal(self, tol: float = 1e-12) -> bool:
        v = self.values
        scale = max(1.0, float(np.abs(v).max(initial=0.0)))
        return bool(np.all(np.abs(v - np.conj(v[::-1])) <= tol * scale))

    def translated(self, delta: float) -> "CoefficientSet":
        """Coefficients of ``f(x - delta)``."""
        nu = np.arange(-self.max_index, self.max_index + 1)
        return CoefficientSet(self.values * np.exp(-1j * nu * delta), self.convention)

    def scaled(self, factor: float) -> "CoefficientSet":
        return CoefficientSet(self.values * factor, self.convention)

    def truncated(self, n: int) -> "CoefficientSet":
        return CoefficientSet(self.window(n), self.convention)

    @classmethod
    def from_mapping(cls, coeffs: Mapping[int, complex], N: int | None = None) -> "CoefficientSet":
        if N is None:
            N = max((abs(k) for k in coeffs), default=0)
        v = np.zeros(2 * N + 1, dtype=complex)
        for k, c in coeffs.items():
            if abs(k) > N:
                raise IndexRangeError(f"index {k} outside [-{N}, {N}]")
            v[k + N] = c
        return cls(v)


def check_order(coeffs: CoefficientSet, n: int) -> None:
    if n < 0 or n > coeffs.max_index:
        raise IndexRangeError(f"order {n} outside [0, {coeffs.max_index}]")


# --------------------------------------------------------------------------
# kernels
# --------------------------------------------------------------------------


def _kernel_series(n: int, x: np.ndarray, conjugate: bool) -> np.ndarray:
    nu = np.arange(1, n + 1)
    ang = np.multiply.outer(x, nu)
    if conjugate:
        return np.sin(ang).sum(axis=-1)
    return 0.5 + np.cos(ang).sum(axis=-1)


def dirichlet_kernel(n: int, x):
    """``D_n(x) = 1/2 + sum_{nu=1}^n cos(nu x) = sin((n+1/2)x) / (2 sin(x/2))``."""
    if n < 1:
        raise ValueError("kernel order must be >= 1")
    xa = np.asarray(x, dtype=float)
    s = np.sin(0.5 * xa)
    near = np.abs(s) < _SINGULAR_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin((n + 0.5) * xa) / (2.0 * s)
    if np.any(near):
        out = np.where(near, _kernel_series(n, xa, conjugate=False), out)
    return float(out) if out.ndim == 0 else out


def conjugate_dirichlet_kernel(n: int, x):
    """``~D_n(x) = sum_{nu=1}^n sin(nu x) = (cos(x/2) - cos((n+1/2)x)) / (2 sin(x/2))``.

    The numerator is evaluated as ``2 sin((n+1)x/2) sin(nx/2)`` to avoid
    cancellation between the two cosines for small ``x``.
    """
    if n < 1:
        raise ValueError("kernel order must be >= 1")
    xa = np.asarray(x, dtype=float)
    s = np.sin(0.5 * xa)
    near = np.abs(s) < _SINGULAR_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin(0.5 * (n + 1) * xa) * np.sin(0.5 * n * xa) / s
    if np.any(near):
        out = np.where(near, _kernel_series(n, xa, conjugate=True), out)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# coefficients
# --------------------------------------------------------------------------


def _phase(nu: np.ndarray, turns) -> np.ndarray:
    """``exp(-1j * nu * 2pi * turns)`` with the product reduced exactly mod 1."""
    p, q = turns.numerator, turns.denominator
    if q < 2**31:
        r = ((nu % q) * p) % q
        frac = r / q
    else:
        frac = np.array([((int(k) * p) % q) / q for k in nu], dtype=float)
    ang = TWO_PI * frac
    return np.cos(ang) - 1j * np.sin(ang)


def coefficients_analytic(spec: SignalSpec, N: int) -> CoefficientSet:
    """Exact coefficients by antidifferentiating each polynomial piece.

    For ``a = -1j*nu`` the antiderivative of ``p(x) exp(a x)`` is
    ``exp(a x) * sum_m (-1)^m p^(m)(x) / a^(m+1)``.
    """
    if not isinstance(spec, SignalSpec):
        raise TypeError("only piecewise-polynomial SignalSpec inputs are supported")
    if N < 0:
        raise ValueError("N must be >= 0")
    nu = np.arange(1, N + 1, dtype=np.int64)
    a = -1j * nu.astype(float)
    pos = np.zeros(N, dtype=complex)
    for piece in spec.pieces:
        derivs = [np.asarray(piece.coeffs, dtype=float)]
        while derivs[-1].size > 1:
            derivs.append(P.polyder(derivs[-1]))
        for t, sgn in ((piece.stop, 1.0), (piece.start, -1.0)):
            x = TWO_PI * t.numerator / t.denominator
            acc = np.zeros(N, dtype=complex)
            apow = a.copy()
            for m, d in enumerate(derivs):
                acc += ((-1) ** m) * P.polyval(x, d) / apow
                apow = apow * a
            pos += sgn * _phase(nu, t) * acc
    pos /= TWO_PI
    values = np.concatenate([np.conj(pos[::-1]), [spec.mean], pos])
    return CoefficientSet(values)


def coefficients_from_samples(samples, N: int) -> CoefficientSet:
    """Discrete coefficients ``(1/M) sum_m f(x_m) exp(-1j nu x_m)``, ``x_m = 2pi m/M``.

    For signals with jumps the error against the exact coefficients is O(1/M).
    """
    f = np.asarray(samples, dtype=float)
    M = f.size
    if f.ndim != 1 or M == 0:
        raise ValueError("samples must be a non-empty 1-D sequence")
    if M <= 2 * N:
        raise AliasingError(f"M={M} samples cannot resolve {2 * N + 1} coefficients (need M >= 2N+1)")
    F = np.fft.fft(f) / M
    idx = np.arange(-N, N + 1) % M
    return CoefficientSet(F[idx])


# --------------------------------------------------------------------------
# partial sums
# --------------------------------------------------------------------------


def _residue_tol(a: np.ndarray) -> float:
    return 1e-9 * max(1.0, float(np.abs(a).sum()))


def trig_sum(a: np.ndarray, x, hermitian: bool | None = None):
    """Evaluate ``sum_{nu=-n}^{n} a[nu+n] exp(1j nu x)`` at arbitrary points.

    Returns the real part; for hermitian ``a`` the imaginary residue is
    checked against 1e-9 (scaled by ``sum |a|``).
    """
    a = np.asarray(a, dtype=complex)
    n = (a.size - 1) // 2
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    nu = np.arange(-n, n + 1)
    step = max(1, 2**22 // max(a.size, 1))
    out = np.empty(xa.size, dtype=complex)
    for s in range(0, xa.size, step):
        out[s : s + step] = np.exp(1j * np.multiply.outer(xa[s : s + step], nu)) @ a
    if hermitian is None:
        hermitian = bool(np.allclose(a, np.conj(a[::-1]), rtol=0, atol=1e-12 * max(1.0, np.abs(a).max(initial=0))))
    if hermitian:
        resid = float(np.abs(out.imag).max(initial=0.0))
        if resid > _residue_tol(a):
            raise FloatingPointError(f"imaginary residue {resid:.3e} for a real-signal sum")
    res = out.real
    return float(res[0]) if np.ndim(x) == 0 else res.reshape(np.shape(x))


def partial_sum(coeffs: CoefficientSet, n: int, x):
    """``S_n(x) = sum_{|nu|<=n} c_nu exp(1j nu x)`` (real part)."""
    c = coeffs.window(n)
    return trig_sum(c, x, hermitian=coeffs.is_real_signal())


def conjugate_multiplier(n: int) -> np.ndarray:
    """``-1j * sign(nu)`` for ``-n <= nu <= n``."""
    return -1j * np.sign(np.arange(-n, n + 1))


def conjugate_partial_sum(coeffs: CoefficientSet, n: int, x):
    """``~S_n(x) = -1j sum_{|nu|<=n} sign(nu) c_nu exp(1j nu x)`` (real part)."""
    c = coeffs.window(n)
    return trig_sum(conjugate_multiplier(n) * c, x, hermitian=coeffs.is_real_signal())


def coefficient_mass(coeffs: CoefficientSet, n: int) -> float:
    """``G(n) = sum_{i=0}^{n} |c_i|`` over non-negative indices only."""
    return float(np.abs(coeffs.nonnegative(n)).sum())


def coefficient_mass_curve(coeffs: CoefficientSet, n: int) -> np.ndarray:
    """``G(0), ..., G(n)``."""
    return np.cumsum(np.abs(coeffs.nonnegative(n)))


# --------------------------------------------------------------------------
# grid evaluation
# --------------------------------------------------------------------------


def _is_pow2(m: int) -> bool:
    return m > 0 and (m & (m - 1)) == 0


def _direct_chunk(a: np.ndarray, M: int, start: int, stop: int) -> np.ndarray:
    n = (a.size - 1) // 2
    nu = np.arange(-n, n + 1, dtype=np.int64)
    m = np.arange(start, stop, dtype=np.int64)
    # exact phase index (m*nu mod M) keeps large-order phases accurate
    k = np.multiply.outer(m, nu) % M
    return np.exp(1j * (TWO_PI / M) * k) @ a


def trig_on_grid(a: np.ndarray, M: int, method: str = "auto", workers: int = 1) -> np.ndarray:
    """Complex values of ``sum_nu a_nu exp(1j nu x_m)`` on ``x_m = 2pi m / M``.

    ``method='fft'`` (the default for power-of-two ``M``) costs O(M log M);
    ``method='direct'`` sums in fixed-size point blocks, optionally spread over
    ``workers`` threads with bit-identical results.
    """
    a = np.asarray(a, dtype=complex)
    n = (a.size - 1) // 2
    if M < 2 * n + 1:
        raise ValueError(f"grid of {M} points aliases a degree-{n} polynomial")
    if method == "auto":
        method = "fft" if _is_pow2(M) else "direct"
    if method == "fft":
        buf = np.zeros(M, dtype=complex)
        buf[np.arange(-n, n + 1) % M] = a
        return np.fft.ifft(buf) * M
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    bounds = [(s, min(s + _GRID_CHUNK, M)) for s in range(0, M, _GRID_CHUNK)]
    out = np.empty(M, dtype=complex)
    if workers <= 1:
        for s, e in bounds:
            out[s:e] = _direct_chunk(a, M, s, e)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for (s, e), block in zip(bounds, pool.map(lambda b: _direct_chunk(a, M, *b), bounds)):
                out[s:e] = block
    return out


def real_on_grid(a: np.ndarray, M: int, method: str = "auto", workers: int = 1) -> np.ndarray:
    z = trig_on_grid(a, M, method=method, workers=workers)
    resid = float(np.abs(z.imag).max(initial=0.0))
    if resid > _residue_tol(a):
        raise FloatingPointError(f"imaginary residue {resid:.3e} on grid")
    return z.real
