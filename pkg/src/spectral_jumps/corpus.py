"""Ground-truth piecewise-polynomial periodic signals.

A :class:`SignalSpec` is a partition of one period ``(0, 2*pi)`` into
pieces, each carrying a polynomial in the absolute coordinate ``x``
(radians, ascending powers).  Breakpoints are stored exactly as fractions of
a full turn so that phases ``exp(-1j * nu * x)`` at breakpoints can be
reduced with integer arithmetic.

Jump sets, point evaluation and the brute-force oracles used throughout the
test-suite live here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import SignalSpecError

TWO_PI = 2.0 * np.pi
MAX_DEGREE = 5

# breakpoints forbidden to carry a jump (in turns)
_FORBIDDEN_JUMP_TURNS = (Fraction(0), Fraction(1, 2), Fraction(1))


def to_turns(angle, max_denominator: int = 10_000) -> Fraction:
    """Convert an angle to an exact fraction of ``2*pi``.

    Fractions are taken as already being in turns.  Floats are radians and
    are snapped to the nearest ``p/q`` with ``q <= max_denominator`` when that
    reproduces the angle to 1e-12; otherwise the exact binary value is kept.
    """
    if isinstance(angle, Fraction):
        return angle
    angle = float(angle)
    if not math.isfinite(angle):
        raise SignalSpecError(f"non-finite angle {angle!r}")
    raw = angle / TWO_PI
    snapped = Fraction(raw).limit_denominator(max_denominator)
    if abs(float(snapped) * TWO_PI - angle) <= 1e-12:
        return snapped
    return Fraction(raw)


def turns_to_rad(t: Fraction) -> float:
    return TWO_PI * t.numerator / t.denominator


@dataclass(frozen=True)
class Piece:
    start: Fraction
    stop: Fraction
    coeffs: tuple[float, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return P.polyval(x, self.coeffs)


@dataclass(frozen=True)
class JumpSet:
    """Jump locations (radians) with magnitudes ``f(x+0) - f(x-0)``."""

    locations: np.ndarray
    magnitudes: np.ndarray
    turns: tuple[Fraction, ...] = ()

    def __len__(self) -> int:
        return len(self.locations)

    def __iter__(self):
        return iter(zip(self.locations.tolist(), self.magnitudes.tolist()))

    def inside(self, a: float, b: float) -> "JumpSet":
        mask = (self.locations > a) & (self.locations < b)
        turns = tuple(t for t, m in zip(self.turns, mask) if m) if self.turns else ()
        return JumpSet(self.locations[mask], self.magnitudes[mask], turns)

    @property
    def mass(self) -> float:
        return float(np.abs(self.magnitudes).sum())


@dataclass(frozen=True)
class SignalSpec:
    """Piecewise-polynomial, 2*pi-periodic signal with an explicit jump set."""

    pieces: tuple[Piece, ...]
    name: str = "custom"
    _jump_tol: float = field(default=1e-12, repr=False, compare=False)

    def __post_init__(self):
        pieces = tuple(
            p if isinstance(p, Piece) else Piece(to_turns(p[0]), to_turns(p[1]), tuple(map(float, p[2])))
            for p in self.pieces
        )
        object.__setattr__(self, "pieces", pieces)
        _validate(self)

    @property
    def breakpoints(self) -> tuple[Fraction, ...]:
        return tuple(p.start for p in self.pieces) + (self.pieces[-1].stop,)

    @property
    def mean(self) -> float:
        total = 0.0
        for p in self.pieces:
            anti = P.polyint(p.coeffs)
            total += P.polyval(turns_to_rad(p.stop), anti) - P.polyval(turns_to_rad(p.start), anti)
        return total / TWO_PI

    def __call__(self, x):
        return evaluate(self, x)

    def scaled(self, factor: float) -> "SignalSpec":
        return SignalSpec(
            tuple(Piece(p.start, p.stop, tuple(factor * c for c in p.coeffs)) for p in self.pieces),
            name=f"{factor:g}*{self.name}",
        )


def _boundary_jumps(spec: SignalSpec) -> list[tuple[Fraction, float]]:
    """Raw (turn, jump) pairs at every breakpoint including the 0/2*pi seam."""
    out = []
    pieces = spec.pieces
    for left, right in zip(pieces[:-1], pieces[1:]):
        x = turns_to_rad(right.start)
        out.append((right.start, float(right(x) - left(x))))
    out.append((Fraction(0), float(pieces[0](0.0) - pieces[-1](TWO_PI))))
    return out


def _validate(spec: SignalSpec) -> None:
    pieces = spec.pieces
    if not pieces:
        raise SignalSpecError("a signal needs at least one piece")
    if pieces[0].start != 0 or pieces[-1].stop != 1:
        raise SignalSpecError("pieces must cover (0, 2*pi) exactly")
    for p in pieces:
        if not p.start < p.stop:
            raise SignalSpecError(f"empty or reversed piece interval ({p.start}, {p.stop})")
        if not p.coeffs:
            raise SignalSpecError("piece without polynomial coefficients")
        if p.degree > MAX_DEGREE:
            raise SignalSpecError(f"polynomial degree {p.degree} exceeds {MAX_DEGREE}")
        if not all(math.isfinite(c) for c in p.coeffs):
            raise SignalSpecError("non-finite polynomial coefficient")
    for left, right in zip(pieces[:-1], pieces[1:]):
        if left.stop != right.start:
            raise SignalSpecError(f"gap or overlap between pieces at {left.stop} / {right.start}")
    scale = max(1.0, max(abs(c) for p in pieces for c in p.coeffs))
    for t, jump in _boundary_jumps(spec):
        if abs(jump) > spec._jump_tol * scale and (t in _FORBIDDEN_JUMP_TURNS):
            raise SignalSpecError(f"jump of {jump:g} at {t}*2pi; jumps at 0, pi, 2pi are not allowed")


def true_jumps(spec: SignalSpec) -> JumpSet:
    """Exact jump set from adjacent-piece limits."""
    scale = max(1.0, max(abs(c) for p in spec.pieces for c in p.coeffs))
    entries = [(t, j) for t, j in _boundary_jumps(spec) if abs(j) > spec._jump_tol * scale and t != 0]
    entries.sort()
    return JumpSet(
        np.array([turns_to_rad(t) for t, _ in entries], dtype=float),
        np.array([j for _, j in entries], dtype=float),
        tuple(t for t, _ in entries),
    )


def evaluate(spec: SignalSpec, x):
    """Point values, right-continuous at jumps; ``x`` is reduced mod 2*pi."""
    scalar = np.ndim(x) == 0
    xr = np.mod(np.asarray(x, dtype=float), TWO_PI)
    starts = np.array([turns_to_rad(p.start) for p in spec.pieces])
    idx = np.searchsorted(starts, xr, side="right") - 1
    out = np.empty_like(xr)
    for i, piece in enumerate(spec.pieces):
        m = idx == i
        if np.any(m):
            out[m] = piece(xr[m])
    return float(out) if scalar else out


def one_sided_limits(spec: SignalSpec, x: float) -> tuple[float, float]:
    """``(f(x-0), f(x+0))`` computed from the polynomials of the adjacent pieces."""
    xr = float(np.mod(x, TWO_PI))
    starts = np.array([turns_to_rad(p.start) for p in spec.pieces])
    nearest = int(np.argmin(np.abs(starts - xr)))
    on_break = abs(starts[nearest] - xr) <= 1e-12
    right = nearest if on_break else int(np.searchsorted(starts, xr, side="right") - 1)
    left = (right - 1) % len(spec.pieces) if on_break else right
    lx = xr if not (on_break and right == 0) else TWO_PI
    return float(spec.pieces[left](lx)), float(spec.pieces[right](xr))


# --------------------------------------------------------------------------
# builtin signals
# --------------------------------------------------------------------------


def make_constant(value: float = 1.0) -> SignalSpec:
    return SignalSpec((Piece(Fraction(0), Fraction(1), (float(value),)),), name=f"constant({value:g})")


def make_pulse(a: float, b: float, h: float) -> SignalSpec:
    """Indicator pulse of height ``h`` on ``(a, b)``: jumps ``+h`` at a, ``-h`` at b."""
    if h == 0:
        raise SignalSpecError("pulse height must be nonzero")
    ta, tb = to_turns(a), to_turns(b)
    if not (0 < ta < tb < 1):
        raise SignalSpecError(f"need 0 < a < b < 2*pi, got a={a!r}, b={b!r}")
    if Fraction(1, 2) in (ta, tb):
        raise SignalSpecError("pulse edges may not sit at pi")
    pieces = (
        Piece(Fraction(0), ta, (0.0,)),
        Piece(ta, tb, (float(h),)),
        Piece(tb, Fraction(1), (0.0,)),
    )
    return SignalSpec(pieces, name=f"pulse({ta}*2pi,{tb}*2pi,{h:g})")


def make_staircase() -> SignalSpec:
    """``2*1_(2pi/5, 6pi/5) + 1_(4pi/5, 8pi/5)``."""
    f = Fraction
    pieces = (
        Piece(f(0), f(1, 5), (0.0,)),
        Piece(f(1, 5), f(2, 5), (2.0,)),
        Piece(f(2, 5), f(3, 5), (3.0,)),
        Piece(f(3, 5), f(4, 5), (1.0,)),
        Piece(f(4, 5), f(1), (0.0,)),
    )
    return SignalSpec(pieces, name="staircase")


def make_ramp() -> SignalSpec:
    """Linear ramp on ``(2pi/3, 4pi/3)`` rising from 0.5 to 1.5, zero elsewhere."""
    f = Fraction
    x0 = TWO_PI / 3
    slope = 1.0 / (TWO_PI / 3)
    pieces = (
        Piece(f(0), f(1, 3), (0.0,)),
        Piece(f(1, 3), f(2, 3), (0.5 - slope * x0, slope)),
        Piece(f(2, 3), f(1), (0.0,)),
    )
    return SignalSpec(pieces, name="ramp")


def make_parabola() -> SignalSpec:
    """Quadratic cap on ``(2pi/5, 8pi/5)``; continuous through pi, jumps at both edges."""
    f = Fraction
    # p(x) = 1 + (x - pi)^2 / 4
    pieces = (
        Piece(f(0), f(1, 5), (0.0,)),
        Piece(f(1, 5), f(4, 5), (1.0 + np.pi**2 / 4, -np.pi / 2, 0.25)),
        Piece(f(4, 5), f(1), (0.0,)),
    )
    return SignalSpec(pieces, name="parabola")


BUILTIN_SIGNALS = {
    "constant": lambda: make_constant(1.0),
    "pulse": lambda: make_pulse(TWO_PI / 3, 2 * TWO_PI / 3, 1.0),
    "pulse2": lambda: make_pulse(TWO_PI / 5, 3 * TWO_PI / 5, 2.0),
    "staircase": make_staircase,
    "ramp": make_ramp,
    "parabola": make_parabola,
}


def builtin(name: str) -> SignalSpec:
    try:
        return BUILTIN_SIGNALS[name]()
    except KeyError:
        raise SignalSpecError(f"unknown builtin signal {name!r}; choose from {sorted(BUILTIN_SIGNALS)}") from None


CORPUS_NAMES = ("constant", "pulse", "pulse2", "staircase")


def reference_corpus() -> list[SignalSpec]:
    """Piecewise-constant reference signals used by the acceptance checks.

    ``ramp`` and ``parabola`` are left out: their slope breaks add a
    background that decays only like 1/log n, which dominates the calibrated
    magnitude of small jumps at desk-scale orders.
    """
    return [builtin(name) for name in CORPUS_NAMES]


# --------------------------------------------------------------------------
# brute-force oracles
# --------------------------------------------------------------------------


def brute_force_variation(values: Sequence[float] | np.ndarray) -> float:
    """Discrete total variation ``sum |v[i+1] - v[i]|``."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise ValueError("need at least two samples to measure variation")
    return float(np.abs(np.diff(v)).sum())


def quadrature_coefficient(spec: SignalSpec, nu: int) -> complex:
    """``(1/2pi) int f exp(-i nu x) dx`` by adaptive QUADPACK quadrature, piece by piece."""
    from scipy.integrate import quad

    re = im = 0.0
    for p in spec.pieces:
        u, v = turns_to_rad(p.start), turns_to_rad(p.stop)
        if nu == 0:
            re += quad(p, u, v, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
            continue
        re += quad(p, u, v, weight="cos", wvar=nu, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
        im -= quad(p, u, v, weight="sin", wvar=nu, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
    return complex(re, im) / TWO_PI


def sample(spec: SignalSpec, m: int) -> np.ndarray:
    """Values on the uniform grid ``x_k = 2*pi*k/m``."""
    return evaluate(spec, TWO_PI * np.arange(m) / m)


def l2_mean_square(spec: SignalSpec) -> float:
    """``(1/2pi) int f^2 dx`` in closed form."""
    total = 0.0
    for p in spec.pieces:
        sq = P.polyint(P.polymul(p.coeffs, p.coeffs))
        total += P.polyval(turns_to_rad(p.stop), sq) - P.polyval(turns_to_rad(p.start), sq)
    return float(total / TWO_PI)


def pieces_from_breaks(breaks: Iterable, polys: Iterable[Sequence[float]], name: str = "custom") -> SignalSpec:
    breaks = [to_turns(b) for b in breaks]
    polys = list(polys)
    if len(breaks) != len(polys) + 1:
        raise SignalSpecError("need exactly one more breakpoint than polynomials")
    return SignalSpec(
        tuple(Piece(a, b, tuple(map(float, c))) for a, b, c in zip(breaks[:-1], breaks[1:], polys)),
        name=name,
    )
