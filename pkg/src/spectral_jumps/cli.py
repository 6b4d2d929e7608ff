"""Command line front end.

Subcommands::

    analyze    Y_n field rows        x, y_n, n, normalizer
    detect     jump report rows      location_rad, magnitude_est, score, n, K_used
    variation  one variation row     a, b, n, tv, grid_density, normalizer, K_var, mass_est, true_mass, refinement_change
    sweep      convergence rows      n, probe_x, conj_partial_sum, y_n, g_n, tv_full_period
    detect2d   hyperplane rows       direction, offset_rad, magnitude_est, score, n, K_used

Exit status: 0 success, 2 configuration error, 3 input error.  A vanishing
coefficient mass ``G(n) == 0`` is reported as a warning row, not a failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import re
import sys
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import corpus, detector, torus2d
from .errors import InputFormatError, SpectralJumpsError
from .io import load_field, load_samples, load_spec
from .spectral import coefficient_mass, coefficients_analytic, coefficients_from_samples, conjugate_partial_sum

log = logging.getLogger("spectral_jumps")

EXIT_OK, EXIT_CONFIG, EXIT_INPUT = 0, 2, 3

COLUMNS = {
    "analyze": ["x", "y_n", "n", "normalizer"],
    "detect": ["location_rad", "magnitude_est", "score", "n", "K_used"],
    "variation": ["a", "b", "n", "tv", "grid_density", "normalizer", "K_var", "mass_est", "true_mass", "refinement_change"],
    "sweep": ["n", "probe_x", "conj_partial_sum", "y_n", "g_n", "tv_full_period"],
    "detect2d": ["direction", "offset_rad", "magnitude_est", "score", "n", "K_used"],
}


class ConfigError(SpectralJumpsError):
    pass


@dataclass
class RunConfig:
    command: str
    signal: str | None = None
    samples: str | None = None
    n: int | None = None
    n_range: tuple[int, int, int] | None = None
    grid: int | None = None
    threshold: float = 0.25
    interval: tuple[float, float] | None = None
    direction: int | None = None
    probes: list[float] = field(default_factory=list)
    estimator: str = "yn-calibrated"
    out: str = "-"
    format: str = "csv"
    plot: str | None = None

    def validate(self) -> None:
        if self.command not in COLUMNS:
            raise ConfigError(f"unknown command {self.command!r}")
        if (self.signal is None) == (self.samples is None):
            raise ConfigError("give exactly one of --signal or --samples")
        if self.command == "detect2d" and self.samples is not None:
            raise ConfigError("detect2d takes a 2-D field via --signal")
        if self.command == "sweep":
            if self.n_range is None:
                raise ConfigError("sweep needs --n-range lo:hi:factor")
            lo, hi, factor = self.n_range
            if lo < 2 or hi < lo or factor < 2:
                raise ConfigError("--n-range needs 2 <= lo <= hi and factor >= 2")
        else:
            if self.n is None:
                raise ConfigError(f"{self.command} needs --n")
            if self.n < 2:
                raise ConfigError("--n must be >= 2")
            if self.grid is not None and self.grid < detector.MIN_POINTS_PER_ORDER * self.n:
                raise ConfigError(f"--grid must be >= 16*n = {16 * self.n}")
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError("--threshold must lie in (0, 1)")
        if self.command == "variation":
            if self.interval is None:
                raise ConfigError("variation needs --interval a:b")
            a, b = self.interval
            if not 0 < a < b < corpus.TWO_PI:
                raise ConfigError("--interval needs 0 < a < b < 2pi")
        if self.direction not in (None, 1, 2):
            raise ConfigError("--direction must be 1 or 2")
        if self.format not in ("csv", "jsonl"):
            raise ConfigError("--format must be csv or jsonl")

    @property
    def orders(self) -> list[int]:
        if self.n_range is None:
            return [self.n]
        lo, hi, factor = self.n_range
        out, k = [], lo
        while k <= hi:
            out.append(k)
            k *= factor
        return out


# --------------------------------------------------------------------------
# argument parsing helpers
# --------------------------------------------------------------------------

_RATIONAL_ANGLE = re.compile(r"^\s*(?:(-?\d+)\s*(?:/\s*(\d+))?\s*\*\s*)?2\s*pi\s*$")


def parse_angle(text: str) -> float:
    """Radians, or ``p/q*2pi`` / ``2pi`` for rational multiples of a turn."""
    m = _RATIONAL_ANGLE.match(text)
    if m:
        p = int(m.group(1)) if m.group(1) else 1
        q = int(m.group(2)) if m.group(2) else 1
        if q == 0:
            raise ValueError("zero denominator")
        return corpus.TWO_PI * p / q
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("angle must be finite")
    return value


def _interval(text: str) -> tuple[float, float]:
    try:
        a, b = text.split(":")
        return parse_angle(a), parse_angle(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b, got {text!r}") from None


def _n_range(text: str) -> tuple[int, int, int]:
    try:
        lo, hi, factor = (int(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:factor, got {text!r}") from None
    return lo, hi, factor


def _angle(text: str) -> float:
    try:
        return parse_angle(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad angle {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--signal", help="builtin name or path to a JSON signal document")
    src.add_argument("--samples", help="text file with one sample per line on a uniform grid")
    common.add_argument("--n", type=int, help="detector order (>= 2)")
    common.add_argument("--grid", type=int, help="grid points per period (>= 16 n)")
    common.add_argument("--threshold", type=float, default=0.25, help="peak threshold as a fraction of max |Y_n|")
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    common.add_argument("--plot", help="also render a PNG figure to this path")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="spectral-jumps", description="Jump detection from Fourier coefficients.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="emit the Y_n field")
    det = sub.add_parser("detect", parents=[common], help="locate and size jumps")
    det.add_argument("--estimator", choices=("yn-calibrated", "lukacs"), default="yn-calibrated")
    var = sub.add_parser("variation", parents=[common], help="variation of Y_n over an interval")
    var.add_argument("--interval", type=_interval, help="a:b in radians or p/q*2pi")
    sw = sub.add_parser("sweep", parents=[common], help="convergence sweep over n")
    sw.add_argument("--n-range", type=_n_range, help="lo:hi:factor, e.g. 256:16384:2")
    sw.add_argument("--probe", type=_angle, action="append", default=[], help="probe point (repeatable)")
    d2 = sub.add_parser("detect2d", parents=[common], help="hyperplane detection on the 2-torus")
    d2.add_argument("--direction", type=int, choices=(1, 2), help="coordinate direction (default: both)")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command,
        signal=ns.signal,
        samples=ns.samples,
        n=ns.n,
        n_range=getattr(ns, "n_range", None),
        grid=ns.grid,
        threshold=ns.threshold,
        interval=getattr(ns, "interval", None),
        direction=getattr(ns, "direction", None),
        probes=list(getattr(ns, "probe", []) or []),
        estimator=getattr(ns, "estimator", "yn-calibrated"),
        out=ns.out,
        format=ns.format,
        plot=ns.plot,
    )


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


class RowWriter:
    def __init__(self, columns: Sequence[str], fmt: str):
        self.columns = list(columns)
        self.fmt = fmt
        self.buf = io.StringIO()
        self.warnings: list[str] = []
        self.rows: list[dict] = []

    def warn(self, message: str) -> None:
        log.warning(message)
        self.warnings.append(message)

    def add(self, row: dict) -> None:
        self.rows.append({k: row.get(k) for k in self.columns})

    def render(self) -> str:
        out = io.StringIO()
        if self.fmt == "csv":
            for w in self.warnings:
                out.write(f"# warning: {w}\n")
            wr = csv.writer(out, lineterminator="\n")
            wr.writerow(self.columns)
            for r in self.rows:
                wr.writerow([_fmt(r[c]) for c in self.columns])
        else:
            for w in self.warnings:
                out.write(json.dumps({"warning": w}) + "\n")
            for r in self.rows:
                out.write(json.dumps({c: _jsonable(r[c]) for c in self.columns}) + "\n")
        return out.getvalue()


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _emit(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# --------------------------------------------------------------------------
# signal loading
# --------------------------------------------------------------------------


def _load_1d(cfg: RunConfig, n_max: int):
    """Coefficients up to ``n_max`` and the ground-truth jump set when known."""
    if cfg.samples is not None:
        samples = load_samples(cfg.samples)
        return coefficients_from_samples(samples, n_max), None
    if cfg.signal in corpus.BUILTIN_SIGNALS:
        spec = corpus.builtin(cfg.signal)
    elif os.path.exists(cfg.signal):
        spec = load_spec(cfg.signal)
    else:
        raise InputFormatError(f"{cfg.signal!r} is neither a builtin signal nor a readable file")
    return coefficients_analytic(spec, n_max), corpus.true_jumps(spec)


def _load_2d(cfg: RunConfig):
    if cfg.signal in torus2d.BUILTIN_FIELDS:
        return torus2d.BUILTIN_FIELDS[cfg.signal]()
    if os.path.exists(cfg.signal):
        return load_field(cfg.signal)
    raise InputFormatError(f"{cfg.signal!r} is neither a builtin 2-D field nor a readable file")


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _degenerate_note(n: int) -> str:
    return f"G(n)=0 at n={n}; coefficient mass vanishes and the detector field is identically 0"


def _cmd_analyze(cfg: RunConfig, w: RowWriter) -> None:
    coeffs, jumps = _load_1d(cfg, cfg.n)
    fld = detector.y_n_field(coeffs, cfg.n, cfg.grid)
    if fld.degenerate:
        w.warn(_degenerate_note(cfg.n))
    for x, y in zip(fld.grid.tolist(), fld.values.tolist()):
        w.add({"x": x, "y_n": y, "n": cfg.n, "normalizer": fld.normalizer})
    if cfg.plot:
        from .plotting import plot_field

        plot_field(fld.grid, fld.values, cfg.plot, n=cfg.n, jumps=None if jumps is None else list(jumps))


def _cmd_detect(cfg: RunConfig, w: RowWriter) -> None:
    coeffs, jumps = _load_1d(cfg, cfg.n)
    fld = detector.y_n_field(coeffs, cfg.n, cfg.grid)
    if fld.degenerate:
        w.warn(_degenerate_note(cfg.n))
    K = detector.calibrate_K(cfg.n) if cfg.estimator == "yn-calibrated" else None
    report = detector.detect_jumps(coeffs, cfg.n, cfg.threshold, K=K, estimator=cfg.estimator, field=fld)
    for e in report.entries:
        w.add({"location_rad": e.location, "magnitude_est": e.magnitude, "score": e.score, "n": cfg.n, "K_used": report.K_used})
    if cfg.plot:
        from .plotting import plot_field

        pts = [(e.location, float(detector.y_n(coeffs, cfg.n, e.location))) for e in report.entries]
        plot_field(fld.grid, fld.values, cfg.plot, n=cfg.n, jumps=None if jumps is None else list(jumps), detected=pts)


def _cmd_variation(cfg: RunConfig, w: RowWriter) -> None:
    coeffs, jumps = _load_1d(cfg, cfg.n)
    a, b = cfg.interval
    grid = cfg.grid
    if grid is not None and grid * (b - a) / corpus.TWO_PI < detector.MIN_POINTS_PER_ORDER * cfg.n:
        raise ConfigError("--grid leaves fewer than 16*n points inside the interval")
    est = detector.interval_variation(coeffs, cfg.n, a, b, grid)
    if est.normalizer == 0.0:
        w.warn(_degenerate_note(cfg.n))
    K_var = detector.calibrate_K_variation(cfg.n)
    true_mass = None if jumps is None else jumps.inside(a, b).mass
    w.add({
        "a": a, "b": b, "n": cfg.n, "tv": est.value, "grid_density": est.grid_size,
        "normalizer": est.normalizer, "K_var": K_var.K, "mass_est": est.mass_estimate(K_var),
        "true_mass": true_mass, "refinement_change": est.refinement_change,
    })
    if cfg.plot:
        from .plotting import plot_field

        fld = detector.y_n_field(coeffs, cfg.n)
        plot_field(fld.grid, fld.values, cfg.plot, n=cfg.n, jumps=None if jumps is None else list(jumps),
                   title=f"variation over ({a:.4f}, {b:.4f}) = {est.value:.6g}")


def _cmd_sweep(cfg: RunConfig, w: RowWriter) -> None:
    orders = cfg.orders
    coeffs, jumps = _load_1d(cfg, orders[-1])
    probes = cfg.probes or ([float(jumps.locations[0])] if jumps is not None and len(jumps) else [math.pi])
    for n in orders:
        fld = detector.y_n_field(coeffs, n)
        if fld.degenerate:
            w.warn(_degenerate_note(n))
        g = coefficient_mass(coeffs, n)
        tv = fld.total_variation()
        yv = np.atleast_1d(detector.y_n(coeffs, n, np.asarray(probes)))
        for x0, y in zip(probes, yv.tolist()):
            w.add({"n": n, "probe_x": x0, "conj_partial_sum": conjugate_partial_sum(coeffs, n, x0),
                   "y_n": y, "g_n": g, "tv_full_period": tv})
    if cfg.plot:
        from .plotting import plot_sweep

        plot_sweep(w.rows, cfg.plot)


def _cmd_detect2d(cfg: RunConfig, w: RowWriter) -> None:
    fld = _load_2d(cfg)
    coeffs = torus2d.coefficients_2d(fld, cfg.n)
    directions = [cfg.direction] if cfg.direction else [1, 2]
    plotted = None
    for j in directions:
        report = torus2d.detect_hyperplanes(coeffs, j, cfg.n, cfg.threshold, grid_size=cfg.grid)
        if report.normalizer == 0.0:
            w.warn(_degenerate_note(cfg.n))
        for e in report.entries:
            w.add({"direction": j, "offset_rad": e.offset, "magnitude_est": e.magnitude, "score": e.score,
                   "n": cfg.n, "K_used": report.K_used})
        if plotted is None:
            plotted = (j, report)
    if cfg.plot:
        from .plotting import plot_slices

        j, report = plotted
        grid, rows, _ = torus2d.y_jn_slices(coeffs, j, cfg.n, torus2d.default_slices(), cfg.grid)
        plot_slices(grid, rows.mean(axis=0), cfg.plot, n=cfg.n, direction=j, offsets=report.offsets)


_COMMANDS = {
    "analyze": _cmd_analyze,
    "detect": _cmd_detect,
    "variation": _cmd_variation,
    "sweep": _cmd_sweep,
    "detect2d": _cmd_detect2d,
}


def run(cfg: RunConfig) -> int:
    """Execute one configured command; returns the process exit status."""
    try:
        cfg.validate()
        w = RowWriter(COLUMNS[cfg.command], cfg.format)
        _COMMANDS[cfg.command](cfg, w)
        _emit(w.render(), cfg.out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SpectralJumpsError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
