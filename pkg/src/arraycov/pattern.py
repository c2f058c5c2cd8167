"""Per-feed complex polarimetric far-field patterns.

Internal unit is linear complex field-gain in the sqrt(realized-gain)
convention; dB shows up only at I/O and reporting boundaries, because
array synthesis sums fields coherently and is linear in them.
"""

import csv
import math
import os
from dataclasses import dataclass, replace

import numpy as np

from .errors import ParseError
from .grid import (
    Direction,
    SphericalGrid,
    _is_pole,
    detect_regular_steps,
    make_regular_grid,
    regular_ring_structure,
)
from .ioutil import format_float, read_json, write_json

DEFAULT_FREQUENCY_GHZ = 28.0
DEFAULT_CONVENTION = "realized-gain-embedded"

PATTERN_CSV_HEADER = [
    "feed",
    "theta_deg",
    "phi_deg",
    "re_gtheta",
    "im_gtheta",
    "re_gphi",
    "im_gphi",
]

# complex disagreement above this between duplicate pole rows is an error
_POLE_MERGE_ATOL = 1e-7


@dataclass(frozen=True)
class PolarimetricSample:
    """Complex field-gain pair for one direction: (theta-pol, phi-pol)."""

    g_theta: complex
    g_phi: complex

    @property
    def power_gain(self) -> float:
        return abs(self.g_theta) ** 2 + abs(self.g_phi) ** 2


@dataclass(frozen=True)
class ElementPatternSet:
    """Feed-by-direction matrix of polarimetric samples on one grid.

    gains has shape (n_feeds, n_directions, 2) with component 0 the
    theta polarization and component 1 the phi polarization.
    """

    grid: SphericalGrid
    feeds: tuple
    gains: np.ndarray
    frequency_ghz: float = DEFAULT_FREQUENCY_GHZ
    convention: str = DEFAULT_CONVENTION

    def __post_init__(self):
        feeds = tuple(str(f) for f in self.feeds)
        if len(set(feeds)) != len(feeds) or not feeds:
            raise ValueError("feed labels must be unique and non-empty")
        gains = np.ascontiguousarray(self.gains, dtype=np.complex128)
        if gains.shape != (len(feeds), len(self.grid), 2):
            raise ValueError(
                f"gains shape {gains.shape} does not match "
                f"({len(feeds)}, {len(self.grid)}, 2)"
            )
        if not np.all(np.isfinite(gains)):
            raise ValueError("pattern samples must be finite")
        gains.flags.writeable = False
        object.__setattr__(self, "feeds", feeds)
        object.__setattr__(self, "gains", gains)

    def feed_index(self, feed) -> int:
        try:
            return self.feeds.index(feed)
        except ValueError:
            raise KeyError(f"unknown feed {feed!r}") from None

    def sample(self, feed, direction: Direction) -> PolarimetricSample:
        fi = self.feed_index(feed)
        di = self.grid.index_of(direction)
        return PolarimetricSample(
            complex(self.gains[fi, di, 0]), complex(self.gains[fi, di, 1])
        )

    def power_gain(self, feed) -> np.ndarray:
        """Linear power gain |g_theta|^2 + |g_phi|^2 for every direction."""
        g = self.gains[self.feed_index(feed)]
        return np.abs(g[:, 0]) ** 2 + np.abs(g[:, 1]) ** 2

    def select_feeds(self, feeds) -> "ElementPatternSet":
        idx = [self.feed_index(f) for f in feeds]
        return replace(self, feeds=tuple(feeds), gains=self.gains[idx])


def power_gain_db(pattern_set: ElementPatternSet, feed, direction: Direction) -> float:
    """10*log10 of the polarization-summed power gain; -inf for zero field."""
    p = pattern_set.sample(feed, direction).power_gain
    return 10.0 * math.log10(p) if p > 0.0 else -math.inf


def sidecar_path(csv_path) -> str:
    root, _ = os.path.splitext(os.fspath(csv_path))
    return root + ".json"


def _parse_pattern_rows(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != PATTERN_CSV_HEADER:
            raise ParseError(
                f"expected header {','.join(PATTERN_CSV_HEADER)}", path=path, row=1
            )
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != 7:
                raise ParseError("expected 7 columns", path=path, row=lineno)
            feed = rec[0].strip()
            if not feed:
                raise ParseError("empty feed label", path=path, row=lineno)
            try:
                values = [float(v) for v in rec[1:]]
            except ValueError:
                raise ParseError("non-numeric value", path=path, row=lineno) from None
            if not all(map(math.isfinite, values)):
                raise ParseError("non-finite value", path=path, row=lineno)
            theta, phi = values[0], values[1]
            if not (0.0 <= theta <= 180.0):
                raise ParseError(
                    f"theta_deg {theta} outside [0, 180]", path=path, row=lineno
                )
            g_theta = complex(values[2], values[3])
            g_phi = complex(values[4], values[5])
            yield lineno, feed, theta, phi % 360.0, g_theta, g_phi


def load_pattern_csv(path) -> ElementPatternSet:
    """Read a pattern CSV (plus optional JSON sidecar for metadata).

    Directions must form the full regular theta/phi lattice, identical
    across feeds; rows may appear in any order. Repeated pole rows
    (theta 0 or 180 at several phi) collapse to the single stored pole
    sample and must agree within 1e-7.
    """
    per_feed = {}
    feeds = []
    for lineno, feed, theta, phi, g_theta, g_phi in _parse_pattern_rows(path):
        if feed not in per_feed:
            per_feed[feed] = {}
            feeds.append(feed)
        # rounded key, matching SphericalGrid lookup semantics
        key = SphericalGrid._key(theta, phi)
        samples = per_feed[feed]
        if key in samples:
            prev = samples[key]
            if not _is_pole(theta):
                raise ParseError(
                    f"duplicate direction theta={theta} phi={phi} for feed {feed}",
                    path=path,
                    row=lineno,
                )
            if abs(prev[0] - g_theta) > _POLE_MERGE_ATOL or (
                abs(prev[1] - g_phi) > _POLE_MERGE_ATOL
            ):
                raise ParseError(
                    f"conflicting pole samples for feed {feed} at theta={theta}",
                    path=path,
                    row=lineno,
                )
        else:
            samples[key] = (g_theta, g_phi)
    if not feeds:
        raise ParseError("no samples", path=path)

    first = feeds[0]
    keys = set(per_feed[first])
    for feed in feeds[1:]:
        if set(per_feed[feed]) != keys:
            raise ParseError(
                f"feed {feed} covers different directions than feed {first}", path=path
            )

    thetas = np.array([k[0] for k in keys])
    phis = np.array([k[1] for k in keys])
    steps = detect_regular_steps(thetas, phis)
    if steps is None:
        raise ParseError(
            "directions do not form a full regular theta/phi lattice", path=path
        )
    grid = make_regular_grid(*steps)

    gains = np.empty((len(feeds), len(grid), 2), dtype=np.complex128)
    for fi, feed in enumerate(feeds):
        samples = per_feed[feed]
        for di in range(len(grid)):
            key = SphericalGrid._key(grid.theta_deg[di], grid.phi_deg[di])
            try:
                g_theta, g_phi = samples[key]
            except KeyError:
                raise ParseError(
                    f"feed {feed} is missing direction theta={grid.theta_deg[di]}"
                    f" phi={grid.phi_deg[di]}",
                    path=path,
                ) from None
            gains[fi, di, 0] = g_theta
            gains[fi, di, 1] = g_phi

    frequency = DEFAULT_FREQUENCY_GHZ
    convention = DEFAULT_CONVENTION
    meta_path = sidecar_path(path)
    if os.path.exists(meta_path):
        meta = read_json(meta_path)
        frequency = float(meta.get("frequency_ghz", frequency))
        convention = str(meta.get("convention", convention))
    return ElementPatternSet(
        grid, tuple(feeds), gains, frequency_ghz=frequency, convention=convention
    )


def save_pattern_csv(pattern_set: ElementPatternSet, path) -> None:
    """Write the pattern CSV and its JSON metadata sidecar.

    Floats go through shortest-round-trip formatting, so load after
    save reproduces every complex sample bit-exactly.
    """
    grid = pattern_set.grid
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PATTERN_CSV_HEADER)
        for fi, feed in enumerate(pattern_set.feeds):
            for di in range(len(grid)):
                g = pattern_set.gains[fi, di]
                writer.writerow(
                    [
                        feed,
                        format_float(grid.theta_deg[di]),
                        format_float(grid.phi_deg[di]),
                        format_float(g[0].real),
                        format_float(g[0].imag),
                        format_float(g[1].real),
                        format_float(g[1].imag),
                    ]
                )
    write_json(
        sidecar_path(path),
        {
            "frequency_ghz": pattern_set.frequency_ghz,
            "convention": pattern_set.convention,
        },
    )


def _ring_matrix(pattern_set: ElementPatternSet):
    """Gains as (n_feeds, n_rings, n_phi, 2) with pole rows replicated."""
    grid = pattern_set.grid
    ring_thetas, rings = regular_ring_structure(grid)
    n_phi = round(360.0 / grid.phi_step_deg)
    out = np.empty(
        (len(pattern_set.feeds), ring_thetas.size, n_phi, 2), dtype=np.complex128
    )
    for ri, idx in enumerate(rings):
        vals = pattern_set.gains[:, idx, :]
        if idx.size == 1:
            # single pole sample replicated across the phi stencil
            out[:, ri, :, :] = vals
        else:
            out[:, ri, :, :] = vals
    return ring_thetas, out


def resample(pattern_set: ElementPatternSet, target: SphericalGrid) -> ElementPatternSet:
    """Bilinear (theta, phi) interpolation onto another grid.

    Real and imaginary parts of both polarization components are
    interpolated independently; phi wraps at 360 and the pole samples
    act as full rings of the pole value.
    """
    src = pattern_set.grid
    if not src.is_regular:
        raise ValueError("resample requires a regular source grid")
    if target.same_directions(src):
        return replace(pattern_set, grid=target)

    ring_thetas, matrix = _ring_matrix(pattern_set)
    t_step = src.theta_step_deg
    p_step = src.phi_step_deg
    n_rings = ring_thetas.size
    n_phi = matrix.shape[2]

    theta = target.theta_deg / t_step
    i0 = np.clip(np.floor(theta).astype(np.int64), 0, n_rings - 2)
    ft = theta - i0
    phi = (target.phi_deg % 360.0) / p_step
    j0 = np.floor(phi).astype(np.int64) % n_phi
    fp = phi - np.floor(phi)
    j1 = (j0 + 1) % n_phi

    v00 = matrix[:, i0, j0, :]
    v01 = matrix[:, i0, j1, :]
    v10 = matrix[:, i0 + 1, j0, :]
    v11 = matrix[:, i0 + 1, j1, :]
    wt = ft[np.newaxis, :, np.newaxis]
    wp = fp[np.newaxis, :, np.newaxis]
    gains = (
        v00 * (1.0 - wt) * (1.0 - wp)
        + v01 * (1.0 - wt) * wp
        + v10 * wt * (1.0 - wp)
        + v11 * wt * wp
    )
    return replace(pattern_set, grid=target, gains=gains)
