"""Curve and map extraction from reconstructed sequences, plus error metrics.

All curves and maps are computed on the magnitude of the complex frames.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_sequence


@dataclass(frozen=True)
class RoiSpec:
    """A region to evaluate: a rectangle (rows/cols half-open), an explicit
    pixel set, or a vertical line (one column over a row range)."""

    kind: str
    label: str = ""
    rect: tuple[int, int, int, int] | None = None
    pixels: tuple[tuple[int, int], ...] | None = None
    column: int | None = None
    rows: tuple[int, int] | None = None

    def __post_init__(self):
        if self.kind not in ("rect", "pixels", "vline"):
            raise ValueError(f"unknown roi kind {self.kind!r}")
        if self.kind == "rect":
            if self.rect is None:
                raise ValueError("rect roi needs rect=(r0, r1, c0, c1)")
            object.__setattr__(self, "rect", tuple(int(v) for v in self.rect))
        elif self.kind == "pixels":
            if not self.pixels:
                raise ValueError("pixels roi needs a nonempty pixel list")
            object.__setattr__(
                self, "pixels", tuple((int(r), int(c)) for r, c in self.pixels)
            )
        else:
            if self.column is None:
                raise ValueError("vline roi needs a column")
            if self.rows is not None:
                object.__setattr__(self, "rows", (int(self.rows[0]), int(self.rows[1])))

    def pixel_array(self, shape) -> tuple[np.ndarray, np.ndarray]:
        """Row/col index arrays of the member pixels, validated against the grid."""
        n1, n2 = shape
        if self.kind == "rect":
            r0, r1, c0, c1 = self.rect
            if not (0 <= r0 < r1 <= n1 and 0 <= c0 < c1 <= n2):
                raise ValueError(f"roi rect {self.rect} outside grid {shape}")
            rr, cc = np.mgrid[r0:r1, c0:c1]
            return rr.ravel(), cc.ravel()
        if self.kind == "pixels":
            rr = np.array([p[0] for p in self.pixels])
            cc = np.array([p[1] for p in self.pixels])
            if rr.min() < 0 or rr.max() >= n1 or cc.min() < 0 or cc.max() >= n2:
                raise ValueError(f"roi pixels outside grid {shape}")
            return rr, cc
        r0, r1 = self.rows if self.rows is not None else (0, n1)
        if not (0 <= r0 < r1 <= n1 and 0 <= self.column < n2):
            raise ValueError(f"roi line outside grid {shape}")
        rr = np.arange(r0, r1)
        return rr, np.full(rr.size, self.column)


def roi_mean_curve(seq, roi: RoiSpec) -> np.ndarray:
    """Per-frame mean magnitude over the ROI pixels; shape (T,)."""
    seq = as_sequence(seq)
    rr, cc = roi.pixel_array(seq.shape[1:])
    if rr.size == 0:
        raise ValueError("empty roi")
    return np.abs(seq[:, rr, cc]).mean(axis=1)


def pixel_curves(seq, pixels) -> np.ndarray:
    """Magnitude time series of individual pixels; shape (T, P)."""
    seq = as_sequence(seq)
    roi = RoiSpec(kind="pixels", pixels=tuple(pixels))
    rr, cc = roi.pixel_array(seq.shape[1:])
    return np.abs(seq[:, rr, cc])


def roi_line_map(seq, roi: RoiSpec) -> np.ndarray:
    """Magnitude of a vertical line over time; shape (line length, T)."""
    if roi.kind != "vline":
        raise ValueError("roi_line_map needs a vline roi")
    seq = as_sequence(seq)
    rr, cc = roi.pixel_array(seq.shape[1:])
    return np.abs(seq[:, rr, cc]).T


def curve_metrics(recon_curve, truth_curve) -> dict:
    """RMSE, peak value/frame of the reconstruction, and Pearson correlation
    with the truth (None when either curve is constant)."""
    a = np.asarray(recon_curve, dtype=float).ravel()
    b = np.asarray(truth_curve, dtype=float).ravel()
    if a.size != b.size:
        raise ValueError(f"curve lengths differ: {a.size} vs {b.size}")
    if a.size == 0:
        raise ValueError("empty curves")
    rmse = float(np.sqrt(np.mean((a - b) ** 2)))
    peak_frame = int(np.argmax(a))
    corr = None
    if np.std(a) > 0 and np.std(b) > 0:
        corr = float(np.corrcoef(a, b)[0, 1])
    return {
        "rmse": rmse,
        "peak_value": float(a[peak_frame]),
        "peak_frame": peak_frame,
        "pearson_r": corr,
    }
