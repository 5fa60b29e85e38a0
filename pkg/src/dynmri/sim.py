"""Synthetic dynamic-acquisition generator: a two-contrast phantom with an
activation time course, golden-angle spoke patterns, and noisy k-space."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.stats import gamma as _gamma_dist

from .core import KSpaceData, as_image, as_sequence
from .operators import SamplingPattern, dft_forward


@dataclass(frozen=True)
class HrfParams:
    """Double-gamma activation response: a peak gamma density minus a scaled
    undershoot density, rescaled so the curve's maximum equals ``amplitude``."""

    peak_shape: float = 6.0
    undershoot_shape: float = 16.0
    undershoot_ratio: float = 1.0 / 6.0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.peak_shape <= 1 or self.undershoot_shape <= 1:
            raise ValueError("gamma shapes must exceed 1")
        if self.undershoot_ratio < 0 or self.amplitude < 0:
            raise ValueError("undershoot_ratio and amplitude must be nonnegative")


@lru_cache(maxsize=32)
def _hrf_peak(peak_shape: float, undershoot_shape: float, ratio: float) -> float:
    tt = np.linspace(0.0, 50.0, 50001)
    raw = _gamma_dist.pdf(tt, peak_shape) - ratio * _gamma_dist.pdf(tt, undershoot_shape)
    return float(raw.max())


def hrf_canonical(t, params: HrfParams = HrfParams()):
    """Activation response at time ``t`` (seconds); zero for ``t <= 0``,
    peak value equal to ``params.amplitude``."""
    tt = np.asarray(t, dtype=float)
    raw = _gamma_dist.pdf(tt, params.peak_shape) - params.undershoot_ratio * _gamma_dist.pdf(
        tt, params.undershoot_shape
    )
    peak = _hrf_peak(params.peak_shape, params.undershoot_shape, params.undershoot_ratio)
    out = raw * (params.amplitude / peak) if peak > 0 else np.zeros_like(raw)
    if np.ndim(t) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class PhantomSpec:
    """Everything needed to regenerate one synthetic dataset.

    ``roi`` is (row0, row1, col0, col1), half-open.  The activation time
    axis is configured in frames: the response starts at ``onset_frame``
    and advances ``seconds_per_frame`` per frame.
    """

    shape: tuple[int, int] = (109, 91)
    num_frames: int = 60
    mode: str = "builtin"
    roi: tuple[int, int, int, int] = (42, 51, 55, 64)
    amplitude: float = 0.1
    noise_fraction: float = 0.05
    seed: int = 1234
    spokes_per_frame: int = 5
    angle_increment_deg: float = 111.25
    seconds_per_frame: float = 0.45
    onset_frame: float = 2.0
    hrf: HrfParams = HrfParams()
    noise_per_frame: bool = False

    def __post_init__(self):
        object.__setattr__(self, "shape", (int(self.shape[0]), int(self.shape[1])))
        object.__setattr__(self, "roi", tuple(int(v) for v in self.roi))
        if self.mode not in ("builtin", "external"):
            raise ValueError(f"unknown phantom mode {self.mode!r}")
        r0, r1, c0, c1 = self.roi
        n1, n2 = self.shape
        if not (0 <= r0 < r1 <= n1 and 0 <= c0 < c1 <= n2):
            raise ValueError(f"roi {self.roi} outside the {self.shape} grid")
        if self.amplitude < 0:
            raise ValueError("amplitude must be nonnegative")
        if not 0 <= self.noise_fraction < 1:
            raise ValueError("noise_fraction must lie in [0, 1)")
        if self.num_frames < 1 or self.spokes_per_frame < 1:
            raise ValueError("num_frames and spokes_per_frame must be >= 1")
        if self.seconds_per_frame <= 0:
            raise ValueError("seconds_per_frame must be positive")

    def roi_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        r0, r1, c0, c1 = self.roi
        mask[r0:r1, c0:c1] = True
        return mask


def _ellipse(yy, xx, cy, cx, ry, rx):
    return ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.0


def builtin_contrast_pair(shape) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic piecewise-constant head phantom rendered in two
    contrasts that share every edge but flip the jump sign across several
    interfaces (bright-in-one / dark-in-the-other tissue)."""
    n1, n2 = int(shape[0]), int(shape[1])
    yy, xx = np.mgrid[0:n1, 0:n2].astype(float)
    cy, cx = (n1 - 1) / 2.0, (n2 - 1) / 2.0
    head = _ellipse(yy, xx, cy, cx, 0.46 * n1, 0.45 * n2)
    brain = _ellipse(yy, xx, cy, cx, 0.375 * n1, 0.36 * n2)
    vent = _ellipse(yy, xx, cy - 0.14 * n1, cx - 0.09 * n2, 0.105 * n1, 0.085 * n2)
    blob = _ellipse(yy, xx, cy + 0.17 * n1, cx + 0.12 * n2, 0.095 * n1, 0.105 * n2)
    gray = _ellipse(yy, xx, cy - 0.075 * n1, cx + 0.155 * n2, 0.115 * n1, 0.125 * n2)
    t1 = np.zeros((n1, n2))
    t2 = np.zeros((n1, n2))
    for region, v1, v2 in (
        (head, 0.90, 0.12),   # skull: bright T1, dark T2
        (brain, 0.45, 0.55),
        (vent, 0.12, 0.90),   # fluid: dark T1, bright T2 (sign-flipped jump)
        (blob, 0.70, 0.35),   # sign-flipped again
        (gray, 0.55, 0.62),   # activation host tissue
    ):
        t1[region] = v1
        t2[region] = v2
    return t1, t2


def make_phantom(spec: PhantomSpec, prior_image=None, dynamic_image=None):
    """Build the (prior, ground-truth sequence) pair.

    Builtin mode renders the geometric two-contrast phantom; external mode
    takes two co-registered contrast images (prior contrast, dynamic
    contrast).  Frames equal the dynamic contrast plus the activation
    response inside the ROI.
    """
    if spec.mode == "external":
        if prior_image is None or dynamic_image is None:
            raise ValueError("external mode needs both contrast images")
        t1 = as_image(prior_image)
        t2 = as_image(dynamic_image)
        if t1.shape != t2.shape:
            raise ValueError(f"contrast shapes differ: {t1.shape} vs {t2.shape}")
        if t1.shape != spec.shape:
            raise ValueError(f"images {t1.shape} do not match spec grid {spec.shape}")
    else:
        t1_r, t2_r = builtin_contrast_pair(spec.shape)
        t1 = t1_r.astype(np.complex128)
        t2 = t2_r.astype(np.complex128)
    mask = spec.roi_mask()
    hrf = replace(spec.hrf, amplitude=spec.amplitude)
    times = (np.arange(spec.num_frames) - spec.onset_frame) * spec.seconds_per_frame
    curve = hrf_canonical(times, hrf)
    truth = np.broadcast_to(t2, (spec.num_frames,) + spec.shape).copy()
    truth += curve[:, None, None] * mask
    return t1, as_sequence(truth)


def golden_angle_pattern(
    num_frames: int,
    spokes_per_frame: int,
    shape,
    increment_deg: float = 111.25,
) -> SamplingPattern:
    """Radial spoke pattern on the Cartesian grid.

    Global spoke ``s = frame*spokes_per_frame + j`` gets angle
    ``(s * increment_deg) mod 180``.  Each spoke steps through the grid
    center at unit radial increments over ``[-R, R]``,
    ``R = ceil(max(N1, N2)/2)``, rounds to the nearest integer frequency
    on the centered grid, maps it to DFT indices modulo the grid size, and
    deduplicates within the frame.
    """
    if num_frames < 1 or spokes_per_frame < 1:
        raise ValueError("num_frames and spokes_per_frame must be >= 1")
    n1, n2 = int(shape[0]), int(shape[1])
    radius = math.ceil(max(n1, n2) / 2)
    r = np.arange(-radius, radius + 1)
    frame_indices = []
    frame_angles = []
    for t in range(num_frames):
        spokes = t * spokes_per_frame + np.arange(spokes_per_frame)
        angles = (spokes * increment_deg) % 180.0
        linear = []
        for ang in angles:
            theta = math.radians(ang)
            kx = np.rint(r * math.cos(theta)).astype(np.int64)
            ky = np.rint(r * math.sin(theta)).astype(np.int64)
            linear.append((ky % n1) * n2 + (kx % n2))
        frame_indices.append(np.unique(np.concatenate(linear)))
        frame_angles.append(angles)
    return SamplingPattern(
        (n1, n2), tuple(frame_indices), tuple(frame_angles)
    )


def synthesize_kspace(
    truth,
    pattern: SamplingPattern,
    noise_fraction: float,
    seed: int,
    per_frame: bool = False,
) -> KSpaceData:
    """Sampled Fourier data of the ground truth plus complex Gaussian noise
    rescaled to the requested fraction of the clean signal norm (over the
    whole dataset by default, per frame with ``per_frame``)."""
    truth = as_sequence(truth)
    if truth.shape[0] != pattern.num_frames:
        raise ValueError(
            f"{truth.shape[0]} frames vs pattern with {pattern.num_frames}"
        )
    if truth.shape[1:] != pattern.shape:
        raise ValueError(f"grid {truth.shape[1:]} vs pattern {pattern.shape}")
    if not 0 <= noise_fraction < 1:
        raise ValueError("noise_fraction must lie in [0, 1)")
    fk = dft_forward(truth)
    clean = [fk[t].reshape(-1)[pattern.frame_indices[t]] for t in range(pattern.num_frames)]
    if noise_fraction == 0:
        return KSpaceData(tuple(clean), pattern)
    counts = [c.size for c in clean]
    total = int(np.sum(counts))
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(total) + 1j * rng.standard_normal(total)
    frames = []
    offset = 0
    if per_frame:
        for c in clean:
            e = noise[offset : offset + c.size]
            offset += c.size
            en = np.linalg.norm(e)
            scale = noise_fraction * np.linalg.norm(c) / en if en > 0 else 0.0
            frames.append(c + scale * e)
    else:
        clean_norm = math.sqrt(sum(float(np.vdot(c, c).real) for c in clean))
        en = np.linalg.norm(noise)
        scale = noise_fraction * clean_norm / en if en > 0 else 0.0
        for c in clean:
            frames.append(c + scale * noise[offset : offset + c.size])
            offset += c.size
    return KSpaceData(tuple(frames), pattern)
