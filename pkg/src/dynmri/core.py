"""Shared array conventions, domain containers and the real inner product.

All modules work on plain numpy arrays with these conventions:

* image: complex128, shape ``(N1, N2)``, row-major pixels (``n = y*N2 + x``)
* image sequence: complex128, shape ``(T, N1, N2)``
* vector field: complex128, shape ``(..., 2, N1, N2)``; component 0 holds
  the x (column) differences, component 1 the y (row) differences

Everything is double precision internally; the helpers below coerce and
validate at API boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .operators import SamplingPattern

METHODS = ("ls", "tv", "temp", "temp_tv", "icbtv")


def as_image(u) -> np.ndarray:
    """Coerce to a finite complex128 2d image array."""
    u = np.ascontiguousarray(u, dtype=np.complex128)
    if u.ndim != 2:
        raise ValueError(f"expected a 2d image, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise ValueError("image contains non-finite entries")
    return u


def as_sequence(u) -> np.ndarray:
    """Coerce to a finite complex128 frame stack of shape (T, N1, N2)."""
    u = np.ascontiguousarray(u, dtype=np.complex128)
    if u.ndim != 3:
        raise ValueError(f"expected a (T, N1, N2) stack, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise ValueError("sequence contains non-finite entries")
    return u


def inner_product(u, v) -> float:
    """Real part of the complex dot product, ``Re(sum(conj(u) * v))``.

    This is the real inner product that makes angles between complex
    arrays meaningful; it induces the usual Euclidean norm.
    """
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    return float(np.vdot(u, v).real)


def norm(u) -> float:
    """Euclidean norm induced by :func:`inner_product`."""
    return float(np.linalg.norm(np.asarray(u).ravel()))


def _per_frame(value, num_frames: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float).ravel()
    if arr.size == 1:
        return np.full(num_frames, arr[0])
    if arr.size == num_frames:
        return arr.copy()
    raise ValueError(
        f"{name} must be a scalar or have one entry per frame "
        f"({num_frames}), got {arr.size}"
    )


@dataclass(frozen=True)
class MethodSpec:
    """Reconstruction method tag with its weights and solver knobs.

    ``alpha`` weights the data fidelity per frame, ``gamma`` the temporal
    coupling per link between consecutive frames (the couplings beyond the
    first/last frame are implicitly zero), and ``w`` balances plain TV
    against the structural-prior term (used by ``icbtv`` only; ``tv`` and
    ``temp_tv`` always use TV weight one).  ``tau``/``sigma`` of ``None``
    request automatic step sizes from an operator-norm estimate.
    """

    method: str
    alpha: float | Sequence[float] = 1.0
    gamma: float | Sequence[float] = 0.0
    w: float | Sequence[float] = 0.1
    tau: float | None = None
    sigma: float | None = None
    energy_tol: float = 1e-6
    residual_tol: float = 1e-4
    check_every: int = 10
    max_iter: int = 5000
    chunk_size: int = 10

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}, expected one of {METHODS}")
        for name in ("alpha", "gamma", "w"):
            value = getattr(self, name)
            if isinstance(value, (list, np.ndarray)):
                object.__setattr__(self, name, tuple(float(x) for x in np.ravel(value)))
        if np.any(np.asarray(self.alpha, dtype=float) <= 0):
            raise ValueError("alpha weights must be positive")
        if np.any(np.asarray(self.gamma, dtype=float) < 0):
            raise ValueError("gamma weights must be nonnegative")
        wv = np.asarray(self.w, dtype=float)
        if np.any(wv < 0) or np.any(wv > 1):
            raise ValueError("w weights must lie in [0, 1]")
        for name in ("tau", "sigma"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValueError(f"{name} must be positive or None")
        if not (self.energy_tol > 0 and self.residual_tol > 0):
            raise ValueError("stopping tolerances must be positive")
        if self.check_every < 1 or self.max_iter < 1:
            raise ValueError("check_every and max_iter must be >= 1")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")

    @property
    def uses_prior(self) -> bool:
        return self.method == "icbtv"

    @property
    def has_spatial(self) -> bool:
        return self.method in ("tv", "temp_tv", "icbtv")

    @property
    def has_temporal(self) -> bool:
        return self.method in ("temp", "temp_tv", "icbtv")

    def frame_alphas(self, num_frames: int) -> np.ndarray:
        return _per_frame(self.alpha, num_frames, "alpha")

    def frame_ws(self, num_frames: int) -> np.ndarray:
        if self.method == "icbtv":
            return _per_frame(self.w, num_frames, "w")
        return np.ones(num_frames)

    def link_gammas(self, num_frames: int) -> np.ndarray:
        """Per-link temporal weights; link t couples frames t and t+1."""
        links = max(num_frames - 1, 0)
        if not self.has_temporal:
            return np.zeros(links)
        arr = np.asarray(self.gamma, dtype=float).ravel()
        if arr.size == 1:
            return np.full(links, arr[0])
        if arr.size == links:
            return arr.copy()
        raise ValueError(
            f"gamma must be a scalar or have one entry per link ({links}), got {arr.size}"
        )


@dataclass(frozen=True)
class KSpaceData:
    """Per-frame k-space sample vectors tied to the pattern that produced them."""

    frames: tuple[np.ndarray, ...]
    pattern: "SamplingPattern"

    def __post_init__(self):
        frames = tuple(
            np.ascontiguousarray(f, dtype=np.complex128).ravel() for f in self.frames
        )
        object.__setattr__(self, "frames", frames)
        counts = self.pattern.sample_counts
        if len(frames) != self.pattern.num_frames:
            raise ValueError(
                f"{len(frames)} data frames for a pattern with "
                f"{self.pattern.num_frames} frames"
            )
        for t, f in enumerate(frames):
            if f.size != counts[t]:
                raise ValueError(
                    f"frame {t}: {f.size} samples but the pattern selects {counts[t]}"
                )
            if not np.all(np.isfinite(f)):
                raise ValueError(f"frame {t} contains non-finite samples")

    @property
    def num_frames(self) -> int:
        return len(self.frames)

    def concatenated(self) -> np.ndarray:
        if not self.frames:
            return np.zeros(0, dtype=np.complex128)
        return np.concatenate(self.frames)

    def subset(self, frame_ids) -> "KSpaceData":
        ids = list(frame_ids)
        return KSpaceData(
            tuple(self.frames[i] for i in ids), self.pattern.subset(ids)
        )
