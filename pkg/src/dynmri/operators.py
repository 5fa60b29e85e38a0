"""Cartesian k-space operators: DFT, sampling, finite differences, norms.

The forward DFT carries the 1/(N1*N2) normalization with the DC
coefficient at linear index 0; the inverse is its exact (unnormalized)
inverse.  The gradient uses forward differences with replicate boundary,
so the gradient of a constant image is exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as _fft


@dataclass(frozen=True)
class SamplingPattern:
    """Per-frame ordered k-space index sets (flattened row-major) plus the
    spoke angles (degrees) that generated them."""

    shape: tuple[int, int]
    frame_indices: tuple[np.ndarray, ...]
    frame_angles: tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        shape = (int(self.shape[0]), int(self.shape[1]))
        if shape[0] < 1 or shape[1] < 1:
            raise ValueError(f"invalid grid shape {shape}")
        object.__setattr__(self, "shape", shape)
        n = shape[0] * shape[1]
        indices = tuple(
            np.ascontiguousarray(idx, dtype=np.int64).ravel() for idx in self.frame_indices
        )
        for t, idx in enumerate(indices):
            if idx.size and (idx.min() < 0 or idx.max() >= n):
                raise ValueError(f"frame {t}: index out of range [0, {n})")
            if np.unique(idx).size != idx.size:
                raise ValueError(f"frame {t}: duplicate k-space indices")
        object.__setattr__(self, "frame_indices", indices)
        angles = self.frame_angles
        if not angles:
            angles = tuple(np.zeros(0) for _ in indices)
        else:
            angles = tuple(np.ascontiguousarray(a, dtype=float).ravel() for a in angles)
            if len(angles) != len(indices):
                raise ValueError("frame_angles must match frame_indices in length")
        object.__setattr__(self, "frame_angles", angles)

    @property
    def num_frames(self) -> int:
        return len(self.frame_indices)

    @property
    def sample_counts(self) -> tuple[int, ...]:
        return tuple(idx.size for idx in self.frame_indices)

    @classmethod
    def full(cls, shape, num_frames: int = 1) -> "SamplingPattern":
        """Identity pattern measuring every coefficient of every frame."""
        n = int(shape[0]) * int(shape[1])
        idx = np.arange(n, dtype=np.int64)
        return cls(tuple(shape), tuple(idx.copy() for _ in range(num_frames)))

    def subset(self, frame_ids) -> "SamplingPattern":
        ids = list(frame_ids)
        return SamplingPattern(
            self.shape,
            tuple(self.frame_indices[i] for i in ids),
            tuple(self.frame_angles[i] for i in ids),
        )


def dft_forward(u) -> np.ndarray:
    """2d DFT with forward normalization 1/(N1*N2); DC at index (0, 0).

    Operates on the last two axes, so frame stacks transform batched.
    """
    u = np.asarray(u, dtype=np.complex128)
    n1, n2 = u.shape[-2:]
    return _fft.fft2(u, axes=(-2, -1)) / (n1 * n2)


def dft_inverse(fk) -> np.ndarray:
    """Exact inverse of :func:`dft_forward` (no normalization of its own)."""
    fk = np.asarray(fk, dtype=np.complex128)
    n1, n2 = fk.shape[-2:]
    return _fft.ifft2(fk, axes=(-2, -1)) * (n1 * n2)


def sample(fk, pattern: SamplingPattern, t: int) -> np.ndarray:
    """Pick the frame-t coefficients out of a full k-space grid."""
    fk = np.asarray(fk, dtype=np.complex128)
    if fk.shape != pattern.shape:
        raise ValueError(f"grid shape {fk.shape} does not match pattern {pattern.shape}")
    return fk.reshape(-1)[pattern.frame_indices[t]]


def sample_adjoint(z, pattern: SamplingPattern, t: int) -> np.ndarray:
    """Scatter samples back onto the grid, zeros at unmeasured frequencies."""
    z = np.asarray(z, dtype=np.complex128).ravel()
    idx = pattern.frame_indices[t]
    if z.size != idx.size:
        raise ValueError(f"expected {idx.size} samples for frame {t}, got {z.size}")
    out = np.zeros(pattern.shape[0] * pattern.shape[1], dtype=np.complex128)
    out[idx] = z
    return out.reshape(pattern.shape)


def forward_op(u, pattern: SamplingPattern, t: int) -> np.ndarray:
    """Sampled Fourier measurement of a single frame."""
    return sample(dft_forward(u), pattern, t)


def adjoint_op(z, pattern: SamplingPattern, t: int) -> np.ndarray:
    """Exact adjoint of :func:`forward_op` under the standard real inner
    product; equals ``dft_inverse(sample_adjoint(z)) / (N1*N2)``."""
    grid = sample_adjoint(z, pattern, t)
    return _fft.ifft2(grid)


def gradient(u) -> np.ndarray:
    """Forward differences with replicate boundary; output (..., 2, N1, N2)."""
    u = np.asarray(u, dtype=np.complex128)
    out = np.zeros(u.shape[:-2] + (2,) + u.shape[-2:], dtype=np.complex128)
    out[..., 0, :, :-1] = u[..., :, 1:] - u[..., :, :-1]
    out[..., 1, :-1, :] = u[..., 1:, :] - u[..., :-1, :]
    return out


def divergence(w) -> np.ndarray:
    """Negative adjoint of :func:`gradient`:
    ``inner_product(gradient(u), w) == -inner_product(u, divergence(w))``."""
    w = np.asarray(w, dtype=np.complex128)
    if w.ndim < 3 or w.shape[-3] != 2:
        raise ValueError(f"expected a (..., 2, N1, N2) field, got shape {w.shape}")
    n1, n2 = w.shape[-2:]
    wx = w[..., 0, :, :]
    wy = w[..., 1, :, :]
    out = np.zeros(w.shape[:-3] + (n1, n2), dtype=np.complex128)
    if n2 >= 2:
        out[..., :, 0] += wx[..., :, 0]
        out[..., :, 1 : n2 - 1] += wx[..., :, 1 : n2 - 1] - wx[..., :, : n2 - 2]
        out[..., :, n2 - 1] -= wx[..., :, n2 - 2]
    if n1 >= 2:
        out[..., 0, :] += wy[..., 0, :]
        out[..., 1 : n1 - 1, :] += wy[..., 1 : n1 - 1, :] - wy[..., : n1 - 2, :]
        out[..., n1 - 1, :] -= wy[..., n1 - 2, :]
    return out


def _laplacian(u) -> np.ndarray:
    return -divergence(gradient(u))


def operator_norm_estimate(
    pattern: SamplingPattern | None = None,
    frames=None,
    gamma=None,
    w=1.0,
    gamma_warm: float = 0.0,
    kspace_weight: float = 1.0,
    shape=None,
    tol: float = 1e-3,
    max_iter: int = 100,
    seed: int = 0,
) -> float:
    """Power-iteration estimate of the spectral norm of the stacked linear
    operator a primal-dual run dualizes.

    Blocks included: the sampled Fourier operator of every frame (with the
    k-space inner product scaled by ``kspace_weight``), the TV gradient
    where the per-frame TV radius ``w`` is positive, the prior-coupled
    gradients where ``w < 1``, and the sqrt(gamma)-weighted temporal
    differences.  ``w=None`` drops all spatial blocks; ``pattern=None``
    (with an explicit ``shape``) drops the data block.
    """
    if pattern is None and shape is None:
        raise ValueError("either a pattern or an explicit shape is required")
    shp = pattern.shape if pattern is not None else (int(shape[0]), int(shape[1]))
    if pattern is not None:
        frame_ids = list(range(pattern.num_frames)) if frames is None else list(frames)
        num = len(frame_ids)
        if num == 0:
            raise ValueError("empty frame chunk")
        masks = np.zeros((num,) + shp, dtype=bool)
        for k, t in enumerate(frame_ids):
            flat = masks[k].reshape(-1)
            flat[pattern.frame_indices[t]] = True
    else:
        num = 1
        masks = None

    if gamma is None:
        gam = np.zeros(max(num - 1, 0))
    else:
        gam = np.asarray(gamma, dtype=float).ravel()
        if gam.size == 1:
            gam = np.full(max(num - 1, 0), gam[0])
        elif gam.size != max(num - 1, 0):
            raise ValueError(f"gamma must have {max(num - 1, 0)} entries, got {gam.size}")
        num = max(num, gam.size + 1)

    if w is None:
        tv_on = np.zeros(num, dtype=bool)
        prior_on = np.zeros(num, dtype=bool)
    else:
        ws = np.asarray(w, dtype=float).ravel()
        if ws.size == 1:
            ws = np.full(num, ws[0])
        elif ws.size != num:
            raise ValueError(f"w must have {num} entries, got {ws.size}")
        tv_on = ws > 0
        prior_on = ws < 1
    with_z = bool(prior_on.any())

    def apply(u, z):
        au = np.zeros_like(u)
        az = np.zeros_like(z) if with_z else None
        if masks is not None:
            fk = _fft.fft2(u, axes=(-2, -1)) / (shp[0] * shp[1])
            fk *= masks
            au += kspace_weight * _fft.ifft2(fk, axes=(-2, -1))
        if tv_on.any():
            au += tv_on[:, None, None] * _laplacian(u)
        if with_z:
            l3 = prior_on[:, None, None] * _laplacian(u - z)
            au += l3
            az -= l3
            az += prior_on[:, None, None] * _laplacian(z)
        if gam.size and gam.any():
            d = gam[:, None, None] * (u[1:] - u[:-1])
            au[:-1] -= d
            au[1:] += d
        if gamma_warm:
            au[0] += gamma_warm * u[0]
        return au, az

    rng = np.random.default_rng(seed)
    u = rng.standard_normal((num,) + shp) + 1j * rng.standard_normal((num,) + shp)
    z = (
        rng.standard_normal((num,) + shp) + 1j * rng.standard_normal((num,) + shp)
        if with_z
        else np.zeros((num,) + shp, dtype=np.complex128)
    )
    nrm = math.sqrt(np.vdot(u, u).real + np.vdot(z, z).real)
    u /= nrm
    z /= nrm

    lam_prev = None
    for _ in range(max_iter):
        au, az = apply(u, z)
        lam = np.vdot(u, au).real
        if with_z:
            lam += np.vdot(z, az).real
        anrm = math.sqrt(
            np.vdot(au, au).real + (np.vdot(az, az).real if with_z else 0.0)
        )
        if anrm == 0.0:
            return 0.0
        u = au / anrm
        z = az / anrm if with_z else z
        if lam_prev is not None and abs(lam - lam_prev) <= tol * max(abs(lam), 1e-30):
            lam_prev = lam
            break
        lam_prev = lam
    return math.sqrt(max(lam_prev, 0.0))
