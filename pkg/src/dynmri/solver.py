"""Primal-dual reconstruction of single frames and dynamic sequences.

Model and metric
----------------
For frames ``u_t`` with sampled k-space data ``f_t`` the solvers minimize

    sum_t alpha_t/2 * ||K_t u_t - f_t||_M^2      (data fidelity)
  + sum_t w_t * TV(u_t)                          (spatial TV)
  + sum_t (1 - w_t) * [edge-coupled split TV]    (structural prior)
  + sum_t gamma_t/2 * ||u_{t+1} - u_t||^2        (temporal smoothing)

where ``||z||_M^2 = N1*N2 * sum|z_i|^2`` is the k-space metric in which
the 1/(N1*N2)-normalized DFT is an isometry.  Under this metric the
adjoint of ``K_t`` is the zero-filled reconstruction
``dft_inverse(sample_adjoint(.))``, and the data weights ``alpha_t`` are
independent of the grid resolution.

The iteration alternates proximal ascent on the dual variables (one per
operator term), proximal descent on the primals with the temporal
quadratic folded into the prox (neighbor frames taken from the previous
iterate), and overrelaxation ``bar = 2*new - old``.  Methods are
configurations of the same loop: ``tv`` and ``temp_tv`` run it with TV
radius one and no prior blocks, ``temp`` with no spatial duals at all,
``ls`` is a conjugate-gradient least-squares baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .core import KSpaceData, MethodSpec, as_sequence, inner_product
from .operators import (
    SamplingPattern,
    dft_forward,
    dft_inverse,
    divergence,
    gradient,
    operator_norm_estimate,
)
from .regularization import SubgradientField, field_magnitude


class SolverDivergenceError(RuntimeError):
    """Raised when the iteration produces a non-finite energy."""


@dataclass
class StoppingRule:
    """Stop once the relative energy change and the primal-dual residual
    both drop below their tolerances (checked every ``check_every``
    iterations, hard cap ``max_iter``)."""

    energy_tol: float = 1e-6
    residual_tol: float = 1e-4
    check_every: int = 10
    max_iter: int = 5000

    def __post_init__(self):
        if not (self.energy_tol > 0 and self.residual_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.check_every < 1 or self.max_iter < 1:
            raise ValueError("check_every and max_iter must be >= 1")

    @classmethod
    def from_spec(cls, spec: MethodSpec) -> "StoppingRule":
        return cls(spec.energy_tol, spec.residual_tol, spec.check_every, spec.max_iter)


@dataclass
class SolverState:
    """Live view of the iteration (arrays are reused between iterations;
    copy them if you keep references)."""

    u: np.ndarray
    u_bar: np.ndarray
    y1: np.ndarray
    y2: np.ndarray | None = None
    y3: np.ndarray | None = None
    y4: np.ndarray | None = None
    z: np.ndarray | None = None
    z_bar: np.ndarray | None = None
    iteration: int = 0
    energy: float = math.nan
    residual: float = math.nan


@dataclass
class SolveResult:
    """Reconstruction plus convergence bookkeeping.  ``x`` is the image for
    single-frame problems and the (T, N1, N2) stack otherwise; ``history``
    rows are (chunk, iteration, energy, residual)."""

    x: np.ndarray
    converged: bool
    iterations: int
    energy: float
    residual: float
    history: list = field(default_factory=list)
    steps: list = field(default_factory=list)  # resolved (tau, sigma) per chunk


@dataclass(frozen=True)
class Chunk:
    start: int
    stop: int
    warm_index: int | None


def chunk_schedule(num_frames: int, chunk_size: int) -> tuple[Chunk, ...]:
    """Contiguous partition of the frame range; every chunk after the first
    records the previous chunk's last frame for warm continuity coupling."""
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    if num_frames < 1:
        raise ValueError("num_frames must be >= 1")
    chunks = []
    for start in range(0, num_frames, chunk_size):
        stop = min(start + chunk_size, num_frames)
        warm = start - 1 if start > 0 else None
        chunks.append(Chunk(start, stop, warm))
    return tuple(chunks)


# ---------------------------------------------------------------------------
# fused update kernels
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _div_at(y, t, i, j, n1, n2):
    # backward-difference divergence matching the forward-difference gradient
    if j == 0:
        dx = y[t, 0, i, 0]
    elif j == n2 - 1:
        dx = -y[t, 0, i, n2 - 2]
    else:
        dx = y[t, 0, i, j] - y[t, 0, i, j - 1]
    if i == 0:
        dy = y[t, 1, 0, j]
    elif i == n1 - 1:
        dy = -y[t, 1, n1 - 2, j]
    else:
        dy = y[t, 1, i, j] - y[t, 1, i - 1, j]
    return dx + dy


@njit(cache=True)
def _dual_field_update(y, src, sigma, radii):
    # y <- project_{|.| <= radii[t]}(y + sigma * grad(src)), in place
    nt, _, n1, n2 = y.shape
    for t in range(nt):
        r = radii[t]
        for i in range(n1):
            for j in range(n2):
                if j < n2 - 1:
                    gx = src[t, i, j + 1] - src[t, i, j]
                else:
                    gx = 0.0 + 0.0j
                if i < n1 - 1:
                    gy = src[t, i + 1, j] - src[t, i, j]
                else:
                    gy = 0.0 + 0.0j
                c0 = y[t, 0, i, j] + sigma * gx
                c1 = y[t, 1, i, j] + sigma * gy
                if r <= 0.0:
                    y[t, 0, i, j] = 0.0
                    y[t, 1, i, j] = 0.0
                else:
                    m = math.sqrt(
                        c0.real * c0.real
                        + c0.imag * c0.imag
                        + c1.real * c1.real
                        + c1.imag * c1.imag
                    )
                    if m > r:
                        s = r / m
                        c0 = c0 * s
                        c1 = c1 * s
                    y[t, 0, i, j] = c0
                    y[t, 1, i, j] = c1


@njit(cache=True)
def _primal_u_update(u, u_new, u_bar, kstar, y2, y3, p0, wc, g_prev, g_next, warm, tau, denom):
    # u_new <- prox of the time-coupled quadratic at
    #          u - tau*(K*y1 - div y2 - div y3 - (1-w) p0),
    # neighbors frozen at the previous iterate; u_bar <- 2 u_new - u
    nt, n1, n2 = u.shape
    for t in range(nt):
        for i in range(n1):
            for j in range(n2):
                rhs = kstar[t, i, j] - _div_at(y2, t, i, j, n1, n2)
                rhs = rhs - _div_at(y3, t, i, j, n1, n2) - wc[t] * p0[i, j]
                num = u[t, i, j] - tau * rhs
                if t + 1 < nt:
                    num = num + tau * g_next[t] * u[t + 1, i, j]
                if t > 0:
                    num = num + tau * g_prev[t] * u[t - 1, i, j]
                else:
                    num = num + tau * g_prev[0] * warm[i, j]
                un = num / denom[t]
                u_new[t, i, j] = un
                u_bar[t, i, j] = 2.0 * un - u[t, i, j]


@njit(cache=True)
def _primal_z_update(z, z_new, z_bar, y3, y4, p0, wc, tau):
    # z_new <- z - tau*(2 (1-w) p0 + div y3 - div y4); z_bar <- 2 z_new - z
    nt, n1, n2 = z.shape
    for t in range(nt):
        for i in range(n1):
            for j in range(n2):
                d3 = _div_at(y3, t, i, j, n1, n2)
                d4 = _div_at(y4, t, i, j, n1, n2)
                zn = z[t, i, j] - tau * (2.0 * wc[t] * p0[i, j] + d3 - d4)
                z_new[t, i, j] = zn
                z_bar[t, i, j] = 2.0 * zn - z[t, i, j]


# ---------------------------------------------------------------------------
# chunk problem wiring
# ---------------------------------------------------------------------------


class _ChunkProblem:
    """Precomputed index maps and per-frame weights for one chunk."""

    def __init__(self, data, alphas, gammas, ws, sub, warm_image, warm_gamma, spec):
        pattern = data.pattern
        self.shape = pattern.shape
        n1, n2 = self.shape
        self.n = n1 * n2
        self.num_frames = data.num_frames
        counts = np.asarray(pattern.sample_counts, dtype=np.int64)
        offsets = np.concatenate(([0], np.cumsum(counts)))
        gidx = np.concatenate(
            [
                pattern.frame_indices[t] + t * self.n
                for t in range(self.num_frames)
            ]
        ) if self.num_frames else np.zeros(0, dtype=np.int64)
        self.counts = counts
        self.offsets = offsets
        self.gidx = gidx
        self.f = data.concatenated()
        self.alphas = alphas
        self.alpha_samples = np.repeat(alphas, counts)
        self.spatial = spec.has_spatial
        self.prior = spec.uses_prior
        self.ws = ws
        if self.spatial:
            self.r2 = ws.copy()
            self.r34 = 1.0 - ws
            self.wc = (1.0 - ws) if self.prior else np.zeros(self.num_frames)
        self.p0 = (
            np.ascontiguousarray(sub.p0)
            if self.prior
            else np.zeros(self.shape, dtype=np.complex128)
        )
        self.g_prev = np.zeros(self.num_frames)
        self.g_next = np.zeros(self.num_frames)
        if self.num_frames > 1:
            self.g_prev[1:] = gammas
            self.g_next[:-1] = gammas
        self.g_prev[0] = warm_gamma
        self.warm = (
            np.ascontiguousarray(warm_image, dtype=np.complex128)
            if warm_image is not None
            else np.zeros(self.shape, dtype=np.complex128)
        )
        self.warm_gamma = warm_gamma

    def forward_all(self, u_stack: np.ndarray) -> np.ndarray:
        return dft_forward(u_stack).reshape(-1)[self.gidx]

    def zero_fill(self, y: np.ndarray) -> np.ndarray:
        grid = np.zeros(self.num_frames * self.n, dtype=np.complex128)
        grid[self.gidx] = y
        return dft_inverse(grid.reshape((self.num_frames,) + self.shape))


def _split_frames(vec: np.ndarray, prob: _ChunkProblem):
    return [vec[prob.offsets[t] : prob.offsets[t + 1]] for t in range(prob.num_frames)]


def _stack_energy(prob: _ChunkProblem, u, z) -> float:
    """Primal objective of the chunk (z, when present, as the feasible split)."""
    res = prob.forward_all(u) - prob.f
    e = 0.5 * prob.n * float(
        np.sum(prob.alpha_samples * (res.real**2 + res.imag**2))
    )
    if prob.spatial:
        tv_u = field_magnitude(gradient(u)).sum(axis=(-2, -1))
        if prob.prior:
            zz = z if z is not None else np.zeros_like(u)
            tv_split = field_magnitude(gradient(u - zz)).sum(axis=(-2, -1))
            tv_z = field_magnitude(gradient(zz)).sum(axis=(-2, -1))
            ip_u = np.real(np.sum(np.conj(prob.p0) * u, axis=(-2, -1)))
            ip_z = np.real(np.sum(np.conj(prob.p0) * zz, axis=(-2, -1)))
            e += float(np.sum(prob.ws * tv_u))
            e += float(np.sum(prob.wc * (tv_split + tv_z - ip_u + 2.0 * ip_z)))
        else:
            e += float(np.sum(tv_u))
    if prob.num_frames > 1:
        g = prob.g_next[:-1]
        if g.any():
            d = u[1:] - u[:-1]
            e += 0.5 * float(np.sum(g * np.sum(d.real**2 + d.imag**2, axis=(-2, -1))))
    if prob.warm_gamma:
        d0 = u[0] - prob.warm
        e += 0.5 * prob.warm_gamma * float(np.sum(d0.real**2 + d0.imag**2))
    return e


def _chunk_residual(prob, prev, curr, tau, sigma) -> float:
    """Goldstein-style combined primal/dual fixed-point residual,
    RMS-normalized per variable entry."""
    du = prev["u"] - curr["u"]
    dy1 = prev["y1"] - curr["y1"]
    adj = prob.zero_fill(dy1)
    p_u = du / tau - adj
    n_primal = du.size
    n_dual = dy1.size
    d1 = dy1 / sigma - prob.forward_all(du)
    sq_primal = 0.0
    sq_dual = float(np.vdot(d1, d1).real)
    if prob.spatial:
        dy2 = prev["y2"] - curr["y2"]
        p_u += divergence(dy2)
        d2 = dy2 / sigma - gradient(du)
        sq_dual += float(np.vdot(d2, d2).real)
        n_dual += dy2.size
        if prob.prior:
            dz = prev["z"] - curr["z"]
            dy3 = prev["y3"] - curr["y3"]
            dy4 = prev["y4"] - curr["y4"]
            p_u += divergence(dy3)
            p_z = dz / tau - divergence(dy3) + divergence(dy4)
            sq_primal += float(np.vdot(p_z, p_z).real)
            n_primal += dz.size
            d3 = dy3 / sigma - gradient(du - dz)
            d4 = dy4 / sigma - gradient(dz)
            sq_dual += float(np.vdot(d3, d3).real) + float(np.vdot(d4, d4).real)
            n_dual += dy3.size + dy4.size
    sq_primal += float(np.vdot(p_u, p_u).real)
    return math.sqrt(sq_primal / n_primal) + math.sqrt(sq_dual / max(n_dual, 1))


def pd_residual(prev: SolverState, curr: SolverState, tau, sigma, pattern, frames=None) -> float:
    """Combined primal+dual fixed-point residual between two consecutive
    iterates of the primal-dual loop, normalized per variable entry."""
    ids = list(range(pattern.num_frames)) if frames is None else list(frames)
    num = len(ids)
    spatial = prev.y2 is not None
    prior = prev.z is not None
    spec = MethodSpec("icbtv" if prior else ("temp_tv" if spatial else "temp"))
    dummy = KSpaceData(
        tuple(np.zeros(pattern.frame_indices[t].size, dtype=np.complex128) for t in ids),
        pattern.subset(ids),
    )
    prob = _ChunkProblem(
        dummy,
        np.ones(num),
        np.zeros(max(num - 1, 0)),
        np.full(num, 0.5) if prior else np.ones(num),
        SubgradientField(np.zeros((2,) + pattern.shape), np.zeros(pattern.shape), 0.0)
        if prior
        else None,
        None,
        0.0,
        spec,
    )
    prev_d = {"u": prev.u, "y1": prev.y1, "y2": prev.y2, "y3": prev.y3, "y4": prev.y4, "z": prev.z}
    curr_d = {"u": curr.u, "y1": curr.y1, "y2": curr.y2, "y3": curr.y3, "y4": curr.y4, "z": curr.z}
    return _chunk_residual(prob, prev_d, curr_d, tau, sigma)


def _solve_chunk(prob, stopping, tau, sigma, callback, chunk_id, history):
    num, shape = prob.num_frames, prob.shape
    u = prob.zero_fill(prob.f)
    u_bar = u.copy()
    u_new = np.empty_like(u)
    y1 = np.zeros_like(prob.f)
    fac = prob.alpha_samples / (prob.alpha_samples + sigma)
    denom = tau * (prob.g_prev + prob.g_next) + 1.0
    spatial, prior = prob.spatial, prob.prior
    y2 = np.zeros((num, 2) + shape, dtype=np.complex128) if spatial else None
    y3 = np.zeros_like(y2) if spatial else None
    y4 = np.zeros_like(y2) if prior else None
    z = np.zeros_like(u) if prior else None
    z_bar = np.zeros_like(u) if prior else None
    z_new = np.empty_like(u) if prior else None
    src3 = np.empty_like(u) if prior else None

    state = SolverState(u=u, u_bar=u_bar, y1=y1, y2=y2, y3=y3, y4=y4, z=z, z_bar=z_bar)
    converged = False
    energy = math.nan
    residual = math.nan
    energy_prev = None
    k = 0
    for k in range(1, stopping.max_iter + 1):
        check = (k % stopping.check_every == 0) or (k == stopping.max_iter)
        if check:
            prev = {
                "u": u.copy(),
                "y1": y1.copy(),
                "y2": y2.copy() if spatial else None,
                "y3": y3.copy() if prior else None,
                "y4": y4.copy() if prior else None,
                "z": z.copy() if prior else None,
            }
        # dual ascent
        y1 += sigma * (prob.forward_all(u_bar) - prob.f)
        y1 *= fac
        if spatial:
            _dual_field_update(y2, u_bar, sigma, prob.r2)
            if prior:
                np.subtract(u_bar, z_bar, out=src3)
                _dual_field_update(y3, src3, sigma, prob.r34)
                _dual_field_update(y4, z_bar, sigma, prob.r34)
        # primal descent with overrelaxation
        kstar = prob.zero_fill(y1)
        if spatial:
            _primal_u_update(
                u, u_new, u_bar, kstar, y2, y3, prob.p0,
                prob.wc, prob.g_prev, prob.g_next, prob.warm, tau, denom,
            )
            if prior:
                _primal_z_update(z, z_new, z_bar, y3, y4, prob.p0, prob.wc, tau)
                z, z_new = z_new, z
        else:
            num_arr = u - tau * kstar
            if num > 1:
                num_arr[:-1] += tau * prob.g_next[:-1, None, None] * u[1:]
                num_arr[1:] += tau * prob.g_prev[1:, None, None] * u[:-1]
            num_arr[0] += tau * prob.g_prev[0] * prob.warm
            np.divide(num_arr, denom[:, None, None], out=u_new)
            np.multiply(u_new, 2.0, out=u_bar)
            u_bar -= u
        u, u_new = u_new, u

        state.u, state.u_bar, state.z, state.z_bar = u, u_bar, z, z_bar
        state.iteration = k
        if check:
            curr = {"u": u, "y1": y1, "y2": y2, "y3": y3, "y4": y4, "z": z}
            energy = _stack_energy(prob, u, z)
            residual = _chunk_residual(prob, prev, curr, tau, sigma)
            state.energy, state.residual = energy, residual
            history.append((chunk_id, k, energy, residual))
            if not math.isfinite(energy):
                raise SolverDivergenceError(
                    f"energy became non-finite at iteration {k} "
                    f"(tau={tau:.3e}, sigma={sigma:.3e}); reduce the step sizes"
                )
            if (
                energy_prev is not None
                and abs(energy - energy_prev)
                <= stopping.energy_tol * max(abs(energy), abs(energy_prev), 1e-30)
                and residual <= stopping.residual_tol
            ):
                converged = True
                if callback is not None:
                    callback(state)
                break
            energy_prev = energy
        if callback is not None:
            callback(state)
    return u, converged, k, energy, residual


def _resolve_steps(spec, data, gammas, ws_for_norm, warm_gamma):
    if spec.tau is not None and spec.sigma is not None:
        return spec.tau, spec.sigma
    n = data.pattern.shape[0] * data.pattern.shape[1]
    lhat = operator_norm_estimate(
        pattern=data.pattern,
        gamma=gammas,
        w=ws_for_norm,
        gamma_warm=warm_gamma,
        kspace_weight=n,
    )
    step = 0.99 / lhat if lhat > 0 else 1.0
    tau = spec.tau if spec.tau is not None else step
    sigma = spec.sigma if spec.sigma is not None else step
    if spec.tau is not None or spec.sigma is not None:
        # keep tau*sigma*L^2 < 1 when only one side was pinned
        fixed = spec.tau if spec.tau is not None else spec.sigma
        other = 0.98 / (fixed * lhat * lhat) if lhat > 0 else fixed
        tau = spec.tau if spec.tau is not None else other
        sigma = spec.sigma if spec.sigma is not None else other
    return tau, sigma


def ls_reconstruct(f_t, pattern: SamplingPattern, t: int, iterations: int = 50) -> np.ndarray:
    """Minimum-norm least-squares frame reconstruction via conjugate
    gradients on the normal equations, started from zero."""
    f_t = np.asarray(f_t, dtype=np.complex128).ravel()
    idx = pattern.frame_indices[t]
    if f_t.size != idx.size:
        raise ValueError(f"expected {idx.size} samples, got {f_t.size}")
    n1, n2 = pattern.shape

    def scatter(vec):
        grid = np.zeros(n1 * n2, dtype=np.complex128)
        grid[idx] = vec
        return dft_inverse(grid.reshape(n1, n2))

    def normal_op(img):
        return scatter(dft_forward(img).reshape(-1)[idx])

    b = scatter(f_t)
    bnorm = math.sqrt(np.vdot(b, b).real)
    x = np.zeros((n1, n2), dtype=np.complex128)
    if bnorm == 0.0:
        return x
    r = b.copy()
    p = r.copy()
    rs = np.vdot(r, r).real
    for _ in range(iterations):
        ap = normal_op(p)
        pap = np.vdot(p, ap).real
        if pap <= 0.0:
            break
        alpha = rs / pap
        x += alpha * p
        r -= alpha * ap
        rs_new = np.vdot(r, r).real
        if math.sqrt(rs_new) <= 1e-14 * bnorm:
            break
        p = r + (rs_new / rs) * p
        rs = rs_new
    return x


def energy_value(u, data: KSpaceData, spec: MethodSpec, sub=None, z=None,
                 warm_image=None, warm_gamma: float = 0.0) -> float:
    """Primal objective of the dynamic model at the given frame stack.

    For the prior-coupled method the auxiliary split ``z`` (zero when not
    given) makes this an upper bound on the true decomposition energy.
    """
    u = as_sequence(u)
    num = u.shape[0]
    if num != data.num_frames:
        raise ValueError(f"{num} frames vs {data.num_frames} data frames")
    prob = _ChunkProblem(
        data,
        spec.frame_alphas(num),
        spec.link_gammas(num),
        spec.frame_ws(num),
        sub,
        warm_image,
        warm_gamma,
        spec,
    )
    return _stack_energy(prob, u, as_sequence(z) if z is not None else None)


def reconstruct_dynamic(
    data: KSpaceData,
    spec: MethodSpec,
    sub: SubgradientField | None = None,
    warm_frame=None,
    warm_gamma: float | None = None,
    callback=None,
) -> SolveResult:
    """Reconstruct a frame sequence with the configured method.

    Parameters
    ----------
    data : KSpaceData
        Per-frame samples and their pattern.
    spec : MethodSpec
        Method tag, weights and solver knobs. When the sequence is longer
        than ``spec.chunk_size`` it is solved in consecutive chunks with
        warm continuity coupling.
    sub : SubgradientField, required for (and only for) method ``icbtv``.
    warm_frame : optional fixed image the first frame is coupled to with
        weight ``warm_gamma`` (defaults to the first gamma value).
    callback : optional callable receiving the live SolverState once per
        iteration.
    """
    if spec.uses_prior and sub is None:
        raise ValueError("method 'icbtv' requires a subgradient field")
    if sub is not None and not spec.uses_prior:
        raise ValueError(f"method {spec.method!r} does not take a subgradient field")
    if sub is not None and sub.shape != data.pattern.shape:
        raise ValueError(
            f"subgradient grid {sub.shape} does not match pattern {data.pattern.shape}"
        )
    num_frames = data.num_frames
    if num_frames == 0:
        raise ValueError("no frames to reconstruct")

    if spec.method == "ls":
        stack = np.stack(
            [ls_reconstruct(data.frames[t], data.pattern, t) for t in range(num_frames)]
        )
        return SolveResult(
            x=stack,
            converged=True,
            iterations=0,
            energy=energy_value(stack, data, spec),
            residual=0.0,
            history=[],
        )

    alphas = spec.frame_alphas(num_frames)
    gammas = spec.link_gammas(num_frames)
    ws = spec.frame_ws(num_frames)
    stopping = StoppingRule.from_spec(spec)
    if warm_frame is not None and warm_gamma is None:
        warm_gamma = float(gammas[0]) if gammas.size else float(
            np.asarray(spec.gamma, dtype=float).ravel()[0]
        )

    chunks = chunk_schedule(num_frames, spec.chunk_size)
    pieces = []
    history: list = []
    steps: list = []
    converged = True
    iterations = 0
    energy = 0.0
    residual = 0.0
    prev_last = warm_frame
    for ci, chunk in enumerate(chunks):
        ids = range(chunk.start, chunk.stop)
        sub_data = data.subset(ids)
        if chunk.warm_index is None:
            w_img, w_gam = warm_frame, (warm_gamma or 0.0)
        else:
            w_img, w_gam = prev_last, float(gammas[chunk.warm_index])
        chunk_gammas = gammas[chunk.start : chunk.stop - 1]
        ws_for_norm = None if not spec.has_spatial else (
            ws[chunk.start : chunk.stop] if spec.uses_prior else 1.0
        )
        tau, sigma = _resolve_steps(spec, sub_data, chunk_gammas, ws_for_norm, w_gam)
        steps.append((tau, sigma))
        prob = _ChunkProblem(
            sub_data,
            alphas[chunk.start : chunk.stop],
            chunk_gammas,
            ws[chunk.start : chunk.stop],
            sub,
            w_img,
            w_gam,
            spec,
        )
        u_chunk, ok, iters, e, r = _solve_chunk(
            prob, stopping, tau, sigma, callback, ci, history
        )
        pieces.append(u_chunk)
        converged = converged and ok
        iterations += iters
        energy += e
        residual = max(residual, r)
        prev_last = u_chunk[-1]
    return SolveResult(
        x=np.concatenate(pieces, axis=0),
        converged=converged,
        iterations=iterations,
        energy=energy,
        residual=residual,
        history=history,
        steps=steps,
    )


def reconstruct_prior(
    f0,
    pattern: SamplingPattern,
    alpha0: float,
    stopping: StoppingRule | None = None,
    tau: float | None = None,
    sigma: float | None = None,
    frame: int = 0,
    callback=None,
) -> SolveResult:
    """TV-regularized reconstruction of a single (densely sampled) frame
    with data weight ``alpha0``, initialized at the zero-filled image."""
    stopping = stopping or StoppingRule()
    spec = MethodSpec(
        "tv",
        alpha=alpha0,
        tau=tau,
        sigma=sigma,
        energy_tol=stopping.energy_tol,
        residual_tol=stopping.residual_tol,
        check_every=stopping.check_every,
        max_iter=stopping.max_iter,
    )
    data = KSpaceData((np.asarray(f0, dtype=np.complex128).ravel(),), pattern.subset([frame]))
    res = reconstruct_dynamic(data, spec, callback=callback)
    return SolveResult(
        x=res.x[0],
        converged=res.converged,
        iterations=res.iterations,
        energy=res.energy,
        residual=res.residual,
        history=res.history,
        steps=res.steps,
    )
