"""Loewner-chain sampler for local multiple SLE, vectorized over replicas.

Each time step of length dt appends a vertical slit map of half-plane capacity
2 dt centred at the current driving value D:
    phi(z) = D + sqrt((z - D)^2 + 4 dt),
with the root taken in the upper half-plane. The full map g_t is the
composition of the stack; marked boundary points and their derivatives are
pushed forward exactly, and curve points are pulled back through the stack.

Near another marked point a step of length dt cannot resolve the driving
motion, so the martingale check splits such steps into dyadic substeps along
a Brownian bridge that keeps the coarse increment (see step_refined).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .closedform import GRAD_LOG_FUNCS, MODEL_KAPPA, Z_FUNCS, SLEParams

STOP_RUNNING = 0
STOP_EXIT = 1
STOP_COLLISION = 2
STOP_BLOWUP = 3
STOP_MAXSTEPS = 4
STOP_NAMES = {0: "running", 1: "exit", 2: "collision", 3: "blowup", 4: "max_steps"}


@dataclass
class SamplerConfig:
    kappa: float
    model: str = "perco"
    dt: float = 1e-4
    seed: int = 0
    localization: float = 0.4  # half-disk radius around each marked point
    gap_floor: float = 1e-3
    max_steps: int = 100_000

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if not 0 < self.gap_floor < self.localization:
            raise ValueError("need 0 < gap_floor < localization")
        if self.model not in Z_FUNCS:
            raise ValueError(f"unknown model {self.model!r}")

    @property
    def h(self) -> float:
        return SLEParams(self.kappa).h


class NoiseSource:
    """Standard normals keyed by (seed, replica, step).

    Every replica owns a Philox stream keyed by (seed, replica); the k-th draw
    of that stream is the increment of step k, so results do not depend on how
    replicas are batched.
    """

    def __init__(self, seed: int, replicas: Sequence[int], stream: int = 0, chunk: int = 256):
        self.seed = int(seed)
        self.replicas = list(replicas)
        self.chunk = chunk
        # separate streams (one per curve) live in a high counter word
        self._gens = [
            np.random.Generator(
                np.random.Philox(key=[self.seed & (2**64 - 1), int(r)], counter=[0, 0, int(stream), 0])
            )
            for r in self.replicas
        ]
        self._buf = np.empty((len(self.replicas), 0))
        self._base = 0

    def normals(self, step: int) -> np.ndarray:
        while step >= self._base + self._buf.shape[1]:
            self._base += self._buf.shape[1]
            self._buf = np.stack([g.standard_normal(self.chunk) for g in self._gens]) if self._gens else np.empty((0, self.chunk))
        return self._buf[:, step - self._base]


def slit_forward(z, center, dt):
    """phi(z) for complex z (or real boundary points off the slit)."""
    u = np.asarray(z, dtype=complex) - center
    w = np.sqrt(u * u + 4.0 * dt)
    # pick the root in the upper half-plane; on the real line keep the side of u
    flip = (w.imag < 0) | ((w.imag == 0) & (np.sign(w.real) != np.sign(u.real)))
    return center + np.where(flip, -w, w)


def slit_forward_real(x, center, dt):
    """phi on real points away from the slit base, with its derivative."""
    u = x - center
    s = np.sqrt(u * u + 4.0 * dt)
    return center + np.sign(u) * s, np.abs(u) / s


def slit_inverse(w, center, dt):
    """phi^-1, landing in the closed upper half-plane."""
    u = np.asarray(w, dtype=complex) - center
    u = u.real + 1j * np.maximum(u.imag, 0.0)
    r = 2.0 * np.sqrt(dt)
    return center + np.sqrt(u - r) * np.sqrt(u + r)


@dataclass
class LoewnerEnsemble:
    """State of many replicas; arrays have the replica index first."""

    points: np.ndarray            # (B, n) images of marked points / tips under the current map
    derivs: np.ndarray            # (B, n) g'(x_i) for original marked points
    t: np.ndarray                 # (B,) total capacity time
    status: np.ndarray            # (B,) stop codes for the active curve
    centers: list = field(default_factory=list)  # per step: (B,) slit centres
    dts: list = field(default_factory=list)      # per step: (B,) time increments (0 when frozen)
    keep_history: bool = True                    # False drops centers/dts (no pull-back needed)

    @property
    def capacity(self) -> np.ndarray:
        return 2.0 * self.t

    def pull_back(self, w: np.ndarray, upto: int | None = None) -> np.ndarray:
        """Preimage of w under the composition of the first `upto` slit maps."""
        n = len(self.centers) if upto is None else upto
        z = np.asarray(w, dtype=complex)
        for k in range(n - 1, -1, -1):
            z = slit_inverse(z, self.centers[k], self.dts[k])
        return z


def _gaps_ok(points: np.ndarray, floor: float) -> np.ndarray:
    d = np.diff(points, axis=-1)
    return np.all(d >= floor, axis=-1)


def step_sde(
    state: LoewnerEnsemble,
    j: int,
    cfg: SamplerConfig,
    grad_log_z: Callable,
    noise: np.ndarray,
    drift: bool = True,
    dt: float | np.ndarray | None = None,
) -> None:
    """One Euler step for the curve growing from slot j (0-based), in place.

    The driving value is points[:, j]; the others are pushed through the slit map.
    Replicas whose status is not running are frozen (zero capacity step).
    dt overrides cfg.dt, possibly per replica.
    """
    active = state.status == STOP_RUNNING
    dt_vec = np.where(active, cfg.dt if dt is None else dt, 0.0)
    X = state.points[:, j].copy()
    if state.keep_history:
        state.centers.append(X.copy())
        state.dts.append(dt_vec)
    others = [i for i in range(state.points.shape[1]) if i != j]
    # exact slit map on the other marked points
    new, dphi = slit_forward_real(state.points[:, others], X[:, None], dt_vec[:, None])
    state.points[:, others] = np.where(active[:, None], new, state.points[:, others])
    state.derivs[:, others] = np.where(active[:, None], state.derivs[:, others] * dphi, state.derivs[:, others])
    # driving increment
    if drift:
        with np.errstate(all="ignore"):
            b = cfg.kappa * grad_log_z(state.points)[:, j]
    else:
        b = np.zeros_like(X)
    bad = active & ~np.isfinite(b)
    b = np.where(np.isfinite(b), b, 0.0)
    dX = np.sqrt(cfg.kappa * dt_vec) * noise + b * dt_vec
    trial = state.points.copy()
    trial[:, j] = X + dX
    collide = active & ~bad & ~_gaps_ok(trial, cfg.gap_floor)
    # a stopped replica keeps the driving value held during this step, so its
    # final state is an ordered configuration of the discretized chain
    state.points[:, j] = np.where(active & ~bad & ~collide, X + dX, X)
    state.t = state.t + dt_vec
    state.status = np.where(bad, STOP_BLOWUP, state.status)
    state.status = np.where(collide, STOP_COLLISION, state.status)


def new_ensemble(x: Sequence[float], replicas: int, keep_history: bool = True) -> LoewnerEnsemble:
    x = np.asarray(x, dtype=float)
    return LoewnerEnsemble(
        points=np.tile(x, (replicas, 1)),
        derivs=np.ones((replicas, len(x))),
        t=np.zeros(replicas),
        status=np.zeros(replicas, dtype=int),
        keep_history=keep_history,
    )


# adaptive refinement near marked points

REFINE_RATIO = 6.0       # refine while the nearest gap is below this many noise scales
MAX_REFINE_DEPTH = 16


class BridgeNoise:
    """Extra normals for bridge refinement, one Philox stream per replica.

    Keyed like NoiseSource but on its own counter word; generators are made on
    first use, so replicas that never refine cost nothing.
    """

    def __init__(self, seed: int, replicas: Sequence[int], stream: int = 0):
        self.seed = int(seed)
        self.replicas = list(replicas)
        self.stream = int(stream)
        self._gens: dict[int, np.random.Generator] = {}

    def normals(self, local: np.ndarray) -> np.ndarray:
        out = np.empty(len(local))
        for k, i in enumerate(local):
            g = self._gens.get(int(i))
            if g is None:
                bits = np.random.Philox(key=[self.seed & (2**64 - 1), self.replicas[i]], counter=[0, 1, self.stream, 0])
                g = self._gens[int(i)] = np.random.Generator(bits)
            out[k] = g.standard_normal()
        return out


def _nearest_gap(points: np.ndarray, j: int) -> np.ndarray:
    others = np.delete(points, j, axis=1)
    return np.min(np.abs(others - points[:, [j]]), axis=1)


def _advance(state, idx, j, cfg, grad_log_z, dt, incr, drift, bridge, depth):
    running = state.status[idx] == STOP_RUNNING
    idx, incr = idx[running], incr[running]
    if not len(idx):
        return
    near = _nearest_gap(state.points[idx], j) < REFINE_RATIO * np.sqrt(cfg.kappa * dt)
    if depth >= MAX_REFINE_DEPTH:
        near[:] = False
    coarse = idx[~near]
    if len(coarse):
        sub = LoewnerEnsemble(
            state.points[coarse], state.derivs[coarse], state.t[coarse], state.status[coarse], keep_history=False
        )
        step_sde(sub, j, cfg, grad_log_z, incr[~near] / np.sqrt(dt), drift=drift, dt=dt)
        state.points[coarse], state.derivs[coarse] = sub.points, sub.derivs
        state.t[coarse], state.status[coarse] = sub.t, sub.status
    if near.any():
        fine, total = idx[near], incr[near]
        # Brownian bridge midpoint given the increment over [0, dt]
        first = 0.5 * total + 0.5 * np.sqrt(dt) * bridge.normals(fine)
        _advance(state, fine, j, cfg, grad_log_z, dt / 2, first, drift, bridge, depth + 1)
        _advance(state, fine, j, cfg, grad_log_z, dt / 2, total - first, drift, bridge, depth + 1)


def step_refined(
    state: LoewnerEnsemble,
    j: int,
    cfg: SamplerConfig,
    grad_log_z: Callable | None,
    noise: np.ndarray,
    bridge: BridgeNoise,
    drift: bool = True,
) -> None:
    """Advance every running replica by cfg.dt with driving increment
    sqrt(kappa dt) * noise (plus drift). Replicas whose driving value is within
    REFINE_RATIO noise scales of another marked point take the step as dyadic
    substeps whose Brownian increments sum to the coarse one."""
    if state.keep_history:
        raise ValueError("refined steps have no common slit stack; use keep_history=False")
    idx = np.arange(state.points.shape[0])
    _advance(state, idx, j, cfg, grad_log_z, cfg.dt, np.sqrt(cfg.dt) * noise, drift, bridge, 0)


def _tip(state: LoewnerEnsemble, j: int) -> np.ndarray:
    """Current tip of the curve grown at the last step (preimage of the slit top)."""
    k = len(state.centers) - 1
    top = state.centers[k] + 2j * np.sqrt(state.dts[k])
    return state.pull_back(top, upto=k)


def grow_curve(
    state: LoewnerEnsemble,
    j: int,
    x0: float,
    cfg: SamplerConfig,
    noise_src: NoiseSource,
    record: bool = True,
    frozen: np.ndarray | None = None,
) -> dict:
    """Grow the curve at slot j until it leaves the half-disk of radius
    cfg.localization around the original point x0; returns the trace.
    Replicas flagged in `frozen` (stopped during an earlier curve) stay put."""
    B = state.points.shape[0]
    grad = GRAD_LOG_FUNCS[cfg.model]
    state.status = np.where(frozen, STOP_COLLISION, STOP_RUNNING) if frozen is not None else np.zeros(B, dtype=int)
    start = len(state.centers)
    trace = [np.full(B, complex(x0))] if record else []
    prev = np.full(B, complex(x0))
    exit_point = np.full(B, np.nan + 0j)
    steps = np.zeros(B, dtype=int)
    for k in range(cfg.max_steps):
        running = state.status == STOP_RUNNING
        if not running.any():
            break
        step_sde(state, j, cfg, grad, noise_src.normals(k))
        tip = np.where(running, _tip(state, j), prev)
        steps = steps + running
        out = running & (np.abs(tip - x0) >= cfg.localization)
        if out.any():
            # intersect the last segment with the circle
            a, b = prev[out] - x0, tip[out] - x0
            d = b - a
            A = np.abs(d) ** 2
            Bq = 2 * np.real(np.conj(a) * d)
            C = np.abs(a) ** 2 - cfg.localization ** 2
            s = (-Bq + np.sqrt(np.maximum(Bq * Bq - 4 * A * C, 0.0))) / (2 * A)
            exit_point[out] = x0 + a + np.clip(s, 0.0, 1.0) * d
            state.status = np.where(out, STOP_EXIT, state.status)
        if record:
            trace.append(tip.copy())
        prev = tip
    state.status = np.where(state.status == STOP_RUNNING, STOP_MAXSTEPS, state.status)
    return {
        "trace": np.array(trace) if record else None,
        "steps": steps,
        "exit_point": exit_point,
        "status": state.status.copy(),
        "n_steps": len(state.centers) - start,
    }


def sample_one_by_one(
    x: Sequence[float],
    cfg: SamplerConfig,
    order: Sequence[int],
    replicas: int | Sequence[int] = 1,
    record: bool = True,
) -> list[dict]:
    """Grow the curves in the given order (0-based slots), each in the domain
    left after mapping out the previous hulls; curves are reported in the
    original coordinates. Returns one result dict per curve, in slot order."""
    x = np.asarray(x, dtype=float)
    if sorted(order) != list(range(len(x))):
        raise ValueError("order must be a permutation of the slots")
    gaps = np.diff(x)
    if np.any(gaps <= 2 * cfg.localization):
        raise ValueError("localization half-disks must be disjoint")
    reps = list(range(replicas)) if isinstance(replicas, int) else list(replicas)
    state = new_ensemble(x, len(reps))
    results: dict[int, dict] = {}
    frozen = np.zeros(len(reps), dtype=bool)
    for k, j in enumerate(order):
        noise = NoiseSource(cfg.seed, reps, stream=k)
        res = grow_curve(state, j, float(x[j]), cfg, noise, record=record, frozen=frozen)
        res["slot"] = j
        res["stage"] = k
        results[j] = res
        frozen = frozen | (res["status"] != STOP_EXIT)
    return [results[j] for j in range(len(x))]


def curves_to_rows(results: list[dict], dt: float):
    """CSV rows (curve_id, step, t, re, im) for replica 0."""
    rows = []
    for res in results:
        tr = res["trace"]
        n = int(res["steps"][0])
        for k in range(n + 1):
            z = tr[k, 0]
            rows.append((res["slot"], k, k * dt, float(z.real), float(z.imag)))
    return rows


def martingale_check(
    x: Sequence[float],
    cfg: SamplerConfig,
    j: int,
    horizon: float,
    n_paths: int,
    refine: bool = True,
) -> dict:
    """Sample mean of M_t / M_0 under chordal SLE from slot j (0-based), where
    M_t = prod_{i != j} g_t'(x_i)^h * Z(g_t(x_i), ..., driving, ...).
    With refine, steps near other marked points are subdivided (step_refined)."""
    x = np.asarray(x, dtype=float)
    Z = Z_FUNCS[cfg.model]
    h = cfg.h
    state = new_ensemble(x, n_paths, keep_history=not refine)
    noise = NoiseSource(cfg.seed, range(n_paths))
    bridge = BridgeNoise(cfg.seed, range(n_paths))
    n_steps = int(round(horizon / cfg.dt))
    m0 = float(Z(x))
    for k in range(n_steps):
        if not (state.status == STOP_RUNNING).any():
            break
        if refine:
            step_refined(state, j, cfg, None, noise.normals(k), bridge, drift=False)
        else:
            step_sde(state, j, cfg, None, noise.normals(k), drift=False)
    others = [i for i in range(len(x)) if i != j]
    with np.errstate(all="ignore"):
        m = np.prod(state.derivs[:, others] ** h, axis=1) * Z(state.points) / m0
    finite = np.isfinite(m)
    mean = float(np.mean(m[finite])) if finite.any() else float("nan")
    se = float(np.std(m[finite], ddof=1) / np.sqrt(finite.sum())) if finite.sum() > 1 else float("nan")
    stops = {STOP_NAMES[c]: int(np.sum(state.status == c)) for c in np.unique(state.status)}
    return {
        "mean": mean,
        "se": se,
        "n_paths": n_paths,
        "n_steps": n_steps,
        "nonfinite": int((~finite).sum()),
        "stops": stops,
        "z_score": (mean - 1.0) / se if se and se > 0 else float("nan"),
        "variance_overflow": bool((~finite).any() or not np.isfinite(se)),
    }


def default_config(model: str, **kw) -> SamplerConfig:
    return SamplerConfig(kappa=MODEL_KAPPA[model], model=model, **kw)
