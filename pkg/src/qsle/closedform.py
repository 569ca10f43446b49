"""Closed-form symmetric partition functions at kappa = 3, 4, 6.

    ising (kappa=3, h=1/2): signed sum over all pair partitions of prod 1/(x_b - x_a)
    gff   (kappa=4, h=1/4): prod_{k<l} (x_l - x_k)^((-1)^(l-k)/2)
    perco (kappa=6, h=0):   1

Evaluators accept arrays of shape (..., 2N) with increasing last axis, so the
sampler can evaluate many configurations at once. Finite-difference checks of
the PDE system, Mobius covariance and the cascade property live here as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

MIN_GAP = 1e-10
MODELS = ("ising", "gff", "perco")
MODEL_KAPPA = {"ising": 3.0, "gff": 4.0, "perco": 6.0}


@dataclass(frozen=True)
class SLEParams:
    kappa: float

    def __post_init__(self):
        if not 0 < self.kappa < 8:
            raise ValueError("kappa must lie in (0, 8)")

    @property
    def h(self) -> float:
        return (6.0 - self.kappa) / (2.0 * self.kappa)


def params_for(model: str) -> SLEParams:
    return SLEParams(MODEL_KAPPA[model])


def check_config(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] % 2:
        raise ValueError("need an even number of points")
    if not np.all(np.isfinite(x)):
        raise ValueError("points must be finite")
    gaps = np.diff(x, axis=-1)
    if gaps.size and np.min(gaps) < MIN_GAP:
        raise ValueError("points must be strictly increasing with gaps above 1e-10")
    return x


# pair partitions and their signs


@lru_cache(maxsize=None)
def pair_partitions(n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """All pairings of 0..n-1 as tuples of (a, b) with a < b."""
    if n == 0:
        return ((),)
    out = []
    for k in range(1, n):
        rest = [i for i in range(1, n) if i != k]
        for sub in pair_partitions(n - 2):
            out.append(((0, k),) + tuple((rest[a], rest[b]) for a, b in sub))
    return tuple(out)


def pairing_sign(pairs: Sequence[tuple[int, int]]) -> int:
    """Sign of the product of (a-c)(a-d)(b-c)(b-d) over distinct pairs."""
    s = 1
    for i, (a, b) in enumerate(pairs):
        for c, d in pairs[i + 1:]:
            if (a - c) * (a - d) * (b - c) * (b - d) < 0:
                s = -s
    return s


def permutation_sign(pairs: Sequence[tuple[int, int]]) -> int:
    """Parity of the word a1 b1 a2 b2 ... (pairs sorted by first element), by inversions."""
    word = [x for p in sorted(pairs) for x in p]
    inv = sum(1 for i in range(len(word)) for j in range(i + 1, len(word)) if word[i] > word[j])
    return -1 if inv % 2 else 1


@lru_cache(maxsize=None)
def _signed_pairings(n: int):
    pp = pair_partitions(n)
    a = np.array([[p[0] for p in P] for P in pp], dtype=int).reshape(len(pp), n // 2)
    b = np.array([[p[1] for p in P] for P in pp], dtype=int).reshape(len(pp), n // 2)
    s = np.array([pairing_sign(P) for P in pp], dtype=float)
    return a, b, s


def _ising_terms(x: np.ndarray):
    a, b, s = _signed_pairings(x.shape[-1])
    inv = 1.0 / (x[..., b] - x[..., a])  # (..., P, N)
    terms = s * np.prod(inv, axis=-1)
    return terms, inv, a, b


def z_ising(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] == 0:
        return np.ones(x.shape[:-1])
    terms, _, _, _ = _ising_terms(x)
    return terms.sum(axis=-1)


def grad_log_z_ising(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    terms, inv, a, b = _ising_terms(x)
    z = terms.sum(axis=-1)
    g = np.zeros(x.shape)
    # d/dx_a of 1/(x_b - x_a) is +1/(x_b - x_a)^2, d/dx_b is the negative
    contrib = terms[..., None] * inv  # (..., P, N)
    for p in range(a.shape[0]):
        for k in range(a.shape[1]):
            g[..., a[p, k]] += contrib[..., p, k]
            g[..., b[p, k]] -= contrib[..., p, k]
    return g / z[..., None]


def pfaffian(m: np.ndarray) -> float:
    """Pfaffian of a skew-symmetric matrix by Gaussian elimination with pivoting."""
    a = np.array(m, dtype=float)
    n = a.shape[0]
    if n % 2:
        return 0.0
    res = 1.0
    for k in range(0, n - 1, 2):
        piv = k + 1 + int(np.argmax(np.abs(a[k, k + 1:])))
        if piv != k + 1:
            a[[k + 1, piv], :] = a[[piv, k + 1], :]
            a[:, [k + 1, piv]] = a[:, [piv, k + 1]]
            res = -res
        if a[k, k + 1] == 0:
            return 0.0
        res *= a[k, k + 1]
        if k + 2 < n:
            r, t = a[k, k + 2:], a[k + 1, k + 2:]
            a[k + 2:, k + 2:] += (np.outer(t, r) - np.outer(r, t)) / a[k, k + 1]
    return res


def z_ising_pfaffian(x) -> float:
    x = np.asarray(x, dtype=float)
    d = x[None, :] - x[:, None]
    with np.errstate(divide="ignore"):
        m = np.where(d != 0, 1.0 / np.where(d != 0, d, 1.0), 0.0)
    return pfaffian(m)


def _gff_exponents(n: int) -> np.ndarray:
    k = np.arange(n)
    e = 0.5 * (-1.0) ** np.abs(k[:, None] - k[None, :])
    np.fill_diagonal(e, 0.0)
    return e


def log_z_gff(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    out = np.zeros(x.shape[:-1])
    for k in range(n):
        for l in range(k + 1, n):
            out = out + 0.5 * (-1.0) ** (l - k) * np.log(x[..., l] - x[..., k])
    return out


def z_gff(x) -> np.ndarray:
    return np.exp(log_z_gff(x))


def grad_log_z_gff(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    e = _gff_exponents(n)
    d = x[..., :, None] - x[..., None, :]
    np.einsum("...ii->...i", d)[...] = 1.0
    return np.sum(e / d, axis=-1)


def z_perco(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.ones(x.shape[:-1])


def grad_log_z_perco(x) -> np.ndarray:
    return np.zeros(np.shape(x))


Z_FUNCS: dict[str, Callable] = {"ising": z_ising, "gff": z_gff, "perco": z_perco}
GRAD_LOG_FUNCS: dict[str, Callable] = {
    "ising": grad_log_z_ising,
    "gff": grad_log_z_gff,
    "perco": grad_log_z_perco,
}


def z_eval(model: str, x) -> np.ndarray:
    return Z_FUNCS[model](x)


def grad_log_z(model: str, x) -> np.ndarray:
    return GRAD_LOG_FUNCS[model](x)


# numerical checks


def fd_step(x: np.ndarray, rel: float = 1e-4) -> float:
    return rel * float(np.min(np.diff(x)))


def pde_residual(Z: Callable, x, params: SLEParams, i: int, rel_step: float = 1e-4) -> float:
    """Relative residual of the second-order PDE in the i-th variable (0-based),
    with central finite differences of step rel_step * (min gap)."""
    x = check_config(x)
    h = fd_step(x, rel_step)
    z0 = float(Z(x))
    n = len(x)

    def at(j, s):
        y = x.copy()
        y[j] += s
        return float(Z(y))

    d2 = (at(i, h) - 2 * z0 + at(i, -h)) / h ** 2
    total = 0.5 * params.kappa * d2
    for j in range(n):
        if j == i:
            continue
        dj = (at(j, h) - at(j, -h)) / (2 * h)
        r = x[j] - x[i]
        total += 2.0 / r * dj - 2.0 * params.h / r ** 2 * z0
    return abs(total) / abs(z0)


def pde_residual_exact_perco(x, i: int) -> float:
    """Percolation: Z is constant and h = 0, so every term of the operator vanishes."""
    check_config(x)
    return 0.0


def mobius(a: float, b: float, c: float, d: float, x: np.ndarray):
    """Image and derivative of z -> (a z + b)/(c z + d) at real points."""
    den = c * x + d
    return (a * x + b) / den, (a * d - b * c) / den ** 2


def covariance_check(Z: Callable, x, params: SLEParams, a: float, b: float, c: float, d: float) -> float:
    """|Z(x) - prod mu'(x_i)^h Z(mu(x))| / |Z(x)|."""
    x = check_config(x)
    if a * d - b * c <= 0:
        raise ValueError("need ad - bc > 0")
    den = c * x + d
    if np.any(den == 0) or not (np.all(den > 0) or np.all(den < 0)):
        raise ValueError("the map has a pole between the points and does not preserve their order")
    y, dy = mobius(a, b, c, d, x)
    check_config(y)
    lhs = float(Z(x))
    rhs = float(np.prod(dy ** params.h) * Z(y))
    return abs(lhs - rhs) / abs(lhs)


def insert_pair(x_rest, j: int, xi: float, gap: float) -> np.ndarray:
    """Insert points xi -+ gap/2 so that they become the j-th and j+1-st (1-based)."""
    x_rest = list(x_rest)
    pts = x_rest[: j - 1] + [xi - gap / 2, xi + gap / 2] + x_rest[j - 1:]
    return check_config(pts)


def cascade_check(model: str, x_rest, j: int, xi: float, gaps: Sequence[float]) -> dict:
    """Relative deviation of gap^(2h) Z^(N) from Z^(N-1) as the j-th pair merges at xi."""
    x_rest = np.asarray(x_rest, dtype=float)
    lo = x_rest[j - 2] if j >= 2 else -np.inf
    hi = x_rest[j - 1] if j - 1 < len(x_rest) else np.inf
    if not lo < xi < hi:
        raise ValueError("xi must lie strictly between its neighbours")
    params = params_for(model)
    target = float(z_eval(model, x_rest))
    errs = []
    for g in gaps:
        x = insert_pair(x_rest, j, xi, g)
        val = g ** (2 * params.h) * float(z_eval(model, x))
        errs.append(abs(val - target) / abs(target))
    rates = [
        float(np.log(errs[k] / errs[k + 1]) / np.log(gaps[k] / gaps[k + 1]))
        if errs[k] > 0 and errs[k + 1] > 0
        else float("nan")
        for k in range(len(gaps) - 1)
    ]
    return {"gaps": list(gaps), "rel_errors": errs, "rates": rates, "limit": target}


def random_config(rng: np.random.Generator, n_points: int, min_gap: float = 0.5, max_gap: float = 3.0) -> np.ndarray:
    gaps = rng.uniform(min_gap, max_gap, size=n_points - 1)
    start = rng.uniform(-5.0, 5.0)
    return start + np.concatenate([[0.0], np.cumsum(gaps)])
