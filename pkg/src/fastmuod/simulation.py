"""Synthetic functional data from the eight contamination models.

Models 1-6 and 8 live on ``d`` equidistant points of [0, 1]; Model 7 uses
``d`` equidistant angles of [0, 2 pi]. Noise processes are exact draws from
zero-mean Gaussian processes.

===== =========================================== ====================================
model main curve                                  contamination
===== =========================================== ====================================
1     4t + e(t)                                   none
2     4t + e(t)                                   4t + 8k + e(t)
3     4t + e(t)                                   4t + 8k 1{T <= t <= T + 0.05} + e(t)
4     30 t (1-t)^(3/2) + e4(t)                    30 t^(3/2) (1-t) + e4(t)
5     4t + e(t)                                   4t + e5(t)
6     4t + e(t)                                   4t + 2 sin(4 (t + theta) pi) + e(t)
7     a sin x + b cos x + e(t)                   (9 sin x + 9 cos x)(1-u) + (p sin x + q cos x) u + e(t)
8     4t + e(t)                                   one of the 2, 3, 5, 6 contaminations
===== =========================================== ====================================

with covariances ``e: exp(-|t-s|)``, ``e4: 0.3 exp(-|t-s| / 0.3)`` and
``e5: 5 exp(-2 |t-s|^0.5)``; ``k`` is a fair sign, ``T ~ U(0.1, 0.9)``,
``theta ~ U(0.25, 0.75)``, ``a, b ~ U(3, 8)``, ``u`` a fair coin and
``p, q ~ U(1.5, 2.5)`` by default.

Setting ``nu`` selects the noise-level variants: both ``e`` and ``e4`` are
replaced by ``nu exp(-|t-s|)`` (``e5`` is unchanged). ``nu=None`` keeps the
native kernels, so ``nu=1`` differs from ``None`` only for Model 4.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import FunctionalSample
from .exceptions import InvalidSpec, NumericalFailure

__all__ = [
    "SimulationSpec",
    "LabeledSample",
    "gp_sample",
    "kernel_matrix",
    "generate",
    "exponential_kernel",
    "KERNELS",
    "MODELS",
]

MODELS = (1, 2, 3, 4, 5, 6, 7, 8)
_MIXTURE_SUBMODELS = (2, 3, 5, 6)
_JITTERS = (0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6)


def exponential_kernel(scale: float = 1.0, length: float = 1.0, power: float = 1.0):
    """``scale * exp(-(|s - t| ** power) / length)`` as a vectorized callable."""
    def kernel(s, t):
        return scale * np.exp(-np.abs(s - t) ** power / length)
    return kernel


# name -> (scale, length, power)
KERNELS = {
    "exp": (1.0, 1.0, 1.0),
    "model4": (0.3, 0.3, 1.0),
    "model5": (5.0, 0.5, 0.5),
}


def kernel_matrix(kernel: Callable, grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    return kernel(g[:, None], g[None, :])


def _cholesky(K: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, escalating diagonal jitter if needed."""
    eye = np.eye(K.shape[0])
    for jitter in _JITTERS:
        try:
            return np.linalg.cholesky(K + jitter * eye)
        except np.linalg.LinAlgError:
            continue
    raise NumericalFailure(
        f"covariance matrix not positive definite even with jitter {_JITTERS[-1]:g}"
    )


def gp_sample(cov: Callable, grid, count: int, rng) -> np.ndarray:
    """``count`` zero-mean Gaussian-process draws on ``grid``, shape (count, d)."""
    L = _cholesky(kernel_matrix(cov, grid))
    return _draw(L, count, rng)


def _draw(L, count, rng):
    z = rng.standard_normal((count, L.shape[0]))
    return z @ L.T


@functools.lru_cache(maxsize=64)
def _named_factor(name: str, d: int, scale: float) -> np.ndarray:
    base, length, power = KERNELS[name]
    grid = np.linspace(0.0, 1.0, d)
    L = _cholesky(kernel_matrix(exponential_kernel(base * scale, length, power), grid))
    L.setflags(write=False)
    return L


@dataclass(frozen=True)
class SimulationSpec:
    model: int
    n: int = 300
    d: int = 50
    alpha: float = 0.1
    nu: Optional[float] = None
    seed: int = 0
    model7_pq_range: tuple = (1.5, 2.5)

    def __post_init__(self):
        if self.model not in MODELS:
            raise InvalidSpec(f"model must be one of {MODELS}, got {self.model!r}")
        if int(self.n) < 1:
            raise InvalidSpec(f"n must be >= 1, got {self.n}")
        if int(self.d) < 2:
            raise InvalidSpec(f"d must be >= 2, got {self.d}")
        if not (0.0 <= self.alpha < 1.0):
            raise InvalidSpec(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.nu is not None and not self.nu > 0:
            raise InvalidSpec(f"nu must be positive, got {self.nu}")
        lo, hi = self.model7_pq_range
        if not lo < hi:
            raise InvalidSpec("model7_pq_range must be an increasing pair")

    @property
    def n_outliers(self) -> int:
        if self.model == 1:
            return 0
        # half-up rounding
        return int(np.floor(self.alpha * self.n + 0.5))

    def grid(self) -> np.ndarray:
        hi = 2.0 * np.pi if self.model == 7 else 1.0
        return np.linspace(0.0, hi, self.d)


@dataclass(frozen=True)
class LabeledSample:
    sample: FunctionalSample
    is_outlier: np.ndarray
    model_detail: dict = field(default_factory=dict)
    spec: Optional[SimulationSpec] = None

    @property
    def outlier_rows(self) -> np.ndarray:
        return np.flatnonzero(self.is_outlier)


def _nan(n):
    return np.full(n, np.nan)


def generate(spec: SimulationSpec) -> LabeledSample:
    """Draw one labeled sample; identical specs give identical output."""
    rng = np.random.default_rng(spec.seed)
    n, d = spec.n, spec.d
    t = np.linspace(0.0, 1.0, d)
    m = spec.n_outliers

    rows = np.sort(rng.choice(n, size=m, replace=False)) if m else np.array([], dtype=int)
    is_outlier = np.zeros(n, dtype=bool)
    is_outlier[rows] = True

    detail = {key: _nan(n) for key in ("k", "T", "theta", "a", "b", "p", "q", "u")}
    detail["submodel"] = np.zeros(n, dtype=int)

    if spec.nu is None:
        noise_factor = _named_factor("model4" if spec.model == 4 else "exp", d, 1.0)
    else:
        noise_factor = _named_factor("exp", d, float(spec.nu))
    noise = _draw(noise_factor, n, rng)

    if spec.model == 4:
        X = 30.0 * t * (1.0 - t) ** 1.5 + noise
    elif spec.model == 7:
        x = spec.grid()
        a = rng.uniform(3.0, 8.0, n)
        b = rng.uniform(3.0, 8.0, n)
        X = a[:, None] * np.sin(x) + b[:, None] * np.cos(x) + noise
        main = ~is_outlier
        detail["a"][main] = a[main]
        detail["b"][main] = b[main]
    else:
        X = 4.0 * t + noise

    if m == 0:
        return _labeled(spec, X, is_outlier, detail)

    if spec.model == 8:
        subs = rng.choice(np.array(_MIXTURE_SUBMODELS), size=m)
    else:
        subs = np.full(m, spec.model)
    detail["submodel"][rows] = subs

    for sub in np.unique(subs):
        r = rows[subs == sub]
        X[r] = _contaminate(int(sub), spec, t, noise[r], r, rng, detail)
    return _labeled(spec, X, is_outlier, detail)


def _contaminate(model, spec, t, noise, rows, rng, detail):
    count = rows.size
    if model == 2:
        k = rng.choice(np.array([-1.0, 1.0]), size=count)
        detail["k"][rows] = k
        return 4.0 * t + 8.0 * k[:, None] + noise
    if model == 3:
        k = rng.choice(np.array([-1.0, 1.0]), size=count)
        T = rng.uniform(0.1, 0.9, count)
        detail["k"][rows] = k
        detail["T"][rows] = T
        window = (t[None, :] >= T[:, None]) & (t[None, :] <= T[:, None] + 0.05)
        return 4.0 * t + 8.0 * k[:, None] * window + noise
    if model == 4:
        return 30.0 * t ** 1.5 * (1.0 - t) + noise
    if model == 5:
        return 4.0 * t + _draw(_named_factor("model5", t.size, 1.0), count, rng)
    if model == 6:
        theta = rng.uniform(0.25, 0.75, count)
        detail["theta"][rows] = theta
        return 4.0 * t + 2.0 * np.sin(4.0 * (t[None, :] + theta[:, None]) * np.pi) + noise
    if model == 7:
        x = spec.grid()
        lo, hi = spec.model7_pq_range
        p = rng.uniform(lo, hi, count)
        q = rng.uniform(lo, hi, count)
        u = rng.integers(0, 2, count).astype(float)
        detail["p"][rows] = p
        detail["q"][rows] = q
        detail["u"][rows] = u
        big = 9.0 * np.sin(x) + 9.0 * np.cos(x)
        small = p[:, None] * np.sin(x) + q[:, None] * np.cos(x)
        return big * (1.0 - u[:, None]) + small * u[:, None] + noise
    raise InvalidSpec(f"model {model} has no contamination")


def _labeled(spec, X, is_outlier, detail):
    sample = FunctionalSample(X, grid=spec.grid(), ids=tuple(range(spec.n)))
    return LabeledSample(sample=sample, is_outlier=is_outlier,
                         model_detail=detail, spec=spec)
