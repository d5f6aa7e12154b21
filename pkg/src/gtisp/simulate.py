"""Seeded data generators for experiments.

Every generator draws from a Philox counter stream addressed by (seed,
stream), so train/validation/test sets are independent yet individually
reproducible: regenerating the test set never disturbs the training draw.
Normals come from Box-Muller over the raw uniforms, which pins the exact
sample values to this module rather than to the library's normal sampler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ParameterError
from .families import Family, mean_vector
from .solver import GroupSpec

__all__ = [
    "STREAM_TRAIN",
    "STREAM_VALIDATION",
    "STREAM_TEST",
    "philox_gen",
    "standard_normals",
    "Ar1Design",
    "gen_ar1_glm",
    "TwinSineSpec",
    "gen_twinsine",
    "Dictionary",
    "build_dictionary",
]

STREAM_TRAIN = 0
STREAM_VALIDATION = 1
STREAM_TEST = 2


def philox_gen(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator for the given (seed, stream) address."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(stream))
    return np.random.Generator(np.random.Philox(ss))


def standard_normals(gen: np.random.Generator, size: int) -> np.ndarray:
    """Box-Muller pairs; log1p(-u) keeps the tail finite at u -> 1."""
    half = (size + 1) // 2
    u1 = gen.uniform(size=half)
    u2 = gen.uniform(size=half)
    r = np.sqrt(-2.0 * np.log1p(-u1))
    angle = 2.0 * math.pi * u2
    z = np.concatenate([r * np.cos(angle), r * np.sin(angle)])
    return z[:size]


def _sample_response(family: Family, eta, gen) -> np.ndarray:
    mu = mean_vector(family, eta)
    n = mu.size
    if family.name == "gaussian":
        return mu + standard_normals(gen, n)
    if family.name == "bernoulli":
        return (gen.uniform(size=n) < mu).astype(float)
    # poisson: product-of-uniforms for small means, rounded normal above
    y = np.empty(n)
    for i, m in enumerate(mu):
        if m <= 50.0:
            limit = math.exp(-m)
            k, prod = 0, gen.uniform()
            while prod > limit:
                k += 1
                prod *= gen.uniform()
            y[i] = float(k)
        else:
            y[i] = max(0.0, round(m + math.sqrt(m) * standard_normals(gen, 1)[0]))
    return y


@dataclass(frozen=True)
class Ar1Design:
    """Rows are AR(1) chains across columns; signal sits on columns 0, 2, 3."""

    n: int = 100
    p: int = 100
    rho: float = 0.5
    b: float = 1.0  # shared magnitude of the three true coefficients
    sigma: float = 1.0  # gaussian noise level; other families ignore it

    def __post_init__(self):
        if self.n < 1 or self.p < 4:
            raise ParameterError("need n >= 1 and p >= 4")
        if not -1.0 < self.rho < 1.0:
            raise ParameterError("rho must be in (-1, 1)")
        if self.sigma < 0:
            raise ParameterError("sigma must be nonnegative")

    @property
    def beta_true(self) -> np.ndarray:
        beta = np.zeros(self.p)
        beta[[0, 2, 3]] = self.b
        return beta


def gen_ar1_glm(
    design: Ar1Design,
    family: Family,
    seed: int,
    stream=STREAM_TRAIN,
    n_obs: int = None,
):
    """Draw (X, y, beta_true) for one stream of the design."""
    if isinstance(stream, int):
        stream = (stream,)
    gen = philox_gen(seed, *stream)
    n = design.n if n_obs is None else int(n_obs)
    p, rho = design.p, design.rho
    z = standard_normals(gen, n * p).reshape(n, p)
    X = np.empty((n, p))
    X[:, 0] = z[:, 0]
    scale = math.sqrt(1.0 - rho * rho)
    for j in range(1, p):
        X[:, j] = rho * X[:, j - 1] + scale * z[:, j]
    beta = design.beta_true
    eta = X @ beta
    if family.name == "gaussian":
        y = eta + design.sigma * standard_normals(gen, n)
    else:
        y = _sample_response(family, eta, gen)
    return X, y, beta


@dataclass(frozen=True)
class TwinSineSpec:
    """Two cosines 0.002 apart in frequency, sampled at unit spacing."""

    a1: float = 2.0
    a2: float = 3.0
    phi1: float = math.pi / 3
    phi2: float = math.pi / 5
    f1: float = 0.25
    f2: float = 0.252
    n: int = 100
    sigma2: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("n must be >= 1")
        if self.sigma2 < 0:
            raise ParameterError("sigma2 must be nonnegative")

    def clean(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.a1 * np.cos(
            2.0 * math.pi * self.f1 * t + self.phi1
        ) + self.a2 * np.cos(2.0 * math.pi * self.f2 * t + self.phi2)


def gen_twinsine(
    spec: TwinSineSpec,
    seed: int,
    stream=STREAM_TRAIN,
    time_points=None,
):
    """Observed series (t, clean, noisy) at integer or supplied times."""
    if isinstance(stream, int):
        stream = (stream,)
    if time_points is None:
        t = np.arange(spec.n, dtype=float)
    else:
        t = np.asarray(time_points, dtype=float)
    clean = spec.clean(t)
    noise = math.sqrt(spec.sigma2) * standard_normals(
        philox_gen(seed, *stream), t.size
    )
    return t, clean, clean + noise


@dataclass(frozen=True)
class Dictionary:
    """Cos/sin atoms at a fixed frequency ladder, evaluated at any times.

    Atoms dropped at construction (a sine identically zero on the build
    times) stay dropped in ``evaluate``, so later design matrices line up
    column for column with the training one.
    """

    X: np.ndarray
    groups: GroupSpec
    freqs: np.ndarray  # per column
    kinds: tuple  # per column, "cos" or "sin"
    group_freqs: np.ndarray = field(init=False, default=None)

    def __post_init__(self):
        gf = np.array([self.freqs[b[0]] for b in self.groups.blocks])
        object.__setattr__(self, "group_freqs", gf)

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def evaluate(self, time_points) -> np.ndarray:
        t = np.asarray(time_points, dtype=float)
        cols = np.empty((t.size, self.p))
        for j, (f, kind) in enumerate(zip(self.freqs, self.kinds)):
            arg = 2.0 * math.pi * f * t
            cols[:, j] = np.cos(arg) if kind == "cos" else np.sin(arg)
        return cols


def build_dictionary(
    time_points, k_max: int = 250, f_max: float = 0.5
) -> Dictionary:
    """Frequencies f_max * k / k_max for k = 1..k_max, a cos and a sin each.

    Atoms with zero norm on the build times are dropped (at unit spacing
    that is exactly the sine at f_max); the remaining cos/sin pairs form
    the groups, one per frequency.
    """
    t = np.asarray(time_points, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise ParameterError("time_points must be a 1-d array, length >= 2")
    if k_max < 1 or f_max <= 0:
        raise ParameterError("need k_max >= 1 and f_max > 0")
    freqs, kinds, cols, owner = [], [], [], []
    for k in range(1, k_max + 1):
        f = f_max * k / k_max
        arg = 2.0 * math.pi * f * t
        for kind, col in (("cos", np.cos(arg)), ("sin", np.sin(arg))):
            if np.linalg.norm(col) <= 1e-9 * math.sqrt(t.size):
                continue
            freqs.append(f)
            kinds.append(kind)
            cols.append(col)
            owner.append(k - 1)
    X = np.column_stack(cols)
    owner = np.asarray(owner)
    blocks = tuple(
        tuple(np.flatnonzero(owner == g).tolist())
        for g in range(k_max)
        if np.any(owner == g)
    )
    return Dictionary(
        X=X,
        groups=GroupSpec(blocks),
        freqs=np.asarray(freqs),
        kinds=tuple(kinds),
    )
