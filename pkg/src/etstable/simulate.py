"""Random variates for elementary components and full ETS specs.

For alpha < 0 an elementary variable is a compound Poisson sum and is drawn
exactly.  For alpha in [0, 2) jumps above a cutoff are drawn by inverting the
tabulated tail of the Levy measure; the jumps below it are replaced by their
mean plus a normal variable with the same variance.

Randomness is keyed by ``(seed, component index, block index)`` where a block
is ``BLOCK_SIZE`` consecutive paths, so the output does not depend on the
order in which blocks are evaluated.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .approx import ElementaryComponent, discretize_extended_measure, to_elementary_sum
from .errors import InvalidInput, NotPSD
from .measures import EtsSpec, psd_ok
from .special import (
    DEFAULT_CONFIG,
    INF,
    QuadratureConfig,
    tempered_power_integral,
    tempered_radial_integral,
)

BLOCK_SIZE = 4096
MAX_SEED = 2 ** 64 - 1
_TABLE_CELLS = 2048
_MAX_JUMPS = 1 << 21
_NEWTON_STEPS = 6
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
# beyond t^p = 60 the normalised tail is below 1e-20 for every cutoff we use
_TAIL_EXPONENT_CAP = 60.0


@dataclass(frozen=True)
class SamplerConfig:
    """``discretize_n`` sets where atoms at infinity are pushed (radius 2**n)."""

    seed: int = 0
    truncation_tau: float = 1e-3
    n_paths: int = 10_000
    discretize_n: int = 24

    def __post_init__(self):
        if int(self.seed) != self.seed or not 0 <= self.seed <= MAX_SEED:
            raise InvalidInput("seed must be an unsigned 64-bit integer")
        if not 0 < self.truncation_tau < 1:
            raise InvalidInput("truncation_tau must lie in (0, 1)")
        if int(self.n_paths) != self.n_paths or self.n_paths < 1:
            raise InvalidInput("n_paths must be a positive integer")
        if int(self.discretize_n) != self.discretize_n or self.discretize_n < 1:
            raise InvalidInput("discretize_n must be a positive integer")


def substream(seed: int, component: int, block: int) -> np.random.Generator:
    """Independent generator for one (component, block) cell."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(component), int(block)))
    return np.random.Generator(np.random.Philox(ss))


class _TailInverter:
    """Inverse of the normalised tail T(t)/T(tau), T(t) = int_t^inf t^{-1-alpha} e^{-t^p}."""

    def __init__(self, alpha: float, p: float, tau: float, cfg: QuadratureConfig):
        t_max = max(_TAIL_EXPONENT_CAP ** (1.0 / p), 4.0 * tau)
        x = np.linspace(math.log(tau), math.log(t_max), _TABLE_CELLS + 1)
        # cell integrals of e^{-alpha x} exp(-e^{p x}) dx by Gauss-Legendre
        half = 0.5 * np.diff(x)
        mid = 0.5 * (x[1:] + x[:-1])
        nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        cells = half * (np.exp(-alpha * nodes - np.exp(p * nodes)) @ _GL_WEIGHTS)
        beyond = tempered_power_integral(alpha, p, t_max, INF, 0, cfg)
        tail = np.concatenate([np.cumsum(cells[::-1])[::-1] + beyond, [beyond]])
        self.total = float(tail[0])
        self.log_t_max = float(x[-1])
        self.y_min = float(np.log(tail[-1] / tail[0]))
        y = np.log(tail / tail[0])
        self._x = x
        self._neg_y = -y
        self._poly = PchipInterpolator(x, y)

    def __call__(self, u: np.ndarray) -> np.ndarray:
        """Map u in (0, 1] to t with T(t)/T(tau) = u."""
        target = np.log(u)
        out = np.full(u.shape, self.log_t_max)
        inside = target > self.y_min
        tgt = target[inside]
        cell = np.clip(np.searchsorted(self._neg_y, -tgt, side="right") - 1, 0, _TABLE_CELLS - 1)
        x0 = self._x[cell]
        width = self._x[cell + 1] - x0
        c0, c1, c2, c3 = self._poly.c[:, cell]
        # safeguarded Newton on the cell's cubic, started from the secant guess;
        # the cubic is monotone so the root is unique within the cell
        y0 = -self._neg_y[cell]
        y1 = -self._neg_y[cell + 1]
        h = np.clip((tgt - y0) / (y1 - y0), 0.0, 1.0) * width
        for _ in range(_NEWTON_STEPS):
            val = ((c0 * h + c1) * h + c2) * h + c3 - tgt
            slope = (3.0 * c0 * h + 2.0 * c1) * h + c2
            h = np.clip(h - val / np.where(slope < 0, slope, -1.0), 0.0, width)
        out[inside] = x0 + h
        return np.exp(out)


class ElementarySampler:
    """Draws U ~ ID(0, c 1_{t>0} t^{-1-alpha} e^{-t^p} dt, b_scalar) with centering t/(1+t^2)."""

    def __init__(self, c: float, b_scalar: float, alpha: float, p: float, tau: float = 1e-3,
                 cfg: QuadratureConfig = DEFAULT_CONFIG):
        if not (c > 0 and math.isfinite(c)):
            raise InvalidInput(f"c must be positive, got {c}")
        if not (alpha < 2 and p > 0):
            raise InvalidInput("need alpha < 2 and p > 0")
        if not 0 < tau < 1:
            raise InvalidInput("tau must lie in (0, 1)")
        self.alpha, self.p = float(alpha), float(p)
        self.exact = alpha < 0
        if self.exact:
            self.rate = c * tempered_power_integral(alpha, p, 0.0, INF, 0, cfg)
            comp = tempered_radial_integral(lambda t: t / (1.0 + t * t), alpha, p, 1.0, cfg)
            self.drift = b_scalar - c * comp
            self.variance = 0.0
            self._shape = -alpha / p
        else:
            self.rate = c * tempered_power_integral(alpha, p, tau, INF, 0, cfg)
            big = tempered_radial_integral(lambda t: t / (1.0 + t * t) if t > tau else 0.0,
                                           alpha, p, 1.0, cfg, breakpoints=(tau,))
            small = tempered_radial_integral(lambda t: t ** 3 / (1.0 + t * t) if t < tau else 0.0,
                                             alpha, p, 1.0, cfg, breakpoints=(tau,))
            self.drift = b_scalar - c * big + c * small
            self.variance = c * tempered_power_integral(alpha, p, 0.0, tau, 2, cfg)
            self._invert = _TailInverter(alpha, p, tau, cfg)

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        counts = rng.poisson(self.rate, size)
        out = np.zeros(size)
        # bound memory: walk the paths in groups holding at most _MAX_JUMPS jumps
        ends = np.cumsum(counts)
        start = 0
        while start < size:
            base = ends[start - 1] if start else 0
            stop = max(int(np.searchsorted(ends, base + _MAX_JUMPS, side="right")), start + 1)
            n_jumps = int(ends[stop - 1] - base)
            if self.exact:
                jumps = rng.gamma(self._shape, 1.0, n_jumps) ** (1.0 / self.p)
            else:
                jumps = self._invert(1.0 - rng.random(n_jumps))
            owner = np.repeat(np.arange(stop - start), counts[start:stop])
            out[start:stop] = np.bincount(owner, weights=jumps, minlength=stop - start)
            start = stop
        out += self.drift
        if self.variance > 0:
            out += math.sqrt(self.variance) * rng.standard_normal(size)
        return out


def _blocks(n_paths: int) -> Iterable[tuple[int, int]]:
    for k, start in enumerate(range(0, n_paths, BLOCK_SIZE)):
        yield k, min(BLOCK_SIZE, n_paths - start)


def sample_elementary(comp, alpha: float, p: float, cfg: SamplerConfig = SamplerConfig(),
                      component_index: int = 0, tau: float | None = None,
                      quad_cfg: QuadratureConfig = DEFAULT_CONFIG) -> np.ndarray:
    """``cfg.n_paths`` draws of the scalar U of a component.

    ``comp`` is an :class:`ElementaryComponent` or a ``(c, b_scalar)`` pair.
    """
    if isinstance(comp, ElementaryComponent):
        c, b_scalar = comp.c, comp.b_scalar
    else:
        c, b_scalar = comp
    sampler = ElementarySampler(c, b_scalar, alpha, p, cfg.truncation_tau if tau is None else tau, quad_cfg)
    return np.concatenate([sampler.draw(substream(cfg.seed, component_index, k), size)
                           for k, size in _blocks(cfg.n_paths)])


def _gaussian_factor(A: np.ndarray) -> np.ndarray:
    lam, vecs = np.linalg.eigh(0.5 * (A + A.T))
    return vecs * np.sqrt(np.clip(lam, 0.0, None))


def sample_ets(spec: EtsSpec, cfg: SamplerConfig = SamplerConfig(),
               quad_cfg: QuadratureConfig = DEFAULT_CONFIG) -> np.ndarray:
    """(n_paths, d) samples of ETS(A, nu, b); atoms at infinity are pushed to radius 2**discretize_n."""
    if not psd_ok(spec.A):
        raise NotPSD("A must be symmetric positive semidefinite")
    n, d = cfg.n_paths, spec.dimension
    out = np.tile(np.asarray(spec.b, dtype=float), (n, 1))
    if np.any(spec.A != 0):
        L = _gaussian_factor(spec.A)
        out += np.concatenate([substream(cfg.seed, 0, k).standard_normal((size, d))
                               for k, size in _blocks(n)]) @ L.T
    if len(spec.nu):
        nu_n = discretize_extended_measure(spec.nu, cfg.discretize_n, spec.alpha, spec.p, drop_small=False)
        for i, comp in enumerate(to_elementary_sum(nu_n, spec.alpha, spec.p, cfg=quad_cfg), start=1):
            # the jump cutoff is applied to the jump size |t x|, not to t
            tau = min(cfg.truncation_tau / comp.norm, 0.5)
            u = sample_elementary(comp, spec.alpha, spec.p, cfg, component_index=i, tau=tau, quad_cfg=quad_cfg)
            out += u[:, None] * np.asarray(comp.x)[None, :]
    return out


def empirical_cf(samples, grid, chunk: int = 65536) -> np.ndarray:
    """Mean of exp(i <z, X>) over samples for every grid point."""
    X = np.asarray(samples, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] == 0:
        raise InvalidInput("need at least one sample")
    Z = np.atleast_2d(grid.points if hasattr(grid, "points") else grid)
    if Z.shape[1] != X.shape[1]:
        raise InvalidInput("grid and samples differ in dimension")
    acc = np.zeros(len(Z), dtype=complex)
    for start in range(0, len(X), chunk):
        acc += np.exp(1j * (X[start:start + chunk] @ Z.T)).sum(axis=0)
    return acc / len(X)


def samples_to_csv(samples) -> str:
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    buf = io.StringIO()
    header = ",".join(f"x{i + 1}" for i in range(X.shape[1]))
    np.savetxt(buf, X, fmt="%.17g", delimiter=",", header=header, comments="")
    return buf.getvalue()
