"""Characteristic exponents of ETS laws and CF-based distances.

For an atom of nu at radius rho in direction u with weight w, the substitution
``tau = t * rho`` turns its share of the Levy-Khintchine integral into
``w * rho**alpha / (|x|^2 ^ h_alpha(rho)) * psi(<u, z>; rho)``, where psi is
:func:`etstable.special.levy_oscillatory_integral`.  The centering
``<z, y>/(1 + |y|^2)`` is preserved exactly by this substitution, so no extra
shift term appears.  Atoms at infinity use ``rho = inf``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import qmc

from .errors import DimensionMismatch, InvalidInput, ParameterMismatch
from .measures import EtsSpec, levy_coefficient
from .special import DEFAULT_CONFIG, QuadratureConfig, levy_oscillatory_integral

DEFAULT_HALF_WIDTH = 3.0


@dataclass(frozen=True)
class CfGrid:
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or len(pts) == 0:
            raise InvalidInput("a CF grid needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise InvalidInput("grid points must be finite")
        if not np.any(np.all(pts == 0.0, axis=1)):
            raise InvalidInput("a CF grid must contain the origin")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def line(cls, lo: float, hi: float, num: int) -> "CfGrid":
        """Equally spaced 1-d grid; the origin is added if the spacing misses it."""
        z = np.linspace(lo, hi, num)
        if not np.any(z == 0.0):
            z = np.sort(np.append(z, 0.0))
        return cls(z[:, None])


def default_grid(d: int) -> CfGrid:
    """Tensor grid on [-3, 3]^d with 13 points per axis for d <= 2, else 500 Halton points."""
    if d <= 2:
        axis = np.linspace(-DEFAULT_HALF_WIDTH, DEFAULT_HALF_WIDTH, 13)
        mesh = np.meshgrid(*([axis] * d), indexing="ij")
        return CfGrid(np.stack([m.ravel() for m in mesh], axis=1))
    pts = qmc.Halton(d, scramble=False).random(500)[1:]  # first Halton point is the corner 0
    pts = (2.0 * pts - 1.0) * DEFAULT_HALF_WIDTH
    return CfGrid(np.vstack([np.zeros((1, d)), pts]))


@lru_cache(maxsize=1 << 16)
def _psi(s: float, alpha: float, p: float, rho: float, cfg: QuadratureConfig) -> complex:
    return levy_oscillatory_integral(s, alpha, p, rho, cfg)


def char_exponent(spec: EtsSpec, z, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """C(z) = -<z,Az>/2 + i<b,z> + int (e^{i<z,y>} - 1 - i<z,y>/(1+|y|^2)) M(dy)."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.shape != (spec.dimension,):
        raise DimensionMismatch(f"z must have length {spec.dimension}")
    if not np.all(np.isfinite(z)):
        raise InvalidInput("z must be finite")
    value = complex(-0.5 * float(z @ spec.A @ z), float(spec.b @ z))
    nu = spec.nu
    if len(nu):
        coefs = levy_coefficient(nu.radii, spec.alpha) * nu.weights
        s_vals = nu.directions @ z
        for c, s, rho in zip(coefs, s_vals, nu.radii):
            if s != 0.0:
                value += c * _psi(float(s), spec.alpha, spec.p, float(rho), cfg)
    return value


def char_exponents(spec: EtsSpec, grid, cfg: QuadratureConfig = DEFAULT_CONFIG) -> np.ndarray:
    """char_exponent over every point of a grid (CfGrid or (m, d) array)."""
    points = grid.points if isinstance(grid, CfGrid) else np.atleast_2d(np.asarray(grid, dtype=float))
    return np.array([char_exponent(spec, z, cfg) for z in points], dtype=complex)


def convolve(spec1: EtsSpec, spec2: EtsSpec) -> EtsSpec:
    """The ETS law of X1 + X2 for independent X1 ~ spec1, X2 ~ spec2."""
    if spec1.alpha != spec2.alpha or spec1.p != spec2.p:
        raise ParameterMismatch(f"(alpha, p) differ: ({spec1.alpha}, {spec1.p}) vs ({spec2.alpha}, {spec2.p})")
    if spec1.dimension != spec2.dimension:
        raise ParameterMismatch(f"dimensions differ: {spec1.dimension} vs {spec2.dimension}")
    return EtsSpec(spec1.alpha, spec1.p, spec1.A + spec2.A, spec1.nu + spec2.nu, spec1.b + spec2.b)


def cf_sup_distance(spec1: EtsSpec, spec2: EtsSpec, grid: CfGrid | None = None,
                    cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """max over the grid of |exp(C1(z)) - exp(C2(z))|."""
    if spec1.dimension != spec2.dimension:
        raise DimensionMismatch("specs differ in dimension")
    grid = grid if grid is not None else default_grid(spec1.dimension)
    if grid.dimension != spec1.dimension:
        raise DimensionMismatch("grid and specs differ in dimension")
    c1 = char_exponents(spec1, grid, cfg)
    c2 = char_exponents(spec2, grid, cfg)
    return float(np.max(np.abs(np.exp(c1) - np.exp(c2))))
