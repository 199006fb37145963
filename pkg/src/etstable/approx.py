"""Finite-support approximation of ETS laws.

* :func:`discretize_extended_measure` turns any atomic nu into one with no mass
  at infinity and none near the origin,
* :func:`to_elementary_sum` splits a finitely supported nu into elementary
  components ``U x``,
* :func:`gaussian_seed_sequence` and :func:`stable_seed_sequence` build the
  tempered-stable sequences that converge to a Gaussian and to a stable law.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .charfn import char_exponent
from .errors import InfiniteRadiusAtom, InvalidInput, NotPSD, StableExponentOutOfRange
from .measures import (
    AtomicMeasure,
    DirPoint,
    EtsSpec,
    extended_to_rosinski,
    psd_ok,
    rosinski_to_extended,
)
from .special import (
    DEFAULT_CONFIG,
    INF,
    QuadratureConfig,
    centering_shift,
    levy_oscillatory_integral,
    tempered_power_integral,
)


@dataclass(frozen=True)
class ElementaryComponent:
    """``U x`` with ``U ~ ID(0, c 1_{t>0} t^{-1-alpha} e^{-t^p} dt, b_scalar)``."""

    c: float
    x: tuple[float, ...]
    b_scalar: float = 0.0

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise InvalidInput(f"c must be positive, got {self.c}")
        x = tuple(float(v) for v in self.x)
        if not x or math.sqrt(sum(v * v for v in x)) == 0:
            raise InvalidInput("x must be a nonzero vector")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "b_scalar", float(self.b_scalar))

    @property
    def norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.x))

    def to_json(self) -> dict:
        return {"c": self.c, "x": list(self.x), "b_scalar": self.b_scalar}

    @classmethod
    def from_json(cls, data) -> "ElementaryComponent":
        try:
            return cls(float(data["c"]), tuple(float(v) for v in data["x"]), float(data.get("b_scalar", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"bad elementary component: {exc}") from None


def discretize_extended_measure(nu: AtomicMeasure, n: int, alpha: float, p: float,
                                *, drop_small: bool = True) -> AtomicMeasure:
    """nu_n: atoms at infinity moved to radius 2**n, atoms below radius 1/n dropped.

    ``drop_small=False`` keeps the small atoms (used by the sampler, which
    only needs the mass at infinity pushed out).
    """
    if int(n) != n or n < 1:
        raise InvalidInput(f"n must be a positive integer, got {n}")
    if not alpha < 2 or not p > 0:
        raise InvalidInput("need alpha < 2 and p > 0")
    radii = np.where(np.isinf(nu.radii), 2.0 ** n, nu.radii)
    keep = radii >= 1.0 / n if drop_small else np.ones(len(nu), dtype=bool)
    return AtomicMeasure._from_arrays(nu.dimension, radii[keep], nu.directions[keep],
                                      nu.weights[keep]).canonical()


def to_elementary_sum(nu_finite: AtomicMeasure, alpha: float, p: float, b=None,
                      cfg: QuadratureConfig = DEFAULT_CONFIG) -> list[ElementaryComponent]:
    """One elementary component per atom of the Rosinski measure of ``nu_finite``.

    ``b_scalar`` absorbs the difference between the component's own centering
    ``t/(1+t^2)`` and the ETS centering ``t/(1+t^2|x|^2)``, so the components
    plus the global shift ``b`` (carried by the caller) reproduce the
    characteristic exponent of ETS(0, nu_finite, b) exactly.
    """
    if nu_finite.has_infinite_atoms():
        raise InfiniteRadiusAtom("discretize the measure before splitting it into components")
    if b is not None and np.shape(b) != (nu_finite.dimension,):
        raise InvalidInput("b has the wrong dimension")
    R, _ = extended_to_rosinski(nu_finite, alpha)
    comps = []
    for point, m in R:
        x = point.radius * np.asarray(point.direction)
        comps.append(ElementaryComponent(m, tuple(x), m * centering_shift(alpha, p, point.radius, cfg)))
    return comps


def elementary_char_exponent(comp: ElementaryComponent, z, alpha: float, p: float,
                             cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """log E exp(i <z, U x>) for one component."""
    w = float(np.dot(np.asarray(z, dtype=float), comp.x))
    return comp.c * levy_oscillatory_integral(w, alpha, p, 1.0, cfg) + 1j * w * comp.b_scalar


def elementary_sum_char_exponent(components, shift, z, alpha: float, p: float,
                                 cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    z = np.asarray(z, dtype=float)
    total = 1j * float(np.dot(shift, z))
    for comp in components:
        total += elementary_char_exponent(comp, z, alpha, p, cfg)
    return total


def components_to_spec(components, alpha: float, p: float, A=None, b=None) -> EtsSpec:
    """The ETS law of a sum of elementary components (b_scalar folded into b)."""
    if not components:
        raise InvalidInput("need at least one component to infer the dimension")
    d = len(components[0].x)
    xs = np.array([c.x for c in components])
    R = AtomicMeasure.from_vectors(xs, [c.c for c in components])
    shift = np.zeros(d) if b is None else np.asarray(b, dtype=float)
    # invert the centering correction applied in to_elementary_sum
    shift = shift + sum((c.b_scalar - c.c * centering_shift(alpha, p, c.norm)) * np.asarray(c.x)
                        for c in components)
    return EtsSpec(alpha, p, np.zeros((d, d)) if A is None else A,
                   rosinski_to_extended(R, None, alpha), shift)


# ---------------------------------------------------------------------------
# seed sequences


def gaussian_scale(alpha: float, p: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """c = 1 / int_0^inf r^{1-alpha} e^{-r^p} dr."""
    return 1.0 / tempered_power_integral(alpha, p, 0.0, INF, 2, cfg)


def normal_quantile_nodes(m: int) -> np.ndarray:
    """Conditional means of N(0, 1) over m equal-probability cells."""
    edges = norm.ppf(np.linspace(0.0, 1.0, m + 1))
    pdf = norm.pdf(edges)
    return m * (pdf[:-1] - pdf[1:])


def exponential_quantile_nodes(m: int) -> np.ndarray:
    """Conditional means of Exp(1) over m equal-probability cells."""
    q = np.linspace(0.0, 1.0, m + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = -np.log1p(-q[:-1])
        b = -np.log1p(-q[1:])
        ea = np.exp(-a)
        eb = np.exp(-b)
        upper = np.where(np.isinf(b), 0.0, (b + 1.0) * eb)
    return m * ((a + 1.0) * ea - upper)


DEFAULT_GAUSS_NODES = {1: 64, 2: 16, 3: 8}


def gaussian_seed_sequence(A, n: int, alpha: float, p: float, m_nodes: int | None = None,
                           cfg: QuadratureConfig = DEFAULT_CONFIG) -> EtsSpec:
    """n-th member of a tempered-stable sequence converging to N(0, A).

    R = N(0, c A) is discretized by a product of per-axis equal-mass normal
    nodes (``m_nodes`` per principal axis; by default 64, 16 and 8 in
    dimensions 1, 2 and 3), then rescaled so that
    R_n(B) = n^2 R(B / n).
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if not psd_ok(A):
        raise NotPSD("A must be symmetric positive semidefinite")
    if int(n) != n or n < 1:
        raise InvalidInput(f"n must be a positive integer, got {n}")
    if m_nodes is None:
        m_nodes = DEFAULT_GAUSS_NODES.get(A.shape[0], 8)
    if int(m_nodes) != m_nodes or m_nodes < 8:
        raise InvalidInput(f"m_nodes must be an integer >= 8, got {m_nodes}")
    d = A.shape[0]
    c = gaussian_scale(alpha, p, cfg)
    lam, vecs = np.linalg.eigh(0.5 * (A + A.T))
    axes = [k for k in range(d) if lam[k] > 1e-12 * max(1.0, lam.max())]
    if not axes:
        return EtsSpec(alpha, p, np.zeros((d, d)), AtomicMeasure.empty(d), np.zeros(d))
    nodes = normal_quantile_nodes(int(m_nodes))
    basis = np.array([math.sqrt(c * lam[k]) * vecs[:, k] for k in axes])  # (K, d)
    grids = np.meshgrid(*([nodes] * len(axes)), indexing="ij")
    coords = np.stack([g.ravel() for g in grids], axis=1)  # (m^K, K)
    points = coords @ basis
    weights = np.full(len(points), float(m_nodes) ** -len(axes))
    nonzero = np.linalg.norm(points, axis=1) > 0
    R = AtomicMeasure.from_vectors(points[nonzero] / n, weights[nonzero] * n * n)
    return EtsSpec(alpha, p, np.zeros((d, d)), rosinski_to_extended(R, None, alpha), np.zeros(d))


def stable_seed_sequence(sigma: AtomicMeasure, alpha: float, n: int, p: float, m_nodes: int = 64) -> EtsSpec:
    """n-th member of a tempered-stable sequence converging to S_alpha(sigma, 0).

    The limit's Rosinski measure has radial part e^{-t} t^{-alpha} dt per unit
    of sigma, i.e. |x|^alpha R(dx) has an Exp(1) radial law.  That law is cut
    into ``m_nodes`` equal-mass cells with a node at each conditional mean, so
    sum(weight * radius^alpha) per direction equals sigma exactly.  Then
    R_n(B) = n^{-alpha} R(n B).
    """
    if not 0 < alpha < 2:
        raise StableExponentOutOfRange(f"stable limits need alpha in (0, 2), got {alpha}")
    if int(n) != n or n < 1:
        raise InvalidInput(f"n must be a positive integer, got {n}")
    if int(m_nodes) != m_nodes or m_nodes < 1:
        raise InvalidInput(f"m_nodes must be a positive integer, got {m_nodes}")
    if sigma.has_infinite_atoms() or (len(sigma) and np.max(np.abs(sigma.radii - 1.0)) > 1e-12):
        raise InvalidInput("sigma must live on the unit sphere (radius 1)")
    nodes = exponential_quantile_nodes(int(m_nodes))
    atoms = []
    for u, s_u in zip(sigma.directions, sigma.weights):
        for r in nodes:
            atoms.append((DirPoint(r * n, tuple(u)), s_u / m_nodes * r ** (-alpha) * n ** (-alpha)))
    R = AtomicMeasure(sigma.dimension, atoms).canonical()
    d = sigma.dimension
    return EtsSpec(alpha, p, np.zeros((d, d)), rosinski_to_extended(R, None, alpha), np.zeros(d))


def stable_target(sigma: AtomicMeasure, alpha: float, p: float) -> EtsSpec:
    """S_alpha(sigma, 0) written as an ETS spec with all of nu at infinity."""
    d = sigma.dimension
    return EtsSpec(alpha, p, np.zeros((d, d)), rosinski_to_extended(AtomicMeasure.empty(d), sigma, alpha),
                   np.zeros(d))


def elementary_sum_gap(spec: EtsSpec, components, grid, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """sup over the grid of |CF(spec) - CF(Gaussian part + components + shift)|."""
    pts = grid.points if hasattr(grid, "points") else np.atleast_2d(grid)
    gap = 0.0
    for z in pts:
        gauss = -0.5 * float(z @ spec.A @ z)
        c_sum = gauss + elementary_sum_char_exponent(components, spec.b, z, spec.alpha, spec.p, cfg)
        gap = max(gap, abs(np.exp(char_exponent(spec, z, cfg)) - np.exp(c_sum)))
    return float(gap)
