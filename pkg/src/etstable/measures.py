"""Measures on the compactified punctured space and the transforms between them.

A point is stored as ``(radius, direction)`` with ``radius`` in ``(0, inf]``;
``radius == inf`` is a point on the sphere at infinity.  Every measure used
by the library is a finite :class:`AtomicMeasure`.  Three representations of
the same Levy measure are supported:

* tempering form ``(sigma, {Q_u})`` -- :class:`TemperingSpec`,
* Rosinski form ``(R, stable part)`` -- two atomic measures,
* extended Rosinski measure ``nu`` -- one atomic measure, stable mass at infinity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DivergentIntegral,
    InfiniteRadiusAtom,
    InvalidInput,
    NotPSD,
    StablePartForbidden,
)
from .special import DEFAULT_CONFIG, INF, QuadratureConfig, tempered_power_integral, tempered_radial_integral

UNIT_TOL = 1e-12
MERGE_TOL = 1e-12
PSD_TOL = 1e-10


# ---------------------------------------------------------------------------
# data model


@dataclass(frozen=True)
class DirPoint:
    radius: float
    direction: tuple[float, ...]

    def __post_init__(self):
        r = float(self.radius)
        if not r > 0 or math.isnan(r):
            raise InvalidInput(f"radius must be in (0, inf], got {self.radius}")
        u = tuple(float(c) for c in self.direction)
        if not u:
            raise InvalidInput("direction must be non-empty")
        norm = math.sqrt(sum(c * c for c in u))
        if abs(norm - 1.0) > UNIT_TOL:
            raise InvalidInput(f"direction must be a unit vector, |u| = {norm!r}")
        object.__setattr__(self, "radius", r)
        object.__setattr__(self, "direction", u)

    @classmethod
    def from_vector(cls, x) -> "DirPoint":
        x = np.asarray(x, dtype=float)
        r = float(np.linalg.norm(x))
        if r == 0:
            raise InvalidInput("the origin is not a DirPoint")
        return cls(r, tuple(_normalize(x)))

    @property
    def is_infinite(self) -> bool:
        return self.radius == INF

    @property
    def dimension(self) -> int:
        return len(self.direction)

    def vector(self) -> np.ndarray:
        if self.is_infinite:
            raise InfiniteRadiusAtom("a point at infinity has no vector in R^d")
        return self.radius * np.asarray(self.direction)


def _normalize(x: np.ndarray) -> np.ndarray:
    u = x / np.linalg.norm(x)
    # one extra pass pulls the norm to within an ulp or two of 1
    return u / math.sqrt(float(np.dot(u, u)))


class AtomicMeasure:
    """Finite weighted collection of :class:`DirPoint` atoms in dimension ``d``.

    Storage is columnar (``radii``, ``directions``, ``weights``) and read-only.
    Duplicate points are kept until :meth:`canonical` is called.
    """

    __slots__ = ("dimension", "radii", "directions", "weights")

    def __init__(self, dimension: int, atoms: Iterable[tuple[DirPoint, float]] = ()):
        if int(dimension) != dimension or dimension < 1:
            raise InvalidInput(f"dimension must be a positive integer, got {dimension}")
        atoms = list(atoms)
        radii, dirs, weights = [], [], []
        for point, w in atoms:
            if not isinstance(point, DirPoint):
                raise InvalidInput(f"expected DirPoint, got {type(point).__name__}")
            if point.dimension != dimension:
                raise DimensionMismatch(f"atom of dimension {point.dimension} in a {dimension}-d measure")
            w = float(w)
            if not (w > 0 and math.isfinite(w)):
                raise InvalidInput(f"atom weights must be positive and finite, got {w}")
            radii.append(point.radius)
            dirs.append(point.direction)
            weights.append(w)
        self._set(int(dimension), np.array(radii, dtype=float),
                  np.array(dirs, dtype=float).reshape(len(atoms), dimension),
                  np.array(weights, dtype=float))

    def _set(self, d, radii, dirs, weights):
        for arr in (radii, dirs, weights):
            arr.setflags(write=False)
        object.__setattr__(self, "dimension", d)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "weights", weights)

    def __setattr__(self, name, value):
        raise AttributeError("AtomicMeasure is immutable")

    @classmethod
    def _from_arrays(cls, d: int, radii, dirs, weights) -> "AtomicMeasure":
        # trusted internal constructor: inputs already validated
        m = object.__new__(cls)
        m._set(d, np.array(radii, dtype=float), np.array(dirs, dtype=float).reshape(-1, d),
               np.array(weights, dtype=float))
        return m

    @classmethod
    def empty(cls, dimension: int) -> "AtomicMeasure":
        return cls(dimension, ())

    @classmethod
    def from_vectors(cls, vectors, weights) -> "AtomicMeasure":
        """Atoms at finite points ``vectors[i]`` (rows) with ``weights[i]``."""
        vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
        weights = np.asarray(weights, dtype=float).ravel()
        if len(vectors) != len(weights):
            raise InvalidInput("vectors and weights differ in length")
        return cls(vectors.shape[1], [(DirPoint.from_vector(v), w) for v, w in zip(vectors, weights)])

    # -- basic queries ------------------------------------------------------

    def __len__(self) -> int:
        return len(self.weights)

    def __iter__(self) -> Iterator[tuple[DirPoint, float]]:
        for r, u, w in zip(self.radii, self.directions, self.weights):
            yield DirPoint(float(r), tuple(u)), float(w)

    def __repr__(self) -> str:
        return f"AtomicMeasure(dimension={self.dimension}, atoms={len(self)}, mass={self.total_mass:.6g})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, AtomicMeasure):
            return NotImplemented
        return (self.dimension == other.dimension and np.array_equal(self.radii, other.radii)
                and np.array_equal(self.directions, other.directions)
                and np.array_equal(self.weights, other.weights))

    __hash__ = None

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @property
    def infinite_mask(self) -> np.ndarray:
        return np.isinf(self.radii)

    def has_infinite_atoms(self) -> bool:
        return bool(self.infinite_mask.any())

    def finite_part(self) -> "AtomicMeasure":
        return self.select(~self.infinite_mask)

    def infinite_part(self) -> "AtomicMeasure":
        return self.select(self.infinite_mask)

    def select(self, mask) -> "AtomicMeasure":
        mask = np.asarray(mask, dtype=bool)
        return AtomicMeasure._from_arrays(self.dimension, self.radii[mask],
                                          self.directions[mask], self.weights[mask])

    def vectors(self) -> np.ndarray:
        """Atom locations as an ``(m, d)`` array; fails on atoms at infinity."""
        if self.has_infinite_atoms():
            raise InfiniteRadiusAtom("measure has atoms on the sphere at infinity")
        return self.radii[:, None] * self.directions

    def mass_where(self, predicate: Callable[[np.ndarray], np.ndarray]) -> float:
        """Total weight of atoms whose radius satisfies ``predicate``."""
        return float(self.weights[predicate(self.radii)].sum())

    def with_weights(self, weights) -> "AtomicMeasure":
        weights = np.asarray(weights, dtype=float)
        if weights.shape != self.weights.shape or not np.all(weights > 0):
            raise InvalidInput("replacement weights must be positive and match the atom count")
        return AtomicMeasure._from_arrays(self.dimension, self.radii, self.directions, weights)

    def with_radii(self, radii) -> "AtomicMeasure":
        radii = np.asarray(radii, dtype=float)
        if radii.shape != self.radii.shape or not np.all(radii > 0):
            raise InvalidInput("replacement radii must be positive and match the atom count")
        return AtomicMeasure._from_arrays(self.dimension, radii, self.directions, self.weights)

    def __add__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        if not isinstance(other, AtomicMeasure):
            return NotImplemented
        if other.dimension != self.dimension:
            raise DimensionMismatch(f"cannot add measures of dimension {self.dimension} and {other.dimension}")
        return AtomicMeasure._from_arrays(
            self.dimension,
            np.concatenate([self.radii, other.radii]),
            np.concatenate([self.directions, other.directions]),
            np.concatenate([self.weights, other.weights]),
        ).canonical()

    def canonical(self) -> "AtomicMeasure":
        """Merge coincident atoms and sort by radius, then direction."""
        n = len(self)
        if n == 0:
            return self
        keys = [self.directions[:, j] for j in range(self.dimension - 1, -1, -1)]
        order = np.lexsort((*keys, self.radii))
        radii, dirs, weights = [], [], []
        for i in order:
            r, u, w = self.radii[i], self.directions[i], self.weights[i]
            j = len(radii) - 1
            merged = False
            # scan back over the run of radii that are equal within tolerance
            while j >= 0 and _same_radius(radii[j], r):
                if np.max(np.abs(dirs[j] - u)) <= MERGE_TOL:
                    weights[j] += w
                    merged = True
                    break
                j -= 1
            if not merged:
                radii.append(r)
                dirs.append(u.copy())
                weights.append(w)
        return AtomicMeasure._from_arrays(self.dimension, radii, dirs, weights)


def _same_radius(a: float, b: float) -> bool:
    if a == INF or b == INF:
        return a == b
    return abs(a - b) <= MERGE_TOL * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class TemperingEntry:
    direction: tuple[float, ...]
    sigma_weight: float
    q_atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        DirPoint(1.0, self.direction)  # unit-norm check
        object.__setattr__(self, "direction", tuple(float(c) for c in self.direction))
        if not self.sigma_weight > 0:
            raise InvalidInput("sigma_weight must be positive")
        atoms = tuple((float(s), float(w)) for s, w in self.q_atoms)
        for s, w in atoms:
            if not (s >= 0 and math.isfinite(s)):
                raise InvalidInput(f"Bernstein atom location must be finite and >= 0, got {s}")
            if not w > 0:
                raise InvalidInput(f"Bernstein atom weight must be positive, got {w}")
        object.__setattr__(self, "q_atoms", atoms)

    def q(self, r: float) -> float:
        """Tempering function q(r, u) = sum_j w_j exp(-r s_j)."""
        return sum(w * math.exp(-r * s) for s, w in self.q_atoms)


@dataclass(frozen=True)
class TemperingSpec:
    dimension: int
    entries: tuple[TemperingEntry, ...]

    def __post_init__(self):
        entries = tuple(self.entries)
        for e in entries:
            if len(e.direction) != self.dimension:
                raise DimensionMismatch("tempering entry direction has the wrong dimension")
        object.__setattr__(self, "entries", entries)

    @property
    def has_stable_part(self) -> bool:
        return any(s == 0 for e in self.entries for s, _ in e.q_atoms)


@dataclass(frozen=True)
class EtsSpec:
    """ETS^p_alpha(A, nu, b): Gaussian matrix, extended Rosinski measure, shift."""

    alpha: float
    p: float
    A: np.ndarray
    nu: AtomicMeasure
    b: np.ndarray = field(default=None)

    def __post_init__(self):
        d = self.nu.dimension
        A = np.atleast_2d(np.array(self.A, dtype=float))
        b = np.zeros(d) if self.b is None else np.atleast_1d(np.array(self.b, dtype=float))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "p", float(self.p))
        problems = spec_problems(self.alpha, self.p, A, self.nu, b)
        if problems:
            exc, msg = problems[0]
            raise exc(msg)
        A.setflags(write=False)
        b.setflags(write=False)

    @property
    def dimension(self) -> int:
        return self.nu.dimension

    @classmethod
    def gaussian(cls, A, b=None, alpha: float = 0.5, p: float = 1.0) -> "EtsSpec":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        return cls(alpha, p, A, AtomicMeasure.empty(A.shape[0]), b)

    def replace(self, **changes) -> "EtsSpec":
        fields = dict(alpha=self.alpha, p=self.p, A=self.A, nu=self.nu, b=self.b)
        fields.update(changes)
        return EtsSpec(**fields)


def spec_problems(alpha, p, A, nu, b) -> list[tuple[type, str]]:
    """All invariant violations of an ETS parameterization, as (exception, message)."""
    problems = []
    if not (math.isfinite(alpha) and alpha < 2):
        problems.append((InvalidInput, f"alpha must be < 2, got {alpha}"))
    if not (math.isfinite(p) and p > 0):
        problems.append((InvalidInput, f"p must be > 0, got {p}"))
    d = nu.dimension
    if np.shape(A) != (d, d):
        problems.append((DimensionMismatch, f"A must be {d}x{d}, got shape {np.shape(A)}"))
    elif not psd_ok(A):
        problems.append((NotPSD, "A must be symmetric positive semidefinite"))
    if np.shape(b) != (d,):
        problems.append((DimensionMismatch, f"b must have length {d}, got shape {np.shape(b)}"))
    if alpha <= 0 and nu.has_infinite_atoms():
        problems.append((StablePartForbidden, "atoms at infinity require alpha in (0, 2)"))
    return problems


def psd_ok(A, tol: float = PSD_TOL) -> bool:
    A = np.asarray(A, dtype=float)
    if not np.all(np.isfinite(A)):
        return False
    if np.max(np.abs(A - A.T), initial=0.0) > tol:
        return False
    if A.size == 0:
        return True
    return bool(np.linalg.eigvalsh(0.5 * (A + A.T)).min() >= -tol)


# ---------------------------------------------------------------------------
# regime weights


def regime(alpha: float) -> str:
    if alpha < 0:
        return "negative"
    if alpha == 0:
        return "zero"
    return "stable"


def rosinski_weight(radius, alpha: float):
    """The factor |x|^2 ^ h_alpha(|x|) turning R-mass into nu-mass (vectorized)."""
    r = np.asarray(radius, dtype=float)
    if alpha > 0:
        out = np.minimum(r * r, r ** alpha)
    elif alpha == 0:
        out = np.minimum(r * r, 1.0 + np.log(np.maximum(r, 1.0)))
    else:
        out = np.minimum(r * r, 1.0)
    return out if out.ndim else float(out)


def levy_coefficient(radius, alpha: float):
    """Per unit nu-mass, the factor multiplying the scaled radial integral.

    A finite nu-atom at radius rho with weight w contributes
    ``w * rho**alpha / rosinski_weight(rho)`` times
    ``int_0^inf f(t u) t^{-1-alpha} exp(-(t/rho)^p) dt``; an atom at infinity
    contributes ``w`` times the untempered integral.
    """
    r = np.asarray(radius, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(np.isinf(r), 1.0, r ** alpha / rosinski_weight(np.where(np.isinf(r), 1.0, r), alpha))
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# operations


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    regime: str
    total_nu_mass: float
    mass_functional: float
    inner_part: float
    outer_part: float
    atom_count: int

    def to_dict(self) -> dict:
        return dict(valid=self.valid, regime=self.regime, total_nu_mass=self.total_nu_mass,
                    mass_functional=self.mass_functional, inner_part=self.inner_part,
                    outer_part=self.outer_part, atom_count=self.atom_count)


def validate_rosinski(R: AtomicMeasure, alpha: float) -> ValidationReport:
    """Integrability check for a Rosinski measure.

    Finite atomic measures are always valid; the report carries the value of
    the regime's mass functional, split into the |x| < 1 and |x| >= 1 parts.
    """
    if R.has_infinite_atoms():
        raise InfiniteRadiusAtom("a Rosinski measure cannot have atoms at infinity")
    contrib = R.weights * rosinski_weight(R.radii, alpha)
    inner = R.radii < 1
    total = float(contrib.sum())
    return ValidationReport(
        valid=bool(np.all(np.isfinite(contrib))),
        regime=regime(alpha),
        total_nu_mass=total,
        mass_functional=total,
        inner_part=float(contrib[inner].sum()),
        outer_part=float(contrib[~inner].sum()),
        atom_count=len(R),
    )


def _check_sphere(stable_part: AtomicMeasure) -> None:
    if len(stable_part) and np.max(np.abs(stable_part.radii - 1.0)) > UNIT_TOL:
        raise InvalidInput("stable part atoms must lie on the unit sphere (radius 1)")


def rosinski_to_extended(R: AtomicMeasure, stable_part: AtomicMeasure | None, alpha: float) -> AtomicMeasure:
    """Combine a Rosinski measure and a spectral stable part into nu."""
    if R.has_infinite_atoms():
        raise InfiniteRadiusAtom("a Rosinski measure cannot have atoms at infinity")
    stable_part = stable_part if stable_part is not None else AtomicMeasure.empty(R.dimension)
    if stable_part.dimension != R.dimension:
        raise DimensionMismatch("stable part and R differ in dimension")
    if len(stable_part) and alpha <= 0:
        raise StablePartForbidden(f"a stable part needs alpha in (0, 2), got {alpha}")
    _check_sphere(stable_part)
    finite = AtomicMeasure._from_arrays(R.dimension, R.radii, R.directions,
                                        R.weights * rosinski_weight(R.radii, alpha))
    at_inf = AtomicMeasure._from_arrays(R.dimension, np.full(len(stable_part), INF),
                                        stable_part.directions, stable_part.weights)
    return (finite + at_inf).canonical()


def extended_to_rosinski(nu: AtomicMeasure, alpha: float) -> tuple[AtomicMeasure, AtomicMeasure]:
    """Split nu into (R, stable part); inverse of :func:`rosinski_to_extended`."""
    inf = nu.infinite_mask
    if inf.any() and alpha <= 0:
        raise StablePartForbidden(f"atoms at infinity need alpha in (0, 2), got {alpha}")
    fin = ~inf
    R = AtomicMeasure._from_arrays(nu.dimension, nu.radii[fin], nu.directions[fin],
                                   nu.weights[fin] / rosinski_weight(nu.radii[fin], alpha))
    stable = AtomicMeasure._from_arrays(nu.dimension, np.ones(int(inf.sum())),
                                        nu.directions[inf], nu.weights[inf])
    return R.canonical(), stable.canonical()


def tempering_to_rosinski(spec: TemperingSpec, alpha: float, p: float) -> tuple[AtomicMeasure, AtomicMeasure]:
    """Map the (sigma, Q) form to (R, stable part).

    A sigma-atom (u, sigma_u) with Bernstein atom (s > 0, w) becomes an R-atom
    at radius s^{-1/p} in direction u with weight sigma_u * w * s^{alpha/p};
    an s = 0 atom becomes stable-part mass sigma_u * w.
    """
    if not p > 0:
        raise InvalidInput(f"p must be > 0, got {p}")
    d = spec.dimension
    r_atoms, s_atoms = [], []
    for e in spec.entries:
        for s, w in e.q_atoms:
            if s == 0:
                if alpha <= 0:
                    raise StablePartForbidden(f"Q_u({{0}}) > 0 needs alpha in (0, 2), got {alpha}")
                s_atoms.append((DirPoint(1.0, e.direction), e.sigma_weight * w))
            else:
                r_atoms.append((DirPoint(s ** (-1.0 / p), e.direction), e.sigma_weight * w * s ** (alpha / p)))
    return AtomicMeasure(d, r_atoms).canonical(), AtomicMeasure(d, s_atoms).canonical()


def _vanishes_near_zero(f: Callable[[np.ndarray], float], u: np.ndarray, alpha: float) -> bool:
    """Heuristic: does |f(tu)| t^{-alpha} decay as t -> 0 (so f is integrable)?"""
    t1, t2 = 1e-6, 1e-9
    v1 = abs(float(f(t1 * u))) * t1 ** (-alpha)
    v2 = abs(float(f(t2 * u))) * t2 ** (-alpha)
    return v2 == 0.0 or v2 < 0.5 * v1


def levy_integral(f: Callable[[np.ndarray], float], nu: AtomicMeasure, alpha: float, p: float,
                  cfg: QuadratureConfig = DEFAULT_CONFIG, breakpoints: Sequence[float] = ()) -> float:
    """Integral of ``f`` against the Levy measure of ETS^p_alpha with extended Rosinski measure ``nu``.

    ``f`` takes a length-d array.  ``breakpoints`` lists radii |y| at which f
    may jump (the radial quadrature is split there).  Along the ray of an atom
    at infinity the integrand decays only like t^{-1-alpha}, so f should not
    oscillate along rays far out; otherwise QuadratureFailure is likely.
    """
    if len(nu) == 0:
        return 0.0
    if nu.has_infinite_atoms() and alpha <= 0:
        raise StablePartForbidden("atoms at infinity need alpha in (0, 2)")
    coefs = levy_coefficient(nu.radii, alpha) * nu.weights
    total = 0.0
    for rho, u, c in zip(nu.radii, nu.directions, coefs):
        if alpha >= 0 and not _vanishes_near_zero(f, u, alpha):
            raise DivergentIntegral("f does not vanish near 0; its Levy integral diverges")
        pts = list(breakpoints)
        if rho != INF:
            pts.append(rho)
        total += c * tempered_radial_integral(lambda t: f(t * u), alpha, p, rho, cfg, pts)
    return float(total)


def levy_tail_mass(nu: AtomicMeasure, alpha: float, p: float, r: float,
                   cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """M({|y| > r}) for the Levy measure with extended Rosinski measure ``nu``."""
    if not r > 0:
        raise InvalidInput(f"r must be > 0, got {r}")
    total = 0.0
    for rho, w in zip(nu.radii, nu.weights):
        if rho == INF:
            if alpha <= 0:
                raise StablePartForbidden("atoms at infinity need alpha in (0, 2)")
            total += w * r ** (-alpha) / alpha
        else:
            total += w / rosinski_weight(rho, alpha) * tempered_power_integral(alpha, p, r / rho, INF, 0, cfg)
    return float(total)


# ---------------------------------------------------------------------------
# JSON


def _num(x: float):
    x = float(x)
    if x == INF:
        return "inf"
    if not math.isfinite(x):
        raise InvalidInput(f"cannot serialize {x}")
    return x


def _parse_num(v, what: str, allow_inf: bool = False) -> float:
    if isinstance(v, str):
        if allow_inf and v.strip().lower() in ("inf", "infinity", "+inf"):
            return INF
        raise InvalidInput(f"{what}: expected a number, got {v!r}")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InvalidInput(f"{what}: expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise InvalidInput(f"{what}: non-finite number")
    return v


def _parse_vector(v, what: str) -> list[float]:
    if not isinstance(v, list):
        raise InvalidInput(f"{what}: expected a list of numbers")
    return [_parse_num(c, what) for c in v]


def measure_to_json(m: AtomicMeasure) -> dict:
    return {
        "dimension": m.dimension,
        "atoms": [{"radius": _num(r), "direction": [float(c) for c in u], "weight": float(w)}
                  for r, u, w in zip(m.radii, m.directions, m.weights)],
    }


def measure_from_json(data) -> AtomicMeasure:
    if not isinstance(data, dict) or "atoms" not in data:
        raise InvalidInput("measure JSON must be an object with 'atoms'")
    atoms = data["atoms"]
    if not isinstance(atoms, list):
        raise InvalidInput("'atoms' must be a list")
    d = data.get("dimension")
    parsed = []
    for i, a in enumerate(atoms):
        if not isinstance(a, dict) or not {"radius", "direction", "weight"} <= a.keys():
            raise InvalidInput(f"atom {i}: needs radius, direction, weight")
        u = _parse_vector(a["direction"], f"atom {i} direction")
        parsed.append((DirPoint(_parse_num(a["radius"], f"atom {i} radius", allow_inf=True), u),
                       _parse_num(a["weight"], f"atom {i} weight")))
    if d is None:
        if not parsed:
            raise InvalidInput("an empty measure needs an explicit 'dimension'")
        d = parsed[0][0].dimension
    if isinstance(d, bool) or not isinstance(d, int):
        raise InvalidInput("'dimension' must be an integer")
    return AtomicMeasure(d, parsed)


def ets_to_json(spec: EtsSpec) -> dict:
    return {
        "alpha": spec.alpha,
        "p": spec.p,
        "A": [[float(c) for c in row] for row in spec.A],
        "b": [float(c) for c in spec.b],
        "nu": measure_to_json(spec.nu),
    }


def ets_fields_from_json(data) -> dict:
    """Parse EtsSpec JSON into raw fields without enforcing the spec invariants."""
    if not isinstance(data, dict):
        raise InvalidInput("spec JSON must be an object")
    missing = {"alpha", "p", "nu"} - data.keys()
    if missing:
        raise InvalidInput(f"spec JSON is missing {sorted(missing)}")
    nu = measure_from_json(data["nu"])
    d = nu.dimension
    A = data.get("A", [[0.0] * d for _ in range(d)])
    if not isinstance(A, list) or not all(isinstance(row, list) for row in A):
        raise InvalidInput("'A' must be a list of rows")
    A = np.array([_parse_vector(row, "A") for row in A], dtype=float)
    b = np.array(_parse_vector(data.get("b", [0.0] * d), "b"), dtype=float)
    return dict(alpha=_parse_num(data["alpha"], "alpha"), p=_parse_num(data["p"], "p"), A=A, nu=nu, b=b)


def ets_from_json(data) -> EtsSpec:
    return EtsSpec(**ets_fields_from_json(data))


def tempering_to_json(spec: TemperingSpec) -> dict:
    return {
        "dimension": spec.dimension,
        "entries": [{"direction": list(e.direction), "sigma_weight": e.sigma_weight,
                     "q_atoms": [{"s": s, "weight": w} for s, w in e.q_atoms]} for e in spec.entries],
    }


def tempering_from_json(data) -> TemperingSpec:
    if not isinstance(data, dict) or not isinstance(data.get("entries"), list):
        raise InvalidInput("tempering JSON must be an object with an 'entries' list")
    entries = []
    for i, e in enumerate(data["entries"]):
        if not isinstance(e, dict) or not {"direction", "sigma_weight", "q_atoms"} <= e.keys():
            raise InvalidInput(f"entry {i}: needs direction, sigma_weight, q_atoms")
        if not isinstance(e["q_atoms"], list):
            raise InvalidInput(f"entry {i}: q_atoms must be a list")
        q = [(_parse_num(a.get("s"), f"entry {i} s"), _parse_num(a.get("weight"), f"entry {i} weight"))
             for a in e["q_atoms"]]
        entries.append(TemperingEntry(tuple(_parse_vector(e["direction"], f"entry {i} direction")),
                                      _parse_num(e["sigma_weight"], f"entry {i} sigma_weight"), tuple(q)))
    d = data.get("dimension")
    if d is None:
        if not entries:
            raise InvalidInput("an empty tempering spec needs an explicit 'dimension'")
        d = len(entries[0].direction)
    return TemperingSpec(int(d), tuple(entries))
