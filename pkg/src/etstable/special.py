"""Numerical kernels: tempered power integrals and the oscillatory Levy integrand.

Everything here reduces to one-dimensional integrals against the radial
kernel ``t**(-1-alpha) * exp(-(t/rho)**p)``.  Integrals are evaluated with
QUADPACK through :func:`scipy.integrate.quad`:

* algebraic endpoint singularities at 0 go through QAWS (``weight='alg'``),
* oscillatory tails on ``[a, inf)`` go through QAWF (``weight='cos'/'sin'``),
* everything else is integrated after the substitution ``t = exp(x)``.

``math.inf`` is the value used for an infinite upper limit or an untempered
(stable) atom; there are no other sentinels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

from scipy import integrate

from .errors import DivergentIntegral, InvalidInput, QuadratureFailure, StableExponentOutOfRange

INF = math.inf

# QUADPACK reports an error estimate; values within this factor of the
# requested tolerance are accepted even when ier != 0 (roundoff flags).
_ERR_SLACK = 100.0


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise InvalidInput("abs_tol and rel_tol must be positive")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise InvalidInput("max_subdivisions must be a positive integer")


DEFAULT_CONFIG = QuadratureConfig()
# QUADPACK reports some failures by returning the largest double
_OVERFLOW_SENTINEL = 1e300


def _quad(func: Callable[[float], float], a: float, b: float, cfg: QuadratureConfig,
          epsabs: float | None = None, **kwargs) -> float:
    """Thin wrapper over ``integrate.quad`` that raises on unmet tolerance."""
    epsabs = cfg.abs_tol if epsabs is None else epsabs
    out = integrate.quad(func, a, b, epsabs=epsabs, epsrel=cfg.rel_tol,
                         limit=int(cfg.max_subdivisions), full_output=1, **kwargs)
    value, err = out[0], out[1]
    if not math.isfinite(value) or abs(value) >= _OVERFLOW_SENTINEL:
        raise QuadratureFailure(f"non-finite integral on [{a}, {b}]")
    if len(out) > 3:
        target = max(epsabs, cfg.rel_tol * abs(value))
        if kwargs.get("weight") in ("cos", "sin") and b == INF:
            target = epsabs  # QAWF only honours the absolute tolerance
        if not err <= _ERR_SLACK * target:
            raise QuadratureFailure(
                f"quadrature on [{a}, {b}] did not converge: estimate {value!r}, "
                f"error {err:.3g} > target {target:.3g} ({out[3].splitlines()[0] if out[3] else ''})")
    return value


def _check_alpha_p(alpha: float, p: float) -> None:
    if not alpha < 2:
        raise InvalidInput(f"alpha must be < 2, got {alpha}")
    if not p > 0:
        raise InvalidInput(f"p must be > 0, got {p}")


def _log_power_integral(expo: float, p: float, rho: float, lo: float, hi: float,
                        cfg: QuadratureConfig) -> float:
    """``int_lo^hi t**expo * exp(-(t/rho)**p) dt`` for ``0 < lo``, via ``t = exp(x)``."""
    if rho == INF:
        # pure power; only called with expo < -1 and hi = inf
        if hi != INF or not expo < -1:
            raise InvalidInput("untempered power integral needs hi = inf and expo < -1")
        return lo ** (expo + 1) / -(expo + 1)
    lrho = math.log(rho)

    def g(x):
        y = p * (x - lrho)
        if y > 700.0:
            return 0.0
        return math.exp((expo + 1.0) * x - math.exp(y))

    xa = math.log(lo)
    xb = INF if hi == INF else math.log(hi)
    # the integrand is negligible once (t/rho)**p > 750
    x_cut = lrho + math.log(750.0) / p
    if xb > x_cut:
        xb = max(x_cut, xa)
    if xb <= xa:
        return 0.0
    # split at the peak of the integrand in log space to help the adaptive rule
    pts = []
    if expo + 1.0 > 0:
        x_peak = lrho + math.log((expo + 1.0) / p) / p
        if xa < x_peak < xb:
            pts.append(x_peak)
    edges = [xa, *pts, xb]
    return sum(_quad(g, u, v, cfg) for u, v in zip(edges[:-1], edges[1:]))


def tempered_power_integral(alpha: float, p: float, lo: float, hi: float, k: int,
                            cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Integral of ``t**(k-1-alpha) * exp(-t**p)`` over ``[lo, hi]``.

    ``hi`` may be ``math.inf``.  With ``lo = 0`` the integral converges only
    for ``k - alpha > 0``; otherwise :class:`DivergentIntegral` is raised.
    """
    _check_alpha_p(alpha, p)
    if int(k) != k or k < 0:
        raise InvalidInput(f"k must be a non-negative integer, got {k}")
    if not lo >= 0:
        raise InvalidInput(f"lo must be >= 0, got {lo}")
    if not hi > lo:
        raise InvalidInput(f"need hi > lo, got lo={lo}, hi={hi}")
    expo = k - 1.0 - alpha
    if lo == 0:
        if not k - alpha > 0:
            raise DivergentIntegral(f"t**{expo} is not integrable at 0 (k={k}, alpha={alpha})")
        mid = min(1.0, hi)
        total = _quad(lambda t: math.exp(-t ** p), 0.0, mid, cfg,
                      weight="alg", wvar=(expo, 0.0))
        if hi > mid:
            total += _log_power_integral(expo, p, 1.0, mid, hi, cfg)
        return total
    return _log_power_integral(expo, p, 1.0, lo, hi, cfg)


def truncated_gauss_kernel(alpha: float, p: float, a: float,
                           cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """g0(a) = int_0^a t**(1-alpha) exp(-t**p) dt, the scalar inside H^eps."""
    if not a >= 0:
        raise InvalidInput(f"a must be >= 0, got {a}")
    if a == 0:
        _check_alpha_p(alpha, p)
        return 0.0
    return tempered_power_integral(alpha, p, 0.0, a, 2, cfg)


def _taper(rho: float, p: float) -> Callable[[float], float]:
    if rho == INF:
        return lambda t: 1.0
    return lambda t: math.exp(-(t / rho) ** p)


def _sin_minus_x_over_cube(x: float) -> float:
    """(sin x - x) / x**3 without cancellation near 0."""
    if abs(x) < 1e-2:
        x2 = x * x
        return -1.0 / 6.0 + x2 / 120.0 - x2 * x2 / 5040.0
    return (math.sin(x) - x) / (x * x * x)


def levy_oscillatory_integral(s: float, alpha: float, p: float, rho: float = INF,
                              cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """psi(s) = int_0^inf (e^{ist} - 1 - ist/(1+t^2)) t^{-1-alpha} e^{-(t/rho)^p} dt.

    ``rho = inf`` drops the taper (an alpha-stable direction) and then needs
    ``0 < alpha < 2``.  The result satisfies psi(-s) = conj(psi(s)).
    """
    _check_alpha_p(alpha, p)
    if not rho > 0:
        raise InvalidInput(f"rho must be > 0, got {rho}")
    if rho == INF and not 0 < alpha < 2:
        raise StableExponentOutOfRange(f"untempered atom needs alpha in (0, 2), got {alpha}")
    if s == 0:
        return 0j
    w = abs(s)
    val = _psi_positive(w, alpha, p, rho, cfg)
    return val if s > 0 else val.conjugate()


_TINY_FREQUENCY = 1e-6


def _stable_psi_tiny(w: float, alpha: float, cfg: QuadratureConfig) -> complex:
    """Untempered psi for a frequency too small to resolve its oscillation.

    With t = u/w, psi(w) = w^alpha * (psi(1) + i D(w)) where
    D(w) = int u^{-alpha} (1/(1+u^2) - w^2/(w^2+u^2)) du is not oscillatory.
    """
    lw = math.log(w)

    def softplus(y):
        return y + math.log1p(math.exp(-y)) if y > 0 else math.log1p(math.exp(y))

    def g(x):
        # w^{alpha-1} u^{1-alpha} times the bracket in D, in log form so that
        # neither D (large for alpha > 1) nor w^alpha (tiny) leaves float range
        return math.exp((1.0 - alpha) * (x - lw) - softplus(2.0 * x) - softplus(2.0 * (lw - x)))

    top = 50.0
    scaled_d = sum(_quad(g, lo, hi, cfg) for lo, hi in ((lw - 50.0, lw), (lw, 0.0), (0.0, top)))
    scaled_d += math.exp((1.0 - alpha) * (top - lw) - 2.0 * top) / (1.0 + alpha)
    unit = _psi_positive(1.0, alpha, 1.0, INF, cfg)
    w_alpha = w ** alpha
    return complex(w_alpha * unit.real, w_alpha * unit.imag + w * scaled_d)


def _psi_positive(w: float, alpha: float, p: float, rho: float, cfg: QuadratureConfig) -> complex:
    if rho == INF and w < _TINY_FREQUENCY:
        return _stable_psi_tiny(w, alpha, cfg)
    # rough magnitude of psi, used to make abs_tol scale-free
    scale = min(1.0, w) * min(1.0, rho) ** max(2.0 - alpha, 0.0)
    eps = cfg.abs_tol * scale
    val = _psi_bands(w, alpha, p, rho, cfg, eps)
    # strong cancellation (small rho and w) makes the guess too loose: redo once
    target = cfg.rel_tol * abs(val)
    if eps > target > 0:
        val = _psi_bands(w, alpha, p, rho, cfg, max(target, 1e-300))
    return val


def _psi_bands(w: float, alpha: float, p: float, rho: float, cfg: QuadratureConfig, eps: float) -> complex:
    taper = _taper(rho, p)
    a = min(1.0, 1.0 / w, rho)

    def h_re(t):
        if t == 0.0:
            return -0.5 * w * w
        q = math.sin(0.5 * w * t) / t
        return -2.0 * q * q * taper(t)

    def h_im(t):
        return (w ** 3 * _sin_minus_x_over_cube(w * t) + w / (1.0 + t * t)) * taper(t)

    re = _quad(h_re, 0.0, a, cfg, epsabs=eps, weight="alg", wvar=(1.0 - alpha, 0.0))
    im = _quad(h_im, 0.0, a, cfg, epsabs=eps, weight="alg", wvar=(2.0 - alpha, 0.0))

    # middle band [a, b]: about ten oscillation periods, integrated directly
    # in log scale so a narrow taper is resolved; QAWF only takes over past b
    t_end = INF if rho == INF else rho * 750.0 ** (1.0 / p)
    b = min(a + 20.0 * math.pi / w, t_end)
    if rho == INF:
        def f(t):
            return t ** (-1.0 - alpha)
    else:
        def f(t):
            return t ** (-1.0 - alpha) * taper(t)

    # cancellation-free forms of cos(wt) - 1 and sin(wt) - wt/(1+t^2)
    def g_re(x):
        t = math.exp(x)
        q = math.sin(0.5 * w * t)
        return -2.0 * q * q * f(t) * t

    def g_im(x):
        t = math.exp(x)
        wt = w * t
        return (wt ** 3 * _sin_minus_x_over_cube(wt) + wt * t * t / (1.0 + t * t)) * f(t) * t

    xa, xb = math.log(a), math.log(b)
    # the oscillation starts near t = 1/w and the taper bites near t = rho;
    # cutting there keeps QUADPACK from stepping over either feature
    marks = [k / w for k in (0.1, 1.0, 10.0)]
    if rho != INF:
        marks += [rho * k for k in (1.0, 4.0, 16.0)]
    cuts = [xa, *sorted(math.log(m) for m in marks if a < m < b), xb]
    for u, v in zip(cuts[:-1], cuts[1:]):
        re += _quad(g_re, u, v, cfg, epsabs=eps)
        im += _quad(g_im, u, v, cfg, epsabs=eps)
    if b >= t_end:
        return complex(re, im)

    # far field [b, inf): oscillatory parts by QAWF, the rest is monotone
    if rho == INF:
        i0 = b ** (-alpha) / alpha
    else:
        i0 = rho ** (-alpha) * _log_power_integral(-1.0 - alpha, p, 1.0, b / rho, INF, cfg)

    def f1(t):
        return f(t) * t / (1.0 + t * t)

    # doubling panels up to the taper cut (or past t = 1 when there is no taper)
    edges = [b]
    stop = t_end if rho != INF else max(2.0, 2.0 * b)
    while edges[-1] < stop:
        edges.append(min(2.0 * edges[-1], stop))
    eps_panel = eps / len(edges)
    i1 = sum(_quad(f1, lo, hi, cfg, epsabs=eps_panel) for lo, hi in zip(edges[:-1], edges[1:]))
    if rho == INF:
        i1 += _quad(f1, edges[-1], INF, cfg, epsabs=eps_panel)
    eps_far = max(eps, cfg.rel_tol * abs(i0))
    if rho == INF:
        c = _quad(f, b, INF, cfg, epsabs=eps_far, weight="cos", wvar=w)
        sn = _quad(f, b, INF, cfg, epsabs=eps_far, weight="sin", wvar=w)
    else:
        # QAWF gives up (silently) once [b, t_end] holds billions of periods;
        # QAWO on the doubling panels copes with any number of them
        eps_panel = eps_far / len(edges)
        c = sn = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            c += _quad(f, lo, hi, cfg, epsabs=eps_panel, weight="cos", wvar=w)
            sn += _quad(f, lo, hi, cfg, epsabs=eps_panel, weight="sin", wvar=w)
    re += c - i0
    im += sn - w * i1
    return complex(re, im)


def cosine_bound_check(s: float, alpha: float, p: float,
                       cfg: QuadratureConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    """Both sides of the cosine bound for |s| <= 1.

    lhs = int_0^inf (cos(ts) - 1) t^{-1-alpha} e^{-t^p} dt
    rhs = -(11/24) s^2 g0(1)
    The bound asserts lhs <= rhs.
    """
    if not abs(s) <= 1:
        raise InvalidInput(f"|s| must be <= 1, got {s}")
    lhs = levy_oscillatory_integral(s, alpha, p, 1.0, cfg).real
    rhs = -11.0 / 24.0 * s * s * truncated_gauss_kernel(alpha, p, 1.0, cfg)
    return lhs, rhs


def tempered_radial_integral(f: Callable[[float], float], alpha: float, p: float,
                             rho: float = INF, cfg: QuadratureConfig = DEFAULT_CONFIG,
                             breakpoints: Iterable[float] = ()) -> float:
    """int_0^inf f(t) t^{-1-alpha} e^{-(t/rho)^p} dt for a bounded radial profile f.

    ``breakpoints`` are radii where f may be non-smooth (e.g. indicator edges);
    the integral is split there.  Callers are responsible for integrability
    at 0 (see :func:`etstable.measures.levy_integral`).
    """
    _check_alpha_p(alpha, p)
    taper = _taper(rho, p)

    def g(t):
        if t == 0.0:
            return 0.0
        v = f(t)
        if v == 0.0:
            return 0.0
        return v * t ** (-1.0 - alpha) * taper(t)

    marks = {float(b) for b in breakpoints if 0 < b < INF} | {1.0}
    if rho != INF:
        # where (t/rho)^p = 1, 4, ..., 256, so a slow taper is not one long panel
        marks |= {rho * k ** (1.0 / p) for k in (1.0, 4.0, 16.0, 64.0, 256.0)}
    cuts = sorted(marks)
    if rho != INF:
        # past this radius the taper is below e^{-750}
        cut_far = rho * 750.0 ** (1.0 / p)
        cuts = [c for c in cuts if c < cut_far]
    else:
        cut_far = INF
    edges = [0.0, *cuts, cut_far]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        # QAGS extrapolates towards a singularity at lo when [lo, hi] spans
        # many decades, so give it one decade at a time
        pieces = [lo, hi]
        if lo > 0 and hi < INF and hi > 10.0 * lo:
            decades = math.ceil(math.log10(hi / lo))
            pieces = [lo * (hi / lo) ** (k / decades) for k in range(decades)] + [hi]
        for u, v in zip(pieces[:-1], pieces[1:]):
            total += _quad(g, u, v, cfg)
    return total


def centering_shift(alpha: float, p: float, r: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """int_0^inf t (1/(1+t^2) - 1/(1+r^2 t^2)) t^{-1-alpha} e^{-t^p} dt.

    The difference between the two centerings of a jump ``t x`` with
    ``|x| = r``; it vanishes at ``r = 1``.
    """
    _check_alpha_p(alpha, p)
    if not (r > 0 and math.isfinite(r)):
        raise InvalidInput(f"r must be positive and finite, got {r}")
    if r == 1.0:
        return 0.0
    r2 = r * r

    def f(t):
        t2 = t * t
        return t * t2 * (r2 - 1.0) / ((1.0 + t2) * (1.0 + r2 * t2))

    return tempered_radial_integral(f, alpha, p, 1.0, cfg, breakpoints=(1.0 / r,))
