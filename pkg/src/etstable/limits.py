"""Diagnostics for the convergence conditions of sequences of ETS laws.

Finite data cannot decide an iterated limit, so nothing here returns a
verdict.  :func:`check_limit_conditions` tabulates the three ingredients
(shift gaps, vague distances of nu_n, and A_n + H_n^eps on an (n, eps)
lattice) and callers decide what trend they expect.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidInput, ParameterMismatch
from .measures import AtomicMeasure, EtsSpec, extended_to_rosinski
from .special import DEFAULT_CONFIG, QuadratureConfig, truncated_gauss_kernel

DEFAULT_DELTA = 0.05
DEFAULT_EPSILONS = (0.5, 0.2, 0.1, 0.05, 0.02)
N_HATS = 8
TAIL_LEVELS = (1.0, 10.0, 100.0)


def h_epsilon_matrix(nu: AtomicMeasure, alpha: float, p: float, epsilon: float,
                     cfg: QuadratureConfig = DEFAULT_CONFIG) -> np.ndarray:
    """H^eps = sum over atoms with |x| < sqrt(eps) of w * u u^T * g0(eps / |x|)."""
    if not epsilon > 0:
        raise InvalidInput(f"epsilon must be > 0, got {epsilon}")
    d = nu.dimension
    H = np.zeros((d, d))
    cut = math.sqrt(epsilon)
    for r, u, w in zip(nu.radii, nu.directions, nu.weights):
        if r < cut:
            H += w * truncated_gauss_kernel(alpha, p, epsilon / r, cfg) * np.outer(u, u)
    return H


def small_ball_mass(nu: AtomicMeasure, radius: float) -> float:
    """nu(|x| < radius)."""
    return nu.mass_where(lambda r: r < radius)


# ---------------------------------------------------------------------------
# vague distance


def _hat_nodes(delta: float) -> np.ndarray:
    """Nodes in y = 1/|x|: 0, then a geometric grid ending at 1/delta."""
    top = 1.0 / delta
    return np.concatenate([[0.0], top * 2.0 ** np.arange(-(N_HATS - 1), 1)])


def _hat_values(y: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    """(N_HATS, m) values of the hats centred at nodes[0..N_HATS-1]."""
    out = np.zeros((N_HATS, len(y)))
    for k in range(N_HATS):
        c = nodes[k]
        right = nodes[k + 1]
        up = np.clip((right - y) / (right - c), 0.0, 1.0)
        if k == 0:
            out[k] = np.where(y <= c, 1.0, up)
        else:
            left = nodes[k - 1]
            down = np.clip((y - left) / (c - left), 0.0, 1.0)
            out[k] = np.where(y <= c, down, up)
    return out


def _direction_features(u: np.ndarray) -> np.ndarray:
    """Coordinate monomials of degree <= 2 on the sphere, (k, m)."""
    m, d = u.shape
    feats = [np.ones(m)]
    feats += [u[:, i] for i in range(d)]
    if d > 1:
        feats += [u[:, i] * u[:, j] for i in range(d) for j in range(i, d)]
    return np.array(feats)


def dictionary_values(nu: AtomicMeasure, delta: float) -> np.ndarray:
    """Values of every dictionary function at every atom, shape (n_functions, m).

    Functions are products of hats in 1/|x| and direction monomials; they are
    continuous on the compactified space (atoms at infinity have 1/|x| = 0)
    and vanish for |x| <= delta.
    """
    y = np.where(np.isinf(nu.radii), 0.0, 1.0 / nu.radii)
    hats = _hat_values(y, _hat_nodes(delta))
    feats = _direction_features(nu.directions)
    return (hats[:, None, :] * feats[None, :, :]).reshape(len(hats) * len(feats), len(nu))


def vague_distance(nu1: AtomicMeasure, nu2: AtomicMeasure, delta: float = DEFAULT_DELTA) -> float:
    """max over the test-function dictionary of |int f dnu1 - int f dnu2|."""
    if not delta > 0:
        raise InvalidInput(f"delta must be > 0, got {delta}")
    if nu1.dimension != nu2.dimension:
        raise DimensionMismatch("measures differ in dimension")
    i1 = dictionary_values(nu1, delta) @ nu1.weights
    i2 = dictionary_values(nu2, delta) @ nu2.weights
    return float(np.max(np.abs(i1 - i2)))


# ---------------------------------------------------------------------------
# report


def no_gauss_diagnostic(seq: Sequence[AtomicMeasure], epsilons: Sequence[float] = DEFAULT_EPSILONS) -> list[list[float]]:
    """Table of nu_n(|x| < eps), one row per sequence member."""
    return [[small_ball_mass(nu, e) for e in epsilons] for nu in seq]


def tail_functionals(nu: AtomicMeasure, alpha: float, levels: Sequence[float] = TAIL_LEVELS) -> list[float]:
    """Tail functionals of the Rosinski measure at each level N.

    alpha < 0: R(|x| > N); alpha = 0: int_{|x|>N} log|x| dR;
    alpha in (0, 2): int_{|x|>N} |x|^alpha dR (finite atoms only).
    """
    R, _ = extended_to_rosinski(nu, alpha)
    out = []
    for N in levels:
        mask = R.radii > N
        r, w = R.radii[mask], R.weights[mask]
        if alpha < 0:
            out.append(float(w.sum()))
        elif alpha == 0:
            out.append(float((w * np.log(r)).sum()))
        else:
            out.append(float((w * r ** alpha).sum()))
    return out


@dataclass
class GaussianEntry:
    epsilon: float
    n: int
    matrix: list[list[float]]
    gap: float


@dataclass
class ConvergenceReport:
    alpha: float
    p: float
    delta: float
    epsilons: list[float]
    indices: list[int]
    shift_gaps: list[float]
    vague_distances: list[float]
    gaussian_matrices: list[GaussianEntry]
    no_gauss_diagnostic: list[list[float]]
    tail_levels: list[float] = field(default_factory=lambda: list(TAIL_LEVELS))
    tail_functionals: list[list[float]] = field(default_factory=list)
    verdict_notes: str = ""

    def gap_table(self) -> list[list[float]]:
        """A-gaps arranged as [n][eps]."""
        table = {(g.n, g.epsilon): g.gap for g in self.gaussian_matrices}
        return [[table[(n, e)] for e in self.epsilons] for n in self.indices]

    def to_dict(self) -> dict:
        return asdict(self)

    def render_table(self) -> str:
        eps_cols = "".join(f"{'gapA@' + format(e, 'g'):>14}" for e in self.epsilons)
        ball_cols = "".join(f"{'nu<' + format(e, 'g'):>12}" for e in self.epsilons)
        lines = [f"{'n':>5}{'|b_n-b|':>14}{'vague':>14}{eps_cols}{ball_cols}"]
        gaps = self.gap_table()
        for i, n in enumerate(self.indices):
            row = f"{n:>5}{self.shift_gaps[i]:>14.6e}{self.vague_distances[i]:>14.6e}"
            row += "".join(f"{g:>14.6e}" for g in gaps[i])
            row += "".join(f"{m:>12.4e}" for m in self.no_gauss_diagnostic[i])
            lines.append(row)
        lines.append(self.verdict_notes)
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "shift_gap", "vague_distance"]
                   + [f"a_gap_eps_{e:g}" for e in self.epsilons]
                   + [f"small_ball_eps_{e:g}" for e in self.epsilons])
        gaps = self.gap_table()
        for i, n in enumerate(self.indices):
            w.writerow([n, repr(self.shift_gaps[i]), repr(self.vague_distances[i])]
                       + [repr(g) for g in gaps[i]] + [repr(m) for m in self.no_gauss_diagnostic[i]])
        return buf.getvalue()


def _trend(values: Sequence[float]) -> str:
    v = list(values)
    if len(v) < 2:
        return "single value"
    diffs = np.diff(v)
    if np.all(diffs == 0):
        return "constant"
    if np.all(diffs <= 0):
        return "nonincreasing"
    if np.all(diffs >= 0):
        return "nondecreasing"
    return "not monotone"


def check_limit_conditions(seq: Sequence[EtsSpec], target: EtsSpec,
                           epsilons: Sequence[float] = DEFAULT_EPSILONS, delta: float = DEFAULT_DELTA,
                           cfg: QuadratureConfig = DEFAULT_CONFIG,
                           indices: Sequence[int] | None = None) -> ConvergenceReport:
    """Tabulate shift gaps, vague distances and A_n + H_n^eps for a finite sequence."""
    if not seq:
        raise InvalidInput("the sequence is empty")
    for s in seq:
        if (s.alpha, s.p, s.dimension) != (target.alpha, target.p, target.dimension):
            raise ParameterMismatch("all specs must share (alpha, p, dimension) with the target")
    eps = [float(e) for e in epsilons]
    if not eps or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise InvalidInput("epsilons must be positive and strictly decreasing")
    if not delta > 0:
        raise InvalidInput("delta must be > 0")
    idx = list(range(1, len(seq) + 1)) if indices is None else [int(i) for i in indices]
    if len(idx) != len(seq):
        raise InvalidInput("indices and sequence differ in length")

    shift_gaps = [float(np.linalg.norm(s.b - target.b)) for s in seq]
    vague = [vague_distance(s.nu, target.nu, delta) for s in seq]
    entries = []
    for n, s in zip(idx, seq):
        for e in eps:
            M = s.A + h_epsilon_matrix(s.nu, s.alpha, s.p, e, cfg)
            entries.append(GaussianEntry(e, n, M.tolist(), float(np.linalg.norm(M - target.A))))
    balls = no_gauss_diagnostic([s.nu for s in seq], eps)
    tails = [tail_functionals(s.nu, s.alpha) for s in seq]

    gap_cols = [[g.gap for g in entries if g.epsilon == e] for e in eps]
    notes = [
        f"shift gaps: {_trend(shift_gaps)}",
        f"vague distances (delta={delta:g}): {_trend(vague)}",
        "A-gap over n per eps: " + ", ".join(f"{e:g}: {_trend(c)}" for e, c in zip(eps, gap_cols)),
        "small-ball mass over n per eps: " + ", ".join(
            f"{e:g}: {_trend([row[j] for row in balls])}" for j, e in enumerate(eps)),
        "finite data only: trends are reported, no convergence verdict is drawn",
    ]
    return ConvergenceReport(
        alpha=target.alpha, p=target.p, delta=float(delta), epsilons=eps, indices=idx,
        shift_gaps=shift_gaps, vague_distances=vague, gaussian_matrices=entries,
        no_gauss_diagnostic=balls, tail_functionals=tails, verdict_notes="; ".join(notes),
    )
