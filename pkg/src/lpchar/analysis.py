"""Characterisation probes: concavity scans, Hessian criteria, power-law
detectors, optimality searches and the strict power-mean gap.

The randomized counterexample search lives in :mod:`lpchar.search`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DegenerateInputError, DomainError, PreconditionError, ValidationError
from .generators import Generator, GeneratorPair, p_functional, quasi_mean
from .inequalities import InequalityReport, holder_report, reversed_holder_report
from .measure import DEFAULT_TOLERANCE, MeasureSpace, StepFunction, pointwise

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ConcavityVerdict:
    concave_on_grid: bool
    worst_violation: float
    violating_triple: tuple | None
    grid_spec: dict
    points: np.ndarray = field(repr=False, default=None)
    point_defects: np.ndarray = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "concave_on_grid": self.concave_on_grid,
            "worst_violation": self.worst_violation,
            "violating_triple": None if self.violating_triple is None else [
                list(self.violating_triple[0]), list(self.violating_triple[1]), self.violating_triple[2]
            ],
            "grid_spec": self.grid_spec,
        }

    def csv_rows(self) -> list[tuple[float, float, float]]:
        """``(s, t, worst midpoint defect over pairs through (s, t))`` per grid point."""
        return [(float(s), float(t), float(d)) for (s, t), d in zip(self.points, self.point_defects)]


@dataclass(frozen=True)
class PowerFit:
    c: float
    p: float
    max_relative_residual: float

    def to_dict(self) -> dict:
        return {"c": self.c, "p": self.p, "max_relative_residual": self.max_relative_residual}


@dataclass(frozen=True)
class OptimalityResult:
    best_exponent: float
    min_gap: float
    searched_family: str
    achieved_equality: bool
    scale: float = 1.0
    report: InequalityReport | None = None

    def to_dict(self) -> dict:
        return {
            "best_exponent": self.best_exponent,
            "min_gap": self.min_gap,
            "searched_family": self.searched_family,
            "achieved_equality": self.achieved_equality,
            "scale": self.scale,
            "note": "search restricted to power maps; failure is evidence, not proof",
        }


@dataclass(frozen=True)
class HardyReport:
    passed: bool
    indeterminate: bool
    positive: bool
    ratio_concave: bool
    worst_point: float | None
    worst_defect: float
    message: str = ""

    def to_dict(self) -> dict:
        return dict(self.__dict__)


# ---------------------------------------------------------------------------
# concavity of F(s, t) = phi^{-1}(s) psi^{-1}(t)

def product_of_inverses(pair: GeneratorPair, s, t):
    return np.asarray(pair.phi.inverse(s)) * np.asarray(pair.psi.inverse(t))


def concavity_scan(pair: GeneratorPair, s_range=(0.1, 10.0), t_range=(0.1, 10.0), steps: int = 9,
                   tol: float = DEFAULT_TOLERANCE) -> ConcavityVerdict:
    """Midpoint-concavity test of ``F(s,t) = phi^{-1}(s) psi^{-1}(t)`` over all
    pairs of points of a ``steps x steps`` grid.

    The defect of a pair ``(P, Q)`` is ``((F(P)+F(Q))/2 - F((P+Q)/2)) / scale``;
    the verdict is concave when no defect exceeds ``tol``.
    """
    if steps < 3:
        raise ValidationError("steps must be at least 3")
    (s0, s1), (t0, t1) = s_range, t_range
    if not (0 < s0 < s1 and 0 < t0 < t1):
        raise ValidationError("ranges must be positive and increasing")
    s = np.linspace(s0, s1, steps)
    t = np.linspace(t0, t1, steps)
    S, T = np.meshgrid(s, t, indexing="ij")
    pts = np.column_stack([S.ravel(), T.ravel()])
    fp = product_of_inverses(pair, pts[:, 0], pts[:, 1])
    ms = 0.5 * (pts[:, 0][:, None] + pts[:, 0][None, :])
    mt = 0.5 * (pts[:, 1][:, None] + pts[:, 1][None, :])
    fm = product_of_inverses(pair, ms, mt)
    worst, i, j, per_point = kernels.midpoint_concavity(
        np.ascontiguousarray(fp, dtype=np.float64), np.ascontiguousarray(fm, dtype=np.float64)
    )
    worst = float(worst)
    concave = worst <= tol
    triple = None
    if not concave:
        triple = (tuple(pts[i].tolist()), tuple(pts[j].tolist()), worst)
    spec = {"s_range": [s0, s1], "t_range": [t0, t1], "steps": steps, "tolerance": tol}
    return ConcavityVerdict(concave, worst, triple, spec, pts, np.asarray(per_point))


def power_hessian_det(p: float, q: float) -> float:
    """Determinant of the Hessian of ``s^(1/p) t^(1/q)`` at ``(1, 1)``:
    ``(1/(p q)) (1 - 1/p - 1/q)``."""
    if p == 0 or q == 0:
        raise DomainError("exponents must be nonzero")
    return (1.0 / (p * q)) * (1.0 - (1.0 / p + 1.0 / q))


def hessian_fd_check(p: float, q: float, point=(1.0, 1.0), h: float | None = None) -> float:
    """Central-difference Hessian determinant of ``s^(1/p) t^(1/q)`` at
    ``point``, divided by ``s^(2/p-2) t^(2/q-2)`` so it is comparable with
    :func:`power_hessian_det` at any point."""
    s, t = (float(x) for x in point)
    if s <= 0 or t <= 0:
        raise DomainError("point coordinates must be positive")
    if p == 0 or q == 0:
        raise DomainError("exponents must be nonzero")
    a, b = 1.0 / p, 1.0 / q
    if h is None:
        h = 1e-4 * min(s, t)

    def F(x, y):
        return x**a * y**b

    f0 = F(s, t)
    fss = (F(s + h, t) - 2 * f0 + F(s - h, t)) / h**2
    ftt = (F(s, t + h) - 2 * f0 + F(s, t - h)) / h**2
    fst = (F(s + h, t + h) - F(s + h, t - h) - F(s - h, t + h) + F(s - h, t - h)) / (4 * h**2)
    det = fss * ftt - fst**2
    return det / (s ** (2 * a - 2) * t ** (2 * b - 2))


# ---------------------------------------------------------------------------
# power-law detectors

def power_fit(gen: Generator, sample_grid) -> PowerFit:
    """Least-squares fit of ``log phi = log c + p log t``."""
    t = np.asarray(sample_grid, dtype=np.float64)
    if np.unique(t).size < 3:
        raise ValidationError("power fit needs at least 3 distinct grid points")
    if np.any(t <= 0):
        raise DomainError("power fit grid must be positive")
    y = np.asarray(gen(t), dtype=np.float64)
    if np.any(y <= 0):
        raise DomainError("generator vanishes on the fit grid")
    p, logc = np.polyfit(np.log(t), np.log(y), 1)
    c = math.exp(logc)
    resid = float(np.max(np.abs(c * t**p - y) / y))
    return PowerFit(float(c), float(p), resid)


def multiplicativity_check(gen: Generator, pairs) -> float:
    """Worst ``|g(xy) - g(x) g(y)| / g(xy)`` for ``g = phi / phi(1)``."""
    pairs = np.asarray(pairs, dtype=np.float64).reshape(-1, 2)
    if np.any(pairs <= 0):
        raise DomainError("multiplicativity pairs must be positive")
    one = gen(1.0)
    if one == 0:
        raise DegenerateInputError("phi(1) = 0")
    x, y = pairs[:, 0], pairs[:, 1]
    gxy = gen(x * y) / one
    defect = np.abs(gxy - (gen(x) / one) * (gen(y) / one)) / gxy
    return float(np.max(defect))


def _fd_derivatives(gen: Generator, t: np.ndarray, h0: float):
    h = np.minimum(h0 * np.maximum(t, 1.0), 0.5 * t)
    fp = gen(t + h)
    fm = gen(t - h)
    f0 = gen(t)
    d1 = (fp - fm) / (2 * h)
    d2 = (fp - 2 * f0 + fm) / h**2
    return f0, d1, d2


def hardy_condition_check(gen: Generator, grid, h: float = 1e-4, tol: float = 1e-6) -> HardyReport:
    """Finite-difference check that ``phi, phi', phi''`` are positive on the grid
    and that ``phi'/phi''`` is midpoint concave over all grid pairs.

    A numerically vanishing ``phi''`` makes the ratio meaningless; that case is
    flagged ``indeterminate`` instead of failed.
    """
    t = np.sort(np.asarray(grid, dtype=np.float64))
    if t.size < 3 or np.any(t <= 0):
        raise ValidationError("grid needs at least 3 positive points")
    f0, d1, d2 = _fd_derivatives(gen, t, h)
    flat = np.abs(d2) * t <= 1e-6 * np.abs(d1)
    if np.any(flat):
        k = int(np.argmax(flat))
        return HardyReport(False, True, bool(np.all(f0 > 0) and np.all(d1 > 0)), False, float(t[k]), 0.0,
                           "second derivative vanishes numerically")
    positive = bool(np.all(f0 > 0) and np.all(d1 > 0) and np.all(d2 > 0))
    ratio = d1 / d2
    mid = 0.5 * (t[:, None] + t[None, :])
    _, m1, m2 = _fd_derivatives(gen, mid.ravel(), h)
    ratio_mid = (m1 / m2).reshape(mid.shape)
    worst, i, j, _ = kernels.midpoint_concavity(np.ascontiguousarray(ratio), np.ascontiguousarray(ratio_mid))
    worst = float(worst)
    concave = worst <= tol
    point = float(0.5 * (t[i] + t[j])) if i >= 0 else None
    msg = "" if positive else "phi, phi' or phi'' not positive on grid"
    return HardyReport(positive and concave, False, positive, concave, point, worst, msg)


# ---------------------------------------------------------------------------
# optimality searches over power maps

def _golden_min(fn, a: float, b: float, iters: int = 100):
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if b - a <= 1e-14 * max(1.0, abs(a), abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fn(d)
    return (c, fc) if fc <= fd else (d, fd)


def _scan_then_refine(gap_of, lo: float, hi: float, steps: int):
    grid = np.linspace(lo, hi, steps)
    vals = [gap_of(r) for r in grid]
    k = int(np.argmin(vals))
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, steps - 1)]
    r, v = _golden_min(gap_of, float(a), float(b))
    if vals[k] <= v:
        r, v = float(grid[k]), vals[k]
    return float(r), float(v)


def optimality_search(pair: GeneratorPair, f: StepFunction, mu: MeasureSpace, exponent_range=(0.1, 10.0),
                      steps: int = 200, tol: float = DEFAULT_TOLERANCE) -> OptimalityResult:
    """Smallest Hoelder gap over ``g = f**r`` for ``r`` in ``exponent_range``."""
    if f.is_zero():
        raise DegenerateInputError("f is identically zero")
    lo, hi = exponent_range
    if not lo < hi or steps < 3:
        raise ValidationError("need lo < hi and at least 3 steps")

    def gap_of(r):
        return holder_report(pair, f, pointwise("power", f, r), mu, tol).gap

    r, gap = _scan_then_refine(gap_of, lo, hi, steps)
    rep = holder_report(pair, f, pointwise("power", f, r), mu, tol)
    return OptimalityResult(r, rep.gap, f"g = f**r, r in [{lo}, {hi}]", rep.is_equality, rep.scale, rep)


def reversed_optimality_search(pair: GeneratorPair, g: StepFunction, mu: MeasureSpace,
                               exponent_range=(-10.0, -0.1), steps: int = 400,
                               tol: float = DEFAULT_TOLERANCE) -> OptimalityResult:
    """Smallest reversed Hoelder gap over ``f = g**r`` on the support of ``g``."""
    if g.is_zero():
        raise DegenerateInputError("g is identically zero")
    lo, hi = exponent_range
    if not lo < hi or steps < 3:
        raise ValidationError("need lo < hi and at least 3 steps")

    def gap_of(r):
        return reversed_holder_report(pair, pointwise("power", g, r), g, mu, tol).gap

    r, _ = _scan_then_refine(gap_of, lo, hi, steps)
    rep = reversed_holder_report(pair, pointwise("power", g, r), g, mu, tol)
    return OptimalityResult(r, rep.gap, f"f = g**r on supp(g), r in [{lo}, {hi}]", rep.is_equality, rep.scale, rep)


def strict_gap_demo(p: float, p_prime: float, f: StepFunction, mu: MeasureSpace,
                    tol: float = DEFAULT_TOLERANCE) -> tuple[float, float]:
    """``(P_{t^p'}(f), P_{t^p}(f))`` for a non-constant ``f``; raises unless the
    first is strictly smaller."""
    if not p_prime < p:
        raise PreconditionError("need p_prime < p")
    if not mu.is_probabilistic():
        raise PreconditionError("mu must be probabilistic")
    if f.is_constant():
        raise PreconditionError("f must be non-constant")
    low = p_functional(Generator.power(1.0, p_prime), f, mu)
    high = p_functional(Generator.power(1.0, p), f, mu)
    if not low < high - tol * max(1.0, abs(high)):
        raise RuntimeError(f"power means not strictly ordered: {low!r} vs {high!r}")
    return low, high


def functional_equivalence_scan(gen_a: Generator, gen_b: Generator, samples, weights=(0.5, 0.5)) -> float:
    """Worst relative difference of the two-point quasi-means of ``gen_a`` and ``gen_b``."""
    worst = 0.0
    for t, u in samples:
        if t <= 0 or u <= 0:
            raise DomainError("samples must be positive")
        ma = quasi_mean(gen_a, [t, u], weights)
        mb = quasi_mean(gen_b, [t, u], weights)
        worst = max(worst, abs(ma - mb) / max(abs(ma), abs(mb)))
    return worst
