"""Seeded random-restart coordinate search for inequality violations.

Coordinates are logarithms of the function values, so every candidate is
strictly positive and moves are multiplicative. Each restart draws its own
generator from ``(seed, restart_index)``; a restart is a pure function of
those two numbers, so serial and threaded runs return the same witness (the
one from the lowest restart index that finds a violation).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import LpcharError, ValidationError
from .generators import GeneratorPair, p_functional_values
from .inequalities import (
    InequalityReport,
    build_two_block,
    generalized_minkowski_report,
    holder_report,
    minkowski_triangle_report,
    mulholland_subadditivity_check,
    reversed_holder_report,
)
from .measure import DEFAULT_TOLERANCE, MeasureSpace, StepFunction, product_space, random_space

TARGETS = ("holder", "reversed-holder", "minkowski", "genmink", "mulholland")
CERTIFY_FACTOR = 10.0


@dataclass(frozen=True)
class SearchResult:
    target: str
    found: bool
    report: InequalityReport | None
    iterations: int
    restart: int | None
    seed: int
    budget: int

    @property
    def witness(self) -> dict | None:
        return None if self.report is None else self.report.witness

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "found": self.found,
            "seed": self.seed,
            "budget": self.budget,
            "iterations": self.iterations,
            "restart": self.restart,
            "report": None if self.report is None else self.report.to_dict(),
        }


def _rel(lhs: float, rhs: float, le: bool) -> float:
    gap = rhs - lhs if le else lhs - rhs
    return gap / max(1.0, abs(lhs), abs(rhs))


def _power_exponents(pair: GeneratorPair):
    if pair.phi.is_power and pair.psi.is_power:
        return pair.phi.exponent, pair.psi.exponent
    return None


class _Problem:
    """Relative-gap objective over log-coordinates plus the checker that certifies it."""

    def __init__(self, target, pair, mu, nu, two_block, direction, tol):
        self.target = target
        self.pair = pair
        self.mu = mu
        self.nu = nu
        self.two_block = two_block
        self.direction = direction
        self.tol = tol
        self.powers = _power_exponents(pair)
        n = mu.atom_count
        self.w = np.ascontiguousarray(mu.weights)
        if target in ("holder", "reversed-holder", "minkowski"):
            self.dim = 2 * n
        elif target == "mulholland":
            self.dim = 4
        elif target == "genmink":
            if nu is None:
                raise ValidationError("genmink search needs nu")
            if two_block:
                if mu.atom_count != 2 or nu.atom_count != 2 or mu.weights[0] != mu.weights[1] \
                        or nu.weights[0] != nu.weights[1]:
                    raise ValidationError("two-block search needs two equal atoms in both mu and nu")
                self.b = float(mu.weights[0])
                self.c = float(nu.weights[0])
                self.dim = 4
            else:
                self.space = product_space(mu, nu)
                self.dim = n * nu.atom_count
        else:
            raise ValidationError(f"unknown search target {target!r}")

    def gap(self, v: np.ndarray) -> float:
        """Relative gap of the target inequality at positive values ``v``."""
        phi, psi = self.pair.phi, self.pair.psi
        t = self.target
        if t in ("holder", "reversed-holder", "minkowski"):
            n = self.dim // 2
            f, g = v[:n], v[n:]
            if t == "holder":
                if self.powers:
                    lhs, rhs = kernels.holder_sides(f, g, self.w, *self.powers)
                else:
                    lhs = float(np.dot(self.w, f * g))
                    rhs = p_functional_values(phi, f, self.w) * p_functional_values(psi, g, self.w)
                return _rel(lhs, rhs, True)
            if t == "reversed-holder":
                if self.powers:
                    lhs, rhs = kernels.reversed_holder_sides(f, g, self.w, *self.powers)
                else:
                    lhs = float(np.dot(self.w, f * g))
                    rhs = p_functional_values(phi, f, self.w) * p_functional_values(psi, g, self.w)
                return _rel(lhs, rhs, False)
            lhs = p_functional_values(phi, f + g, self.w)
            rhs = p_functional_values(phi, f, self.w) + p_functional_values(phi, g, self.w)
            return _rel(lhs, rhs, True)
        le = self.direction == "forward"
        if t == "mulholland":
            tt, u, vv, w = v
            if phi.is_power:
                lhs, rhs = kernels.mulholland_sides_batch(v.reshape(1, 4), phi.exponent)
                return _rel(float(lhs[0]), float(rhs[0]), le)
            lhs = phi.inverse(phi(tt + vv) + phi(u + w))
            rhs = phi.inverse(phi(tt) + phi(u)) + phi.inverse(phi(vv) + phi(w))
            return _rel(lhs, rhs, le)
        # genmink
        if self.two_block:
            b, c = self.b, self.c
            tt, u, vv, w = v
            m = np.array([[tt, vv], [u, w]])
            wx = np.array([b, b])
            wy = np.array([c, c])
        else:
            m = v.reshape(self.mu.atom_count, self.nu.atom_count)
            wx, wy = self.w, self.nu.weights
        lhs = psi(float(np.dot(wx, phi(m @ wy))))
        rhs = float(np.dot(wy, psi(wx @ phi(m))))
        return _rel(lhs, rhs, le)

    def certify(self, v: np.ndarray) -> InequalityReport:
        """Re-evaluate ``v`` with the public checker."""
        t = self.target
        mu = self.mu
        if t in ("holder", "reversed-holder", "minkowski"):
            n = self.dim // 2
            f = StepFunction(mu, v[:n])
            g = StepFunction(mu, v[n:])
            if t == "holder":
                return holder_report(self.pair, f, g, mu, self.tol)
            if t == "reversed-holder":
                return reversed_holder_report(self.pair, f, g, mu, self.tol)
            return minkowski_triangle_report(self.pair.phi, f, g, mu, self.tol)
        if t == "mulholland":
            return mulholland_subadditivity_check(self.pair.phi, [tuple(v)], self.direction, self.tol)[0]
        if self.two_block:
            F, bmu, bnu = build_two_block(*v, b=self.b, c=self.c)
            return generalized_minkowski_report(self.pair, F, bmu, bnu, self.direction, self.tol)
        F = StepFunction(self.space, v)
        return generalized_minkowski_report(self.pair, F, mu, self.nu, self.direction, self.tol)


def _safe_gap(problem: _Problem, x: np.ndarray) -> float:
    try:
        with np.errstate(all="ignore"):
            val = problem.gap(np.exp(x))
    except LpcharError:
        return math.inf
    return val if math.isfinite(val) else math.inf


def _run_restart(problem: _Problem, seed: int, index: int, evals_allowed: int, log_bounds, init_bounds,
                 threshold: float):
    """Coordinate descent on the relative gap from one random start.

    Returns ``(best_x, best_gap, evaluations_used)``.
    """
    rng = np.random.default_rng([seed, index])
    lo, hi = log_bounds
    x = rng.uniform(init_bounds[0], init_bounds[1], problem.dim)
    best = _safe_gap(problem, x)
    used = 1
    step = 1.0
    while used < evals_allowed and step > 1e-6 and best >= threshold:
        improved = False
        for i in range(problem.dim):
            for sgn in (1.0, -1.0):
                if used >= evals_allowed:
                    break
                y = x.copy()
                y[i] = min(max(y[i] + sgn * step, lo), hi)
                if y[i] == x[i]:
                    continue
                val = _safe_gap(problem, y)
                used += 1
                if val < best:
                    x, best = y, val
                    improved = True
                    break
            if best < threshold or used >= evals_allowed:
                break
        if not improved:
            step *= 0.5
    return x, best, used


def counterexample_search(pair: GeneratorPair, mu: MeasureSpace | None = None, atoms: int = 2,
                          budget: int = 10_000, seed: int = 0, target: str = "holder",
                          nu: MeasureSpace | None = None, two_block: bool = False,
                          direction: str = "forward", tol: float = DEFAULT_TOLERANCE,
                          restart_budget: int = 500, jobs: int = 1,
                          log_bounds=(-12.0, 6.0), init_bounds=(math.log(0.1), math.log(10.0))) -> SearchResult:
    """Look for inputs on which the target inequality fails by more than
    ``10 * tol`` (relative to ``max(1, |lhs|, |rhs|)``).

    ``budget`` caps the total number of objective evaluations. When ``mu`` is
    omitted a random probabilistic space with ``atoms`` atoms is drawn from
    ``seed``. A found witness is always re-checked with the public report
    function before it is returned; absence of a violation is a normal result.
    """
    if budget < 1:
        raise ValidationError("budget must be positive")
    if target not in TARGETS:
        raise ValidationError(f"unknown target {target!r}; choose from {', '.join(TARGETS)}")
    if mu is None:
        if not 2 <= atoms <= 4:
            raise ValidationError("atoms must be between 2 and 4")
        mu = random_space(atoms, np.random.default_rng([seed, 2**31]))
    problem = _Problem(target, pair, mu, nu, two_block, direction, tol)
    threshold = -CERTIFY_FACTOR * tol
    n_restarts = max(1, math.ceil(budget / restart_budget))
    allowances = [min(restart_budget, budget - k * restart_budget) for k in range(n_restarts)]

    def run(k):
        return _run_restart(problem, seed, k, allowances[k], log_bounds, init_bounds, threshold)

    used_total = 0
    if jobs <= 1:
        outcomes = (run(k) for k in range(n_restarts))
    else:
        outcomes = _threaded(run, n_restarts, jobs)
    for k, (x, best, used) in enumerate(outcomes):
        used_total += used
        if best < threshold:
            rep = problem.certify(np.exp(x))
            if rep.gap < -CERTIFY_FACTOR * tol * rep.scale:
                return SearchResult(target, True, rep, used_total, k, seed, budget)
    return SearchResult(target, False, None, used_total, None, seed, budget)


def _threaded(run, n_restarts: int, jobs: int):
    """Yield restart outcomes in index order, computing ``jobs`` at a time."""
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        for start in range(0, n_restarts, jobs):
            batch = list(pool.map(run, range(start, min(start + jobs, n_restarts))))
            yield from batch
