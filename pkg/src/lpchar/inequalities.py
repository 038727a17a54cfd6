"""Both sides of each inequality, packaged as :class:`InequalityReport`.

Gap sign is fixed per direction so that ``holds`` is always ``gap >= -tol*scale``:
``gap = rhs - lhs`` for "lhs <= rhs" inequalities and ``lhs - rhs`` for "lhs >= rhs".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, DomainError, RangeError, ValidationError
from .generators import Generator, GeneratorPair, mulholland_sum, p_functional, p_functional_values, quasi_mean
from .measure import (
    DEFAULT_TOLERANCE,
    MeasureSpace,
    StepFunction,
    partial_integral_y,
    pointwise,
    product_space,
)

LE = "le"
GE = "ge"


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    gap: float
    holds: bool
    is_equality: bool
    witness: dict = field(default_factory=dict)
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def scale(self) -> float:
        return max(1.0, abs(self.lhs), abs(self.rhs))

    @property
    def relative_gap(self) -> float:
        return self.gap / self.scale

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "holds": self.holds,
            "is_equality": self.is_equality,
            "tolerance": self.tolerance,
            "witness": self.witness,
        }


def make_report(name: str, lhs: float, rhs: float, direction: str = LE,
                witness: dict | None = None, tol: float | None = None) -> InequalityReport:
    tol = DEFAULT_TOLERANCE if tol is None else tol
    lhs = float(lhs)
    rhs = float(rhs)
    gap = rhs - lhs if direction == LE else lhs - rhs
    scale = max(1.0, abs(lhs), abs(rhs))
    holds = gap >= -tol * scale
    is_eq = abs(gap) <= tol * scale
    return InequalityReport(name, lhs, rhs, gap, bool(holds), bool(is_eq), witness or {}, tol)


def _on(f: StepFunction, mu: MeasureSpace, what: str) -> None:
    if not f.space.same_as(mu):
        raise ValidationError(f"{what} is not defined on the given measure space")


def holder_report(pair: GeneratorPair, f: StepFunction, g: StepFunction, mu: MeasureSpace,
                  tol: float | None = None) -> InequalityReport:
    """``int f g dmu <= P_phi(f) P_psi(g)``."""
    _on(f, mu, "f")
    _on(g, mu, "g")
    lhs = float(np.dot(f.values * g.values, mu.weights))
    rhs = p_functional(pair.phi, f, mu) * p_functional(pair.psi, g, mu)
    witness = {**pair.to_dict(), "mu": mu.to_dict(), "f": f.to_dict(), "g": g.to_dict()}
    return make_report("holder", lhs, rhs, LE, witness, tol)


def reversed_holder_report(pair: GeneratorPair, f: StepFunction, g: StepFunction, mu: MeasureSpace,
                           tol: float | None = None) -> InequalityReport:
    """``int f g dmu >= P_phi(f 1_supp(g)) P_psi(g)``.

    Atoms where ``g = 0`` are dropped before ``psi`` is evaluated, so ``psi``
    may be an extended power with negative exponent.
    """
    _on(f, mu, "f")
    _on(g, mu, "g")
    if g.is_zero():
        raise DegenerateInputError("g is identically zero")
    supp = g.values > 0
    w = mu.weights[supp]
    lhs = float(np.dot(f.values * g.values, mu.weights))
    rhs = p_functional_values(pair.phi, f.values[supp], w) * p_functional_values(pair.psi, g.values[supp], w)
    witness = {**pair.to_dict(), "mu": mu.to_dict(), "f": f.to_dict(), "g": g.to_dict()}
    return make_report("reversed-holder", lhs, rhs, GE, witness, tol)


def _check_product(F: StepFunction, mu: MeasureSpace, nu: MeasureSpace) -> np.ndarray:
    if F.space.shape != (mu.atom_count, nu.atom_count):
        raise ValidationError("F is not defined on the product of mu and nu")
    if not np.allclose(F.space.weights, np.outer(mu.weights, nu.weights).reshape(-1), rtol=1e-12, atol=0):
        raise ValidationError("F's space weights differ from mu x nu")
    return F.as_matrix()


def gmi_report(p: float, F: StepFunction, mu: MeasureSpace, nu: MeasureSpace,
               tol: float | None = None) -> InequalityReport:
    """Integral Minkowski inequality for exponent ``p``.

    ``(int_X (int_Y F dnu)^p dmu)^(1/p) <= int_Y (int_X F^p dmu)^(1/p) dnu``.
    Exponents below 1 are computed and reported; the inequality may fail there.
    """
    if not (p > 0 and math.isfinite(p)):
        raise ValidationError("gmi exponent must be positive and finite")
    m = _check_product(F, mu, nu)
    G = m @ nu.weights
    lhs = float(np.dot(mu.weights, G**p)) ** (1.0 / p)
    cols = (mu.weights @ m**p) ** (1.0 / p)
    rhs = float(np.dot(nu.weights, cols))
    witness = {"p": p, "mu": mu.to_dict(), "nu": nu.to_dict(), "F": F.to_dict()}
    return make_report("gmi", lhs, rhs, LE, witness, tol)


def generalized_minkowski_report(pair: GeneratorPair, F: StepFunction, mu: MeasureSpace, nu: MeasureSpace,
                                 direction: str = "forward", tol: float | None = None) -> InequalityReport:
    """``psi{int_X phi(int_Y F dnu) dmu}  <=  int_Y psi(int_X phi o F dmu) dnu``.

    ``direction="reversed"`` asks for ``>=`` instead.
    """
    if direction not in ("forward", "reversed"):
        raise ValidationError("direction must be 'forward' or 'reversed'")
    m = _check_product(F, mu, nu)
    phi, psi = pair.phi, pair.psi
    G = partial_integral_y(F, nu, mu).values
    try:
        inner = float(np.dot(mu.weights, phi(G)))
    except (DomainError, RangeError) as exc:
        raise type(exc)(f"phi(int_Y F dnu) with int_Y F dnu up to {float(G.max())!r}: {exc}") from None
    try:
        lhs = psi(inner)
    except (DomainError, RangeError) as exc:
        raise type(exc)(f"psi at intermediate value {inner!r}: {exc}") from None
    col_integrals = mu.weights @ phi(m)
    try:
        rhs = float(np.dot(nu.weights, psi(col_integrals)))
    except (DomainError, RangeError) as exc:
        raise type(exc)(
            f"psi at intermediate values up to {float(col_integrals.max())!r}: {exc}"
        ) from None
    witness = {**pair.to_dict(), "mu": mu.to_dict(), "nu": nu.to_dict(), "F": F.to_dict(), "direction": direction}
    return make_report("genmink", lhs, rhs, LE if direction == "forward" else GE, witness, tol)


def minkowski_triangle_report(gen: Generator, f: StepFunction, g: StepFunction, mu: MeasureSpace,
                              tol: float | None = None) -> InequalityReport:
    """``P_phi(f + g) <= P_phi(f) + P_phi(g)``."""
    _on(f, mu, "f")
    _on(g, mu, "g")
    lhs = p_functional(gen, pointwise("sum", f, g), mu)
    rhs = p_functional(gen, f, mu) + p_functional(gen, g, mu)
    witness = {"gen": gen.spec(), "mu": mu.to_dict(), "f": f.to_dict(), "g": g.to_dict()}
    return make_report("minkowski", lhs, rhs, LE, witness, tol)


def mulholland_subadditivity_check(gen: Generator, quadruples, direction: str = "forward",
                                   tol: float | None = None) -> list[InequalityReport]:
    """One report per ``(t, u, v, w)`` for ``[+](t+v, u+w) <= [+](t, u) + [+](v, w)``.

    ``direction="reversed"`` checks superadditivity instead.
    """
    if direction not in ("forward", "reversed"):
        raise ValidationError("direction must be 'forward' or 'reversed'")
    out = []
    for quad in quadruples:
        t, u, v, w = (float(x) for x in quad)
        if min(t, u, v, w) < 0:
            raise ValidationError(f"quadruple {quad!r} has a negative entry")
        lhs = mulholland_sum(gen, t + v, u + w)
        rhs = mulholland_sum(gen, t, u) + mulholland_sum(gen, v, w)
        witness = {"gen": gen.spec(), "quad": [t, u, v, w], "direction": direction}
        out.append(make_report("mulholland", lhs, rhs, LE if direction == "forward" else GE, witness, tol))
    return out


def quasi_mean_midpoint_report(gen: Generator, a, b, q, tol: float | None = None) -> InequalityReport:
    """``M_phi((a+b)/2) <= (M_phi(a) + M_phi(b)) / 2`` for one weight vector ``q``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValidationError("a and b must have equal length")
    lhs = quasi_mean(gen, 0.5 * (a + b), q)
    rhs = 0.5 * (quasi_mean(gen, a, q) + quasi_mean(gen, b, q))
    witness = {"gen": gen.spec(), "a": a.tolist(), "b": b.tolist(), "q": np.asarray(q, dtype=float).tolist()}
    return make_report("quasimean", lhs, rhs, LE, witness, tol)


def build_two_block(t: float, u: float, v: float, w: float, b: float = 0.5, c: float = 0.5):
    """Two-atom X (masses ``b``), two-atom Y (masses ``c``) and
    ``F = G`` on the first Y atom, ``F = H`` on the second, where
    ``G = (t, u)`` and ``H = (v, w)`` over the X atoms.

    Returns ``(F, mu, nu)``; ``F`` is laid out row-major, X outer.
    """
    if not 0 < b <= 1:
        raise ValidationError("b must lie in (0, 1]")
    if not c > 0:
        raise ValidationError("c must be positive")
    mu = MeasureSpace([b, b], label="X")
    nu = MeasureSpace([c, c], label="Y")
    F = StepFunction(product_space(mu, nu), [t, v, u, w])
    return F, mu, nu


__all__ = [
    "InequalityReport",
    "build_two_block",
    "generalized_minkowski_report",
    "gmi_report",
    "holder_report",
    "make_report",
    "minkowski_triangle_report",
    "mulholland_subadditivity_check",
    "quasi_mean_midpoint_report",
    "reversed_holder_report",
]
