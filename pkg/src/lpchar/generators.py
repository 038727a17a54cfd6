"""Generators: increasing bijections of [0, inf) fixing 0.

A :class:`Generator` evaluates ``phi(t)`` and ``phi^{-1}(s)`` on scalars or
arrays. The built-in kinds are

* ``power``    -- ``c * t**p``. Negative ``p`` gives the extended power
  defined only on ``t > 0`` (used for the reversed Hoelder exponent ``q < 0``).
* ``expm1``    -- ``c * (exp(t) - 1)``
* ``log1p``    -- ``c * log(1 + t)``
* ``table``    -- monotone piecewise-linear interpolation through knots
  starting at ``(0, 0)``; no extrapolation past the last knot.
* ``inverse``  -- the inverse of another generator.
* ``callable`` -- an arbitrary increasing function, inverted by bisection.

On top of these sit the three derived constructions: the functional
``P_phi(f) = phi^{-1}(integral of phi o f)``, the weighted quasi-arithmetic
mean and the Mulholland sum ``phi^{-1}(phi(t1) + phi(t2))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import DomainError, RangeError, ValidationError
from .measure import DEFAULT_TOLERANCE, MeasureSpace, StepFunction

BISECT_MAX_ITER = 200
_BRACKET_LIMIT = 2.0**1000

KINDS = ("power", "expm1", "log1p", "table", "inverse", "callable")


def bisect_inverse(fn: Callable, s, upper: float = math.inf, max_iter: int = BISECT_MAX_ITER):
    """Solve ``fn(t) = s`` for increasing ``fn`` with ``fn(0) = 0``.

    The bracket starts at ``[0, 1]`` and doubles until it contains ``s``.
    Works elementwise on arrays.
    """
    s = np.asarray(s, dtype=np.float64)
    lo = np.zeros_like(s)
    hi = np.ones_like(s)
    if np.isfinite(upper):
        hi = np.minimum(hi, upper)
    grow = fn(hi) < s
    while np.any(grow):
        lo = np.where(grow, hi, lo)
        hi = np.where(grow, hi * 2.0, hi)
        if np.isfinite(upper):
            hi = np.minimum(hi, upper)
            stuck = grow & (lo >= upper)
            if np.any(stuck):
                raise RangeError(f"value {float(s[stuck].flat[0])!r} exceeds generator range")
        if np.any(hi > _BRACKET_LIMIT):
            raise RangeError("bisection bracket exceeded float range")
        grow = fn(hi) < s
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if np.all((mid == lo) | (mid == hi)):
            break
        below = fn(mid) < s
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def _as_float_array(x):
    arr = np.asarray(x, dtype=np.float64)
    return arr, arr.ndim == 0


def _extremes(arr):
    """``(min, max)`` as floats; NaN anywhere makes ``min`` NaN."""
    if arr.size == 0:
        return 0.0, 0.0
    if arr.ndim == 0:
        v = float(arr)
        return v, v
    return float(arr.min()), float(arr.max())


def _out(arr, scalar):
    return float(arr) if scalar else arr


@dataclass(frozen=True, eq=False)
class Generator:
    """Increasing bijection ``phi`` of ``[0, inf)`` (or of a bounded table range)."""

    kind: str
    scale: float = 1.0
    exponent: float | None = None
    knots_t: np.ndarray | None = None
    knots_phi: np.ndarray | None = None
    base: "Generator | None" = None
    func: Callable | None = None
    source: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown generator kind {self.kind!r}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValidationError("generator scale must be positive and finite")
        if self.kind == "power" and (self.exponent is None or self.exponent == 0 or not math.isfinite(self.exponent)):
            raise ValidationError("power exponent must be a finite nonzero real")

    # -- construction -------------------------------------------------
    @classmethod
    def power(cls, c: float = 1.0, p: float = 1.0) -> "Generator":
        return cls("power", scale=float(c), exponent=float(p))

    @classmethod
    def expm1(cls, c: float = 1.0) -> "Generator":
        return cls("expm1", scale=float(c))

    @classmethod
    def log1p(cls, c: float = 1.0) -> "Generator":
        return cls("log1p", scale=float(c))

    @classmethod
    def tabulated(cls, t, phi, source: str | None = None) -> "Generator":
        t = np.array(t, dtype=np.float64)
        phi = np.array(phi, dtype=np.float64)
        if t.ndim != 1 or t.shape != phi.shape or t.size < 2:
            raise ValidationError("table needs at least two (t, phi) knots")
        if t[0] != 0.0 or phi[0] != 0.0:
            raise ValidationError("table must start at the knot (0, 0)")
        if not (np.all(np.diff(t) > 0) and np.all(np.diff(phi) > 0)):
            raise ValidationError("table knots must be strictly increasing in t and phi")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(phi))):
            raise ValidationError("table knots must be finite")
        t.flags.writeable = False
        phi.flags.writeable = False
        return cls("table", knots_t=t, knots_phi=phi, source=source)

    @classmethod
    def from_table_file(cls, path) -> "Generator":
        try:
            data = np.loadtxt(path, delimiter=",", ndmin=2)
        except (OSError, ValueError) as exc:
            raise ValidationError(f"cannot read table {path}: {exc}") from None
        if data.shape[1] != 2:
            raise ValidationError("table file must have exactly two columns t,phi")
        return cls.tabulated(data[:, 0], data[:, 1], source=str(path))

    @classmethod
    def from_callable(cls, fn: Callable, name: str = "callable") -> "Generator":
        return cls("callable", func=fn, source=name)

    def scaled(self, lam: float) -> "Generator":
        """``lam * phi``."""
        return Generator(
            self.kind, self.scale * lam, self.exponent, self.knots_t, self.knots_phi,
            self.base, self.func, self.source,
        )

    def inverted(self) -> "Generator":
        """The inverse bijection, in closed form where one exists."""
        if self.kind == "power":
            p = self.exponent
            return Generator.power(self.scale ** (-1.0 / p), 1.0 / p)
        if self.kind == "inverse" and self.scale == 1.0:
            return self.base
        if self.kind == "table":
            return Generator.tabulated(self.knots_phi * self.scale, self.knots_t)
        return Generator("inverse", base=self)

    # -- properties ---------------------------------------------------
    @property
    def is_power(self) -> bool:
        return self.kind == "power"

    @property
    def domain_upper(self) -> float:
        if self.kind == "table":
            return float(self.knots_t[-1])
        if self.kind == "inverse":
            return self.base.range_upper
        return math.inf

    @property
    def range_upper(self) -> float:
        """Right endpoint of ``phi([0, inf))``; ``inf`` for the analytic kinds."""
        if self.kind == "table":
            return float(self.knots_phi[-1]) * self.scale
        if self.kind == "inverse":
            return self.base.domain_upper * self.scale
        return math.inf

    def spec(self) -> str:
        """Mini-language string understood by :func:`parse_generator`."""
        if self.kind == "power":
            return f"power:{self.scale!r},{self.exponent!r}"
        if self.kind in ("expm1", "log1p"):
            return self.kind if self.scale == 1.0 else f"{self.kind}:{self.scale!r}"
        if self.kind == "table":
            if self.source is None:
                return "table:<inline>"
            return f"table:{self.source}" if self.scale == 1.0 else f"scaled:{self.scale!r},table:{self.source}"
        if self.kind == "inverse":
            inner = f"inverse:{self.base.spec()}"
            return inner if self.scale == 1.0 else f"scaled:{self.scale!r},{inner}"
        return f"callable:{self.source}"

    def __repr__(self):
        return f"Generator({self.spec()})"

    # -- evaluation ---------------------------------------------------
    def __call__(self, t):
        arr, scalar = _as_float_array(t)
        lo = float(arr.min()) if arr.size else 0.0
        if math.isnan(lo):
            raise DomainError("generator argument is NaN")
        if self.kind == "power" and self.exponent < 0:
            if lo <= 0:
                raise DomainError("extended power with negative exponent is defined only for t > 0")
        elif lo < 0:
            raise DomainError(f"generator argument {lo!r} is negative")
        upper = self.domain_upper
        if upper < math.inf and arr.size and float(arr.max()) > upper:
            raise DomainError(f"generator argument {float(arr.max())!r} beyond domain end {upper!r}")
        out = self._raw(arr)
        # values are non-negative, so the max is inf or NaN exactly when something is
        if out.size and not math.isfinite(float(out.max())):
            raise RangeError("generator value overflows float64")
        return _out(out, scalar)

    def _raw(self, t):
        k = self.kind
        if k == "power":
            return self.scale * t**self.exponent
        if k == "expm1":
            with np.errstate(over="ignore"):
                return self.scale * np.expm1(t)
        if k == "log1p":
            return self.scale * np.log1p(t)
        if k == "table":
            return self.scale * np.interp(t, self.knots_t, self.knots_phi)
        if k == "inverse":
            return self.scale * np.asarray(self.base.inverse(t), dtype=np.float64)
        return self.scale * np.asarray(self.func(t), dtype=np.float64)

    def inverse(self, s):
        if type(s) is float:
            # plain floats skip the 0-d array round trip
            arr, scalar, lo, hi = s, True, s, s
        else:
            arr, scalar = _as_float_array(s)
            lo, hi = _extremes(arr)
        if math.isnan(lo):
            raise RangeError("inverse argument is NaN")
        if self.kind == "power" and self.exponent < 0:
            if lo <= 0:
                raise RangeError("extended power takes only positive values")
        elif lo < 0:
            raise RangeError(f"value {lo!r} is below the generator range")
        if hi > self.range_upper:
            raise RangeError(f"value {hi!r} exceeds generator range end {self.range_upper!r}")
        x = arr / self.scale
        k = self.kind
        if k == "power":
            try:
                out = x ** (1.0 / self.exponent)
            except OverflowError:
                raise RangeError("inverse value overflows float64") from None
        elif k == "expm1":
            out = np.log1p(x)
        elif k == "log1p":
            with np.errstate(over="ignore"):
                out = np.expm1(x)
        elif k == "table":
            out = np.interp(x, self.knots_phi, self.knots_t)
        elif k == "inverse":
            out = np.asarray(self.base(x), dtype=np.float64)
        else:
            out = bisect_inverse(lambda u: np.asarray(self.func(u), dtype=np.float64), x)
        if scalar:
            out = float(out)
            if not math.isfinite(out):
                raise RangeError("inverse value overflows float64")
            return out
        if not np.isfinite(out).all():
            raise RangeError("inverse value overflows float64")
        return out


@dataclass(frozen=True, eq=False)
class GeneratorPair:
    phi: Generator
    psi: Generator

    def to_dict(self) -> dict:
        return {"phi": self.phi.spec(), "psi": self.psi.spec()}


def power_pair(p: float, q: float, c_phi: float = 1.0, c_psi: float = 1.0) -> GeneratorPair:
    return GeneratorPair(Generator.power(c_phi, p), Generator.power(c_psi, q))


def conjugate_exponent(p: float) -> float:
    """``q`` with ``1/p + 1/q = 1``."""
    if p == 1.0:
        return math.inf
    return p / (p - 1.0)


def evaluate(gen: Generator, t):
    return gen(t)


def inverse(gen: Generator, s):
    return gen.inverse(s)


def p_functional(gen: Generator, f: StepFunction, mu: MeasureSpace) -> float:
    """``phi^{-1}(sum_i phi(f_i) mu_i)``."""
    if not f.space.same_as(mu):
        raise ValidationError("step function is not defined on the given measure space")
    return p_functional_values(gen, f.values, mu.weights)


def p_functional_values(gen: Generator, values: np.ndarray, weights: np.ndarray) -> float:
    """Array-level :func:`p_functional`, no StepFunction wrapping."""
    return gen.inverse(float(np.dot(gen(values), weights)))


def _check_weights(q: np.ndarray, tol: float) -> None:
    if q.ndim != 1 or np.any(q < 0) or not np.all(np.isfinite(q)):
        raise ValidationError("mean weights must be finite and non-negative")
    if abs(math.fsum(q) - 1.0) > tol * 10:
        raise ValidationError(f"mean weights must sum to 1 (got {math.fsum(q)!r})")


def quasi_mean(gen: Generator, a, q, tol: float = DEFAULT_TOLERANCE) -> float:
    """Weighted quasi-arithmetic mean ``phi^{-1}(sum_j q_j phi(a_j))``."""
    a = np.asarray(a, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if a.shape != q.shape:
        raise ValidationError("values and weights must have equal length")
    _check_weights(q, tol)
    if np.any(a < 0):
        raise ValidationError("mean arguments must be non-negative")
    return gen.inverse(float(np.dot(q, gen(a))))


def mulholland_sum(gen: Generator, t1: float, t2: float) -> float:
    """``phi^{-1}(phi(t1) + phi(t2))``."""
    return gen.inverse(gen(t1) + gen(t2))


def parse_generator(spec: str) -> Generator:
    """Parse ``power:<c>,<p>``, ``expm1``, ``log1p``, ``table:<path>``,
    ``inverse:<spec>`` or ``scaled:<lam>,<spec>``."""
    spec = spec.strip()
    head, _, rest = spec.partition(":")
    try:
        if head == "power":
            parts = rest.split(",")
            if len(parts) != 2:
                raise ValidationError("power spec is power:<c>,<p>")
            return Generator.power(float(parts[0]), float(parts[1]))
        if head in ("expm1", "log1p"):
            c = float(rest) if rest else 1.0
            return Generator.expm1(c) if head == "expm1" else Generator.log1p(c)
        if head == "table":
            if not rest:
                raise ValidationError("table spec needs a path")
            return Generator.from_table_file(Path(rest))
        if head == "inverse":
            return parse_generator(rest).inverted()
        if head == "scaled":
            lam, _, inner = rest.partition(",")
            return parse_generator(inner).scaled(float(lam))
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad generator spec {spec!r}: {exc}") from None
    raise ValidationError(f"unknown generator spec {spec!r}")
