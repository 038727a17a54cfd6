"""Finite atomic measure spaces and non-negative step functions over them.

A measure space is a list of atom masses; a step function is one value per
atom. Product spaces are laid out row-major with the X atom as the outer
index, so ``flat = x * ny + y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SizeError, ValidationError

DEFAULT_TOLERANCE = 1e-9
ABS_TOLERANCE = 1e-12
MAX_ATOMS = 10_000_000


def is_close(a: float, b: float, rtol: float = DEFAULT_TOLERANCE, atol: float = ABS_TOLERANCE) -> bool:
    return abs(a - b) <= max(rtol * max(abs(a), abs(b)), atol)


def _frozen_array(values, what: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise ValidationError(f"{what}: must be non-empty")
    if not np.isfinite(arr).all():
        raise ValidationError(f"{what}: entries must be finite")
    if arr.min() < 0:
        raise ValidationError(f"{what}: entries must be non-negative")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class MeasureSpace:
    """Finite atomic measure space.

    ``shape`` is ``(nx, ny)`` when the space was built by :func:`product_space`.
    """

    weights: np.ndarray
    label: str | None = None
    shape: tuple[int, int] | None = None
    total_mass: float = field(init=False)

    def __post_init__(self):
        w = _frozen_array(self.weights, "weights")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "total_mass", float(math.fsum(w)))
        if self.shape is not None and self.shape[0] * self.shape[1] != w.size:
            raise ValidationError("shape does not match atom count")

    @property
    def atom_count(self) -> int:
        return int(self.weights.size)

    def is_probabilistic(self, tol: float = DEFAULT_TOLERANCE) -> bool:
        return is_close(self.total_mass, 1.0, rtol=tol)

    def same_as(self, other: "MeasureSpace") -> bool:
        return self is other or (
            self.atom_count == other.atom_count
            and self.shape == other.shape
            and np.array_equal(self.weights, other.weights)
        )

    def to_dict(self) -> dict:
        d: dict = {"weights": self.weights.tolist()}
        if self.label is not None:
            d["label"] = self.label
        if self.shape is not None:
            d["shape"] = list(self.shape)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MeasureSpace":
        if "weights" not in d:
            raise ValidationError("measure space JSON needs a 'weights' field")
        shape = tuple(d["shape"]) if d.get("shape") is not None else None
        return cls(d["weights"], label=d.get("label"), shape=shape)

    def __repr__(self):
        return f"MeasureSpace(weights={self.weights.tolist()!r}, label={self.label!r})"


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Non-negative step function: one value per atom of ``space``."""

    space: MeasureSpace
    values: np.ndarray

    def __post_init__(self):
        v = _frozen_array(self.values, "values")
        if v.size != self.space.atom_count:
            raise ValidationError(
                f"values: expected {self.space.atom_count} entries, got {v.size}"
            )
        object.__setattr__(self, "values", v)

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def is_constant(self, tol: float = DEFAULT_TOLERANCE) -> bool:
        v = self.values
        return bool(np.max(v) - np.min(v) <= tol * max(1.0, float(np.max(v))))

    def as_matrix(self) -> np.ndarray:
        """Values reshaped to ``(nx, ny)``; only for functions on product spaces."""
        if self.space.shape is None:
            raise ValidationError("function is not defined on a product space")
        return self.values.reshape(self.space.shape)

    def to_dict(self) -> dict:
        return {"space": self.space.label or "", "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, d: dict, space: MeasureSpace) -> "StepFunction":
        if "values" not in d:
            raise ValidationError("step function JSON needs a 'values' field")
        return cls(space, d["values"])

    def __repr__(self):
        return f"StepFunction(values={self.values.tolist()!r})"


@dataclass(frozen=True)
class ProductIndex:
    x_index: int
    y_index: int
    flat_index: int

    @classmethod
    def from_xy(cls, x_index: int, y_index: int, ny: int) -> "ProductIndex":
        if not 0 <= y_index < ny:
            raise ValidationError(f"y_index {y_index} out of range for {ny} atoms")
        return cls(x_index, y_index, x_index * ny + y_index)

    @classmethod
    def from_flat(cls, flat_index: int, ny: int) -> "ProductIndex":
        x, y = divmod(flat_index, ny)
        return cls(x, y, flat_index)


def make_space(weights, label: str | None = None) -> MeasureSpace:
    return MeasureSpace(weights, label=label)


def uniform_space(n: int) -> MeasureSpace:
    if n < 1:
        raise ValidationError("uniform space needs at least one atom")
    return MeasureSpace(np.full(n, 1.0 / n), label=f"uniform:{n}")


def random_space(n: int, rng: np.random.Generator, total_mass: float = 1.0) -> MeasureSpace:
    """Dirichlet(1,...,1) weights scaled to ``total_mass``."""
    if n < 1:
        raise ValidationError("random space needs at least one atom")
    w = rng.dirichlet(np.ones(n)) * total_mass
    return MeasureSpace(w)


def product_space(mu: MeasureSpace, nu: MeasureSpace) -> MeasureSpace:
    n = mu.atom_count * nu.atom_count
    if n > MAX_ATOMS:
        raise SizeError(f"product space would have {n} atoms (limit {MAX_ATOMS})")
    w = np.outer(mu.weights, nu.weights).reshape(-1)
    label = f"{mu.label or 'X'}x{nu.label or 'Y'}"
    return MeasureSpace(w, label=label, shape=(mu.atom_count, nu.atom_count))


def step(space: MeasureSpace, values) -> StepFunction:
    return StepFunction(space, values)


def _check_on(f: StepFunction, mu: MeasureSpace) -> None:
    if not f.space.same_as(mu):
        raise ValidationError("step function is not defined on the given measure space")


def integrate(f: StepFunction, mu: MeasureSpace) -> float:
    _check_on(f, mu)
    return float(np.dot(f.values, mu.weights))


def pointwise(op_kind: str, f: StepFunction, g_or_scalar) -> StepFunction:
    """Atomwise ``product``, ``sum``, ``scale`` or ``power`` of a step function."""
    if op_kind in ("product", "sum"):
        g = g_or_scalar
        if not isinstance(g, StepFunction):
            raise ValidationError(f"{op_kind} needs a step function operand")
        _check_on(g, f.space)
        vals = f.values * g.values if op_kind == "product" else f.values + g.values
    elif op_kind == "scale":
        a = float(g_or_scalar)
        if a < 0:
            raise ValidationError("scale factor must be non-negative")
        vals = a * f.values
    elif op_kind == "power":
        r = float(g_or_scalar)
        v = f.values
        if r < 0:
            # Negative powers are taken on the support only; zero stays zero.
            vals = np.zeros_like(v)
            pos = v > 0
            vals[pos] = v[pos] ** r
        elif r == 0:
            vals = np.where(v > 0, 1.0, 0.0)
        else:
            vals = v**r
    else:
        raise ValidationError(f"unknown pointwise op {op_kind!r}")
    return StepFunction(f.space, vals)


def slice_y(F: StepFunction, y_index: int) -> np.ndarray:
    """Values of ``x -> F(x, y)`` for one Y atom."""
    m = F.as_matrix()
    if not 0 <= y_index < m.shape[1]:
        raise ValidationError(f"y_index {y_index} out of range for {m.shape[1]} atoms")
    return m[:, y_index].copy()


def slice_y_function(F: StepFunction, y_index: int, mu: MeasureSpace) -> StepFunction:
    return StepFunction(mu, slice_y(F, y_index))


def partial_integral_y(F: StepFunction, nu: MeasureSpace, mu: MeasureSpace | None = None) -> StepFunction:
    """``G(x) = sum_y F(x, y) nu(y)``, returned as a step function on X.

    When ``mu`` is omitted the X factor is rebuilt from the product weights.
    """
    m = F.as_matrix()
    if m.shape[1] != nu.atom_count:
        raise ValidationError("nu does not match the Y factor of F's space")
    g = m @ nu.weights
    if mu is None:
        if nu.total_mass <= 0:
            raise ValidationError("cannot recover the X factor when nu has zero mass; pass mu")
        mu = MeasureSpace(F.space.weights.reshape(F.space.shape).sum(axis=1) / nu.total_mass)
    elif mu.atom_count != m.shape[0]:
        raise ValidationError("mu does not match the X factor of F's space")
    return StepFunction(mu, g)
