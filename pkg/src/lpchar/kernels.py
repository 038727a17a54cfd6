"""Hot numeric kernels for power generators and grid reductions.

Each kernel exists twice: an explicit-loop version compiled with numba
``@njit`` and a vectorized numpy version. ``BACKEND`` selects which one the
public names are bound to; set ``LPCHAR_NO_NUMBA=1`` to force numpy (numba
missing has the same effect). Both versions perform the same floating point
operations in the same order where it matters for verdicts, and the test
suite checks that they agree.

All power kernels use ``phi(t) = t**p``; the generator scale cancels in the
functional ``phi^{-1}(sum w phi(f))`` so it never enters here.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("LPCHAR_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
BACKEND = "numba" if HAVE_NUMBA and not _DISABLED else "numpy"


# ---------------------------------------------------------------------------
# loop versions (compiled by numba when available)

def _loop_power_functional(values, weights, p):
    acc = 0.0
    for i in range(values.size):
        acc += weights[i] * values[i] ** p
    return acc ** (1.0 / p)


def _loop_holder_sides(f, g, w, p, q):
    lhs = 0.0
    sf = 0.0
    sg = 0.0
    for i in range(f.size):
        lhs += w[i] * f[i] * g[i]
        sf += w[i] * f[i] ** p
        sg += w[i] * g[i] ** q
    return lhs, sf ** (1.0 / p) * sg ** (1.0 / q)


def _loop_holder_sides_batch(F, G, W, p, q):
    n = F.shape[0]
    lhs = np.empty(n)
    rhs = np.empty(n)
    for k in range(n):
        a = 0.0
        sf = 0.0
        sg = 0.0
        for i in range(F.shape[1]):
            a += W[k, i] * F[k, i] * G[k, i]
            sf += W[k, i] * F[k, i] ** p
            sg += W[k, i] * G[k, i] ** q
        lhs[k] = a
        rhs[k] = sf ** (1.0 / p) * sg ** (1.0 / q)
    return lhs, rhs


def _loop_reversed_holder_sides(f, g, w, p, q):
    lhs = 0.0
    sf = 0.0
    sg = 0.0
    for i in range(f.size):
        if g[i] > 0.0:
            lhs += w[i] * f[i] * g[i]
            sf += w[i] * f[i] ** p
            sg += w[i] * g[i] ** q
    return lhs, sf ** (1.0 / p) * sg ** (1.0 / q)


def _loop_reversed_holder_sides_batch(F, G, W, p, q):
    n = F.shape[0]
    lhs = np.empty(n)
    rhs = np.empty(n)
    for k in range(n):
        a = 0.0
        sf = 0.0
        sg = 0.0
        for i in range(F.shape[1]):
            if G[k, i] > 0.0:
                a += W[k, i] * F[k, i] * G[k, i]
                sf += W[k, i] * F[k, i] ** p
                sg += W[k, i] * G[k, i] ** q
        lhs[k] = a
        rhs[k] = sf ** (1.0 / p) * sg ** (1.0 / q)
    return lhs, rhs


def _loop_gmi_sides(Fm, wx, wy, p):
    nx, ny = Fm.shape
    outer = 0.0
    for x in range(nx):
        inner = 0.0
        for y in range(ny):
            inner += Fm[x, y] * wy[y]
        outer += wx[x] * inner**p
    lhs = outer ** (1.0 / p)
    rhs = 0.0
    for y in range(ny):
        col = 0.0
        for x in range(nx):
            col += wx[x] * Fm[x, y] ** p
        rhs += wy[y] * col ** (1.0 / p)
    return lhs, rhs


def _loop_mulholland_sides_batch(quads, p):
    n = quads.shape[0]
    lhs = np.empty(n)
    rhs = np.empty(n)
    ip = 1.0 / p
    for k in range(n):
        t = quads[k, 0]
        u = quads[k, 1]
        v = quads[k, 2]
        w = quads[k, 3]
        lhs[k] = ((t + v) ** p + (u + w) ** p) ** ip
        rhs[k] = (t**p + u**p) ** ip + (v**p + w**p) ** ip
    return lhs, rhs


def _loop_midpoint_concavity(fp, fm):
    n = fp.size
    per_point = np.full(n, -np.inf)
    worst = -np.inf
    wi = -1
    wj = -1
    for i in range(n):
        for j in range(i + 1, n):
            avg = 0.5 * (fp[i] + fp[j])
            m = fm[i, j]
            scale = max(1.0, abs(m), abs(avg))
            v = (avg - m) / scale
            if v > worst:
                worst = v
                wi = i
                wj = j
            if v > per_point[i]:
                per_point[i] = v
            if v > per_point[j]:
                per_point[j] = v
    return worst, wi, wj, per_point


# ---------------------------------------------------------------------------
# numpy versions

def _np_power_functional(values, weights, p):
    return float(np.dot(weights, values**p) ** (1.0 / p))


def _np_holder_sides(f, g, w, p, q):
    lhs = float(np.dot(w, f * g))
    rhs = float(np.dot(w, f**p) ** (1.0 / p) * np.dot(w, g**q) ** (1.0 / q))
    return lhs, rhs


def _np_holder_sides_batch(F, G, W, p, q):
    lhs = np.sum(W * F * G, axis=1)
    rhs = np.sum(W * F**p, axis=1) ** (1.0 / p) * np.sum(W * G**q, axis=1) ** (1.0 / q)
    return lhs, rhs


def _np_reversed_holder_sides(f, g, w, p, q):
    m = g > 0
    fm, gm, wm = f[m], g[m], w[m]
    lhs = float(np.dot(wm, fm * gm))
    rhs = float(np.dot(wm, fm**p) ** (1.0 / p) * np.dot(wm, gm**q) ** (1.0 / q))
    return lhs, rhs


def _np_reversed_holder_sides_batch(F, G, W, p, q):
    m = G > 0
    Wm = np.where(m, W, 0.0)
    Gs = np.where(m, G, 1.0)
    lhs = np.sum(Wm * F * G, axis=1)
    rhs = np.sum(Wm * F**p, axis=1) ** (1.0 / p) * np.sum(Wm * Gs**q, axis=1) ** (1.0 / q)
    return lhs, rhs


def _np_gmi_sides(Fm, wx, wy, p):
    lhs = float(np.dot(wx, (Fm @ wy) ** p) ** (1.0 / p))
    rhs = float(np.dot(wy, (wx @ Fm**p) ** (1.0 / p)))
    return lhs, rhs


def _np_mulholland_sides_batch(quads, p):
    t, u, v, w = quads.T
    ip = 1.0 / p
    lhs = ((t + v) ** p + (u + w) ** p) ** ip
    rhs = (t**p + u**p) ** ip + (v**p + w**p) ** ip
    return lhs, rhs


def _np_midpoint_concavity(fp, fm):
    n = fp.size
    avg = 0.5 * (fp[:, None] + fp[None, :])
    scale = np.maximum(np.maximum(1.0, np.abs(fm)), np.abs(avg))
    v = (avg - fm) / scale
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    v = np.where(upper, v, -np.inf)
    if n < 2:
        return -np.inf, -1, -1, np.full(n, -np.inf)
    flat = int(np.argmax(v))
    wi, wj = divmod(flat, n)
    per_point = np.maximum(v.max(axis=1), v.max(axis=0))
    return float(v[wi, wj]), wi, wj, per_point


# ---------------------------------------------------------------------------
# binding

_NAMES = (
    "power_functional",
    "holder_sides",
    "holder_sides_batch",
    "reversed_holder_sides",
    "reversed_holder_sides_batch",
    "gmi_sides",
    "mulholland_sides_batch",
    "midpoint_concavity",
)

NUMPY_IMPL = {name: globals()[f"_np_{name}"] for name in _NAMES}
NUMBA_IMPL = {}
if HAVE_NUMBA:
    NUMBA_IMPL = {name: numba.njit(cache=True)(globals()[f"_loop_{name}"]) for name in _NAMES}

_ACTIVE = NUMBA_IMPL if BACKEND == "numba" else NUMPY_IMPL

power_functional = _ACTIVE["power_functional"]
holder_sides = _ACTIVE["holder_sides"]
holder_sides_batch = _ACTIVE["holder_sides_batch"]
reversed_holder_sides = _ACTIVE["reversed_holder_sides"]
reversed_holder_sides_batch = _ACTIVE["reversed_holder_sides_batch"]
gmi_sides = _ACTIVE["gmi_sides"]
mulholland_sides_batch = _ACTIVE["mulholland_sides_batch"]
midpoint_concavity = _ACTIVE["midpoint_concavity"]


def implementations() -> dict[str, dict]:
    """``{"numpy": {...}, "numba": {...}}`` (numba only when importable)."""
    out = {"numpy": NUMPY_IMPL}
    if HAVE_NUMBA:
        out["numba"] = NUMBA_IMPL
    return out
