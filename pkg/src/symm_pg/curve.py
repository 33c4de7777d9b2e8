"""Closed-form boundary curves and the smooth remainder of the logarithmic kernel.

The log kernel of Symm's operator splits as

    -(1/pi) ln|g(t) - g(s)| = -(1/(2 pi)) (ln(4 sin^2((t-s)/2)) - 1) + k(t, s)

where the first term is the kernel of the disc of radius exp(-1/2) and
``k`` is C^2 for a C^3 curve. This module evaluates ``k`` including its
continuation onto the diagonal.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import CurveError, InjectivityWarning

__all__ = [
    "BoundaryCurve",
    "Disc",
    "Ellipse",
    "TrigCurve",
    "RegularityReport",
    "DiagonalLimits",
    "DIAGONAL_SWITCH_THRESHOLD",
    "REFERENCE_RADIUS",
    "eval_curve",
    "check_regularity",
    "smooth_kernel",
    "smooth_kernel_grid",
    "smooth_kernel_diagonal_derivatives",
    "curve_from_config",
]

# below this value of |2 sin((t-s)/2)| the direct log-ratio is dominated by cancellation
DIAGONAL_SWITCH_THRESHOLD = 1e-6

#: radius of the disc whose kernel is exactly the singular part (k == 0)
REFERENCE_RADIUS = float(np.exp(-0.5))

_SPEED_TOL = 1e-12
_CHECK_GRID = 1024


class BoundaryCurve:
    """A 2*pi-periodic parametrization ``s -> (a(s), b(s))`` with exact derivatives."""

    derivative_order = 3

    def derivative(self, s, order=0):
        """Return ``d^order/ds^order gamma(s)`` as an array of shape ``(2,) + shape(s)``."""
        if order not in (0, 1, 2, 3):
            raise ValueError(f"derivative order must be in 0..3, got {order!r}")
        return self._derivative(np.asarray(s, dtype=float), order)

    def _derivative(self, s, order):
        raise NotImplementedError

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Disc(BoundaryCurve):
    radius: float = REFERENCE_RADIUS

    def __post_init__(self):
        if not self.radius > 0:
            raise CurveError(f"disc radius must be positive, got {self.radius}")

    def _derivative(self, s, order):
        # d^p/ds^p (cos s, sin s) = (cos(s + p pi/2), sin(s + p pi/2))
        phase = s + order * np.pi / 2
        return self.radius * np.stack([np.cos(phase), np.sin(phase)])

    def to_config(self):
        return {"kind": "disc", "radius": self.radius}


@dataclass(frozen=True)
class Ellipse(BoundaryCurve):
    ax: float
    ay: float

    def __post_init__(self):
        if not (self.ax > 0 and self.ay > 0):
            raise CurveError(f"ellipse semi-axes must be positive, got ({self.ax}, {self.ay})")

    def _derivative(self, s, order):
        phase = s + order * np.pi / 2
        return np.stack([self.ax * np.cos(phase), self.ay * np.sin(phase)])

    def to_config(self):
        return {"kind": "ellipse", "ax": self.ax, "ay": self.ay}


def _trig_series(coeffs, s, order):
    # coeffs = [c0, c1, s1, c2, s2, ...] for c0 + sum_k (c_k cos ks + s_k sin ks)
    out = np.zeros_like(s)
    if order == 0 and len(coeffs):
        out = out + coeffs[0]
    for k in range(1, (len(coeffs) - 1) // 2 + 1):
        ck, sk = coeffs[2 * k - 1], coeffs[2 * k]
        phase = k * s + order * np.pi / 2
        out = out + k**order * (ck * np.cos(phase) + sk * np.sin(phase))
    return out


@dataclass(frozen=True)
class TrigCurve(BoundaryCurve):
    """Curve whose coordinates are finite real trigonometric series.

    Both coefficient tuples use the flat layout ``[c0, c1, s1, c2, s2, ...]``.
    """

    a_coeffs: tuple = field(default=())
    b_coeffs: tuple = field(default=())

    def __post_init__(self):
        for name in ("a_coeffs", "b_coeffs"):
            coeffs = tuple(float(c) for c in getattr(self, name))
            if len(coeffs) % 2 == 0:
                raise CurveError(f"{name} must have odd length [c0, c1, s1, ...], got {len(coeffs)}")
            object.__setattr__(self, name, coeffs)
        s = np.linspace(0.0, 2 * np.pi, _CHECK_GRID, endpoint=False)
        speed = np.hypot(*self._derivative(s, 1))
        if speed.min() <= _SPEED_TOL:
            raise CurveError(f"curve speed vanishes (min |gamma'| = {speed.min():.3e})")

    def _derivative(self, s, order):
        return np.stack([_trig_series(self.a_coeffs, s, order), _trig_series(self.b_coeffs, s, order)])

    def to_config(self):
        return {"kind": "trig", "a_coeffs": list(self.a_coeffs), "b_coeffs": list(self.b_coeffs)}


def curve_from_config(cfg: dict) -> BoundaryCurve:
    """Build a curve from ``{"kind": "disc" | "ellipse" | "trig", ...}``."""
    kind = cfg.get("kind")
    if kind == "disc":
        return Disc(float(cfg.get("radius", REFERENCE_RADIUS)))
    if kind == "ellipse":
        return Ellipse(float(cfg["ax"]), float(cfg["ay"]))
    if kind == "trig":
        return TrigCurve(tuple(cfg["a_coeffs"]), tuple(cfg["b_coeffs"]))
    raise ValueError(f"unknown curve kind {kind!r} (expected 'disc', 'ellipse' or 'trig')")


def eval_curve(curve: BoundaryCurve, s, order: int = 0) -> np.ndarray:
    return curve.derivative(s, order)


@dataclass(frozen=True)
class RegularityReport:
    min_speed: float
    injectivity_scale_ok: bool
    suggested_center: tuple


def check_regularity(curve: BoundaryCurve, grid_size: int = _CHECK_GRID) -> RegularityReport:
    """Sample speed and the unit-distance injectivity condition on a uniform grid.

    The injectivity test only looks at the area centroid, so a negative
    answer is reported through :class:`InjectivityWarning` rather than raised.
    """
    if grid_size < 64:
        raise ValueError(f"grid_size must be at least 64, got {grid_size}")
    s = np.linspace(0.0, 2 * np.pi, grid_size, endpoint=False)
    x, y = curve.derivative(s, 0)
    dx, dy = curve.derivative(s, 1)
    speed = np.hypot(dx, dy)
    min_speed = float(speed.min())
    if min_speed <= _SPEED_TOL:
        raise CurveError(f"curve speed vanishes (min |gamma'| = {min_speed:.3e})")

    # Green's theorem; the trapezoidal rule is spectrally accurate here
    cross = x * dy - y * dx
    area = 0.5 * cross.mean() * 2 * np.pi
    cx = (x * cross).mean() * 2 * np.pi / (3 * area)
    cy = (y * cross).mean() * 2 * np.pi / (3 * area)

    dist = np.hypot(x - cx, y - cy)
    ok = bool(dist.max() < 1 - 1e-12 or dist.min() > 1 + 1e-12)
    if not ok:
        warnings.warn(
            f"distances from the centroid span [{dist.min():.6g}, {dist.max():.6g}], which contains 1; "
            "injectivity is not certified at this center",
            InjectivityWarning,
            stacklevel=2,
        )
    return RegularityReport(min_speed, ok, (float(cx), float(cy)))


@dataclass(frozen=True)
class DiagonalLimits:
    k_diag: float
    k_t_limit: float
    k_tt_limit: float


def _diag_terms(curve, t):
    g1 = curve.derivative(t, 1)
    g2 = curve.derivative(t, 2)
    g3 = curve.derivative(t, 3)
    p = (g1 * g1).sum(axis=0)
    q = (g1 * g2).sum(axis=0)
    u = (g1 * g3).sum(axis=0)
    w = (g2 * g2).sum(axis=0)
    return p, q, u, w


def _diag_value(p):
    return -(np.log(p) / 2 + 0.5) / np.pi


def _diag_slope(p, q):
    return -q / (2 * np.pi * p)


def _diag_curvature(p, q, u, w):
    return -(p * p / 12 + p * (u / 3 + w / 4) - q * q / 2) / (np.pi * p * p)


def smooth_kernel_diagonal_derivatives(curve: BoundaryCurve, t) -> DiagonalLimits:
    """Limits of ``k``, ``dk/dt`` and ``d^2k/dt^2`` as ``s -> t``."""
    p, q, u, w = _diag_terms(curve, np.asarray(t, dtype=float))
    return DiagonalLimits(
        k_diag=_diag_value(p),
        k_t_limit=_diag_slope(p, q),
        k_tt_limit=_diag_curvature(p, q, u, w),
    )


def smooth_kernel(curve: BoundaryCurve, t, s):
    """Evaluate the smooth kernel ``k(t, s)``; broadcasts over ``t`` and ``s``."""
    t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
    if isinstance(curve, Disc):
        # |g(t) - g(s)| = r |2 sin((t-s)/2)| identically, so k is constant
        return np.full(t.shape, -(np.log(curve.radius) + 0.5) / np.pi)[()]

    chord = 2 * np.sin((t - s) / 2)
    far = np.abs(chord) > DIAGONAL_SWITCH_THRESHOLD
    out = np.empty(t.shape)

    tf, sf = t[far], s[far]
    diff = curve.derivative(tf, 0) - curve.derivative(sf, 0)
    dist2 = (diff * diff).sum(axis=0)
    out[far] = -np.log(dist2 / chord[far] ** 2) / (2 * np.pi) - 1 / (2 * np.pi)

    near = ~far
    if near.any():
        tn = t[near]
        h = np.angle(np.exp(1j * (s[near] - tn)))
        p, q, _, _ = _diag_terms(curve, tn)
        # k_s(t, t) equals k_t(t, t) by symmetry of k
        out[near] = _diag_value(p) + _diag_slope(p, q) * h
    return out[()]


def smooth_kernel_grid(curve: BoundaryCurve, m: int, lo: int = 0, hi: int | None = None):
    """Rows ``lo:hi`` of ``k(t_i, t_j)`` on the uniform grid ``t_j = 2 pi j / m``.

    Same values as :func:`smooth_kernel`, but the curve is sampled once per
    node and the chord is looked up by index difference.
    """
    hi = m if hi is None else hi
    t = 2 * np.pi * np.arange(m) / m
    rows = np.arange(lo, hi)
    if isinstance(curve, Disc):
        return np.full((rows.size, m), -(np.log(curve.radius) + 0.5) / np.pi)
    g = curve.derivative(t, 0)
    gx, gy = g[0], g[1]
    lag = (rows[:, None] - np.arange(m)[None, :]) % m
    chord = 2 * np.sin(np.pi * np.arange(m) / m)
    chord2 = (chord * chord)[lag]
    dist2 = (gx[rows, None] - gx[None, :]) ** 2 + (gy[rows, None] - gy[None, :]) ** 2
    near = np.abs(chord)[lag] <= DIAGONAL_SWITCH_THRESHOLD
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -np.log(dist2 / chord2) / (2 * np.pi) - 1 / (2 * np.pi)
    if near.any():
        i, j = np.nonzero(near)
        h = np.angle(np.exp(1j * (t[j] - t[rows[i]])))
        p, q, _, _ = _diag_terms(curve, t[rows[i]])
        out[i, j] = _diag_value(p) + _diag_slope(p, q) * h
    return out
