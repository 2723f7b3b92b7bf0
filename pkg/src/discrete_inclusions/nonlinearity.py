"""Piecewise polynomial nonlinearities with jump discontinuities.

A :class:`PiecewiseNonlinearity` is a finite list of breakpoints plus one
polynomial per open interval between them.  Point values on the breakpoints
are never stored, so the function is only known almost everywhere; the
essential envelopes ``g-`` / ``g+`` therefore reduce to the smaller and larger
one-sided limit at a breakpoint and to the segment value elsewhere.

Coefficients are stored in ascending order, ``c0 + c1 t + c2 t**2 + ...``.
"""

from __future__ import annotations

import bisect
import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import InconsistentDeclaration, InvalidSign, UndeclaredAsymptotics

__all__ = [
    "AsymptoticBound",
    "PiecewiseNonlinearity",
    "WeightVector",
    "constant",
    "linear",
    "truncated_power",
    "step",
    "envelope_minus",
    "envelope_plus",
    "potential",
    "sup_potential",
    "value_range",
    "asymptotic_quadratic_bound",
    "asymptotic_linear_bound",
    "tail_quadratic_limit",
    "tail_linear_limit",
    "shared",
]

_ROOT_IMAG_TOL = 1e-10


@dataclass(frozen=True)
class AsymptoticBound:
    """Declared growth at infinity.

    ``c`` bounds ``limsup G(x)/x**2``; ``linear`` (optional) bounds
    ``limsup g(t)/t``.  ``radius`` is where the declaration starts to hold.
    """

    c: Optional[float] = None
    radius: float = 1.0
    linear: Optional[float] = None

    def to_dict(self):
        out = {"c": self.c, "R": self.radius}
        if self.linear is not None:
            out["d"] = self.linear
        return out

    @classmethod
    def from_dict(cls, d):
        return cls(c=d.get("c"), radius=float(d.get("R", 1.0)), linear=d.get("d"))


@dataclass(frozen=True)
class PiecewiseNonlinearity:
    breakpoints: tuple = ()
    segments: tuple = ((0.0,),)
    asymptotic: Optional[AsymptoticBound] = None
    # antiderivative offsets per segment, filled in __post_init__
    _offsets: tuple = field(default=(), init=False, repr=False, compare=False)
    _integrals: tuple = field(default=(), init=False, repr=False, compare=False)
    _derivatives: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        segs = tuple(tuple(float(c) for c in s) if len(s) else (0.0,) for s in self.segments)
        if any(not math.isfinite(b) for b in bps):
            raise ValueError("breakpoints must be finite")
        if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise ValueError(f"breakpoints must be strictly increasing, got {bps}")
        if len(segs) != len(bps) + 1:
            raise ValueError(f"{len(bps)} breakpoints need {len(bps) + 1} segments, got {len(segs)}")
        if any(not math.isfinite(c) for s in segs for c in s):
            raise ValueError("segment coefficients must be finite")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "_integrals", tuple(P.polyint(seg) for seg in segs))
        object.__setattr__(self, "_derivatives", tuple(P.polyder(seg) for seg in segs))
        object.__setattr__(self, "_offsets", self._compute_offsets())

    # --- construction helpers -------------------------------------------------

    def _antiderivative(self, i):
        return self._integrals[i]

    def _compute_offsets(self):
        # G(t) = polyval(t, integ_i) + offset_i on segment i, with G(0) = 0
        n = len(self.segments)
        i0 = self.segment_index(0.0)
        offsets = [0.0] * n
        for i in range(i0 + 1, n):
            t = self.breakpoints[i - 1]
            offsets[i] = offsets[i - 1] + P.polyval(t, self._antiderivative(i - 1)) - P.polyval(t, self._antiderivative(i))
        for i in range(i0 - 1, -1, -1):
            t = self.breakpoints[i]
            offsets[i] = offsets[i + 1] + P.polyval(t, self._antiderivative(i + 1)) - P.polyval(t, self._antiderivative(i))
        return tuple(offsets)

    def segment_index(self, t: float) -> int:
        """Index of the segment owning ``t``; breakpoints belong to the right segment."""
        return bisect.bisect_right(self.breakpoints, t)

    def segment_bounds(self, i):
        lo = self.breakpoints[i - 1] if i > 0 else -math.inf
        hi = self.breakpoints[i] if i < len(self.breakpoints) else math.inf
        return lo, hi

    # --- pointwise evaluation ---------------------------------------------------

    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        """Value of the owning segment; vectorised over numpy arrays."""
        if np.ndim(t) == 0:
            return float(P.polyval(t, self.segments[self.segment_index(t)]))
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right")
        out = np.empty_like(t)
        for i, seg in enumerate(self.segments):
            mask = idx == i
            if mask.any():
                out[mask] = P.polyval(t[mask], seg)
        return out

    def derivative(self, t):
        """Classical derivative of the owning segment (right derivative at breakpoints)."""
        if np.ndim(t) == 0:
            return float(P.polyval(t, self._derivatives[self.segment_index(t)]))
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right")
        out = np.empty_like(t)
        for i, der in enumerate(self._derivatives):
            mask = idx == i
            if mask.any():
                out[mask] = P.polyval(t[mask], der)
        return out

    def one_sided_limits(self, t):
        i = self.segment_index(t)
        right = float(P.polyval(t, self.segments[i]))
        if i > 0 and self.breakpoints[i - 1] == t:
            left = float(P.polyval(t, self.segments[i - 1]))
        else:
            left = right
        return left, right

    def envelopes(self, t):
        """Vectorised ``(g-, g+)`` over an array of points."""
        t = np.asarray(t, dtype=float)
        right = self.eval(t)
        if not self.breakpoints:
            return right, right
        bps = np.asarray(self.breakpoints)
        idx = np.searchsorted(bps, t, side="right")
        left = right.copy()
        on_bp = (idx > 0) & (bps[np.maximum(idx - 1, 0)] == t)
        for i in np.unique(idx[on_bp]):
            mask = on_bp & (idx == i)
            left[mask] = P.polyval(t[mask], self.segments[i - 1])
        return np.minimum(left, right), np.maximum(left, right)

    def is_breakpoint(self, t) -> bool:
        i = self.segment_index(t)
        return i > 0 and self.breakpoints[i - 1] == t

    def potential(self, t):
        """``G(t) = int_0^t g``, exact and vectorised."""
        if np.ndim(t) == 0:
            i = self.segment_index(t)
            return float(P.polyval(t, self._antiderivative(i)) + self._offsets[i])
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right")
        out = np.empty_like(t)
        for i in range(len(self.segments)):
            mask = idx == i
            if mask.any():
                out[mask] = P.polyval(t[mask], self._antiderivative(i)) + self._offsets[i]
        return out

    def potential_exact(self, t) -> Fraction:
        """G(t) in exact rational arithmetic on the binary values of t and the coefficients."""
        t = Fraction(t)
        i = self.segment_index(float(t))
        return _exact_antiderivative(self.segments[i], t) + self._exact_offset(i)

    def _exact_offset(self, i):
        i0 = self.segment_index(0.0)
        off = Fraction(0)
        if i > i0:
            for j in range(i0 + 1, i + 1):
                b = Fraction(self.breakpoints[j - 1])
                off += _exact_antiderivative(self.segments[j - 1], b) - _exact_antiderivative(self.segments[j], b)
        else:
            for j in range(i0 - 1, i - 1, -1):
                b = Fraction(self.breakpoints[j])
                off += _exact_antiderivative(self.segments[j + 1], b) - _exact_antiderivative(self.segments[j], b)
        return off

    def scaled(self, factor: float) -> "PiecewiseNonlinearity":
        """``factor * g``; a declared asymptotic bound scales along."""
        asym = self.asymptotic
        if asym is not None:
            asym = AsymptoticBound(
                c=None if asym.c is None else factor * asym.c,
                radius=asym.radius,
                linear=None if asym.linear is None else factor * asym.linear,
            )
        return PiecewiseNonlinearity(
            self.breakpoints, tuple(tuple(factor * c for c in s) for s in self.segments), asym
        )

    # --- serialization -----------------------------------------------------------

    def to_dict(self):
        out = {"breakpoints": list(self.breakpoints), "segments": [list(s) for s in self.segments]}
        if self.asymptotic is not None:
            out["asymptotic"] = self.asymptotic.to_dict()
        return out

    @classmethod
    def from_dict(cls, d):
        asym = d.get("asymptotic")
        return cls(
            breakpoints=tuple(d.get("breakpoints", ())),
            segments=tuple(tuple(s) for s in d["segments"]),
            asymptotic=None if asym is None else AsymptoticBound.from_dict(asym),
        )


def _exact_antiderivative(coeffs, t: Fraction) -> Fraction:
    total = Fraction(0)
    power = t
    for j, c in enumerate(coeffs):
        total += Fraction(c) * power / (j + 1)
        power *= t
    return total


@dataclass(frozen=True)
class WeightVector:
    alpha: tuple

    def __post_init__(self):
        alpha = tuple(float(a) for a in self.alpha)
        if any(a < 0 or not math.isfinite(a) for a in alpha):
            raise InvalidSign(f"weights must be finite and nonnegative, got {alpha}")
        if not sum(alpha) > 0:
            raise InvalidSign("weights must not be identically zero")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def ones(cls, T):
        return cls((1.0,) * T)

    @property
    def total(self) -> float:
        return math.fsum(self.alpha)

    def __len__(self):
        return len(self.alpha)


# --- common shapes ---------------------------------------------------------------


def constant(value: float, asymptotic=None) -> PiecewiseNonlinearity:
    return PiecewiseNonlinearity((), ((value,),), asymptotic)


def linear(slope: float, asymptotic=None) -> PiecewiseNonlinearity:
    return PiecewiseNonlinearity((), ((0.0, slope),), asymptotic)


def truncated_power(power: int = 2, cutoff: float = 1.0, asymptotic=None) -> PiecewiseNonlinearity:
    """``t**power`` on ``(-cutoff, cutoff)`` and zero outside."""
    mono = (0.0,) * power + (1.0,)
    return PiecewiseNonlinearity((-cutoff, cutoff), ((0.0,), mono, (0.0,)), asymptotic)


def step(at: float = 0.0, low: float = 0.0, high: float = 1.0, asymptotic=None) -> PiecewiseNonlinearity:
    return PiecewiseNonlinearity((at,), ((low,), (high,)), asymptotic)


# --- operations ------------------------------------------------------------------


def envelope_minus(g: PiecewiseNonlinearity, t: float) -> float:
    return min(g.one_sided_limits(t))


def envelope_plus(g: PiecewiseNonlinearity, t: float) -> float:
    return max(g.one_sided_limits(t))


def potential(g: PiecewiseNonlinearity, t):
    return g.potential(t)


def _trim(coeffs, rel=1e-14):
    """Drop leading coefficients negligible against the largest one (they only move far roots)."""
    c = np.asarray(coeffs, dtype=float)
    big = np.max(np.abs(c)) if c.size else 0.0
    n = c.size
    while n > 1 and abs(c[n - 1]) <= rel * big:
        n -= 1
    return c[:n] if big > 0 else c[:1] * 0.0


def _real_roots_in(coeffs, lo, hi):
    """Real roots of a polynomial strictly inside (lo, hi)."""
    c = _trim(coeffs)
    if c.size <= 1:
        return []
    roots = P.polyroots(c)
    out = []
    for r in roots:
        if abs(r.imag) <= _ROOT_IMAG_TOL * max(1.0, abs(r.real)) and lo < r.real < hi:
            out.append(float(r.real))
    return out


def sup_potential(g: PiecewiseNonlinearity, gamma: float) -> float:
    """Exact ``max_{|x| <= gamma} G(x)``.

    Candidates are the endpoints, breakpoints inside the range, and real
    roots of each segment polynomial (stationary points of G).
    """
    if not gamma > 0:
        raise InvalidSign(f"gamma must be positive, got {gamma}")
    candidates = [-gamma, gamma] + [b for b in g.breakpoints if -gamma < b < gamma]
    for i, seg in enumerate(g.segments):
        lo, hi = g.segment_bounds(i)
        lo, hi = max(lo, -gamma), min(hi, gamma)
        if lo < hi:
            candidates.extend(_real_roots_in(seg, lo, hi))
    return max(g.potential(x) for x in candidates)


def value_range(g: PiecewiseNonlinearity, lo: float, hi: float) -> tuple:
    """Closed hull ``[min, max]`` of the essential values of g over ``[lo, hi]``.

    One-sided limits at breakpoints are included, so the hull contains both
    envelopes at every point of the interval.
    """
    if hi < lo:
        lo, hi = hi, lo
    values = []
    for i, seg in enumerate(g.segments):
        a, b = g.segment_bounds(i)
        a, b = max(a, lo), min(b, hi)
        if a > b:
            continue
        # a == b keeps the one-sided limit of a segment that only touches the range
        pts = [a, b] + (_real_roots_in(P.polyder(seg), a, b) if a < b else [])
        values.extend(float(v) for v in P.polyval(np.array(pts), seg))
    return min(values), max(values)


def _tail_polys(g):
    """Antiderivative polynomials (with offsets) governing G beyond the outer breakpoints."""
    left = P.polyadd(g._antiderivative(0), [g._offsets[0]])
    right = P.polyadd(g._antiderivative(len(g.segments) - 1), [g._offsets[-1]])
    return left, right


def _ratio_limit(coeffs, power, direction):
    """Limit of p(t) / t**power as t -> direction * inf."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    deg = c.size - 1
    if deg < power:
        return 0.0
    if deg == power:
        return float(c[-1])
    sign = np.sign(c[-1]) * (direction ** (deg - power))
    return math.inf if sign > 0 else -math.inf


def tail_quadratic_limit(g: PiecewiseNonlinearity) -> float:
    """Exact ``limsup_{|x|->inf} G(x)/x**2`` from the outer polynomial pieces."""
    left, right = _tail_polys(g)
    return max(_ratio_limit(left, 2, -1), _ratio_limit(right, 2, 1))


def tail_linear_limit(g: PiecewiseNonlinearity) -> float:
    """Exact ``limsup_{|t|->inf} g(t)/t`` from the outer polynomial pieces."""
    return max(_ratio_limit(g.segments[0], 1, -1), _ratio_limit(g.segments[-1], 1, 1))


def asymptotic_quadratic_bound(g: PiecewiseNonlinearity) -> float:
    """Declared bound on ``limsup G(x)/x**2`` after checking it against the exact tail limit."""
    if g.asymptotic is None or g.asymptotic.c is None:
        raise UndeclaredAsymptotics("no asymptotic bound declared for G(x)/x^2")
    c = float(g.asymptotic.c)
    exact = tail_quadratic_limit(g)
    if exact > c + 1e-9:
        raise InconsistentDeclaration(f"declared limsup G/x^2 <= {c}, but the tail limit is {exact}")
    return c


def asymptotic_linear_bound(g: PiecewiseNonlinearity) -> float:
    """Declared bound on ``limsup g(t)/t`` after checking it against the exact tail limit."""
    if g.asymptotic is None or g.asymptotic.linear is None:
        raise UndeclaredAsymptotics("no asymptotic bound declared for g(t)/t")
    d = float(g.asymptotic.linear)
    exact = tail_linear_limit(g)
    if exact > d + 1e-9:
        raise InconsistentDeclaration(f"declared limsup g/t <= {d}, but the tail limit is {exact}")
    return d


def shared(g: PiecewiseNonlinearity, T: int) -> Sequence[PiecewiseNonlinearity]:
    return [g] * T
