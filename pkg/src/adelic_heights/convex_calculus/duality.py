"""Concave Legendre transform: duals live on the compact slope interval.

The dual of a piecewise function in the catalog is piecewise again:
breakpoints of the original become affine dual pieces, affine pieces
collapse to points, and singular pieces produce power profiles
k*(center-m)**e. Dual functions are closed under addition, integrate in
closed form (with endpoint divergences classified exactly), and can be
conjugated back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from ..divisorial_core.vectors import _to_fraction
from .functions import (
    AffinePiece,
    AlphaPiece,
    ConcaveFn,
    Number,
    _num,
)
from .measures import PositiveDivergenceError

_EQ_TOL = 1e-12


@dataclass(frozen=True)
class PowerTerm:
    """coeff * (center - m) ** exponent, singular only as m -> center."""

    coeff: float
    exponent: float
    center: Number

    def value(self, m: float) -> float:
        base = float(self.center) - m
        if base == 0.0:
            if self.exponent > 0:
                return 0.0
            if self.exponent == 0:
                return self.coeff
            return -math.inf if self.coeff < 0 else math.inf
        return self.coeff * base ** self.exponent

    def derivative(self, m: float) -> float:
        base = float(self.center) - m
        return -self.coeff * self.exponent * base ** (self.exponent - 1.0)


@dataclass(frozen=True)
class DualPiece:
    slope: Number
    intercept: Number
    terms: Tuple[PowerTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "slope", _num(self.slope))
        object.__setattr__(self, "intercept", _num(self.intercept))
        object.__setattr__(self, "terms", tuple(self.terms))

    def value(self, m) -> float:
        v = float(self.slope) * float(m) + float(self.intercept)
        for t in self.terms:
            tv = t.value(float(m))
            if math.isinf(tv):
                return tv
            v += tv
        return v

    def value_exact(self, m: Fraction) -> Fraction:
        if self.terms:
            raise ValueError("exact evaluation needs an affine dual piece")
        if not (
            isinstance(self.slope, Fraction) and isinstance(self.intercept, Fraction)
        ):
            raise ValueError("exact evaluation needs rational coefficients")
        return self.slope * _to_fraction(m) + self.intercept

    def derivative(self, m) -> float:
        v = float(self.slope)
        for t in self.terms:
            v += t.derivative(float(m))
        return v

    def add(self, other: "DualPiece") -> "DualPiece":
        return DualPiece(
            self.slope + other.slope,
            self.intercept + other.intercept,
            self.terms + other.terms,
        )


class DualFn:
    """Concave function on [lo, hi] (a slope interval), piecewise affine
    plus power profiles; values -inf are allowed at the endpoints."""

    def __init__(
        self,
        lo: Number,
        hi: Number,
        breakpoints: Sequence[Number],
        pieces: Sequence[DualPiece],
    ):
        self.lo = _num(lo)
        self.hi = _num(hi)
        self.breakpoints = tuple(_num(b) for b in breakpoints)
        self.pieces = tuple(pieces)
        if float(self.lo) > float(self.hi):
            raise ValueError("empty dual domain")
        if self.is_degenerate():
            if len(self.pieces) > 1 or self.breakpoints:
                raise ValueError("a point domain carries a single piece")
            return
        if len(self.pieces) != len(self.breakpoints) + 1:
            raise ValueError("need exactly one more piece than breakpoints")
        knots = [float(self.lo)] + [float(b) for b in self.breakpoints] + [
            float(self.hi)
        ]
        if any(b2 <= b1 for b1, b2 in zip(knots, knots[1:])):
            raise ValueError("dual breakpoints must increase inside the domain")

    def is_degenerate(self) -> bool:
        return float(self.lo) == float(self.hi)

    def piece_at(self, m) -> DualPiece:
        mf = float(m)
        if not float(self.lo) <= mf <= float(self.hi):
            raise ValueError(f"{m} outside the dual domain")
        idx = 0
        for b in self.breakpoints:
            if mf > float(b):
                idx += 1
            else:
                break
        return self.pieces[min(idx, len(self.pieces) - 1)]

    def __call__(self, m) -> float:
        return self.piece_at(m).value(m)

    def value_exact(self, m) -> Fraction:
        return self.piece_at(m).value_exact(_to_fraction(m))

    def derivative(self, m) -> float:
        return self.piece_at(m).derivative(m)

    def endpoint_values(self) -> Tuple[float, float]:
        if self.is_degenerate():
            v = self.pieces[0].value(self.lo)
            return v, v
        return self(self.lo), self(self.hi)

    def is_affine_piecewise(self) -> bool:
        return all(not p.terms for p in self.pieces)

    def __add__(self, other: "DualFn") -> "DualFn":
        if float(self.lo) != float(other.lo) or float(self.hi) != float(other.hi):
            raise ValueError("dual functions live on different slope intervals")
        if self.is_degenerate():
            return DualFn(
                self.lo, self.hi, [], [self.pieces[0].add(other.pieces[0])]
            )
        knots = sorted(
            set(float(b) for b in self.breakpoints)
            | set(float(b) for b in other.breakpoints)
        )
        # keep exact breakpoint values where available
        exact = {float(b): b for b in list(other.breakpoints) + list(self.breakpoints)}
        bps = [exact[k] for k in knots]
        pieces = []
        edges = [self.lo] + bps + [self.hi]
        for i in range(len(edges) - 1):
            mid = (float(edges[i]) + float(edges[i + 1])) / 2.0
            pieces.append(self.piece_at(mid).add(other.piece_at(mid)))
        return DualFn(self.lo, self.hi, bps, pieces)

    def integral(self) -> Union[Fraction, float]:
        """Integral over the whole domain; exact for rational affine data.

        Endpoint singularities with exponent > -1 converge; at -1 and
        below the integral is -inf (positive divergence cannot occur for
        a concave dual but is guarded)."""
        if self.is_degenerate():
            return Fraction(0)
        total: Union[Fraction, float] = Fraction(0)
        edges = [self.lo] + list(self.breakpoints) + [self.hi]
        for piece, a, b in zip(self.pieces, edges, edges[1:]):
            if (
                not piece.terms
                and isinstance(piece.slope, Fraction)
                and isinstance(piece.intercept, Fraction)
                and isinstance(a, Fraction)
                and isinstance(b, Fraction)
            ):
                seg: Union[Fraction, float] = piece.slope * (b * b - a * a) / 2 + (
                    piece.intercept * (b - a)
                )
            else:
                af, bf = float(a), float(b)
                seg = float(piece.slope) * (bf * bf - af * af) / 2.0 + float(
                    piece.intercept
                ) * (bf - af)
                for t in piece.terms:
                    seg += _integrate_power_term(t, af, bf)
                    if seg == -math.inf:
                        break
            if seg == -math.inf:
                return -math.inf
            if isinstance(total, Fraction) and isinstance(seg, Fraction):
                total = total + seg
            else:
                total = float(total) + float(seg)
        return total


def _integrate_power_term(t: PowerTerm, a: float, b: float) -> float:
    """Integral of coeff*(center-m)**exponent over [a, b], center >= b."""
    c, e, ctr = t.coeff, t.exponent, float(t.center)
    if abs(c) < 1e-300:
        return 0.0
    da, db = ctr - a, ctr - b
    if db < 0:
        raise ValueError("power term singular inside the integration range")
    if db == 0.0 and e + 1.0 <= 0.0:
        if c < 0:
            return -math.inf
        raise PositiveDivergenceError("dual integral diverges to +infinity")
    if e == -1.0:
        return c * (math.log(da) - math.log(db))
    return c * (da ** (e + 1.0) - db ** (e + 1.0)) / (e + 1.0)


# ---------------------------------------------------------------------------
# The transform itself.
# ---------------------------------------------------------------------------


def legendre_dual(f: ConcaveFn) -> DualFn:
    """Concave conjugate inf_u (m*u - f(u)) on [slope_pos, slope_neg].

    Affine pieces collapse to single slope values, breakpoints open up
    affine dual pieces (slope = breakpoint, intercept = -f there), and
    each singular piece contributes the profile
    (m - s) - c + (1 - 1/alpha)*(s - m)**(alpha/(alpha-1)).
    """
    lo, hi = f.slope_pos, f.slope_neg
    if float(lo) == float(hi):
        return DualFn(lo, hi, [], [DualPiece(0, -f.pieces[0].intercept)])
    entries: List[Tuple[Number, DualPiece]] = []  # (upper edge, piece)
    cur: Number = lo
    n = len(f.pieces)
    for i in range(n - 1, -1, -1):
        piece = f.pieces[i]
        # breakpoint to the right of this piece: dual piece across the slope gap
        if i < n - 1:
            t = f.breakpoints[i]
            d_hi = piece.derivative(t) if isinstance(piece, AlphaPiece) else piece.slope
            if float(d_hi) > float(cur) + _EQ_TOL:
                try:
                    ft: Number = f.value_exact(t)
                except ValueError:
                    ft = f(t)
                entries.append((d_hi, DualPiece(t, -ft)))
                cur = d_hi
        if isinstance(piece, AlphaPiece):
            left = f.breakpoints[i - 1] if i >= 1 else None
            s, c, alpha = piece.slope, piece.intercept, float(piece.alpha)
            d_left: Number = s if left is None else piece.derivative(left)
            if float(d_left) > float(cur) + _EQ_TOL:
                term = PowerTerm(
                    1.0 - 1.0 / alpha, alpha / (alpha - 1.0), s
                )
                entries.append((d_left, DualPiece(1, -(s + c), (term,))))
                cur = d_left
        else:
            # derivative is constant here; realign exactly on the slope
            if abs(float(piece.slope) - float(cur)) > 1e-9 * max(
                1.0, abs(float(cur))
            ):
                raise AssertionError("slope bookkeeping failed in the transform")
            cur = piece.slope
    if abs(float(cur) - float(hi)) > 1e-9 * max(1.0, abs(float(hi))):
        raise AssertionError("transform did not reach the top slope")
    bps = [e for e, _ in entries[:-1]]
    pieces = [p for _, p in entries]
    return DualFn(lo, hi, bps, pieces)


def legendre_bidual(d: DualFn) -> ConcaveFn:
    """Conjugate back to a concave function on the line; exact, and only
    defined for piecewise-affine duals (finite endpoint values)."""
    if not d.is_affine_piecewise():
        raise ValueError("exact biconjugation needs a piecewise-affine dual")
    if d.is_degenerate():
        m = _to_fraction(d.lo)
        return ConcaveFn([], [AffinePiece(m, -d.pieces[0].value_exact(m))])
    ms = [d.lo] + list(d.breakpoints) + [d.hi]
    vertices = []
    for m in ms:
        mf = _to_fraction(m)
        vertices.append((mf, d.value_exact(mf)))
    vertices.sort(key=lambda t: t[0], reverse=True)  # slopes decrease rightward
    pieces = [AffinePiece(m, -v) for m, v in vertices]
    bps: List[Fraction] = []
    for (m1, v1), (m2, v2) in zip(vertices, vertices[1:]):
        bps.append((v1 - v2) / (m1 - m2))
    return ConcaveFn(bps, pieces)


def conjugate_eval(d: DualFn, u: float) -> float:
    """Value at u of the conjugate of a dual function (numeric).

    Minimises m*u - d(m) over the domain; the objective is convex, so a
    sign bisection on its slope u - d'(m) suffices.
    """
    lo, hi = float(d.lo), float(d.hi)
    if lo == hi:
        return lo * u - d.pieces[0].value(lo)
    span = hi - lo
    eps = 1e-12 * max(1.0, abs(lo), abs(hi))
    a, b = lo + eps * span, hi - eps * span

    def g(m: float) -> float:
        return u - d.derivative(m)

    if g(a) >= 0:
        va = d(d.lo)
        return u * lo - va if not math.isinf(va) else math.inf
    if g(b) <= 0:
        vb = d(d.hi)
        return u * hi - vb if not math.isinf(vb) else math.inf
    for _ in range(200):
        mid = 0.5 * (a + b)
        if b - a <= 1e-13 * max(1.0, abs(a), abs(b)):
            break
        if g(mid) < 0:
            a = mid
        else:
            b = mid
    m_star = 0.5 * (a + b)
    return u * m_star - d(m_star)


def dual_sup_distance(d1: DualFn, d2: DualFn) -> float:
    """Sup of |d1 - d2| over the common domain, for piecewise-affine duals."""
    if not (d1.is_affine_piecewise() and d2.is_affine_piecewise()):
        raise ValueError("sup distance implemented for piecewise-affine duals")
    if float(d1.lo) != float(d2.lo) or float(d1.hi) != float(d2.hi):
        raise ValueError("dual functions live on different slope intervals")
    ms = (
        {float(d1.lo), float(d1.hi)}
        | {float(b) for b in d1.breakpoints}
        | {float(b) for b in d2.breakpoints}
    )
    return max(abs(d1(m) - d2(m)) for m in sorted(ms))
