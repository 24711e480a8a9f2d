"""Concave functions on the line, piecewise over a rational partition.

Two piece kinds are supported: affine pieces, and "alpha" pieces which add
the singular profile (1/alpha)*(1-u)**alpha (0 < alpha < 1) to an affine
part. Alpha pieces are restricted to intervals with right endpoint <= 0,
so 1-u >= 1 on their domain and every power expression stays smooth.

Arithmetic is exact (Fractions) wherever only affine data is involved;
crossings against alpha pieces are bracketed by exact sign analysis and
then bisected to 1e-12 relative accuracy.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from ..divisorial_core.vectors import _to_fraction

Number = Union[int, Fraction, float]

_REL_TOL = 1e-12
_COEFF_TOL = 1e-14


def _num(x) -> Number:
    """Normalise scalar input: ints and strings become Fractions, floats stay."""
    if isinstance(x, (Fraction, float)):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected a number, got {type(x).__name__}")


def _close(a: float, b: float, atol: float = 1e-8, rtol: float = 1e-8) -> bool:
    return abs(a - b) <= atol + rtol * max(abs(a), abs(b))


@dataclass(frozen=True)
class AffinePiece:
    slope: Number
    intercept: Number

    def __post_init__(self):
        object.__setattr__(self, "slope", _num(self.slope))
        object.__setattr__(self, "intercept", _num(self.intercept))

    def value(self, u):
        return self.slope * u + self.intercept

    def derivative(self, u):
        return self.slope

    def shifted(self, c) -> "AffinePiece":
        return AffinePiece(self.slope, self.intercept + _num(c))

    @property
    def alpha_term(self):
        return None


@dataclass(frozen=True)
class AlphaPiece:
    """slope*u + intercept + (1/alpha)*(1-u)**alpha, on intervals with u <= 0."""

    alpha: Number
    slope: Number
    intercept: Number

    def __post_init__(self):
        object.__setattr__(self, "alpha", _num(self.alpha))
        object.__setattr__(self, "slope", _num(self.slope))
        object.__setattr__(self, "intercept", _num(self.intercept))
        a = float(self.alpha)
        if not 0 < a < 1:
            raise ValueError("alpha must lie strictly between 0 and 1")

    def value(self, u) -> float:
        a = float(self.alpha)
        return float(self.slope) * float(u) + float(self.intercept) + (
            (1.0 - float(u)) ** a / a
        )

    def derivative(self, u) -> float:
        a = float(self.alpha)
        return float(self.slope) - (1.0 - float(u)) ** (a - 1.0)

    def shifted(self, c) -> "AlphaPiece":
        return AlphaPiece(self.alpha, self.slope, self.intercept + _num(c))

    @property
    def alpha_term(self):
        # coefficient of (1-u)**alpha is pinned to 1/alpha in this catalog
        return (1.0 / float(self.alpha), float(self.alpha))


Piece = Union[AffinePiece, AlphaPiece]


# ---------------------------------------------------------------------------
# Difference expressions slope*u + intercept + sum of c*(1-u)**a, with the
# root-finding cascade used for crossings and extrema.
# ---------------------------------------------------------------------------


@dataclass
class _Expr:
    slope: Number
    intercept: Number
    terms: Tuple[Tuple[float, float], ...]  # (coeff, exponent) of (1-u)**e

    @staticmethod
    def difference(p: Piece, q: Piece) -> "_Expr":
        terms: List[Tuple[float, float]] = []
        for sgn, piece in ((1.0, p), (-1.0, q)):
            t = piece.alpha_term
            if t is not None:
                terms.append((sgn * t[0], t[1]))
        # cancel exactly matching exponents (same alpha on both sides)
        merged: List[Tuple[float, float]] = []
        for c, e in terms:
            for i, (c2, e2) in enumerate(merged):
                if e == e2:
                    merged[i] = (c2 + c, e2)
                    break
            else:
                merged.append((c, e))
        merged = [(c, e) for c, e in merged if abs(c) > _COEFF_TOL]
        return _Expr(p.slope - q.slope, p.intercept - q.intercept, tuple(merged))

    def is_exact(self) -> bool:
        return not self.terms and isinstance(self.slope, Fraction) and isinstance(
            self.intercept, Fraction
        )

    def is_zero(self) -> bool:
        return (
            not self.terms
            and float(self.slope) == 0.0
            and float(self.intercept) == 0.0
        )

    def value(self, u) -> float:
        v = float(self.slope) * float(u) + float(self.intercept)
        for c, e in self.terms:
            v += c * (1.0 - float(u)) ** e
        return v

    def derivative_expr(self) -> "_Expr":
        # d/du of c*(1-u)**e is c*e*(1-u)**(e-1) * (-1)
        return _Expr(
            Fraction(0),
            self.slope,
            tuple((-c * e, e - 1.0) for c, e in self.terms),
        )

    def scale(self) -> float:
        s = max(1.0, abs(float(self.slope)), abs(float(self.intercept)))
        for c, _ in self.terms:
            s = max(s, abs(c))
        return s

    def sign_at_minus_inf(self) -> int:
        if float(self.slope) != 0.0:
            return -1 if float(self.slope) > 0 else 1
        pos_terms = [(c, e) for c, e in self.terms if e > 0]
        if pos_terms:
            c_lead = max(pos_terms, key=lambda t: t[1])[0]
            # sum coefficients sharing the leading exponent
            e_lead = max(t[1] for t in pos_terms)
            c_lead = sum(c for c, e in pos_terms if e == e_lead)
            if abs(c_lead) > _COEFF_TOL:
                return 1 if c_lead > 0 else -1
        lim = float(self.intercept) + sum(c for c, e in self.terms if e == 0.0)
        if lim > 0:
            return 1
        if lim < 0:
            return -1
        return 0

    def limit_at_minus_inf(self) -> float:
        """Finite limit when slope and positive-exponent terms vanish."""
        if float(self.slope) != 0.0 or any(
            e > 0 and abs(c) > _COEFF_TOL for c, e in self.terms
        ):
            raise ValueError("expression diverges toward -infinity")
        return float(self.intercept) + sum(c for c, e in self.terms if e == 0.0)


def _sign(v: float, scale: float) -> int:
    if abs(v) <= 1e-14 * scale:
        return 0
    return 1 if v > 0 else -1


def _bisect_root(expr: _Expr, a: float, b: float) -> float:
    """Root in [a, b] given opposite (or zero) endpoint signs."""
    fa, fb = expr.value(a), expr.value(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    for _ in range(200):
        m = 0.5 * (a + b)
        if b - a <= _REL_TOL * max(1.0, abs(a), abs(b)):
            return m
        fm = expr.value(m)
        if fm == 0.0:
            return m
        if (fa > 0) != (fm > 0):
            b, fb = m, fm
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def _extend_left(expr: _Expr, right: float, target_sign: int) -> Optional[float]:
    """Finite point left of `right` where expr has the asymptotic sign.

    Valid on intervals where expr is monotone; doubles the step outward.
    """
    step = 1.0
    a = min(right, 0.0) - step
    scale = expr.scale()
    for _ in range(200):
        if _sign(expr.value(a), scale) == target_sign:
            return a
        step *= 2.0
        a = min(right, 0.0) - step
    return None


def _monotone_roots(
    expr: _Expr, seg_lo: Optional[float], seg_hi: float, scale: float
) -> List[float]:
    """Roots on a segment where expr is monotone. seg_lo None means -inf."""
    if seg_lo is None:
        s_inf = expr.sign_at_minus_inf()
        s_hi = _sign(expr.value(seg_hi), scale)
        if s_hi == 0:
            return [seg_hi]
        if s_inf == 0 or s_inf == s_hi:
            return []
        a = _extend_left(expr, seg_hi, s_inf)
        if a is None:
            return []
        return [_bisect_root(expr, a, seg_hi)]
    s_lo = _sign(expr.value(seg_lo), scale)
    s_hi = _sign(expr.value(seg_hi), scale)
    if s_lo == 0 and s_hi == 0:
        return []
    if s_lo == 0:
        return [seg_lo]
    if s_hi == 0:
        return [seg_hi]
    if s_lo == s_hi:
        return []
    return [_bisect_root(expr, seg_lo, seg_hi)]


def _critical_points(expr: _Expr, lo: Optional[float], hi: float) -> List[float]:
    """Interior zeros of the derivative of expr on (lo, hi), hi finite."""
    d = expr.derivative_expr()
    if not d.terms:
        return []
    m = float(d.slope)  # constant part of the derivative
    if len(d.terms) == 1:
        (c, e) = d.terms[0]
        # m + c*(1-u)**e = 0
        if c == 0:
            return []
        rhs = -m / c
        if rhs <= 0:
            return []
        u = 1.0 - rhs ** (1.0 / e)
        return [u] if (lo is None or u > lo) and u < hi else []
    if len(d.terms) == 2:
        (c1, e1), (c2, e2) = d.terms
        # second derivative vanishes where the two power terms balance
        k1, k2 = -c1 * e1, -c2 * e2
        crits: List[float] = []
        split: Optional[float] = None
        if k1 != 0 and k2 != 0:
            rhs = -k2 / k1
            if rhs > 0:
                t = rhs ** (1.0 / (e1 - e2)) if e1 != e2 else None
                if t is not None and t >= 1.0:
                    split = 1.0 - t
        segs: List[Tuple[Optional[float], float]] = []
        if split is not None and (lo is None or split > lo) and split < hi:
            segs = [(lo, split), (split, hi)]
        else:
            segs = [(lo, hi)]
        scale = d.scale()
        for a, b in segs:
            crits.extend(_monotone_roots(d, a, b, scale))
        return sorted(set(crits))
    raise NotImplementedError("more than two singular terms in one difference")


def _expr_roots(expr: _Expr, lo: Optional[Fraction], hi: Optional[Fraction]) -> List[Fraction]:
    """All roots of expr strictly inside (lo, hi), as exact Fractions.

    Float roots are converted exactly; affine-only expressions solve
    exactly in rational arithmetic.
    """
    if expr.is_zero():
        return []
    if not expr.terms:
        if float(expr.slope) == 0.0:
            return []
        root = -_to_fraction(expr.intercept) / _to_fraction(expr.slope) if isinstance(
            expr.slope, Fraction
        ) and isinstance(expr.intercept, Fraction) else Fraction(
            -float(expr.intercept) / float(expr.slope)
        )
        if (lo is None or root > lo) and (hi is None or root < hi):
            return [root]
        return []
    if hi is None:
        raise ValueError("singular terms cannot appear on a right-unbounded piece")
    hi_f = float(hi)
    lo_f = None if lo is None else float(lo)
    crits = _critical_points(expr, lo_f, hi_f)
    bounds: List[Tuple[Optional[float], float]] = []
    prev: Optional[float] = lo_f
    for c in crits:
        bounds.append((prev, c))
        prev = c
    bounds.append((prev, hi_f))
    scale = expr.scale()
    roots: List[float] = []
    for a, b in bounds:
        roots.extend(_monotone_roots(expr, a, b, scale))
    out: List[Fraction] = []
    for r in sorted(set(roots)):
        fr = Fraction(r)
        if (lo is None or fr > lo) and fr < hi:
            if not out or float(fr) - float(out[-1]) > 1e-12 * max(1.0, abs(float(fr))):
                out.append(fr)
    return out


# ---------------------------------------------------------------------------
# The concave function type.
# ---------------------------------------------------------------------------


class ConcaveFn:
    """Concave, continuous, piecewise function over rational breakpoints.

    pieces[i] lives on [breakpoints[i-1], breakpoints[i]] (unbounded at the
    ends). Continuity and concavity are validated on construction: exactly
    where both sides are affine, numerically against the closed forms
    otherwise. Identical adjacent pieces are merged.
    """

    def __init__(self, breakpoints: Sequence, pieces: Sequence[Piece]):
        bps = [_to_fraction(b) for b in breakpoints]
        pieces = list(pieces)
        if len(pieces) != len(bps) + 1:
            raise ValueError("need exactly one more piece than breakpoints")
        if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        bps, pieces = self._merge(bps, pieces)
        self.breakpoints: Tuple[Fraction, ...] = tuple(bps)
        self.pieces: Tuple[Piece, ...] = tuple(pieces)
        self._validate()

    @staticmethod
    def _merge(bps, pieces):
        out_b, out_p = [], [pieces[0]]
        for b, p in zip(bps, pieces[1:]):
            if p == out_p[-1]:
                continue
            out_b.append(b)
            out_p.append(p)
        return out_b, out_p

    def _validate(self) -> None:
        for i, piece in enumerate(self.pieces):
            hi = self.breakpoints[i] if i < len(self.breakpoints) else None
            if isinstance(piece, AlphaPiece):
                if hi is None or hi > 0:
                    raise ValueError(
                        "singular pieces require an interval with right endpoint <= 0"
                    )
        for i, t in enumerate(self.breakpoints):
            left, right = self.pieces[i], self.pieces[i + 1]
            exact = (
                isinstance(left, AffinePiece)
                and isinstance(right, AffinePiece)
                and all(
                    isinstance(x, Fraction)
                    for x in (left.slope, left.intercept, right.slope, right.intercept)
                )
            )
            if exact:
                if left.value(t) != right.value(t):
                    raise ValueError(f"discontinuity at breakpoint {t}")
                if not left.slope >= right.slope:
                    raise ValueError(f"not concave at breakpoint {t}")
            else:
                lv, rv = float(left.value(t)), float(right.value(t))
                if not _close(lv, rv):
                    raise ValueError(f"discontinuity at breakpoint {t}")
                ld, rd = float(left.derivative(t)), float(right.derivative(t))
                if ld < rd - 1e-9 * max(1.0, abs(ld), abs(rd)):
                    raise ValueError(f"not concave at breakpoint {t}")

    @property
    def slope_neg(self) -> Number:
        """Asymptotic slope toward -infinity (singular profiles flatten out)."""
        return self.pieces[0].slope

    @property
    def slope_pos(self) -> Number:
        return self.pieces[-1].slope

    def piece_at(self, u) -> Piece:
        i = bisect.bisect_left(self.breakpoints, _to_fraction(u))
        return self.pieces[i]

    def piece_index_at(self, u) -> int:
        return bisect.bisect_left(self.breakpoints, _to_fraction(u))

    def intervals(self) -> List[Tuple[Optional[Fraction], Optional[Fraction], Piece]]:
        lo: Optional[Fraction] = None
        out = []
        for i, p in enumerate(self.pieces):
            hi = self.breakpoints[i] if i < len(self.breakpoints) else None
            out.append((lo, hi, p))
            lo = hi
        return out

    def __call__(self, u) -> float:
        return float(self.piece_at(u).value(u))

    def value_exact(self, u: Fraction) -> Fraction:
        piece = self.piece_at(u)
        if not isinstance(piece, AffinePiece):
            raise ValueError("exact evaluation needs an affine piece")
        u = _to_fraction(u)
        if not (
            isinstance(piece.slope, Fraction) and isinstance(piece.intercept, Fraction)
        ):
            raise ValueError("exact evaluation needs rational coefficients")
        return piece.slope * u + piece.intercept

    def derivative_left(self, t) -> float:
        # bisect_left puts a breakpoint with the piece ending there
        return self.pieces[self.piece_index_at(t)].derivative(t)

    def derivative_right(self, t) -> float:
        t = _to_fraction(t)
        i = bisect.bisect_right(self.breakpoints, t)
        return self.pieces[i].derivative(t)

    def shift(self, c) -> "ConcaveFn":
        return ConcaveFn(self.breakpoints, [p.shifted(c) for p in self.pieces])

    @staticmethod
    def affine(slope, intercept=0) -> "ConcaveFn":
        return ConcaveFn([], [AffinePiece(slope, intercept)])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ConcaveFn)
            and self.breakpoints == other.breakpoints
            and self.pieces == other.pieces
        )

    def __hash__(self):
        return hash((self.breakpoints, self.pieces))

    def __repr__(self) -> str:
        return f"ConcaveFn(breakpoints={list(self.breakpoints)}, pieces={list(self.pieces)})"


def _merged_partition(f: ConcaveFn, g: ConcaveFn) -> List[Fraction]:
    return sorted(set(f.breakpoints) | set(g.breakpoints))


def min_concave(f: ConcaveFn, g: ConcaveFn) -> ConcaveFn:
    """Pointwise minimum, again concave and piecewise in the catalog.

    Crossings inside each merged interval are located exactly for
    affine/affine pairs and by sign-bracketed bisection otherwise.
    """
    base = _merged_partition(f, g)
    cuts: List[Fraction] = list(base)
    edges: List[Optional[Fraction]] = [None] + list(base) + [None]
    for i in range(len(base) + 1):
        lo, hi = edges[i], edges[i + 1]
        probe = _probe_point(lo, hi)
        fp, gp = f.piece_at(probe), g.piece_at(probe)
        d = _Expr.difference(fp, gp)
        cuts.extend(_expr_roots(d, lo, hi))
    cuts = sorted(set(cuts))
    pieces: List[Piece] = []
    edges2: List[Optional[Fraction]] = [None] + cuts + [None]
    for i in range(len(cuts) + 1):
        lo, hi = edges2[i], edges2[i + 1]
        probe = _probe_point(lo, hi)
        fv, gv = f(probe), g(probe)
        winner = f if fv <= gv else g
        pieces.append(winner.piece_at(probe))
    return ConcaveFn(cuts, pieces)


def _probe_point(lo: Optional[Fraction], hi: Optional[Fraction]) -> Fraction:
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return hi - 1
    if hi is None:
        return lo + 1
    return (lo + hi) / 2


def cutoff(phi: ConcaveFn, psi: ConcaveFn, n) -> ConcaveFn:
    """Truncation min(psi + n, phi): bounded near psi, increasing to phi.

    Requires phi to dominate psi up to a constant (phi at most a bounded
    amount below psi), so the minimum eventually equals phi everywhere.
    """
    if not bounded_above(psi, phi):
        raise ValueError("psi - phi must be bounded above for the truncation")
    return min_concave(psi.shift(n), phi)


def bounded_above(f: ConcaveFn, g: ConcaveFn) -> bool:
    """Whether f - g is bounded above on the whole line (analytically)."""
    ds_pos = float(f.slope_pos) - float(g.slope_pos)
    if ds_pos > 0:
        return False
    ds_neg = float(f.slope_neg) - float(g.slope_neg)
    if ds_neg < 0:
        return False
    if ds_neg == 0:
        d = _Expr.difference(f.pieces[0], g.pieces[0])
        for c, e in d.terms:
            if e > 0 and c > _COEFF_TOL:
                return False
    return True


def sup_distance(f: ConcaveFn, g: ConcaveFn) -> float:
    """Supremum of |f - g| over the line; +inf when the deviation is unbounded."""
    if float(f.slope_neg) != float(g.slope_neg) or float(f.slope_pos) != float(
        g.slope_pos
    ):
        return math.inf
    base = _merged_partition(f, g)
    edges: List[Optional[Fraction]] = [None] + base + [None]
    best = 0.0
    for i in range(len(base) + 1):
        lo, hi = edges[i], edges[i + 1]
        probe = _probe_point(lo, hi)
        d = _Expr.difference(f.piece_at(probe), g.piece_at(probe))
        if lo is None:
            if any(e > 0 and abs(c) > _COEFF_TOL for c, e in d.terms):
                return math.inf
            best = max(best, abs(d.limit_at_minus_inf()))
        if hi is None:
            # slopes agree, so the difference is a constant out here
            best = max(best, abs(d.value(0.0 if lo is None else float(lo) + 1.0)))
            continue
        candidates: List[float] = []
        if lo is not None:
            candidates.append(float(lo))
        candidates.append(float(hi))
        if d.terms:
            candidates.extend(
                _critical_points(d, None if lo is None else float(lo), float(hi))
            )
        for u in candidates:
            best = max(best, abs(d.value(u)))
    return best
