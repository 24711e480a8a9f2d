"""Measures on the line with atoms plus power-law densities, the
second-derivative measure of a concave function, and integration of
piece differences with exact divergence classification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple, Union

from scipy.integrate import quad

from ..divisorial_core.vectors import _to_fraction
from .functions import (
    AffinePiece,
    AlphaPiece,
    ConcaveFn,
    Number,
    _Expr,
    _probe_point,
    _COEFF_TOL,
)


class PositiveDivergenceError(ValueError):
    """An integral diverges to +infinity; no value can be returned."""


@dataclass(frozen=True)
class DensityPiece:
    """Density coeff*(1-u)**exponent du on [lo, hi]; lo of None means -inf.

    Singular exponents (nonzero) require hi <= 0 so the density stays
    smooth and positive powers of (1-u) stay >= 1 on the interval.
    """

    lo: Optional[Fraction]
    hi: Fraction
    coeff: float
    exponent: float

    def __post_init__(self):
        object.__setattr__(self, "lo", None if self.lo is None else _to_fraction(self.lo))
        object.__setattr__(self, "hi", _to_fraction(self.hi))
        if self.lo is not None and self.lo >= self.hi:
            raise ValueError("empty density interval")
        if self.exponent != 0 and self.hi > 0:
            raise ValueError("singular density requires right endpoint <= 0")

    def density(self, u: float) -> float:
        return self.coeff * (1.0 - u) ** self.exponent

    def mass(self) -> float:
        v = _integrate_terms_in_t(
            [(self.coeff, float(self.exponent))], self.lo, self.hi
        )
        if v is _POSITIVE_DIVERGENT:
            return math.inf
        if v is _NEGATIVE_DIVERGENT:
            return -math.inf
        return v


_POSITIVE_DIVERGENT = object()
_NEGATIVE_DIVERGENT = object()


def _integrate_terms_in_t(
    terms: Sequence[Tuple[float, float]], lo: Optional[Fraction], hi: Fraction
):
    """Integral over u in [lo, hi] of sum coeff*(1-u)**e, via t = 1-u.

    Returns a float, or a divergence sentinel when the t-integral up to
    +infinity has a nonvanishing term with exponent >= -1.
    """
    t0 = 1.0 - float(hi)
    if lo is None:
        convergent = 0.0
        divergent: List[Tuple[float, float]] = []
        for c, e in terms:
            if abs(c) <= _COEFF_TOL:
                continue
            if e < -1.0:
                convergent += -c * t0 ** (e + 1.0) / (e + 1.0)
            else:
                divergent.append((c, e))
        if divergent:
            # group by exponent, leading group decides the sign
            divergent.sort(key=lambda t: -t[1])
            i = 0
            while i < len(divergent):
                e_lead = divergent[i][1]
                csum = sum(c for c, e in divergent if e == e_lead)
                if abs(csum) > _COEFF_TOL:
                    return (
                        _POSITIVE_DIVERGENT if csum > 0 else _NEGATIVE_DIVERGENT
                    )
                i += sum(1 for _, e in divergent if e == e_lead)
            # all divergent groups cancel exactly
        return convergent
    t1 = 1.0 - float(lo)
    total = 0.0
    for c, e in terms:
        if abs(c) <= _COEFF_TOL:
            continue
        if e == -1.0:
            total += c * (math.log(t1) - math.log(t0))
        else:
            total += c * (t1 ** (e + 1.0) - t0 ** (e + 1.0)) / (e + 1.0)
    return total


def _expr_times_density_terms(
    expr: _Expr, piece: DensityPiece
) -> List[Tuple[float, float]]:
    """(slope*u + intercept + sum c*(1-u)**a) * k*(1-u)**q as t-power terms."""
    k, q = piece.coeff, float(piece.exponent)
    a_const = float(expr.slope) + float(expr.intercept)  # u = 1 - t
    b_lin = -float(expr.slope)
    out = [(k * a_const, q), (k * b_lin, q + 1.0)]
    for c, e in expr.terms:
        out.append((k * c, q + e))
    return out


@dataclass(frozen=True)
class Measure1D:
    """Nonnegative measure: finitely many atoms plus catalog densities."""

    atoms: Tuple[Tuple[Fraction, Number], ...] = ()
    densities: Tuple[DensityPiece, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self,
            "atoms",
            tuple((_to_fraction(loc), m) for loc, m in self.atoms),
        )
        object.__setattr__(self, "densities", tuple(self.densities))
        for _, m in self.atoms:
            if float(m) < 0:
                raise ValueError("atom masses must be nonnegative")
        for d in self.densities:
            if d.coeff < 0:
                raise ValueError("density coefficients must be nonnegative")

    @property
    def total_mass(self) -> float:
        total = sum(float(m) for _, m in self.atoms)
        for d in self.densities:
            total += d.mass()
        return total

    def total_mass_exact(self) -> Fraction:
        """Exact mass when all atoms are rational and densities integrate
        to rationals (only the trivial case of no densities is exact)."""
        if self.densities:
            raise ValueError("densities do not have exact masses")
        return sum((_to_fraction(m) for _, m in self.atoms), Fraction(0))


def monge_ampere(f: ConcaveFn) -> Measure1D:
    """Curvature measure -f'' of a concave function.

    Every breakpoint carries an atom equal to its slope gap (zero gaps are
    dropped); each singular piece contributes the density
    (1-alpha)*(1-u)**(alpha-2) on its interval. The total mass always
    equals slope_neg - slope_pos.
    """
    atoms: List[Tuple[Fraction, Number]] = []
    for i, t in enumerate(f.breakpoints):
        left, right = f.pieces[i], f.pieces[i + 1]
        if isinstance(left, AffinePiece) and isinstance(right, AffinePiece):
            gap: Number = left.slope - right.slope
        else:
            gap = left.derivative(t) - right.derivative(t)
        gv = float(gap)
        if gv < 0:
            if gv < -1e-9 * max(1.0, abs(float(left.derivative(t)))):
                raise ValueError(f"negative slope gap at breakpoint {t}")
            continue
        if gv != 0:
            atoms.append((t, gap))
    densities: List[DensityPiece] = []
    for lo, hi, piece in f.intervals():
        if isinstance(piece, AlphaPiece):
            a = float(piece.alpha)
            densities.append(DensityPiece(lo, hi, 1.0 - a, a - 2.0))
    return Measure1D(tuple(atoms), tuple(densities))


def _subdivide(
    piece: DensityPiece, cuts: Sequence[Fraction]
) -> List[Tuple[Optional[Fraction], Fraction]]:
    inner = [c for c in cuts if (piece.lo is None or c > piece.lo) and c < piece.hi]
    edges: List[Optional[Fraction]] = [piece.lo] + sorted(set(inner)) + [piece.hi]
    return [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]


def integrate_against(
    pair: Tuple[ConcaveFn, ConcaveFn],
    mu: Measure1D,
    tol: float = 1e-9,
    method: str = "auto",
) -> float:
    """Integral of f - g against mu.

    Atoms are summed directly. Density pieces integrate in closed form
    through the power catalog (method "auto"/"exact"); method "quad" uses
    adaptive quadrature on a doubling sequence of windows instead. A
    negatively divergent integral returns -inf; a positively divergent one
    raises PositiveDivergenceError.
    """
    f, g = pair
    total = 0.0
    for loc, m in mu.atoms:
        total += float(m) * (f(loc) - g(loc))
    cuts = sorted(set(f.breakpoints) | set(g.breakpoints))
    diverged_neg = False
    for piece in mu.densities:
        for lo, hi in _subdivide(piece, cuts):
            probe = _probe_point(lo, hi)
            expr = _Expr.difference(f.piece_at(probe), g.piece_at(probe))
            if method in ("auto", "exact"):
                terms = _expr_times_density_terms(
                    expr, DensityPiece(lo, hi, piece.coeff, piece.exponent)
                )
                v = _integrate_terms_in_t(terms, lo, hi)
                if v is _POSITIVE_DIVERGENT:
                    raise PositiveDivergenceError(
                        "integral diverges to +infinity"
                    )
                if v is _NEGATIVE_DIVERGENT:
                    diverged_neg = True
                else:
                    total += v
            elif method == "quad":
                sub = DensityPiece(lo, hi, piece.coeff, piece.exponent)
                v = _quad_piece(lambda u: expr.value(u), sub, tol)
                if v == -math.inf:
                    diverged_neg = True
                else:
                    total += v
            else:
                raise ValueError(f"unknown method {method!r}")
    if diverged_neg:
        return -math.inf
    return total


def _quad_piece(fn: Callable[[float], float], piece: DensityPiece, tol: float) -> float:
    """Adaptive quadrature of fn against one density piece.

    Unbounded pieces integrate over doubling windows moving left; the tail
    is declared convergent after three successive negligible windows and
    divergent after three successive windows of growing magnitude.
    """

    def integrand(u: float) -> float:
        return fn(u) * piece.density(u)

    hi = float(piece.hi)
    lo = None if piece.lo is None else float(piece.lo)
    if lo is not None and hi - lo <= 64.0:
        val, _ = quad(integrand, lo, hi, epsabs=tol, limit=200)
        return val
    # windows doubling leftward: wide intervals concentrate their mass
    # near the right end, where a single quadrature call loses it
    total = 0.0
    width = 1.0
    right = hi
    small_streak = 0
    grow_streak = 0
    prev_mag: Optional[float] = None
    for _ in range(200):
        left = right - width
        if lo is not None and left <= lo:
            left = lo
        seg, _ = quad(integrand, left, right, epsabs=tol / 8, limit=200)
        total += seg
        if lo is not None and left == lo:
            return total
        mag = abs(seg)
        if prev_mag is not None and mag > prev_mag * 1.1:
            grow_streak += 1
            if grow_streak >= 3 and lo is None:
                return -math.inf if seg < 0 else math.inf
        else:
            grow_streak = 0
        prev_mag = mag
        if mag < tol / 8:
            small_streak += 1
            if small_streak >= 3 and lo is None:
                return total
        else:
            small_streak = 0
        right = left
        width *= 2.0
    return total


def integrate_measure(fn: Callable[[float], float], mu: Measure1D, tol: float = 1e-9) -> float:
    """Integral of an arbitrary (bounded, continuous) function against mu."""
    total = 0.0
    for loc, m in mu.atoms:
        total += float(m) * fn(float(loc))
    for piece in mu.densities:
        v = _quad_piece(fn, piece, tol)
        if math.isinf(v):
            return v
        total += v
    return total


@dataclass
class WeakConvergenceReport:
    fn_gaps: List[List[float]] = field(default_factory=list)
    mass_gaps: List[float] = field(default_factory=list)
    tol: float = 0.0

    @property
    def vague_pass(self) -> bool:
        return all(gaps[-1] <= self.tol for gaps in self.fn_gaps)

    @property
    def mass_pass(self) -> bool:
        return bool(self.mass_gaps) and self.mass_gaps[-1] <= self.tol

    @property
    def weak_pass(self) -> bool:
        return self.vague_pass and self.mass_pass


def weak_convergence_check(
    mu_seq: Sequence[Measure1D],
    mu: Measure1D,
    test_fns: Sequence[Callable[[float], float]],
    tol: float = 1e-3,
    quad_tol: float = 1e-9,
) -> WeakConvergenceReport:
    """Gap report for weak convergence: vague gaps against the test
    functions together with total-mass gaps (weak = vague + masses)."""
    report = WeakConvergenceReport(tol=tol)
    limits = [integrate_measure(fn, mu, quad_tol) for fn in test_fns]
    for fn, lim in zip(test_fns, limits):
        gaps = [abs(integrate_measure(fn, m, quad_tol) - lim) for m in mu_seq]
        report.fn_gaps.append(gaps)
    mass = mu.total_mass
    report.mass_gaps = [abs(m.total_mass - mass) for m in mu_seq]
    return report
