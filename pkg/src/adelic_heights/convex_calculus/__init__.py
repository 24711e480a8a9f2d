"""Piecewise concave functions on the line: pointwise minima, Legendre
duality, second-derivative measures, and energy pairings."""

from .functions import (
    AffinePiece,
    AlphaPiece,
    ConcaveFn,
    min_concave,
    cutoff,
    sup_distance,
    bounded_above,
)
from .duality import (
    DualFn,
    DualPiece,
    PowerTerm,
    legendre_dual,
    legendre_bidual,
    conjugate_eval,
    dual_sup_distance,
)
from .measures import (
    Measure1D,
    DensityPiece,
    PositiveDivergenceError,
    monge_ampere,
    integrate_against,
    integrate_measure,
    weak_convergence_check,
)
from .energy import local_energy, mixed_local_energy

__all__ = [
    "AffinePiece",
    "AlphaPiece",
    "ConcaveFn",
    "min_concave",
    "cutoff",
    "sup_distance",
    "bounded_above",
    "DualFn",
    "DualPiece",
    "PowerTerm",
    "legendre_dual",
    "legendre_bidual",
    "conjugate_eval",
    "dual_sup_distance",
    "Measure1D",
    "DensityPiece",
    "PositiveDivergenceError",
    "monge_ampere",
    "integrate_against",
    "integrate_measure",
    "weak_convergence_check",
    "local_energy",
    "mixed_local_energy",
]
