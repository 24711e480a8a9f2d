"""Energy pairings between a reference concave function and a more
singular one, via integrals against curvature measures."""

from __future__ import annotations

import math

from .functions import ConcaveFn, bounded_above
from .measures import integrate_against, monge_ampere


def _require_comparable(psi: ConcaveFn, phi: ConcaveFn) -> None:
    if not bounded_above(psi, phi):
        raise ValueError(
            "psi - phi must be bounded above (phi at least as singular as psi)"
        )


def local_energy(psi: ConcaveFn, phi: ConcaveFn, tol: float = 1e-9) -> float:
    """Energy of phi relative to psi: the integral of psi - phi against
    the sum of both curvature measures. Finite or -inf."""
    _require_comparable(psi, phi)
    a = integrate_against((psi, phi), monge_ampere(phi), tol)
    b = integrate_against((psi, phi), monge_ampere(psi), tol)
    if math.isinf(a) or math.isinf(b):
        return -math.inf
    return a + b


def mixed_local_energy(
    psi0: ConcaveFn,
    psi1: ConcaveFn,
    phi0: ConcaveFn,
    phi1: ConcaveFn,
    tol: float = 1e-9,
) -> float:
    """Mixed energy of the pair (phi0, phi1) against references (psi0, psi1):

        int (psi0 - phi0) dMA(psi1) + int (psi1 - phi1) dMA(phi0)

    Agrees with local_energy when the slots coincide, and is symmetric in
    the two slots whenever all deviations are bounded.
    """
    _require_comparable(psi0, phi0)
    _require_comparable(psi1, phi1)
    a = integrate_against((psi0, phi0), monge_ampere(psi1), tol)
    b = integrate_against((psi1, phi1), monge_ampere(phi0), tol)
    if math.isinf(a) or math.isinf(b):
        return -math.inf
    return a + b
