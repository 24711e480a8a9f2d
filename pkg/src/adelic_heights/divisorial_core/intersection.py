"""Symmetric multilinear intersection pairings and their continuous
extension to the metric completion."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

from .cones import DivisorialSpace, SemilinearCone
from .completion import CompletionElement
from .vectors import RationalVector, _to_fraction


class AdmissibilityError(ValueError):
    """No valid comparison gauge for the requested extension."""


class PositivityError(ValueError):
    """Arguments leave the region where the pairing is monotone."""


class IntersectionMap:
    """Symmetric multilinear form given by coefficients on basis tuples.

    table maps an index tuple (any order; stored sorted) to the value on
    the corresponding basis vectors. Missing tuples are zero. nef_cone
    marks the region where the form is expected monotone and nonnegative;
    it defaults to the order cone of the space.
    """

    def __init__(
        self,
        space: DivisorialSpace,
        arity: int,
        table: Dict[Tuple[int, ...], object],
        nef_cone: Optional[SemilinearCone] = None,
    ):
        if arity < 1:
            raise ValueError("arity must be at least 1")
        self.space = space
        self.arity = arity
        self.dim = space.ambient_dim
        self.nef_cone = nef_cone if nef_cone is not None else space.order_cone
        self.table: Dict[Tuple[int, ...], Fraction] = {}
        for idx, val in table.items():
            if len(idx) != arity:
                raise ValueError("table key has wrong length")
            if any(not (0 <= i < self.dim) for i in idx):
                raise ValueError("table key index out of range")
            key = tuple(sorted(idx))
            val = _to_fraction(val)
            if key in self.table and self.table[key] != val:
                raise ValueError(f"conflicting values for symmetric key {key}")
            self.table[key] = val

    def coefficient(self, idx: Tuple[int, ...]) -> Fraction:
        return self.table.get(tuple(sorted(idx)), Fraction(0))

    def evaluate(self, args: Sequence[RationalVector]) -> Fraction:
        if len(args) != self.arity:
            raise ValueError(f"expected {self.arity} arguments")
        for a in args:
            if a.dim != self.dim:
                raise ValueError("argument dimension mismatch")
        total = Fraction(0)
        for idx in itertools.product(range(self.dim), repeat=self.arity):
            coeff = self.coefficient(idx)
            if coeff == 0:
                continue
            prod = Fraction(1)
            for a, i in zip(args, idx):
                prod *= a[i]
                if prod == 0:
                    break
            total += coeff * prod
        return total

    def __call__(self, *args: RationalVector) -> Fraction:
        return self.evaluate(args)


def check_intersection_axioms(
    imap: IntersectionMap,
    nef_generators: Sequence[RationalVector],
    effective_generators: Sequence[RationalVector],
) -> dict:
    """Report on positivity axioms over the supplied generators.

    Checks, in order: nonnegativity on nef tuples, nonnegativity when one
    slot is effective and the rest nef, and existence of an amplitude
    witness (a nef generator making the pairing strictly positive) for
    every nonzero effective generator. Symmetry and multilinearity hold by
    construction and are reported as such.
    """
    report = {
        "symmetric": True,
        "multilinear": True,
        "nef_nonnegative": True,
        "effective_nonnegative": True,
        "amplitude_witnesses": {},
        "failures": [],
    }
    for combo in itertools.combinations_with_replacement(
        range(len(nef_generators)), imap.arity
    ):
        args = [nef_generators[i] for i in combo]
        v = imap.evaluate(args)
        if v < 0:
            report["nef_nonnegative"] = False
            report["failures"].append(("nef", combo, v))
    if imap.arity >= 1:
        for ei, e in enumerate(effective_generators):
            for combo in itertools.combinations_with_replacement(
                range(len(nef_generators)), imap.arity - 1
            ):
                args = [e] + [nef_generators[i] for i in combo]
                v = imap.evaluate(args)
                if v < 0:
                    report["effective_nonnegative"] = False
                    report["failures"].append(("effective", (ei,) + combo, v))
    for ei, e in enumerate(effective_generators):
        if e.is_zero():
            continue
        witness = None
        for ai, a in enumerate(nef_generators):
            args = [e] + [a] * (imap.arity - 1)
            if imap.evaluate(args) > 0:
                witness = ai
                break
        report["amplitude_witnesses"][ei] = witness
        if witness is None:
            report["failures"].append(("amplitude", ei, None))
    report["passed"] = (
        report["nef_nonnegative"]
        and report["effective_nonnegative"]
        and all(w is not None for w in report["amplitude_witnesses"].values())
    )
    return report


def extend_intersection(
    imap: IntersectionMap,
    args: Sequence[CompletionElement],
    eps,
    b_tilde: RationalVector,
) -> float:
    """Value of the pairing on completion points, within eps of the limit.

    b_tilde must dominate the common gauge b inside the nef region; it
    certifies a Lipschitz bound: moving every slot by at most delta*b
    changes the value by at most arity*delta*C, with C the largest value
    of the pairing when one slot is b_tilde and the others are shifted
    arguments. The sequences are advanced until delta = eps/(2*arity*C).
    """
    eps = _to_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if len(args) != imap.arity:
        raise ValueError(f"expected {imap.arity} completion arguments")
    base = args[0]
    for a in args[1:]:
        if a.b != base.b:
            raise AdmissibilityError("completion arguments use different gauges")
    if not imap.nef_cone.contains(b_tilde):
        raise AdmissibilityError("comparison gauge b_tilde must be nef")
    if not imap.space.order_cone.contains(b_tilde - base.b):
        raise AdmissibilityError("comparison gauge must dominate the common gauge b")

    # stable reference index for estimating the Lipschitz constant
    n0 = max(int(a.modulus(Fraction(1))) for a in args)
    terms = [a.sequence(n0) for a in args]
    for t in terms:
        if not imap.nef_cone.contains(t):
            raise PositivityError(
                "sequence term leaves the nef region; the extension bound fails"
            )
    shifted = [t + b_tilde for t in terms]
    c_bound = Fraction(1)
    for j in range(imap.arity):
        slot_args = shifted[:j] + [b_tilde] + shifted[j + 1 :]
        c_bound = max(c_bound, abs(imap.evaluate(slot_args)))

    delta = min(Fraction(1), eps / (2 * imap.arity * c_bound))
    n = max(int(a.modulus(delta)) for a in args)
    final = [a.sequence(n) for a in args]
    for t in final:
        if not imap.nef_cone.contains(t):
            raise PositivityError(
                "sequence term leaves the nef region; the extension bound fails"
            )
    return float(imap.evaluate(final))
