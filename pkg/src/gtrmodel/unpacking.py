"""Packed versus unpacked probability assignments.

A packed yes/no question ``A`` and its unpacked refinement into
``(yes-and-B_y, yes-and-B_n, no)`` are additive when the refined yes-masses
add up to the packed yes-probability. This module measures the gap, splits a
Hilbert-space yes-probability into its direct and interference parts, and
realizes a gap in the tension-reduction model by giving the packed and
unpacked questions different densities.
"""
from dataclasses import dataclass

import numpy as np

from gtrmodel.core import PROB_TOL, LocallyUniformDistribution, single_outcome_probabilities
from gtrmodel.errors import ParameterDomainError
from gtrmodel.hilbert import IDENTITY, as_projector, as_state

__all__ = [
    "PackedResult",
    "UnpackedResult",
    "additivity_gap",
    "check_degenerate_equality",
    "interference_decomposition",
    "gtr_unpacking_gap",
    "classify",
]


def _check_probs(name, values):
    if any(not (-PROB_TOL <= v <= 1.0 + PROB_TOL) for v in values):
        raise ParameterDomainError(f"{name} has a probability outside [0, 1]: {values}")
    if abs(sum(values) - 1.0) > PROB_TOL:
        raise ParameterDomainError(f"{name} sums to {sum(values)!r}, not 1")


@dataclass(frozen=True)
class PackedResult:
    p_yes: float
    p_no: float

    def __post_init__(self):
        _check_probs("packed result", (self.p_yes, self.p_no))


@dataclass(frozen=True)
class UnpackedResult:
    p_yy: float
    p_yn: float
    p_n: float

    def __post_init__(self):
        _check_probs("unpacked result", (self.p_yy, self.p_yn, self.p_n))

    @property
    def p_yes(self):
        return self.p_yy + self.p_yn


def classify(gap, tol=1e-9):
    if gap > tol:
        return "superadditive"
    if gap < -tol:
        return "subadditive"
    return "additive"


def additivity_gap(packed, unpacked, tol=1e-9):
    """Return ``(gap, classification)`` with ``gap = p_yes - (p_yy + p_yn)``."""
    gap = packed.p_yes - unpacked.p_yes
    return gap, classify(gap, tol)


def check_degenerate_equality(packed, unpacked, tol=1e-9):
    """True when the unpacked result coarse-grains exactly onto the packed one."""
    return abs(packed.p_yes - unpacked.p_yes) <= tol and abs(packed.p_no - unpacked.p_n) <= tol


def interference_decomposition(psi, proj_a_yes, proj_b_yes, i="yes"):
    """Split ``<psi|P_i^A|psi>`` by inserting the B resolution on both sides.

    Returns
    -------
    direct_b_yes, direct_b_no, interference : float
        ``<P_y^B P_i^A P_y^B>``, ``<P_n^B P_i^A P_n^B>`` and the expectation of
        the cross terms ``P_y^B P_i^A P_n^B + P_n^B P_i^A P_y^B``.
    """
    psi = as_state(psi)
    pa, pby = as_projector(proj_a_yes), as_projector(proj_b_yes)
    if i in ("yes", "y"):
        pi = pa
    elif i in ("no", "n"):
        pi = IDENTITY - pa
    else:
        raise ParameterDomainError(f"i must be 'yes' or 'no', got {i!r}")
    pbn = IDENTITY - pby

    def expect(op):
        return float(np.vdot(psi, op @ psi).real)

    return (
        expect(pby @ pi @ pby),
        expect(pbn @ pi @ pbn),
        expect(pby @ pi @ pbn + pbn @ pi @ pby),
    )


def gtr_unpacking_gap(cos_theta_a, rho_packed, rho_unpacked):
    """Packed minus unpacked yes-probability for two densities on the same geometry.

    Both questions see the state at the same angle from the yes-direction;
    only the density differs.
    """
    rho_packed, rho_unpacked = (
        r if isinstance(r, LocallyUniformDistribution) else LocallyUniformDistribution(*r)
        for r in (rho_packed, rho_unpacked)
    )
    for name, rho in (("rho_packed", rho_packed), ("rho_unpacked", rho_unpacked)):
        if not rho.contains(cos_theta_a):
            raise ParameterDomainError(f"cos_theta_a={cos_theta_a!r} lies outside the support of {name}")
    packed_yes, _ = single_outcome_probabilities(rho_packed, cos_theta_a)
    unpacked_yes, _ = single_outcome_probabilities(rho_unpacked, cos_theta_a)
    return packed_yes - unpacked_yes
