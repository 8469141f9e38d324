"""Fitting the model to question-order data.

Eight sequential probabilities fix six scale-free ratios exactly; one more
number (``eps_a``) must be chosen to obtain concrete parameters.
"""
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from gtrmodel.core import (
    GEOM_TOL,
    BlochVector,
    ModelParams,
    RatioSolution,
    SequentialProbTable,
)
from gtrmodel.errors import (
    DegenerateDataError,
    InfeasibleError,
    NoEmbeddingError,
)

__all__ = [
    "RatioSolution",
    "EpsilonInterval",
    "FeasibilityReport",
    "DEFAULT_EPS_A",
    "fit_ratios",
    "concretize",
    "admissible_epsilon_a_interval",
    "feasibility_report",
    "embed_bloch",
]

DEFAULT_EPS_A = 0.5
RATIO_ZERO_TOL = 1e-12
BORN_TOL = 1e-9


def _split(num_yes, num_no):
    """``(p_yes - p_no) / (p_yes + p_no)`` for a conditional pair."""
    total = num_yes + num_no
    if total <= 0.0:
        raise DegenerateDataError("a first-measurement outcome has zero probability")
    return (num_yes - num_no) / total


def fit_ratios(table):
    """Invert the closed-form sequential probabilities.

    Parameters
    ----------
    table : SequentialProbTable

    Returns
    -------
    RatioSolution

    Raises
    ------
    DegenerateDataError
        If either outcome of a first measurement has probability zero, so a
        conditional split is undefined.
    """
    if not isinstance(table, SequentialProbTable):
        table = SequentialProbTable(*table)
    ab_yy, ab_yn, ab_ny, ab_nn = table.ab
    ba_yy, ba_yn, ba_ny, ba_nn = table.ba
    p_ay = ab_yy + ab_yn
    p_by = ba_yy + ba_yn
    if p_ay in (0.0, 1.0) or ab_ny + ab_nn == 0.0 or p_by in (0.0, 1.0) or ba_ny + ba_nn == 0.0:
        raise DegenerateDataError("a first-measurement marginal is 0 or 1; the ratios are undetermined")
    a = 2.0 * p_ay - 1.0
    b = _split(ab_yy, ab_yn)
    b2 = _split(ab_nn, ab_ny)
    c = 2.0 * p_by - 1.0
    a1 = _split(ba_yy, ba_yn)
    a2 = _split(ba_nn, ba_ny)
    da = 0.5 * (a2 - a1)
    db = 0.5 * (b2 - b)
    return RatioSolution(
        da_over_ea=da,
        costhetaa_over_ea=a + da,
        costheta_over_ea=0.5 * (a2 + a1),
        db_over_eb=db,
        costhetab_over_eb=c + db,
        costheta_over_eb=0.5 * (b + b2),
    )


def _eps_b_factor(ratios):
    """``eps_b / eps_a``, or None when cos(theta) = 0 leaves it free."""
    ct_a, ct_b = ratios.costheta_over_ea, ratios.costheta_over_eb
    if abs(ct_b) <= RATIO_ZERO_TOL:
        if abs(ct_a) <= RATIO_ZERO_TOL:
            return None
        raise InfeasibleError(
            "inconsistent ratios: cos_theta/eps_b = 0 but cos_theta/eps_a != 0",
            constraints=["cos_theta/eps_a and cos_theta/eps_b both zero or both nonzero"],
        )
    return ct_a / ct_b


def concretize(ratios, eps_a=DEFAULT_EPS_A):
    """Fix the free scale and return a full parameter set.

    When ``cos_theta = 0`` the ratios leave ``eps_b`` undetermined; it is then
    set equal to ``eps_a``.

    Raises
    ------
    InfeasibleError
        Naming each violated constraint (eps range, d range, support
        containment), or for inconsistent cos(theta) ratios.
    """
    eps_a = float(eps_a)
    if not (0.0 < eps_a <= 1.0):
        raise InfeasibleError(f"eps_a must lie in (0, 1], got {eps_a!r}", constraints=["eps_a in (0, 1]"])
    k = _eps_b_factor(ratios)
    cos_theta = eps_a * ratios.costheta_over_ea
    eps_b = eps_a if k is None else eps_a * k
    return ModelParams(
        eps_a=eps_a,
        d_a=eps_a * ratios.da_over_ea,
        eps_b=eps_b,
        d_b=eps_b * ratios.db_over_eb,
        cos_theta_a=eps_a * ratios.costhetaa_over_ea,
        cos_theta_b=eps_b * ratios.costhetab_over_eb,
        cos_theta=cos_theta,
    )


class EpsilonInterval(NamedTuple):
    """Half-open interval ``(lo, hi]`` of admissible ``eps_a``; empty when ``hi <= lo``."""

    lo: float
    hi: float

    @property
    def empty(self):
        return self.hi <= self.lo

    def __contains__(self, eps):
        return self.lo < eps <= self.hi


def _scale_free_violations(ratios):
    """Support-containment constraints that do not depend on ``eps_a``."""
    r = ratios
    checks = (
        ("cos_theta_a in support A", r.costhetaa_over_ea - r.da_over_ea),
        ("cos_theta in support A", r.costheta_over_ea - r.da_over_ea),
        ("cos_theta in support B", r.costheta_over_eb - r.db_over_eb),
        ("cos_theta_b in support B", r.costhetab_over_eb - r.db_over_eb),
    )
    return [name for name, v in checks if abs(v) > 1.0 + GEOM_TOL]


def admissible_epsilon_a_interval(ratios):
    """Largest ``(lo, hi]`` such that :func:`concretize` succeeds for every ``eps_a`` in it.

    Every constraint is either independent of ``eps_a`` or an upper bound
    ``eps_a * c <= 1``, so the admissible set is always ``(0, hi]``.
    """
    if _scale_free_violations(ratios):
        return EpsilonInterval(0.0, 0.0)
    try:
        k = _eps_b_factor(ratios)
    except InfeasibleError:
        return EpsilonInterval(0.0, 0.0)
    if k is None:
        k = 1.0
    if k <= 0.0:
        return EpsilonInterval(0.0, 0.0)
    r = ratios
    # eps_a * c <= 1 for each c below
    scales = [
        1.0,
        1.0 + abs(r.da_over_ea),
        k,
        k * (1.0 + abs(r.db_over_eb)),
        abs(r.costhetaa_over_ea),
        abs(r.costheta_over_ea),
        k * abs(r.costhetab_over_eb),
    ]
    hi = min(1.0 / c for c in scales if c > 0.0)
    return EpsilonInterval(0.0, hi)


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of checking a ratio set against the model's constraints.

    ``constraints`` maps each named check to True (passes) / False.
    ``embedding_eps_a`` is the ``eps_a`` at which the Bloch-sphere embedding
    was tested (None if no admissible value exists).
    """

    born_compatible: bool
    constraints: dict
    interval: EpsilonInterval
    same_rule_possible: bool
    embedding_eps_a: float = None
    notes: list = field(default_factory=list)

    @property
    def feasible(self):
        return all(self.constraints.values())

    def as_dict(self):
        return {
            "born_compatible": self.born_compatible,
            "same_rule_possible": self.same_rule_possible,
            "constraints": dict(self.constraints),
            "admissible_eps_a": {"lo": self.interval.lo, "hi": self.interval.hi, "empty": self.interval.empty},
            "embedding_eps_a": self.embedding_eps_a,
            "notes": list(self.notes),
        }


def feasibility_report(ratios, eps_a=DEFAULT_EPS_A):
    """Check a ratio set against the model and against the Born rule.

    The Born rule needs ``d_a = d_b = 0`` with ``eps_a = eps_b = 1``, so it is
    available iff both d-ratios vanish and every remaining ratio is a valid
    cosine. A single common density for A and B needs equal ``(eps, d)``
    pairs, i.e. equal cos(theta) ratios and equal d-ratios.

    The spherical-triangle check is run at ``eps_a`` when that value is
    admissible, else at the upper end of the admissible interval.
    """
    r = ratios
    notes = []
    scale_free = _scale_free_violations(r)
    interval = admissible_epsilon_a_interval(r)
    try:
        k = _eps_b_factor(r)
        consistent = True
    except InfeasibleError as exc:
        k, consistent = None, False
        notes.append(str(exc))
    constraints = {
        "support containment": not scale_free,
        "cos_theta ratios consistent": consistent,
        # eps_b = eps_a * k must be positive
        "eps range": consistent and (k is None or k > 0.0),
        # some eps_a keeps both supports inside [-1, 1]
        "d range": not interval.empty,
        "eps_a admissible": eps_a is not None and eps_a in interval,
    }
    if scale_free:
        notes.append("violated: " + ", ".join(scale_free))

    embed_at = None
    if not interval.empty:
        embed_at = eps_a if eps_a is not None and eps_a in interval else interval.hi
        try:
            embed_bloch(concretize(r, embed_at))
            constraints["spherical-triangle embedding"] = True
        except InfeasibleError as exc:
            constraints["spherical-triangle embedding"] = False
            notes.append(str(exc))
    else:
        constraints["spherical-triangle embedding"] = False

    others = (r.costhetaa_over_ea, r.costheta_over_ea, r.costhetab_over_eb, r.costheta_over_eb)
    born = (
        abs(r.da_over_ea) <= BORN_TOL
        and abs(r.db_over_eb) <= BORN_TOL
        and all(abs(v) <= 1.0 + BORN_TOL for v in others)
    )
    same_rule = (
        not interval.empty
        and abs(r.costheta_over_ea - r.costheta_over_eb) <= BORN_TOL
        and abs(r.da_over_ea - r.db_over_eb) <= BORN_TOL
    )
    return FeasibilityReport(
        born_compatible=born,
        constraints=constraints,
        interval=interval,
        same_rule_possible=same_rule,
        embedding_eps_a=embed_at,
        notes=notes,
    )


def embed_bloch(params):
    """Place the initial state and both yes-directions on the unit sphere.

    The frame is fixed by ``a_y = (0, 0, 1)``, ``b_y`` in the xz-plane with
    non-negative x, and ``x_psi`` with non-negative y.

    Returns
    -------
    x_psi, a_y, b_y : BlochVector

    Raises
    ------
    NoEmbeddingError
        If ``cos(theta_a + theta) <= cos(theta_b) <= cos(theta_a - theta)`` fails.
    """
    ca, cb, c = params.cos_theta_a, params.cos_theta_b, params.cos_theta
    ca = max(-1.0, min(1.0, ca))
    c = max(-1.0, min(1.0, c))
    sa = math.sqrt(max(0.0, 1.0 - ca * ca))
    s = math.sqrt(max(0.0, 1.0 - c * c))
    # the triangle condition, written without arccos
    lower = ca * c - sa * s
    upper = ca * c + sa * s
    if not (lower - GEOM_TOL <= cb <= upper + GEOM_TOL):
        raise NoEmbeddingError(
            f"no spherical triangle with cos(theta_a)={ca!r}, cos(theta)={c!r}, cos(theta_b)={cb!r}",
            constraints=["spherical-triangle embedding"],
        )
    a_y = BlochVector(0.0, 0.0, 1.0)
    b_y = BlochVector(s, 0.0, c)
    if s > 0.0:
        x = (cb - ca * c) / s
        x = max(-sa, min(sa, x))
        y = math.sqrt(max(0.0, 1.0 - ca * ca - x * x))
    else:
        x, y = sa, 0.0
    norm = math.sqrt(x * x + y * y + ca * ca)
    x_psi = BlochVector(x / norm, y / norm, ca / norm)
    return x_psi, a_y, b_y

