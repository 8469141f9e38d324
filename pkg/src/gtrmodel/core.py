"""Distributions and forward outcome probabilities of the tension-reduction model.

A dichotomic measurement is described by a probability density on the
segment [-1, 1]. When the state makes an angle ``theta`` with the measurement's
yes-direction, the yes-outcome is selected with probability equal to the mass
of the density below ``cos(theta)``. The uniform density 1/2 reproduces the
Born rule; locally uniform densities (height ``1/(2 eps)`` on
``[d - eps, d + eps]``) give the closed forms implemented here.
"""
from dataclasses import dataclass, fields

import numpy as np

from gtrmodel.errors import InfeasibleError, NormalizationError, ParameterDomainError
from gtrmodel.kernels import inverse_cdf as _inverse_cdf

__all__ = [
    "PROB_TOL",
    "GEOM_TOL",
    "LocallyUniformDistribution",
    "PiecewiseDistribution",
    "ModelParams",
    "RatioSolution",
    "SequentialProbTable",
    "BlochVector",
    "single_outcome_probabilities",
    "integrate",
    "sequential_probabilities",
    "probabilities_from_params",
]

PROB_TOL = 1e-9
# slack for support-containment and range checks on floating inputs
GEOM_TOL = 1e-12

OUTCOMES = ("yy", "yn", "ny", "nn")


@dataclass(frozen=True)
class LocallyUniformDistribution:
    """Density ``1/(2 epsilon)`` on ``[d - epsilon, d + epsilon]``, zero elsewhere."""

    epsilon: float
    d: float

    def __post_init__(self):
        eps, d = float(self.epsilon), float(self.d)
        if not (0.0 < eps <= 1.0 + GEOM_TOL):
            raise ParameterDomainError(f"epsilon must lie in (0, 1], got {eps!r}")
        if abs(d) > 1.0 - eps + GEOM_TOL:
            raise ParameterDomainError(
                f"d={d!r} puts the support [d-eps, d+eps] outside [-1, 1] for epsilon={eps!r}"
            )
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "d", d)

    @property
    def support(self):
        return self.d - self.epsilon, self.d + self.epsilon

    def contains(self, x, tol=GEOM_TOL):
        lo, hi = self.support
        return lo - tol <= x <= hi + tol

    def to_piecewise(self):
        lo, hi = self.support
        return PiecewiseDistribution.from_intervals(
            [(max(lo, -1.0), min(hi, 1.0), 1.0 / (2.0 * self.epsilon))]
        )


class PiecewiseDistribution:
    """Piecewise-constant probability density on [-1, 1].

    Parameters
    ----------
    breakpoints : array_like
        Strictly increasing, starting at -1 and ending at 1.
    densities : array_like
        Non-negative density on each interval ``[breakpoints[k], breakpoints[k+1])``.

    The cumulative masses at the breakpoints are cached in :attr:`cdf` with the
    final entry pinned to exactly 1, so that a cut placed on the upper edge of
    the support integrates to exactly one.
    """

    __slots__ = ("breakpoints", "densities", "cdf")

    def __init__(self, breakpoints, densities, tol=1e-12):
        bp = np.array(breakpoints, dtype=float)
        dens = np.array(densities, dtype=float)
        if bp.ndim != 1 or dens.ndim != 1 or bp.size != dens.size + 1 or dens.size == 0:
            raise ParameterDomainError(
                "need n+1 breakpoints for n densities (n >= 1), "
                f"got {bp.size} breakpoints and {dens.size} densities"
            )
        if bp[0] != -1.0 or bp[-1] != 1.0:
            raise ParameterDomainError("breakpoints must start at -1 and end at 1")
        if np.any(np.diff(bp) <= 0.0):
            raise ParameterDomainError("breakpoints must be strictly increasing")
        if np.any(dens < 0.0) or not np.all(np.isfinite(dens)):
            raise ParameterDomainError("densities must be finite and non-negative")
        masses = dens * np.diff(bp)
        cdf = np.concatenate(([0.0], np.cumsum(masses)))
        total = cdf[-1]
        if abs(total - 1.0) > tol:
            raise ParameterDomainError(f"density integrates to {total!r}, not 1")
        cdf /= total
        cdf[-1] = 1.0
        for arr in (bp, dens, cdf):
            arr.setflags(write=False)
        self.breakpoints = bp
        self.densities = dens
        self.cdf = cdf

    @classmethod
    def uniform(cls):
        """The Born-rule density 1/2 on the whole segment."""
        return cls([-1.0, 1.0], [0.5])

    @classmethod
    def from_intervals(cls, intervals, tol=1e-12):
        """Build from ``(lo, hi, height)`` triples; gaps get zero density.

        Intervals must be disjoint and lie inside [-1, 1].
        """
        pieces = sorted((float(lo), float(hi), float(h)) for lo, hi, h in intervals if hi > lo)
        bps, dens = [-1.0], []
        for lo, hi, h in pieces:
            if lo < bps[-1] or hi > 1.0:
                raise ParameterDomainError("intervals overlap or leave [-1, 1]")
            if lo > bps[-1]:
                dens.append(0.0)
                bps.append(lo)
            dens.append(h)
            bps.append(hi)
        if bps[-1] < 1.0:
            dens.append(0.0)
            bps.append(1.0)
        return cls(bps, dens, tol=tol)

    def __repr__(self):
        return (
            f"PiecewiseDistribution(breakpoints={self.breakpoints.tolist()!r}, "
            f"densities={self.densities.tolist()!r})"
        )

    def __eq__(self, other):
        if not isinstance(other, PiecewiseDistribution):
            return NotImplemented
        return np.array_equal(self.breakpoints, other.breakpoints) and np.array_equal(
            self.densities, other.densities
        )

    def __hash__(self):
        return hash((self.breakpoints.tobytes(), self.densities.tobytes()))

    def intervals(self):
        """Yield ``(lo, hi, density)`` for every interval."""
        bp = self.breakpoints
        for k, h in enumerate(self.densities):
            yield float(bp[k]), float(bp[k + 1]), float(h)

    def cumulative(self, x):
        """Mass below ``x`` (exact for a piecewise-constant density)."""
        x = float(x)
        if x <= -1.0:
            return 0.0
        if x >= 1.0:
            return 1.0
        bp = self.breakpoints
        k = int(np.searchsorted(bp, x, side="right")) - 1
        if x == bp[k]:
            return float(self.cdf[k])
        value = self.cdf[k] + self.densities[k] * (x - bp[k])
        return float(min(value, self.cdf[k + 1]))

    def total(self):
        return self.cumulative(1.0) - self.cumulative(-1.0)

    def inverse_cdf(self, u):
        """Map uniform draws in [0, 1) to points distributed with this density.

        Zero-density intervals are never returned; draws landing in interval
        ``k`` stay strictly below its upper edge.
        """
        u = np.asarray(u, dtype=float)
        out = _inverse_cdf(np.atleast_1d(u).ravel(), self.breakpoints, self.cdf, self.densities)
        return out.reshape(u.shape) if u.ndim else float(out[0])


def integrate(dist, lo, hi):
    """Mass of ``dist`` on ``[lo, hi]``.

    Raises
    ------
    ParameterDomainError
        If the bounds leave [-1, 1] or ``lo > hi``.
    """
    lo, hi = float(lo), float(hi)
    if not (-1.0 <= lo <= hi <= 1.0):
        raise ParameterDomainError(f"need -1 <= lo <= hi <= 1, got lo={lo!r}, hi={hi!r}")
    if lo == hi:
        return 0.0
    return dist.cumulative(hi) - dist.cumulative(lo)


def single_outcome_probabilities(dist, cos_angle):
    """Yes/no probabilities of one measurement with a locally uniform density.

    Inside the support the yes-probability is ``(1 + (cos_angle - d)/eps)/2``;
    below or above the support it is 0 or 1.
    """
    if not isinstance(dist, LocallyUniformDistribution):
        raise ParameterDomainError(f"expected a LocallyUniformDistribution, got {type(dist).__name__}")
    c = float(cos_angle)
    if not (-1.0 - GEOM_TOL <= c <= 1.0 + GEOM_TOL):
        raise ParameterDomainError(f"cos_angle must lie in [-1, 1], got {c!r}")
    p_yes = 0.5 * (1.0 + (c - dist.d) / dist.epsilon)
    p_yes = min(1.0, max(0.0, p_yes))
    return p_yes, 1.0 - p_yes


@dataclass(frozen=True)
class RatioSolution:
    """The six scale-free combinations fixed by the eight sequential probabilities."""

    da_over_ea: float
    costhetaa_over_ea: float
    costheta_over_ea: float
    db_over_eb: float
    costhetab_over_eb: float
    costheta_over_eb: float

    def __post_init__(self):
        for f in fields(self):
            v = float(getattr(self, f.name))
            if not np.isfinite(v):
                raise ParameterDomainError(f"{f.name} must be finite, got {v!r}")
            object.__setattr__(self, f.name, v)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def as_tuple(self):
        return tuple(getattr(self, f.name) for f in fields(self))

    def brackets(self):
        """Normalized cut positions entering the closed forms.

        Returns ``a, b, b2, c, a1, a2``: the first-measurement terms ``a``
        (A from the initial state) and ``c`` (B from the initial state), and
        the second-measurement terms ``b``/``b2`` (B after A_y/A_n) and
        ``a1``/``a2`` (A after B_y/B_n), sign conventions as in
        :func:`sequential_probabilities`.
        """
        a = self.costhetaa_over_ea - self.da_over_ea
        b = self.costheta_over_eb - self.db_over_eb
        b2 = self.costheta_over_eb + self.db_over_eb
        c = self.costhetab_over_eb - self.db_over_eb
        a1 = self.costheta_over_ea - self.da_over_ea
        a2 = self.costheta_over_ea + self.da_over_ea
        return a, b, b2, c, a1, a2


@dataclass(frozen=True)
class ModelParams:
    """A concrete parameter set for two measurements A and B.

    ``cos_theta_a`` and ``cos_theta_b`` are the cosines between the initial
    state and the yes-directions of A and B; ``cos_theta`` is the cosine
    between the two yes-directions. Construction raises
    :class:`InfeasibleError` naming every violated constraint.
    """

    eps_a: float
    d_a: float
    eps_b: float
    d_b: float
    cos_theta_a: float
    cos_theta_b: float
    cos_theta: float

    def __post_init__(self):
        for f in fields(self):
            v = float(getattr(self, f.name))
            if not np.isfinite(v):
                raise ParameterDomainError(f"{f.name} must be finite, got {v!r}")
            object.__setattr__(self, f.name, v)
        bad = self.violations()
        if bad:
            raise InfeasibleError("infeasible parameters: " + ", ".join(bad), constraints=bad)

    def violations(self, tol=GEOM_TOL):
        """Names of violated constraints (empty when the parameters are valid)."""
        bad = []
        for side, eps, d in (("a", self.eps_a, self.d_a), ("b", self.eps_b, self.d_b)):
            if not (0.0 < eps <= 1.0 + tol):
                bad.append(f"eps_{side} in (0, 1]")
            elif abs(d) > 1.0 - eps + tol:
                bad.append(f"|d_{side}| <= 1 - eps_{side}")
        for name in ("cos_theta_a", "cos_theta_b", "cos_theta"):
            if abs(getattr(self, name)) > 1.0 + tol:
                bad.append(f"{name} in [-1, 1]")
        checks = (
            ("cos_theta_a in support A", self.cos_theta_a, self.eps_a, self.d_a),
            ("cos_theta in support A", self.cos_theta, self.eps_a, self.d_a),
            ("cos_theta in support B", self.cos_theta, self.eps_b, self.d_b),
            ("cos_theta_b in support B", self.cos_theta_b, self.eps_b, self.d_b),
        )
        for label, c, eps, d in checks:
            if eps > 0.0 and abs(c - d) > eps + tol:
                bad.append(label)
        return bad

    @property
    def rho_a(self):
        return LocallyUniformDistribution(min(self.eps_a, 1.0), self.d_a)

    @property
    def rho_b(self):
        return LocallyUniformDistribution(min(self.eps_b, 1.0), self.d_b)

    def ratios(self):
        return RatioSolution(
            da_over_ea=self.d_a / self.eps_a,
            costhetaa_over_ea=self.cos_theta_a / self.eps_a,
            costheta_over_ea=self.cos_theta / self.eps_a,
            db_over_eb=self.d_b / self.eps_b,
            costhetab_over_eb=self.cos_theta_b / self.eps_b,
            costheta_over_eb=self.cos_theta / self.eps_b,
        )

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class SequentialProbTable:
    """Outcome probabilities of both measurement orders.

    ``ab`` holds ``p(A_y B_y), p(A_y B_n), p(A_n B_y), p(A_n B_n)``; ``ba``
    holds ``p(B_y A_y), p(B_y A_n), p(B_n A_y), p(B_n A_n)`` (first letter is
    always the first measurement).
    """

    ab: tuple
    ba: tuple

    def __post_init__(self):
        for name in ("ab", "ba"):
            vals = tuple(float(v) for v in getattr(self, name))
            if len(vals) != 4:
                raise ParameterDomainError(f"order {name} needs 4 probabilities, got {len(vals)}")
            if any(not (-PROB_TOL <= v <= 1.0 + PROB_TOL) for v in vals):
                raise ParameterDomainError(f"order {name} has a probability outside [0, 1]: {vals}")
            if abs(sum(vals) - 1.0) > PROB_TOL:
                raise NormalizationError(f"order {name} sums to {sum(vals)!r}, not 1")
            object.__setattr__(self, name, vals)

    @classmethod
    def from_raw(cls, ab, ba, renormalize_tol=1e-4):
        """Build from rounded data, rescaling each order that misses 1 by at most ``renormalize_tol``."""
        out = []
        for name, vals in (("ab", ab), ("ba", ba)):
            vals = [float(v) for v in vals]
            s = sum(vals)
            if abs(s - 1.0) > renormalize_tol:
                raise NormalizationError(
                    f"order {name} sums to {s!r}; more than {renormalize_tol:g} away from 1"
                )
            out.append(tuple(v / s for v in vals))
        return cls(*out)

    def order(self, which):
        which = which.upper()
        if which == "AB":
            return self.ab
        if which == "BA":
            return self.ba
        raise ParameterDomainError(f"order must be AB or BA, got {which!r}")

    def as_dict(self):
        return {
            "order_ab": dict(zip(OUTCOMES, self.ab)),
            "order_ba": dict(zip(OUTCOMES, self.ba)),
        }


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))
        norm = float(np.sqrt(self.x**2 + self.y**2 + self.z**2))
        if abs(norm - 1.0) > GEOM_TOL:
            raise ParameterDomainError(f"Bloch vector must have unit norm, got |v|={norm!r}")

    def as_array(self):
        return np.array([self.x, self.y, self.z])

    def dot(self, other):
        return self.x * other.x + self.y * other.y + self.z * other.z


def normalize_order(order):
    order = str(order).upper()
    if order not in ("AB", "BA"):
        raise ParameterDomainError(f"order must be AB or BA, got {order!r}")
    return order


def sequential_probabilities(ratios, order):
    """Four outcome probabilities of a two-step measurement.

    Parameters
    ----------
    ratios : RatioSolution
    order : {"AB", "BA"}

    Returns
    -------
    tuple of float
        ``(yy, yn, ny, nn)`` where the first letter refers to the first
        measurement performed.

    Raises
    ------
    InfeasibleError
        If any normalized cut lies outside [-1, 1], which would make a
        probability negative.
    """
    order = normalize_order(order)
    a, b, b2, c, a1, a2 = ratios.brackets()
    if order == "AB":
        first, after_yes, after_no = a, b, b2
        names = ("cos_theta_a/eps_a - d_a/eps_a", "(cos_theta - d_b)/eps_b", "(cos_theta + d_b)/eps_b")
    else:
        first, after_yes, after_no = c, a1, a2
        names = ("cos_theta_b/eps_b - d_b/eps_b", "(cos_theta - d_a)/eps_a", "(cos_theta + d_a)/eps_a")
    bad = [n for n, r in zip(names, (first, after_yes, after_no)) if abs(r) > 1.0 + GEOM_TOL]
    if bad:
        raise InfeasibleError(
            "infeasible ratios, outside [-1, 1]: " + ", ".join(bad), constraints=bad
        )
    yy = 0.25 * (1.0 + after_yes) * (1.0 + first)
    yn = 0.25 * (1.0 - after_yes) * (1.0 + first)
    ny = 0.25 * (1.0 - after_no) * (1.0 - first)
    nn = 0.25 * (1.0 + after_no) * (1.0 - first)
    return yy, yn, ny, nn


def probabilities_from_params(params, order):
    """Same as :func:`sequential_probabilities` on the ratios induced by ``params``."""
    return sequential_probabilities(params.ratios(), order)
