"""Measurement sequences with memory.

A :class:`Session` tracks the current state and the (possibly updated)
densities of both measurements. Measuring one observable after the other has
been answered truncates the other's density at the cut seen from the new
state, keeping only the side that reproduces the earlier answer. Repeating
that earlier question is then certain to give the same answer, while the
first pass through each question still shows the usual order effects.
"""
from dataclasses import dataclass

import numpy as np

from gtrmodel.core import PiecewiseDistribution, integrate
from gtrmodel.errors import DegenerateDataError, ImpossibleOutcomeError, ParameterDomainError

__all__ = ["Step", "Session", "measure", "truncate_renormalize", "run_sequence", "parse_sequence"]

INITIAL = "initial"
LABELS = ("A", "B")


def truncate_renormalize(dist, cut, side):
    """Restrict ``dist`` to ``[-1, cut)`` (``side="below"``) or ``[cut, 1]`` (``"above"``) and renormalize.

    Raises
    ------
    DegenerateDataError
        If the retained interval carries no mass.
    """
    cut = float(cut)
    if not (-1.0 <= cut <= 1.0):
        raise ParameterDomainError(f"cut must lie in [-1, 1], got {cut!r}")
    if side == "below":
        mass = dist.cumulative(cut)
        keep = lambda lo, hi: (lo, min(hi, cut))  # noqa: E731
    elif side == "above":
        mass = 1.0 - dist.cumulative(cut)
        keep = lambda lo, hi: (max(lo, cut), hi)  # noqa: E731
    else:
        raise ParameterDomainError(f"side must be 'below' or 'above', got {side!r}")
    if mass <= 0.0:
        raise DegenerateDataError(f"truncation {side} {cut!r} retains zero mass")
    pieces = []
    for lo, hi, h in dist.intervals():
        lo, hi = keep(lo, hi)
        if hi > lo and h > 0.0:
            pieces.append((lo, hi, h / mass))
    return PiecewiseDistribution.from_intervals(pieces)


@dataclass(frozen=True)
class Step:
    label: str
    outcome: str
    probability: float

    def as_dict(self):
        return {"label": self.label, "outcome": self.outcome, "probability": self.probability}


class Session:
    """Single-owner mutable state of one respondent answering A/B questions.

    Parameters
    ----------
    params : ModelParams
    dist_a, dist_b : PiecewiseDistribution, optional
        Override the locally uniform densities implied by ``params``.
    """

    def __init__(self, params, dist_a=None, dist_b=None):
        self.params = params
        self.state = INITIAL
        self.dist = {
            "A": dist_a if dist_a is not None else params.rho_a.to_piecewise(),
            "B": dist_b if dist_b is not None else params.rho_b.to_piecewise(),
        }
        self.last_outcome = {"A": None, "B": None}
        self.history = []
        # snapshots of (dist_a, dist_b) after each step, index 0 = before any step
        self.snapshots = [(self.dist["A"], self.dist["B"])]

    @property
    def dist_a(self):
        return self.dist["A"]

    @property
    def dist_b(self):
        return self.dist["B"]

    def cosine(self, which):
        """Cosine between the current state and the yes-direction of ``which``."""
        p = self.params
        if self.state == INITIAL:
            return p.cos_theta_a if which == "A" else p.cos_theta_b
        label, outcome = self.state[0], self.state[1]
        sign = 1.0 if outcome == "y" else -1.0
        if label == which:
            return sign
        return sign * p.cos_theta

    def yes_probability(self, which):
        return integrate(self.dist[which], -1.0, max(-1.0, min(1.0, self.cosine(which))))

    def measure(self, which, rng=None, outcome=None):
        """Perform one measurement; returns ``(outcome, probability)``.

        Exactly one of ``rng`` (draw) or ``outcome`` (``"yes"``/``"no"``, forced)
        must be given.
        """
        which = _label(which)
        if (rng is None) == (outcome is None):
            raise ParameterDomainError("pass exactly one of rng or outcome")
        cut = max(-1.0, min(1.0, self.cosine(which)))
        p_yes = integrate(self.dist[which], -1.0, cut)
        if outcome is None:
            x = self.dist[which].inverse_cdf(rng.random())
            outcome = "yes" if x < cut else "no"
        else:
            outcome = _outcome(outcome)
        prob = p_yes if outcome == "yes" else 1.0 - p_yes
        if prob <= 0.0:
            raise ImpossibleOutcomeError(f"{which}={outcome} has probability zero in state {self.state!r}")

        self.state = which + outcome[0]
        other = "B" if which == "A" else "A"
        earlier = self.last_outcome[other]
        if earlier is not None:
            other_cut = max(-1.0, min(1.0, self.cosine(other)))
            side = "below" if earlier == "yes" else "above"
            self.dist[other] = truncate_renormalize(self.dist[other], other_cut, side)
        self.last_outcome[which] = outcome
        self.history.append(Step(which, outcome, prob))
        self.snapshots.append((self.dist["A"], self.dist["B"]))
        return outcome, prob


def _label(which):
    which = str(which).upper()
    if which not in LABELS:
        raise ParameterDomainError(f"measurement must be A or B, got {which!r}")
    return which


def _outcome(value):
    v = str(value).lower()
    if v in ("y", "yes"):
        return "yes"
    if v in ("n", "no"):
        return "no"
    raise ParameterDomainError(f"outcome must be yes or no, got {value!r}")


def measure(session, which, rng_or_outcome):
    """Functional form of :meth:`Session.measure`; returns ``(outcome, probability, session)``."""
    if isinstance(rng_or_outcome, np.random.Generator):
        outcome, prob = session.measure(which, rng=rng_or_outcome)
    else:
        outcome, prob = session.measure(which, outcome=rng_or_outcome)
    return outcome, prob, session


def parse_sequence(text):
    """Parse ``"A,B,A"``; an item may force its outcome as ``A:y`` or ``B:no``."""
    items = []
    for pos, raw in enumerate(str(text).split(",")):
        raw = raw.strip()
        if not raw:
            raise ParameterDomainError(f"empty item at position {pos} in sequence {text!r}")
        label, _, forced = raw.partition(":")
        try:
            items.append((_label(label), _outcome(forced) if forced else None))
        except ParameterDomainError as exc:
            raise ParameterDomainError(f"item {pos} ({raw!r}): {exc}") from None
    return items


def run_sequence(params, labels, seed, session=None):
    """Run a question sequence and return the list of :class:`Step`.

    ``labels`` holds ``"A"``/``"B"`` items, or ``(label, forced_outcome)``
    pairs where ``forced_outcome`` may be None.
    """
    if isinstance(labels, str):
        labels = parse_sequence(labels)
    if not labels:
        raise ParameterDomainError("the sequence must contain at least one measurement")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    session = session if session is not None else Session(params)
    for item in labels:
        label, forced = item if isinstance(item, tuple) else (item, None)
        if forced is None:
            session.measure(label, rng=rng)
        else:
            session.measure(label, outcome=forced)
    return list(session.history)
