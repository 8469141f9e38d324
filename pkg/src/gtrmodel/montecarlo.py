"""Seeded simulation of the outcome-selection mechanism.

Each run draws a point from the measurement's density by inverse transform
and answers yes when the point falls below the cut ``cos(theta)``. Runs are
split into shards by sample index; shard ``i`` draws from a Philox stream
seeded with child ``i`` of ``SeedSequence(seed)``, so a report depends only on
``(params, order, n, seed, shards)`` and not on how many threads execute the
shards.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from gtrmodel import kernels
from gtrmodel.core import OUTCOMES, normalize_order, probabilities_from_params
from gtrmodel.errors import ParameterDomainError

__all__ = ["EstimateReport", "sample_outcome", "estimate_sequential", "make_generators", "CHUNK"]

# draws per kernel call; part of the stream layout, so changing it changes results
CHUNK = 1 << 18


def make_generators(seed, shards=1):
    """One Philox generator per shard, derived from ``(seed, shard index)``."""
    children = np.random.SeedSequence(seed).spawn(shards)
    return [np.random.Generator(np.random.Philox(child)) for child in children]


def sample_outcome(dist, cut, rng):
    """Draw ``x`` from ``dist`` and return ``"yes"`` iff ``x < cut``."""
    if not (-1.0 <= cut <= 1.0):
        raise ParameterDomainError(f"cut must lie in [-1, 1], got {cut!r}")
    x = dist.inverse_cdf(rng.random())
    return "yes" if x < cut else "no"


@dataclass(frozen=True)
class EstimateReport:
    order: str
    n: int
    seed: int
    shards: int
    counts: tuple
    estimates: tuple
    standard_errors: tuple

    def as_dict(self):
        return {
            "order": self.order,
            "n": self.n,
            "seed": self.seed,
            "shards": self.shards,
            "counts": dict(zip(OUTCOMES, self.counts)),
            "estimates": dict(zip(OUTCOMES, self.estimates)),
            "standard_errors": dict(zip(OUTCOMES, self.standard_errors)),
        }

    def z_scores(self, expected):
        """``(estimate - expected) / sigma`` with sigma from the expected probabilities."""
        out = []
        for est, p in zip(self.estimates, expected):
            sigma = math.sqrt(p * (1.0 - p) / self.n)
            if sigma == 0.0:
                out.append(0.0 if est == p else math.inf)
            else:
                out.append((est - p) / sigma)
        return tuple(out)


def _setup(params, order):
    rho_a, rho_b = params.rho_a.to_piecewise(), params.rho_b.to_piecewise()
    c = params.cos_theta
    if order == "AB":
        return rho_a, params.cos_theta_a, rho_b, c, -c
    return rho_b, params.cos_theta_b, rho_a, c, -c


def _run_shard(rng, size, first, cut1, second, cut_yes, cut_no):
    counts = np.zeros(4, dtype=np.int64)
    done = 0
    while done < size:
        m = min(CHUNK, size - done)
        u1 = rng.random(m)
        u2 = rng.random(m)
        counts += kernels.count_sequential(
            u1, u2,
            first.breakpoints, first.cdf, first.densities, cut1,
            second.breakpoints, second.cdf, second.densities, cut_yes, cut_no,
        )
        done += m
    return counts


def estimate_sequential(params, order, n, seed, shards=1, workers=1):
    """Estimate the four sequential probabilities from ``n`` simulated runs.

    Parameters
    ----------
    params : ModelParams
    order : {"AB", "BA"}
    n : int
        Number of two-step runs (>= 1).
    seed : int
    shards : int
        Number of index blocks; fixes the random streams.
    workers : int
        Threads used to run the shards; does not affect the result.

    Returns
    -------
    EstimateReport
    """
    order = normalize_order(order)
    n, shards = int(n), int(shards)
    if n < 1:
        raise ParameterDomainError(f"n must be >= 1, got {n}")
    if shards < 1:
        raise ParameterDomainError(f"shards must be >= 1, got {shards}")
    # surfaces infeasible parameters before any sampling
    probabilities_from_params(params, order)
    first, cut1, second, cut_yes, cut_no = _setup(params, order)
    sizes = [(i + 1) * n // shards - i * n // shards for i in range(shards)]
    gens = make_generators(seed, shards)
    jobs = [(g, s, first, cut1, second, cut_yes, cut_no) for g, s in zip(gens, sizes)]
    if workers > 1 and shards > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _run_shard(*job), jobs))
    else:
        parts = [_run_shard(*job) for job in jobs]
    counts = tuple(int(c) for c in np.sum(parts, axis=0))
    estimates = tuple(c / n for c in counts)
    errors = tuple(math.sqrt(p * (1.0 - p) / n) for p in estimates)
    return EstimateReport(
        order=order,
        n=n,
        seed=int(seed),
        shards=shards,
        counts=counts,
        estimates=estimates,
        standard_errors=errors,
    )
