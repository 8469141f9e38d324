"""Pure numpy implementations of the sampling kernels.

Both backends must produce bit-identical results: the arithmetic below is
mirrored operation for operation in ``_ckernels.pyx``.
"""
import numpy as np


def inverse_cdf(u, breakpoints, cdf, densities):
    u = np.asarray(u, dtype=np.float64)
    n = densities.shape[0]
    # largest k with cdf[k] <= u; never lands on a zero-mass interval for u < 1
    k = np.searchsorted(cdf, u, side="right") - 1
    np.clip(k, 0, n - 1, out=k)
    lo = breakpoints[k]
    hi = breakpoints[k + 1]
    x = lo + (u - cdf[k]) / densities[k]
    x = np.minimum(x, np.nextafter(hi, -np.inf))
    return np.maximum(x, lo)


def count_sequential(u1, u2, bp1, cdf1, dens1, cut1, bp2, cdf2, dens2, cut_after_yes, cut_after_no):
    """Counts of (yy, yn, ny, nn) for two-step runs driven by uniform draws."""
    x1 = inverse_cdf(u1, bp1, cdf1, dens1)
    yes1 = x1 < cut1
    x2 = inverse_cdf(u2, bp2, cdf2, dens2)
    yes2 = x2 < np.where(yes1, cut_after_yes, cut_after_no)
    idx = 2 * (~yes1).astype(np.int64) + (~yes2).astype(np.int64)
    return np.bincount(idx, minlength=4).astype(np.int64)
