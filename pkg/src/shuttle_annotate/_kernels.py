"""Numba kernel for the per-pixel Gaussian-mixture update.

The kernel is data-parallel over pixels and each pixel writes only its own
state, so the result is bit-identical for any thread count. State arrays are
flattened to (n_pixels, ...) and may be float32 (default, fast) or float64
(used by the high-precision verification path); numba specializes per dtype.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange


@njit(parallel=True, cache=True)
def gmm_update(
    pixels,  # (n, 3) uint8
    weights,  # (n, k_max) float
    means,  # (n, k_max, 3) float
    variances,  # (n, k_max) float
    n_modes,  # (n,) uint8
    alpha,
    d_match_sq,
    background_ratio,
    initial_variance,
    variance_min,
    variance_max,
    k_max,
    out_mask,  # (n,) bool, True = foreground
):
    n = pixels.shape[0]
    one = weights.dtype.type(1.0)
    for i in prange(n):
        k = np.int64(n_modes[i])
        x0 = weights.dtype.type(pixels[i, 0])
        x1 = weights.dtype.type(pixels[i, 1])
        x2 = weights.dtype.type(pixels[i, 2])

        # (a) first (highest-weight) mode within the match distance
        matched = -1
        for m in range(k):
            d0 = x0 - means[i, m, 0]
            d1 = x1 - means[i, m, 1]
            d2 = x2 - means[i, m, 2]
            dist_sq = d0 * d0 + d1 * d1 + d2 * d2
            if dist_sq <= d_match_sq * variances[i, m] * 3.0:
                matched = m
                break

        if matched >= 0:
            # (b) recursive weight/mean/variance update of the matched mode
            for m in range(k):
                if m == matched:
                    weights[i, m] = weights[i, m] + alpha * (one - weights[i, m])
                else:
                    weights[i, m] = (one - alpha) * weights[i, m]
            rho = alpha / weights[i, matched]
            m0 = means[i, matched, 0] + rho * (x0 - means[i, matched, 0])
            m1 = means[i, matched, 1] + rho * (x1 - means[i, matched, 1])
            m2 = means[i, matched, 2] + rho * (x2 - means[i, matched, 2])
            means[i, matched, 0] = m0
            means[i, matched, 1] = m1
            means[i, matched, 2] = m2
            d0 = x0 - m0
            d1 = x1 - m1
            d2 = x2 - m2
            dist_sq = d0 * d0 + d1 * d1 + d2 * d2
            v = variances[i, matched] + rho * (dist_sq / 3.0 - variances[i, matched])
            if v < variance_min:
                v = variance_min
            elif v > variance_max:
                v = variance_max
            variances[i, matched] = v

            # counter float drift; algebraically the sum is already 1
            s = weights.dtype.type(0.0)
            for m in range(k):
                s += weights[i, m]
            for m in range(k):
                weights[i, m] = weights[i, m] / s

            # only the matched mode gained weight: bubble it up
            pos = matched
            while pos > 0 and weights[i, pos] > weights[i, pos - 1]:
                for c in range(3):
                    tm = means[i, pos, c]
                    means[i, pos, c] = means[i, pos - 1, c]
                    means[i, pos - 1, c] = tm
                tw = weights[i, pos]
                weights[i, pos] = weights[i, pos - 1]
                weights[i, pos - 1] = tw
                tv = variances[i, pos]
                variances[i, pos] = variances[i, pos - 1]
                variances[i, pos - 1] = tv
                pos -= 1

            # (d) background iff matched mode sits in the smallest prefix
            # of weight-sorted modes with cumulative weight > T_B
            cum = weights.dtype.type(0.0)
            n_bg = k
            for m in range(k):
                cum += weights[i, m]
                if cum > background_ratio:
                    n_bg = m + 1
                    break
            out_mask[i] = pos >= n_bg
        else:
            # (c) replace lowest-weight mode (first index on ties) or append
            if k < k_max:
                idx = k
                k += 1
                n_modes[i] = np.uint8(k)
            else:
                idx = 0
                for m in range(1, k):
                    if weights[i, m] < weights[i, idx]:
                        idx = m
            weights[i, idx] = alpha
            means[i, idx, 0] = x0
            means[i, idx, 1] = x1
            means[i, idx, 2] = x2
            variances[i, idx] = initial_variance

            s = weights.dtype.type(0.0)
            for m in range(k):
                s += weights[i, m]
            for m in range(k):
                weights[i, m] = weights[i, m] / s

            # stable insertion sort by weight descending
            for m in range(1, k):
                wkey = weights[i, m]
                vkey = variances[i, m]
                mk0 = means[i, m, 0]
                mk1 = means[i, m, 1]
                mk2 = means[i, m, 2]
                j = m
                while j > 0 and weights[i, j - 1] < wkey:
                    weights[i, j] = weights[i, j - 1]
                    variances[i, j] = variances[i, j - 1]
                    means[i, j, 0] = means[i, j - 1, 0]
                    means[i, j, 1] = means[i, j - 1, 1]
                    means[i, j, 2] = means[i, j - 1, 2]
                    j -= 1
                weights[i, j] = wkey
                variances[i, j] = vkey
                means[i, j, 0] = mk0
                means[i, j, 1] = mk1
                means[i, j, 2] = mk2
            out_mask[i] = True
