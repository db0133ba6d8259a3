"""Binomial proportion confidence intervals."""

from __future__ import annotations

import math


class IntervalError(ValueError):
    """Raised for impossible counts or confidence levels."""


# Acklam's rational approximation to the standard normal quantile,
# refined below with one Halley step against erfc for full precision.
_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF, accurate to close to machine epsilon."""
    if not 0.0 < p < 1.0:
        raise IntervalError(f"quantile probability {p} outside (0, 1)")
    p_low = 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        x = (
            ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        ) / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    elif p <= 1.0 - p_low:
        q = p - 0.5
        r = q * q
        x = (
            (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5])
            * q
            / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)
        )
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -(
            ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        ) / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    # One Halley refinement using the exact CDF via erfc.
    err = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = err * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)


def wilson_interval(
    successes: int, trials: int, confidence: float = 0.95
) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Boundary counts produce exact endpoints: zero successes pin the
    lower bound at 0.0 and all-successes pin the upper bound at 1.0.
    """
    if trials < 1:
        raise IntervalError(f"trials must be positive, got {trials}")
    if not 0 <= successes <= trials:
        raise IntervalError(f"successes {successes} outside [0, {trials}]")
    if not 0.0 < confidence < 1.0:
        raise IntervalError(f"confidence {confidence} outside (0, 1)")
    z = normal_quantile(1.0 - (1.0 - confidence) / 2.0)
    z2 = z * z
    n = float(trials)
    p_hat = successes / n
    denom = n + z2
    center = (successes + z2 / 2.0) / denom
    half = z * math.sqrt(p_hat * (1.0 - p_hat) * n + z2 / 4.0) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi
