"""Exact tests for small contingency tables.

The two-sided Fisher test is computed by exact integer enumeration of
the hypergeometric support: every table at least as extreme as the
observed one (probability no larger, compared as exact integers)
contributes to the p-value, so there is no epsilon fudge against float
rounding in the tail sum.
"""

from __future__ import annotations

import math
from fractions import Fraction


class ContingencyError(ValueError):
    """Raised for malformed or degenerate 2x2 tables."""


def fisher_exact_2x2(a: int, b: int, c: int, d: int) -> float:
    """Two-sided Fisher exact test p-value for the table [[a, b], [c, d]]."""
    cells = (a, b, c, d)
    if any(not isinstance(x, int) or isinstance(x, bool) or x < 0 for x in cells):
        raise ContingencyError(f"cells must be nonnegative integers, got {cells}")
    row1, row2 = a + b, c + d
    col1 = a + c
    n = row1 + row2
    if row1 == 0 or row2 == 0 or col1 == 0 or col1 == n:
        raise ContingencyError(
            "a zero row or column margin leaves nothing to test"
        )
    # Support of the first cell given fixed margins.
    x_min = max(0, col1 - row2)
    x_max = min(col1, row1)
    weights = {
        x: math.comb(row1, x) * math.comb(row2, col1 - x)
        for x in range(x_min, x_max + 1)
    }
    observed = weights[a]
    tail = sum(w for w in weights.values() if w <= observed)
    return float(Fraction(tail, math.comb(n, col1)))
