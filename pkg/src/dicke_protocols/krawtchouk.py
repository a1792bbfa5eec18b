"""Krawtchouk polynomials K_i(x; p, n).

The public evaluators run the three-term recurrence in the degree ``i``.
:func:`krawtchouk_series` sums the terminating 2F1 series directly and is
kept as an independent reference; it uses plain arithmetic, so it also works
with :class:`fractions.Fraction` or complex inputs.
"""
from __future__ import annotations

from dataclasses import dataclass
from numbers import Integral

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class KrawtchoukParams:
    p: float
    n: int

    def __post_init__(self):
        if not isinstance(self.n, Integral) or self.n < 0:
            raise DomainError(f"n must be a nonnegative integer, got {self.n!r}")
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"p must lie in (0, 1), got {self.p!r}")


def krawtchouk_series(i, x, p, n):
    """Direct hypergeometric sum  sum_k (-i)_k (-x)_k / ((-n)_k k!) p^-k."""
    if not 0 <= i <= n:
        raise DomainError(f"degree i={i} outside 0..{n}")
    total = 0
    term = 1
    for k in range(i + 1):
        total = total + term
        if k == i:
            break
        # ratio of consecutive terms of the series
        term = term * (k - i) * (k - x) / ((k - n) * (k + 1) * p)
    return total


def krawtchouk_values(x, p, n, dtype=float):
    """Return ``[K_0(x), ..., K_n(x)]`` from the three-term recurrence.

    ``p`` may be complex (``dtype=complex``); the fixed-point expansions of the
    composed protocol operator need that. The forward recurrence is accurate to
    round-off near p = 1/2 but amplifies it for p well below 1/2 (relative
    error about 4e-7 at p = 1/4, n = 20); use :func:`krawtchouk_series` with
    :class:`fractions.Fraction` arguments when exact values are needed.
    """
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    out = np.empty(n + 1, dtype=dtype)
    out[0] = 1.0
    if n == 0:
        return out
    if p == 0:
        raise DomainError("p must be nonzero")
    q = 1 - p
    out[1] = 1 - x / (p * n)
    for i in range(1, n):
        out[i + 1] = ((p * (n - i) + i * q - x) * out[i] - i * q * out[i - 1]) / (p * (n - i))
    return out


def krawtchouk(i, x, params: KrawtchoukParams) -> float:
    """K_i(x; p, n) for 0 <= i <= n."""
    if not 0 <= i <= params.n:
        raise DomainError(f"degree i={i} outside 0..{params.n}")
    return float(krawtchouk_values(x, params.p, params.n)[i])


def krawtchouk_row(j, params: KrawtchoukParams) -> np.ndarray:
    """Vector of K_i(j; p, n) for i = 0..n."""
    if not 0 <= j <= params.n:
        raise DomainError(f"argument j={j} outside 0..{params.n}")
    return krawtchouk_values(j, params.p, params.n)


def recurrence_residual(i, x, p, n, values) -> float:
    """Residual of  -x K_i = p(n-i) K_{i+1} - [p(n-i) + i(1-p)] K_i + i(1-p) K_{i-1}.

    ``values`` holds K_0..K_n at ``x``; valid for 1 <= i <= n-1.
    """
    k_prev, k_cur, k_next = values[i - 1], values[i], values[i + 1]
    rhs = p * (n - i) * k_next - (p * (n - i) + i * (1 - p)) * k_cur + i * (1 - p) * k_prev
    return abs(-x * k_cur - rhs)
