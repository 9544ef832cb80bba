"""Gauss hypergeometric evaluation for SIR-distribution coefficients.

The interference analysis needs ``2F1(a, b; c; z)`` at non-positive real
arguments ``z = -T`` where ``T`` is a linear SINR threshold spanning several
decades.  The defining series diverges for ``|z| > 1``, so every evaluation
first applies the Pfaff map

    w = z / (z - 1) in [0, 1),    2F1(a, b; c; z) = (1-z)^(-a) 2F1(a, c-b; c; w)

which, for the coefficient families used here, turns one numerator parameter
into 1 and yields a series of non-negative terms (no cancellation).

Near-unit-argument handling: as ``z -> -inf`` the mapped argument ``w``
approaches 1 and the transformed series needs O(1/(1-w)) terms.  Beyond
``w > 0.99`` evaluation switches to the standard connection formula in powers
of ``1 - w`` (valid because ``c - a - b`` is never an integer for the
coefficient families), which converges in a few dozen terms for any ``T``.
The connection formula itself loses accuracy for high coefficient order
``i`` when ``i * (1 - w)`` is large; in that regime the direct transformed
series is short relative to ``i`` and is used instead, keeping all paths
accurate to ~1e-13 relative.  A plain large-budget series is the fallback
for parameter combinations the connection formula cannot serve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, gammasgn

MAX_TERMS = 100_000
MAX_TERMS_NEAR_UNIT = 2_000_000
NEAR_UNIT_W = 0.99
_BLOCK = 4096
_STOP_REL = 1e-16
_CONSECUTIVE_SMALL = 3


class HypergeometricError(ArithmeticError):
    """Series evaluation failed to converge within its iteration budget."""

    def __init__(self, message, a, b, c, z):
        super().__init__(f"{message} [a={a!r}, b={b!r}, c={c!r}, z={z!r}]")
        self.a = a
        self.b = b
        self.c = c
        self.z = z


def _series(a, b, c, w, scale, max_terms):
    """Sum ``scale * 2F1(a, b; c; w)`` by blocked term recurrence.

    Requires ``0 <= w < 1``.  Terms follow
    ``t_{n+1} = t_n * (a+n)(b+n) / ((c+n)(n+1)) * w`` starting from
    ``t_0 = scale``; blocks are accumulated with Neumaier compensation.
    Stops once _CONSECUTIVE_SMALL consecutive terms fall below
    ``_STOP_REL`` times the running partial sum.
    """
    if scale == 0.0 or w == 0.0:
        return scale
    total = scale
    comp = 0.0
    term = scale
    n = 0
    run = 0
    while n < max_terms:
        m = min(_BLOCK, max_terms - n)
        idx = np.arange(n, n + m, dtype=np.float64)
        ratios = (a + idx) * (b + idx) / ((c + idx) * (idx + 1.0)) * w
        terms = term * np.cumprod(ratios)
        partials = total + np.cumsum(terms)
        small = np.abs(terms) < _STOP_REL * np.maximum(np.abs(partials), 1e-300)

        stop = -1
        if run >= _CONSECUTIVE_SMALL - 1 and m >= 1 and small[0]:
            stop = 0
        elif run >= _CONSECUTIVE_SMALL - 2 and m >= 2 and small[0] and small[1]:
            stop = 1
        if stop < 0 and m >= _CONSECUTIVE_SMALL:
            window = small[2:] & small[1:-1] & small[:-2]
            hits = np.flatnonzero(window)
            if hits.size:
                stop = int(hits[0]) + 2

        upto = m if stop < 0 else stop + 1
        block_sum = float(terms[:upto].sum())
        t = total + block_sum
        if abs(total) >= abs(block_sum):
            comp += (total - t) + block_sum
        else:
            comp += (block_sum - t) + total
        total = t
        if stop >= 0:
            return total + comp
        term = float(terms[-1])
        if bool(small.all()):
            run += m
        elif small[-1]:
            run = m - 1 - int(np.flatnonzero(~small)[-1])
        else:
            run = 0
        n += m
    raise HypergeometricError("series did not converge within budget", a, b, c, w)


def _connection(a, b, c, w, max_terms):
    """2F1(a, b; c; w) for w near 1 via the 1-w connection formula.

    Requires c - a - b non-integer.  Both sub-series run in powers of
    ``x = 1 - w`` and converge quickly when w > NEAR_UNIT_W.
    """
    x = 1.0 - w
    s = c - a - b
    coef1 = gammasgn(c) * gammasgn(s) * gammasgn(c - a) * gammasgn(c - b) * math.exp(
        float(gammaln(c) + gammaln(s) - gammaln(c - a) - gammaln(c - b))
    )
    coef2 = gammasgn(c) * gammasgn(-s) * gammasgn(a) * gammasgn(b) * math.exp(
        float(gammaln(c) + gammaln(-s) - gammaln(a) - gammaln(b))
    )
    f1 = _series(a, b, a + b - c + 1.0, x, 1.0, max_terms)
    f2 = _series(c - a, c - b, s + 1.0, x, 1.0, max_terms)
    return coef1 * f1 + coef2 * x**s * f2


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """Evaluate 2F1(a, b; c; z) for real parameters and z <= 0.

    The argument is mapped to w = z/(z-1) in [0, 1) before summation, so the
    result stays accurate as z -> -inf (see module docstring for the
    near-unit handling).  Raises HypergeometricError if no strategy
    converges within its iteration budget, and ValueError for arguments
    outside the supported domain.
    """
    if z > 0.0:
        raise ValueError(f"argument must satisfy z <= 0, got {z}")
    if c <= 0.0 and float(c).is_integer():
        raise ValueError(f"c must not be a non-positive integer, got {c}")
    if z == 0.0:
        return 1.0
    w = z / (z - 1.0)
    try:
        if w <= NEAR_UNIT_W:
            s = _series(a, c - b, c, w, 1.0, MAX_TERMS)
        else:
            # a-side Pfaff turned (a, b; c) into (a, c-b; c); its 1-w exponent
            # is c - a - (c - b) = b - a.
            if abs((b - a) - round(b - a)) > 1e-9:
                s = _connection(a, c - b, c, w, MAX_TERMS)
            else:
                s = _series(a, c - b, c, w, 1.0, MAX_TERMS_NEAR_UNIT)
    except HypergeometricError as err:
        raise HypergeometricError("2F1 evaluation failed", a, b, c, z) from err
    return (1.0 - z) ** (-a) * s


@lru_cache(maxsize=1 << 17)
def _coeff_cached(i: int, threshold: float, alpha: float) -> float:
    delta = 2.0 / alpha
    t = threshold
    w = t / (1.0 + t)
    if i == 0:
        # k0 = delta*T/(1-delta) * 2F1(1, 1-delta; 2-delta; -T); after the
        # Pfaff map this is (delta/(1-delta)) * w * 2F1(1, 1; 2-delta; w).
        if w <= NEAR_UNIT_W:
            return _series(1.0, 1.0, 2.0 - delta, w, delta / (1.0 - delta) * w, MAX_TERMS)
        f1 = _series(1.0, 1.0, 1.0 + delta, 1.0 - w, 1.0, MAX_TERMS)
        a0 = (
            math.gamma(2.0 - delta)
            * math.gamma(-delta)
            / (math.gamma(1.0 - delta) ** 2)
        )
        b0 = math.gamma(2.0 - delta) * math.gamma(delta)
        return delta / (1.0 - delta) * (a0 * w * f1 + b0 * (w * (1.0 + t)) ** delta)
    # k_i = delta*T^i/(i-delta) * 2F1(i+1, i-delta; i+1-delta; -T); folding the
    # overflow-prone T^i prefactor through the Pfaff map gives
    # (delta/(i-delta)) * w^i/(1+T) * 2F1(i+1, 1; i+1-delta; w).
    if w <= NEAR_UNIT_W or i * (1.0 - w) > 1.0:
        # The connection formula cancels catastrophically once i*(1-w) >> 1
        # (k_i ~ exp(-i(1-w)) while both its terms stay O(1)); the direct
        # series needs only ~37/(1-w) <~ 37*i terms there, so prefer it.
        budget = MAX_TERMS if w <= NEAR_UNIT_W else MAX_TERMS_NEAR_UNIT
        scale = delta / (i - delta) * w**i / (1.0 + t)
        return _series(i + 1.0, 1.0, i + 1.0 - delta, w, scale, budget)
    f1 = _series(i + 1.0, 1.0, 2.0 + delta, 1.0 - w, 1.0, MAX_TERMS)
    a_i = -(i - delta) / (1.0 + delta)
    b_i = math.gamma(1.0 + delta) * math.exp(float(gammaln(i + 1.0 - delta) - gammaln(i + 1.0)))
    return delta / (i - delta) * (
        a_i * w**i * f1 / (1.0 + t) + b_i * (w * (1.0 + t)) ** delta
    )


def coeff_k(i: int, threshold: float, alpha: float) -> float:
    """Interference-distribution coefficient k_i(T, alpha), non-negative.

    ``k_0`` scales the Rayleigh (single-antenna) outage; the higher orders
    fill the lower-triangular Toeplitz system used for multi-antenna outage.
    """
    if i < 0 or int(i) != i:
        raise ValueError(f"coefficient order must be a non-negative integer, got {i}")
    if threshold <= 0.0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    if alpha <= 2.0:
        raise ValueError(f"path-loss exponent must exceed 2, got {alpha}")
    return _coeff_cached(int(i), float(threshold), float(alpha))


@dataclass(frozen=True)
class CoefficientTable:
    """Coefficients k_0 .. k_{M-1} for one (threshold, alpha) pair."""

    threshold: float
    alpha: float
    values: tuple[float, ...]

    def __len__(self):
        return len(self.values)


def coefficient_table(size: int, threshold: float, alpha: float) -> CoefficientTable:
    """Table of the first ``size`` coefficients at (threshold, alpha)."""
    if size < 1:
        raise ValueError(f"table size must be >= 1, got {size}")
    values = tuple(coeff_k(i, threshold, alpha) for i in range(size))
    return CoefficientTable(threshold=float(threshold), alpha=float(alpha), values=values)
