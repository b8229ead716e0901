"""Truncated Taylor-series arithmetic on complex coefficient arrays.

A series is a 1-D complex array ``c`` with ``f(z0 + h) = sum_j c[j] h**j``.
Derivatives follow from ``f^(j)(z0) = j! * c[j]``.
"""

from math import comb, factorial

import numpy as np


def mul(a, b, order):
    """Cauchy product of two series truncated after ``h**order``."""
    out = np.convolve(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
    res = np.zeros(order + 1, dtype=complex)
    n = min(order + 1, out.size)
    res[:n] = out[:n]
    return res


def shift_polynomial(coeffs, z0, order):
    """Taylor coefficients of ``p(z0 + h)`` for ``p(z) = sum_i coeffs[i] z**i``."""
    coeffs = np.asarray(coeffs, dtype=complex)
    res = np.zeros(order + 1, dtype=complex)
    deg = coeffs.size - 1
    for j in range(min(order, deg) + 1):
        acc = 0j
        for i in range(j, deg + 1):
            acc += coeffs[i] * comb(i, j) * z0 ** (i - j)
        res[j] = acc
    return res


def inverse_power(base, mult, order):
    """Taylor coefficients of ``(base + h)**(-mult)`` in ``h``."""
    res = np.empty(order + 1, dtype=complex)
    lead = base ** (-mult)
    for j in range(order + 1):
        # binom(-m, j) = (-1)^j binom(m + j - 1, j)
        res[j] = (-1) ** j * comb(mult + j - 1, j) * lead * base ** (-j)
    return res


def exp_linear(slope, value, order):
    """Taylor coefficients of ``value * exp(slope * h)``."""
    return np.array(
        [value * slope**j / factorial(j) for j in range(order + 1)], dtype=complex
    )


def to_derivatives(series):
    """Convert Taylor coefficients to derivative values."""
    return np.array([factorial(j) * c for j, c in enumerate(series)], dtype=complex)
