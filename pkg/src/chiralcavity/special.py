"""Error function and its complement, double precision.

A positive-term series is used for |x| < 2 and a Lentz-evaluated continued
fraction above, so ``erfc`` keeps full relative accuracy in the tail where
error probabilities live.
"""

from __future__ import annotations

import math

import numpy as np

_SQRT_PI = math.sqrt(math.pi)
_SWITCH = 2.0
_TINY = 1e-300


def _erf_series(x: float) -> float:
    # erf(x) = 2x/sqrt(pi) e^{-x^2} sum_n (2x^2)^n / (2n+1)!!
    x2 = x * x
    term = 1.0
    total = 1.0
    n = 0
    while True:
        n += 1
        term *= 2.0 * x2 / (2 * n + 1)
        total += term
        if term < 1e-17 * total:
            break
    return 2.0 * x / _SQRT_PI * math.exp(-x2) * total


def _erfc_cf(x: float) -> float:
    # erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    f = x
    C = x
    D = 0.0
    k = 1
    while k < 5000:
        a = 0.5 * k
        D = x + a * D
        D = _TINY if D == 0.0 else D
        C = x + a / C
        C = _TINY if C == 0.0 else C
        D = 1.0 / D
        delta = C * D
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
        k += 1
    return math.exp(-x * x) / (_SQRT_PI * f)


def _erfc_scalar(x: float) -> float:
    if math.isnan(x):
        return math.nan
    if x < 0:
        return 2.0 - _erfc_scalar(-x)
    if x == math.inf:
        return 0.0
    if x < _SWITCH:
        return 1.0 - _erf_series(x)
    return _erfc_cf(x)


def _erf_scalar(x: float) -> float:
    if math.isnan(x):
        return math.nan
    if x < 0:
        return -_erf_scalar(-x)
    if x < _SWITCH:
        return _erf_series(x)
    if x == math.inf:
        return 1.0
    return 1.0 - _erfc_cf(x)


def erf(x):
    if np.ndim(x) == 0:
        return _erf_scalar(float(x))
    return np.vectorize(_erf_scalar, otypes=[float])(x)


def erfc(x):
    if np.ndim(x) == 0:
        return _erfc_scalar(float(x))
    return np.vectorize(_erfc_scalar, otypes=[float])(x)
