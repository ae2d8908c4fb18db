"""Gauss and Kummer hypergeometric functions, Gamma and Pochhammer symbols.

Two layers live here:

* ``gauss_2f1`` / ``kummer_1f1`` are the plain power series, returning a
  :class:`SeriesValue` with bookkeeping (terms used, truncation estimate).
* ``hyp2f1`` / ``hyp1f1`` are the evaluators the rest of the package uses.
  They pick a representation that converges quickly and without
  cancellation: the power series for ``z <= 0.5``, the ``z -> 1 - z``
  connection formula above that, and Kummer's transformation for negative
  confluent arguments.

All series are vectorised over the argument.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, PoleError

__all__ = [
    "SeriesValue",
    "pochhammer",
    "log_gamma",
    "gamma",
    "rgamma",
    "gauss_2f1",
    "kummer_1f1",
    "gauss_2f1_dx",
    "kummer_1f1_dx",
    "hyp2f1",
    "hyp1f1",
    "hyp1f1_scaled",
    "DEFAULT_TOL",
    "DEFAULT_MAX_TERMS",
    "DEFAULT_MARGIN",
]

DEFAULT_TOL = 1e-16
DEFAULT_MAX_TERMS = 20000
# |x| < 1 - margin for the raw Gauss series.
DEFAULT_MARGIN = 1e-3
# c within this distance of a non-positive integer is treated as a pole.
POLE_TOL = 1e-8
# Parameters within this many ulps of a non-positive integer terminate the series.
# Only rounding noise is absorbed; anything larger changes the function value.
TERMINATE_ULPS = 8

# Above this argument hyp2f1 switches to the 1 - z connection formula.
CONNECTION_SWITCH = 0.5
# Same, when c - a - b is close to an integer and the connection formula
# has to be interpolated.
DEGENERATE_SWITCH = 0.9
# Node spacing for interpolating across integer c - a - b.
DEGENERATE_STEP = 1e-3
# exp(-y) 1F1 is summed in linear form up to this y, in log form above.
LINEAR_SCALED_MAX = 500.0

# Least-squares fit at half-integers, see scripts/lanczos_coefficients.py.
LANCZOS_G = 7
LANCZOS_COEFFS = (
    0.999999999999707,
    676.520368121884,
    -1259.139216722335,
    771.3234287766583,
    -176.61502915617615,
    12.507343261090844,
    -0.13857106821510512,
    9.963598999338136e-06,
    1.5684990263848287e-07,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class SeriesValue:
    """Value of a hypergeometric series.

    ``trunc_estimate`` is the size of the first neglected term relative to the
    partial sum (worst case over all arguments when evaluated on an array).
    Terminating series report 0.
    """

    value: float | np.ndarray
    terms_used: int
    trunc_estimate: float


def pochhammer(a: float, k: int) -> float:
    """Rising factorial ``(a)_k``; ``(a)_0 = 1``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    out = 1.0
    for j in range(k):
        out *= a + j
    return out


def _nonpositive_int(x: float, tol: float) -> int | None:
    r = round(x)
    if r <= 0 and abs(x - r) <= tol:
        return -r
    return None


def _lanczos_log_gamma(x: float) -> float:
    z = x - 1.0
    acc = LANCZOS_COEFFS[0]
    for k in range(1, len(LANCZOS_COEFFS)):
        acc += LANCZOS_COEFFS[k] / (z + k)
    t = z + LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def _sinpi(x: float) -> float:
    # reduce first: pi * x loses relative accuracy next to the integers
    r = round(x)
    return math.sin(math.pi * (x - r)) * (-1.0 if r % 2 else 1.0)


def log_gamma(x: float) -> float:
    """``log|Gamma(x)|``.

    Lanczos approximation for ``x >= 0.5``, reflection below.  Raises
    :class:`PoleError` at non-positive integers.
    """
    x = float(x)
    if _nonpositive_int(x, 0.0) is not None:
        raise PoleError(f"Gamma has a pole at {x}")
    if x < 0.5:
        # Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        return math.log(math.pi / abs(_sinpi(x))) - _lanczos_log_gamma(1.0 - x)
    if x == int(x) and x <= 30:
        return math.log(math.factorial(int(x) - 1))
    return _lanczos_log_gamma(x)


def gamma_sign(x: float) -> float:
    if x > 0:
        return 1.0
    if _nonpositive_int(x, 0.0) is not None:
        raise PoleError(f"Gamma has a pole at {x}")
    # sign alternates between consecutive negative integers
    return -1.0 if math.floor(x) % 2 else 1.0


def gamma(x: float) -> float:
    """Signed Gamma function."""
    return gamma_sign(x) * math.exp(log_gamma(x))


def rgamma(x: float) -> float:
    """``1/Gamma(x)``, zero at the poles."""
    if _nonpositive_int(x, 0.0) is not None:
        return 0.0
    return gamma_sign(x) * math.exp(-log_gamma(x))


def _check_denominators(dens, terminate_at: int | None):
    for q in dens:
        n = _nonpositive_int(q, POLE_TOL)
        if n is None:
            continue
        # (q)_k has no zero factor for k <= n
        if terminate_at is None or terminate_at > n:
            raise PoleError(f"denominator parameter {q} is a non-positive integer")


def _terminates(p: float) -> int | None:
    return _nonpositive_int(p, TERMINATE_ULPS * math.ulp(max(1.0, abs(p))))


def _termination_order(nums) -> int | None:
    orders = [m for m in (_terminates(p) for p in nums) if m is not None]
    return min(orders) if orders else None


def _series(nums, dens, x, *, tol, max_terms, log_scale=None):
    """Sum ``sum_k prod (p)_k / prod (q)_k * x**k / k!``.

    With ``log_scale`` every term is multiplied by ``exp(log_scale)`` and the
    terms are carried in log-magnitude form, so neither the prefactor nor the
    unscaled sum has to be representable.  That form costs a few digits, so
    callers use it only when the linear form would overflow.
    """
    x = np.asarray(x, dtype=float)
    m = _termination_order(nums)
    _check_denominators(dens, m)
    nums = [float(round(p)) if _terminates(p) is not None else float(p)
            for p in nums]

    logged = log_scale is not None
    if logged:
        with np.errstate(divide="ignore"):
            logx = np.log(np.abs(x))
        sgnx = np.sign(x)
        logt = np.asarray(log_scale, dtype=float) + 0.0 * x
        sign = np.ones_like(x)
        total = np.exp(logt)
    else:
        term = np.ones_like(x)
        total = np.ones_like(x)
    limit = max_terms if m is None else m + 1

    small_run = np.zeros(x.shape, dtype=int)
    for k in range(limit - 1):
        coef = 1.0
        for p in nums:
            coef *= p + k
        for q in dens:
            coef /= q + k
        coef /= k + 1
        if coef == 0.0:
            return total, k + 1, 0.0
        if logged:
            with np.errstate(invalid="ignore"):
                logt = logt + math.log(abs(coef)) + logx
            sign = sign * math.copysign(1.0, coef) * sgnx
            term = sign * np.exp(logt)
        else:
            term = term * (coef * x)
        total = total + term
        if m is not None:
            continue
        small = (np.abs(term) <= tol * np.abs(total)) & (abs(coef) * np.abs(x) < 1.0)
        small_run = np.where(small, small_run + 1, 0)
        if np.all(small_run >= 3):
            nxt = _next_term_ratio(nums, dens, k + 1) * np.abs(x) * np.abs(term)
            with np.errstate(divide="ignore", invalid="ignore"):
                rel = np.where(total != 0, nxt / np.abs(total), 0.0)
            return total, k + 2, float(np.max(rel, initial=0.0))
    if m is not None:
        return total, m + 1, 0.0
    raise ConvergenceError(f"series did not converge within {max_terms} terms")


def _next_term_ratio(nums, dens, k):
    coef = 1.0
    for p in nums:
        coef *= p + k
    for q in dens:
        coef /= q + k
    return abs(coef / (k + 1))


def _unwrap(value, x):
    return float(value) if np.ndim(x) == 0 else value


def gauss_2f1(a, b, c, x, *, tol=DEFAULT_TOL, max_terms=DEFAULT_MAX_TERMS,
              margin=DEFAULT_MARGIN) -> SeriesValue:
    """Power series of the Gauss hypergeometric function ``2F1(a, b; c | x)``.

    Non-terminating series require ``|x| < 1 - margin``.  Terminating series
    (``a`` or ``b`` a non-positive integer) are summed exactly for any ``x``.

    Raises
    ------
    PoleError
        ``c`` is within 1e-8 of a non-positive integer and the series does
        not terminate before reaching the zero factor.
    ConvergenceError
        ``max_terms`` was reached before the truncation criterion held.
    """
    xa = np.asarray(x, dtype=float)
    if _termination_order((a, b)) is None and np.any(np.abs(xa) >= 1.0 - margin):
        raise DomainError("non-terminating 2F1 series needs |x| < 1 - margin")
    total, n, est = _series((a, b), (c,), xa, tol=tol, max_terms=max_terms)
    return SeriesValue(_unwrap(total, x), n, est)


def kummer_1f1(a, b, x, *, tol=DEFAULT_TOL, max_terms=DEFAULT_MAX_TERMS) -> SeriesValue:
    """Power series of the confluent hypergeometric function ``1F1(a; b | x)``."""
    total, n, est = _series((a,), (b,), np.asarray(x, dtype=float), tol=tol, max_terms=max_terms)
    return SeriesValue(_unwrap(total, x), n, est)


def gauss_2f1_dx(a, b, c, x, **kw):
    """``d/dx 2F1(a, b; c | x) = (ab/c) 2F1(a+1, b+1; c+1 | x)``."""
    factor = a * b / c
    if factor == 0.0:
        return _unwrap(np.zeros_like(np.asarray(x, dtype=float)), x)
    return factor * gauss_2f1(a + 1, b + 1, c + 1, x, **kw).value


def kummer_1f1_dx(a, b, x, **kw):
    """``d/dx 1F1(a; b | x) = (a/b) 1F1(a+1; b+1 | x)``."""
    factor = a / b
    if factor == 0.0:
        return _unwrap(np.zeros_like(np.asarray(x, dtype=float)), x)
    return factor * kummer_1f1(a + 1, b + 1, x, **kw).value


# -- robust evaluators -------------------------------------------------------

def _connection(a, b, c, z, tol, max_terms):
    """2F1 for 1/2 < z < 1 through the standard z -> 1 - z connection formula."""
    s = c - a - b
    w = 1.0 - z
    g_c = gamma(c)
    first = g_c * gamma(s) * rgamma(c - a) * rgamma(c - b)
    second = g_c * gamma(-s) * rgamma(a) * rgamma(b)
    out = np.zeros_like(z)
    if first != 0.0:
        out = out + first * _series((a, b), (1.0 - s,), w, tol=tol, max_terms=max_terms)[0]
    if second != 0.0:
        out = out + second * w**s * _series((c - a, c - b), (1.0 + s,), w, tol=tol,
                                              max_terms=max_terms)[0]
    return out


def _connection_near_degenerate(a, b, c, z, tol, max_terms):
    # c - a - b within DEGENERATE_STEP of an integer m: both Gamma(s) and
    # Gamma(-s) blow up.  Evaluate at c shifted so that c - a - b sits on
    # m +- k*step (k = 1..5) and interpolate back to the requested c.  Ten
    # nodes keep the error small even where log(1 - z) ~ -30.
    s = c - a - b
    m = round(s)
    u = s - m
    nodes = [k * DEGENERATE_STEP for k in (-5, -4, -3, -2, -1, 1, 2, 3, 4, 5)]
    vals = [_connection(a, b, a + b + m + t, z, tol, max_terms) for t in nodes]
    out = np.zeros_like(z)
    for i, ti in enumerate(nodes):
        wgt = 1.0
        for j, tj in enumerate(nodes):
            if j != i:
                wgt *= (u - tj) / (ti - tj)
        out = out + wgt * vals[i]
    return out


def hyp2f1(a, b, c, z, *, tol=DEFAULT_TOL, max_terms=DEFAULT_MAX_TERMS):
    """``2F1(a, b; c | z)`` for real ``-1 < z < 1``.

    Terminating series are summed directly for any ``z``.  For ``z > 0.5``
    the connection formula is used, so arguments arbitrarily close to 1 are
    fine; near-integer ``c - a - b`` is handled by interpolation in ``c``.
    """
    za = np.asarray(z, dtype=float)
    m = _termination_order((a, b))
    if m is not None:
        return _unwrap(_series((a, b), (c,), za, tol=tol, max_terms=max_terms)[0], z)
    _check_denominators((c,), None)
    if np.any(za >= 1.0) or np.any(za <= -1.0):
        raise DomainError("hyp2f1 needs -1 < z < 1 for non-terminating series")
    out = np.empty_like(za)
    s = c - a - b
    degenerate = abs(s - round(s)) < 5 * DEGENERATE_STEP
    lo = za <= (DEGENERATE_SWITCH if degenerate else CONNECTION_SWITCH)
    if np.any(lo):
        out[lo] = _series((a, b), (c,), za[lo], tol=tol, max_terms=max_terms)[0]
    hi = ~lo
    if np.any(hi):
        if degenerate:
            out[hi] = _connection_near_degenerate(a, b, c, za[hi], tol, max_terms)
        else:
            out[hi] = _connection(a, b, c, za[hi], tol, max_terms)
    return _unwrap(out, z)


def hyp1f1_scaled(a, b, y, *, tol=DEFAULT_TOL, max_terms=DEFAULT_MAX_TERMS):
    """``exp(-y) 1F1(a; b | y)``, summed in log-magnitude form (no overflow)."""
    ya = np.asarray(y, dtype=float)
    out = np.empty_like(ya)
    big = ya > LINEAR_SCALED_MAX
    if np.any(~big):
        yl = ya[~big]
        out[~big] = np.exp(-yl) * _series((a,), (b,), yl, tol=tol, max_terms=max_terms)[0]
    if np.any(big):
        yb = ya[big]
        out[big] = _series((a,), (b,), yb, tol=tol, max_terms=max_terms, log_scale=-yb)[0]
    return _unwrap(out, y)


def hyp1f1(a, b, x, *, tol=DEFAULT_TOL, max_terms=DEFAULT_MAX_TERMS):
    """``1F1(a; b | x)`` for real ``x``.

    Negative arguments go through Kummer's transformation
    ``1F1(a; b | x) = exp(x) 1F1(b - a; b | -x)`` which has no alternating
    cancellation when ``b - a > 0``.
    """
    xa = np.asarray(x, dtype=float)
    if _termination_order((a,)) is not None:
        return _unwrap(_series((a,), (b,), xa, tol=tol, max_terms=max_terms)[0], x)
    out = np.empty_like(xa)
    neg = xa < 0
    if np.any(~neg):
        out[~neg] = _series((a,), (b,), xa[~neg], tol=tol, max_terms=max_terms)[0]
    if np.any(neg):
        out[neg] = hyp1f1_scaled(b - a, b, -xa[neg], tol=tol, max_terms=max_terms)
    return _unwrap(out, x)
