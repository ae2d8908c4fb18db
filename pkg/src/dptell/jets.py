"""Second-order jets: a function sampled together with its first two derivatives.

A jet is a plain tuple ``(f, f', f'')`` of arrays (shorter tuples are allowed
where fewer derivatives are needed).  The helpers below implement the
product, exp/log and chain rules that the operator code needs; nothing here
differentiates numerically.
"""
from __future__ import annotations

import numpy as np

Jet = tuple


def const(c, like) -> Jet:
    z = np.zeros_like(like, dtype=float)
    return (z + c, z, z)


def add(*jets: Jet) -> Jet:
    order = min(len(j) for j in jets)
    return tuple(sum(j[k] for j in jets) for k in range(order))


def scale(c, f: Jet) -> Jet:
    return tuple(c * fk for fk in f)


def sub(f: Jet, g: Jet) -> Jet:
    return add(f, scale(-1.0, g))


def mul(f: Jet, g: Jet) -> Jet:
    order = min(len(f), len(g))
    out = [f[0] * g[0]]
    if order > 1:
        out.append(f[1] * g[0] + f[0] * g[1])
    if order > 2:
        out.append(f[2] * g[0] + 2.0 * f[1] * g[1] + f[0] * g[2])
    return tuple(out)


def exp(w: Jet) -> Jet:
    e = np.exp(w[0])
    out = [e]
    if len(w) > 1:
        out.append(w[1] * e)
    if len(w) > 2:
        out.append((w[2] + w[1] ** 2) * e)
    return tuple(out)


def log(f: Jet) -> Jet:
    out = [np.log(f[0])]
    if len(f) > 1:
        r = f[1] / f[0]
        out.append(r)
    if len(f) > 2:
        out.append(f[2] / f[0] - r * r)
    return tuple(out)


def compose(g_eta: Jet, eta: Jet) -> Jet:
    """x-jet of ``g(eta(x))`` from the eta-derivatives of g and the x-jet of eta."""
    out = [g_eta[0]]
    if len(g_eta) > 1 and len(eta) > 1:
        out.append(g_eta[1] * eta[1])
    if len(g_eta) > 2 and len(eta) > 2:
        out.append(g_eta[2] * eta[1] ** 2 + g_eta[1] * eta[2])
    return tuple(out)


def first_order(f: Jet, w: Jet, sign: float = 1.0) -> Jet:
    """Apply ``sign * d/dx - w'`` to f.

    ``sign=+1`` gives ``A = d/dx - w'``, ``sign=-1`` gives ``A^dagger``.  The
    result has one derivative fewer than f; w must carry one more derivative
    than the result needs.
    """
    out = [sign * f[1] - w[1] * f[0]]
    if len(f) > 2 and len(w) > 2:
        out.append(sign * f[2] - w[2] * f[0] - w[1] * f[1])
    return tuple(out)
