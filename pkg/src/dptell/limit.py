"""Jacobi -> Laguerre limit of the deformed systems.

With ``x = x_L / sqrt(h)`` and h -> infinity, ``eta_J = cos 2x`` behaves like
``1 - 2 eta_L / h`` and the J1 objects tend to their L1 counterparts.  The
record lists the errors for each h and a least-squares decay exponent in 1/h.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import classical as cl
from . import deform as df
from .classical import Model, Params
from .errors import DomainError
from .intertwine import w_tilde0_jet


@dataclass(frozen=True)
class LimitRow:
    h: float
    x: float
    xi_error: float
    prepotential_error: float
    w0_error: float


@dataclass
class LimitRecord:
    g: float
    ell: float
    x_L: float
    rows: list[LimitRow] = field(default_factory=list)
    xi_exponent: float | None = None
    prepotential_exponent: float | None = None
    w0_exponent: float | None = None

    @property
    def monotone(self) -> bool:
        """True when every error column strictly decreases with h."""
        cols = [[r.xi_error for r in self.rows], [r.prepotential_error for r in self.rows],
                [r.w0_error for r in self.rows]]
        return all(all(b < a for a, b in zip(c, c[1:])) for c in cols)


def _decay_exponent(hs, errs) -> float | None:
    if len(hs) < 2 or any(e <= 0 for e in errs):
        return None
    return float(-np.polyfit(np.log(hs), np.log(errs), 1)[0])


def limit_row(g: float, ell: float, h: float, x_L: float) -> LimitRow:
    pj, pl = Params(g, h, ell), Params(g, None, ell)
    cl.validate(Model.J1, pj, deform=ell > 0)
    cl.validate(Model.L1, pl, deform=ell > 0)
    x = x_L / math.sqrt(h)
    if not 0 < x < math.pi / 2:
        raise DomainError(f"x = x_L/sqrt(h) = {x} leaves (0, pi/2)")
    eta_j = cl.sinusoidal(Model.J1, x)
    eta_l = cl.sinusoidal(Model.L1, x_L)
    xi_err = abs(df.xi(Model.J1, pj, eta_j) - df.xi(Model.L1, pl, eta_l))
    wt_j = float(w_tilde0_jet(Model.J1, Params(g, h), x)[0])
    wt_l = float(w_tilde0_jet(Model.L1, Params(g), x_L)[0])
    w_err = abs(wt_j + 0.5 * (g - 1) * math.log(h) - wt_l)
    w0_j = cl.prepotential_w0(Model.J1, Params(g, h), x)
    w0_l = cl.prepotential_w0(Model.L1, Params(g), x_L)
    w0_err = abs(w0_j + 0.5 * g * math.log(h) - w0_l)
    return LimitRow(float(h), x, float(xi_err), w_err, w0_err)


def jacobi_to_laguerre_limit(g: float, ell: float, h_values, x_L: float) -> LimitRecord:
    hs = [float(h) for h in h_values]
    if any(b <= a for a, b in zip(hs, hs[1:])):
        raise ValueError("h_values must be strictly increasing")
    rec = LimitRecord(g, ell, x_L, [limit_row(g, ell, h, x_L) for h in hs])
    rec.xi_exponent = _decay_exponent(hs, [r.xi_error for r in rec.rows])
    rec.prepotential_exponent = _decay_exponent(hs, [r.prepotential_error for r in rec.rows])
    rec.w0_exponent = _decay_exponent(hs, [r.w0_error for r in rec.rows])
    return rec
