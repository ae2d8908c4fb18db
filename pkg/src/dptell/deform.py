"""Deforming functions xi_ell(eta; lambda) for continuous ell.

J1: ``N * 2F1(-ell, g-h+ell-1; g+ell-1/2 | (1-eta)/2)``
L1: ``N * 1F1(-ell; g+ell-1/2 | -eta)``

with ``N = Gamma(g+2ell-1/2) / (Gamma(ell+1) Gamma(g+ell-1/2))``.  Both are
zero-free on the domain when g > 3/2 (and h > 1/2 for J1).
"""
from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from . import classical as cl
from .classical import Model, Params
from .errors import DomainError, ParameterError
from .hypergeom import gamma_sign, hyp1f1, hyp2f1, log_gamma, pochhammer

# Distance from the endpoints of the extra positivity probe points.
POSITIVITY_EDGE = 1e-6
# Upper end of the L1 scan in x (eta = 400); the series there has only positive terms.
L1_SCAN_XMAX = 20.0


# -- constants ------------------------------------------------------------------

def c1_tilde(model: Model, p: Params, eta, ell: float | None = None):
    ell = p.ell if ell is None else ell
    eta = np.asarray(eta)
    if Model(model).is_jacobi:
        return -(p.g + p.h + 2 * ell - 1 + (p.g - p.h) * eta)
    return p.g + ell - 0.5 + eta


def d1(model: Model, p: Params) -> float:
    return p.h + 0.5 if Model(model).is_jacobi else 1.0


def d2(model: Model, eta):
    eta = np.asarray(eta)
    return -(1.0 + eta) if Model(model).is_jacobi else 1.0 + 0.0 * eta


def d3(model: Model, p: Params, ell: float | None = None) -> float:
    ell = p.ell if ell is None else ell
    return p.g + ell - 0.5


def E_tilde(model: Model, p: Params, ell: float | None = None) -> float:
    ell = p.ell if ell is None else ell
    if Model(model).is_jacobi:
        return 4 * ell * (ell + p.g - p.h - 1)
    return -4 * ell


# -- the deforming function -------------------------------------------------------

def xi_prefactor(p: Params, ell: float | None = None) -> float:
    ell = p.ell if ell is None else ell
    return math.exp(log_gamma(p.g + 2 * ell - 0.5) - log_gamma(ell + 1) - log_gamma(p.g + ell - 0.5))


# The operator checks evaluate xi repeatedly on the same grids; a small memo
# keyed on the exact argument bytes avoids redoing the slow z -> 1 branch.
_XI_CACHE_SIZE = 512
_xi_cache: OrderedDict = OrderedDict()


def xi(model: Model, p: Params, eta, deriv: int = 0):
    """``d^k xi_ell / d eta^k`` at ``eta`` (k = ``deriv``).

    Derivatives come from the parameter shift of the series.  The J1 branch
    stays accurate up to eta -> -1 through the z -> 1 continuation in
    :func:`hyp2f1`; the L1 branch evaluates the Kummer-transformed series
    (all terms positive) automatically.
    """
    model = Model(model)
    cl.check_model_params(model, p)
    if p.g + p.ell - 0.5 <= 0:
        raise ParameterError(f"xi needs g + ell > 1/2, got {p}")
    eta_a = np.ascontiguousarray(eta, dtype=float)
    key = (model, p.g, p.h, p.ell, deriv, eta_a.shape, eta_a.tobytes())
    hit = _xi_cache.get(key)
    if hit is None:
        hit = _xi_uncached(model, p, eta_a, deriv)
        hit.setflags(write=False)
        _xi_cache[key] = hit
        if len(_xi_cache) > _XI_CACHE_SIZE:
            _xi_cache.popitem(last=False)
    else:
        _xi_cache.move_to_end(key)
    return float(hit.reshape(-1)[0]) if np.ndim(eta) == 0 else hit.copy()


def _xi_uncached(model: Model, p: Params, eta_a: np.ndarray, deriv: int) -> np.ndarray:
    ell = p.ell
    pref = xi_prefactor(p)
    if model.is_jacobi:
        a, b, c = -ell, p.g - p.h + ell - 1, p.g + ell - 0.5
        coef = pref * (-0.5) ** deriv * pochhammer(a, deriv) * pochhammer(b, deriv) / pochhammer(c, deriv)
        out = 0.0 * eta_a if coef == 0 else coef * hyp2f1(a + deriv, b + deriv, c + deriv, (1.0 - eta_a) / 2)
    else:
        a, c = -ell, p.g + ell - 0.5
        coef = pref * (-1.0) ** deriv * pochhammer(a, deriv) / pochhammer(c, deriv)
        out = 0.0 * eta_a if coef == 0 else coef * hyp1f1(a + deriv, c + deriv, -eta_a)
    return np.array(out, dtype=float)


def xi_deta(model: Model, p: Params, eta):
    return xi(model, p, eta, 1)


def xi_eta_jet(model: Model, p: Params, eta):
    """``(xi, xi', xi'')`` in eta."""
    return tuple(xi(model, p, eta, k) for k in range(3))


def xi_alternative(model: Model, p: Params, eta):
    """The Euler (J1) / Kummer (L1) transformed form; used as a cross-check.

    The J1 version runs its series in (1-eta)/2 as well, so it is only
    usable where that argument stays below 1 - margin.
    """
    model = Model(model)
    ell = p.ell
    eta_a = np.asarray(eta, dtype=float)
    pref = xi_prefactor(p)
    if model.is_jacobi:
        from .hypergeom import gauss_2f1
        z = (1.0 - eta_a) / 2
        f = gauss_2f1(p.g + 2 * ell - 0.5, p.h + 0.5, p.g + ell - 0.5, z).value
        out = pref * ((1.0 + eta_a) / 2) ** (p.h + ell + 0.5) * f
    else:
        from .hypergeom import kummer_1f1
        out = pref * np.exp(-eta_a) * kummer_1f1(p.g + 2 * ell - 0.5, p.g + ell - 0.5, eta_a).value
    return float(out) if np.ndim(eta) == 0 else out


# -- checks -------------------------------------------------------------------

def positivity_grid(model: Model, n_grid: int) -> np.ndarray:
    """Interior x grid that includes the two points 1e-6 away from the ends."""
    d = cl.domain(model)
    x2 = d.x2 if math.isfinite(d.x2) else L1_SCAN_XMAX
    if Model(model).is_jacobi:
        inner = np.linspace(d.x1, x2, max(n_grid - 2, 1) + 2)[1:-1]
    else:
        inner = np.geomspace(1e-4, x2 / 2, max(n_grid - 2, 1))
    return np.concatenate(([d.x1 + POSITIVITY_EDGE], inner, [x2 - POSITIVITY_EDGE]))


@dataclass(frozen=True)
class PositivityResult:
    positive: bool
    witness: float | None = None
    min_value: float = math.nan

    def __bool__(self) -> bool:
        return self.positive


def check_positivity(model: Model, p: Params, n_grid: int = 2000) -> PositivityResult:
    cl.validate(model, p, deform=True)
    x = positivity_grid(model, n_grid)
    vals = xi(model, p, cl.sinusoidal(model, x))
    bad = np.flatnonzero(~(vals > 0))
    witness = float(x[bad[0]]) if bad.size else None
    return PositivityResult(bad.size == 0, witness, float(np.min(vals)))


@dataclass(frozen=True)
class XiResiduals:
    """Pointwise residuals of the three xi formulas and their scales.

    ``scale_*`` is the largest magnitude of any single term in that formula
    over the grid.
    """

    ode: np.ndarray
    shift_lambda: np.ndarray
    shift_ell: np.ndarray
    scale_ode: float
    scale_lambda: float
    scale_ell: float

    def relative(self) -> tuple[float, float, float]:
        return (float(np.max(np.abs(self.ode))) / self.scale_ode,
                float(np.max(np.abs(self.shift_lambda))) / self.scale_lambda,
                float(np.max(np.abs(self.shift_ell))) / self.scale_ell)


def _residual(*terms):
    res = sum(terms)
    scale = max(float(np.max(np.abs(t))) for t in terms)
    return res, scale if scale > 0 else 1.0


def xi_identity_residuals(model: Model, p: Params, eta_grid) -> XiResiduals:
    model = Model(model)
    eta = np.asarray(eta_grid, dtype=float)
    pd = cl.shift(model, p)
    x0, x1, x2 = xi_eta_jet(model, p, eta)
    y0, y1 = xi(model, pd, eta), xi(model, pd, eta, 1)
    c2 = cl.c2(model, eta)
    ode, s0 = _residual(c2 * x2, c1_tilde(model, p, eta) * x1, E_tilde(model, p) / 4 * x0)
    sh1, s1 = _residual(d1(model, cl.shift_ell(model, p)) * x0, d2(model, eta) * x1, -d1(model, p) * y0)
    sh2, s2 = _residual(d3(model, p) * y0, c2 / d2(model, eta) * y1,
                        -d3(model, cl.shift_ell(model, p), p.ell) * x0)
    return XiResiduals(ode, sh1, sh2, s0, s1, s2)


# -- J2 / L2 candidates ---------------------------------------------------------------

def xi_candidate2(kind: str, p: Params, eta, deriv: int = 0):
    """The J2 / L2 candidate deforming functions (valid only for integer ell).

    ``N2 = Gamma(-g+1/2) / (Gamma(ell+1) Gamma(-g-ell+1/2))`` times
    ``2F1(-ell, h-g+ell-1; -g-ell+1/2 | (1-eta)/2)`` (J2) or
    ``1F1(-ell; -g-ell+1/2 | eta)`` (L2).
    """
    ell = p.ell
    c = -p.g - ell + 0.5
    sign = gamma_sign(-p.g + 0.5) * gamma_sign(c)
    pref = sign * math.exp(log_gamma(-p.g + 0.5) - log_gamma(ell + 1) - log_gamma(c))
    eta_a = np.asarray(eta, dtype=float)
    if kind == "J2":
        if p.h is None:
            raise ParameterError("J2 needs h")
        a, b = -ell, p.h - p.g + ell - 1
        coef = pref * (-0.5) ** deriv * pochhammer(a, deriv) * pochhammer(b, deriv) / pochhammer(c, deriv)
        out = 0.0 * eta_a if coef == 0 else coef * hyp2f1(a + deriv, b + deriv, c + deriv, (1.0 - eta_a) / 2)
    elif kind == "L2":
        a = -ell
        coef = pref * pochhammer(a, deriv) / pochhammer(c, deriv)
        out = 0.0 * eta_a if coef == 0 else coef * hyp1f1(a + deriv, c + deriv, eta_a)
    else:
        raise ParameterError(f"unknown candidate {kind!r}")
    return float(out) if np.ndim(eta) == 0 else out


@dataclass
class ProbeRecord:
    """Diagnostics for a J2/L2 candidate; nothing here is asserted."""

    kind: str
    params: Params
    sign_changes: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def zero_free(self) -> bool:
        return all(v == 0 for v in self.sign_changes.values())

    @property
    def identities_hold(self) -> bool:
        return all(v < 1e-9 for v in self.residuals.values())


def probe_j2_l2(kind: str, p: Params, eta_grid) -> ProbeRecord:
    """Evaluate a J2/L2 candidate at lambda, lambda+delta, lambda+2 delta.

    Reports sign changes on the grid and the relative residuals of the shift
    identities the integer-ell polynomials satisfy.  J2 uses the J1 formulas
    mirrored by ``g <-> h, eta -> -eta``; L2 uses
    ``eta xi' + (b-1) xi = (-g-1/2) xi(lambda+delta)`` with ``b = -g-ell+1/2``
    and ``xi(lambda+delta) - xi'(lambda+delta) = xi(lambda)``.  These follow
    from contiguous relations and hold for every ell; what breaks for
    non-integer ell is the absence of zeros along the shifted family.
    """
    from .numerics import count_sign_changes

    rec = ProbeRecord(kind, p)
    eta = np.asarray(eta_grid, dtype=float)
    jac = kind == "J2"
    model = Model.J1 if jac else Model.L1
    try:
        vals = {}
        for k in range(3):
            pk = cl.shift(model, p, k)
            vals[k] = (xi_candidate2(kind, pk, eta), xi_candidate2(kind, pk, eta, 1))
            rec.sign_changes[f"lambda+{k}delta"] = count_sign_changes(vals[k][0])
        (x0, x1), (y0, y1) = vals[0], vals[1]
        ell = p.ell
        if jac:
            r1, s1 = _residual((p.g + ell + 0.5) * x0, (1.0 - eta) * x1, -(p.g + 0.5) * y0)
            r2, s2 = _residual((p.h + ell - 0.5) * y0, (1.0 + eta) * y1, -(p.h + 2 * ell - 0.5) * x0)
        else:
            r1, s1 = _residual(eta * x1, (-p.g - ell - 0.5) * x0, (p.g + 0.5) * y0)
            r2, s2 = _residual(y0, -y1, -x0)
        rec.residuals["shift_lambda"] = float(np.max(np.abs(r1))) / s1
        rec.residuals["shift_ell"] = float(np.max(np.abs(r2))) / s2
    except (DomainError, ParameterError, ArithmeticError, ValueError) as exc:
        rec.error = f"{type(exc).__name__}: {exc}"
    return rec
