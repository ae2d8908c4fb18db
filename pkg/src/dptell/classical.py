"""The undeformed systems: trigonometric Darboux-Poeschl-Teller (J1) and the
radial oscillator (L1).

Everything polynomial is a function of the sinusoidal coordinate ``eta``;
x-derivatives go through the chain rule with ``d eta / dx`` in closed form.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from . import jets
from .errors import DomainError, ParameterError
from .hypergeom import hyp1f1, hyp2f1, log_gamma, pochhammer

# Points closer than this to x1 or x2 are rejected.
ENDPOINT_TOL = 1e-12


class Model(str, enum.Enum):
    J1 = "J1"
    L1 = "L1"

    @property
    def is_jacobi(self) -> bool:
        return self is Model.J1


@dataclass(frozen=True)
class Domain:
    x1: float
    x2: float


DOMAINS = {Model.J1: Domain(0.0, math.pi / 2), Model.L1: Domain(0.0, math.inf)}


def domain(model: Model) -> Domain:
    return DOMAINS[Model(model)]


@dataclass(frozen=True)
class Params:
    """Couplings ``g`` (and ``h`` for J1) plus the deformation parameter ``ell``."""

    g: float
    h: float | None = None
    ell: float = 0.0

    def shifted(self, dg: float, dh: float = 0.0) -> "Params":
        h = None if self.h is None else self.h + dh
        return replace(self, g=self.g + dg, h=h)


def check_model_params(model: Model, p: Params) -> None:
    if Model(model).is_jacobi and p.h is None:
        raise ParameterError("J1 needs both g and h")
    if not Model(model).is_jacobi and p.h is not None:
        raise ParameterError("L1 takes no h")


def validate(model: Model, p: Params, deform: bool | None = None) -> None:
    """Raise :class:`ParameterError` unless ``p`` is admissible.

    The base systems need ``g, h > 0``.  A deformation (``deform=True``, the
    default whenever ``p.ell > 0``) additionally needs ``g > 3/2`` and, for
    J1, ``h > 1/2``: only then is the deforming function zero-free.
    """
    model = Model(model)
    check_model_params(model, p)
    if deform is None:
        deform = p.ell > 0
    if not (p.g > 0 and (p.h is None or p.h > 0)):
        raise ParameterError(f"couplings must be positive, got {p}")
    if p.ell < 0:
        raise ParameterError("ell must be non-negative")
    if deform:
        if not p.g > 1.5:
            raise ParameterError(f"deformation needs g > 3/2, got g={p.g}")
        if model.is_jacobi and not p.h > 0.5:
            raise ParameterError(f"deformation needs h > 1/2, got h={p.h}")


# -- parameter shifts ---------------------------------------------------------

def shift(model: Model, p: Params, times: float = 1.0) -> Params:
    """``lambda + times * delta``; delta = (1, 1) for J1, 1 for L1."""
    return p.shifted(times, times if Model(model).is_jacobi else 0.0)


def shift_ell(model: Model, p: Params) -> Params:
    """``lambda + ell * delta``."""
    return shift(model, p, p.ell)


def shift_tilde(model: Model, p: Params) -> Params:
    """``lambda + delta~``; delta~ = (-1, 1) for J1, -1 for L1."""
    return p.shifted(-1.0, 1.0 if Model(model).is_jacobi else 0.0)


def twisted(model: Model, p: Params) -> Params:
    """``lambda + ell*delta + delta~``: the original system partnered with the deformation."""
    return shift_tilde(model, shift_ell(model, p))


# -- coordinates ------------------------------------------------------------

def check_domain(model: Model, x) -> np.ndarray:
    xa = np.asarray(x, dtype=float)
    d = domain(model)
    if np.any(~np.isfinite(xa)) or np.any(xa <= d.x1 + ENDPOINT_TOL) or np.any(xa >= d.x2 - ENDPOINT_TOL):
        raise DomainError(f"x must lie strictly inside ({d.x1}, {d.x2})")
    return xa


def sinusoidal(model: Model, x):
    """eta(x): ``cos 2x`` (J1) or ``x**2`` (L1)."""
    xa = check_domain(model, x)
    out = np.cos(2 * xa) if Model(model).is_jacobi else xa * xa
    return float(out) if np.ndim(x) == 0 else out


def eta_jet(model: Model, x) -> jets.Jet:
    xa = check_domain(model, x)
    if Model(model).is_jacobi:
        c, s = np.cos(2 * xa), np.sin(2 * xa)
        return (c, -2.0 * s, -4.0 * c)
    return (xa * xa, 2.0 * xa, 2.0 + 0.0 * xa)


def x_of_eta(model: Model, eta):
    eta = np.asarray(eta, dtype=float)
    return 0.5 * np.arccos(eta) if Model(model).is_jacobi else np.sqrt(eta)


# -- prepotential and spectrum --------------------------------------------------

def prepotential_w0(model: Model, p: Params, x):
    """``g log sin x + h log cos x`` (J1) or ``-x**2/2 + g log x`` (L1)."""
    w = w0_jet(model, p, x)[0]
    return float(w) if np.ndim(x) == 0 else w


def w0_jet(model: Model, p: Params, x) -> jets.Jet:
    xa = check_domain(model, x)
    if Model(model).is_jacobi:
        s, c = np.sin(xa), np.cos(xa)
        t, ct = s / c, c / s
        return (p.g * np.log(s) + p.h * np.log(c),
                p.g * ct - p.h * t,
                -p.g / s**2 - p.h / c**2)
    return (-0.5 * xa**2 + p.g * np.log(xa), -xa + p.g / xa, -1.0 - p.g / xa**2)


def energy(model: Model, p: Params, n: int) -> float:
    """``4n(n + g + h)`` (J1) or ``4n`` (L1)."""
    if Model(model).is_jacobi:
        return 4.0 * n * (n + p.g + p.h)
    return 4.0 * n


def f_coef(model: Model, p: Params, n: int) -> float:
    """Forward coefficient f_n: ``-2(n+g+h)`` (J1), ``-2`` (L1)."""
    if Model(model).is_jacobi:
        return -2.0 * (n + p.g + p.h)
    return -2.0


def b_coef(model: Model, p: Params, n: int) -> float:
    """Backward coefficient b_n = ``-2(n+1)`` for both models (so b_{n-1} = -2n)."""
    return -2.0 * (n + 1)


def c_F(model: Model) -> float:
    return -4.0 if Model(model).is_jacobi else 2.0


def c1(model: Model, p: Params, eta):
    if Model(model).is_jacobi:
        return p.h - p.g - (p.g + p.h + 1) * np.asarray(eta)
    return p.g + 0.5 - np.asarray(eta)


def c2(model: Model, eta):
    eta = np.asarray(eta)
    return 1.0 - eta**2 if Model(model).is_jacobi else eta


# -- orthogonal polynomials -----------------------------------------------------

def classical_poly(model: Model, p: Params, n: int, eta, deriv: int = 0):
    """k-th eta-derivative of ``P_n^{(g-1/2, h-1/2)}`` (J1) or ``L_n^{(g-1/2)}`` (L1).

    Evaluated through the terminating hypergeometric series; ``P_n = 0`` for
    ``n < 0``.  Derivatives use the parameter shift of the series, never
    finite differences.
    """
    eta_a = np.asarray(eta, dtype=float)
    if n < 0 or deriv > n:
        out = np.zeros_like(eta_a)
        return float(out) if np.ndim(eta) == 0 else out
    alpha = p.g - 0.5
    if Model(model).is_jacobi:
        beta = p.h - 0.5
        # The series in (1-eta)/2 cancels badly near eta = -1; there the
        # reflection P^(a,b)(eta) = (-1)^n P^(b,a)(-eta) keeps its argument small.
        left = eta_a < 0
        out = np.where(left,
                       (-1.0) ** (n + deriv) * _jacobi(n, beta, alpha, -eta_a, deriv),
                       _jacobi(n, alpha, beta, eta_a, deriv))
    else:
        a, c = -n, alpha + 1
        norm = pochhammer(alpha + 1, n) / math.factorial(n)
        coef = norm * pochhammer(a, deriv) / pochhammer(c, deriv)
        out = coef * hyp1f1(a + deriv, c + deriv, eta_a)
    return float(out) if np.ndim(eta) == 0 else out


def _jacobi(n: int, alpha: float, beta: float, eta, deriv: int):
    a, b, c = -n, n + alpha + beta + 1, alpha + 1
    coef = (pochhammer(alpha + 1, n) / math.factorial(n) * (-0.5) ** deriv
            * pochhammer(a, deriv) * pochhammer(b, deriv) / pochhammer(c, deriv))
    return coef * hyp2f1(a + deriv, b + deriv, c + deriv, (1.0 - eta) / 2)


def eigenfunction_jet(model: Model, p: Params, n: int, x) -> jets.Jet:
    eta = eta_jet(model, x)
    poly = tuple(classical_poly(model, p, n, eta[0], k) for k in range(3))
    return jets.mul(jets.exp(w0_jet(model, p, x)), jets.compose(poly, eta))


def eigenfunction(model: Model, p: Params, n: int, x):
    """``phi_n(x) = exp(w0(x)) P_n(eta(x))``."""
    out = eigenfunction_jet(model, p, n, x)[0]
    return float(out) if np.ndim(x) == 0 else out


def norm_hn(model: Model, p: Params, n: int) -> float:
    """Closed-form ``int phi_0**2 P_n**2 dx``."""
    if Model(model).is_jacobi:
        lg = (log_gamma(n + p.g + 0.5) + log_gamma(n + p.h + 0.5)
              - log_gamma(n + 1) - log_gamma(n + p.g + p.h))
        return math.exp(lg) / (2.0 * (2 * n + p.g + p.h))
    return 0.5 * math.exp(log_gamma(n + p.g + 0.5) - log_gamma(n + 1))


# -- shift operators ----------------------------------------------------------

def forward_shift_F(model: Model, p: Params, eta, value, deta):
    """``F(lambda) = c_F d/deta``; maps P_n(lambda) to f_n P_{n-1}(lambda + delta)."""
    return c_F(model) * np.asarray(deta)


def backward_shift_B(model: Model, p: Params, eta, value, deta):
    """``B(lambda) = -4/c_F (c2 d/deta + c1)``; maps P_{n-1}(lambda+delta) to b_{n-1} P_n(lambda)."""
    return -4.0 / c_F(model) * (c2(model, eta) * np.asarray(deta) + c1(model, p, eta) * np.asarray(value))
