"""The deformed systems: prepotential w_ell, eigenfunctions, spectrum, shift
operators and norms.

The Hamiltonian is carried only through its prepotential, ``H = A^dagger A``
with ``A = d/dx - w'``, so the ground-state energy is exactly zero.
Derivatives are analytic: eta-jets of xi and P_n come from parameter shifts
and x-jets follow from the chain rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import classical as cl
from . import deform as df
from . import jets
from .classical import Model, Params
from .errors import ParameterError


def f_hat(model: Model, p: Params, n: int) -> float:
    """``-2(n+h+1/2)`` (J1) or ``-2`` (L1)."""
    return -2.0 * (n + p.h + 0.5) if Model(model).is_jacobi else -2.0


def b_hat(model: Model, p: Params, n: int) -> float:
    """``-2(n+g+2ell-1/2)`` for both models."""
    return -2.0 * (n + p.g + 2 * p.ell - 0.5)


@dataclass(frozen=True)
class SpectralLine:
    n: int
    energy: float
    norm: float


def _eta_const(c, like):
    return jets.const(c, like)


@dataclass(frozen=True)
class DeformedSystem:
    """A deformed J1/L1 system at parameters ``p`` (``p.ell`` is the deformation).

    Construction validates the parameter range and scans xi for zeros.
    """

    model: Model
    p: Params
    positivity_grid: int = 2000

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        cl.validate(self.model, self.p)
        if self.p.ell > 0:
            pos = df.check_positivity(self.model, self.p, self.positivity_grid)
            if not pos:
                raise ParameterError(f"xi has a zero near x={pos.witness} for {self.p}")

    # -- parameter bookkeeping
    @property
    def lam_ell(self) -> Params:
        """lambda + ell*delta"""
        return cl.shift_ell(self.model, self.p)

    @property
    def lam_twisted(self) -> Params:
        """lambda + ell*delta + delta~, the partner original system (its own ell is 0)."""
        q = cl.twisted(self.model, self.p)
        return Params(q.g, q.h, 0.0)

    def shifted(self, times: int = 1) -> "DeformedSystem":
        return DeformedSystem(self.model, cl.shift(self.model, self.p, times), self.positivity_grid)

    def _base(self, q: Params) -> Params:
        return Params(q.g, q.h, 0.0)

    # -- xi in eta and in x
    def xi_eta(self, eta, shifted: bool = False):
        q = cl.shift(self.model, self.p) if shifted else self.p
        return df.xi_eta_jet(self.model, q, eta)

    def xi_x_jet(self, x, shifted: bool = False):
        return jets.compose(self.xi_eta(cl.sinusoidal(self.model, x), shifted), cl.eta_jet(self.model, x))

    # -- prepotential, potential, ground state
    def w_jet(self, x):
        w0 = cl.w0_jet(self.model, self._base(self.lam_ell), x)
        return jets.add(w0, jets.log(self.xi_x_jet(x, True)), jets.scale(-1.0, jets.log(self.xi_x_jet(x))))

    def prepotential_wl(self, x):
        out = self.w_jet(x)[0]
        return float(out) if np.ndim(x) == 0 else out

    def potential(self, x):
        """``V = w'^2 + w''``, the potential of ``A^dagger A``."""
        _, w1, w2 = self.w_jet(x)
        out = w1 * w1 + w2
        return float(out) if np.ndim(x) == 0 else out

    def psi_jet(self, x):
        w0 = cl.w0_jet(self.model, self._base(self.lam_ell), x)
        return jets.exp(jets.sub(w0, jets.log(self.xi_x_jet(x))))

    def psi_ell(self, x):
        out = self.psi_jet(x)[0]
        return float(out) if np.ndim(x) == 0 else out

    # -- main parts and eigenfunctions
    def main_part_jet(self, n: int, eta):
        """``(P_{l,n}, dP/deta, d2P/deta2)``; zero for n < 0."""
        eta = np.asarray(eta, dtype=float)
        if n < 0:
            z = np.zeros_like(eta)
            return (z, z, z)
        lt = self.lam_twisted
        P = tuple(cl.classical_poly(self.model, lt, n, eta, k) for k in range(4))
        xi0 = self.xi_eta(eta)
        xi1 = self.xi_eta(eta, True)
        d2 = df.d2(self.model, eta)
        d2_jet = (d2, np.full_like(eta, -1.0 if self.model.is_jacobi else 0.0), np.zeros_like(eta))
        first = jets.mul(d2_jet, jets.mul(xi0, P[1:]))
        second = jets.scale(df.d1(self.model, self.p), jets.mul(xi1, P[:3]))
        return jets.scale(2.0 / f_hat(self.model, self.p, n), jets.sub(first, second))

    def main_part_Pln(self, n: int, eta, deriv: int = 0):
        out = self.main_part_value(n, eta) if deriv == 0 else self.main_part_jet(n, eta)[deriv]
        return float(out) if np.ndim(eta) == 0 else out

    def eigen_jet(self, n: int, x):
        eta = cl.eta_jet(self.model, x)
        return jets.mul(self.psi_jet(x), jets.compose(self.main_part_jet(n, eta[0]), eta))

    def deformed_eigenfunction(self, n: int, x):
        """``psi_l(x) P_{l,n}(eta(x))``; value only (cheaper than the jet)."""
        eta = cl.sinusoidal(self.model, x)
        out = np.exp(cl.prepotential_w0(self.model, self._base(self.lam_ell), x)) * self.main_part_value(n, eta)
        out = out / df.xi(self.model, self.p, eta)
        return float(out) if np.ndim(x) == 0 else out

    def main_part_value(self, n: int, eta):
        eta = np.asarray(eta, dtype=float)
        if n < 0:
            return np.zeros_like(eta)
        lt = self.lam_twisted
        P0, P1 = cl.classical_poly(self.model, lt, n, eta), cl.classical_poly(self.model, lt, n, eta, 1)
        xi0 = df.xi(self.model, self.p, eta)
        xi1 = df.xi(self.model, cl.shift(self.model, self.p), eta)
        return 2.0 / f_hat(self.model, self.p, n) * (df.d2(self.model, eta) * xi0 * P1
                                                    - df.d1(self.model, self.p) * xi1 * P0)

    # -- spectrum
    def deformed_energy(self, n: int) -> float:
        return cl.energy(self.model, self.lam_ell, n)

    def f_coef(self, n: int) -> float:
        return cl.f_coef(self.model, self.lam_ell, n)

    def b_coef(self, n: int) -> float:
        return cl.b_coef(self.model, self.lam_ell, n)

    def deformed_norm(self, n: int, form: int = 1) -> float:
        """h_{l,n}.  ``form=1`` uses h_n at the twisted parameters, ``form=2``
        rewrites it through h_n at lambda + ell*delta."""
        ratio = b_hat(self.model, self.p, n) / f_hat(self.model, self.p, n)
        if form == 1:
            return ratio * cl.norm_hn(self.model, self.lam_twisted, n)
        le = self.lam_ell
        q0 = Params(le.g, le.h, 0.0)
        return ratio * f_hat(self.model, q0, n) / b_hat(self.model, q0, n) * cl.norm_hn(self.model, q0, n)

    def spectral_line(self, n: int) -> SpectralLine:
        return SpectralLine(n, self.deformed_energy(n), self.deformed_norm(n))

    # -- operators on functions of eta, given as (value, d/deta[, d2/deta2])
    def apply_Fl(self, eta, f):
        """``c_F (xi1/xi)(d/deta - dlog xi1)`` with xi1 = xi(lambda+delta)."""
        x0 = df.xi(self.model, self.p, eta)
        y0, y1 = df.xi(self.model, cl.shift(self.model, self.p), eta), df.xi_deta(self.model, cl.shift(self.model, self.p), eta)
        return cl.c_F(self.model) * (y0 * f[1] - y1 * f[0]) / x0

    def apply_Bl(self, eta, f):
        """``-4/c_F c2 (xi/xi1)(d/deta + c1(lambda+ell delta)/c2 - dlog xi)``."""
        x0, x1 = df.xi(self.model, self.p, eta), df.xi_deta(self.model, self.p, eta)
        y0 = df.xi(self.model, cl.shift(self.model, self.p), eta)
        c2 = cl.c2(self.model, eta)
        c1 = cl.c1(self.model, self.lam_ell, eta)
        return -4.0 / cl.c_F(self.model) * (c2 * (x0 * f[1] - x1 * f[0]) + c1 * x0 * f[0]) / y0

    def apply_Htilde(self, eta, f):
        """The second-order operator conjugate to H_l, applied to an eta-jet."""
        x0, x1 = df.xi(self.model, self.p, eta), df.xi_deta(self.model, self.p, eta)
        dlog = x1 / x0
        c2 = cl.c2(self.model, eta)
        c1 = cl.c1(self.model, self.lam_ell, eta)
        return -4.0 * (c2 * f[2] + (c1 - 2 * c2 * dlog) * f[1]
                       - 2 * df.d2(self.model, eta) * df.d3(self.model, self.p) * dlog * f[0]
                       - df.E_tilde(self.model, self.p) / 4 * f[0])

    # -- operators on functions of x, given as x-jets
    def apply_A(self, f, x):
        return jets.first_order(f, self.w_jet(x), 1.0)

    def apply_A_dagger(self, f, x):
        return jets.first_order(f, self.w_jet(x), -1.0)


def deformed_system(model: Model, g: float, h: float | None = None, ell: float = 0.0) -> DeformedSystem:
    return DeformedSystem(Model(model), Params(g, h, ell))


def shape_invariance_residual(sys: DeformedSystem, x) -> np.ndarray:
    """Pointwise residual of ``w'(l)^2 - w''(l) = w'(l+d)^2 + w''(l+d) + E_{l,1}``,
    divided by ``1 + max|term|`` at each point."""
    _, a1, a2 = sys.w_jet(x)
    _, b1, b2 = sys.shifted().w_jet(x)
    e1 = sys.deformed_energy(1)
    terms = [a1 * a1, -a2, -b1 * b1, -b2, np.full_like(a1, -e1)]
    res = np.abs(sum(terms))
    return res / (1.0 + np.max(np.abs(terms), axis=0))


def zero_count(sys: DeformedSystem, n: int, grid_points: int = 4000) -> int:
    from .numerics import count_sign_changes, x_grid
    x = x_grid(sys.model, grid_points, edge=1e-6, xmax=math.sqrt(4 * n + 2 * sys.p.g + 40))
    return count_sign_changes(sys.main_part_Pln(n, cl.sinusoidal(sys.model, x)))


def gram_matrix(sys: DeformedSystem, n_max: int, order: int) -> np.ndarray:
    """``int psi_l^2 P_{l,n} P_{l,m} dx`` for n, m <= n_max, computed in eta.

    J1 maps to Gauss-Jacobi with exponents (g+l-1/2, h+l-1/2) and the factor
    2^-(g+h+2l+1); L1 maps to Gauss-Laguerre with exponent g+l-1/2 and the
    factor 1/2.  What remains of the integrand is smooth since xi has no zeros.
    """
    from .numerics import gauss_jacobi_rule, gauss_laguerre_rule
    le = sys.lam_ell
    if sys.model.is_jacobi:
        rule = gauss_jacobi_rule(le.g - 0.5, le.h - 0.5, order)
        factor = 2.0 ** (-(le.g + le.h) - 1)
    else:
        rule = gauss_laguerre_rule(le.g - 0.5, order)
        factor = 0.5
    eta = rule.nodes
    inv_xi2 = 1.0 / df.xi(sys.model, sys.p, eta) ** 2
    P = np.array([sys.main_part_Pln(n, eta) for n in range(n_max + 1)])
    return factor * (P * (rule.weights * inv_xi2)) @ P.T
