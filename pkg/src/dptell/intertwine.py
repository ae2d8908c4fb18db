"""Darboux-Crum intertwining between the original system at the twisted
parameters lambda + ell*delta + delta~ and the deformed system.

``A_hat = d/dx - w_hat'`` with ``w_hat = w0~(lambda + ell*delta) + log xi_ell``.
Hat Hamiltonians are never built as potentials; they act by composing the
first-order operators on x-jets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import classical as cl
from . import deform as df
from . import jets
from .classical import Model, Params
from .numerics import (VerificationReport, gauss_jacobi_rule, gauss_laguerre_rule,
                       gauss_legendre_panel)
from .spectra import DeformedSystem, b_hat, f_hat, gram_matrix

DIVERGENCE_SLOPE = 0.05
FIT_POINTS = 4


@dataclass(frozen=True)
class HatCoefficients:
    model: Model
    p: Params

    def f_hat(self, n: int) -> float:
        return f_hat(self.model, self.p, n)

    def b_hat(self, n: int) -> float:
        return b_hat(self.model, self.p, n)

    def energy(self, n: int) -> float:
        """E_hat_n = f_hat_n * b_hat_n, shared by both hat Hamiltonians."""
        return self.f_hat(n) * self.b_hat(n)

    @property
    def additive_constant(self) -> float:
        return self.energy(0)


def hat_coefficients(sys: DeformedSystem) -> HatCoefficients:
    return HatCoefficients(sys.model, sys.p)


# -- prepotentials and operators --------------------------------------------------

def w_tilde0_jet(model: Model, q: Params, x):
    """``(g-1) log sin x - h log cos x`` (J1) or ``x^2/2 + (g-1) log x`` (L1)."""
    xa = cl.check_domain(model, x)
    if Model(model).is_jacobi:
        s, c = np.sin(xa), np.cos(xa)
        return ((q.g - 1) * np.log(s) - q.h * np.log(c),
                (q.g - 1) * c / s + q.h * s / c,
                -(q.g - 1) / s**2 + q.h / c**2)
    return (0.5 * xa**2 + (q.g - 1) * np.log(xa), xa + (q.g - 1) / xa, 1.0 - (q.g - 1) / xa**2)


def hat_prepotential_jet(sys: DeformedSystem, x):
    le = sys.lam_ell
    return jets.add(w_tilde0_jet(sys.model, le, x), jets.log(sys.xi_x_jet(x)))


def hat_prepotential(sys: DeformedSystem, x):
    out = hat_prepotential_jet(sys, x)[0]
    return float(out) if np.ndim(x) == 0 else out


def apply_A_hat(sys: DeformedSystem, f, x):
    """``f' - w_hat' f`` for an x-jet f; returns a jet one order shorter."""
    return jets.first_order(f, hat_prepotential_jet(sys, x), 1.0)


def apply_A_hat_dagger(sys: DeformedSystem, f, x):
    return jets.first_order(f, hat_prepotential_jet(sys, x), -1.0)


def apply_A_original(model: Model, q: Params, f, x, dagger: bool = False):
    return jets.first_order(f, cl.w0_jet(model, q, x), -1.0 if dagger else 1.0)


def chi_jet(sys: DeformedSystem, x):
    return jets.exp(hat_prepotential_jet(sys, x))


def rho_jet(sys: DeformedSystem, x):
    return jets.exp(jets.scale(-1.0, hat_prepotential_jet(sys, x)))


def original_eigen_jet(sys: DeformedSystem, n: int, x, shifted: bool = False):
    """x-jet of phi_n at the twisted parameters (of lambda+delta if ``shifted``)."""
    s = sys.shifted() if shifted else sys
    return cl.eigenfunction_jet(sys.model, s.lam_twisted, n, x)


# -- eta-jet helpers for the shift operators ---------------------------------------------

def _c1_jet(model: Model, q: Params, eta):
    slope = -(q.g + q.h + 1) if Model(model).is_jacobi else -1.0
    return (cl.c1(model, q, eta), np.full_like(eta, slope))


def _c2_jet(model: Model, eta):
    return (cl.c2(model, eta), -2.0 * eta if Model(model).is_jacobi else np.ones_like(eta))


def _d2_jet(model: Model, eta):
    return (df.d2(model, eta), np.full_like(eta, -1.0 if Model(model).is_jacobi else 0.0))


def hat_forward_F(sys: DeformedSystem, eta, f):
    """``2 (d2 xi d/deta - d1 xi(lambda+delta))`` on an eta-jet; returns a jet."""
    eta = np.asarray(eta, dtype=float)
    xi0 = sys.xi_eta(eta)[:2]
    xi1 = sys.xi_eta(eta, True)[:2]
    first = jets.mul(_d2_jet(sys.model, eta), jets.mul(xi0, f[1:]))
    second = jets.scale(df.d1(sys.model, sys.p), jets.mul(xi1, f))
    return jets.scale(2.0, jets.sub(first, second))


def hat_backward_B(sys: DeformedSystem, eta, f):
    """``(-2/xi)((c2/d2) d/deta + d3)`` on an eta-jet; value only."""
    eta = np.asarray(eta, dtype=float)
    x0 = df.xi(sys.model, sys.p, eta)
    return -2.0 / x0 * (cl.c2(sys.model, eta) / df.d2(sys.model, eta) * f[1]
                        + df.d3(sys.model, sys.p) * f[0])


def original_forward_F(model: Model, q: Params, eta, f):
    return jets.scale(cl.c_F(model), f[1:])


def original_backward_B(model: Model, q: Params, eta, f):
    inner = jets.add(jets.mul(_c2_jet(model, eta), f[1:]), jets.mul(_c1_jet(model, q, eta), f))
    return jets.scale(-4.0 / cl.c_F(model), inner)


def poly_jet(model: Model, q: Params, n: int, eta, order: int = 3):
    return tuple(cl.classical_poly(model, q, n, eta, k) for k in range(order))


# -- residual reports -------------------------------------------------------------

def _compare(lhs, rhs, ref=0.0) -> float:
    """Max deviation over the largest magnitude seen; ``ref`` supplies an
    intermediate magnitude for relations whose two sides both vanish."""
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    scale = max(float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))), float(np.max(np.abs(ref))))
    return float(np.max(np.abs(lhs - rhs))) / (scale if scale > 0 else 1.0)


def _echo(sys: DeformedSystem, **extra) -> dict:
    d = {"model": sys.model.value, "g": sys.p.g, "h": sys.p.h, "ell": sys.p.ell}
    d.update(extra)
    return d


def pair_hamiltonian_residuals(sys: DeformedSystem, n_max: int, x, tol: float = 1e-7) -> VerificationReport:
    """H+ = A_hat^dag A_hat on phi_n(twisted) and H- = A_hat A_hat^dag on phi_{l,n}."""
    rep = VerificationReport()
    hc = hat_coefficients(sys)
    c0 = hc.additive_constant
    lt = sys.lam_twisted
    rep.add("intertwine.additive_constant_positive", 0.0 if c0 > 0 else math.inf, 0.0,
            _echo(sys), detail=f"f_hat_0 b_hat_0 = {c0!r}")
    chi = chi_jet(sys, x)
    rep.add("intertwine.A_hat_chi", _compare(apply_A_hat(sys, chi, x)[0], 0.0, chi[1]), 1e-10, _echo(sys))
    rho = rho_jet(sys, x)
    rep.add("intertwine.A_hat_dag_rho", _compare(apply_A_hat_dagger(sys, rho, x)[0], 0.0, rho[1]), 1e-10,
            _echo(sys))
    for n in range(n_max + 1):
        phi = original_eigen_jet(sys, n, x)
        hp = apply_A_hat_dagger(sys, apply_A_hat(sys, phi, x), x)[0]
        e_plus = cl.energy(sys.model, lt, n) + c0
        rep.add(f"intertwine.H_plus[n={n}]", _compare(hp, e_plus * phi[0]), tol, _echo(sys, n=n))
        phil = sys.eigen_jet(n, x)
        hm = apply_A_hat(sys, apply_A_hat_dagger(sys, phil, x), x)[0]
        e_minus = sys.deformed_energy(n) + c0
        rep.add(f"intertwine.H_minus[n={n}]", _compare(hm, e_minus * phil[0]), tol, _echo(sys, n=n))
        # both eigenvalue paths must equal f_hat b_hat
        rep.add(f"intertwine.E_hat[n={n}]",
                max(abs(e_plus - hc.energy(n)), abs(e_minus - hc.energy(n))) / max(1.0, abs(hc.energy(n))),
                1e-12, _echo(sys, n=n))
        a_phi = apply_A_hat(sys, phi, x)[0]
        rep.add(f"intertwine.A_hat_phi[n={n}]", _compare(a_phi, hc.f_hat(n) * phil[0]), tol, _echo(sys, n=n))
        ad_phil = apply_A_hat_dagger(sys, phil, x)[0]
        rep.add(f"intertwine.A_hat_dag_phi_l[n={n}]", _compare(ad_phil, hc.b_hat(n) * phi[0]), tol,
                _echo(sys, n=n))
        # no eigenfunction is annihilated: |A_hat phi_n| stays comparable to |phi_n|
        ratio = float(np.max(np.abs(a_phi))) / float(np.max(np.abs(phi[0])))
        rep.add(f"intertwine.non_annihilation[n={n}]", 0.1 / ratio if ratio > 0 else math.inf, 1.0,
                _echo(sys, n=n), detail=f"max|A_hat phi|/max|phi| = {ratio:.6g}")
    return rep


def energy_identity_residual(sys: DeformedSystem, n_max: int = 20) -> float:
    """max_n |f_hat_n b_hat_n - f_hat_0 b_hat_0 - E_n(lambda + ell delta)|, exactly 0 expected."""
    hc = hat_coefficients(sys)
    worst = 0.0
    for n in range(n_max + 1):
        lhs = hc.energy(n) - hc.additive_constant
        e = sys.deformed_energy(n)
        e_tw = cl.energy(sys.model, sys.lam_twisted, n)
        worst = max(worst, abs(lhs - e) / max(1.0, abs(e)), abs(e_tw - e) / max(1.0, abs(e)))
    return worst


def intertwining_residuals(sys: DeformedSystem, n_max: int, x, eta, tol: float = 1e-7) -> VerificationReport:
    rep = VerificationReport()
    s1 = sys.shifted()
    lt, lt1 = sys.lam_twisted, s1.lam_twisted
    for n in range(n_max + 1):
        # A_hat(l+d) A(lt) = A_l(l) A_hat(l), on phi_n(lt)
        phi = original_eigen_jet(sys, n, x)
        lhs = apply_A_hat(s1, apply_A_original(sys.model, lt, phi, x), x)[0]
        inner = apply_A_hat(sys, phi, x)
        rhs = sys.apply_A(inner, x)[0]
        rep.add(f"intertwine.AhatA[n={n}]", _compare(lhs, rhs, inner[1]), tol, _echo(sys, n=n))
        # A_hat(l) A(lt)^dag = A_l(l)^dag A_hat(l+d), on phi_n(lt + delta)
        phi1 = original_eigen_jet(sys, n, x, shifted=True)
        lhs = apply_A_hat(sys, apply_A_original(sys.model, lt, phi1, x, dagger=True), x)[0]
        rhs = sys.apply_A_dagger(apply_A_hat(s1, phi1, x), x)[0]
        rep.add(f"intertwine.AhatAdag[n={n}]", _compare(lhs, rhs), tol, _echo(sys, n=n))
        # F_hat(l+d) F(lt) = F_l(l) F_hat(l), on P_n(lt)
        P = poly_jet(sys.model, lt, n, eta)
        lhs = hat_forward_F(s1, eta, original_forward_F(sys.model, lt, eta, P))[0]
        inner = hat_forward_F(sys, eta, P)
        rhs = sys.apply_Fl(eta, inner)
        ref = cl.c_F(sys.model) * df.xi(sys.model, s1.p, eta) * inner[1] / df.xi(sys.model, sys.p, eta)
        rep.add(f"intertwine.FhatF[n={n}]", _compare(lhs, rhs, ref), tol, _echo(sys, n=n))
        # F_hat(l) B(lt) = B_l(l) F_hat(l+d), on P_n(lt + delta)
        P1 = poly_jet(sys.model, lt1, n, eta)
        lhs = hat_forward_F(sys, eta, original_backward_B(sys.model, lt, eta, P1))[0]
        rhs = sys.apply_Bl(eta, hat_forward_F(s1, eta, P1))
        rep.add(f"intertwine.FhatB[n={n}]", _compare(lhs, rhs), tol, _echo(sys, n=n))
        # hat shift operators between P_n(lt) and P_{l,n}
        Pl = sys.main_part_jet(n, eta)
        hc = hat_coefficients(sys)
        rep.add(f"intertwine.F_hat_action[n={n}]",
                _compare(hat_forward_F(sys, eta, P)[0], hc.f_hat(n) * Pl[0]), tol, _echo(sys, n=n))
        rep.add(f"intertwine.B_hat_action[n={n}]",
                _compare(hat_backward_B(sys, eta, Pl), hc.b_hat(n) * P[0]), tol, _echo(sys, n=n))
        rep.add(f"intertwine.B_hat_F_hat[n={n}]",
                _compare(hat_backward_B(sys, eta, hat_forward_F(sys, eta, P)), hc.energy(n) * P[0]), tol,
                _echo(sys, n=n))
        # consequence: A_l phi_{l,n} = f_n(l + ell d) phi_{l,n-1}(l+d)
        lhs = sys.apply_A(sys.eigen_jet(n, x), x)[0]
        rhs = sys.f_coef(n) * s1.deformed_eigenfunction(n - 1, x)
        rep.add(f"intertwine.A_l_action[n={n}]", _compare(lhs, rhs) if n > 0 else
                float(np.max(np.abs(lhs))) / float(np.max(np.abs(sys.eigen_jet(n, x)[1]))), tol, _echo(sys, n=n))
        if n > 0:
            lhs = sys.apply_A_dagger(s1.eigen_jet(n - 1, x), x)[0]
            rhs = sys.b_coef(n - 1) * sys.deformed_eigenfunction(n, x)
            rep.add(f"intertwine.A_l_dag_action[n={n}]", _compare(lhs, rhs), tol, _echo(sys, n=n))
    return rep


# -- norm chain ----------------------------------------------------------------

def _eta_rule(sys: DeformedSystem, order: int):
    le = sys.lam_ell
    if sys.model.is_jacobi:
        return gauss_jacobi_rule(le.g - 0.5, le.h - 0.5, order)
    return gauss_laguerre_rule(le.g - 0.5, order)


def _original_gram(model: Model, q: Params, n_max: int, order: int) -> np.ndarray:
    if Model(model).is_jacobi:
        rule = gauss_jacobi_rule(q.g - 0.5, q.h - 0.5, order)
        factor = 2.0 ** (-(q.g + q.h) - 1)
    else:
        rule = gauss_laguerre_rule(q.g - 0.5, order)
        factor = 0.5
    P = np.array([cl.classical_poly(model, q, n, rule.nodes) for n in range(n_max + 1)])
    return factor * (P * rule.weights) @ P.T


def _hat_applied_gram(sys: DeformedSystem, n_max: int, order: int) -> np.ndarray:
    """``int (A_hat phi_n)(A_hat phi_m) dx`` through x-jets at the eta nodes."""
    rule = _eta_rule(sys, order)
    eta = rule.nodes
    x = cl.x_of_eta(sys.model, eta)
    le = sys.lam_ell
    if sys.model.is_jacobi:
        a, b = le.g - 0.5, le.h - 0.5
        # |dx/deta| divided by the Jacobi weight
        jac = 1.0 / (2.0 * np.sqrt(1 - eta**2) * (1 - eta) ** a * (1 + eta) ** b)
    else:
        jac = 1.0 / (2.0 * np.sqrt(eta) * eta ** (le.g - 0.5) * np.exp(-eta))
    F = np.array([apply_A_hat(sys, original_eigen_jet(sys, n, x), x)[0] for n in range(n_max + 1)])
    return (F * (rule.weights * jac)) @ F.T


@dataclass
class NormChain:
    n: int
    m: int
    steps: dict
    closed_form: float
    residual: float
    scale: float
    order_change: float = 0.0


def norm_chain_check(sys: DeformedSystem, n: int, m: int, order: int = 80) -> NormChain:
    """Norm chain at ``order`` with ``order_change`` measured against ``2*order``."""
    a = _norm_chain(sys, n, m, order)
    b = _norm_chain(sys, n, m, 2 * order)
    b.order_change = max(abs(a.steps[k] - b.steps[k]) for k in a.steps) / a.scale
    return b


def _norm_chain(sys: DeformedSystem, n: int, m: int, order: int) -> NormChain:
    """Evaluate each step of the norm derivation and compare with the closed form.

    (0) f_hat_n f_hat_m int phi_{l,n} phi_{l,m};  (i) int (A_hat phi_n)(A_hat phi_m);
    (iii) E_hat_n int phi_n phi_m at the twisted parameters;  closed form
    f_hat_n b_hat_n h_n(twisted) delta_nm.  The residual is the largest
    deviation relative to sqrt of the diagonal closed forms.
    """
    hc = hat_coefficients(sys)
    k = max(n, m)
    G = gram_matrix(sys, k, order)
    Gi = _hat_applied_gram(sys, k, order)
    Go = _original_gram(sys.model, sys.lam_twisted, k, order)
    steps = {"0": hc.f_hat(n) * hc.f_hat(m) * G[n, m], "i": Gi[n, m], "iii": hc.energy(n) * Go[n, m]}
    closed = hc.energy(n) * cl.norm_hn(sys.model, sys.lam_twisted, n) if n == m else 0.0
    scale = math.sqrt(abs(hc.energy(n) * cl.norm_hn(sys.model, sys.lam_twisted, n)
                          * hc.energy(m) * cl.norm_hn(sys.model, sys.lam_twisted, m)))
    res = max(abs(v - closed) for v in steps.values()) / scale
    return NormChain(n, m, steps, closed, res, scale)


# -- zero modes -------------------------------------------------------------------

@dataclass
class ZeroModeProbe:
    which: str
    epsilons: list
    integrals: list
    exponent: float
    diverges: bool
    monotone: bool
    expected_exponent: float | None = None
    note: str = ""


def default_epsilons(model: Model, which: str) -> list[float]:
    if not Model(model).is_jacobi and which == "chi":
        # the cut-off is the upper limit 1/eps; chi^2 grows like exp(x^2)
        return [1 / 2.0, 1 / 2.5, 1 / 3.0, 1 / 3.5, 1 / 4.0, 1 / 4.5, 1 / 5.0]
    return [10.0 ** (-k / 2) for k in range(2, 10)]


def _log_panels(f, d0: float, d1: float, to_x, per_unit: float = 1.0, nodes: int = 20) -> float:
    """Integrate f over distances [d0, d1] from a singular end in t = log(distance)."""
    t0, t1 = math.log(d0), math.log(d1)
    n_pan = max(1, math.ceil((t1 - t0) / per_unit))
    edges = np.linspace(t0, t1, n_pan + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        t, w = gauss_legendre_panel(a, b, nodes)
        d = np.exp(t)
        total += float(np.sum(w * d * f(to_x(d))))
    return total


def _zero_mode_integral(sys: DeformedSystem, which: str, eps: float) -> float:
    fn = chi_jet if which == "chi" else rho_jet

    def sq(x):
        return fn(sys, x)[0] ** 2

    if sys.model.is_jacobi:
        mid = math.pi / 4
        left = _log_panels(sq, eps, mid, lambda d: d)
        right = _log_panels(sq, eps, math.pi / 2 - mid, lambda d: math.pi / 2 - d)
        return left + right
    upper = 1.0 / eps if which == "chi" else 10.0
    left = _log_panels(sq, eps, 1.0, lambda d: d)
    n_pan = max(1, math.ceil((upper - 1.0) / 0.25))
    edges = np.linspace(1.0, upper, n_pan + 1)
    right = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        xs, w = gauss_legendre_panel(a, b, 20)
        right += float(np.sum(w * sq(xs)))
    return left + right


def zero_mode_norm_probe(sys: DeformedSystem, which: str, epsilons=None) -> ZeroModeProbe:
    """Partial square integrals of chi (``which='chi'``) or rho over shrinking cut-offs.

    The divergence exponent is the least-squares slope of log(integral) against
    log(1/eps) over the last four cut-offs; a slope above 0.05 counts as
    divergence.
    """
    if which not in ("chi", "rho"):
        raise ValueError("which must be 'chi' or 'rho'")
    eps = list(default_epsilons(sys.model, which) if epsilons is None else epsilons)
    vals = [_zero_mode_integral(sys, which, e) for e in eps]
    k = min(FIT_POINTS, len(eps))
    lx = np.log(1.0 / np.asarray(eps[-k:]))
    ly = np.log(np.asarray(vals[-k:]))
    slope = float(np.polyfit(lx, ly, 1)[0]) if k >= 2 else math.nan
    le = sys.lam_ell
    if which == "rho":
        expected = 2 * le.g - 3
    elif sys.model.is_jacobi:
        expected = 2 * le.h - 1
    else:
        expected = None
    monotone = bool(np.all(np.diff(vals) > 0))
    note = "" if expected is not None else "chi^2 ~ exp(x^2) at infinity: faster than any power"
    return ZeroModeProbe(which, eps, vals, slope, bool(slope > DIVERGENCE_SLOPE), monotone, expected, note)


@dataclass
class BrokenSusy:
    chi: ZeroModeProbe
    rho: ZeroModeProbe
    broken: bool = field(init=False)

    def __post_init__(self):
        self.broken = self.chi.diverges and self.rho.diverges


def broken_susy(sys: DeformedSystem) -> BrokenSusy:
    return BrokenSusy(zero_mode_norm_probe(sys, "chi"), zero_mode_norm_probe(sys, "rho"))
