"""The invariant suite: every identity of the deformed systems, run in a fixed
order for one parameter set and collected into a VerificationReport."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import classical as cl
from . import deform as df
from . import intertwine as it
from .classical import Model, Params
from .errors import DptellError
from .numerics import (DEFAULT_GRID_POINTS, DEFAULT_QUAD_ORDER, DEFAULT_SEED, TOL_DERIV, TOL_QUAD,
                       TOL_RESIDUAL, VerificationReport, eta_grid, fd_derivative,
                       x_grid)
from .spectra import DeformedSystem, gram_matrix, shape_invariance_residual, zero_count

ZERO_COUNT_POINTS = 4000
# Operator and finite-difference checks sample fewer points than the scans.
CHECK_POINTS = 200
FD_EDGE = 0.02
FD_L1_XMAX = 6.0
TOL_INTERTWINE = 1e-7
ENERGY_IDENTITY_N = 20


@dataclass(frozen=True)
class SuiteConfig:
    grid_points: int = DEFAULT_GRID_POINTS
    quad_order: int = DEFAULT_QUAD_ORDER
    check_points: int = CHECK_POINTS
    tol_residual: float = TOL_RESIDUAL
    tol_quad: float = TOL_QUAD
    tol_deriv: float = TOL_DERIV
    tol_intertwine: float = TOL_INTERTWINE
    seed: int = DEFAULT_SEED

    def as_dict(self) -> dict:
        return asdict(self)


# -- oracles -----------------------------------------------------------------

def _binom(top: float, k: int) -> float:
    """Generalized binomial coefficient as a finite product (no gamma poles)."""
    out = 1.0
    for j in range(k):
        out *= (top - j) / (j + 1)
    return out


def integer_ell_oracle(model: Model, p: Params, eta):
    """xi for integer ell from the explicit coefficient expansion.

    J1: ``P_l^(a,b)(eta) = sum_s C(l+a, l-s) C(l+b, s) ((eta-1)/2)^s ((eta+1)/2)^(l-s)``
    with a = g+l-3/2, b = -h-l-1/2.  L1: ``L_l^(a)(-eta) = sum_k C(l+a, l-k) eta^k / k!``.
    """
    ell = int(round(p.ell))
    if abs(p.ell - ell) > 0 or ell < 0:
        raise ValueError("the polynomial oracle needs an integer ell")
    eta = np.asarray(eta, dtype=float)
    a = p.g + ell - 1.5
    out = np.zeros_like(eta)
    if Model(model).is_jacobi:
        b = -p.h - ell - 0.5
        for s in range(ell + 1):
            out += _binom(ell + a, ell - s) * _binom(ell + b, s) * ((eta - 1) / 2) ** s * ((eta + 1) / 2) ** (ell - s)
    else:
        for k in range(ell + 1):
            out += _binom(ell + a, ell - k) * eta**k / math.factorial(k)
    return out


def schrodinger_residual(sys: DeformedSystem, n: int, x, step: float | None = None) -> float:
    """``max |(-d^2 + V - E) phi| / (1 + |E phi|)`` on L2-normalized phi_{l,n}.

    The second derivative is a finite-difference oracle, independent of the
    analytic jets behind V.  The default step scales like the local wavelength.
    """
    x = np.asarray(x, dtype=float)
    e = sys.deformed_energy(n)
    norm = math.sqrt(sys.deformed_norm(n))
    if step is None:
        step = 0.25 / math.sqrt(1.0 + sys.deformed_energy(max(n, 1)))
    d = cl.domain(sys.model)

    def f(t):
        return sys.deformed_eigenfunction(n, t) / norm

    phi = f(x)
    second = fd_derivative(f, x, 2, step, (d.x1, d.x2)).value
    res = -second + sys.potential(x) * phi - e * phi
    return float(np.max(np.abs(res) / (1.0 + np.abs(e * phi))))


# -- helpers -------------------------------------------------------------------

def _rel(lhs, rhs, *terms) -> float:
    """Max deviation relative to the largest magnitude among both sides and ``terms``."""
    mags = [np.max(np.abs(np.asarray(t, dtype=float))) for t in (lhs, rhs, *terms)]
    scale = float(max(mags))
    return float(np.max(np.abs(np.asarray(lhs) - np.asarray(rhs)))) / (scale if scale > 0 else 1.0)


def _echo(model: Model, p: Params, **extra) -> dict:
    d = {"model": Model(model).value, "g": p.g, "h": p.h, "ell": p.ell}
    d.update(extra)
    return d


def _fd_grid(model: Model, n: int) -> np.ndarray:
    return x_grid(model, n, edge=FD_EDGE, xmax=FD_L1_XMAX)


class _Runner:
    def __init__(self, report: VerificationReport, echo: dict):
        self.report = report
        self.echo = echo

    def run(self, name: str, fn) -> None:
        """Run one check group; an exception becomes a single failed entry."""
        try:
            fn()
        except (DptellError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
            self.report.fail(name, f"{type(exc).__name__}: {exc}", self.echo)


# -- check groups ---------------------------------------------------------------

def _positivity(rep, sys, cfg):
    for tag, q in (("", sys.p), ("_shifted", cl.shift(sys.model, sys.p))):
        if q.ell == 0:
            rep.add(f"positivity{tag}", 0.0, 0.0, _echo(sys.model, q), detail="ell = 0: xi is constant")
            continue
        res = df.check_positivity(sys.model, q, cfg.grid_points)
        rep.add(f"positivity{tag}", 0.0 if res else math.inf, 0.0, _echo(sys.model, q),
                detail=f"min xi = {res.min_value!r}" + ("" if res else f"; zero near x = {res.witness!r}"))


def _xi_identities(rep, sys, cfg):
    eta = eta_grid(sys.model, cfg.check_points)
    r = df.xi_identity_residuals(sys.model, sys.p, eta)
    for name, v in zip(("ode", "shift_lambda", "shift_ell"), r.relative()):
        rep.add(f"xi.{name}", v, cfg.tol_residual, _echo(sys.model, sys.p))
    dom = (-1.0, 1.0) if sys.model.is_jacobi else (0.0, math.inf)
    inner = eta[(eta > dom[0] + 0.05) & (eta < dom[1] - 0.05)][::10]
    fd = fd_derivative(lambda t: df.xi(sys.model, sys.p, t), inner, 1, 1e-2, dom).value
    rep.add("xi.derivative_fd", _rel(df.xi_deta(sys.model, sys.p, inner), fd), cfg.tol_deriv,
            _echo(sys.model, sys.p))


def _classical_shape_invariance(rep, sys, cfg):
    x = x_grid(sys.model, cfg.grid_points)
    q = Params(sys.p.g, sys.p.h)
    _, a1, a2 = cl.w0_jet(sys.model, q, x)
    _, b1, b2 = cl.w0_jet(sys.model, cl.shift(sys.model, q), x)
    terms = [a1 * a1, -a2, -b1 * b1, -b2, np.full_like(a1, -cl.energy(sys.model, q, 1))]
    res = float(np.max(np.abs(sum(terms)) / (1.0 + np.max(np.abs(terms), axis=0))))
    rep.add("classical.shape_invariance", res, cfg.tol_residual, _echo(sys.model, q))


def _deformed_shape_invariance(rep, sys, cfg):
    x = x_grid(sys.model, cfg.grid_points)
    rep.add("spectra.shape_invariance", float(np.max(shape_invariance_residual(sys, x))), cfg.tol_residual,
            _echo(sys.model, sys.p))


def _schrodinger(rep, sys, cfg, n_max):
    x = _fd_grid(sys.model, cfg.check_points)
    for n in range(n_max + 1):
        rep.add(f"spectra.schrodinger[n={n}]", schrodinger_residual(sys, n, x), cfg.tol_residual,
                _echo(sys.model, sys.p, n=n))
    # ground state is exp(w_l), energies follow the closed form
    x = x_grid(sys.model, cfg.check_points)
    rep.add("spectra.ground_state", _rel(sys.deformed_eigenfunction(0, x), np.exp(sys.prepotential_wl(x))),
            1e-12, _echo(sys.model, sys.p))
    le = sys.lam_ell
    worst = 0.0
    for n in range(n_max + 1):
        exact = 4.0 * n * (n + le.g + le.h) if sys.model.is_jacobi else 4.0 * n
        worst = max(worst, abs(sys.deformed_energy(n) - exact))
    rep.add("spectra.energy_closed_form", worst, 0.0, _echo(sys.model, sys.p))


def _orthogonality(rep, sys, cfg, n_max):
    N = cfg.quad_order
    G1, G2 = gram_matrix(sys, n_max, N), gram_matrix(sys, n_max, 2 * N)
    h1 = np.array([sys.deformed_norm(n) for n in range(n_max + 1)])
    h2 = np.array([sys.deformed_norm(n, form=2) for n in range(n_max + 1)])
    scale = np.sqrt(np.outer(h1, h1))
    off = ~np.eye(n_max + 1, dtype=bool)
    for tag, G, order in (("", G1, N), ("_2N", G2, 2 * N)):
        echo = _echo(sys.model, sys.p, order=order)
        rep.add(f"spectra.orthogonality{tag}", float(np.max(np.abs(G[off]) / scale[off])) if n_max else 0.0,
                cfg.tol_quad, echo)
        rep.add(f"spectra.norm_form1{tag}", float(np.max(np.abs(np.diag(G) - h1) / h1)), cfg.tol_quad, echo)
        rep.add(f"spectra.norm_form2{tag}", float(np.max(np.abs(np.diag(G) - h2) / h2)), cfg.tol_quad, echo)
    rep.add("spectra.gram_refinement", float(np.max(np.abs(G1 - G2) / scale)), cfg.tol_quad,
            _echo(sys.model, sys.p, order=N))


def _shift_relations(rep, sys, cfg, n_max):
    eta = eta_grid(sys.model, cfg.check_points)
    s1 = sys.shifted()
    for n in range(n_max + 1):
        echo = _echo(sys.model, sys.p, n=n)
        P = sys.main_part_jet(n, eta)
        lhs = sys.apply_Fl(eta, P)
        rhs = sys.f_coef(n) * s1.main_part_value(n - 1, eta)
        rep.add(f"spectra.F_l[n={n}]", _rel(lhs, rhs, cl.c_F(sys.model) * P[1]), cfg.tol_residual, echo)
        if n > 0:
            Q = s1.main_part_jet(n - 1, eta)
            lhs = sys.apply_Bl(eta, Q)
            rhs = sys.b_coef(n - 1) * P[0]
            rep.add(f"spectra.B_l[n={n}]", _rel(lhs, rhs, cl.c2(sys.model, eta) * Q[1]), cfg.tol_residual, echo)
        lhs = sys.apply_Htilde(eta, P)
        c1 = cl.c1(sys.model, sys.lam_ell, eta)
        rep.add(f"spectra.H_tilde[n={n}]",
                _rel(lhs, sys.deformed_energy(n) * P[0], 4 * cl.c2(sys.model, eta) * P[2], 4 * c1 * P[1]),
                cfg.tol_residual, echo)
    # classical shift relations at lambda
    q = Params(sys.p.g, sys.p.h)
    qd = cl.shift(sys.model, q)
    for n in range(n_max + 1):
        echo = _echo(sys.model, q, n=n)
        Pn = cl.classical_poly(sys.model, q, n, eta)
        dPn = cl.classical_poly(sys.model, q, n, eta, 1)
        lhs = cl.forward_shift_F(sys.model, q, eta, Pn, dPn)
        rhs = cl.f_coef(sys.model, q, n) * cl.classical_poly(sys.model, qd, n - 1, eta)
        rep.add(f"classical.F[n={n}]", _rel(lhs, rhs, dPn), cfg.tol_residual, echo)
        if n > 0:
            Q0 = cl.classical_poly(sys.model, qd, n - 1, eta)
            Q1 = cl.classical_poly(sys.model, qd, n - 1, eta, 1)
            lhs = cl.backward_shift_B(sys.model, q, eta, Q0, Q1)
            rep.add(f"classical.B[n={n}]", _rel(lhs, cl.b_coef(sys.model, q, n - 1) * Pn, Q1), cfg.tol_residual, echo)


def _intertwining(rep, sys, cfg, n_max):
    x = x_grid(sys.model, cfg.check_points, edge=FD_EDGE, xmax=FD_L1_XMAX)
    eta = eta_grid(sys.model, cfg.check_points)
    rep.extend(it.pair_hamiltonian_residuals(sys, n_max, x, cfg.tol_intertwine))
    rep.extend(it.intertwining_residuals(sys, n_max, x, eta, cfg.tol_intertwine))
    for n in range(n_max + 1):
        for m in sorted({n, min(n + 1, n_max)}):
            c = it.norm_chain_check(sys, n, m, cfg.quad_order)
            echo = _echo(sys.model, sys.p, n=n, m=m)
            rep.add(f"intertwine.norm_chain[n={n},m={m}]", c.residual, cfg.tol_quad, echo,
                    detail=" ".join(f"{k}={v!r}" for k, v in c.steps.items()))
            rep.add(f"intertwine.norm_chain_refinement[n={n},m={m}]", c.order_change, cfg.tol_quad, echo)


def _zero_modes(rep, sys, cfg):
    b = it.broken_susy(sys)
    for probe in (b.chi, b.rho):
        detail = f"exponent={probe.exponent!r} expected={probe.expected_exponent!r}"
        # residual = how far the fitted exponent stays from the divergence threshold
        rep.add(f"intertwine.zero_mode_{probe.which}_diverges",
                0.0 if probe.diverges and probe.monotone else math.inf, 0.0, _echo(sys.model, sys.p),
                detail=detail)
    rep.add("intertwine.broken_susy", 0.0 if b.broken else math.inf, 0.0, _echo(sys.model, sys.p))


def _zero_counts(rep, sys, cfg, n_max):
    for n in range(n_max + 1):
        c = zero_count(sys, n, ZERO_COUNT_POINTS)
        rep.add(f"spectra.zero_count[n={n}]", abs(c - n), 0.0, _echo(sys.model, sys.p, n=n),
                detail=f"sign changes = {c}")


def _energy_factors(rep, sys, cfg):
    rep.add("intertwine.energy_identity", it.energy_identity_residual(sys, ENERGY_IDENTITY_N), 1e-12,
            _echo(sys.model, sys.p, n_max=ENERGY_IDENTITY_N))


def _integer_ell(rep, sys, cfg):
    if sys.p.ell == 0 or sys.p.ell != round(sys.p.ell):
        return
    eta = eta_grid(sys.model, 50)
    xi = df.xi(sys.model, sys.p, eta)
    orc = integer_ell_oracle(sys.model, sys.p, eta)
    rep.add("deform.integer_ell_oracle", float(np.max(np.abs(xi - orc) / np.maximum(1.0, np.abs(orc)))), 1e-11,
            _echo(sys.model, sys.p))
    # for integer ell the main parts are polynomials of degree ell + n in eta
    for n in range(3):
        t = np.cos(np.pi * (np.arange(60) + 0.5) / 60) if sys.model.is_jacobi else np.linspace(0.0, 4.0, 60)
        vals = sys.main_part_value(n, t)
        deg = int(round(sys.p.ell)) + n
        coef = np.polynomial.chebyshev.chebfit(t, vals, deg + 2)
        tail = float(np.max(np.abs(coef[deg + 1:])) / np.max(np.abs(coef)))
        rep.add(f"spectra.integer_ell_degree[n={n}]", tail, 1e-10, _echo(sys.model, sys.p, n=n))


def run_invariant_suite(model: Model, p: Params, n_max: int = 4, config: SuiteConfig | None = None
                        ) -> VerificationReport:
    """All checks for one parameter set, in a fixed order; errors become failed entries."""
    cfg = config or SuiteConfig()
    rep = VerificationReport()
    try:
        model = Model(model)
        sys = DeformedSystem(model, p, cfg.grid_points)
    except (DptellError, ValueError) as exc:
        rep.fail("parameters", f"{type(exc).__name__}: {exc}",
                 {"model": str(getattr(model, "value", model)), "g": p.g, "h": p.h, "ell": p.ell})
        return rep
    r = _Runner(rep, _echo(model, p))
    r.run("positivity", lambda: _positivity(rep, sys, cfg))
    r.run("xi.identities", lambda: _xi_identities(rep, sys, cfg))
    r.run("classical.shape_invariance", lambda: _classical_shape_invariance(rep, sys, cfg))
    r.run("spectra.shape_invariance", lambda: _deformed_shape_invariance(rep, sys, cfg))
    r.run("spectra.schrodinger", lambda: _schrodinger(rep, sys, cfg, n_max))
    r.run("spectra.orthogonality", lambda: _orthogonality(rep, sys, cfg, n_max))
    r.run("shift_relations", lambda: _shift_relations(rep, sys, cfg, n_max))
    r.run("intertwine", lambda: _intertwining(rep, sys, cfg, n_max))
    r.run("intertwine.zero_modes", lambda: _zero_modes(rep, sys, cfg))
    r.run("spectra.zero_count", lambda: _zero_counts(rep, sys, cfg, n_max))
    r.run("intertwine.energy_identity", lambda: _energy_factors(rep, sys, cfg))
    r.run("deform.integer_ell", lambda: _integer_ell(rep, sys, cfg))
    return rep
