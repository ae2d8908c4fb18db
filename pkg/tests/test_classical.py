import math

import numpy as np
import pytest

import oracles
from conftest import random_draws
from dptell import classical as cl
from dptell import jets
from dptell.classical import Model, Params
from dptell.errors import DomainError, ParameterError
from dptell.numerics import gauss_jacobi_rule, gauss_laguerre_rule, x_grid

J1, L1 = Model.J1, Model.L1


def test_sinusoidal_examples():
    assert cl.sinusoidal(J1, math.pi / 4) == pytest.approx(0.0, abs=1e-16)
    assert cl.sinusoidal(L1, 2.0) == 4.0
    assert cl.sinusoidal(J1, math.pi / 6) == pytest.approx(0.5)
    for bad in (0.0, math.pi / 2, -0.1, 2.0):
        with pytest.raises(DomainError):
            cl.sinusoidal(J1, bad)
    with pytest.raises(DomainError):
        cl.sinusoidal(L1, 0.0)


def test_prepotential_examples():
    assert cl.prepotential_w0(J1, Params(2, 3), math.pi / 4) == pytest.approx(-2.5 * math.log(2))
    assert cl.prepotential_w0(J1, Params(2, 3), math.pi / 4) == pytest.approx(-1.7328680, abs=1e-7)
    assert cl.prepotential_w0(L1, Params(1), 1.0) == -0.5
    for g in (0.7, 2.0, 4.4):
        assert cl.prepotential_w0(J1, Params(g, g), math.pi / 4) == pytest.approx(-g * math.log(2))


def test_energy_examples():
    assert cl.energy(J1, Params(2, 3), 0) == 0 and cl.energy(L1, Params(2), 0) == 0
    assert cl.energy(J1, Params(2, 3), 1) == 24
    assert cl.energy(L1, Params(2), 2) == 8


def test_factorization_exact():
    for m, p in ((J1, Params(2.3, 0.7)), (L1, Params(1.9))):
        for n in range(21):
            assert cl.energy(m, p, n) == cl.f_coef(m, p, n) * cl.b_coef(m, p, n - 1)


def test_poly_examples():
    eta = np.linspace(-0.9, 0.9, 7)
    assert np.all(cl.classical_poly(J1, Params(2, 3), 0, eta) == 1.0)
    assert cl.classical_poly(J1, Params(2, 3), -1, 0.3) == 0.0
    assert cl.classical_poly(J1, Params(2, 3), 1, 0.0) == pytest.approx(-0.5)


@pytest.mark.parametrize("n", range(9))
def test_poly_against_recurrences(n):
    eta = np.linspace(-0.999, 0.999, 41)
    for g, h in ((2.0, 3.0), (0.7, 1.9), (4.1, 0.3)):
        ref = oracles.jacobi_recurrence(n, g - 0.5, h - 0.5, eta)
        got = cl.classical_poly(J1, Params(g, h), n, eta)
        assert np.max(np.abs(got - ref)) <= 1e-12 * max(1.0, np.max(np.abs(ref)))
    t = np.geomspace(1e-3, 40, 41)
    for g in (0.7, 2.0, 4.1):
        ref = oracles.laguerre_recurrence(n, g - 0.5, t)
        got = cl.classical_poly(L1, Params(g), n, t)
        assert np.max(np.abs(got - ref) / np.maximum(1.0, np.abs(ref))) <= 1e-11


@pytest.mark.parametrize("model,p", [(J1, Params(2.0, 3.0)), (J1, Params(0.6, 4.2)), (L1, Params(1.3))])
def test_poly_ode(model, p):
    eta = np.linspace(-0.95, 0.95, 50) if model is J1 else np.linspace(0.01, 30, 50)
    for n in range(9):
        P = [cl.classical_poly(model, p, n, eta, k) for k in range(3)]
        terms = [cl.c2(model, eta) * P[2], cl.c1(model, p, eta) * P[1], cl.energy(model, p, n) / 4 * P[0]]
        assert np.max(np.abs(sum(terms))) <= 1e-9 * max(np.max(np.abs(t)) for t in terms)


def test_eigenfunction_examples():
    assert cl.eigenfunction(J1, Params(2, 3), 0, math.pi / 4) == pytest.approx(0.1767767, abs=1e-7)
    assert cl.eigenfunction(L1, Params(1), 1, 1.0) == pytest.approx(math.exp(-0.5) * 0.5)
    assert cl.eigenfunction(L1, Params(1), 1, 1.0) == pytest.approx(0.3032653, abs=1e-7)
    # decay at both ends
    assert abs(cl.eigenfunction(J1, Params(2, 3), 0, 1e-6)) < 1e-10
    assert abs(cl.eigenfunction(J1, Params(2, 3), 0, math.pi / 2 - 1e-6)) < 1e-10
    assert abs(cl.eigenfunction(L1, Params(2), 0, 30.0)) < 1e-100


def test_norm_examples():
    assert cl.norm_hn(L1, Params(2), 0) == pytest.approx(math.gamma(2.5) / 2)
    assert cl.norm_hn(L1, Params(2), 0) == pytest.approx(0.6646701, abs=1e-7)
    # g = h = 1/2 needs a direct quadrature: phi_0^2 = sin x cos x
    assert oracles.quad_x(lambda x: math.sin(x) * math.cos(x), 0, math.pi / 2) == pytest.approx(0.5)
    assert cl.norm_hn(J1, Params(0.5, 0.5), 0) == pytest.approx(0.5, rel=1e-13)


@pytest.mark.parametrize("model,p", [(J1, Params(2.0, 3.0)), (J1, Params(1.2, 0.4)), (L1, Params(2.0)), (L1, Params(0.8))])
def test_norms_by_adaptive_quadrature(model, p):
    x2 = math.pi / 2 if model is J1 else 12.0
    for n in range(5):
        val = oracles.quad_x(lambda x: cl.eigenfunction(model, p, n, x) ** 2, 1e-13, x2 - 1e-13)
        assert val == pytest.approx(cl.norm_hn(model, p, n), rel=1e-10)


@pytest.mark.parametrize("model,p", [(J1, Params(2.0, 3.0)), (L1, Params(1.4))])
def test_orthogonality_gauss(model, p):
    if model is J1:
        rule = gauss_jacobi_rule(p.g - 0.5, p.h - 0.5, 40)
        factor = 2.0 ** (-(p.g + p.h) - 1)
    else:
        rule = gauss_laguerre_rule(p.g - 0.5, 40)
        factor = 0.5
    P = np.array([cl.classical_poly(model, p, n, rule.nodes) for n in range(7)])
    G = factor * (P * rule.weights) @ P.T
    h = np.array([cl.norm_hn(model, p, n) for n in range(7)])
    off = ~np.eye(7, dtype=bool)
    assert np.max(np.abs(G[off]) / np.sqrt(np.outer(h, h))[off]) < 1e-10
    assert np.allclose(np.diag(G), h, rtol=1e-12)


def test_shift_operator_examples():
    p, eta = Params(2.0, 3.0), np.linspace(-0.9, 0.9, 11)
    v0, d0 = cl.classical_poly(J1, p, 0, eta), cl.classical_poly(J1, p, 0, eta, 1)
    assert np.all(cl.forward_shift_F(J1, p, eta, v0, d0) == 0)
    v1, d1 = cl.classical_poly(J1, p, 1, eta), cl.classical_poly(J1, p, 1, eta, 1)
    assert np.allclose(cl.forward_shift_F(J1, p, eta, v1, d1), -12.0)
    q = cl.shift(J1, p)
    out = cl.backward_shift_B(J1, p, eta, cl.classical_poly(J1, q, 0, eta), cl.classical_poly(J1, q, 0, eta, 1))
    assert np.allclose(out, -2.0 * v1)


@pytest.mark.parametrize("model,p", random_draws(6))
def test_shape_invariance(model, p):
    q = Params(p.g, p.h)
    x = x_grid(model, 200)
    _, a1, a2 = cl.w0_jet(model, q, x)
    _, b1, b2 = cl.w0_jet(model, cl.shift(model, q), x)
    terms = [a1 * a1, -a2, -b1 * b1, -b2, -cl.energy(model, q, 1) + 0 * x]
    assert np.max(np.abs(sum(terms)) / (1 + np.max(np.abs(terms), axis=0))) < 1e-9


@pytest.mark.parametrize("model,p", [(J1, Params(2.0, 3.0)), (L1, Params(1.5))])
def test_A_actions(model, p):
    x = x_grid(model, 200, edge=0.01, xmax=6)
    q = cl.shift(model, p)
    for n in range(1, 6):
        phi = cl.eigenfunction_jet(model, p, n, x)
        a = jets.first_order(phi, cl.w0_jet(model, p, x), 1.0)[0]
        ref = cl.f_coef(model, p, n) * cl.eigenfunction(model, q, n - 1, x)
        assert np.max(np.abs(a - ref)) <= 1e-8 * np.max(np.abs(ref))
        psi = cl.eigenfunction_jet(model, q, n - 1, x)
        ad = jets.first_order(psi, cl.w0_jet(model, p, x), -1.0)[0]
        ref = cl.b_coef(model, p, n - 1) * phi[0]
        assert np.max(np.abs(ad - ref)) <= 1e-8 * np.max(np.abs(ref))


def test_parameter_validation():
    with pytest.raises(ParameterError):
        cl.validate(J1, Params(2.0))
    with pytest.raises(ParameterError):
        cl.validate(L1, Params(2.0, 1.0))
    with pytest.raises(ParameterError):
        cl.validate(J1, Params(-1.0, 1.0))
    with pytest.raises(ParameterError):
        cl.validate(J1, Params(1.0, 1.0, 0.5))
    with pytest.raises(ParameterError):
        cl.validate(J1, Params(2.0, 0.4, 0.5))
    cl.validate(J1, Params(1.0, 1.0))
    assert cl.shift(J1, Params(2, 3)) == Params(3, 4)
    assert cl.shift(L1, Params(2)) == Params(3)
    assert cl.twisted(J1, Params(2, 3, 0.5)) == Params(1.5, 4.5, 0.5)
