import math

import pytest

from dptell import classical as cl
from dptell import deform as df
from dptell.classical import Model, Params
from dptell.errors import DomainError, ParameterError
from dptell.limit import jacobi_to_laguerre_limit, limit_row


def test_default_study():
    rec = jacobi_to_laguerre_limit(2.0, 0.5, [1e2, 1e3, 1e4], 1.0)
    assert rec.monotone
    for col in ("xi_error", "prepotential_error", "w0_error"):
        errs = [getattr(r, col) for r in rec.rows]
        ratios = [a / b for a, b in zip(errs, errs[1:])]
        assert all(7 < q < 14 for q in ratios)
    for e in (rec.xi_exponent, rec.prepotential_exponent, rec.w0_exponent):
        assert e == pytest.approx(1.0, abs=0.2)


@pytest.mark.parametrize("g,ell,x_L", [(2.0, 1.7, 0.6), (3.4, math.pi, 2.0), (1.8, 0.3, 1.3)])
def test_other_parameters(g, ell, x_L):
    rec = jacobi_to_laguerre_limit(g, ell, [1e2, 1e3, 1e4], x_L)
    assert rec.monotone
    assert rec.xi_exponent == pytest.approx(1.0, abs=0.2)
    assert rec.prepotential_exponent == pytest.approx(1.0, abs=0.2)


def test_integer_ell_closed_forms():
    # ell = 1: xi_1 is the degree-1 Jacobi polynomial, tending to g + 1/2 + eta_L
    g, x_L = 2.0, 1.0
    for h in (1e2, 1e3, 1e4):
        x = x_L / math.sqrt(h)
        eta_j = math.cos(2 * x)
        a, b = g - 0.5, -h - 1.5
        jac = (a + 1) + (a + b + 2) * (eta_j - 1) / 2
        assert df.xi(Model.J1, Params(g, h, 1.0), eta_j) == pytest.approx(jac, rel=1e-12)
    lag = g + 0.5 + x_L ** 2
    assert df.xi(Model.L1, Params(g, None, 1.0), x_L ** 2) == pytest.approx(lag, rel=1e-14)
    rec = jacobi_to_laguerre_limit(g, 1.0, [1e2, 1e3, 1e4], x_L)
    assert rec.rows[-1].xi_error < 1e-3 and rec.xi_exponent == pytest.approx(1.0, abs=0.2)


def test_prepotential_relation():
    g, x_L = 2.5, 0.8
    for h in (1e3, 1e5):
        x = x_L / math.sqrt(h)
        lhs = cl.prepotential_w0(Model.J1, Params(g, h), x) + 0.5 * g * math.log(h)
        assert abs(lhs - cl.prepotential_w0(Model.L1, Params(g), x_L)) < 10 / h


def test_single_h_has_no_exponent():
    rec = jacobi_to_laguerre_limit(2.0, 0.5, [1e3], 1.0)
    assert len(rec.rows) == 1 and rec.xi_exponent is None and rec.w0_exponent is None


def test_guards():
    with pytest.raises(ValueError):
        jacobi_to_laguerre_limit(2.0, 0.5, [1e3, 1e2], 1.0)
    with pytest.raises(DomainError):
        limit_row(2.0, 0.5, 1.0, 3.0)
    with pytest.raises(ParameterError):
        limit_row(1.0, 0.5, 1e3, 1.0)
    r = limit_row(2.0, 0.5, 1e4, 1.0)
    assert r.x == pytest.approx(0.01)
