import numpy as np
import pytest

import oracles
from dptell.classical import Model, Params
from dptell.suite import SuiteConfig, integer_ell_oracle, run_invariant_suite

J1, L1 = Model.J1, Model.L1


@pytest.fixture(scope="module")
def j1_report():
    return run_invariant_suite(J1, Params(2.0, 3.0, 0.5), 4)


def test_j1_default_passes(j1_report):
    assert j1_report.all_passed, [(e.name, e.residual, e.detail) for e in j1_report.failures()]
    assert len(j1_report.entries) > 100


def test_group_order(j1_report):
    names = [e.name for e in j1_report.entries]
    first = {}
    for i, n in enumerate(names):
        first.setdefault(n.split("[")[0], i)
    order = ["positivity", "xi.ode", "classical.shape_invariance", "spectra.shape_invariance",
             "spectra.schrodinger", "spectra.orthogonality", "intertwine.A_hat_chi",
             "intertwine.zero_mode", "spectra.zero_count", "intertwine.energy_identity"]
    idx = []
    for key in order:
        hits = [v for k, v in first.items() if k.startswith(key)]
        assert hits, key
        idx.append(min(hits))
    assert idx == sorted(idx)


def test_l1_integer_ell_passes():
    rep = run_invariant_suite(L1, Params(2.0, None, 1.0), 4)
    assert rep.all_passed, [(e.name, e.residual) for e in rep.failures()]
    assert any("integer_ell" in e.name for e in rep.entries)


def test_noninteger_ell_has_no_oracle_entries(j1_report):
    assert not any("integer_ell" in e.name for e in j1_report.entries)


def test_invalid_parameters_single_entry():
    rep = run_invariant_suite(J1, Params(1.0, 3.0, 0.5), 4)
    assert len(rep.entries) == 1
    e = rep.entries[0]
    assert e.name == "parameters" and not e.passed


def test_deterministic():
    a = run_invariant_suite(L1, Params(2.3, None, 0.7), 2)
    b = run_invariant_suite(L1, Params(2.3, None, 0.7), 2)
    assert [e.as_dict() for e in a.entries] == [e.as_dict() for e in b.entries]


def test_tight_tolerance_fails():
    rep = run_invariant_suite(J1, Params(2.0, 3.0, 0.5), 2, SuiteConfig(tol_residual=1e-17))
    assert not rep.all_passed and rep.summary()["failed"] > 0


def test_errors_become_entries(monkeypatch):
    import dptell.suite as suite

    def boom(*a, **k):
        raise ArithmeticError("synthetic")
    monkeypatch.setattr(suite, "_zero_counts", boom)
    rep = run_invariant_suite(J1, Params(2.0, 3.0, 0.5), 2)
    bad = rep.failures()
    assert [e.name for e in bad] == ["spectra.zero_count"] and "synthetic" in bad[0].detail


@pytest.mark.parametrize("model,g,h", [(J1, 2.0, 3.0), (J1, 4.1, 0.7), (L1, 1.9, None)])
def test_integer_ell_oracle(model, g, h):
    eta = np.linspace(-0.99, 0.99, 50) if model is J1 else np.geomspace(1e-3, 50, 50)
    for ell in (0, 1, 2, 3, 5):
        ref = np.array([oracles.xi_integer_mp(model.value, g, h, ell, t) for t in eta])
        got = integer_ell_oracle(model, Params(g, h, float(ell)), eta)
        assert np.max(np.abs(got - ref) / np.maximum(1, np.abs(ref))) < 1e-12
    with pytest.raises(ValueError):
        integer_ell_oracle(model, Params(g, h, 0.5), eta)
