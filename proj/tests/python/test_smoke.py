import math

import numpy as np
import pytest

import cylflow


def test_shrinker_and_spectrum():
    s = cylflow.make_shrinker(3, 1)
    assert s.rho == pytest.approx(2.0)
    assert cylflow.mode_eigenvalue(s, [2]) == pytest.approx(0.0, abs=1e-14)
    assert cylflow.mode_eigenvalue(s, [0], 1) < 1.0


def test_hermite_values():
    c2 = 0.25 * math.pi ** -0.25
    for y in (-1.5, 0.0, 2.0):
        assert cylflow.hermite_eval(2, y) == pytest.approx(c2 * (y * y - 2), rel=1e-13)
    assert cylflow.triple_product(2, 2, 2) > 0


def test_riccati_closed_form_scalar():
    g = 0.7
    m = cylflow.riccati_closed_form(np.array([[1.0]]), 1.0, 11.0, g)
    assert m[0, 0] == pytest.approx(1.0 / (1.0 + 10.0 * g), rel=1e-14)


def test_semigroup_constant():
    assert cylflow.semigroup_at(lambda z: 1.0, 0.8, 0.3) == pytest.approx(math.exp(0.8), rel=1e-12)


def test_errors_carry_names():
    with pytest.raises(cylflow.CylflowError) as e:
        cylflow.regularization_time(1.0)
    assert e.value.args[0] == "constraint-unsatisfiable"
    s = cylflow.make_shrinker(2, 1)
    with pytest.raises(cylflow.CylflowError):
        cylflow.c1_profile(s, [1], [0.0], 0.5)


def test_perturb_ode_decoupled():
    s = cylflow.make_shrinker(2, 1)
    traj = cylflow.perturb_ode(1.0, 0.4, 0.0, 0.0, 5.0, s, 4)
    t, a1 = traj[-1][0], traj[-1][1]
    q = math.sqrt(2.0) * (4 * math.pi) ** -0.25 / s.rho
    assert a1 == pytest.approx(0.4 / (1 + 0.4 * q * (t - 1.0)), rel=1e-8)


def test_sphere_extinction():
    assert cylflow.sphere_extinction(129) == pytest.approx(0.25, rel=0.01)


def test_scenario_and_criterion(tmp_path):
    cfg = "scenario = spectrum\nspectrum.max_degree = 2\nspectrum.growth = false\n"
    r = cylflow.run_scenario(cfg, str(tmp_path))
    assert r["exit_code"] == 0
    assert any(f.endswith("eigenvalues.csv") for f in r["files"])
    assert (tmp_path / "report.json").exists()
    assert "hermite" in cylflow.criterion_names()
    res = cylflow.run_criterion("hermite")
    assert res.passed
    assert str(res).startswith("PASS")
