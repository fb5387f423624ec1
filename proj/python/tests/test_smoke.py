import math

import numpy as np
import pytest

import ricyl

TWO_PI = 2 * math.pi


def test_spectral_gap_and_spectrum():
    assert ricyl.spectral_gap(2, [TWO_PI, TWO_PI]) == pytest.approx(1.0)
    modes = ricyl.spectrum(3, [TWO_PI] * 3, 1, "TT")
    assert any(m["mu"] == 0 for m in modes)
    assert all(m["mu"] >= 0 for m in modes)


def test_fundamental_matrix_inverse():
    for system in ("2x2", "4x4"):
        P = ricyl.fundamental_matrix(system, 4.0, 0.7)
        Pi = ricyl.fundamental_matrix_inverse(system, 4.0, 0.7)
        assert np.allclose(P @ Pi, np.eye(P.shape[0]), atol=1e-12)


def test_corrected_kernel_value():
    # dr x dr block at t = s+ for mu = 1
    assert ricyl.eval_type2(1.0, 1e-15, 0.0)["lc"] == pytest.approx(3 / 8)
    assert ricyl.eval_type2(1.0, 1e-15, 0.0, printed=True)["lc"] == pytest.approx(3 / 4)


def test_gauge_and_classification():
    src = {"rank": 2, "terms": [{"k": [1, 0], "component": [0, 0], "profile": [{"c": 1.0, "rate": -2.0, "lo": 0}]}]}
    X = ricyl.solve_gauge(src, [TWO_PI, TWO_PI], tau=0.01)
    assert X["residual"] < 1e-10
    field = {"rank": 2, "modes": [{"kind": "TT", "k": [1, 0, 0], "pol_index": 0, "profile": [{"c": 1.0, "rate": -1.0}]}]}
    D = ricyl.classify_kernel(field, [TWO_PI] * 3, tau=0.0)
    assert D["reconstruction_error"] < 1e-12
    live = [m for m in D["exp_modes"] if abs(m["plus"]) + abs(m["minus"]) > 1e-12]
    assert len(live) == 1
    assert live[0]["minus"] == pytest.approx(1.0)


def test_errors_map_to_python():
    bad = {"rank": 2, "terms": [{"k": [1, 0, 0], "component": [0, 0], "profile": [{"c": 1.0, "p": 3}]}]}
    with pytest.raises(ricyl.NotInKernel):
        ricyl.classify_kernel(bad, [TWO_PI] * 3)
    with pytest.raises(ricyl.InvalidParams):
        ricyl.three_circles({"rank": 2}, [TWO_PI] * 3, 1.0, 0.5, 0.1157, 10.0, (0, 1, 2))
    with pytest.raises(ricyl.RicylError):
        ricyl.solve_gauge({"rank": 7}, [1.0])


def test_parallel_dimensions():
    d = ricyl.reduced_dimensions(2, [TWO_PI, TWO_PI], 0.01)
    assert d["parallel_dimension"] == d["parallel_expected"] == 3
    assert ricyl.reduced_dimensions(2, [TWO_PI, TWO_PI], 0.0)["parallel_dimension"] == 6


def test_three_circles_and_oracles():
    field = {"rank": 2, "modes": [{"kind": "TT", "k": [1, 0, 0], "pol_index": 0, "profile": [{"c": 1.0, "rate": -1.0}]}]}
    r = ricyl.three_circles(field, [TWO_PI] * 3, 1.0, 0.5, 0.05, 1.0, (0, 1, 2))
    assert r["holds"]
    rep = ricyl.oracle_suite([TWO_PI, TWO_PI], nr=32, nx=8)
    assert rep["all_pass"]
