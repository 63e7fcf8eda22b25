import math

import numpy as np
import pytest

import ionflux

SMALL = """chain:
  N: 5
  omega1_over_2pi_Hz: 1000000
  profile: graded
  delta_omega_ratio: 0.2
  a_over_l: 4
baths:
  delta_H_over_Gamma: -0.02
  delta_C_over_Gamma: -0.1
  N_L: 2
  N_R: 2
"""


def test_characteristic_length():
    assert ionflux.characteristic_length(1e6) == pytest.approx(5.25e-6, rel=5e-3)


def test_bath_temperatures():
    assert ionflux.bath_temperature(-0.5) == pytest.approx(1.0e-3, rel=0.02)
    assert 11e-3 <= ionflux.bath_temperature(-0.02) <= 13.5e-3


def test_presets_round_trip():
    assert ionflux.preset_names() == ["fig2", "fig3", "fig4", "fig5"]
    text = ionflux.preset_text("fig2")
    assert ionflux.normalize(text) == text
    assert len(ionflux.config_hash(text)) == 16


def test_steady_state_balances():
    r = ionflux.steady_state(SMALL)
    assert isinstance(r["T_mK"], np.ndarray)
    assert r["T_mK"].shape == (5,)
    assert r["J_L_W"] > 0 > r["J_R_W"]
    assert abs(r["J_L_W"] + r["J_R_W"]) <= 1e-8 * r["J_L_W"]
    other = ionflux.steady_state(SMALL, backend="lyapunov")
    np.testing.assert_allclose(other["T_mK"], r["T_mK"], rtol=1e-8)


def test_bias_pair_and_rectification():
    p = ionflux.bias_pair(SMALL)
    assert p["R"] == ionflux.rectification_factor(p["J_forward_W"], p["J_backward_W"])
    assert -1.0 <= p["R"] <= 1.0


def test_sweep_rows():
    text = SMALL + "sweep:\n  axis1:\n    parameter: delta_omega_ratio\n    values: [0.1, 0.5]\n"
    out = ionflux.sweep(text)
    assert out["axes"] == ["delta_omega_ratio"]
    assert [row["status"] for row in out["rows"]] == ["ok", "ok"]


def test_langevin_is_seeded():
    text = SMALL.replace("1000000", "50000").replace("a_over_l: 4", "a_over_l: 1.5")
    a = ionflux.langevin(text, trials=2, seed=3)
    b = ionflux.langevin(text, trials=2, seed=3)
    assert a["J_L_W"] == b["J_L_W"]
    assert math.isfinite(a["J_L_se_W"])


def test_errors_map_to_python_exceptions():
    with pytest.raises(ionflux.ConfigError, match="positive detuning"):
        ionflux.steady_state(SMALL.replace("-0.02", "0.02"))
    with pytest.raises(ValueError):
        ionflux.preset_text("nope")
    with pytest.raises(ionflux.SolverError, match="no dissipation"):
        ionflux.steady_state(SMALL + "  intensity_ratio: 0\n")


def test_validate_suite_passes():
    assert all(check["passed"] for check in ionflux.validate())
