import numpy as np
import pytest

from rfspec.atom import AtomParams
from rfspec.delay import g2_curve
from rfspec.secular import LineLabel, dressed_params, pair_detunings, parse_pair, secular_g2


def test_resonant_dressing():
    dp = dressed_params(AtomParams(v=100.0))
    assert dp.theta == pytest.approx(np.pi / 2)
    assert dp.c2 == pytest.approx(0.5) and dp.s2 == pytest.approx(0.5)
    assert dp.gamma1 == pytest.approx(1.0)


def test_detuned_dressing():
    dp = dressed_params(AtomParams(v=50.0, delta_L=80.0))
    assert dp.omega_R == pytest.approx(94.34, abs=5e-3)
    assert dp.c2 + dp.s2 == pytest.approx(1.0)
    assert 1.0 <= dp.gamma1 <= 2.0


def test_far_detuned_limit():
    dp = dressed_params(AtomParams(v=1.0, delta_L=1e6))
    assert dp.theta < 1e-5
    assert dp.gamma1 == pytest.approx(2.0, rel=1e-9)


def test_undefined_without_drive():
    with pytest.raises(ValueError):
        dressed_params(AtomParams(v=0.0))


def test_labels():
    assert LineLabel.F.detuning(5.0) == -5.0
    assert LineLabel.R.detuning(5.0) == 0.0
    assert LineLabel.T.detuning(5.0) == 5.0
    assert parse_pair("TF") == (LineLabel.T, LineLabel.F)
    assert pair_detunings("FT", AtomParams(v=3.0, delta_L=4.0)) == (-5.0, 5.0)
    with pytest.raises(ValueError):
        parse_pair("TFR")
    with pytest.raises(ValueError):
        parse_pair("TX")


def test_formulas():
    dp = dressed_params(AtomParams(v=200.0))
    tau = np.linspace(0, 1, 11)
    assert np.all(secular_g2("RR", tau, dp, 20.0) == 1)
    assert secular_g2("TT", 0.0, dp, 20.0) == 0
    assert np.allclose(secular_g2("RT", tau, dp, 20.0), (1 - np.exp(-20 * tau)) ** 2)
    assert np.allclose(secular_g2("FF", tau, dp, 20.0), 1 - np.exp(-tau))
    # uncorrelated sidebands at resonance
    assert secular_g2("TF", 0.0, dp, 20.0) == pytest.approx(1.0)


def test_tf_ft_coincide_at_resonance():
    dp = dressed_params(AtomParams(v=30.0))
    tau = np.linspace(0, 2, 21)
    assert np.allclose(secular_g2("TF", tau, dp, 5.0), secular_g2("FT", tau, dp, 5.0))


def test_sideband_bunching_detuned():
    p = AtomParams(v=200.0, delta_L=120.0)
    dp = dressed_params(p)
    assert secular_g2("TF", 0.0, dp, 20.0) > 1
    d1, d2 = pair_detunings("FT", p)
    assert g2_curve(20.0, d1, d2, [0.0], p)[0] > 1


def test_full_numerics_track_secular_curves():
    # cross-pair orientation: numerics for TF follow the TF formula, not FT
    p = AtomParams(v=200.0, delta_L=120.0)
    dp = dressed_params(p)
    tau = np.linspace(0.1, 0.3, 41)
    for pair in ("TF", "FT"):
        d1, d2 = pair_detunings(pair, p)
        g = g2_curve(20.0, d1, d2, tau, p)
        own = np.abs(g - secular_g2(pair, tau, dp, 20.0)).max()
        other = np.abs(g - secular_g2(pair[::-1], tau, dp, 20.0)).max()
        assert own < other


def test_deviation_grows_at_weaker_drive():
    tau = np.linspace(0, 1, 201)

    def worst(v, G):
        p = AtomParams(v=v)
        dp = dressed_params(p)
        d1, d2 = pair_detunings("TF", p)
        return np.abs(g2_curve(G, d1, d2, tau, p) - secular_g2("TF", tau, dp, G)).max()

    assert worst(20.0, 6.0) > worst(200.0, 20.0)
