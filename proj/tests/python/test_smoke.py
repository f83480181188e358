import math

import pyduffing as pd


def test_lambda0_closed_form():
    assert abs(pd.lambda0() - 3 / 2 ** (2 / 3)) < 1e-10


def test_cubic_branches():
    roots = pd.cubic_branches(2.0, 0.0)
    values = [v for v, _ in roots]
    assert len(values) == 3
    assert abs(values[0] + math.sqrt(2)) < 1e-12
    assert abs(values[1]) < 1e-12
    assert abs(values[2] - math.sqrt(2)) < 1e-12


def test_epsilon_lambda():
    e = pd.epsilon_lambda(2.0)
    assert abs(e["b"] - 1.5) < 1e-12
    assert abs(e["T_lambda"] - 2 * math.sqrt(1.5 + math.sqrt(2))) < 1e-12
    assert abs(e["eps_lambda"] - math.pi / (3 * e["T_lambda"])) < 1e-12


def test_condition_a_direct():
    cert = pd.certify_condition_a(0.25, 2.0, method="direct")
    assert cert["holds"]
    assert cert["cross_time"] < math.pi / 2


def test_shoot_g_sign():
    assert pd.shoot_g(1.0, 2.0, -10.0) < 0
    assert pd.shoot_g(1.0, 2.0, 10.0) > 0
