import math

import pytest

import fluidnet as fn

REFERENCE = """
schema_version: 1
network:
  mu1: 2.0
  mu2: 2.0
  p12: 0.5
  p21: 0.5
  arrival: {type: poisson, rate: 1.0}
  jumps:
    type: mixture
    p1: 0.5
    dist1: {type: pareto, scale: 1.0, index: 2.5}
    dist2: {type: pareto, scale: 1.0, index: 2.5}
"""


@pytest.fixture
def net():
    p = fn.HeavyDist.pareto(1.0, 2.5)
    return fn.Network((2.0, 2.0), 0.5, 0.5, 1.0, 0.5, p, p)


def test_distributions():
    p = fn.HeavyDist.pareto(1.0, 2.0)
    assert p.tail(10.0) == pytest.approx(0.01)
    assert p.mean == pytest.approx(2.0)
    assert fn.HeavyDist.pareto(1.0, 3.0).integrated_tail(2.0) == pytest.approx(1.0 / 12.0)
    assert fn.HeavyDist.exponential(2.0).sample_at(1.0 - math.exp(-2.0)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        fn.HeavyDist.pareto(1.0, 0.5)


def test_derive(net):
    d = net.derive()
    assert d["delta"] == pytest.approx([1.0, 1.0])
    assert d["rho"] == pytest.approx([5 / 6, 5 / 6])
    assert d["stability"] == "strongly_stable"
    assert fn.classify_direction(net, (0.9, 0.1))["case"] == "C1"
    assert fn.Network.from_yaml(REFERENCE).derive() == d


def test_simulate(net):
    s = fn.simulate(net, 2e4, [0.5, 5.0, 50.0], directions=[(1.0, 0.0), (0.5, 0.5)], seeds=[1, 2], majorant=True)
    assert len(s["tails"]) == 2
    t = s["tails"][0]["tail"]
    assert t[0] >= t[1] >= t[2]
    assert s["max_reflection_residual"] < 1e-9
    assert s["dominance_violations"] == 0
    again = fn.simulate(net, 2e4, [0.5, 5.0, 50.0], directions=[(1.0, 0.0), (0.5, 0.5)], seeds=[1, 2], majorant=True)
    assert again == s


def test_bounds_and_asymptote(net):
    grid = [5.0, 20.0, 80.0]
    b = fn.single_node_bounds(net, grid, mode="asymptotic")
    assert all(lo <= up for lo, up in zip(b["lower"], b["upper"]))
    b2 = fn.directional_bounds(net, (0.5, 0.5), grid, mode="exact", draws=20000)
    assert b2["case"] == "C0"
    lb = fn.exact_asymptote(net, (1.0, 0.0), [50.0])[0]
    value, lower, upper, terms = fn.big_jump_series(net, 1.0, (1.0, 0.0), 50.0)
    assert lower <= value <= upper and terms > 0
    assert abs(value - lb) / lb < 0.05


def test_fluid_model(net):
    z = fn.fluid_contents(net, 5.0, 5.0, 2.0)
    assert z[0] == pytest.approx(5.0 - 2.0 / 6.0)
    assert fn.reachable(net, 5.0, 5.0, 2.0, (1.0, 0.0), z[0])
    assert not fn.reachable(net, 5.0, 5.0, 2.0, (1.0, 0.0), z[0] + 1e-6)


def test_config_helpers():
    h = fn.config_hash(REFERENCE)
    assert len(h) == 64 and h == fn.config_hash(REFERENCE)
    assert "stability = strongly_stable" in fn.derive_report(REFERENCE)
    with pytest.raises(fn.ConfigError):
        fn.config_hash(REFERENCE.replace("mu1: 2.0", "mu1: x"))
