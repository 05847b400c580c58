import math

import pytest

from uniformed_patroller.model import GameConfig, ValidationError
from uniformed_patroller.uniformcost import uniform_cost, value_non_uniformed

NS = [2, 10, 10**2, 10**4, 10**6]


def test_non_uniformed_examples():
    assert value_non_uniformed(GameConfig(10, 2)) == 0.1
    assert value_non_uniformed(GameConfig(10, 3)) == pytest.approx(0.145, abs=1e-15)
    for m in (3, 5, 9):
        assert value_non_uniformed(GameConfig(1, m)) == 1.0


@pytest.mark.parametrize("m", [4, 6, 10])
def test_even_m_unsupported(m):
    with pytest.raises(ValidationError, match="undefined for even m>=4"):
        value_non_uniformed(GameConfig(10, m))
    with pytest.raises(ValidationError):
        uniform_cost(GameConfig(10, m))


def test_m2_n10():
    cost = uniform_cost(GameConfig(10, 2))
    assert cost.value == pytest.approx(19 - 2 * math.sqrt(90), abs=1e-13)
    assert cost.ratio == pytest.approx(0.26334038989724008, abs=1e-13)
    assert cost.relative_loss == pytest.approx(1 - cost.ratio, abs=1e-15)


def test_m3_n10():
    cost = uniform_cost(GameConfig(10, 3))
    assert cost.value == pytest.approx(0.1, abs=1e-15)
    assert cost.value_non_uniformed == pytest.approx(0.145, abs=1e-15)


def test_large_n_limits():
    assert 0.2499 <= uniform_cost(GameConfig(10**6, 2)).ratio <= 0.2501
    for m in (3, 5, 7):
        assert uniform_cost(GameConfig(10**6, m)).relative_loss == pytest.approx(1 / m, abs=1e-3)


@pytest.mark.parametrize("m", [2, 3, 5, 7, 9])
@pytest.mark.parametrize("n", [2, 3, 10, 1000])
def test_uniform_never_helps(n, m):
    cost = uniform_cost(GameConfig(n, m))
    assert cost.value < cost.value_non_uniformed


def test_ratio_trends():
    ratios = [uniform_cost(GameConfig(n, 2)).ratio for n in NS]
    assert all(b < a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] > 0.25
    for m in (3, 5, 7):
        losses = [uniform_cost(GameConfig(n, m)).relative_loss for n in NS]
        assert all(b > a for a, b in zip(losses, losses[1:]))
        assert losses[-1] < 1 / m


def test_as_dict_keys():
    assert set(uniform_cost(GameConfig(4, 3)).as_dict()) == {"V", "V_tilde", "ratio", "relative_loss"}
