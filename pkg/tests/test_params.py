import pytest

from exchange_kinetics.distribution.params import ModelParams
from exchange_kinetics.exceptions import IntegralityError
from exchange_kinetics.util import THREADS_ENV, as_integer_amount, worker_count


def test_bank_amounts():
    params = ModelParams(n_agents=4, mu=10, nu=0.5)
    assert params.total_money == 40
    assert params.bank_reserve == 20
    assert params.debt_limit == 5.0
    assert ModelParams(n_agents=10_000, mu=10, nu=0.4).bank_reserve == 40_000


def test_integrality():
    with pytest.raises(IntegralityError):
        ModelParams(n_agents=3, mu=1, nu=0.5).check_integrality()
    with pytest.raises(IntegralityError):
        ModelParams(n_agents=3, mu=1.5).check_integrality()


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_agents": 0, "mu": 1},
        {"n_agents": 2.5, "mu": 1},
        {"n_agents": 2, "mu": 0},
        {"n_agents": 2, "mu": 1, "nu": -0.1},
        {"n_agents": 2, "mu": 1, "lam": 0},
    ],
)
def test_invalid_params(kwargs):
    with pytest.raises(ValueError):
        ModelParams(**kwargs)


def test_as_integer_amount():
    assert as_integer_amount(0.1 * 3 * 10, "x") == 3
    with pytest.raises(IntegralityError, match="x = 1.5"):
        as_integer_amount(1.5, "x")


def test_worker_count(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert worker_count(3) == 3
    monkeypatch.setenv(THREADS_ENV, "2")
    assert worker_count(8) == 2
    monkeypatch.setenv(THREADS_ENV, "many")
    with pytest.raises(ValueError):
        worker_count(1)
