import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from chiralcavity import ChiralDiscriminator


@pytest.fixture(scope="module")
def fitted(fig2a):
    return ChiralDiscriminator(fig2a.with_(N_m=600.0), random_state=0).fit()


def test_params_and_clone(fig2a):
    est = ChiralDiscriminator(fig2a, model="second", N_lo=1e6, random_state=3)
    params = est.get_params()
    assert params == {"config": fig2a, "model": "second", "N_lo": 1e6, "random_state": 3}
    twin = clone(est)
    assert twin.get_params() == params and twin is not est
    est.set_params(model="first")
    assert est.model == "first"


def test_fit_validation(fig2a):
    with pytest.raises(ValueError):
        ChiralDiscriminator().fit()
    with pytest.raises(ValueError):
        ChiralDiscriminator(fig2a, model="bogus").fit()
    with pytest.raises(NotFittedError):
        ChiralDiscriminator(fig2a).predict([[1.0]])


def test_predict_and_score(fitted):
    X, y = fitted.sample(20000, random_state=1)
    assert X.shape == (40000, 1)
    acc = fitted.score(X, y)
    assert abs((1 - acc) - fitted.stats_.p_err) < 4 * np.sqrt(0.25 / 40000) + 0.01
    assert list(fitted.classes_) == ["L", "R"]


def test_proba_consistent_with_predict(fitted):
    X, _ = fitted.sample(500, random_state=2)
    proba = fitted.predict_proba(X)
    assert np.allclose(proba.sum(axis=1), 1.0)
    pred = fitted.predict(X)
    assert np.all((proba[:, 0] > 0.5) == (pred == "L"))


def test_shape_checks(fitted):
    with pytest.raises(ValueError):
        fitted.predict(np.zeros((3, 2)))
    tie = fitted.predict(np.zeros((1000, 1)))
    assert 0.4 < np.mean(tie == "L") < 0.6
