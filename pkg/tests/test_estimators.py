import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.linear_model import LinearRegression

from agma.estimators import AGMAClassifier, AGMARegressor


@pytest.fixture
def regression_data():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((200, 4))
    y = X @ np.array([1.0, -2.0, 0.5, 0.0]) + 3.0 + 0.01 * rng.standard_normal(200)
    return X, y


@pytest.fixture
def classification_data():
    rng = np.random.default_rng(1)
    y = rng.choice(["neg", "pos"], size=200)
    X = rng.standard_normal((200, 3)) + np.where(y == "pos", 1.5, -1.5)[:, None]
    return X, y


class TestRegressor:
    def test_matches_ordinary_least_squares(self, regression_data):
        X, y = regression_data
        model = AGMARegressor(n_nodes=10, sigma_w_sq=0.0, gain="constant", max_iter=300,
                              random_state=0).fit(X, y)
        ols = LinearRegression().fit(X, y)
        np.testing.assert_allclose(model.coef_, ols.coef_, atol=1e-6)
        assert model.intercept_ == pytest.approx(ols.intercept_, abs=1e-6)
        assert model.score(X, y) > 0.999

    def test_noisy_channel_still_fits(self, regression_data):
        X, y = regression_data
        model = AGMARegressor(n_nodes=20, random_state=0).fit(X, y)
        assert model.score(X, y) > 0.99
        assert model.loss_curve_.shape == (101,)
        assert model.n_iter_ == 100

    def test_seeded(self, regression_data):
        X, y = regression_data
        a = AGMARegressor(random_state=4).fit(X, y).coef_
        b = AGMARegressor(random_state=4).fit(X, y).coef_
        np.testing.assert_array_equal(a, b)

    def test_clone_and_params(self):
        model = AGMARegressor(n_nodes=7, algorithm="GBMA", E_N=2.0)
        params = clone(model).get_params()
        assert params["n_nodes"] == 7 and params["algorithm"] == "GBMA" and params["E_N"] == 2.0
        assert model.set_params(max_iter=5).max_iter == 5

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            AGMARegressor().predict(np.zeros((2, 3)))

    def test_feature_mismatch(self, regression_data):
        X, y = regression_data
        model = AGMARegressor(max_iter=5, random_state=0).fit(X, y)
        with pytest.raises(ValueError, match="features"):
            model.predict(X[:, :2])

    @pytest.mark.parametrize("kwargs", [{"n_nodes": 0}, {"n_nodes": 500},
                                        {"algorithm": "CENTRAL_NESTEROV"}])
    def test_invalid_settings(self, regression_data, kwargs):
        X, y = regression_data
        with pytest.raises(ValueError):
            AGMARegressor(max_iter=5, **kwargs).fit(X, y)


class TestClassifier:
    def test_fit_predict(self, classification_data):
        X, y = classification_data
        model = AGMAClassifier(alpha=0.01, n_nodes=10, random_state=0).fit(X, y)
        assert model.score(X, y) > 0.95
        assert set(model.predict(X)) <= {"neg", "pos"}
        proba = model.predict_proba(X)
        np.testing.assert_allclose(proba.sum(axis=1), 1.0)
        np.testing.assert_array_equal(proba[:, 1] > 0.5, model.decision_function(X) > 0)

    def test_rejects_multiclass(self, classification_data):
        X, _ = classification_data
        with pytest.raises(ValueError, match="binary"):
            AGMAClassifier(max_iter=5).fit(X, np.arange(200) % 3)

    def test_rejects_nonpositive_alpha(self, classification_data):
        X, y = classification_data
        with pytest.raises(ValueError):
            AGMAClassifier(alpha=0.0, max_iter=5).fit(X, y)

    def test_without_intercept(self, classification_data):
        X, y = classification_data
        model = AGMAClassifier(fit_intercept=False, max_iter=20, random_state=0).fit(X, y)
        assert model.intercept_ == 0.0 and model.coef_.shape == (3,)

    def test_clone_keeps_alpha(self):
        assert clone(AGMAClassifier(alpha=0.3)).alpha == 0.3
