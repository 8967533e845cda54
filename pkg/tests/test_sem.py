"""Linear SEM simulation and dataset handling."""

import numpy as np
import pytest

from lowrankdag import Dag, Dataset, WeightedDag, simulate_linear


def chain2(w=1.5):
    return WeightedDag(Dag(2, [(0, 1)]), {(0, 1): w})


class TestSimulateLinear:
    def test_gaussian_moments(self):
        # X0 ~ N(0,1), X1 = 1.5 X0 + e1 so Var(X1) = 1.5^2 + 1
        data = simulate_linear(chain2(), n=40000, seed=0)
        x = data.X
        assert abs(np.var(x[:, 0]) - 1.0) < 0.05
        assert abs(np.var(x[:, 1]) - 3.25) < 0.15
        assert abs(np.mean(x[:, 1] * x[:, 0]) - 1.5) < 0.05

    def test_exponential_noise_uncentered(self):
        g = WeightedDag(Dag(2, [(0, 1)]), {(0, 1): 2.0})
        x = simulate_linear(g, n=40000, noise="exponential", seed=1).X
        assert abs(np.mean(x[:, 0]) - 1.0) < 0.05
        assert abs(np.var(x[:, 0]) - 1.0) < 0.1
        resid = x[:, 1] - 2.0 * x[:, 0]
        assert abs(np.mean(resid) - 1.0) < 0.05

    def test_rejects_unknown_noise(self):
        with pytest.raises(ValueError):
            simulate_linear(chain2(), n=10, noise="cauchy")
        with pytest.raises(ValueError):
            simulate_linear(chain2(), n=0)

    def test_deterministic(self):
        a = simulate_linear(chain2(), n=50, seed=7).X
        b = simulate_linear(chain2(), n=50, seed=7).X
        assert a.tobytes() == b.tobytes()

    def test_edge_order_does_not_matter(self):
        # identical weighted matrix given in two different edge orders
        edges = [(0, 2), (1, 2), (0, 1)]
        w = {(0, 2): 0.8, (1, 2): -1.2, (0, 1): 0.6}
        g1 = WeightedDag(Dag(3, edges), w)
        g2 = WeightedDag(Dag(3, list(reversed(edges))), dict(reversed(list(w.items()))))
        a = simulate_linear(g1, n=100, seed=3).X
        b = simulate_linear(g2, n=100, seed=3).X
        assert a.tobytes() == b.tobytes()

    def test_matches_matrix_recursion(self):
        rng = np.random.default_rng(5)
        g = Dag(5, [(0, 2), (1, 2), (2, 3), (2, 4), (0, 4)])
        w = WeightedDag(g, {e: float(rng.normal()) for e in g.edges})
        data = simulate_linear(w, n=200, seed=9).X
        # closed form: X = E (I - W)^{-1}
        mat = w.matrix()
        eye = np.eye(5)
        resid = data @ (eye - mat)  # should recover the noise block
        rebuilt = resid @ np.linalg.inv(eye - mat)
        assert np.allclose(rebuilt, data, atol=1e-10)

    def test_standardize_unit_columns(self):
        data = simulate_linear(chain2(), n=5000, seed=2, standardize=True)
        assert np.allclose(data.X.std(axis=0), 1.0)

    def test_standardize_rejects_degenerate(self):
        with pytest.raises(ValueError):
            simulate_linear(chain2(), n=1, standardize=True)


class TestDataset:
    def test_validation(self):
        with pytest.raises(ValueError):
            Dataset(np.zeros(3))
        with pytest.raises(ValueError):
            Dataset(np.array([[1.0, np.inf]]))
        d = Dataset(np.zeros((4, 2)))
        assert d.n == 4 and d.d == 2

    def test_csv_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(11)
        d = Dataset(rng.normal(size=(17, 3)))
        p = tmp_path / "x.csv"
        d.save_csv(p)
        back = Dataset.load_csv(p)
        assert back.X.shape == (17, 3)
        assert np.array_equal(back.X, d.X)
