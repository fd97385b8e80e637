import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from eirlab import ParameterError
from eirlab.lab import (
    Cart,
    Dataset,
    RandomFeatures,
    capacity_sweep,
    fit_cart_tree,
    fit_multinomial_logistic,
    load_dataset_csv,
    loss_and_grad,
    make_blobs,
    make_family,
    random_relu_features,
    save_dataset_csv,
    sphere_directions,
    train_bagged_ensemble,
)
from eirlab.lab.ensemble import member_streams, read_sweep_csv
from eirlab.metrics import diagnostics


def linearly_separable(X, y) -> bool:
    """Feasibility of s_i (w.x_i + b) >= 1 as a linear program."""
    s = np.where(y == 1, 1.0, -1.0)
    A = -s[:, None] * np.hstack([X, np.ones((len(y), 1))])
    res = linprog(np.zeros(X.shape[1] + 1), A_ub=A, b_ub=-np.ones(len(y)), bounds=(None, None))
    return res.status == 0


class TestBlobs:
    def test_deterministic(self):
        assert make_blobs(seed=3, label_noise=0.1) == make_blobs(seed=3, label_noise=0.1)
        assert make_blobs(seed=3) != make_blobs(seed=4)

    def test_shapes_and_balance(self):
        ds = make_blobs(n=120, d=5, K=3, seed=1)
        assert ds.X_train.shape == (90, 5) and ds.X_test.shape == (30, 5)
        assert np.bincount(ds.labels).tolist() == [40, 40, 40]
        assert np.intersect1d(ds.train_idx, ds.test_idx).size == 0

    def test_noise_only_on_training_labels(self):
        clean = make_blobs(seed=2)
        noisy = make_blobs(seed=2, label_noise=0.1)
        np.testing.assert_array_equal(clean.y_test, noisy.y_test)
        assert np.sum(clean.y_train != noisy.y_train) == 30

    def test_separable_oracle(self):
        ds = make_blobs(n=400, d=10, K=2, class_sep=3.0, seed=0)
        assert linearly_separable(ds.X_train, ds.y_train)
        model = fit_multinomial_logistic(ds.X_train, ds.y_train, l2_strength=1e-8, max_iters=5000)
        assert np.all(model.predict(ds.X_train) == ds.y_train)

    def test_near_chance(self):
        ds = make_blobs(n=400, d=10, K=2, class_sep=3.0, label_noise=0.49, seed=0)
        ens = train_bagged_ensemble(ds, RandomFeatures(n_features=50), M=5, seed=0)
        # test labels are clean, so score on held-out noisy labels instead
        Xtr, ytr = ds.X_train, ds.y_train
        half = len(ytr) // 2
        errs = []
        for rng in member_streams(0, 5):
            boot = rng.integers(0, half, size=half)
            member = RandomFeatures(n_features=50).fit(Xtr[boot], ytr[boot], 2, rng)
            errs.append(np.mean(member.predict(Xtr[half:]) != ytr[half:]))
        assert min(errs) >= 0.35
        assert ens.test_predictions.n_classifiers == 5

    @pytest.mark.parametrize("kw", [{"K": 11}, {"n": 10}, {"label_noise": 0.5}, {"class_sep": -1}])
    def test_invalid(self, kw):
        with pytest.raises(ParameterError):
            make_blobs(**kw)

    def test_csv_round_trip(self, tmp_path):
        ds = make_blobs(n=40, d=3, seed=5)
        back = load_dataset_csv(save_dataset_csv(ds, tmp_path / "d.csv"), seed=9)
        np.testing.assert_array_equal(back.features, ds.features)
        np.testing.assert_array_equal(back.labels, ds.labels)
        assert back.num_classes == 2

    def test_csv_header_skipped(self, tmp_path):
        p = tmp_path / "h.csv"
        p.write_text("label,a,b\n" + "".join(f"{i % 2},{i},{-i}\n" for i in range(8)))
        ds = load_dataset_csv(p)
        assert ds.features.shape == (8, 2) and ds.train_idx.size == 6


class TestFeatures:
    def test_origin_maps_to_zero(self):
        assert np.all(random_relu_features(np.zeros((1, 4)), 20, 0) == 0)

    def test_unit_rows(self):
        U = sphere_directions(500, 7, 1)
        np.testing.assert_allclose(np.linalg.norm(U, axis=1), 1.0, atol=1e-12)

    def test_self_projection_is_one(self):
        u = sphere_directions(1, 6, 11)
        assert random_relu_features(u, 1, 11)[0, 0] == pytest.approx(1.0, abs=1e-12)

    def test_nested_prefixes(self):
        np.testing.assert_array_equal(sphere_directions(5, 3, 2), sphere_directions(9, 3, 2)[:5])

    def test_directions_look_uniform(self):
        U = sphere_directions(20000, 3, 0)
        np.testing.assert_allclose(U.mean(axis=0), 0.0, atol=0.03)
        np.testing.assert_allclose(U.T @ U / len(U), np.eye(3) / 3, atol=0.02)


def central_difference(f, x, h=1e-6):
    g = np.zeros_like(x)
    for i in np.ndindex(x.shape):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


class TestLogistic:
    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_gradient(self, seed):
        rng = np.random.default_rng(seed)
        n, N, K = 5, 8, int(rng.integers(2, 5))
        Z = rng.standard_normal((n, N))
        Y = np.eye(K)[rng.integers(0, K, n)]
        W, b = rng.standard_normal((K, N)), rng.standard_normal(K)
        l2 = float(rng.uniform(0, 1))
        _, gW, gb = loss_and_grad(W, b, Z, Y, l2)
        nW = central_difference(lambda V: loss_and_grad(V, b, Z, Y, l2)[0], W)
        nb = central_difference(lambda c: loss_and_grad(W, c, Z, Y, l2)[0], b)
        for a, num in ((gW, nW), (gb, nb)):
            assert np.linalg.norm(a - num) <= 1e-5 * max(np.linalg.norm(num), 1e-8)

    def test_heavy_penalty_predicts_prior(self):
        rng = np.random.default_rng(0)
        Z = rng.standard_normal((50, 4))
        y = np.array([2] * 30 + [0] * 12 + [1] * 8)
        model = fit_multinomial_logistic(Z, y, l2_strength=1e8)
        assert np.abs(model.weights).max() < 1e-6
        assert np.all(model.predict(rng.standard_normal((20, 4))) == 2)

    def test_deterministic(self):
        rng = np.random.default_rng(4)
        Z, y = rng.standard_normal((30, 5)), rng.integers(0, 3, 30)
        a = fit_multinomial_logistic(Z, y, max_iters=200)
        b = fit_multinomial_logistic(Z, y, max_iters=200)
        np.testing.assert_array_equal(a.weights, b.weights)
        np.testing.assert_array_equal(a.biases, b.biases)

    def test_converges_on_easy_problem(self):
        rng = np.random.default_rng(5)
        Z, y = rng.standard_normal((40, 3)), rng.integers(0, 2, 40)
        model = fit_multinomial_logistic(Z, y, l2_strength=1e-2, tol=1e-8)
        assert model.converged
        _, gW, gb = loss_and_grad(model.weights, model.biases, Z, np.eye(2)[y], 1e-2)
        assert max(np.abs(gW).max(), np.abs(gb).max()) < 1e-8

    def test_plain_and_accelerated_agree(self):
        rng = np.random.default_rng(6)
        Z, y = rng.standard_normal((40, 3)), rng.integers(0, 3, 40)
        a = fit_multinomial_logistic(Z, y, l2_strength=0.1, tol=1e-9, max_iters=20000)
        b = fit_multinomial_logistic(Z, y, l2_strength=0.1, tol=1e-9, max_iters=20000, accelerated=False)
        np.testing.assert_allclose(a.weights, b.weights, atol=1e-6)


XOR_X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
XOR_Y = np.array([0, 1, 1, 0])


class TestCart:
    def test_pure_is_single_leaf(self):
        tree = fit_cart_tree(np.random.default_rng(0).standard_normal((10, 3)), np.ones(10, int), 8, "all")
        assert tree.n_leaves == 1
        assert np.all(tree.predict(np.zeros((2, 3))) == 1)

    def test_xor_four_leaves(self):
        tree = fit_cart_tree(XOR_X, XOR_Y, 4, "all")
        assert np.mean(tree.predict(XOR_X) != XOR_Y) == 0.0

    def test_xor_two_leaves(self):
        tree = fit_cart_tree(XOR_X, XOR_Y, 2, "all")
        assert tree.n_leaves == 2
        assert np.mean(tree.predict(XOR_X) != XOR_Y) == 0.5

    def test_xor_exhaustive(self):
        # every single axis split of XOR leaves one mistake per side
        for f in range(2):
            for thr in (-1.0, 0.5, 2.0):
                left = XOR_X[:, f] <= thr
                err = sum(min(np.sum(XOR_Y[s] == 0), np.sum(XOR_Y[s] == 1)) for s in (left, ~left) if s.any())
                assert err == 2

    def test_tie_goes_to_smaller_feature(self):
        tree = fit_cart_tree(XOR_X, XOR_Y, 2, "all")
        assert tree.feature[0] == 0

    def test_invalid(self):
        with pytest.raises(ValueError):
            fit_cart_tree(XOR_X, XOR_Y, 1)
        with pytest.raises(ValueError):
            fit_cart_tree(XOR_X, XOR_Y, 4, "log2")

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from(["all", "sqrt"]))
    def test_saturation_invariance(self, seed, mode):
        rng = np.random.default_rng(seed)
        X, y = rng.standard_normal((40, 5)), rng.integers(0, 3, 40)
        big = fit_cart_tree(X, y, 1000, mode, seed, 3)
        assert np.all(big.predict(X) == y)
        probe = rng.standard_normal((200, 5))
        for cap in (big.n_leaves, big.n_leaves + 1, 5000):
            other = fit_cart_tree(X, y, cap, mode, seed, 3)
            np.testing.assert_array_equal(other.predict(probe), big.predict(probe))

    def test_leaf_count_respects_cap(self):
        rng = np.random.default_rng(1)
        X, y = rng.standard_normal((100, 4)), rng.integers(0, 2, 100)
        for cap in (2, 3, 7, 16):
            assert fit_cart_tree(X, y, cap, "sqrt", 0).n_leaves == cap


@pytest.fixture(scope="module")
def small_blobs() -> Dataset:
    return make_blobs(n=80, d=4, K=2, class_sep=3.0, label_noise=0.1, seed=0)


class TestBagging:
    def test_singleton(self, small_blobs):
        ens = train_bagged_ensemble(small_blobs, Cart(8), M=1, seed=0)
        r = diagnostics(ens.test_predictions)
        assert r.disagreement == 0.0
        assert r.eir == 0.0

    def test_deterministic(self, small_blobs):
        a = train_bagged_ensemble(small_blobs, RandomFeatures(20), M=3, seed=7)
        b = train_bagged_ensemble(small_blobs, RandomFeatures(20), M=3, seed=7)
        assert a.test_predictions == b.test_predictions
        np.testing.assert_array_equal(a.in_bag_errors, b.in_bag_errors)
        for x, y in zip(a.bootstraps, b.bootstraps):
            np.testing.assert_array_equal(x, y)

    def test_members_differ(self, small_blobs):
        ens = train_bagged_ensemble(small_blobs, Cart(4), M=4, seed=0)
        assert len({tuple(b[:10]) for b in ens.bootstraps}) == 4

    def test_overparameterized_interpolates(self):
        ds = make_blobs(n=80, d=4, K=2, class_sep=3.0, seed=0)
        ens = train_bagged_ensemble(ds, RandomFeatures(n_features=200, l2_strength=1e-8), M=3, seed=0)
        assert ens.interpolating

    def test_in_bag_ignores_out_of_bag(self, small_blobs):
        ens = train_bagged_ensemble(small_blobs, Cart(1000), M=3, seed=1)
        boots = set(np.concatenate(ens.bootstraps).tolist())
        oob = next(i for i in range(small_blobs.y_train.size) if i not in boots)
        labels = small_blobs.labels.copy()
        labels[small_blobs.train_idx[oob]] = 1 - labels[small_blobs.train_idx[oob]]
        poisoned = Dataset(small_blobs.features, labels, small_blobs.train_idx, small_blobs.test_idx, 2)
        again = train_bagged_ensemble(poisoned, Cart(1000), M=3, seed=1)
        np.testing.assert_array_equal(again.in_bag_errors, ens.in_bag_errors)
        assert again.test_predictions == ens.test_predictions

    def test_bootstrap_unique_fraction(self):
        fracs = [np.unique(member_streams(s, 1)[0].integers(0, 1000, 1000)).size / 1000 for s in range(200)]
        assert 0.62 <= np.mean(fracs) <= 0.645

    def test_bad_M(self, small_blobs):
        with pytest.raises(ValueError):
            train_bagged_ensemble(small_blobs, Cart(4), M=0)


class TestSweep:
    def test_single_point(self, small_blobs):
        res = capacity_sweep(small_blobs, Cart(), [1000], M=3, seed=0)
        assert len(res.rows) == 1
        assert res.interpolation_threshold == 1000 and res.threshold_index == 0
        res = capacity_sweep(small_blobs, Cart(), [2], M=3, seed=0)
        assert res.interpolation_threshold is None and res.threshold_index is None

    @pytest.mark.parametrize("grid", [[], [4, 4], [8, 2]])
    def test_bad_grid(self, small_blobs, grid):
        with pytest.raises(ValueError):
            capacity_sweep(small_blobs, Cart(), grid, M=2)

    def test_cart_constant_after_threshold(self, small_blobs):
        res = capacity_sweep(small_blobs, Cart(), [2, 4, 8, 16, 32, 64, 128], M=5, seed=0)
        i = res.threshold_index
        assert i is not None
        for col in ("eir", "der", "avg_error", "mv_error"):
            tail = res.column(col)[i:]
            assert np.ptp(tail) <= 1e-9, col

    def test_serialization(self, small_blobs):
        res = capacity_sweep(small_blobs, Cart(), [2, 64], M=2, seed=0)
        rows = read_sweep_csv(res.to_csv())
        assert [r["capacity"] for r in rows] == [2.0, 64.0]
        assert rows[1]["interpolating"] is True
        d = res.to_dict()
        assert d["schema_version"] == 1 and d["family"] == "cart"
        assert d["params"] == {"features_per_split": "sqrt"}

    def test_make_family(self):
        assert make_family("cart", max_leaf_nodes=4) == Cart(4)
        assert make_family("random_features", n_features=3).capacity == 3
        with pytest.raises(ValueError):
            make_family("svm")
