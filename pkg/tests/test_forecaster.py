import numpy as np
import pytest

from fraug.augment import AugmentSpec
from fraug.dataset import WindowSample
from fraug.forecaster import (DLinearModel, Metrics, TrainConfig, evaluate,
                              forward, loss_and_grads, moving_average_matrix,
                              train)

from conftest import make_sample


def linear_samples(n, c=1, b=4, h=2, slope=2.0, seed=0):
    """Noiseless windows from y_t = slope * t."""
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(n):
        start = rng.uniform(-10, 10)
        t = start + np.arange(b + h)
        series = slope * t
        s = np.tile(series, (c, 1))
        samples.append(WindowSample(lookback=s[:, :b].copy(), horizon=s[:, b:].copy()))
    return samples


class TestForward:
    def test_zero_model_predicts_zero(self):
        model = DLinearModel(b=8, h=4)
        out = forward(model, np.random.default_rng(0).normal(size=(3, 8)))
        np.testing.assert_array_equal(out, np.zeros((3, 4)))

    def test_kernel_one_trend_is_input(self):
        model = DLinearModel.init_random(b=6, h=3, kernel=1, seed=1)
        x = np.random.default_rng(2).normal(size=(2, 6))
        out = forward(model, x)
        expected = x @ model.w_trend.T + model.b_trend + model.b_seasonal
        np.testing.assert_allclose(out, expected, atol=1e-12)

    def test_matches_matrix_oracle(self):
        # Independent dense-matmul oracle coded from the definition.
        model = DLinearModel.init_random(b=10, h=5, kernel=3, seed=3)
        rng = np.random.default_rng(4)
        x = rng.normal(size=(4, 10))
        pad = (3 - 1) // 2
        expected = np.empty((4, 5))
        for c in range(4):
            padded = np.concatenate([[x[c, 0]] * pad, x[c], [x[c, -1]] * (3 - 1 - pad)])
            trend = np.array([padded[t: t + 3].mean() for t in range(10)])
            seasonal = x[c] - trend
            expected[c] = (model.w_trend @ trend + model.b_trend
                           + model.w_seasonal @ seasonal + model.b_seasonal)
        np.testing.assert_allclose(forward(model, x), expected, atol=1e-12)

    def test_decomposition_identity(self):
        ma = moving_average_matrix(12, 25)
        x = np.random.default_rng(5).normal(size=12)
        trend = ma @ x
        np.testing.assert_allclose(trend + (x - trend), x, atol=1e-15)

    def test_shape_mismatch(self):
        model = DLinearModel(b=8, h=4)
        with pytest.raises(ValueError, match="look-back length"):
            forward(model, np.zeros((2, 9)))


class TestGradients:
    @pytest.mark.parametrize("seed", range(5))
    def test_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        model = DLinearModel.init_random(b=8, h=4, seed=seed)
        look = rng.normal(size=(3, 2, 8))
        target = rng.normal(size=(3, 2, 4))
        _, grads = loss_and_grads(model, look, target)
        eps = 1e-5
        for name, grad in grads.items():
            param = getattr(model, name)
            for _ in range(10):
                idx = tuple(rng.integers(0, s) for s in param.shape)
                orig = param[idx]
                param[idx] = orig + eps
                lp, _ = loss_and_grads(model, look, target)
                param[idx] = orig - eps
                lm, _ = loss_and_grads(model, look, target)
                param[idx] = orig
                numeric = (lp - lm) / (2 * eps)
                denom = max(abs(numeric), abs(grad[idx]), 1e-8)
                assert abs(grad[idx] - numeric) / denom < 1e-5


class TestTrain:
    def _cfg(self, **kw):
        defaults = dict(learning_rate=5e-2, batch_size=8, max_epochs=200,
                        patience=200, seed=0)
        defaults.update(kw)
        return TrainConfig(**defaults)

    def test_zero_epochs_returns_init(self):
        model = DLinearModel.init_random(b=4, h=2, seed=1)
        before = model.copy_params()
        samples = linear_samples(10)
        model, trace = train(model, samples, samples, self._cfg(max_epochs=0))
        for k, v in before.items():
            np.testing.assert_array_equal(getattr(model, k), v)
        assert trace.train_loss == []

    def test_fits_noiseless_linear_data(self):
        samples = linear_samples(64)
        model = DLinearModel.init_random(b=4, h=2, kernel=3, seed=0)
        model, trace = train(model, samples, samples, self._cfg())
        assert trace.train_loss[-1] < 1e-6

    def test_early_stopping_restores_best(self):
        rng = np.random.default_rng(0)
        train_set = [make_sample(c=1, b=8, h=4, seed=i) for i in range(32)]
        val_set = [make_sample(c=1, b=8, h=4, seed=100 + i) for i in range(8)]
        model = DLinearModel.init_random(b=8, h=4, seed=0)
        cfg = self._cfg(max_epochs=30, patience=3, learning_rate=0.05)
        model, trace = train(model, train_set, val_set, cfg)
        look = np.stack([s.lookback for s in val_set])
        hor = np.stack([s.horizon for s in val_set])
        final_val = float(np.mean((model.forward_batch(look) - hor) ** 2))
        assert final_val == pytest.approx(min(trace.val_loss), abs=1e-12)
        assert trace.best_epoch == int(np.argmin(trace.val_loss))

    def test_patience_stops_training(self):
        # Random noise targets: val loss stops improving quickly.
        train_set = [make_sample(c=1, b=8, h=4, seed=i) for i in range(16)]
        val_set = [make_sample(c=1, b=8, h=4, seed=50 + i) for i in range(4)]
        model = DLinearModel.init_random(b=8, h=4, seed=0)
        cfg = self._cfg(max_epochs=100, patience=2, learning_rate=0.1)
        model, trace = train(model, train_set, val_set, cfg)
        assert len(trace.val_loss) < 100

    def test_seeded_determinism(self):
        samples = linear_samples(32, seed=3)
        traces = []
        for _ in range(2):
            model = DLinearModel.init_random(b=4, h=2, seed=7)
            _, trace = train(model, samples, samples, self._cfg(max_epochs=5))
            traces.append(trace)
        assert traces[0].train_loss == traces[1].train_loss
        assert traces[0].val_loss == traces[1].val_loss

    def test_augmented_step_uses_full_batch(self, monkeypatch):
        import fraug.forecaster as fc

        seen = []
        orig = fc.loss_and_grads

        def spy(model, look, hor):
            seen.append(len(look))
            return orig(model, look, hor)

        monkeypatch.setattr(fc, "loss_and_grads", spy)
        samples = [make_sample(c=1, b=16, h=8, seed=i) for i in range(32)]
        model = DLinearModel.init_random(b=16, h=8, seed=0)
        cfg = TrainConfig(batch_size=8, max_epochs=1, patience=1, seed=0)
        train(model, samples, samples[:4], cfg, aug=AugmentSpec(kind="freq_mask", rate=0.2))
        assert set(seen) == {8}  # 4 originals + 4 augmented per step

    def test_empty_sets_rejected(self):
        model = DLinearModel.init_random(b=4, h=2, seed=0)
        with pytest.raises(ValueError):
            train(model, [], linear_samples(2), TrainConfig())


class TestEvaluate:
    def test_perfect_predictions(self):
        samples = linear_samples(8)
        model = DLinearModel.init_random(b=4, h=2, seed=0)
        model, _ = train(model, samples, samples,
                         TrainConfig(learning_rate=5e-2, batch_size=8,
                                     max_epochs=300, patience=300, seed=0))
        m = evaluate(model, samples)
        assert m.mse < 1e-6 and m.mae < 1e-3

    def test_constant_offset(self):
        model = DLinearModel(b=4, h=2)  # predicts all zeros
        delta = 1.5
        samples = [WindowSample(lookback=np.zeros((1, 4)),
                                horizon=np.full((1, 2), -delta))
                   for _ in range(3)]
        m = evaluate(model, samples)
        assert m.mse == pytest.approx(delta**2)
        assert m.mae == pytest.approx(delta)
        assert m.n_samples == 3

    def test_matches_direct_summation(self):
        rng = np.random.default_rng(8)
        model = DLinearModel.init_random(b=6, h=3, seed=8)
        samples = [WindowSample(lookback=rng.normal(size=(2, 6)),
                                horizon=rng.normal(size=(2, 3))) for _ in range(5)]
        m = evaluate(model, samples)
        total_sq, total_abs, count = 0.0, 0.0, 0
        for s in samples:
            pred = forward(model, s.lookback)
            for c in range(2):
                for t in range(3):
                    err = pred[c, t] - s.horizon[c, t]
                    total_sq += err * err
                    total_abs += abs(err)
                    count += 1
        assert m.mse == pytest.approx(total_sq / count, rel=1e-12)
        assert m.mae == pytest.approx(total_abs / count, rel=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="empty sample set"):
            evaluate(DLinearModel(b=4, h=2), [])


def test_checkpoint_round_trip(tmp_path):
    model = DLinearModel.init_random(b=8, h=4, kernel=5, seed=9)
    path = tmp_path / "model.json"
    model.save(path)
    loaded = DLinearModel.load(path)
    for k, v in model.params().items():
        np.testing.assert_array_equal(getattr(loaded, k), v)
    assert (loaded.b, loaded.h, loaded.kernel) == (8, 4, 5)


def test_checkpoint_magic_checked(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"magic": "nope"}')
    with pytest.raises(ValueError, match="FRAUG-DLINEAR-v1"):
        DLinearModel.load(path)
