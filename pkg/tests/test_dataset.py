import numpy as np
import pytest

from fraug.dataset import (TimeSeriesDataset, load_csv, make_windows,
                           split_and_normalize, take_last_fraction)
from fraug.synth import SynthSpec, generate, write_csv


def write_small_csv(path, rows, header="date,a,b"):
    path.write_text(header + "\n" + "\n".join(rows) + "\n")


def test_load_csv_basic(tmp_path):
    p = tmp_path / "d.csv"
    write_small_csv(p, ["t0,1.0,4.0", "t1,2.0,5.0", "t2,3.0,6.0"])
    ds = load_csv(p)
    assert ds.channel_names == ["a", "b"]
    np.testing.assert_array_equal(ds.values, [[1, 2, 3], [4, 5, 6]])
    assert ds.timestamps == ["t0", "t1", "t2"]


def test_load_csv_single_channel(tmp_path):
    p = tmp_path / "d.csv"
    write_small_csv(p, ["t0,1.0", "t1,2.0", "t2,3.0"], header="date,x")
    ds = load_csv(p)
    assert ds.n_channels == 1 and ds.length == 3


def test_load_csv_bad_cell_names_location(tmp_path):
    p = tmp_path / "d.csv"
    write_small_csv(p, ["t0,1.0,4.0", "t1,abc,5.0"])
    with pytest.raises(ValueError, match=r"row 3.*'a'.*'abc'"):
        load_csv(p)


def test_load_csv_ragged_row(tmp_path):
    p = tmp_path / "d.csv"
    write_small_csv(p, ["t0,1.0,4.0", "t1,2.0"])
    with pytest.raises(ValueError, match="row 3"):
        load_csv(p)


def test_load_csv_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_csv(tmp_path / "nope.csv")


def _synthetic_ds(length=1000, channels=2, seed=0, noise=0.5):
    values = generate(SynthSpec(length=length, channels=channels,
                                tones=[(24.0, 1.0)], noise_std=noise,
                                trend_slope=0.002, seed=seed))
    return TimeSeriesDataset(values=values, channel_names=[f"ch{i}" for i in range(channels)])


def test_split_and_normalize_train_stats():
    ds = split_and_normalize(_synthetic_ds(), scheme="generic")
    train_end, val_end = ds.split_bounds
    assert (train_end, val_end) == (700, 800)
    train = ds.values[:, :train_end]
    assert np.all(np.abs(train.mean(axis=1)) < 1e-6)
    assert np.all(np.abs(train.std(axis=1) - 1.0) < 1e-6)


def test_normalization_uses_only_train_split():
    # Non-stationary data: val/test stats must differ from train stats.
    ds = split_and_normalize(_synthetic_ds(), scheme="generic")
    _, val_end = ds.split_bounds
    test = ds.values[:, val_end:]
    assert np.any(np.abs(test.mean(axis=1)) > 1e-3)


def test_normalize_idempotent_on_unit_stats():
    ds = split_and_normalize(_synthetic_ds(), scheme="generic")
    again = split_and_normalize(ds, scheme="generic")
    np.testing.assert_allclose(again.values, ds.values, atol=1e-9)


def test_degenerate_channel_rejected():
    values = np.vstack([np.ones(100), np.arange(100.0)])
    ds = TimeSeriesDataset(values=values, channel_names=["flat", "ramp"])
    with pytest.raises(ValueError, match="degenerate channel 'flat'"):
        split_and_normalize(ds, scheme="generic")


def test_ett_hourly_scheme_bounds():
    # 17420 hourly rows (the ETTh total) -> 12/4/4 month splits.
    ds = split_and_normalize(_synthetic_ds(length=17420, channels=1), scheme="ett-hourly")
    assert ds.split_bounds == (8640, 11520)
    assert ds.length == 14400


def test_ett_hourly_window_count_matches_benchmark_arithmetic():
    ds = split_and_normalize(_synthetic_ds(length=17420, channels=1), scheme="ett-hourly")
    samples = make_windows(ds, "train", 96, 96)
    assert len(samples) == 8448  # 8640 - 96 - 96


def test_window_contiguity():
    ds = split_and_normalize(_synthetic_ds(), scheme="generic")
    for sample in make_windows(ds, "val", 10, 5, stride=37):
        s = sample.start_index
        np.testing.assert_array_equal(sample.concat(), ds.values[:, s: s + 15])


def test_make_windows_counts():
    ds = TimeSeriesDataset(values=np.arange(5.0)[None], channel_names=["x"],
                           split_bounds=(5, 5))
    # train split is the whole length-5 series here
    ds.split_bounds = (5, 5)
    samples = make_windows(ds, "train", 2, 2)
    assert len(samples) == 1
    np.testing.assert_array_equal(samples[0].lookback, [[0.0, 1.0]])
    np.testing.assert_array_equal(samples[0].horizon, [[2.0, 3.0]])


def test_make_windows_too_short():
    ds = TimeSeriesDataset(values=np.arange(4.0)[None], channel_names=["x"],
                           split_bounds=(4, 4))
    with pytest.raises(ValueError, match="window exceeds split"):
        make_windows(ds, "train", 2, 3)


def test_take_last_fraction():
    samples = list(range(8448))
    out = take_last_fraction(samples, 0.01)
    assert len(out) == 84
    assert out == samples[-84:]
    assert take_last_fraction(samples, 1.0) == samples
    assert take_last_fraction(list(range(100)), 0.5) == list(range(50, 100))


def test_take_last_fraction_is_suffix():
    samples = list(range(37))
    for f in (0.03, 0.2, 0.77):
        out = take_last_fraction(samples, f)
        assert out == samples[len(samples) - len(out):]


def test_take_last_fraction_errors():
    with pytest.raises(ValueError):
        take_last_fraction([], 0.5)
    with pytest.raises(ValueError):
        take_last_fraction([1], 0.0)


def test_synth_csv_round_trip(tmp_path):
    spec = SynthSpec(length=200, channels=3, noise_std=0.1, seed=9)
    values = generate(spec)
    p = tmp_path / "s.csv"
    write_csv(values, p)
    ds = load_csv(p)
    np.testing.assert_array_equal(ds.values, values)
