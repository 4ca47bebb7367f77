"""Matrix file formats and run manifests: round-trips and parse errors."""

import struct

import numpy as np
import pytest

from fusedist import (
    CddrSetting,
    InvalidInputError,
    MetricConfig,
    ParseError,
    PointCloud,
    RunManifest,
    load_matrix,
    save_matrix,
)
from fusedist.matio import RAW_MAGIC, format_value


def awkward_matrix():
    # values chosen to stress decimal round-tripping
    return np.array([
        [0.1, 1.0 / 3.0, -2.5e-17],
        [1e300, -1e-300, 123456789.123456789],
        [np.pi, np.nextafter(1.0, 2.0), -0.0],
    ])


# ------------------------------------------------------------- round-trips


@pytest.mark.parametrize("fmt", ["csv", "raw_f64"])
def test_round_trip_is_bit_exact(tmp_path, fmt):
    path = tmp_path / f"m.{fmt}"
    save_matrix(path, awkward_matrix(), fmt=fmt)
    back = load_matrix(path, fmt=fmt)
    assert np.array_equal(back.data, awkward_matrix())


@pytest.mark.parametrize("fmt", ["csv", "raw_f64"])
def test_round_trip_random_clouds(tmp_path, fmt):
    rng = np.random.default_rng(0)
    data = rng.normal(size=(50, 7)) * 10.0 ** rng.integers(-8, 9, (50, 7))
    path = tmp_path / "m.bin"
    save_matrix(path, data, fmt=fmt)
    assert np.array_equal(load_matrix(path).data, data)


def test_format_sniffing(tmp_path):
    data = np.arange(6.0).reshape(2, 3)
    raw = tmp_path / "a"
    csv = tmp_path / "b"
    save_matrix(raw, data, fmt="raw_f64")
    save_matrix(csv, data, fmt="csv")
    assert np.array_equal(load_matrix(raw).data, data)
    assert np.array_equal(load_matrix(csv).data, data)


def test_save_accepts_point_cloud(tmp_path):
    cloud = PointCloud([[1.0, 2.0]])
    path = tmp_path / "c.csv"
    save_matrix(path, cloud)
    assert np.array_equal(load_matrix(path).data, cloud.data)


def test_format_value_survives_parse():
    for x in awkward_matrix().ravel():
        assert float(format_value(float(x))) == float(x)


# ------------------------------------------------------------- csv errors


def test_csv_reports_bad_token_position(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,2.0\n3.0,oops\n")
    with pytest.raises(ParseError, match="row 2, column 2"):
        load_matrix(path, fmt="csv")


def test_csv_reports_ragged_row(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("1.0,2.0\n3.0\n")
    with pytest.raises(ParseError, match="row 2: expected 2 columns"):
        load_matrix(path, fmt="csv")


def test_csv_reports_interior_empty_row(tmp_path):
    path = tmp_path / "gap.csv"
    path.write_text("1.0\n\n2.0\n")
    with pytest.raises(ParseError, match="row 2: empty row"):
        load_matrix(path, fmt="csv")


def test_csv_trailing_newlines_are_fine(tmp_path):
    path = tmp_path / "pad.csv"
    path.write_text("1.0,2.0\n3.0,4.0\n\n\n")
    assert load_matrix(path).data.shape == (2, 2)


def test_csv_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(ParseError, match="file is empty"):
        load_matrix(path, fmt="csv")


def test_csv_rejects_nonfinite_values(tmp_path):
    path = tmp_path / "inf.csv"
    path.write_text("1.0,inf\n2.0,3.0\n")
    with pytest.raises(ParseError, match="row 1, column 2"):
        load_matrix(path, fmt="csv")


# ------------------------------------------------------------- raw errors


def raw_bytes(n, d, payload=None, magic=RAW_MAGIC, reserved=b"\x00" * 4):
    if payload is None:
        payload = np.zeros((n, d)).tobytes()
    return struct.pack("<4sII4s", magic, n, d, reserved) + payload


def test_raw_truncated_header(tmp_path):
    path = tmp_path / "t.bin"
    path.write_bytes(b"FDM")
    with pytest.raises(ParseError, match="truncated header"):
        load_matrix(path, fmt="raw_f64")


def test_raw_bad_magic(tmp_path):
    path = tmp_path / "m.bin"
    path.write_bytes(raw_bytes(1, 1, magic=b"NOPE"))
    with pytest.raises(ParseError, match="bad magic"):
        load_matrix(path, fmt="raw_f64")


def test_raw_nonzero_reserved(tmp_path):
    path = tmp_path / "r.bin"
    path.write_bytes(raw_bytes(1, 1, reserved=b"\x01\x00\x00\x00"))
    with pytest.raises(ParseError, match="reserved"):
        load_matrix(path, fmt="raw_f64")


def test_raw_empty_matrix_header(tmp_path):
    path = tmp_path / "e.bin"
    path.write_bytes(raw_bytes(0, 3, payload=b""))
    with pytest.raises(ParseError, match="empty matrix"):
        load_matrix(path, fmt="raw_f64")


def test_raw_payload_length_mismatch(tmp_path):
    path = tmp_path / "p.bin"
    path.write_bytes(raw_bytes(2, 2)[:-8])
    with pytest.raises(ParseError, match="payload length mismatch"):
        load_matrix(path, fmt="raw_f64")


def test_raw_rejects_nonfinite_payload(tmp_path):
    payload = np.array([[1.0, np.nan]]).tobytes()
    path = tmp_path / "n.bin"
    path.write_bytes(raw_bytes(1, 2, payload=payload))
    with pytest.raises(ParseError, match="row 1, column 2"):
        load_matrix(path, fmt="raw_f64")


# --------------------------------------------------------------- load/save


def test_load_missing_file():
    with pytest.raises(InvalidInputError, match="no such file"):
        load_matrix("/does/not/exist.csv")


def test_load_unknown_format(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("1.0\n")
    with pytest.raises(InvalidInputError, match="unknown format"):
        load_matrix(path, fmt="tsv")


def test_save_unknown_format(tmp_path):
    with pytest.raises(InvalidInputError, match="unknown format"):
        save_matrix(tmp_path / "x", np.zeros((1, 1)), fmt="npz")


def test_save_rejects_non_2d(tmp_path):
    with pytest.raises(InvalidInputError):
        save_matrix(tmp_path / "x.csv", np.zeros(3))


# --------------------------------------------------------------- manifests


def full_sweep_manifest():
    return RunManifest(
        task="sweep",
        experiment="displacement",
        d=16,
        n=100,
        trials=5,
        base_seed=7,
        parameter_grid=(0.5, 1.0, 2.0),
        metrics=(MetricConfig("cfd"),
                 MetricConfig("sinkhorn", sinkhorn_epsilon=0.05)),
        output_dir="out",
    )


def test_manifest_json_round_trip_exact():
    m = full_sweep_manifest()
    assert RunManifest.from_json(m.to_json()) == m


def test_manifest_round_trip_with_inputs_and_settings():
    m = RunManifest(
        task="cddr",
        inputs=(("b", "path/b.csv"), ("a", "path/a.csv")),
        settings=(
            CddrSetting("macenko", 0.8, 0.6,
                        (("w2", 30.9), ("cfd", 0.22))),
        ),
    )
    back = RunManifest.from_json(m.to_json())
    assert back == m
    # canonical ordering applied on both sides
    assert back.inputs == (("a", "path/a.csv"), ("b", "path/b.csv"))
    assert back.settings[0].distances == (("cfd", 0.22), ("w2", 30.9))


def test_manifest_unusual_floats_survive():
    m = RunManifest(task="sweep", experiment="dispersion",
                    parameter_grid=(1e-300, 0.1, 1.0 / 3.0, 1e300))
    assert RunManifest.from_json(m.to_json()).parameter_grid == \
        m.parameter_grid


def test_manifest_rejects_unknown_task():
    with pytest.raises(InvalidInputError, match="unknown task"):
        RunManifest(task="train")


def test_manifest_rejects_bad_json():
    with pytest.raises(ParseError, match="invalid JSON"):
        RunManifest.from_json("{not json")
    with pytest.raises(ParseError, match="task"):
        RunManifest.from_json("[]")
    with pytest.raises(ParseError, match="task"):
        RunManifest.from_json('{"experiment": "displacement"}')


def test_manifest_rejects_bad_metric_entry():
    text = '{"task": "sweep", "metrics": [{"metric_id": "cfd", "bogus": 1}]}'
    with pytest.raises(ParseError, match="bad metric entry"):
        RunManifest.from_json(text)


def test_manifest_rejects_bad_setting_entry():
    text = '{"task": "cddr", "settings": [{"setting": "x"}]}'
    with pytest.raises(ParseError, match="bad setting entry"):
        RunManifest.from_json(text)
