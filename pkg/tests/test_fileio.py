import numpy as np
import pytest

from slitaudit import fileio
from slitaudit.fileio import InputError
from slitaudit.geometry import REFERENCE_CONFIG
from slitaudit.spectral import power_spectrum
from slitaudit.synthesis import Trace, exact_trace


def test_parse_quantity():
    assert fileio.parse_quantity("632.8 nm", fileio.LENGTH_UNITS) == pytest.approx(632.8e-9)
    assert fileio.parse_quantity("10.4cm", fileio.LENGTH_UNITS) == pytest.approx(0.104)
    assert fileio.parse_quantity("0.5 mW", fileio.POWER_UNITS) == pytest.approx(5e-4)
    assert fileio.parse_quantity("1e-5 m", fileio.LENGTH_UNITS) == pytest.approx(1e-5)
    for bad in ("10", "ten um", "10 furlong"):
        with pytest.raises(InputError):
            fileio.parse_quantity(bad, fileio.LENGTH_UNITS)


def test_reference_config_roundtrip():
    cfg = fileio.load_config(fileio.reference_config_path())
    for name in ("wavelength", "slit_width_a", "slit_separation_d", "screen_distance_D", "pixel_pitch"):
        assert getattr(cfg, name) == pytest.approx(getattr(REFERENCE_CONFIG, name))
    assert cfg.pixel_count == 3000


def test_config_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        fileio.load_config(tmp_path / "nope.toml")
    p = tmp_path / "c.toml"
    p.write_text('wavelength = 632.8\nslit_width = "10 um"\nslit_separation = "200 um"\nscreen_distance = "10 cm"\n')
    with pytest.raises(InputError, match="unit"):
        fileio.load_config(p)
    p.write_text('wavelength = "632.8 nm"\nslit_width = "10 um"\n')
    with pytest.raises(InputError, match="missing"):
        fileio.load_config(p)
    p.write_text('wavelength = "632.8 nm"\nslit_width = "10 um"\nslit_separation = "200 um"\nscreen_distance = "10 cm"\ncolour = 1\n')
    with pytest.raises(InputError, match="unknown"):
        fileio.load_config(p)
    p.write_text("wavelength = = 3\n")
    with pytest.raises(InputError):
        fileio.load_config(p)


def test_recorded_features():
    f = fileio.load_features(fileio.recorded_features_path())
    assert f.fringe_spacing_px == 69
    assert (f.missing_order_left, f.missing_order_right) == (17, 16)
    assert f.fringe_count_in_principal == 32
    assert f.principal_width_px == 2308
    assert (f.i_max, f.i_min, f.i_elev) == (1045, 270, 262)
    assert f.fft_peak_k == 45
    assert f.r_value == pytest.approx(10**-0.5)
    assert f.fringe_peak_positions == [315, 2623]


def test_trace_csv_roundtrip(tmp_path):
    t = exact_trace(REFERENCE_CONFIG, I0=787, I_DC=245)
    text = fileio.trace_to_csv(t)
    assert text.splitlines()[3] == "pixel_index,intensity"
    path = fileio.atomic_write(tmp_path / "t.csv", text)
    back = fileio.read_trace(path)
    assert np.array_equal(back.samples, t.samples)
    assert back.pixel_pitch == t.pixel_pitch and back.center_pixel == t.center_pixel
    assert fileio.trace_to_csv(back) == text


def test_read_trace_without_metadata(tmp_path):
    p = tmp_path / "plain.csv"
    p.write_text("pixel_index,intensity\n" + "".join(f"{i},{i % 5}\n" for i in range(20)))
    t = fileio.read_trace(p)
    assert len(t.samples) == 20 and t.center_pixel == 10


@pytest.mark.parametrize(
    "body, match",
    [
        ("", "empty"),
        ("pixel_index,intensity\n", "empty"),
        ("x,y\n0,1\n", "header"),
        ("pixel_index,intensity\n0,1\n1,abc\n", ":3:"),
        ("pixel_index,intensity\n0,1\n2,1\n", "expected pixel_index 1"),
        ("pixel_index,intensity\n" + "".join(f"{i},-1\n" for i in range(20)), "negative"),
    ],
)
def test_read_trace_errors(tmp_path, body, match):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(InputError, match=match):
        fileio.read_trace(p)


def test_spectrum_csv():
    spec = power_spectrum(Trace(np.arange(16, dtype=float)))
    lines = fileio.spectrum_to_csv(spec).splitlines()
    assert lines[0] == "wavenumber,power,frequency"
    assert len(lines) == 1 + 9
    assert lines[1].startswith("0,")


def test_json_is_stable():
    a = fileio.to_json({"b": np.float64(1.5), "a": [np.int64(2), (3, 4)], "c": np.arange(2)})
    assert a == fileio.to_json({"c": [0, 1], "a": [2, [3, 4]], "b": 1.5})
    assert a.index('"a"') < a.index('"b"')


def test_atomic_write_leaves_no_temp(tmp_path):
    fileio.atomic_write(tmp_path / "x.txt", "hello")
    assert [p.name for p in tmp_path.iterdir()] == ["x.txt"]
