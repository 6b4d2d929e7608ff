import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from spectral_jumps import cli
from spectral_jumps.corpus import TWO_PI, builtin, make_pulse, true_jumps
from spectral_jumps.errors import InputFormatError
from spectral_jumps.io import dumps_spec, field_from_dict, load_samples, load_spec, save_spec, spec_from_dict


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def csv_rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


# ------------------------------------------------------------------ file formats


def test_spec_round_trip(tmp_path):
    spec = builtin("staircase")
    path = tmp_path / "stair.json"
    save_spec(spec, path)
    back = load_spec(path)
    assert back.pieces == spec.pieces
    assert json.loads(dumps_spec(back)) == json.loads(dumps_spec(spec))


def test_spec_from_dict_fractions_and_errors():
    doc = {"name": "p", "pieces": [
        {"interval": ["0", "1/3"], "coeffs": [0.0]},
        {"interval": ["1/3", "2/3"], "coeffs": [1.0]},
        {"interval": ["2/3", "1"], "coeffs": [0.0]},
    ]}
    spec = spec_from_dict(doc)
    assert true_jumps(spec).magnitudes.tolist() == [1.0, -1.0]
    assert true_jumps(spec).turns == true_jumps(make_pulse(TWO_PI / 3, 2 * TWO_PI / 3, 1)).turns
    with pytest.raises(InputFormatError):
        spec_from_dict({"pieces": [{"interval": ["0", "1/2"], "coeffs": [0.0]}]})
    with pytest.raises(InputFormatError):
        spec_from_dict({"pieces": [{"interval": ["zero", "1"], "coeffs": [0.0]}]})


def test_field_from_dict():
    fld = field_from_dict({"terms": [{"x": {"pieces": [{"interval": ["0", "1"], "coeffs": [2.0]}]}, "y": None}]})
    assert fld(1.0, 2.0) == 2.0


def test_load_samples(tmp_path):
    p = tmp_path / "s.txt"
    p.write_text("0.0\n1.0\n\n1.0\n0.0\n")
    np.testing.assert_array_equal(load_samples(p), [0.0, 1.0, 1.0, 0.0])


def test_load_samples_empty(tmp_path):
    p = tmp_path / "empty.txt"
    p.write_text("\n\n")
    with pytest.raises(InputFormatError):
        load_samples(p)


def test_load_samples_reports_line(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("0.0\n1.0\nabc\n")
    with pytest.raises(InputFormatError, match="line 3"):
        load_samples(p)


# ------------------------------------------------------------------ angles


@pytest.mark.parametrize("text, value", [("1/3*2pi", TWO_PI / 3), ("2pi", TWO_PI), ("0.5", 0.5), ("3/5 * 2pi", 6 * math.pi / 5)])
def test_parse_angle(text, value):
    assert cli.parse_angle(text) == pytest.approx(value, abs=1e-15)


# ------------------------------------------------------------------ commands


def test_detect_staircase(capsys):
    code, out, _ = run_cli(capsys, "detect", "--signal", "staircase", "--n", "1024")
    assert code == 0
    rows = csv_rows(out)
    assert list(rows[0]) == cli.COLUMNS["detect"]
    assert len(rows) == 4
    locs = np.array([float(r["location_rad"]) for r in rows])
    np.testing.assert_allclose(locs, TWO_PI * np.arange(1, 5) / 5, atol=math.pi / 1024)
    signs = np.sign([float(r["magnitude_est"]) for r in rows])
    np.testing.assert_array_equal(signs, [1, 1, -1, -1])


def test_analyze_constant_is_zero(capsys):
    code, out, _ = run_cli(capsys, "analyze", "--signal", "constant", "--n", "32")
    assert code == 0
    rows = csv_rows(out)
    assert len(rows) == 512
    assert all(float(r["y_n"]) == 0.0 for r in rows)


def test_analyze_zero_signal_warns(tmp_path, capsys):
    p = tmp_path / "zero.txt"
    p.write_text("0\n" * 64)
    code, out, _ = run_cli(capsys, "analyze", "--samples", str(p), "--n", "8")
    assert code == 0
    assert out.startswith("# warning: G(n)=0")


def test_sweep_jsonl_growth(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--signal", "pulse", "--n-range", "256:4096:2", "--format", "jsonl")
    assert code == 0
    rows = [json.loads(ln) for ln in out.splitlines()]
    assert [r["n"] for r in rows] == [256, 512, 1024, 2048, 4096]
    assert rows[0]["probe_x"] == pytest.approx(TWO_PI / 3)
    conj = np.array([r["conj_partial_sum"] for r in rows])
    assert np.all(np.diff(np.abs(conj)) > 0)
    slope = np.polyfit(np.log([r["n"] for r in rows]), conj, 1)[0]
    assert abs(slope) == pytest.approx(1 / math.pi, rel=0.05)


def test_sweep_multiple_probes(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--signal", "staircase", "--n-range", "64:128:2",
                           "--probe", "1/5*2pi", "--probe", "3.0")
    assert code == 0
    assert len(csv_rows(out)) == 4


def test_variation_row(capsys):
    code, out, _ = run_cli(capsys, "variation", "--signal", "staircase", "--n", "512", "--interval", "0.3:2.9")
    assert code == 0
    (row,) = csv_rows(out)
    assert float(row["true_mass"]) == 3.0
    assert float(row["tv"]) > 0
    assert float(row["refinement_change"]) <= 0.01


def test_detect2d(capsys):
    code, out, _ = run_cli(capsys, "detect2d", "--signal", "cross", "--n", "256")
    assert code == 0
    rows = csv_rows(out)
    by_dir = {d: sorted(float(r["offset_rad"]) for r in rows if r["direction"] == d) for d in ("1", "2")}
    np.testing.assert_allclose(by_dir["1"], [TWO_PI / 3, 2 * TWO_PI / 3], atol=math.pi / 256)
    np.testing.assert_allclose(by_dir["2"], [TWO_PI / 5, 3 * TWO_PI / 5], atol=math.pi / 256)


def test_samples_input(tmp_path, capsys):
    M = 4096
    x = TWO_PI * np.arange(M) / M
    p = tmp_path / "pulse.txt"
    p.write_text("\n".join(repr(float(v)) for v in builtin("pulse")(x)) + "\n")
    code, out, _ = run_cli(capsys, "detect", "--samples", str(p), "--n", "256")
    assert code == 0
    locs = [float(r["location_rad"]) for r in csv_rows(out)]
    np.testing.assert_allclose(locs, [TWO_PI / 3, 2 * TWO_PI / 3], atol=2 * math.pi / 256)


def test_signal_from_json_file(tmp_path, capsys):
    p = tmp_path / "pulse2.json"
    save_spec(builtin("pulse2"), p)
    code, out, _ = run_cli(capsys, "detect", "--signal", str(p), "--n", "512")
    assert code == 0
    assert len(csv_rows(out)) == 2


def test_reruns_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert cli.main(["analyze", "--signal", "staircase", "--n", "128", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_plot_written_next_to_output(tmp_path):
    pytest.importorskip("matplotlib")
    out, png = tmp_path / "d.csv", tmp_path / "d.png"
    assert cli.main(["detect", "--signal", "pulse", "--n", "256", "--out", str(out), "--plot", str(png)]) == 0
    assert out.exists() and png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    png2 = tmp_path / "d2.png"
    cli.main(["detect", "--signal", "pulse", "--n", "256", "--out", str(out), "--plot", str(png2)])
    assert png.read_bytes() == png2.read_bytes()


# ------------------------------------------------------------------ exit codes


@pytest.mark.parametrize("argv", [
    ["detect", "--signal", "pulse", "--n", "1"],
    ["detect", "--signal", "pulse", "--n", "64", "--grid", "100"],
    ["detect", "--signal", "pulse", "--n", "64", "--threshold", "1.5"],
    ["variation", "--signal", "pulse", "--n", "64"],
    ["variation", "--signal", "pulse", "--n", "64", "--interval", "3:1"],
    ["sweep", "--signal", "pulse"],
    ["detect", "--n", "64"],
])
def test_config_errors_exit_2(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2
    assert "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["detect", "--signal", "pulse", "--n", "abc"])
    assert exc.value.code == 2


@pytest.mark.parametrize("argv", [
    ["detect", "--signal", "no-such-signal", "--n", "64"],
    ["detect2d", "--signal", "pulse", "--n", "64"],
])
def test_input_errors_exit_3(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 3
    assert "input error" in err


def test_bad_samples_exit_3(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text("1\nx\n")
    code, _, err = run_cli(capsys, "analyze", "--samples", str(p), "--n", "2")
    assert code == 3
    assert "line 2" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "spectral_jumps", "detect", "--signal", "pulse", "--n", "128"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.splitlines()[0] == ",".join(cli.COLUMNS["detect"])


def test_sweep_staircase_probe(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--signal", "staircase", "--n-range", "256:16384:2", "--probe", "1/5*2pi")
    assert code == 0
    rows = csv_rows(out)
    assert [int(r["n"]) for r in rows] == [256 * 2**k for k in range(7)]
    conj = np.abs([float(r["conj_partial_sum"]) for r in rows])
    assert np.all(np.diff(conj) > 0)
    assert all(float(r["g_n"]) > 0 and float(r["tv_full_period"]) > 0 for r in rows)
