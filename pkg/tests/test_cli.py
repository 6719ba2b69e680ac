"""Command-line front-end: happy paths, config echo, and exit codes."""

from __future__ import annotations

import configparser
import csv
import io

import numpy as np
import pytest

from protoldpc import cli
from protoldpc.cli import main


def _write(path, text: str) -> str:
    path.write_text(text)
    return str(path)


def _basematrix_ini(tmp_path, a) -> str:
    rows = "; ".join(" ".join(map(str, row)) for row in a.entries.tolist())
    return _write(
        tmp_path / "base.ini",
        "[basematrix]\n"
        f"rows = {rows}\n"
        f"bit_map = {' '.join(map(str, a.bit_map))}\n"
        f"max_parallel = {a.max_parallel}\n",
    )


def _strip_echo(text: str) -> tuple[str, str]:
    """Split an artifact into (config text, payload) at the comment prefix."""
    config_lines, payload_lines = [], []
    for line in text.splitlines():
        if line.startswith("# "):
            config_lines.append(line[2:])
        else:
            payload_lines.append(line)
    return "\n".join(config_lines) + "\n", "\n".join(payload_lines) + "\n"


def test_analyze_binary_rates_agree(tmp_path, capsys) -> None:
    config = _write(
        tmp_path / "analyze.ini",
        "[analyze]\nm = 1\nmode = uniform\n"
        "snr_db_start = 0\nsnr_db_stop = 2\nsnr_db_step = 1\n",
    )
    out = tmp_path / "profile.csv"
    assert main(["analyze", "--config", config, "--out", str(out)]) == 0
    config_text, payload = _strip_echo(out.read_text())
    rows = list(csv.DictReader(io.StringIO(payload)))
    assert len(rows) == 3
    for row in rows:
        # with one bit per symbol the bit-metric rate is the symbol MI;
        # the dedicated Gaussian capacity column stays distinct
        assert float(row["bmd_rate_bits"]) == pytest.approx(
            float(row["symbol_mi_bits"]), abs=1e-9
        )
        snr_db = float(row["snr_db"])
        want_c = 0.5 * np.log2(1.0 + 10.0 ** (snr_db / 10.0))
        assert float(row["awgn_capacity_bits"]) == pytest.approx(want_c, abs=1e-12)
        assert float(row["input_entropy_bits"]) == pytest.approx(1.0, abs=1e-12)
    parsed = configparser.ConfigParser()
    parsed.read_string(config_text)
    assert parsed["analyze"]["m"] == "1"


def test_analyze_echo_round_trip(tmp_path) -> None:
    config = _write(
        tmp_path / "analyze.ini",
        "[analyze]\nm = 2\nmode = uniform\n"
        "snr_db_start = 4\nsnr_db_stop = 6\nsnr_db_step = 1\n",
    )
    first = tmp_path / "first.csv"
    assert main(["analyze", "--config", config, "--out", str(first)]) == 0
    config_text, _ = _strip_echo(first.read_text())
    again = _write(tmp_path / "echoed.ini", config_text)
    second = tmp_path / "second.csv"
    assert main(["analyze", "--config", again, "--out", str(second)]) == 0
    assert first.read_text() == second.read_text()


def test_analyze_shaped_reports_shaping(tmp_path) -> None:
    config = _write(
        tmp_path / "analyze.ini",
        "[analyze]\nm = 2\nmode = mb\n"
        "snr_db_start = 6\nsnr_db_stop = 6\nsnr_db_step = 1\n",
    )
    out = tmp_path / "shaped.csv"
    assert main(["analyze", "--config", config, "--out", str(out)]) == 0
    _, payload = _strip_echo(out.read_text())
    row = next(csv.DictReader(io.StringIO(payload)))
    assert float(row["nu"]) >= 0.0
    assert float(row["delta_linear"]) > 0.0
    assert float(row["input_entropy_bits"]) < 2.0  # shaping trims the prior


def test_threshold_report(tmp_path, capsys, base_r12) -> None:
    base = _basematrix_ini(tmp_path, base_r12)
    assert main(["threshold", base]) == 0
    report = dict(
        line.split(" = ")
        for line in capsys.readouterr().out.splitlines()
        if " = " in line
    )
    assert float(report["rate_bits"]) == pytest.approx(1.0, abs=1e-12)
    assert float(report["threshold_db"]) == pytest.approx(5.575, abs=0.0051)
    assert float(report["bmd_limit_db"]) == pytest.approx(5.2805, abs=1e-3)
    assert float(report["gap_db"]) == pytest.approx(
        float(report["threshold_db"]) - float(report["bmd_limit_db"]), abs=1e-9
    )


def test_threshold_explicit_bracket_matches_default(tmp_path, capsys,
                                                    base_r12) -> None:
    base = _basematrix_ini(tmp_path, base_r12)
    assert main(["threshold", base]) == 0
    default_out = capsys.readouterr().out
    config = _write(tmp_path / "t.ini",
                    "[threshold]\nlo_db = 5.0\nhi_db = 8.0\n")
    assert main(["threshold", base, "--config", config]) == 0
    explicit_out = capsys.readouterr().out
    pick = lambda text: [l for l in text.splitlines()
                         if l.startswith("threshold_db")]
    assert pick(default_out) == pick(explicit_out)


def test_lift_deterministic_artifacts(tmp_path, capsys, base_r12) -> None:
    base = _basematrix_ini(tmp_path, base_r12)
    out1, out2 = tmp_path / "a.alist", tmp_path / "b.alist"
    assert main(["lift", base, "--n", "2520", "--seed", "7",
                 "--out", str(out1)]) == 0
    report = capsys.readouterr().out
    assert "n = 2520" in report
    assert "q1 = 12" in report and "q2 = 35" in report
    assert "girth_ge_6 = True" in report
    assert main(["lift", base, "--n", "2520", "--seed", "7",
                 "--out", str(out2)]) == 0
    assert out1.read_text() == out2.read_text()
    assert (tmp_path / "a.alist.lineage").read_text() == (
        tmp_path / "b.alist.lineage"
    ).read_text()


def test_simulate_csv_and_seed_config(tmp_path, base_r12) -> None:
    base = _basematrix_ini(tmp_path, base_r12)
    alist = tmp_path / "code.alist"
    assert main(["lift", base, "--n", "2520", "--seed", "7",
                 "--out", str(alist)]) == 0
    config = _write(
        tmp_path / "sim.ini",
        "[simulate]\nm = 2\nsnr_db_start = 7.5\nsnr_db_stop = 7.5\n"
        "snr_db_step = 1\nmax_iter = 30\nmin_frame_errors = 3\n"
        "max_frames = 40\n",
    )
    out1 = tmp_path / "run1.csv"
    assert main(["simulate", str(alist), "--config", config, "--seed", "5",
                 "--out", str(out1)]) == 0
    config_text, payload = _strip_echo(out1.read_text())
    parsed = configparser.ConfigParser()
    parsed.read_string(config_text)
    assert parsed["simulate"]["seed"] == "5"
    assert parsed["simulate"]["mode"] == "uniform"
    row = next(csv.DictReader(io.StringIO(payload)))
    assert int(row["frames"]) <= 40
    assert 0.0 <= float(row["fer"]) <= 1.0

    # the echoed config alone reproduces the run: seed comes from the file
    echoed = _write(tmp_path / "echoed.ini", config_text)
    out2 = tmp_path / "run2.csv"
    assert main(["simulate", str(alist), "--config", echoed,
                 "--out", str(out2)]) == 0
    assert out1.read_text() == out2.read_text()


def test_optimize_artifacts_and_history(tmp_path, capsys) -> None:
    config = _write(
        tmp_path / "opt.ini",
        "[optimize]\ne = 1\nf = 2\ns_max = 2\nm = 1\n"
        "snr_lo_db = -2\nsnr_hi_db = 16\npopulation = 8\ngenerations = 3\n",
    )
    out = tmp_path / "design.ini"
    assert main(["optimize", "--config", config, "--seed", "1",
                 "--out", str(out)]) == 0
    report = capsys.readouterr().out
    assert "threshold_db = " in report and "rows = " in report

    parsed = configparser.ConfigParser()
    parsed.read_string(out.read_text())
    assert "basematrix" in parsed
    history_text = (tmp_path / "design.ini.history.csv").read_text()
    config_text, payload = _strip_echo(history_text)
    rows = list(csv.DictReader(io.StringIO(payload)))
    assert [r["generation"] for r in rows] == ["0", "1", "2", "3"]
    best = [float(r["best_threshold_db"]) for r in rows]
    assert all(b1 >= b2 for b1, b2 in zip(best, best[1:]))
    echoed = configparser.ConfigParser()
    echoed.read_string(config_text)
    assert echoed["optimize"]["seed"] == "1"
    assert echoed["optimize"]["generations"] == "3"


def test_exit_codes(tmp_path, capsys, base_r12) -> None:
    base = _basematrix_ini(tmp_path, base_r12)

    assert main(["analyze", "--config", str(tmp_path / "missing.ini")]) == 8

    unknown = _write(tmp_path / "u.ini",
                     "[analyze]\nm = 1\nmode = uniform\nsnr_db_start = 0\n"
                     "snr_db_stop = 1\nsnr_db_step = 1\nbogus = 2\n")
    assert main(["analyze", "--config", unknown]) == 2

    malformed = _write(tmp_path / "m.ini", "no section header here\n")
    assert main(["analyze", "--config", malformed]) == 3

    wrong_section = _write(tmp_path / "w.ini", "[other]\nm = 1\n")
    assert main(["analyze", "--config", wrong_section]) == 3

    bracket = _write(tmp_path / "b.ini", "[threshold]\nlo_db = 7\nhi_db = 8\n")
    assert main(["threshold", base, "--config", bracket]) == 6

    hopeless = _write(tmp_path / "h.ini",
                      "[basematrix]\nrows = 2 2\nbit_map = 1 1\n"
                      "max_parallel = 2\n")
    assert main(["lift", hopeless, "--n", "4", "--seed", "0",
                 "--out", str(tmp_path / "x.alist")]) == 4

    futile = _write(tmp_path / "f.ini",
                    "[optimize]\ne = 1\nf = 2\ns_max = 1\nm = 1\n"
                    "snr_lo_db = -5\nsnr_hi_db = -4\npopulation = 8\n"
                    "generations = 1\n")
    assert main(["optimize", "--config", futile]) == 7

    capsys.readouterr()  # drop accumulated error chatter
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_error_messages_name_category(tmp_path, capsys) -> None:
    wrong_section = _write(tmp_path / "w.ini", "[other]\nm = 1\n")
    assert main(["analyze", "--config", wrong_section]) == 3
    err = capsys.readouterr().err
    assert err.startswith("error: parse:")
