import json

import numpy as np
import pytest

from sinhlab import cli
from sinhlab.config import ExperimentConfig, bundled_config, load_config
from sinhlab.errors import ConfigError, StageError
from sinhlab.export import CSV_HEADER, dumps, export_report, load_report
from sinhlab.pipeline import run_pipeline

SMALL = {
    "domain": {"kind": "unit-disc"},
    "m": 1,
    "signs": [1],
    "seeds": [[0.2, 0.1]],
    "rho_schedule": [0.25, 0.2, 0.15],
    "h": 0.03125,
    "h_min": 0.004,
    "fine_mesh": False,
    "eig_count": 5,
}


def write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("small")
    return run_pipeline(ExperimentConfig.from_dict(SMALL), out), out


def test_bundled_config():
    cfg = bundled_config()
    assert cfg.m == 1 and cfg.rho_schedule == [0.2, 0.1, 0.05] and cfg.h == 1 / 128
    assert bundled_config("dipole-m2.json").m == 2


@pytest.mark.parametrize("patch, msg", [
    ({"rho_schedule": [0.1, 0.2, 0.05]}, "descending"),
    ({"eig_count": 2}, r"4m\+1"),
    ({"tolerances": {"newton": -1}}, "positive"),
    ({"tolerances": {"newtn": 1e-8}}, "unknown"),
    ({"colour": "red"}, "unknown"),
    ({"signs": [2]}, "signs"),
])
def test_config_validation(tmp_path, patch, msg):
    with pytest.raises(ConfigError, match=msg):
        load_config(write(tmp_path, {**SMALL, **patch}))


def test_config_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(p)


def test_dumps_format():
    text = dumps({"b": [0.1, 1.0, float("nan")], "a": 1, "c": True, "d": np.float64(1 / 3)})
    assert text.index('"a"') < text.index('"b"')
    assert "0.10000000000000001" in text and "0.33333333333333331" in text and "null" in text
    assert "1.0" in text and text.endswith("\n")
    assert json.loads(text)["d"] == 1 / 3


def test_pipeline_artifacts(small_run):
    res, out = small_run
    for name in ("config.json", "kernels.json", "critical.json", "solve.json", "spectrum.json", "report.json",
                 "report.csv"):
        assert (out / name).exists(), name
    assert (out / "fields" / "u_rho0.25.bin").exists()
    assert res.passed
    assert res.report.morse == [1, 1, 1]
    assert (out / "report.csv").read_text().splitlines()[0] == CSV_HEADER


def test_export_is_byte_stable(small_run, tmp_path):
    res, out = small_run
    a = export_report(res.report, "json", tmp_path / "a.json").read_bytes()
    b = export_report(res.report, "json", tmp_path / "b.json").read_bytes()
    assert a == b
    c1 = export_report(res.report, "csv", tmp_path / "a.csv").read_bytes()
    c2 = export_report(res.report, "csv", tmp_path / "b.csv").read_bytes()
    assert c1 == c2
    assert load_report(tmp_path / "a.json").to_dict() == json.loads(a)


def test_pipeline_deterministic(small_run, tmp_path):
    _, out = small_run
    run_pipeline(ExperimentConfig.from_dict(SMALL), tmp_path, save_fields=False)
    assert (tmp_path / "report.json").read_bytes() == (out / "report.json").read_bytes()
    assert (tmp_path / "report.csv").read_bytes() == (out / "report.csv").read_bytes()


def test_stage_failure_keeps_artifacts(tmp_path):
    cfg = ExperimentConfig.from_dict({**SMALL, "rho_schedule": [0.6, 0.5, 0.4]})
    with pytest.raises(StageError) as exc:
        run_pipeline(cfg, tmp_path)
    assert exc.value.stage == "solve"
    assert (tmp_path / "critical.json").exists()
    assert json.loads((tmp_path / "failure.json").read_text())["stage"] == "solve"


def test_cli_commands(tmp_path, capsys, small_run):
    cfgp = write(tmp_path, SMALL)
    assert cli.main(["kernels", "--x", "0", "0", "--y", "0.5", "0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["green"]["value"] == pytest.approx(np.log(2) / (2 * np.pi))
    assert cli.main(["crit", "--config", str(cfgp), "--out", str(tmp_path / "c")]) == 0
    assert (tmp_path / "c" / "critical.json").exists()
    assert cli.main(["verify", "--out", str(tmp_path / "v"), "--log-level", "ERROR"]) == 0
    assert cli.main(["run", "--config", str(cfgp), "--out", str(tmp_path / "r"), "--threads", "2"]) == 0
    assert cli.main(["report", "--out", str(tmp_path / "r")]) == 0
    assert CSV_HEADER in capsys.readouterr().out
    bad = write(tmp_path, {**SMALL, "eig_count": 2}, "bad.json")
    assert cli.main(["run", "--config", str(bad)]) == 2
    fail = write(tmp_path, {**SMALL, "rho_schedule": [0.6, 0.5, 0.4]}, "fail.json")
    assert cli.main(["solve", "--config", str(fail), "--out", str(tmp_path / "f")]) == 2
    assert "stage 'solve'" in capsys.readouterr().err


def test_cli_spectrum(tmp_path, capsys):
    cfgp = write(tmp_path, SMALL)
    assert cli.main(["spectrum", "--config", str(cfgp), "--out", str(tmp_path / "s")]) == 0
    assert "morse=1" in capsys.readouterr().out
