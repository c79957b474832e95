import json
import subprocess
import sys

import pytest

from btcohom.cli import RunConfig, main
from btcohom.errors import ConfigError

from conftest import quotient


@pytest.mark.parametrize("argv", [
    ["build", "--q", "6"], ["build", "--radius", "3", "--support-radius", "2"],
    ["build", "--level", "t^"], ["build", "--l", "-1"], ["build", "--n", "0"],
    ["build", "--radius", "8", "--precision", "4"]])
def test_invalid_config_exits_2(argv, capsys):
    assert main(argv) == 2
    assert "invalid config" in capsys.readouterr().err


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": 1, "nonsense": 3}))
    assert main(["build", "--config", str(cfg)]) == 2


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": 1, "q": 3, "radius": 5}))
    assert main(["build", "--config", str(cfg), "--radius", "4", "--out", str(tmp_path / "o")]) == 0
    doc = json.loads((tmp_path / "o" / "build.json").read_text())
    assert doc["config"]["q"] == 3 and doc["config"]["radius"] == 4
    assert doc["result"]["alternating_sum"] == 1


def test_config_hash():
    a = RunConfig(radius=6).resolved()
    b = RunConfig(radius=6, out="/tmp/x", workers=4).resolved()
    c = RunConfig(radius=7).resolved()
    assert a.digest() == b.digest() != c.digest()
    with pytest.raises(ConfigError):
        RunConfig(q=1, radius=6).resolved().validate()


def test_harmonic_instability_exits_4(tmp_path, capsys):
    code = main(["harmonic", "--level", "t^2", "--radius", "6", "--support-radius", "2",
                 "--out", str(tmp_path)])
    assert code == 4
    doc = json.loads((tmp_path / "harmonic.json").read_text())
    assert doc["result"]["stable"] is False


def test_full_run_is_deterministic(tmp_path):
    outs = []
    for name in ("a", "b"):
        d = tmp_path / name
        proc = subprocess.run([sys.executable, "-m", "btcohom", "all", "--level", "t", "--radius", "7",
                               "--samples", "20", "--out", str(d)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outs.append({p.name: p.read_text() for p in sorted(d.iterdir())})
    assert outs[0] == outs[1]
    assert set(outs[0]) == {f"{s}.json" for s in ("build", "quotient", "harmonic", "cusps", "euler", "verify")}
    cusps = json.loads(outs[0]["cusps.json"])["result"]
    assert cusps["count"] == 3
    verify = json.loads(outs[0]["verify.json"])["result"]
    assert verify["all_pass"]


def test_fault_injected_quotient_exits_5(tmp_path, capsys):
    text = quotient(2, 2, None, 3).serialize().splitlines()
    i = next(k for k, line in enumerate(text) if line.startswith("face 2:"))
    text[i] = text[i][:-2] + ("-1" if text[i].endswith("+1") else "+1")
    qf = tmp_path / "bad.txt"
    qf.write_text("\n".join(text) + "\n")
    code = main(["verify", "--n", "2", "--radius", "3", "--support-radius", "1",
                 "--quotient-file", str(qf), "--out", str(tmp_path)])
    assert code == 5
    doc = json.loads((tmp_path / "verify.json").read_text())
    res = doc["result"]
    assert not res["all_pass"]
    assert not res["properties"]["d_d"]["pass"]
    assert "orbit 2:0" in res["properties"]["incidence_dd_zero"]["counterexample"]
