import json
from pathlib import Path

import numpy as np
import pytest

from qubitmaps.cli import build_config, fibonacci_sphere, main, read_config_file, sweep_axis, ConfigError

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def data_rows(path):
    lines = [line for line in Path(path).read_text().splitlines() if not line.startswith("#")]
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


def test_config_parsing(tmp_path):
    cfg_file = tmp_path / "c.cfg"
    cfg_file.write_text("# comment\nJ = 0.5  # inline\nh = pi/4\nrG=-0.3\n")
    raw = read_config_file(cfg_file)
    cfg = build_config(raw)
    assert cfg["J"] == 0.5 and cfg["h"] == pytest.approx(np.pi / 4) and cfg["rG"] == -0.3
    assert build_config({})["rG"] is None
    for bad in ({"foo": "1"}, {"J": "abc"}, {"b3": "2"}, {"rG": "1.5"}, {"sweep_steps": "0"},
                {"construction": "nope"}, {"claim": "nope"}, {"starts": "0,?"}):
        with pytest.raises(ConfigError):
            build_config(bad)


def test_map_identity(tmp_path):
    assert main(["map", "--J", "0", "--t", "3.7", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "map.json").read_text())
    assert np.allclose(data["augmented"], np.eye(4))
    assert (tmp_path / "cloud.csv").exists()


def test_map_pc(tmp_path):
    assert main(["map", "--config", str(CONFIGS / "pc_map.cfg"), "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "map.json").read_text())
    assert data["classification"]["phase_covariant"]
    assert data["meta"]["version"]
    text = (tmp_path / "map.csv").read_text()
    assert "# convention: log = natural (nats)" in text
    assert "# config: b3 = 0.29999999999999999" in text


def test_map_gp_3qubit(tmp_path):
    assert main(["map", "--config", str(CONFIGS / "gp_3qubit.cfg"), "--out", str(tmp_path)]) == 0
    cls = json.loads((tmp_path / "map.json").read_text())["classification"]
    assert cls["cptp"] and cls["gibbs_preserving"] and not cls["phase_covariant"]


@pytest.mark.parametrize("construction", ["env_coherent", "correlated", "gp_finetuned", "appD", "general2q"])
def test_map_every_construction(tmp_path, construction):
    args = ["map", "--construction", construction, "--J", "0.7", "--rG", "0.2", "--b3", "0.3",
            "--set", "b1=0.2", "--set", "theta=0.8", "--set", "c31=0.05", "--out", str(tmp_path)]
    assert main(args) == 0
    assert json.loads((tmp_path / "map.json").read_text())["classification"]["cptp"]


def test_flags_override_config(tmp_path):
    main(["map", "--config", str(CONFIGS / "pc_map.cfg"), "--J", "0", "--h", "0", "--out", str(tmp_path)])
    assert np.allclose(json.loads((tmp_path / "map.json").read_text())["map"]["T"], np.eye(3))


def test_sweep(tmp_path):
    assert main(["sweep-deltaD", "--config", str(CONFIGS / "comparison.cfg"), "--out", str(tmp_path)]) == 0
    header, rows = data_rows(tmp_path / "sweep_deltaD.csv")
    assert header == ["a3", "dD_PC", "dD_E", "dD_GP", "delta"]
    a3 = [float(r[0]) for r in rows]
    assert a3[0] == -1 and a3[-1] == 1 and a3 == sorted(a3)
    at_rg = [r for r in rows if float(r[0]) == -0.3]
    assert len(at_rg) == 1
    assert float(at_rg[0][1]) < 1e-10 and float(at_rg[0][3]) < 1e-10
    assert any(float(r[4]) > 0 for r in rows)


def test_sweep_axis_has_single_thermal_point():
    grid = sweep_axis(-0.3, 41)
    assert np.sum(np.isclose(grid, -0.3, atol=1e-9)) == 1


def test_infeasible_writes_nothing(tmp_path):
    out = tmp_path / "o"
    assert main(["sweep-deltaD", "--b3", "0.3", "--rG", "0.45", "--out", str(out)]) == 2
    assert not out.exists()
    assert main(["solve-gp", "--b3", "0.3", "--rG", "0.45", "--out", str(out)]) == 2
    rec = json.loads((out / "solve_gp.json").read_text())["solution"]
    assert rec["infeasibility_reason"] == "sign_conflict"


def test_invalid_config_exit(tmp_path, capsys):
    assert main(["map", "--set", "nope=1", "--out", str(tmp_path)]) == 3
    assert main(["map", "--config", str(tmp_path / "missing.cfg")]) == 3
    assert main(["verify", "--claim", "bogus", "--out", str(tmp_path)]) == 3
    assert "charge_conservation" in capsys.readouterr().err


def test_trajectories_and_converge(tmp_path):
    cfg = str(CONFIGS / "comparison.cfg")
    assert main(["trajectories", "--config", cfg, "--out", str(tmp_path)]) == 0
    header, rows = data_rows(tmp_path / "trajectories.csv")
    pc0 = [float(r[-1]) for r in rows if r[0] == "PC" and r[1] == "0"]
    assert len(pc0) == 11 and max(pc0) < 1e-12
    assert main(["trajectories", "--config", cfg, "--set", "steps=0", "--out", str(tmp_path / "z")]) == 0
    _, rows = data_rows(tmp_path / "z" / "trajectories.csv")
    assert {r[2] for r in rows} == {"0"}
    assert main(["converge", "--config", cfg, "--out", str(tmp_path)]) == 0
    _, rows = data_rows(tmp_path / "converge.csv")
    steps = {r[0]: int(r[2]) for r in rows if r[1] == "0"}
    assert steps["PC"] <= steps["E"] <= steps["GP"]


def test_verify_and_solve(tmp_path):
    assert main(["verify", "--claim", "no_coherence", "--set", "n=3", "--trials", "50", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "verify.jsonl").read_text().splitlines()
    assert "meta" in json.loads(lines[0])
    assert json.loads(lines[1])["passed"]
    assert main(["solve-gp", "--b3", "0.3", "--rG", "-0.3", "--out", str(tmp_path)]) == 0
    sol = json.loads((tmp_path / "solve_gp.json").read_text())["solution"]
    assert sol["feasible"] and sol["J"] == pytest.approx(np.pi / (4 * np.sqrt(2)))


def test_fibonacci_sphere():
    pts = fibonacci_sphere(200)
    assert pts.shape == (200, 3)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1)
    assert abs(pts.mean(axis=0)).max() < 0.01
