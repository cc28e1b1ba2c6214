import json
from pathlib import Path

import pytest

from blochobs.cli import main

GOLDEN = Path(__file__).parent / "golden"


def base_config(**overrides):
    cfg = {
        "box": {"a1": 0.0, "b1": 1.0, "a2": 0.5, "b2": 1.5},
        "grid": {"n1": 4, "n2": 4},
        "phi": {"degree": 1, "named": "x3"},
        "density": {"kind": "uniform", "value": 1.0},
        "profile": {"kind": "angles", "theta": [0.8, 0.5, 0.3], "phi": [0.2, 0.9, -0.4]},
        "schedule": [[0.4, 1.0, 0.0], [0.3, 0.0, 1.0]],
        "dt": 0.1,
    }
    cfg.update(overrides)
    return cfg


def write_config(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_verify_rep_ok(capsys):
    assert main(["verify-rep", "--degree-max", "3"]) == 0
    out = capsys.readouterr().out
    for lam in ("-2", "-6", "-12"):
        assert lam in out


def test_verify_rep_dump(capsys):
    assert main(["verify-rep", "--degree-max", "1", "--dump"]) == 0
    out = capsys.readouterr().out
    assert "[1212]" in out and "[00]" in out


def test_verify_rep_usage_error():
    assert main(["verify-rep", "--degree-max", "0"]) == 2


@pytest.mark.parametrize("n", [1, 2, 3])
def test_identities_golden_bytes(tmp_path, n):
    out = tmp_path / "identity.json"
    assert main(["identities", "--degree", str(n), "--out", str(out)]) == 0
    assert out.read_bytes() == (GOLDEN / f"identities_n{n}.json").read_bytes()


def test_identities_usage_error():
    assert main(["identities", "--degree", "0"]) == 2


def test_simulate_trace(tmp_path):
    cfg = write_config(tmp_path, base_config())
    out = tmp_path / "trace.csv"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "t,y"
    assert lines[1].startswith("0,")
    times = [float(row.split(",")[0]) for row in lines[1:]]
    assert times[-1] == pytest.approx(0.7)
    assert any(abs(t - 0.4) < 1e-12 for t in times)  # boundary included


def test_simulate_byte_deterministic(tmp_path):
    cfg = write_config(tmp_path, base_config())
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_simulate_profile_snapshot(tmp_path):
    cfg = write_config(tmp_path, base_config())
    out = tmp_path / "trace.csv"
    snap = tmp_path / "profile.csv"
    assert main(
        ["simulate", "--config", cfg, "--out", str(out), "--profile-out", str(snap)]
    ) == 0
    lines = snap.read_text().strip().splitlines()
    assert lines[0] == "sigma1,sigma2,weight,rho,x1,x2,x3"
    assert len(lines) == 1 + 16


def test_simulate_dt_larger_than_duration(tmp_path):
    cfg = write_config(tmp_path, base_config(schedule=[[0.3, 0.5, 0.5]], dt=10.0))
    out = tmp_path / "trace.csv"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) >= 3  # header + both endpoints


def test_simulate_unknown_key_rejected(tmp_path):
    cfg = base_config()
    cfg["extra"] = 1
    path = write_config(tmp_path, cfg)
    assert main(["simulate", "--config", path, "--out", str(tmp_path / "x.csv")]) == 2


def test_simulate_bad_box_rejected(tmp_path):
    cfg = base_config()
    cfg["box"]["a2"] = -1.0
    path = write_config(tmp_path, cfg)
    assert main(["simulate", "--config", path, "--out", str(tmp_path / "x.csv")]) == 2


def test_simulate_inharmonic_phi_rejected(tmp_path):
    cfg = base_config()
    cfg["phi"] = {"degree": 2, "coefficients": [[[2, 0, 0], 1.0]]}
    path = write_config(tmp_path, cfg)
    assert main(["simulate", "--config", path, "--out", str(tmp_path / "x.csv")]) == 2


def test_equivalence_self_pair(tmp_path):
    cfg = {
        "box": {"a1": 0.0, "b1": 1.0, "a2": 0.5, "b2": 1.5},
        "grid": {"n1": 3, "n2": 3},
        "phi": {"degree": 1, "named": "x3"},
        "pair_a": {
            "profile": {"kind": "constant", "x": [0.0, 0.6, 0.8]},
            "density": {"kind": "uniform", "value": 1.0},
        },
        "pair_b": {
            "profile": {"kind": "constant", "x": [0.0, 0.6, 0.8]},
            "density": {"kind": "uniform", "value": 1.0},
        },
        "trials": 5,
        "tol": 1e-12,
    }
    path = write_config(tmp_path, cfg)
    out = tmp_path / "verdict.json"
    assert main(["equivalence", "--config", path, "--out", str(out)]) == 0
    verdict = json.loads(out.read_text())
    assert verdict["verdict"] == "equivalent-so-far"
    assert verdict["gap"] == 0.0


def test_equivalence_scaled_density(tmp_path):
    cfg = {
        "box": {"a1": 0.0, "b1": 1.0, "a2": 0.5, "b2": 1.5},
        "grid": {"n1": 3, "n2": 3},
        "phi": {"degree": 1, "named": "x3"},
        "pair_a": {
            "profile": {"kind": "constant", "x": [0.0, 0.0, 1.0]},
            "density": {"kind": "uniform", "value": 1.0},
        },
        "pair_b": {
            "profile": {"kind": "constant", "x": [0.0, 0.0, 1.0]},
            "density": {"kind": "uniform", "value": 1.01},
        },
        "trials": 3,
        "tol": 1e-12,
        "seed": 4,
    }
    path = write_config(tmp_path, cfg)
    out = tmp_path / "verdict.json"
    assert main(["equivalence", "--config", path, "--out", str(out)]) == 0
    verdict = json.loads(out.read_text())
    assert verdict["verdict"] == "distinguished"
    assert verdict["time"] == 0.0


def reconstruct_config():
    return {
        "box": {"a1": 0.0, "b1": 1.0, "a2": 0.5, "b2": 1.5},
        "grid": {"n1": 6, "n2": 6},
        "phi": {"degree": 2, "named": "x1x2"},
        "truth": {
            "profile": {
                "kind": "angles",
                "theta": [0.8, 0.5, 0.3],
                "phi": [0.2, 0.9, -0.4],
            },
            "density": {
                "kind": "gaussian",
                "center": [0.5, 1.0],
                "widths": [0.6, 0.6],
            },
        },
    }


def test_reconstruct_oracle_psi_n2(tmp_path):
    path = write_config(tmp_path, reconstruct_config())
    out = tmp_path / "result.json"
    report = tmp_path / "report.csv"
    code = main(
        [
            "reconstruct",
            "--config",
            path,
            "--mode",
            "oracle-psi",
            "--out",
            str(out),
            "--report",
            str(report),
        ]
    )
    assert code == 0
    result = json.loads(out.read_text())
    assert result["ambiguity"] == "antipodal-pair"
    assert result["undefined_nodes"] == []
    assert len(result["density"]) == 36
    assert all(r is not None and len(r) == 3 for r in result["profile"])
    lines = report.read_text().strip().splitlines()
    assert lines[0] == "sigma1,sigma2,rho_true,rho_est,angle_error_rad"
    angles = [float(r.split(",")[4]) for r in lines[1:]]
    assert max(angles) <= 1e-7


def test_reconstruct_measured_low_order(tmp_path):
    cfg = {
        "box": {"a1": 0.0, "b1": 1.0, "a2": 0.5, "b2": 1.5},
        "grid": {"n1": 4, "n2": 4},
        "phi": {"degree": 1, "named": "x3"},
        "truth": {
            "profile": {"kind": "constant", "x": [0.0, 0.0, 1.0]},
            "density": {"kind": "uniform", "value": 0.8},
        },
        "reconstruction": {"D": 0},
    }
    path = write_config(tmp_path, cfg)
    out = tmp_path / "result.json"
    code = main(
        ["reconstruct", "--config", path, "--mode", "measured-moments", "--out", str(out)]
    )
    assert code == 0
    result = json.loads(out.read_text())
    assert result["ambiguity"] == "unique"
    assert all(abs(v - 0.8) < 1e-7 for v in result["density"])


def test_reconstruct_measured_cap_error(tmp_path):
    cfg = reconstruct_config()
    path = write_config(tmp_path, cfg)
    code = main(
        ["reconstruct", "--config", path, "--mode", "measured-moments", "--out",
         str(tmp_path / "r.json")]
    )
    assert code == 1


def test_reconstruct_unknown_reconstruction_key(tmp_path):
    cfg = reconstruct_config()
    cfg["reconstruction"] = {"bogus": 1}
    path = write_config(tmp_path, cfg)
    code = main(
        ["reconstruct", "--config", path, "--mode", "oracle-psi", "--out",
         str(tmp_path / "r.json")]
    )
    assert code == 2


def test_addition_check():
    assert main(["addition-check", "--degree", "3", "--samples", "50"]) == 0
    assert main(["addition-check", "--degree", "2", "--tol", "1e-30"]) == 1


def test_missing_config_file(tmp_path):
    assert main(
        ["simulate", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path / "x")]
    ) == 2
