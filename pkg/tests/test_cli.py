import csv
import json

import pytest

from sunchain import cli, fock, hamiltonian
from sunchain.config import parse_config
from sunchain.hamiltonian import ConfigError


def write_config(tmp_path, **sections):
    cfg = {
        "chain": {"L": 4, "N": 3, "potential": {"kind": "hubbard", "U": 1.0}},
        "particles": {"M": 7},
        "couplings": {"distribution": "uniform", "low": 0.5, "high": 1.5, "seed": 42, "draws": 5},
    }
    cfg.update(sections)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


def run_cli(*argv):
    return cli.main([str(a) for a in argv])


def test_verify_su3_seven_particles(tmp_path, capsys):
    path = write_config(tmp_path)
    out = tmp_path / "out"
    assert run_cli("verify", path, "--jobs", 1, "--out-dir", out) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] and report["schema_version"] == 1
    assert len(report["runs"]) == 5
    for r in report["runs"]:
        assert r["reports"][0]["ground_diagram"]["note"] == "3,2,2"
        assert r["reports"][0]["ground_multiplicity"]["value"] == 3
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 42 and manifest["checks"]["failed"] == 0
    assert "all" in capsys.readouterr().out


def test_verify_infeasible_sector(tmp_path, capsys):
    path = write_config(
        tmp_path,
        chain={"L": 2, "N": 1},
        particles={"sectors": [[3]]},
        couplings={"t": 1.0, "J": 1.0, "K": 1.0},
    )
    assert run_cli("verify", path, "--out-dir", tmp_path / "o") == cli.EXIT_CONFIG
    assert "L >= max M_alpha" in capsys.readouterr().err


def test_verify_negative_hopping(tmp_path, capsys):
    path = write_config(tmp_path, couplings={"t": [1.0, -0.5, 1.0], "J": 1.0, "K": 1.0})
    assert run_cli("verify", path, "--out-dir", tmp_path / "o") == cli.EXIT_CONFIG
    assert "couplings.t" in capsys.readouterr().err


def test_malformed_json_names_line(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"chain": {"L": 4,\n "N": }}')
    assert run_cli("verify", path) == cli.EXIT_CONFIG
    assert "line 2" in capsys.readouterr().err


@pytest.mark.parametrize(
    "raw, match",
    [
        ({"particles": {"M": 3}, "couplings": {"t": 1, "J": 1, "K": 1}}, "chain"),
        ({"chain": {"L": 3, "N": 2}, "couplings": {"t": 1, "J": 1, "K": 1}}, "particles"),
        ({"chain": {"L": 3, "N": 2}, "particles": {"M": 3}, "couplings": {"distribution": "uniform"}}, "seed"),
        (
            {"chain": {"L": 3, "N": 2}, "particles": {"M": 3},
             "couplings": {"t": 1, "J": 1, "K": 1, "distribution": "uniform", "seed": 1}},
            "not both",
        ),
        ({"chain": {"L": 30, "N": 2}, "particles": {"M": 3}, "couplings": {"t": 1, "J": 1, "K": 1}}, "L=30"),
        ({"chain": {"L": 3, "N": 2}, "particles": {"M": 7}, "couplings": {"t": 1, "J": 1, "K": 1}}, "exceeds"),
        ({"chain": {"L": 3, "N": 2}, "particles": {"sectors": []}, "couplings": {"t": 1, "J": 1, "K": 1}}, "non-empty"),
    ],
)
def test_config_validation(raw, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(raw)


def test_flag_overrides():
    raw = {
        "chain": {"L": 3, "N": 2},
        "particles": {"M": 2},
        "couplings": {"distribution": "uniform", "seed": 1, "draws": 2},
    }
    cfg = parse_config(raw, {"L": 4, "M": 5, "seed": 9})
    assert (cfg.L, cfg.M, cfg.seed) == (4, [5], 9)
    assert len(cfg.chains()) == 2 and len(cfg.chains()[0].t) == 3


def test_spectrum_su2_table(tmp_path):
    path = write_config(
        tmp_path,
        chain={"L": 4, "N": 2},
        particles={"M": 4},
        couplings={"t": [1.0, 0.8, 1.1], "J": 0.9, "K": 0.6},
    )
    out = tmp_path / "out"
    assert run_cli("spectrum", path, "--jobs", 1, "--out-dir", out, "--format", "csv") == 0
    rows = list(csv.DictReader((out / "table.csv").open()))
    assert [r["diagram"] for r in rows] == ["4", "3,1", "2,2"]
    energies = [float(r["energy"]) for r in rows]
    assert energies[2] < energies[1] < energies[0]
    assert not (out / "report.json").exists()


def test_spectrum_free_fermions_match_oracle(tmp_path):
    path = write_config(
        tmp_path,
        chain={"L": 4, "N": 3, "potential": {"kind": "hubbard", "U": 0.0}},
        particles={"M": [5, 6]},
        couplings={"t": [1.0, 0.8, 1.1], "J": 0.0, "K": 0.0},
    )
    out = tmp_path / "out"
    assert run_cli("spectrum", path, "--jobs", 1, "--out-dir", out) == 0
    rows = [r for r in csv.DictReader((out / "table.csv").open()) if r["feasible"] == "True"]
    assert rows
    for r in rows:
        assert float(r["energy"]) == pytest.approx(float(r["free_energy"]), abs=1e-10)


def test_spectrum_empty_sector_list(tmp_path, capsys):
    path = write_config(tmp_path, particles={"sectors": []})
    assert run_cli("spectrum", path) == cli.EXIT_CONFIG


def test_verify_explicit_sectors(tmp_path):
    path = write_config(
        tmp_path,
        chain={"L": 3, "N": 3},
        particles={"sectors": [[1, 2, 1], [3, 2, 1], [0, 0, 0]]},
    )
    out = tmp_path / "out"
    assert run_cli("verify", path, "--jobs", 1, "--out-dir", out) == 0
    report = json.loads((out / "report.json").read_text())
    names = {c["check"] for c in report["runs"][0]["checks"]}
    assert {"positivity", "uniqueness", "highest-weight", "permutation", "connectivity"} <= names


def test_reports_are_deterministic(tmp_path):
    path = write_config(tmp_path, particles={"M": [5, 6]})
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_cli("verify", path, "--jobs", 1, "--out-dir", a, "--no-timing") == 0
    assert run_cli("verify", path, "--jobs", 2, "--out-dir", b, "--no-timing") == 0
    for name in ("report.json", "table.csv", "manifest.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_selftest_clean(tmp_path, capsys):
    assert run_cli("selftest", "--out-dir", tmp_path / "a") == 0
    assert run_cli("selftest", "--out-dir", tmp_path / "b") == 0
    assert (tmp_path / "a" / "manifest.json").read_bytes() == (tmp_path / "b" / "manifest.json").read_bytes()
    assert "FAIL" not in capsys.readouterr().out


def site_major_parity(masks, flavor, site):
    # occupied modes before (flavor, site) when modes are ordered site-major
    n = 0
    for x in range(1, site + 1):
        for a in range(1, len(masks) + 1):
            if (x, a) >= (site, flavor):
                break
            n += (masks[a - 1] >> (x - 1)) & 1
    return n & 1


def test_selftest_catches_broken_sign_convention(monkeypatch, capsys):
    monkeypatch.setattr(fock, "preceding_parity", site_major_parity)
    hamiltonian.clear_caches()
    try:
        assert run_cli("selftest") == cli.EXIT_FAIL
    finally:
        monkeypatch.undo()
        hamiltonian.clear_caches()
    out = capsys.readouterr().out
    assert "FAIL hamiltonian.nonpositive" in out
    assert "FAIL fock.sign-absorption" in out
