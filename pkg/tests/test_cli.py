import json
from pathlib import Path

import pytest

from cmc_simons.cli import main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(argv + ["-o", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() and out.suffix == ".json" else None)


def test_verify_cmc_hopf(tmp_path):
    code, rep = run(["verify", str(CONFIGS / "clifford_cmc.json")], tmp_path)
    assert code == 0 and rep["verdict"] == "pass"
    names = [r["name"] for r in rep["records"]]
    assert names == sorted(names) and "pointwise_simons" in names
    assert len(rep["provenance"]["config_sha256"]) == 64


def test_verify_general_on_perturbed(tmp_path):
    code, rep = run(["verify", str(CONFIGS / "perturbed_general.json")], tmp_path)
    assert code == 0
    assert all(r["verdict"] == "pass" for r in rep["records"])


def test_cmc_checks_on_non_cmc_surface_is_config_error(tmp_path):
    code, _ = run(["verify", str(CONFIGS / "perturbed_cmc.json")], tmp_path)
    assert code == 2


def test_simons_and_noncompact(tmp_path):
    code, rep = run(["simons", str(CONFIGS / "berger_hopf_simons.json")], tmp_path)
    assert code == 0 and rep["result"]["equality_case"]
    code, _ = run(["simons", str(CONFIGS / "nil_cylinder.json")], tmp_path, "b.json")
    assert code == 2


def test_formal_and_mutation(tmp_path):
    code, rep = run(["formal", "--count", "100"], tmp_path)
    assert code == 0 and rep["verdict"] == "pass"
    code, rep = run(["formal", "--count", "100", "--mutate"], tmp_path, "m.json")
    assert code == 1 and rep["failures"]


def test_bounds(tmp_path):
    code, rep = run(["bounds", "--kappa", "4", "--tau", "0.5", "--H", "0", "--C", "0", "--A-sq", "0.3"], tmp_path)
    assert code == 0
    assert rep["row"]["a"] == -3.0 and rep["row"]["b"] == 0.5
    assert rep["corridor_check"]["inside"]
    code, _ = run(["bounds", "--kappa", "4", "--tau", "0", "--H", "0", "--C", "0"], tmp_path, "z.json")
    assert code == 2


def test_sweep_csv_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", str(CONFIGS / "sweep_open.json"), "-o", str(a)]) == 0
    assert main(["sweep", str(CONFIGS / "sweep_open.json"), "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    header = a.read_text().splitlines()[0]
    assert header == "kappa,tau,H,C,rho,a,b,corridor_lo,corridor_hi,regime,ordering_ok"


def test_report_is_byte_identical(tmp_path):
    cfg = str(CONFIGS / "clifford_cmc.json")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["verify", cfg, "-o", str(a)])
    main(["verify", cfg, "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize(
    "payload",
    [
        "{not json",
        '{"schema_version": 2, "model": {"kappa": 1, "tau": 1}, "surface": {"kind": "HopfTorus"}}',
        '{"schema_version": 1, "model": {"kappa": 1, "tau": 1}, "surface": {"kind": "Sphere"}}',
        '{"schema_version": 1, "model": {"kappa": 1, "tau": 1}, "surface": {"kind": "HopfTorus"}, "grid": {"n_u": 4}}',
        '{"schema_version": 1, "model": {"kappa": 1, "tau": 0}, "surface": {"kind": "HopfTorus"}}',
    ],
)
def test_bad_configs(tmp_path, payload):
    cfg = tmp_path / "bad.json"
    cfg.write_text(payload)
    assert main(["verify", str(cfg)]) == 2


def test_missing_file_and_usage(tmp_path):
    assert main(["verify", str(tmp_path / "nope.json")]) == 2
    assert main([]) == 2
