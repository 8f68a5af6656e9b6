import json
from pathlib import Path

import pytest

from sheafccz.cli import main


def write_config(tmp_path: Path, name: str, payload: dict) -> str:
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


@pytest.fixture()
def toric_config(tmp_path):
    return write_config(
        tmp_path,
        "toric.json",
        {
            "schema": 1,
            "field": {"r": 1},
            "complex": {"kind": "cubical", "N": 3, "t": 3, "shifts": [[1, 2]] * 3},
            "codes": [{"directions": ["rep", "rep", "rep"]}],
            "levels": [1, 1, 1],
            "seed": 11,
            "trials": 60,
            "caps": {"exhaustive_distance": 4096, "subrank_restarts": 48},
            "out": str(tmp_path / "out"),
        },
    )


def test_build_summary(toric_config, tmp_path, capsys):
    assert main(["build", "--config", toric_config]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["cells"] == [24, 72, 72, 24]
    assert summary["n"] == 72 and summary["k"] == 3
    out = tmp_path / "out"
    for name in ("complex.json", "sheaf.json", "css.json", "hx.alist", "hz.alist", "summary.json"):
        assert (out / name).exists()


def test_verify_all_passes(toric_config, tmp_path, capsys):
    assert main(["verify", "--config", toric_config, "--suite", "all"]) == 0
    msg = json.loads(capsys.readouterr().out)
    assert msg["ok"] is True
    report = json.loads((tmp_path / "out" / "verify_all.json").read_text())
    assert set(report["checks"]) == {"dd-zero", "axioms", "acyclic", "poincare", "ccz"}


def test_verify_single_suites(toric_config, capsys):
    for suite in ("dd-zero", "axioms", "acyclic"):
        assert main(["verify", "--config", toric_config, "--suite", suite]) == 0
        capsys.readouterr()


def test_reports_byte_identical_for_same_seed(toric_config, tmp_path, capsys):
    assert main(["verify", "--config", toric_config, "--suite", "ccz"]) == 0
    capsys.readouterr()
    first = (tmp_path / "out" / "verify_ccz.json").read_bytes()
    assert main(["verify", "--config", toric_config, "--suite", "ccz"]) == 0
    capsys.readouterr()
    assert (tmp_path / "out" / "verify_ccz.json").read_bytes() == first


def test_params_output(toric_config, tmp_path, capsys):
    assert main(["params", "--config", toric_config]) == 0
    params = json.loads(capsys.readouterr().out)
    assert params["n"] == {"provenance": "exact", "value": 72}
    assert params["k"] == {"provenance": "exact", "value": 3}
    assert params["n_ccz"]["value"] == 144
    assert params["w_ccz"]["value"] == 8
    assert params["k_ccz_lb"]["value"] >= 1
    assert params["d_upper"]["provenance"] in ("bound", "exact")
    assert "gamma_estimate" in params
    assert (tmp_path / "out" / "params.json").exists()


def test_params_uncertified_marker(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        "neg.json",
        {
            "schema": 1,
            "field": {"r": 3},
            "complex": {"kind": "cubical", "N": 2, "t": 3, "shifts": [[1]] * 3},
            "codes": [{"uniform": "full"}],
            "levels": [1, 1, 1],
            "seed": 5,
            "trials": 40,
            "out": str(tmp_path / "negout"),
        },
    )
    assert main(["params", "--config", cfg]) == 0
    params = json.loads(capsys.readouterr().out)
    assert params["k_ccz_lb"] == {"provenance": "uncertified", "value": None}
    assert params["n_ccz"]["provenance"] == "uncertified"


def test_verify_ccz_failure_exit_code(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        "neg.json",
        {
            "schema": 1,
            "field": {"r": 3},
            "complex": {"kind": "cubical", "N": 2, "t": 3, "shifts": [[1]] * 3},
            "codes": [{"uniform": "full"}],
            "levels": [1, 1, 1],
            "seed": 5,
            "trials": 40,
            "out": str(tmp_path / "negout"),
        },
    )
    assert main(["verify", "--config", cfg, "--suite", "ccz"]) == 1
    report = json.loads((tmp_path / "negout" / "verify_ccz.json").read_text())
    assert report["ok"] is False
    assert report["checks"]["ccz"]["failures"]


def test_simplicial_config_with_leibniz(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        "torus.json",
        {
            "schema": 1,
            "field": {"r": 1},
            "complex": {"kind": "simplicial", "builtin": "torus7"},
            "codes": [{"uniform": "rep"}],
            "levels": [1, 1, 0],
            "seed": 2,
            "trials": 50,
            "out": str(tmp_path / "torout"),
        },
    )
    assert main(["verify", "--config", cfg, "--suite", "leibniz"]) == 0
    capsys.readouterr()
    assert main(["verify", "--config", cfg, "--suite", "ccz"]) == 0
    capsys.readouterr()
    assert main(["verify", "--config", cfg, "--suite", "all"]) == 0


def test_config_errors_exit_2(tmp_path, capsys):
    assert main(["build", "--config", str(tmp_path / "missing.json")]) == 2
    bad_schema = write_config(tmp_path, "bad1.json", {"schema": 99})
    assert main(["build", "--config", bad_schema]) == 2
    noncommuting = write_config(
        tmp_path,
        "bad2.json",
        {
            "schema": 1,
            "field": {"r": 1},
            "complex": {
                "kind": "cubical",
                "N": 3,
                "t": 2,
                "permutations": [[[1, 2, 0]], [[0, 2, 1]]],
            },
            "codes": [{"uniform": "rep"}],
        },
    )
    assert main(["build", "--config", noncommuting, "--out", str(tmp_path / "x")]) == 2
    err = capsys.readouterr().err
    assert "non-commuting" in err
    leibniz_on_cubical = write_config(
        tmp_path,
        "bad3.json",
        {
            "schema": 1,
            "field": {"r": 1},
            "complex": {"kind": "cubical", "N": 3, "t": 3, "shifts": [[1, 2]] * 3},
            "codes": [{"uniform": "rep"}],
            "out": str(tmp_path / "y"),
        },
    )
    assert main(["verify", "--config", leibniz_on_cubical, "--suite", "leibniz"]) == 2


def test_explicit_facets_config(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        "tri.json",
        {
            "schema": 1,
            "field": {"r": 1},
            "complex": {"kind": "simplicial", "facets": [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]},
            "codes": [{"uniform": "rep"}],
            "levels": [1],
            "seed": 1,
            "trials": 20,
            "out": str(tmp_path / "triout"),
        },
    )
    assert main(["build", "--config", cfg]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["cells"] == [4, 6, 4]
