import json
import os

import numpy as np
import pytest

from pfkern.cli import main


def test_usage_error_exit_code(capsys):
    assert main(["kernel", "--family", "charlier"]) == 1


def test_unknown_argument_exits_one():
    with pytest.raises(SystemExit) as exc:
        main(["kernel", "--bogus"])
    assert exc.value.code == 1


def test_kernel_command_shape_and_metadata(tmp_path):
    code = main(["kernel", "--family", "charlier", "--theta", "1", "--beta", "4",
                 "--N", "4", "--window", "0:16", "--out", str(tmp_path)])
    assert code in (0, 3)
    csv = tmp_path / "kernel_charlier_b4_N4.csv"
    lines = csv.read_text().strip().splitlines()
    assert lines[0] == "x,y,S,SD,epsS"
    assert len(lines) == 1 + 17 * 17
    meta = json.loads((tmp_path / "kernel_charlier_b4_N4.json").read_text())
    assert meta["metadata"]["provenance"] == "contour"
    assert meta["metadata"]["beta"] == 4
    assert "composition_adjudication" in meta


def test_kernel_oracle_provenance(tmp_path):
    main(["kernel", "--family", "charlier", "--theta", "1", "--beta", "1",
          "--N", "4", "--window", "0:10", "--oracle", "--out", str(tmp_path)])
    meta = json.loads((tmp_path / "kernel_charlier_b1_N4.json").read_text())
    assert meta["metadata"]["provenance"] == "oracle"


def test_kernel_rerun_byte_identical(tmp_path):
    args = ["kernel", "--family", "krawtchouk", "--M", "30", "--p", "0.4",
            "--beta", "1", "--N", "4", "--window", "0:12", "--out", str(tmp_path)]
    main(args)
    first = (tmp_path / "kernel_krawtchouk_b1_N4.csv").read_bytes()
    main(args)
    assert (tmp_path / "kernel_krawtchouk_b1_N4.csv").read_bytes() == first


def test_density_csv(tmp_path):
    code = main(["asym", "density", "--family", "meixner", "--xi", "0.25",
                 "--grid", "40", "--out", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "density_meixner.csv").read_text().strip().splitlines()
    assert rows[0] == "u,cos_theta,rho,delta,rho_site"
    us = np.array([float(r.split(",")[0]) for r in rows[1:]])
    assert us[0] > 1 / 3 and us[-1] < 3.0


def test_config_file_round_trip(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("family=charlier\ntheta=1\nbeta=4\nN=4\nwindow=0:8\n"
                   f"out={tmp_path}\n")
    code = main(["--config", str(cfg), "kernel", "--family", "charlier",
                 "--theta", "1", "--beta", "4", "--N", "4", "--window", "0:8",
                 "--out", str(tmp_path)])
    assert code in (0, 3)
    meta = json.loads((tmp_path / "kernel_charlier_b4_N4.json").read_text())
    assert meta["config"]["window"] == "0:8"


def test_splice_reality(tmp_path):
    code = main(["splice", "reality", "--family", "charlier", "--theta", "1",
                 "--sigma", "1.0", "--out", str(tmp_path)])
    assert code == 0
    rep = json.loads((tmp_path / "reality.json").read_text())
    assert rep["max_imag_unit_circle"] < 1e-10


def test_validate_wrong_nesting_names_loser(tmp_path):
    code = main(["validate", "--family", "charlier", "--theta", "1",
                 "--wrong-nesting", "--out", str(tmp_path)])
    assert code == 3
    rep = json.loads((tmp_path / "validate.json").read_text())
    bad = [i for i in rep["invariants"] if "injected wrong nesting" in i["name"]]
    assert bad and not bad[0]["passes"]
    nest = [f for f in rep["findings"] if f["type"] == "nesting"][0]
    losers = {k: v for k, v in nest["candidates"].items() if k != nest["winner"]}
    assert min(losers.values()) > 1e-3
