import json
import pathlib
import subprocess
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

import render  # noqa: E402

SAMPLES = pathlib.Path(__file__).parent / "samples"

HEADER = ("structure,workload,n,k,m,seed,total_cost,access_inits,"
          "link_follows,rotations,avg_cost,ib,opt_lb\n")


def test_family_sequential(tmp_path):
    out = tmp_path / "seq.png"
    rc = render.main(["--in", str(SAMPLES / "sequential.csv"),
                      "--x", "lglgn", "--series", "structure",
                      "--out", str(out)])
    assert rc == 0 and out.stat().st_size > 0


def test_family_ratios(tmp_path):
    for name in ("sequential_ratio", "random_ratio"):
        out = tmp_path / f"{name}.png"
        rc = render.main(["--in", str(SAMPLES / f"{name}.csv"),
                          "--x", "lglgn", "--series", "structure",
                          "--y", "avg_cost", "--out", str(out)])
        assert rc == 0 and out.stat().st_size > 0


def test_family_working_set_panels(tmp_path):
    out = tmp_path / "lgk.png"
    rc = render.main(["--in", str(SAMPLES / "working_set_lgk.csv"),
                      "--x", "lgk", "--series", "structure",
                      "--out", str(out)])
    assert rc == 0 and out.stat().st_size > 0
    out = tmp_path / "lglgn.png"
    rc = render.main(["--in", str(SAMPLES / "working_set_lglgn.csv"),
                      "--x", "lglgn", "--series", "structure",
                      "--out", str(out)])
    assert rc == 0 and out.stat().st_size > 0


def test_family_fit_overlays(tmp_path):
    for k in (2, 4):
        out = tmp_path / f"fine_k{k}.png"
        rc = render.main(["--in", str(SAMPLES / f"fine_k{k}.csv"),
                          "--x", "rho", "--series", "structure",
                          "--fit", str(SAMPLES / f"fit_k{k}.json"),
                          "--out", str(out)])
        assert rc == 0 and out.stat().st_size > 0


def test_family_fixed_n(tmp_path):
    out = tmp_path / "fixed.png"
    rc = render.main(["--in", str(SAMPLES / "fixed_n_working_set.csv"),
                      "--x", "lgk", "--series", "structure",
                      "--out", str(out)])
    assert rc == 0 and out.stat().st_size > 0


def test_fit_overlay_passes_through_points(tmp_path):
    with open(SAMPLES / "fit_k2.json") as f:
        spec = json.load(f)
    rows = render.read_rows(SAMPLES / "fine_k2.csv")
    import math
    for row in rows:
        rho = 2.0 * math.log2(row["n"]) / row["n"]
        [pred] = render.fit_curve(spec, [rho])
        assert abs(pred - row["avg_cost"]) < 0.35 * row["avg_cost"]


def test_empty_csv_no_rows(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text(HEADER)
    with pytest.raises(render.RenderError) as e:
        render.render(p, "lgn", "structure", tmp_path / "x.png")
    assert e.value.code == "no-rows"
    assert render.main(["--in", str(p), "--x", "lgn",
                        "--out", str(tmp_path / "x.png")]) == 2


def test_schema_mismatch(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(render.RenderError) as e:
        render.read_rows(p)
    assert e.value.code == "schema-mismatch"


def test_cli_as_script(tmp_path):
    out = tmp_path / "seq.png"
    proc = subprocess.run(
        [sys.executable, str(pathlib.Path(render.__file__)),
         "--in", str(SAMPLES / "sequential.csv"), "--x", "lglgn",
         "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert out.exists()
