import json
import math
import subprocess
import sys

import numpy as np
import pytest

from covfun.bodies import Cone, LpBall, regular_polygon, square
from covfun.cli import main
from covfun.covering.constructions import base_slice_translates
from covfun.render import polygon_count

QUARTERS = [[0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5], [0.5, -0.5]]


def dump(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def files(tmp_path):
    return {
        "square": dump(tmp_path / "square.json", square().to_json()),
        "ball3": dump(tmp_path / "ball3.json", LpBall(2, 3).to_json()),
        "cone": dump(tmp_path / "cone.json", Cone(regular_polygon(6), [0, 0, 1]).to_json()),
        "cover": dump(tmp_path / "cover.json", {"r": 0.5 + 1e-6, "centers": QUARTERS}),
        "short": dump(tmp_path / "short.json", {"r": 0.49, "centers": QUARTERS}),
        "bad": dump(tmp_path / "bad.json", {"r": 0.5}),
        "dir": tmp_path,
    }


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_verify_exit_codes(capsys, files):
    code, rep = run(capsys, "verify", "--body", files["square"], "--config", files["cover"])
    assert code == 0 and rep["outcome"]["certificate"]["verdict"] == "covered"
    code, rep = run(capsys, "verify", "--body", files["square"], "--config", files["short"])
    assert code == 1 and rep["outcome"]["certificate"]["witness"] is not None
    # exact tangency sits in the margin band and never resolves
    tight = dump(files["dir"] / "tight.json", {"r": 0.5, "centers": QUARTERS})
    code, rep = run(capsys, "verify", "--body", files["square"], "--config", tight, "--depth", "6")
    assert code == 2 and rep["outcome"]["certificate"]["verdict"] == "unknown"


def test_usage_errors(capsys, files):
    assert main(["verify", "--body", files["square"], "--config", files["bad"]]) == 3
    assert main(["verify", "--body", str(files["dir"] / "missing.json"), "--config", files["cover"]]) == 3
    assert main(["nonsense"]) == 3
    assert main(["render", "--body", files["ball3"], "--config", files["cover"],
                 "--svg", str(files["dir"] / "x.svg")]) == 3
    capsys.readouterr()


def test_report_fields_and_determinism(capsys, files):
    _, a = run(capsys, "verify", "--body", files["square"], "--config", files["short"])
    _, b = run(capsys, "verify", "--body", files["square"], "--config", files["short"])
    assert set(a) == {"command", "inputs_digest", "outcome", "seed", "version", "wall_time"}
    a.pop("wall_time"), b.pop("wall_time")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_render_square(capsys, files):
    svg = files["dir"] / "sq.svg"
    code, _ = run(capsys, "render", "--body", files["square"], "--config", files["cover"], "--svg", str(svg))
    assert code == 0
    text = svg.read_text()
    assert polygon_count(text) == 5
    assert "<circle" not in text
    again = files["dir"] / "sq2.svg"
    run(capsys, "render", "--body", files["square"], "--config", files["cover"], "--svg", str(again))
    assert svg.read_bytes() == again.read_bytes()


def test_render_witness_marker(capsys, files):
    svg = files["dir"] / "w.svg"
    run(capsys, "render", "--body", files["square"], "--config", files["short"], "--svg", str(svg))
    assert 'fill="red"' in svg.read_text()


def test_render_hexagon_base_slice(capsys, files):
    C = Cone(regular_polygon(6), [0, 0, 1])
    hexfile = dump(files["dir"] / "hex.json", C.base.to_json())
    cfg = dump(files["dir"] / "slice.json", base_slice_translates(C).with_ratio(2 / 3 + 1e-6).to_json())
    svg = files["dir"] / "hex.svg"
    code, rep = run(capsys, "render", "--body", hexfile, "--config", cfg, "--svg", str(svg))
    assert code == 0 and rep["outcome"]["verdict"] == "covered"
    assert polygon_count(svg.read_text()) == 8


def test_render_slice_of_solid(capsys, files):
    cfg = dump(files["dir"] / "oct.json", {"r": 0.7, "centers": [[a, b, c] for a in (-0.3, 0.3)
                                                                  for b in (-0.3, 0.3) for c in (-0.3, 0.3)]})
    svg = files["dir"] / "ball.svg"
    code, _ = run(capsys, "render", "--body", files["ball3"], "--config", cfg, "--svg", str(svg),
                  "--slice", "z=0.1")
    assert code == 0 and polygon_count(svg.read_text()) >= 2


def test_gamma_command(capsys, files):
    code, rep = run(capsys, "gamma", "--body", files["square"], "-m", "4", "--budget-seconds", "10")
    assert code == 0 and rep["outcome"]["r_upper"] <= 0.501


def test_net_commands(capsys):
    _, rep = run(capsys, "net", "params", "-n", "3", "--beta", "0.1")
    assert rep["outcome"]["m"] == 210
    _, rep = run(capsys, "net", "cardinality", "-n", "3", "--beta", "0.1")
    assert rep["outcome"]["log10_bound"] == pytest.approx(1.2542e11, rel=1e-4)
    _, rep = run(capsys, "net", "caps", "-n", "2", "--theta", "2")
    assert rep["outcome"]["count"] == 6


def test_borsuk_commands(capsys, files):
    pts = dump(files["dir"] / "tri.json", {"points": [[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]]})
    _, rep = run(capsys, "borsuk", "phi", "--points", pts, "-m", "2")
    assert rep["outcome"]["r_ratio"] == 1.0
    _, rep = run(capsys, "borsuk", "reuleaux", "-k", "5")
    assert rep["outcome"]["diameter"] == pytest.approx(1.0)


def test_construct_and_tables_help(capsys, files):
    code, rep = run(capsys, "construct", "thm2", "-p", "inf")
    assert code == 0 and len(rep["outcome"]["centers"]) == 8
    code, rep = run(capsys, "construct", "thm1", "--body", files["cone"])
    assert code == 0 and len(rep["outcome"]["centers"]) == 8
    assert main(["construct", "thm1", "--body", files["square"]]) == 3
    capsys.readouterr()


def test_quiet_and_version(capsys, files):
    assert main(["--quiet", "verify", "--body", files["square"], "--config", files["cover"]]) == 0
    assert capsys.readouterr().out == ""
    assert main(["--version"]) == 0


def test_console_entry_point(files):
    out = subprocess.run([sys.executable, "-m", "covfun.cli", "net", "params", "-n", "2", "--beta", "0.2"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["outcome"]["m"] == 70
