import json
import os
import shutil
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reebforge.cli import main
from reebforge.complex import builtin, from_maximal_simplices, octahedron
from reebforge.errors import EmptyInput, InvalidSubcomplex, ParseError
from reebforge.io import (
    format_plf,
    format_scx,
    format_semialg,
    parse_plf,
    parse_scx,
    parse_semialg,
    plf_domain,
    read_plf,
    read_scx,
    read_subcomplex,
    write_scx,
)
from reebforge.plmap import PLMap
from reebforge.report import dumps

GOLDEN = Path(__file__).parent / "golden"
OCTA_HEIGHT = "# domain: octa.scx\n0 0\n1 1\n2 2/5\n3 3/5\n4 0.5\n5 1/2\n"
HEMISPHERE = "# upper cap is X\nambient 3\nsampler sphere 100\npoly\n1 0 0 1\n"


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name in ("rp2_6vertex", "torus_7vertex", "octahedron", "point", "boundary_simplex(3)"):
        fname = {"rp2_6vertex": "rp2.scx", "torus_7vertex": "torus.scx", "octahedron": "octa.scx",
                 "point": "point.scx", "boundary_simplex(3)": "s2.scx"}[name]
        write_scx(fname, builtin(name))
    Path("octa_height.plf").write_text(OCTA_HEIGHT)
    Path("hemisphere.sa").write_text(HEMISPHERE)
    Path("cycle.scx").write_text("0 1\n1 2\n0 2\n")
    return tmp_path


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


# formats -----------------------------------------------------------------------------


def test_scx_parse_and_errors():
    c = parse_scx("# comment\n0 1 2\n\n2 3 # trailing\n")
    assert c.maximal_simplices == ((0, 1, 2), (2, 3))
    with pytest.raises(ParseError) as info:
        parse_scx("0 1\n1 two\n", "x.scx")
    assert info.value.line == 2 and "x.scx:2" in str(info.value)
    with pytest.raises(ParseError):
        parse_scx("0 0 1\n")
    with pytest.raises(ParseError):
        parse_scx("-1 2\n")
    with pytest.raises(EmptyInput):
        parse_scx("# nothing\n")


@given(st.lists(st.lists(st.integers(0, 20), min_size=1, max_size=4, unique=True), min_size=1, max_size=10))
def test_scx_round_trip(facets):
    c = from_maximal_simplices(facets)
    assert parse_scx(format_scx(c, header="h")) == c


@given(st.lists(st.fractions(0, 1, max_denominator=50), min_size=6, max_size=6), st.permutations(range(6)))
@settings(max_examples=50)
def test_plf_round_trip(vals, perm):
    m = octahedron()
    f = PLMap(m, dict(enumerate(vals)), tuple(perm))
    text = format_plf(f, "octa.scx")
    assert plf_domain(text) == "octa.scx"
    assert parse_plf(text, m) == f


def test_plf_errors():
    m = octahedron()
    with pytest.raises(ParseError):
        parse_plf("0 1/0\n", m)
    with pytest.raises(ParseError):
        parse_plf("0 0\n0 1\n", m)
    with pytest.raises(ParseError):
        parse_plf("0 0 0\n1 1\n2 0\n3 0\n4 0\n5 0\n", m)
    f = parse_plf(OCTA_HEIGHT, m)
    assert f.values[4] == Fraction(1, 2)


def test_subcomplex_checked_against_parent(tmp_path):
    p = tmp_path / "x.scx"
    p.write_text("0 1 5\n")
    with pytest.raises(InvalidSubcomplex):
        read_subcomplex(p, octahedron())


def test_semialg_round_trip_and_errors():
    spec = parse_semialg(HEMISPHERE)
    assert parse_semialg(format_semialg(spec)) == spec
    with pytest.raises(ParseError) as info:
        parse_semialg("ambient 3\nsampler sphere 10\npoly\n1 0 1\n")
    assert info.value.line == 4
    with pytest.raises(ParseError):
        parse_semialg("ambient 3\nsampler klein 10\npoly\n1 0 0 1\n")
    with pytest.raises(ParseError):
        parse_semialg("ambient 3\npoly\n1 0 0 1\n")


def test_report_is_canonical():
    a = dumps({"b": 1, "a": [1, 2], "c": {"y": 1, "x": 2}})
    assert a == dumps({"c": {"x": 2, "y": 1}, "a": [1, 2], "b": 1})
    assert a.endswith("\n")


# CLI ---------------------------------------------------------------------------------


def test_cli_homology(work, capsys):
    code, out, _ = run(["homology", "rp2.scx", "--coeff", "z2"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["result"]["betti"] == [1, 1, 1]
    code, out, _ = run(["homology", "point.scx"], capsys)
    assert json.loads(out)["result"]["betti"] == [1]
    code, out, _ = run(["homology", "builtin:rp2_6vertex", "--coeff", "z"], capsys)
    assert json.loads(out)["result"]["torsion"][1] == [2]


def test_cli_parse_error_exit(work, capsys):
    Path("bad.scx").write_text("0 1 2\n3 x\n")
    code, out, err = run(["homology", "bad.scx"], capsys)
    assert code == 2 and "bad.scx:2" in err and out == ""


def test_cli_missing_file(work, capsys):
    code, _, err = run(["homology", "nope.scx"], capsys)
    assert code == 2


def test_cli_bad_flag_exits_2(work, capsys):
    with pytest.raises(SystemExit) as info:
        main(["duality", "torus.scx", "point.scx", "point.scx", "--coeff", "z7"])
    assert info.value.code == 2


def test_cli_duality(work, capsys):
    code, out, _ = run(["duality", "torus.scx", "point.scx", "point.scx", "--coeff", "q"], capsys)
    rep = json.loads(out)
    assert code == 1 and rep["result"]["violations"] == [[1, 2, 0, 0]]


def test_cli_verify(work, capsys):
    code, out, _ = run(["verify", "octa.scx", "octa_height.plf"], capsys)
    assert code == 0 and json.loads(out)["result"]["is_reeb"]
    code, out, _ = run(["verify", "octa.scx", "octa_height.plf", "point.scx", "--per-vertex"], capsys)
    rep = json.loads(out)["result"]
    assert rep["zero_set_matches_expected"] and len(rep["vertices"]) == 6


def test_cli_reeb_build_and_round_trip(work, capsys):
    code, out, _ = run(["reeb-build", "s2.scx", "point.scx", "--out-prefix", "s2_reeb"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["pass"]
    assert rep["result"]["verify"]["critical_values"] == ["0", "1"]
    mm = read_scx("s2_reeb.scx")
    f = read_plf("s2_reeb.plf", mm)
    assert plf_domain(Path("s2_reeb.plf").read_text()) == "s2_reeb.scx"
    assert parse_plf(format_plf(f), mm) == f
    assert parse_scx(format_scx(mm)) == mm
    code, out, _ = run(["verify", "s2_reeb.scx", "s2_reeb.plf", "s2_reeb.x0.scx"], capsys)
    assert code == 0 and json.loads(out)["result"]["is_reeb"]


def test_cli_reeb_build_torus_cycle(work, capsys):
    code, out, _ = run(["reeb-build", "torus.scx", "cycle.scx"], capsys)
    rep = json.loads(out)["result"]
    assert code == 0 and rep["duality"]["z2"]["pass"] and rep["duality"]["q"]["pass"]


def test_cli_reeb_build_three_sphere_heegaard(work, capsys):
    write_scx("s3.scx", builtin("boundary_simplex(4)"))
    code, out, _ = run(["reeb-build", "s3.scx", "point.scx"], capsys)
    rep = json.loads(out)["result"]
    assert code == 0 and rep["heegaard"]["genus_bound"] == 0


def test_cli_reeb_build_x_equals_m(work, capsys):
    code, _, err = run(["reeb-build", "s2.scx", "s2.scx"], capsys)
    assert code == 2 and "proper" in err


def test_cli_retries_exhausted(work, capsys):
    code, out, err = run(["reeb-build", "torus.scx", "cycle.scx", "--scheme", "distance", "--max-retries", "0"],
                         capsys)
    assert code == 3
    assert json.loads(out)["result"]["error"] == "RetriesExhausted"


def test_cli_flatfn(work, capsys):
    code, out, _ = run(["flatfn", "--ck", "2^-k", "--K", "8", "--check", "4", "--csv", "g.csv"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["result"]["checks"][0]["pass"]
    lines = Path("g.csv").read_text().splitlines()
    assert lines[0] == "t,gamma_0,gamma_1,gamma_2,gamma_3" and len(lines) == 202


def test_cli_flatfn_infeasible(work, capsys):
    code, _, err = run(["flatfn", "--ck", "1,1/2,1/4", "--K", "2"], capsys)
    assert code == 2 and "InfeasibleSequence" in err


def test_cli_semialg(work, capsys):
    code, out, _ = run(["semialg", "hemisphere.sa", "--delta", "0.01", "--csv", "h.csv"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["result"]["min_projected_gradient_norm"] > 1e-8
    assert Path("h.csv").read_text().splitlines()[0] == "x1,x2,x3,f,proj_grad_norm"


def test_cli_report_file_is_atomic_and_stable(work, capsys):
    code, out, _ = run(["homology", "torus.scx", "--report", "r1.json"], capsys)
    assert out == "" and code == 0
    run(["homology", "torus.scx", "--report", "r2.json"], capsys)
    assert Path("r1.json").read_bytes() == Path("r2.json").read_bytes()
    assert not [p for p in os.listdir(".") if p.startswith(".r1.json")]


@pytest.mark.parametrize("name,argv", [
    ("homology_rp2_z2", ["homology", "rp2.scx", "--coeff", "z2"]),
    ("duality_torus_q", ["duality", "torus.scx", "point.scx", "point.scx", "--coeff", "q"]),
    ("verify_octa", ["verify", "octa.scx", "octa_height.plf", "--per-vertex"]),
])
def test_cli_golden(work, capsys, name, argv):
    code, out, _ = run(argv, capsys)
    golden = GOLDEN / f"{name}.json"
    if os.environ.get("REEBFORGE_REGEN_GOLDEN"):
        golden.parent.mkdir(exist_ok=True)
        golden.write_text(out)
    assert out == golden.read_text()


def test_console_entry_point(work):
    exe = shutil.which("reebforge")
    cmd = [exe] if exe else [sys.executable, "-m", "reebforge"]
    proc = subprocess.run(cmd + ["homology", "point.scx"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["result"]["betti"] == [1]
