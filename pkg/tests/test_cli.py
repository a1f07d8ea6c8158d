import xml.etree.ElementTree as ET

import numpy as np
import pytest

from spherical_laguerre.cli import main
from spherical_laguerre.diagram import parse_gen, serialize_gen
from spherical_laguerre.tessellation import parse_tes, serialize_tes

from conftest import bounded_diagram


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture()
def gen_file(tmp_path):
    gens, _ = bounded_diagram(20, tag=51)
    path = tmp_path / "gens.gen"
    path.write_text(serialize_gen(gens))
    return path


@pytest.fixture()
def tes_file(tmp_path, gen_file):
    path = tmp_path / "diagram.tes"
    assert run("construct", gen_file, "--out", path) == 0
    return path


def test_generate_deterministic(tmp_path):
    a, b = tmp_path / "a.gen", tmp_path / "b.gen"
    assert run("generate", 4, "--rng-seed", 1, "--out", a) == 0
    assert run("generate", 4, "--rng-seed", 1, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()


def test_generate_format_and_bounds(tmp_path):
    path = tmp_path / "fifty.gen"
    assert run("generate", 50, "--rng-seed", 7, "--out", path) == 0
    lines = [l for l in path.read_text().splitlines() if l.startswith("c ")]
    assert len(lines) == 50
    gens = parse_gen(path.read_text())
    assert gens.radii().min() >= 0.05 and gens.radii().max() <= 0.45


def test_generate_rejects_small_n(tmp_path, capsys):
    assert run("generate", 3, "--out", tmp_path / "x.gen") == 2
    assert "at least 4" in capsys.readouterr().err


def test_generated_file_constructs(tmp_path):
    gen = tmp_path / "g.gen"
    tes = tmp_path / "t.tes"
    assert run("generate", 50, "--rng-seed", 7, "--out", gen) == 0
    assert run("construct", gen, "--out", tes) == 0
    assert parse_tes(tes.read_text()).validate().ok


def test_construct_reports_dropped(tmp_path, capsys):
    gen = tmp_path / "g.gen"
    assert run("generate", 60, "--rng-seed", 3, "--out", gen) == 0
    tes = tmp_path / "t.tes"
    assert run("construct", gen, "--out", tes) == 0
    out = capsys.readouterr().out
    assert "dropped generators" in out


def test_construct_off_dump(tmp_path, gen_file):
    tes = tmp_path / "t.tes"
    off = tmp_path / "p.off"
    assert run("construct", gen_file, "--out", tes, "--off", off) == 0
    assert off.read_text().startswith("OFF\n")


def test_recognize_true_round_trip(tmp_path, tes_file, capsys):
    out_gen = tmp_path / "recovered.gen"
    assert run("recognize", tes_file, "--out", out_gen) == 0
    assert "true" in capsys.readouterr().out
    recovered = parse_gen(out_gen.read_text())
    tes2 = tmp_path / "again.tes"
    assert run("construct", tmp_path / "recovered.gen", "--out", tes2) == 0


def test_recognize_perturbed_false(tmp_path, tes_file, capsys):
    bad = tmp_path / "bad.tes"
    code = 1
    for seed in range(10):
        if run("perturb", tes_file, 1e-3, "--rng-seed", seed, "--out", bad) != 0:
            continue
        capsys.readouterr()
        code = run("recognize", bad, "--eps-rec", 1e-6)
        if code != 2:
            break
    assert code == 1
    assert "witness" in capsys.readouterr().out


def test_recognize_subtolerance_perturbation_true(tmp_path, tes_file):
    tiny = tmp_path / "tiny.tes"
    assert run("perturb", tes_file, 1e-12, "--rng-seed", 0, "--out", tiny) == 0
    assert run("recognize", tiny, "--eps-rec", 1e-6) == 0


def test_recognize_degree4_exit_2(tmp_path, capsys):
    import math
    from spherical_laguerre.sphere import normalize
    from spherical_laguerre.tessellation import Tessellation
    apex = np.array([0.0, 0.0, 1.0])
    ring = [normalize([math.cos(a), math.sin(a), -0.5])
            for a in np.linspace(0.0, 2 * math.pi, 4, endpoint=False)]
    t = Tessellation([apex] + ring,
                     [[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 1], [1, 4, 3, 2]])
    path = tmp_path / "pyramid.tes"
    path.write_text(serialize_tes(t))
    assert run("recognize", path) == 2
    assert "invalid" in capsys.readouterr().err


def test_recognize_unparseable_exit_2(tmp_path, capsys):
    path = tmp_path / "junk.tes"
    path.write_text("V x\n")
    assert run("recognize", path) == 2


def test_perturb_rejects_zero_magnitude(tes_file, tmp_path):
    assert run("perturb", tes_file, 0.0, "--out", tmp_path / "x.tes") == 2


def test_perturb_deterministic_and_annotated(tmp_path, tes_file, capsys):
    a, b = tmp_path / "a.tes", tmp_path / "b.tes"
    assert run("perturb", tes_file, 1e-3, "--rng-seed", 5, "--out", a) == 0
    assert run("perturb", tes_file, 1e-3, "--rng-seed", 5, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()
    assert "perturbed vertex" in capsys.readouterr().out
    assert a.read_text().startswith("# perturbed vertex")


def test_render_tetra(tmp_path, tetra_diagram):
    _, fw = tetra_diagram
    tes = tmp_path / "tetra.tes"
    tes.write_text(serialize_tes(fw.tessellation))
    svg = tmp_path / "tetra.svg"
    assert run("render", tes, "--out", svg) == 0
    root = ET.fromstring(svg.read_text())
    assert root.tag.endswith("svg")
    polylines = [e for e in root.iter() if e.tag.endswith("polyline")]
    assert len(polylines) >= 6


def test_render_with_generators_wellformed_and_deterministic(tmp_path, gen_file, tes_file):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert run("render", tes_file, gen_file, "--out", a) == 0
    assert run("render", tes_file, gen_file, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()
    ET.fromstring(a.read_text())


def test_render_unparseable_exit_2(tmp_path):
    path = tmp_path / "junk.tes"
    path.write_text("not a tes file\n")
    assert run("render", path, "--out", tmp_path / "x.svg") == 2


def test_bench_smoke(tmp_path):
    csv = tmp_path / "bench.csv"
    assert run("bench", "--sizes", 16, "--trials", 2, "--rng-seed", 1, "--out", csv) == 0
    lines = csv.read_text().strip().splitlines()
    assert lines[0] == "n,construct_ms,propagate_ms,verify_ms"
    assert lines[1].startswith("16,")


def test_oracle_check_cube(tmp_path, cube_diagram, capsys):
    gens, _ = cube_diagram
    path = tmp_path / "cube.gen"
    path.write_text(serialize_gen(gens))
    assert run("oracle-check", path, "--samples", 100000, "--rng-seed", 2) == 0
    assert "mismatches=0" in capsys.readouterr().out


def test_oracle_check_random(tmp_path, gen_file):
    assert run("oracle-check", gen_file, "--samples", 50000, "--rng-seed", 3) == 0


def test_oracle_check_malformed_exit_2(tmp_path):
    path = tmp_path / "bad.gen"
    path.write_text("c 1 0 0\n")
    assert run("oracle-check", path) == 2
