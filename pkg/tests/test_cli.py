import json
import re
from pathlib import Path

import pytest
from click.testing import CliRunner

from treetype.cli import main
from treetype.planar import graphs_equal_up_to_rotation
from treetype.reporting import AnalysisConfig, ConfigError, run_analysis
from treetype.speiser import extend, triangulate_and_dualize
from treetype.textio import parse_graph, parse_tree, print_graph, print_tree, to_dot
from treetype.trees import BUILTIN_NAMES, builtin_family, generate


def test_text_roundtrip_tree():
    t = generate(builtin_family("caterpillar", tooth=2), 5)
    text = print_tree(t)
    g2, meta = parse_graph(text)
    assert graphs_equal_up_to_rotation(t.graph, g2)
    assert meta["root"] == 0
    assert sorted(meta["frontier"]) == sorted(t.frontier)
    # printing again is stable
    t2 = parse_tree(text)
    assert print_tree(t2) == text


def test_text_roundtrip_speiser():
    sp = triangulate_and_dualize(generate(builtin_family("sine"), 4))
    text = print_graph(sp.graph)
    g2, _ = parse_graph(text)
    assert graphs_equal_up_to_rotation(sp.graph, g2)
    assert print_graph(g2) == text


def test_text_roundtrip_extension():
    sp = triangulate_and_dualize(generate(builtin_family("sine"), 3))
    ext = extend(sp, None, h=2).to_rotation_graph()
    text = print_graph(ext, name="x")
    g2, _ = parse_graph(text)
    assert graphs_equal_up_to_rotation(ext, g2)


def test_parse_rejects_garbage():
    with pytest.raises(Exception):
        parse_graph("graph g 2\nv 0 [1]\nv 5 [0]\n")


def test_family_file():
    t = parse_tree("family homogeneous valence=3 depth=3\n")
    assert t.vertex_count == 1 + 3 + 6 + 12


def test_dot_output_shapes():
    sp = triangulate_and_dualize(generate(builtin_family("star", rays=3), 1))
    dot = to_dot(sp.graph)
    assert "shape=circle" in dot and "shape=diamond" in dot
    assert dot.count(" -- ") == sp.graph.edge_count


def test_gallery_cli(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["gallery", "sine", "--depth", "5",
                               "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    files = sorted(p.name for p in tmp_path.iterdir())
    assert "sine_d5_tree.txt" in files
    assert "sine_d5_speiser.txt" in files
    assert "sine_d5_gamma_inf.txt" in files
    assert "sine_d5_tree.dot" in files
    # emitted files parse back
    g, meta = parse_graph((tmp_path / "sine_d5_speiser.txt").read_text())
    assert g.vertex_count == 20


def test_gallery_unknown_family():
    runner = CliRunner()
    res = runner.invoke(main, ["gallery", "nope"])
    assert res.exit_code != 0


def test_analyze_cli_sine(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, [
        "analyze", "sine", "--depth-schedule", "4,8,16,32",
        "--criteria", "tuc,ramified,dm", "--out", str(tmp_path),
        "--no-emit-png",
    ])
    assert res.exit_code == 0, res.output
    assert "true form exists" in res.output
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["body"]["tuc"]["pass"] is True
    assert report["body"]["verdicts"]["dm"]["verdict"] == "parabolic-evidence"
    traces = list((tmp_path / "traces").glob("*.csv"))
    assert traces


def test_analyze_cli_homogeneous_banner(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, [
        "analyze", "homogeneous", "--valence", "3",
        "--depth-schedule", "4,6,8", "--criteria", "tuc,ramified,dm",
        "--out", str(tmp_path), "--no-emit-png",
    ])
    assert res.exit_code == 0, res.output
    assert "no true form" in res.output
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["body"]["verdicts"]["ramified"]["verdict"] == "hyperbolic-evidence"


def test_analyze_family_file(tmp_path):
    fam_file = tmp_path / "fam.txt"
    fam_file.write_text("family caterpillar tooth=2\n")
    runner = CliRunner()
    res = runner.invoke(main, [
        "analyze", str(fam_file), "--depth-schedule", "4,8,16",
        "--criteria", "tuc,ramified", "--out", str(tmp_path / "out"),
        "--no-emit-png",
    ])
    assert res.exit_code == 0, res.output
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["body"]["tuc"]["pass"] is True
    assert report["body"]["config"]["family"] == "caterpillar"


def test_analyze_rejects_bad_schedule():
    runner = CliRunner()
    res = runner.invoke(main, ["analyze", "sine", "--depth-schedule", "8,8"])
    assert res.exit_code != 0


def test_export_cli(tmp_path):
    runner = CliRunner()
    runner.invoke(main, ["gallery", "sine", "--depth", "4",
                         "--out", str(tmp_path)])
    src = tmp_path / "sine_d4_tree.txt"
    res = runner.invoke(main, ["export", str(src), "--format", "dot"])
    assert res.exit_code == 0
    assert "graph" in res.output and "--" in res.output
    # text -> text is an identity on the emitted gallery files
    res2 = runner.invoke(main, ["export", str(src), "--format", "text"])
    assert res2.exit_code == 0
    g1, _ = parse_graph(src.read_text())
    g2, _ = parse_graph(res2.output)
    assert graphs_equal_up_to_rotation(g1, g2)


def test_export_csv_trace(tmp_path):
    runner = CliRunner()
    runner.invoke(main, ["analyze", "sine", "--depth-schedule", "4,8,16",
                         "--criteria", "dm", "--out", str(tmp_path),
                         "--no-emit-png"])
    res = runner.invoke(main, ["export", str(tmp_path / "report.json"),
                               "--format", "csv-trace"])
    assert res.exit_code == 0
    lines = res.output.strip().splitlines()
    assert lines[0] == "criterion,index,value"
    assert any(line.startswith("dm,") for line in lines[1:])


def test_run_analysis_determinism(tmp_path):
    cfg = AnalysisConfig(family="caterpillar", params={"tooth": 1},
                         depths=(4, 8, 16), criteria=("tuc", "ramified", "dm"),
                         seed=7)
    r1 = run_analysis(cfg)
    r2 = run_analysis(cfg)
    assert r1.body_text() == r2.body_text()
    j1 = json.loads(r1.to_json())["body"]
    j2 = json.loads(r2.to_json())["body"]
    assert j1 == j2


def test_figures_rendered(tmp_path):
    cfg = AnalysisConfig(family="sine", depths=(4, 8, 16),
                         criteria=("dm",))
    report = run_analysis(cfg)
    from treetype.reporting import write_report
    files = write_report(report, tmp_path, emit_csv=True, emit_png=True)
    pngs = [p for p in files if str(p).endswith(".png")]
    assert pngs
    for p in pngs:
        assert Path(p).stat().st_size > 500


def test_config_validation():
    with pytest.raises(ConfigError):
        AnalysisConfig(family="sine", depths=(8, 4))
    with pytest.raises(ConfigError):
        AnalysisConfig(family="sine", delta=-1)
    with pytest.raises(ConfigError):
        AnalysisConfig(family="sine", criteria=("bogus",))
