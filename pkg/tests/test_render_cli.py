import csv
import hashlib
import io
import json

import numpy as np
import pytest

from harmval import analysis as an
from harmval import render as rd
from harmval.catalog import CATALOG
from harmval.cli import build_parser, cli, parse_complex, parse_viewport
from harmval.preimage import RESIDUAL_TOL, residual_metric


def _run(capsys, *argv):
    code = cli(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_valence_color_palette():
    assert rd.valence_color(4) == rd.VALENCE_PALETTE[4]
    assert rd.valence_color("infinite") == rd.INFINITE_COLOR
    assert rd.valence_color(None) == rd.UNKNOWN_COLOR
    assert len(set(rd.VALENCE_PALETTE)) == len(rd.VALENCE_PALETTE)


def test_render_deterministic_and_legend():
    a = an.analyze(CATALOG["quadratic"].map)
    s1 = rd.figure(a, "image")
    assert s1 == rd.figure(a, "image") and s1.startswith("<?xml")
    layers = rd.image_layers(a)
    for l in layers:
        if not l.empty:
            assert rd.DEFAULT_STYLES[l.kind]["label"] in s1


@pytest.mark.parametrize("which", ["critical", "image", "range", "domain"])
def test_figures_render(which):
    a = an.analyze(CATALOG["cubic-star"].map)
    assert "<svg" in rd.figure(a, which)
    with pytest.raises(KeyError):
        rd.figure(a, "nope")


def test_render_errors():
    with pytest.raises(rd.RenderError, match="empty layer set"):
        rd.render([], rd.RenderSpec((-1, 1, -1, 1)))
    with pytest.raises(rd.RenderError, match="empty layer set"):
        rd.render([rd.Layer("critical")], rd.RenderSpec((-1, 1, -1, 1)))
    a = an.analyze(CATALOG["quadratic"].map)
    layers = rd.range_layers(a)
    with pytest.raises(rd.RenderError, match="viewport"):
        rd.render(layers, rd.RenderSpec((-5, 5, -5, 5)))


def test_parsers():
    assert parse_complex("1-2j") == 1 - 2j
    assert parse_complex("0.5+1i") == 0.5 + 1j
    assert parse_complex("3,-4") == 3 - 4j
    assert parse_viewport("-1,1,-2,2") == (-1, 1, -2, 2)
    import argparse

    with pytest.raises(argparse.ArgumentTypeError):
        parse_viewport("1,0,0,1")
    with pytest.raises(argparse.ArgumentTypeError):
        parse_complex("abc")


def test_cli_valence_examples(capsys):
    assert _run(capsys, "valence", "--function", "quadratic", "--target", "0.05+0i")[:2] == \
        (0, "4\n")
    # outside the deltoid on the left
    assert _run(capsys, "valence", "--function", "quadratic", "--target", "-0.05+0i")[:2] == \
        (0, "2\n")
    assert _run(capsys, "valence", "--function", "flatpoly", "--target", "0")[:2] == \
        (0, "infinite\n")


def test_cli_usage_errors(capsys):
    assert _run(capsys, "valence", "--function", "quadratic")[0] == 2
    assert _run(capsys, "valence", "--function", "nope", "--target", "0")[0] == 2
    assert _run(capsys, "valence", "--target", "0")[0] == 2
    assert _run(capsys, "no-such-command")[0] == 2
    assert _run(capsys, "verify", "no-such-suite")[0] == 2
    assert _run(capsys, "critset", "--function", "quadratic", "--grid", "4")[0] == 2


def test_cli_help_everywhere(capsys):
    assert _run(capsys, "--help")[0] == 0
    sub = build_parser()._subparsers._group_actions[0].choices
    assert set(sub) == {"eval", "preimages", "valence", "critset", "image", "cluster",
                        "partition", "verify", "render", "join-probe"}
    for name in sub:
        code, out, _ = _run(capsys, name, "--help")
        assert code == 0 and "--function" in out and "--format" in out


def test_cli_render_empty_is_analysis_failure(capsys):
    code, _, err = _run(capsys, "render", "--function", '{"p": [[0, 0], [1, 0]]}',
                        "--figure", "critical")
    assert code == 1 and "empty layer set" in err


def test_cli_render_byte_deterministic(tmp_path, capsys):
    digests = []
    for k in range(2):
        out = tmp_path / f"q{k}.svg"
        assert cli(["render", "--function", "quadratic", "--figure", "image", "--grid", "256",
                    "--out", str(out)]) == 0
        digests.append(hashlib.sha256(out.read_bytes()).hexdigest())
    assert digests[0] == digests[1]
    capsys.readouterr()


def test_cli_report_deterministic(capsys):
    a = _run(capsys, "partition", "--function", "quadratic", "--grid", "256", "--format", "report")
    b = _run(capsys, "partition", "--function", "quadratic", "--grid", "256", "--format", "report")
    assert a[0] == 0 and a[1] == b[1]
    rep = json.loads(a[1])
    assert len(rep["range_components"]) == 2


@pytest.mark.parametrize("name,target", [("cubic-twos", "0.3+0.2j"), ("quadratic", "0.1-0.05j"),
                                         ("cubic-star", "0.2,0.1")])
def test_cli_csv_round_trip(capsys, name, target):
    code, out, _ = _run(capsys, "preimages", "--function", name, "--target", target,
                        "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows
    z = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    w = parse_complex(target)
    assert np.all(residual_metric(CATALOG[name].map, z, w) < RESIDUAL_TOL)


def test_cli_eval_and_csv_decimals(capsys):
    code, out, _ = _run(capsys, "eval", "--function", "quadratic", "--point", "1i")
    assert code == 0
    header, row = out.strip().split("\n")
    assert header == "re,im,jacobian"
    vals = row.split(",")
    assert all(len(v.split(".")[1]) == 6 for v in vals)
    assert np.allclose([float(v) for v in vals], [-1, 2, 4])


def test_cli_verify_small(capsys):
    code, out, _ = _run(capsys, "verify", "wilmshurst", "--seed", "7", "--count", "5")
    assert code == 0 and "PASS" in out


def test_cli_join_probe(capsys):
    a = an.analyze(CATALOG["quadratic"].map, cell_n=256)
    bounded = [r.id for r in a.domain_components if r.bounded]
    code, out, _ = _run(capsys, "join-probe", "--function", "quadratic", "--grid", "256",
                        "--components", str(bounded[0]))
    assert code == 0 and "univalent" in out
    code, _, _ = _run(capsys, "join-probe", "--function", "quadratic", "--grid", "256",
                      "--components", f"{bounded[0]},{bounded[1]}")
    assert code in (1, 2)


def test_cli_out_file(tmp_path, capsys):
    p = tmp_path / "v.txt"
    assert cli(["valence", "--function", "quadratic", "--target", "0.3", "--out", str(p)]) == 0
    assert p.read_text() == "4\n"
    capsys.readouterr()
