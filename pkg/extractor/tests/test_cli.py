"""Command line behavior: flags, exit codes, files on disk."""

import json

from conftest import TWO_LEVEL_NODES, tree_json

from pairsort.fileio import parse_items_jsonl, parse_similarities
from pairsort_extractor.cli import main


def run(args):
    return main([str(a) for a in args])


def test_end_to_end_writes_scores_items_and_report(image_dir, tree_path, tmp_path, capsys):
    out = tmp_path / "similarities.json"
    items_out = tmp_path / "items.jsonl"
    code = run(
        ["--images", image_dir, "--tree", tree_path, "--out", out,
         "--backend", "hash", "--items-out", items_out]
    )
    assert code == 0
    assert "3 item(s), 0 skipped" in capsys.readouterr().out

    tau, similarities = parse_similarities(out.read_text(encoding="utf-8"))
    assert tau == 0.1
    assert set(similarities) == {"r", "g", "b"}
    items = parse_items_jsonl(items_out.read_text(encoding="utf-8"))
    assert sorted(it.id for it in items) == ["b", "g", "r"]
    assert json.loads((tmp_path / "similarities.json.report.json").read_text(encoding="utf-8"))


def test_tau_and_report_flags(image_dir, tree_path, tmp_path):
    out = tmp_path / "similarities.json"
    report = tmp_path / "run-report.json"
    code = run(
        ["--images", image_dir, "--tree", tree_path, "--out", out,
         "--backend", "hash", "--tau", "0.25", "--report", report, "--quiet"]
    )
    assert code == 0
    assert json.loads(out.read_text(encoding="utf-8"))["tau"] == 0.25
    assert json.loads(report.read_text(encoding="utf-8"))["processed"]
    assert not (tmp_path / "similarities.json.report.json").exists()


def test_invalid_tree_exits_2(image_dir, tmp_path, capsys):
    tree = tmp_path / "tree.json"
    tree.write_text(tree_json(TWO_LEVEL_NODES[:2]), encoding="utf-8")
    code = run(["--images", image_dir, "--tree", tree, "--out", tmp_path / "s.json"])
    assert code == 2
    assert "sibling" in capsys.readouterr().err


def test_missing_image_directory_exits_2(tree_path, tmp_path, capsys):
    code = run(
        ["--images", tmp_path / "nope", "--tree", tree_path,
         "--out", tmp_path / "s.json", "--backend", "hash"]
    )
    assert code == 2
    assert "does not exist" in capsys.readouterr().err


def test_hash_dim_flag_reaches_the_backend(image_dir, tree_path, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert run(["--images", image_dir, "--tree", tree_path, "--out", a,
                "--backend", "hash", "--hash-dim", "8"]) == 0
    assert run(["--images", image_dir, "--tree", tree_path, "--out", b,
                "--backend", "hash", "--hash-dim", "64"]) == 0
    assert a.read_text(encoding="utf-8") != b.read_text(encoding="utf-8")
