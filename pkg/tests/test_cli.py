"""Command line entry points: exit codes, outputs, file side effects."""

import json

import pytest

from helpers import dataset_texts
from pairsort.cli import main
from pairsort.config import SessionConfig
from pairsort.session import SessionStore
from pairsort.simulator import OracleConfig, SimulatedAnnotator


@pytest.fixture()
def dataset_files(tmp_path):
    items_text, sims_text = dataset_texts(10, seed=0)
    items = tmp_path / "items.jsonl"
    sims = tmp_path / "similarities.json"
    items.write_text(items_text)
    sims.write_text(sims_text)
    return items, sims


def test_bench_writes_report_and_csv(tmp_path, capsys):
    out = tmp_path / "report.json"
    csv_path = tmp_path / "per_seed.csv"
    code = main(
        [
            "bench",
            "--n", "8",
            "--seeds", "2",
            "--out", str(out),
            "--csv", str(csv_path),
        ]
    )
    assert code == 0
    printed = capsys.readouterr().out
    assert "human fraction" in printed

    report = json.loads(out.read_text())
    assert report["n"] == 8
    assert report["seeds_used"] == [0, 1]
    assert len(report["per_seed"]) == 2
    assert csv_path.read_text().startswith("seed,")


def test_bench_json_stdout_round_trips(capsys):
    assert main(["bench", "--n", "6", "--seeds", "2", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["n"] == 6
    assert report["worst_case_count"] == 11  # 6*3 - 8 + 1


def test_bench_rejects_bad_flags():
    assert main(["bench", "--n", "6", "--seeds", "0"]) == 2  # no seeds
    assert main(["bench", "--n", "6", "--seeds", "2", "--epsilon", "0.7"]) == 2


def test_preorder_table_and_json(dataset_files, capsys):
    items, sims = dataset_files
    code = main(["preorder", "--items", str(items), "--similarities", str(sims)])
    assert code == 0
    table = capsys.readouterr().out
    assert "bucket histogram:" in table
    assert "item_000" in table

    code = main(["preorder", "--items", str(items), "--similarities", str(sims), "--json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["tau"] == 0.1
    assert len(payload["items"]) == 10
    row = payload["items"][0]
    assert set(row) == {"id", "group_index", "bucket", "confidence", "rating", "depth"}


def test_preorder_missing_file_is_usage_error(tmp_path, capsys):
    sims = tmp_path / "sims.json"
    sims.write_text('{"tau": 0.1, "items": {}}')
    code = main(["preorder", "--items", str(tmp_path / "absent.jsonl"), "--similarities", str(sims)])
    assert code == 2
    assert "error" in capsys.readouterr().err.lower()


def test_preorder_mismatched_inputs_fail(dataset_files, tmp_path, capsys):
    items, _ = dataset_files
    sims = tmp_path / "other.json"
    sims.write_text('{"tau": 0.1, "items": {"stranger": {"levels": [[0.1, 0.2]]}}}')
    assert main(["preorder", "--items", str(items), "--similarities", str(sims)]) == 2


def test_simulate_summary_and_json(capsys):
    code = main(["simulate", "--n", "12", "--run-seed", "3"])
    assert code == 0
    text = capsys.readouterr().out
    assert "human judgments" in text
    assert "ranking (best first):" in text

    code = main(["simulate", "--n", "12", "--run-seed", "3", "--json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["n"] == 12
    assert payload["human_count"] + payload["auto_count"] > 0
    assert len(payload["ranking"]) == 12
    assert payload["spearman"] == 1.0  # default epsilon and rho are zero


def test_simulate_huge_theta_goes_fully_automatic(capsys):
    code = main(["simulate", "--n", "16", "--theta0", "1e9", "--json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["human_count"] == 0
    assert payload["auto_count"] > 0
    assert payload["human_fraction"] == 0.0


def test_export_roundtrip(tmp_path, capsys):
    data_dir = tmp_path / "store"
    store = SessionStore(data_dir)
    items_text, sims_text = dataset_texts(6, seed=2)
    from pairsort.fileio import parse_items_jsonl, parse_similarities

    items = parse_items_jsonl(items_text)
    tau, sims = parse_similarities(sims_text)
    session = store.create(SessionConfig(), items, tau, sims, session_id="exportme")
    ann = SimulatedAnnotator({it.id: it.ground_truth for it in items}, OracleConfig())
    while (req := session.get_next()) is not None:
        session.submit_judgment(req.request_id, ann.answer(req.left, req.right))
    store.flush(session)

    out = tmp_path / "bundle.json"
    code = main(
        ["export", "--data-dir", str(data_dir), "--session-id", "exportme", "--out", str(out)]
    )
    assert code == 0
    assert "wrote" in capsys.readouterr().out
    bundle = json.loads(out.read_text())
    assert bundle["format"] == "pairsort-session-export"
    assert bundle["bundle"]["session_id"] == "exportme"

    # stdout variant emits the same JSON document
    code = main(["export", "--data-dir", str(data_dir), "--session-id", "exportme"])
    assert code == 0
    assert json.loads(capsys.readouterr().out) == bundle


def test_export_unknown_session_is_usage_error(tmp_path, capsys):
    code = main(["export", "--data-dir", str(tmp_path), "--session-id", "ghost"])
    assert code == 2
    assert "unknown session" in capsys.readouterr().err


def test_serve_refuses_occupied_port(tmp_path, capsys):
    import socket

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    try:
        code = main(
            ["serve", "--data-dir", str(tmp_path), "--host", "127.0.0.1", "--port", str(port)]
        )
    finally:
        sock.close()
    assert code == 1
    assert "cannot bind" in capsys.readouterr().err


def test_usage_errors_exit_two(capsys):
    assert main([]) == 2
    assert main(["no-such-command"]) == 2
    assert main(["preorder"]) == 2  # missing required flags
    capsys.readouterr()


def test_invalid_session_flags_exit_two(dataset_files):
    items, sims = dataset_files
    args = ["preorder", "--items", str(items), "--similarities", str(sims)]
    assert main(args + ["--buckets", "0"]) == 2
    assert main(args + ["--exponent-mode", "sideways"]) == 2
