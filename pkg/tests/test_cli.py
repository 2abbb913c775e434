import json

from click.testing import CliRunner

from pvlens.cli import main
from tests.test_pipeline import label_xml


def test_run_and_export(tmp_path, term_dir):
    labels = tmp_path / "labels"
    labels.mkdir()
    (labels / "g1.xml").write_text(label_xml("G1", "severe headache and rash"))
    repo = tmp_path / "repo.db"
    runner = CliRunner()
    result = runner.invoke(
        main,
        [
            "run",
            "--input", str(labels),
            "--terms", str(term_dir),
            "--repo", str(repo),
            "--stopwords", str(term_dir / "stopwords.txt"),
            "--run-date", "2025-01-01",
        ],
    )
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert report["labels_processed"] == 1
    assert report["merge"]["inserted"] == 2

    result = runner.invoke(main, ["export", "--repo", str(repo), "--format", "csv"])
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert len(lines) == 3  # header + 2 events
    assert "2025-01-01" in lines[1]


def test_export_missing_repo_is_config_error(tmp_path):
    result = CliRunner().invoke(main, ["export", "--repo", str(tmp_path / "none.db")])
    assert result.exit_code == 2


def test_match_debug_output(term_dir):
    result = CliRunner().invoke(
        main,
        ["match", "--text", "severe headache and rash", "--terms", str(term_dir)],
    )
    assert result.exit_code == 0, result.output
    rows = [json.loads(l) for l in result.output.splitlines()]
    assert [(r["pt_code"], r["span"]) for r in rows] == [("P2", [0, 15]), ("P3", [20, 24])]


def test_bench_smoke():
    result = CliRunner().invoke(main, ["bench", "--count", "30", "--workers", "2"])
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert report["labels"] == 30
    assert report["labels_per_second"] > 0
