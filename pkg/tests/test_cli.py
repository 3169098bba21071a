import json
from pathlib import Path

import pytest

from emlang.cli import main


def run(argv, capsys=None):
    code = main([str(a) for a in argv])
    return code


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """One small end-to-end pipeline run shared by the CLI tests."""
    root = tmp_path_factory.mktemp("cli")
    lex_path = root / "lexicon.json"
    data_dir = root / "data"
    assert run(
        ["gen-lexicon", "--style", "mixed", "--seed", "3",
         "--num-points", "60", "--out", lex_path]
    ) == 0
    assert run(
        ["gen-data", "--seed", "11", "--num-points", "60",
         "--sizes", "4000,400,400", "--lexicon", lex_path, "--out", data_dir]
    ) == 0
    analysis = root / "analysis.json"
    assert run(
        ["analyze", "--corpus", data_dir / "train.jsonl",
         "--config", data_dir / "config.json",
         "--tc", "0.5", "--tn", "1", "--out", analysis]
    ) == 0
    dictionary = root / "dictionary.json"
    assert run(
        ["extract-dict", "--analysis", analysis, "--tc", "0.5", "--tn", "1",
         "--tc-referent", "0.3", "--out", dictionary]
    ) == 0
    return root, lex_path, data_dir, analysis, dictionary


class TestPipeline:
    def test_outputs_exist(self, workspace):
        root, lex_path, data_dir, analysis, dictionary = workspace
        for name in ("train.jsonl", "validation.jsonl", "test.jsonl", "config.json"):
            assert (data_dir / name).exists()
        assert json.loads((data_dir / "config.json").read_text())["num_points"] == 60
        assert analysis.exists() and dictionary.exists()

    def test_split_sizes(self, workspace):
        _, _, data_dir, _, _ = workspace
        assert len((data_dir / "train.jsonl").read_text().splitlines()) == 4000
        assert len((data_dir / "test.jsonl").read_text().splitlines()) == 400

    def test_eval_oracle(self, workspace, capsys):
        root, lex_path, _, _, dictionary = workspace
        code = run(
            ["eval", "--dictionary", dictionary, "--mode", "nc-positional",
             "--n", "200", "--seed", "1", "--receiver", "oracle",
             "--lexicon", lex_path, "--num-points", "60", "--json"]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert payload["accuracy"] == 1.0

    def test_eval_comp_separation(self, workspace, capsys):
        root, lex_path, _, _, dictionary = workspace
        accuracies = {}
        for mode in ("comp-p", "comp-np"):
            assert run(
                ["eval", "--dictionary", dictionary, "--mode", mode,
                 "--n", "200", "--seed", "2", "--receiver", "oracle",
                 "--lexicon", lex_path, "--num-points", "60", "--json"]
            ) == 0
            out = capsys.readouterr().out.strip().splitlines()[-1]
            accuracies[mode] = json.loads(out)["accuracy"]
        assert accuracies["comp-p"] > 0.9
        assert accuracies["comp-np"] <= 0.25

    def test_eval_writes_exchange_file(self, workspace, tmp_path):
        root, lex_path, _, _, dictionary = workspace
        eval_out = tmp_path / "eval.jsonl"
        assert run(
            ["eval", "--dictionary", dictionary, "--mode", "nc-integer",
             "--n", "50", "--seed", "3", "--receiver", "null",
             "--num-points", "60", "--eval-out", eval_out]
        ) == 0
        lines = eval_out.read_text().splitlines()
        assert len(lines) == 50
        assert "expected_message" in json.loads(lines[0])

    def test_grid_search_and_report(self, workspace, tmp_path, capsys):
        root, lex_path, data_dir, _, _ = workspace
        grid_out = tmp_path / "grid.json"
        assert run(
            ["grid-search", "--corpus", data_dir / "test.jsonl",
             "--config", data_dir / "config.json",
             "--tc-grid", "0.4,0.6", "--tn-grid", "1", "--tcr-grid", "0.3",
             "--eval-n", "50", "--seed", "4", "--receiver", "oracle",
             "--lexicon", lex_path, "--out", grid_out]
        ) == 0
        rows = json.loads(grid_out.read_text())["rows"]
        assert len(rows) == 2 * 1 * 1 * 4
        report_out = tmp_path / "report.json"
        assert run(
            ["report", "--grid", grid_out, "--grid", grid_out,
             "--out", report_out]
        ) == 0
        data = json.loads(report_out.read_text())
        assert data["modes"]["nc-positional"]["runs"] == 2
        assert data["modes"]["nc-positional"]["sigma"] == 0.0


class TestDeterminism:
    def test_gen_data_byte_identical(self, tmp_path):
        lex = tmp_path / "lex.json"
        run(["gen-lexicon", "--style", "nc", "--seed", "5",
             "--num-points", "20", "--out", lex])
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        for out in (out_a, out_b):
            assert run(
                ["gen-data", "--seed", "7", "--num-points", "20",
                 "--sizes", "300,50,50", "--lexicon", lex, "--out", out]
            ) == 0
        for name in ("train.jsonl", "validation.jsonl", "test.jsonl", "config.json"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_lexicon_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(["gen-lexicon", "--style", "comp", "--seed", "5", "--out", a])
        run(["gen-lexicon", "--style", "comp", "--seed", "5", "--out", b])
        assert a.read_bytes() == b.read_bytes()


class TestErrors:
    def test_missing_corpus_file(self, tmp_path):
        assert run(
            ["analyze", "--corpus", tmp_path / "nope.jsonl",
             "--out", tmp_path / "x.json"]
        ) == 2

    def test_empty_corpus_is_error_exit(self, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        assert run(
            ["analyze", "--corpus", empty, "--out", tmp_path / "x.json"]
        ) == 2

    def test_eval_without_lexicon_for_oracle(self, workspace, tmp_path):
        *_, dictionary = workspace
        assert run(
            ["eval", "--dictionary", dictionary, "--mode", "nc-positional",
             "--receiver", "oracle", "--num-points", "60"]
        ) == 2

    def test_bad_config_value(self, tmp_path):
        cfg = tmp_path / "config.json"
        cfg.write_text(json.dumps({"num_points": 3}))
        assert run(
            ["gen-data", "--seed", "1", "--config", cfg,
             "--sizes", "10,5,5", "--out", tmp_path / "out"]
        ) == 2
