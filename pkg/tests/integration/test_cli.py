"""
Integration tests for the command-line interface.

Commands are invoked through main(argv) with the tiny configuration file,
so every test trains at most one small recognizer.

Tests cover:
- Subcommands writing their tables, artifacts and resolved configuration
- JSON lines on stdout
- Exit codes for usage, configuration and file errors
"""

import json
from pathlib import Path

import pytest

from cli.commands.sweep import SWEEPS
from core.exceptions import EXIT_BAD_FILE, EXIT_INVALID_INPUT, EXIT_NOT_FOUND, EXIT_USAGE
from main import main
from models import Nfa
from repositories import AutomatonRepository
from schemas import SweepKind
from services.language_service import gold_dfa


def lines(capsys: pytest.CaptureFixture[str]) -> list[dict]:
    return [json.loads(line) for line in capsys.readouterr().out.splitlines() if line.strip()]


def common(config: Path, out: Path) -> list[str]:
    return ["--config", str(config), "--out", str(out), "--log-level", "WARNING"]


class TestTrainCommand:
    """Tests for `train`."""

    def test_train(self, tiny_config_file: Path, tmp_path: Path, capsys) -> None:
        out = tmp_path / "cli"
        assert main(["train", *common(tiny_config_file, out)]) == 0
        (record,) = lines(capsys)
        assert (record["language"], record["seed"]) == (1, 0)
        assert 0 <= record["best_epoch"] <= 2
        assert (out / "checkpoints" / "tomita1" / "seed0" / "epoch002.ckpt").is_file()
        resolved = json.loads((out / "checkpoints" / "resolved_config.json").read_text(encoding="utf-8"))
        assert resolved["output_dir"] == str(out)
        assert resolved["training"]["epochs"] == 2

    def test_epochs_flag(self, tiny_config_file: Path, tmp_path: Path, capsys) -> None:
        out = tmp_path / "cli"
        assert main(["train", *common(tiny_config_file, out), "--epochs", "1"]) == 0
        assert not (out / "checkpoints" / "tomita1" / "seed0" / "epoch002.ckpt").exists()


class TestExtractionCommands:
    """Tests for `extract`, `baseline`, `eval` and `table2`."""

    def test_extract(self, tiny_config_file: Path, tmp_path: Path, capsys) -> None:
        out = tmp_path / "cli"
        code = main(["extract", *common(tiny_config_file, out), "--kappa", "0.05", "--data", "6"])
        assert code == 0
        (row,) = lines(capsys)
        assert row["method"] == "state_merging"
        assert row["kappa"] == 0.05
        assert row["data_count"] == 6
        artifacts = out / "automata" / "extract" / "tomita1" / "seed0" / "state_merging"
        assert (artifacts / "final.dfa").is_file()
        assert (artifacts / "merged.dot").is_file()
        assert (out / "extract" / "results.csv").is_file()
        assert (out / "extract" / "resolved_config.json").is_file()

    def test_baseline(self, tiny_config_file: Path, tmp_path: Path, capsys) -> None:
        out = tmp_path / "cli"
        assert main(["baseline", *common(tiny_config_file, out), "--k", "3"]) == 0
        (row,) = lines(capsys)
        assert row["method"] == "kmeans"
        assert row["kappa"] is None
        assert row["merged_size"] <= 3

    def test_eval_with_dfa(self, tiny_config_file: Path, tmp_path: Path, capsys) -> None:
        out = tmp_path / "cli"
        dfa_path = AutomatonRepository(tmp_path).save(gold_dfa(1), "gold1")
        assert main(["eval", *common(tiny_config_file, out), "--dfa", str(dfa_path), "--epoch", "1"]) == 0
        (summary,) = lines(capsys)
        assert summary["epoch"] == 1
        assert summary["dfa_accuracy_gold"] == 1.0
        assert (out / "eval" / "tomita1_seed0_epoch001.json").is_file()

    def test_table2(self, tiny_config_file: Path, tmp_path: Path, capsys) -> None:
        out = tmp_path / "cli"
        assert main(["table2", *common(tiny_config_file, out)]) == 0
        methods = {row["method"] for row in lines(capsys)}
        assert methods == {"state_merging", "kmeans"}
        assert (out / "table2" / "summary.csv").is_file()

    def test_sweep_kappa(self, tiny_config_file: Path, tmp_path: Path, capsys) -> None:
        out = tmp_path / "cli"
        assert main(["sweep", "kappa", *common(tiny_config_file, out)]) == 0
        assert len(lines(capsys)) == 2
        assert (out / "sweep_kappa" / "results.csv").is_file()

    def test_every_sweep_kind_is_offered(self) -> None:
        assert set(SWEEPS) == set(SweepKind)
        assert len({directory for _, directory in SWEEPS.values()}) == len(SweepKind)


class TestExportDot:
    """Tests for `export-dot`."""

    def test_reference_language(self, capsys) -> None:
        assert main(["export-dot", "--language", "2"]) == 0
        out = capsys.readouterr().out
        assert out.startswith('digraph "tomita2" {')
        assert out.count("[label=") == 2

    def test_file_to_file(self, tmp_path: Path) -> None:
        source = AutomatonRepository(tmp_path).save(gold_dfa(5), "five")
        target = tmp_path / "five.dot"
        assert main(["export-dot", "--dfa", str(source), "--output", str(target)]) == 0
        assert target.read_text(encoding="utf-8").startswith('digraph "five" {')
        assert (tmp_path / "resolved_config.json").is_file()

    def test_out_directory(self, tmp_path: Path, capsys) -> None:
        out = tmp_path / "cli"
        assert main(["export-dot", "--language", "5", "--out", str(out), "--seed", "3"]) == 0
        assert capsys.readouterr().out == ""
        assert (out / "dot" / "tomita5.dot").read_text(encoding="utf-8").startswith('digraph "tomita5" {')
        resolved = json.loads((out / "dot" / "resolved_config.json").read_text(encoding="utf-8"))
        assert resolved["seeds"] == [3]
        assert resolved["output_dir"] == str(out)

    @pytest.mark.parametrize("argv", [[], ["--language", "2", "--dfa", "x.dfa"]])
    def test_needs_exactly_one_source(self, argv: list[str]) -> None:
        assert main(["export-dot", *argv]) == EXIT_INVALID_INPUT

    def test_several_languages_rejected(self) -> None:
        assert main(["export-dot", "--language", "1,2"]) == EXIT_INVALID_INPUT

    def test_missing_file(self, tmp_path: Path) -> None:
        assert main(["export-dot", "--dfa", str(tmp_path / "absent.dfa")]) == EXIT_NOT_FOUND


class TestExitCodes:
    """Tests for error reporting."""

    def test_no_command(self) -> None:
        assert main([]) == EXIT_USAGE

    def test_unknown_sweep(self) -> None:
        assert main(["sweep", "everything"]) == EXIT_USAGE

    def test_bad_flag_value(self) -> None:
        assert main(["extract", "--kappa", "tight"]) == EXIT_USAGE

    def test_help(self, capsys) -> None:
        assert main(["--help"]) == 0
        assert "export-dot" in capsys.readouterr().out

    def test_missing_config(self, tmp_path: Path) -> None:
        assert main(["train", "--config", str(tmp_path / "absent.json")]) == EXIT_NOT_FOUND

    def test_invalid_config(self, tmp_path: Path, capsys) -> None:
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"languages": [9]}), encoding="utf-8")
        assert main(["train", "--config", str(path), "--out", str(tmp_path)]) == EXIT_INVALID_INPUT
        error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert error["error"]["code"] == "INVALID_CONFIGURATION"

    def test_config_not_json(self, tmp_path: Path) -> None:
        path = tmp_path / "bad.json"
        path.write_text("languages: [1]", encoding="utf-8")
        assert main(["train", "--config", str(path)]) == EXIT_INVALID_INPUT

    def test_nfa_is_not_a_dfa(self, tiny_config_file: Path, tmp_path: Path) -> None:
        nfa = Nfa(
            alphabet=("a", "b"),
            states=frozenset({0, 1}),
            initial=0,
            transitions={(0, "a"): {0, 1}},
            accepting=frozenset({1}),
        )
        path = AutomatonRepository(tmp_path).save(nfa, "machine.nfa")
        code = main(["eval", *common(tiny_config_file, tmp_path / "cli"), "--dfa", str(path)])
        assert code == EXIT_INVALID_INPUT

    def test_unreadable_automaton(self, tiny_config_file: Path, tmp_path: Path) -> None:
        path = tmp_path / "broken.dfa"
        path.write_text("# statemerge-dfa v1\nalphabet: a b\n", encoding="utf-8")
        code = main(["eval", *common(tiny_config_file, tmp_path / "cli"), "--dfa", str(path)])
        assert code == EXIT_BAD_FILE
