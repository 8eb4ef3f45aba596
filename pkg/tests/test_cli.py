from __future__ import annotations

import json
from pathlib import Path

import pytest
from conftest import corpus_payload, paired_vectors, study_shaped, responses_payload, write_json

from status_filter import cli
from status_filter.coding import code_responses
from status_filter.evaluation import Fold, train_for_fold
from status_filter.formats import GoldSummary, ReportFile, load_table, record_vector, write_report
from status_filter.stats import accuracy


@pytest.fixture
def study_files(tmp_path: Path) -> tuple[Path, Path]:
    corpus, responses = study_shaped()
    payload = corpus_payload(
        corpus.objects,
        {d.id: [{m.object: m.role for m in u.mentions} for u in d.utterances] for d in corpus.dialogues},
    )
    return (
        write_json(tmp_path / "corpus.json", payload),
        write_json(tmp_path / "responses.json", responses_payload(responses)),
    )


def _run(capsys, *argv: str) -> tuple[int, str, str]:
    code = cli.main(["--log", "quiet", *argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_train_writes_nine_rows(capsys, study_files, tmp_path):
    corpus_path, responses_path = study_files
    out_path = tmp_path / "table.json"
    code, out, _ = _run(capsys, "train", "--corpus", str(corpus_path), "--responses", str(responses_path), "--out", str(out_path), "--json")
    assert code == 0
    printed = json.loads(out)
    assert len(printed["rows"]) == 9
    assert out_path.read_text(encoding="utf-8") == out


def test_train_exclusions_match_the_evaluation_fold(capsys, study_files, tmp_path):
    corpus_path, responses_path = study_files
    out_path = tmp_path / "table.json"
    code, out, _ = _run(
        capsys,
        "train",
        "--corpus", str(corpus_path),
        "--responses", str(responses_path),
        "--out", str(out_path),
        "--exclude-dialogue", "M1",
        "--exclude-object", "o1",
    )
    assert code == 0
    assert "(F,T)" in out

    corpus, responses = study_shaped()
    fold_table = train_for_fold(corpus, code_responses(responses, corpus.objects), Fold(0, "o1", "M1"), 0.0).table
    assert load_table(out_path) == fold_table


def test_missing_input_file_exits_2(capsys, tmp_path):
    code, out, err = _run(capsys, "train", "--corpus", str(tmp_path / "nope.json"), "--responses", "x", "--out", "y")
    assert code == 2
    assert out == ""
    assert "ERROR" in err


def test_bad_arguments_exit_2(capsys):
    code, _, _ = _run(capsys, "train", "--corpus", "c.json")
    assert code == 2


@pytest.fixture
def predict_files(tmp_path: Path, capsys) -> tuple[Path, Path]:
    corpus_path = write_json(
        tmp_path / "corpus.json",
        corpus_payload(["o1", "o2"], {"M1": [{"o1": "topic"}, {}, {"o2": "nontopic"}, {"o1": "nontopic"}]}),
    )
    responses_path = write_json(tmp_path / "responses.json", responses_payload([]))
    table_path = tmp_path / "table.json"
    code, _, _ = _run(capsys, "train", "--corpus", str(corpus_path), "--responses", str(responses_path), "--out", str(table_path), "--alpha", "1")
    assert code == 0
    return table_path, corpus_path


def test_predict_prints_prior_then_one_line_per_utterance(capsys, predict_files):
    table_path, corpus_path = predict_files
    code, out, _ = _run(
        capsys, "predict", "--table", str(table_path), "--corpus", str(corpus_path), "--dialogue", "M1", "--object", "o1", "--prior", "informed"
    )
    assert code == 0
    lines = [line for line in out.splitlines() if line.startswith("t=")]
    assert len(lines) == 5
    assert "I=0.0500 A=0.1000 F=0.8500" in lines[0]
    assert lines[0].endswith("Familiar")


def test_predict_json(capsys, predict_files):
    table_path, corpus_path = predict_files
    code, out, _ = _run(
        capsys, "predict", "--table", str(table_path), "--corpus", str(corpus_path), "--dialogue", "M1", "--object", "o2", "--mode", "hard", "--json"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["mode"] == "hard"
    assert [s["t"] for s in payload["steps"]] == [0, 1, 2, 3, 4]
    # a uniform table keeps the uniform prior where it is
    assert all(s["status"] == "F" for s in payload["steps"])


def test_predict_unknown_dialogue_exits_3(capsys, predict_files):
    table_path, corpus_path = predict_files
    code, _, err = _run(capsys, "predict", "--table", str(table_path), "--corpus", str(corpus_path), "--dialogue", "M9", "--object", "o1")
    assert code == 3
    assert "M9" in err


def test_predict_bad_prior_exits_3(capsys, predict_files):
    table_path, corpus_path = predict_files
    code, _, _ = _run(
        capsys, "predict", "--table", str(table_path), "--corpus", str(corpus_path), "--dialogue", "M1", "--object", "o1", "--prior", "0.5,0.5,0.5"
    )
    assert code == 3


def _evaluate(capsys, study_files, out_path: Path, *extra: str) -> tuple[int, str]:
    corpus_path, responses_path = study_files
    code, out, _ = _run(
        capsys,
        "evaluate",
        "--corpus", str(corpus_path),
        "--responses", str(responses_path),
        "--models", "u,i,fsm,rb",
        "--seed", "11",
        "--out", str(out_path),
        *extra,
    )
    return code, out


def test_evaluate_writes_full_report(capsys, study_files, tmp_path):
    code, out = _evaluate(capsys, study_files, tmp_path / "report.json")
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert [m["name"] for m in report["models"]] == ["u", "i", "fsm", "rb"]
    assert all(len(m["entries"]) == 128 for m in report["models"])
    assert len(report["comparisons"]) == 6
    assert "=== Accuracy ===" in out
    assert "=== McNemar ===" in out


def test_evaluate_is_byte_identical_across_runs_and_workers(capsys, study_files, tmp_path):
    _evaluate(capsys, study_files, tmp_path / "a.json")
    _evaluate(capsys, study_files, tmp_path / "b.json")
    _evaluate(capsys, study_files, tmp_path / "c.json", "--workers", "3")
    a = (tmp_path / "a.json").read_bytes()
    assert a == (tmp_path / "b.json").read_bytes()
    assert a == (tmp_path / "c.json").read_bytes()


def test_evaluate_unknown_model_exits_3(capsys, study_files, tmp_path):
    corpus_path, responses_path = study_files
    code, _, _ = _run(capsys, "evaluate", "--corpus", str(corpus_path), "--responses", str(responses_path), "--models", "u,hmm")
    assert code == 3


@pytest.fixture
def stored_report(tmp_path: Path) -> Path:
    u, rb = paired_vectors((34, 71, 8, 15), "u", "rb")
    report = ReportFile(
        config={"exact_mcnemar": False},
        gold=GoldSummary(cells=128, labelled=128, empty_cells=0, tied_cells=0, dropped_failed_checks=0, q1_outside_q2=0),
        models=(record_vector(u, accuracy(u)), record_vector(rb, accuracy(rb))),
    )
    path = tmp_path / "report.json"
    path.write_text(write_report(report), encoding="utf-8")
    return path


def test_compare_rederives_statistics(capsys, stored_report):
    code, out, _ = _run(capsys, "compare", "--report", str(stored_report), "--pairs", "u,rb", "--pairs", "u,u", "--json")
    assert code == 0
    first, same = json.loads(out)["comparisons"]
    assert (first["n_ss"], first["n_sf"], first["n_fs"], first["n_ff"]) == (34, 71, 8, 15)
    assert first["chi2"] == pytest.approx(48.658, abs=1e-3)
    assert first["p_display"] == "<0.0001"
    assert (same["chi2"], same["p"], same["no_discordant"]) == (0.0, 1.0, True)


def test_compare_text_output(capsys, stored_report):
    code, out, _ = _run(capsys, "compare", "--report", str(stored_report))
    assert code == 0
    assert "48.658" in out
    assert "--- u vs rb ---" in out


def test_compare_unknown_pair_exits_3(capsys, stored_report):
    code, _, _ = _run(capsys, "compare", "--report", str(stored_report), "--pairs", "u,fsm")
    assert code == 3


def test_agreement(capsys, tmp_path):
    payload = corpus_payload(
        ["o1", "o2"],
        {"M1": [{"o1": "topic"}, {"o2": "nontopic"}]},
        annotators=3,
        votes={("M1", 1, "o1"): 3, ("M1", 2, "o2"): 0},
    )
    path = write_json(tmp_path / "corpus.json", payload)
    code, out, _ = _run(capsys, "agreement", "--corpus", str(path), "--json")
    assert code == 0
    assert json.loads(out) == {"kappa": 1.0, "degenerate": False}

    no_votes = write_json(tmp_path / "plain.json", corpus_payload(["o1"], {"M1": [{}]}))
    code, _, _ = _run(capsys, "agreement", "--corpus", str(no_votes))
    assert code == 3
