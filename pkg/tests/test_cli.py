import json
import shutil

import pytest

from courtlex.cli import COMMANDS, run_command
from courtlex.collocations import parse_phrase_list
from courtlex.entities import parse_inventory
from courtlex.lm import load_lm
from courtlex.rescore import parse_asr_json
from courtlex.synthetic import write_demo
from courtlex.vocab import parse_hint_table


@pytest.fixture(scope="module")
def demo(tmp_path_factory):
    d = tmp_path_factory.mktemp("demo")
    write_demo(d, seed=0, train_sentences=600, heldout_sentences=40)
    return d


def run(*argv):
    return run_command([str(a) for a in argv])


def test_ingest_summary(demo, capsys):
    assert run("ingest", "--corpus", demo / "corpus.tsv") == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "id\tkind\tsentences\ttokens"
    assert [line.split("\t")[:2] for line in lines[1:]] == [["judgements", "judgement"], ["hearing1", "gold_transcript"]]


def test_step_by_step_chain(demo, tmp_path, capsys):
    p, e, v, lm, nb, r = (tmp_path / n for n in ("p.tsv", "e.tsv", "v.tsv", "lm.arpa", "nb.json", "r.tsv"))
    assert run("phrases", "--corpus", demo / "corpus.tsv", "--out", p) == 0
    phrases = parse_phrase_list(p.read_text())
    assert phrases and all(x.score >= 10 and x.frequency >= 5 for x in phrases)

    assert run("entities", "--corpus", demo / "corpus.tsv", "--out", e) == 0
    inventory = parse_inventory(e.read_text())
    assert "Judge" in inventory and "Provision" in inventory

    assert run("vocab", "--phrases", p, "--entities", e, "--overrides", demo / "overrides.tsv", "--out", v) == 0
    entries = parse_hint_table(v.read_text())
    lady = next(x for x in entries if x.text == "my lady")
    assert (lady.source, lady.sounds_like, lady.display_as) == ("manual", "mee-lay-dee", "My Lady")

    assert run("train-lm", "--corpus", demo / "corpus.tsv", "--order", "2", "--out", lm) == 0
    assert load_lm(lm).order == 2

    assert run("--seed", "1", "simulate", "--corpus", demo / "heldout.tsv", "--confusions", demo / "corpus.tsv", "--out", nb) == 0
    lists = parse_asr_json(nb)
    assert len(lists) == 40 and all(1 <= len(x) <= 5 for x in lists)
    first = nb.read_bytes()
    assert run("simulate", "--seed", "1", "--corpus", demo / "heldout.tsv", "--confusions", demo / "corpus.tsv", "--out", nb) == 0
    assert nb.read_bytes() == first

    assert run("rescore", "--nbest", nb, "--lm", lm, "--vocab", v, "--lambda", "0.5", "--beta", "0.5", "--out", r) == 0
    rows = [line.split("\t") for line in r.read_text().splitlines()]
    assert [row[0] for row in rows] == [x.utterance_id for x in lists]

    # Evaluate the rescored output and the raw top-1 against the references.
    pairs = tmp_path / "pairs.tsv"
    split = {"case1": [], "case2": []}
    for uid, text in rows:
        split[uid.split("-")[0]].append(f"{uid}\t{text}\n")
    for doc, lines in split.items():
        (tmp_path / f"{doc}.hyp.tsv").write_text("".join(lines))
        shutil.copy(demo / "corpus" / f"{doc}.txt", tmp_path / f"{doc}.txt")
    pairs.write_text("case1.txt\tcase1.hyp.tsv\tnb.json\ncase2.txt\tcase2.hyp.tsv\tnb.json\n")
    capsys.readouterr()
    report_dir = tmp_path / "report"
    assert run("evaluate", "--pairs", pairs, "--systems", "rescored,top1", "--out", report_dir) == 0
    out = capsys.readouterr().out
    assert "rescored" in out and "top1" in out
    assert sorted(x.name for x in report_dir.iterdir()) == ["entities.png", "metrics.tsv", "report.txt", "wer.png"]
    metrics = (report_dir / "metrics.tsv").read_text().splitlines()
    assert all(len(line.split("\t")) == 3 for line in metrics)
    assert (report_dir / "wer.png").read_bytes().startswith(b"\x89PNG")


def test_evaluate_plain_text(tmp_path, capsys):
    (tmp_path / "ref.txt").write_text("So my lady um it is difficult to\n")
    (tmp_path / "hyp.txt").write_text("So melody um it is difficult to\n")
    (tmp_path / "pairs.tsv").write_text("ref.txt\thyp.txt\n")
    assert run("evaluate", "--pairs", tmp_path / "pairs.tsv") == 0
    assert "25.00" in capsys.readouterr().out
    assert run("evaluate", "--pairs", tmp_path / "pairs.tsv", "--systems", "a,b") == 1


def test_unknown_subcommand(capsys):
    assert run("transcribe") == 1
    err = capsys.readouterr().err
    assert "usage:" in err and "invalid choice" in err
    assert run() == 1
    assert "a command is required" in capsys.readouterr().err


def test_every_command_has_help(capsys):
    for command in COMMANDS:
        with pytest.raises(SystemExit) as exc:
            run(command, "--help")
        assert exc.value.code == 0
    assert "usage:" in capsys.readouterr().out


def test_missing_nbest_leaves_no_output(demo, tmp_path, capsys):
    lm = tmp_path / "lm.arpa"
    assert run("train-lm", "--corpus", demo / "corpus.tsv", "--out", lm) == 0
    out = tmp_path / "r.tsv"
    assert run("rescore", "--nbest", tmp_path / "absent.json", "--lm", lm, "--out", out) == 1
    assert "absent.json" in capsys.readouterr().err
    assert not out.exists()
    assert list(tmp_path.iterdir()) == [lm]


def test_malformed_inputs_exit_one(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"utterances": [{"id": "u", "alternatives": [{"transcript": "a"}]}]}))
    arpa = tmp_path / "x.arpa"
    arpa.write_text("\\data\\\nngram 1=2\n\n\\1-grams:\n-1 a\n\\end\\\n")
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"utterances": [{"id": "u", "alternatives": [{"transcript": "a", "confidence": 1}]}]}))
    assert run("rescore", "--nbest", bad, "--lm", arpa) == 1
    assert "confidence" in capsys.readouterr().err
    assert run("rescore", "--nbest", good, "--lm", arpa) == 1
    assert "line" in capsys.readouterr().err
    assert run("train-lm", "--corpus", tmp_path / "missing.tsv") == 1
    assert run("phrases", "--corpus", tmp_path / "missing.tsv", "--threads", "0") == 1


def test_bad_config_exits_one(demo, tmp_path, capsys):
    conf = tmp_path / "bad.conf"
    conf.write_text(f"corpus = {demo / 'corpus.tsv'}\nheldout = {demo / 'heldout.tsv'}\nlambda = 1.5\nbeta = -1\n")
    assert run("pipeline", "--config", conf, "--out", tmp_path / "out") == 1
    err = capsys.readouterr().err
    assert "lambda" in err and "beta" in err
    assert not (tmp_path / "out").exists()


def test_demo_requires_out(capsys):
    assert run("demo") == 1
    assert "--out" in capsys.readouterr().err


def test_pipeline_is_deterministic(tmp_path, capsys):
    assert run("demo", "--out", tmp_path / "ws") == 0
    conf = tmp_path / "ws" / "pipeline.conf"
    assert run("pipeline", "--config", conf, "--out", tmp_path / "a") == 0
    assert run("pipeline", "--config", conf, "--out", tmp_path / "b") == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    assert {"phrases.tsv", "entities.tsv", "vocab.tsv", "lm.arpa", "nbest.json", "report.txt", "metrics.tsv",
            "wer.png", "entities.png"} <= set(names)
    assert len([n for n in names if n.startswith("hyp.")]) == 3
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name
    assert "asr-top1" in capsys.readouterr().out
