import json

import pytest

from courtlex.corpus import (
    Document,
    Token,
    TokenStream,
    analyze,
    ingest_document,
    load_corpus,
    normalize_text,
    normalize_token,
    read_manifest,
    sentence_spans,
    tokenize,
)
from courtlex.errors import FormatError


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("So, My Lady —", "so my lady"),
        ("section 25(2)(a)-(h)", "section 25(2)(a)-(h)"),
        ("", ""),
        ("Rule 3.17.", "rule 3.17"),
        ("the Court’s view", "the court's view"),
        ("  many\t\nspaces  ", "many spaces"),
        ('"quoted," he said.', "quoted he said"),
        ("(see above)", "see above"),
        ("section 3(1)", "section 3(1)"),
        ("well-known", "well-known"),
        ("1973–1998", "1973-1998"),
    ],
)
def test_normalize_text(raw, expected):
    assert normalize_text(raw) == expected


def test_normalize_token_drops_pure_punctuation():
    assert normalize_token("—") == ""
    assert normalize_token("...") == ""


def test_tokenize_examples():
    assert tokenize("so my lady").words == ["so", "my", "lady"]
    assert tokenize("section 25(2)(a)-(h) applies").words == ["section", "25(2)(a)-(h)", "applies"]
    assert tokenize("").words == []


def test_tokenize_spans_index_input():
    s = "so my lady"
    for tok in tokenize(s).tokens:
        assert s[tok.char_span[0] : tok.char_span[1]] == tok.surface


def test_analyze_keeps_raw_spans():
    raw = "So, My Lady —\nIt is difficult."
    stream = analyze(raw, "d")
    assert stream.words == ["so", "my", "lady", "it", "is", "difficult"]
    for tok in stream.tokens:
        assert raw[tok.char_span[0] : tok.char_span[1]] == tok.surface
    assert stream.sentence_bounds == ((0, 3), (3, 6))


def test_sentence_splitting_on_terminal_punctuation():
    raw = "The appeal fails. See Mr. Smith's note! Is that right? Yes"
    stream = analyze(raw, by_line=False)
    assert [len(s) for s in stream.sentences()] == [3, 4, 3, 1]


def test_judgement_paragraphs_do_not_split_on_single_newlines():
    raw = "The judge held that\nthe claim fails. A second sentence."
    assert len(sentence_spans(raw, by_line=False)) == 2


def test_token_invariants():
    with pytest.raises(ValueError):
        Token("a", "a", (3, 3))
    with pytest.raises(ValueError):
        Token("a", "", (0, 1))


def test_stream_bounds_must_partition():
    toks = tuple(tokenize("a b c").tokens)
    with pytest.raises(ValueError):
        TokenStream("d", toks, ((0, 1), (2, 3)))
    with pytest.raises(ValueError):
        TokenStream("d", toks, ((0, 2),))


def test_from_sentences_round_trip():
    s = TokenStream.from_sentences([["a", "b"], ["c"]], "x")
    assert list(s.sentences()) == [["a", "b"], ["c"]]


def test_ingest_plain_text(tmp_path):
    p = tmp_path / "j.txt"
    data = "The Court’s judgment.\r\nSecond line —\n"
    p.write_bytes(data.encode("utf-8"))
    doc = ingest_document(p, "judgement")
    assert doc.kind == "judgement"
    assert doc.raw_text == data
    assert doc.metadata["source"] == str(p)
    assert doc.id == "j"


def test_transcript_token_count_equals_line_sum(tmp_path):
    lines = ["so my lady um it is difficult to", "", "it makes further financial order", "Rule 3.17 applies."]
    p = tmp_path / "t.txt"
    p.write_text("\n".join(lines), encoding="utf-8")
    doc = ingest_document(p, "gold_transcript")
    assert len(doc.stream()) == sum(len(normalize_text(line).split()) for line in lines)
    assert len(doc.stream().sentence_bounds) == 3


def test_ingest_asr_json(tmp_path):
    p = tmp_path / "a.json"
    data = {"utterances": [{"id": "u1", "alternatives": [{"transcript": "So melody", "confidence": 0.9}]}]}
    p.write_text(json.dumps(data), encoding="utf-8")
    doc = ingest_document(p, "asr_output")
    assert len(doc.nbest) == 1
    assert doc.stream().words == ["so", "melody"]


def test_truncated_asr_json_is_format_error(tmp_path):
    p = tmp_path / "a.json"
    p.write_text('{"utterances": [{"id": "u1", "altern', encoding="utf-8")
    with pytest.raises(FormatError):
        ingest_document(p, "asr_output")


def test_missing_file_is_io_error(tmp_path):
    with pytest.raises(OSError):
        ingest_document(tmp_path / "nope.txt", "judgement")


def test_unknown_kind():
    with pytest.raises(ValueError):
        Document("d", "novel", "")


def test_manifest_and_corpus(tmp_path):
    (tmp_path / "sub").mkdir()
    (tmp_path / "sub" / "a.txt").write_text("lord phillips said so\n", encoding="utf-8")
    (tmp_path / "b.txt").write_text("Judgement text.", encoding="utf-8")
    m = tmp_path / "m.tsv"
    m.write_text("# corpus\nsub/a.txt\tgold_transcript\n\nb.txt\tjudgement\n", encoding="utf-8")
    assert [k for _, k in read_manifest(m)] == ["gold_transcript", "judgement"]
    docs = load_corpus(m, threads=2)
    assert [d.id for d in docs] == ["a", "b"]


def test_manifest_errors(tmp_path):
    m = tmp_path / "m.tsv"
    m.write_text("a.txt judgement\n", encoding="utf-8")
    with pytest.raises(FormatError, match="line 1"):
        read_manifest(m)
    m.write_text("a.txt\tpodcast\n", encoding="utf-8")
    with pytest.raises(FormatError):
        read_manifest(m)


def test_duplicate_ids_rejected(tmp_path):
    (tmp_path / "x").mkdir()
    (tmp_path / "a.txt").write_text("a", encoding="utf-8")
    (tmp_path / "x" / "a.txt").write_text("b", encoding="utf-8")
    m = tmp_path / "m.tsv"
    m.write_text("a.txt\tjudgement\nx/a.txt\tjudgement\n", encoding="utf-8")
    with pytest.raises(FormatError, match="duplicate"):
        load_corpus(m)


def test_determinism():
    raw = "My Lady, section 25(2)(a)-(h).\nRule 3.17 — applies."
    assert analyze(raw, "d") == analyze(raw, "d")
