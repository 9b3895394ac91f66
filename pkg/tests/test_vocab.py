import logging

import pytest

from courtlex.collocations import PhraseEntry
from courtlex.errors import FormatError
from courtlex.vocab import (
    HINT_HEADER,
    VocabularyEntry,
    apply_pronunciation_overrides,
    build_vocabulary,
    load_overrides,
    parse_hint_table,
    parse_overrides,
    render_hint_table,
)

LADY = PhraseEntry(("my", "lady"), 20.0, 40)


def test_union_of_sources():
    out = build_vocabulary([LADY], {"Judge": [("lord phillips", 3)]}, [])
    assert [(e.text, e.source) for e in out] == [("lord phillips", "entity"), ("my lady", "collocation")]
    assert out[0].category == "Judge"


def test_manual_wins_duplicates():
    out = build_vocabulary([LADY], None, [VocabularyEntry(("my", "lady"), "My Lady")])
    assert len(out) == 1
    assert out[0].source == "manual" and out[0].display_as == "My Lady"


def test_entity_beats_collocation():
    out = build_vocabulary([PhraseEntry(("high", "court"), 50.0, 9)], {"Court": [("high court", 9)]})
    assert [(e.text, e.source) for e in out] == [("high court", "entity")]


def test_empty_inputs():
    assert build_vocabulary() == []


def test_caps_and_order():
    phrases = [PhraseEntry((f"p{i}", "x"), 100.0 - i, 10 + i) for i in range(5)]
    inv = {"Judge": [("lord a", 5), ("lord b", 5), ("lord c", 1)], "Court": [("high court", 7)]}
    out = build_vocabulary(phrases, inv, caps={"collocation": 2, "entity": 3})
    assert [e.text for e in out] == ["high court", "lord a", "lord b", "p4 x", "p3 x"]


def test_idempotent_when_fed_back():
    phrases = [LADY, PhraseEntry(("in", "my", "submission"), 15.0, 30)]
    inv = {"Judge": [("lord phillips", 3)], "Provision": [("rule 3.17", 2)]}
    first = build_vocabulary(phrases, inv, [VocabularyEntry(("mi", "lud"), sounds_like="mi-lud")], {"entity": 1})
    assert build_vocabulary(phrases, inv, first, {"entity": 1}) == first
    assert build_vocabulary([], None, first, {"entity": 1}) == first


def test_entry_invariants():
    with pytest.raises(ValueError):
        VocabularyEntry(())
    with pytest.raises(ValueError):
        VocabularyEntry(("a",), sounds_like="Mee Lady")
    with pytest.raises(ValueError):
        VocabularyEntry(("a",), source="crowd")
    assert VocabularyEntry(("my", "lady")).display_as == "my lady"


def test_pronunciation_overrides(caplog):
    entries = build_vocabulary([LADY])
    out = apply_pronunciation_overrides(entries, {"my lady": "mee-lay-dee"})
    assert out[0].sounds_like == "mee-lay-dee"
    assert apply_pronunciation_overrides(entries, {}) == entries
    with caplog.at_level(logging.WARNING, logger="courtlex"):
        assert apply_pronunciation_overrides(entries, {("lord", "x"): "lud-ex"}) == entries
    assert "absent phrase" in caplog.text
    with pytest.raises(ValueError, match="my lady"):
        apply_pronunciation_overrides(entries, {"my lady": "MEE lady"})


def test_hint_table_rows():
    e = VocabularyEntry(("my", "lady"), "my lady", "mee-lay-dee")
    assert render_hint_table([e]) == HINT_HEADER + "my-lady\t\tmee-lay-dee\tmy lady\n"
    assert render_hint_table([VocabularyEntry(("rule", "3.17"))]) == HINT_HEADER + "rule-3.17\t\t\trule 3.17\n"
    assert render_hint_table([]) == "Phrase\tIPA\tSoundsLike\tDisplayAs\n"


def test_hint_table_round_trip():
    entries = [
        VocabularyEntry(("my", "lady"), "My Lady", "mee-lay-dee"),
        VocabularyEntry(("lord", "phillips"), "Lord Phillips"),
        VocabularyEntry(("rule", "3.17")),
    ]
    text = render_hint_table(entries)
    assert parse_hint_table(text) == entries
    with pytest.raises(FormatError):
        parse_hint_table("Phrase\tSoundsLike\n")
    with pytest.raises(FormatError):
        parse_hint_table(HINT_HEADER + "a\tb\n")


def test_overrides_file(tmp_path):
    p = tmp_path / "o.tsv"
    p.write_text("# manual\nmy lady\tmee-lay-dee\tMy Lady\nmi lud\n\nlord reed\t\tLord Reed\n", encoding="utf-8")
    out = load_overrides(p)
    assert [(e.text, e.sounds_like, e.display_as) for e in out] == [
        ("my lady", "mee-lay-dee", "My Lady"),
        ("mi lud", None, "mi lud"),
        ("lord reed", None, "Lord Reed"),
    ]
    with pytest.raises(FormatError, match="line 1"):
        parse_overrides("my lady\tMEE\tx\n")
    with pytest.raises(FormatError):
        parse_overrides("a\tb\tc\td\n")
