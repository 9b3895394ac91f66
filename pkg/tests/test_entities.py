import pytest

from courtlex.corpus import TokenStream, analyze
from courtlex.entities import (
    CATEGORIES,
    DEFAULT_PRIORITY,
    EntityMention,
    default_rules,
    entity_inventory,
    extract_entities,
    format_inventory,
    load_rules,
    parse_inventory,
    parse_rules,
)
from courtlex.errors import FormatError
from courtlex.synthetic import legal_sentences


def ents(text, rules=None):
    return [(m.category, m.surface) for m in extract_entities(analyze(text), rules)]


@pytest.mark.parametrize(
    "text, expected",
    [
        ("section 25(2)(a)-(h)", [("Provision", "section 25(2)(a)-(h)")]),
        ("rule 3.17", [("Provision", "rule 3.17")]),
        ("lord phillips", [("Judge", "lord phillips")]),
        ("lady hale", [("Judge", "lady hale")]),
        ("", []),
        ("the court of appeal agreed", [("Court", "court of appeal")]),
        ("in radmacher v granatino", [("CaseName", "radmacher v granatino")]),
        ("made on 12 march 2019", [("Date", "12 march 2019")]),
        ("the matrimonial causes act 1973", [("Instrument", "matrimonial causes act 1973")]),
        ("mr smith gave evidence", [("Person", "mr smith")]),
        ("page 45 of tab 3", [("Cardinal", "45"), ("Cardinal", "3")]),
        ("mrs justice parker", [("Judge", "mrs justice parker")]),
        ("article 8 of schedule 1", [("Provision", "article 8"), ("Provision", "schedule 1")]),
    ],
)
def test_extraction_examples(text, expected):
    assert ents(text) == expected


def test_judge_needs_a_name():
    assert ents("my lady um") == []
    assert ents("lady justice") == []


def test_provision_digits_never_cardinal():
    got = extract_entities(analyze("under section 31 and 12 other rules"))
    cats = {m.surface: m.category for m in got}
    assert cats == {"section 31": "Provision", "12": "Cardinal"}


def test_priority_order_resolves_overlap():
    # Judge "lord phillips" overlaps CaseName "phillips v smith"; CaseName ranks higher
    # and "lord" is a non-name, so it is not absorbed into the case name.
    assert ents("lord phillips v smith") == [("CaseName", "phillips v smith")]


def test_mentions_reconstruct_and_do_not_overlap():
    text = "\n".join(legal_sentences(300, seed=4))
    stream = analyze(text)
    words = stream.words
    mentions = extract_entities(stream)
    assert mentions == extract_entities(stream)
    covered = set()
    for m in mentions:
        start, end = m.token_range
        assert m.surface == " ".join(words[start:end])
        assert covered.isdisjoint(range(start, end))
        covered.update(range(start, end))
    assert {m.category for m in mentions} >= {"Judge", "Provision", "Court", "CaseName", "Date", "Instrument"}


def test_mention_invariants():
    with pytest.raises(ValueError):
        EntityMention("Judge", (2, 2), "")
    with pytest.raises(ValueError):
        EntityMention("Villain", (0, 1), "x")


def test_inventory_counts_and_order():
    docs = [
        analyze("lord phillips said so\nlady hale agreed\nlord phillips again", "a"),
        analyze("rule 3.17 applies\nlord phillips and lady hale", "b"),
        analyze("see rule 3.17", "c"),
    ]
    inv = entity_inventory(docs)
    assert inv["Judge"] == [("lord phillips", 3), ("lady hale", 2)]
    assert inv["Provision"] == [("rule 3.17", 2)]
    assert set(inv) == set(CATEGORIES)


def test_inventory_empty_cases():
    inv = entity_inventory([analyze("nothing to see here")])
    assert all(v == [] for v in inv.values())
    with pytest.raises(ValueError):
        entity_inventory([])


def test_inventory_format_round_trip():
    inv = entity_inventory([analyze("lord phillips and lady hale\nrule 3.17")])
    text = format_inventory(inv)
    assert "Judge\tlord phillips\t1\n" in text
    assert parse_inventory(text) == inv
    with pytest.raises(FormatError):
        parse_inventory("Villain\tjoker\t1\n")


def test_rules_file(tmp_path):
    p = tmp_path / "rules.tsv"
    p.write_text(
        "# custom\n"
        "*\tpriority\t" + ",".join(DEFAULT_PRIORITY) + "\n"
        "Court\tgazetteer\tcourt of protection\n"
        "Judge\ttrigger\tlord|lady <name>\n",
        encoding="utf-8",
    )
    rules = load_rules(p)
    assert len(rules.rules) == 2
    assert ents("the court of protection and lord reed", rules) == [
        ("Court", "court of protection"),
        ("Judge", "lord reed"),
    ]


def test_rules_errors():
    with pytest.raises(FormatError, match="line 1"):
        parse_rules("Judge trigger lord <name>\n")
    with pytest.raises(FormatError):
        parse_rules("Villain\tgazetteer\tjoker\n")
    with pytest.raises(FormatError):
        parse_rules("*\tpriority\tJudge,Court\n")
    with pytest.raises(FormatError):
        parse_rules("Judge\tmagic\tlord\n")


def test_priority_directive_changes_winner():
    text = "*\tpriority\tJudge,Provision,Date,CaseName,Court,Instrument,Person,Cardinal\n"
    text += "CaseName\ttrigger\t<name>+ v <name>+\nJudge\ttrigger\tlord|lady <name>\n"
    assert ents("lord phillips v smith", parse_rules(text))[0][0] == "Judge"


def test_word_list_input():
    assert extract_entities(["lady", "hale"]) == extract_entities(TokenStream.from_words(["lady", "hale"]))
    assert default_rules() is default_rules()
