"""Seeded synthetic corpora standing in for private court data.

``legal_sentences`` produces court-hearing style utterances with judges,
provisions, courts and case names. ``planted_bigram_corpus`` produces filler
text with known collocations for recovery tests.
"""

from __future__ import annotations

import random
from pathlib import Path

from .corpus import TokenStream

JUDGES = [
    "Lord Phillips", "Lady Hale", "Lord Reed", "Lady Arden", "Lord Kerr", "Lord Sumption", "Lady Black",
    "Lord Wilson", "Lord Hodge", "Lord Briggs", "Lady Rose", "Lord Sales", "Lord Leggatt", "Lord Burrows",
]
COURTS = ["Supreme Court", "Court of Appeal", "High Court", "Family Court", "County Court", "Crown Court"]
PROVISIONS = [
    "section 25(2)(a)-(h)", "rule 3.17", "section 31", "article 8", "schedule 1", "paragraph 4(b)",
    "rule 44.3", "section 3(1)", "article 14", "section 17(1)(b)", "rule 52.21", "section 8",
]
CASES = [
    "Radmacher v Granatino", "White v White", "Miller v McFarlane", "Donoghue v Stevenson", "Charman v Charman",
    "Sharland v Sharland", "Prest v Petrodel", "Owens v Owens", "Jones v Kernott", "Stack v Dowden",
]
INSTRUMENTS = ["Matrimonial Causes Act 1973", "Human Rights Act 1998", "Children Act 1989", "Senior Courts Act 1981"]
NOUNS = [
    "judgment", "appeal", "application", "evidence", "claim", "decision", "hearing", "argument", "statute",
    "contract", "agreement", "property", "award", "submission", "principle", "authority", "discretion",
    "jurisdiction", "payment", "settlement", "trust", "pension", "house", "business", "company", "asset",
    "income", "report", "witness", "statement", "transcript", "letter", "notice", "policy", "approach",
    "test", "threshold", "remedy", "costs", "liability", "duty", "breach", "loss", "damage", "child",
    "marriage", "husband", "wife", "employer", "landlord", "tenant", "lease", "share", "fund", "account",
]
ADJECTIVES = [
    "relevant", "proper", "fair", "clear", "reasonable", "substantial", "statutory", "material", "particular",
    "appropriate", "difficult", "important", "general", "specific", "significant", "narrow", "wide",
    "original", "final", "previous", "separate", "limited", "public", "private", "legal", "practical",
]
VERBS = [
    "held", "found", "decided", "considered", "accepted", "rejected", "said", "concluded", "explained", "noted",
    "emphasised", "doubted", "approved", "applied", "distinguished", "followed", "observed", "suggested",
]
OPENERS = [
    "", "", "", "so", "well", "um", "now", "my lady", "my lord", "with respect", "in my submission",
    "so my lady", "my lady um", "and", "but", "of course", "as I understand it",
]
CORES = [
    "it is difficult to see how {prov} applies to the {noun}",
    "the court makes a further financial order under {prov} of the {inst}",
    "the point is made at paragraph {num} of the {adj} {noun}",
    "{judge} {verb} in {case} that the {noun} must be {adj}",
    "{judge} asked whether the {court} had jurisdiction over the {noun}",
    "in {case} the {court} {verb} that the financial order should stand",
    "the {adj} {noun} is in the bundle at tab {num}",
    "the {inst} requires the court to consider {prov}",
    "the {court} was wrong to treat the {noun} as {adj}",
    "the appellant relies on {prov} and on {case}",
    "the {noun} was not {adj} as {judge} {verb}",
    "the {adj} {noun} falls within {prov}",
    "the learned judge {verb} the {noun} at paragraph {num}",
    "{judge} put the question in {case} in these terms",
    "the respondent says the {noun} was made on {date}",
    "that brings me to the financial order made by the {court}",
    "we say the {noun} and the {noun2} are {adj}",
    "the {noun} of the {noun2} is a {adj} question",
    "there was no {adj} {noun} before the {court}",
    "the judge {verb} the {noun} without reference to {prov}",
    "{judge} {verb} that the {noun} was {adj} and {adj2}",
    "the {noun} turns on the {adj} {noun2}",
    "the {court} {verb} the {noun} in {case}",
    "I am grateful {judge}",
    "the real question is whether the {noun} was {adj}",
    "the evidence of the {noun} is at page {num}",
    "under {prov} the court must have regard to the {noun}",
    "the {noun2} was {verb} by the {court} on {date}",
]
MONTHS = ["January", "February", "March", "April", "May", "June", "July", "September", "October", "November"]
TAILS = [
    "", "", "", "", "in my submission", "at paragraph {num}", "in the bundle", "as your ladyship knows",
    "if I may say so", "on the facts", "in this case", "my lady", "my lord",
]


def legal_sentence(rng: random.Random) -> str:
    opener, core, tail = rng.choice(OPENERS), rng.choice(CORES), rng.choice(TAILS)
    text = " ".join(part for part in (opener, core, tail) if part)
    text = text.format(
        prov=rng.choice(PROVISIONS),
        inst=rng.choice(INSTRUMENTS),
        judge=rng.choice(JUDGES),
        case=rng.choice(CASES),
        court=rng.choice(COURTS),
        noun=rng.choice(NOUNS),
        noun2=rng.choice(NOUNS),
        adj=rng.choice(ADJECTIVES),
        adj2=rng.choice(ADJECTIVES),
        verb=rng.choice(VERBS),
        num=rng.randint(2, 120),
        date=f"{rng.randint(1, 28)} {rng.choice(MONTHS)} {rng.randint(1995, 2022)}",
    )
    return text[0].upper() + text[1:] + "."


def legal_sentences(n: int, seed=0) -> list[str]:
    rng = random.Random(f"legal|{seed}")
    return [legal_sentence(rng) for _ in range(n)]


def judgement_text(n: int, seed=0) -> str:
    """Prose paragraphs of about five sentences each."""
    sents = legal_sentences(n, seed=f"judgement|{seed}")
    paras = [" ".join(sents[i : i + 5]) for i in range(0, len(sents), 5)]
    return "\n\n".join(paras) + "\n"


def _pseudo_words(rng: random.Random, n: int, taken: set[str]) -> list[str]:
    onsets = "b c d f g h j k l m n p r s t v w z br cr dr fl gr pl st tr".split()
    vowels = "a e i o u ai ea oo".split()
    words = []
    while len(words) < n:
        w = "".join(rng.choice(onsets) + rng.choice(vowels) for _ in range(rng.randint(2, 3)))
        if w not in taken:
            taken.add(w)
            words.append(w)
    return words


def planted_bigram_corpus(
    n_sentences: int = 5000, n_planted: int = 20, seed: int = 0, vocab_size: int = 3000, plant_rate: float = 0.3
) -> tuple[list[TokenStream], set[tuple[str, str]]]:
    """Zipf-distributed filler with ``n_planted`` bigrams inserted at random.

    A sentence receives one planted bigram with probability ``plant_rate``.
    Planted words also occur alone now and then so they are not trivially
    exclusive to their pair.
    """
    rng = random.Random(f"planted|{seed}")
    taken: set[str] = set()
    filler = _pseudo_words(rng, vocab_size, taken)
    weights = [1.0 / (r + 1) for r in range(vocab_size)]
    planted_words = _pseudo_words(rng, 2 * n_planted, taken)
    planted = [(planted_words[2 * i], planted_words[2 * i + 1]) for i in range(n_planted)]
    sentences = []
    for _ in range(n_sentences):
        sent = rng.choices(filler, weights, k=rng.randint(8, 16))
        if rng.random() < plant_rate:
            a, b = rng.choice(planted)
            pos = rng.randint(0, len(sent))
            sent[pos:pos] = [a, b]
        if rng.random() < 0.05:
            sent.insert(rng.randint(0, len(sent)), rng.choice(planted_words))
        sentences.append(sent)
    docs = [TokenStream.from_sentences(sentences[i : i + 500], f"doc{i // 500}") for i in range(0, n_sentences, 500)]
    return docs, set(planted)


def write_demo(directory, seed: int = 0, train_sentences: int = 3000, heldout_sentences: int = 200) -> Path:
    """Write a synthetic corpus, manifests, overrides and a config file.

    Returns the config path.
    """
    d = Path(directory)
    (d / "corpus").mkdir(parents=True, exist_ok=True)
    half = train_sentences // 2
    (d / "corpus" / "judgements.txt").write_text(judgement_text(half, seed), encoding="utf-8")
    transcripts = legal_sentences(train_sentences - half, seed=f"transcripts|{seed}")
    (d / "corpus" / "hearing1.txt").write_text("\n".join(transcripts) + "\n", encoding="utf-8")
    heldout = legal_sentences(heldout_sentences, seed=f"heldout|{seed}")
    mid = heldout_sentences // 2
    (d / "corpus" / "case1.txt").write_text("\n".join(heldout[:mid]) + "\n", encoding="utf-8")
    (d / "corpus" / "case2.txt").write_text("\n".join(heldout[mid:]) + "\n", encoding="utf-8")
    (d / "corpus.tsv").write_text(
        "corpus/judgements.txt\tjudgement\ncorpus/hearing1.txt\tgold_transcript\n", encoding="utf-8"
    )
    (d / "heldout.tsv").write_text("corpus/case1.txt\tgold_transcript\ncorpus/case2.txt\tgold_transcript\n", encoding="utf-8")
    (d / "overrides.tsv").write_text("my lady\tmee-lay-dee\tMy Lady\nmy lord\tmi-lud\tMy Lord\n", encoding="utf-8")
    config = d / "pipeline.conf"
    config.write_text(
        "\n".join(
            [
                "# desk-scale legal ASR adaptation run",
                "corpus = corpus.tsv",
                "heldout = heldout.tsv",
                "overrides = overrides.tsv",
                f"seed = {seed}",
                "out = out",
                "",
            ]
        ),
        encoding="utf-8",
    )
    return config
