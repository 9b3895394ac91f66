"""Discounted-PMI bigram collocation detection with iterated merging.

A bigram ``(a, b)`` scores ``(count(a b) - delta) * N / (count(a) * count(b))``
where ``N`` is the number of unigram tokens. Detected bigrams are merged into
single tokens and detection reruns, so ``passes`` rounds can find phrases of
up to ``passes + 1`` words.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import Token, TokenStream
from .errors import UndefinedScoreError

JOINER = "_"


@dataclass
class NGramCounts:
    order: int
    counts: Counter = field(default_factory=Counter)
    total_unigrams: int = 0

    def __getitem__(self, key) -> int:
        return self.counts.get(tuple(key), 0)

    def __add__(self, other: "NGramCounts") -> "NGramCounts":
        if other.order != self.order:
            raise ValueError("cannot merge counts of different orders")
        return NGramCounts(self.order, self.counts + other.counts, self.total_unigrams + other.total_unigrams)


@dataclass(frozen=True)
class PhraseEntry:
    tokens: tuple[str, ...]
    score: float
    frequency: int

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if len(self.tokens) < 2:
            raise ValueError("a phrase needs at least two tokens")

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class CollocationConfig:
    delta: float = 5.0
    threshold: float = 10.0
    min_count: int = 5
    passes: int = 2

    def __post_init__(self):
        if not self.delta >= 0:
            raise ValueError("delta must be >= 0")
        if math.isnan(self.threshold):
            raise ValueError("threshold must be a number")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")
        if self.passes < 1:
            raise ValueError("passes must be >= 1")


def _count_sentences(sentences: Iterable[Sequence[str]], order: int) -> NGramCounts:
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    counts: Counter = Counter()
    total = 0
    for sent in sentences:
        total += len(sent)
        if order == 1:
            counts.update((w,) for w in sent)
        else:
            counts.update(zip(sent, sent[1:]))
    return NGramCounts(order, counts, total)


def count_ngrams(stream: TokenStream, order: int) -> NGramCounts:
    """Count unigrams or bigrams; bigrams never span a sentence boundary."""
    return _count_sentences(stream.sentences(), order)


def score_bigram(unigrams: NGramCounts, bigrams: NGramCounts, a: str, b: str, delta: float) -> float:
    ca, cb = unigrams[(a,)], unigrams[(b,)]
    if ca <= 0 or cb <= 0:
        missing = a if ca <= 0 else b
        raise UndefinedScoreError(f"unigram {missing!r} not in counts")
    return (bigrams[(a, b)] - delta) * unigrams.total_unigrams / (ca * cb)


def _merge_words(words: Sequence[str], table: dict[tuple[str, ...], str], max_len: int) -> list[str]:
    out = []
    i, n = 0, len(words)
    while i < n:
        for length in range(min(max_len, n - i), 1, -1):
            joined = table.get(tuple(words[i : i + length]))
            if joined is not None:
                out.append(joined)
                i += length
                break
        else:
            out.append(words[i])
            i += 1
    return out


def _phrase_table(phrases: Iterable[PhraseEntry]) -> tuple[dict, int]:
    table = {p.tokens: JOINER.join(p.tokens) for p in phrases}
    return table, max((len(k) for k in table), default=0)


def merge_phrases(stream: TokenStream, phrases: Sequence[PhraseEntry]) -> TokenStream:
    """Replace phrase occurrences with single joined tokens.

    Matching is greedy left to right within each sentence; at a given position
    the longest phrase wins. Merged tokens span from the first to the last
    constituent, so their surface is the raw slice between them.
    """
    table, max_len = _phrase_table(phrases)
    if not table:
        return stream
    tokens: list[Token] = []
    bounds = []
    for start, end in stream.sentence_bounds:
        first = len(tokens)
        sent = stream.tokens[start:end]
        i, n = 0, len(sent)
        while i < n:
            for length in range(min(max_len, n - i), 1, -1):
                key = tuple(t.normalized for t in sent[i : i + length])
                joined = table.get(key)
                if joined is not None:
                    parts = sent[i : i + length]
                    span = (parts[0].char_span[0], parts[-1].char_span[1])
                    surface = " ".join(t.surface for t in parts)
                    tokens.append(Token(surface, joined, span))
                    i += length
                    break
            else:
                tokens.append(sent[i])
                i += 1
        bounds.append((first, len(tokens)))
    return TokenStream(stream.document_id, tuple(tokens), tuple(bounds))


def _sort_key(p: PhraseEntry):
    return (-p.score, -p.frequency, p.tokens)


def _detect_once(sentences: list[list[str]], config: CollocationConfig, max_words: int, parts: dict):
    unigrams = _count_sentences(sentences, 1)
    bigrams = _count_sentences(sentences, 2)
    found = []
    for (a, b), freq in bigrams.counts.items():
        if freq < config.min_count:
            continue
        if len(parts.get(a, (a,))) + len(parts.get(b, (b,))) > max_words:
            continue
        score = score_bigram(unigrams, bigrams, a, b, config.delta)
        if score > config.threshold:
            found.append(((a, b), score, freq))
    return found


def detect_phrases(corpus: Sequence[TokenStream], config: CollocationConfig | None = None) -> list[PhraseEntry]:
    """Find collocations across ``corpus``.

    Returned entries carry the flattened word tuple, so a second-pass merge of
    ``court_of`` + ``appeal`` is reported as ``("court", "of", "appeal")``.
    Pass ``k`` only accepts pairs totalling at most ``k + 1`` words.
    Output is sorted by descending score, then descending frequency, then
    lexicographically, and does not depend on document order.
    """
    config = config or CollocationConfig()
    if not corpus:
        raise ValueError("corpus must contain at least one stream")
    sentences = [s for stream in corpus for s in stream.sentences()]
    # Joined token -> constituent words.
    parts: dict[str, tuple[str, ...]] = {}
    best: dict[tuple[str, ...], PhraseEntry] = {}
    for n_pass in range(1, config.passes + 1):
        # Pass k may only build phrases of up to k + 1 words.
        found = _detect_once(sentences, config, n_pass + 1, parts)
        if not found:
            break
        table = {}
        for (a, b), score, freq in found:
            words = parts.get(a, (a,)) + parts.get(b, (b,))
            entry = PhraseEntry(words, score, freq)
            old = best.get(words)
            if old is None or _sort_key(entry) < _sort_key(old):
                best[words] = entry
            joined = a + JOINER + b
            parts[joined] = words
            table[(a, b)] = joined
        sentences = [_merge_words(s, table, 2) for s in sentences]
    return sorted(best.values(), key=_sort_key)


def format_phrase_list(phrases: Iterable[PhraseEntry]) -> str:
    """Render phrases as ``tokens<TAB>score<TAB>frequency`` lines."""
    return "".join(f"{p.text}\t{p.score!r}\t{p.frequency}\n" for p in phrases)


def parse_phrase_list(text: str) -> list[PhraseEntry]:
    from .errors import FormatError

    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise FormatError("expected 'phrase<TAB>score<TAB>frequency'", where=f"line {lineno}")
        try:
            out.append(PhraseEntry(tuple(cols[0].split()), float(cols[1]), int(cols[2])))
        except ValueError as exc:
            raise FormatError(str(exc), where=f"line {lineno}") from None
    return out
