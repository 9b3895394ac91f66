"""Smoothed n-gram language model with ARPA persistence.

The model is held exactly as it is serialized: per-order tables mapping an
n-gram to ``(log10 prob, log10 backoff)``. Queries walk the standard ARPA
backoff chain and convert to natural log at the end, so a saved and reloaded
model answers every query with identical floats.

Two estimators are provided:

* interpolated Kneser-Ney (continuation counts for lower orders, one absolute
  discount for all orders, uniform base distribution);
* add-k, applied to the seen continuations of each context, with the left-over
  mass spread over unseen words in proportion to the next lower order. At the
  unigram level this is plain add-k over the whole vocabulary.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import TokenStream
from .errors import FormatError

BOS, EOS, UNK = "<s>", "</s>", "<unk>"
LN10 = math.log(10.0)
# log10 value standing for probability zero (ARPA convention).
LOG_ZERO = -99.0


@dataclass(frozen=True)
class Smoothing:
    kind: str = "kneser_ney"
    discount: float = 0.75
    k: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "discount", float(self.discount))
        object.__setattr__(self, "k", float(self.k))
        if self.kind == "kneser_ney":
            if not 0 < self.discount < 1:
                raise ValueError("Kneser-Ney discount must lie in (0, 1)")
        elif self.kind == "add_k":
            if not self.k >= 0:
                raise ValueError("add-k constant must be >= 0")
        elif self.kind != "unknown":
            raise ValueError(f"unknown smoothing {self.kind!r}")

    @classmethod
    def add_k(cls, k=1.0):
        return cls("add_k", k=k)

    @classmethod
    def kneser_ney(cls, discount=0.75):
        return cls("kneser_ney", discount=discount)

    def describe(self) -> str:
        if self.kind == "add_k":
            return f"smoothing=add_k k={self.k!r}"
        if self.kind == "kneser_ney":
            return f"smoothing=kneser_ney discount={self.discount!r}"
        return "smoothing=unknown"


def _log10(p: float) -> float:
    return math.log10(p) if p > 0 else LOG_ZERO


class NGramLM:
    """Backoff n-gram model. Build with :func:`train_lm` or :func:`load_lm`."""

    def __init__(self, order, tables, smoothing=Smoothing(), unk_threshold=1):
        self.order = order
        # tables[k - 1]: k-gram tuple -> (log10 prob, log10 backoff)
        self.tables = tables
        self.smoothing = smoothing
        self.unk_threshold = unk_threshold
        self.vocabulary = frozenset(w for (w,) in tables[0]) | {BOS, EOS, UNK}

    @property
    def predictable(self) -> list[str]:
        """Words the model can emit (everything but ``<s>``), sorted."""
        return sorted(self.vocabulary - {BOS})

    def map_word(self, word: str) -> str:
        return word if word in self.vocabulary and word != BOS else UNK

    def _log10_prob(self, word: str, context: tuple) -> float:
        backoff = 0.0
        tables = self.tables
        while True:
            entry = tables[len(context)].get(context + (word,))
            if entry is not None:
                if entry[0] <= LOG_ZERO:
                    return -math.inf
                return backoff + entry[0]
            if not context:
                return -math.inf
            ctx = tables[len(context) - 1].get(context)
            if ctx is not None:
                if ctx[1] <= LOG_ZERO:
                    return -math.inf
                backoff += ctx[1]
            context = context[1:]

    def cond_log_prob(self, word: str, context: Sequence[str] = ()) -> float:
        """Natural-log P(word | context); unknown words map to ``<unk>``."""
        context = tuple(w if w == BOS else self.map_word(w) for w in context)
        if self.order > 1:
            context = context[-(self.order - 1) :]
        else:
            context = ()
        return self._log10_prob(self.map_word(word), context) * LN10

    def backoff_weight(self, context: Sequence[str]) -> float:
        """Natural-log backoff weight of a context (0.0 when not stored)."""
        context = tuple(context)
        if not context or len(context) >= self.order:
            return 0.0
        entry = self.tables[len(context) - 1].get(context)
        return entry[1] * LN10 if entry else 0.0

    def __repr__(self):
        sizes = ", ".join(str(len(t)) for t in self.tables)
        return f"NGramLM(order={self.order}, {self.smoothing.describe()}, ngrams=[{sizes}])"


def _sentences(corpus: Iterable) -> list[list[str]]:
    out = []
    for item in corpus:
        if isinstance(item, TokenStream):
            out.extend(item.sentences())
        else:
            out.append(list(item))
    return out


def train_lm(corpus, order: int = 3, smoothing: Smoothing | None = None, unk_threshold: int = 1) -> NGramLM:
    """Estimate an n-gram model from token streams (or plain word lists).

    Each sentence is padded with ``<s>`` and ``</s>``. Words seen fewer than
    ``unk_threshold`` times are replaced by ``<unk>`` before counting.
    """
    smoothing = smoothing or Smoothing()
    if smoothing.kind == "unknown":
        raise ValueError("cannot train with unknown smoothing")
    if not 1 <= order <= 5:
        raise ValueError(f"order must be in [1, 5], got {order}")
    sentences = _sentences(corpus)
    if not sentences:
        raise ValueError("corpus must contain at least one sentence")
    freq = Counter(w for s in sentences for w in s)
    rare = {w for w, c in freq.items() if c < unk_threshold}
    padded = [[BOS] + [UNK if w in rare or w == BOS else w for w in s] + [EOS] for s in sentences]

    # raw[k]: counts of k-grams whose last word is predicted
    raw = [Counter() for _ in range(order + 1)]
    for sent in padded:
        for j in range(1, len(sent)):
            for k in range(1, min(order, j + 1) + 1):
                raw[k][tuple(sent[j - k + 1 : j + 1])] += 1

    vocab = sorted(({w for s in padded for w in s} | {UNK, EOS}) - {BOS})
    if smoothing.kind == "kneser_ney":
        tables = _estimate_kn(raw, order, vocab, smoothing.discount)
    else:
        tables = _estimate_add_k(raw, order, vocab, smoothing.k)
    return NGramLM(order, tables, smoothing, unk_threshold)


def _context_stats(counts: Counter):
    total: dict[tuple, float] = defaultdict(float)
    distinct: dict[tuple, int] = defaultdict(int)
    for gram, c in counts.items():
        total[gram[:-1]] += c
        distinct[gram[:-1]] += 1
    return total, distinct


def _estimate_kn(raw, order, vocab, D):
    # Highest order keeps raw counts; lower orders count distinct left
    # extensions, except n-grams opening with <s>, which have none.
    cont = [Counter() for _ in range(order + 1)]
    cont[order] = raw[order]
    for k in range(order - 1, 0, -1):
        ext = Counter(gram[1:] for gram in raw[k + 1])
        for gram, c in raw[k].items():
            cont[k][gram] = c if gram[0] == BOS else ext[gram]

    V = len(vocab)
    probs: list[dict] = [dict() for _ in range(order + 1)]
    gammas: list[dict] = [dict() for _ in range(order + 1)]

    def lower(word, context):
        # Exact interpolated probability of word after context.
        k = len(context) + 1
        if k == 1:
            p = probs[1].get((word,))
            return p if p is not None else gammas[1][()] / V
        p = probs[k].get(context + (word,))
        if p is not None:
            return p
        g = gammas[k].get(context)
        base = lower(word, context[1:])
        return base if g is None else g * base

    for k in range(1, order + 1):
        total, distinct = _context_stats(cont[k])
        for ctx in total:
            gammas[k][ctx] = D * distinct[ctx] / total[ctx]
        for gram, c in cont[k].items():
            ctx = gram[:-1]
            base = 1.0 / V if k == 1 else lower(gram[-1], ctx[1:])
            probs[k][gram] = max(c - D, 0.0) / total[ctx] + gammas[k][ctx] * base
        if k == 1:
            gammas[1].setdefault((), 1.0)
            for w in vocab:
                probs[1].setdefault((w,), gammas[1][()] / V)
    return _to_tables(probs, gammas, order)


def _estimate_add_k(raw, order, vocab, kk):
    V = len(vocab)
    probs: list[dict] = [dict() for _ in range(order + 1)]
    alphas: list[dict] = [dict() for _ in range(order + 1)]
    n1 = sum(raw[1].values())
    for w in vocab:
        denom = n1 + kk * V
        probs[1][(w,)] = (raw[1].get((w,), 0) + kk) / denom if denom > 0 else 0.0

    def lower(word, context):
        k = len(context) + 1
        if k == 1:
            return probs[1][(word,)]
        p = probs[k].get(context + (word,))
        if p is not None:
            return p
        a = alphas[k].get(context)
        base = lower(word, context[1:])
        return base if a is None else a * base

    for k in range(2, order + 1):
        total, distinct = _context_stats(raw[k])
        seen_lower: dict[tuple, float] = defaultdict(float)
        for gram, c in raw[k].items():
            ctx = gram[:-1]
            probs[k][gram] = (c + kk) / (total[ctx] + kk * V)
            seen_lower[ctx] += lower(gram[-1], ctx[1:])
        for ctx in total:
            left = kk * (V - distinct[ctx]) / (total[ctx] + kk * V)
            free = 1.0 - seen_lower[ctx]
            alphas[k][ctx] = left / free if left > 0 and free > 0 else 0.0
    return _to_tables(probs, alphas, order)


def _to_tables(probs, weights, order):
    tables = []
    for k in range(1, order + 1):
        table = {}
        for gram in sorted(probs[k]):
            table[gram] = (_log10(probs[k][gram]), 0.0)
        if k < order:
            for ctx, w in weights[k + 1].items():
                if ctx not in table:
                    # Contexts are always stored; <s> itself is never predicted.
                    table[ctx] = (LOG_ZERO, 0.0)
                table[ctx] = (table[ctx][0], _log10(w))
        tables.append(table)
    return tables


def log_prob(lm: NGramLM, tokens: Sequence[str]) -> float:
    """Natural-log probability of one sentence including ``</s>``."""
    words = [lm.map_word(w) for w in tokens] + [EOS]
    history = [BOS]
    total10 = 0.0
    n = lm.order - 1
    for w in words:
        ctx = tuple(history[-n:]) if n else ()
        total10 += lm._log10_prob(w, ctx)
        history.append(w)
    return total10 * LN10


def perplexity(lm: NGramLM, corpus) -> float:
    sentences = _sentences(corpus)
    if not sentences:
        raise ValueError("corpus must contain at least one sentence")
    total = sum(log_prob(lm, s) for s in sentences)
    count = sum(len(s) + 1 for s in sentences)
    return math.exp(-total / count)


def format_arpa(lm: NGramLM) -> str:
    lines = [f"# courtlex-lm order={lm.order} {lm.smoothing.describe()} unk_threshold={lm.unk_threshold}", "", "\\data\\"]
    for k, table in enumerate(lm.tables, 1):
        lines.append(f"ngram {k}={len(table)}")
    for k, table in enumerate(lm.tables, 1):
        lines += ["", f"\\{k}-grams:"]
        for gram in sorted(table):
            p, bow = table[gram]
            row = f"{p!r}\t{' '.join(gram)}"
            if k < lm.order:
                row += f"\t{bow!r}"
            lines.append(row)
    lines += ["", "\\end\\", ""]
    return "\n".join(lines)


def save_lm(lm: NGramLM, path) -> None:
    from .io import atomic_write_text

    atomic_write_text(path, format_arpa(lm))


def _parse_header(line: str):
    fields = dict(f.split("=", 1) for f in line[1:].split() if "=" in f)
    kind = fields.get("smoothing", "unknown")
    try:
        if kind == "kneser_ney":
            smoothing = Smoothing.kneser_ney(float(fields["discount"]))
        elif kind == "add_k":
            smoothing = Smoothing.add_k(float(fields["k"]))
        else:
            smoothing = Smoothing("unknown")
        unk = int(fields.get("unk_threshold", 1))
    except (KeyError, ValueError):
        return Smoothing("unknown"), 1
    return smoothing, unk


def parse_arpa(text: str, source=None) -> NGramLM:
    smoothing, unk_threshold = Smoothing("unknown"), 1
    declared: dict[int, int] = {}
    declared_at: dict[int, int] = {}
    tables: list[dict] = []
    section = None
    lines = text.splitlines()
    i = 0
    while i < len(lines) and lines[i].strip() != "\\data\\":
        if lines[i].startswith("# courtlex-lm"):
            smoothing, unk_threshold = _parse_header(lines[i])
        i += 1
    if i == len(lines):
        raise FormatError("missing \\data\\ section", path=source)
    ended = False
    for lineno in range(i + 2, len(lines) + 1):
        line = lines[lineno - 1].strip()
        where = f"line {lineno}"
        if not line:
            continue
        if line == "\\end\\":
            ended = True
            break
        if line.startswith("ngram "):
            if section is not None:
                raise FormatError("ngram count after n-gram sections", where=where, path=source)
            try:
                k, n = line[6:].split("=")
                declared[int(k)] = int(n)
                declared_at[int(k)] = lineno
            except ValueError:
                raise FormatError(f"bad count line {line!r}", where=where, path=source) from None
            continue
        if line.startswith("\\") and line.endswith("-grams:"):
            try:
                section = int(line[1:-7])
            except ValueError:
                raise FormatError(f"bad section header {line!r}", where=where, path=source) from None
            if section != len(tables) + 1 or section not in declared:
                raise FormatError(f"unexpected section {line!r}", where=where, path=source)
            tables.append({})
            continue
        if section is None:
            raise FormatError(f"unexpected line {line!r}", where=where, path=source)
        cols = line.split("\t")
        if len(cols) not in (2, 3):
            raise FormatError("expected 'log10prob<TAB>ngram[<TAB>log10backoff]'", where=where, path=source)
        gram = tuple(cols[1].split(" "))
        if len(gram) != section:
            raise FormatError(f"{section}-gram row has {len(gram)} words", where=where, path=source)
        try:
            p = float(cols[0])
            bow = float(cols[2]) if len(cols) == 3 else 0.0
        except ValueError:
            raise FormatError("non-numeric probability or backoff", where=where, path=source) from None
        tables[-1][gram] = (p, bow)
    if not ended:
        raise FormatError("missing \\end\\ terminator", path=source)
    if not tables or sorted(declared) != list(range(1, len(tables) + 1)):
        raise FormatError(f"declared orders {sorted(declared)} but found {len(tables)} sections", path=source)
    for k, table in enumerate(tables, 1):
        if len(table) != declared[k]:
            raise FormatError(
                f"header declares {declared[k]} {k}-grams, body has {len(table)}",
                where=f"line {declared_at[k]}",
                path=source,
            )
    return NGramLM(len(tables), tables, smoothing, unk_threshold)


def load_lm(path) -> NGramLM:
    path = Path(path)
    return parse_arpa(path.read_text(encoding="utf-8"), source=path)
