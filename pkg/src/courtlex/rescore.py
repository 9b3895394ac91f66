"""N-best rescoring with an in-domain LM and vocabulary boosts.

Also home to the ASR JSON codec and a seeded error simulator that produces
n-best lists from reference text, so the pipeline runs without a cloud ASR.
"""

from __future__ import annotations

import difflib
import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import TokenStream, normalize_text
from .errors import FormatError
from .lm import NGramLM, log_prob

# Confidence floor applied before taking logs.
CONFIDENCE_FLOOR = 1e-10


@dataclass(frozen=True)
class Hypothesis:
    tokens: tuple[str, ...]
    asr_logscore: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.asr_logscore <= 0:
            raise ValueError(f"asr_logscore must be <= 0, got {self.asr_logscore}")

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class NBestList:
    utterance_id: str
    hypotheses: tuple[Hypothesis, ...]

    def __post_init__(self):
        hyps = tuple(self.hypotheses)
        object.__setattr__(self, "hypotheses", hyps)
        if not hyps:
            raise ValueError(f"n-best list {self.utterance_id!r} is empty")
        for a, b in zip(hyps, hyps[1:]):
            if a.asr_logscore < b.asr_logscore:
                raise ValueError(f"n-best list {self.utterance_id!r} is not sorted by asr_logscore")

    def __len__(self):
        return len(self.hypotheses)

    @property
    def top(self) -> Hypothesis:
        return self.hypotheses[0]


@dataclass(frozen=True)
class RescoreWeights:
    lam: float = 0.5
    beta: float = 0.5
    length_norm: bool = True

    def __post_init__(self):
        if not 0 <= self.lam <= 1:
            raise ValueError(f"lambda must lie in [0, 1], got {self.lam}")
        if not self.beta >= 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")


class PhraseMatcher:
    """Counts non-overlapping vocabulary phrases, longest first, left to right."""

    def __init__(self, phrases: Iterable[Sequence[str]]):
        self.phrases = {tuple(p) for p in phrases if p}
        self.max_len = max((len(p) for p in self.phrases), default=0)

    @classmethod
    def from_vocabulary(cls, vocab) -> "PhraseMatcher":
        if isinstance(vocab, PhraseMatcher):
            return vocab
        return cls(e.phrase for e in vocab or ())

    def count(self, tokens: Sequence[str]) -> int:
        hits, i, n = 0, 0, len(tokens)
        while i < n:
            for length in range(min(self.max_len, n - i), 0, -1):
                if tuple(tokens[i : i + length]) in self.phrases:
                    hits += 1
                    i += length
                    break
            else:
                i += 1
        return hits


def hypothesis_score(hyp: Hypothesis, lm: NGramLM, matcher: PhraseMatcher, weights: RescoreWeights) -> float:
    lm_score = log_prob(lm, hyp.tokens) if weights.lam < 1 else 0.0
    if weights.length_norm:
        lm_score /= len(hyp.tokens) + 1
    hits = matcher.count(hyp.tokens) if weights.beta else 0
    return weights.lam * hyp.asr_logscore + (1 - weights.lam) * lm_score + weights.beta * hits


def rescore(nbest: NBestList, lm: NGramLM, vocab, weights: RescoreWeights | None = None) -> Hypothesis:
    """Pick the hypothesis maximizing the fused score.

    Ties go to the higher ASR score, then to the earlier n-best rank.
    """
    weights = weights or RescoreWeights()
    matcher = PhraseMatcher.from_vocabulary(vocab)
    best_key, best = None, None
    for rank, hyp in enumerate(nbest.hypotheses):
        key = (hypothesis_score(hyp, lm, matcher, weights), hyp.asr_logscore, -rank)
        if best_key is None or key > best_key:
            best_key, best = key, hyp
    return best


def rescore_all(nbests: Iterable[NBestList], lm, vocab, weights=None) -> list[tuple[str, Hypothesis]]:
    matcher = PhraseMatcher.from_vocabulary(vocab)
    return [(nb.utterance_id, rescore(nb, lm, matcher, weights)) for nb in nbests]


def format_rescored(results: Iterable[tuple[str, Hypothesis]]) -> str:
    return "".join(f"{uid}\t{hyp.text}\n" for uid, hyp in results)


# ---------------------------------------------------------------- ASR JSON


def _fail(msg, where, source):
    raise FormatError(msg, where=where, path=source)


def parse_asr_text(text: str, source=None) -> list[NBestList]:
    """Parse the ASR JSON schema into n-best lists, in file order.

    Schema: ``{"utterances": [{"id": str, "alternatives": [{"transcript":
    str, "confidence": number in [0, 1]}, ...]}, ...]}``. Confidences become
    natural-log scores; alternatives are re-sorted by score (stable).
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        _fail(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}", source)
    if not isinstance(data, dict) or "utterances" not in data:
        _fail("missing top-level 'utterances'", "utterances", source)
    utterances = data["utterances"]
    if not isinstance(utterances, list):
        _fail("must be an array", "utterances", source)
    out, ids = [], set()
    for i, utt in enumerate(utterances):
        base = f"utterances[{i}]"
        if not isinstance(utt, dict):
            _fail("must be an object", base, source)
        uid = utt.get("id")
        if not isinstance(uid, str) or not uid:
            _fail("missing or empty string", f"{base}.id", source)
        if uid in ids:
            _fail(f"duplicate utterance id {uid!r}", f"{base}.id", source)
        ids.add(uid)
        alts = utt.get("alternatives")
        if not isinstance(alts, list) or not alts:
            _fail("must be a non-empty array", f"{base}.alternatives", source)
        hyps = []
        for j, alt in enumerate(alts):
            where = f"{base}.alternatives[{j}]"
            if not isinstance(alt, dict):
                _fail("must be an object", where, source)
            transcript = alt.get("transcript")
            if not isinstance(transcript, str):
                _fail("missing or non-string", f"{where}.transcript", source)
            conf = alt.get("confidence")
            if isinstance(conf, bool) or not isinstance(conf, (int, float)) or not 0 <= conf <= 1:
                _fail("missing or not a number in [0, 1]", f"{where}.confidence", source)
            score = min(0.0, math.log(max(conf, CONFIDENCE_FLOOR)))
            hyps.append(Hypothesis(tuple(normalize_text(transcript).split()), score))
        hyps.sort(key=lambda h: -h.asr_logscore)
        out.append(NBestList(uid, tuple(hyps)))
    return out


def parse_asr_json(path) -> list[NBestList]:
    path = Path(path)
    return parse_asr_text(path.read_text(encoding="utf-8"), source=path)


def format_asr_json(nbests: Iterable[NBestList]) -> str:
    data = {
        "utterances": [
            {
                "id": nb.utterance_id,
                "alternatives": [{"transcript": h.text, "confidence": math.exp(h.asr_logscore)} for h in nb.hypotheses],
            }
            for nb in nbests
        ]
    }
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- simulator


class ConfusionSampler:
    """Proposes near-spelling confusions drawn from a fixed vocabulary."""

    def __init__(self, vocabulary: Iterable[str], cutoff: float = 0.6, width: int = 5):
        self.vocabulary = sorted(set(vocabulary))
        self.cutoff = cutoff
        self.width = width
        self._cache: dict[str, list[str]] = {}

    def neighbours(self, word: str) -> list[str]:
        near = self._cache.get(word)
        if near is None:
            near = [w for w in difflib.get_close_matches(word, self.vocabulary, self.width + 1, self.cutoff) if w != word]
            self._cache[word] = near[: self.width]
        return near

    def substitute(self, word: str, rng: random.Random) -> str:
        near = self.neighbours(word)
        if near:
            return rng.choice(near)
        others = [w for w in self.vocabulary if w != word]
        return rng.choice(others) if others else word + word[-1]

    def random_word(self, rng: random.Random) -> str:
        return rng.choice(self.vocabulary) if self.vocabulary else "um"


@dataclass
class ErrorModel:
    substitution_rate: float = 0.0
    deletion_rate: float = 0.0
    insertion_rate: float = 0.0
    split_rate: float = 0.0
    merge_rate: float = 0.0
    seed: int = 0
    vocabulary: Sequence[str] = ()
    sampler: ConfusionSampler | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        rates = self.rates
        for name, r in zip(("substitution", "deletion", "insertion", "split", "merge"), rates):
            if not 0 <= r <= 1:
                raise ValueError(f"{name}_rate must lie in [0, 1], got {r}")
        if sum(rates) > 1 + 1e-12:
            raise ValueError(f"error rates sum to {sum(rates)} > 1")
        if self.sampler is None:
            self.sampler = ConfusionSampler(self.vocabulary)

    @property
    def rates(self) -> tuple[float, ...]:
        return (self.substitution_rate, self.deletion_rate, self.insertion_rate, self.split_rate, self.merge_rate)


def _corrupt(words: Sequence[str], model: ErrorModel, rng: random.Random) -> tuple[list[str], int]:
    sub, dele, ins, split, merge = model.rates
    out: list[str] = []
    errors = 0
    i, n = 0, len(words)
    while i < n:
        w = words[i]
        u = rng.random()
        if u < sub:
            out.append(model.sampler.substitute(w, rng))
            errors += 1
        elif u < sub + dele:
            errors += 1
        elif u < sub + dele + ins:
            out += [w, model.sampler.random_word(rng)]
            errors += 1
        elif u < sub + dele + ins + split:
            if len(w) >= 2:
                cut = rng.randrange(1, len(w))
                out += [w[:cut], w[cut:]]
                errors += 1
            else:
                out.append(w)
        elif u < sub + dele + ins + split + merge and i + 1 < n:
            fused = w + words[i + 1]
            near = model.sampler.neighbours(fused)
            out.append(near[0] if near else fused)
            errors += 1
            i += 1
        else:
            out.append(w)
        i += 1
    return out, errors


def simulate_asr(reference, model: ErrorModel, n: int = 5, utterance_id: str | None = None) -> NBestList:
    """Corrupt ``reference`` ``n`` times independently into an n-best list.

    Each hypothesis scores minus its number of corruptions. Duplicates are
    dropped and the rest sorted by score, keeping generation order on ties.
    The random stream depends only on the seed and the utterance id.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if isinstance(reference, TokenStream):
        words = reference.words
        uid = utterance_id or reference.document_id
    else:
        words = list(reference)
        uid = utterance_id or ""
    rng = random.Random(f"{model.seed}|{uid}")
    seen = set()
    hyps = []
    for _ in range(n):
        tokens, errors = _corrupt(words, model, rng)
        key = tuple(tokens)
        if key in seen:
            continue
        seen.add(key)
        hyps.append(Hypothesis(key, -float(errors) if errors else 0.0))
    hyps.sort(key=lambda h: -h.asr_logscore)
    return NBestList(uid, tuple(hyps))
