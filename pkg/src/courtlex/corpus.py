"""Document ingestion, text normalization and tokenization.

Every other module works on :class:`TokenStream` objects built here, so the
normalizer is the single place that decides what counts as "the same word"
when computing WER or matching vocabulary.
"""

from __future__ import annotations

import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import FormatError

logger = logging.getLogger(__name__)

KINDS = ("judgement", "gold_transcript", "asr_output")

_APOSTROPHES = str.maketrans({"’": "'", "‘": "'", "ʼ": "'", "‛": "'", "`": "'"})
# Em dash and friends separate words; an en dash is a range hyphen ("(a)–(h)").
_DASHES = str.maketrans({"—": " ", "―": " ", "–": "-", "−": "-"})

_TOKEN_RE = re.compile(r"\S+")
_SENT_END_RE = re.compile(r"(?<=[.!?])[\"')\]]*\s+")
_ABBREVIATIONS = frozenset(
    {"mr", "mrs", "ms", "dr", "v", "vs", "no", "st", "sr", "jr", "cf", "eg", "ie", "art", "para", "sch", "s"}
)


def _matched_close(token: str) -> bool:
    """Whether the final ')' of ``token`` closes an earlier '('."""
    depth = 0
    for ch in token[:-1]:
        if ch == "(":
            depth += 1
        elif ch == ")" and depth:
            depth -= 1
    return depth > 0


def _matched_open(token: str) -> bool:
    """Whether the leading '(' of ``token`` is closed later on."""
    depth = 0
    for ch in reversed(token[1:]):
        if ch == ")":
            depth += 1
        elif ch == "(" and depth:
            depth -= 1
    return depth > 0


def _edge_bounds(token: str) -> tuple[int, int]:
    """Return (start, end) of the token core after stripping edge punctuation.

    Parentheses survive at an edge only when balanced inside the token, so
    "25(2)(a)-(h)" is kept whole while "(see" loses its bracket.
    """
    start, end = 0, len(token)
    while start < end:
        changed = False
        while start < end and not token[start].isalnum():
            if token[start] == "(" and _matched_open(token[start:end]):
                break
            start += 1
            changed = True
        while end > start and not token[end - 1].isalnum():
            if token[end - 1] == ")" and _matched_close(token[start:end]):
                break
            end -= 1
            changed = True
        if not changed:
            break
    return start, end


def _strip_edges(token: str) -> str:
    start, end = _edge_bounds(token)
    return token[start:end]


def normalize_token(token: str) -> str:
    """Normalize one whitespace-free token; may return ''."""
    token = token.translate(_APOSTROPHES)
    # Strip before and after lowercasing: lower() can emit combining marks.
    return _strip_edges(_strip_edges(token).lower())


def normalize_text(raw: str) -> str:
    """Lowercase, unify apostrophes, strip edge punctuation, collapse whitespace.

    Periods, hyphens and parentheses inside a token are kept so provision
    references such as "25(2)(a)-(h)" or "3.17" survive intact.

    >>> normalize_text("So, My Lady —")
    'so my lady'
    """
    raw = raw.translate(_DASHES)
    words = (normalize_token(t) for t in raw.split())
    return " ".join(w for w in words if w)


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    char_span: tuple[int, int]

    def __post_init__(self):
        start, end = self.char_span
        if not start < end:
            raise ValueError(f"empty char span {self.char_span}")
        if not self.normalized:
            raise ValueError("token normalized form must be non-empty")


@dataclass(frozen=True)
class TokenStream:
    """Ordered tokens of one document plus sentence boundaries.

    ``sentence_bounds`` holds half-open (start, end) token-index ranges that
    partition the token list.
    """

    document_id: str
    tokens: tuple[Token, ...] = ()
    sentence_bounds: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        bounds = tuple(tuple(b) for b in self.sentence_bounds)
        if not bounds and self.tokens:
            bounds = ((0, len(self.tokens)),)
        object.__setattr__(self, "sentence_bounds", bounds)
        pos = 0
        for start, end in bounds:
            if start != pos or end <= start:
                raise ValueError(f"sentence bounds do not partition the tokens: {bounds}")
            pos = end
        if pos != len(self.tokens):
            raise ValueError(f"sentence bounds cover {pos} of {len(self.tokens)} tokens")
        prev_end = 0
        for tok in self.tokens:
            if tok.char_span[0] < prev_end:
                raise ValueError("token spans overlap or are out of order")
            prev_end = tok.char_span[1]

    def __len__(self):
        return len(self.tokens)

    @property
    def words(self) -> list[str]:
        return [t.normalized for t in self.tokens]

    def sentences(self) -> Iterator[list[str]]:
        words = self.words
        for start, end in self.sentence_bounds:
            yield words[start:end]

    def text(self) -> str:
        return " ".join(self.words)

    @classmethod
    def from_words(cls, words: Iterable[str], document_id: str = "", sentences: Sequence[int] | None = None):
        """Build a stream from already-normalized words.

        Spans index into ``" ".join(words)``. ``sentences`` optionally gives
        sentence lengths; by default the words form one sentence.
        """
        tokens = []
        pos = 0
        for w in words:
            tokens.append(Token(w, w, (pos, pos + len(w))))
            pos += len(w) + 1
        if sentences is None:
            bounds = ((0, len(tokens)),) if tokens else ()
        else:
            bounds, start = [], 0
            for n in sentences:
                if n:
                    bounds.append((start, start + n))
                    start += n
        return cls(document_id, tuple(tokens), tuple(bounds))

    @classmethod
    def from_sentences(cls, sentences: Iterable[Sequence[str]], document_id: str = ""):
        sentences = [list(s) for s in sentences]
        words = [w for s in sentences for w in s]
        return cls.from_words(words, document_id, [len(s) for s in sentences])


def tokenize(normalized: str, document_id: str = "") -> TokenStream:
    """Split normalized text on whitespace; spans index into ``normalized``."""
    tokens = tuple(Token(m.group(), m.group(), m.span()) for m in _TOKEN_RE.finditer(normalized))
    return TokenStream(document_id, tokens)


def _split_line(line: str, offset: int) -> Iterator[tuple[int, int]]:
    """Yield raw-text spans of the sentences in one line."""
    start = 0
    for m in _SENT_END_RE.finditer(line):
        before = line[start : m.start()].rstrip("\"')]")
        last = before.rsplit(None, 1)[-1] if before.strip() else ""
        if last.rstrip(".").lower() in _ABBREVIATIONS and last.endswith("."):
            continue
        yield offset + start, offset + m.start()
        start = m.end()
    if start < len(line):
        yield offset + start, offset + len(line)


def sentence_spans(raw: str, by_line: bool = True) -> list[tuple[int, int]]:
    """Character spans of sentences in ``raw``.

    Sentences end at terminal punctuation followed by whitespace. With
    ``by_line`` every line break is also a boundary (one utterance per line);
    otherwise only blank lines are, so wrapped prose stays joined.
    """
    spans = []
    if by_line:
        blocks = [(m.start(), m.group()) for m in re.finditer(r"[^\n]+", raw)]
    else:
        blocks = [(m.start(), m.group()) for m in re.finditer(r"\S(?:.|\n(?![ \t]*\n))*", raw)]
    for offset, block in blocks:
        spans.extend(_split_line(block, offset))
    return spans


def analyze(raw: str, document_id: str = "", by_line: bool = True) -> TokenStream:
    """Normalize and tokenize raw text, keeping spans into ``raw``.

    Sentences left empty after normalization are dropped.
    """
    tokens: list[Token] = []
    bounds: list[tuple[int, int]] = []
    for s_start, s_end in sentence_spans(raw, by_line=by_line):
        first = len(tokens)
        chunk = raw[s_start:s_end].translate(_APOSTROPHES).translate(_DASHES)
        for m in _TOKEN_RE.finditer(chunk):
            piece = m.group()
            start, end = _edge_bounds(piece)
            norm = normalize_token(piece)
            if not norm:
                continue
            a, b = s_start + m.start() + start, s_start + m.start() + end
            tokens.append(Token(raw[a:b], norm, (a, b)))
        if len(tokens) > first:
            bounds.append((first, len(tokens)))
    return TokenStream(document_id, tuple(tokens), tuple(bounds))


@dataclass(frozen=True)
class Document:
    id: str
    kind: str
    raw_text: str
    metadata: dict = field(default_factory=dict)
    # Parsed n-best lists, populated for asr_output documents.
    nbest: tuple = ()

    def __post_init__(self):
        if not self.id:
            raise ValueError("document id must be non-empty")
        if self.kind not in KINDS:
            raise ValueError(f"unknown document kind {self.kind!r}; expected one of {KINDS}")

    @property
    def text(self) -> str:
        """Transcribable text: the raw text, or top-1 hypotheses for ASR output."""
        if self.kind == "asr_output":
            return "\n".join(" ".join(nb.hypotheses[0].tokens) for nb in self.nbest)
        return self.raw_text

    def stream(self) -> TokenStream:
        return analyze(self.text, self.id, by_line=self.kind != "judgement")


def ingest_document(path, kind: str, doc_id: str | None = None) -> Document:
    """Read a document from disk.

    Plain-text files are kept byte-for-byte (decoded as UTF-8). ASR JSON files
    are parsed eagerly so a malformed file fails here, naming the bad field.
    """
    path = Path(path)
    if kind not in KINDS:
        raise ValueError(f"unknown document kind {kind!r}; expected one of {KINDS}")
    data = path.read_bytes()
    try:
        raw = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"not valid UTF-8 ({exc.reason} at byte {exc.start})", path=path) from None
    nbest: tuple = ()
    if kind == "asr_output":
        from .rescore import parse_asr_text

        nbest = tuple(parse_asr_text(raw, source=path))
    metadata = {"source": str(path), "case_id": path.stem}
    return Document(doc_id or path.stem, kind, raw, metadata, nbest)


def read_manifest(path) -> list[tuple[Path, str]]:
    """Parse a corpus manifest: ``path<TAB>kind`` per line.

    Relative paths resolve against the manifest's directory; blank lines and
    lines starting with '#' are skipped.
    """
    path = Path(path)
    entries = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.rstrip("\r").split("\t")
        if len(parts) != 2:
            raise FormatError("expected 'path<TAB>kind'", where=f"line {lineno}", path=path)
        file_path, kind = parts[0].strip(), parts[1].strip()
        if kind not in KINDS:
            raise FormatError(f"unknown kind {kind!r}", where=f"line {lineno}", path=path)
        p = Path(file_path)
        entries.append((p if p.is_absolute() else path.parent / p, kind))
    return entries


def load_corpus(manifest, threads: int | None = None) -> list[Document]:
    """Ingest every document listed in a manifest, preserving manifest order."""
    entries = read_manifest(manifest)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        docs = list(pool.map(lambda e: ingest_document(*e), entries))
    seen = set()
    for doc in docs:
        if doc.id in seen:
            raise FormatError(f"duplicate document id {doc.id!r}", path=manifest)
        seen.add(doc.id)
    logger.info("ingested %d documents from %s", len(docs), manifest)
    return docs
