"""Custom vocabulary assembly and cloud-ASR hint tables."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .collocations import PhraseEntry
from .errors import FormatError

logger = logging.getLogger(__name__)

SOURCES = ("manual", "entity", "collocation")
DEFAULT_CAPS = {"collocation": 500, "entity": 500}
HINT_HEADER = "Phrase\tIPA\tSoundsLike\tDisplayAs\n"

_SOUNDS_LIKE_RE = re.compile(r"[a-z]+(?:-[a-z]+)*")


@dataclass(frozen=True)
class VocabularyEntry:
    phrase: tuple[str, ...]
    display_as: str = ""
    sounds_like: str | None = None
    source: str = "manual"
    category: str | None = None

    def __post_init__(self):
        phrase = tuple(self.phrase)
        object.__setattr__(self, "phrase", phrase)
        if not phrase or not all(phrase):
            raise ValueError("vocabulary phrase must be non-empty")
        if not self.display_as:
            object.__setattr__(self, "display_as", " ".join(phrase))
        if self.sounds_like is not None and not _SOUNDS_LIKE_RE.fullmatch(self.sounds_like):
            raise ValueError(f"malformed sounds-like {self.sounds_like!r} for {' '.join(phrase)!r}")
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")

    @property
    def text(self) -> str:
        return " ".join(self.phrase)


def build_vocabulary(
    phrases: Sequence[PhraseEntry] = (),
    inventory: Mapping[str, Sequence[tuple[str, int]]] | None = None,
    overrides: Sequence[VocabularyEntry] = (),
    caps: Mapping[str, int] | None = None,
) -> list[VocabularyEntry]:
    """Merge manual entries, entity surfaces and collocations.

    Manual overrides come first in their given order and win any duplicate.
    Entity surfaces follow (most frequent first, ties alphabetical), then
    collocations (same ordering). Each source is capped; overrides carrying a
    source label count against that source's cap, which keeps the function
    idempotent when its output is fed back as overrides.
    """
    caps = {**DEFAULT_CAPS, **(caps or {})}
    out: list[VocabularyEntry] = []
    seen: set[tuple[str, ...]] = set()
    used = {s: 0 for s in SOURCES}

    for entry in overrides:
        if entry.phrase in seen:
            continue
        seen.add(entry.phrase)
        used[entry.source] += 1
        out.append(entry)

    entity_rows = []
    for category, rows in (inventory or {}).items():
        for surface, freq in rows:
            entity_rows.append((-freq, surface, category))
    entity_rows.sort()
    candidates = [
        VocabularyEntry(tuple(surface.split()), source="entity", category=category) for _, surface, category in entity_rows
    ]
    ordered = sorted(phrases, key=lambda p: (-p.frequency, p.tokens))
    candidates += [VocabularyEntry(p.tokens, source="collocation") for p in ordered]

    for entry in candidates:
        if entry.phrase in seen:
            continue
        cap = caps.get(entry.source)
        if cap is not None and used[entry.source] >= cap:
            continue
        seen.add(entry.phrase)
        used[entry.source] += 1
        out.append(entry)
    return out


def apply_pronunciation_overrides(entries: Sequence[VocabularyEntry], pronunciations: Mapping) -> list[VocabularyEntry]:
    """Attach sounds-like hints; keys may be word tuples or space-joined strings."""
    wanted = {}
    for key, sounds in pronunciations.items():
        phrase = tuple(key.split()) if isinstance(key, str) else tuple(key)
        if not isinstance(sounds, str) or not _SOUNDS_LIKE_RE.fullmatch(sounds):
            raise ValueError(f"malformed sounds-like {sounds!r} for phrase {' '.join(phrase)!r}")
        wanted[phrase] = sounds
    present = {e.phrase for e in entries}
    for phrase in wanted:
        if phrase not in present:
            logger.warning("pronunciation given for absent phrase %r", " ".join(phrase))
    return [replace(e, sounds_like=wanted[e.phrase]) if e.phrase in wanted else e for e in entries]


def render_hint_table(entries: Iterable[VocabularyEntry]) -> str:
    rows = [HINT_HEADER]
    for e in entries:
        rows.append(f"{'-'.join(e.phrase)}\t\t{e.sounds_like or ''}\t{e.display_as}\n")
    return "".join(rows)


def parse_hint_table(text: str) -> list[VocabularyEntry]:
    """Inverse of :func:`render_hint_table` for phrases without inner hyphens.

    Source labels are not part of the table; entries come back as manual.
    """
    lines = text.splitlines()
    if not lines or lines[0] + "\n" != HINT_HEADER:
        raise FormatError("missing hint table header", where="line 1")
    out = []
    for lineno, line in enumerate(lines[1:], 2):
        cols = line.split("\t")
        if len(cols) != 4:
            raise FormatError("expected 4 tab-separated columns", where=f"line {lineno}")
        phrase, _ipa, sounds, display = cols
        out.append(VocabularyEntry(tuple(phrase.split("-")), display, sounds or None))
    return out


def parse_overrides(text: str, source=None) -> list[VocabularyEntry]:
    """Read manual entries: ``phrase<TAB>sounds_like<TAB>display_as`` per line.

    The last two columns may be empty or omitted.
    """
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) > 3:
            raise FormatError("expected 'phrase<TAB>sounds_like<TAB>display_as'", where=f"line {lineno}", path=source)
        cols += [""] * (3 - len(cols))
        try:
            out.append(VocabularyEntry(tuple(cols[0].split()), cols[2].strip(), cols[1].strip() or None))
        except ValueError as exc:
            raise FormatError(str(exc), where=f"line {lineno}", path=source) from None
    return out


def load_overrides(path) -> list[VocabularyEntry]:
    path = Path(path)
    return parse_overrides(path.read_text(encoding="utf-8"), source=path)


def pronunciations_from(entries: Iterable[VocabularyEntry]) -> dict[tuple[str, ...], str]:
    return {e.phrase: e.sounds_like for e in entries if e.sounds_like}
