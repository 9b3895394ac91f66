"""Alignment-based WER and entity-capture evaluation with tabular reports."""

from __future__ import annotations

import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .corpus import TokenStream
from .entities import CATEGORIES, RuleSet, extract_entities
from .errors import UndefinedWerError

MATCH, SUB, DEL, INS = "match", "substitution", "deletion", "insertion"


@dataclass(frozen=True)
class EditOp:
    kind: str
    ref_index: int | None
    hyp_index: int | None


@dataclass(frozen=True)
class Alignment:
    ops: tuple[EditOp, ...]

    def count(self, kind: str) -> int:
        return sum(1 for op in self.ops if op.kind == kind)

    @property
    def distance(self) -> int:
        return sum(1 for op in self.ops if op.kind != MATCH)

    def matched_ref(self) -> set[int]:
        return {op.ref_index for op in self.ops if op.kind == MATCH}

    def shifted(self, ref_offset: int, hyp_offset: int) -> "Alignment":
        return Alignment(
            tuple(
                EditOp(
                    op.kind,
                    None if op.ref_index is None else op.ref_index + ref_offset,
                    None if op.hyp_index is None else op.hyp_index + hyp_offset,
                )
                for op in self.ops
            )
        )

    def __add__(self, other: "Alignment") -> "Alignment":
        return Alignment(self.ops + other.ops)


def _words(x) -> list[str]:
    return x.words if isinstance(x, TokenStream) else list(x)


def _suffix_costs(ref: list[str], hyp: list[str]) -> np.ndarray:
    """cost[i, j] = edit distance between ref[i:] and hyp[j:]."""
    n, m = len(ref), len(hyp)
    ids: dict[str, int] = {}
    r = np.array([ids.setdefault(w, len(ids)) for w in ref], dtype=np.int64)
    h = np.array([ids.setdefault(w, len(ids)) for w in hyp], dtype=np.int64)
    cost = np.empty((n + 1, m + 1), dtype=np.int64)
    cost[n] = np.arange(m, -1, -1)
    idx = np.arange(m + 1)
    for i in range(n - 1, -1, -1):
        best = cost[i + 1] + 1
        best[:m] = np.minimum(best[:m], cost[i + 1, 1:] + (h != r[i]))
        # Insertions run right to left along the row: a reverse running min.
        shifted = best + idx
        cost[i] = np.minimum.accumulate(shifted[::-1])[::-1] - idx
    return cost


def align(reference, hypothesis) -> Alignment:
    """Minimum-edit alignment, traced from the start of both sequences.

    At each step the tie-break order is diagonal (match or substitution),
    then deletion, then insertion, so matches are taken as early as possible.
    """
    ref, hyp = _words(reference), _words(hypothesis)
    n, m = len(ref), len(hyp)
    cost = _suffix_costs(ref, hyp)
    ops = []
    i = j = 0
    while i < n or j < m:
        here = cost[i, j]
        if i < n and j < m:
            same = ref[i] == hyp[j]
            if cost[i + 1, j + 1] + (not same) == here:
                ops.append(EditOp(MATCH if same else SUB, i, j))
                i += 1
                j += 1
                continue
        if i < n and cost[i + 1, j] + 1 == here:
            ops.append(EditOp(DEL, i, None))
            i += 1
        else:
            ops.append(EditOp(INS, None, j))
            j += 1
    return Alignment(tuple(ops))


def align_by_sentence(reference: TokenStream, hypothesis: TokenStream) -> Alignment:
    """Align sentence by sentence when both sides have equally many sentences.

    Falls back to one global alignment otherwise.
    """
    rb, hb = reference.sentence_bounds, hypothesis.sentence_bounds
    if len(rb) != len(hb) or not rb:
        return align(reference, hypothesis)
    rw, hw = reference.words, hypothesis.words
    out = Alignment(())
    for (rs, re_), (hs, he) in zip(rb, hb):
        out = out + align(rw[rs:re_], hw[hs:he]).shifted(rs, hs)
    return out


@dataclass(frozen=True)
class WerResult:
    substitutions: int
    deletions: int
    insertions: int
    reference_length: int

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def wer(self) -> float:
        return self.errors / self.reference_length


def wer(alignment: Alignment, reference_length: int) -> WerResult:
    if reference_length <= 0:
        raise UndefinedWerError("WER is undefined for an empty reference")
    return WerResult(alignment.count(SUB), alignment.count(DEL), alignment.count(INS), reference_length)


def word_error(reference, hypothesis) -> WerResult:
    ref = _words(reference)
    return wer(align(ref, hypothesis), len(ref))


def entity_capture_counts(reference, hypothesis, rules: RuleSet | None = None, alignment: Alignment | None = None):
    """Per category: (captured, total) reference mentions.

    A mention is captured when every one of its tokens is a match in the
    alignment.
    """
    if alignment is None:
        alignment = align(reference, hypothesis)
    matched = alignment.matched_ref()
    counts: dict[str, list[int]] = {}
    for m in extract_entities(reference, rules):
        c = counts.setdefault(m.category, [0, 0])
        c[1] += 1
        if all(k in matched for k in range(*m.token_range)):
            c[0] += 1
    return {cat: tuple(v) for cat, v in counts.items()}


def entity_capture_ratio(reference, hypothesis, rules: RuleSet | None = None) -> dict[str, float]:
    """Captured/total per category; categories absent from the reference are omitted."""
    counts = entity_capture_counts(reference, hypothesis, rules)
    return {cat: captured / total for cat, (captured, total) in counts.items()}


@dataclass
class FileResult:
    name: str
    wer: WerResult
    entities: dict[str, tuple[int, int]]


@dataclass
class EvalReport:
    system: str
    files: list[FileResult]
    elapsed: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def macro_wer(self) -> float:
        return sum(f.wer.wer for f in self.files) / len(self.files)

    @property
    def micro_wer(self) -> float:
        return sum(f.wer.errors for f in self.files) / sum(f.wer.reference_length for f in self.files)

    def entity_counts(self) -> dict[str, tuple[int, int]]:
        total: dict[str, list[int]] = defaultdict(lambda: [0, 0])
        for f in self.files:
            for cat, (c, t) in f.entities.items():
                total[cat][0] += c
                total[cat][1] += t
        return {cat: tuple(total[cat]) for cat in CATEGORIES if cat in total}

    def entity_ratios(self) -> dict[str, float]:
        """Mention-weighted (micro) capture ratio per category."""
        return {cat: c / t for cat, (c, t) in self.entity_counts().items()}

    def entity_ratios_macro(self) -> dict[str, float]:
        per_cat: dict[str, list[float]] = defaultdict(list)
        for f in self.files:
            for cat, (c, t) in f.entities.items():
                per_cat[cat].append(c / t)
        return {cat: sum(v) / len(v) for cat in CATEGORIES if (v := per_cat.get(cat))}


def build_report(
    pairs: Sequence[tuple[TokenStream, TokenStream]],
    rules: RuleSet | None = None,
    system: str = "system",
    names: Sequence[str] | None = None,
    elapsed: float | None = None,
) -> EvalReport:
    """Evaluate (reference, hypothesis) file pairs for one system.

    ``elapsed`` is the processing time to report; when omitted the wall-clock
    time of the evaluation itself is recorded.
    """
    if not pairs:
        raise ValueError("at least one (reference, hypothesis) pair is required")
    t0 = time.perf_counter()
    files = []
    for k, (ref, hyp) in enumerate(pairs):
        name = names[k] if names else (ref.document_id or f"file{k + 1}")
        alignment = align_by_sentence(ref, hyp)
        files.append(FileResult(name, wer(alignment, len(ref)), entity_capture_counts(ref, hyp, rules, alignment)))
    if elapsed is None:
        elapsed = time.perf_counter() - t0
    return EvalReport(system, files, elapsed)


def _table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(r[c]) for r in [header] + rows) for c in range(len(header))]
    fmt = lambda r: "  ".join(cell.ljust(w) if c == 0 else cell.rjust(w) for c, (cell, w) in enumerate(zip(r, widths)))
    rule = "-" * len(fmt(header))
    return "\n".join([fmt(header), rule] + [fmt(r) for r in rows]) + "\n"


def render_wer_table(reports: Sequence[EvalReport], timing: bool = True) -> str:
    """Systems as rows, one WER column per file plus both averages (in %)."""
    names = [f.name for f in reports[0].files]
    header = ["Model"] + [f"WER {n}" for n in names] + ["WER macro", "WER micro"]
    if timing:
        header.append("Time (s)")
    rows = []
    for rep in reports:
        row = [rep.system] + [f"{100 * f.wer.wer:.2f}" for f in rep.files]
        row += [f"{100 * rep.macro_wer:.2f}", f"{100 * rep.micro_wer:.2f}"]
        if timing:
            row.append("-" if rep.elapsed is None else f"{rep.elapsed:.2f}")
        rows.append(row)
    return _table(header, rows)


def render_entity_table(reports: Sequence[EvalReport]) -> str:
    """Categories as rows, one capture-ratio column per system."""
    cats = [c for c in CATEGORIES if any(c in r.entity_counts() for r in reports)]
    header = ["Entity"] + [r.system for r in reports]
    rows = []
    for cat in cats:
        row = [cat]
        for r in reports:
            counts = r.entity_counts().get(cat)
            row.append(f"{counts[0] / counts[1]:.2f} ({counts[0]}/{counts[1]})" if counts else "-")
        rows.append(row)
    return _table(header, rows)


def render_report(reports: Sequence[EvalReport], timing: bool = True) -> str:
    return (
        "Average WER (%)\n\n"
        + render_wer_table(reports, timing)
        + "\nRatio of correctly captured entities (micro-averaged)\n\n"
        + render_entity_table(reports)
    )


def format_metrics(reports: Sequence[EvalReport], timing: bool = True) -> str:
    """Machine-readable ``metric<TAB>system<TAB>value`` lines."""
    lines = []
    for rep in reports:
        s = rep.system
        for f in rep.files:
            lines.append(f"wer.{f.name}\t{s}\t{f.wer.wer:.6f}")
        lines.append(f"wer_macro\t{s}\t{rep.macro_wer:.6f}")
        lines.append(f"wer_micro\t{s}\t{rep.micro_wer:.6f}")
        for cat, ratio in rep.entity_ratios().items():
            lines.append(f"entity_micro.{cat}\t{s}\t{ratio:.6f}")
        for cat, ratio in rep.entity_ratios_macro().items():
            lines.append(f"entity_macro.{cat}\t{s}\t{ratio:.6f}")
        if timing and rep.elapsed is not None:
            lines.append(f"time_seconds\t{s}\t{rep.elapsed:.3f}")
    return "\n".join(lines) + "\n"


def compare_systems(
    references: Sequence[TokenStream],
    systems: Mapping[str, Sequence[TokenStream]],
    rules: RuleSet | None = None,
    elapsed: Mapping[str, float] | None = None,
) -> list[EvalReport]:
    """One report per system, all scored against the same references."""
    reports = []
    for name, hyps in systems.items():
        if len(hyps) != len(references):
            raise ValueError(f"system {name!r} has {len(hyps)} files, expected {len(references)}")
        reports.append(build_report(list(zip(references, hyps)), rules, name, elapsed=(elapsed or {}).get(name)))
    return reports
