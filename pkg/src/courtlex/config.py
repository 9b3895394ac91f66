"""Flat ``key = value`` pipeline configuration.

Blank lines and ``#`` comments are ignored. Relative paths resolve against
the config file's directory. Every violation is collected before raising, so
one run of ``validate_config`` reports all of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError

# Error mix for the desk experiment, as fractions of the total per-token rate.
# Weighted toward merges and splits, the error shapes seen in published court
# hearing ASR output ("my lady" -> "melody", "financial order" -> "five natural").
DEFAULT_ERROR_MIX = {
    "substitution_rate": 0.2,
    "deletion_rate": 0.1,
    "insertion_rate": 0.1,
    "split_rate": 0.3,
    "merge_rate": 0.3,
}
DEFAULT_ERROR_TOTAL = 0.10

_PATH_FIELDS = ("corpus", "heldout", "rules", "overrides")
_REQUIRED = ("corpus", "heldout")


@dataclass(frozen=True)
class PipelineConfig:
    corpus: Path | None = None
    heldout: Path | None = None
    rules: Path | None = None
    overrides: Path | None = None
    out: Path = Path("out")
    seed: int = 0
    threads: int | None = None
    # collocations
    delta: float = 5.0
    threshold: float = 10.0
    min_count: int = 5
    passes: int = 2
    # vocabulary caps
    collocation_cap: int = 500
    entity_cap: int = 500
    # language model
    order: int = 3
    smoothing: str = "kneser_ney"
    discount: float = 0.75
    k: float = 1.0
    unk_threshold: int = 1
    # rescoring
    lam: float = 0.5
    beta: float = 0.5
    length_norm: bool = True
    nbest: int = 5
    # simulator
    substitution_rate: float = DEFAULT_ERROR_TOTAL * DEFAULT_ERROR_MIX["substitution_rate"]
    deletion_rate: float = DEFAULT_ERROR_TOTAL * DEFAULT_ERROR_MIX["deletion_rate"]
    insertion_rate: float = DEFAULT_ERROR_TOTAL * DEFAULT_ERROR_MIX["insertion_rate"]
    split_rate: float = DEFAULT_ERROR_TOTAL * DEFAULT_ERROR_MIX["split_rate"]
    merge_rate: float = DEFAULT_ERROR_TOTAL * DEFAULT_ERROR_MIX["merge_rate"]

    @property
    def error_rates(self) -> tuple[float, ...]:
        return (self.substitution_rate, self.deletion_rate, self.insertion_rate, self.split_rate, self.merge_rate)


# Config-file key -> dataclass field, where they differ.
_ALIASES = {"lambda": "lam"}
_KEY_OF = {v: k for k, v in _ALIASES.items()}
_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _convert(name: str, raw: str):
    kind = _TYPES[name]
    if name in _PATH_FIELDS or name == "out":
        return Path(raw)
    if "bool" in kind:
        low = raw.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if "int" in kind:
        return int(raw)
    if "float" in kind:
        value = float(raw)
        if math.isnan(value):
            raise ValueError("must be a number")
        return value
    return raw


def parse_config(text: str, base: Path | None = None, overrides: dict | None = None) -> PipelineConfig:
    """Build and validate a config from ``key = value`` text.

    ``overrides`` (already-typed values keyed by field name) take precedence
    over the file, e.g. for ``--seed`` given on the command line.
    """
    base = base or Path(".")
    errors: list[tuple[str, str]] = []
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            errors.append((f"line {lineno}", f"expected 'key = value', got {line!r}"))
            continue
        key, raw = (s.strip() for s in line.split("=", 1))
        name = _ALIASES.get(key, key)
        if name not in _TYPES:
            errors.append((key, "unknown key"))
            continue
        if name in values:
            errors.append((key, f"duplicate key (line {lineno})"))
            continue
        try:
            value = _convert(name, raw)
        except ValueError as exc:
            errors.append((key, str(exc)))
            continue
        if isinstance(value, Path) and not value.is_absolute():
            value = base / value
        values[name] = value
    for name, value in (overrides or {}).items():
        if value is not None:
            values[name] = value
    errors += _check(values)
    if errors:
        raise ConfigError(errors)
    return PipelineConfig(**values)


def _check(v: dict) -> list[tuple[str, str]]:
    errs = []

    def bad(name, msg):
        errs.append((_KEY_OF.get(name, name), msg))

    get = lambda name: v.get(name, getattr(PipelineConfig, name))
    for name in _REQUIRED:
        if v.get(name) is None:
            bad(name, "required")
    for name in _PATH_FIELDS:
        p = v.get(name)
        if p is not None and not Path(p).is_file():
            bad(name, f"file not found: {p}")
    if not 0 <= get("lam") <= 1:
        bad("lam", f"must lie in [0, 1], got {get('lam')}")
    if not get("beta") >= 0:
        bad("beta", f"must be >= 0, got {get('beta')}")
    if not get("delta") >= 0:
        bad("delta", "must be >= 0")
    for name in ("min_count", "passes", "nbest", "order", "unk_threshold"):
        if get(name) < 1:
            bad(name, "must be >= 1")
    for name in ("collocation_cap", "entity_cap"):
        if get(name) < 0:
            bad(name, "must be >= 0")
    if get("threads") is not None and get("threads") < 1:
        bad("threads", "must be >= 1")
    if get("smoothing") not in ("kneser_ney", "add_k"):
        bad("smoothing", f"must be kneser_ney or add_k, got {get('smoothing')!r}")
    if not 0 < get("discount") < 1:
        bad("discount", "must lie in (0, 1)")
    if not get("k") >= 0:
        bad("k", "must be >= 0")
    rates = [get(name) for name in DEFAULT_ERROR_MIX]
    for name, r in zip(DEFAULT_ERROR_MIX, rates):
        if not 0 <= r <= 1:
            bad(name, f"must lie in [0, 1], got {r}")
    if sum(rates) > 1 + 1e-12:
        bad("error rates", f"sum to {sum(rates)} > 1")
    return errs


def validate_config(path, **overrides) -> PipelineConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([("config", f"cannot read {path}: {exc.strerror}")]) from None
    return parse_config(text, path.parent, overrides)
