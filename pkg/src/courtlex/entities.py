"""Rule-based legal and general entity extraction.

Rules are plain text, one per line: ``category<TAB>kind<TAB>pattern``.

``gazetteer``
    A literal token sequence, e.g. ``court of appeal``.
``shape``
    A regular expression that must match one whole token.
``trigger``
    A token pattern. Elements are separated by spaces; each is a literal,
    ``a|b`` alternatives, a class (``<name>``, ``<clause>``, ``<year>``,
    ``<day>``, ``<month>``, ``<number>``) or ``/regex/``. A trailing ``+``
    repeats an element one to three times, a trailing ``?`` makes it optional.

Two special lines configure the rule set itself (category ``*``): ``priority``
takes a comma-separated category order, and ``nonname`` adds words that may
never fill a ``<name>`` slot.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import TokenStream
from .errors import FormatError

CATEGORIES = ("Judge", "CaseName", "Court", "Provision", "Instrument", "Cardinal", "Person", "Date")
DEFAULT_PRIORITY = ("Provision", "Date", "CaseName", "Judge", "Court", "Instrument", "Person", "Cardinal")
RULE_KINDS = ("gazetteer", "shape", "trigger")
MAX_REPEAT = 3

_MONTHS = (
    "january february march april may june july august september october november december "
    "jan feb mar apr jun jul aug sep sept oct nov dec"
).split()
_NUMBER_WORDS = (
    "zero one two three four five six seven eight nine ten eleven twelve thirteen fourteen fifteen "
    "sixteen seventeen eighteen nineteen twenty thirty forty fifty sixty seventy eighty ninety "
    "hundred thousand million billion"
).split()

_CLASS_PATTERNS = {
    "clause": r"\d+[a-z]{0,2}(?:\.\d+[a-z]?)*(?:\([0-9a-z]{1,4}\))*(?:-(?:\d+[a-z]?(?:\.\d+)*)?(?:\([0-9a-z]{1,4}\))*)?",
    "year": r"(?:1[5-9]|20)\d\d",
    "day": r"(?:[1-9]|[12]\d|3[01])(?:st|nd|rd|th)?",
    "month": "|".join(_MONTHS),
    "number": r"\d+(?:,\d{3})*(?:\.\d+)?|" + "|".join(_NUMBER_WORDS),
}
_NAME_RE = re.compile(r"[a-z][a-z'\-]*[a-z]")

# Function words, fillers and legal titles that cannot be (part of) a name.
DEFAULT_NONNAMES = frozenset(
    """
    a about above after again against all also am an and any are as at be because been before being
    below between both but by can could did do does doing down during each either else even ever every
    few for from further had has have having he her here hers herself him himself his how i if in into
    is it its itself just least less let like may me might mine more most much must my myself neither
    no nor not now of off on once one only or other ought our ours ourselves out over own per perhaps
    quite rather really same shall she should since so some such than that the their theirs them
    themselves then there these they this those though through thus to too under until up upon us very
    was we were what when where whether which while who whom whose why will with within without would
    yes yet you your yours yourself yourselves
    um uh er erm ah oh okay ok yeah well right indeed sorry please thank thanks
    said says say saying see seen think thought know known mean means meant put made make makes
    going go goes went come came take taken given give gives get got find found held hold holds
    submit submission submissions argue argued argument appeal appeals appellant respondent
    lord lords lady ladies justice justices mr mrs ms miss dr sir dame judge judges honour
    court courts tribunal section sections rule rules article paragraph schedule regulation clause
    part act acts case cases v vs versus page tab bundle order orders further
    first second third fourth last next point question issue matter therefore however
    """.split()
)

DEFAULT_RULES_TEXT = """\
*\tpriority\tProvision,Date,CaseName,Judge,Court,Instrument,Person,Cardinal
Provision\ttrigger\tsection|sections|rule|rules|article|articles|paragraph|paragraphs|schedule|regulation|clause|part <clause>
Date\ttrigger\t<day> <month> <year>
Date\ttrigger\t<day> of <month> <year>
Date\ttrigger\t<month> <day> <year>
Date\tshape\t\\d{1,2}/\\d{1,2}/\\d{2,4}
CaseName\ttrigger\t<name>+ v <name>+
CaseName\ttrigger\tr v <name>+
Judge\ttrigger\tlord|lady <name>
Judge\ttrigger\tlord|lady|mr|mrs justice <name>
Court\tgazetteer\tsupreme court
Court\tgazetteer\tcourt of appeal
Court\tgazetteer\thigh court
Court\tgazetteer\tcrown court
Court\tgazetteer\tcounty court
Court\tgazetteer\tfamily court
Court\tgazetteer\tmagistrates court
Court\tgazetteer\tmagistrates' court
Court\tgazetteer\tcourt of session
Court\tgazetteer\tprivy council
Court\tgazetteer\thouse of lords
Court\tgazetteer\tupper tribunal
Court\tgazetteer\tfirst-tier tribunal
Court\tgazetteer\temployment tribunal
Court\tgazetteer\temployment appeal tribunal
Court\tgazetteer\tcourt of justice
Court\tgazetteer\teuropean court of human rights
Instrument\ttrigger\t<name>+ act <year>
Instrument\ttrigger\t<name>+ regulations <year>
Person\ttrigger\tmr|mrs|ms|miss|dr|sir|dame <name>
Cardinal\ttrigger\t<number>+
"""


@dataclass(frozen=True)
class EntityMention:
    category: str
    token_range: tuple[int, int]
    surface: str

    def __post_init__(self):
        start, end = self.token_range
        if not start < end:
            raise ValueError("mention token range must be non-empty")
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")


@dataclass(frozen=True)
class _Element:
    literals: frozenset | None = None
    regex: re.Pattern | None = None
    name: bool = False
    min_rep: int = 1
    max_rep: int = 1

    def accepts(self, word: str, nonnames: frozenset) -> bool:
        if self.literals is not None:
            return word in self.literals
        if self.name:
            return word not in nonnames and _NAME_RE.fullmatch(word) is not None
        return self.regex.fullmatch(word) is not None


def _parse_element(text: str) -> _Element:
    min_rep = max_rep = 1
    if len(text) > 1 and text[-1] in "+?":
        min_rep, max_rep = (1, MAX_REPEAT) if text[-1] == "+" else (0, 1)
        text = text[:-1]
    if text.startswith("<") and text.endswith(">"):
        cls = text[1:-1]
        if cls == "name":
            return _Element(name=True, min_rep=min_rep, max_rep=max_rep)
        if cls not in _CLASS_PATTERNS:
            raise ValueError(f"unknown token class <{cls}>")
        return _Element(regex=re.compile(_CLASS_PATTERNS[cls]), min_rep=min_rep, max_rep=max_rep)
    if len(text) > 1 and text.startswith("/") and text.endswith("/"):
        return _Element(regex=re.compile(text[1:-1]), min_rep=min_rep, max_rep=max_rep)
    return _Element(literals=frozenset(text.split("|")), min_rep=min_rep, max_rep=max_rep)


@dataclass(frozen=True)
class Rule:
    category: str
    kind: str
    pattern: str
    elements: tuple = field(default=(), compare=False, repr=False)

    @classmethod
    def compile(cls, category: str, kind: str, pattern: str) -> "Rule":
        if category not in CATEGORIES:
            raise ValueError(f"unknown category {category!r}")
        if kind == "gazetteer":
            words = pattern.split()
            if not words:
                raise ValueError("empty gazetteer entry")
            elements = tuple(_Element(literals=frozenset([w])) for w in words)
        elif kind == "shape":
            elements = (_Element(regex=re.compile(pattern)),)
        elif kind == "trigger":
            elements = tuple(_parse_element(p) for p in pattern.split())
            if not elements or all(e.min_rep == 0 for e in elements):
                raise ValueError("trigger pattern must require at least one token")
        else:
            raise ValueError(f"unknown rule kind {kind!r}")
        return cls(category, kind, pattern, elements)

    def match(self, words: Sequence[str], start: int, nonnames: frozenset) -> int:
        """End index of the longest match at ``start``, or -1."""
        elements, n = self.elements, len(words)
        best = -1
        stack = [(0, start)]
        while stack:
            ei, pos = stack.pop()
            if ei == len(elements):
                best = max(best, pos)
                continue
            el = elements[ei]
            if el.min_rep == 0:
                stack.append((ei + 1, pos))
            p = pos
            for rep in range(1, el.max_rep + 1):
                if p >= n or not el.accepts(words[p], nonnames):
                    break
                p += 1
                if rep >= el.min_rep:
                    stack.append((ei + 1, p))
        return best if best > start else -1

    def anchors(self) -> frozenset | None:
        """Literal words a match must start with, when that is known."""
        first = self.elements[0]
        if first.min_rep == 0:
            return None
        return first.literals


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]
    priority: tuple[str, ...] = DEFAULT_PRIORITY
    nonnames: frozenset = DEFAULT_NONNAMES

    def __post_init__(self):
        if sorted(self.priority) != sorted(CATEGORIES):
            raise ValueError(f"priority must order exactly the categories {CATEGORIES}")

    def rank(self, category: str) -> int:
        return self.priority.index(category)


def parse_rules(text: str, source=None, base: RuleSet | None = None) -> RuleSet:
    """Parse rule lines; with ``base``, its non-name list is kept and extended."""
    rules = []
    priority = DEFAULT_PRIORITY
    nonnames = set(base.nonnames if base else DEFAULT_NONNAMES)
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise FormatError("expected 'category<TAB>kind<TAB>pattern'", where=f"line {lineno}", path=source)
        category, kind, pattern = (c.strip() for c in cols)
        try:
            if category == "*":
                if kind == "priority":
                    priority = tuple(p.strip() for p in pattern.split(","))
                    RuleSet((), priority)
                elif kind == "nonname":
                    nonnames.update(pattern.split())
                else:
                    raise ValueError(f"unknown directive {kind!r}")
            else:
                rules.append(Rule.compile(category, kind, pattern))
        except (ValueError, re.error) as exc:
            raise FormatError(str(exc), where=f"line {lineno}", path=source) from None
    return RuleSet(tuple(rules), priority, frozenset(nonnames))


def load_rules(path) -> RuleSet:
    path = Path(path)
    return parse_rules(path.read_text(encoding="utf-8"), source=path)


_DEFAULT: RuleSet | None = None


def default_rules() -> RuleSet:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = parse_rules(DEFAULT_RULES_TEXT)
    return _DEFAULT


def extract_entities(stream: TokenStream | Sequence[str], rules: RuleSet | None = None) -> list[EntityMention]:
    """Find non-overlapping entity mentions, ordered by position.

    Every rule proposes its longest match at every position; conflicts go to
    the higher-priority category, then the longer span, then the leftmost.
    """
    rules = rules or default_rules()
    words = stream.words if isinstance(stream, TokenStream) else list(stream)
    candidates = []
    for rule in rules.rules:
        rank = rules.rank(rule.category)
        anchors = rule.anchors()
        for i, w in enumerate(words):
            if anchors is not None and w not in anchors:
                continue
            end = rule.match(words, i, rules.nonnames)
            if end > 0:
                candidates.append((rank, i - end, i, end, rule.category))
    candidates.sort()
    taken = [False] * len(words)
    mentions = []
    for _, _, start, end, category in candidates:
        if any(taken[start:end]):
            continue
        for k in range(start, end):
            taken[k] = True
        mentions.append(EntityMention(category, (start, end), " ".join(words[start:end])))
    mentions.sort(key=lambda m: m.token_range)
    return mentions


def entity_inventory(corpus: Iterable[TokenStream], rules: RuleSet | None = None) -> dict[str, list[tuple[str, int]]]:
    corpus = list(corpus)
    if not corpus:
        raise ValueError("corpus must contain at least one stream")
    rules = rules or default_rules()
    counts = {c: Counter() for c in CATEGORIES}
    for stream in corpus:
        for m in extract_entities(stream, rules):
            counts[m.category][m.surface] += 1
    return {c: sorted(counts[c].items(), key=lambda kv: (-kv[1], kv[0])) for c in CATEGORIES}


def format_inventory(inventory: dict[str, list[tuple[str, int]]]) -> str:
    lines = []
    for category in CATEGORIES:
        for surface, freq in inventory.get(category, []):
            lines.append(f"{category}\t{surface}\t{freq}\n")
    return "".join(lines)


def parse_inventory(text: str) -> dict[str, list[tuple[str, int]]]:
    inventory: dict[str, list[tuple[str, int]]] = {c: [] for c in CATEGORIES}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 3 or cols[0] not in CATEGORIES:
            raise FormatError("expected 'category<TAB>surface<TAB>frequency'", where=f"line {lineno}")
        try:
            inventory[cols[0]].append((cols[1], int(cols[2])))
        except ValueError:
            raise FormatError(f"bad frequency {cols[2]!r}", where=f"line {lineno}") from None
    return inventory
