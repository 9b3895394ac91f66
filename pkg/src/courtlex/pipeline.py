"""End-to-end desk experiment: corpus -> phrases, entities, vocabulary, LM ->
simulated n-best -> rescoring -> evaluation.

``run_pipeline`` returns every artifact as file name -> content so callers can
write them atomically; nothing here touches the file system except reading
inputs. Outputs carry no timings, so equal configs give equal bytes.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from .collocations import CollocationConfig, detect_phrases, format_phrase_list
from .config import PipelineConfig
from .corpus import Document, TokenStream, load_corpus
from .entities import default_rules, entity_inventory, format_inventory, load_rules
from .evaluation import EvalReport, compare_systems, format_metrics, render_report
from .lm import NGramLM, Smoothing, format_arpa, train_lm
from .plotting import report_figures
from .rescore import (
    ErrorModel,
    Hypothesis,
    NBestList,
    PhraseMatcher,
    RescoreWeights,
    format_asr_json,
    format_rescored,
    rescore,
    simulate_asr,
)
from .vocab import (
    VocabularyEntry,
    apply_pronunciation_overrides,
    build_vocabulary,
    load_overrides,
    pronunciations_from,
    render_hint_table,
)

logger = logging.getLogger(__name__)

# System labels in the report, baseline first.
BASELINE, LM_ONLY, LM_VOCAB = "asr-top1", "rescore-lm", "rescore-lm+vocab"


@dataclass
class ExperimentResult:
    phrases: list
    inventory: dict
    vocabulary: list[VocabularyEntry]
    lm: NGramLM
    nbests: dict[str, list[NBestList]]
    hypotheses: dict[str, dict[str, list[Hypothesis]]]
    reports: list[EvalReport]
    timings: dict[str, float] = field(default_factory=dict)

    def report(self, name: str) -> EvalReport:
        return next(r for r in self.reports if r.system == name)


def utterance_ids(doc_id: str, n: int) -> list[str]:
    return [f"{doc_id}-{k + 1:04d}" for k in range(n)]


def simulate_documents(heldout: list[TokenStream], model: ErrorModel, n: int) -> dict[str, list[NBestList]]:
    out = {}
    for stream in heldout:
        sents = list(stream.sentences())
        ids = utterance_ids(stream.document_id, len(sents))
        out[stream.document_id] = [simulate_asr(s, model, n, utterance_id=uid) for uid, s in zip(ids, sents)]
    return out


def hypothesis_stream(doc_id: str, hyps: list[Hypothesis]) -> TokenStream:
    return TokenStream.from_words([w for h in hyps for w in h.tokens], doc_id, [len(h.tokens) for h in hyps])


def run_experiment(
    train: list[TokenStream],
    heldout: list[TokenStream],
    config: PipelineConfig = PipelineConfig(),
    rules=None,
    overrides: list[VocabularyEntry] = (),
) -> ExperimentResult:
    """Run the desk experiment on already-analyzed streams."""
    rules = rules or default_rules()
    timings = {}
    t = time.perf_counter()
    phrases = detect_phrases(train, CollocationConfig(config.delta, config.threshold, config.min_count, config.passes))
    inventory = entity_inventory(train, rules)
    caps = {"collocation": config.collocation_cap, "entity": config.entity_cap}
    vocabulary = build_vocabulary(phrases, inventory, overrides, caps)
    vocabulary = apply_pronunciation_overrides(vocabulary, pronunciations_from(overrides))
    timings["resources"] = time.perf_counter() - t

    t = time.perf_counter()
    if config.smoothing == "add_k":
        smoothing = Smoothing.add_k(config.k)
    else:
        smoothing = Smoothing.kneser_ney(config.discount)
    lm = train_lm(train, config.order, smoothing, config.unk_threshold)
    timings["train-lm"] = time.perf_counter() - t

    t = time.perf_counter()
    confusable = sorted({w for s in train for w in s.words})
    model = ErrorModel(*config.error_rates, seed=config.seed, vocabulary=confusable)
    nbests = simulate_documents(heldout, model, config.nbest)
    timings["simulate"] = time.perf_counter() - t

    weights = RescoreWeights(config.lam, config.beta, config.length_norm)
    systems = {
        BASELINE: None,
        LM_ONLY: RescoreWeights(config.lam, 0.0, config.length_norm),
        LM_VOCAB: weights,
    }
    matcher = PhraseMatcher.from_vocabulary(vocabulary)
    hypotheses: dict[str, dict[str, list[Hypothesis]]] = {}
    elapsed = {}
    for name, w in systems.items():
        t = time.perf_counter()
        per_doc = {}
        for doc_id, lists in nbests.items():
            per_doc[doc_id] = [nb.top if w is None else rescore(nb, lm, matcher, w) for nb in lists]
        hypotheses[name] = per_doc
        elapsed[name] = time.perf_counter() - t

    t = time.perf_counter()
    hyp_streams = {
        name: [hypothesis_stream(s.document_id, per_doc[s.document_id]) for s in heldout]
        for name, per_doc in hypotheses.items()
    }
    reports = compare_systems(heldout, hyp_streams, rules, elapsed)
    timings["evaluate"] = time.perf_counter() - t
    return ExperimentResult(phrases, inventory, vocabulary, lm, nbests, hypotheses, reports, timings)


def _streams(docs: list[Document]) -> list[TokenStream]:
    return [d.stream() for d in docs]


def run_pipeline(config: PipelineConfig) -> dict[str, bytes | str]:
    """Run the configured experiment and return its output files."""
    t0 = time.perf_counter()
    train = _streams(load_corpus(config.corpus, config.threads))
    heldout = _streams(load_corpus(config.heldout, config.threads))
    rules = load_rules(config.rules) if config.rules else default_rules()
    overrides = load_overrides(config.overrides) if config.overrides else []
    result = run_experiment(train, heldout, config, rules, overrides)
    for step, secs in result.timings.items():
        logger.info("%s: %.2f s", step, secs)

    outputs: dict[str, bytes | str] = {
        "phrases.tsv": format_phrase_list(result.phrases),
        "entities.tsv": format_inventory(result.inventory),
        "vocab.tsv": render_hint_table(result.vocabulary),
        "lm.arpa": format_arpa(result.lm),
        "nbest.json": format_asr_json([nb for lists in result.nbests.values() for nb in lists]),
        "report.txt": render_report(result.reports, timing=False),
        "metrics.tsv": format_metrics(result.reports, timing=False),
    }
    for name, per_doc in result.hypotheses.items():
        rows = []
        for doc_id, hyps in per_doc.items():
            rows += zip(utterance_ids(doc_id, len(hyps)), hyps)
        outputs[f"hyp.{name}.tsv"] = format_rescored(rows)
    outputs.update(report_figures(result.reports))
    logger.info("pipeline finished in %.2f s", time.perf_counter() - t0)
    return outputs
