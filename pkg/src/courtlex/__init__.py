"""courtlex: domain adaptation toolkit for legal speech recognition.

Builds in-domain resources (collocations, legal entities, a custom vocabulary
and an n-gram LM) from court text, rescores ASR n-best lists with them, and
scores transcripts by WER and entity capture.
"""

__version__ = "0.1.0"

from .collocations import CollocationConfig, PhraseEntry, detect_phrases, merge_phrases
from .corpus import Document, Token, TokenStream, analyze, load_corpus, normalize_text, tokenize
from .entities import EntityMention, RuleSet, default_rules, entity_inventory, extract_entities
from .errors import ConfigError, CourtlexError, FormatError, UndefinedScoreError, UndefinedWerError
from .evaluation import align, build_report, entity_capture_ratio, wer, word_error
from .lm import NGramLM, Smoothing, load_lm, log_prob, save_lm, train_lm
from .rescore import ErrorModel, Hypothesis, NBestList, RescoreWeights, parse_asr_json, rescore, simulate_asr
from .vocab import VocabularyEntry, build_vocabulary, render_hint_table
