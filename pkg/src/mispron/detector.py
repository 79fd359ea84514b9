"""Runtime labeling of word distances: global, cdf-median and kde decision rules."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from enum import Enum

from .calibration import CORRECT, INCORRECT, CalibrationModel, empirical_cdf, kde_density, kde_log_density
from .corpus import UtterancePair
from .distance import WordDistance, alignment_distances
from .errors import MissingClassPools, MissingKde

log = logging.getLogger(__name__)


class DecisionStrategy(str, Enum):
    GLOBAL = "global"
    CDF_MEDIAN = "cdf-median"
    KDE = "kde"


class Label(str, Enum):
    CORRECT = "CORRECT"
    INCORRECT = "INCORRECT"
    AMBIGUOUS = "AMBIGUOUS"


@dataclass(frozen=True)
class WordVerdict:
    word: str
    index: int
    d_bar: float
    label: Label
    selected_distribution: str | None = None
    p_correct: float | None = None
    p_incorrect: float | None = None
    k_correct: float | None = None
    k_incorrect: float | None = None
    strategy: DecisionStrategy = DecisionStrategy.GLOBAL

    def to_dict(self) -> dict:
        d = asdict(self)
        d["label"] = self.label.value
        d["strategy"] = self.strategy.value
        return {k: v for k, v in d.items() if v is not None}


def _class_label(selected: str, d_bar: float, model: CalibrationModel) -> Label:
    if selected == CORRECT and d_bar <= model.tau_correct:
        return Label.CORRECT
    if selected == INCORRECT and d_bar >= model.tau_incorrect:
        return Label.INCORRECT
    return Label.AMBIGUOUS


def decide_global(d_bar: float, model: CalibrationModel, word: str = "", index: int = 0) -> WordVerdict:
    label = Label.INCORRECT if d_bar > model.tau_global else Label.CORRECT
    return WordVerdict(word, index, d_bar, label, strategy=DecisionStrategy.GLOBAL)


def decide_cdf_median(d_bar: float, model: CalibrationModel, word: str = "", index: int = 0) -> WordVerdict:
    """Pick the class whose empirical CDF at d_bar is closest to 0.5; ties go to incorrect."""
    if not model.has_class_pools or model.tau_correct is None or model.tau_incorrect is None:
        raise MissingClassPools("cdf-median needs both class pools")
    p_c = empirical_cdf(model.pool_correct, d_bar)
    p_i = empirical_cdf(model.pool_incorrect, d_bar)
    selected = CORRECT if abs(p_c - 0.5) < abs(p_i - 0.5) else INCORRECT
    return WordVerdict(
        word, index, d_bar, _class_label(selected, d_bar, model), selected, p_c, p_i,
        strategy=DecisionStrategy.CDF_MEDIAN,
    )


def decide_kde(d_bar: float, model: CalibrationModel, word: str = "", index: int = 0) -> WordVerdict:
    """Pick incorrect iff its density strictly exceeds the correct-class density."""
    if not model.has_kde or not model.has_class_pools:
        raise MissingKde("no KDE in model (degenerate or missing class pool)")
    k_c = kde_density(model.pool_correct, model.kde_bandwidth_correct, d_bar)
    k_i = kde_density(model.pool_incorrect, model.kde_bandwidth_incorrect, d_bar)
    if k_i == 0.0 and k_c == 0.0:
        # both tails underflowed; the same comparison in log space
        k_i_wins = kde_log_density(model.pool_incorrect, model.kde_bandwidth_incorrect, d_bar) > kde_log_density(
            model.pool_correct, model.kde_bandwidth_correct, d_bar
        )
    else:
        k_i_wins = k_i > k_c
    selected = INCORRECT if k_i_wins else CORRECT
    return WordVerdict(
        word, index, d_bar, _class_label(selected, d_bar, model), selected,
        k_correct=k_c, k_incorrect=k_i, strategy=DecisionStrategy.KDE,
    )


_RULES = {
    DecisionStrategy.GLOBAL: decide_global,
    DecisionStrategy.CDF_MEDIAN: decide_cdf_median,
    DecisionStrategy.KDE: decide_kde,
}


def effective_strategy(model: CalibrationModel, strategy: DecisionStrategy) -> tuple[DecisionStrategy, list[str]]:
    """Resolve the strategy the model can actually run (kde -> cdf-median fallback)."""
    strategy = DecisionStrategy(strategy)
    if strategy is DecisionStrategy.KDE and not model.has_kde:
        msg = "KDE unavailable in model; falling back to cdf-median"
        log.warning(msg)
        return DecisionStrategy.CDF_MEDIAN, [msg]
    return strategy, []


def decide(d_bar: float, model: CalibrationModel, strategy: DecisionStrategy, word: str = "", index: int = 0) -> WordVerdict:
    strategy, _ = effective_strategy(model, strategy)
    return _RULES[strategy](d_bar, model, word, index)


def decide_words(
    distances: list[WordDistance], model: CalibrationModel, strategy: DecisionStrategy
) -> tuple[list[WordVerdict], list[str]]:
    strategy, warnings = effective_strategy(model, strategy)
    rule = _RULES[strategy]
    return [rule(wd.d_bar, model, wd.word, wd.index) for wd in distances], warnings


def detect_utterance(
    pair: UtterancePair, model: CalibrationModel, strategy: DecisionStrategy = DecisionStrategy.GLOBAL
) -> tuple[list[WordVerdict], list[str]]:
    """Verdict per aligned word, in alignment order, plus warnings (skipped words, fallbacks)."""
    alignments, warnings = pair.alignments()
    if not alignments:
        return [], warnings
    distances, skipped = alignment_distances(
        pair.real_audio, pair.clone_audio, alignments, model.mfcc_config, model.strategy
    )
    verdicts, fallback = decide_words(distances, model, strategy)
    return verdicts, warnings + skipped + fallback
