"""Penalized-likelihood scores over a ladder of nested candidate orders, and
argmax selection with a fixed tie-break.

Scores accept a maximized log-likelihood-ratio in either of two conventions:
`natural` (the LLR itself, paired with a parameter count) or `doubled`
(twice the LLR, paired with a parameter-count difference), because the
classical criteria are conventionally written against the doubled statistic.
The tilted-evidence score is defined for both and the doubled form is
exactly twice the natural form at half the statistic.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

from .errors import EmptyCandidateSet, SmallSample


class Criterion(enum.Enum):
    """Selection rules compared by the toolkit."""

    BEEF = "beef"
    MDL = "mdl"
    AIC = "aic"
    AICC = "aicc"


class Convention(enum.Enum):
    """How the llr field of ModelEvidence is scaled."""

    NATURAL = "natural"
    DOUBLED = "doubled"


@dataclass(frozen=True)
class ModelEvidence:
    """Evidence for one candidate order.

    llr is the maximized log-likelihood-ratio against the null, in the given
    convention; dim is the parameter count (natural) or parameter-count
    difference (doubled); n_samples is the record length the llr was
    computed from.
    """

    llr: float
    dim: int
    n_samples: int
    convention: Convention = Convention.DOUBLED

    def __post_init__(self):
        if not (self.llr >= 0):
            raise ValueError(f"llr must be >= 0, got {self.llr}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")
        if not isinstance(self.convention, Convention):
            raise ValueError(f"convention must be a Convention, got {self.convention!r}")


def _beef_natural(llr: float, dim: int) -> float:
    half = 0.5 * dim
    if llr <= half:
        return 0.0
    gain = llr - half
    penalty = half * math.log(llr / half)
    # The difference is >= 0 in exact arithmetic; round-off at the step
    # boundary must not leak a negative score.
    return max(0.0, gain - penalty)


def beef_score(ev: ModelEvidence) -> float:
    """Tilted-evidence score.

    Natural convention: (l − k/2 − (k/2)·ln(l/(k/2))) when l > k/2, else 0.
    Doubled convention: (l − d·(ln(l/d) + 1)) when l > d, else 0, computed as
    exactly twice the natural score at (l/2, d).
    """
    if ev.convention is Convention.NATURAL:
        return _beef_natural(ev.llr, ev.dim)
    return 2.0 * _beef_natural(0.5 * ev.llr, ev.dim)


def _require_doubled(ev: ModelEvidence, name: str) -> None:
    if ev.convention is not Convention.DOUBLED:
        raise ValueError(f"{name} is defined on the doubled convention only")


def mdl_score(ev: ModelEvidence) -> float:
    """l − d·ln(M) on the doubled convention."""
    _require_doubled(ev, "mdl_score")
    return ev.llr - ev.dim * math.log(ev.n_samples)


def aic_score(ev: ModelEvidence) -> float:
    """l − 2d on the doubled convention."""
    _require_doubled(ev, "aic_score")
    return ev.llr - 2.0 * ev.dim


def aicc_score(ev: ModelEvidence) -> float:
    """l − 2dM/(M − d − 1), the small-sample corrected form.

    Undefined when M <= d + 1; such an order is excluded from selection
    rather than scored at an infinity.
    """
    _require_doubled(ev, "aicc_score")
    if ev.n_samples <= ev.dim + 1:
        raise SmallSample(
            f"corrected score undefined for n_samples = {ev.n_samples} with "
            f"dim = {ev.dim} (need n_samples > dim + 1)"
        )
    return ev.llr - 2.0 * ev.dim * ev.n_samples / (ev.n_samples - ev.dim - 1)


_SCORE_FUNCTIONS = {
    Criterion.BEEF: beef_score,
    Criterion.MDL: mdl_score,
    Criterion.AIC: aic_score,
    Criterion.AICC: aicc_score,
}


@dataclass(frozen=True)
class CriterionScores:
    """All candidate scores under one criterion plus the selected order.

    `excluded` lists orders dropped because their score was undefined
    (corrected-AIC small-sample rule); they never participate in the argmax.
    """

    criterion: Criterion
    scores: dict[int, float]
    selected: int
    excluded: tuple[int, ...] = field(default=())


def select_order(
    evidences: list[ModelEvidence],
    criterion: Criterion,
    include_null: bool = False,
) -> CriterionScores:
    """Score orders 1..len(evidences) and return the argmax.

    Ties break toward the smallest order. With include_null, an order-0
    candidate participates with score exactly 0.0 (every score function
    vanishes at zero evidence and zero parameters). Orders whose score is
    undefined are excluded and reported; if nothing remains, raises
    EmptyCandidateSet.
    """
    if not evidences and not include_null:
        raise EmptyCandidateSet("no candidate orders to select from")

    llrs = [ev.llr for ev in evidences]
    if any(b < a for a, b in zip(llrs, llrs[1:])):
        warnings.warn(
            "evidence is not non-decreasing in order; nested hypotheses "
            "should not lose likelihood as the order grows",
            stacklevel=2,
        )

    score_fn = _SCORE_FUNCTIONS[criterion]
    scores: dict[int, float] = {}
    excluded: list[int] = []
    if include_null:
        scores[0] = 0.0
    for order, ev in enumerate(evidences, start=1):
        try:
            scores[order] = score_fn(ev)
        except SmallSample:
            excluded.append(order)

    if not scores:
        raise EmptyCandidateSet(
            "every candidate order was excluded "
            f"(orders {excluded} undefined under {criterion.value})"
        )

    selected = None
    best = -math.inf
    for order in sorted(scores):
        if scores[order] > best:
            best = scores[order]
            selected = order
    return CriterionScores(
        criterion=criterion,
        scores=scores,
        selected=selected,
        excluded=tuple(excluded),
    )
