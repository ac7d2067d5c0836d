"""Confidence-propagating production system over association rules.

Facts carry a confidence in [0, 1]. Forward chaining runs Jacobi-style
rounds to a fixpoint: each round recomputes every attribute from the base
facts and the current rule firings, so the result does not depend on rule
order. A rule fires with its own confidence times an aggregate of its
premise confidences (min or product); several derivations of the same
attribute combine by noisy-OR. All products are taken over canonically
sorted contributions, which makes outputs byte-identical under any
shuffling of the rule list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .fca import FormalContext, bits, is_subset, mask_of
from .implications import (
    AssociationRule,
    Implication,
    armstrong_closure,
    implication_text,
)

EPSILON = 1e-9
MAX_ROUNDS = 50_000
OUTCOME_ATTRIBUTES = ("1", "X", "2")


class InferenceError(Exception):
    """Base class for inference failures."""


class UnknownAttributeError(InferenceError):
    """A fact or goal refers to an attribute outside the knowledge base."""


class ConfigurationError(InferenceError):
    """The knowledge base or call parameters are unusable as configured."""


class PropagationMode(str, Enum):
    """How a rule aggregates the confidences of its premise facts."""

    MIN_PRODUCT = "min-product"
    PRODUCT_PRODUCT = "product-product"


@dataclass(frozen=True)
class Fact:
    attribute: str
    confidence: float


@dataclass(frozen=True)
class TraceEntry:
    """One contribution to the final state: a rule firing or a prior fallback."""

    rule: str
    fired_conf: float
    conclusion: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {"rule": self.rule, "fired_conf": self.fired_conf}


@dataclass
class KnowledgeBase:
    """Rules plus background implications over one shared attribute space.

    ``initial_confidences`` holds the per-attribute prior computed from the
    source context; it is used as a fallback for outcome attributes that no
    rule concludes.
    """

    attributes: tuple[str, ...]
    rules: tuple[AssociationRule, ...] = ()
    background: tuple[Implication, ...] = ()
    initial_confidences: tuple[float, ...] = ()
    context_fingerprint: str = ""
    degenerate: bool = False

    def __post_init__(self) -> None:
        if not self.initial_confidences:
            self.initial_confidences = tuple(0.0 for _ in self.attributes)
        if len(self.initial_confidences) != len(self.attributes):
            raise ConfigurationError("initial confidences do not match attribute space")
        space = (1 << len(self.attributes)) - 1
        for rule in self.rules:
            if rule.premise & ~space or rule.conclusion & ~space:
                raise ConfigurationError("rule uses attributes outside the space")
        for imp in self.background:
            if imp.premise & ~space or imp.conclusion & ~space:
                raise ConfigurationError("background implication outside the space")

    @classmethod
    def from_context(
        cls,
        ctx: FormalContext,
        rules: Sequence[AssociationRule],
        background: Sequence[Implication] = (),
        degenerate: bool = False,
    ) -> "KnowledgeBase":
        priors = tuple(initial_confidence(ctx, a) for a in ctx.attributes)
        return cls(
            attributes=ctx.attributes,
            rules=tuple(rules),
            background=tuple(background),
            initial_confidences=priors,
            context_fingerprint=ctx.fingerprint(),
            degenerate=degenerate,
        )

    def attribute_position(self, attribute: str) -> int:
        try:
            return self.attributes.index(attribute)
        except ValueError:
            raise UnknownAttributeError(f"unknown attribute {attribute!r}") from None


@dataclass(frozen=True)
class Forecast:
    """Outcome confidences for one match, with the firing trace."""

    home_win: float
    draw: float
    away_win: float
    pick: str
    trace: tuple[TraceEntry, ...]
    prior_only: bool

    def to_json_dict(self, match: str | None = None) -> dict:
        doc = {
            "match": match,
            "c1": self.home_win,
            "cx": self.draw,
            "c2": self.away_win,
            "pick": self.pick,
            "prior_only": self.prior_only,
            "trace": [entry.to_json_dict() for entry in self.trace],
        }
        if match is None:
            doc.pop("match")
        return doc


def initial_confidence(ctx: FormalContext, attribute: str) -> float:
    """Prior for an attribute: (owners + 1) / (objects + 1), always in (0, 1]."""
    try:
        j = ctx.attribute_index[attribute]
    except KeyError:
        raise UnknownAttributeError(f"unknown attribute {attribute!r}") from None
    return (ctx.columns[j].bit_count() + 1) / (ctx.n_objects + 1)


def _normalized_rules(kb: KnowledgeBase) -> list[tuple[int, int, float, str]]:
    """Rules and background as (premise, conclusion, confidence, text), canonically sorted."""
    items = []
    for rule in kb.rules:
        conf = float(rule.confidence)
        text = (
            f"{implication_text(kb.attributes, rule.implication)} [conf={rule.confidence}]"
        )
        items.append((rule.premise, rule.conclusion, conf, text))
    for imp in kb.background:
        items.append(
            (imp.premise, imp.conclusion, 1.0, f"{implication_text(kb.attributes, imp)} [conf=1]")
        )
    items.sort(key=lambda r: (r[0], r[1], r[2]))
    return items


def _base_vector(kb: KnowledgeBase, facts: Iterable[Fact]) -> list[float]:
    base = [0.0] * len(kb.attributes)
    for fact in facts:
        pos = kb.attribute_position(fact.attribute)
        c = fact.confidence
        if not math.isfinite(c):
            raise InferenceError(f"non-finite confidence for {fact.attribute!r}")
        if not 0.0 <= c <= 1.0:
            raise InferenceError(f"confidence out of [0, 1] for {fact.attribute!r}")
        # repeated facts about one attribute combine like any other derivations
        base[pos] = 1.0 - (1.0 - base[pos]) * (1.0 - c)
    return base


def _firing(rule_conf: float, premise: int, state: Sequence[float], mode: PropagationMode) -> float:
    agg = 1.0
    if mode is PropagationMode.MIN_PRODUCT:
        for i in bits(premise):
            agg = min(agg, state[i])
            if agg == 0.0:
                return 0.0
    else:
        for i in bits(premise):
            agg *= state[i]
            if agg == 0.0:
                return 0.0
    return rule_conf * agg


def _propagate(
    kb: KnowledgeBase, facts: Iterable[Fact], mode: PropagationMode
) -> tuple[list[float], list[TraceEntry]]:
    base = _base_vector(kb, facts)
    rules = _normalized_rules(kb)
    state = list(base)
    for _ in range(MAX_ROUNDS):
        firings = [_firing(conf, premise, state, mode) for premise, _, conf, _ in rules]
        nxt = list(base)
        for (premise, conclusion, _, _), fired in zip(rules, firings):
            if fired <= 0.0:
                continue
            for i in bits(conclusion):
                nxt[i] = 1.0 - (1.0 - nxt[i]) * (1.0 - fired)
        delta = max((n - s for n, s in zip(nxt, state)), default=0.0)
        state = nxt
        if delta <= EPSILON:
            break
    else:
        raise InferenceError("propagation did not converge")

    # Final pass: record firings from the converged state and emit exactly
    # what replaying those records produces, so the trace is authoritative.
    trace = []
    for premise, conclusion, conf, text in rules:
        fired = _firing(conf, premise, state, mode)
        if fired > 0.0:
            trace.append(
                TraceEntry(text, fired, tuple(kb.attributes[i] for i in bits(conclusion)))
            )
    positions = {a: i for i, a in enumerate(kb.attributes)}
    final = list(base)
    for entry in trace:
        for label in entry.conclusion:
            i = positions[label]
            final[i] = 1.0 - (1.0 - final[i]) * (1.0 - entry.fired_conf)
    return final, trace


def infer(
    kb: KnowledgeBase,
    facts: Iterable[Fact],
    mode: PropagationMode = PropagationMode.MIN_PRODUCT,
) -> list[Fact]:
    """Forward-chain to a fixpoint; returns every attribute with confidence > 0."""
    state, _ = _propagate(kb, facts, mode)
    return [Fact(kb.attributes[i], c) for i, c in enumerate(state) if c > 0.0]


def replay_trace(
    kb_attributes: Sequence[str],
    base: Mapping[str, float],
    trace: Iterable[TraceEntry],
) -> dict[str, float]:
    """Recompute final confidences from a trace; must reproduce infer's output."""
    result = {a: base.get(a, 0.0) for a in kb_attributes}
    for entry in trace:
        for label in entry.conclusion:
            result[label] = 1.0 - (1.0 - result[label]) * (1.0 - entry.fired_conf)
    return result


def pick_outcome(home_win: float, draw: float, away_win: float) -> str:
    """Argmax over the outcome triple with the 1 > X > 2 tie-break."""
    if home_win >= draw and home_win >= away_win:
        return "1"
    if draw >= away_win:
        return "X"
    return "2"


def forecast_match(
    kb: KnowledgeBase,
    facts: Sequence[Fact],
    home_reduction: float = 0.85,
    mode: PropagationMode = PropagationMode.MIN_PRODUCT,
) -> Forecast:
    """Run the production system for one match and pick the best outcome.

    The home-win confidence is multiplied by ``home_reduction`` before the
    argmax to compensate the home-side base rate. Outcome attributes that
    no rule concludes fall back to their prior from the knowledge base's
    source context; those fallbacks appear in the trace as ``prior(...)``
    entries, and a forecast whose three outcomes are all priors is flagged
    ``prior_only``.
    """
    if not 0.0 < home_reduction <= 1.0:
        raise ConfigurationError(f"home_reduction must be in (0, 1], got {home_reduction}")
    for outcome in OUTCOME_ATTRIBUTES:
        if outcome not in kb.attributes:
            raise ConfigurationError(f"knowledge base lacks outcome attribute {outcome!r}")
    for fact in facts:
        if fact.attribute in OUTCOME_ATTRIBUTES:
            raise ConfigurationError("outcome attributes cannot be given as facts")

    state, trace = _propagate(kb, facts, mode)
    values = {}
    derived_any = False
    for outcome in OUTCOME_ATTRIBUTES:
        pos = kb.attribute_position(outcome)
        if state[pos] > 0.0:
            values[outcome] = state[pos]
            derived_any = True
        else:
            prior = kb.initial_confidences[pos]
            values[outcome] = prior
            trace.append(TraceEntry(f"prior({outcome})", prior, (outcome,)))

    c1 = values["1"] * home_reduction
    cx = values["X"]
    c2 = values["2"]
    return Forecast(
        home_win=c1,
        draw=cx,
        away_win=c2,
        pick=pick_outcome(c1, cx, c2),
        trace=tuple(trace),
        prior_only=not derived_any,
    )


def entails_with_certainty(
    kb: KnowledgeBase, premises: Iterable[str], goal: Iterable[str]
) -> bool:
    """Boolean chaining restricted to confidence-1 rules plus background.

    Coincides with entailment from an implication basis and with model
    checking on the source context.
    """
    implications = [r.implication for r in kb.rules if r.confidence == 1]
    implications.extend(kb.background)
    premise_mask = mask_of(kb.attribute_position(a) for a in premises)
    goal_mask = mask_of(kb.attribute_position(a) for a in goal)
    return is_subset(goal_mask, armstrong_closure(implications, premise_mask))
