import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from galois_forecast.fca import FormalContext, mask_of
from galois_forecast.implications import AssociationRule, Implication, holds_in
from galois_forecast.inference import (
    ConfigurationError,
    Fact,
    InferenceError,
    KnowledgeBase,
    PropagationMode,
    UnknownAttributeError,
    entails_with_certainty,
    forecast_match,
    infer,
    initial_confidence,
    pick_outcome,
    replay_trace,
)

from conftest import random_context


def kb_over(attributes, rules=(), background=(), priors=None):
    return KnowledgeBase(
        attributes=tuple(attributes),
        rules=tuple(rules),
        background=tuple(background),
        initial_confidences=tuple(priors) if priors else (),
    )


def rule(premise_indices, conclusion_indices, conf):
    return AssociationRule(
        Implication(mask_of(premise_indices), mask_of(conclusion_indices)),
        Fraction(1),
        Fraction(conf) if not isinstance(conf, float) else Fraction(repr(conf)),
    )


class TestInitialConfidence:
    def test_four_of_nine(self, rng):
        rows = [[1] if i < 4 else [0] for i in range(9)]
        ctx = FormalContext.from_incidence([f"o{i}" for i in range(9)], ["a"], rows)
        assert initial_confidence(ctx, "a") == 0.5

    def test_held_by_all(self):
        ctx = FormalContext.from_incidence(["o1", "o2"], ["a"], [[1], [1]])
        assert initial_confidence(ctx, "a") == 1.0

    def test_held_by_none(self):
        rows = [[0]] * 9
        ctx = FormalContext.from_incidence([f"o{i}" for i in range(9)], ["a"], rows)
        assert initial_confidence(ctx, "a") == pytest.approx(0.1)

    def test_empty_context_gives_one(self):
        ctx = FormalContext((), ("a",), ())
        assert initial_confidence(ctx, "a") == 1.0

    def test_unknown_attribute(self, diagonal2):
        with pytest.raises(UnknownAttributeError):
            initial_confidence(diagonal2, "zzz")


class TestInfer:
    def test_single_rule(self):
        kb = kb_over("ab", [rule([0], [1], "4/5")])
        result = {f.attribute: f.confidence for f in infer(kb, [Fact("a", 1.0)])}
        assert result == {"a": 1.0, "b": pytest.approx(0.8)}

    def test_empty_kb_returns_facts_unchanged(self):
        kb = kb_over("ab")
        facts = [Fact("a", 0.7)]
        assert infer(kb, facts) == [Fact("a", 0.7)]

    def test_noisy_or_combination(self):
        kb = kb_over("abc", [rule([0], [1], "4/5"), rule([2], [1], "1/2")])
        result = {f.attribute: f.confidence for f in infer(kb, [Fact("a", 1.0), Fact("c", 1.0)])}
        assert result["b"] == pytest.approx(0.9)  # 1 - 0.2 * 0.5

    def test_min_vs_product_aggregation(self):
        kb = kb_over("abc", [rule([0, 1], [2], 1)])
        facts = [Fact("a", 0.5), Fact("b", 0.8)]
        min_result = {f.attribute: f.confidence for f in infer(kb, facts, PropagationMode.MIN_PRODUCT)}
        prod_result = {f.attribute: f.confidence for f in infer(kb, facts, PropagationMode.PRODUCT_PRODUCT)}
        assert min_result["c"] == pytest.approx(0.5)
        assert prod_result["c"] == pytest.approx(0.4)

    def test_empty_premise_always_fires(self):
        kb = kb_over("ab", [rule([], [0], "3/4")])
        result = {f.attribute: f.confidence for f in infer(kb, [])}
        assert result["a"] == pytest.approx(0.75)

    def test_cyclic_rules_terminate(self):
        kb = kb_over("ab", [rule([0], [1], "9/10"), rule([1], [0], "9/10")])
        result = {f.attribute: f.confidence for f in infer(kb, [Fact("a", 0.5)])}
        assert 0.5 < result["a"] <= 1.0
        assert 0.0 < result["b"] <= 1.0

    def test_background_implications_are_certain(self):
        kb = kb_over("ab", background=[Implication(mask_of([0]), mask_of([1]))])
        result = {f.attribute: f.confidence for f in infer(kb, [Fact("a", 0.6)])}
        assert result["b"] == pytest.approx(0.6)

    def test_monotone_never_decreases_inputs(self, rng):
        kb = kb_over("abcd", [rule([0], [1, 2], "1/2"), rule([1], [3], "1/3")])
        for _ in range(20):
            c = rng.random()
            result = {f.attribute: f.confidence for f in infer(kb, [Fact("a", c)])}
            assert result["a"] >= c

    def test_unknown_fact_attribute(self):
        kb = kb_over("ab")
        with pytest.raises(UnknownAttributeError):
            infer(kb, [Fact("zzz", 1.0)])

    def test_non_finite_confidence(self):
        kb = kb_over("ab")
        with pytest.raises(InferenceError):
            infer(kb, [Fact("a", math.nan)])
        with pytest.raises(InferenceError):
            infer(kb, [Fact("a", 1.5)])

    def test_rule_order_shuffle_is_byte_identical(self, rng):
        attrs = "abcdefgh"
        rules = []
        for _ in range(30):
            premise = [i for i in range(8) if rng.random() < 0.3]
            conclusion = [i for i in range(8) if rng.random() < 0.2] or [rng.randrange(8)]
            rules.append(rule(premise, conclusion, Fraction(rng.randrange(1, 100), 100)))
        facts = [Fact("a", 1.0), Fact("b", 0.7)]
        reference = None
        for _ in range(5):
            shuffled = rules[:]
            rng.shuffle(shuffled)
            kb = kb_over(attrs, shuffled)
            out = json.dumps([(f.attribute, f.confidence) for f in infer(kb, facts)])
            if reference is None:
                reference = out
            assert out == reference

    def test_trace_replays_exactly(self, rng):
        from galois_forecast.inference import _propagate

        attrs = "abcde"
        rules = [
            rule([0], [1], "4/5"),
            rule([1], [2], "3/4"),
            rule([0, 1], [3], "2/3"),
            rule([3], [2], "1/2"),
        ]
        kb = kb_over(attrs, rules)
        facts = [Fact("a", 0.9)]
        state, trace = _propagate(kb, facts, PropagationMode.MIN_PRODUCT)
        replayed = replay_trace(kb.attributes, {"a": 0.9}, trace)
        for i, label in enumerate(kb.attributes):
            assert replayed[label] == state[i]  # exact float equality


class TestPickOutcome:
    def test_argmax(self):
        assert pick_outcome(0.5, 0.2, 0.3) == "1"

    def test_tie_prefers_home(self):
        assert pick_outcome(0.5, 0.2, 0.5) == "1"

    def test_tie_prefers_draw_over_away(self):
        assert pick_outcome(0.1, 0.4, 0.4) == "X"

    @given(
        st.floats(0.01, 1), st.floats(0.01, 1), st.floats(0.01, 1),
        st.integers(-20, 20),
    )
    def test_invariant_under_power_of_two_scaling(self, c1, cx, c2, exponent):
        scale = 2.0**exponent
        assert pick_outcome(c1, cx, c2) == pick_outcome(c1 * scale, cx * scale, c2 * scale)


def outcome_kb(rules=(), priors=(0.5, 0.25, 0.3, 0.0)):
    return kb_over(("1", "X", "2", "f"), rules, priors=priors)


class TestForecastMatch:
    def test_pick_from_derived(self):
        kb = outcome_kb([rule([3], [0], "1/2"), rule([3], [1], "1/5"), rule([3], [2], "3/10")])
        fc = forecast_match(kb, [Fact("f", 1.0)], home_reduction=1.0)
        assert fc.pick == "1"
        assert fc.home_win == pytest.approx(0.5)
        assert not fc.prior_only

    def test_tie_break(self):
        kb = outcome_kb([rule([3], [0], "1/2"), rule([3], [1], "1/5"), rule([3], [2], "1/2")])
        fc = forecast_match(kb, [Fact("f", 1.0)], home_reduction=1.0)
        assert fc.pick == "1"

    def test_home_reduction_flips_pick(self):
        kb = outcome_kb([rule([3], [0], "3/5"), rule([3], [1], "1/5"), rule([3], [2], "1/2")])
        fc = forecast_match(kb, [Fact("f", 1.0)], home_reduction=0.8)
        assert fc.home_win == pytest.approx(0.48)
        assert fc.pick == "2"

    def test_prior_fallback(self):
        kb = outcome_kb()
        fc = forecast_match(kb, [Fact("f", 1.0)], home_reduction=1.0)
        assert fc.prior_only
        assert fc.home_win == pytest.approx(0.5)
        assert fc.draw == pytest.approx(0.25)
        assert fc.away_win == pytest.approx(0.3)
        prior_entries = [t for t in fc.trace if t.rule.startswith("prior(")]
        assert len(prior_entries) == 3

    def test_partial_prior_not_flagged(self):
        kb = outcome_kb([rule([3], [0], "3/5")])
        fc = forecast_match(kb, [Fact("f", 1.0)], home_reduction=1.0)
        assert not fc.prior_only
        assert fc.draw == pytest.approx(0.25)  # fell back individually

    def test_outcome_attributes_rejected_as_facts(self):
        kb = outcome_kb()
        with pytest.raises(ConfigurationError):
            forecast_match(kb, [Fact("1", 1.0)])

    def test_missing_outcome_attribute(self):
        kb = kb_over(("1", "X", "f"))
        with pytest.raises(ConfigurationError):
            forecast_match(kb, [])

    def test_reduction_bounds(self):
        kb = outcome_kb()
        with pytest.raises(ConfigurationError):
            forecast_match(kb, [], home_reduction=0.0)
        with pytest.raises(ConfigurationError):
            forecast_match(kb, [], home_reduction=1.5)

    def test_json_shape(self):
        kb = outcome_kb([rule([3], [0], "3/5")])
        fc = forecast_match(kb, [Fact("f", 1.0)])
        doc = fc.to_json_dict("m1")
        assert set(doc) == {"match", "c1", "cx", "c2", "pick", "prior_only", "trace"}
        assert all(set(t) == {"rule", "fired_conf"} for t in doc["trace"])


class TestEntailsWithCertainty:
    def test_premises_containing_goal(self):
        kb = kb_over("abc")
        assert entails_with_certainty(kb, ["a", "b"], ["a"])

    def test_diagonal_counterexample(self, diagonal2):
        from galois_forecast.implications import mine_association_rules

        kb = KnowledgeBase.from_context(
            diagonal2, mine_association_rules(diagonal2, 1, 0)
        )
        assert not entails_with_certainty(kb, ["a1"], ["a2"])

    def test_low_confidence_rules_ignored(self):
        kb = kb_over("ab", [rule([0], [1], "9/10")])
        assert not entails_with_certainty(kb, ["a"], ["b"])
        certain = kb_over("ab", [rule([0], [1], 1)])
        assert entails_with_certainty(certain, ["a"], ["b"])

    def test_agrees_with_holds_in_exhaustively(self, rng):
        from galois_forecast.implications import mine_association_rules

        for _ in range(15):
            ctx = random_context(rng, 6, 5)
            kb = KnowledgeBase.from_context(ctx, mine_association_rules(ctx, 1, 0))
            n = ctx.n_attributes
            for premise in range(1 << n):
                premise_labels = [ctx.attributes[i] for i in range(n) if premise >> i & 1]
                closed = ctx.closure(premise)
                for conclusion in range(1 << n):
                    goal_labels = [ctx.attributes[i] for i in range(n) if conclusion >> i & 1]
                    entailed = entails_with_certainty(kb, premise_labels, goal_labels)
                    assert entailed == holds_in(ctx, Implication(premise, conclusion))
