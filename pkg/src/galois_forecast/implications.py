"""Implications between attribute sets, the stem basis, and association rules.

Support and confidence are kept as exact ``Fraction`` values so rule
accounting can be checked by literal recounts; conversion to floats
happens only at the inference boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .fca import (
    ConceptLattice,
    FormalContext,
    bits,
    enumerate_concepts,
    is_subset,
    lectic_key,
    next_closed_set,
)

FractionLike = Union[Fraction, int, float, str]


def as_fraction(value: FractionLike) -> Fraction:
    """Exact rational from user input.

    Floats are read through their decimal literal (``0.7`` means 7/10, not
    the nearest binary double), which is what threshold flags intend.
    """
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class Implication:
    """Premise and conclusion attribute bitmasks over one shared space."""

    premise: int
    conclusion: int


@dataclass(frozen=True)
class AssociationRule:
    """An implication annotated with exact support and confidence."""

    implication: Implication
    support: Fraction
    confidence: Fraction

    @property
    def premise(self) -> int:
        return self.implication.premise

    @property
    def conclusion(self) -> int:
        return self.implication.conclusion


@dataclass(frozen=True)
class ImplicationBasis:
    """A complete, non-redundant implication set for one context."""

    rules: tuple[Implication, ...]
    context_fingerprint: str

    def __iter__(self):
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)


def respects(attribute_set: int, implication: Implication) -> bool:
    """True iff the set fails the premise or contains the conclusion."""
    return not is_subset(implication.premise, attribute_set) or is_subset(
        implication.conclusion, attribute_set
    )


def holds_in(ctx: FormalContext, implication: Implication) -> bool:
    """True iff every object row respects the implication.

    Equivalent to conclusion being contained in the closure of the premise.
    """
    return is_subset(implication.conclusion, ctx.closure(implication.premise))


def support(ctx: FormalContext, attribute_set: int) -> Fraction:
    """Proportion of objects owning every attribute of the set.

    On a context without objects the proportion degenerates; it is defined
    as 0 there (for the empty set too) so that rule accounting can treat
    0-support premises uniformly as vacuous.
    """
    if ctx.n_objects == 0:
        return Fraction(0)
    return Fraction(ctx.derive_attributes(attribute_set).bit_count(), ctx.n_objects)


def confidence(ctx: FormalContext, implication: Implication) -> Fraction:
    """supp(premise + conclusion) / supp(premise), with 0/0 read as 1."""
    denom = support(ctx, implication.premise)
    if denom == 0:
        return Fraction(1)
    return support(ctx, implication.premise | implication.conclusion) / denom


def stem_basis(ctx: FormalContext) -> ImplicationBasis:
    """Duquenne-Guigues basis: one rule per pseudo-intent.

    NextClosure enumerates, in lectic order, the sets closed under the
    rules found so far (ordinary saturation). Those sets are exactly the
    intents plus the pseudo-intents; each non-closed one contributes the
    rule ``Y -> Y''`` and immediately joins the saturation operator.
    """
    full = ctx.full_attributes
    found: list[Implication] = []

    def saturate(x: int) -> int:
        return armstrong_closure(found, x)

    y: int | None = 0
    while y is not None:
        closed = ctx.closure(y)
        if closed != y:
            found.append(Implication(y, closed))
        if y == full:
            break
        y = next_closed_set(saturate, ctx.n_attributes, y)
    return ImplicationBasis(tuple(found), ctx.fingerprint())


def armstrong_closure(rules: Iterable[Implication], attribute_set: int) -> int:
    """Least superset of the set closed under every rule (fixpoint)."""
    rules = tuple(rules)
    result = attribute_set
    changed = True
    while changed:
        changed = False
        for imp in rules:
            if is_subset(imp.premise, result) and not is_subset(imp.conclusion, result):
                result |= imp.conclusion
                changed = True
    return result


def follows(rules: Iterable[Implication], implication: Implication) -> bool:
    """Whether the implication is entailed by the rule set."""
    return is_subset(
        implication.conclusion, armstrong_closure(rules, implication.premise)
    )


def mine_association_rules(
    ctx: FormalContext,
    min_confidence: FractionLike,
    min_support: FractionLike = 0,
    lattice: ConceptLattice | None = None,
    basis: ImplicationBasis | None = None,
) -> list[AssociationRule]:
    """Stem-basis rules plus partial rules along lattice covering edges.

    Exact rules come from the stem basis (confidence 1, support of the
    conclusion). Partial rules are ``B1 -> B2 - B1`` for each covering pair
    of concept intents ``B1`` above ``B2``; their confidence is the extent
    ratio, which is strictly below 1 between distinct intents. Both groups
    are filtered by the thresholds and returned in a canonical order:
    confidence descending, support descending, then lectic premise and
    conclusion.

    ``basis`` swaps in a different complete implication basis for the
    exact-rule side; the stem basis is the default and the only generator
    shipped here.
    """
    min_conf = as_fraction(min_confidence)
    min_supp = as_fraction(min_support)
    if not 0 < min_conf <= 1:
        raise ValueError(f"min_confidence must be in (0, 1], got {min_conf}")
    if not 0 <= min_supp <= 1:
        raise ValueError(f"min_support must be in [0, 1], got {min_supp}")

    collected: dict[tuple[int, int], AssociationRule] = {}

    if basis is None:
        basis = stem_basis(ctx)
    for imp in basis.rules:
        supp = support(ctx, imp.premise | imp.conclusion)
        if supp >= min_supp:
            key = (imp.premise, imp.conclusion)
            collected.setdefault(key, AssociationRule(imp, supp, Fraction(1)))

    if lattice is None:
        lattice = enumerate_concepts(ctx)
    n_obj = ctx.n_objects
    for i, upper_concept in enumerate(lattice.concepts):
        upper_count = upper_concept.extent.bit_count()
        for j in lattice.lower[i]:
            lower_concept = lattice.concepts[j]
            lower_count = lower_concept.extent.bit_count()
            conf = Fraction(lower_count, upper_count) if upper_count else Fraction(1)
            supp = Fraction(lower_count, n_obj) if n_obj else Fraction(0)
            if conf < min_conf or supp < min_supp:
                continue
            imp = Implication(
                upper_concept.intent, lower_concept.intent & ~upper_concept.intent
            )
            collected.setdefault((imp.premise, imp.conclusion), AssociationRule(imp, supp, conf))

    width = ctx.n_attributes
    return sorted(
        collected.values(),
        key=lambda r: (
            -r.confidence,
            -r.support,
            lectic_key(r.premise, width),
            lectic_key(r.conclusion, width),
        ),
    )


def implication_text(attributes: Sequence[str], implication: Implication) -> str:
    premise = ", ".join(attributes[i] for i in bits(implication.premise))
    conclusion = ", ".join(attributes[i] for i in bits(implication.conclusion))
    return f"{premise} => {conclusion}".strip()


def rule_text(attributes: Sequence[str], rule: AssociationRule) -> str:
    """Human-readable form: ``A, B => C [supp=...; conf=...]``."""
    return (
        f"{implication_text(attributes, rule.implication)} "
        f"[supp={rule.support}; conf={rule.confidence}]"
    )


def rules_to_json_doc(
    ctx: FormalContext,
    rules: Sequence[AssociationRule],
    min_confidence: FractionLike,
    min_support: FractionLike = 0,
) -> dict:
    return {
        "schema_version": 1,
        "context": {
            "objects": ctx.n_objects,
            "attributes": list(ctx.attributes),
            "fingerprint": ctx.fingerprint(),
        },
        "min_confidence": str(as_fraction(min_confidence)),
        "min_support": str(as_fraction(min_support)),
        "rules": [
            {
                "premise": list(ctx.attribute_labels(r.premise)),
                "conclusion": list(ctx.attribute_labels(r.conclusion)),
                "support": str(r.support),
                "confidence": str(r.confidence),
            }
            for r in rules
        ],
    }


def rules_to_text(ctx: FormalContext, rules: Sequence[AssociationRule]) -> str:
    return "\n".join(rule_text(ctx.attributes, r) for r in rules) + ("\n" if rules else "")
