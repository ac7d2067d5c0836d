"""Formal contexts, derivation operators, and concept lattices.

Object and attribute sets are plain ``int`` bitmasks: bit ``i`` of an
attribute mask refers to ``context.attributes[i]``, and likewise for
objects. Contexts are immutable after construction, all operations are
pure reads, and enumeration follows the lectic order induced by the
declared attribute order, so every result is reproducible byte for byte.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Iterator, Sequence


class BoundsError(IndexError):
    """A set refers to indices outside the owning context."""


def mask_of(indices: Iterable[int]) -> int:
    """Bitmask with the given indices set."""
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def bits(mask: int) -> Iterator[int]:
    """Indices of the set bits, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


def lectic_key(mask: int, width: int) -> int:
    """Integer whose natural order realises the lectic order on subsets.

    Index 0 is the most significant position: A precedes B exactly when
    the smallest index where they differ belongs to B.
    """
    key = 0
    for i in bits(mask):
        key |= 1 << (width - 1 - i)
    return key


@dataclass(frozen=True)
class FormalContext:
    """A boolean incidence relation between named objects and attributes.

    ``rows[i]`` is the attribute bitmask of object ``i``. The attribute
    order is fixed at construction and never reordered; the lectic order
    used by enumeration depends on it.
    """

    objects: tuple[str, ...]
    attributes: tuple[str, ...]
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(set(self.objects)) != len(self.objects):
            raise ValueError("duplicate object identifiers")
        if len(set(self.attributes)) != len(self.attributes):
            raise ValueError("duplicate attribute identifiers")
        if len(self.rows) != len(self.objects):
            raise ValueError(
                f"{len(self.rows)} incidence rows for {len(self.objects)} objects"
            )
        full = self.full_attributes
        for name, row in zip(self.objects, self.rows):
            if row < 0 or row & ~full:
                raise ValueError(f"incidence row for {name!r} is out of bounds")

    @classmethod
    def from_incidence(
        cls,
        objects: Sequence[str],
        attributes: Sequence[str],
        incidence: Sequence[Sequence[int]],
    ) -> "FormalContext":
        """Build from a dense 0/1 (or boolean) matrix."""
        objects = tuple(objects)
        attributes = tuple(attributes)
        if len(incidence) != len(objects):
            raise ValueError("incidence matrix height does not match object count")
        rows = []
        for name, row in zip(objects, incidence):
            if len(row) != len(attributes):
                raise ValueError(f"incidence row for {name!r} has wrong width")
            rows.append(mask_of(j for j, v in enumerate(row) if v))
        return cls(objects, attributes, tuple(rows))

    @classmethod
    def from_pairs(
        cls,
        objects: Sequence[str],
        attributes: Sequence[str],
        pairs: Iterable[tuple[str, str]],
    ) -> "FormalContext":
        """Build from (object, attribute) incidence pairs."""
        objects = tuple(objects)
        attributes = tuple(attributes)
        oindex = {name: i for i, name in enumerate(objects)}
        aindex = {name: j for j, name in enumerate(attributes)}
        rows = [0] * len(objects)
        for obj, attr in pairs:
            if obj not in oindex:
                raise ValueError(f"unknown object {obj!r}")
            if attr not in aindex:
                raise ValueError(f"unknown attribute {attr!r}")
            rows[oindex[obj]] |= 1 << aindex[attr]
        return cls(objects, attributes, tuple(rows))

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    @property
    def full_objects(self) -> int:
        return (1 << len(self.objects)) - 1

    @property
    def full_attributes(self) -> int:
        return (1 << len(self.attributes)) - 1

    @cached_property
    def columns(self) -> tuple[int, ...]:
        """Per attribute, the bitmask of objects owning it."""
        cols = [0] * len(self.attributes)
        for i, row in enumerate(self.rows):
            for j in bits(row):
                cols[j] |= 1 << i
        return tuple(cols)

    @cached_property
    def object_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.objects)}

    @cached_property
    def attribute_index(self) -> dict[str, int]:
        return {name: j for j, name in enumerate(self.attributes)}

    def object_mask(self, names: Iterable[str]) -> int:
        return mask_of(self.object_index[n] for n in names)

    def attribute_mask(self, labels: Iterable[str]) -> int:
        return mask_of(self.attribute_index[a] for a in labels)

    def object_names(self, mask: int) -> tuple[str, ...]:
        return tuple(self.objects[i] for i in bits(mask))

    def attribute_labels(self, mask: int) -> tuple[str, ...]:
        return tuple(self.attributes[j] for j in bits(mask))

    def derive_objects(self, object_set: int) -> int:
        """Attributes common to every object of the set; all of A for the empty set."""
        if object_set < 0 or object_set >> self.n_objects:
            raise BoundsError("object set out of bounds")
        common = self.full_attributes
        for i in bits(object_set):
            common &= self.rows[i]
            if not common:
                break
        return common

    def derive_attributes(self, attribute_set: int) -> int:
        """Objects owning every attribute of the set; all of O for the empty set."""
        if attribute_set < 0 or attribute_set >> self.n_attributes:
            raise BoundsError("attribute set out of bounds")
        common = self.full_objects
        for j in bits(attribute_set):
            common &= self.columns[j]
            if not common:
                break
        return common

    def closure(self, attribute_set: int) -> int:
        """Double derivation of an attribute set.

        Equivalent to ``derive_objects(derive_attributes(Y))`` but tests
        extent containment column by column, which is much cheaper when
        extents are large.
        """
        extent = self.derive_attributes(attribute_set)
        intent = 0
        for j, col in enumerate(self.columns):
            if col & extent == extent:
                intent |= 1 << j
        return intent

    def subcontext(
        self, object_indices: Sequence[int], attribute_indices: Sequence[int]
    ) -> "FormalContext":
        """Restriction to the given rows and columns, in the given order."""
        for i in object_indices:
            if not 0 <= i < self.n_objects:
                raise BoundsError(f"object index {i} out of bounds")
        for j in attribute_indices:
            if not 0 <= j < self.n_attributes:
                raise BoundsError(f"attribute index {j} out of bounds")
        rows = []
        for i in object_indices:
            row = self.rows[i]
            rows.append(mask_of(k for k, j in enumerate(attribute_indices) if row >> j & 1))
        return FormalContext(
            tuple(self.objects[i] for i in object_indices),
            tuple(self.attributes[j] for j in attribute_indices),
            tuple(rows),
        )

    def to_json_dict(self) -> dict:
        return {
            "objects": list(self.objects),
            "attributes": list(self.attributes),
            "incidence": [
                [1 if row >> j & 1 else 0 for j in range(self.n_attributes)]
                for row in self.rows
            ],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "FormalContext":
        try:
            return cls.from_incidence(doc["objects"], doc["attributes"], doc["incidence"])
        except KeyError as exc:
            raise ValueError(f"context document is missing key {exc}") from exc

    def to_cxt(self) -> str:
        """Burmeister .cxt text."""
        lines = ["B", "", str(self.n_objects), str(self.n_attributes), ""]
        lines.extend(self.objects)
        lines.extend(self.attributes)
        for row in self.rows:
            lines.append(
                "".join("X" if row >> j & 1 else "." for j in range(self.n_attributes))
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_cxt(cls, text: str) -> "FormalContext":
        lines = [line.rstrip("\r") for line in text.split("\n")]
        if not lines or lines[0].strip() != "B":
            raise ValueError("not a Burmeister context: missing 'B' header")
        body = [line for line in lines[1:] if line.strip() != ""]
        try:
            n_obj = int(body[0])
            n_attr = int(body[1])
        except (IndexError, ValueError) as exc:
            raise ValueError("malformed Burmeister header counts") from exc
        names = body[2:]
        if len(names) < n_obj + n_attr + n_obj:
            raise ValueError("truncated Burmeister context")
        objects = names[:n_obj]
        attributes = names[n_obj : n_obj + n_attr]
        rows = []
        for k, line in enumerate(names[n_obj + n_attr : n_obj + n_attr + n_obj]):
            cells = line.strip()
            if len(cells) != n_attr or any(c not in "X." for c in cells):
                raise ValueError(f"malformed incidence row {k + 1}: {line!r}")
            rows.append([1 if c == "X" else 0 for c in cells])
        return cls.from_incidence(objects, attributes, rows)

    @cached_property
    def _fingerprint(self) -> str:
        blob = json.dumps(self.to_json_dict(), separators=(",", ":"), sort_keys=True)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def fingerprint(self) -> str:
        """Stable identity of the context contents."""
        return self._fingerprint


@dataclass(frozen=True)
class Concept:
    """A maximal rectangle of the incidence: extent' = intent, intent' = extent."""

    extent: int
    intent: int


@dataclass
class ConceptLattice:
    """All concepts of a context plus the covering (Hasse) relation.

    Concepts are listed in lectic intent order, so index 0 is the top
    concept (all objects) and the last index is the bottom. ``lower[i]``
    holds the immediate subconcepts of concept ``i``.
    """

    context: FormalContext
    concepts: tuple[Concept, ...]
    lower: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.concepts)

    @property
    def top_index(self) -> int:
        return 0

    @property
    def bottom_index(self) -> int:
        return len(self.concepts) - 1

    @cached_property
    def upper(self) -> tuple[tuple[int, ...], ...]:
        ups: list[list[int]] = [[] for _ in self.concepts]
        for i, lows in enumerate(self.lower):
            for j in lows:
                ups[j].append(i)
        return tuple(tuple(sorted(u)) for u in ups)

    @cached_property
    def ranks(self) -> tuple[int, ...]:
        """Longest covering path from the top concept, per concept.

        Enumeration order is a linear extension of the intent order, so a
        single forward pass suffices.
        """
        rank = [0] * len(self.concepts)
        for i in range(len(self.concepts)):
            for j in self.lower[i]:
                rank[j] = max(rank[j], rank[i] + 1)
        return tuple(rank)

    @cached_property
    def intent_index(self) -> dict[int, int]:
        return {c.intent: k for k, c in enumerate(self.concepts)}


def next_closed_set(
    close: Callable[[int], int], n_attributes: int, current: int
) -> int | None:
    """Lectic successor of ``current`` among the closed sets of ``close``.

    Standard NextClosure step: scan candidate positions from the largest
    index down, keeping the first candidate that introduces no new element
    below the flipped position. Returns None when ``current`` is the last
    closed set (the full attribute set).
    """
    y = current
    for i in range(n_attributes - 1, -1, -1):
        bit = 1 << i
        if y & bit:
            y &= ~bit
        else:
            candidate = close(y | bit)
            if not (candidate ^ y) & (bit - 1):
                return candidate
    return None


def _lower_neighbor_intents(ctx: FormalContext, intent: int) -> list[int]:
    """Intents covering ``intent`` from below (immediate larger intents).

    Every closed proper superset contains some closure(intent + one
    attribute), so the minimal elements of that candidate family are
    exactly the lower neighbors.
    """
    seen: dict[int, None] = {}
    for j in range(ctx.n_attributes):
        bit = 1 << j
        if not intent & bit:
            seen.setdefault(ctx.closure(intent | bit), None)
    candidates = list(seen)
    minimal = []
    for c in candidates:
        if not any(o != c and is_subset(o, c) for o in candidates):
            minimal.append(c)
    return minimal


def enumerate_concepts(ctx: FormalContext) -> ConceptLattice:
    """All formal concepts of the context, each exactly once, with covering.

    Intents are produced by NextClosure in lectic order; the covering
    relation is the transitive reduction of extent inclusion.
    """
    intents: list[int] = []
    y: int | None = ctx.closure(0)
    while y is not None:
        intents.append(y)
        y = next_closed_set(ctx.closure, ctx.n_attributes, y)
    concepts = tuple(Concept(ctx.derive_attributes(i), i) for i in intents)
    index = {intent: k for k, intent in enumerate(intents)}
    lower = tuple(
        tuple(sorted(index[d] for d in _lower_neighbor_intents(ctx, intent)))
        for intent in intents
    )
    return ConceptLattice(ctx, concepts, lower)


def reduced_attribute_homes(lattice: ConceptLattice) -> dict[int, list[str]]:
    """Attribute labels placed at their maximal concept (reduced labeling)."""
    ctx = lattice.context
    homes: dict[int, list[str]] = {}
    for j, label in enumerate(ctx.attributes):
        idx = lattice.intent_index[ctx.closure(1 << j)]
        homes.setdefault(idx, []).append(label)
    return homes


def reduced_object_homes(lattice: ConceptLattice) -> dict[int, list[str]]:
    """Object names placed at their minimal concept (reduced labeling)."""
    ctx = lattice.context
    homes: dict[int, list[str]] = {}
    for i, name in enumerate(ctx.objects):
        idx = lattice.intent_index[ctx.rows[i]]
        homes.setdefault(idx, []).append(name)
    return homes


def lattice_to_json_doc(
    lattice: ConceptLattice, outcome_labels: Sequence[str] = ("1", "X", "2")
) -> dict:
    """JSON document for a lattice, including layout ranks and reduced labels.

    For every outcome label present in the context, each concept also
    carries the size of the extent overlap with that outcome's column, so
    clients can show coverage ratios without recomputing anything.
    """
    ctx = lattice.context
    attr_homes = reduced_attribute_homes(lattice)
    obj_homes = reduced_object_homes(lattice)
    outcome_cols = {
        label: ctx.columns[ctx.attribute_index[label]]
        for label in outcome_labels
        if label in ctx.attribute_index
    }
    concepts = []
    for k, c in enumerate(lattice.concepts):
        entry = {
            "extent": list(ctx.object_names(c.extent)),
            "intent": list(ctx.attribute_labels(c.intent)),
            "extent_size": c.extent.bit_count(),
            "intent_size": c.intent.bit_count(),
            "rank": lattice.ranks[k],
            "attribute_labels": attr_homes.get(k, []),
            "object_labels": obj_homes.get(k, []),
        }
        if outcome_cols:
            entry["outcome_overlap"] = {
                label: (c.extent & col).bit_count()
                for label, col in outcome_cols.items()
            }
        concepts.append(entry)
    return {
        "schema_version": 1,
        "context_fingerprint": ctx.fingerprint(),
        "objects": list(ctx.objects),
        "attributes": list(ctx.attributes),
        "concepts": concepts,
        "covering": [list(lows) for lows in lattice.lower],
    }


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def lattice_to_dot(lattice: ConceptLattice) -> str:
    """Hasse diagram in DOT, reduced labeling, bottom-to-top rank direction."""
    attr_homes = reduced_attribute_homes(lattice)
    obj_homes = reduced_object_homes(lattice)
    lines = [
        "digraph concept_lattice {",
        "  rankdir=BT;",
        '  node [shape=box, fontname="Helvetica"];',
    ]
    for k in range(len(lattice.concepts)):
        parts = []
        if k in attr_homes:
            parts.append(", ".join(attr_homes[k]))
        if k in obj_homes:
            parts.append(", ".join(obj_homes[k]))
        label = "\\n".join(_dot_escape(p) for p in parts)
        lines.append(f'  c{k} [label="{label}"];')
    for i, lows in enumerate(lattice.lower):
        for j in lows:
            lines.append(f"  c{j} -> c{i};")
    lines.append("}")
    return "\n".join(lines) + "\n"
