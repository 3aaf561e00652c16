"""Core topic-map model: identifiers, topics, occurrences, associations, scopes.

Pure data, no I/O. Values are immutable after construction; operations that
"mutate" a map build a new one. Every collection-valued field is stored in a
canonical order (sorted tuples, except where order itself is data, like the
slide corridor), so two semantically equal maps compare equal with plain
dataclass equality and serialize to identical bytes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, NamedTuple, TypeVar

from .errors import EmptyLabel

T = TypeVar("T")

_WS_RUN = re.compile(r"\s+")


def normalize_label(raw: str) -> str:
    """Return the canonical subject identifier for a raw topic label.

    Casefolds, trims, and collapses internal whitespace runs to a single "-"
    so that labels differing only in case or spacing land on the same topic.
    Idempotent. Raises EmptyLabel when nothing is left after normalization.
    """
    normal = _WS_RUN.sub("-", raw.casefold().strip())
    if not normal:
        raise EmptyLabel(f"label {raw!r} normalizes to an empty identifier")
    return normal


def dedup_ordered(items: Iterable[T]) -> Iterator[T]:
    """Yield items with duplicates dropped, first occurrence wins."""
    seen = set()
    for item in items:
        if item not in seen:
            seen.add(item)
            yield item


class SlideRef(NamedTuple):
    """Globally unique slide address: deck id plus slide id within the deck."""

    deck_id: str
    slide_id: str

    @property
    def key(self) -> str:
        return f"{self.deck_id}/{self.slide_id}"

    @classmethod
    def from_key(cls, key: str) -> "SlideRef":
        # deck ids never contain "/" (enforced at ingest), slide ids may
        deck, sep, slide = key.partition("/")
        if not sep or not deck or not slide:
            raise ValueError(f"not a deck/slide key: {key!r}")
        return cls(deck, slide)


class OccurrenceClass(str, Enum):
    """Declared objective of a slide. FACT is the default for plain content."""

    NEW_TOPIC = "new_topic"
    DEFINITION = "definition"
    EXAMPLE = "example"
    SUMMARY = "summary"
    AGENDA = "agenda"
    OVERVIEW = "overview"
    FACT = "fact"


class AssociationType(str, Enum):
    TEMPORAL_CONTINUITY = "temporal_continuity"
    PRELIMINARY_KNOWLEDGE = "preliminary_knowledge"
    DIRECT_REFERENCE = "direct_reference"
    DISCUSSION = "discussion"


# Role names per association type, in canonical (first, second) order.
ROLES: dict[AssociationType, tuple[str, str]] = {
    AssociationType.TEMPORAL_CONTINUITY: ("predecessor", "successor"),
    AssociationType.PRELIMINARY_KNOWLEDGE: ("prerequisite", "dependent"),
    AssociationType.DIRECT_REFERENCE: ("source", "target"),
    AssociationType.DISCUSSION: ("source", "target"),
}


@dataclass(frozen=True)
class Association:
    """Typed, role-bearing edge between two topics.

    ``first`` and ``second`` fill the two roles of ``type`` in the order
    given by ROLES, e.g. a PRELIMINARY_KNOWLEDGE edge has first=prerequisite
    and second=dependent.
    """

    type: AssociationType
    first: str
    second: str

    @property
    def roles(self) -> dict[str, str]:
        a, b = ROLES[self.type]
        return {a: self.first, b: self.second}

    def sort_key(self) -> tuple[str, str, str]:
        return (self.type.value, self.first, self.second)


@dataclass(frozen=True)
class Topic:
    """A named subject (anchor) grouping slides.

    display_names are the raw labels as written in decks or notes; each of
    them normalizes to ``id``.
    """

    id: str
    display_names: tuple[str, ...]
    occurrence_refs: tuple[SlideRef, ...]


@dataclass(frozen=True)
class Occurrence:
    """One slide or supplementary passage attached to at least one topic.

    ``ordinal`` is the 1-based corridor position; None marks supplementary
    material that never enters the corridor. ``checkpoint`` is an optional
    lecturer-declared bookmark label for the slide.
    """

    slide_ref: SlideRef
    ordinal: int | None
    cls: OccurrenceClass
    title: str
    body: str
    topic_refs: tuple[str, ...]  # anchor ids, deck order, no duplicates
    direct_refs: tuple[SlideRef, ...]
    checkpoint: str | None = None

    @property
    def supplementary(self) -> bool:
        return self.ordinal is None


@dataclass(frozen=True)
class Scope:
    """Context shared by topics that appear together on the same slides."""

    topic_set: tuple[str, ...]  # sorted, at least two ids
    shared_slides: tuple[SlideRef, ...]  # sorted, non-empty

    def sort_key(self) -> tuple[tuple[str, ...], tuple[SlideRef, ...]]:
        return (self.topic_set, self.shared_slides)


@dataclass(frozen=True)
class TopicMap:
    """The semantic network over one or more slide decks.

    ``scopes`` is a cache of graph.infer_scopes over (topics, occurrences);
    validate() rejects maps where the cache has drifted. ``corridors`` keeps
    the preserved linear slide order per deck.
    """

    map_id: str
    topics: dict[str, Topic]
    occurrences: dict[SlideRef, Occurrence]
    associations: tuple[Association, ...]
    scopes: tuple[Scope, ...]
    corridors: dict[str, tuple[SlideRef, ...]]

    def deck_ids(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.corridors) | {ref.deck_id for ref in self.occurrences}))


def empty_map(map_id: str = "") -> TopicMap:
    return TopicMap(map_id, {}, {}, (), (), {})


def sorted_associations(assocs: Iterable[Association]) -> tuple[Association, ...]:
    return tuple(sorted(assocs, key=Association.sort_key))


def sorted_scopes(scopes: Iterable[Scope]) -> tuple[Scope, ...]:
    return tuple(sorted(scopes, key=Scope.sort_key))


def validate(topic_map: TopicMap) -> list[str]:
    """Check every model invariant; return one description per violation.

    Violations are data, not failures: an empty list means the map is
    well-formed. Each entry names the offending element and the rule it
    breaks.
    """
    from .graph import infer_scopes  # local import, graph builds on this module

    out: list[str] = []
    topics = topic_map.topics
    occurrences = topic_map.occurrences

    for tid, topic in topics.items():
        if tid != topic.id:
            out.append(f"topic {tid!r}: stored under key {tid!r} but has id {topic.id!r}")
        try:
            if normalize_label(topic.id) != topic.id:
                out.append(f"topic {topic.id!r}: id is not in normalized form")
        except EmptyLabel:
            out.append(f"topic {topic.id!r}: id normalizes to the empty string")
        for name in topic.display_names:
            try:
                if normalize_label(name) != topic.id:
                    out.append(
                        f"topic {topic.id!r}: display name {name!r} does not normalize to the id"
                    )
            except EmptyLabel:
                out.append(f"topic {topic.id!r}: display name {name!r} is empty after normalization")
        if len(set(topic.occurrence_refs)) != len(topic.occurrence_refs):
            out.append(f"topic {topic.id!r}: duplicate occurrence refs")
        for ref in topic.occurrence_refs:
            if ref not in occurrences:
                out.append(f"topic {topic.id!r}: dangling occurrence ref {ref.key!r}")

    ordinals: dict[str, list[int]] = {}
    for ref, occ in occurrences.items():
        if ref != occ.slide_ref:
            out.append(f"occurrence {ref.key!r}: stored under a different key than its slide_ref")
        if not occ.topic_refs:
            out.append(f"occurrence {ref.key!r}: not anchored to any topic")
        if len(set(occ.topic_refs)) != len(occ.topic_refs):
            out.append(f"occurrence {ref.key!r}: duplicate topic refs")
        for tid in occ.topic_refs:
            topic = topics.get(tid)
            if topic is None:
                out.append(f"occurrence {ref.key!r}: dangling topic ref {tid!r}")
            elif ref not in topic.occurrence_refs:
                out.append(
                    f"occurrence {ref.key!r}: anchored to {tid!r} but missing from its occurrence refs"
                )
        for target in occ.direct_refs:
            if target not in occurrences:
                out.append(f"occurrence {ref.key!r}: dangling direct ref {target.key!r}")
        if occ.ordinal is not None:
            if occ.ordinal < 1:
                out.append(f"occurrence {ref.key!r}: ordinal {occ.ordinal} below 1")
            ordinals.setdefault(ref.deck_id, []).append(occ.ordinal)

    for deck_id, deck_ordinals in ordinals.items():
        expected = list(range(1, len(deck_ordinals) + 1))
        if sorted(deck_ordinals) != expected:
            out.append(f"deck {deck_id!r}: corridor ordinals are not unique and contiguous from 1")

    deck_ids = {ref.deck_id for ref in occurrences}
    for deck_id in sorted(deck_ids | set(topic_map.corridors)):
        corridor = topic_map.corridors.get(deck_id)
        if corridor is None:
            out.append(f"deck {deck_id!r}: no corridor entry")
            continue
        in_corridor = [
            occurrences[ref]
            for ref in sorted(
                (r for r in occurrences if r.deck_id == deck_id),
                key=lambda r: r.slide_id,
            )
            if occurrences[ref].ordinal is not None
        ]
        expected_corridor = tuple(
            occ.slide_ref for occ in sorted(in_corridor, key=lambda o: o.ordinal or 0)
        )
        for ref in corridor:
            occ = occurrences.get(ref)
            if occ is None:
                out.append(f"deck {deck_id!r}: corridor lists unknown slide {ref.key!r}")
            elif occ.supplementary:
                out.append(f"deck {deck_id!r}: supplementary slide {ref.key!r} appears in the corridor")
        if tuple(corridor) != expected_corridor:
            out.append(
                f"deck {deck_id!r}: corridor is not the ordinal-ordered list of its non-supplementary slides"
            )

    seen_assocs: set[tuple[str, str, str]] = set()
    for assoc in topic_map.associations:
        name = f"{assoc.type.value}({assoc.first!r}, {assoc.second!r})"
        if assoc.first == assoc.second:
            out.append(f"association {name}: members must differ (self-loop)")
        for member in (assoc.first, assoc.second):
            if member not in topics:
                out.append(f"association {name}: dangling member {member!r}")
        key = (assoc.type.value, assoc.first, assoc.second)
        if key in seen_assocs:
            out.append(f"association {name}: duplicate (type, members) triple")
        seen_assocs.add(key)

    seen_scope_sets: set[tuple[str, ...]] = set()
    for scope in topic_map.scopes:
        name = f"scope {{{', '.join(scope.topic_set)}}}"
        if len(scope.topic_set) < 2:
            out.append(f"{name}: needs at least two topics")
        if not scope.shared_slides:
            out.append(f"{name}: has no shared slides")
        for tid in scope.topic_set:
            if tid not in topics:
                out.append(f"{name}: dangling topic {tid!r}")
        for ref in scope.shared_slides:
            if ref not in occurrences:
                out.append(f"{name}: dangling slide {ref.key!r}")
                continue
            for tid in scope.topic_set:
                topic = topics.get(tid)
                if topic is not None and ref not in topic.occurrence_refs:
                    out.append(f"{name}: slide {ref.key!r} is not an occurrence of {tid!r}")
        if scope.topic_set in seen_scope_sets:
            out.append(f"{name}: duplicate topic set")
        seen_scope_sets.add(scope.topic_set)

    expected_scopes = set(infer_scopes(topics, occurrences))
    stored_scopes = set(topic_map.scopes)
    for scope in sorted(stored_scopes - expected_scopes, key=Scope.sort_key):
        out.append(f"scope {{{', '.join(scope.topic_set)}}}: not derivable from occurrences (stale cache)")
    for scope in sorted(expected_scopes - stored_scopes, key=Scope.sort_key):
        out.append(f"scope {{{', '.join(scope.topic_set)}}}: missing from the stored scope cache")

    return out
