"""Scope inference and identifier-based merging of topic maps."""

from __future__ import annotations

from .errors import DeckCollision
from .model import (
    Association,
    Occurrence,
    Scope,
    SlideRef,
    Topic,
    TopicMap,
    sorted_associations,
    sorted_scopes,
)


def infer_scopes(
    topics: dict[str, Topic], occurrences: dict[SlideRef, Occurrence]
) -> tuple[Scope, ...]:
    """Derive the scopes of a map from its slide anchors.

    Every slide anchored to two or more topics contributes its full topic set
    as a candidate scope; candidates with identical topic sets unify. The
    shared slides of a scope are all slides whose anchors include the whole
    topic set (so a slide with a superset of anchors is shared too).

    ``topics`` is part of the contract for symmetry with the map fields but
    the derivation only needs the occurrence anchors.
    """
    candidates: set[frozenset[str]] = set()
    for occ in occurrences.values():
        if len(occ.topic_refs) >= 2:
            candidates.add(frozenset(occ.topic_refs))

    scopes = []
    for topic_set in candidates:
        shared = [
            ref
            for ref, occ in occurrences.items()
            if topic_set.issubset(occ.topic_refs)
        ]
        scopes.append(Scope(tuple(sorted(topic_set)), tuple(sorted(shared))))
    return sorted_scopes(scopes)


def merged_map_id(*map_ids: str) -> str:
    # "+" joins the constituent ids; flattening and sorting the parts keeps
    # the id independent of merge order and makes the empty map an identity
    parts = {part for map_id in map_ids for part in map_id.split("+") if part}
    return "+".join(sorted(parts))


def merge(a: TopicMap, b: TopicMap, map_id: str | None = None) -> TopicMap:
    """Merge two maps by subject identifier.

    Topics with equal ids unify (display names and occurrence refs union);
    occurrences are never unified, they carry distinct slide refs because the
    merged maps must cover disjoint decks. Corridors survive verbatim and
    scopes are recomputed from scratch.
    """
    overlap = set(a.deck_ids()) & set(b.deck_ids())
    if overlap:
        raise DeckCollision(
            "decks present in both maps: " + ", ".join(sorted(overlap))
        )

    topics: dict[str, Topic] = {}
    for tid in set(a.topics) | set(b.topics):
        sides = [m.topics[tid] for m in (a, b) if tid in m.topics]
        topics[tid] = Topic(
            id=tid,
            display_names=tuple(sorted({n for t in sides for n in t.display_names})),
            occurrence_refs=tuple(sorted({r for t in sides for r in t.occurrence_refs})),
        )

    occurrences = {**a.occurrences, **b.occurrences}
    associations = sorted_associations(set(a.associations) | set(b.associations))
    corridors = {**a.corridors, **b.corridors}

    return TopicMap(
        map_id=map_id if map_id is not None else merged_map_id(a.map_id, b.map_id),
        topics=topics,
        occurrences=occurrences,
        associations=associations,
        scopes=infer_scopes(topics, occurrences),
        corridors=corridors,
    )
