"""Assistance and navigation queries over a topic map.

All queries are pure reads with deterministic, totally ordered output, so
repeated calls against the same map snapshot return identical lists.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple

from .errors import AmbiguousSlide, CycleDetected, UnknownDeck, UnknownSlide, UnknownTopic
from .model import AssociationType, Occurrence, OccurrenceClass, SlideRef, TopicMap

SAME_SUBJECT = "same_subject"
PRELIMINARY = "preliminary"

_SAME_SUBJECT_CLASSES = {OccurrenceClass.DEFINITION, OccurrenceClass.EXAMPLE}
_PRELIMINARY_CLASSES = {
    OccurrenceClass.DEFINITION,
    OccurrenceClass.EXAMPLE,
    OccurrenceClass.SUMMARY,
}


class AssistanceEntry(NamedTuple):
    ref: SlideRef
    reason: str  # SAME_SUBJECT or PRELIMINARY
    depth: int | None  # prerequisite closure depth, None for same-subject hits


class ApproachPath(NamedTuple):
    topics: tuple[str, ...]
    edge_types: tuple[str, ...]


class CorridorEntry(NamedTuple):
    ref: SlideRef
    ordinal: int
    anchors: tuple[str, ...]
    cls: OccurrenceClass
    title: str


def _ordinal_key(occ: Occurrence) -> float:
    # supplementary slides sort after corridor slides of equal rank
    return float(occ.ordinal) if occ.ordinal is not None else math.inf


def _prereq_edges(topic_map: TopicMap) -> dict[str, set[str]]:
    """dependent id -> its direct prerequisite ids."""
    edges: dict[str, set[str]] = {}
    for assoc in topic_map.associations:
        if assoc.type is AssociationType.PRELIMINARY_KNOWLEDGE:
            edges.setdefault(assoc.second, set()).add(assoc.first)
    return edges


def _closure_from(topic_map: TopicMap, seeds: Iterable[str]) -> dict[str, int]:
    """Breadth-first prerequisite closure from a seed topic set.

    Returns prerequisite id -> minimal depth (seeds are depth 0, excluded).
    Raises CycleDetected when the reachable prerequisite subgraph contains a
    cycle; a cyclic prerequisite annotation is a deck bug worth surfacing.
    """
    edges = _prereq_edges(topic_map)
    depth: dict[str, int] = {}
    visited = set(seeds)
    frontier = sorted(visited)
    level = 0
    while frontier:
        level += 1
        nxt: set[str] = set()
        for tid in frontier:
            for prereq in edges.get(tid, ()):
                if prereq not in visited:
                    nxt.add(prereq)
        for tid in nxt:
            visited.add(tid)
            depth[tid] = level
        frontier = sorted(nxt)

    # cycle check over the reachable subgraph (white/grey/black DFS)
    color: dict[str, int] = {}
    for start in sorted(visited):
        if color.get(start):
            continue
        stack: list[tuple[str, Iterable[str]]] = [(start, iter(sorted(edges.get(start, ()))))]
        color[start] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nbr in it:
                if nbr not in visited:
                    continue
                state = color.get(nbr, 0)
                if state == 1:
                    raise CycleDetected(
                        f"prerequisite cycle reachable through {nbr!r}"
                    )
                if state == 0:
                    color[nbr] = 1
                    stack.append((nbr, iter(sorted(edges.get(nbr, ())))))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()
    return depth


def preliminary_closure(topic_map: TopicMap, topic: str) -> list[tuple[str, int]]:
    """Transitive prerequisites of a topic, ordered by depth then identifier."""
    if topic not in topic_map.topics:
        raise UnknownTopic(f"no topic {topic!r} in the map")
    depth = _closure_from(topic_map, [topic])
    return sorted(depth.items(), key=lambda item: (item[1], item[0]))


def assistance(topic_map: TopicMap, slide: SlideRef) -> list[AssistanceEntry]:
    """Auxiliary material for a slide, most helpful first.

    Two ranked tiers: definitions and examples sharing a topic with the
    slide (by shared-topic count, then ordinal, then slide id), followed by
    definition/example/summary slides of transitive prerequisite topics (by
    closure depth, then ordinal, then slide id). The query slide itself never
    appears and duplicates keep their highest-ranked entry.
    """
    occ = topic_map.occurrences.get(slide)
    if occ is None:
        raise UnknownSlide(f"no slide {slide.key!r} in the map")
    mine = set(occ.topic_refs)

    ranked: list[tuple[tuple, AssistanceEntry]] = []
    for ref, cand in topic_map.occurrences.items():
        if ref == slide or cand.cls not in _SAME_SUBJECT_CLASSES:
            continue
        shared = len(mine & set(cand.topic_refs))
        if shared:
            key = (-shared, _ordinal_key(cand), ref.slide_id, ref.deck_id)
            ranked.append((key, AssistanceEntry(ref, SAME_SUBJECT, None)))
    ranked.sort(key=lambda item: item[0])
    out = [entry for _, entry in ranked]
    taken = {entry.ref for entry in out}

    depth = _closure_from(topic_map, mine)
    by_slide: dict[SlideRef, int] = {}
    for tid, d in depth.items():
        for ref in topic_map.topics[tid].occurrence_refs:
            cand = topic_map.occurrences[ref]
            if ref == slide or cand.cls not in _PRELIMINARY_CLASSES:
                continue
            by_slide[ref] = min(d, by_slide.get(ref, d))
    tier2 = sorted(
        by_slide.items(),
        key=lambda item: (
            item[1],
            _ordinal_key(topic_map.occurrences[item[0]]),
            item[0].slide_id,
            item[0].deck_id,
        ),
    )
    for ref, d in tier2:
        if ref not in taken:
            out.append(AssistanceEntry(ref, PRELIMINARY, d))
            taken.add(ref)
    return out


MAX_PATHS = 1000


def approaching_paths(
    topic_map: TopicMap, topic: str, max_len: int
) -> tuple[list[ApproachPath], bool]:
    """All simple paths of at most max_len edges that end at the topic.

    Walks the union of temporal-continuity and preliminary-knowledge edges,
    both oriented toward the successor/dependent. Parallel edges of different
    types produce distinct labeled paths. Paths are sorted lexicographically
    by (topics, edge types); the returned flag reports truncation to
    MAX_PATHS entries.
    """
    if topic not in topic_map.topics:
        raise UnknownTopic(f"no topic {topic!r} in the map")
    if max_len < 1:
        raise ValueError("max_len must be at least 1")

    incoming: dict[str, list[tuple[str, str]]] = {}
    for assoc in topic_map.associations:
        if assoc.type in (
            AssociationType.TEMPORAL_CONTINUITY,
            AssociationType.PRELIMINARY_KNOWLEDGE,
        ):
            incoming.setdefault(assoc.second, []).append((assoc.first, assoc.type.value))

    results: list[ApproachPath] = []

    def grow(nodes: tuple[str, ...], labels: tuple[str, ...]) -> None:
        if len(labels) >= max_len:
            return
        for source, label in incoming.get(nodes[0], ()):
            if source in nodes:  # simple paths only
                continue
            extended = ApproachPath((source,) + nodes, (label,) + labels)
            results.append(extended)
            grow(extended.topics, extended.edge_types)

    grow((topic,), ())
    results.sort()
    if len(results) > MAX_PATHS:
        return results[:MAX_PATHS], True
    return results, False


def resolve_slide(topic_map: TopicMap, raw: str) -> SlideRef:
    """Resolve 'deck/slide' exactly, or a bare slide id if it is unique."""
    if "/" in raw:
        ref = SlideRef.from_key(raw)
        if ref not in topic_map.occurrences:
            raise UnknownSlide(f"no slide {raw!r} in the map")
        return ref
    matches = sorted(ref for ref in topic_map.occurrences if ref.slide_id == raw)
    if not matches:
        raise UnknownSlide(f"no slide {raw!r} in the map")
    if len(matches) > 1:
        raise AmbiguousSlide(
            f"slide id {raw!r} matches {[m.key for m in matches]}; use deck/slide"
        )
    return matches[0]


def corridor(topic_map: TopicMap, deck_id: str) -> list[CorridorEntry]:
    """The preserved linear slide order of a deck with anchors and classes."""
    refs = topic_map.corridors.get(deck_id)
    if refs is None:
        raise UnknownDeck(f"no deck {deck_id!r} in the map")
    out = []
    for ref in refs:
        occ = topic_map.occurrences[ref]
        out.append(
            CorridorEntry(ref, occ.ordinal or 0, occ.topic_refs, occ.cls, occ.title)
        )
    return out
