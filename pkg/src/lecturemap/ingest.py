"""Annotated-deck parsing and topic-map construction.

The deck format is a UTF-8 JSON document (schema in docs/deck.schema.json):
deck_id, title, slides[], prerequisites[], supplementary[]. Slides carry a
slide_id, title, body, class, topic labels, optional direct references to
other slides of the deck, and an optional lecturer checkpoint label.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import chain
from pathlib import Path

from .errors import (
    DanglingReference,
    DuplicateSlideId,
    MalformedDocument,
    UnknownClass,
)
from .graph import infer_scopes
from .model import (
    Association,
    AssociationType,
    Occurrence,
    OccurrenceClass,
    SlideRef,
    Topic,
    TopicMap,
    dedup_ordered,
    normalize_label,
    sorted_associations,
)

# deck and slide ids end up in file names and "deck/slide" keys
_ID_OK = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-")

_SLIDE_KEYS = {"slide_id", "title", "body", "class", "topics", "refs", "checkpoint"}
_DECK_KEYS = {"deck_id", "title", "slides", "prerequisites", "supplementary"}


@dataclass(frozen=True)
class SlideSpec:
    """One slide as written in the deck file, labels still raw."""

    slide_id: str
    title: str
    body: str
    cls: OccurrenceClass
    topics: tuple[str, ...]
    refs: tuple[str, ...]
    checkpoint: str | None = None


@dataclass(frozen=True)
class AnnotatedDeck:
    deck_id: str
    title: str
    slides: tuple[SlideSpec, ...]
    prerequisites: tuple[tuple[str, str], ...]  # (prerequisite label, dependent label)
    supplementary: tuple[SlideSpec, ...]

    def all_slides(self) -> tuple[SlideSpec, ...]:
        return self.slides + self.supplementary


def _check_id(value, what: str) -> str:
    if not isinstance(value, str) or not value:
        raise MalformedDocument(f"{what} must be a non-empty string")
    if not set(value) <= _ID_OK:
        raise MalformedDocument(
            f"{what} {value!r} may only contain letters, digits, '_', '.', '-'"
        )
    return value


def _parse_slide(body, where: str) -> SlideSpec:
    if not isinstance(body, dict):
        raise MalformedDocument(f"{where}: slide entries must be objects")
    unknown = set(body) - _SLIDE_KEYS
    if unknown:
        raise MalformedDocument(f"{where}: unknown keys {sorted(unknown)}")
    slide_id = _check_id(body.get("slide_id"), f"{where}: slide_id")
    cls_value = body.get("class", "fact")
    try:
        cls = OccurrenceClass(cls_value)
    except ValueError:
        known = ", ".join(c.value for c in OccurrenceClass)
        raise UnknownClass(f"{where}: class {cls_value!r} is not one of {known}") from None
    topics = body.get("topics")
    if not isinstance(topics, list) or not topics or not all(isinstance(t, str) for t in topics):
        raise MalformedDocument(f"{where}: topics must be a non-empty list of labels")
    refs = body.get("refs", [])
    if not isinstance(refs, list) or not all(isinstance(r, str) for r in refs):
        raise MalformedDocument(f"{where}: refs must be a list of slide ids")
    title = body.get("title", "")
    text = body.get("body", "")
    if not isinstance(title, str) or not isinstance(text, str):
        raise MalformedDocument(f"{where}: title and body must be strings")
    checkpoint = body.get("checkpoint")
    if checkpoint is not None and (not isinstance(checkpoint, str) or not checkpoint):
        raise MalformedDocument(f"{where}: checkpoint must be a non-empty string or absent")
    return SlideSpec(
        slide_id=slide_id,
        title=title,
        body=text,
        cls=cls,
        topics=tuple(topics),
        refs=tuple(dedup_ordered(refs)),
        checkpoint=checkpoint,
    )


def parse_deck(document: bytes | str) -> AnnotatedDeck:
    """Parse and cross-check a deck document.

    Raises MalformedDocument (with line/column context for syntax errors),
    UnknownClass, DuplicateSlideId, or DanglingReference.
    """
    if isinstance(document, bytes):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocument(f"deck document is not UTF-8: {exc}") from None
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(
            f"deck document is not valid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})"
        ) from None
    if not isinstance(doc, dict):
        raise MalformedDocument("deck document must be a JSON object")
    unknown = set(doc) - _DECK_KEYS
    if unknown:
        raise MalformedDocument(f"deck: unknown keys {sorted(unknown)}")

    deck_id = _check_id(doc.get("deck_id"), "deck_id")
    title = doc.get("title", "")
    if not isinstance(title, str):
        raise MalformedDocument("deck title must be a string")

    raw_slides = doc.get("slides", [])
    raw_supplementary = doc.get("supplementary", [])
    for field, value in (("slides", raw_slides), ("supplementary", raw_supplementary)):
        if not isinstance(value, list):
            raise MalformedDocument(f"deck {field} must be a list")

    slides = tuple(
        _parse_slide(body, f"slides[{i}]") for i, body in enumerate(raw_slides)
    )
    supplementary = tuple(
        _parse_slide(body, f"supplementary[{i}]") for i, body in enumerate(raw_supplementary)
    )

    seen_ids: set[str] = set()
    for spec in chain(slides, supplementary):
        if spec.slide_id in seen_ids:
            raise DuplicateSlideId(f"slide id {spec.slide_id!r} appears more than once")
        seen_ids.add(spec.slide_id)

    for spec in chain(slides, supplementary):
        for ref in spec.refs:
            if ref not in seen_ids:
                raise DanglingReference(
                    f"slide {spec.slide_id!r} references unknown slide {ref!r}"
                )

    # labels that do not normalize cleanly surface later, from build_map
    known_topics: set[str] = set()
    for spec in chain(slides, supplementary):
        for label in spec.topics:
            try:
                known_topics.add(normalize_label(label))
            except Exception:
                pass

    prerequisites = []
    raw_prereqs = doc.get("prerequisites", [])
    if not isinstance(raw_prereqs, list):
        raise MalformedDocument("deck prerequisites must be a list")
    for i, pair in enumerate(raw_prereqs):
        where = f"prerequisites[{i}]"
        if not isinstance(pair, dict) or set(pair) != {"prerequisite", "dependent"}:
            raise MalformedDocument(f"{where}: must be an object with prerequisite and dependent")
        prereq, dependent = pair["prerequisite"], pair["dependent"]
        if not isinstance(prereq, str) or not isinstance(dependent, str):
            raise MalformedDocument(f"{where}: labels must be strings")
        try:
            prereq_id = normalize_label(prereq)
            dependent_id = normalize_label(dependent)
        except Exception:
            raise MalformedDocument(f"{where}: empty label") from None
        if prereq_id == dependent_id:
            raise MalformedDocument(f"{where}: a topic cannot be its own prerequisite")
        for label, norm in ((prereq, prereq_id), (dependent, dependent_id)):
            if norm not in known_topics:
                raise DanglingReference(
                    f"{where}: label {label!r} does not match any topic in the deck"
                )
        prerequisites.append((prereq, dependent))

    return AnnotatedDeck(
        deck_id=deck_id,
        title=title,
        slides=slides,
        prerequisites=tuple(prerequisites),
        supplementary=supplementary,
    )


def parse_deck_file(path: str | Path) -> AnnotatedDeck:
    return parse_deck(Path(path).read_bytes())


def derive_temporal(deck: AnnotatedDeck) -> set[Association]:
    """Temporal continuity edges from the corridor order.

    For each consecutive slide pair, every topic of the earlier slide is a
    predecessor of every different topic of the later one. Supplementary
    slides contribute nothing and same-topic continuity yields no edge.
    """
    edges: set[Association] = set()
    for earlier, later in zip(deck.slides, deck.slides[1:]):
        before = [normalize_label(t) for t in earlier.topics]
        after = [normalize_label(t) for t in later.topics]
        for t in before:
            for u in after:
                if t != u:
                    edges.add(Association(AssociationType.TEMPORAL_CONTINUITY, t, u))
    return edges


def build_map(deck: AnnotatedDeck) -> TopicMap:
    """Build the topic map of a deck: one topic per distinct normalized label,
    one occurrence per slide, associations from order, prerequisites, and
    direct references, scopes inferred."""
    occurrences: dict[SlideRef, Occurrence] = {}
    corridor: list[SlideRef] = []

    def add_occurrence(spec: SlideSpec, ordinal: int | None) -> None:
        ref = SlideRef(deck.deck_id, spec.slide_id)
        occurrences[ref] = Occurrence(
            slide_ref=ref,
            ordinal=ordinal,
            cls=spec.cls,
            title=spec.title,
            body=spec.body,
            topic_refs=tuple(dedup_ordered(normalize_label(t) for t in spec.topics)),
            direct_refs=tuple(sorted(SlideRef(deck.deck_id, r) for r in spec.refs)),
            checkpoint=spec.checkpoint,
        )

    for i, spec in enumerate(deck.slides, start=1):
        add_occurrence(spec, i)
        corridor.append(SlideRef(deck.deck_id, spec.slide_id))
    for spec in deck.supplementary:
        add_occurrence(spec, None)

    names: dict[str, set[str]] = {}
    slides_of: dict[str, set[SlideRef]] = {}
    for spec in deck.all_slides():
        ref = SlideRef(deck.deck_id, spec.slide_id)
        for label in spec.topics:
            tid = normalize_label(label)
            names.setdefault(tid, set()).add(label)
            slides_of.setdefault(tid, set()).add(ref)
    topics = {
        tid: Topic(tid, tuple(sorted(names[tid])), tuple(sorted(slides_of[tid])))
        for tid in names
    }

    associations = set(derive_temporal(deck))
    for prereq_label, dependent_label in deck.prerequisites:
        associations.add(
            Association(
                AssociationType.PRELIMINARY_KNOWLEDGE,
                normalize_label(prereq_label),
                normalize_label(dependent_label),
            )
        )
    # direct slide references lift to topic-level edges; slide-level links
    # stay on the occurrence
    for ref, occ in occurrences.items():
        for target in occ.direct_refs:
            for t in occ.topic_refs:
                for u in occurrences[target].topic_refs:
                    if t != u:
                        associations.add(Association(AssociationType.DIRECT_REFERENCE, t, u))

    return TopicMap(
        map_id=deck.deck_id,
        topics=topics,
        occurrences=occurrences,
        associations=sorted_associations(associations),
        scopes=infer_scopes(topics, occurrences),
        corridors={deck.deck_id: tuple(corridor)},
    )
