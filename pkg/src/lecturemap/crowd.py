"""Audience annotation intake and aggregation.

The annotation log is an append-only sequence; one line-delimited JSON file
per session persists it, one annotation per line. Aggregations only ever
read an immutable snapshot of the log, and replaying a persisted log file
reproduces every aggregate exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

from .errors import InvalidConfig, MalformedDocument, UnknownClass, UnknownSlide
from .graph import infer_scopes
from .model import (
    Association,
    AssociationType,
    SlideRef,
    Topic,
    TopicMap,
    dedup_ordered,
    normalize_label,
    sorted_associations,
)

RATING = "rating"
NOTE = "note"
BOOKMARK = "bookmark"

LECTURER = "lecturer"

DEFAULT_CLASSES = ("clear", "unclear", "lost")
DEFAULT_POSITIVE = "clear"
DEFAULT_QUORUM = 3
DEFAULT_THRESHOLD = 0.5
DEFAULT_MIN_SUPPORT = 2


@dataclass(frozen=True)
class ClassConfig:
    """The session's comprehension rating scale: a fixed label set with
    exactly one label designated positive."""

    labels: tuple[str, ...] = DEFAULT_CLASSES
    positive: str = DEFAULT_POSITIVE

    def check(self) -> "ClassConfig":
        if not self.labels:
            raise InvalidConfig("class list must not be empty")
        if len(set(self.labels)) != len(self.labels):
            raise InvalidConfig("class list has duplicate labels")
        if self.positive not in self.labels:
            raise InvalidConfig(f"positive class {self.positive!r} is not in the class list")
        return self

    @property
    def negatives(self) -> tuple[str, ...]:
        return tuple(label for label in self.labels if label != self.positive)


@dataclass(frozen=True)
class Annotation:
    """One participant action: a rating, a note, or a bookmark.

    Note tags are stored normalized. ``at`` is a millisecond timestamp and is
    informational; aggregation order is the log order.
    """

    participant: str
    slide: SlideRef
    kind: str  # RATING | NOTE | BOOKMARK
    at: int
    seq: int | None = None
    rating: str | None = None
    text: str | None = None
    tags: tuple[str, ...] = ()
    refs: tuple[SlideRef, ...] = ()
    label: str | None = None


def make_rating(participant: str, slide: SlideRef, rating: str, at: int) -> Annotation:
    return Annotation(participant, slide, RATING, at, rating=rating)


def make_note(
    participant: str,
    slide: SlideRef,
    text: str,
    tags: Iterable[str] = (),
    refs: Iterable[SlideRef] = (),
    at: int = 0,
) -> Annotation:
    normalized = tuple(dedup_ordered(normalize_label(t) for t in tags))
    return Annotation(
        participant, slide, NOTE, at, text=text, tags=normalized, refs=tuple(refs)
    )


def make_bookmark(participant: str, slide: SlideRef, label: str, at: int) -> Annotation:
    return Annotation(participant, slide, BOOKMARK, at, label=label)


def validate_annotation(
    annotation: Annotation, topic_map: TopicMap, classes: ClassConfig
) -> None:
    """Check an annotation against a map and class list before it enters a log."""
    if annotation.slide not in topic_map.occurrences:
        raise UnknownSlide(f"annotation targets unknown slide {annotation.slide.key!r}")
    if annotation.kind == RATING:
        if annotation.rating not in classes.labels:
            raise UnknownClass(
                f"rating class {annotation.rating!r} is not one of {list(classes.labels)}"
            )
    elif annotation.kind == NOTE:
        for ref in annotation.refs:
            if ref not in topic_map.occurrences:
                raise UnknownSlide(f"note references unknown slide {ref.key!r}")
    elif annotation.kind != BOOKMARK:
        raise MalformedDocument(f"unknown annotation kind {annotation.kind!r}")


def apply_annotation(
    log: list[Annotation],
    annotation: Annotation,
    topic_map: TopicMap,
    classes: ClassConfig = ClassConfig(),
) -> list[Annotation]:
    """Validate and append; returns the extended log, the input is untouched.

    The log keeps every entry. A re-rating supersedes the participant's
    earlier rating of the same slide only at aggregation time.
    """
    validate_annotation(annotation, topic_map, classes)
    return [*log, annotation]


# ---------------------------------------------------------------------------
# log persistence

def annotation_to_doc(annotation: Annotation) -> dict:
    doc: dict = {
        "participant": annotation.participant,
        "deck": annotation.slide.deck_id,
        "slide": annotation.slide.slide_id,
        "kind": annotation.kind,
        "at": annotation.at,
    }
    if annotation.seq is not None:
        doc["seq"] = annotation.seq
    if annotation.kind == RATING:
        doc["class"] = annotation.rating
    elif annotation.kind == NOTE:
        doc["text"] = annotation.text or ""
        doc["tags"] = list(annotation.tags)
        doc["refs"] = [{"deck": r.deck_id, "slide": r.slide_id} for r in annotation.refs]
    elif annotation.kind == BOOKMARK:
        doc["label"] = annotation.label or ""
    return doc


def annotation_from_doc(doc) -> Annotation:
    if not isinstance(doc, dict):
        raise MalformedDocument("annotation must be a JSON object")

    def need(key: str, kind: type):
        if key not in doc or not isinstance(doc[key], kind):
            raise MalformedDocument(f"annotation needs {key!r} ({kind.__name__})")
        return doc[key]

    participant = need("participant", str)
    slide = SlideRef(need("deck", str), need("slide", str))
    kind = need("kind", str)
    at = doc.get("at", 0)
    if not isinstance(at, int):
        raise MalformedDocument("annotation 'at' must be an integer millisecond timestamp")
    seq = doc.get("seq")
    if seq is not None and not isinstance(seq, int):
        raise MalformedDocument("annotation 'seq' must be an integer")

    if kind == RATING:
        ann = make_rating(participant, slide, need("class", str), at)
    elif kind == NOTE:
        refs = []
        for entry in doc.get("refs", []):
            if not isinstance(entry, dict) or "deck" not in entry or "slide" not in entry:
                raise MalformedDocument("note refs must be {deck, slide} objects")
            refs.append(SlideRef(entry["deck"], entry["slide"]))
        tags = doc.get("tags", [])
        if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
            raise MalformedDocument("note tags must be a list of strings")
        ann = make_note(participant, slide, doc.get("text", ""), tags, refs, at)
    elif kind == BOOKMARK:
        ann = make_bookmark(participant, slide, need("label", str), at)
    else:
        raise MalformedDocument(f"unknown annotation kind {kind!r}")
    return replace(ann, seq=seq)


def annotation_to_line(annotation: Annotation) -> str:
    return json.dumps(annotation_to_doc(annotation), ensure_ascii=False, sort_keys=True)


def read_log(path: str | Path) -> list[Annotation]:
    """Load a line-delimited annotation log file."""
    log = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"log line {lineno}: {exc.msg}") from None
        log.append(annotation_from_doc(doc))
    return log


def write_log(log: Iterable[Annotation], path: str | Path) -> None:
    """Write an annotation log as one JSON document per line."""
    with open(path, "w", encoding="utf-8") as handle:
        for annotation in log:
            handle.write(annotation_to_line(annotation) + "\n")


# ---------------------------------------------------------------------------
# aggregation

def effective_ratings(log: Iterable[Annotation]) -> dict[tuple[str, SlideRef], str]:
    """Per (participant, slide), the rating that counts: the latest in log order."""
    effective: dict[tuple[str, SlideRef], str] = {}
    for annotation in log:
        if annotation.kind == RATING and annotation.rating is not None:
            effective[(annotation.participant, annotation.slide)] = annotation.rating
    return effective


@dataclass(frozen=True)
class SlideReport:
    counts: dict[str, int]
    total: int
    flagged: bool


@dataclass(frozen=True)
class ComprehensionReport:
    slides: dict[SlideRef, SlideReport]
    totals: dict[str, int]
    total: int
    flagged: tuple[SlideRef, ...]
    classes: ClassConfig
    quorum: int
    threshold: float

    def to_doc(self) -> dict:
        return {
            "slides": {
                ref.key: {
                    "counts": dict(report.counts),
                    "total": report.total,
                    "flagged": report.flagged,
                }
                for ref, report in self.slides.items()
            },
            "totals": {"counts": dict(self.totals), "total": self.total},
            "flagged": [ref.key for ref in self.flagged],
            "classes": list(self.classes.labels),
            "positive": self.classes.positive,
            "quorum": self.quorum,
            "threshold": self.threshold,
        }


def comprehension_report(
    log: Iterable[Annotation],
    topic_map: TopicMap,
    classes: ClassConfig = ClassConfig(),
    quorum: int = DEFAULT_QUORUM,
    threshold: float = DEFAULT_THRESHOLD,
) -> ComprehensionReport:
    """Consensus view over effective ratings, one row per slide of the map.

    A slide is flagged when at least ``quorum`` participants rated it and the
    share of negative-class ratings reaches ``threshold``.
    """
    classes.check()
    if quorum < 1:
        raise InvalidConfig("quorum must be at least 1")
    if not 0 < threshold <= 1:
        raise InvalidConfig("threshold must be in (0, 1]")

    counts: dict[SlideRef, dict[str, int]] = {
        ref: {label: 0 for label in classes.labels} for ref in topic_map.occurrences
    }
    for (participant, slide), rating in effective_ratings(log).items():
        counts[slide][rating] += 1

    slides: dict[SlideRef, SlideReport] = {}
    flagged = []
    for ref in sorted(counts, key=lambda r: (r.deck_id, _ordinal_rank(topic_map, r), r.slide_id)):
        per_class = counts[ref]
        total = sum(per_class.values())
        negative = sum(per_class[label] for label in classes.negatives)
        is_flagged = total >= quorum and negative / total >= threshold
        slides[ref] = SlideReport(per_class, total, is_flagged)
        if is_flagged:
            flagged.append(ref)

    totals = {label: sum(report.counts[label] for report in slides.values()) for label in classes.labels}
    return ComprehensionReport(
        slides=slides,
        totals=totals,
        total=sum(totals.values()),
        flagged=tuple(flagged),
        classes=classes,
        quorum=quorum,
        threshold=threshold,
    )


def _ordinal_rank(topic_map: TopicMap, ref: SlideRef) -> float:
    ordinal = topic_map.occurrences[ref].ordinal
    return float(ordinal) if ordinal is not None else math.inf


# ---------------------------------------------------------------------------
# discussion topics

@dataclass(frozen=True)
class TagEntry:
    """One crowd tag that cleared the support bar, as a map delta."""

    topic_id: str
    new: bool
    slides: tuple[SlideRef, ...]
    associations: tuple[Association, ...]

    def to_doc(self) -> dict:
        return {
            "topic": self.topic_id,
            "new": self.new,
            "slides": [ref.key for ref in self.slides],
            "associations": [
                {"type": a.type.value, "roles": a.roles} for a in self.associations
            ],
        }


@dataclass(frozen=True)
class DiscussionDelta:
    min_support: int
    entries: tuple[TagEntry, ...]

    def to_doc(self) -> dict:
        return {
            "min_support": self.min_support,
            "topics": [entry.to_doc() for entry in self.entries],
        }


def discussion_topics(
    log: Iterable[Annotation],
    topic_map: TopicMap,
    min_support: int = DEFAULT_MIN_SUPPORT,
) -> DiscussionDelta:
    """Crowd-sourced discussion topics from note tags.

    Every normalized tag used by at least ``min_support`` distinct
    participants becomes a topic (or attaches to the existing topic with
    that identifier), anchored to all tagged slides and related to each
    slide's lecturer topics by a DISCUSSION association.
    """
    if min_support < 1:
        raise InvalidConfig("min_support must be at least 1")
    users: dict[str, set[str]] = {}
    slides: dict[str, set[SlideRef]] = {}
    for annotation in log:
        if annotation.kind != NOTE:
            continue
        for tag in annotation.tags:
            users.setdefault(tag, set()).add(annotation.participant)
            slides.setdefault(tag, set()).add(annotation.slide)

    entries = []
    for tag in sorted(users):
        if len(users[tag]) < min_support:
            continue
        tagged = tuple(sorted(slides[tag]))
        edges = {
            Association(AssociationType.DISCUSSION, tag, anchor)
            for ref in tagged
            for anchor in topic_map.occurrences[ref].topic_refs
            if anchor != tag
        }
        entries.append(
            TagEntry(
                topic_id=tag,
                new=tag not in topic_map.topics,
                slides=tagged,
                associations=sorted_associations(edges),
            )
        )
    return DiscussionDelta(min_support, tuple(entries))


def apply_discussion(topic_map: TopicMap, delta: DiscussionDelta) -> TopicMap:
    """Apply a discussion delta; growth is monotone, nothing is removed."""
    topics = dict(topic_map.topics)
    for entry in delta.entries:
        existing = topics.get(entry.topic_id)
        if existing is None:
            topics[entry.topic_id] = Topic(
                entry.topic_id, (entry.topic_id,), tuple(sorted(entry.slides))
            )
        else:
            topics[entry.topic_id] = Topic(
                existing.id,
                existing.display_names,
                tuple(sorted(set(existing.occurrence_refs) | set(entry.slides))),
            )
    associations = sorted_associations(
        set(topic_map.associations)
        | {assoc for entry in delta.entries for assoc in entry.associations}
    )
    return TopicMap(
        map_id=topic_map.map_id,
        topics=topics,
        occurrences=topic_map.occurrences,
        associations=associations,
        scopes=infer_scopes(topics, topic_map.occurrences),
        corridors=topic_map.corridors,
    )


# ---------------------------------------------------------------------------
# mindset correlation and bookmarks

def mindset_correlation(
    log: Iterable[Annotation], topic_map: TopicMap, slide: SlideRef | None = None
) -> float | None:
    """Jaccard similarity between lecturer topics and audience tags.

    Whole-session scope compares all map topics against all note tags;
    slide scope compares the slide's anchors against the tags on that slide.
    Returns None (no data) when both sides are empty.
    """
    if slide is None:
        lecturer = set(topic_map.topics)
        audience = {tag for ann in log if ann.kind == NOTE for tag in ann.tags}
    else:
        occ = topic_map.occurrences.get(slide)
        if occ is None:
            raise UnknownSlide(f"no slide {slide.key!r} in the map")
        lecturer = set(occ.topic_refs)
        audience = {
            tag
            for ann in log
            if ann.kind == NOTE and ann.slide == slide
            for tag in ann.tags
        }
    union = lecturer | audience
    if not union:
        return None
    return len(lecturer & audience) / len(union)


@dataclass(frozen=True)
class BookmarkEntry:
    label: str
    ref: SlideRef
    ordinal: int | None
    owner: str  # LECTURER or a participant token

    def to_doc(self) -> dict:
        return {
            "label": self.label,
            "deck": self.ref.deck_id,
            "slide": self.ref.slide_id,
            "ordinal": self.ordinal,
            "owner": self.owner,
        }


def bookmarks(log: Iterable[Annotation], topic_map: TopicMap) -> list[BookmarkEntry]:
    """Audience bookmarks plus lecturer checkpoints, in corridor order."""
    entries = []
    for ref, occ in topic_map.occurrences.items():
        if occ.checkpoint:
            entries.append(BookmarkEntry(occ.checkpoint, ref, occ.ordinal, LECTURER))
    for annotation in log:
        if annotation.kind != BOOKMARK:
            continue
        occ = topic_map.occurrences.get(annotation.slide)
        if occ is None:
            raise UnknownSlide(f"bookmark targets unknown slide {annotation.slide.key!r}")
        entries.append(
            BookmarkEntry(annotation.label or "", annotation.slide, occ.ordinal, annotation.participant)
        )
    entries.sort(
        key=lambda e: (
            float(e.ordinal) if e.ordinal is not None else math.inf,
            e.ref.deck_id,
            e.ref.slide_id,
            e.owner != LECTURER,  # lecturer checkpoints first on the same slide
            e.owner,
            e.label,
        )
    )
    return entries
