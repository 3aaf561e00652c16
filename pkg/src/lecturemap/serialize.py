"""Canonical JSON serialization of topic maps.

One UTF-8 JSON document per map with top-level keys map_id, topics,
occurrences, associations, scopes, corridors. Keyed collections are emitted
in lexicographic key order and set-valued fields are sorted, so equal maps
produce byte-identical documents. Ordered fields (slide corridors, slide
anchor lists) keep their stored order, which is itself canonical.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import MalformedDocument
from .model import (
    ROLES,
    Association,
    AssociationType,
    Occurrence,
    OccurrenceClass,
    Scope,
    SlideRef,
    Topic,
    TopicMap,
)


def to_doc(topic_map: TopicMap) -> dict:
    """Plain-dict form of a map, ready for json.dumps."""
    return {
        "map_id": topic_map.map_id,
        "topics": {
            tid: {
                "names": sorted(topic.display_names),
                "slides": [ref.key for ref in sorted(topic.occurrence_refs)],
            }
            for tid, topic in topic_map.topics.items()
        },
        "occurrences": {
            ref.key: {
                "ordinal": occ.ordinal,
                "class": occ.cls.value,
                "title": occ.title,
                "body": occ.body,
                "topics": list(occ.topic_refs),
                "refs": [r.key for r in sorted(occ.direct_refs)],
                "checkpoint": occ.checkpoint,
            }
            for ref, occ in topic_map.occurrences.items()
        },
        "associations": [
            {"type": assoc.type.value, "roles": assoc.roles}
            for assoc in sorted(topic_map.associations, key=Association.sort_key)
        ],
        "scopes": [
            {
                "topics": list(scope.topic_set),
                "slides": [ref.key for ref in scope.shared_slides],
            }
            for scope in sorted(topic_map.scopes, key=Scope.sort_key)
        ],
        "corridors": {
            deck_id: [ref.slide_id for ref in refs]
            for deck_id, refs in topic_map.corridors.items()
        },
    }


def dumps(topic_map: TopicMap) -> str:
    return json.dumps(to_doc(topic_map), ensure_ascii=False, sort_keys=True, separators=(",", ":")) + "\n"


def save(topic_map: TopicMap, path: str | Path) -> None:
    Path(path).write_text(dumps(topic_map), encoding="utf-8")


def _require(doc: dict, key: str, kind: type, where: str):
    if key not in doc:
        raise MalformedDocument(f"{where}: missing key {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise MalformedDocument(f"{where}: key {key!r} must be {kind.__name__}")
    return value


def _slide_ref(key: str, where: str) -> SlideRef:
    try:
        return SlideRef.from_key(key)
    except ValueError:
        raise MalformedDocument(f"{where}: {key!r} is not a deck/slide key") from None


def from_doc(doc) -> TopicMap:
    """Rebuild a map from its document form.

    Shape errors raise MalformedDocument. Semantic problems (dangling refs,
    stale scopes) load fine and are left for validate() to report, so a
    damaged document can still be inspected.
    """
    if not isinstance(doc, dict):
        raise MalformedDocument("map document must be a JSON object")
    map_id = _require(doc, "map_id", str, "map")

    topics: dict[str, Topic] = {}
    for tid, body in _require(doc, "topics", dict, "map").items():
        where = f"topic {tid!r}"
        if not isinstance(body, dict):
            raise MalformedDocument(f"{where}: must be an object")
        names = _require(body, "names", list, where)
        slides = _require(body, "slides", list, where)
        if not all(isinstance(n, str) for n in names):
            raise MalformedDocument(f"{where}: names must be strings")
        topics[tid] = Topic(
            id=tid,
            display_names=tuple(names),
            occurrence_refs=tuple(_slide_ref(s, where) for s in slides),
        )

    occurrences: dict[SlideRef, Occurrence] = {}
    for key, body in _require(doc, "occurrences", dict, "map").items():
        where = f"occurrence {key!r}"
        ref = _slide_ref(key, where)
        if not isinstance(body, dict):
            raise MalformedDocument(f"{where}: must be an object")
        ordinal = body.get("ordinal")
        if ordinal is not None and not isinstance(ordinal, int):
            raise MalformedDocument(f"{where}: ordinal must be an integer or null")
        cls_value = _require(body, "class", str, where)
        try:
            cls = OccurrenceClass(cls_value)
        except ValueError:
            raise MalformedDocument(f"{where}: unknown class {cls_value!r}") from None
        topic_refs = _require(body, "topics", list, where)
        refs = body.get("refs", [])
        checkpoint = body.get("checkpoint")
        if checkpoint is not None and not isinstance(checkpoint, str):
            raise MalformedDocument(f"{where}: checkpoint must be a string or null")
        occurrences[ref] = Occurrence(
            slide_ref=ref,
            ordinal=ordinal,
            cls=cls,
            title=_require(body, "title", str, where),
            body=_require(body, "body", str, where),
            topic_refs=tuple(topic_refs),
            direct_refs=tuple(_slide_ref(r, where) for r in refs),
            checkpoint=checkpoint,
        )

    associations = []
    for i, body in enumerate(_require(doc, "associations", list, "map")):
        where = f"association #{i}"
        if not isinstance(body, dict):
            raise MalformedDocument(f"{where}: must be an object")
        type_value = _require(body, "type", str, where)
        try:
            assoc_type = AssociationType(type_value)
        except ValueError:
            raise MalformedDocument(f"{where}: unknown type {type_value!r}") from None
        roles = _require(body, "roles", dict, where)
        first_role, second_role = ROLES[assoc_type]
        if set(roles) != {first_role, second_role}:
            raise MalformedDocument(
                f"{where}: {type_value} needs exactly the roles {first_role!r} and {second_role!r}"
            )
        associations.append(Association(assoc_type, roles[first_role], roles[second_role]))

    scopes = []
    for i, body in enumerate(_require(doc, "scopes", list, "map")):
        where = f"scope #{i}"
        if not isinstance(body, dict):
            raise MalformedDocument(f"{where}: must be an object")
        scope_topics = _require(body, "topics", list, where)
        scope_slides = _require(body, "slides", list, where)
        scopes.append(
            Scope(
                tuple(scope_topics),
                tuple(_slide_ref(s, where) for s in scope_slides),
            )
        )

    corridors: dict[str, tuple[SlideRef, ...]] = {}
    for deck_id, slide_ids in _require(doc, "corridors", dict, "map").items():
        if not isinstance(slide_ids, list):
            raise MalformedDocument(f"corridor {deck_id!r}: must be a list of slide ids")
        corridors[deck_id] = tuple(SlideRef(deck_id, s) for s in slide_ids)

    return TopicMap(
        map_id=map_id,
        topics=topics,
        occurrences=occurrences,
        associations=tuple(associations),
        scopes=tuple(scopes),
        corridors=corridors,
    )


def loads(text: str | bytes) -> TopicMap:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocument(f"map document is not UTF-8: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(
            f"map document is not valid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})"
        ) from None
    return from_doc(doc)


def load(path: str | Path) -> TopicMap:
    return loads(Path(path).read_bytes())
