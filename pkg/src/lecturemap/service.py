"""HTTP service hosting live lecture sessions.

One process owns all state. Maps are immutable snapshots shared across
sessions; each session serializes its mutations behind one lock, so
concurrent submissions are totally ordered before they touch the log.
Annotations are fsync'd to the session's log file before the ack leaves
the server, and session snapshots are replaced atomically, which is what
makes kill-and-restart reproduce reports and position exactly.

Endpoints return JSON; domain errors map to {"error": <code>, "detail": ...}
with 404 for unresolved names, 409 for state conflicts, 400 otherwise.
The event stream is server-sent events: `id:` carries the event sequence
number so clients resume with `?from=` or the Last-Event-ID header.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterator

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse
from starlette.concurrency import run_in_threadpool

from . import crowd, queries, serialize
from .crowd import Annotation, ClassConfig
from .errors import (
    DomainError,
    InvalidConfig,
    MalformedDocument,
    OutOfBounds,
    SessionEnded,
    SessionNotLive,
    UnknownMap,
    UnknownParticipant,
    UnknownSession,
)
from .graph import merge
from .ingest import build_map, parse_deck
from .model import SlideRef, TopicMap, validate

CREATED = "created"
LIVE = "live"
ENDED = "ended"

EVENT_SLIDE_CHANGED = "SlideChanged"
EVENT_ANNOTATION_ACCEPTED = "AnnotationAccepted"
EVENT_SESSION_ENDED = "SessionEnded"

_NOT_FOUND = {
    "UnknownMap",
    "UnknownSession",
    "UnknownSlide",
    "UnknownTopic",
    "UnknownDeck",
    "UnknownParticipant",
}
_CONFLICT = {"SessionNotLive", "SessionEnded", "DeckCollision", "CycleDetected", "OutOfBounds"}


def _status_for(error: DomainError) -> int:
    if error.code in _NOT_FOUND:
        return 404
    if error.code in _CONFLICT:
        return 409
    return 400


@dataclass(frozen=True)
class Event:
    seq: int
    type: str
    data: dict

    def to_doc(self) -> dict:
        return {"seq": self.seq, "type": self.type, "data": self.data}

    @staticmethod
    def from_doc(doc: dict) -> "Event":
        return Event(doc["seq"], doc["type"], doc["data"])

    def to_frame(self) -> str:
        payload = json.dumps(self.data, ensure_ascii=False, sort_keys=True)
        return f"id: {self.seq}\nevent: {self.type}\ndata: {payload}\n\n"


@dataclass(frozen=True)
class SessionConfig:
    deck: str
    classes: ClassConfig = ClassConfig()
    quorum: int = crowd.DEFAULT_QUORUM
    threshold: float = crowd.DEFAULT_THRESHOLD
    min_support: int = crowd.DEFAULT_MIN_SUPPORT
    reveal_future: bool = False

    def check(self) -> "SessionConfig":
        self.classes.check()
        if self.quorum < 1:
            raise InvalidConfig("quorum must be at least 1")
        if not 0 < self.threshold <= 1:
            raise InvalidConfig("threshold must be in (0, 1]")
        if self.min_support < 1:
            raise InvalidConfig("min_support must be at least 1")
        return self

    def to_doc(self) -> dict:
        return {
            "deck": self.deck,
            "classes": list(self.classes.labels),
            "positive": self.classes.positive,
            "quorum": self.quorum,
            "threshold": self.threshold,
            "min_support": self.min_support,
            "reveal_future": self.reveal_future,
        }

    @staticmethod
    def from_doc(doc: dict, topic_map: TopicMap) -> "SessionConfig":
        known = {
            "deck",
            "classes",
            "positive",
            "quorum",
            "threshold",
            "min_support",
            "reveal_future",
        }
        unknown = set(doc) - known
        if unknown:
            raise InvalidConfig(f"unknown config keys: {sorted(unknown)}")
        decks = topic_map.deck_ids()
        deck = doc.get("deck")
        if deck is None:
            if len(decks) != 1:
                raise InvalidConfig(
                    f"map has decks {decks}; config must name the session deck"
                )
            deck = decks[0]
        elif deck not in decks:
            raise InvalidConfig(f"deck {deck!r} is not part of the map")
        classes = ClassConfig(
            labels=tuple(doc.get("classes", crowd.DEFAULT_CLASSES)),
            positive=doc.get("positive", crowd.DEFAULT_POSITIVE),
        )
        if "classes" in doc and "positive" not in doc:
            # a custom scale must also say which label is positive,
            # unless the default positive is still on it
            if crowd.DEFAULT_POSITIVE not in classes.labels:
                raise InvalidConfig("custom class list needs a 'positive' label")
        return SessionConfig(
            deck=deck,
            classes=classes,
            quorum=doc.get("quorum", crowd.DEFAULT_QUORUM),
            threshold=doc.get("threshold", crowd.DEFAULT_THRESHOLD),
            min_support=doc.get("min_support", crowd.DEFAULT_MIN_SUPPORT),
            reveal_future=bool(doc.get("reveal_future", False)),
        ).check()


class LiveSession:
    """Runtime state of one session; all mutation happens under ``cond``."""

    def __init__(self, session_id: str, map_id: str, config: SessionConfig):
        self.session_id = session_id
        self.map_id = map_id
        self.config = config
        self.state = CREATED
        self.position = 1
        self.participants: list[str] = []
        self.log: list[Annotation] = []
        self.ann_seq = 0
        self.event_seq = 0
        self.events: list[Event] = []
        self.cond = threading.Condition()

    def to_doc(self) -> dict:
        return {
            "session_id": self.session_id,
            "map": self.map_id,
            "state": self.state,
            "position": self.position,
            "config": self.config.to_doc(),
            "participants": list(self.participants),
            "ann_seq": self.ann_seq,
            "event_seq": self.event_seq,
            "events": [event.to_doc() for event in self.events],
        }


def _atomic_write(path: Path, text: str, fsync: bool) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as handle:
        handle.write(text)
        if fsync:
            handle.flush()
            os.fsync(handle.fileno())
    os.replace(tmp, path)


class Store:
    """Owns persisted maps and sessions under one data directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.maps_dir = self.root / "maps"
        self.sessions_dir = self.root / "sessions"
        self.annotations_dir = self.root / "annotations"
        for directory in (self.maps_dir, self.sessions_dir, self.annotations_dir):
            directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self.maps: dict[str, TopicMap] = {}
        self.sessions: dict[str, LiveSession] = {}
        self._load()

    # -- loading ----------------------------------------------------------

    def _load(self) -> None:
        for path in sorted(self.maps_dir.glob("*.json")):
            topic_map = serialize.load(path)
            self.maps[topic_map.map_id] = topic_map
        for path in sorted(self.sessions_dir.glob("*.json")):
            session = self._load_session(path)
            self.sessions[session.session_id] = session

    def _load_session(self, path: Path) -> LiveSession:
        doc = json.loads(path.read_text(encoding="utf-8"))
        topic_map = self.maps.get(doc["map"])
        if topic_map is None:
            raise UnknownMap(f"session {doc['session_id']!r} references missing map {doc['map']!r}")
        session = LiveSession(
            doc["session_id"], doc["map"], SessionConfig.from_doc(doc["config"], topic_map)
        )
        session.state = doc["state"]
        session.position = doc["position"]
        session.participants = list(doc["participants"])
        session.ann_seq = doc["ann_seq"]
        session.event_seq = doc["event_seq"]
        session.events = [Event.from_doc(e) for e in doc["events"]]
        log_path = self._log_path(session.session_id)
        if log_path.exists():
            session.log = crowd.read_log(log_path)
        self._reconcile(session)
        return session

    def _reconcile(self, session: LiveSession) -> None:
        # the log file is fsync'd before the ack, the snapshot is not
        # rewritten durably per annotation: after a crash the log may be
        # ahead of the snapshot, so re-derive the missing accepted events
        acked = {
            event.data["seq"]
            for event in session.events
            if event.type == EVENT_ANNOTATION_ACCEPTED
        }
        counters = {crowd.RATING: 0, crowd.NOTE: 0, crowd.BOOKMARK: 0}
        for annotation in session.log:
            counters[annotation.kind] += 1
            if annotation.seq is None or annotation.seq in acked:
                continue
            session.event_seq += 1
            session.events.append(
                Event(
                    session.event_seq,
                    EVENT_ANNOTATION_ACCEPTED,
                    _annotation_event_data(annotation, dict(counters)),
                )
            )
            session.ann_seq = max(session.ann_seq, annotation.seq)

    # -- persistence ------------------------------------------------------

    def _map_path(self, map_id: str) -> Path:
        return self.maps_dir / f"{map_id}.json"

    def _session_path(self, session_id: str) -> Path:
        return self.sessions_dir / f"{session_id}.json"

    def _log_path(self, session_id: str) -> Path:
        return self.annotations_dir / f"{session_id}.jsonl"

    def _save_map(self, topic_map: TopicMap) -> None:
        _atomic_write(self._map_path(topic_map.map_id), serialize.dumps(topic_map), fsync=True)

    def _save_session(self, session: LiveSession, fsync: bool = True) -> None:
        text = json.dumps(session.to_doc(), ensure_ascii=False, sort_keys=True)
        _atomic_write(self._session_path(session.session_id), text, fsync=fsync)

    # -- maps -------------------------------------------------------------

    def put_map(self, doc) -> TopicMap:
        if isinstance(doc, dict) and "slides" in doc:
            topic_map = build_map(parse_deck(json.dumps(doc)))
        elif isinstance(doc, dict) and "topics" in doc and "occurrences" in doc:
            topic_map = serialize.from_doc(doc)
            violations = validate(topic_map)
            if violations:
                raise MalformedDocument("; ".join(violations))
        else:
            raise MalformedDocument(
                "body must be an annotated deck (with 'slides') or a serialized map"
            )
        with self._lock:
            self.maps[topic_map.map_id] = topic_map
            self._save_map(topic_map)
        return topic_map

    def get_map(self, map_id: str) -> TopicMap:
        with self._lock:
            topic_map = self.maps.get(map_id)
        if topic_map is None:
            raise UnknownMap(f"no map {map_id!r}")
        return topic_map

    def merge_maps(self, map_ids: list[str], map_id: str | None) -> TopicMap:
        if len(map_ids) < 2:
            raise MalformedDocument("merge needs at least two map ids")
        parts = [self.get_map(m) for m in map_ids]
        merged = parts[0]
        for part in parts[1:]:
            merged = merge(merged, part)
        if map_id is not None:
            merged = replace(merged, map_id=map_id)
        with self._lock:
            self.maps[merged.map_id] = merged
            self._save_map(merged)
        return merged

    # -- sessions ---------------------------------------------------------

    def create_session(self, map_id: str, config_doc: dict) -> LiveSession:
        topic_map = self.get_map(map_id)
        violations = validate(topic_map)
        if violations:
            raise MalformedDocument("; ".join(violations))
        config = SessionConfig.from_doc(config_doc, topic_map)
        with self._lock:
            while True:
                session_id = secrets.token_hex(6)
                if session_id not in self.sessions:
                    break
            session = LiveSession(session_id, map_id, config)
            self.sessions[session_id] = session
        self._save_session(session)
        return session

    def get_session(self, session_id: str) -> LiveSession:
        with self._lock:
            session = self.sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"no session {session_id!r}")
        return session

    def corridor_of(self, session: LiveSession) -> tuple[SlideRef, ...]:
        return self.maps[session.map_id].corridors[session.config.deck]

    # -- session mutations (each serialized by the session condition) ----

    def _emit(self, session: LiveSession, event_type: str, data: dict) -> Event:
        session.event_seq += 1
        event = Event(session.event_seq, event_type, data)
        session.events.append(event)
        session.cond.notify_all()
        return event

    def _slide_changed_data(self, session: LiveSession) -> dict:
        ref = self.corridor_of(session)[session.position - 1]
        return {
            "position": session.position,
            "length": len(self.corridor_of(session)),
            "deck": ref.deck_id,
            "slide": ref.slide_id,
        }

    def start(self, session_id: str) -> dict:
        session = self.get_session(session_id)
        with session.cond:
            if session.state == ENDED:
                raise SessionEnded(f"session {session_id!r} has ended")
            if session.state == CREATED:
                session.state = LIVE
                self._emit(session, EVENT_SLIDE_CHANGED, self._slide_changed_data(session))
                self._save_session(session)
            return self.session_status(session)

    def advance(self, session_id: str) -> dict:
        session = self.get_session(session_id)
        with session.cond:
            self._require_live(session)
            if session.position >= len(self.corridor_of(session)):
                raise OutOfBounds("already at the last corridor slide")
            session.position += 1
            self._emit(session, EVENT_SLIDE_CHANGED, self._slide_changed_data(session))
            self._save_session(session)
            return self.session_status(session)

    def goto(self, session_id: str, ordinal: int) -> dict:
        session = self.get_session(session_id)
        with session.cond:
            self._require_live(session)
            length = len(self.corridor_of(session))
            if not 1 <= ordinal <= length:
                raise OutOfBounds(f"ordinal {ordinal} outside corridor [1, {length}]")
            session.position = ordinal
            self._emit(session, EVENT_SLIDE_CHANGED, self._slide_changed_data(session))
            self._save_session(session)
            return self.session_status(session)

    def end(self, session_id: str) -> dict:
        session = self.get_session(session_id)
        with session.cond:
            if session.state == ENDED:
                raise SessionEnded(f"session {session_id!r} has already ended")
            if session.state != LIVE:
                raise SessionNotLive(f"session {session_id!r} was never started")
            session.state = ENDED
            self._emit(session, EVENT_SESSION_ENDED, {"position": session.position})
            self._save_session(session)
            return self.session_status(session)

    def join(self, session_id: str) -> str:
        session = self.get_session(session_id)
        with session.cond:
            if session.state == ENDED:
                raise SessionEnded(f"session {session_id!r} has ended")
            while True:
                token = secrets.token_hex(8)
                if token not in session.participants:
                    break
            session.participants.append(token)
            self._save_session(session)
            return token

    def submit(self, session_id: str, doc: dict) -> dict:
        session = self.get_session(session_id)
        annotation = crowd.annotation_from_doc(doc)
        with session.cond:
            if session.state == ENDED:
                raise SessionEnded(f"session {session_id!r} has ended")
            if session.state != LIVE:
                raise SessionNotLive("annotations are accepted only while the session is live")
            if annotation.participant not in session.participants:
                raise UnknownParticipant(f"token {annotation.participant!r} never joined")
            crowd.validate_annotation(annotation, self.maps[session.map_id], session.config.classes)
            session.ann_seq += 1
            annotation = replace(annotation, seq=session.ann_seq)
            with open(self._log_path(session_id), "a", encoding="utf-8") as handle:
                handle.write(crowd.annotation_to_line(annotation) + "\n")
                handle.flush()
                os.fsync(handle.fileno())
            session.log.append(annotation)
            counters = {
                kind: sum(1 for a in session.log if a.kind == kind)
                for kind in (crowd.RATING, crowd.NOTE, crowd.BOOKMARK)
            }
            self._emit(
                session,
                EVENT_ANNOTATION_ACCEPTED,
                _annotation_event_data(annotation, counters),
            )
            # the log line above is durable; the snapshot is best-effort
            # here and reconciled from the log after a crash
            self._save_session(session, fsync=False)
            return {"seq": annotation.seq}

    @staticmethod
    def _require_live(session: LiveSession) -> None:
        if session.state == ENDED:
            raise SessionEnded(f"session {session.session_id!r} has ended")
        if session.state != LIVE:
            raise SessionNotLive(f"session {session.session_id!r} is not live")

    # -- reads ------------------------------------------------------------

    def _visible(self, session: LiveSession, ref: SlideRef) -> bool:
        if session.config.reveal_future:
            return True
        occurrence = self.maps[session.map_id].occurrences[ref]
        if occurrence.ordinal is None or ref.deck_id != session.config.deck:
            return True
        return occurrence.ordinal <= session.position

    def session_status(self, session: LiveSession) -> dict:
        topic_map = self.maps[session.map_id]
        corridor = self.corridor_of(session)
        doc = {
            "session": session.session_id,
            "map": session.map_id,
            "deck": session.config.deck,
            "state": session.state,
            "position": session.position,
            "length": len(corridor),
            "config": session.config.to_doc(),
            "slide": None,
        }
        if session.state != CREATED:
            ref = corridor[session.position - 1]
            occurrence = topic_map.occurrences[ref]
            doc["slide"] = {
                "deck": ref.deck_id,
                "slide": ref.slide_id,
                "ordinal": occurrence.ordinal,
                "class": occurrence.cls.value,
                "title": occurrence.title,
                "body": occurrence.body,
                "topics": list(occurrence.topic_refs),
            }
        return doc

    def current(self, session_id: str) -> dict:
        session = self.get_session(session_id)
        with session.cond:
            return self.session_status(session)

    def resolve_slide(self, session: LiveSession, raw: str) -> SlideRef:
        return queries.resolve_slide(self.maps[session.map_id], raw)

    def assistance(self, session_id: str, raw_slide: str) -> dict:
        session = self.get_session(session_id)
        topic_map = self.maps[session.map_id]
        ref = self.resolve_slide(session, raw_slide)
        entries = []
        for entry in queries.assistance(topic_map, ref):
            occurrence = topic_map.occurrences[entry.ref]
            doc = {
                "deck": entry.ref.deck_id,
                "slide": entry.ref.slide_id,
                "reason": entry.reason,
                "depth": entry.depth,
            }
            if self._visible(session, entry.ref):
                doc["withheld"] = False
                doc["ordinal"] = occurrence.ordinal
                doc["class"] = occurrence.cls.value
                doc["title"] = occurrence.title
                doc["topics"] = list(occurrence.topic_refs)
            else:
                doc["withheld"] = True
            entries.append(doc)
        return {"slide": ref.key, "entries": entries}

    def _log_snapshot(self, session: LiveSession) -> list[Annotation]:
        with session.cond:
            return list(session.log)

    def report(self, session_id: str) -> dict:
        session = self.get_session(session_id)
        log = self._log_snapshot(session)
        report = crowd.comprehension_report(
            log,
            self.maps[session.map_id],
            session.config.classes,
            session.config.quorum,
            session.config.threshold,
        )
        return report.to_doc()

    def mindset(self, session_id: str, raw_slide: str | None) -> dict:
        session = self.get_session(session_id)
        log = self._log_snapshot(session)
        topic_map = self.maps[session.map_id]
        if raw_slide is None:
            score = crowd.mindset_correlation(log, topic_map)
            return {"scope": "whole_session", "score": score}
        ref = self.resolve_slide(session, raw_slide)
        score = crowd.mindset_correlation(log, topic_map, ref)
        return {"scope": "slide", "slide": ref.key, "score": score}

    def discussion(self, session_id: str) -> dict:
        session = self.get_session(session_id)
        log = self._log_snapshot(session)
        delta = crowd.discussion_topics(
            log, self.maps[session.map_id], session.config.min_support
        )
        return delta.to_doc()

    def bookmarks(self, session_id: str) -> dict:
        session = self.get_session(session_id)
        log = self._log_snapshot(session)
        entries = crowd.bookmarks(log, self.maps[session.map_id])
        return {"bookmarks": [entry.to_doc() for entry in entries]}

    # -- event stream -----------------------------------------------------

    def stream(self, session_id: str, from_seq: int) -> Iterator[str]:
        session = self.get_session(session_id)
        cursor = from_seq
        while True:
            with session.cond:
                pending = [e for e in session.events if e.seq > cursor]
                if not pending:
                    if session.state == ENDED:
                        return
                    session.cond.wait(timeout=15.0)
                    pending = [e for e in session.events if e.seq > cursor]
            if not pending:
                yield ": keepalive\n\n"
                continue
            for event in pending:
                yield event.to_frame()
                cursor = event.seq
                if event.type == EVENT_SESSION_ENDED:
                    return


def _annotation_event_data(annotation: Annotation, counters: dict) -> dict:
    return {
        "seq": annotation.seq,
        "kind": annotation.kind,
        "deck": annotation.slide.deck_id,
        "slide": annotation.slide.slide_id,
        "counters": counters,
    }


async def _json_body(request: Request) -> dict:
    raw = await request.body()
    try:
        doc = json.loads(raw) if raw else {}
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"request body is not JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise MalformedDocument("request body must be a JSON object")
    return doc


def create_app(data_dir: str | Path) -> FastAPI:
    store = Store(data_dir)
    app = FastAPI(title="lecturemap", docs_url=None, redoc_url=None)
    app.state.store = store
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["*"],
    )

    @app.exception_handler(DomainError)
    async def _domain_error(request: Request, exc: DomainError) -> JSONResponse:
        return JSONResponse(
            {"error": exc.code, "detail": str(exc)}, status_code=_status_for(exc)
        )

    def _map_response(topic_map: TopicMap) -> Response:
        return Response(serialize.dumps(topic_map), media_type="application/json")

    @app.post("/maps")
    async def post_map(request: Request) -> Response:
        doc = await _json_body(request)
        topic_map = await run_in_threadpool(store.put_map, doc)
        return _map_response(topic_map)

    @app.get("/maps/{map_id}")
    async def get_map(map_id: str) -> Response:
        topic_map = await run_in_threadpool(store.get_map, map_id)
        return _map_response(topic_map)

    @app.post("/maps/merge")
    async def post_merge(request: Request) -> Response:
        doc = await _json_body(request)
        map_ids = doc.get("maps")
        if not isinstance(map_ids, list) or not all(isinstance(m, str) for m in map_ids):
            raise MalformedDocument("merge body needs 'maps': [map_id, ...]")
        topic_map = await run_in_threadpool(store.merge_maps, map_ids, doc.get("map_id"))
        return _map_response(topic_map)

    @app.post("/sessions")
    async def post_session(request: Request) -> dict:
        doc = await _json_body(request)
        map_id = doc.get("map")
        if not isinstance(map_id, str):
            raise MalformedDocument("session body needs 'map': map_id")
        config = doc.get("config", {})
        if not isinstance(config, dict):
            raise MalformedDocument("session 'config' must be an object")
        session = await run_in_threadpool(store.create_session, map_id, config)
        return store.session_status(session)

    @app.post("/sessions/{session_id}/start")
    async def post_start(session_id: str) -> dict:
        return await run_in_threadpool(store.start, session_id)

    @app.post("/sessions/{session_id}/advance")
    async def post_advance(session_id: str) -> dict:
        return await run_in_threadpool(store.advance, session_id)

    @app.post("/sessions/{session_id}/goto/{ordinal}")
    async def post_goto(session_id: str, ordinal: int) -> dict:
        return await run_in_threadpool(store.goto, session_id, ordinal)

    @app.post("/sessions/{session_id}/end")
    async def post_end(session_id: str) -> dict:
        return await run_in_threadpool(store.end, session_id)

    @app.post("/sessions/{session_id}/join")
    async def post_join(session_id: str) -> dict:
        token = await run_in_threadpool(store.join, session_id)
        return {"participant": token}

    @app.post("/sessions/{session_id}/annotations")
    async def post_annotation(session_id: str, request: Request) -> dict:
        doc = await _json_body(request)
        return await run_in_threadpool(store.submit, session_id, doc)

    @app.get("/sessions/{session_id}/current")
    async def get_current(session_id: str) -> dict:
        return await run_in_threadpool(store.current, session_id)

    @app.get("/sessions/{session_id}/assistance")
    async def get_assistance(session_id: str, slide: str) -> dict:
        return await run_in_threadpool(store.assistance, session_id, slide)

    @app.get("/sessions/{session_id}/report")
    async def get_report(session_id: str) -> dict:
        return await run_in_threadpool(store.report, session_id)

    @app.get("/sessions/{session_id}/mindset")
    async def get_mindset(session_id: str, slide: str | None = None) -> dict:
        return await run_in_threadpool(store.mindset, session_id, slide)

    @app.get("/sessions/{session_id}/discussion-topics")
    async def get_discussion(session_id: str) -> dict:
        return await run_in_threadpool(store.discussion, session_id)

    @app.get("/sessions/{session_id}/bookmarks")
    async def get_bookmarks(session_id: str) -> dict:
        return await run_in_threadpool(store.bookmarks, session_id)

    @app.get("/sessions/{session_id}/events")
    async def get_events(session_id: str, request: Request) -> StreamingResponse:
        raw_from = request.query_params.get("from") or request.headers.get("last-event-id") or "0"
        try:
            from_seq = int(raw_from)
        except ValueError:
            raise MalformedDocument("'from' must be an integer event sequence number") from None
        store.get_session(session_id)
        return StreamingResponse(
            store.stream(session_id, from_seq),
            media_type="text/event-stream",
            headers={"Cache-Control": "no-cache", "X-Accel-Buffering": "no"},
        )

    return app
