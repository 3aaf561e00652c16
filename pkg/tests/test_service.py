import json
import threading
from dataclasses import replace

import pytest
from fastapi.testclient import TestClient

from lecturemap import parse_deck_file, build_map, serialize
from lecturemap.crowd import annotation_to_line, make_rating
from lecturemap.model import SlideRef
from lecturemap.service import Store, create_app

from conftest import FIXTURES


@pytest.fixture()
def client(tmp_path):
    app = create_app(tmp_path / "data")
    with TestClient(app) as c:
        yield c


def deck_doc(name="algo101.json"):
    return json.loads((FIXTURES / name).read_text(encoding="utf-8"))


def put_algo(client):
    response = client.post("/maps", json=deck_doc())
    assert response.status_code == 200
    return response


def new_session(client, config=None, map_id="algo101"):
    put_algo(client)
    body = {"map": map_id}
    if config is not None:
        body["config"] = config
    response = client.post("/sessions", json=body)
    assert response.status_code == 200, response.text
    return response.json()["session"]


def join(client, session_id):
    response = client.post(f"/sessions/{session_id}/join")
    assert response.status_code == 200
    return response.json()["participant"]


def rate(client, session_id, token, slide_id, cls, deck="algo101"):
    return client.post(
        f"/sessions/{session_id}/annotations",
        json={
            "participant": token,
            "deck": deck,
            "slide": slide_id,
            "kind": "rating",
            "class": cls,
            "at": 0,
        },
    )


def live_session(client, config=None):
    session_id = new_session(client, config)
    client.post(f"/sessions/{session_id}/start")
    return session_id


def parse_sse(text):
    events = []
    for frame in text.split("\n\n"):
        if not frame.strip() or frame.startswith(":"):
            continue
        fields = dict(line.split(": ", 1) for line in frame.splitlines())
        events.append((int(fields["id"]), fields["event"], json.loads(fields["data"])))
    return events


class TestMaps:
    def test_put_deck_returns_canonical_bytes(self, client, algo_deck_path):
        expected = serialize.dumps(build_map(parse_deck_file(algo_deck_path)))
        assert put_algo(client).content == expected.encode("utf-8")

    def test_get_round_trips_put(self, client):
        put = put_algo(client).content
        first = client.get("/maps/algo101")
        second = client.get("/maps/algo101")
        assert first.status_code == 200
        assert first.content == second.content == put

    def test_put_serialized_map_accepted(self, client):
        doc = json.loads(put_algo(client).content)
        again = client.post("/maps", json=doc)
        assert again.status_code == 200
        assert again.content == json.dumps(
            doc, ensure_ascii=False, sort_keys=True, separators=(",", ":")
        ).encode("utf-8") + b"\n"

    def test_unknown_map_404(self, client):
        response = client.get("/maps/nope")
        assert response.status_code == 404
        assert response.json()["error"] == "UnknownMap"

    def test_bad_body_400(self, client):
        response = client.post("/maps", json={"nonsense": True})
        assert response.status_code == 400
        assert response.json()["error"] == "MalformedDocument"

    def test_merge_endpoint(self, client):
        put_algo(client)
        client.post("/maps", json=deck_doc("seminar42.json"))
        response = client.post("/maps/merge", json={"maps": ["algo101", "seminar42"]})
        assert response.status_code == 200
        merged = json.loads(response.content)
        assert merged["map_id"] == "algo101+seminar42"
        assert client.get("/maps/algo101+seminar42").content == response.content

    def test_merge_needs_two_maps(self, client):
        put_algo(client)
        response = client.post("/maps/merge", json={"maps": ["algo101"]})
        assert response.status_code == 400

    def test_merge_deck_collision_409(self, client):
        put_algo(client)
        response = client.post("/maps/merge", json={"maps": ["algo101", "algo101"]})
        assert response.status_code == 409
        assert response.json()["error"] == "DeckCollision"


class TestSessionSetup:
    def test_create_defaults(self, client):
        put_algo(client)
        response = client.post("/sessions", json={"map": "algo101"})
        doc = response.json()
        assert doc["state"] == "created"
        assert doc["slide"] is None
        assert doc["deck"] == "algo101"
        assert doc["length"] == 6
        assert doc["config"]["classes"] == ["clear", "unclear", "lost"]
        assert doc["config"]["quorum"] == 3

    def test_create_unknown_map_404(self, client):
        response = client.post("/sessions", json={"map": "nope"})
        assert response.status_code == 404

    def test_duplicate_classes_rejected(self, client):
        put_algo(client)
        response = client.post(
            "/sessions",
            json={"map": "algo101", "config": {"classes": ["a", "a"], "positive": "a"}},
        )
        assert response.status_code == 400
        assert response.json()["error"] == "InvalidConfig"

    def test_custom_classes_need_positive(self, client):
        put_algo(client)
        bad = client.post(
            "/sessions", json={"map": "algo101", "config": {"classes": ["good", "bad"]}}
        )
        assert bad.status_code == 400
        good = client.post(
            "/sessions",
            json={"map": "algo101", "config": {"classes": ["good", "bad"], "positive": "good"}},
        )
        assert good.status_code == 200

    def test_unknown_config_key_rejected(self, client):
        put_algo(client)
        response = client.post(
            "/sessions", json={"map": "algo101", "config": {"quorom": 3}}
        )
        assert response.status_code == 400

    def test_multi_deck_map_requires_deck_choice(self, client):
        put_algo(client)
        client.post("/maps", json=deck_doc("seminar42.json"))
        client.post("/maps/merge", json={"maps": ["algo101", "seminar42"]})
        implicit = client.post("/sessions", json={"map": "algo101+seminar42"})
        assert implicit.status_code == 400
        explicit = client.post(
            "/sessions", json={"map": "algo101+seminar42", "config": {"deck": "seminar42"}}
        )
        assert explicit.status_code == 200
        assert explicit.json()["length"] == 4

    def test_join_before_start_distinct_tokens(self, client):
        session_id = new_session(client)
        tokens = {join(client, session_id) for _ in range(5)}
        assert len(tokens) == 5


class TestLifecycle:
    def test_start_reveals_first_slide(self, client):
        session_id = new_session(client)
        doc = client.post(f"/sessions/{session_id}/start").json()
        assert doc["state"] == "live"
        assert doc["position"] == 1
        assert doc["slide"]["slide"] == "s1"
        assert doc["slide"]["topics"] == ["graphs"]

    def test_start_is_idempotent_while_live(self, client):
        session_id = live_session(client)
        client.post(f"/sessions/{session_id}/advance")
        doc = client.post(f"/sessions/{session_id}/start").json()
        assert doc["position"] == 2

    def test_advance_walks_corridor(self, client):
        session_id = live_session(client)
        for expected in (2, 3, 4, 5, 6):
            doc = client.post(f"/sessions/{session_id}/advance").json()
            assert doc["position"] == expected
        past_end = client.post(f"/sessions/{session_id}/advance")
        assert past_end.status_code == 409
        assert past_end.json()["error"] == "OutOfBounds"

    def test_goto_backward_and_bounds(self, client):
        session_id = live_session(client)
        client.post(f"/sessions/{session_id}/goto/5")
        doc = client.post(f"/sessions/{session_id}/goto/2").json()
        assert doc["position"] == 2
        assert client.post(f"/sessions/{session_id}/goto/0").status_code == 409
        assert client.post(f"/sessions/{session_id}/goto/7").status_code == 409

    def test_end_state_machine(self, client):
        session_id = new_session(client)
        premature = client.post(f"/sessions/{session_id}/end")
        assert premature.status_code == 409
        assert premature.json()["error"] == "SessionNotLive"
        client.post(f"/sessions/{session_id}/start")
        assert client.post(f"/sessions/{session_id}/end").json()["state"] == "ended"
        again = client.post(f"/sessions/{session_id}/end")
        assert again.status_code == 409
        assert again.json()["error"] == "SessionEnded"
        assert client.post(f"/sessions/{session_id}/advance").status_code == 409
        assert client.post(f"/sessions/{session_id}/join").status_code == 409

    def test_unknown_session_404(self, client):
        put_algo(client)
        for path in ("current", "report", "bookmarks"):
            assert client.get(f"/sessions/nope/{path}").status_code == 404
        assert client.post("/sessions/nope/start").status_code == 404


class TestAnnotations:
    def test_rating_before_start_conflict(self, client):
        session_id = new_session(client)
        token = join(client, session_id)
        response = rate(client, session_id, token, "s1", "clear")
        assert response.status_code == 409
        assert response.json()["error"] == "SessionNotLive"

    def test_seq_is_monotone(self, client):
        session_id = live_session(client)
        token = join(client, session_id)
        seqs = [rate(client, session_id, token, "s1", "clear").json()["seq"] for _ in range(3)]
        assert seqs == [1, 2, 3]

    def test_unregistered_token_404(self, client):
        session_id = live_session(client)
        response = rate(client, session_id, "deadbeef", "s1", "clear")
        assert response.status_code == 404
        assert response.json()["error"] == "UnknownParticipant"

    def test_rating_behind_the_lecturer_is_fine(self, client):
        session_id = live_session(client)
        token = join(client, session_id)
        for _ in range(3):
            client.post(f"/sessions/{session_id}/advance")
        assert rate(client, session_id, token, "s2", "lost").status_code == 200

    def test_unknown_class_and_slide(self, client):
        session_id = live_session(client)
        token = join(client, session_id)
        assert rate(client, session_id, token, "s1", "meh").status_code == 400
        assert rate(client, session_id, token, "zz", "clear").status_code == 404

    def test_submission_after_end_conflict(self, client):
        session_id = live_session(client)
        token = join(client, session_id)
        client.post(f"/sessions/{session_id}/end")
        assert rate(client, session_id, token, "s1", "clear").status_code == 409


class TestReads:
    def test_report_flags_struggling_slide(self, client):
        session_id = live_session(client)
        for cls in ("clear", "lost", "lost"):
            rate(client, session_id, join(client, session_id), "s4", cls)
        report = client.get(f"/sessions/{session_id}/report").json()
        assert report["flagged"] == ["algo101/s4"]
        assert report["slides"]["algo101/s4"] == {
            "counts": {"clear": 1, "unclear": 0, "lost": 2},
            "total": 3,
            "flagged": True,
        }
        assert len(report["slides"]) == 7

    def test_report_respects_custom_scale(self, client):
        config = {"classes": ["good", "bad"], "positive": "good", "quorum": 2}
        session_id = live_session(client, config)
        for _ in range(2):
            rate(client, session_id, join(client, session_id), "s4", "bad")
        report = client.get(f"/sessions/{session_id}/report").json()
        assert report["flagged"] == ["algo101/s4"]

    def test_mindset_endpoint(self, client):
        session_id = live_session(client)
        token = join(client, session_id)
        # no tags yet, but the lecturer set is nonempty: the score is a real 0
        empty = client.get(f"/sessions/{session_id}/mindset").json()
        assert empty == {"scope": "whole_session", "score": 0.0}
        client.post(
            f"/sessions/{session_id}/annotations",
            json={
                "participant": token,
                "deck": "algo101",
                "slide": "s5",
                "kind": "note",
                "text": "",
                "tags": ["trees", "recursion"],
            },
        )
        doc = client.get(f"/sessions/{session_id}/mindset").json()
        assert doc["score"] == pytest.approx(1 / 3)

    def test_discussion_endpoint(self, client):
        session_id = live_session(client)
        for token in (join(client, session_id), join(client, session_id)):
            client.post(
                f"/sessions/{session_id}/annotations",
                json={
                    "participant": token,
                    "deck": "algo101",
                    "slide": "s5",
                    "kind": "note",
                    "text": "what about recursion?",
                    "tags": ["recursion"],
                },
            )
        doc = client.get(f"/sessions/{session_id}/discussion-topics").json()
        assert doc["min_support"] == 2
        assert [t["topic"] for t in doc["topics"]] == ["recursion"]
        assert doc["topics"][0]["new"] is True

    def test_bookmarks_endpoint(self, client):
        session_id = live_session(client)
        token = join(client, session_id)
        client.post(
            f"/sessions/{session_id}/annotations",
            json={
                "participant": token,
                "deck": "algo101",
                "slide": "s3",
                "kind": "bookmark",
                "label": "revisit",
            },
        )
        doc = client.get(f"/sessions/{session_id}/bookmarks").json()
        assert doc["bookmarks"] == [
            {"label": "revisit", "deck": "algo101", "slide": "s3", "ordinal": 3, "owner": token}
        ]

    def test_assistance_withholds_unseen_corridor_slides(self, client):
        session_id = live_session(client)
        doc = client.get(f"/sessions/{session_id}/assistance", params={"slide": "s4"}).json()
        assert [(e["slide"], e["reason"], e["withheld"]) for e in doc["entries"]] == [
            ("x1", "same_subject", False),
            ("s2", "preliminary", True),
            ("s3", "preliminary", True),
        ]
        assert "title" not in doc["entries"][1]
        for _ in range(3):
            client.post(f"/sessions/{session_id}/advance")
        doc = client.get(f"/sessions/{session_id}/assistance", params={"slide": "s4"}).json()
        assert all(not e["withheld"] for e in doc["entries"])
        assert doc["entries"][1]["title"] == "What is a graph?"

    def test_assistance_reveal_future_config(self, client):
        session_id = live_session(client, {"reveal_future": True})
        doc = client.get(f"/sessions/{session_id}/assistance", params={"slide": "s4"}).json()
        assert all(not e["withheld"] for e in doc["entries"])

    def test_assistance_bare_slide_id_resolves(self, client):
        session_id = live_session(client)
        by_key = client.get(
            f"/sessions/{session_id}/assistance", params={"slide": "algo101/s4"}
        ).json()
        bare = client.get(f"/sessions/{session_id}/assistance", params={"slide": "s4"}).json()
        assert by_key == bare


class TestEvents:
    def run_short_session(self, client):
        session_id = live_session(client)
        token = join(client, session_id)
        client.post(f"/sessions/{session_id}/advance")
        rate(client, session_id, token, "s1", "clear")
        client.post(f"/sessions/{session_id}/end")
        return session_id

    def test_stream_replays_in_order(self, client):
        session_id = self.run_short_session(client)
        response = client.get(f"/sessions/{session_id}/events")
        assert response.headers["content-type"].startswith("text/event-stream")
        events = parse_sse(response.text)
        assert [seq for seq, _, _ in events] == [1, 2, 3, 4]
        assert [etype for _, etype, _ in events] == [
            "SlideChanged",
            "SlideChanged",
            "AnnotationAccepted",
            "SessionEnded",
        ]
        assert events[1][2]["position"] == 2
        assert events[2][2]["counters"]["rating"] == 1

    def test_stream_resumes_from_query_param(self, client):
        session_id = self.run_short_session(client)
        events = parse_sse(client.get(f"/sessions/{session_id}/events?from=2").text)
        assert [seq for seq, _, _ in events] == [3, 4]

    def test_stream_resumes_from_last_event_id_header(self, client):
        session_id = self.run_short_session(client)
        response = client.get(
            f"/sessions/{session_id}/events", headers={"Last-Event-ID": "3"}
        )
        events = parse_sse(response.text)
        assert [(seq, etype) for seq, etype, _ in events] == [(4, "SessionEnded")]

    def test_stream_unknown_session_404(self, client):
        put_algo(client)
        assert client.get("/sessions/nope/events").status_code == 404


class TestDurability:
    def drive(self, data_dir):
        store = Store(data_dir)
        store.put_map(deck_doc())
        session = store.create_session("algo101", {})
        store.start(session.session_id)
        tokens = [store.join(session.session_id) for _ in range(3)]
        store.advance(session.session_id)
        for token, cls in zip(tokens, ("clear", "lost", "lost")):
            store.submit(
                session.session_id,
                {
                    "participant": token,
                    "deck": "algo101",
                    "slide": "s4",
                    "kind": "rating",
                    "class": cls,
                },
            )
        return store, session.session_id, tokens

    def test_restart_reproduces_state(self, tmp_path):
        store, session_id, _ = self.drive(tmp_path)
        before = (
            store.report(session_id),
            store.current(session_id),
            store.bookmarks(session_id),
        )
        reloaded = Store(tmp_path)
        after = (
            reloaded.report(session_id),
            reloaded.current(session_id),
            reloaded.bookmarks(session_id),
        )
        assert after == before
        assert reloaded.get_session(session_id).state == "live"
        reloaded.advance(session_id)
        assert reloaded.current(session_id)["position"] == 3

    def test_log_ahead_of_snapshot_is_reconciled(self, tmp_path):
        store, session_id, tokens = self.drive(tmp_path)
        session = store.get_session(session_id)
        # simulate a crash after the fsync'd log write but before the
        # snapshot caught up: the line exists, the snapshot does not know it
        orphan = replace(
            make_rating(tokens[0], SlideRef("algo101", "s5"), "lost", 99),
            seq=session.ann_seq + 1,
        )
        with open(store._log_path(session_id), "a", encoding="utf-8") as handle:
            handle.write(annotation_to_line(orphan) + "\n")
        stale_events = len(session.events)

        reloaded = Store(tmp_path)
        again = reloaded.get_session(session_id)
        assert again.ann_seq == session.ann_seq + 1
        assert len(again.events) >= stale_events + 1
        synthesized = again.events[-1]
        assert synthesized.type == "AnnotationAccepted"
        assert synthesized.data["seq"] == orphan.seq
        assert [e.seq for e in again.events] == list(range(1, len(again.events) + 1))
        report = reloaded.report(session_id)
        assert report["slides"]["algo101/s5"]["total"] == 1
        next_seq = reloaded.submit(
            session_id,
            {
                "participant": tokens[1],
                "deck": "algo101",
                "slide": "s5",
                "kind": "rating",
                "class": "clear",
            },
        )["seq"]
        assert next_seq == orphan.seq + 1

    def test_concurrent_submissions_all_land(self, tmp_path):
        store = Store(tmp_path)
        store.put_map(deck_doc())
        session = store.create_session("algo101", {})
        session_id = session.session_id
        store.start(session_id)
        tokens = [store.join(session_id) for _ in range(10)]
        results = []
        errors = []

        def worker(token):
            try:
                for i in range(5):
                    out = store.submit(
                        session_id,
                        {
                            "participant": token,
                            "deck": "algo101",
                            "slide": "s4",
                            "kind": "rating",
                            "class": ("clear", "lost")[i % 2],
                        },
                    )
                    results.append(out["seq"])
            except Exception as exc:  # pragma: no cover
                errors.append(exc)

        threads = [threading.Thread(target=worker, args=(t,)) for t in tokens]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        assert sorted(results) == list(range(1, 51))
        lines = store._log_path(session_id).read_text(encoding="utf-8").splitlines()
        assert len(lines) == 50
        logged_seqs = sorted(json.loads(line)["seq"] for line in lines)
        assert logged_seqs == list(range(1, 51))
        report = store.report(session_id)
        assert report["slides"]["algo101/s4"]["total"] == 10
