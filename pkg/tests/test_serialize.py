import json
import random

import pytest

from genutil import random_map
from lecturemap import dumps, from_doc, load, loads, save, to_doc, validate
from lecturemap.errors import MalformedDocument


class TestCanonicalForm:
    def test_document_shape(self, algo_map):
        doc = to_doc(algo_map)
        assert set(doc) == {"map_id", "topics", "occurrences", "associations", "scopes", "corridors"}
        assert doc["map_id"] == "algo101"
        assert doc["topics"]["graphs"]["names"] == ["Graphs"]
        assert doc["occurrences"]["algo101/x1"]["ordinal"] is None
        assert doc["corridors"]["algo101"] == ["s1", "s2", "s3", "s4", "s5", "s6"]

    def test_association_roles_in_doc(self, algo_map):
        assocs = to_doc(algo_map)["associations"]
        kinds = {a["type"]: a["roles"] for a in assocs}
        assert set(kinds["preliminary_knowledge"]) == {"prerequisite", "dependent"}
        assert set(kinds["temporal_continuity"]) == {"predecessor", "successor"}

    def test_bytes_deterministic(self, algo_map):
        assert dumps(algo_map) == dumps(algo_map)
        assert dumps(algo_map).endswith("\n")

    def test_no_insignificant_whitespace(self, algo_map):
        text = dumps(algo_map)
        canonical = json.dumps(
            json.loads(text), ensure_ascii=False, sort_keys=True, separators=(",", ":")
        )
        assert text == canonical + "\n"

    def test_equal_maps_equal_bytes(self, algo_deck_path):
        from lecturemap import build_map, parse_deck

        raw = algo_deck_path.read_bytes()
        assert dumps(build_map(parse_deck(raw))) == dumps(build_map(parse_deck(raw)))


class TestRoundTrip:
    def test_fixture_round_trip_exact(self, algo_map):
        assert loads(dumps(algo_map)) == algo_map

    def test_seminar_round_trip_exact(self, seminar_map):
        assert loads(dumps(seminar_map)) == seminar_map

    def test_random_maps_round_trip(self):
        rng = random.Random(6606)
        for i in range(60):
            topic_map = random_map(rng, f"deck{i}", prereq_mode="any")
            again = loads(dumps(topic_map))
            assert again == topic_map
            assert dumps(again) == dumps(topic_map)

    def test_file_round_trip(self, algo_map, tmp_path):
        path = tmp_path / "m.json"
        save(algo_map, path)
        assert load(path) == algo_map


class TestMalformed:
    def test_invalid_json(self):
        with pytest.raises(MalformedDocument) as exc:
            loads("{nope")
        assert "line" in str(exc.value)

    def test_wrong_top_level_type(self):
        with pytest.raises(MalformedDocument):
            from_doc([1, 2, 3])

    def test_missing_keys(self):
        with pytest.raises(MalformedDocument):
            from_doc({"map_id": "m"})

    def test_bad_association_type(self, algo_map):
        doc = to_doc(algo_map)
        doc["associations"].append({"type": "friendship", "roles": {"source": "a", "target": "b"}})
        with pytest.raises(MalformedDocument):
            from_doc(doc)

    def test_bad_roles_for_type(self, algo_map):
        doc = to_doc(algo_map)
        doc["associations"].append(
            {"type": "discussion", "roles": {"predecessor": "a", "successor": "b"}}
        )
        with pytest.raises(MalformedDocument):
            from_doc(doc)

    def test_unknown_occurrence_class(self, algo_map):
        doc = json.loads(json.dumps(to_doc(algo_map)))
        doc["occurrences"]["algo101/s1"]["class"] = "defn"
        with pytest.raises(MalformedDocument):
            from_doc(doc)

    def test_semantic_issues_left_to_validate(self, algo_map):
        # a dangling topic ref parses fine; validate is the gate
        doc = json.loads(json.dumps(to_doc(algo_map)))
        doc["occurrences"]["algo101/s1"]["topics"] = ["ghost"]
        parsed = from_doc(doc)
        assert validate(parsed)
