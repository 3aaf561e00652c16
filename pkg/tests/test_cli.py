import json

import pytest
from click.testing import CliRunner

from lecturemap import build_map, merge, parse_deck_file, serialize
from lecturemap.cli import main
from lecturemap.crowd import make_note, make_rating, write_log
from lecturemap.model import SlideRef

S4 = SlideRef("algo101", "s4")


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def algo_map_file(tmp_path, algo_deck_path, runner):
    out = tmp_path / "algo.map.json"
    result = runner.invoke(main, ["ingest", str(algo_deck_path), "-o", str(out)])
    assert result.exit_code == 0, result.output
    return out


@pytest.fixture()
def log_file(tmp_path, algo_map):
    log = []
    for who, cls in (("p1", "clear"), ("p2", "lost"), ("p3", "lost")):
        log.append(make_rating(who, S4, cls, 0))
    for who in ("p1", "p2"):
        log.append(make_note(who, SlideRef("algo101", "s5"), "", ["recursion"], [], 1))
    path = tmp_path / "session.jsonl"
    write_log(log, path)
    return path


class TestIngest:
    def test_summary_and_bytes(self, runner, tmp_path, algo_deck_path):
        outs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            result = runner.invoke(main, ["ingest", str(algo_deck_path), "-o", str(out)])
            assert result.exit_code == 0
            assert json.loads(result.output) == {
                "map_id": "algo101",
                "topics": 2,
                "occurrences": 7,
                "associations": 3,
                "scopes": 1,
                "decks": ["algo101"],
            }
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        expected = serialize.dumps(build_map(parse_deck_file(algo_deck_path)))
        assert outs[0] == expected.encode("utf-8")

    def test_parse_error_exits_1_with_json_stderr(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"deck_id": "d", "slides": [', encoding="utf-8")
        result = runner.invoke(main, ["ingest", str(bad), "-o", str(tmp_path / "o.json")])
        assert result.exit_code == 1
        err = json.loads(result.stderr)
        assert err["error"] == "MalformedDocument"
        assert result.stdout == ""

    def test_usage_error_exits_2(self, runner, algo_deck_path):
        result = runner.invoke(main, ["ingest", str(algo_deck_path)])
        assert result.exit_code == 2


class TestMerge:
    def test_matches_library_merge(self, runner, tmp_path, algo_map_file, seminar_deck_path):
        seminar_file = tmp_path / "seminar.map.json"
        runner.invoke(main, ["ingest", str(seminar_deck_path), "-o", str(seminar_file)])
        out = tmp_path / "merged.json"
        result = runner.invoke(
            main, ["merge", str(algo_map_file), str(seminar_file), "-o", str(out)]
        )
        assert result.exit_code == 0
        assert json.loads(result.output)["map_id"] == "algo101+seminar42"
        expected = merge(serialize.load(algo_map_file), serialize.load(seminar_file))
        assert out.read_bytes() == serialize.dumps(expected).encode("utf-8")

    def test_deck_collision_exits_1(self, runner, tmp_path, algo_map_file):
        result = runner.invoke(
            main, ["merge", str(algo_map_file), str(algo_map_file), "-o", str(tmp_path / "x")]
        )
        assert result.exit_code == 1
        assert json.loads(result.stderr)["error"] == "DeckCollision"


class TestQueries:
    def test_closure(self, runner, algo_map_file):
        result = runner.invoke(main, ["query", "closure", "--map", str(algo_map_file), "--topic", "Trees"])
        assert result.exit_code == 0
        assert json.loads(result.output) == [["graphs", 1]]

    def test_closure_unknown_topic(self, runner, algo_map_file):
        result = runner.invoke(main, ["query", "closure", "--map", str(algo_map_file), "--topic", "ghost"])
        assert result.exit_code == 1
        assert json.loads(result.stderr)["error"] == "UnknownTopic"

    def test_assistance(self, runner, algo_map_file):
        result = runner.invoke(
            main, ["query", "assistance", "--map", str(algo_map_file), "--slide", "s4"]
        )
        assert json.loads(result.output) == [
            {"deck": "algo101", "slide": "x1", "reason": "same_subject", "depth": None},
            {"deck": "algo101", "slide": "s2", "reason": "preliminary", "depth": 1},
            {"deck": "algo101", "slide": "s3", "reason": "preliminary", "depth": 1},
        ]

    def test_paths(self, runner, algo_map_file):
        result = runner.invoke(
            main, ["query", "paths", "--map", str(algo_map_file), "--topic", "trees", "--max-len", "2"]
        )
        doc = json.loads(result.output)
        assert doc["truncated"] is False
        assert {tuple(p["edges"]) for p in doc["paths"]} == {
            ("temporal_continuity",),
            ("preliminary_knowledge",),
        }

    def test_corridor(self, runner, algo_map_file):
        result = runner.invoke(main, ["corridor", "--map", str(algo_map_file), "--deck", "algo101"])
        rows = json.loads(result.output)
        assert [r["slide"] for r in rows] == ["s1", "s2", "s3", "s4", "s5", "s6"]
        assert rows[0] == {
            "deck": "algo101",
            "slide": "s1",
            "ordinal": 1,
            "anchors": ["graphs"],
            "class": "new_topic",
            "title": "Graphs",
        }

    def test_unknown_deck(self, runner, algo_map_file):
        result = runner.invoke(main, ["corridor", "--map", str(algo_map_file), "--deck", "zzz"])
        assert result.exit_code == 1
        assert json.loads(result.stderr)["error"] == "UnknownDeck"


class TestReport:
    def test_matches_library(self, runner, algo_map_file, log_file, algo_map):
        from lecturemap.crowd import comprehension_report, read_log

        result = runner.invoke(
            main, ["report", "--map", str(algo_map_file), "--log", str(log_file)]
        )
        assert result.exit_code == 0
        assert json.loads(result.output) == comprehension_report(read_log(log_file), algo_map).to_doc()
        assert json.loads(result.output)["flagged"] == ["algo101/s4"]

    def test_quorum_option(self, runner, algo_map_file, log_file):
        result = runner.invoke(
            main,
            ["report", "--map", str(algo_map_file), "--log", str(log_file), "--quorum", "4"],
        )
        assert json.loads(result.output)["flagged"] == []

    def test_figures_rendered(self, runner, tmp_path, algo_map_file, log_file):
        figures_dir = tmp_path / "figs"
        result = runner.invoke(
            main,
            [
                "report",
                "--map",
                str(algo_map_file),
                "--log",
                str(log_file),
                "--figures",
                str(figures_dir),
            ],
        )
        assert result.exit_code == 0, result.output
        doc = json.loads(result.output)
        assert sorted(p.rsplit("/", 1)[-1] for p in doc["figures"]) == [
            "comprehension.png",
            "totals.png",
        ]
        for name in ("comprehension.png", "totals.png"):
            data = (figures_dir / name).read_bytes()
            assert data[:8] == b"\x89PNG\r\n\x1a\n"


class TestMindsetAndDiscussion:
    def test_mindset_whole_session(self, runner, algo_map_file, log_file):
        result = runner.invoke(main, ["mindset", "--map", str(algo_map_file), "--log", str(log_file)])
        doc = json.loads(result.output)
        # lecturer {graphs, trees} vs tags {recursion} -> 0/3
        assert doc == {"scope": "whole_session", "score": 0.0}

    def test_mindset_slide_scope(self, runner, algo_map_file, log_file):
        result = runner.invoke(
            main, ["mindset", "--map", str(algo_map_file), "--log", str(log_file), "--slide", "s5"]
        )
        doc = json.loads(result.output)
        assert doc["scope"] == "slide" and doc["slide"] == "algo101/s5"
        assert doc["score"] == pytest.approx(0.0)

    def test_discussion(self, runner, algo_map_file, log_file):
        result = runner.invoke(main, ["discussion", "--map", str(algo_map_file), "--log", str(log_file)])
        doc = json.loads(result.output)
        assert doc["min_support"] == 2
        assert [t["topic"] for t in doc["topics"]] == ["recursion"]

    def test_discussion_min_support_option(self, runner, algo_map_file, log_file):
        result = runner.invoke(
            main,
            ["discussion", "--map", str(algo_map_file), "--log", str(log_file), "--min-support", "3"],
        )
        assert json.loads(result.output)["topics"] == []
