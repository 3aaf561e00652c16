"""Command-line driver: ingest, merge, query, report, serve.

Every command prints deterministic JSON to stdout and nothing else, so the
output can be piped and diffed. Domain errors are printed to stderr as
{"error": <code>, "detail": ...} with exit code 1; usage errors exit 2.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import crowd, queries, serialize
from .errors import DomainError
from .graph import merge as merge_maps
from .ingest import build_map, parse_deck_file
from .model import TopicMap, normalize_label


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2)


def _emit(obj) -> None:
    click.echo(_dump(obj))


def domain_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DomainError as exc:
            click.echo(
                json.dumps(
                    {"error": exc.code, "detail": str(exc)},
                    ensure_ascii=False,
                    sort_keys=True,
                ),
                err=True,
            )
            sys.exit(1)

    return wrapper


def _load_map(path: str) -> TopicMap:
    return serialize.load(path)


def _summary(topic_map: TopicMap) -> dict:
    return {
        "map_id": topic_map.map_id,
        "topics": len(topic_map.topics),
        "occurrences": len(topic_map.occurrences),
        "associations": len(topic_map.associations),
        "scopes": len(topic_map.scopes),
        "decks": list(topic_map.deck_ids()),
    }


@click.group()
@click.version_option(package_name="lecturemap")
def main() -> None:
    """Turn linear slide decks into topic maps and run live lecture sessions."""


@main.command()
@click.argument("deck", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out", required=True, type=click.Path(dir_okay=False))
@domain_errors
def ingest(deck: str, out: str) -> None:
    """Parse an annotated deck file and write the derived topic map."""
    topic_map = build_map(parse_deck_file(deck))
    serialize.save(topic_map, out)
    _emit(_summary(topic_map))


@main.command()
@click.argument("first", type=click.Path(exists=True, dir_okay=False))
@click.argument("second", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out", required=True, type=click.Path(dir_okay=False))
@click.option("--map-id", default=None, help="identifier for the merged map")
@domain_errors
def merge(first: str, second: str, out: str, map_id: str | None) -> None:
    """Merge two topic map files by subject identifier."""
    merged = merge_maps(_load_map(first), _load_map(second), map_id=map_id)
    serialize.save(merged, out)
    _emit(_summary(merged))


@main.group()
def query() -> None:
    """Read-only queries against a topic map file."""


@query.command()
@click.option("--map", "map_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--slide", required=True, help="deck/slide key or unique slide id")
@domain_errors
def assistance(map_path: str, slide: str) -> None:
    """Auxiliary slides for a slide, most helpful first."""
    topic_map = _load_map(map_path)
    ref = queries.resolve_slide(topic_map, slide)
    _emit(
        [
            {
                "deck": entry.ref.deck_id,
                "slide": entry.ref.slide_id,
                "reason": entry.reason,
                "depth": entry.depth,
            }
            for entry in queries.assistance(topic_map, ref)
        ]
    )


@query.command()
@click.option("--map", "map_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--topic", required=True)
@domain_errors
def closure(map_path: str, topic: str) -> None:
    """Transitive prerequisite topics with their depths."""
    pairs = queries.preliminary_closure(_load_map(map_path), normalize_label(topic))
    _emit([[tid, depth] for tid, depth in pairs])


@query.command()
@click.option("--map", "map_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--topic", required=True)
@click.option("--max-len", default=4, show_default=True, type=click.IntRange(min=1))
@domain_errors
def paths(map_path: str, topic: str, max_len: int) -> None:
    """Simple labeled paths that approach a topic."""
    found, truncated = queries.approaching_paths(
        _load_map(map_path), normalize_label(topic), max_len
    )
    _emit(
        {
            "paths": [
                {"topics": list(p.topics), "edges": list(p.edge_types)} for p in found
            ],
            "truncated": truncated,
        }
    )


@main.command()
@click.option("--map", "map_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--deck", required=True)
@domain_errors
def corridor(map_path: str, deck: str) -> None:
    """The preserved linear slide order of a deck."""
    _emit(
        [
            {
                "deck": entry.ref.deck_id,
                "slide": entry.ref.slide_id,
                "ordinal": entry.ordinal,
                "anchors": list(entry.anchors),
                "class": entry.cls.value,
                "title": entry.title,
            }
            for entry in queries.corridor(_load_map(map_path), deck)
        ]
    )


@main.command()
@click.option("--map", "map_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--log", "log_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--quorum", default=crowd.DEFAULT_QUORUM, show_default=True, type=click.IntRange(min=1))
@click.option("--threshold", default=crowd.DEFAULT_THRESHOLD, show_default=True, type=float)
@click.option(
    "--figures",
    default=None,
    type=click.Path(file_okay=False),
    help="also render report figures (PNG) into this directory",
)
@domain_errors
def report(map_path: str, log_path: str, quorum: int, threshold: float, figures: str | None) -> None:
    """Consensus comprehension report from an annotation log."""
    doc = crowd.comprehension_report(
        crowd.read_log(log_path), _load_map(map_path), quorum=quorum, threshold=threshold
    ).to_doc()
    if figures is not None:
        from .plots import render_report_figures

        doc["figures"] = [str(p) for p in render_report_figures(doc, figures)]
    _emit(doc)


@main.command()
@click.option("--map", "map_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--log", "log_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--slide", default=None, help="score one slide instead of the whole session")
@domain_errors
def mindset(map_path: str, log_path: str, slide: str | None) -> None:
    """Similarity between lecturer topics and audience tags."""
    topic_map = _load_map(map_path)
    log = crowd.read_log(log_path)
    if slide is None:
        _emit({"scope": "whole_session", "score": crowd.mindset_correlation(log, topic_map)})
    else:
        ref = queries.resolve_slide(topic_map, slide)
        _emit(
            {
                "scope": "slide",
                "slide": ref.key,
                "score": crowd.mindset_correlation(log, topic_map, ref),
            }
        )


@main.command()
@click.option("--map", "map_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--log", "log_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--min-support", default=crowd.DEFAULT_MIN_SUPPORT, show_default=True, type=click.IntRange(min=1)
)
@domain_errors
def discussion(map_path: str, log_path: str, min_support: int) -> None:
    """Crowd-tagged discussion topics as a map delta."""
    delta = crowd.discussion_topics(crowd.read_log(log_path), _load_map(map_path), min_support)
    _emit(delta.to_doc())


@main.command()
@click.option("--port", default=8023, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--data",
    "data_dir",
    default="data",
    show_default=True,
    type=click.Path(file_okay=False),
)
def serve(port: int, host: str, data_dir: str) -> None:
    """Run the live session service."""
    import uvicorn

    from .service import create_app

    Path(data_dir).mkdir(parents=True, exist_ok=True)
    uvicorn.run(create_app(data_dir), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
