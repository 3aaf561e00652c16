"""lecturemap: topic map networks from linear slide decks, plus live
lecture sessions with audience feedback aggregation."""

from .errors import DomainError
from .graph import infer_scopes, merge, merged_map_id
from .ingest import AnnotatedDeck, build_map, derive_temporal, parse_deck, parse_deck_file
from .model import (
    Association,
    AssociationType,
    Occurrence,
    OccurrenceClass,
    Scope,
    SlideRef,
    Topic,
    TopicMap,
    empty_map,
    normalize_label,
    validate,
)
from .queries import (
    approaching_paths,
    assistance,
    corridor,
    preliminary_closure,
    resolve_slide,
)
from .serialize import dumps, from_doc, load, loads, save, to_doc

__version__ = "0.1.0"

__all__ = [
    "AnnotatedDeck",
    "Association",
    "AssociationType",
    "DomainError",
    "Occurrence",
    "OccurrenceClass",
    "Scope",
    "SlideRef",
    "Topic",
    "TopicMap",
    "approaching_paths",
    "assistance",
    "build_map",
    "corridor",
    "derive_temporal",
    "dumps",
    "empty_map",
    "from_doc",
    "infer_scopes",
    "load",
    "loads",
    "merge",
    "merged_map_id",
    "normalize_label",
    "parse_deck",
    "parse_deck_file",
    "preliminary_closure",
    "resolve_slide",
    "save",
    "to_doc",
    "validate",
]
