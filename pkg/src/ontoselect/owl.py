"""Streaming extraction of annotation texts from OWL/XML ontology files.

Ontology class specifications carry human-readable annotations (labels,
comments, definitions) in tagged elements; each non-empty annotation
occurrence becomes one labeled sample.  Multiple annotations of one class
stay separate samples.  Parsing is event-based (expat) so large ontology
files never need a whole DOM in memory, and namespace prefixes are
resolved manually: files bind prefixes inconsistently, so a tag entry
whose prefix cannot be resolved falls back to local-name matching.
"""

import io
import json
import warnings
from dataclasses import dataclass
from importlib import resources
from xml.parsers import expat

from .errors import EmptyExtractionWarning, FormatError, OwlParseError
from .serialize import record_id as _record_id
from .serialize import read_ndjson, write_ndjson

# Prefixes that resolve to a fixed namespace; tag entries using any other
# prefix (or none) match elements by local name.
WELL_KNOWN_PREFIXES = {
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "owl": "http://www.w3.org/2002/07/owl#",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
    "skos": "http://www.w3.org/2004/02/skos/core#",
    "obo": "http://purl.obolibrary.org/obo/",
    "oboInOwl": "http://www.geneontology.org/formats/oboInOwl#",
    "dc": "http://purl.org/dc/elements/1.1/",
    "dcterms": "http://purl.org/dc/terms/",
}

_RDF_NS = WELL_KNOWN_PREFIXES["rdf"]
_OWL_NS = WELL_KNOWN_PREFIXES["owl"]

DOCUMENT_SCOPE = "(document)"

DEFAULT_MIN_LENGTH = 3


@dataclass(frozen=True)
class TagSet:
    """Qualified element names whose text content is an annotation."""

    ontology: str
    tags: tuple

    def __post_init__(self):
        if not self.ontology:
            raise ValueError("ontology name must be non-empty")
        if not self.tags:
            raise ValueError(f"tag set for {self.ontology!r} must name at least one tag")
        if len(set(self.tags)) != len(self.tags):
            raise ValueError(f"tag set for {self.ontology!r} has duplicate tags")


@dataclass(frozen=True)
class AnnotationRecord:
    """One annotation occurrence labeled with its source ontology."""

    ontology: str
    class_iri: str
    tag: str
    text: str
    record_id: str

    @classmethod
    def make(cls, ontology, class_iri, tag, text):
        return cls(
            ontology=ontology,
            class_iri=class_iri,
            tag=tag,
            text=text,
            record_id=_record_id(ontology, class_iri, tag, text),
        )


def _split_qname(name):
    if ":" in name:
        prefix, local = name.split(":", 1)
        return prefix, local
    return None, name


def normalize_whitespace(text):
    return " ".join(text.split())


class _Extractor:
    """expat handler state for one document."""

    def __init__(self, tag_set, min_length):
        self.records = []
        self.min_length = min_length
        self.ontology = tag_set.ontology
        # tag entry -> (prefix, local); preserve entry order for matching
        self.entries = [(t, *_split_qname(t)) for t in tag_set.tags]
        self.scope = [DOCUMENT_SCOPE]
        self.ns_frames = []      # per-element: dict of new bindings or None
        self.captures = []       # (depth, entry_name, class_iri, [chunks])
        self.depth = 0

    # -- namespace resolution over the live element stack ----------------
    def _bind(self, attrs):
        frame = None
        for key, value in attrs.items():
            if key == "xmlns":
                frame = frame or {}
                frame[None] = value
            elif key.startswith("xmlns:"):
                frame = frame or {}
                frame[key[6:]] = value
        self.ns_frames.append(frame)
        return frame

    def _resolve(self, prefix):
        for frame in reversed(self.ns_frames):
            if frame and prefix in frame:
                return frame[prefix]
        return None

    def _matches(self, prefix, local, uri):
        for entry_name, e_prefix, e_local in self.entries:
            if e_local != local:
                continue
            if e_prefix is None:
                return entry_name
            e_uri = WELL_KNOWN_PREFIXES.get(e_prefix)
            if e_uri is None or uri is None:
                # unresolvable on either side: local-name fallback
                return entry_name
            if uri == e_uri:
                return entry_name
        return None

    def _attr(self, attrs, wanted_local):
        for key, value in attrs.items():
            prefix, local = _split_qname(key)
            if local != wanted_local:
                continue
            if prefix is None or prefix == "rdf" or self._resolve(prefix) == _RDF_NS:
                return value
        return None

    def _declared_class_iri(self, prefix, local, uri, attrs):
        if local == "Class":
            is_class = uri == _OWL_NS or (uri is None and prefix == "owl")
        elif local == "Description":
            is_class = uri == _RDF_NS or (uri is None and prefix == "rdf")
        else:
            return None
        if not is_class:
            return None
        about = self._attr(attrs, "about")
        if about is not None:
            return about
        ident = self._attr(attrs, "ID")
        if ident is not None:
            return "#" + ident
        return None

    # -- expat handler entry points ---------------------------------------
    def start(self, name, attrs):
        self.depth += 1
        self._bind(attrs)
        prefix, local = _split_qname(name)
        uri = self._resolve(prefix)
        declared = self._declared_class_iri(prefix, local, uri, attrs)
        self.scope.append(declared if declared is not None else self.scope[-1])
        entry = self._matches(prefix, local, uri)
        if entry is not None:
            self.captures.append((self.depth, entry, self.scope[-1], []))

    def chars(self, data):
        for capture in self.captures:
            capture[3].append(data)

    def end(self, name):
        if self.captures and self.captures[-1][0] == self.depth:
            _, entry, class_iri, chunks = self.captures.pop()
            text = normalize_whitespace("".join(chunks))
            if len(text) >= self.min_length:
                self.records.append(
                    AnnotationRecord.make(self.ontology, class_iri, entry, text)
                )
        self.scope.pop()
        self.ns_frames.pop()
        self.depth -= 1


def extract_annotations(source, tag_set, min_length=DEFAULT_MIN_LENGTH):
    """Extract annotation records from an OWL/XML document.

    source: a path, a binary file object, or bytes.  Returns records in
    document order; emits EmptyExtractionWarning when nothing matched.
    Raises OwlParseError (with byte offset) on malformed XML.
    """
    if isinstance(source, (str, bytes)) and not isinstance(source, bytes):
        with open(source, "rb") as fh:
            return extract_annotations(fh, tag_set, min_length)
    if isinstance(source, bytes):
        return extract_annotations(io.BytesIO(source), tag_set, min_length)

    state = _Extractor(tag_set, min_length)
    parser = expat.ParserCreate()
    parser.buffer_text = True
    parser.StartElementHandler = state.start
    parser.EndElementHandler = state.end
    parser.CharacterDataHandler = state.chars
    try:
        while True:
            chunk = source.read(1 << 16)
            if not chunk:
                parser.Parse(b"", True)
                break
            parser.Parse(chunk, False)
    except expat.ExpatError as exc:
        raise OwlParseError(
            f"malformed XML at byte {parser.ErrorByteIndex} "
            f"(line {parser.ErrorLineNumber}, column {parser.ErrorColumnNumber}): "
            f"{expat.errors.messages[parser.ErrorCode]}",
            byte_offset=parser.ErrorByteIndex,
            line=parser.ErrorLineNumber,
            column=parser.ErrorColumnNumber,
        ) from exc
    if not state.records:
        warnings.warn(
            f"empty extraction: no annotations matched tags {tag_set.tags} "
            f"for ontology {tag_set.ontology}",
            EmptyExtractionWarning,
            stacklevel=2,
        )
    return state.records


def count_classes(records):
    """Distinct class_iri count per ontology."""
    seen = {}
    for rec in records:
        seen.setdefault(rec.ontology, set()).add(rec.class_iri)
    return {ontology: len(iris) for ontology, iris in seen.items()}


# -- tag-set configuration -------------------------------------------------

def default_tag_sets():
    """Built-in per-ontology tag sets (package data)."""
    raw = resources.files("ontoselect").joinpath("data/default_tagsets.json")
    return _parse_tag_sets(json.loads(raw.read_text(encoding="utf-8")))


def load_tag_sets(path):
    with open(path, "r", encoding="utf-8") as fh:
        return _parse_tag_sets(json.load(fh))


def _parse_tag_sets(mapping):
    if not isinstance(mapping, dict):
        raise FormatError("tag-set file must map ontology name -> tag list")
    out = {}
    for ontology, tags in mapping.items():
        if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
            raise FormatError(f"tags for {ontology!r} must be a list of strings")
        out[ontology] = TagSet(ontology=ontology, tags=tuple(tags))
    return out


# -- record persistence ----------------------------------------------------

ANNOTATIONS_ARTIFACT = "annotations"


def write_records(path, records, command=None, inputs=None):
    write_ndjson(
        path,
        ANNOTATIONS_ARTIFACT,
        (
            {
                "record_id": r.record_id,
                "ontology": r.ontology,
                "class_iri": r.class_iri,
                "tag": r.tag,
                "text": r.text,
            }
            for r in records
        ),
        command=command,
        inputs=inputs,
    )


def read_records(path):
    out = []
    for obj in read_ndjson(path, ANNOTATIONS_ARTIFACT):
        rec = AnnotationRecord(
            ontology=obj["ontology"],
            class_iri=obj["class_iri"],
            tag=obj["tag"],
            text=obj["text"],
            record_id=obj["record_id"],
        )
        out.append(rec)
    return out
