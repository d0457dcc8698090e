"""Turn pre-extracted document text into filtered paragraphs.

Input is plain text with blank-line paragraph separation and optional
"# " heading markers (or a pre-split paragraph record file); PDF-to-text
conversion happens upstream and is out of scope here.  Filtering drops
headings, paragraphs shorter than the minimum length, and everything
under banned section headings (references, acknowledgements, ...).
"""

import re
from dataclasses import dataclass, field

from .serialize import read_ndjson, write_ndjson

PARAGRAPHS_ARTIFACT = "paragraphs"

_TERMINAL_PUNCTUATION = (".", "!", "?")
_HEADING_MAX_CHARS = 120

DEFAULT_BANNED_SECTIONS = frozenset(
    {"references", "bibliography", "acknowledgement", "acknowledgements"}
)


@dataclass(frozen=True)
class Paragraph:
    doc_id: str
    index: int
    kind: str          # "body" | "heading"
    text: str
    char_len: int

    @classmethod
    def make(cls, doc_id, index, kind, text):
        return cls(doc_id=doc_id, index=index, kind=kind, text=text, char_len=len(text))


@dataclass(frozen=True)
class FilterPolicy:
    """Which paragraphs survive; char_len counts all characters after
    whitespace normalization, and the length boundary is inclusive-keep."""

    min_length: int = 100
    banned_sections: frozenset = field(default_factory=lambda: DEFAULT_BANNED_SECTIONS)
    drop_headings: bool = True

    def __post_init__(self):
        if self.min_length < 1:
            raise ValueError("min_length must be >= 1")


def _normalize(block):
    return " ".join(block.split())


def _is_heading(block):
    """Single short line without terminal sentence punctuation."""
    if "\n" in block.strip():
        return False
    text = _normalize(block)
    return 0 < len(text) <= _HEADING_MAX_CHARS and not text.endswith(_TERMINAL_PUNCTUATION)


def split_paragraphs(document_text, doc_id):
    """Split text into Paragraphs: maximal blocks separated by blank lines.

    A block is a heading iff it starts with the "# " structural marker or
    is a single line of <= 120 characters without terminal punctuation.
    """
    paragraphs = []
    for block in re.split(r"\n\s*\n", document_text):
        stripped = block.strip()
        if not stripped:
            continue
        if stripped.startswith("# "):
            kind, text = "heading", _normalize(stripped[2:])
            if not text:
                continue
        elif _is_heading(block):
            kind, text = "heading", _normalize(block)
        else:
            kind, text = "body", _normalize(block)
        paragraphs.append(Paragraph.make(doc_id, len(paragraphs), kind, text))
    return paragraphs


def _normalized_heading(text):
    return re.sub(r"^[\W\d_]+|[\W\d_]+$", "", text).lower()


def filter_paragraphs(paragraphs, policy=FilterPolicy()):
    """Apply the filter policy; output is an order-preserving subsequence.

    Body paragraphs between a banned-section heading and the next heading
    (or end of document) are dropped regardless of length.
    """
    kept = []
    in_banned_section = False
    for para in paragraphs:
        if para.kind == "heading":
            in_banned_section = _normalized_heading(para.text) in policy.banned_sections
            if not policy.drop_headings:
                kept.append(para)
            continue
        if in_banned_section:
            continue
        if para.char_len >= policy.min_length:
            kept.append(para)
    return kept


def write_paragraphs(path, paragraphs, command=None, inputs=None):
    write_ndjson(
        path,
        PARAGRAPHS_ARTIFACT,
        (
            {
                "doc_id": p.doc_id,
                "index": p.index,
                "kind": p.kind,
                "text": p.text,
                "char_len": p.char_len,
            }
            for p in paragraphs
        ),
        command=command,
        inputs=inputs,
    )


def read_paragraphs(path):
    return [
        Paragraph(
            doc_id=obj["doc_id"],
            index=obj["index"],
            kind=obj["kind"],
            text=obj["text"],
            char_len=obj["char_len"],
        )
        for obj in read_ndjson(path, PARAGRAPHS_ARTIFACT)
    ]
