"""Reading field-tagged bibliographic exports.

The export format is the plain-text "field tagged" layout used by citation
indexes: every field starts with a two-letter tag in column 0, continuation
lines are indented, a record runs from ``PT`` to ``ER`` and the file ends
with ``EF``.  Cited references (``CR``) come one per line, e.g.::

    CR MARSHALL BJ, 1984, LANCET, V1, P1311
       HOGAN B, 1994, MANIPULATING MOUSE E
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from functools import total_ordering
from typing import IO, Iterable, Iterator

from cosigma.errors import EmptyFileError, MalformedRecordError, UnparseableRefError

logger = logging.getLogger(__name__)

ARTICLE = "Article"
REVIEW = "Review"
EDITORIAL = "Editorial"

SOURCE_MAX_LEN = 20

_TAG_RE = re.compile(r"^([A-Z][A-Z0-9])(?: (.*))?$")
_YEAR_RE = re.compile(r"^\d{4}$")
_VOLUME_RE = re.compile(r"^V(\S+)$")
_PAGE_RE = re.compile(r"^P(\S+)$")
_NOT_SOURCE_RE = re.compile(r"^(?:[VP]\d\S*|DOI\b.*)$")
_WS_RE = re.compile(r"\s+")

# header/footer tags that may appear outside of a PT..ER block
_FILE_TAGS = {"FN", "VR", "EF"}


def _clean(text: str) -> str:
    text = _WS_RE.sub(" ", text.upper()).strip()
    return text.rstrip(". ").rstrip()


def normalize_source(text: str) -> str:
    return _clean(_clean(text)[:SOURCE_MAX_LEN])


def normalize_doc_type(raw: str) -> str:
    """Map a ``DT`` value onto Article/Review/Editorial, else keep it verbatim."""
    head = raw.split(";")[0].strip()
    low = head.lower()
    if low == "article":
        return ARTICLE
    if low == "review":
        return REVIEW
    if low.startswith("editorial"):
        return EDITORIAL
    return head


@total_ordering
@dataclass(frozen=True)
class CitedRefKey:
    """Canonical identity of a cited reference; the node identity in networks."""

    first_author: str
    year: int | None
    source: str
    volume: str | None = None
    page: str | None = None

    @classmethod
    def make(cls, first_author: str, year: int | None, source: str,
             volume: str | None = None, page: str | None = None) -> "CitedRefKey":
        vol = _clean(volume) if volume else None
        pg = _clean(page) if page else None
        return cls(_clean(first_author), year, normalize_source(source), vol or None, pg or None)

    def sort_key(self) -> tuple:
        return (
            self.first_author,
            self.year if self.year is not None else 10**9,
            self.source,
            self.volume or "",
            self.page or "",
        )

    def __lt__(self, other: "CitedRefKey") -> bool:
        if not isinstance(other, CitedRefKey):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    @property
    def label(self) -> str:
        return format_cited_ref(self)

    def to_dict(self) -> dict:
        return {
            "first_author": self.first_author,
            "year": self.year,
            "source": self.source,
            "volume": self.volume,
            "page": self.page,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CitedRefKey":
        return cls(d["first_author"], d["year"], d["source"], d.get("volume"), d.get("page"))


def parse_cited_ref(raw: str) -> CitedRefKey:
    """Parse one ``CR`` line into a :class:`CitedRefKey`.

    Segments are positional: author, optional 4-digit year, source, then
    ``V``-prefixed volume and ``P``-prefixed page in any order.  DOI
    segments and anything unrecognised are ignored.
    """
    segments = [s.strip() for s in raw.split(",")]
    if not segments or not segments[0]:
        raise UnparseableRefError(f"no author segment in {raw!r}")
    author = segments[0]
    rest = segments[1:]
    year = None
    if rest and _YEAR_RE.match(rest[0]):
        year = int(rest[0])
        rest = rest[1:]
    source = ""
    if rest and rest[0] and not _NOT_SOURCE_RE.match(rest[0].upper()):
        source = rest[0]
        rest = rest[1:]
    volume = page = None
    for seg in rest:
        seg_u = seg.upper()
        if volume is None and (m := _VOLUME_RE.match(seg_u)):
            volume = m.group(1)
        elif page is None and (m := _PAGE_RE.match(seg_u)):
            page = m.group(1)
    key = CitedRefKey.make(author, year, source, volume, page)
    if not key.first_author:
        raise UnparseableRefError(f"empty author in {raw!r}")
    return key


def format_cited_ref(key: CitedRefKey) -> str:
    """Print a key as ``AUTHOR, YEAR, SOURCE, Vvol, Ppage`` (absent parts omitted)."""
    parts = [key.first_author]
    if key.year is not None:
        parts.append(str(key.year))
    if key.source:
        parts.append(key.source)
    if key.volume:
        parts.append("V" + key.volume)
    if key.page:
        parts.append("P" + key.page)
    return ", ".join(parts)


@dataclass(frozen=True)
class BibRecord:
    id: str
    authors: tuple[str, ...]
    year: int | None
    source: str
    doc_type: str
    cited_refs: tuple[CitedRefKey, ...]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "authors": list(self.authors),
            "year": self.year,
            "source": self.source,
            "doc_type": self.doc_type,
            "cited_refs": [k.to_dict() for k in self.cited_refs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BibRecord":
        return cls(
            id=d["id"],
            authors=tuple(d["authors"]),
            year=d["year"],
            source=d["source"],
            doc_type=d["doc_type"],
            cited_refs=tuple(CitedRefKey.from_dict(k) for k in d["cited_refs"]),
        )


@dataclass
class Corpus:
    """A list of records plus parse bookkeeping.

    ``issues`` and ``lost_refs`` record what the parser skipped; they are
    diagnostics and do not take part in equality.
    """

    records: list[BibRecord]
    issues: list[str] = field(default_factory=list, compare=False)
    lost_refs: int = field(default=0, compare=False)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[BibRecord]:
        return iter(self.records)

    @property
    def dated(self) -> list[BibRecord]:
        return [r for r in self.records if r.year is not None]

    @property
    def year_min(self) -> int | None:
        years = [r.year for r in self.dated]
        return min(years) if years else None

    @property
    def year_max(self) -> int | None:
        years = [r.year for r in self.dated]
        return max(years) if years else None

    def stats(self) -> dict:
        keys = {k for r in self.records for k in r.cited_refs}
        return {
            "records": len(self.records),
            "records_with_year": len(self.dated),
            "year_min": self.year_min,
            "year_max": self.year_max,
            "cited_ref_incidences": sum(len(r.cited_refs) for r in self.records),
            "unique_cited_refs": len(keys),
        }

    def dump_ndjson(self, fh: IO[str]) -> None:
        for rec in self.records:
            fh.write(json.dumps(rec.to_dict(), sort_keys=False, ensure_ascii=False))
            fh.write("\n")

    @classmethod
    def load_ndjson(cls, lines: Iterable[str]) -> "Corpus":
        return cls([BibRecord.from_dict(json.loads(line)) for line in lines if line.strip()])


def _decode(data: bytes | str) -> str:
    if isinstance(data, str):
        return data
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        text = data.decode("latin-1")
    return text.lstrip("﻿")


class _RecordBuilder:
    def __init__(self, start_line: int) -> None:
        self.start_line = start_line
        self.fields: dict[str, list[str]] = {}
        self.last_tag: str | None = None

    def add(self, tag: str, value: str) -> None:
        self.fields.setdefault(tag, []).append(value)
        self.last_tag = tag

    def build(self, index: int, corpus: Corpus) -> BibRecord:
        f = self.fields
        rec_id = (f.get("UT") or [""])[0].strip() or f"REC{index:06d}"
        py = " ".join(f.get("PY", [])).strip()
        year = int(py) if _YEAR_RE.match(py) else None
        refs: dict[CitedRefKey, None] = {}
        for raw in f.get("CR", []):
            try:
                refs.setdefault(parse_cited_ref(raw))
            except UnparseableRefError as exc:
                corpus.lost_refs += 1
                logger.debug("record %s: %s", rec_id, exc)
        return BibRecord(
            id=rec_id,
            authors=tuple(a.strip() for a in f.get("AU", []) if a.strip()),
            year=year,
            source=" ".join(s.strip() for s in f.get("SO", [])),
            doc_type=normalize_doc_type(" ".join(f.get("DT", [])).strip()),
            cited_refs=tuple(refs),
        )


def parse_export_file(data: bytes | str, format: str = "FieldTagged") -> Corpus:
    """Parse a field-tagged export into a :class:`Corpus`.

    Malformed blocks (a field before ``PT``, or a record that never reaches
    ``ER``) are skipped and described in ``corpus.issues``; parsing goes on.
    Raises :class:`EmptyFileError` when the file holds no records at all.
    """
    if format != "FieldTagged":
        raise ValueError(f"unsupported export format {format!r}")
    text = _decode(data)
    corpus = Corpus([])
    current: _RecordBuilder | None = None
    seen_block = False
    skipping = False
    seen_ids: set[str] = set()

    def fail(msg: str, line: int) -> None:
        err = MalformedRecordError(msg, line)
        corpus.issues.append(str(err))
        logger.warning("%s", err)

    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line[0] in " \t":
            if current is not None and current.last_tag is not None:
                current.add(current.last_tag, line.strip())
            continue
        m = _TAG_RE.match(line.rstrip())
        if m is None:
            if current is not None:
                fail(f"unrecognised line {line[:20]!r}", lineno)
                current, skipping = None, True
            continue
        tag, value = m.group(1), (m.group(2) or "").strip()
        if tag == "PT":
            seen_block = True
            if current is not None:
                fail(f"record starting at line {current.start_line} has no ER", lineno)
            current, skipping = _RecordBuilder(lineno), False
            current.add(tag, value)
        elif tag == "ER":
            if current is not None:
                rec = current.build(len(corpus.records) + 1, corpus)
                if rec.id in seen_ids:
                    rec = BibRecord(f"{rec.id}#{len(corpus.records) + 1}", *_tail(rec))
                seen_ids.add(rec.id)
                corpus.records.append(rec)
            elif not skipping:
                fail("ER without PT", lineno)
            current, skipping = None, False
        elif current is not None:
            current.add(tag, value)
        elif tag in _FILE_TAGS:
            continue
        elif not skipping:
            seen_block = True
            fail(f"tag {tag} before PT", lineno)
            skipping = True
    if current is not None:
        fail(f"record starting at line {current.start_line} has no ER", current.start_line)
    if not seen_block:
        raise EmptyFileError("export file contains no records")
    return corpus


def _tail(rec: BibRecord) -> tuple:
    return rec.authors, rec.year, rec.source, rec.doc_type, rec.cited_refs


def filter_corpus(corpus: Corpus, doc_types: Iterable[str] | None,
                  years: tuple[int, int] | None) -> Corpus:
    """Keep records whose type is in ``doc_types`` and whose year is in ``years``.

    ``None`` for either filter means "no restriction"; records without a
    year never pass a year filter.
    """
    if years is not None and years[0] > years[1]:
        raise ValueError(f"empty year range {years}")
    types = set(doc_types) if doc_types is not None else None
    kept = []
    for rec in corpus.records:
        if types is not None and rec.doc_type not in types:
            continue
        if years is not None and (rec.year is None or not years[0] <= rec.year <= years[1]):
            continue
        kept.append(rec)
    return Corpus(kept, list(corpus.issues), corpus.lost_refs)
