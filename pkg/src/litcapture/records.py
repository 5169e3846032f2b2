"""Bibliographic export parsing and article identity.

Two records describe the same article when their titles match after
normalisation and they have the same set of author family names. Export
formats render names inconsistently (``"S. Fortunato"`` vs
``"Fortunato, S."``) so only family names take part in the comparison.

Supported inputs:

* CSV with header ``title,authors,year[,venue]``; authors ``;``-separated.
* RIS (``TY`` ... ``ER`` blocks; ``TI``/``T1``, ``AU``/``A1``, ``PY``/``Y1``,
  ``JO``/``T2``/``JF``).
* BibTeX (``title``, ``author`` joined with ``and``, ``year``, ``journal`` or
  ``booktitle``).
"""

import csv
from dataclasses import dataclass, field
from enum import Enum
import io
import re
import unicodedata

from .exceptions import EmptyTitle, InvalidParams, ParseError, UnsupportedFormat


class ExportFormat(str, Enum):
    CSV = "csv"
    RIS = "ris"
    BIBTEX = "bibtex"

    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"bib": "bibtex", "txt": "ris"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise UnsupportedFormat(f"unsupported export format {value!r}") from None


@dataclass(frozen=True)
class ArticleRecord:
    title: str
    authors: tuple = ()
    year: int = None
    venue: str = None
    rank: int = 1
    source_label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "authors", tuple(self.authors))
        if self.rank < 1:
            raise InvalidParams(f"rank must be >= 1, got {self.rank}")


@dataclass(frozen=True)
class DedupKey:
    normalized_title: str
    normalized_authors: frozenset = field(default_factory=frozenset)

    def render(self):
        return f"{self.normalized_title} | {'; '.join(sorted(self.normalized_authors))}"


@dataclass(frozen=True)
class RankedList:
    entries: tuple
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        ranks = [e.rank for e in self.entries]
        if any(b <= a for a, b in zip(ranks, ranks[1:])):
            raise InvalidParams("entries must have strictly increasing ranks")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @classmethod
    def from_records(cls, records, label=""):
        """Build a list from records in result order, re-ranking 1..n."""
        entries = []
        for i, rec in enumerate(records, start=1):
            if isinstance(rec, ArticleRecord):
                entries.append(
                    ArticleRecord(rec.title, rec.authors, rec.year, rec.venue, i, label)
                )
            else:
                title, authors = rec[0], rec[1]
                entries.append(ArticleRecord(title, tuple(authors), rank=i, source_label=label))
        return cls(tuple(entries), label)


_NON_ALNUM = re.compile(r"[^\w\s]|_", re.UNICODE)
_SPACES = re.compile(r"\s+")
_LATEX_CMD = re.compile(r"\\[A-Za-z]+\s*|\\.")


def _fold(text):
    text = _LATEX_CMD.sub("", text)
    text = unicodedata.normalize("NFKD", text)
    text = "".join(ch for ch in text if not unicodedata.combining(ch))
    return text.casefold()


def normalize_title(title):
    text = _NON_ALNUM.sub(" ", _fold(title))
    return _SPACES.sub(" ", text).strip()


def _is_initial(token):
    bare = token.replace(".", "").replace("-", "")
    return len(bare) <= 1 or (token.endswith(".") and len(bare) <= 2)


def family_name(author):
    """Reduce one author string to a lowercase family-name token.

    ``"Fortunato, S."``, ``"S. Fortunato"`` and ``"Fortunato S"`` all map to
    ``"fortunato"``. Multi-word family names are joined without spaces so the
    result is stable under re-normalisation.
    """
    author = author.strip()
    if "," in author:
        family = author.split(",", 1)[0]
    else:
        tokens = author.split()
        if not tokens:
            return ""
        kept = [t for t in tokens if not _is_initial(t)] or tokens
        family = kept[-1]
    return "".join(normalize_title(family).split())


def normalize_key(record):
    """Identity key used for deduplication.

    Raises
    ------
    EmptyTitle
        If nothing alphanumeric survives title normalisation.
    """
    title = normalize_title(record.title or "")
    if not title:
        raise EmptyTitle(f"title {record.title!r} is empty after normalization")
    authors = frozenset(f for f in (family_name(a) for a in record.authors) if f)
    return DedupKey(title, authors)


def dedup_prefix(ranked, n):
    """Unique keys among the first ``n`` entries, in first-seen order."""
    if n < 1:
        raise InvalidParams(f"n must be >= 1, got {n}")
    seen = set()
    keys = []
    for rec in ranked.entries[:n]:
        key = normalize_key(rec)
        if key not in seen:
            seen.add(key)
            keys.append(key)
    return keys


def _parse_year(raw, record, line=None):
    raw = (raw or "").strip()
    if not raw:
        return None
    match = re.match(r"^\s*(\d{4})", raw)
    if not match:
        raise ParseError(f"unparseable year {raw!r}", record=record, line=line)
    return int(match.group(1))


def _decode(content):
    if isinstance(content, str):
        return content.lstrip("\ufeff")
    try:
        return bytes(content).decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ParseError(f"content is not valid UTF-8 ({exc.reason} at byte {exc.start})") from None


def _split_authors(raw):
    return tuple(a.strip() for a in raw.split(";") if a.strip())


def _parse_csv(text, label):
    reader = csv.DictReader(io.StringIO(text, newline=""))
    header = [h.strip().lower() for h in (reader.fieldnames or [])]
    missing = {"title", "authors", "year"} - set(header)
    if missing:
        raise ParseError(f"CSV header lacks column(s): {', '.join(sorted(missing))}", line=1)
    reader.fieldnames = header
    out = []
    for index, row in enumerate(reader, start=1):
        if None in row:
            raise ParseError("row has more fields than the header", record=index, line=reader.line_num)
        if all(v is None or not v.strip() for v in row.values()):
            continue
        title = (row.get("title") or "").strip()
        if not title:
            raise ParseError("missing title", record=index, line=reader.line_num)
        out.append(
            ArticleRecord(
                title=title,
                authors=_split_authors(row.get("authors") or ""),
                year=_parse_year(row.get("year"), index, reader.line_num),
                venue=(row.get("venue") or "").strip() or None,
                rank=len(out) + 1,
                source_label=label,
            )
        )
    return out


_RIS_LINE = re.compile(r"^([A-Z][A-Z0-9])  -(?: (.*))?$")
_RIS_TITLE = ("TI", "T1")
_RIS_AUTHOR = ("AU", "A1")
_RIS_YEAR = ("PY", "Y1", "DA")
_RIS_VENUE = ("JO", "JF", "T2", "JA")


def _parse_ris(text, label):
    out = []
    block = None
    block_start = 0
    index = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line.strip():
            continue
        m = _RIS_LINE.match(line)
        if not m:
            if block is not None and block.get("_last"):
                # continuation of a wrapped value
                tag = block["_last"]
                block[tag][-1] = block[tag][-1] + " " + line.strip()
                continue
            raise ParseError(f"malformed RIS line {line!r}", record=index + (block is not None), line=lineno)
        tag, value = m.group(1), (m.group(2) or "").strip()
        if tag == "TY":
            if block is not None:
                raise ParseError("TY before ER: previous record not terminated", record=index + 1, line=lineno)
            index += 1
            block = {"_last": None}
            block_start = lineno
            continue
        if block is None:
            raise ParseError(f"tag {tag} outside a TY..ER record", record=index + 1, line=lineno)
        if tag == "ER":
            out.append(_ris_record(block, index, block_start, len(out) + 1, label))
            block = None
            continue
        block.setdefault(tag, []).append(value)
        block["_last"] = tag
    if block is not None:
        raise ParseError("record not terminated by ER", record=index, line=block_start)
    return out


def _ris_record(block, index, line, rank, label):
    def first(tags):
        for t in tags:
            if block.get(t):
                return block[t][0]
        return None

    title = first(_RIS_TITLE)
    if not title:
        raise ParseError("missing TI/T1 title", record=index, line=line)
    authors = tuple(a for t in _RIS_AUTHOR for a in block.get(t, []) if a)
    return ArticleRecord(
        title=title,
        authors=authors,
        year=_parse_year(first(_RIS_YEAR), index, line),
        venue=first(_RIS_VENUE),
        rank=rank,
        source_label=label,
    )


_BIB_ENTRY = re.compile(r"@\s*([A-Za-z]+)\s*([{(])")


def _bib_value(text, pos, index, lineno):
    """Read one field value starting at ``pos``; returns (value, new_pos)."""
    parts = []
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            raise ParseError("unexpected end of input in field value", record=index, line=lineno(pos))
        ch = text[pos]
        if ch == "{":
            depth, start = 0, pos
            while pos < n:
                if text[pos] == "{":
                    depth += 1
                elif text[pos] == "}":
                    depth -= 1
                    if depth == 0:
                        break
                pos += 1
            if depth != 0:
                raise ParseError("unbalanced braces", record=index, line=lineno(start))
            parts.append(text[start + 1:pos])
            pos += 1
        elif ch == '"':
            start = pos
            pos += 1
            depth = 0
            while pos < n and not (text[pos] == '"' and depth == 0):
                if text[pos] == "{":
                    depth += 1
                elif text[pos] == "}":
                    depth -= 1
                pos += 1
            if pos >= n:
                raise ParseError("unterminated quoted value", record=index, line=lineno(start))
            parts.append(text[start + 1:pos])
            pos += 1
        else:
            m = re.match(r"[A-Za-z0-9_\-.:]+", text[pos:])
            if not m:
                raise ParseError(f"unexpected character {ch!r} in field value", record=index, line=lineno(pos))
            parts.append(m.group(0))
            pos += m.end()
        while pos < n and text[pos].isspace():
            pos += 1
        if pos < n and text[pos] == "#":
            pos += 1
            continue
        return "".join(parts), pos


def _clean_bib(value):
    value = value.replace("{", "").replace("}", "")
    return _SPACES.sub(" ", value).strip()


def _parse_bibtex(text, label):
    line_starts = [0] + [i + 1 for i, ch in enumerate(text) if ch == "\n"]

    def lineno(pos):
        lo, hi = 0, len(line_starts)
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if line_starts[mid] <= pos:
                lo = mid
            else:
                hi = mid
        return lo + 1

    out = []
    index = 0
    pos = 0
    n = len(text)
    while True:
        m = _BIB_ENTRY.search(text, pos)
        if not m:
            break
        kind = m.group(1).lower()
        close = "}" if m.group(2) == "{" else ")"
        pos = m.end()
        if kind in ("comment", "preamble", "string"):
            depth = 1
            while pos < n and depth:
                if text[pos] in "{(":
                    depth += 1
                elif text[pos] in "})":
                    depth -= 1
                pos += 1
            continue
        index += 1
        entry_line = lineno(m.start())
        key_m = re.match(r"\s*([^,\s]*)\s*,", text[pos:])
        if not key_m:
            raise ParseError("missing citation key", record=index, line=entry_line)
        pos += key_m.end()
        fields = {}
        while True:
            while pos < n and (text[pos].isspace() or text[pos] == ","):
                pos += 1
            if pos >= n:
                raise ParseError("entry not closed", record=index, line=entry_line)
            if text[pos] == close:
                pos += 1
                break
            fm = re.match(r"([A-Za-z][\w\-:]*)\s*=", text[pos:])
            if not fm:
                raise ParseError("expected 'field = value'", record=index, line=lineno(pos))
            pos += fm.end()
            value, pos = _bib_value(text, pos, index, lineno)
            fields[fm.group(1).lower()] = _clean_bib(value)
        title = fields.get("title")
        if not title:
            raise ParseError("missing title field", record=index, line=entry_line)
        authors = tuple(
            a.strip() for a in re.split(r"\s+and\s+", fields.get("author", "")) if a.strip()
        )
        out.append(
            ArticleRecord(
                title=title,
                authors=authors,
                year=_parse_year(fields.get("year"), index, entry_line),
                venue=fields.get("journal") or fields.get("booktitle"),
                rank=len(out) + 1,
                source_label=label,
            )
        )
    return out


_PARSERS = {
    ExportFormat.CSV: _parse_csv,
    ExportFormat.RIS: _parse_ris,
    ExportFormat.BIBTEX: _parse_bibtex,
}


def parse_export(content, format, label=""):
    """Parse an export file into a :class:`RankedList`.

    Records keep file order; ranks run from 1. Bytes are decoded as UTF-8
    with an optional BOM.
    """
    fmt = ExportFormat.coerce(format)
    text = _decode(content)
    return RankedList(tuple(_PARSERS[fmt](text, label)), label)


def write_csv(ranked, fh=None):
    """Serialise a ranked list to the CSV contract; returns the text."""
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["title", "authors", "year", "venue"])
    for rec in ranked.entries:
        writer.writerow(
            [rec.title, "; ".join(rec.authors), "" if rec.year is None else rec.year, rec.venue or ""]
        )
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text
