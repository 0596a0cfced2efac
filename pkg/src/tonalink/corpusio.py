"""Name corpora: ingest, cleaning, origin/forename classification, export."""

from __future__ import annotations

import csv
import logging
import unicodedata
import warnings
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cache
from importlib import resources
from itertools import product
from os import PathLike
from pathlib import Path
from typing import TextIO

from tonalink.namekit import HanName, NameWarning, Script, is_han, segment_full_name
from tonalink.prondict import PronunciationDictionary, bundled_dictionary, lookup
from tonalink.romanise import (
    HKGVariantTable,
    Rendering,
    bundled_hkg_table,
    hkg_variants,
    render_romanised,
    romanise_name,
)
from tonalink.syllable import Scheme, is_romanised_syllable, segment_pinyin

__all__ = [
    "ForenameKind",
    "IngestError",
    "NameRecord",
    "Origin",
    "bundled_corpus_path",
    "classify_forename_kind",
    "classify_origin",
    "clean",
    "export",
    "ingest",
    "process_corpus",
    "process_record",
    "write_records",
]

log = logging.getLogger(__name__)

REQUIRED = ("chinese_name", "english_name")
_DERIVED = ("surname", "forename", "script", "origin", "forename_kind", "warnings")
_WARNING_SEP = " | "
ROMANISED_RENDERINGS = (
    Rendering.JYUTPING,
    Rendering.PINYIN_NUMERIC,
    Rendering.PINYIN_DIACRITIC,
    Rendering.PINYIN_NOTONE,
    Rendering.HKG,
)


class IngestError(ValueError):
    pass


class Origin(str, Enum):
    CANTONESE = "Cantonese"
    MANDARIN = "Mandarin"
    UNKNOWN = "Unknown"


class ForenameKind(str, Enum):
    ROMANISED_ONLY = "romanised_only"
    ENGLISH_ONLY = "english_only"
    MIXED = "mixed"


@dataclass
class NameRecord:
    record_id: str
    chinese_name: str
    english_name: str
    extra: dict[str, str] = field(default_factory=dict)
    han: HanName | None = None
    renderings: dict[str, tuple[str, str]] = field(default_factory=dict)
    origin: Origin = Origin.UNKNOWN
    forename_kind: ForenameKind | None = None
    warnings: tuple[str, ...] = ()

    @property
    def unprocessable(self) -> bool:
        return not self.chinese_name

    def warn(self, message: str) -> None:
        if message not in self.warnings:
            self.warnings = (*self.warnings, message)


# ---------------------------------------------------------------- cleaning


def _fixed_point(step, text: str) -> str:
    # removing spaces can leave combining marks that compose on the next pass
    for _ in range(8):
        out = step(text)
        if out == text:
            break
        text = out
    return text


def _english_step(text: str) -> str:
    text = unicodedata.normalize("NFKC", text)
    out = []
    for ch in text:
        if ch in "'’":
            continue
        if ch != "-" and unicodedata.category(ch).startswith("P"):
            out.append(" ")
        else:
            out.append(ch)
    return " ".join("".join(out).split())


def _chinese_step(text: str) -> str:
    return "".join(unicodedata.normalize("NFKC", text).split())


def _clean_english(text: str) -> str:
    return _fixed_point(_english_step, text)


def _clean_chinese(text: str) -> str:
    return _fixed_point(_chinese_step, text)


def clean(record: NameRecord) -> NameRecord:
    """Width-fold and tidy both name fields. Idempotent."""
    cleaned = replace(
        record,
        chinese_name=_clean_chinese(record.chinese_name),
        english_name=_clean_english(record.english_name),
    )
    if cleaned.unprocessable:
        cleaned.warn("unprocessable: empty chinese_name")
    return cleaned


# ------------------------------------------------------- english name parts


def _spellings(ch: str, d: PronunciationDictionary, table: HKGVariantTable) -> set[str]:
    out = set(hkg_variants(ch, table, d))
    for scheme in (Scheme.JYUTPING, Scheme.PINYIN):
        out.update(r.syllable.base for r in lookup(d, ch, scheme))
    return out


def _split_per_char(token: str, chars: str, d, table) -> list[str] | None:
    """Split ``token`` into one known spelling per character, if possible."""
    if not chars:
        return [] if not token else None
    for spelling in sorted(_spellings(chars[0], d, table), key=len, reverse=True):
        if token.startswith(spelling):
            rest = _split_per_char(token[len(spelling) :], chars[1:], d, table)
            if rest is not None:
                return [spelling, *rest]
    return None


@dataclass
class _EnglishParts:
    surname: list[str]
    romanised: list[str]
    english: list[str]


def _locate_surname(tokens: list[str], han: HanName, d, table) -> tuple[list[str], list[str]] | None:
    k = len(han.surname)
    lowered = [t.lower() for t in tokens]
    for start in (0, None):
        for width in dict.fromkeys((k, 1)):
            if width > len(tokens):
                continue
            idx = slice(0, width) if start == 0 else slice(len(tokens) - width, len(tokens))
            split = _split_per_char("".join(lowered[idx]), han.surname, d, table)
            if split is not None:
                rest = tokens[width:] if start == 0 else tokens[: len(tokens) - width]
                return split, rest
    return None


def _is_romanised(token: str, chars: str | None, d, table) -> bool:
    for sub in token.lower().split("-"):
        if not sub:
            continue
        if is_romanised_syllable(sub):
            continue
        if chars and (
            any(sub in _spellings(ch, d, table) for ch in chars)
            or _split_per_char(sub, chars, d, table) is not None
        ):
            continue
        if not chars:
            seg = segment_pinyin(sub)
            if seg is not None and len(seg) >= 2:
                continue
        return False
    return True


def english_parts(
    record: NameRecord,
    d: PronunciationDictionary | None = None,
    table: HKGVariantTable | None = None,
) -> _EnglishParts:
    d = d or bundled_dictionary()
    table = table or bundled_hkg_table()
    tokens = record.english_name.split()
    surname: list[str] = []
    rest = tokens
    han = record.han
    if han is not None and tokens:
        found = _locate_surname(tokens, han, d, table)
        if found is not None:
            surname, rest = found
        else:
            surname, rest = [tokens[0].lower()], tokens[1:]
    elif tokens:
        surname, rest = [tokens[0].lower()], tokens[1:]
    chars = han.forename if han is not None else None
    romanised, english = [], []
    for token in rest:
        (romanised if _is_romanised(token, chars, d, table) else english).append(token)
    return _EnglishParts(surname, romanised, english)


def classify_forename_kind(record: NameRecord, d=None, table=None) -> ForenameKind:
    parts = english_parts(record, d, table)
    if parts.romanised and parts.english:
        return ForenameKind.MIXED
    if parts.romanised:
        return ForenameKind.ROMANISED_ONLY
    return ForenameKind.ENGLISH_ONLY


def _pinyin_bases(chars: str, d: PronunciationDictionary) -> list[set[str]]:
    return [{r.syllable.base for r in lookup(d, ch, Scheme.PINYIN)} for ch in chars]


def classify_origin(record: NameRecord, d=None, table=None, strict: bool = False) -> Origin:
    """Mandarin for run-together Pinyin forenames or whole-name Pinyin matches.

    Space-separated one-syllable-per-character forenames are Cantonese.
    ``strict`` maps everything that is not Mandarin to Cantonese.
    """
    d = d or bundled_dictionary()
    table = table or bundled_hkg_table()
    parts = english_parts(record, d, table)
    han = record.han
    origin = Origin.UNKNOWN
    subtokens = [s.lower() for t in parts.romanised for s in t.split("-") if s]
    if len(parts.romanised) == 1 and "-" not in parts.romanised[0]:
        seg = segment_pinyin(parts.romanised[0])
        if seg is not None and len(seg) >= 2:
            origin = Origin.MANDARIN
    if origin is Origin.UNKNOWN and han is not None and subtokens and parts.surname:
        surname_ok = all(
            s in bases for s, bases in zip(parts.surname, _pinyin_bases(han.surname, d))
        ) and len(parts.surname) == len(han.surname)
        forename_options = {"".join(p) for p in product(*_pinyin_bases(han.forename, d))}
        if surname_ok and "".join(subtokens) in forename_options:
            origin = Origin.MANDARIN
    if origin is Origin.UNKNOWN and subtokens:
        if all(is_romanised_syllable(s) for s in subtokens) and (
            han is None or len(subtokens) == len(han.forename)
        ):
            origin = Origin.CANTONESE
    if strict and origin is not Origin.MANDARIN:
        return Origin.CANTONESE
    return origin


# --------------------------------------------------------------- processing


def _cap(token: str) -> str:
    return token[:1].upper() + token[1:].lower()


def process_record(
    record: NameRecord,
    d: PronunciationDictionary | None = None,
    table: HKGVariantTable | None = None,
    *,
    strict_origin: bool = False,
) -> NameRecord:
    """Clean, segment, render every scheme, and classify one record.

    Problems become record warnings; nothing here raises on bad data.
    """
    d = d or bundled_dictionary()
    table = table or bundled_hkg_table()
    rec = clean(record)
    rec.renderings = {}
    if rec.unprocessable:
        return rec
    bad = [ch for ch in rec.chinese_name if not is_han(ch)]
    if bad or len(rec.chinese_name) < 2:
        rec.warn(f"unprocessable chinese_name {rec.chinese_name!r}")
        rec.han = None
        return rec
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NameWarning)
        rec.han = segment_full_name(rec.chinese_name, d)
    for w in caught:
        rec.warn(str(w.message))
    for rendering in ROMANISED_RENDERINGS[:-1]:
        try:
            rn = romanise_name(rec.han, d, rendering)
        except KeyError as exc:
            rec.warn(exc.args[0])
            continue
        rec.renderings[rendering.value] = render_romanised(rn, rendering)
    parts = english_parts(rec, d, table)
    rec.forename_kind = classify_forename_kind(rec, d, table)
    rec.origin = classify_origin(rec, d, table, strict=strict_origin)
    if parts.surname and parts.romanised:
        rec.renderings[Rendering.HKG.value] = (
            " ".join(_cap(t) for t in parts.surname),
            " ".join(_cap(t) for t in parts.romanised),
        )
    else:
        try:
            rn = romanise_name(rec.han, d, Rendering.HKG, table)
        except KeyError as exc:
            rec.warn(exc.args[0])
        else:
            rec.renderings[Rendering.HKG.value] = render_romanised(rn, Rendering.HKG)
    return rec


def process_corpus(records: Iterable[NameRecord], d=None, table=None, *, strict_origin=False):
    return [process_record(r, d, table, strict_origin=strict_origin) for r in records]


# ------------------------------------------------------------ ingest/export


def _format(path: str | PathLike, format: str | None) -> str:
    if format:
        if format not in ("csv", "tsv"):
            raise ValueError(f"unknown corpus format {format!r}")
        return format
    return "tsv" if Path(path).suffix.lower() in (".tsv", ".tab", ".txt") else "csv"


def _split_rendering(value: str, rendering: Rendering, han: HanName | None) -> tuple[str, str]:
    tokens = value.split()
    if rendering.scheme is Scheme.PINYIN:
        n = 1
    else:
        n = len(han.surname) if han is not None else 1
    return " ".join(tokens[:n]), " ".join(tokens[n:])


def ingest(path: str | PathLike, format: str | None = None) -> list[NameRecord]:
    """Read a CSV/TSV name list with ``chinese_name`` and ``english_name`` columns.

    Columns written by :func:`export` are read back into the derived fields;
    any other column is kept verbatim in ``extra``.
    """
    fmt = _format(path, format)
    delimiter = "\t" if fmt == "tsv" else ","
    records: list[NameRecord] = []
    with open(path, encoding="utf-8-sig", newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise IngestError(f"{path}: empty file, header row required") from None
        for column in REQUIRED:
            if column not in header:
                raise IngestError(f"{path}: missing required column {column!r}")
        seen_ids: set[str] = set()
        for row_no, row in enumerate(reader, 2):
            if not any(cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                log.warning("%s row %d: expected %d fields, found %d; skipped",
                            path, row_no, len(header), len(row))
                continue
            values = {h: cell.strip() for h, cell in zip(header, row)}
            record = _record_from_row(values, row_no)
            if record.record_id in seen_ids:
                log.warning("%s row %d: duplicate record_id %r; skipped", path, row_no, record.record_id)
                continue
            seen_ids.add(record.record_id)
            records.append(record)
    log.info("%s: %d records ingested", path, len(records))
    return records


def _record_from_row(values: dict[str, str], row_no: int) -> NameRecord:
    record_id = values.pop("record_id", "") or str(row_no - 1)
    record = NameRecord(record_id, values.pop("chinese_name"), values.pop("english_name"))
    surname = values.pop("surname", None)
    forename = values.pop("forename", None)
    script = values.pop("script", None)
    if surname:
        record.han = HanName(surname, forename or "", Script(script or Script.TRADITIONAL))
    origin = values.pop("origin", None)
    if origin:
        record.origin = Origin(origin)
    kind = values.pop("forename_kind", None)
    if kind:
        record.forename_kind = ForenameKind(kind)
    notes = values.pop("warnings", None)
    if notes:
        record.warnings = tuple(notes.split(_WARNING_SEP))
    for rendering in ROMANISED_RENDERINGS:
        value = values.pop(rendering.value, None)
        if value:
            record.renderings[rendering.value] = _split_rendering(value, rendering, record.han)
    record.extra = values
    return record


def export(
    records: Sequence[NameRecord],
    path: str | PathLike,
    format: str | None = None,
    renderings: Iterable[Rendering] = ROMANISED_RENDERINGS,
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_records(records, fh, _format(path, format), renderings)


def write_records(
    records: Sequence[NameRecord],
    stream: TextIO,
    format: str = "csv",
    renderings: Iterable[Rendering] = ROMANISED_RENDERINGS,
) -> None:
    """Write records with derived columns and one column per rendering."""
    renderings = [Rendering(r) for r in renderings]
    extras: list[str] = []
    for record in records:
        for key in record.extra:
            if key not in extras:
                extras.append(key)
    header = ["record_id", *REQUIRED, *extras, *_DERIVED, *(r.value for r in renderings)]
    writer = csv.writer(stream, delimiter="\t" if format == "tsv" else ",", lineterminator="\n")
    writer.writerow(header)
    for record in records:
        han = record.han
        row = [record.record_id, record.chinese_name, record.english_name]
        row += [record.extra.get(k, "") for k in extras]
        row += [
            han.surname if han else "",
            han.forename if han else "",
            han.script.value if han else "",
            record.origin.value,
            record.forename_kind.value if record.forename_kind else "",
            _WARNING_SEP.join(record.warnings),
        ]
        for r in renderings:
            parts = record.renderings.get(r.value)
            row.append(" ".join(p for p in parts if p) if parts else "")
        writer.writerow(row)


@cache
def bundled_corpus_path() -> Path:
    """Path to the shipped 100-name synthetic corpus."""
    return Path(str(resources.files("tonalink.data").joinpath("synthetic_names.csv")))
