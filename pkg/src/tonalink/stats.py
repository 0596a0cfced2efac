"""Corpus measurements: distinct-value counts, tone combinations, Zipf fits."""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from tonalink.romanise import Rendering
from tonalink.syllable import Scheme, SyllableError, parse_syllable, split_numeric

__all__ = [
    "CorpusStats",
    "Field",
    "STATS_COLUMNS",
    "ToneComboFrequency",
    "corpus_stats",
    "delta_pct",
    "describe",
    "distinct_values",
    "field_value",
    "record_tones",
    "tone_combo_distribution",
    "topk_coverage",
    "unique_counts",
    "zipf_fit",
]

STATS_COLUMNS = (
    Rendering.CHINESE,
    Rendering.JYUTPING,
    Rendering.PINYIN_NUMERIC,
    Rendering.PINYIN_NOTONE,
    Rendering.HKG,
)
_COLUMN_TITLES = {
    Rendering.CHINESE: "Chinese",
    Rendering.JYUTPING: "Jyutping",
    Rendering.PINYIN_NUMERIC: "Pinyin",
    Rendering.PINYIN_NOTONE: "Pinyin_notone",
    Rendering.HKG: "HKG-romanisation",
}


class Field(str, Enum):
    SURNAME = "surname"
    FORENAME = "forename"
    FULLNAME = "fullname"


def field_value(record, rendering: Rendering, field: Field) -> str | None:
    """The record's string for one (rendering, field) cell, or None if unrendered."""
    rendering, field = Rendering(rendering), Field(field)
    if rendering is Rendering.CHINESE:
        han = getattr(record, "han", None)
        if han is None:
            return None
        parts = (han.surname, han.forename)
        sep = ""
    else:
        parts = record.renderings.get(rendering.value)
        if parts is None:
            return None
        parts = tuple(p.lower() for p in parts)
        sep = " "
    if field is Field.SURNAME:
        return parts[0]
    if field is Field.FORENAME:
        return parts[1]
    return sep.join(p for p in parts if p)


def distinct_values(corpus: Iterable, rendering: Rendering, field: Field) -> tuple[set[str], int]:
    """Distinct cell values plus the number of records that could not be rendered."""
    values: set[str] = set()
    excluded = 0
    for record in corpus:
        value = field_value(record, rendering, field)
        if value is None:
            excluded += 1
        else:
            values.add(value)
    return values, excluded


def unique_counts(corpus: Iterable, rendering: Rendering, field: Field) -> int:
    return len(distinct_values(corpus, rendering, field)[0])


def delta_pct(roman_count: int, chinese_count: int) -> float:
    """Signed percentage change in distinct values relative to the characters."""
    if chinese_count <= 0:
        raise ValueError("undefined baseline: chinese_count must be positive")
    return (roman_count - chinese_count) / chinese_count * 100


@dataclass
class CorpusStats:
    records: int
    counts: dict[tuple[Field, Rendering], int] = field(default_factory=dict)
    excluded: dict[Rendering, int] = field(default_factory=dict)

    def delta(self, f: Field, rendering: Rendering) -> float:
        return delta_pct(self.counts[f, rendering], self.counts[f, Rendering.CHINESE])

    def rows(self) -> list[list[str]]:
        header = ["Unique Count", *(_COLUMN_TITLES[c] for c in STATS_COLUMNS)]
        out = [header]
        for f in Field:
            row = [f.value]
            for col in STATS_COLUMNS:
                count = self.counts[f, col]
                if col is Rendering.CHINESE or self.counts[f, Rendering.CHINESE] == 0:
                    row.append(str(count))
                else:
                    row.append(f"{count} ({self.delta(f, col):+.1f}%)")
            out.append(row)
        return out

    def to_tsv(self) -> str:
        return "".join("\t".join(r) + "\n" for r in self.rows())

    def to_kv(self) -> list[dict[str, object]]:
        out = []
        for f in Field:
            for col in STATS_COLUMNS:
                item: dict[str, object] = {
                    "field": f.value,
                    "scheme": col.value,
                    "unique_count": self.counts[f, col],
                }
                if col is not Rendering.CHINESE and self.counts[f, Rendering.CHINESE]:
                    item["delta_pct"] = round(self.delta(f, col), 1)
                out.append(item)
        for col in STATS_COLUMNS:
            out.append({"scheme": col.value, "excluded": self.excluded.get(col, 0)})
        return out


def corpus_stats(corpus: Iterable) -> CorpusStats:
    corpus = list(corpus)
    stats = CorpusStats(records=len(corpus))
    for col in STATS_COLUMNS:
        for f in Field:
            values, excluded = distinct_values(corpus, col, f)
            stats.counts[f, col] = len(values)
        stats.excluded[col] = excluded
    return stats


@dataclass
class ToneComboFrequency:
    scheme: Scheme
    counts: Counter = field(default_factory=Counter)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def ranked(self) -> list[tuple[tuple[int, ...], int]]:
        return sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0]))

    def __add__(self, other: ToneComboFrequency) -> ToneComboFrequency:
        if other.scheme is not self.scheme:
            raise ValueError("cannot combine tallies from different schemes")
        return ToneComboFrequency(self.scheme, self.counts + other.counts)


_TONE_SOURCE = {Scheme.JYUTPING: Rendering.JYUTPING, Scheme.PINYIN: Rendering.PINYIN_NUMERIC}


def record_tones(record, scheme: Scheme) -> tuple[int, ...] | None:
    """Full-name tone sequence from the record's numeric rendering."""
    scheme = Scheme(scheme)
    if scheme not in _TONE_SOURCE:
        raise ValueError(f"{scheme.value} is not a tonal scheme")
    parts = record.renderings.get(_TONE_SOURCE[scheme].value)
    if parts is None:
        return None
    tones = []
    try:
        for token in " ".join(parts).split():
            if scheme is Scheme.PINYIN:
                tones.extend(s.tone for s in split_numeric(token, scheme))
            else:
                tones.append(parse_syllable(token, scheme).tone)
    except SyllableError:
        return None
    return tuple(tones)


def tone_combo_distribution(
    corpus: Iterable, scheme: Scheme, name_length_filter: int | None = None
) -> ToneComboFrequency:
    """Tally full-name tone sequences, optionally only for names of one length."""
    scheme = Scheme(scheme)
    if not scheme.tonal:
        raise ValueError(f"{scheme.value} carries no tones")
    freq = ToneComboFrequency(scheme)
    for record in corpus:
        tones = record_tones(record, scheme)
        if tones is None:
            continue
        if name_length_filter is not None and len(tones) != name_length_filter:
            continue
        freq.counts[tones] += 1
    return freq


def topk_coverage(freq: ToneComboFrequency | Mapping, k: int) -> float:
    counts = freq.counts if isinstance(freq, ToneComboFrequency) else Counter(freq)
    total = sum(counts.values())
    if not total:
        raise ValueError("empty tone-combination tally")
    if k < 1:
        raise ValueError("k must be positive")
    top = sorted(counts.values(), reverse=True)[:k]
    return sum(top) / total


def zipf_fit(freq: ToneComboFrequency | Mapping) -> tuple[float, float]:
    """Log-log least-squares fit of count against rank.

    Only keys seen at least twice take part; ranks come from the full
    ordering. Returns (exponent, r_squared) with exponent = -slope. A
    perfectly flat fit reports r_squared = 1.
    """
    counts = freq.counts if isinstance(freq, ToneComboFrequency) else Counter(freq)
    ordered = sorted(counts.values(), reverse=True)
    points = [(rank, c) for rank, c in enumerate(ordered, 1) if c >= 2]
    if len(points) < 3:
        raise ValueError("too few points for a Zipf fit (need 3 keys with count >= 2)")
    x = np.log([r for r, _ in points])
    y = np.log([c for _, c in points])
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.sum((y - (slope * x + intercept)) ** 2))
    spread = float(np.sum((y - y.mean()) ** 2))
    if spread == 0.0:
        r2 = 1.0 if math.isclose(residual, 0.0, abs_tol=1e-12) else 0.0
    else:
        r2 = max(0.0, min(1.0, 1.0 - residual / spread))
    return float(-slope), r2


def describe(corpus: Iterable) -> list[tuple[str, str, int, float]]:
    """Descriptive rows: (section, label, count, percent of records)."""
    corpus = list(corpus)
    n = len(corpus)
    rows: list[tuple[str, str, int, float]] = [("Total", "n", n, 100.0 if n else 0.0)]

    def pct(c: int) -> float:
        return c / n * 100 if n else 0.0

    for section, getter in (
        ("Chinese surname", lambda r: len(r.han.surname) if r.han else None),
        ("Chinese forename", lambda r: len(r.han.forename) if r.han else None),
    ):
        tally = Counter(v for v in map(getter, corpus) if v is not None)
        for length in sorted(tally):
            label = f"{length} Character" + ("s" if length != 1 else "")
            rows.append((section, label, tally[length], pct(tally[length])))
    kinds = Counter(getattr(r.forename_kind, "value", None) for r in corpus)
    for kind in ("romanised_only", "english_only", "mixed"):
        rows.append(("English forename", kind, kinds.get(kind, 0), pct(kinds.get(kind, 0))))
    origins = Counter(getattr(r.origin, "value", str(r.origin)) for r in corpus)
    for origin in ("Cantonese", "Mandarin", "Unknown"):
        if origin == "Unknown" and not origins.get(origin):
            continue
        rows.append(("Language", origin, origins.get(origin, 0), pct(origins.get(origin, 0))))
    return rows

