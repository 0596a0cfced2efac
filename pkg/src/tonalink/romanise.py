"""Scheme conversion for whole names and the HKG spelling tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cache
from importlib import resources
from os import PathLike
from pathlib import Path

from tonalink.namekit import HanName, RomanisedName, join_fields
from tonalink.prondict import (
    Context,
    DictionaryError,
    PronunciationDictionary,
    primary_reading,
)
from tonalink.syllable import RenderStyle, Scheme, Syllable, render_syllable, strip_tone

__all__ = [
    "HKGVariantTable",
    "Rendering",
    "VARIANT_ORIGINS",
    "bundled_hkg_table",
    "canonical_variant",
    "hkg_candidates",
    "hkg_variants",
    "load_hkg_table",
    "render_romanised",
    "romanise_name",
    "toneless_projection",
]

# Named spelling tables per language of origin; only "hkg" ships populated.
VARIANT_ORIGINS = ("hkg", "vietnamese", "malaysian", "indonesian", "japanese", "korean")


class Rendering(str, Enum):
    """Output column a name can be rendered into.

    CHINESE is the characters themselves; it is carried here so statistics
    and blocking can treat it like any other column.
    """

    CHINESE = "chinese"
    JYUTPING = "jyutping"
    PINYIN_NUMERIC = "pinyin_numeric"
    PINYIN_DIACRITIC = "pinyin_diacritic"
    PINYIN_NOTONE = "pinyin_notone"
    HKG = "hkg"

    @property
    def scheme(self) -> Scheme | None:
        return {
            Rendering.JYUTPING: Scheme.JYUTPING,
            Rendering.PINYIN_NUMERIC: Scheme.PINYIN,
            Rendering.PINYIN_DIACRITIC: Scheme.PINYIN,
            Rendering.PINYIN_NOTONE: Scheme.PINYIN,
            Rendering.HKG: Scheme.HKG,
        }.get(self)

    @property
    def style(self) -> RenderStyle:
        if self is Rendering.PINYIN_DIACRITIC:
            return RenderStyle.DIACRITIC
        if self in (Rendering.PINYIN_NOTONE, Rendering.HKG):
            return RenderStyle.TONELESS
        return RenderStyle.NUMERIC

    @property
    def tonal(self) -> bool:
        return self in (Rendering.JYUTPING, Rendering.PINYIN_NUMERIC, Rendering.PINYIN_DIACRITIC)


@dataclass(frozen=True)
class HKGVariantTable:
    forward: dict[str, tuple[str, ...]] = field(default_factory=dict)
    inverse: dict[str, frozenset[str]] = field(default_factory=dict)
    origin: str = "hkg"

    @classmethod
    def from_pairs(cls, pairs, origin: str = "hkg") -> HKGVariantTable:
        forward: dict[str, list[str]] = {}
        for ch, variant in pairs:
            spellings = forward.setdefault(ch, [])
            if variant not in spellings:
                spellings.append(variant)
        inverse: dict[str, set[str]] = {}
        for ch, spellings in forward.items():
            for v in spellings:
                inverse.setdefault(v, set()).add(ch)
        return cls(
            {ch: tuple(v) for ch, v in forward.items()},
            {v: frozenset(chs) for v, chs in inverse.items()},
            origin,
        )


def load_hkg_table(source: str | PathLike, origin: str = "hkg") -> HKGVariantTable:
    """Read a tab-separated (character, spelling) file, canonical spelling first."""
    pairs = []
    for line_no, line in enumerate(Path(source).read_text("utf-8-sig").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = [c.strip() for c in line.split("\t")]
        if len(cols) < 2 or len(cols[0]) != 1 or not cols[1]:
            raise DictionaryError("expected character<TAB>spelling", line_no, line)
        spelling = cols[1].lower()
        if not spelling.isascii() or not spelling.isalpha():
            raise DictionaryError("spellings are plain letters", line_no, line)
        pairs.append((cols[0], spelling))
    return HKGVariantTable.from_pairs(pairs, origin)


@cache
def bundled_hkg_table() -> HKGVariantTable:
    path = resources.files("tonalink.data").joinpath("hkg_variants.tsv")
    with resources.as_file(path) as p:
        return load_hkg_table(p)


def _key(ch: str, d: PronunciationDictionary | None) -> str:
    return d.key(ch) if d is not None else ch


def hkg_variants(
    ch: str, table: HKGVariantTable, d: PronunciationDictionary | None = None
) -> frozenset[str]:
    return frozenset(table.forward.get(_key(ch, d)) or table.forward.get(ch, ()))


def canonical_variant(
    ch: str, table: HKGVariantTable, d: PronunciationDictionary | None = None
) -> str | None:
    spellings = table.forward.get(_key(ch, d)) or table.forward.get(ch)
    return spellings[0] if spellings else None


def hkg_candidates(
    token: str, table: HKGVariantTable, d: PronunciationDictionary
) -> frozenset[tuple[str, Syllable]]:
    """Characters an HKG spelling may stand for, with their Jyutping.

    Surname characters use their surname reading.
    """
    out = set()
    for ch in table.inverse.get(token.lower(), ()):
        context = Context.SURNAME if d.is_surname(ch) else Context.UNKNOWN
        try:
            out.add((ch, primary_reading(d, ch, Scheme.JYUTPING, context)))
        except KeyError:
            continue
    return frozenset(out)


def romanise_name(
    name: HanName,
    d: PronunciationDictionary,
    scheme: Rendering | Scheme,
    hkg_table: HKGVariantTable | None = None,
) -> RomanisedName:
    """Per-character readings, surname context applied to surname characters."""
    target = scheme.scheme if isinstance(scheme, Rendering) else Scheme(scheme)
    if target is None:
        raise ValueError("the chinese rendering has no romanisation")
    missing = []
    parts: list[Syllable | str] = []
    if target is Scheme.HKG:
        table = hkg_table or bundled_hkg_table()
        for ch in name.full:
            spelling = canonical_variant(ch, table, d)
            if spelling is None:
                missing.append(ch)
            else:
                parts.append(spelling)
    else:
        for i, ch in enumerate(name.full):
            context = Context.SURNAME if i < len(name.surname) else Context.FORENAME
            try:
                parts.append(primary_reading(d, ch, target, context))
            except KeyError:
                missing.append(ch)
    if missing:
        raise KeyError(f"no {target.value} reading for {''.join(missing)!r}")
    n = len(name.surname)
    return RomanisedName(tuple(parts[:n]), tuple(parts[n:]), target)


def toneless_projection(rn: RomanisedName) -> list[str]:
    if not rn.scheme.tonal:
        raise ValueError("toneless projection needs a tonal scheme")
    return join_fields(
        [strip_tone(s) for s in rn.surname], [strip_tone(s) for s in rn.forename], rn.scheme
    )


def render_romanised(rn: RomanisedName, rendering: Rendering, capitalise: bool = True) -> tuple[str, str]:
    """(surname, forename) display strings for one rendering column."""
    style = rendering.style

    def show(parts):
        return [p if isinstance(p, str) else render_syllable(p, style) for p in parts]

    surname = join_fields(show(rn.surname), [], rn.scheme, capitalise=capitalise)
    forename = join_fields([], show(rn.forename), rn.scheme, capitalise=capitalise)
    return " ".join(surname), " ".join(forename)

