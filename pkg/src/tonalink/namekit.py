"""Chinese name structure: segmentation, ordering and scheme-aware rendering."""

from __future__ import annotations

import re
import warnings
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from enum import Enum

from tonalink.prondict import (
    Context,
    PronunciationDictionary,
    lookup,
    primary_reading,
)
from tonalink.syllable import RenderStyle, Scheme, Syllable, render_syllable

__all__ = [
    "HanName",
    "NameOrder",
    "NameWarning",
    "RomanisedName",
    "Script",
    "detect_order",
    "detect_script",
    "is_han",
    "join_fields",
    "render_name",
    "repair_misplaced_middle",
    "segment_full_name",
    "surname_renderings",
]

_HAN_RE = re.compile(
    "[㐀-䶿一-鿿豈-﫿\U00020000-\U0002a6df"
    "\U0002a700-\U0002ebef\U00030000-\U0003134f]"
)


class NameWarning(UserWarning):
    """Recoverable problem with a single name; batch callers collect these."""


class Script(str, Enum):
    TRADITIONAL = "traditional"
    SIMPLIFIED = "simplified"
    MIXED = "mixed"


class NameOrder(str, Enum):
    SURNAME_FIRST = "surname_first"
    SURNAME_LAST = "surname_last"
    AMBIGUOUS = "ambiguous"


def is_han(ch: str) -> bool:
    return len(ch) == 1 and _HAN_RE.match(ch) is not None


@dataclass(frozen=True)
class HanName:
    surname: str
    forename: str
    script: Script = Script.TRADITIONAL

    def __post_init__(self) -> None:
        object.__setattr__(self, "script", Script(self.script))
        if not self.surname:
            raise ValueError("surname must have at least one character")
        for ch in self.surname + self.forename:
            if not is_han(ch):
                raise ValueError(f"not a Han character: {ch!r}")

    @property
    def full(self) -> str:
        return self.surname + self.forename

    def __len__(self) -> int:
        return len(self.surname) + len(self.forename)


@dataclass(frozen=True)
class RomanisedName:
    """Per-character romanisation of a HanName.

    Tonal schemes hold Syllable objects; HKG holds plain spellings.
    """

    surname: tuple[Syllable | str, ...]
    forename: tuple[Syllable | str, ...]
    scheme: Scheme

    def tokens(self, style: RenderStyle = RenderStyle.NUMERIC, capitalise: bool = False) -> list[str]:
        def show(part: Syllable | str) -> str:
            return part if isinstance(part, str) else render_syllable(part, style)

        return join_fields(
            [show(p) for p in self.surname],
            [show(p) for p in self.forename],
            self.scheme,
            capitalise=capitalise,
        )


def _cap(token: str) -> str:
    return token[:1].upper() + token[1:]


def join_fields(
    surname: Sequence[str], forename: Sequence[str], scheme: Scheme, capitalise: bool = False
) -> list[str]:
    """Apply spacing rules: one token per character, or per field for Pinyin."""
    if Scheme(scheme) is Scheme.PINYIN:
        tokens = ["".join(surname), "".join(forename)]
        tokens = [t for t in tokens if t]
    else:
        tokens = [*surname, *forename]
    return [_cap(t) for t in tokens] if capitalise else list(tokens)


def detect_script(text: str, d: PronunciationDictionary) -> Script:
    """Classify by which member of each Traditional/Simplified pair is used.

    Characters shared by both scripts are neutral; all-neutral text counts
    as traditional.
    """
    trad = simp = False
    for ch in text:
        other = d.variant_equivalents.get(ch)
        if other is None:
            continue
        if ch in d.entries:
            trad = True
        else:
            simp = True
    if trad and simp:
        return Script.MIXED
    return Script.SIMPLIFIED if simp else Script.TRADITIONAL


def segment_full_name(chars: str, d: PronunciationDictionary) -> HanName:
    """Split a full name at the longest known surname prefix.

    Leaves at least one forename character. Unknown surnames fall back to a
    one-character split and raise a NameWarning.
    """
    if len(chars) < 2:
        raise ValueError(f"name too short: {chars!r}")
    for ch in chars:
        if not is_han(ch):
            raise ValueError(f"not a Han character: {ch!r}")
    script = detect_script(chars, d)
    for size in range(min(d.longest_surname, len(chars) - 1), 0, -1):
        if d.is_surname(chars[:size]):
            return HanName(chars[:size], chars[size:], script)
    warnings.warn(NameWarning(f"surname of {chars!r} not in surname table"), stacklevel=2)
    return HanName(chars[:1], chars[1:], script)


def surname_renderings(
    d: PronunciationDictionary, scheme: Scheme, hkg_table=None
) -> frozenset[str]:
    """Lowercase renderings of single-character surnames under ``scheme``."""
    scheme = Scheme(scheme)
    out: set[str] = set()
    for surname in d.surname_table:
        if len(surname) != 1:
            continue
        if scheme is Scheme.HKG:
            if hkg_table is not None:
                out.update(hkg_table.forward.get(surname, ()))
            continue
        for reading in lookup(d, surname, scheme):
            if reading.surname_reading or len(lookup(d, surname, scheme)) == 1:
                out.add(render_syllable(reading.syllable, RenderStyle.NUMERIC))
    return frozenset(out)


def order_from_flags(first_is_surname: bool, last_is_surname: bool) -> NameOrder:
    if first_is_surname and not last_is_surname:
        return NameOrder.SURNAME_FIRST
    if last_is_surname and not first_is_surname:
        return NameOrder.SURNAME_LAST
    return NameOrder.AMBIGUOUS


def detect_order(
    tokens: Sequence[str],
    d: PronunciationDictionary,
    scheme: Scheme,
    hkg_table=None,
    *,
    is_surname: Callable[[str], bool] | None = None,
) -> NameOrder:
    """Decide whether the surname leads or trails a romanised token list.

    ``is_surname`` overrides the membership test (used by linkage code that
    compares normalised keys rather than raw spellings).
    """
    if len(tokens) < 2:
        return NameOrder.AMBIGUOUS
    if is_surname is None:
        known = surname_renderings(d, scheme, hkg_table)

        def is_surname(token: str) -> bool:
            return token.lower() in known

    return order_from_flags(is_surname(tokens[0]), is_surname(tokens[-1]))


def repair_misplaced_middle(
    surname_field: Iterable[str], forename_field: Iterable[str], middle_field: Iterable[str]
) -> tuple[list[str], list[str]]:
    return list(surname_field), [*forename_field, *middle_field]


def render_name(
    name: HanName,
    d: PronunciationDictionary,
    scheme: Scheme,
    style: RenderStyle = RenderStyle.NUMERIC,
    *,
    hkg_table=None,
    capitalise: bool = True,
) -> str:
    """Render with scheme spacing: per character for Jyutping/HKG, per field for Pinyin."""
    scheme = Scheme(scheme)
    style = RenderStyle(style)
    missing = []
    if scheme is Scheme.HKG:
        if hkg_table is None:
            from tonalink.romanise import bundled_hkg_table

            hkg_table = bundled_hkg_table()
        parts = []
        for ch in name.full:
            variants = hkg_table.forward.get(d.key(ch)) or hkg_table.forward.get(ch)
            if not variants:
                missing.append(ch)
            else:
                parts.append(variants[0])
    else:
        parts = []
        for i, ch in enumerate(name.full):
            context = Context.SURNAME if i < len(name.surname) else Context.FORENAME
            try:
                parts.append(render_syllable(primary_reading(d, ch, scheme, context), style))
            except KeyError:
                missing.append(ch)
    if missing:
        raise KeyError(f"no {scheme.value} reading for {''.join(missing)!r}")
    n = len(name.surname)
    return " ".join(join_fields(parts[:n], parts[n:], scheme, capitalise=capitalise))
