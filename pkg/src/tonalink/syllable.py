"""Romanised syllables: parsing, validation and rendering.

Jyutping syllables carry a trailing tone digit 1-6. Pinyin syllables are
written either with a trailing digit 1-5 (5 = neutral) or with a tone mark
over one vowel. Internally a syllable is a lowercase base plus an integer
tone; ``ü`` is kept as ``ü`` in the base.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from enum import Enum
from functools import cache
from importlib import resources

__all__ = [
    "Direction",
    "RenderStyle",
    "Scheme",
    "Syllable",
    "SyllableError",
    "TONES",
    "convert_tone_notation",
    "is_legal_base",
    "is_romanised_syllable",
    "legal_bases",
    "parse_syllable",
    "render_syllable",
    "segment_pinyin",
    "split_numeric",
    "strip_tone",
]


class Scheme(str, Enum):
    JYUTPING = "jyutping"
    PINYIN = "pinyin"
    HKG = "hkg"

    @property
    def tonal(self) -> bool:
        return self is not Scheme.HKG


class RenderStyle(str, Enum):
    NUMERIC = "numeric"
    DIACRITIC = "diacritic"
    TONELESS = "toneless"


class Direction(str, Enum):
    DIACRITIC_TO_NUMERIC = "diacritic->numeric"
    NUMERIC_TO_DIACRITIC = "numeric->diacritic"


TONES: dict[Scheme, tuple[int, ...]] = {
    Scheme.JYUTPING: (1, 2, 3, 4, 5, 6),
    Scheme.PINYIN: (1, 2, 3, 4, 5),
}

# combining marks for Pinyin tones 1-4
_MARKS = {"̄": 1, "́": 2, "̌": 3, "̀": 4}
_MARK_FOR_TONE = {tone: mark for mark, tone in _MARKS.items()}
_VOWELS = "aeiouü"
_NUMERIC_RE = re.compile(r"^([a-zü:]+)(\d)?$")
_SPLIT_NUMERIC_RE = re.compile(r"[a-zü:]+\d")


class SyllableError(ValueError):
    """Raised for text that is not a legal syllable.

    ``index`` is set when the failing syllable sits inside a longer sequence.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


@cache
def _grammar() -> dict[tuple[str, str], frozenset[str]]:
    table: dict[tuple[str, str], set[str]] = {}
    text = resources.files("tonalink.data").joinpath("grammar.tsv").read_text("utf-8")
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        scheme, kind, value = line.split("\t")
        table.setdefault((scheme, kind), set()).add(value)
    return {key: frozenset(values) for key, values in table.items()}


@cache
def legal_bases(scheme: Scheme) -> frozenset[str]:
    """Every legal toneless base for ``scheme``.

    Pinyin is an explicit syllable list; Jyutping and HKG spellings are the
    optional-onset-plus-final products plus a few standalone syllables.
    """
    scheme = Scheme(scheme)
    g = _grammar()
    bases = set(g.get((scheme.value, "syllable"), ()))
    finals = g.get((scheme.value, "final"), frozenset())
    onsets = g.get((scheme.value, "onset"), frozenset()) | {""}
    bases.update(onset + final for onset in onsets for final in finals)
    return frozenset(bases)


def is_legal_base(base: str, scheme: Scheme) -> bool:
    return base in legal_bases(scheme)


def is_romanised_syllable(token: str) -> bool:
    """True if ``token`` is a toneless syllable under any supported scheme."""
    token = token.lower()
    return any(token in legal_bases(s) for s in Scheme)


@dataclass(frozen=True, order=True)
class Syllable:
    base: str
    tone: int
    scheme: Scheme

    def __post_init__(self) -> None:
        scheme = Scheme(self.scheme)
        object.__setattr__(self, "scheme", scheme)
        if not scheme.tonal:
            raise SyllableError(f"{scheme.value} has no tonal syllables")
        if self.tone not in TONES[scheme]:
            raise SyllableError(f"tone {self.tone} out of range for {scheme.value}")
        if not is_legal_base(self.base, scheme):
            raise SyllableError(f"illegal syllable {self.base!r}")

    def __str__(self) -> str:
        return render_syllable(self, RenderStyle.NUMERIC)


def _normalise_letters(text: str, scheme: Scheme) -> str:
    text = text.strip().lower()
    if scheme is Scheme.PINYIN:
        text = text.replace("u:", "ü").replace("v", "ü")
    return text


def parse_syllable(text: str, scheme: Scheme) -> Syllable:
    """Parse one syllable in numeric (or, for Pinyin, diacritic) notation.

    >>> parse_syllable("joeng4", Scheme.JYUTPING)
    Syllable(base='joeng', tone=4, scheme=<Scheme.JYUTPING: 'jyutping'>)
    """
    scheme = Scheme(scheme)
    if not scheme.tonal:
        raise SyllableError(f"{scheme.value} syllables carry no tone")
    decomposed = unicodedata.normalize("NFD", text.strip().lower())
    marks = [c for c in decomposed if c in _MARKS]
    if marks:
        if scheme is not Scheme.PINYIN:
            raise SyllableError(f"tone marks are not used in {scheme.value}: {text!r}")
        if len(marks) > 1:
            raise SyllableError(f"more than one tone mark in {text!r}")
        tone = _MARKS[marks[0]]
        plain = unicodedata.normalize("NFC", "".join(c for c in decomposed if c not in _MARKS))
        if any(c.isdigit() for c in plain):
            raise SyllableError(f"both tone mark and tone digit in {text!r}")
        base = _normalise_letters(plain, scheme)
    else:
        m = _NUMERIC_RE.match(_normalise_letters(unicodedata.normalize("NFC", text), scheme))
        if m is None:
            raise SyllableError(f"illegal syllable {text!r}")
        base, digit = m.group(1), m.group(2)
        if digit is None:
            if scheme is Scheme.JYUTPING:
                raise SyllableError(f"missing tone in {text!r}")
            tone = 5
        else:
            tone = int(digit)
    if tone not in TONES[scheme]:
        raise SyllableError(f"tone {tone} out of range for {scheme.value} in {text!r}")
    if not is_legal_base(base, scheme):
        raise SyllableError(f"illegal syllable {base!r}")
    return Syllable(base, tone, scheme)


def _mark_position(base: str) -> int:
    for vowel in "aoe":
        if vowel in base:
            return base.index(vowel)
    if "iu" in base:
        return base.index("iu") + 1
    if "ui" in base:
        return base.index("ui") + 1
    positions = [i for i, c in enumerate(base) if c in _VOWELS]
    if not positions:
        raise SyllableError(f"no vowel to carry a tone mark in {base!r}")
    return positions[-1]


def render_syllable(syl: Syllable, style: RenderStyle) -> str:
    style = RenderStyle(style)
    if style is RenderStyle.TONELESS:
        return syl.base
    if style is RenderStyle.NUMERIC:
        base = syl.base.replace("ü", "v") if syl.scheme is Scheme.PINYIN else syl.base
        return f"{base}{syl.tone}"
    if syl.scheme is not Scheme.PINYIN:
        raise SyllableError(f"unsupported style {style.value} for {syl.scheme.value}")
    if syl.tone == 5:
        return syl.base
    i = _mark_position(syl.base)
    marked = syl.base[: i + 1] + _MARK_FOR_TONE[syl.tone] + syl.base[i + 1 :]
    return unicodedata.normalize("NFC", marked)


def strip_tone(syl: Syllable) -> str:
    return syl.base


def convert_tone_notation(text: str, direction: Direction) -> str:
    """Convert a whitespace-separated Pinyin sequence between notations.

    >>> convert_tone_notation("zhong1 guo2", Direction.NUMERIC_TO_DIACRITIC)
    'zhōng guó'
    """
    direction = Direction(direction)
    target = (
        RenderStyle.NUMERIC
        if direction is Direction.DIACRITIC_TO_NUMERIC
        else RenderStyle.DIACRITIC
    )
    out = []
    for i, token in enumerate(text.split()):
        if direction is Direction.DIACRITIC_TO_NUMERIC and any(c.isdigit() for c in token):
            raise SyllableError(f"syllable {i}: {token!r} is not in diacritic notation", i)
        if direction is Direction.NUMERIC_TO_DIACRITIC and any(
            c in _MARKS for c in unicodedata.normalize("NFD", token)
        ):
            raise SyllableError(f"syllable {i}: {token!r} is not in numeric notation", i)
        try:
            syl = parse_syllable(token, Scheme.PINYIN)
        except SyllableError as exc:
            raise SyllableError(f"syllable {i}: {exc}", i) from exc
        out.append(render_syllable(syl, target))
    return " ".join(out)


def split_numeric(text: str, scheme: Scheme) -> list[Syllable]:
    """Split run-together numeric syllables such as ``jia1ming2``."""
    text = _normalise_letters(text, scheme)
    pieces = _SPLIT_NUMERIC_RE.findall(text)
    if "".join(pieces) != text:
        raise SyllableError(f"cannot split {text!r} into numeric syllables")
    return [parse_syllable(p, scheme) for p in pieces]


def segment_pinyin(token: str) -> list[str] | None:
    """Split a toneless run like ``junjie`` into Pinyin syllables.

    Returns the segmentation with the fewest syllables (longest-first on
    ties), or None when no full segmentation exists.
    """
    text = _normalise_letters(token, Scheme.PINYIN)
    bases = legal_bases(Scheme.PINYIN)
    longest = max(map(len, bases))
    best: list[list[str] | None] = [None] * (len(text) + 1)
    best[len(text)] = []
    for start in range(len(text) - 1, -1, -1):
        for end in range(min(len(text), start + longest), start, -1):
            rest = best[end]
            if rest is not None and text[start:end] in bases:
                candidate = [text[start:end], *rest]
                if best[start] is None or len(candidate) < len(best[start]):
                    best[start] = candidate
    return best[0]
