"""Character-to-pronunciation dictionaries for Jyutping and Pinyin."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cache
from importlib import resources
from os import PathLike
from pathlib import Path

from tonalink.syllable import Scheme, Syllable, SyllableError, parse_syllable

__all__ = [
    "Context",
    "DictionaryError",
    "PronunciationDictionary",
    "Reading",
    "bundled_dictionary",
    "load_dictionary",
    "lookup",
    "merge",
    "primary_reading",
]

log = logging.getLogger(__name__)

_TONAL = (Scheme.JYUTPING, Scheme.PINYIN)
_CCCANTO_RE = re.compile(
    r"^(?P<trad>\S+)\s+(?P<simp>\S+)\s+\[(?P<pinyin>[^\]]*)\]"
    r"\s*(?:\{(?P<jyutping>[^}]*)\})?\s*(?P<defs>/.*/)?\s*$"
)
_SURNAME_RE = re.compile(r"\bsurname\b", re.IGNORECASE)


class DictionaryError(ValueError):
    def __init__(self, message: str, line_no: int | None = None, text: str | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}: {text!r}"
        super().__init__(message)
        self.line_no = line_no
        self.text = text


class Context(str, Enum):
    SURNAME = "surname"
    FORENAME = "forename"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Reading:
    syllable: Syllable
    rank: int
    surname_reading: bool = False


@dataclass(frozen=True)
class PronunciationDictionary:
    """Immutable reading table.

    ``entries`` is keyed by one member of each Traditional/Simplified pair;
    ``variant_equivalents`` maps both members of a pair to each other so
    either spelling resolves to the same readings.
    """

    entries: dict[str, dict[Scheme, tuple[Reading, ...]]] = field(default_factory=dict)
    surname_table: frozenset[str] = frozenset()
    variant_equivalents: dict[str, str] = field(default_factory=dict)

    def key(self, ch: str) -> str:
        if ch in self.entries:
            return ch
        return self.variant_equivalents.get(ch, ch)

    def canonical(self, text: str) -> str:
        return "".join(self.key(c) for c in text)

    def is_surname(self, text: str) -> bool:
        return text in self.surname_table or self.canonical(text) in self.surname_table

    @property
    def longest_surname(self) -> int:
        return max(map(len, self.surname_table), default=1)

    def __contains__(self, ch: object) -> bool:
        return isinstance(ch, str) and self.key(ch) in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def lookup(d: PronunciationDictionary, ch: str, scheme: Scheme) -> tuple[Reading, ...]:
    return d.entries.get(d.key(ch), {}).get(Scheme(scheme), ())


def primary_reading(
    d: PronunciationDictionary,
    ch: str,
    scheme: Scheme,
    context: Context = Context.UNKNOWN,
) -> Syllable:
    readings = lookup(d, ch, scheme)
    if not readings:
        raise KeyError(f"no reading for {ch!r} in {Scheme(scheme).value}")
    if Context(context) is Context.SURNAME:
        for r in readings:
            if r.surname_reading:
                return r.syllable
    return readings[0].syllable


# Raw form shared by both loaders and merge: char -> scheme -> [(syllable, rank, flag, line_no)].
_Raw = dict[str, dict[Scheme, list[tuple[Syllable, int | None, bool, int]]]]


def _build(raw: _Raw, surnames: set[str], pairs: dict[str, str]) -> PronunciationDictionary:
    """Rank, validate and fold variant pairs into one entry per pair."""
    raw = {ch: {s: list(rs) for s, rs in by_scheme.items()} for ch, by_scheme in raw.items()}
    equivalents: dict[str, str] = {}
    for simp, trad in pairs.items():
        equivalents[simp] = trad
        equivalents[trad] = simp
        if simp not in raw:
            continue
        moved = raw.pop(simp)
        target = raw.setdefault(trad, {})
        for scheme, readings in moved.items():
            have = {r[0] for r in target.get(scheme, [])}
            start = len(target.get(scheme, []))
            extra = [r for r in readings if r[0] not in have]
            target.setdefault(scheme, []).extend(
                (syl, None if rank is None else rank + start, flag, line)
                for syl, rank, flag, line in extra
            )

    entries: dict[str, dict[Scheme, tuple[Reading, ...]]] = {}
    for ch, by_scheme in raw.items():
        built: dict[Scheme, tuple[Reading, ...]] = {}
        for scheme in _TONAL:
            readings = by_scheme.get(scheme)
            if not readings:
                continue
            if all(rank is None for _, rank, _, _ in readings):
                ranked = [(syl, i, flag, line) for i, (syl, _, flag, line) in enumerate(readings, 1)]
            else:
                ranked = sorted(readings, key=lambda r: (r[1] is None, r[1] or 0))
                ranks = [r[1] for r in ranked]
                if ranks != list(range(1, len(ranks) + 1)):
                    line = readings[0][3]
                    raise DictionaryError(
                        f"ranks for {scheme.value} are not 1..{len(ranks)}", line, f"{ch} {ranks}"
                    )
            built[scheme] = tuple(Reading(syl, rank, flag) for syl, rank, flag, _ in ranked)
        if built:
            entries[ch] = built
        if any(flag for rs in by_scheme.values() for _, _, flag, _ in rs):
            surnames.add(ch)
    surnames = {"".join(equivalents.get(c, c) if c not in entries else c for c in s) for s in surnames}
    return PronunciationDictionary(entries, frozenset(surnames), equivalents)


def _read_lines(source: str | PathLike) -> list[str]:
    text = Path(source).read_text(encoding="utf-8-sig")
    return text.splitlines()


def _load_tabular(lines: list[str]) -> PronunciationDictionary:
    raw: _Raw = {}
    surnames: set[str] = set()
    pairs: dict[str, str] = {}
    data_lines = 0
    for line_no, line in enumerate(lines, 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        data_lines += 1
        cols = line.rstrip("\r\n").split("\t")
        cols += [""] * (6 - len(cols))
        ch, scheme_name, base, tone, rank, flag = (c.strip() for c in cols[:6])
        if not ch:
            raise DictionaryError("missing character", line_no, line)
        if scheme_name == "surname":
            surnames.add(ch)
            continue
        if scheme_name == "variant":
            if len(ch) != 1 or len(base) != 1:
                raise DictionaryError("variant rows pair two single characters", line_no, line)
            if ch in pairs or base in pairs.values():
                raise DictionaryError("character paired twice", line_no, line)
            pairs[ch] = base
            continue
        try:
            scheme = Scheme(scheme_name)
            if not scheme.tonal:
                raise ValueError(scheme_name)
        except ValueError:
            raise DictionaryError(f"unknown scheme {scheme_name!r}", line_no, line) from None
        if len(ch) != 1:
            raise DictionaryError("reading rows take a single character", line_no, line)
        if not tone.isdigit():
            raise DictionaryError("tone must be a digit", line_no, line)
        try:
            syl = Syllable(base, int(tone), scheme)
        except SyllableError as exc:
            raise DictionaryError(str(exc), line_no, line) from None
        if rank and not rank.isdigit():
            raise DictionaryError("rank must be a positive integer", line_no, line)
        if flag not in ("", "0", "1"):
            raise DictionaryError("surname_flag must be 0 or 1", line_no, line)
        raw.setdefault(ch, {}).setdefault(scheme, []).append(
            (syl, int(rank) if rank else None, flag == "1", line_no)
        )
    if not data_lines:
        raise DictionaryError("empty dictionary")
    return _build(raw, surnames, pairs)


def _cccanto_syllables(field_text: str, scheme: Scheme, line_no: int) -> list[Syllable]:
    out = []
    for token in re.split(r"[,/;\s]+", field_text.strip()):
        if not token:
            continue
        try:
            out.append(parse_syllable(token, scheme))
        except SyllableError:
            log.info("line %d: skipping unparseable %s reading %r", line_no, scheme.value, token)
    return out


def _load_cccanto(lines: list[str]) -> PronunciationDictionary:
    raw: _Raw = {}
    surnames: set[str] = set()
    partners: dict[str, set[str]] = {}
    data_lines = 0
    for line_no, line in enumerate(lines, 1):
        if not line.strip() or line.startswith("#"):
            continue
        data_lines += 1
        m = _CCCANTO_RE.match(line.strip())
        if m is None:
            raise DictionaryError("malformed CC-Canto line", line_no, line)
        trad, simp = m.group("trad"), m.group("simp")
        is_surname = bool(m.group("defs") and _SURNAME_RE.search(m.group("defs")))
        if len(trad) != 1:
            if is_surname and len(trad) == 2:
                surnames.add(trad)
            continue
        if len(simp) != 1:
            raise DictionaryError("simplified form length differs", line_no, line)
        readings = _cccanto_syllables(m.group("pinyin"), Scheme.PINYIN, line_no)
        if m.group("jyutping"):
            readings += _cccanto_syllables(m.group("jyutping"), Scheme.JYUTPING, line_no)
        for syl in readings:
            slot = raw.setdefault(trad, {}).setdefault(syl.scheme, [])
            for i, (known, rank, flag, ln) in enumerate(slot):
                if known == syl:
                    slot[i] = (known, rank, flag or is_surname, ln)
                    break
            else:
                slot.append((syl, None, is_surname, line_no))
        if simp != trad:
            partners.setdefault(trad, set()).add(simp)
            partners.setdefault(simp, set()).add(trad)
    if not data_lines:
        raise DictionaryError("empty dictionary")
    # only one-to-one Traditional/Simplified pairs can share a reading list
    pairs: dict[str, str] = {}
    for trad, simps in partners.items():
        (simp,) = simps if len(simps) == 1 else (None,)
        if simp and partners.get(simp) == {trad} and trad not in pairs and simp not in pairs.values():
            if trad in raw or simp not in raw:
                pairs.setdefault(simp, trad)
    return _build(raw, surnames, pairs)


def load_dictionary(source: str | PathLike, format: str = "tabular") -> PronunciationDictionary:
    """Load a dictionary file.

    ``format`` is ``"tabular"`` (tab-separated: character, scheme, base,
    tone, rank, surname_flag) or ``"cc-canto"`` (CC-Canto / CC-CEDICT
    lines; only single-character entries contribute readings).
    """
    lines = _read_lines(source)
    if format == "tabular":
        return _load_tabular(lines)
    if format in ("cc-canto", "cccanto"):
        return _load_cccanto(lines)
    raise ValueError(f"unknown dictionary format {format!r}")


def _to_raw(d: PronunciationDictionary) -> _Raw:
    return {
        ch: {s: [(r.syllable, r.rank, r.surname_reading, 0) for r in rs] for s, rs in by_scheme.items()}
        for ch, by_scheme in d.entries.items()
    }


def _pairs(d: PronunciationDictionary) -> dict[str, str]:
    return {other: ch for ch, other in d.variant_equivalents.items() if ch in d.entries}


def merge(base: PronunciationDictionary, overrides: PronunciationDictionary) -> PronunciationDictionary:
    """Overlay ``overrides`` on ``base`` per (character, scheme)."""
    raw = _to_raw(base)
    pairs = _pairs(base)
    for simp, trad in _pairs(overrides).items():
        if simp not in pairs and trad not in pairs and simp not in raw:
            pairs[simp] = trad
    for ch, by_scheme in _to_raw(overrides).items():
        key = ch if ch in raw else base.variant_equivalents.get(ch, ch)
        if key not in raw and ch in pairs:
            key = pairs[ch]
        for scheme, readings in by_scheme.items():
            raw.setdefault(key, {})[scheme] = readings
    surnames = set(base.surname_table) | set(overrides.surname_table)
    return _build(raw, surnames, pairs)


@cache
def bundled_dictionary() -> PronunciationDictionary:
    """The small dictionary shipped with the package."""
    path = resources.files("tonalink.data").joinpath("dictionary.tsv")
    with resources.as_file(path) as p:
        return load_dictionary(p, "tabular")
