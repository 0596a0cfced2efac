"""Chinese personal names across Jyutping, Pinyin and Hong Kong government spellings."""

from __future__ import annotations

from tonalink.namekit import HanName, NameWarning, render_name, segment_full_name
from tonalink.prondict import (
    Context,
    PronunciationDictionary,
    bundled_dictionary,
    load_dictionary,
    lookup,
    primary_reading,
)
from tonalink.romanise import Rendering, bundled_hkg_table, hkg_candidates, romanise_name
from tonalink.syllable import RenderStyle, Scheme, Syllable, SyllableError, parse_syllable

__version__ = "0.1.0"

__all__ = [
    "Context",
    "HanName",
    "NameWarning",
    "PronunciationDictionary",
    "RenderStyle",
    "Rendering",
    "Scheme",
    "Syllable",
    "SyllableError",
    "bundled_dictionary",
    "bundled_hkg_table",
    "hkg_candidates",
    "load_dictionary",
    "lookup",
    "parse_syllable",
    "primary_reading",
    "render_name",
    "romanise_name",
    "segment_full_name",
]
