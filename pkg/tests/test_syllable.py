from __future__ import annotations

import unicodedata

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tonalink.syllable import (
    TONES,
    Direction,
    RenderStyle,
    Scheme,
    Syllable,
    SyllableError,
    convert_tone_notation,
    is_legal_base,
    legal_bases,
    parse_syllable,
    render_syllable,
    segment_pinyin,
    split_numeric,
    strip_tone,
)


def _marked(base: str, index: int, mark: str) -> str:
    # independent oracle: compose the combining mark onto one letter
    return unicodedata.normalize("NFC", base[: index + 1] + mark + base[index + 1 :])


class TestParse:
    def test_jyutping_numeric(self):
        assert parse_syllable("joeng4", Scheme.JYUTPING) == Syllable("joeng", 4, Scheme.JYUTPING)

    def test_pinyin_diacritic(self):
        assert parse_syllable("zhào", Scheme.PINYIN) == Syllable("zhao", 4, Scheme.PINYIN)

    def test_pinyin_unmarked_is_neutral(self):
        assert parse_syllable("ma", Scheme.PINYIN).tone == 5

    def test_tone_out_of_range(self):
        with pytest.raises(SyllableError):
            parse_syllable("joeng7", Scheme.JYUTPING)

    def test_missing_jyutping_tone(self):
        with pytest.raises(SyllableError, match="missing tone"):
            parse_syllable("joeng", Scheme.JYUTPING)

    def test_illegal_base_named(self):
        with pytest.raises(SyllableError, match="xyz"):
            parse_syllable("xyz1", Scheme.PINYIN)

    def test_umlaut_inputs_agree(self):
        forms = {parse_syllable(t, Scheme.PINYIN) for t in ("lv4", "lu:4", "lü4", "lǜ")}
        assert len(forms) == 1

    def test_capitalised_input(self):
        assert parse_syllable("Zau1", Scheme.JYUTPING) == Syllable("zau", 1, Scheme.JYUTPING)

    def test_syllable_validates(self):
        with pytest.raises(SyllableError):
            Syllable("wong", 9, Scheme.JYUTPING)


class TestRender:
    def test_numeric(self):
        assert render_syllable(Syllable("zau", 1, Scheme.JYUTPING), RenderStyle.NUMERIC) == "zau1"

    def test_toneless(self):
        assert render_syllable(Syllable("zhao", 4, Scheme.PINYIN), RenderStyle.TONELESS) == "zhao"

    def test_xiong2_mark_on_o(self):
        got = render_syllable(Syllable("xiong", 2, Scheme.PINYIN), RenderStyle.DIACRITIC)
        assert got == _marked("xiong", 2, "́") == "xióng"

    @pytest.mark.parametrize(
        "base, tone, index, mark",
        [("liu", 2, 2, "́"), ("gui", 4, 2, "̀"), ("hao", 3, 1, "̌"), ("mei", 2, 1, "́")],
    )
    def test_vowel_priority(self, base, tone, index, mark):
        got = render_syllable(Syllable(base, tone, Scheme.PINYIN), RenderStyle.DIACRITIC)
        assert got == _marked(base, index, mark)

    def test_jyutping_diacritic_rejected(self):
        with pytest.raises(SyllableError, match="unsupported style"):
            render_syllable(Syllable("wong", 4, Scheme.JYUTPING), RenderStyle.DIACRITIC)

    def test_umlaut_numeric_uses_v(self):
        assert render_syllable(parse_syllable("nǚ", Scheme.PINYIN), RenderStyle.NUMERIC) == "nv3"


class TestConvert:
    def test_single_mark(self):
        assert convert_tone_notation("ā", Direction.DIACRITIC_TO_NUMERIC) == "a1"

    def test_neutral(self):
        assert convert_tone_notation("ma5", Direction.NUMERIC_TO_DIACRITIC) == "ma"

    def test_phrase(self):
        assert convert_tone_notation("zhong1 guo2", Direction.NUMERIC_TO_DIACRITIC) == "zhōng guó"

    def test_error_index(self):
        with pytest.raises(SyllableError) as info:
            convert_tone_notation("zhong1 qqq2", Direction.NUMERIC_TO_DIACRITIC)
        assert info.value.index == 1


@pytest.mark.parametrize(
    "syl, expected",
    [
        (Syllable("wong", 4, Scheme.JYUTPING), "wong"),
        (Syllable("zhao", 4, Scheme.PINYIN), "zhao"),
        (Syllable("yan", 2, Scheme.PINYIN), "yan"),
    ],
)
def test_strip_tone(syl, expected):
    assert strip_tone(syl) == expected


def test_split_numeric():
    assert [str(s) for s in split_numeric("jia1ming2", Scheme.PINYIN)] == ["jia1", "ming2"]


def test_segment_pinyin():
    assert segment_pinyin("junjie") == ["jun", "jie"]
    assert segment_pinyin("johnny") is None


def test_grammar_sizes():
    assert len(legal_bases(Scheme.PINYIN)) == 406
    assert is_legal_base("joeng", Scheme.JYUTPING)
    assert is_legal_base("yeung", Scheme.HKG)
    assert not is_legal_base("joeng", Scheme.PINYIN)


def test_bases_have_no_digits_or_marks():
    for scheme in Scheme:
        for base in legal_bases(scheme):
            assert base.isalpha() and " " not in base
            marks = {c for c in unicodedata.normalize("NFD", base) if unicodedata.combining(c)}
            assert marks <= {"\u0308"}  # only the umlaut of ü


_pinyin = st.builds(
    lambda b, t: Syllable(b, t, Scheme.PINYIN),
    st.sampled_from(sorted(legal_bases(Scheme.PINYIN))),
    st.sampled_from(TONES[Scheme.PINYIN]),
)
_jyut = st.builds(
    lambda b, t: Syllable(b, t, Scheme.JYUTPING),
    st.sampled_from(sorted(legal_bases(Scheme.JYUTPING))),
    st.sampled_from(TONES[Scheme.JYUTPING]),
)


@given(_pinyin)
def test_pinyin_roundtrip_both_styles(syl):
    for style in (RenderStyle.NUMERIC, RenderStyle.DIACRITIC):
        assert parse_syllable(render_syllable(syl, style), Scheme.PINYIN) == syl


@given(_jyut)
def test_jyutping_roundtrip(syl):
    assert parse_syllable(render_syllable(syl, RenderStyle.NUMERIC), Scheme.JYUTPING) == syl


@given(st.lists(_pinyin, min_size=1, max_size=4))
def test_convert_inverse(syls):
    numeric = " ".join(render_syllable(s, RenderStyle.NUMERIC) for s in syls)
    marked = convert_tone_notation(numeric, Direction.NUMERIC_TO_DIACRITIC)
    assert convert_tone_notation(marked, Direction.DIACRITIC_TO_NUMERIC) == numeric
