from __future__ import annotations

import pytest

from tonalink.namekit import HanName
from tonalink.romanise import (
    Rendering,
    canonical_variant,
    hkg_candidates,
    hkg_variants,
    load_hkg_table,
    render_romanised,
    romanise_name,
    toneless_projection,
)
from tonalink.prondict import DictionaryError
from tonalink.syllable import Scheme, Syllable

J = Scheme.JYUTPING


def test_chow_jyutping(d):
    rn = romanise_name(HanName("周", "明"), d, Rendering.JYUTPING)
    assert str(rn.surname[0]) == "zau1"


def test_chow_pinyin(d):
    rn = romanise_name(HanName("周", "明"), d, Rendering.PINYIN_NUMERIC)
    assert str(rn.surname[0]) == "zhou1"


def test_yeung_canonical(d, table):
    rn = romanise_name(HanName("楊", "明"), d, Rendering.HKG, table)
    assert rn.surname == ("yeung",)
    assert canonical_variant("杨", table, d) == "yeung"


def test_yeung_variants(d, table):
    assert hkg_variants("楊", table) == {"yang", "young", "yep", "yong", "yeung", "yeang", "yung"}


def test_chow_variants(table):
    assert hkg_variants("周", table) == {"chow", "chau", "chiau"}


def test_unmapped_variant(table):
    assert hkg_variants("A", table) == frozenset()


def test_chiu_candidates(d, table):
    assert hkg_candidates("chiu", table, d) == {
        ("趙", Syllable("ziu", 6, J)),
        ("邱", Syllable("jau", 1, J)),
    }


def test_unknown_token(d, table):
    assert hkg_candidates("zzz", table, d) == frozenset()


def test_chow_candidate(d, table):
    assert ("周", Syllable("zau", 1, J)) in hkg_candidates("Chow", table, d)


def test_table_transpose(table):
    pairs = {(ch, v) for ch, vs in table.forward.items() for v in vs}
    assert pairs == {(ch, v) for v, chs in table.inverse.items() for ch in chs}
    for spelling in table.inverse:
        assert spelling.isascii() and spelling.isalpha() and spelling.islower()


def test_toneless_projection(d):
    rn = romanise_name(HanName("黃", "家明"), d, Rendering.JYUTPING)
    assert toneless_projection(rn) == ["wong", "gaa", "ming"]
    rn = romanise_name(HanName("趙", "明"), d, Rendering.PINYIN_NUMERIC)
    assert toneless_projection(rn)[0] == "zhao"


def test_yan_collision(d):
    a = romanise_name(HanName("颜", "明"), d, Rendering.PINYIN_NUMERIC)
    b = romanise_name(HanName("严", "明"), d, Rendering.PINYIN_NUMERIC)
    assert a.surname == b.surname
    assert toneless_projection(a) == toneless_projection(b)


def test_missing_character(d):
    with pytest.raises(KeyError, match="鑫"):
        romanise_name(HanName("陳", "鑫"), d, Rendering.JYUTPING)


def test_render_romanised(d):
    rn = romanise_name(HanName("王", "俊傑"), d, Rendering.PINYIN_DIACRITIC)
    assert render_romanised(rn, Rendering.PINYIN_DIACRITIC) == ("Wáng", "Jùnjié")
    assert render_romanised(rn, Rendering.PINYIN_NOTONE) == ("Wang", "Junjie")


def test_load_table(tmp_path):
    path = tmp_path / "t.tsv"
    path.write_text("# c\ts\n周\tChow\n周\tchau\n趙\tchiu\n邱\tchiu\n", encoding="utf-8")
    t = load_hkg_table(path)
    assert t.forward["周"] == ("chow", "chau")
    assert t.inverse["chiu"] == {"趙", "邱"}
    path.write_text("周\tch0w\n", encoding="utf-8")
    with pytest.raises(DictionaryError):
        load_hkg_table(path)
