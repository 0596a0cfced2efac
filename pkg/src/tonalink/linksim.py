"""Two-file record linkage simulation under romanisation noise.

A base list of Han names is rendered into file A as-is and into file B
through a seeded perturbation model. Strategies differ in how tokens are
normalised before blocking and comparison; results are scored against the
known identity pairing.
"""

from __future__ import annotations

import logging
import random
from collections import Counter, defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from itertools import product

from tonalink.namekit import HanName, NameOrder, is_han, order_from_flags, repair_misplaced_middle
from tonalink.prondict import Context, PronunciationDictionary, bundled_dictionary, lookup, primary_reading
from tonalink.romanise import HKGVariantTable, Rendering, bundled_hkg_table, canonical_variant, hkg_candidates
from tonalink.syllable import TONES, Scheme, SyllableError, is_legal_base, parse_syllable

__all__ = [
    "BlockingKeySpec",
    "Comparator",
    "LinkRecord",
    "LinkageResult",
    "Normaliser",
    "PairCorpus",
    "PerturbationModel",
    "Strategy",
    "Transform",
    "abe_cluster",
    "all_pairs",
    "block",
    "candidate_pairs",
    "compare",
    "evaluate",
    "generate_pair_corpus",
    "run_strategy",
    "synthesise_names",
]

log = logging.getLogger(__name__)


class Transform(str, Enum):
    FULL = "full"
    FIRST_SYLLABLE_ABE = "first_syllable_abe"
    TONELESS = "toneless"


class Comparator(str, Enum):
    EXACT = "exact"
    PER_SYLLABLE_AGREEMENT = "per_syllable_agreement"


class BlockField(str, Enum):
    SURNAME = "surname"
    FORENAME = "forename"
    FULLNAME = "fullname"


@dataclass(frozen=True)
class PerturbationModel:
    p_hkg_variant: float = 0.0
    p_tone_drop: float = 0.0
    p_order_swap: float = 0.0
    p_middle_split: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("p_hkg_variant", "p_tone_drop", "p_order_swap", "p_middle_split"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p!r}")


@dataclass(frozen=True)
class BlockingKeySpec:
    scheme: Rendering
    field: BlockField = BlockField.SURNAME
    transform: Transform = Transform.FULL

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", Rendering(self.scheme))
        object.__setattr__(self, "field", BlockField(self.field))
        object.__setattr__(self, "transform", Transform(self.transform))
        if self.transform is Transform.TONELESS and not self.scheme.tonal:
            raise ValueError(f"toneless transform needs a tonal scheme, not {self.scheme.value}")


@dataclass(frozen=True)
class LinkRecord:
    """One romanised record as it appears in a linkage file."""

    record_id: str
    surname: tuple[str, ...]
    forename: tuple[str, ...]
    middle: tuple[str, ...] = ()

    @property
    def tokens(self) -> tuple[str, ...]:
        return (*self.surname, *self.forename, *self.middle)


@dataclass
class PairCorpus:
    file_a: list[LinkRecord]
    file_b: list[LinkRecord]
    truth: set[tuple[str, str]]
    perturbed_syllables: int = 0
    changed_syllables: int = 0
    total_syllables: int = 0


@dataclass(frozen=True)
class LinkageResult:
    true_matches_found: int
    false_matches: int
    missed_matches: int
    blocked_out_misses: int
    candidate_pairs: int
    precision: float
    recall: float
    f1: float
    precision_defined: bool = True

    def as_dict(self) -> dict[str, object]:
        return {
            "candidate_pairs": self.candidate_pairs,
            "true_matches_found": self.true_matches_found,
            "false_matches": self.false_matches,
            "missed_matches": self.missed_matches,
            "blocked_out_misses": self.blocked_out_misses,
            "precision": round(self.precision, 6),
            "recall": round(self.recall, 6),
            "f1": round(self.f1, 6),
            "precision_defined": self.precision_defined,
        }


# ------------------------------------------------------------- generation


def _clean_token(ch: str, i: int, name: HanName, d, table, recorded: Rendering) -> str:
    if recorded is Rendering.HKG:
        spelling = canonical_variant(ch, table, d)
        if spelling is None:
            raise KeyError(f"no hkg spelling for {ch!r}")
        return spelling
    context = Context.SURNAME if i < len(name.surname) else Context.FORENAME
    return str(primary_reading(d, ch, Scheme.JYUTPING, context))


def generate_pair_corpus(
    base: Sequence[HanName],
    pm: PerturbationModel,
    d: PronunciationDictionary | None = None,
    table: HKGVariantTable | None = None,
    recorded: Rendering = Rendering.HKG,
) -> PairCorpus:
    """Render ``base`` into a clean file A and a perturbed file B.

    Draw order per record is fixed so runs replay exactly: one uniform per
    syllable for the variant swap (plus a choice when it fires), then one
    each for tone drop, middle split and order swap.
    """
    d = d or bundled_dictionary()
    table = table or bundled_hkg_table()
    recorded = Rendering(recorded)
    if recorded not in (Rendering.HKG, Rendering.JYUTPING):
        raise ValueError("recorded rendering must be hkg or jyutping")
    rng = random.Random(pm.seed)
    corpus = PairCorpus([], [], set())
    for index, name in enumerate(base):
        try:
            clean = [_clean_token(ch, i, name, d, table, recorded) for i, ch in enumerate(name.full)]
        except KeyError as exc:
            log.warning("base record %d skipped: %s", index, exc.args[0])
            continue
        noisy = []
        for ch, token in zip(name.full, clean):
            corpus.total_syllables += 1
            if rng.random() < pm.p_hkg_variant:
                corpus.perturbed_syllables += 1
                options = [v for v in table.forward.get(d.key(ch), ()) if v != token]
                if options:
                    noisy.append(rng.choice(options))
                    corpus.changed_syllables += 1
                    continue
                log.info("no alternative spelling for %r; kept %r", ch, token)
            noisy.append(token)
        if rng.random() < pm.p_tone_drop:
            noisy = [t.rstrip("0123456789") for t in noisy]
        n = len(name.surname)
        a_id, b_id = f"a{index}", f"b{index}"
        corpus.file_a.append(LinkRecord(a_id, tuple(clean[:n]), tuple(clean[n:])))
        surname, forename, middle = tuple(noisy[:n]), tuple(noisy[n:]), ()
        if rng.random() < pm.p_middle_split and len(forename) >= 2:
            forename, middle = forename[:1], forename[1:]
        if rng.random() < pm.p_order_swap:
            surname, forename = forename, surname
        corpus.file_b.append(LinkRecord(b_id, surname, forename, middle))
        corpus.truth.add((a_id, b_id))
    return corpus


def synthesise_names(n: int, seed: int = 0, d: PronunciationDictionary | None = None,
                     table: HKGVariantTable | None = None) -> list[HanName]:
    """Draw ``n`` distinct names from the bundled corpus's character frequencies."""
    from tonalink.corpusio import bundled_corpus_path, ingest, process_corpus

    d = d or bundled_dictionary()
    table = table or bundled_hkg_table()
    records = [r for r in process_corpus(ingest(bundled_corpus_path()), d, table) if r.han]
    surnames = Counter(r.han.surname for r in records)
    chars = Counter(ch for r in records for ch in r.han.forename)
    lengths = Counter(len(r.han.forename) for r in records)
    s_keys, s_w = zip(*sorted(surnames.items()))
    c_keys, c_w = zip(*sorted(chars.items()))
    l_keys, l_w = zip(*sorted(lengths.items()))
    rng = random.Random(seed)
    out: list[HanName] = []
    seen: set[str] = set()
    attempts = 0
    while len(out) < n:
        attempts += 1
        if attempts > 100 * n + 1000:
            raise ValueError(f"cannot draw {n} distinct names from the bundled inventory")
        surname = rng.choices(s_keys, s_w)[0]
        length = rng.choices(l_keys, l_w)[0]
        forename = "".join(rng.choices(c_keys, c_w, k=length))
        if surname + forename in seen:
            continue
        seen.add(surname + forename)
        out.append(HanName(surname, forename))
    return out


# ----------------------------------------------------------- normalisation


def abe_cluster(forename_tokens: Sequence[str]) -> str:
    """Collapse a multi-part forename to its first token."""
    if not forename_tokens:
        raise ValueError("abe_cluster needs at least one token")
    return forename_tokens[0].lower()


def _strip(token: str) -> str:
    return token.rstrip("0123456789")


class Normaliser:
    """Maps raw tokens to comparable key sets under one target rendering.

    Two tokens agree when their key sets intersect. Results are memoised.
    """

    def __init__(self, target: Rendering, d: PronunciationDictionary | None = None,
                 table: HKGVariantTable | None = None) -> None:
        self.target = Rendering(target)
        self.d = d or bundled_dictionary()
        self.table = table or bundled_hkg_table()
        self._cache: dict[str, frozenset[str]] = {}
        self._by_reading: dict[str, set[str]] | None = None

    def _jyutping_index(self) -> dict[str, set[str]]:
        if self._by_reading is None:
            index: dict[str, set[str]] = defaultdict(set)
            for ch in self.d.entries:
                for reading in lookup(self.d, ch, Scheme.JYUTPING):
                    index[str(reading.syllable)].add(ch)
            self._by_reading = dict(index)
        return self._by_reading

    def _jyutping(self, token: str) -> set[str]:
        out: set[str] = set()
        if len(token) == 1 and is_han(token):
            reading = self._reading(token, Scheme.JYUTPING)
            return {reading} if reading else set()
        if token[-1:].isdigit():
            try:
                out.add(str(parse_syllable(token, Scheme.JYUTPING)))
            except SyllableError:
                pass
            return out
        out.update(str(s) for _, s in hkg_candidates(token, self.table, self.d))
        if is_legal_base(token, Scheme.JYUTPING):
            out.update(f"{token}{t}" for t in TONES[Scheme.JYUTPING])
        return out

    def _chars(self, token: str) -> set[str]:
        if len(token) == 1 and is_han(token):
            return {self.d.key(token)}
        index = self._jyutping_index()
        return {ch for key in self._jyutping(token) for ch in index.get(key, ())}

    def _reading(self, ch: str, scheme: Scheme) -> str | None:
        context = Context.SURNAME if self.d.is_surname(ch) else Context.UNKNOWN
        try:
            return str(primary_reading(self.d, ch, scheme, context))
        except KeyError:
            return None

    def __call__(self, token: str) -> frozenset[str]:
        token = token.lower()
        cached = self._cache.get(token)
        if cached is not None:
            return cached
        target = self.target
        if target is Rendering.HKG:
            keys = {token}
        elif target is Rendering.JYUTPING:
            keys = self._jyutping(token)
        elif target is Rendering.CHINESE:
            keys = self._chars(token)
        else:
            keys = {self._reading(ch, Scheme.PINYIN) for ch in self._chars(token)} - {None}
            if target is Rendering.PINYIN_NOTONE:
                keys = {_strip(k) for k in keys}
        result = frozenset(keys or {token})
        self._cache[token] = result
        return result

    def is_surname_token(self, token: str) -> bool:
        if self.target is Rendering.HKG:
            return bool(self.table.inverse.get(token.lower(), frozenset()) & self.d.surname_table)
        return any(self.d.is_surname(ch) for ch in self._chars(token.lower()))


def _field_is_surname(tokens: Sequence[str], norm: Normaliser) -> bool:
    return bool(tokens) and all(norm.is_surname_token(t) for t in tokens)


def prepared(record: LinkRecord, norm: Normaliser, *, abe: bool = False) -> tuple[list[str], list[str]]:
    """Undo field swaps and misplaced middle names, then optionally ABE-cluster."""
    surname, forename = list(record.surname), list(record.forename)
    order = order_from_flags(_field_is_surname(surname, norm), _field_is_surname(forename, norm))
    if order is NameOrder.SURNAME_LAST:
        surname, forename = forename, surname
    surname, forename = repair_misplaced_middle(surname, forename, record.middle)
    if abe and forename:
        forename = [abe_cluster(forename)]
    return surname, forename


# ------------------------------------------------------ blocking & scoring


def _keys(tokens: Sequence[str], spec: BlockingKeySpec, norm: Normaliser) -> set[str]:
    if not tokens:
        return {""}
    if spec.transform is Transform.FIRST_SYLLABLE_ABE:
        tokens = [abe_cluster(tokens)]
    sets = [norm(t) for t in tokens]
    if spec.transform is Transform.TONELESS:
        sets = [frozenset(_strip(k) for k in s) for s in sets]
    return {" ".join(combo) for combo in product(*(sorted(s) for s in sets))}


def block(records: Iterable[LinkRecord], spec: BlockingKeySpec, d=None, table=None,
          norm: Normaliser | None = None) -> dict[str, set[str]]:
    """Blocking key to record ids. A record may sit in several blocks."""
    norm = norm or Normaliser(spec.scheme, d, table)
    blocks: dict[str, set[str]] = defaultdict(set)
    for record in records:
        surname, forename = prepared(record, norm)
        tokens = {
            BlockField.SURNAME: surname,
            BlockField.FORENAME: forename,
            BlockField.FULLNAME: surname + forename,
        }[spec.field]
        for key in _keys(tokens, spec, norm):
            blocks[key].add(record.record_id)
    return dict(blocks)


def all_pairs(file_a: Sequence[LinkRecord], file_b: Sequence[LinkRecord]) -> set[tuple[str, str]]:
    return {(a.record_id, b.record_id) for a in file_a for b in file_b}


def candidate_pairs(file_a, file_b, spec: BlockingKeySpec | None, d=None, table=None,
                    norm: Normaliser | None = None) -> set[tuple[str, str]]:
    """Cross-file pairs sharing at least one block; every pair if unblocked."""
    if spec is None:
        return all_pairs(file_a, file_b)
    norm = norm if norm is not None and norm.target is spec.scheme else Normaliser(spec.scheme, d, table)
    blocks_a = block(file_a, spec, norm=norm)
    blocks_b = block(file_b, spec, norm=norm)
    pairs: set[tuple[str, str]] = set()
    for key, ids_a in blocks_a.items():
        ids_b = blocks_b.get(key)
        if ids_b:
            pairs.update(product(ids_a, ids_b))
    return pairs


def _profile(record: LinkRecord, norm: Normaliser, abe: bool) -> tuple[frozenset[str], ...]:
    surname, forename = prepared(record, norm, abe=abe)
    return tuple(norm(t) for t in surname + forename)


def _score(pa: Sequence[frozenset[str]], pb: Sequence[frozenset[str]], comparator: Comparator) -> float:
    longest = max(len(pa), len(pb))
    if comparator is Comparator.EXACT:
        if len(pa) != len(pb):
            return 0.0
        return 1.0 if all(x & y for x, y in zip(pa, pb)) else 0.0
    agree = sum(1 for x, y in zip(pa, pb) if x & y)
    return agree / longest if longest else 1.0


def compare(a: LinkRecord, b: LinkRecord, comparator: Comparator = Comparator.EXACT,
            normalisation: Rendering = Rendering.JYUTPING, d=None, table=None,
            *, norm: Normaliser | None = None, abe: bool = False) -> float:
    """Positional token agreement after order repair; 1.0 means full agreement."""
    norm = norm or Normaliser(normalisation, d, table)
    return _score(_profile(a, norm, abe), _profile(b, norm, abe), Comparator(comparator))


def evaluate(decisions: Mapping[tuple[str, str], float], truth: Iterable[tuple[str, str]],
             threshold: float = 1.0) -> LinkageResult:
    """Score decisions on candidate pairs; true pairs never compared count as blocked-out misses."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold!r}")
    truth = set(truth)
    links = {pair for pair, score in decisions.items() if score >= threshold}
    tp = len(links & truth)
    fp = len(links - truth)
    fn = len(truth - links)
    blocked_out = len(truth - decisions.keys())
    precision_defined = tp + fp > 0
    precision = tp / (tp + fp) if precision_defined else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return LinkageResult(tp, fp, fn, blocked_out, len(decisions), precision, recall, f1, precision_defined)


@dataclass(frozen=True)
class Strategy:
    """One linkage configuration: normalisation, optional blocking, comparator."""

    name: str
    normalisation: Rendering = Rendering.JYUTPING
    blocking: BlockingKeySpec | None = None
    comparator: Comparator = Comparator.EXACT
    threshold: float = 1.0
    abe: bool = False


def run_strategy(corpus: PairCorpus, strategy: Strategy, d=None, table=None) -> LinkageResult:
    norm = Normaliser(strategy.normalisation, d, table)
    pairs = candidate_pairs(corpus.file_a, corpus.file_b, strategy.blocking, d, table, norm=norm)
    profiles = {r.record_id: _profile(r, norm, strategy.abe) for r in (*corpus.file_a, *corpus.file_b)}
    comparator = Comparator(strategy.comparator)
    decisions = {(a, b): _score(profiles[a], profiles[b], comparator) for a, b in pairs}
    return evaluate(decisions, corpus.truth, strategy.threshold)
