"""Additive-smoothed tone n-gram model and single-gap tone imputation."""

from __future__ import annotations

import re
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from os import PathLike
from pathlib import Path

from tonalink.syllable import TONES, Scheme

__all__ = [
    "GAP",
    "ToneNgramModel",
    "fit",
    "impute_missing_tone",
    "likelihood_ratio",
    "load_model",
    "next_tone_distribution",
    "parse_tone_query",
]

GAP = None
_GAP_MARKS = {"?", "_", "gap"}


@dataclass
class ToneNgramModel:
    order: int
    alphabet: tuple[int, ...]
    alpha: float = 1.0
    context_counts: dict[tuple[int, ...], Counter] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValueError("order must be at least 1")
        if self.alpha <= 0:
            raise ValueError("smoothing constant must be positive")
        self.alphabet = tuple(self.alphabet)

    def context_of(self, prefix: Sequence[int]) -> tuple[int, ...]:
        keep = self.order - 1
        return tuple(prefix[len(prefix) - keep :]) if keep else ()

    def to_tsv(self) -> str:
        lines = [
            f"# order={self.order}",
            f"# alpha={self.alpha!r}",
            "# alphabet=" + ",".join(map(str, self.alphabet)),
            "# context\ttone\tcount",
        ]
        for context in sorted(self.context_counts, key=lambda c: (len(c), c)):
            counter = self.context_counts[context]
            for tone in sorted(counter):
                if counter[tone]:
                    lines.append(f"{'-'.join(map(str, context))}\t{tone}\t{counter[tone]}")
        return "\n".join(lines) + "\n"


def fit(
    sequences: Iterable[Sequence[int]],
    order: int = 3,
    alphabet: Sequence[int] | Scheme = Scheme.PINYIN,
    alpha: float = 1.0,
) -> ToneNgramModel:
    """Count (context, next tone) pairs over every position of every sequence.

    Early positions use the shorter contexts available at the start.
    """
    if isinstance(alphabet, (str, Scheme)):
        alphabet = TONES[Scheme(alphabet)]
    model = ToneNgramModel(order, tuple(alphabet), alpha)
    legal = set(model.alphabet)
    for index, seq in enumerate(sequences):
        seq = tuple(seq)
        bad = [t for t in seq if t not in legal]
        if bad:
            raise ValueError(f"sequence {index}: tone {bad[0]!r} outside alphabet {model.alphabet}")
        for i, tone in enumerate(seq):
            context = model.context_of(seq[:i])
            model.context_counts.setdefault(context, Counter())[tone] += 1
    return model


def _fractions(model: ToneNgramModel, prefix: Sequence[int]) -> dict[int, Fraction]:
    counts = model.context_counts.get(model.context_of(tuple(prefix)), Counter())
    alpha = Fraction(model.alpha)
    total = sum(counts[t] for t in model.alphabet) + alpha * len(model.alphabet)
    return {t: (counts[t] + alpha) / total for t in model.alphabet}


def next_tone_distribution(model: ToneNgramModel, prefix: Sequence[int]) -> dict[int, float]:
    """P(tone | last order-1 tones of prefix), over the whole alphabet."""
    legal = set(model.alphabet)
    for t in prefix:
        if t not in legal:
            raise ValueError(f"tone {t!r} outside alphabet {model.alphabet}")
    return {t: float(p) for t, p in _fractions(model, prefix).items()}


def impute_missing_tone(
    model: ToneNgramModel, sequence: Sequence[int | None]
) -> list[tuple[int, float]]:
    """Rank candidate tones for the single gap, using the tones before it."""
    gaps = [i for i, t in enumerate(sequence) if t is GAP]
    if len(gaps) != 1:
        raise ValueError(f"expected exactly one gap, found {len(gaps)}")
    dist = next_tone_distribution(model, sequence[: gaps[0]])
    return sorted(dist.items(), key=lambda kv: (-kv[1], kv[0]))


def likelihood_ratio(model: ToneNgramModel, prefix: Sequence[int], tone_a: int, tone_b: int) -> float:
    for t in (tone_a, tone_b):
        if t not in model.alphabet:
            raise ValueError(f"tone {t!r} outside alphabet {model.alphabet}")
    probs = _fractions(model, prefix)
    return float(probs[tone_a] / probs[tone_b])


def parse_tone_query(text: str) -> list[int | None]:
    """Parse ``"2 3 ?"`` or ``"2-3-_"`` into tones with None for the gap."""
    tokens = [t for t in re.split(r"[\s,\-]+", text.strip()) if t]
    out: list[int | None] = []
    for token in tokens:
        if token.lower() in _GAP_MARKS:
            out.append(GAP)
        elif token.isdigit():
            out.append(int(token))
        else:
            raise ValueError(f"bad tone {token!r} in query {text!r}")
    return out


def load_model(source: str | PathLike) -> ToneNgramModel:
    meta: dict[str, str] = {}
    rows = []
    for line in Path(source).read_text("utf-8").splitlines():
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition("=")
            if sep:
                meta[key.strip()] = value.strip()
            continue
        if not line.strip():
            continue
        context, tone, count = line.split("\t")
        rows.append((tuple(int(t) for t in context.split("-") if t), int(tone), int(count)))
    try:
        model = ToneNgramModel(
            int(meta["order"]),
            tuple(int(t) for t in meta["alphabet"].split(",")),
            float(meta["alpha"]),
        )
    except KeyError as exc:
        raise ValueError(f"model file lacks {exc.args[0]!r} header") from None
    for context, tone, count in rows:
        model.context_counts.setdefault(context, Counter())[tone] += count
    return model
