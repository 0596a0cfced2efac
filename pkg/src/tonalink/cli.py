"""``tonalink`` command line: convert, stats, tones, impute, linksim, variants."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections.abc import Sequence
from pathlib import Path

from tonalink import corpusio, linksim, stats, tonemodel
from tonalink.namekit import is_han
from tonalink.prondict import (
    DictionaryError,
    PronunciationDictionary,
    bundled_dictionary,
    load_dictionary,
    merge,
)
from tonalink.romanise import (
    HKGVariantTable,
    Rendering,
    bundled_hkg_table,
    hkg_candidates,
    hkg_variants,
    load_hkg_table,
)
from tonalink.syllable import Scheme, SyllableError

log = logging.getLogger("tonalink")

DICT_ENV = "TONALINK_DICT"
EXIT_OK, EXIT_FATAL, EXIT_WARN = 0, 1, 2


class _WarningCounter(logging.Handler):
    def __init__(self) -> None:
        super().__init__(logging.WARNING)
        self.count = 0

    def emit(self, record: logging.LogRecord) -> None:
        self.count += 1


class _Fatal(Exception):
    pass


# ------------------------------------------------------------------ helpers


def _renderings(text: str) -> list[Rendering]:
    out = []
    for item in text.split(","):
        item = item.strip()
        if item:
            try:
                out.append(Rendering(item))
            except ValueError:
                raise argparse.ArgumentTypeError(
                    f"unknown rendering {item!r}; choose from {', '.join(r.value for r in Rendering)}"
                ) from None
    return out


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return value


def _load_resources(args) -> tuple[PronunciationDictionary, HKGVariantTable]:
    path = args.dict or os.environ.get(DICT_ENV)
    d = load_dictionary(path, format=args.dict_format) if path else bundled_dictionary()
    if args.overrides:
        d = merge(d, load_dictionary(args.overrides))
    table = load_hkg_table(args.hkg_table) if args.hkg_table else bundled_hkg_table()
    return d, table


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _processed(args, d, table) -> list[corpusio.NameRecord]:
    records = corpusio.ingest(args.input, args.input_format)
    return corpusio.process_corpus(records, d, table, strict_origin=args.strict_origin)


def _kv(items: Sequence[dict]) -> str:
    return "".join(json.dumps(item, ensure_ascii=False) + "\n" for item in items)


def _table(rows: Sequence[Sequence[object]]) -> str:
    return "".join("\t".join(str(c) for c in row) + "\n" for row in rows)


def _record_warnings(records) -> int:
    flagged = [r for r in records if r.warnings]
    for r in flagged:
        for message in r.warnings:
            log.debug("record %s: %s", r.record_id, message)
    if flagged:
        print(f"warning: {len(flagged)} of {len(records)} records carry warnings", file=sys.stderr)
    return len(flagged)


# ------------------------------------------------------------- subcommands


def cmd_convert(args) -> int:
    d, table = _load_resources(args)
    records = _processed(args, d, table)
    flagged = _record_warnings(records)
    if args.output:
        corpusio.export(records, args.output, args.output_format, args.schemes)
    else:
        corpusio.write_records(records, sys.stdout, args.output_format or "csv", args.schemes)
    return EXIT_WARN if flagged else EXIT_OK


def cmd_stats(args) -> int:
    d, table = _load_resources(args)
    records = _processed(args, d, table)
    if not records:
        raise _Fatal("empty corpus: no records to count")
    flagged = _record_warnings(records)
    result = stats.corpus_stats(records)
    described = stats.describe(records)
    if args.format == "kv":
        items = result.to_kv()
        items += [
            {"section": s, "label": label, "count": c, "pct": round(p, 1)}
            for s, label, c, p in described
        ]
        text = _kv(items)
    else:
        text = result.to_tsv() + "\n" + _table(
            [("Section", "Label", "Count", "Percent")]
            + [(s, label, c, f"{p:.1f}%") for s, label, c, p in described]
        )
    _emit(args, text)
    return EXIT_WARN if flagged else EXIT_OK


def cmd_tones(args) -> int:
    d, table = _load_resources(args)
    records = _processed(args, d, table)
    flagged = _record_warnings(records)
    scheme = Scheme(args.scheme)
    freq = stats.tone_combo_distribution(records, scheme, args.length)
    if not freq.total:
        raise _Fatal("no tone sequences found in the corpus")
    ranked = freq.ranked()
    coverage = stats.topk_coverage(freq, args.k)
    try:
        exponent, r2 = stats.zipf_fit(freq)
        zipf = {"zipf_exponent": round(exponent, 4), "zipf_r2": round(r2, 4)}
    except ValueError as exc:
        log.info("zipf fit skipped: %s", exc)
        zipf = {"zipf_exponent": None, "zipf_r2": None}
    if args.format == "kv":
        items = [
            {"rank": i, "tones": "-".join(map(str, combo)), "count": c, "share": round(c / freq.total, 6)}
            for i, (combo, c) in enumerate(ranked, 1)
        ]
        items.append({"scheme": scheme.value, "k": args.k, "coverage": round(coverage, 6),
                      "total": freq.total, **zipf})
        text = _kv(items)
    else:
        rows = [("Rank", "Tones", "Count", "Share")]
        rows += [(i, "-".join(map(str, combo)), c, f"{c / freq.total * 100:.1f}%")
                 for i, (combo, c) in enumerate(ranked, 1)]
        text = _table(rows)
        text += f"\ntop-{args.k} coverage\t{coverage * 100:.1f}%\n"
        for key, value in zipf.items():
            text += f"{key}\t{'NA' if value is None else value}\n"
    _emit(args, text)
    if args.plot_data:
        Path(args.plot_data).write_text(
            _table([(i, c) for i, (_, c) in enumerate(ranked, 1)]), encoding="utf-8"
        )
    return EXIT_WARN if flagged else EXIT_OK


def _queries(args) -> list[str]:
    queries = list(args.query or [])
    if args.queries:
        for line in Path(args.queries).read_text("utf-8").splitlines():
            if line.strip() and not line.lstrip().startswith("#"):
                queries.append(line.strip())
    if not queries:
        raise _Fatal("no gap queries given (use --query or --queries)")
    return queries


def cmd_impute(args) -> int:
    scheme = Scheme(args.scheme)
    flagged = 0
    if args.empty_training:
        sequences = []
    else:
        if not args.input:
            raise _Fatal("--input is required unless --empty-training is set")
        d, table = _load_resources(args)
        records = _processed(args, d, table)
        flagged = _record_warnings(records)
        sequences = [t for t in (stats.record_tones(r, scheme) for r in records) if t]
    model = tonemodel.fit(sequences, args.order, scheme, args.alpha)
    if args.model_out:
        Path(args.model_out).write_text(model.to_tsv(), encoding="utf-8")
    compare_pair = None
    if args.compare:
        a, _, b = args.compare.partition(",")
        compare_pair = (int(a), int(b))
    items = []
    for query in _queries(args):
        seq = tonemodel.parse_tone_query(query)
        ranked = tonemodel.impute_missing_tone(model, seq)
        shown = " ".join("?" if t is None else str(t) for t in seq)
        for rank, (tone, p) in enumerate(ranked, 1):
            items.append({"query": shown, "rank": rank, "tone": tone, "probability": round(p, 6)})
        if compare_pair:
            gap = seq.index(None)
            ratio = tonemodel.likelihood_ratio(model, seq[:gap], *compare_pair)
            items.append({"query": shown, "ratio": f"P({compare_pair[0]})/P({compare_pair[1]})",
                          "value": round(ratio, 6)})
    if args.format == "kv":
        text = _kv(items)
    else:
        rows = [("Query", "Rank", "Tone", "Probability")]
        for item in items:
            if "rank" in item:
                rows.append((item["query"], item["rank"], item["tone"], f"{item['probability']:.6f}"))
            else:
                rows.append((item["query"], "ratio", item["ratio"], f"{item['value']:.6f}"))
        text = _table(rows)
    _emit(args, text)
    return EXIT_WARN if flagged else EXIT_OK


def cmd_linksim(args) -> int:
    d, table = _load_resources(args)
    if args.input:
        records = _processed(args, d, table)
        names = [r.han for r in records if r.han is not None]
    else:
        names = linksim.synthesise_names(args.n, args.seed, d, table)
    pm = linksim.PerturbationModel(
        args.perturb_hkg, args.perturb_tone_drop, args.perturb_order_swap,
        args.perturb_middle_split, args.seed,
    )
    corpus = linksim.generate_pair_corpus(names, pm, d, table, args.recorded)
    strategies = []
    for scheme in args.schemes:
        if args.transform == "none":
            spec = None
        else:
            spec = linksim.BlockingKeySpec(scheme, args.field, args.transform)
        abe = spec is not None and spec.transform is linksim.Transform.FIRST_SYLLABLE_ABE
        strategies.append(linksim.Strategy(
            scheme.value, scheme, spec, linksim.Comparator(args.comparator), args.threshold, abe
        ))
    results = [(s, linksim.run_strategy(corpus, s, d, table)) for s in strategies]
    if args.truth:
        Path(args.truth).write_text(
            _table([("file_a", "file_b")] + sorted(corpus.truth, key=lambda p: int(p[0][1:]))),
            encoding="utf-8",
        )
    if args.format == "kv":
        text = _kv([{"strategy": s.name, "blocking": _spec_label(s), **r.as_dict()} for s, r in results])
    else:
        keys = list(results[0][1].as_dict()) if results else []
        rows = [("metric", *(s.name for s, _ in results))]
        rows.append(("blocking", *(_spec_label(s) for s, _ in results)))
        for key in keys:
            rows.append((key, *(r.as_dict()[key] for _, r in results)))
        text = _table(rows)
    _emit(args, text)
    return EXIT_OK


def _spec_label(strategy: linksim.Strategy) -> str:
    spec = strategy.blocking
    return "none" if spec is None else f"{spec.scheme.value}:{spec.field.value}:{spec.transform.value}"


def cmd_variants(args) -> int:
    d, table = _load_resources(args)
    items = []
    for query in args.items:
        if query and all(is_han(ch) for ch in query):
            for ch in query:
                spellings = table.forward.get(d.key(ch)) or table.forward.get(ch) or ()
                for rank, spelling in enumerate(spellings, 1):
                    items.append({"query": ch, "rank": rank, "spelling": spelling})
                if not hkg_variants(ch, table, d):
                    log.info("no spellings for %r", ch)
        else:
            for ch, syl in sorted(hkg_candidates(query, table, d), key=lambda c: (str(c[1]), c[0])):
                items.append({"query": query.lower(), "character": ch, "jyutping": str(syl)})
    if args.format == "kv":
        text = _kv(items)
    else:
        text = _table([[str(v) for v in item.values()] for item in items])
    _emit(args, text)
    return EXIT_OK


# ------------------------------------------------------------------ parser


def _shared(p: argparse.ArgumentParser, *, corpus: bool = True) -> None:
    p.add_argument("--config", help="flat key=value file; command-line flags win")
    p.add_argument("--output", "-o", help="write output here instead of stdout")
    p.add_argument("--format", choices=("table", "kv"), default="table",
                   help="human table or line-delimited JSON records")
    p.add_argument("--dict", help=f"pronunciation dictionary (default: ${DICT_ENV} or bundled)")
    p.add_argument("--dict-format", choices=("tabular", "cc-canto"), default="tabular")
    p.add_argument("--overrides", help="tabular dictionary whose entries replace the base")
    p.add_argument("--hkg-table", help="character<TAB>spelling table, canonical spelling first")
    p.add_argument("-v", "--verbose", action="count", default=0)
    if corpus:
        p.add_argument("--input", "-i", help="CSV/TSV with chinese_name and english_name columns")
        p.add_argument("--input-format", choices=("csv", "tsv"))
        p.add_argument("--strict-origin", action="store_true",
                       help="classify every non-Mandarin record as Cantonese")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="tonalink", description="Romanise, count and link Chinese personal names."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    subs: dict[str, argparse.ArgumentParser] = {}

    p = sub.add_parser("convert", help="add romanised columns to a name list")
    _shared(p)
    p.add_argument("--schemes", type=_renderings,
                   default=list(corpusio.ROMANISED_RENDERINGS),
                   help="comma list of renderings (default: all five)")
    p.add_argument("--output-format", choices=("csv", "tsv"))
    p.set_defaults(func=cmd_convert)
    subs["convert"] = p

    p = sub.add_parser("stats", help="distinct-value counts and descriptive tallies")
    _shared(p)
    p.set_defaults(func=cmd_stats)
    subs["stats"] = p

    p = sub.add_parser("tones", help="full-name tone combinations, coverage and Zipf fit")
    _shared(p)
    p.add_argument("--scheme", choices=("jyutping", "pinyin"), default="jyutping")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--length", type=int, help="only names with this many syllables")
    p.add_argument("--plot-data", help="write rank<TAB>count pairs here")
    p.set_defaults(func=cmd_tones)
    subs["tones"] = p

    p = sub.add_parser("impute", help="rank candidate tones for a gap")
    _shared(p)
    p.add_argument("--scheme", choices=("jyutping", "pinyin"), default="pinyin")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--query", action="append", help='gap query such as "2 3 ?" (repeatable)')
    p.add_argument("--queries", help="file with one gap query per line")
    p.add_argument("--compare", help="tone pair A,B for a likelihood ratio, e.g. 2,4")
    p.add_argument("--empty-training", action="store_true", help="use an untrained model")
    p.add_argument("--model-out", help="write fitted counts as TSV")
    p.set_defaults(func=cmd_impute)
    subs["impute"] = p

    p = sub.add_parser("linksim", help="simulate two-file linkage under romanisation noise")
    _shared(p)
    p.add_argument("--n", type=int, default=500, help="synthetic names when --input is absent")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--recorded", type=Rendering, default=Rendering.HKG,
                   choices=(Rendering.HKG, Rendering.JYUTPING))
    p.add_argument("--perturb-hkg", type=_probability, default=0.0)
    p.add_argument("--perturb-tone-drop", type=_probability, default=0.0)
    p.add_argument("--perturb-order-swap", type=_probability, default=0.0)
    p.add_argument("--perturb-middle-split", type=_probability, default=0.0)
    p.add_argument("--schemes", type=_renderings, default=[Rendering.HKG, Rendering.JYUTPING],
                   help="normalisation per strategy, also used for blocking keys")
    p.add_argument("--field", choices=[f.value for f in linksim.BlockField], default="surname")
    p.add_argument("--transform", choices=[*(t.value for t in linksim.Transform), "none"],
                   default="full")
    p.add_argument("--comparator", choices=[c.value for c in linksim.Comparator], default="exact")
    p.add_argument("--threshold", type=float, default=1.0)
    p.add_argument("--truth", help="write the true pairing as TSV")
    p.set_defaults(func=cmd_linksim)
    subs["linksim"] = p

    p = sub.add_parser("variants", help="spellings of a character, or characters of a spelling")
    _shared(p, corpus=False)
    p.add_argument("items", nargs="+", help="Han characters or romanised tokens")
    p.set_defaults(func=cmd_variants)
    subs["variants"] = p
    return parser, subs


def _read_config(path: str, parser: argparse.ArgumentParser) -> dict[str, object]:
    known = {a.dest: a for a in parser._actions}
    out: dict[str, object] = {}
    for line_no, line in enumerate(Path(path).read_text("utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lstrip("-").replace("-", "_")
        value = value.strip()
        if not sep or key not in known or key in ("config", "func", "help"):
            raise _Fatal(f"{path}:{line_no}: unknown config entry {line!r}")
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):
            out[key] = value.lower() in ("1", "true", "yes", "on")
        elif isinstance(action, argparse._AppendAction):
            out[key] = [value]
        else:
            out[key] = value
    return out


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    counter = _WarningCounter()
    root = logging.getLogger("tonalink")
    root.addHandler(counter)
    try:
        args = parser.parse_args(argv)
        if args.config:
            subs[args.command].set_defaults(**_read_config(args.config, subs[args.command]))
            args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        if args.command not in ("variants", "impute", "linksim") and not args.input:
            raise _Fatal("--input is required")
        code = args.func(args)
    except (_Fatal, corpusio.IngestError, DictionaryError, SyllableError, ValueError, KeyError, OSError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return EXIT_FATAL
    finally:
        root.removeHandler(counter)
    if code == EXIT_OK and counter.count:
        return EXIT_WARN
    return code


if __name__ == "__main__":
    sys.exit(main())
