"""Command-line entry point wiring the pipeline into reproducible runs.

Every subcommand validates its inputs before touching the filesystem and
derives all randomness from an explicit master seed, so a given (config,
seed) pair reproduces byte-identical outputs.  ``EMLANG_THREADS`` caps
internal parallelism where a subcommand supports it.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .analysis import AnalysisResult, MessageAnalyzer
from .corpus import EnvConfig, generate_split, read_jsonl, write_jsonl
from .errors import ConfigError, CoverageError, ParseError, ValidationError
from .hypotheses import (
    EvalSpec,
    FilePredictionsReceiver,
    GridResult,
    NullReceiver,
    OracleReceiver,
    RandomReceiver,
    TC_GRID,
    TCR_GRID,
    TN_GRID,
    evaluate,
    gen_eval_dataset,
    grid_search,
    render_report,
    report,
    write_eval_jsonl,
)
from .lexicon import Dictionary, extract_dictionary, render_dictionary
from .synthlang import LexiconSpec, make_comp_lexicon, make_nc_lexicon, mark_corpus

DEFAULT_SIZES = "200000,200000,20000"
SPLIT_NAMES = ("train", "validation", "test")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("EMLANG_THREADS", "1")))
    except ValueError:
        return 1


def _add_env_flags(parser):
    parser.add_argument("--config", type=Path, help="environment config JSON")
    parser.add_argument("--num-points", type=int, default=None)
    parser.add_argument("--distractors", type=int, default=None)
    parser.add_argument("--vocab", type=int, default=None)


def _env_config(args, seed=None) -> EnvConfig:
    if args.config:
        config = EnvConfig.from_json_dict(json.loads(args.config.read_text()))
    else:
        config = EnvConfig()
    overrides = {}
    if args.num_points is not None:
        overrides["num_points"] = args.num_points
    if args.distractors is not None:
        overrides["num_distractors"] = args.distractors
    if args.vocab is not None:
        overrides["vocab_size"] = args.vocab
    if seed is not None:
        overrides["seed"] = seed
    if overrides:
        config = EnvConfig(**{**config.to_json_dict(), **overrides})
    return config.validate()


def _grid(text: str, cast):
    values = tuple(cast(v) for v in text.split(",") if v.strip())
    if not values:
        raise ConfigError(f"empty grid {text!r}")
    return values


def cmd_gen_lexicon(args) -> int:
    if args.style == "nc":
        lex = make_nc_lexicon(
            args.seed, num_points=args.num_points or 60, vocab_size=args.vocab or 26
        )
    elif args.style in ("comp", "mixed"):
        lex = make_comp_lexicon(
            args.seed,
            num_points=args.num_points or 60,
            vocab_size=args.vocab or 26,
            with_kinds=args.style == "mixed",
            variant=not args.invariant,
            collide=args.collide,
            polysemous=args.polysemous,
        )
    else:
        raise ConfigError(f"unknown lexicon style {args.style!r}")
    lex.save(args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_gen_data(args) -> int:
    seed = args.seed
    config = _env_config(args, seed=seed)
    sizes = _grid(args.sizes, int)
    if len(sizes) > len(SPLIT_NAMES):
        raise ConfigError(f"at most {len(SPLIT_NAMES)} split sizes supported")
    lexicon = LexiconSpec.load(args.lexicon) if args.lexicon else None
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for index, (name, size) in enumerate(zip(SPLIT_NAMES, sizes)):
        corpus = generate_split(seed + index, size, config, split_name=name)
        if lexicon is not None:
            corpus = mark_corpus(
                lexicon,
                corpus,
                uncovered=args.uncovered,
                noise=args.noise,
                seed=seed + index,
            )
        write_jsonl(corpus, out_dir / f"{name}.jsonl")
        print(f"wrote {out_dir / (name + '.jsonl')} ({len(corpus)} records)")
    (out_dir / "config.json").write_text(
        json.dumps(config.to_json_dict(), indent=2) + "\n"
    )
    print(f"wrote {out_dir / 'config.json'}")
    return 0


def _load_corpus(args):
    config = None
    if args.config:
        config = EnvConfig.from_json_dict(json.loads(args.config.read_text()))
    return read_jsonl(args.corpus, config=config)


def cmd_analyze(args) -> int:
    corpus = _load_corpus(args)
    analyzer = MessageAnalyzer(
        max_top_n=max(args.tn, 15),
        integer_prior_mode=args.integer_prior,
        kind_prior_mode=args.kind_prior,
        referent_prior_mode=args.referent_prior,
    )
    analyzer.fit(corpus)
    result = analyzer.result(t_c=args.tc, t_n=args.tn)
    result.save(args.out)
    print(f"wrote {args.out}")
    if args.json:
        json.dump(
            {
                "total": result.total,
                "nc_positional": len(result.nc_positional),
                "nc_integer": len(result.nc_integer),
                "c_integer": len(result.c_integer),
                "c_positional": len(result.c_positional),
            },
            sys.stdout,
        )
        print()
    return 0


def cmd_extract_dict(args) -> int:
    result = AnalysisResult.load(args.analysis)
    t_c = result.t_c if args.tc is None else args.tc
    t_n = result.t_n if args.tn is None else args.tn
    if (t_c, t_n) != (result.t_c, result.t_n):
        print(
            f"note: analysis referent pass used t_c={result.t_c}, t_n={result.t_n}",
            file=sys.stderr,
        )
    dictionary = extract_dictionary(result, t_c, t_n, args.tc_referent)
    dictionary.save(args.out)
    print(f"wrote {args.out} ({len(dictionary)} entries)")
    if args.json:
        json.dump(dictionary.to_json_dict(), sys.stdout)
        print()
    else:
        print(render_dictionary(dictionary), end="")
    return 0


def _receiver(args):
    if args.receiver == "oracle":
        if not args.lexicon:
            raise ConfigError("--receiver oracle needs --lexicon")
        return OracleReceiver(LexiconSpec.load(args.lexicon))
    if args.receiver == "null":
        return NullReceiver()
    if args.receiver == "random":
        return RandomReceiver(seed=args.seed)
    if args.receiver == "file":
        if not args.predictions:
            raise ConfigError("--receiver file needs --predictions")
        return FilePredictionsReceiver(args.predictions)
    raise ConfigError(f"unknown receiver {args.receiver!r}")


def cmd_eval(args) -> int:
    dictionary = Dictionary.load(args.dictionary)
    config = _env_config(args)
    spec = EvalSpec(mode=args.mode, n=args.n, seed=args.seed)
    corpus = gen_eval_dataset(spec, dictionary, config)
    if args.eval_out:
        write_eval_jsonl(corpus, args.eval_out)
        print(f"wrote {args.eval_out}")
    receiver = _receiver(args)
    accuracy = evaluate(receiver, corpus)
    if args.json:
        json.dump(
            {"mode": spec.normalized_mode(), "n": len(corpus), "accuracy": accuracy},
            sys.stdout,
        )
        print()
    else:
        print(f"{spec.normalized_mode()} accuracy over {len(corpus)}: {accuracy:.4f}")
    return 0


def cmd_grid_search(args) -> int:
    corpus = _load_corpus(args)
    receiver = _receiver(args)
    result = grid_search(
        corpus,
        receiver,
        t_c_grid=_grid(args.tc_grid, float),
        t_n_grid=_grid(args.tn_grid, int),
        t_c_referent_grid=_grid(args.tcr_grid, float),
        eval_n=args.eval_n,
        seed=args.seed,
        threads=_threads(),
    )
    result.save(args.out)
    print(f"wrote {args.out} ({len(result.rows)} rows)")
    if args.json:
        json.dump(result.best, sys.stdout)
        print()
    else:
        for mode, row in sorted(result.best.items()):
            print(
                f"best {mode}: accuracy={row['accuracy']:.4f} at "
                f"t_c={row['t_c']} t_n={row['t_n']} t_cr={row['t_c_referent']}"
            )
    return 0


def cmd_report(args) -> int:
    accuracies: dict[str, list[float]] = {}
    for grid_path in args.grid:
        grid = GridResult.load(grid_path)
        for mode, row in grid.best.items():
            accuracies.setdefault(mode, []).append(row["accuracy"])
    dictionary = Dictionary.load(args.dictionary) if args.dictionary else None
    data = report(accuracies, dictionary=dictionary)
    if args.out:
        Path(args.out).write_text(json.dumps(data, indent=2) + "\n")
        print(f"wrote {args.out}")
    if args.json:
        json.dump(data, sys.stdout)
        print()
    else:
        print(render_report(data), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emlang",
        description="Referential-game corpora, NPMI collocation analysis, "
        "dictionary extraction, and dictionary-driven evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-lexicon", help="write a synthetic ground-truth lexicon")
    p.add_argument("--style", choices=("nc", "comp", "mixed"), default="mixed")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--num-points", type=int, default=None)
    p.add_argument("--vocab", type=int, default=None)
    p.add_argument("--invariant", action="store_true",
                   help="position-invariant compositional n-grams")
    p.add_argument("--collide", action="store_true",
                   help="reuse bigram values across message shapes")
    p.add_argument("--polysemous", type=int, default=0,
                   help="number of integer pairs sharing one n-gram")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_gen_lexicon)

    p = sub.add_parser("gen-data", help="generate train/validation/test splits")
    _add_env_flags(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--sizes", default=DEFAULT_SIZES,
                   help=f"comma-separated split sizes (default {DEFAULT_SIZES})")
    p.add_argument("--lexicon", type=Path, default=None,
                   help="mark records with this synthetic lexicon")
    p.add_argument("--uncovered", choices=("error", "drop", "resample"),
                   default="resample")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("analyze", help="run both collocation pipelines")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--tc", type=float, default=0.5,
                   help="pruning threshold for the referent pass")
    p.add_argument("--tn", type=int, default=1)
    p.add_argument("--integer-prior", choices=("static", "empirical"),
                   default="static")
    p.add_argument("--kind-prior", choices=("empirical", "static"),
                   default="empirical")
    p.add_argument("--referent-prior", choices=("empirical", "kind", "static"),
                   default="empirical")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("extract-dict", help="threshold associations into a dictionary")
    p.add_argument("--analysis", type=Path, required=True)
    p.add_argument("--tc", type=float, default=None)
    p.add_argument("--tn", type=int, default=None)
    p.add_argument("--tc-referent", type=float, default=0.3)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_extract_dict)

    p = sub.add_parser("eval", help="dictionary-driven receiver evaluation")
    _add_env_flags(p)
    p.add_argument("--dictionary", type=Path, required=True)
    p.add_argument("--mode", required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--receiver", choices=("oracle", "null", "random", "file"),
                   default="oracle")
    p.add_argument("--lexicon", type=Path, default=None)
    p.add_argument("--predictions", type=Path, default=None)
    p.add_argument("--eval-out", type=Path, default=None,
                   help="write the eval corpus (with expected_message) here")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("grid-search", help="sweep thresholds, evaluate every mode")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tc-grid", default=",".join(str(v) for v in TC_GRID))
    p.add_argument("--tn-grid", default=",".join(str(v) for v in TN_GRID))
    p.add_argument("--tcr-grid", default=",".join(str(v) for v in TCR_GRID))
    p.add_argument("--eval-n", type=int, default=500)
    p.add_argument("--receiver", choices=("oracle", "null", "random", "file"),
                   default="oracle")
    p.add_argument("--lexicon", type=Path, default=None)
    p.add_argument("--predictions", type=Path, default=None)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_grid_search)

    p = sub.add_parser("report", help="aggregate grid results into a report")
    p.add_argument("--grid", type=Path, action="append", required=True,
                   help="grid-search output JSON (repeatable, one per run)")
    p.add_argument("--dictionary", type=Path, default=None)
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValidationError, ParseError, CoverageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
