"""Command line for training, exporting, serving, and sweeping."""
from __future__ import annotations

import argparse
import json
import sys

from .jobs import evaluate_corpus, export_corpus, save_sweep, serve_receiver, sweep_lengths
from .train import DivergenceError, TrainConfig, train


def cmd_train(args) -> int:
    config = TrainConfig(
        data_dir=args.data_dir,
        out_dir=args.out,
        hidden_size=args.hidden,
        learning_rate=args.lr,
        temperature=args.temperature,
        epochs=args.epochs,
        batch_size=args.batch_size,
        seed=args.seed,
        target_accuracy=args.target_accuracy,
        max_records=args.max_records,
        val_records=args.val_records,
    )
    try:
        result = train(config)
    except DivergenceError as exc:
        print(f"error: training diverged: {exc}", file=sys.stderr)
        return 1
    print(
        json.dumps(
            {
                "checkpoint": result.checkpoint_path,
                "best_val_accuracy": result.best_val_accuracy,
                "epochs_run": result.epochs_run,
            }
        )
    )
    return 0


def cmd_export(args) -> int:
    n = export_corpus(args.checkpoint, args.corpus, args.out)
    print(f"wrote {args.out} ({n} records)")
    return 0


def cmd_serve(args) -> int:
    n = serve_receiver(args.checkpoint, args.eval_corpus, args.out)
    print(f"wrote {args.out} ({n} predictions)")
    return 0


def cmd_eval(args) -> int:
    acc = evaluate_corpus(args.checkpoint, args.corpus)
    print(json.dumps({"accuracy": acc}))
    return 0


def cmd_sweep(args) -> int:
    rows = sweep_lengths(
        args.checkpoint,
        deltas=tuple(int(d) for d in args.deltas.split(",")),
        n=args.n,
        seed=args.seed,
    )
    save_sweep(rows, args.out)
    for row in rows:
        print(row)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="emlang-trainer",
        description="Neural referential-game agents over the emlang JSONL formats.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train")
    p.add_argument("--data-dir", required=True,
                   help="directory with train.jsonl/validation.jsonl/config.json")
    p.add_argument("--out", required=True)
    p.add_argument("--hidden", type=int, default=64)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--epochs", type=int, default=1000)
    p.add_argument("--batch-size", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target-accuracy", type=float, default=None)
    p.add_argument("--max-records", type=int, default=None)
    p.add_argument("--val-records", type=int, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("export")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--eval-corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("eval")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--corpus", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--deltas", default="0,5,10,20,40")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--seed", type=int, default=99)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
