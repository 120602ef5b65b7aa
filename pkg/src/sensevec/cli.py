"""Command-line front end.

Subcommands: train, nn, disambiguate, likelihood, wsi, export, pseudo,
info.  Success output goes to stdout, diagnostics to stderr, and every
failure exits nonzero with a one-line message.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import corpus as corpus_mod
from .corpus import iter_training_pairs, make_pseudoword_corpus, read_tokens
from .model import prior_sense_probs, sense_count
from .predict import disambiguate, nearest_neighbors, predictive_loglik
from .serialize import load_model, save_model
from .train import TrainingConfig, train
from .wsi import evaluate_wsi, load_wsi_dataset, write_wsi_report


class CliError(Exception):
    """User-facing error with a one-line message."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sensevec",
        description="Multi-prototype word embeddings: train, query, evaluate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model on a text corpus")
    p.add_argument("--corpus", required=True, help="UTF-8 text, whitespace tokens")
    p.add_argument("--output", required=True, help="model file to write")
    p.add_argument("--dim", type=int, default=300)
    p.add_argument("--senses", type=int, default=30)
    p.add_argument("--alpha", type=float, default=0.15)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--min-count", type=int, default=20)
    p.add_argument("--epochs", type=int, default=1)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("nn", help="nearest neighbors of a word's senses")
    p.add_argument("--model", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--sense", type=int, default=None, help="one sense only")
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--epsilon", type=float, default=1e-3)

    p = sub.add_parser(
        "disambiguate",
        help="read 'word | context words' lines from stdin, print posteriors",
    )
    p.add_argument("--model", required=True)

    p = sub.add_parser("likelihood", help="average log-likelihood per context word")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True, help="held-out text")
    p.add_argument("--window", type=int, default=10)

    p = sub.add_parser("wsi", help="evaluate word-sense induction on a TSV dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--context-width", type=int, default=10)
    p.add_argument("--output", default=None, help="report TSV (default stdout)")

    p = sub.add_parser("export", help="write 'word#k prob v1 ... vD' text vectors")
    p.add_argument("--model", required=True)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--output", default=None, help="default stdout")

    p = sub.add_parser("pseudo", help="merge word pairs into pseudo-words")
    p.add_argument("--corpus", required=True)
    p.add_argument(
        "--merge",
        action="append",
        required=True,
        metavar="A,B[,NEW]",
        help="repeatable; NEW defaults to A_B",
    )
    p.add_argument("--output-corpus", required=True)
    p.add_argument("--output-labels", required=True)

    p = sub.add_parser("info", help="print model header and sense histogram")
    p.add_argument("--model", required=True)
    p.add_argument("--epsilon", type=float, default=1e-3)
    return parser


def _cmd_train(args) -> None:
    if args.dim < 1:
        raise CliError("--dim must be >= 1")
    if args.senses < 1:
        raise CliError("--senses must be >= 1")
    if args.alpha <= 0:
        raise CliError("--alpha must be > 0")
    config = TrainingConfig(
        window=args.window,
        epochs=args.epochs,
        dim=args.dim,
        n_senses=args.senses,
        alpha=args.alpha,
        min_count=args.min_count,
        seed=args.seed,
        workers=args.workers,
    )
    tokens = list(read_tokens(args.corpus))
    model = train(tokens, config, progress=sys.stderr.isatty())
    save_model(model, args.output)
    print(
        f"trained {model.n_words} words, dim {model.dim}, "
        f"{model.n_senses} senses -> {args.output}"
    )


def _lookup(model, token: str) -> int:
    if token not in model.vocab:
        raise CliError(f"word {token!r} not in vocabulary")
    return model.vocab.id_of[token]


def _cmd_nn(args) -> None:
    model = load_model(args.model)
    word = _lookup(model, args.word)
    probs = prior_sense_probs(model, word)
    senses = (
        [args.sense]
        if args.sense is not None
        else [k for k in range(model.n_senses) if probs[k] > args.epsilon]
    )
    for k in senses:
        if not 0 <= k < model.n_senses:
            raise CliError(f"sense index {k} out of range")
        print(f"{args.word}#{k}  p={probs[k]:.4f}")
        for v, k2, cos in nearest_neighbors(model, word, k, args.top, args.epsilon):
            print(f"  {model.vocab.words[v]}#{k2}  {cos:.4f}")


def _cmd_disambiguate(args) -> None:
    model = load_model(args.model)
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        if "|" not in line:
            raise CliError("expected 'word | context words'")
        target, _, context = line.partition("|")
        word = _lookup(model, target.strip())
        ctx_ids = model.vocab.encode(context.split())
        posterior = disambiguate(model, word, ctx_ids.tolist())
        print(" ".join(f"{p:.6f}" for p in posterior))


def _cmd_likelihood(args) -> None:
    model = load_model(args.model)
    ids = model.vocab.encode(read_tokens(args.corpus))
    pairs = list(iter_training_pairs(ids, args.window))
    print(f"{predictive_loglik(model, pairs):.6f}")


def _cmd_wsi(args) -> None:
    model = load_model(args.model)
    dataset = load_wsi_dataset(args.dataset)
    report = evaluate_wsi(model, dataset, args.context_width)
    for target in report.skipped:
        print(f"skipping {target!r}: not in vocabulary", file=sys.stderr)
    if args.output is None:
        write_wsi_report(sys.stdout, report)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            write_wsi_report(fh, report)


def _cmd_export(args) -> None:
    model = load_model(args.model)
    out = sys.stdout if args.output is None else open(args.output, "w", encoding="utf-8")
    try:
        for w, token in enumerate(model.vocab.words):
            probs = prior_sense_probs(model, w)
            for k in range(model.n_senses):
                if probs[k] > args.epsilon:
                    vec = " ".join(repr(float(x)) for x in model.in_vecs[w, k])
                    out.write(f"{token}#{k} {probs[k]:.6e} {vec}\n")
    finally:
        if out is not sys.stdout:
            out.close()


def _cmd_pseudo(args) -> None:
    merges = []
    for spec_str in args.merge:
        fields = spec_str.split(",")
        if len(fields) == 2:
            a, b = fields
            new_token = f"{a}_{b}"
        elif len(fields) == 3:
            a, b, new_token = fields
        else:
            raise CliError(f"bad --merge {spec_str!r}, expected A,B[,NEW]")
        merges.append((a, b, new_token))
    tokens = list(read_tokens(args.corpus))
    corrupted, labels = make_pseudoword_corpus(tokens, merges)
    with open(args.output_corpus, "w", encoding="utf-8") as fh:
        fh.write(" ".join(corrupted))
        fh.write("\n")
    corpus_mod.write_gold_labels(args.output_labels, labels)
    print(f"replaced {len(labels)} occurrences across {len(merges)} merges")


def _cmd_info(args) -> None:
    model = load_model(args.model)
    print(f"words {model.n_words}")
    print(f"dim {model.dim}")
    print(f"senses {model.n_senses}")
    print(f"alpha {model.alpha}")
    print(f"total_tokens {model.vocab.total_tokens}")
    histogram: dict[int, int] = {}
    for w in range(model.n_words):
        k = sense_count(model, w, args.epsilon)
        histogram[k] = histogram.get(k, 0) + 1
    print(f"sense histogram (epsilon {args.epsilon:g}):")
    for k in sorted(histogram):
        print(f"  {k} senses: {histogram[k]} words")


_COMMANDS = {
    "train": _cmd_train,
    "nn": _cmd_nn,
    "disambiguate": _cmd_disambiguate,
    "likelihood": _cmd_likelihood,
    "wsi": _cmd_wsi,
    "export": _cmd_export,
    "pseudo": _cmd_pseudo,
    "info": _cmd_info,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except BrokenPipeError:
        # downstream closed early (e.g. | head); not an error
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except (CliError, OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
