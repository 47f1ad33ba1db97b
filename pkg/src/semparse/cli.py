"""Command-line interface: ``semparse {train,parse,eval,oracle}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 checkpoint mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .asdl import Grammar, load_grammar, parse_grammar
from .converters import CONVERTERS, get_converter
from .data import load_dataset, read_records, tokenize_utterance
from .errors import CheckpointMismatch, GrammarError, SemparseError
from .evaluation import evaluate
from .grammars import ROOT_TYPES, grammar_text, load_bundled
from .model.checkpoint import load_checkpoint, read_meta, save_checkpoint
from .model.scorer import Scorer, ScorerConfig
from .model.train import TrainConfig, train
from .search import BeamConfig, answer_prune, beam_search
from .table import load_table
from .transition import extract_actions, format_actions

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CHECKPOINT = 0, 1, 2, 3
FAIL_LINE = "<FAIL>"
DEFAULT_GRAMMAR = {"lambda": "lambda_calculus", "sql": "wikisql", "pyexpr": "pyexpr"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def resolve_grammar(args) -> Grammar:
    """``--grammar`` may be a file or a bundled grammar name; defaults follow ``--format``."""
    spec = args.grammar or DEFAULT_GRAMMAR[args.format]
    if Path(spec).is_file():
        if not args.root_type:
            raise UsageError("--root-type is required with a grammar file")
        return load_grammar(spec, args.root_type)
    if spec in ROOT_TYPES:
        if args.root_type and args.root_type != ROOT_TYPES[spec]:
            return parse_grammar(grammar_text(spec), args.root_type)
        return load_bundled(spec)
    raise UsageError(f"--grammar {spec!r} is neither a file nor one of {sorted(ROOT_TYPES)}")


def _add_common(p):
    p.add_argument("--format", choices=sorted(CONVERTERS), default="lambda", help="meaning representation")
    p.add_argument("--grammar", help="ASDL file or bundled grammar name")
    p.add_argument("--root-type", help="root type of the grammar")


def _add_beam(p):
    p.add_argument("--beam", type=int, default=5, help="beam size (1 = greedy)")
    p.add_argument("--max-actions", type=int, default=200)
    p.add_argument("--length-normalize", action="store_true")
    p.add_argument("--prune", action="store_true", help="drop SQL candidates with empty results")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="semparse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="train a model and write a checkpoint")
    _add_common(p)
    p.add_argument("--data", required=True, help="training JSONL")
    p.add_argument("--ckpt", required=True, help="output checkpoint (.npz)")
    p.add_argument("--resume", help="continue from this checkpoint")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--batch-size", type=int, default=10)
    p.add_argument("--lr", type=float, default=0.005)
    p.add_argument("--clip", type=float, default=5.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--embed-dim", type=int, default=128)
    p.add_argument("--hidden-dim", type=int, default=256)
    p.add_argument("--field-embed-dim", type=int, default=64)
    p.add_argument("--action-embed-dim", type=int, default=64)
    p.add_argument("--dropout", type=float, default=0.3)
    p.add_argument("--vocab-cutoff", type=int, default=2)
    p.add_argument("--init-scale", type=float, default=0.1)
    p.add_argument("--precision", choices=("single", "double"), default="single")
    p.add_argument("--no-parent-feeding", action="store_true")
    p.add_argument("--eval-every", type=int, default=1, help="train exact match every N epochs (0 = never)")
    p.add_argument("--target-em", type=float, help="stop once train exact match reaches this")
    p.add_argument("--log", help="also write the epoch log here")

    p = sub.add_parser("parse", help="parse utterances with a trained model")
    _add_common(p)
    p.add_argument("--ckpt", required=True)
    p.add_argument("--input", help="utterances, one per line, or JSONL with utterance/table (default stdin)")
    p.add_argument("--table", help="table JSON applied to every plain-text input line")
    p.add_argument("--nbest", type=int, default=0, help="emit up to K scored candidates per input as JSONL")
    _add_beam(p)

    p = sub.add_parser("eval", help="exact match / execution accuracy on a dataset")
    _add_common(p)
    p.add_argument("--data", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--ckpt", help="decode with this checkpoint")
    src.add_argument("--predictions", help="file of predicted MRs, one per line")
    p.add_argument("--report", help="write the JSON report here")
    _add_beam(p)

    p = sub.add_parser("oracle", help="print oracle action sequences")
    _add_common(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--data", help="JSONL dataset; sequences are separated by blank lines")
    g.add_argument("--mr", help="a single meaning representation")
    p.add_argument("--table", help="table JSON (for --mr with SQL)")
    return parser


# --- commands ---------------------------------------------------------------

def cmd_train(args, out) -> int:
    grammar = resolve_grammar(args)
    examples = load_dataset(args.data, args.format, grammar)
    if args.resume:
        scorer = load_checkpoint(args.resume, grammar)
    else:
        config = ScorerConfig(
            embed_dim=args.embed_dim, hidden_dim=args.hidden_dim,
            field_embed_dim=args.field_embed_dim, action_embed_dim=args.action_embed_dim,
            dropout_rate=args.dropout, vocab_cutoff=args.vocab_cutoff,
            scalar_precision=args.precision, parent_feeding=not args.no_parent_feeding,
            init_scale=args.init_scale,
        )
        scorer = Scorer.build(grammar, config, examples, seed=args.seed)
    tconf = TrainConfig(epochs=args.epochs, batch_size=args.batch_size, learning_rate=args.lr,
                        clip_norm=args.clip, seed=args.seed, eval_every=args.eval_every,
                        target_em=args.target_em)
    log_fh = open(args.log, "w", encoding="utf-8") if args.log else None

    def emit(stats):
        line = stats.log_line()
        print(line, file=out, flush=True)
        if log_fh:
            print(line, file=log_fh, flush=True)

    try:
        train(scorer, examples, tconf, log=emit)
    finally:
        if log_fh:
            log_fh.close()
    save_checkpoint(scorer, args.ckpt)
    return EXIT_OK


def _beam_config(args) -> BeamConfig:
    if args.beam < 1 or args.max_actions < 1:
        raise UsageError("--beam and --max-actions must be >= 1")
    return BeamConfig(args.beam, args.max_actions, args.length_normalize)


def _load_model(args, grammar) -> Scorer:
    meta = read_meta(args.ckpt)
    if meta.get("root_type") != grammar.root_type.name:
        raise CheckpointMismatch(
            f"checkpoint root type {meta.get('root_type')} != grammar root type {grammar.root_type.name}")
    return load_checkpoint(args.ckpt, grammar)


def decode(scorer, converter, utterance, table, beam: BeamConfig, prune: bool):
    """Ranked (tree, score, mr_text) triples; candidates that fail to render are skipped."""
    cands = beam_search(scorer, utterance, scorer.grammar, beam, table)
    if prune and table is not None:
        cands = answer_prune(cands, table)
    out = []
    for tree, score in cands:
        try:
            out.append((tree, score, converter.to_mr(tree, table)))
        except SemparseError:
            continue
    return out


def _parse_inputs(args):
    default_table = load_table(args.table) if args.table else None
    if args.input and args.input.endswith(".jsonl"):
        return [(tokenize_utterance(r["utterance"]), r["table"] or default_table) for _, r in read_records(args.input)]
    fh = open(args.input, encoding="utf-8") if args.input else sys.stdin
    try:
        lines = [l for l in fh.read().splitlines() if l.strip()]
    finally:
        if args.input:
            fh.close()
    return [(tokenize_utterance(l), default_table) for l in lines]


def cmd_parse(args, out) -> int:
    grammar = resolve_grammar(args)
    beam = _beam_config(args)
    if args.nbest < 0:
        raise UsageError("--nbest must be >= 0")
    scorer = _load_model(args, grammar)
    converter = get_converter(args.format)
    if args.nbest:
        beam = BeamConfig(max(beam.beam_size, args.nbest), beam.max_actions, beam.length_normalize)
    for tokens, table in _parse_inputs(args):
        results = decode(scorer, converter, tokens, table, beam, args.prune)
        if args.nbest:
            rec = {"utterance": " ".join(tokens),
                   "candidates": [{"mr": mr, "score": round(float(s), 6)} for _, s, mr in results[:args.nbest]]}
            print(json.dumps(rec), file=out)
        else:
            print(results[0][2] if results else FAIL_LINE, file=out)
    return EXIT_OK


def cmd_eval(args, out) -> int:
    grammar = resolve_grammar(args)
    converter = get_converter(args.format)
    examples = load_dataset(args.data, args.format, grammar)
    trees, texts = [], []
    if args.predictions:
        lines = Path(args.predictions).read_text(encoding="utf-8").splitlines()
        if len(lines) != len(examples):
            raise SemparseError(f"{len(lines)} predictions for {len(examples)} examples")
        for ex, line in zip(examples, lines):
            tree = None
            if line.strip() and line.strip() != FAIL_LINE:
                try:
                    tree = converter.to_ast(line, grammar, ex.table)
                except SemparseError:
                    tree = None
            trees.append(tree)
            texts.append(line)
    else:
        beam = _beam_config(args)
        scorer = _load_model(args, grammar)
        for ex in examples:
            res = decode(scorer, converter, ex.utterance, ex.table, beam, args.prune)
            trees.append(res[0][0] if res else None)
            texts.append(res[0][2] if res else None)
    report = evaluate(examples, trees, texts)
    print(report.summary(), file=out)
    if args.report:
        Path(args.report).write_text(report.to_json() + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_oracle(args, out) -> int:
    grammar = resolve_grammar(args)
    if args.mr is not None:
        table = load_table(args.table) if args.table else None
        tree = get_converter(args.format).to_ast(args.mr, grammar, table)
        out.write(format_actions(extract_actions(grammar, tree, table)))
        return EXIT_OK
    blocks = [format_actions(extract_actions(grammar, ex.tree, ex.table))
              for ex in load_dataset(args.data, args.format, grammar)]
    out.write("\n".join(blocks))
    return EXIT_OK


COMMANDS = {"train": cmd_train, "parse": cmd_parse, "eval": cmd_eval, "oracle": cmd_oracle}


def main(argv: Optional[list] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as e:
        print(f"semparse: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CheckpointMismatch as e:
        print(f"semparse: checkpoint mismatch: {e}", file=sys.stderr)
        return EXIT_CHECKPOINT
    except (SemparseError, GrammarError, OSError, ValueError) as e:
        print(f"semparse: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
