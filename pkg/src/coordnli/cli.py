"""Command-line entry points for the full pipeline.

Subcommands: extract, generate, label, build-adv, train-iaft, srl-decode,
fusion-train, fusion-eval, eval, serve.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import evalkit, fusion, labeler, pairgen, srl, training, treebank
from .coordination import find_coordinations
from .text import detokenize


def _write_jsonl(path, records) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def _read_jsonl(path):
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            yield json.loads(line)


def cmd_extract(args) -> int:
    corpus = treebank.load_corpus(args.trees, args.ner)
    records = []
    n_warnings = 0
    for tree, sentence in corpus:
        instances, warnings = find_coordinations(tree, sentence)
        n_warnings += len(warnings)
        for warning in warnings:
            print(f"warning: {json.dumps(warning)}", file=sys.stderr)
        for inst in instances:
            rec = asdict(inst)
            rec["source_id"] = sentence.source_id
            rec["sentence"] = detokenize(sentence.tokens)
            rec["negation_scope"] = "smallest-s-or-sbar-ancestor"
            records.append(rec)
    _write_jsonl(args.out, records)
    print(f"extracted {len(records)} coordinations ({n_warnings} warnings) -> {args.out}")
    return 0


def _load_lexicon(path):
    if path is None:
        return pairgen.ReplacementLexicon()
    return pairgen.ReplacementLexicon.from_dict(json.loads(Path(path).read_text()))


def cmd_generate(args) -> int:
    corpus = treebank.load_corpus(args.trees, args.ner)
    lexicon = _load_lexicon(args.lexicon)
    config = pairgen.GenerationConfig(seed=args.seed)
    all_pairs = []
    all_warnings = []
    for tree, sentence in corpus:
        pairs, warnings = pairgen.generate_pairs(sentence, tree, lexicon, config)
        all_pairs.extend(pairs)
        all_warnings.extend(warnings)
    _write_jsonl(args.out, (p.to_record() for p in all_pairs))
    for warning in all_warnings:
        print(f"warning: {json.dumps(warning)}", file=sys.stderr)
    print(f"generated {len(all_pairs)} pairs ({len(all_warnings)} warnings) -> {args.out}")
    return 0


def cmd_label(args) -> int:
    config = labeler.HeuristicConfig()
    if args.config:
        config = labeler.HeuristicConfig.from_dict(json.loads(Path(args.config).read_text()))
    pairs = [pairgen.NliPair.from_record(rec) for rec in _read_jsonl(args.pairs)]
    labeler.label_pairs(pairs, config)
    _write_jsonl(args.out, (p.to_record() for p in pairs))
    print(f"labeled {len(pairs)} pairs -> {args.out}")
    return 0


def cmd_build_adv(args) -> int:
    pairs = [pairgen.NliPair.from_record(rec) for rec in _read_jsonl(args.pairs)]
    sample, report = labeler.build_adversarial_set(pairs, args.size, seed=args.seed)
    _write_jsonl(args.out, (p.to_record() for p in sample))
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2) + "\n")
    print(json.dumps(report, indent=2))
    return 0


def cmd_train_iaft(args) -> int:
    base = training.load_examples(args.base)
    adv = training.load_examples(args.adv)
    model = training.toy_classifier()
    model.fit(base, epochs=args.base_epochs, seed=args.seed)
    schedule = training.TrainSchedule(num_epochs=args.epochs, seed=args.seed)
    eval_sets = {}
    if args.eval:
        eval_sets["eval"] = training.load_examples(args.eval)
    model, log = training.iaft_train(model, base, adv, schedule, eval_sets or None)
    Path(args.log).write_text(json.dumps(log, indent=2) + "\n")
    print(f"trained {args.epochs} epochs, pool size {2 * log['k']}; log -> {args.log}")
    return 0


def cmd_srl_decode(args) -> int:
    lattices = srl.load_lattices(args.lattices)
    records = []
    for lattice in lattices:
        tags, score = srl.constrained_viterbi(lattice)
        rec = {"pieces": list(lattice.pieces), "tags": tags, "score": score}
        if lattice.wordpiece_map:
            rec["word_tags"] = srl.recover_word_tags(tags, lattice.wordpiece_map)
        records.append(rec)
    _write_jsonl(args.out, records)
    print(f"decoded {len(records)} lattices -> {args.out}")
    return 0


def cmd_fusion_train(args) -> int:
    rows = fusion.load_embeddings(args.embeddings)
    if not rows:
        print("no embeddings to train on", file=sys.stderr)
        return 1
    batch = fusion.embeddings_to_batch(rows)
    head = fusion.FusionHead.random(
        d_nli=len(rows[0]["c_nli"]), d_srl=len(rows[0]["c_p"]), seed=args.seed)
    trace = fusion.fit_fusion_head(head, batch, learning_rate=args.lr, steps=args.steps)
    Path(args.out).write_text(json.dumps(head.to_dict()) + "\n")
    print(f"final loss {trace[-1]:.6f} after {args.steps} steps; head -> {args.out}")
    return 0


def cmd_fusion_eval(args) -> int:
    rows = fusion.load_embeddings(args.embeddings)
    head = fusion.FusionHead.from_dict(json.loads(Path(args.head).read_text()))
    correct = sum(
        fusion.predict_label(head, r["c_nli"], r["c_p"], r["c_h"]) == r["label"]
        for r in rows
    )
    print(json.dumps({"n": len(rows), "accuracy": correct / len(rows)}))
    return 0


def cmd_eval(args) -> int:
    gold = evalkit.load_dataset(args.gold)
    predictions = evalkit.load_predictions(args.pred)
    report = evalkit.evaluate(predictions, gold)
    Path(args.report).write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    if args.report_md:
        Path(args.report_md).write_text(report.to_markdown())
    print(f"accuracy {report.overall_accuracy:.4f} over {report.n} pairs -> {args.report}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .annotation import SessionStore, create_app

    static = args.static
    if static is None:
        candidate = Path(__file__).resolve().parents[3] / "frontend" / "dist"
        static = candidate if candidate.is_dir() else None
    app = create_app(SessionStore(args.data), static_dir=static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coordnli")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="find coordinations in parsed sentences")
    p.add_argument("--trees", required=True)
    p.add_argument("--ner")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("generate", help="create NLI pairs by conjunct edits")
    p.add_argument("--trees", required=True)
    p.add_argument("--ner")
    p.add_argument("--lexicon")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("label", help="apply the labeling heuristics")
    p.add_argument("--pairs", required=True)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("build-adv", help="sample a conjunction-balanced training set")
    p.add_argument("--pairs", required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_build_adv)

    p = sub.add_parser("train-iaft", help="iterative adversarial fine-tuning run")
    p.add_argument("--base", required=True)
    p.add_argument("--adv", required=True)
    p.add_argument("--epochs", type=int, default=3)
    p.add_argument("--base-epochs", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eval")
    p.add_argument("--log", required=True)
    p.set_defaults(func=cmd_train_iaft)

    p = sub.add_parser("srl-decode", help="constrained Viterbi over score lattices")
    p.add_argument("--lattices", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_srl_decode)

    p = sub.add_parser("fusion-train", help="fit the predicate-aware fusion head")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fusion_train)

    p = sub.add_parser("fusion-eval", help="evaluate a fusion head on embeddings")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--head", required=True)
    p.set_defaults(func=cmd_fusion_eval)

    p = sub.add_parser("eval", help="accuracy report with the analysis breakdowns")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--report-md", dest="report_md")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8008)
    p.add_argument("--data", default="sessions")
    p.add_argument("--static")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
