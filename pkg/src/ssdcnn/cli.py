"""Command-line front end.

Subcommands: synth, import-pot, featurize, train, eval, recognize, serve.
Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import checkpoint as ckpt
from . import netspec, pot
from .ink import InkError, format_number, read_canonical, write_canonical
from .model import KINDS, build_model
from .preprocess import PreprocessConfig
from .synth import synth_dataset
from .train import (
    EmptyDataset,
    TrainConfig,
    UnlabeledSample,
    evaluate,
    train_two_phase,
    trace_to_csv,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

_DATA_ERRORS = (
    InkError,
    pot.PotError,
    ckpt.CheckpointError,
    netspec.EmptySpec,
    netspec.ArchSyntaxError,
    netspec.ShapeError,
    EmptyDataset,
    UnlabeledSample,
    OSError,
    ValueError,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _preprocess_from(args) -> PreprocessConfig:
    return PreprocessConfig(max_gap=args.max_gap, method=args.method)


def _add_preprocess_flags(p):
    p.add_argument("--method", default="linear", choices=("none", "linear", "spline"))
    p.add_argument("--max-gap", type=float, default=1.0)


def build_parser() -> _Parser:
    parser = _Parser(prog="ssdcnn", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--train", type=int, required=True, help="train samples per class")
    p.add_argument("--test", type=int, required=True, help="test samples per class")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("import-pot", help="convert POT records to canonical ink")
    p.add_argument("--pot", nargs="+", required=True, help="POT file(s)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_import_pot)

    p = sub.add_parser("featurize", help="dump eight-directional feature vectors")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    _add_preprocess_flags(p)
    p.set_defaults(func=_cmd_featurize)

    p = sub.add_parser("train", help="train a model variant")
    p.add_argument("--variant", required=True, choices=KINDS)
    p.add_argument("--train-data", required=True)
    p.add_argument("--val-data")
    p.add_argument("--out", required=True)
    p.add_argument("--batch-size", type=int, default=100)
    p.add_argument("--eta", type=float, default=0.01)
    p.add_argument("--phase1-epochs", type=int, default=10)
    p.add_argument("--phase2-epochs", type=int, default=5)
    p.add_argument("--patience", type=int, default=0)
    p.add_argument("--drop-prob", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target-p1", type=float)
    p.add_argument("--target-loss", type=float)
    p.add_argument("--trace", help="write the loss trace CSV here")
    p.add_argument(
        "--arch",
        action="append",
        default=[],
        metavar="[PART=]DSL",
        help="override an architecture string, e.g. '512 -N64Sig -N10' or 'head=712 -N300Sig -N10'",
    )
    _add_preprocess_flags(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="report P@k on a labeled dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--topk", default="1,2,3,10")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("recognize", help="rank candidates for every sample in a file")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--json", action="store_true", dest="as_json")
    p.set_defaults(func=_cmd_recognize)

    p = sub.add_parser("serve", help="run the HTTP recognition service")
    p.add_argument("--model", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static", help="directory of web client assets")
    p.set_defaults(func=_cmd_serve)

    return parser


def _cmd_synth(args) -> int:
    train, test = synth_dataset(args.classes, args.train, args.test, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "train.ink").write_bytes(write_canonical(train))
    (out / "test.ink").write_bytes(write_canonical(test))
    print(f"wrote {len(train.samples)} train / {len(test.samples)} test samples to {out}")
    return EXIT_OK


def _cmd_import_pot(args) -> int:
    blob = b"".join(Path(f).read_bytes() for f in args.pot)
    dataset = pot.import_pot(blob)
    Path(args.out).write_bytes(write_canonical(dataset))
    print(f"imported {len(dataset.samples)} samples, {len(dataset.alphabet)} classes")
    return EXIT_OK


def _cmd_featurize(args) -> int:
    from .features import featurize_sample

    dataset = read_canonical(Path(args.data).read_bytes())
    config = _preprocess_from(args)
    with open(args.out, "w") as f:
        for sample in dataset.samples:
            vec = featurize_sample(sample, "nn8", config)["dirs"]
            f.write(" ".join(format_number(v) for v in vec.astype(float)) + "\n")
    print(f"wrote {len(dataset.samples)} feature lines to {args.out}")
    return EXIT_OK


def _cmd_train(args) -> int:
    from .model import arch_strings

    train_set = read_canonical(Path(args.train_data).read_bytes())
    val_set = read_canonical(Path(args.val_data).read_bytes()) if args.val_data else None
    specs = None
    if args.arch:
        specs = dict(arch_strings(args.variant, len(train_set.alphabet)))
        for override in args.arch:
            part, _, text = override.partition("=")
            if not text:
                part, text = "main", override
            if part not in specs:
                raise ValueError(f"variant {args.variant} has no architecture part {part!r}")
            specs[part] = text
    model = build_model(args.variant, len(train_set.alphabet), args.seed, specs=specs)
    config = TrainConfig(
        batch_size=args.batch_size,
        eta=args.eta,
        phase1_epochs=args.phase1_epochs,
        phase2_epochs=args.phase2_epochs,
        patience=args.patience,
        seed=args.seed,
        drop_prob=args.drop_prob,
        target_p1=args.target_p1,
        target_loss=args.target_loss,
    )
    preprocess = _preprocess_from(args)
    result = train_two_phase(model, train_set, val_set, config, preprocess)
    bundle = ckpt.ModelBundle(result.model, train_set.alphabet, preprocess)
    digest = ckpt.save_checkpoint(bundle, args.out)
    if args.trace:
        Path(args.trace).write_text(trace_to_csv(result.trace))
    final = [row for row in result.trace if row.val_p1 is not None]
    if final:
        print(f"final validation P@1: {final[-1].val_p1:.4f}")
    print(f"saved {args.variant} checkpoint to {args.out} ({digest[:12]})")
    return EXIT_OK


def _cmd_eval(args) -> int:
    bundle = ckpt.load_checkpoint(args.model)
    dataset = read_canonical(Path(args.data).read_bytes())
    ks = [int(tok) for tok in args.topk.split(",") if tok.strip()]
    report = evaluate(bundle.model, dataset, ks=ks, preprocess=bundle.preprocess)
    for k in sorted(report.precision):
        print(f"P@{k} {report.precision[k]:.4f} ({report.correct[k]}/{report.total})")
    return EXIT_OK


def _cmd_recognize(args) -> int:
    bundle = ckpt.load_checkpoint(args.model)
    dataset = read_canonical(Path(args.data).read_bytes())
    results = []
    for i, sample in enumerate(dataset.samples):
        candidates = bundle.candidates(sample, args.k)
        results.append({"sample": i, "candidates": candidates})
        if not args.as_json:
            print(f"sample {i}:")
            for c in candidates:
                print(f"  {c['class_id']}\t{c['label']}\t{format_number(c['probability'])}")
    if args.as_json:
        print(json.dumps(results))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    bundle = ckpt.load_checkpoint(args.model)
    static = args.static
    if static is None:
        default_static = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        static = str(default_static) if default_static.is_dir() else None
    app = create_app(bundle, static_dir=static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _DATA_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
