"""``dionet`` command line.

Exit codes: 0 success, 1 golden/acceptance mismatch, 2 config or format
error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..analysis import mean_output_variance
from ..constraints import EncodingMap, encode, lll_init, project_to_grid, rational_approx
from ..errors import ConfigError, FormatError, ShapeError
from ..tasks import build_task
from ..training import evaluate
from .config import RUN_MODES, load_config
from .experiment import ANALYSIS_HEADER, analysis_rows, run_experiment, write_csv
from .modelio import load_model, save_model
from .reproduce import reproduce_examples

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("dionet")


def _load(args):
    cfg = load_config(args.config)
    return cfg.with_overrides(seed=args.seed, mode=getattr(args, "mode", None), output_dir=args.out)


def cmd_reproduce(args) -> int:
    rep = reproduce_examples()
    text = rep.render()
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "reproduce_report.txt").write_text(text)
    return EXIT_OK if rep.passed else EXIT_MISMATCH


def cmd_train(args) -> int:
    cfg = _load(args)
    artifacts = run_experiment(cfg)
    for name, path in artifacts.items():
        print(f"{name}: {path}")
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = _load(args)
    net, t_cfg = load_model(args.model)
    _, train_data, val_data, _ = build_task(cfg.task, t_cfg.seed, **cfg.task_options)
    rows = []
    for split, data in (("train", train_data), ("val", val_data)):
        loss, acc, adv = evaluate(net, data, cfg.l_cfg)
        rows.append((split, loss, acc, adv))
        print(f"{split}: loss={loss!r} acc={acc!r} adv_acc={adv!r}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / "eval.csv", ("split", "loss", "acc", "adv_acc"), rows)
    return EXIT_OK


def cmd_attack(args) -> int:
    cfg = _load(args)
    if cfg.analysis is None:
        raise ConfigError("attack needs an 'analysis' section (sigma, samples, epsilons)")
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.model is None:
        artifacts = run_experiment(cfg)
        for name, path in artifacts.items():
            if "analysis" in name or name == "comparison":
                print(f"{name}: {path}")
        return EXIT_OK
    models = [load_model(args.model)]
    if args.compare_model:
        models.append(load_model(args.compare_model))
    var = {"normal": "", "diophantine": ""}
    a = cfg.analysis
    for net, t_cfg in models:
        _, _, val, _ = build_task(cfg.task, t_cfg.seed, **cfg.task_options)
        var[t_cfg.mode] = mean_output_variance(net, val.X, a.sigma, a.samples, cfg.t_cfg.seed)
    net, t_cfg = models[0]
    _, _, val, _ = build_task(cfg.task, t_cfg.seed, **cfg.task_options)
    rows = analysis_rows(cfg, net, val, var["normal"], var["diophantine"])
    write_csv(out / "analysis.csv", ANALYSIS_HEADER, rows)
    for eps, clean, adv, *_ in rows:
        print(f"epsilon={eps!r} clean_acc={clean!r} adv_acc={adv!r}")
    print(f"analysis: {out / 'analysis.csv'}")
    return EXIT_OK


def cmd_encode(args) -> int:
    net, t_cfg = load_model(args.model)
    emap = EncodingMap(args.scale)
    out = Path(args.out)
    if args.op == "encode":
        doc = {"scale": emap.scale, "layers": [encode(list(l.weights._data) + list(l.bias._data), emap) for l in net.layers]}
        out.write_text(json.dumps(doc, indent=2) + "\n")
    elif args.op == "project":
        save_model(project_to_grid(net, emap.scale), t_cfg, out)
    elif args.op == "rational":
        pairs = [rational_approx(v, args.max_den) for v in net.flat_params()]
        doc = {"max_den": args.max_den, "params": [[p, q] for p, q in pairs]}
        out.write_text(json.dumps(doc, indent=2) + "\n")
    elif args.op == "lll":
        new, report = lll_init(net, emap, args.delta)
        save_model(new, t_cfg, out)
        print(f"lll: {'reduced' if report.reduced else 'fallback'} ({report.reason})")
    print(f"{args.op}: {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dionet", description="Integer-constrained neural network experiments")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("reproduce", help="check the worked examples against their golden values")
    r.add_argument("--out", help="also write reproduce_report.txt here")
    r.set_defaults(func=cmd_reproduce)

    def common(sp, mode=True):
        sp.add_argument("--config", required=True)
        sp.add_argument("--out", help="output directory (overrides output_dir)")
        sp.add_argument("--seed", type=int, help="overrides the config seed")
        if mode:
            sp.add_argument("--mode", choices=RUN_MODES, help="overrides training.mode")

    t = sub.add_parser("train", help="train per config and write metrics/model/analysis files")
    common(t)
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="evaluate a saved model on the config's task")
    common(e, mode=False)
    e.add_argument("--model", required=True)
    e.set_defaults(func=cmd_eval)

    a = sub.add_parser("attack", help="adversarial-accuracy sweep, writes analysis.csv")
    common(a)
    a.add_argument("--model", help="saved model to attack (default: train per config)")
    a.add_argument("--compare-model", help="second model supplying the other mode's variance")
    a.set_defaults(func=cmd_attack)

    c = sub.add_parser("encode", help="apply encode/project/rational/lll to a model file")
    c.add_argument("--model", required=True)
    c.add_argument("--op", choices=("encode", "project", "rational", "lll"), required=True)
    c.add_argument("--scale", type=float, default=1.0)
    c.add_argument("--max-den", type=int, default=100)
    c.add_argument("--delta", type=float, default=0.75)
    c.add_argument("--out", required=True, help="output file")
    c.set_defaults(func=cmd_encode)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ShapeError as exc:
        # typically a model file whose dimensions do not fit the configured task
        print(f"error: model does not match the task: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
