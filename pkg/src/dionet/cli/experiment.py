"""Config-driven training runs and the CSV artifacts they leave behind."""
from __future__ import annotations

import csv
from dataclasses import replace
from pathlib import Path

from ..analysis import adversarial_accuracy, mean_output_variance
from ..losses import accuracy
from ..network import Network, forward_batch
from ..tasks import build_task
from ..training import EpochMetrics, train
from .config import ExperimentConfig
from .modelio import save_model

METRICS_HEADER = EpochMetrics.FIELDS
ANALYSIS_HEADER = ("epsilon", "clean_acc", "adv_acc", "variance_normal", "variance_diophantine")
COMPARISON_HEADER = ("epsilon", "adv_acc_normal", "adv_acc_diophantine")


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _task(cfg: ExperimentConfig):
    return build_task(cfg.task, cfg.t_cfg.seed, **cfg.task_options)


def train_mode(cfg: ExperimentConfig, mode: str):
    net, train_data, val_data, _ = _task(cfg)
    t_cfg = replace(cfg.t_cfg, mode=mode)
    net, history = train(net, train_data, val_data, t_cfg, cfg.l_cfg)
    return net, history, t_cfg, val_data


def analysis_rows(cfg: ExperimentConfig, net: Network, val_data, var_normal: float, var_dio: float):
    kind = cfg.l_cfg.task_kind
    clean = accuracy(forward_batch(net, val_data.X), val_data.Y, kind)
    return [
        (eps, clean, adversarial_accuracy(net, val_data, eps, kind), var_normal, var_dio)
        for eps in cfg.analysis.epsilons
    ]


def _variance(cfg: ExperimentConfig, net: Network, val_data) -> float:
    a = cfg.analysis
    return mean_output_variance(net, val_data.X, a.sigma, a.samples, cfg.t_cfg.seed)


def run_experiment(cfg: ExperimentConfig) -> dict[str, Path]:
    """Train per ``cfg`` and write the artifacts; returns their paths by name.

    Single-mode runs write ``metrics.csv`` and ``model.json`` into the output
    directory. ``both`` writes one subdirectory per mode plus
    ``comparison.csv``. When analysis is configured the companion mode is
    also trained so ``analysis.csv`` can report both output variances.
    """
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    modes = ("normal", "diophantine") if cfg.run_mode == "both" or cfg.analysis else (cfg.run_mode,)
    runs = {m: train_mode(cfg, m) for m in modes}
    artifacts: dict[str, Path] = {}

    written = ("normal", "diophantine") if cfg.run_mode == "both" else (cfg.run_mode,)
    for mode in written:
        net, history, t_cfg, _ = runs[mode]
        d = out / mode if cfg.run_mode == "both" else out
        d.mkdir(parents=True, exist_ok=True)
        write_csv(d / "metrics.csv", METRICS_HEADER, (m.row() for m in history))
        save_model(net, t_cfg, d / "model.json")
        artifacts[f"{mode}/metrics"] = d / "metrics.csv"
        artifacts[f"{mode}/model"] = d / "model.json"

    if cfg.analysis:
        var = {m: _variance(cfg, runs[m][0], runs[m][3]) for m in ("normal", "diophantine")}
        for mode in written:
            net, _, _, val = runs[mode]
            d = out / mode if cfg.run_mode == "both" else out
            rows = analysis_rows(cfg, net, val, var["normal"], var["diophantine"])
            write_csv(d / "analysis.csv", ANALYSIS_HEADER, rows)
            artifacts[f"{mode}/analysis"] = d / "analysis.csv"
        if cfg.run_mode == "both":
            kind = cfg.l_cfg.task_kind
            rows = [
                (eps, *(adversarial_accuracy(runs[m][0], runs[m][3], eps, kind) for m in ("normal", "diophantine")))
                for eps in cfg.analysis.epsilons
            ]
            write_csv(out / "comparison.csv", COMPARISON_HEADER, rows)
            artifacts["comparison"] = out / "comparison.csv"
    return artifacts
