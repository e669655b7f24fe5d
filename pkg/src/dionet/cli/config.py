"""Experiment configuration files (YAML or JSON).

Example::

    task: synthetic_classification
    seed: 3
    output_dir: runs/cls
    training: {eta: 0.5, epochs: 30, batch_size: 0, mode: both}
    loss:
      lambda: 0.01
      gamma: 0.5
      epsilon: 0.1
      constraint: {polynomial: "x1 + x2 - x3", scale: 1, subset: [0, 1, 2]}
    analysis: {sigma: 0.1, samples: 100, epsilons: [0, 0.05, 0.1, 0.2]}
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import yaml

from ..constraints import Constraint, EncodingMap, parse_polynomial
from ..errors import ConfigError, FormatError
from ..losses import LossConfig
from ..network import ActivationSpec
from ..tasks import TASKS
from ..training import MODES, TrainingConfig

RUN_MODES = MODES + ("both",)


@dataclass(frozen=True)
class AnalysisConfig:
    sigma: float = 0.1
    samples: int = 100
    epsilons: tuple[float, ...] = (0.0, 0.05, 0.1, 0.2)
    M: float = 10.0


@dataclass(frozen=True)
class ExperimentConfig:
    task: str
    t_cfg: TrainingConfig
    l_cfg: LossConfig
    output_dir: Path = Path("runs/default")
    analysis: Optional[AnalysisConfig] = None
    run_mode: str = "normal"
    task_options: dict = field(default_factory=dict)

    def with_overrides(self, seed: Optional[int] = None, mode: Optional[str] = None, output_dir=None) -> ExperimentConfig:
        cfg = self
        if seed is not None:
            cfg = replace(cfg, t_cfg=replace(cfg.t_cfg, seed=seed))
        if mode is not None:
            if mode not in RUN_MODES:
                raise ConfigError(f"--mode must be one of {RUN_MODES}")
            cfg = replace(cfg, run_mode=mode, t_cfg=replace(cfg.t_cfg, mode="normal" if mode == "both" else mode))
        if output_dir is not None:
            cfg = replace(cfg, output_dir=Path(output_dir))
        return cfg


def _section(doc: dict, name: str) -> dict:
    sec = doc.get(name) or {}
    if not isinstance(sec, dict):
        raise ConfigError(f"'{name}' must be a mapping")
    return sec


def _known(sec: dict, allowed: set, where: str) -> None:
    extra = set(sec) - allowed
    if extra:
        raise ConfigError(f"{where}: unknown field(s) {sorted(extra)}")


def _activation(spec, where: str) -> ActivationSpec:
    try:
        if isinstance(spec, str):
            return ActivationSpec(spec)
        return ActivationSpec.from_dict(spec)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def config_from_dict(doc) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping at the top level")
    _known(doc, {"task", "seed", "output_dir", "training", "loss", "analysis", "task_options"}, "config")
    task = doc.get("task")
    if task not in TASKS:
        raise ConfigError(f"task: must be one of {TASKS}, got {task!r}")

    tr = _section(doc, "training")
    _known(tr, {"eta", "epochs", "batch_size", "mode", "lll_init", "projection_scale"}, "training")
    run_mode = tr.get("mode", "normal")
    if run_mode not in RUN_MODES:
        raise ConfigError(f"training.mode: must be one of {RUN_MODES}, got {run_mode!r}")
    epochs = tr.get("epochs", 1)
    if not isinstance(epochs, int) or epochs < 1:
        raise ConfigError(f"training.epochs: must be an integer >= 1, got {epochs!r}")
    try:
        t_cfg = TrainingConfig(
            eta=float(tr.get("eta", 0.1)),
            epochs=epochs,
            batch_size=int(tr.get("batch_size", 0)),
            mode="normal" if run_mode == "both" else run_mode,
            seed=int(doc.get("seed", 0)),
            lll_init=bool(tr.get("lll_init", False)),
            projection_scale=float(tr.get("projection_scale", 1.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"training: {exc}") from None

    ls = _section(doc, "loss")
    _known(ls, {"task_kind", "lambda", "gamma", "epsilon", "constraint"}, "loss")
    constraint = None
    if ls.get("constraint"):
        c = ls["constraint"]
        if not isinstance(c, dict) or "polynomial" not in c:
            raise ConfigError("loss.constraint: needs a 'polynomial' field")
        _known(c, {"polynomial", "scale", "subset", "n_vars"}, "loss.constraint")
        try:
            poly = parse_polynomial(str(c["polynomial"]), c.get("n_vars"))
            subset = c.get("subset")
            if subset is not None and c.get("n_vars") is None and len(subset) != poly.n_vars:
                # trailing variables may be absent from the text
                poly = parse_polynomial(str(c["polynomial"]), len(subset))
            constraint = Constraint(poly, EncodingMap(float(c.get("scale", 1.0))), subset)
        except FormatError as exc:
            raise ConfigError(f"loss.constraint.polynomial: {exc}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"loss.constraint: {exc}") from None
    try:
        l_cfg = LossConfig(
            task_kind=ls.get("task_kind", "cross_entropy" if task == "synthetic_classification" else "mse"),
            lam=float(ls.get("lambda", 0.0)),
            gamma=float(ls.get("gamma", 0.0)),
            constraint=constraint,
            epsilon=float(ls.get("epsilon", 0.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"loss: {exc}") from None

    analysis = None
    if doc.get("analysis") is not None:
        an = _section(doc, "analysis")
        _known(an, {"sigma", "samples", "epsilons", "M"}, "analysis")
        try:
            analysis = AnalysisConfig(
                sigma=float(an.get("sigma", 0.1)),
                samples=int(an.get("samples", 100)),
                epsilons=tuple(float(e) for e in an.get("epsilons", (0.0, 0.05, 0.1, 0.2))),
                M=float(an.get("M", 10.0)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"analysis: {exc}") from None
        if analysis.sigma < 0 or analysis.samples < 1 or any(e < 0 for e in analysis.epsilons):
            raise ConfigError("analysis: need sigma >= 0, samples >= 1, epsilons >= 0")

    opts = dict(_section(doc, "task_options"))
    for key in ("hidden",):
        if key in opts:
            opts[key] = _activation(opts[key], f"task_options.{key}")
    return ExperimentConfig(
        task=task,
        t_cfg=t_cfg,
        l_cfg=l_cfg,
        output_dir=Path(doc.get("output_dir", f"runs/{task}")),
        analysis=analysis,
        run_mode=run_mode,
        task_options=opts,
    )


def load_config(path) -> ExperimentConfig:
    text = Path(path).read_text()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" (line {mark.line + 1})" if mark is not None else ""
        raise ConfigError(f"{path}: unparseable config{where}: {getattr(exc, 'problem', exc)}") from None
    return config_from_dict(doc)
