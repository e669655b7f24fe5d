"""Acceptance criteria 1-12, each at its stated tolerance.

Every criterion prints a single PASS/FAIL line (also gathered into the
pytest terminal summary). Run directly with ``python3 tests/test_acceptance.py``
to get only those lines.
"""
from __future__ import annotations

import math
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

from dionet.analysis import output_variance
from dionet.cli.experiment import ANALYSIS_HEADER, METRICS_HEADER
from dionet.cli.main import main
from dionet.cli.reproduce import EXAMPLE2_NOTE, reproduce_examples
from dionet.constraints import LatticeBasis, convergents, lll_reduce, project_integers, rational_approx
from dionet.grad import adversarial_batch, backward
from dionet.linalg import Matrix, Vector, axpy
from dionet.losses import LossConfig
from dionet.network import ActivationSpec, Layer, Network, activation_bound, activation_eval, lipschitz_constant
from dionet.tasks import EXAMPLE3_GRAD_W1, EXAMPLE3_W1, build_task, example1, example2
from dionet.training import TrainingConfig, train, train_epoch

from _acceptance_log import record
from _helpers import central_diff, grad_close, random_batch, random_constraint, ref_total_loss
from lattice_oracle import det_sq, is_lll_reduced, same_lattice

A = ActivationSpec


# 1 ----------------------------------------------------------------------------------------

def test_criterion_01_example1_golden():
    t0 = time.perf_counter()
    net, data, _, kind = example1()
    cfg = LossConfig(kind)
    loss, g = backward(net, data, cfg)
    dW, db = g.flat()
    normal, _ = train_epoch(net, data, TrainingConfig(eta=0.1, mode="normal"), cfg)
    W, b = normal.flat_params()
    dio, _ = train_epoch(net, data, TrainingConfig(eta=0.1, mode="diophantine"), cfg)
    Wd, bd = dio.flat_params()
    elapsed = time.perf_counter() - t0
    ok = (
        abs(loss - 27.67) <= 0.01
        and abs(dW + 22.67) <= 0.01
        and abs(db + 10) <= 0.01
        and abs(W - 2.2667) <= 0.01
        and b == 1.0
        and (Wd, bd) == (2.0, 1.0)
        and elapsed < 1.0
    )
    record(1, ok, f"Example 1: loss={loss:.4f} dW={dW:.4f} db={db:.4f} W={W:.4f} b={b} projected=({Wd:g},{bd:g}) in {elapsed:.3f}s")
    assert ok


# 2 ----------------------------------------------------------------------------------------

def test_criterion_02_example3_golden():
    new = axpy(-0.01, Matrix.from_rows(EXAMPLE3_GRAD_W1), Matrix.from_rows(EXAMPLE3_W1))
    want = [[2.499, -1.296], [0.697, 1.598]]
    err = max(abs(new[i, j] - want[i][j]) for i in range(2) for j in range(2))
    proj = project_integers(new)
    ok = err <= 1e-9 and proj.tolist() == [[2, -1], [1, 2]]
    record(2, ok, f"Example 3: max update error {err:.2e}, projection {proj.tolist()}")
    assert ok


# 3 ----------------------------------------------------------------------------------------

def test_criterion_03_example2():
    net, data, _, kind = example2()
    cfg = LossConfig(kind)
    loss, g = backward(net, data, cfg)

    def f(theta):
        return ref_total_loss(net.with_flat_params(theta), data.X, data.Y, kind)

    oracle = central_diff(f, net.flat_params(), h=1e-6)
    rel = max(abs(a - b) / abs(b) for a, b in zip(g.flat(), oracle))
    rep = reproduce_examples()
    documented = all(s in rep.render() for s in ("-204", "-54", "-35")) and EXAMPLE2_NOTE in rep.notes
    proj = [project_integers(v) for v in (20.4, 5.4, 3.5)]
    ok = abs(loss - 160.33) <= 0.01 and rel <= 1e-5 and documented and proj == [20, 5, 3] and rep.passed
    record(3, ok, f"Example 2: loss={loss:.4f}, grads {[round(v, 4) for v in g.flat()]} vs oracle rel err {rel:.1e}, "
                  f"printed-gradient discrepancy documented={documented}, projections {proj}")
    assert ok


# 4 ----------------------------------------------------------------------------------------

ALL_KINDS = (
    A.identity(), A.relu(), A.sigmoid(),
    A.dio_linear(2.0, -3.0, 1.0), A.dio_linear(-1.0, 2.0, 0.5),
    A.dio_quadratic(0.3, 1.0, 0.5, 0.2, 2.0), A.dio_quadratic(-0.2, 0.5, 0.0, 0.1, 1.0),
    A.dio_exponential(2, 1, 0.0), A.dio_exponential(4, 2, 0.0), A.dio_exponential(4, 1, 0.0),
)


def _net_with_kinds(rng, kinds):
    n_layers = len(kinds)
    dims = [rng.randint(1, 5) for _ in range(n_layers + 1)]
    layers = []
    for i, act in enumerate(kinds):
        w = [rng.uniform(-0.8, 0.8) for _ in range(dims[i] * dims[i + 1])]
        b = [rng.uniform(-0.8, 0.8) for _ in range(dims[i + 1])]
        layers.append(Layer(Matrix(dims[i + 1], dims[i], w), Vector(b), act))
    return Network(layers)


def test_criterion_04_gradient_check():
    rng = random.Random(2024)
    t0 = time.perf_counter()
    worst = 0.0
    failures = 0
    seen = set()
    for case in range(50):
        # cycle activations so every kind appears, then fill the rest at random
        first = ALL_KINDS[case % len(ALL_KINDS)]
        kinds = [first] + [rng.choice(ALL_KINDS) for _ in range(rng.randint(0, 2))]
        rng.shuffle(kinds)
        seen.update(k.kind for k in kinds)
        net = _net_with_kinds(rng, kinds)
        kind = "cross_entropy" if net.output_dim >= 2 and rng.random() < 0.4 else "mse"
        lam, gamma = rng.choice([0.0, 0.1, 1.0]), rng.choice([0.0, 0.1, 1.0])
        X, Y = random_batch(rng, net, rng.randint(1, 4), kind)
        c = random_constraint(rng, net.n_params) if lam > 0 else None
        cfg = LossConfig(kind, lam=lam, gamma=gamma, constraint=c, epsilon=0.05)
        _, g = backward(net, (X, Y), cfg)
        X_adv = adversarial_batch(net, (X, Y), cfg) if gamma > 0 else None
        ref = central_diff(
            lambda th: ref_total_loss(net.with_flat_params(th), X, Y, kind, lam, gamma, c, X_adv),
            net.flat_params(),
            h=1e-6,
        )
        for a, b in zip(g.flat(), ref):
            if not grad_close(a, b, rel=1e-5, abs_=1e-7):
                failures += 1
            worst = max(worst, abs(a - b) / max(abs(a), abs(b), 1e-2))
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 30 and len(seen) == 6
    record(4, ok, f"gradient check: 50 networks, {len(seen)} activation kinds, {failures} mismatches, "
                  f"worst scaled error {worst:.1e}, {elapsed:.2f}s")
    assert ok


# 5 ----------------------------------------------------------------------------------------

def test_criterion_05_projection_properties():
    rng = random.Random(5)
    xs = [k + 0.5 for k in range(-50, 50)]
    xs += [rng.uniform(-1e6, 1e6) for _ in range(4000)]
    xs += [rng.uniform(-3, 3) for _ in range(4000)]
    xs += [float(rng.randint(-10**9, 10**9)) for _ in range(1000)]
    xs += [rng.randint(-1000, 1000) + rng.choice([0.5, -0.5, 0.4999999999999999, 0.5000000000000001]) for _ in range(900)]
    assert len(xs) == 10_000
    proj = project_integers(xs)
    idem = project_integers(proj) == proj
    integral = all(p == int(p) for p in proj)
    fix = all(p == x for p, x in zip(proj, xs) if x == int(x))
    dist = all(abs(Fraction(x) - Fraction(p)) <= Fraction(1, 2) for x, p in zip(xs, proj))
    ties = all(abs(p) < abs(x) for x, p in zip(xs, proj) if abs(x - int(x)) == 0.5)
    ok = idem and integral and fix and dist and ties
    record(5, ok, f"projection on 10^4 inputs: idempotent={idem} integral={integral} fixpoint={fix} "
                  f"dist<=0.5={dist} ties-toward-zero={ties}")
    assert ok


# 6 ----------------------------------------------------------------------------------------

CERT_SPECS = [
    (A.dio_linear(1, 1, 0), 3.0),
    (A.dio_linear(2, 4, 8), 1.0),
    (A.dio_linear(-3, 0.5, -2), 5.0),
    (A.dio_quadratic(1, 2, 3, 1, 2), 2.0),
    (A.dio_quadratic(-0.5, 3, 1, 0, -1.5), 4.0),
    (A.dio_quadratic(3, 2, 1, 0, 4), 0.5),
    (A.dio_exponential(2, 2, 0), 3.0),
    (A.dio_exponential(2, 1, 3), 3.0),
    (A.dio_exponential(3, 2, 0), 2.0),
]


def _domain_draw(spec, M, rng):
    while True:
        x = rng.uniform(-M, M)
        if spec.kind != "dio_exponential" or math.pow(x, spec.params[0]) >= spec.params[2]:
            return x


def test_criterion_06_activation_certificates():
    rng = random.Random(6)
    worst_lip, worst_bound = math.inf, math.inf
    for spec, M in CERT_SPECS:
        L = lipschitz_constant(spec, M)
        B = activation_bound(spec, M)
        if spec.kind == "dio_linear":
            a, b, c = spec.params
            assert B == (abs(c) + abs(a) * M) / abs(b) and L == abs(a) / abs(b)
        for _ in range(10_000):
            x1, x2 = _domain_draw(spec, M, rng), _domain_draw(spec, M, rng)
            f1, f2 = activation_eval(spec, x1), activation_eval(spec, x2)
            worst_lip = min(worst_lip, L * abs(x1 - x2) - abs(f1 - f2))
            worst_bound = min(worst_bound, B - abs(f1))
    ok = worst_lip >= -1e-9 and worst_bound >= -1e-9
    record(6, ok, f"activation certificates on {len(CERT_SPECS)} specs x 10^4 pairs: "
                  f"min Lipschitz slack {worst_lip:.2e}, min bound slack {worst_bound:.2e}")
    assert ok


# 7 ----------------------------------------------------------------------------------------

def test_criterion_07_continued_fractions():
    rng = random.Random(7)
    thetas = [rng.uniform(-1000, 1000) for _ in range(1000)] + [math.pi, math.sqrt(2)]
    checked = violations = 0
    for th in thetas:
        exact = Fraction(th)
        for p, q in convergents(th):
            if Fraction(p, q) != exact:
                checked += 1
                if not abs(exact - Fraction(p, q)) < Fraction(1, q * q):
                    violations += 1
    pi = rational_approx(math.pi, 120)
    r2 = rational_approx(math.sqrt(2), 12)
    ok = violations == 0 and pi == (355, 113) and r2 == (17, 12)
    record(7, ok, f"continued fractions: {checked} convergents checked, {violations} violations; pi->{pi}, sqrt2->{r2}")
    assert ok


# 8 ----------------------------------------------------------------------------------------

def test_criterion_08_lll():
    rng = random.Random(8)
    bases = []
    while len(bases) < 100:
        n = rng.randint(1, 6)
        b = [tuple(rng.randint(-50, 50) for _ in range(n)) for _ in range(n)]
        if det_sq(b) != 0:
            bases.append(b)
    t0 = time.perf_counter()
    outs = [lll_reduce(LatticeBasis(tuple(b)), 0.75).vectors for b in bases]
    elapsed = time.perf_counter() - t0
    lattice_ok = all(same_lattice(b, o) for b, o in zip(bases, outs))
    reduced_ok = all(is_lll_reduced(o, Fraction(3, 4)) for o in outs)
    ok = lattice_ok and reduced_ok and elapsed < 10
    record(8, ok, f"LLL on 100 bases (n<=6, |entries|<=50): same lattice={lattice_ok}, "
                  f"size-reduced+Lovasz={reduced_ok}, {elapsed:.2f}s")
    assert ok


# 9 ----------------------------------------------------------------------------------------

def test_criterion_09_variance_oracle():
    net = Network([Layer(Matrix.from_rows([[3.0]]), Vector([0.0]))])
    v = output_variance(net, Vector([0.5]), 0.1, 100_000, seed=0)
    rel = abs(v - 0.09) / 0.09
    ok = rel <= 0.05
    record(9, ok, f"Monte-Carlo variance of y=3x at sigma=0.1: {v:.6f} vs 0.09 (rel err {rel:.2%})")
    assert ok


# 10 ---------------------------------------------------------------------------------------

def test_criterion_10_integer_invariance():
    net, tr, va, kind = build_task("synthetic_regression", 0)
    bad = []
    epochs = []

    def check(n, m):
        epochs.append(m.epoch)
        if any(v != int(v) for v in n.flat_params()):
            bad.append(m.epoch)

    t_cfg = TrainingConfig(eta=0.5, epochs=50, batch_size=16, mode="diophantine", seed=0)
    train(net, tr, va, t_cfg, LossConfig(kind), on_epoch=check)
    ok = not bad and epochs == list(range(1, 51))
    record(10, ok, f"diophantine synthetic_regression: {len(epochs)} epoch boundaries, non-integral at {bad or 'none'}")
    assert ok


# 11 ---------------------------------------------------------------------------------------

PAIRED = {
    "task": "synthetic_classification",
    "seed": 3,
    "training": {"eta": 0.5, "epochs": 30, "mode": "both"},
    "loss": {"gamma": 0.5, "epsilon": 0.1},
    "analysis": {"sigma": 0.1, "samples": 50, "epsilons": [0, 0.05, 0.1, 0.2]},
}


def _header(p: Path):
    return tuple(p.read_text().splitlines()[0].split(","))


def test_criterion_11_figure_substitutes(tmp_path):
    import yaml

    cfg_path = tmp_path / "paired.yaml"
    cfg_path.write_text(yaml.safe_dump(PAIRED))
    out = tmp_path / "paired"
    code = main(["train", "--config", str(cfg_path), "--out", str(out)])
    schema = code == 0 and all(_header(out / m / "metrics.csv") == METRICS_HEADER for m in ("normal", "diophantine"))

    net, data, _, kind = example1()
    _, hist = train(net, data, data, TrainingConfig(eta=0.01, epochs=100, mode="normal"), LossConfig(kind))
    losses = [m.train_loss for m in hist]
    monotone = all(b <= a for a, b in zip(losses, losses[1:]))

    code = main(["attack", "--config", str(cfg_path), "--out", str(tmp_path / "sweep")])
    analysis = tmp_path / "sweep" / "normal" / "analysis.csv"
    rows = analysis.read_text().splitlines() if analysis.exists() else []
    sweep = code == 0 and rows and _header(analysis) == ANALYSIS_HEADER and [float(r.split(",")[0]) for r in rows[1:]] == [0, 0.05, 0.1, 0.2]

    comp = [r.split(",") for r in (tmp_path / "sweep" / "comparison.csv").read_text().splitlines()[1:]]
    ordering = ", ".join(f"eps={e}: dio {float(d):.3f} vs normal {float(n):.3f}" for e, n, d in comp)
    ok = bool(schema and monotone and sweep)
    record(11, ok, f"paired metrics schema={schema}, Example 1 loss non-increasing over 100 epochs={monotone}, "
                   f"sweep analysis.csv={bool(sweep)}; reported only: {ordering}")
    assert ok


# 12 ---------------------------------------------------------------------------------------

def test_criterion_12_determinism(tmp_path):
    import yaml

    cfg_path = tmp_path / "cfg.yaml"
    doc = dict(PAIRED, training={"eta": 0.5, "epochs": 5, "mode": "both", "batch_size": 16})
    cfg_path.write_text(yaml.safe_dump(doc))
    snapshots = []
    for i in range(2):
        out = tmp_path / f"r{i}"
        codes = [
            main(["reproduce", "--out", str(out / "reproduce")]),
            main(["train", "--config", str(cfg_path), "--out", str(out / "train")]),
            main(["eval", "--config", str(cfg_path), "--model", str(out / "train" / "normal" / "model.json"), "--out", str(out / "eval")]),
            main(["attack", "--config", str(cfg_path), "--out", str(out / "attack")]),
            main(["encode", "--model", str(out / "train" / "diophantine" / "model.json"), "--op", "rational", "--out", str(out / "enc.json")]),
        ]
        assert codes == [0] * 5
        snapshots.append({p.relative_to(out): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()})
    csvs = [k for k in snapshots[0] if k.suffix == ".csv"]
    same = snapshots[0] == snapshots[1]
    ok = same and len(csvs) >= 8
    record(12, ok, f"two invocations of each subcommand: {len(snapshots[0])} artifacts ({len(csvs)} CSV) byte-identical={same}")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
