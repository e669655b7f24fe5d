import random
from fractions import Fraction

import pytest

from dionet.constraints import Constraint, EncodingMap, parse_polynomial
from dionet.errors import NumericError, ShapeError
from dionet.grad import adversarial_batch, backward, finite_diff_grad, fgsm_inputs, total_loss
from dionet.linalg import Matrix, Vector
from dionet.losses import LossConfig
from dionet.network import Layer, Network
from dionet.tasks import example1, example2

from _helpers import (
    central_diff,
    grad_close,
    random_batch,
    random_constraint,
    random_network,
    ref_batch_loss,
    ref_total_loss,
)


def test_example1_golden():
    net, data, _, kind = example1()
    loss, g = backward(net, data, LossConfig(kind))
    assert abs(loss - 27.67) <= 0.01
    dW, db = g.flat()
    assert abs(dW - (-22.67)) <= 0.01
    assert abs(db - (-10.0)) <= 0.01


def test_perfect_fit_has_zero_gradient():
    _, data, _, _ = example1()
    net = Network([Layer(Matrix.from_rows([[2.0]]), Vector([1.0]))])
    loss, g = backward(net, data, LossConfig())
    assert loss == 0.0
    assert g.flat() == [0.0, 0.0]
    assert all(abs(v) <= 1e-8 for v in finite_diff_grad(net, data, LossConfig()).flat())


def test_example2_loss_and_oracle():
    net, data, _, kind = example2()
    loss, g = backward(net, data, LossConfig(kind))
    assert abs(loss - 160.33) <= 0.01
    # hand-evaluated -(2/n) sum x^k y at zero weights
    for got, want in zip(g.flat(), (-424 / 3, -164 / 3, -70 / 3)):
        assert got == pytest.approx(want, rel=1e-14)
    for got, fd in zip(g.flat(), finite_diff_grad(net, data, LossConfig(kind)).flat()):
        assert grad_close(got, fd)


def test_single_parameter_square():
    # L(W) = (W x - 0)^2 with x = 1 on one sample is W^2
    net = Network([Layer(Matrix.from_rows([[3.0]]), Vector([0.0]))])
    data = (Matrix.from_rows([[1.0]]), Matrix.from_rows([[0.0]]))
    fd = finite_diff_grad(net, data, LossConfig(), h=1e-6).flat()
    assert abs(fd[0] - 6.0) <= 1e-6


def test_gradient_shapes_mirror_network():
    rng = random.Random(0)
    net = random_network(rng, max_layers=3)
    X, Y = random_batch(rng, net, 3)
    _, g = backward(net, (X, Y), LossConfig())
    for layer, dW, db in zip(net.layers, g.dW, g.db):
        assert dW.shape == layer.weights.shape
        assert len(db) == len(layer.bias)
    assert g.dX.shape == X.shape


def _check_random_case(rng, kind, lam, gamma):
    net = random_network(rng)
    if kind == "cross_entropy" and net.output_dim < 2:
        kind = "mse"
    X, Y = random_batch(rng, net, rng.randint(1, 4), kind)
    constraint = random_constraint(rng, net.n_params) if lam > 0 else None
    cfg = LossConfig(kind, lam=lam, gamma=gamma, constraint=constraint, epsilon=0.05)
    loss, g = backward(net, (X, Y), cfg)
    X_adv = adversarial_batch(net, (X, Y), cfg) if gamma > 0 else None

    def f(theta):
        return ref_total_loss(net.with_flat_params(theta), X, Y, kind, lam, gamma, constraint, X_adv)

    ref = central_diff(f, net.flat_params())
    assert loss == pytest.approx(f(net.flat_params()), rel=1e-12, abs=1e-12)
    bad = [(i, a, b) for i, (a, b) in enumerate(zip(g.flat(), ref)) if not grad_close(a, b)]
    assert not bad, bad


@pytest.mark.parametrize("seed", range(20))
def test_backward_matches_independent_differences(seed):
    rng = random.Random(100 + seed)
    _check_random_case(rng, rng.choice(["mse", "cross_entropy"]), rng.choice([0.0, 0.1, 1.0]), rng.choice([0.0, 0.1, 1.0]))


def test_backward_matches_package_oracle():
    rng = random.Random(7)
    for _ in range(10):
        net = random_network(rng)
        X, Y = random_batch(rng, net, 3)
        cfg = LossConfig(lam=0.1, gamma=0.1, epsilon=0.02, constraint=random_constraint(rng, net.n_params))
        _, g = backward(net, (X, Y), cfg)
        for a, b in zip(g.flat(), finite_diff_grad(net, (X, Y), cfg).flat()):
            assert grad_close(a, b)


def test_linearity_of_constraint_term():
    rng = random.Random(9)
    for _ in range(20):
        net = random_network(rng)
        X, Y = random_batch(rng, net, 2)
        c = random_constraint(rng, net.n_params)
        lam = rng.choice([0.1, 1.0, 3.0])
        _, g_task = backward(net, (X, Y), LossConfig())
        _, g_total = backward(net, (X, Y), LossConfig(lam=lam, constraint=c))
        g_dio = c.loss_grad(net)
        for t, a, d in zip(g_total.flat(), g_task.flat(), g_dio):
            assert abs(t - (a + lam * d)) <= 1e-10 * max(1.0, abs(t))


def test_input_gradient_matches_differences():
    rng = random.Random(12)
    for _ in range(10):
        net = random_network(rng)
        X, Y = random_batch(rng, net, 2)
        _, g = backward(net, (X, Y), LossConfig())

        def f(xs):
            return ref_batch_loss(net, Matrix(X.rows, X.cols, xs), Y, "mse")

        for a, b in zip(g.dX.data, central_diff(f, list(X.data))):
            assert grad_close(a, b)


def test_fgsm_sign_and_zero():
    X = Matrix.from_rows([[1.0, 2.0, 3.0]])
    out = fgsm_inputs(X, [0.5, -2.0, 0.0], 0.1)
    assert out.data == pytest.approx((1.1, 1.9, 3.0), abs=1e-15)
    assert out.data[2] == 3.0
    assert all(abs(Fraction(a) - Fraction(b)) <= Fraction(0.1) for a, b in zip(out.data, X.data))
    assert fgsm_inputs(X, [1.0, 1.0, 1.0], 0.0) is X


def test_gamma_with_zero_epsilon_doubles_task_loss():
    net, data, _, kind = example1()
    base = total_loss(net, data, LossConfig(kind))
    assert total_loss(net, data, LossConfig(kind, gamma=1.0, epsilon=0.0)) == pytest.approx(2 * base)


def test_errors():
    net, data, _, _ = example1()
    with pytest.raises(ShapeError):
        backward(net, (Matrix.zeros(0, 1), Matrix.zeros(0, 1)), LossConfig())
    with pytest.raises(ShapeError):
        backward(net, (Matrix.zeros(2, 2), Matrix.zeros(2, 1)), LossConfig())
    with pytest.raises(ValueError):
        finite_diff_grad(net, data, LossConfig(), h=0.0)
    huge = Network([Layer(Matrix.from_rows([[1e154]]), Vector([0.0]))])
    with pytest.raises(NumericError):
        backward(huge, (Matrix.from_rows([[1e154]]), Matrix.from_rows([[0.0]])), LossConfig())


def test_constraint_gradient_flows_through_smooth_embedding():
    # P = x1 - 2 at theta = (0.4, ...), scale 1: loss (0.4-2)^2, grad 2*(0.4-2)
    net = Network([Layer(Matrix.from_rows([[0.4]]), Vector([0.0]))])
    c = Constraint(parse_polynomial("x1 - 2", 1), EncodingMap(1.0), [0])
    assert c.loss_grad(net) == pytest.approx([2 * (0.4 - 2), 0.0])
    assert c.residual(net) == 4
