import math

import numpy as np
import pytest

import rpgame


def test_hinge_expect_limits():
    assert rpgame.hinge_expect(2.0, 1e-9) == pytest.approx(2.0)
    assert rpgame.hinge_expect(-2.0, 1e-9) == pytest.approx(0.0)
    assert rpgame.hinge_expect(0.0, 1.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi))


def test_synth_and_dataset():
    data = rpgame.synth_2d(20, 0.4, 3)
    assert (data.n, data.k) == (40, 2)
    assert data.kind == "continuous"
    assert np.all(data.y[:20] == -1) and np.all(data.y[20:] == 1)
    assert data.x.min() >= 0.0 and data.x.max() <= 1.0


def test_dataset_shape_error():
    with pytest.raises(ValueError):
        rpgame.Dataset(np.zeros((3, 2)), np.ones(2))


def test_train_attack_evaluate():
    train = rpgame.synth_2d(30, 0.4, 1)
    test = rpgame.synth_2d(100, 0.4, 2)
    trained = rpgame.train_game(train, rho_l=10, rho_d=10, W=0.5)
    assert trained.result.converged
    clf = trained.classifier
    assert clf.mu_w.shape == (3,)
    attacked = rpgame.attack_dataset(clf, test, 0.2)
    moved = np.linalg.norm(attacked.x - test.x, axis=1)
    assert np.all(moved[test.y < 0] == 0.0)
    assert np.all(moved <= 0.2 + 1e-9)
    curve = rpgame.security_curve(clf, test, [0.0, 0.2, 0.4], repetitions=2, seed=1)
    tp = [p.tp_mean for p in curve.points]
    assert tp == sorted(tp, reverse=True)
    assert curve.csv().startswith("d_max,")


def test_baseline_separates():
    data = rpgame.synth_2d(50, 0.4, 4)
    svm = rpgame.train_baseline_svm(data, C=1.0)
    scores = svm.as_learner().scores(data.x)
    assert np.mean(np.sign(scores) == data.y) > 0.95


def test_tp_at_fp_perfect_separation():
    r = rpgame.tp_at_fp([-2.0, -1.0], [1.0, 2.0], 0.01)
    assert r.tp_rate == 1.0 and r.fp_rate == 0.0


def test_diagnostics():
    data = rpgame.synth_2d(1, 0.4, 0)
    report = rpgame.check_equilibrium(data, rho_l=100, rho_d=100, bias_eps=1.0, profiles=5)
    assert report.lambda_omega_l > 0.0
    assert report.certified()
    assert rpgame.check_equilibrium(data).lambda_omega_l == 0.0
