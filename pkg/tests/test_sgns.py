import numpy as np
import pytest

from chronolex.sgns import (
    SgnsSettings, batch_grads, batch_loss, build_pairs, init_matrices,
    noise_cdf, sigmoid, train,
)


def toy_batch(rng):
    U = rng.normal(0, 0.5, (5, 4))
    C = rng.normal(0, 0.5, (5, 4))
    centers = np.array([0, 1, 2, 3, 0])
    contexts = np.array([1, 2, 3, 4, 2])
    negatives = np.array([[2, 3], [4, 0], [0, 1], [1, 2], [3, 4]])
    return U, C, centers, contexts, negatives


def test_gradient_matches_central_differences():
    U, C, centers, contexts, negatives = toy_batch(np.random.default_rng(7))
    dU, dC = batch_grads(U, C, centers, contexts, negatives)
    eps = 1e-6
    for matrix, grad in ((U, dU), (C, dC)):
        for i in range(matrix.shape[0]):
            for j in range(matrix.shape[1]):
                orig = matrix[i, j]
                matrix[i, j] = orig + eps
                lp = batch_loss(U, C, centers, contexts, negatives)
                matrix[i, j] = orig - eps
                lm = batch_loss(U, C, centers, contexts, negatives)
                matrix[i, j] = orig
                fd = (lp - lm) / (2 * eps)
                denom = max(abs(fd), abs(grad[i, j]), 1e-8)
                assert abs(fd - grad[i, j]) / denom < 1e-4, (i, j, fd, grad[i, j])


def test_loss_decreases_under_training():
    rng = np.random.default_rng(3)
    sentences = [np.array([0, 1, 2, 3, 4] * 4) for _ in range(20)]
    counts = np.full(5, 80)
    settings = SgnsSettings(dim=8, window=2, negative=3, epochs=3, chunk=64)
    U0, C0 = init_matrices(5, 8, np.random.default_rng(99))
    centers, contexts = build_pairs(sentences, 2, np.random.default_rng(1))
    negs = np.random.default_rng(2).integers(0, 5, size=(len(centers), 3))
    before = batch_loss(U0, C0, centers, contexts, negs)
    U, C = train(sentences, 5, counts, settings, seed=0)
    after = batch_loss(U, C, centers, contexts, negs)
    assert after < before


def test_sigmoid_saturates_safely():
    assert sigmoid(np.array([1e9]))[0] == pytest.approx(1.0)
    assert sigmoid(np.array([-1e9]))[0] == pytest.approx(0.0)


def test_noise_cdf_proportions():
    cdf = noise_cdf(np.array([16, 1]))
    # 16**0.75 = 8, so weights are 8:1
    assert cdf[0] == pytest.approx(8 / 9)
    assert cdf[-1] == pytest.approx(1.0)


def test_noise_cdf_requires_positive_mass():
    with pytest.raises(ValueError):
        noise_cdf(np.zeros(3))


def test_build_pairs_stay_within_sentences():
    sentences = [np.array([0, 1]), np.array([2, 3])]
    centers, contexts = build_pairs(sentences, 5, np.random.default_rng(0))
    for c, x in zip(centers, contexts):
        assert {c, x} in ({0, 1}, {2, 3})


def test_build_pairs_symmetric_full_window():
    sentences = [np.array([0, 1, 2])]
    centers, contexts = build_pairs(sentences, 1, np.random.default_rng(0))
    pairs = sorted(zip(centers.tolist(), contexts.tolist()))
    assert pairs == [(0, 1), (1, 0), (1, 2), (2, 1)]


def test_zero_epochs_returns_initialization():
    settings = SgnsSettings(dim=6, epochs=0)
    U, C = train([np.arange(4)], 4, np.ones(4), settings, seed=5)
    U0, C0 = init_matrices(4, 6, np.random.default_rng(5))
    assert np.array_equal(U, U0)
    assert np.array_equal(C, C0)


def test_training_is_deterministic():
    sentences = [np.array([0, 1, 2, 3] * 3) for _ in range(10)]
    counts = np.full(4, 30)
    settings = SgnsSettings(dim=8, window=2, negative=2, epochs=2, chunk=32)
    U1, C1 = train(sentences, 4, counts, settings, seed=11)
    U2, C2 = train(sentences, 4, counts, settings, seed=11)
    assert np.array_equal(U1, U2)
    assert np.array_equal(C1, C2)


def test_freeze_context_never_touches_context():
    sentences = [np.array([0, 1, 2, 3] * 3) for _ in range(10)]
    counts = np.full(4, 30)
    settings = SgnsSettings(dim=8, window=2, negative=2, epochs=2, chunk=32)
    U0, C0 = init_matrices(4, 8, np.random.default_rng(0))
    C0[:] = np.random.default_rng(1).normal(size=C0.shape)
    frozen = C0.copy()
    train(sentences, 4, counts, settings, seed=3, U=U0, C=C0, freeze_context=True)
    assert np.array_equal(C0, frozen)


def test_center_mask_restricts_updates():
    sentences = [np.array([0, 1, 2, 3] * 3) for _ in range(10)]
    counts = np.full(4, 30)
    settings = SgnsSettings(dim=8, window=2, negative=2, epochs=2, chunk=32)
    U0, C0 = init_matrices(4, 8, np.random.default_rng(0))
    C0[:] = np.random.default_rng(1).normal(size=C0.shape)
    mask = np.array([True, True, False, False])
    U = U0.copy()
    train(sentences, 4, counts, settings, seed=3, U=U, C=C0.copy(),
          freeze_context=True, center_mask=mask)
    assert np.array_equal(U[2:], U0[2:])
    assert not np.array_equal(U[:2], U0[:2])
