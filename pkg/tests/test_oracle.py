import itertools

import numpy as np
import pytest

from udwrm import (
    BitString,
    ModelError,
    exact_step_probability,
    exact_string_prob,
    iid_model,
    operator_schmidt,
    perturbative_corrections,
    propagator_consistency,
    random_model,
    random_weak_model,
    string_distribution,
)


def test_step_unitary_is_unitary():
    m = random_model(env_dim=5, steps=3, seed=1)
    for k in range(3):
        u = m.step_unitary(k)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(10), atol=1e-12)


def test_string_distribution_normalizes():
    m = random_model(env_dim=4, steps=6, seed=2)
    total = sum(string_distribution(m, 6).values())
    assert total == pytest.approx(1.0, abs=1e-12)


def test_exact_string_prob_chain_consistency():
    m = random_model(env_dim=4, steps=3, seed=3)
    # P(b1 b2) must marginalize to P(b1)
    for b1 in (0, 1):
        marg = sum(
            exact_string_prob(m, BitString(bits=(b1, b2))) for b2 in (0, 1)
        )
        assert marg == pytest.approx(
            exact_string_prob(m, BitString(bits=(b1,))), abs=1e-12
        )


def test_memory_breaks_exchangeability():
    m = random_model(env_dim=6, steps=4, seed=4)
    p01 = exact_string_prob(m, BitString(bits=(0, 1)))
    p10 = exact_string_prob(m, BitString(bits=(1, 0)))
    assert abs(p01 - p10) > 1e-6


def test_iid_model_is_exchangeable():
    m = iid_model(env_dim=4, steps=5, seed=5)
    base = BitString(bits=(1, 1, 0, 0, 0))
    ref = exact_string_prob(m, base)
    for perm in itertools.permutations(base.bits):
        assert exact_string_prob(m, BitString(bits=perm)) == pytest.approx(
            ref, abs=1e-13
        )


def test_operator_schmidt_reconstructs():
    rng = np.random.default_rng(6)
    op = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    left, right = operator_schmidt(op, 2, 4)
    rebuilt = sum(np.kron(a, b) for a, b in zip(left, right))
    np.testing.assert_allclose(rebuilt, op, atol=1e-10)


def test_perturbative_corrections_are_real_and_balanced():
    m = random_weak_model(env_dim=5, steps=2, epsilon=1e-3, seed=7)
    p, q1, q2 = perturbative_corrections(m, 0, m.env_initial)
    assert p.sum() == pytest.approx(1.0, abs=1e-12)
    # corrections only redistribute probability between the two outcomes
    assert q1.sum() == pytest.approx(0.0, abs=1e-10)
    assert q2.sum() == pytest.approx(0.0, abs=1e-10)


def test_perturbative_expansion_third_order_residual():
    m = random_weak_model(env_dim=5, steps=1, epsilon=1e-3, seed=8)
    p, q1, q2 = perturbative_corrections(m, 0, m.env_initial)

    def residual(eps):
        exact = exact_step_probability(m, 0, m.env_initial, eps)
        return abs(exact[1] - (p + eps * q1 + eps * eps * q2)[1])

    ratio = residual(1e-3) / residual(5e-4)
    assert 6.0 <= ratio <= 10.0


def test_propagator_consistency_small():
    m = random_model(env_dim=4, steps=2, seed=9)
    assert propagator_consistency(m, 0) < 1e-9


def test_model_guards():
    m = random_model(env_dim=4, steps=2, seed=10)
    with pytest.raises(ModelError):
        exact_string_prob(m, BitString(bits=(0, 0, 0)))  # more bits than steps
    with pytest.raises(ModelError):
        perturbative_corrections(m, 0, m.env_initial)  # no weak structure
