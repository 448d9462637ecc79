"""Tests for the probability containers and base-2 information measures.

Frozen reference numbers were computed independently with mpmath at 40
decimal digits and pasted here; they are not outputs of the code under test.
"""
import math

import numpy as np
import pytest

from siexp.probkit import (
    ConditionalDistribution,
    Distribution,
    JointDistribution,
    compose,
    conditional_entropy,
    conditional_kl,
    entropy,
    entropy_bits,
    kl_bits,
    kl_divergence,
    mutual_information,
)

# Joint source law used throughout the suite: A uniform, B a noisy copy.
WORKED_JOINT = ((0.50, 0.00), (0.05, 0.45))

# mpmath oracles (40 digits, truncated to double precision)
H_COND_WORKED = 0.24172334280683231697
MI_WORKED = 0.75827665719316768303
H_BINARY_0025 = 0.16866093149667021457
KL_UNIFORM_VS_9010 = 0.73696559416620617
KL_UNIFORM_VS_2575 = 0.20751874963942191
COND_KL_BSC01_BSC0025 = 0.09607050432205762


def worked():
    return JointDistribution(np.array(WORKED_JOINT))


# ---------------------------------------------------------------------------
# container validation


def test_distribution_rejects_bad_input():
    with pytest.raises(ValueError):
        Distribution(np.array([0.5, -0.5, 1.0]))
    with pytest.raises(ValueError):
        Distribution(np.array([[0.5, 0.5]]))
    with pytest.raises(ValueError):
        Distribution(np.array([0.5, math.nan]))
    with pytest.raises(ValueError):
        Distribution(np.array([0.5, math.inf]))
    with pytest.raises(ValueError):
        Distribution(np.array([], dtype=float))
    with pytest.raises(ValueError):
        Distribution(np.array([0.6, 0.6]))  # mass 1.2


def test_distribution_renormalizes_tiny_drift():
    d = Distribution(np.array([0.5 + 2e-10, 0.5]))
    assert d.probs.sum() == 1.0
    assert not d.probs.flags.writeable
    assert Distribution.uniform(4).probs.tolist() == [0.25] * 4


def test_joint_distribution_marginals():
    j = worked()
    assert j.shape == (2, 2)
    np.testing.assert_allclose(j.row_marginal().probs, [0.5, 0.5], atol=1e-15)
    np.testing.assert_allclose(j.col_marginal().probs, [0.55, 0.45], atol=1e-15)
    rows = j.conditional_rows()
    np.testing.assert_allclose(rows.matrix, [[1.0, 0.0], [0.1, 0.9]], atol=1e-15)
    with pytest.raises(ValueError):
        JointDistribution(np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        JointDistribution(np.array([[0.7, 0.0], [0.0, 0.7]]))


def test_conditional_rows_with_zero_mass_row():
    j = JointDistribution(np.array([[1.0, 0.0], [0.0, 0.0]]))
    rows = j.conditional_rows()
    # the dead row is filled uniformly but carries no probability
    np.testing.assert_allclose(rows.matrix[1], [0.5, 0.5])


def test_conditional_distribution_validation():
    c = ConditionalDistribution(np.array([[0.9, 0.1], [0.2, 0.8]]))
    assert c.input_size == 2 and c.output_size == 2
    with pytest.raises(ValueError):
        ConditionalDistribution(np.array([[0.9, 0.2], [0.2, 0.8]]))  # row sums 1.1
    with pytest.raises(ValueError):
        ConditionalDistribution(np.array([[1.0, -0.0001, 0.0001]]))


def test_compose_builds_the_joint():
    s = Distribution(np.array([0.3, 0.7]))
    v = ConditionalDistribution(np.array([[0.9, 0.1], [0.2, 0.8]]))
    j = compose(s, v)
    np.testing.assert_allclose(
        j.matrix, [[0.27, 0.03], [0.14, 0.56]], atol=1e-15
    )
    with pytest.raises(ValueError):
        compose(Distribution(np.array([1.0])), v)


# ---------------------------------------------------------------------------
# frozen information measures


def test_entropy_frozen_values():
    assert entropy(Distribution(np.array([0.025, 0.975]))) == pytest.approx(
        H_BINARY_0025, abs=1e-14
    )
    for k in range(2, 7):
        assert entropy(Distribution.uniform(k)) == pytest.approx(math.log2(k), abs=1e-12)
    assert entropy(Distribution(np.array([1.0, 0.0]))) == 0.0


def test_conditional_entropy_frozen():
    assert conditional_entropy(worked()) == pytest.approx(H_COND_WORKED, abs=1e-14)


def test_mutual_information_frozen():
    j = worked()
    mi = mutual_information(j.row_marginal(), j.conditional_rows())
    assert mi == pytest.approx(MI_WORKED, abs=1e-14)
    with pytest.raises(ValueError):
        mutual_information(Distribution.uniform(3), j.conditional_rows())


def test_mutual_information_clamps_to_zero_when_independent():
    v = ConditionalDistribution(np.array([[0.4, 0.6], [0.4, 0.6]]))
    assert mutual_information(Distribution(np.array([0.2, 0.8])), v) == 0.0


def test_kl_frozen_values():
    u = Distribution.uniform(2)
    assert kl_divergence(u, Distribution(np.array([0.9, 0.1]))) == pytest.approx(
        KL_UNIFORM_VS_9010, abs=1e-14
    )
    assert kl_divergence(u, Distribution(np.array([0.25, 0.75]))) == pytest.approx(
        KL_UNIFORM_VS_2575, abs=1e-14
    )
    with pytest.raises(ValueError):
        kl_divergence(u, Distribution.uniform(3))


def test_conditional_kl_frozen():
    v = ConditionalDistribution(np.array([[0.9, 0.1], [0.1, 0.9]]))
    w = ConditionalDistribution(np.array([[0.975, 0.025], [0.025, 0.975]]))
    got = conditional_kl(v, w, Distribution.uniform(2))
    assert got == pytest.approx(COND_KL_BSC01_BSC0025, abs=1e-14)
    # rows with zero input mass are skipped entirely
    only_first = conditional_kl(v, w, Distribution(np.array([1.0, 0.0])))
    assert only_first == pytest.approx(float(kl_bits(v.matrix[0], w.matrix[0])), abs=1e-15)
    with pytest.raises(ValueError):
        conditional_kl(v, w, Distribution.uniform(3))


# ---------------------------------------------------------------------------
# structural identities on random instances


def test_chain_rule_on_random_joints():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        na = int(rng.integers(2, 6))
        nb = int(rng.integers(2, 6))
        m = rng.random((na, nb)) + 1e-3
        j = JointDistribution(m / m.sum())
        h_joint = float(entropy_bits(j.matrix))
        h_b = float(entropy_bits(j.matrix.sum(axis=0)))
        assert abs(h_joint - h_b - conditional_entropy(j)) <= 1e-10
        # H(A) - I(A;B) must also reproduce H(A|B)
        mi = mutual_information(j.row_marginal(), j.conditional_rows())
        h_a = entropy(j.row_marginal())
        assert abs(h_a - mi - conditional_entropy(j)) <= 1e-9


def test_kl_nonnegative_with_pinsker_gap():
    rng = np.random.default_rng(11)
    ln2 = math.log(2.0)
    for _ in range(500):
        k = int(rng.integers(2, 6))
        q = rng.random(k) + 1e-3
        p = rng.random(k) + 1e-3
        q, p = q / q.sum(), p / p.sum()
        d = kl_divergence(Distribution(q), Distribution(p))
        l1 = float(np.abs(q - p).sum())
        assert d >= l1 * l1 / (2.0 * ln2) - 1e-12
        assert kl_divergence(Distribution(q), Distribution(q)) == 0.0


def test_kl_support_violation_is_infinite():
    q = Distribution(np.array([0.5, 0.5]))
    p = Distribution(np.array([1.0, 0.0]))
    assert kl_divergence(q, p) == math.inf
    v = ConditionalDistribution(np.array([[0.5, 0.5], [0.5, 0.5]]))
    w = ConditionalDistribution(np.array([[1.0, 0.0], [0.5, 0.5]]))
    assert conditional_kl(v, w, Distribution.uniform(2)) == math.inf
    # but not when the offending row has zero input mass
    assert math.isfinite(conditional_kl(v, w, Distribution(np.array([0.0, 1.0]))))


def test_entropy_bits_axis_handling():
    m = np.array([[0.5, 0.5], [1.0, 0.0]])
    np.testing.assert_allclose(entropy_bits(m, axis=1), [1.0, 0.0], atol=1e-15)
    assert entropy_bits(np.array([0.25, 0.25, 0.25, 0.25])) == pytest.approx(2.0, abs=1e-15)
