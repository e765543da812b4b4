import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwmarkov import (
    CoinAngle,
    JointDistribution,
    NormalizationError,
    SpinorField,
    UsageError,
    evolve,
    interference,
    make_initial,
    position_distribution,
    run_unitary,
    step_unitary,
    two_step_position_identity,
)
from qwmarkov.walk import reconstruct_previous

from conftest import ANGLES, HADAMARD, dense_walk_operator, random_spinor

R2 = 1 / math.sqrt(2)


def amps(state):
    return {int(s): (complex(x), complex(y)) for s, x, y in zip(state.sites, state.a, state.b)
            if x != 0 or y != 0}


class TestCoinAngle:
    def test_rejects_out_of_range(self):
        with pytest.raises(UsageError):
            CoinAngle(-0.1)
        with pytest.raises(UsageError):
            CoinAngle(2.0)
        with pytest.raises(UsageError):
            CoinAngle(float("nan"))

    @pytest.mark.parametrize("theta, trivial", [(0.0, True), (math.pi / 2, True),
                                                (HADAMARD, False), (1e-3, False)])
    def test_trivial_flag(self, theta, trivial):
        assert CoinAngle(theta).trivial is trivial

    def test_trivial_cos_sin_exact(self):
        assert (CoinAngle(0.0).cos, CoinAngle(0.0).sin) == (1.0, 0.0)
        assert (CoinAngle(math.pi / 2).cos, CoinAngle(math.pi / 2).sin) == (0.0, 1.0)


class TestMakeInitial:
    def test_delta_left(self):
        s = make_initial(0, 1, 0)
        assert amps(s) == {0: (1, 0)}
        assert s.time == 0

    def test_translated_right(self):
        s = make_initial(5, 0, 1)
        assert amps(s) == {5: (0, 1)}

    def test_superposition_accepted(self):
        s = make_initial(0, R2, 1j * R2)
        assert s.norm == pytest.approx(1.0, abs=1e-15)

    def test_rejects_unnormalized(self):
        with pytest.raises(NormalizationError):
            make_initial(0, 1, 1)


class TestStepUnitary:
    def test_hadamard_first_step(self, backend):
        s1 = step_unitary(make_initial(0, 1, 0), CoinAngle(HADAMARD))
        got = amps(s1)
        assert set(got) == {-1, 1}
        assert got[-1][0] == pytest.approx(R2, abs=1e-15) and got[-1][1] == 0
        assert got[1][1] == pytest.approx(R2, abs=1e-15) and got[1][0] == 0
        assert (s1.origin, len(s1), s1.time) == (-1, 3, 1)

    def test_zero_angle_translates_left(self, backend):
        s1 = step_unitary(make_initial(0, 1, 0), CoinAngle(0.0))
        assert amps(s1) == {-1: (1, 0)}

    def test_hadamard_second_step(self, backend):
        coin = CoinAngle(HADAMARD)
        s2 = step_unitary(step_unitary(make_initial(0, 1, 0), coin), coin)
        expected = {-2: (0.5, 0), 0: (0.5, 0.5), 2: (0, -0.5)}
        got = amps(s2)
        assert set(got) == set(expected)
        for site, (ea, eb) in expected.items():
            assert got[site][0] == pytest.approx(ea, abs=1e-15)
            assert got[site][1] == pytest.approx(eb, abs=1e-15)

    @pytest.mark.parametrize("theta", ANGLES + [0.0, math.pi / 2, 0.3])
    def test_matches_dense_operator(self, backend, rng, theta):
        state = random_spinor(rng, 9, origin=-4)
        out = evolve(state, CoinAngle(theta), 3)
        n = len(out)
        padded = state.padded(out.origin, n)
        psi = np.empty(2 * n, dtype=complex)
        psi[0::2], psi[1::2] = padded.a, padded.b
        u = dense_walk_operator(theta, n)
        for _ in range(3):
            psi = u @ psi
        np.testing.assert_allclose(out.a, psi[0::2], atol=1e-14)
        np.testing.assert_allclose(out.b, psi[1::2], atol=1e-14)

    def test_input_not_mutated(self, backend, rng):
        s = random_spinor(rng, 5)
        before = s.a.copy()
        step_unitary(s, CoinAngle(0.4))
        np.testing.assert_array_equal(s.a, before)
        assert not s.a.flags.writeable


class TestEvolve:
    def test_zero_steps_identity(self, rng):
        s = random_spinor(rng, 4)
        assert evolve(s, CoinAngle(0.5), 0) is s

    def test_composition(self, backend):
        coin = CoinAngle(HADAMARD)
        s0 = make_initial(0, 1, 0)
        two = evolve(s0, coin, 2)
        manual = step_unitary(step_unitary(s0, coin), coin)
        np.testing.assert_array_equal(two.a, manual.a)
        np.testing.assert_array_equal(two.b, manual.b)

    def test_hadamard_variance_at_100(self, backend):
        d = position_distribution(evolve(make_initial(0, 1, 0), CoinAngle(HADAMARD), 100))
        p = d.left + d.right
        x = d.sites
        var = (x * x * p).sum() - (x * p).sum() ** 2
        coef = (math.sqrt(2) - 1) / 2
        assert abs(var - coef * 100 ** 2) < 0.05 * coef * 100 ** 2

    def test_norm_after_10k_steps(self, backend):
        s = evolve(make_initial(0, R2, 1j * R2), CoinAngle(0.3), 10_000)
        assert abs(s.norm - 1.0) < 1e-12
        assert (s.origin, len(s)) == (-10_000, 20_001)

    def test_run_records_match_final(self, backend):
        coin = CoinAngle(1.1)
        run = run_unitary(make_initial(3, 0, 1), coin, 40)
        d = position_distribution(run.final)
        p = d.left + d.right
        assert run.m1[-1] == pytest.approx((d.sites * p).sum(), abs=1e-12)
        assert run.sum_beta[-1] == pytest.approx(interference(run.final).sum0, abs=1e-14)
        assert run.times[0] == 0 and run.times[-1] == 40


class TestDistributionAndInterference:
    def test_point_mass(self):
        d = position_distribution(make_initial(0, 1, 0))
        assert (d.left.tolist(), d.right.tolist()) == ([1.0], [0.0])

    def test_first_hadamard_step(self, backend):
        d = position_distribution(step_unitary(make_initial(0, 1, 0), CoinAngle(HADAMARD)))
        np.testing.assert_allclose(d.left, [0.5, 0, 0], atol=1e-16)
        np.testing.assert_allclose(d.right, [0, 0, 0.5], atol=1e-16)

    @pytest.mark.parametrize("theta", ANGLES)
    def test_parity_zero_exactly(self, backend, theta):
        coin = CoinAngle(theta)
        s = make_initial(0, 0.6, 0.8j)
        for t in range(1, 30):
            s = step_unitary(s, coin)
            d = position_distribution(s)
            odd = (d.sites + t) % 2 == 1
            assert np.all(d.left[odd] == 0) and np.all(d.right[odd] == 0)

    def test_beta_vanishes_initially_and_after_one_step(self, backend):
        s = make_initial(0, 1, 0)
        assert np.all(interference(s).beta == 0)
        b1 = interference(step_unitary(s, CoinAngle(HADAMARD)))
        assert np.all(b1.beta == 0) and b1.sum0 == 0 and b1.sum1 == 0

    def test_beta_definition(self, rng):
        s = random_spinor(rng, 7, origin=-3)
        f = interference(s)
        np.testing.assert_array_equal(f.beta, (s.a * np.conj(s.b)).real)
        assert f.sum1 == pytest.approx(float((s.sites * f.beta).sum()), abs=1e-15)

    def test_hadamard_sum_beta_tends_to_A(self, backend):
        run = run_unitary(make_initial(0, 1, 0), CoinAngle(HADAMARD), 2000)
        A = (2 - math.sqrt(2)) / 4
        # oscillation envelope decays like t^-1/2
        assert abs(run.sum_beta[-1] / A - 1) < 0.04
        assert abs(np.mean(run.sum_beta[1000:]) / A - 1) < 1e-3


class TestTwoStepIdentity:
    def test_hadamard_t1_and_t2(self, backend):
        coin = CoinAngle(HADAMARD)
        s0 = make_initial(0, 1, 0)
        s1 = step_unitary(s0, coin)
        s2 = step_unitary(s1, coin)
        assert two_step_position_identity(s1, position_distribution(s0))
        assert two_step_position_identity(s2, position_distribution(s1))

    def test_theta_pi3_t10(self, backend):
        coin = CoinAngle(math.pi / 3)
        s9 = evolve(make_initial(0, 1, 0), coin, 9)
        s10 = step_unitary(s9, coin)
        assert two_step_position_identity(s10, position_distribution(s9))

    def test_detects_wrong_predecessor(self, backend):
        coin = CoinAngle(math.pi / 3)
        s9 = evolve(make_initial(0, 1, 0), coin, 9)
        d9 = position_distribution(s9)
        shifted = JointDistribution(d9.origin + 2, d9.left, d9.right, d9.time)
        assert not two_step_position_identity(step_unitary(s9, coin), shifted)

    def test_missing_predecessor(self, backend):
        s1 = step_unitary(make_initial(0, 1, 0), CoinAngle(HADAMARD))
        with pytest.raises(UsageError):
            two_step_position_identity(s1)

    def test_wrong_time(self, backend):
        s0 = make_initial(0, 1, 0)
        s2 = evolve(s0, CoinAngle(HADAMARD), 2)
        with pytest.raises(UsageError):
            two_step_position_identity(s2, position_distribution(s0))

    def test_reconstruction_window(self, backend):
        s3 = evolve(make_initial(2, 1, 0), CoinAngle(0.5), 3)
        prev = reconstruct_previous(s3)
        assert (prev.origin, len(prev.probs), prev.time) == (0, 5, 2)


class TestSerialization:
    def test_text_round_trip(self, rng):
        s = random_spinor(rng, 6, origin=-2, time=4)
        text = s.to_text()
        assert text.splitlines()[0].split("\t")[0] == "-2"
        assert len(text.splitlines()[0].split("\t")) == 5
        back = SpinorField.from_text(text, time=4)
        np.testing.assert_array_equal(back.a, s.a)
        np.testing.assert_array_equal(back.b, s.b)
        assert back.origin == -2


# property suite

_windows = st.integers(min_value=1, max_value=64)
_angles = st.floats(min_value=0.0, max_value=math.pi / 2)
_seeds = st.integers(min_value=0, max_value=2 ** 31)


@settings(max_examples=60, deadline=None)
@given(n=_windows, theta=_angles, seed=_seeds)
def test_unitarity_one_step(n, theta, seed):
    s = random_spinor(np.random.default_rng(seed), n)
    out = step_unitary(s, CoinAngle(theta))
    assert abs(out.norm - s.norm) < 1e-14


@settings(max_examples=60, deadline=None)
@given(n=_windows, theta=_angles, seed=_seeds)
def test_distribution_map_consistency(n, theta, seed):
    """Marginals after a step equal the probability map fed with (P, beta)."""
    coin = CoinAngle(theta)
    s = random_spinor(np.random.default_rng(seed), n)
    d0, b0 = position_distribution(s), interference(s)
    d1 = position_distribution(step_unitary(s, coin))
    c2, s2, s2t = coin.cos2, coin.sin2, coin.sin_2theta
    pl = np.pad(d0.left, 2)
    pr = np.pad(d0.right, 2)
    bt = np.pad(b0.beta, 2)
    # output index k <-> input padded index k+2 (site i+1) and k (site i-1)
    exp_l = pl[2:] * c2 + pr[2:] * s2 + bt[2:] * s2t
    exp_r = pl[:-2] * s2 + pr[:-2] * c2 - bt[:-2] * s2t
    np.testing.assert_allclose(d1.left, exp_l, atol=1e-14, rtol=0)
    np.testing.assert_allclose(d1.right, exp_r, atol=1e-14, rtol=0)


@settings(max_examples=60, deadline=None)
@given(n=_windows, seed=_seeds)
def test_cauchy_schwarz(n, seed):
    s = random_spinor(np.random.default_rng(seed), n)
    d, f = position_distribution(s), interference(s)
    assert np.all(np.abs(f.beta) <= np.sqrt(d.left * d.right) + 1e-15)


@settings(max_examples=30, deadline=None)
@given(theta=_angles, seed=_seeds, steps=st.integers(min_value=2, max_value=40))
def test_chirality_decoupling(theta, seed, steps):
    from qwmarkov import decoupled_map_check

    coin = CoinAngle(theta)
    s = evolve(random_spinor(np.random.default_rng(seed), 5), coin, steps)
    hist = [s, step_unitary(s, coin)]
    hist.append(step_unitary(hist[-1], coin))
    assert decoupled_map_check(hist, coin) < 1e-13


def test_joint_distribution_rejects_negative():
    with pytest.raises(UsageError):
        JointDistribution(0, [-0.1], [1.1])
