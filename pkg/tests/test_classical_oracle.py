import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from twirling.classical_oracle import ScalarKit, char_exponent, heat_kernel, lift_to_charges, u1_coherence_factor
from twirling.errors import InvalidInput, InvalidSpec
from twirling.superop import evolve, full_generator, jump_generator


def test_scalar_kit_validation():
    with pytest.raises(InvalidInput):
        ScalarKit(0.0, -1.0)
    with pytest.raises(InvalidInput):
        ScalarKit(0.0, 0.0, ((0.5, 0.0),))


def test_char_exponent_drift_diffusion():
    kit = ScalarKit(0.7, 0.3)
    for lam in (-2.0, 0.5, 3.0):
        assert char_exponent(kit, lam) == pytest.approx(1j * 0.7 * lam - 0.3 * lam ** 2)


def test_char_exponent_zero_and_pure_jump():
    kit = ScalarKit(0.4, 0.2, ((0.5, 1.0), (2.9, 0.3)))
    assert char_exponent(kit, 0.0) == 0
    assert char_exponent(ScalarKit(jumps=((math.pi, 1.0),)), 1.0) == pytest.approx(-2.0, abs=1e-15)


@given(b=st.floats(-3, 3), a=st.floats(0, 3), x=st.floats(-3, 3), w=st.floats(0.01, 3),
       lam=st.floats(-5, 5), t=st.floats(0, 5))
def test_contraction_and_conjugate_symmetry(b, a, x, w, lam, t):
    kit = ScalarKit(b, a, ((x, w),))
    assert abs(u1_coherence_factor(kit, lam, t)) <= 1 + 1e-12
    assert char_exponent(kit, -lam) == pytest.approx(np.conj(char_exponent(kit, lam)), abs=1e-12)


def test_u1_coherence_examples():
    beta, alpha = 0.9, 0.35
    kit = ScalarKit(beta, alpha)
    assert u1_coherence_factor(kit, 0, 3.0) == 1
    # |0><1| on charges (0, 1) has m = k_0 - k_1 = -1
    assert u1_coherence_factor(kit, -1, 1.0) == pytest.approx(np.exp(-1j * beta - alpha))
    rep, rkit = lift_to_charges(kit, [0, 1])
    s = evolve(full_generator(rep, rkit), 1.0).matrix
    assert s[2, 2] == pytest.approx(np.exp(-1j * beta - alpha), abs=1e-12)
    with pytest.raises(InvalidInput):
        u1_coherence_factor(kit, 1, -1.0)


def test_pure_jump_factor_matches_jump_generator():
    theta, w, t = 1.1, 0.8, 2.0
    kit = ScalarKit(jumps=((theta, w),), cutoff=0.9 * math.pi / 2)
    rep, rkit = lift_to_charges(kit, [0, 1, 2])
    s = evolve(jump_generator(rep, rkit.eta), t).matrix
    for j, kj in enumerate([0, 1, 2]):
        for l, kl in enumerate([0, 1, 2]):
            m = kj - kl
            xbar = theta if abs(theta) < kit.cutoff else 0.0
            expect = np.exp(t * w * (np.exp(1j * m * theta) - 1 - 1j * m * xbar))
            assert s[j + 3 * l, j + 3 * l] == pytest.approx(expect, abs=1e-12)


def test_lift_validation():
    kit = ScalarKit(0.1, 0.1, ((0.5, 1.0),))
    with pytest.raises(InvalidSpec):
        lift_to_charges(kit, [0, 2])
    with pytest.raises(InvalidSpec):
        lift_to_charges(kit, [0, 0])
    with pytest.raises(InvalidSpec):
        lift_to_charges(kit, [0, 1, 3])
    with pytest.raises(InvalidInput):
        lift_to_charges(ScalarKit(jumps=((4.0, 1.0),)), [0, 1])
    lift_to_charges(ScalarKit(0.1, 0.1, ((0.5, 1.0),), cutoff=0.9 * math.pi / 3), [0, 1, 3])


def test_heat_kernel_is_normalised_and_matches_fourier_transform():
    a, t = 0.4, 1.3
    assert quad(lambda y: heat_kernel(a, t, y), -np.inf, np.inf)[0] == pytest.approx(1.0, abs=1e-10)
    for lam in (0.5, 2.0):
        re = quad(lambda y: heat_kernel(a, t, y) * math.cos(lam * y), -np.inf, np.inf)[0]
        assert re == pytest.approx(math.exp(t * char_exponent(ScalarKit(0, a), lam).real), abs=1e-9)


def test_heat_kernel_solves_diffusion_equation():
    a, t, h = 0.7, 0.9, 1e-4
    y = np.linspace(-3, 3, 13)
    dt = (heat_kernel(a, t + h, y) - heat_kernel(a, t - h, y)) / (2 * h)
    dyy = (heat_kernel(a, t, y + h) - 2 * heat_kernel(a, t, y) + heat_kernel(a, t, y - h)) / h ** 2
    np.testing.assert_allclose(dt, a * dyy, atol=1e-5)
