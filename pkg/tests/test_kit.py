import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twirling.errors import InvalidInput
from twirling.kit import (KitClass, LevyMeasure, RepresentationKit, atoms_from_coords, classify,
                          drift_correction, hunt_function, random_kit, truncate)
from twirling.lie_core import group_exp, identity, su2_spin, u1_charges


@pytest.fixture
def su2():
    return su2_spin(0.5)


def test_levy_measure_validation(su2):
    g = group_exp(su2, [0.3, 0, 0])
    with pytest.raises(InvalidInput):
        LevyMeasure(((g, 0.0),))
    with pytest.raises(InvalidInput):
        LevyMeasure(((g, -1.0),))
    with pytest.raises(InvalidInput):
        LevyMeasure(((identity(su2), 1.0),))
    eta = LevyMeasure(((g, 1.5), (g.inverse(), 0.5)))
    assert len(eta) == 2
    assert eta.total_mass == 2.0


def test_kit_validation():
    with pytest.raises(InvalidInput):
        RepresentationKit([0, 0], [[1, 2], [0, 1]])
    with pytest.raises(InvalidInput):
        RepresentationKit([0, 0], [[1, 0], [0, -1e-6]])
    with pytest.raises(InvalidInput):
        RepresentationKit([0, 0, 0], np.eye(2))
    # slightly negative eigenvalues are clamped
    kit = RepresentationKit([0, 0], [[1, 0], [0, -5e-11]])
    assert np.linalg.eigvalsh(kit.a).min() >= 0


def test_classify_examples(su2):
    g = group_exp(su2, [0.2, 0.1, 0])
    assert classify(RepresentationKit(np.zeros(3), np.eye(3))) is KitClass.GAUSSIAN
    assert classify(RepresentationKit([1, 0, 0], np.zeros((3, 3)))) is KitClass.PURE_DRIFT
    assert classify(RepresentationKit(np.zeros(3), np.zeros((3, 3)), LevyMeasure(((g, 2.0),)))) is KitClass.FIRST_KIND_JUMP
    assert classify(RepresentationKit([1, 0, 0], np.zeros((3, 3)), LevyMeasure(((g, 2.0),)))) is KitClass.MIXED
    assert classify(RepresentationKit(np.zeros(3), np.eye(3), LevyMeasure(((g, 2.0),)))) is KitClass.MIXED


def test_drift_correction_examples(su2):
    assert np.array_equal(drift_correction(su2, LevyMeasure()), np.zeros(3))
    u1 = u1_charges([0, 1])
    eta = atoms_from_coords(u1, [[0.5]], [2.0])
    np.testing.assert_allclose(drift_correction(u1, eta), [-1.0], atol=1e-15)


def test_drift_correction_symmetric_measure_vanishes(su2, rng):
    atoms = []
    for _ in range(4):
        g = group_exp(su2, rng.uniform(-1, 1, 3))
        w = float(rng.uniform(0.1, 2))
        atoms += [(g, w), (g.inverse(), w)]
    assert np.abs(drift_correction(su2, LevyMeasure(tuple(atoms)))).max() <= 1e-12


def test_drift_correction_ignores_exterior_atoms():
    u1 = u1_charges([0, 1])
    eta = atoms_from_coords(u1, [[3.0], [0.2]], [1.0, 1.0])
    np.testing.assert_allclose(drift_correction(u1, eta), [-0.2], atol=1e-15)


@given(st.data())
def test_drift_correction_linear(data):
    rep = su2_spin(0.5)
    def measure():
        k = data.draw(st.integers(0, 3))
        coords = [data.draw(st.lists(st.floats(-4, 4), min_size=3, max_size=3)) for _ in range(k)]
        coords = [c for c in coords if np.linalg.norm(c) > 1e-3]
        weights = [data.draw(st.floats(0.01, 5)) for _ in coords]
        return atoms_from_coords(rep, coords, weights)
    e1, e2 = measure(), measure()
    np.testing.assert_allclose(drift_correction(rep, e1 + e2),
                               drift_correction(rep, e1) + drift_correction(rep, e2), atol=1e-12)


def test_hunt_function():
    u1 = u1_charges([0, 1])
    phi = hunt_function(u1)
    assert math.isclose(phi(group_exp(u1, [0.1])), 0.01)
    assert phi(group_exp(u1, [1.2])) == 1.0
    assert phi(group_exp(u1, [3.0])) == 1.0


def test_truncate_examples():
    u1 = u1_charges([0, 1])
    phi = hunt_function(u1)
    assert len(truncate(LevyMeasure(), 3, phi)) == 0
    eta = atoms_from_coords(u1, [[1.0]], [2.0])
    np.testing.assert_allclose(truncate(eta, 1, phi).weights, [2.0 * (1 - math.exp(-1))])
    with pytest.raises(InvalidInput):
        truncate(eta, 0, phi)
    big = atoms_from_coords(u1, [[0.04], [0.5], [2.0]], [1.0, 3.0, 0.5])
    np.testing.assert_allclose(truncate(big, 1e6, phi).weights, big.weights, rtol=1e-6)


def test_truncate_drops_tiny_atoms():
    u1 = u1_charges([0, 1])
    eta = atoms_from_coords(u1, [[1e-9], [0.5]], [1.0, 1.0])
    assert len(truncate(eta, 1, hunt_function(u1))) == 1


@given(ms=st.lists(st.floats(0.01, 1e4), min_size=2, max_size=6))
def test_truncate_monotone_and_bounded(ms):
    rep = su2_spin(0.5)
    rng = np.random.default_rng(7)
    eta = random_kit(rep, rng, n_atoms=5).eta
    phi = hunt_function(rep)
    ms = sorted(ms)
    prev = np.zeros(len(eta))
    for m in ms:
        w = truncate(eta, m, phi).weights
        assert len(w) == len(eta)
        assert np.all(w >= prev - 1e-15)
        assert w.sum() <= eta.total_mass + 1e-12
        prev = w


def test_random_kit_is_valid(rep, rng):
    for _ in range(10):
        kit = random_kit(rep, rng)
        assert kit.n == rep.dim_group
        assert np.linalg.eigvalsh(kit.a).min() >= -1e-12
