"""The eleven acceptance criteria, each at its stated tolerance.

Each test records a one-line summary; ``conftest.py`` prints a PASS/FAIL line
per criterion at the end of the run.
"""
import json
import math
import time
import warnings

import numpy as np

from conftest import ACCEPTANCE_DETAILS
from twirling.analyzer import choi, covariance_check, covariance_defect, is_ccp_generator, is_cptp, pauli_decompose, \
    truncation_convergence
from twirling.classical_oracle import ScalarKit, lift_to_charges, u1_coherence_factor
from twirling.cli import main
from twirling.errors import AmbiguousPreimage
from twirling.kit import LevyMeasure, RepresentationKit, hunt_function, random_kit
from twirling.lie_core import group_exp, su2_spin, suN_defining, torus_charges, u1_charges
from twirling.sampler import PathConfig, twirl_mc
from twirling.superop import (Superoperator, apply, commutator, evolve, full_generator, gkls_canonical, gkls_superop,
                              jump_generator, kit_from_gkls, projector_vu)

FAMILIES = [
    su2_spin(0.5),
    su2_spin(1),
    suN_defining(3),
    u1_charges([0, 1, -2]),
    torus_charges([[1, 0, 2], [0, 1, 1]]),
]


def record(number, text):
    ACCEPTANCE_DETAILS[number] = text
    print(f"criterion {number}: {text}")


def kits(count, seed):
    rng = np.random.default_rng(seed)
    for k in range(count):
        rep = FAMILIES[k % len(FAMILIES)]
        yield rep, random_kit(rep, rng)


def test_criterion_01_cptp_suite():
    worst_eig, worst_trace, worst_unital, failures = math.inf, 0.0, 0.0, 0
    for rep, kit in kits(200, 1):
        L = full_generator(rep, kit)
        for t in (0.1, 1.0, 10.0):
            r = is_cptp(evolve(L, t), tol=1e-9)
            worst_eig = min(worst_eig, r.choi_min_eig)
            worst_trace = max(worst_trace, r.trace_margin)
            worst_unital = max(worst_unital, r.unital_margin)
            failures += not r.is_cptp
    record(1, f"200 kits x 3 times, min Choi eig {worst_eig:.2e}, trace margin {worst_trace:.1e}, "
              f"unital margin {worst_unital:.1e}")
    assert failures == 0
    assert worst_eig >= -1e-9
    assert worst_trace <= 1e-10 and worst_unital <= 1e-10


def test_criterion_02_gkls_structure():
    worst_rebuild, ccp_failures, size_failures = 0.0, 0, 0
    for rep, kit in kits(200, 2):
        L = full_generator(rep, kit)
        ccp_failures += not is_ccp_generator(L)
        form = gkls_canonical(rep, kit)
        worst_rebuild = max(worst_rebuild, (gkls_superop(rep, form) - L).norm())
        size_failures += len(form.pairs) > projector_vu(rep).dim
    record(2, f"CCP failures {ccp_failures}, max rebuild error {worst_rebuild:.1e}, "
              f"pair-count violations {size_failures}")
    assert ccp_failures == 0 and size_failures == 0
    assert worst_rebuild <= 1e-8


def test_criterion_03_converse_round_trip():
    worst = 0.0
    with warnings.catch_warnings():
        # the torus family has a non-injective pi_U; the minimum-norm preimage is used
        warnings.simplefilter("ignore", AmbiguousPreimage)
        for rep, kit in kits(100, 3):
            back = kit_from_gkls(rep, gkls_canonical(rep, kit))
            worst = max(worst, (full_generator(rep, back) - full_generator(rep, kit)).norm())
    record(3, f"100 kits, max generator mismatch {worst:.1e}")
    assert worst <= 1e-7


def test_criterion_04_u1_oracle():
    rng = np.random.default_rng(4)
    charge_sets = [[0, 1], [0, 1, -1], [0, 1, 2], [1, -2, 3], [0, 2, 3, -1]]
    worst = 0.0
    for k in range(50):
        charges = charge_sets[k % len(charge_sets)]
        cutoff = 0.9 * math.pi / max(abs(c) for c in charges)
        jumps = tuple((float(rng.uniform(-math.pi, math.pi)), float(rng.uniform(0.1, 2.0)))
                      for _ in range(int(rng.integers(0, 4))))
        sk = ScalarKit(float(rng.normal()), float(rng.uniform(0, 1)), jumps, cutoff)
        rep, kit = lift_to_charges(sk, charges)
        L = full_generator(rep, kit)
        n = len(charges)
        for t in (0.3, 1.0, 2.5):
            s = evolve(L, t).matrix
            for j in range(n):
                for l in range(n):
                    got = s[j + l * n, j + l * n]
                    worst = max(worst, abs(got - u1_coherence_factor(sk, charges[j] - charges[l], t)))
    record(4, f"50 scalar kits, max coherence error {worst:.1e}")
    assert worst <= 1e-10


def test_criterion_05_mc_crosscheck():
    rep = su2_spin(0.5)
    kit = RepresentationKit(np.zeros(3), 0.5 * np.eye(3))
    start = time.perf_counter()
    est = twirl_mc(rep, kit, 1.0, 100_000, PathConfig(dt=1e-3, t_final=1.0, seed=20260101))
    elapsed = time.perf_counter() - start
    deviation = (est.mean - evolve(full_generator(rep, kit), 1.0)).norm()
    record(5, f"deviation {deviation:.4f}, std error {est.std_error:.4f}, runtime {elapsed:.1f} s")
    assert deviation <= 0.05
    assert deviation <= 5 * est.std_error
    assert elapsed <= 60


def test_criterion_06_depolarizer_closed_form():
    c = 0.5
    L = full_generator(su2_spin(0.5), RepresentationKit(np.zeros(3), c * np.eye(3)))
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(10):
        m = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        rho = m @ m.conj().T
        rho /= np.trace(rho)
        for t in (0.1, 1.0, 5.0):
            lam = math.exp(-2 * c * t)
            expect = lam * rho + (1 - lam) * np.trace(rho) * np.eye(2) / 2
            worst = max(worst, np.abs(apply(evolve(L, t), rho) - expect).max())
    record(6, f"max entrywise error {worst:.1e}")
    assert worst <= 1e-9


def test_criterion_07_pauli_cardinality():
    rep = su2_spin(0.5)
    rng = np.random.default_rng(7)
    tested, worst_sum, worst_neg = 0, 0.0, 0.0
    for _ in range(100):
        L = full_generator(rep, random_kit(rep, rng))
        for t in (0.05, 0.5, 2.0, 10.0):
            probs = pauli_decompose(evolve(L, t)).probs
            assert len(probs) <= 4
            worst_sum = max(worst_sum, abs(probs.sum() - 1))
            worst_neg = min(worst_neg, probs.min())
            tested += 1
    record(7, f"{tested} channels, max |sum - 1| {worst_sum:.1e}, min weight {worst_neg:.1e}")
    assert worst_sum <= 1e-9
    assert worst_neg >= -1e-9


def test_criterion_08_truncation_convergence():
    rep = su2_spin(0.5)
    rng = np.random.default_rng(8)
    phi = hunt_function(rep)
    atoms = []
    radii = [0.1] + list(rng.uniform(0.1, 1.4 * rep.cutoff_radius, 9))
    for r in radii:
        direction = rng.standard_normal(3)
        g = group_exp(rep, r * direction / np.linalg.norm(direction))
        atoms.append((g, float(rng.uniform(0.2, 2.0))))
    eta = LevyMeasure(tuple(atoms))
    assert min(phi(g) for g, _ in eta) >= 0.01 - 1e-12
    kit = RepresentationKit([0.2, -0.1, 0.0], 0.1 * np.eye(3), eta)
    ms = [2 ** k for k in range(11)]
    devs = [d for _, d in truncation_convergence(rep, kit, ms)]
    bound = math.exp(-0.01 * 1024) * jump_generator(rep, eta).norm() * 1.01
    monotone = all(b <= a + 1e-12 for a, b in zip(devs, devs[1:]))
    record(8, f"non-increasing {monotone}, final deviation {devs[-1]:.3e} vs bound {bound:.3e}")
    assert monotone
    assert devs[-1] <= bound


def test_criterion_09_covariance():
    rep = su2_spin(0.5)
    L = full_generator(rep, RepresentationKit(np.zeros(3), np.diag([0.0, 0.0, 0.7])))
    rng = np.random.default_rng(9)
    same = [covariance_check(rep, L, group_exp(rep, [0, 0, a]), tol=1e-9) for a in rng.uniform(-10, 10, 20)]
    margins = []
    for _ in range(20):
        phi_axis = rng.uniform(0, 2 * math.pi)
        axis = np.array([math.cos(phi_axis), math.sin(phi_axis), 0.0])
        # rotations by multiples of pi about a transverse axis map z to -z and commute
        angle = rng.uniform(0.3, math.pi - 0.3) + (math.pi if rng.random() < 0.5 else 0.0)
        g = group_exp(rep, angle * axis)
        margins.append((covariance_check(rep, L, g, tol=1e-9), covariance_defect(rep, L, g)))
    record(9, f"same-axis accepted {sum(same)}/20, transverse rejected {sum(not ok for ok, _ in margins)}/20, "
              f"min transverse defect {min(m for _, m in margins):.3f}")
    assert all(same)
    assert not any(ok for ok, _ in margins)
    assert min(m for _, m in margins) >= 1e-3


def test_criterion_10_unitary_lineality():
    rng = np.random.default_rng(10)
    worst = 0.0
    for k in range(20):
        rep = FAMILIES[k % len(FAMILIES)]
        proj = projector_vu(rep)
        h = np.tensordot(rng.standard_normal(proj.dim), proj.basis, axes=1)
        L = Superoperator(1j * commutator(h), rep.dim_hilbert)
        for t in (0.5, 2.0):
            eig = np.sort(np.linalg.eigvalsh(choi(evolve(L, t))))[::-1]
            worst = max(worst, eig[1])
    record(10, f"20 Hamiltonians, max second Choi eigenvalue {worst:.1e}")
    assert worst <= 1e-9


def test_criterion_11_determinism(tmp_path):
    rep_cfg = {"family": "su2_spin", "params": {"spin": 0.5}}
    cfg = {
        "representation": rep_cfg,
        "kit": {"b": [0.1, 0.0, 0.2], "a": [[0.3, 0.0, 0.0], [0.0, 0.2, 0.0], [0.0, 0.0, 0.1]],
                "eta": [{"coords": [0.4, 0.2, 0.0], "weight": 1.0}, {"coords": [0.0, 3.0, 4.0], "weight": 0.5}]},
        "t": 1.0, "n_samples": 5000, "dt": 0.01, "seed": 123456789, "tolerance": 0.2,
        "dump_endpoints": True,
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    outs = [tmp_path / "run1", tmp_path / "run2"]
    codes = [main(["crosscheck", "--config", str(path), "--out", str(o)]) for o in outs]
    files = sorted(p.name for p in outs[0].iterdir() if p.name != "meta.json")
    identical = all((outs[0] / f).read_bytes() == (outs[1] / f).read_bytes() for f in files)
    record(11, f"exit codes {codes}, {len(files)} primary files byte-identical: {identical}")
    assert codes == [0, 0]
    assert set(files) >= {"crosscheck.json", "mc_mean.txt", "exact.txt", "endpoints.bin", "endpoints.bin.json"}
    assert identical
