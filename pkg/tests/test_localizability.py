import itertools
from math import cos, pi, sin, tan

import numpy as np
import pytest

from nonloc.linalg import dm, partial_transpose
from nonloc.localizability import (
    NoSupportError,
    _objective,
    beta_closed_form,
    beta_opt_closed_form,
    certify_nonlocalizable,
    conditional_state,
    detection_probability,
    is_nonlocalizable,
    measured_blocks,
    minimize_pt_eig,
    theta_opt_closed_form,
)
from nonloc.states import basis_ket, bell_phi, bloch_state, ghz, rho_p, rho_p_mu


def conditional_by_projector(rho, qubit, theta, phi):
    """Reference: apply the full 8x8 projector and trace out with explicit loops."""
    psi = bloch_state(theta, phi)
    ops = [np.eye(2)] * 3
    ops[qubit] = dm(psi)
    proj = np.kron(np.kron(ops[0], ops[1]), ops[2])
    t = (proj @ rho @ proj).reshape([2] * 6)
    t = np.trace(t, axis1=qubit, axis2=3 + qubit)
    sigma = t.reshape(4, 4)
    prob = np.trace(sigma).real
    return sigma / prob, prob


def test_conditional_state_matches_projector_reference(rng):
    from conftest import random_density_matrix

    rho = random_density_matrix(rng, 3)
    for q, theta, phi in itertools.product(range(3), (0.3, 1.9), (0.0, 2.5)):
        s1, p1 = conditional_state(rho, q, theta, phi)
        s2, p2 = conditional_by_projector(rho, q, theta, phi)
        np.testing.assert_allclose(s1, s2, atol=1e-14)
        assert p1 == pytest.approx(p2, abs=1e-14)


def test_conditional_state_rho_p_plus_direction():
    p = 0.4
    sigma, prob = conditional_state(rho_p(p), 2, pi / 2, 0.0)
    tau = 0.5 * (dm(basis_ket("00")) + dm(basis_ket("11"))) + 0.5 * (
        np.outer(basis_ket("00"), basis_ket("11")) + np.outer(basis_ket("11"), basis_ket("00")))
    np.testing.assert_allclose(sigma, p * tau + (1 - p) / 4 * np.eye(4), atol=1e-15)
    assert prob == pytest.approx(0.5)


def test_conditional_state_ghz_gives_bell():
    sigma, _ = conditional_state(dm(ghz()), 2, pi / 2, 0.0)
    np.testing.assert_allclose(sigma, dm(bell_phi()), atol=1e-15)


def test_conditional_state_maximally_mixed():
    for q in range(3):
        sigma, prob = conditional_state(np.eye(8) / 8, q, 1.234, 5.0)
        np.testing.assert_allclose(sigma, np.eye(4) / 4, atol=1e-15)
        assert prob == pytest.approx(0.5)


def test_conditional_state_no_support():
    with pytest.raises(NoSupportError):
        conditional_state(dm(basis_ket("000")), 2, pi, 0.0)


def test_detection_probability():
    for theta in np.linspace(0, pi, 7):
        assert detection_probability(0.7, 1, theta) == pytest.approx(0.5)
        assert detection_probability(0, 0.3, theta) == pytest.approx(0.5)
    assert detection_probability(0.9, 0, 0) == pytest.approx(0.65)
    _, prob = conditional_state(rho_p_mu(0.9, 0), 2, 0.0, 0.0)
    assert prob == pytest.approx(0.65, abs=1e-12)


def test_detection_probability_matches_conditional_state():
    for p, mu, theta in itertools.product((0.2, 0.9), (0, 0.5), (0.4, 2.8)):
        _, prob = conditional_state(rho_p_mu(p, mu), 2, theta, 0.7)
        assert prob == pytest.approx(detection_probability(p, mu, theta), abs=1e-12)


def test_beta_closed_form_anchor():
    assert beta_closed_form(0.25, 1, pi / 2) == pytest.approx(1 / 32, abs=1e-15)
    sigma, prob = conditional_state(rho_p_mu(0.25, 1), 2, pi / 2, 0)
    unnorm = prob * partial_transpose(sigma, 0)
    assert np.linalg.eigvalsh(unnorm)[0] == pytest.approx(1 / 32, abs=1e-14)
    assert beta_closed_form(0, 0.4, 1.0) == pytest.approx(1 / 8)


def test_beta_sign_matches_eigensolver():
    for p, mu, theta in itertools.product(np.linspace(0.05, 1, 8), np.linspace(0, 1, 6), np.linspace(0, pi, 9)):
        sigma, prob = conditional_state(rho_p_mu(p, mu), 2, theta, 0.3)
        lo = np.linalg.eigvalsh(prob * partial_transpose(sigma, 0))[0]
        b = beta_closed_form(p, mu, theta)
        if abs(b) > 1e-12 and abs(lo) > 1e-12:
            assert np.sign(lo) == np.sign(b)


def test_normalization_consistency():
    checked = 0
    for p, mu, theta in itertools.product(np.linspace(0.1, 1, 7), np.linspace(0, 1, 6), np.linspace(0, pi, 9)):
        sigma, prob = conditional_state(rho_p_mu(p, mu), 2, theta, 1.0)
        spectrum = np.linalg.eigvalsh(partial_transpose(sigma, 0))
        b = beta_closed_form(p, mu, theta)
        if np.min(np.abs(prob * spectrum - b)) < 1e-12 and b <= prob * spectrum[0] + 1e-12:
            assert spectrum[0] == pytest.approx(b / detection_probability(p, mu, theta), abs=1e-11)
            checked += 1
    assert checked > 100


def test_theta_opt():
    assert theta_opt_closed_form(1) == pytest.approx(pi / 2)
    assert theta_opt_closed_form(0) == pytest.approx(pi)
    t = theta_opt_closed_form(0.4)
    assert t == pytest.approx(3 * pi / 4, abs=1e-14)
    assert tan(t) == pytest.approx(-1.5 * 0.4 / 0.6, abs=1e-12)
    for mu in np.linspace(0.05, 0.95, 10):
        t = theta_opt_closed_form(mu)
        # stationarity of beta in theta
        assert -2 * (1 - mu) * sin(t) - 3 * mu * cos(t) == pytest.approx(0, abs=1e-13)
        assert pi / 2 < t <= pi


def test_beta_opt_values():
    assert beta_opt_closed_form(0.25, 1) == pytest.approx(1 / 32, abs=1e-15)
    for mu in np.linspace(0, 1, 11):
        assert beta_opt_closed_form(0.7, mu) == pytest.approx(
            beta_closed_form(0.7, mu, theta_opt_closed_form(mu)), abs=1e-14)


def test_beta_opt_is_global_minimum_on_fine_grid():
    thetas = np.linspace(0, pi, 100_001)
    for p, mu in [(0.5, 0.8), (0.3, 0.1), (1.0, 0.5), (0.9, 0.0)]:
        vals = (3 + p - 4 * p * mu + 2 * p * (2 * (1 - mu) * np.cos(thetas) - 3 * mu * np.sin(thetas))) / 24
        assert beta_opt_closed_form(p, mu) == pytest.approx(vals.min(), abs=1e-9)
        assert beta_opt_closed_form(p, mu) <= vals.min() + 1e-15


# ------------------------------------------------------------ minimization

def test_minimize_family_anchor():
    for j in range(3):
        c = minimize_pt_eig(rho_p_mu(0.25, 1), j)
        assert c.beta_min == pytest.approx(1 / 16, abs=1e-9)
        assert c.arg_theta == pytest.approx(pi / 2, abs=1e-6)
        assert c.arg_phi == 0.0
        assert c.nonlocalizable


def test_minimize_ghz():
    for j in range(3):
        c = minimize_pt_eig(dm(ghz()), j)
        assert c.beta_min == pytest.approx(-0.5, abs=1e-10)
        assert c.arg_theta == pytest.approx(pi / 2, abs=1e-6)
        assert not c.nonlocalizable


def test_minimize_maximally_mixed():
    c = minimize_pt_eig(np.eye(8) / 8, 1)
    assert c.beta_min == pytest.approx(0.25, abs=1e-12)
    assert (c.arg_theta, c.arg_phi) == (0.0, 0.0)


def test_minimize_skips_annihilating_directions():
    c = minimize_pt_eig(dm(basis_ket("000")), 2)
    assert c.beta_min == pytest.approx(0.0, abs=1e-12)


def test_minimize_is_deterministic(rng):
    from conftest import random_density_matrix

    rho = random_density_matrix(rng, 3)
    assert minimize_pt_eig(rho, 0) == minimize_pt_eig(rho, 0)


def test_minimize_beats_random_directions(rng):
    from conftest import random_density_matrix

    rho = random_density_matrix(rng, 3, rank=2)
    c = minimize_pt_eig(rho, 1)
    blocks = measured_blocks(rho, 1)
    th = np.arccos(rng.uniform(-1, 1, 20_000))
    ph = rng.uniform(0, 2 * pi, 20_000)
    assert c.beta_min <= _objective(blocks, th, ph, True).min() + 1e-12


@pytest.mark.parametrize("p, mu", [(0.5, 0.8), (0.3, 0.2), (0.9, 0.05), (1.0, 0.5), (0.25, 1.0)])
def test_minimize_unnormalized_matches_beta_opt(p, mu):
    c = minimize_pt_eig(rho_p_mu(p, mu), 2, normalized=False)
    assert c.beta_min == pytest.approx(beta_opt_closed_form(p, mu), abs=1e-9)


def test_objective_phi_invariant_for_family():
    for p, mu in [(0.3, 0.4), (0.8, 1.0), (0.6, 0.0)]:
        blocks = measured_blocks(rho_p_mu(p, mu), 2)
        for theta in np.linspace(0, pi, 7):
            vals = _objective(blocks, np.full(36, theta), np.linspace(0, 2 * pi, 36, endpoint=False), True)
            assert np.ptp(vals) <= 1e-12


def test_certify_verdicts():
    certs = certify_nonlocalizable(rho_p_mu(0.25, 1))
    assert is_nonlocalizable(certs)
    assert [c.measured_qubit for c in certs] == [0, 1, 2]
    certs = certify_nonlocalizable(rho_p_mu(0.5, 1))
    assert not is_nonlocalizable(certs)
    assert any(c.beta_min < 0 for c in certs)
    assert is_nonlocalizable(certify_nonlocalizable(np.eye(8) / 8))
    with pytest.raises(ValueError):
        certify_nonlocalizable(np.eye(4) / 4)


def test_verdict_flips_at_one_third():
    for p in np.linspace(0, 1, 31):
        verdict = is_nonlocalizable(certify_nonlocalizable(rho_p(p)))
        assert verdict == (p <= 1 / 3 + 1e-9), p
