import math
import random

import numpy as np
import pytest

from crrt import quantum as qm


def test_prepare_psi_amplitudes():
    assert np.allclose(qm.prepare_psi(0, 0.75).amplitudes, [math.sqrt(3) / 2, 0.5])
    assert np.allclose(qm.prepare_psi(1, 0.75).amplitudes, [0.5, math.sqrt(3) / 2])
    assert np.allclose(qm.prepare_psi(0, 0.5).amplitudes, qm.prepare_psi(1, 0.5).amplitudes)
    with pytest.raises(qm.QuantumError):
        qm.prepare_psi(0, 1.2)


@pytest.mark.parametrize("p", [0.55, 0.75, 0.9])
def test_inner_product_is_sin_beta(p):
    ip = qm.prepare_psi(0, p).inner(qm.prepare_psi(1, p))
    assert abs(ip - 2 * math.sqrt(p * (1 - p))) < 1e-12


def test_psi_perp_is_orthogonal():
    for u in (0, 1):
        assert abs(qm.prepare_psi(u, 0.7).inner(qm.prepare_psi_perp(u, 0.7))) < 1e-12


def test_measure_eigenstates():
    r = random.Random(1)
    assert all(qm.measure(qm.basis_state(0), qm.COMPUTATIONAL, r)[0] == 0 for _ in range(100))
    for u in (0, 1):
        basis = qm.verification_basis(u, 0.75)
        assert all(qm.measure(qm.prepare_psi(u, 0.75), basis, r)[0] == 0 for _ in range(100))


def test_measure_plus_state_frequency():
    r = random.Random(2)
    plus = qm.PureState(np.array([1, 1], dtype=complex) / math.sqrt(2))
    zeros = sum(qm.measure(plus, qm.COMPUTATIONAL, r)[0] == 0 for _ in range(100_000))
    assert 0.495 <= zeros / 100_000 <= 0.505


def test_measure_rejects_bad_basis():
    with pytest.raises(qm.QuantumError):
        qm.measure(qm.basis_state(0), (qm.basis_state(0), qm.basis_state(0)), random.Random(0))


def test_post_measurement_states_have_unit_norm():
    r = random.Random(3)
    for _ in range(200):
        _, post = qm.measure(qm.prepare_psi(r.randrange(2), 0.8), qm.theta_basis(r.random() * math.pi), r)
        assert abs(np.linalg.norm(post.amplitudes) - 1) < 1e-12


def test_invalid_states_rejected():
    with pytest.raises(qm.QuantumError):
        qm.PureState(np.array([1, 1], dtype=complex))
    with pytest.raises(qm.QuantumError):
        qm.DensityMatrix(np.array([[0.5, 0.6], [0.6, 0.5]], dtype=complex))


# honest protocol -----------------------------------------------------------------------

def test_exact_law_on_50_points():
    for p in np.linspace(0.505, 0.93, 50):
        for t in (0, 1):
            assert abs(qm.protocol3_law(t, float(p)) - p) < 1e-12


def test_exact_law_near_classical():
    assert abs(qm.protocol3_law(1, 0.99) - 0.99) < 1e-12


def test_monte_carlo_law():
    r = random.Random(4)
    runs = [qm.run_protocol3(i % 2, 0.75, r) for i in range(100_000)]
    assert not any(o.halted for o in runs)
    freq = sum(o.r == i % 2 for i, o in enumerate(runs)) / len(runs)
    assert 0.745 <= freq <= 0.755


def test_simplified_laws():
    assert abs(qm.simplified_law(0, 0.75) - 0.75) < 1e-12
    assert abs(qm.simplified_law(1, 0.75) - 0.75) < 1e-12
    r = random.Random(5)
    for t in (0, 1):
        assert qm.simplified_law(t, 0.75, "send-zero") == 1.0
        assert all(qm.run_simplified(t, 0.75, r, "send-zero").r == t for _ in range(200))
    with pytest.raises(qm.QuantumError):
        qm.run_simplified(0, 0.75, r, "other")


# distinguishability ------------------------------------------------------------------------

def test_helstrom_pure_examples():
    assert qm.helstrom_pure(qm.basis_state(0), qm.basis_state(1)) == 1.0
    assert qm.helstrom_pure(qm.basis_state(0), qm.basis_state(0)) == 0.5
    p = 0.75
    assert abs(qm.helstrom_pure(qm.prepare_psi(0, p), qm.prepare_psi(1, p)) - (0.5 + (2 * p - 1) / 2)) < 1e-12


def test_helstrom_mixed_examples():
    zero, one = qm.basis_state(0).density(), qm.basis_state(1).density()
    assert qm.helstrom_mixed(zero, zero) == 0.5
    assert abs(qm.helstrom_mixed(zero, one) - 1) < 1e-12


def test_helstrom_mixed_matches_pure():
    g = np.random.default_rng(6)
    for _ in range(100):
        a, b = (g.normal(size=2) + 1j * g.normal(size=2) for _ in range(2))
        s0, s1 = qm.PureState(a / np.linalg.norm(a)), qm.PureState(b / np.linalg.norm(b))
        assert abs(qm.helstrom_mixed(s0.density(), s1.density()) - qm.helstrom_pure(s0, s1)) < 1e-12


# bounds ------------------------------------------------------------------------------------

def test_bounds_at_honest_alpha():
    for p in (0.6, 0.75, 0.9):
        b = qm.eval_bounds(p)
        assert abs(b.icheat1) < 1e-12 and abs(b.icheat2 - p) < 1e-12


def test_malres_and_sqrt2_values():
    b = qm.eval_bounds(0.75)
    assert abs(b.malres - (0.5 + math.sqrt(math.sqrt(0.75) - 0.75))) < 1e-15
    assert abs(b.malres - 0.8406) < 1e-4 and abs(b.simple - 0.8536) < 1e-4 and b.simple >= b.malres
    assert abs(qm.malres_bound(qm.MALRES_LIMIT) - 1) < 1e-12


def test_bound_domain_errors():
    with pytest.raises(qm.QuantumError):
        qm.eval_bounds(0.4)
    with pytest.raises(qm.QuantumError):
        qm.eval_bounds(0.75, alpha=0.5)


# cheating interviewer ------------------------------------------------------------------------

def test_interviewer_honest_and_classical_extremes():
    p = 0.75
    fail, guess = qm.simulate_cheating_interviewer(math.sqrt(p * (1 - p)), p)
    assert abs(fail) < 1e-12 and abs(guess - p) < 1e-12
    assert abs(qm.simulate_cheating_interviewer(0.0, p)[1] - 1) < 1e-12


def test_joint_state_overlap_is_two_alpha():
    for alpha in (0.1, 0.3, 0.45):
        ip = qm.purified_joint_state(alpha, 0).inner(qm.purified_joint_state(alpha, 1))
        assert abs(ip - 2 * alpha) < 1e-12
        rho = qm.reduced_respondent_state(qm.purified_joint_state(alpha, 0)).matrix
        assert np.allclose(rho, [[0.5, alpha], [alpha, 0.5]])


def _alpha_grid(p, points=100):
    h = math.sqrt(p * (1 - p))
    return [h * j / (points - 1) for j in range(points)]


def test_icheat2_on_alpha_grid():
    for alpha in _alpha_grid(0.75):
        _, guess = qm.simulate_cheating_interviewer(alpha, 0.75)
        assert guess <= qm.eval_bounds(0.75, alpha=alpha).icheat2 + 1e-9


def test_icheat1_on_alpha_grid():
    # the interviewer picks the pass-maximizing diagonal of its claimed state
    for alpha in _alpha_grid(0.75):
        fail, _ = qm.simulate_cheating_interviewer(alpha, 0.75)
        assert fail >= qm.eval_bounds(0.75, alpha=alpha).icheat1 - 1e-9, alpha


def test_icheat1_counterexample_value():
    # p = 3/4, alpha = 0.4: a' = 0.8 makes the claimed state pure and nearly passes
    a = qm.optimal_diagonal(0.4)
    assert abs(a - 0.8) < 1e-12
    fail, _ = qm.simulate_cheating_interviewer(0.4, 0.75)
    assert abs(fail - (1 - (math.sqrt(0.8 * 0.75) + math.sqrt(0.2 * 0.25)) ** 2)) < 1e-12
    assert fail < qm.eval_bounds(0.75, alpha=0.4).icheat1


def test_icheat1_holds_with_diagonal_p():
    for alpha in _alpha_grid(0.75):
        fail, _ = qm.simulate_cheating_interviewer(alpha, 0.75, a_prime=0.75)
        assert fail >= qm.eval_bounds(0.75, alpha=alpha).icheat1 - 1e-9


# cheating respondent --------------------------------------------------------------------------

def test_simplified_respondent_stays_in_band():
    for p in (0.55, 0.75, 0.9):
        for j in range(200):
            got = qm.simulate_cheating_respondent(math.pi * j / 200, p, "simplified")
            assert 1 - p - 1e-12 <= got <= p + 1e-12


def test_full_respondent_under_malres():
    best = max(qm.simulate_cheating_respondent(math.pi * j / 200, 0.75) for j in range(200))
    assert best <= qm.malres_bound(0.75) + 1e-9


def test_full_respondent_computational_basis_near_half():
    assert qm.simulate_cheating_respondent(0.0, 0.51) <= 0.5 + math.sqrt(2) * 0.01


def test_sweep_csv_columns():
    rows = qm.bound_sweep(0.75, points=5)
    text = qm.sweep_csv(rows)
    assert text.splitlines()[0] == ",".join(qm.SWEEP_COLUMNS)
    assert len(text.splitlines()) == len(rows) + 1
    assert {r["family"] for r in rows} == {"interviewer-detect", "interviewer-guess", "interviewer-advantage",
                                           "respondent-full", "respondent-simplified"}
