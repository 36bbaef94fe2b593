import numpy as np
import pytest
from hypothesis import given, strategies as st

from ewfsim import ewf
from ewfsim.qstate import InvariantViolation, StateVector, born_distribution, overlap, unitarity_error

L = ewf.EWF_LAYOUT
R3 = 1 / np.sqrt(3)


def ket(*labels):
    return StateVector.basis(L, labels).amplitudes


def hand_psi5(ab, a):
    """Step-5 state written out term by term."""
    return R3 * (
        np.exp(1j * a) * ket("Hmem", "h", "Dn", "dn")
        + np.exp(1j * (ab + a)) * ket("Tmem", "t", "Dn", "dn")
        + np.exp(1j * ab) * ket("Tmem", "t", "Up", "up")
    )


def test_layout():
    assert L.names == ("Fbar", "Sbar", "F", "S")
    assert L.dim == 72


def test_initial_state():
    psi = ewf.step1_prepare()
    assert psi.amplitude(["i", "h", "i", "dn'"]) == pytest.approx(np.sqrt(1 / 3))
    assert psi.amplitude(["i", "t", "i", "dn'"]) == pytest.approx(np.sqrt(2 / 3))
    assert len(psi.support()) == 2


def test_intermediate_states():
    ab, a = 0.7, -1.3
    s = ewf.run_steps(ab, a)
    e = np.exp(1j * ab)
    expected2 = np.sqrt(1 / 3) * ket("Hmem", "h", "i", "dn'") + np.sqrt(2 / 3) * e * ket("Tmem", "t", "i", "dn'")
    np.testing.assert_allclose(s[1].amplitudes, expected2, atol=1e-14)
    expected3 = np.sqrt(1 / 3) * (ket("Hmem", "h", "i", "dn'") + e * ket("Tmem", "t", "i", "dn'")
                                  + e * ket("Tmem", "t", "i", "up'"))
    np.testing.assert_allclose(s[2].amplitudes, expected3, atol=1e-14)
    expected4 = np.sqrt(1 / 3) * (ket("Hmem", "h", "i", "dn") + e * ket("Tmem", "t", "i", "dn")
                                  + e * ket("Tmem", "t", "i", "up"))
    np.testing.assert_allclose(s[3].amplitudes, expected4, atol=1e-14)


@given(st.floats(-7, 7), st.floats(-7, 7))
def test_final_state_matches_hand_expansion(ab, a):
    np.testing.assert_allclose(ewf.run_steps(ab, a)[-1].amplitudes, hand_psi5(ab, a), atol=1e-13)


def test_superobserver_decomposition():
    # psi_5 in the |+-'>|+-> product basis, coefficients worked out by hand
    e = np.eye(6)
    f = np.eye(12)
    bar = {"Hh": e[ewf._BAR.index(["Hmem", "h"])], "Tt": e[ewf._BAR.index(["Tmem", "t"])]}
    lab = {"Uu": f[ewf._FS.index(["Up", "up"])], "Dd": f[ewf._FS.index(["Dn", "dn"])]}
    bar_pm = {"plus": (bar["Hh"] + bar["Tt"]) / np.sqrt(2), "minus": (bar["Hh"] - bar["Tt"]) / np.sqrt(2)}
    lab_pm = {"plus": (lab["Uu"] + lab["Dd"]) / np.sqrt(2), "minus": (lab["Uu"] - lab["Dd"]) / np.sqrt(2)}
    c = {("plus", "plus"): np.sqrt(3) / 2}
    for k in (("plus", "minus"), ("minus", "plus"), ("minus", "minus")):
        c[k] = -1 / (2 * np.sqrt(3))
    rebuilt = sum(v * np.kron(bar_pm[x], lab_pm[y]) for (x, y), v in c.items())
    np.testing.assert_allclose(ewf.psi5().amplitudes, rebuilt, atol=1e-14)
    assert sum(abs(v) ** 2 for v in c.values()) == pytest.approx(1.0)


def test_exact_joint():
    j = ewf.exact_joint()
    assert j[("plus", "plus")] == pytest.approx(3 / 4, abs=1e-14)
    assert j[("minus", "minus")] == pytest.approx(1 / 12, abs=1e-14)
    assert j.get(("other", "other"), 0.0) == pytest.approx(0.0, abs=1e-14)
    assert sum(j.values()) == pytest.approx(1.0, abs=1e-14)


def test_w_marginal():
    w = dict(born_distribution(ewf.psi5(), ewf.w_basis()))
    assert w["plus"] == pytest.approx(5 / 6, abs=1e-14)
    assert w["minus"] == pytest.approx(1 / 6, abs=1e-14)


@pytest.mark.parametrize("op", [ewf.coin_interaction(0.4), ewf.spin_preparation(), ewf.spin_move(),
                                ewf.spin_interaction(2.0)], ids=lambda o: o.name)
def test_step_operators_unitary(op):
    assert unitarity_error(op.matrix) < 1e-13


def test_phase_does_not_change_populations():
    for ab, a in [(0, 0), (1, 2), (np.pi, np.pi / 3)]:
        assert np.allclose(abs(ewf.final_state(ab, a).amplitudes), abs(ewf.psi5().amplitudes))


def test_overlap_matches_closed_form_off_grid():
    rng = np.random.default_rng(1)
    for ab, a in rng.uniform(-10, 10, size=(50, 2)):
        sim = overlap(ewf.psi5(), ewf.final_state(ab, a))
        assert abs(sim - ewf.overlap_closed_form(ab, a)) < 1e-12


def test_confirm_zero_line():
    # |1 + x + y| = 0 with x, y on the unit circle only at the cube roots of unity
    assert ewf.confirm_probability(4 * np.pi / 3, 2 * np.pi / 3) < 1e-12
    assert ewf.confirm_probability(2 * np.pi / 3, 2 * np.pi / 3) > 0.1


class TestPhaseConfig:
    def test_rejects_unknown_string(self):
        with pytest.raises(ValueError):
            ewf.PhaseConfig("pi", 0.0)

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            ewf.PhaseConfig(float("nan"), 0.0)

    def test_draw_fixed(self):
        assert ewf.PhaseConfig(0.1, 0.2).draw(0.9, 0.9) == (0.1, 0.2)

    def test_draw_random(self):
        ab, a = ewf.PhaseConfig("random", "random").draw(0.25, 0.5)
        assert ab == pytest.approx(np.pi / 2) and a == pytest.approx(np.pi)

    def test_correlated(self):
        ab, a = ewf.PhaseConfig("random", "random", correlated=True).draw(0.25, 0.5)
        assert ab == a


class TestSampling:
    def test_run_protocol_deterministic(self):
        p = ewf.PhaseConfig()
        a, b = ewf.run_protocol(p, 3), ewf.run_protocol(p, 3)
        assert (a.wbar_outcome, a.w_outcome) == (b.wbar_outcome, b.w_outcome)
        np.testing.assert_array_equal(a.final_state.amplitudes, b.final_state.amplitudes)

    def test_trial_k_is_independent_of_total(self):
        p = ewf.PhaseConfig("random", "random")
        short = ewf.run_trials(p, 5, 42)
        long = ewf.run_trials(p, 50, 42)
        assert [r.phases_used for r in short] == [r.phases_used for r in long[:5]]

    def test_outcomes_never_other(self):
        for r in ewf.run_trials(ewf.PhaseConfig("random", 0.3), 300, 7):
            assert r.wbar_outcome in ("plus", "minus") and r.w_outcome in ("plus", "minus")

    def test_post_measurement_state_is_product_eigenstate(self):
        r = ewf.run_protocol(ewf.PhaseConfig(), 0)
        joint = ewf.joint_distribution(r.final_state, ewf.wbar_basis(), ewf.w_basis())
        assert joint[(r.wbar_outcome, r.w_outcome)] == pytest.approx(1.0, abs=1e-12)

    def test_empirical_marginal(self):
        res = ewf.run_trials(ewf.PhaseConfig(), 6000, 1)
        freq = sum(r.wbar_outcome == "minus" for r in res) / len(res)
        assert abs(freq - 1 / 6) < 5 * np.sqrt((1 / 6) * (5 / 6) / 6000)


class TestKastner:
    def test_confirms_at_zero_phases(self):
        for seed in range(5):
            assert ewf.kastner_extension(ewf.PhaseConfig(), seed) == (1, pytest.approx(1.0))

    def test_never_confirms_at_zero_of_overlap(self):
        p = ewf.PhaseConfig(2 * np.pi / 3, 4 * np.pi / 3)
        for seed in range(5):
            c, prob = ewf.kastner_extension(p, seed)
            assert c == 0 and prob < 1e-12

    def test_confirm_rate(self):
        p = ewf.PhaseConfig(np.pi, 0.0)
        hits = sum(ewf.kastner_extension(p, s)[0] for s in range(900))
        assert abs(hits / 900 - 1 / 9) < 5 * np.sqrt((1 / 9) * (8 / 9) / 900)


class TestAveraged:
    def test_grid_points_agree(self):
        p = ewf.PhaseConfig("random", "random")
        np.testing.assert_allclose(ewf.averaged_density(p, 3), ewf.averaged_density(p, 7), atol=1e-13)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            ewf.averaged_density(ewf.PhaseConfig("random", 0.0), 2)

    def test_one_random_phase(self):
        # only alpha random: the two Dn branches stay coherent with each other
        j = ewf.exact_joint_averaged(ewf.PhaseConfig(0.0, "random"))
        assert sum(j.values()) == pytest.approx(1.0, abs=1e-12)
        assert j[("minus", "minus")] == pytest.approx(1 / 12, abs=1e-12)
        assert j[("minus", "plus")] == pytest.approx(1 / 12, abs=1e-12)

    def test_correlated_random(self):
        j = ewf.exact_joint_averaged(ewf.PhaseConfig("random", "random", True))
        assert sum(j.values()) == pytest.approx(1.0, abs=1e-12)

    def test_fixed_falls_back(self):
        assert ewf.exact_joint_averaged(ewf.PhaseConfig()) == ewf.exact_joint()


def test_bad_norm_detected(monkeypatch):
    bad = StateVector(L, 2 * ewf.step1_prepare().amplitudes)
    monkeypatch.setattr(ewf, "step1_prepare", lambda: bad)
    with pytest.raises(InvariantViolation):
        ewf.run_steps()
