import numpy as np
import pytest
from hypothesis import given, strategies as st

from ewfsim import channels, ewf
from ewfsim.qstate import MeasurementBasis, partial_trace


def test_record_state_amplitudes():
    psi = channels.build_record_state(3, 0.4)
    assert psi.layout.names == ("S", "M0", "M1", "M2")
    assert psi.amplitude(["0"] * 4) == pytest.approx(1 / np.sqrt(2))
    assert psi.amplitude(["1"] * 4) == pytest.approx(np.exp(0.4j) / np.sqrt(2))
    assert len(psi.support()) == 2


def test_record_model_validation():
    with pytest.raises(ValueError):
        channels.RecordModel(0)
    with pytest.raises(ValueError):
        channels.RecordModel(2, lost_qubit_index=2)


def test_draw_alpha():
    rng = np.random.default_rng(0)
    assert channels.RecordModel(1, alpha=0.3).draw_alpha(rng) == 0.3
    a = channels.RecordModel(1, phase_random=True).draw_alpha(rng)
    assert 0 <= a < 2 * np.pi


@given(st.integers(1, 5), st.floats(0, 2 * np.pi), st.data())
def test_any_lost_register_qubit_dephases(n, alpha, data):
    pos = data.draw(st.integers(1, n))
    rho = channels.lose_qubit(channels.build_record_state(n, alpha), pos).entries
    d = rho.shape[0]
    assert abs(rho[0, d - 1]) < 1e-12
    assert rho[0, 0].real == pytest.approx(0.5) and rho[-1, -1].real == pytest.approx(0.5)


def test_losing_s_leaves_register_mixed():
    rho = channels.lose_qubit(channels.build_record_state(2, 1.0), 0)
    assert rho.layout.names == ("M0", "M1")
    assert rho.purity == pytest.approx(0.5)


def test_lose_qubit_bounds():
    psi = channels.build_record_state(1, 0.0)
    with pytest.raises(ValueError):
        channels.lose_qubit(psi, 2)


def test_phase_average_fixed_builder_is_pure():
    rho = channels.phase_average(lambda a: channels.build_record_state(2, 0.5), 50, 1)
    assert rho.purity == pytest.approx(1.0, abs=1e-12)


def test_phase_average_two_phases():
    sums = channels.phase_average(lambda ab, a: ewf.final_state(ab, a), 4000, 3, n_phases=2)
    exact = ewf.averaged_density(ewf.PhaseConfig("random", "random"))
    assert np.max(np.abs(sums.entries - exact)) < 0.05


def test_phase_average_deterministic():
    f = lambda a: channels.build_record_state(1, a)
    a = channels.phase_average(f, 100, 9, chunk=7).entries
    b = channels.phase_average(f, 100, 9).entries
    np.testing.assert_allclose(a, b, atol=1e-15)


def test_phase_average_layout_mismatch():
    f = lambda a: channels.build_record_state(1 if a < np.pi else 2, a)
    with pytest.raises(ValueError):
        channels.phase_average(f, 200, 0)


class TestDephasing:
    def setup_method(self):
        self.rho = channels.build_record_state(1, 0.0).to_density()
        self.z = MeasurementBasis.computational(self.rho.layout, "S")

    def test_decay(self):
        rho = channels.dephase_step(self.rho, self.z, gamma=2.0, dt=0.5)
        i0, i1 = rho.layout.index(["0", "0"]), rho.layout.index(["1", "1"])
        assert abs(rho.entries[i0, i1]) == pytest.approx(0.5 * np.exp(-1.0))
        assert rho.entries[i0, i0].real == pytest.approx(0.5)

    def test_composes_like_exponential(self):
        r = self.rho
        for _ in range(10):
            r = channels.dephase_step(r, self.z, 1.0, 0.1)
        once = channels.dephase_step(self.rho, self.z, 1.0, 1.0)
        np.testing.assert_allclose(r.entries, once.entries, atol=1e-14)

    def test_long_time_matches_partial_trace_route(self):
        r = channels.dephase_step(self.rho, self.z, 1.0, 60.0)
        lost = channels.lose_qubit(channels.build_record_state(2, 0.0), 2)
        np.testing.assert_allclose(r.entries, lost.entries, atol=1e-12)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            channels.dephase_step(self.rho, self.z, -1.0, 0.1)
        with pytest.raises(ValueError):
            channels.dephase_step(self.rho, self.z, 1.0, 0.0)

    @given(st.floats(0, 10), st.floats(1e-3, 10), st.floats(0, 2 * np.pi))
    def test_stays_valid_in_a_rotated_basis(self, gamma, dt, alpha):
        rho = channels.build_record_state(1, alpha).to_density()
        x = MeasurementBasis.build(rho.layout, ["S"], {"p": [[1, 1]], "m": [[1, -1]]})
        channels.dephase_step(rho, x, gamma, dt).check()


def test_erasure_possible():
    assert channels.erasure_possible(channels.RecordModel(3))
    assert not channels.erasure_possible(channels.RecordModel(3, lost_qubit_index=1))
    assert not channels.erasure_possible(channels.RecordModel(3, phase_random=True))


def test_partial_trace_of_record_keeps_order():
    psi = channels.build_record_state(2, 0.0)
    assert partial_trace(psi, ["M1", "S"]).layout.names == ("S", "M1")
