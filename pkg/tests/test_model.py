"""Specs, validation and the three-segment sech envelope."""

import math

import pytest
from hypothesis import given, strategies as st

from qst.model import (ChannelSpec, PulseParams, QubitSpec, Scheme,
                       SystemSpec, TransferSchedule, mode_detunings,
                       pulse_envelope, schedule_couplings, transfer_spec,
                       validate_spec)


class TestPulseParams:
    def test_ramp_duration(self):
        p = PulseParams(g0=0.3, kappa=3.0, tau_d=0.5)
        assert p.tau == pytest.approx(2.0)
        assert p.t_cycle == pytest.approx(4.5)

    def test_half_amplitude_duration(self):
        p = PulseParams(g0=0.3, kappa=3.0, tau_d=0.5)
        assert p.t_half == pytest.approx(0.5 + 2.633915793849633 / 3.0)

    def test_envelope_segments(self):
        p = PulseParams(g0=0.3, kappa=2.0, tau_d=0.4)
        tau = p.tau
        # plateau
        assert pulse_envelope(p, tau) == pytest.approx(0.3)
        assert pulse_envelope(p, tau + 0.2) == pytest.approx(0.3)
        # ramp midpoint
        assert pulse_envelope(p, tau / 2) == pytest.approx(
            0.3 / math.cosh(2.0 * tau / 2))
        # outside support
        assert pulse_envelope(p, -0.01) == 0.0
        assert pulse_envelope(p, p.t_cycle + 0.01) == 0.0

    def test_envelope_start_value(self):
        # ramp start value g0*sech(6), the residual truncation step
        p = PulseParams(g0=0.3, kappa=2.0, tau_d=0.0)
        assert pulse_envelope(p, 0.0) == pytest.approx(
            0.0014872421680681136, rel=1e-12)

    def test_envelope_time_symmetry(self):
        p = PulseParams(g0=0.7, kappa=5.0, tau_d=0.3)
        for t in (0.1, 0.5, 1.0, 1.3):
            assert pulse_envelope(p, t) == pytest.approx(
                pulse_envelope(p, p.t_cycle - t), rel=1e-12)

    @given(st.floats(0.05, 20.0), st.floats(0.0, 3.0),
           st.floats(-1.0, 10.0))
    def test_envelope_bounded(self, kappa, tau_d, t):
        p = PulseParams(g0=1.0, kappa=kappa, tau_d=tau_d)
        assert 0.0 <= pulse_envelope(p, t) <= 1.0


class TestSchedule:
    def test_simultaneous_duration(self):
        s = TransferSchedule(PulseParams(g0=0.5, kappa=6.0, tau_d=0.25))
        assert s.t_end == pytest.approx(2.25)

    def test_delayed_mirror_duration_and_couplings(self):
        s = TransferSchedule(PulseParams(g0=0.5, kappa=6.0, tau_d=0.0),
                             scheme=Scheme.DELAYED_MIRROR, offset=0.5)
        assert s.t_end == pytest.approx(2.5)
        ga, gb = schedule_couplings(s, 1.0)
        assert ga == pytest.approx(pulse_envelope(s.pulse, 1.0))
        assert gb == pytest.approx(pulse_envelope(s.pulse, 0.5))

    def test_simultaneous_identical_couplings(self):
        s = TransferSchedule(PulseParams(g0=0.5, kappa=6.0, tau_d=0.25))
        for t in (0.0, 0.8, 2.0):
            ga, gb = schedule_couplings(s, t)
            assert ga == gb


class TestSpecs:
    def test_transfer_spec_defaults(self):
        spec = transfer_spec(0.5)
        assert spec.channel.n_modes == 51
        assert spec.channel.central_index == 25
        assert spec.parity_index == 25
        assert spec.qubit_a.g_max == 0.5
        assert spec.qubit_b.g_max == 0.5
        assert validate_spec(spec) == []

    def test_mode_detunings_centered(self):
        det = mode_detunings(ChannelSpec(n_modes=5))
        assert list(det) == [-2.0, -1.0, 0.0, 1.0, 2.0]

    def test_mode_detunings_with_disorder(self):
        ch = ChannelSpec(n_modes=3, disorder_offsets=(0.1, -0.2, 0.05))
        det = mode_detunings(ch)
        assert det == pytest.approx([-0.9, -0.2, 1.05])

    def test_validate_rejects_even_mode_count(self):
        spec = transfer_spec(0.5, n_modes=50)
        assert any("odd" in p for p in validate_spec(spec))

    def test_validate_rejects_negative_rates(self):
        spec = SystemSpec(channel=ChannelSpec(kappa_c=-0.1),
                          qubit_a=QubitSpec(g_max=0.5, gamma=-1.0),
                          qubit_b=QubitSpec(g_max=0.5))
        problems = validate_spec(spec)
        assert any("kappa_c" in p for p in problems)
        assert any("gamma" in p for p in problems)

    def test_validate_requires_anharmonicity_for_three_level(self):
        spec = transfer_spec(0.5, levels_a=3)
        assert any("anharmonicity" in p for p in validate_spec(spec))

    def test_validate_disorder_length(self):
        spec = transfer_spec(0.5, n_modes=5, disorder_offsets=(0.0, 0.1))
        assert any("disorder" in p for p in validate_spec(spec))

    def test_parity_origin_override(self):
        spec = SystemSpec(channel=ChannelSpec(n_modes=5),
                          qubit_a=QubitSpec(g_max=0.5),
                          qubit_b=QubitSpec(g_max=0.5),
                          parity_origin=0)
        assert spec.parity_index == 0
