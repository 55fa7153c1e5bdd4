import math

import numpy as np
import pytest

import phasekit as pk
from phasekit.errors import IndefiniteError, InputError, UnstableSystemError
from phasekit.phase import lti_phase_frequencywise

from conftest import tone


def scalar(num, den):
    return pk.TransferMatrix.scalar(num, den)


class TestSectorPhase:
    def test_reference_sector(self):
        sp = pk.sector_phase(pk.SectorBound(0.5, 1.5))
        assert sp.interval.hi == pytest.approx(math.pi / 6, abs=1e-12)
        assert sp.interval.lo == pytest.approx(-math.pi / 6, abs=1e-12)
        assert sp.disk_center == pytest.approx(1.0)
        assert sp.disk_radius == pytest.approx(0.5)

    def test_strict_ordering_required(self):
        with pytest.raises(InputError):
            pk.SectorBound(1.0, 1.0)

    def test_wide_sector(self):
        sp = pk.sector_phase(pk.SectorBound(1.0, 3.0))
        assert sp.interval.hi == pytest.approx(math.asin(0.5), abs=1e-12)


class TestQuantizer:
    def test_density_third(self):
        bound = pk.quantizer_sector(pk.QuantizerParams(1.0 / 3.0))
        assert bound.a == pytest.approx(0.5, abs=1e-15)
        assert bound.b == pytest.approx(1.5, abs=1e-15)

    def test_fine_limit(self):
        bound = pk.quantizer_sector(pk.QuantizerParams(0.999))
        phi = pk.sector_phase(bound).interval.hi
        assert phi <= 0.001
        assert phi == pytest.approx(math.asin(0.001 / 1.999), rel=1e-9)

    def test_half_density(self):
        bound = pk.quantizer_sector(pk.QuantizerParams(0.5))
        assert bound.a == pytest.approx(2.0 / 3.0)
        assert bound.b == pytest.approx(4.0 / 3.0)
        assert pk.sector_phase(bound).interval.hi == pytest.approx(math.asin(1.0 / 3.0))

    def test_range_check(self):
        with pytest.raises(InputError):
            pk.QuantizerParams(1.0)


class TestVspPhase:
    def test_benchmark_indices(self):
        iv = pk.vsp_phase(pk.PassivityIndices(2.0 / 3.0, 1.0 / 3.0))
        assert math.degrees(iv.hi) == pytest.approx(19.4712, abs=5e-5)

    def test_quarter_product_collapses(self):
        iv = pk.vsp_phase(pk.PassivityIndices(0.5, 0.5))
        assert iv.hi == pytest.approx(0.0, abs=1e-9)

    def test_reduces_to_sector_formula(self):
        for a, b in [(0.5, 1.5), (1.0, 3.0), (0.2, 7.0)]:
            idx = pk.PassivityIndices(a * b / (a + b), 1.0 / (a + b))
            direct = pk.sector_phase(pk.SectorBound(a, b)).interval
            via_vsp = pk.vsp_phase(idx)
            assert via_vsp.hi == pytest.approx(direct.hi, abs=1e-12)

    def test_domain_error(self):
        with pytest.raises(InputError):
            pk.PassivityIndices(1.0, 1.0)  # product > 1/4
        with pytest.raises(InputError):
            pk.PassivityIndices(-0.1, 0.5)


class TestLtiPhase:
    def test_static_identity(self):
        rep = pk.lti_phase(pk.TransferMatrix.constant(np.eye(2)))
        assert rep.verdict == "sectorial"
        assert rep.interval.lo == pytest.approx(0.0, abs=1e-8)
        assert rep.interval.hi == pytest.approx(0.0, abs=1e-8)

    def test_first_order_lag(self):
        rep = pk.lti_phase(scalar([1.0], [1.0, 1.0]))
        assert rep.verdict == "semi-sectorial"
        assert rep.interval.lo == pytest.approx(-math.pi / 2, abs=0.01)
        assert rep.interval.hi == pytest.approx(0.0, abs=1e-6)

    def test_benchmark_plant(self, plant_report):
        lo, hi = plant_report.interval.degrees
        assert lo == pytest.approx(-159.925, abs=0.2)
        assert hi == pytest.approx(19.1142, abs=0.2)
        assert plant_report.verdict == "semi-sectorial"

    def test_envelope_covers_per_frequency(self, plant_report):
        for w, iv in plant_report.per_frequency:
            if iv is None:
                continue
            assert plant_report.interval.contains_interval(iv, tol=1e-6)

    def test_scaling_invariance(self, plant, plant_report):
        rep = pk.lti_phase(plant.scaled(5.0))
        assert rep.interval.lo == pytest.approx(plant_report.interval.lo, abs=1e-6)
        assert rep.interval.hi == pytest.approx(plant_report.interval.hi, abs=1e-6)

    def test_unstable_rejected(self):
        with pytest.raises(UnstableSystemError):
            pk.lti_phase(scalar([1.0], [1.0, -1.0]))

    def test_passivity_bridge(self):
        # nonnegative symmetric index forces the sector into [-pi/2, pi/2]
        for P in [scalar([1.0], [1.0, 1.0]), scalar([1.0, 2.0], [1.0, 3.0])]:
            if pk.lti_passivity_index(P) >= 0.0:
                rep = pk.lti_phase(P)
                assert rep.interval.lo >= -math.pi / 2 - 1e-6
                assert rep.interval.hi <= math.pi / 2 + 1e-6


class TestFrequencywise:
    def test_double_lag_pointwise(self):
        fw = lti_phase_frequencywise(scalar([1.0], [1.0, 2.0, 1.0]))
        for w, iv in zip(fw.omegas, fw.intervals):
            if not np.isfinite(w):
                continue
            expected = -2.0 * math.atan(w)
            assert iv.center == pytest.approx(expected, abs=1e-6)
            assert iv.spread <= 1e-6
        # rotation centres each frequency: uniform bound ~ min gain on grid
        assert fw.delta == pytest.approx(1.0 / (1.0 + 1e8), rel=1e-3)

    def test_multiplier_samples(self):
        fw = lti_phase_frequencywise(scalar([1.0], [1.0, 2.0, 1.0]))
        k = np.searchsorted(fw.omegas, 1.0)
        w = fw.omegas[k]
        expected = np.exp(2j * math.atan(w))
        assert fw.multiplier.values[k] == pytest.approx(expected, abs=1e-6)

    def test_static_identity(self):
        fw = lti_phase_frequencywise(pk.TransferMatrix.constant(np.eye(2)))
        assert np.allclose(fw.multiplier.values, 1.0)
        assert fw.delta == pytest.approx(1.0, abs=1e-9)

    def test_indefinite_frequency_raises(self):
        # response crosses zero at w = 1: no sector at that node
        P = scalar([1.0, 0.0, 1.0], [1.0, 2.0, 2.0, 1.0])
        with pytest.raises(IndefiniteError):
            lti_phase_frequencywise(P, pk.FrequencyGrid(0.5, 2.0, 41))


class TestPassivityIndex:
    def test_identity(self):
        assert pk.lti_passivity_index(pk.TransferMatrix.constant(np.eye(2))) == \
            pytest.approx(0.5, abs=1e-9)

    def test_first_order_lag(self):
        # grid-edge bound: nu* = min over grid of Re P/(1+|P|^2) = 1/(2+wmax^2)
        nu = pk.lti_passivity_index(scalar([1.0], [1.0, 1.0]))
        assert nu == pytest.approx(1.0 / (2.0 + 1e8), rel=1e-3)

    def test_benchmark_value(self, plant):
        assert pk.lti_passivity_index(plant) == pytest.approx(-0.4526, abs=0.005)

    def test_certificate_holds(self, plant):
        nu = pk.lti_passivity_index(plant)
        w = pk.DEFAULT_GRID.with_zero()
        M = pk.freq_response(plant, w)
        He = 0.5 * (M + M.conj().swapaxes(-1, -2))
        G = np.eye(2)[None] + M.conj().swapaxes(-1, -2) @ M
        assert np.min(np.linalg.eigvalsh(He - nu * G)) >= -1e-8


class TestSupplyRate:
    def test_identity_alpha_zero(self, small_corpus):
        u = small_corpus[0]
        assert pk.supply_rate_check(u, u, 0.0) == pytest.approx(u.norm() ** 2, rel=1e-9)

    def test_identity_alpha_quarter(self, small_corpus):
        u = small_corpus[1]
        val = pk.supply_rate_check(u, u, math.pi / 2)
        assert abs(val) <= 1e-9 * u.norm() ** 2

    def test_lag_passive_on_corpus(self, small_corpus):
        ss = pk.realize(scalar([1.0], [1.0, 1.0]))
        op = pk.SystemOperator(ss)
        ys = op.batch(small_corpus[:12])
        for u, y in zip(small_corpus[:12], ys):
            assert pk.supply_rate_check(u, y, 0.0) >= -1e-9 * u.norm() * y.norm()

    def test_certified_rotation_nonnegative(self, small_corpus):
        # healthy-margin system: supply at the certificate rotation stays >= 0
        P = scalar([1.0], [1.0, 1.0])
        rep = pk.lti_phase(P)
        op = pk.SystemOperator(pk.realize(P))
        ys = op.batch(small_corpus[:12])
        for u, y in zip(small_corpus[:12], ys):
            assert pk.supply_rate_check(u, y, rep.alpha) >= -1e-9 * u.norm() * y.norm()


class TestReactiveRatio:
    def test_identity_zero(self, small_corpus):
        assert pk.reactive_ratio(small_corpus[0], small_corpus[0]) == \
            pytest.approx(0.0, abs=1e-12)

    def test_quadrature_excluded(self):
        u = tone(5.0)
        y = pk.hilbert(u)
        with pytest.raises(InputError):
            pk.reactive_ratio(u, y)

    def test_lag_tone_ratio(self):
        # narrowband tone at w = 1 through 1/(s+1): ratio ~ tan(-pi/4) = -1
        dt = 1e-2
        t = np.arange(2**13) * dt
        env = np.exp(-0.5 * ((t - 35.0) / 12.0) ** 2)
        u = pk.RealSignal(np.cos(1.0 * t) * env, dt)
        y = pk.simulate(pk.realize(scalar([1.0], [1.0, 1.0])), u)
        assert pk.reactive_ratio(u, y) == pytest.approx(-1.0, abs=0.02)
