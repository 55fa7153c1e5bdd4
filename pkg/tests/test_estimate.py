import math

import numpy as np
import pytest

import phasekit as pk
from phasekit.errors import InputError
from phasekit.estimate import read_samples_csv


def identity_op(u):
    return u


class TestEmpiricalNrange:
    def test_identity_samples(self, small_corpus):
        samples = pk.empirical_nrange(identity_op, small_corpus[:10])
        for s, u in zip(samples, small_corpus[:10]):
            assert s.z == pytest.approx(0.5 * u.norm() ** 2, rel=1e-9)
            assert not s.excluded
            assert s.angle == pytest.approx(0.0, abs=1e-9)

    def test_static_gain(self, small_corpus):
        samples = pk.empirical_nrange(lambda u: pk.RealSignal(2 * u.samples, u.dt),
                                      small_corpus[:6])
        for s, u in zip(samples, small_corpus[:6]):
            assert abs(s.z) == pytest.approx(u.norm() ** 2, rel=1e-9)
            assert s.angle == pytest.approx(0.0, abs=1e-9)

    def test_shape_change_rejected(self, small_corpus):
        def bad(u):
            return pk.RealSignal(u.samples[:-2], u.dt)

        with pytest.raises(InputError):
            pk.empirical_nrange(bad, small_corpus[:2])

    def test_batch_matches_map(self, small_corpus):
        ss = pk.realize(pk.TransferMatrix.scalar([1.0], [1.0, 1.0]))
        op = pk.SystemOperator(ss)
        batched = pk.empirical_nrange(op, small_corpus[:6])
        mapped = pk.empirical_nrange(lambda u: pk.simulate(ss, u), small_corpus[:6])
        for a, b in zip(batched, mapped):
            assert a.z == pytest.approx(b.z, rel=1e-12)

    def test_determinism_across_threads(self, small_corpus, monkeypatch):
        ss = pk.realize(pk.TransferMatrix.scalar([1.0], [1.0, 1.0]))
        ref = pk.empirical_nrange(lambda u: pk.simulate(ss, u), small_corpus[:6])
        monkeypatch.setenv("PHASEKIT_THREADS", "4")
        par = pk.empirical_nrange(lambda u: pk.simulate(ss, u), small_corpus[:6])
        assert [s.z for s in ref] == [s.z for s in par]


class TestEmpiricalPhase:
    def test_identity_interval(self, small_corpus):
        samples = pk.empirical_nrange(identity_op, small_corpus[:10])
        emp = pk.empirical_phase(samples)
        assert emp.interval.lo == pytest.approx(0.0, abs=1e-9)
        assert emp.interval.hi == pytest.approx(0.0, abs=1e-9)
        assert emp.n_used == 10

    def test_quantizer_containment(self, small_corpus):
        q = pk.sector_static(pk.quantizer_map(1.0 / 3.0))
        samples = pk.empirical_nrange(pk.SystemOperator(q), small_corpus)
        emp = pk.empirical_phase(samples)
        assert emp.interval.lo >= -math.pi / 6 - 1e-6
        assert emp.interval.hi <= math.pi / 6 + 1e-6

    def test_lag_interval_range(self):
        # tones at w = 0.05 and w = 20 push the sampled sector wide; the
        # envelope must be slow enough not to bury the 0.05 rad/s line
        dt, T = 2e-2, 2**14
        t = np.arange(T) * dt
        env = np.exp(-0.5 * ((t - 120.0) / 45.0) ** 2)
        corpus = [
            pk.RealSignal(np.cos(w * t) * env, dt) for w in [0.05, 0.3, 2.0, 20.0]
        ]
        ss = pk.realize(pk.TransferMatrix.scalar([1.0], [1.0, 1.0]))
        emp = pk.empirical_phase(pk.empirical_nrange(pk.SystemOperator(ss), corpus))
        assert emp.interval.lo >= -math.pi / 2 - 0.02
        assert emp.interval.hi <= 0.0 + 0.02
        assert emp.interval.hi >= -0.1
        assert emp.interval.lo <= -1.0

    def test_monotone_in_corpus_size(self, small_corpus):
        ss = pk.realize(pk.TransferMatrix.scalar([1.0], [1.0, 1.0]))
        samples = pk.empirical_nrange(pk.SystemOperator(ss), small_corpus)
        first = pk.empirical_phase(samples[:12])
        full = pk.empirical_phase(samples)
        assert full.interval.contains_interval(first.interval, tol=1e-12)

    def test_all_excluded(self):
        s = pk.PhaseSample(z=0.0, input_id=0, norm_u=1.0, norm_y=1.0, excluded=True)
        with pytest.raises(InputError):
            pk.empirical_phase([s])


class TestEmpiricalPassivity:
    def test_identity_margin(self, small_corpus):
        pairs = [(u, u) for u in small_corpus[:8]]
        res = pk.empirical_passivity(pairs, 0.5, 0.5)
        assert res.min_margin == pytest.approx(0.0, abs=1e-9)

    def test_candidate_violation_detected(self, small_corpus):
        pairs = [(u, u) for u in small_corpus[:8]]
        res = pk.empirical_passivity(pairs, 0.6, 0.5)  # 0.6 + 0.5 > 1
        assert res.min_margin < 0.0


class TestSamplesCsv:
    def test_round_trip(self, tmp_path, small_corpus):
        samples = pk.empirical_nrange(identity_op, small_corpus[:5])
        path = tmp_path / "samples.csv"
        pk.write_samples_csv(path, samples)
        back = read_samples_csv(path)
        assert len(back) == 5
        assert back[0].z == pytest.approx(samples[0].z)
        assert back[0].excluded == samples[0].excluded
