import numpy as np
import pytest

import phasekit as pk
from phasekit.corpus import CorpusSpec, NoiseFamily, PulseFamily, ToneFamily
from phasekit.errors import InputError


def test_determinism():
    spec = pk.quick_corpus_spec(seed=9, count=12)
    a = pk.gen_corpus(spec)
    b = pk.gen_corpus(spec)
    assert all(np.array_equal(x.samples, y.samples) for x, y in zip(a, b))


def test_seed_changes_output():
    a = pk.gen_corpus(pk.quick_corpus_spec(seed=1, count=6))
    b = pk.gen_corpus(pk.quick_corpus_spec(seed=2, count=6))
    assert not np.array_equal(a[0].samples, b[0].samples)


def test_count_and_zero_mean():
    spec = pk.quick_corpus_spec(seed=3, count=30)
    corpus = pk.gen_corpus(spec)
    assert len(corpus) == spec.count
    for u in corpus:
        # DC bin removed exactly, so the mean is roundoff-level
        assert abs(np.mean(u.samples)) <= 1e-12
        spec_u = np.fft.rfft(u.samples, axis=0)
        assert np.max(np.abs(spec_u[0])) <= 1e-9
        assert np.max(np.abs(spec_u[-1])) <= 1e-9


def test_band_limited_noise_spectrum():
    cutoff = 10.0
    spec = CorpusSpec(
        seed=4, length=4096, dt=1.0 / 512.0,
        families=(NoiseFamily(count=8, cutoff_lo=cutoff, cutoff_hi=cutoff),),
    )
    for u in pk.gen_corpus(spec):
        fft = np.fft.rfft(u.samples[:, 0])
        freqs = 2.0 * np.pi * np.fft.rfftfreq(u.nsamples, u.dt)
        above = np.sum(np.abs(fft[freqs > cutoff]) ** 2)
        total = np.sum(np.abs(fft) ** 2)
        assert above <= 1e-10 * total


def test_default_spec_counts():
    spec = pk.default_corpus_spec()
    assert spec.count == 200
    assert spec.length * spec.dt == pytest.approx(40.0)


def test_channels():
    corpus = pk.gen_corpus(pk.quick_corpus_spec(seed=5, count=4, channels=3))
    assert all(u.nchannels == 3 for u in corpus)


def test_invalid_specs():
    with pytest.raises(InputError):
        CorpusSpec(seed=0, length=5, dt=1e-3)  # odd length
    with pytest.raises(InputError):
        CorpusSpec(seed=0, length=64, dt=-1.0)
    with pytest.raises(InputError):
        CorpusSpec(seed=0, length=64, dt=1e-3, families=(ToneFamily(count=0),
                                                         NoiseFamily(count=0),
                                                         PulseFamily(count=0)))
