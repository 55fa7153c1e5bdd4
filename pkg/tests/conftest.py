import numpy as np
import pytest

import phasekit as pk


@pytest.fixture(scope="session")
def plant():
    return pk.benchmark_plant()


@pytest.fixture(scope="session")
def small_corpus():
    """Fast 1-channel corpus for property sweeps (T = 4096)."""
    return pk.gen_corpus(pk.quick_corpus_spec(seed=101, count=40))


@pytest.fixture(scope="session")
def small_corpus_2ch():
    return pk.gen_corpus(pk.quick_corpus_spec(seed=103, count=24, channels=2))


@pytest.fixture(scope="session")
def plant_report(plant):
    """Phase analysis of the bundled plant on the default grid."""
    return pk.lti_phase(plant)


def tone(freq_hz: float, T: int = 4096, dt: float = 1.0 / 512.0, phase: float = 0.0):
    t = np.arange(T) * dt
    return pk.RealSignal(np.cos(2.0 * np.pi * freq_hz * t + phase), dt)
