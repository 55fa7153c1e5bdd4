import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import phasekit as pk
from phasekit.errors import InputError
from phasekit.nrange import PhaseInterval, wrap_angle


def sample_angles(A, n=100_000, seed=0):
    """Dense-sampling oracle: angles of random normalized quadratic forms."""
    rng = np.random.default_rng(seed)
    dim = A.shape[0]
    X = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    X /= np.linalg.norm(X, axis=1)[:, None]
    z = np.einsum("ki,ij,kj->k", X.conj(), A, X)
    z = z[np.abs(z) > 1e-12 * np.linalg.norm(A)]
    return z


class TestPhaseInterval:
    def test_center_normalization(self):
        iv = PhaseInterval(3.0, 4.0)  # center 3.5 > pi: wraps down
        assert -math.pi < iv.center <= math.pi
        assert iv.spread == pytest.approx(1.0)

    def test_bad_order(self):
        with pytest.raises(InputError):
            PhaseInterval(1.0, 0.5)

    def test_spread_cap(self):
        with pytest.raises(InputError):
            PhaseInterval(0.0, 3.5)

    @given(st.floats(-10, 10), st.floats(0, 3.0))
    @settings(max_examples=50, deadline=None)
    def test_contains_center(self, lo, spread):
        if spread > math.pi:
            spread = math.pi
        iv = PhaseInterval(lo, lo + spread)
        assert iv.contains(iv.center)
        assert iv.contains(iv.lo + 2 * math.pi, tol=1e-12)

    def test_wrap_angle(self):
        assert wrap_angle(math.pi) == pytest.approx(math.pi)
        assert wrap_angle(-math.pi) == pytest.approx(math.pi)
        assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)


class TestBoundary:
    def test_identity(self):
        pts = pk.nrange_boundary(np.eye(3), 16)
        assert all(abs(z - 1.0) <= 1e-9 for z in pts)

    def test_normal_matrix_segment(self):
        pts = np.array(pk.nrange_boundary(np.diag([1.0, 1j]), 64))
        # range is the segment from 1 to j: check via the segment equation
        mid = (1.0 + 1j) / 2.0
        direction = (1j - 1.0) / abs(1j - 1.0)
        t = (pts - mid) / direction
        assert np.max(np.abs(t.imag)) <= 1e-9
        assert np.max(np.abs(t.real)) <= abs(1j - 1.0) / 2 + 1e-9

    def test_nilpotent_disk(self):
        A = np.array([[0.0, 1.0], [0.0, 0.0]])
        pts = np.array(pk.nrange_boundary(A, 128))
        assert np.max(np.abs(np.abs(pts) - 0.5)) <= 1e-9

    def test_direction_count_floor(self):
        with pytest.raises(InputError):
            pk.nrange_boundary(np.eye(2), 4)


class TestMatrixPhaseInterval:
    def test_identity(self):
        iv = pk.matrix_phase_interval(np.eye(2))
        assert iv.lo == pytest.approx(0.0, abs=1e-8)
        assert iv.hi == pytest.approx(0.0, abs=1e-8)

    def test_diag_quarter_turn(self):
        iv = pk.matrix_phase_interval(np.diag([1.0, 1j]))
        assert iv.lo == pytest.approx(0.0, abs=1e-6)
        assert iv.hi == pytest.approx(math.pi / 2, abs=1e-6)

    def test_nilpotent_indefinite(self):
        assert pk.matrix_phase_interval(np.array([[0.0, 1.0], [0.0, 0.0]])) is None

    def test_zero_matrix_rejected(self):
        with pytest.raises(InputError):
            pk.matrix_phase_interval(np.zeros((2, 2)))

    def test_rotation_equivariance(self):
        rng = np.random.default_rng(3)
        A = np.eye(3) * 2.0 + 0.5 * (rng.standard_normal((3, 3))
                                     + 1j * rng.standard_normal((3, 3)))
        base = pk.matrix_phase_interval(A)
        for theta in [0.3, -0.7, 1.2]:
            rotated = pk.matrix_phase_interval(np.exp(1j * theta) * A)
            assert wrap_angle(rotated.center - base.center - theta) == pytest.approx(0.0, abs=1e-6)
            assert rotated.spread == pytest.approx(base.spread, abs=1e-6)

    def test_positive_scaling_invariance(self):
        rng = np.random.default_rng(4)
        A = np.eye(2) * 3.0 + (rng.standard_normal((2, 2))
                               + 1j * rng.standard_normal((2, 2)))
        base = pk.matrix_phase_interval(A)
        for c in [1e-3, 7.0, 1e5]:
            scaled = pk.matrix_phase_interval(c * A)
            assert scaled.lo == pytest.approx(base.lo, abs=1e-9)
            assert scaled.hi == pytest.approx(base.hi, abs=1e-9)

    def test_oracle_containment(self):
        # seeded family conditioned so a 1e5-sample oracle resolves 0.5 deg
        rng = np.random.default_rng(42)
        for trial in range(30):
            G = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            lam = np.linalg.eigvalsh(0.5 * (G + G.conj().T))[0]
            shift = max(0.0, -lam) * 1.2 + 0.3 * np.linalg.norm(G)
            A = np.exp(1j * rng.uniform(-2, 2)) * (G + shift * np.eye(3))
            iv = pk.matrix_phase_interval(A)
            z = sample_angles(A, seed=trial)
            rel = np.angle(z * np.exp(-1j * iv.center))
            assert rel.min() >= iv.lo - iv.center - 1e-9
            assert rel.max() <= iv.hi - iv.center + 1e-9
            gap = max(abs(rel.min() - (iv.lo - iv.center)),
                      abs(rel.max() - (iv.hi - iv.center)))
            assert gap <= math.radians(0.5)


class TestCertify:
    def test_identity_sectorial(self):
        cert = pk.matrix_sector_certify(np.eye(2))
        assert cert.kind == "sectorial"
        assert cert.alpha == pytest.approx(0.0, abs=1e-6)
        assert cert.epsilon == pytest.approx(0.5, rel=1e-6)

    def test_rotated_identity(self):
        cert = pk.matrix_sector_certify(1j * np.eye(2))
        assert cert.kind == "sectorial"
        assert cert.alpha == pytest.approx(-math.pi / 2, abs=1e-6)
        assert cert.epsilon == pytest.approx(0.5, rel=1e-6)

    def test_nilpotent_indefinite(self):
        cert = pk.matrix_sector_certify(np.array([[0.0, 1.0], [0.0, 0.0]]))
        assert cert.kind == "indefinite"

    def test_segment_through_zero_semi(self):
        cert = pk.matrix_sector_certify(np.diag([1.0, -1.0]))
        assert cert.kind == "semi-sectorial"

    def test_certificate_inequality_holds(self):
        rng = np.random.default_rng(11)
        A = 2 * np.eye(3) + 0.7 * (rng.standard_normal((3, 3))
                                   + 1j * rng.standard_normal((3, 3)))
        cert = pk.matrix_sector_certify(A)
        assert cert.kind == "sectorial"
        rot = np.exp(1j * cert.alpha) * A
        M = 0.5 * (rot + rot.conj().T) - 2.0 * cert.epsilon * (A.conj().T @ A)
        assert np.linalg.eigvalsh(M)[0] >= -1e-8 * np.linalg.norm(A)
