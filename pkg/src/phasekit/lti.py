"""Rational transfer matrices, frequency responses and realizations.

Coefficient lists are highest degree first, matching hand-written
polynomial notation.  Only proper, square systems are represented; poles
are located with companion-matrix root finding and stability uses a
1e-9 real-part margin.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import InputError, UnstableSystemError

__all__ = [
    "Rational",
    "TransferMatrix",
    "StateSpace",
    "FrequencyGrid",
    "DEFAULT_GRID",
    "is_hurwitz",
    "freq_response",
    "hinf_norm",
    "nyquist_curve",
    "realize",
    "read_system",
    "write_system",
    "benchmark_plant",
]

HURWITZ_MARGIN = 1e-9


def _trim(coeffs) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(coeffs, dtype=np.float64))
    if arr.ndim != 1 or arr.size == 0:
        raise InputError("coefficient list must be a nonempty 1-D sequence")
    if not np.all(np.isfinite(arr)):
        raise InputError("coefficients must be finite")
    nz = np.nonzero(arr)[0]
    if nz.size == 0:
        return np.zeros(1)
    return arr[nz[0] :]


@dataclass(frozen=True)
class Rational:
    """Proper scalar rational function num(s)/den(s), coefficients
    highest degree first."""

    num: np.ndarray
    den: np.ndarray

    def __post_init__(self):
        num = _trim(self.num)
        den = _trim(self.den)
        if den.size == 1 and den[0] == 0.0:
            raise InputError("denominator is identically zero")
        if num.size > den.size and np.any(num != 0.0):
            raise InputError("improper rational entry (deg num > deg den)")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        self.num.setflags(write=False)
        self.den.setflags(write=False)

    @property
    def degree(self) -> int:
        return self.den.size - 1

    @property
    def is_static(self) -> bool:
        return self.degree == 0

    @property
    def is_strictly_proper(self) -> bool:
        return self.num.size < self.den.size or not np.any(self.num)

    def feedthrough(self) -> float:
        """High-frequency limit: leading-coefficient ratio when degrees
        match, else 0."""
        if self.num.size == self.den.size:
            return float(self.num[0] / self.den[0])
        return 0.0

    def poles(self) -> np.ndarray:
        if self.degree == 0:
            return np.array([], dtype=np.complex128)
        return np.roots(self.den)

    def __call__(self, s):
        s = np.asarray(s, dtype=np.complex128)
        den = np.polyval(self.den, s)
        if np.any(np.abs(den) == 0.0):
            raise InputError("evaluation at a pole of the transfer function")
        return np.polyval(self.num, s) / den

    def scaled(self, c: float) -> "Rational":
        return Rational(self.num * float(c), self.den)


@dataclass(frozen=True)
class TransferMatrix:
    """Square grid of proper rational entries."""

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.entries)
        if len(rows) == 0 or any(len(r) != len(rows) for r in rows):
            raise InputError("transfer matrix must be square")
        for row in rows:
            for e in row:
                if not isinstance(e, Rational):
                    raise InputError("entries must be Rational")
        object.__setattr__(self, "entries", rows)

    @property
    def shape(self) -> int:
        return len(self.entries)

    @property
    def is_strictly_proper(self) -> bool:
        return all(e.is_strictly_proper for row in self.entries for e in row)

    def feedthrough_matrix(self) -> np.ndarray:
        n = self.shape
        return np.array(
            [[self.entries[i][j].feedthrough() for j in range(n)] for i in range(n)]
        )

    def scaled(self, c: float) -> "TransferMatrix":
        return TransferMatrix(
            tuple(tuple(e.scaled(c) for e in row) for row in self.entries)
        )

    @staticmethod
    def scalar(num, den) -> "TransferMatrix":
        return TransferMatrix(((Rational(num, den),),))

    @staticmethod
    def constant(K) -> "TransferMatrix":
        K = np.atleast_2d(np.asarray(K, dtype=np.float64))
        return TransferMatrix(
            tuple(tuple(Rational([k], [1.0]) for k in row) for row in K)
        )


@dataclass(frozen=True)
class StateSpace:
    """Realization dx/dt = A x + B u, y = C x + D u (square D)."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=np.float64))
        D = np.atleast_2d(np.asarray(self.D, dtype=np.float64))
        if A.size == 0:
            A = A.reshape(0, 0)
        n = D.shape[0]
        B = np.asarray(self.B, dtype=np.float64).reshape(A.shape[0], n if A.shape[0] else n)
        C = np.asarray(self.C, dtype=np.float64).reshape(n, A.shape[0])
        if A.shape[0] != A.shape[1]:
            raise InputError("A must be square")
        if D.shape[0] != D.shape[1]:
            raise InputError("D must be square (square systems only)")
        if B.shape != (A.shape[0], n) or C.shape != (n, A.shape[0]):
            raise InputError("inconsistent state-space dimensions")
        for name, M in (("A", A), ("B", B), ("C", C), ("D", D)):
            if not np.all(np.isfinite(M)):
                raise InputError(f"{name} must be finite")
            M.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)

    @property
    def nstates(self) -> int:
        return self.A.shape[0]

    @property
    def shape(self) -> int:
        return self.D.shape[0]

    @property
    def is_strictly_proper(self) -> bool:
        return not np.any(self.D)

    def is_hurwitz(self) -> bool:
        if self.nstates == 0:
            return True
        return bool(np.max(np.linalg.eigvals(self.A).real) < -HURWITZ_MARGIN)

    def freq_response(self, w) -> np.ndarray:
        w = np.atleast_1d(np.asarray(w, dtype=np.float64))
        n, m = self.shape, self.nstates
        out = np.empty((w.size, n, n), dtype=np.complex128)
        for k, wk in enumerate(w):
            if m:
                out[k] = self.C @ np.linalg.solve(
                    1j * wk * np.eye(m) - self.A, self.B
                ) + self.D
            else:
                out[k] = self.D
        return out if w.size > 1 else out[0]


@dataclass(frozen=True)
class FrequencyGrid:
    """Logarithmic angular-frequency grid in rad/s."""

    wmin: float = 1e-3
    wmax: float = 1e4
    points: int = 2000

    def __post_init__(self):
        if not (0 < self.wmin < self.wmax) or self.points < 2:
            raise InputError("grid needs 0 < wmin < wmax and >= 2 points")

    def omegas(self) -> np.ndarray:
        return np.geomspace(self.wmin, self.wmax, self.points)

    def with_zero(self) -> np.ndarray:
        """Positive half-axis grid including omega = 0."""
        return np.concatenate([[0.0], self.omegas()])

    def signed(self) -> np.ndarray:
        """Symmetric signed grid -wmax..wmax including omega = 0."""
        pos = self.omegas()
        return np.concatenate([-pos[::-1], [0.0], pos])


DEFAULT_GRID = FrequencyGrid()


def is_hurwitz(P: TransferMatrix) -> tuple[bool, complex | None]:
    """True iff every entry's poles have real part < -1e-9.

    Returns the verdict with an offending pole as witness when false.
    """
    worst = None
    for row in P.entries:
        for e in row:
            for p in e.poles():
                if p.real >= -HURWITZ_MARGIN:
                    if worst is None or p.real > worst.real:
                        worst = complex(p)
    return (worst is None), worst


def require_stable(P: TransferMatrix | StateSpace, what: str = "system") -> None:
    if isinstance(P, StateSpace):
        if P.nstates and np.max(np.linalg.eigvals(P.A).real) >= -HURWITZ_MARGIN:
            eigs = np.linalg.eigvals(P.A)
            witness = complex(eigs[np.argmax(eigs.real)])
            raise UnstableSystemError(
                f"{what} must be stable; offending eigenvalue {witness}", witness
            )
        return
    ok, witness = is_hurwitz(P)
    if not ok:
        raise UnstableSystemError(
            f"{what} must be stable; offending pole {witness}", witness
        )


def limit_matrix(P: TransferMatrix | StateSpace) -> np.ndarray:
    """High-frequency limit (feedthrough) matrix of a proper system."""
    if isinstance(P, StateSpace):
        return np.array(P.D)
    return P.feedthrough_matrix()


def freq_response(P: TransferMatrix | StateSpace, w) -> np.ndarray:
    """Evaluate the frequency response at omega (scalar or array), rad/s.

    Returns an (n, n) complex matrix, or (W, n, n) for array input.
    Satisfies conjugate symmetry P(-jw) = conj(P(jw)).
    """
    if isinstance(P, StateSpace):
        return P.freq_response(w)
    w_arr = np.atleast_1d(np.asarray(w, dtype=np.float64))
    n = P.shape
    out = np.empty((w_arr.size, n, n), dtype=np.complex128)
    s = 1j * w_arr
    for i in range(n):
        for j in range(n):
            out[:, i, j] = P.entries[i][j](s)
    return out if np.ndim(w) else out[0]


def _sigma_max(mats: np.ndarray) -> np.ndarray:
    return np.linalg.svd(mats, compute_uv=False)[..., 0]


def hinf_norm(
    P: TransferMatrix, grid: FrequencyGrid = DEFAULT_GRID
) -> tuple[float, float]:
    """Peak singular value over frequency and the frequency attaining it.

    Sweeps the grid (plus omega = 0 and the high-frequency limit) and
    refines around the argmax by golden-section search; relative accuracy
    target 1e-3.

    Returns
    -------
    (norm, w_peak) : tuple of float
        ``w_peak`` is ``inf`` when the peak sits at the feedthrough limit.
    """
    require_stable(P)
    w = grid.with_zero()
    gains = _sigma_max(freq_response(P, w))
    k = int(np.argmax(gains))
    best, w_best = float(gains[k]), float(w[k])

    lim = float(np.linalg.svd(P.feedthrough_matrix(), compute_uv=False)[0]) \
        if P.shape else 0.0
    if lim > best:
        best, w_best = lim, math.inf

    if math.isfinite(w_best) and 0 < k < len(w) - 1:
        # golden-section maximization on the bracketing grid interval
        lo = w[k - 1] if w[k - 1] > 0 else w[k] * 0.5
        hi = w[k + 1]
        invphi = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = math.log(lo), math.log(hi)
        c, d = b - invphi * (b - a), a + invphi * (b - a)
        fc = float(_sigma_max(freq_response(P, math.exp(c))))
        fd = float(_sigma_max(freq_response(P, math.exp(d))))
        for _ in range(60):
            if fc >= fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = float(_sigma_max(freq_response(P, math.exp(c))))
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = float(_sigma_max(freq_response(P, math.exp(d))))
        w_ref = math.exp((a + b) / 2.0)
        g_ref = float(_sigma_max(freq_response(P, w_ref)))
        if g_ref > best:
            best, w_best = g_ref, w_ref
    return best, w_best


def nyquist_curve(
    R: Rational | TransferMatrix, grid: FrequencyGrid = DEFAULT_GRID
) -> list[tuple[float, complex]]:
    """Sampled response of a stable scalar system over the signed grid.

    Includes omega = 0 and the high-frequency limit points at +-inf (the
    leading-coefficient ratio when degrees match, else 0).
    """
    if isinstance(R, TransferMatrix):
        if R.shape != 1:
            raise InputError("nyquist_curve expects a scalar system")
        R = R.entries[0][0]
    require_stable(TransferMatrix(((R,),)))
    w = grid.signed()
    z = R(1j * w)
    lim = R.feedthrough()
    pts = [(-math.inf, complex(np.conj(lim)))]
    pts += [(float(wk), complex(zk)) for wk, zk in zip(w, z)]
    pts.append((math.inf, complex(lim)))
    return pts


def _ccf(entry: Rational) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Controllable-canonical realization of one entry (monic denominator)."""
    den = entry.den / entry.den[0]
    num = entry.num / entry.den[0]
    m = den.size - 1
    if m == 0:
        return np.zeros((0, 0)), np.zeros((0, 1)), np.zeros((1, 0)), float(num[-1])
    if num.size == den.size:
        d, rem = num[0], num[1:] - num[0] * den[1:]
    else:
        d, rem = 0.0, np.concatenate([np.zeros(m - num.size), num])
    A = np.zeros((m, m))
    A[:-1, 1:] = np.eye(m - 1)
    A[-1] = -den[1:][::-1]
    B = np.zeros((m, 1))
    B[-1, 0] = 1.0
    C = rem[::-1].reshape(1, m)
    return A, B, C, float(d)


def realize(P: TransferMatrix) -> StateSpace:
    """Block-diagonal aggregation of per-entry controllable canonical forms.

    The realization reproduces ``freq_response(P)`` to 1e-8 relative
    accuracy on the default grid (verified in tests); minimality is not
    attempted.
    """
    n = P.shape
    blocks, Bs, Cs = [], [], []
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            Ae, Be, Ce, d = _ccf(P.entries[i][j])
            D[i, j] += d
            if Ae.shape[0]:
                blocks.append(Ae)
                Bcol = np.zeros((Ae.shape[0], n))
                Bcol[:, j] = Be[:, 0]
                Bs.append(Bcol)
                Crow = np.zeros((n, Ae.shape[0]))
                Crow[i] = Ce[0]
                Cs.append(Crow)
    if blocks:
        m = sum(b.shape[0] for b in blocks)
        A = np.zeros((m, m))
        k = 0
        for b in blocks:
            A[k : k + b.shape[0], k : k + b.shape[0]] = b
            k += b.shape[0]
        B = np.vstack(Bs)
        C = np.hstack(Cs)
    else:
        A = np.zeros((0, 0))
        B = np.zeros((0, n))
        C = np.zeros((n, 0))
    return StateSpace(A, B, C, D)


# -- system files -----------------------------------------------------------

def system_to_dict(sys_obj: TransferMatrix | StateSpace) -> dict:
    if isinstance(sys_obj, TransferMatrix):
        return {
            "kind": "tf",
            "entries": [
                [{"num": list(map(float, e.num)), "den": list(map(float, e.den))}
                 for e in row]
                for row in sys_obj.entries
            ],
        }
    return {
        "kind": "ss",
        "A": sys_obj.A.tolist(),
        "B": sys_obj.B.tolist(),
        "C": sys_obj.C.tolist(),
        "D": sys_obj.D.tolist(),
    }


def system_from_dict(doc: dict):
    kind = doc.get("kind")
    if kind == "tf":
        try:
            entries = tuple(
                tuple(Rational(e["num"], e["den"]) for e in row)
                for row in doc["entries"]
            )
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed tf system file: {exc}") from exc
        return TransferMatrix(entries)
    if kind == "ss":
        try:
            return StateSpace(doc["A"], doc["B"], doc["C"], doc["D"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed ss system file: {exc}") from exc
    if kind == "nl":
        # resolved by the simulation layer (builtin nonlinear systems)
        from . import sim

        return sim.system_from_dict(doc)
    raise InputError(f"unknown system kind {kind!r}")


def read_system(path):
    """Load a system file ({"kind": "tf"|"ss"|"nl", ...})."""
    if not os.path.exists(path):
        raise InputError(f"system file not found: {path}")
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from exc
    return system_from_dict(doc)


def write_system(path, sys_obj) -> None:
    with open(path, "w") as fh:
        json.dump(system_to_dict(sys_obj), fh, indent=2)
        fh.write("\n")


def benchmark_plant() -> TransferMatrix:
    """The bundled 2x2 lightly damped benchmark plant."""
    with resources.files("phasekit.data").joinpath("benchmark_plant.json").open() as fh:
        return system_from_dict(json.load(fh))
