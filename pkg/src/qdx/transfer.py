"""Transfer matrices Phi(n, z) of the difference equation

    u(n+1) + u(n-1) + V(n) u(n) = z u(n)

at real or complex energies, their windowed norm maxima, and the Fibonacci
matrices M_k.

Products are kept as ``entries * 2**scale_exponent`` with entries rescaled
by 2**-256 whenever one exceeds 2**256, so nothing overflows.  Norms are
spectral norms, computed in closed form for 2x2 matrices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFit
from .lattice import potential_array

_RESCALE_AT = 2.0 ** 256
_RESCALE_BITS = 256
_LN2 = math.log(2.0)

# window_max_norm returns inf once the binary scale exceeds this
DEFAULT_SCALE_CAP = 10 ** 9


def _norm_sq(a, b, c, d):
    """Largest singular value squared of [[a, b], [c, d]] (scalars or arrays)."""
    s = abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2 + abs(d) ** 2
    det = abs(a * d - b * c)
    lo = s - 2 * det
    if isinstance(lo, np.ndarray):
        lo = np.maximum(lo, 0.0)
    else:
        lo = max(lo, 0.0)
    # product of roots: (s - 2 det)(s + 2 det) itself can overflow
    return 0.5 * (s + lo ** 0.5 * (s + 2 * det) ** 0.5)


@dataclass(frozen=True)
class TransferMatrix:
    """2x2 complex matrix ``[[a, b], [c, d]] * 2**scale_exponent``."""

    a: complex
    b: complex
    c: complex
    d: complex
    scale_exponent: int = 0

    @classmethod
    def identity(cls):
        return cls(1 + 0j, 0j, 0j, 1 + 0j, 0)

    @classmethod
    def from_array(cls, m):
        m = np.asarray(m, dtype=complex)
        return cls(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))._rescaled()

    def _rescaled(self):
        a, b, c, d, e = self.a, self.b, self.c, self.d, self.scale_exponent
        big = max(abs(a), abs(b), abs(c), abs(d))
        if big > _RESCALE_AT or (0 < big < 1.0 / _RESCALE_AT):
            shift = math.frexp(big)[1]
            f = math.ldexp(1.0, -shift)
            a, b, c, d, e = a * f, b * f, c * f, d * f, e + shift
            return TransferMatrix(a, b, c, d, e)
        return self

    def __matmul__(self, other):
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        return TransferMatrix(a, b, c, d, self.scale_exponent + other.scale_exponent)._rescaled()

    def to_array(self):
        """Dense 2x2 array; may overflow to inf for huge scale exponents."""
        f = 2.0 ** self.scale_exponent if self.scale_exponent < 1024 else math.inf
        return np.array([[self.a, self.b], [self.c, self.d]]) * f

    def det(self):
        """Determinant with the scaling undone (1 for products of T(m, z))."""
        e = self.scale_exponent
        val = self.a * self.d - self.b * self.c
        if e > 1000:
            return complex(math.inf)
        # two half steps: 2.0**(2e) alone overflows for e > 511
        f = 2.0 ** e
        return (val * f) * f

    def trace(self):
        return (self.a + self.d) * 2.0 ** self.scale_exponent

    def half_trace(self):
        return 0.5 * self.trace()

    def log_norm(self):
        """Natural log of the spectral norm."""
        return 0.5 * math.log(_norm_sq(self.a, self.b, self.c, self.d)) + self.scale_exponent * _LN2

    def norm(self):
        ln = self.log_norm()
        return math.exp(ln) if ln < 709 else math.inf

    def apply(self, vec):
        """Phi (u1, u0) as a length-2 complex array."""
        u1, u0 = vec
        f = 2.0 ** self.scale_exponent
        return np.array([self.a * u1 + self.b * u0, self.c * u1 + self.d * u0]) * f


def one_step(z, v):
    """T(m, z) for potential value ``v``."""
    return TransferMatrix(complex(z) - v, -1 + 0j, 1 + 0j, 0j, 0)


def one_step_inverse(z, v):
    return TransferMatrix(0j, 1 + 0j, -1 + 0j, complex(z) - v, 0)


def transfer_matrix(n, z, spec):
    """Phi(n, z): T(n)...T(1) for n >= 1, the identity at 0, inverses for n < 0."""
    n = int(n)
    z = complex(z)
    a, b, c, d, e = 1 + 0j, 0j, 0j, 1 + 0j, 0
    if n > 0:
        pot = potential_array(spec, np.arange(1, n + 1))
        for v in pot:
            w = z - v
            a, b, c, d = w * a - c, w * b - d, a, b
            if abs(a) > _RESCALE_AT or abs(b) > _RESCALE_AT:
                a, b, c, d = (x * 2.0 ** -_RESCALE_BITS for x in (a, b, c, d))
                e += _RESCALE_BITS
    elif n < 0:
        # Phi(m - 1) = T(m)^{-1} Phi(m), with T^{-1} = [[0, 1], [-1, z - V]]
        pot = potential_array(spec, np.arange(0, n, -1))
        for v in pot:
            w = z - v
            a, b, c, d = c, d, w * c - a, w * d - b
            if abs(c) > _RESCALE_AT or abs(d) > _RESCALE_AT:
                a, b, c, d = (x * 2.0 ** -_RESCALE_BITS for x in (a, b, c, d))
                e += _RESCALE_BITS
    return TransferMatrix(a, b, c, d, e)


def window_log_max_norm_sq(z, N, side, spec, scale_cap=DEFAULT_SCALE_CAP):
    """ln max ||Phi(n, z)||^2 over the window, vectorized over energies ``z``.

    The window is ``0 <= n <= N-1`` for ``side="right"`` and ``-N+1 <= n <= 0``
    for ``side="left"``.  One matrix product per site, running maximum kept
    in log space.  Entries whose binary scale passes ``scale_cap`` get +inf.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if side not in ("right", "left"):
        raise ValueError("side must be 'right' or 'left'")
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    a = np.ones_like(z)
    b = np.zeros_like(z)
    c = np.zeros_like(z)
    d = np.ones_like(z)
    e = np.zeros(z.shape, dtype=np.int64)
    best = np.zeros(z.shape)
    if side == "right":
        pot = potential_array(spec, np.arange(1, N))
    else:
        pot = potential_array(spec, np.arange(0, -N + 1, -1))
    shrink = 2.0 ** -_RESCALE_BITS
    for v in pot:
        w = z - v
        if side == "right":
            a, b, c, d = w * a - c, w * b - d, a, b
            big = np.maximum(np.abs(a), np.abs(b))
        else:
            a, b, c, d = c, d, w * c - a, w * d - b
            big = np.maximum(np.abs(c), np.abs(d))
        over = big > _RESCALE_AT
        if over.any():
            a = np.where(over, a * shrink, a)
            b = np.where(over, b * shrink, b)
            c = np.where(over, c * shrink, c)
            d = np.where(over, d * shrink, d)
            e = e + over * _RESCALE_BITS
        cur = np.log(_norm_sq(a, b, c, d)) + 2.0 * _LN2 * e
        np.maximum(best, cur, out=best)
    if scale_cap is not None:
        best = np.where(e > scale_cap, np.inf, best)
    return best


def window_max_norm(z, N, side, spec, scale_cap=DEFAULT_SCALE_CAP):
    """max ||Phi(n, z)||^2 over the right or left window of length N (>= 1)."""
    ln = float(window_log_max_norm_sq(complex(z), N, side, spec, scale_cap)[0])
    return math.exp(ln) if ln < 709 else math.inf


def fibonacci_number(k):
    """F_k with F_0 = F_1 = 1."""
    if k < 0:
        raise ValueError("k must be >= 0")
    a, b = 1, 1
    for _ in range(k):
        a, b = b, a + b
    return a


def fibonacci_matrix(k, z, lam):
    """M_k(z) = Phi_{theta=0}(F_k, z), via M_{k+1} = M_{k-1} M_k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    z = complex(z)
    # V(1) = lam, V(2) = 0 at theta = 0
    m1 = one_step(z, lam)
    if k == 1:
        return m1
    m2 = one_step(z, 0.0) @ m1
    prev, cur = m1, m2
    for _ in range(2, k):
        prev, cur = cur, prev @ cur
    return cur


def fibonacci_matrix_direct(k, z, lam):
    """M_k as the plain product over F_k sites (slow cross-check)."""
    from .lattice import PotentialSpec
    return transfer_matrix(fibonacci_number(k), z, PotentialSpec.fibonacci(lam))


def log_norm_profile(z, N, spec):
    """ln ||Phi(n, z)|| for n = 0 .. N, vectorized over energies; shape (N + 1, len(z))."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    a = np.ones_like(z)
    b = np.zeros_like(z)
    c = np.zeros_like(z)
    d = np.ones_like(z)
    e = np.zeros(z.shape, dtype=np.int64)
    out = np.empty((N + 1,) + z.shape)
    out[0] = 0.0
    shrink = 2.0 ** -_RESCALE_BITS
    for i, v in enumerate(potential_array(spec, np.arange(1, N + 1)), start=1):
        w = z - v
        a, b, c, d = w * a - c, w * b - d, a, b
        over = np.maximum(np.abs(a), np.abs(b)) > _RESCALE_AT
        if over.any():
            a, b = np.where(over, a * shrink, a), np.where(over, b * shrink, b)
            c, d = np.where(over, c * shrink, c), np.where(over, d * shrink, d)
            e = e + over * _RESCALE_BITS
        out[i] = 0.5 * np.log(_norm_sq(a, b, c, d)) + _LN2 * e
    return out


@dataclass(frozen=True)
class PowerLawFit:
    """Envelope ||Phi(N, z)|| <= C N^gamma over the sampled energies and 1 <= N <= n_max.

    ``log_c`` is fixed by N = 1 (where N^gamma = 1); ``gamma`` is then the
    smallest exponent for which no sample exceeds the envelope.
    """

    log_c: float
    gamma: float
    n_max: int
    n_energies: int


def power_law_fit(z, n_max, spec):
    """Smallest-envelope power law for the transfer-matrix norms at energies ``z``."""
    if n_max < 2:
        raise DegenerateFit("need n_max >= 2")
    prof = log_norm_profile(z, n_max, spec)
    log_c = float(np.max(prof[1]))
    n = np.arange(2, n_max + 1, dtype=float)
    ratios = (prof[2:] - log_c) / np.log(n)[:, None]
    return PowerLawFit(log_c, max(0.0, float(np.max(ratios))), int(n_max), int(prof.shape[1]))


__all__ = [
    "TransferMatrix", "one_step", "one_step_inverse", "transfer_matrix",
    "window_log_max_norm_sq", "window_max_norm", "fibonacci_number",
    "fibonacci_matrix", "fibonacci_matrix_direct", "log_norm_profile",
    "PowerLawFit", "power_law_fit",
]
