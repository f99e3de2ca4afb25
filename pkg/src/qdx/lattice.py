"""Potentials on the integer lattice and the tridiagonal operator

    [H u](n) = u(n+1) + u(n-1) + V(n) u(n).

The Fibonacci potential is evaluated exactly.  With ``alpha = 1/phi`` the
indicator of ``[1 - alpha, 1)`` applied to ``n*alpha + theta mod 1`` equals
``floor((n+1)*alpha + theta) - floor(n*alpha + theta)``, and ``floor(n*alpha)``
is an integer square root away: ``n*alpha = (n*sqrt(5) - n)/2``.  Only the
phase contributes a floating-point comparison, and near-ties are settled with
exact rational arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, OutOfRangeError

PHI = (1.0 + math.sqrt(5.0)) / 2.0
LOG_PHI = math.log(PHI)

KINDS = ("fibonacci", "free", "custom")

# |n| limit for the int64 square-root path (5 n^2 must fit in int64)
_MAX_SITE = 1_300_000_000


@dataclass(frozen=True)
class PotentialSpec:
    """Generator of the on-site potential V(n).

    Parameters
    ----------
    kind : {"fibonacci", "free", "custom"}
    lam : float
        Coupling constant (fibonacci only).
    theta : float
        Phase in [0, 1) (fibonacci only).
    table : tuple of float
        Values V(table_start), V(table_start + 1), ... (custom only).
    table_start : int
        Site index of ``table[0]``.
    """

    kind: str = "free"
    lam: float = 0.0
    theta: float = 0.0
    table: tuple = field(default_factory=tuple)
    table_start: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown potential kind {self.kind!r}")
        if self.kind == "fibonacci":
            if not self.lam > 0:
                raise DomainError("fibonacci coupling must be > 0")
            if not 0.0 <= self.theta < 1.0:
                raise DomainError("phase must lie in [0, 1)")
        if self.kind == "custom":
            if len(self.table) == 0:
                raise DomainError("custom potential needs a nonempty table")
            object.__setattr__(self, "table", tuple(float(v) for v in self.table))
            if not all(math.isfinite(v) for v in self.table):
                raise DomainError("custom table must be finite")

    @classmethod
    def fibonacci(cls, lam, theta=0.0):
        return cls(kind="fibonacci", lam=float(lam), theta=float(theta))

    @classmethod
    def free(cls):
        return cls(kind="free")

    @classmethod
    def custom(cls, table, table_start=0):
        return cls(kind="custom", table=tuple(table), table_start=int(table_start))

    @property
    def sup_norm(self):
        if self.kind == "fibonacci":
            return abs(self.lam)
        if self.kind == "free":
            return 0.0
        return max(abs(v) for v in self.table)

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "fibonacci":
            d.update(lam=self.lam, theta=self.theta)
        elif self.kind == "custom":
            d.update(table=list(self.table), table_start=self.table_start)
        return d

    @classmethod
    def from_dict(cls, d):
        kind = d.get("kind", "free")
        if kind == "fibonacci":
            return cls.fibonacci(d["lam"], d.get("theta", 0.0))
        if kind == "free":
            return cls.free()
        if kind == "custom":
            return cls.custom(d["table"], d.get("table_start", 0))
        raise DomainError(f"unknown potential kind {kind!r}")


@dataclass(frozen=True, eq=False)
class LatticeWindow:
    """Complex amplitudes on sites ``left .. right``; zero elsewhere."""

    left: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex)
        if amp.ndim != 1 or amp.size == 0:
            raise ValueError("window needs a nonempty 1-d amplitude array")
        amp.setflags(write=False)
        object.__setattr__(self, "left", int(self.left))
        object.__setattr__(self, "amplitudes", amp)
        if not self.left <= 0 <= self.right:
            raise ValueError("window must contain the origin")

    @property
    def right(self):
        return self.left + self.amplitudes.size - 1

    @property
    def sites(self):
        return np.arange(self.left, self.right + 1)

    @classmethod
    def delta(cls, radius=0):
        amp = np.zeros(2 * radius + 1, dtype=complex)
        amp[radius] = 1.0
        return cls(-radius, amp)

    def __getitem__(self, n):
        i = n - self.left
        if 0 <= i < self.amplitudes.size:
            return self.amplitudes[i]
        return 0j

    def padded(self, left, right):
        """Same vector on the larger window ``left .. right``."""
        if left > self.left or right < self.right:
            raise ValueError("padding cannot shrink the window")
        amp = np.zeros(right - left + 1, dtype=complex)
        i = self.left - left
        amp[i:i + self.amplitudes.size] = self.amplitudes
        return LatticeWindow(left, amp)

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other):
        """<self, other>, conjugate-linear in ``self``."""
        lo, hi = max(self.left, other.left), min(self.right, other.right)
        if lo > hi:
            return 0j
        a = self.amplitudes[lo - self.left:hi - self.left + 1]
        b = other.amplitudes[lo - other.left:hi - other.left + 1]
        return complex(np.vdot(a, b))


def _isqrt_int64(x):
    """Elementwise floor(sqrt(x)) for nonnegative int64 arrays below 2**63."""
    r = np.floor(np.sqrt(x.astype(np.float64))).astype(np.int64)
    for _ in range(3):
        r = np.where(r * r > x, r - 1, r)
        r = np.where((r + 1) * (r + 1) <= x, r + 1, r)
    return r


def _floor_n_alpha(n):
    """floor(n / phi) for an int64 array, exactly."""
    s = _isqrt_int64(5 * n * n)
    # floor(n*sqrt(5)); n*sqrt(5) is irrational for n != 0
    s = np.where(n < 0, -s - 1, s)
    s = np.where(n == 0, 0, s)
    return (s - n) // 2


def _frac_n_alpha(n, fl):
    """frac(n / phi) to full double relative accuracy, given fl = floor(n / phi)."""
    c = n + 2 * fl
    num = (5 * n * n - c * c).astype(np.float64)
    den = n.astype(np.float64) * math.sqrt(5.0) + c.astype(np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        f = 0.5 * num / den
    return np.where(n == 0, 0.0, f)


def _carry_exact(n, c, theta):
    """Exact test n*sqrt(5) - c >= 2*(1 - theta), i.e. frac(n alpha) + theta >= 1."""
    rhs = Fraction(c) + 2 * (1 - Fraction(theta))
    if n >= 0:
        return rhs <= 0 or 5 * n * n >= rhs * rhs
    return rhs < 0 and 5 * n * n <= rhs * rhs


def _floor_n_alpha_theta(n, theta):
    fl = _floor_n_alpha(n)
    if theta == 0.0:
        return fl
    f = _frac_n_alpha(n, fl)
    carry = f + theta >= 1.0
    close = np.abs(f - (1.0 - theta)) < 1e-9
    if np.any(close):
        carry = carry.copy()
        c = n + 2 * fl
        for i in np.flatnonzero(close):
            carry[i] = _carry_exact(int(n[i]), int(c[i]), theta)
    return fl + carry.astype(np.int64)


def potential_array(spec, sites):
    """V(n) for every entry of the integer array ``sites``."""
    n = np.asarray(sites, dtype=np.int64)
    if spec.kind == "free":
        return np.zeros(n.shape)
    if spec.kind == "custom":
        i = n - spec.table_start
        if n.size and (i.min() < 0 or i.max() >= len(spec.table)):
            raise OutOfRangeError(
                f"sites outside custom table [{spec.table_start}, "
                f"{spec.table_start + len(spec.table) - 1}]")
        return np.asarray(spec.table)[i]
    if n.size and np.abs(n).max() >= _MAX_SITE:
        raise DomainError(f"|n| must stay below {_MAX_SITE}")
    flat = n.ravel()
    jump = _floor_n_alpha_theta(flat + 1, spec.theta) - _floor_n_alpha_theta(flat, spec.theta)
    return spec.lam * jump.reshape(n.shape).astype(np.float64)


def potential_value(spec, n):
    """V(n) at a single site."""
    return float(potential_array(spec, np.array([int(n)]))[0])


def apply_hamiltonian(psi, spec):
    """H psi on a window one site wider on each side."""
    amp = psi.amplitudes
    out = np.zeros(amp.size + 2, dtype=complex)
    out[:-2] += amp
    out[2:] += amp
    v = potential_array(spec, psi.sites)
    out[1:-1] += v * amp
    return LatticeWindow(psi.left - 1, out)


def spectral_bound(spec):
    """K >= 4 with sigma(H) inside [-K+1, K-1]."""
    return max(4.0, spec.sup_norm + 3.0)
