"""The Fibonacci trace map

    x_{k+1} = 2 x_k x_{k-1} - x_{k-2},   x_{-1} = 1, x_0 = z/2, x_1 = (z - lam)/2,

its real band sets sigma_k^delta = {E : |x_k(E)| <= 1 + delta}, the roots of
x_k with their profiles m, and box-counting estimates for the band sets.

Two arithmetic backends share one code path.  Double precision keeps every
value as ``mantissa * 2**exponent`` so that the doubly exponential growth off
the spectrum never overflows.  For strong coupling the narrowest bands fall
below double resolution, and the backend switches to gmpy2 multiprecision
numbers stored in numpy object arrays.

Root isolation is hierarchical: sigma_k^0 lies inside sigma_{k-1}^0 union
sigma_{k-2}^0, so the roots of x_k are bracketed by sign changes on grids laid
over the level k-1 and k-2 bands, then refined by bisection.  Between two
consecutive roots |x_k| is unimodal (x_k has only simple real roots), which
pins every band edge to a single bisection bracket.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import gmpy2
import numpy as np

from .errors import BandCountMismatch, DegenerateFit, DomainError, RootCountMismatch
from .lattice import LOG_PHI
from .transfer import fibonacci_number

_LOG2E = 1.0 / math.log(2.0)


def lambda_zero(delta):
    """Coupling threshold above which the delta-bands of three consecutive
    levels cannot overlap."""
    if delta < 0:
        raise DomainError("delta must be >= 0")
    q = 1.0 + delta
    return math.sqrt(12 * q ** 2 + 8 * q ** 3 + 4)


# ---------------------------------------------------------------------------
# arithmetic backends


def _renorm(m, e):
    if np.iscomplexobj(m):
        mag = np.maximum(np.abs(m.real), np.abs(m.imag))
        _, f = np.frexp(mag)
        m = np.ldexp(m.real, -f) + 1j * np.ldexp(m.imag, -f)
    else:
        m, f = np.frexp(m)
    return m, e + f


def _shift(m, s):
    # s <= 0; ldexp underflows cleanly to zero
    s = np.maximum(s, -4000)
    if np.iscomplexobj(m):
        return np.ldexp(m.real, s) + 1j * np.ldexp(m.imag, s)
    return np.ldexp(m, s)


class _Scaled:
    """Double-precision values ``m * 2**e`` with |m| in [0.5, 1)."""

    bits = 53

    def seeds(self, z, lam):
        z = np.asarray(z)
        one = np.ones_like(z)
        vals = [one, z / 2.0, (z - lam) / 2.0]
        zero = np.zeros(z.shape, dtype=np.int64)
        return [_renorm(v, zero) for v in vals]

    def step(self, a, b, c):
        """2 a b - c."""
        pm, pe = 2.0 * a[0] * b[0], a[1] + b[1]
        top = np.maximum(pe, c[1])
        m = _shift(pm, pe - top) - _shift(c[0], c[1] - top)
        return _renorm(m, top)

    def log2abs(self, v):
        m, e = v
        with np.errstate(divide="ignore"):
            return np.log2(np.abs(m)) + e

    def sign(self, v):
        return np.sign(v[0].real)

    def value(self, v):
        m, e = v
        with np.errstate(over="ignore"):
            if np.iscomplexobj(m):
                return np.ldexp(m.real, e) + 1j * np.ldexp(m.imag, e)
            return np.ldexp(m, e)

    def coerce(self, x):
        x = np.asarray(x)
        return x.astype(complex) if np.iscomplexobj(x) else x.astype(float)

    def to_float(self, x):
        return np.asarray(x, dtype=float)


_mpfr_vec = np.frompyfunc(gmpy2.mpfr, 1, 1)
_mpc_vec = np.frompyfunc(gmpy2.mpc, 1, 1)
_float_vec = np.frompyfunc(float, 1, 1)
_floor_int_vec = np.frompyfunc(lambda x: int(gmpy2.floor(x)), 1, 1)


def _log2abs_scalar(x):
    a = abs(x)
    if a == 0:
        return -math.inf
    return float(gmpy2.log2(a))


_log2abs_vec = np.frompyfunc(_log2abs_scalar, 1, 1)


class _Multi:
    """gmpy2 numbers in object arrays; exponents are unbounded so no scaling."""

    def __init__(self, bits):
        self.bits = int(bits)

    def seeds(self, z, lam):
        z = np.asarray(z, dtype=object)
        lam = gmpy2.mpfr(lam)
        one = np.full(z.shape, gmpy2.mpfr(1), dtype=object)
        return [one, z / 2, (z - lam) / 2]

    def step(self, a, b, c):
        return 2 * a * b - c

    def log2abs(self, v):
        return _log2abs_vec(v).astype(float)

    def sign(self, v):
        return ((v > 0).astype(int) - (v < 0).astype(int)).astype(float)

    def value(self, v):
        return v

    def coerce(self, x):
        x = np.asarray(x)
        if x.dtype == object:
            return x
        if np.iscomplexobj(x):
            return _mpc_vec(x.astype(complex)).astype(object)
        return _mpfr_vec(x.astype(float)).astype(object)

    def to_float(self, x):
        return _float_vec(np.asarray(x, dtype=object)).astype(float)


def _backend(bits):
    return _Scaled() if bits is None or bits <= 53 else _Multi(bits)


def _with_ctx(arith, fn, *args):
    if isinstance(arith, _Multi):
        with gmpy2.context(precision=arith.bits):
            return fn(*args)
    return fn(*args)


def _levels(arith, z, k, lam):
    """List of values x_{-1} .. x_k at the points ``z``."""
    vals = arith.seeds(z, lam)
    for _ in range(1, k):
        vals.append(arith.step(vals[-1], vals[-2], vals[-3]))
    return vals[:k + 2]


def _top(arith, z, k, lam):
    """(sign, log2|x_k|) at the points ``z``; cheaper than keeping all levels."""
    a, b, c = arith.seeds(z, lam)
    if k == -1:
        v = a
    elif k == 0:
        v = b
    else:
        for _ in range(1, k):
            a, b, c = b, c, arith.step(c, b, a)
        v = c
    return arith.sign(v), arith.log2abs(v)


def auto_precision(k, lam):
    """Working precision in bits for level-k bands at coupling ``lam``.

    Bands at level k are no narrower than about (lam + 2)^(-2k/3); double
    precision is kept while such a band still spans 1e3 ulps.
    """
    m_max = (2 * k) // 3
    log2_width = -m_max * math.log2(lam + 2.0)
    log2_scale = math.log2(lam + 3.0)
    if log2_width - log2_scale + 52 >= math.log2(1e3):
        return 53
    return int(math.ceil(log2_scale - log2_width)) + 48


# ---------------------------------------------------------------------------
# trace sequence at one point


@dataclass(frozen=True, eq=False)
class TraceState:
    """x_{-1} .. x_k at a point z, stored as ``mantissas * 2**exponents``.

    In multiprecision mode ``mantissas`` holds gmpy2 numbers and every
    exponent is zero.
    """

    k: int
    z: complex
    lam: float
    mantissas: np.ndarray
    exponents: np.ndarray
    bits: int = 53

    def log2abs(self):
        if self.bits <= 53:
            with np.errstate(divide="ignore"):
                return np.log2(np.abs(self.mantissas)) + self.exponents
        return _log2abs_vec(self.mantissas).astype(float)

    def values(self):
        """Levels -1..k as complex doubles (inf where too large)."""
        if self.bits <= 53:
            with np.errstate(over="ignore", invalid="ignore"):
                m = self.mantissas
                return np.ldexp(m.real, self.exponents) + 1j * np.ldexp(m.imag, self.exponents)
        return np.array([complex(v) for v in self.mantissas])

    def value(self, level):
        return self.values()[level + 1]

    def invariants(self):
        """Fricke invariant at levels (l-1, l, l+1) for l = 0 .. k-1.

        Entry i belongs to the triple (x_{i-1}, x_i, x_{i+1}).  Computed in
        the working precision and returned as complex doubles (the imaginary
        part vanishes in exact arithmetic); nan where any of the three values
        exceeds 1e150 in double mode.
        """
        out = np.full(self.k, np.nan, dtype=complex)
        if self.bits <= 53:
            v = self.values()
            for i in range(self.k):
                x, y, w = v[i + 2], v[i + 1], v[i]
                # beyond 1e150 the cubic term overflows a double
                if max(abs(x), abs(y), abs(w)) < 1e150:
                    out[i] = x * x + y * y + w * w - 2 * x * y * w - 1
            return out
        with gmpy2.context(precision=self.bits):
            v = self.mantissas
            for i in range(self.k):
                x, y, w = v[i + 2], v[i + 1], v[i]
                out[i] = complex(x * x + y * y + w * w - 2 * x * y * w - 1)
        return out

    def invariant_error_bound(self):
        """Rounding-error scale of each invariant entry.

        Every recursion step and the final evaluation perturb the invariant
        by about ``2**-bits * |x|**2`` at the largest magnitude involved.
        """
        l2 = self.log2abs()
        out = np.empty(self.k)
        run = 0.0
        for i in range(self.k):
            top = max(l2[i], l2[i + 1], l2[i + 2], 0.0)
            run = max(run, top)
            out[i] = 16.0 * (i + 2) * 2.0 ** min(2 * run - self.bits, 1000.0)
        return out

    @property
    def invariant_value(self):
        """Invariant at the highest level whose rounding error is below 1e-12
        relative to lam^2/4 (complex; real for real z)."""
        inv = self.invariants()
        err = self.invariant_error_bound()
        ok = np.flatnonzero(err < 1e-12 * max(self.lam ** 2 / 4, 1.0))
        return complex(inv[ok[-1]] if ok.size else inv[0])


def trace_sequence(z, k_max, lam, bits=None):
    """Trace-map levels x_{-1} .. x_{k_max} at one real or complex point."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    arith = _backend(bits)
    cplx = isinstance(z, complex) or np.iscomplexobj(np.asarray(z))
    zz = np.array([complex(z) if cplx else float(z)])

    def run():
        zarr = arith.coerce(zz)
        vals = _levels(arith, zarr, max(k_max, 1), lam)[:k_max + 2]
        if isinstance(arith, _Scaled):
            m = np.array([v[0][0] for v in vals], dtype=complex)
            e = np.array([v[1][0] for v in vals], dtype=np.int64)
        else:
            m = np.array([v[0] for v in vals], dtype=object)
            e = np.zeros(len(vals), dtype=np.int64)
        return m, e

    m, e = _with_ctx(arith, run)
    return TraceState(k_max, complex(z), float(lam), m, e, arith.bits)


# ---------------------------------------------------------------------------
# roots, profiles and bands on the real line


def _bisect(arith, lo, hi, positive, n_iter):
    """Vectorized bisection; ``positive(x)`` is True on the ``hi`` side."""
    for _ in range(n_iter):
        mid = (lo + hi) / 2
        p = positive(mid)
        lo = np.where(p, lo, mid)
        hi = np.where(p, mid, hi)
    return lo, hi


def _n_bisect(arith, width, scale):
    width = float(np.max(arith.to_float(width))) if np.size(width) else 0.0
    if width <= 0:
        return 0
    resolution = scale * 2.0 ** -(arith.bits - 4)
    return max(0, int(math.ceil(math.log2(width / resolution)))) + 2


def _merge(lo, hi, arith):
    """Union of closed intervals, as sorted disjoint (lo, hi) arrays."""
    order = np.argsort(lo, kind="stable")
    lo, hi = lo[order], hi[order]
    out_lo, out_hi = [lo[0]], [hi[0]]
    for a, b in zip(lo[1:], hi[1:]):
        if a <= out_hi[-1]:
            if b > out_hi[-1]:
                out_hi[-1] = b
        else:
            out_lo.append(a)
            out_hi.append(b)
    dt = lo.dtype
    return np.array(out_lo, dtype=dt), np.array(out_hi, dtype=dt)


@dataclass
class _Level:
    roots: np.ndarray
    left: np.ndarray   # delta = 0 band edges
    right: np.ndarray


class _Ladder:
    """Roots and delta=0 bands for levels 1, 2, ... at one coupling and precision."""

    def __init__(self, lam, bits):
        self.lam = float(lam)
        self.arith = _backend(bits)
        self.scale = self.lam + 3.0
        self.levels = {}

    def level(self, k):
        for j in range(1, k + 1):
            if j not in self.levels:
                self.levels[j] = _with_ctx(self.arith, self._build, j)
        return self.levels[k]

    def _build(self, k):
        ar, lam = self.arith, self.lam
        if k == 1:
            roots = ar.coerce(np.array([lam]))
        elif k == 2:
            if isinstance(ar, _Multi):
                s = gmpy2.sqrt(gmpy2.mpfr(lam) ** 2 + 8)
                roots = np.array([(lam - s) / 2, (lam + s) / 2], dtype=object)
            else:
                s = math.sqrt(lam * lam + 8)
                roots = np.array([(lam - s) / 2, (lam + s) / 2])
        else:
            roots = self._isolate(k)
        left, right = band_edges(ar, k, lam, roots, 0.0, self.scale)
        return _Level(roots, left, right)

    def _isolate(self, k, n_scan=16, max_doublings=6):
        ar, lam = self.arith, self.lam
        p1, p2 = self.levels[k - 1], self.levels[k - 2]
        lo = np.concatenate([p1.left, p2.left])
        hi = np.concatenate([p1.right, p2.right])
        pad = (hi - lo) * 1e-3 + self.scale * 2.0 ** -(ar.bits - 8)
        ulo, uhi = _merge(lo - pad, hi + pad, ar)
        target = fibonacci_number(k)
        n = n_scan
        for _ in range(max_doublings + 1):
            t = np.linspace(0.0, 1.0, n + 1)
            if isinstance(ar, _Multi):
                t = ar.coerce(t)
            grid = ulo[:, None] + (uhi - ulo)[:, None] * t[None, :]
            sgn, _ = _top(ar, grid.ravel(), k, lam)
            sgn = sgn.reshape(grid.shape)
            change = sgn[:, :-1] * sgn[:, 1:] < 0
            zero_hit = sgn == 0
            if zero_hit.any():
                # exact zero on the grid: nudge by recomputing with a shifted grid
                n += 1
                continue
            if change.sum() == target:
                i, j = np.nonzero(change)
                a, b = grid[i, j], grid[i, j + 1]
                sa = sgn[i, j]
                it = _n_bisect(ar, b - a, self.scale)
                a, b = _bisect(ar, a, b, lambda x: _top(ar, x, k, lam)[0] != sa, it)
                roots = (a + b) / 2
                order = np.argsort(roots, kind="stable")
                return roots[order]
            n *= 2
        raise RootCountMismatch(
            f"level {k}: found {int(change.sum())} sign changes, expected {target}")


def band_edges(arith, k, lam, roots, delta, scale):
    """Edges of the components of {|x_k| <= 1 + delta}, one per root."""
    roots = np.asarray(roots)
    thr = math.log2(1.0 + delta)

    def mag(x):
        return _top(arith, x, k, lam)[1]

    def above(x):
        return mag(x) > thr

    n = roots.size
    outer = 2.0 + lam + 2.0 + delta
    lo_out = arith.coerce(np.array([-outer]))
    hi_out = arith.coerce(np.array([lam + outer]))
    if not (above(lo_out)[0] and above(hi_out)[0]):
        raise BandCountMismatch(f"level {k}: outer scan bounds are inside a band")
    if n > 1:
        sep, found = _separate(arith, roots[:-1], roots[1:], mag, thr, scale)
        if not found.all():
            j = int(np.flatnonzero(~found)[0])
            raise BandCountMismatch(
                f"level {k}: bands around roots {j} and {j + 1} merge at delta={delta}")
        lpos = np.concatenate([lo_out, sep])
        rpos = np.concatenate([sep, hi_out])
    else:
        lpos, rpos = lo_out, hi_out
    it = _n_bisect(arith, np.concatenate([roots - lpos, rpos - roots]), scale)
    _, left = _bisect(arith, lpos, roots.copy(), lambda x: ~above(x), it)
    right, _ = _bisect(arith, roots.copy(), rpos, above, it)
    return left, right


def _separate(arith, a, b, mag, thr, scale, max_iter=400):
    """A point strictly between each pair (a, b) where log2|x_k| > thr.

    Golden-section search for the maximum of the unimodal |x_k|, stopping
    as soon as a probe lands above the threshold.
    """
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    sep = (a + b) / 2
    found = mag(sep) > thr
    if found.all():
        return sep, found
    lo, hi = a.copy(), b.copy()
    todo = ~found
    for _ in range(max_iter):
        idx = np.flatnonzero(todo)
        if idx.size == 0:
            break
        cl, ch = lo[idx], hi[idx]
        x1 = ch - (ch - cl) * gr
        x2 = cl + (ch - cl) * gr
        m1, m2 = mag(x1), mag(x2)
        hit1 = m1 > thr
        hit2 = (m2 > thr) & ~hit1
        sep[idx[hit1]] = x1[hit1]
        sep[idx[hit2]] = x2[hit2]
        done = hit1 | hit2
        found[idx[done]] = True
        left_better = m1 > m2
        nl = np.where(left_better, cl, x1)
        nh = np.where(left_better, x2, ch)
        lo[idx], hi[idx] = nl, nh
        tiny = arith.to_float(nh - nl) < scale * 2.0 ** -(arith.bits - 2)
        todo[idx[done | tiny]] = False
    return sep, found


_LADDERS = {}


def _ladder(lam, bits):
    key = (float(lam), int(bits))
    if key not in _LADDERS:
        _LADDERS[key] = _Ladder(lam, bits)
    return _LADDERS[key]


def _profiles(arith, roots, k, lam):
    if k == 0:
        return np.zeros(roots.size, dtype=int)
    vals = _with_ctx(arith, _levels, arith, roots, k, lam)
    # levels l = 0 .. k-1 sit at list positions 1 .. k
    small = [arith.log2abs(v) <= 0.0 for v in vals[1:k + 1]]
    return np.sum(small, axis=0).astype(int)


@dataclass(frozen=True, eq=False)
class BandSet:
    """Components of sigma_k^delta on the real line, one per root of x_k.

    Positions are float64 arrays, or object arrays of gmpy2 numbers when
    ``bits > 53``; ``widths`` is always float64.
    """

    k: int
    delta: float
    lam: float
    left: np.ndarray
    right: np.ndarray
    roots: np.ndarray
    m: np.ndarray
    bits: int = 53
    widths: np.ndarray = field(init=False)

    def __post_init__(self):
        w = self.right - self.left
        if self.bits > 53:
            w = _float_vec(w).astype(float)
        object.__setattr__(self, "widths", np.asarray(w, dtype=float))

    def __len__(self):
        return int(self.roots.size)

    def as_float(self):
        """(left, right, roots) as float64 arrays."""
        conv = (lambda a: _float_vec(a).astype(float)) if self.bits > 53 else np.asarray
        return conv(self.left), conv(self.right), conv(self.roots)

    def rows(self):
        """Records with the CSV columns k, j, root, m, left, right, width."""
        lo, hi, r = self.as_float()
        return [
            {"k": self.k, "j": j, "root": float(r[j]), "m": int(self.m[j]),
             "left": float(lo[j]), "right": float(hi[j]), "width": float(self.widths[j])}
            for j in range(len(self))
        ]

    def contains(self, x):
        """Boolean mask of the points ``x`` (floats) lying in some band."""
        lo, hi, _ = self.as_float()
        x = np.asarray(x, dtype=float)
        j = np.searchsorted(lo, x, side="right") - 1
        ok = j >= 0
        jj = np.clip(j, 0, None)
        return ok & (x <= hi[jj])


def real_bands(k, delta, lam, bits=None):
    """The F_k components of {E real : |x_k(E)| <= 1 + delta}.

    ``bits`` selects the working precision; by default it is chosen from the
    predicted narrowest band (see ``auto_precision``).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if delta < 0:
        raise DomainError("delta must be >= 0")
    if not lam > lambda_zero(delta):
        raise DomainError(f"lambda={lam} must exceed lambda_zero({delta})={lambda_zero(delta):.6f}")
    bits = auto_precision(k, lam) if bits is None else int(bits)
    lad = _ladder(lam, bits)
    lev = lad.level(k)
    if delta == 0.0:
        left, right = lev.left, lev.right
    else:
        left, right = _with_ctx(lad.arith, band_edges, lad.arith, k, lam, lev.roots,
                                delta, lad.scale)
    m = _profiles(lad.arith, lev.roots, k, lam)
    bs = BandSet(k, float(delta), float(lam), left, right, lev.roots, m, lad.arith.bits)
    if len(bs) != fibonacci_number(k):
        raise BandCountMismatch(f"level {k}: {len(bs)} bands, expected {fibonacci_number(k)}")
    return bs


def root_profiles(k, lam, bits=None):
    """Sorted real roots of x_k (float64) with their profiles m."""
    if k < 1:
        raise ValueError("k must be >= 1")
    bits = auto_precision(k, lam) if bits is None else int(bits)
    lad = _ladder(lam, bits)
    roots = lad.level(k).roots
    m = _profiles(lad.arith, roots, k, lam)
    return list(zip(lad.arith.to_float(roots).tolist(), m.tolist()))


def c_histogram(k, lam, bits=None):
    """Map m -> number of roots of x_k with profile m."""
    if k < 2:
        raise ValueError("k must be >= 2")
    out = {}
    for _, m in root_profiles(k, lam, bits):
        out[m] = out.get(m, 0) + 1
    return dict(sorted(out.items()))


def intersect_intervals(a, b):
    """Intersection of two sorted lists of disjoint closed intervals."""
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo <= hi:
            out.append((lo, hi))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return out


def triple_intersection(k, delta, lam, bits=None):
    """sigma_k^delta, sigma_{k+1}^delta, sigma_{k+2}^delta intersected on the real line.

    Comparisons run in the working precision of the finest level.
    """
    bits = auto_precision(k + 2, lam) if bits is None else int(bits)
    sets = [real_bands(j, delta, lam, bits) for j in (k, k + 1, k + 2)]
    lists = [list(zip(s.left, s.right)) for s in sets]
    return intersect_intervals(intersect_intervals(lists[0], lists[1]), lists[2])


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit of ln(width) against m over all bands."""

    slope: float
    intercept: float
    correlation: float
    residuals: np.ndarray
    m: np.ndarray
    log_widths: np.ndarray

    @property
    def residual_spread(self):
        return float(np.std(self.residuals))


def band_scaling(k, delta, lam, bits=None):
    """Regress ln(band width) on the root profile m."""
    if k < 3:
        raise ValueError("k must be >= 3")
    bs = real_bands(k, delta, lam, bits)
    m = bs.m.astype(float)
    y = np.log(bs.widths)
    if np.ptp(m) == 0:
        raise DegenerateFit("all bands share one profile value")
    slope, intercept = np.polyfit(m, y, 1)
    corr = float(np.corrcoef(m, y)[0, 1])
    return ScalingFit(float(slope), float(intercept), corr, y - (slope * m + intercept), bs.m, y)


@dataclass(frozen=True)
class DimensionFit:
    """Box-counting regression: ln N(eps) = dimension * ln(1/eps) + const."""

    dimension: float
    r_squared: float
    scales: np.ndarray
    counts: np.ndarray


def _cover_count(lo_off, hi_off, eps, exact):
    """Number of grid cells of size eps met by the union of the intervals."""
    if exact:
        a = np.array([int(gmpy2.floor(x / eps)) for x in lo_off], dtype=object)
        b = np.array([int(gmpy2.floor(x / eps)) for x in hi_off], dtype=object)
    else:
        a = np.floor(lo_off / eps).astype(np.int64)
        b = np.floor(hi_off / eps).astype(np.int64)
    n = int(np.sum(b - a + 1))
    # cells shared with the previous interval are counted once
    n -= int(np.sum(a[1:] <= b[:-1]))
    return n


def box_dimension(lam, k, delta=0.0, bits=None, scales="resolved", min_scales=4):
    """Box-counting dimension estimate of the level-k band set.

    Dyadic scales (ratio 2) are regressed against cover counts.  With
    ``scales="resolved"`` they run from half the total span down to the
    largest band width, the range on which every band is smaller than a box
    and the approximant looks like the limit set.  ``scales="widths"`` uses
    the largest band width down to the smallest one instead; there the counts
    mostly measure the spread of band widths.
    """
    bs = real_bands(k, delta, lam, bits)
    exact = bs.bits > 53
    w = bs.widths
    x0 = bs.left[0]
    lo_off, hi_off = bs.left - x0, bs.right - x0
    span = float(hi_off[-1])
    if scales == "resolved":
        eps_hi, eps_lo = span / 2.0, float(np.max(w))
    elif scales == "widths":
        eps_hi, eps_lo = float(np.max(w)), float(np.min(w))
    else:
        raise ValueError(f"unknown scale range {scales!r}")
    n_sc = int(math.floor(math.log2(eps_hi / eps_lo))) + 1 if eps_hi > eps_lo else 1
    if n_sc < min_scales:
        raise DegenerateFit(f"only {n_sc} dyadic scales between {eps_lo:.3g} and {eps_hi:.3g}")
    eps_grid = eps_hi * 2.0 ** -np.arange(n_sc)
    counts = np.empty(n_sc)
    with gmpy2.context(precision=max(bs.bits, 53)):
        for i, eps in enumerate(eps_grid):
            e = gmpy2.mpfr(eps) if exact else eps
            counts[i] = _cover_count(lo_off, hi_off, e, exact)
    x = -np.log(eps_grid)
    y = np.log(counts)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss if ss > 0 else 1.0
    return DimensionFit(float(slope), r2, eps_grid, counts)
