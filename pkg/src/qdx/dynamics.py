"""Wavepacket dynamics e^{-itH} delta_0, outside probabilities, moments,
exponential time averages and resolvent matrix elements.

Propagation uses the Chebyshev expansion

    e^{-itH} = sum_j c_j T_j(H / K),   c_0 = J_0(K t),  c_j = 2 (-i)^j J_j(K t),

with K the spectral bound, so ||H / K|| < 1.  T_j(H/K) psi spreads at most j
sites beyond the support of psi; the recursion runs on slices that grow by
one site per order, so there is no boundary error and the only truncation is
in the series, bounded by sum_{j > M} |c_j|.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.linalg import solve_banded

from .errors import BoxCapExceeded, GridTooCoarse, TolUnreachable
from .lattice import LatticeWindow, potential_array, spectral_bound
from .quadrature import integrate

DEFAULT_WINDOW_CAP = 10 ** 7
DEFAULT_BOX_CAP = 10 ** 7
# edge sites whose cumulative mass is below this are trimmed between steps;
# far-tail roundoff is relative, so probabilities stay meaningful down to here
TRIM_MASS = 1e-280
_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class WavePacket:
    """psi(t) on a finite window.

    ``truncation_bound`` bounds the squared l2 distance between the stored
    vector and the exact e^{-itH} delta_0, which covers any mass outside the
    window.  ``roundoff`` is an a-priori estimate of accumulated rounding.
    """

    t: float
    window: LatticeWindow
    norm_defect: float
    truncation_bound: float
    roundoff: float = 0.0

    @property
    def probabilities(self):
        return np.abs(self.window.amplitudes) ** 2

    @property
    def sites(self):
        return self.window.sites

    def __getitem__(self, n):
        return self.window[n]


def chebyshev_coefficients(x, tol):
    """Coefficients c_j for e^{-i x y}, y in [-1, 1], and a bound on the dropped tail.

    The order M is the last index with |c_j| >= tol * 1e-3, searched up to
    ceil(e x / 2) + 40.  The tail sum uses |J_n(x)| <= (x/2)^n / n! beyond
    the search range.
    """
    m0 = int(math.ceil(math.e * x / 2.0)) + 40
    j = np.arange(m0 + 1)
    jv = special.jv(j, x)
    c = 2.0 * jv * (-1j) ** (j % 4)
    c[0] = jv[0]
    big = np.flatnonzero(np.abs(c) >= tol * 1e-3)
    order = int(big[-1]) if big.size else 0
    tail = float(np.sum(np.abs(c[order + 1:])))
    # analytic remainder past m0: 2 (x/2)^n / n! summed as a geometric series
    n = m0 + 1
    if x > 0:
        log_term = n * math.log(x / 2.0) - math.lgamma(n + 1)
        ratio = x / (2.0 * (n + 1))
        tail += 2.0 * math.exp(log_term) / (1.0 - ratio)
    return c[:order + 1], tail


def _chebyshev_apply(amp, v, scale, coeffs):
    """sum_j coeffs[j] T_j(H / scale) amp on a window padded by len(coeffs) - 1.

    ``v`` holds the potential on the padded window.  Returns the padded result.
    """
    order = coeffs.size - 1
    width = amp.size
    size = width + 2 * order
    inv = 1.0 / scale
    phi0 = np.zeros(size, dtype=complex)
    phi0[order:order + width] = amp
    out = coeffs[0] * phi0
    if order == 0:
        return out
    vs = v * inv

    def hop(src, lo, hi):
        # (H / scale) src restricted to [lo, hi); src vanishes outside [lo+1, hi-1)
        res = vs[lo:hi] * src[lo:hi]
        res[1:] += inv * src[lo:hi - 1]
        res[:-1] += inv * src[lo + 1:hi]
        return res

    lo, hi = order - 1, order + width + 1
    phi1 = np.zeros(size, dtype=complex)
    phi1[lo:hi] = hop(phi0, lo, hi)
    out[lo:hi] += coeffs[1] * phi1[lo:hi]
    prev, cur = phi0, phi1
    for j in range(2, order + 1):
        lo, hi = order - j, order + width + j
        nxt = prev  # reuse storage: prev is dead after this step
        nxt[lo:hi] = 2.0 * hop(cur, lo, hi) - prev[lo:hi]
        out[lo:hi] += coeffs[j] * nxt[lo:hi]
        prev, cur = cur, nxt
    return out


def _step(window, dt, spec, K, tol, window_cap):
    coeffs, tail = chebyshev_coefficients(K * dt, tol)
    order = coeffs.size - 1
    left = window.left - order
    size = window.amplitudes.size + 2 * order
    if size > window_cap:
        raise TolUnreachable(f"window of {size} sites exceeds the cap {window_cap}")
    v = potential_array(spec, np.arange(left, left + size))
    out = _chebyshev_apply(window.amplitudes, v, K, coeffs)
    roundoff = 8.0 * _EPS * (order + 1)
    return out, left, tail, roundoff


def _trim(amp, left, limit):
    """Drop edge sites holding cumulative mass below ``limit``; keep the origin."""
    p = np.abs(amp) ** 2
    cl = np.cumsum(p)
    cr = np.cumsum(p[::-1])
    i0 = int(np.searchsorted(cl, limit, side="left"))
    j0 = int(np.searchsorted(cr, limit, side="left"))
    i0 = min(i0, -left)
    j0 = min(j0, amp.size - 1 - (-left))
    dropped = (cl[i0 - 1] if i0 else 0.0) + (cr[j0 - 1] if j0 else 0.0)
    return amp[i0:amp.size - j0], left + i0, float(dropped)


def evolve(spec, t, tol=1e-12, window_cap=DEFAULT_WINDOW_CAP):
    """psi(t) = e^{-itH} delta_0 by one Chebyshev expansion.

    The window radius is the expansion order, about e K t / 2.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if not 0 < tol <= 1e-6:
        raise ValueError("tol must lie in (0, 1e-6]")
    K = spectral_bound(spec)
    start = LatticeWindow.delta(0)
    if t == 0:
        return WavePacket(0.0, start, 0.0, 0.0)
    amp, left, tail, roundoff = _step(start, t, spec, K, tol, window_cap)
    if tail ** 2 > tol:
        raise TolUnreachable(f"series tail {tail:.3g} above tolerance")
    win = LatticeWindow(left, amp)
    defect = abs(float(np.sum(np.abs(amp) ** 2)) - 1.0)
    return WavePacket(float(t), win, defect, tail ** 2, roundoff)


def propagate_series(spec, times, tol=1e-12, window_cap=DEFAULT_WINDOW_CAP,
                     trim_mass=TRIM_MASS, callback=None):
    """Step psi through increasing ``times`` (starting from delta_0 at t=0).

    Between steps, edge sites carrying less than ``trim_mass`` in total are
    dropped.  The dropped mass and series tails accumulate in the l2 error
    budget reported as ``truncation_bound`` (squared).

    If ``callback`` is given it is called with each WavePacket and the
    packets are not stored; otherwise the list of packets is returned.
    """
    times = np.asarray(times, dtype=float)
    if times.size and (times[0] < 0 or np.any(np.diff(times) <= 0)):
        raise ValueError("times must be nonnegative and strictly increasing")
    if not 0 < tol <= 1e-6:
        raise ValueError("tol must lie in (0, 1e-6]")
    K = spectral_bound(spec)
    amp = np.ones(1, dtype=complex)
    left = 0
    t_now = 0.0
    err = 0.0          # l2 error bound
    roundoff = 0.0
    out = []
    for t in times:
        dt = t - t_now
        if dt > 0:
            amp, left, tail, r = _step(LatticeWindow(left, amp), dt, spec, K, tol, window_cap)
            amp, left, dropped = _trim(amp, left, trim_mass)
            err += tail + math.sqrt(dropped)
            roundoff += r
            t_now = t
        win = LatticeWindow(left, amp)
        defect = abs(float(np.sum(np.abs(amp) ** 2)) - 1.0)
        pkt = WavePacket(float(t), win, defect, err ** 2, roundoff)
        if callback is None:
            out.append(pkt)
        else:
            callback(pkt)
    if err ** 2 > tol:
        raise TolUnreachable(f"accumulated truncation {err ** 2:.3g} above tolerance")
    return out if callback is None else None


def outside_probability(psi, N, side="both"):
    """P_r(N) = sum_{n >= N} |psi(n)|^2, P_l(N) = sum_{n <= -N}, or their sum.

    At N = 0 the two-sided value counts n = 0 once.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    p = psi.probabilities
    n = psi.sites
    right = float(np.sum(p[n >= N]))
    left = float(np.sum(p[n <= -N]))
    if side == "right":
        return right
    if side == "left":
        return left
    if side == "both":
        return right + left - (float(p[n == 0].sum()) if N == 0 else 0.0)
    raise ValueError("side must be 'right', 'left' or 'both'")


def outside_profile(psi, N, side="both"):
    """outside_probability for an array of N >= 0 (vectorized tail sums)."""
    N = np.asarray(N, dtype=np.int64)
    p = psi.probabilities
    left, right = psi.window.left, psi.window.right
    # suffix sums on the right half, prefix sums on the left half
    pr = p[-left:]                      # sites 0 .. right
    pl = p[:-left + 1][::-1]            # sites 0, -1, .. left
    sr = np.concatenate([np.cumsum(pr[::-1])[::-1], [0.0]])
    sl = np.concatenate([np.cumsum(pl[::-1])[::-1], [0.0]])
    r = sr[np.minimum(N, right + 1)]
    l_ = sl[np.minimum(N, -left + 1)]
    if side == "right":
        return r
    if side == "left":
        return l_
    return r + l_ - np.where(N == 0, p[-left], 0.0)


def outside_error(psi, P):
    """Certified additive uncertainty of outside probabilities ``P``.

    With ||psi - psi_exact||^2 <= b (the truncation bound), the tail norms
    differ by at most sqrt(b), so |P - P_exact| <= 2 sqrt(b P) + b.
    """
    b = psi.truncation_bound
    return 2.0 * np.sqrt(b * np.asarray(P, dtype=float)) + b


def moment(psi, p):
    """sum_n |n|^p |psi(n)|^2 over the window (see ``moment_bound``)."""
    if not p > 0:
        raise ValueError("p must be > 0")
    n = np.abs(psi.sites).astype(float)
    val = float(np.sum(n ** p * psi.probabilities))
    return val


def moment_bound(psi, p):
    """Additive uncertainty of ``moment``.

    The missing mass sits within the expansion's light cone, taken as the
    window radius, so it adds at most truncation_bound * R^p.
    """
    R = max(-psi.window.left, psi.window.right, 1)
    return psi.truncation_bound * float(R) ** p


# ---------------------------------------------------------------------------
# exponential time averages


def averaging_grid(T, dt0=0.25, horizon=20.0, dt_max=None):
    """Time grid on [0, horizon*T] for the weight (2/T) e^{-2t/T}.

    Spacing starts at ``dt0`` and grows like e^{t/(2T)}, so the weight per
    interval falls off while early oscillations stay resolved.  Steps are
    capped at ``dt_max`` (default T/4) so late, slowly rising tails stay
    sampled too.
    """
    if not T > 0:
        raise ValueError("T must be > 0")
    t_end = horizon * T
    dt_max = 0.25 * T if dt_max is None else float(dt_max)
    # t(s) solves dt/ds = dt0 e^{t/(2T)}: t = -2T ln(1 - s dt0 / (2T))
    s_end = (2.0 * T / dt0) * (1.0 - math.exp(-t_end / (2.0 * T)))
    n = int(math.ceil(s_end))
    s = np.linspace(0.0, s_end, n + 1)
    t = -2.0 * T * np.log1p(-s * dt0 / (2.0 * T))
    t[-1] = t_end
    cut = int(np.searchsorted(np.diff(t), dt_max))
    if cut < t.size - 1:
        start = t[cut]
        m = int(math.ceil((t_end - start) / dt_max))
        t = np.concatenate([t[:cut], np.linspace(start, t_end, m + 1)])
    return t


def merged_grid(T_values, dt0=0.25, horizon=20.0):
    """Union of averaging grids, rounded to 1e-9 to merge near duplicates."""
    grids = [averaging_grid(T, dt0, horizon) for T in T_values]
    return np.unique(np.round(np.concatenate(grids), 9))


def horizon_for(floor, minimum=20.0):
    """Horizon h (in units of T) with e^{-2h}(1 + 2h) below ``floor``."""
    h = float(minimum)
    while math.exp(-2.0 * h) * (1.0 + 2.0 * h) > floor:
        h += 1.0
    return h


@dataclass(frozen=True)
class AverageResult:
    value: float
    error: float
    tail_bound: float


_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


def _interp_nodes(t, T):
    """Gauss-Legendre nodes per interval with cubic Lagrange factors.

    Returns the sample indices (n-1, 4), the Lagrange values (n-1, 8, 4) at
    the nodes and the weighted node masses (n-1, 8).
    """
    n = t.size
    i = np.arange(n - 1)
    s = np.clip(i - 1, 0, n - 4)
    idx = s[:, None] + np.arange(4)[None, :]
    tj = t[idx]                                           # (n-1, 4)
    a, b = t[:-1], t[1:]
    x = 0.5 * (b - a)[:, None] * _GL_X[None, :] + 0.5 * (a + b)[:, None]
    g = (2.0 / T) * np.exp(-2.0 * x / T) * (0.5 * (b - a))[:, None] * _GL_W[None, :]
    lag = np.empty(x.shape + (4,))
    for j in range(4):
        lj = np.ones_like(x)
        for m in range(4):
            if m != j:
                lj *= (x - tj[:, m:m + 1]) / (tj[:, j:j + 1] - tj[:, m:m + 1])
        lag[..., j] = lj
    return idx, lag, g


def _product_weights(t, T):
    """Weights w_i with sum_i w_i f(t_i) ~ (2/T) int e^{-2t/T} f(t) dt.

    Local cubic interpolation through four neighbouring samples, integrated
    against the exact exponential weight by 8-point Gauss-Legendre.
    """
    n = t.size
    w = np.zeros(n)
    if n < 4:
        # trapezoid fallback
        for i in range(n - 1):
            a, b = t[i], t[i + 1]
            x = 0.5 * (b - a) * _GL_X + 0.5 * (a + b)
            g = (2.0 / T) * np.exp(-2.0 * x / T) * 0.5 * (b - a) * _GL_W
            w[i] += np.sum(g * (b - x) / (b - a))
            w[i + 1] += np.sum(g * (x - a) / (b - a))
        return w
    idx, lag, g = _interp_nodes(t, T)
    for j in range(4):
        np.add.at(w, idx[:, j], np.sum(g * lag[..., j], axis=1))
    return w


_LOG_TINY = math.log(np.finfo(float).tiny)


def _log_average(t, f, T):
    """Same rule with the cubic interpolation done on log f.

    Suited to positive samples spanning many orders of magnitude (tails of
    a spreading packet).  The interpolant is clamped to the range of its
    four samples, so zeros (stored as the smallest normal log) cannot
    produce overshoot.
    """
    logf = np.log(np.maximum(f, np.finfo(float).tiny))
    idx, lag, g = _interp_nodes(t, T)
    lf = logf[idx]                                        # (n-1, 4)
    y = np.einsum("inj,ij->in", lag, lf)
    y = np.clip(y, lf.min(axis=1)[:, None], lf.max(axis=1)[:, None])
    vals = np.where(y <= _LOG_TINY, 0.0, np.exp(y))
    return float(np.sum(g * vals))


def time_average(samples, times, T, rtol=1e-6, sup_bound=None, log_interp=None):
    """Exponential average (2/T) int_0^inf e^{-2t/T} f(t) dt from samples.

    ``times`` must start at 0 and reach at least 20 T.  The error estimate is
    the difference to the same rule on every other sample; the part beyond
    the last sample is bounded by e^{-2 t_end / T} sup|f|.

    Parameters
    ----------
    log_interp : bool, optional
        Interpolate log f instead of f.  By default this is used for
        nonnegative samples whose positive values span more than six
        decades.

    Raises
    ------
    GridTooCoarse
        If the error estimate exceeds ``rtol`` relative (absolute when the
        value is below 1e-300).
    """
    t = np.asarray(times, dtype=float)
    f = np.asarray(samples, dtype=float)
    if not T > 0:
        raise ValueError("T must be > 0")
    if t.size != f.size or t.size < 2:
        raise ValueError("need matching samples and times (at least 2)")
    if t[0] != 0 or t[-1] < 20.0 * T * (1 - 1e-12):
        raise GridTooCoarse("time grid must cover [0, 20 T]")
    if log_interp is None:
        pos = f[f > 0]
        log_interp = bool(t.size >= 8 and np.all(f >= 0) and pos.size
                          and pos.max() > 1e6 * pos.min())
    half = np.arange(0, t.size, 2)
    if half[-1] != t.size - 1:
        half = np.append(half, t.size - 1)
    if log_interp:
        val = _log_average(t, f, T)
        coarse = _log_average(t[half], f[half], T)
    else:
        val = float(np.dot(_product_weights(t, T), f))
        coarse = float(np.dot(_product_weights(t[half], T), f[half]))
    sup = float(np.max(np.abs(f))) if sup_bound is None else float(sup_bound)
    tail = math.exp(-2.0 * t[-1] / T) * sup * (1.0 + 2.0 * t[-1] / T)
    err = abs(val - coarse)
    scale = abs(val) if abs(val) > 1e-300 else 1.0
    if err > rtol * scale:
        raise GridTooCoarse(f"time-average error estimate {err:.3g} exceeds rtol={rtol:g}")
    return AverageResult(val, err, tail)


# ---------------------------------------------------------------------------
# resolvents


@dataclass(frozen=True, eq=False)
class ResolventVector:
    """u(n) = <(H - z)^{-1} delta_0, delta_n> for |n| <= radius."""

    z: complex
    window: LatticeWindow
    residual: float
    padding: int


def _padding(z, spec, tol):
    K = spectral_bound(spec)
    eta = abs(z.imag)
    if eta > 0:
        return int(math.ceil((2.0 * K / eta) * math.log(1.0 / tol)))
    reach = 2.0 + spec.sup_norm
    d = max(z.real - reach, -reach - z.real)
    if not d > 0:
        raise ValueError("real z must lie outside [-2 - sup|V|, 2 + sup|V|]")
    rate = math.acosh(1.0 + d / 4.0)
    return int(math.ceil(math.log(1.0 / tol) / rate)) + 1


def resolvent_vector(z, spec, radius, tol=1e-12, box_cap=DEFAULT_BOX_CAP):
    """Solve (H - z) u = delta_0 on [-(radius + pad), radius + pad], Dirichlet outside.

    The padding makes the boundary's influence at |n| <= radius smaller
    than ``tol``: (2K / Im z) ln(1/tol) sites for Im z > 0, and the
    Combes-Thomas rate arccosh(1 + d/4) at distance d from the spectrum
    for real z.
    """
    z = complex(z)
    if radius < 0:
        raise ValueError("radius must be >= 0")
    pad = _padding(z, spec, tol)
    R = radius + pad
    if 2 * R + 1 > box_cap:
        raise BoxCapExceeded(f"box of {2 * R + 1} sites exceeds the cap {box_cap}")
    sites = np.arange(-R, R + 1)
    diag = potential_array(spec, sites) - z
    ab = np.zeros((3, sites.size), dtype=complex)
    ab[0, 1:] = 1.0
    ab[1] = diag
    ab[2, :-1] = 1.0
    rhs = np.zeros(sites.size, dtype=complex)
    rhs[R] = 1.0
    u = solve_banded((1, 1), ab, rhs)
    res = diag * u
    res[1:] += u[:-1]
    res[:-1] += u[1:]
    res -= rhs
    inner = slice(pad, pad + 2 * radius + 1)
    residual = float(np.linalg.norm(res[inner]))
    return ResolventVector(z, LatticeWindow(-radius, u[inner]), residual, pad)


def tail_sums(E, eta, N, spec, side="right", tol=1e-10):
    """sum_{n >= N} |u(n; E + i eta)|^2 (or n <= -N on the left), vectorized in E.

    The half-line beyond the origin is handled by the backward continued
    fraction on [1, N + pad]; pad follows the same rule as resolvent_vector.
    """
    E = np.asarray(E, dtype=float)
    z = E + 1j * eta
    pad = _padding(complex(0.0, eta), spec, tol)
    L = max(N, 1) + pad
    v0 = potential_array(spec, np.array([0]))[0]
    rho_r, W_r = _ratios_last(spec, z, L, +1, N)
    rho_l, W_l = _ratios_last(spec, z, L, -1, N)
    u0 = 1.0 / (v0 - z + rho_r[0] + rho_l[0])
    if side == "right":
        prod, W = rho_r[1], W_r
    else:
        prod, W = rho_l[1], W_l
    if N == 0:
        return np.abs(u0) ** 2 * W
    return np.abs(u0) ** 2 * prod * W


def _ratios_last(spec, z, L, direction, N):
    """rho(1), prod_{n=1}^{N} |rho(n)|^2 and W(N) without storing the sweep."""
    sites = np.arange(1, L + 1) * direction
    v = potential_array(spec, sites)
    r = np.zeros(z.shape, dtype=complex)
    w = np.ones(z.shape)
    prod = np.ones(z.shape)
    w_at_N = np.ones(z.shape)
    for i in range(L - 1, -1, -1):
        # i indexes site n = i + 1; r becomes rho(n), w becomes W(n)
        if i < L - 1:
            w = 1.0 + np.abs(r) ** 2 * w
        r = -1.0 / (v[i] - z + r)
        n = i + 1
        if n == N:
            w_at_N = w.copy()
        if n <= N:
            prod *= np.abs(r) ** 2
    if N == 0:
        w_at_N = 1.0 + np.abs(r) ** 2 * w
    return (r, prod), w_at_N


def neumann_tail_bound(N, E_cut, spec):
    """Bound on int_{|E| > E_cut} sum_{n >= N} |u(n; E + i eta)|^2 dE.

    For |z| > ||H|| the Neumann series gives |u(n)| <= q^n / (|z| - ||H||)
    with q = ||H|| / |z|, and ||H|| <= 2 + sup|V|.
    """
    h = 2.0 + spec.sup_norm
    if E_cut <= h:
        return math.inf

    def g(E):
        q = h / E
        return q ** (2 * N) / ((1.0 - q * q) * (E - h) ** 2)

    # g decreases; bound the integral by a geometric sum of panels
    total = 0.0
    a = E_cut
    while True:
        b = 2.0 * a
        piece = g(a) * (b - a)
        total += piece
        if piece < 1e-18 * max(total, 1e-300) or b > 1e12:
            break
        a = b
    return 2.0 * total


@dataclass(frozen=True)
class ParsevalResult:
    value: float
    error: float
    tail_bound: float
    e_range: float
    n_eval: int


def energy_integral(N, eta, spec, side, e_lo, e_hi, rtol=1e-6, pad_tol=1e-10):
    """int_{e_lo}^{e_hi} tail_sums(E, eta, N) dE by adaptive quadrature."""
    initial = max(1, int(math.ceil((e_hi - e_lo) / (4.0 * eta))))

    def f(E):
        return tail_sums(E, eta, N, spec, side, pad_tol)

    return integrate(f, e_lo, e_hi, rtol=rtol, initial=initial)


def parseval_average(N, T, spec, side="right", quad_tol=1e-6, pad_tol=1e-10,
                     tail_tol=1e-9):
    """<P_r(N, .)>(T) (or P_l) as (1/(pi T)) int |resolvent tail|^2 dE at Im z = 1/T.

    The energy range [-K-2, K+2] is widened until the Neumann-series bound
    on the omitted tails drops below ``tail_tol`` times pi T.
    """
    if not T > 0 or N < 1:
        raise ValueError("need T > 0 and N >= 1")
    K = spectral_bound(spec)
    eta = 1.0 / T
    e_cut = K + 2.0
    tail = neumann_tail_bound(N, e_cut, spec)
    while tail > tail_tol * math.pi * T and e_cut < 1e6:
        e_cut *= 2.0
        tail = neumann_tail_bound(N, e_cut, spec)
    core = energy_integral(N, eta, spec, side, -K - 2.0, K + 2.0, quad_tol, pad_tol)
    value, err, n_eval = core.value, core.error, core.n_eval
    if e_cut > K + 2.0:
        for lo, hi in ((-e_cut, -K - 2.0), (K + 2.0, e_cut)):
            r = energy_integral(N, eta, spec, side, lo, hi, quad_tol, pad_tol)
            value += r.value
            err += r.error
            n_eval += r.n_eval
    scale = 1.0 / (math.pi * T)
    return ParsevalResult(value * scale, err * scale, tail * scale, e_cut, n_eval)
