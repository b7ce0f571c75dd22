"""The generating function of a node sequence and diagnostics built on it.

The generating function is the entire function vanishing exactly on the
nodes, realized as the symmetric product over the window.  This module
wraps the evaluation engine with the public surface: point values, node
derivatives, the normalized weight ``F(x) = |S(x)| / dist(x, Lambda)``,
asymptotic exponent fits, and the lower-bound and growth diagnostics used
by the criteria battery.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import nodes as _nodes
from ._engine import ProductCore, OverflowReported
from ._tails import build_tail

__all__ = [
    "Exponents",
    "GeneratingFunction",
    "build_generating_function",
    "WeightExponentFit",
    "fit_weight_exponent",
    "RatioStats",
    "comparability_stats",
    "modulus_margin",
    "GrowthDiagnostics",
    "growth_diagnostics",
    "OverflowReported",
]

# Generic abscissas, safely away from every perturbed-lattice node, where
# window convergence is probed.
_PROBE_POINTS = np.array(
    [0.437, 1.618, 2.718, 3.303, 4.669, 5.567, 6.854, 8.243]
)

_ENGINE_MIN_BATCH = 256


@dataclass(frozen=True)
class Exponents:
    """An integrability exponent p with its conjugate q and max(p, q)."""

    p: float

    def __post_init__(self):
        if not (1.0 < self.p < np.inf):
            raise ValueError("p must satisfy 1 < p < inf")

    @property
    def q(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def p_prime(self) -> float:
        return max(self.p, self.q)


def as_exponents(p) -> Exponents:
    return p if isinstance(p, Exponents) else Exponents(float(p))


class GeneratingFunction:
    """Evaluator for the product, its node derivatives and the weight F.

    Instances are immutable apart from an internal derivative cache and are
    safe to call concurrently.  Build through
    :func:`build_generating_function`.
    """

    def __init__(self, seq, core: ProductCore, tol_rel: float,
                 convergence_probe: float | None):
        self.seq = seq
        self._core = core
        self.tol_rel = tol_rel
        self.separation = _nodes.separation(seq) if len(seq) > 1 else np.inf
        self.tau_switch = self.separation / 4.0
        self.convergence_probe = convergence_probe
        self.tail_compensated = core.tail is not None
        self.pairing_plan = core.pairing_plan()
        self._sprime_cache: dict[int, complex] = {}

    # -- S ----------------------------------------------------------------

    def value(self, z):
        """Product value S(z); accepts scalars or arrays."""
        scalar = np.isscalar(z) or np.asarray(z).ndim == 0
        zz = np.atleast_1d(np.asarray(z))
        real_input = (not np.iscomplexobj(zz)) or bool(np.all(zz.imag == 0))
        if (self._core.fast_ok and zz.size >= _ENGINE_MIN_BATCH
                and real_input):
            x = zz.real.astype(float)
            order = np.argsort(x, kind="stable")
            L, _, _ = self._core.logabs_real(x[order])
            if np.any(L > 709.0):
                raise OverflowReported("product magnitude exceeds the "
                                       "floating range on this grid")
            vals = np.empty(x.size, dtype=np.complex128)
            vals[order] = self._core.sign_real(x[order]) * np.exp(L)
        else:
            vals = self._core.eval_points(zz.astype(np.complex128))
        return complex(vals[0]) if scalar else vals.reshape(np.shape(z))

    # -- S' at nodes --------------------------------------------------------

    def node_derivative(self, k: int) -> complex:
        """Derivative of the product at node k (cached)."""
        return self.node_derivatives([k])[0]

    def node_derivatives(self, ks) -> np.ndarray:
        ks = [int(k) for k in ks]
        missing = [k for k in ks if k not in self._sprime_cache]
        if missing:
            sel = self.seq.array_offset(np.asarray(missing))
            if self._core.fast_ok and len(missing) >= _ENGINE_MIN_BATCH:
                vals = self._core.sprime_signed_bulk(sel).astype(complex)
            else:
                vals = self._core.sprime_points(sel)
            if np.any(vals == 0):
                raise ValueError("vanishing node derivative: multiple zero")
            for k, v in zip(missing, vals):
                self._sprime_cache[k] = complex(v)
        return np.array([self._sprime_cache[k] for k in ks])

    def node_derivative_logabs(self, ks) -> np.ndarray:
        """log|derivative| for bulk index arrays (unsigned fast path)."""
        ks = np.asarray(ks)
        sel = self.seq.array_offset(ks)
        if self._core.fast_ok and ks.size >= _ENGINE_MIN_BATCH:
            return self._core.logabs_sprime(sel)
        vals = self._core.sprime_points(sel)
        return np.log(np.abs(vals))

    # -- F ------------------------------------------------------------------

    def weight(self, x):
        """F(x) = |S(x)|/dist(x, Lambda), stabilized near real nodes.

        Within ``tau_switch`` of a real node the factor of that node is
        cancelled analytically, so the value stays finite and positive and
        equals |S'| exactly at the node.
        """
        scalar = np.isscalar(x) or np.asarray(x).ndim == 0
        xx = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        order = np.argsort(xx, kind="stable")
        xs = xx[order]
        core = self._core
        if core.fast_ok and xs.size >= _ENGINE_MIN_BATCH:
            L, dist, near = core.logabs_real(xs)
        else:
            L, dist, near = core._logabs_pointwise(xs)
        switch = (dist < self.tau_switch) & (core.pos[near].imag == 0)
        F = np.empty(xs.size)
        keep = ~switch
        F[keep] = np.exp(L[keep]) / dist[keep]
        if np.any(switch):
            sub = xs[switch]
            exc = near[switch]
            if core.fast_ok and xs.size >= _ENGINE_MIN_BATCH:
                Lx, _, _ = core.logabs_real(sub, exclude=exc)
            else:
                vx = core.eval_points(sub.astype(np.complex128), exclude=exc)
                Lx = np.log(np.abs(vx))
            F[switch] = np.exp(Lx - core.lognorm[exc])
        out = np.empty_like(F)
        out[order] = F
        return float(out[0]) if scalar else out.reshape(np.shape(x))


def build_generating_function(seq, tol_rel: float = 1e-3,
                              compensate: bool | None = None,
                              probe: bool = True) -> GeneratingFunction:
    """Build the product evaluator for a node sequence.

    Parameters
    ----------
    seq : NodeSequence
        Nonempty sequence with positive separation.
    tol_rel : float
        Relative tolerance for the window-convergence probe.
    compensate : bool, optional
        Add the far-tail series for the omitted pattern factors.  Defaults
        to on for generated families and off for loaded sequences (whose
        continuation is unknown).
    probe : bool
        Record the relative change of S at fixed probe points when the
        window is halved (a convergence diagnostic for the limit product).
    """
    if len(seq) > 1 and _nodes.separation(seq) <= 0.0:
        raise ValueError("zero separation: duplicate node positions")
    fam = seq.family
    if compensate is None:
        compensate = fam is not None and fam.kind != "file"
    tail = None
    if compensate:
        if fam is None or fam.kind == "file":
            raise ValueError("tail compensation needs a generated family")
        tail = build_tail(fam.kind, fam.d, seq.half_width)
    core = ProductCore(seq, tail)
    conv = None
    if probe and seq.half_width >= 4:
        half = seq.restrict(seq.half_width // 2)
        tail_h = (build_tail(fam.kind, fam.d, half.half_width)
                  if compensate else None)
        core_h = ProductCore(half, tail_h)
        span = min(_PROBE_POINTS[-1], seq.half_width / 4)
        pts = (_PROBE_POINTS * span / _PROBE_POINTS[-1]).astype(complex)
        full_v = core.eval_points(pts)
        half_v = core_h.eval_points(pts)
        scale = np.maximum(np.abs(full_v), 1e-300)
        conv = float(np.max(np.abs(full_v - half_v) / scale))
    return GeneratingFunction(seq, core, tol_rel, conv)


@dataclass(frozen=True)
class WeightExponentFit:
    slope: float
    r2: float


def _linear_fit(t, y):
    A = np.vstack([t, np.ones_like(t)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ coef
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum((y - pred) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), float(coef[1]), r2


def fit_weight_exponent(gf: GeneratingFunction, x_min: float, x_max: float,
                        n_pts: int = 25,
                        window_samples: int = 32) -> WeightExponentFit:
    """Least-squares slope of log(mean F) against log x.

    F is averaged over one unit-length window around each sample point to
    quench the dist(x, Lambda) oscillation before fitting.
    """
    K = gf.seq.half_width
    if not (1.0 <= x_min < x_max <= K / 10.0):
        raise ValueError("fit range must satisfy 1 <= x_min < x_max <= K/10")
    xs = np.geomspace(x_min, x_max, n_pts)
    sub = (np.arange(window_samples) + 0.5) / window_samples - 0.5
    pts = (xs[:, None] + sub[None, :]).ravel()
    F = gf.weight(pts).reshape(n_pts, window_samples)
    fbar = F.mean(axis=1)
    if np.ptp(fbar) == 0.0:
        raise ValueError("degenerate fit: averaged weight is constant")
    slope, _, r2 = _linear_fit(np.log(xs), np.log(fbar))
    return WeightExponentFit(slope=slope, r2=r2)


@dataclass(frozen=True)
class RatioStats:
    min: float
    max: float
    spread: float


def comparability_stats(gf: GeneratingFunction, anchors,
                        x_grid) -> RatioStats:
    """Interpolated-derivative to weight ratio over a grid.

    For x bracketed by consecutive anchors g_j, g_{j+1} the ratio is

        rho(x) = |S'(g_j)|^a |S'(g_{j+1})|^(1-a) / F(x),

    with a = x_{j+1}/(x_j + x_{j+1}), x_j = x - Re g_j and
    x_{j+1} = Re g_{j+1} - x.  Uniform comparability shows as a bounded
    spread max/min over the grid.
    """
    avals = np.asarray(getattr(anchors, "anchors", anchors),
                       dtype=np.complex128)
    kidx = getattr(anchors, "node_indices", None)
    if kidx is None:
        off = np.argmin(np.abs(avals[:, None] - gf.seq.positions[None, :]),
                        axis=1)
        kidx = gf.seq.indices[off]
    kidx = np.asarray(kidx)
    order = np.argsort(avals.real, kind="stable")
    avals = avals[order]
    ks = kidx[order]
    re = avals.real
    x = np.asarray(x_grid, dtype=float).ravel()
    if np.any(x < re[0]) or np.any(x > re[-1]):
        raise ValueError("grid point outside the anchor span")
    j = np.clip(np.searchsorted(re, x, side="right") - 1, 0, re.size - 2)
    xj = x - re[j]
    xj1 = re[j + 1] - x
    alpha = xj1 / (xj + xj1)
    logd = gf.node_derivative_logabs(ks)
    F = gf.weight(x)
    log_rho = alpha * logd[j] + (1 - alpha) * logd[j + 1] - np.log(F)
    rho = np.exp(log_rho)
    lo, hi = float(rho.min()), float(rho.max())
    return RatioStats(min=lo, max=hi, spread=hi / lo)


def modulus_margin(gf: GeneratingFunction, p, eps: float,
                   samples) -> np.ndarray:
    """Normalized lower-bound margins |S(z)| (1+|z|)^(1/p) e^(-pi |Im z|).

    Samples must be admissible: dist(z, Lambda) > eps (1 + |Im z|).  The
    diagnostic passes when the minimum stays bounded away from zero.
    """
    p = as_exponents(p)
    z = np.asarray(samples, dtype=np.complex128).ravel()
    pos = gf.seq.positions
    dist = np.empty(z.size)
    chunk = 2048
    for c0 in range(0, z.size, chunk):
        c1 = min(c0 + chunk, z.size)
        dist[c0:c1] = np.min(np.abs(z[c0:c1, None] - pos[None, :]), axis=1)
    bad = dist <= eps * (1.0 + np.abs(z.imag))
    if np.any(bad):
        raise ValueError(
            f"{np.count_nonzero(bad)} samples violate the admissibility "
            "condition dist(z, nodes) > eps (1 + |Im z|)"
        )
    vals = gf._core.eval_points(z)
    with np.errstate(divide="ignore"):
        logm = (np.log(np.abs(vals)) + np.log1p(np.abs(z)) / p.p
                - np.pi * np.abs(z.imag))
    return np.exp(logm)


@dataclass(frozen=True)
class GrowthDiagnostics:
    """Partial integrals of F^p, raw and damped by (1 + |x|^p)."""

    X: np.ndarray
    raw: np.ndarray      # integral of F^p over [-X, X]
    damped: np.ndarray   # integral of F^p / (1 + |x|^p) over [-X, X]
    raw_growing: bool
    damped_stable: bool


def growth_diagnostics(gf: GeneratingFunction, p, X_list,
                       quad_step: float | None = None,
                       stable_rel: float = 0.05) -> GrowthDiagnostics:
    """Composite-midpoint partial integrals of the weight's p-th power.

    For a sequence with interpolation-grade weight the raw integral keeps
    growing while the damped one stabilizes; a stalling raw column flags a
    fast-decaying weight instead.
    """
    p = as_exponents(p)
    X = np.sort(np.asarray(X_list, dtype=float))
    if quad_step is None:
        quad_step = min(gf.separation / 8.0, 0.125)
    h = quad_step
    n = int(np.ceil(X[-1] / h))
    xg = (np.arange(n) + 0.5) * h
    F = gf.weight(xg)
    Fm = gf.weight(-xg)
    vp = F ** p.p + Fm ** p.p
    cs_raw = np.cumsum(vp) * h
    cs_damp = np.cumsum((F ** p.p + Fm ** p.p) / (1 + xg ** p.p)) * h
    idx = np.minimum(np.round(X / h).astype(int) - 1, n - 1)
    raw = cs_raw[idx]
    damped = cs_damp[idx]
    raw_growing = bool(raw[-1] > raw[-2] * (1 + stable_rel))
    damped_stable = bool(
        (damped[-1] - damped[-2]) <= stable_rel * damped[-1]
    )
    return GrowthDiagnostics(X=X, raw=raw, damped=damped,
                             raw_growing=raw_growing,
                             damped_stable=damped_stable)
