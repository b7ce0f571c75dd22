"""Interpolation-grade criteria and the three-valued verdict engine.

The battery: separation, the Carleson-type pair sum, relative density,
window convergence, and the Muckenhoupt condition for the weight F^p in
both its discrete (index-block) and continuous (interval) forms.  A finite
computation can neither prove a supremum finite nor infinite, so the
verdict is PASS / FAIL / INCONCLUSIVE: FAIL only on clean divergence
evidence, PASS only when every quotient stabilizes under window doubling.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import nodes as _nodes
from .genfn import GeneratingFunction, as_exponents, _linear_fit

__all__ = [
    "WeightSequence",
    "IntervalFamily",
    "AnchorSelection",
    "CarlesonResult",
    "carleson_sum",
    "DiscreteApResult",
    "discrete_ap",
    "ContinuousApResult",
    "continuous_ap",
    "SelectionError",
    "BracketingError",
    "select_subsequence",
    "select_probe_points",
    "Thresholds",
    "CriteriaReport",
    "full_verdict",
]


class SelectionError(ValueError):
    """A selection square contains no node."""


class BracketingError(RuntimeError):
    """Circle bisection could not bracket the target modulus."""


@dataclass(frozen=True)
class WeightSequence:
    """Strictly positive finite weights indexed like a subsequence."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("weights must form a nonempty vector")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise ValueError("weights must be finite and positive")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return int(self.values.size)


def _as_weights(w) -> np.ndarray:
    if isinstance(w, WeightSequence):
        return w.values
    return WeightSequence(np.asarray(w, dtype=float)).values


@dataclass(frozen=True)
class IntervalFamily:
    """Dyadic interval sweep inside [-x_max, x_max].

    Level m holds intervals of length 2**m whose centers advance by
    ``stride`` times the length; the two origin-anchored intervals
    [0, 2**m] and [-2**m, 0] are always included, since power-type weights
    are extremal there.
    """

    x_max: float
    m_min: int = 5
    m_max: int = 13
    stride: float = 0.5

    def __post_init__(self):
        if self.m_min > self.m_max:
            raise ValueError("m_min must not exceed m_max")
        if 2.0 ** self.m_max > self.x_max:
            raise ValueError("largest interval exceeds x_max")
        if self.stride <= 0:
            raise ValueError("stride must be positive")


@dataclass(frozen=True)
class AnchorSelection:
    """A relatively dense subsequence with optional circle probe points.

    ``anchors[i]`` is the node chosen in the square of half-side r centered
    at 4*r*j_values[i]; ``probes[i]``, when set, lies on the circle of
    radius eps around it.
    """

    j_values: np.ndarray
    node_indices: np.ndarray
    anchors: np.ndarray
    r: float
    eps: float | None = None
    probes: np.ndarray | None = None


# ---------------------------------------------------------------------------
# Carleson-type pair sum


@dataclass(frozen=True)
class CarlesonResult:
    sup: float
    argmax_index: int
    tail_bound: float


def carleson_sum(seq, max_probes: int = 512) -> CarlesonResult:
    """sup_j of sum_k (1+|eta_j|)(1+|eta_k|)/|lambda_j-lambda_k|^2.

    Rows j are probed over the inner half of the window (subsampled past
    ``max_probes``, ends and center always included); the out-of-window
    remainder is bounded by 2 (1+|eta_j|) max_k(1+|eta_k|) / gap and
    reported separately.
    """
    if len(seq) < 2:
        raise ValueError("need at least two nodes")
    if _nodes.separation(seq) <= 0:
        raise ValueError("coincident nodes")
    pos = seq.positions
    eta = np.abs(pos.imag)
    xi = pos.real
    n = pos.size
    inner = np.flatnonzero(
        (np.arange(n) >= n // 4) & (np.arange(n) < n - n // 4)
    )
    if inner.size > max_probes:
        take = np.unique(np.concatenate([
            inner[:: max(1, inner.size // max_probes)],
            [inner[0], inner[inner.size // 2], inner[-1]],
        ]))
    else:
        take = inner
    facs = 1.0 + eta
    maxfac = float(facs.max())
    lo, hi = seq.real_span()
    best, best_at, best_tail = -np.inf, 0, 0.0
    chunk = max(1, int(4e6 // n))
    for c0 in range(0, take.size, chunk):
        rows = take[c0:c0 + chunk]
        d2 = np.abs(pos[rows, None] - pos[None, :]) ** 2
        d2[np.arange(rows.size), rows] = np.inf
        sums = facs[rows] * np.sum(facs[None, :] / d2, axis=1)
        i = int(np.argmax(sums))
        if sums[i] > best:
            best = float(sums[i])
            best_at = int(rows[i])
            gap = max(min(xi[best_at] - lo, hi - xi[best_at]), 1.0)
            best_tail = 2.0 * facs[best_at] * maxfac / gap
    return CarlesonResult(sup=best, argmax_index=int(seq.indices[best_at]),
                          tail_bound=best_tail)


# ---------------------------------------------------------------------------
# Discrete Muckenhoupt condition


@dataclass(frozen=True)
class DiscreteApResult:
    sup: float
    slope: float       # growth of the per-length max against log n
    r2: float
    lengths: np.ndarray
    level_max: np.ndarray


def discrete_ap(w, p, n_max: int, fit_min_length: int = 8) -> DiscreteApResult:
    """Two-average quotient of a weight sequence over index blocks.

    Computes sup over offsets k and lengths n <= n_max of

        (mean of w over the block) (mean of w^(-1/(p-1)))^(p-1)

    and regresses the per-length maximum against log n; a positive trend is
    the unboundedness detector.
    """
    p = as_exponents(p)
    w = _as_weights(w)
    if w.size < 2 * n_max:
        raise ValueError("window length must be at least 2 n_max")
    dual = w ** (-1.0 / (p.p - 1.0))
    cw = np.concatenate([[0.0], np.cumsum(w)])
    cd = np.concatenate([[0.0], np.cumsum(dual)])
    lengths = np.arange(1, n_max + 1)
    level_max = np.empty(lengths.size)
    sup = -np.inf
    for i, n in enumerate(lengths):
        aw = (cw[n:] - cw[:-n]) / n
        ad = (cd[n:] - cd[:-n]) / n
        q = aw * ad ** (p.p - 1.0)
        level_max[i] = float(q.max())
        sup = max(sup, level_max[i])
    keep = lengths >= fit_min_length
    if np.count_nonzero(keep) >= 3:
        slope, _, r2 = _linear_fit(np.log(lengths[keep]), level_max[keep])
    else:
        slope, r2 = 0.0, 1.0
    return DiscreteApResult(sup=float(sup), slope=slope, r2=r2,
                            lengths=lengths, level_max=level_max)


# ---------------------------------------------------------------------------
# Continuous Muckenhoupt condition


@dataclass(frozen=True)
class ContinuousApResult:
    sup: float
    lengths: np.ndarray
    level_max: np.ndarray
    level_argmax: np.ndarray
    growth_slope: float        # per-level max against log(1 + length)
    growth_r2: float
    growth_persistence: float  # late increment ratio; ~1 for log divergence
    last_rel_change: float
    ring_ratio: float          # min dyadic ring-mass ratio of v and dual


def continuous_ap(v_sampler, p, fam: IntervalFamily,
                  quad_step: float) -> ContinuousApResult:
    """Interval quotients of a weight v by composite-midpoint quadrature.

    ``v_sampler`` is a vectorized map x -> v(x) > 0 (for the weight battery
    this is F^p).  Every reported quotient is a lower bound for the true
    supremum; the growth statistics over dyadic lengths are the divergence
    detectors.
    """
    p = as_exponents(p)
    s = int(np.ceil(np.log2(1.0 / quad_step)))
    h = 2.0 ** (-s)
    n_half = int(round(fam.x_max / h))
    x = (np.arange(-n_half, n_half) + 0.5) * h
    v = np.asarray(v_sampler(x), dtype=float)
    if v.shape != x.shape or not np.all(np.isfinite(v)) or np.any(v <= 0):
        raise ValueError("weight sampler must return finite positive values")
    dual = v ** (-1.0 / (p.p - 1.0))
    origin = n_half  # sample index of x = 0

    levels = np.arange(fam.m_min, fam.m_max + 1)
    lengths = 2.0 ** levels
    level_max = np.empty(levels.size)
    level_argmax = np.empty(levels.size)
    sup = -np.inf
    for i, m in enumerate(levels):
        L = 2.0 ** m
        nL = int(round(L / h))
        step = max(1, int(round(fam.stride * nL)))
        g = int(np.gcd(step, nL))
        starts = np.arange(0, 2 * n_half - nL + 1, step)
        starts = np.unique(np.concatenate(
            [starts, [origin, origin - nL, 2 * n_half - nL]]
        ))
        starts = np.unique(starts // g * g)
        # interval masses from fresh sums of aligned blocks: weights with
        # huge dynamic range would cancel catastrophically in differences
        # of one global prefix sum
        bounds = np.arange(0, 2 * n_half, g)
        bv = np.add.reduceat(v, bounds) * h
        bd = np.add.reduceat(dual, bounds) * h
        k = nL // g
        rows = starts // g
        aw = np.zeros(starts.size)
        ad = np.zeros(starts.size)
        for off in range(k):
            aw += bv[rows + off]
            ad += bd[rows + off]
        aw /= L
        ad /= L
        q = aw * ad ** (p.p - 1.0)
        if np.any(q < 1.0 - 1e-9):
            raise AssertionError("interval quotient below 1: quadrature bug")
        j = int(np.argmax(q))
        level_max[i] = float(q[j])
        level_argmax[i] = float(x[0] - h / 2 + starts[j] * h + L / 2)
        sup = max(sup, level_max[i])

    if levels.size >= 2:
        slope, _, r2 = _linear_fit(np.log1p(lengths), level_max)
        last_rel = float(abs(level_max[-1] - level_max[-2])
                         / max(abs(level_max[-1]), 1e-300))
    else:
        slope, r2, last_rel = 0.0, 0.0, np.inf
    incr = np.diff(level_max)
    persistence = 0.0
    if incr.size >= 3 and np.all(incr[-3:] > 0):
        persistence = float(
            (incr[-1] / incr[-2] + incr[-2] / incr[-3]) / 2.0
        )

    # Dyadic ring masses: integrand ~ |x|^a gives ring ratio 2^(a+1), so a
    # ratio pinned at 1 puts v or its dual at the non-integrable boundary
    # power of the Muckenhoupt cone.
    ring_ratios = []
    top = int(np.floor(np.log2(fam.x_max)))
    for m in range(top - 3, top - 1):
        for arr in (v, dual):
            def ring(mm):
                i0 = origin + int(round(2.0 ** mm / h))
                i1 = origin + int(round(2.0 ** (mm + 1) / h))
                j0 = origin - int(round(2.0 ** (mm + 1) / h))
                j1 = origin - int(round(2.0 ** mm / h))
                return float(np.sum(arr[i0:i1]) + np.sum(arr[j0:j1]))
            ring_ratios.append(ring(m + 1) / ring(m))
    ratio = float(np.min(np.asarray(ring_ratios).reshape(-1, 2).mean(axis=0)))

    return ContinuousApResult(
        sup=float(sup), lengths=lengths, level_max=level_max,
        level_argmax=level_argmax, growth_slope=slope, growth_r2=r2,
        growth_persistence=persistence, last_rel_change=last_rel,
        ring_ratio=ratio,
    )


# ---------------------------------------------------------------------------
# Subsequence selection


def select_subsequence(seq, r: float, j_max: int | None = None
                       ) -> AnchorSelection:
    """Pick one node from each square Q(4 r j, r) inside the window.

    The node closest to the square's center is chosen; an empty square
    raises :class:`SelectionError` (density violated at scale r).
    """
    if r <= 0:
        raise ValueError("r must be positive")
    lo, hi = seq.real_span()
    jm = int(np.floor((min(hi, -lo) - r) / (4.0 * r)))
    if j_max is not None:
        jm = min(jm, int(j_max))
    if jm < 0:
        raise SelectionError("window too small for any selection square")
    xi = seq.positions.real
    eta = np.abs(seq.positions.imag)
    order = np.argsort(xi, kind="stable")
    xs = xi[order]
    js = np.arange(-jm, jm + 1)
    centers = 4.0 * r * js
    picks = np.empty(js.size, dtype=np.int64)
    for i, c in enumerate(centers):
        a = np.searchsorted(xs, c - r, side="left")
        b = np.searchsorted(xs, c + r, side="right")
        cand = order[a:b]
        cand = cand[eta[cand] <= r]
        if cand.size == 0:
            raise SelectionError(
                f"square at center {c:g} (half-side {r:g}) contains no node"
            )
        picks[i] = cand[np.argmin(np.abs(seq.positions[cand] - c))]
    return AnchorSelection(
        j_values=js, node_indices=seq.indices[picks].copy(),
        anchors=seq.positions[picks].copy(), r=float(r),
    )


def select_probe_points(gf: GeneratingFunction, sel: AnchorSelection,
                        eps: float | None = None,
                        n_scan: int = 64, n_bisect: int = 48
                        ) -> AnchorSelection:
    """Place one probe on each circle |z - anchor| = eps where

        |S(z) / (z - anchor)| = |S'(anchor)|.

    The circle modulus of S(z)/(z - anchor) brackets |S'| between its min
    and max, so a root in arc angle exists; it is located by scanning and
    bisection.  Failure to bracket reports the circle's min and max.
    """
    cap = gf.separation / 10.0
    eps_eff = cap if eps is None else min(float(eps), cap)
    anchors = sel.anchors
    m = anchors.size
    target = np.abs(gf.node_derivatives(sel.node_indices))
    theta = np.linspace(0.0, 2.0 * np.pi, n_scan, endpoint=False)

    def circle_mod(th):
        z = anchors + eps_eff * np.exp(1j * th)
        vals = gf._core.eval_points(z)
        return np.abs(vals) / eps_eff

    mods = np.empty((n_scan, m))
    for i, th in enumerate(theta):
        mods[i] = circle_mod(np.full(m, th))
    diffs = mods - target[None, :]
    lo_th = np.empty(m)
    hi_th = np.empty(m)
    found = np.zeros(m, dtype=bool)
    for i in range(n_scan):
        nxt = (i + 1) % n_scan
        cross = ~found & (diffs[i] <= 0) & (diffs[nxt] >= 0)
        lo_th[cross] = theta[i]
        hi_th[cross] = theta[i] + 2 * np.pi / n_scan
        found |= cross
        cross = ~found & (diffs[i] >= 0) & (diffs[nxt] <= 0)
        lo_th[cross] = theta[i] + 2 * np.pi / n_scan
        hi_th[cross] = theta[i]
        found |= cross
    if not np.all(found):
        bad = int(np.flatnonzero(~found)[0])
        raise BracketingError(
            f"no modulus crossing on circle around anchor {anchors[bad]:g}: "
            f"circle range [{mods[:, bad].min():g}, {mods[:, bad].max():g}], "
            f"target {target[bad]:g}"
        )
    for _ in range(n_bisect):
        mid = 0.5 * (lo_th + hi_th)
        val = circle_mod(mid) - target
        neg = val <= 0
        lo_th[neg] = mid[neg]
        hi_th[~neg] = mid[~neg]
    th = 0.5 * (lo_th + hi_th)
    probes = anchors + eps_eff * np.exp(1j * th)
    return AnchorSelection(
        j_values=sel.j_values, node_indices=sel.node_indices,
        anchors=anchors, r=sel.r, eps=eps_eff, probes=probes,
    )


# ---------------------------------------------------------------------------
# Verdict engine


@dataclass(frozen=True)
class Thresholds:
    """Decision constants for the three-valued verdict (one block so runs
    are reproducible from the report alone)."""

    slope_factor: float = 0.05        # of mean quotient, per e-fold
    r2_min: float = 0.9
    persistence_min: float = 0.93     # late-increment ratio for real growth
    ring_band: float = 0.07           # |ring ratio - 1| <= band at boundary
    stabilize_rel: float = 0.05       # per-doubling change for PASS
    convergence_tol: float = 1e-3


@dataclass(frozen=True)
class CriteriaReport:
    separation: float
    carleson_sup: float
    density_r0: float | None
    convergence_probe: float
    ap_quotients: tuple            # (length, max quotient, center) rows
    ap_sup: float
    growth_slope: float
    growth_r2: float
    verdict: str
    failed_checks: tuple = ()
    ring_ratio: float = float("nan")
    carleson_half: float = float("nan")

    def as_dict(self) -> dict:
        return {
            "separation": self.separation,
            "carleson_sup": self.carleson_sup,
            "density_r0": self.density_r0,
            "convergence_probe": self.convergence_probe,
            "ap_quotients": [list(row) for row in self.ap_quotients],
            "ap_sup": self.ap_sup,
            "growth_slope": self.growth_slope,
            "growth_r2": self.growth_r2,
            "verdict": self.verdict,
            "failed_checks": list(self.failed_checks),
            "ring_ratio": self.ring_ratio,
            "carleson_half": self.carleson_half,
        }


_DENSITY_CANDIDATES = (0.5, 0.6, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0)


def full_verdict(seq, p, gf: GeneratingFunction | None = None,
                 x_max: float | None = None,
                 m_min: int = 5,
                 quad_step: float | None = None,
                 r_candidates=_DENSITY_CANDIDATES,
                 thresholds: Thresholds = Thresholds()) -> CriteriaReport:
    """Run the full battery on a node sequence and fuse the evidence.

    FAIL needs an explicit divergence witness: zero separation, no density
    scale, a statistically clean quotient growth trend, or a ring ratio at
    the boundary power.  PASS needs every statistic stable under doubling.
    Anything else is INCONCLUSIVE.
    """
    from .genfn import build_generating_function

    p = as_exponents(p)
    th = thresholds
    failed = []

    sep = _nodes.separation(seq)
    if sep <= 0:
        return CriteriaReport(
            separation=sep, carleson_sup=np.inf, density_r0=None,
            convergence_probe=np.inf, ap_quotients=(), ap_sup=np.inf,
            growth_slope=np.nan, growth_r2=np.nan, verdict="FAIL",
            failed_checks=("separation",),
        )

    if gf is None:
        gf = build_generating_function(seq)

    car = carleson_sum(seq)
    car_half = carleson_sum(seq.restrict(max(seq.half_width // 2, 1)))
    carleson_stable = (
        abs(car.sup - car_half.sup) <= th.stabilize_rel * abs(car.sup)
    )

    r0 = _nodes.relative_density(seq, r_candidates)
    if r0 is None:
        failed.append("relative_density")

    K = seq.half_width
    if x_max is None:
        if K < 64:
            raise ValueError("window too small for the interval sweep")
        x_max = 2.0 ** min(13, int(np.floor(np.log2(K / 4))))
    if quad_step is None:
        quad_step = sep / 8.0
    m_max = int(np.floor(np.log2(x_max)))
    fam = IntervalFamily(x_max=x_max, m_min=min(m_min, m_max), m_max=m_max)
    ap = continuous_ap(lambda x: gf.weight(x) ** p.p, p, fam, quad_step)

    growth_fires = (
        ap.growth_slope > th.slope_factor * float(np.mean(ap.level_max))
        and ap.growth_r2 >= th.r2_min
        and ap.growth_persistence >= th.persistence_min
    )
    if growth_fires:
        failed.append("ap_growth")
    if abs(ap.ring_ratio - 1.0) <= th.ring_band:
        failed.append("ap_boundary_power")

    conv = gf.convergence_probe if gf.convergence_probe is not None else np.nan

    rows = tuple(
        (float(L), float(q), float(c))
        for L, q, c in zip(ap.lengths, ap.level_max, ap.level_argmax)
    )
    if failed:
        verdict = "FAIL"
    else:
        stable = (
            carleson_stable
            and r0 is not None
            and ap.last_rel_change < th.stabilize_rel
            and (np.isnan(conv) or conv <= th.convergence_tol)
        )
        verdict = "PASS" if stable else "INCONCLUSIVE"
    return CriteriaReport(
        separation=float(sep), carleson_sup=float(car.sup),
        density_r0=r0, convergence_probe=float(conv),
        ap_quotients=rows, ap_sup=float(ap.sup),
        growth_slope=float(ap.growth_slope), growth_r2=float(ap.growth_r2),
        verdict=verdict, failed_checks=tuple(failed),
        ring_ratio=float(ap.ring_ratio), carleson_half=float(car_half.sup),
    )
