"""Vectorized evaluation of windowed node products.

Two complementary paths approximate the symmetric infinite product

    S(z) = prod_k (1 - z/lambda_k)        (factor z for a node at 0):

* a point-wise paired product for arbitrary complex arguments, multiplied
  in symmetric pair order with periodic renormalization so the running
  magnitude never overflows, and
* a bulk real-axis path that splits each evaluation into a directly
  multiplied near window plus a smooth far field, with the far log-sums
  assembled from FFT convolutions of short Taylor moments.

Both paths add the far-tail series of :mod:`pwinterp._tails` when the
sequence carries a generated-family pattern, so values approximate the
infinite product rather than the bare window truncation.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.fft import next_fast_len, rfft, irfft

from ._tails import TailCompensation

# Near/far split parameters.  With a near half-width of 24 index slots the
# far Taylor expansion in u = x - cell_center has ratio < 0.021, so four
# orders leave errors below 1e-8; delta expansions of the far kernels decay
# at least as fast as (0.95/24.5)^j.
_W_NEAR = 24
_J_DELTA = 8
_S_ORD = 4
_SPECIAL_DELTA = 0.95
_PAIR_CHUNK = 32  # 64 factors between renormalizations

_LN2 = math.log(2.0)


class OverflowReported(OverflowError):
    """Product magnitude left the representable range despite scaling."""


class ProductCore:
    """Shared state for evaluating one node sequence's product."""

    def __init__(self, seq, tail: TailCompensation | None):
        self.seq = seq
        self.tail = tail
        pos = seq.positions
        self.pos = pos
        self.zero_mask = pos == 0
        if np.count_nonzero(self.zero_mask) > 1:
            raise ValueError("duplicate node positions at 0")
        inv = np.zeros_like(pos)
        np.divide(1.0, pos, out=inv, where=~self.zero_mask)
        self.inv = inv
        lognorm = np.zeros(pos.size)
        np.log(np.abs(pos), out=lognorm, where=~self.zero_mask)
        self.lognorm = lognorm
        self.total_lognorm = float(lognorm.sum())
        self._build_pairing()
        self._fast_setup()

    # -- pairing ---------------------------------------------------------

    def _build_pairing(self):
        pos = self.pos
        n = pos.size
        offs = np.arange(n)
        positive = offs[pos.real > 0]
        negative = offs[pos.real < 0]
        axis = offs[pos.real == 0]
        positive = positive[np.argsort(-pos.real[positive], kind="stable")]
        negative = negative[np.argsort(pos.real[negative], kind="stable")]
        m = min(positive.size, negative.size)
        pa = list(positive[:m])
        pb = list(negative[:m])
        for leftover in (positive[m:], negative[m:], axis):
            for off in leftover:
                pa.append(off)
                pb.append(-1)
        pa = np.asarray(pa, dtype=np.int64)
        pb = np.asarray(pb, dtype=np.int64)
        moduli = np.abs(pos[pa])
        paired = pb >= 0
        moduli[paired] = np.minimum(moduli[paired], np.abs(pos[pb[paired]]))
        order = np.argsort(moduli, kind="stable")
        self.pair_a = pa[order]
        self.pair_b = pb[order]
        self.n_rows = self.pair_a.size
        row_of = np.empty(n, dtype=np.int64)
        partner = np.full(n, -1, dtype=np.int64)
        row_of[self.pair_a] = np.arange(self.n_rows)
        ok = self.pair_b >= 0
        row_of[self.pair_b[ok]] = np.flatnonzero(ok)
        partner[self.pair_a[ok]] = self.pair_b[ok]
        partner[self.pair_b[ok]] = self.pair_a[ok]
        self.pair_row_of = row_of
        self.partner_of = partner

    def pairing_plan(self):
        """Pair/singleton node-index tuples in multiplication order."""
        idx = self.seq.indices
        plan = []
        for a, b in zip(self.pair_a, self.pair_b):
            if b >= 0:
                plan.append((int(idx[a]), int(idx[b])))
            else:
                plan.append((int(idx[a]),))
        return tuple(plan)

    # -- point-wise path -------------------------------------------------

    def _factor(self, offs, z):
        """(npts, m) factor matrix for node offsets ``offs`` at points z."""
        f = (self.pos[offs][None, :] - z[:, None]) * self.inv[offs][None, :]
        zcols = np.flatnonzero(self.zero_mask[offs])
        if zcols.size:
            f[:, zcols] = z[:, None]
        return f

    def eval_points(self, z, exclude=None):
        """Compensated product at complex points, node ``exclude`` skipped.

        ``exclude`` holds one node array-offset per point (or -1).  Raises
        :class:`OverflowReported` when the final magnitude cannot be
        represented even after the scaled accumulation.
        """
        z = np.asarray(z, dtype=np.complex128).ravel()
        npts = z.size
        mant = np.ones(npts, dtype=np.complex128)
        e2 = np.zeros(npts)
        if exclude is not None:
            exclude = np.asarray(exclude, dtype=np.int64).ravel()
            has_exc = exclude >= 0
            exc_row = np.where(has_exc, self.pair_row_of[exclude], -1)
            part = np.where(has_exc, self.partner_of[exclude], -1)
            repl = np.ones(npts, dtype=np.complex128)
            with_partner = part >= 0
            if np.any(with_partner):
                pp = part[with_partner]
                zz = z[with_partner]
                f = (self.pos[pp] - zz) * self.inv[pp]
                zp = self.zero_mask[pp]
                f[zp] = zz[zp]
                repl[with_partner] = f
        for c0 in range(0, self.n_rows, _PAIR_CHUNK):
            c1 = min(c0 + _PAIR_CHUNK, self.n_rows)
            fa = self._factor(self.pair_a[c0:c1], z)
            bsel = self.pair_b[c0:c1]
            paired = bsel >= 0
            if np.any(paired):
                fa[:, paired] *= self._factor(bsel[paired], z)
            if exclude is not None:
                hit = np.flatnonzero((exc_row >= c0) & (exc_row < c1))
                if hit.size:
                    fa[hit, exc_row[hit] - c0] = repl[hit]
            mant *= np.prod(fa, axis=1)
            mag = np.abs(mant)
            live = mag > 0
            if np.any(live):
                e = np.floor(np.log2(mag[live]))
                mant[live] *= np.exp2(-e)
                e2[live] += e
        logmag = np.full(npts, -np.inf)
        live = mant != 0
        w = e2 * _LN2 + 0j
        if self.tail is not None:
            inside = np.abs(z) <= self.tail.radius
            w = w + np.where(inside, self.tail.log_tail(z), 0.0)
        logmag[live] = np.log(np.abs(mant[live])) + w.real[live]
        if np.any(logmag > 709.0):
            raise OverflowReported(
                "product magnitude exceeds the floating range; "
                "evaluate closer to the window or enlarge it"
            )
        out = np.zeros(npts, dtype=np.complex128)
        out[live] = mant[live] * np.exp(w[live])
        return out

    def sprime_points(self, sel):
        """Signed derivative values at node offsets ``sel`` (point-wise)."""
        sel = np.asarray(sel, dtype=np.int64).ravel()
        base = self.eval_points(self.pos[sel], exclude=sel)
        fp = np.where(self.zero_mask[sel], 1.0 + 0j, -self.inv[sel])
        return base * fp

    # -- bulk real-axis path ---------------------------------------------

    def _fast_setup(self):
        self.fast_ok = False
        seq = self.seq
        if not seq.is_real or not seq.index_contiguous:
            return
        K = seq.half_width
        delta = self.pos.real - seq.indices
        if np.max(np.abs(delta)) > 1.5:
            return
        regular = np.abs(delta) <= _SPECIAL_DELTA
        if np.count_nonzero(~regular) > 64:
            return
        self.fast_ok = True
        self.K = K
        self.delta = delta
        self.regular = regular
        self.special_offs = np.flatnonzero(~regular)
        self._sorted_real = np.sort(self.pos.real)
        nonzero = ~self.zero_mask
        self._n_neg_inv = int(np.count_nonzero(self.pos.real[nonzero] < 0))
        self._nonzero_sorted = np.sort(self.pos.real[nonzero])
        self._moment_cache = None

    def _conv_moments(self, n_min, n_max):
        cached = self._moment_cache
        if cached is not None and cached[0] == (n_min, n_max):
            return cached[1]
        K = self.K
        Nd = 2 * K + 1
        o_min, o_max = n_min - K, n_max + K
        No = o_max - o_min + 1
        L = next_fast_len(Nd + No - 1, real=True)
        o = np.arange(o_min, o_max + 1, dtype=np.float64)
        far = np.abs(o) > _W_NEAR
        m = o + 0.5
        max_p = _S_ORD + _J_DELTA
        khat = {}
        with np.errstate(divide="ignore"):
            logk = np.where(far, np.log(np.abs(m)), 0.0)
        khat["log"] = rfft(logk, L)
        for P in range(1, max_p + 1):
            khat[P] = rfft(np.where(far, m ** (-float(P)), 0.0), L)
        dhat = {}
        base = self.regular.astype(np.float64)
        for j in range(_J_DELTA + 1):
            data = base * self.delta ** j if j else base
            if not np.any(data):
                continue
            dhat[j] = rfft(data, L)
        m0_hat = np.zeros(L // 2 + 1, dtype=np.complex128)
        t_hat = [np.zeros(L // 2 + 1, dtype=np.complex128)
                 for _ in range(_S_ORD + 1)]
        for j, dj in dhat.items():
            if j == 0:
                m0_hat += dj * khat["log"]
            else:
                m0_hat -= dj * khat[j] / j
            for s in range(1, _S_ORD + 1):
                t_hat[s] += math.comb(s + j - 1, j) * dj * khat[s + j]
        lo = 2 * K
        hi = lo + (n_max - n_min) + 1
        M0 = irfft(m0_hat, L)[lo:hi]
        Ts = [None] + [irfft(t_hat[s], L)[lo:hi] for s in range(1, _S_ORD + 1)]
        moments = (M0, Ts)
        self._moment_cache = ((n_min, n_max), moments)
        return moments

    def logabs_real(self, x, exclude=None):
        """log|product|, dist(x, Lambda) and nearest offset on real points.

        ``x`` must be ascending.  ``exclude`` (one offset per point, -1 for
        none) removes that node's factor; excluded nodes must lie in the
        near window of their point.
        """
        x = np.asarray(x, dtype=np.float64)
        if not self.fast_ok:
            return self._logabs_pointwise(x, exclude)
        K = self.K
        n = np.floor(x).astype(np.int64)
        if n.size and (n[0] - _W_NEAR < -K or n[-1] + _W_NEAR > K):
            raise ValueError(
                "evaluation points too close to the window edge; "
                "enlarge the node window"
            )
        M0, Ts = self._conv_moments(int(n[0]), int(n[-1]))
        n_base = int(n[0])
        L_out = np.empty(x.size)
        dist = np.empty(x.size)
        nearest = np.empty(x.size, dtype=np.int64)
        offsets = np.arange(-_W_NEAR, _W_NEAR + 1, dtype=np.int64)
        posr = self.pos.real
        chunk = 1 << 15
        for c0 in range(0, x.size, chunk):
            c1 = min(c0 + chunk, x.size)
            xs = x[c0:c1]
            ns = n[c0:c1]
            aoff = (ns[:, None] + offsets[None, :]) + K
            diffs = xs[:, None] - posr[aoff]
            absd = np.abs(diffs)
            imin = np.argmin(absd, axis=1)
            rows = np.arange(xs.size)
            dist[c0:c1] = absd[rows, imin]
            nearest[c0:c1] = aoff[rows, imin]
            if exclude is not None:
                exc = np.asarray(exclude[c0:c1])
                hit = exc >= 0
                if np.any(hit):
                    mask = aoff == exc[:, None]
                    if not np.array_equal(np.count_nonzero(mask, axis=1),
                                          hit.astype(int)):
                        raise ValueError("excluded node outside near window")
                    absd[mask] = 1.0
            with np.errstate(divide="ignore"):
                # a point exactly on a node yields -inf: the true log zero
                near = np.sum(np.log(absd), axis=1)
            cell = ns - n_base
            u = xs - (ns + 0.5)
            lf = M0[cell].copy()
            upow = u.copy()
            for s in range(1, _S_ORD + 1):
                sign = 1.0 if s % 2 == 1 else -1.0
                lf += sign / s * upow * Ts[s][cell]
                upow = upow * u
            for so in self.special_offs:
                k_s = int(self.seq.indices[so])
                far_mask = np.abs(k_s - ns) > _W_NEAR
                if np.any(far_mask):
                    lf[far_mask] += np.log(np.abs(xs[far_mask] - posr[so]))
            L_out[c0:c1] = near + lf
        L_out -= self.total_lognorm
        if exclude is not None:
            exc = np.asarray(exclude)
            hit = exc >= 0
            L_out[hit] += self.lognorm[exc[hit]]
        if self.tail is not None:
            inside = np.abs(x) <= self.tail.radius
            L_out += np.where(inside, self.tail.log_tail(x), 0.0)
        return L_out, dist, nearest

    def _logabs_pointwise(self, x, exclude=None):
        dist = np.empty(x.size)
        nearest = np.empty(x.size, dtype=np.int64)
        chunk = 4096
        for c0 in range(0, x.size, chunk):
            c1 = min(c0 + chunk, x.size)
            absd = np.abs(x[c0:c1, None] - self.pos[None, :])
            nearest[c0:c1] = np.argmin(absd, axis=1)
            dist[c0:c1] = np.min(absd, axis=1)
        vals = self.eval_points(x.astype(np.complex128), exclude=exclude)
        with np.errstate(divide="ignore"):
            L = np.log(np.abs(vals))
        return L, dist, nearest

    def sign_real(self, x):
        """Sign of the (real) product at real points off the zero set."""
        x = np.asarray(x, dtype=np.float64)
        count_less = np.searchsorted(self._nonzero_sorted, x, side="left")
        parity = (count_less + self._n_neg_inv) % 2
        sign = np.where(parity == 0, 1.0, -1.0)
        if np.any(self.zero_mask):
            sign = sign * np.where(x >= 0, 1.0, -1.0)
        return sign

    def logabs_sprime(self, sel):
        """log|derivative| at node offsets ``sel`` through the bulk path."""
        sel = np.asarray(sel, dtype=np.int64).ravel()
        order = np.argsort(self.pos.real[sel], kind="stable")
        xs = self.pos.real[sel[order]]
        L, _, _ = self.logabs_real(xs, exclude=sel[order])
        out = np.empty(sel.size)
        out[order] = L - self.lognorm[sel[order]]
        return out

    def sprime_signed_bulk(self, sel):
        """Signed derivative values on real sequences via the bulk path.

        The sign is the parity of negative factors: nodes left of the
        target, negative normalizations, the zero-node factor and the
        leading -1/lambda.
        """
        sel = np.asarray(sel, dtype=np.int64).ravel()
        L = self.logabs_sprime(sel)
        lam = self.pos.real[sel]
        A = np.searchsorted(self._nonzero_sorted, lam, side="left")
        B = self._n_neg_inv - (lam < 0).astype(np.int64)
        has_zero = bool(np.any(self.zero_mask))
        C = ((lam < 0) & has_zero).astype(np.int64)
        D = (lam > 0).astype(np.int64)
        parity = (A + B + C + D) % 2
        sign = np.where(parity == 0, 1.0, -1.0)
        sign[self.zero_mask[sel]] = 1.0
        return sign * np.exp(L)
