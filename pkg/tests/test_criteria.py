import numpy as np
import pytest

from pwinterp import (FamilySpec, IntervalFamily, NodeSequence, Thresholds,
                      WeightSequence, build_generating_function,
                      carleson_sum, continuous_ap, discrete_ap,
                      full_verdict, integer_lattice, make_family,
                      select_probe_points, select_subsequence)
from pwinterp.criteria import BracketingError, SelectionError


class TestCarleson:
    def test_lattice_value(self):
        seq = integer_lattice(100_000)
        res = carleson_sum(seq)
        assert res.sup == pytest.approx(np.pi ** 2 / 3, abs=1e-3)

    def test_toy_pair(self):
        seq = NodeSequence([0, 1], [0j, 1j])
        res = carleson_sum(seq)
        assert res.sup == pytest.approx(2.0)

    def test_rigid_shift_invariance(self):
        a = carleson_sum(integer_lattice(4096)).sup
        b = carleson_sum(make_family(FamilySpec("constant_shift", 0.37),
                                     4096)).sup
        assert b == pytest.approx(a, rel=1e-12)

    def test_real_terms_reduce_to_inverse_square_gaps(self):
        # hand-rolled real-axis formula against the generic path
        seq = make_family(FamilySpec("random", 0.3, seed=13), 256)
        res = carleson_sum(seq, max_probes=10_000)
        xi = seq.positions.real
        best = -np.inf
        n = xi.size
        for j in range(n // 4, n - n // 4):
            d2 = (xi[j] - xi) ** 2
            d2[j] = np.inf
            best = max(best, float(np.sum(1.0 / d2)))
        assert res.sup == pytest.approx(best, rel=1e-12)

    def test_coincident_nodes_rejected(self):
        seq = NodeSequence([0, 1], [1 + 0j, 1 + 0j])
        with pytest.raises(ValueError):
            carleson_sum(seq)


class TestDiscreteAp:
    def test_unit_weight(self):
        res = discrete_ap(np.ones(4096), 2.0, n_max=2048)
        assert res.sup == pytest.approx(1.0, abs=1e-12)

    def test_constant_weight_scale_invariance(self):
        w = np.full(512, 7.3)
        res = discrete_ap(w, 2.5, n_max=256)
        assert res.sup == pytest.approx(1.0, abs=1e-12)

    def test_scaling_exact(self, rng):
        w = rng.uniform(0.5, 2.0, 512)
        a = discrete_ap(w, 2.0, n_max=128)
        b = discrete_ap(100.0 * w, 2.0, n_max=128)
        assert b.sup == pytest.approx(a.sup, rel=1e-12)

    def test_linear_weight_log_growth(self):
        w = np.arange(1, 4097, dtype=float)
        res = discrete_ap(w, 2.0, n_max=2048)
        # max quotient at length n tracks (log n)/2
        assert res.slope == pytest.approx(0.5, rel=0.2)

    def test_nonpositive_weight_rejected(self):
        with pytest.raises(ValueError):
            discrete_ap(np.array([1.0, 0.0, 2.0]), 2.0, n_max=1)

    def test_window_too_small(self):
        with pytest.raises(ValueError, match="2 n_max"):
            discrete_ap(np.ones(10), 2.0, n_max=8)


class TestContinuousAp:
    def test_unit_weight(self):
        fam = IntervalFamily(x_max=64.0, m_min=2, m_max=6)
        res = continuous_ap(lambda x: np.ones_like(x), 2.0, fam, 1 / 64)
        assert res.sup == pytest.approx(1.0, abs=1e-12)

    def test_sqrt_power_weight(self):
        fam = IntervalFamily(x_max=1024.0, m_min=5, m_max=10)
        res = continuous_ap(lambda x: np.sqrt(np.abs(x)), 2.0, fam, 1 / 128)
        # origin-anchored quotient of |x|^(1/2) is 4/3 at every length
        assert np.all(np.abs(res.level_max - 4 / 3) < 0.02 * 4 / 3)

    def test_linear_power_weight_grows(self):
        fam = IntervalFamily(x_max=8192.0, m_min=5, m_max=13)
        res = continuous_ap(lambda x: np.abs(x), 2.0, fam, 1 / 128)
        th = Thresholds()
        assert res.growth_slope > th.slope_factor * np.mean(res.level_max)
        assert res.growth_r2 >= 0.9
        assert res.growth_persistence >= th.persistence_min
        assert abs(res.ring_ratio - 1.0) <= th.ring_band

    def test_quotients_at_least_one(self, rng):
        fam = IntervalFamily(x_max=32.0, m_min=2, m_max=5)
        res = continuous_ap(lambda x: np.exp(np.sin(x)), 1.7, fam, 1 / 64)
        assert np.all(res.level_max >= 1.0)

    def test_nonpositive_sampler_rejected(self):
        fam = IntervalFamily(x_max=32.0, m_min=2, m_max=5)
        with pytest.raises(ValueError):
            continuous_ap(lambda x: x, 2.0, fam, 1 / 32)


class TestSelection:
    def test_lattice_r1_picks_multiples_of_four(self):
        sel = select_subsequence(integer_lattice(256), r=1.0)
        assert np.array_equal(sel.anchors.real, 4.0 * sel.j_values)

    def test_lattice_small_r_fails(self):
        with pytest.raises(SelectionError):
            select_subsequence(integer_lattice(256), r=0.3)

    def test_signed_quarter_nonempty(self):
        seq = make_family(FamilySpec("signed", 0.25), 256)
        sel = select_subsequence(seq, r=1.0)
        assert np.all(np.abs(sel.anchors.real - 4.0 * sel.j_values) <= 1.0)

    def test_anchors_inside_squares(self):
        seq = make_family(FamilySpec("random", 0.4, seed=6), 512)
        sel = select_subsequence(seq, r=0.75)
        assert np.all(np.abs(sel.anchors.real - 3.0 * sel.j_values) <= 0.75)
        assert np.all(np.abs(sel.anchors.imag) <= 0.75)


class TestProbePoints:
    def test_circle_condition_at_origin(self, gf_lattice_8k):
        sel = select_subsequence(gf_lattice_8k.seq, r=1.0, j_max=4)
        out = select_probe_points(gf_lattice_8k, sel, eps=0.05)
        assert np.all(np.abs(np.abs(out.probes - out.anchors) - 0.05) < 1e-12)
        target = 0.05 * np.abs(gf_lattice_8k.node_derivatives(
            out.node_indices))
        got = np.abs(gf_lattice_8k.value(out.probes))
        assert np.max(np.abs(got - target)) < 1e-6

    def test_eps_capped_by_separation(self, gf_lattice_8k):
        sel = select_subsequence(gf_lattice_8k.seq, r=1.0, j_max=2)
        out = select_probe_points(gf_lattice_8k, sel, eps=0.5)
        assert out.eps == pytest.approx(gf_lattice_8k.separation / 10.0)

    def test_translated_family_matches_lattice(self):
        d = 0.2
        seq = make_family(FamilySpec("constant_shift", d), 8192)
        gf = build_generating_function(seq)
        sel = select_subsequence(seq, r=1.0, j_max=2)
        out = select_probe_points(gf, sel, eps=0.05)
        resid = np.abs(np.abs(gf.value(out.probes))
                       - 0.05 * np.abs(gf.node_derivatives(out.node_indices)))
        assert np.max(resid) < 1e-6


class TestFullVerdict:
    def test_lattice_passes(self):
        rep = full_verdict(integer_lattice(2048), 2.0)
        assert rep.verdict == "PASS"
        assert rep.failed_checks == ()
        assert rep.density_r0 is not None
        assert rep.separation == 1.0

    def test_verdict_consistency_fields(self):
        rep = full_verdict(integer_lattice(1024), 2.0)
        assert rep.carleson_sup == pytest.approx(np.pi ** 2 / 3, abs=1e-2)
        assert rep.ap_sup >= 1.0

    def test_failed_check_recorded_on_fail(self):
        seq = make_family(FamilySpec("signed", 0.25), 1 << 14)
        rep = full_verdict(seq, 2.0, x_max=2048.0)
        assert rep.verdict == "FAIL"
        assert len(rep.failed_checks) > 0

    def test_sparse_sequence_fails_density(self):
        idx = np.arange(-64, 65)
        seq = NodeSequence(idx, (idx * 7.0).astype(complex))
        rep = full_verdict(seq, 2.0, x_max=32.0, quad_step=1 / 16)
        assert rep.verdict == "FAIL"
        assert "relative_density" in rep.failed_checks


def _derivative_weight_sups(seq, gf, p, windows=(256, 512, 1024)):
    """Discrete quotient sup of |S'(anchor)|^p over nested anchor windows."""
    sups = []
    for jm in windows:
        sel = select_subsequence(seq, r=1.0, j_max=jm)
        logw = gf.node_derivative_logabs(sel.node_indices)
        w = np.exp(p * (logw - logw.max()))
        res = discrete_ap(w, p, n_max=min(len(w) // 2, 1024))
        sups.append(res.sup)
    return np.asarray(sups)


class TestCrossChecks:
    """The discrete quotients of the derivative weights and the continuous
    quotients of the weight function agree on the same family: both
    stabilize under window doubling, or neither does."""

    @pytest.mark.parametrize("d", [0.0, 0.1, 0.2])
    def test_subcritical_weights_stable_both_ways(self, d):
        seq = (integer_lattice(1 << 14) if d == 0.0
               else make_family(FamilySpec("signed", d), 1 << 14))
        gf = build_generating_function(seq)
        sups = _derivative_weight_sups(seq, gf, 2.0)
        rel = np.abs(np.diff(sups)) / sups[1:]
        assert np.all(rel < 0.05)
        rep = full_verdict(seq, 2.0, gf=gf, x_max=2048.0)
        assert rep.verdict == "PASS"

    def test_critical_weights_grow_both_ways(self):
        seq = make_family(FamilySpec("signed", 0.25), 1 << 14)
        gf = build_generating_function(seq)
        sups = _derivative_weight_sups(seq, gf, 2.0)
        rel = np.abs(np.diff(sups)) / sups[1:]
        assert np.all(rel > 0.05)
        rep = full_verdict(seq, 2.0, gf=gf, x_max=2048.0)
        assert rep.verdict == "FAIL"
