"""Cross-checks between the two product-evaluation paths and the tail
series, against closed-form and brute-force oracles."""
import numpy as np
import pytest

from pwinterp import FamilySpec, integer_lattice, make_family
from pwinterp._engine import ProductCore
from pwinterp._tails import build_tail


def _core(kind, d=0.0, K=2048, seed=0, tail=True):
    if kind == "integer":
        seq = integer_lattice(K)
    else:
        seq = make_family(FamilySpec(kind, d, seed=seed), K)
    t = build_tail(kind, d, K) if tail else None
    return ProductCore(seq, t)


class TestTailSeries:
    def test_lattice_tail_vs_brute(self):
        K = 200
        tail = build_tail("integer", 0.0, K)
        ks = np.arange(K + 1, 2_000_000, dtype=float)
        for z in (0.5, 3.0, 10.0, 40.0):
            brute = np.sum(np.log1p(-z * z / ks ** 2)) - z * z / ks[-1]
            assert tail.log_tail(np.asarray(z)) == pytest.approx(brute,
                                                                 abs=1e-7)

    def test_constant_tail_has_odd_part(self):
        K = 100
        tail = build_tail("constant_shift", 0.3, K)
        # odd coefficients present: T(z) != T(-z)
        assert abs(tail.log_tail(np.asarray(10.0))
                   - tail.log_tail(np.asarray(-10.0))) > 1e-6


class TestPairing:
    def test_plan_covers_each_node_once(self):
        core = _core("signed", 0.25, K=64)
        seen = [k for row in core.pairing_plan() for k in row]
        assert sorted(seen) == list(range(-64, 65))

    def test_symmetric_family_pairs_k_with_minus_k(self):
        core = _core("integer", K=16)
        for row in core.pairing_plan():
            if len(row) == 2:
                assert row[0] == -row[1]


class TestPointwisePath:
    def test_lattice_matches_sine(self):
        core = _core("integer", K=2000)
        x = np.linspace(-10, 10, 401)
        vals = core.eval_points(x.astype(complex))
        assert np.max(np.abs(vals - np.sin(np.pi * x) / np.pi)) < 1e-10

    def test_exact_zero_at_nodes(self):
        core = _core("integer", K=500)
        z = np.array([3.0 + 0j, -7.0 + 0j, 0.0 + 0j])
        assert np.all(core.eval_points(z) == 0)

    def test_conjugate_symmetry(self):
        core = _core("alternating", 0.2, K=512)
        z = np.array([0.3 + 1.7j, -2.2 + 0.4j, 5.5 - 3.1j])
        a = core.eval_points(z)
        b = core.eval_points(np.conj(z))
        assert np.max(np.abs(np.conj(a) - b)) < 1e-12 * np.max(np.abs(a))

    def test_overflow_reported(self):
        from pwinterp._engine import OverflowReported
        core = _core("integer", K=512, tail=False)
        with pytest.raises(OverflowReported):
            core.eval_points(np.array([400.0 + 400.0j]))


class TestGridPath:
    @pytest.mark.parametrize("kind,d", [("integer", 0.0),
                                        ("signed", 0.25),
                                        ("constant_shift", 0.3),
                                        ("alternating", 0.3),
                                        ("random", 0.4)])
    def test_agrees_with_pointwise(self, kind, d, rng):
        core = _core(kind, d, K=2048, seed=9)
        xs = np.sort(rng.uniform(-400, 400, 1200))
        L, dist, nearest = core.logabs_real(xs)
        vals = core.eval_points(xs.astype(complex))
        assert np.max(np.abs(L - np.log(np.abs(vals)))) < 1e-7
        # sign reconstruction matches the signed product
        sg = core.sign_real(xs)
        assert np.max(np.abs(sg * np.exp(L) - vals.real)) < 1e-6 * np.max(
            np.abs(vals))

    def test_nearest_and_dist(self, rng):
        core = _core("random", 0.4, K=256, seed=4)
        xs = np.sort(rng.uniform(-100, 100, 300))
        _, dist, nearest = core.logabs_real(xs)
        brute = np.abs(xs[:, None] - core.pos[None, :])
        assert np.allclose(dist, brute.min(axis=1))
        assert np.array_equal(nearest, np.argmin(brute, axis=1))

    def test_exclusion_agrees(self, rng):
        core = _core("signed", 0.25, K=1024)
        xs = np.sort(rng.uniform(-50, 50, 64))
        _, _, nearest = core.logabs_real(xs)
        L, _, _ = core.logabs_real(xs, exclude=nearest)
        vals = core.eval_points(xs.astype(complex), exclude=nearest)
        assert np.max(np.abs(L - np.log(np.abs(vals)))) < 1e-8

    def test_sprime_paths_agree(self):
        core = _core("constant_shift", 0.2, K=2048)
        # node indexes within the tail-series radius K/4
        sel = np.arange(2048 - 500, 2048 + 500, 7)
        bulk = np.exp(core.logabs_sprime(sel))
        point = np.abs(core.sprime_points(sel[::10]))
        assert np.max(np.abs(bulk[::10] - point) / point) < 1e-8

    def test_window_edge_guard(self):
        core = _core("integer", K=128)
        with pytest.raises(ValueError, match="window edge"):
            core.logabs_real(np.array([120.0]))

    @pytest.mark.parametrize("kind,d,seed", [("integer", 0.0, 0),
                                             ("signed", 0.25, 0),
                                             ("signed", -0.2, 0),
                                             ("random", 0.4, 3),
                                             ("alternating", 0.3, 0)])
    def test_signed_bulk_sprime_matches_pointwise(self, kind, d, seed):
        core = _core(kind, d, K=1024, seed=seed)
        sel = np.arange(1024 - 150, 1024 + 151, 3)
        bulk = core.sprime_signed_bulk(sel)
        point = core.sprime_points(sel)
        assert np.max(np.abs(bulk - point) / np.abs(point)) < 1e-7


class TestWindowConvergence:
    def test_compensated_doubling_is_stable(self):
        # with the far-tail series, K and K/2 agree far beyond tol
        vals = {}
        for K in (1024, 2048):
            core = _core("signed", 0.25, K=K)
            vals[K] = core.eval_points(np.array([5.3 + 0j, 13.7 + 0j]))
        rel = np.abs(vals[2048] - vals[1024]) / np.abs(vals[2048])
        assert np.max(rel) < 1e-6
