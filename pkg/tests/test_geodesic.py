"""Tests for the classic and tunneling geodesic transforms."""

import numpy as np
import pytest

from errors import EmptySeedSetError, InvalidSeedError, OversizeGraphError, ParameterError
from geodesic import (
    SeedSet,
    TunnelParams,
    brute_force_geodesic,
    classic_geodesic_transform,
    disc_offsets,
    graph_edges,
    sampled_offsets,
    tunneling_geodesic_transform,
)
from helpers import palette_image, uniform_image
from image_io import RgbImage, color_distance
from saliency import border_seeds

EPS = 1e-9


def random_seeds(rng, height, width, count=1):
    flat = rng.choice(height * width, size=min(count, height * width), replace=False)
    return SeedSet(np.column_stack([flat // width, flat % width]))


class TestSeedSet:
    def test_empty_rejected(self):
        with pytest.raises(EmptySeedSetError):
            SeedSet(np.zeros((0, 2), dtype=np.int64))

    def test_duplicates_rejected(self):
        with pytest.raises(InvalidSeedError):
            SeedSet(np.array([[0, 0], [0, 0]]))

    def test_from_points_drops_repeats(self):
        assert len(SeedSet.from_points([(1, 1), (1, 1), (0, 2)])) == 2

    def test_out_of_bounds_rejected(self):
        with pytest.raises(InvalidSeedError):
            classic_geodesic_transform(uniform_image(3, 3), SeedSet.from_points([(3, 0)]))

    def test_flat_indices(self):
        seeds = SeedSet.from_points([(1, 2), (0, 0)])
        assert sorted(seeds.flat_indices(5).tolist()) == [0, 7]


class TestTunnelParams:
    def test_defaults(self):
        params = TunnelParams()
        assert params.k_t == 30
        assert params.sigma_d_raw == 24
        assert params.connectivity == 8
        assert not params.exact_tunnels

    def test_sigma_r_and_stride(self):
        params = TunnelParams()
        assert params.sigma_r(160, 120) == pytest.approx(280 / 30)
        assert params.stride(160, 120) == 1
        assert params.stride(640, 480) == 4

    def test_sigma_r_clamped_to_one(self):
        assert TunnelParams(k_t=100).sigma_r(2, 2) == 1.0
        assert TunnelParams(k_t=100).offsets(2, 2) == []

    @pytest.mark.parametrize("kwargs", [
        {"k_t": 0},
        {"k_t": -5},
        {"sigma_d_raw": 0},
        {"sigma_d_raw": 500},
        {"connectivity": 6},
        {"tunnel_stride": 0},
    ])
    def test_invalid_values(self, kwargs):
        with pytest.raises(ParameterError):
            TunnelParams(**kwargs)


class TestOffsets:
    def test_disc_is_chebyshev_bound(self):
        offsets = disc_offsets(3.5)
        assert len(offsets) == 7 * 7 - 1
        assert all(max(abs(dy), abs(dx)) < 3.5 for dy, dx in offsets)

    def test_sampled_subset_of_disc(self):
        assert set(sampled_offsets(6.2, 2)) <= set(disc_offsets(6.2))

    def test_sampled_closed_under_rotation_and_mirror(self):
        offsets = set(sampled_offsets(9.3, 2))
        assert {(dx, -dy) for dy, dx in offsets} == offsets
        assert {(dy, -dx) for dy, dx in offsets} == offsets

    def test_sampled_ray_lengths(self):
        offsets = sampled_offsets(9.3, 2)
        assert sorted({max(abs(dy), abs(dx)) for dy, dx in offsets}) == [2, 4, 6, 8]
        assert len(offsets) == 8 * 4


class TestClassicTransform:
    def test_uniform_image_is_zero(self):
        g = classic_geodesic_transform(uniform_image(5, 7), SeedSet.from_points([(2, 3)])).g
        assert np.all(g == 0.0)

    def test_black_black_white(self):
        pixels = np.array([[[0, 0, 0], [0, 0, 0], [255, 255, 255]]], dtype=np.uint8)
        g = classic_geodesic_transform(RgbImage(pixels), SeedSet.from_points([(0, 0)])).g
        assert g[0, 0] == 0.0
        assert g[0, 1] == 0.0
        assert g[0, 2] == pytest.approx(1.0, abs=1e-12)

    def test_diagonal_steps_are_not_scaled(self):
        pixels = np.zeros((2, 2, 3), dtype=np.uint8)
        pixels[1, 1] = (255, 255, 255)
        pixels[0, 1] = pixels[1, 0] = (255, 0, 0)
        g = classic_geodesic_transform(RgbImage(pixels), SeedSet.from_points([(0, 0)])).g
        assert g[1, 1] == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("connectivity", [4, 8])
    def test_matches_oracle_on_random_6x6(self, rng, connectivity):
        image = RgbImage(rng.integers(0, 256, size=(6, 6, 3)).astype(np.uint8))
        seeds = random_seeds(rng, 6, 6)
        fast = classic_geodesic_transform(image, seeds, connectivity).g
        slow = brute_force_geodesic(image, seeds, connectivity=connectivity).g
        np.testing.assert_allclose(fast, slow, rtol=0, atol=EPS)

    def test_matches_oracle_on_distinct_colors(self):
        colors = np.arange(25 * 3).reshape(5, 5, 3) * 3 % 256
        image = RgbImage(colors.astype(np.uint8))
        seeds = SeedSet.from_points([(0, 0)])
        np.testing.assert_allclose(
            classic_geodesic_transform(image, seeds).g,
            brute_force_geodesic(image, seeds).g,
            rtol=0, atol=EPS,
        )

    def test_empty_seed_set(self):
        with pytest.raises(EmptySeedSetError):
            classic_geodesic_transform(uniform_image(2, 2), None)


class TestTunnelingTransform:
    def test_uniform_image_equals_classic(self):
        image = uniform_image(9, 11)
        seeds = border_seeds(11, 9)
        assert np.array_equal(
            tunneling_geodesic_transform(image, seeds).g,
            classic_geodesic_transform(image, seeds).g,
        )

    def test_matches_oracle_exact_8x8(self, rng):
        image = palette_image(rng, 8, 8)
        seeds = random_seeds(rng, 8, 8, 2)
        params = TunnelParams(k_t=4, exact_tunnels=True)
        np.testing.assert_allclose(
            tunneling_geodesic_transform(image, seeds, params).g,
            brute_force_geodesic(image, seeds, params).g,
            rtol=0, atol=EPS,
        )

    def test_stripe_is_crossed_by_tunnel(self):
        pixels = np.empty((20, 20, 3), dtype=np.uint8)
        pixels[:] = (50, 50, 200)
        pixels[:, 9:11] = (250, 250, 0)
        image = RgbImage(pixels)
        seeds = SeedSet.from_points([(10, 2)])
        params = TunnelParams(k_t=5)

        tunneled = tunneling_geodesic_transform(image, seeds, params).g
        classic = classic_geodesic_transform(image, seeds).g
        stripe = color_distance((50, 50, 200), (250, 250, 0))

        assert classic[10, 15] == pytest.approx(2 * stripe, abs=1e-12)
        assert tunneled[10, 15] < classic[10, 15]
        assert tunneled[10, 15] == pytest.approx(0.0, abs=1e-12)

    def test_high_contrast_pairs_get_no_tunnel(self):
        pixels = np.zeros((1, 5, 3), dtype=np.uint8)
        pixels[0, 1:4] = 255
        image = RgbImage(pixels)
        params = TunnelParams(k_t=1, exact_tunnels=True)
        src, dst, w = graph_edges(image, params)
        weights = {
            tuple(sorted(pair)): weight
            for pair, weight in zip(zip(src.tolist(), dst.tolist()), w.tolist())
        }
        assert weights[(0, 4)] == 0.0
        assert (0, 2) not in weights
        assert weights[(0, 1)] == pytest.approx(1.0, abs=1e-12)

    def test_sampled_matches_sampled_oracle(self, rng):
        image = palette_image(rng, 10, 9)
        seeds = border_seeds(9, 10)
        params = TunnelParams(k_t=3, tunnel_stride=2)
        np.testing.assert_allclose(
            tunneling_geodesic_transform(image, seeds, params).g,
            brute_force_geodesic(image, seeds, params).g,
            rtol=0, atol=EPS,
        )

    def test_custom_metric_scales_distances(self, rng):
        image = palette_image(rng, 12, 12)
        seeds = border_seeds(12, 12)
        params = TunnelParams(k_t=6)
        base = tunneling_geodesic_transform(image, seeds, params).g
        scaled = tunneling_geodesic_transform(
            image, seeds, params, metric=lambda a, b: 3.0 * color_distance(a, b)
        ).g
        np.testing.assert_allclose(scaled, 3.0 * base, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("case", range(200))
def test_oracle_equivalence(case):
    rng = np.random.default_rng(1000 + case)
    height, width = rng.integers(1, 11, size=2)
    image = palette_image(rng, height, width, colors=int(rng.integers(1, 4)))
    seeds = random_seeds(rng, height, width, int(rng.integers(1, 4)))
    params = TunnelParams(k_t=float(rng.integers(2, 7)), exact_tunnels=True)

    np.testing.assert_allclose(
        classic_geodesic_transform(image, seeds).g,
        brute_force_geodesic(image, seeds).g,
        rtol=0, atol=EPS,
    )
    np.testing.assert_allclose(
        tunneling_geodesic_transform(image, seeds, params).g,
        brute_force_geodesic(image, seeds, params).g,
        rtol=0, atol=EPS,
    )


def test_dominance_and_sampling_bound():
    rng = np.random.default_rng(7)
    exact = TunnelParams(k_t=8, exact_tunnels=True)
    sampled = TunnelParams(k_t=8, tunnel_stride=2)
    for _ in range(100):
        image = palette_image(rng, 32, 32)
        seeds = border_seeds(32, 32)
        classic = classic_geodesic_transform(image, seeds).g
        g_exact = tunneling_geodesic_transform(image, seeds, exact).g
        g_sampled = tunneling_geodesic_transform(image, seeds, sampled).g

        assert np.all(g_exact <= classic + EPS)
        assert np.all(g_sampled <= classic + EPS)
        assert np.all(g_sampled >= g_exact - EPS)


def test_distance_field_invariants(rng):
    image = palette_image(rng, 16, 20)
    seeds = random_seeds(rng, 16, 20, 5)
    params = TunnelParams(k_t=6, exact_tunnels=True)
    g = tunneling_geodesic_transform(image, seeds, params).g

    assert np.all(np.isfinite(g))
    assert np.all(g >= 0.0)
    assert np.all(g[seeds.coords[:, 0], seeds.coords[:, 1]] == 0.0)

    # Every edge of the graph is relaxed.
    src, dst, w = graph_edges(image, params)
    flat = g.ravel()
    assert np.all(np.abs(flat[src] - flat[dst]) <= w + EPS)


@pytest.mark.parametrize("transform", ["rot90", "fliplr", "flipud"])
def test_symmetry(rng, transform):
    image = palette_image(rng, 14, 19)
    op = getattr(np, transform)
    params = TunnelParams(k_t=5)

    g = tunneling_geodesic_transform(image, border_seeds(19, 14), params).g
    moved = RgbImage(op(image.pixels))
    g_moved = tunneling_geodesic_transform(
        moved, border_seeds(moved.width, moved.height), params
    ).g
    np.testing.assert_allclose(g_moved, op(g), rtol=0, atol=1e-12)


class TestBruteForce:
    def test_single_pixel(self):
        g = brute_force_geodesic(uniform_image(1, 1), SeedSet.from_points([(0, 0)])).g
        assert g.tolist() == [[0.0]]

    def test_oversize_rejected(self):
        with pytest.raises(OversizeGraphError):
            brute_force_geodesic(uniform_image(101, 100), SeedSet.from_points([(0, 0)]))


def test_default_metric_weights_match_generic_path(rng):
    image = palette_image(rng, 18, 22, jitter=20)
    params = TunnelParams(k_t=4)
    fast = graph_edges(image, params)
    generic = graph_edges(image, params, metric=lambda a, b: color_distance(a, b))
    np.testing.assert_array_equal(fast[0], generic[0])
    np.testing.assert_array_equal(fast[1], generic[1])
    np.testing.assert_allclose(fast[2], generic[2], rtol=0, atol=1e-15)


def test_tunnel_gate_is_inclusive():
    pixels = np.zeros((1, 5, 3), dtype=np.uint8)
    pixels[0, 1:4] = 200
    pixels[0, 4] = (24, 0, 0)
    src, dst, w = graph_edges(RgbImage(pixels), TunnelParams(k_t=1, exact_tunnels=True))
    pairs = {tuple(sorted(p)) for p in zip(src.tolist(), dst.tolist())}
    assert (0, 4) in pairs
