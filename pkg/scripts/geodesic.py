"""
Geodesic distance transforms over the pixel grid.

Two transforms share one graph builder:
- classic: grid-neighbor edges weighted by color difference
- tunneling: the same grid plus direct "tunnel" edges between pixels that
  are spatially close (Chebyshev distance < sigma_r) and similar in color
  (raw RGB L2 <= sigma_d_raw), weighted by the endpoints' color difference

Distances are solved with a multi-source label-setting search
(scipy.sparse.csgraph.dijkstra). brute_force_geodesic is an independent
Bellman-Ford style oracle used by the tests.
"""

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from errors import EmptySeedSetError, InvalidSeedError, OversizeGraphError
from image_io import MAX_RGB_DISTANCE, RgbImage, color_distance
from validator import ensure_valid, validate_connectivity, validate_tunnel_params

Metric = Callable[[np.ndarray, np.ndarray], np.ndarray]

BRUTE_FORCE_MAX_PIXELS = 10_000

AXIS_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))
DIAGONAL_STEPS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass(frozen=True, eq=False)
class SeedSet:
    """
    Zero-distance ground pixels as (y, x) rows.

    Must be non-empty and duplicate-free; bounds are checked against an
    image with check_bounds().
    """

    coords: np.ndarray

    def __post_init__(self) -> None:
        coords = np.asarray(self.coords, dtype=np.int64).reshape(-1, 2)
        if len(coords) == 0:
            raise EmptySeedSetError("Seed set is empty")
        if len(np.unique(coords, axis=0)) != len(coords):
            raise InvalidSeedError("Seed set contains duplicate coordinates")
        coords = coords.copy()
        coords.flags.writeable = False
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_points(cls, points: Iterable[tuple[int, int]]) -> "SeedSet":
        """Build from (y, x) tuples, dropping repeats."""
        unique = sorted(set((int(y), int(x)) for y, x in points))
        return cls(np.array(unique, dtype=np.int64).reshape(-1, 2))

    def __len__(self) -> int:
        return len(self.coords)

    def check_bounds(self, height: int, width: int) -> None:
        ys, xs = self.coords[:, 0], self.coords[:, 1]
        outside = (ys < 0) | (ys >= height) | (xs < 0) | (xs >= width)
        if np.any(outside):
            y, x = self.coords[np.argmax(outside)]
            raise InvalidSeedError(
                f"Seed ({y}, {x}) outside {width}x{height} image"
            )

    def flat_indices(self, width: int) -> np.ndarray:
        return self.coords[:, 0] * width + self.coords[:, 1]


@dataclass(frozen=True)
class TunnelParams:
    """
    Tunneling parameters.

    sigma_r is derived per image as (width + height) / k_t, clamped to 1.
    tunnel_stride=None means max(1, floor(sigma_r / 8)).
    """

    k_t: float = 30.0
    sigma_d_raw: float = 24.0
    connectivity: int = 8
    tunnel_stride: Optional[int] = None
    exact_tunnels: bool = False

    def __post_init__(self) -> None:
        ensure_valid(validate_tunnel_params(self))

    def sigma_r(self, width: int, height: int) -> float:
        return max(1.0, (width + height) / self.k_t)

    def stride(self, width: int, height: int) -> int:
        if self.tunnel_stride is not None:
            return self.tunnel_stride
        return max(1, math.floor(self.sigma_r(width, height) / 8))

    def offsets(self, width: int, height: int) -> list[tuple[int, int]]:
        """Tunnel endpoint offsets (dy, dx) for an image of this size."""
        sigma_r = self.sigma_r(width, height)
        if self.exact_tunnels:
            return disc_offsets(sigma_r)
        return sampled_offsets(sigma_r, self.stride(width, height))


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Per-pixel geodesic distance g, shape (height, width)."""

    g: np.ndarray

    def __post_init__(self) -> None:
        g = np.array(self.g, dtype=np.float64, copy=True)
        g.flags.writeable = False
        object.__setattr__(self, "g", g)

    @property
    def width(self) -> int:
        return self.g.shape[1]

    @property
    def height(self) -> int:
        return self.g.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.g.shape


def grid_offsets(connectivity: int) -> list[tuple[int, int]]:
    if connectivity == 4:
        return list(AXIS_STEPS)
    return list(AXIS_STEPS + DIAGONAL_STEPS)


def disc_offsets(sigma_r: float) -> list[tuple[int, int]]:
    """Every nonzero offset with Chebyshev length < sigma_r."""
    reach = math.ceil(sigma_r) - 1
    return [
        (dy, dx)
        for dy in range(-reach, reach + 1)
        for dx in range(-reach, reach + 1)
        if (dy, dx) != (0, 0) and max(abs(dy), abs(dx)) < sigma_r
    ]


def sampled_offsets(sigma_r: float, stride: int) -> list[tuple[int, int]]:
    """
    Axis and diagonal offsets at multiples of stride, shorter than sigma_r.

    The set is closed under 90 degree rotation and mirroring.
    """
    offsets = []
    step = stride
    while step < sigma_r:
        for dy, dx in AXIS_STEPS + DIAGONAL_STEPS:
            offsets.append((dy * step, dx * step))
        step += stride
    return offsets


def _canonical(offsets: Iterable[tuple[int, int]]) -> set[tuple[int, int]]:
    # One of each +/- pair; the graph is undirected.
    return {(dy, dx) for dy, dx in offsets if dy > 0 or (dy == 0 and dx > 0)}


def graph_edges(
    image: RgbImage,
    params: Optional[TunnelParams] = None,
    connectivity: int = 8,
    metric: Metric = color_distance,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Undirected edge list (src, dst, weight) over flat pixel indices.

    With params=None only grid edges at the given connectivity are built;
    otherwise params.connectivity applies and tunnel edges are added.
    Each unordered pixel pair appears at most once.
    """
    if params is not None:
        connectivity = params.connectivity
    ensure_valid(validate_connectivity(connectivity))

    height, width = image.shape
    grid = _canonical(grid_offsets(connectivity))
    tunnels = set()
    sigma_d_raw = math.inf
    if params is not None:
        tunnels = _canonical(params.offsets(width, height)) - grid
        sigma_d_raw = params.sigma_d_raw

    pixels = image.pixels.astype(np.float64)
    index = np.arange(height * width, dtype=np.int32 if height * width < 2**31 else np.int64)
    index = index.reshape(height, width)
    sigma_d_sq = sigma_d_raw * sigma_d_raw
    sources, targets, weights = [], [], []

    for dy, dx in sorted(grid | tunnels):
        if abs(dy) >= height or abs(dx) >= width:
            continue
        ys = slice(max(0, -dy), height - max(0, dy))
        xs = slice(max(0, -dx), width - max(0, dx))
        ys_to = slice(ys.start + dy, ys.stop + dy)
        xs_to = slice(xs.start + dx, xs.stop + dx)

        a = pixels[ys, xs]
        b = pixels[ys_to, xs_to]
        src = index[ys, xs]
        dst = index[ys_to, xs_to]
        diff = a - b
        sq = np.einsum("...c,...c->...", diff, diff)
        if (dy, dx) in tunnels:
            keep = sq <= sigma_d_sq
            a, b, src, dst, sq = a[keep], b[keep], src[keep], dst[keep], sq[keep]

        sources.append(src.ravel())
        targets.append(dst.ravel())
        if metric is color_distance:
            weights.append(np.sqrt(sq).ravel() / MAX_RGB_DISTANCE)
        else:
            weights.append(np.asarray(metric(a, b), dtype=np.float64).ravel())

    if not sources:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, np.zeros(0, dtype=np.float64)
    return np.concatenate(sources), np.concatenate(targets), np.concatenate(weights)


def _solve(
    image: RgbImage,
    seeds: SeedSet,
    edges: tuple[np.ndarray, np.ndarray, np.ndarray],
) -> DistanceField:
    height, width = image.shape
    n = height * width
    src, dst, w = edges
    # Explicit zero weights stay stored in the CSR structure and act as edges.
    graph = csr_matrix((w, (src, dst)), shape=(n, n))
    dist = dijkstra(
        graph,
        directed=False,
        indices=seeds.flat_indices(width),
        min_only=True,
    )
    return DistanceField(np.asarray(dist, dtype=np.float64).reshape(height, width))


def _check_seeds(image: RgbImage, seeds: SeedSet) -> None:
    if seeds is None or len(seeds) == 0:
        raise EmptySeedSetError("Seed set is empty")
    seeds.check_bounds(image.height, image.width)


def classic_geodesic_transform(
    image: RgbImage,
    seeds: SeedSet,
    connectivity: int = 8,
    metric: Metric = color_distance,
) -> DistanceField:
    """
    Shortest accumulated color difference from the seed set to every pixel.

    Diagonal steps are not scaled by sqrt(2); only color differences count.
    """
    _check_seeds(image, seeds)
    return _solve(image, seeds, graph_edges(image, None, connectivity, metric))


def tunneling_geodesic_transform(
    image: RgbImage,
    seeds: SeedSet,
    params: Optional[TunnelParams] = None,
    metric: Metric = color_distance,
) -> DistanceField:
    """
    Geodesic distance over the grid graph augmented with tunnel edges.

    In sampled mode (exact_tunnels=False) only a dihedral-symmetric subset
    of tunnel offsets is used, so the result never drops below the exact
    full-disc transform. Either mode stays at or below the classic one.
    """
    params = params or TunnelParams()
    _check_seeds(image, seeds)
    return _solve(image, seeds, graph_edges(image, params, metric=metric))


def _oracle_offset_allowed(
    dy: int,
    dx: int,
    params: TunnelParams,
    sigma_r: float,
    stride: int,
) -> bool:
    cheb = max(abs(dy), abs(dx))
    if cheb >= sigma_r:
        return False
    if params.exact_tunnels:
        return True
    on_ray = dy == 0 or dx == 0 or abs(dy) == abs(dx)
    return on_ray and cheb % stride == 0


def brute_force_geodesic(
    image: RgbImage,
    seeds: SeedSet,
    params: Optional[TunnelParams] = None,
    connectivity: int = 8,
    metric: Optional[Metric] = None,
) -> DistanceField:
    """
    Reference distances by queue-based edge relaxation to a fixpoint.

    Enumerates edges pixel by pixel in plain Python, independently of
    graph_edges(). Only meant for small test images.
    """
    height, width = image.shape
    n = height * width
    if n > BRUTE_FORCE_MAX_PIXELS:
        raise OversizeGraphError(
            f"Oracle limited to {BRUTE_FORCE_MAX_PIXELS} pixels, got {n}"
        )
    _check_seeds(image, seeds)
    if params is not None:
        connectivity = params.connectivity
    ensure_valid(validate_connectivity(connectivity))

    colors = [tuple(int(c) for c in px) for px in image.pixels.reshape(-1, 3)]

    def weight(i: int, j: int) -> float:
        if metric is not None:
            return float(metric(np.array(colors[i]), np.array(colors[j])))
        return math.dist(colors[i], colors[j]) / MAX_RGB_DISTANCE

    reach = 1
    sigma_r = stride = 0
    if params is not None:
        sigma_r = params.sigma_r(width, height)
        stride = params.stride(width, height)
        reach = max(1, math.ceil(sigma_r) - 1)

    adjacency: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for y in range(height):
        for x in range(width):
            i = y * width + x
            for dy in range(-reach, reach + 1):
                for dx in range(-reach, reach + 1):
                    if (dy, dx) == (0, 0):
                        continue
                    ny, nx = y + dy, x + dx
                    if not (0 <= ny < height and 0 <= nx < width):
                        continue
                    j = ny * width + nx
                    if connectivity == 8:
                        is_grid = max(abs(dy), abs(dx)) == 1
                    else:
                        is_grid = abs(dy) + abs(dx) == 1
                    is_tunnel = (
                        params is not None
                        and _oracle_offset_allowed(dy, dx, params, sigma_r, stride)
                        and math.dist(colors[i], colors[j]) <= params.sigma_d_raw
                    )
                    if is_grid or is_tunnel:
                        adjacency[i].append((j, weight(i, j)))

    dist = [math.inf] * n
    queue = deque()
    queued = [False] * n
    for i in seeds.flat_indices(width).tolist():
        dist[i] = 0.0
        queue.append(i)
        queued[i] = True

    while queue:
        u = queue.popleft()
        queued[u] = False
        for v, w in adjacency[u]:
            candidate = dist[u] + w
            if candidate < dist[v]:
                dist[v] = candidate
                if not queued[v]:
                    queue.append(v)
                    queued[v] = True

    return DistanceField(np.array(dist, dtype=np.float64).reshape(height, width))
