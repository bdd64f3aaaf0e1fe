"""
Marching squares for the zero level set of a sampled function
"""
from dataclasses import dataclass
import logging
from typing import Callable, Optional

import numpy as np


log = logging.getLogger(__name__)

# Corners are numbered (ix, iy), (ix+1, iy), (ix+1, iy+1), (ix, iy+1); corner 0 is
# the most significant bit of the case index. Saddle cases list the segments for
# a non-positive and a positive cell center.
CASES = [
    (False, []),  # 0000
    (False, [((0, 3), (2, 3))]),  # 0001
    (False, [((1, 2), (2, 3))]),  # 0010
    (False, [((0, 3), (1, 2))]),  # 0011
    (False, [((0, 1), (1, 2))]),  # 0100
    (True, ([((0, 1), (1, 2)), ((0, 3), (2, 3))], [((0, 1), (0, 3)), ((1, 2), (3, 2))])),  # 0101
    (False, [((0, 1), (2, 3))]),  # 0110
    (False, [((0, 1), (0, 3))]),  # 0111
    (False, [((0, 1), (0, 3))]),  # 1000
    (False, [((0, 1), (2, 3))]),  # 1001
    (True, ([((0, 1), (0, 3)), ((1, 2), (3, 2))], [((0, 1), (1, 2)), ((0, 3), (2, 3))])),  # 1010
    (False, [((0, 1), (1, 2))]),  # 1011
    (False, [((0, 3), (1, 2))]),  # 1100
    (False, [((1, 2), (2, 3))]),  # 1101
    (False, [((0, 3), (2, 3))]),  # 1110
    (False, []),  # 1111
]

_CORNER_OFFSETS = [(0, 0), (1, 0), (1, 1), (0, 1)]


@dataclass(frozen=True)
class Polyline:
    """Connected chain of contour vertices"""

    points: tuple
    closed: bool = False

    @property
    def endpoints(self) -> tuple:
        """First and last vertex"""
        return (self.points[0], self.points[-1])


@dataclass(frozen=True)
class ContourResult:
    """Polylines of one zero level set"""

    polylines: tuple
    degenerate_cells: int = 0


def _case_indices(values: np.ndarray) -> np.ndarray:
    positive = values > 0
    return (
        8 * positive[:-1, :-1]
        + 4 * positive[:-1, 1:]
        + 2 * positive[1:, 1:]
        + positive[1:, :-1]
    ).astype(np.int8)


def zero_contours(
    xs: np.ndarray,
    ys: np.ndarray,
    values: np.ndarray,
    center: Optional[Callable[[float, float], float]] = None,
) -> ContourResult:
    """
    Trace the zero level set of values[iy, ix] sampled at (xs[ix], ys[iy]).

    Non-positive samples count as inside. Crossings are placed by linear
    interpolation along cell edges; saddle cells are resolved by the sign of
    center(x, y) at the cell center (mean of the corners when not given).
    """
    cases = _case_indices(values)
    crossing = np.nonzero((cases != 0) & (cases != 15))

    zero = values == 0
    degenerate = int(
        np.count_nonzero(zero[:-1, :-1] & zero[:-1, 1:] & zero[1:, 1:] & zero[1:, :-1])
    )
    if degenerate:
        log.warning("%d contour cells have four zero corners", degenerate)

    points: dict = {}
    segments: list = []

    def crossing_point(a: tuple, b: tuple):
        key = (a, b) if a < b else (b, a)
        if key not in points:
            (ax, ay), (bx, by) = key
            va, vb = values[ay, ax], values[by, bx]
            t = min(max(va / (va - vb), 0.0), 1.0)
            za = complex(xs[ax], ys[ay])
            zb = complex(xs[bx], ys[by])
            points[key] = za + t * (zb - za)
        return key

    for iy, ix in zip(*crossing):
        saddle, edges = CASES[cases[iy, ix]]
        if saddle:
            cx = 0.5 * (xs[ix] + xs[ix + 1])
            cy = 0.5 * (ys[iy] + ys[iy + 1])
            if center is None:
                middle = values[iy : iy + 2, ix : ix + 2].mean()
            else:
                middle = center(cx, cy)
            edges = edges[int(middle > 0)]

        nodes = [(ix + dx, iy + dy) for dx, dy in _CORNER_OFFSETS]
        for (i0, i1), (j0, j1) in edges:
            segments.append(
                (crossing_point(nodes[i0], nodes[i1]), crossing_point(nodes[j0], nodes[j1]))
            )

    polylines = _assemble(segments, points)
    return ContourResult(polylines=tuple(polylines), degenerate_cells=degenerate)


def _assemble(segments: list, points: dict) -> list[Polyline]:
    """Join segments sharing a cell edge into polylines"""
    touching: dict = {}
    for index, (a, b) in enumerate(segments):
        touching.setdefault(a, []).append(index)
        touching.setdefault(b, []).append(index)

    used = [False] * len(segments)
    polylines = []

    def walk(key, index):
        chain = []
        while True:
            used[index] = True
            a, b = segments[index]
            key = b if key == a else a
            chain.append(key)
            following = [i for i in touching[key] if not used[i]]
            if not following:
                return chain
            index = following[0]

    for start, (a, b) in enumerate(segments):
        if used[start]:
            continue

        forward = walk(a, start)
        backward = []
        others = [i for i in touching[a] if not used[i]]
        if others:
            backward = walk(a, others[0])

        keys = list(reversed(backward)) + [a] + forward
        closed = len(keys) > 2 and keys[0] == keys[-1]
        if closed:
            keys = keys[:-1]

        polylines.append(Polyline(points=tuple(points[k] for k in keys), closed=closed))

    return polylines


def component_ids(polylines: list[Polyline], tol: float) -> list[int]:
    """Group polylines whose open endpoints lie within tol of each other"""
    parent = list(range(len(polylines)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, first in enumerate(polylines):
        if first.closed:
            continue
        for j in range(i):
            second = polylines[j]
            if second.closed:
                continue
            if any(abs(p - q) <= tol for p in first.endpoints for q in second.endpoints):
                parent[find(i)] = find(j)

    roots = {}
    return [roots.setdefault(find(i), len(roots)) for i in range(len(polylines))]
