"""
The sets N, N_F, U and U_F and the boundary curves of N
"""
from dataclasses import dataclass, replace
import logging
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .contour import component_ids, zero_contours
from .errors import NonConvergence
from .polyalg import DEFAULT_ROOT_TOL, Scalar, roots
from .rowtheory import CjTable, DominantAnalysis, TorusSpec, omega_at, orbit_point


log = logging.getLogger(__name__)

DEFAULT_RESOLUTION = 601
DEFAULT_HALF_WIDTH = 1.5
DEFAULT_EXCLUSION = 0.02
MEMBERSHIP_TOL = 1e-12
OMEGA_TRIM_TOL = 1e-10


def term_moduli(c: CjTable, z) -> np.ndarray:
    """|C_k Delta_k(z)| for k = 1..nu, stacked along the first axis"""
    z = np.asarray(z, dtype=complex)
    return np.stack(
        [
            abs(complex(ck)) * np.abs(npoly.polyval(z, delta.to_numpy()))
            for ck, delta in zip(c.c, c.delta_j)
        ]
    )


def g_values(c: CjTable, z: Scalar) -> tuple:
    """g_j(z) = 2 |C_j Delta_j(z)| - sum_k |C_k Delta_k(z)|"""
    terms = term_moduli(c, complex(z))
    return tuple(float(g) for g in 2 * terms - terms.sum(axis=0))


def in_N(c: CjTable, z: Scalar, tol: float = MEMBERSHIP_TOL) -> bool:
    """Is z in the closed set N (max_j g_j(z) <= 0, up to tol relative rounding)?"""
    terms = term_moduli(c, complex(z))
    total = terms.sum(axis=0)
    return bool((2 * terms - total).max() <= tol * total)


@dataclass(frozen=True)
class NFSample:
    """Zeros of omega(., xi^(n + lambda)) for sampled n"""

    points: tuple = ()
    sources: tuple = ()
    failures: int = 0
    # The arguments were declared independent over Q, so N_F = N
    equals_n: bool = False

    def __len__(self):
        return len(self.points)

    def fill_fraction(self, grid: "RegionGrid") -> float:
        """Fraction of N cells that contain at least one sample point"""
        total = int(np.count_nonzero(grid.mask_n))
        if not total or not self.points:
            return 0.0

        hit = np.zeros_like(grid.mask_n)
        iy, ix = grid.cell_index(self.points)
        hit[iy, ix] = True
        return int(np.count_nonzero(hit & grid.mask_n)) / total


@dataclass(frozen=True, eq=False)
class RegionGrid:
    """Rasterized membership of N, D_rho, U and U_F"""

    box: tuple
    nx: int
    ny: int
    xs: np.ndarray
    ys: np.ndarray
    # g[j, iy, ix], with values within rounding of zero snapped to zero
    g: np.ndarray
    scale: np.ndarray
    gmax: np.ndarray
    mask_n: np.ndarray
    mask_disk: np.ndarray
    mask_u: np.ndarray
    rho: float
    exclusion_radius: float
    exclusion_centers: tuple
    mask_uf: Optional[np.ndarray] = None

    @property
    def points(self) -> np.ndarray:
        """Cell nodes as complex numbers, indexed [iy, ix]"""
        return self.xs[None, :] + 1j * self.ys[:, None]

    @property
    def cell_width(self) -> float:
        """Horizontal node spacing"""
        return float(self.xs[1] - self.xs[0])

    @property
    def cell_height(self) -> float:
        """Vertical node spacing"""
        return float(self.ys[1] - self.ys[0])

    @property
    def cell_diagonal(self) -> float:
        """Length of a cell diagonal"""
        return float(np.hypot(self.cell_width, self.cell_height))

    @property
    def mask_excluded(self) -> np.ndarray:
        """Cells inside an exclusion disk around a pole inside |z| < rho"""
        z = self.points
        excluded = np.zeros(z.shape, dtype=bool)
        for center in self.exclusion_centers:
            excluded |= np.abs(z - center) < self.exclusion_radius
        return excluded

    def cell_index(self, points: Sequence[complex]) -> tuple[np.ndarray, np.ndarray]:
        """Nearest node indices (iy, ix) of the points lying inside the box"""
        z = np.asarray(points, dtype=complex)
        ix = np.rint((z.real - self.xs[0]) / self.cell_width).astype(int)
        iy = np.rint((z.imag - self.ys[0]) / self.cell_height).astype(int)
        inside = (ix >= 0) & (ix < self.nx) & (iy >= 0) & (iy < self.ny)
        return iy[inside], ix[inside]

    def with_nf(self, sample: NFSample) -> "RegionGrid":
        """Grid with the U_F mask filled in from an orbit sample"""
        if sample.equals_n:
            return replace(self, mask_uf=self.mask_u.copy())

        hit = np.zeros_like(self.mask_n)
        iy, ix = self.cell_index(sample.points)
        hit[iy, ix] = True

        # Dilate by one cell in each direction
        grown = hit.copy()
        grown[1:, :] |= hit[:-1, :]
        grown[:-1, :] |= hit[1:, :]
        grown[:, 1:] |= hit[:, :-1]
        grown[:, :-1] |= hit[:, 1:]

        mask_uf = self.mask_disk & ~grown & ~self.mask_excluded
        return replace(self, mask_uf=mask_uf)


@dataclass(frozen=True)
class CurveSet:
    """Traced boundary curves L_j of N"""

    curves: tuple = ()
    component_labels: tuple = ()
    # Per curve, per polyline, per vertex: 2 * cell diagonal * local |grad g_j|
    vertex_tolerance: tuple = ()
    degenerate_cells: tuple = ()

    @property
    def component_count(self) -> tuple:
        """Number of connected components of each L_j"""
        return tuple(len(set(labels)) for labels in self.component_labels)

    @property
    def tolerance(self) -> tuple:
        """Largest vertex tolerance of each L_j"""
        return tuple(
            max((max(t, default=0.0) for t in per_line), default=0.0)
            for per_line in self.vertex_tolerance
        )


def default_box(rho: float, half_width: float = DEFAULT_HALF_WIDTH) -> tuple:
    """Square of half-width half_width * rho centered at 0"""
    h = half_width * rho
    return (-h, h, -h, h)


def scan_region(
    c: CjTable,
    d: DominantAnalysis,
    box: Optional[tuple] = None,
    nx: int = DEFAULT_RESOLUTION,
    ny: int = DEFAULT_RESOLUTION,
    exclusion_radius: Optional[float] = None,
    tol: float = MEMBERSHIP_TOL,
) -> RegionGrid:
    """Evaluate g_j on a grid and build the N, disk and U masks"""
    if nx < 2 or ny < 2:
        raise ValueError(f"Grid needs at least 2 x 2 nodes, got {nx} x {ny}")

    box = tuple(float(v) for v in (box or default_box(d.rho)))
    xmin, xmax, ymin, ymax = box
    if exclusion_radius is None:
        exclusion_radius = DEFAULT_EXCLUSION * d.rho

    xs = np.linspace(xmin, xmax, nx)
    ys = np.linspace(ymin, ymax, ny)
    z = xs[None, :] + 1j * ys[:, None]

    terms = term_moduli(c, z)
    scale = terms.sum(axis=0)
    g = 2 * terms - scale
    g[np.abs(g) <= tol * scale] = 0.0
    gmax = g.max(axis=0)

    grid = RegionGrid(
        box=box,
        nx=nx,
        ny=ny,
        xs=xs,
        ys=ys,
        g=g,
        scale=scale,
        gmax=gmax,
        mask_n=gmax <= 0,
        mask_disk=np.abs(z) < d.rho,
        mask_u=np.zeros(z.shape, dtype=bool),
        rho=d.rho,
        exclusion_radius=float(exclusion_radius),
        exclusion_centers=tuple(complex(p) for p in d.inner_locations),
    )
    mask_u = grid.mask_disk & ~grid.mask_n & ~grid.mask_excluded
    log.info(
        "Scanned %d x %d grid: %d cells in N, %d in U",
        nx,
        ny,
        int(np.count_nonzero(grid.mask_n)),
        int(np.count_nonzero(mask_u)),
    )
    return replace(grid, mask_u=mask_u)


def _vertex_tolerance(grid: RegionGrid, slope: np.ndarray, points: tuple) -> tuple:
    """Interpolation bound from the largest corner gradient of each vertex's cell"""
    z = np.asarray(points, dtype=complex)
    ix = np.floor((z.real - grid.xs[0]) / grid.cell_width).astype(int)
    iy = np.floor((z.imag - grid.ys[0]) / grid.cell_height).astype(int)
    ix = np.clip(ix, 0, grid.nx - 2)
    iy = np.clip(iy, 0, grid.ny - 2)

    local = np.maximum.reduce(
        [slope[iy, ix], slope[iy, ix + 1], slope[iy + 1, ix], slope[iy + 1, ix + 1]]
    )
    return tuple(float(t) for t in 2 * grid.cell_diagonal * local)


def trace_boundaries(grid: RegionGrid, c: CjTable) -> CurveSet:
    """Marching-squares tracing of the zero level set of each g_j"""
    curves, labels, tolerances, degenerate = [], [], [], []

    for j in range(grid.g.shape[0]):
        values = grid.g[j]
        result = zero_contours(
            grid.xs, grid.ys, values, center=lambda x, y, j=j: g_values(c, complex(x, y))[j]
        )

        gy, gx = np.gradient(values, grid.ys, grid.xs)
        slope = np.hypot(gx, gy)
        tolerances.append(
            tuple(_vertex_tolerance(grid, slope, line.points) for line in result.polylines)
        )

        curves.append(result.polylines)
        labels.append(tuple(component_ids(list(result.polylines), grid.cell_diagonal)))
        degenerate.append(result.degenerate_cells)

    curve_set = CurveSet(
        curves=tuple(curves),
        component_labels=tuple(labels),
        vertex_tolerance=tuple(tolerances),
        degenerate_cells=tuple(degenerate),
    )
    log.info("Boundary components per curve: %s", curve_set.component_count)
    return curve_set


def sample_NF(
    c: CjTable,
    t: TorusSpec,
    d: DominantAnalysis,
    M: int,
    tol: float = DEFAULT_ROOT_TOL,
    seed: int = 0,
    trim_tol: float = OMEGA_TRIM_TOL,
) -> NFSample:
    """
    Zeros of omega(., tau) along the orbit tau = xi^(n + lambda), n = 0..M-1.

    tol is the relative residual the root finder must reach; leading
    coefficients below trim_tol times the largest are dropped first.

    Samples whose roots cannot be found are skipped and counted.
    """
    if M < 1:
        raise ValueError(f"M must be positive, got {M}")

    points, sources = [], []
    failures = 0

    for n in range(M):
        tau = orbit_point(t, n + d.lam)
        poly = omega_at(c, tau).poly.trimmed(trim_tol)
        if poly.degree < 1:
            continue

        try:
            found = roots(poly, tol=tol, seed=seed)
        except NonConvergence:
            failures += 1
            continue

        points.extend(complex(z) for z in found.roots)
        sources.extend(n for _ in found.roots)

    if failures:
        log.warning("Root finding failed for %d of %d orbit samples", failures, M)

    return NFSample(
        points=tuple(points),
        sources=tuple(sources),
        failures=failures,
        equals_n=t.independent,
    )
