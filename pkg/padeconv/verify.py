"""
Numerical experiments for the convergence of Pade rows and the limit points
of their poles
"""
from dataclasses import dataclass, field
import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import HorizonExhausted, MarginViolation, RowMismatch
from .model import MeromorphicModel, eval_model, taylor_coefficients
from .pade import pade_approximant, pade_poles
from .polyalg import Scalar, roots
from .precision import DOUBLE, PrecisionOptions
from .region import OMEGA_TRIM_TOL, NFSample, RegionGrid, g_values, in_N, sample_NF
from .rowtheory import (
    CjTable,
    DominantAnalysis,
    PredictedLimitSet,
    TorusSpec,
    analyze_poles,
    compute_cj,
    omega_at,
    orbit_point,
    predicted_limit_poles,
)
from .util import complex_dict, geometric_mean, json_float


log = logging.getLogger(__name__)

DEFAULT_POINT_COUNT = 64
DEFAULT_ORBIT_SAMPLES = 2000
DEFAULT_HORIZON = 10000
TREND_RATIO = 0.9
CONDITIONING_FLOOR = 1e-13


@dataclass(frozen=True)
class CompactSetSpec:
    """Finite sample of a compact set K together with its declared margin"""

    points: tuple
    margin: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(complex(z) for z in self.points))
        if not self.points:
            raise ValueError("Compact set sample is empty")
        if self.margin < 0:
            raise ValueError(f"Margin must be non-negative, got {self.margin}")

    def __len__(self):
        return len(self.points)

    @staticmethod
    def on_circle(
        radius: float,
        count: int = DEFAULT_POINT_COUNT,
        margin: float = 0.0,
        center: complex = 0,
        exclude: Optional[Callable[[complex], bool]] = None,
    ) -> "CompactSetSpec":
        """Equally spaced points on a circle, minus those matched by exclude"""
        points = [
            complex(center) + radius * complex(np.exp(2j * np.pi * k / count))
            for k in range(count)
        ]
        if exclude is not None:
            points = [z for z in points if not exclude(z)]
        return CompactSetSpec(points=tuple(points), margin=margin)

    @staticmethod
    def from_grid(
        grid: RegionGrid,
        margin: float,
        count: int = DEFAULT_POINT_COUNT,
        seed: int = 0,
    ) -> "CompactSetSpec":
        """
        Random cells of the U_F mask (U when no orbit sample is attached) that
        keep at least margin from the excluded cells, the exclusion disks and
        the circle |z| = rho.
        """
        target = _target_mask(grid)
        steps = math.ceil(margin / min(grid.cell_width, grid.cell_height)) + 1
        candidates = _eroded(target | ~grid.mask_disk, steps) & target

        z = grid.points
        candidates &= grid.rho - np.abs(z) >= margin
        for center in grid.exclusion_centers:
            candidates &= np.abs(z - center) - grid.exclusion_radius >= margin

        iy, ix = np.nonzero(candidates)
        if not len(iy):
            raise MarginViolation(f"No grid cell keeps a margin of {margin}")

        rng = np.random.default_rng(seed)
        chosen = np.sort(rng.choice(len(iy), size=min(count, len(iy)), replace=False))
        points = tuple(complex(z[iy[i], ix[i]]) for i in chosen)
        return CompactSetSpec(points=points, margin=margin)

    @staticmethod
    def near_dominant(
        c: CjTable,
        d: DominantAnalysis,
        j: int,
        radius: float,
        count: int = DEFAULT_POINT_COUNT,
        margin: float = 0.0,
    ) -> "CompactSetSpec":
        """Points on a circle around dominant pole j lying in U_j intersected with the disk"""
        if not 0 <= j < d.nu:
            raise ValueError(f"Dominant pole index must be in [0, {d.nu}), got {j}")

        def outside(z: complex) -> bool:
            return abs(z) > d.rho - margin or g_values(c, z)[j] <= 0

        return CompactSetSpec.on_circle(
            radius, count, margin, center=d.locations[j], exclude=outside
        )


def _target_mask(grid: RegionGrid) -> np.ndarray:
    return grid.mask_uf if grid.mask_uf is not None else grid.mask_u


def _eroded(mask: np.ndarray, steps: int) -> np.ndarray:
    """Cells whose whole (2 steps + 1)-square neighbourhood lies in mask"""
    result = mask.copy()
    for _ in range(steps):
        shrunk = result.copy()
        shrunk[1:, :] &= result[:-1, :]
        shrunk[:-1, :] &= result[1:, :]
        shrunk[:, 1:] &= result[:, :-1]
        shrunk[:, :-1] &= result[:, 1:]
        shrunk[1:, 1:] &= result[:-1, :-1]
        shrunk[:-1, :-1] &= result[1:, 1:]
        shrunk[1:, :-1] &= result[:-1, 1:]
        shrunk[:-1, 1:] &= result[1:, :-1]
        shrunk[0, :] = shrunk[-1, :] = False
        shrunk[:, 0] = shrunk[:, -1] = False
        result = shrunk
    return result


def certify_margin(K: CompactSetSpec, grid: RegionGrid) -> float:
    """
    Smallest distance from K to the excluded grid cells, the exclusion disks and
    the circle |z| = rho. Raises MarginViolation when it is below K.margin.
    """
    z = np.asarray(K.points, dtype=complex)
    distances = [grid.rho - np.abs(z)]

    for center in grid.exclusion_centers:
        distances.append(np.abs(z - center) - grid.exclusion_radius)

    bad = grid.mask_disk & ~_target_mask(grid) & ~grid.mask_excluded
    cells = grid.points[bad]
    if cells.size:
        distances.append(np.abs(z[:, None] - cells[None, :]).min(axis=1))

    certified = float(np.min(np.stack(distances)))
    if certified < K.margin:
        raise MarginViolation(
            f"Compact set is {certified:.4g} from the excluded sets, below its margin {K.margin}"
        )
    return certified


@dataclass(frozen=True)
class LimitSetOracle:
    """Distance to the predicted limit set of the poles"""

    points: tuple = ()
    # N membership stands in for N_F when the arguments are declared independent
    cj: Optional[CjTable] = None

    @staticmethod
    def from_prediction(
        predicted: PredictedLimitSet, sample: Optional[NFSample] = None
    ) -> "LimitSetOracle":
        """Isolated points plus the sampled N_F cloud"""
        points = [complex(z) for z, _ in predicted.isolated]
        use_region = False
        if sample is not None:
            points.extend(sample.points)
            use_region = sample.equals_n
        return LimitSetOracle(points=tuple(points), cj=predicted.cj if use_region else None)

    def distance(self, z: Scalar) -> float:
        """Distance from z to the predicted set (inf when the set is empty)"""
        z = complex(z)
        if self.cj is not None and in_N(self.cj, z):
            return 0.0
        if not self.points:
            return math.inf
        return float(np.abs(np.asarray(self.points) - z).min())


@dataclass(frozen=True)
class PoleRecord:
    """Poles of one approximant and their distances to the predicted set"""

    n: int
    poles: tuple = ()
    spurious: tuple = ()
    distances: tuple = ()

    @property
    def max_distance(self) -> float:
        """Largest distance, 0 for an empty pole set"""
        return max(self.distances, default=0.0)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "poles": [complex_dict(z) for z in self.poles],
            "spurious": list(self.spurious),
            "distances": [json_float(d) for d in self.distances],
            "max_distance": json_float(self.max_distance),
        }


@dataclass(frozen=True)
class ConvergenceRecord:
    """Sup error of pi_{n,m} on K"""

    n: int
    sup_error: float
    residual: float
    degenerate: bool
    poles: PoleRecord

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "sup_error": json_float(self.sup_error),
            "residual": json_float(self.residual),
            "degenerate": self.degenerate,
            "poles": self.poles.to_dict(),
        }


@dataclass(frozen=True)
class ConvergenceReport:
    """Records sorted by n and the trend verdict computed from them"""

    m: int
    records: tuple
    verdict: str
    ratio: Optional[float]
    max_final_error: float
    recommend_extended: bool = False

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "records": [r.to_dict() for r in self.records],
            "summary": {
                "verdict": self.verdict,
                "ratio": None if self.ratio is None else json_float(self.ratio),
                "max_final_error": json_float(self.max_final_error),
                "recommend_extended": self.recommend_extended,
            },
        }


@dataclass(frozen=True)
class PoleLimitReport:
    """Per-n distances of the computed poles to the predicted limit set"""

    records: tuple

    @property
    def max_distances(self) -> list[float]:
        """Largest pole distance for each n"""
        return [r.max_distance for r in self.records]

    def to_dict(self) -> dict:
        return {"records": [r.to_dict() for r in self.records]}


@dataclass(frozen=True)
class SubsequenceReport:
    """Denominators along the indices whose orbit points approach tau0"""

    tau0: tuple
    eps: float
    indices: tuple
    max_projective_distance: float
    max_zero_mismatch: float
    reference_zeros: tuple = ()
    pole_sets: tuple = field(default=())

    def to_dict(self) -> dict:
        return {
            "tau0": [complex_dict(t) for t in self.tau0],
            "eps": self.eps,
            "indices": list(self.indices),
            "max_projective_distance": json_float(self.max_projective_distance),
            "max_zero_mismatch": json_float(self.max_zero_mismatch),
            "reference_zeros": [complex_dict(z) for z in self.reference_zeros],
        }


def trend_verdict(errors: Sequence[float]) -> tuple[str, Optional[float]]:
    """
    Compare the geometric mean of the last third of the errors with the first
    third; "consistent" when it dropped below TREND_RATIO times.
    """
    if len(errors) < 2:
        return "inconclusive", None

    third = max(1, len(errors) // 3)
    ratio = geometric_mean(errors[-third:]) / geometric_mean(errors[:third])
    return ("consistent" if ratio < TREND_RATIO else "inconclusive"), ratio


def _pole_record(
    n: int, found, oracle: Optional[LimitSetOracle]
) -> PoleRecord:
    poles = tuple(found.as_complex())
    distances = tuple(oracle.distance(z) for z in poles) if oracle is not None else ()
    return PoleRecord(n=n, poles=poles, spurious=tuple(found.spurious), distances=distances)


def row_experiment(
    model: MeromorphicModel,
    K: CompactSetSpec,
    n_values: Sequence[int],
    m: int,
    precision: PrecisionOptions = DOUBLE,
    oracle: Optional[LimitSetOracle] = None,
    seed: int = 0,
) -> ConvergenceReport:
    """
    Sup error of pi_{n,m} on the points of K for each n, for any row m.

    :param oracle: When given, the poles of each approximant are compared with it
    """
    n_values = sorted(set(int(n) for n in n_values))
    if not n_values:
        raise ValueError("n_values is empty")
    if n_values[0] < 0 or m < 0:
        raise ValueError("Degrees must be non-negative")

    series = taylor_coefficients(model, n_values[-1] + m, precision)
    points = [precision.scalar(z) for z in K.points]
    targets = [eval_model(model, z, precision) for z in points]

    records = []
    for n in n_values:
        approx = pade_approximant(series, n, m, precision=precision)
        error = max(float(abs(approx(z) - a)) for z, a in zip(points, targets))
        found = pade_poles(approx, seed=seed)
        records.append(
            ConvergenceRecord(
                n=n,
                sup_error=error,
                residual=approx.residual,
                degenerate=approx.degenerate,
                poles=_pole_record(n, found, oracle),
            )
        )
        log.debug("n=%d m=%d sup error %.3e", n, m, error)

    recommend = not precision.extended and any(
        r.residual < CONDITIONING_FLOOR for r in records
    )
    if recommend:
        log.warning(
            "Toeplitz conditioning residual fell below %g in double precision; "
            "rerun with extended precision",
            CONDITIONING_FLOOR,
        )

    verdict, ratio = trend_verdict([r.sup_error for r in records])
    third = max(1, len(records) // 3)
    return ConvergenceReport(
        m=m,
        records=tuple(records),
        verdict=verdict,
        ratio=ratio,
        max_final_error=max(r.sup_error for r in records[-third:]),
        recommend_extended=recommend,
    )


def convergence_experiment(
    model: MeromorphicModel,
    K: CompactSetSpec,
    n_values: Sequence[int],
    precision: PrecisionOptions = DOUBLE,
    m: Optional[int] = None,
    oracle: Optional[LimitSetOracle] = None,
    seed: int = 0,
) -> ConvergenceReport:
    """row_experiment on the last intermediate row m = lambda - 1"""
    lam = model.total_multiplicity
    if m is not None and m != lam - 1:
        raise RowMismatch(f"Row {m} requested, the last intermediate row is {lam - 1}")

    return row_experiment(model, K, n_values, lam - 1, precision, oracle=oracle, seed=seed)


def build_oracle(
    model: MeromorphicModel,
    torus: Optional[TorusSpec] = None,
    samples: int = DEFAULT_ORBIT_SAMPLES,
    seed: int = 0,
) -> LimitSetOracle:
    """Predicted limit set of the poles of the last intermediate row"""
    analysis = analyze_poles(model)
    cj = compute_cj(model, analysis)
    torus = torus or TorusSpec.from_model(model, analysis)
    sample = sample_NF(cj, torus, analysis, samples, seed=seed)
    return LimitSetOracle.from_prediction(predicted_limit_poles(model, analysis, cj), sample)


def pole_limit_experiment(
    model: MeromorphicModel,
    n_values: Sequence[int],
    torus: Optional[TorusSpec] = None,
    precision: PrecisionOptions = DOUBLE,
    samples: int = DEFAULT_ORBIT_SAMPLES,
    oracle: Optional[LimitSetOracle] = None,
    seed: int = 0,
) -> PoleLimitReport:
    """Distances of the poles of pi_{n, lambda-1} to the predicted limit set"""
    n_values = sorted(set(int(n) for n in n_values))
    if not n_values:
        raise ValueError("n_values is empty")

    oracle = oracle or build_oracle(model, torus, samples, seed)
    m = model.total_multiplicity - 1
    series = taylor_coefficients(model, n_values[-1] + m, precision)

    records = []
    for n in n_values:
        approx = pade_approximant(series, n, m, precision=precision)
        records.append(_pole_record(n, pade_poles(approx, seed=seed), oracle))

    return PoleLimitReport(records=tuple(records))


def projective_distance(u: Sequence[Scalar], v: Sequence[Scalar]) -> float:
    """sin of the angle between two complex lines"""
    u = np.array([complex(x) for x in u])
    v = np.array([complex(x) for x in v])
    size = max(len(u), len(v))
    u = np.pad(u, (0, size - len(u)))
    v = np.pad(v, (0, size - len(v)))

    uu = np.vdot(u, u).real
    vv = np.vdot(v, v).real
    if uu == 0 or vv == 0:
        raise ValueError("Projective distance of a zero vector")

    # Component of v orthogonal to u
    residual = v - (np.vdot(u, v) / uu) * u
    return float(min(1.0, np.linalg.norm(residual) / np.sqrt(vv)))


def zero_set_mismatch(found: Sequence[complex], reference: Sequence[complex]) -> float:
    """Two-sided Hausdorff distance between finite point sets"""
    if not found and not reference:
        return 0.0
    if not found or not reference:
        return math.inf

    distances = np.abs(np.asarray(found)[:, None] - np.asarray(reference)[None, :])
    return float(max(distances.min(axis=1).max(), distances.min(axis=0).max()))


def subsequence_experiment(
    model: MeromorphicModel,
    torus: TorusSpec,
    tau0: Sequence[complex],
    eps: float,
    count: int,
    precision: PrecisionOptions = DOUBLE,
    horizon: int = DEFAULT_HORIZON,
    seed: int = 0,
) -> SubsequenceReport:
    """
    Denominators of pi_{n, lambda-1} along the indices n with xi^(n + lambda)
    within eps of tau0 in the max norm.
    """
    analysis = analyze_poles(model)
    cj = compute_cj(model, analysis)
    tau0 = tuple(complex(t) for t in tau0)
    if len(tau0) != torus.nu:
        raise ValueError(f"tau0 must have {torus.nu} components, got {len(tau0)}")

    indices = []
    for n in range(horizon):
        tau = orbit_point(torus, n + analysis.lam)
        if max(abs(a - b) for a, b in zip(tau, tau0)) < eps:
            indices.append(n)
            if len(indices) == count:
                break

    if len(indices) < count:
        raise HorizonExhausted(
            f"Found {len(indices)} of {count} orbit points within {eps} of tau0 "
            f"in {horizon} steps"
        )

    reference = list(complex(z) for z in predicted_limit_poles(model, analysis, cj).points)
    omega = omega_at(cj, tau0).poly.trimmed(OMEGA_TRIM_TOL)
    if omega.degree >= 1:
        reference.extend(roots(omega, seed=seed).as_complex())

    m = analysis.lam - 1
    series = taylor_coefficients(model, indices[-1] + m, precision)

    denominators, pole_sets = [], []
    mismatch = 0.0
    for n in indices:
        approx = pade_approximant(series, n, m, precision=precision)
        denominators.append(approx.denominator.coeffs)
        poles = pade_poles(approx, seed=seed).as_complex()
        pole_sets.append(tuple(poles))
        mismatch = max(mismatch, zero_set_mismatch(poles, reference))

    spread = max(
        (
            projective_distance(denominators[i], denominators[k])
            for i in range(len(denominators))
            for k in range(i)
        ),
        default=0.0,
    )
    log.info(
        "Subsequence of %d indices: projective spread %.3e, zero mismatch %.3e",
        len(indices),
        spread,
        mismatch,
    )

    return SubsequenceReport(
        tau0=tau0,
        eps=eps,
        indices=tuple(indices),
        max_projective_distance=spread,
        max_zero_mismatch=mismatch,
        reference_zeros=tuple(reference),
        pole_sets=tuple(pole_sets),
    )
