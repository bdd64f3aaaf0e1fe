"""
Dominant poles, the C_j constants and the omega(z, tau) family of the last
intermediate row
"""
from dataclasses import dataclass, field, replace
import logging
from math import factorial
from typing import Any, Literal, Optional, Sequence

import numpy as np

from .errors import ThetaMismatch, ZeroPrincipalCoefficient
from .model import MeromorphicModel, principal_coefficient, reduced_denominator_at
from .polyalg import Poly, Scalar, divided_by_linear, is_finite
from .precision import DOUBLE, EXACT, PrecisionOptions


log = logging.getLogger(__name__)

DEFAULT_MODULUS_TOL = 1e-9
THETA_TOL = 1e-9
UNIT_TOL = 1e-9

RowKind = Literal[
    "montessus_full", "montessus_inner", "intermediate", "last_intermediate", "other"
]


@dataclass(frozen=True)
class DominantAnalysis:
    """Ordering of the poles: maximal modulus first, then by multiplicity"""

    rho: float
    ell: int
    mu: int
    nu: int
    lam: int
    # Indices into model.poles; order[:nu] are the dominant poles
    order: tuple
    locations: tuple
    multiplicities: tuple

    @property
    def dominant_locations(self) -> tuple:
        """z_1..z_nu"""
        return self.locations[: self.nu]

    @property
    def non_dominant_locations(self) -> tuple:
        """z_{nu+1}..z_l"""
        return self.locations[self.nu :]

    @property
    def inner_locations(self) -> tuple:
        """z_{mu+1}..z_l, the poles strictly inside |z| < rho"""
        return self.locations[self.mu :]

    @property
    def inner_multiplicity(self) -> int:
        """Number of poles inside |z| < rho counted with multiplicity"""
        return sum(self.multiplicities[self.mu :])

    @property
    def intermediate_rows(self) -> range:
        """All m with sum_{j>mu} s_j < m < lambda"""
        return range(self.inner_multiplicity + 1, self.lam)

    def row_kind(self, m: int) -> RowKind:
        """Classify row m of the Pade table"""
        if m == self.lam:
            return "montessus_full"
        if m == self.inner_multiplicity:
            return "montessus_inner"
        if m == self.lam - 1:
            return "last_intermediate"
        if m in self.intermediate_rows:
            return "intermediate"
        return "other"


@dataclass(frozen=True)
class CjTable:
    """The constants A_j, C_j and polynomials Delta, Delta_j of the dominant poles"""

    locations: tuple
    a: tuple
    c: tuple
    delta: Poly
    delta_j: tuple
    dj_at_zj: tuple

    @property
    def nu(self) -> int:
        """Number of dominant poles"""
        return len(self.c)

    def scaled(self, t: Scalar) -> "CjTable":
        """Table with every C_j multiplied by t"""
        return replace(self, c=tuple(t * c for c in self.c))


@dataclass(frozen=True)
class TorusSpec:
    """Generator xi = (exp(2 pi i theta_1), ..) of the monothetic group F"""

    thetas: tuple
    independent: bool = True
    # Integer rows k with sum_j k_j theta_j an integer
    relations: tuple = ()

    def __post_init__(self):
        ctx = EXACT.ctx
        object.__setattr__(self, "thetas", tuple(ctx.mpf(t) for t in self.thetas))
        object.__setattr__(
            self, "relations", tuple(tuple(int(k) for k in row) for row in self.relations)
        )

        if self.independent and self.relations:
            raise ValueError("Arguments declared independent but relations were given")

        for row in self.relations:
            if len(row) != self.nu:
                raise ValueError(f"Relation {row} must have {self.nu} entries")

            value = ctx.fsum(k * theta for k, theta in zip(row, self.thetas))
            if abs(value - ctx.nint(value)) > THETA_TOL:
                raise ThetaMismatch(f"Declared relation {row} does not hold")

    @staticmethod
    def from_model(
        m: MeromorphicModel,
        analysis: DominantAnalysis,
        independent: bool = True,
        relations: Sequence[Sequence[int]] = (),
    ) -> "TorusSpec":
        """Torus data of the dominant poles of a model"""
        ctx = EXACT.ctx
        thetas = []

        for index in analysis.order[: analysis.nu]:
            pole = m.poles[index]
            if pole.theta is None:
                log.warning(
                    "Pole %d has no exact argument; recovering it from the location",
                    index,
                )
                theta = ctx.arg(pole.location) / (2 * ctx.pi)
            else:
                theta = pole.theta

            expected = analysis.rho * ctx.expjpi(2 * theta)
            if abs(pole.location - expected) >= THETA_TOL:
                raise ThetaMismatch(
                    f"Pole {index} does not match rho * exp(2 pi i theta) for theta = {theta}"
                )
            thetas.append(theta)

        return TorusSpec(thetas=tuple(thetas), independent=independent, relations=relations)

    @property
    def nu(self) -> int:
        """Dimension of the torus"""
        return len(self.thetas)

    @property
    def xi(self) -> tuple:
        """The generator xi"""
        return orbit_point(self, 1)

    @property
    def rank_declaration(self) -> Literal["independent", "relations", "unknown"]:
        """How the arithmetic nature of the arguments was declared"""
        if self.independent:
            return "independent"
        return "relations" if self.relations else "unknown"

    @property
    def declared_rank(self) -> Optional[int]:
        """r, where r + 1 is the rank of 1, theta_1, .., theta_nu over Q"""
        if self.independent:
            return self.nu
        if not self.relations:
            return None
        return self.nu - int(np.linalg.matrix_rank(np.array(self.relations, dtype=float)))


@dataclass(frozen=True)
class OmegaPoly:
    """omega(z, tau) = sum_j C_j Delta_j(z) tau_j"""

    tau: tuple
    poly: Poly


@dataclass(frozen=True)
class PredictedLimitSet:
    """Predicted limit points of the poles of pi_{n, lambda-1}"""

    # (location, multiplicity) pairs, dominant poles with multiplicity s_j - 1
    isolated: tuple
    cj: CjTable
    # Filled in by the region module's orbit sampler
    nf: Optional[Any] = field(default=None)

    @property
    def points(self) -> list[complex]:
        """Isolated points, repeated by multiplicity"""
        return [z for z, mult in self.isolated for _ in range(mult)]

    def with_samples(self, nf: Any) -> "PredictedLimitSet":
        """Attach the sampled zero set N_F"""
        return replace(self, nf=nf)


def analyze_poles(
    m: MeromorphicModel, modulus_tol: float = DEFAULT_MODULUS_TOL
) -> DominantAnalysis:
    """Order the poles and select the dominant ones"""
    poles = m.poles
    moduli = [pole.modulus for pole in poles]
    rho = max(moduli)

    maximal = [i for i, r in enumerate(moduli) if rho - r <= modulus_tol]
    maximal.sort(key=lambda i: (-poles[i].multiplicity, poles[i].turns))

    top = poles[maximal[0]].multiplicity
    nu = sum(1 for i in maximal if poles[i].multiplicity == top)

    inner = [i for i in range(len(poles)) if i not in maximal]
    inner.sort(key=lambda i: (-moduli[i], -poles[i].multiplicity, poles[i].turns))

    order = tuple(maximal + inner)
    analysis = DominantAnalysis(
        rho=rho,
        ell=len(poles),
        mu=len(maximal),
        nu=nu,
        lam=m.total_multiplicity,
        order=order,
        locations=tuple(complex(poles[i].location) for i in order),
        multiplicities=tuple(poles[i].multiplicity for i in order),
    )
    log.info(
        "rho=%g l=%d mu=%d nu=%d lambda=%d",
        rho,
        analysis.ell,
        analysis.mu,
        analysis.nu,
        analysis.lam,
    )
    return analysis


def compute_cj(
    m: MeromorphicModel,
    d: DominantAnalysis,
    precision: PrecisionOptions = DOUBLE,
    zero_tol: float = 1e-14,
) -> CjTable:
    """C_j = 1 / ((s_j - 1)! z_j^{s_j - 1} D_j(z_j)^2 A_j) for the dominant poles"""
    numerator = Poly(tuple(precision.vector(m.rational_numerator.coeffs)))
    locations, a_values, c_values, dj_values = [], [], [], []

    for index in d.order[: d.nu]:
        pole = m.poles[index]
        zj = precision.scalar(pole.location)
        s = pole.multiplicity

        if abs(numerator(zj)) <= zero_tol * max(numerator.scale(zj), 1e-300):
            raise ZeroPrincipalCoefficient(
                f"A_j vanishes at pole {index}; it is not a pole of multiplicity {s}"
            )

        a = principal_coefficient(m, index, precision)
        dj = reduced_denominator_at(m, index, zj, precision)
        c = 1 / (factorial(s - 1) * zj ** (s - 1) * dj**2 * a)

        if not is_finite(c) or c == 0:
            raise ZeroPrincipalCoefficient(f"C_j is not finite and nonzero at pole {index}")

        locations.append(zj)
        a_values.append(a)
        c_values.append(c)
        dj_values.append(dj)

    delta = Poly.from_roots(locations)
    delta_j = tuple(divided_by_linear(delta, zj) for zj in locations)

    return CjTable(
        locations=tuple(locations),
        a=tuple(a_values),
        c=tuple(c_values),
        delta=delta,
        delta_j=delta_j,
        dj_at_zj=tuple(dj_values),
    )


def omega_at(c: CjTable, tau: Sequence[Scalar], unit_tol: float = UNIT_TOL) -> OmegaPoly:
    """The polynomial omega(., tau) of degree at most nu - 1"""
    tau = tuple(tau)
    if len(tau) != c.nu:
        raise ValueError(f"tau must have {c.nu} components, got {len(tau)}")

    if any(abs(abs(t) - 1) > unit_tol for t in tau):
        raise ValueError("tau must lie on the torus (unit-modulus components)")

    poly = Poly()
    for cj, delta_j, t in zip(c.c, c.delta_j, tau):
        poly = poly + Poly(tuple(cj * t * x for x in delta_j.coeffs))

    return OmegaPoly(tau=tau, poly=poly)


def orbit_point(t: TorusSpec, n: int) -> tuple:
    """xi^n, with each exponent n * theta_j reduced modulo 1 before exponentiation"""
    ctx = EXACT.ctx
    return tuple(complex(ctx.expjpi(2 * ctx.frac(n * theta))) for theta in t.thetas)


def predicted_limit_poles(
    m: MeromorphicModel, d: DominantAnalysis, c: CjTable
) -> PredictedLimitSet:
    """
    Isolated predicted limit points: the dominant poles with multiplicity
    s_j - 1 (dropped when simple) and every other pole with its multiplicity.
    The zeros of the omega family are attached separately.
    """
    isolated = []
    for position, (z, s) in enumerate(zip(d.locations, d.multiplicities)):
        mult = s - 1 if position < d.nu else s
        if mult > 0:
            isolated.append((z, mult))

    return PredictedLimitSet(isolated=tuple(isolated), cj=c)
