"""
Meromorphic model functions a(z) = b(z) + p(z) / D(z)
"""
from dataclasses import dataclass, field
import logging
from math import comb
from typing import Any, Optional, Sequence

from .errors import NearPole, PoleAtOrigin
from .polyalg import Poly, Scalar
from .precision import DOUBLE, EXACT, PrecisionOptions


log = logging.getLogger(__name__)

DEFAULT_EXCLUSION = 1e-9


@dataclass(frozen=True)
class PoleSpec:
    """A pole z_j of multiplicity s_j"""

    location: Any
    multiplicity: int = 1
    # Argument in turns when the pole was given as rho * exp(2 pi i theta)
    theta: Optional[Any] = None

    def __post_init__(self):
        object.__setattr__(self, "location", EXACT.scalar(self.location))
        if self.theta is not None:
            object.__setattr__(self, "theta", EXACT.ctx.mpf(self.theta))

        if self.multiplicity < 1:
            raise ValueError(f"Pole multiplicity must be positive, got {self.multiplicity}")

        if self.location == 0:
            raise PoleAtOrigin("The model must be analytic at the origin")

    @staticmethod
    def polar(rho: Any, theta_turns: Any, multiplicity: int = 1) -> "PoleSpec":
        """Pole at rho * exp(2 pi i theta) with theta in turns"""
        ctx = EXACT.ctx
        theta = ctx.mpf(theta_turns)
        location = ctx.mpf(rho) * ctx.expjpi(2 * theta)
        return PoleSpec(location=location, multiplicity=multiplicity, theta=theta)

    @property
    def modulus(self) -> float:
        """|z_j|"""
        return float(abs(self.location))

    @property
    def turns(self) -> float:
        """Argument of z_j in turns, reduced to [0, 1)"""
        ctx = EXACT.ctx
        if self.theta is not None:
            return float(ctx.frac(self.theta))
        return float(ctx.frac(ctx.arg(self.location) / (2 * ctx.pi)))


@dataclass(frozen=True)
class PowerSeries:
    """Maclaurin coefficients c_0..c_N"""

    coeffs: tuple

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def coefficient(self, k: int) -> Scalar:
        """c_k, with c_k = 0 for k < 0"""
        return self.coeffs[k] if k >= 0 else 0

    def partial_sum(self, z: Scalar, degree: Optional[int] = None) -> Scalar:
        """sum_{k <= degree} c_k z^k"""
        top = len(self.coeffs) - 1 if degree is None else degree
        return Poly(self.coeffs[: top + 1])(z)


@dataclass(frozen=True)
class MeromorphicModel:
    """Polynomial analytic part plus a proper rational part with prescribed poles"""

    radius: float
    poles: tuple
    rational_numerator: Poly = field(default_factory=lambda: Poly((1,)))
    analytic_coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "poles", tuple(self.poles))
        object.__setattr__(
            self,
            "rational_numerator",
            Poly(tuple(EXACT.scalar(c) for c in self.rational_numerator.coeffs)),
        )
        object.__setattr__(
            self, "analytic_coeffs", tuple(EXACT.scalar(c) for c in self.analytic_coeffs)
        )

        if self.radius <= 0:
            raise ValueError(f"Radius must be positive, got {self.radius}")

        if not self.poles:
            raise ValueError("The model needs at least one pole")

        for i, pole in enumerate(self.poles):
            if pole.modulus >= self.radius:
                raise ValueError(f"Pole {i} lies outside the disk |z| < {self.radius}")

            for other in self.poles[:i]:
                if abs(pole.location - other.location) < 1e-12:
                    raise ValueError(f"Pole {i} is repeated")

        if self.rational_numerator.degree >= self.total_multiplicity:
            raise ValueError(
                "Rational part must be proper (deg p < deg D); "
                "fold the polynomial part into the analytic coefficients"
            )

    @property
    def total_multiplicity(self) -> int:
        """lambda = s_1 + ... + s_l"""
        return sum(pole.multiplicity for pole in self.poles)

    @property
    def denominator(self) -> Poly:
        """D(z) = prod (z - z_j)^{s_j}"""
        return Poly.from_roots(
            pole.location for pole in self.poles for _ in range(pole.multiplicity)
        )

    def with_analytic_part(self, coeffs: Sequence[Any]) -> "MeromorphicModel":
        """Same rational part with a different polynomial b(z)"""
        return MeromorphicModel(
            radius=self.radius,
            poles=self.poles,
            rational_numerator=self.rational_numerator,
            analytic_coeffs=tuple(coeffs),
        )


def _taylor_shift(coeffs: Sequence[Scalar], a: Scalar) -> list:
    """Coefficients of p(a + w) in powers of w"""
    c = list(coeffs)
    n = len(c)
    for i in range(n - 1):
        for k in range(n - 2, i - 1, -1):
            c[k] = c[k] + a * c[k + 1]
    return c


def reduced_denominator_at(m: MeromorphicModel, j: int, z, precision: PrecisionOptions):
    """D_j(z) = D(z) / (z - z_j)^{s_j}"""
    value = precision.scalar(1)
    for k, pole in enumerate(m.poles):
        if k != j:
            value *= (z - precision.scalar(pole.location)) ** pole.multiplicity
    return value


def laurent_coefficients(
    m: MeromorphicModel, j: int, precision: PrecisionOptions = DOUBLE
) -> list:
    """
    Principal part coefficients at pole j.

    Entry s - 1 of the result is the coefficient of (z - z_j)^{-s}, s = 1..s_j.
    """
    pole = m.poles[j]
    zj = precision.scalar(pole.location)
    s = pole.multiplicity

    numerator = _taylor_shift(precision.vector(m.rational_numerator.coeffs), zj)
    numerator += [0] * max(0, s - len(numerator))

    reduced = Poly.from_roots(
        precision.scalar(other.location) - zj
        for k, other in enumerate(m.poles)
        if k != j
        for _ in range(other.multiplicity)
    )
    d = list(reduced.coeffs) + [0] * s

    # h(w) = p(z_j + w) / D_j(z_j + w) up to order s_j - 1
    h = []
    for i in range(s):
        acc = numerator[i]
        for l in range(1, i + 1):
            acc = acc - d[l] * h[i - l]
        h.append(acc / d[0])

    return [h[s - order] for order in range(1, s + 1)]


def principal_coefficient(
    m: MeromorphicModel, j: int, precision: PrecisionOptions = DOUBLE
) -> Scalar:
    """A_j, the coefficient of (z - z_j)^{-s_j} in the Laurent series at pole j (0-based)"""
    pole = m.poles[j]
    zj = precision.scalar(pole.location)
    numerator = Poly(tuple(precision.vector(m.rational_numerator.coeffs)))
    return numerator(zj) / reduced_denominator_at(m, j, zj, precision)


def taylor_coefficients(
    m: MeromorphicModel, N: int, precision: PrecisionOptions = DOUBLE
) -> PowerSeries:
    """Maclaurin coefficients c_0..c_N of the model"""
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")

    if any(pole.location == 0 for pole in m.poles):
        raise PoleAtOrigin("The model must be analytic at the origin")

    coeffs = [precision.scalar(0) for _ in range(N + 1)]

    for k, b in enumerate(m.analytic_coeffs[: N + 1]):
        coeffs[k] += precision.scalar(b)

    for j, pole in enumerate(m.poles):
        inv = 1 / precision.scalar(pole.location)
        for order, a in enumerate(laurent_coefficients(m, j, precision), start=1):
            # A / (z - z_j)^s = (-1)^s A z_j^{-s} sum_k C(k+s-1, s-1) (z / z_j)^k
            term = (-1) ** order * a * inv**order
            for k in range(N + 1):
                coeffs[k] += comb(k + order - 1, order - 1) * term
                term *= inv

    log.debug("Computed %d Maclaurin coefficients (%s)", N + 1, precision.mode)
    return PowerSeries(tuple(coeffs))


def eval_model(
    m: MeromorphicModel,
    z: Any,
    precision: PrecisionOptions = DOUBLE,
    exclusion: float = DEFAULT_EXCLUSION,
) -> Scalar:
    """Evaluate b(z) + p(z) / D(z)"""
    z = precision.scalar(z)

    for j, pole in enumerate(m.poles):
        if abs(z - precision.scalar(pole.location)) < exclusion:
            raise NearPole(f"{complex(z)} is within {exclusion} of pole {j}")

    denominator = precision.scalar(1)
    for pole in m.poles:
        denominator *= (z - precision.scalar(pole.location)) ** pole.multiplicity

    analytic = Poly(tuple(precision.vector(m.analytic_coeffs)))
    numerator = Poly(tuple(precision.vector(m.rational_numerator.coeffs)))
    return analytic(z) + numerator(z) / denominator
