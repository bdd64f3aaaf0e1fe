"""
Pade approximants from power series
"""
from dataclasses import dataclass
import logging
from typing import Literal

from .errors import DegenerateSystem, InsufficientCoefficients
from .model import PowerSeries
from .polyalg import Poly, RootSet, Scalar, roots
from .precision import DOUBLE, PrecisionOptions


log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
DEFAULT_PAIRING_TOL = 1e-6

Normalization = Literal["constant-term-one", "max-coefficient-one"]


@dataclass(frozen=True)
class PadeApproximant:
    """pi_{n,m} = numerator / denominator"""

    n: int
    m: int
    numerator: Poly
    denominator: Poly
    normalization: Normalization
    # Smallest nonzero singular value of the Toeplitz system relative to the largest
    residual: float
    singular_values: tuple = ()
    degenerate: bool = False

    def __call__(self, z: Scalar) -> Scalar:
        return self.numerator(z) / self.denominator(z)

    def order_residual(self, series: PowerSeries) -> float:
        """Largest |(P - s Q)_k| for k <= n + m"""
        q = self.denominator.coeffs
        p = self.numerator.coeffs
        worst = 0.0
        for k in range(self.n + self.m + 1):
            acc = p[k] if k < len(p) else 0
            for i, qi in enumerate(q[: k + 1]):
                acc = acc - qi * series.coefficient(k - i)
            worst = max(worst, float(abs(acc)))
        return worst


def toeplitz_rows(series: PowerSeries, n: int, m: int) -> list[list]:
    """Rows j = 1..m of sum_k q_k c_{n+j-k} = 0"""
    return [[series.coefficient(n + j - k) for k in range(m + 1)] for j in range(1, m + 1)]


def pade_approximant(
    series: PowerSeries,
    n: int,
    m: int,
    tol: float = DEFAULT_TOL,
    precision: PrecisionOptions = DOUBLE,
    strict: bool = False,
) -> PadeApproximant:
    """
    Pade approximant of type (n, m) from Maclaurin coefficients c_0..c_{n+m}.

    The denominator is the right singular vector of the smallest singular value
    of the m x (m+1) Toeplitz system, normalized to Q(0) = 1 when |q_0| is not
    negligible and to a unit largest coefficient otherwise.

    :param strict: Raise DegenerateSystem instead of reporting it
    """
    if n < 0 or m < 0:
        raise ValueError(f"Degrees must be non-negative, got ({n}, {m})")

    if len(series) < n + m + 1:
        raise InsufficientCoefficients(
            f"pi_{{{n},{m}}} needs {n + m + 1} coefficients, got {len(series)}"
        )

    c = precision.vector(series.coeffs[: n + m + 1])
    series = PowerSeries(tuple(c))

    if m == 0:
        return PadeApproximant(
            n=n,
            m=0,
            numerator=Poly(tuple(c[: n + 1])),
            denominator=Poly((precision.scalar(1),)),
            normalization="constant-term-one",
            residual=1.0,
        )

    q, singular_values = precision.null_vector(toeplitz_rows(series, n, m))
    largest = singular_values[0]
    # The padded row contributes the implicit zero; the one before it is the real gap
    smallest = singular_values[-2]
    residual = smallest / largest if largest > 0 else 0.0

    # tol is calibrated for double precision and scales with the unit roundoff
    degenerate = smallest <= tol * (precision.eps / DOUBLE.eps) * largest
    if degenerate:
        message = f"pi_{{{n},{m}}}: ambiguous null space (relative gap {residual:.3e})"
        if strict:
            raise DegenerateSystem(message)
        log.warning(message)

    peak = max(range(m + 1), key=lambda k: abs(q[k]))
    if abs(q[0]) > tol * abs(q[peak]):
        normalization = "constant-term-one"
        pivot = q[0]
    else:
        normalization = "max-coefficient-one"
        pivot = q[peak]

    q = [x / pivot for x in q]

    p = []
    for k in range(n + 1):
        acc = 0
        for i in range(min(k, m) + 1):
            acc = acc + q[i] * c[k - i]
        p.append(acc)

    return PadeApproximant(
        n=n,
        m=m,
        numerator=Poly(tuple(p)),
        denominator=Poly(tuple(q)),
        normalization=normalization,
        residual=residual,
        singular_values=tuple(singular_values),
        degenerate=degenerate,
    )


def pade_poles(
    approximant: PadeApproximant,
    tol: float = DEFAULT_TOL,
    pairing_tol: float = DEFAULT_PAIRING_TOL,
    seed: int = 0,
) -> RootSet:
    """
    Zeros of the denominator after trimming negligible trailing coefficients.

    Zeros at which the numerator also vanishes (relative to its magnitude
    scale) are flagged as spurious but still reported.
    """
    denominator = approximant.denominator.trimmed(tol)
    if denominator.degree < 1:
        return RootSet()

    found = roots(denominator, seed=seed)
    numerator = approximant.numerator
    spurious = tuple(
        bool(abs(numerator(z)) <= pairing_tol * max(numerator.scale(z), 1e-300))
        for z in found.roots
    )
    return RootSet(roots=found.roots, residual=found.residual, spurious=spurious)
