"""
Polynomials over the complex numbers
"""
from dataclasses import dataclass, field
import logging
import math
from typing import Any, Iterable, Optional, Sequence, Union

import numpy as np
from mpmath import isinf, isnan, mpc

from .errors import NonConvergence, NotARoot


log = logging.getLogger(__name__)

Scalar = Union[complex, mpc]

DEFAULT_ROOT_TOL = 1e-12
MAX_ITERATIONS = 200
RESTARTS = 3


def is_finite(value: Any) -> bool:
    """Get whether a complex or mpmath number has finite components"""
    if hasattr(value, "_mpc_") or hasattr(value, "_mpf_"):
        return not (isnan(value) or isinf(value))
    value = complex(value)
    return math.isfinite(value.real) and math.isfinite(value.imag)


@dataclass(frozen=True)
class Poly:
    """Polynomial with coefficients in ascending degree"""

    coeffs: tuple = ()

    def __post_init__(self):
        coeffs = list(self.coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()

        if not all(is_finite(c) for c in coeffs):
            raise ValueError("Polynomial coefficients must be finite")

        object.__setattr__(self, "coeffs", tuple(coeffs))

    @staticmethod
    def constant(value: Scalar) -> "Poly":
        """Constant polynomial"""
        return Poly((value,))

    @staticmethod
    def from_roots(roots: Iterable[Scalar], leading: Scalar = 1) -> "Poly":
        """Expand leading * prod(z - root)"""
        result = Poly.constant(leading)
        for root in roots:
            result = mul(result, Poly((-root, 1)))
        return result

    @property
    def degree(self) -> int:
        """Degree, -1 for the zero polynomial"""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Scalar:
        """Leading coefficient (0 for the zero polynomial)"""
        return self.coeffs[-1] if self.coeffs else 0

    def max_abs(self) -> float:
        """Largest coefficient modulus"""
        return max((float(abs(c)) for c in self.coeffs), default=0.0)

    def scale(self, z: Scalar) -> float:
        """Magnitude scale sum |a_k| |z|^k used for relative residuals"""
        r = abs(z)
        total = 0
        for c in reversed(self.coeffs):
            total = total * r + abs(c)
        return float(total)

    def trimmed(self, tol: float) -> "Poly":
        """Drop trailing coefficients with modulus at most tol * max |a_k|"""
        threshold = tol * self.max_abs()
        coeffs = list(self.coeffs)
        while coeffs and abs(coeffs[-1]) <= threshold:
            coeffs.pop()
        return Poly(tuple(coeffs))

    def derivative(self) -> "Poly":
        """Formal derivative"""
        return Poly(tuple(k * c for k, c in enumerate(self.coeffs) if k))

    def to_numpy(self) -> np.ndarray:
        """Coefficients as a complex128 array (ascending)"""
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def __call__(self, z: Scalar) -> Scalar:
        return evaluate(self, z)

    def __add__(self, other: "Poly") -> "Poly":
        return add(self, other)

    def __mul__(self, other: "Poly") -> "Poly":
        return mul(self, other)

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return add(self, -other)


@dataclass(frozen=True)
class RootSet:
    """Roots of a polynomial with the largest residual |p(root)|"""

    roots: tuple = ()
    residual: float = 0.0
    spurious: tuple = field(default=())

    def __len__(self):
        return len(self.roots)

    def as_complex(self) -> list[complex]:
        """Roots converted to Python complex numbers"""
        return [complex(r) for r in self.roots]


def evaluate(p: Poly, z: Scalar) -> Scalar:
    """Evaluate a polynomial with Horner's rule"""
    result = 0
    for c in reversed(p.coeffs):
        result = result * z + c
    return result


def _evaluate_with_derivative(coeffs: Sequence[Scalar], z: Scalar):
    value = 0
    slope = 0
    for c in reversed(coeffs):
        slope = slope * z + value
        value = value * z + c
    return value, slope


def add(p: Poly, q: Poly) -> Poly:
    """Sum of two polynomials"""
    size = max(len(p.coeffs), len(q.coeffs))
    a = p.coeffs + (0,) * (size - len(p.coeffs))
    b = q.coeffs + (0,) * (size - len(q.coeffs))
    return Poly(tuple(x + y for x, y in zip(a, b)))


def mul(p: Poly, q: Poly) -> Poly:
    """Product of two polynomials"""
    if not p.coeffs or not q.coeffs:
        return Poly()

    result = [0] * (len(p.coeffs) + len(q.coeffs) - 1)
    for i, a in enumerate(p.coeffs):
        for j, b in enumerate(q.coeffs):
            result[i + j] = result[i + j] + a * b
    return Poly(tuple(result))


def divided_by_linear(p: Poly, z0: Scalar, tol: float = 1e-9) -> Poly:
    """Quotient of p by (z - z0) when z0 is a root of p"""
    if p.degree < 1:
        raise NotARoot(f"Cannot divide a polynomial of degree {p.degree}")

    if abs(p(z0)) > tol * max(p.scale(z0), 1e-300):
        raise NotARoot(f"{z0} is not a root (|p(z0)| = {float(abs(p(z0))):.3e})")

    return _synthetic_division(p.coeffs, z0)


def _synthetic_division(coeffs: Sequence[Scalar], z0: Scalar) -> Poly:
    quotient = [0] * (len(coeffs) - 1)
    carry = 0
    for k in range(len(coeffs) - 1, 0, -1):
        carry = carry * z0 + coeffs[k]
        quotient[k - 1] = carry
    return Poly(tuple(quotient))


def roots(
    p: Poly,
    tol: float = DEFAULT_ROOT_TOL,
    max_iter: int = MAX_ITERATIONS,
    seed: Optional[int] = 0,
) -> RootSet:
    """
    All complex roots of a polynomial with multiplicity.

    Aberth-Ehrlich simultaneous iteration with random restarts, falling back to
    Newton's method with deflation.

    :param p: Polynomial of degree >= 1
    :param tol: Each root satisfies |p(root)| <= tol * sum |a_k| |root|^k
    :param max_iter: Iterations per attempt
    :param seed: Seed for the restart perturbations
    """
    if p.degree < 1:
        raise ValueError(f"Root finding needs degree >= 1, got {p.degree}")

    coeffs = list(p.coeffs)

    # Exact zeros at the origin
    zeros = 0
    while coeffs[0] == 0:
        coeffs.pop(0)
        zeros += 1

    found = [coeffs[0] * 0] * zeros
    if len(coeffs) > 1:
        found += _nonzero_roots(coeffs, tol, max_iter, seed)

    residual = max((float(abs(p(r))) for r in found), default=0.0)
    return RootSet(roots=tuple(found), residual=residual)


def _magnitude(moduli: Sequence[float], z: Scalar) -> float:
    r = float(abs(z))
    total = 0.0
    for c in reversed(moduli):
        total = total * r + c
    return total


def _converged(coeffs: Sequence[Scalar], z: Scalar, tol: float) -> bool:
    value, _ = _evaluate_with_derivative(coeffs, z)
    return abs(value) <= tol * _magnitude([float(abs(c)) for c in coeffs], z)


def _nonzero_roots(coeffs: list, tol: float, max_iter: int, seed: Optional[int]):
    lead = coeffs[-1]
    monic = [c / lead for c in coeffs]
    degree = len(monic) - 1

    if degree == 1:
        return [-monic[0]]

    rng = np.random.default_rng(seed)
    radius = float(abs(monic[0])) ** (1.0 / degree) or 1.0
    start = [
        radius * complex(np.exp(1j * (2 * np.pi * k / degree + 0.4)))
        for k in range(degree)
    ]

    for attempt in range(RESTARTS + 1):
        estimates = _aberth(monic, start, tol, max_iter)
        if estimates is not None:
            return estimates

        log.debug("Aberth attempt %d failed for degree %d", attempt, degree)
        start = [z * (1 + 0.1 * complex(*rng.standard_normal(2))) for z in start]

    log.info("Aberth iteration failed, deflating one root at a time")
    estimates = _deflation(monic, tol, max_iter, rng)
    if all(_converged(monic, z, tol) for z in estimates):
        return estimates

    raise NonConvergence(
        f"Root finder did not converge for degree {degree} in {max_iter} iterations"
    )


def _aberth(monic: list, start: list, tol: float, max_iter: int):
    moduli = [float(abs(c)) for c in monic]
    z = [monic[0] * 0 + s for s in start]
    n = len(z)
    polish = 2

    for _ in range(max_iter):
        done = True
        for i in range(n):
            value, slope = _evaluate_with_derivative(monic, z[i])
            if value == 0:
                continue
            if abs(value) > tol * _magnitude(moduli, z[i]):
                done = False
            if slope == 0:
                z[i] = z[i] + 1e-3 * (1 + abs(z[i]))
                continue

            ratio = value / slope
            repulsion = sum(1 / (z[i] - z[j]) for j in range(n) if j != i and z[i] != z[j])
            denominator = 1 - ratio * repulsion
            z[i] = z[i] - (ratio / denominator if denominator != 0 else ratio)

        if done:
            polish -= 1
            if polish < 0:
                return z

    return None


def _deflation(monic: list, tol: float, max_iter: int, rng: np.random.Generator):
    remaining = list(monic)
    found = []

    while len(remaining) > 2:
        z = remaining[0] * 0 + 0.5 * complex(*rng.standard_normal(2))
        for _ in range(max_iter):
            value, slope = _evaluate_with_derivative(remaining, z)
            if slope == 0:
                z = z + 1e-3 * complex(*rng.standard_normal(2))
                continue
            step = value / slope
            z = z - step
            if abs(step) <= tol * max(1.0, float(abs(z))):
                break

        # Polish against the undeflated polynomial
        for _ in range(3):
            value, slope = _evaluate_with_derivative(monic, z)
            if slope != 0:
                z = z - value / slope

        found.append(z)
        remaining = list(_synthetic_division(remaining, z).coeffs)

    found.append(-remaining[0] / remaining[1])
    return found
