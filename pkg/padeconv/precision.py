"""
Working precision options
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Literal, Optional, Sequence

import numpy as np
from mpmath.ctx_mp import MPContext


DEFAULT_EXTENDED_DPS = 80


@dataclass(frozen=True)
class PrecisionOptions:
    """Selects the arithmetic used for series, Pade solves and model evaluation"""

    mode: Literal["double", "extended"] = "double"
    dps: int = DEFAULT_EXTENDED_DPS

    @staticmethod
    def parse(value: Optional[Any]) -> "PrecisionOptions":
        """Parse a command line or config value as precision options"""

        match value:
            case PrecisionOptions():
                return value

            case None | "double" | "float64":
                return PrecisionOptions()

            case "extended" | "mp":
                return PrecisionOptions("extended")

            case bool():
                raise TypeError(f"Precision must not be a boolean. Got {value!r}")

            case int() if value > 15:
                return PrecisionOptions("extended", value)

            case str() if value.startswith("extended:") and value[9:].isdigit():
                return PrecisionOptions.parse(int(value[9:]))

            case {"mode": mode, **rest}:
                options = PrecisionOptions.parse(mode)
                if "dps" in rest and options.extended:
                    return PrecisionOptions("extended", int(rest["dps"]))
                return options

            case _:
                raise TypeError(
                    'Precision must be "double", "extended", "extended:<digits>" '
                    f'or a digit count above 15. Got "{value}"'
                )

    @property
    def extended(self) -> bool:
        """Is software extended precision in use?"""
        return self.mode == "extended"

    @property
    def eps(self) -> float:
        """Unit roundoff of the working precision"""
        if self.extended:
            return 10.0 ** (-self.dps)
        return float(np.finfo(float).eps)

    @cached_property
    def ctx(self) -> Optional[MPContext]:
        """Private mpmath context for extended precision, None in double mode"""
        if not self.extended:
            return None

        ctx = MPContext()
        ctx.dps = self.dps
        return ctx

    def scalar(self, value: Any):
        """Convert a number to the working scalar type"""
        if self.extended:
            return self.ctx.mpc(value)
        return complex(value)

    def vector(self, values: Sequence[Any]) -> list:
        """Convert a sequence of numbers to working scalars"""
        return [self.scalar(v) for v in values]

    def null_vector(self, rows: Sequence[Sequence[Any]]) -> tuple[list, list[float]]:
        """
        Right singular vector of the smallest singular value of a k x (k+1)
        matrix, and all singular values sorted in decreasing order.

        The matrix is padded with a zero row so the implicit zero singular value
        of the wide system appears explicitly.
        """
        width = len(rows[0])
        square = [list(row) for row in rows]
        square += [[0] * width for _ in range(width - len(rows))]

        if self.extended:
            ctx = self.ctx
            matrix = ctx.matrix([[ctx.mpc(v) for v in row] for row in square])
            _, s, v = ctx.svd_c(matrix, compute_uv=True)
            values = [s[i] for i in range(width)]
            smallest = min(range(width), key=lambda i: values[i])
            vector = [ctx.conj(v[smallest, k]) for k in range(width)]
            return vector, sorted((float(x) for x in values), reverse=True)

        matrix = np.array(square, dtype=complex)
        _, s, vh = np.linalg.svd(matrix)
        smallest = int(np.argmin(s))
        vector = [complex(x) for x in vh[smallest].conj()]
        return vector, sorted((float(x) for x in s), reverse=True)


DOUBLE = PrecisionOptions()

# Carrier precision for user-supplied data (pole locations, arguments in turns)
EXACT = PrecisionOptions("extended", 50)
