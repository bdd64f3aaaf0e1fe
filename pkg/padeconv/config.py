"""
JSON run configuration
"""
from dataclasses import dataclass, field, replace
import json
import logging
from pathlib import Path
import re
from typing import Any, Optional

from .errors import ConfigError
from .model import MeromorphicModel, PoleSpec
from .polyalg import Poly
from .precision import EXACT, PrecisionOptions
from .region import DEFAULT_RESOLUTION
from .rowtheory import DominantAnalysis, TorusSpec
from .util import canonical_json, sha256_hex
from .verify import DEFAULT_HORIZON, DEFAULT_ORBIT_SAMPLES, DEFAULT_POINT_COUNT


log = logging.getLogger(__name__)

_SQRT = re.compile(r"^\s*(-?)\s*sqrt\(\s*(\d+)\s*\)\s*$")
_RATIONAL = re.compile(r"^\s*(-?\d+)\s*/\s*(\d+)\s*$")


def _check_keys(data: Any, path: str, allowed: set, required: set = frozenset()):
    if not isinstance(data, dict):
        raise ConfigError(path, "expected an object")

    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(path, f"unknown keys {unknown}")

    missing = sorted(required - set(data))
    if missing:
        raise ConfigError(path, f"missing keys {missing}")


def _join(path: str, key: Any) -> str:
    return f"{path}.{key}" if path else str(key)


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    return float(value)


def _integer(value: Any, path: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be at least {minimum}, got {value}")
    return value


def _complex_list(values: Any, path: str) -> tuple:
    if not isinstance(values, list):
        raise ConfigError(path, "expected a list of coefficients")
    return tuple(parse_complex(c, f"{path}[{i}]") for i, c in enumerate(values))


def parse_complex(value: Any, path: str = "") -> complex:
    """A number, an [re, im] pair or an {"re", "im"} mapping"""
    match value:
        case bool():
            raise ConfigError(path, "expected a complex number, got a boolean")

        case int() | float():
            return complex(value)

        case [re_part, im_part]:
            return complex(
                _number(re_part, f"{path}[0]"), _number(im_part, f"{path}[1]")
            )

        case {"re": re_part, "im": im_part} if len(value) == 2:
            return complex(
                _number(re_part, _join(path, "re")), _number(im_part, _join(path, "im"))
            )

        case _:
            raise ConfigError(
                path, f'expected a number, [re, im] or {{"re", "im"}}, got {value!r}'
            )


def parse_turns(value: Any, path: str = ""):
    """
    Argument in turns at carrier precision: a number, a decimal string, "p/q",
    or "sqrt(k)" / "-sqrt(k)" for a non-negative integer k
    """
    ctx = EXACT.ctx

    match value:
        case bool():
            raise ConfigError(path, "expected an argument in turns, got a boolean")

        case int() | float():
            return ctx.mpf(value)

        case str() if (found := _SQRT.match(value)):
            sign, k = found.groups()
            root = ctx.sqrt(int(k))
            return -root if sign else root

        case str() if (found := _RATIONAL.match(value)):
            p, q = (int(g) for g in found.groups())
            if q == 0:
                raise ConfigError(path, "zero denominator")
            return ctx.mpf(p) / q

        case str():
            try:
                return ctx.mpf(value.strip())
            except ValueError:
                raise ConfigError(
                    path, f"cannot read {value!r} as an argument in turns"
                ) from None

        case _:
            raise ConfigError(path, f"expected an argument in turns, got {value!r}")


def parse_pole(data: Any, path: str) -> PoleSpec:
    """{"re", "im", "mult"} or {"rho", "theta_turns", "mult"}, exactly one encoding"""
    _check_keys(data, path, {"re", "im", "rho", "theta_turns", "mult"})

    cartesian = {"re", "im"} & set(data)
    polar = {"rho", "theta_turns"} & set(data)
    if bool(cartesian) == bool(polar):
        raise ConfigError(
            path, 'give exactly one of {"re", "im"} or {"rho", "theta_turns"}'
        )

    mult = _integer(data.get("mult", 1), _join(path, "mult"), minimum=1)

    if cartesian:
        _check_keys(data, path, {"re", "im", "mult"}, {"re", "im"})
        location = complex(
            _number(data["re"], _join(path, "re")),
            _number(data["im"], _join(path, "im")),
        )
        try:
            return PoleSpec(location=location, multiplicity=mult)
        except ValueError as ex:
            raise ConfigError(path, str(ex)) from ex

    _check_keys(data, path, {"rho", "theta_turns", "mult"}, {"rho", "theta_turns"})
    rho = _number(data["rho"], _join(path, "rho"))
    if rho <= 0:
        raise ConfigError(_join(path, "rho"), "must be positive")

    theta = parse_turns(data["theta_turns"], _join(path, "theta_turns"))
    return PoleSpec.polar(rho, theta, mult)


@dataclass(frozen=True)
class ModelSection:
    """Model function a(z) = b(z) + p(z) / D(z)"""

    radius: float
    poles: tuple
    rational_numerator: tuple = (1,)
    analytic_coeffs: tuple = ()

    @staticmethod
    def parse(data: Any, path: str = "model") -> "ModelSection":
        _check_keys(
            data,
            path,
            {"radius", "poles", "rational_numerator", "analytic_coeffs"},
            {"radius", "poles"},
        )

        poles = data["poles"]
        if not isinstance(poles, list) or not poles:
            raise ConfigError(_join(path, "poles"), "expected a non-empty list")

        return ModelSection(
            radius=_number(data["radius"], _join(path, "radius")),
            poles=tuple(
                parse_pole(pole, f"{path}.poles[{i}]") for i, pole in enumerate(poles)
            ),
            rational_numerator=_complex_list(
                data.get("rational_numerator", [1]), _join(path, "rational_numerator")
            ),
            analytic_coeffs=_complex_list(
                data.get("analytic_coeffs", []), _join(path, "analytic_coeffs")
            ),
        )

    def build(self) -> MeromorphicModel:
        """Construct the model, reporting validation failures against this section"""
        try:
            return MeromorphicModel(
                radius=self.radius,
                poles=self.poles,
                rational_numerator=Poly(self.rational_numerator),
                analytic_coeffs=self.analytic_coeffs,
            )
        except ValueError as ex:
            raise ConfigError("model", str(ex)) from ex


@dataclass(frozen=True)
class TorusSection:
    """Arithmetic declaration for the arguments of the dominant poles"""

    independent: bool = True
    relations: tuple = ()

    @staticmethod
    def parse(data: Any, path: str = "torus") -> "TorusSection":
        _check_keys(data, path, {"independent", "relations"})

        relations = data.get("relations", [])
        if not isinstance(relations, list) or not all(
            isinstance(row, list) for row in relations
        ):
            raise ConfigError(_join(path, "relations"), "expected a list of integer rows")

        rows = tuple(
            tuple(_integer(k, f"{path}.relations[{i}][{j}]") for j, k in enumerate(row))
            for i, row in enumerate(relations)
        )

        independent = data.get("independent", not rows)
        if not isinstance(independent, bool):
            raise ConfigError(_join(path, "independent"), "expected a boolean")
        if independent and rows:
            raise ConfigError(path, "independent arguments cannot have relations")

        return TorusSection(independent=independent, relations=rows)

    def build(self, model: MeromorphicModel, analysis: DominantAnalysis) -> TorusSpec:
        """Torus data of the model's dominant poles under this declaration"""
        try:
            return TorusSpec.from_model(
                model, analysis, self.independent, self.relations
            )
        except ValueError as ex:
            raise ConfigError("torus", str(ex)) from ex


@dataclass(frozen=True)
class RegionSection:
    """Grid for the N and U rasters"""

    box: Optional[tuple] = None
    nx: int = DEFAULT_RESOLUTION
    ny: int = DEFAULT_RESOLUTION
    exclusion_radius: Optional[float] = None

    @staticmethod
    def parse(data: Any, path: str = "region") -> "RegionSection":
        _check_keys(data, path, {"box", "nx", "ny", "exclusion_radius"})

        box = data.get("box")
        if box is not None:
            if not isinstance(box, list) or len(box) != 4:
                raise ConfigError(_join(path, "box"), "expected [xmin, xmax, ymin, ymax]")
            box = tuple(_number(v, f"{path}.box[{i}]") for i, v in enumerate(box))
            if box[0] >= box[1] or box[2] >= box[3]:
                raise ConfigError(_join(path, "box"), "empty box")

        radius = data.get("exclusion_radius")
        if radius is not None:
            radius = _number(radius, _join(path, "exclusion_radius"))

        nx = data.get("nx", DEFAULT_RESOLUTION)
        ny = data.get("ny", DEFAULT_RESOLUTION)
        return RegionSection(
            box=box,
            nx=_integer(nx, _join(path, "nx"), minimum=2),
            ny=_integer(ny, _join(path, "ny"), minimum=2),
            exclusion_radius=radius,
        )


@dataclass(frozen=True)
class OrbitSection:
    """Orbit sampling for N_F"""

    samples: int = DEFAULT_ORBIT_SAMPLES

    @staticmethod
    def parse(data: Any, path: str = "orbit") -> "OrbitSection":
        _check_keys(data, path, {"samples"})
        samples = data.get("samples", DEFAULT_ORBIT_SAMPLES)
        return OrbitSection(samples=_integer(samples, _join(path, "samples"), 1))


@dataclass(frozen=True)
class CompactSection:
    """Explicit sample points of K, or automatic sampling from the U_F mask"""

    points: tuple = ()
    margin: float = 0.05
    count: int = DEFAULT_POINT_COUNT

    @property
    def auto(self) -> bool:
        """Are the points drawn from the region grid?"""
        return not self.points

    @staticmethod
    def parse(data: Any, path: str = "verify.compact") -> "CompactSection":
        _check_keys(data, path, {"points", "auto", "margin", "count"})

        points = data.get("points", [])
        if not isinstance(points, list):
            raise ConfigError(_join(path, "points"), "expected a list")

        auto = data.get("auto", not points)
        if not isinstance(auto, bool):
            raise ConfigError(_join(path, "auto"), "expected a boolean")
        if auto == bool(points):
            raise ConfigError(path, 'give either "points" or "auto": true')

        margin = _number(data.get("margin", 0.05), _join(path, "margin"))
        if margin < 0:
            raise ConfigError(_join(path, "margin"), "must be non-negative")

        count = data.get("count", DEFAULT_POINT_COUNT)
        return CompactSection(
            points=tuple(
                parse_complex(z, f"{path}.points[{i}]") for i, z in enumerate(points)
            ),
            margin=margin,
            count=_integer(count, _join(path, "count"), 1),
        )


def _parse_n_range(value: Any, path: str) -> tuple:
    match value:
        case list():
            return tuple(_integer(n, f"{path}[{i}]", 0) for i, n in enumerate(value))

        case {"start": start, "stop": stop}:
            _check_keys(value, path, {"start", "stop", "step"})
            start = _integer(start, _join(path, "start"), 0)
            stop = _integer(stop, _join(path, "stop"))
            step = _integer(value.get("step", 1), _join(path, "step"), 1)
            return tuple(range(start, stop + 1, step))

        case _:
            raise ConfigError(path, 'expected a list or {"start", "stop", "step"}')


@dataclass(frozen=True)
class VerifySection:
    """Experiments of the verify command"""

    n_range: tuple = tuple(range(5, 41))
    compact: CompactSection = field(default_factory=CompactSection)
    # "seed" for xi^lambda, or one argument in turns per dominant pole
    tau0: Optional[Any] = None
    eps: float = 0.05
    count: int = 8
    horizon: int = DEFAULT_HORIZON

    @property
    def subsequence(self) -> bool:
        """Is the subsequence experiment requested?"""
        return self.tau0 is not None

    @staticmethod
    def parse(data: Any, path: str = "verify") -> "VerifySection":
        _check_keys(
            data, path, {"n_range", "compact", "tau0", "eps", "count", "horizon"}
        )
        defaults = VerifySection()

        n_range = defaults.n_range
        if "n_range" in data:
            n_range = _parse_n_range(data["n_range"], _join(path, "n_range"))
            if not n_range:
                raise ConfigError(_join(path, "n_range"), "empty range")

        compact = defaults.compact
        if "compact" in data:
            compact = CompactSection.parse(data["compact"], _join(path, "compact"))

        tau0 = data.get("tau0")
        if isinstance(tau0, list):
            tau0 = tuple(
                parse_turns(t, f"{path}.tau0[{i}]") for i, t in enumerate(tau0)
            )
        elif tau0 not in (None, "seed"):
            raise ConfigError(_join(path, "tau0"), 'expected "seed" or a list of turns')

        eps = _number(data.get("eps", defaults.eps), _join(path, "eps"))
        if eps <= 0:
            raise ConfigError(_join(path, "eps"), "must be positive")

        count = data.get("count", defaults.count)
        horizon = data.get("horizon", defaults.horizon)
        return VerifySection(
            n_range=n_range,
            compact=compact,
            tau0=tau0,
            eps=eps,
            count=_integer(count, _join(path, "count"), 1),
            horizon=_integer(horizon, _join(path, "horizon"), 1),
        )


@dataclass(frozen=True)
class RunConfig:
    """Parsed run configuration"""

    model: ModelSection
    torus: TorusSection = field(default_factory=TorusSection)
    region: RegionSection = field(default_factory=RegionSection)
    orbit: OrbitSection = field(default_factory=OrbitSection)
    verify: VerifySection = field(default_factory=VerifySection)
    precision: PrecisionOptions = field(default_factory=PrecisionOptions)
    output: Path = Path("out")
    seed: int = 0
    # Source document, used for the config hash
    document: dict = field(default_factory=dict, compare=False)

    @staticmethod
    def parse(data: Any) -> "RunConfig":
        """Validate a decoded JSON document"""
        _check_keys(
            data,
            "",
            {"model", "torus", "region", "orbit", "verify", "precision", "output", "seed"},
            {"model"},
        )

        try:
            precision = PrecisionOptions.parse(data.get("precision"))
        except TypeError as ex:
            raise ConfigError("precision", str(ex)) from ex

        output = data.get("output", "out")
        if not isinstance(output, str):
            raise ConfigError("output", "expected a path string")

        return RunConfig(
            model=ModelSection.parse(data["model"]),
            torus=TorusSection.parse(data.get("torus", {})),
            region=RegionSection.parse(data.get("region", {})),
            orbit=OrbitSection.parse(data.get("orbit", {})),
            verify=VerifySection.parse(data.get("verify", {})),
            precision=precision,
            output=Path(output),
            seed=_integer(data.get("seed", 0), "seed"),
            document=data,
        )

    @staticmethod
    def load(path: Path) -> "RunConfig":
        """Read and validate a JSON config file"""
        with open(path, encoding="utf-8") as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as ex:
                raise ConfigError(str(path), f"invalid JSON: {ex}") from ex

        log.info("Loaded config %s", path)
        return RunConfig.parse(data)

    def with_overrides(
        self,
        precision: Optional[PrecisionOptions] = None,
        output: Optional[Path] = None,
        seed: Optional[int] = None,
    ) -> "RunConfig":
        """Apply command line overrides"""
        config = self
        if precision is not None:
            config = replace(config, precision=precision)
        if output is not None:
            config = replace(config, output=Path(output))
        if seed is not None:
            config = replace(config, seed=seed)
        return config

    @property
    def config_hash(self) -> str:
        """SHA-256 of the source document with the effective precision and seed"""
        effective = {
            "config": self.document,
            "precision": [self.precision.mode, self.precision.dps],
            "seed": self.seed,
        }
        return sha256_hex(canonical_json(effective))
