"""
Command line interface
"""
import argparse
from functools import cached_property
import logging
from pathlib import Path
import sys
from typing import Optional

from .artifacts import hash_comment, write_csv, write_json
from .config import RunConfig
from .errors import ConfigError, NumericalError, PadeConvError
from .model import MeromorphicModel, taylor_coefficients
from .precision import DOUBLE, EXACT, PrecisionOptions
from .region import (
    CurveSet,
    NFSample,
    RegionGrid,
    sample_NF,
    scan_region,
    trace_boundaries,
)
from .rowtheory import (
    CjTable,
    DominantAnalysis,
    TorusSpec,
    analyze_poles,
    compute_cj,
    orbit_point,
    predicted_limit_poles,
)
from .svg import region_figure
from .util import complex_dict, json_float
from .verify import (
    CompactSetSpec,
    LimitSetOracle,
    PoleLimitReport,
    certify_margin,
    convergence_experiment,
    subsequence_experiment,
)


log = logging.getLogger(__name__)

DEFAULT_TERMS = 40

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class Session:
    """Lazily computed pipeline state shared by the commands of one run"""

    def __init__(self, config: RunConfig):
        self.config = config
        self.config_hash = config.config_hash

    def path(self, name: str) -> Path:
        """Output file path"""
        return self.config.output / name

    @cached_property
    def model(self) -> MeromorphicModel:
        return self.config.model.build()

    @cached_property
    def analysis(self) -> DominantAnalysis:
        return analyze_poles(self.model)

    @cached_property
    def cj(self) -> CjTable:
        """C_j table in double precision, used by the raster and the orbit sampler"""
        return compute_cj(self.model, self.analysis, DOUBLE)

    @cached_property
    def torus(self) -> TorusSpec:
        return self.config.torus.build(self.model, self.analysis)

    @cached_property
    def sample(self) -> NFSample:
        return sample_NF(
            self.cj,
            self.torus,
            self.analysis,
            self.config.orbit.samples,
            seed=self.config.seed,
        )

    @cached_property
    def grid(self) -> RegionGrid:
        region = self.config.region
        grid = scan_region(
            self.cj,
            self.analysis,
            box=region.box,
            nx=region.nx,
            ny=region.ny,
            exclusion_radius=region.exclusion_radius,
        )
        return grid.with_nf(self.sample)

    @cached_property
    def curves(self) -> CurveSet:
        return trace_boundaries(self.grid, self.cj)


def cmd_coeffs(session: Session, N: int) -> list[Path]:
    """Write the Maclaurin coefficients c_0..c_N"""
    series = taylor_coefficients(session.model, N, session.config.precision)
    rows = []
    for k, c in enumerate(series.coeffs):
        c = complex(c)
        rows.append((k, c.real, c.imag))

    return [write_csv(session.path("coeffs.csv"), ["k", "re", "im"], rows, session.config_hash)]


def cmd_cvals(session: Session) -> list[Path]:
    """Write the dominant-pole analysis and the C_j constants"""
    d = session.analysis
    table = compute_cj(session.model, d, session.config.precision)

    data = {
        "rho": d.rho,
        "ell": d.ell,
        "mu": d.mu,
        "nu": d.nu,
        "lambda": d.lam,
        "order": list(d.order),
        # 1-based position of each dominant pole in the configured pole list
        "pole": [i + 1 for i in d.order[: d.nu]],
        "locations": [complex_dict(z) for z in table.locations],
        "A": [complex_dict(a) for a in table.a],
        "C": [complex_dict(c) for c in table.c],
        "row_kinds": {str(m): d.row_kind(m) for m in range(d.lam + 1)},
    }
    return [write_json(session.path("cvals.json"), data, session.config_hash)]


def cmd_region(session: Session) -> list[Path]:
    """Write the region raster, the boundary curves, the N_F samples and the figure"""
    grid, curves, sample = session.grid, session.curves, session.sample
    config_hash = session.config_hash

    def region_rows():
        for iy in range(grid.ny):
            for ix in range(grid.nx):
                yield (
                    float(grid.xs[ix]),
                    float(grid.ys[iy]),
                    float(grid.gmax[iy, ix]),
                    bool(grid.mask_n[iy, ix]),
                    bool(grid.mask_u[iy, ix]),
                    bool(grid.mask_uf[iy, ix]),
                )

    def curve_rows():
        for j, (polylines, labels) in enumerate(
            zip(curves.curves, curves.component_labels), start=1
        ):
            pole = session.analysis.order[j - 1] + 1
            for polyline, label in zip(polylines, labels):
                for vertex, z in enumerate(polyline.points):
                    yield (j, pole, label, vertex, z.real, z.imag)

    sample_rows = [(n, z.real, z.imag) for n, z in zip(sample.sources, sample.points)]

    paths = [
        write_csv(
            session.path("region.csv"),
            ["x", "y", "gmax", "in_n", "in_u", "in_uf"],
            region_rows(),
            config_hash,
        ),
        write_csv(
            session.path("curves.csv"),
            ["j", "pole", "component", "vertex", "x", "y"],
            curve_rows(),
            config_hash,
        ),
        write_csv(
            session.path("nf_samples.csv"), ["n", "re", "im"], sample_rows, config_hash
        ),
    ]

    figure = region_figure(grid, curves, session.analysis, sample)
    paths.append(figure.save(session.path("figure.svg"), hash_comment(config_hash)))
    return paths


def _compact_set(session: Session) -> tuple[CompactSetSpec, float]:
    compact = session.config.verify.compact
    if compact.auto:
        K = CompactSetSpec.from_grid(
            session.grid, compact.margin, compact.count, seed=session.config.seed
        )
    else:
        K = CompactSetSpec(points=compact.points, margin=compact.margin)
    return K, certify_margin(K, session.grid)


def _tau0(session: Session) -> tuple:
    tau0 = session.config.verify.tau0
    if tau0 == "seed":
        return orbit_point(session.torus, session.analysis.lam)

    ctx = EXACT.ctx
    return tuple(complex(ctx.expjpi(2 * t)) for t in tau0)


def cmd_verify(session: Session) -> list[Path]:
    """Run the convergence, pole limit and subsequence experiments"""
    config = session.config
    K, certified = _compact_set(session)
    log.info("Compact set of %d points, certified margin %.4g", len(K), certified)

    predicted = predicted_limit_poles(session.model, session.analysis, session.cj)
    oracle = LimitSetOracle.from_prediction(predicted, session.sample)

    convergence = convergence_experiment(
        session.model,
        K,
        config.verify.n_range,
        config.precision,
        oracle=oracle,
        seed=config.seed,
    )
    pole_limit = PoleLimitReport(records=tuple(r.poles for r in convergence.records))

    subsequence = None
    if config.verify.subsequence:
        subsequence = subsequence_experiment(
            session.model,
            session.torus,
            _tau0(session),
            config.verify.eps,
            config.verify.count,
            config.precision,
            horizon=config.verify.horizon,
            seed=config.seed,
        )

    report = {
        "precision": {"mode": config.precision.mode, "dps": config.precision.dps},
        "compact": {
            "count": len(K),
            "margin": K.margin,
            "certified_margin": json_float(certified),
        },
        "convergence": convergence.to_dict(),
        "pole_limit": pole_limit.to_dict(),
        "subsequence": subsequence.to_dict() if subsequence else None,
    }

    error_rows = [(r.n, r.sup_error, float(r.residual)) for r in convergence.records]
    pole_rows = [
        (record.n, z.real, z.imag, distance, spurious)
        for record in pole_limit.records
        for z, distance, spurious in zip(record.poles, record.distances, record.spurious)
    ]

    return [
        write_json(session.path("verify_report.json"), report, session.config_hash),
        write_csv(
            session.path("errors.csv"),
            ["n", "sup_error", "residual"],
            error_rows,
            session.config_hash,
        ),
        write_csv(
            session.path("poles.csv"),
            ["n", "re", "im", "distance", "spurious"],
            pole_rows,
            session.config_hash,
        ),
    ]


def cmd_all(session: Session, N: int = DEFAULT_TERMS) -> list[Path]:
    """coeffs, cvals, region and verify in order"""
    return (
        cmd_coeffs(session, N)
        + cmd_cvals(session)
        + cmd_region(session)
        + cmd_verify(session)
    )


def _configure_logging(verbosity: int):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG

    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", "-c", type=Path, required=True, help="JSON run configuration"
    )
    common.add_argument(
        "--out", "-o", type=Path, help="output directory (overrides the config)"
    )
    common.add_argument(
        "--precision",
        "-p",
        type=PrecisionOptions.parse,
        help="'double', 'extended' or 'extended:<digits>' (overrides the config)",
    )
    common.add_argument(
        "--seed", type=int, help="seed for root finder restarts and sampling"
    )
    common.add_argument(
        "--verbose", "-v", action="count", default=0, help="-v for info, -vv for debug"
    )

    parser = argparse.ArgumentParser(
        prog="padeconv",
        description="Convergence of the last intermediate row of the Pade table",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    coeffs_parser = subparsers.add_parser(
        "coeffs", parents=[common], help="write Maclaurin coefficients"
    )
    coeffs_parser.add_argument(
        "-N",
        "--terms",
        dest="N",
        type=int,
        default=DEFAULT_TERMS,
        help=f"highest coefficient index (default: {DEFAULT_TERMS})",
    )

    subparsers.add_parser(
        "cvals", parents=[common], help="write dominant poles and C_j constants"
    )
    subparsers.add_parser(
        "region", parents=[common], help="write the region raster, curves and figure"
    )
    subparsers.add_parser(
        "verify", parents=[common], help="run the convergence experiments"
    )

    all_parser = subparsers.add_parser(
        "all", parents=[common], help="run every command in order"
    )
    all_parser.add_argument(
        "-N", "--terms", dest="N", type=int, default=DEFAULT_TERMS
    )

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """Main entry point"""
    args = _build_parser().parse_args(argv)
    _configure_logging(args.verbose)

    try:
        config = RunConfig.load(args.config).with_overrides(
            precision=args.precision, output=args.out, seed=args.seed
        )
        config.output.mkdir(parents=True, exist_ok=True)
        session = Session(config)

        match args.command:
            case "coeffs":
                if args.N < 0:
                    raise ConfigError("N", "must be non-negative")
                paths = cmd_coeffs(session, args.N)

            case "cvals":
                paths = cmd_cvals(session)

            case "region":
                paths = cmd_region(session)

            case "verify":
                paths = cmd_verify(session)

            case "all":
                paths = cmd_all(session, args.N)

    except NumericalError as ex:
        log.error("Numerical failure: %s", ex)
        return EXIT_NUMERICAL

    except (PadeConvError, TypeError) as ex:
        log.error("Invalid input: %s", ex)
        return EXIT_CONFIG

    except OSError as ex:
        log.error("I/O error: %s", ex)
        return EXIT_IO

    for path in paths:
        print(path)

    return EXIT_OK
