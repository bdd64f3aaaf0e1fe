"""
Static SVG figure of the convergence region
"""
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .region import CurveSet, NFSample, RegionGrid
from .rowtheory import DominantAnalysis


PREAMBLE = """\
<?xml version="1.0" standalone="no"?>
<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN"
"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">
<!-- %(comment)s -->
<svg
    width="%(width)d"
    height="%(height)d"
    viewBox="0 0 %(width)d %(height)d"
    version="1.1"
    xmlns="http://www.w3.org/2000/svg">
<rect x="0" y="0" width="%(width)d" height="%(height)d" style="fill:#ffffff"/>
"""

POSTAMBLE = """\
</svg>
"""

CURVE_COLORS = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


class FigureSVG:
    """Layered drawing in complex-plane coordinates over a fixed box"""

    def __init__(self, box: tuple, size: int = 800):
        xmin, xmax, ymin, ymax = box
        self.box = box
        self.scale = size / max(xmax - xmin, ymax - ymin)
        self.width = int(round((xmax - xmin) * self.scale))
        self.height = int(round((ymax - ymin) * self.scale))
        self.layers: dict[str, list[str]] = {}
        self.current: Optional[list[str]] = None

    def layer(self, name: str) -> "FigureSVG":
        """Start (or resume) the group with the given id"""
        self.current = self.layers.setdefault(name, [])
        return self

    def to_svg(self, x: float, y: float) -> tuple[float, float]:
        """Map plane coordinates to SVG coordinates (y axis pointing down)"""
        xmin, _, _, ymax = self.box
        return (x - xmin) * self.scale, (ymax - y) * self.scale

    def circle(self, z: complex, radius: float, stroke="#000000", fill="none"):
        """Circle with radius in plane units"""
        x, y = self.to_svg(z.real, z.imag)
        self.current.append(
            f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{radius * self.scale:.3f}" '
            f'style="fill:{fill};stroke:{stroke};stroke-width:1"/>'
        )

    def marker(self, z: complex, size: float = 4, color="#000000", filled=True):
        """Circle with a fixed pixel size"""
        x, y = self.to_svg(z.real, z.imag)
        fill = color if filled else "none"
        self.current.append(
            f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{size:.3f}" '
            f'style="fill:{fill};stroke:{color};stroke-width:1"/>'
        )

    def line(self, points: Iterable[complex], color="#000000", width=1.5, closed=False):
        """Polyline (or polygon when closed) through the points"""
        coords = " ".join(
            "%.3f,%.3f" % self.to_svg(z.real, z.imag) for z in points
        )
        tag = "polygon" if closed else "polyline"
        self.current.append(
            f'<{tag} points="{coords}" '
            f'style="fill:none;stroke:{color};stroke-width:{width}"/>'
        )

    def rect(self, x0: float, x1: float, y0: float, y1: float, color: str):
        """Filled axis-aligned rectangle given by plane coordinates"""
        left, top = self.to_svg(x0, y1)
        right, bottom = self.to_svg(x1, y0)
        self.current.append(
            f'<rect x="{left:.3f}" y="{top:.3f}" width="{right - left:.3f}" '
            f'height="{bottom - top:.3f}" style="fill:{color};stroke:none"/>'
        )

    def render(self, comment: str = "") -> str:
        """The complete document"""
        parts = [
            PREAMBLE
            % {"width": self.width, "height": self.height, "comment": comment}
        ]
        for name, commands in self.layers.items():
            parts.append(f'<g id="{name}">\n')
            parts.extend(command + "\n" for command in commands)
            parts.append("</g>\n")
        parts.append(POSTAMBLE)
        return "".join(parts)

    def save(self, path: Path, comment: str = "") -> Path:
        """Write the document to a file"""
        with open(path, mode="w", encoding="utf-8", newline="\n") as f:
            f.write(self.render(comment))
        return path


def region_figure(
    grid: RegionGrid,
    curves: CurveSet,
    analysis: DominantAnalysis,
    sample: Optional[NFSample] = None,
) -> FigureSVG:
    """
    Disk boundary, shaded U_F cells, the boundary curves of N, pole markers
    and the N_F sample cloud
    """
    figure = FigureSVG(grid.box)

    mask = grid.mask_uf if grid.mask_uf is not None else grid.mask_u
    figure.layer("region_mask")
    half_x = 0.5 * grid.cell_width
    half_y = 0.5 * grid.cell_height
    for iy in range(grid.ny):
        row = mask[iy]
        if not row.any():
            continue

        # Runs of consecutive masked cells
        edges = np.flatnonzero(np.diff(np.concatenate(([0], row.view(np.int8), [0]))))
        for start, stop in zip(edges[::2], edges[1::2]):
            figure.rect(
                grid.xs[start] - half_x,
                grid.xs[stop - 1] + half_x,
                grid.ys[iy] - half_y,
                grid.ys[iy] + half_y,
                "#9a9a9a",
            )

    figure.layer("disk").circle(0j, grid.rho)

    for j, polylines in enumerate(curves.curves):
        figure.layer(f"curves_j{j + 1}")
        color = CURVE_COLORS[j % len(CURVE_COLORS)]
        for polyline in polylines:
            figure.line(polyline.points, color=color, closed=polyline.closed)

    figure.layer("poles")
    for z in analysis.dominant_locations:
        figure.marker(z, size=5, color="#000000", filled=True)
    for z in analysis.non_dominant_locations:
        figure.marker(z, size=5, color="#000000", filled=False)

    figure.layer("nf_points")
    if sample is not None:
        for z in sample.points:
            if grid.box[0] <= z.real <= grid.box[1] and grid.box[2] <= z.imag <= grid.box[3]:
                figure.marker(z, size=1, color="#1f3f7f")

    return figure
