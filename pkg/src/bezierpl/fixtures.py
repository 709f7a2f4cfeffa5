"""Named curves shipped with the package (``bezierpl/data/*.curve``)."""

from __future__ import annotations

from importlib import resources

import numpy as np

from .cli_io import CurveFile, parse_curve_file
from .curve_core import BezierCurve
from .subdivision import PLCurve

#: regular open fixtures, degrees 2 through 6
REGULAR_OPEN = ("quad2", "twist3", "space4", "s1", "helix6")
#: regular closed loops, tangent-continuous at the closure point
REGULAR_CLOSED = ("c1", "c2")
NONLINEAR = REGULAR_OPEN + REGULAR_CLOSED


def fixture_path(name: str):
    return resources.files("bezierpl") / "data" / f"{name}.curve"


def names() -> list[str]:
    return sorted(p.name[: -len(".curve")] for p in (resources.files("bezierpl") / "data").iterdir()
                  if p.name.endswith(".curve"))


def load_file(name: str) -> CurveFile:
    return parse_curve_file(fixture_path(name).read_text(encoding="utf-8"))


def load(name: str) -> BezierCurve | PLCurve:
    cf = load_file(name)
    return cf.to_polyline() if cf.is_polyline else cf.to_curve()


def s1_family() -> list[BezierCurve]:
    """S1 and rigidly moved, scaled, reversed and lifted variants; all simple."""
    base = load("s1").control_points
    c, s = np.cos(0.7), np.sin(0.7)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    tilt = np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    lift = np.array([0.0, 0.5, -0.5, 0.5, -0.5, 0.0])
    return [
        BezierCurve(base),
        BezierCurve(base @ rot.T + [5.0, -2.0, 1.0]),
        BezierCurve(3.0 * base),
        BezierCurve(base[::-1]),
        BezierCurve(base + np.column_stack([np.zeros(6), np.zeros(6), lift])),
        BezierCurve(base @ (tilt @ rot).T),
    ]
