"""Curvature flow of graphs: speeds, shape operators, grid and radial runs."""

from ._core import (
    Speed,
    cone_contains,
    cylinder_extinction_time,
    radial_ball,
    run_ball,
    run_cli,
    shape_operator,
    structure_conditions,
)

__all__ = [
    "Speed",
    "cone_contains",
    "cylinder_extinction_time",
    "radial_ball",
    "run_ball",
    "run_cli",
    "shape_operator",
    "structure_conditions",
]
