"""Numerical abstract domains: intervals, octagons and convex polyhedra."""

from .base import NumElement
from .box import Box
from .linear import LinConstraint, LinForm, linearize, render_constraints
from .octagon import Oct
from .polyhedra import Poly

DOMAINS = {"interval": Box, "octagon": Oct, "polyhedra": Poly}


def domain(name: str) -> type[NumElement]:
    try:
        return DOMAINS[name]
    except KeyError:
        raise ValueError(f"unknown numerical domain {name!r}; pick one of {sorted(DOMAINS)}") from None


__all__ = ["Box", "DOMAINS", "LinConstraint", "LinForm", "NumElement", "Oct", "Poly", "domain",
           "linearize", "render_constraints"]
