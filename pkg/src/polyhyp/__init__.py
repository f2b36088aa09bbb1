"""Finite-scale experiments on gentle maps to hyperbolic spaces.

Submodules: graphcore (graphs, balls, induced patterns), gp (graph products
of cyclic groups), median (hyperplanes of median and quasi-median graphs),
coneoff (cone-offs and gentleness profiles), hyp (hyperbolicity checks),
lamp (the lamplighter graph) and cli.
"""

__version__ = "0.1.0"
