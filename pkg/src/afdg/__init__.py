"""Semi-discrete Active Flux and Discontinuous Galerkin solvers on Cartesian
grids, the dof mappings identifying the two, and experiment drivers for
convergence, superconvergence, equivalence and runtime studies."""

from . import af, cli, dg, driver, equiv, mesh, poly, problems, timeint

__all__ = ["poly", "mesh", "problems", "dg", "af", "equiv", "timeint",
           "driver", "cli"]

__version__ = "0.1.0"
