"""Exact q-series invariants of weakly negative definite plumbing trees.

The main entry points are re-exported here; see the submodules for the
lattice, series, tree and Spin^c machinery.
"""

__version__ = "0.1.0"

from .admissible import (  # noqa: E402
    AdmissibleSeries,
    NotConvolvable,
    coefficient,
    even_weyl_line_member,
    graded_twist_coefficient,
    kostant_series,
    solve_puzzle_a1,
    translate_family_member,
    verify_admissible,
    weyl_twist,
)
from .brieskorn import brieskorn_plumbing, brieskorn_Y, psi_series  # noqa: E402
from .plumbing import MoveKind, MoveSpec, PlumbingTree, apply_move, framing, reduce  # noqa: E402
from .root_lattice import build_root_lattice, kostant_partition  # noqa: E402
from .series import (  # noqa: E402
    ComputationPlan,
    QSeries,
    compute_Y,
    verify_move_invariance,
    verify_twist_independence,
    verify_weyl_invariance,
)
from .spinc import enumerate_spinc, transport, weyl_act  # noqa: E402

__all__ = [
    "AdmissibleSeries",
    "ComputationPlan",
    "MoveKind",
    "MoveSpec",
    "NotConvolvable",
    "PlumbingTree",
    "QSeries",
    "apply_move",
    "brieskorn_Y",
    "brieskorn_plumbing",
    "build_root_lattice",
    "coefficient",
    "compute_Y",
    "enumerate_spinc",
    "even_weyl_line_member",
    "framing",
    "graded_twist_coefficient",
    "kostant_partition",
    "kostant_series",
    "psi_series",
    "reduce",
    "solve_puzzle_a1",
    "translate_family_member",
    "transport",
    "verify_admissible",
    "verify_move_invariance",
    "verify_twist_independence",
    "verify_weyl_invariance",
    "weyl_act",
    "weyl_twist",
]
