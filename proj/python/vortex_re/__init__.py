"""Relative equilibria of the planar N-vortex problem.

Thin wrapper over the compiled ``_core`` extension. Positions are flat
arrays ``[x1, y1, x2, y2, ...]``.
"""

import json as _json

from ._core import (  # noqa: F401
    CentralConfiguration,
    InputError,
    NumericalError,
    VortexError,
    a_hat,
    analyze,
    check_theorem_b,
    classify,
    find_cc,
    grad_hamiltonian,
    hamiltonian,
    hessian,
    inertia,
    integrate,
    make_equilateral_triangle,
    make_rhombus,
    monodromy,
    nontrivial_spectrum,
    rhombus_b_transition,
    run_cli,
    stability_matrix,
    vector_field,
)

__version__ = "0.1.0"


def analyze_dict(document, **flags):
    """Like ``analyze`` but takes and returns Python dicts."""
    return _json.loads(analyze(_json.dumps(document), **flags))
