"""Galois orbits of local types and Atkin-Li pseudo-eigenvalues for newforms with quadratic nebentypus."""

from .characters import CharacterVec, LocalNebentypus, central_fiber, count_fiber_orbits
from .cyclotomic import CycElt, gauss_sum
from .local_types import LTCount, enumerate_orbits, lt_closed_form
from .pseudo_eigenvalues import (
    LOCount,
    lambda_equiv,
    lo_closed_form,
    lo_count,
    lo_lower_bound,
    scr_lambda_pair,
    steinberg_lambda,
)
from .residue_groups import QuadExt, ResidueRing, unit_group

__all__ = [
    "CharacterVec",
    "CycElt",
    "LOCount",
    "LTCount",
    "LocalNebentypus",
    "QuadExt",
    "ResidueRing",
    "central_fiber",
    "count_fiber_orbits",
    "enumerate_orbits",
    "gauss_sum",
    "lambda_equiv",
    "lo_closed_form",
    "lo_count",
    "lo_lower_bound",
    "lt_closed_form",
    "scr_lambda_pair",
    "steinberg_lambda",
    "unit_group",
]
__version__ = "0.1.0"
