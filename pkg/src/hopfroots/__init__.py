"""Numerical degrees, Hopf invariants and root sets of maps S^3, RP^3 -> S^2, RP^2."""

from .degree import DegreeConfig, compute_degree, find_preimages, local_sign
from .errors import *  # noqa: F401,F403
from .geometry import canonical_rep, sample_sphere, stereographic, tangent_frame
from .linking import hopf_invariant, hopf_report, linking_number, verify_classification
from .maps import (
    ANTIPODAL,
    COLLAPSE3,
    COVER2,
    COVER3,
    HOPF,
    HPRIME,
    IDENTITY,
    QSQUARE,
    REFLECT,
    Y0,
    MapDescriptor,
    build_class_map,
    compose,
    const,
    differential,
    parse_map,
    power,
    power_rp,
    rotate,
    verify_well_defined,
)
from .report import RunConfig, export_curves, run_suite
from .roots import RootSetReport, minimal_root_demo, root_set_report, rp2_root_decompose
from .tracer import Curve, TraceConfig, find_root_components, trace_component

__version__ = "0.1.0"
