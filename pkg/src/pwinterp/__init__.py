"""Numerical toolkit for complete interpolating sequences in Paley-Wiener
spaces and band-limited reconstruction from nonuniform samples.

The package decides, with explicit finite-window evidence, whether a node
sequence supports stable interpolation of L^p band-limited functions, and
reconstructs such functions from samples through the generating-function
series.  See the README for the library tour and the CLI.
"""
from .nodes import (
    FamilySpec,
    Node,
    NodeSequence,
    integer_lattice,
    make_family,
    load_nodes,
    save_nodes,
    nearest_distance,
    separation,
    relative_density,
)
from .genfn import (
    Exponents,
    GeneratingFunction,
    build_generating_function,
    fit_weight_exponent,
    comparability_stats,
    modulus_margin,
    growth_diagnostics,
)
from .criteria import (
    WeightSequence,
    IntervalFamily,
    AnchorSelection,
    carleson_sum,
    discrete_ap,
    continuous_ap,
    select_subsequence,
    select_probe_points,
    Thresholds,
    CriteriaReport,
    full_verdict,
)
from .hilbert import (
    DiscreteHilbertOperator,
    probe_norm,
    witness_quotient,
    hilbert_transform_pv,
)
from .interp import (
    SampleSet,
    GridSpec,
    GridFunction,
    weighted_data_norm,
    reconstruct,
    grid_lp_norm,
    stability_ratio,
    plancherel_polya_ratio,
    round_trip,
)

__version__ = "0.1.0"
