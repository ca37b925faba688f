"""Joint covariance and sparse precision construction for multivariate spatial fields.

A directed acyclic graph over variate fields, cross-regression kernels on
its edges and univariate blocks per field determine the joint covariance
``Sigma = (I - B)^{-1} D (I - B)^{-T}``.  Both ``Sigma`` and its inverse are
built field by field; with CAR conditional blocks the precision stays
sparse in fields and sites at once.
"""

from .analyze import SparsityReport, asymmetry, ci_pattern, inverse_residual, sparsity_percent
from .assemble import (
    JointPair,
    ModelSpec,
    build_joint,
    empirical_cross_corr,
    generate,
    logdet_shortcut,
    quadratic_form,
    sample,
)
from .bench import BenchRecord, scaling_exponent, time_construction
from .graph import FieldDag, MoralGraph, ci_pairs, moralize, parse_dag, topological_order
from .grid import Grid, NeighborhoodMatrix, adjacency, displacement, make_grid
from .infer import CvReport, ParamVector, cross_validate, fit, nll, predict_conditional
from .kernels import (
    CarSpec,
    MaternSpec,
    TriWaveSpec,
    WendlandSpec,
    b_block,
    car_precision,
    matern32,
    matern_block,
    taper_block,
    triwave,
    wendland32,
)
from .stabilize import StabilizeConfig, is_pd, spectral_normalize, threshold_precision

__version__ = "0.1.0"
