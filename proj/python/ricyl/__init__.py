"""Linear analysis on flat cylinders R x T^d: mode solvers, gauge fixing, kernel classification."""

import json

from ._ricyl import (
    ConfigError,
    DivergentConvolution,
    InvalidArgument,
    InvalidParams,
    NonInvertibleSector,
    NotInKernel,
    ResonantTau,
    RicylError,
    beta_prime_bound,
    estimate_weighted_bound,
    eval_type1,
    eval_type2,
    fundamental_matrix,
    fundamental_matrix_inverse,
    linear_profile_norm,
    reduced_dimensions,
    spectral_gap,
    system_matrix,
)
from . import _ricyl

__version__ = "0.1.0"


def spectrum(dim, lengths, cutoff=1, kind="Scalar"):
    return json.loads(_ricyl.spectrum_json(dim, list(lengths), cutoff, kind))


# Fields are dicts in the CLI format: {"rank": r, "terms": [...], "modes": [...]}.
def solve_gauge(source, lengths, tau=0.01, route="kernel"):
    return json.loads(_ricyl.solve_gauge_json(json.dumps(source), list(lengths), tau, route))


def classify_kernel(field, lengths, tau=0.0):
    return json.loads(_ricyl.classify_kernel_json(json.dumps(field), list(lengths), tau))


def three_circles(field, lengths, mu1, beta, beta_prime, L, triple):
    t1, t2, t3 = triple
    return json.loads(_ricyl.three_circles_json(json.dumps(field), list(lengths), mu1, beta, beta_prime, L, t1, t2, t3))


def oracle_suite(lengths, nr=32, nx=8, order=2):
    return json.loads(_ricyl.oracle_suite_json(list(lengths), nr, nx, order))
