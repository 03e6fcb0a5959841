"""Moment and tail bounds for Kronecker-structured chaos, with Monte Carlo checks."""

import json as _json

from . import _kronchaos
from ._kronchaos import (
    KronchaosError,
    chaos_statistic,
    check_symmetry,
    mp_decoupled,
    mp_main,
    mp_norm,
    norm_statistic,
    rearrange,
    run_cli,
    sample_factors,
    symmetrize,
    tail_bound_ax,
)

__version__ = _kronchaos.__version__


def partition_norm(B, blocks, labels=(), restarts=32, seed=None):
    kwargs = {} if seed is None else {"seed": seed}
    return _json.loads(_kronchaos.partition_norm(B, [list(b) for b in blocks], list(labels), restarts, **kwargs))


def bound_report(A, dims, p_grid, t_grid=(), L=1.0, C_tail=1.0):
    return _json.loads(_kronchaos.bound_report(A, list(dims), list(p_grid), list(t_grid), L, C_tail))


def run_identities(seed=1, instances=100):
    return _json.loads(_kronchaos.run_identities(seed, instances))


def verify_gaussian_decoupling(a, p_grid, samples=100000, seed=1):
    return _json.loads(_kronchaos.verify_gaussian_decoupling(a, list(p_grid), samples, seed))


def verify_decoupling(A, dims, dist="gaussian", p_grid=(2.0,), samples=100000, seed=1):
    return _json.loads(_kronchaos.verify_decoupling(A, list(dims), dist, list(p_grid), samples, seed))
