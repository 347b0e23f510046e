"""Shared helpers for the test suite.

Basis construction and spin lifts are the expensive steps, so they are
cached at module scope and reused across test files.
"""

import functools

import numpy as np

from mgc.dense import kron_power, random_orthogonal, reflection_rotation, lift_orthogonal
from mgc.gt import gt_basis
from mgc.strings import OperatorExpansion, single_string


@functools.lru_cache(maxsize=None)
def cached_basis(n: int, k: int):
    return tuple(gt_basis(n, k))


@functools.lru_cache(maxsize=None)
def orthogonal_pair(n: int, seed: int):
    """One rotation and one reflection with the same seed, as (qmat, unitary) pairs."""
    draw = random_orthogonal(n, seed=seed)
    q_rot = draw.qmat
    if draw.reflected:
        q_rot = reflection_rotation(n) @ q_rot
    u_rot, _, refl = lift_orthogonal(q_rot, n)
    assert not refl
    q_ref = reflection_rotation(n) @ q_rot
    u_ref, _, refl = lift_orthogonal(q_ref, n)
    assert refl
    return (q_rot, u_rot), (q_ref, u_ref)


@functools.lru_cache(maxsize=None)
def replica_unitaries(n: int, k: int, seed: int):
    """k-replica unitaries for the cached rotation/reflection pair at this seed."""
    (q_rot, u_rot), (q_ref, u_ref) = orthogonal_pair(n, seed)
    return (q_rot, kron_power(u_rot, k)), (q_ref, kron_power(u_ref, k))


def random_operator(n: int, k: int, seed: int, terms: int = 6) -> OperatorExpansion:
    """Random float operator with a few Majorana-string terms."""
    rng = np.random.default_rng(seed)
    width = 2 * n
    out = None
    for _ in range(terms):
        masks = tuple(int(rng.integers(0, 1 << width)) for _ in range(k))
        coeff = complex(rng.standard_normal(), rng.standard_normal())
        term = single_string(n, k, masks, coeff)
        out = term if out is None else out + term
    return out
