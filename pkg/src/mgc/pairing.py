"""Pairing-operator spanning sets of the free-fermion commutant.

A pairing configuration assigns a number of contracted Majorana legs to
each unordered pair of replicas.  Summing the corresponding products of
single-Majorana factors over all admissible mode assignments produces an
operator that commutes with every replicated Gaussian rotation; for small
replica number these operators are an (over)complete spanning set of the
commutant, with known Gram matrices and rank collapses.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .strings import (
    OperatorExpansion,
    hs_inner,
    op_multiply,
    single_string,
)

__all__ = [
    "PairingConfig",
    "InfeasibleConfigError",
    "admissible_configs",
    "pairing_operator",
    "gram_matrix",
    "span_rank",
]


class InfeasibleConfigError(ValueError):
    """No assignment of modes realizes the requested pairing counts."""


@dataclass(frozen=True)
class PairingConfig:
    """Symmetric zero-diagonal matrix of pairing counts, stored as the
    upper triangle in pair-lexicographic order."""

    k: int
    upper: tuple

    def __post_init__(self):
        if len(self.upper) != self.k * (self.k - 1) // 2:
            raise ValueError("upper triangle length does not match k")
        if any(x < 0 for x in self.upper):
            raise ValueError("pairing counts must be nonnegative")

    @property
    def pairs(self) -> list:
        return list(combinations(range(1, self.k + 1), 2))

    def count(self, a: int, b: int) -> int:
        if a == b:
            return 0
        a, b = min(a, b), max(a, b)
        return self.upper[self.pairs.index((a, b))]

    def row_sums(self) -> tuple:
        r = [0] * self.k
        for (a, b), x in zip(self.pairs, self.upper):
            r[a - 1] += x
            r[b - 1] += x
        return tuple(r)

    def matrix(self) -> np.ndarray:
        m = np.zeros((self.k, self.k), dtype=int)
        for (a, b), x in zip(self.pairs, self.upper):
            m[a - 1, b - 1] = m[b - 1, a - 1] = x
        return m


def admissible_configs(r, k: int) -> list:
    """All symmetric zero-diagonal nonnegative solutions of the row-sum
    constraints, in descending lexicographic order of the upper triangle."""
    r = tuple(int(v) for v in r)
    if len(r) != k:
        raise ValueError("weight tuple length must equal k")
    if any(v < 0 for v in r):
        raise ValueError("row sums must be nonnegative")
    pairs = list(combinations(range(k), 2))
    out = []

    def extend(idx, remaining, partial):
        if idx == len(pairs):
            if all(v == 0 for v in remaining):
                out.append(PairingConfig(k, tuple(partial)))
            return
        a, b = pairs[idx]
        # descending so the dominant leading pair comes first
        for x in range(min(remaining[a], remaining[b]), -1, -1):
            remaining[a] -= x
            remaining[b] -= x
            partial.append(x)
            extend(idx + 1, remaining, partial)
            partial.pop()
            remaining[a] += x
            remaining[b] += x

    extend(0, list(r), [])
    return out


def _assignments(config: PairingConfig, n: int):
    """Yield {pair: mode tuple} with sets disjoint whenever two pairs share
    a replica; pairs on four distinct replicas may reuse modes."""
    modes = range(1, 2 * n + 1)
    active = [(pair, x) for pair, x in zip(config.pairs, config.upper) if x > 0]
    used = {j: frozenset() for j in range(1, config.k + 1)}

    def rec(idx, used, chosen):
        if idx == len(active):
            yield dict(chosen)
            return
        (a, b), x = active[idx]
        blocked = used[a] | used[b]
        avail = [mu for mu in modes if mu not in blocked]
        for sel in combinations(avail, x):
            nxt = dict(used)
            nxt[a] = used[a] | set(sel)
            nxt[b] = used[b] | set(sel)
            yield from rec(idx + 1, nxt, chosen + [((a, b), sel)])

    yield from rec(0, used, [])


def pairing_operator(
    config: PairingConfig, n: int, normalized: bool = True
) -> OperatorExpansion:
    """Antisymmetrized pairing operator in the plain replica embedding.

    Each assignment contributes the pair-lexicographic ordered product of
    single-Majorana factors; anticommutation phases realize the canonical
    matching sign.  With normalized=True the coefficient vector is scaled
    to unit Euclidean length, which reproduces the closed-form k=2
    normalization 1/sqrt(binom(2n, r)).
    """
    k = config.k
    rows = config.row_sums()
    if max(rows, default=0) > 2 * n:
        raise InfeasibleConfigError(
            f"row sums {rows} exceed the {2 * n} available Majorana modes"
        )
    acc = OperatorExpansion(n, k, {})
    count = 0
    for assignment in _assignments(config, n):
        term = None
        for (a, b) in config.pairs:
            sel = assignment.get((a, b))
            if not sel:
                continue
            for mu in sel:
                for slot in (a, b):
                    factor = single_string(n, k, tuple(
                        (1 << (mu - 1)) if s == slot else 0 for s in range(1, k + 1)
                    ))
                    term = factor if term is None else op_multiply(term, factor)
        if term is None:
            term = single_string(n, k, (0,) * k)
        acc = acc + term
        count += 1
    if count == 0:
        raise InfeasibleConfigError(
            f"no disjoint mode assignment realizes counts {dict(zip(config.pairs, config.upper))}"
        )
    if normalized:
        l2 = float(np.sqrt(sum(abs(complex(c)) ** 2 for c in acc.terms.values())))
        acc = acc * (1.0 / l2)
    return acc


def gram_matrix(ops) -> np.ndarray:
    """Real symmetric matrix of Hilbert-Schmidt inner products."""
    ops = list(ops)
    if not ops:
        raise ValueError("empty operator list")
    m = len(ops)
    G = np.zeros((m, m), dtype=float)
    for i in range(m):
        for j in range(i, m):
            val = complex(hs_inner(ops[i], ops[j]))
            if abs(val.imag) > 1e-9 * max(1.0, abs(val.real)):
                raise ArithmeticError(f"non-real Gram entry {val} at ({i},{j})")
            G[i, j] = G[j, i] = val.real
    return G


def span_rank(ops, tol: float = 1e-9) -> int:
    """Dimension of the span: Gram eigenvalues above tol * max eigenvalue."""
    G = gram_matrix(ops)
    evals = np.linalg.eigvalsh(G)
    top = max(evals.max(), 0.0)
    if top == 0.0:
        return 0
    return int(np.sum(evals > tol * top))
