"""Pattern operators of the signed-permutation (Clifford-matchgate) commutant.

The discrete matchgate subgroup acts on Majorana modes by relabelings and sign
flips.  Its k-replica commutant is spanned by pattern operators: assign each of
the 2n modes an even-cardinality replica subset, fix the census {x_I} of how
often each subset occurs, and sum the corresponding string monomials over all
assignments.  Distinct censuses occupy disjoint string sectors, so the basis is
orthogonal with exactly computable integer norms.

Everything structural here is exact.  Float variants appear only where a twirl
has to act on float input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product
from math import comb, factorial

from .strings import (
    OperatorExpansion,
    RationalComplex,
    SignedPermutation,
    apply_signed_permutation,
    hs_inner,
    identity_operator,
    op_multiply,
    op_to_float,
    single_string,
)

EXHAUSTIVE_MODE_LIMIT = 2  # group size 2^{2n}(2n)! beyond n=2 is not worth averaging


class InvalidOccupancyError(ValueError):
    """Occupancy data violates the even-subset or mode-count constraints."""


@lru_cache(maxsize=None)
def even_subsets(k: int) -> tuple:
    """All even-cardinality subsets of {1..k}, smallest first, lex within size."""
    if k < 1:
        raise ValueError("k must be at least 1")
    subsets = []
    for size in range(0, k + 1, 2):
        subsets.extend(combinations(range(1, k + 1), size))
    return tuple(subsets)


@dataclass(frozen=True)
class PatternOccupancy:
    """Census of replica subsets over the Majorana modes.

    x[i] counts the modes assigned subset even_subsets(k)[i]; the empty subset
    collects the spectator modes, so the entries sum to 2n.
    """

    k: int
    x: tuple

    def __post_init__(self):
        subsets = even_subsets(self.k)
        if len(self.x) != len(subsets):
            raise InvalidOccupancyError(
                f"expected {len(subsets)} counts for k={self.k}, got {len(self.x)}"
            )
        if any((not isinstance(v, int)) or v < 0 for v in self.x):
            raise InvalidOccupancyError("occupancy counts must be nonnegative integers")

    @property
    def occ(self) -> dict:
        return dict(zip(even_subsets(self.k), self.x))

    def total(self) -> int:
        return sum(self.x)

    def count(self, subset) -> int:
        return self.occ.get(tuple(subset), 0)

    def to_json_dict(self) -> dict:
        return {
            "x": {json.dumps(list(s)): v for s, v in zip(even_subsets(self.k), self.x)}
        }

    @classmethod
    def from_json_dict(cls, data: dict, k: int) -> "PatternOccupancy":
        raw = data["x"]
        counts = {tuple(json.loads(key)): int(v) for key, v in raw.items()}
        bad = set(counts) - set(even_subsets(k))
        if bad:
            raise InvalidOccupancyError(f"unknown subset keys: {sorted(bad)}")
        return cls(k, tuple(counts.get(s, 0) for s in even_subsets(k)))

    @classmethod
    def from_occ(cls, k: int, mapping) -> "PatternOccupancy":
        counts = {tuple(s): int(v) for s, v in dict(mapping).items()}
        bad = set(counts) - set(even_subsets(k))
        if bad:
            raise InvalidOccupancyError(f"subsets must have even size: {sorted(bad)}")
        return cls(k, tuple(counts.get(s, 0) for s in even_subsets(k)))


def cm_dim(n: int, k: int) -> int:
    """Commutant dimension: weak compositions of 2n into 2^{k-1} parts."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be at least 1")
    parts = 1 << (k - 1)
    return comb(2 * n + parts - 1, parts - 1)


def enumerate_occupancies(n: int, k: int, even_only: bool = False) -> list:
    """All occupancies with mode total 2n, in a fixed deterministic order.

    even_only keeps censuses whose counts are all even; those are the only
    sectors reached by twirling the replicated vacuum.
    """
    parts = len(even_subsets(k))
    step = 2 if even_only else 1
    out = []

    def fill(prefix: list, remaining: int, left: int) -> None:
        if left == 1:
            if remaining % step == 0:
                out.append(PatternOccupancy(k, tuple(prefix + [remaining])))
            return
        for v in range(remaining, -1, -step):
            fill(prefix + [v], remaining - v, left - 1)

    fill([], 2 * n, parts)
    if not even_only and len(out) != cm_dim(n, k):
        raise AssertionError("composition count disagrees with the dimension formula")
    return out


def occupancy_multinomial(occ: PatternOccupancy) -> int:
    """Number of mode assignments realizing the census: (2n)!/prod x_I!."""
    total = occ.total()
    value = factorial(total)
    for v in occ.x:
        value //= factorial(v)
    return value


def pattern_norm_sq(occ: PatternOccupancy, n: int) -> int:
    """Exact squared Hilbert-Schmidt norm 2^{kn} x multinomial of the census."""
    if occ.total() != 2 * n:
        raise InvalidOccupancyError("occupancy total must equal 2n")
    return (1 << (occ.k * n)) * occupancy_multinomial(occ)


def _assignments(occ: PatternOccupancy, n: int):
    """Yield maps mode -> subset realizing the census (spectators omitted)."""
    nonempty = [(s, v) for s, v in zip(even_subsets(occ.k), occ.x) if s and v]
    modes = tuple(range(1, 2 * n + 1))

    def rec(idx: int, available: tuple, current: dict):
        if idx == len(nonempty):
            yield dict(current)
            return
        subset, count = nonempty[idx]
        for chosen in combinations(available, count):
            for mu in chosen:
                current[mu] = subset
            rest = tuple(mu for mu in available if mu not in set(chosen))
            yield from rec(idx + 1, rest, current)
            for mu in chosen:
                del current[mu]

    yield from rec(0, modes, {})


def pattern_operator(
    occ: PatternOccupancy,
    n: int,
    k: int | None = None,
    normalized: bool = False,
    exact: bool | None = None,
) -> OperatorExpansion:
    """Sum of string monomials over all assignments realizing the census.

    Each assigned mode contributes the factor placing gamma_mu on its replica
    subset.  Factors multiply grouped by subset in enumeration order, modes
    ascending within a group: that is the fixed slot sequence under which mode
    relabelings permute the terms with no extra sign (factors of two different
    modes anticommute whenever their subsets share an odd number of replicas,
    so the slot order is part of the definition).  Unnormalized operators carry
    exact unit-modulus coefficients; normalized ones divide by the exact norm
    and default to float.
    """
    if occ.total() != 2 * n:
        raise InvalidOccupancyError("occupancy total must equal 2n")
    if k is not None and k != occ.k:
        raise InvalidOccupancyError(f"occupancy is for k={occ.k}, not k={k}")
    if exact is None:
        exact = not normalized
    if normalized and exact:
        raise ValueError("normalized operators are irrational; use exact=False")
    k = occ.k
    slot_rank = {s: i for i, s in enumerate(even_subsets(k))}
    one = RationalComplex(1) if exact else 1.0
    acc = OperatorExpansion(n, k, {})
    for assignment in _assignments(occ, n):
        term = identity_operator(n, k, exact=exact)
        for mu in sorted(assignment, key=lambda m: (slot_rank[assignment[m]], m)):
            bit = 1 << (mu - 1)
            masks = tuple(bit if (a + 1) in assignment[mu] else 0 for a in range(k))
            term = op_multiply(term, single_string(n, k, masks, one))
        acc = acc + term
    if normalized:
        acc = acc * (1.0 / pattern_norm_sq(occ, n) ** 0.5)
    return acc


@lru_cache(maxsize=None)
def _basis_exact(n: int, k: int) -> tuple:
    """Unnormalized exact pattern operators with their integer norms squared."""
    return tuple(
        (pattern_operator(occ, n), pattern_norm_sq(occ, n))
        for occ in enumerate_occupancies(n, k)
    )


@lru_cache(maxsize=None)
def _basis_float(n: int, k: int) -> tuple:
    return tuple(
        pattern_operator(occ, n, normalized=True) for occ in enumerate_occupancies(n, k)
    )


def _is_exact(W: OperatorExpansion) -> bool:
    return any(isinstance(c, RationalComplex) for c in W.terms.values())


def cm_twirl(W: OperatorExpansion) -> OperatorExpansion:
    """Orthogonal projection of W onto the signed-permutation commutant."""
    n, k = W.n, W.k
    if not W.terms:
        return OperatorExpansion(n, k, {})
    if _is_exact(W):
        acc = OperatorExpansion(n, k, {})
        for op, norm_sq in _basis_exact(n, k):
            overlap = hs_inner(op, W)
            if overlap:
                acc = acc + op * (overlap * RationalComplex(Fraction(1, norm_sq)))
        return acc
    acc = OperatorExpansion(n, k, {})
    for op in _basis_float(n, k):
        overlap = hs_inner(op, W)
        if abs(overlap) > 0:
            acc = acc + op * overlap
    return acc


def cm_twirl_exhaustive(W: OperatorExpansion, n: int | None = None, k: int | None = None) -> OperatorExpansion:
    """Average of W over every mode relabeling and sign flip, term by term."""
    n = W.n if n is None else n
    k = W.k if k is None else k
    if (n, k) != (W.n, W.k):
        raise ValueError("operator shape disagrees with the requested (n, k)")
    if n > EXHAUSTIVE_MODE_LIMIT:
        raise ValueError(
            f"exhaustive average gated to n <= {EXHAUSTIVE_MODE_LIMIT}; got n={n}"
        )
    m = 2 * n
    exact = _is_exact(W)
    acc = OperatorExpansion(n, k, {})
    count = 0
    for signs in product((1, -1), repeat=m):
        for perm in permutations(range(1, m + 1)):
            sp = SignedPermutation(perm, signs)
            acc = acc + apply_signed_permutation(W, sp)
            count += 1
    scale = RationalComplex(Fraction(1, count)) if exact else 1.0 / count
    return acc * scale


def cm_vacuum_moment(n: int, k: int) -> OperatorExpansion:
    """Exact signed-permutation average of the k-fold replicated vacuum.

    Only all-even censuses survive: a census term contributes exactly when each
    mode pair (2j-1, 2j) of a replica string is complete, which forces equal
    subsets on the two members of every such pair.  Each completed pair on an
    even subset I carries the vacuum expectation i^{|I|} = (-1)^{|I|/2}, so the
    coefficient of the unnormalized pattern operator is
    (-1)^{sum_I x_I |I|/4} x 2^{-kn} x multinomial(n; {x_I/2}) / multinomial(2n; {x_I}).
    """
    acc = OperatorExpansion(n, k, {})
    for occ in enumerate_occupancies(n, k, even_only=True):
        pair_assignments = factorial(n)
        for v in occ.x:
            pair_assignments //= factorial(v // 2)
        pair_weight = sum(v * len(s) for s, v in zip(even_subsets(k), occ.x)) // 4
        sign = -1 if pair_weight % 2 else 1
        coeff = Fraction(
            sign * pair_assignments, (1 << (k * n)) * occupancy_multinomial(occ)
        )
        acc = acc + pattern_operator(occ, n) * RationalComplex(coeff)
    return acc


def occupancies_to_json(occs) -> str:
    return json.dumps([occ.to_json_dict() for occ in occs], indent=2)


def cm_basis_float(n: int, k: int) -> tuple:
    """Normalized float pattern operators in enumeration order."""
    return _basis_float(n, k)
