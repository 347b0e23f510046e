"""Sign-tracked algebra of Majorana strings on replicated registers.

A Majorana string is stored as a bit mask over the 2n modes: bit mu-1 set
means gamma_mu participates.  The canonical operator attached to a mask S is

    gamma_S = i^(|S|(|S|-1)/2) gamma_{mu_1} ... gamma_{mu_r},   mu_1 < ... < mu_r,

which is Hermitian and squares to the identity.  All phases produced by
reordering live in coefficients; the mask itself is a pure label.

A replicated string is a tuple of k masks, one per replica; replica factors
act on disjoint tensor slots and therefore commute freely.  Operators are
sparse maps from replicated strings to coefficients (see OperatorExpansion).

Coefficients are ordinary Python complex numbers by default.  The exact
paths (symbolic projectors, integer norm checks) use RationalComplex, a
Gaussian-rational coefficient; every operation here is type-generic over
the two.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

# Coefficients with |c| below this are dropped after floating-point
# arithmetic; exact coefficients are only dropped when identically zero.
PRUNE_TOL = 1e-12


class RationalComplex:
    """Exact complex number with Fraction real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def coerce(value) -> "RationalComplex":
        if isinstance(value, RationalComplex):
            return value
        return RationalComplex(value)

    def __add__(self, other):
        o = RationalComplex.coerce(other)
        return RationalComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = RationalComplex.coerce(other)
        return RationalComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return RationalComplex.coerce(other) - self

    def __mul__(self, other):
        o = RationalComplex.coerce(other)
        return RationalComplex(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RationalComplex.coerce(other)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero RationalComplex")
        return RationalComplex(
            (self.re * o.re + self.im * o.im) / den,
            (self.im * o.re - self.re * o.im) / den,
        )

    def __neg__(self):
        return RationalComplex(-self.re, -self.im)

    def conjugate(self):
        return RationalComplex(self.re, -self.im)

    def times_i_power(self, m: int) -> "RationalComplex":
        m %= 4
        if m == 0:
            return self
        if m == 1:
            return RationalComplex(-self.im, self.re)
        if m == 2:
            return RationalComplex(-self.re, -self.im)
        return RationalComplex(self.im, -self.re)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = RationalComplex.coerce(other) if not isinstance(other, RationalComplex) else other
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        return f"RationalComplex({self.re!r}, {self.im!r})"


_I_POW = (1, 1j, -1, -1j)


def _times_i_power(c, m: int):
    if isinstance(c, RationalComplex):
        return c.times_i_power(m)
    return c * _I_POW[m % 4]


def _is_kept(c, tol: float) -> bool:
    if isinstance(c, RationalComplex):
        return bool(c)
    return abs(c) > tol


def canonical_phase_exponent(r: int) -> int:
    """Exponent of i in the canonical prefactor of a weight-r string."""
    return (r * (r - 1) // 2) % 4


def mask_weight(mask: int) -> int:
    return mask.bit_count()


def mask_modes(mask: int) -> tuple[int, ...]:
    """1-based mode indices of a mask, ascending."""
    modes = []
    mu = 1
    while mask:
        if mask & 1:
            modes.append(mu)
        mask >>= 1
        mu += 1
    return tuple(modes)


def modes_mask(modes: Iterable[int]) -> int:
    mask = 0
    for mu in modes:
        if mu < 1:
            raise ValueError(f"mode index {mu} is not 1-based")
        bit = 1 << (mu - 1)
        if mask & bit:
            raise ValueError(f"repeated mode index {mu}")
        mask |= bit
    return mask


def string_product(a: int, b: int, n: int) -> tuple[int, int]:
    """Multiply two canonical strings: gamma_a gamma_b = i^m gamma_(a xor b).

    Returns (a xor b, m) with m the phase exponent mod 4.  The sign comes
    from counting the transpositions that interleave the two sorted mode
    lists, plus the three canonical prefactors.
    """
    full = (1 << (2 * n)) - 1
    if a & ~full or b & ~full:
        raise ValueError(f"mask outside the 2n={2 * n} available modes")
    inversions = 0
    t = b
    while t:
        low = t & -t
        inversions += (a >> low.bit_length()).bit_count()
        t ^= low
    m = (
        canonical_phase_exponent(a.bit_count())
        + canonical_phase_exponent(b.bit_count())
        - canonical_phase_exponent((a ^ b).bit_count())
        + 2 * inversions
    ) % 4
    return a ^ b, m


@dataclass
class OperatorExpansion:
    """Sparse operator on k replicas of n qubits in the Majorana string basis.

    terms maps a tuple of k masks to the coefficient of the corresponding
    tensor product of canonical strings.  Zero coefficients are never kept.
    """

    n: int
    k: int
    terms: dict = field(default_factory=dict)

    def copy(self) -> "OperatorExpansion":
        return OperatorExpansion(self.n, self.k, dict(self.terms))

    def __add__(self, other: "OperatorExpansion") -> "OperatorExpansion":
        _check_shape(self, other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            acc = out.get(key, 0) + c
            if _is_kept(acc, PRUNE_TOL):
                out[key] = acc
            else:
                out.pop(key, None)
        return OperatorExpansion(self.n, self.k, out)

    def __sub__(self, other: "OperatorExpansion") -> "OperatorExpansion":
        return self + (-1) * other

    def __mul__(self, scalar) -> "OperatorExpansion":
        if isinstance(scalar, OperatorExpansion):
            raise TypeError("use op_multiply for operator products")
        if not _is_kept(scalar, 0.0):
            return OperatorExpansion(self.n, self.k, {})
        return OperatorExpansion(
            self.n, self.k, {key: c * scalar for key, c in self.terms.items()}
        )

    __rmul__ = __mul__

    def __len__(self) -> int:
        return len(self.terms)

    def prune(self, tol: float = PRUNE_TOL) -> "OperatorExpansion":
        self.terms = {k: c for k, c in self.terms.items() if _is_kept(c, tol)}
        return self

    def sorted_terms(self) -> list:
        """Terms in lexicographic order of the concatenated masks."""
        return sorted(self.terms.items(), key=lambda item: item[0])


def _check_shape(a: OperatorExpansion, b: OperatorExpansion) -> None:
    if a.n != b.n or a.k != b.k:
        raise ValueError(
            f"operator shapes differ: (n={a.n}, k={a.k}) vs (n={b.n}, k={b.k})"
        )


def identity_operator(n: int, k: int, exact: bool = False) -> OperatorExpansion:
    one = RationalComplex(1) if exact else complex(1)
    return OperatorExpansion(n, k, {(0,) * k: one})


def single_string(n: int, k: int, masks: Iterable[int], coeff=1.0) -> OperatorExpansion:
    key = tuple(masks)
    if len(key) != k:
        raise ValueError(f"expected {k} masks, got {len(key)}")
    full = (1 << (2 * n)) - 1
    for mask in key:
        if mask & ~full:
            raise ValueError(f"mask {mask} outside the 2n={2 * n} available modes")
    return OperatorExpansion(n, k, {key: coeff})


def op_multiply(A: OperatorExpansion, B: OperatorExpansion) -> OperatorExpansion:
    """Exact operator product, replica by replica."""
    _check_shape(A, B)
    k = A.k
    n = A.n
    out: dict = {}
    for ka, ca in A.terms.items():
        for kb, cb in B.terms.items():
            c = ca * cb
            phase = 0
            masks = []
            for ell in range(k):
                mask, m = string_product(ka[ell], kb[ell], n)
                masks.append(mask)
                phase += m
            c = _times_i_power(c, phase)
            key = tuple(masks)
            acc = out.get(key, 0) + c
            if _is_kept(acc, PRUNE_TOL):
                out[key] = acc
            else:
                out.pop(key, None)
    return OperatorExpansion(n, k, out)


def op_adjoint(A: OperatorExpansion) -> OperatorExpansion:
    # Basis strings are Hermitian, so only coefficients conjugate.
    return OperatorExpansion(
        A.n, A.k, {key: c.conjugate() for key, c in A.terms.items()}
    )


def op_trace(A: OperatorExpansion):
    """Tr A = 2^{nk} x coefficient of the empty replicated string."""
    c = A.terms.get((0,) * A.k, 0)
    return (2 ** (A.n * A.k)) * c


def hs_inner(A: OperatorExpansion, B: OperatorExpansion):
    """Hilbert-Schmidt inner product Tr(A^dag B) = 2^{nk} sum conj(A_S) B_S."""
    _check_shape(A, B)
    small, big = (A, B) if len(A.terms) <= len(B.terms) else (B, A)
    total = 0
    for key, c in small.terms.items():
        other = big.terms.get(key)
        if other is None:
            continue
        if small is A:
            total = total + c.conjugate() * other
        else:
            total = total + other.conjugate() * c
    return (2 ** (A.n * A.k)) * total


def hs_norm(A: OperatorExpansion) -> float:
    value = hs_inner(A, A)
    if isinstance(value, RationalComplex):
        return float(Fraction(value.re)) ** 0.5
    return abs(value) ** 0.5


def op_to_float(A: OperatorExpansion) -> OperatorExpansion:
    """Float-coefficient copy; exact and float expansions never mix otherwise."""
    return OperatorExpansion(A.n, A.k, {key: complex(c) for key, c in A.terms.items()})


def weight_sector(A: OperatorExpansion) -> dict:
    """Split A into components of fixed per-replica Majorana weight."""
    sectors: dict = {}
    for key, c in A.terms.items():
        r = tuple(mask.bit_count() for mask in key)
        sectors.setdefault(r, OperatorExpansion(A.n, A.k, {})).terms[key] = c
    return sectors


@dataclass(frozen=True)
class SignedPermutation:
    """Mode relabeling mu -> perm[mu-1] together with per-mode signs."""

    perm: tuple
    signs: tuple

    def __post_init__(self):
        m = len(self.perm)
        if sorted(self.perm) != list(range(1, m + 1)):
            raise ValueError("perm is not a permutation of 1..2n")
        if len(self.signs) != m or any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be a vector of +1/-1 of matching length")


def apply_signed_permutation(A: OperatorExpansion, sp: SignedPermutation) -> OperatorExpansion:
    """Adjoint action gamma_mu -> s_mu gamma_(perm(mu)), identical per replica."""
    if len(sp.perm) != 2 * A.n:
        raise ValueError("signed permutation size does not match 2n")
    out: dict = {}
    cache: dict = {}
    for key, c in A.terms.items():
        masks = []
        phase = 0
        sign = 1
        for mask in key:
            got = cache.get(mask)
            if got is None:
                got = _relabel_mask(mask, sp)
                cache[mask] = got
            new_mask, m, s = got
            masks.append(new_mask)
            phase += m
            sign *= s
        c = _times_i_power(c * sign, phase)
        key_out = tuple(masks)
        acc = out.get(key_out, 0) + c
        if _is_kept(acc, PRUNE_TOL):
            out[key_out] = acc
        else:
            out.pop(key_out, None)
    return OperatorExpansion(A.n, A.k, out)


def _relabel_mask(mask: int, sp: SignedPermutation) -> tuple[int, int, int]:
    """Image of one canonical string under the mode relabeling.

    Returns (new_mask, phase_exponent, sign): the relabeled modes must be
    re-sorted, which costs a permutation sign, and the canonical prefactors
    of the old and new labels differ only if weights changed (they never do).
    """
    modes = mask_modes(mask)
    images = [sp.perm[mu - 1] for mu in modes]
    sign = 1
    for mu in modes:
        sign *= sp.signs[mu - 1]
    # Bubble count = parity of the sorting permutation of the image list.
    inv = 0
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            if images[i] > images[j]:
                inv += 1
    sign *= (-1) ** inv
    return modes_mask(images), 0, sign


def apply_orthogonal(A: OperatorExpansion, Q: np.ndarray) -> OperatorExpansion:
    """Adjoint matchgate action on coefficients, replica by replica.

    Each weight-r string transforms into the weight-r sector through the
    determinant minors of Q: gamma_S -> sum_Sb det(Q[Sb, S]) gamma_Sb.
    """
    Q = np.asarray(Q, dtype=float)
    two_n = 2 * A.n
    if Q.shape != (two_n, two_n):
        raise ValueError(f"Q must be {two_n}x{two_n}")
    if np.linalg.norm(Q.T @ Q - np.eye(two_n)) > 1e-10:
        raise ValueError("Q is not orthogonal to 1e-10")

    minors_cache: dict = {}

    def column_images(mask: int) -> list[tuple[int, float]]:
        got = minors_cache.get(mask)
        if got is not None:
            return got
        r = mask.bit_count()
        images = []
        if r == 0:
            images = [(0, 1.0)]
        else:
            cols = [mu - 1 for mu in mask_modes(mask)]
            sub = Q[:, cols]
            for out_mask, rows in _same_weight_masks(two_n, r):
                det = _minor_det(sub, rows)
                if abs(det) > PRUNE_TOL:
                    images.append((out_mask, det))
        minors_cache[mask] = images
        return images

    current = A
    for ell in range(A.k):
        out: dict = {}
        for key, c in current.terms.items():
            for out_mask, det in column_images(key[ell]):
                new_key = key[:ell] + (out_mask,) + key[ell + 1 :]
                acc = out.get(new_key, 0) + c * det
                if _is_kept(acc, PRUNE_TOL):
                    out[new_key] = acc
                else:
                    out.pop(new_key, None)
        current = OperatorExpansion(A.n, A.k, out)
    return current


def _same_weight_masks(width: int, r: int) -> Iterator[tuple[int, list[int]]]:
    from itertools import combinations

    for rows in combinations(range(width), r):
        mask = 0
        for b in rows:
            mask |= 1 << b
        yield mask, list(rows)


def _minor_det(sub: np.ndarray, rows: list[int]) -> float:
    r = len(rows)
    if r == 1:
        return float(sub[rows[0], 0])
    if r == 2:
        return float(
            sub[rows[0], 0] * sub[rows[1], 1] - sub[rows[0], 1] * sub[rows[1], 0]
        )
    return float(np.linalg.det(sub[rows, :]))


def parity_operator(n: int) -> OperatorExpansion:
    """Fermionic parity (-i)^n gamma_1 ... gamma_2n as a k=1 expansion.

    Folding the canonical prefactor of the full-weight string into the
    phase gives exactly (-1)^n gamma_full.
    """
    full = (1 << (2 * n)) - 1
    return OperatorExpansion(n, 1, {(full,): complex((-1) ** n)})


def vacuum_state_operator(n: int, k: int, exact: bool = False) -> OperatorExpansion:
    """|0...0><0...0| on each of the k replicas, expanded in strings.

    Built from |0><0| = (1 + Z_j)/2 per qubit with Z_j = -gamma_(2j-1, 2j);
    the k-fold tensor power multiplies coefficients across replicas.
    """
    single = identity_operator(n, 1, exact=exact)
    half = Fraction(1, 2) if exact else 0.5
    for j in range(1, n + 1):
        pair = modes_mask((2 * j - 1, 2 * j))
        z_j = OperatorExpansion(
            n, 1, {(pair,): RationalComplex(-1) if exact else complex(-1)}
        )
        factor = (identity_operator(n, 1, exact=exact) + z_j) * half
        single = op_multiply(single, factor)
    return op_tensor_power(single, k)


def op_tensor_power(A: OperatorExpansion, k: int) -> OperatorExpansion:
    """A^{tensor k} across replicas; A must be a k=1 expansion."""
    if A.k != 1:
        raise ValueError("tensor power expects a single-replica operator")
    terms: dict = {(): 1}
    for _ in range(k):
        nxt: dict = {}
        for key, c in terms.items():
            for (mask,), ca in A.terms.items():
                nxt[key + (mask,)] = c * ca
        terms = nxt
    return OperatorExpansion(A.n, k, terms).prune()


def to_json_dict(A: OperatorExpansion) -> dict:
    terms = []
    for key, c in A.sorted_terms():
        cc = complex(c)
        terms.append({"masks": list(key), "re": cc.real, "im": cc.imag})
    return {"n": A.n, "k": A.k, "terms": terms}


def to_json(A: OperatorExpansion) -> str:
    return json.dumps(to_json_dict(A))


def from_json_dict(data: dict) -> OperatorExpansion:
    n = int(data["n"])
    k = int(data["k"])
    terms: dict = {}
    for entry in data["terms"]:
        key = tuple(int(m) for m in entry["masks"])
        if len(key) != k:
            raise ValueError("term mask count does not match k")
        c = complex(float(entry["re"]), float(entry.get("im", 0.0)))
        if _is_kept(c, PRUNE_TOL):
            terms[key] = c
    return OperatorExpansion(n, k, terms)


def from_json(text: str) -> OperatorExpansion:
    return from_json_dict(json.loads(text))
