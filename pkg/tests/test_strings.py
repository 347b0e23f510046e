"""Tests for the symbolic Majorana string algebra."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mgc.dense import gamma_string, lift_orthogonal, to_dense
from mgc.strings import (
    OperatorExpansion,
    RationalComplex,
    SignedPermutation,
    apply_orthogonal,
    apply_signed_permutation,
    canonical_phase_exponent,
    from_json,
    from_json_dict,
    hs_inner,
    hs_norm,
    identity_operator,
    mask_modes,
    mask_weight,
    modes_mask,
    op_adjoint,
    op_multiply,
    op_tensor_power,
    op_to_float,
    op_trace,
    parity_operator,
    single_string,
    string_product,
    to_json,
    to_json_dict,
    vacuum_state_operator,
    weight_sector,
)
from mgc.bridge import bridge_operator

from conftest import random_operator


def test_mask_helpers():
    assert mask_weight(0) == 0
    assert mask_weight(0b1011) == 3
    assert mask_modes(0b101) == (1, 3)
    assert modes_mask([1, 3]) == 0b101
    assert modes_mask([]) == 0
    # canonical phase i^{r(r-1)/2} cycles with period 4 in r(r-1)/2
    assert [canonical_phase_exponent(r) for r in range(5)] == [0, 0, 1, 3, 2]


def test_string_product_examples():
    # identity times gamma_{1,3}
    assert string_product(0, 0b101, 2) == (0b101, 0)
    # gamma_1 squared is the identity with trivial phase
    assert string_product(0b1, 0b1, 1) == (0, 0)
    # gamma_2 gamma_1 = -i gamma_1 gamma_2 = -(i)(i gamma_1 gamma_2) picks up +i
    # against the canonical phase of gamma_{1,2}
    mask, phase = string_product(0b10, 0b01, 1)
    assert mask == 0b11
    assert (1j) ** phase == 1j


def test_string_product_matches_dense():
    n = 2
    rng = np.random.default_rng(7)
    for _ in range(25):
        a = int(rng.integers(0, 16))
        b = int(rng.integers(0, 16))
        mask, phase = string_product(a, b, n)
        lhs = gamma_string(a, n) @ gamma_string(b, n)
        rhs = (1j) ** phase * gamma_string(mask, n)
        assert np.allclose(lhs, rhs, atol=1e-12)


def test_identity_and_single_string():
    ident = identity_operator(1, 2)
    assert ident.terms == {(0, 0): 1.0}
    op = single_string(1, 2, (1, 1), 2.5)
    assert op.terms == {(1, 1): 2.5}
    with pytest.raises(ValueError):
        single_string(1, 2, (4, 0))
    with pytest.raises(ValueError):
        single_string(1, 2, (1,))


def test_zero_coefficients_never_stored():
    op = single_string(1, 2, (1, 1))
    assert len(op - op) == 0
    assert len(op * 0.0) == 0
    # a sum whose coefficient lands below the prune tolerance disappears
    assert len(op + op * (1e-13 - 1.0)) == 0


def test_op_multiply_examples():
    ident = identity_operator(1, 2)
    lam = bridge_operator(1, 2, 1, 2)
    assert op_multiply(ident, lam).terms == lam.terms

    # Lambda_12^2 at (n,k)=(1,2) is a combination of identity and
    # gamma_{12} x gamma_{12}; dense image must equal the dense square
    sq = op_multiply(lam, lam)
    assert set(sq.terms) == {(0, 0), (3, 3)}
    dense_sq = to_dense(lam) @ to_dense(lam)
    assert np.allclose(to_dense(sq), dense_sq, atol=1e-12)

    g11 = single_string(1, 2, (1, 1))
    g22 = single_string(1, 2, (2, 2))
    prod = op_multiply(g11, g22)
    assert prod.terms == {(3, 3): -1.0}
    assert np.allclose(to_dense(prod), to_dense(g11) @ to_dense(g22), atol=1e-12)


def test_hs_inner_examples():
    g11 = single_string(1, 2, (1, 1))
    g22 = single_string(1, 2, (2, 2))
    lam = bridge_operator(1, 2, 1, 2)
    assert hs_inner(g11, g11) == 4
    assert hs_inner(g11, g22) == 0
    assert hs_inner(lam, lam) == 8
    assert hs_norm(lam) == pytest.approx(np.sqrt(8.0))


def test_trace_and_adjoint():
    assert op_trace(identity_operator(2, 3)) == 64
    op = single_string(1, 2, (1, 0), 1j)
    adj = op_adjoint(op)
    assert adj.terms == {(1, 0): -1j}
    assert op_trace(bridge_operator(1, 2, 1, 2)) == 0


def test_adjoint_matches_dense():
    op = random_operator(1, 2, seed=3)
    assert np.allclose(to_dense(op_adjoint(op)), to_dense(op).conj().T, atol=1e-12)


def test_weight_sector():
    ident = identity_operator(2, 3)
    assert set(weight_sector(ident)) == {(0, 0, 0)}
    lam = bridge_operator(1, 2, 1, 2)
    assert set(weight_sector(lam)) == {(1, 1)}
    mixed = single_string(1, 2, (3, 1)) + single_string(1, 2, (1, 1))
    assert set(weight_sector(mixed)) == {(2, 1), (1, 1)}


def test_signed_permutation_examples():
    op = single_string(1, 2, (1, 1))
    ident_sp = SignedPermutation((1, 2), (1, 1))
    assert apply_signed_permutation(op, ident_sp).terms == op.terms
    # flipping the sign of mode 1 acts twice on gamma_1 x gamma_1
    flip = SignedPermutation((1, 2), (-1, 1))
    assert apply_signed_permutation(op, flip).terms == {(1, 1): 1.0}
    # odd single-replica strings do pick up the sign
    single = single_string(1, 2, (1, 0))
    assert apply_signed_permutation(single, flip).terms == {(1, 0): -1.0}


def test_signed_permutation_matches_dense():
    # transposition of modes 1 and 2 at n=1, checked against the lifted unitary
    swap = SignedPermutation((2, 1), (1, 1))
    q = np.array([[0.0, 1.0], [1.0, 0.0]])
    unitary, _, _ = lift_orthogonal(q, 1)
    for masks in [(1, 0), (2, 0), (3, 0), (3, 3), (1, 2)]:
        op = single_string(1, 2, masks)
        out = apply_signed_permutation(op, swap)
        u2 = np.kron(unitary, unitary)
        expected = u2 @ to_dense(op) @ u2.conj().T
        assert np.allclose(to_dense(out), expected, atol=1e-10)
    # gamma_{1,2} is odd under the swap
    g12 = single_string(1, 1, (3,))
    assert apply_signed_permutation(g12, swap).terms == {(3,): -1.0}


def test_apply_orthogonal_examples():
    op = random_operator(2, 2, seed=11)
    same = apply_orthogonal(op, np.eye(4))
    diff = same - op
    assert all(abs(c) < 1e-12 for c in diff.terms.values())

    refl = np.diag([-1.0, 1.0])
    fixed = apply_orthogonal(single_string(1, 2, (1, 1)), refl)
    assert fixed.terms == {(1, 1): 1.0}

    from conftest import orthogonal_pair

    # the bridge generator is fixed by the rotation component
    (q_rot, _), _ = orthogonal_pair(1, 5)
    lam = bridge_operator(1, 2, 1, 2)
    moved = apply_orthogonal(lam, q_rot)
    assert hs_norm(moved - lam) < 1e-8


def test_apply_orthogonal_matches_dense():
    from mgc.dense import random_orthogonal

    for seed in range(3):
        draw = random_orthogonal(2, seed=seed)
        op = random_operator(2, 2, seed=seed + 40)
        out = apply_orthogonal(op, draw.qmat)
        u2 = np.kron(draw.unitary, draw.unitary)
        assert np.allclose(to_dense(out), u2 @ to_dense(op) @ u2.conj().T, atol=1e-8)


def test_apply_orthogonal_composition():
    from mgc.dense import random_orthogonal

    op = random_operator(2, 3, seed=2)
    q1 = random_orthogonal(2, seed=21, lift=False).qmat
    q2 = random_orthogonal(2, seed=22, lift=False).qmat
    once = apply_orthogonal(apply_orthogonal(op, q1), q2)
    combined = apply_orthogonal(op, q2 @ q1)
    assert hs_norm(once - combined) < 1e-8


def test_parity_operator():
    p1 = to_dense(parity_operator(1))
    assert np.allclose(p1, np.diag([1.0, -1.0]), atol=1e-12)
    p2 = to_dense(parity_operator(2))
    z = np.diag([1.0, -1.0])
    assert np.allclose(p2, np.kron(z, z), atol=1e-12)
    for n in (1, 2, 3):
        par = parity_operator(n)
        sq = op_multiply(par, par)
        assert sq.terms == identity_operator(n, 1).terms


def test_vacuum_state_operator():
    vac = vacuum_state_operator(1, 1)
    dense = to_dense(vac)
    expected = np.zeros((2, 2))
    expected[0, 0] = 1.0
    assert np.allclose(dense, expected, atol=1e-12)
    assert op_trace(vac) == pytest.approx(1.0)
    vac23 = vacuum_state_operator(2, 3)
    assert op_trace(vac23) == pytest.approx(1.0)


def test_op_tensor_power():
    vac = vacuum_state_operator(1, 1)
    vac3 = op_tensor_power(vac, 3)
    assert vac3.k == 3
    v1 = to_dense(vac)
    assert np.allclose(to_dense(vac3), np.kron(np.kron(v1, v1), v1), atol=1e-12)


def test_rational_complex_exact_path():
    from fractions import Fraction

    a = RationalComplex(Fraction(1, 2))
    b = RationalComplex(0, Fraction(1, 3))
    assert (a * b).re == 0
    assert (a * b).im == Fraction(1, 6)
    assert (a + a).re == 1
    lam = bridge_operator(1, 2, 1, 2, exact=True)
    sq = op_multiply(lam, lam)
    assert all(isinstance(c, RationalComplex) for c in sq.terms.values())
    flo = op_to_float(sq)
    assert all(isinstance(c, complex) for c in flo.terms.values())


def test_json_round_trip():
    op = random_operator(2, 2, seed=9)
    data = to_json_dict(op)
    assert set(data) == {"n", "k", "terms"}
    masks = [tuple(t["masks"]) for t in data["terms"]]
    assert masks == sorted(masks)
    back = from_json_dict(json.loads(json.dumps(data)))
    assert hs_norm(back - op) < 1e-12
    assert hs_norm(from_json(to_json(op)) - op) < 1e-12


small_coeff = st.integers(min_value=-3, max_value=3)


@st.composite
def exact_operators(draw, n, k):
    terms = draw(st.integers(min_value=1, max_value=4))
    op = OperatorExpansion(n, k, {})
    for _ in range(terms):
        masks = tuple(
            draw(st.integers(min_value=0, max_value=(1 << (2 * n)) - 1)) for _ in range(k)
        )
        coeff = RationalComplex(draw(small_coeff), draw(small_coeff))
        op = op + single_string(n, k, masks, coeff)
    return op


@given(
    data=st.data(),
    shape=st.sampled_from([(1, 2), (2, 2), (1, 3), (2, 3)]),
)
@settings(max_examples=40, deadline=None)
def test_multiplication_associative_exact(data, shape):
    n, k = shape
    a = data.draw(exact_operators(n, k))
    b = data.draw(exact_operators(n, k))
    c = data.draw(exact_operators(n, k))
    left = op_multiply(op_multiply(a, b), c)
    right = op_multiply(a, op_multiply(b, c))
    diff = left - right
    assert len(diff) == 0


def test_basis_hermitian_involutive_dense():
    # every canonical string is Hermitian and squares to the identity
    for n, k in [(1, 1), (1, 2), (2, 1), (2, 2)]:
        dim = 2 ** (n * k)
        for mask in range(1 << (2 * n)):
            masks = (mask,) + (0,) * (k - 1)
            dense = to_dense(single_string(n, k, masks))
            assert np.allclose(dense, dense.conj().T, atol=1e-12)
            assert np.allclose(dense @ dense, np.eye(dim), atol=1e-12)


def test_car_relations():
    # gamma_mu gamma_nu + gamma_nu gamma_mu = 2 delta_{mu nu}
    for n in (1, 2, 3):
        for mu in range(1, 2 * n + 1):
            for nu in range(1, 2 * n + 1):
                a = single_string(n, 1, (1 << (mu - 1),), RationalComplex(1))
                b = single_string(n, 1, (1 << (nu - 1),), RationalComplex(1))
                anti = op_multiply(a, b) + op_multiply(b, a)
                if mu == nu:
                    assert anti.terms == {(0,): RationalComplex(2)}
                else:
                    assert len(anti) == 0


def test_hs_orthonormality_all_pairs():
    # <gamma_S, gamma_T> = 2^{nk} delta_{ST} over the full basis
    for n, k in [(1, 1), (1, 2), (2, 1), (2, 2)]:
        norm = 2 ** (n * k)
        width = 1 << (2 * n)
        strings = [
            single_string(n, k, masks)
            for masks in _all_masks(width, k)
        ]
        for i, a in enumerate(strings):
            for j, b in enumerate(strings):
                expected = norm if i == j else 0
                assert hs_inner(a, b) == expected


def _all_masks(width, k):
    if k == 1:
        return [(m,) for m in range(width)]
    return [(m,) + rest for m in range(width) for rest in _all_masks(width, k - 1)]


@given(seed=st.integers(min_value=0, max_value=10**6))
@settings(max_examples=15, deadline=None)
def test_apply_orthogonal_preserves_hs_norm(seed):
    from mgc.dense import random_orthogonal

    op = random_operator(2, 2, seed=seed % 100)
    q = random_orthogonal(2, seed=seed, lift=False).qmat
    assert apply_orthogonal(op, q).n == 2
    assert abs(hs_norm(apply_orthogonal(op, q)) - hs_norm(op)) < 1e-8
