"""Tests for replica bridge generators, Casimirs, and dimension counting."""

from fractions import Fraction

import numpy as np
import pytest

from mgc.bridge import (
    CasimirSpec,
    bridge_operator,
    casimir,
    casimir_eigenvalue,
    casimir_eigenvalue_exact,
    commutant_dim,
    enumerate_weights,
    gt_patterns,
    quartic_eigenvalue_exact,
    quartic_invariant,
    replica_majorana,
    sector_chain_eigenvalues,
    weyl_dim,
)
from mgc.dense import gamma_string, to_dense, vacuum_vector
from mgc.strings import hs_norm, op_multiply, op_trace, parity_operator


def test_replica_majorana_carries_parity():
    # slot a holds gamma_mu, earlier slots hold the parity operator
    chi = replica_majorana(1, 2, 1, 3)
    assert set(chi.terms) == {(3, 1, 0)}
    first = replica_majorana(2, 1, 1, 2)
    assert set(first.terms) == {(2, 0)}


def test_replica_majorana_anticommute_across_replicas():
    a = replica_majorana(1, 1, 1, 2)
    b = replica_majorana(2, 2, 1, 2)
    anti = op_multiply(a, b) + op_multiply(b, a)
    assert len(anti) == 0


def test_bridge_operator_adjacent_form():
    lam = bridge_operator(1, 2, 1, 2)
    assert lam.terms == {(2, 1): -1j, (1, 2): 1j}


def test_bridge_operator_dense_identity():
    # Lambda_ab = sum_mu chi_mu^(a) chi_mu^(b) with parity-dressed factors
    for n, k, a, b in [(1, 2, 1, 2), (1, 3, 1, 3), (2, 2, 1, 2)]:
        lam = to_dense(bridge_operator(a, b, n, k))
        dim1 = 2**n
        par = to_dense(parity_operator(n))
        acc = np.zeros((dim1**k, dim1**k), dtype=complex)
        for mu in range(1, 2 * n + 1):
            g = gamma_string(1 << (mu - 1), n)
            fac_a = [np.eye(dim1)] * k
            fac_b = [np.eye(dim1)] * k
            for s in range(a - 1):
                fac_a[s] = par
            fac_a[a - 1] = g
            for s in range(b - 1):
                fac_b[s] = par
            fac_b[b - 1] = g
            chain_a = fac_a[0]
            chain_b = fac_b[0]
            for s in range(1, k):
                chain_a = np.kron(chain_a, fac_a[s])
                chain_b = np.kron(chain_b, fac_b[s])
            acc += chain_a @ chain_b
        assert np.linalg.norm(lam - acc) < 1e-10


def test_bridge_annihilates_replica_vacuum():
    for n, k in [(1, 2), (1, 3), (1, 4), (2, 2), (2, 3)]:
        vac = vacuum_vector(n)
        vk = vac
        for _ in range(k - 1):
            vk = np.kron(vk, vac)
        for a in range(1, k + 1):
            for b in range(a + 1, k + 1):
                lam = to_dense(bridge_operator(a, b, n, k))
                assert np.linalg.norm(lam @ vk) < 1e-10


def test_bridge_bracket_example():
    l12 = bridge_operator(1, 2, 2, 3, exact=True)
    l23 = bridge_operator(2, 3, 2, 3, exact=True)
    l13 = bridge_operator(1, 3, 2, 3, exact=True)
    comm = op_multiply(l12, l23) - op_multiply(l23, l12)
    assert len(comm - 2 * l13) == 0


def test_bridge_validates_indices():
    with pytest.raises(ValueError):
        bridge_operator(2, 2, 1, 3)
    with pytest.raises(ValueError):
        bridge_operator(3, 2, 1, 3)
    with pytest.raises(ValueError):
        bridge_operator(1, 4, 1, 3)


def test_casimir_spec_validation():
    with pytest.raises(ValueError):
        CasimirSpec(1, 1, "quadratic")
    with pytest.raises(ValueError):
        CasimirSpec(3, 1, "pfaffian")
    with pytest.raises(ValueError):
        CasimirSpec(4, 2, "quadratic")
    with pytest.raises(ValueError):
        CasimirSpec(4, 3, "trace-power")
    CasimirSpec(4, 2, "pfaffian")
    CasimirSpec(5, 2, "trace-power")


def test_quadratic_casimir_is_quarter_lambda_sq():
    c = casimir(CasimirSpec(2, 1, "quadratic"), 1, 2, exact=True)
    lam = bridge_operator(1, 2, 1, 2, exact=True)
    sq = op_multiply(lam, lam)
    diff = 4 * c - sq
    assert len(diff) == 0


def test_pfaffian_casimir_form():
    # prefactor fixed by the spinor-sector eigenvalue pair (-4, 2) at nu=(1,1)
    pf = casimir(CasimirSpec(4, 2, "pfaffian"), 1, 4)
    l12 = bridge_operator(1, 2, 1, 4)
    l34 = bridge_operator(3, 4, 1, 4)
    l13 = bridge_operator(1, 3, 1, 4)
    l24 = bridge_operator(2, 4, 1, 4)
    l14 = bridge_operator(1, 4, 1, 4)
    l23 = bridge_operator(2, 3, 1, 4)
    combo = (
        op_multiply(l12, l34) - op_multiply(l13, l24) + op_multiply(l14, l23)
    ) * 0.25
    assert hs_norm(pf - combo) < 1e-10


def test_casimir_commutes_with_bridges():
    quad3 = casimir(CasimirSpec(3, 1, "quadratic"), 1, 3)
    for a in range(1, 4):
        for b in range(a + 1, 4):
            lam = bridge_operator(a, b, 1, 3)
            comm = op_multiply(quad3, lam) - op_multiply(lam, quad3)
            assert hs_norm(comm) < 1e-9
    pf = casimir(CasimirSpec(4, 2, "pfaffian"), 1, 4)
    for a in range(1, 5):
        for b in range(a + 1, 5):
            lam = bridge_operator(a, b, 1, 4)
            comm = op_multiply(pf, lam) - op_multiply(lam, pf)
            assert hs_norm(comm) < 1e-9


def test_quadratic_casimir_trace():
    # eigenvalue -w^2 on sectors with traces (1, 2, 1) at (n, k) = (1, 2)
    quad = casimir(CasimirSpec(2, 1, "quadratic"), 1, 2)
    assert complex(op_trace(quad)) == pytest.approx(-2.0)


def test_enumerate_weights_examples():
    assert enumerate_weights(1, 2) == [-1, 0, 1]
    assert enumerate_weights(1, 4) == [(0, 0), (1, -1), (1, 0), (1, 1)]
    assert enumerate_weights(2, 3) == [0, 1, 2]


def test_weyl_dim_examples():
    assert weyl_dim(2, 3) == 5
    assert weyl_dim((1, 0), 4) == 4
    assert weyl_dim((1, 0), 5) == 5
    assert weyl_dim(0, 3) == 1
    assert weyl_dim((0, 0), 4) == 1


def test_gt_pattern_counts_match_weyl_dim():
    for k in (3, 4, 5):
        for w in enumerate_weights(2, k):
            assert len(gt_patterns(w, k)) == weyl_dim(w, k)


def test_gt_patterns_k3():
    assert gt_patterns(1, 3) == [(-1,), (0,), (1,)]
    pats = gt_patterns((1, 0), 4)
    assert len(pats) == 4


def test_commutant_dim_examples():
    for n in range(1, 6):
        assert commutant_dim(n, 2) == 2 * n + 1
    assert commutant_dim(1, 4) == 35
    assert commutant_dim(1, 5) == 126
    table = {(2, 2): 5, (2, 3): 35, (2, 4): 294, (3, 3): 84, (3, 4): 1386}
    for (n, k), v in table.items():
        assert commutant_dim(n, k) == v


def test_commutant_dim_product_formula():
    # prod_{1 <= i <= j <= k-1} (2n + i + j - 1) / (i + j - 1)
    for n in (1, 2, 3):
        for k in (2, 3, 4, 5):
            prod = Fraction(1)
            for i in range(1, k):
                for j in range(i, k):
                    prod *= Fraction(2 * n + i + j - 1, i + j - 1)
            assert prod.denominator == 1
            assert commutant_dim(n, k) == prod.numerator


def test_commutant_dim_sums_squared_multiplicities():
    for n in (1, 2):
        for k in (2, 3, 4, 5):
            total = sum(weyl_dim(w, k) ** 2 for w in enumerate_weights(n, k))
            assert total == commutant_dim(n, k)


def test_casimir_eigenvalue_examples():
    assert casimir_eigenvalue_exact((1, 1), CasimirSpec(4, 1, "quadratic")) == -4
    assert casimir_eigenvalue_exact((1, 1), CasimirSpec(4, 2, "pfaffian")) == 2
    assert casimir_eigenvalue_exact(1, CasimirSpec(3, 1, "quadratic")) == -2
    assert casimir_eigenvalue_exact(0, CasimirSpec(3, 1, "quadratic")) == 0
    assert quartic_eigenvalue_exact((0, 0)) == 0
    # (nu1 + 3/2)^2 (nu2 + 1/2)^2 - 9/16 at nu = (1, 0)
    assert quartic_eigenvalue_exact((1, 0)) == 1
    assert casimir_eigenvalue((1, 1), CasimirSpec(4, 1, "quadratic")) == pytest.approx(-4.0)


def test_sector_chain_eigenvalues_distinct():
    for n, k in [(1, 4), (2, 4), (2, 5)]:
        seen = {sector_chain_eigenvalues(w, k) for w in enumerate_weights(n, k)}
        assert len(seen) == len(enumerate_weights(n, k))


def test_quartic_invariant_commutes():
    q4 = quartic_invariant(1, 4)
    for a in range(1, 5):
        for b in range(a + 1, 5):
            lam = bridge_operator(a, b, 1, 4)
            comm = op_multiply(q4, lam) - op_multiply(lam, q4)
            assert hs_norm(comm) < 1e-9


def test_so_k_bracket_small():
    # [Lam_ab, Lam_cd] = 2(d_bc Lam_ad - d_ac Lam_bd - d_bd Lam_ac + d_ad Lam_bc)
    n, k = 1, 4

    def lam(a, b):
        if a == b:
            raise ValueError
        if a < b:
            return bridge_operator(a, b, n, k, exact=True)
        return -1 * bridge_operator(b, a, n, k, exact=True)

    pairs = [(a, b) for a in range(1, k + 1) for b in range(a + 1, k + 1)]
    for a, b in pairs:
        for c, d in pairs:
            comm = op_multiply(lam(a, b), lam(c, d)) - op_multiply(lam(c, d), lam(a, b))
            expected = None
            for coeff, (p, q) in [
                (2 if b == c else 0, (a, d)),
                (-2 if a == c else 0, (b, d)),
                (-2 if b == d else 0, (a, c)),
                (2 if a == d else 0, (b, c)),
            ]:
                if coeff and p != q:
                    term = coeff * lam(p, q)
                    expected = term if expected is None else expected + term
            diff = comm if expected is None else comm - expected
            assert len(diff) == 0
