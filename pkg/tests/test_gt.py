"""Tests for sector projectors, GT pattern operators, and the commutant basis.

Two constructions live here.  The chain family (sector_projector,
gt_projector, transition_operator) refines by the graded weight tower and
commutes with the rotation component only.  The orthonormal basis from
gt_basis is reflection-adapted and commutes with the full group.
"""

import numpy as np
import pytest

from mgc.bridge import (
    CasimirSpec,
    bridge_operator,
    casimir,
    casimir_eigenvalue,
    commutant_dim,
    enumerate_weights,
    gt_patterns,
    quartic_invariant,
    sector_chain_eigenvalues,
    weyl_dim,
)
from mgc.dense import CapacityError, commutator_residual, reflection_rotation, to_dense
from mgc.gt import (
    TransitionError,
    gt_basis,
    gt_basis_to_json,
    gt_projector,
    sector_projector,
    transition_operator,
)
from mgc.strings import (
    hs_inner,
    hs_norm,
    identity_operator,
    op_adjoint,
    op_multiply,
    op_trace,
)

from conftest import cached_basis, orthogonal_pair, random_operator

CHAIN_GRID = [(1, 2), (1, 3), (1, 4), (2, 2), (2, 3)]


def _sectors(n, k):
    return {w: sector_projector(w, n, k) for w in enumerate_weights(n, k)}


def test_sector_projector_k2_spectral():
    projs = _sectors(1, 2)
    lam = bridge_operator(1, 2, 1, 2)
    ilam = 1j * lam
    traces = {}
    for w, p in projs.items():
        # i Lambda_12 acts as the scalar 2w on each sector
        diff = op_multiply(ilam, p) - 2 * w * p
        assert hs_norm(diff) < 1e-10
        traces[w] = complex(op_trace(p)).real
    assert traces == pytest.approx({-1: 1.0, 0: 2.0, 1: 1.0})


def test_sector_projector_exact_matches_float():
    from mgc.strings import op_to_float

    for w in (-1, 0, 1):
        pf = sector_projector(w, 1, 2)
        pe = sector_projector(w, 1, 2, exact=True)
        assert hs_norm(pf - op_to_float(pe)) < 1e-10


def test_sector_projector_k3_casimir():
    quad = casimir(CasimirSpec(3, 1, "quadratic"), 1, 3)
    for nu in enumerate_weights(1, 3):
        p = sector_projector(nu, 1, 3)
        diff = op_multiply(quad, p) - (-nu * (nu + 1)) * p
        assert hs_norm(diff) < 1e-9


def test_sector_projectors_resolve_identity():
    for n, k in CHAIN_GRID:
        projs = _sectors(n, k)
        total = None
        for p in projs.values():
            total = p if total is None else total + p
        assert hs_norm(total - identity_operator(n, k)) < 1e-8
        for w, p in projs.items():
            assert hs_norm(op_multiply(p, p) - p) < 1e-8
        ws = list(projs)
        for i in range(len(ws)):
            for j in range(i + 1, len(ws)):
                assert hs_norm(op_multiply(projs[ws[i]], projs[ws[j]])) < 1e-8


def test_sector_trace_bookkeeping():
    for n, k in CHAIN_GRID:
        total = 0
        dim_total = 0
        for w in enumerate_weights(n, k):
            tr = complex(op_trace(sector_projector(w, n, k))).real
            tr_int = round(tr)
            assert abs(tr - tr_int) < 1e-8
            d = weyl_dim(w, k)
            # trace = (pattern count) x (line multiplicity)
            assert tr_int % d == 0
            total += tr_int
            dim_total += d * d
        assert total == 2 ** (n * k)
        assert dim_total == commutant_dim(n, k)


def test_gt_projector_refines_sector():
    p_nu = sector_projector(1, 1, 3)
    parts = [gt_projector(1, (m,), 1, 3) for m in (-1, 0, 1)]
    total = parts[0] + parts[1] + parts[2]
    assert hs_norm(total - p_nu) < 1e-8
    for i, a in enumerate(parts):
        assert hs_norm(op_multiply(a, a) - a) < 1e-8
        for b in parts[i + 1:]:
            assert hs_norm(op_multiply(a, b)) < 1e-8


def test_gt_projector_k4_patterns():
    pats = gt_patterns((1, 0), 4)
    assert len(pats) == 4
    projs = [gt_projector((1, 0), p, 1, 4) for p in pats]
    total = None
    for p in projs:
        assert hs_norm(op_multiply(p, p) - p) < 1e-8
        total = p if total is None else total + p
    for i in range(len(projs)):
        for j in range(i + 1, len(projs)):
            assert hs_norm(op_multiply(projs[i], projs[j])) < 1e-8
    assert hs_norm(total - sector_projector((1, 0), 1, 4)) < 1e-8


def test_casimir_resolution_on_patterns():
    # every chain Casimir is scalar on every pattern projector
    for n, k in [(1, 3), (1, 4), (2, 3)]:
        specs = [CasimirSpec(m, 1, "quadratic") for m in range(2, k + 1)]
        if k >= 4:
            specs.append(CasimirSpec(4, 2, "pfaffian"))
        ops = {s: casimir(s, n, k) for s in specs}
        for w in enumerate_weights(n, k):
            for pat in gt_patterns(w, k):
                proj = gt_projector(w, pat, n, k)
                for spec, cop in ops.items():
                    eig = _pattern_eigenvalue(spec, w, pat, k)
                    assert hs_norm(op_multiply(cop, proj) - eig * proj) < 1e-8


def _pattern_eigenvalue(spec, w, pat, k):
    # subchain Casimirs read their sector label from the pattern rows,
    # ordered top-down: pat[0] is the level-(k-1) label, pat[-1] the m label
    if spec.level == k:
        return casimir_eigenvalue(w, spec)
    label = pat[k - 1 - spec.level]
    if spec.level == 2:
        return float(-(label * label))
    return casimir_eigenvalue(label, spec)


def test_transition_operator_example():
    el = transition_operator(1, (1,), (0,), 1, 3)
    x = el.operator
    assert abs(hs_inner(x, x) - 1.0) < 1e-9
    p_src = gt_projector(1, (1,), 1, 3)
    p_tgt = gt_projector(1, (0,), 1, 3)
    # pure block mapping from the target line onto the source line
    sandwiched = op_multiply(p_src, op_multiply(x, p_tgt))
    assert hs_norm(sandwiched - x) < 1e-8
    # x^dag x is the target projector scaled by its line multiplicity
    xtx = op_multiply(op_adjoint(x), x)
    assert hs_norm(xtx - 0.5 * p_tgt) < 1e-8


def test_transition_matches_normalized_ladder():
    # raising ladder (Lambda_23 + i Lambda_13)/2 between m=0 and m=1 lines;
    # per-line normalization sqrt(0! 1! / (1! 2!)) = 1/sqrt(2)
    x = transition_operator(1, (1,), (0,), 1, 3).operator
    l13 = bridge_operator(1, 3, 1, 3)
    l23 = bridge_operator(2, 3, 1, 3)
    mplus = 0.5 * (l23 + 1j * l13)
    sw = op_multiply(gt_projector(1, (1,), 1, 3), op_multiply(mplus, gt_projector(1, (0,), 1, 3)))
    norm_sw = hs_norm(sw)
    assert norm_sw**2 == pytest.approx(4.0, abs=1e-8)
    overlap = abs(complex(hs_inner(x, sw)))
    assert overlap == pytest.approx(norm_sw * hs_norm(x), abs=1e-8)


def test_transition_diagonal_is_normalized_projector():
    for m in (-1, 0, 1):
        el = transition_operator(1, (m,), (m,), 1, 3)
        proj = gt_projector(1, (m,), 1, 3)
        tr = complex(op_trace(proj)).real
        assert hs_norm(el.operator - proj * (1.0 / np.sqrt(tr))) < 1e-8


def test_transition_orthonormality_random_pairs():
    rng = np.random.default_rng(31)
    triples = []
    weights = enumerate_weights(1, 4)
    while len(triples) < 8:
        w = weights[rng.integers(0, len(weights))]
        pats = gt_patterns(w, 4)
        s = pats[rng.integers(0, len(pats))]
        t = pats[rng.integers(0, len(pats))]
        if (w, s, t) not in triples:
            triples.append((w, s, t))
    ops = [transition_operator(w, s, t, 1, 4).operator for w, s, t in triples]
    for i, a in enumerate(ops):
        for j, b in enumerate(ops):
            got = complex(hs_inner(a, b))
            expected = 1.0 if i == j else 0.0
            assert abs(got - expected) < 1e-7


def test_transition_validates_patterns():
    with pytest.raises(ValueError):
        transition_operator(1, (5,), (0,), 1, 3)
    with pytest.raises(ValueError):
        transition_operator(1, (1,), (2, 0), 1, 3)


def test_gt_basis_counts():
    assert len(cached_basis(1, 2)) == 3
    assert len(cached_basis(1, 3)) == 10
    assert len(cached_basis(1, 4)) == 35
    assert len(cached_basis(2, 2)) == 5


def test_gt_basis_k_gate():
    with pytest.raises(ValueError):
        gt_basis(1, 6)
    with pytest.raises(CapacityError):
        gt_basis(2, 5)


def test_gt_basis_gram_identity():
    els = cached_basis(1, 4)
    ops = [e.operator for e in els]
    for i, a in enumerate(ops):
        for j, b in enumerate(ops):
            got = complex(hs_inner(a, b))
            expected = 1.0 if i == j else 0.0
            assert abs(got - expected) < 1e-7


def test_gt_basis_commutes_with_both_components():
    for n, k in [(1, 2), (1, 3), (2, 2)]:
        (q_rot, _), (q_ref, _) = orthogonal_pair(n, 7)
        for el in cached_basis(n, k):
            assert commutator_residual(el.operator, q_rot, n, k) < 1e-8
            assert commutator_residual(el.operator, q_ref, n, k) < 1e-8


def test_gt_basis_diagonal_projectors_resolve_identity():
    for n, k in [(1, 2), (1, 3), (2, 2)]:
        total = None
        for el in cached_basis(n, k):
            if el.source_pattern != el.target_pattern:
                assert abs(complex(op_trace(el.operator))) < 1e-8
                continue
            proj = el.operator * complex(op_trace(el.operator))
            assert hs_norm(op_multiply(proj, proj) - proj) < 1e-8
            total = proj if total is None else total + proj
        assert hs_norm(total - identity_operator(n, k)) < 1e-8


def test_gt_basis_weight_zero_contains_scaled_identity():
    # the identity is a commutant element; it must be reachable in the span
    els = cached_basis(1, 2)
    ident = identity_operator(1, 2)
    coeffs = [complex(hs_inner(e.operator, ident)) for e in els]
    recon = None
    for e, c in zip(els, coeffs):
        recon = e.operator * c if recon is None else recon + e.operator * c
    assert hs_norm(recon - ident) < 1e-8


def test_gt_basis_projection_matches_pairing_projection():
    # the span equals the pairing span, so both orthogonal projections agree
    from mgc.pairing import InfeasibleConfigError, admissible_configs, pairing_operator
    from mgc.cli import _pairing_weights

    n, k = 1, 3
    pair_ops = []
    for r in _pairing_weights(n, k):
        for cfg in admissible_configs(r, k):
            try:
                pair_ops.append(pairing_operator(cfg, n))
            except InfeasibleConfigError:
                continue
    keys = sorted({key for op in pair_ops for key in op.terms})
    index = {key: i for i, key in enumerate(keys)}

    def vec(op):
        v = np.zeros(len(keys), dtype=complex)
        for key, c in op.terms.items():
            v[index[key]] = complex(c)
        return v

    pmat = np.stack([vec(op) for op in pair_ops])
    u, s, _ = np.linalg.svd(pmat.conj().T, full_matrices=False)
    q = u[:, s > 1e-9]

    basis_ops = [e.operator for e in cached_basis(n, k)]
    for seed in range(50):
        w = random_operator(n, k, seed=seed + 200, terms=5)
        wv = np.zeros(len(keys), dtype=complex)
        for key, c in w.terms.items():
            if key in index:
                wv[index[key]] = complex(c)
        proj_pair = q @ (q.conj().T @ wv)
        gt_img = None
        for b in basis_ops:
            # basis elements are hs-orthonormal, so the projection weight
            # is the plain inner product
            c = complex(hs_inner(b, w))
            term = b * c
            gt_img = term if gt_img is None else gt_img + term
        gt_v = np.zeros(len(keys), dtype=complex)
        leftovers = 0.0
        for key, c in gt_img.terms.items():
            if key in index:
                gt_v[index[key]] = complex(c)
            else:
                leftovers += abs(c)
        assert leftovers < 1e-9
        assert np.linalg.norm(gt_v - proj_pair) < 1e-7


def test_gt_basis_json_export():
    data = gt_basis_to_json(cached_basis(1, 2))
    assert len(data) == 3
    for entry in data:
        assert {"weight", "source_pattern", "target_pattern", "operator"} <= set(entry)
        assert {"n", "k", "terms"} <= set(entry["operator"])


def test_sector_chain_eigenvalues_label_lines():
    # chain eigenvalue tuples separate all sectors used by the line tables
    for n, k in [(1, 4), (2, 4)]:
        labels = [sector_chain_eigenvalues(w, k) for w in enumerate_weights(n, k)]
        assert len(set(labels)) == len(labels)


def test_quartic_invariant_diagonal_on_sectors():
    q4 = quartic_invariant(1, 4)
    from mgc.bridge import quartic_eigenvalue_exact

    for w in enumerate_weights(1, 4):
        p = sector_projector(w, 1, 4)
        eig = float(quartic_eigenvalue_exact(w))
        assert hs_norm(op_multiply(q4, p) - eig * p) < 1e-8
