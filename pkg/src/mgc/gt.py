"""Sector projectors, Gelfand-Tsetlin refinements, and the commutant basis.

Two operator families live here.  The graded family (sector_projector,
gt_projector, transition_operator) diagonalizes the bridge-operator chain
and satisfies the exact Casimir eigenvalue relations sector by sector.  The
commutant family (gt_basis) is the orthonormal basis of the full twirl
commutant: its chain replaces the final ladder label by parity-dressed and
reflection-adapted resolvents, so every element commutes with both
components of the orthogonal group action.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.linalg import expm

from .bridge import (
    CasimirSpec,
    bridge_operator,
    casimir,
    enumerate_weights,
    gt_patterns,
    quartic_invariant,
    sector_chain_eigenvalues,
    weyl_dim,
    commutant_dim,
)
from .dense import CapacityError, ensure_dense_capacity, from_dense, to_dense
from .strings import OperatorExpansion, RationalComplex, identity_operator, op_multiply, parity_operator

__all__ = [
    "GTBasisElement",
    "sector_projector",
    "gt_projector",
    "transition_operator",
    "gt_basis",
    "gt_basis_to_json",
    "graded_line_table",
    "commutant_line_table",
    "TransitionError",
]


class TransitionError(RuntimeError):
    """Raised when no elementary path connects two GT patterns."""

    def __init__(self, message, path=None):
        super().__init__(message)
        self.path = list(path or [])


@dataclass(frozen=True)
class GTBasisElement:
    weight: object
    source_pattern: tuple
    target_pattern: tuple
    operator: OperatorExpansion


# ---------------------------------------------------------------------------
# dense chain infrastructure


def _snap_half(value: float) -> Fraction:
    snapped = Fraction(round(value * 2), 2)
    if abs(float(snapped) - value) > 1e-6:
        raise ArithmeticError(f"eigenvalue {value} does not snap to a half-integer")
    return snapped


def _refine(blocks, mat, herm=True):
    """Split each (V, labels) block by the eigenvalues of V^T M V."""
    out = []
    for V, labels in blocks:
        sub = V.conj().T @ mat @ V
        if herm:
            sub = (sub + sub.conj().T) / 2
        evals, evecs = np.linalg.eigh(sub)
        order = np.argsort(evals)
        evals, evecs = evals[order], evecs[:, order]
        start = 0
        for i in range(1, len(evals) + 1):
            if i == len(evals) or evals[i] - evals[i - 1] > 1e-5:
                val = _snap_half(float(np.mean(evals[start:i])))
                out.append((V @ evecs[:, start:i], labels + (val,)))
                start = i
    return out


def _dense_bridges(n, k):
    return {
        (a, b): to_dense(bridge_operator(a, b, n, k))
        for a, b in combinations(range(1, k + 1), 2)
    }


def _parity_slot_one(n, k):
    P = to_dense(parity_operator(n))
    return np.kron(P, np.eye(2 ** (n * (k - 1))))


@dataclass(frozen=True)
class _Line:
    weight: object
    pattern: tuple
    basis: np.ndarray  # orthonormal columns spanning the line subspace
    labels: tuple


@dataclass(frozen=True)
class _LineTable:
    n: int
    k: int
    lines: tuple
    bridges: dict

    def by_weight(self, w):
        return [line for line in self.lines if line.weight == w]

    def find(self, w, pattern):
        for line in self.lines:
            if line.weight == w and line.pattern == pattern:
                return line
        raise KeyError(f"no GT line for weight {w}, pattern {pattern}")


def _sector_stage(n, k, L):
    """Ordered dense sector-resolving operators, matching the exact tables."""
    if k == 2:
        return [1j * L[(1, 2)]]
    quad = lambda m: sum(L[(a, b)] @ L[(a, b)] for a, b in combinations(range(1, m + 1), 2)) / 4
    if k == 3:
        return [quad(3)]
    pf4 = (L[(1, 2)] @ L[(3, 4)] - L[(1, 3)] @ L[(2, 4)] + L[(1, 4)] @ L[(2, 3)]) / 4
    if k == 4:
        return [quad(4), pf4]
    if k == 5:
        return [quad(5), to_dense(quartic_invariant(n, k))]
    raise ValueError(f"k={k} not supported (k <= 5)")


def _subchain_stage(n, k, L):
    """Refinement below the sector level, graded form: down to i*Lambda_12/2."""
    quad = lambda m: sum(L[(a, b)] @ L[(a, b)] for a, b in combinations(range(1, m + 1), 2)) / 4
    stage = []
    if k >= 5:
        pf4 = (L[(1, 2)] @ L[(3, 4)] - L[(1, 3)] @ L[(2, 4)] + L[(1, 4)] @ L[(2, 3)]) / 4
        stage += [quad(4), pf4]
    if k >= 4:
        stage += [quad(3)]
    if k >= 3:
        stage += [1j * L[(1, 2)] / 2]
    return stage


def _weight_lookup(n, k):
    table = {}
    for w in enumerate_weights(n, k):
        table[sector_chain_eigenvalues(w, k)] = w
    return table


def _mu_lookup(n):
    """(quadratic4, pfaffian4) eigenvalues -> so(4) label, over mu1 <= n."""
    table = {}
    for mu1 in range(0, n + 1):
        for mu2 in range(-mu1, mu1 + 1):
            key = (Fraction(-(mu1 * (mu1 + 2) + mu2 * mu2)), Fraction(mu2 * (mu1 + 1)))
            table[key] = (mu1, mu2)
    return table


def _s_of(label: Fraction) -> int:
    # label = -s(s+1)
    s = int(round((-1 + (1 - 4 * float(label)) ** 0.5) / 2))
    if Fraction(-s * (s + 1)) != label:
        raise ArithmeticError(f"label {label} is not -s(s+1)")
    return s


def _decode_graded(labels, n, k, wl, ml):
    if k == 2:
        (v,) = labels
        return wl[(v,)], ()
    if k == 3:
        return wl[(labels[0],)], (int(labels[1]),)
    if k == 4:
        w = wl[(labels[0], labels[1])]
        return w, (_s_of(labels[2]), int(labels[3]))
    w = wl[(labels[0], labels[1])]
    mu = ml[(labels[2], labels[3])]
    return w, (mu[0], mu[1], _s_of(labels[4]), int(labels[5]))


def _build_lines(n, k, stages, decode):
    dim = 2 ** (n * k)
    blocks = [(np.eye(dim, dtype=complex), ())]
    for mat in stages:
        blocks = _refine(blocks, mat)
    lines = []
    for V, labels in blocks:
        w, pattern = decode(labels)
        lines.append(_Line(w, pattern, V, labels))
    return lines


def _check_lines(lines, n, k):
    seen = {}
    for line in lines:
        seen.setdefault(line.weight, []).append(line)
    assert sorted(seen) == sorted(enumerate_weights(n, k)), "missing weight sector"
    for w, ls in seen.items():
        pats = sorted(line.pattern for line in ls)
        assert pats == sorted(gt_patterns(w, k)), (w, pats)
        dims = {line.basis.shape[1] for line in ls}
        assert len(dims) == 1, f"inconsistent multiplicity in sector {w}"
    assert sum(l.basis.shape[1] for l in lines) == 2 ** (n * k)


@lru_cache(maxsize=None)
def graded_line_table(n: int, k: int) -> _LineTable:
    """Joint eigenlines of the graded chain, labelled (weight, pattern)."""
    ensure_dense_capacity(n, k)
    L = _dense_bridges(n, k)
    wl = _weight_lookup(n, k)
    ml = _mu_lookup(n) if k == 5 else None
    stages = _sector_stage(n, k, L) + _subchain_stage(n, k, L)
    lines = _build_lines(n, k, stages, lambda lab: _decode_graded(lab, n, k, wl, ml))
    _check_lines(lines, n, k)
    return _LineTable(n, k, tuple(lines), L)


# ---------------------------------------------------------------------------
# commutant chain: parity-dressed bottom resolution


def _decode_commutant(labels, n, k, wl, ml):
    """Label layout mirrors the graded chain with the ladder stages replaced
    by (B12/2, M3^2, rho(D)); the reflection-adapted pair gets m = +/-|m| by
    the rho(D) = +/-1 convention."""
    if k == 2:
        (b,) = labels
        return wl[(b,)], ()
    if k == 3:
        return wl[(labels[0],)], (int(labels[1]),)
    if k == 4:
        w = wl[(labels[0], labels[1])]
        s = _s_of(labels[2])
        m = _resolve_m(labels[3:])
        return w, (s, m)
    w = wl[(labels[0], labels[1])]
    mu = ml[(labels[2], labels[3])]
    s = _s_of(labels[4])
    m = _resolve_m(labels[5:])
    return w, (mu[0], mu[1], s, m)


def _resolve_m(tail):
    b, msq, rho = tail
    if b != 0:
        return int(b)
    mag = int(round(float(msq) ** 0.5))
    if Fraction(mag * mag) != msq:
        raise ArithmeticError(f"M3^2 label {msq} is not a perfect square")
    if mag == 0:
        return 0
    return mag if rho > 0 else -mag


@lru_cache(maxsize=None)
def commutant_line_table(n: int, k: int) -> _LineTable:
    """Joint eigenlines of the dressed chain; every line projector commutes
    with both components of the lifted orthogonal action."""
    ensure_dense_capacity(n, k)
    L = _dense_bridges(n, k)
    wl = _weight_lookup(n, k)
    ml = _mu_lookup(n) if k == 5 else None
    P1 = _parity_slot_one(n, k)
    quad = lambda m: sum(L[(a, b)] @ L[(a, b)] for a, b in combinations(range(1, m + 1), 2)) / 4
    if k == 2:
        # the dressed pairing alone resolves everything: eigenvalues 2r - 2n
        stages = [L[(1, 2)] @ P1]
    else:
        stages = list(_sector_stage(n, k, L))
        if k >= 5:
            pf4 = (L[(1, 2)] @ L[(3, 4)] - L[(1, 3)] @ L[(2, 4)] + L[(1, 4)] @ L[(2, 3)]) / 4
            stages += [quad(4), pf4]
        if k >= 4:
            stages += [quad(3)]
        stages += [L[(1, 2)] @ P1 / 2]
        if k >= 4:
            stages += [-L[(1, 2)] @ L[(1, 2)] / 4, expm(np.pi / 2 * L[(2, 4)])]
    lines = _build_lines(n, k, stages, lambda lab: _decode_commutant(lab, n, k, wl, ml))
    _check_lines(lines, n, k)
    return _LineTable(n, k, tuple(lines), L)


# ---------------------------------------------------------------------------
# graded projector family


def _lagrange_dense(w, n, k):
    table = graded_line_table(n, k)
    P = np.zeros((2 ** (n * k),) * 2, dtype=complex)
    for line in table.by_weight(w):
        P += line.basis @ line.basis.conj().T
    return P


def sector_projector(w, n: int, k: int, exact: bool = False) -> OperatorExpansion:
    """Central projector onto the weight-w isotypic sector.

    The float route sums the chain eigenline projectors; the exact route
    evaluates the nested Lagrange interpolation over distinct exact
    eigenvalues of the sector-resolving chain with rational arithmetic.
    """
    if k > 5:
        raise ValueError("sector projectors implemented for k <= 5 only")
    if w not in enumerate_weights(n, k):
        raise ValueError(f"weight {w} not admissible for n={n}")
    if not exact:
        return from_dense(_lagrange_dense(w, n, k), n, k)
    return _sector_projector_exact(w, n, k)


def _chain_ops_exact(n, k):
    if k == 2:
        op = bridge_operator(1, 2, n, k, exact=True) * RationalComplex(0, 1)
        return [op]
    if k == 3:
        return [casimir(CasimirSpec(3, 1, "quadratic"), n, k, exact=True)]
    if k == 4:
        return [
            casimir(CasimirSpec(4, 1, "quadratic"), n, k, exact=True),
            casimir(CasimirSpec(4, 2, "pfaffian"), n, k, exact=True),
        ]
    return [
        casimir(CasimirSpec(5, 1, "quadratic"), n, k, exact=True),
        quartic_invariant(n, k, exact=True),
    ]


def _sector_projector_exact(w, n, k):
    ops = _chain_ops_exact(n, k)
    targets = sector_chain_eigenvalues(w, k)
    weights = enumerate_weights(n, k)
    values = {v: sector_chain_eigenvalues(v, k) for v in weights}
    proj = identity_operator(n, k, exact=True)
    survivors = list(weights)
    for stage, op in enumerate(ops):
        mine = targets[stage]
        others = sorted({values[v][stage] for v in survivors if values[v][stage] != mine})
        for val in others:
            num = op_multiply(proj, op - identity_operator(n, k, exact=True) * RationalComplex(val))
            proj = num * (RationalComplex(1) / RationalComplex(mine - val))
            proj.prune(0.0)
        survivors = [v for v in survivors if values[v][stage] == mine]
    return proj


def gt_projector(w, pattern, n: int, k: int) -> OperatorExpansion:
    """One-dimensional-per-multiplicity projector onto a GT chain line."""
    if pattern not in gt_patterns(w, k):
        raise ValueError(f"pattern {pattern} not in the GT set of {w}")
    line = graded_line_table(n, k).find(w, pattern)
    return from_dense(line.basis @ line.basis.conj().T, n, k)


# ---------------------------------------------------------------------------
# transitions within a sector (graded ladders)


def _ladder_moves(n, k, L):
    moves = []
    if k >= 3:
        # m is the eigenvalue of i*Lambda_12/2, so with J1 = i*Lambda_23/2,
        # J2 = i*Lambda_13/2 the raising combination J1 + i J2 is
        # proportional to Lambda_23 + i*Lambda_13.
        moves.append(("M+", (L[(2, 3)] + 1j * L[(1, 3)]) / 2))
        moves.append(("M-", (L[(2, 3)] - 1j * L[(1, 3)]) / 2))
    if k >= 4:
        moves.append(("T+1", (L[(1, 4)] + 1j * L[(2, 4)]) / 2))
        moves.append(("T-1", (-L[(1, 4)] + 1j * L[(2, 4)]) / 2))
        moves.append(("T0", L[(3, 4)] / 2))
    if k >= 5:
        for a in range(1, 5):
            moves.append((f"Y{a}", L[(a, 5)]))
    for a, b in combinations(range(1, k + 1), 2):
        moves.append((f"L{a}{b}", L[(a, b)]))
    return moves


def _sandwich(target_line, move, source_line):
    return target_line.basis.conj().T @ move @ source_line.basis


def _full_rank(C, tol=1e-8):
    if min(C.shape) == 0 or np.linalg.norm(C) < 1e-9:
        return False
    s = np.linalg.svd(C, compute_uv=False)
    return s[-1] > tol * max(1.0, s[0])


def _greedy_path(w, source, target, k):
    """Pattern path target -> source stepping the highest differing label."""
    pats = set(gt_patterns(w, k))
    path = [target]
    cur = list(target)
    src = list(source)
    guard = 0
    while cur != src:
        guard += 1
        if guard > 200:
            return None
        for i in range(len(cur)):
            if cur[i] != src[i]:
                step = 1 if src[i] > cur[i] else -1
                nxt = cur.copy()
                nxt[i] += step
                if tuple(nxt) in pats:
                    cur = nxt
                    path.append(tuple(cur))
                    break
                return None
        else:
            break
    return path


def _compose_path(table, w, path, moves, cross_weight=False):
    """Multiply sandwiches along a pattern path; None if a link is zero."""
    lines = [table.find(w, p) for p in path]
    acc = np.eye(lines[0].basis.shape[1], dtype=complex)
    used = []
    for i in range(len(path) - 1):
        src, dst = lines[i], lines[i + 1]
        for name, G in moves:
            C = _sandwich(dst, G, src)
            if _full_rank(C):
                acc = C @ acc
                used.append(name)
                break
        else:
            return None, used
    return acc, used


def _phase_fix(op: OperatorExpansion) -> OperatorExpansion:
    for _, coeff in op.sorted_terms():
        c = complex(coeff)
        if abs(c) > 1e-12:
            return op * (abs(c) / c)
    return op


def transition_operator(w, source, target, n: int, k: int) -> GTBasisElement:
    """Unit-norm operator mapping the target GT line onto the source line."""
    for p in (source, target):
        if p not in gt_patterns(w, k):
            raise ValueError(f"pattern {p} not in the GT set of {w}")
    table = graded_line_table(n, k)
    if source == target:
        line = table.find(w, source)
        P = line.basis @ line.basis.conj().T
        op = from_dense(P / np.sqrt(P.trace().real), n, k)
        return GTBasisElement(w, source, target, _phase_fix(op))
    moves = _ladder_moves(n, k, table.bridges)
    attempted = []
    path = _greedy_path(w, source, target, k)
    if path is not None:
        acc, used = _compose_path(table, w, path, moves)
        attempted.append(path)
        if acc is not None:
            return _finalize_transition(table, w, source, target, path, acc, n, k)
    # breadth-first fallback over single-move pattern edges
    start, goal = target, source
    frontier = [(start, [start])]
    seen = {start}
    while frontier:
        nxt = []
        for node, path in frontier:
            for cand in gt_patterns(w, k):
                if cand in seen:
                    continue
                edge, _ = _compose_path(table, w, [node, cand], moves)
                if edge is None:
                    continue
                newpath = path + [cand]
                if cand == goal:
                    acc, _ = _compose_path(table, w, newpath, moves)
                    if acc is not None:
                        return _finalize_transition(table, w, source, target, newpath, acc, n, k)
                    attempted.append(newpath)
                else:
                    seen.add(cand)
                    nxt.append((cand, newpath))
        frontier = nxt
    raise TransitionError(
        f"no elementary path from {target} to {source} in sector {w}",
        path=attempted,
    )


def _finalize_transition(table, w, source, target, path, acc, n, k):
    src_line = table.find(w, source)
    tgt_line = table.find(w, target)
    X = src_line.basis @ acc @ tgt_line.basis.conj().T
    X /= np.linalg.norm(X)
    op = _phase_fix(from_dense(X, n, k))
    return GTBasisElement(w, source, target, op)


# ---------------------------------------------------------------------------
# commutant basis


def _commutant_moves(n, k, L, P1):
    """Twist-even elementary moves: undressed bridges on even index pairs,
    parity-dressed bridges on odd pairs, plus twist-even quadratics."""
    moves = []
    for a, b in combinations(range(1, k + 1), 2):
        if (a + b) % 2 == 0:
            moves.append((f"L{a}{b}", L[(a, b)]))
        else:
            moves.append((f"B{a}{b}", L[(a, b)] @ P1))
    pairs = list(combinations(range(1, k + 1), 2))
    for i, (a, b) in enumerate(pairs):
        for c, d in pairs[i + 1:]:
            if (a + b + c + d) % 2 == 0:
                moves.append((f"L{a}{b}L{c}{d}", L[(a, b)] @ L[(c, d)]))
    return moves


def gt_basis(n: int, k: int, k5_limit: int = 1) -> list:
    """Orthonormal commutant basis; commutant_dim(n, k) elements.

    Diagonal elements are the dressed-chain line projectors normalized by
    the square root of their trace; off-diagonal elements are partial
    isometries between lines of the same irreducible commutant block,
    discovered by breadth-first search over twist-even elementary moves.
    """
    if not (2 <= k <= 5):
        raise ValueError("gt_basis supports 2 <= k <= 5")
    if k == 5 and n > k5_limit:
        raise CapacityError(
            f"k=5 basis construction is gated to n <= {k5_limit}; "
            "raise k5_limit to override"
        )
    ensure_dense_capacity(n, k)
    table = commutant_line_table(n, k)
    P1 = _parity_slot_one(n, k)
    moves = _commutant_moves(n, k, table.bridges, P1)
    lines = list(table.lines)
    mult_maps, parent = _spanning_forest(lines, moves)
    blocks = _forest_blocks(lines, parent)
    elements = []
    for blk in blocks:
        for i in blk:
            for j in blk:
                li, lj = lines[i], lines[j]
                if i == j:
                    X = li.basis @ li.basis.conj().T
                else:
                    X = li.basis @ mult_maps[i] @ np.linalg.inv(mult_maps[j]) @ lj.basis.conj().T
                X /= np.linalg.norm(X)
                op = _phase_fix(from_dense(X, n, k))
                elements.append(GTBasisElement(li.weight, li.pattern, lj.pattern, op))
    expected = commutant_dim(n, k)
    if len(elements) != expected:
        raise RuntimeError(
            f"basis size {len(elements)} disagrees with commutant dimension {expected}"
        )
    return elements


def _spanning_forest(lines, moves):
    m = len(lines)
    parent = {}
    mult_maps = {}
    unseen = set(range(m))
    while unseen:
        root = min(unseen)
        unseen.discard(root)
        parent[root] = None
        mult_maps[root] = np.eye(lines[root].basis.shape[1])
        frontier = [root]
        while frontier:
            nxt = []
            for i in frontier:
                for j in sorted(unseen):
                    if lines[i].basis.shape[1] != lines[j].basis.shape[1]:
                        continue
                    for name, G in moves:
                        C = _sandwich(lines[j], G, lines[i])
                        if _full_rank(C):
                            parent[j] = (i, name)
                            mult_maps[j] = C @ mult_maps[i]
                            nxt.append(j)
                            unseen.discard(j)
                            break
            frontier = nxt
    return mult_maps, parent


def _forest_blocks(lines, parent):
    def root_of(i):
        while parent[i] is not None:
            i = parent[i][0]
        return i

    blocks = {}
    for i in range(len(lines)):
        blocks.setdefault(root_of(i), []).append(i)
    return [sorted(v) for v in blocks.values()]


def gt_basis_to_json(elements) -> list:
    from .strings import to_json_dict

    out = []
    for el in elements:
        out.append(
            {
                "weight": el.weight if isinstance(el.weight, int) else list(el.weight),
                "source_pattern": list(el.source_pattern),
                "target_pattern": list(el.target_pattern),
                "operator": to_json_dict(el.operator),
            }
        )
    return out
