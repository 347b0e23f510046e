"""Dense matrix backend used as the ground-truth oracle.

Everything here works on explicit 2^{nk} x 2^{nk} arrays: Jordan-Wigner
representations of Majorana strings, Gaussian-unitary synthesis from
antisymmetric generators, Haar sampling on O(2n) with spin lifts, Monte
Carlo twirling, and commutator residuals.  Intended for verification at
small n only; every entry point is gated by a hard capacity cap.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, logm, schur

from .strings import OperatorExpansion, canonical_phase_exponent, mask_modes

DEFAULT_MAX_DENSE_DIM = 4096
_STACK_MAX_MODES = 4  # full string stacks only built for n <= 4

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


class CapacityError(RuntimeError):
    """Raised when a request exceeds the configured dense-size cap."""


def max_dense_dim() -> int:
    """Current dense-dimension cap; override with MGC_MAX_DENSE_DIM."""
    raw = os.environ.get("MGC_MAX_DENSE_DIM")
    if raw is None:
        return DEFAULT_MAX_DENSE_DIM
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"MGC_MAX_DENSE_DIM must be an integer, got {raw!r}") from exc
    if value < 2:
        raise ValueError("MGC_MAX_DENSE_DIM must be at least 2")
    return value


def ensure_dense_capacity(n: int, k: int) -> int:
    """Return dim = 2^{nk} or raise CapacityError if it exceeds the cap."""
    dim = 1 << (n * k)
    limit = max_dense_dim()
    if dim > limit:
        raise CapacityError(
            f"dense backend capped at dimension {limit}; "
            f"requested 2^({n}*{k}) = {dim}"
        )
    return dim


def _kron_chain(factors) -> np.ndarray:
    out = np.array([[1.0 + 0.0j]])
    for f in factors:
        out = np.kron(out, f)
    return out


def kron_power(mat: np.ndarray, k: int) -> np.ndarray:
    return _kron_chain([mat] * k)


def jw_gamma(mu: int, n: int) -> np.ndarray:
    """Jordan-Wigner Majorana mode operator as a dense 2^n x 2^n matrix.

    Mode 2j-1 maps to Z^(j-1) X_j and mode 2j to Z^(j-1) Y_j, with qubit 1
    leftmost in the tensor order.

    Parameters
    ----------
    mu : int
        Mode index, 1-based, in 1..2n.
    n : int
        Number of qubits.
    """
    if not 1 <= mu <= 2 * n:
        raise ValueError(f"mode index {mu} out of range for n={n}")
    j = (mu + 1) // 2  # qubit the mode lives on
    tail = _X if mu % 2 == 1 else _Y
    factors = [_Z] * (j - 1) + [tail] + [_I2] * (n - j)
    return _kron_chain(factors)


_single_cache: dict[tuple[int, int], np.ndarray] = {}
_stack_cache: dict[int, np.ndarray] = {}


def gamma_string(mask: int, n: int) -> np.ndarray:
    """Dense matrix of the Hermitian Majorana string with the given mode mask."""
    key = (n, mask)
    cached = _single_cache.get(key)
    if cached is not None:
        return cached
    modes = mask_modes(mask)
    mat = np.eye(1 << n, dtype=complex)
    for mu in modes:
        mat = mat @ jw_gamma(mu, n)
    mat = (1.0j ** canonical_phase_exponent(len(modes))) * mat
    mat.setflags(write=False)
    _single_cache[key] = mat
    return mat


def string_stack(n: int) -> np.ndarray:
    """All 4^n string matrices stacked as shape (4^n, 2^n, 2^n)."""
    if n > _STACK_MAX_MODES:
        raise CapacityError(f"string stack limited to n <= {_STACK_MAX_MODES}")
    cached = _stack_cache.get(n)
    if cached is not None:
        return cached
    dim = 1 << n
    stack = np.empty((1 << (2 * n), dim, dim), dtype=complex)
    for mask in range(1 << (2 * n)):
        stack[mask] = gamma_string(mask, n)
    stack.setflags(write=False)
    _stack_cache[n] = stack
    return stack


def to_dense(op: OperatorExpansion) -> np.ndarray:
    """Expand an operator into its dense matrix on (C^{2^n})^{x k}."""
    dim = ensure_dense_capacity(op.n, op.k)
    nmasks = 1 << (2 * op.n)
    if len(op.terms) > nmasks and op.n <= _STACK_MAX_MODES:
        return _to_dense_contracted(op, dim)
    out = np.zeros((dim, dim), dtype=complex)
    for masks, coeff in op.terms.items():
        factor = _kron_chain(gamma_string(m, op.n) for m in masks)
        out += complex(coeff) * factor
    return out


def _to_dense_contracted(op: OperatorExpansion, dim: int) -> np.ndarray:
    # contract the coefficient tensor against the string stack one replica
    # at a time; much faster than per-term kron sums for term-rich operators
    stack = string_stack(op.n)
    nmasks = stack.shape[0]
    coeffs = np.zeros((nmasks,) * op.k, dtype=complex)
    for masks, coeff in op.terms.items():
        coeffs[masks] = complex(coeff)
    tensor = coeffs
    for _ in range(op.k):
        tensor = np.tensordot(tensor, stack, axes=([0], [0]))
    # axes now (r1, c1, ..., rk, ck); interleave to (r..., c...)
    perm = tuple(range(0, 2 * op.k, 2)) + tuple(range(1, 2 * op.k, 2))
    return tensor.transpose(perm).reshape(dim, dim)


def from_dense(mat: np.ndarray, n: int, k: int, tol: float = 1e-10) -> OperatorExpansion:
    """Recover the string expansion of a dense matrix.

    Contracts the matrix against the full string stack one replica at a
    time; coefficients with magnitude below tol are dropped.
    """
    dim = ensure_dense_capacity(n, k)
    if mat.shape != (dim, dim):
        raise ValueError(f"expected shape {(dim, dim)}, got {mat.shape}")
    stack = string_stack(n)
    d = 1 << n
    # T[j1..jk, i1..ik] = mat[(j..),(i..)]; trace against strings contracts
    # stack axis i with T axis k and axis j with T axis (step-1).
    tensor = np.asarray(mat, dtype=complex).reshape((d,) * (2 * k))
    for step in range(1, k + 1):
        tensor = np.tensordot(stack, tensor, axes=([1, 2], [k, step - 1]))
    coeffs = tensor.transpose(tuple(reversed(range(k)))) / dim
    terms = {}
    for idx in np.argwhere(np.abs(coeffs) > tol):
        masks = tuple(int(v) for v in idx)
        terms[masks] = complex(coeffs[tuple(idx)])
    return OperatorExpansion(n, k, terms)


@dataclass(frozen=True)
class GaussianGenerator:
    """Real antisymmetric 2n x 2n generator of a rotation Q = exp(K)."""

    kmat: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.kmat, dtype=float)
        if k.ndim != 2 or k.shape[0] != k.shape[1] or k.shape[0] % 2 != 0:
            raise ValueError("generator must be a square even-dimensional matrix")
        if np.max(np.abs(k + k.T)) > 1e-12:
            raise ValueError("generator must be antisymmetric to 1e-12")
        object.__setattr__(self, "kmat", k)

    @property
    def n(self) -> int:
        return self.kmat.shape[0] // 2


def gaussian_unitary(gen: GaussianGenerator | np.ndarray, n: int | None = None) -> np.ndarray:
    """Spin lift exp(sum_{mu<nu} K_{mu nu} gamma_mu gamma_nu / 2) of a rotation.

    Conjugation satisfies U gamma_mu U^dag = sum_nu Q_{nu mu} gamma_nu with
    Q = exp(K).

    Parameters
    ----------
    gen : GaussianGenerator or array
        Antisymmetric generator K; arrays are validated on the way in.
    n : int, optional
        Qubit count; inferred from the generator when omitted.
    """
    if not isinstance(gen, GaussianGenerator):
        gen = GaussianGenerator(np.asarray(gen))
    if n is None:
        n = gen.n
    elif n != gen.n:
        raise ValueError("generator size does not match n")
    ensure_dense_capacity(n, 1)
    dim = 1 << n
    ham = np.zeros((dim, dim), dtype=complex)
    kmat = gen.kmat
    for mu in range(1, 2 * n + 1):
        for nu in range(mu + 1, 2 * n + 1):
            coeff = kmat[mu - 1, nu - 1]
            if coeff != 0.0:
                # antisymmetry folds the (nu, mu) term into a factor 2
                ham += 0.5 * coeff * (jw_gamma(mu, n) @ jw_gamma(nu, n))
    return expm(ham)


def reflection_unitary(n: int) -> np.ndarray:
    """Pauli X on the last qubit; induces diag(1, ..., 1, -1) on modes."""
    ensure_dense_capacity(n, 1)
    return _kron_chain([_I2] * (n - 1) + [_X])


def reflection_rotation(n: int) -> np.ndarray:
    q = np.eye(2 * n)
    q[-1, -1] = -1.0
    return q


def induced_rotation(unitary: np.ndarray, n: int) -> np.ndarray:
    """Extract the 2n x 2n orthogonal action of a Gaussian unitary."""
    dim = 1 << n
    q = np.empty((2 * n, 2 * n))
    for mu in range(1, 2 * n + 1):
        conj = unitary @ jw_gamma(mu, n) @ unitary.conj().T
        for nu in range(1, 2 * n + 1):
            val = np.trace(jw_gamma(nu, n) @ conj) / dim
            q[nu - 1, mu - 1] = val.real
    return q


def _antisymmetric_log(special: np.ndarray) -> np.ndarray:
    """Real antisymmetric K with exp(K) = special, for special-orthogonal input.

    The principal matrix logarithm covers rotation angles away from pi; the
    real Schur form handles the branch cut, where -1 eigenvalues pair up into
    half-turn planes (signed permutations land there routinely).
    """
    kraw = np.real(logm(special))
    kmat = 0.5 * (kraw - kraw.T)
    if np.max(np.abs(expm(kmat) - special)) <= 1e-8:
        return kmat
    tmat, zmat = schur(special, output="real")
    d = special.shape[0]
    ktri = np.zeros((d, d))
    minus = []
    i = 0
    while i < d:
        if i + 1 < d and abs(tmat[i + 1, i]) > 1e-8:
            theta = np.arctan2(tmat[i, i + 1], tmat[i, i])
            ktri[i, i + 1] = theta
            ktri[i + 1, i] = -theta
            i += 2
        else:
            if tmat[i, i] < 0:
                minus.append(i)
            i += 1
    if len(minus) % 2:
        raise ValueError("odd count of -1 eigenvalues; input is not special orthogonal")
    for a, b in zip(minus[0::2], minus[1::2]):
        ktri[a, b] = np.pi
        ktri[b, a] = -np.pi
    kmat = zmat @ ktri @ zmat.T
    kmat = 0.5 * (kmat - kmat.T)
    if np.max(np.abs(expm(kmat) - special)) > 1e-8:
        raise ValueError("could not construct an antisymmetric logarithm")
    return kmat


def lift_orthogonal(qmat: np.ndarray, n: int) -> tuple[np.ndarray, GaussianGenerator, bool]:
    """Spin lift of an arbitrary element of O(2n).

    Returns (U, generator, reflected) with U gamma_mu U^dag =
    sum_nu Q_{nu mu} gamma_nu.  Determinant -1 elements are lifted by
    composing the special part with the reflection unitary.

    Raises
    ------
    ValueError
        If qmat is not orthogonal to 1e-10.
    """
    q = np.asarray(qmat, dtype=float)
    if q.shape != (2 * n, 2 * n):
        raise ValueError(f"expected a {2 * n} x {2 * n} matrix")
    if np.max(np.abs(q.T @ q - np.eye(2 * n))) > 1e-10:
        raise ValueError("matrix is not orthogonal to 1e-10")
    det = np.linalg.det(q)
    reflected = det < 0
    special = q @ reflection_rotation(n) if reflected else q
    gen = GaussianGenerator(_antisymmetric_log(special))
    unitary = gaussian_unitary(gen, n)
    if reflected:
        unitary = unitary @ reflection_unitary(n)
    return unitary, gen, reflected


@dataclass(frozen=True)
class OrthogonalDraw:
    """One Haar sample from O(2n) together with its spin-lift data."""

    qmat: np.ndarray
    generator: GaussianGenerator | None
    reflected: bool
    unitary: np.ndarray | None


def _haar_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.standard_normal((2 * n, 2 * n))
    q, r = np.linalg.qr(g)
    # sign fix makes the QR factorization Haar distributed
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def random_orthogonal(n: int, seed: int, lift: bool = True) -> OrthogonalDraw:
    """Draw a Haar-random element of O(2n), deterministically in the seed.

    With lift=True (default) the spin representation and its generator are
    attached; lift=False skips the matrix logarithm when only the
    orthogonal matrix is needed.
    """
    rng = np.random.default_rng(seed)
    q = _haar_orthogonal(rng, n)
    if not lift:
        return OrthogonalDraw(q, None, bool(np.linalg.det(q) < 0), None)
    unitary, gen, reflected = lift_orthogonal(q, n)
    return OrthogonalDraw(q, gen, reflected, unitary)


def mc_twirl(
    wmat: np.ndarray, n: int, k: int, samples: int, seed: int
) -> np.ndarray:
    """Monte Carlo estimate of the group twirl of a dense operator.

    Averages U^{x k} W U^{dag x k} over Haar draws, with the sample
    budget split evenly between the two components of O(2n).  Standard
    error decays as 1/sqrt(samples).
    """
    dim = ensure_dense_capacity(n, k)
    wmat = np.asarray(wmat, dtype=complex)
    if wmat.shape != (dim, dim):
        raise ValueError(f"expected shape {(dim, dim)}, got {wmat.shape}")
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    qr = reflection_rotation(n)
    acc = np.zeros((dim, dim), dtype=complex)
    for i in range(samples):
        q = _haar_orthogonal(rng, n)
        want_reflected = i % 2 == 1
        if (np.linalg.det(q) < 0) != want_reflected:
            q = q @ qr
        unitary, _, _ = lift_orthogonal(q, n)
        uk = kron_power(unitary, k)
        acc += uk @ wmat @ uk.conj().T
    return acc / samples


def commutator_residual(
    op: OperatorExpansion | np.ndarray, qmat: np.ndarray, n: int, k: int
) -> float:
    """Frobenius norm of the commutator with the lifted k-replica unitary."""
    dense = to_dense(op) if isinstance(op, OperatorExpansion) else np.asarray(op, dtype=complex)
    dim = ensure_dense_capacity(n, k)
    if dense.shape != (dim, dim):
        raise ValueError(f"expected shape {(dim, dim)}, got {dense.shape}")
    unitary, _, _ = lift_orthogonal(qmat, n)
    uk = kron_power(unitary, k)
    return float(np.linalg.norm(dense @ uk - uk @ dense))


def vacuum_vector(n: int) -> np.ndarray:
    vec = np.zeros(1 << n, dtype=complex)
    vec[0] = 1.0
    return vec


def random_state_vector(n: int, seed: int) -> np.ndarray:
    """Haar-random pure state on n qubits, deterministic in the seed."""
    rng = np.random.default_rng(seed)
    vec = rng.standard_normal(1 << n) + 1.0j * rng.standard_normal(1 << n)
    return vec / np.linalg.norm(vec)


def dense_to_json(mat: np.ndarray) -> str:
    """Flat JSON export of a dense matrix, for debugging only."""
    arr = np.asarray(mat, dtype=complex)
    payload = {
        "dim": arr.shape[0],
        "re": [float(v) for v in arr.real.ravel()],
        "im": [float(v) for v in arr.imag.ravel()],
    }
    return json.dumps(payload)
