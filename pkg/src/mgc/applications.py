"""Twirl channels, frame potentials, magic and non-Gaussianity diagnostics.

Everything here sits on top of the commutant machinery: the free-fermion twirl
projects onto the orthonormal replica basis, the replicated-vacuum projector is
assembled exactly by Lagrange interpolation in the quadratic Casimir, and the
scalar diagnostics (frame potentials, annealed stabilizer entropy, de Finetti
ratios, non-Gaussianity measures) come in closed-form, independent
Gamma-product, and Monte-Carlo variants so each value can be cross-checked.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, log2, prod
from typing import NamedTuple

import numpy as np

from .bridge import (
    CasimirSpec,
    bridge_operator,
    casimir,
    casimir_eigenvalue_exact,
    commutant_dim,
    enumerate_weights,
)
from .dense import (
    ensure_dense_capacity,
    gamma_string,
    jw_gamma,
    lift_orthogonal,
    random_orthogonal,
    to_dense,
    vacuum_vector,
)
from .gt import gt_basis
from .patterns import cm_dim
from .strings import (
    OperatorExpansion,
    RationalComplex,
    hs_inner,
    identity_operator,
    op_multiply,
    op_to_float,
    op_trace,
    single_string,
    vacuum_state_operator,
)

STATE_NORM_TOL = 1e-10
DIRECT_SRE_MODE_LIMIT = 2


class MCEstimate(NamedTuple):
    """Monte-Carlo result: point value, standard error, and sample count."""

    value: float
    stderr: float
    count: int


@dataclass(frozen=True)
class StateVector:
    """Unit-norm pure state on n qubits."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (2**self.n,):
            raise ValueError(f"expected {2**self.n} amplitudes, got {amp.shape}")
        if abs(np.linalg.norm(amp) - 1.0) > STATE_NORM_TOL:
            raise ValueError("state vector is not normalized")
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def vacuum(cls, n: int) -> "StateVector":
        return cls(n, vacuum_vector(n))

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "StateVector":
        amp = np.asarray(amplitudes, dtype=complex)
        n = int(round(log2(amp.size)))
        if 2**n != amp.size:
            raise ValueError("amplitude count must be a power of two")
        return cls(n, amp / np.linalg.norm(amp))


@dataclass(frozen=True)
class CovarianceMatrix:
    """Antisymmetric two-point Majorana correlation matrix of a pure state."""

    m: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.m, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] % 2:
            raise ValueError("covariance matrix must be square of even size")
        if np.max(np.abs(mat + mat.T)) > 1e-10:
            raise ValueError("covariance matrix must be antisymmetric")
        if np.linalg.norm(mat, 2) > 1 + 1e-10:
            raise ValueError("covariance singular values exceed 1")
        object.__setattr__(self, "m", mat)


# ---------------------------------------------------------------------------
# twirl channels


@lru_cache(maxsize=None)
def _gt_ops(n: int, k: int) -> tuple:
    return tuple(el.operator for el in gt_basis(n, k))


def matchgate_twirl(W: OperatorExpansion) -> OperatorExpansion:
    """Orthogonal projection of W onto the free-fermion replica commutant."""
    n, k = W.n, W.k
    if not 2 <= k <= 5:
        raise ValueError(f"twirl supports 2 <= k <= 5, got k={k}")
    if any(isinstance(c, RationalComplex) for c in W.terms.values()):
        W = op_to_float(W)
    acc = OperatorExpansion(n, k, {})
    for op in _gt_ops(n, k):
        overlap = hs_inner(op, W)
        if abs(overlap) > 0:
            acc = acc + op * overlap
    return acc


# ---------------------------------------------------------------------------
# replicated-vacuum projector


def vacuum_trace(n: int, k: int) -> Fraction:
    """Exact dimension of the replica-invariant vacuum sector."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be at least 1")
    value = Fraction(2)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            value *= Fraction(k + 2 * n - i - j, 2 * n - i - j)
    return value


def _trivial_weight(k: int):
    return 0 if k <= 3 else (0,) * (k // 2)


@lru_cache(maxsize=None)
def vacuum_projector(n: int, k: int) -> OperatorExpansion:
    """Exact projector onto the trivial replica sector.

    Lagrange interpolation in the quadratic Casimir alone: the trivial sector
    has eigenvalue 0 and every other allowed weight a negative one, so the
    product over the distinct nonzero eigenvalues isolates it.  Should a
    nonzero weight ever share eigenvalue 0, the staged sector chain takes over.
    """
    if not 2 <= k <= 5:
        raise ValueError(f"projector form supports 2 <= k <= 5, got k={k}")
    spec = CasimirSpec(k, 1, "quadratic")
    trivial = _trivial_weight(k)
    values = set()
    collision = False
    for w in enumerate_weights(n, k):
        if w == trivial:
            continue
        c = casimir_eigenvalue_exact(w, spec)
        if c == 0:
            collision = True
        values.add(c)
    if collision:
        # quadratic interpolation cannot separate the sectors; use the chain
        from .gt import sector_projector

        warnings.warn(
            "quadratic-Casimir eigenvalue collision with the trivial sector; "
            "falling back to the staged sector chain",
            RuntimeWarning,
        )
        return sector_projector(trivial, n, k, exact=True)
    c2 = casimir(spec, n, k, exact=True)
    acc = identity_operator(n, k, exact=True)
    for c in sorted(values):
        shifted = c2 + identity_operator(n, k, exact=True) * RationalComplex(-c)
        acc = op_multiply(acc, shifted) * RationalComplex(Fraction(-1, 1) / c)
    return acc


# ---------------------------------------------------------------------------
# frame potentials


def _gamma_exact(x: Fraction) -> tuple[Fraction, int]:
    """Gamma at a positive integer or half-integer, as (rational, sqrt(pi) power)."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("Gamma argument must be positive here")
    if x.denominator == 1:
        return Fraction(factorial(x.numerator - 1)), 0
    if x.denominator != 2:
        raise ValueError("only integer and half-integer arguments supported")
    m = (x.numerator - 1) // 2  # x = m + 1/2
    return Fraction(factorial(2 * m), 4**m * factorial(m)), 1


def _gamma_ratio_product(factors) -> Fraction:
    """Exact product of Gamma(a)/Gamma(b) pairs; sqrt(pi) powers must cancel."""
    value = Fraction(1)
    pi_power = 0
    for numerator_args, denominator_args in factors:
        for a in numerator_args:
            v, p = _gamma_exact(Fraction(a))
            value *= v
            pi_power += p
        for b in denominator_args:
            v, p = _gamma_exact(Fraction(b))
            value /= v
            pi_power -= p
    if pi_power != 0:
        raise ArithmeticError("sqrt(pi) powers failed to cancel")
    return value


def unitary_frame_potential(
    n: int, k: int, mode: str = "closed", samples: int = 10000, seed: int = 0
):
    """Moments of |Tr U|^{2k} over the Gaussian unitary ensemble.

    closed: the commutant dimension.  rmt: the independent eigenangle-integral
    Gamma product, exact.  mc: Haar sampling with standard error.
    """
    if mode == "closed":
        return commutant_dim(n, k)
    if mode == "rmt":
        factors = []
        for j in range(n):
            factors.append(
                (
                    (Fraction(2 * k + 1 + 2 * j, 2), Fraction(n + j)),
                    (Fraction(1 + 2 * j, 2), Fraction(n + k + j)),
                )
            )
        return Fraction(1, 2) * Fraction(2) ** (2 * k * n) * _gamma_ratio_product(factors)
    if mode == "mc":
        rng = np.random.default_rng(seed)
        draws = np.empty(samples)
        for i in range(samples):
            draw = random_orthogonal(n, int(rng.integers(0, 2**63)))
            draws[i] = abs(np.trace(draw.unitary)) ** (2 * k)
        return MCEstimate(
            float(np.mean(draws)),
            float(np.std(draws, ddof=1) / samples**0.5),
            samples,
        )
    raise ValueError(f"unknown mode {mode!r}")


def cm_state_frame_potential(n: int, k: int) -> Fraction:
    """Closed-form state frame potential of the signed-permutation orbit."""
    if k < 2:
        raise ValueError("need at least 2 replicas")
    half_patterns = 1 << (k - 2)
    return (
        Fraction(2) ** (n * (2 - k))
        / comb(2 * n, n)
        * comb(n + half_patterns - 1, half_patterns - 1)
    )


def state_frame_potential(
    n: int,
    k: int,
    ensemble: str = "matchgate",
    mode: str = "closed",
    samples: int = 10000,
    seed: int = 0,
):
    """Moments of |<psi|phi>|^{2k} over random state pairs from the ensemble.

    The matchgate orbit supports closed (inverse vacuum trace), selberg (exact
    eigenangle Gamma product), and mc modes; the signed-permutation orbit
    supports closed and mc.  Both ensembles carry the parity factor 1/2 from
    opposite-parity pairs having vanishing overlap.
    """
    if ensemble not in ("matchgate", "clifford_matchgate"):
        raise ValueError(f"unknown ensemble {ensemble!r}")
    if mode == "closed":
        if ensemble == "matchgate":
            return 1 / vacuum_trace(n, k)
        return cm_state_frame_potential(n, k)
    if mode == "selberg":
        if ensemble != "matchgate":
            raise ValueError("the eigenangle integral covers the matchgate orbit only")
        factors = []
        for j in range(n):
            factors.append(
                (
                    (Fraction(n + j, 2), Fraction(k + j + 1, 2)),
                    (Fraction(j + 1, 2), Fraction(n + k + j, 2)),
                )
            )
        return Fraction(1, 2) * _gamma_ratio_product(factors)
    if mode == "mc":
        rng = np.random.default_rng(seed)
        vac = vacuum_vector(n)
        draws = np.empty(samples)
        for i in range(samples):
            if ensemble == "matchgate":
                u1 = random_orthogonal(n, int(rng.integers(0, 2**63))).unitary
                u2 = random_orthogonal(n, int(rng.integers(0, 2**63))).unitary
            else:
                u1 = _random_signed_permutation_unitary(n, rng)
                u2 = _random_signed_permutation_unitary(n, rng)
            overlap = abs(np.vdot(u1 @ vac, u2 @ vac))
            draws[i] = overlap ** (2 * k)
        return MCEstimate(
            float(np.mean(draws)),
            float(np.std(draws, ddof=1) / samples**0.5),
            samples,
        )
    raise ValueError(f"unknown mode {mode!r}")


def _random_signed_permutation_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    perm = rng.permutation(2 * n)
    signs = rng.choice((-1.0, 1.0), size=2 * n)
    q = np.zeros((2 * n, 2 * n))
    for i in range(2 * n):
        q[perm[i], i] = signs[i]
    unitary, _, _ = lift_orthogonal(q, n)
    return unitary


def design_gap(n: int) -> Fraction:
    """Relative deviation of the two fourth-moment state frame potentials."""
    f_mg = 1 / vacuum_trace(n, 4)
    f_cm = cm_state_frame_potential(n, 4)
    return abs((f_cm - f_mg) / f_mg)


# ---------------------------------------------------------------------------
# annealed stabilizer entropy


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)


def q4_operator(n: int, exact: bool = True) -> OperatorExpansion:
    """Four-replica chirality product, expanded over all string masks.

    The mode-wise product of (1 + gamma_mu^{x4}) expands to the sum of
    gamma_S^{x4} over all masks S with coefficient exactly one, because the
    canonical phase enters at the fourth power.
    """
    ensure_dense_capacity(n, 4)
    one = RationalComplex(1) if exact else 1.0
    terms = {}
    for mask in range(1 << (2 * n)):
        terms[(mask,) * 4] = one
    return OperatorExpansion(n, 4, terms)


def sre_annealed(n: int, mode: str = "closed") -> float:
    """Ensemble-averaged second stabilizer Renyi entropy of Gaussian states.

    closed: -log2(2^n / C_{n+1}) from the Catalan singlet count.  direct:
    evaluate -log2[(1/2^n) Tr(twirl(vac^{x4}) Q4)] through the k=4 twirl
    machinery; gated to small systems.
    """
    if mode == "closed":
        return float(log2(catalan(n + 1)) - n)
    if mode == "direct":
        if n > DIRECT_SRE_MODE_LIMIT:
            raise ValueError(f"direct mode gated to n <= {DIRECT_SRE_MODE_LIMIT}")
        twirled = matchgate_twirl(vacuum_state_operator(n, 4))
        val = op_trace(op_multiply(twirled, q4_operator(n, exact=False)))
        return float(-log2(val.real / 2**n))
    raise ValueError(f"unknown mode {mode!r}")


def sre_annealed_asymptotic(n: int) -> float:
    """Large-n expansion of the annealed entropy through the 1/n term."""
    return float(
        n + 2 - 1.5 * log2(n) - 0.5 * log2(np.pi) - 21.0 / (8.0 * np.log(2) * n)
    )


# ---------------------------------------------------------------------------
# de Finetti bound


def definetti_bound(n: int, k: int, l: int) -> Fraction:
    """Trace-distance bound for l-copy reductions of Gaussian-symmetric states."""
    if not 1 <= l < k:
        raise ValueError("need 1 <= l < k")
    return Fraction(l * n * (n - 1), k + 1)


def definetti_ratio(n: int, k: int, l: int) -> Fraction:
    """Exact ratio of invariant-sector dimensions at k-l and k replicas."""
    if not 1 <= l < k:
        raise ValueError("need 1 <= l < k")
    value = Fraction(1)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            value *= 1 - Fraction(l, k + 2 * n - i - j)
    return value


# ---------------------------------------------------------------------------
# non-Gaussianity measures


def covariance_matrix(psi: StateVector) -> CovarianceMatrix:
    """Two-point Majorana correlations M_mn = -(i/2)<[gamma_m, gamma_n]>."""
    n = psi.n
    amp = psi.amplitudes
    images = [jw_gamma(mu, n) @ amp for mu in range(1, 2 * n + 1)]
    m = np.zeros((2 * n, 2 * n))
    for a in range(2 * n):
        for b in range(a + 1, 2 * n):
            # distinct gammas anticommute, so the commutator is twice the product
            value = -1j * np.vdot(images[a], images[b])
            m[a, b] = value.real
            m[b, a] = -value.real
    return CovarianceMatrix(m)


def faf(psi: StateVector, k: int) -> float:
    """Antiflatness of the covariance spectrum: n - Tr[(M^T M)^k]/2."""
    if k < 1:
        raise ValueError("k must be at least 1")
    m = covariance_matrix(psi).m
    return float(psi.n - 0.5 * np.trace(np.linalg.matrix_power(m.T @ m, k)))


def phi_w(W: OperatorExpansion, psi: StateVector) -> float:
    """Replica expectation Tr[W (|psi><psi|)^{xk}] of a commutant element.

    Factorizes over replicas into single-copy string expectations, so only
    2^n-dimensional objects are ever built.
    """
    if W.n != psi.n:
        raise ValueError("operator and state disagree on the mode count")
    amp = psi.amplitudes
    cache: dict = {}

    def expectation(mask: int) -> complex:
        got = cache.get(mask)
        if got is None:
            got = complex(np.vdot(amp, gamma_string(mask, psi.n) @ amp))
            cache[mask] = got
        return got

    total = 0j
    for masks, coeff in W.terms.items():
        total += complex(coeff) * prod(expectation(mask) for mask in masks)
    return float(total.real)


def phi0(psi: StateVector, k: int, method: str = "symbolic") -> float:
    """Overlap of the replicated state with the invariant vacuum sector."""
    if method == "symbolic":
        return phi_w(op_to_float(vacuum_projector(psi.n, k)), psi)
    if method == "dense":
        dim = ensure_dense_capacity(psi.n, k)
        c2 = to_dense(casimir(CasimirSpec(k, 1, "quadratic"), psi.n, k))
        eigenvalues, vectors = np.linalg.eigh((c2 + c2.conj().T) / 2)
        keep = np.abs(eigenvalues) < 0.5
        basis = vectors[:, keep]
        replicated = psi.amplitudes
        for _ in range(k - 1):
            replicated = np.kron(replicated, psi.amplitudes)
        return float(np.linalg.norm(basis.conj().T @ replicated) ** 2)
    raise ValueError(f"unknown method {method!r}")


def gaussianity_residual(psi: StateVector) -> float:
    """Norm of the two-copy pairing operator applied to psi x psi.

    Vanishes exactly on pure Gaussian states and is invariant under the
    Gaussian unitary orbit, so it is a direct Gaussianity test.
    """
    lam = to_dense(bridge_operator(1, 2, psi.n, 2))
    doubled = np.kron(psi.amplitudes, psi.amplitudes)
    return float(np.linalg.norm(lam @ doubled))


# ---------------------------------------------------------------------------
# shadow inverse channel


def shadow_inverse_channel(n: int) -> list:
    """Per-weight-sector eigenvalues of the inverse measurement channel."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return [(2 * l, Fraction(comb(2 * n, 2 * l), comb(n, l))) for l in range(n + 1)]


# ---------------------------------------------------------------------------
# reporting


def result_record(
    quantity: str,
    n: int,
    k: int | None,
    mode: str,
    value,
    stderr: float | None = None,
    formula_ref: str | None = None,
) -> dict:
    """Uniform JSON-ready record for any computed quantity."""
    record = {
        "quantity": quantity,
        "n": n,
        "k": k,
        "mode": mode,
        "value": float(value),
    }
    if stderr is not None:
        record["stderr"] = float(stderr)
    if formula_ref is not None:
        record["formula_ref"] = formula_ref
    return record
