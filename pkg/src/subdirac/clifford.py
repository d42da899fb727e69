"""Clifford algebra representations built from tensor products of Pauli matrices.

Generator indices are zero-based throughout: ``rep.generators[0]`` is the
image of the first basis vector ``e_1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.linalg

from .errors import (
    InvalidDimensionError,
    InvalidFormError,
    InvalidInclusionError,
    LiftAmbiguityError,
    SpinInvariantError,
    ValidationError,
)

SIGMA0 = np.array([[1, 0], [0, 1]], dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class PauliKit:
    sigma0: np.ndarray = field(default_factory=lambda: SIGMA0.copy())
    sigma1: np.ndarray = field(default_factory=lambda: SIGMA1.copy())
    sigma2: np.ndarray = field(default_factory=lambda: SIGMA2.copy())
    sigma3: np.ndarray = field(default_factory=lambda: SIGMA3.copy())

    def __getitem__(self, a: int) -> np.ndarray:
        return (self.sigma0, self.sigma1, self.sigma2, self.sigma3)[a]


PAULI = PauliKit()

# single-slot spinors: +1 eigenvectors of sigma_1, sigma_2, sigma_3, then the -1 ones
B1 = np.array([1, 1], dtype=complex) / np.sqrt(2)
B2 = np.array([1, 1j], dtype=complex) / np.sqrt(2)
B3 = np.array([1, 0], dtype=complex)
_ALPHABET = {
    "b1": B1,
    "b2": B2,
    "b3": B3,
    "-b1": np.array([1, -1], dtype=complex) / np.sqrt(2),
    "-b2": np.array([1, -1j], dtype=complex) / np.sqrt(2),
    "-b3": np.array([0, 1], dtype=complex),
}


def kron(*factors: np.ndarray) -> np.ndarray:
    return reduce(np.kron, factors, np.ones((1, 1), dtype=complex))


@dataclass(frozen=True)
class CliffordRep:
    """Irreducible complex representation of the Euclidean Clifford algebra.

    Attributes
    ----------
    n : int
        Dimension of the underlying vector space.
    spinor_dim : int
        ``2 ** (n // 2)``.
    generators : tuple of ndarray
        ``gamma(e_1), ..., gamma(e_n)``.
    odd_sign : int
        Scalar realizing the central generator when ``n`` is odd.
    """

    n: int
    spinor_dim: int
    generators: tuple
    odd_sign: int = 1

    def __getitem__(self, i: int) -> np.ndarray:
        return self.generators[i]

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.spinor_dim, dtype=complex)

    def gamma(self, vector) -> np.ndarray:
        """Image of a vector (or one-form) with components ``vector``."""
        v = np.asarray(vector)
        return np.tensordot(v, np.asarray(self.generators), axes=(0, 0))


def _even_pattern(m: int) -> list[np.ndarray]:
    """Generators for n = 2m, slot 0 being the leftmost tensor factor."""
    s0, s1, s2, s3 = SIGMA0, SIGMA1, SIGMA2, SIGMA3
    gens = [kron(*[s1] * m)]
    for j in range(1, m):
        left = [s1] * (m - j)
        right = [s0] * (j - 1)
        gens.append(kron(*left, s2, *right))
        gens.append(kron(*left, s3, *right))
    gens.append(kron(s2, *[s0] * (m - 1)))
    return gens


def build_clifford(n: int, odd_sign: int = 1) -> CliffordRep:
    """Build the fixed tensor-product representation for ``R^n``.

    For even ``n = 2m`` the generators are Pauli strings of length ``m``;
    for odd ``n = 2m + 1`` the first ``2m`` generators follow the even
    pattern (the first multiplied by ``odd_sign``) and the last one is
    ``sigma_3 (x) sigma_0 (x) ... (x) sigma_0``.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {n!r}")
    if odd_sign not in (1, -1):
        raise ValidationError("odd_sign must be +1 or -1")
    n = int(n)
    m = n // 2
    if n == 1:
        gens = [np.array([[odd_sign]], dtype=complex)]
    elif n % 2 == 0:
        gens = _even_pattern(m)
    else:
        gens = _even_pattern(m)
        gens[0] = odd_sign * gens[0]
        gens.append(kron(SIGMA3, *[SIGMA0] * (m - 1)))
    gens = tuple(g.copy() for g in gens)
    for g in gens:
        g.setflags(write=False)
    return CliffordRep(n=n, spinor_dim=2**m, generators=gens, odd_sign=odd_sign if n % 2 else 1)


def _permutation_sign(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def gamma_of_form(rep: CliffordRep, form) -> np.ndarray:
    """Map an exterior form to the Clifford algebra.

    ``form`` is an iterable of ``(multi_index, coefficient)`` pairs. A
    multi-index of distinct generator indices ``(i_1, ..., i_p)`` maps to
    the product ``gamma_{i_1} ... gamma_{i_p}`` (its antisymmetrization, as
    the factors anticommute); unsorted indices pick up the permutation sign.
    The empty multi-index is the identity.
    """
    out = np.zeros((rep.spinor_dim, rep.spinor_dim), dtype=complex)
    for idx, coeff in form:
        idx = tuple(int(i) for i in idx)
        if len(set(idx)) != len(idx):
            raise InvalidFormError(f"repeated index in multi-index {idx}")
        if any(i < 0 or i >= rep.n for i in idx):
            raise InvalidFormError(f"multi-index {idx} out of range for n={rep.n}")
        sign = _permutation_sign(idx)
        term = rep.identity
        for i in sorted(idx):
            term = term @ rep.generators[i]
        out += sign * coeff * term
    return out


def phi_map(s: np.ndarray) -> np.ndarray:
    """Spinor -> co-spinor: conjugate the coefficients in the standard basis."""
    return np.conj(np.asarray(s, dtype=complex))


def phi_map_inverse(c: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(c, dtype=complex))


def _expectations(rep: CliffordRep, psi: np.ndarray) -> np.ndarray:
    return np.array([np.vdot(psi, g @ psi) for g in rep.generators])


def frame_spinors(rep: CliffordRep) -> list[tuple[np.ndarray, np.ndarray]]:
    """Spinors ``Psi^(a)`` with ``phi(Psi^(a)) gamma_b Psi^(a) = delta_ab``.

    Found by a deterministic search over tensor words of single-slot
    eigenvectors (``b1, b2, b3`` first, then their ``-1`` partners); the
    first word in lexicographic order that satisfies the identity wins.
    """
    m = rep.n // 2
    if m == 0:
        if rep.odd_sign != 1:
            raise ValidationError("no frame spinor exists for n=1 with odd_sign=-1")
        one = np.ones(1, dtype=complex)
        return [(one, phi_map(one))]
    names = list(_ALPHABET)
    words = list(itertools.product(names, repeat=m))
    target = np.eye(rep.n)
    out = []
    for a in range(rep.n):
        for word in words:
            psi = kron(*[_ALPHABET[w][:, None] for w in word])[:, 0]
            if np.allclose(_expectations(rep, psi), target[a], atol=1e-12):
                out.append((psi, phi_map(psi)))
                break
        else:  # pragma: no cover - exhaustive search always succeeds for n <= 8
            raise ValidationError(f"no frame spinor found for a={a}")
    return out


def frame_spinor_words(rep: CliffordRep) -> list[tuple[str, ...]]:
    """The tensor words selected by :func:`frame_spinors`, for reporting."""
    m = rep.n // 2
    if m == 0:
        return [()]
    words = list(itertools.product(list(_ALPHABET), repeat=m))
    spinors = frame_spinors(rep)
    out = []
    for psi, _ in spinors:
        for word in words:
            cand = kron(*[_ALPHABET[w][:, None] for w in word])[:, 0]
            if np.allclose(cand, psi):
                out.append(word)
                break
    return out


# --- inclusions R^k -> R^n -------------------------------------------------


def _step_images(rep_from: CliffordRep, rep_to: CliffordRep) -> list[np.ndarray]:
    """Generator images for one step k -> k+1 or k -> k+2."""
    k, n = rep_from.n, rep_to.n
    if rep_to.spinor_dim == rep_from.spinor_dim:
        images = [g.copy() for g in rep_from.generators]
    else:
        images = [np.kron(SIGMA1, g) for g in rep_from.generators]
    # first generator carries the odd sign of whichever representation is odd
    images[0] = images[0] * (rep_to.odd_sign * rep_from.odd_sign)
    assert len(images) == k and k < n
    return images


def inclusion_generator_images(k: int, n: int, rep_k: CliffordRep, rep_n: CliffordRep) -> list[np.ndarray]:
    """Images of ``gamma_k(e_i)`` under the generator inclusion, chained stepwise."""
    if not 1 <= k < n:
        raise InvalidInclusionError(f"need 1 <= k < n, got k={k}, n={n}")
    if rep_k.n != k or rep_n.n != n:
        raise InvalidInclusionError("representation dimensions do not match (k, n)")
    # after each step the image of gamma_k(e_i) is the i-th generator of the
    # intermediate representation, so the next step acts on it generator-wise
    current = rep_k
    images = list(rep_k.generators)
    while current.n < n:
        step = 2 if n - current.n >= 2 else 1
        nxt = rep_n if current.n + step == n else build_clifford(current.n + step, rep_n.odd_sign)
        step_imgs = _step_images(current, nxt)
        images = [step_imgs[i] for i in range(k)]
        current = nxt
    return images


def _normalize_element(element):
    if isinstance(element, tuple) and (len(element) == 0 or isinstance(element[0], (int, np.integer))):
        return [(element, 1.0)]
    return list(element)


def tau_inclusion(k: int, n: int, rep_k: CliffordRep, rep_n: CliffordRep, element) -> np.ndarray:
    """Generator-wise inclusion of ``CLIFF(R^k)`` into ``CLIFF(R^n)``.

    ``element`` is a word (tuple of generator indices) or a list of
    ``(word, coefficient)`` pairs. Each generator is sent to its image and
    words are sent to the product of the images.
    """
    images = inclusion_generator_images(k, n, rep_k, rep_n)
    out = np.zeros((rep_n.spinor_dim, rep_n.spinor_dim), dtype=complex)
    for word, coeff in _normalize_element(element):
        term = rep_n.identity
        for i in word:
            if not 0 <= i < k:
                raise InvalidInclusionError(f"generator index {i} out of range for k={k}")
            term = term @ images[i]
        out += coeff * term
    return out


def iota_inclusion(rep_k: CliffordRep, rep_n: CliffordRep, matrix: np.ndarray) -> np.ndarray:
    """Algebra inclusion ``c -> sigma_0 (x) ... (x) c``."""
    if rep_k.n >= rep_n.n:
        raise InvalidInclusionError("need k < n")
    factor = rep_n.spinor_dim // rep_k.spinor_dim
    return np.kron(np.eye(factor), np.asarray(matrix, dtype=complex))


def word_matrix(rep: CliffordRep, word) -> np.ndarray:
    out = rep.identity
    for i in word:
        out = out @ rep.generators[i]
    return out


# --- spin group ------------------------------------------------------------


@dataclass(frozen=True)
class SpinElement:
    matrix: np.ndarray
    source_rotation: np.ndarray | None = None

    def __neg__(self):
        return SpinElement(-self.matrix, self.source_rotation)

    def inverse(self) -> "SpinElement":
        src = None if self.source_rotation is None else self.source_rotation.T
        return SpinElement(self.matrix.conj().T, src)


def _check_antisymmetric(omega: np.ndarray, n: int) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (n, n):
        raise ValidationError(f"omega must be {n}x{n}, got {omega.shape}")
    if np.max(np.abs(omega + omega.T), initial=0.0) > 1e-12:
        raise ValidationError("omega is not antisymmetric")
    return omega


def spin_bivector(rep: CliffordRep, omega) -> np.ndarray:
    """``(1/4) sum_ij omega_ij gamma_i gamma_j``."""
    omega = _check_antisymmetric(omega, rep.n)
    out = np.zeros((rep.spinor_dim, rep.spinor_dim), dtype=complex)
    for i in range(rep.n):
        for j in range(rep.n):
            if omega[i, j] != 0.0:
                out += 0.25 * omega[i, j] * (rep.generators[i] @ rep.generators[j])
    return out


def spin_exp(rep: CliffordRep, omega) -> SpinElement:
    """Lift ``exp(omega)`` in SO(n) to ``exp((1/4) omega_ij gamma_i gamma_j)``."""
    big_omega = spin_bivector(rep, omega)
    return SpinElement(scipy.linalg.expm(big_omega), scipy.linalg.expm(np.asarray(omega, dtype=float)))


def extract_rotation(rep: CliffordRep, s, tol: float = 1e-10) -> np.ndarray:
    """Rotation ``R`` with ``S gamma_i S^-1 = sum_j R_ji gamma_j``."""
    mat = s.matrix if isinstance(s, SpinElement) else np.asarray(s)
    inv = np.linalg.inv(mat)
    d = rep.spinor_dim
    gens = np.asarray(rep.generators)
    R = np.empty((rep.n, rep.n))
    worst = 0.0
    for i in range(rep.n):
        conj = mat @ gens[i] @ inv
        coeffs = np.einsum("jab,ba->j", gens, conj) / d
        R[:, i] = coeffs.real
        resid = conj - np.tensordot(R[:, i], gens, axes=(0, 0))
        worst = max(worst, np.max(np.abs(resid)))
    if worst > tol:
        raise SpinInvariantError(f"conjugation leaves the generator span (residual {worst:.2e})")
    return R


def rotation_log(R: np.ndarray) -> np.ndarray:
    """Real antisymmetric ``omega`` with ``expm(omega) = R`` for ``R`` in SO(n)."""
    R = np.asarray(R, dtype=float)
    n = R.shape[0]
    if n == 1:
        return np.zeros((1, 1))
    T, Q = scipy.linalg.schur(R, output="real")
    W = np.zeros_like(T)
    i = 0
    minus_ones = []
    while i < n:
        if i + 1 < n and abs(T[i + 1, i]) > 1e-14:
            blk = T[i : i + 2, i : i + 2]
            theta = np.arctan2(blk[1, 0] - blk[0, 1], blk[0, 0] + blk[1, 1])
            W[i, i + 1] = -theta
            W[i + 1, i] = theta
            i += 2
        else:
            if T[i, i] < 0:
                minus_ones.append(i)
            i += 1
    if len(minus_ones) % 2:
        raise ValidationError("matrix is not a proper rotation")
    for a, b in zip(minus_ones[::2], minus_ones[1::2]):
        W[a, b] = -np.pi
        W[b, a] = np.pi
    omega = Q @ W @ Q.T
    return 0.5 * (omega - omega.T)


def spin_lift(rep: CliffordRep, R: np.ndarray) -> SpinElement:
    """Principal lift of a single rotation."""
    s = spin_exp(rep, rotation_log(R))
    return SpinElement(s.matrix, np.asarray(R, dtype=float))


def _max_rotation_angle(Ra: np.ndarray, Rb: np.ndarray) -> float:
    rel = Ra.T @ Rb
    ev = np.linalg.eigvals(rel)
    return float(np.max(np.abs(np.angle(ev)), initial=0.0))


def spin_lift_field(rep: CliffordRep, rotations: np.ndarray) -> np.ndarray:
    """Continuous spin lift of a grid of rotations.

    ``rotations`` has shape ``(*grid, n, n)``; the result has shape
    ``(*grid, d, d)``. Signs are propagated in row-major order: each sample
    takes the sign closest to its predecessor along the last axis, the
    first sample of a row follows the sample above it.
    """
    rotations = np.asarray(rotations, dtype=float)
    grid = rotations.shape[:-2]
    d = rep.spinor_dim
    out = np.empty(grid + (d, d), dtype=complex)
    for idx in np.ndindex(*grid):
        S = spin_lift(rep, rotations[idx]).matrix
        prev = None
        if idx and any(idx):
            last_nonzero = max(ax for ax in range(len(idx)) if idx[ax] > 0)
            p = list(idx)
            p[last_nonzero] -= 1
            prev = tuple(p)
        if prev is not None:
            if _max_rotation_angle(rotations[prev], rotations[idx]) >= np.pi / 2:
                raise LiftAmbiguityError(
                    f"rotation field jumps by >= pi/2 across grid edge {prev} -> {idx}", edge=(prev, idx)
                )
            if np.real(np.vdot(out[prev], S)) < 0:
                S = -S
        out[idx] = S
    return out
