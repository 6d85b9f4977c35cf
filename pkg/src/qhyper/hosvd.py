"""Higher-order SVD for qubit hypermatrices and local-unitary tests.

For an order-N hypermatrix with every mode length 2, the mode-k factor
is the unitary of eigenvectors of the 2x2 Gram matrix G = M M^H of the
k-mode unfolding M, ordered by descending eigenvalue; the mode-k
singular values are the square roots of those eigenvalues.  The core is
obtained by applying the conjugate-transposed factors to the input, so

    H = (V_1, ..., V_N) * core

holds by construction.  The core is all-orthogonal (slices along any
mode at distinct indices have zero Frobenius inner product) and the
norms of the mode-k slices are the mode-k singular values.

The per-mode singular values are invariant under local unitaries and
are therefore used as a cheap fingerprint: fingerprints that cannot be
aligned by any relabeling of the qubit slots prove two states
inequivalent.  An alignment plus matching cores after a deterministic
phase canonicalization certifies equivalence (a permuted tensor with
the same core is reachable by local unitaries); the remaining cases
are reported as inconclusive rather than guessed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatchError, ValidationError
from .tensor import (
    Hypermatrix,
    ModePermutation,
    frobenius_norm,
    k_mode_unfold,
    mode_permute,
    multilinear_multiply,
)

__all__ = [
    "DEFAULT_TOL",
    "DEGENERACY_GAP",
    "HosvdResult",
    "LuTag",
    "SvalCertificate",
    "LuVerdict",
    "mode_factor",
    "mode_svals",
    "hosvd",
    "lu_fingerprint",
    "canonicalize_core",
    "lu_equivalence",
]

DEFAULT_TOL = 1e-10

# Relative gap (s1 - s2) / s1 below which a mode spectrum is treated as
# degenerate; the factor is then not determined up to phase and core
# comparison is not meaningful.
DEGENERACY_GAP = 1e-6

# Bound on how many fingerprint-aligning relabelings are tried before
# the equivalence test gives up with Inconclusive.
RELABEL_CAP = 720


@dataclass(frozen=True)
class HosvdResult:
    """Factors, core and per-mode singular values of a HOSVD.

    ``factors[k-1]`` is the 2x2 unitary for mode k; ``mode_svals[k-1]``
    is the descending pair of mode-k singular values.
    """

    factors: tuple
    core: Hypermatrix
    mode_svals: tuple

    def reconstruct(self) -> Hypermatrix:
        """(V_1, ..., V_N) * core, equal to the input within roundoff."""
        return multilinear_multiply(self.factors, self.core)


def _require_qubit_mode(H, k):
    if not 1 <= k <= H.order:
        raise ValidationError(f"mode must be in 1..{H.order}, got {k}")
    if H.dims[k - 1] != 2:
        raise ValidationError(
            f"mode {k} has length {H.dims[k - 1]}; this decomposition needs length 2"
        )


def mode_factor(H: Hypermatrix, k: int):
    """Mode-k factor and singular values for a length-2 mode.

    Returns
    -------
    V : (2, 2) complex ndarray
        Unitary whose columns are eigenvectors of the Gram matrix of the
        k-mode unfolding, descending eigenvalue order.
    svals : (2,) float ndarray
        Descending mode-k singular values.

    Notes
    -----
    The Gram matrix G = M M^H is Hermitian positive semidefinite, so its
    eigensystem is computed in closed form.  The eigenvector branch is
    chosen by the sign of G_00 - G_11 to avoid cancellation; for a
    degenerate spectrum (including the zero hypermatrix) the factor is
    the identity by convention.
    """
    _require_qubit_mode(H, k)
    M = k_mode_unfold(H, k)
    a = float(np.vdot(M[0], M[0]).real)
    b = float(np.vdot(M[1], M[1]).real)
    c = complex(np.vdot(M[1], M[0]))  # G_01 = row0 . conj(row1)
    d = a - b
    s = a + b
    r = math.hypot(d, 2.0 * abs(c))
    lam_hi = 0.5 * (s + r)
    lam_lo = max(0.5 * (s - r), 0.0)
    svals = np.array([math.sqrt(lam_hi), math.sqrt(lam_lo)])
    if r <= 1e-15 * s or s == 0.0:
        # Degenerate (or zero) spectrum: any orthonormal basis works.
        return np.eye(2, dtype=np.complex128), svals
    if d >= 0.0:
        v1 = np.array([0.5 * (r + d), c.conjugate()], dtype=np.complex128)
    else:
        v1 = np.array([c, 0.5 * (r - d)], dtype=np.complex128)
    v1 /= np.linalg.norm(v1)
    v2 = np.array([-np.conj(v1[1]), np.conj(v1[0])])
    V = np.column_stack([v1, v2])
    V.setflags(write=False)
    svals.setflags(write=False)
    return V, svals


def mode_svals(H: Hypermatrix, k: int) -> np.ndarray:
    """Descending mode-k singular values (no factor computed)."""
    return mode_factor(H, k)[1]


def hosvd(H: Hypermatrix) -> HosvdResult:
    """Higher-order SVD of a hypermatrix with every mode of length 2."""
    for k in range(1, H.order + 1):
        _require_qubit_mode(H, k)
    pairs = [mode_factor(H, k) for k in range(1, H.order + 1)]
    factors = tuple(V for V, _ in pairs)
    svals = tuple(sv for _, sv in pairs)
    core = multilinear_multiply([V.conj().T for V in factors], H)
    return HosvdResult(factors=factors, core=core, mode_svals=svals)


def lu_fingerprint(H: Hypermatrix):
    """Per-mode singular value pairs, the local-unitary invariant.

    Cheap relative to a full decomposition: no core is formed.
    """
    return tuple(mode_svals(H, k) for k in range(1, H.order + 1))


def canonicalize_core(result: HosvdResult, *, negligible: float = DEFAULT_TOL / 4):
    """Fix the residual per-mode phase freedom of a HOSVD core.

    The factors of a non-degenerate HOSVD are unique only up to a unit
    phase per column, which multiplies core entries by phases of the form
    g * prod_{k in F} rho_k, where F is the set of modes in which an
    entry's index differs from a reference entry.  This routine chooses
    those phases deterministically from the core itself:

    * the largest-magnitude entry (ties: smallest row-major index) is
      made real positive and serves as the reference;
    * remaining entries with magnitude above ``negligible`` are visited
      in descending magnitude (ties: ascending index); each visit pins
      the phase of one still-free mode so the visited entry becomes
      real positive, zeroing the extra phases first when an entry
      involves more than one free mode;
    * phases of modes never touched by the support stay at zero.

    The factors are rescaled by the conjugate phases so that
    ``reconstruct()`` is unchanged.  Because the visiting order depends
    only on entry magnitudes, two cores that differ by such phases
    canonicalize to the same entries whenever the pinning order is
    determined by entries well above ``negligible``.

    Returns a new :class:`HosvdResult`.
    """
    core = np.array(result.core.data)
    n = core.ndim
    flat = core.reshape(-1)
    mags = np.abs(flat)
    top = float(mags.max())
    if top <= 0.0:
        return result
    anchor = int(np.argmax(mags))
    anchor_bits = np.unravel_index(anchor, core.shape)
    g = -cmath.phase(flat[anchor])

    support = [i for i in range(flat.size) if mags[i] > negligible and i != anchor]
    support.sort(key=lambda i: (-mags[i], i))
    flip_sets = {
        i: [k for k, (ib, ab) in enumerate(zip(np.unravel_index(i, core.shape), anchor_bits)) if ib != ab]
        for i in support
    }

    rho = [None] * n
    pending = list(support)
    while pending:
        chosen = None
        for i in pending:
            free = [k for k in flip_sets[i] if rho[k] is None]
            if len(free) <= 1:
                chosen = (i, free)
                break
        if chosen is None:
            # Largest remaining entry touches several free modes: keep
            # only its smallest free mode adjustable, zero the others.
            free = [k for k in flip_sets[pending[0]] if rho[k] is None]
            for k in free[1:]:
                rho[k] = 0.0
            continue
        i, free = chosen
        pending.remove(i)
        if not free:
            continue  # phase already determined by earlier pins
        k = free[0]
        theta = cmath.phase(flat[i]) + g
        theta += sum(rho[m] for m in flip_sets[i] if m != k)
        rho[k] = -theta
    rho = [0.0 if r is None else r for r in rho]

    canon = core
    new_factors = []
    for k in range(n):
        pk = np.ones(2, dtype=np.complex128)
        pk[1 - anchor_bits[k]] = cmath.exp(1j * rho[k])
        if k == 0:
            pk = pk * cmath.exp(1j * g)
        shape = [1] * n
        shape[k] = 2
        canon = canon * pk.reshape(shape)
        new_factors.append(result.factors[k] * np.conj(pk)[None, :])
    return HosvdResult(
        factors=tuple(new_factors),
        core=Hypermatrix(canon),
        mode_svals=result.mode_svals,
    )


class LuTag(Enum):
    NOT_EQUIVALENT = "NotEquivalent"
    EQUIVALENT_CORE_MATCH = "EquivalentCoreMatch"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class SvalCertificate:
    """Witness of inequivalence: a mode whose singular values differ."""

    mode: int
    svals_a: tuple
    svals_b: tuple


@dataclass(frozen=True)
class LuVerdict:
    tag: LuTag
    certificate: SvalCertificate | None = None
    detail: str = ""


def _alignment_candidates(fa, fb, tol, cap):
    """Mode permutations sigma with fa[sigma(k)] = fb[k] within tol.

    Returns (candidates, capped); candidates are in lexicographic
    mapping order and at most ``cap`` of them are collected.
    """
    N = len(fa)
    options = []
    for k in range(N):
        opts = [j for j in range(N) if float(np.max(np.abs(fa[j] - fb[k]))) <= tol]
        if not opts:
            return [], False
        options.append(opts)
    found = []
    capped = False
    used = [False] * N

    def search(k, prefix):
        nonlocal capped
        if len(found) > cap:
            capped = True
            return
        if k == N:
            found.append(tuple(j + 1 for j in prefix))
            return
        for j in options[k]:
            if not used[j] and not capped:
                used[j] = True
                search(k + 1, prefix + [j])
                used[j] = False

    search(0, [])
    if capped:
        found = found[:cap]
    return [ModePermutation(m) for m in found], capped


def lu_equivalence(A: Hypermatrix, B: Hypermatrix, tol: float = DEFAULT_TOL) -> LuVerdict:
    """Three-valued equivalence test under local unitaries and qubit
    relabeling.

    ``NotEquivalent`` means no relabeling of the modes aligns the two
    singular-value fingerprints; the certificate reports the first mode
    where the unpermuted fingerprints differ.  ``EquivalentCoreMatch``
    means some alignment exists under which the phase-canonicalized
    cores agree entrywise within ``tol``, with every mode spectrum
    non-degenerate.  Everything else is ``Inconclusive``; the test never
    guesses.

    Both inputs must have equal dims and unit Frobenius norm within
    ``tol`` (no silent renormalization).
    """
    if A.dims != B.dims:
        raise DimensionMismatchError(f"dims differ: {A.dims} vs {B.dims}")
    for name, T in (("first", A), ("second", B)):
        if abs(frobenius_norm(T) - 1.0) > tol:
            raise ValidationError(
                f"{name} input is not normalized (norm {frobenius_norm(T)!r})"
            )
    fa = lu_fingerprint(A)
    fb = lu_fingerprint(B)
    candidates, capped = _alignment_candidates(fa, fb, tol, RELABEL_CAP)
    if not candidates:
        for k, (sa, sb) in enumerate(zip(fa, fb), start=1):
            if np.max(np.abs(sa - sb)) > tol:
                return LuVerdict(
                    tag=LuTag.NOT_EQUIVALENT,
                    certificate=SvalCertificate(
                        mode=k, svals_a=tuple(sa), svals_b=tuple(sb)
                    ),
                    detail="no relabeling aligns the singular-value fingerprints",
                )
    for k, sv in enumerate(fb, start=1):
        if sv[0] <= 0.0 or (sv[0] - sv[1]) / sv[0] < DEGENERACY_GAP:
            return LuVerdict(
                tag=LuTag.INCONCLUSIVE,
                detail=(
                    f"mode {k} spectrum is degenerate; the core comparison "
                    "is not phase-determined"
                ),
            )
    cb = canonicalize_core(hosvd(B), negligible=tol / 4).core
    best_gap = None
    for sigma in candidates:
        ca = canonicalize_core(hosvd(mode_permute(A, sigma)), negligible=tol / 4).core
        gap = float(np.max(np.abs(ca.data - cb.data)))
        if gap <= tol:
            is_id = sigma.mapping == tuple(range(1, len(sigma.mapping) + 1))
            return LuVerdict(
                tag=LuTag.EQUIVALENT_CORE_MATCH,
                detail="" if is_id else f"after relabeling modes by {sigma.mapping}",
            )
        best_gap = gap if best_gap is None else min(best_gap, gap)
    detail = (
        "fingerprints align but canonical cores differ "
        f"(best max entry gap {best_gap:.3e})"
    )
    if capped:
        detail += f"; relabeling search capped at {RELABEL_CAP} candidates"
    return LuVerdict(tag=LuTag.INCONCLUSIVE, detail=detail)
