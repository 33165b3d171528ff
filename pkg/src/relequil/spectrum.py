"""Linearized rotating-frame blocks, the full-system oracle, and verdicts.

The linearization about a relative equilibrium is the 4n x 4n real matrix

    A = [[0, I], [omega^2 I + M^{-1} D^2U, 2 omega Jhat]],

whose spectrum decides spectral stability.  Where the symmetry machinery
produces eigenvector pairs, A splits into closed-form 4x4 blocks; the full
dense eigensolve of A is kept as an independent oracle and the two routes
are compared eigenvalue-by-eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .model import Spectrum, angular_frequency_squared, potential_hessian
from .symmetry import J2, block_symplectic, j_compatible_pairs, joint_invariant_subspaces

SNAP_TOL = 1e-12            # coefficient snap in the closed-form quartic
CLASSIFY_TOL = 1e-8         # |Re|, |Im| thresholds relative to spectral radius
PURIFY_CONST = 400.0        # cluster radius r_k = (PURIFY_CONST eps |A|)^(1/k)

UNSTABLE = "spectrally-unstable"
NOT_UNSTABLE = "not-unstable-at-linear-order"


@dataclass(frozen=True)
class LinearBlock:
    """4x4 block [[0, I2], [omega^2 I2 + diag(lam1, lam2), 2 omega J]]."""

    omega: float
    lam1: float
    lam2: float

    @property
    def matrix(self):
        B = np.zeros((4, 4))
        B[0, 2] = B[1, 3] = 1.0
        B[2, 0] = self.omega ** 2 + self.lam1
        B[3, 1] = self.omega ** 2 + self.lam2
        B[2:, 2:] = 2.0 * self.omega * J2
        return B


def build_block(omega, lam1, lam2):
    if omega <= 0:
        raise ValueError("omega must be positive")
    return LinearBlock(float(omega), float(lam1), float(lam2))


def _principal_sqrt(u):
    """Square root with nonnegative real part; ties toward +i."""
    s = np.sqrt(complex(u))
    if s.real < 0 or (s.real == 0 and s.imag < 0):
        s = -s
    return s


def block_spectrum(block, snap_tol=SNAP_TOL):
    """Four eigenvalues of the block from its biquadratic in closed form.

    With c_k = omega^2 + lam_k the characteristic polynomial is
    s^4 + (4 omega^2 - c1 - c2) s^2 + c1 c2.  Coefficients (and the
    discriminant) are snapped to zero below snap_tol of their natural
    scale: the exact rotation/translation blocks produce cancellations
    there, and the raw float residue would otherwise be amplified to
    ~sqrt(eps) by the root extraction.
    """
    w2 = block.omega ** 2
    c1, c2 = w2 + block.lam1, w2 + block.lam2
    scale = max(w2, abs(block.lam1), abs(block.lam2), 1e-300)
    p = 4.0 * w2 - c1 - c2
    q = c1 * c2
    if abs(p) <= snap_tol * scale:
        p = 0.0
    if abs(q) <= snap_tol * scale * scale:
        q = 0.0
    disc = p * p - 4.0 * q
    if abs(disc) <= snap_tol * scale * scale * max(abs(p), snap_tol):
        disc = 0.0
    root = _principal_sqrt(disc)
    out = []
    for u in ((-p + root) / 2.0, (-p - root) / 2.0):
        s = _principal_sqrt(u)
        out.extend([s, -s])
    return np.array(out)


@dataclass(frozen=True)
class CoupledBlock:
    """Joint (H, Jhat)-invariant subspace that admits no 4x4 splitting.

    Holds the restrictions of the Hessian and the block symplectic map to
    an orthonormal basis of the subspace; the first-order block is twice
    the subspace dimension and is solved densely.
    """

    omega: float
    h_sub: np.ndarray
    j_sub: np.ndarray

    @property
    def dim(self):
        return self.h_sub.shape[0]

    @property
    def matrix(self):
        k = self.dim
        B = np.zeros((2 * k, 2 * k))
        B[:k, k:] = np.eye(k)
        B[k:, :k] = self.omega ** 2 * np.eye(k) + self.h_sub
        B[k:, k:] = 2.0 * self.omega * self.j_sub
        return B

    def spectrum(self):
        return np.linalg.eigvals(self.matrix)


@dataclass(frozen=True)
class BlockDecomposition:
    omega: float
    pairs: tuple               # JPair objects backing the plain blocks
    blocks: tuple              # LinearBlock per pair
    coupled: tuple             # CoupledBlock for unpairable subspaces

    def union_spectrum(self):
        vals = []
        for b in self.blocks:
            vals.extend(block_spectrum(b))
        for c in self.coupled:
            vals.extend(c.spectrum())
        return Spectrum(np.array(vals))


def decompose_blocks(config, spec, strict=False):
    """Block decomposition of the linearization at a central configuration.

    Every eigenvector pair found by the symplectic pairing yields a
    closed-form 4x4 block.  Subspaces that admit no pairs (components of
    n >= 5 polygons without translations) are kept whole as CoupledBlock
    entries unless ``strict`` is set, in which case the pairing error
    propagates.
    """
    omega2 = angular_frequency_squared(config, spec)
    omega = float(np.sqrt(omega2))
    H = potential_hessian(config, spec)
    Hw = _mass_weighted(H, config)
    if strict:
        pairs = j_compatible_pairs(Hw)
        coupled_blocks = ()
    else:
        pairs, coupled = joint_invariant_subspaces(Hw, config.n)
        Jh = block_symplectic(config.n)
        coupled_blocks = tuple(
            CoupledBlock(omega, V.T @ Hw @ V, V.T @ Jh @ V) for V in coupled
        )
    blocks = tuple(build_block(omega, p.lam1, p.lam2) for p in pairs)
    return BlockDecomposition(omega, tuple(pairs), blocks, coupled_blocks)


def _mass_weighted(H, config):
    """M^{-1/2} H M^{-1/2}: symmetric and similar to M^{-1} H.

    For equal unit masses this is H itself.  The symmetric form keeps the
    eigenvector pairing applicable when masses differ.
    """
    inv_sqrt = 1.0 / np.sqrt(config.mass_vector)
    return (H * inv_sqrt).T * inv_sqrt


def linearization_matrix(config, spec):
    """The 4n x 4n first-order matrix of the linearized rotating-frame flow."""
    omega2 = angular_frequency_squared(config, spec)
    omega = float(np.sqrt(omega2))
    n = config.n
    H = potential_hessian(config, spec)
    A = np.zeros((4 * n, 4 * n))
    A[: 2 * n, 2 * n :] = np.eye(2 * n)
    A[2 * n :, : 2 * n] = omega2 * np.eye(2 * n) + H / config.mass_vector[:, None]
    A[2 * n :, 2 * n :] = 2.0 * omega * block_symplectic(n)
    return A


def purify_eigenvalues(values, matrix_norm, max_chain=8, const=PURIFY_CONST):
    """Replace clusters of defective eigenvalues by their mean.

    A Jordan chain of length k scatters a computed eigenvalue by roughly
    (eps |A|)^(1/k) while the cluster mean stays first-order accurate.
    Clusters are merged at radius r_k = (const eps |A|)^(1/k) only when the
    merged multiplicity is at least k, so large radii cannot glue distinct
    simple eigenvalues together.
    """
    eps = np.finfo(float).eps
    vals = np.asarray(values, dtype=complex)
    clusters = [[i] for i in range(vals.size)]
    for k in range(2, max_chain + 1):
        rk = (const * eps * matrix_norm) ** (1.0 / k)
        while True:
            means = [np.mean(vals[c]) for c in clusters]
            m = len(clusters)
            seen = [False] * m
            comps = []
            for i in range(m):
                if seen[i]:
                    continue
                stack, comp = [i], []
                seen[i] = True
                while stack:
                    u = stack.pop()
                    comp.append(u)
                    for v in range(m):
                        if not seen[v] and abs(means[u] - means[v]) <= rk:
                            seen[v] = True
                            stack.append(v)
                comps.append(comp)
            merged_any = False
            new_clusters = []
            for comp in comps:
                total = sum(len(clusters[u]) for u in comp)
                if len(comp) > 1 and total >= k:
                    new_clusters.append(sum((clusters[u] for u in comp), []))
                    merged_any = True
                else:
                    new_clusters.extend(clusters[u] for u in comp)
            clusters = new_clusters
            if not merged_any:
                break
    out = np.empty_like(vals)
    for c in clusters:
        out[c] = np.mean(vals[c])
    return out


def full_linearization_spectrum(config, spec, purify=True):
    """All 4n eigenvalues of the dense linearization (the oracle route)."""
    A = linearization_matrix(config, spec)
    vals = np.linalg.eigvals(A)
    if purify:
        vals = purify_eigenvalues(vals, float(np.linalg.norm(A, 2)))
    return Spectrum(vals)


@dataclass(frozen=True)
class StabilityVerdict:
    eigenvalues: np.ndarray
    labels: tuple
    verdict: str
    max_real_part: float
    tol: float
    n_zero: int = field(init=False)
    n_pure_imaginary: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "n_zero", self.labels.count("zero"))
        object.__setattr__(
            self, "n_pure_imaginary", self.labels.count("pure-imaginary")
        )

    @property
    def is_unstable(self):
        return self.verdict == UNSTABLE


def classify(eigs, tol=CLASSIFY_TOL, scale=None):
    """Label eigenvalues and decide spectral stability.

    Labels are measured against tol * scale with scale defaulting to the
    spectral radius; the verdict is unstable iff some real part exceeds
    that threshold.
    """
    vals = np.asarray(eigs.values if isinstance(eigs, Spectrum) else eigs,
                      dtype=complex)
    if scale is None:
        scale = float(np.max(np.abs(vals))) if vals.size else 0.0
    thr = tol * max(scale, 1e-300)
    labels = []
    for s in vals:
        small_re, small_im = abs(s.real) <= thr, abs(s.imag) <= thr
        if small_re and small_im:
            labels.append("zero")
        elif small_re:
            labels.append("pure-imaginary")
        elif small_im:
            labels.append("real")
        else:
            labels.append("complex")
    max_re = float(np.max(vals.real)) if vals.size else 0.0
    verdict = UNSTABLE if max_re > thr else NOT_UNSTABLE
    return StabilityVerdict(vals, tuple(labels), verdict, max_re, thr)


@dataclass(frozen=True)
class SpectrumMatch:
    matches: bool
    max_distance: float
    tol: float
    scale: float
    worst_pairs: tuple        # ((a, b, distance), ...) sorted worst-first
    cardinality_mismatch: bool = False

    def __bool__(self):
        return self.matches


def compare_spectra(a, b, tol=1e-9, n_worst=4):
    """Minimum-cost bipartite matching of two eigenvalue multisets.

    Passing means the worst matched distance is at most tol * scale where
    scale is the larger spectral radius.  A cardinality mismatch is its own
    structural failure, reported rather than raised.
    """
    va = np.asarray(a.values if isinstance(a, Spectrum) else a, dtype=complex)
    vb = np.asarray(b.values if isinstance(b, Spectrum) else b, dtype=complex)
    scale = max(
        float(np.max(np.abs(va))) if va.size else 0.0,
        float(np.max(np.abs(vb))) if vb.size else 0.0,
        1e-300,
    )
    if va.size != vb.size:
        return SpectrumMatch(False, np.inf, tol, scale, (), True)
    cost = np.abs(va[:, None] - vb[None, :])
    rows, cols = linear_sum_assignment(cost)
    dists = cost[rows, cols]
    order = np.argsort(dists)[::-1]
    worst = tuple(
        (complex(va[rows[k]]), complex(vb[cols[k]]), float(dists[k]))
        for k in order[:n_worst]
    )
    max_d = float(dists.max()) if dists.size else 0.0
    return SpectrumMatch(max_d <= tol * scale, max_d, tol, scale, worst)
