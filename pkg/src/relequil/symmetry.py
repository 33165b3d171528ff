"""Dihedral symmetry groups acting on planar configurations.

A group element is a body permutation combined with one planar orthogonal
map applied to every body; it acts on flattened coordinates through a
2n x 2n block-permutation matrix.  Characters, isotypic projectors, trace
equations, and the pairing of eigenvectors compatible with the block
symplectic operator all live here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])

ORTHO_TOL = 1e-14


class PairingError(RuntimeError):
    """No complete basis of symplectically compatible eigenvector pairs."""

    def __init__(self, message, leftover_dim=0):
        self.leftover_dim = leftover_dim
        super().__init__(message)


class InvarianceError(ValueError):
    """Matrix fails to commute with the group representation."""


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def reflection(axis_angle):
    """Reflection about the line through the origin at the given angle."""
    c, s = np.cos(2.0 * axis_angle), np.sin(2.0 * axis_angle)
    return np.array([[c, s], [s, -c]])


@dataclass(frozen=True)
class GroupElement:
    """Pair (perm, ortho): body i is sent to slot perm[i] with planar map ortho."""

    perm: tuple
    ortho: np.ndarray
    name: str = ""

    def __post_init__(self):
        ortho = np.array(self.ortho, dtype=float)
        if np.max(np.abs(ortho @ ortho.T - np.eye(2))) > ORTHO_TOL:
            raise ValueError("ortho part must be orthogonal")
        ortho.flags.writeable = False
        object.__setattr__(self, "ortho", ortho)
        object.__setattr__(self, "perm", tuple(int(p) for p in self.perm))

    @property
    def n(self):
        return len(self.perm)

    @property
    def is_reflection(self):
        return np.linalg.det(self.ortho) < 0

    def compose(self, other):
        """self after other, matching the product of representation matrices."""
        perm = tuple(self.perm[p] for p in other.perm)
        return GroupElement(perm, self.ortho @ other.ortho)

    def inverse(self):
        inv = [0] * self.n
        for i, p in enumerate(self.perm):
            inv[p] = i
        return GroupElement(tuple(inv), self.ortho.T)

    def key(self, decimals=9):
        return self.perm, tuple(np.round(self.ortho, decimals).ravel())


def representation_matrix(g, n):
    """The 2n x 2n orthogonal matrix by which g acts on flat coordinates."""
    if g.n != n:
        raise ValueError(f"element acts on {g.n} bodies, configuration has {n}")
    D = np.zeros((2 * n, 2 * n))
    for i, p in enumerate(g.perm):
        D[2 * p : 2 * p + 2, 2 * i : 2 * i + 2] = g.ortho
    return D


@dataclass(frozen=True)
class SymmetryGroup:
    """Finite closed set of GroupElements with conjugacy-class bookkeeping."""

    elements: tuple
    identity_index: int = field(init=False)
    conjugacy_classes: tuple = field(init=False)
    multiplication_table: np.ndarray = field(init=False)

    def __post_init__(self):
        elems = tuple(self.elements)
        object.__setattr__(self, "elements", elems)
        keys = {g.key(): i for i, g in enumerate(elems)}
        if len(keys) != len(elems):
            raise ValueError("duplicate group elements")
        order = len(elems)
        table = np.empty((order, order), dtype=int)
        for i, g in enumerate(elems):
            for j, h in enumerate(elems):
                k = keys.get(g.compose(h).key())
                if k is None:
                    raise ValueError("element set is not closed under composition")
                table[i, j] = k
        table.flags.writeable = False
        object.__setattr__(self, "multiplication_table", table)
        ident = [i for i, g in enumerate(elems)
                 if g.perm == tuple(range(g.n))
                 and np.allclose(g.ortho, np.eye(2), atol=ORTHO_TOL)]
        if len(ident) != 1:
            raise ValueError("group must contain exactly one identity")
        object.__setattr__(self, "identity_index", ident[0])
        inverses = [None] * order
        for i in range(order):
            js = np.nonzero(table[i] == ident[0])[0]
            if js.size != 1:
                raise ValueError(f"element {i} lacks a unique inverse")
            inverses[i] = int(js[0])
        # conjugacy classes via orbit of conjugation
        seen, classes = set(), []
        for i in range(order):
            if i in seen:
                continue
            orbit = {int(table[table[h, i], inverses[h]]) for h in range(order)}
            seen |= orbit
            classes.append(tuple(sorted(orbit)))
        classes.sort(key=lambda cl: (cl != (self.identity_index,), len(cl), cl))
        object.__setattr__(self, "conjugacy_classes", tuple(classes))

    @property
    def order(self):
        return len(self.elements)

    @property
    def n(self):
        return self.elements[0].n

    def class_representatives(self):
        return [self.elements[cl[0]] for cl in self.conjugacy_classes]

    def class_sizes(self):
        return np.array([len(cl) for cl in self.conjugacy_classes])

    def class_of_element(self, idx):
        for c, cl in enumerate(self.conjugacy_classes):
            if idx in cl:
                return c
        raise KeyError(idx)


def build_polygon_symmetry_group(n, axis_angle=0.0):
    """Dihedral group of order 2n fixing the regular n-gon, as a closed set.

    Generators: a = (cyclic shift i -> i+1, rotation by 2*pi/n) and
    r = (the permutation induced by reflecting the polygon, reflection about
    the axis through body 1).  ``axis_angle`` rotates the whole polygon's
    reference frame, matching configurations whose body 1 is off the x-axis.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    shift = tuple((i + 1) % n for i in range(n))
    flip = tuple((-i) % n for i in range(n))
    a = GroupElement(shift, rotation(2.0 * np.pi / n), "a")
    r = GroupElement(flip, reflection(axis_angle), "r")
    elems = []
    g = GroupElement(tuple(range(n)), np.eye(2), "e")
    for k in range(n):
        elems.append(GroupElement(g.perm, g.ortho, f"a{k}" if k else "e"))
        g = a.compose(g)
    for k in range(n):
        rk = elems[k].compose(r)
        elems.append(GroupElement(rk.perm, rk.ortho, f"a{k}r" if k else "r"))
    return SymmetryGroup(tuple(elems))


@dataclass(frozen=True)
class CharacterTable:
    """Irreducible characters indexed (irrep row, conjugacy-class column)."""

    names: tuple
    degrees: np.ndarray
    values: np.ndarray          # shape (n_irreps, n_classes), real
    class_sizes: np.ndarray
    group_order: int

    def inner(self, chi_a, chi_b):
        """Group-averaged inner product of two class functions."""
        return float(
            np.sum(self.class_sizes * np.conj(chi_a) * chi_b) / self.group_order
        )

    @property
    def n_irreps(self):
        return len(self.names)


def character_table(group):
    """Closed-form dihedral character table aligned with the group's classes.

    Row order: trivial, sign (det of the planar part), then for even n the
    two remaining one-dimensional characters, then the two-dimensional
    irreps by increasing rotation angle.  The rotation power k of a class
    representative a^k (or a^k r) is read off as perm[0].
    """
    n = group.n
    if group.order != 2 * n:
        raise ValueError("expected the dihedral group of the n-gon")
    reps = group.class_representatives()
    rows, names, degrees = [], [], []

    def add(name, degree, fn):
        names.append(name)
        degrees.append(degree)
        rows.append([fn(g, g.perm[0]) for g in reps])

    add("A1", 1, lambda g, k: 1.0)
    add("A2", 1, lambda g, k: -1.0 if g.is_reflection else 1.0)
    if n % 2 == 0:
        add("B1", 1, lambda g, k: (-1.0) ** k)
        add("B2", 1, lambda g, k: -((-1.0) ** k) if g.is_reflection else (-1.0) ** k)
    n_two_dim = (n - 1) // 2 if n % 2 else n // 2 - 1
    for j in range(1, n_two_dim + 1):
        add(f"E{j}", 2, lambda g, k, j=j:
            0.0 if g.is_reflection else 2.0 * np.cos(2.0 * np.pi * j * k / n))
    values = np.array(rows, dtype=float)
    table = CharacterTable(
        tuple(names), np.array(degrees), values, group.class_sizes(), group.order
    )
    gram = np.array([
        [table.inner(values[i], values[j]) for j in range(len(rows))]
        for i in range(len(rows))
    ])
    if np.max(np.abs(gram - np.eye(len(rows)))) > 1e-12:
        raise ValueError("character table failed orthonormality")
    return table


def representation_character(group):
    """Character of the 2n-dimensional configuration action, per class."""
    n = group.n
    out = []
    for g in group.class_representatives():
        fixed = sum(1 for i, p in enumerate(g.perm) if i == p)
        out.append(fixed * float(np.trace(g.ortho)))
    return np.array(out)


def decompose_multiplicities(rep_character, table, tol=1e-9):
    """Multiplicities n_i = (chi_i, chi); must be integers within tol."""
    mult = []
    for i in range(table.n_irreps):
        x = table.inner(table.values[i], np.asarray(rep_character, dtype=float))
        r = round(x)
        if abs(x - r) > tol or r < 0:
            raise ValueError(f"non-integer multiplicity {x} for irrep {table.names[i]}")
        mult.append(int(r))
    return mult


def verify_invariance(H, group, tol=1e-10):
    """(commutes, max defect) of H against every representation matrix."""
    n = group.n
    H = np.asarray(H)
    defect = 0.0
    for g in group.elements:
        D = representation_matrix(g, n)
        defect = max(defect, float(np.max(np.abs(D @ H - H @ D))))
    return defect <= tol, defect


def isotypic_projectors(group, table, n):
    """P_i = (d_i/|G|) sum_g conj(chi_i(g)) D(g), one per irreducible."""
    if group.n != n:
        raise ValueError("group does not act on n bodies")
    mats = [representation_matrix(g, n) for g in group.elements]
    class_of = [group.class_of_element(i) for i in range(group.order)]
    projectors = []
    for i in range(table.n_irreps):
        chi = table.values[i]
        P = np.zeros((2 * n, 2 * n))
        for idx, D in enumerate(mats):
            P += chi[class_of[idx]] * D
        projectors.append(table.degrees[i] / group.order * P)
    return projectors


@dataclass(frozen=True)
class IsotypicComponent:
    irrep: str
    degree: int
    multiplicity: int
    eigenvalues: tuple
    basis: np.ndarray  # orthonormal columns spanning the component


@dataclass(frozen=True)
class IsotypicDecomposition:
    components: tuple

    def eigenvalue_lists(self):
        return [list(c.eigenvalues) for c in self.components]

    def full_multiset(self):
        out = []
        for c in self.components:
            for lam in c.eigenvalues:
                out.extend([lam] * c.degree)
        return np.sort(np.array(out))


def _orthonormal_range(P, rank):
    """Orthonormal basis of the range of a symmetric projector."""
    w, V = np.linalg.eigh(P)
    idx = np.argsort(w)[::-1][:rank]
    basis = V[:, idx]
    # deterministic sign: largest-magnitude entry positive
    for k in range(basis.shape[1]):
        j = int(np.argmax(np.abs(basis[:, k])))
        if basis[j, k] < 0:
            basis[:, k] = -basis[:, k]
    return basis


def eigenvalues_by_trace_equations(H, group, table=None, invariance_tol=1e-8,
                                   check_tol=1e-9):
    """Per-irreducible eigenvalues of an invariant symmetric matrix.

    The traces Tr(H D(g)) determine, through character orthonormality, the
    SUM of the eigenvalues carried by each isotypic component.  Components
    of multiplicity one are finished there; higher multiplicities are
    resolved by diagonalizing H restricted to the range of the isotypic
    projector, where every eigenvalue appears exactly ``degree`` times.
    The assembled multiset is validated against a direct symmetric
    diagonalization of H before returning.
    """
    H = np.asarray(H, dtype=float)
    n = group.n
    if table is None:
        table = character_table(group)
    scale = max(float(np.max(np.abs(H))), 1e-300)
    ok, defect = verify_invariance(H, group, tol=invariance_tol * scale)
    if not ok:
        raise InvarianceError(
            f"matrix does not commute with the group action (defect {defect:.3e})"
        )
    class_of = [group.class_of_element(i) for i in range(group.order)]
    trace_fn = np.zeros(len(group.conjugacy_classes))
    counts = np.zeros(len(group.conjugacy_classes))
    for idx, g in enumerate(group.elements):
        trace_fn[class_of[idx]] += float(np.trace(H @ representation_matrix(g, n)))
        counts[class_of[idx]] += 1
    trace_fn /= counts
    sums = np.array([table.inner(table.values[i], trace_fn)
                     for i in range(table.n_irreps)])
    mult = decompose_multiplicities(representation_character(group), table)

    projectors = isotypic_projectors(group, table, n)
    components = []
    for i in range(table.n_irreps):
        d, m = int(table.degrees[i]), mult[i]
        if m == 0:
            components.append(IsotypicComponent(table.names[i], d, 0, (), None))
            continue
        basis = _orthonormal_range(projectors[i], d * m)
        if m == 1:
            lams = (float(sums[i]),)
        else:
            sub = basis.T @ H @ basis
            w = np.sort(np.linalg.eigvalsh(sub))
            # eigenvalues repeat `d` times inside the component
            lams = tuple(float(np.mean(w[k * d : (k + 1) * d])) for k in range(m))
            if abs(sum(lams) - sums[i]) > check_tol * (1.0 + abs(sums[i])):
                raise InvarianceError(
                    f"component {table.names[i]}: projector eigenvalues do not "
                    f"add up to the trace-equation sum"
                )
        components.append(
            IsotypicComponent(table.names[i], d, m, lams, basis)
        )
    deco = IsotypicDecomposition(tuple(components))
    direct = np.sort(np.linalg.eigvalsh(H))
    assembled = deco.full_multiset()
    if np.max(np.abs(direct - assembled)) > check_tol * (scale + 1.0):
        raise InvarianceError(
            "trace-equation eigenvalues disagree with direct diagonalization"
        )
    return deco


@dataclass(frozen=True)
class JPair:
    """Eigenvector pair spanning a plane on which Jhat acts as the 2x2 J."""

    lam1: float
    lam2: float
    v1: np.ndarray
    v2: np.ndarray


def block_symplectic(n):
    """diag(J, ..., J): the planar quarter-turn applied to every body."""
    Z = np.zeros((2 * n, 2 * n))
    for i in range(n):
        Z[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = J2
    return Z


def _eigen_clusters(H, cluster_tol):
    evals, vecs = np.linalg.eigh(np.asarray(H, dtype=float))
    scale = max(float(np.max(np.abs(evals))), 1e-300)
    clusters = []
    for lam, v in zip(evals, vecs.T):
        if clusters and abs(lam - clusters[-1][0][-1]) <= cluster_tol * scale:
            clusters[-1][0].append(lam)
            clusters[-1][1].append(v)
        else:
            clusters.append(([lam], [v]))
    return [(float(np.mean(ls)), np.array(vs).T) for ls, vs in clusters]


def _deflate(basis, used):
    """Orthonormal basis of span(basis) minus span(used).

    SVD-based: plain QR misorders near-zero columns when ``used`` almost
    coincides with a basis column, polluting the kept directions.
    """
    if basis.shape[1] == 0:
        return basis
    B = basis - np.outer(used, used @ basis)
    U, S, _ = np.linalg.svd(B, full_matrices=False)
    return U[:, S > 1e-8]


def _fix_pair_sign(v1, v2, tol=1e-9):
    for x in v1:
        if abs(x) > tol:
            if x < 0:
                return -v1, -v2
            return v1, v2
    return v1, v2


def _strict_pairs(clusters, Jh, svd_tol):
    """Greedy extraction of eigenvector pairs with Jhat v1 = -v2 exactly."""
    pairs = []
    cl = [[lam, B] for lam, B in clusters]
    progress = True
    while progress:
        progress = False
        for i in range(len(cl)):
            for j in range(i, len(cl)):
                Bi, Bj = cl[i][1], cl[j][1]
                if Bi.shape[1] == 0 or Bj.shape[1] == 0:
                    continue
                if i == j and Bi.shape[1] < 2:
                    continue
                sv = np.linalg.svd(Bj.T @ Jh @ Bi)
                k = int(np.argmax(sv.S))
                if abs(sv.S[k] - 1.0) > svd_tol:
                    continue
                v1 = Bi @ sv.Vh[k]
                v2 = -Jh @ v1
                v1, v2 = _fix_pair_sign(v1, v2)
                pairs.append(JPair(cl[i][0], cl[j][0], v1, v2))
                cl[i][1] = _deflate(cl[i][1], v1)
                cl[j][1] = _deflate(cl[j][1], v2)
                progress = True
    leftover = [(lam, B) for lam, B in cl if B.shape[1] > 0]
    return pairs, leftover


def j_compatible_pairs(H, group=None, cluster_tol=1e-8, svd_tol=1e-7,
                       invariance_tol=1e-8):
    """Split R^{2n} into n eigenvector pairs compatible with the symplectic J.

    Each returned pair satisfies H v_k = lam_k v_k and
    Jhat (v1, v2) = (v1, v2) J exactly (v2 = -Jhat v1).  When ``group`` is
    given, invariance of H is checked first.  Raises PairingError when part
    of the space admits no such pairs — which happens structurally for
    isotypic components of n >= 5 polygons that contain no translations,
    not just for numerically degenerate spectra; widening ``cluster_tol``
    only helps in the latter case.
    """
    H = np.asarray(H, dtype=float)
    two_n = H.shape[0]
    if two_n % 2:
        raise ValueError("dimension must be even")
    n = two_n // 2
    if group is not None:
        scale = max(float(np.max(np.abs(H))), 1e-300)
        ok, defect = verify_invariance(H, group, tol=invariance_tol * scale)
        if not ok:
            raise InvarianceError(
                f"matrix does not commute with the group action (defect {defect:.3e})"
            )
    Jh = block_symplectic(n)
    for widen in (1.0, 10.0, 100.0):
        clusters = _eigen_clusters(H, cluster_tol * widen)
        pairs, leftover = _strict_pairs(clusters, Jh, svd_tol)
        if not leftover:
            return sorted(pairs, key=lambda p: (p.lam1, p.lam2))
    dim = sum(B.shape[1] for _, B in leftover)
    raise PairingError(
        f"{dim} dimensions admit no symplectically compatible eigenvector "
        f"pairs (eigenvalues {[round(l, 6) for l, _ in leftover]})",
        leftover_dim=dim,
    )


def joint_invariant_subspaces(H, n, cluster_tol=1e-8):
    """Minimal subspaces invariant under both H and the block symplectic map.

    Returns (pairs, coupled) where ``pairs`` are strict JPair objects and
    ``coupled`` is a list of orthonormal bases of the leftover minimal
    joint-invariant subspaces (dimension 4 for polygon components without
    translations).  Union of all spans is R^{2n}.
    """
    H = np.asarray(H, dtype=float)
    Jh = block_symplectic(n)
    clusters = _eigen_clusters(H, cluster_tol)
    pairs, leftover = _strict_pairs(clusters, Jh, svd_tol=1e-7)
    coupled = []
    remaining = [list(t) for t in leftover]
    while any(B.shape[1] > 0 for _, B in remaining):
        i = next(k for k, (_, B) in enumerate(remaining) if B.shape[1] > 0)
        lam, B = remaining[i]
        # grow span{v, Jhat v, H Jhat v, ...} to joint invariance
        V = B[:, :1]
        for _ in range(2 * n):
            W = np.column_stack([V, Jh @ V, H @ V])
            U, S, _ = np.linalg.svd(W, full_matrices=False)
            W = U[:, S > 1e-9 * max(S[0], 1.0)]
            if W.shape[1] == V.shape[1]:
                break
            V = W
        coupled.append(V)
        for k, (lam_k, B_k) in enumerate(remaining):
            for col in range(V.shape[1]):
                B_k = _deflate(B_k, V[:, col]) if B_k.shape[1] else B_k
            remaining[k][1] = B_k
    return sorted(pairs, key=lambda p: (p.lam1, p.lam2)), coupled
