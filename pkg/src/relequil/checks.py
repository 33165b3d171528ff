"""Always-on invariant battery shared by the CLI selfcheck and the tests.

Each check returns (name, passed, detail); run_selfcheck executes the lot
and reports the worst observed defect for every property.
"""

from __future__ import annotations

import numpy as np

from .central import regular_polygon
from .model import (
    BodyConfiguration,
    PotentialSpec,
    potential_energy,
    potential_gradient,
    potential_hessian,
)
from .presets import all_standard_cases
from .spectrum import block_spectrum, build_block, full_linearization_spectrum
from .symmetry import (
    build_polygon_symmetry_group,
    character_table,
    isotypic_projectors,
    representation_matrix,
)

PRESET_POTENTIALS = {
    "homogeneous(1)": PotentialSpec.homogeneous(1.0),
    "manev": PotentialSpec.manev(),
    "schwarzschild": PotentialSpec.schwarzschild(),
}


def random_configuration(rng, n=4, min_distance=0.35):
    while True:
        pos = rng.uniform(-1.5, 1.5, size=2 * n)
        try:
            cfg = BodyConfiguration(np.ones(n), pos)
        except ValueError:
            continue
        if cfg.min_pair_distance() >= min_distance:
            return cfg


def check_gradient_fd(n_samples=100, tol=1e-6, seed=11):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for name, spec in PRESET_POTENTIALS.items():
        for _ in range(n_samples):
            cfg = random_configuration(rng)
            g = potential_gradient(cfg, spec)
            h = 1e-5
            fd = np.empty_like(g)
            for k in range(g.size):
                e = np.zeros_like(g)
                e[k] = h
                up = potential_energy(cfg.with_positions(cfg.positions + e), spec)
                dn = potential_energy(cfg.with_positions(cfg.positions - e), spec)
                up2 = potential_energy(cfg.with_positions(cfg.positions + 2 * e), spec)
                dn2 = potential_energy(cfg.with_positions(cfg.positions - 2 * e), spec)
                # Richardson-refined central difference
                fd[k] = (8.0 * (up - dn) - (up2 - dn2)) / (12.0 * h)
            rel = np.max(np.abs(fd - g)) / max(np.max(np.abs(g)), 1e-300)
            worst = max(worst, rel)
    return "gradient vs finite differences", worst <= tol, f"worst rel {worst:.3e}"


def check_hessian_fd(n_samples=100, tol=1e-5, seed=12):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for name, spec in PRESET_POTENTIALS.items():
        for _ in range(n_samples):
            cfg = random_configuration(rng)
            H = potential_hessian(cfg, spec)
            h = 1e-5
            fd = np.empty_like(H)
            for k in range(H.shape[0]):
                e = np.zeros(H.shape[0])
                e[k] = h
                gp = potential_gradient(cfg.with_positions(cfg.positions + e), spec)
                gm = potential_gradient(cfg.with_positions(cfg.positions - e), spec)
                fd[:, k] = (gp - gm) / (2.0 * h)
            rel = np.max(np.abs(fd - H)) / max(np.max(np.abs(H)), 1e-300)
            worst = max(worst, rel)
    return "hessian vs finite differences", worst <= tol, f"worst rel {worst:.3e}"


def check_homomorphism(tol=1e-13):
    worst = 0.0
    for n in (3, 4, 5):
        group = build_polygon_symmetry_group(n)
        mats = [representation_matrix(g, n) for g in group.elements]
        for i, g in enumerate(group.elements):
            for j, h in enumerate(group.elements):
                k = group.multiplication_table[i, j]
                worst = max(worst, float(np.max(np.abs(mats[i] @ mats[j] - mats[k]))))
    return "representation homomorphism", worst <= tol, f"worst defect {worst:.3e}"


def check_character_orthonormality(tol=1e-12):
    worst = 0.0
    for n in (3, 4, 5, 6):
        table = character_table(build_polygon_symmetry_group(n))
        k = table.n_irreps
        gram = np.array([
            [table.inner(table.values[i], table.values[j]) for j in range(k)]
            for i in range(k)
        ])
        worst = max(worst, float(np.max(np.abs(gram - np.eye(k)))))
    return "character orthonormality", worst <= tol, f"worst defect {worst:.3e}"


def check_projector_algebra(tol=1e-11, seed=13):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in (3, 4, 5):
        group = build_polygon_symmetry_group(n)
        table = character_table(group)
        projectors = isotypic_projectors(group, table, n)
        total = sum(projectors)
        worst = max(worst, float(np.max(np.abs(total - np.eye(2 * n)))))
        for i, P in enumerate(projectors):
            for j, Q in enumerate(projectors):
                target = P if i == j else np.zeros_like(P)
                worst = max(worst, float(np.max(np.abs(P @ Q - target))))
        # projectors must commute with any invariant matrix
        mats = [representation_matrix(g, n) for g in group.elements]
        M = rng.standard_normal((2 * n, 2 * n))
        M = sum(D @ (M + M.T) @ D.T for D in mats) / len(mats)
        for P in projectors:
            worst = max(worst, float(np.max(np.abs(P @ M - M @ P))))
    return "isotypic projector algebra", worst <= tol, f"worst defect {worst:.3e}"


def check_hamiltonian_symmetry(tol=1e-9):
    worst = 0.0
    for case in all_standard_cases():
        spec = full_linearization_spectrum(case.configuration(), case.potential)
        v = spec.values
        scale = max(float(np.max(np.abs(v))), 1e-300)
        for transform in (lambda s: -s, np.conj):
            w = transform(v)
            cost = np.abs(v[:, None] - w[None, :])
            from scipy.optimize import linear_sum_assignment

            r, c = linear_sum_assignment(cost)
            worst = max(worst, float(cost[r, c].max()) / scale)
    return "Hamiltonian spectral symmetry", worst <= tol, f"worst rel {worst:.3e}"


def check_scaling_law(tol=1e-8):
    """Radius scaling rho multiplies every eigenvalue by rho^{-(a+2)/2}."""
    worst = 0.0
    from scipy.optimize import linear_sum_assignment

    for n, alpha, rho in ((3, 1.0, 1.7), (4, 1.4, 0.6), (5, 0.8, 2.3)):
        spec = PotentialSpec.homogeneous(alpha)
        base = full_linearization_spectrum(regular_polygon(n), spec).values
        scaled = full_linearization_spectrum(
            regular_polygon(n, radius=rho), spec
        ).values
        predicted = base * rho ** (-(alpha + 2.0) / 2.0)
        cost = np.abs(predicted[:, None] - scaled[None, :])
        r, c = linear_sum_assignment(cost)
        scale = max(float(np.max(np.abs(predicted))), 1e-300)
        worst = max(worst, float(cost[r, c].max()) / scale)
    return "radius scaling law", worst <= tol, f"worst rel {worst:.3e}"


def check_block_closed_form(n_samples=1000, tol=1e-10, seed=14):
    rng = np.random.default_rng(seed)
    from scipy.optimize import linear_sum_assignment

    worst = 0.0
    for _ in range(n_samples):
        omega = rng.uniform(0.1, 10.0)
        lam1, lam2 = rng.uniform(-10.0, 10.0, size=2)
        blk = build_block(omega, lam1, lam2)
        closed = block_spectrum(blk)
        dense = np.linalg.eigvals(blk.matrix)
        cost = np.abs(closed[:, None] - dense[None, :])
        r, c = linear_sum_assignment(cost)
        scale = max(float(np.max(np.abs(dense))), 1e-300)
        worst = max(worst, float(cost[r, c].max()) / scale)
    return "block closed form vs dense eigensolver", worst <= tol, \
        f"worst rel {worst:.3e}"


ALL_CHECKS = (
    check_gradient_fd,
    check_hessian_fd,
    check_homomorphism,
    check_character_orthonormality,
    check_projector_algebra,
    check_hamiltonian_symmetry,
    check_scaling_law,
    check_block_closed_form,
)


def run_selfcheck(fast=False):
    """Run the battery; returns (all_passed, [(name, ok, detail), ...])."""
    results = []
    for chk in ALL_CHECKS:
        if fast and chk in (check_gradient_fd, check_hessian_fd):
            results.append(chk(n_samples=10))
        elif fast and chk is check_block_closed_form:
            results.append(chk(n_samples=100))
        else:
            results.append(chk())
    return all(ok for _, ok, _ in results), results
