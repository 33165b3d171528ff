"""End-to-end analysis: configuration -> decomposition -> spectra -> verdict.

A StabilityReport bundles every computed quantity next to the case's
reference values (with agreement flags) and serializes to a versioned,
JSON-compatible dict whose floats round-trip bit-exactly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .central import is_central_configuration
from .model import (
    BodyConfiguration,
    PotentialSpec,
    Spectrum,
    angular_frequency_squared,
    moment_of_inertia,
    potential_energy_terms,
    potential_hessian,
)
from .presets import get_case
from .spectrum import (
    CLASSIFY_TOL,
    classify,
    compare_spectra,
    decompose_blocks,
    block_spectrum,
    full_linearization_spectrum,
)
from .symmetry import (
    build_polygon_symmetry_group,
    character_table,
    eigenvalues_by_trace_equations,
)

SCHEMA_VERSION = 1

REFERENCE_AGREE_TOL = 1e-9


class InputError(ValueError):
    """Request cannot be resolved into a valid analysis."""


class ConsistencyError(RuntimeError):
    """Independent computation routes disagree beyond tolerance."""


@dataclass(frozen=True)
class AnalysisRequest:
    case: str | None = None
    alpha: float | None = None
    potential: tuple | None = None        # explicit ((c, a), ...) term list
    masses: tuple | None = None
    positions: tuple | None = None
    compare_tol: float = 1e-9
    classify_tol: float = CLASSIFY_TOL
    with_dynamics: bool = False
    with_timing: bool = False

    def resolve(self):
        """(config, spec, case_definition_or_None)."""
        if self.case is not None:
            try:
                case = get_case(self.case, self.alpha)
            except (KeyError, ValueError) as exc:
                raise InputError(str(exc)) from exc
            spec = case.potential
            if self.potential is not None:
                raise InputError("give either a preset case or a potential")
            return case.configuration(), spec, case
        if self.positions is None:
            raise InputError("need a preset case or explicit positions")
        positions = np.asarray(self.positions, dtype=float)
        masses = (
            np.asarray(self.masses, dtype=float)
            if self.masses is not None
            else np.ones(positions.size // 2)
        )
        try:
            config = BodyConfiguration(masses, positions)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        if self.potential is not None:
            spec = PotentialSpec(tuple(tuple(t) for t in self.potential))
        elif self.alpha is not None:
            spec = PotentialSpec.homogeneous(self.alpha)
        else:
            raise InputError("explicit configurations need a potential or alpha")
        return config, spec, None


def _c(z):
    return {"re": float(np.real(z)), "im": float(np.imag(z))}


def _spectrum_dicts(spectrum, tol=1e-12):
    return [_c(z) for z in spectrum.sorted_values(tol)]


def polygon_group_for(config, tol=1e-8):
    """The dihedral group fixing the configuration, if it is a regular polygon
    (possibly rotated); None otherwise."""
    q = config.points
    radii = np.hypot(q[:, 0], q[:, 1])
    if np.max(np.abs(radii - radii[0])) > tol * radii[0]:
        return None
    if np.max(np.abs(config.masses - config.masses[0])) > tol * config.masses[0]:
        return None
    n = config.n
    if n < 3:
        return None
    base = np.arctan2(q[0, 1], q[0, 0])
    ang = np.arctan2(q[:, 1], q[:, 0])
    expected = base + 2.0 * np.pi * np.arange(n) / n
    delta = np.angle(np.exp(1j * (ang - expected)))
    if np.max(np.abs(delta)) > tol:
        return None
    return build_polygon_symmetry_group(n, axis_angle=base)


@dataclass(frozen=True)
class StabilityReport:
    data: dict

    @property
    def verdict(self):
        return self.data["verdict"]["verdict"]

    @property
    def omega_squared(self):
        return self.data["omega_squared"]["computed"]

    @property
    def matches_oracle(self):
        return self.data["spectra_match"]["matches"]

    @property
    def discrepancies(self):
        return self.data["discrepancies"]

    def to_dict(self):
        return self.data

    @classmethod
    def from_dict(cls, data):
        if data.get("schema_version") != SCHEMA_VERSION:
            raise InputError(
                f"unsupported report schema {data.get('schema_version')!r}"
            )
        return cls(data)

    def render_table(self):
        d = self.data
        lines = []
        req = d["request"]
        title = req.get("case") or "explicit configuration"
        if req.get("alpha") is not None:
            title += f" (alpha={req['alpha']:g})"
        lines.append(f"case: {title}")
        lines.append(f"potential: {d['potential']}")
        om = d["omega_squared"]
        line = f"omega^2: {om['computed']!r}"
        if om.get("reference") is not None:
            tag = "agrees" if om["agrees"] else "DISAGREES"
            sus = ", suspect reference" if om["reference"]["suspect"] else ""
            line += f"   [reference {om['reference']['value']!r}: {tag}{sus}]"
        lines.append(line)
        cen = d["centrality"]
        lines.append(
            f"centrality residual: {cen['residual']:.3e} (tol {cen['tol']:.3e})"
        )
        if d.get("isotypic"):
            lines.append("isotypic components (irrep: eigenvalues x degree):")
            for comp in d["isotypic"]:
                vals = ", ".join(f"{v!r}" for v in comp["eigenvalues"])
                lines.append(
                    f"  {comp['irrep']} (deg {comp['degree']} x mult "
                    f"{comp['multiplicity']}): {vals}"
                )
        lines.append("blocks (lam1, lam2 -> eigenvalues):")
        for blk in d["blocks"]:
            eigs = ", ".join(
                f"{e['re']:+.6f}{e['im']:+.6f}i" for e in blk["eigenvalues"]
            )
            lines.append(f"  ({blk['lam1']:+.6f}, {blk['lam2']:+.6f}): {eigs}")
        for blk in d.get("coupled_blocks", []):
            eigs = ", ".join(
                f"{e['re']:+.6f}{e['im']:+.6f}i" for e in blk["eigenvalues"]
            )
            lines.append(f"  coupled dim {blk['dim']}: {eigs}")
        sm = d["spectra_match"]
        lines.append(
            f"block union vs oracle: max distance {sm['max_distance']:.3e} "
            f"({'ok' if sm['matches'] else 'MISMATCH'} at tol {sm['tol']:g})"
        )
        v = d["verdict"]
        lines.append(
            f"verdict: {v['verdict']} (max Re = {v['max_real_part']:.6e}, "
            f"{v['n_zero']} zero and {v['n_pure_imaginary']} imaginary modes)"
        )
        for note in d["discrepancies"]:
            lines.append(f"note: {note}")
        if d.get("reference_notes"):
            lines.append(f"reference notes: {d['reference_notes']}")
        if d.get("dynamics") is not None:
            dy = d["dynamics"]
            if dy.get("growth_rate") is not None:
                lines.append(
                    f"measured growth rate: {dy['growth_rate']:.6f} vs predicted "
                    f"{dy['predicted_rate']:.6f} "
                    f"(rel err {dy['relative_error']:.2%})"
                )
            lines.append(
                f"equilibrium drift over {dy['drift_periods']:g} periods: "
                f"{dy['equilibrium_drift']:.3e}"
            )
        return "\n".join(lines)


def _close(a, b, tol=REFERENCE_AGREE_TOL):
    return bool(abs(a - b) <= tol * (1.0 + abs(b)))


def run_analysis(request):
    """Execute the full pipeline for one request."""
    t0 = time.perf_counter()
    config, spec, case = request.resolve()
    discrepancies = []

    centrality = is_central_configuration(config, spec)
    if not centrality.is_central:
        raise InputError(
            f"configuration is not central: residual {centrality.residual_norm:.3e}"
        )
    omega2 = angular_frequency_squared(config, spec)

    omega_entry = {"computed": float(omega2), "reference": None, "agrees": None}
    if case is not None:
        ref = case.omega_squared
        agrees = _close(omega2, ref.value)
        omega_entry["reference"] = {
            "value": ref.value, "suspect": ref.suspect, "note": ref.note,
        }
        omega_entry["agrees"] = agrees
        if not agrees:
            discrepancies.append(
                f"omega^2 computed {omega2!r} differs from reference "
                f"{ref.value!r}" + (" (reference flagged suspect)" if ref.suspect else "")
            )

    H = potential_hessian(config, spec)
    entry_check = None
    if case is not None:
        (row, col), ref = case.hessian_entry
        agrees = _close(H[row, col], ref.value, tol=1e-12)
        entry_check = {
            "index": [row, col],
            "computed": float(H[row, col]),
            "reference": {"value": ref.value, "suspect": ref.suspect,
                          "note": ref.note},
            "agrees": agrees,
        }
        if not agrees:
            discrepancies.append(
                f"Hessian entry {(row, col)} computed {float(H[row, col])!r} "
                f"differs from reference {ref.value!r}"
                + (" (reference flagged suspect)" if ref.suspect else "")
            )

    group = polygon_group_for(config)
    isotypic = []
    eigen_reference = None
    if group is not None:
        table = character_table(group)
        deco = eigenvalues_by_trace_equations(H, group, table)
        for comp in deco.components:
            isotypic.append({
                "irrep": comp.irrep,
                "degree": comp.degree,
                "multiplicity": comp.multiplicity,
                "eigenvalues": [float(v) for v in comp.eigenvalues],
            })
        if case is not None:
            computed_multiset = deco.full_multiset()
            ref_multiset = np.sort(np.concatenate([
                np.full(m, rv.value)
                for rv, m in zip(case.hessian_eigenvalues,
                                 case.eigenvalue_multiplicities)
            ]))
            agrees = bool(
                np.max(np.abs(computed_multiset - ref_multiset))
                <= REFERENCE_AGREE_TOL * (1.0 + np.max(np.abs(ref_multiset)))
            )
            eigen_reference = {
                "values": [rv.value for rv in case.hessian_eigenvalues],
                "multiplicities": list(case.eigenvalue_multiplicities),
                "suspect": any(rv.suspect for rv in case.hessian_eigenvalues),
                "agrees": agrees,
            }
            if not agrees:
                discrepancies.append(
                    "reference Hessian eigenvalue list disagrees with direct "
                    "diagonalization; computed values take precedence"
                )

    decomposition = decompose_blocks(config, spec)
    blocks = []
    for pair, blk in zip(decomposition.pairs, decomposition.blocks):
        blocks.append({
            "lam1": float(blk.lam1),
            "lam2": float(blk.lam2),
            "omega": float(blk.omega),
            "eigenvalues": _spectrum_dicts(Spectrum(block_spectrum(blk))),
        })
    coupled = []
    for cb in decomposition.coupled:
        coupled.append({
            "dim": int(cb.dim),
            "eigenvalues": _spectrum_dicts(Spectrum(cb.spectrum())),
        })
    union = decomposition.union_spectrum()

    oracle = full_linearization_spectrum(config, spec)
    match = compare_spectra(union, oracle, tol=request.compare_tol)
    verdict = classify(oracle, tol=request.classify_tol)

    dynamics_entry = None
    if request.with_dynamics:
        dynamics_entry = _dynamics_section(config, spec, oracle, verdict)

    data = {
        "schema_version": SCHEMA_VERSION,
        "request": {
            "case": request.case,
            "alpha": request.alpha,
            "compare_tol": request.compare_tol,
            "classify_tol": request.classify_tol,
        },
        "potential": spec.describe(),
        "configuration": {
            "n": config.n,
            "masses": [float(m) for m in config.masses],
            "positions": [float(x) for x in config.positions],
        },
        "moment_of_inertia": moment_of_inertia(config),
        "potential_terms": [float(u) for u in potential_energy_terms(config, spec)],
        "centrality": {
            "residual": centrality.residual_norm,
            "tol": centrality.tol,
            "multiplier": centrality.multiplier,
        },
        "omega_squared": omega_entry,
        "hessian_entry_check": entry_check,
        "isotypic": isotypic,
        "hessian_eigenvalue_reference": eigen_reference,
        "blocks": blocks,
        "coupled_blocks": coupled,
        "block_union_spectrum": _spectrum_dicts(union),
        "oracle_spectrum": _spectrum_dicts(oracle),
        "spectra_match": {
            "matches": bool(match.matches),
            "max_distance": float(match.max_distance),
            "tol": float(match.tol),
            "scale": float(match.scale),
        },
        "verdict": {
            "verdict": verdict.verdict,
            "max_real_part": verdict.max_real_part,
            "tol": verdict.tol,
            "n_zero": verdict.n_zero,
            "n_pure_imaginary": verdict.n_pure_imaginary,
            "labels": list(verdict.labels),
        },
        "reference_notes": case.notes if case is not None else "",
        "discrepancies": discrepancies,
        "dynamics": dynamics_entry,
        "timing_seconds": (time.perf_counter() - t0) if request.with_timing else 0.0,
    }
    report = StabilityReport(data)
    if not match.matches:
        raise ConsistencyError(
            f"block-union spectrum does not match the oracle "
            f"(max distance {match.max_distance:.3e}); report: "
            f"{report.render_table()}"
        )
    return report


def _dynamics_section(config, spec, oracle, verdict):
    from .dynamics import estimate_growth_rate, integrate_rotating_frame

    omega = float(np.sqrt(angular_frequency_squared(config, spec)))
    period = 2.0 * np.pi / omega
    traj = integrate_rotating_frame(
        config, spec, duration=10.0 * period, dt=period / 2000.0,
        sample_every=50, reference_equilibrium=config.positions,
    )
    drift = float(
        np.max(np.linalg.norm(traj.positions - config.positions[None, :], axis=1))
    )
    entry = {
        "equilibrium_drift": drift,
        "drift_periods": 10.0,
        "growth_rate": None,
        "predicted_rate": None,
        "relative_error": None,
    }
    predicted = verdict.max_real_part
    if predicted > 0.05 * omega:
        direction = _worst_direction(config, spec)
        est = estimate_growth_rate(config, spec, direction)
        entry["growth_rate"] = est.rate if not est.no_growth else 0.0
        entry["predicted_rate"] = predicted
        entry["relative_error"] = (
            abs(est.rate - predicted) / predicted if not est.no_growth else 1.0
        )
    return entry


def _worst_direction(config, spec):
    """Position part of the eigenvector of the largest-real-part eigenvalue."""
    from .spectrum import linearization_matrix

    A = linearization_matrix(config, spec)
    vals, vecs = np.linalg.eig(A)
    k = int(np.argmax(vals.real))
    pos = np.real(vecs[: 2 * config.n, k])
    if np.linalg.norm(pos) < 1e-12:
        pos = np.imag(vecs[: 2 * config.n, k])
    return pos / np.linalg.norm(pos)


@dataclass(frozen=True)
class SweepResult:
    reports: tuple              # (alpha, report-or-None) in grid order
    failures: tuple             # (alpha, message)
    summary: tuple              # (alpha, label of the non-structural pair modes)

    def render_table(self):
        lines = ["alpha   component-1 modes   verdict"]
        verdicts = {a: r.verdict for a, r in self.reports if r is not None}
        for alpha, label in self.summary:
            lines.append(
                f"{alpha:<7g} {label:<19} {verdicts.get(alpha, 'failed')}"
            )
        for alpha, msg in self.failures:
            lines.append(f"{alpha:<7g} FAILED: {msg}")
        return "\n".join(lines)


def run_sweep(base_request, grid):
    """Run the analysis across an alpha grid for a homogeneous case.

    The summary labels the two non-structural eigenvalues of the block
    built on the configuration-direction/rotation pair (the trichotomy
    block): they move from pure-imaginary to zero to real as alpha crosses
    the critical exponent.
    """
    if base_request.potential is not None and len(base_request.potential) != 1:
        raise InputError("alpha sweeps need a single-term potential")
    reports, failures, summary = [], [], []
    for alpha in grid:
        request = AnalysisRequest(
            case=base_request.case,
            alpha=float(alpha),
            masses=base_request.masses,
            positions=base_request.positions,
            compare_tol=base_request.compare_tol,
            classify_tol=base_request.classify_tol,
            with_dynamics=base_request.with_dynamics,
            with_timing=base_request.with_timing,
        )
        try:
            report = run_analysis(request)
        except (InputError, ConsistencyError) as exc:
            failures.append((float(alpha), str(exc)))
            reports.append((float(alpha), None))
            continue
        reports.append((float(alpha), report))
        summary.append((float(alpha), _trichotomy_label(report)))
    return SweepResult(tuple(reports), tuple(failures), tuple(summary))


def _trichotomy_label(report, tol=CLASSIFY_TOL):
    """Label of the non-structural mode pair of the trivial/rotation block."""
    data = report.to_dict()
    if not data["blocks"]:
        return "unknown"
    omega2 = data["omega_squared"]["computed"]
    omega = float(np.sqrt(omega2))
    best, best_err = None, np.inf
    for blk in data["blocks"]:
        err = min(abs(blk["lam1"] + omega2), abs(blk["lam2"] + omega2))
        if err < best_err:
            best, best_err = blk, err
    eigs = np.array([complex(e["re"], e["im"]) for e in best["eigenvalues"]])
    keep = np.argsort(np.abs(eigs))[2:]      # drop the two structural zeros
    labels = set()
    thr = tol * omega
    for s in eigs[keep]:
        small_re, small_im = abs(s.real) <= thr, abs(s.imag) <= thr
        if small_re and small_im:
            labels.add("zero")
        elif small_re:
            labels.add("pure-imaginary")
        elif small_im:
            labels.add("real")
        else:
            labels.add("complex")
    return labels.pop() if len(labels) == 1 else "/".join(sorted(labels))
