"""Execute a job: build the configured objects, run each requested check
over the deterministic sample, and collect a report document.

Exit status convention: 0 all checks pass, 1 any check fails, 2 bad
configuration, 3 a numeric domain error prevented producing a report.
"""

from __future__ import annotations

import numpy as np

from . import canonicity as _canon
from . import symmetry as _sym
from .brackets import hamiltonian_vector_field
from .errors import CantransError
from .flows import (check_group_law, flow_map, infinitesimal_generator,
                    integrate_flow, recover_generator_function)
from .genfun import Type1GeneratingMap, Type2GeneratingMap, infinitesimal_map
from .numdiff import gradient
from .phase import ExprPhaseMap, MapFamily, PhasePoint, ScalarField
from .reports import CheckReport, ReportDocument

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class _Job:
    """Configured objects plus cached samples for one run."""

    def __init__(self, config):
        self.config = config
        self.n = config.n
        self.params = dict(config.params)
        self.plan = config.plan()
        self.points = self.plan.points()
        self.flow_points = self.points[: self.plan.flow_count]
        self.hamiltonian = None
        if config.hamiltonian:
            self.hamiltonian = ScalarField.from_source(
                config.hamiltonian, self.n, self.params)
        self.generator = None
        if config.generator:
            self.generator = ScalarField.from_source(
                config.generator, self.n, self.params)
        self.family = None
        if config.family:
            self.family = MapFamily.from_sources(
                config.family[: self.n], config.family[self.n :],
                self.n, self.params)
        self.expected_k = None
        if config.expected_k:
            self.expected_k = ScalarField.from_source(
                config.expected_k, self.n, self.params)
        self.map_sources = self._build_map_sources()

    def _build_map_sources(self):
        cfg = self.config
        sources = []
        if cfg.map:
            phi = ExprPhaseMap.from_sources(cfg.map[: self.n],
                                            cfg.map[self.n :],
                                            self.n, self.params)
            sources.append(("map", phi, None, False))
        if self.family is not None:
            for s in self.plan.s_values:
                sources.append((f"family@s={s:g}", self.family.at(s), s, False))
        if cfg.f2:
            f2 = ScalarField.from_source(cfg.f2, self.n, self.params)
            sources.append(("f2", Type2GeneratingMap(f2), None, False))
        if cfg.f1:
            f1 = ScalarField.from_source(cfg.f1, self.n, self.params)
            sources.append(
                ("f1", Type1GeneratingMap(f1, cfg.f1_guess), None, False))
        if not sources and self.generator is not None:
            for s in self.plan.s_values:
                phi = flow_map(self.generator, s, jacobian_method="tangent")
                sources.append((f"flow@s={s:g}", phi, s, True))
        return sources

    def sample_for(self, costly: bool):
        return self.flow_points if costly else self.points

    def center_ref(self, t: float) -> PhasePoint:
        mid = [0.5 * (lo + hi) for lo, hi in self.plan.box]
        return PhasePoint(tuple(mid[: self.n]), tuple(mid[self.n :]), t)


def run(config) -> tuple:
    """Run all configured checks; returns (ReportDocument, exit_code)."""
    config.validate()
    job = _Job(config)
    checks = []
    for name in config.checks:
        tol = config.tolerance(name)
        try:
            report = _CHECK_FUNCS[name](job, tol)
        except CantransError as e:
            report = CheckReport(name=name, max_residual=float("inf"),
                                 tolerance=tol, passed=False, samples=0,
                                 notes=[f"error: {type(e).__name__}: {e}"])
        checks.append(report)
    doc = ReportDocument(fixture=None, checks=checks)
    return doc, (EXIT_PASS if doc.passed else EXIT_FAIL)


def _max_over_sources(job, tol, name, residual_fn):
    worst = 0.0
    samples = 0
    notes = []
    for label, phi, s, costly in job.map_sources:
        local = 0.0
        for x in job.sample_for(costly):
            local = max(local, residual_fn(phi, x, s))
            samples += 1
        notes.append(f"{label}: max residual {local:.3e}")
        worst = max(worst, local)
    return CheckReport(name=name, max_residual=worst, tolerance=tol,
                       passed=worst < tol, samples=samples, notes=notes)


def _check_brackets(job, tol):
    def residual(phi, x, s):
        return _canon.bracket_canonicity(phi, x, tol).max_residual

    return _max_over_sources(job, tol, "brackets", residual)


def _check_symplectic(job, tol):
    def residual(phi, x, s):
        return _canon.symplectic_defect(phi, x)

    return _max_over_sources(job, tol, "symplectic", residual)


def _check_time_canonical(job, tol):
    worst_defect = 0.0
    worst_asym = 0.0
    samples = 0
    notes = []
    for label, phi, s, costly in job.map_sources:
        for x in job.sample_for(costly):
            rep = _canon.time_dependent_canonicity(phi, x, tol)
            worst_defect = max(worst_defect, rep.symplectic)
            worst_asym = max(worst_asym, rep.asymmetry)
            samples += 1
    notes.append(f"max fixed-t symplectic defect {worst_defect:.3e}")
    notes.append(f"max mixed-covector asymmetry {worst_asym:.3e}")
    worst = max(worst_defect, worst_asym)
    return CheckReport(name="time-canonical", max_residual=worst,
                       tolerance=tol, passed=worst < tol, samples=samples,
                       notes=notes)


def _check_recover_k(job, tol):
    H = job.hamiltonian
    worst = 0.0
    samples = 0
    notes = []
    for label, phi, s, costly in job.map_sources:
        local = 0.0
        for x in job.sample_for(costly):
            rec_grad = (np.asarray(
                _canon.recover_new_hamiltonian(
                    phi, H, x, job.center_ref(x.t), tol=max(tol, 1e-7)
                ).grad_z))
            if job.expected_k is not None:
                exp_grad = gradient(job.expected_k, x, s)[: 2 * job.n]
                local = max(local, float(np.max(np.abs(rec_grad - exp_grad))))
            else:
                # cross-check the covector against finite differences of the
                # line-integrated J from two reference points
                local = max(local, _fd_j_consistency(job, phi, x, tol))
            samples += 1
        notes.append(f"{label}: max residual {local:.3e}")
        worst = max(worst, local)
    if job.expected_k is not None:
        notes.append("compared against expected new-Hamiltonian gradient")
    return CheckReport(name="recover-k", max_residual=worst, tolerance=tol,
                       passed=worst < tol, samples=samples, notes=notes)


def _fd_j_consistency(job, phi, x, tol, h: float = 1e-5):
    """|FD gradient of the line-integrated J - w| at x, two references."""
    worst = 0.0
    w = _canon.mixed_covector(phi, x)
    refs = [job.center_ref(x.t)]
    shifted = np.asarray(refs[0].z(), dtype=float) + 0.25
    refs.append(refs[0].with_z(shifted))
    H = job.hamiltonian
    for ref in refs:
        for a in range(2 * job.n):
            z_plus, z_minus = x.z(), x.z()
            step = h * max(1.0, abs(x.z()[a]))
            z_plus[a] += step
            z_minus[a] -= step
            j_plus = _canon.recover_new_hamiltonian(
                phi, H, x.with_z(z_plus), ref, tol=max(tol, 1e-7)).j_value
            j_minus = _canon.recover_new_hamiltonian(
                phi, H, x.with_z(z_minus), ref, tol=max(tol, 1e-7)).j_value
            worst = max(worst, abs((j_plus - j_minus) / (2 * step) - w[a]))
    return worst


def _check_flow_match(job, tol):
    worst = 0.0
    samples = 0
    for s in job.plan.s_values:
        for x in job.flow_points:
            end = integrate_flow(job.generator, x, s)
            expected = job.family.value(x, s)
            worst = max(worst, float(np.max(np.abs(end.z() - expected))))
            samples += 1
    return CheckReport(name="flow-match", max_residual=worst, tolerance=tol,
                       passed=worst < tol, samples=samples,
                       notes=["numeric flow against the family closed form"])


def _check_group_law(job, tol):
    s_values = job.plan.s_values
    pairs = [(s_values[0], s_values[-1])]
    if len(s_values) >= 4:
        pairs.append((s_values[1], s_values[-2]))
    worst = 0.0
    samples = 0
    for s1, s2 in pairs:
        for x in job.flow_points:
            rep = check_group_law(job.generator, x, s1, s2, tol=tol)
            worst = max(worst, rep.max_residual)
            samples += 1
    return CheckReport(name="group-law", max_residual=worst, tolerance=tol,
                       passed=worst < tol, samples=samples,
                       notes=[f"parameter pairs {pairs}"])


def _check_generator_extract(job, tol):
    worst = 0.0
    samples = 0
    notes = []
    for x in job.flow_points:
        v = infinitesimal_generator(job.family, x)
        xf = hamiltonian_vector_field(job.generator, x)
        diff = max(float(np.max(np.abs(np.asarray(v.dq) - np.asarray(xf.dq)))),
                   float(np.max(np.abs(np.asarray(v.dp) - np.asarray(xf.dp)))))
        worst = max(worst, diff)
        samples += 1
    notes.append(f"generator field match: max residual {worst:.3e}")
    # recover the generator function along segments from a reference point
    ref = job.flow_points[0]
    rec_worst = 0.0
    for x in job.flow_points[1:5]:
        if x.t != ref.t:
            x = PhasePoint(x.q, x.p, ref.t)
        recovered = recover_generator_function(job.family, x, ref, tol=tol)
        expected = (job.generator.value(x) - job.generator.value(ref))
        rec_worst = max(rec_worst, abs(recovered - expected))
        samples += 1
    notes.append(f"function recovery (up to a constant): max residual "
                 f"{rec_worst:.3e}")
    worst = max(worst, rec_worst)
    return CheckReport(name="generator-extract", max_residual=worst,
                       tolerance=tol, passed=worst < tol, samples=samples,
                       notes=notes)


def _check_invariance(job, tol):
    H = job.hamiltonian

    def residual(phi, x, s):
        return _sym.invariance_defect(phi, H, x, canonicity_tol=max(tol, 1e-7))

    return _max_over_sources(job, tol, "invariance", residual)


def _check_noether_forward(job, tol):
    return _sym.noether_forward(job.generator, job.hamiltonian,
                                job.points, tol)


def _check_noether_reverse(job, tol):
    return _sym.noether_reverse(job.generator, job.hamiltonian,
                                job.points, tol)


def _check_infinitesimal_scaling(job, tol):
    eps_values = (1e-2, 5e-3, 2.5e-3)
    ratios = []
    for eps in eps_values:
        phi = infinitesimal_map(job.generator, eps)
        defect = max(_canon.symplectic_defect(phi, x) for x in job.points)
        ratios.append(defect / eps**2)
    mean = sum(ratios) / len(ratios)
    if mean == 0.0:
        residual = 0.0
    else:
        residual = max(abs(r / mean - 1.0) for r in ratios)
    notes = [f"defect/eps^2 ratios: {[format(r, '.6e') for r in ratios]}"]
    return CheckReport(name="infinitesimal-scaling", max_residual=residual,
                       tolerance=tol, passed=residual < tol,
                       samples=len(job.points) * len(eps_values), notes=notes)


_CHECK_FUNCS = {
    "brackets": _check_brackets,
    "symplectic": _check_symplectic,
    "time-canonical": _check_time_canonical,
    "recover-k": _check_recover_k,
    "flow-match": _check_flow_match,
    "group-law": _check_group_law,
    "generator-extract": _check_generator_extract,
    "invariance": _check_invariance,
    "noether-forward": _check_noether_forward,
    "noether-reverse": _check_noether_reverse,
    "infinitesimal-scaling": _check_infinitesimal_scaling,
}
