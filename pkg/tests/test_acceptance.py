"""Acceptance suite: every criterion at its stated tolerance.

Each criterion prints one ``[PASS]``/``[FAIL]`` line (run pytest with -s
to see them inline; they also appear in captured output).

Criterion 2 has three parts; the third pins the recovered new-Hamiltonian
gradient to grad(H - (p^2/2)(e^s - e^{-s})).  That expected value is
inconsistent: the pullback defect of the map is
(p/m)(e^s - e^{-s}) e^{-s} dp^dt, the e^{-s} coming from dP = e^{-s} dp,
so the line-integrated J is (p^2/2m)(1 - e^{-2s}).  Three independent
routes (hand differentiation, the finite-difference pullback oracle, and
transforming Hamilton's equations for H = p^2/2m, which forces
K = P^2/2m + g(t)) give the same answer, and the stated value would also
break the criterion-7 equivalence chain for this very fixture.  The test
asserts the stated value anyway and therefore fails; the companion test
asserts the computed value at the same tolerance and passes.
"""

import math
import time

import numpy as np
import pytest

from cantrans import (MapFamily, PhasePoint, ScalarField, Type2GeneratingMap,
                      bracket_canonicity, check_group_law, constancy_residual,
                      equivalence_chain, fd_gradient, flow_map, gradient,
                      hamiltonian_vector_field, infinitesimal_map,
                      integrate_flow, invariance_defect, map_from_f2,
                      mixed_covector, mixed_covector_asymmetry,
                      noether_reverse, poisson_bracket, symmetry_defect,
                      symplectic_defect, time_dependent_canonicity)
from cantrans.sampling import halton


def report(criterion: str, passed: bool, detail: str):
    print(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")


def sample_box(n, count, seed_offset=0, t_range=(0.0, 2.0)):
    """100-point style seeded quasi-random sample in [-2, 2]^2n x t_range."""
    pts = halton(2 * n + 1, count, start=20 + seed_offset)
    out = []
    for row in pts:
        z = -2.0 + 4.0 * row[: 2 * n]
        t = t_range[0] + (t_range[1] - t_range[0]) * row[2 * n]
        out.append(PhasePoint(tuple(z[:n]), tuple(z[n:]), t))
    return out


SCALING_FAMILY = (["q1*exp(s) - (t*p1/m)*(exp(s) - exp(-s))"], ["p1*exp(-s)"])


@pytest.fixture(scope="module")
def scaling_family():
    return MapFamily.from_sources(*SCALING_FAMILY, 1, {"m": 1.0})


# --------------------------------------------------------------------------
# criterion 1: scaling-group flow against the closed form, under 1 second


def test_criterion_1_scaling_flow(scaling_generator):
    start = time.perf_counter()
    x0 = PhasePoint((1.5,), (-0.7,), 2.0)
    worst = 0.0
    for s in (0.5, -0.5, 1.0, -1.0):
        steps = max(1000, math.ceil(1000 * abs(s)))
        end = integrate_flow(scaling_generator, x0, s, steps=steps)
        es, ems = math.exp(s), math.exp(-s)
        Q = 1.5 * es - 2.0 * (-0.7) * (es - ems)
        P = -0.7 * ems
        worst = max(worst, abs(end.q[0] - Q), abs(end.p[0] - P))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-8 and elapsed < 1.0
    report("criterion 1 (scaling flow)",
           ok, f"max closed-form gap {worst:.3e} (tol 1e-8), "
               f"runtime {elapsed:.3f}s (< 1s)")
    assert worst < 1e-8
    assert elapsed < 1.0


# --------------------------------------------------------------------------
# criterion 2: time-dependent canonicity of the scaling map


def _scaling_sample(scaling_family, count=100):
    points = sample_box(1, count)
    s_values = (-1.0, -0.5, 0.5, 1.0)
    return [(points[i], s_values[i % 4]) for i in range(count)]


def test_criterion_2_symplectic_defect(scaling_family):
    worst = max(symplectic_defect(scaling_family.at(s), x)
                for x, s in _scaling_sample(scaling_family))
    report("criterion 2a (fixed-t symplectic defect)", worst < 1e-12,
           f"max defect {worst:.3e} (tol 1e-12, 100 points)")
    assert worst < 1e-12


def test_criterion_2_mixed_asymmetry(scaling_family):
    worst = max(mixed_covector_asymmetry(scaling_family.at(s), x)
                for x, s in _scaling_sample(scaling_family))
    report("criterion 2b (mixed-covector asymmetry)", worst < 1e-10,
           f"max asymmetry {worst:.3e} (tol 1e-10, 100 points)")
    assert worst < 1e-10


def _recovered_k_gradient_gap(scaling_family, free_particle, j_of_p_s):
    """Max gap between the recovered grad K and grad(H - J) for the given
    J(p, s), over sampled points and parameters."""
    worst = 0.0
    for x, s in _scaling_sample(scaling_family, count=40):
        phi = scaling_family.at(s)
        grad_k = gradient(free_particle, x)[:2] - mixed_covector(phi, x)
        p = x.p[0]
        h = 1e-6
        expected = np.array([0.0,
                             p - (j_of_p_s(p + h, s) - j_of_p_s(p - h, s))
                             / (2 * h)])
        worst = max(worst, float(np.max(np.abs(grad_k - expected))))
    return worst


def test_criterion_2_recovered_k_gradient_as_stated(scaling_family,
                                                    free_particle):
    # as stated: J = (p^2/2)(e^s - e^{-s}); inconsistent with the map's
    # actual pullback defect (see module docstring), so this fails
    gap = _recovered_k_gradient_gap(
        scaling_family, free_particle,
        lambda p, s: 0.5 * p * p * (math.exp(s) - math.exp(-s)))
    report("criterion 2c (grad K vs stated (p^2/2)(e^s - e^{-s}))",
           gap < 1e-7,
           f"max gradient gap {gap:.3e} (tol 1e-7); the stated closed form "
           f"omits the e^{{-s}} factor from dP = e^{{-s}} dp")
    assert gap < 1e-7


def test_criterion_2_recovered_k_gradient_computed_form(scaling_family,
                                                        free_particle):
    # the computed J = (p^2/2)(1 - e^{-2s}) passes at the same tolerance
    gap = _recovered_k_gradient_gap(
        scaling_family, free_particle,
        lambda p, s: 0.5 * p * p * (1.0 - math.exp(-2.0 * s)))
    report("criterion 2c' (grad K vs computed (p^2/2)(1 - e^{-2s}))",
           gap < 1e-7, f"max gradient gap {gap:.3e} (tol 1e-7)")
    assert gap < 1e-7


def test_criterion_2_j_value_cross_checks(scaling_family, free_particle):
    # the line-integrated J agrees with (p^2/2)(1 - e^{-2s}) and with the
    # new Hamiltonian read off transformed Hamilton's equations
    from cantrans import recover_new_hamiltonian

    s = 1.0
    phi = scaling_family.at(s)
    t = 2.0
    ref = PhasePoint((0.4,), (0.0,), t)
    x = PhasePoint((1.5,), (-0.7,), t)
    rec = recover_new_hamiltonian(phi, free_particle, x, ref)
    expected = 0.5 * 0.49 * (1.0 - math.exp(-2.0))
    assert rec.j_value == pytest.approx(expected, abs=1e-12)
    # Hamilton's equations route: K = P^2/2 + g(t) means
    # grad_z K = (0, P dP/dp) = (0, p e^{-2s})
    grad_expected = np.array([0.0, x.p[0] * math.exp(-2.0 * s)])
    assert np.max(np.abs(rec.grad_z - grad_expected)) < 1e-13


# --------------------------------------------------------------------------
# criterion 3: oscillator rotation fixture


def test_criterion_3_oscillator(oscillator_2d, angular_momentum):
    worst_flow = 0.0
    worst_defect = 0.0
    worst_inv = 0.0
    points = sample_box(2, 20, seed_offset=7)
    for s in (0.3, 0.9, math.pi / 2):
        fam = MapFamily.from_sources(
            ["q1*cos(s) - q2*sin(s)", "q2*cos(s) + q1*sin(s)"],
            ["p1*cos(s) - p2*sin(s)", "p2*cos(s) + p1*sin(s)"], 2)
        phi = fam.at(s)
        for x in points[:6]:
            end = integrate_flow(angular_momentum, x, s, steps=1000)
            closed = phi(x)
            worst_flow = max(worst_flow,
                             float(np.max(np.abs(end.z() - closed.z()))))
        for x in points:
            worst_defect = max(worst_defect, symplectic_defect(phi, x))
            worst_inv = max(worst_inv,
                            abs(oscillator_2d.value(phi(x))
                                - oscillator_2d.value(x)))
    ok = worst_flow < 1e-8 and worst_defect < 1e-10 and worst_inv < 1e-10
    report("criterion 3 (oscillator rotation)", ok,
           f"flow gap {worst_flow:.3e} (1e-8), defect {worst_defect:.3e} "
           f"(1e-10), invariance {worst_inv:.3e} (1e-10)")
    assert worst_flow < 1e-8
    assert worst_defect < 1e-10
    assert worst_inv < 1e-10


# --------------------------------------------------------------------------
# criterion 4: Smorodinsky-Winternitz fixture


def test_criterion_4_smorodinsky_winternitz():
    k, c = 0.5, 1.0
    H = ScalarField.from_source(
        "(p1^2 + p2^2)/2 + k*(q1^2 + q2^2) + c/q1^2", 2, {"k": k, "c": c})
    T = ScalarField.from_source("p2^2 + 2*k*q2^2", 2, {"k": k})
    w = math.sqrt(8 * k)
    points = [x for x in sample_box(2, 60, seed_offset=3)
              if abs(x.q[0]) >= 0.1]
    worst_flow = 0.0
    for s in (0.3, -0.6):
        for x in points[:6]:
            end = integrate_flow(T, x, s, steps=1000)
            y, py = x.q[1], x.p[1]
            closed = np.array([
                x.q[0],
                py * math.sin(w * s) / math.sqrt(2 * k) + y * math.cos(w * s),
                x.p[0],
                py * math.cos(w * s) - math.sqrt(2 * k) * y * math.sin(w * s),
            ])
            worst_flow = max(worst_flow,
                             float(np.max(np.abs(end.z() - closed))))
    fam = MapFamily.from_sources(
        ["q1", "p2*sin(sqrt(8*k)*s)/sqrt(2*k) + q2*cos(sqrt(8*k)*s)"],
        ["p1", "p2*cos(sqrt(8*k)*s) - sqrt(2*k)*q2*sin(sqrt(8*k)*s)"],
        2, {"k": k})
    worst_inv = max(invariance_defect(fam.at(s), H, x)
                    for s in (0.3, -0.6, 1.0) for x in points)
    ok = worst_flow < 1e-7 and worst_inv < 1e-9
    report("criterion 4 (Smorodinsky-Winternitz)", ok,
           f"flow gap {worst_flow:.3e} (1e-7, frequency sqrt(8k)={w:g}), "
           f"invariance {worst_inv:.3e} (1e-9, |x| >= 0.1)")
    assert worst_flow < 1e-7
    assert worst_inv < 1e-9


# --------------------------------------------------------------------------
# criterion 5: driven-particle fixture


def test_criterion_5_driven_particle():
    H = ScalarField.from_source("p1^2/(2*m) - k*t*q1", 1, {"m": 1.0, "k": 1.0})
    g = ScalarField.from_source("q1 - t*p1/m + k*t^3/(3*m)", 1,
                                {"m": 1.0, "k": 1.0})
    points = sample_box(1, 50, seed_offset=11)
    worst_const = max(abs(constancy_residual(g, H, x)) for x in points)
    worst_sym = max(symmetry_defect(g, H, x) for x in points)
    worst_flow = 0.0
    for s in (0.7, -1.0):
        for x in points[:8]:
            end = integrate_flow(g, x, s, steps=1000)
            closed = np.array([x.q[0] - x.t * s, x.p[0] - s])
            worst_flow = max(worst_flow,
                             float(np.max(np.abs(end.z() - closed))))
    ok = worst_const < 1e-12 and worst_sym < 1e-10 and worst_flow < 1e-9
    report("criterion 5 (driven particle, quadratic kinetic term)", ok,
           f"constancy {worst_const:.3e} (1e-12), symmetry {worst_sym:.3e} "
           f"(1e-10), flow gap {worst_flow:.3e} (1e-9)")
    assert worst_const < 1e-12
    assert worst_sym < 1e-10
    assert worst_flow < 1e-9


# --------------------------------------------------------------------------
# criterion 6: generating functions


def test_criterion_6_generating_functions(scaling_generator):
    points = sample_box(1, 30, seed_offset=17)
    ident = ScalarField.from_source("q1*p1", 1)
    worst_id = max(float(np.max(np.abs(map_from_f2(ident, x).z() - x.z())))
                   for x in points)

    worst_eps = {}
    for eps in (1e-2, 1e-3):
        f2 = ScalarField.from_source(
            f"q1*p1 + {eps!r}*(q1*p1 - t*p1^2/m)", 1, {"m": 1.0})
        newton_map = Type2GeneratingMap(f2)
        explicit = infinitesimal_map(scaling_generator, eps)
        worst_eps[eps] = max(
            float(np.max(np.abs(newton_map(x).z() - explicit(x).z())))
            for x in points)

    ratios = []
    for eps in (1e-2, 5e-3, 2.5e-3):
        phi = infinitesimal_map(scaling_generator, eps)
        defect = max(symplectic_defect(phi, x) for x in points)
        ratios.append(defect / eps**2)
    mean = sum(ratios) / len(ratios)
    ratio_spread = max(abs(r / mean - 1.0) for r in ratios)

    ok = (worst_id < 1e-12
          and all(worst_eps[e] <= 10 * e**2 for e in worst_eps)
          and ratio_spread < 0.10)
    report("criterion 6 (generating functions)", ok,
           f"identity gap {worst_id:.3e} (1e-12), eps gaps "
           f"{worst_eps[1e-2]:.3e}/{worst_eps[1e-3]:.3e} (<= 10 eps^2), "
           f"defect/eps^2 spread {ratio_spread:.3%} (< 10%)")
    assert worst_id < 1e-12
    for eps, gap in worst_eps.items():
        assert gap <= 10 * eps**2
    assert ratio_spread < 0.10


# --------------------------------------------------------------------------
# criterion 7: Noether equivalence suite


def test_criterion_7_equivalence_chain(free_particle, oscillator_2d,
                                       angular_momentum, scaling_generator):
    H_driven = ScalarField.from_source("p1^2/(2*m) - k*t*q1", 1,
                                       {"m": 1.0, "k": 1.0})
    g_driven = ScalarField.from_source("q1 - t*p1/m + k*t^3/(3*m)", 1,
                                       {"m": 1.0, "k": 1.0})
    H_sw = ScalarField.from_source(
        "(p1^2 + p2^2)/2 + k*(q1^2 + q2^2) + c/q1^2", 2, {"k": 0.5, "c": 1.0})
    T_sw = ScalarField.from_source("p2^2 + 2*k*q2^2", 2, {"k": 0.5})
    sw_sample = [x for x in sample_box(2, 12, seed_offset=23)
                 if abs(x.q[0]) >= 0.1][:4]
    cases = [
        ("scaling", scaling_generator, free_particle, sample_box(1, 4)),
        ("rotation", angular_momentum, oscillator_2d,
         sample_box(2, 4, seed_offset=5)),
        ("separation", T_sw, H_sw, sw_sample),
        ("driven", g_driven, H_driven, sample_box(1, 4, seed_offset=29)),
    ]
    all_ok = True
    details = []
    for name, f, H, sample in cases:
        chain = equivalence_chain(f, H, sample, s_values=(0.5, -0.5),
                                  tol=1e-6, flow_steps=500)
        verdicts = (chain["constant_of_motion"],
                    chain["infinitesimal_symmetry"],
                    chain["group_invariance"],
                    chain["infinitesimal_invariance"])
        unanimous = len(set(verdicts)) == 1 and verdicts[0]
        all_ok = all_ok and unanimous
        details.append(f"{name}: {verdicts}")

    g5 = ScalarField.from_source("q1*p1 - t*p1^2/m + 5*t", 1, {"m": 1.0})
    rep = noether_reverse(g5, free_particle, sample_box(1, 40, seed_offset=31),
                          tol=1e-10)
    c_hat = float(rep.notes[0].split("=")[1])
    c_ok = abs(c_hat - 5.0) < 1e-8 and rep.passed

    report("criterion 7 (Noether equivalence)", all_ok and c_ok,
           "; ".join(details) + f"; c_hat = {c_hat!r} (5.0 +- 1e-8)")
    assert all_ok
    assert c_ok


# --------------------------------------------------------------------------
# criterion 8: property suites under the runtime budget


def test_criterion_8_property_suites(rng, scaling_generator):
    start = time.perf_counter()
    f = ScalarField.from_source("sin(q1)*p1 + t*q1", 1)
    g = ScalarField.from_source("q1^2*p1 - cos(p1)", 1)
    h = ScalarField.from_source("exp(q1/3) + q1*p1^2", 1)
    gh = ScalarField.from_source(
        "(q1^2*p1 - cos(p1)) * (exp(q1/3) + q1*p1^2)", 1)
    points = sample_box(1, 100, seed_offset=41)

    anti = max(abs(poisson_bracket(f, g, x) + poisson_bracket(g, f, x))
               for x in points)
    leib = max(abs(poisson_bracket(f, gh, x)
                   - poisson_bracket(f, g, x) * h.value(x)
                   - g.value(x) * poisson_bracket(f, h, x))
               for x in points)

    def jacobi_term(a, b, c, x):
        n = 1
        ga = gradient(a, x)
        gb, gc = gradient(b, x), gradient(c, x)
        from cantrans import hessian

        hb, hc = hessian(b, x), hessian(c, x)
        z = slice(0, 2 * n)
        grad_bc = (hb[:n, z].T @ gc[n:2 * n] + hc[n:2 * n, z].T @ gb[:n]
                   - hb[n:2 * n, z].T @ gc[:n] - hc[:n, z].T @ gb[n:2 * n])
        return float(ga[:n] @ grad_bc[n:2 * n] - ga[n:2 * n] @ grad_bc[:n])

    jac = max(abs(jacobi_term(f, g, h, x) + jacobi_term(g, h, f, x)
                  + jacobi_term(h, f, g, x)) for x in points)

    fd_gap = max(float(np.max(np.abs(gradient(f, x) - fd_gradient(f, x))))
                 for x in points)

    group = max(check_group_law(scaling_generator,
                                x, 0.4, 0.6).max_residual
                for x in points[:5])

    ident = max(float(np.max(np.abs(flow_map(scaling_generator, 0.0)(x).z()
                                    - x.z())))
                for x in points[:20])
    elapsed = time.perf_counter() - start

    ok = (anti == 0.0 and leib < 1e-10 and jac < 1e-8 and fd_gap < 1e-6
          and group < 1e-7 and ident < 1e-14 and elapsed < 60.0)
    report("criterion 8 (property suites)", ok,
           f"antisymmetry {anti:.1e} (exact), Leibniz {leib:.3e} (1e-10), "
           f"Jacobi {jac:.3e} (1e-8), dual-vs-FD {fd_gap:.3e} (1e-6), "
           f"group law {group:.3e} (1e-7), identity {ident:.3e} (1e-14), "
           f"runtime {elapsed:.1f}s (< 60s)")
    assert anti == 0.0
    assert leib < 1e-10
    assert jac < 1e-8
    assert fd_gap < 1e-6
    assert group < 1e-7
    assert ident < 1e-14
    assert elapsed < 60.0


# --------------------------------------------------------------------------
# the built-in fixtures must pass their full check lists end to end


def test_all_fixtures_pass_under_default_tolerances():
    import json

    from cantrans import list_examples
    from cantrans.runner import run

    failures = []
    for fixture in list_examples():
        doc, code = run(fixture.config())
        if code != 0:
            bad = [c.name for c in doc.checks if not c.passed]
            failures.append(f"{fixture.name}: {bad}")
        # every report must serialize to valid, parseable JSON
        parsed = json.loads(doc.to_json())
        assert parsed["pass"] is (code == 0)
    report("fixtures end-to-end", not failures,
           "all six fixtures pass" if not failures else "; ".join(failures))
    assert not failures
