"""Built-in fixtures: the toolkit's worked examples as runnable jobs.

Each fixture carries construction notes, including flags for places where
commonly printed closed forms disagree with what the definitions give;
the toolkit always reports the computed result and notes the discrepancy.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import JobConfig


@dataclass(frozen=True)
class Fixture:
    name: str
    summary: str
    notes: tuple

    def config(self) -> JobConfig:
        return JobConfig.from_dict(_CONFIGS[self.name])


_CONFIGS = {
    "scaling-group": {
        "n": 1,
        "params": {"m": 1.0},
        "hamiltonian": "p1^2/(2*m)",
        "generator": "q1*p1 - t*p1^2/m",
        "family": [
            "q1*exp(s) - (t*p1/m)*(exp(s) - exp(-s))",
            "p1*exp(-s)",
        ],
        "expected_k": "p1^2/(2*m) - (p1^2/(2*m))*(1 - exp(-2*s))",
        "checks": [
            "brackets", "symplectic", "time-canonical", "recover-k",
            "flow-match", "group-law", "generator-extract", "invariance",
            "noether-forward", "noether-reverse", "infinitesimal-scaling",
        ],
        "tolerances": {
            "brackets": 1e-12,
            "symplectic": 1e-12,
            "time-canonical": 1e-10,
            "flow-match": 1e-8,
            "invariance": 1e-10,
        },
    },
    "oscillator-rotation": {
        "n": 2,
        "params": {"m": 1.0, "w": 1.0},
        "hamiltonian": "(p1^2 + p2^2)/(2*m) + m*w^2*(q1^2 + q2^2)/2",
        "generator": "q1*p2 - q2*p1",
        "family": [
            "q1*cos(s) - q2*sin(s)",
            "q2*cos(s) + q1*sin(s)",
            "p1*cos(s) - p2*sin(s)",
            "p2*cos(s) + p1*sin(s)",
        ],
        "expected_k": "(p1^2 + p2^2)/(2*m) + m*w^2*(q1^2 + q2^2)/2",
        "checks": [
            "brackets", "symplectic", "time-canonical", "recover-k",
            "flow-match", "group-law", "generator-extract", "invariance",
            "noether-forward", "noether-reverse", "infinitesimal-scaling",
        ],
        "tolerances": {
            "brackets": 1e-12,
            "symplectic": 1e-12,
            "time-canonical": 1e-10,
            "flow-match": 1e-8,
            "invariance": 1e-10,
        },
    },
    "smorodinsky-winternitz": {
        "n": 2,
        "params": {"k": 0.5, "c": 1.0},
        "hamiltonian": "(p1^2 + p2^2)/2 + k*(q1^2 + q2^2) + c/q1^2",
        "generator": "p2^2 + 2*k*q2^2",
        "family": [
            "q1",
            "p2*sin(sqrt(8*k)*s)/sqrt(2*k) + q2*cos(sqrt(8*k)*s)",
            "p1",
            "p2*cos(sqrt(8*k)*s) - sqrt(2*k)*q2*sin(sqrt(8*k)*s)",
        ],
        "checks": [
            "brackets", "symplectic", "flow-match", "group-law",
            "generator-extract", "invariance", "noether-forward",
            "noether-reverse",
        ],
        "sampling": {
            "exclude": [{"expr": "q1", "low": -0.1, "high": 0.1}],
        },
        "tolerances": {
            "brackets": 1e-12,
            "symplectic": 1e-12,
            "flow-match": 1e-7,
            "invariance": 1e-9,
        },
    },
    "driven-particle": {
        "n": 1,
        "params": {"m": 1.0, "k": 1.0},
        "hamiltonian": "p1^2/(2*m) - k*t*q1",
        "generator": "q1 - t*p1/m + k*t^3/(3*m)",
        "family": ["q1 - t*s/m", "p1 - s"],
        "expected_k": "p1^2/(2*m) - k*t*q1 - s*p1/m",
        "checks": [
            "brackets", "symplectic", "time-canonical", "recover-k",
            "flow-match", "group-law", "generator-extract", "invariance",
            "noether-forward", "noether-reverse",
        ],
        "tolerances": {
            "brackets": 1e-12,
            "symplectic": 1e-12,
            "time-canonical": 1e-10,
            "flow-match": 1e-9,
            "invariance": 1e-10,
            "noether-forward": 1e-12,
        },
    },
    "identity-f2": {
        "n": 1,
        "hamiltonian": "p1^2/2 + q1^2/2",
        "f2": "q1*p1",
        "checks": ["brackets", "symplectic", "invariance"],
        "tolerances": {
            "brackets": 1e-12,
            "symplectic": 1e-12,
            "invariance": 1e-12,
        },
    },
    "infinitesimal-scaling": {
        "n": 1,
        "params": {"m": 1.0},
        "hamiltonian": "p1^2/(2*m)",
        "generator": "q1*p1 - t*p1^2/m",
        "checks": ["infinitesimal-scaling", "noether-forward"],
    },
}


FIXTURES = (
    Fixture(
        "scaling-group",
        "One-parameter scaling group Q = q e^s - (tp/m)(e^s - e^{-s}), "
        "P = p e^{-s}, generated by f = qp - tp^2/m.",
        (
            "The generator satisfies dQ/ds|0 = df/dp and dP/ds|0 = -df/dq; "
            "printed forms of this equation pair sometimes repeat the Q line "
            "for P, which is a typo.",
            "The pullback defect of the symplectic form is "
            "(p/m)(1 - e^{-2s}) dp^dt; a commonly printed closed form omits "
            "the factor e^{-s} from dP = e^{-s} dp and reports "
            "(p/m)(e^s - e^{-s}) dp^dt instead.  The toolkit reports the "
            "line-integral result J = (p^2/2m)(1 - e^{-2s}), cross-checked "
            "by finite differences and by transforming Hamilton's equations.",
            "The same printed derivation states K = H - (p/m)(e^s - e^{-s}) "
            "+ g(t,s); integrating its own covector would give "
            "(p^2/2m)(e^s - e^{-s}), and the computed value is "
            "(p^2/2m)(1 - e^{-2s}).",
        ),
    ),
    Fixture(
        "oscillator-rotation",
        "Rotation group of the 2D isotropic oscillator, generated by the "
        "angular momentum f = x p_y - y p_x.",
        (
            "Time-independent invariance group: H(Psi_s(x)) = H(x) and "
            "Psi_s preserves the symplectic form exactly.",
        ),
    ),
    Fixture(
        "smorodinsky-winternitz",
        "Separation constant T = p_y^2 + 2k y^2 of the superintegrable "
        "system H = (p_x^2 + p_y^2)/2 + k(x^2 + y^2) + c/x^2.",
        (
            "The flow of X_T oscillates in (y, p_y) with frequency "
            "sqrt(8k) and leaves H invariant.",
            "The c/x^2 pole is guarded by the exclusion |x| < 0.1 on "
            "sample grids.",
        ),
    ),
    Fixture(
        "driven-particle",
        "Linearly driven particle H = p^2/(2m) - ktq with time-dependent "
        "constant of motion g = q - tp/m + kt^3/(3m); flow Q = q - ts/m, "
        "P = p - s.",
        (
            "The Hamiltonian is sometimes printed with a linear kinetic "
            "term p/(2m); the quadratic form p^2/(2m) is required for g to "
            "be a constant of motion and matches the stated equations of "
            "motion, so it is used here.",
        ),
    ),
    Fixture(
        "identity-f2",
        "Type-2 generating function F2 = qP, which induces the identity "
        "transformation.",
        (
            "Newton's solve converges at the initial guess P = p; the "
            "induced map is canonical and leaves any Hamiltonian invariant.",
        ),
    ),
    Fixture(
        "infinitesimal-scaling",
        "Infinitesimal canonical transformation of the scaling generator: "
        "Q = q + eps(q - 2tp/m), P = p - eps p.",
        (
            "Its symplectic defect scales as eps^2; the defect/eps^2 ratio "
            "is stable across halvings of eps.",
        ),
    ),
)


def list_examples() -> tuple:
    """Stable list of built-in fixtures with their notes."""
    return FIXTURES


def get_fixture(name: str) -> Fixture:
    for fixture in FIXTURES:
        if fixture.name == name:
            return fixture
    raise KeyError(f"no fixture named {name!r}")
