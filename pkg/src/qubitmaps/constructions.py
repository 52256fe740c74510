"""Closed-form reduced maps of the XX models and the Gibbs-preserving solver.

Field convention for the two-qubit closed forms: ``h``, ``h1`` and ``h2``
multiply ``Z`` directly (``H_S = h1 Z``), so the transverse rotation angle is
``h_plus = h1 + h2``. The matching global Hamiltonian is
``build_xx_hamiltonian_2q(2 * h1, 2 * h2, J)``.

Magnitude convention: ``convention="physical"`` (default) returns the exact
reduced map, identical to :func:`qubitmaps.affine.extract_map` on the model.
``convention="printed"`` returns the widely quoted tabulated form of the
two-qubit maps, whose shift and transformation entries are all half of the
physical ones. Only the physical form is a valid channel in general.

Time enters through ``J t`` and ``h t``; every constructor takes ``t``
(default 1).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .affine import AffineMap, extract_map
from .core import (
    as_bloch,
    bloch_to_density,
    correlated_state,
    correlation_operator,
    expm_hermitian,
    gibbs_bloch,
    kron,
)
from .u1 import build_general_u1_2q, build_xx_hamiltonian_2q, build_xx_hamiltonian_3q

SQRT2 = np.sqrt(2.0)
CONVENTIONS = ("physical", "printed")


def _finish(tau, T, convention):
    m = AffineMap(tau, T)
    if convention == "physical":
        return m
    if convention == "printed":
        return m.scaled(0.5)
    raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


@dataclass(frozen=True)
class TwoQubitParams:
    J: float
    h1: float = 0.0
    h2: float = 0.0

    @property
    def h_minus(self):
        return self.h1 - self.h2

    @property
    def h_plus(self):
        return self.h1 + self.h2

    @property
    def theta(self):
        return float(np.hypot(self.J, self.h_minus))

    def scaled(self, t):
        return TwoQubitParams(self.J * t, self.h1 * t, self.h2 * t)


@dataclass(frozen=True)
class ThreeQubitParams:
    """Star model S-E, S-R with environment ``(0, 0, b3)`` and resource ``f``."""

    J: float
    h: float
    b3: float
    f1: float = 0.0
    f2: float = 0.0
    f3: float = 0.0

    def __post_init__(self):
        if abs(self.b3) > 1:
            raise ValueError(f"|b3| = {abs(self.b3)} exceeds 1")
        norm = np.sqrt(self.f1 ** 2 + self.f2 ** 2 + self.f3 ** 2)
        if norm > 1 + 1e-12:
            raise ValueError(f"resource Bloch vector has norm {norm:.6g} > 1")

    @property
    def f(self):
        return np.array([self.f1, self.f2, self.f3])

    def scaled(self, t):
        return ThreeQubitParams(self.J * t, self.h * t, self.b3, self.f1, self.f2, self.f3)

    # compact notation, all at the stored (J, h)
    @property
    def s_J(self):
        return np.sin(SQRT2 * self.J)

    @property
    def c_J(self):
        return np.cos(SQRT2 * self.J)

    @property
    def s_2J(self):
        return np.sin(2 * SQRT2 * self.J)

    @property
    def c_2J(self):
        return np.cos(2 * SQRT2 * self.J)

    @property
    def s_4J(self):
        return np.sin(4 * SQRT2 * self.J)

    @property
    def c_4J(self):
        return np.cos(4 * SQRT2 * self.J)

    @property
    def s_2h(self):
        return np.sin(2 * self.h)

    @property
    def c_2h(self):
        return np.cos(2 * self.h)

    @property
    def A(self):
        bf = self.b3 * self.f3
        return 4 * (bf + 1) * self.c_2J - (bf - 1) * (self.c_4J + 3)

    @property
    def omega1(self):
        return self.f1 * self.s_2h + self.f2 * self.c_2h

    @property
    def omega2(self):
        return self.f2 * self.s_2h - self.f1 * self.c_2h

    @property
    def B1(self):
        return SQRT2 * self.b3 * self.s_J ** 3 * self.c_J

    @property
    def B2(self):
        return SQRT2 * self.s_J * self.c_J ** 3

    @property
    def phi_plus(self):
        return self.c_2h / 8

    @property
    def phi_minus(self):
        return self.s_2h / 8


# -- two-qubit XX family --------------------------------------------------------

def phi_E_general(p, b, c=None, t=1.0, convention="physical", check_state=True):
    """Reduced map for general fields, environment ``b`` and correlations ``c``.

    ``c[i, j]`` are the connected correlation coefficients: the initial state
    is ``rho_S (x) rho_E + (1/4) sum c_ij s_i (x) s_j``. With ``check_state``
    the state with a maximally mixed system must be positive.
    """
    b = as_bloch(b)
    c = np.zeros((3, 3)) if c is None else np.asarray(c, dtype=float).reshape(3, 3)
    if check_state:
        correlated_state(np.zeros(3), b, c)
    q = p.scaled(t)
    J, hm, hp, th = q.J, q.h_minus, q.h_plus, q.theta
    b1, b2, b3 = b
    if th == 0:
        return _finish(np.zeros(3), [[1, 0, 0], [0, 1, 0], [0, 0, 1]], convention)
    s, co = np.sin(th), np.cos(th)
    sh, ch = np.sin(hp), np.cos(hp)
    k = J / th  # mixing amplitude ratio
    d = hm / th  # detuning ratio
    tau = [
        k * s * (c[2, 0] * sh + c[2, 1] * ch),
        k * s * (c[2, 1] * sh - c[2, 0] * ch),
        k * s ** 2 * (k * b3 + d * (c[0, 0] + c[1, 1])) + k * (c[1, 0] - c[0, 1]) * s * co,
    ]
    diag = co * ch - d * s * sh
    off = d * s * ch + co * sh
    T = [
        [diag, -off, k * s * (b1 * sh + b2 * ch)],
        [off, diag, k * s * (b2 * sh - b1 * ch)],
        [k * s * (b1 * d * s - b2 * co), k * s * (b1 * co + b2 * d * s), 1 - k ** 2 * s ** 2],
    ]
    return _finish(tau, T, convention)


def phi_pc(J, h, b3, t=1.0, convention="physical"):
    """Phase-covariant partial swap with a diagonal environment ``(0, 0, b3)``."""
    if abs(b3) > 1:
        raise ValueError(f"|b3| = {abs(b3)} exceeds 1")
    th, hp = J * t, 2 * h * t
    s, c = np.sin(th), np.cos(th)
    T = [[c * np.cos(hp), -c * np.sin(hp), 0], [c * np.sin(hp), c * np.cos(hp), 0], [0, 0, c ** 2]]
    return _finish([0, 0, b3 * s ** 2], T, convention)


def phi_env_coherent(J, h, b, t=1.0, convention="physical"):
    """Matched-field XX map with a coherent environment ``b``."""
    b1, b2, b3 = as_bloch(b)
    if np.linalg.norm([b1, b2, b3]) > 1 + 1e-12:
        raise ValueError("environment Bloch vector lies outside the Bloch ball")
    th, hp = J * t, 2 * h * t
    s, c = np.sin(th), np.cos(th)
    sh, ch = np.sin(hp), np.cos(hp)
    T = [
        [c * ch, -c * sh, s * (b1 * sh + b2 * ch)],
        [c * sh, c * ch, s * (b2 * sh - b1 * ch)],
        [-0.5 * b2 * np.sin(2 * th), 0.5 * b1 * np.sin(2 * th), c ** 2],
    ]
    return _finish([0, 0, b3 * s ** 2], T, convention)


def phi_correlated(J, h, b3, c31, c32, c_asym, t=1.0, convention="physical"):
    """Matched-field XX map, diagonal environment, odd-charge correlations.

    ``c31``/``c32`` multiply ``Z (x) X`` / ``Z (x) Y``; ``c_asym = (c21 - c12)/2``.
    """
    th, hp = J * t, 2 * h * t
    s, c = np.sin(th), np.cos(th)
    sh, ch = np.sin(hp), np.cos(hp)
    tau = [
        s * (c31 * sh + c32 * ch),
        s * (c32 * sh - c31 * ch),
        s * (b3 * s + 2 * c_asym * c),
    ]
    T = [[c * ch, -c * sh, 0], [c * sh, c * ch, 0], [0, 0, c ** 2]]
    return _finish(tau, T, convention)


def correlation_matrix(c31=0.0, c32=0.0, c_asym=0.0, c11=0.0, c22=0.0, c13=0.0, c23=0.0, c33=0.0):
    """Assemble a 3x3 connected-correlation matrix with ``c21 = -c12 = c_asym``."""
    c = np.zeros((3, 3))
    c[2, 0], c[2, 1] = c31, c32
    c[1, 0], c[0, 1] = c_asym, -c_asym
    c[0, 0], c[1, 1], c[2, 2] = c11, c22, c33
    c[0, 2], c[1, 2] = c13, c23
    return c


def phi_gp_finetuned(J, h, b, r_g, t=1.0, convention="physical"):
    """Gibbs-preserving two-qubit map from tuned system-environment correlations.

    Returns ``(map, correlations)``. The correlations cancel the shift against
    the ``T[:, 2]`` column: ``c31 = -b1 r_G``, ``c32 = -b2 r_G`` and an
    antisymmetric ``c21 = -c12`` fixing ``tau_z = r_G (1 - T33)``.
    """
    b1, b2, b3 = as_bloch(b)
    gibbs_bloch(r_g)
    th, hp = J * t, 2 * h * t
    s, c = np.sin(th), np.cos(th)
    if abs(s * c) < 1e-12:
        raise ValueError(f"J t = {th:.6g} is a multiple of pi/2; the correlation tuning is singular")
    sh, ch = np.sin(hp), np.cos(hp)
    delta1 = b1 * sh + b2 * ch
    delta2 = b1 * ch - b2 * sh
    if convention == "physical":
        c_asym = 0.5 * (r_g - b3) * s / c
    elif convention == "printed":
        c_asym = 0.5 * (r_g * (1 + s ** 2) - b3 * s ** 2) / (s * c)
    else:
        raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")
    chi = correlation_matrix(c31=-b1 * r_g, c32=-b2 * r_g, c_asym=c_asym)
    scale = 1.0 if convention == "physical" else 0.5
    T = scale * np.array([
        [c * ch, -c * sh, s * delta1],
        [c * sh, c * ch, -s * delta2],
        [-b2 * s * c, b1 * s * c, c ** 2],
    ])
    tau = [-r_g * T[0, 2], -r_g * T[1, 2], r_g * (1 - T[2, 2])]
    return AffineMap(tau, T), chi


def phi_appD_general(phi0, phi1, phi2, alpha, theta, b):
    """Reduced map of :func:`qubitmaps.u1.build_general_u1_2q` with environment ``b``."""
    b1, b2, b3 = as_bloch(b)
    xi = 0.5 * (2 * alpha - phi0 - 2 * phi1 + phi2)
    psi_p = alpha - phi0 + phi1
    psi_m = alpha + phi1 + phi2
    chi = 0.5 * (phi0 + phi2)
    sh, ch = np.sin(theta / 2), np.cos(theta / 2)
    tau = [
        sh * np.sin(chi) * (b1 * np.sin(xi) + b2 * np.cos(xi)),
        sh * np.sin(chi) * (b2 * np.sin(xi) - b1 * np.cos(xi)),
        b3 * sh ** 2,
    ]
    t11 = 0.5 * ch * ((b3 + 1) * np.cos(psi_p) - (b3 - 1) * np.cos(psi_m))
    t12 = 0.5 * ch * ((b3 - 1) * np.sin(psi_m) - (b3 + 1) * np.sin(psi_p))
    T = [
        [t11, t12, sh * np.cos(chi) * (b1 * np.cos(xi) - b2 * np.sin(xi))],
        [-t12, t11, sh * np.cos(chi) * (b1 * np.sin(xi) + b2 * np.cos(xi))],
        [
            -0.5 * np.sin(theta) * (b1 * np.cos(2 * phi1) + b2 * np.sin(2 * phi1)),
            0.5 * np.sin(theta) * (b1 * np.sin(2 * phi1) - b2 * np.cos(2 * phi1)),
            ch ** 2,
        ],
    ]
    return AffineMap(tau, T)


# -- three-qubit model ----------------------------------------------------------

def phi_gp_3qubit(p, t=1.0):
    """Reduced map of S in the star model with E = (0,0,b3) and R = f."""
    q = p.scaled(t)
    A = q.A
    tau = [q.B1 * q.omega1, q.B1 * q.omega2, 0.5 * (q.b3 + q.f3) * q.s_2J ** 2]
    T = [
        [A * q.phi_plus, -A * q.phi_minus, q.B2 * q.omega1],
        [A * q.phi_minus, A * q.phi_plus, q.B2 * q.omega2],
        [-q.f2 * q.s_4J / (2 * SQRT2), q.f1 * q.s_4J / (2 * SQRT2), q.c_2J ** 2],
    ]
    return AffineMap(tau, T)


class Infeasibility(str, enum.Enum):
    SIGN_CONFLICT = "sign_conflict"
    RESOURCE_NORM_EXCEEDED = "resource_norm_exceeded"


@dataclass(frozen=True)
class GpSolution:
    J: float
    f3: float
    feasible: bool
    infeasibility_reason: Optional[Infeasibility] = None
    b3: float = float("nan")
    r_g: float = float("nan")
    t: float = 1.0

    @property
    def max_transverse_resource(self):
        """Largest ``sqrt(f1**2 + f2**2)`` compatible with ``f3``."""
        return float(np.sqrt(max(0.0, 1 - self.f3 ** 2)))

    def params(self, h=0.0, f1=0.0, f2=0.0):
        if not self.feasible:
            raise ValueError(f"constraints are infeasible: {self.infeasibility_reason.value}")
        return ThreeQubitParams(self.J, h, self.b3, f1, f2, self.f3)

    def to_json(self):
        return {
            "b3": self.b3,
            "r_G": self.r_g,
            "t": self.t,
            "J": None if np.isnan(self.J) else self.J,
            "f3": self.f3,
            "feasible": self.feasible,
            "infeasibility_reason": None if self.infeasibility_reason is None else self.infeasibility_reason.value,
            "max_transverse_resource": self.max_transverse_resource if self.feasible else None,
        }


def solve_gp_constraints(b3, r_g, f1=0.0, f2=0.0, t=1.0):
    """Coupling and resource polarisation making the star model Gibbs preserving.

    ``tan^2(sqrt2 J t) = -r_G / b3`` and ``f3 = 2 r_G - b3``. Infeasible when
    ``b3 r_G >= 0`` or when ``(f1, f2, f3)`` leaves the Bloch ball.
    """
    if b3 == 0:
        raise ValueError("b3 = 0 leaves the coupling undetermined")
    if abs(b3) > 1 or abs(r_g) > 1:
        raise ValueError("b3 and r_G must lie in [-1, 1]")
    f3 = 2 * r_g - b3
    ratio = -r_g / b3
    J = np.arctan(np.sqrt(ratio)) / (SQRT2 * t) if ratio >= 0 else float("nan")
    reason = None
    if b3 * r_g >= 0:
        reason = Infeasibility.SIGN_CONFLICT
    elif f1 ** 2 + f2 ** 2 + f3 ** 2 > 1:
        reason = Infeasibility.RESOURCE_NORM_EXCEEDED
    return GpSolution(float(J), float(f3), reason is None, reason, float(b3), float(r_g), float(t))


# -- numerical oracles ----------------------------------------------------------

def two_qubit_model_unitary(p, t=1.0):
    return expm_hermitian(build_xx_hamiltonian_2q(2 * p.h1, 2 * p.h2, p.J), t)


def two_qubit_model_map(p, b, c=None, t=1.0):
    """Reduced map of the two-qubit XX model by brute-force extraction."""
    env = bloch_to_density(b)
    chi = None if c is None else correlation_operator(c)
    return extract_map(two_qubit_model_unitary(p, t), 2, 1, env, chi)


def appD_model_map(phi0, phi1, phi2, alpha, theta, b):
    u = build_general_u1_2q(phi0, phi1, phi2, alpha, theta).matrix
    return extract_map(u, 2, 1, bloch_to_density(b))


def three_qubit_model_unitary(J, h, t=1.0):
    return expm_hermitian(build_xx_hamiltonian_3q(h, J), t)


def three_qubit_model_map(p, t=1.0):
    """Reduced map of S in the star model by brute-force extraction."""
    env = kron(bloch_to_density([0, 0, p.b3]), bloch_to_density(p.f))
    return extract_map(three_qubit_model_unitary(p.J, p.h, t), 3, 1, env)


# -- PC / E / GP comparison set ---------------------------------------------------

def comparison_maps(b3, r_g, h=0.0, f1=0.0, f2=0.0, f3_e=0.0, t=1.0):
    """The three star-model maps compared in the thermodynamic diagnostics.

    All share the coupling ``J`` solved for ``(b3, r_G)``:

    * ``PC``: resource ``(0, 0, f3)``, a thermal operation fixing ``r_G``;
    * ``GP``: resource ``(f1, f2, f3)``, Gibbs preserving with coherence;
    * ``E``: resource ``(f1, f2, f3_e)``, the same coherent resource without
      the Gibbs-preserving tuning of its polarisation.

    Raises ``ValueError`` when the constraints are infeasible; the solution is
    returned alongside so callers can report the reason first.
    """
    sol = solve_gp_constraints(b3, r_g, f1, f2, t)
    if not sol.feasible:
        raise ValueError(f"constraints are infeasible: {sol.infeasibility_reason.value}")
    maps = {
        "PC": phi_gp_3qubit(sol.params(h), t),
        "E": phi_gp_3qubit(ThreeQubitParams(sol.J, h, b3, f1, f2, f3_e), t),
        "GP": phi_gp_3qubit(sol.params(h, f1, f2), t),
    }
    return maps, sol
