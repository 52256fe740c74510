"""Single-qubit affine maps ``a -> tau + T a`` and their classification."""
from __future__ import annotations

import io
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import (
    I2,
    SIGMAS,
    TOL,
    _freeze,
    as_bloch,
    bloch_operator,
    check_density_matrix,
    kron,
    operator_to_bloch,
    partial_trace,
    permute_sites,
)


@dataclass(frozen=True)
class AffineMap:
    tau: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=float).reshape(3)
        T = np.asarray(self.T, dtype=float).reshape(3, 3)
        object.__setattr__(self, "tau", _freeze(tau))
        object.__setattr__(self, "T", _freeze(T))

    @classmethod
    def identity(cls):
        return cls(np.zeros(3), np.eye(3))

    @classmethod
    def from_augmented(cls, m):
        m = np.asarray(m, dtype=float)
        if m.shape != (4, 4):
            raise ValueError("augmented map must be 4x4")
        if np.abs(m[0] - [1, 0, 0, 0]).max() > TOL.zero:
            raise ValueError("first row of an augmented map must be (1, 0, 0, 0)")
        return cls(m[1:, 0], m[1:, 1:])

    def augmented(self):
        m = np.zeros((4, 4))
        m[0, 0] = 1.0
        m[1:, 0] = self.tau
        m[1:, 1:] = self.T
        return m

    def __call__(self, a):
        return apply(self, a)

    def __matmul__(self, other):
        return compose(self, other)

    def allclose(self, other, atol=TOL.zero):
        return bool(np.allclose(self.tau, other.tau, rtol=0, atol=atol) and np.allclose(self.T, other.T, rtol=0, atol=atol))

    def scaled(self, factor):
        """Map with both ``tau`` and ``T`` multiplied by ``factor``."""
        return AffineMap(factor * self.tau, factor * self.T)

    def to_json(self):
        return {"tau": self.tau.tolist(), "T": self.T.tolist()}

    @classmethod
    def from_json(cls, data):
        return cls(data["tau"], data["T"])

    def to_csv(self):
        """Four CSV lines of the augmented matrix, 17 significant digits."""
        buf = io.StringIO()
        for row in self.augmented():
            buf.write(",".join(format(float(x), ".17g") for x in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = [[float(x) for x in line.split(",")] for line in text.strip().splitlines()]
        return cls.from_augmented(rows)


def apply(m, a):
    return m.tau + m.T @ as_bloch(a)


def compose(m2, m1):
    """``m2 after m1``."""
    return AffineMap(m2.tau + m2.T @ m1.tau, m2.T @ m1.T)


def iterate(m, a0, n):
    if n < 0:
        raise ValueError("n must be non-negative")
    states = [as_bloch(a0).copy()]
    for _ in range(n):
        states.append(apply(m, states[-1]))
    return states


def z_rotation(alpha):
    """Affine form of ``rho -> U rho U^dagger`` with ``U = exp(-i Z alpha)``."""
    c, s = np.cos(2 * alpha), np.sin(2 * alpha)
    return AffineMap(np.zeros(3), [[c, -s, 0], [s, c, 0], [0, 0, 1]])


def phase_covariant_map(lam, lam_z, tau_z, angle=0.0):
    """``[a1, a2, a3] -> [lam R(angle)(a1, a2), lam_z a3 + tau_z]``."""
    c, s = np.cos(angle), np.sin(angle)
    T = [[lam * c, -lam * s, 0], [lam * s, lam * c, 0], [0, 0, lam_z]]
    return AffineMap([0, 0, tau_z], T)


# -- extraction ---------------------------------------------------------------

def _check_correlations(chi, n, system_site, tol):
    chi = np.asarray(chi, dtype=complex)
    if chi.shape != (2 ** n, 2 ** n):
        raise ValueError(f"correlation operator must be {2 ** n}x{2 ** n}")
    if np.abs(chi - chi.conj().T).max() > tol:
        raise ValueError("correlation operator must be Hermitian")
    others = [k for k in range(1, n + 1) if k != system_site]
    sys_marginal = partial_trace(chi, n, [system_site])
    env_marginal = partial_trace(chi, n, others) if others else np.zeros((1, 1))
    if np.abs(sys_marginal).max() > tol or np.abs(env_marginal).max() > tol:
        raise ValueError(
            "correlation operator must have vanishing marginals (no identity component on the "
            "system or on the environment); otherwise it redefines the product part"
        )
    return chi


def extract_map(u, n, system_site=1, env_state=None, correlations=None, tol=TOL.psd):
    """Reduced affine map of ``system_site`` under the global unitary ``u``.

    The initial state is ``rho_S(a) (x) env_state + correlations`` with the
    system factor inserted at ``system_site`` and ``env_state`` covering the
    remaining sites in increasing order. ``tau`` is the output for ``a = 0``
    and column j of ``T`` is the output for ``e_j`` minus ``tau``.
    """
    u = np.asarray(u, dtype=complex)
    dim = 2 ** n
    if u.shape != (dim, dim):
        raise ValueError(f"unitary of shape {u.shape} does not act on {n} qubits")
    if not 1 <= system_site <= n:
        raise ValueError(f"system_site {system_site} outside 1..{n}")
    if env_state is None:
        env_state = np.eye(2 ** (n - 1), dtype=complex) / 2 ** (n - 1)
    env_state = np.asarray(env_state, dtype=complex)
    if env_state.shape != (dim // 2, dim // 2):
        raise ValueError(f"environment state must be {dim // 2}x{dim // 2}")
    check_density_matrix(env_state, tol, name="environment state")
    chi = None if correlations is None else _check_correlations(correlations, n, system_site, max(tol, TOL.zero))
    # site order after kron is (S, others...); map back to physical order
    order = list(range(2, n + 1))
    order.insert(system_site - 1, 1)

    def output(a):
        rho = permute_sites(kron(bloch_operator(a), env_state), order)
        if chi is not None:
            rho = rho + chi
        out = u @ rho @ u.conj().T
        return operator_to_bloch(partial_trace(out, n, [system_site]))

    tau = output(np.zeros(3))
    T = np.column_stack([output(e) - tau for e in np.eye(3)])
    return AffineMap(tau, T)


# -- complete positivity -------------------------------------------------------

def act_on_operator(m, x):
    """Linear extension of the map to an arbitrary 2x2 operator."""
    x = np.asarray(x, dtype=complex)
    coeff = np.array([np.trace(x)] + [np.trace(s @ x) for s in SIGMAS]) / 2
    out = m.augmented() @ coeff
    return out[0] * I2 + sum(c * s for c, s in zip(out[1:], SIGMAS))


def choi_matrix(m):
    """``sum_ij Phi(|i><j|) (x) |i><j|``; equals twice the Bell projector for the identity."""
    choi = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[i, j] = 1
            choi += np.kron(act_on_operator(m, e), e)
    return choi


def choi_min_eigenvalue(m):
    return float(np.linalg.eigvalsh(choi_matrix(m))[0])


def is_cptp(m, tol=TOL.psd):
    choi = choi_matrix(m)
    # trace over the output factor must return the identity on the input
    tp = np.einsum("ajak->jk", choi.reshape(2, 2, 2, 2))
    return bool(np.linalg.eigvalsh(choi)[0] >= -tol and np.abs(tp - I2).max() < max(tol, TOL.zero))


def pc_cp_inequalities(lam, lam_z, tau_z, tol=0.0):
    """Closed-form complete-positivity test for ``phase_covariant_map(lam, lam_z, tau_z)``."""
    return bool(
        abs(lam_z) + abs(tau_z) <= 1 + tol
        and 4 * lam ** 2 + tau_z ** 2 <= (1 + lam_z) ** 2 + tol
    )


# -- class predicates ----------------------------------------------------------

def pc_deviation(m):
    """Largest violation of the phase-covariant structural form."""
    T, tau = m.T, m.tau
    return float(max(
        abs(tau[0]), abs(tau[1]),
        abs(T[0, 2]), abs(T[1, 2]), abs(T[2, 0]), abs(T[2, 1]),
        abs(T[0, 0] - T[1, 1]), abs(T[0, 1] + T[1, 0]),
    ))


def is_phase_covariant(m, tol=TOL.zero):
    return pc_deviation(m) < tol


def gp_residual(m, r_g):
    g = np.array([0.0, 0.0, r_g])
    return float(np.linalg.norm(apply(m, g) - g))


def is_gibbs_preserving(m, r_g, tol=TOL.zero):
    if abs(r_g) > 1:
        raise ValueError(f"|r_G| = {abs(r_g)} exceeds 1")
    return gp_residual(m, r_g) < tol


def gibbs_preserving_shift(T, r_g):
    """The shift that makes ``(tau, T)`` fix ``(0, 0, r_G)``."""
    T = np.asarray(T, dtype=float)
    return np.array([-T[0, 2] * r_g, -T[1, 2] * r_g, (1 - T[2, 2]) * r_g])


def is_unital(m, tol=TOL.zero):
    return float(np.linalg.norm(m.tau)) < tol


class FixedPoint(NamedTuple):
    bloch: np.ndarray
    physical: bool


class FixedPointFamilyError(ValueError):
    """``I - T`` is singular: the map has a family of fixed points (or none)."""


def fixed_points(m, tol=TOL.zero):
    """Solve ``(I - T) a = tau``; ``physical`` is False when ``|a| > 1``."""
    lhs = np.eye(3) - m.T
    det = np.linalg.det(lhs)
    if abs(det) <= tol:
        raise FixedPointFamilyError(f"I - T is singular (det = {det:.3e}); fixed points form a family")
    a = np.linalg.solve(lhs, m.tau)
    return FixedPoint(a, bool(np.linalg.norm(a) <= 1 + TOL.bloch))


@dataclass(frozen=True)
class MapClassification:
    cptp: bool
    unital: bool
    phase_covariant: bool
    gibbs_preserving_for: Optional[float]
    energy_preserving_origin: bool = False
    choi_min_eigenvalue: float = 0.0

    def to_json(self):
        return {
            "cptp": self.cptp,
            "unital": self.unital,
            "phase_covariant": self.phase_covariant,
            "gibbs_preserving": self.gibbs_preserving_for is not None,
            "gibbs_preserving_for": self.gibbs_preserving_for,
            "energy_preserving_origin": self.energy_preserving_origin,
            "choi_min_eigenvalue": self.choi_min_eigenvalue,
        }


def classify(m, r_g=None, energy_preserving_origin=False, tol=TOL.zero):
    """Class membership of ``m``.

    With ``r_g`` given, ``gibbs_preserving_for`` is ``r_g`` when the map fixes
    that thermal state. Without it the map's own fixed point is used when it
    lies on the z axis inside the Bloch ball.
    """
    gp = None
    if r_g is not None:
        gp = float(r_g) if is_gibbs_preserving(m, r_g, tol) else None
    else:
        try:
            fp = fixed_points(m)
        except FixedPointFamilyError:
            fp = None
        if fp is not None and fp.physical and abs(fp.bloch[0]) < tol and abs(fp.bloch[1]) < tol:
            if is_gibbs_preserving(m, float(np.clip(fp.bloch[2], -1, 1)), max(tol, 1e-10)):
                gp = float(fp.bloch[2])
    return MapClassification(
        cptp=is_cptp(m),
        unital=is_unital(m, tol),
        phase_covariant=is_phase_covariant(m, tol),
        gibbs_preserving_for=gp,
        energy_preserving_origin=energy_preserving_origin,
        choi_min_eigenvalue=choi_min_eigenvalue(m),
    )
