"""Randomised verification campaigns for the U(1) charge and coherence claims.

Each campaign runs a seeded batch of trials, records the largest violation of
its claim and also runs a deliberately symmetry-breaking control. A control
that does *not* show a violation means the check is vacuous, and the campaign
raises :class:`VacuousCheckError` instead of returning a report.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .affine import (
    extract_map,
    fixed_points,
    gp_residual,
    is_cptp,
    choi_min_eigenvalue,
    pc_deviation,
    phase_covariant_map,
    AffineMap,
)
from .constructions import phi_gp_3qubit, solve_gp_constraints
from .core import SX, bloch_to_density, correlation_operator, expm_hermitian, kron, partial_trace, site_operator
from .pauli import PauliString, all_strings, charge, conjugate_decompose, wrong_charge_weight
from .u1 import random_u1_unitary

CLAIM_TOL = {
    "charge_conservation": 1e-12,
    "no_coherence": 1e-12,
    "even_charge_pc": 1e-12,
    "hierarchy": 1e-10,
}
SEPARATION_MARGIN = 1e-6  # minimum structural deviation of a non-PC map
CONTROL_THRESHOLD = 1e-3


class VacuousCheckError(RuntimeError):
    """The control case of a campaign failed to break the claim."""


@dataclass(frozen=True)
class VerificationReport:
    claim_id: str
    trials: int
    max_violation: float
    passed: bool
    seed: int
    tolerance: float
    control_violation: float
    n_qubits: int = 0

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)


def _report(claim_id, trials, violation, seed, control, n=0):
    tol = CLAIM_TOL[claim_id]
    if not control > CONTROL_THRESHOLD:
        raise VacuousCheckError(
            f"{claim_id}: control violation {control:.3e} did not exceed {CONTROL_THRESHOLD:g}"
        )
    return VerificationReport(claim_id, trials, float(violation), bool(violation < tol), seed, tol, float(control), n)


def _random_diagonal_state(rng):
    p = rng.uniform()
    return np.diag([p, 1 - p]).astype(complex)


def _check_n(n):
    if not 2 <= n <= 4:
        raise ValueError(f"campaigns support 2 <= n <= 4 qubits, got {n}")


def verify_charge_conservation(n=2, trials=1000, seed=0):
    """Conjugating a string by a U(1) unitary never produces the opposite charge."""
    _check_n(n)
    rng = np.random.default_rng(seed)
    strings = all_strings(n)
    worst = 0.0
    for _ in range(trials):
        u = random_u1_unitary(n, rng).matrix
        s = strings[rng.integers(len(strings))]
        # no cutoff: report the true largest wrong-charge coefficient
        worst = max(worst, wrong_charge_weight(conjugate_decompose(u, s, cutoff=0.0), charge(s)))
    # control: an X rotation on site 1 mixes the charge sectors
    control_u = expm_hermitian(site_operator(SX, 1, n), 0.7)
    s = PauliString(("Z",) + ("I",) * (n - 1))
    control = wrong_charge_weight(conjugate_decompose(control_u, s), charge(s))
    return _report("charge_conservation", trials, worst, seed, control, n)


def verify_no_coherence_from_diagonal(n=3, trials=1000, seed=0):
    """Diagonal product inputs stay locally diagonal; the extracted shift has no x/y part."""
    _check_n(n)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        u = random_u1_unitary(n, rng).matrix
        sites = [_random_diagonal_state(rng) for _ in range(n)]
        out = u @ kron(*sites) @ u.conj().T
        for k in range(1, n + 1):
            worst = max(worst, abs(partial_trace(out, n, [k])[0, 1]))
        m = extract_map(u, n, 1, kron(*sites[1:]))
        worst = max(worst, abs(m.tau[0]), abs(m.tau[1]))
    # control: one environment qubit with b1 = 0.5
    control = 0.0
    for _ in range(20):
        u = random_u1_unitary(n, rng).matrix
        env = [_random_diagonal_state(rng) for _ in range(n - 1)]
        env[0] = bloch_to_density([0.5, 0.0, rng.uniform(-0.5, 0.5)])
        m = extract_map(u, n, 1, kron(*env))
        control = max(control, abs(m.tau[0]), abs(m.tau[1]))
    return _report("no_coherence", trials, worst, seed, control, n)


def _corr(c):
    return correlation_operator(np.asarray(c, dtype=float))


def verify_even_charge_correlations_stay_pc(trials=1000, seed=0):
    """Even-charge correlations (XX + YY, XY - YX) leave the transverse shift at zero.

    Also checks that the antisymmetric ``XY - YX`` part moves only ``tau_z``.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        u = random_u1_unitary(2, rng).matrix
        env = bloch_to_density([0, 0, rng.uniform(-1, 1)])
        c_sym, c_asym = rng.uniform(-0.25, 0.25, 2)
        even = np.zeros((3, 3))
        even[0, 0] = even[1, 1] = c_sym
        base = np.zeros((3, 3))
        base[0, 0] = base[1, 1] = c_sym
        even[1, 0], even[0, 1] = c_asym, -c_asym
        m = extract_map(u, 2, 1, env, _corr(even))
        m_sym = extract_map(u, 2, 1, env, _corr(base))
        worst = max(worst, abs(m.tau[0]), abs(m.tau[1]))
        # the antisymmetric part only moves tau_z
        worst = max(worst, np.abs(m.T - m_sym.T).max(), abs(m.tau[0] - m_sym.tau[0]), abs(m.tau[1] - m_sym.tau[1]))
    control = 0.0
    for _ in range(20):
        u = random_u1_unitary(2, rng).matrix
        odd = np.zeros((3, 3))
        odd[2, 0] = 0.2
        m = extract_map(u, 2, 1, bloch_to_density([0, 0, 0.3]), _corr(odd))
        control = max(control, abs(m.tau[0]), abs(m.tau[1]))
    return _report("even_charge_pc", trials, worst, seed, control, 2)


def _random_feasible_gp(rng, coherent=True):
    while True:
        b3 = rng.uniform(-1, 1)
        r_g = -np.sign(b3) * rng.uniform(0, 1)
        f3 = 2 * r_g - b3
        if abs(b3) < 1e-3 or abs(r_g) < 1e-3 or abs(f3) > 0.95:
            continue
        room = np.sqrt(1 - f3 ** 2)
        if coherent:
            rad = rng.uniform(0.2, 1.0) * room
            ang = rng.uniform(0, 2 * np.pi)
            f1, f2 = rad * np.cos(ang), rad * np.sin(ang)
        else:
            f1 = f2 = 0.0
        sol = solve_gp_constraints(b3, r_g, f1, f2)
        if sol.feasible:
            return sol.params(rng.uniform(-np.pi, np.pi), f1, f2), r_g


def verify_hierarchy(trials=200, seed=0):
    """PC maps fix their own thermal state; coherent-resource GP maps are not PC.

    Every sampled map is also required to be CPTP.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        # PC maps from the three-qubit model with an incoherent resource
        p, _ = _random_feasible_gp(rng, coherent=False)
        pc = phi_gp_3qubit(p)
        fp = fixed_points(pc).bloch
        worst = max(worst, gp_residual(pc, fp[2]), pc_deviation(pc), max(0.0, -choi_min_eigenvalue(pc)))
        # PC maps drawn directly from the CP region
        lam_z = rng.uniform(-1, 1)
        tau_z = rng.uniform(-1, 1) * (1 - abs(lam_z))
        lam_max = 0.5 * np.sqrt(max((1 + lam_z) ** 2 - tau_z ** 2, 0))
        direct = phase_covariant_map(rng.uniform(-1, 1) * lam_max, lam_z, tau_z, rng.uniform(0, 2 * np.pi))
        if abs(1 - lam_z) > 1e-6:
            worst = max(worst, gp_residual(direct, tau_z / (1 - lam_z)))
        worst = max(worst, max(0.0, -choi_min_eigenvalue(direct)))
        # coherent resource: Gibbs preserving but not phase covariant
        p, r_g = _random_feasible_gp(rng, coherent=True)
        gp = phi_gp_3qubit(p)
        worst = max(worst, gp_residual(gp, r_g), max(0.0, -choi_min_eigenvalue(gp)))
        if p.f1 ** 2 + p.f2 ** 2 > 0.01:
            worst = max(worst, max(0.0, SEPARATION_MARGIN - pc_deviation(gp)))
    # identity belongs to every class
    ident = AffineMap.identity()
    worst = max(worst, pc_deviation(ident), gp_residual(ident, rng.uniform(-1, 1)))
    if not is_cptp(ident):
        worst = max(worst, 1.0)
    # control: a PC map does not preserve a thermal state other than its fixed point
    p, r_g = _random_feasible_gp(rng, coherent=False)
    control = gp_residual(phi_gp_3qubit(p), -r_g if abs(r_g) > 0.1 else r_g + 0.5)
    return _report("hierarchy", trials, worst, seed, control)


CLAIMS = {
    "charge_conservation": verify_charge_conservation,
    "no_coherence": verify_no_coherence_from_diagonal,
    "even_charge_pc": verify_even_charge_correlations_stay_pc,
    "hierarchy": verify_hierarchy,
}

DEFAULT_TRIALS = {"charge_conservation": 1000, "no_coherence": 1000, "even_charge_pc": 1000, "hierarchy": 200}


def run_claim(claim_id, trials=None, seed=0, n=None):
    if claim_id not in CLAIMS:
        raise KeyError(f"unknown claim {claim_id!r}; available: {', '.join(sorted(CLAIMS))}")
    if trials is None:
        trials = 200 if (n or 0) >= 4 else DEFAULT_TRIALS[claim_id]
    fn = CLAIMS[claim_id]
    if claim_id in ("charge_conservation", "no_coherence"):
        return fn(n=n or (2 if claim_id == "charge_conservation" else 3), trials=trials, seed=seed)
    return fn(trials=trials, seed=seed)
