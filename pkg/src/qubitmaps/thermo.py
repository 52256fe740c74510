"""Relative entropy, coherence and convergence diagnostics for qubit maps.

Logarithms are natural throughout.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .affine import apply, iterate
from .core import TOL, as_bloch, bloch_to_density, check_density_matrix, gibbs_bloch, hermitian_eig


def relative_entropy(rho, sigma, tol=TOL.psd):
    """``Tr rho (log rho - log sigma)`` in nats; ``math.inf`` if supp(rho) is not in supp(sigma)."""
    rho = check_density_matrix(rho, tol, "rho")
    sigma = check_density_matrix(sigma, tol, "sigma")
    p, u = hermitian_eig(rho)
    q, v = hermitian_eig(sigma)
    p = np.clip(p, 0, None)
    q = np.clip(q, 0, None)
    # overlap[i, j] = |<u_i|v_j>|^2
    overlap = np.abs(u.conj().T @ v) ** 2
    cutoff = max(tol, TOL.zero)
    entropy_term = sum(pi * math.log(pi) for pi in p if pi > cutoff)
    cross = 0.0
    for i, pi in enumerate(p):
        if pi <= cutoff:
            continue
        for j, qj in enumerate(q):
            w = overlap[i, j]
            if w <= cutoff:
                continue
            if qj <= cutoff:
                return math.inf
            cross += pi * w * math.log(qj)
    return max(entropy_term - cross, 0.0)


def delta_D(m, a0, r_g):
    """Relative entropy of the evolved state to the thermal state ``(0, 0, r_G)``."""
    a0 = as_bloch(a0)
    if np.linalg.norm(a0) > 1 + TOL.bloch:
        raise ValueError("initial Bloch vector lies outside the Bloch ball")
    out = apply(m, a0)
    return relative_entropy(bloch_to_density(out, tol=1e-9), bloch_to_density(gibbs_bloch(r_g)))


def l1_coherence(a):
    """``|rho_01| + |rho_10| = sqrt(a1**2 + a2**2)``."""
    a = as_bloch(a)
    return float(np.hypot(a[0], a[1]))


def coherence_trajectory(m, a0, n):
    """l1 coherence along ``a0, m(a0), ..., m^n(a0)``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return [l1_coherence(a) for a in iterate(m, a0, n)]


def trace_distance_norm(a, b):
    """Trace norm ``||rho_a - rho_b||_1`` from the singular values of the difference."""
    diff = 0.5 * np.array(
        [[a[2] - b[2], (a[0] - b[0]) - 1j * (a[1] - b[1])],
         [(a[0] - b[0]) + 1j * (a[1] - b[1]), -(a[2] - b[2])]]
    )
    return float(np.linalg.svd(diff, compute_uv=False).sum())


class Convergence(NamedTuple):
    steps: int
    converged: bool


def convergence_steps(m, a0, eps=1e-8, n_max=10_000):
    """Smallest ``n >= 1`` with ``||rho_{n+1} - rho_n||_1 < eps``.

    A start that is already stationary (``||rho_1 - rho_0||_1 < eps``) counts
    as converged at step 1. Returns ``(n_max, False)`` when nothing converges.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    prev = as_bloch(a0)
    cur = apply(m, prev)
    if trace_distance_norm(cur, prev) < eps:
        return Convergence(1, True)
    for n in range(1, n_max + 1):
        nxt = apply(m, cur)
        if trace_distance_norm(nxt, cur) < eps:
            return Convergence(n, True)
        cur = nxt
    return Convergence(n_max, False)


@dataclass
class Trajectory:
    states: list
    map_label: str = ""
    params: dict = field(default_factory=dict)

    @classmethod
    def generate(cls, m, a0, n, map_label="", params=None):
        return cls(iterate(m, a0, n), map_label, dict(params or {}))

    @property
    def coherence(self):
        return [l1_coherence(a) for a in self.states]

    def to_csv(self):
        buf = io.StringIO()
        buf.write(f"# map={self.map_label}\n")
        for key in sorted(self.params):
            buf.write(f"# {key}={self.params[key]!r}\n")
        buf.write("# columns: step, Bloch components a1 a2 a3, l1 coherence\n")
        buf.write("step,a1,a2,a3,l1_coherence\n")
        for k, a in enumerate(self.states):
            vals = [*a, l1_coherence(a)]
            buf.write(f"{k}," + ",".join(format(float(v), ".17g") for v in vals) + "\n")
        return buf.getvalue()
