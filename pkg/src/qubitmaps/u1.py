"""U(1)-symmetric generators, Hamiltonians and unitaries.

The symmetry generator is ``G = sum_i Z_i``; a unitary is U(1)-symmetric when
it commutes with ``G``, i.e. it is block diagonal in the excitation-number
sectors (``m`` qubits in ``|1>``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .core import SX, SY, SZ, TOL, _freeze, expm_hermitian, num_qubits, site_operator
from .pauli import PauliString


def generator(n):
    """``sum_i Z_i`` on n qubits (diagonal entries ``n - 2 * popcount``)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    weights = [bin(k).count("1") for k in range(2 ** n)]
    return np.diag([float(n - 2 * w) for w in weights]).astype(complex)


def excitation_sectors(n):
    """Basis indices of each excitation sector, lexicographic within a sector."""
    sectors = [[] for _ in range(n + 1)]
    for k in range(2 ** n):
        sectors[bin(k).count("1")].append(k)
    return sectors


def commutator(a, b):
    return a @ b - b @ a


def xx_coupling(i, j, n):
    """``X_i X_j + Y_i Y_j`` between sites i and j."""
    return site_operator(SX, i, n) @ site_operator(SX, j, n) + site_operator(SY, i, n) @ site_operator(SY, j, n)


def build_xx_hamiltonian_2q(h1, h2, J):
    """``(h1/2) Z (x) I + (h2/2) I (x) Z + (J/2)(XX + YY)``."""
    return (
        0.5 * h1 * site_operator(SZ, 1, 2)
        + 0.5 * h2 * site_operator(SZ, 2, 2)
        + 0.5 * J * xx_coupling(1, 2, 2)
    )


def build_xx_hamiltonian_3q(h, J):
    """Star coupling on sites (S, E, R) = (1, 2, 3): S-E and S-R, no E-R term.

    ``H = J sum_{SE,SR}(XX + YY) + h sum_i Z_i``
    """
    zeeman = sum(site_operator(SZ, k, 3) for k in (1, 2, 3))
    return J * (xx_coupling(1, 2, 3) + xx_coupling(1, 3, 3)) + h * zeeman


@dataclass(frozen=True)
class HamiltonianSpec:
    """Named Hamiltonian family.

    ``kind`` is ``xx2q`` (params h1, h2, J), ``xx3q`` (params h, J) or
    ``custom`` (params: Pauli label -> real coefficient).
    """

    kind: str
    params: dict = field(default_factory=dict)

    def matrix(self):
        p = self.params
        if self.kind == "xx2q":
            return build_xx_hamiltonian_2q(p.get("h1", 0.0), p.get("h2", 0.0), p.get("J", 0.0))
        if self.kind == "xx3q":
            return build_xx_hamiltonian_3q(p.get("h", 0.0), p.get("J", 0.0))
        if self.kind == "custom":
            if not p:
                raise ValueError("custom Hamiltonian needs at least one Pauli term")
            terms = [(PauliString.from_label(k), float(v)) for k, v in p.items()]
            n = terms[0][0].n
            if any(s.n != n for s, _ in terms):
                raise ValueError("custom Hamiltonian terms act on different numbers of qubits")
            return sum(c * s.matrix() for s, c in terms)
        raise ValueError(f"unknown Hamiltonian kind {self.kind!r}; expected xx2q, xx3q or custom")

    def unitary(self, t=1.0):
        return expm_hermitian(self.matrix(), t)

    @classmethod
    def parse(cls, text):
        """Parse ``kind:key=value,key=value`` (e.g. ``xx2q:h1=0.5,h2=0.5,J=1``)."""
        kind, _, rest = text.partition(":")
        params = {}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, sep, value = item.partition("=")
            if not sep:
                raise ValueError(f"malformed Hamiltonian parameter {item!r}")
            params[key.strip()] = float(value)
        return cls(kind.strip(), params)


@dataclass(frozen=True)
class U1Unitary:
    matrix: np.ndarray
    n_qubits: int
    block_dims: tuple

    def __post_init__(self):
        object.__setattr__(self, "matrix", _freeze(np.asarray(self.matrix, dtype=complex)))
        object.__setattr__(self, "block_dims", tuple(self.block_dims))
        if self.matrix.shape != (2 ** self.n_qubits,) * 2:
            raise ValueError("matrix size does not match n_qubits")
        if list(self.block_dims) != [comb(self.n_qubits, m) for m in range(self.n_qubits + 1)]:
            raise ValueError("block dimensions must be binomial coefficients")

    @classmethod
    def from_matrix(cls, u, tol=TOL.zero):
        u = np.asarray(u, dtype=complex)
        n = num_qubits(u.shape[0])
        if not is_u1_symmetric(u, tol):
            raise ValueError("matrix does not commute with the U(1) generator")
        return cls(u, n, [comb(n, m) for m in range(n + 1)])

    def blocks(self):
        return [self.matrix[np.ix_(idx, idx)] for idx in excitation_sectors(self.n_qubits)]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def build_general_u1_2q(phi0, phi1, phi2, alpha, theta):
    """Five-parameter two-qubit unitary commuting with ``Z(x)I + I(x)Z``."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0] = np.exp(1j * phi0)
    u[1, 1] = np.exp(-1j * (alpha + phi1)) * c
    u[1, 2] = -np.exp(1j * (phi1 - alpha)) * s
    u[2, 1] = np.exp(-1j * (phi1 - alpha)) * s
    u[2, 2] = np.exp(1j * (alpha + phi1)) * c
    u[3, 3] = np.exp(1j * phi2)
    return U1Unitary(u, 2, (1, 2, 1))


def haar_unitary(dim, rng):
    """Haar-distributed unitary from the QR decomposition of a Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_u1_unitary(n, seed=None):
    """Block-diagonal unitary with an independent Haar block per excitation sector.

    ``seed`` may be an int, ``None`` or a ``numpy.random.Generator``.
    """
    if not 1 <= n <= 4:
        raise ValueError(f"random_u1_unitary supports 1 <= n <= 4, got {n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    u = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for idx in excitation_sectors(n):
        u[np.ix_(idx, idx)] = haar_unitary(len(idx), rng)
    return U1Unitary(u, n, [comb(n, m) for m in range(n + 1)])


def is_u1_symmetric(u, tol=TOL.zero):
    u = np.asarray(u)
    n = num_qubits(u.shape[0])
    return bool(np.abs(commutator(u, generator(n))).max() < tol)


def interaction_commutes_with_free(h1, h2, J, tol=TOL.zero):
    """Whether ``[H_SE, H_S + H_E] = 0`` for the two-qubit XX model."""
    free = 0.5 * h1 * site_operator(SZ, 1, 2) + 0.5 * h2 * site_operator(SZ, 2, 2)
    inter = 0.5 * J * xx_coupling(1, 2, 2)
    return bool(np.abs(commutator(inter, free)).max() < tol)
