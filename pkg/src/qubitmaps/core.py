"""Dense qubit linear algebra and state construction.

Conventions used throughout the package:

* Site 1 is the leftmost Kronecker factor (most significant bit of the
  computational-basis index). Sites are numbered 1..n.
* A qubit state with Bloch vector ``a`` is ``(I + a . sigma) / 2`` so that
  ``rho[0, 0] = (1 + a3) / 2``.
* Bloch vectors are plain ``numpy`` arrays of shape ``(3,)``; correlation
  matrices are real ``(3, 3)`` arrays with ``c[i, j]`` multiplying
  ``sigma_i (x) sigma_j``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    zero: float = 1e-12  # structural zeros
    psd: float = 1e-10  # eigenvalue floor for positivity
    bloch: float = 1e-12  # slack on |a| <= 1


TOL = Tolerances()

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"I": I2, "X": SX, "Y": SY, "Z": SZ}
SIGMAS = (SX, SY, SZ)


class InvalidStateError(ValueError):
    """Raised when a matrix fails the density-matrix checks."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


def _freeze(arr):
    arr = np.array(arr)
    arr.setflags(write=False)
    return arr


def num_qubits(dim):
    n = int(round(np.log2(dim))) if dim > 0 else -1
    if n < 0 or 2 ** n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def kron(*ops):
    """Kronecker product of the operands, leftmost factor most significant."""
    if not ops:
        return np.eye(1, dtype=complex)
    return reduce(np.kron, (np.asarray(op) for op in ops))


def site_operator(op, site, n):
    """Embed a single-qubit operator at ``site`` (1-based) of an n-qubit register."""
    if not 1 <= site <= n:
        raise ValueError(f"site {site} outside 1..{n}")
    factors = [I2] * n
    factors[site - 1] = np.asarray(op, dtype=complex)
    return kron(*factors)


def partial_trace(rho, n_qubits, keep):
    """Reduced state on the sites in ``keep`` (1-based), in increasing site order."""
    rho = np.asarray(rho)
    dim = 2 ** n_qubits
    if rho.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} matrix for {n_qubits} qubits, got {rho.shape}")
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep must name at least one site")
    if keep[0] < 1 or keep[-1] > n_qubits:
        raise ValueError(f"sites {keep} outside 1..{n_qubits}")
    traced = [k for k in range(n_qubits) if k + 1 not in keep]
    kept = [k - 1 for k in keep]
    tensor = rho.reshape([2] * (2 * n_qubits))
    # bring kept row indices, traced row indices, kept col indices, traced col indices
    perm = kept + traced + [n_qubits + k for k in kept] + [n_qubits + k for k in traced]
    tensor = tensor.transpose(perm)
    dk, dt = 2 ** len(kept), 2 ** len(traced)
    tensor = tensor.reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", tensor)


def permute_sites(op, order):
    """Reorder the tensor factors of ``op``.

    ``order[k]`` is the (1-based) site of the input that becomes site ``k+1``
    of the output.
    """
    op = np.asarray(op)
    n = num_qubits(op.shape[0])
    axes = [s - 1 for s in order]
    if sorted(axes) != list(range(n)):
        raise ValueError(f"{order} is not a permutation of 1..{n}")
    tensor = op.reshape([2] * (2 * n)).transpose(axes + [n + a for a in axes])
    return tensor.reshape(op.shape)


def is_hermitian(m, tol=TOL.zero):
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.abs(m - m.conj().T).max() < tol


def hermitian_eig(m):
    """Eigen-decomposition of the Hermitian part of ``m``."""
    m = np.asarray(m)
    return np.linalg.eigh(0.5 * (m + m.conj().T))


def min_eigenvalue(m):
    return float(hermitian_eig(m)[0][0])


def check_density_matrix(rho, tol=TOL.psd, name="state"):
    """Return ``rho`` as a complex array or raise :class:`InvalidStateError`."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"{name} is not square: shape {rho.shape}")
    if not is_hermitian(rho, max(tol, TOL.zero)):
        raise InvalidStateError(f"{name} is not Hermitian")
    if abs(np.trace(rho) - 1) > max(tol, TOL.zero):
        raise InvalidStateError(f"{name} has trace {np.trace(rho).real:.6g}, expected 1")
    lam = min_eigenvalue(rho)
    if lam < -tol:
        raise InvalidStateError(f"{name} is not positive semidefinite (min eigenvalue {lam:.3e})", lam)
    return rho


def is_density_matrix(rho, tol=TOL.psd):
    try:
        check_density_matrix(rho, tol)
    except InvalidStateError:
        return False
    return True


def expm_hermitian(h, t=1.0, tol=TOL.zero):
    """Return ``exp(-i h t)`` for Hermitian ``h`` via its eigendecomposition."""
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, tol * max(1.0, np.abs(h).max())):
        raise ValueError("expm_hermitian requires a Hermitian generator")
    w, v = hermitian_eig(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def as_bloch(a):
    a = np.asarray(a, dtype=float).reshape(-1)
    if a.shape != (3,):
        raise ValueError(f"Bloch vector needs 3 components, got {a.shape[0]}")
    return a


def bloch_to_density(a, tol=TOL.bloch):
    a = as_bloch(a)
    norm = np.linalg.norm(a)
    if norm > 1 + tol:
        raise InvalidStateError(f"Bloch vector norm {norm:.6g} exceeds 1")
    return 0.5 * (I2 + a[0] * SX + a[1] * SY + a[2] * SZ)


def bloch_operator(a):
    """``(I + a . sigma) / 2`` without the physicality check."""
    a = as_bloch(a)
    return 0.5 * (I2 + a[0] * SX + a[1] * SY + a[2] * SZ)


def density_to_bloch(rho, tol=TOL.psd):
    rho = check_density_matrix(rho, tol)
    if rho.shape != (2, 2):
        raise ValueError("density_to_bloch expects a single-qubit state")
    return operator_to_bloch(rho)


def operator_to_bloch(rho):
    rho = np.asarray(rho)
    return np.array([np.trace(rho @ s).real for s in SIGMAS])


def build_two_qubit_state(a, b, c, tol=TOL.psd, check=True):
    """Two-qubit operator ``(1/4)(I + sum a_i s_i I + b_i I s_i + c_ij s_i s_j)``.

    ``c`` holds the full Pauli coefficients of the ``sigma_i (x) sigma_j``
    terms; for a product state ``c = outer(a, b)``. With ``check`` the result
    is required to be positive semidefinite.
    """
    a, b = as_bloch(a), as_bloch(b)
    c = np.asarray(c, dtype=float).reshape(3, 3)
    rho = np.eye(4, dtype=complex)
    for i, s in enumerate(SIGMAS):
        rho += a[i] * np.kron(s, I2) + b[i] * np.kron(I2, s)
        for j, s2 in enumerate(SIGMAS):
            rho += c[i, j] * np.kron(s, s2)
    rho /= 4
    if check:
        lam = min_eigenvalue(rho)
        if lam < -tol:
            raise InvalidStateError(
                f"two-qubit state is not positive semidefinite (min eigenvalue {lam:.3e})", lam
            )
    return rho


def correlated_state(a, b, chi, tol=TOL.psd, check=True):
    """``rho_a (x) rho_b + chi`` where ``chi`` is given by its Pauli coefficients."""
    a, b = as_bloch(a), as_bloch(b)
    return build_two_qubit_state(a, b, np.outer(a, b) + np.asarray(chi, dtype=float), tol, check)


def correlation_operator(chi):
    """``(1/4) sum chi_ij sigma_i (x) sigma_j`` (traceless, zero marginals)."""
    chi = np.asarray(chi, dtype=float).reshape(3, 3)
    out = np.zeros((4, 4), dtype=complex)
    for i, s in enumerate(SIGMAS):
        for j, s2 in enumerate(SIGMAS):
            out += chi[i, j] * np.kron(s, s2)
    return out / 4


def gibbs_bloch(r_g):
    """Bloch vector ``(0, 0, r_G)`` of the qubit thermal state."""
    if abs(r_g) > 1:
        raise ValueError(f"|r_G| = {abs(r_g)} exceeds 1")
    return np.array([0.0, 0.0, float(r_g)])


def product_state(*states):
    return kron(*states)
