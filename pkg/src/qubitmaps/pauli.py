"""Pauli strings, operator decomposition and the X/Y parity charge."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .core import PAULI, TOL, kron, num_qubits

LABELS = "IXYZ"

# single-site products: (a, b) -> (phase, label) with sigma_a sigma_b = phase * sigma_label
_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


@dataclass(frozen=True, order=True)
class PauliString:
    """Tensor product of single-qubit Paulis, site 1 first."""

    ops: tuple

    def __post_init__(self):
        ops = tuple(self.ops)
        if not ops:
            raise ValueError("a Pauli string needs at least one site")
        bad = [o for o in ops if o not in PAULI]
        if bad:
            raise ValueError(f"unknown Pauli labels {bad}")
        object.__setattr__(self, "ops", ops)

    @classmethod
    def from_label(cls, label):
        return cls(tuple(label.upper()))

    @property
    def label(self):
        return "".join(self.ops)

    @property
    def n(self):
        return len(self.ops)

    @property
    def charge(self):
        return charge(self)

    def matrix(self):
        return kron(*(PAULI[o] for o in self.ops))

    def __mul__(self, other):
        return multiply(self, other)

    def __str__(self):
        return self.label


def as_pauli(s):
    return s if isinstance(s, PauliString) else PauliString.from_label(str(s))


def charge(s):
    """``(-1) ** (n_x + n_y)`` for a Pauli string (or its label)."""
    s = as_pauli(s)
    odd = sum(o in "XY" for o in s.ops)
    return -1 if odd % 2 else 1


def multiply(s1, s2):
    """Product of two strings as ``(phase, string)``."""
    s1, s2 = as_pauli(s1), as_pauli(s2)
    if s1.n != s2.n:
        raise ValueError("strings act on different numbers of sites")
    phase = 1
    ops = []
    for a, b in zip(s1.ops, s2.ops):
        p, o = _PRODUCT[a, b]
        phase *= p
        ops.append(o)
    return phase, PauliString(tuple(ops))


def all_strings(n):
    """All 4**n strings in lexicographic I < X < Y < Z order."""
    return [PauliString(ops) for ops in itertools.product(LABELS, repeat=n)]


@lru_cache(maxsize=8)
def _basis(n):
    strings = all_strings(n)
    stack = np.array([s.matrix() for s in strings])
    stack.setflags(write=False)
    return strings, stack


class PauliDecomposition:
    """Sparse expansion ``M = sum_k alpha_k O_k`` over Pauli strings."""

    def __init__(self, n, terms):
        self.n = n
        self.terms = dict(terms)

    def __getitem__(self, s):
        return self.terms.get(as_pauli(s), 0.0)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def __repr__(self):
        body = ", ".join(f"{s}: {c:.6g}" for s, c in sorted(self.terms.items()))
        return f"PauliDecomposition({{{body}}})"

    def to_matrix(self):
        dim = 2 ** self.n
        out = np.zeros((dim, dim), dtype=complex)
        for s, c in self.terms.items():
            out += c * s.matrix()
        return out

    def charges(self):
        return {s: charge(s) for s in self.terms}

    def is_real(self, tol=TOL.zero):
        return all(abs(c.imag) < tol for c in self.terms.values())

    def to_records(self):
        return [
            {"string": s.label, "re": float(c.real), "im": float(c.imag)}
            for s, c in sorted(self.terms.items())
        ]

    @classmethod
    def from_records(cls, records):
        terms = {PauliString.from_label(r["string"]): complex(r["re"], r["im"]) for r in records}
        if not terms:
            raise ValueError("cannot infer qubit count from an empty record list")
        n = next(iter(terms)).n
        return cls(n, terms)

    def scaled(self, factor):
        return PauliDecomposition(self.n, {s: factor * c for s, c in self.terms.items()})

    def __add__(self, other):
        terms = dict(self.terms)
        for s, c in other.terms.items():
            terms[s] = terms.get(s, 0) + c
        return PauliDecomposition(self.n, terms)


def pauli_coefficients(m):
    """Dense vector of ``Tr(O_k M) / 2**n`` in :func:`all_strings` order."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    n = num_qubits(m.shape[0])
    _, stack = _basis(n)
    return np.einsum("kij,ji->k", stack, m) / 2 ** n


def decompose(m, cutoff=TOL.zero):
    """Pauli expansion of ``m``; coefficients with modulus below ``cutoff`` are dropped."""
    m = np.asarray(m, dtype=complex)
    coeffs = pauli_coefficients(m)
    n = num_qubits(m.shape[0])
    strings, _ = _basis(n)
    return PauliDecomposition(n, {s: complex(c) for s, c in zip(strings, coeffs) if abs(c) >= cutoff})


def conjugate_decompose(u, s, cutoff=TOL.zero):
    """Pauli expansion of ``U s U^dagger``."""
    s = as_pauli(s)
    u = np.asarray(u, dtype=complex)
    if u.shape != (2 ** s.n, 2 ** s.n):
        raise ValueError(f"unitary of shape {u.shape} does not act on {s.n} qubits")
    return decompose(u @ s.matrix() @ u.conj().T, cutoff)


def wrong_charge_weight(decomposition, expected):
    """Largest ``|alpha_k|`` on a string whose charge differs from ``expected``."""
    return max((abs(c) for s, c in decomposition if charge(s) != expected), default=0.0)


def count_charge_conserving_strings(n):
    """Number of n-site strings with an even count of X/Y factors."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return 2 ** n * sum(comb(n, 2 * j) for j in range(n // 2 + 1))


def enumerate_charge_conserving_strings(n):
    return [s for s in all_strings(n) if charge(s) == 1]
