import math

import numpy as np
import pytest

from qubitmaps.affine import AffineMap, phase_covariant_map
from qubitmaps.core import InvalidStateError, bloch_to_density
from qubitmaps.thermo import (
    Trajectory,
    coherence_trajectory,
    convergence_steps,
    delta_D,
    l1_coherence,
    relative_entropy,
    trace_distance_norm,
)

# binary relative entropy of the eigenvalues (1 +- r)/2, and a
# matrix-logarithm evaluation, computed offline
D_05_045 = 0.0015986188056798384
D_GENERAL = 0.4062696159929198


def test_relative_entropy_basic():
    rho = bloch_to_density([0.2, 0.1, -0.4])
    assert relative_entropy(rho, rho) == pytest.approx(0, abs=1e-14)
    assert relative_entropy(np.diag([1.0, 0.0]), np.eye(2) / 2) == pytest.approx(math.log(2))


def test_relative_entropy_frozen_values():
    a = bloch_to_density([0, 0, 0.5])
    b = bloch_to_density([0, 0, 0.45])
    assert relative_entropy(a, b) == pytest.approx(D_05_045, rel=1e-12)
    c = bloch_to_density([0.3, 0.2, 0.5])
    d = bloch_to_density([0, 0, -0.3])
    assert relative_entropy(c, d) == pytest.approx(D_GENERAL, rel=1e-10)


def test_relative_entropy_support():
    assert relative_entropy(np.eye(2) / 2, np.diag([1.0, 0.0])) == math.inf
    assert relative_entropy(np.diag([1.0, 0.0]), np.diag([1.0, 0.0])) == pytest.approx(0)
    with pytest.raises(InvalidStateError):
        relative_entropy(np.diag([2.0, 0.0]), np.eye(2) / 2)


def test_delta_D():
    ident = AffineMap.identity()
    assert delta_D(ident, [0, 0, 0.3], 0.3) == pytest.approx(0, abs=1e-14)
    m = phase_covariant_map(0.2, 0.5, 0.15)  # fixes r = 0.3
    assert delta_D(m, [0, 0, 0.3], 0.3) < 1e-12
    assert delta_D(m, [0, 0, 1], 0.3) > 0
    with pytest.raises(ValueError):
        delta_D(m, [1, 1, 0], 0.3)


def test_l1_coherence():
    assert l1_coherence([1, 0, 0]) == pytest.approx(1)
    assert l1_coherence([0, 0, 1]) == 0
    rho = bloch_to_density([0.3, 0.4, 0])
    assert l1_coherence([0.3, 0.4, 0]) == pytest.approx(2 * abs(rho[0, 1]))


def test_coherence_trajectory():
    m = phase_covariant_map(0.5, 0.4, 0.1)
    traj = coherence_trajectory(m, [0.8, 0, 0], 3)
    assert np.allclose(traj, [0.8, 0.4, 0.2, 0.1])
    assert coherence_trajectory(m, [0.8, 0, 0], 0) == [0.8]


def test_trace_norm():
    a, b = np.array([0.3, 0.1, 0.2]), np.array([-0.1, 0.2, 0.5])
    diff = bloch_to_density(a) - bloch_to_density(b)
    assert trace_distance_norm(a, b) == pytest.approx(np.abs(np.linalg.eigvalsh(diff)).sum())
    assert trace_distance_norm(a, b) == pytest.approx(np.linalg.norm(a - b))


def test_convergence_rules():
    assert convergence_steps(AffineMap.identity(), [0, 0, 1]) == (1, True)
    project = AffineMap([0, 0, 0.3], np.zeros((3, 3)))
    assert convergence_steps(project, [0.5, 0, 0]) == (1, True)
    rotation = AffineMap([0, 0, 0], [[0, -1, 0], [1, 0, 0], [0, 0, 1]])
    assert convergence_steps(rotation, [1, 0, 0], n_max=50) == (50, False)
    slow = phase_covariant_map(0.5, 0.5, 0.0)
    steps, ok = convergence_steps(slow, [0, 0, 1], eps=1e-8)
    # ||a_{n+1} - a_n|| = 0.5**(n+1) drops below 1e-8 first at n = 26
    assert ok and steps == 26
    with pytest.raises(ValueError):
        convergence_steps(slow, [0, 0, 1], eps=0)


def test_trajectory_csv():
    traj = Trajectory.generate(phase_covariant_map(0.5, 0.4, 0.1), [0, 0, 1], 2, "pc", {"J": 0.5})
    assert len(traj.states) == 3
    text = traj.to_csv()
    assert text.startswith("# map=pc")
    assert text.count("\n") == 7
