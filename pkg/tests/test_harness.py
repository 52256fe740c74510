import json

import numpy as np
import pytest

from qubitmaps import harness
from qubitmaps.harness import (
    VacuousCheckError,
    run_claim,
    verify_charge_conservation,
    verify_even_charge_correlations_stay_pc,
    verify_hierarchy,
    verify_no_coherence_from_diagonal,
)
from qubitmaps.pauli import conjugate_decompose


def test_reports_pass_and_are_reproducible():
    a = verify_charge_conservation(2, 200, seed=3)
    b = verify_charge_conservation(2, 200, seed=3)
    assert a.passed and a == b
    assert a.control_violation > 1e-3
    assert json.loads(a.to_json())["claim_id"] == "charge_conservation"


def test_identity_string_is_unchanged(rng):
    from qubitmaps.u1 import random_u1_unitary
    d = conjugate_decompose(random_u1_unitary(3, rng).matrix, "III")
    assert len(d) == 1 and d["III"] == pytest.approx(1)


def test_other_campaigns_pass():
    assert verify_no_coherence_from_diagonal(2, 100, seed=1).passed
    assert verify_even_charge_correlations_stay_pc(100, seed=1).passed
    assert verify_hierarchy(30, seed=1).passed


def test_n_bounds():
    with pytest.raises(ValueError):
        verify_charge_conservation(5, 1)
    with pytest.raises(ValueError):
        verify_no_coherence_from_diagonal(1, 1)


def test_unknown_claim_lists_ids():
    with pytest.raises(KeyError) as err:
        run_claim("bogus")
    for cid in ("charge_conservation", "no_coherence", "even_charge_pc", "hierarchy"):
        assert cid in str(err.value)


def test_vacuous_control_raises(monkeypatch):
    # a control that cannot break the claim must not produce a green report
    monkeypatch.setattr(harness, "expm_hermitian", lambda h, t: np.eye(h.shape[0]))
    with pytest.raises(VacuousCheckError):
        verify_charge_conservation(2, 5)
