import json
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, strategies as st

from addcoal.harness import ks_two_sample, multiset_equal, run_suite
from addcoal.model import ContractViolation


def test_multiset_examples():
    assert multiset_equal((Fr(2, 3), Fr(1, 3)), (Fr(1, 3), Fr(2, 3)))[0]
    assert not multiset_equal((1,), (Fr(1, 2), Fr(1, 2)))[0]
    assert multiset_equal((0.5, 0.5), (0.5 + 1e-10, 0.5 - 1e-10), tol=1e-9)[0]
    assert not multiset_equal((0.5, 0.5), (0.5 + 1e-10, 0.5 - 1e-10))[0]


def test_ks_examples():
    x = np.linspace(0, 1, 50)
    assert ks_two_sample(x, x) == 0
    assert ks_two_sample(np.zeros(10), np.ones(10)) == 1
    with pytest.raises(ContractViolation):
        ks_two_sample([], [1.0])


# scipy warns while computing the p-value for tiny samples; only the statistic is compared
@pytest.mark.filterwarnings("ignore::RuntimeWarning")
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=40),
       st.lists(st.floats(-5, 5), min_size=1, max_size=40))
def test_ks_matches_scipy(a, b):
    stats = pytest.importorskip("scipy.stats")
    assert abs(ks_two_sample(a, b) - stats.ks_2samp(a, b, method="asymp").statistic) <= 1e-12


@pytest.mark.parametrize("fx", ["P3", "C3", "P4"])
def test_fixture_suite_and_negative_control(fx):
    good = run_suite({"experiment": "coupling-exact", "instance": fx})
    assert good.passed, good.failed()
    bad = run_suite({"experiment": "coupling-exact", "instance": fx, "corrupt": True})
    assert not bad.passed
    assert "tau_recovery" in bad.failed()


def test_small_runs_and_json():
    for name in ("coupling-float", "prim-exact", "tau-recovery", "xi-roundtrip", "phi-true"):
        rep = run_suite({"experiment": name, "reps": 5, "n": 30})
        assert rep.passed, (name, rep.failed())
    data = json.loads(rep.to_json())
    assert data["experiment"] == "phi-true" and data["passed"]


def test_bad_parameters():
    with pytest.raises(ContractViolation):
        run_suite({"experiment": "nope"})
    with pytest.raises(ContractViolation):
        run_suite({"experiment": "phi-true", "reps": 0})
