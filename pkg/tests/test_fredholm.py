import numpy as np
import pytest

from pfkern.families import Charlier
from pfkern.fredholm import (bulk_scaled_gap_comparison, discrete_gap,
                             gap_probability, nystrom_det, sine_gap)
from pfkern.refkernels import sine_kernel


def test_trivial_kernel_determinant_one():
    zero = lambda x, y: np.zeros((np.atleast_1d(x).size, np.atleast_1d(y).size))
    val, cert = gap_probability(zero, 0.0, 1.0)
    assert val == 1.0


def test_nystrom_node_doubling_certificate():
    val, cert = sine_gap(1.0, tol=1e-12)
    assert cert < 1e-12
    # classical value of the sine-kernel gap on [0,1] (unit density)
    assert val == pytest.approx(0.17, abs=0.02)


def test_discrete_gap_in_unit_interval_and_monotone():
    fam = Charlier(theta=64.0)
    N = 64
    base = int(64 * 2.0)
    vals = [discrete_gap(fam, N, np.arange(base, base + k)) for k in (1, 3, 5, 7)]
    assert all(0 < v <= 1 for v in vals)
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_bulk_scaled_comparison():
    rep = bulk_scaled_gap_comparison(Charlier(theta=256.0), 256, 3.0, [0.5, 1.0])
    for e in rep["entries"]:
        assert e["rel_diff"] < 0.02
        assert e["sine_certificate"] < 1e-8
