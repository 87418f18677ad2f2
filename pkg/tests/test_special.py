import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chiralcavity.special import erf, erfc

mpmath.mp.dps = 40

# 20 reference points spanning both branches and the deep tail
POINTS = [0.0, 1e-8, 0.05, 0.25, 0.5, 0.7, 0.9899, 1.0, 1.5, 1.99, 2.0, 2.1, 2.5, 3.0 / math.sqrt(2), 3.0,
          4.0, 5.0, 6.5, 8.0 / math.sqrt(2), 8.0]


@pytest.mark.parametrize("x", POINTS)
def test_erfc_against_high_precision(x):
    ref = float(mpmath.erfc(x))
    assert erfc(x) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("x", POINTS)
def test_erf_against_high_precision(x):
    ref = float(mpmath.erf(x))
    assert erf(x) == pytest.approx(ref, rel=1e-12, abs=1e-300)


def test_special_values():
    assert erf(0.0) == 0.0
    assert erfc(0.0) == 1.0
    assert erf(math.inf) == 1.0
    assert erfc(math.inf) == 0.0
    assert erfc(-math.inf) == 2.0
    assert math.isnan(erf(math.nan))


@given(st.floats(min_value=-10, max_value=10))
def test_odd_and_complementary(x):
    assert erf(-x) == -erf(x)
    assert erf(x) + erfc(x) == pytest.approx(1.0, abs=4.5e-16)


def test_vectorized():
    xs = np.linspace(-3, 3, 7)
    assert np.allclose(erf(xs), [math.erf(x) for x in xs], rtol=1e-14, atol=1e-16)
