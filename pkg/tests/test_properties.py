import json

import numpy as np
import pytest

hypothesis = pytest.importorskip("hypothesis")
from hypothesis import given, settings
from hypothesis import strategies as st

from sinhlab import greens
from sinhlab.domain import DomainSpec
from sinhlab.export import dumps
from sinhlab.hamiltonian import SignedConfig, hamiltonian_value

DISC = DomainSpec.unit_disc()


@st.composite
def disc_point(draw, r_max=0.85):
    r = draw(st.floats(0.0, r_max))
    t = draw(st.floats(0.0, 2 * np.pi))
    return np.array([r * np.cos(t), r * np.sin(t)])


@st.composite
def separated_points(draw, m):
    # one point per annulus keeps them apart without rejection
    bands = np.linspace(0.05, 0.8, m + 1)
    pts = []
    for k in range(m):
        r = draw(st.floats(bands[k], bands[k + 1] - 0.1))
        t = draw(st.floats(0.0, 2 * np.pi))
        pts.append((r * np.cos(t), r * np.sin(t)))
    return np.array(pts)


@settings(max_examples=60, deadline=None)
@given(disc_point(), disc_point())
def test_green_symmetric(x, y):
    hypothesis.assume(np.hypot(*(x - y)) > 1e-3)
    a = greens.green_value(DISC, x, y)
    b = greens.green_value(DISC, y, x)
    assert a == pytest.approx(b, rel=1e-10, abs=1e-12)
    assert a > 0


@settings(max_examples=40, deadline=None)
@given(separated_points(3), st.lists(st.sampled_from([1, -1]), min_size=3, max_size=3), st.permutations(range(3)))
def test_hamiltonian_invariances(points, signs, perm):
    c = SignedConfig(DISC, points, signs)
    v = hamiltonian_value(c)
    perm = list(perm)
    assert hamiltonian_value(SignedConfig(DISC, points[perm], np.array(signs)[perm])) == pytest.approx(v, rel=1e-12)
    assert hamiltonian_value(SignedConfig(DISC, points, [-s for s in signs])) == pytest.approx(v, rel=1e-12)


finite = st.floats(allow_nan=False, allow_infinity=False)
json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-10**6, 10**6) | finite | st.text(max_size=8),
    lambda kids: st.lists(kids, max_size=4) | st.dictionaries(st.text(max_size=6), kids, max_size=4),
    max_leaves=20,
)


@settings(max_examples=200, deadline=None)
@given(json_values)
def test_dumps_round_trip(obj):
    text = dumps(obj)
    assert json.loads(text) == obj
    assert dumps(json.loads(text)) == text
