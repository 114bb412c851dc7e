from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from lambdakit import bracket as BR
from lambdakit import presentations as PR
from lambdakit.fields import State
from lambdakit.scalars import num

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def free1():
    return PR.free_sigma_model(1)


@pytest.fixture(scope="session")
def pairs1():
    return PR.free_pairs(1)


@pytest.fixture(scope="session")
def flat1():
    P = PR.flat_patch(1)
    return P, PR.named_fields(P)


@st.composite
def gaussian(draw, span=5):
    from lambdakit.scalars import I
    a = draw(st.integers(-span, span))
    b = draw(st.integers(-span, span))
    d = draw(st.integers(1, 3))
    return num(Fraction(a, d)) + num(Fraction(b, d)) * I


_MONO_CACHE = {}


def monos(P, max_weight):
    key = (P.name, Fraction(max_weight))
    if key not in _MONO_CACHE:
        _MONO_CACHE[key] = BR.monomials(P, max_weight)
    return _MONO_CACHE[key]


@st.composite
def states(draw, P, max_weight, max_terms=2, parity=None):
    """Homogeneous-parity combination of canonical monomials."""
    eng = P.engine()
    par = draw(st.integers(0, 1)) if parity is None else parity
    pool = [m for m in monos(P, max_weight) if eng.mpar(m) == par]
    k = draw(st.integers(1, max_terms))
    terms = {}
    for _ in range(k):
        m = draw(st.sampled_from(pool))
        terms[m] = terms.get(m, num(0)) + draw(gaussian())
    return State(P, terms)
