import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from raynaud.algebra import FpPoly

settings.register_profile("ci", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

PRIMES = st.sampled_from([2, 3, 5, 7])
VARS = ("x", "y")


def polys(p, variables=VARS, max_deg=3, max_terms=5):
    """Random sparse polynomials over F_p with bounded total degree."""
    n = len(variables)
    exps = st.lists(st.integers(0, max_deg), min_size=n, max_size=n).map(tuple)
    terms = st.dictionaries(exps, st.integers(0, p - 1), max_size=max_terms)
    return terms.map(lambda t: FpPoly(p, variables, t))


@st.composite
def poly_triple(draw, max_deg=3):
    p = draw(PRIMES)
    f = polys(p, max_deg=max_deg)
    return p, draw(f), draw(f), draw(f)
