from fractions import Fraction

from hypothesis import strategies as st

from crjets.series import TruncatedSeries, VariableSpace, complex_space

REAL_SPACES = [VariableSpace.real(["x1", "y1", "u1", "v1"][:n]) for n in range(1, 5)]

small_rationals = st.builds(
    Fraction,
    st.integers(min_value=-5, max_value=5),
    st.integers(min_value=1, max_value=4),
)


@st.composite
def exponents(draw, nvars, max_degree, min_degree=0):
    """Exponent vector of total degree in ``[min_degree, max_degree]``."""
    total = draw(st.integers(min_degree, max_degree))
    cuts = sorted(draw(st.lists(st.integers(0, total), min_size=nvars - 1, max_size=nvars - 1)))
    bounds = [0, *cuts, total]
    return tuple(bounds[i + 1] - bounds[i] for i in range(nvars))


@st.composite
def series_in(draw, space, k, complex_coeffs=False, min_degree=0, max_terms=5, max_degree=None):
    max_degree = k if max_degree is None else max_degree
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exps = draw(exponents(len(space), max_degree, min_degree))
        re = draw(small_rationals)
        im = draw(small_rationals) if complex_coeffs else Fraction(0)
        terms[exps] = (re, im)
    return TruncatedSeries(space, k, terms)


@st.composite
def real_space_and_order(draw):
    space = draw(st.sampled_from(REAL_SPACES))
    k = draw(st.integers(0, 6))
    return space, k


COMPLEX_SPACE = complex_space(1, 1)
