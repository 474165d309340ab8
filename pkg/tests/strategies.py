from hypothesis import strategies as st

from oscilab.core.polynomial import Polynomial


coefficients = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)
polynomials = st.lists(coefficients, min_size=1, max_size=6).map(Polynomial)
unit_points = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)
