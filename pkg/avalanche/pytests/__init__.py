import math

from hypothesis import assume, strategies as st

from avalanche.chains import GoodPair

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


@st.composite
def good_pairs(draw, min_a: float = 3.5, max_a: float = 6.0, max_b: float = 1.0) -> GoodPair:
    a = draw(st.floats(min_value=min_a, max_value=max_a))
    b = draw(st.floats(min_value=0.0, max_value=max_b))
    # Stay clear of the boundary, where the translation number tends to 1.
    assume(math.sinh(a - b) > 1.01 * 2 * math.sinh(a / 2))
    return GoodPair(a, b)


translations = st.floats(min_value=1.2, max_value=4.0)

curve_angles = st.floats(min_value=0.05, max_value=math.pi / 2)
