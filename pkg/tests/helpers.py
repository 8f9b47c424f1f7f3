from fractions import Fraction

from hypothesis import strategies as st

from pi_collisions import MassRatio


@st.composite
def ratios_le_one(draw, max_q=10**6):
    q = draw(st.integers(1, max_q))
    p = draw(st.integers(1, q))
    return MassRatio(p, q)


@st.composite
def rational_states(draw, bound=1000):
    num = st.integers(-bound, bound)
    den = st.integers(1, bound)
    return Fraction(draw(num), draw(den)), Fraction(draw(num), draw(den))


TABLE_1 = [
    (MassRatio(1, 1), 3),
    (MassRatio(1, 10**2), 31),
    (MassRatio(1, 10**4), 314),
    (MassRatio(1, 10**6), 3141),
    (MassRatio(1, 10**12), 3141592),
]
