"""Hypothesis strategies shared by the test modules."""

import numpy as np
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lattice_core import Weights16

# real and imaginary parts of 16 weights in a bounded box
weight_vectors = arrays(np.float64, (2, 16), elements=st.floats(-1.5, 1.5, allow_nan=False))
positive_vectors = arrays(np.float64, 8, elements=st.floats(0.3, 1.3, allow_nan=False))
small_tori = st.tuples(st.integers(1, 3), st.integers(1, 3))


@st.composite
def weights16(draw, parity=None):
    raw = draw(weight_vectors)
    vec = raw[0] + 1j * raw[1]
    if parity == 'even':
        vec[8:] = 0
    elif parity == 'odd':
        vec[:8] = 0
    return Weights16.from_vector(vec)
