import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose

from enumeration import (
    census_frame,
    config_census,
    hard_hexagon_oracle,
    ising_bond_spin_oracle,
    ising_site_oracle,
    partition_enumerate,
)
from lattice_core import LatticeSpec, Weights16, check_topology, random_weights
from model_atlas import hard_hexagon_weights
from strategies import weights16
from vertexlab_config import SizeCapError


def test_all_ones_counts_configurations():
    assert partition_enumerate(LatticeSpec(2, 2, Weights16.ones())) == 256


@given(weights16())
def test_single_site_torus(wt):
    # up = down and left = right on a 1 x 1 torus
    expected = wt.w[0] + wt.w[1] + wt.w[2] + wt.w[3]
    assert_allclose(partition_enumerate(LatticeSpec(1, 1, wt)), expected, rtol=1e-12, atol=1e-12)


def test_odd_weights_vanish_on_single_site():
    assert partition_enumerate(LatticeSpec(1, 1, Weights16.odd(range(1, 9)))) == 0


def test_thread_count_does_not_change_result(rng):
    spec = LatticeSpec(3, 3, random_weights(rng), 'bipartite', random_weights(rng))
    assert partition_enumerate(spec, threads=1) == partition_enumerate(spec, threads=4)


def test_cap_raises_size_cap():
    spec = LatticeSpec(3, 3, Weights16.ones())
    with pytest.raises(SizeCapError) as info:
        partition_enumerate(spec, cap=10)
    assert (info.value.required, info.value.cap) == (18, 10)


def test_census_covers_every_configuration():
    spec = LatticeSpec(2, 3, Weights16.ones())
    census = config_census(spec)
    assert sum(mult for _, mult in census) == 2 ** 12
    assert all(check_topology(stats) for stats, _ in census)
    frame = census_frame(spec)
    assert frame['multiplicity'].sum() == 2 ** 12
    assert {'n1', 'm8', 'Md', 'Ns', 'multiplicity'} <= set(frame.columns)


def test_census_reproduces_partition_function(rng):
    wt = random_weights(rng)
    spec = LatticeSpec(2, 2, wt)
    vec = wt.as_vector()
    total = sum(mult * np.prod(vec ** np.array(stats.n + stats.m)) for stats, mult in config_census(spec))
    assert_allclose(total, partition_enumerate(spec), rtol=1e-12)


def test_hard_hexagon_polynomial():
    z = 0.7
    assert hard_hexagon_oracle(2, 2, z) == pytest.approx(1 + 4 * z)
    assert hard_hexagon_oracle(3, 3, z) == pytest.approx(1 + 9 * z + 9 * z ** 2 + 3 * z ** 3)
    assert hard_hexagon_oracle(1, 3, z) == 1


@pytest.mark.parametrize('rows, cols', [(2, 2), (2, 3), (3, 2), (3, 3)])
@pytest.mark.parametrize('z', [0.7, 2.0, -0.4 + 0.3j])
def test_hard_hexagon_vertex_model(rows, cols, z):
    Z = partition_enumerate(LatticeSpec(rows, cols, hard_hexagon_weights(z)))
    assert_allclose(Z, hard_hexagon_oracle(rows, cols, z), rtol=1e-10)


@given(st.floats(-1, 1), st.floats(-1, 1))
def test_site_oracle_single_site(K, field):
    assert_allclose(ising_site_oracle(1, 1, K, field), 2 * np.exp(2 * K) * np.cosh(field), rtol=1e-12)


def test_oracles_without_couplings():
    assert_allclose(ising_bond_spin_oracle(2, 2, 0, 0, 0), 2 ** 8)
    assert_allclose(ising_site_oracle(2, 3, 0, 0.3), (2 * np.cosh(0.3)) ** 6, rtol=1e-12)


def test_oracles_respect_cap():
    with pytest.raises(SizeCapError):
        ising_site_oracle(10, 10, 0.1, 0)
    with pytest.raises(SizeCapError):
        ising_bond_spin_oracle(5, 5, 0.1, 0.1, 0)


@given(weights16(), st.sampled_from([(1, 2), (2, 2), (2, 3)]), st.floats(0.2, 3.0) | st.complex_numbers(min_magnitude=0.2, max_magnitude=2.0))
def test_partition_function_is_homogeneous(wt, torus, lam):
    rows, cols = torus
    scaled = wt.scaled(lam)
    Z = partition_enumerate(LatticeSpec(rows, cols, wt))
    scale = max(1.0, wt.scale()) ** (rows * cols)
    assert_allclose(partition_enumerate(LatticeSpec(rows, cols, scaled)), lam ** (rows * cols) * Z,
                    atol=1e-10 * scale * abs(lam) ** (rows * cols))


@given(weights16('even'), st.sampled_from([(2, 2), (2, 3), (3, 3)]),
       st.floats(0.25, 4.0), st.sampled_from([1, -1]), st.sampled_from([4, 6]))
def test_even_model_depends_on_bond_products(wt, torus, t, sign, pair):
    rows, cols = torus
    t *= sign
    vec = wt.as_vector()
    vec[pair] *= t
    vec[pair + 1] /= t
    expected = partition_enumerate(LatticeSpec(rows, cols, wt))
    scale = max(1.0, wt.scale()) ** (rows * cols)
    assert_allclose(partition_enumerate(LatticeSpec(rows, cols, Weights16.from_vector(vec))), expected,
                    atol=1e-9 * scale * max(t * t, 1 / (t * t)))


@pytest.mark.parametrize('rows, cols', [(1, 2), (2, 2), (2, 3), (3, 2)])
@given(values=arrays(np.float64, 4, elements=st.floats(0.3, 1.5)))
def test_staircase_weights_leave_only_w1(rows, cols, values):
    w1, w7, v2, v5 = values
    wt = Weights16.from_labels(w1=w1, w7=w7, v2=v2, v5=v5)
    assert_allclose(partition_enumerate(LatticeSpec(rows, cols, wt)), w1 ** (rows * cols), rtol=1e-12)


def test_staircases_wrap_on_three_by_three():
    wt = Weights16.from_labels(w1=1.3, w7=0.7, v2=0.9, v5=1.1)
    assert_allclose(partition_enumerate(LatticeSpec(3, 3, wt)), 1.3 ** 9 + 3 * (0.7 * 0.9 * 1.1) ** 3, rtol=1e-12)
