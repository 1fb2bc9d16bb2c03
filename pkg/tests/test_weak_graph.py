import numpy as np
import pytest
from hypothesis import given
from numpy.testing import assert_allclose

from enumeration import partition_enumerate
from free_fermion import random_ff_weights
from lattice_core import LatticeSpec, Weights16, random_weights
from strategies import positive_vectors, weights16
from transfer_matrix import partition_transfer
from vertexlab_config import SchemaError
from weak_graph import (
    CHAR_POLYS,
    WeakGraphVariant,
    antisym_even_ff_residual,
    antisym_even_to_sym_odd,
    apply_weak_graph,
    char_poly_class,
    eigen_multiplicities,
    sym_odd_to_antisym_even,
    symmetric_ff_residual,
    variant_similarity,
    weak_graph_matrix,
)


def test_variant_one_is_an_involution():
    G = weak_graph_matrix(1)
    assert_allclose(G @ G, np.eye(16), atol=1e-14)
    assert char_poly_class(1)['minimal'] == CHAR_POLYS[0]


@pytest.mark.parametrize('variant', [2, 3, 4])
def test_other_variants_have_order_four(variant):
    G = weak_graph_matrix(variant)
    assert_allclose(np.linalg.matrix_power(G, 4), np.eye(16), atol=1e-13)
    assert not np.allclose(G @ G, np.eye(16))
    assert char_poly_class(variant)['minimal'] != CHAR_POLYS[0]


@pytest.mark.parametrize('variant', [1, 2, 3, 4])
def test_eigen_multiplicities_sum_to_dimension(variant):
    counts = eigen_multiplicities(weak_graph_matrix(variant))
    assert sum(counts.values()) == 16
    assert all(c >= 0 for c in counts.values())


def test_variant_similarity_table():
    frame = variant_similarity()
    assert len(frame) == 6
    assert set(frame.columns) == {'variant_a', 'variant_b', 'trace_a', 'trace_b', 'similar'}


def test_variant_validation():
    with pytest.raises(SchemaError):
        WeakGraphVariant(5)
    with pytest.raises(SchemaError):
        weak_graph_matrix(1, site_class=3)


@pytest.mark.parametrize('variant', [1, 2, 3, 4])
@pytest.mark.parametrize('rows, cols', [(1, 1), (2, 2), (2, 3), (3, 3)])
def test_partition_function_preserved(rng, variant, rows, cols):
    wt = random_weights(rng)
    before = partition_transfer(LatticeSpec(rows, cols, wt))
    after = partition_transfer(LatticeSpec(rows, cols, apply_weak_graph(wt, variant)))
    assert_allclose(after, before, rtol=1e-9)


@given(weights16('even'))
def test_even_input_gives_symmetric_model(wt):
    assert apply_weak_graph(wt).is_symmetric(1e-12)


@given(weights16('odd'))
def test_odd_input_gives_antisymmetric_model(wt):
    assert apply_weak_graph(wt).is_antisymmetric(1e-12)


def test_even_odd_partner_example():
    even = antisym_even_to_sym_odd(Weights16.odd((1,) * 8))
    assert_allclose(even.as_vector()[:8], [2, -2, 0, 0, 0, 0, 0, 0])
    assert even.is_even()


@given(positive_vectors)
def test_partners_invert_each_other(x):
    odd = Weights16.odd(np.repeat(x[:4], 2))
    even = antisym_even_to_sym_odd(odd)
    assert even.is_antisymmetric()
    assert_allclose(sym_odd_to_antisym_even(even).as_vector(), odd.as_vector(), atol=1e-12)


@given(positive_vectors)
def test_partner_ff_residual(x):
    v1, v3, v5, v7 = x[:4]
    even = antisym_even_to_sym_odd(Weights16.odd((v1, v1, v3, v3, v5, v5, v7, v7)))
    expected = (v5 ** 2 + v7 ** 2 - v1 ** 2 - v3 ** 2) / 2
    assert_allclose(antisym_even_ff_residual(even), expected, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize('rows, cols', [(2, 2), (2, 4)])
def test_partners_share_partition_function(rng, rows, cols):
    odd = Weights16.odd(np.repeat(rng.uniform(0.2, 1.2, 4), 2))
    even = antisym_even_to_sym_odd(odd)
    assert_allclose(partition_enumerate(LatticeSpec(rows, cols, even)),
                    partition_enumerate(LatticeSpec(rows, cols, odd)), rtol=1e-9)


def test_partner_preconditions():
    with pytest.raises(SchemaError):
        antisym_even_to_sym_odd(Weights16.odd(range(1, 9)))
    with pytest.raises(SchemaError):
        sym_odd_to_antisym_even(Weights16.even((1,) * 8))


def test_symmetric_ff_residual_of_images(rng):
    image = apply_weak_graph(random_ff_weights(rng, 'even'))
    assert abs(symmetric_ff_residual(image)) < 1e-12
