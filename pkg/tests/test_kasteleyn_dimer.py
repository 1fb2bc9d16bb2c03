import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from free_fermion import CATALAN, free_energy, integrand_coeffs, random_ff_weights
from kasteleyn_dimer import (
    BondWeights,
    bond_weights,
    d_theta,
    dimer_free_energy,
    finite_det_product,
    kasteleyn_spec,
    regularized_kasteleyn,
)
from lattice_core import LatticeSpec, Weights16
from model_atlas import close_packed_dimer_weights
from vertexlab_config import NumericDomainError, SchemaError

seeds = st.integers(0, 2 ** 32 - 1)


def test_odd_bond_weights_of_ones():
    z = bond_weights(Weights16.odd((1,) * 8), 'odd')
    assert_allclose(z.z, (1, 1, 0, 0, 1, 1, 1, 1))


@pytest.mark.parametrize('parity', ['odd', 'even'])
@given(seed=seeds, real=st.booleans())
def test_bond_weights_regenerate_vertex_weights(parity, seed, real):
    wt = random_ff_weights(np.random.default_rng(seed), parity, real=real)
    rebuilt = bond_weights(wt, parity).to_weights()
    assert_allclose(rebuilt.as_vector(), wt.as_vector(), rtol=1e-9, atol=1e-9)


def test_bond_weights_always_free_fermion():
    odd = BondWeights('odd', (0.3, 1.0, 0.7, 1.1, 0.4, 0.9, 1.3, 0.5)).to_weights()
    even = BondWeights('even', (0.3, 1.0, 0.7, 1.1, 0.4, 0.9, 1.0, 0.5, 1.0)).to_weights()
    v, w = odd.v, even.w
    assert v[0] * v[1] + v[2] * v[3] == pytest.approx(v[4] * v[5] + v[6] * v[7])
    assert w[0] * w[1] + w[2] * w[3] == pytest.approx(w[4] * w[5] + w[6] * w[7])


def test_bond_weight_errors(rng):
    even = random_ff_weights(rng, 'even')
    with pytest.raises(SchemaError):
        bond_weights(even, 'odd')
    with pytest.raises(SchemaError):
        bond_weights(even, 'mixed')
    with pytest.raises(NumericDomainError):
        bond_weights(even.with_labels(w1=even['w1'] + 1), 'even')
    with pytest.raises(NumericDomainError):
        bond_weights(close_packed_dimer_weights(), 'odd')


@pytest.mark.parametrize('parity', ['odd', 'even'])
def test_cell_matrix_is_antisymmetric(rng, parity):
    ks = kasteleyn_spec(random_ff_weights(rng, parity), parity)
    assert_allclose(ks.T, -ks.T.T)
    assert ks.cell_size == (5 if parity == 'odd' else 6)
    for p in (0.0, np.pi):
        M = ks.momentum_matrix(p, p)
        assert_allclose(M, -M.T, atol=1e-12)


def test_momentum_matrix_reflection(rng):
    ks = kasteleyn_spec(random_ff_weights(rng, 'odd'), 'odd', 'bipartite')
    assert_allclose(ks.momentum_matrix(0.4, 1.1).T, -ks.momentum_matrix(-0.4, -1.1), atol=1e-12)


def test_momentum_matrix_broadcasts(rng):
    ks = kasteleyn_spec(random_ff_weights(rng, 'even'), 'even')
    t = np.linspace(0, 1, 5)
    assert ks.momentum_matrix(t[:, None], t[None, :]).shape == (5, 5, 12, 12)
    assert ks.d(t, t).shape == (5,)


@pytest.mark.parametrize('parity', ['odd', 'even'])
@pytest.mark.parametrize('staggering', ['column', 'bipartite'])
def test_determinant_is_the_integrand(rng, rel, parity, staggering):
    for _ in range(5):
        spec = LatticeSpec(2, 2, random_ff_weights(rng, parity, real=False), staggering,
                           random_ff_weights(rng, parity, real=False))
        ks = kasteleyn_spec(spec, parity)
        coeffs = integrand_coeffs(spec, f'{parity}_{staggering}')
        for t1, t2 in rng.uniform(0, 2 * np.pi, (4, 2)):
            assert rel(d_theta(ks, t1, t2), coeffs.integrand(t1, t2)) < 1e-9


def test_staggering_choices(rng):
    odd = random_ff_weights(rng, 'odd')
    assert kasteleyn_spec(odd).staggering == 'column'
    assert kasteleyn_spec(odd).parity == 'odd'
    with pytest.raises(SchemaError):
        kasteleyn_spec(LatticeSpec(2, 2, odd, 'row', odd))


def test_dimer_free_energy_matches_coefficient_form(rng):
    spec = LatticeSpec(2, 2, random_ff_weights(rng, 'odd'), 'column', random_ff_weights(rng, 'odd'))
    via_det = dimer_free_energy(kasteleyn_spec(spec, 'odd'), grid=64).minus_beta_f
    via_coeffs = free_energy(integrand_coeffs(spec, 'odd_column'), grid=64).minus_beta_f
    assert via_det == pytest.approx(via_coeffs, rel=1e-10)


def test_finite_product_converges(rng):
    spec = LatticeSpec(2, 2, random_ff_weights(rng, 'even'), 'column', random_ff_weights(rng, 'even'))
    ks = kasteleyn_spec(spec, 'even')
    target = free_energy(integrand_coeffs(spec, 'even_column'), grid=256).minus_beta_f
    det = finite_det_product(ks, 64, 64)
    assert det.sqrt is not None
    assert det.free_energy_per_site == pytest.approx(target, abs=1e-6)
    with pytest.raises(SchemaError):
        finite_det_product(ks, 0, 4)


def test_regularized_dimer_determinant():
    ks = regularized_kasteleyn(close_packed_dimer_weights(), 'column')
    assert ks.staggering == 'column'
    values = ks.d(np.array([0.3, 1.7]), np.array([2.1, 0.4]))
    assert values.shape == (2,)
    assert np.all(np.isfinite(values))
    with pytest.raises(NumericDomainError):
        regularized_kasteleyn(Weights16.odd((1, 0, 1, 0, 1, 0, 0, 0)))


@pytest.mark.slow
def test_dimer_constant():
    ks = regularized_kasteleyn(close_packed_dimer_weights(), 'column')
    assert dimer_free_energy(ks).minus_beta_f == pytest.approx(CATALAN / np.pi, abs=1e-6)
