import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from free_fermion import (
    BIPTOCOL_TERMS,
    CATALAN,
    COLUMN_CRITICAL_CORNERS,
    FAMILIES,
    biptocol_conditions,
    column_as_bipartite,
    column_critical_partner,
    constant_coeffs,
    critical_conditions,
    dimer_free_energy_oracle,
    ff_even_from_odd,
    ff_even_from_odd_branches,
    ff_residual,
    free_energy,
    integrand_coeffs,
    magnetization,
    omega2,
    onsager_free_energy,
    random_ff_weights,
)
from lattice_core import LatticeSpec, Weights16
from model_atlas import ising_square_weights
from vertexlab_config import NumericDomainError, SchemaError

K_CRITICAL = np.arcsinh(1) / 2


def test_ff_residuals():
    wt = Weights16.ones()
    for which in ('even', 'odd', 'even_ti', 'odd_ti'):
        assert ff_residual(wt, which) == 0
    assert ff_residual(Weights16.even((2, 1, 1, 1, 1, 1, 1, 1)), 'even') == 1
    with pytest.raises(SchemaError):
        ff_residual(wt, 'mixed')


@pytest.mark.parametrize('parity', ['even', 'odd'])
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_random_ff_weights(parity, seed):
    wt = random_ff_weights(np.random.default_rng(seed), parity)
    assert abs(ff_residual(wt, parity)) < 1e-12
    side = wt.w if parity == 'even' else wt.v
    assert side[0].real > 0


def test_constant_integrand_normalisation():
    result = free_energy(constant_coeffs(np.e ** 2))
    assert result.minus_beta_f == pytest.approx(1.0)
    assert result.delta == pytest.approx(0, abs=1e-12)


def test_quadrature_errors():
    with pytest.raises(SchemaError):
        free_energy(constant_coeffs(2.0), grid=7)
    with pytest.raises(NumericDomainError):
        free_energy(constant_coeffs(-1.0), grid=8)


def test_thread_count_does_not_change_result(rng):
    coeffs = integrand_coeffs(random_ff_weights(rng, 'even'), 'even_homog')
    a = free_energy(coeffs, grid=64, threads=1).minus_beta_f
    b = free_energy(coeffs, grid=64, threads=4).minus_beta_f
    assert a == pytest.approx(b, rel=1e-13)


def test_integrand_coeffs_preconditions(rng):
    even = random_ff_weights(rng, 'even')
    with pytest.raises(SchemaError):
        integrand_coeffs(even, 'no_such_family')
    with pytest.raises(SchemaError):
        integrand_coeffs(even, 'odd_homog_E1')
    with pytest.raises(NumericDomainError):
        integrand_coeffs(even.with_labels(w1=even['w1'] + 1), 'even_homog')
    spec = LatticeSpec(2, 2, even, 'column', random_ff_weights(rng, 'even'))
    with pytest.raises(SchemaError):
        integrand_coeffs(spec, 'even_homog')
    assert set(integrand_coeffs(spec, 'even_column').values) == set('ABCDEGHI')


def test_every_family_builds(rng):
    for name, family in FAMILIES.items():
        wt = random_ff_weights(rng, family.parity)
        coeffs = integrand_coeffs(wt, name)
        assert coeffs.family == name
        assert {entry[0] for entry in family.pattern} == set(coeffs.values)


def test_ising_square_is_onsager():
    K = 0.3
    vertex = free_energy(integrand_coeffs(ising_square_weights(K, K), 'even_homog')).minus_beta_f
    assert vertex == pytest.approx(onsager_free_energy(K, K), abs=1e-8)


def test_onsager_at_infinite_temperature():
    assert onsager_free_energy(0, 0) == pytest.approx(np.log(2))


@pytest.mark.parametrize('parity, pair', [
    ('odd', ('odd_homog_E1', 'odd_homog_E2')),
    ('even', ('even_homog_E3', 'even_homog_E4')),
])
def test_homogeneous_forms_agree(rng, parity, pair):
    wt = random_ff_weights(rng, parity)
    a, b = (free_energy(integrand_coeffs(wt, f)).minus_beta_f for f in pair)
    assert a == pytest.approx(b, rel=1e-8)


def test_omega_labels_on_ising_square():
    assert omega2(ising_square_weights(K_CRITICAL, K_CRITICAL)).label == 'critical'
    assert omega2(ising_square_weights(0.6, 0.6)).label == 'ordered'
    assert omega2(ising_square_weights(0.2, 0.2)).label == 'disordered'


def test_magnetization_matches_yang():
    K = 0.6
    expected = (1 - np.sinh(2 * K) ** -4) ** 0.125
    assert magnetization(omega2(ising_square_weights(K, K))) == pytest.approx(expected)
    assert magnetization(omega2(ising_square_weights(0.2, 0.2))) == 0.0
    with pytest.raises(NumericDomainError):
        magnetization(1 + 1j)


def test_omega_errors():
    with pytest.raises(NumericDomainError):
        omega2(Weights16.even((1, 1, 1, 1, 0, 1, 1, 1)))
    with pytest.raises(NumericDomainError):
        omega2(Weights16.even((0, 1, 1, 1, 1, 1, 1, 1)), form=2)
    with pytest.raises(SchemaError):
        omega2(Weights16.ones(), form=3)


@pytest.mark.parametrize('corner', range(4))
def test_column_critical_corners(rng, corner):
    a = random_ff_weights(rng, 'even')
    b = column_critical_partner(a, random_ff_weights(rng, 'even'), corner)
    assert abs(ff_residual(b, 'even')) < 1e-10
    spec = LatticeSpec(2, 2, a, 'column', b)
    assert abs(critical_conditions(spec, 'even_column')[corner]) < 1e-10
    value = integrand_coeffs(spec, 'even_column').integrand(*COLUMN_CRITICAL_CORNERS[corner])
    assert abs(value) < 1e-9


def test_critical_conditions_unknown_family():
    with pytest.raises(SchemaError):
        critical_conditions(Weights16.ones(), 'row')


def test_odd_critical_conditions_length():
    assert len(critical_conditions(Weights16.odd((1,) * 8), 'odd_homog')) == 4
    assert len(critical_conditions(LatticeSpec(2, 2, Weights16.ones(), 'bipartite', Weights16.ones()),
                                   'even_bipartite')) == 4


def test_biptocol_conditions_on_ones():
    conditions = biptocol_conditions(Weights16.ones())
    assert len(conditions) == 4
    assert all(r == (0, 0) for r in conditions.values())


def _biptocol_cell(rng, condition):
    # free-fermion weights with the named pair of products equal
    x = rng.uniform(0.3, 1.3, 8)
    if condition.endswith(('w7w8', 'v7v8')):
        x[6] = x[2] * x[3] / x[7]
        x[0] = x[4] * x[5] / x[1]
    else:
        x[4] = x[2] * x[3] / x[5]
        x[0] = x[6] * x[7] / x[1]
    return Weights16.even(x) if condition.startswith('even') else Weights16.odd(x)


@pytest.mark.parametrize('condition', sorted(BIPTOCOL_TERMS))
def test_column_matches_bipartite_under_condition(rng, condition):
    parity = condition.split(':')[0]
    vanishing, dropped, _ = BIPTOCOL_TERMS[condition]
    for _ in range(2):
        spec = LatticeSpec(2, 2, _biptocol_cell(rng, condition), 'column', _biptocol_cell(rng, condition))
        assert_allclose(biptocol_conditions(spec)[condition], (0, 0), atol=1e-12)
        column = integrand_coeffs(spec, f'{parity}_column')
        bipartite = integrand_coeffs(spec, f'{parity}_bipartite')
        assert all(abs(column[name]) < 1e-12 for name in vanishing)
        assert abs(bipartite[dropped]) < 1e-12
        rewritten = column_as_bipartite(spec, condition)
        assert rewritten.pattern == bipartite.pattern
        assert rewritten[dropped] == 0
        assert_allclose(free_energy(rewritten).minus_beta_f, free_energy(column).minus_beta_f, rtol=1e-8)


def test_biptocol_conditions_fail_on_generic_weights(rng):
    spec = LatticeSpec(2, 2, random_ff_weights(rng, 'even'), 'column', random_ff_weights(rng, 'even'))
    residuals = biptocol_conditions(spec)
    assert min(abs(r) for key in ('even: w3w4 = w7w8', 'even: w3w4 = w5w6') for r in residuals[key]) > 1e-6
    column = integrand_coeffs(spec, 'even_column')
    assert abs(column['E']) > 1e-6 and abs(column['D']) > 1e-6
    with pytest.raises(NumericDomainError, match='does not hold'):
        column_as_bipartite(spec, 'even: w3w4 = w7w8')
    with pytest.raises(SchemaError):
        column_as_bipartite(spec, 'even: w1w2 = w5w6')


def test_condition_in_one_cell_only_is_not_enough(rng):
    condition = 'odd: v3v4 = v7v8'
    spec = LatticeSpec(2, 2, _biptocol_cell(rng, condition), 'column', random_ff_weights(rng, 'odd'))
    a, b = biptocol_conditions(spec)[condition]
    assert abs(a) < 1e-12 and abs(b) > 1e-6
    with pytest.raises(NumericDomainError):
        column_as_bipartite(spec, condition)


def test_even_image_of_odd_model(rng):
    for _ in range(5):
        odd = random_ff_weights(rng, 'odd')
        c_odd = integrand_coeffs(odd, 'odd_homog_E1')
        c_even = integrand_coeffs(ff_even_from_odd(odd), 'even_homog', check_ff=False)
        expected = (2 * c_odd['A'], c_odd['D'], -c_odd['E'], -c_odd['F'], -c_odd['G'])
        assert_allclose([c_even[k] for k in 'ABCDE'], expected, rtol=1e-10, atol=1e-12)


def test_odd_free_energy_is_half_the_even_image(rng):
    odd = random_ff_weights(rng, 'odd')
    f_odd = free_energy(integrand_coeffs(odd, 'odd_homog_E1')).minus_beta_f
    f_even = free_energy(integrand_coeffs(ff_even_from_odd(odd), 'even_homog', check_ff=False)).minus_beta_f
    assert f_odd == pytest.approx(f_even / 2, rel=1e-8)


def test_even_image_branches(rng):
    branches = ff_even_from_odd_branches(random_ff_weights(rng, 'odd'))
    assert 1 <= len(branches) <= 16
    assert all(b.is_even() for b in branches)
    with pytest.raises(SchemaError):
        ff_even_from_odd(Weights16.ones())


def test_dimer_oracle_is_catalan():
    assert dimer_free_energy_oracle() == pytest.approx(CATALAN / np.pi, rel=1e-10)
