import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from enumeration import ising_bond_spin_oracle, ising_site_oracle, partition_enumerate
from free_fermion import ff_residual
from lattice_core import LatticeSpec, Weights16, random_weights, weights_to_json
from model_atlas import (
    PRESETS,
    IsingFieldParams,
    SpinCouplings,
    baxter_superbond_map,
    bipartite_spin_couplings,
    bipartite_spin_weights,
    build_preset,
    close_packed_dimer_weights,
    column_even_from_odd,
    column_odd_from_even,
    dimer_alternative_even,
    disorder_check,
    face_spin_map,
    face_spin_map_finite,
    independent_quantities,
    inverse_face_spin_map,
    ising_field_weights,
    ising_imaginary_field_odd_map,
    rae_weights_from_root,
    relabel_variants,
    relabel_weights,
    row_even_from_odd,
    staggered_relabel,
    staggered_spin_maps,
    staggered_spin_weights,
)
from sl2_invariants import invariants
from vertexlab_config import NumericDomainError, SchemaError


def test_ising_v1_at_unit_parameters_is_all_ones():
    emb = ising_field_weights(IsingFieldParams(1, 1, 1), 1)
    assert emb.weights == Weights16.ones()
    assert (emb.factor, emb.spins_per_vertex) == (1, 2)


@pytest.mark.parametrize('shape', [(1, 1), (2, 2), (2, 3)])
def test_ising_v1_matches_bond_spin_oracle(shape):
    K_h, K_v, field = 0.3, 0.45, 0.2
    emb = ising_field_weights(IsingFieldParams.from_couplings(K_h, K_v, field), 1)
    Z = partition_enumerate(LatticeSpec(*shape, emb.weights))
    assert_allclose(Z, ising_bond_spin_oracle(*shape, K_h, K_v, field), rtol=1e-10)


@pytest.mark.parametrize('shape', [(3, 3), (2, 4)])
def test_ising_v2_matches_site_oracle(shape):
    u, x = 0.4, 0.7
    emb = ising_field_weights(IsingFieldParams.isotropic(u, x), 2)
    Z = partition_enumerate(LatticeSpec(*shape, emb.weights))
    sites = shape[0] * shape[1]
    expected = emb.factor ** sites * ising_site_oracle(*shape, -np.log(u) / 2, -np.log(x))
    assert_allclose(Z, expected, rtol=1e-9)


def test_ising_embedding_errors():
    with pytest.raises(SchemaError):
        ising_field_weights(IsingFieldParams(0, 1, 1), 1)
    with pytest.raises(SchemaError):
        ising_field_weights(IsingFieldParams(0.5, 0.5, 1), 3)
    with pytest.raises(SchemaError):
        # lattice gas needs u_h == u_v
        ising_field_weights(IsingFieldParams(0.5, 0.6, 1), 2)
    with pytest.raises(NumericDomainError):
        ising_field_weights(IsingFieldParams.isotropic(1, 1), 2)


def test_imaginary_field_maps_at_zero_coupling():
    for variant in (1, 2, 3, 4):
        wt = ising_imaginary_field_odd_map(0, variant)
        assert wt.is_odd()
        assert_allclose(wt.v, [0.5] * 8)


@pytest.mark.parametrize('variant', [1, 2, 3, 4])
@pytest.mark.parametrize('shape', [(2, 2), (2, 4), (1, 2)])
def test_imaginary_field_maps_match_lattice_gas(variant, shape):
    u = 0.3
    ref = ising_field_weights(IsingFieldParams.isotropic(u, 1j), 2).weights
    Z_ref = partition_enumerate(LatticeSpec(*shape, ref))
    Z = partition_enumerate(LatticeSpec(*shape, ising_imaginary_field_odd_map(u, variant)))
    assert_allclose(Z, Z_ref, rtol=1e-9, atol=1e-12)


def test_imaginary_field_errors():
    with pytest.raises(SchemaError):
        ising_imaginary_field_odd_map(0.3, 5)
    with pytest.raises(NumericDomainError):
        ising_imaginary_field_odd_map(-1)


@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=6, max_size=6))
def test_face_spin_round_trip(values):
    J = SpinCouplings(*values)
    back = inverse_face_spin_map(face_spin_map(J))
    assert_allclose(back.as_array()[:6], J.as_array()[:6], atol=1e-10)


def test_finite_face_spin_without_odd_couplings_doubles():
    J = SpinCouplings(0.1, 0.2, -0.3, 0.4, 0.05, -0.2)
    assert_allclose(face_spin_map_finite(J).as_vector(), 2 * face_spin_map(J).as_vector())


def test_inverse_face_spin_rejects_bad_weights():
    with pytest.raises(SchemaError):
        inverse_face_spin_map(Weights16.ones())
    with pytest.raises(NumericDomainError):
        inverse_face_spin_map(Weights16.even((1, -1, 1, 1, 1, 1, 1, 1)))


def test_staggered_spin_maps_recover_couplings(rng):
    Ja = SpinCouplings.from_array(rng.uniform(-0.5, 0.5, 8))
    Jb = SpinCouplings.from_array(rng.uniform(-0.5, 0.5, 8))
    spec = LatticeSpec(2, 2, staggered_spin_weights(Ja), 'bipartite', staggered_spin_weights(Jb))
    got_a, got_b = staggered_spin_maps(spec)
    assert_allclose(got_a.as_array(), Ja.as_array(), atol=1e-10)
    assert_allclose(got_b.as_array(), Jb.as_array(), atol=1e-10)
    with pytest.raises(SchemaError):
        staggered_spin_maps(LatticeSpec(2, 2, staggered_spin_weights(Ja)))


@pytest.mark.parametrize('shape', [(2, 2), (2, 4)])
def test_bipartite_spin_couplings_keep_partition_function(rng, shape):
    Ja = SpinCouplings.from_array(rng.uniform(-0.5, 0.5, 8))
    Jb = SpinCouplings.from_array(rng.uniform(-0.5, 0.5, 8))
    spec = LatticeSpec(*shape, staggered_spin_weights(Ja), 'bipartite', staggered_spin_weights(Jb))
    J = np.array(bipartite_spin_couplings(spec))
    a, b = Ja.as_array(), Jb.as_array()
    shared = [(a[0] + b[0]) / 2, (a[1] + b[3]) / 2, (a[2] + b[4]) / 2, (a[3] + b[1]) / 2, (a[4] + b[2]) / 2]
    assert_allclose(J, shared + list(a[5:]) + list(b[5:]), atol=1e-10)
    folded = spec.with_cells(*bipartite_spin_weights(J))
    assert_allclose(partition_enumerate(folded), partition_enumerate(spec), rtol=1e-10)
    assert_allclose(bipartite_spin_couplings(folded), J, atol=1e-10)


def test_bipartite_spin_couplings_errors(rng):
    wt = staggered_spin_weights(SpinCouplings.from_array(rng.uniform(-0.5, 0.5, 8)))
    with pytest.raises(SchemaError):
        bipartite_spin_couplings(LatticeSpec(2, 2, wt, 'column', wt))
    with pytest.raises(SchemaError):
        bipartite_spin_weights(np.zeros(8))


@pytest.mark.parametrize('staggering, prefix', [('bipartite', 'u'), ('column', 't')])
def test_independent_quantities_keys(rng, staggering, prefix):
    spec = LatticeSpec(2, 2, random_weights(rng, 'even', real=True), staggering,
                       random_weights(rng, 'even', real=True))
    q = independent_quantities(spec)
    assert list(q) == [f'{prefix}{k}' for k in range(1, 12)]
    a, b = spec.cells
    assert_allclose(q[f'{prefix}1'], a.w[0] * b.w[0])


def test_independent_quantities_errors(rng):
    with pytest.raises(SchemaError):
        independent_quantities(LatticeSpec(2, 2, random_weights(rng, 'even')))
    with pytest.raises(NumericDomainError):
        independent_quantities(LatticeSpec(2, 2, Weights16.ones(), 'bipartite', Weights16.even((0,) * 8)))


@pytest.mark.parametrize('staggering, shape', [('column', (2, 2)), ('row', (2, 2)), ('bipartite', (2, 2))])
def test_relabel_keeps_partition_function(rng, staggering, shape):
    spec = LatticeSpec(*shape, random_weights(rng), staggering, random_weights(rng))
    Z = partition_enumerate(spec)
    for edge, swap in relabel_variants(staggering):
        assert_allclose(partition_enumerate(staggered_relabel(spec, edge, swap)), Z, rtol=1e-10)


def test_relabel_is_an_involution(rng):
    wt = random_weights(rng)
    for flip in (1, 2, 4, 8):
        assert_allclose(relabel_weights(relabel_weights(wt, flip), flip).as_vector(), wt.as_vector())
    spec = LatticeSpec(2, 2, random_weights(rng), 'bipartite', random_weights(rng))
    assert staggered_relabel(staggered_relabel(spec, 'c'), 'c') == spec


def test_relabel_validation(rng):
    wt = random_weights(rng)
    with pytest.raises(SchemaError):
        staggered_relabel(LatticeSpec(2, 2, wt, 'column', wt), 'x')
    with pytest.raises(SchemaError):
        staggered_relabel(LatticeSpec(2, 2, wt, 'column', wt), 'c')
    with pytest.raises(SchemaError):
        staggered_relabel(LatticeSpec(2, 3, wt, 'column', wt), 'a')
    with pytest.raises(SchemaError):
        staggered_relabel(LatticeSpec(3, 2, wt, 'row', wt), 'd')


@pytest.mark.parametrize('shape', [(2, 2), (2, 4)])
def test_column_even_from_odd(rng, shape):
    odd = random_weights(rng, 'odd')
    spec = column_even_from_odd(odd, *shape)
    assert spec.staggering == 'column'
    assert all(cell.is_even() for cell in spec.cells)
    assert_allclose(partition_enumerate(spec), partition_enumerate(LatticeSpec(*shape, odd)), rtol=1e-10)


def test_row_even_from_odd(rng):
    odd = random_weights(rng, 'odd')
    spec = row_even_from_odd(odd, 2, 2)
    assert spec.staggering == 'row'
    assert all(cell.is_even() for cell in spec.cells)
    assert_allclose(partition_enumerate(spec), partition_enumerate(LatticeSpec(2, 2, odd)), rtol=1e-10)


def test_parity_helpers_check_input(rng):
    with pytest.raises(SchemaError):
        column_even_from_odd(random_weights(rng, 'even'))
    with pytest.raises(SchemaError):
        column_odd_from_even(random_weights(rng, 'odd'))
    assert all(cell.is_odd() for cell in column_odd_from_even(random_weights(rng, 'even')).cells)


def test_baxter_superbond_invariants():
    odd, even = baxter_superbond_map(1.0, 0.7)
    assert odd == close_packed_dimer_weights(1.0, 0.7)
    assert abs(invariants(odd).I1) < 1e-14
    assert_allclose(invariants(even).I1, (2 * 1.0 + 2 * 0.7) / 4)
    assert abs(ff_residual(even, 'even')) < 1e-12


def test_dimer_alternative_is_free_fermion():
    wt = dimer_alternative_even(1.0, 0.6)
    assert wt.is_even()
    assert abs(ff_residual(wt, 'even')) < 1e-12


def test_rae_constructed_point_holds(rng):
    base = random_weights(rng, real=True, low=0.4, high=1.2)
    z = 0.8
    wt = rae_weights_from_root(base, z)
    result = disorder_check(wt, 'rae')
    assert (result.holds, result.branch) == (True, 'general')
    assert result.residual < 1e-9
    assert len(result.resultants) == 6
    assert max(abs(r) for r in result.resultants) < 1e-9 * wt.scale() ** 4


def test_rae_generic_point_fails(rng):
    result = disorder_check(random_weights(rng, real=True), 'rae')
    assert not result.holds
    assert max(abs(r) for r in result.resultants) > 1e-6


def test_rae_degenerate_branch():
    wt = Weights16.ones().with_labels(w5=0, w8=0, v5=0, v8=0)
    result = disorder_check(wt, 'rae')
    assert (result.holds, result.branch, result.witness) == (True, 'w5=w8=v5=v8=0', None)
    assert result.resultants == ()


def test_rae_zero_weight_outside_branches():
    with pytest.raises(SchemaError):
        disorder_check(Weights16.ones().with_labels(w1=0), 'rae')


def test_peschel_branches():
    w1, w2, w5, w7 = 1.2, 0.8, 0.3, 0.4
    root = np.sqrt(4 * w7 * w7 + (w1 - w2) ** 2)
    w3 = (root + w1 + w2) / 2 - w5
    result = disorder_check(Weights16.even((w1, w2, w3, w3, w5, w5, w7, w7)), 'peschel')
    assert (result.holds, result.branch) == (True, '+')
    off = disorder_check(Weights16.even((w1, w2, w3 + 0.1, w3 + 0.1, w5, w5, w7, w7)), 'peschel')
    assert not off.holds
    with pytest.raises(SchemaError):
        disorder_check(Weights16.even((1, 1, 1, 2, 1, 1, 1, 1)), 'peschel')
    with pytest.raises(SchemaError):
        disorder_check(Weights16.ones(), 'nishimori')


@pytest.mark.parametrize('name', sorted(n for n, p in PRESETS.items() if p.params != ('weights',)))
def test_every_preset_builds(name):
    spec = build_preset(name)
    assert (spec.rows, spec.cols) == (2, 2)
    assert np.all(np.isfinite(spec.cell_a.as_vector()))


def test_preset_face_spin_defaults_to_ones():
    assert build_preset('face-spin').cell_a == Weights16.even((1,) * 8)


def test_relabel_preset(rng):
    odd = random_weights(rng, 'odd', real=True)
    spec = build_preset('column-even-from-odd', {'weights': weights_to_json(odd)}, rows=2, cols=4)
    assert spec == column_even_from_odd(odd, 2, 4)


def test_preset_errors():
    with pytest.raises(SchemaError):
        build_preset('potts')
    with pytest.raises(SchemaError):
        build_preset('hard-hexagon', {'q': 2})
    with pytest.raises(SchemaError):
        build_preset('row-odd-from-even')
