#!/usr/bin/env python3
"""
Acceptance run: every cross-check between the independent evaluation paths,
with fixed seeds, summarised in reports/acceptance.json.

Run by hand or from cron: ./venv/bin/python run_acceptance.py

Checks:
- Transfer matrix against enumeration
- Z invariance under the 32 lattice symmetries
- Topology equations and bond fugacities
- Weak-graph transformations
- SL(2) x SL(2) invariants and their relation sets
- Invariant-preserving and imaginary-field mappings on finite tori
- Kasteleyn determinants against the coefficient integrands
- Even/odd free-fermion correspondence and the strip oracle
- Dimer and strip anchors
- Staggered relabelings and column criticality
"""

import time
from datetime import datetime

import numpy as np
import pandas as pd

from enumeration import config_census, partition_enumerate
from free_fermion import (
    COLUMN_CRITICAL_CORNERS,
    column_critical_partner,
    dimer_free_energy_oracle,
    ff_even_from_odd,
    ff_residual,
    free_energy,
    integrand_coeffs,
    random_ff_weights,
)
from kasteleyn_dimer import d_theta, dimer_free_energy, kasteleyn_spec, regularized_kasteleyn
from lattice_core import STAGGERINGS, BondFugacities, LatticeSpec, Weights16, check_topology, decorated_cells, random_weights
from model_atlas import (
    IsingFieldParams,
    close_packed_dimer_weights,
    ising_field_weights,
    ising_imaginary_field_odd_map,
    relabel_variants,
    staggered_relabel,
)
from sl2_invariants import (
    TABULATED_M_INDEX,
    admissible_even_input,
    admissible_odd_input,
    class_check,
    closed_form_invariants,
    invariant_mapping,
    invariants,
    linear_action_matrix,
    random_pair,
    sl2_transform,
    tabulated_action_matrix,
    weak_graph_pair,
)
from symmetry_group import symmetry_invariance
from transfer_matrix import free_energy_strip, partition_transfer
from vertexlab_config import REPORT_DIR, atomic_write_json, setup_logging
from weak_graph import CHAR_POLYS, antisym_even_to_sym_odd, apply_weak_graph, char_poly_class, weak_graph_matrix

logger = setup_logging('acceptance')

SEED = 20240611


def rel(a, b):
    return float(abs(a - b) / max(abs(a), abs(b), 1e-300))


def result(name, metric, threshold, **detail):
    passed = bool(metric <= threshold)
    print(f"  {name}: {metric:.3e} (threshold {threshold:.0e}) {'PASS' if passed else 'FAIL'}")
    return {'criterion': name, 'metric': float(metric), 'threshold': threshold, 'passed': passed, **detail}


def check_oracle_agreement(rng):
    worst = 0.0
    for _ in range(50):
        staggering = STAGGERINGS[rng.integers(len(STAGGERINGS))]
        rows, cols = (int(x) for x in rng.integers(1, 4, 2))
        b = random_weights(rng) if staggering != 'homogeneous' else None
        spec = LatticeSpec(rows, cols, random_weights(rng), staggering, b)
        worst = max(worst, rel(partition_transfer(spec), partition_enumerate(spec)))
    return result('oracle agreement', worst, 1e-10)


def check_symmetry(rng):
    worst = 0.0
    for _ in range(20):
        wt = random_weights(rng)
        for n in (2, 3):
            worst = max(worst, symmetry_invariance(wt, n, n, partition_transfer))
    return result('symmetry suite', worst, 1e-9)


def check_topology_suite(rng):
    spec = LatticeSpec(2, 3, Weights16.ones())
    census = config_census(spec)
    violations = sum(mult for stats, mult in census if not check_topology(stats))
    worst = float(violations)
    for _ in range(5):
        f = BondFugacities(*(rng.uniform(0.5, 1.5, 4) + 1j * rng.uniform(-0.5, 0.5, 4)))
        spec = LatticeSpec(2, 3, random_weights(rng), 'column', random_weights(rng), f)
        a, b = decorated_cells(spec)
        folded = LatticeSpec(2, 3, a, 'column', b)
        worst = max(worst, rel(partition_enumerate(spec), partition_enumerate(folded)))
    return result('topology suite', worst, 1e-12, configurations=sum(m for _, m in census), violations=violations)


def check_weak_graph(rng):
    worst = 0.0
    for rows in (1, 2, 3):
        for cols in (1, 2, 3):
            wt = random_weights(rng)
            Z = partition_transfer(LatticeSpec(rows, cols, wt))
            for variant in (1, 2, 3, 4):
                worst = max(worst, rel(Z, partition_transfer(LatticeSpec(rows, cols, apply_weak_graph(wt, variant)))))
    structure = (apply_weak_graph(random_weights(rng, 'even')).is_symmetric()
                 and apply_weak_graph(random_weights(rng, 'odd')).is_antisymmetric())
    minimal = {k: char_poly_class(k)['minimal'] for k in (1, 2, 3, 4)}
    pairs = {k: weak_graph_pair(k) for k in (1, 2, 3, 4)}
    gauge = max(float(np.max(np.abs(linear_action_matrix(p.S, p.T) - weak_graph_matrix(k)))) for k, p in pairs.items())
    worst = max(worst, gauge)
    for _ in range(5):
        v = rng.uniform(0.2, 1.2, 4)
        odd = Weights16.odd(np.repeat(v, 2))
        even = antisym_even_to_sym_odd(odd)
        for rows, cols in ((2, 2), (2, 4)):
            worst = max(worst, rel(partition_enumerate(LatticeSpec(rows, cols, odd)),
                                   partition_enumerate(LatticeSpec(rows, cols, even))))
    if not structure or any(m not in CHAR_POLYS for m in minimal.values()):
        worst = np.inf
    return result('weak-graph suite', worst, 1e-9, minimal_polynomials=minimal, sl2_gauge_gap=gauge)


def check_invariants(rng):
    worst = 0.0
    for _ in range(100):
        wt = random_weights(rng)
        worst = max(worst, invariants(wt).max_relative_difference(invariants(sl2_transform(wt, random_pair(rng)))))
    closed = 0.0
    relations = 0.0
    for parity, which in (('even', 'even'), ('odd', 'odd')):
        for _ in range(10):
            wt = random_weights(rng, parity)
            I = invariants(wt)
            closed = max(closed, I.max_relative_difference(closed_form_invariants(wt, parity)))
            relations = max(relations, max(class_check(I, which)['residuals'].values()))
    g = random_pair(rng)
    wt = random_weights(rng)
    A = linear_action_matrix(g.S, g.T)
    path = float(np.max(np.abs(A @ wt.as_vector() - sl2_transform(wt, g).as_vector())))
    det = abs(np.linalg.det(A) - 1)
    order = np.argmax(np.abs(tabulated_action_matrix(np.eye(2), np.eye(2))), axis=1)
    table = tabulated_action_matrix(g.S, g.T)
    tabulated = float(np.max(np.abs(table[:, order] - linear_action_matrix(g.S, g.T, TABULATED_M_INDEX))))
    print(f"  closed forms {closed:.3e}, relation sets {relations:.3e}, matrix path {path:.3e}, |det - 1| {det:.3e}")
    print(f"  tabulated action vs permuted layout {tabulated:.3e}, its det {complex(np.linalg.det(table)):.6g}")
    metric = max(worst / 1e-8, closed / 1e-11, relations / 1e-9, path / 1e-10, det / 1e-10, tabulated / 1e-10) * 1e-8
    return result('invariant suite', metric, 1e-8, closed_form=closed, relation_sets=relations,
                  matrix_path=path, determinant_gap=float(det), tabulated_gap=tabulated)


def check_mappings(rng):
    worst = 0.0
    for which in (1, 2, 3):
        for _ in range(10):
            sources = [admissible_odd_input(rng, which), admissible_even_input(rng, which)]
            for source in sources:
                for image in invariant_mapping(source, which):
                    for rows, cols in ((2, 2), (2, 4)):
                        worst = max(worst, rel(partition_enumerate(LatticeSpec(rows, cols, source)),
                                               partition_enumerate(LatticeSpec(rows, cols, image))))
    for _ in range(10):
        u = rng.uniform(0.1, 0.8)
        ref = ising_field_weights(IsingFieldParams.isotropic(u, 1j), 2).weights
        for variant in (1, 2):
            mapped = ising_imaginary_field_odd_map(u, variant)
            for rows, cols in ((2, 2), (2, 4)):
                worst = max(worst, rel(partition_enumerate(LatticeSpec(rows, cols, ref)),
                                       partition_enumerate(LatticeSpec(rows, cols, mapped))))
    return result('finite-torus mapping suite', worst, 1e-8)


def check_integrands(rng):
    worst = 0.0
    for parity in ('odd', 'even'):
        for staggering in ('column', 'bipartite'):
            family = f'{parity}_{staggering}'
            for _ in range(20):
                spec = LatticeSpec(2, 2, random_ff_weights(rng, parity, real=False), staggering,
                                   random_ff_weights(rng, parity, real=False))
                t1, t2 = rng.uniform(0, 2 * np.pi, 2)
                D = d_theta(kasteleyn_spec(spec, parity), t1, t2)
                E = integrand_coeffs(spec, family).integrand(t1, t2)
                worst = max(worst, rel(D, E))
    homog = 0.0
    for parity, pair in (('odd', ('odd_homog_E1', 'odd_homog_E2')), ('even', ('even_homog_E3', 'even_homog_E4'))):
        wt = random_ff_weights(rng, parity)
        a, b = (free_energy(integrand_coeffs(wt, f)).minus_beta_f for f in pair)
        homog = max(homog, rel(a, b))
    print(f"  determinant vs coefficient form {worst:.3e}, homogeneous bipartite vs column {homog:.3e}")
    return result('free-fermion integrand suite', max(worst / 1e-9, homog / 1e-8) * 1e-9, 1e-9,
                  determinant=worst, homogeneous=homog)


def check_even_odd_correspondence(rng):
    coeff_gap = 0.0
    fe_gap = 0.0
    for _ in range(10):
        odd = random_ff_weights(rng, 'odd')
        c_odd = integrand_coeffs(odd, 'odd_homog_E1')
        c_even = integrand_coeffs(ff_even_from_odd(odd), 'even_homog', check_ff=False)
        expected = (2 * c_odd['A'], c_odd['D'], -c_odd['E'], -c_odd['F'], -c_odd['G'])
        got = tuple(c_even[k] for k in 'ABCDE')
        coeff_gap = max(coeff_gap, max(rel(x, y) for x, y in zip(got, expected)))
        fe_gap = max(fe_gap, rel(free_energy(c_odd).minus_beta_f, free_energy(c_even).minus_beta_f / 2))
    odd = random_ff_weights(np.random.default_rng(SEED), 'odd')
    strip = free_energy_strip(LatticeSpec(2, 8, odd)).minus_beta_f.real
    e_form = free_energy(integrand_coeffs(odd, 'odd_homog_E1')).minus_beta_f
    s4_form = free_energy(integrand_coeffs(odd, 'odd_homog_s4'), grid=128).minus_beta_f
    print(f"  coefficients {coeff_gap:.3e}, free energies {fe_gap:.3e}")
    print(f"  strip N=8 {strip:.6f}: integral form gap {abs(strip - e_form):.3e}, short form gap {abs(strip - s4_form):.3e}")
    metric = max(coeff_gap / 1e-10, fe_gap / 1e-8, abs(strip - e_form) / 5e-3) * 1e-10
    return result('even/odd free-fermion mapping', metric, 1e-10, coefficients=coeff_gap, free_energy=fe_gap,
                  strip_gap=abs(strip - e_form), short_form_gap=abs(strip - s4_form))


def check_anchors(rng):
    ks = regularized_kasteleyn(close_packed_dimer_weights(1, 1), 'column')
    dimer = dimer_free_energy(ks).minus_beta_f
    oracle = dimer_free_energy_oracle()
    even = random_ff_weights(rng, 'even')
    target = free_energy(integrand_coeffs(even, 'even_homog')).minus_beta_f
    gaps = [abs(free_energy_strip(LatticeSpec(2, n, even)).minus_beta_f.real - target) for n in (6, 8)]
    monotone = gaps[1] <= gaps[0]
    print(f"  dimer {dimer:.10f} vs oracle {oracle:.10f}; strip gaps {gaps[0]:.3e}, {gaps[1]:.3e}")
    metric = max(abs(dimer - oracle) / 1e-6, gaps[1] / 5e-3) * 1e-6
    if not monotone:
        metric = np.inf
    return result('quantitative anchors', metric, 1e-6, dimer=dimer, oracle=oracle, strip_gaps=gaps)


def check_relabel(rng):
    worst = 0.0
    for staggering in ('column', 'row', 'bipartite'):
        a = Weights16.from_vector(rng.integers(-2, 3, 16) + 1j * rng.integers(-2, 3, 16))
        b = Weights16.from_vector(rng.integers(-2, 3, 16) + 1j * rng.integers(-2, 3, 16))
        spec = LatticeSpec(2, 2, a, staggering, b)
        Z = partition_enumerate(spec)
        for edge, swap in relabel_variants(staggering):
            Z2 = partition_enumerate(staggered_relabel(spec, edge, swap))
            worst = max(worst, abs(Z2 - Z))
    ff = 0.0
    for _ in range(5):
        spec = LatticeSpec(2, 2, random_ff_weights(rng, 'odd'), 'column', random_ff_weights(rng, 'odd'))
        for edge, swap in relabel_variants('column'):
            for cell in staggered_relabel(spec, edge, swap).cells:
                ff = max(ff, abs(ff_residual(cell, 'even')))
    critical = 0.0
    for corner, angles in enumerate(COLUMN_CRITICAL_CORNERS):
        a = random_ff_weights(rng, 'even')
        b = column_critical_partner(a, random_ff_weights(rng, 'even'), corner)
        spec = LatticeSpec(2, 2, a, 'column', b)
        value = integrand_coeffs(spec, 'even_column').integrand(*angles)
        critical = max(critical, abs(value) / max(a.scale(), b.scale()) ** 4)
    print(f"  integer relabel gap {worst:.3e}, relabeled FF residual {ff:.3e}, critical corner {critical:.3e}")
    metric = max(worst, ff, critical * 1e-3)
    return result('staggered relabel suite', metric, 1e-12, relabel=float(worst), ff=ff, critical=float(critical))


CHECKS = (
    check_oracle_agreement,
    check_symmetry,
    check_topology_suite,
    check_weak_graph,
    check_invariants,
    check_mappings,
    check_integrands,
    check_even_odd_correspondence,
    check_anchors,
    check_relabel,
)


def main():
    print("=" * 60)
    print(f"vertexlab acceptance run - {datetime.now().isoformat()}")
    print("=" * 60)

    rng = np.random.default_rng(SEED)
    records = []
    for check in CHECKS:
        print(f"\n{check.__name__}")
        start = time.time()
        try:
            record = check(rng)
        except Exception as e:
            logger.error(f"{check.__name__} raised: {e}")
            record = {'criterion': check.__name__, 'passed': False, 'error': str(e)}
        record['seconds'] = round(time.time() - start, 2)
        records.append(record)

    summary = pd.DataFrame.from_records(records)[['criterion', 'passed', 'seconds']]
    print("\n" + summary.to_string(index=False))

    report = {'_generated_at': datetime.now().isoformat(), 'seed': SEED, 'criteria': records}
    atomic_write_json(REPORT_DIR / 'acceptance.json', report)

    print("\n" + "=" * 60)
    print(f"{int(summary['passed'].sum())}/{len(summary)} criteria passed; report in {REPORT_DIR / 'acceptance.json'}")
    print("=" * 60)


if __name__ == '__main__':
    main()
