#!/usr/bin/env python3
"""
vertexlab command line.

Every subcommand reads a JSON model spec (see lattice_core) and prints one
JSON document on stdout. Complex numbers are [re, im] pairs. Logs go to
stderr; errors are written there as {"error": kind, "message": ...} with
exit code 2 (bad spec or precondition), 3 (numeric domain) or 4 (size cap).

Usage:
    python vertexlab.py z --model m.json --method enumerate
    python vertexlab.py invariants --model odd.json
    python vertexlab.py free-energy --model even.json --family even_homog --grid 256
    python vertexlab.py dimer --model spec.json --parity odd --mode finite --rows 8 --cols 8
    python vertexlab.py map --name weakgraph --variant 1 --model spec.json
    python vertexlab.py preset --name ising-field-v1 --params '{"uh": 0.5, "uv": 0.7, "x": 1}'
    python vertexlab.py check --property mapping-invariant1 --trials 20 --seed 7
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from enumeration import census_frame, config_census, partition_enumerate
from free_fermion import FAMILIES, ff_even_from_odd, ff_residual, free_energy, integrand_coeffs
from kasteleyn_dimer import d_theta, dimer_free_energy, finite_det_product, kasteleyn_spec, regularized_kasteleyn
from lattice_core import LatticeSpec, check_topology, complex_pair, random_weights, spec_from_json, spec_to_json
from model_atlas import (
    PRESETS,
    IsingFieldParams,
    build_preset,
    disorder_check,
    ising_field_weights,
    ising_imaginary_field_odd_map,
    relabel_variants,
    staggered_relabel,
)
from sl2_invariants import admissible_even_input, admissible_odd_input, class_check, invariant_mapping, invariants
from symmetry_group import apply_symmetry, element, symmetry_invariance
from transfer_matrix import free_energy_strip, partition_transfer
from vertexlab_config import DEFAULT_GRID, DEFAULT_TOL, SchemaError, VertexLabError, setup_logging
from weak_graph import antisym_even_to_sym_odd, apply_weak_graph, sym_odd_to_antisym_even

logger = setup_logging('vertexlab')

METHODS = ('enumerate', 'transfer')
MAP_NAMES = ('weakgraph', 'symmetry', 'invariant1', 'invariant2', 'invariant3', 'relabel',
             'ff-even', 'antisym-even', 'sym-odd')
CHECKS = ('topology', 'symmetry', 'weak-graph', 'mapping-invariant1', 'mapping-invariant2',
          'mapping-invariant3', 'imaginary-field', 'relabel', 'classes', 'disorder-rae', 'disorder-peschel', 'ff')


def to_jsonable(obj):
    """Complex -> [re, im]; numpy scalars and arrays, dataclasses and dicts recursively."""
    if isinstance(obj, LatticeSpec):
        return spec_to_json(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_pair(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def load_model(path):
    if not path:
        raise SchemaError("--model is required for this command")
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"cannot read model spec {path}: {e}") from e
    return spec_from_json(data)


def _relative_gap(a, b):
    return float(abs(a - b) / max(abs(a), abs(b), 1e-300))


# --- subcommands ------------------------------------------------------------

def cmd_z(args):
    spec = load_model(args.model)
    if args.method == 'enumerate':
        Z = partition_enumerate(spec)
    else:
        Z = partition_transfer(spec)
    return {'Z': Z, 'method': args.method, 'rows': spec.rows, 'cols': spec.cols, 'staggering': spec.staggering}


def cmd_strip_fe(args):
    spec = load_model(args.model)
    return free_energy_strip(spec, width=args.width, strict=args.strict, seed=args.seed)


def cmd_invariants(args):
    wt = load_model(args.model).cell_a
    I = invariants(wt)
    out = {'invariants': dataclasses.asdict(I)}
    if args.classes:
        out['classes'] = {which: class_check(I, which, args.tol) for which in ('even', 'odd', 'ff_even', 'ff_odd')}
    return out


def cmd_free_energy(args):
    spec = load_model(args.model)
    coeffs = integrand_coeffs(spec, args.family, args.tol)
    result = free_energy(coeffs, grid=args.grid)
    return {'family': args.family, 'coefficients': coeffs.values, **dataclasses.asdict(result)}


def _dimer_spec(spec, args):
    parity = args.parity
    a, b = spec.cells
    if parity == 'odd' and any(c.v[1] == 0 or c.v[5] == 0 for c in (a, b)):
        logger.info("v2 or v6 vanishes; using the eps-regularized determinant")
        return regularized_kasteleyn(spec, args.staggering)
    return kasteleyn_spec(spec, parity, args.staggering, args.tol)


def cmd_dimer(args):
    spec = load_model(args.model)
    ks = _dimer_spec(spec, args)
    if args.mode == 'finite':
        det = finite_det_product(ks, args.rows or spec.rows, args.cols or spec.cols)
        return {'mode': 'finite', **dataclasses.asdict(det), 'free_energy_per_site': det.free_energy_per_site}
    out = {'mode': 'integrand', 'staggering': ks.staggering}
    if args.theta:
        out['D'] = complex(d_theta(ks, *args.theta))
    else:
        out.update(dataclasses.asdict(dimer_free_energy(ks, grid=args.grid)))
    return out


def cmd_map(args):
    spec = load_model(args.model)
    wt = spec.cell_a
    if args.name == 'weakgraph':
        variant = int(args.variant or 1)
        cells = [apply_weak_graph(c, variant, args.site_class) for c in spec.cells]
        return spec.with_cells(cells[0], cells[1] if spec.cell_b is not None else None)
    if args.name == 'symmetry':
        g = element(args.variant or 'I')
        cells = [apply_symmetry(g, c) for c in spec.cells]
        out = spec.with_cells(cells[0], cells[1] if spec.cell_b is not None else None)
        if g.swaps_axes:
            swapped = {'column': 'row', 'row': 'column'}.get(spec.staggering, spec.staggering)
            out = dataclasses.replace(out, rows=spec.cols, cols=spec.rows, staggering=swapped)
        return out
    if args.name.startswith('invariant'):
        return [spec.with_cells(e) for e in invariant_mapping(wt, int(args.name[-1]), args.tol)]
    if args.name == 'relabel':
        return staggered_relabel(spec, args.edge, args.cell_swap)
    if args.name == 'ff-even':
        return spec.with_cells(ff_even_from_odd(wt, tol=args.tol))
    if args.name == 'antisym-even':
        return spec.with_cells(antisym_even_to_sym_odd(wt))
    return spec.with_cells(sym_odd_to_antisym_even(wt))


def cmd_preset(args):
    try:
        params = json.loads(args.params) if args.params else {}
    except json.JSONDecodeError as e:
        raise SchemaError(f"--params is not JSON: {e}") from e
    return build_preset(args.name, params, args.rows or 2, args.cols or 2)


def _trial_gaps(args, make_pairs):
    rng = np.random.default_rng(args.seed)
    gaps = []
    for trial in range(args.trials):
        worst = 0.0
        for left, right in make_pairs(rng):
            worst = max(worst, _relative_gap(partition_enumerate(left), partition_enumerate(right)))
        gaps.append(worst)
        logger.debug(f"trial {trial}: max relative Z gap {worst:.3e}")
    return {'trials': args.trials, 'seed': args.seed, 'max_relative_gap': gaps,
            'holds': all(g <= args.tol for g in gaps)}


def _mapping_pairs(which, rows, cols):
    def pairs(rng):
        out = []
        for source in (admissible_odd_input(rng, which), admissible_even_input(rng, which)):
            out += [(LatticeSpec(rows, cols, source), LatticeSpec(rows, cols, image))
                    for image in invariant_mapping(source, which)]
        return out
    return pairs


def cmd_check(args):
    rows, cols = args.rows or 2, args.cols or 2
    prop = args.property
    if prop.startswith('mapping-invariant'):
        return {'property': prop, **_trial_gaps(args, _mapping_pairs(int(prop[-1]), rows, cols))}
    if prop == 'weak-graph':
        def pairs(rng):
            wt = random_weights(rng)
            return [(LatticeSpec(rows, cols, wt), LatticeSpec(rows, cols, apply_weak_graph(wt, k)))
                    for k in (1, 2, 3, 4)]
        return {'property': prop, **_trial_gaps(args, pairs)}
    if prop == 'imaginary-field':
        def pairs(rng):
            u = rng.uniform(0.1, 0.8)
            ref = ising_field_weights(IsingFieldParams.isotropic(u, 1j), 2).weights
            return [(LatticeSpec(rows, cols, ref), LatticeSpec(rows, cols, ising_imaginary_field_odd_map(u, k)))
                    for k in (1, 2, 3, 4)]
        return {'property': prop, **_trial_gaps(args, pairs)}
    if prop == 'relabel':
        staggering = args.staggering or 'bipartite'

        def pairs(rng):
            spec = LatticeSpec(rows, cols, random_weights(rng), staggering, random_weights(rng))
            return [(spec, staggered_relabel(spec, edge, swap)) for edge, swap in relabel_variants(staggering)]
        return {'property': prop, **_trial_gaps(args, pairs)}
    if prop == 'symmetry':
        rng = np.random.default_rng(args.seed)
        gaps = [symmetry_invariance(random_weights(rng), rows, cols, partition_enumerate) for _ in range(args.trials)]
        return {'property': prop, 'max_relative_gap': gaps, 'holds': all(g <= args.tol for g in gaps)}

    spec = load_model(args.model)
    wt = spec.cell_a
    if prop == 'topology':
        census = config_census(spec)
        bad = sum(mult for stats, mult in census if not check_topology(stats))
        return {'property': prop, 'configurations': sum(m for _, m in census), 'violations': bad, 'holds': bad == 0}
    if prop == 'classes':
        I = invariants(wt)
        return {'property': prop, **{w: class_check(I, w, args.tol) for w in ('even', 'odd', 'ff_even', 'ff_odd')}}
    if prop == 'ff':
        return {'property': prop, **{w: ff_residual(wt, w) for w in ('even', 'odd', 'even_ti', 'odd_ti')}}
    return {'property': prop, **dataclasses.asdict(disorder_check(wt, prop.split('-')[1], args.tol))}


def cmd_census(args):
    spec = load_model(args.model)
    frame = census_frame(spec)
    return {'configurations': int(frame['multiplicity'].sum()), 'classes': frame.to_dict(orient='records')}


COMMANDS = {
    'z': cmd_z,
    'strip-fe': cmd_strip_fe,
    'invariants': cmd_invariants,
    'free-energy': cmd_free_energy,
    'dimer': cmd_dimer,
    'map': cmd_map,
    'preset': cmd_preset,
    'check': cmd_check,
    'census': cmd_census,
}


def parse_args(argv=None):
    parser = argparse.ArgumentParser(prog='vertexlab', description="16-vertex model verification tools.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--model', help="path to a JSON model spec")
    common.add_argument('--seed', type=int, default=0)
    common.add_argument('--tol', type=float, default=DEFAULT_TOL)
    common.add_argument('--rows', type=int)
    common.add_argument('--cols', type=int)
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('z', parents=[common], help="partition function")
    p.add_argument('--method', choices=METHODS, default='enumerate')

    p = sub.add_parser('strip-fe', parents=[common], help="strip free energy from the transfer matrix")
    p.add_argument('--width', type=int)
    p.add_argument('--strict', action='store_true')

    p = sub.add_parser('invariants', parents=[common], help="the 13 SL(2) x SL(2) invariants")
    p.add_argument('--classes', action='store_true', help="also evaluate the relation sets")

    p = sub.add_parser('free-energy', parents=[common], help="free-fermion free energy by quadrature")
    p.add_argument('--family', choices=sorted(FAMILIES), required=True)
    p.add_argument('--grid', type=int, default=DEFAULT_GRID)

    p = sub.add_parser('dimer', parents=[common], help="Kasteleyn determinant and dimer free energy")
    p.add_argument('--parity', choices=('odd', 'even'), default='odd')
    p.add_argument('--staggering', choices=('column', 'bipartite'))
    p.add_argument('--mode', choices=('integrand', 'finite'), default='integrand')
    p.add_argument('--grid', type=int, default=DEFAULT_GRID)
    p.add_argument('--theta', type=float, nargs=2, metavar=('T1', 'T2'))

    p = sub.add_parser('map', parents=[common], help="weight maps that keep Z or the invariants")
    p.add_argument('--name', choices=MAP_NAMES, required=True)
    p.add_argument('--variant', help="weak-graph variant or symmetry word")
    p.add_argument('--site-class', type=int, default=1)
    p.add_argument('--edge', choices=('a', 'b', 'c', 'd'), default='a')
    p.add_argument('--cell-swap', action='store_true')

    p = sub.add_parser('preset', parents=[common], help="named model specs")
    p.add_argument('--name', choices=sorted(PRESETS), required=True)
    p.add_argument('--params', help="JSON object of preset parameters")

    p = sub.add_parser('check', parents=[common], help="property checks against the enumeration oracle")
    p.add_argument('--property', choices=CHECKS, required=True)
    p.add_argument('--trials', type=int, default=10)
    p.add_argument('--staggering', choices=('column', 'row', 'bipartite'))

    sub.add_parser('census', parents=[common], help="configuration census of a small torus")
    return parser.parse_args(argv)


def run(argv=None, stdout=None):
    """Parse, dispatch and print; returns the process exit code."""
    args = parse_args(argv)
    stdout = stdout or sys.stdout
    try:
        result = COMMANDS[args.command](args)
    except VertexLabError as e:
        logger.debug(f"{args.command} failed: {e}")
        print(json.dumps({'error': e.kind, 'message': str(e)}), file=sys.stderr)
        return e.exit_code
    json.dump(to_jsonable(result), stdout, indent=2)
    stdout.write('\n')
    return 0


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
