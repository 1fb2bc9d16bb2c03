#!/usr/bin/env python3
"""
Named embeddings of other lattice models into the 16-vertex model, and the
maps between vertex models that keep the torus partition function.

    * Ising model in a field, on bond spins (version 1) and through the
      lattice-gas route (version 2), plus the imaginary-field odd maps
    * face-spin models, homogeneous and bipartite-staggered
    * hard hexagons, Baxter's superbond dimer map, the square-lattice Ising
      model as an even free-fermion model
    * staggered relabelings between even and odd 8-vertex models
    * Rae and Peschel disorder conditions

Every builder is reachable by name through PRESETS, which is what the
`vertexlab preset` command uses.

Usage:
    from model_atlas import build_preset
    spec = build_preset('ising-field-v1', {'uh': 0.5, 'uv': 0.7, 'x': 1.0})
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, fields, replace

import numpy as np

from lattice_core import DOWN, LEFT, MASK_TO_INDEX, RIGHT, UP, WEIGHT_MASKS, LatticeSpec, Weights16, weights_from_json
from vertexlab_config import DEFAULT_TOL, NumericDomainError, SchemaError

logger = logging.getLogger(__name__)


# --- Ising model in a field -------------------------------------------------

@dataclass(frozen=True)
class IsingFieldParams:
    u_h: complex
    u_v: complex
    x: complex

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, complex(getattr(self, f.name)))

    @classmethod
    def from_couplings(cls, K_h, K_v, field):
        """u = exp(-2K), x = exp(-H) with beta absorbed."""
        return cls(np.exp(-2 * complex(K_h)), np.exp(-2 * complex(K_v)), np.exp(-complex(field)))

    @classmethod
    def isotropic(cls, u, x):
        return cls(u, u, x)

    @property
    def u(self):
        if self.u_h != self.u_v:
            raise SchemaError("the lattice-gas embedding needs u_h == u_v")
        return self.u_h

    @property
    def w(self):
        """Lattice-gas variable with u^2 = w^2 / (1 + w^2)."""
        u = self.u
        return u / np.sqrt(1 - u * u)

    @property
    def v(self):
        """Lattice-gas variable with x^2 = (v - w^4) / (1 + w^2)^2."""
        u = self.u
        return (self.x ** 2 + u ** 4) / (1 - u * u) ** 2


@dataclass(frozen=True)
class IsingEmbedding:
    """
    Z_vertex = factor^N * Z_Ising on a torus of N vertices. `spins_per_vertex`
    is 2 for bond spins, so f_vertex = 2 f_Ising per spin there.
    """

    weights: Weights16
    version: int
    factor: complex
    spins_per_vertex: int


def ising_field_weights(params, version=1):
    if version == 1:
        uh, uv, x = params.u_h, params.u_v, params.x
        if 0 in (uh, uv, x):
            raise SchemaError("Ising parameters u_h, u_v and x must be nonzero")
        uu, x2 = uh * uv, x * x
        w = (1 / (uu * x2), x2 / uu, uu, uu, uv / uh, uv / uh, uh / uv, uh / uv)
        v = (1 / x, x) * 4
        return IsingEmbedding(Weights16(w, v), 1, 1 + 0j, 2)
    if version == 2:
        u, x = params.u, params.x
        if u == 0 or x == 0:
            raise SchemaError("Ising parameters u and x must be nonzero")
        if u * u == 1:
            raise NumericDomainError("the lattice-gas embedding has a pole at u = +-1")
        om = params.w
        o2 = om * om
        w = (1, params.v) + (o2,) * 6
        v = (om, o2 * om) * 4
        return IsingEmbedding(Weights16(w, v), 2, complex(u * x / (1 - u * u) ** 2), 1)
    raise SchemaError(f"Ising embedding version must be 1 or 2, got {version}")


def ising_imaginary_field_odd_map(u, variant=1):
    """
    Odd weights with the partition function of the isotropic Ising model at
    x^2 = -1: every product v1 v2 = ... = 1/(4 (1-u^2)^2) and every listed ratio
    (1+u)/(1-u). Variants 3 and 4 repeat 1 and 2 with u -> -u.
    """
    if variant not in (1, 2, 3, 4):
        raise SchemaError(f"imaginary-field variant must be 1..4, got {variant}")
    u = complex(u)
    if u * u == 1:
        raise NumericDomainError("imaginary-field maps have a pole at u = +-1")
    if variant > 2:
        u = -u
    prod = 1 / (4 * (1 - u * u) ** 2)
    ratio = (1 + u) / (1 - u)
    a, b = np.sqrt(prod * ratio), np.sqrt(prod / ratio)
    v = (a, b) * 4 if variant % 2 else (a, b, a, b, b, a, b, a)
    return Weights16.odd(v)


def ising_square_weights(K_h, K_v):
    """Face-spin square-lattice Ising model as an even free-fermion model; f per site is Onsager's."""
    K_h, K_v = complex(K_h), complex(K_v)
    return Weights16.even((np.exp(K_h + K_v), np.exp(-K_h - K_v), np.exp(K_v - K_h), np.exp(K_h - K_v), 1, 1, 1, 1))


# --- face-spin maps ---------------------------------------------------------

@dataclass(frozen=True)
class SpinCouplings:
    """J0 constant, J1..J5 two- and four-spin couplings; J6 one-spin and J7 three-spin on finite lattices."""

    J0: complex = 0
    J1: complex = 0
    J2: complex = 0
    J3: complex = 0
    J4: complex = 0
    J5: complex = 0
    J6: complex = 0
    J7: complex = 0

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, complex(getattr(self, f.name)))

    def as_array(self):
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=complex)

    @classmethod
    def from_array(cls, values):
        return cls(*np.asarray(values, dtype=complex))


# rows: eps_1..eps_8, columns: J0..J5
FACE_SPIN_MATRIX = np.array([
    [1, -1, -1, -1, -1, -1],
    [1, 1, 1, -1, -1, -1],
    [1, 1, -1, 1, 1, -1],
    [1, -1, 1, 1, 1, -1],
    [1, 0, 0, -1, 1, 1],
    [1, 0, 0, -1, 1, 1],
    [1, 0, 0, 1, -1, 1],
    [1, 0, 0, 1, -1, 1],
])

# cosh(J6 + J7) for w1, w3, w6, w7; cosh(J6 - J7) for the rest
FINITE_SIGNS = np.array([1, -1, 1, -1, -1, 1, 1, -1])


def face_energies(J):
    return FACE_SPIN_MATRIX @ J.as_array()[:6]


def face_spin_map(J):
    return Weights16.even(np.exp(-face_energies(J)))


def face_spin_map_finite(J):
    """Finite-lattice form with the one- and three-spin couplings J6, J7."""
    J6, J7 = J.J6, J.J7
    return Weights16.even(2 * np.exp(-face_energies(J)) * np.cosh(J6 + FINITE_SIGNS * J7))


def _energies(wt):
    w = np.asarray(wt.w)
    if wt.v != (0j,) * 8:
        raise SchemaError("face-spin couplings exist for even weights only")
    if np.any(np.abs(w.imag) > DEFAULT_TOL * max(1.0, wt.scale())) or np.any(w.real <= 0):
        raise NumericDomainError("face-spin inverse takes logarithms and needs positive real weights")
    return -np.log(w.real)


def inverse_face_spin_map(wt):
    """
    Couplings J0..J5 from even weights. Only w5 w6 and w7 w8 matter on the
    torus, so eps_5 and eps_7 are taken from their geometric means.
    """
    e = _energies(wt)
    e5 = (e[4] + e[5]) / 2
    e7 = (e[6] + e[7]) / 2
    J = (
        (e[0] + e[1] + e[2] + e[3] + 2 * e5 + 2 * e7) / 8,
        (-e[0] + e[1] + e[2] - e[3]) / 4,
        (-e[0] + e[1] - e[2] + e[3]) / 4,
        (-e[0] - e[1] + e[2] + e[3] - 2 * e5 + 2 * e7) / 8,
        (-e[0] - e[1] + e[2] + e[3] + 2 * e5 - 2 * e7) / 8,
        (-e[0] - e[1] - e[2] - e[3] + 2 * e5 + 2 * e7) / 8,
    )
    return SpinCouplings(*J)


# bipartite face-spin lattice: rows eps_1..eps_8, columns J0..J7
STAGGERED_SPIN_MATRIX = np.array([
    [1, -1, -1, -1, -1, -1, -1, -1],
    [1, 1, 1, 1, 1, -1, -1, -1],
    [1, 1, -1, 1, -1, 1, 1, -1],
    [1, -1, 1, -1, 1, 1, 1, -1],
    [1, -1, 1, 1, -1, -1, 1, 1],
    [1, 1, -1, -1, 1, -1, 1, 1],
    [1, -1, -1, 1, 1, 1, -1, 1],
    [1, 1, 1, -1, -1, 1, -1, 1],
])


def staggered_spin_weights(J):
    return Weights16.even(np.exp(-STAGGERED_SPIN_MATRIX @ J.as_array()))


def staggered_spin_maps(spec):
    """
    Per-cell couplings (J0..J7) of a staggered even model, each cell solved on its own.

    Slots J1..J4 are the bond couplings on the up, right, down and left bonds, J5 J6
    the diagonals and J7 the four-spin term. bipartite_spin_couplings folds the two
    tuples into the shared J0..J10 form.
    """
    if spec.staggering == 'homogeneous':
        raise SchemaError("staggered spin maps need a staggered spec")
    return tuple(SpinCouplings.from_array(np.linalg.solve(STAGGERED_SPIN_MATRIX, _energies(cell)))
                 for cell in spec.cells)


# index in J0..J10 of each local slot J0..J7 of cell B; cell A uses J0..J7 as they are
BIPARTITE_B_SLOTS = (0, 3, 4, 1, 2, 8, 9, 10)


def bipartite_spin_couplings(spec):
    """
    J0..J10 of a bipartite staggered even model: J0 and the bond couplings J1..J4 are
    shared, J5..J7 belong to cell A and J8..J10 (diagonals, four-spin) to cell B.

    Every bond joins an A and a B vertex, so only the A + B sum of the two couplings
    on a bond enters Z; the sum is split evenly between the two.
    """
    if spec.staggering != 'bipartite':
        raise SchemaError(f"the J0..J10 form is for bipartite staggering, got '{spec.staggering}'")
    ja, jb = (c.as_array() for c in staggered_spin_maps(spec))
    total = np.zeros(11, dtype=complex)
    counts = np.zeros(11)
    for slots, values in ((np.arange(8), ja), (np.array(BIPARTITE_B_SLOTS), jb)):
        np.add.at(total, slots, values)
        np.add.at(counts, slots, 1)
    return tuple(complex(x) for x in total / counts)


def bipartite_spin_weights(J):
    """(cell A, cell B) even weights for the J0..J10 couplings."""
    J = np.asarray(J, dtype=complex)
    if J.shape != (11,):
        raise SchemaError(f"expected 11 couplings J0..J10, got {J.shape}")
    return (staggered_spin_weights(SpinCouplings.from_array(J[:8])),
            staggered_spin_weights(SpinCouplings.from_array(J[list(BIPARTITE_B_SLOTS)])))


def _ratio(num, den, name):
    if den == 0:
        raise NumericDomainError(f"{name} divides by zero")
    return num / den


def independent_quantities(spec):
    """
    The eleven weight combinations the torus partition function of a staggered
    even model depends on: u1..u11 (bipartite) or t1..t11 (column). Cell A
    weights are unbarred, cell B barred.
    """
    if spec.staggering not in ('bipartite', 'column'):
        raise SchemaError(f"independent quantities exist for bipartite or column staggering, got '{spec.staggering}'")
    a, b = spec.cells
    w1, w2, w3, w4, w5, w6, w7, w8 = a.w
    b1, b2, b3, b4, b5, b6, b7, b8 = b.w
    b12 = b1 * b2
    if spec.staggering == 'bipartite':
        u9 = _ratio(b3 * b4, b12, 'u9')
        u10 = _ratio(b5 * b6, b12, 'u10')
        u11 = _ratio(b7 * b8, b12, 'u11')
        values = (w1 * b1, w2 * b2, w3 * b3, _ratio(w4 * b4, u9, 'u4'), w5 * b6, _ratio(w6 * b5, u10, 'u6'),
                  w7 * b8, _ratio(w8 * b7, u11, 'u8'), u9, u10, u11)
        prefix = 'u'
    else:
        t6 = _ratio(w6 * b8, w8 * b6, 't6')
        t8 = _ratio(b3, b1, 't8')
        # t4 = w4 w̄2 kept as printed
        values = (w1 * b1, w2 * b2, w3 * b3, w4 * b2, w5 * w6 * b12, t6, w7 * w8 * b12, t8,
                  _ratio(_ratio(b3 * b4, b12, 't9'), t8, 't9'), _ratio(b5 * b6, b12, 't10'),
                  _ratio(_ratio(b7 * b8, b12, 't11'), t6, 't11'))
        prefix = 't'
    return {f'{prefix}{k}': complex(x) for k, x in enumerate(values, start=1)}


# --- staggered relabelings --------------------------------------------------

# edge set -> (bit flipped in cell A, bit flipped in cell B)
EDGE_FLIPS = {'a': (LEFT, RIGHT), 'b': (RIGHT, LEFT), 'c': (DOWN, UP), 'd': (UP, DOWN)}
VALID_EDGES = {'column': ('a', 'b'), 'row': ('c', 'd'), 'bipartite': ('a', 'b', 'c', 'd')}


def relabel_weights(wt, flip):
    """Weights after reading one bond of every vertex with the opposite convention."""
    old = wt.as_vector()
    new = np.empty(16, dtype=complex)
    for k, mask in enumerate(WEIGHT_MASKS):
        new[MASK_TO_INDEX[mask ^ flip]] = old[k]
    return Weights16.from_vector(new)


def staggered_relabel(spec, edge_set, cell_swap=False):
    """
    Reinterpret every bond of one edge set. Both end vertices see the flip,
    so Z is unchanged exactly; even and odd cells trade places.
    """
    if edge_set not in EDGE_FLIPS:
        raise SchemaError(f"edge set must be one of a, b, c, d; got {edge_set!r}")
    if spec.staggering not in VALID_EDGES or edge_set not in VALID_EDGES[spec.staggering]:
        raise SchemaError(f"edge set '{edge_set}' is not a relabeling of a {spec.staggering} lattice")
    if spec.staggering in ('column', 'bipartite') and spec.cols % 2:
        raise SchemaError(f"{spec.staggering} relabeling needs an even number of columns")
    if spec.staggering in ('row', 'bipartite') and spec.rows % 2:
        raise SchemaError(f"{spec.staggering} relabeling needs an even number of rows")
    flip_a, flip_b = EDGE_FLIPS[edge_set]
    a, b = spec.cells
    new_a, new_b = relabel_weights(a, flip_a), relabel_weights(b, flip_b)
    if cell_swap:
        new_a, new_b = new_b, new_a
    return replace(spec, cell_a=new_a, cell_b=new_b)


def relabel_variants(staggering):
    return [(edge, swap) for edge in VALID_EDGES[staggering] for swap in (False, True)]


def _homogeneous_relabel(wt, staggering, edge, rows, cols):
    return staggered_relabel(LatticeSpec(rows, cols, wt, staggering, wt), edge)


def column_even_from_odd(wt, rows=2, cols=2):
    """Column staggered even model equivalent to a homogeneous odd one (w1 = w̄4 = v5, ...)."""
    if not wt.is_odd(DEFAULT_TOL):
        raise SchemaError("column-even-from-odd needs odd weights")
    return _homogeneous_relabel(wt, 'column', 'b', rows, cols)


def column_odd_from_even(wt, rows=2, cols=2):
    if not wt.is_even(DEFAULT_TOL):
        raise SchemaError("column-odd-from-even needs even weights")
    return _homogeneous_relabel(wt, 'column', 'b', rows, cols)


def row_even_from_odd(wt, rows=2, cols=2):
    """Row staggered even model equivalent to a homogeneous odd one (w1 = w̄3 = v3, ...)."""
    if not wt.is_odd(DEFAULT_TOL):
        raise SchemaError("row-even-from-odd needs odd weights")
    return _homogeneous_relabel(wt, 'row', 'd', rows, cols)


def row_odd_from_even(wt, rows=2, cols=2):
    if not wt.is_even(DEFAULT_TOL):
        raise SchemaError("row-odd-from-even needs even weights")
    return _homogeneous_relabel(wt, 'row', 'd', rows, cols)


# --- dimers and hard hexagons -----------------------------------------------

def close_packed_dimer_weights(z_h=1, z_v=1):
    """Odd model of close-packed dimers: v1 = v3 = z_v, v5 = v7 = z_h."""
    return Weights16.odd((z_v, 0, z_v, 0, z_h, 0, z_h, 0))


def baxter_superbond_map(z_h=1, z_v=1):
    """
    Both sides of Baxter's superbond map of the dimer model. The models agree
    but the invariants do not (I1 vanishes on the odd side only).
    """
    z_h, z_v = complex(z_h), complex(z_v)
    w78 = np.sqrt(z_h * z_h + z_v * z_v)
    even = Weights16.even((z_h, z_h, z_v, z_v, 0, 0, w78, w78))
    return close_packed_dimer_weights(z_h, z_v), even


def dimer_alternative_even(z_h=1, z_v=1):
    """Even free-fermion model with the dimer free energy: 2w1 = 2w2 = z_h^2 + z_v^2, 2 w5 w6 = 2 w7 w8 = z_h^2 z_v^2."""
    h2, v2 = complex(z_h) ** 2, complex(z_v) ** 2
    off = np.sqrt(h2 * v2 / 2)
    return Weights16.even(((h2 + v2) / 2, (h2 + v2) / 2, (v2 - h2) / 2, (h2 - v2) / 2, off, off, off, off))


def hard_hexagon_weights(z):
    """w1 = 1 and w7 = v3 = v5 = z^(1/3); only the product w7 v3 v5 = z enters Z."""
    z = complex(z)
    if z.imag == 0 and z.real >= 0:
        root = z.real ** (1 / 3)
    else:
        root = z ** (1 / 3)
    return Weights16.from_labels(w1=1, w7=root, v3=root, v5=root)


# --- disorder points --------------------------------------------------------

@dataclass(frozen=True)
class DisorderResult:
    which: str
    holds: bool
    branch: str
    witness: complex | None
    residual: float
    resultants: tuple = ()


def rae_quadratics(wt):
    """(a, b, c) of the four quadratics a z^2 + b z + c that share a root on the disorder manifold."""
    w1, w2, w3, w4, w5, w6, w7, w8 = wt.w
    v1, v2, v3, v4, v5, v6, v7, v8 = wt.v
    return np.array([
        (v7, w4 - w1, -v5),
        (v6, w2 - w3, -v8),
        (w7, v4 - v1, -w5),
        (w6, v2 - v3, -w8),
    ], dtype=complex)


def quadratic_resultant(p, q):
    a1, b1, c1 = p
    a2, b2, c2 = q
    sylvester = np.array([
        [a1, b1, c1, 0],
        [0, a1, b1, c1],
        [a2, b2, c2, 0],
        [0, a2, b2, c2],
    ], dtype=complex)
    return complex(np.linalg.det(sylvester))


def _quad_residual(q, z):
    a, b, c = q
    return abs(a * z * z + b * z + c) / max(abs(a) * abs(z) ** 2, abs(b) * abs(z), abs(c), 1e-300)


def _rae(wt, tol):
    vec = wt.as_vector()
    scale = wt.scale()
    zero = np.abs(vec) <= tol * scale
    for branch, labels in (('w5=w8=v5=v8=0', (4, 7, 12, 15)), ('w6=w7=v6=v7=0', (5, 6, 13, 14))):
        if all(zero[k] for k in labels):
            return DisorderResult('rae', True, branch, None, float(max(abs(vec[k]) for k in labels)))
    if np.any(zero):
        raise SchemaError("the general Rae condition needs all 16 weights nonzero")
    quads = rae_quadratics(wt)
    # pairwise resultants vanish iff each pair of quadratics shares a root
    resultants = tuple(quadratic_resultant(quads[i], quads[j]) for i in range(4) for j in range(i + 1, 4))
    logger.debug(f"Rae resultants {np.abs(resultants)}")
    best, best_res = None, np.inf
    for z in np.roots(quads[0]):
        if abs(z.imag) > tol * max(1.0, abs(z)):
            continue
        res = max(_quad_residual(q, z.real) for q in quads)
        if res < best_res:
            best, best_res = complex(z.real), res
    if best is None:
        return DisorderResult('rae', False, 'general', None, float('inf'), resultants)
    return DisorderResult('rae', bool(best_res <= tol), 'general', best, float(best_res), resultants)


def _peschel(wt, tol):
    w = wt.w
    if not wt.is_even(tol) or max(abs(w[2] - w[3]), abs(w[4] - w[5]), abs(w[6] - w[7])) > tol * wt.scale():
        raise SchemaError("the Peschel condition needs even weights with w3 = w4, w5 = w6, w7 = w8")
    w1, w2, w3, _, w5, _, w7, _ = w
    lhs = 2 * (w3 + w5) - (w1 + w2)
    root = np.sqrt(4 * w7 * w7 + (w1 - w2) ** 2)
    scale = max(abs(lhs), abs(root), 1.0)
    plus, minus = abs(lhs - root) / scale, abs(lhs + root) / scale
    branch, residual = ('+', plus) if plus <= minus else ('-', minus)
    return DisorderResult('peschel', bool(residual <= tol), branch, None, float(residual))


def disorder_check(wt, which='rae', tol=DEFAULT_TOL):
    if which == 'rae':
        return _rae(wt, tol)
    if which == 'peschel':
        return _peschel(wt, tol)
    raise SchemaError(f"disorder check must be 'rae' or 'peschel', got {which!r}")


def rae_weights_from_root(wt, z):
    """Re-solve v5, v8, w5, w8 so that every Rae quadratic vanishes at z."""
    w1, w2, w3, w4, _, w6, w7, _ = wt.w
    v1, v2, v3, v4, _, v6, v7, _ = wt.v
    return wt.with_labels(
        v5=v7 * z * z + (w4 - w1) * z,
        v8=v6 * z * z + (w2 - w3) * z,
        w5=w7 * z * z + (v4 - v1) * z,
        w8=w6 * z * z + (v2 - v3) * z,
    )


# --- preset registry --------------------------------------------------------

@dataclass(frozen=True)
class Preset:
    name: str
    params: tuple
    doc: str


PRESETS = {p.name: p for p in (
    Preset('ising-field-v1', ('uh', 'uv', 'x'), 'bond-spin Ising model in a field'),
    Preset('ising-field-v2', ('u', 'x'), 'isotropic Ising model in a field via the lattice gas'),
    Preset('ising-imaginary-field', ('u', 'variant'), 'odd model of the Ising model at x^2 = -1'),
    Preset('ising-square', ('K_h', 'K_v'), 'square-lattice Ising model as an even free-fermion model'),
    Preset('hard-hexagon', ('z',), 'hard hexagons at activity z'),
    Preset('dimer', ('z_h', 'z_v'), 'close-packed dimers as an odd model'),
    Preset('baxter-superbond', ('z_h', 'z_v'), 'even side of the superbond dimer map'),
    Preset('dimer-alternative', ('z_h', 'z_v'), 'even model with the dimer free energy'),
    Preset('face-spin', ('J0', 'J1', 'J2', 'J3', 'J4', 'J5'), 'homogeneous face-spin model'),
    Preset('column-even-from-odd', ('weights',), 'column staggered even model of a homogeneous odd one'),
    Preset('column-odd-from-even', ('weights',), 'column staggered odd model of a homogeneous even one'),
    Preset('row-even-from-odd', ('weights',), 'row staggered even model of a homogeneous odd one'),
    Preset('row-odd-from-even', ('weights',), 'row staggered odd model of a homogeneous even one'),
)}

_RELABEL_PRESETS = {
    'column-even-from-odd': column_even_from_odd,
    'column-odd-from-even': column_odd_from_even,
    'row-even-from-odd': row_even_from_odd,
    'row-odd-from-even': row_odd_from_even,
}


def _preset_weights(name, p):
    if name == 'ising-field-v1':
        return ising_field_weights(IsingFieldParams(p.get('uh', 1), p.get('uv', 1), p.get('x', 1)), 1).weights
    if name == 'ising-field-v2':
        return ising_field_weights(IsingFieldParams.isotropic(p.get('u', 0.5), p.get('x', 1)), 2).weights
    if name == 'ising-imaginary-field':
        return ising_imaginary_field_odd_map(p.get('u', 0.5), int(p.get('variant', 1)))
    if name == 'ising-square':
        return ising_square_weights(p.get('K_h', 0.4), p.get('K_v', 0.4))
    if name == 'hard-hexagon':
        return hard_hexagon_weights(p.get('z', 1))
    if name == 'dimer':
        return close_packed_dimer_weights(p.get('z_h', 1), p.get('z_v', 1))
    if name == 'baxter-superbond':
        return baxter_superbond_map(p.get('z_h', 1), p.get('z_v', 1))[1]
    if name == 'dimer-alternative':
        return dimer_alternative_even(p.get('z_h', 1), p.get('z_v', 1))
    if name == 'face-spin':
        return face_spin_map(SpinCouplings(*(p.get(f'J{k}', 0) for k in range(6))))
    raise SchemaError(f"unknown preset '{name}'")


def build_preset(name, params=None, rows=2, cols=2):
    """LatticeSpec for a named preset; unknown parameters are rejected."""
    if name not in PRESETS:
        raise SchemaError(f"unknown preset '{name}'; choose from {sorted(PRESETS)}")
    params = dict(params or {})
    unknown = set(params) - set(PRESETS[name].params)
    if unknown:
        raise SchemaError(f"preset '{name}' does not take {sorted(unknown)}")
    if name in _RELABEL_PRESETS:
        if 'weights' not in params:
            raise SchemaError(f"preset '{name}' needs 'weights'")
        return _RELABEL_PRESETS[name](weights_from_json(params['weights']), rows, cols)
    return LatticeSpec(rows, cols, _preset_weights(name, params))
