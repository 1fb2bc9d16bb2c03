#!/usr/bin/env python3
"""
Weight containers, torus bond configurations and vertex classification
for the 16-vertex model.

Conventions used everywhere in vertexlab:

    * weight index 0..7 is w1..w8 (even), 8..15 is v1..v8 (odd)
    * a vertex is a 4-bit mask (U, D, L, R) = (8, 4, 2, 1), bit set = solid
    * v_i has the mask of w_i with the down bond flipped
    * site (i, j): up bond = vbond(i, j), down bond = vbond(i-1, j),
      left bond = hbond(i, j-1), right bond = hbond(i, j), all mod (M, N)

Model specs travel as JSON:

    {"lattice": {"rows": 2, "cols": 2, "staggering": "homogeneous"},
     "weights": {"w": [[re, im], ...8], "v": [[re, im], ...8]},
     "weights_bar": {...},            # second cell, staggered lattices only
     "fugacities": {"s_h": [re, im], ...}}
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import IntEnum

import numpy as np

from vertexlab_config import SchemaError

UP, DOWN, LEFT, RIGHT = 8, 4, 2, 1

# (U, D, L, R) bit patterns of w1..w8
EVEN_MASKS = (0b0000, 0b1111, 0b1100, 0b0011, 0b0101, 0b1010, 0b0110, 0b1001)
ODD_MASKS = tuple(m ^ DOWN for m in EVEN_MASKS)
WEIGHT_MASKS = EVEN_MASKS + ODD_MASKS
WEIGHT_LABELS = tuple(f'w{i}' for i in range(1, 9)) + tuple(f'v{i}' for i in range(1, 9))
LABEL_INDEX = {label: k for k, label in enumerate(WEIGHT_LABELS)}

MASK_TO_INDEX = np.zeros(16, dtype=np.int64)
for _k, _mask in enumerate(WEIGHT_MASKS):
    MASK_TO_INDEX[_mask] = _k

STAGGERINGS = ('homogeneous', 'column', 'row', 'bipartite')


def _fugacity_subset(test):
    return tuple(WEIGHT_LABELS[k] for k, mask in enumerate(WEIGHT_MASKS) if test(mask))


# weights multiplied by each fugacity; every bond is charged exactly once
FUGACITY_SUBSETS = {
    's_h': _fugacity_subset(lambda m: m & RIGHT),
    'd_h': _fugacity_subset(lambda m: not m & LEFT),
    's_v': _fugacity_subset(lambda m: m & DOWN),
    'd_v': _fugacity_subset(lambda m: not m & UP),
}


class BondState(IntEnum):
    DASHED = 0
    SOLID = 1

    @property
    def spin(self):
        """Bond spin: dashed is +1, solid is -1."""
        return 1 - 2 * int(self)


def _as_complex_tuple(values, name):
    values = tuple(complex(x) for x in values)
    if len(values) != 8:
        raise SchemaError(f"{name} needs 8 values, got {len(values)}")
    return values


@dataclass(frozen=True)
class Weights16:
    """The 16 complex vertex weights of one site class."""

    w: tuple = (0j,) * 8
    v: tuple = (0j,) * 8

    def __post_init__(self):
        object.__setattr__(self, 'w', _as_complex_tuple(self.w, 'w'))
        object.__setattr__(self, 'v', _as_complex_tuple(self.v, 'v'))

    @classmethod
    def from_vector(cls, vec):
        vec = np.asarray(vec, dtype=complex).ravel()
        if vec.size != 16:
            raise SchemaError(f"weight vector needs 16 entries, got {vec.size}")
        return cls(tuple(vec[:8]), tuple(vec[8:]))

    @classmethod
    def even(cls, w):
        return cls(w=tuple(w))

    @classmethod
    def odd(cls, v):
        return cls(v=tuple(v))

    @classmethod
    def ones(cls):
        return cls((1,) * 8, (1,) * 8)

    @classmethod
    def from_labels(cls, **labels):
        """Weights16.from_labels(w1=1, v5=2.0) with every other weight zero."""
        vec = np.zeros(16, dtype=complex)
        for label, value in labels.items():
            if label not in LABEL_INDEX:
                raise SchemaError(f"unknown weight label '{label}'")
            vec[LABEL_INDEX[label]] = value
        return cls.from_vector(vec)

    def as_vector(self):
        return np.array(self.w + self.v, dtype=complex)

    def __getitem__(self, label):
        return self.as_vector()[LABEL_INDEX[label]]

    def with_labels(self, **labels):
        vec = self.as_vector()
        for label, value in labels.items():
            vec[LABEL_INDEX[label]] = value
        return Weights16.from_vector(vec)

    def scaled(self, factor):
        return Weights16.from_vector(self.as_vector() * factor)

    def even_part(self):
        return Weights16(w=self.w)

    def odd_part(self):
        return Weights16(v=self.v)

    def scale(self):
        """Largest weight magnitude (1 for an all-zero set)."""
        return float(np.max(np.abs(self.as_vector()))) or 1.0

    def is_even(self, tol=0.0):
        return bool(np.all(np.abs(self.v) <= tol * self.scale()))

    def is_odd(self, tol=0.0):
        return bool(np.all(np.abs(self.w) <= tol * self.scale()))

    def _pairs(self):
        vec = self.as_vector()
        return vec[0::2], vec[1::2]

    def is_symmetric(self, tol=1e-12):
        first, second = self._pairs()
        return bool(np.all(np.abs(second - first) <= tol * self.scale()))

    def is_antisymmetric(self, tol=1e-12):
        first, second = self._pairs()
        return bool(np.all(np.abs(second + first) <= tol * self.scale()))

    def is_wu_symmetric(self, tol=1e-12):
        vec = self.as_vector()
        solid = np.array([bin(m).count('1') for m in WEIGHT_MASKS])
        for count in np.unique(solid):
            group = vec[solid == count]
            if np.any(np.abs(group - group[0]) > tol * self.scale()):
                return False
        return True


def random_weights(rng, parity=None, real=False, low=0.2, high=1.2):
    """Random Weights16; parity None for all 16, 'even' or 'odd' to zero the other half."""
    if real:
        vec = rng.uniform(low, high, 16).astype(complex)
    else:
        vec = rng.uniform(-1, 1, 16) + 1j * rng.uniform(-1, 1, 16)
    if parity == 'even':
        vec[8:] = 0
    elif parity == 'odd':
        vec[:8] = 0
    return Weights16.from_vector(vec)


@dataclass(frozen=True)
class BondFugacities:
    s_h: complex = 1
    s_v: complex = 1
    d_h: complex = 1
    d_v: complex = 1

    def __post_init__(self):
        for name in ('s_h', 's_v', 'd_h', 'd_v'):
            object.__setattr__(self, name, complex(getattr(self, name)))

    def is_identity(self):
        return all(getattr(self, name) == 1 for name in ('s_h', 's_v', 'd_h', 'd_v'))


@dataclass(frozen=True)
class LatticeSpec:
    """A torus with one or two site classes and optional bond fugacities."""

    rows: int
    cols: int
    cell_a: Weights16
    staggering: str = 'homogeneous'
    cell_b: Weights16 | None = None
    fugacities: BondFugacities | None = None

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise SchemaError(f"torus dimensions must be positive, got {self.rows}x{self.cols}")
        if self.staggering not in STAGGERINGS:
            raise SchemaError(f"unknown staggering '{self.staggering}'")
        if self.staggering != 'homogeneous' and self.cell_b is None:
            raise SchemaError(f"{self.staggering} staggering needs a second weight set")

    @property
    def sites(self):
        return self.rows * self.cols

    @property
    def bonds(self):
        return 2 * self.rows * self.cols

    @property
    def cells(self):
        return (self.cell_a, self.cell_b if self.cell_b is not None else self.cell_a)

    def cell_grid(self):
        """M x N array of 0 (cell A) / 1 (cell B) per site."""
        i, j = np.indices((self.rows, self.cols))
        if self.staggering == 'column':
            return j & 1
        if self.staggering == 'row':
            return i & 1
        if self.staggering == 'bipartite':
            return (i + j) & 1
        return np.zeros((self.rows, self.cols), dtype=np.int64)

    def cell_at(self, i, j):
        return self.cells[int(self.cell_grid()[i % self.rows, j % self.cols])]

    def with_cells(self, cell_a, cell_b=None):
        return replace(self, cell_a=cell_a, cell_b=cell_b)

    def resized(self, rows, cols):
        return replace(self, rows=rows, cols=cols)

    @classmethod
    def homogeneous(cls, weights, rows, cols):
        return cls(rows, cols, weights)


@dataclass(frozen=True)
class BondConfig:
    """hbonds[i, j] is right of site (i, j); vbonds[i, j] is above it."""

    hbonds: np.ndarray = field(repr=False)
    vbonds: np.ndarray = field(repr=False)

    def __post_init__(self):
        h = np.asarray(self.hbonds, dtype=np.int64)
        v = np.asarray(self.vbonds, dtype=np.int64)
        if h.shape != v.shape or h.ndim != 2:
            raise SchemaError(f"bond arrays must share an MxN shape, got {h.shape} and {v.shape}")
        object.__setattr__(self, 'hbonds', h)
        object.__setattr__(self, 'vbonds', v)

    @property
    def shape(self):
        return self.hbonds.shape

    @classmethod
    def from_index(cls, index, rows, cols):
        """Bit i*N+j holds hbond(i, j); bit M*N + i*N+j holds vbond(i, j)."""
        sites = rows * cols
        bits = (int(index) >> np.arange(2 * sites)) & 1
        return cls(bits[:sites].reshape(rows, cols), bits[sites:].reshape(rows, cols))

    @classmethod
    def uniform(cls, rows, cols, h=BondState.DASHED, v=BondState.DASHED):
        return cls(np.full((rows, cols), int(h)), np.full((rows, cols), int(v)))

    def site_labels(self):
        """M x N array of weight indices (0..15)."""
        up = self.vbonds
        down = np.roll(self.vbonds, 1, axis=0)
        left = np.roll(self.hbonds, 1, axis=1)
        right = self.hbonds
        return MASK_TO_INDEX[up * UP + down * DOWN + left * LEFT + right * RIGHT]


@dataclass(frozen=True)
class ConfigStats:
    n: tuple
    m: tuple
    Md: int
    Ms: int
    Nd: int
    Ns: int

    @property
    def sites(self):
        return sum(self.n) + sum(self.m)

    def as_row(self):
        row = {f'n{i + 1}': c for i, c in enumerate(self.n)}
        row.update({f'm{i + 1}': c for i, c in enumerate(self.m)})
        row.update(Md=self.Md, Ms=self.Ms, Nd=self.Nd, Ns=self.Ns)
        return row


def classify_vertex(up, down, left, right):
    """Weight index (0..7 for w1..w8, 8..15 for v1..v8) of a bond arrangement."""
    mask = int(up) * UP + int(down) * DOWN + int(left) * LEFT + int(right) * RIGHT
    return int(MASK_TO_INDEX[mask])


def config_stats(spec, cfg):
    if cfg.shape != (spec.rows, spec.cols):
        raise SchemaError(f"config shape {cfg.shape} does not match {spec.rows}x{spec.cols} torus")
    counts = np.bincount(cfg.site_labels().ravel(), minlength=16)
    sites = spec.sites
    Ms = int(cfg.vbonds.sum())
    Ns = int(cfg.hbonds.sum())
    return ConfigStats(
        n=tuple(int(c) for c in counts[:8]),
        m=tuple(int(c) for c in counts[8:]),
        Md=sites - Ms, Ms=Ms, Nd=sites - Ns, Ns=Ns,
    )


def topology_residuals(stats):
    """Left minus right of every source/sink and bond-count equation."""
    n1, n2, n3, n4, n5, n6, n7, n8 = stats.n
    m1, m2, m3, m4, m5, m6, m7, m8 = stats.m
    mixed_n = n5 + n6 + n7 + n8
    # left sides count bond ends, so each bond shows up twice
    return {
        'horizontal_sources': (n5 + n8 + m5 + m8) - (n6 + n7 + m6 + m7),
        'vertical_sources': (n5 + n7 + m1 + m4) - (n6 + n8 + m2 + m3),
        'vertical_dashed': (2 * n1 + 2 * n4 + mixed_n + m1 + m2 + m3 + m4 + 2 * m5 + 2 * m7) - 2 * stats.Md,
        'vertical_solid': (2 * n2 + 2 * n3 + mixed_n + m1 + m2 + m3 + m4 + 2 * m6 + 2 * m8) - 2 * stats.Ms,
        'horizontal_dashed': (2 * n1 + 2 * n3 + mixed_n + 2 * m1 + 2 * m3 + m5 + m6 + m7 + m8) - 2 * stats.Nd,
        'horizontal_solid': (2 * n2 + 2 * n4 + mixed_n + 2 * m2 + 2 * m4 + m5 + m6 + m7 + m8) - 2 * stats.Ns,
        'vertical_total': stats.Md + stats.Ms - stats.sites,
        'horizontal_total': stats.Nd + stats.Ns - stats.sites,
    }


def check_topology(stats):
    return all(r == 0 for r in topology_residuals(stats).values())


def fugacity_factors(f):
    """Per-weight multiplier (length 16) implied by bond fugacities."""
    factors = np.ones(16, dtype=complex)
    for k, mask in enumerate(WEIGHT_MASKS):
        if mask & RIGHT:
            factors[k] *= f.s_h
        if not mask & LEFT:
            factors[k] *= f.d_h
        if mask & DOWN:
            factors[k] *= f.s_v
        if not mask & UP:
            factors[k] *= f.d_v
    return factors


def apply_bond_fugacities(wt, f):
    return Weights16.from_vector(wt.as_vector() * fugacity_factors(f))


def decorated_cells(spec):
    """Cell weights with any fugacities folded in."""
    cells = spec.cells
    if spec.fugacities is None or spec.fugacities.is_identity():
        return cells
    return tuple(apply_bond_fugacities(c, spec.fugacities) for c in cells)


# --- JSON model specs -------------------------------------------------------

def complex_pair(z):
    z = complex(z)
    return [z.real, z.imag]


def parse_complex(value, where='value'):
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(isinstance(x, (int, float)) for x in value):
        return complex(value[0], value[1])
    raise SchemaError(f"{where}: expected a number or an [re, im] pair, got {value!r}")


def weights_from_json(data, where='weights'):
    if not isinstance(data, dict):
        raise SchemaError(f"{where}: expected an object with 'w' and 'v'")
    parts = {}
    for key in ('w', 'v'):
        raw = data.get(key, [0] * 8)
        if not isinstance(raw, list) or len(raw) != 8:
            raise SchemaError(f"{where}.{key}: expected 8 entries")
        parts[key] = [parse_complex(x, f"{where}.{key}[{i}]") for i, x in enumerate(raw)]
    return Weights16(parts['w'], parts['v'])


def weights_to_json(wt):
    return {'w': [complex_pair(z) for z in wt.w], 'v': [complex_pair(z) for z in wt.v]}


def spec_from_json(data):
    if not isinstance(data, dict) or 'lattice' not in data or 'weights' not in data:
        raise SchemaError("model spec needs 'lattice' and 'weights'")
    lattice = data['lattice']
    try:
        rows = int(lattice.get('rows', 1))
        cols = int(lattice.get('cols', 1))
    except (TypeError, ValueError, AttributeError) as e:
        raise SchemaError(f"lattice: {e}") from e
    staggering = lattice.get('staggering', 'homogeneous')
    cell_a = weights_from_json(data['weights'])
    cell_b = weights_from_json(data['weights_bar'], 'weights_bar') if data.get('weights_bar') else None
    fugacities = None
    if data.get('fugacities'):
        raw = data['fugacities']
        unknown = set(raw) - {'s_h', 's_v', 'd_h', 'd_v'}
        if unknown:
            raise SchemaError(f"fugacities: unknown keys {sorted(unknown)}")
        fugacities = BondFugacities(**{k: parse_complex(v, f"fugacities.{k}") for k, v in raw.items()})
    return LatticeSpec(rows, cols, cell_a, staggering, cell_b, fugacities)


def spec_to_json(spec):
    data = {
        'lattice': {'rows': spec.rows, 'cols': spec.cols, 'staggering': spec.staggering},
        'weights': weights_to_json(spec.cell_a),
    }
    if spec.cell_b is not None:
        data['weights_bar'] = weights_to_json(spec.cell_b)
    if spec.fugacities is not None:
        f = spec.fugacities
        data['fugacities'] = {k: complex_pair(getattr(f, k)) for k in ('s_h', 's_v', 'd_h', 'd_v')}
    return data
