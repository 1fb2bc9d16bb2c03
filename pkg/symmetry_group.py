#!/usr/bin/env python3
"""
The 32 lattice and bond-reversal symmetries of the 16-vertex model.

Generators: c (counter-clockwise rotation), r (horizontal reflection),
h and v (horizontal and vertical bond reversal). Each element acts on a
weight vector by permutation: new[k] = old[perm[k]]. A word such as "crh"
is the operator product c . r . h, i.e. h acts first.

The group has order 32 with element orders {1: 1, 2: 19, 4: 12}. Since
c h c^-1 = v the reversals are not central, so it is (C2 x C2) semidirect
D8 rather than a direct product.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import pandas as pd

from lattice_core import LABEL_INDEX, LatticeSpec, Weights16
from vertexlab_config import SchemaError

# image of (w1..w8; v1..v8) under each element
SYMMETRY_TABLE = {
    'I': 'w1 w2 w3 w4 w5 w6 w7 w8; v1 v2 v3 v4 v5 v6 v7 v8',
    'c2': 'w1 w2 w3 w4 w6 w5 w8 w7; v3 v4 v1 v2 v7 v8 v5 v6',
    'r': 'w1 w2 w3 w4 w7 w8 w5 w6; v1 v2 v3 v4 v7 v8 v5 v6',
    'c2r': 'w1 w2 w3 w4 w8 w7 w6 w5; v3 v4 v1 v2 v5 v6 v7 v8',
    'c3r': 'w1 w2 w4 w3 w5 w6 w8 w7; v5 v6 v7 v8 v1 v2 v3 v4',
    'cr': 'w1 w2 w4 w3 w6 w5 w7 w8; v7 v8 v5 v6 v3 v4 v1 v2',
    'c3': 'w1 w2 w4 w3 w7 w8 w6 w5; v7 v8 v5 v6 v1 v2 v3 v4',
    'c': 'w1 w2 w4 w3 w8 w7 w5 w6; v5 v6 v7 v8 v3 v4 v1 v2',
    'crhv': 'w2 w1 w3 w4 w5 w6 w8 w7; v8 v7 v6 v5 v4 v3 v2 v1',
    'c3rhv': 'w2 w1 w3 w4 w6 w5 w7 w8; v6 v5 v8 v7 v2 v1 v4 v3',
    'chv': 'w2 w1 w3 w4 w7 w8 w6 w5; v6 v5 v8 v7 v4 v3 v2 v1',
    'c3hv': 'w2 w1 w3 w4 w8 w7 w5 w6; v8 v7 v6 v5 v2 v1 v4 v3',
    'c2hv': 'w2 w1 w4 w3 w5 w6 w7 w8; v4 v3 v2 v1 v8 v7 v6 v5',
    'hv': 'w2 w1 w4 w3 w6 w5 w8 w7; v2 v1 v4 v3 v6 v5 v8 v7',
    'c2rhv': 'w2 w1 w4 w3 w7 w8 w5 w6; v4 v3 v2 v1 v6 v5 v8 v7',
    'rhv': 'w2 w1 w4 w3 w8 w7 w6 w5; v2 v1 v4 v3 v8 v7 v6 v5',
    'c2rv': 'w3 w4 w1 w2 w5 w6 w7 w8; v1 v2 v3 v4 v8 v7 v6 v5',
    'rv': 'w3 w4 w1 w2 w6 w5 w8 w7; v3 v4 v1 v2 v6 v5 v8 v7',
    'c2v': 'w3 w4 w1 w2 w7 w8 w5 w6; v1 v2 v3 v4 v6 v5 v8 v7',
    'v': 'w3 w4 w1 w2 w8 w7 w6 w5; v3 v4 v1 v2 v8 v7 v6 v5',
    'cv': 'w3 w4 w2 w1 w5 w6 w8 w7; v8 v7 v6 v5 v1 v2 v3 v4',
    'c3v': 'w3 w4 w2 w1 w6 w5 w7 w8; v6 v5 v8 v7 v3 v4 v1 v2',
    'crv': 'w3 w4 w2 w1 w7 w8 w6 w5; v6 v5 v8 v7 v1 v2 v3 v4',
    'c3rv': 'w3 w4 w2 w1 w8 w7 w5 w6; v8 v7 v6 v5 v3 v4 v1 v2',
    'c3h': 'w4 w3 w1 w2 w5 w6 w8 w7; v5 v6 v7 v8 v4 v3 v2 v1',
    'ch': 'w4 w3 w1 w2 w6 w5 w7 w8; v7 v8 v5 v6 v2 v1 v4 v3',
    'c3rh': 'w4 w3 w1 w2 w7 w8 w6 w5; v7 v8 v5 v6 v4 v3 v2 v1',
    'crh': 'w4 w3 w1 w2 w8 w7 w5 w6; v5 v6 v7 v8 v2 v1 v4 v3',
    'rh': 'w4 w3 w2 w1 w5 w6 w7 w8; v4 v3 v2 v1 v5 v6 v7 v8',
    'c2rh': 'w4 w3 w2 w1 w6 w5 w8 w7; v2 v1 v4 v3 v7 v8 v5 v6',
    'h': 'w4 w3 w2 w1 w7 w8 w5 w6; v4 v3 v2 v1 v7 v8 v5 v6',
    'c2h': 'w4 w3 w2 w1 w8 w7 w6 w5; v2 v1 v4 v3 v5 v6 v7 v8',
}

GENERATORS = ('c', 'r', 'h', 'v')
_TOKEN = re.compile(r'c[23]?|r|h|v')


@dataclass(frozen=True)
class SymmetryElement:
    name: str
    perm: tuple

    @property
    def swaps_axes(self):
        """True for odd powers of c, which exchange the torus dimensions."""
        return self.name.startswith('c') and not self.name.startswith('c2')

    def order(self):
        k, p = 1, self.perm
        while p != IDENTITY_PERM:
            p = tuple(self.perm[i] for i in p)
            k += 1
        return k


def _parse_row(row):
    return tuple(LABEL_INDEX[label] for label in row.replace(';', ' ').split())


IDENTITY_PERM = tuple(range(16))
_ELEMENTS = {name: SymmetryElement(name, _parse_row(row)) for name, row in SYMMETRY_TABLE.items()}
_BY_PERM = {g.perm: g for g in _ELEMENTS.values()}


def elements():
    return list(_ELEMENTS.values())


def compose(g, h):
    """The element acting as h first, then g (written g.h)."""
    g, h = element(g), element(h)
    perm = tuple(h.perm[g.perm[k]] for k in range(16))
    try:
        return _BY_PERM[perm]
    except KeyError:
        raise SchemaError(f"{g.name}.{h.name} left the symmetry table") from None


def inverse(g):
    g = element(g)
    inv = [0] * 16
    for k, p in enumerate(g.perm):
        inv[p] = k
    return _BY_PERM[tuple(inv)]


def element(word):
    """Look up an element by table name or reduce a generator word like 'c2rhcv'."""
    if isinstance(word, SymmetryElement):
        return word
    if word in _ELEMENTS:
        return _ELEMENTS[word]
    tokens = _TOKEN.findall(word)
    if not word or ''.join(tokens) != word:
        raise SchemaError(f"'{word}' is not a word over c, c2, c3, r, h, v")
    result = _ELEMENTS['I']
    for token in tokens:
        result = compose(result, _ELEMENTS[token])
    return result


def apply_symmetry(g, wt):
    g = element(g)
    vec = wt.as_vector()
    return Weights16.from_vector(vec[list(g.perm)])


@lru_cache(maxsize=1)
def group_table():
    """32 x 32 DataFrame: cell [g, h] is the name of g.h."""
    names = list(_ELEMENTS)
    return pd.DataFrame([[compose(g, h).name for h in names] for g in names], index=names, columns=names)


def order_census():
    census = {}
    for g in elements():
        census[g.order()] = census.get(g.order(), 0) + 1
    return dict(sorted(census.items()))


def verify_group():
    """Closure, identity, inverses and associativity of the table; returns a dict of booleans."""
    names = list(_ELEMENTS)
    table = group_table().to_dict(orient='index')
    closed = all(table[g][h] in _ELEMENTS for g in names for h in names)
    identity = all(table['I'][g] == g and table[g]['I'] == g for g in names)
    inverses = all(any(table[g][h] == 'I' for h in names) for g in names)
    associative = all(
        table[table[a][b]][c] == table[a][table[b][c]]
        for a in names for b in names for c in names
    )
    return {'order': len(names), 'closed': closed, 'identity': identity,
            'inverses': inverses, 'associative': associative}


def index_orbits():
    """Orbits of the 16 weight indices under the whole group."""
    orbits = []
    seen = set()
    for k in range(16):
        if k in seen:
            continue
        orbit = {g.perm[k] for g in elements()}
        seen |= orbit
        orbits.append(sorted(orbit))
    return orbits


def lattice_compatible(g, rows, cols):
    """Whether g maps an M x N torus onto itself (axis swaps need M == N)."""
    return rows == cols or not element(g).swaps_axes


def symmetry_invariance(wt, rows, cols, partition):
    """Max relative |Z(g.wt) - Z(wt)| over the elements compatible with the torus."""
    base = partition(LatticeSpec(rows, cols, wt))
    worst = 0.0
    for g in elements():
        if not lattice_compatible(g, rows, cols):
            continue
        z = partition(LatticeSpec(rows, cols, apply_symmetry(g, wt)))
        worst = max(worst, abs(z - base) / max(abs(base), 1e-300))
    return worst


def permutation_matrix(g):
    g = element(g)
    P = np.zeros((16, 16))
    P[np.arange(16), list(g.perm)] = 1
    return P
