#!/usr/bin/env python3
"""
Weak-graph transformations of the 16-vertex model.

Every bond value b in {0, 1} is expanded in the basis {1, sigma} with
sigma = (-1)^b, so a vertex weight becomes a sum over the 16 spin monomials
of its four bonds. The sign matrix

    G[k, l] = (-1)^(number of solid bonds shared by vertex k and monomial l)

scaled by 1/4 maps weights to weights with the same torus partition
function, and (G/4)^2 = I. Flipping the horizontal and/or the vertical bond
convention gives four variants; the extra three square to a matrix that is
not the identity but all satisfy G^4 = I.

Usage:
    from weak_graph import apply_weak_graph
    s = apply_weak_graph(wt, variant=1)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import pandas as pd

from lattice_core import DOWN, LEFT, MASK_TO_INDEX, RIGHT, UP, WEIGHT_MASKS, Weights16
from symmetry_group import permutation_matrix
from vertexlab_config import NumericDomainError, SchemaError

logger = logging.getLogger(__name__)

# variant -> (flip horizontal convention, flip vertical convention)
VARIANTS = {1: (0, 0), 2: (0, 1), 3: (1, 0), 4: (1, 1)}
CLASS_TOL = 1e-12
CHAR_POLYS = ('(G^2-I)^8', '(G^4-I)^4', '(G^4-I)^2(G^2+I)^2(G-I)^4')


@dataclass(frozen=True)
class WeakGraphVariant:
    variant: int = 1
    site_class: int = 1

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise SchemaError(f"weak-graph variant must be 1..4, got {self.variant}")
        if self.site_class not in (1, 2):
            raise SchemaError(f"site class must be 1 or 2, got {self.site_class}")

    @property
    def flips(self):
        return VARIANTS[self.variant]

    def matrix(self):
        return weak_graph_matrix(self.variant, self.site_class)


@lru_cache(maxsize=1)
def _sign_matrix():
    masks = np.array(WEIGHT_MASKS)
    shared = masks[:, None] & masks[None, :]
    parity = np.array([bin(int(x)).count('1') % 2 for x in shared.ravel()]).reshape(16, 16)
    return (1 - 2 * parity) / 4.0


def weak_graph_matrix(variant=1, site_class=1):
    """The normalized 16 x 16 weak-graph matrix of a variant (rows and columns in w1..v8 order)."""
    WeakGraphVariant(variant, site_class)
    hflip, vflip = VARIANTS[variant]
    flip = (LEFT | RIGHT if hflip else 0) | (UP | DOWN if vflip else 0)
    base = _sign_matrix()
    rows = [MASK_TO_INDEX[mask ^ flip] for mask in WEIGHT_MASKS]
    G = base[rows, :]
    if site_class == 2:
        # second site class: conjugate by both lattice reflections
        for name in ('r', 'c2r'):
            P = permutation_matrix(name)
            G = P @ G @ P.T
    return G


def _residual(A):
    return float(np.max(np.abs(A)))


def char_poly_residuals(G):
    """Max-entry residual of each annihilating polynomial evaluated at G."""
    I = np.eye(G.shape[0])
    G2 = G @ G
    G4 = G2 @ G2
    mp = np.linalg.matrix_power
    return {
        CHAR_POLYS[0]: _residual(mp(G2 - I, 8)),
        CHAR_POLYS[1]: _residual(mp(G4 - I, 4)),
        CHAR_POLYS[2]: _residual(mp(G4 - I, 2) @ mp(G2 + I, 2) @ mp(G - I, 4)),
    }


def char_poly_class(variant=1, matrix=None, tol=CLASS_TOL):
    """
    Which of the three polynomials annihilate the variant's matrix.

    Returns {'residuals', 'vanishing', 'minimal'}; `minimal` is the first
    vanishing polynomial in the order (G^2-I)^8, (G^4-I)^4, mixed.
    """
    G = weak_graph_matrix(variant) if matrix is None else np.asarray(matrix)
    residuals = char_poly_residuals(G)
    vanishing = [name for name in CHAR_POLYS if residuals[name] <= tol]
    if not vanishing:
        raise NumericDomainError(f"no annihilating polynomial vanishes for variant {variant}: {residuals}")
    return {'residuals': residuals, 'vanishing': vanishing, 'minimal': vanishing[0]}


def eigen_multiplicities(G):
    """Multiplicities of the eigenvalues 1, i, -1, -i of a matrix with G^4 = I, via spectral projectors."""
    powers = [np.eye(G.shape[0]), G, G @ G, G @ G @ G]
    counts = {}
    for lam in (1, 1j, -1, -1j):
        proj = sum(lam ** (-k) * powers[k] for k in range(4)) / 4
        counts[lam] = int(round(np.trace(proj).real))
    return counts


def variant_similarity():
    """
    DataFrame of every variant pair: equal spectra (hence similar, since each
    matrix satisfies G^4 = I and is diagonalizable) and the trace of each.
    """
    records = []
    mults = {k: eigen_multiplicities(weak_graph_matrix(k)) for k in VARIANTS}
    for a in VARIANTS:
        for b in VARIANTS:
            if b <= a:
                continue
            records.append({
                'variant_a': a,
                'variant_b': b,
                'trace_a': float(np.trace(weak_graph_matrix(a)).real),
                'trace_b': float(np.trace(weak_graph_matrix(b)).real),
                'similar': mults[a] == mults[b],
            })
    return pd.DataFrame.from_records(records)


def apply_weak_graph(wt, variant=1, site_class=1):
    """s = (G/4) w reinterpreted as vertex weights; Z is unchanged on every torus."""
    return Weights16.from_vector(weak_graph_matrix(variant, site_class) @ wt.as_vector())


def _require(ok, message):
    if not ok:
        raise SchemaError(message)


def antisym_even_to_sym_odd(wt, tol=1e-12):
    """
    Anti-symmetric even partner of a symmetric odd model (v_2i = v_2i-1).

        2 w1 = v1 + v3 + v5 + v7     2 w3 = -v1 - v3 + v5 + v7
        2 w5 = -v1 + v3 - v5 + v7    2 w7 = -v1 + v3 + v5 - v7

    with w_2i = -w_2i-1. Inverse of sym_odd_to_antisym_even.
    """
    _require(wt.is_odd(tol) and wt.is_symmetric(tol), "input must be odd with v2i = v2i-1")
    v1, _, v3, _, v5, _, v7, _ = wt.v
    w1 = (v1 + v3 + v5 + v7) / 2
    w3 = (-v1 - v3 + v5 + v7) / 2
    w5 = (-v1 + v3 - v5 + v7) / 2
    w7 = (-v1 + v3 + v5 - v7) / 2
    return Weights16.even((w1, -w1, w3, -w3, w5, -w5, w7, -w7))


def sym_odd_to_antisym_even(wt, tol=1e-12):
    """Symmetric odd partner of an anti-symmetric even model (w_2i = -w_2i-1)."""
    _require(wt.is_even(tol) and wt.is_antisymmetric(tol), "input must be even with w2i = -w2i-1")
    w1, _, w3, _, w5, _, w7, _ = wt.w
    v1 = (w1 - w3 - w5 - w7) / 2
    v3 = (w1 - w3 + w5 + w7) / 2
    v5 = (w1 + w3 - w5 + w7) / 2
    v7 = (w1 + w3 + w5 - w7) / 2
    return Weights16.odd((v1, v1, v3, v3, v5, v5, v7, v7))


def symmetric_ff_residual(wt):
    """w1 w3 + w5 w7 - v1 v3 - v5 v7, the free-fermion condition carried by a symmetric 16-vertex image."""
    w, v = wt.w, wt.v
    return complex(w[0] * w[2] + w[4] * w[6] - v[0] * v[2] - v[4] * v[6])


def antisym_even_ff_residual(wt):
    """w1 w3 - w5 w7 on an anti-symmetric even model; zero exactly when its odd partner is free-fermion."""
    w = wt.w
    return complex(w[0] * w[2] - w[4] * w[6])
