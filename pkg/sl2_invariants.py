#!/usr/bin/env python3
"""
SL(2) x SL(2) invariants of the 16-vertex model.

The weights are packed into a 4 x 4 matrix M with rows indexed by the
(down, left) bonds and columns by the (up, right) bonds of a vertex:

    M[2a + b, 2c + d] = weight of the vertex with up=c, down=a, left=b, right=d

and the torus partition function is unchanged by M -> V^-1 M V for
V = S (x) T with det S = det T = 1. Expanding M in Pauli products gives a
scalar W0, vectors u and v and a divector W, from which the 13 polynomial
invariants I1..I13 are built. Closed forms for even and odd models, the
relation sets that characterise them, three invariant-preserving
even <-> odd mappings and the SL(2) pairs behind the weak-graph matrices
live here too.

Usage:
    from sl2_invariants import invariants, class_check
    I = invariants(wt)
    print(class_check(I, 'odd'))
"""

from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass, fields

import numpy as np

from lattice_core import MASK_TO_INDEX, WEIGHT_LABELS, Weights16
from vertexlab_config import NumericDomainError, SchemaError
from weak_graph import WeakGraphVariant

logger = logging.getLogger(__name__)

DET_TOL = 1e-12

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]]),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# flat position in M of every weight index
_M_INDEX = np.zeros(16, dtype=np.int64)
for _a in range(2):
    for _b in range(2):
        for _c in range(2):
            for _d in range(2):
                _M_INDEX[MASK_TO_INDEX[_c * 8 + _a * 4 + _b * 2 + _d]] = (_a * 2 + _b) * 4 + _c * 2 + _d


# --- the M matrix and the group action --------------------------------------

def build_m(wt):
    """MMatrix: the 4 x 4 repackaging of a weight set."""
    flat = np.zeros(16, dtype=complex)
    flat[_M_INDEX] = wt.as_vector()
    return flat.reshape(4, 4)


def unbuild_m(M):
    return Weights16.from_vector(np.asarray(M, dtype=complex).ravel()[_M_INDEX])


@dataclass(frozen=True)
class SL2Pair:
    S: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        for name in ('S', 'T'):
            A = np.asarray(getattr(self, name), dtype=complex)
            if A.shape != (2, 2):
                raise SchemaError(f"{name} must be 2x2, got shape {A.shape}")
            if abs(np.linalg.det(A) - 1) > DET_TOL * max(1.0, np.max(np.abs(A)) ** 2):
                raise SchemaError(f"det {name} = {np.linalg.det(A):.6g}, expected 1")
            object.__setattr__(self, name, A)

    @classmethod
    def identity(cls):
        return cls(np.eye(2), np.eye(2))

    @property
    def V(self):
        return np.kron(self.S, self.T)


def random_sl2(rng):
    """A random complex 2 x 2 matrix of unit determinant."""
    a, b, c = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    while abs(a) < 0.2:
        a = complex(rng.standard_normal() + 1j * rng.standard_normal())
    return np.array([[a, b], [c, (1 + b * c) / a]])


def random_pair(rng):
    return SL2Pair(random_sl2(rng), random_sl2(rng))


def sl2_transform(wt, g):
    V = g.V
    return unbuild_m(np.linalg.solve(V, build_m(wt) @ V))


def linear_action_matrix(S, T, layout=None):
    """
    16 x 16 matrix A with weights(out) = A @ weights(in) for the pair (S, T),
    in w1..v8 order. `layout` gives the flat M position of each weight and
    defaults to the build_m packing.
    """
    layout = _M_INDEX if layout is None else np.asarray(layout)
    V = np.kron(np.asarray(S, dtype=complex), np.asarray(T, dtype=complex))
    # row-major vec(V^-1 M V) = (V^-1 (x) V^T) vec(M)
    K = np.kron(np.linalg.inv(V), V.T)
    return K[np.ix_(layout, layout)]


def rotation(S):
    """R(S)[j, k] = tr(sigma_j S sigma_k S^-1) / 2 over the three Pauli matrices."""
    S = np.asarray(S, dtype=complex)
    Sinv = np.linalg.inv(S)
    R = np.zeros((3, 3), dtype=complex)
    for j in range(3):
        for k in range(3):
            R[j, k] = np.trace(PAULI[j + 1] @ S @ PAULI[k + 1] @ Sinv) / 2
    return R


# --- the tabulated 16 x 16 action --------------------------------------------

# M layout of the tabulated action, rows top to bottom
TABULATED_M_ROWS = (
    ('w1', 'v4', 'v6', 'w8'),
    ('v1', 'w4', 'w6', 'v7'),
    ('v8', 'w5', 'w3', 'v2'),
    ('w7', 'v5', 'v3', 'w2'),
)
_TABULATED_FLAT = [label for row in TABULATED_M_ROWS for label in row]
TABULATED_M_INDEX = np.array([_TABULATED_FLAT.index(name) for name in WEIGHT_LABELS], dtype=np.int64)

# row k gives weight k (w1..v8) of the image as quartic monomials in s1..s4, t1..t4
TABULATED_ACTION = (
    ('s1t3s4t4 s2t1s3t2 s3t1s4t4 s1t2s2t3 -s3t2s4t3 -s1t1s2t4 s2t2s3t3 s1t1s2t2 '
     '-s1t3s2t4 -s2t1s3t4 -s1t2s4t3 -s3t1s4t2 s3t3s4t4 s1t1s4t4 -s1t1s4t2 -s2t3s3t4'),
    ('s2t3s3t4 s1t1s4t2 s3t2s4t3 s1t1s2t4 -s3t1s4t4 -s1t2s2t3 s1t1s4t4 s1t1s2t2 '
     '-s1t3s2t4 -s1t2s4t3 -s2t1s3t4 -s3t1s4t2 s3t3s4t4 s2t2s3t3 -s2t1s3t2 -s1t3s4t4'),
    ('-s2t3s3t4 -s1t1s4t2 -s3t1s4t4 -s1t2s2t3 s3t2s4t3 s1t1s2t4 -s1t2s4t3 -s1t1s2t2 '
     's1t3s2t4 s1t1s4t4 s2t2s3t3 s3t1s4t2 -s3t3s4t4 -s2t1s3t4 s2t1s3t2 s1t3s4t4'),
    ('-s1t3s4t4 -s2t1s3t2 -s3t2s4t3 -s1t1s2t4 s3t1s4t4 s1t2s2t3 -s2t1s3t4 -s1t1s2t2 '
     's1t3s2t4 s2t2s3t3 s1t1s4t4 s3t1s4t2 -s3t3s4t4 -s1t2s4t3 s1t1s4t2 s2t3s3t4'),
    ('-s1s3t4^2 -s1s3t2^2 -s3^2t2t4 -s1^2t2t4 s3^2t2t4 s1^2t2t4 -s1s3t2t4 -s1^2t2^2 '
     's1^2t4^2 s1s3t2t4 s1s3t2t4 s3^2t2^2 -s3^2t4^2 -s1s3t2t4 s1s3t2^2 s1s3t4^2'),
    ('-s2s4t3^2 -s2s4t1^2 -s4^2t1t3 -s2^2t1t3 s4^2t1t3 s2^2t1t3 -s2s4t1t3 -s2^2t1^2 '
     's2^2t3^2 s2s4t1t3 s2s4t1t3 s4^2t1^2 -s4^2t3^2 -s2s4t1t3 s2s4t1^2 s2s4t3^2'),
    ('s1s3t3^2 s1s3t1^2 s3^2t1t3 s1^2t1t3 -s3^2t1t3 -s1^2t1t3 s1s3t1t3 s1^2t1^2 '
     '-s1^2t3^2 -s1s3t1t3 -s1s3t1t3 -s3^2t1^2 s3^2t3^2 s1s3t1t3 -s1s3t1^2 -s1s3t3^2'),
    ('s2s4t4^2 s2s4t2^2 s4^2t2t4 s2^2t2t4 -s4^2t2t4 -s2^2t2t4 s2s4t2t4 s2^2t2^2 '
     '-s2^2t4^2 -s2s4t2t4 -s2s4t2t4 -s4^2t2^2 s4^2t4^2 s2s4t2t4 -s2s4t2^2 -s2s4t4^2'),
    ('-s1s4t3^2 -s2s3t1^2 -s3s4t1t3 -s1s2t1t3 s3s4t1t3 s1s2t1t3 -s2s3t1t3 -s1s2t1^2 '
     's1s2t3^2 s2s3t1t3 s1s4t1t3 s3s4t1^2 -s3s4t3^2 -s1s4t1t3 s1s4t1^2 s2s3t3^2'),
    ('-s2s3t4^2 -s1s4t2^2 -s3s4t2t4 -s1s2t2t4 s3s4t2t4 s1s2t2t4 -s1s4t2t4 -s1s2t2^2 '
     's1s2t4^2 s1s4t2t4 s2s3t2t4 s3s4t2^2 -s3s4t4^2 -s2s3t2t4 s2s3t2^2 s1s4t4^2'),
    ('s2s3t3^2 s1s4t1^2 s3s4t1t3 s1s2t1t3 -s3s4t1t3 -s1s2t1t3 s1s4t1t3 s1s2t1^2 '
     '-s1s2t3^2 -s1s4t1t3 -s2s3t1t3 -s3s4t1^2 s3s4t3^2 s2s3t1t3 -s2s3t1^2 -s1s4t3^2'),
    ('s1s4t4^2 s2s3t2^2 s3s4t2t4 s1s2t2t4 -s3s4t2t4 -s1s2t2t4 s2s3t2t4 s1s2t2^2 '
     '-s1s2t4^2 -s2s3t2t4 -s1s4t2t4 -s3s4t2^2 s3s4t4^2 s1s4t2t4 -s1s4t2^2 -s2s3t4^2'),
    ('s1s3t3t4 s1s3t1t2 s3^2t2t3 s1^2t1t4 -s3^2t1t4 -s1^2t2t3 s1s3t1t4 s1^2t1t2 '
     '-s1^2t3t4 -s1s3t2t3 -s1s3t1t4 -s3^2t1t2 s3^2t3t4 s1s3t2t3 -s1s3t1t2 -s1s3t3t4'),
    ('s2s4t3t4 s2s4t1t2 s4^2t1t4 s2^2t2t3 -s4^2t2t3 -s2^2t1t4 s2s4t2t3 s2^2t1t2 '
     '-s2^2t3t4 -s2s4t1t4 -s2s4t2t3 -s4^2t1t2 s4^2t3t4 s2s4t1t4 -s2s4t1t2 -s2s4t3t4'),
    ('-s2s4t3t4 -s2s4t1t2 -s4^2t2t3 -s2^2t1t4 s4^2t1t4 s2^2t2t3 -s2s4t1t4 -s2^2t1t2 '
     's2^2t3t4 s2s4t2t3 s2s4t1t4 s4^2t1t2 -s4^2t3t4 -s2s4t2t3 s2s4t1t2 s2s4t3t4'),
    ('-s1s3t3t4 -s1s3t1t2 -s3^2t1t4 -s1^2t2t3 s3^2t2t3 s1^2t1t4 -s1s3t2t3 -s1^2t1t2 '
     's1^2t3t4 s1s3t1t4 s1s3t2t3 s3^2t1t2 -s3^2t3t4 -s1s3t1t4 s1s3t1t2 s1s3t3t4'),
)

_MONOMIAL = re.compile(r'([st])(\d)(?:\^(\d))?')


def tabulated_action_matrix(S, T):
    """
    Evaluate TABULATED_ACTION at S = [[s1, s2], [s3, s4]], T = [[t1, t2], [t3, t4]].

    The table is the SL(2) x SL(2) action in the TABULATED_M_ROWS layout with
    its columns permuted: tabulated_action_matrix(S, T)[:, p] equals
    linear_action_matrix(S, T, TABULATED_M_INDEX), where p is the column
    order of tabulated_action_matrix(I, I). That permutation is odd, so the
    table has determinant -1. Neither it nor the layout keeps Z under the
    vertex rule of build_m.
    """
    s = np.asarray(S, dtype=complex).ravel()
    t = np.asarray(T, dtype=complex).ravel()
    A = np.zeros((16, 16), dtype=complex)
    for i, row in enumerate(TABULATED_ACTION):
        for j, term in enumerate(row.split()):
            value = -1 if term.startswith('-') else 1
            for name, k, power in _MONOMIAL.findall(term):
                value = value * (s if name == 's' else t)[int(k) - 1] ** int(power or 1)
            A[i, j] = value
    return A


# --- covariants and invariants ----------------------------------------------

@dataclass(frozen=True)
class CovariantSet:
    W0: complex
    u: np.ndarray
    v: np.ndarray
    W: np.ndarray

    def coefficients(self):
        C = np.zeros((4, 4), dtype=complex)
        C[0, 0] = self.W0
        C[1:, 0] = self.u
        C[0, 1:] = self.v
        C[1:, 1:] = self.W
        return C

    def to_weights(self):
        C = self.coefficients()
        M = sum(C[k, l] * np.kron(PAULI[k], PAULI[l]) for k in range(4) for l in range(4))
        return unbuild_m(M)


def covariants(wt):
    M = build_m(wt)
    C = np.array([[np.trace(np.kron(PAULI[k], PAULI[l]) @ M) / 4 for l in range(4)] for k in range(4)])
    return CovariantSet(C[0, 0], C[1:, 0], C[0, 1:], C[1:, 1:])


@dataclass(frozen=True)
class InvariantSet:
    I1: complex
    I2: complex
    I3: complex
    I4: complex
    I5: complex
    I6: complex
    I7: complex
    I8: complex
    I9: complex
    I10: complex
    I11: complex
    I12: complex
    I13: complex

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, complex(getattr(self, f.name)))

    @classmethod
    def from_values(cls, values):
        values = list(values)
        if len(values) != 13:
            raise SchemaError(f"an invariant set has 13 entries, got {len(values)}")
        return cls(*values)

    def as_array(self):
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=complex)

    def max_relative_difference(self, other, floor=1.0):
        """Entrywise |a - b| / max(|a|, |b|, floor); the floor keeps exact zeros comparable."""
        a, b = self.as_array(), other.as_array()
        scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
        return float(np.max(np.abs(a - b) / scale))


def invariants(wt):
    c = covariants(wt)
    u, v, W = c.u, c.v, c.W
    WWt = W @ W.T
    WtW = W.T @ W
    P = WWt @ WWt
    Q = WtW @ WtW
    return InvariantSet(
        c.W0,
        u @ u,
        v @ v,
        u @ W @ v,
        np.trace(WWt),
        u @ WWt @ u,
        v @ WtW @ v,
        u @ WWt @ W @ v,
        np.trace(P),
        u @ P @ u,
        v @ Q @ v,
        u @ P @ W @ v,
        np.trace(P @ WWt),
    )


def _even_closed_form(w):
    w1, w2, w3, w4, w5, w6, w7, w8 = w
    a = w1 - w2 - w3 + w4
    b = w1 - w2 + w3 - w4
    c = w1 + w2 - w3 - w4
    p = w5 * w6 + w7 * w8
    q = w5 * w6 * w7 * w8
    return [
        (w1 + w2 + w3 + w4) / 4,
        a ** 2 / 16,
        b ** 2 / 16,
        a * b * c / 64,
        c ** 2 / 16 + p / 2,
        c ** 2 * a ** 2 / 256,
        c ** 2 * b ** 2 / 256,
        a * b * c ** 3 / 1024,
        c ** 4 / 256 + p ** 2 / 8 + q / 2,
        a ** 2 * c ** 4 / 4096,
        b ** 2 * c ** 4 / 4096,
        a * b * c ** 5 / 16384,
        c ** 6 / 4096 + p ** 3 / 32 + 3 * q * p / 8,
    ]


def _odd_closed_form(v):
    v1, v2, v3, v4, v5, v6, v7, v8 = v
    x, y = (v1 - v4) * (v3 - v2), (v5 - v8) * (v7 - v6)
    r, s = v1 * v3 - v2 * v4, v5 * v7 - v6 * v8
    return [
        0,
        (v1 + v4) * (v3 + v2) / 4,
        (v5 + v8) * (v7 + v6) / 4,
        0,
        (x + y) / 4,
        r ** 2 / 16,
        s ** 2 / 16,
        0,
        (x ** 2 + y ** 2) / 16,
        x * r ** 2 / 64,
        y * s ** 2 / 64,
        0,
        (x ** 3 + y ** 3) / 64,
    ]


def closed_form_invariants(wt, parity, tol=1e-12):
    """Invariants of an even or odd model from their closed-form polynomials."""
    if parity == 'even':
        if not wt.is_even(tol):
            raise SchemaError("closed_form_invariants(parity='even') got nonzero v weights")
        return InvariantSet.from_values(_even_closed_form(wt.w))
    if parity == 'odd':
        if not wt.is_odd(tol):
            raise SchemaError("closed_form_invariants(parity='odd') got nonzero w weights")
        return InvariantSet.from_values(_odd_closed_form(wt.v))
    raise SchemaError(f"parity must be 'even' or 'odd', got {parity!r}")


def full_model_first_seven(wt):
    """I1..I7 of a general 16-vertex model as odd part + even part + mixed terms."""
    w1, w2, w3, w4, w5, w6, w7, w8 = wt.w
    v1, v2, v3, v4, v5, v6, v7, v8 = wt.v
    ev = _even_closed_form(wt.w)
    od = _odd_closed_form(wt.v)
    a = w1 - w2 - w3 + w4
    b = w1 - w2 + w3 - w4
    c = w1 + w2 - w3 - w4
    r, s = v1 * v3 - v2 * v4, v5 * v7 - v6 * v8

    I4 = (ev[3] + a * s / 16 + b * r / 16
          + (v7 + v6) * (v1 * w8 + v2 * w5 + v3 * w5 + v4 * w8) / 16
          + (v8 + v5) * (v1 * w6 + v2 * w7 + v3 * w7 + v4 * w6) / 16)
    I6 = (od[5] + ev[5]
          + (w5 * (v2 + v3) + w8 * (v1 + v4)) * (w6 * (v1 + v4) + w7 * (v2 + v3)) / 16
          + a * (v1 + v4) * (w6 * (v5 - v8) + w8 * (v7 - v6)) / 32
          + a * (v2 + v3) * (w7 * (v5 - v8) + w5 * (v7 - v6)) / 32
          + a * c * r / 32
          + a ** 2 * (v5 - v8) * (v7 - v6) / 64)
    I7 = (od[6] + ev[6]
          + s * ((w1 - w4) ** 2 - (w2 - w3) ** 2) / 32
          + (w5 * (v6 + v7) + w7 * (v8 + v5)) * (w6 * (v5 + v8) + w8 * (v7 + v6)) / 16
          + b * (v1 - v4) * (w6 * (v5 + v8) + w8 * (v7 + v6)) / 32
          + b * (v3 - v2) * (w7 * (v5 + v8) + w5 * (v7 + v6)) / 32
          + b ** 2 * (v1 - v4) * (v3 - v2) / 64)
    return [ev[0], od[1] + ev[1], od[2] + ev[2], I4, od[4] + ev[4], I6, I7]


# --- relation sets ----------------------------------------------------------

def _big_relation(I):
    # I2 I3 (I5^3 + 2 I13) + 6 I5 I6 I7 + 3 I4^2 I9 - 3 (I2 I3 I9 + I4^2 I5) I5 - 6 I8^2
    return ('cubic', 10, [
        I.I2 * I.I3 * I.I5 ** 3, 2 * I.I2 * I.I3 * I.I13, 6 * I.I5 * I.I6 * I.I7,
        3 * I.I4 ** 2 * I.I9, -3 * I.I2 * I.I3 * I.I9 * I.I5, -3 * I.I4 ** 2 * I.I5 ** 2, -6 * I.I8 ** 2,
    ])


def _relations(I, which):
    """(name, degree, signed terms summing to zero) for each displayed relation."""
    if which == 'even':
        return [
            ('I4^2 = I2 I7', 6, [I.I4 ** 2, -I.I2 * I.I7]),
            ('I4^2 = I3 I6', 6, [I.I4 ** 2, -I.I3 * I.I6]),
            ('I4^4 = I2 I3^2 I10', 12, [I.I4 ** 4, -I.I2 * I.I3 ** 2 * I.I10]),
            ('I4^4 = I2^2 I3 I11', 12, [I.I4 ** 4, -I.I2 ** 2 * I.I3 * I.I11]),
            ('I4^6 = I2^2 I3^2 I8^2', 18, [I.I4 ** 6, -I.I2 ** 2 * I.I3 ** 2 * I.I8 ** 2]),
            ('I4^10 = I2^4 I3^4 I12^2', 30, [I.I4 ** 10, -I.I2 ** 4 * I.I3 ** 4 * I.I12 ** 2]),
            ('I6 I7 = I2 I11', 8, [I.I6 * I.I7, -I.I2 * I.I11]),
            ('I6 I7 = I3 I10', 8, [I.I6 * I.I7, -I.I3 * I.I10]),
            ('I6 I11 = I8^2', 10, [I.I6 * I.I11, -I.I8 ** 2]),
            ('I7 I10 = I8^2', 10, [I.I7 * I.I10, -I.I8 ** 2]),
            ('I6 I7 I8^2 = I2 I3 I12^2', 18, [I.I6 * I.I7 * I.I8 ** 2, -I.I2 * I.I3 * I.I12 ** 2]),
            _big_relation(I),
        ]
    if which == 'odd':
        d = I.I6 * I.I7
        return [
            ('I1 = 0', 1, [I.I1]),
            ('I4 = 0', 3, [I.I4]),
            ('I8 = 0', 5, [I.I8]),
            ('I12 = 0', 7, [I.I12]),
            ('I5 I6 I7 = I10 I7 + I11 I6', 10, [I.I5 * d, -I.I10 * I.I7, -I.I11 * I.I6]),
            ('I9 (I6 I7)^2 = (I10 I7)^2 + (I11 I6)^2', 20,
             [I.I9 * d ** 2, -(I.I10 * I.I7) ** 2, -(I.I11 * I.I6) ** 2]),
            ('I13 (I6 I7)^3 = (I10 I7)^3 + (I11 I6)^3', 30,
             [I.I13 * d ** 3, -(I.I10 * I.I7) ** 3, -(I.I11 * I.I6) ** 3]),
            ('I6 I7 (I5^2 - I9) = 2 I10 I11', 12, [d * I.I5 ** 2, -d * I.I9, -2 * I.I10 * I.I11]),
            ('I6 I7 (I5 I9 - I13) = I5 I10 I11', 14,
             [d * I.I5 * I.I9, -d * I.I13, -I.I5 * I.I10 * I.I11]),
        ]
    if which == 'ff_even':
        return [('I2 I3 (I1^2 - I2 - I3 - I5) + 2 I4^2 = 0', 6, [
            I.I2 * I.I3 * I.I1 ** 2, -I.I2 ** 2 * I.I3, -I.I2 * I.I3 ** 2, -I.I2 * I.I3 * I.I5, 2 * I.I4 ** 2,
        ])]
    if which == 'ff_odd':
        return [('I6 I7 (I2 - I3) - I7 I10 + I6 I11 = 0', 10, [
            I.I6 * I.I7 * I.I2, -I.I6 * I.I7 * I.I3, -I.I7 * I.I10, I.I6 * I.I11,
        ])]
    raise SchemaError(f"unknown relation set {which!r}; use odd, even, ff_odd or ff_even")


def class_check(I, which, tol=1e-9):
    """
    Evaluate every relation of a set in cleared-denominator form.

    Each residual is |sum of terms| over the larger of the biggest term and
    s^degree, where s^2 is the largest of |I2|, |I3|, |I5|.
    """
    s = max(abs(I.I2), abs(I.I3), abs(I.I5)) ** 0.5 or 1.0
    residuals = {}
    for name, degree, terms in _relations(I, which):
        scale = max(max(abs(t) for t in terms), s ** degree, 1e-300)
        residuals[name] = abs(sum(terms)) / scale
    return {'which': which, 'holds': all(r <= tol for r in residuals.values()), 'residuals': residuals}


# --- invariant-preserving maps between even and odd models -------------------

def _csqrt(z):
    return np.sqrt(complex(z))


def _unique(candidates, tol=1e-12):
    out = []
    for wt in candidates:
        vec = wt.as_vector()
        if not any(np.max(np.abs(vec - o.as_vector())) <= tol * max(1.0, wt.scale()) for o in out):
            out.append(wt)
    return out


def _check_constraints(residuals, scale, tol, case):
    bad = {k: abs(r) for k, r in residuals.items() if abs(r) > tol * max(scale, 1.0) ** 2}
    if bad:
        raise SchemaError(f"invariant mapping {case}: input violates {sorted(bad)}")


def _mapping_case1(wt, tol):
    v1, v2, v3, v4, v5, v6, v7, v8 = wt.v
    _check_constraints({'v1 v3 = v2 v4': v1 * v3 - v2 * v4, 'v5 v7 = v6 v8': v5 * v7 - v6 * v8},
                       wt.scale(), tol, 1)
    if v1 == 0 or v6 == 0:
        raise NumericDomainError("invariant mapping 1 divides by v1 and v6")
    p0 = _csqrt(v5 / v6 * (v7 + v6) ** 2)
    q0 = _csqrt(v2 / v1 * (v1 + v4) ** 2)
    a1 = v2 / v1 * (v1 - v4) ** 2
    b1 = v5 / v6 * (v7 - v6) ** 2
    S = -(a1 + b1) / 2
    P = (a1 - b1) ** 2 / 16
    disc = _csqrt(S * S - 4 * P)
    roots = [((S + disc) / 2, (S - disc) / 2), ((S - disc) / 2, (S + disc) / 2)]
    out = []
    for sp in (1, -1):
        for sq in (1, -1):
            p, q = sp * p0, sq * q0
            w1, w3 = (p + q) / 2, (p - q) / 2
            for x1, x2 in roots:
                r1, r2 = _csqrt(x1), _csqrt(x2)
                out.append(Weights16.even((w1, -w1, w3, -w3, r1, r1, r2, r2)))
    return out


def _mapping_case1_to_odd(wt, tol):
    w1, w2, w3, w4, w5, w6, w7, w8 = wt.w
    s = wt.scale()
    _check_constraints({'w2 = -w1': (w1 + w2) * s, 'w4 = -w3': (w3 + w4) * s}, s, tol, 1)
    # x and y are (v1 - v4)(v3 - v2) and (v5 - v8)(v7 - v6): sum 2p, difference 4 sqrt(q)
    p = w5 * w6 + w7 * w8
    root_q = _csqrt(w5 * w6 * w7 * w8)
    out = []
    for sx in (1, -1):
        x, y = p + 2 * sx * root_q, p - 2 * sx * root_q
        dx, dy = _csqrt(-x), _csqrt(-y)
        for a, b, c, d in itertools.product((1, -1), repeat=4):
            # v2 = v1, v4 = v3, v6 = v5, v8 = v7
            v1, v3 = (a * (w1 - w3) + c * dx) / 2, (a * (w1 - w3) - c * dx) / 2
            v5, v7 = (b * (w1 + w3) - d * dy) / 2, (b * (w1 + w3) + d * dy) / 2
            out.append(Weights16.odd((v1, v1, v3, v3, v5, v5, v7, v7)))
    return out


def _mapping_case2(wt, tol):
    v1, v2, v3, v4, v5, v6, v7, v8 = wt.v
    _check_constraints({'v8 = -v5': (v8 + v5) * wt.scale(), 'v6 = -v7': (v6 + v7) * wt.scale(),
                        'v1 v2 = v3 v4': v1 * v2 - v3 * v4}, wt.scale(), tol, 2)
    if v3 == 0:
        raise NumericDomainError("invariant mapping 2 divides by v3")
    p0 = _csqrt(v1 / v3 * (v3 - v2) ** 2)
    q0 = _csqrt(v1 / v3 * (v3 + v2) ** 2)
    r = _csqrt(v5 * v7)
    out = []
    for sp in (1, -1):
        for sq in (1, -1):
            p, q = sp * p0, sq * q0
            w1, w2 = (p + q) / 2, (p - q) / 2
            out.append(Weights16.even((w1, w2, -w1, -w2, r, r, r, r)))
    return out


def _mapping_case2_to_odd(wt, tol):
    w1, w2, w3, w4, w5, w6, w7, w8 = wt.w
    s = wt.scale()
    _check_constraints({'w3 = -w1': (w1 + w3) * s, 'w4 = -w2': (w2 + w4) * s,
                        'w5 w6 = w7 w8': w5 * w6 - w7 * w8}, s, tol, 2)
    r = _csqrt(w5 * w6)
    out = []
    # v1 = v3 = t and v2 = v4 = u solve (t - u)^2 = (w1 + w2)^2, (t + u)^2 = (w1 - w2)^2
    for t, u in ((w1, -w2), (w2, -w1), (-w2, w1), (-w1, w2)):
        for sr in (1, -1):
            out.append(Weights16.odd((t, u, t, u, sr * r, -sr * r, sr * r, -sr * r)))
    return out


# w3 <-> w4, v1 <-> v5, v2 <-> v6, v3 <-> v7, v4 <-> v8
_CASE3_PERM = [0, 1, 3, 2, 4, 5, 6, 7, 12, 13, 14, 15, 8, 9, 10, 11]


def _interchange(wt):
    return Weights16.from_vector(wt.as_vector()[_CASE3_PERM])


_TO_EVEN = {1: _mapping_case1, 2: _mapping_case2}
_TO_ODD = {1: _mapping_case1_to_odd, 2: _mapping_case2_to_odd}


def invariant_mapping(wt, which, tol=1e-10):
    """
    Models of the opposite parity sharing every invariant with an even or an
    odd model; all sign and root branches are returned, duplicates removed.

    Case 1 pairs w2 = -w1, w4 = -w3 with v1 v3 = v2 v4, v5 v7 = v6 v8.
    Case 2 pairs w3 = -w1, w4 = -w2, w5 w6 = w7 w8 with v8 = -v5, v6 = -v7,
    v1 v2 = v3 v4. Case 3 is case 2 conjugated by the interchange
    w3 <-> w4, v1..v4 <-> v5..v8.

    Odd -> even: only the products w5 w6 and w7 w8 are fixed; the returned
    sets split them evenly. Even -> odd: case 1 returns v2 = v1, v4 = v3,
    v6 = v5, v8 = v7 and case 2 returns v3 = v1, v4 = v2, v7 = v5.
    """
    if which not in (1, 2, 3):
        raise SchemaError(f"invariant mapping must be 1, 2 or 3, got {which!r}")
    if wt.is_odd(tol):
        table = _TO_EVEN
    elif wt.is_even(tol):
        table = _TO_ODD
    else:
        raise SchemaError("invariant mappings take an even or an odd model")
    if which == 3:
        out = [_interchange(e) for e in table[2](_interchange(wt), tol)]
    else:
        out = table[which](wt, tol)
    out = _unique(out)
    logger.debug(f"invariant mapping {which}: {len(out)} branches")
    return out


def admissible_odd_input(rng, which, low=0.3, high=1.3):
    """Random real odd weights meeting the constraints of invariant mapping `which`."""
    v = rng.uniform(low, high, 8)
    if which == 1:
        v[3] = v[0] * v[2] / v[1]
        v[7] = v[4] * v[6] / v[5]
    elif which in (2, 3):
        v[3] = v[0] * v[1] / v[2]
        v[7] = -v[4]
        v[5] = -v[6]
    else:
        raise SchemaError(f"invariant mapping must be 1, 2 or 3, got {which!r}")
    wt = Weights16.odd(v)
    return _interchange(wt) if which == 3 else wt


def admissible_even_input(rng, which, low=0.3, high=1.3, free_fermion=False):
    """
    Random real even weights meeting the constraints of invariant mapping
    `which`, optionally also on the free-fermion surface
    w1 w2 + w3 w4 = w5 w6 + w7 w8.
    """
    w = rng.uniform(low, high, 8)
    if which == 1:
        w[1], w[3] = -w[0], -w[2]
        if free_fermion:
            # w5 w6 + w7 w8 = -(w1^2 + w3^2)
            w[5] = -(w[0] ** 2 + w[2] ** 2 + w[6] * w[7]) / w[4]
    elif which in (2, 3):
        w[2], w[3] = -w[0], -w[1]
        if free_fermion:
            w[5] = w[0] * w[1] / w[4]
        w[7] = w[4] * w[5] / w[6]
    else:
        raise SchemaError(f"invariant mapping must be 1, 2 or 3, got {which!r}")
    wt = Weights16.even(w)
    return _interchange(wt) if which == 3 else wt


# --- weak-graph matrices as SL(2) actions ------------------------------------

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def weak_graph_pair(variant=1):
    """
    SL(2) pair whose linear action is the site-class-1 weak-graph matrix of a
    variant: the Hadamard gauge on every bond, composed with sigma_x on each
    direction whose bond convention is flipped.
    """
    hflip, vflip = WeakGraphVariant(variant).flips
    flipped = -HADAMARD @ PAULI[1]
    S = flipped if vflip else 1j * HADAMARD
    T = flipped if hflip else 1j * HADAMARD
    return SL2Pair(S, T)
