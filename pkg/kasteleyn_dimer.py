#!/usr/bin/env python3
"""
Dimer (Kasteleyn) solution of staggered free-fermion 8-vertex models.

Each vertex is replaced by a small decorated cluster of internal bonds:
5 nodes (U D L R C) for an odd vertex, 6 (U D L R C E) for an even one.
Two clusters (cell A, cell B) form the unit cell. The internal bond weights
z1..z9 are recovered from the vertex weights, and the free-fermion
condition is what makes that inversion consistent.

With the antisymmetric cell matrix T and the hops between unit cells,
the momentum-space determinant D(t1, t2) is the integrand of the
staggered free energies:

    -beta f = 1/(16 pi^2) * integral integral ln D(t1, t2)

Usage:
    ks = kasteleyn_spec(spec, parity='odd')
    print(dimer_free_energy(ks).minus_beta_f)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from free_fermion import PREFACTOR_16, ff_residual, free_energy
from lattice_core import LatticeSpec, Weights16
from vertexlab_config import DEFAULT_GRID, DEFAULT_TOL, NumericDomainError, SchemaError

logger = logging.getLogger(__name__)

EPS_SAMPLES = 0.05 * np.arange(1, 6)

# node offsets inside a cluster
ODD_NODES = ('U', 'D', 'L', 'R', 'C')
EVEN_NODES = ('U', 'D', 'L', 'R', 'C', 'E')


# --- internal bond weights --------------------------------------------------

@dataclass(frozen=True)
class BondWeights:
    parity: str
    z: tuple

    def to_weights(self):
        """Vertex weights generated by the cluster (the FF condition holds automatically)."""
        if self.parity == 'odd':
            z1, z2, z3, z4, z5, z6, z7, z8 = self.z
            return Weights16.odd((z1 * z8 + z3 * z7, z6, z2 * z7 + z4 * z8, z5,
                                  z1 * z6 + z4 * z5, z8, z2 * z5 + z3 * z6, z7))
        z1, z2, z3, z4, z5, z6, z7, z8, z9 = self.z
        return Weights16.even((z1 * z7 * z8 + z2 * z6 * z9 + z5 * (z1 * z2 + z3 * z4), z5, z8 * z9, z6 * z7,
                               z1 * z5 + z6 * z9, z2 * z5 + z7 * z8, z3 * z5, z4 * z5))


def bond_weights(wt, parity, tol=DEFAULT_TOL):
    """Internal bond weights with the gauge z2 = 1 (odd) or z7 = z9 = 1 (even)."""
    scale = wt.scale()
    if parity == 'odd':
        if not wt.is_odd(tol):
            raise SchemaError("odd bond weights need odd vertex weights")
        v1, v2, v3, v4, v5, v6, v7, v8 = wt.v
        if v2 == 0 or v6 == 0:
            raise NumericDomainError("odd bond weights divide by v2 and v6")
        if abs(ff_residual(wt, 'odd')) > tol * scale ** 2:
            raise NumericDomainError("odd bond weights need the odd free-fermion condition")
        z = ((v4 * v8 + v5 * v6 - v3 * v4) / (v2 * v6), 1, (v7 - v4) / v2, (v3 - v8) / v6, v4, v2, v8, v6)
    elif parity == 'even':
        if not wt.is_even(tol):
            raise SchemaError("even bond weights need even vertex weights")
        w1, w2, w3, w4, w5, w6, w7, w8 = wt.w
        if w2 == 0:
            raise NumericDomainError("even bond weights divide by w2")
        if abs(ff_residual(wt, 'even')) > tol * scale ** 2:
            raise NumericDomainError("even bond weights need the even free-fermion condition")
        z = ((w5 - w4) / w2, (w6 - w3) / w2, w7 / w2, w8 / w2, w2, w4, 1, w3, 1)
    else:
        raise SchemaError(f"parity must be 'odd' or 'even', got {parity!r}")
    return BondWeights(parity, tuple(complex(x) for x in z))


# --- cluster matrices -------------------------------------------------------

def _odd_cell(T, o, z):
    U, D, L, R, C = (o + k for k in range(5))
    z1, z2, z3, z4, z5, z6, z7, z8 = z
    for i, j, x in ((U, L, z1), (U, R, z3), (U, C, z5), (D, L, z4), (D, R, z2), (D, C, -z6),
                    (L, C, -z7), (R, C, z8)):
        T[i, j] = x
        T[j, i] = -x


def _even_cell(T, o, z):
    U, D, L, R, C, E = (o + k for k in range(6))
    z1, z2, z3, z4, z5, z6, z7, z8, z9 = z
    for i, j, x in ((U, L, -z1), (U, R, -z3), (U, C, -z6), (D, L, -z4), (D, R, z2), (D, E, -z7),
                    (L, E, z9), (R, C, z8), (C, E, -z5)):
        T[i, j] = x
        T[j, i] = -x


# (i, j, s, a, b): M[i, j] += s e^{-i(a t1 + b t2)}, M[j, i] -= s e^{+i(a t1 + b t2)}
ODD_HOPS = {
    'column': ((2, 8, -1, 1, 0), (0, 1, 1, 0, 1), (5, 6, -1, 0, 1)),
    'bipartite': ((2, 8, -1, 1, 0), (0, 6, -1, 1, -1), (1, 5, -1, 0, 1)),
}
EVEN_HOPS = {
    'column': ((2, 9, -1, 1, 0), (0, 1, 1, 0, 1), (6, 7, 1, 0, 1)),
    'bipartite': ((2, 9, -1, 1, 0), (0, 7, 1, 1, -1), (1, 6, -1, 0, 1)),
}


@dataclass(frozen=True)
class KasteleynSpec:
    parity: str
    staggering: str
    bonds: tuple
    T: np.ndarray
    hops: tuple

    @property
    def cell_size(self):
        return self.T.shape[0] // 2

    def momentum_matrix(self, p1, p2):
        """Matrix at lattice momenta (p1, p2); broadcasts to shape (..., n, n)."""
        p1, p2 = np.broadcast_arrays(np.asarray(p1, dtype=float), np.asarray(p2, dtype=float))
        M = np.broadcast_to(self.T, p1.shape + self.T.shape).astype(complex)
        for i, j, s, a, b in self.hops:
            phase = np.exp(-1j * (a * p1 + b * p2))
            M[..., i, j] += s * phase
            M[..., j, i] -= s / phase
        return M

    def momenta(self, t1, t2):
        """Momenta at which the determinant reproduces the integrand at (t1, t2)."""
        t1, t2 = np.asarray(t1, dtype=float), np.asarray(t2, dtype=float)
        if self.staggering == 'column':
            return t1, t2
        if self.parity == 'odd':
            return t2 - t1, t2
        return t1 - t2, t1

    def d(self, t1, t2):
        return np.linalg.det(self.momentum_matrix(*self.momenta(t1, t2)))


def _staggering_of(model, staggering):
    if staggering is None:
        staggering = model.staggering if isinstance(model, LatticeSpec) else 'column'
        if staggering == 'homogeneous':
            staggering = 'column'
    if staggering not in ('column', 'bipartite'):
        raise SchemaError(f"Kasteleyn matrices exist for column or bipartite staggering, got {staggering!r}")
    return staggering


def _cells(model):
    if isinstance(model, Weights16):
        return model, model
    return model.cells


def kasteleyn_spec(model, parity=None, staggering=None, tol=DEFAULT_TOL):
    """Assemble the two-cluster matrix and hops for a Weights16 or LatticeSpec."""
    a, b = _cells(model)
    if parity is None:
        parity = 'odd' if a.is_odd(tol) else 'even'
    staggering = _staggering_of(model, staggering)
    za, zb = bond_weights(a, parity, tol), bond_weights(b, parity, tol)
    size = 5 if parity == 'odd' else 6
    T = np.zeros((2 * size, 2 * size), dtype=complex)
    fill = _odd_cell if parity == 'odd' else _even_cell
    fill(T, 0, za.z)
    fill(T, size, zb.z)
    # R1 -> L2 inside the unit cell
    T[3, size + 2] = 1
    T[size + 2, 3] = -1
    hops = (ODD_HOPS if parity == 'odd' else EVEN_HOPS)[staggering]
    return KasteleynSpec(parity, staggering, (za, zb), T, hops)


@dataclass(frozen=True)
class RegularizedKasteleyn:
    """
    Degenerate odd inputs (v2 = 0 or v6 = 0) replaced by v2 = v6 = eps with
    v8 re-solved from the FF condition. D is a polynomial of degree <= 4 in
    eps, so an exact fit through five samples gives its value at eps = 0.
    """

    specs: tuple
    eps: tuple
    parity: str = 'odd'

    @property
    def staggering(self):
        return self.specs[0].staggering

    def d(self, t1, t2):
        samples = np.array([ks.d(t1, t2) for ks in self.specs])
        flat = samples.reshape(len(self.specs), -1)
        re = P.polyfit(np.array(self.eps), flat.real, len(self.eps) - 1)[0]
        im = P.polyfit(np.array(self.eps), flat.imag, len(self.eps) - 1)[0]
        return (re + 1j * im).reshape(samples.shape[1:])


def _regularize(wt, eps):
    v = list(wt.v)
    v[1] = v[5] = eps
    if v[6] == 0:
        raise NumericDomainError("regularization re-solves v8 from the FF condition and needs v7 != 0")
    v[7] = (v[0] * v[1] + v[2] * v[3] - v[4] * v[5]) / v[6]
    return Weights16.odd(v)


def regularized_kasteleyn(model, staggering=None, eps=EPS_SAMPLES):
    a, b = _cells(model)
    staggering = _staggering_of(model, staggering)
    specs = []
    for e in eps:
        ra, rb = _regularize(a, e), _regularize(b, e)
        specs.append(kasteleyn_spec(LatticeSpec(2, 2, ra, 'column', rb), 'odd', staggering))
    logger.debug(f"regularized Kasteleyn matrix from {len(specs)} eps samples")
    return RegularizedKasteleyn(tuple(specs), tuple(float(e) for e in eps))


def d_theta(ks, t1, t2):
    """D(t1, t2) in the angle coordinates of the matching free-energy integrand."""
    return ks.d(t1, t2)


# --- finite lattices and free energies --------------------------------------

@dataclass(frozen=True)
class FiniteDeterminant:
    rows: int
    cols: int
    log_det: complex
    product: complex
    sqrt: complex | None

    @property
    def free_energy_per_site(self):
        """ln sqrt|Det| / (2 M N); two sites per unit cell."""
        return float(self.log_det.real / 2 / (2 * self.rows * self.cols))


def finite_det_product(ks, rows, cols):
    """Product of D over t1 = 2 pi n / N, t2 = 2 pi m / M."""
    if rows < 1 or cols < 1:
        raise SchemaError(f"momentum grid needs positive dimensions, got {rows}x{cols}")
    t1 = 2 * np.pi * np.arange(cols)[None, :] / cols
    t2 = 2 * np.pi * np.arange(rows)[:, None] / rows
    values = d_theta(ks, t1, t2)
    if np.any(values == 0):
        raise NumericDomainError("a momentum determinant vanishes on the finite grid")
    log_det = complex(np.sum(np.log(values.astype(complex))))
    product = complex(np.exp(log_det)) if log_det.real < 700 else complex('inf')
    sqrt = None
    if abs(np.sin(log_det.imag)) <= 1e-9 and np.cos(log_det.imag) > 0:
        sqrt = complex(np.exp(log_det.real / 2))
    else:
        logger.warning(f"determinant product is not real-positive (phase {log_det.imag:.6f}); no root chosen")
    return FiniteDeterminant(rows, cols, log_det, product, sqrt)


@dataclass(frozen=True)
class DeterminantIntegrand:
    ks: object
    prefactor: float = PREFACTOR_16

    @property
    def family(self):
        return f"kasteleyn-{self.ks.parity}-{self.ks.staggering}"

    def integrand(self, t1, t2):
        t1, t2 = np.broadcast_arrays(np.asarray(t1, dtype=float), np.asarray(t2, dtype=float))
        out = np.empty(t1.shape, dtype=complex)
        # row at a time keeps the (..., n, n) stack small
        for i in range(t1.shape[0]):
            out[i] = d_theta(self.ks, t1[i], t2[i])
        return out


def dimer_free_energy(ks, grid=DEFAULT_GRID, threads=None):
    """-beta f per site: (1/16 pi^2) times the periodic quadrature of ln D."""
    return free_energy(DeterminantIntegrand(ks), grid, threads)
