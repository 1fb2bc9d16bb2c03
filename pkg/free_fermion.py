#!/usr/bin/env python3
"""
Free-fermion 8-vertex models: conditions, free-energy integrands and the
periodic quadrature that turns them into -beta*f per lattice site.

Every integrand has the form

    -beta f = prefactor * integral_0^2pi integral_0^2pi ln( sum_k c_k X_k cos(a_k t1 + b_k t2) )

with polynomial coefficients X_k in the weights. Families:

    even_homog        homogeneous even model, prefactor 1/8pi^2
    odd_homog_s4      homogeneous odd model in its short printed form (known to disagree, kept for comparison)
    odd_bipartite     bipartite staggered odd model, 1/16pi^2
    odd_homog_E1      homogeneous odd model from the bipartite form
    odd_column        column staggered odd model
    odd_homog_E2      homogeneous odd model from the column form
    even_bipartite    bipartite staggered even model
    even_homog_E3     homogeneous even model from the bipartite form
    even_column       column staggered even model
    even_homog_E4     homogeneous even model from the column form

Staggered families take cell A weights as (w or v) and cell B as the barred set.

Usage:
    from free_fermion import integrand_coeffs, free_energy
    fe = free_energy(integrand_coeffs(spec, 'odd_homog_E1'))
    print(fe.minus_beta_f)
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass

import numpy as np
from scipy.integrate import dblquad, quad

from lattice_core import LatticeSpec, Weights16
from vertexlab_config import DEFAULT_GRID, DEFAULT_TOL, THREADS, NumericDomainError, SchemaError

logger = logging.getLogger(__name__)

PREFACTOR_8 = 1 / (8 * np.pi ** 2)
PREFACTOR_16 = 1 / (16 * np.pi ** 2)
CATALAN = 0.915965594177219015
IMAG_TOL = 1e-9

# (coefficient, multiplier, (a, b)) for multiplier * X * cos(a t1 + b t2)
PATTERN_BASIC = (('A', 1, (0, 0)), ('B', 2, (1, 0)), ('C', 2, (0, 1)), ('D', 2, (1, -1)), ('E', 2, (1, 1)))
PATTERN_BIPARTITE = PATTERN_BASIC + (('F', 2, (2, 0)), ('G', 2, (0, 2)))
PATTERN_COLUMN = PATTERN_BASIC + (('G', 2, (0, 2)), ('H', 2, (1, -2)), ('I', 2, (1, 2)))
PATTERN_E1_HOMOG = (('A', 2, (0, 0)), ('D', 2, (1, 0)), ('E', 2, (0, 1)), ('F', 2, (-1, 1)), ('G', 2, (1, 1)))
PATTERN_E2_HOMOG = (('A', 1, (0, 0)), ('B', 2, (1, 0)), ('G', 2, (0, 1)), ('H', 2, (1, -1)), ('I', 2, (1, 1)))


# --- free-fermion conditions ------------------------------------------------

def ff_residual(wt, which='even'):
    """Left minus right of a free-fermion condition: even, odd, even_ti or odd_ti."""
    w, v = wt.w, wt.v
    if which == 'even':
        return complex(w[0] * w[1] + w[2] * w[3] - w[4] * w[5] - w[6] * w[7])
    if which == 'odd':
        return complex(v[0] * v[1] + v[2] * v[3] - v[4] * v[5] - v[6] * v[7])
    if which == 'even_ti':
        return complex(w[0] * w[1] * w[2] * w[3] - w[4] * w[5] * w[6] * w[7])
    if which == 'odd_ti':
        return complex(v[0] * v[1] * v[2] * v[3] - v[4] * v[5] * v[6] * v[7])
    raise SchemaError(f"unknown free-fermion condition {which!r}")


def _require_ff(wt, parity, tol, cell='A'):
    scale = wt.scale()
    r = ff_residual(wt, parity)
    if abs(r) > tol * scale ** 2:
        raise NumericDomainError(f"cell {cell} is not {parity} free-fermion (residual {abs(r):.3g})")


def random_ff_weights(rng, parity='even', real=True, low=0.3, high=1.3):
    """
    Random free-fermion weights: the first weight is solved from the others.
    Real draws are repeated until it comes out positive.
    """
    for _ in range(1000):
        if real:
            x = rng.uniform(low, high, 8).astype(complex)
            x[2:4] *= 0.5
        else:
            x = rng.uniform(-1, 1, 8) + 1j * rng.uniform(-1, 1, 8)
        x[0] = (x[4] * x[5] + x[6] * x[7] - x[2] * x[3]) / x[1]
        if not real or x[0].real > 0:
            return Weights16.even(x) if parity == 'even' else Weights16.odd(x)
    raise NumericDomainError("could not draw positive free-fermion weights")


# --- coefficient families ---------------------------------------------------

def _even_homog(w, _):
    w1, w2, w3, w4, w5, w6, w7, w8 = w
    return {
        'A': w1 ** 2 + w2 ** 2 + w3 ** 2 + w4 ** 2,
        'B': w1 * w3 - w2 * w4,
        'C': w1 * w4 - w2 * w3,
        'D': w3 * w4 - w7 * w8,
        'E': w3 * w4 - w5 * w6,
    }


def _odd_homog_s4(v, _):
    v1, v2, v3, v4, v5, v6, v7, v8 = v
    return {
        'A': (v1 * v2 + v3 * v4) * (v5 * v6 + v7 * v8) + v1 ** 2 * v4 ** 2 + v2 ** 2 * v3 ** 2
             + v5 ** 2 * v7 ** 2 + v6 ** 2 * v8 ** 2,
        'B': 2 * v5 * v6 * v7 * v8 - v1 ** 2 * v4 ** 2 - v2 ** 2 * v3 ** 2,
        'C': 2 * v1 * v2 * v3 * v4 - v5 ** 2 * v7 ** 2 - v6 ** 2 * v8 ** 2,
        'D': (v1 * v2 - v7 * v8) * (v5 * v6 - v3 * v4),
        'E': (v1 * v2 - v5 * v6) * (v7 * v8 - v3 * v4),
    }


def _odd_bipartite(v, b):
    v1, v2, v3, v4, v5, v6, v7, v8 = v
    b1, b2, b3, b4, b5, b6, b7, b8 = b
    return {
        'A': (b8 ** 2 * v6 ** 2 + b7 ** 2 * v5 ** 2 + b5 ** 2 * v7 ** 2 + b6 ** 2 * v8 ** 2
              + b3 ** 2 * v1 ** 2 + b4 ** 2 * v2 ** 2 + b1 ** 2 * v3 ** 2 + b2 ** 2 * v4 ** 2
              + 2 * (v8 * v7 + v5 * v6) * (b8 * b7 + b5 * b6)),
        'B': (v1 * b3 + v2 * b4) * (v7 * b5 + v8 * b6) - (v3 * b1 + v4 * b2) * (v5 * b7 + v6 * b8),
        'C': (v3 * b1 + v4 * b2) * (v7 * b5 + v8 * b6) - (v1 * b3 + v2 * b4) * (v5 * b7 + v6 * b8),
        'D': v1 * v4 * b2 * b3 + v2 * v3 * b1 * b4 - v6 * v8 * b6 * b8 - v5 * v7 * b5 * b7,
        'E': v1 * v3 * b1 * b3 + v2 * v4 * b2 * b4 - v6 * v7 * b5 * b8 - v5 * v8 * b6 * b7,
        'F': -(v1 * v2 - v5 * v6) * (b1 * b2 - b5 * b6),
        'G': -(v1 * v2 - v7 * v8) * (b1 * b2 - b7 * b8),
    }


def _odd_homog_e1(v, _):
    v1, v2, v3, v4, v5, v6, v7, v8 = v
    return {
        'A': (v1 * v2 + v3 * v4) * (v5 * v6 + v7 * v8) + (v1 ** 2 * v3 ** 2 + v2 ** 2 * v4 ** 2)
             + (v5 ** 2 * v7 ** 2 + v6 ** 2 * v8 ** 2),
        'D': 2 * v1 * v2 * v3 * v4 - (v5 ** 2 * v7 ** 2 + v6 ** 2 * v8 ** 2),
        'E': (v1 ** 2 * v3 ** 2 + v2 ** 2 * v4 ** 2) - 2 * v5 * v6 * v7 * v8,
        'F': (v1 * v2 - v5 * v6) * (v3 * v4 - v7 * v8),
        'G': (v1 * v2 - v7 * v8) * (v3 * v4 - v5 * v6),
    }


def _odd_column(v, b):
    v1, v2, v3, v4, v5, v6, v7, v8 = v
    b1, b2, b3, b4, b5, b6, b7, b8 = b
    s, sb = v5 * v7 - v6 * v8, b5 * b7 - b6 * b8
    return {
        'A': ((v5 ** 2 + v8 ** 2) * (b6 ** 2 + b7 ** 2) + (v6 ** 2 + v7 ** 2) * (b5 ** 2 + b8 ** 2)
              + 2 * v1 * v3 * b1 * b3 + 2 * v2 * v4 * b2 * b4 + 2 * v5 * v8 * b6 * b7 + 2 * v6 * v7 * b5 * b8),
        'B': v1 * v2 * b3 * b4 + v3 * v4 * b1 * b2 - v5 * v6 * b7 * b8 - v7 * v8 * b5 * b6 - s * sb,
        'C': (b5 * b8 * (v6 ** 2 + v7 ** 2) - b6 * b7 * (v5 ** 2 + v8 ** 2)
              - v5 * v8 * (b6 ** 2 + b7 ** 2) + v6 * v7 * (b5 ** 2 + b8 ** 2)),
        'D': (v3 * v4 - v5 * v6) * sb - s * (b3 * b4 - b5 * b6),
        'E': (v1 * v2 - v5 * v6) * sb - s * (b1 * b2 - b5 * b6),
        'G': v8 * v5 * b7 * b6 + v7 * v6 * b8 * b5 - v3 * v1 * b3 * b1 - v4 * v2 * b4 * b2,
        'H': (v1 * v2 - v7 * v8) * (b1 * b2 - b7 * b8),
        'I': (v1 * v2 - v5 * v6) * (b1 * b2 - b5 * b6),
    }


def _odd_homog_e2(v, _):
    v1, v2, v3, v4, v5, v6, v7, v8 = v
    return {
        'A': 2 * (v5 ** 2 + v8 ** 2) * (v6 ** 2 + v7 ** 2) + 2 * v1 ** 2 * v3 ** 2 + 2 * v2 ** 2 * v4 ** 2
             + 4 * v5 * v6 * v7 * v8,
        'B': 2 * v1 * v2 * v3 * v4 - v5 ** 2 * v7 ** 2 - v6 ** 2 * v8 ** 2,
        'G': 2 * v5 * v6 * v7 * v8 - v1 ** 2 * v3 ** 2 - v2 ** 2 * v4 ** 2,
        'H': (v1 * v2 - v7 * v8) ** 2,
        'I': (v1 * v2 - v5 * v6) ** 2,
    }


def _even_bipartite(w, b):
    w1, w2, w3, w4, w5, w6, w7, w8 = w
    b1, b2, b3, b4, b5, b6, b7, b8 = b
    return {
        'A': (w1 ** 2 * b1 ** 2 + w2 ** 2 * b2 ** 2 + w3 ** 2 * b3 ** 2 + w4 ** 2 * b4 ** 2
              + w5 ** 2 * b6 ** 2 + w6 ** 2 * b5 ** 2 + w7 ** 2 * b8 ** 2 + w8 ** 2 * b7 ** 2
              + 2 * (w5 * w6 + w7 * w8) * (b5 * b6 + b7 * b8)),
        'B': -(w1 * b1 + w2 * b2) * (w5 * b6 + w6 * b5) + (w3 * b3 + w4 * b4) * (w7 * b8 + w8 * b7),
        'C': -(w1 * b1 + w2 * b2) * (w7 * b8 + w8 * b7) + (w3 * b3 + w4 * b4) * (w5 * b6 + w6 * b5),
        'D': -w1 * w4 * b1 * b4 - w2 * w3 * b2 * b3 + w5 * w7 * b6 * b8 + w6 * w8 * b5 * b7,
        'E': -w1 * w3 * b1 * b3 - w2 * w4 * b2 * b4 + w5 * w8 * b6 * b7 + w6 * w7 * b5 * b8,
        'F': (w3 * w4 - w5 * w6) * (b3 * b4 - b5 * b6),
        'G': (w3 * w4 - w7 * w8) * (b3 * b4 - b7 * b8),
    }


def _even_homog_e3(w, _):
    w1, w2, w3, w4, w5, w6, w7, w8 = w
    return {
        'A': w1 ** 4 + w2 ** 4 + w3 ** 4 + w4 ** 4 + 4 * w5 ** 2 * w6 ** 2 + 4 * w5 * w6 * w7 * w8
             + 4 * w7 ** 2 * w8 ** 2,
        'B': 2 * w7 * w8 * (w3 ** 2 + w4 ** 2) - 2 * w5 * w6 * (w1 ** 2 + w2 ** 2),
        'C': 2 * w5 * w6 * (w3 ** 2 + w4 ** 2) - 2 * w7 * w8 * (w1 ** 2 + w2 ** 2),
        'D': 2 * w5 * w6 * w7 * w8 - w1 ** 2 * w4 ** 2 - w2 ** 2 * w3 ** 2,
        'E': 2 * w5 * w6 * w7 * w8 - w1 ** 2 * w3 ** 2 - w2 ** 2 * w4 ** 2,
        'F': (w3 * w4 - w5 * w6) ** 2,
        'G': (w3 * w4 - w7 * w8) ** 2,
    }


def _even_column(w, b):
    w1, w2, w3, w4, w5, w6, w7, w8 = w
    b1, b2, b3, b4, b5, b6, b7, b8 = b
    x, xb = w1 * w4 - w2 * w3, b1 * b4 - b2 * b3
    return {
        'A': ((w1 ** 2 + w3 ** 2) * (b1 ** 2 + b3 ** 2) + (w2 ** 2 + w4 ** 2) * (b2 ** 2 + b4 ** 2)
              + 2 * (w1 * w3 * b1 * b3 + w2 * b2 * w4 * b4 + w5 * w8 * b6 * b7 + w6 * w7 * b5 * b8)),
        'B': -x * xb + w1 * w2 * b3 * b4 + w3 * w4 * b1 * b2 - w5 * w6 * b7 * b8 - w7 * w8 * b6 * b5,
        'C': (-w1 * w3 * (b1 ** 2 + b3 ** 2) - b1 * b3 * (w1 ** 2 + w3 ** 2)
              + w2 * w4 * (b2 ** 2 + b4 ** 2) + b2 * b4 * (w2 ** 2 + w4 ** 2)),
        'D': x * (b3 * b4 - b5 * b6) + xb * (w3 * w4 - w5 * w6),
        'E': x * (b3 * b4 - b7 * b8) + xb * (w3 * w4 - w7 * w8),
        'G': w1 * w3 * b1 * b3 + w2 * w4 * b2 * b4 - w5 * w8 * b6 * b7 - w6 * w7 * b5 * b8,
        'H': -(w3 * w4 - w5 * w6) * (b3 * b4 - b5 * b6),
        'I': -(w3 * w4 - w7 * w8) * (b3 * b4 - b7 * b8),
    }


def _even_homog_e4(w, _):
    w1, w2, w3, w4, w5, w6, w7, w8 = w
    x = w1 * w4 - w2 * w3
    return {
        'A': (w1 ** 2 + w3 ** 2) ** 2 + 2 * w1 ** 2 * w3 ** 2 + (w2 ** 2 + w4 ** 2) ** 2
             + 2 * w2 ** 2 * w4 ** 2 + 4 * w5 * w6 * w7 * w8,
        'B': -x ** 2 + 2 * w1 * w2 * w3 * w4 - 2 * w5 * w6 * w7 * w8,
        'C': -2 * w1 * w3 * (w1 ** 2 + w3 ** 2) + 2 * w2 * w4 * (w2 ** 2 + w4 ** 2),
        'D': 2 * x * (w3 * w4 - w5 * w6),
        'E': 2 * x * (w3 * w4 - w7 * w8),
        'G': w1 ** 2 * w3 ** 2 + w2 ** 2 * w4 ** 2 - 2 * w5 * w6 * w7 * w8,
        'H': -(w3 * w4 - w5 * w6) ** 2,
        'I': -(w3 * w4 - w7 * w8) ** 2,
    }


@dataclass(frozen=True)
class Family:
    name: str
    parity: str
    staggered: bool
    pattern: tuple
    prefactor: float
    build: object


FAMILIES = {f.name: f for f in (
    Family('even_homog', 'even', False, PATTERN_BASIC, PREFACTOR_8, _even_homog),
    Family('odd_homog_s4', 'odd', False, PATTERN_BASIC, PREFACTOR_8, _odd_homog_s4),
    Family('odd_bipartite', 'odd', True, PATTERN_BIPARTITE, PREFACTOR_16, _odd_bipartite),
    Family('odd_homog_E1', 'odd', False, PATTERN_E1_HOMOG, PREFACTOR_16, _odd_homog_e1),
    Family('odd_column', 'odd', True, PATTERN_COLUMN, PREFACTOR_16, _odd_column),
    Family('odd_homog_E2', 'odd', False, PATTERN_E2_HOMOG, PREFACTOR_16, _odd_homog_e2),
    Family('even_bipartite', 'even', True, PATTERN_BIPARTITE, PREFACTOR_16, _even_bipartite),
    Family('even_homog_E3', 'even', False, PATTERN_BIPARTITE, PREFACTOR_16, _even_homog_e3),
    Family('even_column', 'even', True, PATTERN_COLUMN, PREFACTOR_16, _even_column),
    Family('even_homog_E4', 'even', False, PATTERN_COLUMN, PREFACTOR_16, _even_homog_e4),
)}


@dataclass(frozen=True)
class IntegrandCoeffs:
    family: str
    values: dict
    pattern: tuple
    prefactor: float

    def __getitem__(self, name):
        return self.values[name]

    def integrand(self, t1, t2):
        t1, t2 = np.asarray(t1, dtype=float), np.asarray(t2, dtype=float)
        total = np.zeros(np.broadcast(t1, t2).shape, dtype=complex)
        for name, mult, (a, b) in self.pattern:
            total = total + mult * self.values[name] * np.cos(a * t1 + b * t2)
        return total

    def scaled_terms(self):
        """Pattern entries with the coefficient value multiplied in: [(mult * X, (a, b)), ...]."""
        return [(mult * self.values[name], ab) for name, mult, ab in self.pattern]


def _cells(model):
    if isinstance(model, Weights16):
        return model, model
    if isinstance(model, LatticeSpec):
        return model.cell_a, (model.cell_b if model.cell_b is not None else model.cell_a)
    raise SchemaError(f"expected Weights16 or LatticeSpec, got {type(model).__name__}")


def integrand_coeffs(model, family, tol=DEFAULT_TOL, check_ff=True):
    """Coefficients of a family's integrand for a Weights16 or a (staggered) LatticeSpec."""
    if family not in FAMILIES:
        raise SchemaError(f"unknown integrand family {family!r}; known: {sorted(FAMILIES)}")
    fam = FAMILIES[family]
    a, b = _cells(model)
    if not fam.staggered and a != b:
        raise SchemaError(f"{family} is a homogeneous family but the model has two cell types")
    for wt, cell in ((a, 'A'), (b, 'B')):
        if fam.parity == 'even' and not wt.is_even(tol):
            raise SchemaError(f"{family} needs even weights in cell {cell}")
        if fam.parity == 'odd' and not wt.is_odd(tol):
            raise SchemaError(f"{family} needs odd weights in cell {cell}")
        if check_ff:
            _require_ff(wt, fam.parity, tol, cell)
    side = 'w' if fam.parity == 'even' else 'v'
    values = fam.build(getattr(a, side), getattr(b, side))
    return IntegrandCoeffs(family, {k: complex(x) for k, x in values.items()}, fam.pattern, fam.prefactor)


def constant_coeffs(value, prefactor=PREFACTOR_8):
    """A constant integrand; handy for checking the quadrature normalisation."""
    return IntegrandCoeffs('constant', {'A': complex(value)}, (('A', 1, (0, 0)),), prefactor)


# --- quadrature -------------------------------------------------------------

@dataclass(frozen=True)
class FreeEnergyResult:
    minus_beta_f: float
    value: float
    coarse: float
    delta: float
    grid: int


def _row_log_sum(coeffs, rows, grid):
    h = 2 * np.pi / grid
    t1 = (rows[:, None] + 0.5) * h
    t2 = (np.arange(grid)[None, :] + 0.5) * h
    vals = coeffs.integrand(t1, t2)
    scale = max(float(np.max(np.abs(vals))), 1e-300)
    bad = (vals.real <= 0) | (np.abs(vals.imag) > IMAG_TOL * scale)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise NumericDomainError(
            f"nonpositive integrand {vals[i, j]:.6g} at theta=({t1[i, 0]:.6f}, {t2[0, j]:.6f})")
    return float(np.sum(np.log(vals.real)))


def _grid_integral(coeffs, grid, threads):
    chunks = np.array_split(np.arange(grid), max(1, min(threads, grid)))
    if len(chunks) == 1:
        total = _row_log_sum(coeffs, chunks[0], grid)
    else:
        partials = [0.0] * len(chunks)
        with ThreadPoolExecutor(max_workers=len(chunks)) as executor:
            futures = {executor.submit(_row_log_sum, coeffs, rows, grid): k for k, rows in enumerate(chunks)}
            for future in as_completed(futures):
                partials[futures[future]] = future.result()
        total = float(np.sum(partials))
    return coeffs.prefactor * total * (2 * np.pi / grid) ** 2


def free_energy(coeffs, grid=DEFAULT_GRID, threads=None):
    """
    -beta*f on the half-offset periodic grid (never samples 0 or pi).

    Also evaluates grid/2 and reports the Richardson value (4 f_G - f_{G/2}) / 3
    as minus_beta_f.
    """
    if grid < 4 or grid % 2:
        raise SchemaError(f"quadrature grid must be an even number >= 4, got {grid}")
    threads = max(1, threads or THREADS)
    logger.info(f"quadrature of {coeffs.family} on a {grid}x{grid} grid")
    fine = _grid_integral(coeffs, grid, threads)
    coarse = _grid_integral(coeffs, grid // 2, threads)
    return FreeEnergyResult(
        minus_beta_f=(4 * fine - coarse) / 3,
        value=fine,
        coarse=coarse,
        delta=abs(fine - coarse),
        grid=grid,
    )


# --- order parameters and critical manifolds --------------------------------

@dataclass(frozen=True)
class Omega2:
    value: complex
    label: str


def _omega_label(value, tol):
    if abs(value) <= tol:
        return 'disorder'
    if abs(value - 1) <= tol:
        return 'critical'
    if abs(value.imag) <= tol and value.real > 1:
        return 'ordered'
    return 'disordered'


def omega2(wt, form=1, tol=DEFAULT_TOL):
    """
    Omega^2 of a homogeneous even model.

    form 1: 1 + (w1-w2-w3-w4)(w1-w2+w3+w4)(w1+w2-w3+w4)(w1+w2+w3-w4) / (16 w5 w6 w7 w8)
    form 2: (w1+w2+w3+w4)(w1+w2-w3-w4)(w1-w2+w3-w4)(w1-w2-w3+w4) / (16 w1 w2 w3 w4)

    The two agree on the temperature-independent free-fermion manifold.
    """
    w1, w2, w3, w4, w5, w6, w7, w8 = wt.w
    if form == 1:
        den = 16 * w5 * w6 * w7 * w8
        if den == 0:
            raise NumericDomainError("Omega^2 (form 1) divides by w5 w6 w7 w8 = 0")
        value = 1 + (w1 - w2 - w3 - w4) * (w1 - w2 + w3 + w4) * (w1 + w2 - w3 + w4) * (w1 + w2 + w3 - w4) / den
    elif form == 2:
        den = 16 * w1 * w2 * w3 * w4
        if den == 0:
            raise NumericDomainError("Omega^2 (form 2) divides by w1 w2 w3 w4 = 0")
        value = (w1 + w2 + w3 + w4) * (w1 + w2 - w3 - w4) * (w1 - w2 + w3 - w4) * (w1 - w2 - w3 + w4) / den
    else:
        raise SchemaError(f"Omega^2 form must be 1 or 2, got {form!r}")
    value = complex(value)
    return Omega2(value, _omega_label(value, tol))


def magnetization(o, tol=DEFAULT_TOL):
    """Spontaneous magnetization (1 - Omega^-2)^(1/8) above Omega^2 = 1, zero otherwise."""
    value = o.value if isinstance(o, Omega2) else complex(o)
    if abs(value.imag) > tol * max(1.0, abs(value)):
        raise NumericDomainError(f"magnetization needs a real Omega^2, got {value}")
    x = value.real
    if x <= 1:
        return 0.0
    return float((1 - 1 / x) ** 0.125)


def critical_conditions(model, family):
    """
    Residuals of the printed transition conditions.

    odd_homog: [max(|v1v2+v3v4|, |v5v6+v7v8|), v1v3+v2v4, v5v7+v6v8,
                (v1v2+v3v4)(v5v6+v7v8)+(v1v3-v2v4)^2+(v5v7-v6v8)^2]
    even_bipartite: the four sign patterns over w_i wbar_i and the crossed 5/6, 7/8 products
    even_column: (w1+w3)(b1+b3) +/- (w2-w4)(b2-b4), (w2+w4)(b2+b4) +/- (w1-w3)(b1-b3),
                 in the order that zeroes the integrand at (pi,pi), (0,pi), (pi,0), (0,0)
    """
    a, b = _cells(model)
    if family == 'odd_homog':
        v1, v2, v3, v4, v5, v6, v7, v8 = a.v
        return [
            complex(max(abs(v1 * v2 + v3 * v4), abs(v5 * v6 + v7 * v8))),
            complex(v1 * v3 + v2 * v4),
            complex(v5 * v7 + v6 * v8),
            complex((v1 * v2 + v3 * v4) * (v5 * v6 + v7 * v8) + (v1 * v3 - v2 * v4) ** 2 + (v5 * v7 - v6 * v8) ** 2),
        ]
    w, wb = a.w, b.w
    if family == 'even_bipartite':
        t = [w[0] * wb[0], w[1] * wb[1], w[2] * wb[2], w[3] * wb[3],
             w[4] * wb[5] + w[5] * wb[4], w[6] * wb[7] + w[7] * wb[6]]
        signs = ((-1, -1, 1, 1, 1, 1), (1, 1, -1, -1, 1, 1), (1, 1, 1, 1, -1, 1), (1, 1, 1, 1, 1, -1))
        return [complex(sum(s * x for s, x in zip(row, t))) for row in signs]
    if family == 'even_column':
        p = (w[0] + w[2]) * (wb[0] + wb[2])
        q = (w[1] - w[3]) * (wb[1] - wb[3])
        r = (w[1] + w[3]) * (wb[1] + wb[3])
        s = (w[0] - w[2]) * (wb[0] - wb[2])
        return [complex(p + q), complex(p - q), complex(r + s), complex(r - s)]
    raise SchemaError(f"unknown critical-condition family {family!r}; use odd_homog, even_bipartite or even_column")


COLUMN_CRITICAL_CORNERS = ((np.pi, np.pi), (0.0, np.pi), (np.pi, 0.0), (0.0, 0.0))


def column_critical_partner(a, b, corner=0):
    """
    Cell B with w̄1, w̄2 re-solved so that column condition `corner` holds
    together with the even FF condition of cell B (the other weights of b kept).
    """
    w1, w2, w3, w4 = a.w[:4]
    b3, b4 = b.w[2], b.w[3]
    R = b.w[4] * b.w[5] + b.w[6] * b.w[7] - b3 * b4
    alpha, beta, gamma, delta = w1 + w3, w2 - w4, w2 + w4, w1 - w3
    # condition k as c1 b1 + c2 b2 + c0 = 0
    c1, c2, c0 = {
        0: (alpha, beta, alpha * b3 - beta * b4),
        1: (alpha, -beta, alpha * b3 + beta * b4),
        2: (delta, gamma, gamma * b4 - delta * b3),
        3: (-delta, gamma, gamma * b4 + delta * b3),
    }[corner]
    if c2 == 0:
        raise NumericDomainError(f"critical condition {corner} does not involve w̄2 for these cell A weights")
    roots = np.roots([c1, c0, R * c2])
    if len(roots) == 0:
        raise NumericDomainError(f"critical condition {corner} has no solution with the FF condition")
    b1 = complex(roots[0])
    b2 = -(c1 * b1 + c0) / c2
    return b.with_labels(w1=b1, w2=b2)


def biptocol_conditions(model):
    """Residuals (cell A, cell B) of the condition sets under which bipartite and column integrands match term by term."""
    a, b = _cells(model)

    def pair(f):
        return (complex(f(a)), complex(f(b)))

    return {
        'even: w3w4 = w7w8': pair(lambda c: c.w[2] * c.w[3] - c.w[6] * c.w[7]),
        'even: w3w4 = w5w6': pair(lambda c: c.w[2] * c.w[3] - c.w[4] * c.w[5]),
        'odd: v3v4 = v7v8': pair(lambda c: c.v[2] * c.v[3] - c.v[6] * c.v[7]),
        'odd: v3v4 = v5v6': pair(lambda c: c.v[2] * c.v[3] - c.v[4] * c.v[5]),
    }


# column integrand term -> bipartite term once the listed column terms vanish;
# each map is an integer change of variables (t1, t2) of determinant +-1
BIPTOCOL_TERMS = {
    'even: w3w4 = w7w8': (('E', 'I'), 'G', {'A': 'A', 'B': 'E', 'C': 'B', 'D': 'C', 'G': 'F', 'H': 'D'}),
    'even: w3w4 = w5w6': (('D', 'H'), 'F', {'A': 'A', 'B': 'D', 'C': 'C', 'E': 'B', 'G': 'G', 'I': 'E'}),
    'odd: v3v4 = v7v8': (('E', 'I'), 'F', {'A': 'A', 'B': 'E', 'C': 'C', 'D': 'B', 'G': 'G', 'H': 'D'}),
    'odd: v3v4 = v5v6': (('D', 'H'), 'G', {'A': 'A', 'B': 'D', 'C': 'B', 'E': 'C', 'G': 'F', 'I': 'E'}),
}


def column_as_bipartite(model, condition, tol=DEFAULT_TOL):
    """
    Rewrite the column integrand of a staggered model in the bipartite term pattern.

    Needs the named condition to hold in both cells. The column terms it kills are
    dropped and the rest are moved onto bipartite modes by a unimodular change of
    variables, so the free energy is unchanged and the bipartite term that the same
    condition kills is left at zero.
    """
    if condition not in BIPTOCOL_TERMS:
        raise SchemaError(f"unknown condition {condition!r}; known: {sorted(BIPTOCOL_TERMS)}")
    parity = condition.split(':')[0]
    a, b = _cells(model)
    scale = max(a.scale(), b.scale())
    residuals = biptocol_conditions(model)[condition]
    if max(abs(r) for r in residuals) > tol * scale ** 2:
        raise NumericDomainError(f"condition {condition} does not hold (residuals {residuals})")
    vanishing, dropped, relabel = BIPTOCOL_TERMS[condition]
    column = integrand_coeffs(model, f'{parity}_column', tol)
    for name in vanishing:
        if abs(column[name]) > tol * scale ** 4:
            raise NumericDomainError(f"column term {name} = {column[name]:.3g} should vanish under {condition}")
    values = {target: column[source] for source, target in relabel.items()}
    values[dropped] = 0j
    logger.debug(f"{condition}: column terms {vanishing} dropped, bipartite {dropped} = 0")
    return IntegrandCoeffs(f'{parity}_bipartite', values, PATTERN_BIPARTITE, column.prefactor)


# --- odd -> even free-fermion map -------------------------------------------

def ff_even_from_odd(wt, signs=(1, 1, 1, 1), tol=DEFAULT_TOL):
    """
    Even free-fermion weights with the same integrand as an odd free-fermion model.

    signs = (sA, sB, sC, sD) picks the branches of
        B = sB (v1v2+v3v4)   C = sC (v5v7+v6v8)   D = sD (v1v3+v2v4)
        A = sA sqrt(B^2 + (v5v7-v6v8)^2 + (v1v3-v2v4)^2)
        E = (v1v2-v3v4)(v5v6-v7v8)
    and then 2w1 = -A+B+C+D, 2w2 = A-B+C+D, 2w3 = A+B-C+D, 2w4 = A+B+C-D,
    2 w5 w6 = AB+CD-E, 2 w7 w8 = AB+CD+E (split as w5 = w6, w7 = w8).
    Per site, -beta f of the odd model is half that of the even image.
    """
    if not wt.is_odd(tol):
        raise SchemaError("ff_even_from_odd takes odd weights")
    _require_ff(wt, 'odd', tol)
    sA, sB, sC, sD = signs
    v1, v2, v3, v4, v5, v6, v7, v8 = wt.v
    B = sB * (v1 * v2 + v3 * v4)
    C = sC * (v5 * v7 + v6 * v8)
    D = sD * (v1 * v3 + v2 * v4)
    Cbar = v5 * v7 - v6 * v8
    Dbar = v1 * v3 - v2 * v4
    E = (v1 * v2 - v3 * v4) * (v5 * v6 - v7 * v8)
    A = sA * np.sqrt(complex(B ** 2 + Cbar ** 2 + Dbar ** 2))
    w56 = np.sqrt(complex((A * B + C * D - E) / 2))
    w78 = np.sqrt(complex((A * B + C * D + E) / 2))
    return Weights16.even((
        (-A + B + C + D) / 2, (A - B + C + D) / 2, (A + B - C + D) / 2, (A + B + C - D) / 2,
        w56, w56, w78, w78,
    ))


def ff_even_from_odd_branches(wt, tol=DEFAULT_TOL):
    """All sign choices of ff_even_from_odd, duplicates (e.g. from a zero root) removed."""
    out = []
    for signs in np.ndindex(2, 2, 2, 2):
        image = ff_even_from_odd(wt, tuple(1 - 2 * s for s in signs), tol)
        if not any(np.allclose(image.as_vector(), o.as_vector(), rtol=0, atol=1e-12) for o in out):
            out.append(image)
    return out


# --- independent oracles ----------------------------------------------------

def onsager_free_energy(K_h, K_v):
    """-beta f per spin of the square-lattice Ising model (anisotropic Onsager integral)."""
    c = np.cosh(2 * K_h) * np.cosh(2 * K_v)
    sh, sv = np.sinh(2 * K_h), np.sinh(2 * K_v)
    integral, _ = dblquad(
        lambda t2, t1: np.log(c - sh * np.cos(t1) - sv * np.cos(t2)),
        0, np.pi,
        lambda _: 0, lambda _: np.pi,
    )
    return float(np.log(2) + integral / (2 * np.pi ** 2))


def dimer_free_energy_oracle():
    """-beta f per site of close-packed dimers on the square lattice at unit activities, by 1D quadrature."""
    def row(theta):
        a = 4 - 2 * np.cos(theta)
        return np.log((a + np.sqrt(a * a - 4)) / 2)

    value, _ = quad(row, 0, 2 * np.pi, limit=200)
    return float(value / (8 * np.pi))
