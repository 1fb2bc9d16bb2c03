#!/usr/bin/env python3
"""
Row-to-row transfer matrices for the 16-vertex model on an M x N torus.

A row matrix T[up, down] is indexed by the N vertical bond states above and
below a row (column 0 is the most significant bit, dashed = 0). It is built
by contracting the per-site tensors W[l, r, u, d] along the row and tracing
out the periodic horizontal bond, which costs O(4^N * N) instead of 8^N.

    Z = trace(T_{M-1} ... T_1 T_0)

Row and bipartite staggering alternate two row matrices. Column staggering
lives inside a single row matrix.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from lattice_core import MASK_TO_INDEX, decorated_cells
from vertexlab_config import TRANSFER_MAX_WIDTH, NumericDomainError, SchemaError, SizeCapError

logger = logging.getLogger(__name__)

POWER_TOL = 1e-12
POWER_MAX_ITER = 20000


@dataclass(frozen=True)
class RowTransfer:
    width: int
    matrix: np.ndarray


@dataclass(frozen=True)
class StripResult:
    width: int
    period: int
    minus_beta_f: complex
    dominant: complex
    degenerate: bool
    iterations: int


def site_tensor(weights):
    """W[l, r, u, d] for one site class."""
    vec = weights.as_vector()
    l, r, u, d = np.indices((2, 2, 2, 2))
    return vec[MASK_TO_INDEX[u * 8 + d * 4 + l * 2 + r]]


def row_transfer(row_cells):
    """Transfer matrix of one periodic row whose sites carry `row_cells` left to right."""
    tensors = [site_tensor(c) for c in row_cells]
    acc = tensors[0]
    for W in tensors[1:]:
        acc = np.einsum('arUD,rsud->asUuDd', acc, W)
        size = acc.shape[2] * 2
        acc = acc.reshape(2, 2, size, size)
    return RowTransfer(len(tensors), np.einsum('aaUD->UD', acc))


def _check_width(width):
    if width > TRANSFER_MAX_WIDTH:
        raise SizeCapError(
            f"transfer matrix of width {width} needs 2^{width} states (cap is 2^{TRANSFER_MAX_WIDTH})",
            required=width, cap=TRANSFER_MAX_WIDTH,
        )


def row_matrices(spec, width=None):
    """Row matrices for rows 0 and 1 of the staggering pattern (one if they coincide)."""
    width = width or spec.cols
    _check_width(width)
    cells = decorated_cells(spec)
    grid = spec.resized(max(spec.rows, 2), width).cell_grid()
    patterns = [tuple(grid[0]), tuple(grid[1])]
    first = row_transfer([cells[k] for k in patterns[0]]).matrix
    if patterns[1] == patterns[0]:
        return [first]
    return [first, row_transfer([cells[k] for k in patterns[1]]).matrix]


def partition_transfer(spec):
    mats = row_matrices(spec)
    M = spec.rows
    if len(mats) == 1:
        product = np.linalg.matrix_power(mats[0], M)
    else:
        pair = mats[1] @ mats[0]
        product = np.linalg.matrix_power(pair, M // 2)
        if M % 2:
            product = mats[0] @ product
    return complex(np.trace(product))


def _power_iteration(P, rng, tol, max_iter):
    n = P.shape[0]
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    lam = 0j
    for it in range(1, max_iter + 1):
        y = P @ x
        lam = np.vdot(x, y)
        norm = np.linalg.norm(y)
        if norm == 0:
            raise NumericDomainError("transfer matrix annihilated the iterate (zero spectral radius)")
        if np.linalg.norm(y - lam * x) <= tol * abs(lam):
            return lam, it, True
        x = y / norm
    return lam, max_iter, False


def free_energy_strip(spec, width=None, strict=False, tol=POWER_TOL, max_iter=POWER_MAX_ITER, seed=0):
    """
    Per-site -beta*f of an infinitely long strip of the given width.

    Power iteration on the row-period product. If it does not settle, the
    squared product is tried, which separates a +lambda/-lambda pair; such a
    result is flagged degenerate (and rejected when strict=True).
    """
    width = width or spec.cols
    if spec.staggering in ('column', 'bipartite') and width % 2:
        raise SchemaError(f"{spec.staggering} staggering needs an even strip width, got {width}")
    mats = row_matrices(spec, width)
    period = len(mats)
    P = mats[0] if period == 1 else mats[1] @ mats[0]
    rng = np.random.default_rng(seed)
    logger.info(f"strip free energy: width {width}, period {period}, {P.shape[0]} states")

    lam, iterations, ok = _power_iteration(P, rng, tol, max_iter)
    degenerate = False
    log_lam = None
    if ok:
        log_lam = np.log(lam)
    else:
        mu, more, ok = _power_iteration(P @ P, rng, tol, max_iter)
        iterations += more
        if not ok:
            raise NumericDomainError(
                f"no isolated dominant eigenvalue for width {width} after {iterations} iterations")
        degenerate = True
        log_lam = np.log(mu) / 2
        lam = np.exp(log_lam)
        logger.warning(f"dominant eigenvalue modulus is shared by a +/- pair at width {width}")
        if strict:
            raise NumericDomainError(f"degenerate dominant eigenvalue at width {width}")
    return StripResult(
        width=width,
        period=period,
        minus_beta_f=complex(log_lam / (width * period)),
        dominant=complex(lam),
        degenerate=degenerate,
        iterations=iterations,
    )
