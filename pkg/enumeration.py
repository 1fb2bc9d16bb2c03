#!/usr/bin/env python3
"""
Exact partition functions by summing over every bond configuration of a
torus. This is the ground truth the other modules are checked against.

The 2^(2MN) configuration indices are split into fixed-size chunks. Chunks
run on a thread pool (numpy releases the GIL in the vectorised kernels) and
their partial sums are reduced in chunk order, so the result does not depend
on VERTEXLAB_THREADS.

Also holds independent oracles that do not go through vertex weights
at all: hard-hexagon placements and the Ising model in a field, with spins
on the bonds or on the sites of the torus.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor, as_completed

import numpy as np
import pandas as pd

from lattice_core import DOWN, LEFT, MASK_TO_INDEX, RIGHT, UP, ConfigStats
from vertexlab_config import CENSUS_CAP, ENUM_CAP, THREADS, SizeCapError

logger = logging.getLogger(__name__)

CHUNK_BITS = 16


def enumeration_size(spec):
    return 2 ** spec.bonds


def _check_cap(spec, cap, what):
    if spec.bonds > cap:
        raise SizeCapError(
            f"{what} of a {spec.rows}x{spec.cols} torus needs 2^{spec.bonds} configurations "
            f"(cap is 2^{cap})",
            required=spec.bonds, cap=cap,
        )


def _chunks(total):
    size = min(total, 1 << CHUNK_BITS)
    return [(start, min(start + size, total)) for start in range(0, total, size)]


def _site_masks(spec, start, stop):
    """Per-site vertex masks for configuration indices [start, stop); shape (M*N, chunk)."""
    M, N = spec.rows, spec.cols
    sites = M * N
    idx = np.arange(start, stop, dtype=np.int64)
    bits = (idx[None, :] >> np.arange(2 * sites, dtype=np.int64)[:, None]) & 1
    h = bits[:sites].reshape(M, N, -1)
    v = bits[sites:].reshape(M, N, -1)
    up = v
    down = np.roll(v, 1, axis=0)
    left = np.roll(h, 1, axis=1)
    masks = up * UP + down * DOWN + left * LEFT + h * RIGHT
    return masks.reshape(sites, -1), h.reshape(sites, -1).sum(axis=0), v.reshape(sites, -1).sum(axis=0)


def _chunk_sum(spec, start, stop):
    cell_vectors = [c.as_vector() for c in spec.cells]
    grid = spec.cell_grid().ravel()
    masks, Ns, Ms = _site_masks(spec, start, stop)
    prod = np.ones(stop - start, dtype=complex)
    for site in range(masks.shape[0]):
        prod *= cell_vectors[grid[site]][MASK_TO_INDEX[masks[site]]]
    f = spec.fugacities
    if f is not None and not f.is_identity():
        sites = spec.sites
        prod *= (np.power(f.s_h, Ns) * np.power(f.d_h, sites - Ns)
                 * np.power(f.s_v, Ms) * np.power(f.d_v, sites - Ms))
    return np.sum(prod)


def _run_chunks(spec, worker, threads):
    chunks = _chunks(enumeration_size(spec))
    threads = max(1, threads or THREADS)
    if len(chunks) == 1 or threads == 1:
        return [worker(spec, a, b) for a, b in chunks]
    partials = [None] * len(chunks)
    with ThreadPoolExecutor(max_workers=threads) as executor:
        futures = {executor.submit(worker, spec, a, b): k for k, (a, b) in enumerate(chunks)}
        for future in as_completed(futures):
            k = futures[future]
            partials[k] = future.result()
            logger.debug(f"chunk {k + 1}/{len(chunks)} done")
    return partials


def partition_enumerate(spec, threads=None, cap=None):
    """Z as the sum over all 2^(2MN) bond configurations.

    Fugacities, if present, are charged from the bond counts of each
    configuration rather than folded into the weights.
    """
    _check_cap(spec, cap or ENUM_CAP, 'enumeration')
    if spec.bonds > 20:
        logger.info(f"enumerating 2^{spec.bonds} configurations on a {spec.rows}x{spec.cols} torus")
    partials = _run_chunks(spec, _chunk_sum, threads)
    return complex(np.sum(np.array(partials, dtype=complex)))


def _chunk_census(spec, start, stop):
    masks, Ns, Ms = _site_masks(spec, start, stop)
    labels = MASK_TO_INDEX[masks]
    counts = np.zeros((stop - start, 16), dtype=np.int64)
    for site_labels in labels:
        counts[np.arange(stop - start), site_labels] += 1
    sites = spec.sites
    rows = np.column_stack([counts, sites - Ms, Ms, sites - Ns, Ns])
    unique, mult = np.unique(rows, axis=0, return_counts=True)
    return Counter({tuple(int(x) for x in row): int(c) for row, c in zip(unique, mult)})


def config_census(spec, threads=None):
    """Histogram of ConfigStats over every configuration (weights are ignored)."""
    _check_cap(spec, CENSUS_CAP, 'census')
    total = Counter()
    for partial in _run_chunks(spec, _chunk_census, threads):
        total.update(partial)
    return [
        (ConfigStats(n=row[:8], m=row[8:16], Md=row[16], Ms=row[17], Nd=row[18], Ns=row[19]), mult)
        for row, mult in sorted(total.items())
    ]


def census_frame(spec, threads=None):
    records = []
    for stats, mult in config_census(spec, threads):
        row = stats.as_row()
        row['multiplicity'] = mult
        records.append(row)
    return pd.DataFrame.from_records(records)


# --- independent oracles ----------------------------------------------------

def hard_hexagon_triple(rows, cols, i, j):
    """Sites covered by the particle anchored at (i, j): its v5, w7 and v3 vertices."""
    return ((i % rows, j % cols), (i % rows, (j + 1) % cols), ((i - 1) % rows, (j + 1) % cols))


def hard_hexagon_oracle(rows, cols, z):
    """Sum of z^k over sets of k site-disjoint particles on the torus."""
    anchors = []
    for i, j in itertools.product(range(rows), range(cols)):
        triple = hard_hexagon_triple(rows, cols, i, j)
        if len(set(triple)) == 3:
            anchors.append(frozenset(triple))
    total = 0j
    for k in range(len(anchors) + 1):
        count = 0
        for chosen in itertools.combinations(anchors, k):
            covered = set()
            for triple in chosen:
                if covered & triple:
                    break
                covered |= triple
            else:
                count += 1
        if count == 0 and k > 0:
            break
        total += count * complex(z) ** k
    return total


def ising_bond_spin_oracle(rows, cols, K_h, K_v, field):
    """
    Ising model with spins on the 2MN bonds of the torus.

    At every vertex the pairs (up, left) and (down, right) couple with K_h,
    the pairs (up, right) and (down, left) with K_v, and each spin feels
    `field` (so exp(field * sigma) per spin). Returns the partition function.
    """
    sites = rows * cols
    if 2 * sites > ENUM_CAP:
        raise SizeCapError(f"spin enumeration of a {rows}x{cols} torus needs 2^{2 * sites} states",
                           required=2 * sites, cap=ENUM_CAP)
    idx = np.arange(2 ** (2 * sites), dtype=np.int64)
    spins = 1 - 2 * ((idx[None, :] >> np.arange(2 * sites, dtype=np.int64)[:, None]) & 1)
    h = spins[:sites].reshape(rows, cols, -1)
    v = spins[sites:].reshape(rows, cols, -1)
    up, down = v, np.roll(v, 1, axis=0)
    left, right = np.roll(h, 1, axis=1), h
    S_h = (up * left + down * right).sum(axis=(0, 1))
    S_v = (up * right + down * left).sum(axis=(0, 1))
    magnet = spins.sum(axis=0)
    return complex(np.sum(np.exp(K_h * S_h + K_v * S_v + field * magnet)))


def ising_site_oracle(rows, cols, K, field):
    """Isotropic nearest-neighbour Ising model with spins on the MN sites, exp(field * sigma) per spin."""
    sites = rows * cols
    if sites > ENUM_CAP:
        raise SizeCapError(f"spin enumeration of a {rows}x{cols} torus needs 2^{sites} states",
                           required=sites, cap=ENUM_CAP)
    idx = np.arange(2 ** sites, dtype=np.int64)
    spins = (1 - 2 * ((idx[None, :] >> np.arange(sites, dtype=np.int64)[:, None]) & 1)).reshape(rows, cols, -1)
    bonds = (spins * np.roll(spins, 1, axis=0) + spins * np.roll(spins, 1, axis=1)).sum(axis=(0, 1))
    magnet = spins.sum(axis=(0, 1))
    return complex(np.sum(np.exp(K * bonds + field * magnet)))
