"""Canonical purification and the B -> BE, C -> CE extension transforms.

The canonical purification is fixed as |psi> = sum_j sqrt(l_j) |v_j>|j_E>
over the eigenpairs with l_j > 1e-12, eigenvalues descending with the
eigensolver's deterministic tie-break.  Purifications are unique only up to
an ancilla unitary, so pinning this form gives tests a reproducible object.
The ancilla dimension equals the numerical rank, which keeps the extended
BE / CE spaces as small as the discord optimizer needs them to be.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .qmat import DensityMatrix, PureStateVector, eig_hermitian
from .structure import SaturatingSpec

RANK_TOL = 1e-12


@dataclass(frozen=True)
class PurificationResult:
    """Pure state on dims + (d_e,) whose ancilla trace returns the input."""

    psi: PureStateVector
    d_e: int


def purify(rho: DensityMatrix) -> PurificationResult:
    """Canonical purification of a mixed state."""
    dec = eig_hermitian(rho.data)
    keep = dec.eigenvalues > RANK_TOL
    lam = dec.eigenvalues[keep]
    vecs = dec.eigenvectors[:, keep]
    d_e = int(lam.shape[0])
    # amps[(i, j)] = sqrt(lam_j) * v_j[i]  with the ancilla index fastest
    amps = (vecs * np.sqrt(lam)).reshape(-1)
    psi = PureStateVector(rho.dims + (d_e,), amps)
    return PurificationResult(psi=psi, d_e=d_e)


@dataclass(frozen=True)
class ExtensionPair:
    """Reduced states on (A, BE) and (A, CE) of the canonical purification."""

    rho_a_btilde: DensityMatrix
    rho_a_ctilde: DensityMatrix


def extend(rho_abc: DensityMatrix) -> ExtensionPair:
    """Purify a tripartite state and regroup into the two extended bipartitions."""
    if len(rho_abc.dims) != 3:
        raise DimensionError(
            f"extend needs a tripartite state, got dims {rho_abc.dims}"
        )
    result = purify(rho_abc)
    d_a, d_b, d_c = rho_abc.dims
    d_e = result.d_e
    t = result.psi.amps.reshape(d_a, d_b, d_c, d_e)
    # trace out C: legs (a, b, e) x (a', b', e'), B slower than E inside BE
    abe = np.einsum("abce,xycf->abexyf", t, t.conj())
    rho_a_btilde = DensityMatrix(
        (d_a, d_b * d_e), abe.reshape(d_a * d_b * d_e, d_a * d_b * d_e)
    )
    ace = np.einsum("abce,xbyf->acexyf", t, t.conj())
    rho_a_ctilde = DensityMatrix(
        (d_a, d_c * d_e), ace.reshape(d_a * d_c * d_e, d_a * d_c * d_e)
    )
    return ExtensionPair(rho_a_btilde=rho_a_btilde, rho_a_ctilde=rho_a_ctilde)


def purify_saturating(spec: SaturatingSpec) -> PureStateVector:
    """Purify a block decomposition with block-orthogonal ancilla sectors.

    |Psi> = sum_k sqrt(p_k) |psi^k_AY> (x) |phi^k_ZE>, where each mixed part
    is purified into its own ancilla sector of dimension rank(rho^k_Z).  The
    reduced state on (A, B, C) is the spec's mixture whether or not the
    spec's marginals are orthogonal.
    """
    d_a, d_b, d_c = spec.dims
    sector_dims = []
    sector_eigs = []
    for blk in spec.blocks:
        dec = eig_hermitian(blk.rho_z.data)
        keep = dec.eigenvalues > RANK_TOL
        sector_eigs.append((dec.eigenvalues[keep], dec.eigenvectors[:, keep]))
        sector_dims.append(int(keep.sum()))
    d_e = sum(sector_dims)
    amps = np.zeros((d_a, d_b, d_c, d_e), dtype=complex)
    offset_e = 0
    for blk, (lam, vecs), r in zip(spec.blocks, sector_eigs, sector_dims):
        bl, br, cl, cr = blk.partition
        psi_t = blk.psi_ay.amps.reshape(d_a, bl, cl)
        for i in range(r):
            mu_t = vecs[:, i].reshape(br, cr)
            comp = np.einsum("axc,yz->axycz", psi_t, mu_t)
            comp = comp.reshape(d_a, bl * br, cl * cr)
            amps[
                :,
                blk.embed_b : blk.embed_b + bl * br,
                blk.embed_c : blk.embed_c + cl * cr,
                offset_e + i,
            ] += np.sqrt(blk.weight * lam[i]) * comp
        offset_e += r
    return PureStateVector((d_a, d_b, d_c, d_e), amps.reshape(-1))
