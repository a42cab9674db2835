"""Constructive side of the saturation structure theorem.

States that saturate the tripartite entropy inequality are exactly the
mixtures of blocks |psi_AY><psi_AY| (x) rho_Z, with Y/Z a tensor-factor
partition of each block's B and C spaces, whose B-marginals and C-marginals
are mutually orthogonal across blocks.  This module builds such states from
explicit block specifications, measures marginal orthogonality, and
certifies whether a proposed decomposition reproduces a given state.

Embeddings into the global B and C spaces are explicit coordinate-subspace
isometries (a start offset per block and side), which turns the existential
orthogonality condition into a checkable one.  Discovering a decomposition
for an arbitrary input state is out of scope: the certifier validates a
*given* spec, it does not canonicalize or search.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import DimensionError, ParseError, ValidationError
from .entropy import t_gap
from .qmat import (
    DensityMatrix,
    PureStateVector,
    partial_trace,
    permute_subsystems,
    pure_from_dict,
    pure_to_dict,
    density_from_dict,
    density_to_dict,
    random_density,
    random_pure,
)

ORTHOGONALITY_TOL = 1e-10


@dataclass(frozen=True)
class SaturatingBlock:
    """One mixture block: weight, pure part on (A, B^L, C^L), mixed part on
    (B^R, C^R), the partition dims (bl, br, cl, cr), and the coordinate
    offsets embedding the block's B- and C-factors into the global spaces."""

    weight: float
    psi_ay: PureStateVector
    rho_z: DensityMatrix
    partition: tuple[int, int, int, int]
    embed_b: int = 0
    embed_c: int = 0

    def __post_init__(self) -> None:
        bl, br, cl, cr = (int(d) for d in self.partition)
        object.__setattr__(self, "partition", (bl, br, cl, cr))
        if self.weight <= 0:
            raise ValidationError(f"block weight must be > 0, got {self.weight}")
        if len(self.psi_ay.dims) != 3 or self.psi_ay.dims[1:] != (bl, cl):
            raise DimensionError(
                f"pure block dims {self.psi_ay.dims} do not match partition "
                f"(d_A, {bl}, {cl})"
            )
        if self.rho_z.dims != (br, cr):
            raise DimensionError(
                f"mixed block dims {self.rho_z.dims} do not match partition ({br}, {cr})"
            )
        if self.embed_b < 0 or self.embed_c < 0:
            raise DimensionError("embedding offsets must be nonnegative")

    @property
    def d_a(self) -> int:
        return self.psi_ay.dims[0]

    @property
    def b_dim(self) -> int:
        return self.partition[0] * self.partition[1]

    @property
    def c_dim(self) -> int:
        return self.partition[2] * self.partition[3]


@dataclass(frozen=True)
class SaturatingSpec:
    """Block decomposition targeting a state on global dims (d_A, d_B, d_C).

    When ``orthogonal`` is declared the embedding ranges must be pairwise
    disjoint on both the B and the C side, which forces the block marginals
    into orthogonal subspaces and hence a vanishing gap for the built state.
    """

    dims: tuple[int, int, int]
    blocks: tuple[SaturatingBlock, ...]
    orthogonal: bool = True

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 3 or any(d < 1 for d in dims):
            raise DimensionError(f"spec dims must be three dimensions >= 1, got {dims}")
        blocks = tuple(self.blocks)
        if not blocks:
            raise ValidationError("spec must contain at least one block")
        total = sum(b.weight for b in blocks)
        if abs(total - 1.0) > 1e-10:
            raise ValidationError(f"block weights sum to {total!r}, expected 1")
        d_a, d_b, d_c = dims
        for k, blk in enumerate(blocks):
            if blk.d_a != d_a:
                raise DimensionError(
                    f"block {k}: A dimension {blk.d_a} != global {d_a}"
                )
            if blk.embed_b + blk.b_dim > d_b:
                raise DimensionError(
                    f"block {k}: B range [{blk.embed_b}, {blk.embed_b + blk.b_dim}) "
                    f"exceeds d_B = {d_b}"
                )
            if blk.embed_c + blk.c_dim > d_c:
                raise DimensionError(
                    f"block {k}: C range [{blk.embed_c}, {blk.embed_c + blk.c_dim}) "
                    f"exceeds d_C = {d_c}"
                )
        if self.orthogonal:
            for side, lo, size in (
                ("B", "embed_b", "b_dim"),
                ("C", "embed_c", "c_dim"),
            ):
                spans = sorted(
                    (getattr(b, lo), getattr(b, lo) + getattr(b, size))
                    for b in blocks
                )
                for (s0, e0), (s1, _) in zip(spans, spans[1:]):
                    if s1 < e0:
                        raise ValidationError(
                            f"orthogonality declared but {side} embedding ranges overlap"
                        )
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "blocks", blocks)


def build_block(
    psi_ay: PureStateVector,
    rho_z: DensityMatrix,
    partition: Sequence[int],
) -> DensityMatrix:
    """|psi_AY><psi_AY| (x) rho_Z rearranged into (A, B^L B^R, C^L C^R) order."""
    bl, br, cl, cr = (int(d) for d in partition)
    if len(psi_ay.dims) != 3 or psi_ay.dims[1:] != (bl, cl):
        raise DimensionError(
            f"pure part dims {psi_ay.dims} inconsistent with partition {partition}"
        )
    if rho_z.dims != (br, cr):
        raise DimensionError(
            f"mixed part dims {rho_z.dims} inconsistent with partition {partition}"
        )
    d_a = psi_ay.dims[0]
    prod = np.kron(psi_ay.to_density().data, rho_z.data)
    five = DensityMatrix((d_a, bl, cl, br, cr), prod)
    ordered = permute_subsystems(five, (0, 1, 3, 2, 4))
    return DensityMatrix((d_a, bl * br, cl * cr), ordered.data)


def _embedding(global_dim: int, local_dim: int, offset: int) -> np.ndarray:
    v = np.zeros((global_dim, local_dim))
    v[offset : offset + local_dim, :] = np.eye(local_dim)
    return v


def embed_block(block: SaturatingBlock, dims: Sequence[int]) -> DensityMatrix:
    """The block's tripartite state carried into the global (A, B, C) space."""
    d_a, d_b, d_c = (int(d) for d in dims)
    local = build_block(block.psi_ay, block.rho_z, block.partition)
    iso = np.kron(
        np.eye(d_a),
        np.kron(
            _embedding(d_b, block.b_dim, block.embed_b),
            _embedding(d_c, block.c_dim, block.embed_c),
        ),
    )
    return DensityMatrix((d_a, d_b, d_c), iso @ local.data @ iso.T)


def build_saturating(spec: SaturatingSpec) -> DensityMatrix:
    """Mixture of the spec's embedded blocks on the spec's global dims."""
    data = sum(
        blk.weight * embed_block(blk, spec.dims).data for blk in spec.blocks
    )
    return DensityMatrix(spec.dims, data)


def block_marginals(
    spec: SaturatingSpec,
) -> tuple[list[DensityMatrix], list[DensityMatrix]]:
    """Per-block B- and C-marginals of the embedded blocks."""
    margs_b, margs_c = [], []
    for blk in spec.blocks:
        state = embed_block(blk, spec.dims)
        margs_b.append(partial_trace(state, {1}))
        margs_c.append(partial_trace(state, {2}))
    return margs_b, margs_c


@dataclass(frozen=True)
class OrthogonalityReport:
    """Pairwise Frobenius overlaps ||rho_k rho_k'||_F of two marginal families."""

    pairwise_overlaps_b: np.ndarray
    pairwise_overlaps_c: np.ndarray
    orthogonal: bool

    def max_off_diagonal(self) -> float:
        k = self.pairwise_overlaps_b.shape[0]
        if k < 2:
            return 0.0
        mask = ~np.eye(k, dtype=bool)
        return float(
            max(
                self.pairwise_overlaps_b[mask].max(),
                self.pairwise_overlaps_c[mask].max(),
            )
        )


def _overlap_matrix(states: Sequence[DensityMatrix]) -> np.ndarray:
    k = len(states)
    out = np.zeros((k, k))
    for i in range(k):
        for j in range(i, k):
            out[i, j] = out[j, i] = float(
                np.linalg.norm(states[i].data @ states[j].data)
            )
    return out


def check_orthogonality(
    marginals_b: Sequence[DensityMatrix],
    marginals_c: Sequence[DensityMatrix],
    tol: float = ORTHOGONALITY_TOL,
) -> OrthogonalityReport:
    """Measure mutual orthogonality of two marginal families."""
    if len(marginals_b) != len(marginals_c):
        raise DimensionError(
            f"{len(marginals_b)} B-marginals vs {len(marginals_c)} C-marginals"
        )
    for family in (marginals_b, marginals_c):
        dims = family[0].dims
        if any(m.dims != dims for m in family):
            raise DimensionError("marginals within one family must share dims")
    ov_b = _overlap_matrix(marginals_b)
    ov_c = _overlap_matrix(marginals_c)
    k = len(marginals_b)
    mask = ~np.eye(k, dtype=bool)
    ok = bool(k < 2 or (ov_b[mask].max() <= tol and ov_c[mask].max() <= tol))
    return OrthogonalityReport(ov_b, ov_c, ok)


@dataclass(frozen=True)
class Certificate:
    """Outcome of the three independent certification clauses.

    (a) the spec rebuilds the state entry-wise, (b) the spec's block
    marginals are mutually orthogonal, (c) the state's gap vanishes.  The
    clauses are never inferred from one another; a failed clause localizes
    which direction of the equivalence broke.
    """

    rebuild_ok: bool
    rebuild_witness: float
    orthogonality_ok: bool
    orthogonality_witness: float
    gap_ok: bool
    gap_witness: float

    @property
    def passed(self) -> bool:
        return self.rebuild_ok and self.orthogonality_ok and self.gap_ok

    def to_dict(self) -> dict:
        return {
            "rebuild": {"ok": self.rebuild_ok, "max_abs_diff": self.rebuild_witness},
            "orthogonality": {
                "ok": self.orthogonality_ok,
                "max_off_diagonal_overlap": self.orthogonality_witness,
            },
            "gap": {"ok": self.gap_ok, "t_a": self.gap_witness},
            "passed": self.passed,
        }


def certify(
    rho_abc: DensityMatrix, spec: SaturatingSpec, tol: float = 1e-8
) -> Certificate:
    """Check a proposed decomposition against a state; failures are reported,
    never raised."""
    if rho_abc.dims != spec.dims:
        raise DimensionError(
            f"state dims {rho_abc.dims} do not match spec dims {spec.dims}"
        )
    built = build_saturating(spec)
    rebuild_witness = float(np.max(np.abs(rho_abc.data - built.data)))
    margs_b, margs_c = block_marginals(spec)
    report = check_orthogonality(margs_b, margs_c, tol=ORTHOGONALITY_TOL)
    gap_witness = t_gap(rho_abc).t_a
    return Certificate(
        rebuild_ok=rebuild_witness <= tol,
        rebuild_witness=rebuild_witness,
        orthogonality_ok=report.orthogonal,
        orthogonality_witness=report.max_off_diagonal(),
        gap_ok=gap_witness <= tol,
        gap_witness=gap_witness,
    )


def _random_factor_pair(rng: np.random.Generator, n: int) -> tuple[int, int]:
    pairs = [(a, n // a) for a in range(1, n + 1) if n % a == 0]
    return pairs[int(rng.integers(len(pairs)))]


def _random_sector_sizes(
    rng: np.random.Generator, total: int, count: int
) -> list[int]:
    sizes = [1] * count
    spare = total - count
    for i in range(count):
        if spare <= 0:
            break
        extra = int(rng.integers(0, spare + 1))
        sizes[i] += extra
        spare -= extra
    rng.shuffle(sizes)
    return sizes


def random_saturating_spec(
    dims: Sequence[int],
    rng: np.random.Generator,
    max_blocks: int = 3,
    min_blocks: int = 1,
) -> SaturatingSpec:
    """Random block decomposition with disjoint (orthogonal) embeddings."""
    d_a, d_b, d_c = (int(d) for d in dims)
    k_max = min(max_blocks, d_b, d_c)
    k_min = min(min_blocks, k_max)
    k = int(rng.integers(k_min, k_max + 1))
    sizes_b = _random_sector_sizes(rng, d_b, k)
    sizes_c = _random_sector_sizes(rng, d_c, k)
    weights = rng.dirichlet(np.ones(k))
    blocks = []
    off_b = off_c = 0
    for i in range(k):
        bl, br = _random_factor_pair(rng, sizes_b[i])
        cl, cr = _random_factor_pair(rng, sizes_c[i])
        psi = random_pure((d_a, bl, cl), rng)
        rank = int(rng.integers(1, br * cr + 1))
        rho_z = random_density((br, cr), rank=rank, seed=rng)
        blocks.append(
            SaturatingBlock(
                weight=float(weights[i]),
                psi_ay=psi,
                rho_z=rho_z,
                partition=(bl, br, cl, cr),
                embed_b=off_b,
                embed_c=off_c,
            )
        )
        off_b += sizes_b[i]
        off_c += sizes_c[i]
    return SaturatingSpec((d_a, d_b, d_c), tuple(blocks), orthogonal=True)


def collide_embeddings(spec: SaturatingSpec) -> SaturatingSpec:
    """Orthogonality-violating perturbation: move every block's B-embedding
    onto the first block's range (the C side is left untouched)."""
    if len(spec.blocks) < 2:
        raise ValidationError("need at least two blocks to collide embeddings")
    target = spec.blocks[0].embed_b
    d_b = spec.dims[1]
    moved = tuple(
        replace(b, embed_b=min(target, d_b - b.b_dim)) for b in spec.blocks
    )
    return SaturatingSpec(spec.dims, moved, orthogonal=False)


# --- spec file format --------------------------------------------------------
#
# {"dims": [dA, dB, dC], "orthogonal": true,
#  "blocks": [{"weight": p, "psi": {...}, "rhoZ": {...},
#              "partition": [bl, br, cl, cr], "embedB": o, "embedC": o}, ...]}


def spec_to_dict(spec: SaturatingSpec) -> dict:
    return {
        "dims": list(spec.dims),
        "orthogonal": spec.orthogonal,
        "blocks": [
            {
                "weight": blk.weight,
                "psi": pure_to_dict(blk.psi_ay),
                "rhoZ": density_to_dict(blk.rho_z),
                "partition": list(blk.partition),
                "embedB": blk.embed_b,
                "embedC": blk.embed_c,
            }
            for blk in spec.blocks
        ],
    }


def spec_from_dict(obj: dict) -> SaturatingSpec:
    if not isinstance(obj, dict):
        raise ParseError("spec: top level must be a JSON object")
    dims = obj.get("dims")
    if (
        not isinstance(dims, list)
        or len(dims) != 3
        or not all(isinstance(d, int) and d >= 1 for d in dims)
    ):
        raise ParseError("spec: field 'dims' must be three integers >= 1")
    raw_blocks = obj.get("blocks")
    if not isinstance(raw_blocks, list) or not raw_blocks:
        raise ParseError("spec: field 'blocks' must be a nonempty list")
    orthogonal = obj.get("orthogonal", False)
    if not isinstance(orthogonal, bool):
        raise ParseError("spec: field 'orthogonal' must be a boolean")
    blocks = []
    for i, raw in enumerate(raw_blocks):
        if not isinstance(raw, dict):
            raise ParseError(f"spec: block {i} must be an object")
        try:
            weight = float(raw["weight"])
            partition = tuple(int(x) for x in raw["partition"])
            psi = pure_from_dict(raw["psi"])
            rho_z = density_from_dict(raw["rhoZ"])
            embed_b = int(raw.get("embedB", 0))
            embed_c = int(raw.get("embedC", 0))
        except KeyError as exc:
            raise ParseError(f"spec: block {i} missing field {exc}") from exc
        if len(partition) != 4:
            raise ParseError(f"spec: block {i} partition must have 4 entries")
        if not math.isfinite(weight):
            raise ParseError(f"spec: block {i} has non-finite weight")
        blocks.append(
            SaturatingBlock(
                weight=weight,
                psi_ay=psi,
                rho_z=rho_z,
                partition=partition,  # type: ignore[arg-type]
                embed_b=embed_b,
                embed_c=embed_c,
            )
        )
    return SaturatingSpec(tuple(dims), tuple(blocks), orthogonal=orthogonal)


def load_spec(path: str) -> SaturatingSpec:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh, parse_constant=lambda s: (_ for _ in ()).throw(
                ParseError(f"non-finite value {s!r} in spec file")
            ))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return spec_from_dict(obj)


def save_spec(path: str, spec: SaturatingSpec) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spec_to_dict(spec), fh, sort_keys=True)
        fh.write("\n")
