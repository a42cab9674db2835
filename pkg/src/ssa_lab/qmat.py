"""Complex-matrix core: states, Kronecker products, partial traces, eigensolver.

Index convention, fixed globally: subsystem 0 is the slowest-varying tensor
index (big-endian), so a basis label (i0, i1, ..., in) maps to the flat row
index i0*d1*...*dn + i1*d2*...*dn + ... + in.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, ParseError, ValidationError

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10
NORM_TOL = 1e-10


def _prod(dims: Sequence[int]) -> int:
    out = 1
    for d in dims:
        out *= int(d)
    return out


def _as_dims(dims: Iterable[int]) -> tuple[int, ...]:
    out = tuple(int(d) for d in dims)
    if not out:
        raise DimensionError("dims must contain at least one subsystem")
    if any(d < 1 for d in out):
        raise DimensionError(f"subsystem dimensions must be >= 1, got {out}")
    return out


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state on a tensor product of finite-dimensional subsystems.

    ``dims`` lists the subsystem dimensions; ``data`` is the square complex
    matrix of side prod(dims).  The constructor only checks shape
    consistency; build from untrusted data through :func:`validate_density`,
    which enforces hermiticity, unit trace and positivity.
    """

    dims: tuple[int, ...]
    data: np.ndarray

    def __post_init__(self) -> None:
        dims = _as_dims(self.dims)
        data = np.array(self.data, dtype=complex)
        side = _prod(dims)
        if data.ndim != 2 or data.shape != (side, side):
            raise DimensionError(
                f"matrix shape {data.shape} does not match dims {dims} "
                f"(expected {side}x{side})"
            )
        data.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", data)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.data).real)


@dataclass(frozen=True)
class PureStateVector:
    """Normalized state vector with an attached subsystem layout."""

    dims: tuple[int, ...]
    amps: np.ndarray

    def __post_init__(self) -> None:
        dims = _as_dims(self.dims)
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.shape[0] != _prod(dims):
            raise DimensionError(
                f"vector length {amps.shape[0]} does not match dims {dims}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"norm: vector has norm {norm!r}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def to_density(self) -> DensityMatrix:
        return DensityMatrix(self.dims, np.outer(self.amps, self.amps.conj()))


@dataclass(frozen=True)
class EigDecomposition:
    """Hermitian eigendecomposition with eigenvalues sorted descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two complex matrices."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def tensor_density(*states: DensityMatrix) -> DensityMatrix:
    """Tensor product of density matrices; dims lists concatenate."""
    if not states:
        raise DimensionError("tensor_density needs at least one state")
    data = states[0].data
    dims: tuple[int, ...] = states[0].dims
    for s in states[1:]:
        data = np.kron(data, s.data)
        dims = dims + s.dims
    return DensityMatrix(dims, data)


def tensor_pure(*states: PureStateVector) -> PureStateVector:
    """Tensor product of pure states; dims lists concatenate."""
    if not states:
        raise DimensionError("tensor_pure needs at least one state")
    amps = states[0].amps
    dims: tuple[int, ...] = states[0].dims
    for s in states[1:]:
        amps = np.kron(amps, s.amps)
        dims = dims + s.dims
    return PureStateVector(dims, amps)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the kept subsystems, in their original relative order."""
    n = len(rho.dims)
    keep_set = set(int(k) for k in keep)
    if not keep_set:
        raise DimensionError("keep must name at least one subsystem")
    if any(k < 0 or k >= n for k in keep_set):
        raise DimensionError(f"keep {sorted(keep_set)} out of range for {n} subsystems")
    traced = [i for i in range(n) if i not in keep_set]
    tensor = rho.data.reshape(rho.dims + rho.dims)
    for idx in sorted(traced, reverse=True):
        half = tensor.ndim // 2
        tensor = np.trace(tensor, axis1=idx, axis2=idx + half)
    kept_dims = tuple(rho.dims[i] for i in sorted(keep_set))
    side = _prod(kept_dims)
    return DensityMatrix(kept_dims, tensor.reshape(side, side))


def permute_subsystems(rho: DensityMatrix, order: Sequence[int]) -> DensityMatrix:
    """Reorder tensor legs; ``order[i]`` names the old position of new leg i."""
    n = len(rho.dims)
    order = tuple(int(i) for i in order)
    if sorted(order) != list(range(n)):
        raise DimensionError(f"order {order} is not a permutation of 0..{n - 1}")
    tensor = rho.data.reshape(rho.dims + rho.dims)
    perm = order + tuple(i + n for i in order)
    new_dims = tuple(rho.dims[i] for i in order)
    side = _prod(new_dims)
    return DensityMatrix(new_dims, tensor.transpose(perm).reshape(side, side))


def _canonical_phase(vectors: np.ndarray) -> np.ndarray:
    """Fix each column's phase so its largest-modulus entry is real >= 0."""
    out = np.array(vectors)
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = int(np.argmax(np.abs(col)))
        z = col[idx]
        if abs(z) > 0:
            out[:, j] = col * (z.conj() / abs(z))
    return out


def eig_hermitian(m: np.ndarray) -> EigDecomposition:
    """Eigendecomposition of a (nearly) Hermitian matrix.

    The input is symmetrized as (m + m†)/2 first, which absorbs 1e-10-level
    asymmetry from accumulated arithmetic.  Eigenvalues come back sorted
    descending; each eigenvector's phase is fixed so that its first
    largest-modulus component is real and nonnegative, and exactly degenerate
    eigenvalues order their vectors lexicographically.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"eig_hermitian needs a square matrix, got {m.shape}")
    h = (m + m.conj().T) / 2.0
    w, v = np.linalg.eigh(h)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = _canonical_phase(v[:, order])
    # deterministic order inside exactly repeated eigenvalues
    i = 0
    while i < len(w):
        j = i + 1
        while j < len(w) and w[j] == w[i]:
            j += 1
        if j - i > 1:
            cols = sorted(
                range(i, j),
                key=lambda k: tuple(np.round(v[:, k].real, 12))
                + tuple(np.round(v[:, k].imag, 12)),
                reverse=True,
            )
            v[:, i:j] = v[:, cols]
        i = j
    return EigDecomposition(w, v)


def validate_density(
    m: np.ndarray, dims: Iterable[int], tol: float = 1e-10
) -> DensityMatrix:
    """Check density-matrix invariants and return a cleaned-up state.

    The Hermitian part of ``m`` is taken, eigenvalues in [-tol, 0) are
    clipped to zero and the matrix renormalized to unit trace.  Violations
    beyond ``tol`` raise :class:`ValidationError` naming the invariant.
    """
    dims = _as_dims(dims)
    m = np.asarray(m, dtype=complex)
    side = _prod(dims)
    if m.ndim != 2 or m.shape != (side, side):
        raise ValidationError(
            f"shape: matrix {m.shape} does not match dims {dims} "
            f"(expected {side}x{side})"
        )
    herm_dev = float(np.max(np.abs(m - m.conj().T))) if side else 0.0
    if herm_dev > tol:
        raise ValidationError(f"hermiticity: max |m - m^dag| = {herm_dev:.3e} > {tol:.1e}")
    h = (m + m.conj().T) / 2.0
    tr = float(np.trace(h).real)
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"trace: Tr(m) = {tr!r} deviates from 1 by more than {tol:.1e}")
    w, v = np.linalg.eigh(h)
    if w.min() < -tol:
        raise ValidationError(
            f"positivity: smallest eigenvalue {w.min():.3e} < -{tol:.1e}"
        )
    w = np.clip(w, 0.0, None)
    cleaned = (v * w) @ v.conj().T
    cleaned /= np.trace(cleaned).real
    return DensityMatrix(dims, cleaned)


def random_pure(
    dims: Iterable[int], seed: int | np.random.Generator
) -> PureStateVector:
    """Haar-distributed pure state: normalized complex-Gaussian vector."""
    dims = _as_dims(dims)
    rng = np.random.default_rng(seed)
    n = _prod(dims)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureStateVector(dims, z / np.linalg.norm(z))


def random_density(
    dims: Iterable[int],
    rank: int | None = None,
    seed: int | np.random.Generator = 0,
) -> DensityMatrix:
    """Random mixed state from the induced measure.

    Partial trace of a Haar pure state on dims x [rank]; Hilbert-Schmidt
    measure when rank equals the total dimension.  Deterministic given seed.
    """
    dims = _as_dims(dims)
    side = _prod(dims)
    if rank is None:
        rank = side
    rank = int(rank)
    if rank < 1 or rank > side:
        raise DimensionError(f"rank must be in [1, {side}], got {rank}")
    psi = random_pure(dims + (rank,), seed)
    reduced = partial_trace(psi.to_density(), range(len(dims)))
    return DensityMatrix(dims, reduced.data)


# --- state file format -------------------------------------------------------
#
# DensityMatrix: {"dims": [d0, d1, ...], "matrix": [[[re, im], ...], ...]}
# PureStateVector: {"dims": [d0, d1, ...], "vector": [[re, im], ...]}
#
# Matrices are row-major and square.  NaN/Inf anywhere are rejected.


def _reject_constant(token: str) -> float:
    raise ParseError(f"non-finite value {token!r} in state file")


def _complex_from_pair(pair: object, where: str) -> complex:
    if (
        not isinstance(pair, (list, tuple))
        or len(pair) != 2
        or not all(isinstance(x, (int, float)) for x in pair)
    ):
        raise ParseError(f"{where}: expected [re, im] pair, got {pair!r}")
    re, im = float(pair[0]), float(pair[1])
    if not (math.isfinite(re) and math.isfinite(im)):
        raise ParseError(f"{where}: non-finite entry {pair!r}")
    return complex(re, im)


def _dims_from_obj(obj: dict, where: str) -> tuple[int, ...]:
    dims = obj.get("dims")
    if not isinstance(dims, list) or not dims or not all(
        isinstance(d, int) and d >= 1 for d in dims
    ):
        raise ParseError(f"{where}: field 'dims' must be a list of integers >= 1")
    return tuple(dims)


def density_to_dict(rho: DensityMatrix) -> dict:
    matrix = [
        [[float(z.real), float(z.imag)] for z in row] for row in rho.data
    ]
    return {"dims": list(rho.dims), "matrix": matrix}


def density_from_dict(obj: dict, tol: float = 1e-10) -> DensityMatrix:
    dims = _dims_from_obj(obj, "density state")
    rows = obj.get("matrix")
    side = _prod(dims)
    if not isinstance(rows, list) or len(rows) != side:
        raise ParseError(f"field 'matrix': expected {side} rows")
    data = np.empty((side, side), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != side:
            raise ParseError(f"field 'matrix' row {i}: expected {side} entries")
        for j, pair in enumerate(row):
            data[i, j] = _complex_from_pair(pair, f"matrix[{i}][{j}]")
    return validate_density(data, dims, tol=tol)


def pure_to_dict(psi: PureStateVector) -> dict:
    vector = [[float(z.real), float(z.imag)] for z in psi.amps]
    return {"dims": list(psi.dims), "vector": vector}


def pure_from_dict(obj: dict) -> PureStateVector:
    dims = _dims_from_obj(obj, "pure state")
    vec = obj.get("vector")
    n = _prod(dims)
    if not isinstance(vec, list) or len(vec) != n:
        raise ParseError(f"field 'vector': expected {n} entries")
    amps = np.empty(n, dtype=complex)
    for i, pair in enumerate(vec):
        amps[i] = _complex_from_pair(pair, f"vector[{i}]")
    return PureStateVector(dims, amps)


def load_state(path: str) -> DensityMatrix | PureStateVector:
    """Load a state file, dispatching on its 'matrix'/'vector' field."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    if "matrix" in obj:
        return density_from_dict(obj)
    if "vector" in obj:
        return pure_from_dict(obj)
    raise ParseError(f"{path}: expected a 'matrix' or 'vector' field")


def load_density(path: str) -> DensityMatrix:
    """Load a state file, accepting a pure state by promoting it."""
    state = load_state(path)
    if isinstance(state, PureStateVector):
        return state.to_density()
    return state


def save_state(path: str, state: DensityMatrix | PureStateVector) -> None:
    obj = (
        density_to_dict(state)
        if isinstance(state, DensityMatrix)
        else pure_to_dict(state)
    )
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True)
        fh.write("\n")
