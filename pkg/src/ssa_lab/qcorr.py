"""Quantum-correlation measures and the identities tying them to the gap.

Discord is optimized over rank-1 projective measurements only, matching the
classical-correlation definition used throughout; general POVMs are out of
scope and the possible discrepancy is treated as part of the documented
error budget of the audit tolerances.  All quantities are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import CapabilityError, ConfigError, DimensionError, ValidationError
from .entropy import (
    binary_entropy,
    conditional_entropy,
    mutual_information,
    t_gap,
    von_neumann_entropy,
)
from .purify import extend
from .qmat import DensityMatrix, PureStateVector, eig_hermitian, partial_trace

MAX_MEASURED_DIM = 8
MAX_EOF_DIM = 16
OUTCOME_CLIP = 1e-12


@dataclass(frozen=True)
class OptimizerConfig:
    """Multi-start settings for the derivative-free simplex searches."""

    restarts: int = 20
    max_evals: int = 2000
    seed: int = 0
    param_tol: float = 1e-8
    value_tol: float = 1e-10


def _multistart_minimize(
    objective, n: int, config: OptimizerConfig, spread: float = 2.0 * np.pi
):
    """Seeded multi-start Nelder-Mead with a final polish pass.

    Restart 0 starts from the origin, the rest from uniform draws.  The
    winner's simplex is re-initialized at the best point and run once more,
    which unsticks the degenerate simplexes the method is prone to in ten
    or more dimensions.  Ties go to the earlier restart, so a fixed seed
    fixes the outcome.
    """
    options = {
        "maxfev": config.max_evals,
        "xatol": config.param_tol,
        "fatol": config.value_tol,
        "adaptive": n >= 6,
    }
    rng = np.random.default_rng(config.seed)
    best_val = math.inf
    best_x = np.zeros(n)
    converged = False
    for restart in range(max(1, config.restarts)):
        x0 = np.zeros(n) if restart == 0 else rng.uniform(0.0, spread, n)
        res = minimize(objective, x0, method="Nelder-Mead", options=options)
        converged = converged or bool(res.success)
        if res.fun < best_val:
            best_val = float(res.fun)
            best_x = np.asarray(res.x)
    for _ in range(3):
        res = minimize(objective, best_x, method="Nelder-Mead", options=options)
        if res.fun >= best_val - config.value_tol:
            if res.fun < best_val:
                best_val, best_x = float(res.fun), np.asarray(res.x)
            break
        best_val = float(res.fun)
        best_x = np.asarray(res.x)
    return best_val, best_x, converged


@dataclass(frozen=True)
class MeasurementBasis:
    """Rank-1 projective measurement given as an orthonormal basis (columns)."""

    vectors: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DimensionError(f"basis must be a square column set, got {v.shape}")
        gram = v.conj().T @ v
        dev = float(np.max(np.abs(gram - np.eye(v.shape[0]))))
        if dev > 1e-10:
            raise ValidationError(f"orthonormality: Gram deviates from identity by {dev:.3e}")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @classmethod
    def computational(cls, dim: int) -> "MeasurementBasis":
        return cls(np.eye(dim, dtype=complex))

    @classmethod
    def from_angles(cls, dim: int, params: np.ndarray) -> "MeasurementBasis":
        return cls(givens_unitary(dim, params))


def n_basis_params(dim: int) -> int:
    """Chart size: one rotation and one phase per index pair."""
    return dim * (dim - 1)


def givens_unitary(dim: int, params: np.ndarray) -> np.ndarray:
    """Unitary from a chain of two-level Givens rotations with phases.

    The d(d-1)/2 index pairs (i < j) are visited in row order, consuming a
    (theta, phi) pair each; for a qubit this is exactly the Bloch-sphere
    chart.  Column phases are irrelevant to the measurement the columns
    define, so the chart covers all rank-1 projective bases.
    """
    params = np.asarray(params, dtype=float).reshape(-1)
    if params.shape[0] != n_basis_params(dim):
        raise ConfigError(
            f"expected {n_basis_params(dim)} parameters for dim {dim}, "
            f"got {params.shape[0]}"
        )
    u = np.eye(dim, dtype=complex)
    k = 0
    for i in range(dim - 1):
        for j in range(i + 1, dim):
            theta, phi = params[k], params[k + 1]
            k += 2
            c, s = math.cos(theta), math.sin(theta)
            g = np.eye(dim, dtype=complex)
            g[i, i] = c
            g[j, j] = c
            g[i, j] = -np.exp(1j * phi) * s
            g[j, i] = np.exp(-1j * phi) * s
            u = g @ u
    return u


def _batched_entropies(mats: np.ndarray) -> np.ndarray:
    """Entropies of a stack of small Hermitian matrices, in bits."""
    herm = (mats + np.conj(np.transpose(mats, (0, 2, 1)))) / 2.0
    ev = np.linalg.eigvalsh(herm)
    safe = np.where(ev > OUTCOME_CLIP, ev, 1.0)
    return -(np.where(ev > OUTCOME_CLIP, ev * np.log2(safe), 0.0)).sum(axis=1)


def _require_bipartite(rho: DensityMatrix, op: str) -> None:
    if len(rho.dims) != 2:
        raise DimensionError(f"{op} needs a bipartite state, got dims {rho.dims}")


def _cc_evaluator(rho_ab: DensityMatrix, measured: int):
    """Closure evaluating the classical correlation of one basis (as columns)."""
    d_a, d_b = rho_ab.dims
    r4 = rho_ab.data.reshape(d_a, d_b, d_a, d_b)
    other = 1 - measured
    s_other = von_neumann_entropy(partial_trace(rho_ab, {other}))

    def evaluate(vectors: np.ndarray) -> float:
        if measured == 1:
            conds = np.einsum("ji,ajbk,ki->iab", vectors.conj(), r4, vectors)
        else:
            conds = np.einsum("ai,ajbk,bi->ijk", vectors.conj(), r4, vectors)
        probs = np.einsum("iaa->i", conds).real
        mask = probs > OUTCOME_CLIP
        if not mask.any():
            return s_other
        ent = _batched_entropies(conds[mask] / probs[mask, None, None])
        return s_other - float((probs[mask] * ent).sum())

    return evaluate


def classical_correlation_at(
    rho_ab: DensityMatrix, basis: MeasurementBasis, measured: int
) -> float:
    """Entropy reduction of the unmeasured side under one projective basis."""
    _require_bipartite(rho_ab, "classical_correlation_at")
    if measured not in (0, 1):
        raise DimensionError(f"measured must be 0 or 1, got {measured}")
    if basis.dim != rho_ab.dims[measured]:
        raise DimensionError(
            f"basis dimension {basis.dim} does not match measured subsystem "
            f"dimension {rho_ab.dims[measured]}"
        )
    return _cc_evaluator(rho_ab, measured)(basis.vectors)


@dataclass(frozen=True)
class DiscordResult:
    discord: float
    classical_correlation: float
    optimal_basis: MeasurementBasis
    restarts_used: int
    converged: bool


def discord(
    rho_ab: DensityMatrix,
    measured: int,
    config: OptimizerConfig = OptimizerConfig(),
) -> DiscordResult:
    """Mutual information minus the best projective classical correlation.

    Maximization runs a multi-start Nelder-Mead search over the Givens
    chart; restart 0 always starts from the computational basis, the rest
    from seeded uniform draws.  Results merge by best value with ties going
    to the earlier restart, so a fixed seed fixes the outcome.
    """
    _require_bipartite(rho_ab, "discord")
    if measured not in (0, 1):
        raise DimensionError(f"measured must be 0 or 1, got {measured}")
    d = rho_ab.dims[measured]
    if d > MAX_MEASURED_DIM:
        raise CapabilityError(
            f"measured dimension {d} exceeds the supported maximum {MAX_MEASURED_DIM}"
        )
    mi = mutual_information(rho_ab)
    evaluate = _cc_evaluator(rho_ab, measured)
    n = n_basis_params(d)
    if n == 0:
        basis = MeasurementBasis.computational(d)
        j_best = evaluate(basis.vectors)
        return DiscordResult(mi - j_best, j_best, basis, 0, True)

    def objective(x: np.ndarray) -> float:
        return -evaluate(givens_unitary(d, x))

    best_val, best_x, converged = _multistart_minimize(objective, n, config)
    j_best = -best_val
    basis = MeasurementBasis.from_angles(d, best_x)
    return DiscordResult(
        discord=mi - j_best,
        classical_correlation=j_best,
        optimal_basis=basis,
        restarts_used=max(1, config.restarts),
        converged=converged,
    )


_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_SY_SY = np.kron(_SIGMA_Y, _SIGMA_Y)


def concurrence(rho_ab: DensityMatrix) -> float:
    """Two-qubit concurrence from the spin-flipped spectrum."""
    if rho_ab.dims != (2, 2):
        raise DimensionError(f"concurrence needs dims (2, 2), got {rho_ab.dims}")
    r = rho_ab.data @ _SY_SY @ rho_ab.data.conj() @ _SY_SY
    ev = np.linalg.eigvals(r).real
    lam = np.sqrt(np.clip(ev, 0.0, None))
    lam.sort()
    return float(max(0.0, lam[3] - lam[2] - lam[1] - lam[0]))


def eof_two_qubit(rho_ab: DensityMatrix) -> float:
    """Closed-form entanglement of formation of a two-qubit state."""
    c = concurrence(rho_ab)
    return binary_entropy((1.0 + math.sqrt(max(0.0, 1.0 - c * c))) / 2.0)


def _hermitian_from_params(dim: int, params: np.ndarray) -> np.ndarray:
    h = np.zeros((dim, dim), dtype=complex)
    k = 0
    for i in range(dim):
        h[i, i] = params[k]
        k += 1
    for i in range(dim - 1):
        for j in range(i + 1, dim):
            h[i, j] = params[k] + 1j * params[k + 1]
            h[j, i] = params[k] - 1j * params[k + 1]
            k += 2
    return h


def _isometry_from_params(m: int, r: int, params: np.ndarray) -> np.ndarray:
    """First r columns of exp(iH); QR re-orthonormalization guards roundoff."""
    h = _hermitian_from_params(m, params)
    w, v = np.linalg.eigh(h)
    u = (v * np.exp(1j * w)) @ v.conj().T
    q, rr = np.linalg.qr(u[:, :r])
    phases = np.diag(rr)
    phases = np.where(np.abs(phases) > 0, phases / np.abs(phases), 1.0)
    return q * phases


def eof_convex_roof(
    rho_ab: DensityMatrix,
    cardinality: int | None = None,
    config: OptimizerConfig = OptimizerConfig(),
) -> float:
    """Upper bound on the entanglement of formation by decomposition search.

    Minimizes sum_i p_i E(psi_i) over size-m pure-state decompositions.
    Every decomposition of a rank-r state arises from an m x r isometry
    acting on the canonical eigen-ensemble, so the isometry is the search
    variable.  The value is exact only at optimizer convergence and is
    documented as an upper bound.
    """
    _require_bipartite(rho_ab, "eof_convex_roof")
    d_a, d_b = rho_ab.dims
    if d_a * d_b > MAX_EOF_DIM:
        raise CapabilityError(
            f"total dimension {d_a * d_b} exceeds the supported maximum {MAX_EOF_DIM}"
        )
    dec = eig_hermitian(rho_ab.data)
    keep = dec.eigenvalues > OUTCOME_CLIP
    lam = dec.eigenvalues[keep]
    vecs = dec.eigenvectors[:, keep]
    rank = int(lam.shape[0])
    m = rank * rank if cardinality is None else int(cardinality)
    if m < rank:
        raise ConfigError(f"cardinality {m} below the state rank {rank}")
    root = vecs * np.sqrt(lam)  # column j = sqrt(l_j) |v_j>

    def average_entanglement(iso: np.ndarray) -> float:
        members = (root @ iso.T).T.reshape(m, d_a, d_b)
        gram = np.einsum("iab,icb->iac", members, members.conj())
        weights = np.einsum("iaa->i", gram).real
        mask = weights > OUTCOME_CLIP
        if not mask.any():
            return 0.0
        ent = _batched_entropies(gram[mask] / weights[mask, None, None])
        return float((weights[mask] * ent).sum())

    if rank == 1:
        return average_entanglement(np.eye(1, dtype=complex) if m == 1 else
                                    _isometry_from_params(m, 1, np.zeros(m * m)))

    n = m * m

    def objective(x: np.ndarray) -> float:
        return average_entanglement(_isometry_from_params(m, rank, x))

    best, _, _ = _multistart_minimize(objective, n, config, spread=np.pi)
    return best


def _eof_auto(rho_ab: DensityMatrix, config: OptimizerConfig) -> tuple[float, bool]:
    """(value, exact) with the Wootters form when the state is two-qubit."""
    if rho_ab.dims == (2, 2):
        return eof_two_qubit(rho_ab), True
    return eof_convex_roof(rho_ab, config=config), False


def discord_via_kw(psi: PureStateVector, measured: int) -> float:
    """Discord of one bipartition of a pure tripartite state, no optimization.

    For a pure global state the monogamy relation is saturated, so the
    discord toward the measured side equals the complement pair's
    entanglement of formation minus the conditional entropy.  The
    complement pair must be two-qubit so the closed form applies.
    """
    if len(psi.dims) != 3:
        raise DimensionError(f"discord_via_kw needs 3 subsystems, got dims {psi.dims}")
    if measured not in (1, 2):
        raise DimensionError(f"measured must be subsystem 1 or 2, got {measured}")
    complement = 3 - measured
    rho = psi.to_density()
    rho_ax = partial_trace(rho, {0, measured})
    rho_ay = partial_trace(rho, {0, complement})
    if rho_ay.dims != (2, 2):
        raise CapabilityError(
            f"complement pair has dims {rho_ay.dims}; the closed form needs (2, 2)"
        )
    return eof_two_qubit(rho_ay) - conditional_entropy(rho_ax, 1)


@dataclass(frozen=True)
class KWReport:
    """Monogamy gap D^(C)(rho_AC) + S(A|C) - E(rho_AB); nonnegative up to
    the discord/EOF estimation budget."""

    eof_ab: float
    discord_ac: float
    cond_entropy_ac: float
    gap: float


def kw_gap(
    rho_abc: DensityMatrix, config: OptimizerConfig = OptimizerConfig()
) -> KWReport:
    """Evaluate the monogamy inequality on a tripartite state."""
    if len(rho_abc.dims) != 3:
        raise DimensionError(f"kw_gap needs a tripartite state, got dims {rho_abc.dims}")
    d_a, d_b, d_c = rho_abc.dims
    if (d_a, d_b) != (2, 2):
        raise CapabilityError(
            f"kw_gap needs two-dimensional A and B (exact closed-form EOF), got {rho_abc.dims}"
        )
    if d_c > MAX_MEASURED_DIM:
        raise CapabilityError(
            f"C dimension {d_c} exceeds the supported maximum {MAX_MEASURED_DIM}"
        )
    rho_ab = partial_trace(rho_abc, {0, 1})
    rho_ac = partial_trace(rho_abc, {0, 2})
    eof_ab = eof_two_qubit(rho_ab)
    d_ac = discord(rho_ac, measured=1, config=config).discord
    ce_ac = conditional_entropy(rho_ac, 1)
    return KWReport(
        eof_ab=eof_ab,
        discord_ac=d_ac,
        cond_entropy_ac=ce_ac,
        gap=d_ac + ce_ac - eof_ab,
    )


@dataclass(frozen=True)
class TheoremOneAudit:
    """All eight correlation quantities entering the gap identities, the four
    assembled right-hand sides, and the entanglement increments under the
    B -> BE / C -> CE transforms."""

    t_a: float
    eof_ab: float
    eof_ac: float
    eof_ab_ext: float
    eof_ac_ext: float
    discord_b: float
    discord_c: float
    discord_b_ext: float
    discord_c_ext: float
    line1: float
    line2: float
    line3: float
    line4: float
    delta_e_b: float
    delta_e_c: float
    tolerance: float
    violations: tuple[str, ...]


def theorem1_audit(
    rho_abc: DensityMatrix, config: OptimizerConfig = OptimizerConfig()
) -> TheoremOneAudit:
    """Cross-check the correlation decompositions of the gap on one state.

    The envelope is d_A = 2, d_B, d_C <= 2 and rank <= 2, so that every
    entanglement value is either exact (two-qubit) or a tight convex-roof
    bound on a 2x4 state, and every discord side stays optimizable.  The
    pass tolerance widens to 5e-4 whenever a convex-roof value enters.
    """
    if len(rho_abc.dims) != 3:
        raise DimensionError(
            f"theorem1_audit needs a tripartite state, got dims {rho_abc.dims}"
        )
    d_a, d_b, d_c = rho_abc.dims
    if d_a != 2 or d_b > 2 or d_c > 2:
        raise CapabilityError(
            f"theorem1_audit envelope is d_A = 2, d_B, d_C <= 2; got {rho_abc.dims}"
        )
    eigs = np.linalg.eigvalsh((rho_abc.data + rho_abc.data.conj().T) / 2.0)
    rank = int((eigs > 1e-9).sum())
    if rank > 2:
        raise CapabilityError(
            f"theorem1_audit envelope is rank <= 2, got numerical rank {rank}"
        )
    rho_ab = partial_trace(rho_abc, {0, 1})
    rho_ac = partial_trace(rho_abc, {0, 2})
    ext = extend(rho_abc)
    eof_ab, exact_ab = _eof_auto(rho_ab, config)
    eof_ac, exact_ac = _eof_auto(rho_ac, config)
    eof_ab_ext, exact_ab_ext = _eof_auto(ext.rho_a_btilde, config)
    eof_ac_ext, exact_ac_ext = _eof_auto(ext.rho_a_ctilde, config)
    discord_b = discord(rho_ab, measured=1, config=config).discord
    discord_c = discord(rho_ac, measured=1, config=config).discord
    discord_b_ext = discord(ext.rho_a_btilde, measured=1, config=config).discord
    discord_c_ext = discord(ext.rho_a_ctilde, measured=1, config=config).discord
    t_a = t_gap(rho_abc).t_a
    line1 = (eof_ab_ext - eof_ab) + (discord_c_ext - discord_c)
    line2 = (eof_ac_ext - eof_ac) + (discord_b_ext - discord_b)
    line3 = (eof_ab_ext + eof_ac_ext) - (discord_b + discord_c)
    line4 = (discord_b_ext + discord_c_ext) - (eof_ab + eof_ac)
    delta_e_b = eof_ab_ext - eof_ab
    delta_e_c = eof_ac_ext - eof_ac
    all_exact = exact_ab and exact_ac and exact_ab_ext and exact_ac_ext
    tolerance = 1e-4 if all_exact else 5e-4
    violations = []
    if delta_e_b < -tolerance:
        violations.append(f"delta_e_b = {delta_e_b:.3e} < -{tolerance:.1e}")
    if delta_e_c < -tolerance:
        violations.append(f"delta_e_c = {delta_e_c:.3e} < -{tolerance:.1e}")
    return TheoremOneAudit(
        t_a=t_a,
        eof_ab=eof_ab,
        eof_ac=eof_ac,
        eof_ab_ext=eof_ab_ext,
        eof_ac_ext=eof_ac_ext,
        discord_b=discord_b,
        discord_c=discord_c,
        discord_b_ext=discord_b_ext,
        discord_c_ext=discord_c_ext,
        line1=line1,
        line2=line2,
        line3=line3,
        line4=line4,
        delta_e_b=delta_e_b,
        delta_e_c=delta_e_c,
        tolerance=tolerance,
        violations=tuple(violations),
    )


def conservation_check(
    psi: PureStateVector, config: OptimizerConfig = OptimizerConfig()
) -> tuple[float, float]:
    """Both sides of the correlation conservation law for a pure 3-qubit state:
    E(AB) + E(AC) on the left, D^(B)(AB) + D^(C)(AC) on the right."""
    if psi.dims != (2, 2, 2):
        raise CapabilityError(f"conservation_check needs three qubits, got {psi.dims}")
    rho = psi.to_density()
    rho_ab = partial_trace(rho, {0, 1})
    rho_ac = partial_trace(rho, {0, 2})
    lhs = eof_two_qubit(rho_ab) + eof_two_qubit(rho_ac)
    rhs = (
        discord(rho_ab, measured=1, config=config).discord
        + discord(rho_ac, measured=1, config=config).discord
    )
    return lhs, rhs
