"""A two-block family of 2x4x4 states with a closed-form saturation gap.

The family mixes an A-factorized block with an AB-pure block,

    rho = p1 |psi1_A><psi1_A| (x) rho1_BC + p2 |psi2_AB><psi2_AB| (x) rho2_C,

where |psi1_A> = a1|0> + b1|1>, |psi2_AB> = a2|00> + b2|1>|phi_B> with
|phi_B> = a|1_B> + b|2_B>, rho1_BC mixes |22> and |33| with weight lambda1,
and rho2_C mixes |0> and |1> with weight lambda2.  Each block saturates the
tripartite entropy inequality on its own; the mixture's gap is controlled
entirely by the B-marginal overlap gamma = sqrt(lambda1) * b * beta2 and
admits a closed form, which makes the family the package's central
cross-oracle: the closed form and the entropic definition must agree
everywhere, and both vanish exactly on the gamma = 0 locus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, TextIO

import numpy as np

from .errors import ConfigError, ValidationError
from .entropy import EIG_CLIP, t_gap
from .qmat import DensityMatrix, kron, validate_density

SWEEPABLE = ("beta2", "lambda1", "b")


@dataclass(frozen=True)
class TwoBlockParams:
    """Free parameters of the family; all real, in [0, 1].

    beta1, alpha2 and a are determined by normalization from alpha1, beta2
    and b, which rules out inconsistent parameter sets.
    """

    p1: float = 0.5
    alpha1: float = 1.0 / math.sqrt(2.0)
    beta2: float = 0.5
    b: float = 1.0 / math.sqrt(2.0)
    lambda1: float = 0.5
    lambda2: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 < self.p1 < 1.0:
            raise ValidationError(f"p1 must lie in (0, 1), got {self.p1}")
        for name in ("alpha1", "beta2", "b", "lambda1", "lambda2"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0 or not math.isfinite(value):
                raise ValidationError(f"{name} must lie in [0, 1], got {value}")

    @property
    def p2(self) -> float:
        return 1.0 - self.p1

    @property
    def beta1(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.alpha1**2))

    @property
    def alpha2(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.beta2**2))

    @property
    def a(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.b**2))

    @property
    def gamma(self) -> float:
        return math.sqrt(self.lambda1) * self.b * self.beta2


DEFAULT_PARAMS = TwoBlockParams()


def _basis(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim)
    v[index] = 1.0
    return v


def two_block_state(params: TwoBlockParams) -> DensityMatrix:
    """Assemble the family state on dims (2, 4, 4) from its defining kets."""
    psi1_a = params.alpha1 * _basis(2, 0) + params.beta1 * _basis(2, 1)
    phi_b = params.a * _basis(4, 1) + params.b * _basis(4, 2)
    psi2_ab = params.alpha2 * np.kron(_basis(2, 0), _basis(4, 0)) + params.beta2 * np.kron(
        _basis(2, 1), phi_b
    )
    rho1_bc = params.lambda1 * np.outer(
        np.kron(_basis(4, 2), _basis(4, 2)), np.kron(_basis(4, 2), _basis(4, 2))
    ) + (1.0 - params.lambda1) * np.outer(
        np.kron(_basis(4, 3), _basis(4, 3)), np.kron(_basis(4, 3), _basis(4, 3))
    )
    rho2_c = np.diag([params.lambda2, 1.0 - params.lambda2, 0.0, 0.0])
    block1 = kron(np.outer(psi1_a, psi1_a), rho1_bc)
    block2 = kron(np.outer(psi2_ab, psi2_ab), rho2_c)
    data = params.p1 * block1 + params.p2 * block2
    return validate_density(data, (2, 4, 4))


def _plogp(x: float) -> float:
    return x * math.log2(x) if x > EIG_CLIP else 0.0


def gap_mu_values(params: TwoBlockParams) -> tuple[float, float, float, float]:
    """The four closed-form eigenvalues entering the gap formula.

    mu1/mu3 are the +/- quadratic roots mixing p1*lambda1 with p2, mu2/mu4
    the roots mixing p1*lambda1 with p2*beta2^2.
    """
    p1, p2 = params.p1, params.p2
    l1 = params.lambda1
    b1sq = params.beta1**2
    b2sq = params.beta2**2
    g2 = params.gamma**2
    s13 = p1 * l1 + p2
    d13 = math.sqrt((p1 * l1 - p2) ** 2 + 4.0 * p1 * p2 * b1sq * g2)
    s24 = p1 * l1 + p2 * b2sq
    d24 = math.sqrt((p1 * l1 - p2 * b2sq) ** 2 + 4.0 * p1 * p2 * g2)
    mu1 = 0.5 * (s13 + d13)
    mu3 = 0.5 * (s13 - d13)
    mu2 = 0.5 * (s24 + d24)
    mu4 = 0.5 * (s24 - d24)
    return mu1, mu2, mu3, mu4


def gap_closed_form(params: TwoBlockParams) -> float:
    """Closed-form saturation gap of the family, in bits.

    sum_j (-1)^j mu_j log2 mu_j - p2 b2^2 log2(p2 b2^2) + p2 log2 p2, with
    terms below the eigenvalue clip contributing zero.  Vanishes exactly
    when gamma = sqrt(lambda1) * b * beta2 does.
    """
    mu1, mu2, mu3, mu4 = gap_mu_values(params)
    p2 = params.p2
    b2sq = params.beta2**2
    total = -_plogp(mu1) + _plogp(mu2) - _plogp(mu3) + _plogp(mu4)
    total += -_plogp(p2 * b2sq) + _plogp(p2)
    return total


@dataclass(frozen=True)
class NamedState:
    """A fixture state annotated with its expected saturation gap."""

    name: str
    state: DensityMatrix
    expected_gap: float


def reference_states(params: TwoBlockParams = DEFAULT_PARAMS) -> list[NamedState]:
    """The family's two building blocks plus the gap-maximizing state.

    The A-factorized block and the AB-pure block both have zero gap; the
    maximally mixed qubit factorized from a random-ish BC state attains the
    upper bound 2*log2(d_A) = 2 bits.
    """
    psi1_a = params.alpha1 * _basis(2, 0) + params.beta1 * _basis(2, 1)
    phi_b = params.a * _basis(4, 1) + params.b * _basis(4, 2)
    psi2_ab = params.alpha2 * np.kron(_basis(2, 0), _basis(4, 0)) + params.beta2 * np.kron(
        _basis(2, 1), phi_b
    )
    rho1_bc = params.lambda1 * np.outer(
        np.kron(_basis(4, 2), _basis(4, 2)), np.kron(_basis(4, 2), _basis(4, 2))
    ) + (1.0 - params.lambda1) * np.outer(
        np.kron(_basis(4, 3), _basis(4, 3)), np.kron(_basis(4, 3), _basis(4, 3))
    )
    rho2_c = np.diag([params.lambda2, 1.0 - params.lambda2, 0.0, 0.0])
    block1 = validate_density(kron(np.outer(psi1_a, psi1_a), rho1_bc), (2, 4, 4))
    block2 = validate_density(
        kron(np.outer(psi2_ab, psi2_ab), rho2_c), (2, 4, 4)
    )
    maximizer = validate_density(kron(np.eye(2) / 2.0, rho1_bc), (2, 4, 4))
    return [
        NamedState("a_factorized_block", block1, 0.0),
        NamedState("ab_pure_block", block2, 0.0),
        NamedState("maximally_mixed_a", maximizer, 2.0),
    ]


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float = 0.0
    stop: float = 1.0
    steps: int = 64

    def __post_init__(self) -> None:
        if self.name not in SWEEPABLE:
            raise ConfigError(
                f"unknown sweep parameter {self.name!r}; choose from {SWEEPABLE}"
            )
        if self.steps < 2:
            raise ConfigError(f"sweep needs at least 2 steps, got {self.steps}")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class SweepGrid:
    """Closed-form and entropic gap values over a 2-parameter grid.

    Cells are indexed row-major: axis1 varies along rows (slow), axis2 along
    columns (fast).  Every cell carries both values; they agree to 1e-8.
    """

    axis1: SweepAxis
    axis2: SweepAxis
    fixed: TwoBlockParams
    closed_form: np.ndarray
    numeric: np.ndarray

    def rows(self) -> Iterable[tuple[float, float, float, float]]:
        v1 = self.axis1.values()
        v2 = self.axis2.values()
        for i, x1 in enumerate(v1):
            for j, x2 in enumerate(v2):
                yield float(x1), float(x2), float(self.closed_form[i, j]), float(
                    self.numeric[i, j]
                )

    def write_csv(self, stream: TextIO) -> None:
        stream.write("param1,param2,t_closed,t_numeric\n")
        for x1, x2, closed, numeric in self.rows():
            stream.write(f"{x1:.17g},{x2:.17g},{closed:.17g},{numeric:.17g}\n")


FIGURE_AXES = {
    "a": (("beta2", "lambda1"), TwoBlockParams(b=1.0 / math.sqrt(2.0))),
    "b": (("beta2", "b"), TwoBlockParams(lambda1=0.5)),
}


def sweep_gap(
    axis1: SweepAxis,
    axis2: SweepAxis,
    fixed: TwoBlockParams = DEFAULT_PARAMS,
) -> SweepGrid:
    """Evaluate closed-form and entropic gaps over a 2-parameter grid."""
    if axis1.name == axis2.name:
        raise ConfigError(f"sweep axes must differ, both are {axis1.name!r}")
    v1 = axis1.values()
    v2 = axis2.values()
    closed = np.zeros((axis1.steps, axis2.steps))
    numeric = np.zeros((axis1.steps, axis2.steps))
    for i, x1 in enumerate(v1):
        for j, x2 in enumerate(v2):
            params = replace(fixed, **{axis1.name: float(x1), axis2.name: float(x2)})
            closed[i, j] = gap_closed_form(params)
            numeric[i, j] = t_gap(two_block_state(params)).t_a
    return SweepGrid(axis1, axis2, fixed, closed, numeric)


def sweep_figure(figure: str, steps: int = 64) -> SweepGrid:
    """One of the two standard sweep planes: 'a' is beta2 x lambda1 at
    b = 1/sqrt(2), 'b' is beta2 x b at lambda1 = 1/2."""
    if figure not in FIGURE_AXES:
        raise ConfigError(f"unknown sweep figure {figure!r}; choose 'a' or 'b'")
    (name1, name2), fixed = FIGURE_AXES[figure]
    return sweep_gap(
        SweepAxis(name1, steps=steps), SweepAxis(name2, steps=steps), fixed
    )
