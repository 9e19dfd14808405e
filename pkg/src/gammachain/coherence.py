"""
Two-site reduced states, relative-entropy coherence and steered coherence

Basis order is |00>, |01>, |10>, |11> with 0 the spin-up (sigma^z = +1) state.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy.stats import entropy

from .correlations import ContractionSet, _sigma_z, contractions, raw_two_point
from .errors import InvalidParameterError, StateValidationError
from .model import ModelParams

BASES = ("x", "y", "z")
POSITIVITY_TOL = 1e-9
EIGEN_TOL = 1e-10
BRANCH_TOL = 1e-14

PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


@dataclass(frozen=True)
class XState:
    """Two-qubit X-shaped density matrix of sites i and i+r"""

    u_plus: float
    u_minus: float
    omega_plus: float
    omega_minus: float
    z1: complex
    z2: complex

    @classmethod
    def from_correlators(
        cls, xx: float, yy: float, zz: float, xy: float, yx: float, sz: float
    ) -> 'XState':
        """Build from raw correlators <s^a_i s^b_j> and the site magnetization"""
        return cls(
            u_plus=0.25 * (1.0 + 2.0 * sz + zz),
            u_minus=0.25 * (1.0 - 2.0 * sz + zz),
            omega_plus=0.25 * (1.0 - zz),
            omega_minus=0.25 * (1.0 - zz),
            z1=0.25 * (xx - yy - 1j * xy - 1j * yx),
            z2=0.25 * (xx + yy + 1j * xy - 1j * yx),
        )

    def to_matrix(self) -> np.ndarray:
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = self.u_plus
        rho[1, 1] = self.omega_plus
        rho[2, 2] = self.omega_minus
        rho[3, 3] = self.u_minus
        rho[0, 3] = self.z1
        rho[3, 0] = np.conj(self.z1)
        rho[1, 2] = self.z2
        rho[2, 1] = np.conj(self.z2)
        return rho

    @property
    def trace(self) -> float:
        return self.u_plus + self.u_minus + self.omega_plus + self.omega_minus

    def validate(self) -> 'XState':
        """Raise StateValidationError unless the state is a density matrix"""
        if abs(self.trace - 1.0) > POSITIVITY_TOL:
            raise StateValidationError(f"X-state trace is {self.trace}, expected 1")
        for name in ("u_plus", "u_minus", "omega_plus", "omega_minus"):
            if getattr(self, name) < -POSITIVITY_TOL:
                raise StateValidationError(f"{name} = {getattr(self, name)} is negative")
        if abs(self.z1) ** 2 - self.u_plus * self.u_minus > POSITIVITY_TOL:
            raise StateValidationError("u+ u- >= |z1|^2 violated")
        if abs(self.z2) ** 2 - self.omega_plus * self.omega_minus > POSITIVITY_TOL:
            raise StateValidationError("w+ w- >= |z2|^2 violated")
        return self


@dataclass(frozen=True)
class SteeringBranch:
    probability: float
    state: Optional[np.ndarray]

    @property
    def degenerate(self) -> bool:
        return self.state is None


@dataclass(frozen=True)
class SteeringEnsemble:
    """Bob's conditional states after Alice measures sigma^mu"""

    mu: str
    branches: Tuple[SteeringBranch, SteeringBranch]

    @property
    def probabilities(self) -> Tuple[float, float]:
        return self.branches[0].probability, self.branches[1].probability


def _check_basis(basis: str) -> None:
    if basis not in BASES:
        raise InvalidParameterError(f"basis must be one of {BASES}, got {basis!r}")


def _spectrum(rho: np.ndarray) -> np.ndarray:
    values = np.linalg.eigvalsh(rho)
    if values.min() < -EIGEN_TOL:
        raise StateValidationError(f"density matrix has eigenvalue {values.min():.3e}")
    return np.clip(values, 0.0, None)


def relative_entropy_coherence(rho, basis: str = "z") -> float:
    """S(dephased rho) - S(rho) for a qubit, dephased in the sigma^basis eigenbasis"""
    _check_basis(basis)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise InvalidParameterError(f"expected a 2x2 density matrix, got {rho.shape}")
    _, vectors = np.linalg.eigh(PAULI[basis])
    populations = np.clip(np.real(np.diag(vectors.conj().T @ rho @ vectors)), 0.0, None)
    value = entropy(populations, base=2) - entropy(_spectrum(rho), base=2)
    return float(max(value, 0.0))


def _as_matrix(rho: Union[XState, np.ndarray]) -> np.ndarray:
    if isinstance(rho, XState):
        return rho.to_matrix()
    matrix = np.asarray(rho, dtype=complex)
    if matrix.shape != (4, 4):
        raise InvalidParameterError(f"expected a 4x4 density matrix, got {matrix.shape}")
    return matrix


def steering_ensemble(rho: Union[XState, np.ndarray], mu: str) -> SteeringEnsemble:
    """Projective measurement (I + (-1)^a sigma^mu)/2 on the first qubit"""
    _check_basis(mu)
    tensor = _as_matrix(rho).reshape(2, 2, 2, 2)
    branches = []
    for a in (0, 1):
        projector = 0.5 * (np.eye(2) + (-1) ** a * PAULI[mu])
        unnormalized = np.einsum("xa,abxc->bc", projector, tensor)
        p = float(np.real(np.trace(unnormalized)))
        state = unnormalized / p if p > BRANCH_TOL else None
        branches.append(SteeringBranch(probability=max(p, 0.0), state=state))
    return SteeringEnsemble(mu=mu, branches=(branches[0], branches[1]))


def steered_coherence_from_matrix(rho4) -> float:
    """Average coherence of the second qubit in the two bases unbiased to Alice's"""
    total = 0.0
    for mu in BASES:
        ensemble = steering_ensemble(rho4, mu)
        for branch in ensemble.branches:
            if branch.degenerate:
                continue
            for nu in BASES:
                if nu != mu:
                    total += branch.probability * relative_entropy_coherence(branch.state, nu)
    return 0.5 * total


def steered_quantum_coherence(rho: XState) -> float:
    return steered_coherence_from_matrix(rho.validate().to_matrix())


def reduced_density_matrix(
    params: ModelParams, r: int, cs: Optional[ContractionSet] = None
) -> XState:
    """X-state of sites 0 and r from free-fermion correlators"""
    cs = cs or contractions(params, r)
    raw: Dict[str, float] = {
        label: raw_two_point(cs, label, r) for label in ("xx", "yy", "zz", "xy", "yx")
    }
    return XState.from_correlators(sz=_sigma_z(cs), **raw).validate()


def sqc(params: ModelParams, r: int) -> float:
    return steered_quantum_coherence(reduced_density_matrix(params, r))


def coherence_susceptibility(params: ModelParams, r: int, step: float = 1e-3) -> float:
    """Central difference of the steered coherence in h"""
    if step <= 0:
        raise InvalidParameterError(f"step must be positive, got {step}")
    upper = sqc(params.with_(h=params.h + step), r)
    lower = sqc(params.with_(h=params.h - step), r)
    return (upper - lower) / (2.0 * step)
