"""
Exact diagonalization of small periodic chains

Used as ground truth for the free-fermion routines. Site 0 is the most
significant tensor factor and |0> is spin up.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import ArpackError, eigsh

from .coherence import (
    PAULI,
    reduced_density_matrix,
    steered_coherence_from_matrix,
    steered_quantum_coherence,
)
from .config import Config
from .correlations import COMPONENTS, contractions, dimer_correlation, magnetization_z, two_point
from .errors import DegeneracyError, InvalidParameterError, NumericError
from .model import AUTO, ModelParams, ground_state_energy

MIN_SITES = 3
RESIDUAL_TOL = 1e-9
ORACLE_GAP_MIN = 1e-6


@dataclass(eq=False)
class SpinHamiltonian:
    N: int
    matrix: sparse.csr_matrix

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        diff = self.matrix - self.matrix.conj().T
        return diff.nnz == 0 or float(np.max(np.abs(diff.data))) <= tol


@dataclass(eq=False)
class GroundState:
    N: int
    energy: float
    vector: np.ndarray
    gap: float
    degenerate: bool
    residual: float

    def require_unique(self) -> 'GroundState':
        if self.degenerate:
            raise DegeneracyError(
                f"ground state is degenerate (gap {self.gap:.3e}); pick a symmetry sector"
            )
        return self


def _site_operator(op: np.ndarray, site: int, N: int) -> sparse.csr_matrix:
    left = sparse.identity(2 ** site, format="csr")
    right = sparse.identity(2 ** (N - site - 1), format="csr")
    return sparse.kron(sparse.kron(left, sparse.csr_matrix(op)), right, format="csr")


def _bond_operator(a: str, b: str, i: int, j: int, N: int) -> sparse.csr_matrix:
    return _site_operator(PAULI[a], i, N) @ _site_operator(PAULI[b], j, N)


def build_hamiltonian(params: ModelParams, config: Optional[Config] = None) -> SpinHamiltonian:
    """Periodic spin Hamiltonian with site N identified with site 0"""
    config = config or Config()
    N = params.N
    if not MIN_SITES <= N <= config.ED_MAX_SITES:
        raise InvalidParameterError(
            f"exact diagonalization needs {MIN_SITES} <= N <= {config.ED_MAX_SITES}, got {N}"
        )
    bond = {
        ("x", "x"): 0.5 * (1.0 + params.gamma),
        ("y", "y"): 0.5 * (1.0 - params.gamma),
        ("x", "y"): params.Gamma,
        ("y", "x"): params.Gamma * params.alpha,
    }
    H = sparse.csr_matrix((2 ** N, 2 ** N), dtype=complex)
    for j in range(N):
        nxt = (j + 1) % N
        for (a, b), coefficient in bond.items():
            if coefficient != 0.0:
                H = H + coefficient * _bond_operator(a, b, j, nxt, N)
        if params.h != 0.0:
            H = H + params.h * _site_operator(PAULI["z"], j, N)
    return SpinHamiltonian(N=N, matrix=(params.J * H).tocsr())


def _fix_phase(vector: np.ndarray) -> np.ndarray:
    """Make the first non-negligible amplitude real and positive"""
    index = int(np.flatnonzero(np.abs(vector) > 1e-12)[0])
    return vector * (abs(vector[index]) / vector[index])


def ground_state(H: SpinHamiltonian, config: Optional[Config] = None) -> GroundState:
    config = config or Config()
    dim = H.dimension
    try:
        if H.N <= config.ED_DENSE_MAX_SITES or dim <= 4:
            values, vectors = linalg.eigh(H.matrix.toarray(), subset_by_index=[0, min(1, dim - 1)])
        else:
            values, vectors = eigsh(H.matrix, k=2, which="SA", tol=0)
            order = np.argsort(values)
            values, vectors = values[order], vectors[:, order]
    except (linalg.LinAlgError, ArpackError) as exc:
        raise NumericError(f"eigensolver failed for N={H.N}: {exc}") from exc

    energy = float(values[0])
    vector = _fix_phase(vectors[:, 0] / np.linalg.norm(vectors[:, 0]))
    gap = float(values[1] - values[0]) if len(values) > 1 else np.inf
    residual = float(np.linalg.norm(H.matrix @ vector - energy * vector))
    if residual > RESIDUAL_TOL:
        raise NumericError(f"ground-state residual {residual:.3e} exceeds {RESIDUAL_TOL}")
    return GroundState(
        N=H.N,
        energy=energy,
        vector=vector,
        gap=gap,
        degenerate=gap < config.DEGENERACY_TOL,
        residual=residual,
    )


def solve(params: ModelParams, config: Optional[Config] = None) -> GroundState:
    return ground_state(build_hamiltonian(params, config), config)


def _check_sites(gs: GroundState, i: int, j: int) -> None:
    for site in (i, j):
        if not 0 <= site < gs.N:
            raise InvalidParameterError(f"site {site} outside [0, {gs.N})")
    if i == j:
        raise InvalidParameterError("two distinct sites are required")


def ed_rdm(gs: GroundState, i: int, j: int) -> np.ndarray:
    """Reduced density matrix of sites i and j, basis |s_i s_j>"""
    _check_sites(gs, i, j)
    gs.require_unique()
    psi = gs.vector.reshape((2,) * gs.N)
    psi = np.moveaxis(psi, (i, j), (0, 1)).reshape(4, -1)
    return psi @ psi.conj().T


def _site_expectation(rho: np.ndarray, a: str, first: bool) -> complex:
    op = np.kron(PAULI[a], np.eye(2)) if first else np.kron(np.eye(2), PAULI[a])
    return np.trace(rho @ op)


def ed_correlator(
    gs: GroundState, a: str, b: str, i: int, j: int, connected: bool = False
) -> float:
    """<sigma^a_i sigma^b_j>, optionally minus the product of site averages"""
    if a + b not in COMPONENTS:
        raise InvalidParameterError(f"Unsupported component pair {a + b!r}")
    rho = ed_rdm(gs, i, j)
    value = np.trace(rho @ np.kron(PAULI[a], PAULI[b]))
    if connected:
        value -= _site_expectation(rho, a, True) * _site_expectation(rho, b, False)
    return float(value.real)


def ed_magnetization(gs: GroundState, site: int = 0) -> float:
    gs.require_unique()
    psi = np.moveaxis(gs.vector.reshape((2,) * gs.N), site, 0).reshape(2, -1)
    weights = np.sum(np.abs(psi) ** 2, axis=1)
    return float(weights[0] - weights[1])


def ed_sqc(gs: GroundState, i: int, j: int) -> float:
    return steered_coherence_from_matrix(ed_rdm(gs, i, j))


def _kappa(site: int, N: int) -> sparse.csr_matrix:
    nxt = (site + 1) % N
    return _bond_operator("x", "y", site, nxt, N) - _bond_operator("y", "x", site, nxt, N)


def ed_dimer(gs: GroundState, i: int, r: int) -> float:
    """Connected vector-chirality correlator between bonds i and i+r"""
    gs.require_unique()
    if not 1 <= r < gs.N:
        raise InvalidParameterError(f"r must lie in [1, {gs.N - 1}], got {r}")
    psi = gs.vector
    k_i = _kappa(i, gs.N) @ psi
    k_j = _kappa((i + r) % gs.N, gs.N) @ psi
    pair = np.vdot(psi, _kappa(i, gs.N) @ k_j)
    return float(pair.real - np.vdot(psi, k_i).real * np.vdot(psi, k_j).real)


@dataclass
class OracleReport:
    """Largest free-fermion vs exact deviations over a set of draws"""

    rows: List[Dict[str, float]] = field(default_factory=list)
    skipped: int = 0

    @property
    def max_deviation(self) -> float:
        if not self.rows:
            return 0.0
        return max(row["max_abs_diff"] for row in self.rows)

    def passed(self, tol: float = 1e-8) -> bool:
        return bool(self.rows) and self.max_deviation < tol


def compare(params: ModelParams, r_values: Sequence[int] = (1, 2, 3), config: Optional[Config] = None) -> Optional[Dict[str, float]]:
    """Deviations for one draw, or None when the exact ground state is (nearly) degenerate"""
    params = params.with_(sector=AUTO)
    gs = solve(params, config)
    if gs.gap <= ORACLE_GAP_MIN:
        return None
    cs = contractions(params, max(r_values) + 1)
    diffs = {"energy": abs(ground_state_energy(params) - gs.energy)}
    diffs["magnetization"] = abs(magnetization_z(params, cs) - ed_magnetization(gs))
    for r in r_values:
        for label in COMPONENTS:
            ff = two_point(params, label[0], label[1], r, cs).value
            ed = ed_correlator(gs, label[0], label[1], 0, r, connected=True)
            diffs[f"G{label}_{r}"] = abs(ff - ed)
        rho = reduced_density_matrix(params, r, cs)
        diffs[f"sqc_{r}"] = abs(steered_quantum_coherence(rho) - ed_sqc(gs, 0, r))
        diffs[f"dimer_{r}"] = abs(dimer_correlation(params, r, "full", cs) - ed_dimer(gs, 0, r))
    row = {name: getattr(params, name) for name in ("gamma", "Gamma", "alpha", "h")}
    row.update(N=params.N, ed_gap=gs.gap, max_abs_diff=max(diffs.values()))
    row.update(diffs)
    return row


def oracle_report(
    params_list: Iterable[ModelParams],
    r_values: Sequence[int] = (1, 2, 3),
    config: Optional[Config] = None,
) -> OracleReport:
    report = OracleReport()
    for params in params_list:
        row = compare(params, r_values, config)
        if row is None:
            report.skipped += 1
        else:
            report.rows.append(row)
    return report


def random_draws(N: int, draws: int, seed: int = 0) -> List[ModelParams]:
    """Parameter draws for the oracle comparison, reproducible through seed"""
    rng = np.random.default_rng(seed)
    return [
        ModelParams(
            gamma=float(rng.uniform(-1.0, 1.0)),
            Gamma=float(rng.uniform(-1.0, 1.0)),
            alpha=float(rng.uniform(-1.0, 1.0)),
            h=float(rng.uniform(0.0, 2.0)),
            N=N,
            sector=AUTO,
        )
        for _ in range(draws)
    ]
