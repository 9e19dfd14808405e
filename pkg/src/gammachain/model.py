"""
Free-fermion solution of the periodic XY-Gamma chain

    H = J sum_j [ (1+gamma)/2 X_j X_{j+1} + (1-gamma)/2 Y_j Y_{j+1}
                  + Gamma (X_j Y_{j+1} + alpha Y_j X_{j+1}) + h Z_j ]

Gamma and h are measured in units of J, so every energy carries one factor of J.
The Fourier convention is c_j = N^{-1/2} sum_k exp(-ikj) c_k.
"""

import math
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy import integrate, optimize

from .errors import InvalidParameterError, NumericError

ANTIPERIODIC = "antiperiodic"
PERIODIC = "periodic"
AUTO = "auto"
SECTORS = (ANTIPERIODIC, PERIODIC, AUTO)

BOUNDARY_TOL = 1e-12
QUAD_EPSREL = 1e-10


@dataclass(frozen=True)
class ModelParams:
    """Chain couplings, system size and fermion boundary sector

    Any ring of one or more sites is accepted here: exact diagonalization and
    the coupling reduction handle odd rings. Free-fermion grids check for an
    even N >= 4 when they are built.
    """

    J: float = 1.0
    gamma: float = 0.6
    Gamma: float = 0.6
    alpha: float = 0.5
    h: float = 0.5
    N: int = 2000
    sector: str = ANTIPERIODIC

    def __post_init__(self):
        for name in ("J", "gamma", "Gamma", "alpha", "h"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be finite, got {value}")
        if self.J <= 0:
            raise InvalidParameterError(f"J must be positive, got {self.J}")
        if int(self.N) != self.N or self.N < 1:
            raise InvalidParameterError(f"N must be a positive integer, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        if self.sector not in SECTORS:
            raise InvalidParameterError(
                f"sector must be one of {SECTORS}, got {self.sector!r}"
            )

    def with_(self, **changes) -> 'ModelParams':
        """Copy with some fields replaced"""
        return replace(self, **changes)

    @property
    def pairing_strength(self) -> float:
        """gamma^2 + Gamma^2 (1+alpha)^2"""
        return self.gamma ** 2 + self.Gamma ** 2 * (1.0 + self.alpha) ** 2

    @property
    def chiral_term(self) -> float:
        """Gamma (1-alpha), the odd-in-k part of the spectrum"""
        return self.Gamma * (1.0 - self.alpha)

    @property
    def X(self) -> float:
        """4 alpha Gamma^2 + gamma^2; its sign separates CP-1 from CP-3"""
        return 4.0 * self.alpha * self.Gamma ** 2 + self.gamma ** 2

    def as_dict(self) -> Dict[str, object]:
        return {
            "J": self.J,
            "gamma": self.gamma,
            "Gamma": self.Gamma,
            "alpha": self.alpha,
            "h": self.h,
            "N": self.N,
            "sector": self.sector,
        }


def require_even_chain(N: int) -> None:
    """Free-fermion grids need an even chain of at least four sites"""
    if int(N) != N or N < 4 or N % 2:
        raise InvalidParameterError(f"N must be an even integer >= 4, got {N}")


@dataclass(frozen=True, eq=False)
class MomentumGrid:
    """Allowed momenta of one fermion boundary sector"""

    sector: str
    N: int
    n_values: np.ndarray
    k_values: np.ndarray

    def __len__(self) -> int:
        return len(self.k_values)

    def partner_index(self) -> np.ndarray:
        """Index of -k for every mode (k = 0, pi map to themselves)"""
        n_min = int(self.n_values[0])
        if self.sector == ANTIPERIODIC:
            return (-self.n_values - n_min) // 2
        half = self.N // 2
        partner = np.where(self.n_values == half, half, -self.n_values)
        return partner - n_min

    def unpaired_mask(self) -> np.ndarray:
        """Modes that are their own partner"""
        return self.partner_index() == np.arange(len(self))


def momentum_grid(N: int, sector: str = ANTIPERIODIC) -> MomentumGrid:
    """Antiperiodic: k = n pi/N with odd n; periodic: k = 2 n pi/N in (-pi, pi]"""
    require_even_chain(N)
    if sector == ANTIPERIODIC:
        n = np.arange(-(N - 1), N, 2)
        k = n * np.pi / N
    elif sector == PERIODIC:
        n = np.arange(-N // 2 + 1, N // 2 + 1)
        k = 2.0 * n * np.pi / N
    else:
        raise InvalidParameterError(
            f"momentum grid needs a concrete sector, got {sector!r}"
        )
    return MomentumGrid(sector=sector, N=N, n_values=n, k_values=k)


def dispersion(params: ModelParams, k):
    """Quasiparticle energy; negative values are filled in the ground state"""
    k_arr = np.asarray(k, dtype=float)
    s = np.sin(k_arr)
    root = np.sqrt(params.pairing_strength * s ** 2 + (np.cos(k_arr) - params.h) ** 2)
    eps = params.J * (2.0 * root - 2.0 * params.chiral_term * s)
    if np.ndim(eps) == 0:
        return float(eps)
    return eps


@dataclass(frozen=True)
class BdGBlock:
    """2x2 BdG entries of one momentum pair, in units of J"""

    k: float
    A_k: float
    B_k: complex


def bdg_block(params: ModelParams, k: float) -> BdGBlock:
    s = math.sin(k)
    A = math.cos(k) + params.Gamma * (params.alpha - 1.0) * s - params.h
    B = complex(params.Gamma * (params.alpha + 1.0), -params.gamma) * s
    return BdGBlock(k=float(k), A_k=A, B_k=B)


def _pairing(params: ModelParams, k: np.ndarray) -> np.ndarray:
    return (params.Gamma * (params.alpha + 1.0) - 1j * params.gamma) * np.sin(k)


@dataclass(eq=False)
class FermiSea:
    """Fock ground state of one sector, with optional parity projection"""

    grid: MomentumGrid
    energies: np.ndarray
    filled: np.ndarray
    weights: np.ndarray
    energy: float
    parity_odd: bool
    flipped: Optional[int] = None

    @property
    def sector(self) -> str:
        return self.grid.sector


def _unconstrained_sea(params: ModelParams, sector: str) -> FermiSea:
    grid = momentum_grid(params.N, sector)
    k = grid.k_values
    eps = dispersion(params, k)
    unpaired = grid.unpaired_mask()
    # unpaired modes carry the bare level 2J(cos k - h)
    filled = np.where(unpaired, np.cos(k) - params.h < 0.0, eps < 0.0)
    weights = np.full(len(k), -0.5)
    energy = float(np.sum(weights * np.abs(eps)))
    parity_odd = bool(np.count_nonzero(filled) % 2)
    return FermiSea(grid, eps, filled, weights, energy, parity_odd)


def _project_parity(sea: FermiSea) -> FermiSea:
    """Flip the cheapest mode when the sea has the wrong fermion parity"""
    wants_odd = sea.sector == PERIODIC
    if sea.parity_odd == wants_odd:
        return sea
    cost = np.abs(sea.energies)
    lowest = cost.min()
    ties = np.flatnonzero(cost <= lowest + 1e-14 * max(1.0, float(cost.max())))
    preferred = [i for i in ties if sea.filled[i]]
    m = int(preferred[0] if preferred else ties[0])
    filled = sea.filled.copy()
    filled[m] = not filled[m]
    weights = sea.weights.copy()
    weights[m] = 0.5
    energy = float(np.sum(weights * cost))
    return FermiSea(sea.grid, sea.energies, filled, weights, energy, wants_odd, m)


def fermi_sea(params: ModelParams, sector: Optional[str] = None) -> FermiSea:
    """Ground state in a fixed sector, or the parity-resolved one for 'auto'"""
    sector = sector or params.sector
    if sector != AUTO:
        return _unconstrained_sea(params, sector)
    antiperiodic = _project_parity(_unconstrained_sea(params, ANTIPERIODIC))
    periodic = _project_parity(_unconstrained_sea(params, PERIODIC))
    return periodic if periodic.energy < antiperiodic.energy else antiperiodic


@dataclass(eq=False)
class Spectrum:
    """Quasiparticle energies and Bogoliubov coefficients on one grid"""

    grid: MomentumGrid
    energies: np.ndarray
    u: np.ndarray
    v: np.ndarray
    phi: np.ndarray
    filled: np.ndarray

    def to_rows(self) -> List[Tuple[float, float, float, float, float, bool]]:
        return list(
            zip(
                self.grid.k_values.tolist(),
                self.energies.tolist(),
                self.u.tolist(),
                self.v.tolist(),
                self.phi.tolist(),
                self.filled.tolist(),
            )
        )


def spectrum(params: ModelParams, sector: Optional[str] = None) -> Spectrum:
    sea = fermi_sea(params, sector)
    k = sea.grid.k_values
    xi = np.cos(k) - params.h
    B = _pairing(params, k)
    omega = np.sqrt(xi ** 2 + np.abs(B) ** 2)
    safe = np.where(omega > 0.0, omega, 1.0)
    cos2theta = np.where(omega > 0.0, xi / safe, 0.0)
    u = np.sqrt(np.clip(0.5 * (1.0 + cos2theta), 0.0, 1.0))
    v = np.sqrt(np.clip(0.5 * (1.0 - cos2theta), 0.0, 1.0))
    unpaired = sea.grid.unpaired_mask()
    u = np.where(unpaired, np.where(sea.filled, 0.0, 1.0), u)
    v = np.where(unpaired, np.where(sea.filled, 1.0, 0.0), v)
    return Spectrum(sea.grid, sea.energies, u, v, np.angle(B), sea.filled.copy())


@dataclass(frozen=True)
class GapResult:
    signed_min: float
    gap: float
    k_min: float


def _special_momenta(params: ModelParams) -> List[float]:
    points = [0.0, np.pi]
    if abs(params.h) <= 1.0:
        points += [math.acos(params.h), -math.acos(params.h)]
    fp = fermion_points(params)
    if fp is not None:
        points += list(fp)
    return points


def excitation_gap(params: ModelParams, grid_points: int = 2048) -> GapResult:
    """Continuum minimum of the dispersion, refined past the sampling grid"""
    k = np.linspace(-np.pi, np.pi, grid_points, endpoint=False)
    k = np.concatenate([k, _special_momenta(params)])
    eps = dispersion(params, k)
    i = int(np.argmin(eps))
    width = 2.0 * np.pi / grid_points
    res = optimize.minimize_scalar(
        lambda q: dispersion(params, q),
        bounds=(k[i] - width, k[i] + width),
        method="bounded",
        options={"xatol": 1e-12},
    )
    if res.success and res.fun < eps[i]:
        k_min, signed_min = float(res.x), float(res.fun)
    else:
        k_min, signed_min = float(k[i]), float(eps[i])
    # eps(k) + eps(-k) >= 0, so a negative minimum implies a zero crossing
    gap = 0.0 if signed_min < 0.0 else signed_min
    return GapResult(signed_min=signed_min, gap=gap, k_min=k_min)


class PhaseLabel(Enum):
    AFM_I = "AFM_I"
    PM_II = "PM_II"
    SPIRAL_III = "Spiral_III"
    BOUNDARY_CP1 = "CP1"
    BOUNDARY_CP2 = "CP2"
    BOUNDARY_CP3 = "CP3"

    @property
    def is_boundary(self) -> bool:
        return self.name.startswith("BOUNDARY")


def _near(value: float, target: float) -> bool:
    return abs(value - target) <= BOUNDARY_TOL * max(1.0, abs(target))


def classify_phase(params: ModelParams) -> PhaseLabel:
    h, alpha = params.h, params.alpha
    g2, G2 = params.gamma ** 2, params.Gamma ** 2
    if G2 == 0.0:
        # alpha lines do not exist; only the h = 1 Ising line remains
        if _near(h, 1.0):
            return PhaseLabel.BOUNDARY_CP1
        return PhaseLabel.AFM_I if h < 1.0 else PhaseLabel.PM_II

    alpha_c1 = -g2 / (4.0 * G2)
    alpha_c2 = (1.0 - h * h - g2) / (4.0 * G2)
    if _near(h, 1.0) and alpha >= alpha_c1 - BOUNDARY_TOL:
        return PhaseLabel.BOUNDARY_CP1
    if _near(alpha, alpha_c1) and h <= 1.0:
        return PhaseLabel.BOUNDARY_CP2
    if _near(alpha, alpha_c2) and h >= 1.0:
        return PhaseLabel.BOUNDARY_CP3
    if h < 1.0 and alpha > alpha_c1:
        return PhaseLabel.AFM_I
    if h > 1.0 and alpha > alpha_c2:
        return PhaseLabel.PM_II
    return PhaseLabel.SPIRAL_III


@dataclass(frozen=True)
class CriticalSet:
    h_c1: float
    alpha_c1: Optional[float]
    h_c2: Optional[float]
    alpha_c2: Optional[float]
    k_c: Dict[str, float] = field(default_factory=dict)


def critical_set(params: ModelParams) -> CriticalSet:
    """Critical lines through the (gamma, Gamma, alpha) slice; h only fixes k_c"""
    g2, G2 = params.gamma ** 2, params.Gamma ** 2
    side = 1.0 if params.chiral_term >= 0.0 else -1.0
    k_c: Dict[str, float] = {}
    if G2 == 0.0:
        k_c["CP1"] = 0.0
        return CriticalSet(h_c1=1.0, alpha_c1=None, h_c2=None, alpha_c2=None, k_c=k_c)

    alpha_c1 = -g2 / (4.0 * G2)
    radicand = 1.0 - g2 - 4.0 * G2 * params.alpha
    h_c2 = math.sqrt(radicand) if radicand >= 0.0 else None
    alpha_c2 = None
    if params.h >= 1.0:
        alpha_c2 = (1.0 - params.h ** 2 - g2) / (4.0 * G2)

    if params.X > 0.0:
        k_c["CP1"] = 0.0
    if abs(params.h) <= 1.0:
        k_c["CP2"] = side * math.acos(params.h)
    if h_c2 is not None and h_c2 >= 1.0:
        k_c["CP3"] = side * math.acos(1.0 / h_c2)
    return CriticalSet(h_c1=1.0, alpha_c1=alpha_c1, h_c2=h_c2, alpha_c2=alpha_c2, k_c=k_c)


def fermion_points(params: ModelParams) -> Optional[Tuple[float, float]]:
    """Zeros (k_L, k_R) of the dispersion inside the spiral phase"""
    label = classify_phase(params)
    if label not in (
        PhaseLabel.SPIRAL_III,
        PhaseLabel.BOUNDARY_CP2,
        PhaseLabel.BOUNDARY_CP3,
    ):
        return None
    X, h = params.X, params.h
    if X == 1.0:
        return None
    disc = (h * h - 1.0) * X + X * X
    if disc < -1e-14:
        return None
    root = math.sqrt(max(disc, 0.0))
    cosines = [(h + root) / (1.0 - X), (h - root) / (1.0 - X)]
    if any(abs(c) > 1.0 + 1e-12 for c in cosines):
        return None
    side = 1.0 if params.chiral_term >= 0.0 else -1.0
    ks = sorted(side * math.acos(min(1.0, max(-1.0, c))) for c in cosines)
    return ks[0], ks[1]


def _kinks(params: ModelParams) -> List[float]:
    points = set()
    for q in _special_momenta(params):
        if -np.pi < q < np.pi:
            points.add(round(float(q), 15))
    return sorted(points)


def thermodynamic_integral(
    params: ModelParams, integrand: Callable[[float], float]
) -> float:
    """(1/2pi) times the integral over the Brillouin zone, split at kinks"""
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, abserr = integrate.quad(
                integrand,
                -np.pi,
                np.pi,
                points=_kinks(params) or None,
                epsabs=1e-13,
                epsrel=QUAD_EPSREL,
                limit=500,
            )
        except integrate.IntegrationWarning as exc:
            raise NumericError(
                f"Brillouin-zone quadrature did not converge at {params.as_dict()}: {exc}"
            ) from exc
    return value / (2.0 * np.pi)


def ground_state_energy(params: ModelParams) -> float:
    """Total finite-N ground energy in the configured sector"""
    return fermi_sea(params).energy


def ground_state_energy_density(params: ModelParams, mode: str = "finite_N") -> float:
    if mode == "finite_N":
        return ground_state_energy(params) / params.N
    if mode == "thermodynamic":
        return -0.5 * thermodynamic_integral(params, lambda q: abs(dispersion(params, q)))
    raise InvalidParameterError(f"Unknown energy mode {mode!r}")


def energy_second_derivative(
    params: ModelParams,
    wrt: str = "h",
    step: float = 1e-3,
    mode: str = "finite_N",
    richardson: bool = False,
) -> float:
    """Central second difference of e0 in h or alpha"""
    if wrt not in ("h", "alpha"):
        raise InvalidParameterError(f"Can only differentiate in h or alpha, not {wrt!r}")
    if step <= 0.0:
        raise InvalidParameterError(f"step must be positive, got {step}")
    if step < 1e-8:
        warnings.warn(
            f"Second-difference step {step:g} is ill-conditioned for e0", RuntimeWarning
        )
    x0 = getattr(params, wrt)

    def stencil(s: float) -> float:
        e = [
            ground_state_energy_density(params.with_(**{wrt: x0 + d}), mode)
            for d in (-s, 0.0, s)
        ]
        return (e[0] - 2.0 * e[1] + e[2]) / (s * s)

    if richardson:
        return (4.0 * stencil(step / 2.0) - stencil(step)) / 3.0
    return stencil(step)


def _curvature_terms(params: ModelParams, k) -> np.ndarray:
    """d^2 eps_k / dh^2 = 2 J Q sin^2 k / R^3"""
    s2 = np.sin(k) ** 2
    R = np.sqrt(params.pairing_strength * s2 + (np.cos(k) - params.h) ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        term = np.where(s2 > 0.0, 2.0 * params.J * params.pairing_strength * s2 / R ** 3, 0.0)
    return term


def energy_curvature_h(params: ModelParams, mode: str = "finite_N") -> float:
    """-d^2 e0/dh^2 in closed form"""
    if mode == "finite_N":
        sea = fermi_sea(params)
        k = sea.grid.k_values
        signs = np.sign(sea.energies)
        return float(-np.sum(sea.weights * signs * _curvature_terms(params, k)) / params.N)
    if mode == "thermodynamic":

        def integrand(q: float) -> float:
            return float(np.sign(dispersion(params, q)) * _curvature_terms(params, q))

        return 0.5 * thermodynamic_integral(params, integrand)
    raise InvalidParameterError(f"Unknown energy mode {mode!r}")


def hyperscaling_specific_heat_exponent(nu: float, z: float) -> float:
    """alpha_s from nu + nu z = 2 - alpha_s"""
    return 2.0 - nu - nu * z


def kibble_zurek_exponent(nu: float, z: float) -> float:
    """Defect-density exponent nu / (1 + nu z) for a slow linear quench"""
    return nu / (1.0 + nu * z)


def sweep_values(start: float, stop: float, count: int) -> np.ndarray:
    if count < 3:
        raise InvalidParameterError(f"Sweeps need at least 3 points, got {count}")
    if not stop > start:
        raise InvalidParameterError(f"Sweep range must be increasing: {start}:{stop}")
    return np.linspace(start, stop, count)


def batch_params(base: ModelParams, name: str, values: Iterable[float]) -> List[ModelParams]:
    return [base.with_(**{name: float(v)}) for v in values]
