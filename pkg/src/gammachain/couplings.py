"""
Cavity-mediated spin couplings from atom-light parameters

Photons are adiabatically eliminated at their steady state. The operator
valued detuning shift is closed with mean occupations of the two atomic
levels, and light shifts from the bosonic modes are dropped from h^z.
"""

import json
import os
import warnings
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .errors import InvalidParameterError, NearResonanceError, NotReducibleError
from .model import ModelParams

RESONANCE_TOL = 1e-9
DEFAULT_RATIO_THRESHOLD = 10.0
NN_THRESHOLD = 0.01
UNIFORM_TOL = 1e-9


def _complex(value) -> complex:
    """[re, im] pair or plain number"""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise InvalidParameterError(f"complex amplitude needs [re, im], got {value}")
        return complex(float(value[0]), float(value[1]))
    return complex(value)


@dataclass(eq=False)
class CavityMode:
    detuning: float
    kappa: float
    coupling: np.ndarray

    def __post_init__(self):
        self.coupling = np.asarray(self.coupling, dtype=complex)


@dataclass(eq=False)
class AtomLightParams:
    """Detunings, per-site Rabi amplitudes and the cavity modes"""

    omega1: np.ndarray
    omega2: np.ndarray
    delta1: float
    delta2: float
    delta: float = 0.0
    modes: List[CavityMode] = field(default_factory=list)
    occupation_s: float = 0.5
    occupation_g: float = 0.5
    ratio_threshold: float = DEFAULT_RATIO_THRESHOLD

    def __post_init__(self):
        self.omega1 = np.asarray(self.omega1, dtype=complex)
        self.omega2 = np.asarray(self.omega2, dtype=complex)
        n = len(self.omega1)
        if n < 2 or len(self.omega2) != n:
            raise InvalidParameterError("omega1 and omega2 need one entry per site, at least two sites")
        if not self.modes:
            raise InvalidParameterError("at least one cavity mode is required")
        for index, mode in enumerate(self.modes):
            if mode.coupling.shape != (n,):
                raise InvalidParameterError(
                    f"mode {index} has {mode.coupling.size} couplings for {n} sites"
                )
        if self.delta1 == 0.0 or self.delta2 == 0.0:
            raise InvalidParameterError("atomic detunings must be nonzero")
        self._check_far_detuned()

    @property
    def n_sites(self) -> int:
        return len(self.omega1)

    def _check_far_detuned(self) -> None:
        scale = max(
            float(np.max(np.abs(self.omega1))),
            float(np.max(np.abs(self.omega2))),
            max(float(np.max(np.abs(m.coupling))) for m in self.modes),
        )
        limit = self.ratio_threshold * scale
        for name in ("delta1", "delta2"):
            if abs(getattr(self, name)) < limit:
                raise InvalidParameterError(
                    f"|{name}| = {abs(getattr(self, name)):g} is not far detuned "
                    f"(needs >= {self.ratio_threshold:g} x {scale:g})"
                )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'AtomLightParams':
        try:
            sites = data["sites"]
            modes = [
                CavityMode(
                    detuning=float(m["detuning"]),
                    kappa=float(m.get("kappa", 0.0)),
                    coupling=[_complex(g) for g in m["coupling"]],
                )
                for m in data["modes"]
            ]
            return cls(
                omega1=[_complex(s["omega1"]) for s in sites],
                omega2=[_complex(s["omega2"]) for s in sites],
                delta1=float(data["delta1"]),
                delta2=float(data["delta2"]),
                delta=float(data.get("delta", 0.0)),
                modes=modes,
                occupation_s=float(data.get("occupation_s", 0.5)),
                occupation_g=float(data.get("occupation_g", 0.5)),
                ratio_threshold=float(data.get("ratio_threshold", DEFAULT_RATIO_THRESHOLD)),
            )
        except KeyError as exc:
            raise InvalidParameterError(f"atom-light input is missing {exc}") from exc

    @classmethod
    def from_json(cls, path: str) -> 'AtomLightParams':
        if not os.path.exists(path):
            raise InvalidParameterError(f"Couplings input not found: {path}")
        with open(path, 'r', encoding='utf-8') as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as exc:
                raise InvalidParameterError(f"{path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


@dataclass(eq=False)
class SpinCouplings:
    """Ordered-pair coupling matrices; the diagonal is unused"""

    Jx: np.ndarray
    Jy: np.ndarray
    JDM: np.ndarray
    JSO: np.ndarray
    hz: np.ndarray

    @property
    def n_sites(self) -> int:
        return len(self.hz)

    def to_rows(self) -> List[Tuple[int, int, float, float, float, float]]:
        n = self.n_sites
        return [
            (i, j, self.Jx[i, j], self.Jy[i, j], self.JDM[i, j], self.JSO[i, j])
            for i in range(n)
            for j in range(n)
            if i != j
        ]


def tilde_detuning(p: AtomLightParams, mode: int) -> complex:
    """Delta_k + i kappa minus the occupation-weighted dispersive shift"""
    m = p.modes[mode]
    shift = float(np.sum(np.abs(m.coupling) ** 2)) * (
        p.occupation_s / p.delta1 + p.occupation_g / p.delta2
    )
    value = complex(m.detuning - shift, m.kappa)
    if abs(value) < RESONANCE_TOL * abs(m.detuning):
        raise NearResonanceError(f"mode {mode} is resonant: |tilde Delta| = {abs(value):.3e}")
    return value


def kernel_matrices(p: AtomLightParams) -> Tuple[np.ndarray, np.ndarray]:
    """Lambda_0 and Lambda_1 for every ordered site pair"""
    n = p.n_sites
    eta11 = np.zeros((n, n), dtype=complex)
    eta12 = np.zeros((n, n), dtype=complex)
    eta21 = np.zeros((n, n), dtype=complex)
    eta22 = np.zeros((n, n), dtype=complex)
    d1, d2 = p.delta1, p.delta2
    for index, mode in enumerate(p.modes):
        dt = tilde_detuning(p, index)
        G = mode.coupling
        left1 = np.conj(p.omega1) * G
        left2 = p.omega2 * np.conj(G)
        eta11 += np.outer(left1, p.omega1 * np.conj(G)) / (d1 * d1 * dt)
        eta12 += np.outer(left1, p.omega2 * np.conj(G)) / (d1 * d2 * dt)
        eta21 += np.outer(left2, np.conj(p.omega1) * G) / (d1 * d2 * np.conj(dt))
        eta22 += np.outer(left2, np.conj(p.omega2) * G) / (d2 * d2 * np.conj(dt))
    return eta11 + eta22, eta12 + eta21


def lambda_kernels(p: AtomLightParams, i: int, j: int) -> Tuple[complex, complex]:
    if not (0 <= i < p.n_sites and 0 <= j < p.n_sites):
        raise InvalidParameterError(f"site pair ({i}, {j}) outside [0, {p.n_sites})")
    lam0, lam1 = kernel_matrices(p)
    return complex(lam0[i, j]), complex(lam1[i, j])


def spin_couplings(p: AtomLightParams) -> SpinCouplings:
    lam0, lam1 = kernel_matrices(p)
    off = ~np.eye(p.n_sites, dtype=bool)
    hz = p.delta / 2.0 + np.abs(p.omega1) ** 2 / p.delta1 - np.abs(p.omega2) ** 2 / p.delta2
    return SpinCouplings(
        Jx=np.where(off, 2.0 * (lam0.real + lam1.real), 0.0),
        Jy=np.where(off, 2.0 * (lam0.real - lam1.real), 0.0),
        JDM=np.where(off, 2.0 * lam0.imag, 0.0),
        JSO=np.where(off, -2.0 * lam1.imag, 0.0),
        hz=np.asarray(hz, dtype=float),
    )


def dissipative_residual(p: AtomLightParams) -> float:
    """max |Lambda_0(i, j) - Lambda_0(j, i)^*|, zero for a Hermitian exchange"""
    lam0, _ = kernel_matrices(p)
    return float(np.max(np.abs(lam0 - lam0.conj().T)))


def _bond_sums(c: SpinCouplings) -> Dict[str, np.ndarray]:
    """Coefficients of X X, Y Y, X Y, Y X on every ring bond (j, j+1)"""
    n = c.n_sites
    j = np.arange(n)
    k = (j + 1) % n
    Jx = c.Jx[j, k] + c.Jx[k, j]
    Jy = c.Jy[j, k] + c.Jy[k, j]
    dm = c.JDM[j, k] - c.JDM[k, j]
    so = c.JSO[j, k] + c.JSO[k, j]
    return {"xx": Jx, "yy": Jy, "xy": dm + so, "yx": so - dm}


def chain_params_from_couplings(
    c: SpinCouplings, threshold: float = NN_THRESHOLD, N: Optional[int] = None
) -> ModelParams:
    """Reduce uniform nearest-neighbour ring couplings to chain parameters

    gamma, Gamma and h come back in units of J, as they enter
    H = J sum[... + Gamma (XY + alpha YX) + h Z]. The absolute off-diagonal
    exchange J^DM + J^SO on a bond is J * Gamma.
    """
    n = c.n_sites
    if n < 3:
        raise NotReducibleError(f"a ring needs at least three sites, got {n}")
    bonds = _bond_sums(c)
    for name, values in bonds.items():
        if np.ptp(values) > UNIFORM_TOL * max(1.0, float(np.max(np.abs(values)))):
            raise NotReducibleError(f"{name} couplings differ between bonds: {values}")
    if np.ptp(c.hz) > UNIFORM_TOL * max(1.0, float(np.max(np.abs(c.hz)))):
        raise NotReducibleError(f"h^z differs between sites: {c.hz}")

    J = float(bonds["xx"][0] + bonds["yy"][0])
    if J <= 0.0:
        raise NotReducibleError(f"J = Jx + Jy must be positive, got {J}")

    idx = np.arange(n)
    ring = (np.abs(idx[:, None] - idx[None, :]) == 1) | (np.abs(idx[:, None] - idx[None, :]) == n - 1)
    far = ~ring & ~np.eye(n, dtype=bool)
    if np.any(far):
        longest = max(float(np.max(np.abs(m[far]))) for m in (c.Jx, c.Jy, c.JDM, c.JSO))
        if longest > threshold * J:
            raise NotReducibleError(
                f"beyond-nearest-neighbour coupling {longest:g} exceeds {threshold:g} x J"
            )

    xy, yx = float(bonds["xy"][0]), float(bonds["yx"][0])
    Gamma = xy / J
    if Gamma == 0.0:
        warnings.warn("Gamma = 0 leaves alpha undefined; reporting alpha = 0", RuntimeWarning)
        alpha = 0.0
    else:
        alpha = yx / xy
    return ModelParams(
        J=J,
        gamma=float(bonds["xx"][0] - bonds["yy"][0]) / J,
        Gamma=Gamma,
        alpha=alpha,
        h=float(c.hz[0]) / J,
        N=N or n,
    )


def model_to_couplings(params: ModelParams, n_sites: Optional[int] = None) -> SpinCouplings:
    """Ring couplings whose reduction gives back params"""
    n = n_sites or params.N
    if n < 3:
        raise InvalidParameterError(f"a ring needs at least three sites, got {n}")
    zeros = np.zeros((n, n))
    Jx, Jy, JDM, JSO = (zeros.copy() for _ in range(4))
    J, G = params.J, params.Gamma
    for j in range(n):
        k = (j + 1) % n
        Jx[j, k] = J * (1.0 + params.gamma) / 2.0
        Jy[j, k] = J * (1.0 - params.gamma) / 2.0
        JDM[j, k] = J * G * (1.0 - params.alpha) / 2.0
        JSO[j, k] = J * G * (1.0 + params.alpha) / 2.0
    return SpinCouplings(Jx=Jx, Jy=Jy, JDM=JDM, JSO=JSO, hz=np.full(n, J * params.h))


def coupling_summary(p: AtomLightParams, threshold: float = NN_THRESHOLD) -> Dict[str, Any]:
    """Couplings, residual, and the reduced chain when one exists"""
    c = spin_couplings(p)
    residual = dissipative_residual(p)
    if residual > 1e-12:
        warnings.warn(f"exchange kernel is dissipative, residual {residual:.3e}", RuntimeWarning)
    summary: Dict[str, Any] = {"couplings": c, "dissipative_residual": residual, "model": None}
    try:
        summary["model"] = chain_params_from_couplings(c, threshold)
    except NotReducibleError as exc:
        summary["reason"] = str(exc)
    return summary
