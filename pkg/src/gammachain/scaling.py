"""
Finite-size and distance scaling near the critical lines

Peak heights grow as a ln N + c and values near the transition as
b ln|lambda - lambda_c| + c; nu = |a / b|. Gap and dispersion fits give
nu z and z directly.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize, signal, stats

from .coherence import coherence_susceptibility
from .config import Config
from .correlations import two_point
from .errors import InvalidParameterError, UndefinedExponentError
from .model import (
    ModelParams,
    classify_phase,
    critical_set,
    dispersion,
    energy_curvature_h,
    energy_second_derivative,
    excitation_gap,
)

Evaluator = Callable[[ModelParams], float]
Mapper = Callable[..., Iterable]

BOUNDARIES = ("CP1", "CP2", "CP3")
TARGETS = ("energy", "correlation", "sqc")
MIN_FIT_POINTS = 3
MIN_SIZES = 4
PEAK_XATOL = 1e-6
# distances below ROUNDING_FACTOR / N sit inside the finite-size rounding region
ROUNDING_FACTOR = 10.0
# h-derivative steps in peak sweeps stay below the 1/N critical width
PEAK_STEP_PER_SITE = 0.05


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep of a fixed model, repeated for each chain length"""

    parameter: str
    start: float
    stop: float
    resolution: int
    base: ModelParams
    sizes: Tuple[int, ...] = (2000,)

    def __post_init__(self):
        if self.parameter not in ("h", "alpha"):
            raise InvalidParameterError(f"Sweeps vary h or alpha, not {self.parameter!r}")
        if not self.stop > self.start:
            raise InvalidParameterError(f"Sweep range must be increasing: {self.start}:{self.stop}")
        if self.resolution < 3:
            raise InvalidParameterError(f"Sweeps need at least 3 points, got {self.resolution}")
        if not self.sizes:
            raise InvalidParameterError("Sweeps need at least one chain length")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.resolution)

    def params_at(self, value: float, N: int) -> ModelParams:
        return self.base.with_(**{self.parameter: float(value), "N": int(N)})


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    stderr: float
    intercept_stderr: float
    n_points: int
    window: Tuple[float, float]

    def as_dict(self):
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "stderr": self.stderr,
            "intercept_stderr": self.intercept_stderr,
            "n_points": self.n_points,
            "window_lo": self.window[0],
            "window_hi": self.window[1],
        }


@dataclass(frozen=True)
class PeakResult:
    N: int
    location: float
    value: float
    at_boundary: bool = False


@dataclass(frozen=True)
class Exponent:
    value: float
    error: float


def _linear_fit(x: np.ndarray, y: np.ndarray, window: Tuple[float, float]) -> FitResult:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise InvalidParameterError("fit abscissa and ordinate lengths differ")
    if len(x) < MIN_FIT_POINTS:
        raise InvalidParameterError(f"fits need at least {MIN_FIT_POINTS} points, got {len(x)}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidParameterError("fit data must be finite")
    res = stats.linregress(x, y)
    return FitResult(
        slope=float(res.slope),
        intercept=float(res.intercept),
        stderr=float(abs(res.stderr)),
        intercept_stderr=float(abs(res.intercept_stderr)),
        n_points=len(x),
        window=(float(window[0]), float(window[1])),
    )


def peak_locate(evaluator: Evaluator, sweep: SweepSpec, mapper: Mapper = map) -> List[PeakResult]:
    """Grid maximum per chain length, refined by a bounded scalar search"""
    grid = sweep.values()
    peaks = []
    for N in sweep.sizes:
        values = np.array(list(mapper(evaluator, [sweep.params_at(x, N) for x in grid])))
        i = int(np.argmax(values))
        if i == 0 or i == len(grid) - 1:
            warnings.warn(
                f"Maximum at the sweep edge {sweep.parameter}={grid[i]:g} for N={N}; widen the window",
                RuntimeWarning,
            )
            peaks.append(PeakResult(N, float(grid[i]), float(values[i]), at_boundary=True))
            continue
        res = optimize.minimize_scalar(
            lambda x: -evaluator(sweep.params_at(x, N)),
            bounds=(grid[i - 1], grid[i + 1]),
            method="bounded",
            options={"xatol": PEAK_XATOL},
        )
        if res.success and -res.fun >= values[i]:
            peaks.append(PeakResult(N, float(res.x), float(-res.fun)))
        else:
            peaks.append(PeakResult(N, float(grid[i]), float(values[i])))
    return peaks


def log_fit_N(sizes: Sequence[int], values: Sequence[float]) -> FitResult:
    """value = a ln N + c"""
    sizes = np.asarray(sizes, dtype=float)
    if len(sizes) < MIN_SIZES:
        raise InvalidParameterError(f"N fits need at least {MIN_SIZES} sizes, got {len(sizes)}")
    if np.any(sizes <= 0):
        raise InvalidParameterError("chain lengths must be positive")
    return _linear_fit(np.log(sizes), values, (sizes.min(), sizes.max()))


def log_fit_distance(
    distances: Sequence[float], values: Sequence[float], N: Optional[int] = None
) -> FitResult:
    """value = b ln|lambda - lambda_c| + c"""
    d = np.abs(np.asarray(distances, dtype=float))
    if np.any(d <= 0):
        raise InvalidParameterError("distances from the critical point must be nonzero")
    if N is not None and d.min() * N < ROUNDING_FACTOR:
        warnings.warn(
            f"Fit window reaches {d.min():g}, inside the finite-size rounding region of N={N}",
            RuntimeWarning,
        )
    return _linear_fit(np.log(d), values, (d.min(), d.max()))


def exponent_nu(a: FitResult, b: FitResult) -> Exponent:
    """nu = |a / b| with first-order error propagation"""
    if abs(b.slope) < 1e-12:
        raise UndefinedExponentError(f"distance slope {b.slope:g} is too small to divide by")
    value = abs(a.slope / b.slope)
    error = math.hypot(a.stderr / b.slope, a.slope * b.stderr / b.slope ** 2)
    return Exponent(value=value, error=error)


def _fit_offsets(window: Optional[Tuple[float, float]], points: int, config: Config) -> np.ndarray:
    lo, hi = window or config.FIT_WINDOW
    if not 0 < lo < hi:
        raise InvalidParameterError(f"fit window must satisfy 0 < lo < hi, got {(lo, hi)}")
    return np.logspace(math.log10(lo), math.log10(hi), points)


def _approach(params: ModelParams, boundary: str, side: str):
    """(parameter name, critical value, critical params) of a line crossing"""
    if boundary not in BOUNDARIES:
        raise InvalidParameterError(f"boundary must be one of {BOUNDARIES}, got {boundary!r}")
    if side not in ("upper", "lower"):
        raise InvalidParameterError(f"side must be 'upper' or 'lower', got {side!r}")
    crit = critical_set(params)
    if boundary == "CP1":
        name, value = "h", crit.h_c1
    elif boundary == "CP2":
        if crit.alpha_c1 is None:
            raise InvalidParameterError("CP2 needs Gamma != 0")
        name, value = "alpha", crit.alpha_c1
    else:
        if crit.h_c2 is None or crit.h_c2 < 1.0:
            raise InvalidParameterError(f"no CP3 crossing at alpha={params.alpha}")
        name, value = "h", crit.h_c2
    return name, value, params.with_(**{name: value})


def _shifted(params: ModelParams, name: str, value: float, delta: float, side: str) -> ModelParams:
    sign = 1.0 if side == "upper" else -1.0
    return params.with_(**{name: value + sign * delta})


def gap_scaling_fit(
    params: ModelParams,
    boundary: str,
    side: str = "upper",
    window: Optional[Tuple[float, float]] = None,
    points: Optional[int] = None,
    config: Optional[Config] = None,
) -> FitResult:
    """Slope of ln Delta against ln|lambda - lambda_c|, i.e. nu z"""
    config = config or Config()
    name, value, _ = _approach(params, boundary, side)
    deltas = _fit_offsets(window, points or config.FIT_POINTS, config)
    gaps = np.array(
        [excitation_gap(_shifted(params, name, value, d, side), config.GAP_GRID_POINTS).gap for d in deltas]
    )
    if np.any(gaps <= 0.0):
        raise InvalidParameterError(
            f"{boundary} approached from the {side} side is gapless; use the other side"
        )
    return _linear_fit(np.log(deltas), np.log(gaps), (deltas[0], deltas[-1]))


@dataclass(frozen=True)
class GapPrefactor:
    boundary: str
    distance: float
    continuum: float
    at_k_c: float
    k_c: float


def gap_prefactor(
    params: ModelParams,
    boundary: str,
    distance: float = 1e-3,
    side: str = "upper",
    config: Optional[Config] = None,
) -> GapPrefactor:
    """Delta / |lambda - lambda_c| over the continuum and at the critical momentum"""
    config = config or Config()
    if distance <= 0:
        raise InvalidParameterError(f"distance must be positive, got {distance}")
    name, value, critical = _approach(params, boundary, side)
    k_c = critical_set(critical).k_c.get(boundary)
    if k_c is None:
        raise InvalidParameterError(f"{boundary} has no gap-closing momentum here")
    shifted = _shifted(params, name, value, distance, side)
    gap = excitation_gap(shifted, config.GAP_GRID_POINTS).gap
    return GapPrefactor(
        boundary=boundary,
        distance=distance,
        continuum=gap / distance,
        at_k_c=abs(float(dispersion(shifted, k_c))) / distance,
        k_c=k_c,
    )


def dispersion_exponent_z(
    params: ModelParams,
    window: Optional[Tuple[float, float]] = None,
    points: Optional[int] = None,
    direction: int = 1,
    config: Optional[Config] = None,
) -> FitResult:
    """Slope of ln eps against ln|k - k_c| on a critical line"""
    config = config or Config()
    label = classify_phase(params)
    if not label.is_boundary:
        raise InvalidParameterError(f"params lie inside phase {label.value}, not on a critical line")
    k_c = critical_set(params).k_c.get(label.value)
    if k_c is None:
        raise InvalidParameterError(f"{label.value} has no gap-closing momentum here")
    offsets = _fit_offsets(window, points or config.FIT_POINTS, config)
    eps = np.abs(dispersion(params, k_c + np.sign(direction) * offsets))
    if np.any(eps <= 0.0):
        raise InvalidParameterError("dispersion vanishes inside the fit window")
    return _linear_fit(np.log(offsets), np.log(eps), (offsets[0], offsets[-1]))


@dataclass(frozen=True)
class Discontinuity:
    N: int
    at: float
    left: float
    right: float

    @property
    def jump(self) -> float:
        return self.right - self.left


def discontinuity_probe(
    params: ModelParams,
    at: Optional[float] = None,
    offset: float = 1e-3,
    step: float = 1e-3,
    mode: str = "finite_N",
) -> Discontinuity:
    """-d^2 e0/d alpha^2 at fixed h, evaluated at alpha_c - offset and alpha_c + offset"""
    if offset <= 0:
        raise InvalidParameterError(f"offset must be positive, got {offset}")
    if at is None:
        crit = critical_set(params)
        at = crit.alpha_c1 if params.h <= 1.0 else crit.alpha_c2
        if at is None:
            raise InvalidParameterError("no alpha transition on this slice")

    def curvature(alpha: float) -> float:
        return -energy_second_derivative(params.with_(alpha=alpha), wrt="alpha", step=step, mode=mode)

    return Discontinuity(
        N=params.N, at=float(at), left=curvature(at - offset), right=curvature(at + offset)
    )


def envelope_slope(r: Sequence[int], values: Sequence[float]) -> FitResult:
    """Log-log slope of the local maxima of |value| against r"""
    r = np.asarray(r, dtype=float)
    magnitude = np.abs(np.asarray(values, dtype=float))
    peaks, _ = signal.find_peaks(magnitude)
    if len(peaks) < MIN_FIT_POINTS:
        raise InvalidParameterError(f"need at least {MIN_FIT_POINTS} local maxima, found {len(peaks)}")
    return _linear_fit(np.log(r[peaks]), np.log(magnitude[peaks]), (r[peaks][0], r[peaks][-1]))


def target_evaluator(target: str, r: int = 1, step: float = 1e-3, mode: str = "finite_N") -> Evaluator:
    """Quantity whose peak and log singularity give nu"""
    if target == "energy":
        return lambda p: energy_curvature_h(p, mode)
    if target == "correlation":

        def dG(p: ModelParams) -> float:
            upper = two_point(p.with_(h=p.h + step), "x", "x", r).value
            lower = two_point(p.with_(h=p.h - step), "x", "x", r).value
            return (upper - lower) / (2.0 * step)

        return dG
    if target == "sqc":
        return lambda p: coherence_susceptibility(p, r, step)
    raise InvalidParameterError(f"target must be one of {TARGETS}, got {target!r}")


@dataclass
class ScalingReport:
    target: str
    peaks: List[PeakResult] = field(default_factory=list)
    a: Optional[FitResult] = None
    b: Optional[FitResult] = None
    nu: Optional[Exponent] = None

    def as_row(self):
        row = {"target": self.target}
        for prefix, fit in (("a", self.a), ("b", self.b)):
            if fit is not None:
                row[prefix] = fit.slope
                row[f"{prefix}_stderr"] = fit.stderr
                row[f"{prefix}_intercept"] = fit.intercept
        if self.nu is not None:
            row["nu"] = self.nu.value
            row["nu_error"] = self.nu.error
        return row


def peak_step(N: int, config: Optional[Config] = None) -> float:
    config = config or Config()
    return min(config.FD_STEP, PEAK_STEP_PER_SITE / N)


def peak_scaling(
    target: str,
    base: ModelParams,
    r: int = 1,
    h_range: Tuple[float, float] = (0.9, 1.1),
    config: Optional[Config] = None,
    mapper: Mapper = map,
) -> Tuple[List[PeakResult], FitResult]:
    """Peak heights of the target swept through h = 1, fitted against ln N"""
    config = config or Config()
    sweep = SweepSpec("h", h_range[0], h_range[1], config.SWEEP_RESOLUTION, base, tuple(config.SCALING_SIZES))

    def evaluate(p: ModelParams) -> float:
        return target_evaluator(target, r, peak_step(p.N, config))(p)

    peaks = peak_locate(evaluate, sweep, mapper)
    return peaks, log_fit_N([p.N for p in peaks], [p.value for p in peaks])


def distance_scaling(
    target: str,
    base: ModelParams,
    r: int = 1,
    side: str = "upper",
    config: Optional[Config] = None,
    mapper: Mapper = map,
) -> FitResult:
    """Target near h = 1 fitted against ln|h - 1|

    The energy curvature uses the thermodynamic integral; correlation-based
    targets use a LARGE_N chain with a step well below the distance.
    """
    config = config or Config()
    name, value, _ = _approach(base, "CP1", side)
    deltas = _fit_offsets(None, config.FIT_POINTS, config)
    points = [_shifted(base, name, value, d, side) for d in deltas]
    if target == "energy":
        values = list(mapper(lambda p: energy_curvature_h(p, "thermodynamic"), points))
        return log_fit_distance(deltas, values)

    large = [p.with_(N=config.LARGE_N) for p in points]
    steps = deltas / 10.0
    values = list(
        mapper(lambda pair: target_evaluator(target, r, pair[1])(pair[0]), zip(large, steps))
    )
    return log_fit_distance(deltas, values, N=config.LARGE_N)


def scaling_report(
    target: str,
    base: ModelParams,
    r: int = 1,
    config: Optional[Config] = None,
    mapper: Mapper = map,
) -> ScalingReport:
    peaks, a = peak_scaling(target, base, r, config=config, mapper=mapper)
    b = distance_scaling(target, base, r, config=config, mapper=mapper)
    return ScalingReport(target=target, peaks=peaks, a=a, b=b, nu=exponent_nu(a, b))
