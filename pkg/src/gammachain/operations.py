"""
Sweep drivers behind the command line
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from . import __version__
from .coherence import coherence_susceptibility, reduced_density_matrix, steered_quantum_coherence
from .config import Config
from .correlations import (
    chiral_order,
    contractions,
    correlation_profile,
    dimer_correlation,
    two_point,
)
from .couplings import AtomLightParams, coupling_summary
from .errors import InvalidParameterError
from .model import (
    ModelParams,
    classify_phase,
    critical_set,
    energy_curvature_h,
    energy_second_derivative,
    excitation_gap,
    fermion_points,
    ground_state_energy_density,
    spectrum,
)
from .oracle import oracle_report, random_draws
from .output import ResultWriter
from .scaling import (
    BOUNDARIES,
    dispersion_exponent_z,
    gap_prefactor,
    gap_scaling_fit,
    scaling_report,
)


class SweepOperations:
    """Parameter sweeps producing result tables"""

    def __init__(self, config: Config):
        self.config = config
        self.writer = ResultWriter(config)

    def _map(self, fn: Callable, items: Iterable) -> List[Any]:
        """Ordered fan-out capped by THREADS"""
        items = list(items)
        if self.config.THREADS <= 1 or len(items) < 2:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.config.THREADS) as executor:
            return list(executor.map(fn, items))

    def save(
        self,
        df: pd.DataFrame,
        name: str,
        metadata: Dict[str, Any],
        fmt: Optional[str] = None,
        out: Optional[str] = None,
    ) -> str:
        header = {"gammachain_version": __version__, "command": name}
        header.update(metadata)
        path = self.writer.write(df, name, header, fmt, out)
        print(f"💾 Saved {len(df)} rows to {path}")
        return path

    def spectrum_table(self, params: ModelParams) -> pd.DataFrame:
        spec = spectrum(params)
        print(f"📊 Spectrum of {len(spec.grid)} modes in the {spec.grid.sector} sector")
        return pd.DataFrame(spec.to_rows(), columns=["k", "eps", "u", "v", "phi", "filled"])

    def phase_diagram(
        self, base: ModelParams, alpha_values: Sequence[float], h_values: Sequence[float]
    ) -> pd.DataFrame:
        """Continuum gap and phase label on an alpha-h grid"""
        grid = [base.with_(alpha=float(a), h=float(h)) for a in alpha_values for h in h_values]
        print(f"📊 Phase diagram over {len(grid)} points")

        def row(p: ModelParams):
            gap = excitation_gap(p, self.config.GAP_GRID_POINTS)
            return p.alpha, p.h, gap.signed_min, gap.gap, gap.k_min, classify_phase(p).value

        rows = self._map(row, grid)
        return pd.DataFrame(rows, columns=["alpha", "h", "signed_min", "gap", "k_min", "phase"])

    def energy_curvature(
        self,
        base: ModelParams,
        parameter: str,
        values: Sequence[float],
        sizes: Sequence[int],
        mode: str = "finite_N",
    ) -> pd.DataFrame:
        """-d^2 e0 / d(parameter)^2 per chain length"""
        points = [base.with_(**{parameter: float(v), "N": int(N)}) for N in sizes for v in values]
        print(f"📊 Energy curvature in {parameter} for N = {list(sizes)}")

        def row(p: ModelParams):
            if parameter == "h":
                curvature = energy_curvature_h(p, mode)
            else:
                curvature = -energy_second_derivative(p, "alpha", self.config.FD_STEP, mode)
            return p.N, getattr(p, parameter), ground_state_energy_density(p, mode), curvature

        rows = self._map(row, points)
        return pd.DataFrame(rows, columns=["N", parameter, "e0", "curvature"])

    def correlate(
        self,
        base: ModelParams,
        labels: Sequence[str],
        r_values: Sequence[int],
        h_values: Optional[Sequence[float]] = None,
    ) -> pd.DataFrame:
        """Connected correlators against r, optionally swept in h"""
        points = [base] if h_values is None else [base.with_(h=float(h)) for h in h_values]
        print(f"📊 Correlators {list(labels)} at r = {list(r_values)}")

        def rows_for(p: ModelParams):
            return [(p.h, res.label, res.r, res.value) for res in correlation_profile(p, labels, r_values)]

        rows = [row for chunk in self._map(rows_for, points) for row in chunk]
        return pd.DataFrame(rows, columns=["h", "label", "r", "value"])

    def chiral(self, base: ModelParams, h_values: Sequence[float], r: int) -> pd.DataFrame:
        print(f"📊 Chiral order at r = {r}")

        def row(h: float):
            p = base.with_(h=float(h))
            cs = contractions(p, r)
            xy = two_point(p, "x", "y", r, cs).value
            yx = two_point(p, "y", "x", r, cs).value
            return p.h, xy, yx, chiral_order(p, r, cs)

        return pd.DataFrame(self._map(row, h_values), columns=["h", "Gxy", "Gyx", "chiral"])

    def dimer(self, base: ModelParams, r_values: Sequence[int], channel: str = "xy") -> pd.DataFrame:
        print(f"📊 Dimer correlator ({channel}) for r up to {max(r_values)}")
        cs = contractions(base, max(r_values) + 1)
        rows = [(r, dimer_correlation(base, r, channel, cs)) for r in r_values]
        return pd.DataFrame(rows, columns=["r", "D"])

    def sqc(
        self,
        base: ModelParams,
        h_values: Sequence[float],
        r_values: Sequence[int],
        step: Optional[float] = None,
    ) -> pd.DataFrame:
        """Steered coherence and its h-susceptibility"""
        step = step or self.config.FD_STEP
        points = [(float(h), r) for h in h_values for r in r_values]
        print(f"📊 Steered coherence over {len(points)} points")

        def row(point):
            h, r = point
            p = base.with_(h=h)
            return h, r, steered_quantum_coherence(reduced_density_matrix(p, r)), coherence_susceptibility(p, r, step)

        return pd.DataFrame(self._map(row, points), columns=["h", "r", "sqc", "chi"])

    def coherence_map(
        self, base: ModelParams, alpha_values: Sequence[float], h_values: Sequence[float], r: int = 1
    ) -> pd.DataFrame:
        """G_r^xx and steered coherence on an alpha-h grid"""
        grid = [base.with_(alpha=float(a), h=float(h)) for a in alpha_values for h in h_values]
        print(f"📊 Coherence map over {len(grid)} points")

        def row(p: ModelParams):
            cs = contractions(p, r)
            return (
                p.alpha,
                p.h,
                two_point(p, "x", "x", r, cs).value,
                steered_quantum_coherence(reduced_density_matrix(p, r, cs)),
            )

        return pd.DataFrame(self._map(row, grid), columns=["alpha", "h", "Gxx", "sqc"])

    def scaling_fit(self, base: ModelParams, target: str, r: int = 1) -> pd.DataFrame:
        """Peak and distance fits with the resulting nu"""
        print(f"📊 Scaling fit for {target} (r = {r}) over N = {list(self.config.SCALING_SIZES)}")
        report = scaling_report(target, base, r, config=self.config, mapper=self._map)
        print(f"✅ nu = {report.nu.value:.4f} ± {report.nu.error:.4f}")
        return pd.DataFrame([report.as_row()])

    def gap_fits(self, base: ModelParams, side: str = "upper") -> pd.DataFrame:
        """nu z and the gap prefactors at every reachable critical line"""
        rows = []
        for boundary in BOUNDARIES:
            try:
                fit = gap_scaling_fit(base, boundary, side, config=self.config)
                pref = gap_prefactor(base, boundary, side=side, config=self.config)
            except InvalidParameterError as e:
                print(f"⚠️ Skipping {boundary}: {e}")
                continue
            rows.append((boundary, fit.slope, fit.stderr, pref.continuum, pref.at_k_c))
        return pd.DataFrame(rows, columns=["boundary", "nu_z", "stderr", "prefactor", "prefactor_k_c"])

    def critical_summary(self, params: ModelParams) -> Dict[str, Any]:
        crit = critical_set(params)
        label = classify_phase(params)
        summary: Dict[str, Any] = {
            "phase": label.value,
            "h_c1": crit.h_c1,
            "alpha_c1": crit.alpha_c1,
            "h_c2": crit.h_c2,
            "alpha_c2": crit.alpha_c2,
            "fermion_points": fermion_points(params),
        }
        for name, k in crit.k_c.items():
            summary[f"k_c_{name}"] = k
        if label.is_boundary:
            summary["z"] = dispersion_exponent_z(params, config=self.config).slope
        return summary

    def couplings(self, path: str) -> Dict[str, Any]:
        p = AtomLightParams.from_json(path)
        summary = coupling_summary(p)
        c = summary["couplings"]
        summary["table"] = pd.DataFrame(c.to_rows(), columns=["i", "j", "Jx", "Jy", "JDM", "JSO"])
        summary["fields"] = pd.DataFrame({"site": np.arange(c.n_sites), "hz": c.hz})
        print(f"✅ Couplings for {c.n_sites} sites and {len(p.modes)} modes")
        if summary["model"] is None:
            print(f"⚠️ Not reducible to a uniform chain: {summary.get('reason')}")
        return summary

    def oracle_check(self, N: int, draws: int, seed: int = 0) -> pd.DataFrame:
        """Free-fermion against exact diagonalization on random draws"""
        print(f"📊 Comparing {draws} draws at N = {N} against exact diagonalization")
        params_list = random_draws(N, draws, seed)
        chunks = self._map(lambda p: oracle_report([p], config=self.config), params_list)
        rows = [row for chunk in chunks for row in chunk.rows]
        skipped = sum(chunk.skipped for chunk in chunks)
        if skipped:
            print(f"⚠️ Skipped {skipped} draws with a near-degenerate exact ground state")
        df = pd.DataFrame(rows)
        if len(df):
            print(f"✅ Largest deviation {df['max_abs_diff'].max():.3e} over {len(df)} draws")
        return df
