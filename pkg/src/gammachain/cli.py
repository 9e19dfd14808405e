"""
Command Line Interface for the XY-Gamma chain toolkit
"""

import argparse
import sys
from typing import Any, Dict, List, Optional

import numpy as np

from .config import Config, load_run_file
from .errors import InvalidParameterError, NumericError
from .model import ModelParams, sweep_values
from .operations import SweepOperations

PARAM_KEYS = ("J", "gamma", "Gamma", "alpha", "h", "N", "r", "sector", "step", "format", "out")
EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERIC = 2


def parse_range(text: str) -> np.ndarray:
    """'start:stop:count' or a single value"""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            return sweep_values(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as e:
        raise InvalidParameterError(f"Bad range {text!r}: {e}") from e
    raise InvalidParameterError(f"Ranges are written start:stop:count, got {text!r}")


def parse_ints(text: str) -> List[int]:
    """'1,2,3', 'start:stop' (inclusive) or a single integer"""
    try:
        if ":" in text:
            start, stop = (int(v) for v in text.split(":"))
            if stop < start:
                raise InvalidParameterError(f"Empty integer range {text!r}")
            return list(range(start, stop + 1))
        return [int(v) for v in text.split(",") if v]
    except ValueError as e:
        raise InvalidParameterError(f"Bad integer list {text!r}: {e}") from e


class CLI:
    """Command Line Interface for the XY-Gamma chain toolkit"""

    def __init__(self):
        self.config = Config.from_env()
        self.operations = SweepOperations(self.config)

    def _add_model_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--J', type=float, help='Exchange scale (default 1)')
        parser.add_argument('--gamma', type=float, help='XY anisotropy (default 0.6)')
        parser.add_argument('--Gamma', type=float, help='Off-diagonal exchange in units of J (default 0.6)')
        parser.add_argument('--alpha', type=float, help='Gamma-term asymmetry (default 0.5)')
        parser.add_argument('--h', type=float, help='Transverse field in units of J (default 0.5)')
        parser.add_argument('--N', type=int, help='Chain length (default 2000)')
        parser.add_argument('--sector', choices=['antiperiodic', 'periodic', 'auto'],
                            help='Fermion boundary sector')
        self._add_output_arguments(parser)

    def _add_output_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--format', choices=['csv', 'json'], help='Output format')
        parser.add_argument('--out', '-o', help='Output file path')
        parser.add_argument('--config', help='key=value run file; flags override it')

    def create_parser(self) -> argparse.ArgumentParser:
        """Create the argument parser"""
        parser = argparse.ArgumentParser(
            description="XY-Gamma spin chain: spectra, correlations, coherence and scaling",
            prog="gammachain"
        )

        subparsers = parser.add_subparsers(dest='command', help='Available commands')

        spectrum_parser = subparsers.add_parser('spectrum', help='Quasiparticle dispersion table')
        self._add_model_arguments(spectrum_parser)

        phase_parser = subparsers.add_parser('phase-diagram', help='Gap and phase label on an alpha-h grid')
        self._add_model_arguments(phase_parser)
        phase_parser.add_argument('--alpha-range', dest='alpha_range', help='start:stop:count')
        phase_parser.add_argument('--h-range', dest='h_range', help='start:stop:count')

        curvature_parser = subparsers.add_parser('energy-curvature', help='Second derivative of e0')
        self._add_model_arguments(curvature_parser)
        curvature_parser.add_argument('--vary', choices=['h', 'alpha'], default='h')
        curvature_parser.add_argument('--range', dest='sweep_range', help='start:stop:count')
        curvature_parser.add_argument('--sizes', help='Comma-separated chain lengths')
        curvature_parser.add_argument('--mode', choices=['finite_N', 'thermodynamic'], default='finite_N')

        correlate_parser = subparsers.add_parser('correlate', help='Connected two-point correlators')
        self._add_model_arguments(correlate_parser)
        correlate_parser.add_argument('--r', help='Distances: 1,2,3 or 1:20')
        correlate_parser.add_argument('--labels', default='xx,yy,zz,xy,yx')
        correlate_parser.add_argument('--h-range', dest='h_range', help='start:stop:count')

        chiral_parser = subparsers.add_parser('chiral', help='Vector-chiral order |G^xy| - |G^yx|')
        self._add_model_arguments(chiral_parser)
        chiral_parser.add_argument('--r', help='Distance')
        chiral_parser.add_argument('--h-range', dest='h_range', help='start:stop:count')

        dimer_parser = subparsers.add_parser('dimer', help='Vector-chirality correlator against r')
        self._add_model_arguments(dimer_parser)
        dimer_parser.add_argument('--r', help='Distances: 1,2,3 or 1:20')
        dimer_parser.add_argument('--channel', choices=['xy', 'full'], default='xy')

        sqc_parser = subparsers.add_parser('sqc', help='Steered coherence and its susceptibility')
        self._add_model_arguments(sqc_parser)
        sqc_parser.add_argument('--r', help='Distances: 1,2,3 or 1:3')
        sqc_parser.add_argument('--h-range', dest='h_range', help='start:stop:count')
        sqc_parser.add_argument('--step', type=float, help='Finite-difference step in h')

        scaling_parser = subparsers.add_parser('scaling-fit', help='Critical exponent fits')
        self._add_model_arguments(scaling_parser)
        scaling_parser.add_argument('--target', choices=['energy', 'correlation', 'sqc', 'gap'], default='energy')
        scaling_parser.add_argument('--r', help='Distance for correlation and sqc targets')
        scaling_parser.add_argument('--side', choices=['upper', 'lower'], default='upper')

        couplings_parser = subparsers.add_parser('couplings', help='Cavity-mediated spin couplings')
        couplings_parser.add_argument('--input', '-i', required=True, help='Atom-light JSON file')
        self._add_output_arguments(couplings_parser)

        oracle_parser = subparsers.add_parser('oracle-check', help='Compare against exact diagonalization')
        oracle_parser.add_argument('--n', dest='ed_sites', type=int, default=10, help='Chain length (even, <= 12)')
        oracle_parser.add_argument('--draws', type=int, default=30)
        oracle_parser.add_argument('--seed', type=int, default=0)
        oracle_parser.add_argument('--tol', type=float, default=1e-8)
        self._add_output_arguments(oracle_parser)

        critical_parser = subparsers.add_parser('critical', help='Critical lines and fermion points')
        self._add_model_arguments(critical_parser)

        map_parser = subparsers.add_parser('coherence-map', help='G^xx and steered coherence on an alpha-h grid')
        self._add_model_arguments(map_parser)
        map_parser.add_argument('--r', help='Distance')
        map_parser.add_argument('--alpha-range', dest='alpha_range', help='start:stop:count')
        map_parser.add_argument('--h-range', dest='h_range', help='start:stop:count')

        return parser

    def run(self, args: List[str] = None) -> int:
        """Run the CLI with given arguments"""
        parser = self.create_parser()

        if args is None:
            args = sys.argv[1:]

        if not args:
            parser.print_help()
            return EXIT_OK

        try:
            parsed_args = parser.parse_args(args)
        except SystemExit as e:
            return EXIT_OK if e.code == 0 else EXIT_INVALID

        if parsed_args.command is None:
            parser.print_help()
            return EXIT_OK

        try:
            return self._execute_command(parsed_args)
        except NumericError as e:
            print(f"❌ Error: {e}")
            return EXIT_NUMERIC
        except Exception as e:
            print(f"❌ Error: {e}")
            return EXIT_INVALID

    def _settings(self, args) -> Dict[str, Any]:
        """Flags over config-file values"""
        settings: Dict[str, Any] = {}
        if getattr(args, 'config', None):
            settings.update({k: v for k, v in load_run_file(args.config).items() if v is not None})
        for key in PARAM_KEYS + ("alpha_range", "h_range"):
            value = getattr(args, key, None)
            if value is not None:
                settings[key] = value
        return settings

    def _model(self, settings: Dict[str, Any]) -> ModelParams:
        try:
            return ModelParams(
                J=float(settings.get('J', self.config.DEFAULT_J)),
                gamma=float(settings.get('gamma', self.config.DEFAULT_GAMMA)),
                Gamma=float(settings.get('Gamma', self.config.DEFAULT_GAMMA_OFFDIAG)),
                alpha=float(settings.get('alpha', 0.5)),
                h=float(settings.get('h', 0.5)),
                N=int(settings.get('N', self.config.DEFAULT_N)),
                sector=str(settings.get('sector', 'antiperiodic')),
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, InvalidParameterError):
                raise
            raise InvalidParameterError(f"Bad model parameter: {e}") from e

    def _save(self, df, name: str, settings: Dict[str, Any], metadata: Dict[str, Any]) -> int:
        self.operations.save(df, name, metadata, settings.get('format'), settings.get('out'))
        return EXIT_OK

    def _execute_command(self, args) -> int:
        """Execute the parsed command"""
        handlers = {
            'spectrum': self._spectrum_command,
            'phase-diagram': self._phase_diagram_command,
            'energy-curvature': self._energy_curvature_command,
            'correlate': self._correlate_command,
            'chiral': self._chiral_command,
            'dimer': self._dimer_command,
            'sqc': self._sqc_command,
            'scaling-fit': self._scaling_fit_command,
            'couplings': self._couplings_command,
            'oracle-check': self._oracle_check_command,
            'critical': self._critical_command,
            'coherence-map': self._coherence_map_command,
        }
        handler = handlers.get(args.command)
        if handler is None:
            print("❌ Unknown command")
            return EXIT_INVALID
        return handler(args, self._settings(args))

    def _spectrum_command(self, args, settings) -> int:
        """Handle spectrum command"""
        params = self._model(settings)
        df = self.operations.spectrum_table(params)
        return self._save(df, 'spectrum', settings, params.as_dict())

    def _phase_diagram_command(self, args, settings) -> int:
        """Handle phase-diagram command"""
        params = self._model(settings)
        alpha_range = settings.get('alpha_range', '-1:1:201')
        h_range = settings.get('h_range', '0:2:201')
        df = self.operations.phase_diagram(params, parse_range(alpha_range), parse_range(h_range))
        metadata = dict(params.as_dict(), alpha_range=alpha_range, h_range=h_range)
        return self._save(df, 'phase_diagram', settings, metadata)

    def _energy_curvature_command(self, args, settings) -> int:
        """Handle energy-curvature command"""
        params = self._model(settings)
        default = '0:2:401' if args.vary == 'h' else '-1:1:401'
        sweep = args.sweep_range or default
        sizes = parse_ints(args.sizes) if args.sizes else [params.N]
        df = self.operations.energy_curvature(params, args.vary, parse_range(sweep), sizes, args.mode)
        metadata = dict(params.as_dict(), vary=args.vary, range=sweep, sizes=",".join(map(str, sizes)), mode=args.mode)
        return self._save(df, 'energy_curvature', settings, metadata)

    def _correlate_command(self, args, settings) -> int:
        """Handle correlate command"""
        params = self._model(settings)
        r_values = parse_ints(str(settings.get('r', '1:20')))
        labels = [label.strip() for label in args.labels.split(",") if label.strip()]
        h_range = settings.get('h_range')
        h_values = parse_range(h_range) if h_range else None
        df = self.operations.correlate(params, labels, r_values, h_values)
        metadata = dict(params.as_dict(), labels=",".join(labels), r=settings.get('r', '1:20'), h_range=h_range or "")
        return self._save(df, 'correlate', settings, metadata)

    def _chiral_command(self, args, settings) -> int:
        """Handle chiral command"""
        params = self._model(settings)
        r = int(settings.get('r', 1))
        h_range = settings.get('h_range', '0:2:201')
        df = self.operations.chiral(params, parse_range(h_range), r)
        return self._save(df, 'chiral', settings, dict(params.as_dict(), r=r, h_range=h_range))

    def _dimer_command(self, args, settings) -> int:
        """Handle dimer command"""
        params = self._model(settings)
        r_text = str(settings.get('r', '1:20'))
        df = self.operations.dimer(params, parse_ints(r_text), args.channel)
        return self._save(df, 'dimer', settings, dict(params.as_dict(), r=r_text, channel=args.channel))

    def _sqc_command(self, args, settings) -> int:
        """Handle sqc command"""
        params = self._model(settings)
        r_text = str(settings.get('r', '1:3'))
        h_range = settings.get('h_range', '0:2:201')
        step = float(settings.get('step', self.config.FD_STEP))
        df = self.operations.sqc(params, parse_range(h_range), parse_ints(r_text), step)
        metadata = dict(params.as_dict(), r=r_text, h_range=h_range, step=step)
        return self._save(df, 'sqc', settings, metadata)

    def _scaling_fit_command(self, args, settings) -> int:
        """Handle scaling-fit command"""
        params = self._model(settings)
        r = int(settings.get('r', 1))
        if args.target == 'gap':
            df = self.operations.gap_fits(params, args.side)
        else:
            df = self.operations.scaling_fit(params, args.target, r)
        metadata = dict(params.as_dict(), target=args.target, r=r, side=args.side)
        return self._save(df, 'scaling_fit', settings, metadata)

    def _couplings_command(self, args, settings) -> int:
        """Handle couplings command"""
        summary = self.operations.couplings(args.input)
        metadata: Dict[str, Any] = {
            "input": args.input,
            "dissipative_residual": summary["dissipative_residual"],
        }
        for site, hz in summary["fields"].itertuples(index=False, name=None):
            metadata[f"hz_{int(site)}"] = float(hz)
        model = summary["model"]
        if model is not None:
            metadata.update({f"chain_{k}": v for k, v in model.as_dict().items() if k != "sector"})
            print(f"📋 Reduced chain: J={model.J:.6g} gamma={model.gamma:.6g} "
                  f"Gamma={model.Gamma:.6g} alpha={model.alpha:.6g} h={model.h:.6g}")
        return self._save(summary["table"], 'couplings', settings, metadata)

    def _oracle_check_command(self, args, settings) -> int:
        """Handle oracle-check command"""
        df = self.operations.oracle_check(args.ed_sites, args.draws, args.seed)
        self._save(df, 'oracle_check', settings, {"N": args.ed_sites, "draws": args.draws, "seed": args.seed})
        if len(df) == 0:
            print("⚠️ Every draw was degenerate; nothing compared")
            return EXIT_NUMERIC
        worst = float(df['max_abs_diff'].max())
        if worst >= args.tol:
            print(f"❌ Error: largest deviation {worst:.3e} exceeds {args.tol:g}")
            return EXIT_NUMERIC
        return EXIT_OK

    def _critical_command(self, args, settings) -> int:
        """Handle critical command"""
        params = self._model(settings)
        summary = self.operations.critical_summary(params)

        print("\n📋 CRITICAL STRUCTURE")
        print("=" * 30)
        for key, value in summary.items():
            print(f"{key}: {value}")
        return EXIT_OK

    def _coherence_map_command(self, args, settings) -> int:
        """Handle coherence-map command"""
        params = self._model(settings)
        r = int(settings.get('r', 1))
        alpha_range = settings.get('alpha_range', '-1:1:101')
        h_range = settings.get('h_range', '0:2:101')
        df = self.operations.coherence_map(params, parse_range(alpha_range), parse_range(h_range), r)
        metadata = dict(params.as_dict(), r=r, alpha_range=alpha_range, h_range=h_range)
        return self._save(df, 'coherence_map', settings, metadata)


def main():
    """Main entry point"""
    cli = CLI()
    return cli.run()


if __name__ == '__main__':
    sys.exit(main())
