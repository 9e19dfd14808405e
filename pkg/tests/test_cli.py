"""
Tests for CLI functionality
"""

import json
import os
import shutil
import tempfile
import unittest
from unittest.mock import patch

from src.gammachain.cli import CLI, parse_ints, parse_range
from src.gammachain.config import Config
from src.gammachain.errors import InvalidParameterError, NumericError
from src.gammachain.output import read_metadata, read_result_csv


class TestArgumentParsing(unittest.TestCase):
    """Test range and integer-list parsing"""

    def test_parse_range(self):
        """Test start:stop:count and single values"""
        self.assertEqual(list(parse_range("0:1:3")), [0.0, 0.5, 1.0])
        self.assertEqual(list(parse_range("0.25")), [0.25])
        with self.assertRaises(InvalidParameterError):
            parse_range("0:1")
        with self.assertRaises(InvalidParameterError):
            parse_range("a:b:c")

    def test_parse_ints(self):
        """Test comma lists and inclusive ranges"""
        self.assertEqual(parse_ints("1,2,5"), [1, 2, 5])
        self.assertEqual(parse_ints("2:4"), [2, 3, 4])
        with self.assertRaises(InvalidParameterError):
            parse_ints("4:2")
        with self.assertRaises(InvalidParameterError):
            parse_ints("x")


class TestCLI(unittest.TestCase):
    """Test CLI functionality"""

    def setUp(self):
        # Create temporary directory for tests
        self.temp_dir = tempfile.mkdtemp()

        # Mock config to use temp directory
        patcher = patch('src.gammachain.cli.Config.from_env')
        mock_config_cls = patcher.start()
        self.addCleanup(patcher.stop)

        config = Config()
        config.OUTPUT_DIR = self.temp_dir
        mock_config_cls.return_value = config

        self.cli = CLI()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def path(self, name):
        return os.path.join(self.temp_dir, name)

    def test_parser_creation(self):
        """Test argument parser creation"""
        parser = self.cli.create_parser()

        actions = parser._subparsers._actions
        subparser_action = next(action for action in actions if hasattr(action, 'choices') and action.choices)

        expected_commands = [
            'spectrum', 'phase-diagram', 'energy-curvature', 'correlate', 'chiral', 'dimer',
            'sqc', 'scaling-fit', 'couplings', 'oracle-check', 'critical', 'coherence-map',
        ]
        for command in expected_commands:
            self.assertIn(command, subparser_action.choices)

    def test_no_arguments(self):
        """Test running with no arguments"""
        result = self.cli.run([])
        self.assertEqual(result, 0)  # Should show help

    def test_invalid_command(self):
        """Test handling of invalid commands"""
        result = self.cli.run(['invalid_command'])
        self.assertEqual(result, 1)

    def test_spectrum_csv(self):
        """Test spectrum command writes a CSV with a parameter header"""
        out = self.path('spec.csv')
        result = self.cli.run(['spectrum', '--N', '8', '--out', out])
        self.assertEqual(result, 0)

        df = read_result_csv(out)
        self.assertEqual(len(df), 8)
        self.assertEqual(list(df.columns), ['k', 'eps', 'u', 'v', 'phi', 'filled'])
        metadata = read_metadata(out)
        self.assertEqual(metadata['command'], 'spectrum')
        self.assertEqual(metadata['N'], '8')

    def test_spectrum_default_path(self):
        """Test output lands in OUTPUT_DIR without --out"""
        result = self.cli.run(['spectrum', '--N', '8'])
        self.assertEqual(result, 0)
        self.assertTrue(os.path.exists(self.path('spectrum.csv')))

    def test_spectrum_json(self):
        """Test JSON output"""
        out = self.path('spec.json')
        result = self.cli.run(['spectrum', '--N', '8', '--format', 'json', '--out', out])
        self.assertEqual(result, 0)

        with open(out, 'r', encoding='utf-8') as f:
            document = json.load(f)
        self.assertEqual(document['metadata']['N'], 8)
        self.assertEqual(len(document['rows']), 8)
        self.assertEqual(document['columns'][1], 'eps')

    def test_reruns_are_identical(self):
        """Test the same command writes the same bytes"""
        first, second = self.path('a.csv'), self.path('b.csv')
        self.cli.run(['correlate', '--N', '40', '--r', '1:3', '--out', first])
        self.cli.run(['correlate', '--N', '40', '--r', '1:3', '--out', second])
        with open(first, 'rb') as f1, open(second, 'rb') as f2:
            self.assertEqual(f1.read(), f2.read())

    def test_config_file_with_override(self):
        """Test flags override run-file values"""
        run_file = self.path('run.env')
        with open(run_file, 'w', encoding='utf-8') as f:
            f.write("N=6\nh=0.3\n")
        out = self.path('spec.csv')
        result = self.cli.run(['spectrum', '--config', run_file, '--N', '8', '--out', out])
        self.assertEqual(result, 0)
        metadata = read_metadata(out)
        self.assertEqual(metadata['N'], '8')
        self.assertEqual(metadata['h'], '0.3')

    def test_missing_config_file(self):
        """Test a missing run file is an input error"""
        result = self.cli.run(['spectrum', '--config', self.path('nope.env')])
        self.assertEqual(result, 1)

    def test_odd_chain(self):
        """Test odd N is rejected"""
        result = self.cli.run(['spectrum', '--N', '7', '--out', self.path('odd.csv')])
        self.assertEqual(result, 1)
        self.assertFalse(os.path.exists(self.path('odd.csv')))

    @patch('src.gammachain.operations.SweepOperations.spectrum_table')
    def test_numeric_failure(self, mock_spectrum):
        """Test numeric errors map to exit code 2"""
        mock_spectrum.side_effect = NumericError("eigensolver failed")
        result = self.cli.run(['spectrum', '--N', '8'])
        self.assertEqual(result, 2)

    def test_phase_diagram_command(self):
        """Test a small phase-diagram grid"""
        out = self.path('phase.csv')
        result = self.cli.run([
            'phase-diagram', '--alpha-range', '-0.5:0.5:3', '--h-range', '0.5:1.5:3', '--out', out
        ])
        self.assertEqual(result, 0)
        df = read_result_csv(out)
        self.assertEqual(len(df), 9)
        self.assertIn('Spiral_III', set(df['phase']))
        self.assertIn('AFM_I', set(df['phase']))

    def test_dimer_and_chiral_commands(self):
        """Test dimer and chiral tables"""
        result = self.cli.run(['dimer', '--N', '40', '--r', '1:5', '--out', self.path('d.csv')])
        self.assertEqual(result, 0)
        self.assertEqual(len(read_result_csv(self.path('d.csv'))), 5)

        result = self.cli.run([
            'chiral', '--N', '40', '--r', '2', '--h-range', '0:1:3', '--out', self.path('c.csv')
        ])
        self.assertEqual(result, 0)
        self.assertEqual(len(read_result_csv(self.path('c.csv'))), 3)

    def test_sqc_command(self):
        """Test steered coherence table"""
        out = self.path('sqc.csv')
        result = self.cli.run(['sqc', '--N', '40', '--r', '1,2', '--h-range', '0.2:0.6:3', '--out', out])
        self.assertEqual(result, 0)
        df = read_result_csv(out)
        self.assertEqual(len(df), 6)
        self.assertTrue((df['sqc'] >= 0).all())

    def test_critical_command(self):
        """Test critical command"""
        result = self.cli.run(['critical', '--alpha', '-0.5'])
        self.assertEqual(result, 0)

    def test_oracle_check_command(self):
        """Test the exact-diagonalization comparison"""
        out = self.path('oracle.csv')
        result = self.cli.run(['oracle-check', '--n', '8', '--draws', '3', '--out', out])
        self.assertEqual(result, 0)
        self.assertTrue(os.path.exists(out))

    def test_couplings_command(self):
        """Test couplings from an atom-light JSON file"""
        data = {
            "delta1": 100.0,
            "delta2": 100.0,
            "sites": [{"omega1": 1.0, "omega2": 1.0}] * 4,
            "modes": [{"detuning": 5.0, "coupling": [1.0, 1.0, 1.0, 1.0]}],
        }
        path = self.path('atoms.json')
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(data, f)
        out = self.path('couplings.csv')
        result = self.cli.run(['couplings', '--input', path, '--out', out])
        self.assertEqual(result, 0)
        self.assertEqual(len(read_result_csv(out)), 12)

    def test_couplings_fields_in_header(self):
        """Test the per-site longitudinal fields are written with the table"""
        data = {
            "delta1": 100.0,
            "delta2": 100.0,
            "sites": [{"omega1": 2.0, "omega2": 1.0}] * 4,
            "modes": [{"detuning": 5.0, "coupling": [1.0, 1.0, 1.0, 1.0]}],
        }
        path = self.path('atoms.json')
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(data, f)
        out = self.path('couplings.csv')
        result = self.cli.run(['couplings', '--input', path, '--out', out])
        self.assertEqual(result, 0)

        metadata = read_metadata(out)
        for site in range(4):
            self.assertAlmostEqual(float(metadata[f'hz_{site}']), 0.03, places=12)

    def test_couplings_missing_input(self):
        """Test a missing couplings file"""
        result = self.cli.run(['couplings', '--input', self.path('missing.json')])
        self.assertEqual(result, 1)


if __name__ == '__main__':
    unittest.main()
