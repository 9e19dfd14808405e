"""
Tests for configuration and result files
"""

import json
import os
import shutil
import tempfile
import unittest
from unittest.mock import patch

import numpy as np
import pandas as pd

from src.gammachain.config import Config, load_run_file
from src.gammachain.errors import InvalidParameterError
from src.gammachain.output import ResultWriter, read_metadata, read_result_csv


class TestConfig(unittest.TestCase):
    """Test configuration loading"""

    def test_defaults(self):
        """Test default values"""
        config = Config()
        self.assertEqual(config.OUTPUT_FORMAT, 'csv')
        self.assertEqual(config.THREADS, 1)
        self.assertEqual(config.SCALING_SIZES[0], 200)
        self.assertEqual(config.SCALING_SIZES[-1], 2000)

    @patch.dict(os.environ, {'GAMMACHAIN_OUTPUT_DIR': '/tmp/gc', 'GAMMACHAIN_THREADS': '4',
                             'GAMMACHAIN_LARGE_N': '5000'})
    def test_from_env(self):
        """Test environment overrides"""
        config = Config.from_env()
        self.assertEqual(config.OUTPUT_DIR, '/tmp/gc')
        self.assertEqual(config.THREADS, 4)
        self.assertEqual(config.LARGE_N, 5000)
        self.assertEqual(config.get_output_path('a.csv'), os.path.join('/tmp/gc', 'a.csv'))

    @patch.dict(os.environ, {'GAMMACHAIN_THREADS': '0'})
    def test_threads_floor(self):
        """Test THREADS is at least one"""
        self.assertEqual(Config.from_env().THREADS, 1)

    def test_run_file(self):
        """Test key=value run files"""
        temp_dir = tempfile.mkdtemp()
        try:
            path = os.path.join(temp_dir, 'run.env')
            with open(path, 'w', encoding='utf-8') as f:
                f.write("# sweep near CP1\nalpha=0.25\nN=400\n")
            self.assertEqual(load_run_file(path), {'alpha': '0.25', 'N': '400'})
            with self.assertRaises(FileNotFoundError):
                load_run_file(os.path.join(temp_dir, 'missing.env'))
        finally:
            shutil.rmtree(temp_dir)


class TestResultWriter(unittest.TestCase):
    """Test CSV and JSON result files"""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.config = Config()
        self.config.OUTPUT_DIR = os.path.join(self.temp_dir, 'results')
        self.writer = ResultWriter(self.config)
        self.df = pd.DataFrame({'r': [1, 2], 'value': [0.1, np.float64(1.0) / 3.0]})

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_csv_header_and_precision(self):
        """Test the header lines and full float precision"""
        path = self.writer.write(self.df, 'table', {'N': 40, 'h': 0.5})
        self.assertEqual(path, os.path.join(self.config.OUTPUT_DIR, 'table.csv'))
        self.assertEqual(read_metadata(path), {'N': '40', 'h': '0.5'})
        back = read_result_csv(path)
        self.assertEqual(back['value'].iloc[1], 1.0 / 3.0)

    def test_json_document(self):
        """Test the JSON layout"""
        path = self.writer.write(self.df, 'table', {'N': np.int64(40)}, fmt='json')
        with open(path, 'r', encoding='utf-8') as f:
            document = json.load(f)
        self.assertEqual(document['metadata'], {'N': 40})
        self.assertEqual(document['columns'], ['r', 'value'])
        self.assertEqual(document['rows'][0], [1, 0.1])

    def test_explicit_path(self):
        """Test --out paths are used verbatim"""
        out = os.path.join(self.temp_dir, 'nested', 'x.csv')
        self.assertEqual(self.writer.write(self.df, 'table', {}, out=out), out)
        self.assertTrue(os.path.exists(out))

    def test_bad_format(self):
        """Test unknown formats raise"""
        with self.assertRaises(InvalidParameterError):
            self.writer.write(self.df, 'table', {}, fmt='xlsx')


if __name__ == '__main__':
    unittest.main()
