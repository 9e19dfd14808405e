"""
Tests for cavity-mediated couplings and their reduction to chain parameters
"""

import json
import os
import shutil
import tempfile
import unittest
import warnings

import numpy as np

from src.gammachain.couplings import (
    AtomLightParams,
    CavityMode,
    chain_params_from_couplings,
    coupling_summary,
    dissipative_residual,
    lambda_kernels,
    model_to_couplings,
    spin_couplings,
    tilde_detuning,
)
from src.gammachain.errors import InvalidParameterError, NearResonanceError, NotReducibleError
from src.gammachain.model import ModelParams


def two_site_params(kappa=0.0, detuning=5.0):
    return AtomLightParams(
        omega1=[1.0, 1.0],
        omega2=[0.5, 0.5j],
        delta1=100.0,
        delta2=100.0,
        delta=0.4,
        modes=[CavityMode(detuning=detuning, kappa=kappa, coupling=[1.0, 1.0])],
    )


class TestAtomLightParams(unittest.TestCase):
    """Test input validation and loading"""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_far_detuning_required(self):
        """Test small atomic detunings raise"""
        with self.assertRaises(InvalidParameterError):
            AtomLightParams(
                omega1=[1.0, 1.0],
                omega2=[1.0, 1.0],
                delta1=5.0,
                delta2=100.0,
                modes=[CavityMode(detuning=1.0, kappa=0.0, coupling=[1.0, 1.0])],
            )

    def test_shape_checks(self):
        """Test mismatched sites and missing modes raise"""
        with self.assertRaises(InvalidParameterError):
            AtomLightParams(omega1=[1.0, 1.0], omega2=[1.0], delta1=100.0, delta2=100.0,
                            modes=[CavityMode(1.0, 0.0, [1.0, 1.0])])
        with self.assertRaises(InvalidParameterError):
            AtomLightParams(omega1=[1.0, 1.0], omega2=[1.0, 1.0], delta1=100.0, delta2=100.0)
        with self.assertRaises(InvalidParameterError):
            AtomLightParams(omega1=[1.0, 1.0], omega2=[1.0, 1.0], delta1=100.0, delta2=100.0,
                            modes=[CavityMode(1.0, 0.0, [1.0, 1.0, 1.0])])

    def test_from_json(self):
        """Test loading complex amplitudes from JSON"""
        data = {
            "delta1": 100.0,
            "delta2": -120.0,
            "delta": 0.2,
            "sites": [{"omega1": [1.0, 0.0], "omega2": [0.0, 1.0]}] * 3,
            "modes": [{"detuning": 4.0, "kappa": 0.1, "coupling": [[1, 0], [0, 1], [-1, 0]]}],
        }
        path = os.path.join(self.temp_dir, 'atoms.json')
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(data, f)

        p = AtomLightParams.from_json(path)
        self.assertEqual(p.n_sites, 3)
        self.assertEqual(p.omega2[0], 1j)
        self.assertEqual(p.modes[0].coupling[1], 1j)
        self.assertEqual(p.modes[0].kappa, 0.1)

    def test_from_json_errors(self):
        """Test missing files, bad JSON and missing keys raise"""
        with self.assertRaises(InvalidParameterError):
            AtomLightParams.from_json(os.path.join(self.temp_dir, 'missing.json'))
        path = os.path.join(self.temp_dir, 'broken.json')
        with open(path, 'w', encoding='utf-8') as f:
            f.write("{not json")
        with self.assertRaises(InvalidParameterError):
            AtomLightParams.from_json(path)
        with self.assertRaises(InvalidParameterError):
            AtomLightParams.from_dict({"delta1": 100.0})


class TestSpinCouplings(unittest.TestCase):
    """Test exchange kernels and spin couplings"""

    def test_field(self):
        """Test h^z = delta/2 + |O1|^2/D1 - |O2|^2/D2"""
        c = spin_couplings(two_site_params())
        np.testing.assert_allclose(c.hz, 0.2 + 1.0 / 100.0 - 0.25 / 100.0)

    def test_diagonal_is_zero(self):
        """Test no self couplings"""
        c = spin_couplings(two_site_params())
        for matrix in (c.Jx, c.Jy, c.JDM, c.JSO):
            np.testing.assert_array_equal(np.diag(matrix), 0.0)
        self.assertEqual(len(c.to_rows()), 2)

    def test_lossless_kernel_is_hermitian(self):
        """Test zero cavity loss gives a Hermitian exchange kernel"""
        self.assertLess(dissipative_residual(two_site_params()), 1e-15)
        self.assertGreater(dissipative_residual(two_site_params(kappa=1.0)), 0.0)

    def test_kernel_lookup(self):
        """Test kernels for one pair and range checks"""
        p = two_site_params()
        lam0, lam1 = lambda_kernels(p, 0, 1)
        self.assertNotEqual(lam0, 0.0)
        self.assertNotEqual(lam1, 0.0)
        with self.assertRaises(InvalidParameterError):
            lambda_kernels(p, 0, 2)

    def test_near_resonance(self):
        """Test a shifted detuning at zero raises"""
        p = two_site_params(detuning=0.02)
        with self.assertRaises(NearResonanceError):
            tilde_detuning(p, 0)
        with self.assertRaises(NearResonanceError):
            spin_couplings(p)

    def test_real_inputs_have_no_chiral_terms(self):
        """Test real amplitudes give JDM = JSO = 0"""
        p = AtomLightParams(
            omega1=[1.0, 0.5, -1.0],
            omega2=[0.8, 1.0, 0.3],
            delta1=100.0,
            delta2=-90.0,
            modes=[CavityMode(detuning=4.0, kappa=0.0, coupling=[1.0, -0.5, 0.7])],
        )
        c = spin_couplings(p)
        np.testing.assert_array_equal(c.JDM, 0.0)
        np.testing.assert_array_equal(c.JSO, 0.0)

    def test_interfering_modes_suppress_next_neighbour(self):
        """Test four ring modes cancel the distance-two exchange"""
        sites = np.arange(3)
        modes = [
            CavityMode(detuning=d, kappa=0.0, coupling=np.exp(1j * k * sites))
            for k, d in zip((0.0, np.pi / 2, np.pi, 3 * np.pi / 2), (20.0, 30.0, 60.0, 30.0))
        ]
        p = AtomLightParams(
            omega1=[10.0] * 3, omega2=[10.0] * 3, delta1=1000.0, delta2=800.0, modes=modes
        )
        c = spin_couplings(p)
        self.assertLess(abs(c.Jx[0, 2]), 1e-3 * abs(c.Jx[0, 1]))


class TestReduction(unittest.TestCase):
    """Test mapping ring couplings onto chain parameters"""

    def test_round_trip(self):
        """Test model -> couplings -> model"""
        params = ModelParams(J=1.5, gamma=0.3, Gamma=0.7, alpha=-0.4, h=0.8, N=6)
        back = chain_params_from_couplings(model_to_couplings(params))
        for name in ("J", "gamma", "Gamma", "alpha", "h"):
            self.assertAlmostEqual(getattr(back, name), getattr(params, name), places=12)
        self.assertEqual(back.N, 6)

    def test_gamma_is_in_units_of_J(self):
        """Test Gamma is reported relative to J, not as J^DM + J^SO"""
        c = model_to_couplings(ModelParams(J=2.0, Gamma=0.6, alpha=0.5, N=4))
        absolute = c.JDM[0, 1] + c.JSO[0, 1]
        self.assertAlmostEqual(absolute, 1.2, places=12)
        back = chain_params_from_couplings(c)
        self.assertAlmostEqual(back.Gamma, 0.6, places=12)
        self.assertAlmostEqual(back.J * back.Gamma, absolute, places=12)

    def test_pure_antisymmetric_and_symmetric_limits(self):
        """Test alpha = -1 keeps only JDM and alpha = 1 only JSO"""
        dm = model_to_couplings(ModelParams(alpha=-1.0, N=4))
        np.testing.assert_array_equal(dm.JSO, 0.0)
        self.assertAlmostEqual(dm.JDM[0, 1], 0.6)
        so = model_to_couplings(ModelParams(alpha=1.0, N=4))
        np.testing.assert_array_equal(so.JDM, 0.0)
        self.assertAlmostEqual(so.JSO[0, 1], 0.6)
        self.assertAlmostEqual(chain_params_from_couplings(dm).alpha, -1.0)

    def test_non_uniform(self):
        """Test bond-dependent couplings raise"""
        c = model_to_couplings(ModelParams(N=6))
        c.Jx[0, 1] *= 2.0
        with self.assertRaises(NotReducibleError):
            chain_params_from_couplings(c)

    def test_long_range(self):
        """Test couplings beyond the threshold raise"""
        c = model_to_couplings(ModelParams(N=6))
        c.Jx[0, 3] = 0.5
        with self.assertRaises(NotReducibleError):
            chain_params_from_couplings(c)
        c.Jx[0, 3] = 1e-4
        self.assertIsInstance(chain_params_from_couplings(c), ModelParams)

    def test_negative_exchange(self):
        """Test J <= 0 raises"""
        c = model_to_couplings(ModelParams(N=6))
        c.Jx *= -1.0
        c.Jy *= -1.0
        with self.assertRaises(NotReducibleError):
            chain_params_from_couplings(c)

    def test_zero_gamma_warns(self):
        """Test alpha is reported as zero without the off-diagonal term"""
        c = model_to_couplings(ModelParams(Gamma=0.0, N=6))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            params = chain_params_from_couplings(c)
        self.assertEqual(params.alpha, 0.0)
        self.assertTrue(any(issubclass(w.category, RuntimeWarning) for w in caught))

    def test_summary_without_chain(self):
        """Test two sites report a reason instead of a model"""
        summary = coupling_summary(two_site_params())
        self.assertIsNone(summary["model"])
        self.assertIn("three sites", summary["reason"])
        self.assertEqual(summary["couplings"].n_sites, 2)


if __name__ == '__main__':
    unittest.main()
