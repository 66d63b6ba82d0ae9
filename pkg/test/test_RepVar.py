import unittest

import numpy as np
import scipy.linalg

from equivarlab.liealg import LieGroup
from equivarlab.meshcover import build_torus
from equivarlab import repvar
from equivarlab.repvar import (Representation, Cocycle, ExponentialPath, ConjugationPath, eval_cocycle, eval_jet2,
	coboundary, validate, cocycle_basis, path_jets)

E = np.array([[0.0, 1.0], [0.0, 0.0]])
F = E.T
H = np.diag([1.0, -1.0])

def second_jet_by_differences(path, t=1e-3):
	"""(L(t) + L(-t)) / t^2 with L(t) = log(rho_t rho_0^-1), per generator."""
	base = path.at(0.0)
	out = []
	for i in range(len(base.images)):
		g0inv = np.linalg.inv(base.images[i])
		plus = scipy.linalg.logm(path.at(t).images[i] @ g0inv)
		minus = scipy.linalg.logm(path.at(-t).images[i] @ g0inv)
		out.append((plus + minus) / (t * t))
	return out

class RepresentationTest(unittest.TestCase):
	def test_shouldRejectImagesOutsideTheGroup(self):
		group = LieGroup(2, 'R')

		self.assertRaises(ValueError, Representation, group, ['a'], [np.diag([2.0, 1.0])])
		self.assertRaises(ValueError, Representation, group, ['a', 'b'], [np.eye(2)])

	def test_diagonalTorusShouldSatisfyItsRelator(self):
		rho = repvar.diagonal_torus(0.5 + 0.2j, -0.3)

		np.testing.assert_allclose(rho.eval_word((1, 2, -1, -2)), np.eye(2), atol=1e-12)
		self.assertTrue(validate(rho).passed())

	def test_fuchsianGeneratorsShouldSatisfyTheOctagonRelator(self):
		# When
		rho = repvar.fuchsian_genus2()

		# Then
		report = validate(rho)
		self.assertTrue(report.passed())
		self.assertLess(max(report.levels['representation']), 1e-8)
		for g in rho.images:
			self.assertFalse(np.iscomplexobj(g))
			self.assertAlmostEqual(np.linalg.det(g), 1.0, places=9)
			# hyperbolic generators
			self.assertGreater(abs(np.trace(g)), 2.0)

	def test_conjugateShouldStayARepresentation(self):
		rho = repvar.fuchsian_genus2()
		h = np.array([[1.0, 2.0], [0.0, 1.0]])

		self.assertTrue(validate(rho.conjugate(h)).passed())

	def test_representationShouldSurviveJson(self):
		rho = repvar.bending_genus2().base

		loaded = Representation.from_json(rho.to_json())

		self.assertEqual(loaded.group, rho.group)
		self.assertEqual(loaded.relators, rho.relators)
		for a, b in zip(loaded.images, rho.images):
			np.testing.assert_allclose(a, b)

	def test_malformedJsonShouldRaiseValueError(self):
		self.assertRaises(ValueError, Representation.from_json, {'group': 'SL2R'})

class CocycleTest(unittest.TestCase):
	def test_emptyWordShouldEvaluateToZero(self):
		rho = repvar.hyperbolic_circle()

		np.testing.assert_allclose(eval_cocycle(Cocycle([H]), rho, ()), np.zeros((2, 2)))

	def test_cocycleShouldExtendToInverses(self):
		# Given
		rho = repvar.hyperbolic_circle()
		c = Cocycle([E])

		# When
		value = eval_cocycle(c, rho, (1, -1))

		# Then
		np.testing.assert_allclose(value, np.zeros((2, 2)), atol=1e-12)
		np.testing.assert_allclose(eval_cocycle(c, rho, (1, 1)), E + 4.0 * E)

	def test_coboundaryShouldPassValidation(self):
		rng = np.random.default_rng(21)
		rho = repvar.fuchsian_genus2()
		xi = rho.group.random_algebra(rng)

		report = validate(rho, coboundary(rho, xi))

		self.assertTrue(report.passed('cocycle'))
		self.assertEqual(report.failing(), [])

	def test_diagonalCocycleShouldPassOnDiagonalTorus(self):
		rho = repvar.diagonal_torus(0.4, 0.1j)
		c = Cocycle([0.3 * H, (1.0 - 2.0j) * H])

		report = validate(rho, c, [np.zeros((2, 2))] * 2)

		self.assertTrue(report.passed())

	def test_validationShouldReportTheFailingLevel(self):
		# Given
		rho = repvar.trivial(LieGroup(2, 'R'), ['a', 'b'], [(1, 2, -1, -2)])
		c = Cocycle([E, F])

		# When
		report = validate(rho, c, [np.zeros((2, 2))] * 2)

		# Then
		self.assertTrue(report.passed('representation'))
		self.assertTrue(report.passed('cocycle'))
		self.assertFalse(report.passed('jet2'))
		self.assertEqual(report.failing(), ['jet2'])

	def test_zeroJetsShouldAlwaysPass(self):
		rho = repvar.fuchsian_genus2()
		zero = [np.zeros((2, 2))] * 4

		self.assertTrue(validate(rho, Cocycle(zero), zero).passed())

	def test_jetOfRelatorShouldBeNeutralForConsistentJets(self):
		path = repvar.bending_genus2()
		c, k = path.jets()

		self.assertLess(eval_jet2(path.base, c, k, path.base.relators[0]).residual(), 1e-8)

	def test_cocycleBasisShouldHaveExpectedDimensions(self):
		trivial_torus = repvar.trivial(LieGroup(2, 'R'), ['a', 'b'], [(1, 2, -1, -2)])

		self.assertEqual(len(cocycle_basis(repvar.hyperbolic_circle())), 3)
		self.assertEqual(len(cocycle_basis(trivial_torus)), 6)
		self.assertEqual(len(cocycle_basis(repvar.fuchsian_genus2())), 9)

	def test_cocycleBasisElementsShouldValidate(self):
		rho = repvar.fuchsian_genus2()

		for c in cocycle_basis(rho):
			self.assertTrue(validate(rho, c).passed())

class RepPathTest(unittest.TestCase):
	def test_axisPathShouldDifferentiateToTheAxis(self):
		path = ExponentialPath(LieGroup(2, 'R'), ['a'], [], [0.5 * H], [H])

		c, k = path_jets(path)

		np.testing.assert_allclose(c.values[0], H)
		np.testing.assert_allclose(k[0], np.zeros((2, 2)))

	def test_exponentialPathShouldRejectNonCommutingExponents(self):
		self.assertRaises(ValueError, ExponentialPath, LieGroup(2, 'R'), ['a'], [], [E], [F])

	def test_constantPathShouldHaveZeroJets(self):
		rho = repvar.fuchsian_genus2()

		c, k = ConjugationPath(rho, np.zeros((2, 2))).jets()

		self.assertEqual(max(np.abs(x).max() for x in c.values), 0.0)
		self.assertEqual(max(np.abs(x).max() for x in k), 0.0)

	def test_conjugationPathShouldGiveACoboundary(self):
		# Given
		rho = repvar.fuchsian_genus2()
		xi = rho.group.random_algebra(np.random.default_rng(22))

		# When
		c, k = path_jets(ConjugationPath(rho, xi))

		# Then
		for a, b in zip(c.values, coboundary(rho, xi).values):
			np.testing.assert_allclose(a, b, atol=1e-12)

	def test_conjugationJetsShouldMatchFiniteDifferences(self):
		# Given
		rho = repvar.fuchsian_genus2()
		path = ConjugationPath(rho, 0.3 * H + 0.2 * E, moved=[0, 1])

		# When
		c, k = path.jets()
		fd = second_jet_by_differences(path)

		# Then
		for a, b in zip(k, fd):
			np.testing.assert_allclose(b, a, atol=1e-4)

	def test_bendingPathShouldStayOnTheRelator(self):
		path = repvar.bending_genus2()

		for t in (-0.2, 0.1, 0.4):
			self.assertTrue(validate(path.at(t)).passed())
		c, k = path_jets(path)
		self.assertEqual(path.base.group, LieGroup(2, 'C'))
		self.assertEqual(np.abs(c.values[0]).max(), 0.0)
		self.assertGreater(np.abs(c.values[2]).max(), 0.0)

	def test_pathOnTorusShouldMatchMeshGenerators(self):
		mesh = build_torus(3, 3)
		path = ExponentialPath(LieGroup(2, 'C'), mesh.generators, mesh.relators, [0.5 * H, 0.2j * H], [H, H])

		self.assertEqual(path.base.generators, mesh.generators)
		self.assertTrue(validate(path.at(0.3)).passed())
