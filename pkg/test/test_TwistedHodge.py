import csv
import os
import shutil
import tempfile
import unittest

import numpy as np
import scipy.sparse

from equivarlab.liealg import LieGroup, cartan_project
from equivarlab.meshcover import build_circle, build_torus, build_genus2
from equivarlab import repvar
from equivarlab.repvar import Representation, Cocycle, coboundary
from equivarlab.harmonicflow import EquivariantMap
from equivarlab.twistedhodge import (HodgeComplex, DeflatedSolver, TwistedCochain, bracket_wedge, contract_star, harmonic_rep,
	primitive, hodge_decompose, maurer_cartan_residual)

E = np.array([[0.0, 1.0], [0.0, 0.0]])
H = np.diag([1.0, -1.0])

def trivial_torus(mesh, group=None):
	group = group or LieGroup(2, 'R')
	return Representation.for_mesh(mesh, group, [group.identity(), group.identity()])

def random_cochain(hodge, degree, rng):
	return hodge.unvec(rng.standard_normal(hodge.cells(degree) * hodge.dim), degree)

def linear_cstar_map(mesh, rho, z1, z2):
	values = [[[np.exp(2.0 * (z1.real * x + z2.real * y))]] for (x, y) in mesh.coords]
	return EquivariantMap(mesh, rho, values)

class DifferentialTest(unittest.TestCase):
	def test_dSquaredShouldVanishOnTheTorus(self):
		mesh = build_torus(3, 4)
		rho = Representation.for_mesh(mesh, LieGroup(2, 'C'), [repvar.diagonal_sl2(0.4 + 0.1j), repvar.diagonal_sl2(-0.3)])

		hodge = HodgeComplex(mesh, rho)

		self.assertLess(abs(hodge.d1 @ hodge.d0).max(), 1e-12)

	def test_dSquaredShouldVanishOnTheOctagon(self):
		mesh = build_genus2(1)
		rho = repvar.fuchsian_genus2()

		hodge = HodgeComplex(mesh, rho)

		self.assertLess(abs(hodge.d1 @ hodge.d0).max(), 1e-8)

	def test_dOfConstantShouldVanishForTrivialRep(self):
		mesh = build_torus(3, 3)
		hodge = HodgeComplex(mesh, trivial_torus(mesh))

		dF = hodge.d(hodge.constant(E))

		self.assertLess(dF.sup(), 1e-15)

	def test_dShouldTransportAcrossLabeledEdges(self):
		# Given
		mesh = build_circle(4)
		g = np.diag([2.0, 0.5])
		hodge = HodgeComplex(mesh, Representation.for_mesh(mesh, LieGroup(2, 'R'), [g]))

		# When
		dF = hodge.d(hodge.constant(E))

		# Then
		np.testing.assert_allclose(dF.values[3], 4.0 * E - E, atol=1e-12)
		self.assertLess(np.abs(dF.values[:3]).max(), 1e-15)

	def test_codiffShouldBeTheAdjointOfD(self):
		# Given
		rng = np.random.default_rng(51)
		mesh = build_torus(3, 3)
		rho = Representation.for_mesh(mesh, LieGroup(2, 'R'), [np.diag([2.0, 0.5]), np.eye(2)])
		hodge = HodgeComplex(mesh, rho, EquivariantMap.random(mesh, rho, rng))
		F = random_cochain(hodge, 0, rng)
		alpha = random_cochain(hodge, 1, rng)
		mu = random_cochain(hodge, 2, rng)

		# Then
		lhs = hodge.inner(hodge.d(F), alpha)
		self.assertLess(abs(lhs - hodge.inner(F, hodge.codiff(alpha))), 1e-10 * max(1.0, abs(lhs)))
		lhs = hodge.inner(hodge.d(alpha), mu)
		self.assertLess(abs(lhs - hodge.inner(alpha, hodge.codiff(mu))), 1e-10 * max(1.0, abs(lhs)))

	def test_codiffShouldBeTheGraphDivergenceForTrivialRep(self):
		# Given
		rng = np.random.default_rng(52)
		mesh = build_circle(5)
		hodge = HodgeComplex(mesh, Representation.for_mesh(mesh, LieGroup(2, 'R'), [np.eye(2)]))
		alpha = random_cochain(hodge, 1, rng)

		# When
		div = hodge.codiff(alpha)

		# Then
		for v in range(5):
			incoming = alpha.values[(v - 1) % 5]
			outgoing = alpha.values[v]
			np.testing.assert_allclose(div.values[v], (mesh.w1[v] / mesh.w0[v]) * (incoming - outgoing), atol=1e-10)

	def test_codiffShouldRejectSections(self):
		mesh = build_circle(4)
		hodge = HodgeComplex(mesh, Representation.for_mesh(mesh, LieGroup(2, 'R'), [np.eye(2)]))

		self.assertRaises(ValueError, hodge.codiff, hodge.zero(0))
		self.assertRaises(ValueError, hodge.d, hodge.zero(2))

class JacobiTest(unittest.TestCase):
	def test_jacobiShouldBePositiveSemidefinite(self):
		mesh = build_torus(3, 3)
		rho = Representation.for_mesh(mesh, LieGroup(2, 'R'), [np.diag([2.0, 0.5]), np.eye(2)])
		hodge = HodgeComplex(mesh, rho, EquivariantMap.random(mesh, rho, np.random.default_rng(53)))

		lam, V = hodge.spectrum()

		self.assertGreaterEqual(lam.min(), -1e-10 * lam.max())

	def test_jacobiOfConstantShouldVanishForTrivialRep(self):
		mesh = build_torus(3, 3)
		hodge = HodgeComplex(mesh, trivial_torus(mesh))

		self.assertLess(hodge.jacobi(hodge.constant(H)).sup(), 1e-12)
		self.assertRaises(ValueError, hodge.jacobi, hodge.zero(1))

	def test_kernelShouldBeTheCentralizer(self):
		mesh = build_torus(3, 3)
		diagonal = Representation.for_mesh(mesh, LieGroup(2, 'C'),
			[repvar.diagonal_sl2(0.5), repvar.diagonal_sl2(0.3j)])

		self.assertEqual(HodgeComplex(mesh, diagonal).kernel_dim(), 2)
		self.assertEqual(HodgeComplex(mesh, trivial_torus(mesh)).kernel_dim(), 3)
		self.assertEqual(HodgeComplex(build_genus2(1), repvar.fuchsian_genus2()).kernel_dim(), 0)

	def test_kernelShouldSplitIntoCartanParts(self):
		# Given
		mesh = build_torus(3, 3)
		rho = Representation.for_mesh(mesh, LieGroup(2, 'C'), [repvar.diagonal_sl2(0.5), repvar.diagonal_sl2(0.3j)])
		f = EquivariantMap(mesh, rho, [np.diag([np.exp(x), np.exp(-x)]) for (x, y) in mesh.coords])
		hodge = HodgeComplex(mesh, rho, f)

		# When
		kernel = hodge.kernel_basis()

		# Then
		self.assertEqual(len(kernel), 2)
		for xi in kernel:
			Xk, Xp = cartan_project(f.values, xi.values)
			self.assertLess(hodge.jacobi(TwistedCochain(0, Xk)).sup(), 1e-8)
			self.assertLess(hodge.jacobi(TwistedCochain(0, Xp)).sup(), 1e-8)

	def test_solveJacobiShouldInvertOffTheKernel(self):
		# Given
		rng = np.random.default_rng(54)
		mesh = build_torus(3, 3)
		hodge = HodgeComplex(mesh, trivial_torus(mesh))
		r = random_cochain(hodge, 0, rng)

		# When
		eta = hodge.solve_jacobi(r)

		# Then
		residual = hodge.jacobi(eta) - (r - hodge.project_kernel(r))
		self.assertLess(residual.sup(), 1e-9)
		self.assertLess(hodge.project_kernel(eta).sup(), 1e-9)
		for xi in hodge.kernel_basis():
			self.assertLess(hodge.d(xi).sup(), 1e-9)

	def test_sparseSolveShouldMatchTheDenseSpectrum(self):
		# Given
		rng = np.random.default_rng(55)
		mesh = build_torus(6, 5)
		rho = Representation.for_mesh(mesh, LieGroup(2, 'C'), [repvar.diagonal_sl2(0.4 + 0.1j), repvar.diagonal_sl2(-0.3)])
		hodge = HodgeComplex(mesh, rho)
		r = random_cochain(hodge, 0, rng)
		lam, V = hodge.spectrum()
		keep = ~hodge._split(lam)

		# When
		eta = hodge.solve_jacobi(r)

		# Then
		x = V[:, keep] @ ((V[:, keep].T @ (hodge.G[0] @ hodge.vec(r))) / lam[keep])
		np.testing.assert_allclose(hodge.vec(eta), x, atol=1e-8)
		self.assertEqual(hodge.kernel_dim(), int(np.count_nonzero(~keep)))

	def test_deflatedSolverShouldHandleADefiniteOperator(self):
		# Given
		rng = np.random.default_rng(56)
		hodge = HodgeComplex(build_genus2(1), repvar.fuchsian_genus2())
		r = random_cochain(hodge, 0, rng)

		# When
		eta = hodge.solve_jacobi(r)

		# Then
		self.assertEqual(hodge.kernel_dim(), 0)
		self.assertLess((hodge.jacobi(eta) - r).sup(), 1e-8)

	def test_deflatedSolverShouldFindAKernelLargerThanAsked(self):
		# Given: two isolated vertices next to a 4-cycle
		K = np.zeros((6, 6))
		K[2:, 2:] = np.array([[2.0, -1.0, 0.0, -1.0], [-1.0, 2.0, -1.0, 0.0], [0.0, -1.0, 2.0, -1.0],
			[-1.0, 0.0, -1.0, 2.0]])
		K = scipy.sparse.csr_matrix(K)
		M = scipy.sparse.identity(6, format='csr')

		# When
		solver = DeflatedSolver(K, M, 0)

		# Then
		self.assertEqual(solver.kernel_dim, 3)
		r = np.arange(6.0)
		x = solver.solve(r)
		np.testing.assert_allclose(K @ x, r - solver.project(r), atol=1e-9)

	def test_spectrumShouldExportAsCsv(self):
		mesh = build_circle(4)
		hodge = HodgeComplex(mesh, Representation.for_mesh(mesh, LieGroup(2, 'R'), [np.diag([2.0, 0.5])]))
		tmp = tempfile.mkdtemp()
		try:
			path = os.path.join(tmp, 'spectrum.csv')
			hodge.export_spectrum(path)
			with open(path) as f:
				rows = list(csv.reader(f))
		finally:
			shutil.rmtree(tmp)

		self.assertEqual(rows[0], ['index', 'eigenvalue', 'kernel'])
		self.assertEqual(len(rows), 1 + 4 * 3)
		self.assertEqual(sum(int(r[2]) for r in rows[1:]), hodge.kernel_dim())

class HarmonicFormTest(unittest.TestCase):
	def test_coboundaryShouldHaveZeroHarmonicForm(self):
		mesh = build_genus2(1)
		rho = repvar.fuchsian_genus2()
		hodge = HodgeComplex(mesh, rho)
		xi = rho.group.random_algebra(np.random.default_rng(55))

		omega = harmonic_rep(hodge, coboundary(rho, xi))

		self.assertLess(hodge.norm(omega), 1e-9)

	def test_constantClassOnTheFlatTorusShouldBeUniform(self):
		# Given
		mesh = build_torus(4, 3)
		hodge = HodgeComplex(mesh, trivial_torus(mesh))
		c = Cocycle([E, np.zeros((2, 2))])

		# When
		omega = harmonic_rep(hodge, c)

		# Then
		horizontal = mesh.n_vertices
		np.testing.assert_allclose(omega.values[:horizontal], np.repeat((E / 4.0)[None], horizontal, axis=0), atol=1e-9)
		self.assertLess(np.abs(omega.values[horizontal:]).max(), 1e-9)

	def test_harmonicFormShouldBeClosedAndCoclosed(self):
		mesh = build_genus2(1)
		rho = repvar.fuchsian_genus2()
		hodge = HodgeComplex(mesh, rho)
		c = repvar.cocycle_basis(rho)[0]

		omega = harmonic_rep(hodge, c)

		self.assertLess(hodge.d(omega).sup(), 1e-9)
		self.assertLess(hodge.codiff(omega).sup(), 1e-9)

	def test_harmonicFormShouldMinimizeTheNorm(self):
		# Given
		rng = np.random.default_rng(56)
		mesh = build_torus(3, 3)
		rho = Representation.for_mesh(mesh, LieGroup(2, 'R'), [np.diag([2.0, 0.5]), np.eye(2)])
		hodge = HodgeComplex(mesh, rho, EquivariantMap.random(mesh, rho, rng))
		omega = harmonic_rep(hodge, Cocycle([H, H]))

		# Then
		for i in range(5):
			xi = random_cochain(hodge, 0, rng)
			self.assertLessEqual(hodge.norm(omega), hodge.norm(omega + hodge.d(xi)) + 1e-12)

	def test_primitiveShouldIntegrateTheHarmonicForm(self):
		# Given
		mesh = build_circle(6)
		rho = Representation.for_mesh(mesh, LieGroup(2, 'R'), [np.diag([2.0, 0.5])])
		hodge = HodgeComplex(mesh, rho)
		c = Cocycle([0.3 * H])
		omega = harmonic_rep(hodge, c)

		# When
		F = primitive(hodge, omega, c)

		# Then
		self.assertLess(F.defect, 1e-9)
		self.assertLess(F.residual(omega), 1e-9)
		np.testing.assert_allclose(F.at(0, (1,)), F.values.values[0] + 0.3 * H, atol=1e-12)
		steps = np.diff(F.values.values[:, 0, 0])
		np.testing.assert_allclose(steps, steps[0], atol=1e-9)

	def test_primitivesShouldDifferByTheKernel(self):
		# Given
		mesh = build_torus(3, 3)
		hodge = HodgeComplex(mesh, trivial_torus(mesh))
		c = Cocycle([E, H])
		omega = harmonic_rep(hodge, c)
		shift = hodge.constant(E + H)

		# When
		F1 = primitive(hodge, omega, c)
		F2 = primitive(hodge, omega, c, base=shift)

		# Then
		self.assertLess(F2.residual(omega), 1e-9)
		difference = F2.values - F1.values
		self.assertLess((hodge.project_kernel(difference) - difference).sup(), 1e-9)

	def test_primitiveShouldReportAClassMismatch(self):
		mesh = build_torus(3, 3)
		hodge = HodgeComplex(mesh, trivial_torus(mesh))
		omega = harmonic_rep(hodge, Cocycle([E, np.zeros((2, 2))]))

		F = primitive(hodge, omega, Cocycle([np.zeros((2, 2)), E]))

		self.assertGreater(F.defect, 1e-3)

class BracketTest(unittest.TestCase):
	def test_bracketsShouldVanishForAbelianGroups(self):
		rng = np.random.default_rng(57)
		mesh = build_torus(3, 3)
		rho = repvar.cstar_torus(0.2, 0.1j)
		hodge = HodgeComplex(mesh, rho)
		a, b = random_cochain(hodge, 1, rng), random_cochain(hodge, 1, rng)

		self.assertEqual(bracket_wedge(hodge, a, b).sup(), 0.0)
		self.assertEqual(contract_star(hodge, a, b).sup(), 0.0)

	def test_cartanValuedFormShouldHaveZeroWedge(self):
		mesh = build_torus(3, 3)
		rho = Representation.for_mesh(mesh, LieGroup(2, 'C'), [repvar.diagonal_sl2(0.5), repvar.diagonal_sl2(0.2)])
		hodge = HodgeComplex(mesh, rho)

		omega = harmonic_rep(hodge, Cocycle([H, 2.0j * H]))

		self.assertLess(bracket_wedge(hodge, omega, omega).sup(), 1e-12)

	def test_contractStarShouldBeTheAdjointOfTheBracket(self):
		# Given
		rng = np.random.default_rng(58)
		mesh = build_torus(3, 3)
		rho = trivial_torus(mesh)
		hodge = HodgeComplex(mesh, rho, EquivariantMap.random(mesh, rho, rng))
		omega, alpha = random_cochain(hodge, 1, rng), random_cochain(hodge, 1, rng)
		xi = random_cochain(hodge, 0, rng)

		# When
		lhs = hodge.inner(hodge.edge_bracket(omega, xi), alpha)
		rhs = hodge.inner(xi, contract_star(hodge, omega, alpha))

		# Then
		self.assertLess(abs(lhs - rhs), 1e-9 * max(1.0, abs(lhs)))

	def test_contractStarShouldCountEachEdgeAtItsSource(self):
		# Given: omega and alpha on a single edge
		rng = np.random.default_rng(61)
		mesh = build_torus(3, 3)
		rho = trivial_torus(mesh)
		hodge = HodgeComplex(mesh, rho, EquivariantMap.random(mesh, rho, rng))
		e = next(i for i, (u, v, w) in enumerate(mesh.edges) if u != v)
		u, v, w = mesh.edges[e]
		omega, alpha = hodge.zero(1), hodge.zero(1)
		omega.values[e] = H + 0.5 * E
		alpha.values[e] = E.T

		# When
		C = contract_star(hodge, omega, alpha)

		# Then
		self.assertGreater(np.abs(C.values[u]).max(), 1e-3)
		others = [i for i in range(mesh.n_vertices) if i != u]
		self.assertEqual(np.abs(C.values[others]).max(), 0.0)

	def test_contractStarOfObstructedClassShouldPointAlongTheCartan(self):
		# Given
		mesh = build_torus(3, 3)
		hodge = HodgeComplex(mesh, trivial_torus(mesh))
		omega = harmonic_rep(hodge, Cocycle([E, np.zeros((2, 2))]))

		# When
		C = contract_star(hodge, omega, omega)

		# Then
		for X in C.values:
			np.testing.assert_allclose(X / np.linalg.norm(X), -H / np.sqrt(2.0), atol=1e-9)

	def test_wedgeOfExactFormShouldBeMinusDOfTheEdgeBracket(self):
		rng = np.random.default_rng(59)
		mesh = build_torus(3, 3)
		rho = Representation.for_mesh(mesh, LieGroup(2, 'R'), [np.diag([2.0, 0.5]), np.eye(2)])
		hodge = HodgeComplex(mesh, rho)
		F = random_cochain(hodge, 0, rng)
		dF = hodge.d(F)

		residual = bracket_wedge(hodge, dF, dF) + hodge.d(hodge.edge_bracket(dF, F))

		self.assertLess(residual.sup(), 1e-9)

class DecompositionTest(unittest.TestCase):
	def test_hodgeDecompositionShouldReconstruct(self):
		# Given
		rng = np.random.default_rng(60)
		mesh = build_torus(3, 3)
		rho = Representation.for_mesh(mesh, LieGroup(2, 'R'), [np.diag([2.0, 0.5]), np.eye(2)])
		hodge = HodgeComplex(mesh, rho, EquivariantMap.random(mesh, rho, rng))
		alpha = random_cochain(hodge, 1, rng)

		# When
		parts = hodge_decompose(hodge, alpha)

		# Then
		self.assertLess((parts.reconstruct() - alpha).sup(), 1e-9)
		self.assertLess(hodge.d(parts.harmonic).sup(), 1e-8)
		self.assertLess(hodge.codiff(parts.harmonic).sup(), 1e-8)
		self.assertLess(abs(hodge.inner(parts.exact, parts.coexact)), 1e-8)
		self.assertRaises(ValueError, hodge_decompose, hodge, hodge.zero(0))

	def test_linearMapShouldSolveMaurerCartan(self):
		mesh = build_torus(4, 3)
		z1, z2 = 0.3 + 0.5j, -0.7
		rho = repvar.cstar_torus(z1, z2)
		f = linear_cstar_map(mesh, rho, z1, z2)

		r, norm = maurer_cartan_residual(HodgeComplex(mesh, rho, f))

		self.assertLess(norm, 1e-12)
		self.assertLess(f.tension_norm(), 1e-9)

	def test_cochainShouldRejectMixedDegrees(self):
		a = TwistedCochain(0, np.zeros((2, 2, 2)))
		b = TwistedCochain(1, np.zeros((2, 2, 2)))

		self.assertRaises(ValueError, a.__add__, b)
		self.assertRaises(ValueError, TwistedCochain, 3, np.zeros((1, 2, 2)))
		self.assertEqual(TwistedCochain.from_json(b.to_json()).degree, 1)
