"""
   First and second order deformations of a harmonic map along a
   deformation of its representation.

   First order: a cocycle c gives the harmonic form omega and a cover
   function F with dF = omega. Second order: a pair (c, k) gives a second
   cover function F2 with dF2 + [omega, F] = psi, where psi solves
   d psi = -[omega, omega] and d* psi = -omega* contract omega. The second
   equation is solvable exactly when omega* contract omega is orthogonal to
   the centralizer algebra h = ker J.
"""

import numpy as np
import scipy.linalg

from .liealg import (ad_action, bracket, cartan_project)
from .repvar import (validate, eval_jet2)
from .twistedhodge import (TwistedCochain, Primitive, harmonic_rep, primitive, bracket_wedge, contract_star)
from .equivarlabutil import (debug, matrix_to_json)

# Relative to ||omega||^2
OBSTRUCTION_TOL = 1e-7

"""
# Raised by solve_psi(strict=True) on an obstructed request.
"""
class ObstructedDeformation(ValueError):
	def __init__(self, obstruction):
		ValueError.__init__(self, 'second order deformation is obstructed, defect ' + str(obstruction.defect))
		self.obstruction = obstruction

"""
# Outcome of the obstruction test. witness is the h-component of
# omega* contract omega, a section of ker J.
"""
class Obstruction(object):
	def __init__(self, defect, threshold, witness, kernel_dim):
		self.defect = defect
		self.threshold = threshold
		self.witness = witness
		self.kernel_dim = kernel_dim

	@property
	def orthogonal(self):
		return self.defect < self.threshold

	def __repr__(self):
		return 'Obstruction(defect=%g, threshold=%g, orthogonal=%s)' % (self.defect, self.threshold, self.orthogonal)

	def witness_direction(self, vertex=0):
		"""The witness at one vertex, scaled to unit Frobenius norm."""
		X = self.witness.values[vertex]
		s = np.linalg.norm(X)
		return X / s if s > 0 else X

	def to_json(self):
		return {
			'defect': self.defect,
			'threshold': self.threshold,
			'orthogonal': self.orthogonal,
			'kernel_dim': self.kernel_dim,
			'witness': matrix_to_json(self.witness_direction()),
		}

class FirstOrderDeformation(object):
	def __init__(self, omega, F, v, residuals):
		self.omega = omega
		self.F = F
		self.v = v
		self.residuals = residuals

def project_jet(P, F, F2=None):
	"""
	Jets of the group at a point P of N pushed to jets of N:
	v = F^[p] and, when F2 is given, w = F2^[p] + [F^[k], F^[p]].
	"""
	Fk, Fp = cartan_project(P, F)
	if F2 is None:
		return Fp
	F2k, F2p = cartan_project(P, F2)
	return Fp, F2p + bracket(Fk, Fp)

def first_order(hodge, c):
	"""Harmonic form of c, its primitive F and the tangent field v = F^[p]."""
	report = validate(hodge.rho, c)
	if not report.passed():
		raise ValueError('c is not a cocycle: ' + repr(report.failing()))
	omega = harmonic_rep(hodge, c)
	F = primitive(hodge, omega, c)
	v = project_jet(hodge.metric.points, F.values.values)
	residuals = {
		'equivariance': F.residual(omega),
		'jacobi': hodge.codiff(F.d()).sup(),
		'harmonic_d': hodge.d(omega).sup() if hodge.mesh.n_faces else 0.0,
		'harmonic_codiff': hodge.codiff(omega).sup(),
	}
	debug('first_order', residuals)
	return FirstOrderDeformation(omega, F, TwistedCochain(0, v), residuals)

def obstruction_check(hodge, omega):
	C = contract_star(hodge, omega, omega)
	witness = hodge.project_kernel(C)
	defect = hodge.norm(witness)
	threshold = OBSTRUCTION_TOL * max(hodge.norm(omega) ** 2, 1e-300)
	out = Obstruction(defect, threshold, witness, hodge.kernel_dim())
	debug('obstruction_check', out)
	return out

class PsiSolution(object):
	def __init__(self, psi, psi0, eta, residuals):
		self.psi = psi
		self.psi0 = psi0
		self.eta = eta
		self.residuals = residuals

def _second_order_edges(hodge, F, F2, c, k):
	"""(dF2)_e for the cover function F2(gamma x) = Ad F2(x) + [c(gamma), Ad F(x)] + k(gamma)."""
	jets = hodge.edge_jets(c, k)
	FV = F.values.values
	F2V = F2.values
	out = []
	for e, j in enumerate(jets):
		u = hodge._src[e]
		v = hodge._dst[e]
		adF = ad_action(j.g, FV[v])
		out.append(ad_action(j.g, F2V[v]) + bracket(j.xi, adF) + j.mu - F2V[u])
	return TwistedCochain(1, np.array(out).reshape(-1, hodge.n, hodge.n))

def d2_residual(hodge, omega, F, F2, c, k, psi):
	"""dF2 + [omega, F] - psi."""
	return (_second_order_edges(hodge, F, F2, c, k) + hodge.edge_bracket(omega, F.values) - psi).sup()

def _check_jets(rho, c, k):
	report = validate(rho, c, k)
	if not report.passed():
		raise ValueError('(c, k) is not a second order deformation: ' + repr(report.failing()))

def solve_psi(hodge, omega, F, c, k, strict=False):
	"""
	psi = psi0 + d eta with psi0 = dF2_0 + [omega, F], F2_0 vanishing on the
	domain, and J eta = -omega* contract omega - d* psi0. Returns an
	Obstruction instead when the right hand side meets ker J.
	"""
	_check_jets(hodge.rho, c, k)
	obstruction = obstruction_check(hodge, omega)
	if not obstruction.orthogonal:
		if strict:
			raise ObstructedDeformation(obstruction)
		return obstruction

	zero = hodge.zero(0)
	psi0 = _second_order_edges(hodge, F, zero, c, k) + hodge.edge_bracket(omega, F.values)
	C = contract_star(hodge, omega, omega)
	eta = hodge.solve_jacobi(-C - hodge.codiff(psi0))
	psi = psi0 + hodge.d(eta)
	residuals = {
		'closed': (hodge.d(psi) + bracket_wedge(hodge, omega, omega)).sup() if hodge.mesh.n_faces else 0.0,
		'harmonic': (hodge.codiff(psi) + C).sup(),
	}
	debug('solve_psi', residuals)
	return PsiSolution(psi, psi0, eta, residuals)

class SecondOrderDeformation(object):
	def __init__(self, hodge, c, k, omega, F, F2, psi, eta=None):
		self.hodge = hodge
		self.c = c
		self.k = k
		self.omega = omega
		self.F = F
		self.F2 = F2
		self.psi = psi
		self.eta = eta
		points = hodge.metric.points
		v, w = project_jet(points, F.values.values, F2.values)
		self.v = TwistedCochain(0, v)
		self.w = TwistedCochain(0, w)

	def at(self, vertex, word):
		"""(F, F2) at gamma.vertex on the cover."""
		j = eval_jet2(self.hodge.rho, self.c, self.k, word)
		Fx = self.F.values.values[vertex]
		adF = ad_action(j.g, Fx)
		return adF + j.xi, ad_action(j.g, self.F2.values[vertex]) + bracket(j.xi, adF) + j.mu

	def residuals(self):
		hodge = self.hodge
		C = contract_star(hodge, self.omega, self.omega)
		return {
			'flat_first': self.F.residual(self.omega),
			'flat_second': d2_residual(hodge, self.omega, self.F, self.F2, self.c, self.k, self.psi),
			'closed': (hodge.d(self.psi) + bracket_wedge(hodge, self.omega, self.omega)).sup()
				if hodge.mesh.n_faces else 0.0,
			'harmonic': (hodge.codiff(self.psi) + C).sup(),
		}

	def passed(self, tol=1e-7):
		return all(r < tol for r in self.residuals().values())

def second_order(hodge, c, k, strict=False):
	first = first_order(hodge, c)
	sol = solve_psi(hodge, first.omega, first.F, c, k, strict)
	if isinstance(sol, Obstruction):
		return sol
	return SecondOrderDeformation(hodge, c, k, first.omega, first.F, sol.eta, sol.psi, sol.eta)

def shift_solution(sec, xi, eta):
	"""(F + xi, F2 + [F, xi] + eta) for xi, eta in h; psi moves by 2 [omega, xi]."""
	hodge = sec.hodge
	F = sec.F.shifted(xi)
	F2 = TwistedCochain(0, sec.F2.values + bracket(sec.F.values.values, xi.values) + eta.values)
	psi = sec.psi + 2.0 * hodge.edge_bracket(sec.omega, xi)
	return SecondOrderDeformation(hodge, sec.c, sec.k, sec.omega, F, F2, psi)

def complex_companion(sec):
	"""
	Along (rho, ic, -k) the pair (iF, -F2 - eta) with J eta = 2 omega* contract
	omega is again a second order deformation, with psi~ = -psi - d eta.
	"""
	hodge = sec.hodge
	if hodge.group.field != 'C':
		raise ValueError('complex companion needs a complex group')
	C = contract_star(hodge, sec.omega, sec.omega)
	eta = hodge.solve_jacobi(2.0 * C)
	F = Primitive(hodge, sec.c.scaled(1j), 1j * sec.F.values.values)
	F2 = TwistedCochain(0, -sec.F2.values - eta.values)
	psi = -sec.psi - hodge.d(eta)
	k = [-x for x in sec.k]
	return SecondOrderDeformation(hodge, sec.c.scaled(1j), k, 1j * sec.omega, F, F2, psi, eta)

def centralizer_prime(hodge, omega, tol=1e-9):
	"""
	Basis of h' = {xi in h : [omega, xi] = 0}, and whether h' = h. When they
	agree every harmonic metric is deformable to second order.
	"""
	kernel = hodge.kernel_basis()
	if not kernel:
		return [], True
	columns = np.array([hodge.vec(hodge.edge_bracket(omega, xi)) for xi in kernel]).T
	scale = max(np.abs(columns).max() if columns.size else 0.0, 1.0)
	null = scipy.linalg.null_space(columns, rcond=tol / scale) if columns.size else np.eye(len(kernel))
	basis = []
	for coeffs in null.T:
		acc = hodge.zero(0)
		for a, xi in zip(coeffs, kernel):
			acc = acc + a * xi
		basis.append(acc)
	return basis, len(basis) == len(kernel)

"""
# Summary of a deformation run: residual table, obstruction defect and
# the dimension of h.
"""
class DeformationReport(object):
	def __init__(self, first=None, second=None, obstruction=None, kernel_dim=None):
		self.first = first
		self.second = second
		self.obstruction = obstruction
		self.kernel_dim = kernel_dim

	@property
	def obstructed(self):
		return self.obstruction is not None and not self.obstruction.orthogonal

	def to_json(self):
		d = {'kernel_dim': self.kernel_dim, 'obstructed': self.obstructed}
		if self.first is not None:
			d['first_order'] = dict(self.first.residuals)
		if self.second is not None:
			d['second_order'] = self.second.residuals()
		if self.obstruction is not None:
			d['obstruction'] = self.obstruction.to_json()
		return d

def deformation_report(hodge, c, k=None):
	first = first_order(hodge, c)
	obstruction = obstruction_check(hodge, first.omega)
	second = None
	if k is not None and obstruction.orthogonal:
		second = second_order(hodge, c, k)
	return DeformationReport(first, second, obstruction, hodge.kernel_dim())
