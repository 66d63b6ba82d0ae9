"""
   First and second variation of the energy along deformations of the
   representation, checked against finite differences of re-solved
   harmonic maps.

   With the normalization of symspace the energy of a harmonic map is
   2 sum_e w1 ||beta_e||^2, so both variation formulas carry ENERGY_SCALE.
"""

import numpy as np

from .symspace import ENERGY_SCALE
from .liealg import cartan_project
from .harmonicflow import (flow, harmonic_map, FlowParams)
from .twistedhodge import (HodgeComplex, TwistedCochain, harmonic_rep)
from .deform import (first_order, solve_psi, complex_companion, Obstruction)
from .equivarlabutil import debug

FD_STEPS = (1e-2, 5e-3, 2.5e-3)

def first_variation(hodge, omega):
	"""ENERGY_SCALE * sum_e w1 <omega_e, beta_e> at the edge sources."""
	return ENERGY_SCALE * hodge.inner(omega, hodge.beta())

def _p_norm2(hodge, omega):
	Xk, Xp = cartan_project(hodge.metric.points[hodge._src], omega.values)
	return hodge.inner(TwistedCochain(1, Xp), TwistedCochain(1, Xp))

def second_variation(hodge, psi, omega):
	"""ENERGY_SCALE * sum_e w1 (<psi_e, beta_e> + ||omega_e^[p]||^2)."""
	return ENERGY_SCALE * (hodge.inner(psi, hodge.beta()) + _p_norm2(hodge, omega))

"""
# Central differences of t -> E(rho_t) at a decreasing sequence of steps,
# with Richardson extrapolation over consecutive steps. Every sample is a
# fresh flow warm-started from the harmonic map at t = 0.
"""
class FiniteDifference(object):
	def __init__(self, steps, first, second, first_extrapolated, second_extrapolated, energy):
		self.steps = list(steps)
		self.first = list(first)
		self.second = list(second)
		self.first_extrapolated = first_extrapolated
		self.second_extrapolated = second_extrapolated
		self.energy = energy

	def to_json(self):
		return dict(self.__dict__)

def _richardson(values):
	"""Repeated h^2 elimination for a halving step sequence."""
	table = list(values)
	factor = 4.0
	while len(table) > 1:
		table = [(factor * b - a) / (factor - 1.0) for a, b in zip(table, table[1:])]
		factor *= 4.0
	return table[0]

def fd_oracle(path, mesh, f0, params=None, steps=FD_STEPS):
	params = params or FlowParams(tol=1e-10)
	energy0 = flow(path.at(0.0), f0.with_rep(path.at(0.0)), params)[1].energy

	def energy(t):
		rho = path.at(t)
		f, report = flow(rho, f0.with_rep(rho), params)
		if not report.converged:
			debug('fd_oracle', 'flow did not converge at t =', t, report)
		return report.energy

	first = []
	second = []
	for h in steps:
		ep = energy(h)
		em = energy(-h)
		first.append((ep - em) / (2.0 * h))
		second.append((ep - 2.0 * energy0 + em) / (h * h))
	out = FiniteDifference(steps, first, second, _richardson(first), _richardson(second), energy0)
	debug('fd_oracle', out.first_extrapolated, out.second_extrapolated)
	return out

def relative_error(analytic, numeric):
	return abs(analytic - numeric) / max(abs(analytic), 1e-12)

def psh_defect(hodge, c, k=None):
	"""
	|E''(c) + E''(ic) - ENERGY_SCALE ||omega||^2| with the two psi solved
	independently, relative to ENERGY_SCALE ||omega||^2. Raises
	ObstructedDeformation for an obstructed direction.
	"""
	if hodge.group.field != 'C':
		raise ValueError('plurisubharmonicity needs a complex group')
	if k is None:
		k = [np.zeros_like(np.asarray(x, dtype=complex)) for x in c.values]
	first = first_order(hodge, c)
	total = ENERGY_SCALE * hodge.norm(first.omega) ** 2
	if total == 0.0:
		return 0.0
	real = solve_psi(hodge, first.omega, first.F, c, k, strict=True)
	ic = c.scaled(1j)
	first_i = first_order(hodge, ic)
	imag = solve_psi(hodge, first_i.omega, first_i.F, ic, [-x for x in k], strict=True)
	s = second_variation(hodge, real.psi, first.omega) + second_variation(hodge, imag.psi, first_i.omega)
	defect = abs(s - total) / total
	debug('psh_defect', s, total, defect)
	return defect

def companion_psh_defect(sec):
	"""The same identity, with the second psi taken from the companion data."""
	hodge = sec.hodge
	comp = complex_companion(sec)
	total = ENERGY_SCALE * hodge.norm(sec.omega) ** 2
	if total == 0.0:
		return 0.0
	s = second_variation(hodge, sec.psi, sec.omega) + second_variation(hodge, comp.psi, comp.omega)
	return abs(s - total) / total

def critical_scan(hodge, basis):
	"""max over directions of |<omega, beta>| / (||omega|| ||beta||)."""
	beta = hodge.beta()
	bnorm = hodge.norm(beta)
	worst = 0.0
	for c in basis:
		omega = harmonic_rep(hodge, c)
		onorm = hodge.norm(omega)
		if onorm < 1e-14 or bnorm < 1e-14:
			continue
		worst = max(worst, abs(hodge.inner(omega, beta)) / (onorm * bnorm))
	debug('critical_scan', worst)
	return worst

class VariationReport(object):
	def __init__(self, first, second=None, fd=None, psh=None, scan=None):
		self.first = first
		self.second = second
		self.fd = fd
		self.psh = psh
		self.scan = scan

	@property
	def first_error(self):
		if self.fd is None:
			return None
		return relative_error(self.first, self.fd.first_extrapolated)

	@property
	def second_error(self):
		if self.fd is None or self.second is None:
			return None
		return relative_error(self.second, self.fd.second_extrapolated)

	def to_json(self):
		return {
			'first_variation': self.first,
			'second_variation': self.second,
			'fd': self.fd.to_json() if self.fd is not None else None,
			'first_error': self.first_error,
			'second_error': self.second_error,
			'psh_defect': self.psh,
			'critical_scan': self.scan,
		}

	CSV_COLUMNS = ['direction', 'first_variation', 'fd_first', 'first_error', 'second_variation', 'fd_second',
		'second_error']

	def csv_row(self, direction):
		fd = self.fd
		return [direction, self.first, fd.first_extrapolated if fd else '', self.first_error,
			self.second if self.second is not None else '', fd.second_extrapolated if fd else '',
			self.second_error if self.second_error is not None else '']

def variation_along(path, mesh, params=None, fd=True):
	"""
	Analytic first and second variation along a closed-form path, and
	optionally the finite-difference check.
	"""
	rho = path.base
	f, report = harmonic_map(rho, mesh, params)
	hodge = HodgeComplex(mesh, rho, f)
	c, k = path.jets()
	first = first_order(hodge, c)
	fv = first_variation(hodge, first.omega)
	sol = solve_psi(hodge, first.omega, first.F, c, k)
	sv = None if isinstance(sol, Obstruction) else second_variation(hodge, sol.psi, first.omega)
	oracle = fd_oracle(path, mesh, f, params) if fd else None
	return VariationReport(fv, sv, oracle)
