"""
   Equivariant harmonic maps into the symmetric space, found by a discrete
   heat flow, and the energy functional on representations.

   A map is stored by its values on the vertices of the fundamental domain.
   The value seen across an edge u -> gamma.v is act(rho(gamma), f(v)).
"""

import numpy as np

from .liealg import cartan_project, inner_at
from .symspace import (KAPPA, act, dist, mc_edge, exp_point, check_point, sqrt_point)
from .equivarlabutil import (debug, matrix_to_json, matrix_from_json)

"""
# Backtracking line search knobs. A step is accepted once the energy
# decreases by at least sufficient_decrease * step * slope.
"""
class LineSearchParams(object):
	def __init__(self, contraction=0.5, sufficient_decrease=1e-4, max_backtracks=40, initial_step=None,
			max_step=1.0, energy_noise=1e-13):
		if not (0.0 < contraction < 1.0):
			raise ValueError('contraction must lie in (0, 1), got ' + str(contraction))
		if not (0.0 < sufficient_decrease < 1.0):
			raise ValueError('sufficient_decrease must lie in (0, 1), got ' + str(sufficient_decrease))
		self.contraction = contraction
		self.sufficient_decrease = sufficient_decrease
		self.max_backtracks = max_backtracks
		self.initial_step = initial_step
		# Largest accepted step, measured as step * ||tau||
		self.max_step = max_step
		# Relative rounding of E tolerated by the decrease test, at most 1e-12
		self.energy_noise = energy_noise

	def to_json(self):
		return dict(self.__dict__)

class FlowParams(object):
	def __init__(self, tol=1e-8, maxiter=5000, drift_radius=50.0, escape_length=0.1,
			energy_floor=1e-14, line_search=None):
		if tol <= 0.0:
			raise ValueError('tolerance must be positive, got ' + str(tol))
		if maxiter < 1:
			raise ValueError('maxiter must be positive, got ' + str(maxiter))
		if drift_radius <= 0.0:
			raise ValueError('drift radius must be positive, got ' + str(drift_radius))
		if escape_length <= 0.0:
			raise ValueError('escape length must be positive, got ' + str(escape_length))
		self.tol = tol
		self.maxiter = int(maxiter)
		self.drift_radius = drift_radius
		# Newton distance beyond which the energy counts as a plateau
		self.escape_length = escape_length
		self.energy_floor = energy_floor
		self.line_search = line_search or LineSearchParams()

	def to_json(self):
		d = dict(self.__dict__)
		d['line_search'] = self.line_search.to_json()
		return d

"""
# A rho-equivariant map from the cover of the mesh to N.
"""
class EquivariantMap(object):
	def __init__(self, mesh, rho, values, check=True):
		if len(rho.generators) != len(mesh.generators):
			raise ValueError('representation and mesh have different generators')
		values = np.array(values, dtype=rho.group.dtype)
		n = rho.group.n
		if values.shape != (mesh.n_vertices, n, n):
			raise ValueError('map values have shape ' + str(values.shape) + ', expected ' +
				str((mesh.n_vertices, n, n)))
		if check:
			check_point(values, special=rho.group.special)

		self.mesh = mesh
		self.rho = rho
		self.values = values

		self._src = np.array([u for (u, v, w) in mesh.edges], dtype=int)
		self._dst = np.array([v for (u, v, w) in mesh.edges], dtype=int)
		self._transport = np.array([rho.eval_word(w) for (u, v, w) in mesh.edges]).reshape(-1, n, n)
		self._transport_inv = np.linalg.inv(self._transport) if len(mesh.edges) else self._transport

	def __repr__(self):
		return 'EquivariantMap(' + repr(self.mesh) + ', ' + repr(self.rho) + ')'

	@staticmethod
	def constant(mesh, rho, P=None):
		n = rho.group.n
		P = np.eye(n) if P is None else np.asarray(P)
		return EquivariantMap(mesh, rho, np.repeat(P[None, :, :], mesh.n_vertices, axis=0))

	@staticmethod
	def random(mesh, rho, rng, scale=0.5):
		group = rho.group
		I = np.repeat(group.identity()[None], mesh.n_vertices, axis=0)
		Xk, Xp = cartan_project(I, group.random_algebra(rng, scale, mesh.n_vertices))
		return EquivariantMap(mesh, rho, exp_point(I, Xp))

	def copy(self):
		return EquivariantMap(self.mesh, self.rho, self.values.copy())

	def with_values(self, values):
		return EquivariantMap(self.mesh, self.rho, values, check=False)

	def with_rep(self, rho):
		"""The same vertex values, read against another representation."""
		return EquivariantMap(self.mesh, rho, self.values.copy())

	def conjugated(self, h):
		"""(h.f, h rho h^-1): again an equivariant pair with the same energy."""
		return EquivariantMap(self.mesh, self.rho.conjugate(h), act(h, self.values))

	def transports(self):
		return self._transport

	def edge_points(self):
		"""f at the source of every edge and the transported value at its target."""
		P = self.values[self._src]
		Q = act(self._transport, self.values[self._dst])
		return P, Q

	def beta(self):
		"""Maurer-Cartan cochain: beta_e = 1/2 log(Q P^-1), selfadjoint at the source."""
		if not self.mesh.n_edges:
			return np.zeros((0,) + self.values.shape[1:], dtype=self.values.dtype)
		P, Q = self.edge_points()
		return mc_edge(P, Q)

	def edge_lengths(self):
		if not self.mesh.n_edges:
			return np.zeros(0)
		P, Q = self.edge_points()
		return dist(P, Q)

	def energy(self):
		return float(0.5 * np.sum(self.mesh.w1 * self.edge_lengths() ** 2))

	def tension(self):
		"""
		tau(v) = sum over edges at v of 2 w1(e) mc_edge(f(v), neighbour),
		the neighbour transported into the frame of v. The energy decreases
		along +tau: dE(X) = -2 sum_v <tau(v), X(v)>.
		"""
		tau = np.zeros_like(self.values)
		if not self.mesh.n_edges:
			return tau
		w = 2.0 * self.mesh.w1[:, None, None]
		P, Q = self.edge_points()
		np.add.at(tau, self._src, w * mc_edge(P, Q))
		R = self.values[self._dst]
		S = act(self._transport_inv, self.values[self._src])
		np.add.at(tau, self._dst, w * mc_edge(R, S))
		return tau

	def tension_norm(self, tau=None):
		tau = self.tension() if tau is None else tau
		return float(np.sqrt(max(np.sum(inner_at(self.values, tau, tau)), 0.0)))

	def moved(self, X, step=1.0):
		return self.with_values(exp_point(self.values, step * X))

	def to_json(self):
		return {'values': [matrix_to_json(P) for P in self.values]}

	@staticmethod
	def from_json(mesh, rho, d):
		try:
			values = [matrix_from_json(P) for P in d['values']]
		except (KeyError, TypeError) as e:
			raise ValueError('malformed map: ' + str(e))
		return EquivariantMap(mesh, rho, values)

class FlowReport(object):
	def __init__(self, energy, tension, iterations, converged, drift, reductive_suspected,
			underflow=False, energies=None, params=None, newton_distance=0.0):
		self.energy = energy
		self.tension = tension
		self.iterations = iterations
		self.converged = converged
		self.drift = drift
		self.reductive_suspected = reductive_suspected
		self.underflow = underflow
		self.energies = energies or []
		self.params = params
		self.newton_distance = newton_distance

	def __repr__(self):
		return 'FlowReport(energy=%g, tension=%g, iterations=%d, converged=%s, drift=%g, reductive_suspected=%s)' % (
			self.energy, self.tension, self.iterations, self.converged, self.drift, self.reductive_suspected)

	@property
	def monotone(self):
		return all(b <= a + 1e-12 for a, b in zip(self.energies, self.energies[1:]))

	def to_json(self):
		return {
			'energy': self.energy,
			'tension': self.tension,
			'iterations': self.iterations,
			'converged': self.converged,
			'drift': self.drift,
			'newton_distance': self.newton_distance,
			'reductive_suspected': self.reductive_suspected,
			'step_underflow': self.underflow,
			'monotone': self.monotone,
			'params': self.params.to_json() if self.params is not None else None,
		}

def _initial_step(f, ls):
	if ls.initial_step is not None:
		return ls.initial_step
	degree = np.zeros(f.mesh.n_vertices)
	np.add.at(degree, f._src, f.mesh.w1)
	np.add.at(degree, f._dst, f.mesh.w1)
	return 1.0 / (8.0 * max(degree.max(), 1e-12))

def _flattened(values, X):
	"""P^(-1/2) X P^(1/2): a selfadjoint X at P as a Hermitian matrix, isometrically."""
	Ph, Pih = sqrt_point(values)
	return Pih @ X @ Ph

def _bb_step(alpha, old_flat, new_flat):
	"""
	Barzilai-Borwein step for the move f <- exp_point(f, alpha * tau), from
	the tensions before and after it. On a quadratic this is the Newton step.
	"""
	tt = float(np.sum((old_flat * old_flat.conj()).real))
	curvature = tt - float(np.sum((old_flat * new_flat.conj()).real))
	if curvature <= 1e-14 * tt:
		return 4.0 * alpha
	return alpha * tt / curvature

def newton_distance(f, tau=None, step=0.1):
	"""
	Distance to the critical point predicted along the direction of tau by
	the second order model of the energy. It is the distance to the
	minimizer near a critical point and stays of order one where the energy
	only decays exponentially towards an infimum at infinity.
	"""
	tau = f.tension() if tau is None else tau
	tnorm = f.tension_norm(tau)
	if tnorm == 0.0:
		return 0.0
	d = tau / tnorm
	E = f.energy()
	curvature = (f.moved(d, step).energy() - 2.0 * E + f.moved(d, -step).energy()) / step ** 2
	if curvature <= 0.0:
		return float('inf')
	# slope along the unit direction d is -2 ||tau||; moving by t covers t / KAPPA
	return 2.0 * tnorm / curvature / KAPPA

"""
# Heat flow f <- exp_point(f, step * tau): Barzilai-Borwein steps, capped
# and safeguarded by Armijo backtracking. The test allows energy_noise
# relative slack, so steps whose decrease is below the rounding of E are
# still taken while ||tau|| is above tol.
#
# The flow cannot tell a slowly converging map from one escaping to
# infinity by the energy alone. At the end the energy plateau is read off
# the Newton distance: small near a minimizer, of order one when the
# infimum is only approached at infinity, as for non-reductive rho. The
# flow escapes when that plateau comes with basepoint drift.
"""
def flow(rho, f0, params=None):
	params = params or FlowParams()
	ls = params.line_search
	f = f0 if f0.rho is rho else f0.with_rep(rho)
	base = f.values[0].copy()

	E = f.energy()
	tau = f.tension()
	tnorm = f.tension_norm(tau)
	energies = [E]
	alpha = _initial_step(f, ls)
	underflow = False

	it = 0
	while it < params.maxiter and tnorm >= params.tol and E > params.energy_floor:
		slope = -2.0 * tnorm ** 2
		slack = min(ls.energy_noise * abs(E), 1e-12)
		alpha = min(alpha, ls.max_step / tnorm)

		trial = f.moved(tau, alpha)
		trial_E = trial.energy()
		backtracks = 0
		while trial_E > E + ls.sufficient_decrease * alpha * slope + slack:
			if backtracks >= ls.max_backtracks:
				underflow = True
				break
			alpha *= ls.contraction
			trial = f.moved(tau, alpha)
			trial_E = trial.energy()
			backtracks += 1
		if underflow:
			break

		old_flat = _flattened(f.values, tau)
		f = trial
		E = trial_E
		tau = f.tension()
		tnorm = f.tension_norm(tau)
		energies.append(E)
		it += 1
		alpha = _bb_step(alpha, old_flat, _flattened(f.values, tau))
		if dist(base, f.values[0]) > params.drift_radius:
			break

	drift = float(dist(base, f.values[0]))
	newton = newton_distance(f, tau)
	plateau = newton > params.escape_length
	escaping = drift > params.drift_radius or (plateau and drift > params.escape_length)
	converged = (tnorm < params.tol or E <= params.energy_floor) and not escaping

	report = FlowReport(E, tnorm, it, converged, drift, not escaping, underflow, energies, params, newton)
	debug('flow', report)
	return f, report

def harmonic_map(rho, mesh, params=None, restarts=2, seed=0, f0=None):
	"""Best of several flows: from f0 (or the constant map at I) and from random starts."""
	rng = np.random.default_rng(seed)
	starts = [f0 if f0 is not None else EquivariantMap.constant(mesh, rho)]
	for i in range(restarts):
		starts.append(EquivariantMap.random(mesh, rho, rng))

	best = None
	for start in starts:
		f, report = flow(rho, start, params)
		debug('harmonic_map restart', report)
		if best is None or report.energy < best[1].energy - 1e-12 or \
				(abs(report.energy - best[1].energy) <= 1e-12 and report.converged and not best[1].converged):
			best = (f, report)
	return best

def energy_of_rep(rho, mesh, params=None, restarts=2, seed=0):
	"""
	E(rho) as the infimum of the map energy, with the flag of the best flow.
	For a suspected non-reductive rho the value is the plateau reached.
	"""
	f, report = harmonic_map(rho, mesh, params, restarts, seed)
	return report.energy, report.reductive_suspected

def normalize_basepoint(f, vertex=0):
	"""Move f by h in G so that f(vertex) = I. Returns the moved map and h."""
	Ph, Pih = sqrt_point(f.values[vertex])
	return f.conjugated(Pih), Pih

def map_distance(f, g):
	return float(np.max(dist(f.values, g.values)))
