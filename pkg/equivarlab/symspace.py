"""
   The symmetric space N = G/K in the positive definite matrix model

   A point is a Hermitian (real: symmetric) positive definite matrix P,
   with det P = 1 for SL-type groups. G acts by P -> g P g^dagger and the
   tangent directions at P are the elements of g that are selfadjoint
   for P (see liealg.adjoint_at).

   Moving P to exp_point(P, X) covers the distance 2 ||X||_P, so
   dist = 2 ||mc_edge||. KAPPA records that ratio.
"""

import numpy as np

from .liealg import (dagger, adjoint_at, cartan_project, inner_at, check_positive)
from .equivarlabutil import debug

KAPPA = 0.5
EIG_FLOOR = 1e-14

# Squared inverse of KAPPA: the factor between sum w ||beta||^2 and the energy
ENERGY_SCALE = 4.0

def _hermitian(M):
	return (M + dagger(M)) / 2.0

def _eig(M):
	w, V = np.linalg.eigh(_hermitian(M))
	return np.maximum(w, EIG_FLOOR), V

def _apply(V, w):
	return (V * w[..., None, :]) @ dagger(V)

def sqrt_point(P):
	"""P^(1/2) and P^(-1/2)."""
	w, V = _eig(P)
	s = np.sqrt(w)
	return _apply(V, s), _apply(V, 1.0 / s)

def check_point(P, special=True, tol=1e-9):
	P = check_positive(np.asarray(P))
	if np.abs(P - dagger(P)).max() > tol * max(1.0, np.abs(P).max()):
		raise ValueError('point is not Hermitian')
	if special and P.shape[-1] > 1 and np.abs(np.linalg.det(P) - 1.0).max() > tol:
		raise ValueError('point does not have determinant 1')
	return P

def act(g, P):
	return _hermitian(g @ P @ dagger(g))

def _relative(P, Q):
	"""P^(1/2), P^(-1/2) and the eigen-decomposition of P^(-1/2) Q P^(-1/2)."""
	Ph, Pih = sqrt_point(P)
	w, V = _eig(Pih @ Q @ Pih)
	return Ph, Pih, w, V

def dist(P, Q):
	check_positive(P)
	check_positive(Q)
	Ph, Pih, w, V = _relative(P, Q)
	return np.sqrt(np.sum(np.log(w) ** 2, axis=-1))

def mc_edge(P, Q):
	"""
	Discrete Maurer-Cartan form of the edge P -> Q: beta = 1/2 log(Q P^-1).

	beta is selfadjoint at P and at Q, and exp_point(P, beta) = Q.
	"""
	Ph, Pih, w, V = _relative(P, Q)
	return 0.5 * (Ph @ _apply(V, np.log(w)) @ Pih)

# Inverse of exp_point
log_point = mc_edge

def exp_point(P, X):
	"""
	Move P along the geodesic with initial direction X^[p]:
	e^X P e^(X^dagger) for selfadjoint X.
	"""
	Xk, Xp = cartan_project(P, X)
	Ph, Pih = sqrt_point(P)
	# P^(-1/2) Xp P^(1/2) is Hermitian when Xp is selfadjoint at P
	w, V = np.linalg.eigh(_hermitian(Pih @ Xp @ Ph))
	return _hermitian(Ph @ _apply(V, np.exp(2.0 * w)) @ Ph)

def geodesic(P, Q, t):
	if t < 0.0 or t > 1.0:
		raise ValueError('geodesic parameter must lie in [0, 1], got ' + str(t))
	if t == 1.0:
		return np.array(Q, copy=True)
	return exp_point(P, t * mc_edge(P, Q))

def displacement(g, P):
	return dist(P, act(g, P))

def _displacement_gradient(g, P):
	"""
	Value and gradient of D(P) = dist(P, g.P)^2, the gradient given as
	a selfadjoint element at P.
	"""
	Q = act(g, P)
	beta = mc_edge(P, Q)
	D = float(dist(P, Q) ** 2)
	pulled = np.linalg.solve(g, beta @ g)
	Z = adjoint_at(P, pulled)
	Gk, G = cartan_project(P, 8.0 * (Z - beta))
	return D, G

"""
# Minimize the displacement of g over N by Riemannian gradient descent
# with Armijo backtracking, restarting from the base point and from a few
# random points.
#
# Returns (L, attained). attained is False when the infimum is approached
# by a sequence escaping to infinity, i.e. g is not semisimple. That is
# read off the Newton distance at the end point together with its drift:
# the distance to the minimizer vanishes at a minimizer and near a fixed
# point, and stays of order one along escaping sequences, where D decays
# exponentially.
"""
def translation_length(g, restarts=3, maxiter=2000, gtol=1e-8, drift_radius=50.0, seed=0,
		escape_length=0.1, floor=1e-12):
	g = np.asarray(g)
	n = g.shape[-1]
	rng = np.random.default_rng(seed)

	best = None
	starts = [np.eye(n, dtype=g.dtype)]
	for i in range(restarts):
		X = rng.standard_normal((n, n))
		X = (X + X.T) / 2.0
		if n > 1:
			X -= np.trace(X) / n * np.eye(n)
		starts.append(exp_point(np.eye(n), 0.5 * X))

	for start in starts:
		start = np.array(start, dtype=g.dtype)
		P, D, G = _minimize_displacement(g, start, maxiter, gtol, drift_radius, floor)
		newton = _displacement_newton_distance(g, P, D, G)
		drift = float(dist(start, P))
		escaping = drift > drift_radius or (newton > escape_length and drift > escape_length)
		debug('translation_length restart', 'D=' + str(D), 'newton=' + str(newton), 'drift=' + str(drift))
		if best is None or D < best[0] - 1e-15 or (abs(D - best[0]) <= 1e-15 and not escaping):
			best = (D, not escaping)

	return float(np.sqrt(best[0])), best[1]

def _displacement_newton_distance(g, P, D, G, step=0.1):
	gnorm = float(np.sqrt(max(inner_at(P, G, G), 0.0)))
	if gnorm == 0.0:
		return 0.0
	d = -G / gnorm
	Dp = float(displacement(g, exp_point(P, step * d)) ** 2)
	Dm = float(displacement(g, exp_point(P, -step * d)) ** 2)
	curvature = (Dp - 2.0 * D + Dm) / step ** 2
	if curvature <= 0.0:
		return float('inf')
	return gnorm / curvature / KAPPA

def _minimize_displacement(g, P, maxiter, gtol, drift_radius, floor, max_step=1.0,
		contraction=0.5, sufficient_decrease=1e-4, noise=1e-13):
	start = P
	D, G = _displacement_gradient(g, P)
	alpha = 0.1
	old_D = None
	for it in range(maxiter):
		gg = float(inner_at(P, G, G))
		if D <= floor or np.sqrt(gg) <= gtol:
			break
		df0 = -gg
		if old_D is not None and D < old_D:
			alpha = 2.0 * 2.0 * (D - old_D) / df0
		alpha = min(max(alpha, 1e-12), max_step / np.sqrt(gg))
		# decreases below the rounding of D still count
		slack = min(noise * D, 1e-12)

		newP = exp_point(P, -alpha * G)
		newD = float(displacement(g, newP) ** 2)
		steps = 1
		while newD > D + sufficient_decrease * alpha * df0 + slack:
			if steps > 40:
				return P, D, G
			alpha *= contraction
			newP = exp_point(P, -alpha * G)
			newD = float(displacement(g, newP) ** 2)
			steps += 1

		old_D = D
		P = newP
		D, G = _displacement_gradient(g, P)
		if dist(start, P) > drift_radius:
			break
	return P, D, G
