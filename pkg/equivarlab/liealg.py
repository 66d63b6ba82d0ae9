"""
   Matrix Lie group and Lie algebra kernel

   Brackets, adjoint actions, the Cartan splitting at a point of the
   symmetric space, and the group law of second jets.

   All routines accept stacks of matrices with shape (..., n, n).
"""

import re

import numpy as np

TRACE_TOL = 1e-12
DET_TOL = 1e-9

def dagger(X):
	return np.conj(np.swapaxes(X, -1, -2))

"""
# A matrix group G together with its Lie algebra g.
#
# field is 'R' or 'C'. special=True gives SL(n, field), special=False is
# only used for GL(1, C) = C*, whose algebra is all of C.
"""
class LieGroup(object):
	def __init__(self, n, field='R', special=True):
		if n < 1:
			raise ValueError('matrix size must be positive, got ' + str(n))
		if field not in ('R', 'C'):
			raise ValueError('field must be R or C, got ' + str(field))
		if not special and not (n == 1 and field == 'C'):
			raise ValueError('only GL(1, C) is supported among non-special groups')
		if special and n < 2:
			raise ValueError('SL(1) is trivial')

		self.n = n
		self.field = field
		self.special = special

		self._basis = self._make_basis()
		flat = self._realify(self._basis).T
		self._coord_map = np.linalg.pinv(flat)

	def __repr__(self):
		if not self.special:
			return 'GL(1,C)'
		return 'SL(%d,%s)' % (self.n, self.field)

	def __eq__(self, other):
		return isinstance(other, LieGroup) and (self.n, self.field, self.special) == \
			(other.n, other.field, other.special)

	def __ne__(self, other):
		return not self == other

	def __hash__(self):
		return hash((self.n, self.field, self.special))

	@property
	def dtype(self):
		return complex if self.field == 'C' else float

	@property
	def is_abelian(self):
		return not self.special

	@property
	def dim(self):
		"""Real dimension of the Lie algebra."""
		return len(self._basis)

	"""
	Parse names such as 'SL2R', 'SL(3,C)', 'C*' or 'GL1C'.
	"""
	@staticmethod
	def parse(name):
		s = name.replace(' ', '').replace('(', '').replace(')', '').replace(',', '').upper()
		if s in ('C*', 'GL1C', 'CSTAR'):
			return LieGroup(1, 'C', special=False)
		m = re.match(r'^SL(\d+)([RC])$', s)
		if m is None:
			raise ValueError('unknown group ' + repr(name))
		return LieGroup(int(m.group(1)), m.group(2))

	def _make_basis(self):
		n = self.n
		real = []
		for i in range(n):
			for j in range(n):
				if i != j:
					E = np.zeros((n, n))
					E[i, j] = 1.0
					real.append(E)
		if self.special:
			for i in range(n - 1):
				H = np.zeros((n, n))
				H[i, i] = 1.0
				H[i + 1, i + 1] = -1.0
				real.append(H)
		else:
			real.append(np.ones((1, 1)))

		if self.field == 'R':
			return np.array(real)
		return np.array([B.astype(complex) for B in real] + [1j * B for B in real])

	def _realify(self, X):
		X = np.asarray(X)
		flat = X.reshape(X.shape[:-2] + (self.n * self.n,))
		if self.field == 'C':
			return np.concatenate([flat.real, flat.imag], axis=-1)
		return np.real(flat)

	def basis(self):
		return self._basis.copy()

	def coords(self, X):
		"""Real coordinates of algebra elements, shape (..., dim)."""
		return self._realify(X) @ self._coord_map.T

	def from_coords(self, v):
		v = np.asarray(v, dtype=float)
		return np.tensordot(v, self._basis, axes=([-1], [0]))

	def zero(self):
		return np.zeros((self.n, self.n), dtype=self.dtype)

	def identity(self):
		return np.eye(self.n, dtype=self.dtype)

	def check_algebra(self, X):
		X = np.asarray(X)
		if X.shape[-2:] != (self.n, self.n):
			raise ValueError('algebra element has shape ' + str(X.shape) + ', expected ' + str((self.n, self.n)))
		if self.field == 'R' and np.iscomplexobj(X) and np.abs(X.imag).max() > 0:
			raise ValueError('real algebra element has imaginary entries')
		if self.special and np.abs(np.trace(X, axis1=-2, axis2=-1)).max() > TRACE_TOL * max(1.0, np.abs(X).max()):
			raise ValueError('algebra element is not trace free')
		return X

	def check_group(self, g):
		g = np.asarray(g)
		if g.shape[-2:] != (self.n, self.n):
			raise ValueError('group element has shape ' + str(g.shape) + ', expected ' + str((self.n, self.n)))
		if not np.all(np.isfinite(g)):
			raise ValueError('group element has non-finite entries')
		det = np.linalg.det(g)
		if self.special and np.abs(det - 1.0).max() > DET_TOL:
			raise ValueError('determinant ' + str(det) + ' is not 1')
		if np.abs(det).min() == 0.0:
			raise ValueError('singular group element')
		return g

	def random_algebra(self, rng, scale=1.0, size=None):
		shape = (self.dim,) if size is None else (size, self.dim)
		return self.from_coords(scale * rng.standard_normal(shape))

def bracket(X, Y):
	X = np.asarray(X)
	Y = np.asarray(Y)
	if X.shape[-2:] != Y.shape[-2:]:
		raise ValueError('bracket of ' + str(X.shape) + ' and ' + str(Y.shape))
	return X @ Y - Y @ X

def ad_action(g, X):
	"""Ad_g X = g X g^-1."""
	g = np.asarray(g)
	X = np.asarray(X)
	if g.shape[-2:] != X.shape[-2:]:
		raise ValueError('cannot act by ' + str(g.shape) + ' on ' + str(X.shape))
	if np.min(np.abs(np.linalg.det(g))) < 1e-300:
		raise ValueError('singular group element')
	# X g^-1 = (g^-T X^T)^T
	right = np.swapaxes(np.linalg.solve(np.swapaxes(g, -1, -2), np.swapaxes(X, -1, -2)), -1, -2)
	return g @ right

def check_positive(P):
	P = np.asarray(P)
	if P.shape[-1] != P.shape[-2]:
		raise ValueError('point is not square: ' + str(P.shape))
	try:
		np.linalg.cholesky(P)
	except np.linalg.LinAlgError:
		raise ValueError('point is not positive definite')
	return P

def adjoint_at(P, X):
	"""Adjoint of X for the Hermitian form defined by the point P: P X^dagger P^-1."""
	# P^-1 is Hermitian, so X^dagger P^-1 = (P^-1 X)^dagger
	return P @ dagger(np.linalg.solve(P, X))

def cartan_project(P, X):
	"""Split X into its anti-selfadjoint [k]_P and selfadjoint [p]_P parts."""
	check_positive(P)
	Xs = adjoint_at(P, X)
	return (X - Xs) / 2.0, (X + Xs) / 2.0

def inner_at(P, X, Y):
	"""Metric <X, Y>_P = Re tr(X Y*) of the adjoint bundle at P."""
	Ys = adjoint_at(P, Y)
	return np.einsum('...ij,...ji->...', X, Ys).real

def norm_at(P, X):
	return np.sqrt(np.maximum(inner_at(P, X, X), 0.0))

"""
# An element of the second jet group J^2 G in its right trivialization.
#
# g is the group element, xi and mu are the first and second order parts.
"""
class Jet2Elem(object):
	__slots__ = ('g', 'xi', 'mu')

	def __init__(self, g, xi, mu):
		g = np.asarray(g)
		xi = np.asarray(xi)
		mu = np.asarray(mu)
		if not (g.shape == xi.shape == mu.shape):
			raise ValueError('jet components have shapes ' + str((g.shape, xi.shape, mu.shape)))
		self.g = g
		self.xi = xi
		self.mu = mu

	def __repr__(self):
		return 'Jet2Elem(g=' + repr(self.g) + ', xi=' + repr(self.xi) + ', mu=' + repr(self.mu) + ')'

	def __mul__(self, other):
		return jet2_mul(self, other)

	@staticmethod
	def identity(n, dtype=float):
		z = np.zeros((n, n), dtype=dtype)
		return Jet2Elem(np.eye(n, dtype=dtype), z, z.copy())

	def residual(self):
		"""Distance to the neutral element."""
		n = self.g.shape[-1]
		return max(np.abs(self.g - np.eye(n)).max(), np.abs(self.xi).max(), np.abs(self.mu).max())

def jet2_mul(a, b):
	"""(g, xi, mu)(h, eta, nu) = (gh, xi + Ad_g eta, mu + Ad_g nu + [xi, Ad_g eta])."""
	if a.g.shape != b.g.shape:
		raise ValueError('jet product of ' + str(a.g.shape) + ' and ' + str(b.g.shape))
	ad_eta = ad_action(a.g, b.xi)
	return Jet2Elem(a.g @ b.g, a.xi + ad_eta, a.mu + ad_action(a.g, b.mu) + bracket(a.xi, ad_eta))

def jet2_inv(a):
	# Solving the product law against the identity gives [xi, -xi] = 0 in the last slot
	ginv = np.linalg.inv(a.g)
	return Jet2Elem(ginv, -ad_action(ginv, a.xi), -ad_action(ginv, a.mu))
