"""
   Representations of the fundamental group, their first and second order
   deformations as group cocycles, and closed-form families of
   representations used as finite-difference oracles.
"""

import math

import numpy as np
import scipy.linalg

from .liealg import (LieGroup, Jet2Elem, jet2_mul, jet2_inv, ad_action)
from .meshcover import (parse_word, format_word, GENUS2_GENERATORS, GENUS2_RELATOR)
from .equivarlabutil import (debug, matrix_to_json, matrix_from_json)

VALIDATION_TOL = 1e-8

"""
# A homomorphism from the group <generators | relators> to a matrix group,
# given by the images of the generators.
"""
class Representation(object):
	def __init__(self, group, generators, images, relators=()):
		if len(images) != len(generators):
			raise ValueError('need one image per generator: ' + str(len(generators)) + ' generators, ' +
				str(len(images)) + ' images')
		self.group = group
		self.generators = list(generators)
		self.relators = [tuple(r) for r in relators]
		self.images = [np.array(group.check_group(np.asarray(g, dtype=group.dtype)), dtype=group.dtype) for g in images]
		self._inverses = [np.linalg.inv(g) for g in self.images]

	@staticmethod
	def for_mesh(mesh, group, images):
		return Representation(group, mesh.generators, images, mesh.relators)

	def __repr__(self):
		return 'Representation(' + repr(self.group) + ', ' + ' '.join(self.generators) + ')'

	def letter(self, x):
		if x == 0 or abs(x) > len(self.images):
			raise ValueError('unknown generator index ' + str(x))
		return self.images[x - 1] if x > 0 else self._inverses[-x - 1]

	def eval_word(self, word):
		g = self.group.identity()
		for x in word:
			g = g @ self.letter(x)
		return g

	def conjugate(self, h):
		hinv = np.linalg.inv(h)
		return Representation(self.group, self.generators, [h @ g @ hinv for g in self.images], self.relators)

	def complexify(self):
		if self.group.field == 'C':
			return self
		group = LieGroup(self.group.n, 'C', self.group.special)
		return Representation(group, self.generators, [g.astype(complex) for g in self.images], self.relators)

	def to_json(self):
		return {
			'group': repr(self.group),
			'generators': self.generators,
			'relators': [format_word(r, self.generators) for r in self.relators],
			'images': [matrix_to_json(g) for g in self.images],
		}

	@staticmethod
	def from_json(d):
		try:
			group = LieGroup.parse(d['group'])
			gens = list(d['generators'])
			rels = [parse_word(r, gens) for r in d.get('relators', [])]
			images = [matrix_from_json(m) for m in d['images']]
		except (KeyError, TypeError) as e:
			raise ValueError('malformed representation: ' + str(e))
		return Representation(group, gens, images, rels)

"""
# A 1-cocycle on the generators. Its value on a word follows from
# c(gh) = c(g) + Ad_rho(g) c(h).
"""
class Cocycle(object):
	def __init__(self, values):
		self.values = [np.asarray(v) for v in values]

	def __repr__(self):
		return 'Cocycle(' + repr(self.values) + ')'

	def __add__(self, other):
		return Cocycle([a + b for a, b in zip(self.values, other.values)])

	def scaled(self, s):
		return Cocycle([s * v for v in self.values])

	def to_json(self):
		return [matrix_to_json(v) for v in self.values]

	@staticmethod
	def from_json(rows):
		return Cocycle([matrix_from_json(v) for v in rows])

class Jet2Cocycle(object):
	def __init__(self, c, k):
		if len(c.values) != len(k):
			raise ValueError('c and k have different lengths')
		self.c = c
		self.k = [np.asarray(v) for v in k]

def _dtype(rho, *cochains):
	complex_values = any(np.iscomplexobj(v) for vals in cochains for v in vals)
	return complex if (rho.group.field == 'C' or complex_values) else float

def eval_cocycle(c, rho, word):
	dtype = _dtype(rho, c.values)
	g = rho.group.identity().astype(dtype)
	acc = np.zeros_like(g)
	for x in word:
		if x > 0:
			value = c.values[x - 1]
		else:
			value = -ad_action(rho.letter(x), c.values[-x - 1])
		acc = acc + ad_action(g, value)
		g = g @ rho.letter(x)
	return acc

def eval_jet2(rho, c, k, word):
	"""(rho, c, k) extended to a word as a homomorphism into J^2 G."""
	dtype = _dtype(rho, c.values, k)
	out = Jet2Elem.identity(rho.group.n, dtype)
	for x in word:
		i = abs(x) - 1
		j = Jet2Elem(rho.images[i].astype(dtype), np.asarray(c.values[i], dtype=dtype), np.asarray(k[i], dtype=dtype))
		out = jet2_mul(out, j if x > 0 else jet2_inv(j))
	return out

def coboundary(rho, xi):
	"""c(g) = xi - Ad_rho(g) xi."""
	return Cocycle([xi - ad_action(g, xi) for g in rho.images])

"""
# Residuals of the relators at each level. A level only counts as passed
# when the levels below it pass as well.
"""
class ValidationReport(object):
	def __init__(self):
		self.levels = {}

	def add(self, level, residuals):
		self.levels[level] = [float(r) for r in residuals]

	def passed(self, level=None):
		names = [level] if level is not None else list(self.levels)
		return all(max(self.levels[n] or [0.0]) < VALIDATION_TOL for n in names)

	def failing(self):
		return [n for n in ('representation', 'cocycle', 'jet2') if n in self.levels and not self.passed(n)]

	def __repr__(self):
		return 'ValidationReport(' + repr(self.levels) + ')'

	def to_json(self):
		return {'levels': self.levels, 'passed': self.passed(), 'failing': self.failing()}

def validate(rho, c=None, k=None):
	report = ValidationReport()
	n = rho.group.n
	report.add('representation', [np.abs(rho.eval_word(r) - np.eye(n)).max() for r in rho.relators])
	if c is not None:
		report.add('cocycle', [np.abs(eval_cocycle(c, rho, r)).max() if r else 0.0 for r in rho.relators])
	if k is not None:
		report.add('jet2', [eval_jet2(rho, c, k, r).residual() for r in rho.relators])
	debug('validate', rho, report)
	return report

def cocycle_basis(rho, tol=1e-10):
	"""Basis of Z^1(Gamma, g): the null space of the linear relator map on generator values."""
	group = rho.group
	ngen = len(rho.generators)
	dim = group.dim
	basis = group.basis()
	columns = []
	for i in range(ngen):
		for j in range(dim):
			values = [group.zero() for x in range(ngen)]
			values[i] = basis[j]
			c = Cocycle(values)
			col = [group.coords(eval_cocycle(c, rho, r)) for r in rho.relators]
			columns.append(np.concatenate(col) if col else np.zeros(0))
	if not rho.relators:
		null = np.eye(ngen * dim)
	else:
		null = scipy.linalg.null_space(np.array(columns).T, rcond=tol)
	out = []
	for v in null.T:
		v = v.reshape(ngen, dim)
		out.append(Cocycle([group.from_coords(v[i]) for i in range(ngen)]))
	return out

"""
# Closed-form families t -> rho_t with analytic first and second jets in
# the right trivialization: rho_t rho_0^-1 = exp(t c + t^2 k / 2 + O(t^3)).
"""
class RepPath(object):
	def __init__(self, base):
		self.base = base

	def at(self, t):
		raise NotImplementedError

	def jets(self):
		raise NotImplementedError

"""exp(A_i + t B_i + t^2 C_i) with all A_i, B_i, C_i commuting (Z^d targets)."""
class ExponentialPath(RepPath):
	def __init__(self, group, generators, relators, A, B, C=None):
		self.group = group
		self.generators = list(generators)
		self.relators = list(relators)
		self.A = [np.asarray(a, dtype=group.dtype) for a in A]
		self.B = [np.asarray(b, dtype=group.dtype) for b in B]
		self.C = [np.zeros_like(a) for a in self.A] if C is None else [np.asarray(x, dtype=group.dtype) for x in C]
		mats = self.A + self.B + self.C
		for X in mats:
			for Y in mats:
				if np.abs(X @ Y - Y @ X).max() > 1e-12:
					raise ValueError('exponential family needs commuting exponents')
		RepPath.__init__(self, self.at(0.0))

	def at(self, t):
		images = [scipy.linalg.expm(a + t * b + t * t * c) for a, b, c in zip(self.A, self.B, self.C)]
		return Representation(self.group, self.generators, images, self.relators)

	def jets(self):
		return Cocycle([b.copy() for b in self.B]), [2.0 * c for c in self.C]

"""exp(t xi) rho_0(g) exp(-t xi) on the chosen generators (all of them by default)."""
class ConjugationPath(RepPath):
	def __init__(self, base, xi, moved=None):
		RepPath.__init__(self, base)
		self.xi = np.asarray(xi, dtype=base.group.dtype)
		self.moved = list(range(len(base.images))) if moved is None else list(moved)

	def at(self, t):
		h = scipy.linalg.expm(t * self.xi)
		hinv = scipy.linalg.expm(-t * self.xi)
		images = [h @ g @ hinv if i in self.moved else g for i, g in enumerate(self.base.images)]
		return Representation(self.base.group, self.base.generators, images, self.base.relators)

	def jets(self):
		c = []
		k = []
		for i, g in enumerate(self.base.images):
			if i in self.moved:
				xi2 = ad_action(g, self.xi)
				c.append(self.xi - xi2)
				k.append(xi2 @ self.xi - self.xi @ xi2)
			else:
				c.append(np.zeros_like(self.xi))
				k.append(np.zeros_like(self.xi))
		return Cocycle(c), k

def path_jets(path):
	c, k = path.jets()
	report = validate(path.base, c, k)
	if not report.passed():
		raise ValueError('path jets fail validation: ' + repr(report.failing()))
	return c, k

# -- named representations -------------------------------------------------

def diagonal_sl2(z):
	return np.diag([np.exp(z), np.exp(-z)])

def hyperbolic_circle(lam=2.0):
	"""Z -> SL(2,R), 1 -> diag(lam, 1/lam)."""
	return Representation(LieGroup(2, 'R'), ['a'], [np.diag([lam, 1.0 / lam])])

def parabolic_circle():
	return Representation(LieGroup(2, 'R'), ['a'], [np.array([[1.0, 1.0], [0.0, 1.0]])])

def trivial(group, generators, relators=()):
	return Representation(group, generators, [group.identity() for g in generators], relators)

def diagonal_torus(z1, z2):
	"""Z^2 -> SL(2,C) by diagonal matrices exp(diag(z, -z))."""
	return Representation(LieGroup(2, 'C'), ['a', 'b'], [diagonal_sl2(z1), diagonal_sl2(z2)], [(1, 2, -1, -2)])

def cstar_torus(z1, z2):
	return Representation(LieGroup(1, 'C', special=False), ['a', 'b'],
		[np.array([[np.exp(z1)]]), np.array([[np.exp(z2)]])], [(1, 2, -1, -2)])

def _su11_rotation(theta):
	return np.diag([np.exp(0.5j * theta), np.exp(-0.5j * theta)])

def _su11_translation(length):
	ch = math.cosh(length / 2.0)
	sh = math.sinh(length / 2.0)
	return np.array([[ch, sh], [sh, ch]], dtype=complex)

"""
# The regular pi/4 octagon group in SL(2,R).
#
# T_k translates along the diameter at angle k pi/4 across the side with
# that midpoint, g_k = T_k R(pi/2) glues side k+2 onto side k. Reading the
# vertex cycle gives [g1^-1, g0][g5^-1, g4] = 1.
"""
def fuchsian_genus2():
	d = math.acosh(1.0 / math.tan(math.pi / 8))
	T = _su11_translation(2.0 * d)
	quarter = _su11_rotation(math.pi / 2)

	def g(k):
		R = _su11_rotation(k * math.pi / 4)
		return R @ T @ np.linalg.inv(R) @ quarter

	disk = [np.linalg.inv(g(1)), g(0), np.linalg.inv(g(5)), g(4)]
	# Cayley transform from the disk to the upper half plane
	M = np.array([[1j, 1j], [-1.0, 1.0]])
	Minv = np.linalg.inv(M)
	images = []
	for A in disk:
		B = M @ A @ Minv
		if np.abs(B.imag).max() > 1e-9:
			raise ValueError('octagon generator is not real after the Cayley transform')
		images.append(B.real)
	return Representation(LieGroup(2, 'R'), GENUS2_GENERATORS, images, [GENUS2_RELATOR])

def bending_genus2(base=None):
	"""
	Bend a genus-2 representation along the separating curve [a1, b1]:
	the second handle is conjugated by exp(t i X), X the axis of [a1, b1].
	"""
	base = (base or fuchsian_genus2()).complexify()
	C = base.eval_word((1, 2, -1, -2))
	X = scipy.linalg.logm(C)
	X = X - np.trace(X) / 2.0 * np.eye(2)
	xi = 1j * X / np.linalg.norm(X)
	return ConjugationPath(base, xi, moved=[2, 3])
