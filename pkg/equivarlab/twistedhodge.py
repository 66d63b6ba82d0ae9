"""
   Twisted cochain calculus of the adjoint local system Ad(rho)

   Cochains of degree 0, 1, 2 carry one Lie algebra value per vertex, edge
   and face of the fundamental domain. Edge values live at the edge source
   and face values at the first vertex of the face; crossing an edge labeled
   gamma transports by Ad_rho(gamma). The fiber metric at a vertex comes from
   the harmonic map f, which makes d* and the Jacobi operator J = d* d
   depend on f.

   Operators are assembled once per (mesh, rho, f) as sparse matrices in the
   real coordinates of LieGroup.coords.
"""

import csv

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .liealg import (ad_action, adjoint_at, bracket, cartan_project, inner_at)
from .repvar import eval_cocycle, eval_jet2
from .equivarlabutil import (debug, logger, matrix_to_json, matrix_from_json, dump_json)

KERNEL_CUTOFF = 1e-9

class TwistedCochain(object):
	def __init__(self, degree, values):
		if degree not in (0, 1, 2):
			raise ValueError('cochain degree must be 0, 1 or 2, got ' + str(degree))
		self.degree = degree
		self.values = np.asarray(values)

	def __repr__(self):
		return 'TwistedCochain(degree=%d, cells=%d)' % (self.degree, len(self.values))

	def _check(self, other):
		if other.degree != self.degree:
			raise ValueError('cochains of degree ' + str(self.degree) + ' and ' + str(other.degree))

	def __add__(self, other):
		self._check(other)
		return TwistedCochain(self.degree, self.values + other.values)

	def __sub__(self, other):
		self._check(other)
		return TwistedCochain(self.degree, self.values - other.values)

	def __neg__(self):
		return TwistedCochain(self.degree, -self.values)

	def __mul__(self, s):
		return TwistedCochain(self.degree, s * self.values)

	__rmul__ = __mul__

	def sup(self):
		return float(np.abs(self.values).max()) if self.values.size else 0.0

	def to_json(self):
		return {'degree': self.degree, 'values': [matrix_to_json(v) for v in self.values]}

	@staticmethod
	def from_json(d):
		try:
			return TwistedCochain(d['degree'], [matrix_from_json(v) for v in d['values']])
		except (KeyError, TypeError) as e:
			raise ValueError('malformed cochain: ' + str(e))

"""
# Gram matrices of X, Y -> Re tr(X P Y^dagger P^-1) on the real basis of
# the Lie algebra, one per vertex.
"""
class FiberMetric(object):
	def __init__(self, group, points):
		self.group = group
		self.points = np.asarray(points)
		B = group.basis()
		adj = adjoint_at(self.points[:, None], B[None])
		G = np.einsum('aij,vbji->vab', B, adj).real
		self.grams = (G + np.swapaxes(G, -1, -2)) / 2.0
		try:
			np.linalg.cholesky(self.grams)
		except np.linalg.LinAlgError:
			raise ValueError('fiber metric is not positive definite')

	def gram(self, v):
		return self.grams[v]

	def inner(self, v, X, Y):
		return float(inner_at(self.points[v], X, Y))

	def split(self, v, X):
		"""[k] and [p] parts of X at vertex v."""
		return cartan_project(self.points[v], X)

def _block_diag(blocks):
	if len(blocks) == 0:
		return scipy.sparse.csr_matrix((0, 0))
	return scipy.sparse.block_diag(list(blocks), format='csr')

def _sym(M):
	return (M + M.T) / 2.0

def _dense_pairs(K, M):
	return scipy.linalg.eigh(_sym(K.toarray()), _sym(M.toarray()))

"""
# K x = M r for a symmetric semidefinite K whose kernel has at most
# max_kernel dimensions, M positive definite.
#
# The low end of the spectrum comes from shift-invert eigsh just below 0,
# the kernel is the part under KERNEL_CUTOFF times the top eigenvalue.
# Conjugate gradients then run on K + top * M V V^T M, which is definite
# and equals K off the kernel V. Small systems go through dense eigh.
"""
class DeflatedSolver(object):
	def __init__(self, K, M, max_kernel):
		self.K = scipy.sparse.csr_matrix(K)
		self.M = scipy.sparse.csr_matrix(M)
		N = self.K.shape[0]
		k = max_kernel + 2
		if N <= k + 1:
			lam, V = _dense_pairs(self.K, self.M) if N else (np.zeros(0), np.zeros((0, 0)))
			self.top = max(float(np.max(np.abs(lam))) if lam.size else 0.0, 1e-300)
		else:
			self.top = max(float(scipy.sparse.linalg.eigsh(self.K, k=1, M=self.M, which='LA',
				return_eigenvectors=False)[0]), 1e-300)
			lam, V = scipy.sparse.linalg.eigsh(self.K, k=k, M=self.M, sigma=-1e-6 * self.top, which='LM')
			order = np.argsort(lam)
			lam, V = lam[order], V[:, order]
			if np.all(lam <= KERNEL_CUTOFF * self.top):
				# the kernel may be larger than asked for
				lam, V = _dense_pairs(self.K, self.M)
		ker = lam <= KERNEL_CUTOFF * self.top
		self.V = _m_orthonormal(V[:, ker], self.M)
		debug('DeflatedSolver', 'size', N, 'kernel', self.V.shape[1], 'top', self.top)

	@property
	def kernel_dim(self):
		return self.V.shape[1]

	def project(self, x):
		"""M-orthogonal projection onto the kernel."""
		return self.V @ (self.V.T @ (self.M @ x))

	def solve(self, r, rtol=1e-12):
		"""The solution of K x = M (r - project(r)) orthogonal to the kernel."""
		r = r - self.project(r)
		b = self.M @ r
		bnorm = np.linalg.norm(b)
		if bnorm == 0.0:
			return np.zeros_like(r)
		MV = self.M @ self.V
		shift = self.top
		N = self.K.shape[0]
		op = scipy.sparse.linalg.LinearOperator((N, N),
			matvec=lambda x: self.K @ x + shift * (MV @ (MV.T @ x)), dtype=b.dtype)
		x, info = scipy.sparse.linalg.cg(op, b, rtol=rtol, atol=0.0, maxiter=10 * N)
		if info != 0:
			logger.warning('conjugate gradients stopped with info %d, residual %g', info,
				np.linalg.norm(op @ x - b) / bnorm)
		return x - self.project(x)

def _m_orthonormal(V, M):
	if V.shape[1] == 0:
		return V
	L = np.linalg.cholesky(_sym(V.T @ (M @ V)))
	return scipy.linalg.solve_triangular(L, V.T, lower=True).T

"""
# The twisted complex of Ad(rho) with the metric of an equivariant map.
"""
class HodgeComplex(object):
	def __init__(self, mesh, rho, fmap=None):
		group = rho.group
		self.mesh = mesh
		self.rho = rho
		self.group = group
		self.n = group.n
		self.dim = group.dim
		self.fmap = fmap
		if fmap is not None:
			points = fmap.values
		else:
			points = np.repeat(group.identity()[None], mesh.n_vertices, axis=0)
		self.metric = FiberMetric(group, points)

		self._basis = group.basis()
		self._src = np.array([u for (u, v, w) in mesh.edges], dtype=int)
		self._dst = np.array([v for (u, v, w) in mesh.edges], dtype=int)
		self._words = [w for (u, v, w) in mesh.edges]
		self._transport = np.array([rho.eval_word(w) for w in self._words]).reshape(-1, self.n, self.n)

		self._face_base = []
		self._face_entries = []
		for i, face in enumerate(mesh.faces):
			sources, closing = mesh.face_offsets(i)
			e0, s0 = face[0]
			u0, v0, w0 = mesh.edges[e0]
			self._face_base.append(u0 if s0 > 0 else v0)
			self._face_entries.append([(e, s, rho.eval_word(o)) for (e, s), o in zip(face, sources)])
		self._face_base = np.array(self._face_base, dtype=int)

		self.d0 = self._assemble_d0()
		self.d1 = self._assemble_d1()
		grams = self.metric.grams
		w = mesh.gram
		self.G = [
			_block_diag([w.w0[v] * grams[v] for v in range(mesh.n_vertices)]),
			_block_diag([w.w1[e] * grams[u] for e, u in enumerate(self._src)]),
			_block_diag([w.w2[f] * grams[b] for f, b in enumerate(self._face_base)]),
		]
		self.Ginv = [
			_block_diag([np.linalg.inv(w.w0[v] * grams[v]) for v in range(mesh.n_vertices)]),
			_block_diag([np.linalg.inv(w.w1[e] * grams[u]) for e, u in enumerate(self._src)]),
			_block_diag([np.linalg.inv(w.w2[f] * grams[b]) for f, b in enumerate(self._face_base)]),
		]
		self._spectrum = None
		self._solvers = [None, None, None]
		debug('HodgeComplex', mesh, rho, 'dofs', mesh.n_vertices * self.dim)

	def _ad_blocks(self, g):
		"""Matrices of Ad_g on real coordinates, shape (..., dim, dim)."""
		gb, B = np.broadcast_arrays(np.asarray(g)[..., None, :, :], self._basis)
		moved = ad_action(gb, B)
		return np.swapaxes(self.group.coords(moved), -1, -2)

	def _assemble_d0(self):
		dim = self.dim
		rows, cols, vals = [], [], []
		I = np.eye(dim)
		if self.mesh.n_edges:
			blocks = self._ad_blocks(self._transport)
		for e in range(self.mesh.n_edges):
			for (v, M) in ((self._dst[e], blocks[e]), (self._src[e], -I)):
				r, c = np.nonzero(np.abs(M) > 0)
				rows.extend(e * dim + r)
				cols.extend(v * dim + c)
				vals.extend(M[r, c])
		return scipy.sparse.coo_matrix((vals, (rows, cols)),
			shape=(self.mesh.n_edges * dim, self.mesh.n_vertices * dim)).tocsr()

	def _assemble_d1(self):
		dim = self.dim
		rows, cols, vals = [], [], []
		for f, entries in enumerate(self._face_entries):
			for (e, s, g) in entries:
				M = s * self._ad_blocks(g)
				r, c = np.nonzero(np.abs(M) > 0)
				rows.extend(f * dim + r)
				cols.extend(e * dim + c)
				vals.extend(M[r, c])
		return scipy.sparse.coo_matrix((vals, (rows, cols)),
			shape=(self.mesh.n_faces * dim, self.mesh.n_edges * dim)).tocsr()

	def cells(self, degree):
		return (self.mesh.n_vertices, self.mesh.n_edges, self.mesh.n_faces)[degree]

	def vec(self, a):
		return self.group.coords(a.values).reshape(-1)

	def unvec(self, x, degree):
		x = np.asarray(x).reshape(self.cells(degree), self.dim)
		return TwistedCochain(degree, self.group.from_coords(x))

	def zero(self, degree):
		return TwistedCochain(degree, np.zeros((self.cells(degree), self.n, self.n), dtype=self.group.dtype))

	def constant(self, X):
		return TwistedCochain(0, np.repeat(np.asarray(X, dtype=self.group.dtype)[None], self.mesh.n_vertices, axis=0))

	def d(self, a):
		if a.degree == 0:
			return self.unvec(self.d0 @ self.vec(a), 1)
		if a.degree == 1:
			return self.unvec(self.d1 @ self.vec(a), 2)
		raise ValueError('d of a degree 2 cochain')

	def codiff(self, a):
		"""Adjoint of d for the Gram inner products: G_k^-1 d_k^T G_k+1."""
		if a.degree == 1:
			return self.unvec(self.Ginv[0] @ (self.d0.T @ (self.G[1] @ self.vec(a))), 0)
		if a.degree == 2:
			return self.unvec(self.Ginv[1] @ (self.d1.T @ (self.G[2] @ self.vec(a))), 1)
		raise ValueError('codifferential of a degree 0 cochain')

	def jacobi(self, F):
		if F.degree != 0:
			raise ValueError('the Jacobi operator acts on sections')
		return self.codiff(self.d(F))

	def inner(self, a, b):
		a._check(b)
		return float(self.vec(a) @ (self.G[a.degree] @ self.vec(b)))

	def norm(self, a):
		return float(np.sqrt(max(self.inner(a, a), 0.0)))

	def stiffness(self):
		"""d^T G1 d, the Jacobi operator in the G0-symmetric form."""
		return _sym(self.d0.T @ self.G[1] @ self.d0).tocsr()

	def spectrum(self):
		"""All generalized eigenpairs J v = lambda v, eigenvectors G0-orthonormal. Dense."""
		if self._spectrum is None:
			self._spectrum = _dense_pairs(self.stiffness(), self.G[0])
		return self._spectrum

	def _split(self, lam):
		top = max(float(np.max(np.abs(lam))) if lam.size else 0.0, 1e-300)
		return lam <= KERNEL_CUTOFF * top

	def _vertex_solver(self):
		if self._solvers[0] is None:
			# parallel sections are fixed by their value at one vertex
			self._solvers[0] = DeflatedSolver(self.stiffness(), self.G[0], self.dim)
		return self._solvers[0]

	def _face_solver(self):
		if self._solvers[2] is None:
			S = _sym(self.G[2] @ self.d1 @ self.Ginv[1] @ self.d1.T @ self.G[2])
			self._solvers[2] = DeflatedSolver(S, self.G[2], self.dim)
		return self._solvers[2]

	def kernel_basis(self):
		V = self._vertex_solver().V
		return [self.unvec(V[:, i], 0) for i in range(V.shape[1])]

	def kernel_dim(self):
		return self._vertex_solver().kernel_dim

	def project_kernel(self, F):
		return self.unvec(self._vertex_solver().project(self.vec(F)), 0)

	def solve_jacobi(self, r):
		"""Minimal solution of J(eta) = r - (kernel part of r)."""
		return self.unvec(self._vertex_solver().solve(self.vec(r)), 0)

	def _face_solve(self, r):
		"""Minimal solution of d d* mu = r on 2-cochains."""
		return self.unvec(self._face_solver().solve(self.vec(r)), 2)

	# -- cochains built from group data ---------------------------------

	def edge_cocycle(self, c):
		"""c(gamma_e) on every edge: d of the cover function that is 0 on the domain."""
		values = [np.asarray(eval_cocycle(c, self.rho, w), dtype=self.group.dtype) for w in self._words]
		return TwistedCochain(1, np.array(values).reshape(-1, self.n, self.n))

	def cover_d(self, F, c):
		"""(dF)_e = Ad F(v) + c(gamma_e) - F(u) for a cover function F(gamma x) = Ad F(x) + c(gamma)."""
		return self.d(F) + self.edge_cocycle(c)

	def transported_targets(self, F):
		return ad_action(self._transport, F.values[self._dst])

	def beta(self):
		if self.fmap is None:
			return self.zero(1)
		return TwistedCochain(1, self.fmap.beta())

	def edge_bracket(self, a, F):
		"""[a_e, F(source of e)]."""
		return TwistedCochain(1, bracket(a.values, F.values[self._src]))

	def edge_jets(self, c, k):
		"""(rho, c, k) on every edge label."""
		return [eval_jet2(self.rho, c, k, w) for w in self._words]

	def export_spectrum(self, path):
		lam, V = self.spectrum()
		ker = self._split(lam)
		with open(path, 'w') as f:
			out = csv.writer(f)
			out.writerow(['index', 'eigenvalue', 'kernel'])
			for i, x in enumerate(lam):
				out.writerow([i, repr(float(x)), int(ker[i])])

def _face_values(hodge, a):
	"""Boundary values of every face in the frame of its first vertex, oriented along the face."""
	out = []
	for entries in hodge._face_entries:
		out.append([s * ad_action(g, a.values[e]) for (e, s, g) in entries])
	return out

def bracket_wedge(hodge, a, b):
	"""
	Face values 1/2 sum_{i<j} ([a_i, b_j] + [b_i, a_j]) over the ordered
	boundary of each face. For a = b = dF this is -d of the edge bracket
	[dF, F(source)], the discrete form of d[F, dF] = [dF, dF].
	"""
	faces = []
	for A, B in zip(_face_values(hodge, a), _face_values(hodge, b)):
		acc = np.zeros((hodge.n, hodge.n), dtype=np.result_type(a.values, b.values))
		for i in range(len(A)):
			for j in range(i + 1, len(A)):
				acc = acc + 0.5 * (bracket(A[i], B[j]) + bracket(B[i], A[j]))
		faces.append(acc)
	return TwistedCochain(2, np.array(faces).reshape(-1, hodge.n, hodge.n))

def contract_star(hodge, omega, alpha):
	"""
	Per vertex (1/w0) sum over edges leaving v of w1 [omega_e^*, alpha_e],
	omega^* = omega^[p] - omega^[k] the adjoint at f(v). This is the exact
	adjoint of xi -> [omega, xi] for the Gram inner products.
	"""
	out = np.zeros((hodge.mesh.n_vertices, hodge.n, hodge.n), dtype=np.result_type(omega.values, alpha.values))
	if hodge.mesh.n_edges:
		P = hodge.metric.points[hodge._src]
		w = hodge.mesh.w1[:, None, None]
		np.add.at(out, hodge._src, w * bracket(adjoint_at(P, omega.values), alpha.values))
	return TwistedCochain(0, out / hodge.mesh.w0[:, None, None])

def harmonic_rep(hodge, c):
	"""Harmonic representative of the class of c: omega_0 - d xi with J xi = d* omega_0."""
	omega0 = hodge.edge_cocycle(c)
	xi = hodge.solve_jacobi(hodge.codiff(omega0))
	omega = omega0 - hodge.d(xi)
	debug('harmonic_rep', 'norm', hodge.norm(omega))
	return omega

"""
# A cover function F with F(gamma x) = Ad_rho(gamma) F(x) + c(gamma), kept
# as its values on the domain vertices.
"""
class Primitive(object):
	def __init__(self, hodge, c, values, defect=0.0):
		self.hodge = hodge
		self.c = c
		self.values = TwistedCochain(0, values)
		self.defect = defect

	def at(self, vertex, word):
		rho = self.hodge.rho
		return ad_action(rho.eval_word(word), self.values.values[vertex]) + eval_cocycle(self.c, rho, word)

	def d(self):
		return self.hodge.cover_d(self.values, self.c)

	def shifted(self, xi):
		return Primitive(self.hodge, self.c, self.values.values + xi.values, self.defect)

	def residual(self, omega):
		return (self.d() - omega).sup()

def primitive(hodge, omega, c, base=None):
	"""
	Integrate omega on the cover: the least-squares solution of
	dF = omega - (c on labeled edges), orthogonal to ker J unless base moves
	it. defect is nonzero when omega is not in the class of c.
	"""
	target = omega - hodge.edge_cocycle(c)
	F = hodge.solve_jacobi(hodge.codiff(target))
	if base is not None:
		F = F + base
	defect = (hodge.d(F) - target).sup()
	debug('primitive', 'defect', defect)
	return Primitive(hodge, c, F.values, defect)

class HodgeDecomposition(object):
	def __init__(self, exact, coexact, harmonic, xi, mu):
		self.exact = exact
		self.coexact = coexact
		self.harmonic = harmonic
		self.xi = xi
		self.mu = mu

	def reconstruct(self):
		return self.exact + self.coexact + self.harmonic

def hodge_decompose(hodge, alpha):
	"""alpha = d xi + d* mu + h with h closed and coclosed."""
	if alpha.degree != 1:
		raise ValueError('Hodge decomposition is done on 1-cochains')
	xi = hodge.solve_jacobi(hodge.codiff(alpha))
	exact = hodge.d(xi)
	if hodge.mesh.n_faces:
		mu = hodge._face_solve(hodge.d(alpha))
		coexact = hodge.codiff(mu)
	else:
		mu = hodge.zero(2)
		coexact = hodge.zero(1)
	return HodgeDecomposition(exact, coexact, alpha - exact - coexact, xi, mu)

def maurer_cartan_residual(hodge):
	"""d beta - [beta, beta] on faces, with its L2 norm."""
	beta = hodge.beta()
	r = hodge.d(beta) - bracket_wedge(hodge, beta, beta)
	return r, hodge.norm(r)

def save_cochain(a, path):
	dump_json(a.to_json(), path)
