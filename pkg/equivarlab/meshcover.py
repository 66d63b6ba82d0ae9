"""
   Fundamental-domain cell complexes with deck-transformation labels

   The universal cover is never stored. Every cell of the quotient appears
   once; an oriented edge (u, v, word) joins u in the fundamental domain
   to the translate word.v, so an equivariant field is determined by its
   values on the vertices.

   Words in the generators are tuples of non-zero ints: i+1 stands for
   generator i and -(i+1) for its inverse. Text form uses one letter per
   generator with upper case for inverses, e.g. 'a b A B'.
"""

import math

import numpy as np

from .equivarlabutil import (debug, load_json, dump_json)

VOLUME = 1.0

def inverse_word(w):
	return tuple(-x for x in reversed(w))

def reduce_word(w):
	out = []
	for x in w:
		if out and out[-1] == -x:
			out.pop()
		else:
			out.append(x)
	return tuple(out)

def cyclic_reduce(w):
	w = reduce_word(w)
	while len(w) >= 2 and w[0] == -w[-1]:
		w = w[1:-1]
	return w

def parse_word(text, generators):
	word = []
	for token in text.split():
		for letter in token:
			if letter in generators:
				word.append(generators.index(letter) + 1)
			elif letter.lower() in generators and letter.isupper():
				word.append(-(generators.index(letter.lower()) + 1))
			else:
				raise ValueError('unknown generator ' + repr(letter) + ' in word ' + repr(text))
	return tuple(word)

def format_word(word, generators):
	letters = []
	for x in word:
		name = generators[abs(x) - 1]
		letters.append(name if x > 0 else name.upper())
	return ' '.join(letters)

"""Cell volumes and dual weights, used for all cochain inner products."""
class GramData(object):
	def __init__(self, w0, w1, w2):
		self.w0 = np.asarray(w0, dtype=float)
		self.w1 = np.asarray(w1, dtype=float)
		self.w2 = np.asarray(w2, dtype=float)
		for name, w in (('vertex', self.w0), ('edge', self.w1), ('face', self.w2)):
			if w.size and w.min() <= 0.0:
				raise ValueError(name + ' weights must be strictly positive')

	def __repr__(self):
		return 'GramData(%d vertices, %d edges, %d faces)' % (len(self.w0), len(self.w1), len(self.w2))

"""
# A cell complex representing a fundamental domain of the cover.
#
# edges: list of (source, target, word)
# faces: list of boundary cycles, each a list of (edge index, +1/-1)
"""
class CoverMesh(object):
	def __init__(self, generators, relators, n_vertices, edges, faces, w0, w1, w2,
			kind='custom', size=(), coords=None, lengths=None, areas=None):
		self.generators = list(generators)
		self.relators = [tuple(r) for r in relators]
		self.n_vertices = n_vertices
		self.edges = [(int(u), int(v), tuple(w)) for (u, v, w) in edges]
		self.faces = [[(int(e), int(s)) for (e, s) in f] for f in faces]
		self.gram = GramData(w0, w1, w2)
		self.kind = kind
		self.size = tuple(size)
		self.coords = coords
		self.lengths = lengths
		self.areas = areas

		if len(self.gram.w0) != n_vertices or len(self.gram.w1) != len(self.edges) or len(self.gram.w2) != len(self.faces):
			raise ValueError('weight arrays do not match the cell counts')

		self._face_offsets = [self._traverse(i) for i in range(len(self.faces))]

	def __repr__(self):
		return 'CoverMesh(%s %s: %d vertices, %d edges, %d faces)' % (
			self.kind, self.size, self.n_vertices, len(self.edges), len(self.faces))

	@property
	def n_edges(self):
		return len(self.edges)

	@property
	def n_faces(self):
		return len(self.faces)

	@property
	def w0(self):
		return self.gram.w0

	@property
	def w1(self):
		return self.gram.w1

	@property
	def w2(self):
		return self.gram.w2

	def labeled_edges(self):
		return [i for i, (u, v, w) in enumerate(self.edges) if len(w) > 0]

	"""
	Walk around face i starting at the source of its first boundary entry.
	Returns the offset word of the stored source of every boundary edge,
	and the word reached after closing the cycle.
	"""
	def _traverse(self, i):
		face = self.faces[i]
		if not face:
			raise ValueError('face ' + str(i) + ' is empty')

		e0, s0 = face[0]
		u0, v0, w0 = self.edges[e0]
		start = u0 if s0 > 0 else v0
		current = start
		offset = ()
		sources = []
		for (e, s) in face:
			u, v, w = self.edges[e]
			if s > 0:
				if current != u:
					raise ValueError('face ' + str(i) + ' is not a cycle at edge ' + str(e))
				sources.append(offset)
				offset = reduce_word(offset + w)
				current = v
			else:
				if current != v:
					raise ValueError('face ' + str(i) + ' is not a cycle at edge ' + str(e))
				offset = reduce_word(offset + inverse_word(w))
				sources.append(offset)
				current = u
		if current != start:
			raise ValueError('face ' + str(i) + ' does not close')
		return sources, offset

	def face_offsets(self, i):
		return self._face_offsets[i]

	def face_word(self, i):
		return self._face_offsets[i][1]

	def is_relator_word(self, word):
		w = cyclic_reduce(word)
		if len(w) == 0:
			return True
		for r in self.relators:
			for cand in (cyclic_reduce(r), cyclic_reduce(inverse_word(r))):
				if len(cand) == len(w) and any(cand[k:] + cand[:k] == w for k in range(len(cand))):
					return True
		return False

	def check(self):
		"""Raise ValueError unless every face boundary closes on a relator."""
		for i in range(self.n_faces):
			if not self.is_relator_word(self.face_word(i)):
				raise ValueError('face ' + str(i) + ' closes on ' + format_word(self.face_word(i), self.generators) +
					', which is not a relator')
		for (u, v, w) in self.edges:
			if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
				raise ValueError('edge endpoint out of range')
		if abs(self.w0.sum() - VOLUME) > 1e-9:
			raise ValueError('vertex weights sum to ' + str(self.w0.sum()))
		return True

	def vertex_edges(self):
		"""For each vertex, the list of (edge index, +1 if source / -1 if target)."""
		incident = [[] for i in range(self.n_vertices)]
		for i, (u, v, w) in enumerate(self.edges):
			incident[u].append((i, 1))
			incident[v].append((i, -1))
		return incident

	def to_json(self):
		g = self.generators
		return {
			'kind': self.kind,
			'size': list(self.size),
			'generators': g,
			'relators': [format_word(r, g) for r in self.relators],
			'vertices': [{'weight': float(w)} for w in self.w0],
			'edges': [{'source': u, 'target': v, 'label': format_word(w, g), 'weight': float(x)}
				for (u, v, w), x in zip(self.edges, self.w1)],
			'faces': [{'boundary': [[e, s] for (e, s) in f], 'weight': float(x)}
				for f, x in zip(self.faces, self.w2)],
		}

	@staticmethod
	def from_json(d):
		try:
			g = list(d['generators'])
			relators = [parse_word(r, g) for r in d['relators']]
			w0 = [v['weight'] for v in d['vertices']]
			edges = [(e['source'], e['target'], parse_word(e.get('label', ''), g)) for e in d['edges']]
			w1 = [e['weight'] for e in d['edges']]
			faces = [[(b[0], b[1]) for b in f['boundary']] for f in d.get('faces', [])]
			w2 = [f['weight'] for f in d.get('faces', [])]
		except (KeyError, TypeError, IndexError) as e:
			raise ValueError('malformed mesh: ' + str(e))
		mesh = CoverMesh(g, relators, len(w0), edges, faces, w0, w1, w2,
			kind=d.get('kind', 'custom'), size=d.get('size', ()))
		mesh.check()
		return mesh

	def save(self, path):
		dump_json(self.to_json(), path)

	@staticmethod
	def load(path):
		return CoverMesh.from_json(load_json(path))

	def refined(self):
		"""The next mesh of the same kind, with mesh size halved."""
		if self.kind == 'circle':
			return build_circle(2 * self.size[0])
		if self.kind == 'torus':
			return build_torus(2 * self.size[0], 2 * self.size[1])
		if self.kind == 'genus2':
			return build_genus2(self.size[0] + 1)
		raise ValueError('mesh kind ' + repr(self.kind) + ' does not support refinement')

	@property
	def mesh_size(self):
		if self.lengths is not None:
			return float(np.max(self.lengths))
		return 1.0 / max(self.size) if self.size else float('nan')

def build_circle(n):
	if n < 3:
		raise ValueError('circle needs at least 3 vertices, got ' + str(n))
	edges = [(i, (i + 1) % n, (1,) if i == n - 1 else ()) for i in range(n)]
	coords = np.arange(n, dtype=float)[:, None] / n
	return CoverMesh(['a'], [], n, edges, [], np.full(n, 1.0 / n), np.full(n, float(n)), [],
		kind='circle', size=(n,), coords=coords, lengths=np.full(n, 1.0 / n))

"""
# Flat unit-square torus, n x m grid. Horizontal edges crossing the right
# side carry 'a', vertical edges crossing the top carry 'b'.
"""
def build_torus(n, m):
	if n < 3 or m < 3:
		raise ValueError('torus grid must be at least 3 x 3, got ' + str((n, m)))

	def vid(i, j):
		return (i % n) + n * (j % m)

	edges = []
	w1 = []
	lengths = []
	hor = {}
	ver = {}
	for j in range(m):
		for i in range(n):
			hor[i, j] = len(edges)
			edges.append((vid(i, j), vid(i + 1, j), (1,) if i == n - 1 else ()))
			w1.append(float(n) / m)
			lengths.append(1.0 / n)
	for j in range(m):
		for i in range(n):
			ver[i, j] = len(edges)
			edges.append((vid(i, j), vid(i, j + 1), (2,) if j == m - 1 else ()))
			w1.append(float(m) / n)
			lengths.append(1.0 / m)

	faces = []
	for j in range(m):
		for i in range(n):
			faces.append([(hor[i, j], 1), (ver[(i + 1) % n, j], 1), (hor[i, (j + 1) % m], -1), (ver[i, j], -1)])

	coords = np.array([[float(i) / n, float(j) / m] for j in range(m) for i in range(n)])
	return CoverMesh(['a', 'b'], [(1, 2, -1, -2)], n * m, edges, faces,
		np.full(n * m, 1.0 / (n * m)), w1, np.full(n * m, float(n * m)),
		kind='torus', size=(n, m), coords=coords, lengths=np.array(lengths),
		areas=np.full(n * m, 1.0 / (n * m)))

# Side pairing word of the octagon: a1 b1 A1 B1 a2 b2 A2 B2
GENUS2_GENERATORS = ['a', 'b', 'c', 'd']
GENUS2_RELATOR = (1, 2, -1, -2, 3, 4, -3, -4)

def octagon_lengths():
	"""Hyperbolic spoke and side lengths of the regular pi/4 octagon."""
	spoke = math.acosh((math.cos(math.pi / 8) + math.cos(math.pi / 4) * math.cos(math.pi / 8)) /
		(math.sin(math.pi / 4) * math.sin(math.pi / 8)))
	side = math.acosh((math.cos(math.pi / 4) + math.cos(math.pi / 8) ** 2) / math.sin(math.pi / 8) ** 2)
	return spoke, side

"""
# Genus-2 surface from the regular hyperbolic octagon with interior
# angles pi/4, cut into 8 triangles around its center. The 8 corners are
# a single vertex of the quotient; corner j is the translate of corner 0
# by the first j letters of the side word.
"""
def build_genus2(k=1):
	if k < 1:
		raise ValueError('subdivision depth must be at least 1, got ' + str(k))

	W = GENUS2_RELATOR
	spoke, side = octagon_lengths()
	corner, center = 0, 1
	edges = []
	lengths = []
	for x in range(1, 5):
		edges.append((corner, corner, (x,)))
		lengths.append(side)
	spokes = []
	for j in range(8):
		spokes.append(len(edges))
		edges.append((center, corner, W[:j]))
		lengths.append(spoke)

	faces = []
	for j in range(8):
		letter = W[j]
		loop = abs(letter) - 1
		nxt = spokes[(j + 1) % 8]
		faces.append([(spokes[j], 1), (loop, 1 if letter > 0 else -1), (nxt, -1)])

	# area of each triangle is pi/2, 4 pi in total before normalization
	areas = np.full(8, math.pi / 2.0)
	mesh = _with_triangle_weights(GENUS2_GENERATORS, [W], 2, edges, faces, np.array(lengths), areas, 'genus2', (1,))
	for level in range(1, k):
		mesh = subdivide(mesh)
		mesh.size = (level + 1,)
	return mesh

def _with_triangle_weights(generators, relators, n_vertices, edges, faces, lengths, areas, kind, size):
	scale = VOLUME / areas.sum()
	areas = areas * scale
	lengths = lengths * math.sqrt(scale)

	w0 = np.zeros(n_vertices)
	share = np.zeros(len(edges))
	for f, A in zip(faces, areas):
		seen = []
		for (e, s) in f:
			u, v, w = edges[e]
			seen.append(u if s > 0 else v)
			share[e] += A / 3.0
		for x in seen:
			w0[x] += A / len(f)
	w1 = 2.0 * share / lengths ** 2
	w2 = 1.0 / areas
	return CoverMesh(generators, relators, n_vertices, edges, faces, w0, w1, w2,
		kind=kind, size=size, lengths=lengths, areas=areas)

"""
# Midpoint subdivision of a triangulated complex: every edge is halved and
# every triangle is split in four. Labels of the new interior edges are
# read off from the face traversal.
"""
def subdivide(mesh):
	edges = []
	lengths = []
	first = {}
	second = {}
	nv = mesh.n_vertices
	for i, (u, v, w) in enumerate(mesh.edges):
		m = nv + i
		first[i] = len(edges)
		edges.append((u, m, ()))
		second[i] = len(edges)
		edges.append((m, v, w))
		lengths.extend([mesh.lengths[i] / 2.0, mesh.lengths[i] / 2.0])

	faces = []
	areas = []
	for fi, face in enumerate(mesh.faces):
		if len(face) != 3:
			raise ValueError('subdivision needs triangles, face ' + str(fi) + ' has ' + str(len(face)) + ' sides')
		sources, closing = mesh.face_offsets(fi)
		mids = [nv + e for (e, s) in face]
		inner = []
		for i in range(3):
			j = (i + 1) % 3
			label = reduce_word(inverse_word(sources[i]) + sources[j])
			inner.append(len(edges))
			edges.append((mids[i], mids[j], label))
			lengths.append(mesh.lengths[face[(i + 2) % 3][0]] / 2.0)

		A = mesh.areas[fi] / 4.0
		for i in range(3):
			j = (i + 1) % 3
			e, s = face[i]
			f, t = face[j]
			tail = (second[e], 1) if s > 0 else (first[e], -1)
			head = (first[f], 1) if t > 0 else (second[f], -1)
			faces.append([tail, head, (inner[i], -1)])
			areas.append(A)
		faces.append([(inner[0], 1), (inner[1], 1), (inner[2], 1)])
		areas.append(A)

	# lengths and areas are already normalized, the rescale below is the identity
	out = _with_triangle_weights(mesh.generators, mesh.relators, nv + mesh.n_edges, edges, faces,
		np.array(lengths), np.array(areas), mesh.kind, mesh.size)
	debug('subdivide', mesh, '->', out)
	return out

def build(kind, *size):
	if kind == 'circle':
		return build_circle(*size)
	if kind == 'torus':
		return build_torus(*size)
	if kind == 'genus2':
		return build_genus2(*size)
	raise ValueError('unknown mesh kind ' + repr(kind))
