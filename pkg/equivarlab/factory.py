# Named constructors for meshes, representations, cocycles and paths
import numpy as np

from . import meshcover
from . import repvar
from .liealg import LieGroup
from .repvar import (Representation, Cocycle, ExponentialPath, ConjugationPath)
from .equivarlabutil import (debug, matrix_from_json)

def _complex(z):
	"""Accept a number or an [re, im] pair."""
	if isinstance(z, (list, tuple)):
		return complex(z[0], z[1])
	return complex(z)

def create(t, *args, **kwargs):
	debug('create', t, args, kwargs)
	return t(*args, **kwargs)

def mesh(kind, size=()):
	return create(meshcover.build, kind, *size)

def representation(name, mesh, **params):
	"""
	trivial, hyperbolic, parabolic, unitary, diagonal, cstar or fuchsian.
	The generators of the result are those of the mesh.
	"""
	gens = mesh.generators
	rels = mesh.relators
	if name == 'trivial':
		group = LieGroup.parse(params.get('group', 'SL2R'))
		return repvar.trivial(group, gens, rels)
	if name == 'hyperbolic':
		lam = float(params.get('lam', 2.0))
		return Representation.for_mesh(mesh, LieGroup(2, 'R'), [np.diag([lam, 1.0 / lam])] +
			[np.eye(2)] * (len(gens) - 1))
	if name == 'parabolic':
		return Representation.for_mesh(mesh, LieGroup(2, 'R'), [np.array([[1.0, 1.0], [0.0, 1.0]])] +
			[np.eye(2)] * (len(gens) - 1))
	if name == 'unitary':
		angles = params.get('angles', [0.7] * len(gens))
		if len(angles) != len(gens):
			raise ValueError('need one angle per generator')
		images = [np.diag([np.exp(1j * a), np.exp(-1j * a)]) for a in angles]
		return Representation.for_mesh(mesh, LieGroup(2, 'C'), images)
	if name == 'diagonal':
		zs = [_complex(z) for z in params.get('z', [0.5, 0.3])]
		if len(zs) != len(gens):
			raise ValueError('need one exponent per generator')
		return Representation.for_mesh(mesh, LieGroup(2, 'C'), [repvar.diagonal_sl2(z) for z in zs])
	if name == 'cstar':
		zs = [_complex(z) for z in params.get('z', [0.5, 0.3])]
		if len(zs) != len(gens):
			raise ValueError('need one exponent per generator')
		return Representation.for_mesh(mesh, LieGroup(1, 'C', special=False), [np.array([[np.exp(z)]]) for z in zs])
	if name == 'fuchsian':
		if mesh.kind != 'genus2':
			raise ValueError('the octagon representation lives on the genus 2 mesh')
		rho = repvar.fuchsian_genus2()
		return Representation.for_mesh(mesh, rho.group, rho.images)
	raise ValueError('unknown representation ' + repr(name))

def cocycle(rho, values):
	"""A cocycle from one matrix (nested lists, complex as [re, im]) per generator."""
	if len(values) != len(rho.generators):
		raise ValueError('need one cocycle value per generator')
	return Cocycle([np.asarray(matrix_from_json(v), dtype=rho.group.dtype) for v in values])

def path(name, mesh, **params):
	"""
	Closed-form families: axis (circle, hyperbolic), abelian (torus,
	diagonal SL(2,C)), cstar (torus), conjugation (any rho) and bending
	(genus 2).
	"""
	gens = mesh.generators
	rels = mesh.relators
	if name == 'axis':
		s = float(params.get('s', np.log(2.0)))
		H = np.diag([1.0, -1.0])
		A = [s * H] + [np.zeros((2, 2))] * (len(gens) - 1)
		B = [H] + [np.zeros((2, 2))] * (len(gens) - 1)
		return ExponentialPath(LieGroup(2, 'R'), gens, rels, A, B)
	if name in ('abelian', 'cstar'):
		zs = [_complex(z) for z in params.get('z', [0.5, 0.3])]
		dz = [_complex(z) for z in params.get('dz', [1.0, 0.5])]
		ddz = [_complex(z) for z in params.get('ddz', [0.0] * len(gens))]
		if not (len(zs) == len(dz) == len(ddz) == len(gens)):
			raise ValueError('need one exponent per generator')
		if name == 'cstar':
			group = LieGroup(1, 'C', special=False)
			unit = np.ones((1, 1))
		else:
			group = LieGroup(2, 'C')
			unit = np.diag([1.0, -1.0])
		return ExponentialPath(group, gens, rels, [z * unit for z in zs], [z * unit for z in dz],
			[z * unit for z in ddz])
	if name == 'conjugation':
		base = params['base']
		rng = np.random.default_rng(params.get('seed', 0))
		xi = params.get('xi')
		if xi is None:
			xi = base.group.random_algebra(rng)
		return ConjugationPath(base, xi)
	if name == 'bending':
		return repvar.bending_genus2()
	raise ValueError('unknown path ' + repr(name))
