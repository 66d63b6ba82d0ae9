"""
   Batch experiment runner

   equivar-lab <task> --config <path> [--out <dir>] [--seed <n>] [--tol <x>]

   Reads a JSON experiment description, runs one task and writes
   <out>/<task>.json and, for tasks with tables, <out>/<task>.csv.
"""

import csv
import logging
import os
import sys
from optparse import OptionParser

import numpy as np

from . import factory
from .meshcover import CoverMesh
from .repvar import (Representation, cocycle_basis, validate)
from .symspace import translation_length
from .harmonicflow import (FlowParams, LineSearchParams, harmonic_map)
from .twistedhodge import (HodgeComplex, harmonic_rep, hodge_decompose, maurer_cartan_residual, save_cochain)
from .deform import (deformation_report, second_order, Obstruction, ObstructedDeformation)
from .energyvar import (variation_along, psh_defect, critical_scan, VariationReport)
from . import equivarlabutil
from .equivarlabutil import (debug, dump_json, load_json, E_OK, E_VALIDATION, E_NO_CONVERGENCE, E_OBSTRUCTED,
	SCHEMA_VERSION)

TASKS = ('flow', 'energy', 'hodge', 'deform1', 'deform2', 'variation', 'psh', 'critical-scan', 'refine-study')

# Fields each task needs besides mesh and representation
REQUIRED = {
	'deform1': ('cocycle',),
	'deform2': ('cocycle',),
	'psh': ('cocycle',),
	'variation': ('path',),
}

"""
# A parsed and validated experiment description.
"""
class ExperimentConfig(object):
	def __init__(self, task, mesh, representation=None, cocycle=None, k=None, path=None,
			tol=1e-8, maxiter=5000, restarts=2, levels=3, out='.', seed=0):
		self.task = task
		self.mesh = mesh
		self.representation = representation
		self.cocycle = cocycle
		self.k = k
		self.path = path
		self.tol = tol
		self.maxiter = maxiter
		self.restarts = restarts
		self.levels = levels
		self.out = out
		self.seed = seed

	@staticmethod
	def from_json(d, task=None):
		if not isinstance(d, dict):
			raise ValueError('config must be a JSON object')
		known = ('task', 'mesh', 'representation', 'cocycle', 'k', 'path', 'tol', 'maxiter', 'restarts',
			'levels', 'out', 'seed')
		kwargs = dict((key, d[key]) for key in known if key in d)
		if task is not None:
			kwargs['task'] = task
		if 'task' not in kwargs or 'mesh' not in kwargs:
			raise ValueError('config needs a task and a mesh')
		config = ExperimentConfig(**kwargs)
		config.validate()
		return config

	def validate(self):
		if self.task not in TASKS:
			raise ValueError('unknown task ' + repr(self.task))
		for key in REQUIRED.get(self.task, ()):
			if getattr(self, key) is None:
				raise ValueError('task ' + self.task + ' needs ' + key)
		if self.path is None and self.representation is None:
			raise ValueError('config needs a representation')
		if self.tol <= 0.0:
			raise ValueError('tolerance must be positive, got ' + str(self.tol))
		if self.maxiter < 1 or self.restarts < 0:
			raise ValueError('maxiter and restarts must be positive')
		if self.task == 'refine-study' and self.levels < 3:
			raise ValueError('a refinement study needs at least 3 levels')
		return self

	def flow_params(self):
		return FlowParams(tol=self.tol, maxiter=self.maxiter, line_search=LineSearchParams())

	def to_json(self):
		d = dict(self.__dict__)
		d['flow'] = self.flow_params().to_json()
		return d

def build_mesh(spec):
	if isinstance(spec, dict) and 'edges' in spec:
		return CoverMesh.from_json(spec)
	if isinstance(spec, dict):
		return factory.mesh(spec.get('kind'), spec.get('size', ()))
	return CoverMesh.load(spec)

def build_representation(spec, mesh):
	if 'images' in spec:
		rho = Representation.from_json(spec)
		if rho.generators != mesh.generators:
			raise ValueError('representation generators do not match the mesh')
		rho = Representation.for_mesh(mesh, rho.group, rho.images)
	else:
		rho = factory.representation(spec.get('family'), mesh, **spec.get('params', {}))
	report = validate(rho)
	if not report.passed():
		raise ValueError('representation fails its relators: ' + repr(report))
	return rho

def _cocycle(config, rho):
	c = factory.cocycle(rho, config.cocycle)
	if config.k is None:
		k = [np.zeros_like(v) for v in c.values]
	else:
		k = factory.cocycle(rho, config.k).values
	return c, k

def _solve(config, mesh, rho):
	return harmonic_map(rho, mesh, config.flow_params(), config.restarts, config.seed)

def _needs_convergence(report):
	return not report.converged and report.reductive_suspected

def task_flow(config, mesh, rho):
	f, report = _solve(config, mesh, rho)
	out = {'flow': report.to_json(), 'map': f.to_json()}
	code = E_NO_CONVERGENCE if _needs_convergence(report) else E_OK
	return code, out, None

def task_energy(config, mesh, rho):
	f, report = _solve(config, mesh, rho)
	out = {'energy': report.energy, 'reductive_suspected': report.reductive_suspected, 'flow': report.to_json()}
	return E_OK, out, None

def task_hodge(config, mesh, rho):
	f, report = _solve(config, mesh, rho)
	if _needs_convergence(report):
		return E_NO_CONVERGENCE, {'flow': report.to_json()}, None
	hodge = HodgeComplex(mesh, rho, f)
	rng = np.random.default_rng(config.seed)
	F = hodge.unvec(rng.standard_normal(mesh.n_vertices * hodge.dim), 0)
	alpha = hodge.unvec(rng.standard_normal(mesh.n_edges * hodge.dim), 1)
	parts = hodge_decompose(hodge, alpha)
	lam, V = hodge.spectrum()
	out = {
		'flow': report.to_json(),
		'kernel_dim': hodge.kernel_dim(),
		'd_squared': hodge.d(hodge.d(F)).sup() if mesh.n_faces else 0.0,
		'adjunction': abs(hodge.inner(hodge.d(F), alpha) - hodge.inner(F, hodge.codiff(alpha))),
		'reconstruction': (parts.reconstruct() - alpha).sup(),
		'beta_coclosed': hodge.codiff(hodge.beta()).sup(),
	}
	out['cochains'] = _save_cochains(config, {'beta': hodge.beta(), 'harmonic': parts.harmonic})
	rows = [['index', 'eigenvalue']] + [[i, float(x)] for i, x in enumerate(lam)]
	return E_OK, out, rows

def task_deform1(config, mesh, rho):
	f, report = _solve(config, mesh, rho)
	if _needs_convergence(report):
		return E_NO_CONVERGENCE, {'flow': report.to_json()}, None
	hodge = HodgeComplex(mesh, rho, f)
	c, k = _cocycle(config, rho)
	return E_OK, {'flow': report.to_json(), 'deformation': deformation_report(hodge, c).to_json()}, None

def task_deform2(config, mesh, rho):
	f, report = _solve(config, mesh, rho)
	if _needs_convergence(report):
		return E_NO_CONVERGENCE, {'flow': report.to_json()}, None
	hodge = HodgeComplex(mesh, rho, f)
	c, k = _cocycle(config, rho)
	out = {'flow': report.to_json(), 'deformation': deformation_report(hodge, c, k).to_json()}
	sec = second_order(hodge, c, k)
	if isinstance(sec, Obstruction):
		out['refused'] = sec.to_json()
		return E_OBSTRUCTED, out, None
	return E_OK, out, None

def task_variation(config, mesh, rho):
	spec = dict(config.path.get('params', {}))
	if config.path.get('family') == 'conjugation':
		spec['base'] = rho
		spec.setdefault('seed', config.seed)
	path = factory.path(config.path.get('family'), mesh, **spec)
	result = variation_along(path, mesh, config.flow_params())
	rows = [VariationReport.CSV_COLUMNS, result.csv_row(config.path.get('family'))]
	return E_OK, {'variation': result.to_json()}, rows

def task_psh(config, mesh, rho):
	f, report = _solve(config, mesh, rho)
	if _needs_convergence(report):
		return E_NO_CONVERGENCE, {'flow': report.to_json()}, None
	hodge = HodgeComplex(mesh, rho, f)
	c, k = _cocycle(config, rho)
	try:
		defect = psh_defect(hodge, c, k)
	except ObstructedDeformation as e:
		return E_OBSTRUCTED, {'flow': report.to_json(), 'refused': e.obstruction.to_json()}, None
	return E_OK, {'flow': report.to_json(), 'psh_defect': defect}, None

def task_critical_scan(config, mesh, rho):
	f, report = _solve(config, mesh, rho)
	if _needs_convergence(report):
		return E_NO_CONVERGENCE, {'flow': report.to_json()}, None
	hodge = HodgeComplex(mesh, rho, f)
	basis = cocycle_basis(rho)
	return E_OK, {'flow': report.to_json(), 'directions': len(basis), 'critical_scan': critical_scan(hodge, basis)}, None

def _slope(h, values):
	h = np.asarray(h, dtype=float)
	v = np.asarray(values, dtype=float)
	ok = v > 0
	if np.count_nonzero(ok) < 2:
		return None
	return float(np.polyfit(np.log(h[ok]), np.log(v[ok]), 1)[0])

def refine_study(config):
	"""Energy, Maurer-Cartan and harmonic form residuals across refinement levels."""
	mesh = build_mesh(config.mesh)
	table = []
	series = {}
	for level in range(config.levels):
		rho = build_representation(config.representation, mesh)
		f, report = _solve(config, mesh, rho)
		hodge = HodgeComplex(mesh, rho, f)
		h = mesh.mesh_size
		values = {'energy': report.energy, 'tension': report.tension}
		if config.representation.get('family') == 'hyperbolic':
			L, attained = translation_length(rho.images[0])
			values['energy_error'] = abs(report.energy - L * L / 2.0)
		if mesh.n_faces:
			values['maurer_cartan'] = maurer_cartan_residual(hodge)[1]
		if config.cocycle is not None:
			c, k = _cocycle(config, rho)
			values['harmonic_codiff'] = hodge.codiff(harmonic_rep(hodge, c)).sup()
		for name in sorted(values):
			table.append([h, name, values[name]])
			series.setdefault(name, []).append((h, values[name]))
		debug('refine_study level', level, mesh, values)
		if level + 1 < config.levels:
			mesh = mesh.refined()
	slopes = dict((name, _slope([x for x, y in pts], [y for x, y in pts])) for name, pts in series.items())
	return [['h', 'quantity', 'value']] + table, slopes

def task_refine_study(config, mesh, rho):
	rows, slopes = refine_study(config)
	return E_OK, {'slopes': slopes}, rows

HANDLERS = {
	'flow': task_flow,
	'energy': task_energy,
	'hodge': task_hodge,
	'deform1': task_deform1,
	'deform2': task_deform2,
	'variation': task_variation,
	'psh': task_psh,
	'critical-scan': task_critical_scan,
	'refine-study': task_refine_study,
}

def _save_cochains(config, cochains):
	"""One JSON file per cochain next to the report. Returns the file names."""
	if not os.path.isdir(config.out):
		os.makedirs(config.out)
	names = {}
	for name, a in sorted(cochains.items()):
		names[name] = config.task + '-' + name + '.json'
		save_cochain(a, os.path.join(config.out, names[name]))
	return names

def _write(config, out, rows):
	if not os.path.isdir(config.out):
		os.makedirs(config.out)
	dump_json(out, os.path.join(config.out, config.task + '.json'))
	if rows is not None:
		with open(os.path.join(config.out, config.task + '.csv'), 'w') as f:
			writer = csv.writer(f)
			for row in rows:
				writer.writerow(row)

def run(config):
	"""Run one task. Returns the process exit code."""
	try:
		config.validate()
		mesh = build_mesh(config.mesh)
		rho = build_representation(config.representation, mesh) if config.representation is not None else None
		if rho is None and config.path is not None:
			rho = factory.path(config.path.get('family'), mesh, **config.path.get('params', {})).base
		code, out, rows = HANDLERS[config.task](config, mesh, rho)
	except ObstructedDeformation as e:
		code, out, rows = E_OBSTRUCTED, {'refused': e.obstruction.to_json()}, None
	except (ValueError, KeyError, TypeError, IOError) as e:
		equivarlabutil.logger.error('validation failed: %s', e)
		return E_VALIDATION

	out['schema_version'] = SCHEMA_VERSION
	out['task'] = config.task
	out['config'] = config.to_json()
	out['exit_code'] = code
	_write(config, out, rows)
	if code != E_OK:
		equivarlabutil.logger.warning('%s finished with exit code %d', config.task, code)
	return code

def make_parser():
	parser = OptionParser(usage='%prog <task> --config <path> [--out <dir>] [--seed <n>] [--tol <x>]\n\ntasks: ' +
		', '.join(TASKS))
	parser.add_option('-c', '--config', dest='config', help="JSON experiment description.")
	parser.add_option('-o', '--out', dest='out', help="Directory for the JSON report and CSV tables.")
	parser.add_option('-s', '--seed', dest='seed', type='int', help="Seed for random starts and test data.")
	parser.add_option('-t', '--tol', dest='tol', type='float', help="Tension tolerance of the harmonic map flow.")
	parser.add_option('-v', '--verbose', dest='verbose', action='store_true', default=False,
		help="Log solver progress to standard error.")
	return parser

def main(argv=None):
	parser = make_parser()
	options, args = parser.parse_args(argv)

	logging.basicConfig(stream=sys.stderr, format='%(name)s: %(message)s')
	equivarlabutil.set_debug(options.verbose)

	if len(args) != 1 or options.config is None:
		parser.print_usage(sys.stderr)
		return E_VALIDATION
	try:
		config = ExperimentConfig.from_json(load_json(options.config), task=args[0])
	except (ValueError, IOError) as e:
		equivarlabutil.logger.error('bad config %s: %s', options.config, e)
		return E_VALIDATION

	if options.out is not None:
		config.out = options.out
	if options.seed is not None:
		config.seed = options.seed
	if options.tol is not None:
		config.tol = options.tol
	return run(config)
