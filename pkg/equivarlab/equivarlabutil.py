# Utility methods used across equivarlab
import json
import logging

import numpy as np

DEBUG = False

logger = logging.getLogger('equivarlab')

def debug(*s):
	if DEBUG:
		logger.debug(' '.join(str(x) for x in s))

def set_debug(enabled):
	global DEBUG
	DEBUG = enabled
	logger.setLevel(logging.DEBUG if enabled else logging.WARNING)

# Exit codes of the experiment runner
E_OK = 0
E_VALIDATION = 2
E_NO_CONVERGENCE = 3
E_OBSTRUCTED = 4

# Every report carries this so the CSV/JSON layout can evolve
SCHEMA_VERSION = 1

"""
Encode a real or complex matrix as nested lists. Complex entries become
[re, im] pairs, real entries stay plain numbers.
"""
def matrix_to_json(m):
	m = np.asarray(m)
	if np.iscomplexobj(m):
		return [[[float(z.real), float(z.imag)] for z in row] for row in m]
	return [[float(x) for x in row] for row in m]

def matrix_from_json(rows):
	a = np.array(rows, dtype=float)
	if a.ndim == 3:
		if a.shape[2] != 2:
			raise ValueError('complex entries must be [re, im] pairs')
		return a[..., 0] + 1j * a[..., 1]
	if a.ndim != 2:
		raise ValueError('expected a matrix, got shape ' + str(a.shape))
	return a

def _plain(x):
	"""numpy scalars and arrays as JSON values."""
	if isinstance(x, np.generic):
		return x.item()
	if isinstance(x, np.ndarray):
		return x.tolist()
	raise TypeError(repr(type(x)) + ' is not JSON serializable')

def dump_json(obj, path):
	with open(path, 'w') as f:
		json.dump(obj, f, indent=1, sort_keys=True, default=_plain)

def load_json(path):
	with open(path, 'r') as f:
		return json.load(f)
