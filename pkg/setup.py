#!/usr/bin/env python3
from setuptools import setup, Command

from unittest import TextTestRunner, TestLoader

import os, sys
from glob import glob
from os.path import splitext, basename, join as pjoin

class CleanCommand(Command):
	user_options = [ ]

	def initialize_options(self):
		self._clean_me = [ ]
		for root, dirs, files in os.walk('.'):
			for f in files:
				if f.endswith('.pyc'):
					self._clean_me.append(pjoin(root, f))

	def finalize_options(self):
		pass

	def run(self):
		for clean_me in self._clean_me:
			try:
				os.unlink(clean_me)
			except OSError:
				pass

class TestCommand(Command):
	user_options = [ ]

	def initialize_options(self):
		self._dir = os.getcwd()

	def finalize_options(self):
		pass

	'''
	Finds all the test modules in test/, and runs them.
	'''
	def run(self):
		testfiles = [ ]
		for t in sorted(glob(pjoin(self._dir, 'test', '*.py'))):
			if not t.endswith('__init__.py'):
				testfiles.append('.'.join(
					['test', splitext(basename(t))[0]])
				)

		print('TEST FILES: ' + str(testfiles))
		tests = TestLoader().loadTestsFromNames(testfiles)
		t = TextTestRunner(verbosity = 1)
		result = t.run(tests)
		if not result.wasSuccessful():
			sys.exit(1)

setup(name='equivar-lab',
	version='0.1',
	description='Numerical laboratory for twisted harmonic maps and their deformations',
	keywords=['harmonic maps', 'symmetric spaces', 'deformation theory'],
	license='Apache 2.0',

	scripts=['scripts/equivar-lab'],
	packages=['equivarlab'],
	install_requires=['numpy', 'scipy'],
	tests_require=['mock', 'mockito'],

	cmdclass = { 'test': TestCommand, 'clean': CleanCommand }
)
